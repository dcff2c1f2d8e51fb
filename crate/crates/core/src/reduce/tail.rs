//! Tail elimination and deresonation on systems already in degree-zero
//! normal form.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{embed_poly, level, level_order, real_layout, unipotent, Mode, Reducer, Unit};
use crate::chain::{TransformChain, TransformStep};
use crate::error::{Error, Result};
use crate::field::{Field, Poly, Scalar};
use crate::linalg::{
    resonance_data, split_by_factors, sylvester_solve, theta_embed_poly, theta_extract_system, tower_factors,
};
use crate::matrix::Matrix;
use crate::system::{PolyMatrix, SystemJet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    /// Clear every level up to the given exponent.
    Eliminate,
    Deresonate,
}

/// One regular gauge, then an optional diagonal monomial gauge.
#[derive(Clone, Debug)]
struct Round {
    regular: PolyMatrix,
    monomial: Option<Vec<u32>>,
}

/// Result of [`deresonate`].
#[derive(Clone, Debug)]
pub struct Deresonation {
    pub chain: TransformChain,
    pub system: SystemJet,
    /// Largest number of monomial rounds spent on a single block.
    pub rounds: usize,
    pub field: Field,
}

#[derive(Clone, Debug, PartialEq)]
enum Key {
    Value(Scalar),
    /// Real mode: `a ± ib` with `b > 0`.
    Conjugate(Scalar, Scalar),
}

fn rank_of(a: &SystemJet) -> i64 {
    a.poincare_rank().unwrap_or(0)
}

fn minus_scalar(a: &SystemJet, d: &Scalar, q: i64) -> SystemJet {
    a.sub(&SystemJet::monomial(Matrix::scalar(a.dim(), d), -q - 1, a.order()))
}

/// Lifts the rounds of a block on indices `idx` into dimension `n`.
fn embed_rounds(n: usize, idx: &[usize], rounds: &[Round]) -> Vec<Round> {
    rounds
        .iter()
        .map(|r| Round {
            regular: embed_poly(n, idx, &r.regular),
            monomial: r.monomial.as_ref().map(|k| {
                let mut v = vec![0u32; n];
                for (a, &i) in idx.iter().enumerate() {
                    v[i] = k[a];
                }
                v
            }),
        })
        .collect()
}

/// Zips rounds of blocks acting on disjoint indices.
fn zip_rounds(n: usize, parts: Vec<Vec<Round>>) -> Vec<Round> {
    let len = parts.iter().map(|p| p.len()).max().unwrap_or(0);
    (0..len)
        .map(|t| {
            let mut regular = PolyMatrix::identity(n);
            let mut mono: Option<Vec<u32>> = None;
            for p in &parts {
                if let Some(r) = p.get(t) {
                    regular = regular.mul(&r.regular);
                    if let Some(k) = &r.monomial {
                        let acc = mono.get_or_insert_with(|| vec![0; n]);
                        for (a, b) in acc.iter_mut().zip(k) {
                            *a += b;
                        }
                    }
                }
            }
            Round { regular, monomial: mono }
        })
        .collect()
}

fn prepend(n: usize, p: PolyMatrix, mut rounds: Vec<Round>, keep: usize) -> Vec<Round> {
    if rounds.is_empty() {
        rounds.push(Round { regular: PolyMatrix::identity(n), monomial: None });
    }
    rounds[0].regular = p.mul(&rounds[0].regular).truncate(keep);
    rounds
}

fn abs(s: &Scalar) -> Result<Scalar> {
    Ok(if s.sign()? < 0 { -s } else { s.clone() })
}

impl Reducer {
    /// Coarse groups of indices by the value of `D(0)`.
    fn coarse_groups(&self, a: &SystemJet, q: i64) -> Result<Vec<(Key, Vec<usize>)>> {
        let d0 = level(a, q, 0);
        let mut groups: Vec<(Key, Vec<usize>)> = Vec::new();
        let mut add = |key: Key, idx: &[usize]| match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.extend_from_slice(idx),
            None => groups.push((key, idx.to_vec())),
        };
        match self.mode {
            Mode::Complex => {
                for u in 0..a.dim() {
                    add(Key::Value(d0[(u, u)].clone()), &[u]);
                }
            }
            Mode::Real => {
                for unit in real_layout(a, q) {
                    match unit {
                        Unit::Real(i) => add(Key::Value(d0[(i, i)].clone()), &[i]),
                        Unit::Pair(i) => {
                            let b = &d0[(i + 1, i)];
                            if b.is_zero() {
                                add(Key::Value(d0[(i, i)].clone()), &[i, i + 1]);
                            } else {
                                add(Key::Conjugate(d0[(i, i)].clone(), abs(b)?), &[i, i + 1]);
                            }
                        }
                    }
                }
            }
        }
        for g in groups.iter_mut() {
            g.1.sort();
        }
        Ok(groups)
    }

    /// Works on `a` (rank `q`, degree-zero normal form) up to the exponent `top`.
    fn tail(&mut self, a: &SystemJet, top: i64, op: Op) -> Result<Vec<Round>> {
        let n = a.dim();
        let q = rank_of(a);
        if q == 0 {
            return match op {
                Op::Eliminate => self.eliminate_first_kind(a, top).map(|r| vec![r]),
                Op::Deresonate => self.deresonate_first_kind(a),
            };
        }
        let keep = (level_order(a, q)).max(0) as usize;
        let groups = self.coarse_groups(a, q)?;
        let mut p = PolyMatrix::identity(n);
        let mut cur = a.clone();
        if groups.len() > 1 {
            let d0 = level(a, q, 0);
            let blocks: Vec<Matrix> = groups.iter().map(|g| d0.select(&g.1, &g.1)).collect();
            let upto = (top + q + 1).min(level_order(a, q));
            for l in q + 1..=upto {
                let r = level(&cur, q, l);
                let mut x = Matrix::zeros(n, n);
                for (i, gi) in groups.iter().enumerate() {
                    for (j, gj) in groups.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        let rij = r.select(&gi.1, &gj.1);
                        if rij.is_zero() {
                            continue;
                        }
                        let xij = sylvester_solve(&blocks[i], &blocks[j], &rij.neg())?;
                        super::scatter(&mut x, &gi.1, &gj.1, &xij);
                    }
                }
                if x.is_zero() {
                    continue;
                }
                let g = unipotent(l as usize, &x);
                cur = cur.gauge_regular(&g)?;
                p = p.mul(&g).truncate(keep);
            }
        }
        let mut parts = Vec::with_capacity(groups.len());
        for (key, idx) in &groups {
            let sub = cur.select(idx);
            let rounds = match key {
                Key::Value(d) => {
                    let lower = minus_scalar(&sub, d, q);
                    if rank_of(&lower) >= q {
                        return Err(Error::Precondition("system is not in degree-zero normal form".into()));
                    }
                    self.tail(&lower, top, op)?
                }
                Key::Conjugate(..) => self.complex_block(&sub, top, op)?,
            };
            parts.push(embed_rounds(n, idx, &rounds));
        }
        Ok(prepend(n, p, zip_rounds(n, parts), keep))
    }

    /// Real mode: a block whose `D(0)` has the single pair `a ± ib`.
    fn complex_block(&mut self, a: &SystemJet, top: i64, op: Op) -> Result<Vec<Round>> {
        let n = a.dim();
        let q = rank_of(a);
        let d0 = level(a, q, 0);
        let mut flip = Matrix::identity(n);
        for i in (0..n).step_by(2) {
            if d0[(i + 1, i)].sign()? < 0 {
                flip[(i + 1, i + 1)] = Scalar::from_int(-1);
            }
        }
        let flipped = a.gauge_regular(&PolyMatrix::constant(flip.clone()))?;
        let upto = (top + q + 1).min(level_order(a, q));
        let (t0, pp, b) = super::real::propagate_c_structure(&flipped, upto)?;
        let small = theta_extract_system(&b.cap_order(top))?;
        let mut sub = Reducer::new(Mode::Complex, self.field.complexify());
        let rounds = sub.tail(&small, top, op)?;
        self.field = self.field.join(&sub.field.real_part())?;
        let lifted: Vec<Round> = rounds
            .iter()
            .map(|r| Round {
                regular: theta_embed_poly(&r.regular),
                monomial: r.monomial.as_ref().map(|k| k.iter().flat_map(|&v| [v, v]).collect()),
            })
            .collect();
        let head = PolyMatrix::constant(flip.mul(&t0)).mul(&pp);
        let keep = level_order(a, q).max(0) as usize;
        Ok(prepend(n, head, lifted, keep))
    }

    fn eliminate_first_kind(&mut self, a: &SystemJet, top: i64) -> Result<Round> {
        let n = a.dim();
        let c = level(a, 0, 0);
        let data = resonance_data(&c, &self.field)?;
        if data.is_resonant() {
            return Err(Error::ResonantResidual(format!("{}", c)));
        }
        let mut p = PolyMatrix::identity(n);
        let mut cur = a.clone();
        let keep = level_order(a, 0).max(0) as usize;
        for s in 1..=(top + 1).min(level_order(a, 0)) {
            let r = level(&cur, 0, s);
            if r.is_zero() {
                continue;
            }
            let shifted = c.add(&Matrix::scalar(n, &Scalar::from_int(s)));
            let x = sylvester_solve(&c, &shifted, &r.neg())?;
            let g = unipotent(s as usize, &x);
            cur = cur.gauge_regular(&g)?;
            p = p.mul(&g).truncate(keep);
        }
        Ok(Round { regular: p, monomial: None })
    }

    fn deresonate_first_kind(&mut self, a: &SystemJet) -> Result<Vec<Round>> {
        let n = a.dim();
        let mut rounds = Vec::new();
        let mut cur = a.clone();
        loop {
            if cur.order() < -1 {
                return Err(Error::InsufficientPrecision { required: 0, available: level_order(&cur, 0) });
            }
            let c = level(&cur, 0, 0);
            self.field = c.field_over(&self.field)?;
            tower_factors(&c, &mut self.field, self.mode == Mode::Real)?;
            let data = resonance_data(&c, &self.field)?;
            let Some(class) = data.classes.iter().find(|cl| cl.spread() > 0) else { break };
            let top: Poly = class.top().pow(class.members[0].1);
            let rest = c.charpoly().exact_div(&top)?;
            let (t, _) = split_by_factors(&c, &[top.clone(), rest])?;
            cur = cur.gauge_regular(&PolyMatrix::constant(t.clone()))?;
            let k: Vec<u32> = (0..n).map(|i| u32::from(i < top.deg())).collect();
            cur = cur.gauge_monomial(&k);
            rounds.push(Round { regular: PolyMatrix::constant(t), monomial: Some(k) });
        }
        Ok(rounds)
    }
}

fn rounds_to_chain(rounds: &[Round]) -> TransformChain {
    let mut chain = TransformChain::new();
    for r in rounds {
        if r.regular.is_constant() {
            chain.push(TransformStep::ConstantRegular(r.regular.coeff(0)));
        } else {
            chain.push(TransformStep::RegularPolynomial(r.regular.clone()));
        }
        if let Some(k) = &r.monomial {
            chain.push(TransformStep::DiagonalMonomial(k.clone()));
        }
    }
    chain
}

fn start_field(a: &SystemJet, mode: Mode) -> Result<Field> {
    let f = a.field_over(&Field::RATIONALS)?;
    if mode == Mode::Real && f.is_complex() {
        return Err(Error::Precondition("real mode needs a real system".into()));
    }
    Ok(f)
}

/// `Ψ_P` with `P(0) = I` clearing the levels `q+1..=q+μ` of `x^{q+1} A`
/// up to the degree-`μ` normal form. Needs a non-resonant residual matrix
/// on every block of equal exponential part.
pub fn eliminate_tail(a: &SystemJet, mu: i64, mode: Mode) -> Result<(PolyMatrix, SystemJet)> {
    let n = a.dim();
    if a.is_zero() || mu <= 0 {
        return Ok((PolyMatrix::identity(n), a.clone()));
    }
    let q = rank_of(a);
    if level_order(a, q) < q + mu {
        return Err(Error::InsufficientPrecision { required: q + mu, available: level_order(a, q) });
    }
    let mut red = Reducer::new(mode, start_field(a, mode)?);
    let rounds = red.tail(a, mu - 1, Op::Eliminate)?;
    let p = rounds
        .iter()
        .fold(PolyMatrix::identity(n), |acc, r| acc.mul(&r.regular))
        .truncate((q + mu) as usize);
    let b = a.gauge_regular(&p)?;
    Ok((p, b))
}

/// Makes the residual matrix non-resonant without touching the
/// exponential part. Each round lowers one top eigenvalue class by one.
pub fn deresonate(a: &SystemJet, mode: Mode) -> Result<Deresonation> {
    let field = start_field(a, mode)?;
    if a.is_zero() {
        return Ok(Deresonation { chain: TransformChain::new(), system: a.clone(), rounds: 0, field });
    }
    let mut red = Reducer::new(mode, field);
    let q = rank_of(a);
    let rounds = match red.tail(a, a.order(), Op::Deresonate) {
        Err(Error::InsufficientPrecision { .. }) => {
            let m = resonance_data(&level(a, q, q), &red.field).map_or(0, |d| d.m_value as i64);
            return Err(Error::InsufficientPrecision { required: q + 2 * m.max(1), available: level_order(a, q) });
        }
        r => r?,
    };
    let chain = rounds_to_chain(&rounds);
    let count = rounds.iter().filter(|r| r.monomial.is_some()).count();
    let system = chain.apply(a)?;
    if system.order() < -1 {
        return Err(Error::InsufficientPrecision {
            required: level_order(a, q) + (-1 - system.order()),
            available: level_order(a, q),
        });
    }
    Ok(Deresonation { chain, system, rounds: count, field: red.field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_c_matrix, theta_embed};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows)
    }

    fn sys(low: i64, coeffs: &[Matrix], order: i64) -> SystemJet {
        SystemJet::new(coeffs[0].rows(), low, coeffs.to_vec(), order)
    }

    fn theta(re: &[&[i64]], im: &[&[i64]]) -> Matrix {
        let c = Matrix::from_fn(re.len(), re.len(), |i, j| {
            Scalar::complex(&Scalar::from_int(re[i][j]), &Scalar::from_int(im[i][j])).unwrap()
        });
        theta_embed(&c)
    }

    #[test]
    fn scalar_first_kind_tail() {
        let a = sys(-1, &[m(&[&[3]]), m(&[&[5]])], 2);
        let (p, b) = eliminate_tail(&a, 1, Mode::Complex).unwrap();
        assert_eq!(p.coeff(1), m(&[&[5]]));
        assert_eq!(b.at(-1), m(&[&[3]]));
        assert!(b.at(0).is_zero());
        let (p, _) = eliminate_tail(&sys(-1, &[m(&[&[3]])], 2), 2, Mode::Complex).unwrap();
        assert!(p.is_identity());
    }

    #[test]
    fn off_diagonal_tail_term() {
        let a = sys(-2, &[m(&[&[1, 0], &[0, 2]]), Matrix::zeros(2, 2), m(&[&[0, 4], &[0, 0]])], 2);
        for mu in 1..=3 {
            let (p, b) = eliminate_tail(&a, mu, Mode::Complex).unwrap();
            assert!(p.degree() as i64 <= 1 + mu);
            for l in 2..=1 + mu {
                assert!(b.normalized(1, l).is_zero(), "mu {mu} level {l}");
            }
            assert_eq!(b.normalized(1, 0), m(&[&[1, 0], &[0, 2]]));
        }
        let (p1, _) = eliminate_tail(&a, 1, Mode::Complex).unwrap();
        let (p3, _) = eliminate_tail(&a, 3, Mode::Complex).unwrap();
        assert_eq!(p3.truncate(2), p1.truncate(2));
    }

    #[test]
    fn resonant_tail_is_refused() {
        let a = sys(-1, &[m(&[&[1, 0], &[0, 0]]), m(&[&[1, 1], &[1, 1]])], 3);
        assert!(matches!(eliminate_tail(&a, 2, Mode::Complex), Err(Error::ResonantResidual(_))));
    }

    #[test]
    fn radial_rounds_match_resonance() {
        for (gap, rounds) in [(1, 1), (2, 2)] {
            let a = sys(-1, &[m(&[&[gap, 0], &[0, 0]]), m(&[&[1, 2], &[3, 4]]), m(&[&[1, 0], &[1, 1]])], 4);
            for mode in [Mode::Complex, Mode::Real] {
                let d = deresonate(&a, mode).unwrap();
                assert_eq!(d.rounds, rounds);
                assert!(d.chain.apply(&a).unwrap().agrees_with(&d.system));
                let c = level(&d.system, 0, 0);
                assert!(!resonance_data(&c, &d.field).unwrap().is_resonant(), "{c}");
            }
        }
        let a = sys(-1, &[m(&[&[0, 1], &[-1, 0]])], 2);
        assert!(deresonate(&a, Mode::Complex).unwrap().chain.is_empty());
    }

    #[test]
    fn conjugate_radial_block() {
        let d0 = theta(&[&[0, 0], &[0, 0]], &[&[1, 0], &[0, 1]]);
        let c = theta(&[&[1, 0], &[0, 0]], &[&[0, 0], &[0, 0]]);
        let tail = m(&[&[1, 0, 2, 0], &[0, 1, 0, 0], &[3, 0, 1, 1], &[0, 2, 0, 1]]);
        let a = sys(-2, &[d0.clone(), c, tail], 3);
        let d = deresonate(&a, Mode::Real).unwrap();
        assert_eq!(d.rounds, 1);
        let b = &d.system;
        assert_eq!(b.normalized(1, 0), d0);
        let c = b.normalized(1, 1);
        assert!(is_c_matrix(&c));
        assert!(d.chain.steps.iter().all(|s| s.as_poly().map_or(true, |p| p.coeffs().iter().all(|m| m.is_real()))));
        let (_, e) = eliminate_tail(b, 1, Mode::Real).unwrap();
        assert!(e.normalized(1, 2).is_zero());
        assert!(is_c_matrix(&e.normalized(1, 1)));
    }
}
