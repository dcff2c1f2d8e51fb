//! Degree-zero reduction: splitting, specialization, shearing and the
//! recursion that assembles a single chain.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_integer::Integer;

use super::{level, level_order, real_layout, unipotent, Measure, Mode, Reducer};
use crate::chain::{TransformChain, TransformStep};
use crate::error::{Error, Result};
use crate::field::{factor_poly, Field, Poly, Scalar};
use crate::linalg::{
    gamma_invariants, jordan_matrix, jordan_single_eigen, real_canonical_form, split_by_factors, sylvester_solve,
    theta_embed, theta_embed_system, theta_extract_system, tower_factors,
};
use crate::matrix::Matrix;
use crate::system::{PolyMatrix, SystemInvariants, SystemJet};

/// Which term of the minimum defines the shearing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShearWitness {
    /// `α_{uv} / (1 + u − v)` for `u > v` (0-based indices).
    Lower { row: usize, col: usize, alpha: i64 },
    Diagonal { index: usize, alpha: i64 },
    RankGap(i64),
}

/// `g = h / r` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShearingOrder {
    pub h: u32,
    pub r: u32,
    pub witness: ShearWitness,
}

/// Output of a degree-zero reduction.
#[derive(Clone, Debug)]
pub struct Rank0 {
    /// Normalized: at most one leading ramification, then gauges.
    pub chain: TransformChain,
    /// The chain replayed on the input.
    pub system: SystemJet,
    /// Smallest tower containing every payload.
    pub field: Field,
    pub rank: i64,
    pub ramification: u32,
    /// Measures `I(A)` logged along each single-eigenvalue loop.
    pub loops: Vec<Vec<Measure>>,
}

enum Spectrum {
    Single(Scalar),
    Pair,
    Several(Vec<Poly>),
}

fn block_starts(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![0];
    for &z in sizes {
        s.push(s.last().unwrap() + z);
    }
    s
}


fn require_levels(a: &SystemJet, q: i64, n: i64) -> Result<()> {
    let have = level_order(a, q);
    if have < n {
        return Err(Error::InsufficientPrecision { required: n, available: have });
    }
    Ok(())
}

/// Gauges `a` so that the levels `k+1..=n` of `x^{q+1} A` are special of
/// type `sizes`. Requires `A_k` to be the Jordan matrix of that type.
pub fn specialize_coefficients(a: &SystemJet, sizes: &[usize], n: i64) -> Result<(PolyMatrix, SystemJet)> {
    let inv = a.invariants()?;
    let dim = a.dim();
    if sizes.iter().sum::<usize>() != dim {
        return Err(Error::Dimension(format!("block sizes {:?} for dimension {}", sizes, dim)));
    }
    if sizes.iter().all(|&s| s == 1) {
        return Err(Error::Precondition("leading matrix is radial".into()));
    }
    let ak = level(a, inv.q, inv.k);
    let lambda = ak[(0, 0)].clone();
    if ak != jordan_matrix(&lambda, sizes) {
        return Err(Error::Precondition(format!("leading matrix is not a Jordan matrix of type {:?}", sizes)));
    }
    require_levels(a, inv.q, n)?;
    let starts = block_starts(sizes);
    let last_row = |u: usize| starts.contains(&(u + 1));
    let first_col = |v: usize| starts.contains(&v);
    let deg = (n - inv.k).max(0) as usize;
    let keep = (level_order(a, inv.q) - inv.k).max(0) as usize;
    let mut p = PolyMatrix::identity(dim);
    let mut cur = a.clone();
    for m in 1..=deg {
        let r = level(&cur, inv.q, inv.k + m as i64);
        let mut x = Matrix::zeros(dim, dim);
        for u in 0..dim {
            if last_row(u) {
                continue;
            }
            for v in 0..dim {
                let carry = if first_col(v) { Scalar::zero() } else { x[(u, v - 1)].clone() };
                x[(u + 1, v)] = &carry - &r[(u, v)];
            }
        }
        if x.is_zero() {
            continue;
        }
        let g = unipotent(m, &x);
        cur = cur.gauge_regular(&g)?;
        p = p.mul(&g).truncate(keep);
    }
    Ok((p, cur))
}

/// True when the nonzero rows of `m` sit at block ends only.
#[cfg(test)]
fn is_special(m: &Matrix, sizes: &[usize]) -> bool {
    let starts = block_starts(sizes);
    (0..m.rows()).all(|u| starts.contains(&(u + 1)) || m.row(u).iter().all(|z| z.is_zero()))
}

/// The shearing order of a system whose leading non-scalar matrix is in
/// Jordan form with a single eigenvalue.
pub fn shearing_order(a: &SystemJet) -> Result<ShearingOrder> {
    let inv = a.invariants()?;
    if inv.q == inv.k {
        return Err(Error::Precondition("radial system has no shearing order".into()));
    }
    require_levels(a, inv.q, inv.q)?;
    let n = a.dim();
    let span = inv.q - inv.k;
    let ak = level(a, inv.q, inv.k);
    let lambda = Matrix::scalar(n, &ak[(0, 0)]);
    let bars: Vec<Matrix> = (0..=span)
        .map(|l| {
            let m = level(a, inv.q, inv.k + l);
            if l == 0 {
                m.sub(&lambda)
            } else {
                m
            }
        })
        .collect();
    let alpha = |u: usize, v: usize| (0..=span).find(|&l| !bars[l as usize][(u, v)].is_zero());
    let mut candidates: Vec<(i64, i64, ShearWitness)> = Vec::new();
    for u in 0..n {
        for v in 0..u {
            if let Some(al) = alpha(u, v) {
                candidates.push((al, (1 + u - v) as i64, ShearWitness::Lower { row: u, col: v, alpha: al }));
            }
        }
    }
    for u in 0..n {
        if let Some(al) = alpha(u, u) {
            candidates.push((al, 1, ShearWitness::Diagonal { index: u, alpha: al }));
        }
    }
    candidates.push((span, 1, ShearWitness::RankGap(span)));
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if c.0 * best.1 < best.0 * c.1 {
            best = *c;
        }
    }
    if best.0 <= 0 {
        return Err(Error::Precondition("leading matrix is not in Jordan form".into()));
    }
    let g = best.0.gcd(&best.1);
    Ok(ShearingOrder { h: (best.0 / g) as u32, r: (best.1 / g) as u32, witness: best.2 })
}

fn shear_exponents(n: usize, h: u32) -> Vec<u32> {
    (0..n as u32).map(|i| i * h).collect()
}

/// `Ψ_{S_h}` with `S_h = diag(1, x^h, …, x^{(n−1)h})`.
pub fn shear(a: &SystemJet, h: u32) -> SystemJet {
    a.gauge_monomial(&shear_exponents(a.dim(), h))
}

/// Block-diagonalizes the levels `k+1..=n` of `x^{q+1} Ψ_{T₀}[A]` along
/// the block sizes, assuming `T₀⁻¹ A_k T₀` is block diagonal with pairwise
/// coprime characteristic polynomials. Returns `T = T₀ P` and the system.
pub fn splitting_lemma(a: &SystemJet, t0: &Matrix, sizes: &[usize], n: i64) -> Result<(PolyMatrix, SystemJet)> {
    let (p, b) = split_blocks(a, t0, sizes, n)?;
    Ok((PolyMatrix::constant(t0.clone()).mul(&p), b))
}

fn split_blocks(a: &SystemJet, t0: &Matrix, sizes: &[usize], n: i64) -> Result<(PolyMatrix, SystemJet)> {
    let inv = a.invariants()?;
    if inv.k >= inv.q {
        return Err(Error::Precondition("splitting needs k < q".into()));
    }
    let dim = a.dim();
    if sizes.iter().sum::<usize>() != dim {
        return Err(Error::Dimension(format!("block sizes {:?} for dimension {}", sizes, dim)));
    }
    require_levels(a, inv.q, n)?;
    let cur0 = a.gauge_regular(&PolyMatrix::constant(t0.clone()))?;
    let ak = level(&cur0, inv.q, inv.k);
    let starts = block_starts(sizes);
    let nb = sizes.len();
    let diag: Vec<Matrix> = (0..nb).map(|i| ak.block(starts[i], starts[i + 1], starts[i], starts[i + 1])).collect();
    for i in 0..nb {
        for j in 0..nb {
            if i != j && !ak.block(starts[i], starts[i + 1], starts[j], starts[j + 1]).is_zero() {
                return Err(Error::Precondition("conjugated leading matrix is not block diagonal".into()));
            }
            if i < j && diag[i].charpoly().gcd(&diag[j].charpoly()).deg() > 0 {
                return Err(Error::SpectraNotDisjoint);
            }
        }
    }
    let deg = (n - inv.k).max(0) as usize;
    // Scalar levels below k commute with the gauge and pass through unchanged.
    let e0 = inv.k - inv.q - 1;
    let order = cur0.order();
    let scalar = SystemJet::new(dim, inv.nu, (inv.nu..e0).map(|e| cur0.at(e)).collect(), order);
    let rest: Vec<Matrix> = (e0..=order).map(|e| cur0.at(e)).collect();
    let id = Matrix::identity(dim);
    let mut ps: Vec<Matrix> = vec![id.clone()];
    let mut bs: Vec<Matrix> = Vec::with_capacity(rest.len());
    for (m, am) in rest.iter().enumerate() {
        let mut terms: Vec<(i64, &Matrix, &Matrix)> = vec![(1, am, &id)];
        for i in 1..m.min(ps.len()) {
            if ps[i].is_zero() {
                continue;
            }
            terms.push((1, &rest[m - i], &ps[i]));
            terms.push((-1, &ps[i], &bs[m - i]));
        }
        let d = e0 + m as i64 + 1;
        if d >= 1 && (d as usize) < ps.len() && !ps[d as usize].is_zero() {
            terms.push((-d, &ps[d as usize], &id));
        }
        let mut r = if terms.len() == 1 { am.clone() } else { Matrix::sum_of_products(&terms) };
        if m >= 1 && m <= deg {
            let mut x = Matrix::zeros(dim, dim);
            for i in 0..nb {
                for j in 0..nb {
                    if i == j {
                        continue;
                    }
                    let rij = r.block(starts[i], starts[i + 1], starts[j], starts[j + 1]);
                    if rij.is_zero() {
                        continue;
                    }
                    let xij = sylvester_solve(&diag[i], &diag[j], &rij.neg())?;
                    x.set_block(starts[i], starts[j], &xij);
                }
            }
            if !x.is_zero() {
                r = Matrix::sum_of_products(&[(1, &r, &id), (1, &ak, &x), (-1, &x, &ak)]);
            }
            ps.push(x);
        }
        bs.push(r);
    }
    while ps.len() > 1 && ps.last().is_some_and(Matrix::is_zero) {
        ps.pop();
    }
    let cur = scalar.add(&SystemJet::new(dim, e0, bs, order));
    Ok((PolyMatrix::new(dim, ps), cur))
}

/// `R_s ∘ chain` for a chain whose ramification is already leading.
fn ramify_after(chain: &TransformChain, s: u32) -> TransformChain {
    let mut c = chain.clone();
    c.steps.push(TransformStep::Ramification(s));
    c.normalize()
}

/// Combines per-block chains (each normalized) for a block-diagonal
/// system into one chain: a common ramification, then rounds of one
/// block-diagonal regular gauge followed by one block-diagonal monomial.
pub(crate) fn merge_block_chains(chains: &[TransformChain], sizes: &[usize]) -> TransformChain {
    let r = chains.iter().fold(1u32, |acc, c| acc.lcm(&c.ramification()));
    let gauges: Vec<Vec<TransformStep>> = chains
        .iter()
        .map(|c| {
            ramify_after(c, r / c.ramification())
                .steps
                .into_iter()
                .filter(|s| s.is_gauge())
                .collect()
        })
        .collect();
    let segments: Vec<Vec<(Vec<TransformStep>, Option<Vec<u32>>)>> = gauges
        .iter()
        .map(|steps| {
            let mut out = Vec::new();
            let mut run = Vec::new();
            for s in steps {
                match s {
                    TransformStep::DiagonalMonomial(k) => out.push((core::mem::take(&mut run), Some(k.clone()))),
                    other => run.push(other.clone()),
                }
            }
            if !run.is_empty() {
                out.push((run, None));
            }
            out
        })
        .collect();
    let rounds = segments.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut out = TransformChain::new();
    out.push(TransformStep::Ramification(r));
    for t in 0..rounds {
        let mut polys = Vec::with_capacity(sizes.len());
        let mut mono = Vec::new();
        for (b, segs) in segments.iter().enumerate() {
            let seg = segs.get(t);
            let mut p = PolyMatrix::identity(sizes[b]);
            for s in seg.map(|s| s.0.as_slice()).unwrap_or(&[]) {
                p = p.mul(&s.as_poly().expect("regular step"));
            }
            polys.push(p);
            match seg.and_then(|s| s.1.as_ref()) {
                Some(k) => mono.extend_from_slice(k),
                None => mono.extend(core::iter::repeat(0).take(sizes[b])),
            }
        }
        let p = PolyMatrix::block_diag(&polys);
        if p.is_constant() {
            out.push(TransformStep::ConstantRegular(p.coeff(0)));
        } else {
            out.push(TransformStep::RegularPolynomial(p));
        }
        out.push(TransformStep::DiagonalMonomial(mono));
    }
    out
}

fn measure(ak: &Matrix, q: i64, k: i64) -> Measure {
    let mut m = gamma_invariants(ak);
    m.push((q - k) as usize);
    m
}

impl Reducer {
    fn classify(&mut self, ak: &Matrix) -> Result<Spectrum> {
        self.field = ak.field_over(&self.field)?;
        let base = factor_poly(&ak.charpoly(), &self.field)?;
        if base.len() > 1 {
            return Ok(Spectrum::Several(base.iter().map(|(p, m)| p.pow(*m)).collect()));
        }
        let fs = tower_factors(ak, &mut self.field, self.mode == Mode::Real)?;
        if fs.len() > 1 {
            return Ok(Spectrum::Several(fs.iter().map(|(p, m)| p.pow(*m)).collect()));
        }
        let p = fs[0].0.monic();
        if p.deg() == 1 {
            Ok(Spectrum::Single(-&p.coeff(0)))
        } else {
            Ok(Spectrum::Pair)
        }
    }

    /// Reduces `a` to degree-zero normal form. The returned chain may hold
    /// ramifications anywhere; the system is the chain applied to `a`.
    pub(crate) fn rank0(&mut self, a: &SystemJet) -> Result<(TransformChain, SystemJet)> {
        if a.is_zero() {
            return Ok((TransformChain::new(), a.clone()));
        }
        let inv = a.invariants()?;
        if inv.q == inv.k {
            return self.trivial(a, &inv);
        }
        let ak = level(a, inv.q, inv.k);
        match self.classify(&ak)? {
            Spectrum::Several(parts) => self.split(a, &inv, &ak, &parts),
            Spectrum::Single(lambda) => self.single(a, lambda),
            Spectrum::Pair => self.conjugate_pair(a, &inv),
        }
    }

    fn trivial(&mut self, a: &SystemJet, inv: &SystemInvariants) -> Result<(TransformChain, SystemJet)> {
        let mut chain = TransformChain::new();
        if self.mode == Mode::Real && inv.q == 0 {
            let c = level(a, 0, 0);
            match real_canonical_form(&c, &self.field) {
                Ok(rc) => {
                    self.field = rc.field.clone();
                    chain.push(TransformStep::ConstantRegular(rc.conjugator));
                }
                Err(Error::UnsupportedTower(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let b = chain.apply(a)?;
        Ok((chain, b))
    }

    fn split(
        &mut self,
        a: &SystemJet,
        inv: &SystemInvariants,
        ak: &Matrix,
        parts: &[Poly],
    ) -> Result<(TransformChain, SystemJet)> {
        let mut parts = parts.to_vec();
        parts.sort_by_key(|p| {
            let v = ak.eval_poly(p);
            (0..v.cols()).find(|&j| v.col(j).iter().all(Scalar::is_zero)).unwrap_or(usize::MAX)
        });
        let (t0, blocks) = split_by_factors(ak, &parts)?;
        let sizes: Vec<usize> = blocks.iter().map(|b| b.rows()).collect();
        let (p, b) = split_blocks(a, &t0, &sizes, level_order(a, inv.q))?;
        let mut chain = TransformChain::new();
        chain.push(TransformStep::ConstantRegular(t0));
        chain.push(TransformStep::RegularPolynomial(p));
        let starts = block_starts(&sizes);
        let mut sub_chains = Vec::with_capacity(sizes.len());
        for i in 0..sizes.len() {
            let idx: Vec<usize> = (starts[i]..starts[i + 1]).collect();
            let (c, _) = self.rank0(&b.select(&idx))?;
            sub_chains.push(c.normalize());
        }
        let merged = merge_block_chains(&sub_chains, &sizes);
        let out = merged.apply(&b)?;
        chain.extend(&merged);
        Ok((chain, out))
    }

    /// Case of a single eigenvalue in the base field: specialize, shear,
    /// and repeat while the leading matrix keeps a single eigenvalue.
    fn single(&mut self, a: &SystemJet, lambda: Scalar) -> Result<(TransformChain, SystemJet)> {
        let n = a.dim();
        let mut chain = TransformChain::new();
        let mut cur = a.clone();
        let mut lambda = lambda;
        let mut log: Vec<Measure> = Vec::new();
        loop {
            let inv = cur.invariants()?;
            let ak = level(&cur, inv.q, inv.k);
            log.push(measure(&ak, inv.q, inv.k));
            if log.len() > 10 * n {
                self.loops.push(log);
                return Err(Error::Precondition("shearing loop did not terminate".into()));
            }
            let jd = jordan_single_eigen(&ak, &lambda)?;
            chain.push(TransformStep::ConstantRegular(jd.conjugator.clone()));
            cur = cur.gauge_regular(&PolyMatrix::constant(jd.conjugator))?;
            let det = SystemInvariants::determinacy_order(n, inv.q, inv.k).min(level_order(&cur, inv.q));
            let (p, b) = specialize_coefficients(&cur, &jd.block_sizes, det)?;
            chain.push(TransformStep::RegularPolynomial(p));
            let so = shearing_order(&b)?;
            let mut b = b;
            if so.r > 1 {
                chain.push(TransformStep::Ramification(so.r));
                b = b.ramify(so.r);
            }
            chain.push(TransformStep::DiagonalMonomial(shear_exponents(n, so.h)));
            cur = shear(&b, so.h);
            if cur.is_zero() {
                break;
            }
            let inv = cur.invariants()?;
            if inv.q == inv.k {
                let (c, out) = self.trivial(&cur, &inv)?;
                chain.extend(&c);
                cur = out;
                break;
            }
            let ak = level(&cur, inv.q, inv.k);
            match self.classify(&ak)? {
                Spectrum::Single(l) => lambda = l,
                _ => {
                    let (c, out) = self.rank0(&cur)?;
                    chain.extend(&c);
                    cur = out;
                    break;
                }
            }
        }
        self.loops.push(log);
        Ok((chain, cur))
    }

    /// Real mode, `A_k` with a single pair of conjugate eigenvalues: make
    /// the system a ℂ-system, reduce its complex preimage, embed back.
    fn conjugate_pair(&mut self, a: &SystemJet, inv: &SystemInvariants) -> Result<(TransformChain, SystemJet)> {
        let (t0, p, b) = super::real::propagate_c_structure(a, level_order(a, inv.q))?;
        let mut chain = TransformChain::new();
        chain.push(TransformStep::ConstantRegular(t0));
        chain.push(TransformStep::RegularPolynomial(p));
        let small = theta_extract_system(&b)?;
        let mut sub = Reducer::new(Mode::Complex, self.field.complexify());
        let (c, out) = sub.rank0(&small)?;
        self.field = sub.field.real_part();
        self.loops.extend(sub.loops);
        for s in &c.steps {
            chain.push(s.map_payload(&theta_embed, 2));
        }
        Ok((chain, theta_embed_system(&out)))
    }
}

/// Permutation listing real units first, then conjugate pairs, each
/// group ordered by its exponential coefficients.
fn real_layout_permutation(b: &SystemJet, q: i64) -> Vec<usize> {
    let units = real_layout(b, q);
    let key = |start: usize| -> Vec<Scalar> { (0..q).map(|l| level(b, q, l)[(start, start)].clone()).collect() };
    let cmp = |x: &Vec<Scalar>, y: &Vec<Scalar>| {
        x.iter().zip(y).map(|(s, t)| s.canonical_cmp(t)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
    };
    let mut reals: Vec<usize> = Vec::new();
    let mut pairs: Vec<usize> = Vec::new();
    for u in units {
        match u {
            super::normal::Unit::Real(i) => reals.push(i),
            super::normal::Unit::Pair(i) => pairs.push(i),
        }
    }
    reals.sort_by(|&i, &j| cmp(&key(i), &key(j)).then(i.cmp(&j)));
    let pkey = |i: usize| -> Vec<Scalar> {
        (0..q).flat_map(|l| {
            let m = level(b, q, l);
            [m[(i, i)].clone(), m[(i + 1, i)].clone()]
        })
        .collect()
    };
    pairs.sort_by(|&i, &j| cmp(&pkey(i), &pkey(j)).then(i.cmp(&j)));
    let mut perm = reals;
    for i in pairs {
        perm.push(i);
        perm.push(i + 1);
    }
    perm
}

fn padded(a: &SystemJet, n: i64, pad: i64) -> SystemJet {
    let nu = a.valuation().unwrap();
    let coeffs = (nu..=nu + n).map(|e| a.at(e)).collect();
    SystemJet::new(a.dim(), nu, coeffs, nu + n + pad)
}

fn reduce_rank0(a: &SystemJet, mode: Mode) -> Result<Rank0> {
    let base = a.field_over(&Field::RATIONALS)?;
    if mode == Mode::Real && base.is_complex() {
        return Err(Error::Precondition("real mode needs a real system".into()));
    }
    if a.is_zero() {
        return Ok(Rank0 {
            chain: TransformChain::new(),
            system: a.clone(),
            field: base,
            rank: 0,
            ramification: 1,
            loops: Vec::new(),
        });
    }
    let inv = a.invariants()?;
    let available = a.relative_order().unwrap();
    if available < inv.determinacy {
        return Err(Error::InsufficientPrecision { required: inv.determinacy, available });
    }
    let mut pad = 4;
    let (mut red, chain, reduced) = loop {
        let mut red = Reducer::new(mode, base.clone());
        match red.rank0(&padded(a, inv.determinacy, pad)) {
            Ok((c, b)) => break (red, c, b),
            Err(Error::InsufficientPrecision { .. }) if pad < 64 * (inv.determinacy + 4) => pad *= 2,
            Err(e) => return Err(e),
        }
    };
    let mut chain = chain.normalize();
    let rank = reduced.poincare_rank().unwrap_or(0);
    if mode == Mode::Real && !reduced.is_zero() {
        let perm = real_layout_permutation(&reduced, rank);
        if perm.iter().enumerate().any(|(i, &p)| i != p) {
            chain.push(TransformStep::ConstantRegular(Matrix::permutation(&perm)));
        }
    }
    let r = chain.ramification();
    let system = chain.apply(a)?;
    if !system.is_zero() && system.order() < -1 {
        let deficit = -1 - system.order();
        let r = r as i64;
        return Err(Error::InsufficientPrecision { required: available + (deficit + r - 1) / r, available });
    }
    for s in &chain.steps {
        if let Some(p) = s.as_poly() {
            red.field = p.coeffs().iter().try_fold(red.field.clone(), |f, m| m.field_over(&f))?;
        }
    }
    Ok(Rank0 { chain, system, field: red.field, rank, ramification: r, loops: red.loops })
}

/// Degree-zero Turrittin–Ramis–Sibuya reduction over an algebraically
/// closed tower.
pub fn trs_rank0(a: &SystemJet) -> Result<Rank0> {
    reduce_rank0(a, Mode::Complex)
}

/// Degree-zero real reduction; every payload stays in a real tower.
pub fn rtrs_rank0(a: &SystemJet) -> Result<Rank0> {
    reduce_rank0(a, Mode::Real)
}
