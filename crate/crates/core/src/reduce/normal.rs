//! Normal-form data extracted from reduced systems, and the assembled
//! formal normal form.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{level, level_order, rtrs_rank0, trs_rank0, Mode};
use super::{deresonate, eliminate_tail};
use crate::chain::{TransformChain, TransformStep};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::system::{PolyMatrix, SystemJet};

/// A diagonal position of the exponential part in real layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unit {
    Real(usize),
    /// Rows `i, i+1` carry `Θ(d)` with `d` non-real.
    Pair(usize),
}

impl Unit {
    pub fn indices(&self) -> Vec<usize> {
        match *self {
            Unit::Real(i) => alloc::vec![i],
            Unit::Pair(i) => alloc::vec![i, i + 1],
        }
    }
}

/// Reads the real layout off the levels `0..q` of `x^{q+1} B`: a pair
/// starts at `i` when some level has a nonzero entry at `(i, i+1)`.
pub fn real_layout(b: &SystemJet, q: i64) -> Vec<Unit> {
    let n = b.dim();
    let levels: Vec<_> = (0..q).map(|l| level(b, q, l)).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && levels.iter().any(|m| !m[(i, i + 1)].is_zero()) {
            out.push(Unit::Pair(i));
            i += 2;
        } else {
            out.push(Unit::Real(i));
            i += 1;
        }
    }
    out
}

/// `x^{-(q+1)}(D(x) + x^q C)` plus whatever lies beyond level `q + μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub mode: Mode,
    pub rank: i64,
    pub degree: i64,
    pub ramification: u32,
    /// `D_0, …, D_{q−1}`
    pub exponential: Vec<Matrix>,
    pub residual: Matrix,
    /// Index sets of equal exponential entries.
    pub blocks: Vec<Vec<usize>>,
    /// All `Unit::Real` in complex mode.
    pub layout: Vec<Unit>,
    pub principal: SystemJet,
    pub tail: SystemJet,
}

impl NormalForm {
    pub fn dim(&self) -> usize {
        self.residual.rows()
    }

    /// Number of real units `n₁`.
    pub fn real_units(&self) -> usize {
        self.layout.iter().filter(|u| matches!(u, Unit::Real(_))).count()
    }

    /// Complex coefficients `d_0, …, d_{q−1}` of the exponential entry of a unit.
    pub fn unit_entry(&self, u: Unit) -> Vec<Scalar> {
        self.exponential
            .iter()
            .map(|d| match u {
                Unit::Real(i) => d[(i, i)].clone(),
                Unit::Pair(i) => &d[(i, i)] + &(&d[(i + 1, i)] * &Scalar::i()),
            })
            .collect()
    }

    /// The multiset of diagonal exponential entries over ℂ, one per index,
    /// sorted canonically.
    pub fn exponential_entries(&self) -> Vec<Vec<Scalar>> {
        let mut out = Vec::new();
        for &u in &self.layout {
            let e = self.unit_entry(u);
            if let Unit::Pair(_) = u {
                out.push(e.iter().map(Scalar::conj).collect());
            }
            out.push(e);
        }
        out.sort_by(|a, b| cmp_entries(a, b));
        out
    }

    /// `Y(x) = P(x^{1/r}) exp(∫ D(x^{1/r}) x^{−(q+1)/r}) x^{C/r}` rendered
    /// structurally. `with_gauge` controls the leading `P(x^{1/r})` factor.
    pub fn solution_text(&self, with_gauge: bool) -> String {
        let r = self.ramification;
        let var = if r == 1 { String::from("x") } else { format!("x^(1/{})", r) };
        let mut parts = Vec::new();
        if with_gauge {
            parts.push(format!("P({})", var));
        }
        if self.rank > 0 {
            let entries: Vec<String> = self
                .layout
                .iter()
                .map(|&u| {
                    let e = exponent_text(&self.unit_entry(u), self.rank, r);
                    match u {
                        Unit::Real(_) => e,
                        Unit::Pair(_) => format!("theta({})", e),
                    }
                })
                .collect();
            parts.push(format!("exp(diag({}))", entries.join(", ")));
        }
        let c = if r == 1 { format!("{}", self.residual) } else { format!("{}/{}", self.residual, r) };
        parts.push(format!("x^({})", c));
        parts.join(" * ")
    }
}

fn cmp_entries(a: &[Scalar], b: &[Scalar]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let c = x.canonical_cmp(y);
        if c != core::cmp::Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

/// `Σ_j d_j/(j−q) · x^{(j−q)/r}`
fn exponent_text(d: &[Scalar], q: i64, r: u32) -> String {
    let mut terms = Vec::new();
    for (j, dj) in d.iter().enumerate() {
        if dj.is_zero() {
            continue;
        }
        let e = j as i64 - q;
        let c = dj * &Scalar::from_int(e).inv();
        let g = gcd(e.unsigned_abs(), r as u64) as i64;
        let pow = if r as i64 / g == 1 { format!("x^({})", e / g) } else { format!("x^({}/{})", e / g, r as i64 / g) };
        let ct = format!("{}", c);
        let term = if c.is_one() {
            pow
        } else if (-&c).is_one() {
            format!("-{}", pow)
        } else if ct[1..].contains(['+', '-', '*']) {
            format!("({})*{}", ct, pow)
        } else {
            format!("{}*{}", ct, pow)
        };
        terms.push(term);
    }
    if terms.is_empty() {
        return String::from("0");
    }
    let mut out = terms[0].clone();
    for t in &terms[1..] {
        match t.strip_prefix('-') {
            Some(rest) => out.push_str(&format!(" - {}", rest)),
            None => out.push_str(&format!(" + {}", t)),
        }
    }
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reads `D`, `C`, blocks and the tail off a system assumed to be in
/// normal form of degree `mu`. Shape is not checked here.
pub fn normal_form(b: &SystemJet, mode: Mode, mu: i64, r: u32) -> Result<NormalForm> {
    let n = b.dim();
    let q = b.poincare_rank().unwrap_or(0);
    if level_order(b, q) < q {
        return Err(Error::InsufficientPrecision { required: q, available: level_order(b, q) });
    }
    let exponential: Vec<Matrix> = (0..q).map(|l| level(b, q, l)).collect();
    let residual = level(b, q, q);
    let layout = match mode {
        Mode::Complex => (0..n).map(Unit::Real).collect(),
        Mode::Real => real_layout(b, q),
    };
    let mut keys: Vec<(Vec<Scalar>, Vec<usize>)> = Vec::new();
    let probe = NormalForm {
        mode,
        rank: q,
        degree: mu,
        ramification: r,
        exponential: exponential.clone(),
        residual: residual.clone(),
        blocks: Vec::new(),
        layout: layout.clone(),
        principal: SystemJet::zero(n, -1),
        tail: SystemJet::zero(n, b.order()),
    };
    for &u in &layout {
        let e = probe.unit_entry(u);
        match keys.iter_mut().find(|(k, _)| *k == e) {
            Some((_, idx)) => idx.extend(u.indices()),
            None => keys.push((e, u.indices())),
        }
    }
    let principal = SystemJet::new(n, -q - 1, (0..=q).map(|l| level(b, q, l)).collect(), -1);
    let start = mu.max(0);
    let tail = SystemJet::new(n, start, (start..=b.order().max(start - 1)).map(|e| b.at(e)).collect(), b.order());
    Ok(NormalForm {
        blocks: keys.into_iter().map(|(_, i)| i).collect(),
        principal,
        tail,
        ..probe
    })
}

/// Result of [`formal_normal_form`]: `Ψ_P = Ψ_Q ∘ ψ` with `F` the
/// truncated normal form.
#[derive(Clone, Debug)]
pub struct FormalNormalForm {
    /// `ψ`: degree-zero reduction followed by deresonation.
    pub psi: TransformChain,
    /// `Q` with `Q(0) = I`.
    pub q_gauge: PolyMatrix,
    /// `ψ` then `Q`, normalized.
    pub chain: TransformChain,
    /// The chain replayed on the input.
    pub system: SystemJet,
    /// `F` with zero tail.
    pub normal: NormalForm,
    pub field: Field,
    pub deresonation_rounds: usize,
}

impl FormalNormalForm {
    pub fn solution(&self) -> String {
        let gauged = self.chain.steps.iter().any(TransformStep::is_gauge);
        self.normal.solution_text(gauged)
    }
}

fn lift_precision(a: &SystemJet, r: u32, e: Error) -> Error {
    match e {
        Error::InsufficientPrecision { required, available } => {
            let have = a.relative_order().unwrap_or(0);
            let deficit = (required - available).max(1);
            Error::InsufficientPrecision { required: have + (deficit + r as i64 - 1) / r as i64, available: have }
        }
        e => e,
    }
}

/// Degree-zero reduction, deresonation, then tail elimination to degree `mu`.
pub fn formal_normal_form(a: &SystemJet, mu: i64, mode: Mode) -> Result<FormalNormalForm> {
    let r0 = match mode {
        Mode::Complex => trs_rank0(a)?,
        Mode::Real => rtrs_rank0(a)?,
    };
    let r = r0.ramification;
    let de = deresonate(&r0.system, mode).map_err(|e| lift_precision(a, r, e))?;
    let (q_gauge, system) = eliminate_tail(&de.system, mu, mode).map_err(|e| lift_precision(a, r, e))?;
    let mut psi = r0.chain.clone();
    psi.extend(&de.chain);
    let mut chain = psi.clone();
    chain.push(TransformStep::RegularPolynomial(q_gauge.clone()));
    let chain = chain.normalize();
    let mut normal = normal_form(&system, mode, mu, r)?;
    normal.tail = SystemJet::zero(system.dim(), system.order());
    let field = if de.field.is_complex() || !r0.field.is_complex() { de.field.clone() } else { r0.field.clone() };
    Ok(FormalNormalForm { psi, q_gauge, chain, system, normal, field, deresonation_rounds: de.rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::theta_embed;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows)
    }

    fn sys(low: i64, coeffs: &[Matrix], order: i64) -> SystemJet {
        SystemJet::new(coeffs[0].rows(), low, coeffs.to_vec(), order)
    }

    #[test]
    fn first_kind_fixed_point() {
        let c = Matrix::diagonal(&[Scalar::zero(), Scalar::from_ratio(1, 2)]);
        let a = sys(-1, &[c.clone()], 3);
        let f = formal_normal_form(&a, 2, Mode::Complex).unwrap();
        assert!(f.q_gauge.is_identity());
        assert!(f.chain.is_empty());
        assert_eq!(f.normal.principal, a.truncate_abs(-1).unwrap());
        assert_eq!(f.normal.rank, 0);
        assert_eq!(f.solution(), "x^([[0, 0], [0, 1/2]])");
    }

    #[test]
    fn irregular_diagonal_solution() {
        let a = sys(-2, &[m(&[&[1, 0], &[0, 2]])], 4);
        let f = formal_normal_form(&a, 2, Mode::Complex).unwrap();
        assert_eq!(f.normal.principal, a.truncate_abs(-1).unwrap());
        assert_eq!(f.normal.blocks.len(), 2);
        assert_eq!(f.solution(), "exp(diag(-x^(-1), -2*x^(-1))) * x^([[0, 0], [0, 0]])");
    }

    #[test]
    fn resonant_first_kind_pipeline() {
        let a = sys(-1, &[m(&[&[1, 0], &[0, 0]]), m(&[&[1, 2], &[3, 4]])], 6);
        let f = formal_normal_form(&a, 2, Mode::Complex).unwrap();
        assert_eq!(f.chain.apply(&a).unwrap(), f.system);
        assert_eq!(f.deresonation_rounds, 1);
        let c = &f.normal.residual;
        assert!(!crate::linalg::resonance_data(c, &f.field).unwrap().is_resonant());
        for e in 0..2 {
            assert!(f.system.at(e).is_zero());
        }
    }

    #[test]
    fn ramified_solution_exponents() {
        let a = sys(-2, &[m(&[&[0, 1], &[0, 0]]), m(&[&[0, 0], &[1, 0]])], 6);
        let f = formal_normal_form(&a, 0, Mode::Complex).unwrap();
        assert_eq!(f.normal.ramification, 2);
        assert!(f.solution().contains("x^(-1/2)"), "{}", f.solution());
    }

    #[test]
    fn real_pair_form() {
        let t = theta_embed(&Matrix::from_rows(alloc::vec![alloc::vec![Scalar::i()]]));
        let a = sys(-2, &[t], 4);
        let f = formal_normal_form(&a, 1, Mode::Real).unwrap();
        assert_eq!(f.normal.layout, alloc::vec![Unit::Pair(0)]);
        assert_eq!(f.normal.principal, a.truncate_abs(-1).unwrap());
        let e = f.normal.exponential_entries();
        assert_eq!(e.len(), 2);
        assert!(f.solution().starts_with("exp(diag(theta("), "{}", f.solution());
    }
}
