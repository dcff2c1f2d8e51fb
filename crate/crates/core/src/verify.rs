//! Independent checks on reduction outputs: chain replay against the
//! multiplied gauge identity, form predicates, and invariant reports.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{TransformChain, TransformStep};
use crate::error::{Error, Result};
use crate::field::{Rational, Scalar};
use crate::matrix::Matrix;
use crate::reduce::NormalForm;
use crate::system::SystemJet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Reported value on success, concrete witness on failure.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport { checks: Vec::new(), all_pass: true }
    }

    pub fn push(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.all_pass &= pass;
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    pub fn merge(&mut self, o: VerificationReport) {
        for c in o.checks {
            self.push(c.name, c.pass, c.detail);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Which normal form to test for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Trs,
    Rtrs,
}

type Terms = Vec<(i64, Matrix)>;

/// `P·A` (`left`) or `A·P` for a Laurent polynomial `P = Σ x^e P_e`.
fn mul_terms(a: &SystemJet, p: &Terms, left: bool) -> SystemJet {
    let n = a.dim();
    let pmin = p.iter().map(|t| t.0).min().unwrap_or(0);
    let order = a.order() + pmin;
    let low = a.valuation().unwrap_or(a.order() + 1) + pmin;
    if order < low {
        return SystemJet::zero(n, order);
    }
    let coeffs = (low..=order)
        .map(|t| {
            let terms: Vec<(i64, &Matrix, &Matrix)> = p
                .iter()
                .filter_map(|(e, m)| {
                    let c = a.at_ref(t - e).filter(|c| !c.is_zero())?;
                    Some(if left { (1, m, c) } else { (1, c, m) })
                })
                .collect();
            if terms.is_empty() {
                Matrix::zeros(n, n)
            } else {
                Matrix::sum_of_products(&terms)
            }
        })
        .collect();
    SystemJet::new(n, low, coeffs, order)
}

fn first_mismatch(x: &SystemJet, y: &SystemJet, upto: i64) -> Option<(i64, usize, usize, Scalar, Scalar)> {
    let lo = [x.valuation(), y.valuation()].iter().flatten().copied().min()?;
    for e in lo..=upto {
        let (a, b) = (x.at(e), y.at(e));
        if a != b {
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    if a[(i, j)] != b[(i, j)] {
                        return Some((e, i, j, a[(i, j)].clone(), b[(i, j)].clone()));
                    }
                }
            }
        }
    }
    None
}

fn gauge_terms(step: &TransformStep, n: usize) -> Option<(Terms, Terms)> {
    match step {
        TransformStep::ConstantRegular(p) => Some((vec![(0, p.clone())], Vec::new())),
        TransformStep::RegularPolynomial(p) => {
            let c = p.coeffs();
            let pt = c.iter().enumerate().map(|(d, m)| (d as i64, m.clone())).collect();
            let dt = c.iter().enumerate().skip(1).map(|(d, m)| (d as i64 - 1, m.scale(&Scalar::from_int(d as i64)))).collect();
            Some((pt, dt))
        }
        TransformStep::DiagonalMonomial(k) => {
            let mut pt: Terms = Vec::new();
            let mut dt: Terms = Vec::new();
            for (i, &e) in k.iter().enumerate() {
                let e = e as i64;
                let mut unit = Matrix::zeros(n, n);
                unit[(i, i)] = Scalar::one();
                match pt.iter_mut().find(|t| t.0 == e) {
                    Some(t) => t.1 = t.1.add(&unit),
                    None => pt.push((e, unit.clone())),
                }
                if e > 0 {
                    let u = unit.scale(&Scalar::from_int(e));
                    match dt.iter_mut().find(|t| t.0 == e - 1) {
                        Some(t) => t.1 = t.1.add(&u),
                        None => dt.push((e - 1, u)),
                    }
                }
            }
            Some((pt, dt))
        }
        TransformStep::Ramification(_) => None,
    }
}

/// `P·B = A·P − P′` through the order both sides know.
fn check_gauge_identity(a: &SystemJet, step: &TransformStep, b: &SystemJet) -> core::result::Result<(), String> {
    let n = a.dim();
    let (p, dp) = gauge_terms(step, n).expect("gauge step");
    let lhs = mul_terms(b, &p, true);
    let ap = mul_terms(a, &p, false);
    let mut rhs = ap.clone();
    for (e, m) in &dp {
        rhs = rhs.sub(&SystemJet::monomial(m.clone(), *e, ap.order()));
    }
    let upto = lhs.order().min(rhs.order());
    match first_mismatch(&lhs, &rhs, upto) {
        None => Ok(()),
        Some((e, i, j, l, r)) => Err(format!("x^{} entry ({}, {}): P*B has {}, A*P - P' has {}", e, i, j, l, r)),
    }
}

/// `B(x) = r x^{r−1} A(x^r)` coefficientwise.
fn check_ramification(a: &SystemJet, r: u32, b: &SystemJet) -> core::result::Result<(), String> {
    let ri = r as i64;
    let lo = b.valuation().unwrap_or(b.order()).min(ri * a.valuation().unwrap_or(0) + ri - 1);
    for t in lo..=b.order() {
        let expect = if (t - (ri - 1)).rem_euclid(ri) == 0 {
            a.at((t - (ri - 1)) / ri).scale(&Scalar::from_int(ri))
        } else {
            Matrix::zeros(a.dim(), a.dim())
        };
        if b.at(t) != expect {
            return Err(format!("x^{}: expected {}, found {}", t, expect, b.at(t)));
        }
    }
    if b.order() > ri * a.order() + ri - 1 {
        return Err(format!("order {} exceeds {}", b.order(), ri * a.order() + ri - 1));
    }
    Ok(())
}

/// Replays `chain` on `a`, checks every step against its defining identity,
/// and compares the result with `claimed` up to the smaller guaranteed order.
pub fn check_gauge_chain(a: &SystemJet, chain: &TransformChain, claimed: &SystemJet) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    if claimed.dim() != a.dim() {
        rep.push("dimension", false, format!("input {} vs claimed {}", a.dim(), claimed.dim()));
        return Ok(rep);
    }
    let mut cur = a.clone();
    for (i, step) in chain.steps.iter().enumerate() {
        let name = format!("step {} ({})", i, step.kind_name());
        let next = match step.apply(&cur) {
            Ok(b) => b,
            Err(e) => {
                rep.push(name, false, format!("{}", e));
                return Ok(rep);
            }
        };
        let res = match step {
            TransformStep::Ramification(r) => check_ramification(&cur, *r, &next),
            g => check_gauge_identity(&cur, g, &next),
        };
        match res {
            Ok(()) => rep.push(name, true, format!("order {}", next.order())),
            Err(w) => rep.push(name, false, w),
        }
        cur = next;
    }
    if claimed.order() > cur.order() {
        return Err(Error::InsufficientPrecision { required: claimed.order(), available: cur.order() });
    }
    match first_mismatch(&cur, claimed, claimed.order()) {
        None => rep.push("replay", true, format!("exact through x^{}", claimed.order())),
        Some((e, i, j, r, c)) => {
            rep.push("replay", false, format!("x^{} entry ({}, {}): replay {}, claimed {}", e, i, j, r, c))
        }
    }
    Ok(rep)
}

/// Poincaré rank after each step never increases across a gauge step.
pub fn check_rank_monotone(a: &SystemJet, chain: &TransformChain) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    let rank = |s: &SystemJet| s.valuation().map_or(0, |v| (-v - 1).max(0));
    let mut cur = a.clone();
    let mut bad = Vec::new();
    for (i, step) in chain.steps.iter().enumerate() {
        let next = step.apply(&cur)?;
        if step.is_gauge() && rank(&next) > rank(&cur) {
            bad.push(format!("step {}: {} -> {}", i, rank(&cur), rank(&next)));
        }
        cur = next;
    }
    if bad.is_empty() {
        rep.push("rank monotone", true, format!("{} steps", chain.len()));
    } else {
        rep.push("rank monotone", false, bad.join("; "));
    }
    Ok(rep)
}

/// Levels `x^{q+1} B = Σ x^l L_l`.
fn lvl(b: &SystemJet, q: i64, l: i64) -> Matrix {
    b.at(l - q - 1)
}

fn theta_shaped(m: &Matrix, i: usize, j: usize) -> bool {
    m[(i, j)] == m[(i + 1, j + 1)] && m[(i, j + 1)] == -&m[(i + 1, j)]
}

/// Tests the normal-form shape of degree `mu` with rank `q`:
/// `x^{q+1} B = D(x) + x^q C + O(x^{q+μ+1})`.
pub fn check_form(b: &SystemJet, kind: FormKind, q: i64, mu: i64) -> Result<VerificationReport> {
    if b.order() < mu - 1 {
        return Err(Error::InsufficientPrecision { required: mu - 1, available: b.order() });
    }
    let n = b.dim();
    let mut rep = VerificationReport::new();
    match b.valuation() {
        Some(v) if v < -q - 1 => rep.push("pole order", false, format!("valuation {} below {}", v, -q - 1)),
        v => rep.push("pole order", true, format!("valuation {:?}", v)),
    }
    let d: Vec<Matrix> = (0..q).map(|l| lvl(b, q, l)).collect();
    let c = lvl(b, q, q);

    let mut pairs: Vec<usize> = Vec::new();
    let mut shape = Vec::new();
    match kind {
        FormKind::Trs => {
            for (l, m) in d.iter().enumerate() {
                if let Some((i, j)) = off_diagonal(m, &[]) {
                    shape.push(format!("D_{} entry ({}, {}) = {}", l, i, j, m[(i, j)]));
                }
            }
        }
        FormKind::Rtrs => {
            let mut i = 0;
            while i < n {
                if i + 1 < n && d.iter().any(|m| !m[(i, i + 1)].is_zero() || !m[(i + 1, i)].is_zero()) {
                    pairs.push(i);
                    i += 2;
                } else {
                    i += 1;
                }
            }
            for (l, m) in d.iter().enumerate() {
                if !m.is_real() {
                    shape.push(format!("D_{} is not real", l));
                }
                if let Some((i, j)) = off_diagonal(m, &pairs) {
                    shape.push(format!("D_{} entry ({}, {}) = {}", l, i, j, m[(i, j)]));
                }
                for &p in &pairs {
                    if !theta_shaped(m, p, p) {
                        shape.push(format!("D_{} block at {} is not a complex block", l, p));
                    }
                }
            }
            let first_pair = pairs.first().copied().unwrap_or(n);
            let reals_after = (first_pair..n).any(|i| !pairs.iter().any(|&p| i == p || i == p + 1));
            if reals_after {
                shape.push(format!("real unit after the pair at {}", first_pair));
            }
        }
    }
    rep.push("exponential shape", shape.is_empty(), if shape.is_empty() { format!("rank {}", q) } else { shape.join("; ") });

    if q > 0 {
        rep.push("leading term", !d[0].is_zero(), if d[0].is_zero() { "D(0) = 0" } else { "D(0) != 0" });
    }
    let mut comm = Vec::new();
    for (l, m) in d.iter().enumerate() {
        let k = m.commutator(&c);
        if let Some((i, j)) = first_nonzero(&k) {
            comm.push(format!("[D_{}, C] entry ({}, {}) = {}", l, i, j, k[(i, j)]));
        }
    }
    rep.push("commutation", comm.is_empty(), if comm.is_empty() { String::from("[D, C] = 0") } else { comm.join("; ") });

    if kind == FormKind::Rtrs {
        let mut bad = Vec::new();
        if !c.is_real() {
            bad.push(String::from("C is not real"));
        }
        let in_pair = |i: usize| pairs.iter().any(|&p| i == p || i == p + 1);
        for i in 0..n {
            for j in 0..n {
                if in_pair(i) != in_pair(j) && !c[(i, j)].is_zero() {
                    bad.push(format!("C entry ({}, {}) couples real and complex parts", i, j));
                }
            }
        }
        for &u in &pairs {
            for &v in &pairs {
                if !theta_shaped(&c, u, v) {
                    bad.push(format!("C block ({}, {}) is not a complex block", u, v));
                }
            }
        }
        rep.push("residual split", bad.is_empty(), if bad.is_empty() { format!("n1 = {}", n - 2 * pairs.len()) } else { bad.join("; ") });
    }

    let mut tail = Vec::new();
    for l in q + 1..=q + mu {
        if let Some((i, j)) = first_nonzero(&lvl(b, q, l)) {
            tail.push(format!("level {} entry ({}, {})", l, i, j));
        }
    }
    rep.push("tail", tail.is_empty(), if tail.is_empty() { format!("zero through degree {}", mu) } else { tail.join("; ") });
    Ok(rep)
}

fn first_nonzero(m: &Matrix) -> Option<(usize, usize)> {
    (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).find(|&(i, j)| !m[(i, j)].is_zero())
}

/// First nonzero entry outside the diagonal and the 2×2 blocks at `pairs`.
fn off_diagonal(m: &Matrix, pairs: &[usize]) -> Option<(usize, usize)> {
    let unit = |i: usize| pairs.iter().find(|&&p| i == p || i == p + 1).copied().unwrap_or(usize::MAX - i);
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && unit(i) != unit(j) && !m[(i, j)].is_zero())
}

/// One exponential entry as terms `(e, c)` of `c · x^{e−1} dx`, the
/// integrand of the exponent in the original variable.
pub type ExponentSignature = Vec<(Rational, Scalar)>;

/// Entries `d_j z^{j−q−1} dz` with `z = x^{1/r}` rewritten in `x`:
/// exponent `(j−q)/r`, coefficient `d_j/r`. Independent of `r`.
pub fn exponential_signature(nf: &NormalForm) -> Vec<ExponentSignature> {
    let q = nf.rank;
    let r = nf.ramification as i64;
    let mut out: Vec<ExponentSignature> = nf
        .exponential_entries()
        .into_iter()
        .map(|d| {
            d.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (Rational::new((j as i64 - q).into(), r.into()), c * &Scalar::from_int(r).inv()))
                .collect()
        })
        .collect();
    out.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            let o = x.0.cmp(&y.0).then_with(|| x.1.canonical_cmp(&y.1));
            if o != core::cmp::Ordering::Equal {
                return o;
            }
        }
        a.len().cmp(&b.len())
    });
    out
}

fn signature_text(s: &ExponentSignature) -> String {
    if s.is_empty() {
        return String::from("0");
    }
    let t: Vec<String> = s.iter().map(|(e, c)| format!("({})*x^({})", c, e)).collect();
    t.join(" + ")
}

/// `ν`, `q`, `k`, `N`, and with a normal form attached `q̃/r` and the
/// exponential signature.
pub fn invariants_report(a: &SystemJet, nf: Option<&NormalForm>) -> VerificationReport {
    let mut rep = VerificationReport::new();
    match a.invariants() {
        Ok(inv) => {
            rep.push("n", true, format!("{}", inv.n));
            rep.push("nu", true, format!("{}", inv.nu));
            rep.push("q", true, format!("{}", inv.q));
            rep.push("k", true, format!("{}", inv.k));
            rep.push("N", true, format!("{}", inv.determinacy));
            rep.push("relative order", true, format!("{}", a.relative_order().unwrap_or(0)));
        }
        Err(e) => rep.push("invariants", false, format!("{}", e)),
    }
    if let Some(nf) = nf {
        let ratio = Rational::new(nf.rank.into(), (nf.ramification as i64).into());
        rep.push("rank ratio", true, format!("{}", ratio));
        let sig: Vec<String> = exponential_signature(nf).iter().map(signature_text).collect();
        rep.push("exponential part", true, format!("{{{}}}", sig.join(", ")));
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::{normal_form, Mode};
    use crate::system::PolyMatrix;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows)
    }

    fn sys(low: i64, coeffs: &[Matrix], order: i64) -> SystemJet {
        SystemJet::new(coeffs[0].rows(), low, coeffs.to_vec(), order)
    }

    fn sample() -> SystemJet {
        sys(-2, &[m(&[&[1, 2], &[0, 3]]), m(&[&[0, 1], &[1, 0]]), m(&[&[2, 0], &[5, 1]])], 1)
    }

    #[test]
    fn empty_chain_passes() {
        let a = sample();
        assert!(check_gauge_chain(&a, &TransformChain::new(), &a).unwrap().all_pass);
    }

    #[test]
    fn single_gauge_passes_and_mutation_fails() {
        let a = sample();
        let p = PolyMatrix::new(2, vec![m(&[&[1, 1], &[0, 1]]), m(&[&[0, 2], &[3, 0]])]);
        let b = a.gauge_regular(&p).unwrap();
        let chain = TransformChain::from_steps(vec![TransformStep::RegularPolynomial(p)]);
        assert!(check_gauge_chain(&a, &chain, &b).unwrap().all_pass);
        let mut bad = b.at(0);
        bad[(1, 0)] = &bad[(1, 0)] + &Scalar::one();
        let tampered = b.sub(&SystemJet::monomial(b.at(0), 0, b.order())).add(&SystemJet::monomial(bad, 0, b.order()));
        let rep = check_gauge_chain(&a, &chain, &tampered).unwrap();
        assert!(!rep.all_pass);
        let w = &rep.failures().next().unwrap().detail;
        assert!(w.contains("x^0 entry (1, 0)"), "{}", w);
    }

    #[test]
    fn monomial_and_ramification_steps() {
        let a = sample();
        let chain = TransformChain::from_steps(vec![
            TransformStep::Ramification(2),
            TransformStep::DiagonalMonomial(vec![0, 1]),
        ]);
        let b = chain.apply(&a).unwrap();
        assert!(check_gauge_chain(&a, &chain, &b).unwrap().all_pass);
        assert!(check_rank_monotone(&a, &chain).unwrap().all_pass);
    }

    #[test]
    fn form_predicates() {
        let euler = sys(-1, &[m(&[&[1, 2], &[3, 4]])], 0);
        assert!(check_form(&euler, FormKind::Trs, 0, 0).unwrap().all_pass);
        let radial = sys(-2, &[m(&[&[1, 0], &[0, 1]]), m(&[&[1, 7], &[3, 4]])], 0);
        assert!(check_form(&radial, FormKind::Trs, 1, 0).unwrap().all_pass);
        let split = sys(-2, &[m(&[&[1, 0], &[0, 2]]), m(&[&[0, 1], &[0, 0]])], 0);
        let rep = check_form(&split, FormKind::Trs, 1, 0).unwrap();
        assert!(!rep.all_pass);
        assert!(rep.failures().any(|c| c.name == "commutation"));
        let tail = sys(-2, &[m(&[&[1, 0], &[0, 2]]), m(&[&[0, 0], &[0, 0]]), m(&[&[0, 1], &[0, 0]])], 1);
        assert!(check_form(&tail, FormKind::Trs, 1, 0).unwrap().all_pass);
        assert!(!check_form(&tail, FormKind::Trs, 1, 1).unwrap().all_pass);
    }

    #[test]
    fn real_form_predicates() {
        let a = sys(
            -2,
            &[m(&[&[5, 0, 0], &[0, 1, -2], &[0, 2, 1]]), m(&[&[1, 0, 0], &[0, 3, -1], &[0, 1, 3]])],
            0,
        );
        assert!(check_form(&a, FormKind::Rtrs, 1, 0).unwrap().all_pass);
        assert!(!check_form(&a, FormKind::Trs, 1, 0).unwrap().all_pass);
        let swapped = sys(-2, &[m(&[&[1, -2, 0], &[2, 1, 0], &[0, 0, 5]])], 0);
        assert!(!check_form(&swapped, FormKind::Rtrs, 1, 0).unwrap().all_pass);
    }

    #[test]
    fn reports_rank_ratio() {
        let a = sys(-2, &[m(&[&[1, 0], &[0, 2]])], 2);
        let nf = normal_form(&a, Mode::Complex, 0, 1).unwrap();
        let rep = invariants_report(&a, Some(&nf));
        let get = |k: &str| rep.checks.iter().find(|c| c.name == k).unwrap().detail.clone();
        assert_eq!(get("q"), "1");
        assert_eq!(get("N"), "2");
        assert_eq!(get("rank ratio"), "1");
        assert_eq!(get("exponential part"), "{(1)*x^(-1), (2)*x^(-1)}");
    }
}
