//! Recorded reduction moves and their composition.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::system::{PolyMatrix, SystemJet};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TransformStep {
    /// `Psi_P` with `P` an invertible constant matrix.
    ConstantRegular(Matrix),
    /// `Psi_P` with `P` polynomial and `P(0)` invertible.
    RegularPolynomial(PolyMatrix),
    /// `Psi_P` with `P = diag(x^{k_1}, ..., x^{k_n})`.
    DiagonalMonomial(Vec<u32>),
    /// `R_r`
    Ramification(u32),
}

impl TransformStep {
    pub fn kind_name(&self) -> &'static str {
        match self {
            TransformStep::ConstantRegular(_) => "constant-regular",
            TransformStep::RegularPolynomial(_) => "regular-polynomial",
            TransformStep::DiagonalMonomial(_) => "diagonal-monomial",
            TransformStep::Ramification(_) => "ramification",
        }
    }

    pub fn is_gauge(&self) -> bool {
        !matches!(self, TransformStep::Ramification(_))
    }

    /// Checks the payload invariants of the step kind.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidStep(format!("{}: {}", self.kind_name(), s)));
        match self {
            TransformStep::ConstantRegular(p) => {
                if p.rows() != n || p.cols() != n {
                    return bad("size mismatch");
                }
                if p.det().is_zero() {
                    return bad("singular matrix");
                }
            }
            TransformStep::RegularPolynomial(p) => {
                if p.dim() != n {
                    return bad("size mismatch");
                }
                if p.coeff(0).det().is_zero() {
                    return bad("P(0) is singular");
                }
            }
            TransformStep::DiagonalMonomial(k) => {
                if k.len() != n {
                    return bad("size mismatch");
                }
            }
            TransformStep::Ramification(r) => {
                if *r == 0 {
                    return bad("index must be positive");
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, a: &SystemJet) -> Result<SystemJet> {
        self.validate(a.dim())?;
        match self {
            TransformStep::ConstantRegular(p) => a.gauge_regular(&PolyMatrix::constant(p.clone())),
            TransformStep::RegularPolynomial(p) => a.gauge_regular(p),
            TransformStep::DiagonalMonomial(k) => Ok(a.gauge_monomial(k)),
            TransformStep::Ramification(r) => Ok(a.ramify(*r)),
        }
    }

    /// The gauge matrix as a polynomial, when it is regular.
    pub fn as_poly(&self) -> Option<PolyMatrix> {
        match self {
            TransformStep::ConstantRegular(p) => Some(PolyMatrix::constant(p.clone())),
            TransformStep::RegularPolynomial(p) => Some(p.clone()),
            _ => None,
        }
    }

    /// The step `P(x^r)` with `R_r o Psi_P = Psi_{P(x^r)} o R_r`.
    pub fn push_through(&self, r: u32) -> TransformStep {
        match self {
            TransformStep::ConstantRegular(p) => TransformStep::ConstantRegular(p.clone()),
            TransformStep::RegularPolynomial(p) => TransformStep::RegularPolynomial(p.substitute_power(r)),
            TransformStep::DiagonalMonomial(k) => TransformStep::DiagonalMonomial(k.iter().map(|v| v * r).collect()),
            TransformStep::Ramification(s) => TransformStep::Ramification(*s),
        }
    }

    /// The step acting on a block `before..before+n` of a larger system, identity elsewhere.
    pub fn embed(&self, before: usize, after: usize) -> TransformStep {
        match self {
            TransformStep::ConstantRegular(p) => TransformStep::ConstantRegular(Matrix::block_diag(&[
                Matrix::identity(before),
                p.clone(),
                Matrix::identity(after),
            ])),
            TransformStep::RegularPolynomial(p) => TransformStep::RegularPolynomial(p.embed(before, after)),
            TransformStep::DiagonalMonomial(k) => {
                let mut v = alloc::vec![0u32; before];
                v.extend_from_slice(k);
                v.extend(core::iter::repeat(0).take(after));
                TransformStep::DiagonalMonomial(v)
            }
            TransformStep::Ramification(r) => TransformStep::Ramification(*r),
        }
    }

    /// Applies an entrywise map to matrix payloads (used for block embeddings).
    pub fn map_payload(&self, f: &dyn Fn(&Matrix) -> Matrix, dup: usize) -> TransformStep {
        match self {
            TransformStep::ConstantRegular(p) => TransformStep::ConstantRegular(f(p)),
            TransformStep::RegularPolynomial(p) => TransformStep::RegularPolynomial(p.map(f)),
            TransformStep::DiagonalMonomial(k) => {
                TransformStep::DiagonalMonomial(k.iter().flat_map(|&v| core::iter::repeat(v).take(dup)).collect())
            }
            TransformStep::Ramification(r) => TransformStep::Ramification(*r),
        }
    }

    pub fn lies_in(&self, field: &Field) -> bool {
        match self {
            TransformStep::ConstantRegular(p) => p.lies_in(field),
            TransformStep::RegularPolynomial(p) => p.lies_in(field),
            _ => true,
        }
    }

    /// Polynomial degree of the gauge matrix.
    pub fn degree(&self) -> usize {
        match self {
            TransformStep::ConstantRegular(_) | TransformStep::Ramification(_) => 0,
            TransformStep::RegularPolynomial(p) => p.degree(),
            TransformStep::DiagonalMonomial(k) => k.iter().copied().max().unwrap_or(0) as usize,
        }
    }
}

/// Steps applied left to right.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct TransformChain {
    pub steps: Vec<TransformStep>,
}

impl TransformChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<TransformStep>) -> Self {
        TransformChain { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, s: TransformStep) {
        match &s {
            TransformStep::Ramification(1) => {}
            TransformStep::ConstantRegular(p) if *p == Matrix::identity(p.rows()) => {}
            TransformStep::RegularPolynomial(p) if p.is_identity() => {}
            TransformStep::DiagonalMonomial(k) if k.iter().all(|&v| v == 0) => {}
            _ => self.steps.push(s),
        }
    }

    pub fn extend(&mut self, o: &TransformChain) {
        for s in &o.steps {
            self.push(s.clone());
        }
    }

    pub fn apply(&self, a: &SystemJet) -> Result<SystemJet> {
        let mut cur = a.clone();
        for s in &self.steps {
            cur = s.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Every intermediate system, starting with the input.
    pub fn trace(&self, a: &SystemJet) -> Result<Vec<SystemJet>> {
        let mut out = alloc::vec![a.clone()];
        for s in &self.steps {
            let next = s.apply(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }

    /// Total ramification index.
    pub fn ramification(&self) -> u32 {
        self.steps.iter().map(|s| if let TransformStep::Ramification(r) = s { *r } else { 1 }).product()
    }

    /// Equivalent chain with a single leading ramification (if any) followed by gauges.
    pub fn normalize(&self) -> TransformChain {
        let mut gauges: Vec<TransformStep> = Vec::new();
        let mut r_total = 1u32;
        for s in &self.steps {
            match s {
                TransformStep::Ramification(r) => {
                    gauges = gauges.iter().map(|g| g.push_through(*r)).collect();
                    r_total *= r;
                }
                g => gauges.push(g.clone()),
            }
        }
        let mut out = TransformChain::new();
        out.push(TransformStep::Ramification(r_total));
        for g in gauges {
            out.push(g);
        }
        out
    }

    /// `R_s o self` rewritten with the ramification in front.
    pub fn push_through(&self, s: u32) -> TransformChain {
        let mut c = TransformChain::from_steps(alloc::vec![TransformStep::Ramification(s)]);
        c.extend(self);
        c.normalize()
    }

    pub fn embed(&self, before: usize, after: usize) -> TransformChain {
        TransformChain { steps: self.steps.iter().map(|s| s.embed(before, after)).collect() }
    }

    pub fn lies_in(&self, field: &Field) -> bool {
        self.steps.iter().all(|s| s.lies_in(field))
    }

    /// Product of the regular gauge steps, if the chain has no monomial or ramification step.
    pub fn regular_product(&self, n: usize) -> Option<PolyMatrix> {
        let mut acc = PolyMatrix::identity(n);
        for s in &self.steps {
            acc = acc.mul(&s.as_poly()?);
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Scalar;
    use proptest::prelude::*;

    fn arb_system(n: usize) -> impl Strategy<Value = SystemJet> {
        (proptest::collection::vec(-3i64..4, n * n * 4), -3i64..0).prop_map(move |(v, low)| {
            let coeffs = (0..4)
                .map(|t| Matrix::from_fn(n, n, |i, j| Scalar::from_int(v[t * n * n + i * n + j])))
                .collect();
            SystemJet::new(n, low, coeffs, low + 6)
        })
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = PolyMatrix> {
        proptest::collection::vec(-2i64..3, n * n * 2).prop_map(move |v| {
            let p0 = Matrix::identity(n);
            let p1 = Matrix::from_fn(n, n, |i, j| Scalar::from_int(v[i * n + j]));
            let p2 = Matrix::from_fn(n, n, |i, j| Scalar::from_int(v[n * n + i * n + j]));
            PolyMatrix::new(n, alloc::vec![p0, p1, p2])
        })
    }

    #[test]
    fn push_through_examples() {
        let c = Matrix::from_ints(&[&[1, 2], &[3, 4]]);
        assert_eq!(TransformStep::ConstantRegular(c.clone()).push_through(3), TransformStep::ConstantRegular(c));
        assert_eq!(TransformStep::DiagonalMonomial(alloc::vec![0, 1]).push_through(2), TransformStep::DiagonalMonomial(alloc::vec![0, 2]));
    }

    proptest! {
        #[test]
        fn gauge_identity_holds(a in arb_system(2), p in arb_poly(2)) {
            let b = a.gauge_regular(&p).unwrap();
            let pj = p.as_jet(100);
            let lhs = mul_jets(&pj, &b);
            let rhs = mul_jets(&a, &pj).sub(&p.derivative().as_jet(100));
            prop_assert!(lhs.agrees_with(&rhs));
            prop_assert_eq!(b.order(), a.order());
            prop_assert_eq!(b.poincare_rank(), a.poincare_rank());
        }

        #[test]
        fn gauge_is_functorial(a in arb_system(2), p in arb_poly(2), q in arb_poly(2)) {
            let lhs = a.gauge_regular(&p).unwrap().gauge_regular(&q).unwrap();
            let rhs = a.gauge_regular(&p.mul(&q)).unwrap();
            prop_assert!(lhs.agrees_with(&rhs));
        }

        #[test]
        fn ramification_commutes(a in arb_system(2), p in arb_poly(2), r in 1u32..4) {
            let lhs = a.gauge_regular(&p).unwrap().ramify(r);
            let rhs = a.ramify(r).gauge_regular(&p.substitute_power(r)).unwrap();
            prop_assert!(lhs.agrees_with(&rhs));
            let k = alloc::vec![1u32, 0];
            let lhs = a.gauge_monomial(&k).ramify(r);
            let rhs = a.ramify(r).gauge_monomial(&[r, 0]);
            prop_assert!(lhs.agrees_with(&rhs));
        }

        #[test]
        fn normalized_chain_agrees(a in arb_system(2), p in arb_poly(2), r in 2u32..4) {
            let chain = TransformChain::from_steps(alloc::vec![
                TransformStep::RegularPolynomial(p.clone()),
                TransformStep::DiagonalMonomial(alloc::vec![0, 1]),
                TransformStep::Ramification(r),
                TransformStep::RegularPolynomial(p),
            ]);
            let norm = chain.normalize();
            prop_assert!(matches!(norm.steps[0], TransformStep::Ramification(_)));
            prop_assert!(chain.apply(&a).unwrap().agrees_with(&norm.apply(&a).unwrap()));
        }

        #[test]
        fn radial_part_is_rigid(a in arb_system(3), p in arb_poly(3)) {
            let inv = a.invariants().unwrap();
            let b = a.gauge_regular(&p).unwrap();
            for j in 0..inv.k {
                prop_assert_eq!(b.coeff(j).unwrap(), a.coeff(j).unwrap());
            }
        }
    }

    // plain product of two series, used as an independent check
    fn mul_jets(a: &SystemJet, b: &SystemJet) -> SystemJet {
        let n = a.dim();
        let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) else {
            return SystemJet::zero(n, a.order().min(b.order()));
        };
        let order = (va + b.order()).min(vb + a.order());
        let coeffs = (va + vb..=order)
            .map(|e| {
                let mut s = Matrix::zeros(n, n);
                for i in va..=e - vb {
                    s = s.add(&a.at(i).mul(&b.at(e - i)));
                }
                s
            })
            .collect();
        SystemJet::new(n, va + vb, coeffs, order)
    }
}
