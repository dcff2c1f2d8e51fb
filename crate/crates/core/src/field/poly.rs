use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::Scalar;
use crate::error::{Error, Result};

/// Dense univariate polynomial over the tower, lowest degree first.
///
/// The leading coefficient is nonzero; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::new(vec![c])
    }

    /// `x - a`
    pub fn linear(a: &Scalar) -> Self {
        Self::new(vec![-a, Scalar::one()])
    }

    pub fn x() -> Self {
        Self::new(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c.is_one())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.leading().inv();
        self.scale(&inv)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn divrem(&self, o: &Poly) -> Result<(Poly, Poly)> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dn = o.deg();
        if self.coeffs.len() < o.coeffs.len() {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv = o.leading().inv();
        let mut r = self.coeffs.clone();
        let mut q = vec![Scalar::zero(); r.len() - dn];
        for i in (0..q.len()).rev() {
            let c = &r[i + dn] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    r[i + j] -= &(&c * b);
                }
            }
            q[i] = c;
        }
        r.truncate(dn);
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn rem(&self, o: &Poly) -> Result<Poly> {
        Ok(self.divrem(o)?.1)
    }

    /// Exact quotient; fails if the division leaves a remainder.
    pub fn exact_div(&self, o: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(o)?;
        if !r.is_zero() {
            return Err(Error::Precondition(String::from("polynomial division is not exact")));
        }
        Ok(q)
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn xgcd(&self, o: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero divisor");
            r0 = core::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = core::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = core::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.leading().inv();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * &Scalar::from_int(i as i64)).collect())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// `f(x + c)`
    pub fn shift(&self, c: &Scalar) -> Poly {
        let mut acc = Poly::zero();
        let lin = Poly::new(vec![c.clone(), Scalar::one()]);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(a.clone()));
        }
        acc
    }

    /// Applies a map to every coefficient.
    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() == 0
    }

    /// Yun's squarefree decomposition: monic `(factor, multiplicity)` pairs with
    /// pairwise coprime squarefree factors.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let f = self.monic();
        let mut out = Vec::new();
        if f.deg() == 0 {
            return out;
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.exact_div(&a0).expect("gcd divides");
        let mut c = fp.exact_div(&a0).expect("gcd divides");
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.deg() > 0 {
            let a = b.gcd(&d);
            b = b.exact_div(&a).expect("gcd divides");
            c = d.exact_div(&a).expect("gcd divides");
            d = c.sub(&b.derivative());
            if a.deg() > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// Canonical ordering of polynomials (degree, then coefficients from the top).
    pub fn canonical_cmp(&self, o: &Poly) -> core::cmp::Ordering {
        self.coeffs.len().cmp(&o.coeffs.len()).then_with(|| {
            for (a, b) in self.coeffs.iter().rev().zip(o.coeffs.iter().rev()) {
                let c = a.canonical_cmp(b);
                if c != core::cmp::Ordering::Equal {
                    return c;
                }
            }
            core::cmp::Ordering::Equal
        })
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})*x", c)?,
                _ => write!(f, "({})*x^{}", c, i)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_roundtrip() {
        let a = Poly::from_ints(&[1, 2, 3, 4]);
        let b = Poly::from_ints(&[-1, 0, 2]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.deg() < b.deg());
    }

    #[test]
    fn xgcd_identity() {
        let a = Poly::from_ints(&[-1, 0, 1]);
        let b = Poly::from_ints(&[-2, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(g, Poly::one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn yun() {
        // (x-1)^3 (x+2)
        let f = Poly::from_ints(&[-1, 1]).pow(3).mul(&Poly::from_ints(&[2, 1]));
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(Poly::from_ints(&[2, 1]), 1), (Poly::from_ints(&[-1, 1]), 3)]);
    }

    #[test]
    fn shift_and_eval() {
        let f = Poly::from_ints(&[1, 0, 1]);
        let g = f.shift(&Scalar::from_int(2));
        assert_eq!(g.eval(&Scalar::from_int(1)), f.eval(&Scalar::from_int(3)));
    }
}
