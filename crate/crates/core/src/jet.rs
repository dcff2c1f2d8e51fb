//! Truncated Laurent series with explicit guaranteed order.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::Scalar;

/// `x^low * (c_0 + c_1 x + ...)`, exact up to and including `x^order`.
///
/// The first stored coefficient is nonzero and nothing is stored past `order`.
/// The zero jet stores no coefficients but keeps its order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentJet {
    low: i64,
    coeffs: Vec<Scalar>,
    order: i64,
}

impl LaurentJet {
    /// Builds a jet from coefficients starting at `x^low`; coefficients past
    /// `order` are dropped.
    pub fn new(low: i64, coeffs: Vec<Scalar>, order: i64) -> Self {
        let mut j = LaurentJet { low, coeffs, order };
        j.normalize();
        j
    }

    pub fn zero(order: i64) -> Self {
        LaurentJet { low: order + 1, coeffs: Vec::new(), order }
    }

    pub fn constant(c: Scalar, order: i64) -> Self {
        Self::new(0, vec![c], order)
    }

    pub fn monomial(c: Scalar, e: i64, order: i64) -> Self {
        Self::new(e, vec![c], order)
    }

    fn normalize(&mut self) {
        let keep = (self.order - self.low + 1).max(0) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.low = self.order + 1;
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.low += k as i64;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation; `None` for the zero jet.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.low)
        }
    }

    // lowest degree that could carry a nonzero term
    fn floor(&self) -> i64 {
        if self.is_zero() {
            self.order + 1
        } else {
            self.low
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Coefficient of `x^e`; errors past the guaranteed order.
    pub fn coeff(&self, e: i64) -> Result<Scalar> {
        if e > self.order {
            return Err(Error::InsufficientPrecision { required: e, available: self.order });
        }
        Ok(self.coeff_unchecked(e))
    }

    pub(crate) fn coeff_unchecked(&self, e: i64) -> Scalar {
        if self.is_zero() || e < self.low {
            return Scalar::zero();
        }
        self.coeffs.get((e - self.low) as usize).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Stored coefficients from the valuation upward.
    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Highest degree with a stored nonzero coefficient.
    pub fn top_degree(&self) -> Option<i64> {
        self.valuation().map(|v| v + self.coeffs.len() as i64 - 1)
    }

    pub fn add(&self, o: &LaurentJet) -> LaurentJet {
        let order = self.order.min(o.order);
        let low = self.floor().min(o.floor()).min(order + 1);
        let len = (order - low + 1).max(0) as usize;
        let coeffs = (0..len as i64).map(|i| &self.coeff_unchecked(low + i) + &o.coeff_unchecked(low + i)).collect();
        LaurentJet::new(low, coeffs, order)
    }

    pub fn neg(&self) -> LaurentJet {
        LaurentJet { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect(), order: self.order }
    }

    pub fn sub(&self, o: &LaurentJet) -> LaurentJet {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> LaurentJet {
        LaurentJet::new(self.low, self.coeffs.iter().map(|a| a * c).collect(), self.order)
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: i64) -> LaurentJet {
        LaurentJet { low: self.low + k, coeffs: self.coeffs.clone(), order: self.order + k }
    }

    pub fn mul(&self, o: &LaurentJet) -> LaurentJet {
        let order = (self.floor() + o.order).min(o.floor() + self.order);
        if self.is_zero() || o.is_zero() {
            return LaurentJet::zero(order);
        }
        let low = self.low + o.low;
        let len = (order - low + 1).max(0) as usize;
        let mut out = vec![Scalar::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        LaurentJet::new(low, out, order)
    }

    /// Multiplicative inverse of a nonzero jet.
    pub fn invert_unit(&self) -> Result<LaurentJet> {
        if self.is_zero() {
            return Err(Error::ZeroJet);
        }
        let v = self.low;
        let rel = self.order - v;
        let len = (rel + 1) as usize;
        let inv0 = self.coeffs[0].inv();
        let mut out: Vec<Scalar> = Vec::with_capacity(len);
        for m in 0..len {
            if m == 0 {
                out.push(inv0.clone());
                continue;
            }
            let mut acc = Scalar::zero();
            for j in 1..=m.min(self.coeffs.len() - 1) {
                acc += &(&self.coeffs[j] * &out[m - j]);
            }
            out.push(-&(&acc * &inv0));
        }
        Ok(LaurentJet::new(-v, out, -v + rel))
    }

    pub fn derivative(&self) -> LaurentJet {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * &Scalar::from_int(self.low + i as i64)).collect();
        LaurentJet::new(self.low - 1, coeffs, self.order - 1)
    }

    /// `f(x^r)`; valuation and guaranteed order are multiplied by `r`.
    pub fn power_substitute(&self, r: u32) -> LaurentJet {
        let r = r.max(1) as i64;
        if self.is_zero() {
            return LaurentJet::zero(self.order * r);
        }
        let mut out = vec![Scalar::zero(); (self.coeffs.len() - 1) * r as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * r as usize] = c.clone();
        }
        LaurentJet::new(self.low * r, out, self.order * r)
    }

    /// Lowers the guaranteed order.
    pub fn truncate(&self, order: i64) -> Result<LaurentJet> {
        if order > self.order {
            return Err(Error::InsufficientPrecision { required: order, available: self.order });
        }
        Ok(LaurentJet::new(self.low, self.coeffs.clone(), order))
    }

    /// Equality of the two jets up to the smaller guaranteed order.
    pub fn agrees_with(&self, o: &LaurentJet) -> bool {
        self.sub(o).is_zero()
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> LaurentJet {
        LaurentJet::new(self.low, self.coeffs.iter().map(f).collect(), self.order)
    }

    /// Coefficient text `x^v*(c0 + c1*x + ...) @order N`.
    pub fn to_text(&self) -> String {
        alloc::format!("{} @order {}", self, self.order)
    }
}

impl fmt::Display for LaurentJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        write!(f, "x^{}*(", self.low)?;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let text = alloc::format!("{}", c);
            let wrapped = if text.contains(['+', '*']) || text[1..].contains('-') {
                alloc::format!("({})", text)
            } else {
                text
            };
            match i {
                0 => write!(f, "{}", wrapped)?,
                1 => write!(f, "{}*x", wrapped)?,
                _ => write!(f, "{}*x^{}", wrapped, i)?,
            }
        }
        f.write_str(")")
    }
}

impl fmt::Debug for LaurentJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
