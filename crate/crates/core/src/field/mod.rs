//! Exact scalars in `Q`, `Q(sqrt d)` and their `i`-adjunctions, with polynomials
//! and factorization over them.

mod factor;
mod poly;
mod scalar;
mod zassenhaus;

use core::fmt;
use core::sync::atomic::{AtomicUsize, Ordering};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use factor::{factor_poly, is_irreducible};
pub use poly::Poly;
pub use scalar::Scalar;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

static MAX_DEGREE: AtomicUsize = AtomicUsize::new(16);

/// Degree cap for factorization over `Q`; quadratic towers use half of it.
pub fn max_factor_degree() -> usize {
    MAX_DEGREE.load(Ordering::Relaxed)
}

pub fn set_max_factor_degree(cap: usize) {
    MAX_DEGREE.store(cap.max(1), Ordering::Relaxed);
}

/// Descriptor of a field in the supported tower.
///
/// `Q`, `Q(sqrt d)` with the positive real embedding of `sqrt d`, or the
/// `i`-adjunction of either.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Field {
    d: Option<i64>,
    complex: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FieldKind {
    Rationals,
    RealQuadratic,
    Complexified,
}

impl Field {
    pub const RATIONALS: Field = Field { d: None, complex: false };
    pub const GAUSSIAN: Field = Field { d: None, complex: true };

    pub fn rationals() -> Self {
        Self::RATIONALS
    }

    /// `Q(sqrt d)` for a squarefree `d > 1`.
    pub fn real_quadratic(d: i64) -> Result<Self> {
        if d <= 1 || squarefree_part(&BigInt::from(d)) != BigInt::from(d) {
            return Err(Error::UnsupportedTower(format!("radicand {} is not a squarefree integer > 1", d)));
        }
        Ok(Field { d: Some(d), complex: false })
    }

    pub fn new(d: Option<i64>, complex: bool) -> Result<Self> {
        let base = match d {
            None => Self::RATIONALS,
            Some(d) => Self::real_quadratic(d)?,
        };
        Ok(if complex { base.complexify() } else { base })
    }

    pub fn kind(&self) -> FieldKind {
        if self.complex {
            FieldKind::Complexified
        } else if self.d.is_some() {
            FieldKind::RealQuadratic
        } else {
            FieldKind::Rationals
        }
    }

    pub fn radicand(&self) -> Option<i64> {
        self.d
    }

    pub fn is_complex(&self) -> bool {
        self.complex
    }

    pub fn is_real(&self) -> bool {
        !self.complex
    }

    pub fn real_part(&self) -> Field {
        Field { d: self.d, complex: false }
    }

    pub fn complexify(&self) -> Field {
        Field { d: self.d, complex: true }
    }

    /// Degree over `Q`.
    pub fn degree(&self) -> usize {
        (if self.d.is_some() { 2 } else { 1 }) * (if self.complex { 2 } else { 1 })
    }

    /// Smallest descriptor containing both, if it exists in the tower.
    pub fn join(&self, o: &Field) -> Result<Field> {
        let d = match (self.d, o.d) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) if a == b => Some(a),
            _ => return Err(Error::IncompatibleFields),
        };
        Ok(Field { d, complex: self.complex || o.complex })
    }

    /// Smallest descriptor containing `self` and the given scalar.
    pub fn with_scalar(&self, s: &Scalar) -> Result<Field> {
        let d = if s.radicand() == 0 { None } else { Some(s.radicand()) };
        self.join(&Field { d, complex: !s.is_real() })
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        s.lies_in(self)
    }

    /// Monic minimal polynomial of the top generator over the sub-tower.
    pub fn minimal_polynomial(&self) -> Option<Poly> {
        if self.complex {
            Some(Poly::new(vec![Scalar::one(), Scalar::zero(), Scalar::one()]))
        } else {
            self.d.map(|d| Poly::new(vec![Scalar::from_int(-d), Scalar::zero(), Scalar::one()]))
        }
    }

    /// Extends the field by a square root of `delta`.
    ///
    /// Returns the new descriptor and a chosen square root. Fails with
    /// `UnsupportedTower` if the resulting field is not in the tower.
    pub fn adjoin_sqrt(&self, delta: &Scalar) -> Result<(Field, Scalar)> {
        let here = self.with_scalar(delta)?;
        if let Some(r) = sqrt_in(delta, &here) {
            return Ok((here, r));
        }
        let unsupported = || Error::UnsupportedTower(format!("sqrt({}) over {}", delta, here));
        if !here.complex {
            // -delta a square in the real field: sqrt(delta) = i*sqrt(-delta)
            if let Some(r) = sqrt_in(&-delta, &here) {
                return Ok((here.complexify(), &r * &Scalar::i()));
            }
            if here.d.is_none() {
                let r = delta.as_rational().ok_or_else(unsupported)?;
                let s = squarefree_part(&(r.numer() * r.denom()));
                let s_abs = s.abs();
                let d: i64 = i64::try_from(&s_abs).map_err(|_| unsupported())?;
                let f = Field::new(Some(d), s.is_negative())?;
                // delta = s * w^2 with w rational
                let w2 = r / Rational::from_integer(s);
                let w = rational_sqrt(&w2).ok_or_else(unsupported)?;
                let mut root = &Scalar::from_rational(w) * &Scalar::sqrt_of(d);
                if f.complex {
                    root = &root * &Scalar::i();
                }
                return Ok((f, root));
            }
            // Q(sqrt d): only i can be adjoined (delta = -d * w^2 gives i*sqrt(d)*w)
            let d = here.d.unwrap_or(1);
            let q = delta.checked_div(&Scalar::from_int(-d))?;
            if let Some(w) = sqrt_in(&q, &here) {
                let root = &(&w * &Scalar::sqrt_of(d)) * &Scalar::i();
                return Ok((here.complexify(), root));
            }
            return Err(unsupported());
        }
        if here.d.is_some() {
            return Err(unsupported());
        }
        // Q(i): delta = s * w^2 with s a squarefree integer and w in Q(i)
        let a = delta.re().clone();
        let b = delta.im().clone();
        let n = rational_sqrt(&(&a * &a + &b * &b)).ok_or_else(unsupported)?;
        let mut t = (&a + &n) / Rational::from_integer(BigInt::from(2));
        if t.is_zero() {
            t = (&a - &n) / Rational::from_integer(BigInt::from(2));
        }
        let s = squarefree_part(&(t.numer() * t.denom()));
        let d: i64 = i64::try_from(&s.abs()).map_err(|_| unsupported())?;
        if d <= 1 {
            return Err(unsupported());
        }
        let f = Field::new(Some(d), true)?;
        let q = delta.checked_div(&Scalar::from_int(d))?;
        let w = sqrt_in(&q, &Field::GAUSSIAN).ok_or_else(unsupported)?;
        Ok((f, &w * &Scalar::sqrt_of(d)))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.d, self.complex) {
            (None, false) => f.write_str("Q"),
            (None, true) => f.write_str("Q(i)"),
            (Some(d), false) => write!(f, "Q(sqrt({}))", d),
            (Some(d), true) => write!(f, "Q(sqrt({}))(i)", d),
        }
    }
}

/// Squarefree part of a nonzero integer, keeping the sign.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    if n.is_zero() {
        return BigInt::zero();
    }
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    sign * out * m
}

pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// A square root of `x` inside `field`, if one exists.
pub fn sqrt_in(x: &Scalar, field: &Field) -> Option<Scalar> {
    if !field.contains(x) {
        return None;
    }
    if x.is_zero() {
        return Some(Scalar::zero());
    }
    if field.complex {
        // generator i, base = real part
        let base = field.real_part();
        let a = x.real_part();
        let b = x.imag_part();
        return sqrt_quadratic(&a, &b, &Scalar::from_int(-1), &Scalar::i(), &base);
    }
    match field.d {
        None => x.as_rational().and_then(rational_sqrt).map(Scalar::from_rational),
        Some(d) => {
            let a = Scalar::from_rational(x.re().clone());
            let b = Scalar::from_rational(x.re_sqrt().clone());
            sqrt_quadratic(&a, &b, &Scalar::from_int(d), &Scalar::sqrt_of(d), &Field::RATIONALS)
        }
    }
}

// sqrt(a + b*beta) in K(beta), beta^2 = e, with a, b, e in K
fn sqrt_quadratic(a: &Scalar, b: &Scalar, e: &Scalar, beta: &Scalar, base: &Field) -> Option<Scalar> {
    if b.is_zero() {
        if let Some(r) = sqrt_in(a, base) {
            return Some(r);
        }
        let q = a.checked_div(e).ok()?;
        return sqrt_in(&q, base).map(|r| &r * beta);
    }
    let norm = &(a * a) - &(&(b * b) * e);
    let n = sqrt_in(&norm, base)?;
    let half = Scalar::from_ratio(1, 2);
    for cand in [&(a + &n) * &half, &(a - &n) * &half] {
        if cand.is_zero() {
            continue;
        }
        if let Some(xr) = sqrt_in(&cand, base) {
            let y = b.checked_div(&(&Scalar::from_int(2) * &xr)).ok()?;
            return Some(&xr + &(&y * beta));
        }
    }
    None
}

pub(crate) fn content_of(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

pub(crate) fn lcm_of_denoms<'a, I: IntoIterator<Item = &'a Rational>>(it: I) -> BigInt {
    let mut l = BigInt::one();
    for r in it {
        l = l.lcm(r.denom());
    }
    l
}

pub(crate) fn ints_from(v: &[Rational]) -> Vec<BigInt> {
    let l = lcm_of_denoms(v.iter());
    v.iter().map(|r| (r * Rational::from_integer(l.clone())).to_integer()).collect()
}
