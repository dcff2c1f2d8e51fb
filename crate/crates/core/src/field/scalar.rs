use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// An exact element of `Q(sqrt d)(i)`.
///
/// The value is `(re + re_s*sqrt(d)) + i*(im + im_s*sqrt(d))`. Elements with no
/// `sqrt(d)` component store `d = 0`, so elements coming from different
/// subfields combine freely as long as at most one radicand is involved.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: Rational,
    re_s: Rational,
    im: Rational,
    im_s: Rational,
    d: i64,
}

#[inline]
fn rmul(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        Rational::zero()
    } else {
        a * b
    }
}

#[inline]
fn radd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        b.clone()
    } else if b.is_zero() {
        a.clone()
    } else {
        a + b
    }
}

// (a1 + b1 s)(a2 + b2 s), s^2 = d
fn quad_mul(a1: &Rational, b1: &Rational, a2: &Rational, b2: &Rational, d: i64) -> (Rational, Rational) {
    if b1.is_zero() && b2.is_zero() {
        return (rmul(a1, a2), Rational::zero());
    }
    let bb = rmul(b1, b2);
    let re = if bb.is_zero() {
        rmul(a1, a2)
    } else {
        radd(&rmul(a1, a2), &(bb * Rational::from_integer(BigInt::from(d))))
    };
    let s = radd(&rmul(a1, b2), &rmul(a2, b1));
    (re, s)
}

fn merge_d(a: i64, b: i64) -> Result<i64> {
    match (a, b) {
        (0, x) | (x, 0) => Ok(x),
        (x, y) if x == y => Ok(x),
        _ => Err(Error::IncompatibleFields),
    }
}

impl Scalar {
    fn build(re: Rational, re_s: Rational, im: Rational, im_s: Rational, d: i64) -> Self {
        let d = if re_s.is_zero() && im_s.is_zero() { 0 } else { d };
        Scalar { re, re_s, im, im_s, d }
    }

    /// Builds `(re + re_s*sqrt(d)) + i*(im + im_s*sqrt(d))`.
    ///
    /// `d` must be a squarefree integer greater than one whenever a `sqrt(d)`
    /// coordinate is nonzero.
    pub fn new(re: Rational, re_s: Rational, im: Rational, im_s: Rational, d: i64) -> Self {
        debug_assert!(d == 0 || d > 1);
        Self::build(re, re_s, im, im_s, d)
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar { re: r, re_s: Rational::zero(), im: Rational::zero(), im_s: Rational::zero(), d: 0 }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { re: Rational::zero(), re_s: Rational::zero(), im: Rational::one(), im_s: Rational::zero(), d: 0 }
    }

    /// `sqrt(d)` under the positive embedding.
    pub fn sqrt_of(d: i64) -> Self {
        Self::build(Rational::zero(), Rational::one(), Rational::zero(), Rational::zero(), d)
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }
    pub fn re_sqrt(&self) -> &Rational {
        &self.re_s
    }
    pub fn im(&self) -> &Rational {
        &self.im
    }
    pub fn im_sqrt(&self) -> &Rational {
        &self.im_s
    }
    /// Radicand in use, or 0.
    pub fn radicand(&self) -> i64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.re_s.is_zero() && self.im.is_zero() && self.im_s.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.re_s.is_zero() && self.im.is_zero() && self.im_s.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.re_s.is_zero() && self.im.is_zero() && self.im_s.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero() && self.im_s.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.re)
        } else {
            None
        }
    }

    /// Integer value, if this is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    pub fn real_part(&self) -> Scalar {
        Self::build(self.re.clone(), self.re_s.clone(), Rational::zero(), Rational::zero(), self.d)
    }

    pub fn imag_part(&self) -> Scalar {
        Self::build(self.im.clone(), self.im_s.clone(), Rational::zero(), Rational::zero(), self.d)
    }

    /// Builds `re + i*im` from two real elements.
    pub fn complex(re: &Scalar, im: &Scalar) -> Result<Scalar> {
        if !re.is_real() || !im.is_real() {
            return Err(Error::IncompatibleFields);
        }
        let d = merge_d(re.d, im.d)?;
        Ok(Self::build(re.re.clone(), re.re_s.clone(), im.re.clone(), im.re_s.clone(), d))
    }

    /// Complex conjugation: fixes the real subfield, negates the `i` coordinates.
    pub fn conj(&self) -> Scalar {
        Scalar { re: self.re.clone(), re_s: self.re_s.clone(), im: -&self.im, im_s: -&self.im_s, d: self.d }
    }

    /// The automorphism `sqrt(d) -> -sqrt(d)`.
    pub fn sqrt_conj(&self) -> Scalar {
        Scalar { re: self.re.clone(), re_s: -&self.re_s, im: self.im.clone(), im_s: -&self.im_s, d: self.d }
    }

    pub fn checked_add(&self, o: &Scalar) -> Result<Scalar> {
        let d = merge_d(self.d, o.d)?;
        Ok(Self::build(radd(&self.re, &o.re), radd(&self.re_s, &o.re_s), radd(&self.im, &o.im), radd(&self.im_s, &o.im_s), d))
    }

    pub fn checked_mul(&self, o: &Scalar) -> Result<Scalar> {
        let d = merge_d(self.d, o.d)?;
        if self.is_rational() && o.is_rational() {
            return Ok(Self::from_rational(rmul(&self.re, &o.re)));
        }
        let (xr, xs) = quad_mul(&self.re, &self.re_s, &o.re, &o.re_s, d);
        if self.is_real() && o.is_real() {
            return Ok(Self::build(xr, xs, Rational::zero(), Rational::zero(), d));
        }
        let (yr, ys) = quad_mul(&self.im, &self.im_s, &o.im, &o.im_s, d);
        let (ar, as_) = quad_mul(&self.re, &self.re_s, &o.im, &o.im_s, d);
        let (br, bs) = quad_mul(&self.im, &self.im_s, &o.re, &o.re_s, d);
        Ok(Self::build(xr - yr, xs - ys, radd(&ar, &br), radd(&as_, &bs), d))
    }

    pub fn checked_inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Self::from_rational(self.re.recip()));
        }
        let d = self.d;
        let quad_inv = |a: &Rational, b: &Rational| -> (Rational, Rational) {
            if b.is_zero() {
                return (a.recip(), Rational::zero());
            }
            let n = a * a - b * b * Rational::from_integer(BigInt::from(d));
            (a / &n, -(b / &n))
        };
        if self.is_real() {
            let (a, b) = quad_inv(&self.re, &self.re_s);
            return Ok(Self::build(a, b, Rational::zero(), Rational::zero(), d));
        }
        // 1/(x + iy) = (x - iy)/(x^2 + y^2)
        let (x2r, x2s) = quad_mul(&self.re, &self.re_s, &self.re, &self.re_s, d);
        let (y2r, y2s) = quad_mul(&self.im, &self.im_s, &self.im, &self.im_s, d);
        let (nr, ns) = quad_inv(&(x2r + y2r), &(x2s + y2s));
        let (rr, rs) = quad_mul(&self.re, &self.re_s, &nr, &ns, d);
        let (ir, is) = quad_mul(&self.im, &self.im_s, &nr, &ns, d);
        Ok(Self::build(rr, rs, -ir, -is, d))
    }

    pub fn inv(&self) -> Scalar {
        self.checked_inv().expect("inverse of zero scalar")
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar> {
        self.checked_mul(&o.checked_inv()?)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Sign under the positive embedding of `sqrt(d)`; exact, via comparison of squares.
    pub fn sign(&self) -> Result<i8> {
        if !self.is_real() {
            return Err(Error::SignOfComplex);
        }
        Ok(quad_sign(&self.re, &self.re_s, self.d))
    }

    /// Deterministic total order on representations (not the field order).
    pub fn canonical_cmp(&self, o: &Scalar) -> Ordering {
        (self.d, &self.re, &self.re_s, &self.im, &self.im_s).cmp(&(o.d, &o.re, &o.re_s, &o.im, &o.im_s))
    }

    /// Coordinates over `Q` in the order `re, re_s, im, im_s`, restricted to the
    /// layout of the given descriptor.
    pub fn coordinates(&self, field: &super::Field) -> Vec<Rational> {
        let mut out = Vec::new();
        out.push(self.re.clone());
        if field.radicand().is_some() {
            out.push(self.re_s.clone());
        }
        if field.is_complex() {
            out.push(self.im.clone());
            if field.radicand().is_some() {
                out.push(self.im_s.clone());
            }
        }
        out
    }

    /// True when every nonzero coordinate is representable in `field`.
    pub fn lies_in(&self, field: &super::Field) -> bool {
        if !field.is_complex() && !self.is_real() {
            return false;
        }
        match field.radicand() {
            None => self.d == 0,
            Some(d) => self.d == 0 || self.d == d,
        }
    }
}

fn sign_of(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn quad_sign(a: &Rational, b: &Rational, d: i64) -> i8 {
    let sa = sign_of(a);
    let sb = sign_of(b);
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    // opposite signs: compare a^2 with b^2 d
    let lhs = a * a;
    let rhs = b * b * Rational::from_integer(BigInt::from(d));
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_quad(a: &Rational, b: &Rational, d: i64) -> String {
    if b.is_zero() {
        return fmt_rational(a);
    }
    let bpart = if b.is_one() {
        format!("sqrt({})", d)
    } else if (-b).is_one() {
        format!("-sqrt({})", d)
    } else {
        format!("{}*sqrt({})", fmt_rational(b), d)
    };
    if a.is_zero() {
        bpart
    } else if bpart.starts_with('-') {
        format!("{}{}", fmt_rational(a), bpart)
    } else {
        format!("{}+{}", fmt_rational(a), bpart)
    }
}

impl fmt::Display for Scalar {
    /// Canonical text: `p/q`, `p/q+r/s*sqrt(d)`, and `re+(im)*i` for complex values.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = fmt_quad(&self.re, &self.re_s, self.d);
        if self.is_real() {
            return f.write_str(&re);
        }
        let im_simple = self.im_s.is_zero();
        let im = if im_simple {
            if self.im.is_one() {
                String::from("i")
            } else if (-&self.im).is_one() {
                String::from("-i")
            } else {
                format!("{}*i", fmt_rational(&self.im))
            }
        } else if self.im.is_zero() {
            let b = &self.im_s;
            if b.is_one() {
                format!("sqrt({})*i", self.d)
            } else if (-b).is_one() {
                format!("-sqrt({})*i", self.d)
            } else {
                format!("{}*sqrt({})*i", fmt_rational(b), self.d)
            }
        } else {
            format!("({})*i", fmt_quad(&self.im, &self.im_s, self.d))
        };
        let real_zero = self.re.is_zero() && self.re_s.is_zero();
        if real_zero {
            f.write_str(&im)
        } else if im.starts_with('-') {
            write!(f, "{}{}", re, im)
        } else {
            write!(f, "{}+{}", re, im)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.checked_add(o).expect("incompatible field descriptors")
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.checked_mul(o).expect("incompatible field descriptors")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -&self.re, re_s: -&self.re_s, im: -&self.im, im_s: -&self.im_s, d: self.d }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        if o.is_zero() {
            return;
        }
        *self = &*self + o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        if o.is_zero() {
            return;
        }
        *self = &*self - o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn invert_one_plus_i() {
        let z = &Scalar::one() + &Scalar::i();
        let inv = z.inv();
        assert_eq!(inv, &Scalar::from_ratio(1, 2) - &(&Scalar::from_ratio(1, 2) * &Scalar::i()));
        assert!((&z * &inv).is_one());
    }

    #[test]
    fn sign_of_one_minus_sqrt2() {
        let x = &Scalar::one() - &Scalar::sqrt_of(2);
        assert_eq!(x.sign().unwrap(), -1);
        let y = &Scalar::from_int(3) - &(&Scalar::from_int(2) * &Scalar::sqrt_of(2));
        // 3 - 2*1.414.. > 0
        assert_eq!(y.sign().unwrap(), 1);
        assert_eq!(Scalar::i().sign(), Err(Error::SignOfComplex));
    }

    #[test]
    fn conj_fixes_reals() {
        assert_eq!(Scalar::from_int(3).conj(), Scalar::from_int(3));
        assert_eq!(Scalar::i().conj(), -Scalar::i());
    }

    #[test]
    fn incompatible_radicands() {
        let a = Scalar::sqrt_of(2);
        let b = Scalar::sqrt_of(3);
        assert_eq!(a.checked_add(&b), Err(Error::IncompatibleFields));
        assert_eq!(Scalar::one().checked_inv().unwrap(), Scalar::one());
        assert_eq!(Scalar::zero().checked_inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn sqrt_squares_to_radicand() {
        let s = Scalar::sqrt_of(5);
        assert_eq!(&s * &s, Scalar::from_int(5));
        let t = &Scalar::sqrt_of(5) * &Scalar::i();
        assert_eq!(&t * &t, Scalar::from_int(-5));
        assert_eq!((&s + &Scalar::one()).sqrt_conj(), &Scalar::one() - &s);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::from_ratio(-3, 4).to_string(), "-3/4");
        let q = &Scalar::from_ratio(1, 2) + &(&Scalar::from_ratio(-2, 3) * &Scalar::sqrt_of(2));
        assert_eq!(q.to_string(), "1/2-2/3*sqrt(2)");
        assert_eq!((&Scalar::one() - &Scalar::i()).to_string(), "1-i");
        let c = Scalar::complex(&Scalar::from_int(2), &q).unwrap();
        assert_eq!(c.to_string(), "2+(1/2-2/3*sqrt(2))*i");
    }
}
