//! Text forms for exact scalars and Laurent jets.
//!
//! Accepts the canonical output of the core `Display` impls, plus ordinary
//! arithmetic in `x`, `i` and `sqrt(d)` with integer literals.

use std::collections::BTreeMap;

use turrittin_core::field::{Rational, Scalar};
use turrittin_core::jet::LaurentJet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct TextError {
    pub column: usize,
    pub message: String,
}

/// A Laurent polynomial `Σ c_e x^e` with finitely many terms.
type Laurent = BTreeMap<i64, Scalar>;

fn constant(c: Scalar) -> Laurent {
    let mut m = Laurent::new();
    if !c.is_zero() {
        m.insert(0, c);
    }
    m
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TextError> {
        Err(TextError {
            column: self.pos + 1,
            message: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), TextError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn integer(&mut self) -> Result<i64, TextError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a digit");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse().map_err(|_| TextError {
            column: start + 1,
            message: format!("integer {} out of range", s),
        })
    }

    fn literal(&mut self) -> Scalar {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Scalar::from_rational(s.parse::<Rational>().unwrap())
    }

    fn signed_integer(&mut self) -> Result<i64, TextError> {
        if self.eat(b'(') {
            let v = self.signed_integer()?;
            self.expect(b')')?;
            return Ok(v);
        }
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let v = self.integer()?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<Laurent, TextError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let t = self.term()?;
                acc = self.add(acc, t)?;
            } else if self.eat(b'-') {
                let t = self.term()?;
                acc = self.add(acc, negate(t))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Laurent, TextError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let f = self.unary()?;
                acc = self.mul(&acc, &f)?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let f = self.unary()?;
                let c = match as_constant(&f) {
                    Some(c) if !c.is_zero() => c,
                    _ => {
                        self.pos = at;
                        return self.err("division by a zero or non-constant term");
                    }
                };
                let inv = c.checked_inv().map_err(|e| TextError {
                    column: at + 1,
                    message: e.to_string(),
                })?;
                acc = self.mul(&acc, &constant(inv))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Laurent, TextError> {
        if self.eat(b'-') {
            return Ok(negate(self.unary()?));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Laurent, TextError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let e = self.signed_integer()?;
        if base.len() == 1 {
            let (&k, c) = base.iter().next().unwrap();
            if c.is_one() || e >= 0 {
                let mut out = Laurent::new();
                let v = if e >= 0 { c.pow(e as u32) } else { c.clone() };
                out.insert(k * e, v);
                return Ok(out);
            }
        }
        if e < 0 || e > u32::MAX as i64 {
            self.pos = at;
            return self.err("negative powers are only allowed on monomials");
        }
        let mut out = constant(Scalar::one());
        for _ in 0..e {
            out = self.mul(&out, &base)?;
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Laurent, TextError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(constant(self.literal())),
            Some(b'x') => {
                self.pos += 1;
                let mut m = Laurent::new();
                m.insert(1, Scalar::one());
                Ok(m)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(constant(Scalar::i()))
            }
            Some(b's') if self.src[self.pos..].starts_with(b"sqrt") => {
                self.pos += 4;
                self.expect(b'(')?;
                let at = self.pos;
                let d = self.signed_integer()?;
                self.expect(b')')?;
                if d == -1 {
                    return Ok(constant(Scalar::i()));
                }
                if d < 2 {
                    self.pos = at;
                    return self.err("sqrt needs an integer greater than one");
                }
                Ok(constant(Scalar::sqrt_of(d)))
            }
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn add(&self, mut a: Laurent, b: Laurent) -> Result<Laurent, TextError> {
        for (e, c) in b {
            let s = match a.get(&e) {
                Some(v) => v.checked_add(&c).map_err(|x| self.core_err(x))?,
                None => c,
            };
            if s.is_zero() {
                a.remove(&e);
            } else {
                a.insert(e, s);
            }
        }
        Ok(a)
    }

    fn mul(&self, a: &Laurent, b: &Laurent) -> Result<Laurent, TextError> {
        let mut out = Laurent::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                let p = ca.checked_mul(cb).map_err(|x| self.core_err(x))?;
                out = self.add(out, BTreeMap::from([(ea + eb, p)]))?;
            }
        }
        Ok(out)
    }

    fn core_err(&self, e: turrittin_core::Error) -> TextError {
        TextError {
            column: self.pos + 1,
            message: e.to_string(),
        }
    }
}

fn negate(a: Laurent) -> Laurent {
    a.into_iter().map(|(e, c)| (e, -c)).collect()
}

fn as_constant(a: &Laurent) -> Option<Scalar> {
    match a.len() {
        0 => Some(Scalar::zero()),
        1 => a.get(&0).cloned(),
        _ => None,
    }
}

fn parse_laurent(text: &str) -> Result<Laurent, TextError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

pub fn parse_scalar(text: &str) -> Result<Scalar, TextError> {
    let v = parse_laurent(text)?;
    as_constant(&v).ok_or(TextError {
        column: 1,
        message: "expected a constant".into(),
    })
}

/// Parses `expr` or `expr @order N`. Without an explicit order `default`
/// is used. Terms past the order are rejected.
pub fn parse_jet(text: &str, default: Option<i64>) -> Result<LaurentJet, TextError> {
    let (body, order) = match text.find('@') {
        Some(at) => {
            let rest = text[at + 1..].trim_start();
            let num = rest.strip_prefix("order").ok_or(TextError {
                column: at + 2,
                message: "expected 'order'".into(),
            })?;
            let n = num.trim().parse::<i64>().map_err(|_| TextError {
                column: at + 2,
                message: format!("bad order '{}'", num.trim()),
            })?;
            if let Some(d) = default {
                if d != n {
                    return Err(TextError {
                        column: at + 1,
                        message: format!("order {} differs from document order {}", n, d),
                    });
                }
            }
            (&text[..at], n)
        }
        None => (
            text,
            default.ok_or(TextError {
                column: text.len() + 1,
                message: "missing '@order N'".into(),
            })?,
        ),
    };
    let v = parse_laurent(body)?;
    if let Some((&top, _)) = v.iter().next_back() {
        if top > order {
            return Err(TextError {
                column: 1,
                message: format!("term x^{} lies past the truncation order {}", top, order),
            });
        }
    }
    let Some((&low, _)) = v.iter().next() else {
        return Ok(LaurentJet::zero(order));
    };
    let coeffs = (low..=order.max(low))
        .map(|e| v.get(&e).cloned().unwrap_or_else(Scalar::zero))
        .collect();
    Ok(LaurentJet::new(low, coeffs, order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_round_trip() {
        for t in [
            "1/2",
            "-3",
            "1/2+3/4*sqrt(2)",
            "1+(2)*i",
            "-sqrt(3)*i",
            "2/3-1/5*i",
            "i",
        ] {
            let s = parse_scalar(t).unwrap();
            assert_eq!(parse_scalar(&s.to_string()).unwrap(), s, "{}", t);
        }
        assert_eq!(parse_scalar("1/2").unwrap(), Scalar::from_ratio(1, 2));
        let big = parse_scalar("-477045727755197260573/3").unwrap();
        assert_eq!(parse_scalar(&big.to_string()).unwrap(), big);
    }

    #[test]
    fn malformed_scalars() {
        assert!(parse_scalar("1//2").is_err());
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("sqrt(2)+sqrt(3)").is_err());
        let e = parse_scalar("3 $").unwrap_err();
        assert_eq!(e.column, 3);
    }

    #[test]
    fn jets() {
        let j = parse_jet("x^-2*(1 + 1/2*x)", Some(3)).unwrap();
        assert_eq!(j.valuation(), Some(-2));
        assert_eq!(j.coeff(-1).unwrap(), Scalar::from_ratio(1, 2));
        assert_eq!(parse_jet(&j.to_text(), None).unwrap(), j);
        assert_eq!(parse_jet(&j.to_string(), Some(3)).unwrap(), j);
        assert!(parse_jet("x^4", Some(3)).is_err());
        assert!(parse_jet("x^-1*(1) @order 2", Some(3)).is_err());
        assert!(parse_jet("0", Some(1)).unwrap().is_zero());
    }
}
