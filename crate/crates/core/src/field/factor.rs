use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::zassenhaus::factor_squarefree_z;
use super::{ints_from, max_factor_degree, sqrt_in, Field, Poly, Rational, Scalar};
use crate::error::{Error, Result};

/// Factors a nonzero polynomial into monic irreducibles over `field`.
///
/// Returns `(factor, multiplicity)` pairs in canonical order; the product of
/// the factors raised to their multiplicities equals the monic associate of `p`.
pub fn factor_poly(p: &Poly, field: &Field) -> Result<Vec<(Poly, usize)>> {
    if p.is_zero() {
        return Err(Error::Precondition(format!("cannot factor the zero polynomial")));
    }
    for c in p.coeffs() {
        if !field.contains(c) {
            return Err(Error::IncompatibleFields);
        }
    }
    let cap = match field.degree() {
        1 => max_factor_degree(),
        2 => max_factor_degree() / 2,
        _ => max_factor_degree() / 4,
    }
    .max(2);
    if p.deg() > cap {
        return Err(Error::DegreeCapExceeded { degree: p.deg(), cap });
    }
    let mut out = Vec::new();
    for (part, mult) in p.squarefree_decomposition() {
        for f in factor_squarefree(&part, field)? {
            out.push((f, mult));
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(out)
}

pub fn is_irreducible(p: &Poly, field: &Field) -> Result<bool> {
    let f = factor_poly(p, field)?;
    Ok(f.len() == 1 && f[0].1 == 1)
}

fn factor_squarefree(f: &Poly, field: &Field) -> Result<Vec<Poly>> {
    let f = f.monic();
    match f.deg() {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![f]),
        2 => {
            let b = f.coeff(1);
            let c = f.coeff(0);
            let disc = &(&b * &b) - &(&Scalar::from_int(4) * &c);
            return Ok(match sqrt_in(&disc, field) {
                None => vec![f],
                Some(r) => {
                    let half = Scalar::from_ratio(1, 2);
                    let r1 = &(&(-&b) + &r) * &half;
                    let r2 = &(&(-&b) - &r) * &half;
                    vec![Poly::linear(&r1), Poly::linear(&r2)]
                }
            });
        }
        _ => {}
    }
    if field.degree() == 1 {
        return Ok(factor_rational(&f));
    }
    trager(&f, field)
}

fn factor_rational(f: &Poly) -> Vec<Poly> {
    let rats: Vec<Rational> = f.coeffs().iter().map(|c| c.re().clone()).collect();
    let ints = ints_from(&rats);
    let g = super::content_of(&ints);
    let prim: Vec<BigInt> = ints.iter().map(|c| c / &g).collect();
    factor_squarefree_z(&prim)
        .into_iter()
        .map(|h| Poly::new(h.into_iter().map(|c| Scalar::from_rational(Rational::from_integer(c))).collect()).monic())
        .collect()
}

// norm-based factorization over K(beta), beta^2 in K
fn trager(f: &Poly, field: &Field) -> Result<Vec<Poly>> {
    let (beta, base, conj): (Scalar, Field, fn(&Scalar) -> Scalar) = if field.is_complex() {
        (Scalar::i(), field.real_part(), Scalar::conj)
    } else {
        let d = field.radicand().ok_or(Error::IncompatibleFields)?;
        (Scalar::sqrt_of(d), Field::RATIONALS, Scalar::sqrt_conj)
    };
    for s in 0..64i64 {
        let shift = &Scalar::from_int(-s) * &beta;
        let g = f.shift(&shift);
        let norm = g.mul(&g.map(conj));
        if !norm.is_squarefree() {
            continue;
        }
        let mut out = Vec::new();
        for h in factor_squarefree(&norm, &base)? {
            let piece = h.gcd(&g);
            if piece.deg() > 0 {
                out.push(piece.shift(&(&Scalar::from_int(s) * &beta)));
            }
        }
        return Ok(out);
    }
    Err(Error::UnsupportedTower(format!("no squarefree norm found for {}", f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(fs: &[(Poly, usize)]) -> Poly {
        fs.iter().fold(Poly::one(), |acc, (f, m)| acc.mul(&f.pow(*m)))
    }

    #[test]
    fn cubic_over_q() {
        let f = Poly::from_ints(&[0, -1, 0, 1]);
        let fs = factor_poly(&f, &Field::RATIONALS).unwrap();
        assert_eq!(fs.len(), 3);
        assert!(fs.iter().all(|(g, m)| g.deg() == 1 && *m == 1));
        assert_eq!(product(&fs), f);
    }

    #[test]
    fn x2_plus_1_over_q() {
        let f = Poly::from_ints(&[1, 0, 1]);
        assert_eq!(factor_poly(&f, &Field::RATIONALS).unwrap(), vec![(f, 1)]);
    }

    #[test]
    fn x4_minus_1_over_gaussian() {
        let f = Poly::from_ints(&[-1, 0, 0, 0, 1]);
        let fs = factor_poly(&f, &Field::GAUSSIAN).unwrap();
        assert_eq!(fs.len(), 4);
        for (g, _) in &fs {
            let root = -g.coeff(0);
            assert!(f.eval(&root).is_zero());
        }
        assert_eq!(product(&fs), f);
    }

    #[test]
    fn quartic_over_sqrt2() {
        // (x^2 - 2)(x^2 + x + 1)(x - 3) over Q(sqrt 2)
        let f = Poly::from_ints(&[-2, 0, 1]).mul(&Poly::from_ints(&[1, 1, 1])).mul(&Poly::from_ints(&[-3, 1]));
        let field = Field::real_quadratic(2).unwrap();
        let fs = factor_poly(&f, &field).unwrap();
        assert_eq!(fs.len(), 4);
        assert_eq!(product(&fs), f);
    }

    #[test]
    fn cubic_over_biquadratic_tower() {
        // (x^2 + 2)(x - sqrt 2) over Q(sqrt 2)(i)
        let field = Field::new(Some(2), true).unwrap();
        let f = Poly::from_ints(&[2, 0, 1]).mul(&Poly::linear(&Scalar::sqrt_of(2)));
        let fs = factor_poly(&f, &field).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(product(&fs), f);
    }

    #[test]
    fn irreducible_cubic_over_gaussian() {
        let f = Poly::from_ints(&[-2, 0, 0, 1]);
        assert!(is_irreducible(&f, &Field::GAUSSIAN).unwrap());
        let f = Poly::from_ints(&[1, 0, 0, 0, 1]);
        // x^4 + 1 = (x^2 - i)(x^2 + i) over Q(i)
        assert_eq!(factor_poly(&f, &Field::GAUSSIAN).unwrap().len(), 2);
    }

    #[test]
    fn repeated_factors() {
        let f = Poly::from_ints(&[-1, 1]).pow(3).mul(&Poly::from_ints(&[1, 0, 1]));
        let fs = factor_poly(&f, &Field::RATIONALS).unwrap();
        assert_eq!(product(&fs), f);
        assert!(fs.contains(&(Poly::from_ints(&[-1, 1]), 3)));
    }

    #[test]
    fn cap_enforced() {
        let mut v = vec![0i64; 18];
        v[0] = 1;
        v[17] = 1;
        assert!(matches!(factor_poly(&Poly::from_ints(&v), &Field::RATIONALS), Err(Error::DegreeCapExceeded { .. })));
    }
}
