//! ℂ-structure for real systems whose leading non-scalar matrix has a
//! single pair of conjugate eigenvalues.

use alloc::format;

use super::{level, level_order, unipotent};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::{c_completion, is_c_matrix, quad_disc, real_canonical_form};
use crate::matrix::Matrix;
use crate::system::{PolyMatrix, SystemJet};

/// Returns `(T₀, P, B)` with `B = Ψ_{T₀P}[A]` and every level up to `mu`
/// of `x^{q+1}B` a ℂ-matrix.
pub fn propagate_c_structure(a: &SystemJet, mu: i64) -> Result<(Matrix, PolyMatrix, SystemJet)> {
    let inv = a.invariants()?;
    if inv.k >= inv.q {
        return Err(Error::Precondition("ℂ-structure needs k < q".into()));
    }
    let n = a.dim();
    let ak = level(a, inv.q, inv.k);
    let cp = ak.charpoly();
    let sq = cp.squarefree_decomposition();
    let pair = n % 2 == 0
        && sq.len() == 1
        && sq[0].0.deg() == 2
        && sq[0].0.coeffs().iter().all(|c| c.is_real())
        && quad_disc(&sq[0].0).sign().map_or(false, |s| s < 0);
    if !pair {
        return Err(Error::WrongSpectrum(format!("leading matrix spectrum {}", cp)));
    }
    if level_order(a, inv.q) < mu {
        return Err(Error::InsufficientPrecision { required: mu, available: level_order(a, inv.q) });
    }
    let field = a.field_over(&crate::field::Field::RATIONALS)?;
    let m = n / 2;
    let scalar_pair = (0..m).all(|u| {
        (0..m).all(|v| {
            let b = ak.block(2 * u, 2 * u + 2, 2 * v, 2 * v + 2);
            if u == v {
                is_c_matrix(&b) && b == ak.block(0, 2, 0, 2)
            } else {
                b.is_zero()
            }
        })
    }) && !ak[(1, 0)].is_zero();
    let t0 = if scalar_pair {
        Matrix::identity(n)
    } else {
        real_canonical_form(&ak, &field)?.conjugator
    };
    let mut cur = a.gauge_regular(&PolyMatrix::constant(t0.clone()))?;
    let form = level(&cur, inv.q, inv.k);
    let lam = form.block(0, 2, 0, 2);
    let eps = |u: usize| -> Scalar {
        if u + 1 < m {
            form[(2 * u, 2 * u + 2)].clone()
        } else {
            Scalar::zero()
        }
    };
    let deg = (mu - inv.k).max(0) as usize;
    let keep = (level_order(a, inv.q) - inv.k).max(0) as usize;
    let mut p = PolyMatrix::identity(n);
    for step in 1..=deg {
        let r = level(&cur, inv.q, inv.k + step as i64);
        let mut x = Matrix::zeros(n, n);
        for v in 0..m {
            for u in (0..m).rev() {
                let mut s = r.block(2 * u, 2 * u + 2, 2 * v, 2 * v + 2);
                if u + 1 < m {
                    s = s.add(&x.block(2 * u + 2, 2 * u + 4, 2 * v, 2 * v + 2).scale(&eps(u)));
                }
                if v > 0 {
                    s = s.sub(&x.block(2 * u, 2 * u + 2, 2 * v - 2, 2 * v).scale(&eps(v - 1)));
                }
                x.set_block(2 * u, 2 * v, &c_completion(&lam, &s)?);
            }
        }
        if x.is_zero() {
            continue;
        }
        let g = unipotent(step, &x);
        cur = cur.gauge_regular(&g)?;
        p = p.mul(&g).truncate(keep);
    }
    Ok((t0, p, cur))
}
