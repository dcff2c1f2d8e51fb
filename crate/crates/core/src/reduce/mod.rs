//! Reduction pipelines: degree-zero normal forms, tail elimination,
//! deresonation and the assembled formal normal form, over an
//! algebraically closed tower (`Mode::Complex`) or a real one
//! (`Mode::Real`).

mod normal;
mod rank0;
mod real;
mod tail;

use alloc::vec;
use alloc::vec::Vec;

use crate::field::Field;
use crate::matrix::Matrix;
use crate::system::{PolyMatrix, SystemJet};

pub use normal::{formal_normal_form, normal_form, real_layout, FormalNormalForm, NormalForm, Unit};
pub use rank0::{
    rtrs_rank0, shear, shearing_order, specialize_coefficients, splitting_lemma, trs_rank0, Rank0, ShearWitness,
    ShearingOrder,
};
pub use real::propagate_c_structure;
pub use tail::{deresonate, eliminate_tail, Deresonation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Complex,
    Real,
}

/// Lexicographic termination measure `(γ_1, …, γ_n, q − k)`.
pub type Measure = Vec<usize>;

/// Working state shared by the recursive reductions.
#[derive(Clone, Debug)]
pub(crate) struct Reducer {
    pub mode: Mode,
    pub field: Field,
    /// One entry per single-eigenvalue loop: the measure at each iteration.
    pub loops: Vec<Vec<Measure>>,
}

impl Reducer {
    pub fn new(mode: Mode, field: Field) -> Self {
        Reducer { mode, field, loops: Vec::new() }
    }
}

/// Coefficient of `x^l` in `x^{q+1} A`.
pub(crate) fn level(a: &SystemJet, q: i64, l: i64) -> Matrix {
    a.normalized(q, l)
}

/// Guaranteed order counted in levels of `x^{q+1} A`.
pub(crate) fn level_order(a: &SystemJet, q: i64) -> i64 {
    a.order() + q + 1
}

/// `I + x^m X`
pub(crate) fn unipotent(m: usize, x: &Matrix) -> PolyMatrix {
    let n = x.rows();
    let mut coeffs = vec![Matrix::zeros(n, n); m + 1];
    coeffs[0] = Matrix::identity(n);
    coeffs[m] = coeffs[m].add(x);
    PolyMatrix::new(n, coeffs)
}

/// Writes `sub` into the rows and columns `idx` of `target`.
pub(crate) fn scatter(target: &mut Matrix, idx_r: &[usize], idx_c: &[usize], sub: &Matrix) {
    for (a, &i) in idx_r.iter().enumerate() {
        for (b, &j) in idx_c.iter().enumerate() {
            target[(i, j)] = sub[(a, b)].clone();
        }
    }
}

/// The gauge that acts as `p` on the indices `idx` and as the identity elsewhere.
pub(crate) fn embed_poly(n: usize, idx: &[usize], p: &PolyMatrix) -> PolyMatrix {
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(d, c)| {
            let mut m = if d == 0 { Matrix::identity(n) } else { Matrix::zeros(n, n) };
            scatter(&mut m, idx, idx, c);
            m
        })
        .collect();
    PolyMatrix::new(n, coeffs)
}
