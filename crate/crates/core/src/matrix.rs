//! Dense matrices over the field tower.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::field::{Field, Poly, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &Scalar::one())
    }

    pub fn scalar(n: usize, c: &Scalar) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<Scalar> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged rows");
        Matrix { rows: r, cols: c, data }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect()).collect())
    }

    pub fn diagonal(d: &[Scalar]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { Scalar::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn from_cols(cols: &[Vec<Scalar>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    /// `Some(c)` if the matrix equals `c*I`.
    pub fn as_scalar(&self) -> Option<Scalar> {
        if !self.is_square() {
            return None;
        }
        let c = if self.rows == 0 { Scalar::zero() } else { self[(0, 0)].clone() };
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { &c } else { &Scalar::zero() };
                if &self[(i, j)] != want {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn diag(&self) -> Vec<Scalar> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn lies_in(&self, field: &Field) -> bool {
        self.data.iter().all(|c| field.contains(c))
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|c| c.is_real())
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch in add");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch in sub");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Matrix {
        self.map(|c| -c)
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        if c.is_one() {
            return self.clone();
        }
        self.map(|a| a * c)
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "shape mismatch in mul");
        if self.rows * self.cols * o.cols >= 8 {
            if let Some(m) = fraction_free::mul(self, o) {
                return m;
            }
        }
        self.mul_naive(o)
    }

    /// `Σ c·A·B`; every product must have the same shape.
    pub fn sum_of_products(terms: &[(i64, &Matrix, &Matrix)]) -> Matrix {
        assert!(!terms.is_empty(), "empty sum of products");
        for (_, a, b) in terms {
            assert_eq!(a.cols, b.rows, "shape mismatch in mul");
            assert_eq!((a.rows, b.cols), (terms[0].1.rows, terms[0].2.cols), "shape mismatch in sum");
        }
        if let Some(m) = fraction_free::sum(terms) {
            return m;
        }
        let mut out = Matrix::zeros(terms[0].1.rows, terms[0].2.cols);
        for &(c, a, b) in terms {
            out = out.add(&a.mul_naive(b).scale(&Scalar::from_int(c)));
        }
        out
    }

    fn mul_naive(&self, o: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> Matrix {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn commutator(&self, o: &Matrix) -> Matrix {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    /// Selects rows and columns by index.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn block_diag(blocks: &[Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Permutation matrix `P` with `P e_j = e_{perm[j]}`.
    pub fn permutation(perm: &[usize]) -> Matrix {
        let n = perm.len();
        let mut p = Matrix::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            p[(i, j)] = Scalar::one();
        }
        p
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            &self[(i / o.rows, j / o.cols)] * &o[(i % o.rows, j % o.cols)]
        })
    }

    // reduced row echelon form in place; returns pivot columns
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self[(r, c)].inv();
            for j in c..self.cols {
                let v = &self[(r, j)] * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if self[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &self[(i, j)] - &(&f * &self[(r, j)]);
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place();
        (m, p)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column in increasing order.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&r[(row, free)];
            }
            out.push(v);
        }
        out
    }

    /// Solves `self * X = b`; fails if inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        assert_eq!(self.rows, b.rows, "shape mismatch in solve");
        let mut aug = Matrix::zeros(self.rows, self.cols + b.cols);
        aug.set_block(0, 0, self);
        aug.set_block(0, self.cols, b);
        let pivots = aug.rref_in_place();
        if pivots.iter().any(|&c| c >= self.cols) {
            return Err(Error::Precondition(format!("inconsistent linear system")));
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(pc, j)] = aug[(row, self.cols + j)].clone();
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("inverse of {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Matrix::identity(n));
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularGauge);
        }
        Ok(aug.block(0, n, n, 2 * n))
    }

    pub fn det(&self) -> Scalar {
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return Scalar::zero() };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = &det * &piv;
            let inv = piv.inv();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] * &inv;
                for j in c..n {
                    let v = &m[(i, j)] - &(&f * &m[(c, j)]);
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    /// Characteristic polynomial `det(x I - M)` by the Faddeev-LeVerrier recursion.
    pub fn charpoly(&self) -> Poly {
        let n = self.rows;
        let mut coeffs = vec![Scalar::zero(); n + 1];
        coeffs[n] = Scalar::one();
        let mut mk = Matrix::zeros(n, n);
        for k in 1..=n {
            mk = self.mul(&mk).add(&Matrix::scalar(n, &coeffs[n + 1 - k]));
            let tr = self.mul(&mk).trace();
            coeffs[n - k] = -&(&tr * &Scalar::from_ratio(1, k as i64));
        }
        Poly::new(coeffs)
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            t += &self[(i, i)];
        }
        t
    }

    /// `p(M)` by Horner's rule.
    pub fn eval_poly(&self, p: &Poly) -> Matrix {
        let n = self.rows;
        let mut acc = Matrix::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Matrix::scalar(n, c));
        }
        acc
    }

    /// Field generated over `base` by the entries.
    pub fn field_over(&self, base: &Field) -> Result<Field> {
        let mut f = *base;
        for c in &self.data {
            f = f.with_scalar(c)?;
        }
        Ok(f)
    }

    /// Deterministic total order on representations.
    pub fn canonical_cmp(&self, o: &Matrix) -> core::cmp::Ordering {
        (self.rows, self.cols).cmp(&(o.rows, o.cols)).then_with(|| {
            for (a, b) in self.data.iter().zip(&o.data) {
                let c = a.canonical_cmp(b);
                if c != core::cmp::Ordering::Equal {
                    return c;
                }
            }
            core::cmp::Ordering::Equal
        })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tower_entry() -> impl Strategy<Value = Scalar> {
        (-9i64..9, 1i64..5, -3i64..3, -3i64..3, -2i64..2, prop::bool::ANY).prop_map(|(a, b, c, e, f, sq)| {
            let r = |p: i64| crate::field::Rational::new(p.into(), b.into());
            let (s, is) = if sq { (r(c), r(f)) } else { (r(0), r(0)) };
            Scalar::new(r(a), s, r(e), is, if sq { 7 } else { 0 })
        })
    }

    proptest! {
        #[test]
        fn fraction_free_product_matches(
            a in prop::collection::vec(tower_entry(), 12),
            b in prop::collection::vec(tower_entry(), 12),
        ) {
            let a = Matrix { rows: 3, cols: 4, data: a };
            let b = Matrix { rows: 4, cols: 3, data: b };
            prop_assert_eq!(a.mul(&b), a.mul_naive(&b));
            let s = Matrix::sum_of_products(&[(2, &a, &b), (-3, &a, &b)]);
            prop_assert_eq!(s, a.mul_naive(&b).neg());
        }
    }

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_ints(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.det(), Scalar::one());
        assert_eq!(m.mul(&m.inverse().unwrap()), Matrix::identity(2));
        assert_eq!(Matrix::from_ints(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::SingularGauge));
    }

    #[test]
    fn charpoly_companion() {
        // companion of x^3 - 2x + 5
        let m = Matrix::from_ints(&[&[0, 0, -5], &[1, 0, 2], &[0, 1, 0]]);
        assert_eq!(m.charpoly(), Poly::from_ints(&[5, -2, 0, 1]));
        assert!(m.eval_poly(&m.charpoly()).is_zero());
    }

    #[test]
    fn nullspace_basis() {
        let m = Matrix::from_ints(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            let col = Matrix::from_cols(&[v]);
            assert!(m.mul(&col).is_zero());
        }
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-4i64..5, n * n)
            .prop_map(move |v| Matrix::from_fn(n, n, |i, j| Scalar::from_int(v[i * n + j])))
    }

    proptest! {
        #[test]
        fn cayley_hamilton(m in arb_matrix(3)) {
            prop_assert!(m.eval_poly(&m.charpoly()).is_zero());
            prop_assert_eq!(m.charpoly().coeff(0), if m.det().is_zero() { Scalar::zero() } else { -m.det() });
        }

        #[test]
        fn solve_consistent(m in arb_matrix(3), x in arb_matrix(3)) {
            let b = m.mul(&x);
            let y = m.solve(&b).unwrap();
            prop_assert_eq!(m.mul(&y), b);
        }

        #[test]
        fn det_multiplicative(a in arb_matrix(3), b in arb_matrix(3)) {
            prop_assert_eq!(a.mul(&b).det(), &a.det() * &b.det());
        }
    }
}

/// Products over a shared denominator, normalizing each entry once.
mod fraction_free {
    use alloc::vec;
    use alloc::vec::Vec;

    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Zero};

    use super::Matrix;
    use crate::field::{Rational, Scalar};

    /// Integer numerators over one denominator, row-major.
    struct IntMat {
        den: BigInt,
        num: Vec<BigInt>,
    }

    fn split(m: &Matrix, part: fn(&Scalar) -> &Rational) -> Option<IntMat> {
        let mut den = BigInt::one();
        let mut any = false;
        for x in &m.data {
            let r = part(x);
            if !r.is_zero() {
                any = true;
                den = den.lcm(r.denom());
            }
        }
        if !any {
            return None;
        }
        let num = m
            .data
            .iter()
            .map(|x| {
                let r = part(x);
                if r.is_zero() {
                    BigInt::zero()
                } else {
                    r.numer() * (&den / r.denom())
                }
            })
            .collect();
        Some(IntMat { den, num })
    }

    fn product(a: &IntMat, b: &IntMat, rows: usize, inner: usize, cols: usize) -> IntMat {
        let mut num = vec![BigInt::zero(); rows * cols];
        for i in 0..rows {
            for k in 0..inner {
                let x = &a.num[i * inner + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..cols {
                    let y = &b.num[k * cols + j];
                    if !y.is_zero() {
                        num[i * cols + j] += x * y;
                    }
                }
            }
        }
        IntMat { den: &a.den * &b.den, num }
    }

    fn accumulate(acc: &mut Option<IntMat>, p: IntMat, c: i64) {
        let Some(a) = acc else {
            let num = if c == 1 { p.num } else { p.num.into_iter().map(|v| v * c).collect() };
            *acc = Some(IntMat { den: p.den, num });
            return;
        };
        let l = a.den.lcm(&p.den);
        let fa = &l / &a.den;
        let fp = (&l / &p.den) * c;
        for (x, y) in a.num.iter_mut().zip(p.num) {
            if !fa.is_one() {
                *x *= &fa;
            }
            *x += y * &fp;
        }
        a.den = l;
    }

    fn radicand(a: &Matrix, b: &Matrix) -> Option<i64> {
        let mut d = 0;
        for x in a.data.iter().chain(&b.data) {
            match (d, x.radicand()) {
                (_, 0) => {}
                (0, e) => d = e,
                (p, e) if p == e => {}
                _ => return None,
            }
        }
        Some(d)
    }

    pub(super) fn mul(a: &Matrix, b: &Matrix) -> Option<Matrix> {
        sum(&[(1, a, b)])
    }

    /// `Σ c·A·B` over terms of matching shapes.
    pub(super) fn sum(terms: &[(i64, &Matrix, &Matrix)]) -> Option<Matrix> {
        let mut d = 0;
        for (_, a, b) in terms {
            match (d, radicand(a, b)?) {
                (_, 0) => {}
                (0, e) => d = e,
                (p, e) if p == e => {}
                _ => return None,
            }
        }
        let parts: [fn(&Scalar) -> &Rational; 4] = [Scalar::re, Scalar::re_sqrt, Scalar::im, Scalar::im_sqrt];
        let (rows, cols) = (terms[0].1.rows, terms[0].2.cols);
        // component index = 2*imaginary + sqrt
        let mut out: [Option<IntMat>; 4] = [None, None, None, None];
        for &(w, a, b) in terms {
            if w == 0 {
                continue;
            }
            let pa: Vec<Option<IntMat>> = parts.iter().map(|f| split(a, *f)).collect();
            let pb: Vec<Option<IntMat>> = parts.iter().map(|f| split(b, *f)).collect();
            for (s, x) in pa.iter().enumerate() {
                let Some(x) = x else { continue };
                for (t, y) in pb.iter().enumerate() {
                    let Some(y) = y else { continue };
                    let (si, ss, ti, ts) = (s >> 1, s & 1, t >> 1, t & 1);
                    let mut c = w;
                    if ss == 1 && ts == 1 {
                        c *= d;
                    }
                    if si == 1 && ti == 1 {
                        c = -c;
                    }
                    let target = ((si ^ ti) << 1) | (ss ^ ts);
                    accumulate(&mut out[target], product(x, y, rows, a.cols, cols), c);
                }
            }
        }
        let mut comps: Vec<Vec<Rational>> = out
            .into_iter()
            .map(|m| match m {
                None => vec![Rational::zero(); rows * cols],
                Some(m) => m.num.into_iter().map(|v| Rational::new(v, m.den.clone())).collect(),
            })
            .collect();
        let im_s = comps.pop().unwrap();
        let im = comps.pop().unwrap();
        let re_s = comps.pop().unwrap();
        let re = comps.pop().unwrap();
        let data = re
            .into_iter()
            .zip(re_s)
            .zip(im.into_iter().zip(im_s))
            .map(|((r, rs), (i, is))| {
                let dd = if rs.is_zero() && is.is_zero() { 0 } else { d };
                Scalar::new(r, rs, i, is, dd)
            })
            .collect();
        Some(Matrix { rows, cols, data })
    }
}
