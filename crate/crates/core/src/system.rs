//! Truncated meromorphic systems `Y' = A(x) Y` and the transformations acting on them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::jet::LaurentJet;
use crate::matrix::Matrix;

/// `A = sum_{e = low}^{order} A^{(e)} x^e`, exact up to and including `x^order`.
///
/// The coefficient at `low` is nonzero unless the system is zero, in which case
/// no coefficients are stored and `low = order + 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SystemJet {
    n: usize,
    low: i64,
    coeffs: Vec<Matrix>,
    order: i64,
}

/// `nu`, Poincare rank `q`, radiality index `k` and the determinacy order `n(q-k)+k`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct SystemInvariants {
    pub n: usize,
    pub nu: i64,
    pub q: i64,
    pub k: i64,
    pub determinacy: i64,
}

impl SystemInvariants {
    /// `N(n, q, k) = n(q - k) + k`
    pub fn determinacy_order(n: usize, q: i64, k: i64) -> i64 {
        n as i64 * (q - k) + k
    }
}

impl SystemJet {
    /// Builds a system from coefficients starting at `x^low`; coefficients past
    /// `order` are dropped and missing ones are zero.
    pub fn new(n: usize, low: i64, coeffs: Vec<Matrix>, order: i64) -> Self {
        for c in &coeffs {
            assert_eq!((c.rows(), c.cols()), (n, n), "coefficient shape");
        }
        let mut s = SystemJet { n, low, coeffs, order };
        s.normalize();
        s
    }

    pub fn zero(n: usize, order: i64) -> Self {
        SystemJet { n, low: order + 1, coeffs: Vec::new(), order }
    }

    /// `x^e * M`, exact to the given order.
    pub fn monomial(m: Matrix, e: i64, order: i64) -> Self {
        Self::new(m.rows(), e, vec![m], order)
    }

    fn normalize(&mut self) {
        let len = (self.order - self.low + 1).max(0) as usize;
        self.coeffs.truncate(len);
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            None => {
                self.coeffs.clear();
                self.low = self.order + 1;
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.low += k as i64;
                while self.coeffs.len() < (self.order - self.low + 1) as usize {
                    self.coeffs.push(Matrix::zeros(self.n, self.n));
                }
            }
        }
    }

    pub fn from_entries(entries: &[Vec<LaurentJet>]) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("entry table is not square")));
        }
        if n == 0 {
            return Err(Error::Dimension(format!("empty system")));
        }
        let order = entries.iter().flatten().map(|e| e.order()).min().unwrap();
        let low = entries.iter().flatten().filter_map(|e| e.valuation()).min().unwrap_or(order + 1).min(order + 1);
        let len = (order - low + 1).max(0) as usize;
        let coeffs = (0..len as i64)
            .map(|t| Matrix::from_fn(n, n, |i, j| entries[i][j].coeff_unchecked(low + t)))
            .collect();
        Ok(Self::new(n, low, coeffs, order))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.low)
        }
    }

    /// Absolute guaranteed order.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Guaranteed order relative to `x^nu`.
    pub fn relative_order(&self) -> Option<i64> {
        self.valuation().map(|v| self.order - v)
    }

    /// Coefficient of `x^e`; zero outside the stored range.
    pub fn at(&self, e: i64) -> Matrix {
        if e < self.low || e > self.order {
            return Matrix::zeros(self.n, self.n);
        }
        self.coeffs[(e - self.low) as usize].clone()
    }

    pub(crate) fn at_ref(&self, e: i64) -> Option<&Matrix> {
        if e < self.low || e > self.order {
            None
        } else {
            Some(&self.coeffs[(e - self.low) as usize])
        }
    }

    pub fn at_checked(&self, e: i64) -> Result<Matrix> {
        if e > self.order {
            return Err(Error::InsufficientPrecision { required: e, available: self.order });
        }
        Ok(self.at(e))
    }

    /// `A_j` in `A = x^nu (A_0 + A_1 x + ...)`.
    pub fn coeff(&self, j: i64) -> Result<Matrix> {
        let nu = self.valuation().ok_or(Error::ZeroSystem)?;
        self.at_checked(nu + j)
    }

    /// Coefficient of `x^j` in `x^{q+1} A`.
    pub fn normalized(&self, q: i64, j: i64) -> Matrix {
        self.at(j - q - 1)
    }

    pub fn entry(&self, i: usize, j: usize) -> LaurentJet {
        LaurentJet::new(self.low, self.coeffs.iter().map(|m| m[(i, j)].clone()).collect(), self.order)
    }

    pub fn entries(&self) -> Vec<Vec<LaurentJet>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.entry(i, j)).collect()).collect()
    }

    pub fn invariants(&self) -> Result<SystemInvariants> {
        let nu = self.valuation().ok_or(Error::ZeroSystem)?;
        let q = (-nu - 1).max(0);
        let mut k = q;
        for j in 0..q {
            let e = nu + j;
            if e > self.order {
                return Err(Error::InsufficientPrecision { required: e - nu, available: self.order - nu });
            }
            if self.at(e).as_scalar().is_none() {
                k = j;
                break;
            }
        }
        Ok(SystemInvariants { n: self.n, nu, q, k, determinacy: SystemInvariants::determinacy_order(self.n, q, k) })
    }

    /// Poincare rank, or `None` for the zero system.
    pub fn poincare_rank(&self) -> Option<i64> {
        self.valuation().map(|nu| (-nu - 1).max(0))
    }

    /// `J_N A`: keeps `A_0, ..., A_N` relative to the valuation.
    pub fn truncate(&self, n_rel: i64) -> Result<SystemJet> {
        let nu = self.valuation().ok_or(Error::ZeroSystem)?;
        self.truncate_abs(nu + n_rel)
    }

    pub fn truncate_abs(&self, order: i64) -> Result<SystemJet> {
        if order > self.order {
            return Err(Error::InsufficientPrecision { required: order, available: self.order });
        }
        Ok(SystemJet::new(self.n, self.low, self.coeffs.clone(), order))
    }

    /// Lowers the order if `order` is below the current one.
    pub fn cap_order(&self, order: i64) -> SystemJet {
        if order >= self.order {
            self.clone()
        } else {
            SystemJet::new(self.n, self.low, self.coeffs.clone(), order)
        }
    }

    pub fn add(&self, o: &SystemJet) -> SystemJet {
        let order = self.order.min(o.order);
        let low = self.low.min(o.low).min(order + 1);
        let coeffs = (low..=order).map(|e| self.at(e).add(&o.at(e))).collect();
        SystemJet::new(self.n, low, coeffs, order)
    }

    pub fn sub(&self, o: &SystemJet) -> SystemJet {
        self.add(&o.map(|m| m.neg()))
    }

    pub fn map(&self, f: impl Fn(&Matrix) -> Matrix) -> SystemJet {
        let coeffs: Vec<Matrix> = self.coeffs.iter().map(f).collect();
        let n = coeffs.first().map_or(self.n, |m| m.rows());
        SystemJet::new(n, self.low, coeffs, self.order)
    }

    /// Coefficientwise map into systems of dimension `n`.
    pub fn try_map(&self, n: usize, f: impl FnMut(&Matrix) -> Result<Matrix>) -> Result<SystemJet> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<Vec<Matrix>>>()?;
        Ok(SystemJet::new(n, self.low, coeffs, self.order))
    }

    /// Equality up to the smaller guaranteed order.
    pub fn agrees_with(&self, o: &SystemJet) -> bool {
        self.first_difference(o).is_none()
    }

    /// First `(exponent, row, col)` where the two jets differ within their common order.
    pub fn first_difference(&self, o: &SystemJet) -> Option<(i64, usize, usize)> {
        let order = self.order.min(o.order);
        let low = self.low.min(o.low);
        for e in low..=order {
            let a = self.at(e);
            let b = o.at(e);
            for i in 0..self.n {
                for j in 0..self.n {
                    if a[(i, j)] != b[(i, j)] {
                        return Some((e, i, j));
                    }
                }
            }
        }
        None
    }

    /// Principal sub-system on the index range `r0..r1`.
    pub fn block(&self, r0: usize, r1: usize) -> SystemJet {
        SystemJet::new(r1 - r0, self.low, self.coeffs.iter().map(|m| m.block(r0, r1, r0, r1)).collect(), self.order)
    }

    pub fn select(&self, idx: &[usize]) -> SystemJet {
        SystemJet::new(idx.len(), self.low, self.coeffs.iter().map(|m| m.select(idx, idx)).collect(), self.order)
    }

    pub fn block_diag(blocks: &[SystemJet]) -> SystemJet {
        let n = blocks.iter().map(|b| b.n).sum();
        let order = blocks.iter().map(|b| b.order).min().unwrap_or(0);
        let low = blocks.iter().map(|b| b.low).min().unwrap_or(order + 1).min(order + 1);
        let coeffs = (low..=order).map(|e| Matrix::block_diag(&blocks.iter().map(|b| b.at(e)).collect::<Vec<_>>())).collect();
        SystemJet::new(n, low, coeffs, order)
    }

    pub fn lies_in(&self, field: &Field) -> bool {
        self.coeffs.iter().all(|m| m.lies_in(field))
    }

    pub fn field_over(&self, base: &Field) -> Result<Field> {
        let mut f = *base;
        for m in &self.coeffs {
            f = m.field_over(&f)?;
        }
        Ok(f)
    }

    /// `Psi_P[A] = P^{-1} A P - P^{-1} P'` for a polynomial `P` with `P(0)` invertible.
    ///
    /// The absolute guaranteed order is preserved.
    pub fn gauge_regular(&self, p: &PolyMatrix) -> Result<SystemJet> {
        let n = self.n;
        if p.dim() != n {
            return Err(Error::Dimension(format!("gauge of size {} on system of size {}", p.dim(), n)));
        }
        let p0inv = p.coeff(0).inverse()?;
        let w = self.low.min(-1);
        let order = self.order;
        if order < w {
            return Ok(SystemJet::zero(n, order));
        }
        let len = (order - w + 1) as usize;
        let id = Matrix::identity(n);
        let p0_is_one = *p.coeff_ref(0) == id;
        let nz: Vec<usize> = (0..=p.degree()).filter(|&i| !p.coeff_ref(i).is_zero()).collect();
        let mut b: Vec<Matrix> = Vec::with_capacity(len);
        for m in 0..len {
            let e = w + m as i64;
            let mut terms: Vec<(i64, &Matrix, &Matrix)> = Vec::new();
            for &i in nz.iter().take_while(|&&i| i <= m) {
                if let Some(a) = self.at_ref(e - i as i64) {
                    if !a.is_zero() {
                        terms.push((1, a, p.coeff_ref(i)));
                    }
                }
                if i >= 1 && !b[m - i].is_zero() {
                    terms.push((-1, p.coeff_ref(i), &b[m - i]));
                }
            }
            let d = e + 1;
            if d >= 1 && (d as usize) <= p.degree() && !p.coeff_ref(d as usize).is_zero() {
                terms.push((-d, p.coeff_ref(d as usize), &id));
            }
            let rhs = if terms.is_empty() { Matrix::zeros(n, n) } else { Matrix::sum_of_products(&terms) };
            b.push(if p0_is_one { rhs } else { p0inv.mul(&rhs) });
        }
        Ok(SystemJet::new(n, w, b, order))
    }

    /// Gauge by `diag(x^{k_1}, ..., x^{k_n})`: entry `(u, v)` is multiplied by
    /// `x^{k_v - k_u}` and `k_u / x` is subtracted on the diagonal.
    pub fn gauge_monomial(&self, k: &[u32]) -> SystemJet {
        let n = self.n;
        assert_eq!(k.len(), n, "exponent vector length");
        let kmax = k.iter().copied().max().unwrap_or(0) as i64;
        let kmin = k.iter().copied().min().unwrap_or(0) as i64;
        let order = self.order - (kmax - kmin);
        let low = (self.low - (kmax - kmin)).min(-1);
        let mut coeffs = vec![Matrix::zeros(n, n); (order - low + 1).max(0) as usize];
        for (idx, e) in (self.low..=self.order).enumerate() {
            let a = &self.coeffs[idx];
            for u in 0..n {
                for v in 0..n {
                    if a[(u, v)].is_zero() {
                        continue;
                    }
                    let t = e + k[v] as i64 - k[u] as i64;
                    if t <= order {
                        coeffs[(t - low) as usize][(u, v)] = a[(u, v)].clone();
                    }
                }
            }
        }
        if -1 <= order {
            let c = &mut coeffs[(-1 - low) as usize];
            for u in 0..n {
                let val = &c[(u, u)] - &Scalar::from_int(k[u] as i64);
                c[(u, u)] = val;
            }
        }
        SystemJet::new(n, low, coeffs, order)
    }

    /// `R_r[A] = r x^{r-1} A(x^r)`. The order relative to `x^{nu}` scales by `r`.
    pub fn ramify(&self, r: u32) -> SystemJet {
        if r <= 1 {
            return self.clone();
        }
        let ri = r as i64;
        let rs = Scalar::from_int(ri);
        let n = self.n;
        let order = ri * self.order + ri - 1;
        if self.is_zero() {
            return SystemJet::zero(n, order);
        }
        let low = ri * self.low + ri - 1;
        let mut coeffs = vec![Matrix::zeros(n, n); (order - low + 1) as usize];
        for (idx, c) in self.coeffs.iter().enumerate() {
            coeffs[idx * r as usize] = c.scale(&rs);
        }
        SystemJet::new(n, low, coeffs, order)
    }
}

impl fmt::Debug for SystemJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SystemJet(n={}, order={}", self.n, self.order)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, ", x^{}: {}", self.low + i as i64, c)?;
            }
        }
        f.write_str(")")
    }
}

/// A matrix polynomial `P_0 + P_1 x + ... + P_d x^d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    n: usize,
    coeffs: Vec<Matrix>,
}

impl PolyMatrix {
    pub fn new(n: usize, mut coeffs: Vec<Matrix>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |m| m.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Matrix::zeros(n, n));
        }
        PolyMatrix { n, coeffs }
    }

    pub fn constant(m: Matrix) -> Self {
        let n = m.rows();
        Self::new(n, vec![m])
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(Matrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Matrix {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Matrix::zeros(self.n, self.n))
    }

    fn coeff_ref(&self, i: usize) -> &Matrix {
        &self.coeffs[i]
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Matrix::identity(self.n)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn mul(&self, o: &PolyMatrix) -> PolyMatrix {
        let mut out = vec![Matrix::zeros(self.n, self.n); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        PolyMatrix::new(self.n, out)
    }

    pub fn add(&self, o: &PolyMatrix) -> PolyMatrix {
        let len = self.coeffs.len().max(o.coeffs.len());
        PolyMatrix::new(self.n, (0..len).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    /// Keeps terms of degree at most `d`.
    pub fn truncate(&self, d: usize) -> PolyMatrix {
        PolyMatrix::new(self.n, self.coeffs.iter().take(d + 1).cloned().collect())
    }

    pub fn derivative(&self) -> PolyMatrix {
        PolyMatrix::new(
            self.n,
            self.coeffs.iter().enumerate().skip(1).map(|(i, m)| m.scale(&Scalar::from_int(i as i64))).collect(),
        )
    }

    /// `P(x^r)`
    pub fn substitute_power(&self, r: u32) -> PolyMatrix {
        if r <= 1 {
            return self.clone();
        }
        let mut out = vec![Matrix::zeros(self.n, self.n); self.degree() * r as usize + 1];
        for (i, m) in self.coeffs.iter().enumerate() {
            out[i * r as usize] = m.clone();
        }
        PolyMatrix::new(self.n, out)
    }

    pub fn map(&self, f: impl Fn(&Matrix) -> Matrix) -> PolyMatrix {
        let coeffs: Vec<Matrix> = self.coeffs.iter().map(f).collect();
        let n = coeffs[0].rows();
        PolyMatrix::new(n, coeffs)
    }

    /// `I_{before} + P + I_{after}` as a block-diagonal polynomial.
    pub fn embed(&self, before: usize, after: usize) -> PolyMatrix {
        let n = before + self.n + after;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let id = |k: usize| if i == 0 { Matrix::identity(k) } else { Matrix::zeros(k, k) };
                Matrix::block_diag(&[id(before), m.clone(), id(after)])
            })
            .collect();
        PolyMatrix::new(n, coeffs)
    }

    pub fn block_diag(blocks: &[PolyMatrix]) -> PolyMatrix {
        let n = blocks.iter().map(|b| b.n).sum();
        let d = blocks.iter().map(|b| b.degree()).max().unwrap_or(0);
        PolyMatrix::new(n, (0..=d).map(|i| Matrix::block_diag(&blocks.iter().map(|b| b.coeff(i)).collect::<Vec<_>>())).collect())
    }

    /// Exact jet of the polynomial entries as a system-shaped series.
    pub fn as_jet(&self, order: i64) -> SystemJet {
        SystemJet::new(self.n, 0, self.coeffs.clone(), order)
    }

    pub fn lies_in(&self, field: &Field) -> bool {
        self.coeffs.iter().all(|m| m.lies_in(field))
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PolyMatrix(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*x^{}", c, i)?;
        }
        f.write_str(")")
    }
}
