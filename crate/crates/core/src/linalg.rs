//! Exact linear algebra on constant matrices: block splitting, Jordan
//! chains, real canonical forms, Sylvester equations, determinantal
//! divisors, resonance classes and the complex-block embedding.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::field::{factor_poly, Field, Poly, Scalar};
use crate::matrix::Matrix;
use crate::system::{PolyMatrix, SystemJet};

/// Jordan data for a matrix with a single eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanData {
    pub eigenvalue: Scalar,
    /// Block sizes in ascending order.
    pub block_sizes: Vec<usize>,
    pub conjugator: Matrix,
}

impl JordanData {
    /// The Jordan matrix `⊕ (λI + H)` in the stored block order.
    pub fn form(&self) -> Matrix {
        jordan_matrix(&self.eigenvalue, &self.block_sizes)
    }
}

/// Superdiagonal shifting matrix of size `n`.
pub fn shift_matrix(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| if j == i + 1 { Scalar::one() } else { Scalar::zero() })
}

pub fn jordan_matrix(lambda: &Scalar, sizes: &[usize]) -> Matrix {
    let blocks: Vec<Matrix> = sizes
        .iter()
        .map(|&s| Matrix::scalar(s, lambda).add(&shift_matrix(s)))
        .collect();
    Matrix::block_diag(&blocks)
}

fn same_monic(a: &Poly, b: &Poly) -> bool {
    a.monic() == b.monic()
}

fn basis_matrix(n: usize, vecs: &[Vec<Scalar>]) -> Matrix {
    if vecs.is_empty() {
        return Matrix::zeros(n, 0);
    }
    Matrix::from_cols(vecs)
}

/// Splits `m` along a coprime factorization `p1 * p2` of its characteristic
/// polynomial. Returns `(T, M1, M2)` with `T⁻¹ m T = M1 ⊕ M2`.
pub fn coprime_split(m: &Matrix, p1: &Poly, p2: &Poly) -> Result<(Matrix, Matrix, Matrix)> {
    let (t, mut blocks) = split_by_factors(m, &[p1.clone(), p2.clone()])?;
    let m2 = blocks.pop().unwrap_or_else(|| Matrix::zeros(0, 0));
    let m1 = blocks.pop().unwrap_or_else(|| Matrix::zeros(0, 0));
    Ok((t, m1, m2))
}

/// Multiway version of [`coprime_split`]: the parts must be pairwise
/// coprime and multiply to the characteristic polynomial.
pub fn split_by_factors(m: &Matrix, parts: &[Poly]) -> Result<(Matrix, Vec<Matrix>)> {
    let n = m.rows();
    let mut prod = Poly::one();
    for (i, p) in parts.iter().enumerate() {
        if p.deg() == 0 {
            return Err(Error::DegreeMismatch(format!("constant part {}", p)));
        }
        for q in &parts[i + 1..] {
            if p.gcd(q).deg() > 0 {
                return Err(Error::NotCoprime);
            }
        }
        prod = prod.mul(p);
    }
    if !same_monic(&prod, &m.charpoly()) {
        return Err(Error::DegreeMismatch(format!("{} is not the characteristic polynomial", prod)));
    }
    let mut cols = Vec::with_capacity(n);
    let mut sizes = Vec::with_capacity(parts.len());
    for p in parts {
        let k = m.eval_poly(p).nullspace();
        if k.len() != p.deg() {
            return Err(Error::DegreeMismatch(format!("kernel of {} has dimension {}", p, k.len())));
        }
        sizes.push(k.len());
        cols.extend(k);
    }
    let t = basis_matrix(n, &cols);
    let conj = t.inverse()?.mul(m).mul(&t);
    let mut blocks = Vec::with_capacity(parts.len());
    let mut at = 0;
    for s in sizes {
        blocks.push(conj.block(at, at + s, at, at + s));
        at += s;
    }
    Ok((t, blocks))
}

/// Jordan chains for a matrix whose only eigenvalue is `lambda`.
pub fn jordan_single_eigen(m: &Matrix, lambda: &Scalar) -> Result<JordanData> {
    let n = m.rows();
    let expect = Poly::linear(lambda).pow(n);
    if !same_monic(&m.charpoly(), &expect) {
        return Err(Error::SpectrumMismatch(format!("{} is not the only eigenvalue", lambda)));
    }
    let nil = m.sub(&Matrix::scalar(n, lambda));
    let chains = nilpotent_chains(&nil);
    let mut sizes = Vec::new();
    let mut cols = Vec::with_capacity(n);
    for chain in &chains {
        sizes.push(chain.len());
        cols.extend(chain.iter().cloned());
    }
    Ok(JordanData { eigenvalue: lambda.clone(), block_sizes: sizes, conjugator: basis_matrix(n, &cols) })
}

fn apply(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    (0..m.rows())
        .map(|i| {
            let mut s = Scalar::zero();
            for (j, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    s += &(&m[(i, j)] * x);
                }
            }
            s
        })
        .collect()
}

fn independent_of(span: &[Vec<Scalar>], v: &[Scalar], n: usize) -> bool {
    let mut all = span.to_vec();
    all.push(v.to_vec());
    basis_matrix(n, &all).rank() > basis_matrix(n, span).rank()
}

/// Jordan chains of a nilpotent matrix, each ordered from eigenvector to
/// top vector, sorted by ascending length.
fn nilpotent_chains(nil: &Matrix) -> Vec<Vec<Vec<Scalar>>> {
    let n = nil.rows();
    let mut kernels: Vec<Vec<Vec<Scalar>>> = vec![Vec::new()];
    let mut p = Matrix::identity(n);
    loop {
        p = p.mul(nil);
        let k = p.nullspace();
        let done = k.len() == n;
        kernels.push(k);
        if done {
            break;
        }
    }
    let top = kernels.len() - 1;
    let mut chains: Vec<Vec<Vec<Scalar>>> = Vec::new();
    for level in (1..=top).rev() {
        let mut span: Vec<Vec<Scalar>> = kernels[level - 1].clone();
        for c in &chains {
            span.push(c[level - 1].clone());
        }
        let mut reduced = independent_basis(n, &span);
        let mut fresh = Vec::new();
        for v in &kernels[level] {
            if independent_of(&reduced, v, n) {
                reduced.push(v.clone());
                fresh.push(v.clone());
            }
        }
        for v in fresh {
            let mut chain = vec![v];
            for _ in 1..level {
                let next = apply(nil, chain.last().unwrap());
                chain.push(next);
            }
            chain.reverse();
            chains.push(chain);
        }
    }
    chains.sort_by_key(|c| c.len());
    chains
}

fn independent_basis(n: usize, vecs: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let mut out: Vec<Vec<Scalar>> = Vec::new();
    for v in vecs {
        if independent_of(&out, v, n) {
            out.push(v.clone());
        }
    }
    out
}

/// A real canonical form `T⁻¹MT = C1 ⊕ C2` where `C1` has real spectrum
/// and `C2` is the image of a complex matrix under the block embedding.
#[derive(Clone, Debug)]
pub struct RealCanonical {
    pub field: Field,
    pub conjugator: Matrix,
    pub form: Matrix,
    /// Size of the real-spectrum block `C1`.
    pub real_size: usize,
    /// Each conjugate pair: eigenvalue `a + bi` with `b > 0` and the
    /// ascending chain lengths of its complex Jordan form.
    pub pairs: Vec<(Scalar, Vec<usize>)>,
}

impl RealCanonical {
    pub fn c1(&self) -> Matrix {
        self.form.block(0, self.real_size, 0, self.real_size)
    }

    pub fn c2(&self) -> Matrix {
        let n = self.form.rows();
        self.form.block(self.real_size, n, self.real_size, n)
    }
}

pub(crate) fn tower_factors(m: &Matrix, field: &mut Field, real: bool) -> Result<Vec<(Poly, usize)>> {
    for _ in 0..4 {
        let fs = factor_poly(&m.charpoly(), field)?;
        let mut grew = false;
        for (f, _) in &fs {
            match f.deg() {
                1 => {}
                2 => {
                    let disc = quad_disc(f);
                    if real {
                        let s = disc.sign()?;
                        let target = if s > 0 { disc.clone() } else { -&disc };
                        let (nf, _) = field.adjoin_sqrt(&target)?;
                        if nf != *field {
                            *field = nf;
                            grew = true;
                        }
                    } else {
                        let (nf, _) = field.adjoin_sqrt(&disc)?;
                        *field = nf;
                        grew = true;
                    }
                }
                _ => return Err(Error::UnsupportedTower(format!("irreducible factor {} of degree > 2", f))),
            }
        }
        if !grew {
            return Ok(fs);
        }
    }
    Err(Error::UnsupportedTower(format!("spectrum of {:?}", m)))
}

pub(crate) fn quad_disc(f: &Poly) -> Scalar {
    let f = f.monic();
    let b = f.coeff(1);
    let c = f.coeff(0);
    &(&b * &b) - &(&Scalar::from_int(4) * &c)
}

/// Roots of a monic quadratic over a field containing the square root of
/// its discriminant, conjugate root with positive imaginary part first
/// when the discriminant is negative.
pub(crate) fn quad_roots(f: &Poly, field: &Field) -> Result<(Scalar, Scalar)> {
    let f = f.monic();
    let disc = quad_disc(&f);
    let (_, r) = field.adjoin_sqrt(&disc)?;
    let half = Scalar::from_ratio(1, 2);
    let mb = -&f.coeff(1);
    let a = &(&mb + &r) * &half;
    let b = &(&mb - &r) * &half;
    if !a.is_real() && a.imag_part().sign()? < 0 {
        return Ok((b, a));
    }
    Ok((a, b))
}

/// Generalized eigenspace basis of `lambda`, with Jordan chains inside it.
fn eigen_chains(m: &Matrix, lambda: &Scalar, mult: usize) -> Result<(Matrix, Vec<usize>)> {
    let n = m.rows();
    let nil = m.sub(&Matrix::scalar(n, lambda));
    let k = nil.pow(mult).nullspace();
    if k.len() != mult {
        return Err(Error::SpectrumMismatch(format!("generalized eigenspace of {}", lambda)));
    }
    let v = basis_matrix(n, &k);
    let restricted = v.solve(&m.mul(&v))?;
    let jd = jordan_single_eigen(&restricted, lambda)?;
    let mut w = v.mul(&jd.conjugator);
    let mut start = 0;
    for &len in &jd.block_sizes {
        let lead = w.col(start).into_iter().find(|z| !z.is_zero()).expect("nonzero eigenvector");
        let inv = lead.checked_inv()?;
        for j in start..start + len {
            for i in 0..n {
                w[(i, j)] = &w[(i, j)] * &inv;
            }
        }
        start += len;
    }
    Ok((w, jd.block_sizes))
}

/// Real canonical form over a real field, extending it by square roots
/// when needed.
pub fn real_canonical_form(m: &Matrix, field: &Field) -> Result<RealCanonical> {
    if field.is_complex() || !m.is_real() {
        return Err(Error::Precondition("real canonical form needs a real matrix".into()));
    }
    let n = m.rows();
    let mut f = field.join(&m.field_over(&Field::RATIONALS)?)?;
    let fs = tower_factors(m, &mut f, true)?;
    let lead = |v: &Vec<Scalar>| v.iter().position(|z| !z.is_zero()).unwrap_or(n);
    let mut real_groups: Vec<(usize, Vec<Vec<Scalar>>)> = Vec::new();
    let mut pair_groups: Vec<(usize, Vec<Vec<Scalar>>, (Scalar, Vec<usize>))> = Vec::new();
    for (p, mult) in &fs {
        if p.deg() == 1 {
            let k = m.eval_poly(&p.pow(*mult)).nullspace();
            real_groups.push((lead(&k[0]), k));
            continue;
        }
        let (lambda, _) = quad_roots(p, &f.complexify())?;
        let (w, sizes) = eigen_chains(m, &lambda, *mult)?;
        let mut cols = Vec::with_capacity(2 * w.cols());
        for j in 0..w.cols() {
            let col = w.col(j);
            cols.push(col.iter().map(|z| z.real_part()).collect());
            cols.push(col.iter().map(|z| -z.imag_part()).collect());
        }
        pair_groups.push((lead(&cols[0]), cols, (lambda, sizes)));
    }
    real_groups.sort_by_key(|g| g.0);
    pair_groups.sort_by_key(|g| g.0);
    let mut real_cols: Vec<Vec<Scalar>> = real_groups.into_iter().flat_map(|g| g.1).collect();
    let real_size = real_cols.len();
    let mut pairs = Vec::new();
    for (_, cols, pair) in pair_groups {
        real_cols.extend(cols);
        pairs.push(pair);
    }
    let t = basis_matrix(n, &real_cols);
    let form = t.inverse()?.mul(m).mul(&t);
    Ok(RealCanonical { field: f, conjugator: t, form, real_size, pairs })
}

fn poly_dim_check(r: &Matrix, s: &Matrix, m: &Matrix) -> Result<()> {
    if !r.is_square() || !s.is_square() || m.rows() != r.rows() || m.cols() != s.rows() {
        return Err(Error::Dimension(format!(
            "sylvester {}x{}, {}x{}, {}x{}",
            r.rows(),
            r.cols(),
            s.rows(),
            s.cols(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Solves `R X − X S = M` for `X`.
pub fn sylvester_solve(r: &Matrix, s: &Matrix, m: &Matrix) -> Result<Matrix> {
    poly_dim_check(r, s, m)?;
    let (n, k) = (r.rows(), s.rows());
    if n == 0 || k == 0 {
        return Ok(Matrix::zeros(n, k));
    }
    if r.charpoly().gcd(&s.charpoly()).deg() > 0 {
        return Err(Error::CommonEigenvalue);
    }
    let big = r.kron(&Matrix::identity(k)).sub(&Matrix::identity(n).kron(&s.transpose()));
    let rhs = Matrix::from_fn(n * k, 1, |i, _| m[(i / k, i % k)].clone());
    let v = big.solve(&rhs)?;
    Ok(Matrix::from_fn(n, k, |i, j| v[(i * k + j, 0)].clone()))
}

fn char_matrix(m: &Matrix) -> Vec<Vec<Poly>> {
    let n = m.rows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = Poly::constant(m[(i, j)].clone());
                    if i == j {
                        c.sub(&Poly::x())
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect()
}

fn poly_det(a: &[Vec<Poly>], rows: &[usize], cols: &[usize]) -> Poly {
    if rows.is_empty() {
        return Poly::one();
    }
    if rows.len() == 1 {
        return a[rows[0]][cols[0]].clone();
    }
    let mut acc = Poly::zero();
    for (t, &c) in cols.iter().enumerate() {
        let e = &a[rows[0]][c];
        if e.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = e.mul(&poly_det(a, &rows[1..], &rest));
        acc = if t % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// `γ_i` as degrees of gcds of all `i × i` minors of `M − λI`.
pub fn gamma_by_minors(m: &Matrix) -> Vec<usize> {
    let n = m.rows();
    let a = char_matrix(m);
    (1..=n)
        .map(|i| {
            let idx = subsets(n, i);
            let mut g = Poly::zero();
            for r in &idx {
                for c in &idx {
                    let d = poly_det(&a, r, c);
                    if !d.is_zero() {
                        g = g.gcd(&d);
                        if g.deg() == 0 {
                            break;
                        }
                    }
                }
                if !g.is_zero() && g.deg() == 0 {
                    break;
                }
            }
            g.deg()
        })
        .collect()
}

/// `γ_i` from the Smith form of `M − λI` over the polynomial ring.
pub fn gamma_by_smith(m: &Matrix) -> Vec<usize> {
    let n = m.rows();
    let mut a = char_matrix(m);
    let mut invariants = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !a[i][j].is_zero() && best.map_or(true, |b| a[i][j].deg() < b.2) {
                        best = Some((i, j, a[i][j].deg()));
                    }
                }
            }
            let Some((bi, bj, _)) = best else {
                break;
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let piv = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..n {
                let (q, r) = a[i][t].divrem(&piv).expect("nonzero pivot");
                for j in t..n {
                    let sub = q.mul(&a[t][j]);
                    a[i][j] = a[i][j].sub(&sub);
                }
                if !r.is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let (q, r) = a[t][j].divrem(&piv).expect("nonzero pivot");
                for i in t..n {
                    let sub = q.mul(&a[i][t]);
                    a[i][j] = a[i][j].sub(&sub);
                }
                if !r.is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let mut bad = None;
            'outer: for i in t + 1..n {
                for j in t + 1..n {
                    if !a[i][j].rem(&piv).expect("nonzero pivot").is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..n {
                        let v = a[i][j].clone();
                        a[t][j] = a[t][j].add(&v);
                    }
                }
                None => break,
            }
        }
        invariants.push(a[t][t].deg());
    }
    let mut acc = 0;
    invariants
        .into_iter()
        .map(|d| {
            acc += d;
            acc
        })
        .collect()
}

/// Determinantal-divisor degrees `(γ_1, …, γ_n)` of `M − λI`.
pub fn gamma_invariants(m: &Matrix) -> Vec<usize> {
    if m.rows() <= 4 {
        gamma_by_minors(m)
    } else {
        gamma_by_smith(m)
    }
}

/// Embeds `a + bi` as `[[a, −b], [b, a]]` entrywise.
pub fn theta_embed(m: &Matrix) -> Matrix {
    Matrix::from_fn(2 * m.rows(), 2 * m.cols(), |i, j| {
        let z = &m[(i / 2, j / 2)];
        match (i % 2, j % 2) {
            (0, 0) | (1, 1) => z.real_part(),
            (0, 1) => -z.imag_part(),
            _ => z.imag_part(),
        }
    })
}

pub fn is_c_matrix(m: &Matrix) -> bool {
    if m.rows() % 2 != 0 || m.cols() % 2 != 0 || !m.is_real() {
        return false;
    }
    (0..m.rows() / 2).all(|u| {
        (0..m.cols() / 2).all(|v| {
            let (i, j) = (2 * u, 2 * v);
            m[(i, j)] == m[(i + 1, j + 1)] && m[(i, j + 1)] == -&m[(i + 1, j)]
        })
    })
}

/// Inverse of [`theta_embed`] on its image.
pub fn theta_extract(m: &Matrix) -> Result<Matrix> {
    if !is_c_matrix(m) {
        return Err(Error::NotCMatrix);
    }
    let i = Scalar::i();
    Ok(Matrix::from_fn(m.rows() / 2, m.cols() / 2, |u, v| {
        let a = &m[(2 * u, 2 * v)];
        let b = &m[(2 * u + 1, 2 * v)];
        a + &(b * &i)
    }))
}

pub fn theta_embed_system(a: &SystemJet) -> SystemJet {
    SystemJet::new(2 * a.dim(), 0, Vec::new(), a.order()).add(&a.map(theta_embed))
}

pub fn theta_extract_system(a: &SystemJet) -> Result<SystemJet> {
    if a.dim() % 2 != 0 {
        return Err(Error::NotCMatrix);
    }
    a.try_map(a.dim() / 2, theta_extract)
}

pub fn theta_embed_poly(p: &PolyMatrix) -> PolyMatrix {
    PolyMatrix::new(2 * p.dim(), p.coeffs().iter().map(theta_embed).collect())
}

/// Returns `X` with `x21 = x22 = 0` such that `ΛX − XΛ + S` lies in the
/// image of the block embedding.
pub fn c_completion(lambda: &Matrix, s: &Matrix) -> Result<Matrix> {
    if lambda.rows() != 2 || lambda.cols() != 2 || s.rows() != 2 || s.cols() != 2 {
        return Err(Error::Dimension("c_completion needs 2x2 matrices".into()));
    }
    if !is_c_matrix(lambda) {
        return Err(Error::NotCMatrix);
    }
    let b = lambda[(1, 0)].clone();
    if b.is_zero() {
        return Err(Error::BZero);
    }
    let half = Scalar::from_ratio(1, 2);
    let u = &(&s[(0, 0)] - &s[(1, 1)]) * &half;
    let v = -&(&(&s[(0, 1)] + &s[(1, 0)]) * &half);
    let binv = b.checked_inv()?;
    let z = Scalar::zero();
    Ok(Matrix::from_rows(vec![vec![&v * &binv, &u * &binv], vec![z.clone(), z]]))
}

/// One integer-difference class: factors `f_base(x − s)` for each stored
/// shift `s`, listed by decreasing shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceClass {
    pub base: Poly,
    /// `(shift, multiplicity)` sorted by decreasing shift.
    pub members: Vec<(i64, usize)>,
}

impl ResonanceClass {
    pub fn spread(&self) -> usize {
        match (self.members.first(), self.members.last()) {
            (Some(a), Some(b)) => (a.0 - b.0) as usize,
            _ => 0,
        }
    }

    /// Irreducible factor carrying the eigenvalues at `shift`.
    pub fn factor_at(&self, shift: i64) -> Poly {
        self.base.shift(&Scalar::from_int(-shift))
    }

    pub fn top(&self) -> Poly {
        self.factor_at(self.members[0].0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceData {
    pub classes: Vec<ResonanceClass>,
    pub m_value: usize,
}

impl ResonanceData {
    pub fn is_resonant(&self) -> bool {
        self.m_value > 0
    }
}

/// Integer `s` with `g(x) = f(x − s)`, if any.
fn integer_shift(f: &Poly, g: &Poly) -> Option<i64> {
    let d = f.deg();
    if d == 0 || g.deg() != d {
        return None;
    }
    let s = (&f.coeff(d - 1) - &g.coeff(d - 1)).checked_div(&Scalar::from_int(d as i64)).ok()?;
    let si = s.as_integer()?;
    if si.abs() > num_bigint::BigInt::from(i64::MAX / 2) {
        return None;
    }
    let si = si.to_i64()?;
    if f.shift(&Scalar::from_int(-si)) == *g {
        Some(si)
    } else {
        None
    }
}

/// Partitions the spectrum of `c` into classes of eigenvalues differing by
/// integers.
pub fn resonance_data(c: &Matrix, field: &Field) -> Result<ResonanceData> {
    let f = field.join(&c.field_over(&Field::RATIONALS)?)?;
    let fs = factor_poly(&c.charpoly(), &f)?;
    let mut classes: Vec<ResonanceClass> = Vec::new();
    for (p, mult) in fs {
        let p = p.monic();
        let mut placed = false;
        for cl in classes.iter_mut() {
            if let Some(s) = integer_shift(&cl.base, &p) {
                cl.members.push((s, mult));
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(ResonanceClass { base: p, members: vec![(0, mult)] });
        }
    }
    let mut m_value = 0;
    for cl in classes.iter_mut() {
        cl.members.sort_by(|a, b| b.0.cmp(&a.0));
        let low = cl.members.last().map_or(0, |m| m.0);
        if low != 0 {
            cl.base = cl.base.shift(&Scalar::from_int(-low));
            for m in cl.members.iter_mut() {
                m.0 -= low;
            }
        }
        m_value += cl.base.deg() * cl.spread();
    }
    classes.sort_by(|a, b| a.base.canonical_cmp(&b.base).then(Ordering::Equal));
    Ok(ResonanceData { classes, m_value })
}

/// True when no two eigenvalues of `c` differ by a nonzero integer.
pub fn is_non_resonant(c: &Matrix, field: &Field) -> Result<bool> {
    Ok(!resonance_data(c, field)?.is_resonant())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn conj_check(m: &Matrix, t: &Matrix, target: &Matrix) {
        assert_eq!(t.inverse().unwrap().mul(m).mul(t), *target);
    }

    #[test]
    fn split_upper_triangular() {
        let m = Matrix::from_ints(&[&[1, 1], &[0, 2]]);
        let (t, m1, m2) = coprime_split(&m, &Poly::from_ints(&[-1, 1]), &Poly::from_ints(&[-2, 1])).unwrap();
        assert_eq!(m1, Matrix::from_ints(&[&[1]]));
        assert_eq!(m2, Matrix::from_ints(&[&[2]]));
        conj_check(&m, &t, &Matrix::from_ints(&[&[1, 0], &[0, 2]]));
        assert_eq!(t.col(1)[0], t.col(1)[1]);
    }

    #[test]
    fn split_rotation_over_gaussian() {
        let m = Matrix::from_ints(&[&[0, -1], &[1, 0]]);
        let i = Scalar::i();
        let (t, m1, m2) = coprime_split(&m, &Poly::linear(&i), &Poly::linear(&-&i)).unwrap();
        assert_eq!(m1[(0, 0)], i);
        assert_eq!(m2[(0, 0)], -&i);
        conj_check(&m, &t, &Matrix::diagonal(&[i.clone(), -&i]));
    }

    #[test]
    fn split_errors() {
        let m = Matrix::from_ints(&[&[1, 0], &[0, 1]]);
        let p = Poly::from_ints(&[-1, 1]);
        assert_eq!(coprime_split(&m, &p, &p), Err(Error::NotCoprime));
        let m = Matrix::from_ints(&[&[1, 0], &[0, 2]]);
        assert!(matches!(
            coprime_split(&m, &Poly::from_ints(&[-1, 1]), &Poly::from_ints(&[-3, 1])),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn jordan_examples() {
        let j = jordan_single_eigen(&Matrix::scalar(3, &s(5)), &s(5)).unwrap();
        assert_eq!(j.block_sizes, vec![1, 1, 1]);
        assert_eq!(j.conjugator, Matrix::identity(3));
        let h3 = shift_matrix(3);
        let j = jordan_single_eigen(&h3, &s(0)).unwrap();
        assert_eq!(j.block_sizes, vec![3]);
        assert_eq!(j.conjugator, Matrix::identity(3));
        let m = Matrix::block_diag(&[shift_matrix(2), Matrix::zeros(1, 1)]);
        let j = jordan_single_eigen(&m, &s(0)).unwrap();
        assert_eq!(j.block_sizes, vec![1, 2]);
        conj_check(&m, &j.conjugator, &j.form());
        assert!(matches!(jordan_single_eigen(&m, &s(1)), Err(Error::SpectrumMismatch(_))));
    }

    #[test]
    fn real_canonical_examples() {
        let rot = Matrix::from_ints(&[&[0, -1], &[1, 0]]);
        let rc = real_canonical_form(&rot, &Field::RATIONALS).unwrap();
        assert_eq!(rc.real_size, 0);
        assert_eq!(rc.c2(), rot);
        assert_eq!(rc.conjugator, Matrix::identity(2));
        let d = Matrix::from_ints(&[&[1, 0], &[0, 2]]);
        let rc = real_canonical_form(&d, &Field::RATIONALS).unwrap();
        assert_eq!(rc.real_size, 2);
        assert_eq!(rc.c1(), d);
        let m = Matrix::from_ints(&[&[0, -1, 1, 0], &[1, 0, 0, 1], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
        let rc = real_canonical_form(&m, &Field::RATIONALS).unwrap();
        let lam = Matrix::from_ints(&[&[0, -1], &[1, 0]]);
        let mut expect = Matrix::block_diag(&[lam.clone(), lam]);
        expect.set_block(0, 2, &Matrix::identity(2));
        assert_eq!(rc.form, expect);
        conj_check(&m, &rc.conjugator, &expect);
    }

    #[test]
    fn real_canonical_extends_field() {
        let m = Matrix::from_ints(&[&[0, -2], &[1, 0]]);
        let rc = real_canonical_form(&m, &Field::RATIONALS).unwrap();
        assert_eq!(rc.field, Field::real_quadratic(2).unwrap());
        assert!(is_c_matrix(&rc.form));
        conj_check(&m, &rc.conjugator, &rc.form);
        let m = Matrix::from_ints(&[&[0, 2], &[1, 0]]);
        let rc = real_canonical_form(&m, &Field::RATIONALS).unwrap();
        assert_eq!(rc.real_size, 2);
        assert!(rc.form.is_diagonal());
    }

    #[test]
    fn sylvester_examples() {
        let x = sylvester_solve(&Matrix::from_ints(&[&[1]]), &Matrix::from_ints(&[&[2]]), &Matrix::from_ints(&[&[5]]))
            .unwrap();
        assert_eq!(x, Matrix::from_ints(&[&[-5]]));
        let r = Matrix::from_ints(&[&[0, 1], &[0, 0]]);
        let sm = Matrix::from_ints(&[&[1]]);
        let x = sylvester_solve(&r, &sm, &Matrix::zeros(2, 1)).unwrap();
        assert!(x.is_zero());
        let m = Matrix::from_ints(&[&[1], &[1]]);
        let x = sylvester_solve(&r, &sm, &m).unwrap();
        assert_eq!(x, Matrix::from_ints(&[&[-2], &[-1]]));
        assert_eq!(r.mul(&x).sub(&x.mul(&sm)), m);
        assert_eq!(sylvester_solve(&r, &Matrix::from_ints(&[&[0]]), &m), Err(Error::CommonEigenvalue));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_invariants(&shift_matrix(2)), vec![0, 2]);
        assert_eq!(gamma_invariants(&Matrix::scalar(2, &s(3))), vec![1, 2]);
        assert_eq!(gamma_invariants(&Matrix::from_ints(&[&[7]])), vec![1]);
        let m = Matrix::block_diag(&[shift_matrix(2), Matrix::zeros(1, 1)]);
        assert_eq!(gamma_by_minors(&m), gamma_by_smith(&m));
        assert_eq!(gamma_by_minors(&m), vec![0, 1, 3]);
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_embed(&Matrix::from_rows(vec![vec![Scalar::i()]])), Matrix::from_ints(&[&[0, -1], &[1, 0]]));
        assert_eq!(theta_embed(&Matrix::from_ints(&[&[3]])), Matrix::scalar(2, &s(3)));
        assert_eq!(theta_extract(&Matrix::from_ints(&[&[1, 0], &[0, 2]])), Err(Error::NotCMatrix));
    }

    #[test]
    fn c_completion_examples() {
        let lam = Matrix::from_ints(&[&[0, -1], &[1, 0]]);
        let sm = Matrix::from_ints(&[&[1, 0], &[0, 0]]);
        let x = c_completion(&lam, &sm).unwrap();
        assert_eq!(x[(0, 1)], Scalar::from_ratio(1, 2));
        let res = lam.mul(&x).sub(&x.mul(&lam)).add(&sm);
        assert_eq!(res, Matrix::scalar(2, &Scalar::from_ratio(1, 2)));
        let lam2 = Matrix::from_ints(&[&[0, -2], &[2, 0]]);
        let sm = Matrix::from_ints(&[&[0, 1], &[-3, 0]]);
        let x = c_completion(&lam2, &sm).unwrap();
        assert_eq!(x[(0, 0)], Scalar::from_ratio(1, 2));
        assert!(is_c_matrix(&lam2.mul(&x).sub(&x.mul(&lam2)).add(&sm)));
        let x = c_completion(&lam, &Matrix::from_ints(&[&[1, -2], &[2, 1]])).unwrap();
        assert!(x.is_zero());
        assert_eq!(c_completion(&Matrix::identity(2), &sm), Err(Error::BZero));
    }

    #[test]
    fn resonance_examples() {
        let q = Field::RATIONALS;
        let r = resonance_data(&Matrix::from_ints(&[&[0, 0], &[0, 1]]), &q).unwrap();
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.classes[0].members, vec![(1, 1), (0, 1)]);
        assert_eq!(r.m_value, 1);
        let half = Matrix::diagonal(&[s(0), Scalar::from_ratio(1, 2)]);
        let r = resonance_data(&half, &q).unwrap();
        assert_eq!((r.classes.len(), r.m_value), (2, 0));
        let i = Scalar::i();
        let c = Matrix::diagonal(&[s(0), s(1), s(3), i.clone(), &i + &s(2)]);
        let r = resonance_data(&c, &Field::GAUSSIAN).unwrap();
        assert_eq!(r.classes.len(), 2);
        assert_eq!(r.m_value, 5);
        let r = resonance_data(&Matrix::from_ints(&[&[0, -1], &[1, 0]]), &q).unwrap();
        assert_eq!((r.classes.len(), r.m_value), (1, 0));
    }
}
