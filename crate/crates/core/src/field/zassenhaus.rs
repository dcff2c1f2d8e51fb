//! Factorization of squarefree primitive integer polynomials: modular
//! factorization, multifactor Hensel lifting and subset recombination.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

type Fp = Vec<u64>;

fn trim(v: &mut Fp) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn fp_add(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    let mut r: Fp = (0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect();
    trim(&mut r);
    r
}

fn fp_sub(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    let mut r: Fp = (0..n).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect();
    trim(&mut r);
    r
}

fn fp_mul(a: &Fp, b: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(&mut r);
    r
}

fn fp_divrem(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let inv = invmod(b[db], p);
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = mulmod(r[i + db], inv, p);
        if c == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + p - mulmod(c, y, p)) % p;
        }
        q[i] = c;
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

fn fp_monic(a: &Fp, p: u64) -> Fp {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = invmod(l, p);
            a.iter().map(|&c| mulmod(c, inv, p)).collect()
        }
    }
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = fp_divrem(&a, &b, p).1;
        a = b;
        b = r;
    }
    fp_monic(&a, p)
}

// returns (s, t) with s*a + t*b = 1
fn fp_bezout(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (Fp, Fp) = (vec![1], Vec::new());
    let (mut t0, mut t1): (Fp, Fp) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        r0 = core::mem::replace(&mut r1, r);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        s0 = core::mem::replace(&mut s1, s2);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        t0 = core::mem::replace(&mut t1, t2);
    }
    debug_assert_eq!(r0.len(), 1);
    let inv = invmod(r0[0], p);
    let sc = |v: &Fp| -> Fp { v.iter().map(|&c| mulmod(c, inv, p)).collect() };
    (sc(&s0), sc(&t0))
}

fn fp_derivative(a: &Fp, p: u64) -> Fp {
    let mut r: Fp = a.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % p, p)).collect();
    trim(&mut r);
    r
}

fn fp_powmod(base: &Fp, mut e: BigInt, m: &Fp, p: u64) -> Fp {
    let mut r: Fp = vec![1];
    let mut b = fp_divrem(base, m, p).1;
    let two = BigInt::from(2);
    while !e.is_zero() {
        if e.is_odd() {
            r = fp_divrem(&fp_mul(&r, &b, p), m, p).1;
        }
        b = fp_divrem(&fp_mul(&b, &b, p), m, p).1;
        e /= &two;
    }
    r
}

// distinct-degree factorization of a monic squarefree polynomial
fn ddf(f: &Fp, p: u64) -> Vec<(Fp, usize)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    let x: Fp = vec![0, 1];
    let mut h = x.clone();
    let mut d = 1;
    while f.len() > 1 && 2 * d <= f.len() - 1 {
        h = fp_powmod(&h, BigInt::from(p), &f, p);
        let g = fp_gcd(&f, &fp_sub(&h, &x, p), p);
        if g.len() > 1 {
            f = fp_divrem(&f, &g, p).0;
            h = fp_divrem(&h, &f, p).1;
            out.push((g, d));
        }
        d += 1;
    }
    if f.len() > 1 {
        let deg = f.len() - 1;
        out.push((f, deg));
    }
    out
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 11
    }
}

// equal-degree splitting of a product of irreducibles of degree d (p odd)
fn edf(f: &Fp, d: usize, p: u64, rng: &mut Lcg) -> Vec<Fp> {
    let n = f.len() - 1;
    if n == d {
        return vec![f.clone()];
    }
    let e = (BigInt::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let mut a: Fp = (0..n).map(|_| rng.next() % p).collect();
        trim(&mut a);
        if a.len() < 2 {
            continue;
        }
        let b = fp_sub(&fp_powmod(&a, e.clone(), f, p), &vec![1], p);
        let g = fp_gcd(f, &b, p);
        if g.len() > 1 && g.len() < f.len() {
            let h = fp_divrem(f, &g, p).0;
            let mut out = edf(&g, d, p, rng);
            out.extend(edf(&fp_monic(&h, p), d, p, rng));
            return out;
        }
    }
}

fn to_fp(f: &[BigInt], p: u64) -> Fp {
    let pb = BigInt::from(p);
    let mut r: Fp = f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    trim(&mut r);
    r
}

fn from_fp(f: &Fp) -> Vec<BigInt> {
    f.iter().map(|&c| BigInt::from(c)).collect()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

// ---- integer polynomials ----

fn z_trim(v: &mut Vec<BigInt>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn z_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    z_trim(&mut r);
    r
}

fn z_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let mut r: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect();
    z_trim(&mut r);
    r
}

fn z_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let mut r: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect();
    z_trim(&mut r);
    r
}

fn z_mod(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut r: Vec<BigInt> = a.iter().map(|c| c.mod_floor(m)).collect();
    z_trim(&mut r);
    r
}

fn z_symmetric(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    let mut r: Vec<BigInt> = a
        .iter()
        .map(|c| {
            let c = c.mod_floor(m);
            if c > half {
                c - m
            } else {
                c
            }
        })
        .collect();
    z_trim(&mut r);
    r
}

// exact division over Z; None if not exact
fn z_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return if a.is_empty() { Some(Vec::new()) } else { None };
    }
    let lc = &b[db];
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let (c, rem) = r[i + db].div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        if c.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] -= &c * y;
        }
        q[i] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(q)
}

fn z_primitive(a: &[BigInt]) -> Vec<BigInt> {
    let g = super::content_of(a);
    let mut v: Vec<BigInt> = a.iter().map(|c| c / &g).collect();
    if v.last().map_or(false, |c| c.is_negative()) {
        v.iter_mut().for_each(|c| *c = -c.clone());
    }
    v
}

// Lift f = g*h (mod p) to mod p^k, g monic, given s*g + t*h = 1 (mod p).
fn hensel_two(f: &[BigInt], g: &Fp, h: &Fp, p: u64, k: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let (s, t) = fp_bezout(g, h, p);
    let pb = BigInt::from(p);
    let mut gz = from_fp(g);
    let mut hz = from_fp(h);
    let mut pk = pb.clone();
    for _ in 1..k {
        let next = &pk * &pb;
        let diff = z_mod(&z_sub(f, &z_mul(&gz, &hz)), &next);
        let e: Vec<BigInt> = diff.iter().map(|c| c / &pk).collect();
        let e = to_fp(&e, p);
        let (q, r) = fp_divrem(&fp_mul(&e, &t, p), g, p);
        let dh = fp_add(&fp_mul(&e, &s, p), &fp_mul(&q, h, p), p);
        let dg = r;
        gz = z_mod(&z_add(&gz, &from_fp(&dg).iter().map(|c| c * &pk).collect::<Vec<_>>()), &next);
        hz = z_mod(&z_add(&hz, &from_fp(&dh).iter().map(|c| c * &pk).collect::<Vec<_>>()), &next);
        pk = next;
    }
    (gz, hz)
}

// f = lc * prod(factors) mod p, factors monic; returns monic lifts mod p^k
fn hensel_multi(f: &[BigInt], factors: &[Fp], p: u64, k: u32, pk: &BigInt) -> Vec<Vec<BigInt>> {
    if factors.len() == 1 {
        let lc = f.last().unwrap().mod_floor(pk);
        let inv = lc.modinv(pk).expect("leading coefficient is a unit");
        return vec![z_mod(&f.iter().map(|c| c * &inv).collect::<Vec<_>>(), pk)];
    }
    let mid = factors.len() / 2;
    let mut g: Fp = vec![1];
    for a in &factors[..mid] {
        g = fp_mul(&g, a, p);
    }
    let mut h: Fp = vec![to_fp(&[f.last().unwrap().clone()], p)[0]];
    for a in &factors[mid..] {
        h = fp_mul(&h, a, p);
    }
    let (gz, hz) = hensel_two(f, &g, &h, p, k);
    let mut out = hensel_multi(&gz, &factors[..mid], p, k, pk);
    out.extend(hensel_multi(&hz, &factors[mid..], p, k, pk));
    out
}

fn modular_factors(f: &[BigInt], p: u64) -> Vec<Fp> {
    let fm = fp_monic(&to_fp(f, p), p);
    let mut rng = Lcg(0x9e37_79b9_7f4a_7c15 ^ p);
    let mut out = Vec::new();
    for (g, d) in ddf(&fm, p) {
        out.extend(edf(&g, d, p, &mut rng));
    }
    out.sort();
    out
}

fn count_factors(f: &[BigInt], p: u64) -> usize {
    let fm = fp_monic(&to_fp(f, p), p);
    ddf(&fm, p).iter().map(|(g, d)| (g.len() - 1) / d).sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
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
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Irreducible factors over `Z` of a squarefree primitive polynomial with
/// positive leading coefficient and degree at least one.
pub(crate) fn factor_squarefree_z(f: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    if n == 1 {
        return vec![f.to_vec()];
    }
    if f[0].is_zero() {
        let rest = z_primitive(&f[1..]);
        let mut out = vec![vec![BigInt::zero(), BigInt::one()]];
        out.extend(factor_squarefree_z(&rest));
        return out;
    }
    let lc = f.last().unwrap().clone();
    // choose a good prime with few modular factors
    let mut best: Option<(usize, u64)> = None;
    let mut tried = 0;
    let mut cand = 3u64;
    while tried < 6 {
        cand += 2;
        if !is_prime(cand) || (&lc % BigInt::from(cand)).is_zero() {
            continue;
        }
        let fp = to_fp(f, cand);
        if fp.len() != f.len() || fp_gcd(&fp, &fp_derivative(&fp, cand), cand).len() != 1 {
            continue;
        }
        tried += 1;
        let c = count_factors(f, cand);
        if best.map_or(true, |(b, _)| c < b) {
            best = Some((c, cand));
        }
        if c == 1 {
            break;
        }
    }
    let (count, p) = best.expect("a good prime exists");
    if count == 1 {
        return vec![f.to_vec()];
    }
    let modf = modular_factors(f, p);
    // Mignotte-type bound for factors of lc*f
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    let bound = lc.abs() * (BigInt::one() << n) * (norm2.sqrt() + 1u32);
    let target = bound * 2u32;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = pb.clone();
    while pk <= target {
        pk *= &pb;
        k += 1;
    }
    let mut lifted = hensel_multi(f, &modf, p, k, &pk);
    let mut rest = f.to_vec();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = false;
        for subset in subsets(lifted.len(), size) {
            let lcr = rest.last().unwrap().clone();
            let mut g = vec![lcr.clone()];
            for &i in &subset {
                g = z_symmetric(&z_mul(&g, &lifted[i]), &pk);
            }
            let g = z_primitive(&g);
            if let Some(q) = z_div_exact(&rest, &g) {
                rest = z_primitive(&q);
                out.push(g);
                let mut keep = Vec::new();
                for (i, h) in lifted.into_iter().enumerate() {
                    if !subset.contains(&i) {
                        keep.push(h);
                    }
                }
                lifted = keep;
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn product(fs: &[Vec<BigInt>]) -> Vec<BigInt> {
        fs.iter().fold(zp(&[1]), |acc, f| z_mul(&acc, f))
    }

    #[test]
    fn swinnerton_dyer_like() {
        // x^4 - 10x^2 + 1 is irreducible but splits mod every prime
        let f = zp(&[1, 0, -10, 0, 1]);
        assert_eq!(factor_squarefree_z(&f).len(), 1);
    }

    #[test]
    fn non_monic_product() {
        let a = zp(&[1, 2, 3]);
        let b = zp(&[-5, 0, 0, 2]);
        let c = zp(&[7, 4]);
        let f = product(&[a, b, c]);
        let fs = factor_squarefree_z(&f);
        assert_eq!(fs.len(), 3);
        assert_eq!(product(&fs), f);
    }

    #[test]
    fn cyclotomic_12() {
        // x^12 - 1 = product of cyclotomics 1,2,3,4,6,12
        let mut v = vec![0i64; 13];
        v[0] = -1;
        v[12] = 1;
        let f = zp(&v);
        let fs = factor_squarefree_z(&f);
        assert_eq!(fs.len(), 6);
        let mut prod = product(&fs);
        if prod.last().unwrap().is_negative() {
            prod.iter_mut().for_each(|c| *c = -c.clone());
        }
        assert_eq!(prod, f);
    }
}
