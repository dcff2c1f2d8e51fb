use proptest::prelude::*;
use turrittin_core::field::{Poly, Scalar};
use turrittin_core::linalg::*;
use turrittin_core::matrix::Matrix;

fn int_matrix(rows: usize, cols: usize, v: &[i64]) -> Matrix {
    Matrix::from_fn(rows, cols, |i, j| Scalar::from_int(v[i * cols + j]))
}

fn gaussian_matrix(n: usize, re: &[i64], im: &[i64]) -> Matrix {
    Matrix::from_fn(n, n, |i, j| {
        Scalar::complex(&Scalar::from_int(re[i * n + j]), &Scalar::from_int(im[i * n + j])).unwrap()
    })
}

/// Unit upper times unit lower triangular, always invertible over ℤ.
fn unimodular(n: usize, v: &[i64]) -> Matrix {
    let up = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        core::cmp::Ordering::Equal => Scalar::one(),
        core::cmp::Ordering::Less => Scalar::from_int(v[i * n + j]),
        _ => Scalar::zero(),
    });
    let lo = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        core::cmp::Ordering::Equal => Scalar::one(),
        core::cmp::Ordering::Greater => Scalar::from_int(v[i * n + j]),
        _ => Scalar::zero(),
    });
    up.mul(&lo)
}

fn partition(n: usize, cuts: &[bool]) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut cur = 1;
    for &c in cuts.iter().take(n - 1) {
        if c {
            sizes.push(cur);
            cur = 1;
        } else {
            cur += 1;
        }
    }
    sizes.push(cur);
    sizes
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theta_is_a_ring_homomorphism(
        a in proptest::collection::vec(-3i64..4, 4), b in proptest::collection::vec(-3i64..4, 4),
        c in proptest::collection::vec(-3i64..4, 4), d in proptest::collection::vec(-3i64..4, 4),
    ) {
        let m = gaussian_matrix(2, &a, &b);
        let n = gaussian_matrix(2, &c, &d);
        prop_assert_eq!(theta_embed(&m.mul(&n)), theta_embed(&m).mul(&theta_embed(&n)));
        prop_assert_eq!(theta_embed(&m.add(&n)), theta_embed(&m).add(&theta_embed(&n)));
        prop_assert!(is_c_matrix(&theta_embed(&m)));
        prop_assert_eq!(theta_extract(&theta_embed(&m)).unwrap(), m);
    }

    #[test]
    fn sylvester_substitution(
        r in proptest::collection::vec(-3i64..4, 4),
        s in proptest::collection::vec(-3i64..4, 9),
        m in proptest::collection::vec(-5i64..6, 6),
    ) {
        let r = int_matrix(2, 2, &r);
        let s = int_matrix(3, 3, &s);
        let m = int_matrix(2, 3, &m);
        let common = r.charpoly().gcd(&s.charpoly()).deg() > 0;
        match sylvester_solve(&r, &s, &m) {
            Ok(x) => {
                prop_assert!(!common);
                prop_assert_eq!(r.mul(&x).sub(&x.mul(&s)), m);
            }
            Err(e) => {
                prop_assert!(common);
                prop_assert_eq!(e, turrittin_core::Error::CommonEigenvalue);
            }
        }
    }

    #[test]
    fn coprime_split_conjugates(
        t in proptest::collection::vec(-2i64..3, 16),
        d in proptest::collection::vec(-3i64..4, 4),
    ) {
        let t = unimodular(4, &t);
        let base = Matrix::diagonal(&[
            Scalar::from_int(d[0]), Scalar::from_int(d[0]), Scalar::from_int(d[2]), Scalar::from_int(d[3]),
        ]);
        let m = t.mul(&base).mul(&t.inverse().unwrap());
        let p1 = Poly::linear(&Scalar::from_int(d[0])).pow(2);
        let p2 = Poly::linear(&Scalar::from_int(d[2])).mul(&Poly::linear(&Scalar::from_int(d[3])));
        match coprime_split(&m, &p1, &p2) {
            Ok((c, m1, m2)) => {
                prop_assert_eq!(c.inverse().unwrap().mul(&m).mul(&c), Matrix::block_diag(&[m1.clone(), m2.clone()]));
                prop_assert_eq!(m1.charpoly().mul(&m2.charpoly()), m.charpoly());
            }
            Err(e) => {
                prop_assert!(d[0] == d[2] || d[0] == d[3]);
                prop_assert_eq!(e, turrittin_core::Error::NotCoprime);
            }
        }
    }

    #[test]
    fn jordan_rank_profile(
        t in proptest::collection::vec(-2i64..3, 25),
        cuts in proptest::collection::vec(any::<bool>(), 4),
        lam in -3i64..4,
    ) {
        let sigma = partition(5, &cuts);
        let lam = Scalar::from_int(lam);
        let t = unimodular(5, &t);
        let m = t.mul(&jordan_matrix(&lam, &sigma)).mul(&t.inverse().unwrap());
        let jd = jordan_single_eigen(&m, &lam).unwrap();
        let mut sorted = sigma.clone();
        sorted.sort();
        prop_assert_eq!(&jd.block_sizes, &sorted);
        prop_assert_eq!(jd.conjugator.inverse().unwrap().mul(&m).mul(&jd.conjugator), jd.form());
        let nil = m.sub(&Matrix::scalar(5, &lam));
        for j in 0..=5usize {
            let expect: usize = sorted.iter().map(|&s| s.saturating_sub(j)).sum();
            prop_assert_eq!(nil.pow(j).rank(), expect);
        }
    }

    #[test]
    fn gamma_methods_agree(v in proptest::collection::vec(-2i64..3, 16), t in proptest::collection::vec(-1i64..2, 16)) {
        let m = int_matrix(4, 4, &v);
        prop_assert_eq!(gamma_by_minors(&m), gamma_by_smith(&m));
        let t = unimodular(4, &t);
        let j = Matrix::block_diag(&[jordan_matrix(&Scalar::from_int(1), &[1, 2]), Matrix::from_ints(&[&[1]])]);
        let m = t.mul(&j).mul(&t.inverse().unwrap());
        prop_assert_eq!(gamma_by_minors(&m), gamma_by_smith(&m));
        prop_assert_eq!(gamma_by_minors(&m), gamma_by_minors(&j));
    }

    #[test]
    fn gamma_drops_under_lower_blocks(
        cuts in proptest::collection::vec(any::<bool>(), 4),
        low in proptest::collection::vec(-2i64..3, 25),
        lam in -2i64..3,
    ) {
        let mut sigma = partition(5, &cuts);
        sigma.sort();
        prop_assume!(sigma.len() > 1);
        let lam = Scalar::from_int(lam);
        let a = jordan_matrix(&lam, &sigma);
        let mut starts = vec![0];
        for s in &sigma {
            starts.push(starts.last().unwrap() + s);
        }
        let block_of = |i: usize| starts.iter().rposition(|&s| s <= i).unwrap();
        let mut g = a.clone();
        let mut nonzero = false;
        for i in 0..5 {
            for j in 0..5 {
                if block_of(i) > block_of(j) && starts.contains(&(i + 1)) && low[i * 5 + j] != 0 {
                    g[(i, j)] = Scalar::from_int(low[i * 5 + j]);
                    nonzero = true;
                }
            }
        }
        prop_assume!(nonzero);
        let ga = gamma_invariants(&a);
        let gg = gamma_invariants(&g);
        prop_assert!(gg.iter().zip(&ga).all(|(x, y)| x <= y));
        prop_assert!(gg.iter().zip(&ga).any(|(x, y)| x < y));
    }
}
