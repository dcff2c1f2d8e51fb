use proptest::prelude::*;
use turrittin_core::chain::TransformStep;
use turrittin_core::field::Scalar;
use turrittin_core::matrix::Matrix;
use turrittin_core::reduce::{real_layout, rtrs_rank0, trs_rank0, Unit};
use turrittin_core::system::SystemJet;

fn arb_system() -> impl Strategy<Value = SystemJet> {
    (1usize..=4, 0i64..=3).prop_flat_map(|(n, q)| {
        proptest::collection::vec(-3i64..4, n * n * (n * q as usize + 6)).prop_map(move |v| {
            let len = n * q as usize + 6;
            let coeffs: Vec<Matrix> = (0..len)
                .map(|t| Matrix::from_fn(n, n, |i, j| Scalar::from_int(v[t * n * n + i * n + j])))
                .collect();
            SystemJet::new(n, -q - 1, coeffs, -q - 1 + len as i64 - 1)
        })
    })
}

fn trs_shape(b: &SystemJet) -> bool {
    let Some(q) = b.poincare_rank() else { return true };
    let n = b.dim();
    let d: Vec<Matrix> = (0..q).map(|l| b.normalized(q, l)).collect();
    if !d.iter().all(|x| x.is_diagonal()) {
        return false;
    }
    let c = b.normalized(q, q);
    (0..n).all(|u| (0..n).all(|v| c[(u, v)].is_zero() || d.iter().all(|x| x[(u, u)] == x[(v, v)])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complex_rank0_replays_to_form(a in arb_system()) {
        let r = match trs_rank0(&a) {
            Ok(r) => r,
            Err(turrittin_core::Error::UnsupportedTower(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        prop_assert!(r.chain.apply(&a).unwrap().agrees_with(&r.system));
        prop_assert!(trs_shape(&r.system), "{:?}", r.system);
        prop_assert!(r.system.order() >= -1);
        for l in &r.loops {
            for w in l.windows(2) {
                prop_assert!(w[1] < w[0], "measure {:?}", l);
            }
            prop_assert!(l.len() <= 10 * a.dim());
        }
    }

    #[test]
    fn real_rank0_stays_real(a in arb_system()) {
        let r = match rtrs_rank0(&a) {
            Ok(r) => r,
            Err(turrittin_core::Error::UnsupportedTower(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        for s in &r.chain.steps {
            match s {
                TransformStep::ConstantRegular(p) => prop_assert!(p.is_real()),
                TransformStep::RegularPolynomial(p) => prop_assert!(p.coeffs().iter().all(|c| c.is_real())),
                _ => {}
            }
        }
        prop_assert!(r.system.order() >= -1);
        let layout = real_layout(&r.system, r.rank);
        let first_pair = layout.iter().position(|u| matches!(u, Unit::Pair(_))).unwrap_or(layout.len());
        prop_assert!(layout[first_pair..].iter().all(|u| matches!(u, Unit::Pair(_))));
    }
}
