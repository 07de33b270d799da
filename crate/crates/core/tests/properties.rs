//! Property tests over randomized Hermitian positive definite matrices.

use num_complex::Complex64;
use proptest::prelude::*;

use polsar_core::distances::{d_ai, d_kl, d_le};
use polsar_core::hermitian::{CMat3, HermitianMat, DIM};

/// Strategy: a well-conditioned random HPD matrix built as `G G^H + r I`.
fn hpd() -> impl Strategy<Value = HermitianMat> {
    let entry = -2.0f64..2.0f64;
    (
        proptest::array::uniform9(entry.clone()),
        proptest::array::uniform9(entry),
        0.05f64..2.0f64,
    )
        .prop_map(|(re, im, ridge)| {
            let mut g = CMat3::zero();
            for r in 0..DIM {
                for c in 0..DIM {
                    g.0[r][c] = Complex64::new(re[r * DIM + c], im[r * DIM + c]);
                }
            }
            let mut w = HermitianMat::zero();
            for c in 0..DIM {
                w.accumulate_outer(&g.column(c), 1.0);
            }
            w + HermitianMat::identity().scale(ridge)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eig_reconstructs_and_is_positive(m in hpd()) {
        let eig = m.eig().unwrap();
        prop_assert!(eig.values[2] > 0.0);
        prop_assert!(eig.values[0] >= eig.values[1] && eig.values[1] >= eig.values[2]);
        let rebuilt = eig.reconstruct(|l| l);
        let err = (rebuilt - m).frobenius_norm() / m.frobenius_norm();
        prop_assert!(err < 1e-10, "reconstruction error {}", err);
    }

    #[test]
    fn log_roundtrips_through_exp(m in hpd()) {
        let log = m.log().unwrap();
        let back = log.eig().unwrap().reconstruct(f64::exp);
        let err = (back - m).frobenius_norm() / m.frobenius_norm();
        prop_assert!(err < 1e-10, "roundtrip error {}", err);
    }

    #[test]
    fn cholesky_factor_reconstructs(m in hpd()) {
        let l = m.cholesky().unwrap();
        let rebuilt = HermitianMat::hermitianize(&l.mul(&l.adjoint()));
        let err = (rebuilt - m).frobenius_norm() / m.frobenius_norm();
        prop_assert!(err < 1e-10, "A A^H error {}", err);
    }

    #[test]
    fn inverse_is_involutive(m in hpd()) {
        let back = m.inv().unwrap().inv().unwrap();
        let err = (back - m).frobenius_norm() / m.frobenius_norm();
        prop_assert!(err < 1e-9, "inv(inv(m)) error {}", err);
    }

    #[test]
    fn condition_number_is_scale_invariant(m in hpd(), c in 0.001f64..1000.0) {
        let k1 = m.condition_number().unwrap();
        let k2 = m.scale(c).condition_number().unwrap();
        prop_assert!((k1 - k2).abs() <= 1e-12 * k1);
    }

    #[test]
    fn hermitianize_is_idempotent(m in hpd()) {
        let once = HermitianMat::hermitianize(&m.to_full());
        prop_assert_eq!(once, m);
    }
}

proptest! {
    // distances are costlier; fewer cases cover the axioms well
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distances_are_positive_and_symmetric(a in hpd(), b in hpd()) {
        prop_assume!((a - b).frobenius_norm() > 1e-9);
        let (inv_a, inv_b) = (a.inv().unwrap(), b.inv().unwrap());
        let kl = d_kl(&a, &inv_a, &b, &inv_b);
        prop_assert!(kl > 0.0);
        prop_assert_eq!(kl, d_kl(&b, &inv_b, &a, &inv_a));

        let (log_a, log_b) = (a.log().unwrap(), b.log().unwrap());
        let le = d_le(&log_a, &log_b);
        prop_assert!(le > 0.0);
        prop_assert_eq!(le, d_le(&log_b, &log_a));

        let ai = d_ai(&a, &b).unwrap();
        prop_assert!(ai > 0.0);
        let ai_rev = d_ai(&b, &a).unwrap();
        prop_assert!((ai - ai_rev).abs() <= 1e-12 * ai.max(1.0));
    }

    #[test]
    fn geodesic_triangle_inequalities(a in hpd(), b in hpd(), c in hpd()) {
        let ai_ac = d_ai(&a, &c).unwrap();
        let ai_ab = d_ai(&a, &b).unwrap();
        let ai_bc = d_ai(&b, &c).unwrap();
        prop_assert!(ai_ac <= ai_ab + ai_bc + 1e-12);

        let (la, lb, lc) = (a.log().unwrap(), b.log().unwrap(), c.log().unwrap());
        prop_assert!(d_le(&la, &lc) <= d_le(&la, &lb) + d_le(&lb, &lc) + 1e-12);
    }
}
