//! Distances between Hermitian positive definite covariance matrices, used
//! as the radiometric similarity input of the bilateral weights.
//!
//! Three choices are supported: the symmetrized Kullback-Leibler divergence
//! of the underlying zero-mean complex Gaussians (a trace expression of the
//! two covariances and their inverses), the affine-invariant geodesic
//! distance on the Hermitian positive definite cone, and the cheaper
//! log-Euclidean distance. The two geodesic distances behave like the
//! logarithm of a ratio while the Kullback-Leibler divergence behaves like a
//! ratio plus its inverse, so they need different radiometric scales.
//!
//! All transforms a distance needs per pixel (inverse or logarithm) are
//! cached once per iteration in a [`PreparedPixel`] and reused across every
//! window overlapping that pixel.

use crate::error::{Error, Result};
use crate::hermitian::{CMat3, EigenSystem, HermitianMat, DIM, OFF_DIM};

/// Which matrix distance drives the radiometric kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceKind {
    KullbackLeibler,
    AffineInvariant,
    LogEuclidean,
}

impl DistanceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceKind::KullbackLeibler => "kl",
            DistanceKind::AffineInvariant => "ai",
            DistanceKind::LogEuclidean => "le",
        }
    }

    pub fn parse(s: &str) -> Result<DistanceKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kl" => Ok(DistanceKind::KullbackLeibler),
            "ai" => Ok(DistanceKind::AffineInvariant),
            "le" => Ok(DistanceKind::LogEuclidean),
            other => Err(Error::InvalidConfig(format!(
                "unknown distance '{other}' (expected kl, ai or le)"
            ))),
        }
    }
}

/// `Tr(A B)` for Hermitian `A`, `B` from the canonical halves; the product
/// trace of two Hermitian matrices is real.
#[inline]
pub fn trace_product(a: &HermitianMat, b: &HermitianMat) -> f64 {
    let mut t = 0.0;
    for i in 0..DIM {
        t += a.diag()[i] * b.diag()[i];
    }
    for k in 0..OFF_DIM {
        let x = a.off()[k];
        let y = b.off()[k];
        t += 2.0 * (x.re * y.re + x.im * y.im);
    }
    t
}

/// Symmetrized Kullback-Leibler divergence between the zero-mean complex
/// Gaussians with covariances `a` and `b`:
/// `1/2 Tr(a^-1 b + b^-1 a) - d`. The inverses are supplied by the caller
/// (cached per pixel by the filter).
#[inline]
pub fn d_kl(a: &HermitianMat, inv_a: &HermitianMat, b: &HermitianMat, inv_b: &HermitianMat) -> f64 {
    let _ = a; // the trace form only consumes the partner's inverse
    (0.5 * (trace_product(inv_a, b) + trace_product(inv_b, a)) - DIM as f64).max(0.0)
}

/// Affine-invariant geodesic distance
/// `|| log(a^{-1/2} b a^{-1/2}) ||_F`.
///
/// The congruence-transformed matrix is re-hermitianized before the
/// logarithm so rounding asymmetry cannot leak into the eigensolve.
pub fn d_ai(a: &HermitianMat, b: &HermitianMat) -> Result<f64> {
    let inv_sqrt = a.inv_sqrt_full()?;
    d_ai_prepared(&inv_sqrt, b)
}

/// Affine-invariant distance with the first operand's inverse square root
/// already computed (the filter computes it once per window center).
pub fn d_ai_prepared(inv_sqrt_a: &CMat3, b: &HermitianMat) -> Result<f64> {
    let congruence = inv_sqrt_a.mul(&b.to_full()).mul(inv_sqrt_a);
    let herm = HermitianMat::hermitianize(&congruence);
    let values = herm.eigenvalues()?;
    let lambda_min = values[DIM - 1];
    if lambda_min <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: lambda_min,
        });
    }
    let mut sum = 0.0;
    for v in values {
        let l = v.ln();
        sum += l * l;
    }
    Ok(sum.sqrt())
}

/// Log-Euclidean distance `|| log a - log b ||_F`; the operands are the
/// matrix logarithms, cached per pixel by the filter.
#[inline]
pub fn d_le(log_a: &HermitianMat, log_b: &HermitianMat) -> f64 {
    let mut s = 0.0;
    for i in 0..DIM {
        let d = log_a.diag()[i] - log_b.diag()[i];
        s += d * d;
    }
    for k in 0..OFF_DIM {
        s += 2.0 * (log_a.off()[k] - log_b.off()[k]).norm_sqr();
    }
    s.sqrt()
}

/// Per-pixel cache of the transforms the selected distance needs, plus the
/// rank-deficiency state that guards them. Built once per filter iteration
/// and read concurrently by every overlapping window.
#[derive(Clone, Debug)]
pub struct PreparedPixel {
    pub sigma: HermitianMat,
    /// Present iff the distance is affine-invariant or log-Euclidean and the
    /// pixel is full rank.
    pub log_sigma: Option<HermitianMat>,
    /// Present iff the distance is Kullback-Leibler and the pixel is full
    /// rank.
    pub inv_sigma: Option<HermitianMat>,
    /// `lambda_min / lambda_max`; zero (or negative) for degenerate input.
    pub recip_condition: f64,
    /// `recip_condition < threshold`: excluded from averages, left
    /// unfiltered when central.
    pub rank_deficient: bool,
}

/// Build the per-pixel cache for one matrix. Rank deficiency is a state,
/// not an error: a deficient pixel simply carries no cached transforms.
pub fn prepare_pixel(
    sigma: &HermitianMat,
    kind: DistanceKind,
    cond_threshold: f64,
) -> Result<PreparedPixel> {
    Ok(prepare_pixel_with_eig(sigma, kind, cond_threshold)?.0)
}

/// Same as [`prepare_pixel`] but also hands back the eigendecomposition so
/// the filter can derive the inverse square root without a second solve.
pub(crate) fn prepare_pixel_with_eig(
    sigma: &HermitianMat,
    kind: DistanceKind,
    cond_threshold: f64,
) -> Result<(PreparedPixel, Option<EigenSystem>)> {
    let eig = sigma.eig()?;
    let lambda_max = eig.values[0];
    let lambda_min = eig.values[DIM - 1];
    let recip_condition = if lambda_max <= 0.0 {
        0.0
    } else {
        lambda_min / lambda_max
    };
    let rank_deficient = recip_condition < cond_threshold;

    let mut prepared = PreparedPixel {
        sigma: *sigma,
        log_sigma: None,
        inv_sigma: None,
        recip_condition,
        rank_deficient,
    };
    if rank_deficient {
        return Ok((prepared, None));
    }
    match kind {
        DistanceKind::AffineInvariant | DistanceKind::LogEuclidean => {
            prepared.log_sigma = Some(eig.reconstruct(f64::ln));
        }
        DistanceKind::KullbackLeibler => {
            prepared.inv_sigma = Some(sigma.inv()?);
        }
    }
    Ok((prepared, Some(eig)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn zone(i: usize) -> HermitianMat {
        crate::constants::zone_matrices()[i]
    }

    #[test]
    fn kl_identical_is_zero() {
        let m = zone(0);
        let inv = m.inv().unwrap();
        assert!(d_kl(&m, &inv, &m, &inv).abs() < 1e-12);
    }

    #[test]
    fn kl_scaled_identity_closed_form() {
        let a = HermitianMat::identity();
        let b = HermitianMat::identity().scale(2.0);
        let d = d_kl(&a, &a.inv().unwrap(), &b, &b.inv().unwrap());
        // 1/2 Tr(2I + I/2) - 3 = 0.75
        assert_relative_eq!(d, 0.75, epsilon = 1e-14);
    }

    #[test]
    fn kl_zone_pair_matches_frozen_reference() {
        let a = zone(0);
        let b = zone(3);
        let d = d_kl(&a, &a.inv().unwrap(), &b, &b.inv().unwrap());
        assert_relative_eq!(d, 4.862383473869099, max_relative = 1e-10);
    }

    #[test]
    fn ai_identical_is_zero() {
        let m = zone(2);
        assert!(d_ai(&m, &m).unwrap() < 1e-12);
    }

    #[test]
    fn ai_commuting_closed_form() {
        let a = HermitianMat::identity();
        let b = HermitianMat::identity().scale((2.0f64).exp());
        let d = d_ai(&a, &b).unwrap();
        assert_relative_eq!(d, 2.0 * 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn ai_zone_pair_matches_frozen_reference() {
        let d = d_ai(&zone(0), &zone(3)).unwrap();
        assert_relative_eq!(d, 2.645230655662295, max_relative = 1e-10);
    }

    #[test]
    fn le_identical_and_commuting() {
        let log_m = zone(1).log().unwrap();
        assert!(d_le(&log_m, &log_m) < 1e-14);

        let log_a = HermitianMat::identity().log().unwrap();
        let log_b = HermitianMat::identity()
            .scale((2.0f64).exp())
            .log()
            .unwrap();
        assert_relative_eq!(d_le(&log_a, &log_b), 2.0 * 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn le_zone_pair_matches_frozen_reference() {
        let d = d_le(&zone(0).log().unwrap(), &zone(3).log().unwrap());
        assert_relative_eq!(d, 2.537618304322121, max_relative = 1e-10);
    }

    #[test]
    fn prepare_rank_deficient_skips_transforms() {
        let sigma = HermitianMat::from_diag([1.0, 0.0, 0.0]);
        let p = prepare_pixel(&sigma, DistanceKind::AffineInvariant, 1e-6).unwrap();
        assert!(p.rank_deficient);
        assert!(p.log_sigma.is_none() && p.inv_sigma.is_none());
        assert_eq!(p.recip_condition, 0.0);
    }

    #[test]
    fn prepare_identity() {
        let p = prepare_pixel(&HermitianMat::identity(), DistanceKind::KullbackLeibler, 1e-6)
            .unwrap();
        assert!(!p.rank_deficient);
        assert_relative_eq!(p.recip_condition, 1.0, epsilon = 1e-12);
        assert!(p.inv_sigma.is_some() && p.log_sigma.is_none());
    }

    #[test]
    fn prepare_caches_log_matching_direct_computation() {
        let sigma = zone(2);
        let p = prepare_pixel(&sigma, DistanceKind::LogEuclidean, 1e-6).unwrap();
        assert!(!p.rank_deficient);
        let cached = p.log_sigma.unwrap();
        let direct = sigma.log().unwrap();
        assert!((cached - direct).frobenius_norm() < 1e-12 * direct.frobenius_norm().max(1.0));
    }

    #[test]
    fn scaling_dynamics_differ() {
        // for isotropic matrices aI vs bI the KL divergence grows with the
        // ratio plus its inverse, the geodesic distances with |log ratio|
        let a = HermitianMat::identity();
        let b = HermitianMat::identity().scale(16.0);
        let inv_a = a.inv().unwrap();
        let inv_b = b.inv().unwrap();
        let kl = d_kl(&a, &inv_a, &b, &inv_b);
        let expected_kl = 0.5 * 3.0 * (16.0 + 1.0 / 16.0) - 3.0;
        assert_relative_eq!(kl, expected_kl, max_relative = 1e-12);
        let ai = d_ai(&a, &b).unwrap();
        assert_relative_eq!(ai, 3f64.sqrt() * 16f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn kl_symmetry_exact() {
        let a = zone(1);
        let b = zone(2);
        let (ia, ib) = (a.inv().unwrap(), b.inv().unwrap());
        assert_eq!(d_kl(&a, &ia, &b, &ib), d_kl(&b, &ib, &a, &ia));
    }

    #[test]
    fn ai_hermitianize_guard_handles_asymmetric_rounding() {
        // a deliberately lopsided pair still yields a symmetric distance
        let a = zone(0).scale(1e-3);
        let b = zone(1).scale(1e3);
        let d1 = d_ai(&a, &b).unwrap();
        let d2 = d_ai(&b, &a).unwrap();
        assert_relative_eq!(d1, d2, max_relative = 1e-12);
        assert!(d1 > 0.0);
    }

    #[test]
    fn prepared_pixel_offdiag_storage_is_consistent() {
        let m = HermitianMat::new(
            [2.0, 3.0, 4.0],
            [
                Complex64::new(0.5, -0.25),
                Complex64::new(0.1, 0.2),
                Complex64::new(-0.3, 0.05),
            ],
        );
        let p = prepare_pixel(&m, DistanceKind::LogEuclidean, 1e-6).unwrap();
        assert_eq!(p.sigma, m);
    }
}
