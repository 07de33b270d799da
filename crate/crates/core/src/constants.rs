//! Default filter parameters and the class matrices of the built-in scenes.
//!
//! Everything tunable from the command line has its default pinned here so
//! the library, the CLI and the validation suite agree on one set of values.

use num_complex::Complex64;

use crate::distances::DistanceKind;
use crate::field::Rect;
use crate::hermitian::HermitianMat;

/// Spatial kernel scale in pixels, used for every distance.
pub const GAMMA_S_DEFAULT: f64 = 2.2;

/// Full window edge length (odd); half-width is `(WINDOW_DEFAULT - 1) / 2`.
pub const WINDOW_DEFAULT: usize = 11;

/// Radiometric kernel scale for the Riemannian distances (affine-invariant
/// and log-Euclidean).
pub const GAMMA_R_RIEMANNIAN: f64 = 1.33;

/// Radiometric kernel scale for the symmetrized Kullback-Leibler divergence,
/// which has a different dynamic range than the log-based distances.
pub const GAMMA_R_KL: f64 = 3.11;

/// Number of filter iterations.
pub const N_ITER_DEFAULT: usize = 4;

/// Reciprocal-condition-number threshold below which a matrix is treated as
/// rank deficient and excluded from averaging.
pub const COND_THRESHOLD_DEFAULT: f64 = 1e-6;

/// Nominal look count of the simulated multi-look scenes.
pub const LOOKS_DEFAULT: u32 = 4;

/// Default radiometric scale for a distance kind.
pub fn gamma_r_default(kind: DistanceKind) -> f64 {
    match kind {
        DistanceKind::KullbackLeibler => GAMMA_R_KL,
        DistanceKind::AffineInvariant | DistanceKind::LogEuclidean => GAMMA_R_RIEMANNIAN,
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Mean coherency matrices of four homogeneous land-cover areas, used as the
/// class matrices of the default synthetic scene.
pub fn zone_matrices() -> [HermitianMat; 4] {
    [
        HermitianMat::new(
            [8.03, 2.64, 0.55],
            [c(-2.19, -2.23), c(-0.17, -0.15), c(0.11, -0.03)],
        ),
        HermitianMat::new(
            [75.21, 48.03, 45.82],
            [c(4.86, 3.24), c(2.30, 0.22), c(-0.32, -1.69)],
        ),
        HermitianMat::new(
            [13.71, 13.82, 1.55],
            [c(2.41, 5.86), c(-0.25, -0.29), c(0.89, -0.16)],
        ),
        HermitianMat::new(
            [25.71, 3.79, 3.40],
            [c(2.67, -3.48), c(-2.94, -1.56), c(-0.57, -0.86)],
        ),
    ]
}

/// Stand-in coherency matrix for the deterministic building-layover lines of
/// the default scene: dominant double bounce (large `T22`), full rank, and
/// bright relative to the distributed classes the way building layover is
/// against clutter. The exact values are a placeholder.
pub fn layover_matrix() -> HermitianMat {
    HermitianMat::new(
        [80.0, 800.0, 20.0],
        [c(60.0, -40.0), c(10.0, 6.0), c(40.0, -20.0)],
    )
}

/// Edge length of the default synthetic scene.
pub const DEFAULT_SCENE_SIZE: usize = 512;

/// Homogeneous evaluation rectangles of the default scene, one per zone,
/// chosen well inside the zone interiors.
pub fn default_zone_rects() -> [Rect; 4] {
    [
        Rect::new(40, 96, 128, 128),  // zone 0, left curved region
        Rect::new(320, 320, 128, 128), // zone 1, right curved region
        Rect::new(40, 360, 80, 120),  // zone 2, triangle
        Rect::new(336, 112, 64, 64),  // zone 3, diamond
    ]
}
