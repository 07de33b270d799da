//! Iterative bilateral filtering of covariance rasters, plus the boxcar
//! baseline.
//!
//! Each output pixel is a convex combination of the window's matrices with
//! weights `f_s(||x_i - x_0||) * f_r(d(Sigma_i, Sigma_0))`: a spatial
//! Gaussian times a radiometric Gaussian of the selected matrix distance.
//! The noisy multi-look image serves as the initialization and the filter is
//! iterated, computing each iteration's weights from the previous iterate.
//!
//! Rank-deficient matrices (reciprocal condition number below the threshold)
//! break the distances, so they are excluded: as a neighbor their weight is
//! zero, as a window center the pixel is left unfiltered. The center's own
//! raw weight is replaced by the maximum raw weight among its neighbors
//! before normalization, so a noisy center cannot veto its own smoothing.
//!
//! Within an iteration the output plane is a parallel map over pixels
//! reading an immutable input plane; per-pixel summation order is fixed, so
//! results are bit-identical for any worker count.

use rayon::prelude::*;

use crate::constants;
use crate::distances::{
    d_ai_prepared, d_kl, d_le, prepare_pixel_with_eig, DistanceKind, PreparedPixel,
};
use crate::error::{Error, Result};
use crate::field::CovarianceField;
use crate::hermitian::{CMat3, HermitianMat};

/// Radially symmetric Gaussian kernel `exp(-(u/gamma)^2)`, equal to 1 at
/// `u = 0` and monotonically decaying.
#[inline]
pub fn gaussian_kernel(u: f64, gamma: f64) -> f64 {
    let t = u / gamma;
    (-t * t).exp()
}

/// Filter parameters. `window_half` of `h` means a `(2h+1) x (2h+1)` window.
#[derive(Clone, Copy, Debug)]
pub struct FilterConfig {
    /// Spatial kernel scale in pixels.
    pub gamma_s: f64,
    /// Radiometric kernel scale in distance units.
    pub gamma_r: f64,
    pub window_half: usize,
    pub n_iter: usize,
    pub kind: DistanceKind,
    /// Reciprocal-condition threshold flagging rank-deficient matrices.
    pub cond_threshold: f64,
}

impl FilterConfig {
    /// Standard parameters for a distance kind: an 11x11 window with
    /// `gamma_s = 2.2`, four iterations, and the radiometric scale matched
    /// to the distance's dynamics (1.33 for the Riemannian distances, 3.11
    /// for Kullback-Leibler).
    pub fn defaults_for(kind: DistanceKind) -> FilterConfig {
        FilterConfig {
            gamma_s: constants::GAMMA_S_DEFAULT,
            gamma_r: constants::gamma_r_default(kind),
            window_half: (constants::WINDOW_DEFAULT - 1) / 2,
            n_iter: constants::N_ITER_DEFAULT,
            kind,
            cond_threshold: constants::COND_THRESHOLD_DEFAULT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        // NaN parameters must fail too, hence the negated comparisons
        let positive = |v: f64| v > 0.0;
        if !positive(self.gamma_s) {
            return Err(Error::InvalidConfig(format!(
                "gamma_s must be positive, got {}",
                self.gamma_s
            )));
        }
        if !positive(self.gamma_r) {
            return Err(Error::InvalidConfig(format!(
                "gamma_r must be positive, got {}",
                self.gamma_r
            )));
        }
        if self.window_half < 1 {
            return Err(Error::InvalidConfig("window half-width must be >= 1".into()));
        }
        if self.n_iter < 1 {
            return Err(Error::InvalidConfig("iteration count must be >= 1".into()));
        }
        if !positive(self.cond_threshold) {
            return Err(Error::InvalidConfig(format!(
                "condition threshold must be positive, got {}",
                self.cond_threshold
            )));
        }
        Ok(())
    }
}

/// Precomputed spatial weights of a `(2h+1) x (2h+1)` window: 1 at the
/// center, radially symmetric, in `(0, 1]`.
#[derive(Clone, Debug)]
pub struct SpatialKernel {
    half: usize,
    weights: Vec<f64>,
}

impl SpatialKernel {
    pub fn new(half: usize, gamma_s: f64) -> SpatialKernel {
        let edge = 2 * half + 1;
        let mut weights = Vec::with_capacity(edge * edge);
        for dy in -(half as i64)..=(half as i64) {
            for dx in -(half as i64)..=(half as i64) {
                let dist = ((dx * dx + dy * dy) as f64).sqrt();
                weights.push(gaussian_kernel(dist, gamma_s));
            }
        }
        SpatialKernel { half, weights }
    }

    pub fn half(&self) -> usize {
        self.half
    }

    /// Weight at offset `(dy, dx)` from the center, each in `[-half, half]`.
    #[inline]
    pub fn get(&self, dy: i64, dx: i64) -> f64 {
        let edge = 2 * self.half + 1;
        let row = (dy + self.half as i64) as usize;
        let col = (dx + self.half as i64) as usize;
        self.weights[row * edge + col]
    }
}

#[inline]
fn radiometric_distance(
    kind: DistanceKind,
    center: &PreparedPixel,
    center_inv_sqrt: Option<&CMat3>,
    neighbor: &PreparedPixel,
) -> Result<f64> {
    match kind {
        DistanceKind::KullbackLeibler => {
            let inv_c = center.inv_sigma.as_ref().expect("inverse cached for KL");
            let inv_n = neighbor.inv_sigma.as_ref().expect("inverse cached for KL");
            Ok(d_kl(&center.sigma, inv_c, &neighbor.sigma, inv_n))
        }
        DistanceKind::LogEuclidean => {
            let log_c = center.log_sigma.as_ref().expect("log cached for LE");
            let log_n = neighbor.log_sigma.as_ref().expect("log cached for LE");
            Ok(d_le(log_c, log_n))
        }
        DistanceKind::AffineInvariant => {
            let s = center_inv_sqrt.expect("inverse square root prepared for AI");
            d_ai_prepared(s, &neighbor.sigma)
        }
    }
}

/// Normalized bilateral weights for one window.
///
/// `window` lists the surviving (border-clipped) window pixels as
/// `(dy, dx, prepared)` offsets from the center; the entry at `(0, 0)` is
/// the center itself. The center must not be rank-deficient (the filter
/// leaves such pixels unfiltered instead of weighting them). Rank-deficient
/// neighbors get raw weight zero; the center's raw weight is the maximum
/// raw weight among its neighbors (1 if every neighbor is rank-deficient).
/// The returned weights are aligned with `window` and sum to 1.
pub fn bilateral_weights(
    window: &[(i64, i64, &PreparedPixel)],
    center: &PreparedPixel,
    kernel: &SpatialKernel,
    config: &FilterConfig,
) -> Result<Vec<f64>> {
    if center.rank_deficient {
        return Err(Error::InvalidConfig(
            "bilateral weights are undefined for a rank-deficient center".into(),
        ));
    }
    let inv_sqrt = if config.kind == DistanceKind::AffineInvariant {
        Some(center.sigma.inv_sqrt_full()?)
    } else {
        None
    };
    let mut raw = vec![0.0; window.len()];
    let mut center_slot = None;
    for (i, (dy, dx, neighbor)) in window.iter().enumerate() {
        if *dy == 0 && *dx == 0 {
            center_slot = Some(i);
            continue;
        }
        if neighbor.rank_deficient {
            continue;
        }
        let d = radiometric_distance(config.kind, center, inv_sqrt.as_ref(), neighbor)?;
        raw[i] = kernel.get(*dy, *dx) * gaussian_kernel(d, config.gamma_r);
    }
    let center_slot = center_slot.ok_or_else(|| {
        Error::InvalidConfig("window does not contain the (0, 0) center entry".into())
    })?;

    let mut max_neighbor = 0.0f64;
    for (i, &w) in raw.iter().enumerate() {
        if i != center_slot && w > max_neighbor {
            max_neighbor = w;
        }
    }
    // normalize in units of the largest raw weight; a window of uniformly
    // underflowing weights would otherwise produce a subnormal sum
    let max_raw = if max_neighbor > 0.0 { max_neighbor } else { 1.0 };
    raw[center_slot] = max_raw;
    let mut sum = 0.0;
    for w in raw.iter_mut() {
        *w /= max_raw;
        sum += *w;
    }
    for w in raw.iter_mut() {
        *w /= sum;
    }
    Ok(raw)
}

struct PreparedPlane {
    pixels: Vec<PreparedPixel>,
    /// Inverse square roots for the affine-invariant distance, one per
    /// full-rank pixel; all None for the other distances.
    inv_sqrts: Vec<Option<CMat3>>,
}

fn prepare_plane(input: &CovarianceField, config: &FilterConfig) -> Result<PreparedPlane> {
    let want_inv_sqrt = config.kind == DistanceKind::AffineInvariant;
    let width = input.width;
    let entries: Result<Vec<(PreparedPixel, Option<CMat3>)>> = input
        .pixels
        .par_iter()
        .enumerate()
        .map(|(idx, sigma)| {
            let (prepared, eig) = prepare_pixel_with_eig(sigma, config.kind, config.cond_threshold)
                .map_err(|e| e.at_pixel(idx % width, idx / width))?;
            let inv_sqrt = if want_inv_sqrt && !prepared.rank_deficient {
                let eig = eig.expect("eigensystem present for full-rank pixel");
                Some(eig.reconstruct(|l| 1.0 / l.sqrt()).to_full())
            } else {
                None
            };
            Ok((prepared, inv_sqrt))
        })
        .collect();
    let (pixels, inv_sqrts) = entries?.into_iter().unzip();
    Ok(PreparedPlane { pixels, inv_sqrts })
}

/// One synchronous filter pass: every output pixel is computed from the
/// same input plane (double-buffered update). Windows are clipped at the
/// borders and the weights renormalized over the surviving support.
pub fn filter_iteration(input: &CovarianceField, config: &FilterConfig) -> Result<CovarianceField> {
    config.validate()?;
    let plane = prepare_plane(input, config)?;
    let kernel = SpatialKernel::new(config.window_half, config.gamma_s);
    let width = input.width;
    let height = input.height;
    let half = config.window_half as i64;
    let window_cap = (2 * config.window_half + 1).pow(2);

    let mut out_pixels = vec![HermitianMat::zero(); input.pixels.len()];
    out_pixels
        .par_chunks_mut(width.max(1))
        .enumerate()
        .try_for_each(|(y, row)| -> Result<()> {
            let mut slots: Vec<(usize, f64)> = Vec::with_capacity(window_cap);
            for (x, out) in row.iter_mut().enumerate() {
                let center_idx = y * width + x;
                let center = &plane.pixels[center_idx];
                if center.rank_deficient {
                    // left unfiltered, bit-for-bit
                    *out = input.pixels[center_idx];
                    continue;
                }
                let inv_sqrt = plane.inv_sqrts[center_idx].as_ref();

                slots.clear();
                let mut center_slot = 0usize;
                let mut max_neighbor = 0.0f64;
                let y0 = (y as i64 - half).max(0);
                let y1 = (y as i64 + half).min(height as i64 - 1);
                let x0 = (x as i64 - half).max(0);
                let x1 = (x as i64 + half).min(width as i64 - 1);
                for ny in y0..=y1 {
                    for nx in x0..=x1 {
                        let idx = ny as usize * width + nx as usize;
                        if idx == center_idx {
                            center_slot = slots.len();
                            slots.push((idx, 0.0));
                            continue;
                        }
                        let neighbor = &plane.pixels[idx];
                        if neighbor.rank_deficient {
                            slots.push((idx, 0.0));
                            continue;
                        }
                        let d = radiometric_distance(config.kind, center, inv_sqrt, neighbor)
                            .map_err(|e| e.at_pixel(x, y))?;
                        let w = kernel.get(ny - y as i64, nx - x as i64)
                            * gaussian_kernel(d, config.gamma_r);
                        if w > max_neighbor {
                            max_neighbor = w;
                        }
                        slots.push((idx, w));
                    }
                }
                // normalize in units of the largest raw weight so that a
                // window of uniformly underflowing weights (a badly
                // conditioned center far from every neighbor) cannot
                // produce a subnormal sum and overflow the division
                let max_raw = if max_neighbor > 0.0 { max_neighbor } else { 1.0 };
                slots[center_slot].1 = max_raw;
                let mut sum = 0.0;
                for (_, w) in slots.iter_mut() {
                    *w /= max_raw;
                    sum += *w;
                }
                let inv_sum = 1.0 / sum;
                let mut acc = HermitianMat::zero();
                for (idx, w) in &slots {
                    if *w > 0.0 {
                        acc.accumulate_scaled(&input.pixels[*idx], w * inv_sum);
                    }
                }
                *out = acc;
            }
            Ok(())
        })?;

    CovarianceField::from_pixels(width, height, input.looks, input.basis, out_pixels)
}

/// Run the iterative filter: the multi-look input is the initialization and
/// each iteration recomputes weights from the previous iterate.
pub fn run_filter(input: &CovarianceField, config: &FilterConfig) -> Result<CovarianceField> {
    config.validate()?;
    let mut current = filter_iteration(input, config)?;
    for _ in 1..config.n_iter {
        current = filter_iteration(&current, config)?;
    }
    Ok(current)
}

/// Unweighted mean over a `size x size` window, border-clipped. The
/// reference smoothing baseline.
pub fn boxcar(input: &CovarianceField, size: usize) -> Result<CovarianceField> {
    if size % 2 == 0 || size == 0 {
        return Err(Error::InvalidConfig(format!(
            "boxcar window must be odd, got {size}"
        )));
    }
    let half = (size / 2) as i64;
    let width = input.width;
    let height = input.height;
    let mut out_pixels = vec![HermitianMat::zero(); input.pixels.len()];
    out_pixels
        .par_chunks_mut(width.max(1))
        .enumerate()
        .for_each(|(y, row)| {
            for (x, out) in row.iter_mut().enumerate() {
                let y0 = (y as i64 - half).max(0);
                let y1 = (y as i64 + half).min(height as i64 - 1);
                let x0 = (x as i64 - half).max(0);
                let x1 = (x as i64 + half).min(width as i64 - 1);
                let count = ((y1 - y0 + 1) * (x1 - x0 + 1)) as f64;
                let inv = 1.0 / count;
                let mut acc = HermitianMat::zero();
                for ny in y0..=y1 {
                    for nx in x0..=x1 {
                        acc.accumulate_scaled(
                            &input.pixels[ny as usize * width + nx as usize],
                            inv,
                        );
                    }
                }
                *out = acc;
            }
        });
    CovarianceField::from_pixels(width, height, input.looks, input.basis, out_pixels)
}
