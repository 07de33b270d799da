//! Polarimetric transforms: lexicographic/Pauli basis change, multi-looking,
//! the Cloude-Pottier H/alpha decomposition, Pauli RGB rendering and the
//! H/alpha-plane density histogram.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Basis, CovarianceField};
use crate::hermitian::{CMat3, HermitianMat};

/// Unitary change of basis mapping lexicographic target vectors to Pauli
/// ones: `k_p = U k_l`, hence `T = U C U^H`.
fn pauli_basis_matrix() -> CMat3 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = CMat3::zero();
    u.0[0][0] = Complex64::new(s, 0.0);
    u.0[0][2] = Complex64::new(s, 0.0);
    u.0[1][0] = Complex64::new(s, 0.0);
    u.0[1][2] = Complex64::new(-s, 0.0);
    u.0[2][1] = Complex64::new(1.0, 0.0);
    u
}

/// Coherency matrix `T = U C U^H` from a lexicographic covariance `C`.
pub fn pauli_from_lexicographic(c: &HermitianMat) -> HermitianMat {
    let u = pauli_basis_matrix();
    HermitianMat::hermitianize(&u.mul(&c.to_full()).mul(&u.adjoint()))
}

/// Lexicographic covariance `C = U^H T U` from a coherency matrix `T`.
pub fn lexicographic_from_pauli(t: &HermitianMat) -> HermitianMat {
    let u = pauli_basis_matrix();
    HermitianMat::hermitianize(&u.adjoint().mul(&t.to_full()).mul(&u))
}

/// Convert a whole field to the requested basis (no-op copy if already
/// there).
pub fn convert_basis(field: &CovarianceField, target: Basis) -> CovarianceField {
    if field.basis == target {
        return field.clone();
    }
    let convert = match target {
        Basis::Pauli => pauli_from_lexicographic,
        Basis::Lexicographic => lexicographic_from_pauli,
    };
    let pixels = field.pixels.par_iter().map(convert).collect();
    CovarianceField {
        width: field.width,
        height: field.height,
        looks: field.looks,
        basis: target,
        pixels,
    }
}

/// One pixel of the Cloude-Pottier decomposition: scattering entropy in
/// `[0, 1]` and mean alpha angle in `[0, pi/2]` radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HAlphaPixel {
    pub entropy: f64,
    pub mean_alpha: f64,
}

impl HAlphaPixel {
    pub fn is_valid(&self) -> bool {
        self.entropy.is_finite() && self.mean_alpha.is_finite()
    }

    pub fn invalid() -> Self {
        HAlphaPixel {
            entropy: f64::NAN,
            mean_alpha: f64::NAN,
        }
    }
}

/// H/alpha decomposition of one coherency matrix (Pauli basis).
///
/// Eigen-based: `p_i = lambda_i / sum(lambda)`, `H = -sum p_i log3 p_i`
/// (base-3 logarithm so `H` spans `[0, 1]` for 3x3 matrices, with
/// `0 log 0 = 0`), `alpha_i = arccos |e_i1|` from the modulus of the first
/// Pauli component of eigenvector `i`, and the mean alpha is the
/// `p_i`-weighted average. Tiny negative eigenvalues from rounding are
/// clamped to zero; a non-positive trace is an error.
pub fn h_alpha(t: &HermitianMat) -> Result<HAlphaPixel> {
    let eig = t.eig()?;
    let mut values = eig.values;
    for v in &mut values {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    let ln3 = 3f64.ln();
    let mut entropy = 0.0;
    let mut mean_alpha = 0.0;
    for (i, &l) in values.iter().enumerate() {
        let p = l / total;
        if p > 0.0 {
            entropy -= p * p.ln() / ln3;
            let first = eig.vectors.0[0][i].norm().clamp(0.0, 1.0);
            mean_alpha += p * first.acos();
        }
    }
    Ok(HAlphaPixel {
        entropy: entropy.clamp(0.0, 1.0),
        mean_alpha,
    })
}

/// Raster of H/alpha pixels. Pixels whose decomposition failed (zero-trace
/// matrices in degraded input data) are stored as NaN markers and skipped by
/// the histogram and the zone statistics.
#[derive(Clone, Debug)]
pub struct HAlphaField {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<HAlphaPixel>,
}

impl HAlphaField {
    pub fn valid_count(&self) -> usize {
        self.pixels.iter().filter(|p| p.is_valid()).count()
    }
}

/// Decompose a whole field; lexicographic input is converted to the Pauli
/// basis first.
pub fn decompose_field(field: &CovarianceField) -> HAlphaField {
    let pauli;
    let source = if field.basis == Basis::Pauli {
        field
    } else {
        pauli = convert_basis(field, Basis::Pauli);
        &pauli
    };
    let pixels = source
        .pixels
        .par_iter()
        .map(|t| h_alpha(t).unwrap_or_else(|_| HAlphaPixel::invalid()))
        .collect();
    HAlphaField {
        width: field.width,
        height: field.height,
        pixels,
    }
}

/// False-color pixel: double bounce (`T22`) on red, volume (`T33`) on green,
/// surface (`T11`) on blue. Channels are in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliRgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

/// Display scaling for Pauli RGB rendering: per-channel amplitude clip at a
/// quantile of the image, then gamma mapping `v -> v^(1/gamma)`.
#[derive(Clone, Copy, Debug)]
pub struct RgbScaling {
    /// Amplitude (`sqrt` of power) clip per channel, in R, G, B order.
    pub clip: [f64; 3],
    pub gamma: f64,
}

impl RgbScaling {
    /// Clip each channel at the given quantile of its amplitude
    /// distribution over the field (0.99 is the default rendering choice).
    pub fn from_field(field: &CovarianceField, quantile: f64, gamma: f64) -> RgbScaling {
        let mut clip = [1.0; 3];
        // channel order: R from T22, G from T33, B from T11
        for (slot, diag_idx) in [(0usize, 1usize), (1, 2), (2, 0)] {
            let mut amps: Vec<f64> = field
                .pixels
                .iter()
                .map(|m| m.diag()[diag_idx].max(0.0).sqrt())
                .collect();
            amps.sort_by(|a, b| a.partial_cmp(b).expect("finite amplitudes"));
            if !amps.is_empty() {
                let pos = ((amps.len() - 1) as f64 * quantile.clamp(0.0, 1.0)).round() as usize;
                let v = amps[pos];
                clip[slot] = if v > 0.0 { v } else { 1.0 };
            }
        }
        RgbScaling { clip, gamma }
    }
}

/// Render one coherency matrix to a Pauli RGB pixel.
pub fn pauli_rgb(t: &HermitianMat, scaling: &RgbScaling) -> PauliRgb {
    let channel = |diag_idx: usize, clip: f64| -> f64 {
        let amp = t.diag()[diag_idx].max(0.0).sqrt();
        (amp / clip).min(1.0).powf(1.0 / scaling.gamma)
    };
    PauliRgb {
        r: channel(1, scaling.clip[0]),
        g: channel(2, scaling.clip[1]),
        b: channel(0, scaling.clip[2]),
    }
}

/// Render a whole field.
pub fn render_pauli_rgb(field: &CovarianceField, scaling: &RgbScaling) -> Vec<PauliRgb> {
    field.pixels.iter().map(|t| pauli_rgb(t, scaling)).collect()
}

/// 2-D histogram over the H/alpha plane: `H` on `[0, 1]`, alpha on
/// `[0, pi/2]`. Counts sum to the number of valid pixels.
#[derive(Clone, Debug)]
pub struct HAlphaHistogram {
    pub bins_h: usize,
    pub bins_alpha: usize,
    /// Row-major: `counts[a_bin * bins_h + h_bin]`.
    pub counts: Vec<u64>,
}

impl HAlphaHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn occupied_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

pub fn halpha_histogram(
    field: &HAlphaField,
    bins_h: usize,
    bins_alpha: usize,
) -> Result<HAlphaHistogram> {
    if bins_h == 0 || bins_alpha == 0 {
        return Err(Error::InvalidConfig(
            "histogram needs at least one bin per axis".into(),
        ));
    }
    let mut counts = vec![0u64; bins_h * bins_alpha];
    let alpha_max = std::f64::consts::FRAC_PI_2;
    for p in &field.pixels {
        if !p.is_valid() {
            continue;
        }
        let hb = ((p.entropy * bins_h as f64) as usize).min(bins_h - 1);
        let ab = ((p.mean_alpha / alpha_max * bins_alpha as f64) as usize).min(bins_alpha - 1);
        counts[ab * bins_h + hb] += 1;
    }
    Ok(HAlphaHistogram {
        bins_h,
        bins_alpha,
        counts,
    })
}

/// Block-average multi-looking: `factor_az` rows by `factor_rg` columns per
/// block, remainder rows/columns dropped, nominal look count multiplied.
pub fn multilook(
    field: &CovarianceField,
    factor_az: usize,
    factor_rg: usize,
) -> Result<CovarianceField> {
    if factor_az == 0 || factor_rg == 0 {
        return Err(Error::InvalidConfig("multilook factors must be >= 1".into()));
    }
    let out_h = field.height / factor_az;
    let out_w = field.width / factor_rg;
    if out_h == 0 || out_w == 0 {
        return Err(Error::InvalidConfig(format!(
            "multilook factors ({factor_az}, {factor_rg}) exceed the image size"
        )));
    }
    let inv_count = 1.0 / (factor_az * factor_rg) as f64;
    let mut out = CovarianceField::new(
        out_w,
        out_h,
        field.looks * (factor_az * factor_rg) as u32,
        field.basis,
    );
    for oy in 0..out_h {
        for ox in 0..out_w {
            let mut acc = HermitianMat::zero();
            for dy in 0..factor_az {
                for dx in 0..factor_rg {
                    acc.accumulate_scaled(
                        field.get(ox * factor_rg + dx, oy * factor_az + dy),
                        inv_count,
                    );
                }
            }
            out.set(ox, oy, acc);
        }
    }
    Ok(out)
}
