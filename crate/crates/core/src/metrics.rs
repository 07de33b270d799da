//! Quantitative quality measures: global and edge-restricted reconstruction
//! error, equivalent number of looks, and per-zone mean statistics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{CovarianceField, LabelMap};
use crate::hermitian::{HermitianMat, DIM, OFF_DIM};
use crate::polarimetry::HAlphaField;

/// Per-element root mean square reconstruction error between the truth and
/// an estimate: `sqrt( (1/(N d^2)) sum_i ||est_i - truth_i||_F^2 )`.
pub fn err_glob(truth: &CovarianceField, estimate: &CovarianceField) -> Result<f64> {
    if !truth.same_shape(estimate) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", truth.width, truth.height),
            got: format!("{}x{}", estimate.width, estimate.height),
        });
    }
    let n = truth.pixels.len();
    if n == 0 {
        return Err(Error::InvalidConfig("empty field".into()));
    }
    let mut sum = 0.0;
    for (t, e) in truth.pixels.iter().zip(&estimate.pixels) {
        let d = *e - *t;
        let f = d.frobenius_norm();
        sum += f * f;
    }
    Ok((sum / (n as f64 * (DIM * DIM) as f64)).sqrt())
}

/// Per-pixel edge mask: true iff the pixel has at least one 8-connected
/// neighbor of a different class in the ground truth, i.e. it sits on
/// either side of a class discontinuity.
#[derive(Clone, Debug)]
pub struct EdgeMask {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
}

impl EdgeMask {
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

pub fn edge_mask(labels: &LabelMap) -> EdgeMask {
    let (w, h) = (labels.width, labels.height);
    let mut mask = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let own = labels.labels[y * w + x];
            'neighbors: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dy == 0 && dx == 0 {
                        continue;
                    }
                    let ny = y as i64 + dy;
                    let nx = x as i64 + dx;
                    if ny < 0 || nx < 0 || ny >= h as i64 || nx >= w as i64 {
                        continue;
                    }
                    if labels.labels[ny as usize * w + nx as usize] != own {
                        mask[y * w + x] = true;
                        break 'neighbors;
                    }
                }
            }
        }
    }
    EdgeMask {
        width: w,
        height: h,
        mask,
    }
}

/// Reconstruction error restricted to the edge-mask pixels, normalized per
/// element and per masked pixel. An empty mask is an error (the quantity is
/// undefined).
pub fn err_edge(
    truth: &CovarianceField,
    estimate: &CovarianceField,
    mask: &EdgeMask,
) -> Result<f64> {
    if !truth.same_shape(estimate) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", truth.width, truth.height),
            got: format!("{}x{}", estimate.width, estimate.height),
        });
    }
    if truth.width != mask.width || truth.height != mask.height {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} mask", truth.width, truth.height),
            got: format!("{}x{}", mask.width, mask.height),
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((t, e), &m) in truth.pixels.iter().zip(&estimate.pixels).zip(&mask.mask) {
        if m {
            let d = *e - *t;
            let f = d.frobenius_norm();
            sum += f * f;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyEdgeMask);
    }
    Ok((sum / ((DIM * DIM) as f64 * count as f64)).sqrt())
}

/// Equivalent number of looks `mean^2 / variance` of one diagonal channel
/// over a region (row-major pixel indices). Uses the unbiased sample
/// variance; a perfectly constant region yields `+inf`.
pub fn enl(field: &CovarianceField, region: &[usize], diag_channel: usize) -> Result<f64> {
    if region.len() < 2 {
        return Err(Error::InvalidConfig(
            "ENL needs at least two pixels".into(),
        ));
    }
    if diag_channel >= DIM {
        return Err(Error::InvalidConfig(format!(
            "diagonal channel {diag_channel} out of range"
        )));
    }
    let first = field.pixels[region[0]].diag()[diag_channel];
    let mut sum = 0.0;
    let mut constant = true;
    for &i in region {
        let v = field.pixels[i].diag()[diag_channel];
        constant &= v == first;
        sum += v;
    }
    if constant {
        return Ok(f64::INFINITY);
    }
    let mean = sum / region.len() as f64;
    let mut ss = 0.0;
    for &i in region {
        let d = field.pixels[i].diag()[diag_channel] - mean;
        ss += d * d;
    }
    let var = ss / (region.len() as f64 - 1.0);
    if var == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(mean * mean / var)
}

/// ENL on the default `T11` channel.
pub fn enl_t11(field: &CovarianceField, region: &[usize]) -> Result<f64> {
    enl(field, region, 0)
}

/// Mean statistics of one zone: the averaged coherency matrix and the
/// averaged H/alpha parameters over the zone's pixels.
#[derive(Clone, Debug)]
pub struct ZoneStats {
    pub class: u8,
    pub pixel_count: usize,
    pub mean_matrix: HermitianMat,
    pub mean_entropy: f64,
    pub mean_alpha: f64,
}

/// Per-zone report feeding the comparison tables.
#[derive(Clone, Debug)]
pub struct ZoneReport {
    pub zones: Vec<ZoneStats>,
}

impl ZoneReport {
    pub fn zone(&self, class: u8) -> Option<&ZoneStats> {
        self.zones.iter().find(|z| z.class == class)
    }
}

/// Arithmetic means of the matrix elements and the H/alpha parameters per
/// class. Classes beyond `max_class` (e.g. deterministic-target classes) are
/// skipped when `max_class` is given; invalid H/alpha pixels are excluded
/// from the angular means.
pub fn zone_report(
    field: &CovarianceField,
    labels: &LabelMap,
    halpha: &HAlphaField,
    max_class: Option<u8>,
) -> Result<ZoneReport> {
    if field.width != labels.width || field.height != labels.height {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", labels.width, labels.height),
            got: format!("{}x{}", field.width, field.height),
        });
    }
    if halpha.pixels.len() != field.pixels.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} H/alpha pixels", field.pixels.len()),
            got: format!("{}", halpha.pixels.len()),
        });
    }
    let limit = max_class.unwrap_or(u8::MAX);
    let mut zones = Vec::new();
    for class in 0..labels.classes.len() as u8 {
        if class > limit {
            continue;
        }
        let indices = labels.class_indices(class);
        if indices.is_empty() {
            continue;
        }
        let inv_n = 1.0 / indices.len() as f64;
        let mut mean_matrix = HermitianMat::zero();
        let mut h_sum = 0.0;
        let mut a_sum = 0.0;
        let mut valid = 0usize;
        for &i in &indices {
            mean_matrix.accumulate_scaled(&field.pixels[i], inv_n);
            let p = halpha.pixels[i];
            if p.is_valid() {
                h_sum += p.entropy;
                a_sum += p.mean_alpha;
                valid += 1;
            }
        }
        let (mean_entropy, mean_alpha) = if valid > 0 {
            (h_sum / valid as f64, a_sum / valid as f64)
        } else {
            (f64::NAN, f64::NAN)
        };
        zones.push(ZoneStats {
            class,
            pixel_count: indices.len(),
            mean_matrix,
            mean_entropy,
            mean_alpha,
        });
    }
    Ok(ZoneReport { zones })
}

/// The six distinct matrix entries in reporting order:
/// `T11, T22, T33, T12, T13, T23`.
pub fn distinct_entries(m: &HermitianMat) -> [(String, Complex64); DIM + OFF_DIM] {
    [
        ("T11".into(), Complex64::new(m.diag()[0], 0.0)),
        ("T22".into(), Complex64::new(m.diag()[1], 0.0)),
        ("T33".into(), Complex64::new(m.diag()[2], 0.0)),
        ("T12".into(), m.off()[0]),
        ("T13".into(), m.off()[1]),
        ("T23".into(), m.off()[2]),
    ]
}
