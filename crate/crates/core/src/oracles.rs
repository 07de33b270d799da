//! Independent reference implementations used only for verification.
//!
//! Every routine here reaches the same quantity as a production kernel
//! through a different algorithm: eigenvalues via the characteristic
//! polynomial instead of Jacobi rotations, the inverse via Gaussian
//! elimination instead of the adjugate, the symmetrized Kullback-Leibler
//! divergence via the definition with explicit log-determinant terms, the
//! affine-invariant distance via generalized eigenvalues, and the edge mask
//! via a neighbor-pair scan. The validation suite and the `reproduce`
//! command compare production output against these routes; production code
//! never calls into this module.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::LabelMap;
use crate::hermitian::{CMat3, HermitianMat, DIM};

/// Eigenvalues of a Hermitian 3x3 matrix from the characteristic polynomial
/// `l^3 - tr l^2 + c2 l - det = 0`, solved by the trigonometric method.
/// Returned descending.
pub fn charpoly_eigenvalues(m: &HermitianMat) -> [f64; DIM] {
    let full = m.to_full();
    let tr = m.trace();
    let mut c2 = 0.0;
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            c2 += (full.0[i][i] * full.0[j][j] - full.0[i][j] * full.0[j][i]).re;
        }
    }
    let det = full.determinant().re;
    cubic_roots_descending(tr, c2, det)
}

/// Real roots of `l^3 - e1 l^2 + e2 l - e3 = 0` for a polynomial known to
/// have three real roots (elementary symmetric coefficients of a Hermitian
/// spectrum), descending.
fn cubic_roots_descending(e1: f64, e2: f64, e3: f64) -> [f64; DIM] {
    // depressed cubic t^3 + p t + q with l = t + e1/3
    let shift = e1 / 3.0;
    let p = e2 - e1 * e1 / 3.0;
    let q = -2.0 * e1 * e1 * e1 / 27.0 + e1 * e2 / 3.0 - e3;
    if p >= 0.0 {
        // only possible (up to rounding) for a triple root
        return [shift; DIM];
    }
    let r = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mut roots = [
        r * phi.cos() + shift,
        r * (phi - 2.0 * std::f64::consts::PI / 3.0).cos() + shift,
        r * (phi - 4.0 * std::f64::consts::PI / 3.0).cos() + shift,
    ];
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    roots
}

/// Complex 3x3 inverse by Gaussian elimination with partial pivoting.
pub fn gauss_inverse(m: &CMat3) -> Result<CMat3> {
    let mut a = *m;
    let mut inv = CMat3::identity();
    for col in 0..DIM {
        let mut pivot = col;
        for row in (col + 1)..DIM {
            if a.0[row][col].norm() > a.0[pivot][col].norm() {
                pivot = row;
            }
        }
        if a.0[pivot][col].norm() == 0.0 {
            return Err(Error::Singular);
        }
        if pivot != col {
            a.0.swap(pivot, col);
            inv.0.swap(pivot, col);
        }
        let scale = Complex64::new(1.0, 0.0) / a.0[col][col];
        for k in 0..DIM {
            a.0[col][k] *= scale;
            inv.0[col][k] *= scale;
        }
        for row in 0..DIM {
            if row == col {
                continue;
            }
            let factor = a.0[row][col];
            if factor.norm() == 0.0 {
                continue;
            }
            for k in 0..DIM {
                let delta_a = factor * a.0[col][k];
                let delta_i = factor * inv.0[col][k];
                a.0[row][k] -= delta_a;
                inv.0[row][k] -= delta_i;
            }
        }
    }
    Ok(inv)
}

/// Determinant via the LU factors of Gaussian elimination (production code
/// uses cofactor expansion).
pub fn gauss_determinant(m: &CMat3) -> Complex64 {
    let mut a = *m;
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..DIM {
        let mut pivot = col;
        for row in (col + 1)..DIM {
            if a.0[row][col].norm() > a.0[pivot][col].norm() {
                pivot = row;
            }
        }
        if a.0[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.0.swap(pivot, col);
            det = -det;
        }
        det *= a.0[col][col];
        for row in (col + 1)..DIM {
            let factor = a.0[row][col] / a.0[col][col];
            for k in col..DIM {
                let delta = factor * a.0[col][k];
                a.0[row][k] -= delta;
            }
        }
    }
    det
}

/// Affine-invariant distance via generalized eigenvalues: the roots of the
/// characteristic polynomial of `a^{-1} b` are the squared-geodesic
/// ingredients, `d = sqrt(sum ln^2 lambda_i)`. No Jacobi rotations, no
/// matrix square root.
pub fn d_ai_oracle(a: &HermitianMat, b: &HermitianMat) -> Result<f64> {
    let inv_a = gauss_inverse(&a.to_full())?;
    let w = inv_a.mul(&b.to_full());
    // the pencil eigenvalues are real positive; the polynomial coefficients
    // are real up to rounding
    let e1 = (w.0[0][0] + w.0[1][1] + w.0[2][2]).re;
    let mut e2 = 0.0;
    for i in 0..DIM {
        for j in (i + 1)..DIM {
            e2 += (w.0[i][i] * w.0[j][j] - w.0[i][j] * w.0[j][i]).re;
        }
    }
    let e3 = w.determinant().re;
    let roots = cubic_roots_descending(e1, e2, e3);
    let mut sum = 0.0;
    for r in roots {
        if r <= 0.0 {
            return Err(Error::NotPositiveDefinite { eigenvalue: r });
        }
        let l = r.ln();
        sum += l * l;
    }
    Ok(sum.sqrt())
}

/// Symmetrized Kullback-Leibler divergence from the definition for
/// zero-mean circular complex Gaussians, keeping the log-determinant terms
/// that cancel analytically in the symmetrization:
/// `D(P1||P2) = tr(S2^{ -1} S1) - d + ln(det S2 / det S1)`.
pub fn d_kl_oracle(a: &HermitianMat, b: &HermitianMat) -> Result<f64> {
    let fa = a.to_full();
    let fb = b.to_full();
    let inv_a = gauss_inverse(&fa)?;
    let inv_b = gauss_inverse(&fb)?;
    let det_a = gauss_determinant(&fa).re;
    let det_b = gauss_determinant(&fb).re;
    if det_a <= 0.0 || det_b <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: det_a.min(det_b),
        });
    }
    let trace = |m: &CMat3| (m.0[0][0] + m.0[1][1] + m.0[2][2]).re;
    let d = DIM as f64;
    let kl_12 = trace(&inv_b.mul(&fa)) - d + (det_b / det_a).ln();
    let kl_21 = trace(&inv_a.mul(&fb)) - d + (det_a / det_b).ln();
    Ok(0.5 * (kl_12 + kl_21))
}

/// Edge mask by scanning the four forward neighbor-pair directions and
/// marking both endpoints of every mixed-class pair (production scans the
/// full 8-neighborhood of each pixel instead).
pub fn edge_mask_oracle(labels: &LabelMap) -> Vec<bool> {
    let (w, h) = (labels.width, labels.height);
    let mut mask = vec![false; w * h];
    let dirs = [(1i64, 0i64), (0, 1), (1, 1), (1, -1)];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            for (dx, dy) in dirs {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let i = y as usize * w + x as usize;
                let j = ny as usize * w + nx as usize;
                if labels.labels[i] != labels.labels[j] {
                    mask[i] = true;
                    mask[j] = true;
                }
            }
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::zone_matrices;
    use crate::distances::{d_ai, d_kl};
    use crate::metrics::edge_mask;
    use crate::speckle::default4_map;
    use approx::assert_relative_eq;

    #[test]
    fn charpoly_matches_jacobi_on_zone_matrices() {
        for m in zone_matrices() {
            let jac = m.eigenvalues().unwrap();
            let cp = charpoly_eigenvalues(&m);
            for (a, b) in jac.iter().zip(cp) {
                assert_relative_eq!(a, &b, max_relative = 1e-9, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn gauss_inverse_matches_adjugate() {
        for m in zone_matrices() {
            let gi = gauss_inverse(&m.to_full()).unwrap();
            let ad = m.inv().unwrap().to_full();
            let mut dev = 0.0f64;
            for r in 0..DIM {
                for c in 0..DIM {
                    dev = dev.max((gi.0[r][c] - ad.0[r][c]).norm());
                }
            }
            assert!(dev < 1e-10, "inverse deviation {dev}");
        }
    }

    #[test]
    fn ai_oracle_agrees_with_production() {
        // distinct pairs only: at the triple root of the self-pair the
        // cubic solver is limited to sqrt(machine epsilon) accuracy
        let zones = zone_matrices();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let prod = d_ai(&zones[i], &zones[j]).unwrap();
                let orac = d_ai_oracle(&zones[i], &zones[j]).unwrap();
                assert_relative_eq!(prod, orac, max_relative = 1e-9, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn kl_oracle_agrees_with_trace_form() {
        let zones = zone_matrices();
        for i in 0..4 {
            for j in 0..4 {
                let (ia, ib) = (zones[i].inv().unwrap(), zones[j].inv().unwrap());
                let prod = d_kl(&zones[i], &ia, &zones[j], &ib);
                let orac = d_kl_oracle(&zones[i], &zones[j]).unwrap();
                assert_relative_eq!(prod, orac, max_relative = 1e-9, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn edge_mask_oracle_matches_production_on_default_scene() {
        let map = default4_map(128);
        let prod = edge_mask(&map);
        let orac = edge_mask_oracle(&map);
        assert_eq!(prod.mask, orac);
    }
}
