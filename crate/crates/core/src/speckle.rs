//! Monte Carlo speckle simulation of multi-look PolSAR covariance rasters.
//!
//! A pixel with ground-truth coherency `T` is simulated by drawing `L`
//! single-look target vectors `k_i = T^{1/2} v_i` (with `v_i` circular
//! complex standard normal) and averaging the outer products, which yields a
//! complex-Wishart-distributed multi-look estimate with `E[sigma_hat] = T`.
//! Pixels flagged deterministic carry their class matrix verbatim, modelling
//! dominant scatterers whose response is not speckled.
//!
//! Per-pixel counter-based random streams make the output independent of the
//! pixel traversal order, so simulation parallelizes freely.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{layover_matrix, zone_matrices, DEFAULT_SCENE_SIZE};
use crate::error::{Error, Result};
use crate::field::{Basis, CovarianceField, LabelMap};
use crate::hermitian::{CMat3, HermitianMat, DIM};
use crate::rng::PixelRng;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Draw one multi-look sample `(1/L) sum k_i k_i^H` for ground truth `t`.
///
/// Each component of `v_i` has independent real and imaginary parts of
/// variance 1/2, so `E[v v^H] = I` (circular complex standard normal).
pub fn simulate_pixel(t: &HermitianMat, looks: u32, rng: &mut PixelRng) -> Result<HermitianMat> {
    let factor = t.cholesky()?;
    Ok(simulate_pixel_with_factor(&factor, looks, rng))
}

/// Same as [`simulate_pixel`] with the Cholesky factor precomputed (the
/// scene builder factors each class once).
pub fn simulate_pixel_with_factor(factor: &CMat3, looks: u32, rng: &mut PixelRng) -> HermitianMat {
    let mut acc = HermitianMat::zero();
    for _ in 0..looks {
        let mut v = [Complex64::new(0.0, 0.0); DIM];
        for comp in &mut v {
            let (re, im) = rng.next_normal_pair();
            *comp = Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2);
        }
        let k = factor.mul_vec(&v);
        acc.accumulate_outer(&k, 1.0);
    }
    acc.scale(1.0 / looks as f64)
}

/// Simulate a full scene from a label map: speckled pixels draw from their
/// class matrix, deterministic pixels copy it verbatim.
pub fn build_scene(map: &LabelMap, looks: u32, seed: u64) -> Result<CovarianceField> {
    map.validate()?;
    if looks == 0 {
        return Err(Error::InvalidConfig("look count must be >= 1".into()));
    }
    let factors: Result<Vec<CMat3>> = map.classes.iter().map(|c| c.cholesky()).collect();
    let factors = factors?;

    let pixels: Vec<HermitianMat> = (0..map.labels.len())
        .into_par_iter()
        .map(|idx| {
            let class = map.labels[idx] as usize;
            if map.deterministic[idx] {
                map.classes[class]
            } else {
                let mut rng = PixelRng::new(seed, idx as u64);
                simulate_pixel_with_factor(&factors[class], looks, &mut rng)
            }
        })
        .collect();

    CovarianceField::from_pixels(map.width, map.height, looks, Basis::Pauli, pixels)
}

/// Label map of the default synthetic scene: a sinusoidal boundary splits
/// the canvas into two curved regions, a triangle and a diamond overlay two
/// polygonal regions, and two deterministic parallel lines near the top-left
/// corner carry the building-layover stand-in matrix.
pub fn default4_map(size: usize) -> LabelMap {
    let width = size;
    let height = size;
    let scale = size as f64 / DEFAULT_SCENE_SIZE as f64;
    let mut labels = vec![0u8; width * height];
    let mut deterministic = vec![false; width * height];

    let fsize = size as f64;
    for y in 0..height {
        let boundary =
            fsize * (0.453 + 0.109 * (3.0 * std::f64::consts::PI * y as f64 / fsize).sin());
        for x in 0..width {
            let idx = y * width + x;
            let (xf, yf) = (x as f64, y as f64);
            // two curved-boundary regions
            let mut label = if xf < boundary { 0 } else { 1 };
            // triangle overlay
            if xf >= 24.0 * scale && yf <= 500.0 * scale && yf >= xf + 200.0 * scale {
                label = 2;
            }
            // diamond overlay centered (368, 144), half-diagonals (128, 96)
            let dx = (xf - 368.0 * scale).abs() / (128.0 * scale);
            let dy = (yf - 144.0 * scale).abs() / (96.0 * scale);
            if dx + dy <= 1.0 {
                label = 3;
            }
            labels[idx] = label;
        }
    }

    // region-to-matrix assignment: the two large curved regions carry the
    // low- and mid-power classes, the polygons the mid- and high-power
    // ones, so the bright class forms a compact high-contrast structure
    // instead of dominating the scene's noise budget
    let zones = zone_matrices();
    let mut classes = vec![zones[0], zones[3], zones[2], zones[1]];
    classes.push(layover_matrix());
    let layover_class = (classes.len() - 1) as u8;

    // two deterministic parallel diagonal lines near the top-left corner
    let line_len = (64.0 * scale).round() as usize;
    for t in 0..line_len {
        for x0 in [24.0, 34.0] {
            let x = (x0 * scale).round() as usize + t;
            let y = (16.0 * scale).round() as usize + t;
            if x < width && y < height {
                let idx = y * width + x;
                labels[idx] = layover_class;
                deterministic[idx] = true;
            }
        }
    }

    LabelMap {
        width,
        height,
        labels,
        classes,
        deterministic,
    }
}

/// Default four-region scene at the standard size.
pub fn default4_scene(looks: u32, seed: u64) -> Result<(CovarianceField, LabelMap)> {
    let map = default4_map(DEFAULT_SCENE_SIZE);
    let field = build_scene(&map, looks, seed)?;
    Ok((field, map))
}

/// Edge length of the rank-1 target scene.
pub const RANK1_SCENE_SIZE: usize = 64;

/// Label map of the rank-1 target scene: a speckled homogeneous background,
/// one deterministic trihedral dot (`T ~ diag(1,0,0)`) and one deterministic
/// dihedral line (`T ~ diag(0,1,0)`), both rank 1.
pub fn rank1_map(background: &HermitianMat) -> LabelMap {
    let size = RANK1_SCENE_SIZE;
    let mut labels = vec![0u8; size * size];
    let mut deterministic = vec![false; size * size];
    let power = background.trace() * 5.0;
    let trihedral = HermitianMat::from_diag([power, 0.0, 0.0]);
    let dihedral = HermitianMat::from_diag([0.0, power, 0.0]);

    let dot = (21usize, 21usize);
    labels[dot.1 * size + dot.0] = 1;
    deterministic[dot.1 * size + dot.0] = true;

    let line_x = 42;
    for y in 12..=52 {
        labels[y * size + line_x] = 2;
        deterministic[y * size + line_x] = true;
    }

    LabelMap {
        width: size,
        height: size,
        labels,
        classes: vec![*background, trihedral, dihedral],
        deterministic,
    }
}

/// Rank-1 target scene: returns the simulated field and its ground truth.
pub fn rank1_scene(
    background: &HermitianMat,
    looks: u32,
    seed: u64,
) -> Result<(CovarianceField, LabelMap)> {
    let map = rank1_map(background);
    let field = build_scene(&map, looks, seed)?;
    Ok((field, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::LOOKS_DEFAULT;

    #[test]
    fn zero_truth_simulates_to_zero() {
        let mut rng = PixelRng::new(0, 0);
        let s = simulate_pixel(&HermitianMat::zero(), 4, &mut rng).unwrap();
        assert_eq!(s, HermitianMat::zero());
    }

    #[test]
    fn sample_mean_converges_to_truth() {
        // 20k pixels at L = 4: every element within 3 standard errors
        let t = zone_matrices()[0];
        let n = 20_000u64;
        let looks = 4u32;
        let factor = t.cholesky().unwrap();
        let mut mean = HermitianMat::zero();
        for i in 0..n {
            let mut rng = PixelRng::new(42, i);
            let s = simulate_pixel_with_factor(&factor, looks, &mut rng);
            mean.accumulate_scaled(&s, 1.0 / n as f64);
        }
        let ln = (looks as f64) * (n as f64);
        for i in 0..DIM {
            let se = t.diag()[i] / ln.sqrt();
            let dev = (mean.diag()[i] - t.diag()[i]).abs();
            assert!(dev < 3.0 * se, "diag {i}: dev {dev} vs 3se {}", 3.0 * se);
        }
        for (k, (i, j)) in [(0usize, 1usize), (0, 2), (1, 2)].iter().enumerate() {
            let se = (t.diag()[*i] * t.diag()[*j] / ln).sqrt();
            let dev = (mean.off()[k] - t.off()[k]).norm();
            assert!(dev < 3.0 * se, "off {k}: dev {dev} vs 3se {}", 3.0 * se);
        }
    }

    #[test]
    fn simulated_intensity_enl_is_look_count() {
        let t = zone_matrices()[1];
        let factor = t.cholesky().unwrap();
        let looks = 4u32;
        let n = 30_000u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let mut rng = PixelRng::new(7, i);
            let s = simulate_pixel_with_factor(&factor, looks, &mut rng);
            let v = s.diag()[0];
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n as f64;
        let var = (sum_sq - sum * sum / n as f64) / (n as f64 - 1.0);
        let enl = mean * mean / var;
        assert!(
            (enl - looks as f64).abs() < 0.05 * looks as f64,
            "ENL {enl} vs {looks}"
        );
    }

    #[test]
    fn deterministic_pixels_copy_class_matrix() {
        let map = rank1_map(&zone_matrices()[0]);
        let field = build_scene(&map, LOOKS_DEFAULT, 3).unwrap();
        assert_eq!(*field.get(21, 21), map.classes[1]);
        assert_eq!(*field.get(42, 30), map.classes[2]);
    }

    #[test]
    fn same_seed_reproduces_bitwise() {
        let map = default4_map(64);
        let a = build_scene(&map, 4, 11).unwrap();
        let b = build_scene(&map, 4, 11).unwrap();
        assert_eq!(a.pixels, b.pixels);
        let c = build_scene(&map, 4, 12).unwrap();
        assert_ne!(a.pixels, c.pixels);
    }

    #[test]
    fn different_seeds_are_decorrelated() {
        // homogeneous scene so that speckle is the only source of variation
        let map = LabelMap {
            width: 96,
            height: 96,
            labels: vec![0; 96 * 96],
            classes: vec![zone_matrices()[0]],
            deterministic: vec![false; 96 * 96],
        };
        let a = build_scene(&map, 4, 100).unwrap();
        let b = build_scene(&map, 4, 101).unwrap();
        let xs: Vec<f64> = a.pixels.iter().map(|m| m.diag()[0]).collect();
        let ys: Vec<f64> = b.pixels.iter().map(|m| m.diag()[0]).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let (mut cov, mut vx, mut vy) = (0.0, 0.0, 0.0);
        for (x, y) in xs.iter().zip(&ys) {
            cov += (x - mx) * (y - my);
            vx += (x - mx) * (x - mx);
            vy += (y - my) * (y - my);
        }
        let corr = cov / (vx.sqrt() * vy.sqrt());
        assert!(corr.abs() < 0.05, "cross-seed correlation {corr}");
    }

    #[test]
    fn simulated_matrices_are_full_rank_at_four_looks() {
        let map = default4_map(96);
        let field = build_scene(&map, 4, 5).unwrap();
        let mut ok = 0usize;
        for m in &field.pixels {
            if m.recip_condition().unwrap() > 1e-6 {
                ok += 1;
            }
        }
        let frac = ok as f64 / field.pixels.len() as f64;
        assert!(frac > 0.99, "full-rank fraction {frac}");
    }

    #[test]
    fn default_map_has_all_five_classes() {
        let map = default4_map(DEFAULT_SCENE_SIZE);
        map.validate().unwrap();
        let mut seen = [false; 5];
        for &l in &map.labels {
            seen[l as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
        // evaluation rectangles must be single-class interiors
        for (class, rect) in crate::constants::default_zone_rects().iter().enumerate() {
            for idx in rect.indices(map.width) {
                assert_eq!(
                    map.labels[idx], class as u8,
                    "rect for zone {class} leaks into another class"
                );
            }
        }
    }
}
