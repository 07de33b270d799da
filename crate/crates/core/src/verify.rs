//! Built-in validation suite.
//!
//! Each criterion checks one contract of the pipeline end to end, from
//! distance axioms to the full synthetic-scene comparison, and reports one
//! pass/fail line per sub-check. The `acceptance` integration test asserts
//! these results; the CLI `reproduce` subcommand prints them and writes the
//! report to disk. Comparisons against independent algorithms live in
//! [`crate::oracles`].

use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::bilateral::{bilateral_weights, boxcar, run_filter, FilterConfig, SpatialKernel};
use crate::constants::{default_zone_rects, zone_matrices, DEFAULT_SCENE_SIZE, LOOKS_DEFAULT};
use crate::distances::{d_ai, d_kl, d_le, prepare_pixel, DistanceKind, PreparedPixel};
use crate::error::Result;
use crate::field::{Basis, CovarianceField, LabelMap};
use crate::hermitian::{CMat3, HermitianMat, DIM};
use crate::metrics::{edge_mask, enl_t11, err_edge, err_glob, zone_report};
use crate::oracles;
use crate::polarimetry::{decompose_field, h_alpha};
use crate::rng::PixelRng;
use crate::speckle::{build_scene, default4_map, rank1_scene, simulate_pixel_with_factor};

/// Outcome of one validation criterion.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub elapsed: Duration,
    /// One line per sub-check, prefixed `ok:` or `FAIL:`.
    pub lines: Vec<String>,
}

impl CriterionResult {
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {} ({}): {} [{:.2?}]",
            self.id,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed
        )
    }
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.summary_line())?;
        for line in &self.lines {
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

struct Checks {
    lines: Vec<String>,
    passed: bool,
}

impl Checks {
    fn new() -> Self {
        Checks {
            lines: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, ok: bool, desc: String) {
        self.lines
            .push(format!("{}: {desc}", if ok { "ok" } else { "FAIL" }));
        self.passed &= ok;
    }

    fn finish(self, id: usize, title: &'static str, started: Instant) -> CriterionResult {
        CriterionResult {
            id,
            title,
            passed: self.passed,
            elapsed: started.elapsed(),
            lines: self.lines,
        }
    }
}

/// Random Hermitian positive definite matrix with moderate conditioning:
/// a Wishart draw plus a ridge proportional to its trace.
fn random_hpd(rng: &mut PixelRng) -> HermitianMat {
    let mut g = CMat3::zero();
    for r in 0..DIM {
        for c in 0..DIM {
            let (re, im) = rng.next_normal_pair();
            g.0[r][c] = Complex64::new(re, im);
        }
    }
    let mut w = HermitianMat::zero();
    for c in 0..DIM {
        w.accumulate_outer(&g.column(c), 1.0);
    }
    let ridge = 0.05 * w.trace() / DIM as f64 + 0.05;
    w + HermitianMat::identity().scale(ridge)
}

/// Random invertible complex matrix (entries standard complex normal).
fn random_invertible(rng: &mut PixelRng) -> CMat3 {
    loop {
        let mut g = CMat3::zero();
        for r in 0..DIM {
            for c in 0..DIM {
                let (re, im) = rng.next_normal_pair();
                g.0[r][c] = Complex64::new(re, im);
            }
        }
        if g.determinant().norm() > 1e-3 {
            return g;
        }
    }
}

/// Random unitary matrix: eigenvectors of a random Hermitian matrix.
fn random_unitary(rng: &mut PixelRng) -> CMat3 {
    let m = random_hpd(rng);
    m.eig().expect("random HPD decomposes").vectors
}

fn congruence(a: &CMat3, m: &HermitianMat) -> HermitianMat {
    HermitianMat::hermitianize(&a.mul(&m.to_full()).mul(&a.adjoint()))
}

/// Criterion 1: metric axioms of the three distances over seeded random
/// HPD pairs and triples.
pub fn criterion_distance_axioms() -> Result<CriterionResult> {
    let started = Instant::now();
    let mut checks = Checks::new();
    let n = 1000usize;
    let mut rng = PixelRng::new(0xD15, 0);

    let mut max_sym = 0.0f64;
    let mut max_id = 0.0f64;
    let mut max_affine = 0.0f64;
    let mut max_similarity = 0.0f64;
    let mut worst_triangle_ai = f64::NEG_INFINITY;
    let mut worst_triangle_le = f64::NEG_INFINITY;
    let mut positive = true;

    for _ in 0..n {
        let a = random_hpd(&mut rng);
        let b = random_hpd(&mut rng);
        let c = random_hpd(&mut rng);
        let (inv_a, inv_b) = (a.inv()?, b.inv()?);
        let (log_a, log_b, log_c) = (a.log()?, b.log()?, c.log()?);

        // symmetry
        let kl_ab = d_kl(&a, &inv_a, &b, &inv_b);
        let kl_ba = d_kl(&b, &inv_b, &a, &inv_a);
        let ai_ab = d_ai(&a, &b)?;
        let ai_ba = d_ai(&b, &a)?;
        let le_ab = d_le(&log_a, &log_b);
        let le_ba = d_le(&log_b, &log_a);
        max_sym = max_sym
            .max((kl_ab - kl_ba).abs() / kl_ab.max(1.0))
            .max((ai_ab - ai_ba).abs() / ai_ab.max(1.0))
            .max((le_ab - le_ba).abs() / le_ab.max(1.0));

        // identity of indiscernibles
        max_id = max_id
            .max(d_kl(&a, &inv_a, &a, &inv_a).abs())
            .max(d_ai(&a, &a)?.abs())
            .max(d_le(&log_a, &log_a).abs());

        // positivity for distinct operands
        positive &= kl_ab > 0.0 && ai_ab > 0.0 && le_ab > 0.0;

        // affine invariance of d_ai
        let t = random_invertible(&mut rng);
        let ai_t = d_ai(&congruence(&t, &a), &congruence(&t, &b))?;
        max_affine = max_affine.max((ai_t - ai_ab).abs() / ai_ab.max(1e-12));

        // similarity invariance of d_le
        let u = random_unitary(&mut rng);
        let scale = (rng.next_f64() * 4.0 - 2.0).exp();
        let sa = congruence(&u, &a).scale(scale).log()?;
        let sb = congruence(&u, &b).scale(scale).log()?;
        max_similarity = max_similarity.max((d_le(&sa, &sb) - le_ab).abs() / le_ab.max(1e-12));

        // triangle inequality for the two geodesic distances
        let ai_ac = d_ai(&a, &c)?;
        let ai_bc = d_ai(&b, &c)?;
        worst_triangle_ai = worst_triangle_ai.max(ai_ac - (ai_ab + ai_bc));
        let le_ac = d_le(&log_a, &log_c);
        let le_bc = d_le(&log_b, &log_c);
        worst_triangle_le = worst_triangle_le.max(le_ac - (le_ab + le_bc));
    }

    checks.check(
        max_sym <= 1e-12,
        format!("symmetry over {n} pairs: worst relative asymmetry {max_sym:.2e} <= 1e-12"),
    );
    checks.check(
        max_id <= 1e-12,
        format!("identity of indiscernibles: worst |d(a,a)| {max_id:.2e} <= 1e-12"),
    );
    checks.check(positive, format!("positivity for {n} distinct pairs"));
    checks.check(
        max_affine <= 1e-9,
        format!("affine invariance of d_ai: worst relative drift {max_affine:.2e} <= 1e-9"),
    );
    checks.check(
        max_similarity <= 1e-9,
        format!("similarity invariance of d_le: worst relative drift {max_similarity:.2e} <= 1e-9"),
    );
    checks.check(
        worst_triangle_ai <= 1e-12,
        format!("triangle inequality d_ai over {n} triples: worst excess {worst_triangle_ai:.2e}"),
    );
    checks.check(
        worst_triangle_le <= 1e-12,
        format!("triangle inequality d_le over {n} triples: worst excess {worst_triangle_le:.2e}"),
    );
    let elapsed = started.elapsed();
    checks.check(
        elapsed < Duration::from_secs(10),
        format!("runtime {elapsed:.2?} < 10 s"),
    );
    Ok(checks.finish(1, "distance axioms", started))
}

/// Criterion 2: unfiltered multi-look speckle statistics — ENL near the
/// look count and unbiased sample means, per zone matrix.
pub fn criterion_speckle_statistics() -> Result<CriterionResult> {
    let started = Instant::now();
    let mut checks = Checks::new();
    let side = 160usize; // 25,600 pixels per zone
    let n = side * side;
    let looks = LOOKS_DEFAULT;

    for (zi, truth) in zone_matrices().iter().enumerate() {
        let factor = truth.cholesky()?;
        let mut mean = HermitianMat::zero();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let mut rng = PixelRng::new(2025 + zi as u64, i as u64);
            let s = simulate_pixel_with_factor(&factor, looks, &mut rng);
            mean.accumulate_scaled(&s, 1.0 / n as f64);
            let v = s.diag()[0];
            sum += v;
            sum_sq += v * v;
        }
        let m = sum / n as f64;
        let var = (sum_sq - sum * sum / n as f64) / (n as f64 - 1.0);
        let enl = m * m / var;
        checks.check(
            (enl - looks as f64).abs() <= 0.05 * looks as f64,
            format!("zone {}: ENL {enl:.3} within {looks} +- 5%", zi + 1),
        );

        let ln = (looks as f64) * (n as f64);
        let mut worst_sigmas = 0.0f64;
        for i in 0..DIM {
            let se = truth.diag()[i] / ln.sqrt();
            worst_sigmas = worst_sigmas.max((mean.diag()[i] - truth.diag()[i]).abs() / se);
        }
        for (k, (i, j)) in [(0usize, 1usize), (0, 2), (1, 2)].iter().enumerate() {
            let se = (truth.diag()[*i] * truth.diag()[*j] / ln).sqrt();
            worst_sigmas = worst_sigmas.max((mean.off()[k] - truth.off()[k]).norm() / se);
        }
        checks.check(
            worst_sigmas <= 3.0,
            format!(
                "zone {}: sample mean within 3 standard errors per element (worst {worst_sigmas:.2} se)",
                zi + 1
            ),
        );
    }
    let elapsed = started.elapsed();
    checks.check(
        elapsed < Duration::from_secs(10),
        format!("runtime {elapsed:.2?} < 10 s"),
    );
    Ok(checks.finish(2, "speckle statistics", started))
}

/// Criterion 3: H and mean-alpha of the four reference matrices match the
/// published values to +-0.01 (alpha in radians).
pub fn criterion_reference_halpha() -> Result<CriterionResult> {
    let started = Instant::now();
    let mut checks = Checks::new();
    let published = [(0.48, 0.56), (0.97, 0.87), (0.68, 0.82), (0.54, 0.45)];
    for (zi, (truth, (h_ref, a_ref))) in zone_matrices().iter().zip(published).enumerate() {
        let p = h_alpha(truth)?;
        checks.check(
            (p.entropy - h_ref).abs() <= 0.01,
            format!("zone {}: H {:.4} within {h_ref} +- 0.01", zi + 1, p.entropy),
        );
        checks.check(
            (p.mean_alpha - a_ref).abs() <= 0.01,
            format!(
                "zone {}: mean alpha {:.4} rad within {a_ref} +- 0.01",
                zi + 1,
                p.mean_alpha
            ),
        );
    }
    let elapsed = started.elapsed();
    checks.check(
        elapsed < Duration::from_secs(1),
        format!("runtime {elapsed:.2?} < 1 s"),
    );
    Ok(checks.finish(3, "reference decomposition values", started))
}

/// Scores of one filter on the synthetic-scene comparison, averaged over
/// the seeds.
#[derive(Clone, Copy, Debug, Default)]
pub struct FilterScores {
    pub err_glob: f64,
    pub err_edge: f64,
    pub enl: f64,
}

/// Aggregated zone means of the default filter output.
#[derive(Clone, Debug)]
pub struct ZoneAggregate {
    pub class: u8,
    /// Ground-truth class matrix of this zone.
    pub truth: HermitianMat,
    pub mean_matrix: HermitianMat,
    pub mean_entropy: f64,
    pub mean_alpha: f64,
}

/// The multi-seed synthetic-scene experiment shared by criteria 4 and 7.
#[derive(Clone, Debug)]
pub struct SceneComparison {
    pub seeds: Vec<u64>,
    pub ai: FilterScores,
    pub kl: FilterScores,
    pub le: FilterScores,
    pub boxcar7: FilterScores,
    /// Zone means of the affine-invariant output, averaged over seeds.
    pub zones: Vec<ZoneAggregate>,
    /// Wall time of one full affine-invariant run (4 iterations, 512x512).
    pub single_ai_run: Duration,
}

/// Run the default 512x512 scene over the given seeds with the three
/// bilateral variants and the 7x7 boxcar, and collect all scores.
pub fn run_scene_comparison(seeds: &[u64]) -> Result<SceneComparison> {
    let map = default4_map(DEFAULT_SCENE_SIZE);
    let truth = map.truth_field(LOOKS_DEFAULT);
    let mask = edge_mask(&map);
    let enl_region = default_zone_rects()[1].indices(map.width);

    let mut ai = FilterScores::default();
    let mut kl = FilterScores::default();
    let mut le = FilterScores::default();
    let mut boxcar7 = FilterScores::default();
    let mut zone_matrix_sums = vec![HermitianMat::zero(); 4];
    let mut zone_h_sums = [0.0f64; 4];
    let mut zone_a_sums = [0.0f64; 4];
    let mut single_ai_run = Duration::ZERO;

    let inv_seeds = 1.0 / seeds.len() as f64;
    for (si, &seed) in seeds.iter().enumerate() {
        let field = build_scene(&map, LOOKS_DEFAULT, seed)?;

        let t0 = Instant::now();
        let out_ai = run_filter(&field, &FilterConfig::defaults_for(DistanceKind::AffineInvariant))?;
        if si == 0 {
            single_ai_run = t0.elapsed();
        }
        let out_kl = run_filter(&field, &FilterConfig::defaults_for(DistanceKind::KullbackLeibler))?;
        let out_le = run_filter(&field, &FilterConfig::defaults_for(DistanceKind::LogEuclidean))?;
        let out_box = boxcar(&field, 7)?;

        for (scores, out) in [
            (&mut ai, &out_ai),
            (&mut kl, &out_kl),
            (&mut le, &out_le),
            (&mut boxcar7, &out_box),
        ] {
            scores.err_glob += inv_seeds * err_glob(&truth, out)?;
            scores.err_edge += inv_seeds * err_edge(&truth, out, &mask)?;
            scores.enl += inv_seeds * enl_t11(out, &enl_region)?;
        }

        let halpha = decompose_field(&out_ai);
        let report = zone_report(&out_ai, &map, &halpha, Some(3))?;
        for z in &report.zones {
            let zi = z.class as usize;
            zone_matrix_sums[zi].accumulate_scaled(&z.mean_matrix, inv_seeds);
            zone_h_sums[zi] += inv_seeds * z.mean_entropy;
            zone_a_sums[zi] += inv_seeds * z.mean_alpha;
        }
    }

    let zones = (0..4)
        .map(|zi| ZoneAggregate {
            class: zi as u8,
            truth: map.classes[zi],
            mean_matrix: zone_matrix_sums[zi],
            mean_entropy: zone_h_sums[zi],
            mean_alpha: zone_a_sums[zi],
        })
        .collect();

    Ok(SceneComparison {
        seeds: seeds.to_vec(),
        ai,
        kl,
        le,
        boxcar7,
        zones,
        single_ai_run,
    })
}

/// Default seeds of the scene experiment.
pub fn default_comparison_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}

/// Criterion 4: orderings and bands of the comparison scores (the exact
/// published table depends on an unpublished scene geometry, so acceptance
/// is by orderings and bands, averaged over the seeds).
pub fn criterion_scene_bands(cmp: &SceneComparison) -> CriterionResult {
    let started = Instant::now();
    let mut checks = Checks::new();
    checks.check(
        cmp.ai.err_glob < cmp.kl.err_glob && cmp.kl.err_glob < cmp.boxcar7.err_glob,
        format!(
            "ERR_glob ordering: ai {:.3} < kl {:.3} < boxcar {:.3}",
            cmp.ai.err_glob, cmp.kl.err_glob, cmp.boxcar7.err_glob
        ),
    );
    checks.check(
        cmp.ai.err_edge < 0.1 * cmp.boxcar7.err_edge,
        format!(
            "ERR_edge: ai {:.3} < 0.1 * boxcar {:.3}",
            cmp.ai.err_edge, cmp.boxcar7.err_edge
        ),
    );
    checks.check(
        cmp.ai.enl > 300.0,
        format!("ENL ai {:.1} > 300", cmp.ai.enl),
    );
    checks.check(
        cmp.boxcar7.enl >= 150.0 && cmp.boxcar7.enl <= 260.0,
        format!("ENL boxcar {:.1} in [150, 260]", cmp.boxcar7.enl),
    );
    checks.check(
        (cmp.le.enl - cmp.ai.enl).abs() <= 0.1 * cmp.ai.enl,
        format!(
            "ENL le {:.1} within 10% of ENL ai {:.1}",
            cmp.le.enl, cmp.ai.enl
        ),
    );
    checks.check(
        cmp.single_ai_run < Duration::from_secs(600),
        format!(
            "one 512x512 4-iteration run: {:.2?} < 10 min",
            cmp.single_ai_run
        ),
    );
    let mut result = checks.finish(4, "synthetic-scene comparison bands", started);
    // the experiment itself dominates the cost; report it instead of the
    // cheap post-processing above
    result.elapsed = cmp.single_ai_run;
    result
}

/// Criterion 7: filtered zone means stay within 10% of the true matrix
/// elements and within +-0.02 of the true H/alpha.
pub fn criterion_zone_means(cmp: &SceneComparison) -> Result<CriterionResult> {
    let started = Instant::now();
    let mut checks = Checks::new();
    for zone in &cmp.zones {
        let truth = &zone.truth;
        let mut worst_rel = 0.0f64;
        let mut worst_name = "";
        let est = crate::metrics::distinct_entries(&zone.mean_matrix);
        let tru = crate::metrics::distinct_entries(truth);
        for (e, t) in est.iter().zip(&tru) {
            let rel = (e.1 - t.1).norm() / t.1.norm();
            if rel > worst_rel {
                worst_rel = rel;
                worst_name = match e.0.as_str() {
                    "T11" => "T11",
                    "T22" => "T22",
                    "T33" => "T33",
                    "T12" => "T12",
                    "T13" => "T13",
                    _ => "T23",
                };
            }
        }
        checks.check(
            worst_rel <= 0.10,
            format!(
                "zone {}: all six entries within 10% of truth (worst {} at {:.2}%)",
                zone.class as usize + 1,
                worst_name,
                100.0 * worst_rel
            ),
        );
        let p = h_alpha(truth)?;
        checks.check(
            (zone.mean_entropy - p.entropy).abs() <= 0.02,
            format!(
                "zone {}: mean H {:.4} within true {:.4} +- 0.02",
                zone.class as usize + 1,
                zone.mean_entropy,
                p.entropy
            ),
        );
        checks.check(
            (zone.mean_alpha - p.mean_alpha).abs() <= 0.02,
            format!(
                "zone {}: mean alpha {:.4} within true {:.4} +- 0.02",
                zone.class as usize + 1,
                zone.mean_alpha,
                p.mean_alpha
            ),
        );
    }
    Ok(checks.finish(7, "zone mean preservation", started))
}

/// Criterion 5: rank-1 targets survive filtering bit-exactly with the
/// correct H/alpha while the background is strongly smoothed.
pub fn criterion_rank1_preservation() -> Result<CriterionResult> {
    let started = Instant::now();
    let mut checks = Checks::new();
    let background = zone_matrices()[0];
    let (field, map) = rank1_scene(&background, LOOKS_DEFAULT, 7)?;
    let filtered = run_filter(&field, &FilterConfig::defaults_for(DistanceKind::AffineInvariant))?;

    let tri_indices = map.class_indices(1);
    let di_indices = map.class_indices(2);
    checks.check(
        !tri_indices.is_empty() && !di_indices.is_empty(),
        "scene contains the trihedral dot and the dihedral line".into(),
    );
    let mut bit_identical = true;
    for &i in tri_indices.iter().chain(&di_indices) {
        bit_identical &= filtered.pixels[i] == field.pixels[i];
    }
    checks.check(bit_identical, "target pixels bit-identical to input".into());

    let tri = h_alpha(&filtered.pixels[tri_indices[0]])?;
    checks.check(
        tri.entropy.abs() <= 1e-12 && tri.mean_alpha.abs() <= 1e-12,
        format!(
            "trihedral H/alpha = ({:.1e}, {:.1e} rad), expected (0, 0)",
            tri.entropy, tri.mean_alpha
        ),
    );
    let di = h_alpha(&filtered.pixels[di_indices[0]])?;
    checks.check(
        di.entropy.abs() <= 1e-12
            && (di.mean_alpha - std::f64::consts::FRAC_PI_2).abs() <= 1e-12,
        format!(
            "dihedral H/alpha = ({:.1e}, {:.4} rad), expected (0, pi/2)",
            di.entropy, di.mean_alpha
        ),
    );

    let bg_region = map.class_indices(0);
    let enl = enl_t11(&filtered, &bg_region)?;
    checks.check(enl > 50.0, format!("background ENL {enl:.1} > 50"));
    let elapsed = started.elapsed();
    checks.check(
        elapsed < Duration::from_secs(30),
        format!("runtime {elapsed:.2?} < 30 s"),
    );
    Ok(checks.finish(5, "rank-1 target preservation", started))
}

/// Criterion 6: filter invariants — weight normalization, PSD closure,
/// thread-count determinism, the constant fixed point and the degenerate
/// boxcar equivalence, on a 32x32 field.
pub fn criterion_filter_invariants() -> Result<CriterionResult> {
    let started = Instant::now();
    let mut checks = Checks::new();
    let side = 32usize;

    // speckled two-zone field
    let mut labels = vec![0u8; side * side];
    for y in 0..side {
        for x in (side / 2)..side {
            labels[y * side + x] = 1;
        }
    }
    let map = LabelMap {
        width: side,
        height: side,
        labels,
        classes: vec![zone_matrices()[0], zone_matrices()[1]],
        deterministic: vec![false; side * side],
    };
    let field = build_scene(&map, LOOKS_DEFAULT, 13)?;

    // weight normalization over every pixel, default window
    let config = FilterConfig::defaults_for(DistanceKind::AffineInvariant);
    let kernel = SpatialKernel::new(config.window_half, config.gamma_s);
    let prepared: Vec<PreparedPixel> = field
        .pixels
        .iter()
        .map(|m| prepare_pixel(m, config.kind, config.cond_threshold))
        .collect::<Result<_>>()?;
    let mut worst_sum_dev = 0.0f64;
    let half = config.window_half;
    for y in 0..side {
        for x in 0..side {
            let center = &prepared[y * side + x];
            let mut window = Vec::new();
            for ny in y.saturating_sub(half)..=(y + half).min(side - 1) {
                for nx in x.saturating_sub(half)..=(x + half).min(side - 1) {
                    window.push((
                        ny as i64 - y as i64,
                        nx as i64 - x as i64,
                        &prepared[ny * side + nx],
                    ));
                }
            }
            let weights = bilateral_weights(&window, center, &kernel, &config)?;
            let sum: f64 = weights.iter().sum();
            worst_sum_dev = worst_sum_dev.max((sum - 1.0).abs());
        }
    }
    checks.check(
        worst_sum_dev <= 1e-12,
        format!("weight normalization: worst |sum - 1| = {worst_sum_dev:.2e}"),
    );

    // PSD closure at every iteration
    let mut current = field.clone();
    let mut psd_ok = true;
    for _ in 0..config.n_iter {
        current = crate::bilateral::filter_iteration(&current, &config)?;
        for px in &current.pixels {
            let values = px.eigenvalues()?;
            psd_ok &= values[2] >= -1e-12 * values[0].max(f64::MIN_POSITIVE);
        }
    }
    checks.check(psd_ok, "PSD closure at every iteration".into());

    // thread-count determinism
    let run_with = |threads: usize| -> Result<CovarianceField> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(|| run_filter(&field, &config))
    };
    let one = run_with(1)?;
    let two = run_with(2)?;
    let many = run_with(8)?;
    checks.check(
        one.pixels == two.pixels && one.pixels == many.pixels,
        "bit-identical output for 1, 2 and 8 worker threads".into(),
    );

    // constant image fixed point
    let constant = CovarianceField::from_pixels(
        16,
        16,
        LOOKS_DEFAULT,
        Basis::Pauli,
        vec![zone_matrices()[2]; 256],
    )?;
    let mut fixed_point = true;
    for kind in [
        DistanceKind::KullbackLeibler,
        DistanceKind::AffineInvariant,
        DistanceKind::LogEuclidean,
    ] {
        let out = run_filter(&constant, &FilterConfig::defaults_for(kind))?;
        for px in &out.pixels {
            fixed_point &= (*px - zone_matrices()[2]).frobenius_norm()
                <= 1e-12 * zone_matrices()[2].frobenius_norm();
        }
    }
    checks.check(fixed_point, "constant image is a fixed point".into());

    // degenerate bilateral = boxcar
    let degenerate = FilterConfig {
        gamma_s: f64::INFINITY,
        gamma_r: f64::INFINITY,
        window_half: 3,
        n_iter: 1,
        kind: DistanceKind::LogEuclidean,
        cond_threshold: 1e-6,
    };
    let blf = run_filter(&field, &degenerate)?;
    let box7 = boxcar(&field, 7)?;
    let mut worst_box_dev = 0.0f64;
    for (a, b) in blf.pixels.iter().zip(&box7.pixels) {
        worst_box_dev =
            worst_box_dev.max((*a - *b).frobenius_norm() / b.frobenius_norm().max(1e-300));
    }
    checks.check(
        worst_box_dev <= 1e-12,
        format!("degenerate bilateral equals boxcar: worst relative deviation {worst_box_dev:.2e}"),
    );
    let elapsed = started.elapsed();
    checks.check(
        elapsed < Duration::from_secs(30),
        format!("runtime {elapsed:.2?} < 30 s"),
    );
    Ok(checks.finish(6, "filter invariants", started))
}

/// Criterion 8: production kernels agree with the independent reference
/// implementations.
pub fn criterion_oracle_equivalences() -> Result<CriterionResult> {
    let started = Instant::now();
    let mut checks = Checks::new();

    // eigensolver vs characteristic polynomial on the reference matrices
    let mut worst_eig = 0.0f64;
    for m in zone_matrices() {
        let jac = m.eigenvalues()?;
        let cp = oracles::charpoly_eigenvalues(&m);
        for (a, b) in jac.iter().zip(cp) {
            worst_eig = worst_eig.max((a - b).abs() / jac[0].max(1.0));
        }
    }
    checks.check(
        worst_eig <= 1e-9,
        format!("Jacobi vs characteristic polynomial: worst relative deviation {worst_eig:.2e}"),
    );

    // d_ai production vs generalized-eigenvalue oracle
    let mut rng = PixelRng::new(0x0AC1E, 0);
    let mut worst_ai = 0.0f64;
    for _ in 0..200 {
        let a = random_hpd(&mut rng);
        let b = random_hpd(&mut rng);
        let prod = d_ai(&a, &b)?;
        let orac = oracles::d_ai_oracle(&a, &b)?;
        worst_ai = worst_ai.max((prod - orac).abs() / prod.max(1e-9));
    }
    let zones = zone_matrices();
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let prod = d_ai(&zones[i], &zones[j])?;
            let orac = oracles::d_ai_oracle(&zones[i], &zones[j])?;
            worst_ai = worst_ai.max((prod - orac).abs() / prod.max(1e-9));
        }
    }
    checks.check(
        worst_ai <= 1e-9,
        format!("d_ai vs generalized-eigenvalue oracle: worst relative deviation {worst_ai:.2e}"),
    );

    // d_kl trace form vs definition form with explicit log-determinants
    let mut worst_kl = 0.0f64;
    for _ in 0..200 {
        let a = random_hpd(&mut rng);
        let b = random_hpd(&mut rng);
        let prod = d_kl(&a, &a.inv()?, &b, &b.inv()?);
        let orac = oracles::d_kl_oracle(&a, &b)?;
        worst_kl = worst_kl.max((prod - orac).abs() / prod.max(1e-9));
    }
    checks.check(
        worst_kl <= 1e-9,
        format!("d_kl trace form vs definition form: worst relative deviation {worst_kl:.2e}"),
    );

    // edge mask vs neighbor-pair scan, exact
    let map = default4_map(DEFAULT_SCENE_SIZE);
    let prod = edge_mask(&map);
    let orac = oracles::edge_mask_oracle(&map);
    checks.check(
        prod.mask == orac,
        format!(
            "edge mask vs pair-scan oracle: identical ({} edge pixels)",
            prod.count()
        ),
    );

    Ok(checks.finish(8, "independent-oracle equivalences", started))
}

/// Run the full validation suite (criteria 1-8 in order).
pub fn run_all(seeds: &[u64]) -> Result<Vec<CriterionResult>> {
    let mut results = vec![
        criterion_distance_axioms()?,
        criterion_speckle_statistics()?,
        criterion_reference_halpha()?,
    ];
    let cmp = run_scene_comparison(seeds)?;
    results.push(criterion_scene_bands(&cmp));
    results.push(criterion_rank1_preservation()?);
    results.push(criterion_filter_invariants()?);
    results.push(criterion_zone_means(&cmp)?);
    results.push(criterion_oracle_equivalences()?);
    results.sort_by_key(|r| r.id);
    Ok(results)
}
