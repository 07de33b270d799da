//! Command-line pipeline: simulate synthetic PolSAR scenes, filter them,
//! evaluate against ground truth, decompose, render and histogram, plus a
//! one-shot `reproduce` command running the full validation suite.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use polsar_core::bilateral::{boxcar, run_filter, FilterConfig};
use polsar_core::constants::{
    self, default_zone_rects, zone_matrices, DEFAULT_SCENE_SIZE, LOOKS_DEFAULT,
};
use polsar_core::distances::DistanceKind;
use polsar_core::field::{CovarianceField, LabelMap, Rect};
use polsar_core::hermitian::DIM;
use polsar_core::metrics::{
    distinct_entries, edge_mask, enl_t11, err_edge, err_glob, zone_report,
};
use polsar_core::polarimetry::{decompose_field, render_pauli_rgb, RgbScaling};
use polsar_core::raster::{
    self, export_rgb_png, export_scalar_png, load_bundle, save_bundle, write_metadata, Colormap,
    DType,
};
use polsar_core::speckle::{build_scene, default4_map, rank1_map};
use polsar_core::verify;

#[derive(Parser)]
#[command(
    name = "polsar",
    about = "Iterative bilateral speckle filtering for polarimetric SAR covariance images",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a multi-look synthetic scene and save it as a bundle.
    Simulate(SimulateArgs),
    /// Run the iterative bilateral filter (or a boxcar) over a T3 directory.
    Filter(FilterArgs),
    /// Compare an estimate against ground truth: errors, ENL, zone means.
    Evaluate(EvaluateArgs),
    /// H/alpha decomposition of a T3 directory.
    Decompose(DecomposeArgs),
    /// Render a T3 directory as a Pauli RGB PNG.
    Render(RenderArgs),
    /// 2-D histogram of the H/alpha plane as CSV.
    Histogram(HistogramArgs),
    /// Run the built-in validation suite and write a pass/fail report.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in scene: `default4` (four-region 512x512) or `rank1`
    /// (homogeneous background with two deterministic rank-1 targets).
    #[arg(long, default_value = "default4")]
    scene: String,
    /// Custom label raster (overrides --scene; requires --classes).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Class-matrix config for --labels (one line of 9 reals per class).
    #[arg(long)]
    classes: Option<PathBuf>,
    /// Number of looks of the simulated multi-look covariance.
    #[arg(long, default_value_t = LOOKS_DEFAULT)]
    looks: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output bundle directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FilterArgs {
    /// Input T3 or bundle directory.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output T3 directory.
    #[arg(long)]
    out: PathBuf,
    /// Matrix distance: `ai` (affine-invariant), `le` (log-Euclidean) or
    /// `kl` (symmetrized Kullback-Leibler); `boxcar` selects the baseline
    /// mean filter instead of the bilateral filter.
    #[arg(long, default_value = "ai")]
    distance: String,
    /// Radiometric kernel scale (defaults to 1.33 for ai/le, 3.11 for kl).
    #[arg(long)]
    gamma_r: Option<f64>,
    /// Spatial kernel scale in pixels.
    #[arg(long, default_value_t = constants::GAMMA_S_DEFAULT)]
    gamma_s: f64,
    /// Number of iterations.
    #[arg(long, default_value_t = constants::N_ITER_DEFAULT)]
    iters: usize,
    /// Full window edge length (odd).
    #[arg(long, default_value_t = constants::WINDOW_DEFAULT)]
    window: usize,
    /// Reciprocal-condition threshold flagging rank-deficient pixels.
    #[arg(long, default_value_t = constants::COND_THRESHOLD_DEFAULT)]
    cond_threshold: f64,
    /// Worker threads (0 = all cores). Output is identical for any count.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output raster element type: `f32` (interoperable) or `f64` (exact).
    #[arg(long, default_value = "f32")]
    dtype: String,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Ground-truth T3 or bundle directory.
    #[arg(long)]
    truth: PathBuf,
    /// Estimated (filtered) T3 directory.
    #[arg(long)]
    estimate: PathBuf,
    /// Label raster; defaults to the labels stored in the truth bundle.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Class-matrix config accompanying --labels.
    #[arg(long)]
    classes: Option<PathBuf>,
    /// Require the edge error (fails when no labels are available).
    #[arg(long)]
    err_edge: bool,
    /// ENL rectangles: `x,y,w,h;x,y,w,h;...` or `default` for the built-in
    /// zone rectangles of the default scene.
    #[arg(long)]
    zones: Option<String>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print an aligned table instead of CSV.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output directory for the H and alpha rasters.
    #[arg(long)]
    out: PathBuf,
    /// Also export H.png and alpha.png previews.
    #[arg(long)]
    png: bool,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output PNG path.
    #[arg(long)]
    out: PathBuf,
    /// Per-channel amplitude clip quantile.
    #[arg(long, default_value_t = 0.99)]
    quantile: f64,
    /// Display gamma.
    #[arg(long, default_value_t = 2.2)]
    gamma: f64,
}

#[derive(Args)]
struct HistogramArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 64)]
    bins_h: usize,
    #[arg(long, default_value_t = 64)]
    bins_alpha: usize,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Output directory for the report.
    #[arg(long)]
    out: PathBuf,
    /// Seeds of the synthetic-scene comparison.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Filter(args) => filter(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Decompose(args) => decompose(args),
        Command::Render(args) => render(args),
        Command::Histogram(args) => histogram(args),
        Command::Reproduce(args) => reproduce(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn load_field(dir: &Path) -> Result<(CovarianceField, Option<LabelMap>)> {
    let (field, map, stats) = load_bundle(dir)
        .with_context(|| format!("loading covariance data from {}", dir.display()))?;
    if stats.clamped_negatives > 0 {
        eprintln!(
            "warning: clamped {} negative diagonal values to zero on load",
            stats.clamped_negatives
        );
    }
    Ok((field, map))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    if args.looks == 0 {
        bail!("--looks must be >= 1");
    }
    if args.looks < DIM as u32 {
        eprintln!(
            "warning: {}-look matrices are rank-deficient (rank < {DIM}); the filter needs a \
             multi-look initialization of at least {DIM} independent looks, so most pixels will \
             be left unfiltered",
            args.looks
        );
    }
    let (map, scene_name) = match (&args.labels, &args.classes) {
        (Some(labels_path), Some(classes_path)) => {
            let (w, h, labels) = raster::read_label_raster(labels_path)?;
            let classes = raster::read_class_config(classes_path)?;
            let map = LabelMap {
                width: w,
                height: h,
                labels,
                classes,
                deterministic: vec![false; w * h],
            };
            map.validate().context("invalid label map")?;
            (map, "custom".to_string())
        }
        (None, None) => match args.scene.as_str() {
            "default4" => (default4_map(DEFAULT_SCENE_SIZE), "default4".to_string()),
            "rank1" => (rank1_map(&zone_matrices()[0]), "rank1".to_string()),
            other => bail!("unknown scene '{other}' (expected default4 or rank1)"),
        },
        _ => bail!("--labels and --classes must be given together"),
    };
    let field = build_scene(&map, args.looks, args.seed)?;
    save_bundle(&args.out, &field, &map, args.seed, &scene_name)?;
    println!(
        "wrote {}x{} {}-look scene '{}' (seed {}) to {}",
        field.width,
        field.height,
        field.looks,
        scene_name,
        args.seed,
        args.out.display()
    );
    Ok(())
}

fn filter(args: FilterArgs) -> Result<()> {
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .context("initializing the worker pool")?;
    }
    if args.window % 2 == 0 || args.window < 3 {
        bail!("--window must be odd and >= 3, got {}", args.window);
    }
    let dtype = match args.dtype.as_str() {
        "f32" => DType::F32,
        "f64" => DType::F64,
        other => bail!("unknown dtype '{other}' (expected f32 or f64)"),
    };
    let (field, _) = load_field(&args.input)?;

    let started = Instant::now();
    let (output, description) = if args.distance == "boxcar" {
        let out = boxcar(&field, args.window)?;
        (out, format!("boxcar {0}x{0}", args.window))
    } else {
        let kind = DistanceKind::parse(&args.distance)?;
        let config = FilterConfig {
            gamma_s: args.gamma_s,
            gamma_r: args.gamma_r.unwrap_or_else(|| constants::gamma_r_default(kind)),
            window_half: (args.window - 1) / 2,
            n_iter: args.iters,
            kind,
            cond_threshold: args.cond_threshold,
        };
        config.validate()?;
        let out = run_filter(&field, &config)?;
        (
            out,
            format!(
                "bilateral d_{} gamma_r={} gamma_s={} window={} iters={}",
                kind.as_str(),
                config.gamma_r,
                config.gamma_s,
                args.window,
                config.n_iter
            ),
        )
    };
    let wall = started.elapsed();

    raster::write_t3(&output, &args.out, dtype)?;
    write_metadata(
        &args.out.join("filter_meta.txt"),
        &[
            ("filter", description.clone()),
            ("distance", args.distance.clone()),
            ("gamma_s", format!("{}", args.gamma_s)),
            (
                "gamma_r",
                format!("{}", args.gamma_r.unwrap_or(f64::NAN)),
            ),
            ("window", format!("{}", args.window)),
            ("iters", format!("{}", args.iters)),
            ("cond_threshold", format!("{}", args.cond_threshold)),
            ("threads", format!("{}", args.threads)),
            ("wall_ms", format!("{}", wall.as_millis())),
            ("dtype", args.dtype.clone()),
        ],
    )?;
    println!("{description}: {wall:.2?} -> {}", args.out.display());
    Ok(())
}

fn parse_zones(spec: &str, truth: &CovarianceField) -> Result<Vec<Rect>> {
    if spec == "default" {
        if truth.width != DEFAULT_SCENE_SIZE || truth.height != DEFAULT_SCENE_SIZE {
            bail!(
                "--zones default expects a {0}x{0} scene",
                DEFAULT_SCENE_SIZE
            );
        }
        return Ok(default_zone_rects().to_vec());
    }
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| Rect::parse(s).map_err(Into::into))
        .collect()
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let (truth, bundle_map) = load_field(&args.truth)?;
    let (estimate, _) = load_field(&args.estimate)?;

    let map = match (&args.labels, &args.classes) {
        (Some(labels_path), classes) => {
            let (w, h, labels) = raster::read_label_raster(labels_path)?;
            let classes = match classes {
                Some(path) => raster::read_class_config(path)?,
                None => bail!("--labels requires --classes for the zone statistics"),
            };
            let map = LabelMap {
                width: w,
                height: h,
                labels,
                classes,
                deterministic: vec![false; w * h],
            };
            map.validate().context("invalid label map")?;
            Some(map)
        }
        (None, _) => bundle_map,
    };
    if args.err_edge && map.is_none() {
        bail!("--err-edge requires labels (either --labels or a truth bundle with labels)");
    }

    let mut scalars: Vec<(String, f64)> = Vec::new();
    scalars.push(("err_glob".into(), err_glob(&truth, &estimate)?));

    if let Some(map) = &map {
        let mask = edge_mask(map);
        if mask.count() > 0 {
            scalars.push(("err_edge".into(), err_edge(&truth, &estimate, &mask)?));
        } else if args.err_edge {
            bail!("the label map has no class boundaries; the edge error is undefined");
        }
    }

    if let Some(zones) = &args.zones {
        for (i, rect) in parse_zones(zones, &truth)?.iter().enumerate() {
            let region = rect.indices(estimate.width);
            scalars.push((format!("enl_zone{}", i + 1), enl_t11(&estimate, &region)?));
        }
    }

    let report = match &map {
        Some(map) => {
            let halpha = decompose_field(&estimate);
            Some(zone_report(&estimate, map, &halpha, None)?)
        }
        None => None,
    };

    let text = if args.pretty {
        pretty_report(&scalars, report.as_ref())
    } else {
        csv_report(&scalars, report.as_ref())
    };
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn csv_report(
    scalars: &[(String, f64)],
    report: Option<&polsar_core::metrics::ZoneReport>,
) -> String {
    let mut rows: Vec<String> = vec!["metric,value".into()];
    for (name, value) in scalars {
        rows.push(format!("{name},{value:.6}"));
    }
    if let Some(report) = report {
        rows.push("zone,quantity,value_re,value_im".into());
        for z in &report.zones {
            rows.push(format!("{},H,{:.4},", z.class + 1, z.mean_entropy));
            rows.push(format!("{},alpha,{:.4},", z.class + 1, z.mean_alpha));
            for (name, value) in distinct_entries(&z.mean_matrix) {
                rows.push(format!(
                    "{},{name},{:.4},{:.4}",
                    z.class + 1,
                    value.re,
                    value.im
                ));
            }
        }
    }
    rows.join("\n") + "\n"
}

fn fmt_complex(z: polsar_core::Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.2}", z.re)
    } else {
        format!("{:.2} {} j {:.2}", z.re, if z.im < 0.0 { "-" } else { "+" }, z.im.abs())
    }
}

/// Aligned table with one column per zone, quantities as rows.
fn pretty_report(
    scalars: &[(String, f64)],
    report: Option<&polsar_core::metrics::ZoneReport>,
) -> String {
    let mut out = String::new();
    for (name, value) in scalars {
        out.push_str(&format!("{name:<12} {value:.4}\n"));
    }
    let Some(report) = report else {
        return out;
    };
    out.push('\n');
    const COL: usize = 18;
    out.push_str(&format!("{:<10}", "quantity"));
    for z in &report.zones {
        out.push_str(&format!("{:>COL$}", format!("zone {}", z.class + 1)));
    }
    out.push('\n');
    let mut push_row = |label: &str, values: Vec<String>| {
        out.push_str(&format!("{label:<10}"));
        for v in values {
            out.push_str(&format!("{v:>COL$}"));
        }
        out.push('\n');
    };
    push_row(
        "H",
        report.zones.iter().map(|z| format!("{:.4}", z.mean_entropy)).collect(),
    );
    push_row(
        "alpha",
        report.zones.iter().map(|z| format!("{:.4}", z.mean_alpha)).collect(),
    );
    for (slot, label) in ["T11", "T22", "T33", "T12", "T13", "T23"].iter().enumerate() {
        push_row(
            label,
            report
                .zones
                .iter()
                .map(|z| fmt_complex(distinct_entries(&z.mean_matrix)[slot].1))
                .collect(),
        );
    }
    out
}

fn decompose(args: DecomposeArgs) -> Result<()> {
    let (field, _) = load_field(&args.input)?;
    let halpha = decompose_field(&field);
    raster::write_halpha(&args.out, &halpha)?;
    if args.png {
        let h_values: Vec<f64> = halpha.pixels.iter().map(|p| p.entropy).collect();
        let a_values: Vec<f64> = halpha.pixels.iter().map(|p| p.mean_alpha).collect();
        export_scalar_png(
            &args.out.join("H.png"),
            halpha.width,
            halpha.height,
            &h_values,
            0.0,
            1.0,
            Colormap::Heat,
        )?;
        export_scalar_png(
            &args.out.join("alpha.png"),
            halpha.width,
            halpha.height,
            &a_values,
            0.0,
            std::f64::consts::FRAC_PI_2,
            Colormap::Heat,
        )?;
    }
    println!(
        "decomposed {} pixels ({} valid) -> {}",
        halpha.pixels.len(),
        halpha.valid_count(),
        args.out.display()
    );
    Ok(())
}

fn render(args: RenderArgs) -> Result<()> {
    let (field, _) = load_field(&args.input)?;
    let scaling = RgbScaling::from_field(&field, args.quantile, args.gamma);
    let rgb = render_pauli_rgb(&field, &scaling);
    export_rgb_png(&args.out, field.width, field.height, &rgb)?;
    println!(
        "rendered {}x{} -> {}",
        field.width,
        field.height,
        args.out.display()
    );
    Ok(())
}

fn histogram(args: HistogramArgs) -> Result<()> {
    let (field, _) = load_field(&args.input)?;
    let halpha = decompose_field(&field);
    let hist = polsar_core::polarimetry::halpha_histogram(&halpha, args.bins_h, args.bins_alpha)?;
    raster::write_histogram_csv(&args.out, &hist)?;
    println!(
        "histogram of {} valid pixels over {}x{} bins ({} occupied) -> {}",
        hist.total(),
        args.bins_h,
        args.bins_alpha,
        hist.occupied_bins(),
        args.out.display()
    );
    Ok(())
}

fn reproduce(args: ReproduceArgs) -> Result<()> {
    let seeds = args
        .seeds
        .unwrap_or_else(verify::default_comparison_seeds);
    let results = verify::run_all(&seeds)?;
    fs::create_dir_all(&args.out)?;
    let mut report = String::new();
    let mut all_passed = true;
    for r in &results {
        println!("{r}");
        report.push_str(&format!("{r}"));
        all_passed &= r.passed;
    }
    let verdict = if all_passed {
        "ALL CRITERIA PASSED"
    } else {
        "SOME CRITERIA FAILED"
    };
    println!("{verdict}");
    report.push_str(&format!("{verdict}\n"));
    fs::write(args.out.join("report.txt"), report)?;
    if !all_passed {
        std::process::exit(1);
    }
    Ok(())
}
