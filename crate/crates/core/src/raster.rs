//! File formats: T3 channel directories, label-map rasters, class-matrix
//! configs, scene bundles, CSV tables and PNG export.
//!
//! A T3 directory holds nine per-channel rasters (`T11.bin`, `T22.bin`,
//! `T33.bin`, `T12_re.bin`, `T12_im.bin`, `T13_re.bin`, `T13_im.bin`,
//! `T23_re.bin`, `T23_im.bin`) as little-endian IEEE floats, row-major,
//! plus a plain-text `header.txt` with `key=value` lines (`nrows`, `ncols`,
//! `basis`, `looks`, `dtype`). `dtype=f32` matches the de facto community
//! layout for interoperability; scene bundles write `dtype=f64` so a saved
//! field reloads bit-exactly.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Basis, CovarianceField, LabelMap};
use crate::hermitian::HermitianMat;
use crate::polarimetry::{HAlphaField, HAlphaHistogram, PauliRgb};

/// Storage element type of the channel rasters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DType {
    F32,
    F64,
}

impl DType {
    fn as_str(&self) -> &'static str {
        match self {
            DType::F32 => "f32",
            DType::F64 => "f64",
        }
    }

    fn parse(s: &str) -> Result<DType> {
        match s.trim() {
            "f32" => Ok(DType::F32),
            "f64" => Ok(DType::F64),
            other => Err(Error::InvalidConfig(format!("unknown dtype '{other}'"))),
        }
    }

    fn bytes(&self) -> usize {
        match self {
            DType::F32 => 4,
            DType::F64 => 8,
        }
    }
}

const CHANNELS: [&str; 9] = [
    "T11", "T22", "T33", "T12_re", "T12_im", "T13_re", "T13_im", "T23_re", "T23_im",
];

/// Load statistics reported alongside a T3 read.
#[derive(Clone, Copy, Debug, Default)]
pub struct T3LoadStats {
    /// Diagonal values below zero clamped to zero on load.
    pub clamped_negatives: u64,
}

fn extract_channel(field: &CovarianceField, channel: usize) -> Vec<f64> {
    field
        .pixels
        .iter()
        .map(|m| match channel {
            0 => m.diag()[0],
            1 => m.diag()[1],
            2 => m.diag()[2],
            3 => m.off()[0].re,
            4 => m.off()[0].im,
            5 => m.off()[1].re,
            6 => m.off()[1].im,
            7 => m.off()[2].re,
            8 => m.off()[2].im,
            _ => unreachable!(),
        })
        .collect()
}

/// Write a covariance field as a T3 channel directory.
pub fn write_t3(field: &CovarianceField, dir: &Path, dtype: DType) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut header = String::new();
    header.push_str(&format!("nrows={}\n", field.height));
    header.push_str(&format!("ncols={}\n", field.width));
    header.push_str(&format!("basis={}\n", field.basis.as_str()));
    header.push_str(&format!("looks={}\n", field.looks));
    header.push_str(&format!("dtype={}\n", dtype.as_str()));
    fs::write(dir.join("header.txt"), header)?;

    for (ch, name) in CHANNELS.iter().enumerate() {
        let values = extract_channel(field, ch);
        let mut bytes = Vec::with_capacity(values.len() * dtype.bytes());
        match dtype {
            DType::F32 => {
                for v in values {
                    bytes.extend_from_slice(&(v as f32).to_le_bytes());
                }
            }
            DType::F64 => {
                for v in values {
                    bytes.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        fs::write(dir.join(format!("{name}.bin")), bytes)?;
    }
    Ok(())
}

fn parse_header(path: &Path) -> Result<(usize, usize, Basis, u32, DType)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Format {
        path: path.display().to_string(),
        detail: format!("cannot read header: {e}"),
    })?;
    let mut nrows = None;
    let mut ncols = None;
    let mut basis = Basis::Pauli;
    let mut looks = 1u32;
    let mut dtype = DType::F32;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Format {
                path: path.display().to_string(),
                detail: format!("malformed line '{line}'"),
            });
        };
        let value = value.trim();
        match key.trim() {
            "nrows" => nrows = Some(value.parse::<usize>().map_err(|e| Error::Format {
                path: path.display().to_string(),
                detail: format!("nrows: {e}"),
            })?),
            "ncols" => ncols = Some(value.parse::<usize>().map_err(|e| Error::Format {
                path: path.display().to_string(),
                detail: format!("ncols: {e}"),
            })?),
            "basis" => basis = Basis::parse(value)?,
            "looks" => looks = value.parse::<u32>().map_err(|e| Error::Format {
                path: path.display().to_string(),
                detail: format!("looks: {e}"),
            })?,
            "dtype" => dtype = DType::parse(value)?,
            _ => {} // unknown keys are ignored for forward compatibility
        }
    }
    let nrows = nrows.ok_or_else(|| Error::Format {
        path: path.display().to_string(),
        detail: "missing nrows".into(),
    })?;
    let ncols = ncols.ok_or_else(|| Error::Format {
        path: path.display().to_string(),
        detail: "missing ncols".into(),
    })?;
    Ok((nrows, ncols, basis, looks, dtype))
}

fn read_channel(dir: &Path, name: &str, n: usize, dtype: DType) -> Result<Vec<f64>> {
    let path = dir.join(format!("{name}.bin"));
    let bytes = fs::read(&path).map_err(|_| Error::Raster {
        channel: name.to_string(),
        detail: format!("missing channel file {}", path.display()),
    })?;
    let expected = n * dtype.bytes();
    if bytes.len() != expected {
        return Err(Error::Raster {
            channel: name.to_string(),
            detail: format!("expected {expected} bytes, found {}", bytes.len()),
        });
    }
    let mut out = Vec::with_capacity(n);
    match dtype {
        DType::F32 => {
            for chunk in bytes.chunks_exact(4) {
                out.push(f32::from_le_bytes(chunk.try_into().unwrap()) as f64);
            }
        }
        DType::F64 => {
            for chunk in bytes.chunks_exact(8) {
                out.push(f64::from_le_bytes(chunk.try_into().unwrap()));
            }
        }
    }
    if let Some(bad) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::Raster {
            channel: name.to_string(),
            detail: format!("non-finite value at pixel {bad}"),
        });
    }
    Ok(out)
}

/// Read a T3 channel directory. Negative diagonal values are clamped to
/// zero and counted; non-finite values are a hard error.
pub fn read_t3(dir: &Path) -> Result<(CovarianceField, T3LoadStats)> {
    let (nrows, ncols, basis, looks, dtype) = parse_header(&dir.join("header.txt"))?;
    let n = nrows * ncols;
    let mut planes = Vec::with_capacity(9);
    for name in CHANNELS {
        planes.push(read_channel(dir, name, n, dtype)?);
    }
    let mut stats = T3LoadStats::default();
    let mut pixels = Vec::with_capacity(n);
    for i in 0..n {
        let mut diag = [planes[0][i], planes[1][i], planes[2][i]];
        for d in &mut diag {
            if *d < 0.0 {
                *d = 0.0;
                stats.clamped_negatives += 1;
            }
        }
        pixels.push(HermitianMat::new(
            diag,
            [
                Complex64::new(planes[3][i], planes[4][i]),
                Complex64::new(planes[5][i], planes[6][i]),
                Complex64::new(planes[7][i], planes[8][i]),
            ],
        ));
    }
    let field = CovarianceField::from_pixels(ncols, nrows, looks, basis, pixels)?;
    Ok((field, stats))
}

const LABEL_MAGIC: &[u8; 4] = b"LMAP";

/// Write the label plane as an 8-bit single-channel raster: magic, u32
/// width, u32 height (little-endian), then row-major bytes.
pub fn write_label_raster(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    if data.len() != width * height {
        return Err(Error::DimensionMismatch {
            expected: format!("{} bytes", width * height),
            got: format!("{}", data.len()),
        });
    }
    let mut bytes = Vec::with_capacity(12 + data.len());
    bytes.extend_from_slice(LABEL_MAGIC);
    bytes.extend_from_slice(&(width as u32).to_le_bytes());
    bytes.extend_from_slice(&(height as u32).to_le_bytes());
    bytes.extend_from_slice(data);
    fs::write(path, bytes)?;
    Ok(())
}

/// Read an 8-bit single-channel raster written by [`write_label_raster`].
pub fn read_label_raster(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path)?;
    if bytes.len() < 12 || &bytes[0..4] != LABEL_MAGIC {
        return Err(Error::Format {
            path: path.display().to_string(),
            detail: "not a label raster (bad magic)".into(),
        });
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = 12 + width * height;
    if bytes.len() != expected {
        return Err(Error::Format {
            path: path.display().to_string(),
            detail: format!("expected {expected} bytes, found {}", bytes.len()),
        });
    }
    Ok((width, height, bytes[12..].to_vec()))
}

/// Write class matrices as plain text: one line of nine reals per class
/// (`T11 T22 T33 T12_re T12_im T13_re T13_im T23_re T23_im`).
pub fn write_class_config(path: &Path, classes: &[HermitianMat]) -> Result<()> {
    let mut out = String::new();
    out.push_str("# T11 T22 T33 T12_re T12_im T13_re T13_im T23_re T23_im\n");
    for m in classes {
        let d = m.diag();
        let o = m.off();
        out.push_str(&format!(
            "{:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}\n",
            d[0], d[1], d[2], o[0].re, o[0].im, o[1].re, o[1].im, o[2].re, o[2].im
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parse a class-matrix config written by [`write_class_config`].
pub fn read_class_config(path: &Path) -> Result<Vec<HermitianMat>> {
    let text = fs::read_to_string(path)?;
    let mut classes = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: std::result::Result<Vec<f64>, _> =
            line.split_whitespace().map(str::parse::<f64>).collect();
        let nums = nums.map_err(|e| Error::Format {
            path: path.display().to_string(),
            detail: format!("line {}: {e}", lineno + 1),
        })?;
        if nums.len() != 9 {
            return Err(Error::Format {
                path: path.display().to_string(),
                detail: format!("line {}: expected 9 reals, found {}", lineno + 1, nums.len()),
            });
        }
        classes.push(HermitianMat::new(
            [nums[0], nums[1], nums[2]],
            [
                Complex64::new(nums[3], nums[4]),
                Complex64::new(nums[5], nums[6]),
                Complex64::new(nums[7], nums[8]),
            ],
        ));
    }
    if classes.is_empty() {
        return Err(Error::Format {
            path: path.display().to_string(),
            detail: "no classes defined".into(),
        });
    }
    Ok(classes)
}

/// Save a simulated scene so it reloads bit-exactly: the field as a
/// `dtype=f64` T3 directory plus `labels.lmap`, `deterministic.lmap`,
/// `classes.txt` and a `scene.txt` record of the generator inputs.
pub fn save_bundle(
    dir: &Path,
    field: &CovarianceField,
    map: &LabelMap,
    seed: u64,
    scene: &str,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_t3(field, dir, DType::F64)?;
    write_label_raster(&dir.join("labels.lmap"), map.width, map.height, &map.labels)?;
    let det_bytes: Vec<u8> = map.deterministic.iter().map(|&b| b as u8).collect();
    write_label_raster(
        &dir.join("deterministic.lmap"),
        map.width,
        map.height,
        &det_bytes,
    )?;
    write_class_config(&dir.join("classes.txt"), &map.classes)?;
    let mut record = String::new();
    record.push_str(&format!("scene={scene}\n"));
    record.push_str(&format!("seed={seed}\n"));
    record.push_str(&format!("looks={}\n", field.looks));
    fs::write(dir.join("scene.txt"), record)?;
    Ok(())
}

/// Reload a bundle directory: the field, and the label map when the scene
/// files are present.
pub fn load_bundle(dir: &Path) -> Result<(CovarianceField, Option<LabelMap>, T3LoadStats)> {
    let (field, stats) = read_t3(dir)?;
    let labels_path = dir.join("labels.lmap");
    let classes_path = dir.join("classes.txt");
    if !labels_path.exists() || !classes_path.exists() {
        return Ok((field, None, stats));
    }
    let (w, h, labels) = read_label_raster(&labels_path)?;
    let classes = read_class_config(&classes_path)?;
    let det_path = dir.join("deterministic.lmap");
    let deterministic = if det_path.exists() {
        let (dw, dh, bytes) = read_label_raster(&det_path)?;
        if (dw, dh) != (w, h) {
            return Err(Error::Format {
                path: det_path.display().to_string(),
                detail: "deterministic plane does not match the label plane".into(),
            });
        }
        bytes.iter().map(|&b| b != 0).collect()
    } else {
        vec![false; w * h]
    };
    let map = LabelMap {
        width: w,
        height: h,
        labels,
        classes,
        deterministic,
    };
    map.validate()?;
    Ok((field, Some(map), stats))
}

/// Side-car metadata as `key=value` lines.
pub fn write_metadata(path: &Path, entries: &[(&str, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in entries {
        out.push_str(&format!("{k}={v}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Scalar-plane colormaps for PNG export.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Colormap {
    /// Linear black-to-white ramp.
    Gray,
    /// Piecewise-linear black -> red -> yellow -> white ramp.
    Heat,
}

impl Colormap {
    fn map(&self, t: f64) -> [u8; 3] {
        let t = t.clamp(0.0, 1.0);
        match self {
            Colormap::Gray => {
                let v = (t * 255.0).round() as u8;
                [v, v, v]
            }
            Colormap::Heat => {
                let seg = t * 3.0;
                let (r, g, b) = if seg < 1.0 {
                    (seg, 0.0, 0.0)
                } else if seg < 2.0 {
                    (1.0, seg - 1.0, 0.0)
                } else {
                    (1.0, 1.0, seg - 2.0)
                };
                [
                    (r * 255.0).round() as u8,
                    (g * 255.0).round() as u8,
                    (b * 255.0).round() as u8,
                ]
            }
        }
    }
}

fn save_png(path: &Path, width: usize, height: usize, rgb: Vec<u8>) -> Result<()> {
    let img: image::RgbImage =
        image::ImageBuffer::from_raw(width as u32, height as u32, rgb).ok_or_else(|| {
            Error::Png("pixel buffer does not match the image dimensions".into())
        })?;
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Png(e.to_string()))
}

/// Export an RGB plane (values in `[0, 1]`) as an 8-bit PNG.
pub fn export_rgb_png(path: &Path, width: usize, height: usize, pixels: &[PauliRgb]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::DimensionMismatch {
            expected: format!("{} pixels", width * height),
            got: format!("{}", pixels.len()),
        });
    }
    let mut rgb = Vec::with_capacity(pixels.len() * 3);
    for p in pixels {
        rgb.push((p.r.clamp(0.0, 1.0) * 255.0).round() as u8);
        rgb.push((p.g.clamp(0.0, 1.0) * 255.0).round() as u8);
        rgb.push((p.b.clamp(0.0, 1.0) * 255.0).round() as u8);
    }
    save_png(path, width, height, rgb)
}

/// Export a scalar plane as PNG, mapping `[min, max]` through a colormap.
/// NaN pixels render black.
pub fn export_scalar_png(
    path: &Path,
    width: usize,
    height: usize,
    values: &[f64],
    min: f64,
    max: f64,
    colormap: Colormap,
) -> Result<()> {
    if values.len() != width * height {
        return Err(Error::DimensionMismatch {
            expected: format!("{} values", width * height),
            got: format!("{}", values.len()),
        });
    }
    let span = if max > min { max - min } else { 1.0 };
    let mut rgb = Vec::with_capacity(values.len() * 3);
    for &v in values {
        let px = if v.is_finite() {
            colormap.map((v - min) / span)
        } else {
            [0, 0, 0]
        };
        rgb.extend_from_slice(&px);
    }
    save_png(path, width, height, rgb)
}

/// Write the H and alpha planes as f32 rasters alongside a small header,
/// reusing the T3 header conventions.
pub fn write_halpha(dir: &Path, field: &HAlphaField) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut header = String::new();
    header.push_str(&format!("nrows={}\n", field.height));
    header.push_str(&format!("ncols={}\n", field.width));
    header.push_str("dtype=f32\n");
    fs::write(dir.join("header.txt"), header)?;
    for (name, extract) in [
        ("H", Box::new(|p: &crate::polarimetry::HAlphaPixel| p.entropy) as Box<dyn Fn(_) -> f64>),
        ("alpha", Box::new(|p: &crate::polarimetry::HAlphaPixel| p.mean_alpha)),
    ] {
        let mut bytes = Vec::with_capacity(field.pixels.len() * 4);
        for p in &field.pixels {
            bytes.extend_from_slice(&(extract(p) as f32).to_le_bytes());
        }
        fs::write(dir.join(format!("{name}.bin")), bytes)?;
    }
    Ok(())
}

/// Histogram CSV: a header row, then one row per bin with the bin edges
/// and the count. Alpha edges are written in degrees.
pub fn write_histogram_csv(path: &Path, hist: &HAlphaHistogram) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "h_low,h_high,alpha_low_deg,alpha_high_deg,count")?;
    let h_step = 1.0 / hist.bins_h as f64;
    let a_step = 90.0 / hist.bins_alpha as f64;
    for ab in 0..hist.bins_alpha {
        for hb in 0..hist.bins_h {
            let count = hist.counts[ab * hist.bins_h + hb];
            writeln!(
                f,
                "{:.6},{:.6},{:.4},{:.4},{}",
                hb as f64 * h_step,
                (hb + 1) as f64 * h_step,
                ab as f64 * a_step,
                (ab + 1) as f64 * a_step,
                count
            )?;
        }
    }
    Ok(())
}
