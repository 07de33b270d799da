//! Rasters of per-pixel covariance matrices and ground-truth label maps.

use crate::error::{Error, Result};
use crate::hermitian::HermitianMat;

/// Target-vector basis the matrices are expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Coherency matrices `T` (Pauli target vectors).
    Pauli,
    /// Covariance matrices `C` (lexicographic target vectors).
    Lexicographic,
}

impl Basis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Basis::Pauli => "pauli",
            Basis::Lexicographic => "lexicographic",
        }
    }

    pub fn parse(s: &str) -> Result<Basis> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pauli" | "t" => Ok(Basis::Pauli),
            "lexicographic" | "lex" | "c" => Ok(Basis::Lexicographic),
            other => Err(Error::InvalidConfig(format!("unknown basis '{other}'"))),
        }
    }
}

/// 2-D raster of Hermitian matrices plus acquisition metadata.
#[derive(Clone, Debug)]
pub struct CovarianceField {
    pub width: usize,
    pub height: usize,
    /// Nominal number of looks of the multi-look estimate.
    pub looks: u32,
    pub basis: Basis,
    /// Row-major, `width * height` entries.
    pub pixels: Vec<HermitianMat>,
}

impl CovarianceField {
    pub fn new(width: usize, height: usize, looks: u32, basis: Basis) -> Self {
        CovarianceField {
            width,
            height,
            looks,
            basis,
            pixels: vec![HermitianMat::zero(); width * height],
        }
    }

    pub fn from_pixels(
        width: usize,
        height: usize,
        looks: u32,
        basis: Basis,
        pixels: Vec<HermitianMat>,
    ) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: format!("{} pixels", width * height),
                got: format!("{}", pixels.len()),
            });
        }
        Ok(CovarianceField {
            width,
            height,
            looks,
            basis,
            pixels,
        })
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &HermitianMat {
        &self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, m: HermitianMat) {
        let i = self.index(x, y);
        self.pixels[i] = m;
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Transposed copy (width and height swapped).
    pub fn transposed(&self) -> CovarianceField {
        let mut out = CovarianceField::new(self.height, self.width, self.looks, self.basis);
        for y in 0..self.height {
            for x in 0..self.width {
                out.set(y, x, *self.get(x, y));
            }
        }
        out
    }

    pub fn same_shape(&self, other: &CovarianceField) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Axis-aligned pixel rectangle, used for evaluation regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Rect {
            x,
            y,
            width,
            height,
        }
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    /// Row-major pixel indices of this rectangle inside a raster of the
    /// given width.
    pub fn indices(&self, raster_width: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.area());
        for y in self.y..self.y + self.height {
            for x in self.x..self.x + self.width {
                out.push(y * raster_width + x);
            }
        }
        out
    }

    /// Parse `"x,y,w,h"`.
    pub fn parse(s: &str) -> Result<Rect> {
        let parts: Vec<_> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::InvalidConfig(format!(
                "rectangle '{s}' is not of the form x,y,w,h"
            )));
        }
        let nums: std::result::Result<Vec<usize>, _> =
            parts.iter().map(|p| p.parse::<usize>()).collect();
        let nums =
            nums.map_err(|e| Error::InvalidConfig(format!("rectangle '{s}': {e}")))?;
        Ok(Rect::new(nums[0], nums[1], nums[2], nums[3]))
    }
}

/// Per-pixel ground-truth class map for synthetic scenes. Each class carries
/// its coherency matrix; pixels flagged deterministic are stamped with the
/// class matrix verbatim instead of being speckle-simulated.
#[derive(Clone, Debug)]
pub struct LabelMap {
    pub width: usize,
    pub height: usize,
    /// Row-major class ids, each `< classes.len()`.
    pub labels: Vec<u8>,
    /// Class coherency matrices (Pauli basis).
    pub classes: Vec<HermitianMat>,
    /// Row-major flags; `true` pixels carry the class matrix without speckle.
    pub deterministic: Vec<bool>,
}

impl LabelMap {
    pub fn validate(&self) -> Result<()> {
        let n = self.width * self.height;
        if self.labels.len() != n {
            return Err(Error::InvalidScene(format!(
                "label plane has {} entries for a {}x{} raster",
                self.labels.len(),
                self.width,
                self.height
            )));
        }
        if self.deterministic.len() != n {
            return Err(Error::InvalidScene(format!(
                "deterministic plane has {} entries for a {}x{} raster",
                self.deterministic.len(),
                self.width,
                self.height
            )));
        }
        if self.classes.is_empty() {
            return Err(Error::InvalidScene("no classes defined".into()));
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| (l as usize) >= self.classes.len()) {
            return Err(Error::InvalidScene(format!(
                "label {bad} out of range for {} classes",
                self.classes.len()
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u8 {
        self.labels[y * self.width + x]
    }

    /// Row-major indices of all pixels of one class.
    pub fn class_indices(&self, class: u8) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect()
    }

    /// The noiseless ground-truth field: every pixel holds its class matrix.
    pub fn truth_field(&self, looks: u32) -> CovarianceField {
        let pixels = self
            .labels
            .iter()
            .map(|&l| self.classes[l as usize])
            .collect();
        CovarianceField {
            width: self.width,
            height: self.height,
            looks,
            basis: Basis::Pauli,
            pixels,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_parse_and_indices() {
        let r = Rect::parse("1, 2, 3, 2").unwrap();
        assert_eq!(r, Rect::new(1, 2, 3, 2));
        assert_eq!(r.indices(10), vec![21, 22, 23, 31, 32, 33]);
        assert!(Rect::parse("1,2,3").is_err());
    }

    #[test]
    fn label_map_validation() {
        let map = LabelMap {
            width: 2,
            height: 1,
            labels: vec![0, 1],
            classes: vec![HermitianMat::identity()],
            deterministic: vec![false, false],
        };
        assert!(map.validate().is_err()); // label 1 out of range
    }

    #[test]
    fn transpose_roundtrip() {
        let mut f = CovarianceField::new(3, 2, 4, Basis::Pauli);
        f.set(2, 1, HermitianMat::from_diag([1.0, 2.0, 3.0]));
        let t = f.transposed();
        assert_eq!(t.width, 2);
        assert_eq!(t.get(1, 2), f.get(2, 1));
    }
}
