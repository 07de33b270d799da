//! Speckle filtering for polarimetric SAR covariance images.
//!
//! The centerpiece is an iterative bilateral filter over rasters of 3x3
//! Hermitian positive semi-definite matrices. Radiometric similarity between
//! pixels is measured by one of three matrix distances (symmetrized
//! Kullback-Leibler divergence, affine-invariant geodesic, log-Euclidean),
//! combined with a spatial Gaussian kernel and iterated to progressively
//! refine the estimate. Around the filter the crate provides a Monte Carlo
//! speckle simulator, the Cloude-Pottier H/alpha decomposition, Pauli RGB
//! rendering, quantitative quality measures (reconstruction error, edge
//! error, equivalent number of looks), and file formats for covariance
//! rasters and label maps.

pub mod bilateral;
pub mod constants;
pub mod distances;
pub mod error;
pub mod field;
pub mod hermitian;
pub mod metrics;
pub mod oracles;
pub mod polarimetry;
pub mod raster;
pub mod rng;
pub mod speckle;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Basis, CovarianceField, LabelMap, Rect};
pub use hermitian::{CMat3, EigenSystem, HermitianMat, DIM};

pub use num_complex::Complex64;
