//! Exact-size 3x3 Hermitian matrices and the matrix functions the rest of the
//! pipeline consumes: eigendecomposition, logarithm, Cholesky square root,
//! inverse, condition number and Frobenius norm.
//!
//! Covariance and coherency matrices of fully polarimetric SAR data are 3x3
//! Hermitian positive semi-definite, so the storage is fixed-size: the three
//! real diagonal entries plus the three upper-triangle complex entries. The
//! reconstructed full matrix is Hermitian by construction.
//!
//! All operations are pure functions on value types; identical input bits
//! produce identical output bits regardless of call order or thread count.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Matrix dimension. The whole pipeline works on 3x3 coherency/covariance
/// matrices (full-pol acquisitions under reciprocity).
pub const DIM: usize = 3;

/// Number of distinct upper-triangle entries, `DIM * (DIM - 1) / 2`.
pub const OFF_DIM: usize = 3;

const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative off-diagonal Frobenius threshold for Jacobi convergence.
const JACOBI_TOL: f64 = 1e-14;
/// Eigenvalues in `[-PSD_CLAMP_REL * lambda_max, 0]` are rounding noise of a
/// positive semi-definite matrix and are treated as exactly zero.
const PSD_CLAMP_REL: f64 = 1e-12;

/// Map an upper-triangle index pair (row < col) to the packed offset.
/// Row-major order: (0,1), (0,2), (1,2).
#[inline]
pub const fn off_index(row: usize, col: usize) -> usize {
    // row < col < 3
    row + col - 1
}

/// Dense complex 3x3 matrix, row-major. Used for eigenvectors, unitary
/// factors and intermediate products; Hermitian data lives in [`HermitianMat`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat3(pub [[Complex64; DIM]; DIM]);

impl CMat3 {
    pub fn zero() -> Self {
        CMat3([[Complex64::new(0.0, 0.0); DIM]; DIM])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.0[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for r in 0..DIM {
            for c in 0..DIM {
                out.0[r][c] = self.0[c][r].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &CMat3) -> CMat3 {
        let mut out = CMat3::zero();
        for r in 0..DIM {
            for c in 0..DIM {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..DIM {
                    acc += self.0[r][k] * rhs.0[k][c];
                }
                out.0[r][c] = acc;
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64; DIM]) -> [Complex64; DIM] {
        let mut out = [Complex64::new(0.0, 0.0); DIM];
        for r in 0..DIM {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..DIM {
                acc += self.0[r][k] * v[k];
            }
            out[r] = acc;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for r in 0..DIM {
            for c in 0..DIM {
                s += self.0[r][c].norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn determinant(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn column(&self, c: usize) -> [Complex64; DIM] {
        [self.0[0][c], self.0[1][c], self.0[2][c]]
    }
}

/// 3x3 Hermitian matrix stored as its canonical half: the real diagonal and
/// the upper triangle. The reconstructed full matrix satisfies `M = M^H`
/// exactly by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMat {
    diag: [f64; DIM],
    off: [Complex64; OFF_DIM],
}

impl HermitianMat {
    pub fn new(diag: [f64; DIM], off: [Complex64; OFF_DIM]) -> Self {
        HermitianMat { diag, off }
    }

    pub fn zero() -> Self {
        HermitianMat {
            diag: [0.0; DIM],
            off: [Complex64::new(0.0, 0.0); OFF_DIM],
        }
    }

    pub fn identity() -> Self {
        HermitianMat {
            diag: [1.0; DIM],
            off: [Complex64::new(0.0, 0.0); OFF_DIM],
        }
    }

    pub fn from_diag(d: [f64; DIM]) -> Self {
        HermitianMat {
            diag: d,
            off: [Complex64::new(0.0, 0.0); OFF_DIM],
        }
    }

    pub fn diag(&self) -> &[f64; DIM] {
        &self.diag
    }

    pub fn off(&self) -> &[Complex64; OFF_DIM] {
        &self.off
    }

    /// Full matrix entry, reconstructing the lower triangle by conjugation.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        match row.cmp(&col) {
            std::cmp::Ordering::Equal => Complex64::new(self.diag[row], 0.0),
            std::cmp::Ordering::Less => self.off[off_index(row, col)],
            std::cmp::Ordering::Greater => self.off[off_index(col, row)].conj(),
        }
    }

    pub fn to_full(&self) -> CMat3 {
        let mut m = CMat3::zero();
        for r in 0..DIM {
            for c in 0..DIM {
                m.0[r][c] = self.get(r, c);
            }
        }
        m
    }

    /// Average a raw complex matrix with its adjoint and keep the canonical
    /// half. A matrix that is already Hermitian round-trips bit-identically.
    pub fn hermitianize(raw: &CMat3) -> Self {
        let m = &raw.0;
        let mut diag = [0.0; DIM];
        for (i, d) in diag.iter_mut().enumerate() {
            *d = m[i][i].re;
        }
        let half = |a: Complex64, b: Complex64| (a + b.conj()) * 0.5;
        HermitianMat {
            diag,
            off: [
                half(m[0][1], m[1][0]),
                half(m[0][2], m[2][0]),
                half(m[1][2], m[2][1]),
            ],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.diag.iter().all(|d| d.is_finite())
            && self.off.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for d in &self.diag {
            s += d * d;
        }
        for z in &self.off {
            s += 2.0 * z.norm_sqr();
        }
        s.sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for d in &mut out.diag {
            *d *= s;
        }
        for z in &mut out.off {
            *z *= s;
        }
        out
    }

    /// Accumulate the outer product `k k^H` (used by the speckle simulator
    /// and the weighted window sums).
    pub fn accumulate_outer(&mut self, k: &[Complex64; DIM], weight: f64) {
        for i in 0..DIM {
            self.diag[i] += weight * k[i].norm_sqr();
        }
        self.off[0] += weight * k[0] * k[1].conj();
        self.off[1] += weight * k[0] * k[2].conj();
        self.off[2] += weight * k[1] * k[2].conj();
    }

    /// Accumulate `weight * other` in place.
    pub fn accumulate_scaled(&mut self, other: &HermitianMat, weight: f64) {
        for i in 0..DIM {
            self.diag[i] += weight * other.diag[i];
        }
        for i in 0..OFF_DIM {
            self.off[i] += weight * other.off[i];
        }
    }

    /// Eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Eigenvalues come back sorted descending (ties keep the pre-sort column
    /// order) and each eigenvector is scaled so its largest-modulus component
    /// is real positive, making the output reproducible under degeneracy.
    pub fn eig(&self) -> Result<EigenSystem> {
        let (values, vectors) = jacobi(self, true)?;
        Ok(EigenSystem {
            values,
            vectors: vectors.expect("vectors requested"),
        })
    }

    /// Eigenvalues only (descending); skips accumulating the rotations.
    pub fn eigenvalues(&self) -> Result<[f64; DIM]> {
        let (values, _) = jacobi(self, false)?;
        Ok(values)
    }

    /// Matrix logarithm `V diag(ln lambda) V^H`. Requires positive definite
    /// input; the error carries the offending eigenvalue.
    pub fn log(&self) -> Result<HermitianMat> {
        let eig = self.eig()?;
        let lambda_min = eig.values[DIM - 1];
        if lambda_min <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                eigenvalue: lambda_min,
            });
        }
        Ok(eig.reconstruct(|l| l.ln()))
    }

    /// Inverse square root `V diag(lambda^{-1/2}) V^H` as a dense matrix,
    /// ready for congruence products.
    pub fn inv_sqrt_full(&self) -> Result<CMat3> {
        let eig = self.eig()?;
        let lambda_min = eig.values[DIM - 1];
        if lambda_min <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                eigenvalue: lambda_min,
            });
        }
        let mut out = CMat3::zero();
        for (i, &l) in eig.values.iter().enumerate() {
            let w = 1.0 / l.sqrt();
            let col = eig.vectors.column(i);
            for r in 0..DIM {
                for c in 0..DIM {
                    out.0[r][c] += w * col[r] * col[c].conj();
                }
            }
        }
        Ok(out)
    }

    /// Cholesky factor: lower-triangular `A` with `A A^H = self`.
    ///
    /// Accepts positive semi-definite input: a pivot within rounding noise of
    /// zero zeroes out its column, so rank-deficient matrices (pure targets,
    /// the zero matrix) factor cleanly. Indefinite input is an error.
    pub fn cholesky(&self) -> Result<CMat3> {
        let max_diag = self.diag.iter().cloned().fold(0.0f64, f64::max);
        let tol = PSD_CLAMP_REL * max_diag.max(f64::MIN_POSITIVE);
        let m = self.to_full();
        let mut l = CMat3::zero();
        for j in 0..DIM {
            let mut d = m.0[j][j].re;
            for k in 0..j {
                d -= l.0[j][k].norm_sqr();
            }
            if d > tol {
                let root = d.sqrt();
                l.0[j][j] = Complex64::new(root, 0.0);
                for i in (j + 1)..DIM {
                    let mut s = m.0[i][j];
                    for k in 0..j {
                        s -= l.0[i][k] * l.0[j][k].conj();
                    }
                    l.0[i][j] = s / root;
                }
            } else if d >= -tol {
                // Semi-definite pivot: the exact matrix has a zero column here.
                // A large residual below the pivot means the input was not PSD.
                l.0[j][j] = Complex64::new(0.0, 0.0);
                for i in (j + 1)..DIM {
                    let mut s = m.0[i][j];
                    for k in 0..j {
                        s -= l.0[i][k] * l.0[j][k].conj();
                    }
                    if s.norm() > 1e-6 * max_diag.max(f64::MIN_POSITIVE) {
                        return Err(Error::Indefinite { pivot: d });
                    }
                    l.0[i][j] = Complex64::new(0.0, 0.0);
                }
            } else {
                return Err(Error::Indefinite { pivot: d });
            }
        }
        Ok(l)
    }

    /// Inverse by the adjugate formula. Errors when the determinant is zero
    /// to working precision.
    pub fn inv(&self) -> Result<HermitianMat> {
        let m = self.to_full();
        let det = m.determinant();
        let scale = self.frobenius_norm();
        if !det.re.is_finite() || det.norm() <= f64::EPSILON * scale * scale * scale {
            return Err(Error::Singular);
        }
        let c = &m.0;
        let mut adj = CMat3::zero();
        // adjugate: transpose of the cofactor matrix
        adj.0[0][0] = c[1][1] * c[2][2] - c[1][2] * c[2][1];
        adj.0[0][1] = -(c[0][1] * c[2][2] - c[0][2] * c[2][1]);
        adj.0[0][2] = c[0][1] * c[1][2] - c[0][2] * c[1][1];
        adj.0[1][0] = -(c[1][0] * c[2][2] - c[1][2] * c[2][0]);
        adj.0[1][1] = c[0][0] * c[2][2] - c[0][2] * c[2][0];
        adj.0[1][2] = -(c[0][0] * c[1][2] - c[0][2] * c[1][0]);
        adj.0[2][0] = c[1][0] * c[2][1] - c[1][1] * c[2][0];
        adj.0[2][1] = -(c[0][0] * c[2][1] - c[0][1] * c[2][0]);
        adj.0[2][2] = c[0][0] * c[1][1] - c[0][1] * c[1][0];
        let inv_det = Complex64::new(1.0, 0.0) / det;
        let mut out = CMat3::zero();
        for r in 0..DIM {
            for cidx in 0..DIM {
                out.0[r][cidx] = adj.0[r][cidx] * inv_det;
            }
        }
        Ok(HermitianMat::hermitianize(&out))
    }

    /// Condition number `lambda_max / lambda_min`; `+inf` when the smallest
    /// eigenvalue is non-positive (rank-deficient to working precision).
    pub fn condition_number(&self) -> Result<f64> {
        let values = self.eigenvalues()?;
        if values[DIM - 1] <= 0.0 {
            Ok(f64::INFINITY)
        } else {
            Ok(values[0] / values[DIM - 1])
        }
    }

    /// Reciprocal condition number `lambda_min / lambda_max`; zero or
    /// negative marks a rank-deficient matrix. Never overflows.
    pub fn recip_condition(&self) -> Result<f64> {
        let values = self.eigenvalues()?;
        if values[0] <= 0.0 {
            Ok(0.0)
        } else {
            Ok(values[DIM - 1] / values[0])
        }
    }
}

impl std::ops::Add for HermitianMat {
    type Output = HermitianMat;
    fn add(self, rhs: HermitianMat) -> HermitianMat {
        let mut out = self;
        out.accumulate_scaled(&rhs, 1.0);
        out
    }
}

impl std::ops::Sub for HermitianMat {
    type Output = HermitianMat;
    fn sub(self, rhs: HermitianMat) -> HermitianMat {
        let mut out = self;
        out.accumulate_scaled(&rhs, -1.0);
        out
    }
}

impl std::ops::Mul<f64> for HermitianMat {
    type Output = HermitianMat;
    fn mul(self, rhs: f64) -> HermitianMat {
        self.scale(rhs)
    }
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues sorted
/// descending and the matching orthonormal eigenvector columns.
#[derive(Clone, Copy, Debug)]
pub struct EigenSystem {
    pub values: [f64; DIM],
    pub vectors: CMat3,
}

impl EigenSystem {
    /// Rebuild `V diag(f(lambda)) V^H` in canonical-half storage.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> HermitianMat {
        let mut out = HermitianMat::zero();
        for (i, &l) in self.values.iter().enumerate() {
            let col = self.vectors.column(i);
            out.accumulate_outer(&col, f(l));
        }
        out
    }
}

fn off_norm(a: &CMat3) -> f64 {
    (2.0 * (a.0[0][1].norm_sqr() + a.0[0][2].norm_sqr() + a.0[1][2].norm_sqr())).sqrt()
}

/// One cyclic Jacobi rotation zeroing the (p, q) entry of a Hermitian matrix
/// held as a full CMat3 (upper and lower kept in sync).
#[inline]
fn jacobi_rotate(a: &mut CMat3, v: &mut Option<CMat3>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let s_phase = phase.conj() * s;

    a.0[p][p] = Complex64::new(app - t * r, 0.0);
    a.0[q][q] = Complex64::new(aqq + t * r, 0.0);
    a.0[p][q] = Complex64::new(0.0, 0.0);
    a.0[q][p] = Complex64::new(0.0, 0.0);
    for k in 0..DIM {
        if k == p || k == q {
            continue;
        }
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        let new_kp = akp * c - akq * s_phase;
        let new_kq = akp * s + akq * (phase.conj() * c);
        a.0[k][p] = new_kp;
        a.0[k][q] = new_kq;
        a.0[p][k] = new_kp.conj();
        a.0[q][k] = new_kq.conj();
    }
    if let Some(vm) = v {
        for k in 0..DIM {
            let vkp = vm.0[k][p];
            let vkq = vm.0[k][q];
            vm.0[k][p] = vkp * c - vkq * s_phase;
            vm.0[k][q] = vkp * s + vkq * (phase.conj() * c);
        }
    }
}

fn jacobi(m: &HermitianMat, want_vectors: bool) -> Result<([f64; DIM], Option<CMat3>)> {
    let scale = m.frobenius_norm();
    let mut a = m.to_full();
    let mut v = if want_vectors {
        Some(CMat3::identity())
    } else {
        None
    };
    if scale == 0.0 {
        return Ok(([0.0; DIM], v));
    }

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= JACOBI_TOL * scale {
            converged = true;
            break;
        }
        jacobi_rotate(&mut a, &mut v, 0, 1);
        jacobi_rotate(&mut a, &mut v, 0, 2);
        jacobi_rotate(&mut a, &mut v, 1, 2);
    }
    if !converged && off_norm(&a) > JACOBI_TOL * scale {
        return Err(Error::EigNonConvergence {
            max_sweeps: JACOBI_MAX_SWEEPS,
            matrix: format!("{m:?}"),
        });
    }

    let raw = [a.0[0][0].re, a.0[1][1].re, a.0[2][2].re];
    let mut order = [0usize, 1, 2];
    // stable descending sort; ties keep the original column index
    order.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = [raw[order[0]], raw[order[1]], raw[order[2]]];

    let vectors = v.map(|vm| {
        let mut out = CMat3::zero();
        for (slot, &src) in order.iter().enumerate() {
            let mut col = vm.column(src);
            // phase convention: largest-modulus component real positive
            let mut best = 0usize;
            let mut best_norm = col[0].norm_sqr();
            for (k, z) in col.iter().enumerate().skip(1) {
                let n = z.norm_sqr();
                if n > best_norm {
                    best_norm = n;
                    best = k;
                }
            }
            if best_norm > 0.0 {
                let z = col[best];
                let rot = z.conj() / z.norm();
                for comp in &mut col {
                    *comp *= rot;
                }
            }
            for r in 0..DIM {
                out.0[r][slot] = col[r];
            }
        }
        out
    });

    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn zone1() -> HermitianMat {
        HermitianMat::new(
            [8.03, 2.64, 0.55],
            [
                Complex64::new(-2.19, -2.23),
                Complex64::new(-0.17, -0.15),
                Complex64::new(0.11, -0.03),
            ],
        )
    }

    #[test]
    fn eig_identity() {
        let eig = HermitianMat::identity().eig().unwrap();
        for v in eig.values {
            assert_relative_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn eig_diagonal_table_values() {
        let m = HermitianMat::from_diag([8.03, 2.64, 0.55]);
        let eig = m.eig().unwrap();
        assert_relative_eq!(eig.values[0], 8.03, epsilon = 1e-14);
        assert_relative_eq!(eig.values[1], 2.64, epsilon = 1e-14);
        assert_relative_eq!(eig.values[2], 0.55, epsilon = 1e-14);
        // V = I up to column phase; phase convention makes it exactly I here
        for r in 0..DIM {
            for c in 0..DIM {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert_relative_eq!(eig.vectors.0[r][c].re, expect, epsilon = 1e-12);
                assert_relative_eq!(eig.vectors.0[r][c].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eig_zone1_matches_frozen_cubic_roots() {
        // roots of the characteristic polynomial, computed independently
        let expected = [9.469156811003156, 1.208695770218831, 0.542147418778012];
        let eig = zone1().eig().unwrap();
        for (got, want) in eig.values.iter().zip(expected) {
            assert_relative_eq!(got, &want, max_relative = 1e-12);
        }
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let m = zone1();
        let eig = m.eig().unwrap();
        let rebuilt = eig.reconstruct(|l| l);
        let err = (rebuilt - m).frobenius_norm() / m.frobenius_norm();
        assert!(err < 1e-12, "reconstruction error {err}");

        let v = eig.vectors;
        let vtv = v.adjoint().mul(&v);
        let mut dev = 0.0;
        for r in 0..DIM {
            for c in 0..DIM {
                let expect = if r == c { 1.0 } else { 0.0 };
                dev += (vtv.0[r][c] - Complex64::new(expect, 0.0)).norm_sqr();
            }
        }
        assert!(dev.sqrt() < 1e-12, "V^H V deviation {}", dev.sqrt());
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = HermitianMat::identity().log().unwrap();
        assert!(l.frobenius_norm() < 1e-14);
    }

    #[test]
    fn log_of_diagonal() {
        let m = HermitianMat::from_diag([1f64.exp(), 2f64.exp(), 3f64.exp()]);
        let l = m.log().unwrap();
        assert_relative_eq!(l.get(0, 0).re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(l.get(1, 1).re, 2.0, epsilon = 1e-12);
        assert_relative_eq!(l.get(2, 2).re, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn log_rejects_singular() {
        let err = HermitianMat::from_diag([1.0, 1.0, 0.0]).log().unwrap_err();
        match err {
            Error::NotPositiveDefinite { eigenvalue } => assert!(eigenvalue <= 0.0),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn cholesky_diagonal() {
        let m = HermitianMat::from_diag([4.0, 9.0, 16.0]);
        let l = m.cholesky().unwrap();
        assert_relative_eq!(l.0[0][0].re, 2.0, epsilon = 1e-14);
        assert_relative_eq!(l.0[1][1].re, 3.0, epsilon = 1e-14);
        assert_relative_eq!(l.0[2][2].re, 4.0, epsilon = 1e-14);
    }

    #[test]
    fn cholesky_reconstructs_zone_matrix() {
        let m = HermitianMat::new(
            [75.21, 48.03, 45.82],
            [
                Complex64::new(4.86, 3.24),
                Complex64::new(2.30, 0.22),
                Complex64::new(-0.32, -1.69),
            ],
        );
        let l = m.cholesky().unwrap();
        let rebuilt = HermitianMat::hermitianize(&l.mul(&l.adjoint()));
        let err = (rebuilt - m).frobenius_norm() / m.frobenius_norm();
        assert!(err < 1e-12, "A A^H reconstruction error {err}");
    }

    #[test]
    fn cholesky_semidefinite_and_indefinite() {
        let l = HermitianMat::from_diag([1.0, 0.0, 0.0]).cholesky().unwrap();
        assert_relative_eq!(l.0[0][0].re, 1.0, epsilon = 1e-14);
        assert_eq!(l.0[1][1], Complex64::new(0.0, 0.0));

        assert!(HermitianMat::from_diag([1.0, -1.0, 1.0]).cholesky().is_err());
        // zero pivot with a nonzero residual below it is indefinite
        let bad = HermitianMat::new(
            [0.0, 0.0, 1.0],
            [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert!(bad.cholesky().is_err());
    }

    #[test]
    fn inverse_diagonal_and_basic() {
        let inv = HermitianMat::from_diag([2.0, 4.0, 8.0]).inv().unwrap();
        assert_relative_eq!(inv.diag()[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(inv.diag()[1], 0.25, epsilon = 1e-14);
        assert_relative_eq!(inv.diag()[2], 0.125, epsilon = 1e-14);

        let id = HermitianMat::identity().inv().unwrap();
        assert!((id - HermitianMat::identity()).frobenius_norm() < 1e-14);

        assert!(HermitianMat::from_diag([1.0, 1.0, 0.0]).inv().is_err());
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = zone1();
        let inv = m.inv().unwrap();
        let prod = m.to_full().mul(&inv.to_full());
        let mut dev = 0.0;
        for r in 0..DIM {
            for c in 0..DIM {
                let expect = if r == c { 1.0 } else { 0.0 };
                dev += (prod.0[r][c] - Complex64::new(expect, 0.0)).norm_sqr();
            }
        }
        assert!(dev.sqrt() < 1e-10);
    }

    #[test]
    fn condition_numbers() {
        assert_relative_eq!(
            HermitianMat::identity().condition_number().unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            HermitianMat::from_diag([1.0, 1.0, 1e-7])
                .condition_number()
                .unwrap(),
            1e7,
            max_relative = 1e-12
        );
        assert!(HermitianMat::from_diag([1.0, 0.0, 0.0])
            .condition_number()
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn condition_number_scale_invariant() {
        let m = zone1();
        let k1 = m.condition_number().unwrap();
        let k2 = m.scale(37.5).condition_number().unwrap();
        assert_relative_eq!(k1, k2, max_relative = 1e-12);
    }

    #[test]
    fn frobenius_and_add() {
        assert_relative_eq!(
            HermitianMat::identity().frobenius_norm(),
            3f64.sqrt(),
            epsilon = 1e-15
        );
        let m = zone1();
        assert_eq!(m + HermitianMat::zero(), m);
    }

    #[test]
    fn hermitianize_is_fixed_point_on_hermitian_input() {
        let m = zone1();
        let again = HermitianMat::hermitianize(&m.to_full());
        assert_eq!(m, again);
    }
}
