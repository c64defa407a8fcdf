//! Small dense linear algebra: SPD matrices with cached Cholesky factors and
//! random rotations.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use super::rng::RngStream;
use super::NumericsError;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Row-major square matrix times vector.
pub fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d).map(|i| dot(&m[i * d..(i + 1) * d], v)).collect()
}

/// Like [`mat_vec`] but short-circuits an all-zero matrix.
pub fn mat_vec_or_zero(m: &[f64], v: &[f64]) -> Vec<f64> {
    if m.iter().all(|&x| x == 0.0) {
        vec![0.0; v.len()]
    } else {
        mat_vec(m, v)
    }
}

/// Symmetric strictly positive definite matrix together with its lower
/// Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    dim: usize,
    // row-major
    entries: Vec<f64>,
    chol: Vec<f64>,
}

impl SpdMatrix {
    /// Builds from row-major entries, checking symmetry and factorizing.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self, NumericsError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(NumericsError::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(NumericsError::NonFinite("matrix entry"));
        }
        let scale = entries.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in 0..i {
                if (entries[i * dim + j] - entries[j * dim + i]).abs() > 1e-12 * scale {
                    return Err(NumericsError::NotSymmetric);
                }
            }
        }
        let chol = cholesky_lower(dim, &entries)?;
        Ok(Self { dim, entries, chol })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim]).expect("identity is positive definite")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self, NumericsError> {
        let d = diag.len();
        let mut m = vec![0.0; d * d];
        for (i, &v) in diag.iter().enumerate() {
            m[i * d + i] = v;
        }
        Self::new(d, m)
    }

    pub fn scalar(value: f64) -> Result<Self, NumericsError> {
        Self::new(1, vec![value])
    }

    /// `Uᵀ D U` for an orthogonal `U` (row-major) and positive diagonal `D`.
    pub fn rotated_diagonal(rotation: &[f64], diag: &[f64]) -> Result<Self, NumericsError> {
        let d = diag.len();
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = (0..d)
                    .map(|k| rotation[k * d + i] * diag[k] * rotation[k * d + j])
                    .sum();
            }
        }
        // restore exact symmetry lost to rounding
        for i in 0..d {
            for j in 0..i {
                let avg = 0.5 * (m[i * d + j] + m[j * d + i]);
                m[i * d + j] = avg;
                m[j * d + i] = avg;
            }
        }
        Self::new(d, m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn cholesky_factor(&self) -> &[f64] {
        &self.chol
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.entries, v)
    }

    /// `vᵀ S v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            let row = &self.entries[i * d..(i + 1) * d];
            acc += v[i] * dot(row, v);
        }
        acc
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim)
            .map(|i| self.chol[i * self.dim + i].ln())
            .sum::<f64>()
    }

    pub fn det(&self) -> f64 {
        self.log_det().exp()
    }

    /// `L z` with `L Lᵀ = S`.
    pub fn sqrt_apply(&self, z: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| dot(&self.chol[i * d..i * d + i + 1], &z[..=i]))
            .collect()
    }

    /// Solves `L y = v` (forward substitution).
    pub fn solve_lower(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut y = vec![0.0; d];
        for i in 0..d {
            let s = dot(&self.chol[i * d..i * d + i], &y[..i]);
            y[i] = (v[i] - s) / self.chol[i * d + i];
        }
        y
    }

    /// Solves `Lᵀ x = v` (back substitution). Maps `v` to `x` with `xᵀ S x = |v|²`.
    pub fn solve_upper(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut x = vec![0.0; d];
        for i in (0..d).rev() {
            let s: f64 = (i + 1..d).map(|k| self.chol[k * d + i] * x[k]).sum();
            x[i] = (v[i] - s) / self.chol[i * d + i];
        }
        x
    }

    /// `S⁻¹ v`.
    pub fn apply_inverse(&self, v: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(v))
    }

    /// `vᵀ S⁻¹ v`, computed as `|L⁻¹ v|²`.
    pub fn inverse_quad_form(&self, v: &[f64]) -> f64 {
        let y = self.solve_lower(v);
        dot(&y, &y)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::MIN, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::MAX, f64::min)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(self.dim, &self.entries)
    }
}

/// Lower Cholesky factor of a row-major symmetric matrix.
pub fn cholesky_lower(dim: usize, a: &[f64]) -> Result<Vec<f64>, NumericsError> {
    let mut l = vec![0.0; dim * dim];
    for j in 0..dim {
        let mut diag = a[j * dim + j];
        for k in 0..j {
            diag -= l[j * dim + k] * l[j * dim + k];
        }
        if !(diag > 0.0) {
            return Err(NumericsError::NotPositiveDefinite { pivot: j });
        }
        let ljj = diag.sqrt();
        l[j * dim + j] = ljj;
        for i in j + 1..dim {
            let mut s = a[i * dim + j];
            for k in 0..j {
                s -= l[i * dim + k] * l[j * dim + k];
            }
            l[i * dim + j] = s / ljj;
        }
    }
    Ok(l)
}

/// Eigenvalues of a row-major symmetric matrix, ascending.
pub fn symmetric_eigenvalues(dim: usize, a: &[f64]) -> Vec<f64> {
    let m = DMatrix::from_row_slice(dim, dim, a);
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Haar-distributed rotation in SO(d), row-major.
pub fn random_rotation(dim: usize, rng: &mut RngStream) -> Vec<f64> {
    assert!(dim >= 1, "rotation dimension must be at least 1");
    if dim == 1 {
        return vec![1.0];
    }
    let gauss: Vec<f64> = (0..dim * dim).map(|_| StandardNormal.sample(rng)).collect();
    let qr = DMatrix::from_row_slice(dim, dim, &gauss).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i * dim + j] = q[(i, j)];
        }
    }
    out
}
