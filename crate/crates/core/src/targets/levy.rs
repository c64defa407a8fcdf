use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{check_dim, CharacteristicTarget, TargetError};
use crate::numerics::linalg::symmetric_eigenvalues;
use crate::numerics::{dot, mat_vec_or_zero, QuadratureGrid, QuadratureRule};

/// Lebesgue density of a symmetric Lévy measure.
pub type LevyDensity = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Symmetric infinitely divisible law through its Lévy–Khintchine triplet
/// `(Σ, μ, ν)`. The jump integral is a fixed quadrature over the triplet's
/// grid, precomputed at construction.
#[derive(Clone)]
pub struct LevyTriplet {
    dim: usize,
    sigma: Vec<f64>,
    mu: Vec<f64>,
    nu: LevyDensity,
    grid: QuadratureGrid,
    // flattened jump nodes and weight·ν(x) for nodes with ν(x) > 0
    jump_points: Vec<f64>,
    jump_weights: Vec<f64>,
}

impl fmt::Debug for LevyTriplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevyTriplet")
            .field("dim", &self.dim)
            .field("sigma", &self.sigma)
            .field("mu", &self.mu)
            .field("grid", &self.grid)
            .field("jump_nodes", &self.jump_weights.len())
            .finish()
    }
}

impl LevyTriplet {
    /// Default jump grid: trapezoid on `[−25, 25]^d` with 2001 nodes per axis
    /// for d = 1, 301 for d = 2 and 101 for d = 3.
    pub fn default_grid(dim: usize) -> Result<QuadratureGrid, TargetError> {
        let nodes = match dim {
            1 => 2001,
            2 => 301,
            3 => 101,
            _ => {
                return Err(TargetError::Unsupported(format!(
                    "jump integrals need d <= 3, got {dim}"
                )))
            }
        };
        Ok(QuadratureGrid::cube(
            dim,
            -25.0,
            25.0,
            nodes,
            QuadratureRule::Trapezoid,
        )?)
    }

    /// `sigma` is row-major and only needs to be positive semidefinite.
    pub fn new(
        sigma: Vec<f64>,
        mu: Vec<f64>,
        nu: LevyDensity,
        grid: Option<QuadratureGrid>,
    ) -> Result<Self, TargetError> {
        let dim = mu.len();
        if dim == 0 || sigma.len() != dim * dim {
            return Err(TargetError::InvalidParameter(format!(
                "sigma must be {dim}x{dim}"
            )));
        }
        let scale = sigma.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in 0..i {
                if (sigma[i * dim + j] - sigma[j * dim + i]).abs() > 1e-12 * scale {
                    return Err(TargetError::InvalidParameter("sigma must be symmetric".into()));
                }
            }
        }
        if scale > 0.0 && symmetric_eigenvalues(dim, &sigma)[0] < -1e-12 * scale {
            return Err(TargetError::InvalidParameter(
                "sigma must be positive semidefinite".into(),
            ));
        }
        let grid = match grid {
            Some(g) => g,
            None => Self::default_grid(dim)?,
        };
        if grid.dim() != dim {
            return Err(TargetError::Dimension {
                expected: dim,
                got: grid.dim(),
            });
        }
        let mut jump_points = Vec::new();
        let mut jump_weights = Vec::new();
        let mut small_jump_mass = 0.0;
        for (x, w) in grid.nodes() {
            let r2 = dot(&x, &x);
            if r2 == 0.0 {
                // cos(0)−1 and x·sin(0) vanish at the origin
                continue;
            }
            let v = nu(&x);
            let mirrored: Vec<f64> = x.iter().map(|c| -c).collect();
            let v_mirror = nu(&mirrored);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(TargetError::InvalidParameter(format!(
                    "nu must be finite and non-negative, got {v} at {x:?}"
                )));
            }
            if (v - v_mirror).abs() > 1e-10 * v.abs().max(v_mirror.abs()).max(1e-300) {
                return Err(TargetError::InvalidParameter(format!(
                    "nu must be symmetric: nu({x:?}) = {v}, nu(-x) = {v_mirror}"
                )));
            }
            if v > 0.0 {
                small_jump_mass += w * v * r2.min(1.0);
                jump_points.extend_from_slice(&x);
                jump_weights.push(w * v);
            }
        }
        if !small_jump_mass.is_finite() {
            return Err(TargetError::InvalidParameter(
                "integral of min(1,|x|^2) nu is not finite on the grid".into(),
            ));
        }
        Ok(Self {
            dim,
            sigma,
            mu,
            nu,
            grid,
            jump_points,
            jump_weights,
        })
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nu(&self) -> &LevyDensity {
        &self.nu
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    fn jumps(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.jump_points
            .chunks_exact(self.dim)
            .zip(self.jump_weights.iter().copied())
    }

    /// `−½uᵀΣu + iμᵀu + ∫(cos(xᵀu) − 1) ν(x) dx`.
    pub fn cf_exponent(&self, u: &[f64]) -> Complex64 {
        Complex64::new(self.real_exponent(u), dot(&self.mu, u))
    }

    fn real_exponent(&self, u: &[f64]) -> f64 {
        let gauss = -0.5 * dot(u, &mat_vec_or_zero(&self.sigma, u));
        let jump: f64 = self
            .jumps()
            .map(|(x, w)| w * (dot(x, u).cos() - 1.0))
            .sum();
        gauss + jump
    }

    pub fn check_point(&self, u: &[f64]) -> Result<(), TargetError> {
        check_dim(self.dim, u)
    }
}

impl CharacteristicTarget for LevyTriplet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_abs_cf(&self, u: &[f64]) -> f64 {
        self.real_exponent(u)
    }

    /// `−Σu − ∫ x sin(uᵀx) ν(x) dx`.
    fn grad_log_abs_cf(&self, u: &[f64]) -> Result<Vec<f64>, TargetError> {
        self.check_point(u)?;
        let mut g: Vec<f64> = mat_vec_or_zero(&self.sigma, u)
            .into_iter()
            .map(|v| -v)
            .collect();
        for (x, w) in self.jumps() {
            let s = w * dot(x, u).sin();
            for (gi, xi) in g.iter_mut().zip(x) {
                *gi -= s * xi;
            }
        }
        Ok(g)
    }

    fn phase(&self, u: &[f64]) -> Complex64 {
        Complex64::from_polar(1.0, dot(&self.mu, u))
    }
}
