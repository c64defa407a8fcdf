use num_complex::Complex64;

use super::{check_dim, CharacteristicTarget, TargetError};
use crate::numerics::{gamma, norm};

/// Independent CGMY log-prices observed at maturity `t`, damped by `R`.
///
/// Coordinate `k` has `X_T = log s0 + L_T` with `L` a CGMY process under the
/// risk-neutral drift. As a [`CharacteristicTarget`] this evaluates
/// `F[π](u − iR) = ∏ₖ φ(uₖ − iRₖ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CgmyParams {
    pub c: f64,
    pub g: f64,
    pub m: f64,
    pub y: f64,
    pub r: f64,
    pub t: f64,
    pub s0: f64,
    damping: Vec<f64>,
    drift: f64,
    // C·Γ(−Y)
    jump_scale: f64,
}

impl CgmyParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        c: f64,
        g: f64,
        m: f64,
        y: f64,
        r: f64,
        t: f64,
        s0: f64,
        damping: Vec<f64>,
    ) -> Result<Self, TargetError> {
        let bad = |msg: String| Err(TargetError::InvalidParameter(msg));
        if !(c >= 0.0) || !(g > 0.0) || !(m > 0.0) {
            return bad(format!("need C >= 0, G > 0, M > 0; got C={c}, G={g}, M={m}"));
        }
        if !(y > 0.0 && y < 2.0) {
            return bad(format!("Y must lie in (0, 2), got {y}"));
        }
        if y == 1.0 {
            return Err(TargetError::Unsupported(
                "Y = 1 hits the pole of Gamma(-Y); the limiting model is not implemented".into(),
            ));
        }
        if !(t > 0.0) || !(s0 > 0.0) || !r.is_finite() {
            return bad(format!("need T > 0, S0 > 0 and finite r; got T={t}, S0={s0}, r={r}"));
        }
        if damping.is_empty() {
            return bad("damping vector must have at least one coordinate".into());
        }
        for (k, &rk) in damping.iter().enumerate() {
            if !(rk > -g && rk <= 0.0) {
                return Err(TargetError::InvalidParameter(format!(
                    "damping R[{k}] = {rk} outside the strip (-G, 0] with G = {g}"
                )));
            }
        }
        let jump_scale = c * gamma(-y)?;
        let drift = cgmy_drift_value(c, g, m, y, r)?;
        Ok(Self {
            c,
            g,
            m,
            y,
            r,
            t,
            s0,
            damping,
            drift,
            jump_scale,
        })
    }

    /// The parameters of the put-on-maximum study: C=1, G=5, M=5, Y=0.5,
    /// r=0.1, T=1, S0=100 and R = −1.5 in every coordinate.
    pub fn reference(dim: usize) -> Self {
        Self::new(1.0, 5.0, 5.0, 0.5, 0.1, 1.0, 100.0, vec![-1.5; dim])
            .expect("reference parameters are valid")
    }

    pub fn damping(&self) -> &[f64] {
        &self.damping
    }

    /// Returns the same model with a different damping vector (and dimension).
    pub fn with_damping(&self, damping: Vec<f64>) -> Result<Self, TargetError> {
        Self::new(self.c, self.g, self.m, self.y, self.r, self.t, self.s0, damping)
    }

    /// Risk-neutral drift `r − CΓ(−Y)[(M−1)^Y − M^Y + (G+1)^Y − G^Y]`.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn discount(&self) -> f64 {
        (-self.r * self.t).exp()
    }

    /// `log φ(w)` for one coordinate at a complex argument.
    pub fn log_cf_complex(&self, w: Complex64) -> Complex64 {
        let i = Complex64::i();
        let y = self.y;
        let bracket = (self.m - i * w).powf(y) - self.m.powf(y) + (self.g + i * w).powf(y)
            - self.g.powf(y);
        i * w * (self.s0.ln() + self.drift * self.t) + self.t * self.jump_scale * bracket
    }

    fn coordinate_log_cf(&self, k: usize, uk: f64) -> Complex64 {
        self.log_cf_complex(Complex64::new(uk, -self.damping[k]))
    }

    /// `log F[π](u − iR)`.
    pub fn damped_log_cf(&self, u: &[f64]) -> Complex64 {
        u.iter()
            .enumerate()
            .map(|(k, &uk)| self.coordinate_log_cf(k, uk))
            .sum()
    }

    /// `F[π](u − iR)`; checks the point dimension.
    pub fn damped_cf(&self, u: &[f64]) -> Result<Complex64, TargetError> {
        check_dim(self.damping.len(), u)?;
        Ok(self.damped_log_cf(u).exp())
    }
}

/// Risk-neutral CGMY drift; needs `M > 1` for `E[e^{L_1}]` to exist.
pub fn cgmy_drift_value(c: f64, g: f64, m: f64, y: f64, r: f64) -> Result<f64, TargetError> {
    if !(m > 1.0) {
        return Err(TargetError::InvalidParameter(format!(
            "drift needs M > 1 (finite exponential moment), got M = {m}"
        )));
    }
    if c == 0.0 {
        return Ok(r);
    }
    let bracket = (m - 1.0).powf(y) - m.powf(y) + (g + 1.0).powf(y) - g.powf(y);
    Ok(r - c * gamma(-y)? * bracket)
}

impl CharacteristicTarget for CgmyParams {
    fn dim(&self) -> usize {
        self.damping.len()
    }

    fn cf(&self, u: &[f64]) -> Complex64 {
        self.damped_log_cf(u).exp()
    }

    fn log_abs_cf(&self, u: &[f64]) -> f64 {
        self.damped_log_cf(u).re
    }

    /// Central differences of each coordinate's log-modulus, step `1e-5·(1 + |u|)`.
    fn grad_log_abs_cf(&self, u: &[f64]) -> Result<Vec<f64>, TargetError> {
        check_dim(self.damping.len(), u)?;
        let h = 1e-5 * (1.0 + norm(u));
        let g: Vec<f64> = u
            .iter()
            .enumerate()
            .map(|(k, &uk)| {
                (self.coordinate_log_cf(k, uk + h).re - self.coordinate_log_cf(k, uk - h).re)
                    / (2.0 * h)
            })
            .collect();
        if g.iter().all(|v| v.is_finite()) {
            Ok(g)
        } else {
            Err(TargetError::Singular(u.to_vec()))
        }
    }

    fn phase(&self, u: &[f64]) -> Complex64 {
        Complex64::from_polar(1.0, self.damped_log_cf(u).im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn drift_reference_value() {
        // 50-digit evaluation: 0.019721267897231968...
        let mu = cgmy_drift_value(1.0, 5.0, 5.0, 0.5, 0.1).unwrap();
        assert_relative_eq!(mu, 0.019_721_267_897_231_968, max_relative = 1e-13);
        assert_eq!(cgmy_drift_value(0.0, 5.0, 5.0, 0.5, 0.07).unwrap(), 0.07);
        assert!(cgmy_drift_value(1.0, 5.0, 1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn symmetric_drift_sign() {
        // G = M: bracket (M−1)^Y + (M+1)^Y − 2M^Y < 0 by concavity and Γ(−0.5) < 0,
        // so the compensator is negative; 50-digit value for M = 3
        let mu = cgmy_drift_value(1.0, 3.0, 3.0, 0.5, 0.0).unwrap();
        assert!(mu < 0.0);
        assert_relative_eq!(mu, -0.176_848_542_473_796_75, max_relative = 1e-12);
    }

    #[test]
    fn undamped_cf_is_one_at_origin() {
        let p = CgmyParams::new(1.0, 5.0, 5.0, 0.5, 0.1, 1.0, 1.0, vec![0.0]).unwrap();
        let v = p.cf(&[0.0]);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn martingale_condition() {
        let p = CgmyParams::new(1.0, 5.0, 5.0, 0.5, 0.1, 1.0, 1.0, vec![0.0]).unwrap();
        let e = p.log_cf_complex(Complex64::new(0.0, -1.0)).exp();
        assert_relative_eq!(e.re, (0.1f64).exp(), max_relative = 1e-13);
        assert!(e.im.abs() < 1e-13);
    }

    #[test]
    fn damped_value_at_origin() {
        // F[π](−iR) = E[e^{R X}] with R = −1.5, S0 = 1; 50-digit reference
        let p = CgmyParams::new(1.0, 5.0, 5.0, 0.5, 0.1, 1.0, 1.0, vec![-1.5]).unwrap();
        let v = p.damped_cf(&[0.0]).unwrap();
        assert_relative_eq!(v.re, 1.166_532_265_174_114_9, max_relative = 1e-13);
        assert!(v.im.abs() < 1e-14);
        let mu = p.drift();
        let closed = (1.5 * -mu + gamma(-0.5).unwrap()
            * (6.5f64.sqrt() - 5f64.sqrt() + 3.5f64.sqrt() - 5f64.sqrt()))
        .exp();
        assert_relative_eq!(v.re, closed, max_relative = 1e-14);
    }

    #[test]
    fn modulus_decays() {
        let p = CgmyParams::reference(1);
        let mut last = f64::INFINITY;
        for u in 1..=100 {
            let m = p.log_abs_cf(&[u as f64]);
            assert!(m < last);
            last = m;
        }
    }

    #[test]
    fn strip_is_enforced() {
        assert!(CgmyParams::new(1.0, 5.0, 5.0, 0.5, 0.1, 1.0, 100.0, vec![-5.0]).is_err());
        assert!(CgmyParams::new(1.0, 5.0, 5.0, 0.5, 0.1, 1.0, 100.0, vec![0.5]).is_err());
        assert!(matches!(
            CgmyParams::new(1.0, 5.0, 5.0, 1.0, 0.1, 1.0, 100.0, vec![-1.5]),
            Err(TargetError::Unsupported(_))
        ));
    }

    #[test]
    fn finite_difference_gradient_is_odd_in_modulus() {
        let p = CgmyParams::reference(2);
        let g1 = p.grad_log_abs_cf(&[0.8, -2.0]).unwrap();
        let g2 = p.grad_log_abs_cf(&[-0.8, 2.0]).unwrap();
        // φ(−u − iR) = conj φ(u − iR) for a real law, so the modulus is even
        assert!((g1[0] + g2[0]).abs() < 1e-8 && (g1[1] + g2[1]).abs() < 1e-8);
    }
}
