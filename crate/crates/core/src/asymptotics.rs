//! Long-time asymptotics of the beam-splitter walk on the line started in
//! `|0,1>`, from stationary-phase evaluation of the momentum integrals.
//!
//! The dispersion of the upper band is `omega_+(theta) = arccos(|t| cos(theta - eta))`
//! (so `e^{i omega_+}` is the `+` eigenvalue of the uniform ring), and
//! `omega_- = -omega_+`. The group velocity `omega_+'` is bounded by `|t|`,
//! which sets the ballistic front of the walk.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::spectral::transmission_phase;
use crate::UNITARITY_TOL;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    pub t_mag: f64,
    pub r_mag: f64,
    pub eta: f64,
    /// `arctan(|r| / |t|)`, equal to `omega_+(eta)`.
    pub mu: f64,
}

impl AsymptoticParams {
    pub fn new(t: Complex64, r: Complex64) -> Result<Self> {
        let norm = t.norm_sqr() + r.norm_sqr();
        if (norm - 1.0).abs() > UNITARITY_TOL {
            return Err(WalkError::NotUnitary(format!(
                "|t|^2 + |r|^2 = {norm} (expected 1)"
            )));
        }
        let t_mag = t.norm();
        if !(t_mag > 0.0 && t_mag < 1.0) {
            return Err(WalkError::InvalidParameter(format!(
                "asymptotics need 0 < |t| < 1, got {t_mag}"
            )));
        }
        let r_mag = r.norm();
        Ok(AsymptoticParams {
            t_mag,
            r_mag,
            eta: transmission_phase(t),
            mu: r_mag.atan2(t_mag),
        })
    }

    /// Real `t = |t| e^{i eta}` with `|r| = sqrt(1 - |t|^2)`.
    pub fn from_magnitude(t_mag: f64, eta: f64) -> Result<Self> {
        let t = Complex64::from_polar(t_mag, eta);
        Self::new(t, Complex64::new((1.0 - t_mag * t_mag).max(0.0).sqrt(), 0.0))
    }

    pub fn omega_plus(&self, theta: f64) -> f64 {
        (self.t_mag * (theta - self.eta).cos()).clamp(-1.0, 1.0).acos()
    }

    pub fn omega_minus(&self, theta: f64) -> f64 {
        -self.omega_plus(theta)
    }

    /// Group velocity `omega_+'(theta) = S(theta) / C(theta)`.
    pub fn omega_plus_prime(&self, theta: f64) -> f64 {
        let x = theta - self.eta;
        self.t_mag * x.sin() / self.c_of(x)
    }

    /// `omega_+''(theta) = |t| |r|^2 cos(theta - eta) / C(theta)^3`.
    pub fn omega_plus_second(&self, theta: f64) -> f64 {
        let x = theta - self.eta;
        self.t_mag * self.r_mag * self.r_mag * x.cos() / self.c_of(x).powi(3)
    }

    fn c_of(&self, x: f64) -> f64 {
        (1.0 - (self.t_mag * x.cos()).powi(2)).sqrt()
    }

    /// Angle in `[0, pi/2]` with `sin^2 gamma = alpha^2 |r|^2 / (|t|^2 (1 - alpha^2))`;
    /// `None` when `|alpha| > |t|`.
    pub fn gamma(&self, alpha: f64) -> Option<f64> {
        if alpha.abs() > self.t_mag {
            return None;
        }
        let s2 = alpha * alpha * self.r_mag * self.r_mag
            / (self.t_mag * self.t_mag * (1.0 - alpha * alpha));
        Some(s2.clamp(0.0, 1.0).sqrt().asin())
    }

    /// `arctan(|r| / sqrt(|t|^2 - alpha^2))`, the value of `omega_+` at the
    /// stationary point `eta + 2 pi - gamma`.
    pub fn nu(&self, alpha: f64) -> Option<f64> {
        if alpha.abs() > self.t_mag {
            return None;
        }
        Some(self.r_mag.atan2((self.t_mag * self.t_mag - alpha * alpha).sqrt()))
    }

    /// Solutions of `omega_+'(theta) = -alpha` in `[0, 2 pi)`. Empty beyond
    /// the front `|alpha| > |t|`; a single point exactly at the front.
    pub fn stationary_points(&self, alpha: f64) -> Vec<f64> {
        let Some(gamma) = self.gamma(alpha) else {
            return Vec::new();
        };
        let wrap = |x: f64| x.rem_euclid(2.0 * PI);
        let (a, b) = if alpha >= 0.0 {
            (self.eta + gamma + PI, self.eta + 2.0 * PI - gamma)
        } else {
            (self.eta + gamma, self.eta + PI - gamma)
        };
        let (a, b) = (wrap(a), wrap(b));
        let d = (a - b).abs();
        if d < 1e-12 || (2.0 * PI - d) < 1e-12 {
            vec![a]
        } else {
            let mut v = vec![a, b];
            v.sort_by(f64::total_cmp);
            v
        }
    }

    /// Edge probability at fixed `j` for large `tau`.
    pub fn p_fixed_j(&self, j: i64, tau: u64) -> f64 {
        let parity = if (j + tau as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let phase = tau as f64 * self.mu + PI / 4.0;
        self.r_mag / (PI * tau as f64 * self.t_mag)
            * ((1.0 + parity) * phase.cos().powi(2) + (1.0 - parity) * phase.sin().powi(2))
    }

    /// Non-oscillating part of [`AsymptoticParams::p_scaled`]:
    /// `|r| / (pi tau sqrt(|t|^2 - alpha^2) (1 - alpha))`.
    pub fn scaled_envelope(&self, alpha: f64, tau: u64) -> Option<f64> {
        if !(0.0..self.t_mag).contains(&alpha) {
            return None;
        }
        Some(
            self.r_mag
                / (PI * tau as f64 * (self.t_mag * self.t_mag - alpha * alpha).sqrt() * (1.0 - alpha)),
        )
    }

    /// Edge probability at `j = alpha tau` for large `tau`.
    pub fn p_scaled(&self, alpha: f64, tau: u64) -> Result<ScaledAsymptotic> {
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(WalkError::InvalidParameter(format!(
                "scaled asymptotics need alpha >= 0, got {alpha}"
            )));
        }
        let Some(envelope) = self.scaled_envelope(alpha, tau) else {
            return Ok(ScaledAsymptotic::BeyondFront);
        };
        let gamma = self.gamma(alpha).expect("alpha < |t|");
        let nu = self.nu(alpha).expect("alpha < |t|");
        let tf = tau as f64;
        let sign = if tau.is_multiple_of(2) { 1.0 } else { -1.0 };
        let first = 1.0 + alpha * sign * (PI * alpha * tf).cos();
        let second = 1.0 + sign * (2.0 * tf * (alpha * gamma - nu) - PI * alpha * tf).sin();
        Ok(ScaledAsymptotic::Ballistic(envelope * first * second))
    }
}

/// Result of the scaled (`j = alpha tau`) asymptotic formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaledAsymptotic {
    Ballistic(f64),
    /// `alpha >= |t|`: no stationary points, the probability decays faster
    /// than any inverse power of `tau`.
    BeyondFront,
}

impl ScaledAsymptotic {
    pub fn value(&self) -> f64 {
        match *self {
            ScaledAsymptotic::Ballistic(p) => p,
            ScaledAsymptotic::BeyondFront => 0.0,
        }
    }

    pub fn is_beyond_front(&self) -> bool {
        matches!(self, ScaledAsymptotic::BeyondFront)
    }
}

/// Half-width `j*` of the region holding all but `epsilon` of the probability
/// after `tau` steps: `ceil(|t| tau)` plus a buffer of `10 + tau^{1/3}` (the
/// width of the transition layer at the front), widened by `log10(1/eps)/2`
/// for `epsilon < 0.01`. The free walk (`|t| = 1`) has no buffer. Never
/// exceeds `tau`, the reach of a walk started on edge `(0, 1)`.
pub fn ballistic_front(t_mag: f64, tau: u64, epsilon: f64) -> Result<u64> {
    if tau == 0 {
        return Err(WalkError::InvalidParameter("tau must be >= 1".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(WalkError::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if !(0.0..=1.0).contains(&t_mag) {
        return Err(WalkError::InvalidParameter(format!("|t| = {t_mag} outside [0, 1]")));
    }
    if (t_mag - 1.0).abs() < UNITARITY_TOL {
        return Ok(tau);
    }
    let widen = (0.5 * (1.0 / epsilon).log10()).max(1.0);
    let margin = (widen * (10.0 + (tau as f64).cbrt())).ceil() as u64;
    let core = (t_mag * tau as f64 - 1e-9).ceil() as u64;
    Ok((core + margin).min(tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn hadamard() -> AsymptoticParams {
        AsymptoticParams::from_magnitude(FRAC_1_SQRT_2, 0.0).unwrap()
    }

    #[test]
    fn dispersion_at_band_extremes() {
        let p = hadamard();
        assert!((p.omega_plus(p.eta) - PI / 4.0).abs() < 1e-15);
        assert!((p.omega_plus(p.eta) - p.mu).abs() < 1e-15);
        assert!((p.omega_plus(p.eta + PI) - (PI - p.mu)).abs() < 1e-15);
        assert!(p.omega_plus_prime(p.eta).abs() < 1e-15);
        assert!((p.omega_plus_second(p.eta) - p.t_mag / p.r_mag).abs() < 1e-14);
        assert!((p.omega_plus_second(p.eta + PI) + p.t_mag / p.r_mag).abs() < 1e-14);
    }

    #[test]
    fn stationary_points_cases() {
        let p = AsymptoticParams::from_magnitude(0.6, 0.4).unwrap();
        let at_zero = p.stationary_points(0.0);
        let mut expect = vec![p.eta, p.eta + PI];
        expect.sort_by(f64::total_cmp);
        assert_eq!(at_zero.len(), 2);
        for (a, b) in at_zero.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(p.stationary_points(0.61).is_empty());
        assert_eq!(p.stationary_points(0.6).len(), 1);
    }

    #[test]
    fn gamma_reaches_quarter_turn_at_the_front() {
        let p = AsymptoticParams::from_magnitude(0.6, 0.0).unwrap();
        assert!((p.gamma(0.6).unwrap() - PI / 2.0).abs() < 1e-7);
    }

    #[test]
    fn scaled_formula_reduces_at_origin() {
        let p = hadamard();
        assert!((p.nu(0.0).unwrap() - p.mu).abs() < 1e-15);
        assert_eq!(p.gamma(0.0), Some(0.0));
        let env = p.scaled_envelope(0.0, 100).unwrap();
        assert!((env - p.r_mag / (PI * 100.0 * p.t_mag)).abs() < 1e-18);
    }

    #[test]
    fn scaled_beyond_front_and_errors() {
        let p = hadamard();
        let s = p.p_scaled(0.9, 100).unwrap();
        assert!(s.is_beyond_front());
        assert_eq!(s.value(), 0.0);
        assert!(p.p_scaled(-0.1, 100).is_err());
    }

    #[test]
    fn fixed_j_braces_average_to_one() {
        let p = AsymptoticParams::from_magnitude(0.8, 0.2).unwrap();
        for tau in [7u64, 100, 1001] {
            let mean = (p.p_fixed_j(0, tau) + p.p_fixed_j(1, tau)) / 2.0;
            let base = p.r_mag / (PI * tau as f64 * p.t_mag);
            assert!((mean - base).abs() < 1e-15 * base.max(1.0));
        }
    }

    #[test]
    fn front_examples() {
        assert_eq!(ballistic_front(1.0, 37, 0.01).unwrap(), 37);
        let j = ballistic_front(FRAC_1_SQRT_2, 1000, 0.01).unwrap();
        assert_eq!(j, 708 + 20);
        let j50 = ballistic_front(FRAC_1_SQRT_2, 50, 0.01).unwrap();
        assert!((36..=50).contains(&j50));
        assert!(ballistic_front(0.5, 0, 0.01).is_err());
        assert!(ballistic_front(0.5, 10, 1.5).is_err());
        assert!(ballistic_front(0.5, 1000, 1e-6).unwrap() > ballistic_front(0.5, 1000, 0.01).unwrap());
    }
}
