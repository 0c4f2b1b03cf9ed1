//! JONSWAP spectral density and the linear-wave dispersion relation.

use super::OceanError;
use crate::GRAVITY;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Parameters of the directional JONSWAP sea.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveSpectrumParams {
    /// Energy scale alpha (dimensionless).
    pub alpha: f64,
    /// Peak frequency (Hz).
    pub f_p: f64,
    /// Peak enhancement factor.
    pub gamma_peak: f64,
    /// Peak shape below the peak.
    pub sigma_a: f64,
    /// Peak shape above the peak.
    pub sigma_b: f64,
    /// Water depth (m).
    pub depth: f64,
    /// Lower frequency cut (Hz).
    pub f_min: f64,
    /// Upper frequency cut (Hz).
    pub f_max: f64,
    /// Number of frequency bins.
    pub n_freq: usize,
    /// Number of direction bins over the +/- pi/2 spreading fan.
    pub n_dir: usize,
    /// Principal wave heading (rad, NED yaw convention).
    pub heading: f64,
}

impl Default for WaveSpectrumParams {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            f_p: 0.1,
            gamma_peak: 3.3,
            sigma_a: 0.07,
            sigma_b: 0.09,
            depth: 60.0,
            f_min: 0.05,
            f_max: 0.5,
            n_freq: 32,
            n_dir: 16,
            heading: 0.0,
        }
    }
}

impl WaveSpectrumParams {
    pub fn validate(&self) -> Result<(), OceanError> {
        let bad = |m: &str| Err(OceanError::InvalidParams(m.into()));
        if !(self.alpha > 0.0) {
            return bad("alpha must be > 0");
        }
        if !(0.0 < self.f_min && self.f_min < self.f_p && self.f_p < self.f_max) {
            return bad("require 0 < f_min < f_p < f_max");
        }
        if !(self.gamma_peak >= 1.0) {
            return bad("gamma_peak must be >= 1");
        }
        if !(self.sigma_a > 0.0 && self.sigma_b > 0.0) {
            return bad("sigma_a and sigma_b must be > 0");
        }
        if !(self.depth > 0.0) {
            return bad("depth must be > 0");
        }
        if self.n_freq < 2 || self.n_dir < 1 {
            return bad("need n_freq >= 2 and n_dir >= 1");
        }
        Ok(())
    }
}

/// JONSWAP spectral density S(f) in m^2 s.
///
/// `sigma = sigma_a` for `f <= f_p`, `sigma_b` above; continuous at the peak.
pub fn jonswap_spectrum(f: f64, p: &WaveSpectrumParams) -> Result<f64, OceanError> {
    if !(f > 0.0) {
        return Err(OceanError::DomainError(format!("frequency must be > 0, got {f}")));
    }
    let sigma = if f <= p.f_p { p.sigma_a } else { p.sigma_b };
    let base = p.alpha * GRAVITY * GRAVITY / (TAU.powi(4) * f.powi(5))
        * (-1.25 * (p.f_p / f).powi(4)).exp();
    let r = (-((f - p.f_p) * (f - p.f_p)) / (2.0 * sigma * sigma * p.f_p * p.f_p)).exp();
    Ok(base * p.gamma_peak.powf(r))
}

/// Solve `(2 pi f)^2 = g k tanh(k h)` for the wavenumber `k`.
///
/// Newton iteration with a bisection safeguard; the residual is driven below
/// 1e-12 relative, comfortably inside the 1e-9 contract.
pub fn solve_dispersion(f: f64, h: f64) -> Result<f64, OceanError> {
    if !(f > 0.0) || !(h > 0.0) {
        return Err(OceanError::DomainError(format!("require f > 0 and h > 0, got f = {f}, h = {h}")));
    }
    let omega2 = (TAU * f) * (TAU * f);
    let residual = |k: f64| GRAVITY * k * (k * h).tanh() - omega2;

    // Bracket: the dispersion function is monotone increasing in k.
    let mut lo = 0.0;
    let mut hi = (omega2 / GRAVITY).max(TAU * f / (GRAVITY * h).sqrt()) * 2.0 + 1e-12;
    let mut guard = 0;
    while residual(hi) < 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(OceanError::ConvergenceError { f, h });
        }
    }

    let mut k = omega2 / GRAVITY; // deep-water guess
    for _ in 0..200 {
        let r = residual(k);
        if r.abs() / omega2 < 1e-12 {
            return Ok(k);
        }
        if r > 0.0 {
            hi = k;
        } else {
            lo = k;
        }
        let th = (k * h).tanh();
        let d = GRAVITY * th + GRAVITY * k * h * (1.0 - th * th);
        let next = k - r / d;
        k = if next.is_finite() && next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    let r = residual(k);
    if r.abs() / omega2 < 1e-9 {
        Ok(k)
    } else {
        Err(OceanError::ConvergenceError { f, h })
    }
}
