//! Frozen directional wave field: linear superposition of seeded components.

use super::spectrum::{jonswap_spectrum, solve_dispersion, WaveSpectrumParams};
use super::OceanError;
use crate::util::seeded_rng;
use rand::Rng;
use std::f64::consts::{PI, TAU};
use std::io::Write;

/// The sea repeats with this period (s); component frequencies are snapped to
/// its harmonic grid so distinct components are exactly orthogonal over one
/// period, which pins the sampled variance to `sum(a^2)/2`.
pub const REPEAT_PERIOD_S: f64 = 2000.0;

/// One frozen spectral component.
#[derive(Debug, Clone, Copy)]
pub struct WaveComponent {
    /// Amplitude (m).
    pub amplitude: f64,
    /// Wavenumber (1/m), satisfying the dispersion relation at the field depth.
    pub wavenumber: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// Propagation direction (rad).
    pub theta: f64,
    /// Phase offset (rad).
    pub phase: f64,
}

/// Immutable discretization of the directional sea; all queries are pure.
#[derive(Debug, Clone)]
pub struct WaveField {
    components: Vec<WaveComponent>,
    depth: f64,
    seed: u64,
}

/// Component amplitude from spectral density, spreading value and bin sizes:
/// `a = sqrt(2 S D df dtheta)`.
pub fn component_amplitude(s: f64, d: f64, df: f64, dtheta: f64) -> f64 {
    (2.0 * s * d * df * dtheta).sqrt()
}

impl WaveField {
    /// Discretize the spectrum into `n_freq * n_dir` components.
    ///
    /// Frequencies sit on uniform bins over `[f_min, f_max]`, staggered per
    /// direction index and snapped to the [`REPEAT_PERIOD_S`] harmonic grid so
    /// every component oscillates at a distinct frequency. Directions span
    /// `heading + [-pi/2, pi/2]` inclusive, weighted by `D(theta) = cos^2` of
    /// the offset from the principal heading. Phases are i.i.d. uniform
    /// `[0, 2 pi)` from the seed; amplitudes do not depend on the seed.
    pub fn build(params: &WaveSpectrumParams, seed: u64) -> Result<Self, OceanError> {
        params.validate()?;
        let n_f = params.n_freq;
        let n_d = params.n_dir;
        let df = (params.f_max - params.f_min) / n_f as f64;
        let dtheta = if n_d > 1 { PI / (n_d - 1) as f64 } else { PI };

        let grid = 1.0 / REPEAT_PERIOD_S;
        let mut rng = seeded_rng(seed);
        let mut components = Vec::with_capacity(n_f * n_d);
        let mut last_idx: u64 = 0;
        for i in 0..n_f {
            for j in 0..n_d {
                // Stagger within the bin so no two components share a frequency.
                let f_raw = params.f_min + (i as f64 + (j as f64 + 0.5) / n_d as f64) * df;
                let mut idx = (f_raw / grid).round() as u64;
                if idx <= last_idx {
                    idx = last_idx + 1;
                }
                last_idx = idx;
                let f = idx as f64 * grid;

                let offset = if n_d > 1 { -PI / 2.0 + j as f64 * dtheta } else { 0.0 };
                let theta = params.heading + offset;
                let spreading = offset.cos() * offset.cos();

                let s = jonswap_spectrum(f, params)?;
                let amplitude = component_amplitude(s, spreading, df, dtheta);
                let wavenumber = solve_dispersion(f, params.depth)?;
                let phase = rng.gen_range(0.0..TAU);
                components.push(WaveComponent {
                    amplitude,
                    wavenumber,
                    omega: TAU * f,
                    theta,
                    phase,
                });
            }
        }
        Ok(Self { components, depth: params.depth, seed })
    }

    pub fn components(&self) -> &[WaveComponent] {
        &self.components
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Theoretical stationary variance of the elevation, `sum(a^2) / 2`.
    pub fn total_variance(&self) -> f64 {
        self.components.iter().map(|c| 0.5 * c.amplitude * c.amplitude).sum()
    }

    /// Surface elevation eta(x, y, t) (m).
    pub fn surface_elevation(&self, x: f64, y: f64, t: f64) -> f64 {
        let mut eta = 0.0;
        for c in &self.components {
            let arg = c.wavenumber * (x * c.theta.cos() + y * c.theta.sin()) - c.omega * t + c.phase;
            eta += c.amplitude * arg.cos();
        }
        eta
    }

    /// Horizontal orbital velocity at depth `z` (m, negative down from the
    /// surface), per Airy theory with `cosh[k(z+h)]/sinh(kh)` attenuation.
    pub fn wave_velocity(&self, x: f64, y: f64, z: f64, t: f64) -> Result<(f64, f64), OceanError> {
        if z > 0.0 || z < -self.depth {
            return Err(OceanError::DomainError(format!(
                "z = {z} outside water column [-{}, 0]",
                self.depth
            )));
        }
        let (mut vx, mut vy) = (0.0, 0.0);
        for c in &self.components {
            let arg = c.wavenumber * (x * c.theta.cos() + y * c.theta.sin()) - c.omega * t + c.phase;
            let speed = c.amplitude * c.omega * depth_attenuation(c.wavenumber, z, self.depth) * arg.cos();
            vx += speed * c.theta.cos();
            vy += speed * c.theta.sin();
        }
        Ok((vx, vy))
    }

    /// Dump components as CSV for inspection: `f_hz,theta_rad,amplitude_m,wavenumber,phase_rad`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "f_hz,theta_rad,amplitude_m,wavenumber,phase_rad")?;
        for c in &self.components {
            writeln!(
                w,
                "{:.10},{:.10},{:.10},{:.10},{:.10}",
                c.omega / TAU,
                c.theta,
                c.amplitude,
                c.wavenumber,
                c.phase
            )?;
        }
        Ok(())
    }
}

/// `cosh[k(z+h)] / sinh(kh)` in overflow-safe exponential form.
fn depth_attenuation(k: f64, z: f64, h: f64) -> f64 {
    // cosh(k(z+h)) / sinh(kh) = e^{kz} (1 + e^{-2k(z+h)}) / (1 - e^{-2kh})
    let num = (k * z).exp() * (1.0 + (-2.0 * k * (z + h)).exp());
    let den = 1.0 - (-2.0 * k * h).exp();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_component_params() -> WaveSpectrumParams {
        WaveSpectrumParams {
            f_min: 0.095,
            f_max: 0.105,
            n_freq: 2,
            n_dir: 1,
            ..WaveSpectrumParams::default()
        }
    }

    /// Two components near 0.2 Hz: kh ~ 9.7 at 60 m, effectively deep water.
    fn deep_water_params() -> WaveSpectrumParams {
        WaveSpectrumParams {
            f_p: 0.19,
            f_min: 0.18,
            f_max: 0.22,
            n_freq: 2,
            n_dir: 1,
            ..WaveSpectrumParams::default()
        }
    }

    #[test]
    fn amplitude_formula_oracle() {
        // a = sqrt(2 * S(f_p) * 1 * 0.01 * pi/18) with S(f_p) ~ 58.4.
        let p = WaveSpectrumParams::default();
        let s = jonswap_spectrum(p.f_p, &p).unwrap();
        let a = component_amplitude(s, 1.0, 0.01, PI / 18.0);
        let expected = (2.0 * s * 0.01 * (PI / 18.0)).sqrt();
        assert_eq!(a, expected);
        assert!((a - 0.451).abs() < 0.002, "a = {a}");
    }

    #[test]
    fn edge_directions_have_zero_amplitude() {
        let p = WaveSpectrumParams { n_dir: 9, ..WaveSpectrumParams::default() };
        let f = WaveField::build(&p, 1).unwrap();
        for c in f.components() {
            let offset = c.theta - p.heading;
            if (offset.abs() - PI / 2.0).abs() < 1e-12 {
                assert!(c.amplitude < 1e-12, "cos^2 spreading must vanish at +/- pi/2");
            }
        }
        // The two edge bins exist for every frequency row.
        let zero_amp = f.components().iter().filter(|c| c.amplitude < 1e-12).count();
        assert_eq!(zero_amp, 2 * p.n_freq);
    }

    #[test]
    fn seed_determinism() {
        let p = WaveSpectrumParams::default();
        let a = WaveField::build(&p, 42).unwrap();
        let b = WaveField::build(&p, 42).unwrap();
        let c = WaveField::build(&p, 43).unwrap();
        for (x, y) in a.components().iter().zip(b.components()) {
            assert_eq!(x.phase, y.phase);
            assert_eq!(x.amplitude, y.amplitude);
        }
        let mut phases_differ = false;
        for (x, y) in a.components().iter().zip(c.components()) {
            assert_eq!(x.amplitude, y.amplitude, "amplitudes are seed-independent");
            assert_eq!(x.omega, y.omega, "frequencies are seed-independent");
            if x.phase != y.phase {
                phases_differ = true;
            }
        }
        assert!(phases_differ);
    }

    #[test]
    fn distinct_frequencies_and_dispersion_residuals() {
        let p = WaveSpectrumParams::default();
        let f = WaveField::build(&p, 7).unwrap();
        let mut prev = 0.0;
        for c in f.components() {
            assert!(c.omega > prev, "component frequencies must be strictly increasing");
            prev = c.omega;
            let omega2 = c.omega * c.omega;
            let r = (crate::GRAVITY * c.wavenumber * (c.wavenumber * p.depth).tanh() - omega2).abs() / omega2;
            assert!(r < 1e-9, "dispersion residual {r}");
            assert!(c.amplitude >= 0.0 && c.wavenumber > 0.0);
        }
    }

    #[test]
    fn elevation_single_cosine() {
        let p = single_component_params();
        let f = WaveField::build(&p, 3).unwrap();
        // At x = y = 0, t picked so the leading component's argument is zero.
        let c = f.components()[0];
        let t = c.phase / c.omega;
        let eta = {
            // Evaluate only the one nonzero... both components are nonzero here;
            // instead check against a direct sum.
            let direct: f64 = f
                .components()
                .iter()
                .map(|c| c.amplitude * (-c.omega * t + c.phase).cos())
                .sum();
            let got = f.surface_elevation(0.0, 0.0, t);
            assert!((got - direct).abs() < 1e-12);
            got
        };
        let bound: f64 = f.components().iter().map(|c| c.amplitude).sum();
        assert!(eta.abs() <= bound + 1e-12);
    }

    #[test]
    fn elevation_bounded_by_amplitude_sum() {
        let p = WaveSpectrumParams::default();
        let f = WaveField::build(&p, 9).unwrap();
        let bound: f64 = f.components().iter().map(|c| c.amplitude).sum();
        for i in 0..500 {
            let t = i as f64 * 1.7;
            let eta = f.surface_elevation(30.0, -12.0, t);
            assert!(eta.abs() <= bound);
        }
    }

    #[test]
    fn sampled_variance_matches_spectrum() {
        let p = WaveSpectrumParams::default();
        let f = WaveField::build(&p, 2024).unwrap();
        let dt = 0.05;
        let n = (REPEAT_PERIOD_S / dt) as usize;
        let (mut s1, mut s2) = (0.0, 0.0);
        for i in 0..n {
            let eta = f.surface_elevation(25.0, 40.0, i as f64 * dt);
            s1 += eta;
            s2 += eta * eta;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        let expected = f.total_variance();
        assert!(
            (var - expected).abs() / expected < 0.05,
            "sampled {var} vs spectral {expected}"
        );
    }

    #[test]
    fn velocity_zero_without_amplitude() {
        let mut p = WaveSpectrumParams::default();
        p.alpha = 1e-30;
        let f = WaveField::build(&p, 5).unwrap();
        let (vx, vy) = f.wave_velocity(0.0, 0.0, -10.0, 3.0).unwrap();
        assert!(vx.abs() < 1e-10 && vy.abs() < 1e-10);
    }

    #[test]
    fn deep_water_surface_speed() {
        // Single deep-water component at z = 0: |v| ~ a * omega * coth(kh) ~ a * omega.
        let p = deep_water_params();
        let f = WaveField::build(&p, 3).unwrap();
        let c = f.components()[0];
        let kh = c.wavenumber * p.depth;
        assert!(kh > 5.0, "setup should be deep water, kh = {kh}");
        let att = depth_attenuation(c.wavenumber, 0.0, p.depth);
        assert!((att - 1.0).abs() < 1e-3, "coth(kh) ~ 1, got {att}");

        let att_bed = depth_attenuation(c.wavenumber, -p.depth, p.depth);
        let expected_bed = 1.0 / (kh.sinh());
        assert!((att_bed - expected_bed).abs() / expected_bed < 1e-9);
        assert!(att_bed > 0.0);
    }

    #[test]
    fn attenuation_monotone_with_depth() {
        let p = WaveSpectrumParams::default();
        let f = WaveField::build(&p, 8).unwrap();
        for c in f.components().iter().step_by(37) {
            let mut prev = depth_attenuation(c.wavenumber, 0.0, p.depth);
            for i in 1..=20 {
                let z = -(p.depth) * i as f64 / 20.0;
                let a = depth_attenuation(c.wavenumber, z, p.depth);
                assert!(a <= prev + 1e-12, "attenuation must not grow with depth");
                prev = a;
            }
        }
    }

    #[test]
    fn velocity_rejects_out_of_column() {
        let p = WaveSpectrumParams::default();
        let f = WaveField::build(&p, 8).unwrap();
        assert!(f.wave_velocity(0.0, 0.0, 0.5, 0.0).is_err());
        assert!(f.wave_velocity(0.0, 0.0, -p.depth - 1.0, 0.0).is_err());
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let p = WaveSpectrumParams::default();
        let f = WaveField::build(&p, 8).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "f_hz,theta_rad,amplitude_m,wavenumber,phase_rad");
        assert_eq!(lines.count(), p.n_freq * p.n_dir);
    }
}
