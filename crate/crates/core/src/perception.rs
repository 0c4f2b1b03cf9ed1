//! Simulated sensor suite and observation assembly.
//!
//! H-ADCP current measurement, forward-fan sonar ranging against terrain and
//! sphere obstacles, USBL position fixes with range-dependent noise, and the
//! normalized body-frame observation vector consumed by the policy.

use crate::dynamics::VehicleState;
use crate::ocean::{SphereObstacle, Terrain};
use crate::util::gauss;
use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PerceptionError {
    #[error("task slot width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
}

/// Noise model and sonar geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorNoiseConfig {
    /// H-ADCP per-axis velocity noise std (m/s); horizontal axes only.
    pub adcp_std: f64,
    /// USBL base position noise std (m).
    pub usbl_base_std: f64,
    /// USBL extra std per 100 m of range (m).
    pub usbl_range_std_per_100m: f64,
    /// Sonar range noise std (m).
    pub sonar_std: f64,
    /// Sonar max range (m).
    pub sonar_max_range: f64,
    /// Rays per elevation row / azimuth column of the forward fan.
    pub sonar_rays_elevation: usize,
    pub sonar_rays_azimuth: usize,
    /// Fan half-angle (rad).
    pub sonar_fan_half_angle: f64,
}

impl Default for SensorNoiseConfig {
    fn default() -> Self {
        Self {
            adcp_std: 0.02,
            usbl_base_std: 0.3,
            usbl_range_std_per_100m: 0.5,
            sonar_std: 0.05,
            sonar_max_range: 50.0,
            sonar_rays_elevation: 3,
            sonar_rays_azimuth: 3,
            sonar_fan_half_angle: 30f64.to_radians(),
        }
    }
}

impl SensorNoiseConfig {
    /// A noiseless copy, for deterministic probes and frame-invariance checks.
    pub fn noiseless(&self) -> Self {
        Self { adcp_std: 0.0, usbl_base_std: 0.0, usbl_range_std_per_100m: 0.0, sonar_std: 0.0, ..self.clone() }
    }

    pub fn sonar_ray_count(&self) -> usize {
        self.sonar_rays_elevation * self.sonar_rays_azimuth
    }
}

/// Normalization scales mapping physical quantities into [-1, 1].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObservationScales {
    pub position: f64,
    pub velocity: f64,
    pub depth: f64,
    pub rate: f64,
}

impl Default for ObservationScales {
    fn default() -> Self {
        Self { position: 100.0, velocity: 4.0, depth: 60.0, rate: 0.26 }
    }
}

/// The assembled, normalized observation. Vectors are body-frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// Target offset in the body frame, scaled by `position`.
    pub p_off: Vector3<f64>,
    /// Measured water velocity in the body frame, scaled by `velocity`.
    pub v_cur: Vector3<f64>,
    /// Water depth below the vehicle (seafloor clearance), scaled by `depth`.
    pub h_d: f64,
    /// Attitude quaternion components `[w, i, j, k]`.
    pub q: [f64; 4],
    /// Body rates, scaled by `rate`.
    pub omega: Vector3<f64>,
    /// Sonar ranges, scaled by max range.
    pub o_obs: Vec<f64>,
    /// Task-specific slots, pre-normalized by the task.
    pub o_task: Vec<f64>,
}

impl Observation {
    /// Fixed width given sonar ray and task slot counts.
    pub fn width(n_rays: usize, task_width: usize) -> usize {
        3 + 3 + 1 + 4 + 3 + n_rays + task_width
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(Self::width(self.o_obs.len(), self.o_task.len()));
        out.extend_from_slice(&[self.p_off.x, self.p_off.y, self.p_off.z]);
        out.extend_from_slice(&[self.v_cur.x, self.v_cur.y, self.v_cur.z]);
        out.push(self.h_d);
        out.extend_from_slice(&self.q);
        out.extend_from_slice(&[self.omega.x, self.omega.y, self.omega.z]);
        out.extend_from_slice(&self.o_obs);
        out.extend_from_slice(&self.o_task);
        out
    }
}

/// H-ADCP measurement: truth plus i.i.d. Gaussian noise on the horizontal
/// axes. The vertical component passes through (it is zero by construction).
pub fn measure_current(true_flow: &Vector3<f64>, cfg: &SensorNoiseConfig, rng: &mut impl Rng) -> Vector3<f64> {
    Vector3::new(
        true_flow.x + cfg.adcp_std * gauss(rng),
        true_flow.y + cfg.adcp_std * gauss(rng),
        true_flow.z,
    )
}

/// USBL fix: truth plus Gaussian noise whose std grows with range.
pub fn usbl_fix(
    true_pos: &Vector3<f64>,
    usv_pos: &Vector3<f64>,
    cfg: &SensorNoiseConfig,
    rng: &mut impl Rng,
) -> Vector3<f64> {
    let range = (true_pos - usv_pos).norm();
    let std = cfg.usbl_base_std + cfg.usbl_range_std_per_100m * (range / 100.0);
    Vector3::new(
        true_pos.x + std * gauss(rng),
        true_pos.y + std * gauss(rng),
        true_pos.z + std * gauss(rng),
    )
}

/// Body-frame direction of each ray in the forward fan.
pub fn sonar_ray_dirs(cfg: &SensorNoiseConfig) -> Vec<Vector3<f64>> {
    let spread = |n: usize, half: f64| -> Vec<f64> {
        if n <= 1 {
            vec![0.0]
        } else {
            (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
        }
    };
    let mut dirs = Vec::with_capacity(cfg.sonar_ray_count());
    for &el in &spread(cfg.sonar_rays_elevation, cfg.sonar_fan_half_angle) {
        for &az in &spread(cfg.sonar_rays_azimuth, cfg.sonar_fan_half_angle) {
            dirs.push(Vector3::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin()));
        }
    }
    dirs
}

/// March a world-frame ray against the heightmap and sphere obstacles;
/// returns the hit distance clamped to `max_range`.
pub fn cast_ray(
    origin: &Vector3<f64>,
    dir_world: &Vector3<f64>,
    terrain: &Terrain,
    obstacles: &[SphereObstacle],
    max_range: f64,
) -> f64 {
    let mut best = max_range;

    // Exact ray-sphere intersections.
    for ob in obstacles {
        let oc = origin - ob.center;
        let b = oc.dot(dir_world);
        let c = oc.norm_squared() - ob.radius * ob.radius;
        let disc = b * b - c;
        if disc >= 0.0 {
            let t = -b - disc.sqrt();
            if t > 0.0 && t < best {
                best = t;
            }
        }
    }

    // March against the seabed, then bisect the bracketing step.
    let step = 0.25;
    let below = |p: &Vector3<f64>| p.z >= terrain.depth_at(p.x, p.y);
    let mut t_prev = 0.0;
    let mut t = step;
    while t <= best {
        let p = origin + dir_world * t;
        if below(&p) {
            let (mut lo, mut hi) = (t_prev, t);
            for _ in 0..24 {
                let mid = 0.5 * (lo + hi);
                if below(&(origin + dir_world * mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            best = best.min(0.5 * (lo + hi));
            break;
        }
        t_prev = t;
        t += step;
    }
    best
}

/// Full sonar sweep with range noise, normalized to `[0, 1]` by max range.
pub fn sonar_scan(
    state: &VehicleState,
    terrain: &Terrain,
    obstacles: &[SphereObstacle],
    cfg: &SensorNoiseConfig,
    rng: &mut impl Rng,
) -> Vec<f64> {
    sonar_ray_dirs(cfg)
        .iter()
        .map(|d| {
            let dir_world = state.attitude.transform_vector(d);
            let r = cast_ray(&state.position, &dir_world, terrain, obstacles, cfg.sonar_max_range);
            let noisy = (r + cfg.sonar_std * gauss(rng)).clamp(0.0, cfg.sonar_max_range);
            noisy / cfg.sonar_max_range
        })
        .collect()
}

/// Assemble the observation: rotate world vectors into the body frame, apply
/// normalization, and append the task slots.
pub fn build_observation(
    state: &VehicleState,
    target_world: &Vector3<f64>,
    measured_flow_world: &Vector3<f64>,
    clearance_below: f64,
    sonar: Vec<f64>,
    task_slots: Vec<f64>,
    scales: &ObservationScales,
    expected_task_width: usize,
) -> Result<Observation, PerceptionError> {
    if task_slots.len() != expected_task_width {
        return Err(PerceptionError::WidthMismatch { expected: expected_task_width, got: task_slots.len() });
    }
    let clamp1 = |v: f64| v.clamp(-1.0, 1.0);
    let to_body = |v: &Vector3<f64>| state.attitude.inverse_transform_vector(v);

    let p_off = to_body(&(target_world - state.position)) / scales.position;
    let v_cur = to_body(measured_flow_world) / scales.velocity;
    let q = state.attitude.as_ref();
    Ok(Observation {
        p_off: p_off.map(clamp1),
        v_cur: v_cur.map(clamp1),
        h_d: clamp1(clearance_below / scales.depth),
        q: [q.w, q.i, q.j, q.k],
        omega: (state.angular_velocity() / scales.rate).map(clamp1),
        o_obs: sonar,
        o_task: task_slots,
    })
}
