//! 6-DoF rigid-body dynamics for a REMUS-100-class AUV.
//!
//! Fossen-style formulation in the body frame (x forward, y starboard,
//! z down; world frame NED):
//!
//! ```text
//! M nu_dot = tau(cmd, nu_r) + L(nu_r) - C(nu_r) nu_r - D(nu_r) nu_r - g(attitude)
//! ```
//!
//! where `M` is the rigid-body plus added-mass matrix, `C` the Coriolis /
//! centripetal terms derived from `M`, `D` diagonal linear+quadratic damping,
//! `L` tail-plane crossflow lift (which also provides weathervane stability
//! against the destabilizing Munk moments inside `C`), and `g` hydrostatic
//! restoring from the CB-above-CG lever. Ambient flow enters only through the
//! relative velocity `nu_r`, so disturbances are emergent forces rather than
//! injected accelerations.
//!
//! Integration is semi-implicit Euler on substeps of at most
//! [`MAX_SUBSTEP_DT`] beneath the 20 Hz control period.

use nalgebra::{Matrix6, Quaternion, UnitQuaternion, Vector3, Vector6};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Internal integrator substep ceiling (s); 100 Hz under the 20 Hz control rate.
pub const MAX_SUBSTEP_DT: f64 = 0.01;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("integration produced a non-finite state at t = {time:.3} s (dt too large or corrupt params)")]
    NonFiniteState { time: f64 },
    #[error("invalid vehicle parameters: {0}")]
    InvalidParams(String),
    #[error("quaternion norm {norm} deviates from unity beyond 1e-6")]
    NonUnitQuaternion { norm: f64 },
}

/// Pose and body velocities of one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleState {
    /// World position, NED (m); `position.z` is depth below the surface.
    pub position: Vector3<f64>,
    /// Body-to-world attitude.
    pub attitude: UnitQuaternion<f64>,
    /// Body velocities `[u, v, w, p, q, r]` (m/s, rad/s).
    pub nu: Vector6<f64>,
    /// Simulation time (s).
    pub time: f64,
}

impl VehicleState {
    pub fn at_rest(position: Vector3<f64>, yaw: f64) -> Self {
        Self {
            position,
            attitude: UnitQuaternion::from_euler_angles(0.0, 0.0, yaw),
            nu: Vector6::zeros(),
            time: 0.0,
        }
    }

    pub fn roll(&self) -> f64 {
        self.attitude.euler_angles().0
    }

    /// Pitch, always in `[-pi/2, pi/2]` by construction of the extraction.
    pub fn pitch(&self) -> f64 {
        self.attitude.euler_angles().1
    }

    /// Yaw wrapped to `(-pi, pi]`.
    pub fn yaw(&self) -> f64 {
        crate::util::wrap_angle(self.attitude.euler_angles().2)
    }

    /// Depth below surface (m, positive down).
    pub fn depth(&self) -> f64 {
        self.position.z
    }

    pub fn linear_velocity(&self) -> Vector3<f64> {
        Vector3::new(self.nu[0], self.nu[1], self.nu[2])
    }

    pub fn angular_velocity(&self) -> Vector3<f64> {
        Vector3::new(self.nu[3], self.nu[4], self.nu[5])
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|v| v.is_finite())
            && self.nu.iter().all(|v| v.is_finite())
            && self.attitude.as_vector().iter().all(|v| v.is_finite())
    }
}

/// Fin and propeller setpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuatorCommand {
    /// Rudder deflection (rad); positive yields a positive (nose-right) yaw moment.
    pub rudder: f64,
    /// Stern-plane deflection (rad); positive yields a nose-up pitch moment.
    pub stern_plane: f64,
    /// Propeller speed (rpm), non-negative.
    pub propeller: f64,
}

impl ActuatorCommand {
    pub fn zero() -> Self {
        Self { rudder: 0.0, stern_plane: 0.0, propeller: 0.0 }
    }

    pub fn new(rudder: f64, stern_plane: f64, propeller: f64) -> Self {
        Self { rudder, stern_plane, propeller }
    }
}

/// Hydrodynamic and actuator parameters.
///
/// Coefficients follow the published REMUS-100 family, with propeller thrust
/// and fin lift calibrated so the calm-water envelope matches the vehicle
/// datasheet values (2.3 m/s top speed, ~0.26 rad/s max yaw rate).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    pub mass: f64,
    pub length: f64,
    /// Water density (kg/m^3).
    pub rho: f64,
    pub ixx: f64,
    pub iyy: f64,
    pub izz: f64,
    /// Added mass, positive convention (kg, kg·m^2).
    pub added_mass: [f64; 6],
    /// Linear damping diagonal (N·s/m, N·m·s).
    pub d_linear: [f64; 6],
    /// Quadratic damping diagonal (N·s^2/m^2, N·m·s^2).
    pub d_quadratic: [f64; 6],
    /// Vehicle weight (N). Defaults to `mass * g`.
    pub weight: f64,
    /// Buoyancy (N). Defaults to neutral (`weight`).
    pub buoyancy: f64,
    /// Centre of buoyancy height above centre of gravity (m); restoring lever.
    pub bg_z: f64,
    /// Tail-plane crossflow lift, lateral (N per (m/s)^2).
    pub tail_lift_lateral: f64,
    /// Tail-plane crossflow lift, vertical (N per (m/s)^2).
    pub tail_lift_vertical: f64,
    /// Rudder lift effectiveness (N per (m/s)^2 per rad).
    pub fin_lift_rudder: f64,
    /// Stern-plane lift effectiveness (N per (m/s)^2 per rad).
    pub fin_lift_stern: f64,
    /// Longitudinal station of the tail group (m, negative = aft of CG).
    pub fin_position: f64,
    /// Propeller thrust coefficient (N per rpm^2).
    pub thrust_coeff: f64,
    /// Propeller roll reaction torque coefficient (N·m per rpm^2).
    pub prop_torque_coeff: f64,
    /// Fin deflection limit (rad).
    pub delta_max: f64,
    /// Propeller speed limit (rpm).
    pub n_max: f64,
    /// Fin slew-rate limit (rad/s).
    pub fin_slew: f64,
    /// Propeller slew-rate limit (rpm/s).
    pub prop_slew: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self::remus100()
    }
}

impl VehicleParams {
    /// REMUS-100-class defaults: 1.6 m, 31.9 kg, 2.3 m/s envelope.
    pub fn remus100() -> Self {
        let mass = 31.9;
        let weight = mass * crate::GRAVITY;
        let d_linear = [0.5, 30.0, 30.0, 0.1, 4.0, 4.0];
        let d_quadratic = [1.62, 130.0, 130.0, 0.5, 9.4, 9.4];
        let n_max = 1525.0;
        let v_max = 2.3;
        // Thrust sized so drag balances exactly at the rated top speed.
        let thrust_coeff = (d_linear[0] * v_max + d_quadratic[0] * v_max * v_max) / (n_max * n_max);
        Self {
            mass,
            length: 1.6,
            rho: 1026.0,
            ixx: 0.18,
            iyy: 4.3,
            izz: 4.3,
            added_mass: [0.93, 35.5, 35.5, 0.07, 4.88, 4.88],
            d_linear,
            d_quadratic,
            weight,
            buoyancy: weight,
            bg_z: 0.02,
            tail_lift_lateral: 60.0,
            tail_lift_vertical: 80.0,
            fin_lift_rudder: 17.0,
            fin_lift_stern: 18.0,
            fin_position: -0.7,
            thrust_coeff,
            prop_torque_coeff: 0.0,
            delta_max: 0.35,
            n_max,
            fin_slew: 60f64.to_radians(),
            prop_slew: 500.0,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.mass > 0.0) {
            return Err(DynamicsError::InvalidParams("mass must be > 0".into()));
        }
        if !(self.length > 0.0) {
            return Err(DynamicsError::InvalidParams("length must be > 0".into()));
        }
        if !(self.rho > 0.0) {
            return Err(DynamicsError::InvalidParams("water density must be > 0".into()));
        }
        if !(self.n_max > 0.0) || !(self.delta_max > 0.0) {
            return Err(DynamicsError::InvalidParams("actuator limits must be > 0".into()));
        }
        if self.d_linear.iter().chain(self.d_quadratic.iter()).any(|d| *d < 0.0) {
            return Err(DynamicsError::InvalidParams("damping coefficients must be >= 0".into()));
        }
        Ok(())
    }

    /// Total inertia matrix (rigid body + added mass), diagonal by construction.
    pub fn mass_matrix(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        let rb = [self.mass, self.mass, self.mass, self.ixx, self.iyy, self.izz];
        for i in 0..6 {
            m[(i, i)] = rb[i] + self.added_mass[i];
        }
        m
    }

    /// Validate and precompute; fails if the inertia matrix is not SPD.
    pub fn build(self) -> Result<VehicleModel, DynamicsError> {
        self.validate()?;
        let m = self.mass_matrix();
        let chol = m
            .cholesky()
            .ok_or_else(|| DynamicsError::InvalidParams("inertia matrix is not positive definite".into()))?;
        let m_inv = chol.inverse();
        Ok(VehicleModel { params: self, m_inv })
    }
}

/// A validated vehicle ready to integrate.
#[derive(Debug, Clone)]
pub struct VehicleModel {
    pub params: VehicleParams,
    m_inv: Matrix6<f64>,
}

impl VehicleModel {
    /// Advance the state by `dt` under a command and an ambient NED flow.
    ///
    /// The command is magnitude-clamped defensively; slew limiting is
    /// [`saturate`]'s job. Deterministic given identical inputs.
    pub fn step(
        &self,
        state: &VehicleState,
        cmd: &ActuatorCommand,
        flow: Vector3<f64>,
        dt: f64,
    ) -> Result<VehicleState, DynamicsError> {
        assert!(dt > 0.0, "dt must be positive");
        assert!(flow.iter().all(|v| v.is_finite()), "flow must be finite");
        let cmd = clamp_magnitude(cmd, &self.params);

        let n_sub = (dt / MAX_SUBSTEP_DT).ceil().max(1.0) as usize;
        let h = dt / n_sub as f64;

        let mut s = state.clone();
        for _ in 0..n_sub {
            let flow_body = s.attitude.inverse_transform_vector(&flow);
            let nu_r = Vector6::new(
                s.nu[0] - flow_body.x,
                s.nu[1] - flow_body.y,
                s.nu[2] - flow_body.z,
                s.nu[3],
                s.nu[4],
                s.nu[5],
            );
            let rhs = self.force_sum(&s, &cmd, &nu_r);
            let acc = self.m_inv * rhs;
            s.nu += acc * h;

            // Semi-implicit: kinematics advance with the updated velocities.
            let v_world = s.attitude.transform_vector(&s.linear_velocity());
            s.position += v_world * h;
            s.attitude *= UnitQuaternion::from_scaled_axis(s.angular_velocity() * h);
            s.attitude.renormalize();
            s.time += h;

            if !s.is_finite() {
                return Err(DynamicsError::NonFiniteState { time: s.time });
            }
        }
        Ok(s)
    }

    /// Right-hand side of the body-frame momentum equation.
    fn force_sum(&self, s: &VehicleState, cmd: &ActuatorCommand, nu_r: &Vector6<f64>) -> Vector6<f64> {
        let p = &self.params;
        let (u, v, w, pr, q, r) = (nu_r[0], nu_r[1], nu_r[2], nu_r[3], nu_r[4], nu_r[5]);
        let m = [
            p.mass + p.added_mass[0],
            p.mass + p.added_mass[1],
            p.mass + p.added_mass[2],
            p.ixx + p.added_mass[3],
            p.iyy + p.added_mass[4],
            p.izz + p.added_mass[5],
        ];

        // C(nu_r) nu_r for the diagonal mass matrix.
        let coriolis = Vector6::new(
            m[2] * w * q - m[1] * v * r,
            m[0] * u * r - m[2] * w * pr,
            m[1] * v * pr - m[0] * u * q,
            (m[2] - m[1]) * v * w + (m[5] - m[4]) * q * r,
            (m[0] - m[2]) * u * w + (m[3] - m[5]) * pr * r,
            (m[1] - m[0]) * u * v + (m[4] - m[3]) * pr * q,
        );

        let mut damping = Vector6::zeros();
        for i in 0..6 {
            damping[i] = (p.d_linear[i] + p.d_quadratic[i] * nu_r[i].abs()) * nu_r[i];
        }

        // Hydrostatic restoring (CB above CG); on the subtracted side.
        let (phi, theta, _) = s.attitude.euler_angles();
        let dw = p.weight - p.buoyancy;
        let lever = p.bg_z * p.buoyancy;
        let restoring = Vector6::new(
            dw * theta.sin(),
            -dw * theta.cos() * phi.sin(),
            -dw * theta.cos() * phi.cos(),
            lever * theta.cos() * phi.sin(),
            lever * theta.sin(),
            0.0,
        );

        // Tail crossflow lift: local flow at the tail station, dissipative
        // for any sign of surge, stabilizing in pitch and yaw.
        let ua = u.abs();
        let v_tail = v + p.fin_position * r;
        let w_tail = w - p.fin_position * q;
        let y_tail = -p.tail_lift_lateral * ua * v_tail;
        let z_tail = -p.tail_lift_vertical * ua * w_tail;

        // Control surfaces and propeller.
        let us = u * ua; // signed square of relative surge
        let y_rudder = -p.fin_lift_rudder * us * cmd.rudder;
        let z_stern = p.fin_lift_stern * us * cmd.stern_plane;
        let thrust = p.thrust_coeff * cmd.propeller * cmd.propeller.abs();
        let prop_roll = -p.prop_torque_coeff * cmd.propeller * cmd.propeller.abs();

        let mut tau = Vector6::zeros();
        tau[0] = thrust;
        tau[1] = y_tail + y_rudder;
        tau[2] = z_tail + z_stern;
        tau[3] = prop_roll;
        tau[4] = -p.fin_position * (z_tail + z_stern);
        tau[5] = p.fin_position * (y_tail + y_rudder);

        tau - coriolis - damping - restoring
    }

    /// Kinetic energy `0.5 nu^T M nu` of the current state.
    pub fn kinetic_energy(&self, state: &VehicleState) -> f64 {
        let m = self.params.mass_matrix();
        0.5 * (state.nu.transpose() * m * state.nu)[(0, 0)]
    }

    /// Pendulum potential of the restoring lever, zero at level attitude.
    pub fn restoring_energy(&self, state: &VehicleState) -> f64 {
        let (phi, theta, _) = state.attitude.euler_angles();
        self.params.bg_z * self.params.buoyancy * (1.0 - theta.cos() * phi.cos())
    }
}

fn clamp_magnitude(cmd: &ActuatorCommand, p: &VehicleParams) -> ActuatorCommand {
    ActuatorCommand {
        rudder: cmd.rudder.clamp(-p.delta_max, p.delta_max),
        stern_plane: cmd.stern_plane.clamp(-p.delta_max, p.delta_max),
        propeller: cmd.propeller.clamp(0.0, p.n_max),
    }
}

/// Magnitude-clamp, then slew-limit a raw command against the previous one.
///
/// Idempotent on already-valid commands (`prev == cmd_raw` within limits).
pub fn saturate(p: &VehicleParams, cmd_raw: &ActuatorCommand, prev: &ActuatorCommand, dt: f64) -> ActuatorCommand {
    assert!(dt > 0.0, "dt must be positive");
    let c = clamp_magnitude(cmd_raw, p);
    let slew = |target: f64, prev: f64, rate: f64| -> f64 {
        let max_delta = rate * dt;
        prev + (target - prev).clamp(-max_delta, max_delta)
    };
    ActuatorCommand {
        rudder: slew(c.rudder, prev.rudder, p.fin_slew),
        stern_plane: slew(c.stern_plane, prev.stern_plane, p.fin_slew),
        propeller: slew(c.propeller, prev.propeller, p.prop_slew),
    }
}

/// Rotate a body-frame vector into the world frame.
///
/// Takes a raw quaternion so the unit-norm contract is actually checked;
/// rejects norms off unity by more than 1e-6.
pub fn body_to_world(attitude: &Quaternion<f64>, v_body: &Vector3<f64>) -> Result<Vector3<f64>, DynamicsError> {
    let norm = attitude.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(DynamicsError::NonUnitQuaternion { norm });
    }
    let unit = UnitQuaternion::new_normalize(*attitude);
    Ok(unit.transform_vector(v_body))
}

/// Inverse of [`body_to_world`].
pub fn world_to_body(attitude: &Quaternion<f64>, v_world: &Vector3<f64>) -> Result<Vector3<f64>, DynamicsError> {
    let norm = attitude.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(DynamicsError::NonUnitQuaternion { norm });
    }
    let unit = UnitQuaternion::new_normalize(*attitude);
    Ok(unit.inverse_transform_vector(v_world))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn model() -> VehicleModel {
        VehicleParams::remus100().build().unwrap()
    }

    #[test]
    fn equilibrium_at_rest() {
        let m = model();
        let s0 = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.0);
        let s1 = m.step(&s0, &ActuatorCommand::zero(), Vector3::zeros(), 0.05).unwrap();
        assert!(s1.nu.norm() < 1e-12, "residual velocity {}", s1.nu.norm());
        assert!((s1.position - s0.position).norm() < 1e-12);
    }

    #[test]
    fn downstream_drag_sign() {
        let m = model();
        let s0 = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.0);
        let s1 = m.step(&s0, &ActuatorCommand::zero(), Vector3::new(1.0, 0.0, 0.0), 0.05).unwrap();
        assert!(s1.nu[0] > 0.0, "vehicle should accelerate downstream, got u = {}", s1.nu[0]);
    }

    #[test]
    fn top_speed_envelope() {
        let m = model();
        let mut s = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.0);
        let cmd = ActuatorCommand::new(0.0, 0.0, 1525.0);
        for _ in 0..1200 {
            s = m.step(&s, &cmd, Vector3::zeros(), 0.05).unwrap();
        }
        let u = s.nu[0];
        assert!((u - 2.3).abs() / 2.3 < 0.05, "top speed {u} outside 2.3 +/- 5%");
    }

    #[test]
    fn yaw_rate_ceiling() {
        let m = model();
        let mut s = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.0);
        let cruise = ActuatorCommand::new(0.0, 0.0, 1525.0);
        for _ in 0..600 {
            s = m.step(&s, &cruise, Vector3::zeros(), 0.05).unwrap();
        }
        let turn = ActuatorCommand::new(m.params.delta_max, 0.0, 1525.0);
        let mut r_max: f64 = 0.0;
        for _ in 0..1200 {
            s = m.step(&s, &turn, Vector3::zeros(), 0.05).unwrap();
            r_max = r_max.max(s.nu[5].abs());
        }
        assert!(r_max <= 0.26 * 1.10, "steady yaw rate {r_max} exceeds ceiling");
        assert!(r_max > 0.15, "yaw authority implausibly low: {r_max}");
    }

    #[test]
    fn energy_dissipates_without_restoring_lever() {
        let mut p = VehicleParams::remus100();
        p.bg_z = 0.0; // coincident CG/CB: damping is the only energy path
        let m = p.build().unwrap();
        let mut s = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.0);
        s.nu = Vector6::new(1.5, 0.4, -0.3, 0.1, 0.2, -0.25);
        let e0 = m.kinetic_energy(&s);
        let mut e_prev = e0;
        for _ in 0..2000 {
            s = m.step(&s, &ActuatorCommand::zero(), Vector3::zeros(), 0.05).unwrap();
            let e = m.kinetic_energy(&s);
            assert!(e <= e_prev + 1e-9, "kinetic energy rose: {e_prev} -> {e}");
            e_prev = e;
        }
        assert!(e_prev < 0.05 * e0, "energy should have mostly dissipated: {e0} -> {e_prev}");
    }

    #[test]
    fn total_energy_dissipates_with_restoring_lever() {
        let m = model();
        let mut s = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.0);
        s.nu = Vector6::new(1.0, 0.3, 0.2, 0.05, 0.3, 0.2);
        let mut e_prev = m.kinetic_energy(&s) + m.restoring_energy(&s);
        for _ in 0..400 {
            s = m.step(&s, &ActuatorCommand::zero(), Vector3::zeros(), 0.05).unwrap();
            let e = m.kinetic_energy(&s) + m.restoring_energy(&s);
            assert!(e <= e_prev + 1e-9, "total energy rose: {e_prev} -> {e}");
            e_prev = e;
        }
    }

    #[test]
    fn deterministic_trajectories() {
        let m = model();
        let run = || {
            let mut s = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.3);
            let cmd = ActuatorCommand::new(0.1, -0.05, 900.0);
            for _ in 0..200 {
                s = m.step(&s, &cmd, Vector3::new(0.2, -0.1, 0.0), 0.05).unwrap();
            }
            s
        };
        let a = run();
        let b = run();
        assert_eq!(a.position, b.position);
        assert_eq!(a.nu, b.nu);
    }

    #[test]
    fn substep_convergence() {
        // Integrating at h and h/2 must agree at the 60 s endpoint to < 1 cm.
        let p = VehicleParams::remus100();
        let m = p.build().unwrap();
        let run = |dt: f64| {
            let mut s = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.0);
            let cmd = ActuatorCommand::new(0.0, 0.0, 1200.0);
            let steps = (60.0 / dt).round() as usize;
            for _ in 0..steps {
                s = m.step(&s, &cmd, Vector3::zeros(), dt).unwrap();
            }
            s.position
        };
        let coarse = run(0.01);
        let fine = run(0.005);
        assert!((coarse - fine).norm() < 0.01, "endpoint gap {}", (coarse - fine).norm());
    }

    #[test]
    fn quaternion_stays_normalized() {
        let m = model();
        let mut s = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.0);
        let cmd = ActuatorCommand::new(0.3, 0.2, 1400.0);
        for _ in 0..2000 {
            s = m.step(&s, &cmd, Vector3::zeros(), 0.05).unwrap();
        }
        assert!((s.attitude.as_vector().norm() - 1.0).abs() < 1e-9);
        assert!(s.pitch().abs() <= FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn saturate_clamps_and_slews() {
        let p = VehicleParams::remus100();
        let prev = ActuatorCommand::zero();
        let out = saturate(&p, &ActuatorCommand::new(2.0 * p.delta_max, 0.0, 0.0), &prev, 10.0);
        assert_relative_eq!(out.rudder, p.delta_max);

        // prop slew: 500 rpm/s * 0.05 s = 25 rpm
        let out = saturate(&p, &ActuatorCommand::new(0.0, 0.0, 1525.0), &prev, 0.05);
        assert_relative_eq!(out.propeller, 25.0);

        let valid = ActuatorCommand::new(0.1, -0.1, 800.0);
        let out = saturate(&p, &valid, &valid, 0.05);
        assert_eq!(out, valid);
    }

    #[test]
    fn frame_transforms() {
        let q = UnitQuaternion::identity().into_inner();
        let v = Vector3::new(1.0, 2.0, 3.0);
        assert_relative_eq!(body_to_world(&q, &v).unwrap(), v);

        let q = UnitQuaternion::from_euler_angles(0.0, 0.0, FRAC_PI_2).into_inner();
        let out = body_to_world(&q, &Vector3::new(1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(out, Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-12);

        let bad = Quaternion::new(2.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            body_to_world(&bad, &v),
            Err(DynamicsError::NonUnitQuaternion { .. })
        ));
    }

    #[test]
    fn invalid_mass_matrix_rejected() {
        let mut p = VehicleParams::remus100();
        p.added_mass[1] = -1000.0;
        assert!(matches!(p.build(), Err(DynamicsError::InvalidParams(_))));
    }

    proptest! {
        #[test]
        fn rotation_is_isometric(roll in -1.5f64..1.5, pitch in -1.4f64..1.4, yaw in -3.1f64..3.1,
                                 x in -10.0f64..10.0, y in -10.0f64..10.0, z in -10.0f64..10.0) {
            let q = UnitQuaternion::from_euler_angles(roll, pitch, yaw);
            let v = Vector3::new(x, y, z);
            let w = body_to_world(&q.into_inner(), &v).unwrap();
            prop_assert!((w.norm() - v.norm()).abs() < 1e-9);
            let back = world_to_body(&q.into_inner(), &w).unwrap();
            prop_assert!((back - v).norm() < 1e-9);
        }

        #[test]
        fn saturate_idempotent(r in -0.3f64..0.3, sp in -0.3f64..0.3, n in 0.0f64..1500.0) {
            let p = VehicleParams::remus100();
            let cmd = ActuatorCommand::new(r, sp, n);
            let once = saturate(&p, &cmd, &cmd, 0.05);
            prop_assert_eq!(once, cmd);
        }
    }
}
