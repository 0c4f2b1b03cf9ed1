//! Per-channel controllers converting high-level references into actuator
//! commands.
//!
//! The primary law is the S-surface
//! `u = 2 / (1 + exp(-zeta1 e - zeta2 e_dot)) - 1 + delta_u`; PID and a
//! reference-model SMC with a companion PI depth channel (the legacy
//! simulator's pairing) are drop-in alternatives behind the same
//! [`ControllerBank`] interface.

use crate::dynamics::{saturate, ActuatorCommand, VehicleParams, VehicleState};
use crate::util::wrap_angle;
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// High-level reference command: target pitch (rad), target yaw rate (rad/s),
/// target propeller speed (rpm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceAction {
    pub pitch: f64,
    pub yaw_rate: f64,
    pub rpm: f64,
}

/// Action-space bounds shared by the policy and the bank.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActionBounds {
    pub pitch_max: f64,
    pub yaw_rate_max: f64,
    pub rpm_max: f64,
}

impl Default for ActionBounds {
    fn default() -> Self {
        Self { pitch_max: 0.35, yaw_rate_max: 0.26, rpm_max: 1525.0 }
    }
}

impl ActionBounds {
    pub fn clamp(&self, a: ReferenceAction) -> ReferenceAction {
        ReferenceAction {
            pitch: a.pitch.clamp(-self.pitch_max, self.pitch_max),
            yaw_rate: a.yaw_rate.clamp(-self.yaw_rate_max, self.yaw_rate_max),
            rpm: a.rpm.clamp(0.0, self.rpm_max),
        }
    }
}

// ---------------------------------------------------------------------------
// S-surface
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SSurfaceParams {
    /// Surface coefficient on the error; acts like an error gain.
    pub zeta1: f64,
    /// Surface coefficient on the error derivative; acts like a damping gain.
    pub zeta2: f64,
    /// Feedforward gain on the measured disturbance term.
    pub delta_u_gain: f64,
    /// Actuator units per normalized unit of output.
    pub output_scale: f64,
}

impl Default for SSurfaceParams {
    fn default() -> Self {
        Self { zeta1: 5.0, zeta2: 3.0, delta_u_gain: 0.0, output_scale: 0.35 }
    }
}

/// The sigmoid surface law. The raw surface term lies strictly in (-1, 1);
/// `delta_u` rides on top and downstream saturation bounds the final command.
pub fn s_surface_update(p: &SSurfaceParams, e: f64, e_dot: f64, delta_u: f64) -> f64 {
    2.0 / (1.0 + (-p.zeta1 * e - p.zeta2 * e_dot).exp()) - 1.0 + delta_u
}

// ---------------------------------------------------------------------------
// PID
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PidParams {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Anti-windup clamp on the integral term's contribution.
    pub integral_limit: f64,
    /// Low-pass time constant for the derivative estimate (s); 0 = unfiltered.
    pub derivative_tau: f64,
    pub output_scale: f64,
}

impl Default for PidParams {
    fn default() -> Self {
        Self { kp: 1.2, ki: 0.05, kd: 2.0, integral_limit: 0.5, derivative_tau: 0.1, output_scale: 0.35 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PidState {
    integral: f64,
    deriv: DerivEstimator,
}

pub fn pid_update(p: &PidParams, st: &mut PidState, e: f64, dt: f64, angular: bool) -> f64 {
    assert!(dt > 0.0);
    st.integral = (st.integral + p.ki * e * dt).clamp(-p.integral_limit, p.integral_limit);
    let e_dot = st.deriv.update(e, dt, p.derivative_tau, angular);
    p.kp * e + st.integral + p.kd * e_dot
}

// ---------------------------------------------------------------------------
// Reference-model SMC (the legacy-simulator yaw law)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmcParams {
    /// Natural frequency of the second-order reference model (rad/s).
    pub ref_natural_freq: f64,
    /// Damping ratio of the reference model.
    pub ref_damping: f64,
    /// Sliding-surface gain: `s = e_m_dot + surface_gain * e_m`.
    pub surface_gain: f64,
    /// Linear feedback on the sliding variable (the equivalent term).
    pub feedback_gain: f64,
    /// Switching gain on `sat(s / boundary_layer)`.
    pub switching_gain: f64,
    /// Boundary-layer width;> 0 keeps the law continuous.
    pub boundary_layer: f64,
    pub output_scale: f64,
    /// Companion PI gains for the depth/pitch channel.
    pub pi_kp: f64,
    pub pi_ki: f64,
    pub pi_integral_limit: f64,
}

impl Default for SmcParams {
    fn default() -> Self {
        Self {
            ref_natural_freq: 0.45,
            ref_damping: 1.0,
            surface_gain: 0.6,
            feedback_gain: 1.6,
            switching_gain: 0.35,
            boundary_layer: 0.12,
            output_scale: 0.35,
            pi_kp: 1.5,
            pi_ki: 0.25,
            pi_integral_limit: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SmcState {
    model_pos: f64,
    model_vel: f64,
    initialized: bool,
}

/// Filter the reference through the second-order model, then drive the
/// model-tracking error onto the sliding surface.
pub fn smc_update(
    p: &SmcParams,
    st: &mut SmcState,
    reference: f64,
    actual: f64,
    actual_rate: f64,
    dt: f64,
    angular: bool,
) -> f64 {
    assert!(dt > 0.0);
    if !st.initialized {
        st.model_pos = actual;
        st.model_vel = 0.0;
        st.initialized = true;
    }
    let wn = p.ref_natural_freq;
    let track = if angular { wrap_angle(reference - st.model_pos) } else { reference - st.model_pos };
    let model_acc = wn * wn * track - 2.0 * p.ref_damping * wn * st.model_vel;
    st.model_vel += model_acc * dt;
    st.model_pos += st.model_vel * dt;
    if angular {
        st.model_pos = wrap_angle(st.model_pos);
    }

    let e_m = if angular { wrap_angle(st.model_pos - actual) } else { st.model_pos - actual };
    let e_m_dot = st.model_vel - actual_rate;
    let s = e_m_dot + p.surface_gain * e_m;
    let sat = (s / p.boundary_layer).clamp(-1.0, 1.0);
    p.feedback_gain * s + p.switching_gain * sat
}

// ---------------------------------------------------------------------------
// Shared derivative estimator
// ---------------------------------------------------------------------------

/// Backward difference with a first-order low-pass; uses no future data.
#[derive(Debug, Clone, Copy, Default)]
pub struct DerivEstimator {
    prev: Option<f64>,
    filtered: f64,
}

impl DerivEstimator {
    pub fn update(&mut self, value: f64, dt: f64, tau: f64, angular: bool) -> f64 {
        let raw = match self.prev {
            Some(p) => {
                let diff = if angular { wrap_angle(value - p) } else { value - p };
                diff / dt
            }
            None => 0.0,
        };
        self.prev = Some(value);
        if tau <= 0.0 {
            self.filtered = raw;
        } else {
            self.filtered += (raw - self.filtered) * dt / (tau + dt);
        }
        self.filtered
    }
}

// ---------------------------------------------------------------------------
// Controller bank
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    SSurface,
    Pid,
    /// Reference-model SMC for yaw + PI for the pitch channel.
    Pvs,
}

/// Full parameter set for all three controller kinds; which one runs is
/// selected by `kind`. Keeping them side by side lets the tuning loop swap
/// kinds without rebuilding anything else.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BankParams {
    pub kind: ControllerKind,
    pub bounds: ActionBounds,
    pub yaw_ss: SSurfaceParams,
    pub pitch_ss: SSurfaceParams,
    pub yaw_pid: PidParams,
    pub pitch_pid: PidParams,
    pub yaw_smc: SmcParams,
    /// Error-derivative low-pass time constant (s).
    pub derivative_tau: f64,
    /// Normalization for the measured cross-track flow feeding delta_u (m/s).
    pub flow_scale: f64,
}

impl Default for BankParams {
    fn default() -> Self {
        Self {
            kind: ControllerKind::SSurface,
            bounds: ActionBounds::default(),
            yaw_ss: SSurfaceParams { zeta1: 6.0, zeta2: 14.0, delta_u_gain: 0.0, output_scale: 0.35 },
            pitch_ss: SSurfaceParams { zeta1: 9.0, zeta2: 18.0, delta_u_gain: 0.0, output_scale: 0.35 },
            yaw_pid: PidParams { kp: 1.6, ki: 0.02, kd: 3.5, integral_limit: 0.3, derivative_tau: 0.1, output_scale: 0.35 },
            pitch_pid: PidParams { kp: 2.2, ki: 0.05, kd: 4.5, integral_limit: 0.3, derivative_tau: 0.1, output_scale: 0.35 },
            yaw_smc: SmcParams::default(),
            derivative_tau: 0.1,
            flow_scale: 2.0,
        }
    }
}

/// Per-vehicle controller state: the integrated heading reference, channel
/// filters, and the previous command for slew limiting.
#[derive(Debug, Clone)]
pub struct ControllerBank {
    pub params: BankParams,
    psi_ref: f64,
    yaw_deriv: DerivEstimator,
    pitch_deriv: DerivEstimator,
    yaw_pid_state: PidState,
    pitch_pid_state: PidState,
    yaw_smc_state: SmcState,
    pitch_pi_state: PidState,
    prev_cmd: ActuatorCommand,
}

impl ControllerBank {
    pub fn new(params: BankParams, initial_yaw: f64) -> Self {
        Self {
            params,
            psi_ref: wrap_angle(initial_yaw),
            yaw_deriv: DerivEstimator::default(),
            pitch_deriv: DerivEstimator::default(),
            yaw_pid_state: PidState::default(),
            pitch_pid_state: PidState::default(),
            yaw_smc_state: SmcState::default(),
            pitch_pi_state: PidState::default(),
            prev_cmd: ActuatorCommand::zero(),
        }
    }

    /// Reset per-episode state, keeping the parameters.
    pub fn reset(&mut self, initial_yaw: f64) {
        *self = Self::new(self.params.clone(), initial_yaw);
    }

    /// Current integrated heading reference (rad, wrapped).
    pub fn heading_reference(&self) -> f64 {
        self.psi_ref
    }

    pub fn previous_command(&self) -> ActuatorCommand {
        self.prev_cmd
    }

    /// One 20 Hz controller tick.
    ///
    /// The commanded yaw rate integrates into an internal heading reference;
    /// the yaw channel drives the rudder on `wrap(psi_ref - psi)`, the pitch
    /// channel drives the stern plane on `theta_ref - theta`, and the
    /// propeller slews toward the commanded rpm. `measured_flow` is the
    /// world-frame current estimate feeding the S-surface disturbance term.
    pub fn update(
        &mut self,
        vehicle: &VehicleParams,
        action: ReferenceAction,
        state: &VehicleState,
        measured_flow: Vector3<f64>,
        dt: f64,
    ) -> ActuatorCommand {
        assert!(dt > 0.0);
        let action = self.params.bounds.clamp(action);
        self.psi_ref = wrap_angle(self.psi_ref + action.yaw_rate * dt);

        let e_yaw = wrap_angle(self.psi_ref - state.yaw());
        let e_pitch = action.pitch - state.pitch();
        let tau = self.params.derivative_tau;
        let e_yaw_dot = self.yaw_deriv.update(e_yaw, dt, tau, true);
        let e_pitch_dot = self.pitch_deriv.update(e_pitch, dt, tau, false);

        let flow_body = state.attitude.inverse_transform_vector(&measured_flow);
        let cross_track = flow_body.y / self.params.flow_scale;

        let (rudder, stern) = match self.params.kind {
            ControllerKind::SSurface => {
                let du_yaw = self.params.yaw_ss.delta_u_gain * cross_track;
                let u_yaw = s_surface_update(&self.params.yaw_ss, e_yaw, e_yaw_dot, du_yaw);
                let u_pitch = s_surface_update(&self.params.pitch_ss, e_pitch, e_pitch_dot, 0.0);
                (u_yaw * self.params.yaw_ss.output_scale, u_pitch * self.params.pitch_ss.output_scale)
            }
            ControllerKind::Pid => {
                let u_yaw = pid_update(&self.params.yaw_pid, &mut self.yaw_pid_state, e_yaw, dt, true);
                let u_pitch = pid_update(&self.params.pitch_pid, &mut self.pitch_pid_state, e_pitch, dt, false);
                (u_yaw * self.params.yaw_pid.output_scale, u_pitch * self.params.pitch_pid.output_scale)
            }
            ControllerKind::Pvs => {
                let u_yaw = smc_update(
                    &self.params.yaw_smc,
                    &mut self.yaw_smc_state,
                    self.psi_ref,
                    state.yaw(),
                    state.nu[5],
                    dt,
                    true,
                );
                let pi = PidParams {
                    kp: self.params.yaw_smc.pi_kp,
                    ki: self.params.yaw_smc.pi_ki,
                    kd: 0.0,
                    integral_limit: self.params.yaw_smc.pi_integral_limit,
                    derivative_tau: 0.0,
                    output_scale: self.params.yaw_smc.output_scale,
                };
                let u_pitch = pid_update(&pi, &mut self.pitch_pi_state, e_pitch, dt, false);
                (u_yaw * self.params.yaw_smc.output_scale, u_pitch * pi.output_scale)
            }
        };

        let raw = ActuatorCommand::new(rudder, stern, action.rpm);
        let cmd = saturate(vehicle, &raw, &self.prev_cmd, dt);
        self.prev_cmd = cmd;
        cmd
    }
}
