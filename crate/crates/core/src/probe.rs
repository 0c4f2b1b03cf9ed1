//! Fixed-reference tracking probes.
//!
//! A probe replays a frozen heading/depth/rpm reference series through the
//! controller bank and the full dynamics, producing the per-channel traces
//! the tuning loop summarizes. References reach the bank through the same
//! high-level action interface the policy uses: the heading goal is turned
//! into a rate-limited yaw-rate command and the depth goal into a clamped
//! pitch command.

use crate::control::{ControllerBank, ReferenceAction};
use crate::dynamics::{DynamicsError, VehicleModel, VehicleState};
use crate::ocean::{SeaCondition, WaveField};
use crate::trace::ChannelTrace;
use crate::util::{seeded_rng, wrap_angle};
use nalgebra::Vector3;
use rand::Rng;

/// Depth-error to commanded-pitch gain (rad per m) used by probes.
pub const DEPTH_GUIDANCE_GAIN: f64 = 0.15;

/// Frozen reference series sampled at `dt`.
#[derive(Debug, Clone)]
pub struct ReferenceSeries {
    pub dt: f64,
    /// Heading goals (rad).
    pub heading: Vec<f64>,
    /// Depth goals (m, positive down).
    pub depth: Vec<f64>,
    /// Propeller goals (rpm).
    pub rpm: Vec<f64>,
}

impl ReferenceSeries {
    pub fn len(&self) -> usize {
        self.heading.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heading.is_empty()
    }

    /// Step references: hold the initial values, then step heading and depth
    /// at `step_time` and hold to the end.
    pub fn steps(
        duration: f64,
        dt: f64,
        step_time: f64,
        heading0: f64,
        heading1: f64,
        depth0: f64,
        depth1: f64,
        rpm: f64,
    ) -> Self {
        let n = (duration / dt).round() as usize;
        let mut heading = Vec::with_capacity(n);
        let mut depth = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 * dt;
            if t < step_time {
                heading.push(heading0);
                depth.push(depth0);
            } else {
                heading.push(heading1);
                depth.push(depth1);
            }
        }
        Self { dt, heading, depth, rpm: vec![rpm; n] }
    }

    /// Reference signals recorded from a seeded target walk: heading follows
    /// the target's course, depth follows the target's depth. This mimics the
    /// command stream a tracking task produces, with smooth stretches and
    /// occasional rapid turns.
    pub fn from_target_walk(seed: u64, duration: f64, dt: f64, depth_band: (f64, f64), rpm: f64) -> Self {
        let mut rng = seeded_rng(seed);
        let n = (duration / dt).round() as usize;
        let mut heading = Vec::with_capacity(n);
        let mut depth = Vec::with_capacity(n);
        let mut course = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let mut z = 0.5 * (depth_band.0 + depth_band.1);
        let mut turn_rate = 0.0;
        let mut climb = 0.0;
        for i in 0..n {
            // Re-draw maneuver intents every few seconds.
            if i % (5.0 / dt) as usize == 0 {
                turn_rate = rng.gen_range(-0.12..0.12);
                climb = rng.gen_range(-0.15..0.15);
            }
            course = wrap_angle(course + turn_rate * dt);
            z = (z + climb * dt).clamp(depth_band.0, depth_band.1);
            heading.push(course);
            depth.push(z);
        }
        Self { dt, heading, depth, rpm: vec![rpm; n] }
    }
}

/// Environment a probe runs in; `None` field means calm water.
pub struct ProbeEnv<'a> {
    pub field: Option<&'a WaveField>,
    pub condition: Option<&'a SeaCondition>,
}

impl ProbeEnv<'_> {
    pub fn calm() -> ProbeEnv<'static> {
        ProbeEnv { field: None, condition: None }
    }

    fn flow(&self, pos: &Vector3<f64>, t: f64, max_depth: f64) -> Vector3<f64> {
        match (self.field, self.condition) {
            (Some(f), Some(c)) => {
                let clamped = Vector3::new(pos.x, pos.y, pos.z.clamp(0.0, max_depth));
                c.total_flow(f, &clamped, t).unwrap_or_else(|_| Vector3::zeros())
            }
            _ => Vector3::zeros(),
        }
    }
}

/// Traces produced by one probe run.
#[derive(Debug, Clone)]
pub struct ProbeOutcome {
    pub yaw: ChannelTrace,
    pub depth: ChannelTrace,
    pub final_state: VehicleState,
}

impl ProbeOutcome {
    pub fn yaw_rms(&self) -> f64 {
        self.yaw.rms_error()
    }

    pub fn depth_rms(&self) -> f64 {
        self.depth.rms_error()
    }
}

/// Run the bank against a frozen reference series.
pub fn run_tracking_probe(
    model: &VehicleModel,
    bank: &mut ControllerBank,
    refs: &ReferenceSeries,
    env: &ProbeEnv,
    initial: VehicleState,
) -> Result<ProbeOutcome, DynamicsError> {
    let dt = refs.dt;
    let bounds = bank.params.bounds;
    let mut state = initial;
    bank.reset(state.yaw());

    let mut yaw_trace = ChannelTrace::new(dt, model.params.delta_max, true);
    let mut depth_trace = ChannelTrace::new(dt, model.params.delta_max, false);
    let max_depth = env.field.map(|f| f.depth()).unwrap_or(f64::MAX);

    for i in 0..refs.len() {
        let heading_goal = refs.heading[i];
        let depth_goal = refs.depth[i];

        // Heading goal -> rate-limited yaw-rate command against the bank's
        // internal reference; depth goal -> clamped pitch command.
        let yaw_rate = (wrap_angle(heading_goal - bank.heading_reference()) / dt)
            .clamp(-bounds.yaw_rate_max, bounds.yaw_rate_max);
        let pitch = (DEPTH_GUIDANCE_GAIN * (state.depth() - depth_goal)).clamp(-bounds.pitch_max, bounds.pitch_max);
        let action = ReferenceAction { pitch, yaw_rate, rpm: refs.rpm[i] };

        let flow = env.flow(&state.position, state.time, max_depth);
        let cmd = bank.update(&model.params, action, &state, flow, dt);

        yaw_trace.push(heading_goal, state.yaw(), cmd.rudder);
        depth_trace.push(depth_goal, state.depth(), cmd.stern_plane);

        state = model.step(&state, &cmd, flow, dt)?;
    }

    Ok(ProbeOutcome { yaw: yaw_trace, depth: depth_trace, final_state: state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{BankParams, ControllerKind};
    use crate::dynamics::VehicleParams;

    fn run_step_probe(kind: ControllerKind) -> ProbeOutcome {
        let model = VehicleParams::remus100().build().unwrap();
        let mut params = BankParams::default();
        params.kind = kind;
        let mut bank = ControllerBank::new(params, 0.0);
        // 45 deg heading step and 5 m depth step after 5 s of settling.
        let refs = ReferenceSeries::steps(90.0, 0.05, 5.0, 0.0, 45f64.to_radians(), 20.0, 25.0, 1200.0);
        let initial = VehicleState::at_rest(Vector3::new(0.0, 0.0, 20.0), 0.0);
        run_tracking_probe(&model, &mut bank, &refs, &ProbeEnv::calm(), initial).unwrap()
    }

    #[test]
    fn ssurface_tracks_heading_step() {
        let out = run_step_probe(ControllerKind::SSurface);
        let n = out.yaw.len();
        // Error under 2 deg from 35 s (30 s after the step) to the end.
        let start = (35.0 / 0.05) as usize;
        for i in start..n {
            assert!(
                out.yaw.error(i).abs() < 2f64.to_radians(),
                "yaw error {:.4} rad at t = {:.1}s",
                out.yaw.error(i),
                i as f64 * 0.05
            );
        }
        // Overshoot under 15% of the 45 deg step.
        let peak = (0..n).map(|i| out.yaw.actual[i]).fold(f64::MIN, f64::max);
        let step = 45f64.to_radians();
        assert!(peak - step <= 0.15 * step, "overshoot {:.3} rad", peak - step);
    }

    #[test]
    fn ssurface_tracks_depth_step() {
        let out = run_step_probe(ControllerKind::SSurface);
        let n = out.depth.len();
        let start = (65.0 / 0.05) as usize;
        for i in start..n.min((90.0 / 0.05) as usize) {
            assert!(
                out.depth.error(i).abs() < 0.3,
                "depth error {:.3} m at t = {:.1}s",
                out.depth.error(i),
                i as f64 * 0.05
            );
        }
    }

    #[test]
    fn baselines_also_settle() {
        for kind in [ControllerKind::Pid, ControllerKind::Pvs] {
            let out = run_step_probe(kind);
            let tail = (out.yaw.len() as f64 * 0.9) as usize;
            let mean_tail: f64 =
                (tail..out.yaw.len()).map(|i| out.yaw.error(i).abs()).sum::<f64>() / (out.yaw.len() - tail) as f64;
            assert!(mean_tail < 0.1, "{kind:?} tail yaw error {mean_tail}");
        }
    }

    #[test]
    fn target_walk_is_reproducible_and_bounded() {
        let a = ReferenceSeries::from_target_walk(9, 120.0, 0.05, (10.0, 40.0), 1100.0);
        let b = ReferenceSeries::from_target_walk(9, 120.0, 0.05, (10.0, 40.0), 1100.0);
        assert_eq!(a.heading, b.heading);
        assert_eq!(a.depth, b.depth);
        assert!(a.depth.iter().all(|z| (10.0..=40.0).contains(z)));
    }
}
