//! Per-step trace records and their CSV forms.

use crate::dynamics::{ActuatorCommand, VehicleState};
use std::io::Write;

/// Scalar tracking trace for one controller channel.
#[derive(Debug, Clone)]
pub struct ChannelTrace {
    /// Sample period (s).
    pub dt: f64,
    pub reference: Vec<f64>,
    pub actual: Vec<f64>,
    /// Actuator command driving the channel, post-saturation.
    pub command: Vec<f64>,
    /// Saturation limit for `command`.
    pub command_limit: f64,
    /// Whether the channel is an angle (errors wrap to (-pi, pi]).
    pub angular: bool,
}

impl ChannelTrace {
    pub fn new(dt: f64, command_limit: f64, angular: bool) -> Self {
        Self { dt, reference: Vec::new(), actual: Vec::new(), command: Vec::new(), command_limit, angular }
    }

    pub fn push(&mut self, reference: f64, actual: f64, command: f64) {
        self.reference.push(reference);
        self.actual.push(actual);
        self.command.push(command);
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    pub fn error(&self, i: usize) -> f64 {
        let e = self.reference[i] - self.actual[i];
        if self.angular {
            crate::util::wrap_angle(e)
        } else {
            e
        }
    }

    /// Root-mean-square tracking error over the whole trace.
    pub fn rms_error(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let ss: f64 = (0..self.len()).map(|i| self.error(i).powi(2)).sum();
        (ss / self.len() as f64).sqrt()
    }

    /// Mean absolute tracking error.
    pub fn mean_abs_error(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let s: f64 = (0..self.len()).map(|i| self.error(i).abs()).sum();
        s / self.len() as f64
    }
}

/// One row of a full vehicle trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub rudder: f64,
    pub stern_plane: f64,
    pub rpm: f64,
    pub pitch_ref: f64,
    pub yaw_rate_ref: f64,
    pub rpm_ref: f64,
}

impl TrajectoryRow {
    pub fn from_state(s: &VehicleState, cmd: &ActuatorCommand, reference: (f64, f64, f64)) -> Self {
        let (roll, pitch, yaw) = s.attitude.euler_angles();
        Self {
            t: s.time,
            x: s.position.x,
            y: s.position.y,
            z: s.position.z,
            roll,
            pitch,
            yaw,
            u: s.nu[0],
            v: s.nu[1],
            w: s.nu[2],
            p: s.nu[3],
            q: s.nu[4],
            r: s.nu[5],
            rudder: cmd.rudder,
            stern_plane: cmd.stern_plane,
            rpm: cmd.propeller,
            pitch_ref: reference.0,
            yaw_rate_ref: reference.1,
            rpm_ref: reference.2,
        }
    }
}

pub const TRAJECTORY_HEADER: &str =
    "t,x,y,z,roll,pitch,yaw,u,v,w,p,q,r,rudder,stern_plane,rpm,pitch_ref,yaw_rate_ref,rpm_ref";

pub fn write_trajectory_csv<W: Write>(mut w: W, rows: &[TrajectoryRow]) -> std::io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{:.4},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.3},{:.6},{:.6},{:.3}",
            r.t, r.x, r.y, r.z, r.roll, r.pitch, r.yaw, r.u, r.v, r.w, r.p, r.q, r.r,
            r.rudder, r.stern_plane, r.rpm, r.pitch_ref, r.yaw_rate_ref, r.rpm_ref
        )?;
    }
    Ok(())
}

pub const TRACKING_HEADER: &str =
    "t,yaw_ref,yaw,rudder,depth_ref,depth,stern_plane";

/// Paired yaw/depth tracking trace in tidy CSV form.
pub fn write_tracking_csv<W: Write>(mut w: W, yaw: &ChannelTrace, depth: &ChannelTrace) -> std::io::Result<()> {
    writeln!(w, "{TRACKING_HEADER}")?;
    let n = yaw.len().min(depth.len());
    for i in 0..n {
        writeln!(
            w,
            "{:.4},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            i as f64 * yaw.dt,
            yaw.reference[i],
            yaw.actual[i],
            yaw.command[i],
            depth.reference[i],
            depth.actual[i],
            depth.command[i]
        )?;
    }
    Ok(())
}
