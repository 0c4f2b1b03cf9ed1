//! Desk-scale marine control simulation core: a REMUS-100-class AUV with
//! Fossen-style 6-DoF hydrodynamics, a directional JONSWAP sea with Airy
//! kinematics, an S-surface/PID/SMC controller bank driven by high-level
//! reference commands, a simulated sensor suite, and the task scenarios and
//! metrics used to evaluate them.
//!
//! Everything here is deterministic given a seed: wave fields are frozen at
//! construction, sensors draw from caller-supplied RNGs, and the dynamics are
//! a pure function of `(state, command, flow, dt)`.

pub mod control;
pub mod dynamics;
pub mod ocean;
pub mod perception;
pub mod probe;
pub mod tasks;
pub mod trace;
pub mod util;

pub use dynamics::{ActuatorCommand, DynamicsError, VehicleModel, VehicleParams, VehicleState};
pub use ocean::{OceanError, SeaCondition, SeaRegime, Terrain, WaveField, WaveSpectrumParams};

/// Standard gravity used throughout (m/s^2).
pub const GRAVITY: f64 = 9.81;

/// Control loop rate the stack is designed around (Hz).
pub const CONTROL_RATE_HZ: f64 = 20.0;

/// Control period, `1 / CONTROL_RATE_HZ` (s).
pub const CONTROL_DT: f64 = 0.05;
