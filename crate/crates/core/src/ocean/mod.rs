//! Stochastic directional sea state and terrain.
//!
//! A JONSWAP spectrum with a cos^2 directional spreading function is
//! discretized into frozen wave components; surface elevation and horizontal
//! orbital velocities follow linear (Airy) theory. Ambient currents plus a
//! calibrated wave-velocity scale realize the Calm / ES / VES disturbance
//! regimes. Terrain is a bilinear heightmap, procedurally generated or
//! imported from a plain-text grid.

mod condition;
mod field;
mod spectrum;
mod terrain;

pub use condition::{SeaCondition, SeaRegime};
pub use field::{component_amplitude, WaveComponent, WaveField};
pub use spectrum::{jonswap_spectrum, solve_dispersion, WaveSpectrumParams};
pub use terrain::{SphereObstacle, Terrain};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OceanError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("dispersion solve failed to converge for f = {f} Hz, h = {h} m")]
    ConvergenceError { f: f64, h: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("terrain i/o: {0}")]
    TerrainIo(String),
}
