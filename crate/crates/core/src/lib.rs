//! Discrete-time quantum walks on a dynamically percolated square lattice
//! with Markovian coin noise.
//!
//! * [`qmatrix`]: dense complex matrices, density operators, trace distance.
//! * [`lattice`]: geometry, bond percolation, taxicab zones.
//! * [`channels`]: dephasing and bit-flip Kraus channels with rate calibration.
//! * [`walk`]: the full-space engine (exact enumeration and Monte Carlo).
//! * [`zonemodel`]: the reduced coin-only model and the zone ansatz.
//! * [`analysis`]: trace-distance bounds, Bloch averages, mixing times.

pub mod analysis;
pub mod channels;
pub mod error;
pub mod lattice;
pub mod qmatrix;
pub mod rng;
pub mod walk;
pub mod zonemodel;

pub use error::{Error, Result};
