//! Exact superoperator evolution, averaging over every edge configuration.
//! Only feasible on tiny lattices; serves as the oracle for the sampler.
//!
//! The x-shift depends only on horizontal bonds and the y-shift only on
//! vertical ones. Both sets are independent, so the average over all `2^E`
//! configurations factorizes into an x-average followed by a y-average,
//! `2 · 2^{E/2}` terms instead of `2^E`.

use super::step::HalfStep;
use super::{CoinSpec, WalkerState};
use crate::channels::NoiseSpec;
use crate::error::{Error, Result};
use crate::lattice::{Axis, EdgeConfiguration, LatticeSpec};
use crate::qmatrix::ComplexMatrix;

/// Largest edge count the enumeration accepts (`2^16` configurations).
pub const EXACT_MAX_EDGES: usize = 16;

/// Weighted half steps for every configuration of one axis' bonds.
type AxisAverage = Vec<(f64, HalfStep)>;

fn axis_averages(lattice: &LatticeSpec, lambda: f64, coin: &CoinSpec) -> Result<(AxisAverage, AxisAverage)> {
    let e = lattice.edges();
    if e > EXACT_MAX_EDGES {
        return Err(Error::TooLarge(format!(
            "exact evolution enumerates 2^{e} configurations; at most 2^{EXACT_MAX_EDGES} are allowed (side <= 3)"
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange { what: "edge-keep probability", value: lambda });
    }
    // Horizontal bonds occupy the first half of the edge indices.
    let half = e / 2;
    let build = |axis: Axis, offset: usize| -> Result<AxisAverage> {
        let mut out = Vec::new();
        for bits in 0..1u64 << half {
            let present = bits.count_ones() as i32;
            let w = lambda.powi(present) * (1.0 - lambda).powi(half as i32 - present);
            if w == 0.0 {
                continue;
            }
            let cfg = EdgeConfiguration::from_bits(lattice, bits << offset)?;
            out.push((w, HalfStep::new(axis, &cfg, coin, lattice)?));
        }
        Ok(out)
    };
    Ok((build(Axis::X, 0)?, build(Axis::Y, half)?))
}

fn average(rho: &ComplexMatrix, ops: &AxisAverage) -> ComplexMatrix {
    let d = rho.rows();
    let mut acc = ComplexMatrix::zeros(d, d);
    for (w, op) in ops {
        let term = op.conjugate(rho);
        for (a, t) in acc.as_mut_slice().iter_mut().zip(term.as_slice()) {
            *a += t * *w;
        }
    }
    acc
}

fn step_with(rho: &ComplexMatrix, ops: &(AxisAverage, AxisAverage), noise: &NoiseSpec) -> Result<ComplexMatrix> {
    let noisy = noise.channel().apply_matrix(rho)?;
    Ok(average(&average(&noisy, &ops.0), &ops.1))
}

/// One application of `ρ ↦ Σ_K π_K U_K N(ρ) U_K†`.
pub fn exact_step(
    rho: &ComplexMatrix,
    lattice: &LatticeSpec,
    lambda: f64,
    coin: &CoinSpec,
    noise: &NoiseSpec,
) -> Result<ComplexMatrix> {
    let ops = axis_averages(lattice, lambda, coin)?;
    if rho.shape() != (2 * lattice.vertices(), 2 * lattice.vertices()) {
        return Err(Error::Shape(format!("state of shape {:?} does not match the lattice", rho.shape())));
    }
    step_with(rho, &ops, noise)
}

pub fn evolve_exact(
    rho0: &WalkerState,
    steps: usize,
    lambda: f64,
    coin: &CoinSpec,
    noise: &NoiseSpec,
) -> Result<WalkerState> {
    let mut states = evolve_exact_trajectory(rho0, steps, lambda, coin, noise)?;
    Ok(states.pop().expect("trajectory includes the initial state"))
}

/// States after 0, 1, …, `steps` steps.
pub fn evolve_exact_trajectory(
    rho0: &WalkerState,
    steps: usize,
    lambda: f64,
    coin: &CoinSpec,
    noise: &NoiseSpec,
) -> Result<Vec<WalkerState>> {
    let lattice = *rho0.lattice();
    let ops = axis_averages(&lattice, lambda, coin)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(rho0.clone());
    let mut rho = rho0.matrix().clone();
    for _ in 0..steps {
        rho = step_with(&rho, &ops, noise)?;
        out.push(WalkerState::from_matrix_unchecked(lattice, rho.clone()));
    }
    Ok(out)
}
