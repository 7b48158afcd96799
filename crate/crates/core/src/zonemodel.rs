//! Reduced coin-only model of the walk.
//!
//! On an empty graph the walker cannot move, so a step reduces to the coin
//! map `ξ₀(ρ) = R N(ρ) R†` with `R = (σ_x C)²` and `N` the coin noise. The
//! zone ansatz builds an approximate walker state from iterates of `ξ₀`,
//! one coin state per taxicab zone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{KrausChannel, NoiseKind, NoiseSpec};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, ZoneDecomposition};
use crate::qmatrix::{ComplexMatrix, DensityOperator};
use crate::walk::{CoinSpec, WalkerState};

/// `a |ψ_{θ,φ}⟩⟨ψ_{θ,φ}| + (1 - a) I/2`, i.e. Bloch vector
/// `a (sin θ cos φ, sin θ sin φ, cos θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochCoinState {
    pub a: f64,
    pub theta: f64,
    pub phi: f64,
}

impl BlochCoinState {
    pub fn new(a: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::OutOfRange { what: "coin mixedness a", value: a });
        }
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Config("Bloch angles must be finite".into()));
        }
        Ok(Self { a, theta, phi })
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.a * st * cp, self.a * st * sp, self.a * ct]
    }

    pub fn density(&self) -> DensityOperator {
        let [x, y, z] = self.bloch_vector();
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.5 * (1.0 + z), 0.0), Complex64::new(0.5 * x, -0.5 * y)],
            vec![Complex64::new(0.5 * x, 0.5 * y), Complex64::new(0.5 * (1.0 - z), 0.0)],
        ])
        .expect("2x2");
        DensityOperator::new(m).expect("|a| <= 1 gives a valid state")
    }
}

/// Bloch vector of a 2×2 Hermitian matrix.
pub fn bloch_of(m: &ComplexMatrix) -> [f64; 3] {
    [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, m[(0, 0)].re - m[(1, 1)].re]
}

/// The noisy empty-graph coin map `ξ₀`.
#[derive(Debug, Clone)]
pub struct EmptyGraphOp {
    rotation: ComplexMatrix,
    channel: KrausChannel,
}

impl EmptyGraphOp {
    pub fn new(coin: &CoinSpec, noise: &NoiseSpec) -> Self {
        Self { rotation: coin.empty_graph_rotation(), channel: noise.channel() }
    }

    pub fn rotation(&self) -> &ComplexMatrix {
        &self.rotation
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != 2 {
            return Err(Error::Shape(format!("empty-graph operation acts on 2x2 coin states, got {}", rho.dim())));
        }
        let noisy = self.channel.apply_matrix(rho.matrix())?;
        Ok(DensityOperator::from_matrix_unchecked(self.rotation.conjugate(&noisy)?))
    }

    /// `ξ₀ⁿ(ρ)`.
    pub fn iterate(&self, rho: &DensityOperator, n: usize) -> Result<DensityOperator> {
        let mut out = rho.clone();
        for _ in 0..n {
            out = self.apply(&out)?;
        }
        Ok(out)
    }

    /// `ξ₀⁰(ρ), …, ξ₀^max(ρ)`.
    pub fn iterates(&self, rho: &DensityOperator, max: usize) -> Result<Vec<DensityOperator>> {
        let mut out = Vec::with_capacity(max + 1);
        out.push(rho.clone());
        for k in 0..max {
            let next = self.apply(&out[k])?;
            out.push(next);
        }
        Ok(out)
    }

    /// Undoes `n` rotations: `R^{-n} ρ (R^{-n})†`. Since both noise channels
    /// commute with the Hadamard rotation, this exposes the bare decay.
    pub fn corotate(&self, rho: &DensityOperator, n: usize) -> Result<DensityOperator> {
        let inv = self.rotation.adjoint();
        let mut m = rho.matrix().clone();
        for _ in 0..n {
            m = inv.conjugate(&m)?;
        }
        Ok(DensityOperator::from_matrix_unchecked(m))
    }
}

pub fn empty_graph_op(coin: &CoinSpec, noise: &NoiseSpec, rho: &DensityOperator) -> Result<DensityOperator> {
    EmptyGraphOp::new(coin, noise).apply(rho)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::OutOfRange { what: "time", value: t });
    }
    Ok(())
}

/// Coin state under continuous dephasing, entries as printed:
/// `½[[1 - a cos θ, a sin θ e^{-iφ} e^{-Γt}], [a sin θ e^{iφ} e^{-Γt}, 1 + a cos θ]]`.
pub fn dephasing_closed_form(init: &BlochCoinState, gamma: f64, t: f64) -> Result<DensityOperator> {
    check_time(t)?;
    let decay = (-gamma * t).exp();
    let (st, ct) = init.theta.sin_cos();
    let a = init.a;
    let off = Complex64::from_polar(0.5 * a * st * decay, -init.phi);
    let m = ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.5 * (1.0 - a * ct), 0.0), off],
        vec![off.conj(), Complex64::new(0.5 * (1.0 + a * ct), 0.0)],
    ])?;
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// Coin state under continuous bit flips:
/// `½[[1 + a cos θ e^{-Γt}, a sin θ (cos φ - i sin φ e^{-Γt})], [c.c., 1 - a cos θ e^{-Γt}]]`.
pub fn bitflip_closed_form(init: &BlochCoinState, gamma: f64, t: f64) -> Result<DensityOperator> {
    check_time(t)?;
    let decay = (-gamma * t).exp();
    let (st, ct) = init.theta.sin_cos();
    let (sp, cp) = init.phi.sin_cos();
    let a = init.a;
    let off = Complex64::new(0.5 * a * st * cp, -0.5 * a * st * sp * decay);
    let m = ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.5 * (1.0 + a * ct * decay), 0.0), off],
        vec![off.conj(), Complex64::new(0.5 * (1.0 - a * ct * decay), 0.0)],
    ])?;
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// How zone probabilities are assigned in the ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ZoneProfile {
    /// Per-vertex probability `P_k ∝ λ^k` on the zones the walker has reached
    /// (`k ≤ m`), zero beyond.
    Geometric,
    /// Caller-supplied `P_0..P_M`; must satisfy `P_0 + Σ 4k P_k = 1`.
    Explicit(Vec<f64>),
}

/// Zone probabilities and per-zone coin states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneAnsatz {
    pub lambda: f64,
    /// Zone reached by the walker.
    pub zone: usize,
    /// Iteration within the zone, `0 ≤ n ≤ 2`.
    pub iteration: usize,
    /// `n_e = 3m + n`.
    pub effective_iterations: usize,
    /// `P_0..P_M`, per vertex.
    pub probabilities: Vec<f64>,
    pub coin_states: Vec<DensityOperator>,
    /// Clamped exponents and regime warnings.
    pub notes: Vec<String>,
}

impl ZoneAnsatz {
    pub fn normalization(&self) -> f64 {
        ZoneDecomposition::normalization(&self.probabilities)
    }

    /// `P_0 > P_1 > … ` over the zones that carry weight.
    pub fn is_monotone(&self) -> bool {
        let reached: Vec<f64> = self.probabilities.iter().copied().take_while(|&p| p > 0.0).collect();
        reached.windows(2).all(|w| w[0] > w[1])
    }

    /// `Σ_k ρ_k ⊗ (mass_k / |zone_k|) Π_k` on the given lattice. Zone `k`
    /// carries mass `4k P_k`, spread evenly over the vertices the lattice has.
    pub fn realize(&self, lattice: &LatticeSpec) -> Result<WalkerState> {
        if self.probabilities.len() != lattice.max_zone() + 1 {
            return Err(Error::Shape(format!(
                "ansatz has {} zones but the lattice model uses {}",
                self.probabilities.len(),
                lattice.max_zone() + 1
            )));
        }
        let zones = ZoneDecomposition::new(lattice);
        let n = lattice.vertices();
        let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
        for (k, (p, coin)) in self.probabilities.iter().zip(&self.coin_states).enumerate() {
            let mass = p * ZoneDecomposition::nominal_size(k) as f64;
            let members = zones.members(k);
            if mass == 0.0 {
                continue;
            }
            if members.is_empty() {
                return Err(Error::Shape(format!("zone {k} has no vertices on this lattice")));
            }
            let per_vertex = mass / members.len() as f64;
            for &v in members {
                for c in 0..2 {
                    for d in 0..2 {
                        m[(c * n + v, d * n + v)] += coin.matrix()[(c, d)] * per_vertex;
                    }
                }
            }
        }
        Ok(WalkerState::from_matrix_unchecked(*lattice, m))
    }
}

fn geometric_profile(lambda: f64, zone: usize, max_zone: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..=max_zone).map(|k| if k <= zone { lambda.powi(k as i32) } else { 0.0 }).collect();
    let total = ZoneDecomposition::normalization(&p);
    for x in &mut p {
        *x /= total;
    }
    p
}

/// Builds the zone ansatz after `n_e = 3m + n` effective iterations.
///
/// Coin states: `ρ_0 = ξ₀^{n_e}`, `ρ_k = λ ξ₀^{n_e-3(k-1)} + (1-λ) ξ₀^{n_e-3k}`
/// for the inner zones, and `ρ_M = ξ₀^{n_e-3M}` for the outermost zone of the
/// model when `M ≥ 3`. Negative exponents are clamped to zero.
#[allow(clippy::too_many_arguments)]
pub fn zone_ansatz_state(
    init: &BlochCoinState,
    lattice: &LatticeSpec,
    lambda: f64,
    zone: usize,
    iteration: usize,
    coin: &CoinSpec,
    noise: &NoiseSpec,
    profile: &ZoneProfile,
) -> Result<ZoneAnsatz> {
    let max_zone = lattice.max_zone();
    if zone > max_zone {
        return Err(Error::OutOfRange { what: "zone index", value: zone as f64 });
    }
    if iteration > 2 {
        return Err(Error::OutOfRange { what: "iteration within zone", value: iteration as f64 });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange { what: "edge-keep probability", value: lambda });
    }
    let mut notes = Vec::new();
    if !(lambda > 0.0 && lambda <= 0.5) {
        let msg = format!("lambda = {lambda} lies outside the (0, 1/2] regime the ansatz assumes");
        log::warn!("{msg}");
        notes.push(msg);
    }

    let probabilities = match profile {
        ZoneProfile::Geometric => geometric_profile(lambda, zone, max_zone),
        ZoneProfile::Explicit(p) => {
            if p.len() != max_zone + 1 {
                return Err(Error::Shape(format!("expected {} zone probabilities, got {}", max_zone + 1, p.len())));
            }
            if p.iter().any(|&x| !(x >= 0.0)) {
                return Err(Error::InvalidState("zone probabilities must be nonnegative".into()));
            }
            let norm = ZoneDecomposition::normalization(p);
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidState(format!("zone probabilities are normalized to {norm}, not 1")));
            }
            p.clone()
        }
    };

    let n_e = 3 * zone + iteration;
    let op = EmptyGraphOp::new(coin, noise);
    let rho0 = init.density();
    let iterates = op.iterates(&rho0, n_e)?;
    let mut power = |shift: usize, k: usize| -> &DensityOperator {
        if shift > n_e {
            notes.push(format!("zone {k}: exponent n_e - {shift} = {} clamped to 0", n_e as i64 - shift as i64));
            &iterates[0]
        } else {
            &iterates[n_e - shift]
        }
    };

    let mut coin_states = Vec::with_capacity(max_zone + 1);
    coin_states.push(power(0, 0).clone());
    for k in 1..=max_zone {
        let state = if k == max_zone && k >= 3 {
            power(3 * k, k).clone()
        } else {
            let newer = power(3 * (k - 1), k).clone();
            let older = power(3 * k, k).clone();
            DensityOperator::mixture(&[(lambda, &newer), (1.0 - lambda, &older)])?
        };
        coin_states.push(state);
    }

    Ok(ZoneAnsatz {
        lambda,
        zone,
        iteration,
        effective_iterations: n_e,
        probabilities,
        coin_states,
        notes,
    })
}

/// Whether `ξ₀ⁿ` under calibrated dephasing tracks the closed form: the
/// co-rotated iterate has the closed-form spectrum and off-diagonal modulus.
pub fn dephasing_iterate_defect(init: &BlochCoinState, coin: &CoinSpec, gamma: f64, n: usize) -> Result<f64> {
    let noise = crate::channels::calibrate(NoiseKind::Dephasing, gamma, 1.0)?;
    let op = EmptyGraphOp::new(coin, &noise);
    let lab = op.iterate(&init.density(), n)?;
    let closed = dephasing_closed_form(init, gamma, n as f64)?;
    let ev_lab = lab.eigenvalues();
    let ev_closed = closed.eigenvalues();
    let spectral = ev_lab.iter().zip(&ev_closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let co = op.corotate(&lab, n)?;
    let off = (co.matrix()[(0, 1)].norm() - closed.matrix()[(0, 1)].norm()).abs();
    Ok(spectral.max(off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::calibrate;
    use crate::qmatrix::{trace_distance, TOL};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn is_valid_coin(rho: &DensityOperator) -> bool {
        rho.dim() == 2 && DensityOperator::new(rho.matrix().clone()).is_ok() && rho.matrix().hermitian_defect() <= TOL.hermitian
    }

    fn noises() -> Vec<NoiseSpec> {
        vec![
            NoiseSpec::none(),
            calibrate(NoiseKind::Dephasing, 0.2, 1.0).unwrap(),
            calibrate(NoiseKind::Bitflip, 0.2, 1.0).unwrap(),
        ]
    }

    #[test]
    fn bloch_state_is_valid_and_oriented() {
        let s = BlochCoinState::new(1.0, 0.0, 0.0).unwrap().density();
        assert!((s.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        let s = BlochCoinState::new(0.7, 1.1, -0.4).unwrap();
        let b = bloch_of(s.density().matrix());
        let expected = s.bloch_vector();
        for i in 0..3 {
            assert!((b[i] - expected[i]).abs() < 1e-15);
        }
        assert!(BlochCoinState::new(1.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn noiseless_hadamard_empty_graph_is_rotation() {
        let coin = CoinSpec::hadamard();
        let rho = BlochCoinState::new(0.9, 0.8, 0.3).unwrap().density();
        let out = empty_graph_op(&coin, &NoiseSpec::none(), &rho).unwrap();
        let r = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        assert!(out.matrix().max_abs_diff(&r.conjugate(rho.matrix()).unwrap()) < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_fixed() {
        let mixed = DensityOperator::maximally_mixed(2);
        for noise in noises() {
            let out = empty_graph_op(&CoinSpec::new(0.3, 1.2), &noise, &mixed).unwrap();
            assert!(out.matrix().max_abs_diff(mixed.matrix()) < 1e-15);
        }
    }

    #[test]
    fn full_dephasing_kills_coherence_before_rotation() {
        let plus = BlochCoinState::new(1.0, FRAC_PI_2, 0.0).unwrap().density();
        let noise = NoiseSpec { kind: NoiseKind::Dephasing, gamma: f64::INFINITY, dt: 1.0, p: 1.0 };
        let out = empty_graph_op(&CoinSpec::hadamard(), &noise, &plus).unwrap();
        assert!(out.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn closed_form_limits() {
        let s = BlochCoinState::new(0.8, 1.0, 0.6).unwrap();
        let d0 = dephasing_closed_form(&s, 0.3, 0.0).unwrap();
        let expected = Complex64::from_polar(0.4 * 1.0f64.sin(), -0.6);
        assert!((d0.matrix()[(0, 1)] - expected).norm() < 1e-15);
        let dinf = dephasing_closed_form(&s, 0.3, 1e4).unwrap();
        assert!(dinf.matrix()[(0, 1)].norm() < 1e-15);
        assert!((dinf.matrix()[(0, 0)].re - 0.5 * (1.0 - 0.8 * 1.0f64.cos())).abs() < 1e-15);

        let y = BlochCoinState::new(1.0, 1.0, FRAC_PI_2).unwrap();
        let b = bitflip_closed_form(&y, 0.3, 1e4).unwrap();
        assert!(b.matrix().max_abs_diff(DensityOperator::maximally_mixed(2).matrix()) < 1e-15);
        let x = BlochCoinState::new(0.9, 1.0, 0.0).unwrap();
        let b = bitflip_closed_form(&x, 0.3, 1e4).unwrap();
        let half = 0.5 * 0.9 * 1.0f64.sin();
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, half], &[half, 0.5]]).unwrap();
        assert!(b.matrix().max_abs_diff(&expected) < 1e-15);

        let zero = BlochCoinState::new(0.0, 0.4, 0.4).unwrap();
        for t in [0.0, 1.0, 10.0] {
            for m in [dephasing_closed_form(&zero, 0.3, t).unwrap(), bitflip_closed_form(&zero, 0.3, t).unwrap()] {
                assert!(m.matrix().max_abs_diff(DensityOperator::maximally_mixed(2).matrix()) < 1e-15);
            }
        }
        assert!(dephasing_closed_form(&s, 0.3, -1.0).is_err());
    }

    #[test]
    fn bitflip_iteration_matches_closed_form_spectrum() {
        let s = BlochCoinState::new(0.85, 0.7, 1.3).unwrap();
        let gamma = 0.15;
        let noise = calibrate(NoiseKind::Bitflip, gamma, 1.0).unwrap();
        let op = EmptyGraphOp::new(&CoinSpec::hadamard(), &noise);
        for (n, lab) in op.iterates(&s.density(), 40).unwrap().iter().enumerate() {
            let closed = bitflip_closed_form(&s, gamma, n as f64).unwrap();
            let co = op.corotate(lab, n).unwrap();
            assert!(co.matrix().max_abs_diff(closed.matrix()) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn dephasing_iteration_tracks_closed_form() {
        let s = BlochCoinState::new(0.6, 2.0, -0.9).unwrap();
        for n in [0, 1, 2, 7, 30] {
            assert!(dephasing_iterate_defect(&s, &CoinSpec::hadamard(), 0.1, n).unwrap() < 1e-9);
        }
    }

    #[test]
    fn mixing_is_monotone_at_phi_half_pi() {
        let s = BlochCoinState::new(1.0, 1.2, FRAC_PI_2).unwrap();
        let mixed = DensityOperator::maximally_mixed(2);
        for noise in &noises()[1..] {
            let op = EmptyGraphOp::new(&CoinSpec::hadamard(), noise);
            let d: Vec<f64> = op
                .iterates(&s.density(), 60)
                .unwrap()
                .iter()
                .map(|r| trace_distance(r, &mixed).unwrap())
                .collect();
            assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        }
    }

    #[test]
    fn ansatz_at_origin_is_initial_state() {
        let l = LatticeSpec::new(5).unwrap();
        let s = BlochCoinState::new(0.9, 0.5, 0.2).unwrap();
        let ans = zone_ansatz_state(&s, &l, 0.5, 0, 0, &CoinSpec::hadamard(), &NoiseSpec::none(), &ZoneProfile::Geometric)
            .unwrap();
        assert_eq!(ans.probabilities[0], 1.0);
        let w = ans.realize(&l).unwrap();
        let expected = WalkerState::localized(l, &s.density()).unwrap();
        assert!(w.matrix().max_abs_diff(expected.matrix()) < 1e-15);
    }

    #[test]
    fn half_lambda_mixes_adjacent_iterates_equally() {
        let l = LatticeSpec::new(9).unwrap();
        let s = BlochCoinState::new(1.0, 0.9, 0.4).unwrap();
        let coin = CoinSpec::hadamard();
        let noise = calibrate(NoiseKind::Dephasing, 0.1, 1.0).unwrap();
        let ans = zone_ansatz_state(&s, &l, 0.5, 3, 1, &coin, &noise, &ZoneProfile::Geometric).unwrap();
        let op = EmptyGraphOp::new(&coin, &noise);
        let it = op.iterates(&s.density(), 10).unwrap();
        assert_eq!(ans.effective_iterations, 10);
        let expected = DensityOperator::mixture(&[(0.5, &it[7]), (0.5, &it[4])]).unwrap();
        assert!(ans.coin_states[2].matrix().max_abs_diff(expected.matrix()) < 1e-15);
        // Zone 4 is the outermost model zone: ξ₀^{10-12} clamps to ξ₀⁰.
        assert!(ans.coin_states[4].matrix().max_abs_diff(it[0].matrix()) < 1e-15);
        assert!(ans.notes.iter().any(|n| n.contains("clamped")));
        assert!(ans.is_monotone());
    }

    #[test]
    fn ansatz_rejects_bad_inputs() {
        let l = LatticeSpec::new(5).unwrap();
        let s = BlochCoinState::new(0.5, 0.0, 0.0).unwrap();
        let coin = CoinSpec::hadamard();
        let none = NoiseSpec::none();
        assert!(zone_ansatz_state(&s, &l, 0.5, 3, 0, &coin, &none, &ZoneProfile::Geometric).is_err());
        assert!(zone_ansatz_state(&s, &l, 0.5, 1, 3, &coin, &none, &ZoneProfile::Geometric).is_err());
        let bad = ZoneProfile::Explicit(vec![0.5, 0.5, 0.0]);
        assert!(zone_ansatz_state(&s, &l, 0.5, 1, 0, &coin, &none, &bad).is_err());
        let good = ZoneProfile::Explicit(vec![0.2, 0.2, 0.0]);
        let ans = zone_ansatz_state(&s, &l, 0.3, 1, 0, &coin, &none, &good).unwrap();
        assert!((ans.normalization() - 1.0).abs() < 1e-15);
        let warned = zone_ansatz_state(&s, &l, 0.8, 1, 0, &coin, &none, &ZoneProfile::Geometric).unwrap();
        assert!(warned.notes.iter().any(|n| n.contains("regime")));
    }

    proptest::proptest! {
        #[test]
        fn ansatz_states_are_physical(
            lambda in 0.0f64..=1.0,
            zone in 0usize..=4,
            iteration in 0usize..=2,
            a in 0.0f64..=1.0,
            theta in -PI..PI,
            phi in -PI..PI,
            kind in 0usize..3,
        ) {
            let l = LatticeSpec::new(9).unwrap();
            let s = BlochCoinState::new(a, theta, phi).unwrap();
            let noise = noises()[kind];
            let ans = zone_ansatz_state(&s, &l, lambda, zone, iteration, &CoinSpec::hadamard(), &noise, &ZoneProfile::Geometric).unwrap();
            proptest::prop_assert!((ans.normalization() - 1.0).abs() < 1e-9);
            for c in &ans.coin_states {
                proptest::prop_assert!(is_valid_coin(c));
            }
            let w = ans.realize(&l).unwrap();
            proptest::prop_assert!((w.matrix().trace().re - 1.0).abs() < 1e-9);
        }
    }
}
