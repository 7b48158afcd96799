//! The full walker-space engine.
//!
//! A step on configuration `K` is `U_K = S_K^y (C ⊗ I) S_K^x (C ⊗ I)`, and a
//! noisy percolated step maps `ρ ↦ Σ_K π_K U_K N(ρ) U_K†` where `N` is the
//! coin noise channel extended by the identity on the position factor.

mod exact;
mod monte_carlo;
mod step;

pub use exact::{evolve_exact, evolve_exact_trajectory, exact_step, EXACT_MAX_EDGES};
pub use monte_carlo::{
    evolve_monte_carlo, evolve_monte_carlo_ensemble, MonteCarloEstimate, MonteCarloOptions, PureEnsemble,
    StepObservables, TrajectoryMode,
};
pub use step::{build_shift, step_unitary, ShiftMap, StepOperator};

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::qmatrix::{kron, partial_trace_position_matrix, ComplexMatrix, DensityOperator};

/// Two-angle parametrization of the coin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl CoinSpec {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn hadamard() -> Self {
        Self { alpha: FRAC_PI_2, beta: FRAC_PI_4 }
    }

    /// `[[i e^{-iα} sin β, cos β], [cos β, i e^{iα} sin β]]`.
    pub fn matrix(&self) -> ComplexMatrix {
        let i = Complex64::i();
        let (s, c) = self.beta.sin_cos();
        let c = Complex64::new(c, 0.0);
        ComplexMatrix::from_rows(&[
            vec![i * Complex64::from_polar(1.0, -self.alpha) * s, c],
            vec![c, i * Complex64::from_polar(1.0, self.alpha) * s],
        ])
        .expect("2x2 coin")
    }

    /// `(σ_x C)²`, the coin-only step on an empty graph.
    pub fn empty_graph_rotation(&self) -> ComplexMatrix {
        let sx_c = &crate::qmatrix::pauli::x() * &self.matrix();
        &sx_c * &sx_c
    }
}

impl Default for CoinSpec {
    fn default() -> Self {
        Self::hadamard()
    }
}

pub fn coin_operator(spec: &CoinSpec) -> ComplexMatrix {
    spec.matrix()
}

/// A density operator on C² ⊗ C^N for a given lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkerState {
    lattice: LatticeSpec,
    rho: DensityOperator,
}

impl WalkerState {
    pub fn new(lattice: LatticeSpec, rho: DensityOperator) -> Result<Self> {
        if rho.dim() != 2 * lattice.vertices() {
            return Err(Error::Shape(format!(
                "walker state on a {}-vertex lattice needs dimension {}, got {}",
                lattice.vertices(),
                2 * lattice.vertices(),
                rho.dim()
            )));
        }
        Ok(Self { lattice, rho })
    }

    pub(crate) fn from_matrix_unchecked(lattice: LatticeSpec, m: ComplexMatrix) -> Self {
        Self { lattice, rho: DensityOperator::from_matrix_unchecked(m) }
    }

    /// `ρ_coin ⊗ |origin⟩⟨origin|`.
    pub fn localized(lattice: LatticeSpec, coin: &DensityOperator) -> Result<Self> {
        if coin.dim() != 2 {
            return Err(Error::Shape(format!("coin state must be 2x2, got dimension {}", coin.dim())));
        }
        let origin = DensityOperator::basis(lattice.vertices(), lattice.origin_index())?;
        Self::new(lattice, coin.tensor(&origin))
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn density(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.rho.matrix()
    }

    pub fn into_density(self) -> DensityOperator {
        self.rho
    }

    /// Probability of each vertex, `ρ_{0v,0v} + ρ_{1v,1v}`.
    pub fn position_distribution(&self) -> Vec<f64> {
        let n = self.lattice.vertices();
        let m = self.matrix();
        (0..n).map(|v| m[(v, v)].re + m[(n + v, n + v)].re).collect()
    }

    pub fn coin_marginal(&self) -> DensityOperator {
        DensityOperator::from_matrix_unchecked(
            partial_trace_position_matrix(self.matrix()).expect("walker dimension is even"),
        )
    }
}

/// `C ⊗ I_N`.
pub fn coin_on_walker(coin: &CoinSpec, lattice: &LatticeSpec) -> ComplexMatrix {
    kron(&coin.matrix(), &ComplexMatrix::identity(lattice.vertices()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::pauli;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn coin_special_cases() {
        let h = CoinSpec::hadamard().matrix();
        let expected =
            ComplexMatrix::from_real_rows(&[&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]]).unwrap();
        assert!(h.max_abs_diff(&expected) < 1e-12);
        for alpha in [0.0, 0.7, -2.3] {
            assert!(CoinSpec::new(alpha, 0.0).matrix().max_abs_diff(&pauli::x()) < 1e-15);
        }
        let ii = ComplexMatrix::identity(2).scale(Complex64::i());
        assert!(CoinSpec::new(0.0, FRAC_PI_2).matrix().max_abs_diff(&ii) < 1e-15);
    }

    #[test]
    fn empty_graph_rotation_for_hadamard() {
        let r = CoinSpec::hadamard().empty_graph_rotation();
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        assert!(r.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn localized_state_marginals() {
        let l = LatticeSpec::new(3).unwrap();
        let coin = DensityOperator::pure(&[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        let w = WalkerState::localized(l, &coin).unwrap();
        let pos = w.position_distribution();
        assert!((pos[l.origin_index()] - 1.0).abs() < 1e-15);
        assert!(w.coin_marginal().matrix().max_abs_diff(coin.matrix()) < 1e-15);
        assert!(WalkerState::new(l, coin).is_err());
    }

    proptest::proptest! {
        #[test]
        fn coin_is_unitary(alpha in -10.0f64..10.0, beta in -10.0f64..10.0) {
            proptest::prop_assert!(CoinSpec::new(alpha, beta).matrix().unitarity_defect() < 1e-12);
        }
    }
}
