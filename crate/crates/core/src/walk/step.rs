use num_complex::Complex64;

use super::CoinSpec;
use crate::error::{Error, Result};
use crate::lattice::{Axis, EdgeConfiguration, LatticeSpec};
use crate::qmatrix::ComplexMatrix;

/// A configuration-dependent shift as a permutation of basis states.
///
/// Basis state `|c⟩|x, y⟩` hops to `|c⟩|x ± 1, y⟩` (`+` for `c = 0`) when
/// the bond is open, and otherwise stays put with its coin flipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftMap {
    target: Vec<usize>,
}

impl ShiftMap {
    pub fn new(axis: Axis, config: &EdgeConfiguration, lattice: &LatticeSpec) -> Result<Self> {
        if config.edge_count() != lattice.edges() {
            return Err(Error::Shape(format!(
                "configuration with {} edges does not belong to a lattice with {} edges",
                config.edge_count(),
                lattice.edges()
            )));
        }
        let l = lattice.side();
        let n = lattice.vertices();
        let mut target = vec![0; 2 * n];
        for v in 0..n {
            let (x, y) = lattice.coords(v);
            let along = match axis {
                Axis::X => x,
                Axis::Y => y,
            };
            let step_to = |t: usize| match axis {
                Axis::X => lattice.index(t, y),
                Axis::Y => lattice.index(x, t),
            };
            // Coin 0: bond towards +1.
            let fwd = lattice.forward_edge(x, y, axis).filter(|&e| config.is_present(e));
            target[v] = match fwd {
                Some(_) => step_to(along + 1),
                None => n + v,
            };
            // Coin 1: bond towards -1, which is the forward bond of the neighbour.
            let back = (along > 0)
                .then(|| match axis {
                    Axis::X => lattice.forward_edge(x - 1, y, axis),
                    Axis::Y => lattice.forward_edge(x, y - 1, axis),
                })
                .flatten()
                .filter(|&e| config.is_present(e));
            target[n + v] = match back {
                Some(_) => n + step_to(along - 1),
                None => v,
            };
        }
        debug_assert!(l >= 2);
        Ok(Self { target })
    }

    pub fn target(&self, i: usize) -> usize {
        self.target[i]
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (src, &dst) in self.target.iter().enumerate() {
            m[(dst, src)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    fn apply_vec(&self, psi: &[Complex64], out: &mut [Complex64]) {
        for (src, &dst) in self.target.iter().enumerate() {
            out[dst] = psi[src];
        }
    }
}

pub fn build_shift(axis: Axis, config: &EdgeConfiguration, lattice: &LatticeSpec) -> Result<ComplexMatrix> {
    ShiftMap::new(axis, config, lattice).map(|s| s.to_matrix())
}

/// Dense `S^y (C⊗I) S^x (C⊗I)`.
pub fn step_unitary(config: &EdgeConfiguration, coin: &CoinSpec, lattice: &LatticeSpec) -> Result<ComplexMatrix> {
    let c = super::coin_on_walker(coin, lattice);
    let sx = build_shift(Axis::X, config, lattice)?;
    let sy = build_shift(Axis::Y, config, lattice)?;
    Ok(&(&(&sy * &c) * &sx) * &c)
}

/// `S (C ⊗ I)` for one axis.
#[derive(Debug, Clone)]
pub(crate) struct HalfStep {
    coin: [[Complex64; 2]; 2],
    shift: ShiftMap,
}

impl HalfStep {
    pub(crate) fn new(axis: Axis, config: &EdgeConfiguration, coin: &CoinSpec, lattice: &LatticeSpec) -> Result<Self> {
        let c = coin.matrix();
        Ok(Self { coin: [[c[(0, 0)], c[(0, 1)]], [c[(1, 0)], c[(1, 1)]]], shift: ShiftMap::new(axis, config, lattice)? })
    }

    fn apply_coin(&self, psi: &mut [Complex64]) {
        let n = psi.len() / 2;
        let (up, down) = psi.split_at_mut(n);
        for (a, b) in up.iter_mut().zip(down.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = self.coin[0][0] * x + self.coin[0][1] * y;
            *b = self.coin[1][0] * x + self.coin[1][1] * y;
        }
    }

    /// Result lands in `out`; `psi` is clobbered.
    fn apply(&self, psi: &mut [Complex64], out: &mut [Complex64]) {
        self.apply_coin(psi);
        self.shift.apply_vec(psi, out);
    }

    /// `H ρ H†`.
    pub(crate) fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = rho.rows();
        let n = d / 2;
        let coin = self.coin;
        let mut m = rho.clone();
        // Coin on rows, then conjugate coin on columns.
        {
            let data = m.as_mut_slice();
            for v in 0..n {
                for col in 0..d {
                    let a = data[v * d + col];
                    let b = data[(n + v) * d + col];
                    data[v * d + col] = coin[0][0] * a + coin[0][1] * b;
                    data[(n + v) * d + col] = coin[1][0] * a + coin[1][1] * b;
                }
            }
            for row in 0..d {
                let r = &mut data[row * d..(row + 1) * d];
                for v in 0..n {
                    let a = r[v];
                    let b = r[n + v];
                    r[v] = a * coin[0][0].conj() + b * coin[0][1].conj();
                    r[n + v] = a * coin[1][0].conj() + b * coin[1][1].conj();
                }
            }
        }
        // Permutation on both sides.
        let mut out = ComplexMatrix::zeros(d, d);
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for i in 0..d {
            let ti = self.shift.target(i);
            for j in 0..d {
                dst[ti * d + self.shift.target(j)] = src[i * d + j];
            }
        }
        out
    }
}

/// Matrix-free form of [`step_unitary`] for one configuration.
#[derive(Debug, Clone)]
pub struct StepOperator {
    x: HalfStep,
    y: HalfStep,
}

impl StepOperator {
    pub fn new(config: &EdgeConfiguration, coin: &CoinSpec, lattice: &LatticeSpec) -> Result<Self> {
        Ok(Self { x: HalfStep::new(Axis::X, config, coin, lattice)?, y: HalfStep::new(Axis::Y, config, coin, lattice)? })
    }

    /// `ψ ← U ψ`, using `scratch` (same length) as workspace.
    pub fn apply(&self, psi: &mut [Complex64], scratch: &mut [Complex64]) {
        self.x.apply(psi, scratch);
        self.y.apply(scratch, psi);
    }

    /// `U ρ U†` on a dense matrix.
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.y.conjugate(&self.x.conjugate(rho))
    }
}
