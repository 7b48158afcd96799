//! Single-qubit Kraus channels acting on the walker's coin.
//!
//! A channel given by 2×2 Kraus operators `K_l` acts on a walker state over
//! C² ⊗ C^N as `K_l ⊗ I`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmatrix::{pauli, ComplexMatrix, DensityOperator, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    Dephasing,
    Bitflip,
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "identity" => Ok(Self::None),
            "dephasing" | "phase-damping" | "phase_damping" | "dep" => Ok(Self::Dephasing),
            "bitflip" | "bit-flip" | "bit_flip" | "bit" => Ok(Self::Bitflip),
            other => Err(Error::Config(format!("unknown noise kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Dephasing => "dephasing",
            Self::Bitflip => "bitflip",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausChannel {
    kind: NoiseKind,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates shape and the completeness relation `Σ K†K = I`.
    pub fn new(kind: NoiseKind, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Shape("a channel needs at least one Kraus operator".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (2, 2)) {
            return Err(Error::Shape(format!("Kraus operators must be 2x2, got {:?}", k.shape())));
        }
        let ch = Self { kind, kraus };
        let defect = ch.completeness_defect();
        if defect > TOL.hermitian {
            return Err(Error::InvalidState(format!("Kraus operators violate completeness by {defect:e}")));
        }
        Ok(ch)
    }

    pub fn identity() -> Self {
        Self { kind: NoiseKind::None, kraus: vec![ComplexMatrix::identity(2)] }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Largest entry of `|Σ K†K - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(2, 2);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    /// `Σ K ρ K†` on a 2×2 matrix, or `Σ (K⊗I) ρ (K⊗I)†` on a 2N×2N one.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !rho.is_square() || rho.rows() % 2 != 0 {
            return Err(Error::Shape(format!("channel acts on C2 x C^N, got {:?}", rho.shape())));
        }
        let n = rho.rows() / 2;
        let dim = rho.rows();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for k in &self.kraus {
            for c in 0..2 {
                for d in 0..2 {
                    // Block (c, d) gains Σ_ab K_ca ρ_ab conj(K_db).
                    for a in 0..2 {
                        for b in 0..2 {
                            let w = k[(c, a)] * k[(d, b)].conj();
                            if w == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            for i in 0..n {
                                let src = &rho.row(a * n + i)[b * n..(b + 1) * n];
                                let row = c * n + i;
                                let dst = &mut out.as_mut_slice()[row * dim + d * n..row * dim + (d + 1) * n];
                                for (o, s) in dst.iter_mut().zip(src) {
                                    *o += w * s;
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.apply_matrix(rho.matrix()).map(DensityOperator::from_matrix_unchecked)
    }
}

/// Three-operator phase damping `{√(1-p) I, √p |0⟩⟨0|, √p |1⟩⟨1|}`: one
/// application scales the off-diagonals by exactly `1 - p`.
pub fn make_dephasing(p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { what: "dephasing probability", value: p });
    }
    KrausChannel::new(
        NoiseKind::Dephasing,
        vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            pauli::projector(0).scale_real(p.sqrt()),
            pauli::projector(1).scale_real(p.sqrt()),
        ],
    )
}

/// `{√(1-p) I, √p σ_x}`: keeps the Bloch x component and scales y and z by `1 - 2p`.
pub fn make_bitflip(p_flip: f64) -> Result<KrausChannel> {
    if !(0.0..=0.5).contains(&p_flip) {
        return Err(Error::OutOfRange { what: "bit-flip probability", value: p_flip });
    }
    KrausChannel::new(
        NoiseKind::Bitflip,
        vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p_flip).sqrt()),
            pauli::x().scale_real(p_flip.sqrt()),
        ],
    )
}

pub fn apply_channel(ch: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    ch.apply(rho)
}

/// A noise process with continuous rate `gamma`, discretized at step length `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub gamma: f64,
    pub dt: f64,
    /// Per-step Kraus probability.
    pub p: f64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, gamma: 0.0, dt: 1.0, p: 0.0 }
    }

    pub fn channel(&self) -> KrausChannel {
        match self.kind {
            NoiseKind::None => KrausChannel::identity(),
            NoiseKind::Dephasing => make_dephasing(self.p).expect("calibrated probability is in range"),
            NoiseKind::Bitflip => make_bitflip(self.p).expect("calibrated probability is in range"),
        }
    }
}

/// Per-step probability whose repeated application decays coherences as `e^{-Γ t}`.
///
/// Dephasing: `p = 1 - e^{-Γ dt}`. Bit flip: `p = (1 - e^{-Γ dt}) / 2`, since
/// the transverse components shrink by `1 - 2p` per step.
pub fn calibrate(kind: NoiseKind, gamma: f64, dt: f64) -> Result<NoiseSpec> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::OutOfRange { what: "noise rate", value: gamma });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::OutOfRange { what: "step duration", value: dt });
    }
    let decay = -(-gamma * dt).exp_m1();
    let p = match kind {
        NoiseKind::None => 0.0,
        NoiseKind::Dephasing => decay,
        NoiseKind::Bitflip => decay / 2.0,
    };
    Ok(NoiseSpec { kind, gamma, dt, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus() -> DensityOperator {
        DensityOperator::pure(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn dephasing_examples() {
        let id = make_dephasing(0.0).unwrap();
        let rho = plus();
        assert!(id.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let half = make_dephasing(0.5).unwrap();
        let out = half.apply(&rho).unwrap();
        assert!((out.matrix()[(0, 1)].re - 0.25).abs() < 1e-15);
        assert!((out.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);

        let full = make_dephasing(1.0).unwrap();
        let out = full.apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(DensityOperator::maximally_mixed(2).matrix()) < 1e-15);

        assert!(make_dephasing(1.01).is_err());
        assert!(make_dephasing(-0.01).is_err());
    }

    #[test]
    fn bitflip_examples() {
        let id = make_bitflip(0.0).unwrap();
        let rho = plus();
        assert!(id.apply(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);

        // ρ = ½(I + x σx + y σy + z σz) with x = 0.3, y = 0.4, z = 0.5.
        let rho = DensityOperator::new(
            ComplexMatrix::from_rows(&[
                vec![Complex64::new(0.75, 0.0), Complex64::new(0.15, -0.2)],
                vec![Complex64::new(0.15, 0.2), Complex64::new(0.25, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let out = make_bitflip(0.5).unwrap().apply(&rho).unwrap();
        let m = out.matrix();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((m[(0, 1)] - Complex64::new(0.15, 0.0)).norm() < 1e-15);

        let mixed = DensityOperator::maximally_mixed(2);
        let out = make_bitflip(0.3).unwrap().apply(&mixed).unwrap();
        assert!(out.matrix().max_abs_diff(mixed.matrix()) < 1e-15);

        assert!(make_bitflip(0.51).is_err());
    }

    #[test]
    fn calibration_values() {
        assert_eq!(calibrate(NoiseKind::Dephasing, 0.0, 1.0).unwrap().p, 0.0);
        let dep = calibrate(NoiseKind::Dephasing, 0.1, 1.0).unwrap();
        assert!((dep.p - 0.095_162_581_964_040_43).abs() < 1e-15);
        let bit = calibrate(NoiseKind::Bitflip, 0.1, 1.0).unwrap();
        assert!((bit.p - 0.047_581_290_982_020_215).abs() < 1e-15);
        assert!(calibrate(NoiseKind::Dephasing, -0.1, 1.0).is_err());
    }

    #[test]
    fn calibrated_bitflip_decays_like_exponential() {
        let gamma = 0.2;
        let ch = calibrate(NoiseKind::Bitflip, gamma, 1.0).unwrap().channel();
        let rho0 = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.75, 0.0), Complex64::new(0.15, -0.2)],
            vec![Complex64::new(0.15, 0.2), Complex64::new(0.25, 0.0)],
        ])
        .unwrap();
        let mut rho = rho0.clone();
        for t in 1..=25 {
            rho = ch.apply_matrix(&rho).unwrap();
            let decay = (-gamma * t as f64).exp();
            // z = ρ00 - ρ11, x = 2 Re ρ01, y = -2 Im ρ01.
            assert!(((rho[(0, 0)].re - rho[(1, 1)].re) - 0.5 * decay).abs() < 1e-12);
            assert!((2.0 * rho[(0, 1)].re - 0.3).abs() < 1e-12);
            assert!((-2.0 * rho[(0, 1)].im - 0.4 * decay).abs() < 1e-12);
        }
    }

    #[test]
    fn extension_to_walker_space_matches_kron() {
        let ch = make_dephasing(0.3).unwrap();
        let psi: Vec<Complex64> = (0..6).map(|k| Complex64::new(k as f64 + 1.0, 0.5 - k as f64)).collect();
        let rho = DensityOperator::pure(&psi).unwrap();
        let direct = ch.apply(&rho).unwrap();
        let mut expected = ComplexMatrix::zeros(6, 6);
        for k in ch.kraus() {
            let big = crate::qmatrix::kron(k, &ComplexMatrix::identity(3));
            expected = &expected + &big.conjugate(rho.matrix()).unwrap();
        }
        assert!(direct.matrix().max_abs_diff(&expected) < 1e-14);
        assert!(ch.apply_matrix(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("bit-flip".parse::<NoiseKind>().unwrap(), NoiseKind::Bitflip);
        assert_eq!("Dephasing".parse::<NoiseKind>().unwrap(), NoiseKind::Dephasing);
        assert!("amplitude".parse::<NoiseKind>().is_err());
    }
}
