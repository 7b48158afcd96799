//! Closed-form trace-distance estimates around the mixing time.
//!
//! Everything here is scalar arithmetic on the reduced model: the functions
//! `f_dep`/`f_bit`, the distance bounds at the mixing time, the exponential
//! relaxation curves, their inverses (mixing times) and the dephasing rate
//! that makes the relaxation curve exact.

mod quadrature;

pub use quadrature::{bloch_average_2d, simpson, SPHERE_PANELS, THETA_PANELS};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::NoiseKind;
use crate::error::{Error, Result};

/// How `e^{-2Γt}` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `e^{-2Γt}`.
    #[default]
    Continuous,
    /// `(1 - 2Γ)^t`, first-order in Γ; requires `Γ < 1/2`.
    PerStep,
}

impl Convention {
    pub fn decay(self, gamma: f64, t: f64) -> Result<f64> {
        check_nonneg("time", t)?;
        check_nonneg("noise rate", gamma)?;
        match self {
            Convention::Continuous => Ok((-2.0 * gamma * t).exp()),
            Convention::PerStep => {
                if gamma >= 0.5 {
                    return Err(Error::OutOfRange { what: "noise rate (per-step convention needs < 1/2)", value: gamma });
                }
                Ok((1.0 - 2.0 * gamma).powf(t))
            }
        }
    }

    /// Time at which the decay factor equals `ratio ∈ (0, 1]`.
    fn time_for(self, gamma: f64, ratio: f64) -> Result<f64> {
        if !(gamma > 0.0 && gamma < 0.5) {
            return Err(Error::OutOfRange { what: "noise rate (mixing time needs 0 < Γ < 1/2)", value: gamma });
        }
        let t = match self {
            Convention::Continuous => -ratio.ln() / (2.0 * gamma),
            Convention::PerStep => ratio.ln() / (-2.0 * gamma).ln_1p(),
        };
        Ok(t.max(0.0))
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Continuous => "continuous",
            Convention::PerStep => "per-step",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "continuous" | "exp" => Ok(Convention::Continuous),
            "per-step" | "perstep" | "discrete" => Ok(Convention::PerStep),
            other => Err(Error::Config(format!("unknown exponential convention '{other}'"))),
        }
    }
}

fn check_nonneg(what: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::OutOfRange { what, value: x });
    }
    Ok(())
}

fn check_mixedness(a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::OutOfRange { what: "coin mixedness a", value: a });
    }
    Ok(())
}

/// Lattice size and closeness parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    /// Vertex count `N`.
    pub n: f64,
    /// Largest zone, `⌊√N / 2⌋`.
    pub m: usize,
    pub delta_dep: f64,
    pub delta_bit: f64,
}

impl AnalysisParams {
    /// `δ_dep = 1/(2N√N)`, `δ_bit = 1/N`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::OutOfRange { what: "vertex count", value: n as f64 });
        }
        let nf = n as f64;
        Ok(Self {
            n: nf,
            m: (nf.sqrt() / 2.0).floor() as usize,
            delta_dep: 1.0 / (2.0 * nf * nf.sqrt()),
            delta_bit: 1.0 / nf,
        })
    }

    pub fn with_deltas(mut self, delta_dep: f64, delta_bit: f64) -> Result<Self> {
        if !(delta_dep > 0.0) || !(delta_bit > 0.0) {
            return Err(Error::Config("closeness parameters must be positive".into()));
        }
        self.delta_dep = delta_dep;
        self.delta_bit = delta_bit;
        Ok(self)
    }

    /// Uniform probability per vertex of the `M × M` sublattice, `2/N`.
    pub fn p_uniform(&self) -> f64 {
        2.0 / self.n
    }
}

/// A value together with whether it was taken as a limit at a removable
/// singularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub limit: bool,
}

/// `e^{-6Γ}(1 - e^{-3MΓ}) / (1 - e^{-6Γ})`; `M/2` at `Γ = 0`.
pub fn f_dep(m: usize, gamma: f64) -> Result<Flagged> {
    check_nonneg("dephasing rate", gamma)?;
    let mf = m as f64;
    if gamma == 0.0 {
        return Ok(Flagged { value: mf / 2.0, limit: true });
    }
    let value = (-6.0 * gamma).exp() * (-(-3.0 * mf * gamma).exp_m1()) / (-(-6.0 * gamma).exp_m1());
    Ok(Flagged { value, limit: false })
}

/// `e^{-6Γ}(1 + e^{-3Γ})²(1 - e^{-3MΓ}) / (2(1 - e^{-6Γ}))`; `M` at `Γ = 0`.
pub fn f_bit(m: usize, gamma: f64) -> Result<Flagged> {
    let dep = f_dep(m, gamma)?;
    let factor = (1.0 + (-3.0 * gamma).exp()).powi(2) / 2.0;
    Ok(Flagged { value: dep.value * factor, limit: dep.limit })
}

/// `½√(((1 - 1/N) + a cos θ)² + a²)`.
pub fn initial_distance(a: f64, n: f64, theta: f64) -> f64 {
    0.5 * ((1.0 - 1.0 / n + a * theta.cos()).powi(2) + a * a).sqrt()
}

/// Mean of [`initial_distance`] over `θ ∈ [-π, π]`.
pub fn avg_distance_theta(a: f64, n: usize) -> Result<f64> {
    avg_distance_theta_with(a, n, THETA_PANELS)
}

pub fn avg_distance_theta_with(a: f64, n: usize, panels: usize) -> Result<f64> {
    check_mixedness(a)?;
    if n < 4 {
        return Err(Error::OutOfRange { what: "vertex count", value: n as f64 });
    }
    let nf = n as f64;
    Ok(simpson(|t| initial_distance(a, nf, t), -PI, PI, panels)? / (2.0 * PI))
}

/// `√((1 - 1/N)² + a²)/2`.
pub fn dephasing_initial(n: f64, a: f64) -> f64 {
    ((1.0 - 1.0 / n).powi(2) + a * a).sqrt() / 2.0
}

/// `1/(4√N)`.
pub fn dephasing_asymptote(n: f64) -> f64 {
    0.25 / n.sqrt()
}

pub const BITFLIP_ASYMPTOTE: f64 = 0.25;

fn check_n(n: f64) -> Result<()> {
    if !(n >= 4.0) {
        return Err(Error::OutOfRange { what: "vertex count", value: n });
    }
    Ok(())
}

/// `D∞(1 - d) + D0 d`, with `d` the decay factor.
pub fn dephasing_evolution(t: f64, n: f64, a: f64, gamma: f64, conv: Convention) -> Result<f64> {
    check_n(n)?;
    check_mixedness(a)?;
    let d = conv.decay(gamma, t)?;
    Ok(dephasing_asymptote(n) * (1.0 - d) + dephasing_initial(n, a) * d)
}

pub fn bitflip_evolution(t: f64, d0: f64, gamma: f64, conv: Convention) -> Result<f64> {
    if !(0.0..=1.0).contains(&d0) {
        return Err(Error::OutOfRange { what: "initial distance", value: d0 });
    }
    let d = conv.decay(gamma, t)?;
    Ok(BITFLIP_ASYMPTOTE * (1.0 - d) + d0 * d)
}

fn mixing_time(target: f64, d0: f64, dinf: f64, gamma: f64, conv: Convention, floor_note: &str) -> Result<f64> {
    if !target.is_finite() {
        return Err(Error::Domain(format!("target distance {target} is not finite")));
    }
    if target <= dinf {
        return Err(Error::Unreachable(format!(
            "target distance {target} is at or below the asymptote {dinf}; {floor_note}"
        )));
    }
    if target > d0 {
        return Err(Error::Domain(format!(
            "target distance {target} exceeds the initial distance {d0}; it is met at t = 0"
        )));
    }
    conv.time_for(gamma, (target - dinf) / (d0 - dinf))
}

pub fn mixing_time_dep(target: f64, n: f64, a: f64, gamma: f64, conv: Convention) -> Result<f64> {
    check_n(n)?;
    check_mixedness(a)?;
    mixing_time(
        target,
        dephasing_initial(n, a),
        dephasing_asymptote(n),
        gamma,
        conv,
        "dephasing relaxes only to 1/(4 sqrt N)",
    )
}

pub fn mixing_time_bit(target: f64, d0: f64, gamma: f64, conv: Convention) -> Result<f64> {
    if !(0.0..=1.0).contains(&d0) {
        return Err(Error::OutOfRange { what: "initial distance", value: d0 });
    }
    mixing_time(target, d0, BITFLIP_ASYMPTOTE, gamma, conv, "bit-flip noise never mixes past 0.25")
}

/// Why a rate equation has no root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NoSolution {
    /// The target value is not positive while `f ≥ 0`.
    TargetNonPositive { target: f64 },
    /// The target is at or above `sup f = f(0⁺)`.
    TargetAboveSupremum { target: f64, supremum: f64 },
}

impl fmt::Display for NoSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoSolution::TargetNonPositive { target } => write!(f, "target {target:.6} <= 0 but f is nonnegative"),
            NoSolution::TargetAboveSupremum { target, supremum } => {
                write!(f, "target {target:.6} >= sup f = {supremum:.6} (reached only as the rate goes to 0)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RateSolution {
    Root { gamma: f64, target: f64, residual: f64 },
    NoSolution(NoSolution),
}

impl RateSolution {
    pub fn gamma(&self) -> Option<f64> {
        match self {
            RateSolution::Root { gamma, .. } => Some(*gamma),
            RateSolution::NoSolution(_) => None,
        }
    }
}

/// Solves `f(Γ) = target` for strictly decreasing `f` with `f(0) = sup`.
fn solve_decreasing<F: Fn(f64) -> f64>(f: F, sup: f64, target: f64) -> RateSolution {
    if !(target > 0.0) {
        return RateSolution::NoSolution(NoSolution::TargetNonPositive { target });
    }
    if target >= sup {
        return RateSolution::NoSolution(NoSolution::TargetAboveSupremum { target, supremum: sup });
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    debug_assert!(f(hi) <= target && (lo == 0.0 || f(lo) > target));
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (gamma, residual) = [lo, hi]
        .into_iter()
        .filter(|&g| g > 0.0)
        .map(|g| (g, (f(g) - target).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("hi is positive");
    RateSolution::Root { gamma, target, residual }
}

/// `3(√((1 - 1/N)² + a²)/(2a²) - 1)`.
pub fn tune_target_dep(a: f64, n: f64) -> f64 {
    3.0 * (((1.0 - 1.0 / n).powi(2) + a * a).sqrt() / (2.0 * a * a) - 1.0)
}

/// Dephasing rate at which the relaxation curve is exact:
/// `f_dep(M, Γ) = 3(√((1 - 1/N)² + a²)/(2a²) - 1)`.
pub fn tune_gamma_dep(a: f64, n: usize, m: usize) -> Result<RateSolution> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::OutOfRange { what: "coin mixedness a (must be in (0, 1])", value: a });
    }
    if n < 16 {
        return Err(Error::OutOfRange { what: "vertex count", value: n as f64 });
    }
    let target = tune_target_dep(a, n as f64);
    let f = |g: f64| f_dep(m, g).expect("nonnegative rate").value;
    Ok(solve_decreasing(f, m as f64 / 2.0, target))
}

/// Bit-flip rate solving `c a²(3 + f_bit(M, Γ)) + 1/4 = D0`, with
/// `c = (Mδ_bit/2)(1 + 1/(Nδ_bit))²` and `D0` the θ-averaged initial distance.
pub fn tune_gamma_bit(params: &AnalysisParams, a: f64) -> Result<RateSolution> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::OutOfRange { what: "coin mixedness a (must be in (0, 1])", value: a });
    }
    let target = tune_target_bit(params, a)?;
    let f = |g: f64| f_bit(params.m, g).expect("nonnegative rate").value;
    Ok(solve_decreasing(f, params.m as f64, target))
}

/// `(D0 - 1/4)/(c a²) - 3`, the value `f_bit` must take for the bit-flip
/// relaxation curve to be exact.
pub fn tune_target_bit(params: &AnalysisParams, a: f64) -> Result<f64> {
    let d0 = avg_distance_theta(a, params.n as usize)?;
    Ok((d0 - BITFLIP_ASYMPTOTE) / (bitflip_prefactor(params) * a * a) - 3.0)
}

/// `(Mδ_bit/2)(1 + 1/(Nδ_bit))²`.
pub fn bitflip_prefactor(p: &AnalysisParams) -> f64 {
    p.m as f64 * p.delta_bit / 2.0 * (1.0 + 1.0 / (p.n * p.delta_bit)).powi(2)
}

/// Threshold standing in for "≪ 1" in the small-amplitude regime check.
pub const REGIME_THRESHOLD: f64 = 0.1;

/// Dephasing distance bound at one coin orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingBound {
    /// `¼Nδ + a²MX + a²MY`.
    pub value: f64,
    /// `(δ + 4MA + 4Σ_{k<M} kB)/2`, before the small-amplitude expansion.
    pub pre_expansion: f64,
    /// `a²(1 + 2/(Nδ))² e^{-2Γt}`; the expansion assumes this is small.
    pub regime_parameter: f64,
    pub regime_ok: bool,
}

pub fn dephasing_bound_at_tmix(
    params: &AnalysisParams,
    a: f64,
    theta: f64,
    phi: f64,
    gamma: f64,
    t: f64,
) -> Result<DephasingBound> {
    check_mixedness(a)?;
    let decay = Convention::Continuous.decay(gamma, t)?;
    let (n, m, d) = (params.n, params.m as f64, params.delta_dep);
    let amp = (1.0 + 2.0 / (n * d)).powi(2);
    let angular = (theta.sin() * phi.cos()).powi(2);
    let x = d * amp * decay;
    let y = d * amp * angular * decay * f_dep(params.m, gamma)?.value;
    let value = 0.25 * n * d + a * a * m * x + a * a * m * y;

    let p = d + 2.0 / n;
    let big_a = (d * d + a * a * p * p * decay).sqrt();
    let big_b = (d * d + p * p * a * a * angular * decay).sqrt();
    let pre_expansion = 0.5 * (d + 4.0 * m * big_a + 4.0 * (m * (m - 1.0) / 2.0) * big_b);

    let regime_parameter = a * a * amp * decay;
    let regime_ok = regime_parameter < REGIME_THRESHOLD;
    if !regime_ok {
        log::debug!("dephasing bound outside its regime: parameter {regime_parameter:.3e}");
    }
    Ok(DephasingBound { value, pre_expansion, regime_parameter, regime_ok })
}

/// Sphere average of the dephasing bound, `¼Nδ + a²MX(1 + f_dep/3)`.
pub fn dephasing_avg_bound_at_tmix(params: &AnalysisParams, a: f64, gamma: f64, t: f64) -> Result<f64> {
    check_mixedness(a)?;
    let decay = Convention::Continuous.decay(gamma, t)?;
    let (n, m, d) = (params.n, params.m as f64, params.delta_dep);
    let x = d * (1.0 + 2.0 / (n * d)).powi(2) * decay;
    Ok(0.25 * n * d + a * a * m * x * (1.0 + f_dep(params.m, gamma)?.value / 3.0))
}

/// `Nδ/4 + (Mδ/2) a² (1 + 1/(Nδ))² (3 + f_bit) e^{-2Γt}` at `φ = π/2`.
pub fn bitflip_avg_bound_at_tmix(params: &AnalysisParams, a: f64, gamma: f64, t: f64) -> Result<f64> {
    check_mixedness(a)?;
    let decay = Convention::Continuous.decay(gamma, t)?;
    let floor = params.n * params.delta_bit / 4.0;
    Ok(floor + bitflip_prefactor(params) * a * a * (3.0 + f_bit(params.m, gamma)?.value) * decay)
}

/// Sampled relaxation curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub noise: NoiseKind,
    pub n: f64,
    pub a: f64,
    pub gamma: f64,
    pub convention: Convention,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("curve times must be strictly increasing".into()));
    }
    Ok(())
}

pub fn dephasing_curve(times: &[f64], n: f64, a: f64, gamma: f64, conv: Convention) -> Result<DistanceCurve> {
    check_times(times)?;
    let values = times.iter().map(|&t| dephasing_evolution(t, n, a, gamma, conv)).collect::<Result<_>>()?;
    Ok(DistanceCurve { times: times.to_vec(), values, noise: NoiseKind::Dephasing, n, a, gamma, convention: conv })
}

/// Bit-flip curve starting from the θ-averaged initial distance.
pub fn bitflip_curve(times: &[f64], n: usize, a: f64, gamma: f64, conv: Convention) -> Result<DistanceCurve> {
    check_times(times)?;
    let d0 = avg_distance_theta(a, n)?;
    let values = times.iter().map(|&t| bitflip_evolution(t, d0, gamma, conv)).collect::<Result<_>>()?;
    Ok(DistanceCurve {
        times: times.to_vec(),
        values,
        noise: NoiseKind::Bitflip,
        n: n as f64,
        a,
        gamma,
        convention: conv,
    })
}
