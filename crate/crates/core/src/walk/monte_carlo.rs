//! Monte Carlo estimation of the percolated walk.
//!
//! Each trajectory draws its own configuration sequence from a stream keyed by
//! `(seed, trajectory index)`. Trajectories are grouped into fixed-size chunks
//! and chunk sums are combined by a pairwise tree in index order, so the
//! estimate is bit-identical for any number of worker threads.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CoinSpec, StepOperator, WalkerState};
use crate::channels::{KrausChannel, NoiseKind, NoiseSpec};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, PercolationModel};
use crate::qmatrix::{hermitian_eigen, ComplexMatrix, DensityOperator};
use crate::rng::{self, Purpose};

const CHUNK: usize = 64;
const MAX_WAVE_CHUNKS: usize = 64;
const WAVE_BYTES: usize = 256 << 20;
/// `Auto` evolves full density matrices per trajectory up to this dimension.
pub const AUTO_DENSITY_MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryMode {
    Auto,
    /// Pure-state unraveling: Kraus branches are sampled.
    PureState,
    /// Each trajectory carries a density matrix; noise is applied exactly and
    /// only the configurations are sampled.
    DensityMatrix,
}

impl TrajectoryMode {
    fn resolve(self, dim: usize) -> Self {
        match self {
            Self::Auto if dim <= AUTO_DENSITY_MAX_DIM => Self::DensityMatrix,
            Self::Auto => Self::PureState,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloOptions {
    pub trajectories: usize,
    pub seed: u64,
    pub mode: TrajectoryMode,
    /// Accumulate the full density matrix and its per-entry standard error.
    pub track_density: bool,
    /// Record position and coin marginals after every step.
    pub record_steps: bool,
}

impl MonteCarloOptions {
    pub fn new(trajectories: usize, seed: u64) -> Self {
        Self { trajectories, seed, mode: TrajectoryMode::Auto, track_density: true, record_steps: false }
    }
}

/// A mixed state as weighted pure components, `ρ = Σ w_i |ψ_i⟩⟨ψ_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureEnsemble {
    lattice: LatticeSpec,
    components: Vec<(f64, Vec<Complex64>)>,
}

const COMPONENT_CUTOFF: f64 = 1e-14;

impl PureEnsemble {
    /// Eigen-decomposes a walker state. Cost grows as `(2N)³`; prefer
    /// [`PureEnsemble::localized`] on large lattices.
    pub fn from_state(state: &WalkerState) -> Result<Self> {
        let eig = hermitian_eigen(state.matrix())?;
        let components = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > COMPONENT_CUTOFF)
            .map(|(k, &w)| (w, eig.vector(k)))
            .collect();
        Ok(Self { lattice: *state.lattice(), components })
    }

    /// `ρ_coin ⊗ |origin⟩⟨origin|` without touching a `2N × 2N` matrix.
    pub fn localized(lattice: LatticeSpec, coin: &DensityOperator) -> Result<Self> {
        if coin.dim() != 2 {
            return Err(Error::Shape(format!("coin state must be 2x2, got dimension {}", coin.dim())));
        }
        let n = lattice.vertices();
        let o = lattice.origin_index();
        let eig = hermitian_eigen(coin.matrix())?;
        let components = (0..2)
            .filter(|&k| eig.values[k] > COMPONENT_CUTOFF)
            .map(|k| {
                let mut psi = vec![Complex64::new(0.0, 0.0); 2 * n];
                psi[o] = eig.vectors[(0, k)];
                psi[n + o] = eig.vectors[(1, k)];
                (eig.values[k], psi)
            })
            .collect();
        Ok(Self { lattice, components })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn components(&self) -> &[(f64, Vec<Complex64>)] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        2 * self.lattice.vertices()
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (w, psi) in &self.components {
            add_outer(m.as_mut_slice(), psi, *w);
        }
        m
    }
}

/// Position distribution and coin marginal after a given step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepObservables {
    pub step: usize,
    pub position: Vec<f64>,
    pub coin: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct MonteCarloEstimate {
    pub trajectories: usize,
    pub mode: TrajectoryMode,
    state: Option<WalkerState>,
    stderr: Option<ComplexMatrix>,
    /// Entry `k` holds the observables after `k` steps (entry 0 is the input).
    pub steps: Vec<StepObservables>,
}

impl MonteCarloEstimate {
    /// The mean density matrix, when density tracking was requested.
    pub fn state(&self) -> Option<&WalkerState> {
        self.state.as_ref()
    }

    /// Standard error of the mean for each entry: the real part of entry
    /// `(i, j)` holds the error of `Re ρ_ij`, the imaginary part that of
    /// `Im ρ_ij`. Zero when only one trajectory was run.
    pub fn standard_error(&self) -> Option<&ComplexMatrix> {
        self.stderr.as_ref()
    }
}

/// Sums over a contiguous block of trajectories.
struct Acc {
    count: usize,
    sum: Vec<Complex64>,
    sq_re: Vec<f64>,
    sq_im: Vec<f64>,
    pos: Vec<f64>,
    coin: Vec<Complex64>,
}

impl Acc {
    fn new(d: usize, track: bool, record_len: usize, n: usize) -> Self {
        let dd = if track { d * d } else { 0 };
        Self {
            count: 0,
            sum: vec![Complex64::new(0.0, 0.0); dd],
            sq_re: vec![0.0; dd],
            sq_im: vec![0.0; dd],
            pos: vec![0.0; record_len * n],
            coin: vec![Complex64::new(0.0, 0.0); record_len * 4],
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.count += other.count;
        add_into(&mut self.sum, &other.sum);
        add_into(&mut self.sq_re, &other.sq_re);
        add_into(&mut self.sq_im, &other.sq_im);
        add_into(&mut self.pos, &other.pos);
        add_into(&mut self.coin, &other.coin);
        self
    }

    fn add_density(&mut self, m: &[Complex64]) {
        for (((s, qr), qi), z) in self.sum.iter_mut().zip(&mut self.sq_re).zip(&mut self.sq_im).zip(m) {
            *s += z;
            *qr += z.re * z.re;
            *qi += z.im * z.im;
        }
    }
}

fn add_into<T: Copy + std::ops::AddAssign>(a: &mut [T], b: &[T]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += *y;
    }
}

fn add_outer(m: &mut [Complex64], psi: &[Complex64], w: f64) {
    let d = psi.len();
    for (i, a) in psi.iter().enumerate() {
        if *a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let wa = a * w;
        for (o, b) in m[i * d..(i + 1) * d].iter_mut().zip(psi) {
            *o += wa * b.conj();
        }
    }
}

fn pairwise(mut parts: Vec<Acc>) -> Option<Acc> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.merge(b),
                None => a,
            });
        }
        parts = next;
    }
    parts.pop()
}

struct Problem<'a> {
    lattice: LatticeSpec,
    steps: usize,
    lambda: f64,
    coin: &'a CoinSpec,
    channel: KrausChannel,
    noisy: bool,
    opts: MonteCarloOptions,
    mode: TrajectoryMode,
    init: &'a PureEnsemble,
    init_density: Option<ComplexMatrix>,
}

impl Problem<'_> {
    fn record_len(&self) -> usize {
        if self.opts.record_steps {
            self.steps + 1
        } else {
            0
        }
    }

    fn run_chunk(&self, chunk: usize) -> Acc {
        let d = self.init.dim();
        let n = self.lattice.vertices();
        let mut acc = Acc::new(d, self.opts.track_density, self.record_len(), n);
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(self.opts.trajectories);
        let mut scratch = vec![Complex64::new(0.0, 0.0); d];
        let mut est = vec![Complex64::new(0.0, 0.0); if self.opts.track_density { d * d } else { 0 }];
        for t in start..end {
            match self.mode {
                TrajectoryMode::DensityMatrix => self.density_trajectory(t as u64, &mut acc),
                _ => self.pure_trajectory(t as u64, &mut acc, &mut scratch, &mut est),
            }
            acc.count += 1;
        }
        acc
    }

    fn model(&self, t: u64) -> PercolationModel {
        PercolationModel::new(self.lambda, rng::child_seed(self.opts.seed, t)).expect("lambda validated")
    }

    fn record_density(&self, acc: &mut Acc, step: usize, m: &ComplexMatrix) {
        if !self.opts.record_steps {
            return;
        }
        let n = self.lattice.vertices();
        let pos = &mut acc.pos[step * n..(step + 1) * n];
        for v in 0..n {
            pos[v] += m[(v, v)].re + m[(n + v, n + v)].re;
        }
        let coin = &mut acc.coin[step * 4..(step + 1) * 4];
        for c in 0..2 {
            for e in 0..2 {
                coin[2 * c + e] += (0..n).map(|v| m[(c * n + v, e * n + v)]).sum::<Complex64>();
            }
        }
    }

    fn record_pure(&self, acc: &mut Acc, step: usize, comps: &[(f64, Vec<Complex64>)]) {
        if !self.opts.record_steps {
            return;
        }
        let n = self.lattice.vertices();
        for (w, psi) in comps {
            let pos = &mut acc.pos[step * n..(step + 1) * n];
            for v in 0..n {
                pos[v] += w * (psi[v].norm_sqr() + psi[n + v].norm_sqr());
            }
            let coin = &mut acc.coin[step * 4..(step + 1) * 4];
            for c in 0..2 {
                for e in 0..2 {
                    let s: Complex64 = (0..n).map(|v| psi[c * n + v] * psi[e * n + v].conj()).sum();
                    coin[2 * c + e] += s * w;
                }
            }
        }
    }

    fn density_trajectory(&self, t: u64, acc: &mut Acc) {
        let model = self.model(t);
        let mut rho = self.init_density.clone().expect("density mode keeps the initial matrix");
        self.record_density(acc, 0, &rho);
        for step in 0..self.steps {
            if self.noisy {
                rho = self.channel.apply_matrix(&rho).expect("dimension checked");
            }
            let cfg = model.sample(&self.lattice, step as u64);
            let op = StepOperator::new(&cfg, self.coin, &self.lattice).expect("configuration from lattice");
            rho = op.conjugate(&rho);
            self.record_density(acc, step + 1, &rho);
        }
        if self.opts.track_density {
            acc.add_density(rho.as_slice());
        }
    }

    fn pure_trajectory(&self, t: u64, acc: &mut Acc, scratch: &mut [Complex64], est: &mut [Complex64]) {
        let model = self.model(t);
        let mut kraus_rng = rng::stream(rng::child_seed(self.opts.seed, t), Purpose::Kraus, 0);
        let mut comps = self.init.components.clone();
        self.record_pure(acc, 0, &comps);
        for step in 0..self.steps {
            let cfg = model.sample(&self.lattice, step as u64);
            let op = StepOperator::new(&cfg, self.coin, &self.lattice).expect("configuration from lattice");
            for (_, psi) in comps.iter_mut() {
                if self.noisy {
                    jump(&self.channel, psi, kraus_rng.random::<f64>());
                }
                op.apply(psi, scratch);
            }
            self.record_pure(acc, step + 1, &comps);
        }
        if self.opts.track_density {
            est.fill(Complex64::new(0.0, 0.0));
            for (w, psi) in &comps {
                add_outer(est, psi, *w);
            }
            acc.add_density(est);
        }
    }
}

/// Applies the Kraus branch selected by `u ∈ [0, 1)` and renormalizes.
fn jump(channel: &KrausChannel, psi: &mut [Complex64], u: f64) {
    let n = psi.len() / 2;
    let branch = |k: &ComplexMatrix, a: Complex64, b: Complex64| {
        (k[(0, 0)] * a + k[(0, 1)] * b, k[(1, 0)] * a + k[(1, 1)] * b)
    };
    let kraus = channel.kraus();
    let mut chosen = kraus.len() - 1;
    let mut cumulative = 0.0;
    for (l, k) in kraus.iter().enumerate() {
        let weight: f64 = (0..n)
            .map(|v| {
                let (x, y) = branch(k, psi[v], psi[n + v]);
                x.norm_sqr() + y.norm_sqr()
            })
            .sum();
        cumulative += weight;
        if u < cumulative {
            chosen = l;
            break;
        }
    }
    let k = &kraus[chosen];
    let mut norm = 0.0;
    for v in 0..n {
        let (x, y) = branch(k, psi[v], psi[n + v]);
        psi[v] = x;
        psi[n + v] = y;
        norm += x.norm_sqr() + y.norm_sqr();
    }
    let scale = 1.0 / norm.sqrt();
    for z in psi.iter_mut() {
        *z *= scale;
    }
}

pub fn evolve_monte_carlo(
    rho0: &WalkerState,
    steps: usize,
    lambda: f64,
    coin: &CoinSpec,
    noise: &NoiseSpec,
    trajectories: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let ensemble = PureEnsemble::from_state(rho0)?;
    evolve_monte_carlo_ensemble(&ensemble, steps, lambda, coin, noise, &MonteCarloOptions::new(trajectories, seed))
}

pub fn evolve_monte_carlo_ensemble(
    init: &PureEnsemble,
    steps: usize,
    lambda: f64,
    coin: &CoinSpec,
    noise: &NoiseSpec,
    opts: &MonteCarloOptions,
) -> Result<MonteCarloEstimate> {
    if opts.trajectories == 0 {
        return Err(Error::Config("at least one trajectory is required".into()));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange { what: "edge-keep probability", value: lambda });
    }
    let lattice = *init.lattice();
    let d = init.dim();
    let n = lattice.vertices();
    let mode = opts.mode.resolve(d);
    let problem = Problem {
        lattice,
        steps,
        lambda,
        coin,
        channel: noise.channel(),
        noisy: noise.kind != NoiseKind::None && noise.p > 0.0,
        opts: *opts,
        mode,
        init,
        init_density: (mode == TrajectoryMode::DensityMatrix).then(|| init.density_matrix()),
    };

    let chunks = opts.trajectories.div_ceil(CHUNK);
    let acc_bytes = if opts.track_density { d * d * 32 } else { 0 } + problem.record_len() * (n * 8 + 64) + 64;
    let wave = (WAVE_BYTES / acc_bytes).clamp(1, MAX_WAVE_CHUNKS);
    let mut total: Option<Acc> = None;
    for first in (0..chunks).step_by(wave) {
        let last = (first + wave).min(chunks);
        let parts: Vec<Acc> = (first..last).into_par_iter().map(|c| problem.run_chunk(c)).collect();
        let wave_sum = pairwise(parts).expect("non-empty wave");
        total = Some(match total {
            Some(t) => t.merge(wave_sum),
            None => wave_sum,
        });
    }
    let total = total.expect("at least one chunk");
    let count = total.count as f64;
    debug_assert_eq!(total.count, opts.trajectories);

    let (state, stderr) = if opts.track_density {
        let mean: Vec<Complex64> = total.sum.iter().map(|s| s / count).collect();
        let se = |sum: f64, sq: f64| {
            if total.count < 2 {
                return 0.0;
            }
            let var = ((sq - sum * sum / count) / (count - 1.0)).max(0.0);
            (var / count).sqrt()
        };
        let err: Vec<Complex64> = total
            .sum
            .iter()
            .zip(total.sq_re.iter().zip(&total.sq_im))
            .map(|(s, (qr, qi))| Complex64::new(se(s.re, *qr), se(s.im, *qi)))
            .collect();
        (
            Some(WalkerState::from_matrix_unchecked(lattice, ComplexMatrix::new(d, d, mean)?)),
            Some(ComplexMatrix::new(d, d, err)?),
        )
    } else {
        (None, None)
    };

    let steps_out = (0..problem.record_len())
        .map(|k| StepObservables {
            step: k,
            position: total.pos[k * n..(k + 1) * n].iter().map(|p| p / count).collect(),
            coin: ComplexMatrix::new(2, 2, total.coin[k * 4..(k + 1) * 4].iter().map(|z| z / count).collect())
                .expect("2x2"),
        })
        .collect();

    Ok(MonteCarloEstimate { trajectories: opts.trajectories, mode, state, stderr, steps: steps_out })
}
