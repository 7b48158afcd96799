//! One function per subcommand; each returns a [`ResultRecord`].

use std::f64::consts::PI;

use percwalk::analysis::{
    self, avg_distance_theta, bitflip_avg_bound_at_tmix, bitflip_curve, dephasing_avg_bound_at_tmix,
    dephasing_curve, f_bit, f_dep, initial_distance, mixing_time_bit, mixing_time_dep, tune_gamma_bit,
    tune_gamma_dep, AnalysisParams, RateSolution,
};
use percwalk::channels::{calibrate, NoiseKind, NoiseSpec};
use percwalk::lattice::{LatticeSpec, ZoneDecomposition};
use percwalk::qmatrix::{trace_distance_matrices, ComplexMatrix, DensityOperator};
use percwalk::walk::{
    evolve_exact, evolve_exact_trajectory, evolve_monte_carlo_ensemble, CoinSpec, MonteCarloOptions, PureEnsemble,
    WalkerState, EXACT_MAX_EDGES,
};
use percwalk::zonemodel::BlochCoinState;

use crate::config::{Engine, ExperimentConfig};
use crate::error::CliError;
use crate::record::{Cell, ResultRecord, Series};

/// Mixedness values tabulated by `table1`.
pub const TABLE1_A: [f64; 6] = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5];

fn noise_of(cfg: &ExperimentConfig) -> Result<NoiseSpec, CliError> {
    Ok(match cfg.noise_kind {
        NoiseKind::None => NoiseSpec::none(),
        kind => calibrate(kind, cfg.gamma, cfg.dt)?,
    })
}

fn coin_of(cfg: &ExperimentConfig) -> CoinSpec {
    CoinSpec::new(cfg.coin_alpha, cfg.coin_beta)
}

fn params_of(cfg: &ExperimentConfig) -> Result<AnalysisParams, CliError> {
    let p = AnalysisParams::new(cfg.vertices)?;
    Ok(p.with_deltas(cfg.delta_dep.unwrap_or(p.delta_dep), cfg.delta_bit.unwrap_or(p.delta_bit))?)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { b } else { a + step * k as f64 }).collect()
}

/// Per-step zone probabilities, their normalization and the coin distance to `I/2`.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    if cfg.lattice_side > cfg.max_side {
        return Err(CliError::ResourceCap { side: cfg.lattice_side, max: cfg.max_side });
    }
    let lattice = LatticeSpec::new(cfg.lattice_side)?;
    let exact = match cfg.engine {
        Engine::Exact => true,
        Engine::MonteCarlo => false,
        Engine::Auto => lattice.edges() <= EXACT_MAX_EDGES,
    };
    if exact && lattice.edges() > EXACT_MAX_EDGES {
        return Err(CliError::ResourceCap { side: cfg.lattice_side, max: 3 });
    }
    let coin_state = BlochCoinState::new(cfg.a, cfg.theta, cfg.phi)?.density();
    let noise = noise_of(cfg)?;
    let coin = coin_of(cfg);
    let zones = ZoneDecomposition::new(&lattice);
    let half = DensityOperator::maximally_mixed(2);

    let per_step: Vec<(usize, Vec<f64>, ComplexMatrix)> = if exact {
        let rho0 = WalkerState::localized(lattice, &coin_state)?;
        evolve_exact_trajectory(&rho0, cfg.steps, cfg.lambda, &coin, &noise)?
            .into_iter()
            .enumerate()
            .map(|(k, s)| (k, s.position_distribution(), s.coin_marginal().into_matrix()))
            .collect()
    } else {
        let init = PureEnsemble::localized(lattice, &coin_state)?;
        let opts = MonteCarloOptions {
            trajectories: cfg.trajectories,
            seed: cfg.seed,
            mode: cfg.mode,
            track_density: false,
            record_steps: true,
        };
        evolve_monte_carlo_ensemble(&init, cfg.steps, cfg.lambda, &coin, &noise, &opts)?
            .steps
            .into_iter()
            .map(|o| (o.step, o.position, o.coin))
            .collect()
    };

    let mut columns = vec!["step".to_string()];
    columns.extend((0..zones.zone_count()).map(|m| format!("p{m}")));
    columns.push("normalization".into());
    columns.push("coin_distance".into());
    let mut series = Series::new("zones", columns);
    let mut worst_norm: f64 = 0.0;
    for (step, position, coin_m) in per_step {
        let probs = zones.zone_probabilities(&position);
        let norm = ZoneDecomposition::normalization(&probs);
        worst_norm = worst_norm.max((norm - 1.0).abs());
        let dist = trace_distance_matrices(&coin_m, half.matrix())?;
        let mut row = vec![Cell::from(step)];
        row.extend(probs.into_iter().map(Cell::num));
        row.push(Cell::num(norm));
        row.push(Cell::num(dist));
        series.push(row);
    }

    let engine = if exact { "exact" } else { "monte-carlo" };
    let mut rec = ResultRecord::new("simulate", cfg.echo(), cfg.seed, engine);
    rec.scalar("vertices", lattice.vertices());
    rec.scalar("zones", zones.zone_count());
    rec.scalar("max_normalization_error", worst_norm);
    rec.scalar("noise_probability", noise.p);
    if !exact {
        rec.scalar("trajectories", cfg.trajectories);
    }
    rec.series.push(series);
    Ok(rec)
}

/// θ-averaged initial distance for the tabulated mixedness values.
pub fn cmd_table1(cfg: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    let mut series = Series::new("table1", ["a", "avg_distance"]);
    for a in TABLE1_A {
        series.push(vec![Cell::num(a), Cell::num(avg_distance_theta(a, cfg.vertices)?)]);
    }
    let mut rec = ResultRecord::new("table1", cfg.echo(), cfg.seed, "analytic");
    rec.scalar("vertices", cfg.vertices);
    rec.scalar("panels", analysis::THETA_PANELS);
    rec.series.push(series);
    Ok(rec)
}

fn push_rate_row(series: &mut Series, a: f64, target: f64, sol: &RateSolution) {
    let row = match sol {
        RateSolution::Root { gamma, residual, .. } => {
            vec![Cell::num(a), Cell::num(target), Cell::num(*gamma), Cell::num(*residual), "root".into(), Cell::Null]
        }
        RateSolution::NoSolution(why) => vec![
            Cell::num(a),
            Cell::num(target),
            Cell::Null,
            Cell::Null,
            "no_solution".into(),
            Cell::text(why.to_string()),
        ],
    };
    series.push(row);
}

/// Relaxation curves, rate functions, tuned rates and bounds.
pub fn cmd_curves(cfg: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    if !(cfg.gamma > 0.0) {
        return Err(CliError::Config("curves need gamma > 0".into()));
    }
    let params = params_of(cfg)?;
    let n = params.n;
    let t_max = cfg.t_max.unwrap_or(20.0 / cfg.gamma);
    let times = linspace(0.0, t_max, cfg.points);
    let mut rec = ResultRecord::new("curves", cfg.echo(), cfg.seed, "analytic");

    for curve in [
        dephasing_curve(&times, n, cfg.a, cfg.gamma, cfg.convention)?,
        bitflip_curve(&times, cfg.vertices, cfg.a, cfg.gamma, cfg.convention)?,
    ] {
        let mut s = Series::new(&curve.noise.to_string(), ["t", "distance"]);
        for (t, d) in curve.times.iter().zip(&curve.values) {
            s.push(vec![Cell::num(*t), Cell::num(*d)]);
        }
        rec.series.push(s);
    }

    let mut bounds = Series::new("bounds", ["t", "analytic_bound_dephasing", "analytic_bound_bitflip"]);
    for &t in &times {
        bounds.push(vec![
            Cell::num(t),
            Cell::num(dephasing_avg_bound_at_tmix(&params, cfg.a, cfg.gamma, t)?),
            Cell::num(bitflip_avg_bound_at_tmix(&params, cfg.a, cfg.gamma, t)?),
        ]);
    }
    rec.series.push(bounds);

    let mut rates = Series::new("rate_functions", ["gamma", "f_dep", "f_bit", "limit"]);
    for g in linspace(0.0, 1.0, cfg.points) {
        let (d, b) = (f_dep(params.m, g)?, f_bit(params.m, g)?);
        rates.push(vec![Cell::num(g), Cell::num(d.value), Cell::num(b.value), Cell::text(if d.limit { "yes" } else { "no" })]);
    }
    rec.series.push(rates);

    let cols = ["a", "target", "gamma_root", "residual", "status", "reason"];
    let mut dep = Series::new("tuning_dephasing", cols);
    let mut bit = Series::new("tuning_bitflip", cols);
    for k in 1..=10 {
        let a = k as f64 / 10.0;
        push_rate_row(&mut dep, a, analysis::tune_target_dep(a, n), &tune_gamma_dep(a, cfg.vertices, params.m)?);
        push_rate_row(&mut bit, a, analysis::tune_target_bit(&params, a)?, &tune_gamma_bit(&params, a)?);
    }
    rec.series.push(dep);
    rec.series.push(bit);

    let mut profile = Series::new("theta_profile", ["theta", "analytic_bound"]);
    for th in linspace(-PI, PI, cfg.points) {
        profile.push(vec![Cell::num(th), Cell::num(initial_distance(cfg.a, n, th))]);
    }
    rec.series.push(profile);

    rec.scalar("m", params.m);
    rec.scalar("t_max", t_max);
    Ok(rec)
}

/// Time for the relaxation curve to reach `target`.
pub fn cmd_mixing_time(cfg: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    let target = cfg.target.ok_or_else(|| CliError::Config("mixing-time needs --target".into()))?;
    let n = cfg.vertices as f64;
    let (d0, dinf, t) = match cfg.noise_kind {
        NoiseKind::Dephasing => (
            analysis::dephasing_initial(n, cfg.a),
            analysis::dephasing_asymptote(n),
            mixing_time_dep(target, n, cfg.a, cfg.gamma, cfg.convention),
        ),
        NoiseKind::Bitflip => {
            let d0 = avg_distance_theta(cfg.a, cfg.vertices)?;
            (d0, analysis::BITFLIP_ASYMPTOTE, mixing_time_bit(target, d0, cfg.gamma, cfg.convention))
        }
        NoiseKind::None => return Err(CliError::Config("mixing-time needs --noise-kind dephasing or bitflip".into())),
    };
    let t = t.map_err(|e| match e {
        percwalk::Error::Unreachable(m) | percwalk::Error::Domain(m) => CliError::Unreachable(m),
        other => CliError::Core(other),
    })?;
    let mut rec = ResultRecord::new("mixing-time", cfg.echo(), cfg.seed, "analytic");
    rec.scalar("noise", cfg.noise_kind.to_string().as_str());
    rec.scalar("target", target);
    rec.scalar("initial_distance", d0);
    rec.scalar("asymptote", dinf);
    rec.scalar("t_mix", t);
    rec.scalar("gamma", cfg.gamma);
    rec.scalar("convention", cfg.convention.to_string().as_str());
    Ok(rec)
}

/// Rate at which the relaxation curve is exact, or a structured no-solution.
pub fn cmd_gamma_tune(cfg: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    let params = params_of(cfg)?;
    let (noise, target, sol) = match cfg.noise_kind {
        NoiseKind::Bitflip => ("bitflip", analysis::tune_target_bit(&params, cfg.a)?, tune_gamma_bit(&params, cfg.a)?),
        _ => (
            "dephasing",
            analysis::tune_target_dep(cfg.a, params.n),
            tune_gamma_dep(cfg.a, cfg.vertices, params.m)?,
        ),
    };
    let mut rec = ResultRecord::new("gamma-tune", cfg.echo(), cfg.seed, "analytic");
    rec.scalar("noise", noise);
    rec.scalar("a", cfg.a);
    rec.scalar("m", params.m);
    rec.scalar("target", target);
    match &sol {
        RateSolution::Root { gamma, residual, .. } => {
            rec.scalar("status", "root");
            rec.scalar("gamma_root", *gamma);
            rec.scalar("residual", *residual);
            rec.scalars.insert("reason".into(), Cell::Null);
        }
        RateSolution::NoSolution(why) => {
            rec.scalar("status", "no_solution");
            rec.scalars.insert("gamma_root".into(), Cell::Null);
            rec.scalars.insert("residual".into(), Cell::Null);
            rec.scalar("reason", why.to_string().as_str());
        }
    }
    Ok(rec)
}

/// Thresholds for the oracle-equivalence check.
pub const VALIDATE_SIGMAS: f64 = 4.0;
pub const VALIDATE_SLACK: f64 = 1e-12;
pub const VALIDATE_MAX_TRACE_DISTANCE: f64 = 0.01;

/// Compares the sampler against exact enumeration on a small lattice.
/// Returns the record and whether every check passed.
pub fn cmd_validate(cfg: &ExperimentConfig) -> Result<(ResultRecord, bool), CliError> {
    let lattice = LatticeSpec::new(cfg.lattice_side)?;
    if lattice.edges() > EXACT_MAX_EDGES {
        return Err(CliError::Config(format!(
            "validate needs a lattice small enough for exact enumeration (side <= 3), got {}",
            cfg.lattice_side
        )));
    }
    let coin_state = BlochCoinState::new(cfg.a, cfg.theta, cfg.phi)?.density();
    let rho0 = WalkerState::localized(lattice, &coin_state)?;
    let noise = noise_of(cfg)?;
    let coin = coin_of(cfg);
    let exact = evolve_exact(&rho0, cfg.steps, cfg.lambda, &coin, &noise)?;
    let mut opts = MonteCarloOptions::new(cfg.trajectories, cfg.seed);
    opts.mode = cfg.mode;
    let est = evolve_monte_carlo_ensemble(&PureEnsemble::from_state(&rho0)?, cfg.steps, cfg.lambda, &coin, &noise, &opts)?;
    let mc = est.state().expect("density tracked");
    let se = est.standard_error().expect("density tracked");

    let mut worst_ratio: f64 = 0.0;
    let mut within = true;
    for ((e, m), s) in exact.matrix().as_slice().iter().zip(mc.matrix().as_slice()).zip(se.as_slice()) {
        let dev = m - e;
        for (d, sd) in [(dev.re.abs(), s.re), (dev.im.abs(), s.im)] {
            if d > VALIDATE_SIGMAS * sd + VALIDATE_SLACK {
                within = false;
            }
            // Round-off on entries with no sampling spread is not a deviation.
            let excess = (d - VALIDATE_SLACK).max(0.0);
            if sd > 0.0 {
                worst_ratio = worst_ratio.max(excess / sd);
            }
        }
    }
    let td = trace_distance_matrices(exact.matrix(), mc.matrix())?;
    let completeness = noise.channel().completeness_defect();

    let mut checks = Series::new("checks", ["check", "value", "threshold", "status"]);
    let status = |ok: bool| Cell::text(if ok { "PASS" } else { "FAIL" });
    checks.push(vec!["entrywise_sigmas".into(), Cell::num(worst_ratio), Cell::num(VALIDATE_SIGMAS), status(within)]);
    let td_ok = td < VALIDATE_MAX_TRACE_DISTANCE;
    checks.push(vec!["trace_distance".into(), Cell::num(td), Cell::num(VALIDATE_MAX_TRACE_DISTANCE), status(td_ok)]);
    let c_ok = completeness <= 1e-10;
    checks.push(vec!["kraus_completeness".into(), Cell::num(completeness), Cell::num(1e-10), status(c_ok)]);

    let mut rec = ResultRecord::new("validate", cfg.echo(), cfg.seed, "exact+monte-carlo");
    rec.scalar("trajectories", cfg.trajectories);
    rec.series.push(checks);
    Ok((rec, within && td_ok && c_ok))
}
