//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use percwalk::analysis::Convention;
use percwalk::channels::NoiseKind;
use percwalk::walk::TrajectoryMode;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Which walker engine `simulate` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Exact enumeration when the lattice is small enough, sampling otherwise.
    Auto,
    Exact,
    MonteCarlo,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "auto",
            Engine::Exact => "exact",
            Engine::MonteCarlo => "monte-carlo",
        })
    }
}

/// Every recognised key, in canonical (kebab-case) form.
pub const KEYS: &[&str] = &[
    "lattice-side",
    "lambda",
    "noise-kind",
    "gamma",
    "dt",
    "coin-alpha",
    "coin-beta",
    "a",
    "theta",
    "phi",
    "steps",
    "trajectories",
    "seed",
    "mode",
    "engine",
    "max-side",
    "vertices",
    "delta-dep",
    "delta-bit",
    "target",
    "t-max",
    "points",
    "convention",
    "output-path",
    "output-format",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lattice_side: usize,
    pub lambda: f64,
    pub noise_kind: NoiseKind,
    pub gamma: f64,
    pub dt: f64,
    pub coin_alpha: f64,
    pub coin_beta: f64,
    pub a: f64,
    pub theta: f64,
    pub phi: f64,
    pub steps: usize,
    pub trajectories: usize,
    pub seed: u64,
    pub mode: TrajectoryMode,
    pub engine: Engine,
    /// Largest side `simulate` accepts.
    pub max_side: usize,
    /// Vertex count for the analytic commands.
    pub vertices: usize,
    /// Closeness parameters; `None` keeps the analytic defaults.
    pub delta_dep: Option<f64>,
    pub delta_bit: Option<f64>,
    /// Target distance for `mixing-time`.
    pub target: Option<f64>,
    /// End of the time axis for `curves`; defaults to `20/Γ`.
    pub t_max: Option<f64>,
    pub points: usize,
    pub convention: Convention,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lattice_side: 2,
            lambda: 0.5,
            noise_kind: NoiseKind::None,
            gamma: 0.0,
            dt: 1.0,
            coin_alpha: FRAC_PI_2,
            coin_beta: FRAC_PI_4,
            a: 1.0,
            theta: 0.0,
            phi: 0.0,
            steps: 10,
            trajectories: 1000,
            seed: 0,
            mode: TrajectoryMode::Auto,
            engine: Engine::Auto,
            max_side: 24,
            vertices: 10_000,
            delta_dep: None,
            delta_bit: None,
            target: None,
            t_max: None,
            points: 201,
            convention: Convention::Continuous,
            output_path: None,
            output_format: OutputFormat::Csv,
        }
    }
}

/// Canonical form of a key: lower case, `_` replaced by `-`, aliases resolved.
pub fn canonical_key(key: &str) -> Result<&'static str, CliError> {
    let k = key.trim().trim_start_matches("--").to_ascii_lowercase().replace('_', "-");
    let k = match k.as_str() {
        "side" => "lattice-side",
        "noise" => "noise-kind",
        "output" => "output-path",
        "format" => "output-format",
        "delta" => "delta-dep",
        "alpha" => "coin-alpha",
        "beta" => "coin-beta",
        other => other,
    };
    KEYS.iter().copied().find(|&c| c == k).ok_or_else(|| CliError::Config(format!("unknown configuration key '{key}'")))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.trim().parse().map_err(|_| CliError::Config(format!("{key}: cannot parse '{value}'")))
}

/// A number, or a multiple of π written as `pi`, `-pi/2`, `3*pi/4`, `2pi`.
pub fn parse_angle(key: &str, value: &str) -> Result<f64, CliError> {
    let v = value.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(x) = v.parse::<f64>() {
        return Ok(x);
    }
    let bad = || CliError::Config(format!("{key}: cannot parse angle '{value}'"));
    let (sign, rest) = match v.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, v.as_str()),
    };
    let (num, den) = match rest.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (rest, 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*');
    let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
    Ok(sign * coef * PI / den)
}

fn parse_mode(value: &str) -> Result<TrajectoryMode, CliError> {
    match value.trim().to_ascii_lowercase().replace('_', "-").as_str() {
        "auto" => Ok(TrajectoryMode::Auto),
        "pure" | "pure-state" => Ok(TrajectoryMode::PureState),
        "density" | "density-matrix" => Ok(TrajectoryMode::DensityMatrix),
        other => Err(CliError::Config(format!("mode: unknown trajectory mode '{other}'"))),
    }
}

fn mode_name(mode: TrajectoryMode) -> &'static str {
    match mode {
        TrajectoryMode::Auto => "auto",
        TrajectoryMode::PureState => "pure-state",
        TrajectoryMode::DensityMatrix => "density-matrix",
    }
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = canonical_key(key)?;
        let v = value.trim();
        match key {
            "lattice-side" => self.lattice_side = parse_num(key, v)?,
            "lambda" => self.lambda = parse_num(key, v)?,
            "noise-kind" => {
                self.noise_kind = v.parse().map_err(|e: percwalk::Error| CliError::Config(format!("{key}: {e}")))?
            }
            "gamma" => self.gamma = parse_num(key, v)?,
            "dt" => self.dt = parse_num(key, v)?,
            "coin-alpha" => self.coin_alpha = parse_angle(key, v)?,
            "coin-beta" => self.coin_beta = parse_angle(key, v)?,
            "a" => self.a = parse_num(key, v)?,
            "theta" => self.theta = parse_angle(key, v)?,
            "phi" => self.phi = parse_angle(key, v)?,
            "steps" => self.steps = parse_num(key, v)?,
            "trajectories" => self.trajectories = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "mode" => self.mode = parse_mode(v)?,
            "engine" => {
                self.engine = match v.to_ascii_lowercase().replace('_', "-").as_str() {
                    "auto" => Engine::Auto,
                    "exact" => Engine::Exact,
                    "monte-carlo" | "mc" => Engine::MonteCarlo,
                    other => return Err(CliError::Config(format!("engine: unknown engine '{other}'"))),
                }
            }
            "max-side" => self.max_side = parse_num(key, v)?,
            "vertices" => self.vertices = parse_num(key, v)?,
            "delta-dep" => self.delta_dep = Some(parse_num(key, v)?),
            "delta-bit" => self.delta_bit = Some(parse_num(key, v)?),
            "target" => self.target = Some(parse_num(key, v)?),
            "t-max" => self.t_max = Some(parse_num(key, v)?),
            "points" => self.points = parse_num(key, v)?,
            "convention" => {
                self.convention = v.parse().map_err(|e: percwalk::Error| CliError::Config(format!("{key}: {e}")))?
            }
            "output-path" => self.output_path = (!v.is_empty()).then(|| PathBuf::from(v)),
            "output-format" => {
                self.output_format = match v.to_ascii_lowercase().as_str() {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => return Err(CliError::Config(format!("output-format: expected csv or json, got '{other}'"))),
                }
            }
            _ => unreachable!("canonical_key only returns known keys"),
        }
        Ok(())
    }

    /// Applies `key = value` pairs in order; later pairs win.
    pub fn apply<'a, I>(&mut self, pairs: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        for (k, v) in pairs {
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Defaults, then the file (if any), then the flag overrides.
    pub fn load(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
            let pairs = parse_pairs(&text)?;
            cfg.apply(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        }
        cfg.apply(overrides.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let err = |m: String| Err(CliError::Config(m));
        if self.lattice_side < 2 {
            return err(format!("lattice-side must be at least 2, got {}", self.lattice_side));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return err(format!("lambda must lie in [0, 1], got {}", self.lambda));
        }
        if !(0.0..=1.0).contains(&self.a) {
            return err(format!("a must lie in [0, 1], got {}", self.a));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return err(format!("gamma must be a finite nonnegative number, got {}", self.gamma));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return err(format!("dt must be positive, got {}", self.dt));
        }
        for (name, x) in [("coin-alpha", self.coin_alpha), ("coin-beta", self.coin_beta), ("theta", self.theta), ("phi", self.phi)] {
            if !x.is_finite() {
                return err(format!("{name} must be finite"));
            }
        }
        if self.trajectories == 0 {
            return err("trajectories must be at least 1".into());
        }
        if self.vertices < 16 {
            return err(format!("vertices must be at least 16, got {}", self.vertices));
        }
        if self.points < 2 {
            return err(format!("points must be at least 2, got {}", self.points));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) || !t.is_finite() {
                return err(format!("t-max must be positive, got {t}"));
            }
        }
        for (name, d) in [("delta-dep", self.delta_dep), ("delta-bit", self.delta_bit)] {
            if let Some(d) = d {
                if !(d > 0.0) || !d.is_finite() {
                    return err(format!("{name} must be positive, got {d}"));
                }
            }
        }
        if let Some(t) = self.target {
            if !t.is_finite() {
                return err("target must be finite".into());
            }
        }
        Ok(())
    }

    /// Canonical `key -> value` echo of every setting.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("lattice-side", self.lattice_side.to_string());
        put("lambda", self.lambda.to_string());
        put("noise-kind", self.noise_kind.to_string());
        put("gamma", self.gamma.to_string());
        put("dt", self.dt.to_string());
        put("coin-alpha", self.coin_alpha.to_string());
        put("coin-beta", self.coin_beta.to_string());
        put("a", self.a.to_string());
        put("theta", self.theta.to_string());
        put("phi", self.phi.to_string());
        put("steps", self.steps.to_string());
        put("trajectories", self.trajectories.to_string());
        put("seed", self.seed.to_string());
        put("mode", mode_name(self.mode).to_string());
        put("engine", self.engine.to_string());
        put("max-side", self.max_side.to_string());
        put("vertices", self.vertices.to_string());
        put("delta-dep", self.delta_dep.map(|d| d.to_string()).unwrap_or_default());
        put("delta-bit", self.delta_bit.map(|d| d.to_string()).unwrap_or_default());
        put("target", self.target.map(|t| t.to_string()).unwrap_or_default());
        put("t-max", self.t_max.map(|t| t.to_string()).unwrap_or_default());
        put("points", self.points.to_string());
        put("convention", self.convention.to_string());
        put("output-path", self.output_path.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
        put("output-format", self.output_format.to_string());
        m
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got '{line}'", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_accept_both_spellings() {
        assert_eq!(canonical_key("lattice_side").unwrap(), "lattice-side");
        assert_eq!(canonical_key("--noise").unwrap(), "noise-kind");
        assert!(canonical_key("colour").is_err());
    }

    #[test]
    fn angles() {
        assert!((parse_angle("x", "pi/2").unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((parse_angle("x", "-3*pi/4").unwrap() + 3.0 * FRAC_PI_4).abs() < 1e-15);
        assert!((parse_angle("x", "2pi").unwrap() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(parse_angle("x", "0.25").unwrap(), 0.25);
        assert!(parse_angle("x", "tau").is_err());
    }

    #[test]
    fn file_then_flags() {
        let text = "# comment\nlattice_side = 4\n\nlambda=0.25\nnoise = dephasing\n";
        let pairs = parse_pairs(text).unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.apply(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str()))).unwrap();
        cfg.apply([("lambda", "0.75")]).unwrap();
        assert_eq!(cfg.lattice_side, 4);
        assert_eq!(cfg.lambda, 0.75);
        assert_eq!(cfg.noise_kind, NoiseKind::Dephasing);
        assert!(parse_pairs("lambda 0.5").is_err());
    }

    #[test]
    fn validation_rejects_out_of_range() {
        for (k, v) in [("lambda", "1.5"), ("a", "-0.1"), ("gamma", "-1"), ("lattice-side", "1"), ("trajectories", "0")] {
            let mut cfg = ExperimentConfig::default();
            cfg.set(k, v).unwrap();
            assert!(cfg.validate().is_err(), "{k} = {v}");
        }
        assert!(ExperimentConfig::default().set("steps", "ten").is_err());
    }
}
