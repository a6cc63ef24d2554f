//! Experiment configuration: a flat `key = value` file whose keys are
//! mirrored one-to-one by command-line flags (`n_cycles` ↔ `--n-cycles`).
//!
//! Precedence, lowest first: built-in defaults, the config file, the
//! `MOUSTACHE_SEED` environment variable, explicit flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use moustache_core::IntegratorConfig;

use crate::error::{AppError, AppResult};

pub const SEED_ENV: &str = "MOUSTACHE_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown output format {s:?} (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Cycle ratio.
    pub r: f64,
    /// A cycle closes when the path reaches `r^k`.
    pub k: u32,
    pub n_cycles: usize,
    pub n_paths: usize,
    pub n_renewal: usize,
    /// Integrator knobs; its `seed` field is the experiment seed.
    pub integrator: IntegratorConfig,
    pub workers: usize,
    /// `None` writes to stdout.
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            r: 2.0,
            k: 30,
            n_cycles: 10_000,
            n_paths: 10_000,
            n_renewal: 100_000,
            integrator: IntegratorConfig::default(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Every recognised key, in file order.
pub const KEYS: &[&str] = &[
    "r",
    "k",
    "n_cycles",
    "n_paths",
    "n_renewal",
    "dt_natural",
    "dt_geometric",
    "boundary_guard",
    "max_halvings",
    "refine",
    "switch_margin",
    "max_switches",
    "seed",
    "workers",
    "output",
    "format",
];

fn parse<T: FromStr>(key: &str, value: &str) -> AppResult<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| AppError::Config(format!("{key} = {value:?}: {e}")))
}

impl ExperimentConfig {
    pub fn seed(&self) -> u64 {
        self.integrator.seed
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> AppResult<()> {
        let value = value.trim();
        let ic = &mut self.integrator;
        match key {
            "r" => self.r = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "n_cycles" => self.n_cycles = parse(key, value)?,
            "n_paths" => self.n_paths = parse(key, value)?,
            "n_renewal" => self.n_renewal = parse(key, value)?,
            "dt_natural" => ic.dt_natural = parse(key, value)?,
            "dt_geometric" => ic.dt_geometric = parse(key, value)?,
            "boundary_guard" => ic.boundary_guard = parse(key, value)?,
            "max_halvings" => ic.max_halvings = parse(key, value)?,
            "refine" => ic.refine = parse(key, value)?,
            "switch_margin" => ic.switch_margin = parse(key, value)?,
            "max_switches" => ic.max_switches = parse(key, value)?,
            "seed" => ic.seed = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            "output" => self.output = (!value.is_empty() && value != "-").then(|| PathBuf::from(value)),
            "format" => self.format = parse(key, value)?,
            _ => return Err(AppError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document. `#` starts a comment; blank lines
    /// are ignored.
    pub fn apply_text(&mut self, text: &str) -> AppResult<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| AppError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| AppError::Config(format!("line {}: {}", lineno + 1, e.to_string().trim_start_matches("config: "))))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> AppResult<()> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        self.apply_text(&text)
    }

    /// Applies the seed override from the environment, if set.
    pub fn apply_env(&mut self, seed: Option<&str>) -> AppResult<()> {
        match seed {
            Some(s) => self.set("seed", s).map_err(|_| AppError::Config(format!("{SEED_ENV} = {s:?} is not a 64-bit seed"))),
            None => Ok(()),
        }
    }

    pub fn validate(&self) -> AppResult<()> {
        let bad = |msg: &str| Err(AppError::Config(msg.to_owned()));
        if !(self.r.is_finite() && self.r > 1.0) {
            return bad("r must be greater than 1");
        }
        if self.k < 2 {
            return bad("k must be at least 2");
        }
        if self.n_cycles < 1 || self.n_paths < 1 || self.n_renewal < 1 {
            return bad("counts must be at least 1");
        }
        if self.workers < 1 {
            return bad("workers must be at least 1");
        }
        self.integrator.validate().map_err(|e| AppError::Config(e.to_string()))
    }

    /// The configuration as a `key = value` document that [`apply_text`]
    /// reads back to the same value.
    ///
    /// [`apply_text`]: Self::apply_text
    pub fn to_text(&self) -> String {
        let ic = &self.integrator;
        let output = self.output.as_ref().map_or("-".to_owned(), |p| p.display().to_string());
        let values: [String; 16] = [
            self.r.to_string(),
            self.k.to_string(),
            self.n_cycles.to_string(),
            self.n_paths.to_string(),
            self.n_renewal.to_string(),
            ic.dt_natural.to_string(),
            ic.dt_geometric.to_string(),
            ic.boundary_guard.to_string(),
            ic.max_halvings.to_string(),
            ic.refine.to_string(),
            ic.switch_margin.to_string(),
            ic.max_switches.to_string(),
            ic.seed.to_string(),
            self.workers.to_string(),
            output,
            self.format.to_string(),
        ];
        KEYS.iter().zip(values).map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trips() {
        let mut cfg = ExperimentConfig { r: 1.75, k: 12, workers: 3, ..Default::default() };
        cfg.integrator.dt_natural = 2.5e-4;
        cfg.output = Some(PathBuf::from("out/pool.csv"));
        cfg.format = OutputFormat::Json;
        let mut back = ExperimentConfig::default();
        back.apply_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn comments_blanks_and_whitespace() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text("# header\n\n  r =  3  # ratio\nseed=11\n").unwrap();
        assert_eq!(cfg.r, 3.0);
        assert_eq!(cfg.seed(), 11);
    }

    #[test]
    fn errors_name_the_line() {
        let mut cfg = ExperimentConfig::default();
        let e = cfg.apply_text("r = 2\nbogus = 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert_eq!(e.exit_code(), 2);
        assert!(cfg.apply_text("k = two").is_err());
        assert!(cfg.apply_text("no equals sign").is_err());
    }

    #[test]
    fn env_seed_and_validation() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_env(Some("99")).unwrap();
        assert_eq!(cfg.seed(), 99);
        assert!(cfg.apply_env(Some("-1")).is_err());
        cfg.apply_env(None).unwrap();
        assert_eq!(cfg.seed(), 99);
        cfg.validate().unwrap();
        for (k, v) in [("r", "1"), ("k", "1"), ("workers", "0"), ("n_paths", "0"), ("dt_natural", "0")] {
            let mut c = ExperimentConfig::default();
            c.set(k, v).unwrap();
            assert!(c.validate().is_err(), "{k} = {v}");
        }
    }
}
