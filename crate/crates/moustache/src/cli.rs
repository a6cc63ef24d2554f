use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moustache_core::estimators::{estimate_t_tail, ergodic_average, rayleigh_limit_report, KsReport, MomentReport, Proportion};
use moustache_core::laws::{density_uv, exit_prob, rayleigh_cdf, rayleigh_pdf, sample_uv, tail_v, tail_v_series, EnvelopeParams};
use moustache_core::regeneration::{
    future_min_envelope, Crossing, EnvelopeReport, EscapeEnvelope, IntegralTestEnvelope, LogEnvelope, SqrtEnvelope,
};
use moustache_core::sde::{hybrid_path, integrate_bessel, integrate_r, integrate_x};
use moustache_core::rng::task_rng;
use moustache_core::{CyclePool, RenewalSequence, TailEstimate, TrajectoryGrid};
use serde::Serialize;

use crate::config::{ExperimentConfig, OutputFormat, SEED_ENV};
use crate::error::{AppError, AppResult};
use crate::experiments as exp;
use crate::io::{open_output, read_pool_file, write_json, write_pool_csv, write_renewal_csv, write_table_csv, write_trajectory_csv};
use crate::parallel::run_indexed;
use crate::suite::{acceptance_suite, exact_suite, AcceptanceScale, Suite};

#[derive(Debug, Parser)]
#[command(name = "moustache", version, about = "Simulation experiments for planar Brownian motion conditioned to avoid the unit disk")]
pub struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub flags: ConfigFlags,

    #[command(subcommand)]
    pub command: Command,
}

/// One flag per configuration key; each overrides the file and the
/// environment.
#[derive(Debug, Default, Args)]
pub struct ConfigFlags {
    /// Cycle ratio r > 1 [default: 2].
    #[arg(long, global = true, value_name = "R")]
    pub r: Option<String>,
    /// Truncation exponent: a cycle ends when R reaches r^k [default: 30].
    #[arg(long, global = true, value_name = "K")]
    pub k: Option<String>,
    /// Default cycle count [default: 10000].
    #[arg(long, global = true, value_name = "N")]
    pub n_cycles: Option<String>,
    /// Default path count for Monte Carlo checks [default: 10000].
    #[arg(long, global = true, value_name = "N")]
    pub n_paths: Option<String>,
    /// Default length of renewal sequences [default: 100000].
    #[arg(long, global = true, value_name = "N")]
    pub n_renewal: Option<String>,
    /// Base step in natural time [default: 1e-3].
    #[arg(long, global = true, value_name = "DT")]
    pub dt_natural: Option<String>,
    /// Base step in geometric time [default: 1e-3].
    #[arg(long, global = true, value_name = "DT")]
    pub dt_geometric: Option<String>,
    /// Smallest admissible distance above the unit circle [default: 1e-6].
    #[arg(long, global = true, value_name = "EPS")]
    pub boundary_guard: Option<String>,
    /// Cap on step halvings after a rejected proposal [default: 40].
    #[arg(long, global = true, value_name = "N")]
    pub max_halvings: Option<String>,
    /// Relative resolution near the boundary and records [default: 0.1].
    #[arg(long, global = true, value_name = "F")]
    pub refine: Option<String>,
    /// Hysteresis between the two clocks [default: 0.05].
    #[arg(long, global = true, value_name = "F")]
    pub switch_margin: Option<String>,
    /// Cap on clock switches in one run [default: 1000000].
    #[arg(long, global = true, value_name = "N")]
    pub max_switches: Option<String>,
    /// Master seed; overrides MOUSTACHE_SEED [default: 2021].
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<String>,
    /// Worker threads [default: available cores].
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<String>,
    /// Output file; `-` or absent for stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<String>,
    /// csv or json.
    #[arg(long, global = true, value_name = "FMT")]
    pub format: Option<String>,
}

impl ConfigFlags {
    fn pairs(&self) -> [(&'static str, &Option<String>); 16] {
        [
            ("r", &self.r),
            ("k", &self.k),
            ("n_cycles", &self.n_cycles),
            ("n_paths", &self.n_paths),
            ("n_renewal", &self.n_renewal),
            ("dt_natural", &self.dt_natural),
            ("dt_geometric", &self.dt_geometric),
            ("boundary_guard", &self.boundary_guard),
            ("max_halvings", &self.max_halvings),
            ("refine", &self.refine),
            ("switch_margin", &self.switch_margin),
            ("max_switches", &self.max_switches),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("output", &self.output),
            ("format", &self.format),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceKind {
    /// Pool records in file order, each once.
    InOrder,
    /// Pool records resampled with replacement.
    Bootstrap,
    /// Freshly simulated cycles.
    Live,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawTable {
    /// Joint density of (U, V) on a grid.
    UvDensity,
    /// P(V > v): closed form and series.
    VTail,
    /// Exact draws of (U, V).
    UvSamples,
    /// Rayleigh pdf and cdf.
    Rayleigh,
    /// Exit probability through the upper barrier as a function of r0.
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LimitCheck {
    Rayleigh,
    Ergodic,
    Moment,
    Martingale,
    Exit,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnvelopeKind {
    /// f(t) = √t.
    Sqrt,
    /// f(t) = K √(t ln₃ t).
    Escape,
    /// f(t) = exp(ln t · g(ln₂ t)) with g(u) = C / u^p.
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathChoice {
    /// R in natural time with the fixed-step integrator.
    R,
    /// R on the adaptive two-clock grid.
    Hybrid,
    /// X in geometric time.
    X,
    /// Bessel process of dimension `--dim`.
    Bessel,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate independent cycles and write the pool CSV.
    SampleCycles {
        /// Number of cycles (overrides n_cycles).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Assemble the renewal sequence (T_i, A_i).
    Renewal {
        /// Pool CSV to draw cycles from; cycles are simulated when absent.
        #[arg(long, value_name = "FILE")]
        pool: Option<PathBuf>,
        /// Defaults to bootstrap with a pool and live without.
        #[arg(long, value_enum)]
        source: Option<SourceKind>,
        /// Sequence length (overrides n_renewal).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Empirical P(T ≥ t) with Wilson bounds.
    TailT {
        /// Comma-separated increasing grid.
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, value_name = "FILE")]
        pool: Option<PathBuf>,
        /// Cycles to simulate without a pool (overrides n_cycles).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Closed-form tables and exact samples.
    Laws {
        #[arg(long, value_enum, default_value = "v-tail")]
        table: LawTable,
        /// Points per axis.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// Sample count for uv-samples (overrides n_paths).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Monte Carlo checks of limit laws and exact identities (JSON).
    LimitChecks {
        #[arg(long, value_enum, default_value = "all")]
        check: LimitCheck,
        /// Natural time for the moment and Rayleigh checks.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        r0: f64,
        /// Geometric horizon of the ergodic average.
        #[arg(long, default_value_t = 1000.0)]
        horizon: f64,
        /// Paths (overrides n_paths).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Compare future minima A_i with an envelope f(T_i) (JSON).
    Envelopes {
        #[arg(long, value_name = "FILE")]
        pool: Option<PathBuf>,
        #[arg(long, value_enum)]
        source: Option<SourceKind>,
        #[arg(long, value_enum, default_value = "integral")]
        envelope: EnvelopeKind,
        /// K of the escape envelope; defaults to r√(2(r+1)/(r-1)).
        #[arg(long = "envelope-k", value_name = "K")]
        envelope_k: Option<f64>,
        /// C in g(u) = C/u^p.
        #[arg(long, default_value_t = 3.0)]
        g_coef: f64,
        /// p in g(u) = C/u^p.
        #[arg(long, default_value_t = 2.0)]
        g_power: f64,
        #[arg(long, value_enum, default_value = "below")]
        direction: Direction,
        /// First index examined (0-based).
        #[arg(long, default_value_t = 0)]
        from: usize,
        /// One past the last index examined; defaults to the sequence length.
        #[arg(long)]
        to: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run a verification suite; exits with status 4 on failure.
    Verify {
        #[arg(long, default_value = "exact")]
        suite: Suite,
        /// Minimal sample sizes (acceptance suite only).
        #[arg(long)]
        smoke: bool,
    },
    /// Write one simulated path as `time,value`.
    Trajectory {
        #[arg(long, value_enum, default_value = "r")]
        kind: PathChoice,
        #[arg(long, default_value_t = 1.0)]
        x0: f64,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        /// Bessel dimension.
        #[arg(long, default_value_t = 2.0)]
        dim: f64,
    },
}

/// Defaults, then the config file, then `MOUSTACHE_SEED`, then flags.
pub fn resolve_config(cli: &Cli, env_seed: Option<&str>) -> AppResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    cfg.apply_env(env_seed)?;
    for (key, value) in cli.flags.pairs() {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    Ok(cfg)
}

fn io_err(cfg: &ExperimentConfig) -> impl Fn(std::io::Error) -> AppError + '_ {
    move |e| AppError::io(cfg.output.clone().unwrap_or_else(|| "<stdout>".into()), e)
}

fn emit<F>(cfg: &ExperimentConfig, write: F) -> AppResult<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let mut out = open_output(cfg.output.as_deref())?;
    write(&mut out).and_then(|_| out.flush()).map_err(io_err(cfg))
}

fn load_pool(cfg: &ExperimentConfig, path: Option<&PathBuf>, n: usize) -> AppResult<CyclePool> {
    match path {
        Some(p) => read_pool_file(p, cfg.r),
        None => exp::cycle_pool(cfg, n),
    }
}

fn renewal_from(cfg: &ExperimentConfig, pool: Option<&PathBuf>, source: Option<SourceKind>, n: usize) -> AppResult<RenewalSequence> {
    let source = source.unwrap_or(if pool.is_some() { SourceKind::Bootstrap } else { SourceKind::Live });
    match (source, pool) {
        (SourceKind::Live, _) => exp::live_renewal(cfg, n),
        (_, None) => Err(AppError::Config("in-order and bootstrap sources need --pool".into())),
        (SourceKind::InOrder, Some(p)) => {
            let pool = read_pool_file(p, cfg.r)?;
            if pool.len() < n {
                return Err(AppError::Config(format!("pool has {} cycles, {n} requested in order", pool.len())));
            }
            exp::in_order_renewal(&pool, n)
        }
        (SourceKind::Bootstrap, Some(p)) => exp::bootstrap_renewal(&read_pool_file(p, cfg.r)?, n, cfg.seed()),
    }
}

fn tail_csv(est: &TailEstimate) -> Vec<Vec<f64>> {
    (0..est.t_grid.len()).map(|i| vec![est.t_grid[i], est.p_hat[i], est.ci_low[i], est.ci_high[i]]).collect()
}

fn law_table(cfg: &ExperimentConfig, table: LawTable, grid: usize, n: usize) -> AppResult<(Vec<&'static str>, Vec<Vec<f64>>)> {
    let g = grid.max(2);
    Ok(match table {
        LawTable::UvDensity => {
            let mut rows = Vec::with_capacity(g * g);
            for i in 0..g {
                let u = (i as f64 + 0.5) / g as f64;
                for j in 0..g {
                    let v = 1.0 + 3.0 * (j as f64 + 0.5) / g as f64;
                    rows.push(vec![u, v, density_uv(u, v)]);
                }
            }
            (vec!["u", "v", "density"], rows)
        }
        LawTable::VTail => {
            let rows = (0..g)
                .map(|i| {
                    let v = 1.0 + 99.0 * (i as f64 / (g - 1) as f64).powi(2);
                    vec![v, tail_v(v), tail_v_series(v, 100_000)]
                })
                .collect();
            (vec!["v", "tail", "series"], rows)
        }
        LawTable::UvSamples => {
            let rows = run_indexed(n, cfg.workers, cfg.seed(), |_, rng| {
                let (u, v) = sample_uv(rng);
                Ok(vec![u, v])
            })?;
            (vec!["u", "v"], rows)
        }
        LawTable::Rayleigh => {
            let rows = (0..g)
                .map(|i| {
                    let x = 5.0 * i as f64 / (g - 1) as f64;
                    vec![x, rayleigh_pdf(x), rayleigh_cdf(x)]
                })
                .collect();
            (vec!["x", "pdf", "cdf"], rows)
        }
        LawTable::Exit => {
            let (a, b) = (cfg.r, cfg.r.powi(4));
            let rows = (0..g)
                .map(|i| {
                    let r0 = a * (b / a).powf(i as f64 / (g - 1) as f64);
                    exit_prob(a, r0.clamp(a, b), b).map(|p| vec![a, r0, b, p])
                })
                .collect::<Result<_, _>>()?;
            (vec!["a", "r0", "b", "p_upper"], rows)
        }
    })
}

#[derive(Debug, Default, Serialize)]
struct LimitReports {
    #[serde(skip_serializing_if = "Option::is_none")]
    rayleigh: Option<RayleighOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ergodic: Option<ErgodicOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moment: Option<MomentOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    martingale: Option<MartingaleOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exit: Option<ExitOut>,
}

#[derive(Debug, Serialize)]
struct RayleighOut {
    r0: f64,
    t: f64,
    ks: KsReport,
    mean_square: f64,
}

#[derive(Debug, Serialize)]
struct ErgodicOut {
    x0: f64,
    horizon: f64,
    time_average_x2: f64,
    stationary_x2: f64,
}

#[derive(Debug, Serialize)]
struct MomentOut {
    r0: f64,
    t: f64,
    n: u64,
    mean: f64,
    se: f64,
    target: f64,
}

#[derive(Debug, Serialize)]
struct MartingaleOut {
    r0: f64,
    t: f64,
    n: u64,
    mean_inv_log: f64,
    se: f64,
    initial_value: f64,
}

#[derive(Debug, Serialize)]
struct ExitOut {
    a: f64,
    r0: f64,
    b: f64,
    exact: f64,
    estimate: Proportion,
}

fn limit_checks(cfg: &ExperimentConfig, which: LimitCheck, t: Option<f64>, r0: f64, horizon: f64, n: usize) -> AppResult<LimitReports> {
    let want = |c: LimitCheck| which == LimitCheck::All || which == c;
    let mut out = LimitReports::default();
    if want(LimitCheck::Rayleigh) {
        let t = t.unwrap_or(1e3);
        let samples = exp::rayleigh_samples(cfg, r0, t, n)?;
        let mean_square = samples.iter().map(|x| x * x).sum::<f64>() / samples.len() as f64;
        out.rayleigh = Some(RayleighOut { r0, t, ks: rayleigh_limit_report(t, &samples)?, mean_square });
    }
    if want(LimitCheck::Ergodic) {
        let path = exp::geometric_path(cfg, r0, horizon)?;
        let avg = ergodic_average(&path, |x| x * x)?;
        out.ergodic = Some(ErgodicOut { x0: r0, horizon, time_average_x2: avg, stationary_x2: 2.0 });
    }
    if want(LimitCheck::Moment) || want(LimitCheck::Martingale) {
        let t = t.unwrap_or(1.0);
        let m: MomentReport = exp::moments(cfg, r0, t, n)?;
        if want(LimitCheck::Moment) {
            out.moment = Some(MomentOut { r0, t, n: m.n, mean: m.square_mean, se: m.square_se, target: m.square_target });
        }
        if want(LimitCheck::Martingale) {
            out.martingale =
                Some(MartingaleOut { r0, t, n: m.n, mean_inv_log: m.inv_log_mean, se: m.inv_log_se, initial_value: m.inv_log_target });
        }
    }
    if want(LimitCheck::Exit) {
        let (a, b) = (r0 / 2.0, r0 * 4.0);
        if a <= 1.0 {
            return Err(AppError::Config("exit check needs r0 > 2 (barriers r0/2 and 4 r0)".into()));
        }
        out.exit = Some(ExitOut { a, r0, b, exact: exit_prob(a, r0, b)?, estimate: exp::exit_frequency(cfg, a, r0, b, n)? });
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct EnvelopeOut {
    envelope: String,
    n: usize,
    range: (usize, usize),
    crossings: usize,
    report: EnvelopeReport,
}

fn trajectory(cfg: &ExperimentConfig, kind: PathChoice, x0: f64, horizon: f64, dim: f64) -> AppResult<TrajectoryGrid> {
    let ic = &cfg.integrator;
    let mut rng = task_rng(cfg.seed(), 0);
    Ok(match kind {
        PathChoice::R => integrate_r(x0, horizon, ic, &mut rng)?,
        PathChoice::Hybrid => hybrid_path(x0, horizon, ic, &mut rng)?,
        PathChoice::X => integrate_x(x0, horizon, 0.0, ic, &mut rng)?,
        PathChoice::Bessel => integrate_bessel(dim, x0, horizon, ic, &mut rng)?,
    })
}

pub fn run(cli: Cli) -> AppResult<()> {
    let env_seed = std::env::var(SEED_ENV).ok();
    run_with_env(cli, env_seed.as_deref())
}

pub fn run_with_env(cli: Cli, env_seed: Option<&str>) -> AppResult<()> {
    let cfg = resolve_config(&cli, env_seed)?;
    cfg.validate()?;
    match cli.command {
        Command::SampleCycles { n } => {
            let pool = exp::cycle_pool(&cfg, n.unwrap_or(cfg.n_cycles))?;
            match cfg.format {
                OutputFormat::Csv => emit(&cfg, |w| write_pool_csv(w, &pool)),
                OutputFormat::Json => emit(&cfg, |w| write_json(w, &pool)),
            }
        }
        Command::Renewal { pool, source, n } => {
            let seq = renewal_from(&cfg, pool.as_ref(), source, n.unwrap_or(cfg.n_renewal))?;
            match cfg.format {
                OutputFormat::Csv => emit(&cfg, |w| write_renewal_csv(w, &seq)),
                OutputFormat::Json => emit(&cfg, |w| write_json(w, &seq)),
            }
        }
        Command::TailT { t, pool, n } => {
            let pool = load_pool(&cfg, pool.as_ref(), n.unwrap_or(cfg.n_cycles))?;
            let est = estimate_t_tail(&pool, &t).map_err(|e| AppError::Config(e.to_string()))?;
            match cfg.format {
                OutputFormat::Json => emit(&cfg, |w| write_json(w, &est)),
                OutputFormat::Csv => emit(&cfg, |w| write_table_csv(w, &["t", "p_hat", "ci_low", "ci_high"], &tail_csv(&est))),
            }
        }
        Command::Laws { table, grid, n } => {
            let (header, rows) = law_table(&cfg, table, grid, n.unwrap_or(cfg.n_paths))?;
            match cfg.format {
                OutputFormat::Csv => emit(&cfg, |w| write_table_csv(w, &header, &rows)),
                OutputFormat::Json => emit(&cfg, |w| write_json(w, &serde_json::json!({ "columns": header, "rows": rows }))),
            }
        }
        Command::LimitChecks { check, t, r0, horizon, n } => {
            let rep = limit_checks(&cfg, check, t, r0, horizon, n.unwrap_or(cfg.n_paths))?;
            emit(&cfg, |w| write_json(w, &rep))
        }
        Command::Envelopes { pool, source, envelope, envelope_k, g_coef, g_power, direction, from, to, n } => {
            let seq = renewal_from(&cfg, pool.as_ref(), source, n.unwrap_or(cfg.n_renewal))?;
            let params = exp::params(&cfg)?;
            let k = envelope_k.unwrap_or(EnvelopeParams::default_for(&params).k);
            let (name, env): (String, Box<dyn LogEnvelope>) = match envelope {
                EnvelopeKind::Sqrt => ("sqrt(t)".into(), Box::new(SqrtEnvelope)),
                EnvelopeKind::Escape => (format!("{k} sqrt(t ln3 t)"), Box::new(EscapeEnvelope { k })),
                EnvelopeKind::Integral => (
                    format!("exp(ln t * {g_coef} / (ln2 t)^{g_power})"),
                    Box::new(IntegralTestEnvelope { g: move |u: f64| g_coef / u.powf(g_power) }),
                ),
            };
            let dir = match direction {
                Direction::Below => Crossing::Below,
                Direction::Above => Crossing::Above,
            };
            let end = to.unwrap_or(seq.len()).min(seq.len());
            let report = future_min_envelope(&seq, from..end, env.as_ref(), dir)?;
            let out = EnvelopeOut { envelope: name, n: seq.len(), range: (from, end), crossings: report.count(), report };
            emit(&cfg, |w| write_json(w, &out))
        }
        Command::Verify { suite, smoke } => {
            let mut stdout = std::io::stdout();
            let report = match suite {
                Suite::Exact => {
                    let rep = exact_suite(&cfg)?;
                    for c in &rep.checks {
                        writeln!(stdout, "{c}").map_err(io_err(&cfg))?;
                    }
                    rep
                }
                Suite::Acceptance => {
                    let scale = if smoke { AcceptanceScale::smoke() } else { AcceptanceScale::full() };
                    acceptance_suite(&cfg, &scale, |c| {
                        let _ = writeln!(stdout, "{c}");
                    })?
                }
            };
            if let Some(path) = &cfg.output {
                let mut out = open_output(Some(path))?;
                write_json(&mut out, &report).map_err(|e| AppError::io(path, e))?;
            }
            let summary = report.to_string();
            writeln!(stdout, "{}", summary.lines().last().unwrap_or_default()).map_err(io_err(&cfg))?;
            report.into_result().map(|_| ())
        }
        Command::Trajectory { kind, x0, horizon, dim } => {
            let path = trajectory(&cfg, kind, x0, horizon, dim)?;
            match cfg.format {
                OutputFormat::Csv => emit(&cfg, |w| write_trajectory_csv(w, &path)),
                OutputFormat::Json => {
                    let json = serde_json::json!({ "time": path.times(), "value": path.values() });
                    emit(&cfg, |w| write_json(w, &json))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("moustache").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_env_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("exp.conf");
        std::fs::write(&file, "seed = 1\nr = 3\nk = 9\n").unwrap();
        let f = file.to_str().unwrap();

        let cfg = resolve_config(&parse(&["--config", f, "verify"]), None).unwrap();
        assert_eq!((cfg.seed(), cfg.r, cfg.k), (1, 3.0, 9));
        let cfg = resolve_config(&parse(&["--config", f, "verify"]), Some("5")).unwrap();
        assert_eq!(cfg.seed(), 5);
        let cfg = resolve_config(&parse(&["verify", "--config", f, "--seed", "8", "--k", "4"]), Some("5")).unwrap();
        assert_eq!((cfg.seed(), cfg.r, cfg.k), (8, 3.0, 4));
    }

    #[test]
    fn every_config_key_has_a_flag() {
        let flags = ConfigFlags::default();
        let keys: Vec<&str> = flags.pairs().iter().map(|(k, _)| *k).collect();
        assert_eq!(keys, crate::config::KEYS);
    }

    #[test]
    fn bad_values_are_config_errors() {
        let e = resolve_config(&parse(&["verify", "--r", "two"]), None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = resolve_config(&parse(&["verify", "--config", "/nonexistent/x.conf"]), None).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        let e = run_with_env(parse(&["verify", "--workers", "0"]), None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn law_tables_have_expected_shapes() {
        let cfg = ExperimentConfig { workers: 2, ..Default::default() };
        let (h, rows) = law_table(&cfg, LawTable::UvDensity, 10, 0).unwrap();
        assert_eq!((h.len(), rows.len()), (3, 100));
        let (_, rows) = law_table(&cfg, LawTable::VTail, 10, 0).unwrap();
        assert!(rows.windows(2).all(|w| w[1][1] <= w[0][1]));
        let (_, rows) = law_table(&cfg, LawTable::UvSamples, 10, 50).unwrap();
        assert!(rows.iter().all(|r| (0.0..1.0).contains(&r[0]) && r[1] >= 1.0));
        let (_, rows) = law_table(&cfg, LawTable::Exit, 5, 0).unwrap();
        assert_eq!((rows[0][3], rows[4][3]), (0.0, 1.0));
    }
}
