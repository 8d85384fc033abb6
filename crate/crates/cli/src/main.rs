//! `smallcell`: command-line runner for the analytic and Monte Carlo pipelines.
//!
//! Every table goes to stdout or `--out` as CSV preceded by `#` metadata
//! lines. Exit codes: 0 success, 2 invalid configuration or parameters,
//! 3 numerical failure, 1 I/O failure.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use smallcell::access::{subchannel_activity_probability, SchemeId, SdmaAccounting};
use smallcell::analytic::linear_to_db;
use smallcell::config::SystemConfig;
use smallcell::curve::{wilson_interval, CdfCurve};
use smallcell::optimize::Optimizer;
use smallcell::sim::run_campaign;
use smallcell::Error;

use output::Table;

/// z-value of a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Parser, Debug)]
#[command(
    name = "smallcell",
    version,
    about = "SIR and user-rate distributions of random small-cell networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON configuration file; flags below override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base seed of every random stream [default: 1].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel evaluation.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Add Monte Carlo estimates next to the analytic values.
    #[arg(long, global = true)]
    with_mc: bool,
    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[arg(long, global = true)]
    ratio: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long = "theta0-db", global = true, allow_negative_numbers = true)]
    theta0_db: Option<f64>,
    /// Subchannels per cell.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Antennas per AP.
    #[arg(long = "m-max", global = true)]
    m_max: Option<usize>,
    #[arg(long, global = true)]
    scheme: Option<SchemeId>,
    #[arg(long, global = true, value_parser = parse_accounting)]
    accounting: Option<SdmaAccounting>,
    #[arg(long = "k-max", global = true)]
    k_max: Option<usize>,
    /// Monte Carlo realizations.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Every AP serves m_max users on every subchannel.
    #[arg(long = "full-buffer", global = true)]
    full_buffer: bool,
    #[arg(long = "n-max", global = true)]
    n_max: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic SIR cdf over the θ grid.
    SirCdf,
    /// Analytic user-rate cdf over the rate grid, optionally with simulation.
    RateCdf,
    /// Raw Monte Carlo samples of the typical user.
    Simulate,
    /// Subchannel count minimizing the rate outage for each target rate.
    Optimize {
        /// Single target rate instead of the configured grid.
        #[arg(long)]
        r0: Option<f64>,
    },
    /// Probability that an AP transmits on a given subchannel.
    Activity,
}

fn parse_accounting(s: &str) -> Result<SdmaAccounting, String> {
    match s {
        "pooled" => Ok(SdmaAccounting::Pooled),
        "per_group" | "per-group" => Ok(SdmaAccounting::PerGroup),
        other => Err(format!("unknown accounting '{other}', expected pooled or per_group")),
    }
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }

    fn from_core(err: Error, context: &str) -> Self {
        let msg = if context.is_empty() {
            err.to_string()
        } else {
            format!("{context}: {err}")
        };
        match err {
            Error::InvalidParameter(_) | Error::TailMassTooLarge { .. } | Error::EnumerationTooLarge { .. } => Failure::Config(msg),
            _ => Failure::Numerical(msg),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "invalid configuration: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn core<T>(r: smallcell::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from_core(e, ""))
}

fn effective_config(c: &Common) -> Result<SystemConfig, Failure> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => SystemConfig::default(),
    };
    if let Some(v) = c.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = c.ratio {
        cfg.ratio = v;
    }
    if let Some(v) = c.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = c.theta0_db {
        cfg.theta0_db = v;
    }
    if let Some(v) = c.n {
        cfg.n = v;
    }
    if let Some(v) = c.m_max {
        cfg.m_max = v;
    }
    if let Some(v) = c.scheme {
        cfg.scheme = v;
    }
    if let Some(v) = c.accounting {
        cfg.sdma_accounting = v;
    }
    if let Some(v) = c.k_max {
        cfg.k_max = Some(v);
    }
    if let Some(v) = c.samples {
        cfg.mc_samples = v;
    }
    if let Some(v) = c.n_max {
        cfg.n_max = v;
    }
    cfg.full_buffer |= c.full_buffer;
    core(cfg.validate())?;
    Ok(cfg)
}

/// Empirical values with Wilson 95% intervals, from a curve over `samples` draws.
fn empirical_columns(curve: &CdfCurve, samples: usize) -> Vec<[f64; 3]> {
    curve
        .values()
        .iter()
        .map(|&v| {
            let hits = (v * samples as f64).round() as u64;
            let (lo, hi) = wilson_interval(hits, samples as u64, Z95);
            [v, lo, hi]
        })
        .collect()
}

fn sir_cdf(cfg: &SystemConfig, with_mc: bool) -> Result<Table, Failure> {
    let model = core(cfg.analytic_model())?;
    let thetas = core(cfg.theta_grid())?;
    let curve = model
        .sir_curve(&thetas)
        .map_err(|(theta, e)| Failure::from_core(e, &format!("SIR cdf at theta = {theta} ({} dB)", linear_to_db(theta))))?;
    let mut columns = vec!["theta_db", "theta_linear", "f_sir_analytic"];
    let empirical = if with_mc {
        columns.extend(["f_sir_empirical", "ci_low", "ci_high"]);
        let campaign = core(run_campaign(cfg, cfg.mc_samples, cfg.base_seed))?;
        Some(empirical_columns(&campaign.sir_curve, cfg.mc_samples))
    } else {
        None
    };
    let mut table = Table::new(&columns);
    let db = core(cfg.theta_grid_db.values())?;
    for (i, (theta, f)) in curve.points().enumerate() {
        let mut row = vec![db[i], theta, f];
        if let Some(e) = &empirical {
            row.extend(e[i]);
        }
        table.push(row);
    }
    Ok(table)
}

fn rate_cdf(cfg: &SystemConfig, with_mc: bool) -> Result<Table, Failure> {
    let model = core(cfg.analytic_model())?;
    let rates = core(cfg.rate_grid.values())?;
    let curve = model
        .rate_curve(&rates)
        .map_err(|(r, e)| Failure::from_core(e, &format!("rate cdf at r = {r}")))?;
    let mut columns = vec!["r", "f_r_analytic"];
    let empirical = if with_mc {
        columns.extend(["f_r_empirical", "ci_low", "ci_high"]);
        let campaign = core(run_campaign(cfg, cfg.mc_samples, cfg.base_seed))?;
        Some(empirical_columns(&campaign.rate_curve, cfg.mc_samples))
    } else {
        None
    };
    let mut table = Table::new(&columns);
    for (i, (r, f)) in curve.points().enumerate() {
        let mut row = vec![r, f];
        if let Some(e) = &empirical {
            row.extend(e[i]);
        }
        table.push(row);
    }
    Ok(table)
}

fn simulate(cfg: &SystemConfig) -> Result<Table, Failure> {
    let campaign = core(run_campaign(cfg, cfg.mc_samples, cfg.base_seed))?;
    let mut table = Table::new(&["seed", "sir", "k0", "m", "rate"]);
    for s in &campaign.samples {
        table.push_text(vec![
            s.seed.to_string(),
            s.sir.to_string(),
            s.k0.to_string(),
            s.m.to_string(),
            s.rate.to_string(),
        ]);
    }
    Ok(table)
}

fn optimize(cfg: &SystemConfig, r0: Option<f64>) -> Result<Table, Failure> {
    let targets = match r0 {
        Some(r) => vec![r],
        None => core(cfg.r0_grid.values())?,
    };
    let optimizer = core(Optimizer::from_config(cfg))?;
    let frontier = core(optimizer.frontier(&targets))?;
    let mut table = Table::new(&["r0", "n_star", "outage", "outage_at_n1"]);
    for res in frontier {
        let at_one = res.outage_at(1).expect("N = 1 is always evaluated");
        table.push_text(vec![
            res.r0.to_string(),
            res.n_star.to_string(),
            res.outage.to_string(),
            at_one.to_string(),
        ]);
    }
    Ok(table)
}

fn activity(cfg: &SystemConfig, with_mc: bool) -> Result<Table, Failure> {
    let (load, _) = core(cfg.load_pmfs())?;
    let closed = subchannel_activity_probability(cfg.scheme, &load, cfg.n, cfg.m_max);
    let mut columns = vec!["scheme", "n", "m_max", "activity_closed_form"];
    let mut row = vec![cfg.scheme.to_string(), cfg.n.to_string(), cfg.m_max.to_string(), closed.to_string()];
    if with_mc {
        columns.extend(["activity_empirical", "ci_low", "ci_high", "trials"]);
        let campaign = core(run_campaign(cfg, cfg.mc_samples, cfg.base_seed))?;
        let d = campaign.diagnostics;
        let (lo, hi) = wilson_interval(d.activity_hits, d.activity_trials, Z95);
        row.extend([
            campaign.activity_estimate.to_string(),
            lo.to_string(),
            hi.to_string(),
            d.activity_trials.to_string(),
        ]);
    }
    let mut table = Table::new(&columns);
    table.push_text(row);
    Ok(table)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = effective_config(&cli.common)?;
    let json = serde_json::to_string_pretty(&cfg).expect("config serializes");
    if cli.common.dump_config {
        return output::write_raw(cli.common.out.as_deref(), &(json + "\n"));
    }
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            return Err(Failure::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let with_mc = cli.common.with_mc;
    let (name, table) = match cli.command {
        Command::SirCdf => ("sir-cdf", sir_cdf(&cfg, with_mc)?),
        Command::RateCdf => ("rate-cdf", rate_cdf(&cfg, with_mc)?),
        Command::Simulate => ("simulate", simulate(&cfg)?),
        Command::Optimize { r0 } => ("optimize", optimize(&cfg, r0)?),
        Command::Activity => ("activity", activity(&cfg, with_mc)?),
    };
    output::write_table(cli.common.out.as_deref(), name, &cfg, &table)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("smallcell: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        let quad = Error::QuadratureNotConverged {
            lower: 0.0,
            upper: 1.0,
            estimate: 0.5,
            error: 0.1,
        };
        let f = Failure::from_core(quad, "SIR cdf at theta = 3.5 (5.44 dB)");
        assert_eq!(f.code(), 3);
        assert!(f.to_string().contains("theta = 3.5"));
        assert_eq!(Failure::from_core(Error::InvalidParameter("x".into()), "").code(), 2);
        assert_eq!(Failure::from_core(Error::EnumerationTooLarge { limit: 1 }, "").code(), 2);
        assert_eq!(Failure::Io("disk".into()).code(), 1);
    }

    #[test]
    fn flags_override_the_file() {
        let cli = Cli::try_parse_from([
            "smallcell",
            "sir-cdf",
            "--n",
            "7",
            "--scheme",
            "2",
            "--accounting",
            "per_group",
            "--theta0-db",
            "-3",
        ])
        .unwrap();
        let cfg = effective_config(&cli.common).unwrap();
        assert_eq!(
            (cfg.n, cfg.scheme, cfg.sdma_accounting),
            (7, SchemeId::Scheme2, SdmaAccounting::PerGroup)
        );
        assert_eq!(cfg.theta0_db, -3.0);
        assert_eq!(cfg.base_seed, smallcell::config::DEFAULT_SEED);
    }
}
