//! `qla`: command-line front end for the laser-damage attack simulator.
//!
//! Every subcommand writes exactly one machine-readable artifact (CSV or
//! JSON) to stdout or to `--output`. Human-readable notes go to stderr.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid flags or arguments,
//! 3 config file schema violation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qla_core::attenuator::{AttenuatorClass, ProfileSet};
use qla_core::campaign::{monte_carlo, TrialSpec};
use qla_core::config::load_config;
use qla_core::fiber::{threshold_curve, threshold_curve_csv, FiberLink};
use qla_core::impact::ImpactReport;
use qla_core::risk::{risk_report, BoundaryConvention, Prior, RiskQuery, TestRecord};

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qla",
    version,
    about = "Laser-damage attacks on QKD source attenuators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the artifact here instead of stdout.
    #[arg(long, short = 'o', value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// SRS and SBS thresholds versus fiber length, as CSV.
    Thresholds(ThresholdsArgs),
    /// Run the stepwise damage procedure (one trial or a Monte Carlo batch).
    Campaign(CampaignArgs),
    /// Mean-photon-number consequences of an attenuation change.
    Impact(ImpactArgs),
    /// Probability that untested systems share the vulnerability.
    Risk(RiskArgs),
    /// Print the shipped damage profiles as JSON.
    Profiles(OutputArgs),
}

#[derive(Debug, Args)]
struct ThresholdsArgs {
    #[arg(long, default_value_t = 0.01)]
    l_min_km: f64,
    #[arg(long, default_value_t = 20.0)]
    l_max_km: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Pump linewidth; defaults to the configured laser.
    #[arg(long)]
    linewidth_ghz: Option<f64>,
    /// Natural-log power attenuation coefficient.
    #[arg(long)]
    alpha_per_km: Option<f64>,
    #[arg(long)]
    a_eff_um2: Option<f64>,
    #[arg(long)]
    g_r_m_per_w: Option<f64>,
    #[arg(long)]
    g_b_m_per_w: Option<f64>,
    #[arg(long)]
    delta_nu_b_mhz: Option<f64>,
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CampaignArgs {
    #[arg(long, value_parser = parse_class)]
    class: AttenuatorClass,
    /// Monitored attenuation setting; defaults to the class reference setpoint.
    #[arg(long)]
    setpoint_db: Option<f64>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// With more than one trial, also write every campaign log to this file.
    #[arg(long, value_name = "PATH")]
    trial_logs: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ImpactArgs {
    #[arg(long, allow_hyphen_values = true)]
    delta_db: f64,
    /// Calibrated mean photon number before the attack.
    #[arg(long, default_value_t = 0.5)]
    mu0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    success_db: f64,
    #[arg(long, default_value_t = 3.0)]
    failure_db: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PriorArg {
    Jeffreys,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundaryArg {
    StrictlyGreater,
    AtLeast,
}

#[derive(Debug, Args)]
struct RiskArgs {
    #[arg(long, default_value_t = TestRecord::CURRENT.n_tested)]
    tested: u64,
    #[arg(long, default_value_t = TestRecord::CURRENT.n_compromised)]
    compromised: u64,
    #[arg(long, default_value_t = 0)]
    dos: u64,
    #[arg(long, default_value_t = 50)]
    population: u64,
    #[arg(long, default_value_t = 0.2)]
    fraction: f64,
    #[arg(long, value_enum, default_value_t = PriorArg::Jeffreys)]
    prior: PriorArg,
    #[arg(long, value_enum, default_value_t = BoundaryArg::StrictlyGreater)]
    boundary: BoundaryArg,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_class(s: &str) -> Result<AttenuatorClass, String> {
    s.parse()
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }

    fn config(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn emit(out: &OutputArgs, artifact: &str) -> CliResult<()> {
    match &out.output {
        Some(path) => fs::write(path, artifact).map_err(|e| Failure::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(artifact.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}

fn cmd_thresholds(args: ThresholdsArgs) -> CliResult<()> {
    let cfg = load_config(args.config.as_deref()).map_err(Failure::config)?;
    let base = cfg.link;
    let link = FiberLink {
        alpha_per_km: args.alpha_per_km.unwrap_or(base.alpha_per_km),
        a_eff_um2: args.a_eff_um2.unwrap_or(base.a_eff_um2),
        g_r_m_per_w: args.g_r_m_per_w.unwrap_or(base.g_r_m_per_w),
        g_b_m_per_w: args.g_b_m_per_w.unwrap_or(base.g_b_m_per_w),
        delta_nu_b_mhz: args.delta_nu_b_mhz.unwrap_or(base.delta_nu_b_mhz),
        ..base
    };
    let mut laser = cfg.laser;
    if let Some(lw) = args.linewidth_ghz {
        laser.linewidth_ghz = lw;
    }
    laser.validate().map_err(Failure::usage)?;
    let points = threshold_curve(&link, &laser, args.l_min_km, args.l_max_km, args.points)
        .map_err(Failure::usage)?;
    emit(&args.out, &threshold_curve_csv(&points))
}

fn cmd_campaign(args: CampaignArgs) -> CliResult<()> {
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let cfg = load_config(args.config.as_deref()).map_err(Failure::config)?;
    let spec = TrialSpec {
        config: cfg.campaign,
        class: args.class,
        profile: cfg.profiles.profile(args.class),
        setpoint_db: args.setpoint_db.unwrap_or(args.class.default_setpoint_db()),
        link: cfg.link,
        laser: cfg.laser,
    };
    if args.trials == 1 {
        let report = spec.run_trial(args.seed, 0).map_err(Failure::usage)?;
        eprintln!(
            "{} at {} dB: {:?} after {} step(s)",
            spec.class,
            spec.setpoint_db,
            report.outcome,
            report.steps.len()
        );
        return emit(&args.out, &to_json(&report));
    }
    let (summary, reports) = monte_carlo(&spec, args.trials, args.seed).map_err(Failure::usage)?;
    eprintln!(
        "{} x{}: success {:.3}, critical failure {:.3}, inconclusive {:.3}, fuse {:.3}",
        spec.class,
        summary.n_trials,
        summary.success_rate,
        summary.critical_failure_rate,
        summary.inconclusive_rate,
        summary.fiber_fuse_rate
    );
    if let Some(path) = &args.trial_logs {
        fs::write(path, to_json(&reports)).map_err(|e| Failure::io(path, e))?;
    }
    emit(&args.out, &to_json(&summary))
}

fn cmd_impact(args: ImpactArgs) -> CliResult<()> {
    let report =
        ImpactReport::with_thresholds(args.mu0, args.delta_db, args.success_db, args.failure_db)
            .map_err(Failure::usage)?;
    eprintln!("{}", report.summary());
    emit(&args.out, &to_json(&report))
}

fn cmd_risk(args: RiskArgs) -> CliResult<()> {
    let query = RiskQuery {
        record: TestRecord {
            n_tested: args.tested,
            n_compromised: args.compromised,
            n_dos: args.dos,
        },
        population_total: args.population,
        vulnerable_fraction: args.fraction,
        prior: match args.prior {
            PriorArg::Jeffreys => Prior::Jeffreys,
            PriorArg::Uniform => Prior::Uniform,
        },
        boundary: match args.boundary {
            BoundaryArg::StrictlyGreater => BoundaryConvention::StrictlyGreater,
            BoundaryArg::AtLeast => BoundaryConvention::AtLeast,
        },
    };
    let report = risk_report(&query).map_err(Failure::usage)?;
    eprintln!(
        "P(more than {:.0}% of the {} untested systems vulnerable) = {:.4}",
        100.0 * report.vulnerable_fraction,
        report.untested,
        report.prob_exceeds
    );
    emit(&args.out, &to_json(&report))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Thresholds(a) => cmd_thresholds(a),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Impact(a) => cmd_impact(a),
        Command::Risk(a) => cmd_risk(a),
        Command::Profiles(out) => emit(&out, &to_json(&ProfileSet::default())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print and succeed; anything else is a usage error.
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qla: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
