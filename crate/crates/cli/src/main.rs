//! `vpa`: parameter sweeps over the vacuum-persistence kernels and the
//! acceptance runner.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vacuum_persistence::acceptance;
use vacuum_persistence::sweep::{self, Format, Grid, RunError, Scan, ScanParams, Spacing, SweepConfig};

#[derive(Parser)]
#[command(name = "vpa", version, about = "Vacuum persistence kernels for a moving atom")]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First-order threshold kernel m_p over ν/Ω_p.
    MpScan(NuScan),
    /// Renormalised second-order kernel and its breakdown over ν/Ω_p.
    SigmaScan(NuScan),
    /// Quantum friction rate over a·Ω_p at fixed u.
    FrictionScan(DistanceScan),
    /// Plate kernels m_∥, m_⊥ and their parts over ν/Ω_p.
    PlateScan(NuScan),
    /// m_∥ against its far-plate limit over ν/Ω_p.
    FarLimit(NuScan),
    /// Run every acceptance criterion and write the report.
    Acceptance {
        /// Report path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct NuScan {
    #[arg(long, default_value_t = 0.5)]
    nu_min: f64,
    #[arg(long, default_value_t = 4.0)]
    nu_max: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DistanceScan {
    #[arg(long, default_value_t = 0.5)]
    a_min: f64,
    #[arg(long, default_value_t = 5.0)]
    a_max: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Logarithmic grid spacing.
    #[arg(long)]
    log: bool,
    /// Ω_m/Ω_p.
    #[arg(long, default_value_t = 2.0)]
    omega_m: f64,
    /// ξ/Ω_p².
    #[arg(long, default_value_t = 0.01)]
    xi: f64,
    /// a·Ω_p (plate scans).
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Speed parallel to the plate (friction scan).
    #[arg(long, default_value_t = 0.5)]
    u: f64,
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    omega_p: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl Common {
    fn config(&self, scan: Scan, min: f64, max: f64) -> SweepConfig {
        SweepConfig {
            scan,
            grid: Grid {
                min,
                max,
                points: self.points,
                spacing: if self.log { Spacing::Log } else { Spacing::Linear },
            },
            params: ScanParams {
                g: self.g,
                gamma: self.gamma,
                omega_p: self.omega_p,
                omega_m_tilde: self.omega_m,
                xi_tilde: self.xi,
                a_tilde: self.a,
                u: self.u,
            },
            tol: self.tol,
            output: self.output.clone().unwrap_or_default(),
            format: match self.format {
                OutFormat::Csv => Format::Csv,
                OutFormat::Json => Format::Json,
            },
        }
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<(), RunError> {
    match path {
        Some(p) => sweep::write_output(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| RunError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn run_scan(cfg: SweepConfig, to_file: bool) -> Result<(), RunError> {
    if to_file {
        return sweep::run(&cfg);
    }
    let table = sweep::evaluate(cfg.scan, &cfg.grid, &cfg.params, cfg.tol)?;
    emit(&None, &table.render(cfg.format))
}

fn run_acceptance(output: &Option<PathBuf>) -> Result<bool, RunError> {
    let outcomes = acceptance::run_all();
    for o in &outcomes {
        eprintln!("{}", o.summary_line());
    }
    emit(output, &acceptance::render_report(&outcomes))?;
    Ok(outcomes.iter().all(|o| o.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("vpa: cannot set up {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::MpScan(s) => run_scan(
            s.common.config(Scan::MpScan, s.nu_min, s.nu_max),
            s.common.output.is_some(),
        ),
        Command::SigmaScan(s) => run_scan(
            s.common.config(Scan::SigmaScan, s.nu_min, s.nu_max),
            s.common.output.is_some(),
        ),
        Command::PlateScan(s) => run_scan(
            s.common.config(Scan::PlateScan, s.nu_min, s.nu_max),
            s.common.output.is_some(),
        ),
        Command::FarLimit(s) => run_scan(
            s.common.config(Scan::FarLimit, s.nu_min, s.nu_max),
            s.common.output.is_some(),
        ),
        Command::FrictionScan(s) => run_scan(
            s.common.config(Scan::FrictionScan, s.a_min, s.a_max),
            s.common.output.is_some(),
        ),
        Command::Acceptance { output } => match run_acceptance(output) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vpa: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
