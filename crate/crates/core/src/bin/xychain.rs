use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use xychain::par::Execution;
use xychain::sweep::{
    self, evaluate_point, find_peaks, Format, GridAxis, Preset, Quantity, SweepConfig, SweepResult,
    VerifyConfig,
};
use xychain::{ChainSpec, Error, InputState};

#[derive(Parser, Debug)]
#[command(
    name = "xychain",
    version,
    about = "Quantum state transfer through a periodic XY chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one (t, gamma) point.
    Point(PointArgs),
    /// Evaluate a (t, gamma) grid.
    Sweep(SweepArgs),
    /// List strict local maxima of a sweep file.
    Peaks(PeaksArgs),
    /// Compare the free-fermion pipeline with exact diagonalization.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetArg {
    Strong,
    Weak,
    Intermediate,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Strong => Preset::Strong,
            PresetArg::Weak => Preset::Weak,
            PresetArg::Intermediate => Preset::Intermediate,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QuantityArg {
    Fidelity,
    Tangle,
}

impl From<QuantityArg> for Quantity {
    fn from(q: QuantityArg) -> Self {
        match q {
            QuantityArg::Fidelity => Quantity::Fidelity,
            QuantityArg::Tangle => Quantity::Tangle,
        }
    }
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Regime preset supplying h and J (default: weak).
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    /// Number of sites.
    #[arg(long = "n", default_value_t = 5)]
    n_sites: usize,
    /// Exchange J, overriding the preset.
    #[arg(long, conflicts_with_all = ["jx", "jy"])]
    j: Option<f64>,
    /// Exchange J^x; needs --jy and fixes both J and gamma.
    #[arg(long, requires = "jy", conflicts_with = "gamma")]
    jx: Option<f64>,
    #[arg(long, requires = "jx")]
    jy: Option<f64>,
    /// Transverse field h, overriding the preset.
    #[arg(long)]
    field: Option<f64>,
    /// Receiver site, 1-based.
    #[arg(long, default_value_t = 3)]
    r: usize,
    /// Input amplitude alpha; beta = sqrt(1 - alpha^2).
    #[arg(long, conflicts_with = "vacuum")]
    alpha: Option<f64>,
    /// Start from the all-down vacuum instead of the encoded state.
    #[arg(long)]
    vacuum: bool,
    /// Anisotropy gamma; for grid commands this pins the gamma axis.
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    t_min: f64,
    #[arg(long, default_value_t = 50.0)]
    t_max: f64,
    #[arg(long, default_value_t = 201)]
    t_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    gamma_min: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma_max: f64,
    #[arg(long, default_value_t = 101)]
    gamma_steps: usize,
    /// Permit anisotropies outside [0, 1].
    #[arg(long)]
    allow_any_gamma: bool,
    /// Evaluate grid points on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Evolution time.
    #[arg(long)]
    t: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the wall-clock time in the metadata.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Args, Debug)]
struct PeaksArgs {
    /// Sweep file in CSV or JSON.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "fidelity")]
    quantity: QuantityArg,
    /// Keep only the largest k maxima.
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Number of random (t, gamma) samples.
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the full report as JSON.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

/// Chain parameters plus the optional pinned anisotropy.
fn resolve(model: &ModelArgs) -> Result<(SweepConfig, Option<f64>), Error> {
    let preset = model.preset.map_or(Preset::Weak, Preset::from);
    let mut config = SweepConfig::preset(preset);
    config.n_sites = model.n_sites;
    config.receiver = model.r;
    if let Some(h) = model.field {
        config.field = h;
    }
    let mut gamma = model.gamma;
    if let (Some(jx), Some(jy)) = (model.jx, model.jy) {
        let spec = ChainSpec::from_exchange(model.n_sites, jx, jy, config.field)?;
        config.coupling = spec.coupling();
        gamma = Some(spec.anisotropy());
    } else if let Some(j) = model.j {
        config.coupling = j;
    }
    if model.vacuum {
        config = config.with_vacuum();
    } else if let Some(a) = model.alpha {
        config.input = InputState::from_alpha(a)?;
    }
    Ok((config, gamma))
}

fn apply_grid(config: &mut SweepConfig, grid: &GridArgs, gamma: Option<f64>) {
    config.t_axis = GridAxis {
        min: grid.t_min,
        max: grid.t_max,
        steps: grid.t_steps,
    };
    config.gamma_axis = match gamma {
        Some(g) => GridAxis::single(g),
        None => GridAxis {
            min: grid.gamma_min,
            max: grid.gamma_max,
            steps: grid.gamma_steps,
        },
    };
    config.allow_any_gamma = grid.allow_any_gamma;
}

fn execution(grid: &GridArgs) -> Execution {
    if grid.sequential || !Execution::parallel_available() {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn point(args: PointArgs) -> Result<ExitCode, Error> {
    let (mut config, gamma) = resolve(&args.model)?;
    config.t_axis = GridAxis::new(args.t, args.t, 1)?;
    config.gamma_axis = GridAxis::single(gamma.unwrap_or(0.0));
    config.validate()?;
    let spec = config.spec(config.gamma_axis.min)?;
    let row = evaluate_point(&spec, args.t, config.receiver, config.input)?;
    let result = SweepResult {
        metadata: config.metadata(),
        rows: vec![row],
    };
    let text = match Format::from(args.format) {
        Format::Csv => {
            let csv = result.to_csv();
            csv.lines()
                .filter(|l| !l.starts_with('#'))
                .map(|l| format!("{l}\n"))
                .collect()
        }
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&row)?),
    };
    emit(&text, None)?;
    Ok(ExitCode::SUCCESS)
}

fn run_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let (mut config, gamma) = resolve(&args.model)?;
    apply_grid(&mut config, &args.grid, gamma);
    if args.timestamp {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_err(|e| Error::Config(e.to_string()))?;
        config.timestamp = Some(now.as_secs());
    }
    let result = sweep::run_sweep(&config, execution(&args.grid))?;
    emit(&result.render(args.format.into())?, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn peaks(args: PeaksArgs) -> Result<ExitCode, Error> {
    let result = SweepResult::read(&args.input)?;
    let peaks = find_peaks(&result, args.quantity.into(), args.top_k)?;
    let mut text = serde_json::to_string_pretty(&peaks)?;
    text.push('\n');
    emit(&text, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let (mut config, gamma) = resolve(&args.model)?;
    apply_grid(&mut config, &args.grid, gamma);
    let vc = VerifyConfig {
        sweep: config,
        points: args.points,
        seed: args.seed,
    };
    let report = sweep::verify(&vc, execution(&args.grid))?;
    if matches!(args.format, Some(FormatArg::Json)) {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!(
            "points={} max_deviation={:e} tolerance={:e}",
            report.points.len(),
            report.max_deviation,
            report.tolerance
        );
        println!(
            "spin_hamiltonian_max_deviation={:e} (informational)",
            report.spin_max_deviation
        );
    }
    if report.passed() {
        println!("verify: PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        let w = report.worst.expect("failed report has a worst point");
        eprintln!(
            "verify: FAIL at t={} gamma={} deviation={:e}",
            w.t, w.gamma, w.deviation
        );
        Ok(ExitCode::from(1))
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::OutOfRange { .. } | Error::ImaginaryResidue { .. } | Error::BlochTooLong(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = match cli.command {
        Command::Point(a) => point(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Peaks(a) => peaks(a),
        Command::Verify(a) => verify(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    })
}
