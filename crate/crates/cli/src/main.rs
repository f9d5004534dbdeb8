use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use acovdiff::format::sig17;
use acovdiff::montecarlo::{run_experiment_with, run_rate_study};
use acovdiff::{
    AcfEstimate, ErrorModel, EstimatorConfig, ExperimentSpec, Innovation, MeanSpec, NoiseStream, SmoothComponent,
    StepSignal, TableId,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod error;
mod input;

use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "acovdiff",
    version,
    about = "Difference-based autocovariance estimation under change points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate autocovariances and autocorrelations of a series read from CSV.
    Estimate(EstimateArgs),
    /// Simulate one series from the regression model and write it as CSV.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo MSE study described by a TOML file.
    MseStudy(MseStudyArgs),
    /// Reproduce one of the published MSE tables.
    Tables(TablesArgs),
    /// Fit log-log MSE decay rates over a grid of sample sizes.
    RateStudy(RateStudyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Difference,
    Hvk,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Input CSV file, `-` for stdin.
    #[arg(default_value = "-")]
    input: PathBuf,
    /// Column to read when the input has a header row.
    #[arg(long)]
    column: Option<String>,
    /// Dependence depth, also the largest lag estimated.
    #[arg(short, long, default_value_t = 1)]
    m: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Difference)]
    method: MethodArg,
    /// First weight of the difference scheme.
    #[arg(long, allow_negative_numbers = true)]
    d0: Option<f64>,
    /// Second weight of the difference scheme.
    #[arg(long, allow_negative_numbers = true)]
    d1: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum SignalArg {
    /// Six change points with levels 0, 10, 0, 1, 0, 1, 0.
    SixJump,
    /// No step component.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum SmoothArg {
    Zero,
    F1,
    F2,
    F3,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum NoiseArg {
    Ma1,
    Ar1,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum InnovationArg {
    Gaussian,
    T4,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SignalArg::SixJump)]
    signal: SignalArg,
    #[arg(long, value_enum, default_value_t = SmoothArg::Zero)]
    smooth: SmoothArg,
    #[arg(long, value_enum, default_value_t = NoiseArg::Ma1)]
    noise: NoiseArg,
    /// Lag-one autocovariance of the MA(1) errors.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gamma1: f64,
    #[arg(long, value_enum, default_value_t = InnovationArg::Gaussian)]
    innovation: InnovationArg,
    /// AR(1) coefficient.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    #[arg(short, long, default_value_t = 1600)]
    n: usize,
    /// Master seed; drawn from the clock and echoed when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MseStudyArgs {
    /// TOML experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the replication count in the config.
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long, env = "ACOVDIFF_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TablesArgs {
    /// T1..T7, or `all`.
    #[arg(long, value_parser = parse_tables)]
    table: TableSelection,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = acovdiff::tables::DEFAULT_REPLICATIONS)]
    replications: usize,
    #[arg(long, env = "ACOVDIFF_WORKERS")]
    workers: Option<usize>,
    /// Directory receiving `<table>.md` and `<table>.csv`.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Clone)]
struct TableSelection(Vec<TableId>);

fn parse_tables(s: &str) -> Result<TableSelection, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(TableSelection(TableId::ALL.to_vec()));
    }
    s.parse::<TableId>()
        .map(|t| TableSelection(vec![t]))
        .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct RateStudyArgs {
    /// TOML experiment description; its `n` is replaced by each grid value.
    #[arg(long)]
    config: PathBuf,
    /// Increasing sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n_grid: Vec<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long, env = "ACOVDIFF_WORKERS")]
    workers: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::MseStudy(a) => cmd_mse_study(a),
        Command::Tables(a) => cmd_tables(a),
        Command::RateStudy(a) => cmd_rate_study(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("acovdiff: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdout().lock())),
        Some(p) => fs::File::create(p)
            .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
    }
}

fn check_workers(workers: Option<usize>) -> CliResult<Option<usize>> {
    match workers {
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        w => Ok(w),
    }
}

fn estimator_from(args: &EstimateArgs) -> CliResult<EstimatorConfig> {
    match args.method {
        MethodArg::Difference => Ok(EstimatorConfig::Difference {
            m: args.m,
            d0: args.d0.unwrap_or(1.0),
            d1: args.d1.unwrap_or(-1.0),
        }),
        MethodArg::Hvk if args.d0.is_some() || args.d1.is_some() => {
            Err(CliError::Usage("--d0/--d1 apply to the difference method only".into()))
        }
        MethodArg::Hvk => Ok(EstimatorConfig::hvk(args.m)),
    }
}

fn cmd_estimate(args: EstimateArgs) -> CliResult<()> {
    let estimator = estimator_from(&args)?;
    let y = input::read_series(input::open(&args.input)?, args.column.as_deref())?;
    estimator.validate(y.len()).map_err(CliError::from_input)?;
    let est = estimator.apply(&y).map_err(CliError::from_input)?;
    if let Some(w) = &est.warning {
        eprintln!("acovdiff: warning: {w}");
    }
    let mut out = sink(args.output.as_deref())?;
    match args.format {
        OutFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &est).map_err(|e| CliError::Data(e.to_string()))?;
            writeln!(out)?;
        }
        OutFormat::Csv => write_estimate_csv(&mut out, &est)?,
    }
    out.flush()?;
    Ok(())
}

fn write_estimate_csv(out: &mut dyn Write, est: &AcfEstimate) -> CliResult<()> {
    let method = match est.meta.method {
        acovdiff::Method::Difference => "difference",
        acovdiff::Method::Hvk => "hvk",
    };
    writeln!(out, "# method={method} m={} n={}", est.meta.m, est.meta.n)?;
    if let Some([d0, d1]) = est.meta.scheme {
        writeln!(out, "# scheme=({d0},{d1})")?;
    }
    if let Some((m1, m2)) = est.meta.window {
        writeln!(out, "# window=({m1},{m2})")?;
    }
    if let Some(w) = &est.warning {
        writeln!(out, "# warning: {w}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lag", "gamma", "rho"])?;
    for (h, g) in est.gamma.iter().enumerate() {
        let rho = est.rho_at(h).map(sig17).unwrap_or_default();
        w.write_record([h.to_string(), sig17(*g), rho])?;
    }
    w.flush()?;
    Ok(())
}

fn clock_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    let step = match args.signal {
        SignalArg::SixJump => StepSignal::six_jump(),
        SignalArg::None => StepSignal::constant(0.0),
    };
    let smooth = match args.smooth {
        SmoothArg::Zero => SmoothComponent::Zero,
        SmoothArg::F1 => SmoothComponent::Linear,
        SmoothArg::F2 => SmoothComponent::Quadratic,
        SmoothArg::F3 => SmoothComponent::Periodic,
    };
    let model = match args.noise {
        NoiseArg::Ma1 => {
            let innovation = match args.innovation {
                InnovationArg::Gaussian => Innovation::Gaussian,
                InnovationArg::T4 => Innovation::T4,
            };
            ErrorModel::ma1(args.gamma1, innovation)
        }
        NoiseArg::Ar1 => ErrorModel::ar1(args.phi),
    }
    .map_err(CliError::from_input)?;
    let seed = match args.seed {
        Some(s) => s,
        None => {
            let s = clock_seed();
            eprintln!("acovdiff: seed {s}");
            s
        }
    };
    let spec = MeanSpec { step, smooth };
    let mean = spec.evaluate(args.n).map_err(CliError::from_input)?;
    let noise = NoiseStream::new(model, seed, 0).generate(args.n);

    let mut out = sink(args.output.as_deref())?;
    writeln!(
        out,
        "# scenario: signal={} smooth={} noise={} n={}",
        args.signal
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default(),
        spec.smooth.name(),
        model.describe(),
        args.n
    )?;
    writeln!(out, "# seed: {seed}")?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["index", "mean", "noise", "y"])?;
    for (i, (m, e)) in mean.iter().zip(&noise).enumerate() {
        w.write_record([(i + 1).to_string(), sig17(*m), sig17(*e), sig17(m + e)])?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

fn load_spec(path: &Path, seed: Option<u64>, replications: Option<usize>) -> CliResult<ExperimentSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut spec = ExperimentSpec::from_toml(&text).map_err(CliError::from_input)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    if let Some(r) = replications {
        spec.replications = r;
    }
    spec.validate().map_err(CliError::from_input)?;
    Ok(spec)
}

fn cmd_mse_study(args: MseStudyArgs) -> CliResult<()> {
    let workers = check_workers(args.workers)?;
    let spec = load_spec(&args.config, args.seed, args.replications)?;
    let report = run_experiment_with(&spec, workers).map_err(CliError::from_run)?;
    let mut out = sink(args.output.as_deref())?;
    match args.format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| CliError::Data(e.to_string()))?;
            writeln!(out)?;
        }
        ReportFormat::Csv => {
            if let Some(name) = &spec.name {
                writeln!(out, "# experiment: {name}")?;
            }
            writeln!(
                out,
                "# n={} replications={} noise={}",
                spec.n,
                spec.replications,
                spec.noise.describe()
            )?;
            writeln!(out, "# seed: {}", spec.seed)?;
            report.write_csv(&mut out)?;
        }
        ReportFormat::Markdown => {
            writeln!(out, "seed = {}, n = {}, R = {}\n", spec.seed, spec.n, spec.replications)?;
            writeln!(
                out,
                "| estimator | quantity | truth | mean | bias | variance | MSE | MSE s.e. |"
            )?;
            writeln!(out, "|---|---|---|---|---|---|---|---|")?;
            for c in &report.cells {
                writeln!(
                    out,
                    "| {} | {} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} |",
                    c.estimator,
                    c.quantity.label(),
                    c.truth,
                    c.mean,
                    c.bias,
                    c.variance,
                    c.mse,
                    c.mse_se
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_tables(args: TablesArgs) -> CliResult<()> {
    let workers = check_workers(args.workers)?;
    if args.replications == 0 {
        return Err(CliError::Usage("--replications must be at least 1".into()));
    }
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let mut stdout = io::stdout().lock();
    let mut failed = Vec::new();
    for id in args.table.0 {
        match acovdiff::run_table(id, args.seed, args.replications, workers) {
            Ok(report) => {
                let md = report.render_markdown();
                fs::write(args.out_dir.join(format!("{id}.md")), &md)?;
                let csv_path = args.out_dir.join(format!("{id}.csv"));
                report.write_csv(fs::File::create(&csv_path)?)?;
                writeln!(stdout, "{md}")?;
            }
            Err(e) => {
                eprintln!("acovdiff: {id}: {e}");
                failed.push(id.to_string());
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Experiment(format!("tables failed: {}", failed.join(", "))))
    }
}

fn cmd_rate_study(args: RateStudyArgs) -> CliResult<()> {
    let workers = check_workers(args.workers)?;
    let spec = load_spec(&args.config, args.seed, args.replications)?;
    let report = run_rate_study(&spec, &args.n_grid, workers).map_err(|e| match e {
        acovdiff::Error::InvalidArgument(_) => CliError::from_input(e),
        other => CliError::from_run(other),
    })?;
    let mut out = sink(args.output.as_deref())?;
    writeln!(out, "# seed: {}", spec.seed)?;
    writeln!(out, "# replications: {}", spec.replications)?;
    let mut header = vec![
        "estimator".to_string(),
        "quantity".into(),
        "slope".into(),
        "scaled_mse_ratio".into(),
    ];
    header.extend(report.n_grid.iter().map(|n| format!("mse_n{n}")));
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(&header)?;
    for c in &report.cells {
        let mut row = vec![
            c.estimator.clone(),
            c.quantity.label(),
            sig17(c.slope),
            sig17(c.scaled_mse_ratio),
        ];
        row.extend(c.mse.iter().map(|m| sig17(*m)));
        w.write_record(&row)?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}
