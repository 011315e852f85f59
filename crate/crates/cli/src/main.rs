//! `crossroad` — generate data, train and evaluate route classifiers, and
//! simulate vehicle encounters end to end.
//!
//! Exit codes: 0 success, 1 runtime error (I/O, parse, degenerate data),
//! 2 usage error (bad flags or flag values).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crossroad_core::datagen::{generate, GenConfig};
use crossroad_core::learn::{
    Dataset, DtModel, KnnModel, NbModel, TrainedModel, DEFAULT_KNN_K, DEFAULT_MAX_DEPTH,
};
use crossroad_core::pipeline::{
    format_report_line, load_scenarios, run_batch, PipelineConfig,
};
use crossroad_core::plate::{recognize, render_plate, GlyphFont, PlateImage, PlateText};
use crossroad_core::registry::{Registry, VehicleRecord};
use crossroad_core::rng::SplitMix64;

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "crossroad", version, about = "Crossroad route prediction workflow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset of (dv, mp, label) samples
    Generate(GenerateArgs),
    /// Train a classifier and write the model file
    Train(TrainArgs),
    /// Evaluate a model file against a labeled dataset
    Evaluate(EvaluateArgs),
    /// Run the full pipeline over a scenario batch
    Simulate(SimulateArgs),
    /// Render or recognize plate images
    Plate {
        #[command(subcommand)]
        command: PlateCommand,
    },
    /// Inspect or edit a registry file
    Registry {
        #[command(subcommand)]
        command: RegistryCommand,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 1491)]
    n_straight: usize,
    #[arg(long, default_value_t = 1508)]
    n_turn: usize,
    #[arg(long, default_value_t = 0.0)]
    mu_dv_straight: f64,
    #[arg(long, default_value_t = 0.5)]
    sigma_dv_straight: f64,
    #[arg(long, default_value_t = -2.0)]
    mu_dv_turn: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_dv_turn: f64,
    #[arg(long, default_value_t = 0.15)]
    p_mp_straight: f64,
    #[arg(long, default_value_t = 0.85)]
    p_mp_turn: f64,
    #[arg(long, default_value_t = 0.01)]
    label_noise: f64,
    #[arg(long, default_value_t = crossroad_core::datagen::DEFAULT_SEED)]
    seed: u64,
    /// Output dataset path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Algo {
    Knn,
    Nb,
    Dt,
}

#[derive(Args)]
struct TrainArgs {
    /// Classifier to fit (the decision tree is the pipeline default)
    #[arg(long, value_enum, default_value_t = Algo::Dt)]
    algo: Algo,
    /// Training dataset path
    #[arg(long)]
    data: PathBuf,
    /// Output model path
    #[arg(long)]
    out_model: PathBuf,
    /// Neighbor count for knn (odd)
    #[arg(long, default_value_t = DEFAULT_KNN_K)]
    k: usize,
    /// Depth limit for dt
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Tsv,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Model file to score
    #[arg(long)]
    model: PathBuf,
    /// Labeled dataset to score against
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    report: ReportFormat,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario batch file
    #[arg(long)]
    scenarios: PathBuf,
    /// Registry file gating the runs
    #[arg(long)]
    registry: PathBuf,
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    /// Batch seed for the per-scenario rng streams
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Radar noise sigma in hertz
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Radar calibration factor
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Write per-scenario traces to this file
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PlateCommand {
    /// Render plate text to a `.`/`#` grid file
    Render {
        #[arg(long)]
        text: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recognize the text in a grid file
    Recognize {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long, default_value_t = 128)]
        threshold: u8,
    },
}

#[derive(Subcommand)]
enum RegistryCommand {
    /// Insert or replace one record (creates the file if missing)
    Add {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        plate: String,
        #[arg(long)]
        mp: u8,
    },
    /// Print all records, sorted by plate
    List {
        #[arg(long)]
        file: PathBuf,
    },
    /// Delete one record if present
    Remove {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        plate: String,
    },
}

/// Failures mapped to exit codes.
enum CliError {
    /// Bad flag values: exit 2.
    Usage(String),
    /// I/O, parse, or data errors: exit 1.
    Runtime(String),
}

impl From<crossroad_core::Error> for CliError {
    fn from(err: crossroad_core::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes, not usage errors.
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => cmd_generate(args),
        Command::Train(args) => cmd_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Plate { command } => cmd_plate(command),
        Command::Registry { command } => cmd_registry(command),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let config = GenConfig {
        n_straight: args.n_straight,
        n_turn: args.n_turn,
        mu_dv_straight: args.mu_dv_straight,
        sigma_dv_straight: args.sigma_dv_straight,
        mu_dv_turn: args.mu_dv_turn,
        sigma_dv_turn: args.sigma_dv_turn,
        p_mp_straight: args.p_mp_straight,
        p_mp_turn: args.p_mp_turn,
        label_noise: args.label_noise,
        seed: args.seed,
    };
    // Flag-domain violations are usage errors, not runtime errors.
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let data = generate(&config)?;
    data.save(&args.out)?;
    println!("wrote {} rows to {}", data.len(), args.out.display());
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    if args.algo == Algo::Knn && (args.k == 0 || args.k % 2 == 0) {
        return Err(CliError::Usage(format!("--k must be an odd positive integer, got {}", args.k)));
    }
    if args.algo == Algo::Dt && args.max_depth == 0 {
        return Err(CliError::Usage("--max-depth must be at least 1".into()));
    }
    let data = Dataset::load(&args.data)?;
    let model = match args.algo {
        Algo::Knn => TrainedModel::Knn(KnnModel::fit(&data, args.k)?),
        Algo::Nb => TrainedModel::NaiveBayes(NbModel::fit(&data)?),
        Algo::Dt => TrainedModel::DecisionTree(DtModel::fit(&data, args.max_depth)?),
    };
    model.save(&args.out_model)?;
    println!("training accuracy: {:.3}", model.accuracy_on(&data));
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let model = TrainedModel::load(&args.model)?;
    let data = Dataset::load(&args.data)?;
    let predictions: Vec<_> =
        data.samples().iter().map(|s| model.predict(s.dv, s.mp)).collect();
    let truths: Vec<_> = data.samples().iter().map(|s| s.label).collect();
    let report = crossroad_core::learn::evaluate(&predictions, &truths)?;
    match args.report {
        ReportFormat::Table => print!("{}", report.to_table_string()),
        ReportFormat::Tsv => print!("{}", report.to_tsv_string()),
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let scenarios = load_scenarios(&args.scenarios)?;
    let registry = Registry::load(&args.registry)?;
    let model = TrainedModel::load(&args.model)?;
    let config = PipelineConfig {
        calibration: crossroad_core::radar::RadarCalibration::new(args.k, args.noise_sigma)
            .map_err(|e| CliError::Usage(e.to_string()))?,
        ..Default::default()
    };
    let mut rng = SplitMix64::new(args.seed);
    let result = run_batch(&scenarios, &registry, &model, &config, &mut rng);

    let mut traces = String::new();
    for (index, run) in result.runs.iter().enumerate() {
        match run {
            Ok((outcome, trace)) => {
                println!("{}", format_report_line(outcome));
                if args.trace_out.is_some() {
                    traces.push_str(&format!("# scenario {index}\n{}", trace.to_text()));
                }
            }
            Err(err) => {
                eprintln!("scenario {index}: {err}");
                if args.trace_out.is_some() {
                    traces.push_str(&format!("# scenario {index}\nerror {err}\n"));
                }
            }
        }
    }
    if let Some(path) = &args.trace_out {
        std::fs::write(path, traces).map_err(CliError::from)?;
    }
    println!("predicted: {}", result.runs.len() - result.unregistered - result.errored);
    println!("unregistered: {}", result.unregistered);
    if let Some(report) = &result.report {
        print!("{}", report.to_table_string());
    }
    if result.errored > 0 {
        return Err(CliError::Runtime(format!("{} scenario(s) failed", result.errored)));
    }
    Ok(())
}

fn cmd_plate(command: PlateCommand) -> Result<(), CliError> {
    let font = GlyphFont::builtin();
    match command {
        PlateCommand::Render { text, out } => {
            let text = PlateText::new(text).map_err(|e| CliError::Usage(e.to_string()))?;
            let image = render_plate(&text, font);
            std::fs::write(&out, image.to_grid_string()).map_err(CliError::from)?;
            println!("wrote {}x{} image to {}", image.width(), image.height(), out.display());
        }
        PlateCommand::Recognize { r#in, threshold } => {
            let image = PlateImage::parse_grid(&std::fs::read_to_string(&r#in)?)?;
            let text = recognize(&image, font, threshold)?;
            println!("{text}");
        }
    }
    Ok(())
}

fn cmd_registry(command: RegistryCommand) -> Result<(), CliError> {
    match command {
        RegistryCommand::Add { file, plate, mp } => {
            let plate = PlateText::new(plate).map_err(|e| CliError::Usage(e.to_string()))?;
            let record = VehicleRecord::new(plate, mp).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut registry =
                if file.exists() { Registry::load(&file)? } else { Registry::new() };
            registry.upsert(record);
            registry.save(&file)?;
            println!("{} records", registry.len());
        }
        RegistryCommand::List { file } => {
            let registry = Registry::load(&file)?;
            for record in registry.iter() {
                println!("{record}");
            }
        }
        RegistryCommand::Remove { file, plate } => {
            let plate = PlateText::new(plate).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut registry = Registry::load(&file)?;
            let removed = registry.remove(&plate);
            registry.save(&file)?;
            println!("removed: {}", if removed { 1 } else { 0 });
        }
    }
    Ok(())
}
