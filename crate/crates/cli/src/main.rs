use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qtm_core::qfpme::{self, DGrid};
use qtm_core::sweep::config::{apply_overrides, Config};
use qtm_core::sweep::validate::{run_suite, Suite};
use qtm_core::sweep::{evaluate_point, fmt_num, run_sweep, Engine};
use qtm_core::{MetricsRecord, RateSet, XState};

#[derive(Parser)]
#[command(name = "qtm", version, about = "Two-qubit thermal machine with parity feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady state and metrics of one parameter point.
    Steady {
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Overrides in config syntax, e.g. `g=0.01 feedback=ideal`.
        overrides: Vec<String>,
    },
    /// Two-dimensional parameter sweep written as CSV.
    Sweep {
        #[arg(short, long)]
        config: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        overrides: Vec<String>,
    },
    /// Steady state of the joint system-detector equation.
    Qfpme {
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Detector grid points.
        #[arg(long, default_value_t = qfpme::DEFAULT_POINTS)]
        points: usize,
        /// Write the detector-resolved state to this CSV file.
        #[arg(long)]
        dump: Option<PathBuf>,
        overrides: Vec<String>,
    },
    /// Run a validation suite, or `all`.
    Validate { suite: String },
}

enum Failure {
    Input(String),
    Run(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Run(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn run<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Run(e.to_string())
}

fn load(path: Option<&Path>, overrides: &[String]) -> Result<Config, Failure> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    apply_overrides(&text, overrides).map_err(input)
}

fn print_state(out: &mut impl Write, state: &XState, record: &MetricsRecord) -> io::Result<()> {
    for (k, v) in [
        ("p00", state.p00),
        ("p01", state.p01),
        ("p10", state.p10),
        ("p11", state.p11),
        ("alpha_re", state.alpha.re),
        ("alpha_im", state.alpha.im),
        ("concurrence", record.concurrence),
        ("chsh", record.chsh),
        ("fidelity", record.fidelity),
        ("singlet_fraction", record.singlet_fraction),
        ("q_dot_c", record.q_dot_c),
        ("q_dot_h", record.q_dot_h),
    ] {
        writeln!(out, "{k}={}", fmt_num(v))?;
    }
    Ok(())
}

fn steady(config: Option<&Path>, overrides: &[String]) -> Result<(), Failure> {
    let params = load(config, overrides)?.params().map_err(input)?;
    let (state, record) = evaluate_point(&params, Engine::Reduced, 0).map_err(Failure::Run)?;
    print_state(&mut io::stdout().lock(), &state, &record).map_err(run)
}

fn sweep(config: &Path, output: Option<&Path>, overrides: &[String]) -> Result<(), Failure> {
    let spec = load(Some(config), overrides)?.sweep_spec().map_err(input)?;
    let result = run_sweep(&spec).map_err(run)?;
    match output {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::Input(format!("cannot create {}: {e}", p.display())))?;
            result.write_csv(BufWriter::new(file)).map_err(run)?;
        }
        None => result.write_csv(io::stdout().lock()).map_err(run)?,
    }
    let failed = result.cells.iter().filter(|c| c.outcome.is_err()).count();
    if let Some((c, ix, iy)) = result.max_concurrence() {
        let cell = result.cell(ix, iy);
        eprintln!("{} cells, {failed} failed; max concurrence {c:.6} at x={} y={}", result.cells.len(), cell.x, cell.y);
    }
    Ok(())
}

fn joint(config: Option<&Path>, points: usize, dump: Option<&Path>, overrides: &[String]) -> Result<(), Failure> {
    let params = load(config, overrides)?.params().map_err(input)?;
    let grid = DGrid::for_params(&params, points).map_err(input)?;
    let js = qfpme::steady_joint(&params, &grid).map_err(run)?;
    let marginal = qfpme::marginal_system(&js);
    let record = MetricsRecord::evaluate(&marginal, &RateSet::from_params(&params), &params);
    let lobes = qfpme::detector_lobes(&js);
    let reduced = qfpme::reduced_steady(&params).map_err(run)?;
    let mut out = io::stdout().lock();
    print_state(&mut out, &marginal, &record).map_err(run)?;
    for (k, v) in [
        ("spacing", grid.spacing()),
        ("total_trace", js.total_trace()),
        ("negative_peak", lobes.negative_peak),
        ("positive_peak", lobes.positive_peak),
        ("negative_weight", lobes.negative_weight),
        ("positive_weight", lobes.positive_weight),
        ("trace_distance_reduced", marginal.trace_distance(&reduced)),
    ] {
        writeln!(out, "{k}={}", fmt_num(v)).map_err(run)?;
    }
    if let Some(p) = dump {
        let file = File::create(p).map_err(|e| Failure::Input(format!("cannot create {}: {e}", p.display())))?;
        qfpme::write_detector_csv(&js, BufWriter::new(file)).map_err(run)?;
    }
    Ok(())
}

fn validate(name: &str) -> Result<(), Failure> {
    let suites: Vec<Suite> = if name == "all" { Suite::ALL.to_vec() } else { vec![name.parse().map_err(input)?] };
    let mut failed = Vec::new();
    for s in suites {
        let report = run_suite(s);
        println!("{report}");
        if !report.passed() {
            failed.push(s.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Run(format!("failed suites: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Steady { config, overrides } => steady(config.as_deref(), overrides),
        Command::Sweep { config, output, overrides } => sweep(config, output.as_deref(), overrides),
        Command::Qfpme { config, points, dump, overrides } => joint(config.as_deref(), *points, dump.as_deref(), overrides),
        Command::Validate { suite } => validate(suite),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Input(msg) | Failure::Run(msg)) = &f;
            eprintln!("qtm: {msg}");
            ExitCode::from(f.code())
        }
    }
}
