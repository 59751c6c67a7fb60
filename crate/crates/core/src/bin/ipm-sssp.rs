use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ipm_sssp::cli::{run, Mode, RunConfig, RunError};
use ipm_sssp::stream::{generate, parse_stream, GenSpec};
use ipm_sssp::EngineConfig;

#[derive(Debug, Parser)]
#[command(
    name = "ipm-sssp",
    version,
    about = "Incremental (1+eps)-approximate single-source shortest paths"
)]
struct Args {
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    #[arg(long, default_value_t = 2)]
    levels: usize,
    /// Barrier power override.
    #[arg(long)]
    p: Option<u32>,
    /// run, verify, bench, conformance or generate.
    #[arg(long, default_value = "run")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream file, `-` for stdin, or `gen:n=..,insertions=..,wmax=..,pattern=..`.
    #[arg(long)]
    input: String,
    #[arg(long)]
    output: Option<PathBuf>,
    /// CSV destination in bench mode (stdout when omitted).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    degree_reduce: bool,
    /// Enlarge solver steps by a line search on the potential.
    #[arg(long)]
    accelerate: bool,
    /// Run per-scale detectors on separate threads.
    #[arg(long)]
    parallel: bool,
}

fn read_input(args: &Args) -> Result<String, RunError> {
    if args.input.starts_with("gen:") {
        let spec = GenSpec::parse(&args.input, args.seed)?;
        return Ok(generate(&spec)?);
    }
    if args.input == "-" {
        return Ok(io::read_to_string(io::stdin())?);
    }
    Ok(fs::read_to_string(&args.input)?)
}

fn execute(args: &Args) -> Result<(), RunError> {
    let text = read_input(args)?;
    let mut out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if args.mode == Mode::Generate {
        out.write_all(text.as_bytes())?;
        out.flush()?;
        return Ok(());
    }
    let ops = parse_stream(&text)?;
    let mut engine = EngineConfig::new(args.epsilon);
    engine.levels = args.levels;
    engine.power = args.p;
    engine.degree_reduce = args.degree_reduce;
    engine.accelerate = args.accelerate;
    engine.parallel = args.parallel;
    let config = RunConfig::new(args.mode, engine);
    let mut csv_file = match (&args.csv, args.mode) {
        (Some(path), Mode::Bench) => Some(BufWriter::new(File::create(path)?)),
        _ => None,
    };
    let mut stdout_csv;
    let csv: Option<&mut dyn Write> = match (&mut csv_file, args.mode) {
        (Some(file), _) => Some(file),
        (None, Mode::Bench) => {
            stdout_csv = io::stdout();
            Some(&mut stdout_csv)
        }
        _ => None,
    };
    let summary = run(&ops, &config, &mut out, csv)?;
    out.flush()?;
    if let Some(mut file) = csv_file {
        file.flush()?;
    }
    if config.log_level >= 1 {
        eprintln!(
            "ipm-sssp: {} insertions, {} queries, {} phases, max ratio {:.6}",
            summary.insertions, summary.queries, summary.phases, summary.max_ratio
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("ipm-sssp: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
