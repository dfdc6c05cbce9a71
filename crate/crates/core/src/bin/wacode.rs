//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags, invalid
//! parameter combinations, empty input), 3 for data errors (I/O failures,
//! corrupt or truncated containers).

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wacode::diagnostics::{trace_model, write_trace_csv};
use wacode::report::{corpus_files, sweep, threads_from_env, Family, SweepSpec};
use wacode::{compress, decompress_bytes, ArithMode, Engine, Error, Variant, WeightFunctionSpec};

#[derive(Parser)]
#[command(name = "wacode", version, about = "Weighted adaptive Huffman and arithmetic coding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a file and print size statistics as JSON.
    Compress {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Restore the original bytes of a compressed file.
    Decompress { input: PathBuf, output: PathBuf },
    /// Code every corpus file over a parameter grid and write a report.
    Sweep {
        /// Corpus directory (searched recursively) or single file.
        corpus: PathBuf,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma-separated grid values, e.g. `0,0.5,1,8`.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<String>,
        #[arg(long, value_enum, default_value_t = EngineArg::Huffman)]
        engine: EngineArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Streaming)]
        mode: ModeArg,
        /// Keep only letters, digits and single spaces.
        #[arg(long)]
        strip_punct: bool,
        /// Report path; `.csv` selects CSV, anything else JSON.
        #[arg(long)]
        report: PathBuf,
    },
    /// Print the model at every position as CSV.
    Inspect {
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Write the trace here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = EngineArg::Huffman)]
    engine: EngineArg,
    #[arg(long, value_enum, default_value_t = VariantArg::Weighted)]
    variant: VariantArg,
    /// Weight function for `--variant weighted`: const, pos, poly:K, exp:L,
    /// exp2 or interp:J.
    #[arg(long)]
    g: Option<String>,
    /// Arithmetic coder flavour.
    #[arg(long, value_enum, default_value_t = ModeArg::Streaming)]
    mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Huffman,
    Arith,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Static,
    Backward,
    Forward,
    Weighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Streaming,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Poly,
    Exp,
    Interp,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyInput | Error::InvalidWeightFunction(_) | Error::Unsupported(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Data(format!("{}: {e}", path.display()))
}

fn engine(e: EngineArg, m: ModeArg) -> Engine {
    match (e, m) {
        (EngineArg::Huffman, _) => Engine::Huffman,
        (EngineArg::Arith, ModeArg::Exact) => Engine::Arithmetic(ArithMode::Exact),
        (EngineArg::Arith, ModeArg::Streaming) => Engine::Arithmetic(ArithMode::Streaming),
    }
}

impl ModelArgs {
    fn resolve(&self) -> Result<(Engine, Variant), Failure> {
        let variant = match (self.variant, &self.g) {
            (VariantArg::Weighted, g) => {
                let spec: WeightFunctionSpec = g.as_deref().unwrap_or("pos").parse()?;
                Variant::Weighted(spec)
            }
            (_, Some(_)) => return Err(Failure::Usage("--g only applies to --variant weighted".into())),
            (VariantArg::Static, None) => Variant::Static,
            (VariantArg::Backward, None) => Variant::Backward,
            (VariantArg::Forward, None) => Variant::Forward,
        };
        Ok((engine(self.engine, self.mode), variant))
    }
}

#[derive(Serialize)]
struct Stats {
    engine: String,
    variant: String,
    n: u64,
    net_bits: u64,
    header_bits: u64,
    frame_bits: u64,
    file_bytes: u64,
    net_ratio: f64,
    combined_ratio: f64,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compress { input, output, model } => {
            let (engine, variant) = model.resolve()?;
            let text = fs::read(&input).map_err(io_err(&input))?;
            let enc = compress(&text, engine, &variant)?;
            let bytes = enc.to_bytes();
            fs::write(&output, &bytes).map_err(io_err(&output))?;
            let sizes = enc.sizes();
            let n = text.len() as u64;
            let stats = Stats {
                engine: engine.to_string(),
                variant: variant.to_string(),
                n,
                net_bits: sizes.payload_bits,
                header_bits: sizes.header_bits,
                frame_bits: sizes.frame_bits,
                file_bytes: bytes.len() as u64,
                net_ratio: sizes.payload_bits as f64 / (8 * n) as f64,
                combined_ratio: sizes.combined_bits() as f64 / (8 * n) as f64,
            };
            println!("{}", serde_json::to_string(&stats).expect("stats serialize"));
        }
        Command::Decompress { input, output } => {
            let bytes = fs::read(&input).map_err(io_err(&input))?;
            let text = decompress_bytes(&bytes).map_err(|e| Failure::Data(e.to_string()))?;
            fs::write(&output, text).map_err(io_err(&output))?;
        }
        Command::Sweep { corpus, family, grid, engine: e, mode, strip_punct, report } => {
            let family = match family {
                FamilyArg::Poly => Family::Poly,
                FamilyArg::Exp => Family::Exp,
                FamilyArg::Interp => Family::Interp,
            };
            let files = corpus_files(&corpus).map_err(io_err(&corpus))?;
            if files.is_empty() {
                return Err(Failure::Usage(format!("no files under {}", corpus.display())));
            }
            let spec = SweepSpec { family, grid, engine: engine(e, mode), strip_punct };
            let result = sweep(&files, &spec, threads_from_env())?;
            let out = fs::File::create(&report).map_err(io_err(&report))?;
            let out = std::io::BufWriter::new(out);
            let written = if report.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
                result.write_csv(out)
            } else {
                result.write_json(out)
            };
            written.map_err(io_err(&report))?;
            let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
            eprintln!("{} rows written to {} ({failed} failed)", result.rows.len(), report.display());
        }
        Command::Inspect { input, model, output } => {
            let (engine, variant) = model.resolve()?;
            let text = fs::read(&input).map_err(io_err(&input))?;
            let records = trace_model(&text, &variant, engine)?;
            match output {
                Some(path) => {
                    let f = fs::File::create(&path).map_err(io_err(&path))?;
                    write_trace_csv(&records, std::io::BufWriter::new(f)).map_err(io_err(&path))?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    write_trace_csv(&records, &mut lock).map_err(|e| Failure::Data(e.to_string()))?;
                    lock.flush().map_err(|e| Failure::Data(e.to_string()))?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
