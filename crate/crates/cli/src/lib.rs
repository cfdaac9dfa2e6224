pub mod program;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use quect::algorithms::{
    constant_function, deutsch, deutsch_jozsa, grover, grover_oracle, qft_check,
    random_balanced_function, random_simon_function, simon, DjVerdict,
};
use quect::{bind, BoundProgram, ClassicalFunction, Error, Machine, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use program::{parse_assignment, ProgramFile};

#[derive(Debug, Parser)]
#[command(name = "quect", version, about = "Run ASCII-art quantum circuit chunks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a program file.
    Run(RunArgs),
    /// Print the canonical IR of every chunk in a file.
    Ir { file: PathBuf },
    /// Run one of the bundled algorithms.
    #[command(subcommand)]
    Algo(Algo),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub file: PathBuf,
    /// Print the exact distribution of the final measurement.
    #[arg(long)]
    pub dist: bool,
    /// Number of sampled outcomes to print.
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override a variable, as name=value.
    #[arg(long = "var", value_parser = parse_var)]
    pub vars: Vec<(String, i64)>,
    /// Print the canonical IR instead of running.
    #[arg(long)]
    pub emit_ir: bool,
}

fn parse_var(s: &str) -> std::result::Result<(String, i64), String> {
    parse_assignment(s)
}

#[derive(Debug, Subcommand)]
pub enum Algo {
    /// Is f: {0,1} -> {0,1} one-to-one?
    Deutsch {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Constant or balanced?
    DeutschJozsa {
        #[arg(long, conflicts_with_all = ["m", "kind"])]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Built-in instance: zero, one, parity or random.
        #[arg(long, default_value = "parity")]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover the hidden period of a two-to-one function.
    Simon {
        #[arg(long, conflicts_with_all = ["n", "period"])]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Period in binary, e.g. 101.
        #[arg(long, default_value = "101")]
        period: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for the unique marked item.
    Grover {
        #[arg(long, conflicts_with_all = ["n", "target"])]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        target: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the chunk-built QFT with the DFT matrix.
    QftCheck {
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
}

/// Parses arguments and runs, returning the process exit code.
pub fn main_with(args: impl IntoIterator<Item = String>, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let (label, result) = match &cli.command {
        Command::Run(args) if args.emit_ir => (display(&args.file), emit_ir(&args.file, out)),
        Command::Run(args) => (display(&args.file), run(args, out)),
        Command::Ir { file } => (display(file), emit_ir(file, out)),
        Command::Algo(algo) => ("quect".to_string(), run_algo(algo, out)),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            report(&label, &e, err);
            1
        }
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn report(label: &str, e: &Error, err: &mut impl Write) {
    match e {
        Error::Diagnostics(diags) => {
            for d in diags {
                let _ = writeln!(err, "{}", d.render(label));
            }
        }
        other => {
            let _ = writeln!(err, "{label}: error: {other}");
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Usage(e.to_string())
}

fn load(path: &Path) -> Result<ProgramFile> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    ProgramFile::parse(&source, base)
}

fn emit_ir(path: &Path, out: &mut impl Write) -> Result<()> {
    for chunk in load(path)?.chunks {
        write!(out, "{}", chunk.to_canonical_text()).map_err(io)?;
    }
    Ok(())
}

/// Runs every chunk in order. Marks left by a chunk that is not the last
/// are sampled before the next chunk starts.
fn execute(qm: &mut Machine, programs: &[BoundProgram]) -> Result<()> {
    for (i, p) in programs.iter().enumerate() {
        if i > 0 && !qm.pending_measure().is_empty() {
            qm.obs()?;
        }
        qm.run_chunk(p)?;
    }
    Ok(())
}

fn run(args: &RunArgs, out: &mut impl Write) -> Result<()> {
    let file = load(&args.file)?;
    if file.chunks.is_empty() {
        return Err(Error::Usage("the file has no chunks".into()));
    }
    let bindings = file.bindings(&args.vars)?;
    let programs = file
        .chunks
        .iter()
        .map(|c| bind(c, &bindings))
        .collect::<Result<Vec<_>>>()?;
    let k = file
        .machine_size
        .unwrap_or_else(|| programs.iter().map(|p| p.total_qubits).max().unwrap_or(1));
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let mut qm = Machine::new(k, seed)?;

    if args.dist {
        execute(&mut qm, &programs)?;
        for (value, p) in qm.obs_dist()?.iter().enumerate() {
            if format!("{p:.6}") != "0.000000" {
                writeln!(out, "{value} {p:.6}").map_err(io)?;
            }
        }
        if args.shots.is_none() {
            return Ok(());
        }
        qm.reset();
    }
    let shots = args.shots.unwrap_or(1);
    for shot in 0..shots {
        if shot > 0 {
            qm.reset();
        }
        execute(&mut qm, &programs)?;
        let outcome = qm.obs()?;
        writeln!(out, "{} {}", outcome.value, outcome.pattern()).map_err(io)?;
    }
    Ok(())
}

fn read_table(path: &Path) -> Result<ClassicalFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    ClassicalFunction::parse_truth_table(&text)
}

fn run_algo(algo: &Algo, out: &mut impl Write) -> Result<()> {
    match algo {
        Algo::Deutsch { table, seed } => {
            let r = deutsch(&read_table(table)?, *seed)?;
            writeln!(out, "{}", if r.one_to_one { "1-1" } else { "not 1-1" }).map_err(io)?;
        }
        Algo::DeutschJozsa { table, m, kind, seed } => {
            let f = match table {
                Some(t) => read_table(t)?,
                None => match kind.as_str() {
                    "zero" => constant_function(*m, false)?,
                    "one" => constant_function(*m, true)?,
                    "parity" => ClassicalFunction::from_fn(*m, 1, |x| x & 1)?,
                    "random" => random_balanced_function(*m, &mut ChaCha8Rng::seed_from_u64(*seed))?,
                    other => return Err(Error::Usage(format!("unknown instance `{other}`"))),
                },
            };
            let r = deutsch_jozsa(&f, *seed)?;
            let verdict = match r.verdict {
                DjVerdict::Constant => "constant",
                DjVerdict::Balanced => "balanced",
            };
            writeln!(out, "{verdict}\nP(0) {:.6}", r.p_zero).map_err(io)?;
        }
        Algo::Simon { table, n, period, seed } => {
            let f = match table {
                Some(t) => read_table(t)?,
                None => {
                    let b = usize::from_str_radix(period, 2)
                        .map_err(|_| Error::Usage(format!("period `{period}` is not binary")))?;
                    random_simon_function(*n, b, &mut ChaCha8Rng::seed_from_u64(*seed))?
                }
            };
            let r = simon(&f, *seed)?;
            let width = f.in_bits();
            writeln!(out, "period {:0width$b}\nruns {}", r.period, r.samples.len()).map_err(io)?;
        }
        Algo::Grover { table, n, target, seed } => {
            let f = match table {
                Some(t) => read_table(t)?,
                None => grover_oracle(*n, *target)?,
            };
            let r = grover(&f, *seed)?;
            writeln!(
                out,
                "found {}\niterations {}\nsuccess probability {:.6}",
                r.found, r.iterations, r.success_probability
            )
            .map_err(io)?;
        }
        Algo::QftCheck { n } => {
            let error = qft_check(*n)?;
            writeln!(out, "max error {error:.3e}").map_err(io)?;
            if error > 1e-9 {
                return Err(Error::Validation(format!("QFT deviates from the DFT by {error:.3e}")));
            }
        }
    }
    Ok(())
}
