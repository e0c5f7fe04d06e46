//! Command-line front end.
//!
//! Data goes to the output stream, diagnostics to the error stream. Exit
//! codes: 0 success, 1 verification failure, 2 usage or input error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::entropy::{asymptotic_entropy_finite, shannon_entropy_bits};
use crate::oracle::suite::{run_suite, SuiteConfig};
use crate::oracle::MAX_ORACLE_LENGTH;
use crate::scan::{emit_csv, format_significant, parse_filling, scan_finite, scan_infinite};
use crate::spectrum::{
    equal_weight_spectrum, mixed_spectrum, sector_spectrum, SectorSpec, Spectrum, WeightVector,
};
use crate::{Error, Result};

/// Loader tolerance on the sum of a weights file before rescaling.
pub const WEIGHTS_FILE_TOLERANCE: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "block-entropy",
    version,
    about = "Block entanglement entropy of the ferromagnetic Heisenberg chain ground states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the reduced-density-matrix eigenvalues `k, λ_k`.
    Spectrum(EnsembleArgs),
    /// Print the block entropy in bits.
    Entropy {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Also print the closed-form asymptotic and its error (fixed sector only).
        #[arg(long)]
        asymptotic: bool,
    },
    /// Sweep block sizes and write CSV.
    Scan(ScanArgs),
    /// Run the brute-force oracle suite.
    Verify {
        #[arg(long = "max-L", default_value_t = 12)]
        max_length: usize,
    },
    /// Time sector spectrum plus entropy.
    Bench {
        #[arg(long = "L")]
        length: u64,
        #[arg(long = "n")]
        block: u64,
        #[arg(long = "N")]
        up: u64,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
    },
}

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(ArgGroup::new("ensemble").required(true).args(["up", "equal_weight", "weights"])))]
struct EnsembleArgs {
    #[arg(long = "L")]
    length: u64,
    #[arg(long = "n")]
    block: u64,
    /// Fixed sector with this many up-spins.
    #[arg(long = "N")]
    up: Option<u64>,
    /// Uniform mixture over the whole multiplet.
    #[arg(long)]
    equal_weight: bool,
    /// File with L + 1 nonnegative weights, one per line.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(skip)]
#[command(group(ArgGroup::new("chain").required(true).args(["length", "infinite"])))]
struct ScanArgs {
    /// Filling as a fraction (`1/10`) or decimal.
    #[arg(long)]
    p: String,
    #[arg(long)]
    n_from: u64,
    #[arg(long)]
    n_to: u64,
    #[arg(long = "L")]
    length: Option<u64>,
    /// Thermodynamic limit.
    #[arg(long)]
    infinite: bool,
    #[arg(long, default_value_t = 1)]
    step: u64,
    /// Output path, or `-` for the output stream.
    #[arg(long)]
    out: String,
}

/// Shortest text that parses back to exactly `x`.
fn format_full(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-6..1e16).contains(&a) {
        format!("{}", x + 0.0)
    } else {
        format!("{x:e}")
    }
}

/// Reads a weights file: one value per line, blank lines ignored.
pub fn load_weights(path: &Path, length: u64) -> Result<WeightVector> {
    let text = std::fs::read_to_string(path)?;
    let raw = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>().map_err(|_| {
                Error::InvalidWeights(format!("line {}: cannot parse {l:?}", i + 1))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if raw.len() as u64 != length + 1 {
        return Err(Error::WeightLength {
            expected: length as usize + 1,
            got: raw.len(),
        });
    }
    if let Some(bad) = raw.iter().find(|a| !a.is_finite() || **a < 0.0) {
        return Err(Error::InvalidWeights(format!("negative or non-finite weight {bad}")));
    }
    WeightVector::normalized(raw, WEIGHTS_FILE_TOLERANCE)
}

fn ensemble_spectrum(args: &EnsembleArgs) -> Result<Spectrum> {
    let spec_check = SectorSpec::new(args.length, 0, args.block)?;
    if let Some(up) = args.up {
        sector_spectrum(&SectorSpec::new(args.length, up, args.block)?)
    } else if args.equal_weight {
        Ok(equal_weight_spectrum(spec_check.block()))
    } else {
        let path = args.weights.as_ref().expect("clap enforces one selector");
        let weights = load_weights(path, args.length)?;
        mixed_spectrum(args.length, args.block, &weights)
    }
}

fn run_spectrum(args: &EnsembleArgs, out: &mut dyn Write) -> Result<()> {
    let spectrum = ensemble_spectrum(args)?;
    for (k, lambda) in spectrum.probabilities().iter().enumerate() {
        writeln!(out, "{k}\t{}", format_full(*lambda))?;
    }
    Ok(())
}

fn run_entropy(
    args: &EnsembleArgs,
    asymptotic: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let exact = shannon_entropy_bits(&ensemble_spectrum(args)?)?;
    if !asymptotic {
        writeln!(out, "{}", format_full(exact.bits()))?;
        return Ok(());
    }
    let up = args.up.ok_or_else(|| {
        Error::Domain("--asymptotic applies to a fixed sector (--N) only".into())
    })?;
    let p = up as f64 / args.length as f64;
    let asym = asymptotic_entropy_finite(args.length, args.block, p)?;
    if !asym.is_reliable() {
        writeln!(
            err,
            "warning: n p q = {} is small; the Gaussian asymptotic is unreliable",
            format_significant(asym.npq)
        )?;
    }
    writeln!(out, "S_exact\tS_asymptotic\tabs_error")?;
    writeln!(
        out,
        "{}\t{}\t{}",
        format_full(exact.bits()),
        format_full(asym.bits()),
        format_full((exact.bits() - asym.bits()).abs())
    )?;
    Ok(())
}

fn run_scan(args: &ScanArgs) -> Result<(Vec<crate::scan::ScanRow>, String)> {
    let p = parse_filling(&args.p)?;
    let rows = match args.length {
        Some(length) => scan_finite(length, p, args.n_from, args.n_to, args.step)?,
        None => scan_infinite(p, args.n_from, args.n_to, args.step)?,
    };
    Ok((rows, args.out.clone()))
}

fn run_verify(max_length: usize, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let reports = run_suite(&SuiteConfig::with_max_length(max_length))?;
    let mut all = true;
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{status} {} ({} checks, max deviation {:.3e}, tolerance {:.0e})",
            r.name, r.checks, r.max_deviation, r.tolerance
        )?;
        if !r.passed() {
            all = false;
            writeln!(err, "{}: {} failing checks", r.name, r.failure_count())?;
            for f in &r.failures {
                writeln!(err, "  {f}")?;
            }
        }
    }
    Ok(all)
}

fn run_bench(length: u64, block: u64, up: u64, repeat: usize, out: &mut dyn Write) -> Result<()> {
    let spec = SectorSpec::new(length, up, block)?;
    let repeat = repeat.max(1);
    let mut times = Vec::with_capacity(repeat);
    let mut last = None;
    for _ in 0..repeat {
        let start = Instant::now();
        let spectrum = sector_spectrum(&spec)?;
        let entropy = shannon_entropy_bits(&spectrum)?;
        times.push(start.elapsed().as_secs_f64());
        last = Some((entropy, spectrum.normalization_error()));
    }
    let (entropy, norm) = last.expect("at least one repetition");
    let best = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    writeln!(
        out,
        "L={length} n={block} N={up} S={} bits normalization_error={norm:.3e}",
        format_significant(entropy.bits())
    )?;
    writeln!(
        out,
        "wall time: best {:.3} ms, mean {:.3} ms over {repeat} runs",
        best * 1e3,
        mean * 1e3
    )?;
    Ok(())
}

/// Parses `argv` (program name first) and runs one subcommand.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Spectrum(args) => run_spectrum(args, out).map(|_| EXIT_OK),
        Command::Entropy {
            ensemble,
            asymptotic,
        } => run_entropy(ensemble, *asymptotic, out, err).map(|_| EXIT_OK),
        Command::Scan(args) => run_scan(args).and_then(|(rows, dest)| {
            if dest == "-" {
                emit_csv(&rows, &mut *out)?;
            } else {
                emit_csv(&rows, BufWriter::new(File::create(&dest)?))?;
            }
            Ok(EXIT_OK)
        }),
        Command::Verify { max_length } => {
            if *max_length > MAX_ORACLE_LENGTH {
                let _ = writeln!(
                    err,
                    "error: --max-L must be at most {MAX_ORACLE_LENGTH}, got {max_length}"
                );
                return EXIT_USAGE;
            }
            run_verify(*max_length, out, err).map(|ok| if ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Bench {
            length,
            block,
            up,
            repeat,
        } => run_bench(*length, *block, *up, *repeat, out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
