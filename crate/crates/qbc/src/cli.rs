//! Command-line front end: sources, codecs, compiled circuits, and reports
//! bound to files. Every report is JSON on stdout (or --out); --pretty swaps
//! the stdout rendering for an aligned table. Output files are written via a
//! temp file and rename so readers never see a partial write.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::codec::{self, BlockCodec};
use crate::error::{Error, Result};
use crate::pipeline::{
    self, circuit_exact_fidelity, circuit_layout, circuit_mc_fidelity,
    make_quantum_compression_circuit, ExperimentReport, FidelityMode, Synthesis,
};
use crate::qsim::DEFAULT_QUBIT_CAP;
use crate::revcomp::circuit::ReversibleCircuit;
use crate::revcomp::resources::resource_report;
use crate::source::{von_neumann_entropy, QubitSource};

#[derive(Parser)]
#[command(
    name = "qbc",
    version,
    about = "Block compression for qubit sources: codecs, circuits, experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report a source's entropy, eigenvalues, and eigenbasis rotation
    Entropy {
        /// Source description JSON file
        #[arg(long)]
        source: PathBuf,
        /// Render an aligned table on stdout instead of JSON
        #[arg(long)]
        pretty: bool,
    },
    /// Build a block codec file and report its failure probability
    CodecBuild {
        /// Source description JSON file (sets the symbol probabilities)
        #[arg(long)]
        source: PathBuf,
        /// Block length
        #[arg(long)]
        n: u32,
        /// Code length (optimal kind; exclusive with --delta)
        #[arg(long)]
        m: Option<u32>,
        /// Atypicality budget choosing the code length (optimal kind)
        #[arg(long)]
        delta: Option<f64>,
        /// Code family
        #[arg(long, value_enum)]
        kind: CodecKindArg,
        /// Weight cutoff (enumerative kind)
        #[arg(long)]
        wmax: Option<u32>,
        /// Codec JSON output path
        #[arg(long)]
        out: PathBuf,
        /// Render an aligned table on stdout instead of JSON
        #[arg(long)]
        pretty: bool,
    },
    /// Compile a codec against a source into a measured circuit file
    Compile {
        /// Source description JSON file
        #[arg(long)]
        source: PathBuf,
        /// Codec JSON file
        #[arg(long)]
        codec: PathBuf,
        /// table, bennett, or pebbled:M,K
        #[arg(long, default_value = "table")]
        synthesis: String,
        /// Circuit text output path; resources land in <out>.resources.json
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a compiled circuit against a source and report fidelity
    Run {
        /// Circuit text file
        #[arg(long)]
        circuit: PathBuf,
        /// Source description JSON file
        #[arg(long)]
        source: PathBuf,
        /// exact enumerates every branch; mc samples trials
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Trial count (mc mode)
        #[arg(long)]
        trials: Option<u64>,
        /// Measurement/sampling seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report JSON output path (stdout always gets a copy)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render an aligned table on stdout instead of JSON
        #[arg(long)]
        pretty: bool,
    },
    /// Build and score one pipeline per block length
    Sweep {
        /// Source description JSON file
        #[arg(long)]
        source: PathBuf,
        /// Comma-separated block lengths, e.g. 4,8,12
        #[arg(long = "n-list")]
        n_list: String,
        /// Atypicality budget choosing each code length
        #[arg(long)]
        delta: f64,
        /// table, bennett, or pebbled:M,K
        #[arg(long, default_value = "table")]
        synthesis: String,
        /// Sampling seed for rows that fall back to Monte Carlo
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report JSON output path (stdout always gets a copy)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render an aligned table on stdout instead of JSON
        #[arg(long)]
        pretty: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CodecKindArg {
    Optimal,
    Enumerative,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Entropy { source, pretty } => cmd_entropy(&source, pretty),
        Command::CodecBuild {
            source,
            n,
            m,
            delta,
            kind,
            wmax,
            out,
            pretty,
        } => cmd_codec_build(&source, n, m, delta, kind, wmax, &out, pretty),
        Command::Compile {
            source,
            codec,
            synthesis,
            out,
        } => cmd_compile(&source, &codec, &synthesis, &out),
        Command::Run {
            circuit,
            source,
            mode,
            trials,
            seed,
            out,
            pretty,
        } => cmd_run(&circuit, &source, mode, trials, seed, out.as_deref(), pretty),
        Command::Sweep {
            source,
            n_list,
            delta,
            synthesis,
            seed,
            out,
            pretty,
        } => cmd_sweep(&source, &n_list, delta, &synthesis, seed, out.as_deref(), pretty),
    }
}

fn cmd_entropy(source_path: &Path, pretty: bool) -> Result<()> {
    let source = load_source(source_path)?;
    let rho = source.density_matrix();
    let eig = rho.eigendecompose();
    let json = serde_json::json!({
        "entropy_bits": von_neumann_entropy(&rho),
        "eigenvalues": [eig.eigenvalues.0, eig.eigenvalues.1],
        "rotation": matrix_json(&eig.rotation),
    });
    if pretty {
        println!("entropy_bits  {:.6}", von_neumann_entropy(&rho));
        println!("eigenvalue 0  {:.6}", eig.eigenvalues.0);
        println!("eigenvalue 1  {:.6}", eig.eigenvalues.1);
        println!("rotation      {}", matrix_row(&eig.rotation[0]));
        println!("              {}", matrix_row(&eig.rotation[1]));
    } else {
        println!("{json}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_codec_build(
    source_path: &Path,
    n: u32,
    m: Option<u32>,
    delta: Option<f64>,
    kind: CodecKindArg,
    wmax: Option<u32>,
    out: &Path,
    pretty: bool,
) -> Result<()> {
    let source = load_source(source_path)?;
    let q = source.density_matrix().eigenvalues();
    let (codec, kind_name) = match kind {
        CodecKindArg::Optimal => {
            if wmax.is_some() {
                return Err(Error::Usage(
                    "--wmax only applies to the enumerative kind".into(),
                ));
            }
            let m = match (m, delta) {
                (Some(m), None) => m,
                (None, Some(delta)) => codec::choose_code_length(q, n, delta)?,
                _ => {
                    return Err(Error::Usage(
                        "give exactly one of --m or --delta for the optimal kind".into(),
                    ))
                }
            };
            (BlockCodec::optimal_ranked(q, n, m)?, "optimal")
        }
        CodecKindArg::Enumerative => {
            if m.is_some() || delta.is_some() {
                return Err(Error::Usage(
                    "--m/--delta do not apply to the enumerative kind".into(),
                ));
            }
            let wmax = wmax.ok_or_else(|| {
                Error::Usage("--wmax is required for the enumerative kind".into())
            })?;
            (BlockCodec::enumerative(n, wmax)?, "enumerative")
        }
    };
    let failure = codec::failure_probability(&codec, q)?;
    write_atomic(out, &codec.to_json())?;
    let json = serde_json::json!({
        "n": codec.n(),
        "m": codec.m(),
        "kind": kind_name,
        "failure_probability": failure,
    });
    if pretty {
        println!("n                    {}", codec.n());
        println!("m                    {}", codec.m());
        println!("kind                 {kind_name}");
        println!("failure_probability  {failure:.6}");
    } else {
        println!("{json}");
    }
    Ok(())
}

fn cmd_compile(source_path: &Path, codec_path: &Path, synthesis: &str, out: &Path) -> Result<()> {
    let source = load_source(source_path)?;
    let codec = BlockCodec::from_json(&read_file(codec_path)?)?;
    let synthesis: Synthesis = synthesis.parse()?;
    let pipe = make_quantum_compression_circuit(&source, &codec, synthesis, qubit_cap()?)?;
    write_atomic(out, &pipe.full_circuit().to_text())?;
    let report = pipe.resource_report();
    let sidecar = PathBuf::from(format!("{}.resources.json", out.display()));
    write_atomic(&sidecar, &serde_json::to_string_pretty(&report).expect("report is serializable"))?;
    println!("{}", serde_json::to_string(&report).expect("report is serializable"));
    Ok(())
}

fn cmd_run(
    circuit_path: &Path,
    source_path: &Path,
    mode: ModeArg,
    trials: Option<u64>,
    seed: u64,
    out: Option<&Path>,
    pretty: bool,
) -> Result<()> {
    let circuit = ReversibleCircuit::from_text(&read_file(circuit_path)?)?;
    circuit.validate()?;
    let source = load_source(source_path)?;
    let cap = qubit_cap()?;
    let (n, m) = circuit_layout(&circuit)?;
    let (fidelity, gz, fidelity_mode, trials) = match mode {
        ModeArg::Exact => {
            if trials.is_some() {
                return Err(Error::Usage("--trials only applies to mc mode".into()));
            }
            let (f, gz) = circuit_exact_fidelity(&circuit, &source, cap)?;
            (f, gz, FidelityMode::Exact, None)
        }
        ModeArg::Mc => {
            let t = trials
                .ok_or_else(|| Error::Usage("--trials is required for mc mode".into()))?;
            if t == 0 {
                return Err(Error::Usage("--trials must be at least 1".into()));
            }
            let (f, gz) = circuit_mc_fidelity(&circuit, &source, t, seed, cap)?;
            (f, gz, FidelityMode::MonteCarlo, Some(t))
        }
    };
    let report = ExperimentReport {
        n,
        m,
        rate: m as f64 / n as f64,
        entropy_bits: von_neumann_entropy(&source.density_matrix()),
        fidelity,
        fidelity_mode,
        trials,
        garbage_zero_probability: gz,
        resource: resource_report(&circuit),
    };
    emit_reports(std::slice::from_ref(&report), false, out, pretty)
}

fn cmd_sweep(
    source_path: &Path,
    n_list: &str,
    delta: f64,
    synthesis: &str,
    seed: u64,
    out: Option<&Path>,
    pretty: bool,
) -> Result<()> {
    let source = load_source(source_path)?;
    let synthesis: Synthesis = synthesis.parse()?;
    let lengths = parse_n_list(n_list)?;
    let reports = pipeline::sweep(&source, &lengths, delta, synthesis, qubit_cap()?, seed)?;
    emit_reports(&reports, true, out, pretty)
}

fn parse_n_list(text: &str) -> Result<Vec<u32>> {
    let mut lengths = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        lengths.push(part.parse::<u32>().map_err(|_| {
            Error::Usage(format!("bad block length '{part}' in --n-list"))
        })?);
    }
    if lengths.is_empty() {
        return Err(Error::Usage("--n-list needs at least one block length".into()));
    }
    Ok(lengths)
}

/// stdout gets JSON (or the pretty table); --out always gets JSON.
fn emit_reports(
    reports: &[ExperimentReport],
    as_array: bool,
    out: Option<&Path>,
    pretty: bool,
) -> Result<()> {
    let json = if as_array {
        serde_json::to_string(reports).expect("reports are serializable")
    } else {
        serde_json::to_string(&reports[0]).expect("report is serializable")
    };
    if let Some(path) = out {
        write_atomic(path, &json)?;
    }
    if pretty {
        println!(
            "{:>4} {:>4} {:>7} {:>9} {:>10} {:>11} {:>8} {:>10}",
            "n", "m", "rate", "entropy", "fidelity", "mode", "trials", "gz"
        );
        for r in reports {
            let mode = match r.fidelity_mode {
                FidelityMode::Exact => "exact",
                FidelityMode::MonteCarlo => "monte-carlo",
            };
            let trials = r.trials.map_or("-".to_string(), |t| t.to_string());
            println!(
                "{:>4} {:>4} {:>7.4} {:>9.4} {:>10.6} {:>11} {:>8} {:>10.6}",
                r.n, r.m, r.rate, r.entropy_bits, r.fidelity, mode, trials,
                r.garbage_zero_probability
            );
        }
    } else {
        println!("{json}");
    }
    Ok(())
}

fn load_source(path: &Path) -> Result<QubitSource> {
    QubitSource::from_json(&read_file(path)?)
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    if !contents.ends_with('\n') {
        tmp.write_all(b"\n")?;
    }
    tmp.persist(path)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn qubit_cap() -> Result<u32> {
    match std::env::var("QBC_MAX_QUBITS") {
        Ok(v) => v.trim().parse::<u32>().map_err(|_| {
            Error::Usage(format!("QBC_MAX_QUBITS must be a qubit count, got '{v}'"))
        }),
        Err(_) => Ok(DEFAULT_QUBIT_CAP),
    }
}

fn matrix_json(m: &[[Complex64; 2]; 2]) -> serde_json::Value {
    serde_json::json!([
        [[m[0][0].re, m[0][0].im], [m[0][1].re, m[0][1].im]],
        [[m[1][0].re, m[1][0].im], [m[1][1].re, m[1][1].im]],
    ])
}

fn matrix_row(row: &[Complex64; 2]) -> String {
    format!(
        "[ {:+.6}{:+.6}i  {:+.6}{:+.6}i ]",
        row[0].re, row[0].im, row[1].re, row[1].im
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_list_parses_and_rejects() {
        assert_eq!(parse_n_list("4,8,12").unwrap(), vec![4, 8, 12]);
        assert_eq!(parse_n_list(" 2 , 3 ").unwrap(), vec![2, 3]);
        assert!(matches!(parse_n_list(""), Err(Error::Usage(_))));
        assert!(matches!(parse_n_list(" , "), Err(Error::Usage(_))));
        assert!(matches!(parse_n_list("4,x"), Err(Error::Usage(_))));
    }

    #[test]
    fn atomic_write_creates_and_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        write_atomic(&path, "{\"a\":1}").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "{\"a\":1}\n");
        write_atomic(&path, "{\"a\":2}\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "{\"a\":2}\n");
    }

    #[test]
    fn cap_env_parses() {
        // Runs without the variable set in the test environment.
        if std::env::var("QBC_MAX_QUBITS").is_err() {
            assert_eq!(qubit_cap().unwrap(), DEFAULT_QUBIT_CAP);
        }
    }
}
