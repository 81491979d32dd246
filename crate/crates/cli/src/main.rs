//! `qmask` — build, verify and stress quantum multipartite maskers.
//!
//! Subcommands: `mols gen|verify`, `mask build|verify`, `qecc check|recover`,
//! `nogo search|probe-d6`. Every report file embeds a run manifest. Exit
//! codes: 0 for success or a true verdict, 1 for a false verdict, 2 for
//! usage or input errors. Subsystem indices on the command line are
//! 0-based, matching the file formats.

mod manifest;

use anyhow::{anyhow, bail};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

use manifest::ManifestBuilder;
use qmask::erasure::{
    depolarize_channel, kl_recovery, reset_channel, roundtrip_fidelity, ErasureError,
};
use qmask::files;
use qmask::masker::{latin_masker, latin_masker_default, tilde_masker};
use qmask::mols::{mols_pair, verify_mols};
use qmask::nogo::{optimize_defect, probe_open_question, MaskProblem, SearchResult};
use qmask::tensor::MultipartiteDims;
use qmask::verifier::{
    kl_check, marginal_report, universal_masking_check, CodeSubspace, KlReport, MaskingReport,
};

#[derive(Parser)]
#[command(
    name = "qmask",
    version,
    about = "Quantum multipartite masking toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and verify mutually orthogonal Latin squares
    #[command(subcommand)]
    Mols(MolsCommand),
    /// Build and verify maskers
    #[command(subcommand)]
    Mask(MaskCommand),
    /// Error-correction checks and recovery simulation on masker ranges
    #[command(subcommand)]
    Qecc(QeccCommand),
    /// Numerical searches over the isometry manifold
    #[command(subcommand)]
    Nogo(NogoCommand),
}

#[derive(Subcommand)]
enum MolsCommand {
    /// Construct an orthogonal pair of a given order
    Gen {
        /// Square order d (d >= 3, d != 6, d not 2 mod 4 above 6)
        #[arg(long)]
        order: usize,
        /// Write the pair as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively check a pair file for the Latin and orthogonality properties
    Verify {
        /// Pair file ({"first": ..., "second": ...})
        #[arg(long)]
        pair: PathBuf,
    },
}

#[derive(Subcommand)]
enum MaskCommand {
    /// Construct a masker
    Build {
        /// Input dimension
        #[arg(long)]
        d: usize,
        /// Latin-square pair file (defaults to the built-in pair of order d)
        #[arg(long, conflicts_with = "tilde")]
        pair: Option<PathBuf>,
        /// Build the shifted masker into three (d+1)-dimensional factors
        #[arg(long)]
        tilde: bool,
        /// Write the masker as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the masking property of a masker file
    Verify {
        /// Masker file
        #[arg(long)]
        masker: PathBuf,
        /// Optional state-set file; without it the all-pure-states
        /// criterion is checked
        #[arg(long)]
        set: Option<PathBuf>,
        /// Frobenius-norm tolerance
        #[arg(long, default_value_t = qmask::verifier::DEFAULT_TOL)]
        tol: f64,
        /// Write a JSON report
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum QeccCommand {
    /// Knill-Laflamme one-erasure check on a masker range or code file
    Check {
        /// Masker file (checks its range)
        #[arg(long)]
        masker: Option<PathBuf>,
        /// Code file ({"dims": ..., "basis": ...})
        #[arg(long)]
        code: Option<PathBuf>,
        /// Frobenius-norm tolerance
        #[arg(long, default_value_t = qmask::verifier::DEFAULT_TOL)]
        tol: f64,
        /// Write a JSON report
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Erasure-and-recovery round trip on a masker's range
    Recover {
        /// Masker file
        #[arg(long)]
        masker: PathBuf,
        /// Which one-erasure channel to apply
        #[arg(long, value_enum)]
        channel: ChannelArg,
        /// Erased subsystem (0-based)
        #[arg(long)]
        j: usize,
        /// Random code states to sample
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// RNG seed
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Knill-Laflamme tolerance for recovery synthesis
        #[arg(long, default_value_t = qmask::verifier::DEFAULT_TOL)]
        tol: f64,
        /// Write a JSON report
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum NogoCommand {
    /// Multi-restart defect descent on a masking problem
    Search {
        /// Input dimension K
        #[arg(long)]
        k: usize,
        /// Subsystem dimensions, comma separated (e.g. 2,2,2 or 4,4)
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write a JSON report
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Defect landscape of the open dimension-6 question in (C^6)^3
    #[command(name = "probe-d6")]
    ProbeD6 {
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write a JSON report
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChannelArg {
    Reset,
    Depolarize,
}

impl ChannelArg {
    fn name(self) -> &'static str {
        match self {
            ChannelArg::Reset => "reset",
            ChannelArg::Depolarize => "depolarize",
        }
    }
}

/// What the command concluded; drives the exit code.
enum Outcome {
    Pass,
    Fail,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let is_help = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            std::process::exit(if is_help { 0 } else { 2 });
        }
    };
    match run(cli.command) {
        Ok(Outcome::Pass) => std::process::exit(0),
        Ok(Outcome::Fail) => std::process::exit(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    let manifest = ManifestBuilder::new();
    match command {
        Command::Mols(cmd) => run_mols(cmd, manifest),
        Command::Mask(cmd) => run_mask(cmd, manifest),
        Command::Qecc(cmd) => run_qecc(cmd, manifest),
        Command::Nogo(cmd) => run_nogo(cmd, manifest),
    }
}

fn write_report(
    path: &Path,
    mut manifest: ManifestBuilder,
    kind: &str,
    report: serde_json::Value,
) -> anyhow::Result<()> {
    manifest.record_output(&path.display().to_string());
    let value = serde_json::json!({
        "manifest": manifest.finish(),
        "kind": kind,
        "report": report,
    });
    files::write_value(path, &value)?;
    println!("report written to {}", path.display());
    Ok(())
}

fn run_mols(cmd: MolsCommand, mut manifest: ManifestBuilder) -> anyhow::Result<Outcome> {
    match cmd {
        MolsCommand::Gen { order, out } => {
            let pair = mols_pair(order)?;
            println!("orthogonal pair of order {order} constructed");
            if let Some(path) = out {
                manifest.record_output(&path.display().to_string());
                files::save_pair(&path, &pair)?;
                println!("pair written to {}", path.display());
            }
            Ok(Outcome::Pass)
        }
        MolsCommand::Verify { pair } => {
            manifest.record_input(&pair.display().to_string());
            let loaded = files::load_pair(&pair)?;
            match verify_mols(&loaded) {
                Ok(()) => {
                    println!(
                        "pair of order {}: Latin and orthogonality properties hold",
                        loaded.order()
                    );
                    Ok(Outcome::Pass)
                }
                Err(violation) => {
                    println!("pair is invalid: {violation}");
                    Ok(Outcome::Fail)
                }
            }
        }
    }
}

fn run_mask(cmd: MaskCommand, mut manifest: ManifestBuilder) -> anyhow::Result<Outcome> {
    match cmd {
        MaskCommand::Build { d, pair, tilde, out } => {
            let masker = if tilde {
                tilde_masker(d)?
            } else {
                match &pair {
                    Some(path) => {
                        manifest.record_input(&path.display().to_string());
                        let loaded = files::load_pair(path)?;
                        latin_masker(d, &loaded)?
                    }
                    None => latin_masker_default(d)?,
                }
            };
            println!(
                "masker built: {} -> {:?}, provenance {}, isometry defect {:.2e}",
                masker.input_dim(),
                masker.dims().dims(),
                masker.provenance(),
                masker.matrix().isometry_defect()
            );
            if let Some(path) = out {
                manifest.record_output(&path.display().to_string());
                files::save_masker(&path, &masker)?;
                println!("masker written to {}", path.display());
            }
            Ok(Outcome::Pass)
        }
        MaskCommand::Verify { masker, set, tol, report } => {
            manifest.record_input(&masker.display().to_string());
            let loaded = files::load_masker(&masker)?;
            let masking: MaskingReport = match &set {
                Some(path) => {
                    manifest.record_input(&path.display().to_string());
                    let states = files::load_state_set(path)?;
                    marginal_report(&loaded, &states, tol)?
                }
                None => universal_masking_check(&loaded, tol)?,
            };
            print_masking(&masking);
            let outcome = if masking.verdict { Outcome::Pass } else { Outcome::Fail };
            if let Some(path) = report {
                write_report(&path, manifest, "masking", serde_json::to_value(&masking)?)?;
            }
            Ok(outcome)
        }
    }
}

fn print_masking(report: &MaskingReport) {
    let mode = match report.evidence {
        qmask::verifier::Evidence::Deterministic => "all pure states (deterministic)".to_string(),
        qmask::verifier::Evidence::Sampled { states } => format!("{states}-state set"),
    };
    println!("masking check over {mode}, tolerance {:.1e}", report.tolerance);
    for sub in &report.subsystems {
        println!(
            "  subsystem {}: worst deviation {:.3e}, worst pairwise {:.3e}",
            sub.subsystem, sub.worst_deviation, sub.worst_pairwise
        );
    }
    println!("verdict: {}", if report.verdict { "MASKS" } else { "DOES NOT MASK" });
}

fn print_kl(reports: &[KlReport]) {
    for report in reports {
        println!(
            "  subsystem {}: {} erasure operators, worst deviation {:.3e} -> {}",
            report.subsystem,
            report.entries.len(),
            report.worst_deviation,
            if report.verdict { "pass" } else { "FAIL" }
        );
    }
}

fn run_qecc(cmd: QeccCommand, mut manifest: ManifestBuilder) -> anyhow::Result<Outcome> {
    match cmd {
        QeccCommand::Check { masker, code, tol, report } => {
            let subspace = match (&masker, &code) {
                (Some(path), None) => {
                    manifest.record_input(&path.display().to_string());
                    CodeSubspace::from_masker(&files::load_masker(path)?)
                }
                (None, Some(path)) => {
                    manifest.record_input(&path.display().to_string());
                    files::load_code(path)?
                }
                _ => bail!("pass exactly one of --masker or --code"),
            };
            println!(
                "code of dimension {} in {:?}",
                subspace.dim(),
                subspace.dims().dims()
            );
            let reports: Vec<KlReport> = (0..subspace.dims().n())
                .map(|j| kl_check(&subspace, j, tol))
                .collect::<Result<_, _>>()?;
            print_kl(&reports);
            let verdict = reports.iter().all(|r| r.verdict);
            println!(
                "verdict: {}",
                if verdict { "CODE for every one-erasure channel" } else { "NOT a one-erasure code" }
            );
            if let Some(path) = report {
                write_report(
                    &path,
                    manifest,
                    "knill-laflamme",
                    serde_json::json!({ "verdict": verdict, "subsystems": reports }),
                )?;
            }
            Ok(if verdict { Outcome::Pass } else { Outcome::Fail })
        }
        QeccCommand::Recover { masker, channel, j, samples, seed, tol, report } => {
            manifest.record_input(&masker.display().to_string());
            manifest.record_seed(seed);
            let loaded = files::load_masker(&masker)?;
            let code = CodeSubspace::from_masker(&loaded);
            if j >= code.dims().n() {
                bail!("subsystem {j} out of range for {} factors", code.dims().n());
            }
            let kraus_channel = match channel {
                ChannelArg::Reset => reset_channel(code.dims(), j)?,
                ChannelArg::Depolarize => depolarize_channel(code.dims(), j)?,
            };
            let recovery = match kl_recovery(&code, &kraus_channel, tol) {
                Ok(recovery) => recovery,
                Err(ErasureError::KlViolated { worst, tolerance }) => {
                    println!(
                        "range is not a one-erasure code at subsystem {j}: \
                         Knill-Laflamme deviation {worst:.3e} exceeds {tolerance:.1e}"
                    );
                    return Ok(Outcome::Fail);
                }
                Err(other) => return Err(other.into()),
            };
            let fidelity = roundtrip_fidelity(&code, &kraus_channel, &recovery, samples, seed);
            println!(
                "{} erasure on subsystem {j}: {} recovery operators, \
                 worst fidelity {:.12}, mean {:.12} over {} states",
                channel.name(),
                recovery.kraus().len(),
                fidelity.worst,
                fidelity.mean,
                fidelity.samples
            );
            let pass = fidelity.worst >= 1.0 - 1e-8;
            println!("verdict: {}", if pass { "RECOVERED" } else { "RECOVERY FAILED" });
            if let Some(path) = report {
                write_report(
                    &path,
                    manifest,
                    "recovery-fidelity",
                    serde_json::json!({
                        "channel": channel.name(),
                        "subsystem": j,
                        "verdict": pass,
                        "fidelity": fidelity,
                    }),
                )?;
            }
            Ok(if pass { Outcome::Pass } else { Outcome::Fail })
        }
    }
}

fn search_summary(result: &SearchResult) {
    println!(
        "searched {} restarts x {} iterations (seed {}): best defect {:.6e} at restart {}",
        result.restarts, result.max_iters, result.seed, result.best_defect, result.best_restart
    );
    let lines: Vec<String> = result
        .trajectories
        .iter()
        .map(|t| format!("  restart {}: defect {:.3e} after {} iterations ({:?})", t.restart, t.final_defect, t.iterations, t.termination))
        .collect();
    for line in lines {
        println!("{line}");
    }
    println!(
        "note: numerical evidence only — a positive floor is not a nonexistence proof, and a \
         vanishing defect is a candidate, not a verified masker"
    );
}

fn run_nogo(cmd: NogoCommand, mut manifest: ManifestBuilder) -> anyhow::Result<Outcome> {
    match cmd {
        NogoCommand::Search { k, dims, restarts, iters, seed, report } => {
            manifest.record_seed(seed);
            let dims = MultipartiteDims::new(dims).map_err(|e| anyhow!(e.to_string()))?;
            let problem = MaskProblem::new(k, dims)?;
            let result = optimize_defect(&problem, restarts, iters, seed)?;
            search_summary(&result);
            if let Some(path) = report {
                write_report(
                    &path,
                    manifest,
                    "defect-search",
                    serde_json::json!({
                        "interpretation": "numerical evidence only; no existence claim either way",
                        "result": result,
                    }),
                )?;
            }
            Ok(Outcome::Pass)
        }
        NogoCommand::ProbeD6 { restarts, iters, seed, report } => {
            manifest.record_seed(seed);
            let result = probe_open_question(restarts, iters, seed)?;
            search_summary(&result);
            if let Some(path) = report {
                write_report(
                    &path,
                    manifest,
                    "defect-search",
                    serde_json::json!({
                        "interpretation": "numerical evidence only; no existence claim either way",
                        "result": result,
                    }),
                )?;
            }
            Ok(Outcome::Pass)
        }
    }
}
