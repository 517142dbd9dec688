//! Command dispatch.
//!
//! Every run prints exactly one JSON report to stdout and exits with
//! 0 (ok), 2 (hypothesis violated), 3 (guard exceeded), 4 (parse error),
//! or 5 (internal invariant breach).

mod error;
mod input;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use interlace_core::scalar::rat_int;
use interlace_core::{
    brute_force_best_assignment_with_guard, brute_force_partition_oracle_with_guard,
    certify_threshold_with_width, expected_char_poly, greedy_interlacing_assignment_with_guard,
    instance_stats, largest_root, mixed_char_poly, mixed_char_with_audit, parse_rational,
    partition_norm_bound, partition_vectors_with_guard, verify_determinant_identity_with_guard,
    Rational, VectorC,
};

use crate::error::{CliError, Result};
use crate::input::InstanceFile;
use crate::report::{
    approx, bracket_value, digest_hex, poly_value, quadratic_value, rat_str, root_bracket_value,
    Report, Status,
};

fn midpoint(lo: &Rational, hi: &Rational) -> Rational {
    (lo + hi) / rat_int(2)
}

#[derive(Parser)]
#[command(
    name = "interlace",
    about = "Exact spectral bounds for sums of rank-one Hermitian matrices",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Bracket width for exact root isolation, a positive rational.
    #[arg(long, global = true, default_value = "1/1099511627776")]
    width: String,

    /// Largest joint outcome count the enumeration paths accept.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    guard_outcomes: u64,

    /// Worker threads; defaults to all available.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Retain the subset expansion in mixedchar reports.
    #[arg(long, global = true)]
    audit: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed characteristic polynomial of the family in the file.
    Mixedchar { input: PathBuf },
    /// Check outcome enumeration against the determinant identity.
    VerifyIdentity { input: PathBuf },
    /// Certify the square-root threshold for the family.
    Certify {
        input: PathBuf,
        /// Override for the trace bound; defaults to the instance's own.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Greedy outcome choice staying within the expected-root bound.
    Assign { input: PathBuf },
    /// Split deterministic vectors into r blocks of small norm.
    Partition {
        input: PathBuf,
        /// Number of blocks.
        #[arg(long)]
        r: usize,
        /// Squared-length bound; defaults to the largest in the file.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Exhaustive oracle for cross-checking small systems.
    Bruteforce {
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: OracleMode,
        /// Number of blocks (partition mode only).
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleMode {
    Assignment,
    Partition,
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // A second build_global in one process fails; the first pool wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (report, code) = run(&cli);
    println!("{}", report.render());
    std::process::exit(code);
}

struct Flags {
    width: Rational,
    guard: u64,
    audit: bool,
}

fn parse_flags(cli: &Cli) -> Result<Flags> {
    let width = parse_rational(&cli.width)
        .map_err(|e| CliError::Parse(format!("--width: {e}")))?;
    if width <= rat_int(0) {
        return Err(CliError::Parse("--width must be positive".into()));
    }
    Ok(Flags { width, guard: cli.guard_outcomes, audit: cli.audit })
}

fn run(cli: &Cli) -> (Report, i32) {
    let (name, input, mut args) = describe(cli);
    let digest = std::fs::read(input).ok().map(|bytes| digest_hex(&bytes));
    args.insert("width".into(), cli.width.clone());
    args.insert("guard_outcomes".into(), cli.guard_outcomes.to_string());
    if let Some(n) = cli.threads {
        args.insert("threads".into(), n.to_string());
    }
    if cli.audit {
        args.insert("audit".into(), "true".into());
    }
    let outcome = parse_flags(cli).and_then(|flags| dispatch(cli, &flags));
    match outcome {
        Ok((status, results)) => (
            Report {
                command: name,
                args,
                input_sha256: digest,
                status,
                error: None,
                results: Some(results),
            },
            0,
        ),
        Err(e) => (
            Report {
                command: name,
                args,
                input_sha256: digest,
                status: e.status(),
                error: Some(e.to_string()),
                results: None,
            },
            e.exit_code(),
        ),
    }
}

fn describe(cli: &Cli) -> (String, &Path, BTreeMap<String, String>) {
    let mut args = BTreeMap::new();
    let (name, input) = match &cli.command {
        Command::Mixedchar { input } => ("mixedchar", input),
        Command::VerifyIdentity { input } => ("verify-identity", input),
        Command::Certify { input, eps } => {
            if let Some(eps) = eps {
                args.insert("eps".into(), eps.clone());
            }
            ("certify", input)
        }
        Command::Assign { input } => ("assign", input),
        Command::Partition { input, r, delta } => {
            args.insert("r".into(), r.to_string());
            if let Some(delta) = delta {
                args.insert("delta".into(), delta.clone());
            }
            ("partition", input)
        }
        Command::Bruteforce { input, mode, r } => {
            let mode = match mode {
                OracleMode::Assignment => "assignment",
                OracleMode::Partition => "partition",
            };
            args.insert("mode".into(), mode.to_string());
            args.insert("r".into(), r.to_string());
            ("bruteforce", input)
        }
    };
    args.insert("input".into(), input.display().to_string());
    (name.to_string(), input, args)
}

fn dispatch(cli: &Cli, flags: &Flags) -> Result<(Status, serde_json::Value)> {
    match &cli.command {
        Command::Mixedchar { input } => cmd_mixedchar(input, flags),
        Command::VerifyIdentity { input } => cmd_verify_identity(input, flags),
        Command::Certify { input, eps } => cmd_certify(input, eps.as_deref(), flags),
        Command::Assign { input } => cmd_assign(input, flags),
        Command::Partition { input, r, delta } => {
            cmd_partition(input, *r, delta.as_deref(), flags)
        }
        Command::Bruteforce { input, mode, r } => cmd_bruteforce(input, *mode, *r, flags),
    }
}

fn load(path: &Path) -> Result<InstanceFile> {
    Ok(input::read_file(path)?.1)
}

fn cmd_mixedchar(path: &Path, flags: &Flags) -> Result<(Status, serde_json::Value)> {
    let file = load(path)?;
    let matrices = input::hermitian_family(&file)?;
    let (mu, subset_terms) = if flags.audit {
        let result = mixed_char_with_audit(file.dim, &matrices)?;
        (result.mu, result.subset_terms)
    } else {
        (mixed_char_poly(file.dim, &matrices)?, None)
    };
    let bracket = largest_root(&mu, &flags.width)?;
    let mut results = json!({
        "mu": poly_value(&mu),
        "largest_root": root_bracket_value(&bracket),
        "real_rooted": true,
    });
    if let Some(element) = &subset_terms {
        let terms: Vec<_> = element
            .terms()
            .map(|(mask, poly)| {
                let subset: Vec<usize> = (0..64).filter(|i| mask >> i & 1 == 1).collect();
                json!({"subset": subset, "coefficients": poly_value(poly)})
            })
            .collect();
        results["subset_terms"] = serde_json::Value::Array(terms);
    }
    Ok((Status::Satisfied, results))
}

fn cmd_verify_identity(path: &Path, flags: &Flags) -> Result<(Status, serde_json::Value)> {
    let file = load(path)?;
    let inst = input::to_instance(&file)?;
    let holds = verify_determinant_identity_with_guard(&inst, flags.guard)?;
    if !holds {
        return Err(CliError::Core(interlace_core::Error::Internal(
            "enumeration disagrees with the determinant identity".into(),
        )));
    }
    Ok((
        Status::Satisfied,
        json!({
            "identity_holds": true,
            "outcome_count": inst
                .specs()
                .iter()
                .fold(1u128, |acc, s| acc.saturating_mul(s.support().len() as u128))
                .to_string(),
        }),
    ))
}

fn cmd_certify(
    path: &Path,
    eps_flag: Option<&str>,
    flags: &Flags,
) -> Result<(Status, serde_json::Value)> {
    let file = load(path)?;
    let matrices = input::hermitian_family(&file)?;
    let eps = match eps_flag {
        Some(text) => {
            parse_rational(text).map_err(|e| CliError::Parse(format!("--eps: {e}")))?
        }
        None => {
            if file.matrices.is_some() {
                matrices.iter().map(|m| m.trace()).max().unwrap_or_else(|| {
                    rat_int(0)
                })
            } else {
                instance_stats(&input::to_instance(&file)?).eps
            }
        }
    };
    let cert = certify_threshold_with_width(file.dim, &matrices, &eps, &flags.width)?;
    if !cert.certified {
        return Err(CliError::Core(interlace_core::Error::Internal(
            "certificate checks failed on valid hypotheses".into(),
        )));
    }
    Ok((
        Status::Certified,
        json!({
            "eps": rat_str(&cert.eps),
            "threshold": quadratic_value(&cert.x_threshold),
            "threshold_upper": rat_str(&cert.threshold_upper),
            "t_shift": quadratic_value(&cert.t_shift),
            "delta": quadratic_value(&cert.delta),
            "phi_upper": quadratic_value(&cert.phi_upper),
            "mu": poly_value(&cert.mu),
            "largest_root": root_bracket_value(&cert.largest_root_bracket),
            "certified": true,
        }),
    ))
}

fn cmd_assign(path: &Path, flags: &Flags) -> Result<(Status, serde_json::Value)> {
    let file = load(path)?;
    let inst = input::to_instance(&file)?;
    let stats = instance_stats(&inst);
    if !stats.sum_leq_identity {
        return Err(CliError::Core(interlace_core::Error::HypothesisViolated(
            "sum of expected outer products is not below the identity".into(),
        )));
    }
    let assignment = greedy_interlacing_assignment_with_guard(&inst, &flags.width, flags.guard)?;
    let expectation_poly = expected_char_poly(&inst, flags.guard)?;
    let expectation_root = largest_root(&expectation_poly, &flags.width)?;
    let (threshold, threshold_upper) = partition_norm_bound(1, &stats.eps, &flags.width)?;
    let (lo, hi) = &assignment.realized_norm_bracket;
    let within = hi <= &(&threshold_upper + &flags.width);
    if !within {
        return Err(CliError::Core(interlace_core::Error::Internal(
            "realized norm exceeds the certified threshold".into(),
        )));
    }
    Ok((
        Status::Satisfied,
        json!({
            "chosen": assignment.chosen,
            "realized_norm": {
                "bracket": bracket_value(lo, hi),
                "decimal": approx(&midpoint(lo, hi)),
            },
            "expectation_largest_root": root_bracket_value(&expectation_root),
            "eps": rat_str(&stats.eps),
            "threshold": quadratic_value(&threshold),
            "threshold_upper": rat_str(&threshold_upper),
            "within_threshold": true,
        }),
    ))
}

fn partition_results(p: &interlace_core::Partition) -> serde_json::Value {
    json!({
        "blocks": p.blocks,
        "block_norms": p
            .block_norm_brackets
            .iter()
            .map(|(lo, hi)| json!({
                "bracket": bracket_value(lo, hi),
                "decimal": approx(&midpoint(lo, hi)),
            }))
            .collect::<Vec<_>>(),
        "bound": quadratic_value(&p.bound),
        "bound_upper": rat_str(&p.bound_upper),
    })
}

fn partition_input(path: &Path, delta_flag: Option<&str>) -> Result<(Vec<VectorC>, Rational)> {
    let file = load(path)?;
    let vectors = input::to_vectors(&file)?;
    let delta = match delta_flag {
        Some(text) => {
            parse_rational(text).map_err(|e| CliError::Parse(format!("--delta: {e}")))?
        }
        None => vectors
            .iter()
            .map(VectorC::norm_sqr)
            .max()
            .ok_or_else(|| CliError::Parse("the file contains no specs".into()))?,
    };
    Ok((vectors, delta))
}

fn cmd_partition(
    path: &Path,
    r: usize,
    delta_flag: Option<&str>,
    flags: &Flags,
) -> Result<(Status, serde_json::Value)> {
    let (vectors, delta) = partition_input(path, delta_flag)?;
    let partition = partition_vectors_with_guard(&vectors, r, &delta, &flags.width, flags.guard)?;
    let mut results = partition_results(&partition);
    results["r"] = json!(r);
    results["delta"] = json!(rat_str(&delta));
    Ok((Status::Satisfied, results))
}

fn cmd_bruteforce(
    path: &Path,
    mode: OracleMode,
    r: usize,
    flags: &Flags,
) -> Result<(Status, serde_json::Value)> {
    match mode {
        OracleMode::Assignment => {
            let file = load(path)?;
            let inst = input::to_instance(&file)?;
            let best = brute_force_best_assignment_with_guard(&inst, &flags.width, flags.guard)?;
            let (lo, hi) = &best.realized_norm_bracket;
            Ok((
                Status::Satisfied,
                json!({
                    "mode": "assignment",
                    "chosen": best.chosen,
                    "realized_norm": {
                        "bracket": bracket_value(lo, hi),
                        "decimal": approx(&midpoint(lo, hi)),
                    },
                }),
            ))
        }
        OracleMode::Partition => {
            let file = load(path)?;
            let vectors = input::to_vectors(&file)?;
            let best = brute_force_partition_oracle_with_guard(&vectors, r, &flags.width, flags.guard)?;
            let mut results = partition_results(&best);
            results["mode"] = json!("partition");
            results["r"] = json!(r);
            Ok((Status::Satisfied, results))
        }
    }
}
