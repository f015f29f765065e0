//! `resreg`: command-line front end for resreg-core.
//!
//! Exit codes: 0 ok, 1 verification failed, 2 format error, 3 resource cap,
//! 4 internal invariant violation. Diagnostics go to stderr, reports to
//! stdout.

mod error;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use resreg_core::automate::{automate_resolution, AutomateConfig, AutomateError, DpProver};
use resreg_core::formula::{brute_sat, SatResult, DEFAULT_BRUTE_CAP};
use resreg_core::oracle::{
    corpus, dp_prove, min_height_witness, min_size, BudgetPolicy, DpOutcome, EliminationOrder,
};
use resreg_core::proof::{proof_stats, Regularity, VerificationReport};
use resreg_core::regularize::{build_f, canonical_sigma, regularize, LevelScheme, RegularizeError};
use resreg_core::restrict::{restrict_proof, restrict_proof_with_vars, RestrictError};
use resreg_core::{
    parse_dimacs, parse_substitution, parse_trace, verify_proof, write_dimacs, write_trace,
    CnfFormula, Proof,
};

use error::CliError;

const BRUTE_CAP_ENV: &str = "RESREG_BRUTE_CAP";
const SIZE_CAP_ENV: &str = "RESREG_SIZE_CAP";
const HEIGHT_CAP_ENV: &str = "RESREG_HEIGHT_CAP";
const DEFAULT_SIZE_CAP: usize = 16;
const DEFAULT_HEIGHT_CAP: usize = 64;

#[derive(Parser)]
#[command(name = "resreg", version, about = "Resolution proof checking, regularization and restriction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct ReportOpt {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Check a trace against a CNF.
    Verify {
        #[arg(required_unless_present = "dir")]
        cnf: Option<PathBuf>,
        #[arg(required_unless_present = "dir")]
        trace: Option<PathBuf>,
        /// Verify every <name>.cnf / <name>.trace pair in a directory.
        #[arg(long, conflicts_with_all = ["cnf", "trace"])]
        dir: Option<PathBuf>,
        #[command(flatten)]
        report: ReportOpt,
    },
    /// Size, height, regularity and irregularity heights of a refutation.
    Stats {
        cnf: PathBuf,
        trace: PathBuf,
        #[command(flatten)]
        report: ReportOpt,
    },
    /// Write f(Γ, h): h leveled copies of each variable with equivalence clauses.
    Transform {
        cnf: PathBuf,
        #[arg(short = 'H', long = "height")]
        h: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn a refutation of Γ into a regular refutation of f(Γ, h).
    Regularize {
        cnf: PathBuf,
        trace: PathBuf,
        /// Output CNF and trace.
        #[arg(short, long, num_args = 2, value_names = ["CNF", "TRACE"], required = true)]
        output: Vec<PathBuf>,
        #[command(flatten)]
        report: ReportOpt,
    },
    /// Restrict a refutation of Γ by a substitution.
    Restrict {
        cnf: PathBuf,
        trace: PathBuf,
        #[arg(long = "sub")]
        substitution: PathBuf,
        #[arg(short, long, num_args = 2, value_names = ["CNF", "TRACE"], required = true)]
        output: Vec<PathBuf>,
    },
    /// Map a refutation of f(Γ, h) back to Γ with W[x, j] ↦ x.
    Deregularize {
        original: PathBuf,
        leveled: PathBuf,
        trace: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Davis–Putnam elimination.
    ProveDp {
        cnf: PathBuf,
        /// Comma-separated elimination order (default 1, 2, …, n).
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<u32>>,
        /// Maximum number of attempted resolvents.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive oracles for small formulas.
    Oracle {
        #[arg(value_enum)]
        query: OracleQuery,
        cnf: PathBuf,
        /// Variable cap (sat), size cap (min-size) or level cap (min-height).
        #[arg(long)]
        cap: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a seeded corpus of formulas with verified refutations.
    GenCorpus {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        max_n: u32,
        #[arg(long, default_value_t = 40)]
        max_size: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Find a refutation through a regular prover run on f(Γ, r), r = 0, 1, ….
    Automate {
        cnf: PathBuf,
        #[arg(long, value_enum, default_value = "dp")]
        prover: ProverChoice,
        /// Outer budget polynomial t(m) = c·m^k, as "c,k".
        #[arg(long, value_parser = parse_policy, default_value = "1,2")]
        t: BudgetPolicy,
        /// Inner budget polynomial u(m) = c·m^k, as "c,k".
        #[arg(long, value_parser = parse_policy, default_value = "1,2")]
        u: BudgetPolicy,
        #[arg(long, default_value_t = 64)]
        rmax: u64,
        /// Visit r = 0, 1, 2, 4, 8, … instead of every r.
        #[arg(long)]
        geometric: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        report: ReportOpt,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleQuery {
    MinSize,
    MinHeight,
    Sat,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProverChoice {
    Dp,
}

fn parse_policy(s: &str) -> Result<BudgetPolicy, String> {
    let (c, k) = s.split_once(',').ok_or("expected c,k")?;
    let c = c.trim().parse().map_err(|_| format!("bad coefficient {c:?}"))?;
    let k = k.trim().parse().map_err(|_| format!("bad exponent {k:?}"))?;
    BudgetPolicy::new(c, k).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Verify { cnf, trace, dir, report } => match dir {
            Some(dir) => verify_dir(&dir, report.report),
            None => verify(&cnf.expect("required"), &trace.expect("required"), report.report),
        },
        Command::Stats { cnf, trace, report } => stats(&cnf, &trace, report.report),
        Command::Transform { cnf, h, output } => {
            let f = build_f(&read_cnf(&cnf)?, h).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(output.as_deref(), &write_dimacs(&f))
        }
        Command::Regularize { cnf, trace, output, report } => {
            regularize_cmd(&cnf, &trace, &output[0], &output[1], report.report)
        }
        Command::Restrict { cnf, trace, substitution, output } => {
            let f = read_cnf(&cnf)?;
            let p = read_trace(&trace, &f)?;
            let sigma = parse_substitution(&read(&substitution)?)
                .map_err(|e| CliError::format(&substitution, e))?;
            let out = restrict_proof(&f, &p, &sigma).map_err(restrict_error)?;
            check_refutation(&out.formula, &out.proof)?;
            write(&output[0], &write_dimacs(&out.formula))?;
            write(&output[1], &write_trace(&out.proof))?;
            println!("size={} input_size={}", out.proof.size(), p.size());
            Ok(())
        }
        Command::Deregularize { original, leveled, trace, output } => {
            deregularize(&original, &leveled, &trace, &output)
        }
        Command::ProveDp { cnf, order, budget, output } => prove_dp(&cnf, order, budget, output),
        Command::Oracle { query, cnf, cap, output } => oracle(query, &cnf, cap, output),
        Command::GenCorpus { seed, count, max_n, max_size, output } => {
            gen_corpus(seed, count, max_n, max_size, &output)
        }
        Command::Automate { cnf, prover, t, u, rmax, geometric, output, report } => {
            let config = AutomateConfig { t, u, r_max: rmax, geometric };
            automate(&cnf, prover, &config, output, report.report)
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))
        }
    }
}

fn read_cnf(path: &Path) -> Result<CnfFormula, CliError> {
    parse_dimacs(&read(path)?).map_err(|e| CliError::format(path, e))
}

fn read_trace(path: &Path, formula: &CnfFormula) -> Result<Proof, CliError> {
    parse_trace(&read(path)?, formula).map_err(|e| match e.node() {
        Some(_) => CliError::Verification(format!("{}: {e}", path.display())),
        None => CliError::format(path, e),
    })
}

fn env_cap<T: std::str::FromStr>(var: &str, default: T) -> Result<T, CliError> {
    match std::env::var(var) {
        Ok(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("{var}={v:?} is not a valid cap"))),
        Err(_) => Ok(default),
    }
}

/// Self-check for every emitted proof: a non-refutation here is a bug.
fn check_refutation(formula: &CnfFormula, proof: &Proof) -> Result<VerificationReport, CliError> {
    let report = verify_proof(formula, proof)
        .map_err(|e| CliError::Internal(format!("emitted proof fails verification: {e}")))?;
    if !report.is_refutation {
        return Err(CliError::Internal("emitted proof derives no empty clause".into()));
    }
    Ok(report)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

#[derive(Serialize)]
struct VerifyReport {
    size: usize,
    height: u32,
    refutation: bool,
    regularity: Regularity,
    duplicate_clauses: usize,
}

/// Verifies one pair; the report is returned even when it is not a refutation.
fn verify_pair(cnf: &Path, trace: &Path) -> Result<VerifyReport, CliError> {
    let f = read_cnf(cnf)?;
    let p = read_trace(trace, &f)?;
    let r = verify_proof(&f, &p)
        .map_err(|e| CliError::Verification(format!("{}: {e}", trace.display())))?;
    Ok(VerifyReport {
        size: r.size,
        height: r.height,
        refutation: r.is_refutation,
        regularity: resreg_core::is_regular(&p),
        duplicate_clauses: r.duplicate_clauses,
    })
}

fn verify_line(r: &VerifyReport) -> String {
    format!(
        "size={} height={} regular={}",
        r.size,
        r.height,
        r.regularity.is_regular()
    )
}

fn verify(cnf: &Path, trace: &Path, format: ReportFormat) -> Result<(), CliError> {
    let r = verify_pair(cnf, trace)?;
    match format {
        ReportFormat::Json => print_json(&r),
        ReportFormat::Text => println!("{}", verify_line(&r)),
    }
    if r.refutation {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{}: no empty clause is derived",
            trace.display()
        )))
    }
}

fn verify_dir(dir: &Path, format: ReportFormat) -> Result<(), CliError> {
    let mut stems: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Io(dir.to_path_buf(), e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cnf"))
        .map(|p| p.with_extension(""))
        .collect();
    stems.sort();
    #[derive(Serialize)]
    struct Entry {
        name: String,
        ok: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        report: Option<VerifyReport>,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    }
    let mut entries = Vec::new();
    let mut worst: Option<CliError> = None;
    for stem in stems {
        let name = stem.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let result = verify_pair(&stem.with_extension("cnf"), &stem.with_extension("trace"))
            .and_then(|r| {
                if r.refutation {
                    Ok(r)
                } else {
                    Err(CliError::Verification(format!("{name}: no empty clause is derived")))
                }
            });
        let entry = match result {
            Ok(r) => Entry { name, ok: true, report: Some(r), error: None },
            Err(e) => {
                eprintln!("error: {e}");
                let entry = Entry { name, ok: false, report: None, error: Some(e.to_string()) };
                if worst.as_ref().is_none_or(|w| e.code() > w.code()) {
                    worst = Some(e);
                }
                entry
            }
        };
        if format == ReportFormat::Text {
            match &entry.report {
                Some(r) => println!("{}: {}", entry.name, verify_line(r)),
                None => println!("{}: FAILED", entry.name),
            }
        }
        entries.push(entry);
    }
    if format == ReportFormat::Json {
        print_json(&entries);
    }
    match worst {
        Some(e) => Err(CliError::Batch(e.code())),
        None => Ok(()),
    }
}

fn stats(cnf: &Path, trace: &Path, format: ReportFormat) -> Result<(), CliError> {
    let f = read_cnf(cnf)?;
    let p = read_trace(trace, &f)?;
    verify_proof(&f, &p).map_err(|e| CliError::Verification(format!("{}: {e}", trace.display())))?;
    let s = proof_stats(&p).map_err(|e| CliError::Verification(e.to_string()))?;
    match format {
        ReportFormat::Json => print_json(&s),
        ReportFormat::Text => {
            println!("size={}", s.size);
            println!("height={}", s.height);
            match &s.regularity {
                Regularity::Regular => println!("regular=true"),
                Regularity::Irregular { var, path } => {
                    let path: Vec<String> = path.iter().map(|n| n.to_string()).collect();
                    println!("regular=false witness_var={var} witness_path={}", path.join(","));
                }
            }
            println!("duplicate_clauses={}", s.duplicate_clauses);
            for (id, max) in &s.input_irregularity {
                println!("input {id} max_irregularity={max}");
            }
        }
    }
    Ok(())
}

fn regularize_error(e: RegularizeError) -> CliError {
    match e {
        RegularizeError::InvalidInput(_) | RegularizeError::NotRefutation | RegularizeError::Prune(_) => {
            CliError::Verification(e.to_string())
        }
        _ => CliError::Internal(e.to_string()),
    }
}

fn restrict_error(e: RestrictError) -> CliError {
    match e {
        RestrictError::InvalidInput(_) | RestrictError::NotRefutation | RestrictError::Prune(_) => {
            CliError::Verification(e.to_string())
        }
        RestrictError::Internal { .. } => CliError::Internal(e.to_string()),
    }
}

fn regularize_cmd(
    cnf: &Path,
    trace: &Path,
    out_cnf: &Path,
    out_trace: &Path,
    format: ReportFormat,
) -> Result<(), CliError> {
    let f = read_cnf(cnf)?;
    let p = read_trace(trace, &f)?;
    let reg = regularize(&f, &p).map_err(regularize_error)?;
    check_refutation(&reg.formula, &reg.proof)?;
    let r = &reg.report;
    if !(r.regular && r.level_monotone && r.size_within_bound && r.height_within_bound) {
        return Err(CliError::Internal("regularized proof fails its guarantees".into()));
    }
    write(out_cnf, &write_dimacs(&reg.formula))?;
    write(out_trace, &write_trace(&reg.proof))?;
    match format {
        ReportFormat::Json => print_json(r),
        ReportFormat::Text => println!(
            "n={} h={} s={} size={} size_bound={} height={} height_bound={} regular={}",
            r.n, r.h, r.s, r.size, r.size_bound, r.height, r.height_bound, r.regular
        ),
    }
    Ok(())
}

fn deregularize(original: &Path, leveled: &Path, trace: &Path, output: &Path) -> Result<(), CliError> {
    let g = read_cnf(original)?;
    let f = read_cnf(leveled)?;
    let p = read_trace(trace, &f)?;
    let scheme = LevelScheme::from_counts(g.num_vars().max(1), f.num_vars()).ok_or_else(|| {
        CliError::Usage(format!(
            "{} has {} variables, not a multiple of the {} variables of {}",
            leveled.display(),
            f.num_vars(),
            g.num_vars(),
            original.display()
        ))
    })?;
    let expected = build_f(&g, scheme.h()).map_err(|e| CliError::Internal(e.to_string()))?;
    if !expected.same_clauses(&f) {
        return Err(CliError::Usage(format!(
            "{} is not f({}, {})",
            leveled.display(),
            original.display(),
            scheme.h()
        )));
    }
    let out = restrict_proof_with_vars(&f, &p, &canonical_sigma(&scheme), g.num_vars())
        .map_err(restrict_error)?;
    let report = check_refutation(&g, &out.proof)?;
    write(output, &write_trace(&out.proof))?;
    println!("size={} height={}", report.size, report.height);
    Ok(())
}

fn prove_dp(
    cnf: &Path,
    order: Option<Vec<u32>>,
    budget: Option<u64>,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    let f = read_cnf(cnf)?;
    let order = match order {
        Some(ids) => EliminationOrder::new(&ids, f.num_vars()).map_err(|e| CliError::Usage(e.to_string()))?,
        None => EliminationOrder::identity(f.num_vars()),
    };
    let run = dp_prove(&f, &order, budget).map_err(|e| CliError::Cap(e.to_string()))?;
    match run.outcome {
        DpOutcome::Refuted(proof) => {
            let report = check_refutation(&f, &proof)?;
            if !resreg_core::is_regular(&proof).is_regular() {
                return Err(CliError::Internal("elimination produced an irregular proof".into()));
            }
            if let Some(path) = &output {
                write(path, &write_trace(&proof))?;
            }
            println!("unsat size={} height={} steps={}", report.size, report.height, run.steps);
        }
        DpOutcome::Sat(model) => {
            if !f.evaluate(&model) {
                return Err(CliError::Internal("extended model does not satisfy the formula".into()));
            }
            println!("sat steps={} model={}", run.steps, model_line(&model.0));
        }
    }
    Ok(())
}

fn model_line(model: &[bool]) -> String {
    model
        .iter()
        .enumerate()
        .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
        .collect::<Vec<_>>()
        .join(" ")
}

fn oracle(query: OracleQuery, cnf: &Path, cap: Option<usize>, output: Option<PathBuf>) -> Result<(), CliError> {
    let f = read_cnf(cnf)?;
    match query {
        OracleQuery::Sat => {
            let cap = match cap {
                Some(c) => u32::try_from(c).unwrap_or(u32::MAX),
                None => env_cap(BRUTE_CAP_ENV, DEFAULT_BRUTE_CAP)?,
            };
            match brute_sat(&f, cap).map_err(|e| CliError::Cap(e.to_string()))? {
                SatResult::Sat(m) => println!("sat model={}", model_line(&m.0)),
                SatResult::Unsat => println!("unsat"),
            }
        }
        OracleQuery::MinSize => {
            let cap = match cap {
                Some(c) => c,
                None => env_cap(SIZE_CAP_ENV, DEFAULT_SIZE_CAP)?,
            };
            let s = min_size(&f, cap).map_err(|e| CliError::Cap(e.to_string()))?;
            println!("min_size={s}");
        }
        OracleQuery::MinHeight => {
            let cap = match cap {
                Some(c) => c,
                None => env_cap(HEIGHT_CAP_ENV, DEFAULT_HEIGHT_CAP)?,
            };
            let (h, proof) = min_height_witness(&f, cap).map_err(|e| CliError::Cap(e.to_string()))?;
            let report = check_refutation(&f, &proof)?;
            if report.height != h {
                return Err(CliError::Internal(format!(
                    "witness has height {} instead of {h}",
                    report.height
                )));
            }
            if let Some(path) = &output {
                write(path, &write_trace(&proof))?;
            }
            println!("min_height={h}");
        }
    }
    Ok(())
}

fn gen_corpus(seed: u64, count: usize, max_n: u32, max_size: usize, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    let width = count.max(1).to_string().len().max(4);
    let mut irregular = 0;
    for (i, entry) in corpus(seed, count, max_n, max_size).iter().enumerate() {
        check_refutation(&entry.formula, &entry.proof)?;
        if !resreg_core::is_regular(&entry.proof).is_regular() {
            irregular += 1;
        }
        let stem = dir.join(format!("{i:0width$}"));
        write(&stem.with_extension("cnf"), &write_dimacs(&entry.formula))?;
        write(&stem.with_extension("trace"), &write_trace(&entry.proof))?;
    }
    println!("wrote {count} pairs ({irregular} irregular) to {}", dir.display());
    Ok(())
}

fn automate(
    cnf: &Path,
    prover: ProverChoice,
    config: &AutomateConfig,
    output: Option<PathBuf>,
    format: ReportFormat,
) -> Result<(), CliError> {
    let f = read_cnf(cnf)?;
    let mut prover = match prover {
        ProverChoice::Dp => DpProver,
    };
    let report = automate_resolution(&f, &mut prover, config).map_err(|e| match e {
        AutomateError::RMaxReached { .. } => CliError::Cap(e.to_string()),
        AutomateError::Satisfiable { .. } => CliError::Verification(e.to_string()),
        _ => CliError::Internal(e.to_string()),
    })?;
    check_refutation(&f, &report.proof)?;
    if let Some(path) = &output {
        write(path, &write_trace(&report.proof))?;
    }
    match format {
        ReportFormat::Json => print_json(&report),
        ReportFormat::Text => println!(
            "r={} size={} height={} total_steps={} budget_sum={}",
            report.r, report.size, report.height, report.total_steps, report.budget_sum
        ),
    }
    Ok(())
}

