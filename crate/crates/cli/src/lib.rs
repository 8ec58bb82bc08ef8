//! `grsk-lab`: instance generation, verification suites and tableau dumps.

pub mod instance;
pub mod report;
pub mod suites;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use grsk_core::grsk;
use grsk_core::numerics::format_rational;
use grsk_core::PosRational;
use rayon::prelude::*;

use instance::{generate, GenParams, InstanceFile, Kind};
use report::{ReportFile, EXIT_FAIL, EXIT_MALFORMED, EXIT_PASS};
use suites::{run_suite, Settings, Suite};

#[derive(Debug, Parser)]
#[command(name = "grsk-lab", version, about = "Exact checks of polymer invariance, geometric RSK and their degenerations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Writes a seeded random instance file.
    Gen(GenArgs),
    /// Runs verification suites on instance files or on generated trials.
    Check(CheckArgs),
    /// Dumps the tableau of a positive matrix with its tau cross-check.
    Grsk(GrskArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 4)]
    pub width: usize,
    /// Interior breakpoints per level function (semi-discrete only).
    #[arg(long, default_value_t = 3)]
    pub breaks: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Instance files; when none are given, `--trials` instances are generated.
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 10)]
    pub trials: u64,
    /// Seed of the first generated trial; trial `i` uses `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 5)]
    pub width: usize,
    #[arg(long, default_value_t = 3)]
    pub breaks: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    pub beta_list: Vec<u32>,
    /// Largest candidate count the enumeration oracles accept.
    #[arg(long, env = "GRSK_LAB_MAX_ORACLE")]
    pub max_oracle: Option<u128>,
    /// Corrupts one transformed value or entry per suite.
    #[arg(long)]
    pub inject_fault: bool,
    /// Writes the JSON report here; `-` prints it instead of the text summary.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GrskArgs {
    /// JSON array of rows, or whitespace-separated rows of rationals.
    pub matrix: PathBuf,
    /// Fails unless the tableau equals the tau ratios entry by entry.
    #[arg(long)]
    pub verify: bool,
}

/// Runs a command, writing human output to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Check(a) => cmd_check(&a, out),
        Command::Grsk(a) => cmd_grsk(&a, out),
    };
    result.unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        EXIT_MALFORMED
    })
}

fn io_err(e: std::io::Error) -> String {
    e.to_string()
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<i32, String> {
    let params = GenParams { n: a.n, k: a.k, width: a.width, breaks: a.breaks };
    let file = generate(a.kind, params, a.seed).map_err(|e| e.to_string())?;
    match &a.out {
        Some(path) => std::fs::write(path, file.to_json()).map_err(io_err)?,
        None => out.write_all(file.to_json().as_bytes()).map_err(io_err)?,
    }
    Ok(EXIT_PASS)
}

/// The instances a check run covers, in input order.
pub fn check_inputs(a: &CheckArgs) -> Result<Vec<InstanceFile>, String> {
    if !a.files.is_empty() {
        return a
            .files
            .iter()
            .map(|p| {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                InstanceFile::parse(&text).map_err(|e| format!("{}: {e}", p.display()))
            })
            .collect();
    }
    let kinds = match a.suite.kind() {
        Some(k) => vec![k],
        None => vec![Kind::Discrete, Kind::Tropical, Kind::Semidiscrete],
    };
    let params = GenParams { n: a.n, k: a.k, width: a.width, breaks: a.breaks };
    let mut files = Vec::new();
    for kind in kinds {
        for i in 0..a.trials {
            files.push(generate(kind, params, a.seed + i).map_err(|e| e.to_string())?);
        }
    }
    Ok(files)
}

/// Runs `suite` on every file in parallel and assembles the report.
pub fn check_files(files: &[InstanceFile], suite: Suite, settings: &Settings) -> ReportFile {
    let records = files.par_iter().flat_map_iter(|f| run_suite(suite, f, settings)).collect();
    ReportFile::new(suite.name(), settings.tol, settings.inject_fault, records)
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32, String> {
    if let Some(bound) = a.max_oracle {
        std::env::set_var("GRSK_LAB_MAX_ORACLE", bound.to_string());
    }
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(format!("tolerance must be positive, got {}", a.tol));
    }
    let files = check_inputs(a)?;
    let settings = Settings { tol: a.tol, betas: a.beta_list.clone(), inject_fault: a.inject_fault };
    let report = check_files(&files, a.suite, &settings);
    match a.json.as_deref() {
        Some(p) if p.as_os_str() == "-" => out.write_all(report.to_json().as_bytes()).map_err(io_err)?,
        Some(p) => {
            std::fs::write(p, report.to_json()).map_err(io_err)?;
            out.write_all(report.to_text().as_bytes()).map_err(io_err)?;
        }
        None => out.write_all(report.to_text().as_bytes()).map_err(io_err)?,
    }
    Ok(report.exit_code)
}

/// Rows of a positive matrix from JSON (strings or numbers) or plain text.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<PosRational>>, String> {
    let cells: Vec<Vec<String>> = match serde_json::from_str::<Vec<Vec<serde_json::Value>>>(text) {
        Ok(rows) => rows
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.as_str().map(str::to_owned).unwrap_or_else(|| v.to_string())).collect())
            .collect(),
        Err(_) => text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(str::to_owned).collect())
            .collect(),
    };
    if cells.is_empty() {
        return Err("empty matrix".into());
    }
    cells
        .iter()
        .map(|r| r.iter().map(|s| s.parse::<PosRational>().map_err(|e| format!("entry {s:?}: {e}"))).collect())
        .collect()
}

fn cmd_grsk(a: &GrskArgs, out: &mut dyn Write) -> Result<i32, String> {
    let text = std::fs::read_to_string(&a.matrix).map_err(|e| format!("{}: {e}", a.matrix.display()))?;
    let rows = parse_matrix(&text)?;
    let p = grsk::p_tableau(&rows).map_err(|e| e.to_string())?;
    let q = grsk::q_tableau(&rows).map_err(|e| e.to_string())?;
    let n = rows.len();
    let mut text = String::new();
    text.push_str(&format!("z({n}), N = {}\n", p.width()));
    for l in 1..=p.depth() {
        let diag: Vec<String> = (l..=p.width()).map(|k| format!("z[{k},{l}]={}", p.z(k, l))).collect();
        text.push_str(&format!("  {}\n", diag.join(" ")));
    }
    let show = |s: &[PosRational]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    text.push_str(&format!("shape ({})\n", show(&p.shape())));
    text.push_str("Q\n");
    for (t, s) in q.iter().enumerate() {
        text.push_str(&format!("  sh z({}) = ({})\n", t + 1, show(s)));
    }
    text.push_str(&format!("{:>3} {:>3}  {:>16} {:>16} {:>12} {:>12}  match\n", "k", "l", "tau_{k,l}", "tau_{k,l-1}", "ratio", "z"));
    let mut all = true;
    for l in 1..=p.depth() {
        for k in l..=p.width() {
            let hi = grsk::tau_kl(&rows, n, k, l).map_err(|e| e.to_string())?;
            let lo = grsk::tau_kl(&rows, n, k, l - 1).map_err(|e| e.to_string())?;
            let ratio = &hi / &lo;
            let ok = ratio == *p.z(k, l).as_rational();
            all &= ok;
            text.push_str(&format!(
                "{k:>3} {l:>3}  {:>16} {:>16} {:>12} {:>12}  {}\n",
                format_rational(&hi),
                format_rational(&lo),
                format_rational(&ratio),
                p.z(k, l).to_string(),
                if ok { "yes" } else { "NO" }
            ));
        }
    }
    if a.verify {
        let verdict = grsk::compare_tableaux(&p, &grsk::z_from_tau(&rows).map_err(|e| e.to_string())?);
        text.push_str(&format!("verify: {}\n", if verdict.holds { "tableau equals tau ratios" } else { "MISMATCH" }));
        if let Some(c) = verdict.counterexample {
            text.push_str(&format!("  {c}\n"));
        }
        all &= verdict.holds;
    }
    out.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(if a.verify && !all { EXIT_FAIL } else { EXIT_PASS })
}
