//! Command-line surface: argument parsing, the five verbs, batch files and
//! report output.
//!
//! Exit codes: 0 success, 2 hypothesis failure (or an undefined Euler
//! characteristic in `lambda`), 3 input error.

pub mod cache;
pub mod report;
pub mod schema;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_curve, Direct, LocalSource};
use crate::arith::{is_probable_prime, PPower};
use crate::curve_model::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::euler_characteristic::{
    check_hypotheses, euler_char, lambda_euler_char, FieldLocalData, LambdaSeries, SignVector,
};
use crate::global_invariants::TorsionVerdict;
use crate::local_analysis::ReductionType;

pub use cache::{Cache, CacheEntry, CACHE_DIR_ENV};
pub use report::{AnalysisReport, InputEcho};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "signed-euler", version, about = "Euler characteristics of signed Selmer groups of elliptic curves")]
struct Cli {
    /// Cache directory for local data (overrides SIGNED_EULER_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Disable the local data cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full pipeline for a curve over Q at a prime p.
    Analyze {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long)]
        p: u64,
        /// One sign per supersingular prime, e.g. "-" or "+".
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        /// p-part of |Sha(E/Q)| as a decimal power of p.
        #[arg(long)]
        sha_p: Option<String>,
        #[arg(long)]
        assert_selmer_finite: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Assemble the formula even if a hypothesis fails.
        #[arg(long)]
        override_hypotheses: bool,
    },
    /// Local data at a single prime q.
    Local {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Analyze every row of a CSV file: label,a1,a2,a3,a4,a6[,sha_p].
    Batch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        assert_selmer_finite: bool,
    },
    /// Hypothesis check and formula assembly on user-supplied local data.
    Field {
        #[arg(long)]
        local_data: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        override_hypotheses: bool,
    },
    /// Euler characteristic p^{v_p(f(0))} of a characteristic series f.
    Lambda {
        #[arg(long)]
        p: u64,
        /// Coefficients f_0,f_1,... of f(T).
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        precision: Option<u32>,
    },
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::HypothesisFailure(_) | Error::NonFiniteInvariants | Error::PrecisionExhausted(_) => {
            EXIT_HYPOTHESIS
        }
        _ => EXIT_INPUT,
    }
}

/// Run the CLI on `args` (program name first) and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_INPUT
                    } else {
                        EXIT_OK
                    }
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INPUT
                }
            };
        }
    };
    let cache = if cli.no_cache {
        None
    } else {
        cli.cache_dir.clone().or_else(cache::default_dir).map(Cache::new)
    };
    let source: &dyn LocalSource = match &cache {
        Some(c) => c,
        None => &Direct,
    };
    match dispatch(cli.command, source, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, source: &dyn LocalSource, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Analyze { curve, p, signs, sha_p, assert_selmer_finite, format, override_hypotheses } => {
            let c: WeierstrassCurve = curve.parse()?;
            let sha = sha_p.map(|s| PPower::parse_decimal(&s, p)).transpose()?;
            let signs = signs.map(|s| s.parse::<SignVector>()).transpose()?;
            let (report, code) =
                analyze_report(&c, None, p, sha, signs, assert_selmer_finite, override_hypotheses, source)?;
            for w in &report.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            if let Some(f) = &report.failure {
                let _ = writeln!(err, "hypothesis failure: {f}");
            }
            emit(out, &report, format);
            Ok(code)
        }
        Command::Local { curve, q, p, format } => {
            let c: WeierstrassCurve = curve.parse()?;
            let q: BigUint = q
                .trim()
                .parse()
                .map_err(|_| Error::UnsupportedPrime(format!("{q} is not a positive integer")))?;
            if !is_probable_prime(&q) {
                return Err(Error::UnsupportedPrime(format!("{q} is not prime")));
            }
            if let Some(p) = p {
                check_p(p)?;
            }
            let l = source.local(&crate::curve_model::minimal_model(&c)?.0, &q)?;
            match format {
                Format::Json => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&l).expect("serializes"));
                }
                Format::Table => {
                    let _ = write!(out, "{}", report::render_local(&l, p));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Batch { input, p, output, jobs, assert_selmer_finite } => {
            check_p(p)?;
            let text = fs::read_to_string(&input)
                .map_err(|e| Error::Schema(format!("cannot read {}: {e}", input.display())))?;
            let batch = run_batch(&text, p, assert_selmer_finite, jobs, source)?;
            let mut json = serde_json::to_string_pretty(&batch).expect("serializes");
            json.push('\n');
            fs::write(&output, json)
                .map_err(|e| Error::Schema(format!("cannot write {}: {e}", output.display())))?;
            for s in &batch.skipped {
                let _ = writeln!(err, "skipped row {}: {}", s.row, s.reason);
            }
            let sm = &batch.summary;
            let _ = writeln!(out, "pass {}  fail {}  skipped {}", sm.pass, sm.fail, sm.skipped);
            Ok(EXIT_OK)
        }
        Command::Field { local_data, p, signs, format, override_hypotheses } => {
            check_p(p)?;
            let text = fs::read_to_string(&local_data)
                .map_err(|e| Error::Schema(format!("cannot read {}: {e}", local_data.display())))?;
            let data: FieldLocalData =
                serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
            if data.p != p {
                return Err(Error::Schema(format!("--p {p} does not match p = {} in the data", data.p)));
            }
            let signs = signs.map(|s| s.parse::<SignVector>()).transpose()?;
            let (report, code) = field_report(data, signs, override_hypotheses)?;
            for w in &report.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            if let Some(f) = &report.failure {
                let _ = writeln!(err, "hypothesis failure: {f}");
            }
            emit(out, &report, format);
            Ok(code)
        }
        Command::Lambda { p, coeffs, precision } => {
            let cs = coeffs
                .split(',')
                .map(|t| t.trim().parse::<BigInt>().map_err(|_| Error::NonRational(t.to_string())))
                .collect::<Result<Vec<_>>>()?;
            let f = LambdaSeries::new(p, cs, precision)?;
            let chi = lambda_euler_char(&f)?;
            let _ = writeln!(out, "chi = {chi}");
            Ok(EXIT_OK)
        }
    }
}

fn check_p(p: u64) -> Result<()> {
    if p == 2 || !crate::arith::is_prime_u64(p) {
        return Err(Error::EvenOrCompositeP(p.to_string()));
    }
    Ok(())
}

fn emit(out: &mut dyn Write, report: &AnalysisReport, format: Format) {
    let _ = match format {
        Format::Json => writeln!(out, "{}", report.to_json()),
        Format::Table => write!(out, "{}", report.render_table()),
    };
}

fn default_signs(data: &FieldLocalData, signs: Option<SignVector>, warnings: &mut Vec<String>) -> (SignVector, bool) {
    match signs {
        Some(s) => (s, false),
        None => {
            let r = data.supersingular_count();
            if r > 0 {
                warnings.push(format!("no --signs given; using the all-minus vector of length {r}"));
            }
            (SignVector::all_minus(r), true)
        }
    }
}

/// Full pipeline over Q. Returns the report and exit code 0 or 2.
#[allow(clippy::too_many_arguments)]
pub fn analyze_report(
    c: &WeierstrassCurve,
    label: Option<String>,
    p: u64,
    sha: Option<PPower>,
    signs: Option<SignVector>,
    selmer_finite: bool,
    override_hypotheses: bool,
    source: &dyn LocalSource,
) -> Result<(AnalysisReport, i32)> {
    check_p(p)?;
    let mut warnings = Vec::new();
    let sha_defaulted = sha.is_none();
    if sha_defaulted {
        warnings.push(format!("no --sha-p given; assuming |Sha(E/Q)({p})| = 1"));
    }
    let sha = sha.unwrap_or(PPower::one(p));
    let analysis = analyze_curve(c, p, sha, selmer_finite, source)?;
    let data = analysis.field_data.clone();
    let (signs, signs_defaulted) = default_signs(&data, signs, &mut warnings);

    let at_p = &data.primes_above_p[0];
    let torsion_check = if at_p.reduction == ReductionType::GoodSupersingular && at_p.a == Some(0) {
        if data.torsion_p_part.is_one() {
            TorsionVerdict::Consistent { vacuous: false }
        } else {
            TorsionVerdict::Inconsistent { torsion_p_part: data.torsion_p_part, a_p: 0 }
        }
    } else {
        TorsionVerdict::Consistent { vacuous: true }
    };
    if !torsion_check.is_consistent() {
        warnings.push("torsion p-part is nontrivial at a supersingular prime with a_p = 0".into());
    }

    let hypotheses = check_hypotheses(&data, &signs)?;
    let (result, failure, code) = assemble(&data, &signs, override_hypotheses)?;
    let report = AnalysisReport {
        tool_version: TOOL_VERSION.to_string(),
        label: label.or_else(|| c.label.clone()),
        curve: Some(c.coefficients_string()),
        minimal_model: Some(analysis.minimal_model),
        p,
        local: analysis.local,
        torsion: Some(analysis.torsion),
        torsion_check: Some(torsion_check),
        field_data: data,
        hypotheses,
        result,
        failure,
        input: InputEcho {
            sha_p_order: sha,
            sha_defaulted,
            selmer_finite_asserted: selmer_finite,
            signs,
            signs_defaulted,
            override_hypotheses,
        },
        warnings,
    };
    Ok((report, code))
}

type Assembled = (Option<crate::euler_characteristic::EulerCharResult>, Option<String>, i32);

fn assemble(data: &FieldLocalData, signs: &SignVector, override_hypotheses: bool) -> Result<Assembled> {
    match euler_char(data, signs, override_hypotheses) {
        Ok(r) => Ok((Some(r), None, EXIT_OK)),
        Err(Error::HypothesisFailure(rep)) => Ok((None, Some(rep.failure_summary()), EXIT_HYPOTHESIS)),
        Err(e) => Err(e),
    }
}

/// Hypothesis check and assembly on supplied data only.
pub fn field_report(
    data: FieldLocalData,
    signs: Option<SignVector>,
    override_hypotheses: bool,
) -> Result<(AnalysisReport, i32)> {
    let mut warnings = Vec::new();
    let (signs, signs_defaulted) = default_signs(&data, signs, &mut warnings);
    let hypotheses = check_hypotheses(&data, &signs)?;
    let (result, failure, code) = assemble(&data, &signs, override_hypotheses)?;
    let report = AnalysisReport {
        tool_version: TOOL_VERSION.to_string(),
        label: None,
        curve: None,
        minimal_model: None,
        p: data.p,
        local: Vec::new(),
        torsion: None,
        torsion_check: None,
        input: InputEcho {
            sha_p_order: data.sha_p_order,
            sha_defaulted: false,
            selmer_finite_asserted: data.selmer_finite,
            signs,
            signs_defaulted,
            override_hypotheses,
        },
        field_data: data,
        hypotheses,
        result,
        failure,
        warnings,
    };
    Ok((report, code))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchRow {
    pub row: usize,
    pub label: String,
    pub status: RowStatus,
    pub report: AnalysisReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedRow {
    pub row: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchOutput {
    pub tool_version: String,
    pub p: u64,
    pub reports: Vec<BatchRow>,
    pub skipped: Vec<SkippedRow>,
    pub summary: BatchSummary,
}

struct ParsedRow {
    row: usize,
    label: String,
    curve: WeierstrassCurve,
    sha: Option<PPower>,
}

fn parse_row(record: &csv::StringRecord, row: usize, p: u64) -> std::result::Result<ParsedRow, String> {
    if record.len() != 6 && record.len() != 7 {
        return Err(format!("expected 6 or 7 columns, found {}", record.len()));
    }
    let label = record[0].to_string();
    let coeffs = (1..6).map(|i| &record[i]).collect::<Vec<_>>().join(",");
    let curve: WeierstrassCurve = coeffs.parse().map_err(|e: Error| e.to_string())?;
    let sha = match record.get(6).map(str::trim) {
        None | Some("") => None,
        Some(s) => Some(PPower::parse_decimal(s, p).map_err(|e| e.to_string())?),
    };
    Ok(ParsedRow { row, label, curve, sha })
}

/// Analyze every CSV row; output is ordered by input row whatever the thread count.
pub fn run_batch(
    csv_text: &str,
    p: u64,
    selmer_finite: bool,
    jobs: Option<usize>,
    source: &dyn LocalSource,
) -> Result<BatchOutput> {
    check_p(p)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(csv_text.as_bytes());
    let mut parsed = Vec::new();
    let mut skipped = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        match rec {
            Ok(r) if row == 1 && r.get(0).is_some_and(|f| f.eq_ignore_ascii_case("label")) => {}
            Ok(r) => match parse_row(&r, row, p) {
                Ok(pr) => parsed.push(pr),
                Err(reason) => skipped.push(SkippedRow { row, reason }),
            },
            Err(e) => skipped.push(SkippedRow { row, reason: e.to_string() }),
        }
    }

    let work = |pr: &ParsedRow| {
        analyze_report(&pr.curve, Some(pr.label.clone()), p, pr.sha, None, selmer_finite, false, source)
    };
    let results: Vec<Result<(AnalysisReport, i32)>> = match jobs {
        Some(1) => parsed.iter().map(work).collect(),
        _ => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.unwrap_or(0))
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?;
            pool.install(|| parsed.par_iter().map(work).collect())
        }
    };

    let mut reports = Vec::new();
    for (pr, res) in parsed.iter().zip(results) {
        match res {
            Ok((report, code)) => reports.push(BatchRow {
                row: pr.row,
                label: pr.label.clone(),
                status: if code == EXIT_OK { RowStatus::Pass } else { RowStatus::Fail },
                report,
            }),
            Err(e) => skipped.push(SkippedRow { row: pr.row, reason: e.to_string() }),
        }
    }
    skipped.sort_by_key(|s| s.row);
    let summary = BatchSummary {
        pass: reports.iter().filter(|r| r.status == RowStatus::Pass).count(),
        fail: reports.iter().filter(|r| r.status == RowStatus::Fail).count(),
        skipped: skipped.len(),
    };
    Ok(BatchOutput { tool_version: TOOL_VERSION.to_string(), p, reports, skipped, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["signed-euler", "--no-cache"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn analyze_exit_codes() {
        let (code, out, _) = run_args(&[
            "analyze", "--curve", "0,0,0,-1,0", "--p", "7", "--signs", "-", "--sha-p", "1",
            "--assert-selmer-finite",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("chi"));
        assert_eq!(run_args(&["analyze", "--curve", "0,0,0,-1,0", "--p", "4"]).0, 3);
        let (code, out, _) = run_args(&["analyze", "--curve", "0,0,0,2,1", "--p", "3", "--signs", "-"]);
        assert_eq!(code, 2);
        assert!(out.contains("S2") && out.contains("FAIL"));
    }

    #[test]
    fn bad_flags_are_input_errors() {
        assert_eq!(run_args(&["analyze", "--p", "7"]).0, 3);
        assert_eq!(run_args(&["frobnicate"]).0, 3);
        assert_eq!(run_args(&["--help"]).0, 0);
        assert_eq!(run_args(&["analyze", "--curve", "1,2", "--p", "7"]).0, 3);
    }

    #[test]
    fn local_verb() {
        let (code, out, _) = run_args(&["local", "--curve", "0,-1,1,-10,-20", "--q", "11"]);
        assert_eq!(code, 0);
        assert!(out.contains("I5") && out.contains("split_multiplicative"));
        let (code, out, _) = run_args(&["local", "--curve", "0,0,0,-1,0", "--q", "2", "--p", "7"]);
        assert_eq!(code, 0);
        assert!(out.contains("c^(7)") && out.lines().any(|l| l.starts_with("c^(7)") && l.ends_with(" 1")));
        assert_eq!(run_args(&["local", "--curve", "0,0,0,-1,0", "--q", "15"]).0, 3);
    }

    #[test]
    fn lambda_verb() {
        assert_eq!(run_args(&["lambda", "--p", "5", "--coeffs", "25,5,1"]).1.trim(), "chi = 25");
        assert_eq!(run_args(&["lambda", "--p", "5", "--coeffs", "0,1"]).0, 2);
        assert_eq!(run_args(&["lambda", "--p", "5", "--coeffs", "0,0"]).0, 3);
    }

    #[test]
    fn batch_isolates_bad_rows() {
        let csv = "label,a1,a2,a3,a4,a6\n11a1,0,-1,1,-10,-20\nbroken,0,0,0,0,0\n37a1,0,0,1,-1,0\n";
        let out = run_batch(csv, 5, true, Some(2), &Direct).unwrap();
        assert_eq!(out.reports.len(), 2);
        assert_eq!(out.summary.skipped, 1);
        assert_eq!(out.reports[0].label, "11a1");
        assert_eq!(out.reports[1].label, "37a1");
    }
}
