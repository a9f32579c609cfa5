//! The `codebook` command line.
//!
//! Exit codes: 0 on success, 1 when a check fails or output cannot be
//! written, 2 on invalid usage.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::codebook::{
    build_codebook, classify, compute_imax, levenshtein_bound, parameters, predicted_imax,
    scan_work, welch_bound, Codebook, CodebookReport, ScanOptions, DEFAULT_SCAN_BUDGET,
    MAX_CODEBOOK_ENTRIES,
};
use crate::error::Error;
use crate::field::prime_power;
use crate::sums::{
    verify_all, Shape, Tower, Variant, Verification, VerifyOptions, DEFAULT_TOLERANCE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "codebook",
    version,
    about = "Codebooks from generalized Jacobi sums over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print N, K, I_max, the Welch bound and their ratio for a list of q.
    Table(TableArgs),
    /// Check every character sum of a tower against its closed form, then
    /// the codebook's I_max against the predicted value.
    Verify(VerifyArgs),
    /// Write a codebook as JSON or CSV.
    Gen(GenArgs),
    /// Print the Welch and Levenshtein bounds for N and K.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct TowerArgs {
    /// Characteristic of the base field.
    #[arg(long)]
    p: u32,
    /// Degree of the base field over F_p, so q = p^m.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Extension degrees m_1,...,m_k over F_q.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    ext: Vec<u32>,
    #[arg(long, default_value = "hat")]
    variant: Variant,
    /// Index i selecting a = g^i for the generator g of F_q.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    a: i64,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value = "hat")]
    variant: Variant,
    /// Base field orders.
    #[arg(long = "q-list", value_delimiter = ',', required = true, num_args = 1..)]
    q_list: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2", num_args = 1..)]
    ext: Vec<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest I_max scan, in complex multiply-adds, before falling back to
    /// the predicted value.
    #[arg(long, default_value_t = DEFAULT_SCAN_BUDGET)]
    budget: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    tower: TowerArgs,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Limit for both the character-sum work and the I_max scan.
    #[arg(long, default_value_t = DEFAULT_SCAN_BUDGET)]
    budget: u128,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    tower: TowerArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    n: u64,
    k: u64,
}

/// Outcome of a subcommand that got past argument parsing.
enum Failure {
    Usage(String),
    Check,
    Output(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Output(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the command line `args` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Table(args) => with_output(args.out.clone(), out, |w| table(&args, w, err)),
        Command::Verify(args) => with_output(args.out.clone(), out, |w| verify(&args, w)),
        Command::Gen(args) => with_output(args.out.clone(), out, |w| generate(&args, w)),
        Command::Bounds(args) => bounds(&args, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Check) => EXIT_FAILURE,
        Err(Failure::Output(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn with_output(
    path: Option<PathBuf>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Outcome,
) -> Outcome {
    match path {
        None => body(stdout),
        Some(path) => {
            let file = File::create(&path)
                .map_err(|e| Failure::Output(format!("cannot write {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()
                .map_err(|e| Failure::Output(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn usage(e: Error) -> Failure {
    match e {
        Error::NotPrime(_) => Failure::Usage("p must be prime".into()),
        other => Failure::Usage(other.to_string()),
    }
}

/// The tower and a = g^index from the parsed arguments.
fn build_tower(
    args: &TowerArgs,
) -> std::result::Result<(Tower, crate::field::FieldElement), Failure> {
    if args.m == 0 {
        return Err(Failure::Usage("m must be positive".into()));
    }
    let tower = Tower::new(args.p, args.m, &args.ext).map_err(usage)?;
    let a = tower.base_element_from_index(args.a).map_err(usage)?;
    Ok((tower, a))
}

fn a_index(tower: &Tower, index: i64) -> i64 {
    index.rem_euclid(tower.base().group_order() as i64)
}

#[derive(Serialize)]
struct TableRow {
    q: u64,
    #[serde(rename = "N")]
    n: Option<u64>,
    #[serde(rename = "K")]
    k: Option<u64>,
    imax: Option<f64>,
    welch: Option<f64>,
    ratio: Option<f64>,
    /// "measured" or "predicted".
    source: Option<&'static str>,
    error: Option<String>,
}

impl TableRow {
    fn error(q: u64, msg: String) -> Self {
        Self {
            q,
            n: None,
            k: None,
            imax: None,
            welch: None,
            ratio: None,
            source: None,
            error: Some(msg),
        }
    }
}

fn table_row(q: u64, ext: &[u32], variant: Variant, budget: u128) -> TableRow {
    let Some((p, m)) = prime_power(q) else {
        return TableRow::error(q, format!("{q} is not a prime power"));
    };
    if (q as f64).powf(ext.iter().sum::<u32>() as f64) > 1e30 {
        return TableRow::error(q, "parameters are too large to tabulate".into());
    }
    let shape = Shape::new(q, ext);
    let (n, k) = parameters(&shape, variant);
    let measurable = n * k <= MAX_CODEBOOK_ENTRIES && scan_work(n, k) <= budget;
    let measured = if measurable {
        let result = Tower::new(p, m, ext).and_then(|tower| {
            let a = tower.base().generator();
            let cb = build_codebook(&tower, variant, a)?;
            let scan = ScanOptions {
                budget,
                ..ScanOptions::from_env()
            };
            compute_imax(&cb, &scan)
        });
        match result {
            Ok(imax) => Some(imax.value),
            Err(e) => return TableRow::error(q, e.to_string()),
        }
    } else {
        None
    };
    match classify(&shape, variant, measured) {
        Ok(report) => TableRow {
            q,
            n: Some(report.n),
            k: Some(report.k),
            imax: Some(report.imax()),
            welch: Some(report.welch),
            ratio: Some(report.ratio_welch),
            source: Some(if measured.is_some() {
                "measured"
            } else {
                "predicted"
            }),
            error: None,
        },
        Err(e) => TableRow::error(q, e.to_string()),
    }
}

fn table(args: &TableArgs, w: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if args.ext.is_empty() || args.ext.contains(&0) {
        return Err(Failure::Usage("extension degrees must be positive".into()));
    }
    let rows: Vec<TableRow> = args
        .q_list
        .iter()
        .map(|&q| table_row(q, &args.ext, args.variant, args.budget))
        .collect();

    match args.format {
        Format::Text => {
            writeln!(
                w,
                "{:>5} {:>9} {:>7} {:>10} {:>10} {:>10}  source",
                "q", "N", "K", "I_max", "I_W", "I_W/I_max"
            )?;
            for r in &rows {
                match &r.error {
                    Some(msg) => writeln!(w, "{:>5}  error: {msg}", r.q)?,
                    None => writeln!(
                        w,
                        "{:>5} {:>9} {:>7} {:>10.6} {:>10.6} {:>10.6}  {}",
                        r.q,
                        r.n.unwrap(),
                        r.k.unwrap(),
                        r.imax.unwrap(),
                        r.welch.unwrap(),
                        r.ratio.unwrap(),
                        r.source.unwrap()
                    )?,
                }
            }
        }
        Format::Csv => {
            writeln!(w, "q,N,K,I_max,I_W,ratio,source,error")?;
            for r in &rows {
                match &r.error {
                    Some(msg) => writeln!(w, "{},,,,,,,\"{}\"", r.q, msg.replace('"', "\"\""))?,
                    None => writeln!(
                        w,
                        "{},{},{},{:.6},{:.6},{:.6},{},",
                        r.q,
                        r.n.unwrap(),
                        r.k.unwrap(),
                        r.imax.unwrap(),
                        r.welch.unwrap(),
                        r.ratio.unwrap(),
                        r.source.unwrap()
                    )?,
                }
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, &rows).map_err(io::Error::from)?;
            writeln!(w)?;
        }
    }

    let failed: Vec<&TableRow> = rows.iter().filter(|r| r.error.is_some()).collect();
    for r in &failed {
        let _ = writeln!(
            err,
            "error: q = {}: {}",
            r.q,
            r.error.as_deref().unwrap_or("")
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[derive(Serialize)]
struct ImaxCheck {
    measured: Option<f64>,
    pair: Option<(usize, usize)>,
    predicted: Option<f64>,
    matches_prediction: Option<bool>,
    above_welch: Option<bool>,
    skipped: Option<String>,
    report: Option<CodebookReport>,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    p: u32,
    m: u32,
    ext_degrees: Vec<u32>,
    variant: Variant,
    a: i64,
    tolerance: f64,
    characters: &'a Verification,
    codebook: &'a ImaxCheck,
    passed: bool,
}

fn fmt_exponents(t: &[u32]) -> String {
    let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn check_imax(
    tower: &Tower,
    variant: Variant,
    a: crate::field::FieldElement,
    tol: f64,
    budget: u128,
) -> ImaxCheck {
    let shape = tower.shape();
    let predicted = predicted_imax(&shape, variant).ok();
    let (n, k) = parameters(&shape, variant);
    let skipped = |reason: String| ImaxCheck {
        measured: None,
        pair: None,
        predicted,
        matches_prediction: None,
        above_welch: None,
        skipped: Some(reason),
        report: None,
    };
    if n * k > MAX_CODEBOOK_ENTRIES {
        return skipped(format!("N*K = {} exceeds {MAX_CODEBOOK_ENTRIES}", n * k));
    }
    if scan_work(n, k) > budget {
        return skipped(format!(
            "scan needs {} multiply-adds, budget {budget}",
            scan_work(n, k)
        ));
    }
    let scan = ScanOptions {
        budget,
        ..ScanOptions::from_env()
    };
    let measured = match build_codebook(tower, variant, a).and_then(|cb| compute_imax(&cb, &scan)) {
        Ok(m) => m,
        Err(e) => return skipped(e.to_string()),
    };
    let report = classify(&shape, variant, Some(measured.value)).ok();
    ImaxCheck {
        measured: Some(measured.value),
        pair: Some(measured.pair),
        predicted,
        matches_prediction: predicted.map(|p| (measured.value - p).abs() <= tol),
        above_welch: report.as_ref().map(|r| measured.value >= r.welch - 1e-12),
        skipped: None,
        report,
    }
}

fn verify(args: &VerifyArgs, w: &mut dyn Write) -> Outcome {
    if args.format == Format::Csv {
        return Err(Failure::Usage(
            "verify supports --format text or json".into(),
        ));
    }
    let (tower, a) = build_tower(&args.tower)?;
    if args.tol.is_nan() || args.tol < 0.0 {
        return Err(Failure::Usage("tolerance must be non-negative".into()));
    }
    let options = VerifyOptions {
        tolerance: args.tol,
        budget: args.budget,
    };
    let verification = verify_all(&tower, a, &options).map_err(|e| match e {
        Error::BudgetExceeded { required, budget } => Failure::Usage(format!(
            "verification needs {required} character products, over the budget of {budget}; raise --budget"
        )),
        other => usage(other),
    })?;
    let variant = args.tower.variant;
    let imax = check_imax(&tower, variant, a, args.tol, args.budget);
    let passed = verification.all_passed()
        && imax.matches_prediction != Some(false)
        && imax.above_welch != Some(false);

    match args.format {
        Format::Json => {
            let doc = VerifyOutput {
                p: tower.characteristic(),
                m: tower.base_degree(),
                ext_degrees: tower.ext_degrees(),
                variant,
                a: a_index(&tower, args.tower.a),
                tolerance: args.tol,
                characters: &verification,
                codebook: &imax,
                passed,
            };
            serde_json::to_writer_pretty(&mut *w, &doc).map_err(io::Error::from)?;
            writeln!(w)?;
        }
        Format::Text => write_verify_text(w, &verification, &imax)?,
        Format::Csv => unreachable!("rejected before verification"),
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn write_verify_text(w: &mut dyn Write, v: &Verification, imax: &ImaxCheck) -> io::Result<()> {
    for r in &v.reports {
        let mut line = format!("t={}", fmt_exponents(&r.exponents));
        if let Some(hat) = &r.hat {
            line += &format!(
                "  hat |J|={:.6} expect {:.6} [{}]",
                hat.value.norm(),
                hat.predicted.unwrap_or(f64::NAN),
                hat.case
            );
        }
        match r.tilde.predicted {
            Some(p) => {
                line += &format!(
                    "  tilde |J|={:.6} expect {:.6} [{}]",
                    r.tilde.value.norm(),
                    p,
                    r.tilde.case
                )
            }
            None => line += &format!("  tilde |J|={:.6}", r.tilde.value.norm()),
        }
        if let Some(rel) = &r.relation {
            line += &format!("  relation dev {:.1e}", rel.deviation);
        }
        line += if r.passed { "  ok" } else { "  FAIL" };
        writeln!(w, "{line}")?;
    }
    if let Some(report) = &imax.report {
        writeln!(
            w,
            "codebook N={} K={} I_W={:.6} I_W/I_max={:.6} {}",
            report.n, report.k, report.welch, report.ratio_welch, report.classification
        )?;
    }
    let imax_text = match (imax.measured, imax.predicted, &imax.skipped) {
        (Some(m), Some(_), _) if imax.matches_prediction == Some(true) => {
            format!("I_max measured {m:.6} = predicted")
        }
        (Some(m), Some(p), _) => format!("I_max measured {m:.6} != predicted {p:.6}"),
        (Some(m), None, _) => {
            format!("I_max measured {m:.6}, no prediction (theorem needs q >= 4)")
        }
        (None, _, Some(reason)) => format!("I_max scan skipped: {reason}"),
        (None, _, None) => "I_max not computed".to_string(),
    };
    writeln!(
        w,
        "{}/{} character tuples pass; {imax_text}",
        v.passed, v.total
    )?;
    if imax.above_welch == Some(false) {
        writeln!(w, "I_max is below the Welch bound")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GenOutput<'a> {
    p: u32,
    m: u32,
    ext_degrees: &'a [u32],
    variant: Variant,
    a: i64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

fn generate(args: &GenArgs, w: &mut dyn Write) -> Outcome {
    if args.format == Format::Text {
        return Err(Failure::Usage("gen supports --format json or csv".into()));
    }
    let (tower, a) = build_tower(&args.tower)?;
    let cb = build_codebook(&tower, args.tower.variant, a).map_err(usage)?;
    match args.format {
        Format::Json => write_json(w, &tower, args, &cb)?,
        _ => write_csv(w, &cb)?,
    }
    Ok(())
}

fn write_json(w: &mut dyn Write, tower: &Tower, args: &GenArgs, cb: &Codebook) -> io::Result<()> {
    let doc = GenOutput {
        p: tower.characteristic(),
        m: tower.base_degree(),
        ext_degrees: &args.tower.ext,
        variant: args.tower.variant,
        a: a_index(tower, args.tower.a),
        n: cb.n(),
        k: cb.k(),
        rows: cb
            .rows()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    serde_json::to_writer(&mut *w, &doc)?;
    writeln!(w)
}

fn write_csv(w: &mut dyn Write, cb: &Codebook) -> io::Result<()> {
    writeln!(w, "row,col,re,im")?;
    for (i, row) in cb.rows().enumerate() {
        for (j, z) in row.iter().enumerate() {
            writeln!(w, "{i},{j},{:?},{:?}", z.re, z.im)?;
        }
    }
    Ok(())
}

fn bounds(args: &BoundsArgs, w: &mut dyn Write) -> Outcome {
    let (n, k) = (args.n, args.k);
    if n == 0 || k == 0 {
        return Err(Failure::Usage("N and K must be positive".into()));
    }
    writeln!(w, "N = {n}, K = {k}")?;
    match welch_bound(n, k) {
        Ok(v) => writeln!(w, "I_W = {v:.6}")?,
        Err(_) if n < k => writeln!(w, "I_W not applicable (N < K)")?,
        Err(_) => writeln!(w, "I_W not applicable (N < 2)")?,
    }
    match levenshtein_bound(n, k, false) {
        Some(v) => writeln!(w, "I_L complex = {v:.6}")?,
        None => writeln!(w, "I_L complex not applicable (N ≤ K²)")?,
    }
    match levenshtein_bound(n, k, true) {
        Some(v) => writeln!(w, "I_L real = {v:.6}")?,
        None => writeln!(w, "I_L real not applicable (N ≤ K(K+1)/2)")?,
    }
    Ok(())
}
