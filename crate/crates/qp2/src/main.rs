//! The `qp2` command-line tool: classify dimensions, reproduce the census
//! tables, and inspect the underlying arithmetic.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data verification
//! failures (bad factor files, failing certificates).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use qp2_core::bernoulli::BernoulliCtx;
use qp2_core::error::Error;
use qp2_core::genus::{check_theorem31, hattori_stong_full_check, BRUTE_FORCE_MAX_K};
use qp2_core::projspace::derive;
use qp2_core::qrsolve::{build_equation, shape_of};
use qp2_core::spin::{spin_classify, SpinVerdict};

use qp2::files::{bernoulli_cache_path, preload_cache_file, write_cache_file};
use qp2::report::{
    shape_string, verdict_json, verdict_text, verdicts_json, verdicts_markdown, verdicts_tsv,
    Format,
};
use qp2::runner::{build_context, classify_one, classify_range_parallel, BuildOptions};
use qp2::tables::{
    families_json, families_markdown, families_table, families_text, families_tsv,
    survivors_json, survivors_markdown, survivors_table, survivors_text, survivors_tsv,
};

#[derive(Parser)]
#[command(
    name = "qp2",
    version,
    about = "Decide, dimension by dimension, whether a rational projective plane exists",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scan numerator primes = +-3 (mod 8) up to this bound
    #[arg(long, global = true, value_name = "BOUND")]
    scan_bound: Option<u64>,

    /// Load a verified factor-record file (repeatable)
    #[arg(long = "factors", global = true, value_name = "FILE")]
    factors: Vec<PathBuf>,

    /// Largest index computed by exact Bernoulli arithmetic
    #[arg(long, global = true, value_name = "N")]
    exact_limit: Option<u64>,

    /// Render the report as JSON
    #[arg(long, global = true)]
    json: bool,

    /// Render the report as a Markdown table
    #[arg(long, global = true)]
    markdown: bool,

    /// Render the report as tab-separated values
    #[arg(long, global = true)]
    tsv: bool,

    /// Worker threads for ranged runs (default: available parallelism)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one dimension
    Classify {
        /// Dimension to classify
        n: u64,
    },
    /// Classify every multiple of 4 in [LO, HI]
    Range { lo: u64, hi: u64 },
    /// Dimensions 256 < n <= 8192 of two-power shape that survive the
    /// residue test, with their obstructing primes
    Table1,
    /// Residue families of the first thirteen irregular primes = +-3 (mod 8)
    Table2,
    /// The divided Bernoulli number B_N/N exactly, or modulo a prime
    Bernoulli {
        /// Even index
        n: u64,
        /// Report the residue modulo this odd prime instead
        #[arg(long = "mod", value_name = "P")]
        modulus: Option<u64>,
    },
    /// The quadratic congruence deciding dimension N = 8k
    Equation { n: u64 },
    /// Check candidate certificate data (x, y) for dimension N = 8k
    VerifyCert { n: u64, x: String, y: String },
    /// Spin classification for dimensions up to --max
    Spin {
        /// Largest dimension to report (default 8192)
        #[arg(long, value_name = "DIM")]
        max: Option<u64>,
    },
    /// Rational projective spaces guaranteed by a plane in dimension N
    Projspaces { n: u64 },
}

/// A failure with a designated process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn data_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Data(_) | Error::Certificate(_) => data_failure(e.to_string()),
            _ => usage(e.to_string()),
        }
    }
}

fn chosen_format(cli: &Cli) -> Result<Format, Failure> {
    let picks = [cli.json, cli.markdown, cli.tsv]
        .iter()
        .filter(|&&f| f)
        .count();
    if picks > 1 {
        return Err(usage(
            "--json, --markdown, and --tsv are mutually exclusive",
        ));
    }
    Ok(if cli.json {
        Format::Json
    } else if cli.markdown {
        Format::Markdown
    } else if cli.tsv {
        Format::Tsv
    } else {
        Format::Text
    })
}

fn build_options(cli: &Cli, with_cache: bool) -> BuildOptions {
    BuildOptions {
        scan_bound: cli.scan_bound,
        exact_limit: cli.exact_limit,
        factor_files: cli.factors.clone(),
        cache_file: with_cache.then(bernoulli_cache_path),
    }
}

/// Build the classification context, reporting every bad factor-file line
/// before failing, and cache problems as warnings.
fn assembled_context(cli: &Cli) -> Result<qp2_core::classify::ClassifyContext, Failure> {
    let (cx, report) = build_context(&build_options(cli, true))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.has_data_errors() {
        for (path, issue) in &report.file_issues {
            eprintln!("{}: {issue}", path.display());
        }
        return Err(data_failure("factor file verification failed"));
    }
    Ok(cx)
}

/// A plain Bernoulli context honoring the limit flags, without bundled
/// records or cache.
fn bare_bernoulli_ctx(cli: &Cli) -> BernoulliCtx {
    let mut ctx = BernoulliCtx::new();
    if let Some(e) = cli.exact_limit {
        ctx.exact_limit = e;
        ctx.voronoi_limit = ctx.voronoi_limit.max(e);
    }
    ctx
}

fn cmd_classify(cli: &Cli, n: u64, format: Format) -> Result<(), Failure> {
    let mut cx = assembled_context(cli)?;
    let tv = classify_one(n, &mut cx)?;
    match format {
        Format::Text => print!("{}", verdict_text(&tv)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&verdict_json(&tv)).unwrap()),
        Format::Markdown => print!("{}", verdicts_markdown(std::slice::from_ref(&tv))),
        Format::Tsv => print!("{}", verdicts_tsv(std::slice::from_ref(&tv))),
    }
    Ok(())
}

fn cmd_range(cli: &Cli, lo: u64, hi: u64, format: Format) -> Result<(), Failure> {
    if lo > hi {
        return Err(usage(format!("empty range: {lo} > {hi}")));
    }
    let mut cx = assembled_context(cli)?;
    let list = classify_range_parallel(lo, hi, &mut cx, cli.jobs)?;
    match format {
        Format::Text => {
            for tv in &list {
                print!("{}", verdict_text(tv));
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&verdicts_json(&list)).unwrap()),
        Format::Markdown => print!("{}", verdicts_markdown(&list)),
        Format::Tsv => print!("{}", verdicts_tsv(&list)),
    }
    Ok(())
}

fn cmd_table1(cli: &Cli, format: Format) -> Result<(), Failure> {
    let mut cx = assembled_context(cli)?;
    let rows = survivors_table(&mut cx)?;
    match format {
        Format::Text => print!("{}", survivors_text(&rows)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&survivors_json(&rows)).unwrap()),
        Format::Markdown => print!("{}", survivors_markdown(&rows)),
        Format::Tsv => print!("{}", survivors_tsv(&rows)),
    }
    Ok(())
}

fn cmd_table2(cli: &Cli, format: Format) -> Result<(), Failure> {
    let mut ctx = bare_bernoulli_ctx(cli);
    let fams = families_table(&mut ctx)?;
    match format {
        Format::Text => print!("{}", families_text(&fams)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&families_json(&fams)).unwrap()),
        Format::Markdown => print!("{}", families_markdown(&fams)),
        Format::Tsv => print!("{}", families_tsv(&fams)),
    }
    Ok(())
}

fn cmd_bernoulli(cli: &Cli, n: u64, modulus: Option<u64>, format: Format) -> Result<(), Failure> {
    if n < 2 || n % 2 != 0 {
        return Err(usage("the index must be an even integer >= 2"));
    }
    let mut ctx = bare_bernoulli_ctx(cli);
    if let Some(p) = modulus {
        let residue = ctx.divided_bernoulli_mod_p(n, p)?;
        match format {
            Format::Text => println!("B_{n}/{n} = {residue} (mod {p})"),
            Format::Json => println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "index": n,
                    "modulus": p,
                    "residue": residue,
                }))
                .unwrap()
            ),
            Format::Markdown => {
                println!("| index | modulus | residue |\n|---|---|---|\n| {n} | {p} | {residue} |")
            }
            Format::Tsv => println!("index\tmodulus\tresidue\n{n}\t{p}\t{residue}"),
        }
        return Ok(());
    }
    let cache_path = bernoulli_cache_path();
    for w in preload_cache_file(&mut ctx, &cache_path) {
        eprintln!("warning: {w}");
    }
    let value = ctx.divided_bernoulli(n)?;
    if let Err(e) = write_cache_file(&ctx, &cache_path) {
        eprintln!("warning: cannot write cache {}: {e}", cache_path.display());
    }
    let sign = if value.negative { "-" } else { "" };
    match format {
        Format::Text => println!(
            "B_{n}/{n} = {sign}{}/{}",
            value.numerator, value.denominator
        ),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "index": n,
                "negative": value.negative,
                "numerator": value.numerator.to_string(),
                "denominator": value.denominator.to_string(),
            }))
            .unwrap()
        ),
        Format::Markdown => println!(
            "| index | sign | numerator | denominator |\n|---|---|---|---|\n| {n} | {sign}1 | {} | {} |",
            value.numerator, value.denominator
        ),
        Format::Tsv => println!(
            "{n}\t{}1\t{}\t{}",
            if value.negative { "-" } else { "" },
            value.numerator,
            value.denominator
        ),
    }
    Ok(())
}

fn dimension_k(n: u64) -> Result<u64, Failure> {
    if n == 0 || n % 8 != 0 {
        return Err(usage(format!(
            "dimension must be a positive multiple of 8, got {n}"
        )));
    }
    Ok(n / 8)
}

fn cmd_equation(cli: &Cli, n: u64, format: Format) -> Result<(), Failure> {
    let k = dimension_k(n)?;
    let shape = shape_of(k).ok_or_else(|| {
        usage(format!(
            "k = {k} has binary weight > 2; no congruence applies"
        ))
    })?;
    let mut ctx = bare_bernoulli_ctx(cli);
    let eq = build_equation(k, &mut ctx)?;
    match format {
        Format::Text => {
            println!("dimension {n} = 8*{k}  (k = {})", shape_string(&shape));
            println!("raw:      a = {}", eq.raw_a);
            println!("          b = {}", eq.raw_b);
            println!("          c = {}", eq.raw_c);
            println!("reduced:  A = {}", eq.coef_a);
            println!("          B = {}", eq.coef_b);
            println!("          C = {}", eq.coef_c);
            println!("gcd removed: {}", eq.gcd_removed);
            println!(
                "odd root required: {}",
                if eq.requires_odd_root { "yes" } else { "no" }
            );
            if eq.sign_flagged {
                println!("sign flagged: the general sign differs from the fixed-sign form");
            }
        }
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "dimension": n,
                "k": k,
                "shape": shape_string(&shape),
                "raw": {
                    "a": eq.raw_a.to_string(),
                    "b": eq.raw_b.to_string(),
                    "c": eq.raw_c.to_string(),
                },
                "reduced": {
                    "a": eq.coef_a.to_string(),
                    "b": eq.coef_b.to_string(),
                    "c": eq.coef_c.to_string(),
                },
                "gcd_removed": eq.gcd_removed.to_string(),
                "requires_odd_root": eq.requires_odd_root,
                "sign_flagged": eq.sign_flagged,
            }))
            .unwrap()
        ),
        Format::Markdown => {
            println!("| field | value |\n|---|---|");
            println!("| dimension | {n} |");
            println!("| k | {k} ({}) |", shape_string(&shape));
            println!("| raw a | {} |", eq.raw_a);
            println!("| raw b | {} |", eq.raw_b);
            println!("| raw c | {} |", eq.raw_c);
            println!("| reduced A | {} |", eq.coef_a);
            println!("| reduced B | {} |", eq.coef_b);
            println!("| reduced C | {} |", eq.coef_c);
            println!("| gcd removed | {} |", eq.gcd_removed);
            println!("| odd root required | {} |", eq.requires_odd_root);
            println!("| sign flagged | {} |", eq.sign_flagged);
        }
        Format::Tsv => {
            println!("dimension\tk\tshape\traw_a\traw_b\traw_c\ta\tb\tc\tgcd_removed\todd_root\tsign_flagged");
            println!(
                "{n}\t{k}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                shape_string(&shape),
                eq.raw_a,
                eq.raw_b,
                eq.raw_c,
                eq.coef_a,
                eq.coef_b,
                eq.coef_c,
                eq.gcd_removed,
                eq.requires_odd_root,
                eq.sign_flagged
            );
        }
    }
    Ok(())
}

fn parse_bigint(text: &str, what: &str) -> Result<BigInt, Failure> {
    text.parse()
        .map_err(|_| usage(format!("{what} must be an integer, got {text:?}")))
}

fn cmd_verify_cert(cli: &Cli, n: u64, x: &str, y: &str, format: Format) -> Result<(), Failure> {
    let k = dimension_k(n)?;
    let x = parse_bigint(x, "x")?;
    let y = parse_bigint(y, "y")?;
    let mut ctx = bare_bernoulli_ctx(cli);
    let report = check_theorem31(k, &x, &y, &mut ctx)?;
    let full = if k <= BRUTE_FORCE_MAX_K {
        Some(hattori_stong_full_check(k, &x, &y, &mut ctx)?)
    } else {
        None
    };
    let passed = report.passed() && full.unwrap_or(true);
    let verdict = if passed { "pass" } else { "fail" };
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "dimension": n,
                "k": k,
                "x": x.to_string(),
                "y": y.to_string(),
                "signature_holds": report.signature_holds,
                "e1_in_z_half": report.e1_in_z_half,
                "e1e1_in_z_half": report.e1e1_in_z_half,
                "full_lattice_check": full,
                "verdict": verdict,
            }))
            .unwrap()
        ),
        _ => {
            println!("dimension {n}, x = {x}, y = {y}");
            println!("  signature equation: {}", ok(report.signature_holds));
            println!("  first lattice condition in Z[1/2]: {}", ok(report.e1_in_z_half));
            println!("  second lattice condition in Z[1/2]: {}", ok(report.e1e1_in_z_half));
            match full {
                Some(f) => println!("  full lattice battery (k <= {BRUTE_FORCE_MAX_K}): {}", ok(f)),
                None => println!("  full lattice battery: skipped (k > {BRUTE_FORCE_MAX_K})"),
            }
            println!("{verdict}");
        }
    }
    if passed {
        Ok(())
    } else {
        Err(data_failure(format!(
            "certificate data (x, y) = ({x}, {y}) fails for dimension {n}"
        )))
    }
}

fn ok(flag: bool) -> &'static str {
    if flag {
        "ok"
    } else {
        "FAIL"
    }
}

fn spin_cells(v: &SpinVerdict) -> (bool, String) {
    match v {
        SpinVerdict::Possible { witness } => (true, format!("possible ({witness})")),
        SpinVerdict::ImpossibleEvenForm => (
            false,
            "impossible: spin 4-manifolds have even intersection forms".into(),
        ),
        SpinVerdict::ImpossibleDimension => (false, "impossible: no plane in this dimension".into()),
        SpinVerdict::ImpossibleBound { required } => (
            false,
            format!("impossible: signature bound needs nu_2(2*sigma) >= {required}"),
        ),
    }
}

fn cmd_spin(max: Option<u64>, format: Format) -> Result<(), Failure> {
    let max = max.unwrap_or(8192);
    let mut dims = vec![4u64];
    dims.extend((8..=max).step_by(8));
    let rows: Vec<(u64, SpinVerdict)> = dims.iter().map(|&n| (n, spin_classify(n))).collect();
    match format {
        Format::Text => {
            let possible: Vec<String> = rows
                .iter()
                .filter(|(_, v)| v.possible())
                .map(|(n, _)| n.to_string())
                .collect();
            println!(
                "spin planes possible only in dimensions: {}",
                possible.join(", ")
            );
            println!(
                "all other dimensions <= {max} are excluded (form parity or the two-adic signature bound)"
            );
        }
        Format::Json => {
            let arr: Vec<_> = rows
                .iter()
                .map(|(n, v)| {
                    let (possible, reason) = spin_cells(v);
                    json!({"dimension": n, "possible": possible, "reason": reason})
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&serde_json::Value::Array(arr)).unwrap());
        }
        Format::Markdown => {
            println!("| dimension | spin plane |\n|---|---|");
            for (n, v) in &rows {
                let (_, reason) = spin_cells(v);
                println!("| {n} | {reason} |");
            }
        }
        Format::Tsv => {
            println!("dimension\tpossible\treason");
            for (n, v) in &rows {
                let (possible, reason) = spin_cells(v);
                println!("{n}\t{possible}\t{reason}");
            }
        }
    }
    Ok(())
}

const DEGREE_EIGHT_ANNOTATION: &str = "known context: rational projective spaces with a degree-8 \
generator exist in dimension 8m for every odd m > 2, independently of this computation";

fn cmd_projspaces(n: u64, format: Format) -> Result<(), Failure> {
    let k = dimension_k(n)?;
    let spaces = derive(k)?;
    match format {
        Format::Text => {
            println!("spaces guaranteed by a plane in dimension {n}:");
            for s in &spaces {
                println!(
                    "  {:<10} generator degree {:>4}, {} powers, total dimension {}{}",
                    s.label(),
                    s.degree,
                    s.exponent,
                    s.total_dim,
                    if s.is_plane {
                        "  (the plane itself)"
                    } else if s.degree_two {
                        "  (degree-two generator)"
                    } else {
                        ""
                    }
                );
            }
            println!("note: {DEGREE_EIGHT_ANNOTATION}");
        }
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "dimension": n,
                "spaces": spaces
                    .iter()
                    .map(|s| json!({
                        "label": s.label(),
                        "exponent": s.exponent,
                        "degree": s.degree,
                        "total_dimension": s.total_dim,
                        "is_plane": s.is_plane,
                        "degree_two": s.degree_two,
                    }))
                    .collect::<Vec<_>>(),
                "annotation": DEGREE_EIGHT_ANNOTATION,
            }))
            .unwrap()
        ),
        Format::Markdown => {
            println!("| space | exponent | degree | total dimension |\n|---|---|---|---|");
            for s in &spaces {
                println!(
                    "| {} | {} | {} | {} |",
                    s.label(),
                    s.exponent,
                    s.degree,
                    s.total_dim
                );
            }
            println!();
            println!("{DEGREE_EIGHT_ANNOTATION}");
        }
        Format::Tsv => {
            println!("label\texponent\tdegree\ttotal_dimension\tis_plane\tdegree_two");
            for s in &spaces {
                println!(
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    s.label(),
                    s.exponent,
                    s.degree,
                    s.total_dim,
                    s.is_plane,
                    s.degree_two
                );
            }
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let format = chosen_format(cli)?;
    match &cli.command {
        Command::Classify { n } => cmd_classify(cli, *n, format),
        Command::Range { lo, hi } => cmd_range(cli, *lo, *hi, format),
        Command::Table1 => cmd_table1(cli, format),
        Command::Table2 => cmd_table2(cli, format),
        Command::Bernoulli { n, modulus } => cmd_bernoulli(cli, *n, *modulus, format),
        Command::Equation { n } => cmd_equation(cli, *n, format),
        Command::VerifyCert { n, x, y } => cmd_verify_cert(cli, *n, x, y, format),
        Command::Spin { max } => cmd_spin(*max, format),
        Command::Projspaces { n } => cmd_projspaces(*n, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // Help and version go to stdout, diagnostics to stderr.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
