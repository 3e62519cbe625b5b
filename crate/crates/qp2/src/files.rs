//! On-disk formats: the factor-record file and the Bernoulli value cache,
//! plus cache-directory resolution.
//!
//! Both formats are line-oriented, tab-separated text so they stay
//! hand-editable and diff-friendly.  Factor records:
//!
//! ```text
//! TARGET<TAB>factor[^exp](,factor[^exp])*<TAB>complete|partial[<TAB>provenance]
//! ```
//!
//! where `TARGET` is `N <n>`, `M <n>`, or a decimal literal and `#` begins
//! a comment.  Bernoulli cache lines are `n<TAB>sign<TAB>N<TAB>D` sorted by
//! `n`, with `sign` either `1` or `-1`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;

use qp2_core::bernoulli::BernoulliCtx;
use qp2_core::factordb::{FactorRecord, FactorStore, Target};

/// A diagnostic tied to a source line (1-based) and column (1-based byte
/// offset within the line).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineIssue {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for LineIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

fn issue(line: usize, column: usize, message: impl Into<String>) -> LineIssue {
    LineIssue {
        line,
        column,
        message: message.into(),
    }
}

fn parse_target(field: &str, line: usize) -> Result<Target, LineIssue> {
    if let Some(rest) = field.strip_prefix("N ") {
        let n: u64 = rest
            .trim()
            .parse()
            .map_err(|_| issue(line, 3, format!("bad numerator index {rest:?}")))?;
        return Ok(Target::Numerator(n));
    }
    if let Some(rest) = field.strip_prefix("M ") {
        let n: u64 = rest
            .trim()
            .parse()
            .map_err(|_| issue(line, 3, format!("bad Mersenne exponent {rest:?}")))?;
        return Ok(Target::Mersenne(n));
    }
    let value: BigUint = field
        .parse()
        .map_err(|_| issue(line, 1, format!("target {field:?} is neither `N <n>`, `M <n>`, nor a decimal literal")))?;
    Ok(Target::Literal(value))
}

fn parse_factor_list(field: &str, line: usize, column: usize) -> Result<Vec<(BigUint, u32)>, LineIssue> {
    let mut out = Vec::new();
    let mut offset = 0usize;
    for part in field.split(',') {
        let col = column + offset;
        offset += part.len() + 1;
        let part = part.trim();
        if part.is_empty() {
            return Err(issue(line, col, "empty factor entry"));
        }
        let (base, exp) = match part.split_once('^') {
            Some((b, e)) => {
                let exp: u32 = e
                    .parse()
                    .map_err(|_| issue(line, col, format!("bad exponent {e:?}")))?;
                (b, exp)
            }
            None => (part, 1),
        };
        let prime: BigUint = base
            .parse()
            .map_err(|_| issue(line, col, format!("bad factor {base:?}")))?;
        out.push((prime, exp));
    }
    Ok(out)
}

/// Parse one line of a factor file.  Returns `Ok(None)` for blank lines and
/// comments.  No verification happens here; see [`load_into`].
pub fn parse_factor_line(text: &str, line: usize) -> Result<Option<FactorRecord>, LineIssue> {
    let trimmed = text.trim_end();
    if trimmed.is_empty() || trimmed.trim_start().starts_with('#') {
        return Ok(None);
    }
    let mut fields = trimmed.splitn(4, '\t');
    let target_field = fields.next().expect("splitn yields at least one field");
    let factors_field = fields
        .next()
        .ok_or_else(|| issue(line, trimmed.len() + 1, "missing factor list (fields are tab-separated)"))?;
    let flag_field = fields
        .next()
        .ok_or_else(|| issue(line, trimmed.len() + 1, "missing completeness flag"))?;
    let provenance = fields.next().map(|s| s.to_string());

    let target = parse_target(target_field, line)?;
    let factors = parse_factor_list(factors_field, line, target_field.len() + 2)?;
    let complete = match flag_field {
        "complete" => true,
        "partial" => false,
        other => {
            let col = target_field.len() + factors_field.len() + 3;
            return Err(issue(line, col, format!("completeness flag must be `complete` or `partial`, got {other:?}")));
        }
    };
    Ok(Some(FactorRecord {
        target,
        factors,
        complete,
        provenance,
    }))
}

/// Parse a whole factor file.  Records that fail to parse are reported in
/// the issue list and skipped; well-formed records are returned with their
/// line numbers (verification is a separate step).
pub fn parse_factor_text(text: &str) -> (Vec<(usize, FactorRecord)>, Vec<LineIssue>) {
    let mut records = Vec::new();
    let mut issues = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        match parse_factor_line(raw, i + 1) {
            Ok(Some(record)) => records.push((i + 1, record)),
            Ok(None) => {}
            Err(e) => issues.push(e),
        }
    }
    (records, issues)
}

/// Render a record as one file line (inverse of [`parse_factor_line`]).
pub fn render_factor_record(record: &FactorRecord) -> String {
    let target = match &record.target {
        Target::Numerator(n) => format!("N {n}"),
        Target::Mersenne(n) => format!("M {n}"),
        Target::Literal(v) => v.to_string(),
    };
    let factors = record
        .factors
        .iter()
        .map(|(p, e)| {
            if *e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join(",");
    let flag = if record.complete { "complete" } else { "partial" };
    match &record.provenance {
        Some(prov) => format!("{target}\t{factors}\t{flag}\t{prov}"),
        None => format!("{target}\t{factors}\t{flag}"),
    }
}

/// Render a whole record list as file text.
pub fn render_factor_records(records: &[FactorRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&render_factor_record(r));
        out.push('\n');
    }
    out
}

/// Parse `text` and insert every record into the store, verifying each
/// (primality of listed factors, divisibility, and the complete-product
/// check).  A record that fails verification is rejected wholesale and
/// reported; the remaining records still load.  Returns the number of
/// accepted records and all per-line issues.
pub fn load_into(
    text: &str,
    store: &mut FactorStore,
    ctx: &mut BernoulliCtx,
) -> (usize, Vec<LineIssue>) {
    let (records, mut issues) = parse_factor_text(text);
    let mut accepted = 0;
    for (line, record) in records {
        match store.insert_record(record, ctx) {
            Ok(()) => accepted += 1,
            Err(e) => issues.push(issue(line, 1, format!("verification failed: {e}"))),
        }
    }
    (accepted, issues)
}

/// [`load_into`] for a file path.
pub fn load_factor_file(
    path: &Path,
    store: &mut FactorStore,
    ctx: &mut BernoulliCtx,
) -> io::Result<(usize, Vec<LineIssue>)> {
    let text = fs::read_to_string(path)?;
    Ok(load_into(&text, store, ctx))
}

/// One Bernoulli cache entry: index, sign, numerator, denominator of the
/// reduced `|B_n|/n` with the sign carried separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub index: u64,
    pub negative: bool,
    pub numerator: BigUint,
    pub denominator: BigUint,
}

/// Render cache entries as file text, sorted by index.
pub fn render_bernoulli_cache(entries: &mut Vec<CacheEntry>) -> String {
    entries.sort_by_key(|e| e.index);
    let mut out = String::new();
    for e in entries {
        let sign = if e.negative { "-1" } else { "1" };
        out.push_str(&format!("{}\t{}\t{}\t{}\n", e.index, sign, e.numerator, e.denominator));
    }
    out
}

/// Parse cache file text.  Malformed lines are reported and skipped — the
/// cache is advisory, and every entry is re-validated by the context on
/// preload anyway.
pub fn parse_bernoulli_cache(text: &str) -> (Vec<CacheEntry>, Vec<LineIssue>) {
    let mut entries = Vec::new();
    let mut issues = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_end();
        if trimmed.is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 4 {
            issues.push(issue(line, 1, format!("expected 4 tab-separated fields, got {}", fields.len())));
            continue;
        }
        let parsed = (|| -> Result<CacheEntry, String> {
            let index: u64 = fields[0].parse().map_err(|_| format!("bad index {:?}", fields[0]))?;
            let negative = match fields[1] {
                "1" => false,
                "-1" => true,
                other => return Err(format!("sign must be 1 or -1, got {other:?}")),
            };
            let numerator: BigUint = fields[2].parse().map_err(|_| format!("bad numerator {:?}", fields[2]))?;
            let denominator: BigUint = fields[3].parse().map_err(|_| format!("bad denominator {:?}", fields[3]))?;
            Ok(CacheEntry {
                index,
                negative,
                numerator,
                denominator,
            })
        })();
        match parsed {
            Ok(e) => entries.push(e),
            Err(msg) => issues.push(issue(line, 1, msg)),
        }
    }
    (entries, issues)
}

/// Preload cache entries into a context.  Each entry is validated by the
/// context (denominator formula, reducedness, modular cross-checks);
/// entries that fail are reported and skipped.  Returns the number
/// accepted.
pub fn preload_entries(ctx: &mut BernoulliCtx, entries: &[CacheEntry]) -> (usize, Vec<String>) {
    let mut accepted = 0;
    let mut rejected = Vec::new();
    for e in entries {
        // The sign of the reduced B_n/n is determined by n alone (negative
        // exactly when 4 | n), so a contradicting sign marks a bad entry.
        if e.negative != (e.index % 4 == 0) {
            rejected.push(format!(
                "cache entry for index {}: sign contradicts the index",
                e.index
            ));
            continue;
        }
        match ctx.preload(e.index, e.numerator.clone(), e.denominator.clone()) {
            Ok(()) => accepted += 1,
            Err(err) => rejected.push(format!("cache entry for index {}: {err}", e.index)),
        }
    }
    (accepted, rejected)
}

/// The cache directory: `QP_CACHE_DIR` if set, else the platform cache
/// home (`$XDG_CACHE_HOME/qp2` or `$HOME/.cache/qp2`), else `.qp2-cache`
/// under the working directory.
pub fn cache_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("QP_CACHE_DIR") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    if let Ok(xdg) = std::env::var("XDG_CACHE_HOME") {
        if !xdg.is_empty() {
            return Path::new(&xdg).join("qp2");
        }
    }
    if let Ok(home) = std::env::var("HOME") {
        if !home.is_empty() {
            return Path::new(&home).join(".cache").join("qp2");
        }
    }
    PathBuf::from(".qp2-cache")
}

/// Path of the Bernoulli cache file inside the cache directory.
pub fn bernoulli_cache_path() -> PathBuf {
    cache_dir().join("bernoulli.tsv")
}

/// Read and preload the cache file if it exists.  IO or format problems
/// degrade to warnings (returned, not fatal): the cache only accelerates
/// recomputation, it is never trusted without validation.
pub fn preload_cache_file(ctx: &mut BernoulliCtx, path: &Path) -> Vec<String> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Vec::new(),
        Err(e) => return vec![format!("cache file {}: {e}", path.display())],
    };
    let (entries, issues) = parse_bernoulli_cache(&text);
    let mut warnings: Vec<String> = issues
        .iter()
        .map(|i| format!("cache file {}: {i}", path.display()))
        .collect();
    let (_, rejected) = preload_entries(ctx, &entries);
    warnings.extend(rejected);
    warnings
}

/// Write every exactly-known value in the context back to the cache file,
/// atomically (temp file + rename), creating the directory if needed.
pub fn write_cache_file(ctx: &BernoulliCtx, path: &Path) -> io::Result<()> {
    let mut entries: Vec<CacheEntry> = ctx
        .cached_values()
        .map(|(index, numerator, denominator)| CacheEntry {
            index,
            negative: index % 4 == 0,
            numerator: numerator.clone(),
            denominator: denominator.clone(),
        })
        .collect();
    let text = render_bernoulli_cache(&mut entries);
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tsv.tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}
