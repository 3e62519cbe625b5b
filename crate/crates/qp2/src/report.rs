//! Report rendering: verdicts and evidence as plain text, JSON, Markdown,
//! or TSV.
//!
//! The JSON schema is stable: every verdict object carries the keys
//! `dimension`, `k`, `shape`, `status`, `witness`, `certificate`,
//! `evidence`, and `timings`.  Big integers are rendered as decimal
//! strings.  TSV output contains no timings, so it is byte-stable across
//! runs on fixed inputs.

use serde_json::{json, Value};

use qp2_core::classify::{Evidence, PrimeSource, Status, Verdict, Witness};
use qp2_core::qrsolve::Shape;

/// Output format selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    /// Human-oriented text (the default).
    #[default]
    Text,
    Json,
    Markdown,
    Tsv,
}

/// A verdict together with how long it took.
#[derive(Debug, Clone)]
pub struct TimedVerdict {
    pub verdict: Verdict,
    pub millis: u64,
}

/// `2^a` or `2^a+2^b` (exponents descending).
pub fn shape_string(shape: &Shape) -> String {
    match shape {
        Shape::PowerOfTwo { a } => format!("2^{a}"),
        Shape::TwoPowers { a, b } => format!("2^{a}+2^{b}"),
    }
}

pub fn status_string(status: &Status) -> &'static str {
    match status {
        Status::Exists(_) => "exists",
        Status::NotExists => "not-exists",
        Status::Unknown => "unknown",
    }
}

fn source_string(source: PrimeSource) -> &'static str {
    match source {
        PrimeSource::Scan => "scan",
        PrimeSource::Hint => "hint",
    }
}

/// One evidence item as a typed JSON object.
pub fn evidence_json(e: &Evidence) -> Value {
    match e {
        Evidence::ClassicalDimensionFour => json!({"type": "classical-dimension-four"}),
        Evidence::DimensionNotMultipleOfFour { residue } => {
            json!({"type": "dimension-not-multiple-of-four", "residue": residue})
        }
        Evidence::DimensionCongruentFourModEight => {
            json!({"type": "dimension-congruent-four-mod-eight"})
        }
        Evidence::BinaryWeightExceeded { weight } => {
            json!({"type": "binary-weight-exceeded", "weight": weight})
        }
        Evidence::ResidueTestFired { residue } => {
            json!({"type": "numerator-residue-test", "residue": residue})
        }
        Evidence::ObstructingPrime { prime, source } => {
            json!({"type": "obstructing-prime", "prime": prime.to_string(), "source": source_string(*source)})
        }
        Evidence::SignFlagged => json!({"type": "sign-flagged"}),
        Evidence::Screen { blocked, symbol } => {
            json!({"type": "jacobi-screen", "blocked": blocked, "symbol": symbol})
        }
        Evidence::LocallyUnsolvable { prime, exponent } => {
            json!({"type": "locally-unsolvable", "prime": prime.to_string(), "exponent": exponent})
        }
        Evidence::RootFound { xbar } => json!({"type": "root-found", "xbar": xbar.to_string()}),
        Evidence::UnfactoredCofactor { missing } => {
            json!({"type": "unfactored-cofactor", "missing": missing.to_string()})
        }
        Evidence::CapabilityLimited { reason } => {
            json!({"type": "capability-limited", "reason": reason})
        }
    }
}

/// One evidence item as a short human-readable phrase.
pub fn evidence_text(e: &Evidence) -> String {
    match e {
        Evidence::ClassicalDimensionFour => "dimension 4: classical complex projective plane".into(),
        Evidence::DimensionNotMultipleOfFour { residue } => {
            format!("dimension is {residue} (mod 4), not a multiple of 4")
        }
        Evidence::DimensionCongruentFourModEight => {
            "dimension is 4 (mod 8); above 4 it must be a multiple of 8".into()
        }
        Evidence::BinaryWeightExceeded { weight } => {
            format!("k has binary weight {weight} > 2")
        }
        Evidence::ResidueTestFired { residue } => {
            format!("numerator N_4k = {residue} (mod 8)")
        }
        Evidence::ObstructingPrime { prime, source } => {
            format!("prime {prime} = +-3 (mod 8) divides N_4k ({})", source_string(*source))
        }
        Evidence::SignFlagged => "general sign differs from the fixed-sign form (k = 1)".into(),
        Evidence::Screen { blocked, symbol } => match symbol {
            Some(s) => format!(
                "Jacobi screen: symbol {s}{}",
                if *blocked { ", equation blocked" } else { "" }
            ),
            None => "Jacobi screen: symbol undefined (shared factor)".into(),
        },
        Evidence::LocallyUnsolvable { prime, exponent } => {
            format!("no root modulo {prime}^{exponent}")
        }
        Evidence::RootFound { xbar } => format!("congruence root xbar = {xbar}"),
        Evidence::UnfactoredCofactor { missing } => {
            format!("unfactored cofactor {missing} of the modulus")
        }
        Evidence::CapabilityLimited { reason } => format!("capability limit: {reason}"),
    }
}

fn witness_json(v: &Verdict) -> Value {
    match &v.status {
        Status::Exists(Witness::ClassicalComplexPlane) => json!("classical-complex-plane"),
        Status::Exists(Witness::Certified(_)) => json!("certificate"),
        // The decisive witness of a non-existence verdict is its final
        // evidence item.
        Status::NotExists => v.evidence.last().map(evidence_json).unwrap_or(Value::Null),
        Status::Unknown => Value::Null,
    }
}

fn certificate_json(v: &Verdict) -> Value {
    match &v.status {
        Status::Exists(Witness::Certified(c)) => json!({
            "xbar": c.xbar.to_string(),
            "l": c.l.to_string(),
            "x": c.x.to_string(),
            "y": c.y.to_string(),
        }),
        _ => Value::Null,
    }
}

/// The stable JSON object for one timed verdict.
pub fn verdict_json(tv: &TimedVerdict) -> Value {
    let v = &tv.verdict;
    json!({
        "dimension": v.dimension,
        "k": v.k,
        "shape": v.shape.as_ref().map(shape_string),
        "status": status_string(&v.status),
        "witness": witness_json(v),
        "certificate": certificate_json(v),
        "evidence": v.evidence.iter().map(evidence_json).collect::<Vec<_>>(),
        "timings": {"millis": tv.millis},
    })
}

/// Deterministic one-phrase summary used by the table/TSV detail column.
pub fn detail_string(v: &Verdict) -> String {
    match &v.status {
        Status::Exists(Witness::ClassicalComplexPlane) => "classical complex projective plane".into(),
        Status::Exists(Witness::Certified(c)) => format!("certified, xbar = {}", c.xbar),
        Status::NotExists => v
            .evidence
            .last()
            .map(evidence_text)
            .unwrap_or_else(|| "-".into()),
        Status::Unknown => v
            .evidence
            .last()
            .map(evidence_text)
            .unwrap_or_else(|| "-".into()),
    }
}

fn k_string(v: &Verdict) -> String {
    v.k.map(|k| k.to_string()).unwrap_or_else(|| "-".into())
}

fn shape_cell(v: &Verdict) -> String {
    v.shape
        .as_ref()
        .map(shape_string)
        .unwrap_or_else(|| "-".into())
}

/// Multi-line human-readable rendering of one verdict.
pub fn verdict_text(tv: &TimedVerdict) -> String {
    let v = &tv.verdict;
    let mut out = format!("dimension {}: {}", v.dimension, status_string(&v.status));
    if let Some(k) = v.k {
        out.push_str(&format!("  (k = {k}"));
        if let Some(shape) = &v.shape {
            out.push_str(&format!(" = {}", shape_string(shape)));
        }
        out.push(')');
    }
    out.push('\n');
    if let Status::Exists(Witness::Certified(c)) = &v.status {
        out.push_str(&format!(
            "  certificate: xbar = {}, l = {}, x = {}, y = {}\n",
            c.xbar, c.l, c.x, c.y
        ));
    }
    for e in &v.evidence {
        out.push_str(&format!("  - {}\n", evidence_text(e)));
    }
    out.push_str(&format!("  ({} ms)\n", tv.millis));
    out
}

/// TSV rows for a verdict list: `dimension<TAB>k<TAB>shape<TAB>status<TAB>detail`,
/// one row per verdict, with a header line.  No timings, so the output is
/// byte-stable.
pub fn verdicts_tsv(list: &[TimedVerdict]) -> String {
    let mut out = String::from("dimension\tk\tshape\tstatus\tdetail\n");
    for tv in list {
        let v = &tv.verdict;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            v.dimension,
            k_string(v),
            shape_cell(v),
            status_string(&v.status),
            detail_string(v)
        ));
    }
    out
}

/// Markdown table for a verdict list.
pub fn verdicts_markdown(list: &[TimedVerdict]) -> String {
    let mut out = String::from("| dimension | k | shape | status | detail |\n|---|---|---|---|---|\n");
    for tv in list {
        let v = &tv.verdict;
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            v.dimension,
            k_string(v),
            shape_cell(v),
            status_string(&v.status),
            detail_string(v)
        ));
    }
    out
}

/// JSON array for a verdict list.
pub fn verdicts_json(list: &[TimedVerdict]) -> Value {
    Value::Array(list.iter().map(verdict_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use qp2_core::classify::{classify, ClassifyContext};

    fn timed(n: u64) -> TimedVerdict {
        let mut cx = ClassifyContext::new();
        TimedVerdict {
            verdict: classify(n, &mut cx).unwrap(),
            millis: 0,
        }
    }

    #[test]
    fn json_has_the_stable_keys() {
        let tv = timed(8);
        let v = verdict_json(&tv);
        let obj = v.as_object().unwrap();
        for key in ["dimension", "k", "shape", "status", "witness", "certificate", "evidence", "timings"] {
            assert!(obj.contains_key(key), "missing key {key}");
        }
        assert_eq!(v["status"], "exists");
        assert_eq!(v["certificate"]["xbar"], "2");
        assert_eq!(v["shape"], "2^0");
    }

    #[test]
    fn json_round_trips_through_text() {
        let tv = timed(24);
        let v = verdict_json(&tv);
        let text = serde_json::to_string_pretty(&v).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&v).unwrap());
    }

    #[test]
    fn non_existence_witness_is_the_last_evidence_item() {
        let tv = timed(24);
        let v = verdict_json(&tv);
        assert_eq!(v["status"], "not-exists");
        let evidence = v["evidence"].as_array().unwrap();
        assert_eq!(v["witness"], *evidence.last().unwrap());
    }

    #[test]
    fn tsv_is_deterministic_and_timing_free() {
        let list = vec![timed(8), timed(12), timed(24)];
        let a = verdicts_tsv(&list);
        let mut relabeled = list.clone();
        for tv in &mut relabeled {
            tv.millis += 999;
        }
        let b = verdicts_tsv(&relabeled);
        assert_eq!(a, b);
        assert!(a.starts_with("dimension\tk\tshape\tstatus\tdetail\n"));
        assert!(a.contains("8\t1\t2^0\texists\tcertified, xbar = 2\n"));
    }
}
