//! The two census tables: surviving two-power dimensions up to 2^13 with
//! their obstructing primes, and the irregular-prime residue families.

use num_bigint::BigUint;
use serde_json::{json, Value};

use qp2_core::bernoulli::BernoulliCtx;
use qp2_core::classify::{classify, ClassifyContext, Evidence, Status};
use qp2_core::error::Result;
use qp2_core::obstruct::{
    family_strings, irregular_prime_table, mod8_obstructed, KummerFamily,
};

use crate::report::{detail_string, status_string};

/// One row of the survivors table: a dimension `8k` with `k = 2^a + 2^b`
/// (diagonal entries `a = b` mean `k = 2^(a+1)`) that passes the residue
/// test, together with the classifier's verdict and the obstructing prime
/// when there is one.
#[derive(Debug, Clone)]
pub struct SurvivorRow {
    pub a: u32,
    pub b: u32,
    pub k: u64,
    pub dimension: u64,
    pub prime: Option<BigUint>,
    pub status: Status,
    pub detail: String,
}

/// Dimensions `256 < 8k <= 8192` with `k = 2^a + 2^b` that the residue
/// test does not already eliminate, classified.  Rows are ordered by
/// `(a, b)` ascending.
pub fn survivors_table(cx: &mut ClassifyContext) -> Result<Vec<SurvivorRow>> {
    // The largest numerator index in the table is 4k = 4096; covering it
    // exactly turns every row's prime scan into cached divisions.
    crate::runner::warm_exact_cache(cx, 4096)?;
    let mut rows = Vec::new();
    for a in 0..=9u32 {
        for b in 0..=a {
            let k = (1u64 << a) + (1u64 << b);
            let dimension = 8 * k;
            if dimension <= 256 || dimension > 8192 {
                continue;
            }
            if mod8_obstructed(k, &cx.bern)? {
                continue;
            }
            let verdict = classify(dimension, cx)?;
            let prime = verdict.evidence.iter().find_map(|e| match e {
                Evidence::ObstructingPrime { prime, .. } => Some(prime.clone()),
                _ => None,
            });
            let detail = detail_string(&verdict);
            rows.push(SurvivorRow {
                a,
                b,
                k,
                dimension,
                prime,
                status: verdict.status,
                detail,
            });
        }
    }
    Ok(rows)
}

fn verdict_cell(status: &Status) -> &'static str {
    match status {
        Status::Exists(_) => "yes",
        Status::NotExists => "no",
        Status::Unknown => "?",
    }
}

fn prime_cell(row: &SurvivorRow) -> String {
    match &row.prime {
        Some(p) => p.to_string(),
        None => "?".into(),
    }
}

/// Markdown rendering of the survivors table, one row per `(a, b)` pair.
pub fn survivors_markdown(rows: &[SurvivorRow]) -> String {
    let mut out = String::from(
        "| (a, b) | obstructing prime p = +-3 (mod 8) dividing N_4k | dimension n = 8k | plane exists? |\n|---|---|---|---|\n",
    );
    for r in rows {
        out.push_str(&format!(
            "| ({}, {}) | {} | {} | {} |\n",
            r.a,
            r.b,
            prime_cell(r),
            r.dimension,
            verdict_cell(&r.status)
        ));
    }
    out
}

/// TSV rendering of the survivors table.
pub fn survivors_tsv(rows: &[SurvivorRow]) -> String {
    let mut out = String::from("a\tb\tk\tdimension\tprime\tverdict\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.a,
            r.b,
            r.k,
            r.dimension,
            prime_cell(r),
            verdict_cell(&r.status)
        ));
    }
    out
}

/// JSON rendering of the survivors table.
pub fn survivors_json(rows: &[SurvivorRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "a": r.a,
                    "b": r.b,
                    "k": r.k,
                    "dimension": r.dimension,
                    "prime": r.prime.as_ref().map(|p| p.to_string()),
                    "status": status_string(&r.status),
                    "detail": r.detail,
                })
            })
            .collect(),
    )
}

/// Plain-text rendering of the survivors table (same cells as Markdown).
pub fn survivors_text(rows: &[SurvivorRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!(
            "({}, {})  dim {:>5}  prime {:>22}  {}\n",
            r.a,
            r.b,
            r.dimension,
            prime_cell(r),
            verdict_cell(&r.status)
        ));
    }
    out
}

/// The first thirteen irregular primes `= +-3 (mod 8)` with their residue
/// families.
pub fn families_table(ctx: &mut BernoulliCtx) -> Result<Vec<KummerFamily>> {
    irregular_prime_table(13, ctx)
}

fn indices_cell(fam: &KummerFamily) -> String {
    fam.indices
        .iter()
        .map(|m| format!("N_{m}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn pairs_cell(fam: &KummerFamily) -> String {
    if fam.pairs.is_empty() {
        return "no such (a, b)".into();
    }
    let list = fam
        .pairs
        .iter()
        .map(|(a, b)| format!("({a}, {b})"))
        .collect::<Vec<_>>()
        .join("; ");
    format!("{list} (mod {})", fam.order)
}

fn families_cell(fam: &KummerFamily) -> String {
    family_strings(fam).join("; ")
}

/// Markdown rendering of the residue-family table: prime and its
/// numerator indices, the admissible exponent pairs modulo the period,
/// and the dimension families they generate.
pub fn families_markdown(fams: &[KummerFamily]) -> String {
    let mut out = String::from(
        "| irregular prime p dividing N_m | (a, b) with 4(2^a + 2^b) = m (mod p-1) | dimensions n = 8k (n > 256) ruled out |\n|---|---|---|\n",
    );
    for fam in fams {
        out.push_str(&format!(
            "| {}, {} | {} | {} |\n",
            fam.prime,
            indices_cell(fam),
            pairs_cell(fam),
            families_cell(fam)
        ));
    }
    out
}

/// TSV rendering of the residue-family table.
pub fn families_tsv(fams: &[KummerFamily]) -> String {
    let mut out = String::from("prime\tindices\torder\tpairs\tfamilies\n");
    for fam in fams {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            fam.prime,
            indices_cell(fam),
            fam.order,
            pairs_cell(fam),
            families_cell(fam)
        ));
    }
    out
}

/// JSON rendering of the residue-family table.
pub fn families_json(fams: &[KummerFamily]) -> Value {
    Value::Array(
        fams.iter()
            .map(|fam| {
                json!({
                    "prime": fam.prime,
                    "indices": fam.indices,
                    "order": fam.order,
                    "preperiod": fam.preperiod,
                    "pairs": fam.pairs,
                    "families": family_strings(fam),
                })
            })
            .collect(),
    )
}

/// Plain-text rendering of the residue-family table.
pub fn families_text(fams: &[KummerFamily]) -> String {
    let mut out = String::new();
    for fam in fams {
        out.push_str(&format!(
            "p = {:>3} ({}): {}\n",
            fam.prime,
            indices_cell(fam),
            pairs_cell(fam)
        ));
        let strings = families_cell(fam);
        if !strings.is_empty() {
            out.push_str(&format!("          {strings}\n"));
        }
    }
    out
}
