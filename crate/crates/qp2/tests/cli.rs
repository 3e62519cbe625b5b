//! End-to-end tests that drive the compiled binary the way a user would.

use std::process::{Command, Output};

fn qp2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qp2"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn qp2_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qp2"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn classify_32_json_carries_the_full_certificate() {
    let out = qp2(&["classify", "32", "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["dimension"], 32);
    assert_eq!(v["k"], 4);
    assert_eq!(v["shape"], "2^2");
    assert_eq!(v["status"], "exists");
    assert_eq!(v["witness"], "certificate");
    assert_eq!(v["certificate"]["xbar"], "52839119");
    assert_eq!(v["certificate"]["l"], "6051506890222158945");
    assert_eq!(v["certificate"]["x"], "16644322485");
    assert_eq!(v["certificate"]["y"], "1039524408135835650");
    assert!(v["timings"]["millis"].is_u64());
}

#[test]
fn classify_24_reports_the_residue_witness() {
    let out = qp2(&["classify", "24", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["status"], "not-exists");
    assert_eq!(v["witness"]["type"], "numerator-residue-test");
    assert_eq!(v["witness"]["residue"], 3);
}

#[test]
fn range_tsv_output_is_byte_stable() {
    let a = qp2(&["range", "4", "64", "--tsv"]);
    let b = qp2(&["range", "4", "64", "--tsv"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "two runs must agree byte for byte");
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("dimension\tk\tshape\tstatus\tdetail"),
        "header row"
    );
    assert!(text.contains("8\t1\t2^0\texists\tcertified, xbar = 2"));
    assert!(text.contains("24\t3\t2^1+2^0\tnot-exists\t"));
    // 16 grid points from 4 to 64 plus the header.
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn parallel_jobs_do_not_change_the_output() {
    let serial = qp2(&["range", "4", "96", "--tsv"]);
    let parallel = qp2(&["range", "4", "96", "--tsv", "--jobs", "3"]);
    assert_eq!(code(&serial), 0);
    assert_eq!(code(&parallel), 0);
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn verify_cert_accepts_the_two_classical_pairs() {
    for (n, x, y) in [("8", "2", "7"), ("16", "6", "39")] {
        let out = qp2(&["verify-cert", n, x, y]);
        assert_eq!(code(&out), 0, "({n}, {x}, {y}) stderr: {}", stderr(&out));
        assert!(stdout(&out).trim_end().ends_with("pass"));
    }
}

#[test]
fn verify_cert_rejects_a_wrong_pair_with_exit_2() {
    let out = qp2(&["verify-cert", "8", "3", "7"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("fail"));
    assert!(stderr(&out).contains("fails for dimension 8"));
}

#[test]
fn equation_32_prints_the_reduced_coefficients() {
    let out = qp2(&["equation", "32"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("A = -256884314145"));
    assert!(text.contains("B = 118518239"));
    assert!(text.contains("C = 510"));
    assert!(text.contains("gcd removed: 15"));
    assert!(text.contains("odd root required: no"));
}

#[test]
fn bernoulli_tsv_matches_the_cache_line_format() {
    let out = qp2(&["bernoulli", "12", "--tsv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "12\t-1\t691\t32760\n");
}

#[test]
fn bernoulli_modular_evaluation_hits_zero_on_a_divisor() {
    let out = qp2(&["bernoulli", "32", "--mod", "37"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("B_32/32 = 0 (mod 37)"));
}

#[test]
fn bernoulli_rejects_odd_or_zero_index_as_usage() {
    for bad in ["7", "0"] {
        let out = qp2(&["bernoulli", bad]);
        assert_eq!(code(&out), 1, "index {bad}");
    }
}

#[test]
fn table2_json_lists_thirteen_families_with_verbatim_pairs() {
    let out = qp2(&["table2", "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let rows = v.as_array().expect("array");
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[0]["prime"], 37);
    assert_eq!(rows[0]["order"], 6);
    assert_eq!(rows[0]["pairs"], serde_json::json!([[2, 2], [0, 4]]));
    assert_eq!(
        rows[0]["families"],
        serde_json::json!(["2^{6r+6}", "2^{6r+3}+2^{6s+7}"])
    );
    for row in rows {
        let p = row["prime"].as_u64().expect("prime");
        let pairs = row["pairs"].as_array().expect("pairs");
        if matches!(p, 131 | 149 | 157 | 307) {
            assert!(pairs.is_empty(), "prime {p} admits no exponent pair");
        }
    }
}

#[test]
fn a_wrong_factor_record_is_refused_with_exit_2() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("bad.txt");
    std::fs::write(
        &path,
        "M 63\t7^2,73,127,337,5419,92737,649657,77158673929\tcomplete\n",
    )
    .expect("write");
    let out = qp2(&["--factors", path.to_str().unwrap(), "classify", "24"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("line 1"), "stderr: {err}");
    assert!(err.contains("do not divide"), "stderr: {err}");
}

#[test]
fn an_extra_factor_file_feeds_the_classifier() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("hint.txt");
    std::fs::write(&path, "# local additions\nN 136\t29835096585483934621\tpartial\n")
        .expect("write");
    let out = qp2(&["--factors", path.to_str().unwrap(), "classify", "272", "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["status"], "not-exists");
}

#[test]
fn cache_dir_round_trip_and_corrupt_line_tolerance() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cache_dir = dir.path().join("cache");
    let env = [("QP_CACHE_DIR", cache_dir.to_str().unwrap())];

    let out = qp2_env(&["bernoulli", "10", "--tsv"], &env);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "10\t1\t1\t132\n");

    let cache_file = cache_dir.join("bernoulli.tsv");
    let body = std::fs::read_to_string(&cache_file).expect("cache file written");
    // Every even index at or below the request lands in the cache.
    assert_eq!(body, "2\t1\t1\t12\n4\t-1\t1\t120\n6\t1\t1\t252\n8\t-1\t1\t240\n10\t1\t1\t132\n");

    // A corrupt line is reported as a warning but never breaks the run.
    let mut tampered = body;
    tampered.push_str("garbage line\n");
    std::fs::write(&cache_file, tampered).expect("rewrite");
    let again = qp2_env(&["bernoulli", "10", "--tsv"], &env);
    assert_eq!(code(&again), 0);
    assert_eq!(stdout(&again), "10\t1\t1\t132\n");
    assert!(stderr(&again).contains("line 6"));
}

#[test]
fn conflicting_format_flags_are_a_usage_error() {
    let out = qp2(&["classify", "8", "--json", "--tsv"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unknown_subcommands_and_bad_ranges_exit_1() {
    assert_eq!(code(&qp2(&["frobnicate"])), 1);
    assert_eq!(code(&qp2(&["range", "64", "4"])), 1);
    assert_eq!(code(&qp2(&["classify", "0"])), 1);
}

#[test]
fn classify_handles_dimensions_off_the_4_grid() {
    let out = qp2(&["classify", "13", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["status"], "not-exists");
    assert_eq!(v["witness"]["type"], "dimension-not-multiple-of-four");
    assert_eq!(v["witness"]["residue"], 1);
}

#[test]
fn spin_reports_only_the_two_low_dimensions() {
    let out = qp2(&["spin", "--max", "8192"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("possible only in dimensions: 8, 16"));
}

#[test]
fn projspaces_32_lists_the_derived_tower() {
    let out = qp2(&["projspaces", "32"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("QP^2_16"));
    assert!(text.contains("QP^4_8"));
    assert!(text.contains("QP^8_4"));
    assert!(text.contains("QP^16_2"));
    assert!(text.contains("degree-8 generator exist in dimension 8m for every odd m > 2"));
}

#[test]
fn factor_records_round_trip_through_the_renderer() {
    use qp2::core::factordb::{FactorStore, Target};
    use qp2::files;

    let text = qp2::data::BUNDLED_FACTORS;
    // Parse the bundled table, re-render it, parse again: same records.
    let (first, issues) = files::parse_factor_text(text);
    assert!(issues.is_empty());
    let records: Vec<_> = first.iter().map(|(_, r)| r.clone()).collect();
    let rendered = files::render_factor_records(&records);
    let (second, issues2) = files::parse_factor_text(&rendered);
    assert!(issues2.is_empty());
    assert_eq!(first.len(), second.len());
    for ((_, a), (_, b)) in first.iter().zip(second.iter()) {
        assert_eq!(a, b);
    }

    // And the records actually load into a store.
    let mut store = FactorStore::new();
    let mut ctx = qp2::core::bernoulli::BernoulliCtx::default();
    let (accepted, load_issues) = files::load_into(text, &mut store, &mut ctx);
    assert!(load_issues.is_empty());
    assert_eq!(accepted, first.len());
    assert!(first
        .iter()
        .any(|(_, r)| matches!(r.target, Target::Mersenne(63))));
}
