//! Orchestration: build a classification context from options, bundled
//! data, factor files, and the value cache; run single or ranged
//! classifications with optional parallelism and a deterministic merge.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use qp2_core::classify::{classify, ClassifyContext, ClassifyOptions};
use qp2_core::error::{Error, Result};

use crate::data::load_bundled;
use crate::files::{load_factor_file, preload_cache_file, LineIssue};
use crate::report::TimedVerdict;

/// Everything needed to assemble a [`ClassifyContext`].
#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    pub scan_bound: Option<u64>,
    pub exact_limit: Option<u64>,
    pub factor_files: Vec<PathBuf>,
    /// Path of the Bernoulli cache file to preload, if any.
    pub cache_file: Option<PathBuf>,
}

/// What context assembly produced besides the context itself.
#[derive(Debug, Default)]
pub struct BuildReport {
    /// Factor-file records that failed to parse or verify, per file.
    pub file_issues: Vec<(PathBuf, LineIssue)>,
    /// Non-fatal cache problems.
    pub warnings: Vec<String>,
}

impl BuildReport {
    /// User-supplied data failed verification.
    pub fn has_data_errors(&self) -> bool {
        !self.file_issues.is_empty()
    }
}

/// Build a context: defaults, overridden limits, bundled records, then
/// user factor files and the value cache.  User-data verification
/// failures are collected in the report rather than aborting, so the
/// caller can list every bad line before exiting.
pub fn build_context(opts: &BuildOptions) -> Result<(ClassifyContext, BuildReport)> {
    let mut options = ClassifyOptions::default();
    if let Some(s) = opts.scan_bound {
        options.scan_bound = s;
    }
    if let Some(e) = opts.exact_limit {
        options.exact_limit = e;
        options.voronoi_limit = options.voronoi_limit.max(e);
    }
    let mut cx = ClassifyContext::with(options, Default::default());
    let mut report = BuildReport::default();

    load_bundled(&mut cx.store, &mut cx.bern)?;
    if let Some(cache) = &opts.cache_file {
        report.warnings = preload_cache_file(&mut cx.bern, cache);
    }
    for path in &opts.factor_files {
        let (_, issues) = load_factor_file(path, &mut cx.store, &mut cx.bern)
            .map_err(|e| Error::data(format!("cannot read {}: {e}", path.display())))?;
        for issue in issues {
            report.file_issues.push((path.clone(), issue));
        }
    }
    Ok((cx, report))
}

/// Fill the exact value cache up to `min(bound, exact_limit)`, rounded
/// down to an even index.  Scans over dimensions whose numerator index is
/// covered then reduce to exact trial division.
pub fn warm_exact_cache(cx: &mut ClassifyContext, bound: u64) -> Result<()> {
    let warm = bound.min(cx.options.exact_limit) & !1;
    if warm >= 2 {
        cx.bern.divided_bernoulli(warm)?;
    }
    Ok(())
}

/// Classify one dimension, timing it.
pub fn classify_one(n: u64, cx: &mut ClassifyContext) -> Result<TimedVerdict> {
    let start = Instant::now();
    let verdict = classify(n, cx)?;
    Ok(TimedVerdict {
        verdict,
        millis: start.elapsed().as_millis() as u64,
    })
}

/// Multiples of 4 in `[lo, hi]`, the classifiable dimensions of a range.
pub fn range_dimensions(lo: u64, hi: u64) -> Vec<u64> {
    let start = lo.max(4).div_ceil(4) * 4;
    (start..=hi).step_by(4).collect()
}

/// Classify every multiple of 4 in `[lo, hi]` across `jobs` workers
/// (default: available parallelism).  Output order is by dimension
/// regardless of scheduling, and each worker clones the warmed context,
/// so results are identical to a sequential run.
pub fn classify_range_parallel(
    lo: u64,
    hi: u64,
    cx: &mut ClassifyContext,
    jobs: Option<usize>,
) -> Result<Vec<TimedVerdict>> {
    let dims = range_dimensions(lo, hi);
    // Warm the shared exact cache once in the parent so worker clones
    // inherit it instead of each rebuilding the recurrence.  Covering the
    // largest numerator index in range (4k = hi/2) turns every prime scan
    // into plain divisions of the cached exact numerator.
    warm_exact_cache(cx, hi / 2)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::capacity(format!("cannot build worker pool: {e}")))?;
    let results: Vec<Result<TimedVerdict>> = pool.install(|| {
        dims.par_iter()
            .map_init(
                || cx.clone(),
                |local, &n| classify_one(n, local),
            )
            .collect()
    });
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qp2_core::classify::Status;

    #[test]
    fn range_dimension_grid_is_every_multiple_of_four() {
        assert_eq!(range_dimensions(4, 20), vec![4, 8, 12, 16, 20]);
        assert_eq!(range_dimensions(5, 20), vec![8, 12, 16, 20]);
        assert_eq!(range_dimensions(1, 4), vec![4]);
        assert_eq!(range_dimensions(21, 20), Vec::<u64>::new());
    }

    #[test]
    fn parallel_range_agrees_with_single_runs() {
        let (mut cx, report) = build_context(&BuildOptions::default()).unwrap();
        assert!(!report.has_data_errors());
        let parallel = classify_range_parallel(4, 40, &mut cx, Some(2)).unwrap();
        let (mut cx2, _) = build_context(&BuildOptions::default()).unwrap();
        for tv in &parallel {
            let single = classify_one(tv.verdict.dimension, &mut cx2).unwrap();
            assert_eq!(single.verdict, tv.verdict);
        }
        let exists: Vec<u64> = parallel
            .iter()
            .filter(|tv| matches!(tv.verdict.status, Status::Exists(_)))
            .map(|tv| tv.verdict.dimension)
            .collect();
        assert_eq!(exists, vec![4, 8, 16, 32]);
    }

    #[test]
    fn bundled_hints_reach_the_classifier() {
        let (mut cx, _) = build_context(&BuildOptions::default()).unwrap();
        let tv = classify_one(272, &mut cx).unwrap();
        assert_eq!(tv.verdict.status, Status::NotExists);
        let text = format!("{:?}", tv.verdict.evidence);
        assert!(text.contains("29835096585483934621"));
    }
}
