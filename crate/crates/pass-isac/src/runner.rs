//! Parallel batch evaluation.
//!
//! Trials run on the current rayon pool; results are collected by index and
//! reduced in trial order, so output does not depend on the thread count.

use pass_isac_core::monte_carlo::{
    average_curve_sets, rate_jobs, summarize, trial_regions, AveragedRegions, Case, Curve, CurveSet, Design, McConfig,
    Mode, RateRow, Sweep,
};
use pass_isac_core::multi_pinch::SearchConfig;
use pass_isac_core::{RatePair, Result, SystemConfig};
use rayon::prelude::*;

pub fn average_rates(
    cfg: &SystemConfig,
    mc: &McConfig,
    designs: &[Design],
    mode: Mode,
    sweep: &Sweep,
    cases: &[Case],
    search: &SearchConfig,
) -> Result<Vec<RateRow>> {
    search.validate()?;
    let jobs = rate_jobs(cfg, mc, designs, mode, sweep, cases)?;
    let trials = mc.trials;
    let results: Vec<Result<RatePair>> = (0..jobs.len() * trials)
        .into_par_iter()
        .map(|k| jobs[k / trials].evaluate(mc, search, (k % trials) as u64))
        .collect();
    jobs.iter()
        .zip(results.chunks(trials))
        .map(|(job, chunk)| {
            Ok(RateRow { sweep_value: job.sweep_value, design: job.design, case: job.case, summary: summarize(chunk)? })
        })
        .collect()
}

pub fn average_region(
    cfg: &SystemConfig,
    mc: &McConfig,
    mode: Mode,
    case: Case,
    curves: &[Curve],
    search: &SearchConfig,
) -> Result<AveragedRegions> {
    mc.validate()?;
    search.validate()?;
    let results: Vec<Result<CurveSet>> =
        (0..mc.trials as u64).into_par_iter().map(|i| trial_regions(cfg, mc, mode, case, curves, search, i)).collect();
    average_curve_sets(&results)
}
