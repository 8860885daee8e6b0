//! Random user/target placement and averaged rates and regions.
//!
//! Trial `i` always sees the same uniform draws for a given seed, whatever
//! the sweep point, so curves over a sweep share one batch of realizations.
//! Per-trial work is exposed separately from the reductions so that callers
//! can evaluate trials in any order (or in parallel) and still reduce in
//! trial order.

use alloc::vec::Vec;

use crate::model::{fixed_antenna_rates, LOSSY_WAVEGUIDE_DB_PER_M};
use crate::multi_pinch::{inner_bound_anchors, optimize_on_grid, SearchConfig, SearchGrid};
use crate::outer_bound::{case2_outer, outer_region, uniform_z_grid, DEFAULT_Z_POINTS};
use crate::region::{average_regions, hull_of_rectangles, RateRegion};
use crate::rng::Stream;
use crate::single_pinch::{cc_design, sc_design, single_pinch_region, uniform_alpha_grid};
use crate::{Error, RatePair, Result, Scenario, SystemConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    /// Side of the placement rectangle along the waveguides (m).
    pub dx_m: f64,
    pub dy_m: f64,
    pub trials: usize,
    pub seed: u64,
    pub alpha_grid: Vec<f64>,
    /// Samples of the outer-bound parameter.
    pub z_points: usize,
    /// Waveguide loss of the lossy case (dB/m).
    pub lossy_db_per_m: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            dx_m: 20.0,
            dy_m: 8.0,
            trials: 1000,
            seed: 0,
            alpha_grid: uniform_alpha_grid(101),
            z_points: DEFAULT_Z_POINTS,
            lossy_db_per_m: LOSSY_WAVEGUIDE_DB_PER_M,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("dx_m", self.dx_m), ("dy_m", self.dy_m)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1"));
        }
        if let Some(&a) = self.alpha_grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::OutOfRange { name: "alpha", value: a });
        }
        if self.z_points < 2 {
            return Err(Error::InvalidConfig("z_points must be at least 2"));
        }
        if !(self.lossy_db_per_m >= 0.0) || !self.lossy_db_per_m.is_finite() {
            return Err(Error::OutOfRange { name: "lossy_db_per_m", value: self.lossy_db_per_m });
        }
        Ok(())
    }
}

/// Uniform draws `(x_c, y_c, x_s, y_s)` on `[0,1)` for one trial.
pub fn unit_draw(seed: u64, trial_index: u64) -> [f64; 4] {
    let mut s = Stream::new(seed, trial_index);
    [s.uniform(), s.uniform(), s.uniform(), s.uniform()]
}

/// Maps unit draws onto the centred `dx × dy` rectangle.
pub fn scenario_from_draw(u: [f64; 4], dx: f64, dy: f64) -> Scenario {
    Scenario::new((u[0] - 0.5) * dx, (u[1] - 0.5) * dy, (u[2] - 0.5) * dx, (u[3] - 0.5) * dy)
}

pub fn sample_scenario(mc: &McConfig, trial_index: u64) -> Scenario {
    scenario_from_draw(unit_draw(mc.seed, trial_index), mc.dx_m, mc.dy_m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Design {
    Cc,
    Sc,
    Fixed,
}

impl Design {
    pub fn label(self) -> &'static str {
        match self {
            Design::Cc => "cc",
            Design::Sc => "sc",
            Design::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Ideal,
    Lossy,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::Ideal => "ideal",
            Case::Lossy => "lossy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Side length `D_x` of the placement rectangle.
    DeployLength(Vec<f64>),
    /// Number of activated pinches (multi-pinch mode).
    Antennas(Vec<usize>),
}

/// Configuration used at one sweep point.
///
/// Single-pinch waveguides span the placement rectangle; multi-pinch ones
/// extend 1 m beyond it on both sides.
pub fn point_config(
    cfg: &SystemConfig,
    mode: Mode,
    case: Case,
    dx: f64,
    antennas: usize,
    mc: &McConfig,
) -> SystemConfig {
    let loss = match case {
        Case::Ideal => 0.0,
        Case::Lossy => mc.lossy_db_per_m,
    };
    match mode {
        Mode::Single => cfg.clone().with_deployment(0.5 * dx).with_antennas(1).with_loss(loss),
        Mode::Multi => cfg.clone().with_deployment(0.5 * dx + 1.0).with_antennas(antennas).with_loss(loss),
    }
}

/// One (sweep point, design, case) cell of a rate table.
#[derive(Debug, Clone, PartialEq)]
pub struct RateJob {
    pub sweep_value: f64,
    pub design: Design,
    pub case: Case,
    pub mode: Mode,
    pub dx: f64,
    pub config: SystemConfig,
}

impl RateJob {
    pub fn evaluate(&self, mc: &McConfig, search: &SearchConfig, trial_index: u64) -> Result<RatePair> {
        let sc = scenario_from_draw(unit_draw(mc.seed, trial_index), self.dx, mc.dy_m);
        let cfg = &self.config;
        match (self.design, self.mode) {
            (Design::Fixed, _) => fixed_antenna_rates(cfg, &sc, 0.0, 0.0),
            (Design::Cc, Mode::Single) => Ok(cc_design(cfg, &sc)?.rates),
            (Design::Sc, Mode::Single) => Ok(sc_design(cfg, &sc)?.rates),
            (d, Mode::Multi) => {
                let grid = SearchGrid::new(cfg, &sc, search)?;
                let alpha = if d == Design::Cc { 1.0 } else { 0.0 };
                Ok(optimize_on_grid(cfg, &sc, &grid, alpha, search)?.rates)
            }
        }
    }
}

/// Jobs of a rate table in output order: sweep point, then case, then design.
pub fn rate_jobs(
    cfg: &SystemConfig,
    mc: &McConfig,
    designs: &[Design],
    mode: Mode,
    sweep: &Sweep,
    cases: &[Case],
) -> Result<Vec<RateJob>> {
    mc.validate()?;
    let points: Vec<(f64, f64, usize)> = match sweep {
        Sweep::DeployLength(v) => v.iter().map(|&dx| (dx, dx, cfg.num_antennas_n)).collect(),
        Sweep::Antennas(v) => {
            if mode == Mode::Single && v.iter().any(|&n| n != 1) {
                return Err(Error::InvalidConfig("single-pinch mode sweeps cannot change the antenna count"));
            }
            v.iter().map(|&n| (n as f64, mc.dx_m, n)).collect()
        }
    };
    if points.is_empty() || designs.is_empty() || cases.is_empty() {
        return Err(Error::Empty("rate sweep"));
    }
    let mut jobs = Vec::new();
    for &(value, dx, n) in &points {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::OutOfRange { name: "dx_m", value: dx });
        }
        for &case in cases {
            let config = point_config(cfg, mode, case, dx, n, mc);
            config.validate()?;
            for &design in designs {
                jobs.push(RateJob { sweep_value: value, design, case, mode, dx, config: config.clone() });
            }
        }
    }
    Ok(jobs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSummary {
    pub mean: RatePair,
    pub std_error: RatePair,
    pub completed: usize,
    pub failed: usize,
}

/// Mean and standard error over the successful trials, in trial order.
pub fn summarize(results: &[Result<RatePair>]) -> Result<RateSummary> {
    let ok: Vec<RatePair> = results.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let failed = results.len() - ok.len();
    if ok.is_empty() {
        return Err(Error::Empty("successful trials"));
    }
    let n = ok.len() as f64;
    let mean = RatePair::new(ok.iter().map(|r| r.cr).sum::<f64>() / n, ok.iter().map(|r| r.sr).sum::<f64>() / n);
    let std_error = if ok.len() < 2 {
        RatePair::ZERO
    } else {
        let vc = ok.iter().map(|r| (r.cr - mean.cr).powi(2)).sum::<f64>() / (n - 1.0);
        let vs = ok.iter().map(|r| (r.sr - mean.sr).powi(2)).sum::<f64>() / (n - 1.0);
        RatePair::new((vc / n).sqrt(), (vs / n).sqrt())
    };
    Ok(RateSummary { mean, std_error, completed: ok.len(), failed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub sweep_value: f64,
    pub design: Design,
    pub case: Case,
    pub summary: RateSummary,
}

/// Averaged rates over `mc.trials` realizations for every job, sequentially.
pub fn average_rates(
    cfg: &SystemConfig,
    mc: &McConfig,
    designs: &[Design],
    mode: Mode,
    sweep: &Sweep,
    cases: &[Case],
    search: &SearchConfig,
) -> Result<Vec<RateRow>> {
    rate_jobs(cfg, mc, designs, mode, sweep, cases)?
        .iter()
        .map(|job| {
            let results: Vec<Result<RatePair>> = (0..mc.trials as u64).map(|i| job.evaluate(mc, search, i)).collect();
            Ok(RateRow {
                sweep_value: job.sweep_value,
                design: job.design,
                case: job.case,
                summary: summarize(&results)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    /// Single-pinch region over the profile grid.
    Pass,
    /// Time sharing between the C-C and S-C designs.
    TimeShare,
    /// Conventional antennas at `x = 0`.
    Fixed,
    /// Multi-pinch achievable region.
    Inner,
    /// Multi-pinch outer bound.
    Outer,
}

impl Curve {
    pub fn label(self) -> &'static str {
        match self {
            Curve::Pass => "pass",
            Curve::TimeShare => "timeshare",
            Curve::Fixed => "fixed",
            Curve::Inner => "inner",
            Curve::Outer => "outer",
        }
    }
}

pub type CurveSet = Vec<(Curve, RateRegion)>;

impl Mode {
    /// Curves available in this mode, in default output order.
    pub fn curves(self) -> &'static [Curve] {
        match self {
            Mode::Single => &[Curve::Pass, Curve::TimeShare, Curve::Fixed],
            Mode::Multi => &[Curve::Inner, Curve::TimeShare, Curve::Outer, Curve::Fixed],
        }
    }
}

/// Requested regions of one realization, in the order of `curves`. `cfg`
/// must already carry the deployment, antenna count and loss of the run.
pub fn scenario_regions(
    cfg: &SystemConfig,
    sc: &Scenario,
    mode: Mode,
    curves: &[Curve],
    alpha_grid: &[f64],
    z_points: usize,
    search: &SearchConfig,
) -> Result<CurveSet> {
    if curves.is_empty() {
        return Err(Error::Empty("curve list"));
    }
    if curves.iter().any(|c| !mode.curves().contains(c)) {
        return Err(Error::InvalidConfig("curve not available in this mode"));
    }
    let anchors = match mode {
        Mode::Multi if curves.contains(&Curve::Inner) => inner_bound_anchors(cfg, sc, alpha_grid, search)?,
        Mode::Multi if curves.contains(&Curve::TimeShare) => inner_bound_anchors(cfg, sc, &[], search)?,
        _ => Vec::new(),
    };
    let mut out = Vec::with_capacity(curves.len());
    for &curve in curves {
        let region = match (curve, mode) {
            (Curve::Fixed, _) => hull_of_rectangles(&[fixed_antenna_rates(cfg, sc, 0.0, 0.0)?])?,
            (Curve::Pass, _) => single_pinch_region(cfg, sc, alpha_grid)?,
            (Curve::TimeShare, Mode::Single) => single_pinch_region(cfg, sc, &[0.0, 1.0])?,
            (Curve::TimeShare, Mode::Multi) => hull_of_rectangles(&anchors[..2])?,
            (Curve::Inner, _) => hull_of_rectangles(&anchors)?,
            (Curve::Outer, _) => {
                let z = uniform_z_grid(cfg, z_points);
                if cfg.waveguide_loss_db_per_m > 0.0 {
                    case2_outer(cfg, sc, &z)?
                } else {
                    outer_region(cfg, sc, &z)?
                }
            }
        };
        out.push((curve, region));
    }
    Ok(out)
}

/// Regions of trial `trial_index`.
pub fn trial_regions(
    cfg: &SystemConfig,
    mc: &McConfig,
    mode: Mode,
    case: Case,
    curves: &[Curve],
    search: &SearchConfig,
    trial_index: u64,
) -> Result<CurveSet> {
    let pcfg = point_config(cfg, mode, case, mc.dx_m, cfg.num_antennas_n, mc);
    let sc = sample_scenario(mc, trial_index);
    scenario_regions(&pcfg, &sc, mode, curves, &mc.alpha_grid, mc.z_points, search)
}

#[derive(Debug, Clone)]
pub struct AveragedRegions {
    pub curves: CurveSet,
    pub completed: usize,
    pub failed: usize,
}

/// Averages each curve over the successful trials by matched anchors.
pub fn average_curve_sets(results: &[Result<CurveSet>]) -> Result<AveragedRegions> {
    let ok: Vec<&CurveSet> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let failed = results.len() - ok.len();
    let first = ok.first().ok_or(Error::Empty("successful trials"))?;
    let mut curves = Vec::with_capacity(first.len());
    for (k, (curve, region)) in first.iter().enumerate() {
        let regions: Vec<RateRegion> = ok.iter().map(|set| set[k].1.clone()).collect();
        curves.push((*curve, average_regions(&regions, region.anchors().len())?));
    }
    Ok(AveragedRegions { curves, completed: ok.len(), failed })
}

/// Average regions over `mc.trials` realizations, sequentially.
pub fn average_region(
    cfg: &SystemConfig,
    mc: &McConfig,
    mode: Mode,
    case: Case,
    curves: &[Curve],
    search: &SearchConfig,
) -> Result<AveragedRegions> {
    mc.validate()?;
    let results: Vec<Result<CurveSet>> =
        (0..mc.trials as u64).map(|i| trial_regions(cfg, mc, mode, case, curves, search, i)).collect();
    average_curve_sets(&results)
}
