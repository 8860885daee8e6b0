//! Multi-pinch beamforming by element-wise grid search.
//!
//! Each pinch in turn is moved to the grid point that maximizes the
//! rate-profile objective while the others stay put. Grid points closer than
//! the minimum spacing to another pinch are excluded. Sweeps repeat until the
//! objective stalls.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::log2_1p;
use crate::model::{pinch_term, rate_pair, POSITION_EPS};
use crate::region::{hull_of_rectangles, RateRegion};
use crate::{Beamformer, Error, RatePair, Result, Scenario, SystemConfig};

/// Interior profile parameters are kept this far from 0 and 1.
pub const ALPHA_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    /// `N` pinches one spacing apart, centred between user and target.
    SpreadMidpoint,
    /// Same spread, centred above the user.
    FromCc,
    /// Same spread, centred above the target.
    FromSc,
}

impl InitStrategy {
    pub const ALL: [InitStrategy; 3] = [InitStrategy::SpreadMidpoint, InitStrategy::FromCc, InitStrategy::FromSc];
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub grid_points_q: usize,
    pub max_iters: usize,
    pub rel_improvement_eps: f64,
    pub init_strategy: InitStrategy,
    /// Number of initializations tried; the best result is kept. The first
    /// ones cycle through the strategies starting at `init_strategy`, the
    /// rest are spreads centred at evenly spaced points of the range.
    pub restarts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points_q: 10_000,
            max_iters: 50,
            rel_improvement_eps: 1e-4,
            init_strategy: InitStrategy::SpreadMidpoint,
            restarts: 1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_q < 2 {
            return Err(Error::InvalidConfig("grid_points_q must be at least 2"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1"));
        }
        if !(self.rel_improvement_eps > 0.0) || !self.rel_improvement_eps.is_finite() {
            return Err(Error::OutOfRange { name: "rel_improvement_eps", value: self.rel_improvement_eps });
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1"));
        }
        Ok(())
    }
}

/// Result of one element-wise search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub beamformer: Beamformer,
    pub rates: RatePair,
    pub objective: f64,
    /// Objective after every element update, starting with the initial value.
    pub trace: Vec<f64>,
    pub sweeps: usize,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    Ok(())
}

fn guarded(alpha: f64) -> f64 {
    if alpha == 0.0 || alpha == 1.0 {
        alpha
    } else {
        alpha.clamp(ALPHA_GUARD, 1.0 - ALPHA_GUARD)
    }
}

fn profile(r: RatePair, alpha: f64) -> f64 {
    if alpha == 1.0 {
        r.cr
    } else if alpha == 0.0 {
        r.sr
    } else {
        (r.cr / alpha).min(r.sr / (1.0 - alpha))
    }
}

/// Rate-profile objective `min(R_c/α, R_s/(1−α))`.
pub fn objective_profile(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(profile(rate_pair(cfg, sc, bf)?, guarded(alpha)))
}

/// Precomputed per-grid-point channel terms for one (configuration, scenario).
#[derive(Debug, Clone)]
pub struct SearchGrid {
    points: Vec<f64>,
    comm: Vec<Complex64>,
    sense: Vec<Complex64>,
    comm_scale: f64,
    sense_scale: f64,
    frame_len: f64,
    spacing: f64,
}

impl SearchGrid {
    pub fn new(cfg: &SystemConfig, sc: &Scenario, search: &SearchConfig) -> Result<Self> {
        cfg.validate()?;
        sc.validate(cfg)?;
        search.validate()?;
        let q = search.grid_points_q;
        let (lo, hi) = (cfg.feed_x_t0, cfg.deploy_max_x);
        let step = (hi - lo) / (q - 1) as f64;
        let points: Vec<f64> = (0..q).map(|i| if i + 1 == q { hi } else { lo + step * i as f64 }).collect();
        let k0 = cfg.wavenumber_k0();
        let (dc2, ds2) = (sc.d_c_sq(cfg), sc.d_s_sq(cfg));
        let comm = points.iter().map(|&t| pinch_term(cfg, k0, sc.user_x, dc2, t)).collect();
        let sense = points.iter().map(|&t| pinch_term(cfg, k0, sc.target_x, ds2, t)).collect();
        let b = cfg.receive_loss_amplitude(sc);
        Ok(Self {
            points,
            comm,
            sense,
            comm_scale: cfg.comm_snr_scale(),
            sense_scale: cfg.sense_snr_scale(sc) * b * b,
            frame_len: cfg.frame_len_l as f64,
            spacing: cfg.min_spacing_delta,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Index of the grid point closest to `x` (lower index on ties).
    pub fn nearest(&self, x: f64) -> usize {
        let n = self.points.len();
        let lo = self.points[0];
        let step = (self.points[n - 1] - lo) / (n - 1) as f64;
        let i = ((x - lo) / step).round();
        if !(i >= 0.0) {
            0
        } else if i >= (n - 1) as f64 {
            n - 1
        } else {
            i as usize
        }
    }

    fn rates(&self, c: Complex64, s: Complex64) -> RatePair {
        RatePair::new(
            log2_1p(self.comm_scale * c.norm_sqr()),
            log2_1p(self.sense_scale * s.norm_sqr()) / self.frame_len,
        )
    }

    fn sums(&self, idx: &[usize], skip: Option<usize>) -> (Complex64, Complex64) {
        let mut c = Complex64::ZERO;
        let mut s = Complex64::ZERO;
        for (k, &i) in idx.iter().enumerate() {
            if Some(k) != skip {
                c += self.comm[i];
                s += self.sense[i];
            }
        }
        (c, s)
    }

    fn objective_of(&self, idx: &[usize], alpha: f64) -> f64 {
        let (c, s) = self.sums(idx, None);
        profile(self.rates(c, s), alpha)
    }

    fn blocked(&self, x: f64, idx: &[usize], n: usize) -> bool {
        idx.iter().enumerate().any(|(k, &i)| k != n && (x - self.points[i]).abs() < self.spacing - POSITION_EPS)
    }

    /// Grid argmax for pinch `n` with the others held fixed.
    fn best_for(&self, idx: &[usize], n: usize, alpha: f64) -> Result<(usize, f64)> {
        let (c0, s0) = self.sums(idx, Some(n));
        let mut best: Option<(usize, f64)> = None;
        for (q, &x) in self.points.iter().enumerate() {
            if self.blocked(x, idx, n) {
                continue;
            }
            let v = profile(self.rates(c0 + self.comm[q], s0 + self.sense[q]), alpha);
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((q, v));
            }
        }
        best.ok_or(Error::Infeasible { antenna: n })
    }

    fn indices_of(&self, bf: &Beamformer) -> Vec<usize> {
        bf.positions().iter().map(|&t| self.nearest(t)).collect()
    }

    fn beamformer(&self, idx: &[usize]) -> Result<Beamformer> {
        Beamformer::new(idx.iter().map(|&i| self.points[i]).collect())
    }

    /// `n` indices `k` apart (`k` the smallest step count covering the
    /// spacing) centred on `centre`, shifted to fit the grid.
    fn spread(&self, centre: f64, n: usize) -> Result<Vec<usize>> {
        let q = self.points.len();
        let step = (self.points[q - 1] - self.points[0]) / (q - 1) as f64;
        let k = if self.spacing <= POSITION_EPS {
            1
        } else {
            ((self.spacing - POSITION_EPS) / step).ceil().max(1.0) as usize
        };
        let span = k * (n - 1);
        if span >= q {
            return Err(Error::Infeasible { antenna: n - 1 });
        }
        let mid = self.nearest(centre) as isize;
        let first = (mid - (span / 2) as isize).clamp(0, (q - 1 - span) as isize) as usize;
        Ok((0..n).map(|i| first + i * k).collect())
    }
}

fn init_centre(sc: &Scenario, strategy: InitStrategy) -> f64 {
    match strategy {
        InitStrategy::SpreadMidpoint => 0.5 * (sc.user_x + sc.target_x),
        InitStrategy::FromCc => sc.user_x,
        InitStrategy::FromSc => sc.target_x,
    }
}

/// Grid-snapped initial beamformer for `strategy`.
pub fn initial_beamformer(cfg: &SystemConfig, sc: &Scenario, search: &SearchConfig) -> Result<Beamformer> {
    let grid = SearchGrid::new(cfg, sc, search)?;
    grid.beamformer(&grid.spread(init_centre(sc, search.init_strategy), cfg.num_antennas_n)?)
}

/// Moves pinch `n` of `bf` to its best admissible grid point.
///
/// Positions of `bf` are snapped to the grid first. The result is re-sorted.
pub fn optimize_element(
    cfg: &SystemConfig,
    sc: &Scenario,
    bf: &Beamformer,
    n: usize,
    alpha: f64,
    search: &SearchConfig,
) -> Result<Beamformer> {
    check_alpha(alpha)?;
    if bf.len() != cfg.num_antennas_n {
        return Err(Error::AntennaCount { expected: cfg.num_antennas_n, got: bf.len() });
    }
    if n >= bf.len() {
        return Err(Error::OutOfRange { name: "antenna index", value: n as f64 });
    }
    let grid = SearchGrid::new(cfg, sc, search)?;
    let mut idx = grid.indices_of(bf);
    let (q, _) = grid.best_for(&idx, n, guarded(alpha))?;
    idx[n] = q;
    idx.sort_unstable();
    grid.beamformer(&idx)
}

fn run_from(
    grid: &SearchGrid,
    mut idx: Vec<usize>,
    alpha: f64,
    search: &SearchConfig,
) -> Result<(Vec<usize>, Vec<f64>, usize)> {
    let mut current = grid.objective_of(&idx, alpha);
    let mut trace = alloc::vec![current];
    let mut sweeps = 0;
    while sweeps < search.max_iters {
        sweeps += 1;
        let before = current;
        for n in 0..idx.len() {
            let (q, v) = grid.best_for(&idx, n, alpha)?;
            // keep the incumbent unless strictly better
            if v > current {
                idx[n] = q;
                idx.sort_unstable();
                current = v;
            }
            trace.push(current);
        }
        let gain = current - before;
        if gain <= search.rel_improvement_eps * before.abs() {
            break;
        }
    }
    Ok((idx, trace, sweeps))
}

/// Element-wise search for the rate-profile problem with parameter `alpha`.
///
/// `alpha = 1` maximizes CR and `alpha = 0` maximizes SR.
pub fn optimize_beamformer(
    cfg: &SystemConfig,
    sc: &Scenario,
    alpha: f64,
    search: &SearchConfig,
) -> Result<SearchOutcome> {
    check_alpha(alpha)?;
    let grid = SearchGrid::new(cfg, sc, search)?;
    optimize_on_grid(cfg, sc, &grid, alpha, search)
}

/// As [`optimize_beamformer`], reusing a prepared grid.
pub fn optimize_on_grid(
    cfg: &SystemConfig,
    sc: &Scenario,
    grid: &SearchGrid,
    alpha: f64,
    search: &SearchConfig,
) -> Result<SearchOutcome> {
    check_alpha(alpha)?;
    let a = guarded(alpha);
    let start = InitStrategy::ALL.iter().position(|&s| s == search.init_strategy).unwrap_or(0);
    let mut best: Option<SearchOutcome> = None;
    let strategies = InitStrategy::ALL.len();
    let extra = search.restarts.saturating_sub(strategies);
    let (lo, hi) = (grid.points[0], grid.points[grid.points.len() - 1]);
    for r in 0..search.restarts {
        let centre = if r < strategies {
            init_centre(sc, InitStrategy::ALL[(start + r) % strategies])
        } else {
            // further starts tile the deployment range
            lo + (hi - lo) * ((r - strategies) as f64 + 0.5) / extra as f64
        };
        let init = grid.spread(centre, cfg.num_antennas_n)?;
        let (idx, trace, sweeps) = run_from(grid, init, a, search)?;
        let beamformer = grid.beamformer(&idx)?;
        let rates = rate_pair(cfg, sc, &beamformer)?;
        let objective = profile(rates, a);
        if best.as_ref().is_none_or(|b| objective > b.objective) {
            best = Some(SearchOutcome { beamformer, rates, objective, trace, sweeps });
        }
    }
    best.ok_or(Error::InvalidConfig("restarts must be at least 1"))
}

/// CR-maximizing beamformer.
pub fn cc_beamformer(cfg: &SystemConfig, sc: &Scenario, search: &SearchConfig) -> Result<SearchOutcome> {
    optimize_beamformer(cfg, sc, 1.0, search)
}

/// SR-maximizing beamformer.
pub fn sc_beamformer(cfg: &SystemConfig, sc: &Scenario, search: &SearchConfig) -> Result<SearchOutcome> {
    optimize_beamformer(cfg, sc, 0.0, search)
}

/// Corners of the achievable region: S-C, C-C, then one per entry of `alpha_grid`.
pub fn inner_bound_anchors(
    cfg: &SystemConfig,
    sc: &Scenario,
    alpha_grid: &[f64],
    search: &SearchConfig,
) -> Result<Vec<RatePair>> {
    for &a in alpha_grid {
        check_alpha(a)?;
    }
    let grid = SearchGrid::new(cfg, sc, search)?;
    let sc_rates = optimize_on_grid(cfg, sc, &grid, 0.0, search)?.rates;
    let cc_rates = optimize_on_grid(cfg, sc, &grid, 1.0, search)?.rates;
    let mut anchors = alloc::vec![sc_rates, cc_rates];
    for &a in alpha_grid {
        let r = if a == 0.0 {
            sc_rates
        } else if a == 1.0 {
            cc_rates
        } else {
            optimize_on_grid(cfg, sc, &grid, a, search)?.rates
        };
        anchors.push(r);
    }
    Ok(anchors)
}

/// Time-sharing hull of the S-C, C-C and rate-profile solutions.
///
/// An empty `alpha_grid` gives plain time sharing between C-C and S-C.
pub fn inner_bound_region(
    cfg: &SystemConfig,
    sc: &Scenario,
    alpha_grid: &[f64],
    search: &SearchConfig,
) -> Result<RateRegion> {
    hull_of_rectangles(&inner_bound_anchors(cfg, sc, alpha_grid, search)?)
}
