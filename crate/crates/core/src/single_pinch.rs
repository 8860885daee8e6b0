//! Single activated pinch (`N = 1`): closed-form placements and regions.
//!
//! With one pinch the rates only depend on the distances to the user and the
//! target, so the C-C and S-C optima sit directly above the user and the
//! target. Every location on the segment between them is Pareto optimal; the
//! rate-profile parameter `α` selects one of them through a scalar root.

use alloc::vec::Vec;

use crate::math::log2_1p;
use crate::model::{fixed_antenna_rates, rate_pair};
use crate::region::{hull_of_rectangles, RateRegion};
use crate::{Beamformer, Error, RatePair, Result, Scenario, SystemConfig};

/// Interval width at which the bisection stops.
pub const BISECTION_WIDTH_TOL: f64 = 1e-12;
/// Residual |f_c − f_s| (bits) at which the bisection stops.
pub const BISECTION_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoSolution {
    pub alpha: f64,
    /// Optimal activated location.
    pub t_star: f64,
    /// Position along the user→target segment, `t_star = x_c + β (x_s − x_c)`.
    pub beta_star: f64,
    pub rates: RatePair,
}

fn require_single(cfg: &SystemConfig) -> Result<()> {
    if cfg.num_antennas_n != 1 {
        return Err(Error::AntennaCount { expected: 1, got: cfg.num_antennas_n });
    }
    Ok(())
}

fn solution_at(cfg: &SystemConfig, sc: &Scenario, alpha: f64, beta: f64) -> Result<ParetoSolution> {
    let t = sc.user_x + beta * (sc.target_x - sc.user_x);
    let rates = rate_pair(cfg, sc, &Beamformer::single(t)?)?;
    Ok(ParetoSolution { alpha, t_star: t, beta_star: beta, rates })
}

/// Communications-centric placement: the pinch sits above the user.
pub fn cc_design(cfg: &SystemConfig, sc: &Scenario) -> Result<ParetoSolution> {
    require_single(cfg)?;
    solution_at(cfg, sc, 1.0, 0.0)
}

/// Sensing-centric placement: the pinch sits above the target.
pub fn sc_design(cfg: &SystemConfig, sc: &Scenario) -> Result<ParetoSolution> {
    require_single(cfg)?;
    solution_at(cfg, sc, 0.0, 1.0)
}

/// Scaled loss-free rates along the user→target segment.
struct ProfileCurves {
    gamma_c: f64,
    gamma_s: f64,
    d_c_sq: f64,
    d_s_sq: f64,
    dx_sq: f64,
    frame_len: f64,
}

impl ProfileCurves {
    fn new(cfg: &SystemConfig, sc: &Scenario) -> Self {
        let dx = sc.delta_x();
        Self {
            gamma_c: cfg.comm_snr_scale(),
            gamma_s: cfg.sense_snr_scale(sc),
            d_c_sq: sc.d_c_sq(cfg),
            d_s_sq: sc.d_s_sq(cfg),
            dx_sq: dx * dx,
            frame_len: cfg.frame_len_l as f64,
        }
    }

    fn comm(&self, beta: f64) -> f64 {
        log2_1p(self.gamma_c / (self.d_c_sq + beta * beta * self.dx_sq))
    }

    fn sense(&self, beta: f64) -> f64 {
        let b = 1.0 - beta;
        log2_1p(self.gamma_s / (self.d_s_sq + b * b * self.dx_sq)) / self.frame_len
    }
}

/// Root of f_c(β) = f_s(β) on `[0, 1]` for a decreasing `f_c − f_s`.
fn bisect(mut g: impl FnMut(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut mid = 0.5;
    while hi - lo >= BISECTION_WIDTH_TOL {
        mid = 0.5 * (lo + hi);
        let v = g(mid);
        if v.abs() < BISECTION_RESIDUAL_TOL {
            return mid;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

/// Rate-profile optimum: maximizes `min(R_c/α, R_s/(1−α))` over the pinch location.
pub fn pareto_design(cfg: &SystemConfig, sc: &Scenario, alpha: f64) -> Result<ParetoSolution> {
    require_single(cfg)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange { name: "alpha", value: alpha });
    }
    if alpha == 1.0 {
        return cc_design(cfg, sc);
    }
    if alpha == 0.0 {
        return sc_design(cfg, sc);
    }
    sc.validate(cfg)?;
    let curves = ProfileCurves::new(cfg, sc);
    if curves.dx_sq == 0.0 {
        return solution_at(cfg, sc, alpha, 0.0);
    }
    let fc = |beta: f64| curves.comm(beta) / alpha;
    let fs = |beta: f64| curves.sense(beta) / (1.0 - alpha);

    let beta = if fs(1.0) < fc(1.0) {
        1.0
    } else if fs(0.0) > fc(0.0) {
        0.0
    } else {
        bisect(|b| fc(b) - fs(b))
    };
    solution_at(cfg, sc, alpha, beta)
}

fn check_alpha_grid(alpha_grid: &[f64]) -> Result<()> {
    if alpha_grid.is_empty() {
        return Err(Error::Empty("alpha grid"));
    }
    if let Some(&a) = alpha_grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::OutOfRange { name: "alpha", value: a });
    }
    if !alpha_grid.contains(&0.0) || !alpha_grid.contains(&1.0) {
        return Err(Error::InvalidConfig("alpha grid must contain 0 and 1"));
    }
    Ok(())
}

/// Rate-profile solutions for every `α` of the grid, in grid order.
pub fn pareto_frontier(cfg: &SystemConfig, sc: &Scenario, alpha_grid: &[f64]) -> Result<Vec<ParetoSolution>> {
    check_alpha_grid(alpha_grid)?;
    alpha_grid.iter().map(|&a| pareto_design(cfg, sc, a)).collect()
}

/// Time-sharing hull of the rate-profile rectangles over `alpha_grid`.
///
/// Anchors are the grid's corners in grid order.
pub fn single_pinch_region(cfg: &SystemConfig, sc: &Scenario, alpha_grid: &[f64]) -> Result<RateRegion> {
    let corners: Vec<RatePair> = pareto_frontier(cfg, sc, alpha_grid)?.iter().map(|s| s.rates).collect();
    hull_of_rectangles(&corners)
}

/// Like [`single_pinch_region`], but inserts further rate-profile solutions
/// between neighbouring frontier points until no boundary chord departs from
/// the frontier curve by more than `max_gap` (rate units).
///
/// The grid hull is inscribed in the exact region; this closes the gap.
pub fn single_pinch_region_refined(
    cfg: &SystemConfig,
    sc: &Scenario,
    alpha_grid: &[f64],
    max_gap: f64,
) -> Result<RateRegion> {
    if !(max_gap > 0.0) {
        return Err(Error::OutOfRange { name: "max_gap", value: max_gap });
    }
    let mut frontier = pareto_frontier(cfg, sc, alpha_grid)?;
    let mut corners: Vec<RatePair> = frontier.iter().map(|s| s.rates).collect();
    if sc.delta_x() > 0.0 {
        frontier.sort_by(|a, b| a.beta_star.total_cmp(&b.beta_star));
        frontier.dedup_by(|a, b| a.beta_star == b.beta_star);
        let curves = ProfileCurves::new(cfg, sc);
        for w in frontier.windows(2) {
            refine_between(cfg, sc, &curves, &w[0], &w[1], max_gap, 0, &mut corners)?;
        }
    }
    hull_of_rectangles(&corners)
}

const MAX_REFINE_DEPTH: u32 = 40;

#[allow(clippy::too_many_arguments)]
fn refine_between(
    cfg: &SystemConfig,
    sc: &Scenario,
    curves: &ProfileCurves,
    a: &ParetoSolution,
    b: &ParetoSolution,
    max_gap: f64,
    depth: u32,
    out: &mut Vec<RatePair>,
) -> Result<()> {
    if depth >= MAX_REFINE_DEPTH {
        return Ok(());
    }
    let beta = 0.5 * (a.beta_star + b.beta_star);
    // The profile parameter whose optimum is this β: both scaled rates equal.
    let (rc, rs) = (curves.comm(beta), curves.sense(beta));
    let mid = pareto_design(cfg, sc, rc / (rc + rs))?;
    let (pa, pb, pm) = (a.rates, b.rates, mid.rates);
    let len = ((pb.cr - pa.cr).powi(2) + (pb.sr - pa.sr).powi(2)).sqrt();
    let gap = if len > 0.0 {
        ((pb.cr - pa.cr) * (pm.sr - pa.sr) - (pb.sr - pa.sr) * (pm.cr - pa.cr)).abs() / len
    } else {
        0.0
    };
    out.push(pm);
    if gap > max_gap {
        refine_between(cfg, sc, curves, a, &mid, max_gap, depth + 1, out)?;
        refine_between(cfg, sc, curves, &mid, b, max_gap, depth + 1, out)?;
    }
    Ok(())
}

/// Rectangle of a conventional fixed-antenna system.
pub fn fixed_region(cfg: &SystemConfig, sc: &Scenario, tx_x: f64, rx_x: f64) -> Result<RateRegion> {
    hull_of_rectangles(&[fixed_antenna_rates(cfg, sc, tx_x, rx_x)?])
}

/// `n` uniformly spaced profile parameters covering `[0, 1]`.
pub fn uniform_alpha_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0, 1.0],
        _ => (0..n).map(|i| if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 }).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::region_subset;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    fn objective(r: RatePair, alpha: f64) -> f64 {
        (r.cr / alpha).min(r.sr / (1.0 - alpha))
    }

    #[test]
    fn cc_design_frozen_values() {
        let sc = Scenario::new(0.0, 1.0, -8.0, -1.0);
        let s = cc_design(&cfg(), &sc).unwrap();
        assert_eq!(s.t_star, 0.0);
        assert!((s.rates.cr - 16.628367501847475).abs() < 1e-11);
        assert!((s.rates.sr - 0.013992917309057392).abs() < 1e-14);
    }

    #[test]
    fn sc_design_frozen_values() {
        let sc = Scenario::new(0.0, 1.0, -8.0, -1.0);
        let s = sc_design(&cfg(), &sc).unwrap();
        assert_eq!(s.t_star, -8.0);
        assert!((s.rates.cr - 14.440791132059904).abs() < 1e-11);
        assert!((s.rates.sr - 0.090353060091434964).abs() < 1e-14);
    }

    #[test]
    fn aligned_user_and_target_max_both() {
        let sc = Scenario::new(2.0, 1.0, 2.0, -1.0);
        let cc = cc_design(&cfg(), &sc).unwrap();
        let sc_ = sc_design(&cfg(), &sc).unwrap();
        assert_eq!(cc.rates, sc_.rates);
        let expected = log2_1p(cfg().sense_snr_scale(&sc) / sc.d_s_sq(&cfg())) / 5.0;
        assert!((cc.rates.sr - expected).abs() < 1e-15);
    }

    #[test]
    fn far_offset_kills_cc_sensing() {
        let sc = Scenario::new(0.0, 1.0, 1e7, -1.0);
        assert!(cc_design(&cfg(), &sc).unwrap().rates.sr < 1e-12);
    }

    #[test]
    fn requires_single_antenna() {
        let sc = Scenario::new(0.0, 1.0, -8.0, -1.0);
        assert!(matches!(cc_design(&cfg().with_antennas(2), &sc), Err(Error::AntennaCount { expected: 1, got: 2 })));
    }

    #[test]
    fn alpha_extremes_dispatch() {
        let sc = Scenario::new(5.0, 1.0, -8.0, -1.0);
        assert_eq!(pareto_design(&cfg(), &sc, 1.0).unwrap().t_star, 5.0);
        assert_eq!(pareto_design(&cfg(), &sc, 0.0).unwrap().t_star, -8.0);
        assert!(pareto_design(&cfg(), &sc, 1.5).is_err());
        assert!(pareto_design(&cfg(), &sc, -0.1).is_err());
        assert!(pareto_design(&cfg(), &sc, f64::NAN).is_err());
    }

    #[test]
    fn interior_root_balances_scaled_rates() {
        let c = cfg();
        let sc = Scenario::new(-3.0, 1.0, -8.0, -1.0);
        let curves = ProfileCurves::new(&c, &sc);
        let mut interior = 0;
        // SR is two orders of magnitude below CR, so the interior branch
        // needs a profile parameter close to 1
        for i in 1..100 {
            let alpha = 1.0 - i as f64 * 1e-4;
            let s = pareto_design(&c, &sc, alpha).unwrap();
            assert!(s.t_star >= -8.0 && s.t_star <= -3.0);
            if s.beta_star > 0.0 && s.beta_star < 1.0 {
                interior += 1;
                let diff = curves.comm(s.beta_star) / alpha - curves.sense(s.beta_star) / (1.0 - alpha);
                assert!(diff.abs() <= 1e-9, "alpha {alpha}: residual {diff}");
            }
        }
        assert!(interior > 0);
    }

    #[test]
    fn mirrored_scenario_mirrors_solution() {
        let c = cfg();
        let a = Scenario::new(-2.0, 1.0, 6.0, -1.0);
        let b = Scenario::new(2.0, 1.0, -6.0, -1.0);
        for alpha in [0.02, 0.1, 0.3, 0.9] {
            let sa = pareto_design(&c, &a, alpha).unwrap();
            let sb = pareto_design(&c, &b, alpha).unwrap();
            assert!((sa.t_star + sb.t_star).abs() < 1e-9);
            assert!((sa.beta_star - sb.beta_star).abs() < 1e-9);
        }
    }

    #[test]
    fn pareto_is_monotone_in_alpha() {
        let c = cfg();
        let sc = Scenario::new(1.0, 1.0, -8.0, -1.0);
        let sols = pareto_frontier(&c, &sc, &uniform_alpha_grid(201)).unwrap();
        for w in sols.windows(2) {
            assert!(w[1].rates.cr >= w[0].rates.cr - 1e-12);
            assert!(w[1].rates.sr <= w[0].rates.sr + 1e-12);
        }
    }

    #[test]
    fn pareto_never_dominated_by_anchors() {
        let c = cfg();
        let sc = Scenario::new(1.0, 1.0, -8.0, -1.0);
        let cc = cc_design(&c, &sc).unwrap().rates;
        let sc_ = sc_design(&c, &sc).unwrap().rates;
        for alpha in uniform_alpha_grid(51) {
            let r = pareto_design(&c, &sc, alpha).unwrap().rates;
            assert!(!(r.cr < cc.cr - 1e-12 && r.sr < cc.sr - 1e-12));
            assert!(!(r.cr < sc_.cr - 1e-12 && r.sr < sc_.sr - 1e-12));
            // and the objective beats both anchors
            if alpha > 0.0 && alpha < 1.0 {
                assert!(objective(r, alpha) >= objective(cc, alpha).max(objective(sc_, alpha)) - 1e-9);
            }
        }
    }

    #[test]
    fn aligned_region_is_a_rectangle() {
        let c = cfg();
        let sc = Scenario::new(3.0, 1.0, 3.0, -2.0);
        let r = single_pinch_region(&c, &sc, &uniform_alpha_grid(11)).unwrap();
        let cc = cc_design(&c, &sc).unwrap().rates;
        assert_eq!(r.vertices(), &[RatePair::new(cc.cr, 0.0), cc, RatePair::new(0.0, cc.sr)]);
    }

    #[test]
    fn two_point_grid_is_time_sharing() {
        let c = cfg();
        let sc = Scenario::new(8.0, 1.0, -8.0, -1.0);
        let r = single_pinch_region(&c, &sc, &[0.0, 1.0]).unwrap();
        let expected =
            hull_of_rectangles(&[cc_design(&c, &sc).unwrap().rates, sc_design(&c, &sc).unwrap().rates]).unwrap();
        assert_eq!(r.vertices(), expected.vertices());
    }

    #[test]
    fn dense_grid_contains_time_sharing() {
        let c = cfg();
        for xc in [8.0, 0.0, -3.0, -7.0] {
            let sc = Scenario::new(xc, 1.0, -8.0, -1.0);
            let coarse = single_pinch_region(&c, &sc, &[0.0, 1.0]).unwrap();
            let dense = single_pinch_region(&c, &sc, &uniform_alpha_grid(101)).unwrap();
            assert!(region_subset(&coarse, &dense, 1e-12));
        }
    }

    #[test]
    fn refinement_contains_grid_region_and_frontier() {
        let c = cfg();
        let sc = Scenario::new(-3.0, 1.0, -8.0, -1.0);
        let grid = uniform_alpha_grid(11);
        let coarse = single_pinch_region(&c, &sc, &grid).unwrap();
        let fine = single_pinch_region_refined(&c, &sc, &grid, 1e-11).unwrap();
        assert!(region_subset(&coarse, &fine, 1e-10));
        // every location on the user→target segment is inside
        for i in 0..=1000 {
            let t = -3.0 - 5.0 * i as f64 / 1000.0;
            let p = rate_pair(&c, &sc, &Beamformer::single(t).unwrap()).unwrap();
            assert!(fine.contains(p, 1e-10), "t = {t}");
        }
    }

    #[test]
    fn grid_validation() {
        let c = cfg();
        let sc = Scenario::new(0.0, 1.0, -8.0, -1.0);
        assert!(matches!(single_pinch_region(&c, &sc, &[]), Err(Error::Empty(_))));
        assert!(single_pinch_region(&c, &sc, &[0.0, 0.5]).is_err());
        assert!(single_pinch_region(&c, &sc, &[0.0, 1.0, 1.2]).is_err());
    }

    #[test]
    fn fixed_region_examples() {
        let mut c = cfg();
        let sc = Scenario::new(3.0, 1.0, -8.0, -1.0);
        let r = fixed_region(&c, &sc, 0.0, 0.0).unwrap();
        assert!((r.cr_max() - 16.043412121553913).abs() < 1e-11);
        assert!((r.sr_max() - 0.0031302736231451572).abs() < 1e-14);
        c.power_w = 0.0;
        let zero = fixed_region(&c, &sc, 0.0, 0.0).unwrap();
        assert_eq!(zero.vertices(), &[RatePair::ZERO]);
    }

    #[test]
    fn fixed_between_user_and_target_nests() {
        let c = cfg();
        let sc = Scenario::new(4.0, 1.0, -6.0, -1.0);
        let pass = single_pinch_region_refined(&c, &sc, &uniform_alpha_grid(101), 1e-11).unwrap();
        for tf in [-5.0, -2.0, 0.0, 3.5] {
            let f = fixed_region(&c, &sc, tf, tf).unwrap();
            assert!(region_subset(&f, &pass, 1e-9));
        }
    }

    #[test]
    fn alpha_grid_helper() {
        assert_eq!(uniform_alpha_grid(3), alloc::vec![0.0, 0.5, 1.0]);
        assert_eq!(uniform_alpha_grid(1), alloc::vec![0.0, 1.0]);
        let g = uniform_alpha_grid(101);
        assert_eq!(g.len(), 101);
        assert_eq!(*g.last().unwrap(), 1.0);
    }
}
