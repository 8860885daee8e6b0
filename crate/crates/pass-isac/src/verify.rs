//! Self-checks run by `pass-isac verify`: the sensing identities and the
//! ordering of the achievable region and its bounds.

use pass_isac_core::model::{rate_pair, sense_rate};
use pass_isac_core::monte_carlo::{point_config, sample_scenario, Case, McConfig, Mode};
use pass_isac_core::multi_pinch::{inner_bound_region, SearchConfig};
use pass_isac_core::outer_bound::{cr_outer, f_ub, outer_region, sr_outer, uniform_z_grid};
use pass_isac_core::region::region_subset;
use pass_isac_core::rng::Stream;
use pass_isac_core::sensing::{
    empirical_mse, induced_channel, lemma2_check, mi_determinant, mi_scalar, mmse, VirtualChannel,
};
use pass_isac_core::single_pinch::{fixed_region, single_pinch_region_refined, uniform_alpha_grid};
use pass_isac_core::{Beamformer, Result, Scenario, SystemConfig};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub quick: bool,
    /// Multiplies every f_UB value used by the majorization check. Anything
    /// below 1 must make the suite fail.
    pub fub_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 0, quick: false, fub_scale: 1.0 }
    }
}

impl VerifyOptions {
    fn pick(&self, full: usize, quick: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

pub fn random_channel(rng: &mut Stream, len: usize) -> Result<VirtualChannel> {
    let h = (0..len)
        .map(|_| {
            let var = 1.0 + 4.0 * rng.uniform();
            rng.complex_normal(var)
        })
        .collect();
    VirtualChannel::new(h, 0.1 + 20.0 * rng.uniform(), 0.01 + 5.0 * rng.uniform())
}

/// Sorted positions in `[-half, half]` respecting the minimum spacing.
pub fn random_beamformer(rng: &mut Stream, cfg: &SystemConfig, half: f64) -> Result<Beamformer> {
    loop {
        let t: Vec<f64> = (0..cfg.num_antennas_n).map(|_| (2.0 * rng.uniform() - 1.0) * half).collect();
        let bf = Beamformer::from_unsorted(t);
        if let Ok(bf) = bf {
            if bf.check_feasible(cfg).is_ok() {
                return Ok(bf);
            }
        }
    }
}

fn scenarios(opts: &VerifyOptions, mc: &McConfig, count: usize) -> Vec<Scenario> {
    let mc = McConfig { seed: opts.seed, ..mc.clone() };
    (0..count as u64).map(|i| sample_scenario(&mc, i)).collect()
}

fn sylvester(opts: &VerifyOptions) -> Result<Check> {
    let mut rng = Stream::new(opts.seed, 1);
    let mut worst = 0.0f64;
    let n = opts.pick(1000, 200);
    for i in 0..n {
        let vc = random_channel(&mut rng, 1 + i % 16)?;
        worst = worst.max((mi_determinant(&vc)? - mi_scalar(&vc)).abs());
    }
    Ok(check("sylvester-identity", worst <= 1e-10, format!("{n} channels, max |det - scalar| = {worst:.3e} bits")))
}

fn mmse_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = Stream::new(opts.seed, 2);
    let draws = opts.pick(100_000, 20_000);
    let mut worst_z = 0.0f64;
    let mut in_range = true;
    for k in 0..3 {
        let vc = random_channel(&mut rng, 1 + 3 * k)?;
        let closed = mmse(&vc);
        in_range &= closed > 0.0 && closed <= vc.alpha_s();
        let emp = empirical_mse(&vc, draws, opts.seed.wrapping_add(k as u64))?;
        worst_z = worst_z.max((emp.mean - closed).abs() / emp.std_error);
    }
    let zero = VirtualChannel::new(vec![Default::default(); 4], 3.0, 1.0)?;
    in_range &= mmse(&zero) == 3.0;
    Ok(vec![
        check("mmse-simulation", worst_z <= 3.0, format!("{draws} draws, worst deviation {worst_z:.2} SE")),
        check("mmse-range", in_range, "mmse in (0, alpha_s], prior variance at h = 0".into()),
    ])
}

fn lemma_checks(opts: &VerifyOptions, cfg: &SystemConfig, mc: &McConfig) -> Result<Vec<Check>> {
    let multi = point_config(cfg, Mode::Multi, Case::Ideal, mc.dx_m, 3, mc);
    let half = 0.5 * mc.dx_m;
    let count = opts.pick(50, 10);
    let mut worst = 0.0f64;
    let mut agree = 0;
    for (i, sc) in scenarios(opts, mc, count).iter().enumerate() {
        let mut rng = Stream::new(opts.seed, 100 + i as u64);
        let cands: Vec<Beamformer> =
            (0..100).map(|_| random_beamformer(&mut rng, &multi, half)).collect::<Result<_>>()?;
        for bf in &cands[..5] {
            let lhs = multi.frame_len_l as f64 * sense_rate(&multi, sc, bf)?;
            let rhs = mi_scalar(&induced_channel(&multi, sc, bf)?);
            worst = worst.max((lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE));
        }
        agree += lemma2_check(&multi, sc, &cands)? as usize;
    }
    Ok(vec![
        check("sensing-rate-equals-mi", worst <= 1e-12, format!("max relative gap {worst:.3e}")),
        check("sr-mse-argmax", agree == count, format!("{agree}/{count} scenarios, 100 candidates each")),
    ])
}

fn majorization(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut rng = Stream::new(opts.seed, 3);
    let n_samples = opts.pick(10_000, 2_000);
    let mut violations = 0;
    for _ in 0..n_samples {
        let n = 1 + (rng.uniform() * 8.0) as usize;
        let rho = 1e-3 + 10.0 * rng.uniform();
        let beta: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let s: f64 = beta.iter().map(|b| b * b).sum();
        let lhs: f64 = beta.iter().map(|b| 1.0 / (rho + b * b)).sum();
        if lhs > opts.fub_scale * f_ub(rho, s, n)? + 1e-12 {
            violations += 1;
        }
    }
    let mut worst = 0.0f64;
    for n in 1..=8 {
        for k in 0..=4 * n {
            let s = k as f64 / 4.0;
            let rho = 0.37;
            let full = s.floor() as usize;
            let frac = s - full as f64;
            let mut profile = vec![1.0; full.min(n)];
            if full < n {
                profile.push(frac);
                profile.resize(n, 0.0);
            }
            let attained: f64 = profile.iter().map(|b| 1.0 / (rho + b)).sum();
            worst = worst.max((attained - opts.fub_scale * f_ub(rho, s, n)?).abs());
        }
    }
    Ok(vec![
        check("majorization-bound", violations == 0, format!("{violations} violations in {n_samples} samples")),
        check("majorization-extremal", worst <= 1e-12, format!("max |extremal - f_ub| = {worst:.3e}")),
    ])
}

fn nesting(opts: &VerifyOptions, cfg: &SystemConfig, mc: &McConfig) -> Result<Check> {
    let single = point_config(cfg, Mode::Single, Case::Ideal, mc.dx_m, 1, mc);
    let count = opts.pick(100, 20);
    let grid = uniform_alpha_grid(21);
    let ok = scenarios(opts, mc, count)
        .par_iter()
        .map(|sc| {
            let pass = single_pinch_region_refined(&single, sc, &grid, 1e-11)?;
            Ok(region_subset(&fixed_region(&single, sc, 0.0, 0.0)?, &pass, 1e-9))
        })
        .collect::<Result<Vec<bool>>>()?;
    let held = ok.iter().filter(|&&b| b).count();
    Ok(check("fixed-inside-single-pinch", held == count, format!("{held}/{count} scenarios")))
}

fn bound_chain(opts: &VerifyOptions, cfg: &SystemConfig, mc: &McConfig, search: &SearchConfig) -> Result<Vec<Check>> {
    let counts: &[usize] = if opts.quick { &[2, 4] } else { &[2, 4, 10] };
    let list = scenarios(opts, mc, opts.pick(10, 3));
    let grid = uniform_alpha_grid(11);
    let cases: Vec<(usize, &Scenario)> = counts.iter().flat_map(|&n| list.iter().map(move |sc| (n, sc))).collect();
    let held = cases
        .par_iter()
        .map(|&(n, sc)| {
            let multi = point_config(cfg, Mode::Multi, Case::Ideal, mc.dx_m, n, mc);
            let inner = inner_bound_region(&multi, sc, &grid, search)?;
            let outer = outer_region(&multi, sc, &uniform_z_grid(&multi, mc.z_points))?;
            Ok(region_subset(&inner, &outer, 1e-9))
        })
        .collect::<Result<Vec<bool>>>()?;
    let inside = held.iter().filter(|&&b| b).count();

    // random placements between user and target stay under the bound curve
    let mut rng = Stream::new(opts.seed, 4);
    let mut violations = 0;
    let samples = opts.pick(2000, 500);
    for k in 0..samples {
        let n = counts[k % counts.len()];
        let multi = point_config(cfg, Mode::Multi, Case::Ideal, mc.dx_m, n, mc);
        let sc = &list[k % list.len()];
        let (lo, hi) = (sc.user_x.min(sc.target_x), sc.user_x.max(sc.target_x));
        let t: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.uniform()).collect();
        let Ok(bf) = Beamformer::from_unsorted(t) else { continue };
        let z: f64 = bf.positions().iter().map(|t| (t - sc.user_x).abs() / (hi - lo)).sum();
        let r = rate_pair(&multi, sc, &bf)?;
        if r.cr > cr_outer(&multi, sc, z)? + 1e-12 || r.sr > sr_outer(&multi, sc, z)? + 1e-12 {
            violations += 1;
        }
    }
    Ok(vec![
        check("inner-inside-outer", inside == cases.len(), format!("{inside}/{} (scenario, N) pairs", cases.len())),
        check("placements-under-outer", violations == 0, format!("{violations} violations in {samples} placements")),
    ])
}

pub fn run_checks(
    cfg: &SystemConfig,
    mc: &McConfig,
    search: &SearchConfig,
    opts: &VerifyOptions,
) -> Result<Vec<Check>> {
    let mut out = vec![sylvester(opts)?];
    out.extend(mmse_checks(opts)?);
    out.extend(lemma_checks(opts, cfg, mc)?);
    out.extend(majorization(opts)?);
    out.push(nesting(opts, cfg, mc)?);
    out.extend(bound_chain(opts, cfg, mc, search)?);
    Ok(out)
}
