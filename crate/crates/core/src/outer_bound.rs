//! Outer bound on the multi-pinch rate region.
//!
//! Dropping the phases and applying Cauchy–Schwarz bounds both SNRs by
//! incoherent sums of `1/ρ_n²`. With every pinch between the user and the
//! target, write `t_n = x_c + β_n (x_s − x_c)`; the sums then only depend on
//! `Σβ_n²` through a majorization bound, and `Σβ_n² ≥ Z²/N` with
//! `Z = Σβ_n`. Sweeping `Z ∈ [0, N]` traces the bound.

use alloc::vec::Vec;

use crate::math::{check_finite, log2_1p};
use crate::region::{hull_of_rectangles, RateRegion};
use crate::{Error, RatePair, Result, Scenario, SystemConfig};

/// Axial offsets below this (m) use the array-gain cap instead.
pub const DEGENERATE_DELTA_X: f64 = 1e-9;
/// Default number of `Z` samples on `[0, N]`.
pub const DEFAULT_Z_POINTS: usize = 201;

const S_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub z_beta: f64,
    pub cr_ub: f64,
    pub sr_ub: f64,
}

/// Largest value of `Σ_n 1/(ρ² + β_n²)` over `β ∈ [0,1]^N` with `Σβ_n² = s`.
///
/// Attained by `⌊s⌋` ones, one fractional entry and zeros.
pub fn f_ub(rho_sq: f64, s: f64, n_antennas: usize) -> Result<f64> {
    check_finite("rho_sq", rho_sq)?;
    check_finite("s", s)?;
    if rho_sq <= 0.0 {
        return Err(Error::OutOfRange { name: "rho_sq", value: rho_sq });
    }
    let n = n_antennas as f64;
    if s < -S_SLACK || s > n + S_SLACK {
        return Err(Error::OutOfRange { name: "s", value: s });
    }
    let s = s.clamp(0.0, n);
    let k = s.floor();
    let frac = s - k;
    let value = if frac == 0.0 {
        k / (rho_sq + 1.0) + (n - k) / rho_sq
    } else {
        k / (rho_sq + 1.0) + 1.0 / (rho_sq + frac) + (n - k - 1.0) / rho_sq
    };
    Ok(value)
}

fn check_z(z_beta: f64, n: f64) -> Result<f64> {
    check_finite("z_beta", z_beta)?;
    if z_beta < -S_SLACK || z_beta > n + S_SLACK {
        return Err(Error::OutOfRange { name: "z_beta", value: z_beta });
    }
    Ok(z_beta.clamp(0.0, n))
}

/// Array-gain caps `(log₂(1+γ̄_c N²/d_c²), (1/L) log₂(1+γ̄_s N²/d_s²))`.
fn gain_caps(cfg: &SystemConfig, sc: &Scenario, comm_scale: f64, sense_scale: f64) -> RatePair {
    let n = cfg.num_antennas_n as f64;
    RatePair::new(
        log2_1p(comm_scale * n * n / sc.d_c_sq(cfg)),
        log2_1p(sense_scale * n * n / sc.d_s_sq(cfg)) / cfg.frame_len_l as f64,
    )
}

fn cr_bound(cfg: &SystemConfig, sc: &Scenario, comm_scale: f64, z: f64) -> Result<f64> {
    let n = cfg.num_antennas_n as f64;
    let z = check_z(z, n)?;
    let dx = sc.delta_x();
    if dx < DEGENERATE_DELTA_X {
        return Ok(gain_caps(cfg, sc, comm_scale, 0.0).cr);
    }
    let dx2 = dx * dx;
    let f = f_ub(sc.d_c_sq(cfg) / dx2, z * z / n, cfg.num_antennas_n)?;
    Ok(log2_1p(comm_scale * n / dx2 * f))
}

fn sr_bound(cfg: &SystemConfig, sc: &Scenario, sense_scale: f64, z: f64) -> Result<f64> {
    let n = cfg.num_antennas_n as f64;
    let z = check_z(z, n)?;
    let dx = sc.delta_x();
    if dx < DEGENERATE_DELTA_X {
        return Ok(gain_caps(cfg, sc, 0.0, sense_scale).sr);
    }
    let dx2 = dx * dx;
    let w = n - z;
    let f = f_ub(sc.d_s_sq(cfg) / dx2, w * w / n, cfg.num_antennas_n)?;
    Ok(log2_1p(sense_scale * n / dx2 * f) / cfg.frame_len_l as f64)
}

/// Communication-rate bound R̂_c(Z) for an ideal waveguide.
pub fn cr_outer(cfg: &SystemConfig, sc: &Scenario, z_beta: f64) -> Result<f64> {
    sc.validate(cfg)?;
    cr_bound(cfg, sc, cfg.comm_snr_scale(), z_beta)
}

/// Sensing-rate bound R̂_s(Z) for an ideal waveguide.
pub fn sr_outer(cfg: &SystemConfig, sc: &Scenario, z_beta: f64) -> Result<f64> {
    sc.validate(cfg)?;
    sr_bound(cfg, sc, cfg.sense_snr_scale(sc), z_beta)
}

/// `n` uniform samples of `[0, N]`.
pub fn uniform_z_grid(cfg: &SystemConfig, n: usize) -> Vec<f64> {
    let top = cfg.num_antennas_n as f64;
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0, top],
        _ => (0..n).map(|i| if i + 1 == n { top } else { top * i as f64 / (n - 1) as f64 }).collect(),
    }
}

fn bound_points(
    cfg: &SystemConfig,
    sc: &Scenario,
    z_grid: &[f64],
    comm_scale: f64,
    sense_scale: f64,
) -> Result<Vec<BoundPoint>> {
    cfg.validate()?;
    sc.validate(cfg)?;
    if z_grid.is_empty() {
        return Err(Error::Empty("z grid"));
    }
    z_grid
        .iter()
        .map(|&z| {
            Ok(BoundPoint {
                z_beta: z,
                cr_ub: cr_bound(cfg, sc, comm_scale, z)?,
                sr_ub: sr_bound(cfg, sc, sense_scale, z)?,
            })
        })
        .collect()
}

/// Bound samples `(Z, R̂_c, R̂_s)` over `z_grid` for an ideal waveguide.
pub fn outer_points(cfg: &SystemConfig, sc: &Scenario, z_grid: &[f64]) -> Result<Vec<BoundPoint>> {
    bound_points(cfg, sc, z_grid, cfg.comm_snr_scale(), cfg.sense_snr_scale(sc))
}

fn region_of(points: &[BoundPoint]) -> Result<RateRegion> {
    let corners: Vec<RatePair> = points.iter().map(|p| RatePair::new(p.cr_ub, p.sr_ub)).collect();
    hull_of_rectangles(&corners)
}

/// Hull of the bound rectangles over `z_grid`.
///
/// For `Δ_x < 1e-9` every sample collapses to the array-gain cap, so the
/// anchors stay aligned with `z_grid`.
pub fn outer_region(cfg: &SystemConfig, sc: &Scenario, z_grid: &[f64]) -> Result<RateRegion> {
    region_of(&outer_points(cfg, sc, z_grid)?)
}

/// Coherent `N²` array-gain rectangle, used when user and target are aligned.
pub fn degenerate_outer(cfg: &SystemConfig, sc: &Scenario) -> Result<RateRegion> {
    cfg.validate()?;
    sc.validate(cfg)?;
    hull_of_rectangles(&[gain_caps(cfg, sc, cfg.comm_snr_scale(), cfg.sense_snr_scale(sc))])
}

/// Power factor of the smallest in-waveguide loss any pinch between the
/// user and the target can see, and the receive-side factor.
pub fn case2_loss_factors(cfg: &SystemConfig, sc: &Scenario) -> (f64, f64) {
    let kappa = cfg.waveguide_loss_db_per_m;
    if kappa == 0.0 {
        return (1.0, 1.0);
    }
    let tx = 10f64.powf(-kappa * (cfg.feed_x_t0 - sc.user_x.min(sc.target_x)).abs() / 10.0);
    let rx = 10f64.powf(-kappa * (sc.target_x - cfg.feed_x_r0).abs() / 10.0);
    (tx, rx)
}

/// Outer bound with the SNR scales reduced by the loss to the nearest of
/// user and target (and the receive loss for sensing).
pub fn case2_points(cfg: &SystemConfig, sc: &Scenario, z_grid: &[f64]) -> Result<Vec<BoundPoint>> {
    let (tx, rx) = case2_loss_factors(cfg, sc);
    bound_points(cfg, sc, z_grid, cfg.comm_snr_scale() * tx, cfg.sense_snr_scale(sc) * tx * rx)
}

pub fn case2_outer(cfg: &SystemConfig, sc: &Scenario, z_grid: &[f64]) -> Result<RateRegion> {
    region_of(&case2_points(cfg, sc, z_grid)?)
}
