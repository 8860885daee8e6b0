//! System model: geometry, channel sums, SNRs and rates.
//!
//! The transmit waveguide runs parallel to the x-axis at `(y_tx, d)`, the
//! receive waveguide at `(y_rx, d)`. Users and targets lie on the ground
//! plane. All powers are in watts; rates are in bit/s/Hz.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::math::{amplitude_loss, check_finite, log2_1p, wrap_phase};
use crate::{Error, Result, SPEED_OF_LIGHT};

/// Tolerance (m) applied to spacing and range checks.
pub const POSITION_EPS: f64 = 1e-12;

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Physical and system constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub carrier_freq_hz: f64,
    /// Effective refractive index of the dielectric waveguide.
    pub n_eff: f64,
    /// Height of both waveguides above the ground plane (m).
    pub waveguide_height_d: f64,
    pub y_tx: f64,
    pub y_rx: f64,
    /// Feed point of the transmit waveguide (t_0).
    pub feed_x_t0: f64,
    /// Feed point of the receive waveguide (r_0).
    pub feed_x_r0: f64,
    /// Largest admissible activated position on the transmit waveguide.
    pub deploy_max_x: f64,
    pub power_w: f64,
    pub noise_comm_w: f64,
    pub noise_sense_w: f64,
    /// ISAC frame length (number of snapshots).
    pub frame_len_l: u32,
    /// Average reflection strength of the target (RCS prior variance).
    pub alpha_s: f64,
    pub num_antennas_n: usize,
    /// Minimum spacing between activated pinches (m).
    pub min_spacing_delta: f64,
    /// In-waveguide attenuation (dB/m); zero for an ideal waveguide.
    pub waveguide_loss_db_per_m: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let carrier_freq_hz = 28e9;
        let wavelength = SPEED_OF_LIGHT / carrier_freq_hz;
        Self {
            carrier_freq_hz,
            n_eff: 1.4,
            waveguide_height_d: 3.0,
            y_tx: -2.0,
            y_rx: 2.0,
            feed_x_t0: -10.0,
            feed_x_r0: -10.0,
            deploy_max_x: 10.0,
            power_w: dbm_to_watts(10.0),
            noise_comm_w: dbm_to_watts(-114.0),
            noise_sense_w: dbm_to_watts(-114.0),
            frame_len_l: 5,
            alpha_s: 10.0,
            num_antennas_n: 1,
            min_spacing_delta: wavelength / 2.0,
            waveguide_loss_db_per_m: 0.0,
        }
    }
}

/// In-waveguide loss of the lossy ("Case II") configuration, dB/m.
pub const LOSSY_WAVEGUIDE_DB_PER_M: f64 = 0.08;

impl SystemConfig {
    /// Path-loss constant η = c² / (16 π² f_c²).
    pub fn eta_m2(&self) -> f64 {
        SPEED_OF_LIGHT * SPEED_OF_LIGHT / (16.0 * PI * PI * self.carrier_freq_hz * self.carrier_freq_hz)
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }

    pub fn wavenumber_k0(&self) -> f64 {
        2.0 * PI / self.wavelength()
    }

    /// Symmetric deployment `[-half_span, half_span]` with both feeds at the left end.
    pub fn with_deployment(mut self, half_span: f64) -> Self {
        self.feed_x_t0 = -half_span;
        self.feed_x_r0 = -half_span;
        self.deploy_max_x = half_span;
        self
    }

    pub fn with_antennas(mut self, n: usize) -> Self {
        self.num_antennas_n = n;
        self
    }

    pub fn with_loss(mut self, db_per_m: f64) -> Self {
        self.waveguide_loss_db_per_m = db_per_m;
        self
    }

    /// Communication SNR scale γ̄_c = Pη / (Nσ_c²).
    pub fn comm_snr_scale(&self) -> f64 {
        self.power_w * self.eta_m2() / (self.num_antennas_n as f64 * self.noise_comm_w)
    }

    /// Sensing SNR scale γ̄_s = PLη²α_s / (Nσ_s²d_r²) with the receive pinch at `x_s`.
    pub fn sense_snr_scale(&self, sc: &Scenario) -> f64 {
        let eta = self.eta_m2();
        self.power_w * self.frame_len_l as f64 * eta * eta * self.alpha_s
            / (self.num_antennas_n as f64 * self.noise_sense_w * sc.d_r_sq(self))
    }

    /// Amplitude factor of the receive-side waveguide loss for a pinch aligned at `x_s`.
    pub fn receive_loss_amplitude(&self, sc: &Scenario) -> f64 {
        amplitude_loss(self.waveguide_loss_db_per_m, (sc.target_x - self.feed_x_r0).abs())
    }

    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("n_eff", self.n_eff),
            ("waveguide_height_d", self.waveguide_height_d),
            ("y_tx", self.y_tx),
            ("y_rx", self.y_rx),
            ("feed_x_t0", self.feed_x_t0),
            ("feed_x_r0", self.feed_x_r0),
            ("deploy_max_x", self.deploy_max_x),
            ("power_w", self.power_w),
            ("noise_comm_w", self.noise_comm_w),
            ("noise_sense_w", self.noise_sense_w),
            ("alpha_s", self.alpha_s),
            ("min_spacing_delta", self.min_spacing_delta),
            ("waveguide_loss_db_per_m", self.waveguide_loss_db_per_m),
        ];
        for (name, value) in reals {
            check_finite(name, value)?;
        }
        let positive = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("n_eff", self.n_eff),
            ("power_w", self.power_w),
            ("noise_comm_w", self.noise_comm_w),
            ("noise_sense_w", self.noise_sense_w),
            ("alpha_s", self.alpha_s),
        ];
        for (name, value) in positive {
            if value <= 0.0 {
                return Err(Error::OutOfRange { name, value });
            }
        }
        if self.min_spacing_delta < 0.0 {
            return Err(Error::OutOfRange { name: "min_spacing_delta", value: self.min_spacing_delta });
        }
        if self.waveguide_loss_db_per_m < 0.0 {
            return Err(Error::OutOfRange { name: "waveguide_loss_db_per_m", value: self.waveguide_loss_db_per_m });
        }
        if self.frame_len_l == 0 {
            return Err(Error::InvalidConfig("frame_len_L must be at least 1"));
        }
        if self.num_antennas_n == 0 {
            return Err(Error::InvalidConfig("num_antennas_N must be at least 1"));
        }
        if self.feed_x_t0 > self.deploy_max_x {
            return Err(Error::InvalidConfig("feed_x_t0 exceeds deploy_max_x"));
        }
        let needed = self.min_spacing_delta * (self.num_antennas_n - 1) as f64;
        if needed > self.deploy_max_x - self.feed_x_t0 + POSITION_EPS {
            return Err(Error::InvalidConfig("deployment range too short for N spaced antennas"));
        }
        Ok(())
    }
}

/// Planar positions of the communication user and the sensing target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub user_x: f64,
    pub user_y: f64,
    pub target_x: f64,
    pub target_y: f64,
}

impl Scenario {
    pub fn new(user_x: f64, user_y: f64, target_x: f64, target_y: f64) -> Self {
        Self { user_x, user_y, target_x, target_y }
    }

    /// Squared distance from the user to the transmit waveguide axis.
    pub fn d_c_sq(&self, cfg: &SystemConfig) -> f64 {
        let dy = self.user_y - cfg.y_tx;
        dy * dy + cfg.waveguide_height_d * cfg.waveguide_height_d
    }

    /// Squared distance from the target to the transmit waveguide axis.
    pub fn d_s_sq(&self, cfg: &SystemConfig) -> f64 {
        let dy = self.target_y - cfg.y_tx;
        dy * dy + cfg.waveguide_height_d * cfg.waveguide_height_d
    }

    /// Squared distance from the target to the receive waveguide axis.
    pub fn d_r_sq(&self, cfg: &SystemConfig) -> f64 {
        let dy = self.target_y - cfg.y_rx;
        dy * dy + cfg.waveguide_height_d * cfg.waveguide_height_d
    }

    /// Axial offset |x_c − x_s|.
    pub fn delta_x(&self) -> f64 {
        (self.user_x - self.target_x).abs()
    }

    pub fn validate(&self, cfg: &SystemConfig) -> Result<()> {
        check_finite("user_x", self.user_x)?;
        check_finite("user_y", self.user_y)?;
        check_finite("target_x", self.target_x)?;
        check_finite("target_y", self.target_y)?;
        if self.d_c_sq(cfg) <= 0.0 || self.d_s_sq(cfg) <= 0.0 || self.d_r_sq(cfg) <= 0.0 {
            return Err(Error::InvalidConfig("user or target lies on a waveguide axis"));
        }
        Ok(())
    }
}

/// Activated pinch positions `t_1 < … < t_N` on the transmit waveguide.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    positions: Vec<f64>,
}

impl Beamformer {
    pub fn new(positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Empty("beamformer positions"));
        }
        for &t in &positions {
            check_finite("beamformer position", t)?;
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Unordered);
        }
        Ok(Self { positions })
    }

    /// Single activated pinch at `t`.
    pub fn single(t: f64) -> Result<Self> {
        Self::new(alloc::vec![t])
    }

    /// Builds a beamformer from unordered positions.
    pub fn from_unsorted(mut positions: Vec<f64>) -> Result<Self> {
        positions.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        Self::new(positions)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Checks the spacing and deployment-range constraints against `cfg`.
    pub fn check_feasible(&self, cfg: &SystemConfig) -> Result<()> {
        self.check_len(cfg)?;
        for &t in &self.positions {
            if t < cfg.feed_x_t0 - POSITION_EPS || t > cfg.deploy_max_x + POSITION_EPS {
                return Err(Error::OutOfRange { name: "beamformer position", value: t });
            }
        }
        for w in self.positions.windows(2) {
            if w[1] - w[0] < cfg.min_spacing_delta - POSITION_EPS {
                return Err(Error::OutOfRange { name: "antenna spacing", value: w[1] - w[0] });
            }
        }
        Ok(())
    }

    fn check_len(&self, cfg: &SystemConfig) -> Result<()> {
        if self.positions.len() != cfg.num_antennas_n {
            return Err(Error::AntennaCount { expected: cfg.num_antennas_n, got: self.positions.len() });
        }
        Ok(())
    }
}

/// A (communication rate, sensing rate) pair in bit/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatePair {
    pub cr: f64,
    pub sr: f64,
}

impl RatePair {
    pub const ZERO: RatePair = RatePair { cr: 0.0, sr: 0.0 };

    pub fn new(cr: f64, sr: f64) -> Self {
        Self { cr, sr }
    }

    pub fn is_valid(&self) -> bool {
        self.cr.is_finite() && self.sr.is_finite() && self.cr >= 0.0 && self.sr >= 0.0
    }
}

/// Channel contribution of one pinch at `t` towards a point at axial
/// position `x` and squared perpendicular distance `dist_sq`, including the
/// in-waveguide phase and amplitude loss. The path-loss constant is excluded.
#[inline]
pub(crate) fn pinch_term(cfg: &SystemConfig, k0: f64, x: f64, dist_sq: f64, t: f64) -> Complex64 {
    let dt = t - x;
    let rho = (dist_sq + dt * dt).sqrt();
    let guided = (t - cfg.feed_x_t0).abs();
    let phase = wrap_phase(k0 * rho) + wrap_phase(k0 * cfg.n_eff * guided);
    let amp = amplitude_loss(cfg.waveguide_loss_db_per_m, guided) / rho;
    let (s, c) = phase.sin_cos();
    Complex64::new(amp * c, -amp * s)
}

/// Σ_n a_n e^{−j(k0ρ_n + k0 n_eff (t_n − t_0))} / ρ_n.
pub(crate) fn coherent_sum(cfg: &SystemConfig, x: f64, dist_sq: f64, positions: &[f64]) -> Complex64 {
    let k0 = cfg.wavenumber_k0();
    positions.iter().map(|&t| pinch_term(cfg, k0, x, dist_sq, t)).sum()
}

/// Complex transmit-side sum towards the user.
pub fn comm_channel_sum(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer) -> Complex64 {
    coherent_sum(cfg, sc.user_x, sc.d_c_sq(cfg), bf.positions())
}

/// Complex transmit-side sum towards the target.
pub fn sense_channel_sum(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer) -> Complex64 {
    coherent_sum(cfg, sc.target_x, sc.d_s_sq(cfg), bf.positions())
}

fn check_inputs(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer) -> Result<()> {
    for (name, v) in [
        ("carrier_freq_hz", cfg.carrier_freq_hz),
        ("power_w", cfg.power_w),
        ("noise_comm_w", cfg.noise_comm_w),
        ("noise_sense_w", cfg.noise_sense_w),
        ("waveguide_loss_db_per_m", cfg.waveguide_loss_db_per_m),
        ("feed_x_t0", cfg.feed_x_t0),
        ("feed_x_r0", cfg.feed_x_r0),
    ] {
        check_finite(name, v)?;
    }
    sc.validate(cfg)?;
    bf.check_len(cfg)
}

/// Communication SNR γ_c at the user.
pub fn comm_snr(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer) -> Result<f64> {
    check_inputs(cfg, sc, bf)?;
    let snr = cfg.comm_snr_scale() * comm_channel_sum(cfg, sc, bf).norm_sqr();
    check_finite("comm_snr", snr)
}

pub fn comm_rate(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer) -> Result<f64> {
    comm_snr(cfg, sc, bf).map(log2_1p)
}

/// Effective sensing SNR γ_s with the receive pinch aligned at `x_s`.
pub fn sense_snr(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer) -> Result<f64> {
    check_inputs(cfg, sc, bf)?;
    let b = cfg.receive_loss_amplitude(sc);
    let snr = cfg.sense_snr_scale(sc) * b * b * sense_channel_sum(cfg, sc, bf).norm_sqr();
    check_finite("sense_snr", snr)
}

/// Sensing rate (1/L) log₂(1 + γ_s).
pub fn sense_rate(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer) -> Result<f64> {
    let snr = sense_snr(cfg, sc, bf)?;
    Ok(log2_1p(snr) / cfg.frame_len_l as f64)
}

pub fn rate_pair(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer) -> Result<RatePair> {
    Ok(RatePair { cr: comm_rate(cfg, sc, bf)?, sr: sense_rate(cfg, sc, bf)? })
}

/// Rates of a conventional single-antenna system with the transmit antenna
/// at `tx_x` and the receive antenna at `rx_x` (no waveguide, no loss).
pub fn fixed_antenna_rates(cfg: &SystemConfig, sc: &Scenario, tx_x: f64, rx_x: f64) -> Result<RatePair> {
    check_finite("tx_x", tx_x)?;
    check_finite("rx_x", rx_x)?;
    sc.validate(cfg)?;
    let eta = cfg.eta_m2();
    let comm_scale = cfg.power_w * eta / cfg.noise_comm_w;
    let dtc = tx_x - sc.user_x;
    let cr = log2_1p(comm_scale / (sc.d_c_sq(cfg) + dtc * dtc));

    let drx = rx_x - sc.target_x;
    let sense_scale = cfg.power_w * cfg.frame_len_l as f64 * eta * eta * cfg.alpha_s
        / (cfg.noise_sense_w * (sc.d_r_sq(cfg) + drx * drx));
    let dts = tx_x - sc.target_x;
    let sr = log2_1p(sense_scale / (sc.d_s_sq(cfg) + dts * dts)) / cfg.frame_len_l as f64;
    Ok(RatePair { cr, sr })
}
