//! Information-theoretic checks of the sensing rate.
//!
//! The echo over a frame of `L` snapshots is a virtual SIMO channel
//! `y = h β + n` with a Swerling-I reflection `β ~ CN(0, α_s)` and white
//! Gaussian noise. Its mutual information and the MSE of the conditional-mean
//! estimate of `β` are evaluated here both in closed form and from first
//! principles.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::math::{check_finite, log2_1p, wrap_phase};
use crate::model::{sense_channel_sum, sense_rate};
use crate::rng::Stream;
use crate::{Beamformer, Error, Result, Scenario, SystemConfig};

/// Largest frame handled by the explicit determinant.
pub const MAX_DETERMINANT_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct VirtualChannel {
    h: Vec<Complex64>,
    alpha_s: f64,
    sigma_sq: f64,
}

impl VirtualChannel {
    pub fn new(h: Vec<Complex64>, alpha_s: f64, sigma_sq: f64) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Empty("virtual channel"));
        }
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("virtual channel entry"));
        }
        for (name, v) in [("alpha_s", alpha_s), ("sigma_sq", sigma_sq)] {
            check_finite(name, v)?;
            if v <= 0.0 {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        Ok(Self { h, alpha_s, sigma_sq })
    }

    pub fn h(&self) -> &[Complex64] {
        &self.h
    }

    pub fn alpha_s(&self) -> f64 {
        self.alpha_s
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.iter().map(|z| z.norm_sqr()).sum()
    }

    /// ω = σ² + α_s ‖h‖², the variance of `h^H y / ‖h‖`.
    pub fn omega(&self) -> f64 {
        self.sigma_sq + self.alpha_s * self.norm_sqr()
    }
}

/// Unit-modulus chirp `e^{jπ l²/L}`, so that `‖s‖² = L`.
pub fn unit_stream(len: usize) -> Vec<Complex64> {
    let l = len as f64;
    (0..len)
        .map(|i| {
            let i = i as f64;
            Complex64::from_polar(1.0, wrap_phase(PI * i * i / l))
        })
        .collect()
}

/// Virtual channel seen by the sensing receiver for beamformer `bf`, with
/// the receive pinch aligned above the target.
pub fn induced_channel(cfg: &SystemConfig, sc: &Scenario, bf: &Beamformer) -> Result<VirtualChannel> {
    cfg.validate()?;
    sc.validate(cfg)?;
    if bf.len() != cfg.num_antennas_n {
        return Err(Error::AntennaCount { expected: cfg.num_antennas_n, got: bf.len() });
    }
    let eta = cfg.eta_m2();
    let k0 = cfg.wavenumber_k0();
    let d_r = sc.d_r_sq(cfg).sqrt();
    let b = cfg.receive_loss_amplitude(sc);
    let g_r = Complex64::from_polar(eta.sqrt() * b / d_r, -wrap_phase(k0 * d_r));
    let phi_r = Complex64::from_polar(1.0, -wrap_phase(k0 * cfg.n_eff * (sc.target_x - cfg.feed_x_r0).abs()));
    let tx = sense_channel_sum(cfg, sc, bf) * eta.sqrt();
    let gain = phi_r * g_r * tx * (cfg.power_w / cfg.num_antennas_n as f64).sqrt();
    let h = unit_stream(cfg.frame_len_l as usize).into_iter().map(|s| gain * s).collect();
    VirtualChannel::new(h, cfg.alpha_s, cfg.noise_sense_w)
}

/// `log₂ det(I + (α_s/σ²) h h^H)` by LU factorization with partial pivoting.
pub fn mi_determinant(vc: &VirtualChannel) -> Result<f64> {
    let l = vc.h.len();
    if l > MAX_DETERMINANT_LEN {
        return Err(Error::OutOfRange { name: "frame length", value: l as f64 });
    }
    let c = vc.alpha_s / vc.sigma_sq;
    let mut a: Vec<Complex64> = Vec::with_capacity(l * l);
    for i in 0..l {
        for j in 0..l {
            let mut v = vc.h[i] * vc.h[j].conj() * c;
            if i == j {
                v += Complex64::new(1.0, 0.0);
            }
            a.push(v);
        }
    }
    let mut log_abs_det = 0.0;
    for k in 0..l {
        let p = (k..l).max_by(|&x, &y| a[x * l + k].norm().total_cmp(&a[y * l + k].norm())).unwrap_or(k);
        if p != k {
            for j in 0..l {
                a.swap(k * l + j, p * l + j);
            }
        }
        let pivot = a[k * l + k];
        if pivot == Complex64::ZERO {
            return Err(Error::NonFinite("singular determinant"));
        }
        log_abs_det += pivot.norm().ln();
        for i in k + 1..l {
            let f = a[i * l + k] / pivot;
            for j in k..l {
                let u = a[k * l + j];
                a[i * l + j] -= f * u;
            }
        }
    }
    Ok(log_abs_det / LN_2)
}

/// `log₂(1 + α_s ‖h‖²/σ²)`.
pub fn mi_scalar(vc: &VirtualChannel) -> f64 {
    log2_1p(vc.alpha_s * vc.norm_sqr() / vc.sigma_sq)
}

/// MSE of the conditional-mean estimate of the reflection coefficient.
pub fn mmse(vc: &VirtualChannel) -> f64 {
    vc.alpha_s * vc.sigma_sq / vc.omega()
}

/// Empirical MSE of `(α_s/ω) h^H y` over `draws` simulated frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalMse {
    pub mean: f64,
    pub std_error: f64,
    pub draws: usize,
}

pub fn empirical_mse(vc: &VirtualChannel, draws: usize, seed: u64) -> Result<EmpiricalMse> {
    if draws < 2 {
        return Err(Error::OutOfRange { name: "draws", value: draws as f64 });
    }
    let mut rng = Stream::new(seed, 0);
    let w = vc.alpha_s / vc.omega();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..draws {
        let beta = rng.complex_normal(vc.alpha_s);
        let mut proj = Complex64::ZERO;
        for hl in &vc.h {
            let y = hl * beta + rng.complex_normal(vc.sigma_sq);
            proj += hl.conj() * y;
        }
        let e = (beta - proj * w).norm_sqr();
        sum += e;
        sum_sq += e * e;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(EmpiricalMse { mean, std_error: (var / n).sqrt(), draws })
}

/// Whether the candidate with the largest sensing rate is also the one with
/// the smallest MSE (first index wins ties on both sides).
pub fn lemma2_check(cfg: &SystemConfig, sc: &Scenario, candidates: &[Beamformer]) -> Result<bool> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate beamformers"));
    }
    let mut best_sr = (0, f64::NEG_INFINITY);
    let mut best_mse = (0, f64::INFINITY);
    for (i, bf) in candidates.iter().enumerate() {
        let sr = sense_rate(cfg, sc, bf)?;
        let e = mmse(&induced_channel(cfg, sc, bf)?);
        if sr > best_sr.1 {
            best_sr = (i, sr);
        }
        if e < best_mse.1 {
            best_mse = (i, e);
        }
    }
    Ok(best_sr.0 == best_mse.0)
}
