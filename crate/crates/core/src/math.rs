use core::f64::consts::TAU;

/// Reduces a phase to `[0, 2π)`.
#[inline]
pub(crate) fn wrap_phase(x: f64) -> f64 {
    let r = x - TAU * (x / TAU).floor();
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Amplitude factor of `loss_db_per_m` attenuation over `length` metres.
#[inline]
pub(crate) fn amplitude_loss(loss_db_per_m: f64, length: f64) -> f64 {
    if loss_db_per_m == 0.0 {
        1.0
    } else {
        10f64.powf(-loss_db_per_m * length / 20.0)
    }
}

#[inline]
pub(crate) fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / core::f64::consts::LN_2
}

pub(crate) fn check_finite(name: &'static str, x: f64) -> crate::Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(crate::Error::NonFinite(name))
    }
}
