use std::f64::consts::PI;

use crate::error::{ensure_positive, Error, Result};

/// Boundary length intensity of the group-cell boundary: `1 / r_M`.
pub fn length_intensity(r_m: f64) -> Result<f64> {
    ensure_positive("r_m", r_m)?;
    Ok(1.0 / r_m)
}

/// Leading term `2 delta / r_M` of the area intensity of the boundary
/// neighbourhood of width `delta`. The second-order term is dropped.
pub fn area_intensity(r_m: f64, delta: f64) -> Result<f64> {
    ensure_positive("r_m", r_m)?;
    if !(delta >= 0.0) {
        return Err(Error::param("delta", format!("must be >= 0, got {delta}")));
    }
    if delta >= r_m {
        return Err(Error::OutOfRegime(format!(
            "delta {delta} must be much smaller than r_M {r_m}"
        )));
    }
    Ok(2.0 * delta / r_m)
}

/// Handover rate for protection radius `r_m`: `2 speed / (pi r_M)`.
pub fn handover_rate_radius(speed: f64, r_m: f64) -> Result<f64> {
    ensure_positive("speed", speed)?;
    ensure_positive("r_m", r_m)?;
    Ok(2.0 * speed / (PI * r_m))
}

fn check_rate_inputs(speed: f64, lambda: f64, m: u32) -> Result<()> {
    ensure_positive("speed", speed)?;
    ensure_positive("lambda_bs", lambda)?;
    if m == 0 {
        return Err(Error::param("m_group", "must be >= 1"));
    }
    Ok(())
}

/// GCHO rate `2 speed sqrt(lambda) / (sqrt(pi) sqrt(M))`. `M = 1` is the
/// single-BS (traditional) baseline.
pub fn handover_rate_gcho(speed: f64, lambda: f64, m: u32) -> Result<f64> {
    check_rate_inputs(speed, lambda, m)?;
    Ok(gcho_rate_continuous(speed, lambda, m as f64))
}

/// GCHO-S rate, exactly half of [`handover_rate_gcho`].
pub fn handover_rate_gchos(speed: f64, lambda: f64, m: u32) -> Result<f64> {
    check_rate_inputs(speed, lambda, m)?;
    Ok(0.5 * gcho_rate_continuous(speed, lambda, m as f64))
}

pub(crate) fn gcho_rate_continuous(speed: f64, lambda: f64, m: f64) -> f64 {
    2.0 * speed * lambda.sqrt() / (PI.sqrt() * m.sqrt())
}
