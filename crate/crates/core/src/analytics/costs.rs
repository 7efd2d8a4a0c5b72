use std::f64::consts::PI;

use super::rates::{gcho_rate_continuous, handover_rate_gcho, handover_rate_gchos};
use crate::error::{ensure_positive, Error, Result};

/// Handover and cooperation-signalling cost model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    /// Delay of one handover (s).
    pub t_h: f64,
    /// Cost of one handoff (s).
    pub s1: f64,
    /// Cost of one CSI feedback message (s).
    pub s2: f64,
    /// Feedback messages per BS per interval.
    pub mu: f64,
    /// Feedback interval (s).
    pub t_interval: f64,
}

impl CostParams {
    pub fn new(t_h: f64, s1: f64, s2: f64, mu: f64, t_interval: f64) -> Result<Self> {
        ensure_positive("t_h", t_h)?;
        ensure_positive("s1", s1)?;
        ensure_positive("s2", s2)?;
        ensure_positive("mu", mu)?;
        ensure_positive("t_interval", t_interval)?;
        Ok(CostParams {
            t_h,
            s1,
            s2,
            mu,
            t_interval,
        })
    }

    /// `t_H = 0.3 s`, `S1 = t_H`, `mu = 1`, `T = 5 ms`, `S2 = 0.01 T`.
    pub fn reference() -> Self {
        let t_interval = 0.005;
        CostParams {
            t_h: 0.3,
            s1: 0.3,
            s2: 0.01 * t_interval,
            mu: 1.0,
            t_interval,
        }
    }
}

/// Cooperation signalling overhead `mu M / T` (messages/s).
pub fn signaling_overhead(mu: f64, t_interval: f64, m: u32) -> Result<f64> {
    ensure_positive("t_interval", t_interval)?;
    if !(mu >= 0.0) {
        return Err(Error::param("mu", format!("must be >= 0, got {mu}")));
    }
    Ok(mu / t_interval * m as f64)
}

/// Fraction of time lost to handover signalling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandoverCost {
    pub fraction: f64,
    /// `t_H H >= 1`: the UE would spend all its time in handover. Reported, not clamped.
    pub saturated: bool,
}

pub fn handover_cost(t_h: f64, rate: f64) -> Result<HandoverCost> {
    if !(t_h >= 0.0) || !(rate >= 0.0) {
        return Err(Error::param(
            "handover_cost",
            format!("t_H and H must be >= 0 (got {t_h}, {rate})"),
        ));
    }
    let fraction = t_h * rate;
    if fraction >= 1.0 {
        log::warn!("handover cost {fraction} >= 1 (t_H = {t_h}, H = {rate})");
    }
    Ok(HandoverCost {
        fraction,
        saturated: fraction >= 1.0,
    })
}

/// Coverage discounted by the handover cost when the UE is moving.
pub fn cost_aware_coverage(p: f64, moving: bool, d_cost: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("must lie in [0, 1], got {p}")));
    }
    if !(0.0..=1.0).contains(&d_cost) {
        return Err(Error::param("d_cost", format!("must lie in [0, 1], got {d_cost}")));
    }
    let e_h = if moving { 1.0 } else { 0.0 };
    Ok(p * e_h * (1.0 - d_cost) + p * (1.0 - e_h))
}

/// Cost-aware area spectral efficiency `lambda log2(1 + tau) p~` (bit/s/Hz/m²).
pub fn ase_cost(lambda: f64, tau: f64, p_tilde: f64) -> Result<f64> {
    ensure_positive("lambda_bs", lambda)?;
    if !(tau >= 0.0) {
        return Err(Error::param("tau", format!("must be >= 0, got {tau}")));
    }
    Ok(lambda * (1.0 + tau).log2() * p_tilde)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Gcho,
    GchoS,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gcho => "gcho",
            Scheme::GchoS => "gchos",
        }
    }

    /// Handover-rate multiplier relative to GCHO.
    fn rate_factor(self) -> f64 {
        match self {
            Scheme::Gcho => 1.0,
            Scheme::GchoS => 0.5,
        }
    }

    pub fn handover_rate(self, speed: f64, lambda: f64, m: u32) -> Result<f64> {
        match self {
            Scheme::Gcho => handover_rate_gcho(speed, lambda, m),
            Scheme::GchoS => handover_rate_gchos(speed, lambda, m),
        }
    }
}

/// Weighted sum `S1 H + S2 mu M / T` of handover and signalling cost.
pub fn overall_cost(scheme: Scheme, costs: &CostParams, speed: f64, lambda: f64, m: u32) -> Result<f64> {
    let h = scheme.handover_rate(speed, lambda, m)?;
    Ok(costs.s1 * h + costs.s2 * signaling_overhead(costs.mu, costs.t_interval, m)?)
}

fn overall_cost_continuous(scheme: Scheme, c: &CostParams, speed: f64, lambda: f64, m: f64) -> f64 {
    c.s1 * scheme.rate_factor() * gcho_rate_continuous(speed, lambda, m) + c.s2 * c.mu * m / c.t_interval
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterOptimum {
    /// Stationary point of the continuous cost.
    pub continuous: f64,
    /// Cheaper of the two neighbouring integers (at least 1).
    pub integer: u32,
}

/// Optimal group-cell size. For GCHO the stationary point is
/// `(S1² speed² T² lambda / (pi mu² S2²))^(1/3)`; GCHO-S divides the argument by 4.
pub fn optimal_cluster_size(
    scheme: Scheme,
    costs: &CostParams,
    speed: f64,
    lambda: f64,
) -> Result<ClusterOptimum> {
    ensure_positive("speed", speed)?;
    ensure_positive("lambda_bs", lambda)?;
    let c = costs;
    let skip = match scheme {
        Scheme::Gcho => 1.0,
        Scheme::GchoS => 4.0,
    };
    let arg = c.s1 * c.s1 * speed * speed * c.t_interval * c.t_interval * lambda
        / (skip * PI * c.mu * c.mu * c.s2 * c.s2);
    let continuous = arg.cbrt();
    let lo = (continuous.floor() as u32).max(1);
    let hi = (continuous.ceil() as u32).max(1);
    let cost = |m: u32| overall_cost_continuous(scheme, c, speed, lambda, m as f64);
    let integer = if cost(hi) < cost(lo) { hi } else { lo };
    Ok(ClusterOptimum { continuous, integer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig12_costs() -> CostParams {
        CostParams::reference()
    }

    #[test]
    fn signaling_values() {
        assert_relative_eq!(signaling_overhead(1.0, 0.005, 3).unwrap(), 600.0, max_relative = 1e-12);
        assert_eq!(signaling_overhead(1.0, 0.005, 0).unwrap(), 0.0);
        assert_relative_eq!(
            signaling_overhead(2.0, 0.01, 8).unwrap(),
            2.0 * signaling_overhead(2.0, 0.01, 4).unwrap()
        );
    }

    #[test]
    fn handover_cost_values() {
        let c = handover_cost(0.3, 0.20601).unwrap();
        assert_relative_eq!(c.fraction, 0.0618, epsilon = 1e-4);
        assert!(!c.saturated);
        assert_eq!(handover_cost(0.3, 0.0).unwrap().fraction, 0.0);
        assert!(handover_cost(0.3, 4.0).unwrap().saturated);
        let g = handover_rate_gcho(10.0, 0.01, 3).unwrap();
        let s = handover_rate_gchos(10.0, 0.01, 3).unwrap();
        assert_relative_eq!(
            handover_cost(0.3, s).unwrap().fraction,
            0.5 * handover_cost(0.3, g).unwrap().fraction
        );
    }

    #[test]
    fn cost_aware_coverage_values() {
        assert_eq!(cost_aware_coverage(0.8, false, 0.3).unwrap(), 0.8);
        assert_relative_eq!(cost_aware_coverage(0.8, true, 0.1).unwrap(), 0.72);
        assert_eq!(cost_aware_coverage(0.8, true, 0.0).unwrap(), 0.8);
        assert!(cost_aware_coverage(1.2, true, 0.0).is_err());
        assert!(cost_aware_coverage(0.5, true, 1.5).is_err());
    }

    #[test]
    fn ase_values() {
        assert_relative_eq!(ase_cost(0.01, 1.0, 0.5).unwrap(), 0.005);
        assert_eq!(ase_cost(0.01, 1.0, 0.0).unwrap(), 0.0);
        let p = 0.6;
        let d = 0.17;
        let stationary = ase_cost(0.01, 1.0, cost_aware_coverage(p, false, d).unwrap()).unwrap();
        let mobile = ase_cost(0.01, 1.0, cost_aware_coverage(p, true, d).unwrap()).unwrap();
        assert_relative_eq!((stationary - mobile) / stationary, d, max_relative = 1e-12);
    }

    #[test]
    fn overall_cost_values() {
        let c = fig12_costs();
        let v = overall_cost(Scheme::Gcho, &c, 10.0, 0.005, 3).unwrap();
        assert_relative_eq!(v, 0.16820, epsilon = 5e-6);
        let s = overall_cost(Scheme::GchoS, &c, 10.0, 0.005, 3).unwrap();
        let h = handover_rate_gcho(10.0, 0.005, 3).unwrap();
        assert_relative_eq!(s - v, -c.s1 * h / 2.0, max_relative = 1e-12);
        assert!(overall_cost(Scheme::Gcho, &c, 10.0, 0.005, 1_000_000).unwrap() > 1e3);
    }

    #[test]
    fn optimal_sizes() {
        let c = fig12_costs();
        let g = optimal_cluster_size(Scheme::Gcho, &c, 10.0, 0.005).unwrap();
        assert_relative_eq!(g.continuous, 5.23, epsilon = 5e-3);
        let s = optimal_cluster_size(Scheme::GchoS, &c, 10.0, 0.005).unwrap();
        assert_relative_eq!(s.continuous, 3.30, epsilon = 5e-3);
        assert_eq!(s.integer, 3);
        assert_relative_eq!(s.continuous / g.continuous, 4f64.powf(-1.0 / 3.0), max_relative = 1e-14);
    }

    #[test]
    fn integer_optimum_is_locally_minimal() {
        let c = fig12_costs();
        for &lambda in &[1e-4, 1e-3, 0.002, 0.005, 0.01, 0.05] {
            for &speed in &[1.0, 5.0, 10.0, 30.0] {
                for scheme in [Scheme::Gcho, Scheme::GchoS] {
                    let opt = optimal_cluster_size(scheme, &c, speed, lambda).unwrap();
                    let cost = |m: u32| overall_cost(scheme, &c, speed, lambda, m).unwrap();
                    let m = opt.integer;
                    if m > 1 {
                        assert!(cost(m) <= cost(m - 1));
                    }
                    assert!(cost(m) <= cost(m + 1));
                }
            }
        }
    }
}
