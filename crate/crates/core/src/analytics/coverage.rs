//! Coverage probability of a cell-edge UE served jointly by `M` BSs at a
//! common distance `R`, with NLoS Poisson interference outside `R`.
//!
//! Conditioned on `R`, coverage is `P(Gamma(M,1) > s I)` with `s = tau R^eta1`,
//! which expands to `sum_{n<M} a_n` where `a_n = (-s)^n / n! L^(n)(s)` and `L`
//! is the Laplace transform of the interference. With
//! `b0 = pi lambda (s Lambda)^(2/eta2)` and `theta = R² / (s Lambda)^(2/eta2)`:
//!
//! ```text
//! a_0 = exp(-b0 k_0(theta))
//! a_n = b0 * sum_{i<n} (n-i)/n * k_{n-i}(theta) * a_i
//! ```
//!
//! The outer expectation over `R` uses the edge-UE distance law for `M >= 2`
//! and the nearest-BS law for `M = 1`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};

use crate::channel::PathLossParams;
use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{edge_distance_pdf, kth_distance_pdf};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};

static CLAMP_WARNINGS: AtomicU64 = AtomicU64::new(0);

/// Number of probabilities clamped into `[0, 1]` since process start.
pub fn clamp_warnings() -> u64 {
    CLAMP_WARNINGS.load(Ordering::Relaxed)
}

/// Slack allowed outside `[0, 1]` before a result counts as a numerical failure.
const CLAMP_SLACK: f64 = 1e-6;

pub(crate) fn clamp_probability(value: f64, context: &str) -> Result<f64> {
    if !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&value) {
        return Err(Error::numerical(
            context,
            format!("probability {value} outside [0, 1]"),
        ));
    }
    let clamped = value.clamp(0.0, 1.0);
    if clamped != value {
        CLAMP_WARNINGS.fetch_add(1, Ordering::Relaxed);
        log::warn!("{context}: clamped probability {value} to {clamped}");
    }
    Ok(clamped)
}

/// Which sign of the `R` exponent enters the Laplace argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum A0Exponent {
    /// `s = tau R^eta1`, consistent with the derivation of the recursion.
    #[default]
    Derived,
    /// `s = tau R^-eta1`, the form printed in the closed-form integral.
    Printed,
}

/// Per-order factor in the derivative recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeScaling {
    /// Exact derivatives of the interference Laplace transform.
    #[default]
    Exact,
    /// Carries an extra `Lambda^-(n-i)` per term, as printed in the
    /// closed-form recursion. Kept for comparison only; it does not match simulation.
    AsPrinted,
}

/// Distribution of the common serving distance `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServingDistanceLaw {
    /// `2 (pi lambda)² R³ exp(-pi lambda R²)`.
    Edge,
    /// `2 pi lambda R exp(-pi lambda R²)`.
    Nearest,
}

impl ServingDistanceLaw {
    pub fn for_group_size(m: u32) -> Self {
        if m >= 2 {
            ServingDistanceLaw::Edge
        } else {
            ServingDistanceLaw::Nearest
        }
    }

    pub fn pdf(self, r: f64, lambda: f64) -> f64 {
        match self {
            ServingDistanceLaw::Edge => edge_distance_pdf(r, lambda),
            ServingDistanceLaw::Nearest => kth_distance_pdf(r, 1, lambda),
        }
    }

    /// Shape of the Gamma law of `pi lambda R²`.
    pub fn gamma_shape(self) -> u32 {
        match self {
            ServingDistanceLaw::Edge => 2,
            ServingDistanceLaw::Nearest => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageParams {
    /// SIR threshold, linear.
    pub tau: f64,
    pub lambda: f64,
    pub m: u32,
    pub pathloss: PathLossParams,
    /// Relative quadrature tolerance, in `(0, 1e-3]`.
    pub quad_tol: f64,
    pub exponent: A0Exponent,
    pub scaling: DerivativeScaling,
}

impl CoverageParams {
    pub fn new(tau: f64, lambda: f64, m: u32, pathloss: PathLossParams) -> Result<Self> {
        let p = CoverageParams {
            tau,
            lambda,
            m,
            pathloss,
            quad_tol: 1e-8,
            exponent: A0Exponent::default(),
            scaling: DerivativeScaling::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_quad_tol(mut self, quad_tol: f64) -> Result<Self> {
        self.quad_tol = quad_tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("tau", self.tau)?;
        ensure_positive("lambda_bs", self.lambda)?;
        if self.m == 0 {
            return Err(Error::param("m_group", "must be >= 1"));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol <= 1e-3) {
            return Err(Error::param(
                "quad_tol",
                format!("must lie in (0, 1e-3], got {}", self.quad_tol),
            ));
        }
        if !(self.pathloss.eta2() > 2.0) {
            return Err(Error::DivergentIntegral(format!(
                "interference integral requires eta2 > 2, got {}",
                self.pathloss.eta2()
            )));
        }
        Ok(())
    }

    pub fn distance_law(&self) -> ServingDistanceLaw {
        ServingDistanceLaw::for_group_size(self.m)
    }

    /// Laplace argument `s` at serving distance `r`.
    pub fn laplace_argument(&self, r: f64) -> f64 {
        match self.exponent {
            A0Exponent::Derived => self.tau * r.powf(self.pathloss.eta1()),
            A0Exponent::Printed => self.tau * r.powf(-self.pathloss.eta1()),
        }
    }

    fn inner_tolerance(&self) -> Tolerance {
        Tolerance::relative((self.quad_tol * 1e-2).max(1e-13))
    }
}

/// `k_0 = int_theta^inf du / (1 + u^(eta2/2))` and, for `i >= 1`,
/// `k_i = int_theta^inf du / ((1 + u^(eta2/2))^i (1 + u^(-eta2/2)))`.
///
/// For `eta2 = 4`, `k_0 = pi/2 - atan(theta)` in closed form.
pub fn k_integral(order: u32, theta: f64, eta2: f64, quad_tol: f64) -> Result<f64> {
    if !(eta2 > 2.0) {
        return Err(Error::DivergentIntegral(format!(
            "k_{order} diverges for eta2 = {eta2} <= 2"
        )));
    }
    if !(theta >= 0.0) {
        return Err(Error::param("theta", format!("must be >= 0, got {theta}")));
    }
    if order == 0 && eta2 == 4.0 {
        return Ok(FRAC_PI_2 - theta.atan());
    }
    k_integral_quadrature(order, theta, eta2, quad_tol)
}

/// [`k_integral`] without the closed-form shortcut.
pub fn k_integral_quadrature(order: u32, theta: f64, eta2: f64, quad_tol: f64) -> Result<f64> {
    if !(eta2 > 2.0) {
        return Err(Error::DivergentIntegral(format!(
            "k_{order} diverges for eta2 = {eta2} <= 2"
        )));
    }
    if theta.is_infinite() {
        return Ok(0.0);
    }
    let half = 0.5 * eta2;
    let tol = Tolerance::relative(quad_tol);
    let est = if order == 0 {
        integrate_to_infinity(|u| 1.0 / (1.0 + u.powf(half)), theta, tol)?
    } else {
        let i = order as i32;
        integrate_to_infinity(
            |u| {
                if u <= 0.0 {
                    return 0.0;
                }
                let p = u.powf(half);
                1.0 / ((1.0 + p).powi(i) * (1.0 + 1.0 / p))
            },
            theta,
            tol,
        )?
    };
    Ok(est.value)
}

/// Laplace transform of the interference from a PPP of density `lambda`
/// outside radius `r`, evaluated at `s`.
pub fn laplace_interference(s: f64, lambda: f64, r: f64, pathloss: &PathLossParams) -> Result<f64> {
    laplace_interference_tol(s, lambda, r, pathloss, 1e-10)
}

pub fn laplace_interference_tol(
    s: f64,
    lambda: f64,
    r: f64,
    pathloss: &PathLossParams,
    quad_tol: f64,
) -> Result<f64> {
    ensure_positive("s", s)?;
    ensure_positive("lambda_bs", lambda)?;
    if !(r >= 0.0) {
        return Err(Error::param("R", format!("must be >= 0, got {r}")));
    }
    let scale = (s * pathloss.continuity()).powf(2.0 / pathloss.eta2());
    if scale == 0.0 {
        return Ok(1.0);
    }
    let theta = r * r / scale;
    let k0 = k_integral(0, theta, pathloss.eta2(), quad_tol)?;
    Ok((-PI * lambda * scale * k0).exp())
}

/// Inputs and outputs of the derivative recursion at one serving distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzState {
    /// `k_1 .. k_{M-1}`.
    pub k_values: Vec<f64>,
    /// `a_0 .. a_{M-1}`.
    pub a_values: Vec<f64>,
    pub b0: f64,
    pub theta: f64,
    /// Per-order factor: 1, or `Lambda^-1` for [`DerivativeScaling::AsPrinted`].
    pub order_scale: f64,
}

impl ToeplitzState {
    /// `A_{M-1} = a_1 + ... + a_{M-1}`.
    pub fn tail_sum(&self) -> f64 {
        self.a_values.iter().skip(1).sum()
    }

    pub fn total(&self) -> f64 {
        self.a_values.iter().sum()
    }

    /// Coefficient of `a_i` in `a_n`, without the `b0` factor.
    fn coefficient(&self, n: usize, i: usize) -> f64 {
        let d = n - i;
        d as f64 / n as f64 * self.order_scale.powi(d as i32) * self.k_values[d - 1]
    }

    /// Lower-triangular `M x M` matrix `F` with `F[n][i] = (n-i)/n * k_{n-i}`
    /// (times the order scale), so that `a = a_0 e_0 + b0 F a`.
    pub fn f_matrix(&self) -> DMatrix<f64> {
        let m = self.k_values.len() + 1;
        DMatrix::from_fn(m, m, |n, i| if i < n { self.coefficient(n, i) } else { 0.0 })
    }

    /// Direct recursion for `a_1 .. a_{M-1}` given `a_0`.
    pub fn recursion(&self, a0: f64) -> Vec<f64> {
        let m = self.k_values.len() + 1;
        let mut a = Vec::with_capacity(m);
        a.push(a0);
        for n in 1..m {
            let acc: f64 = (0..n).map(|i| self.coefficient(n, i) * a[i]).sum();
            a.push(self.b0 * acc);
        }
        a
    }

    /// Solves `(I - b0 F) a = a_0 e_0` as a lower-triangular system.
    pub fn matrix_solve(&self, a0: f64) -> Result<Vec<f64>> {
        let m = self.k_values.len() + 1;
        let system = DMatrix::<f64>::identity(m, m) - self.f_matrix() * self.b0;
        let mut rhs = DVector::<f64>::zeros(m);
        rhs[0] = a0;
        system
            .solve_lower_triangular(&rhs)
            .map(|v| v.iter().copied().collect())
            .ok_or_else(|| Error::numerical("toeplitz", "singular triangular system"))
    }
}

/// Evaluates `k_i`, `b0` and `a_n` at serving distance `r`.
pub fn toeplitz_state(r: f64, params: &CoverageParams) -> Result<ToeplitzState> {
    let pl = &params.pathloss;
    let m = params.m as usize;
    let order_scale = match params.scaling {
        DerivativeScaling::Exact => 1.0,
        DerivativeScaling::AsPrinted => 1.0 / pl.continuity(),
    };
    let s = params.laplace_argument(r);
    let scale = (s * pl.continuity()).powf(2.0 / pl.eta2());
    if !(scale > 0.0) || !scale.is_finite() {
        // s -> 0: no interference seen, certain coverage.
        let mut a_values = vec![0.0; m];
        a_values[0] = 1.0;
        return Ok(ToeplitzState {
            k_values: vec![0.0; m - 1],
            a_values,
            b0: 0.0,
            theta: f64::INFINITY,
            order_scale,
        });
    }
    let theta = r * r / scale;
    let b0 = PI * params.lambda * scale;
    let tol = params.inner_tolerance().rel;
    let k0 = k_integral(0, theta, pl.eta2(), tol)?;
    let k_values = (1..m as u32)
        .map(|i| k_integral(i, theta, pl.eta2(), tol))
        .collect::<Result<Vec<_>>>()?;
    let mut state = ToeplitzState {
        k_values,
        a_values: Vec::new(),
        b0,
        theta,
        order_scale,
    };
    state.a_values = state.recursion((-b0 * k0).exp());
    Ok(state)
}

/// Upper limit of the outer integral; the neglected tail mass is below 1e-10.
pub fn outer_limit(lambda: f64) -> f64 {
    2.0 * (-(1e-10f64).ln() / (PI * lambda)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Coverage probability with quadrature diagnostics.
pub fn coverage_probability_detailed(params: &CoverageParams) -> Result<CoverageResult> {
    params.validate()?;
    let law = params.distance_law();
    let failure = std::cell::RefCell::new(None);
    let integrand = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let w = law.pdf(r, params.lambda);
        if w == 0.0 {
            return 0.0;
        }
        match toeplitz_state(r, params) {
            Ok(st) => w * st.total(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let est = integrate(integrand, 0.0, outer_limit(params.lambda), Tolerance::relative(params.quad_tol));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let est = est.map_err(|e| match e {
        Error::Numerical { detail, .. } => Error::numerical(
            "coverage_probability",
            format!(
                "{detail} (tau {}, lambda {}, M {}, D {})",
                params.tau,
                params.lambda,
                params.m,
                params.pathloss.critical_distance()
            ),
        ),
        other => other,
    })?;
    Ok(CoverageResult {
        value: clamp_probability(est.value, "coverage_probability")?,
        error_estimate: est.error,
        evaluations: est.evaluations,
    })
}

/// Probability that the SIR of a cell-edge UE served by `M` LoS cooperators
/// exceeds `tau`.
pub fn coverage_probability(params: &CoverageParams) -> Result<f64> {
    coverage_probability_detailed(params).map(|r| r.value)
}
