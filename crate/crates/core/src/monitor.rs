//! Lyapunov bookkeeping for closed-loop runs.
//!
//! The energy-like function is
//! `V = |sigma1|^2/2 + |sigma2|^2/2 + (eta1 - eta1_hat)^2/2 + (eta2 - eta2_hat)^2/2`
//! and the closed loop satisfies `V_dot <= -a V + b` with
//! `a = min(2, gamma1, gamma2)` and
//! `b = gamma1 eta1^2/2 + gamma2 eta2^2/2 + delta (eta1 eps1 + eta2 eps2)`.
//! The disturbance bounds `eta1`, `eta2` are unknown constants; callers pass
//! measured suprema in their place.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::saturation::LEMMA_DELTA;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LyapunovSample {
    pub t: f64,
    /// `|sigma1|^2 / 2`
    pub v1: f64,
    /// `|sigma2|^2 / 2`
    pub v2: f64,
    pub v_total: f64,
    /// Measured `|d|`, `d = s_dot - J_hat v`.
    pub d_norm: f64,
    /// Measured `|J_hat_dot u_tilde|`.
    pub jdot_u_norm: f64,
}

/// Evaluates `V` and its parts. `t` and the disturbance norms are left at zero.
pub fn lyapunov(
    sigma1: &DVector<f64>,
    sigma2: &DVector<f64>,
    eta1_hat: f64,
    eta2_hat: f64,
    eta1_ref: f64,
    eta2_ref: f64,
) -> LyapunovSample {
    let v1 = 0.5 * sigma1.norm_squared();
    let v2 = 0.5 * sigma2.norm_squared();
    let d1 = eta1_ref - eta1_hat;
    let d2 = eta2_ref - eta2_hat;
    LyapunovSample {
        v1,
        v2,
        v_total: v1 + v2 + 0.5 * d1 * d1 + 0.5 * d2 * d2,
        ..LyapunovSample::default()
    }
}

/// Constants of the ultimate bound `V_dot <= -a V + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UubBounds {
    pub a: f64,
    pub b: f64,
    /// `b / a`, the level that `V` ultimately stays below.
    pub ball: f64,
}

pub fn uub_bounds(gamma1: f64, gamma2: f64, eps1: f64, eps2: f64, eta1: f64, eta2: f64) -> Result<UubBounds> {
    crate::error::positive("gamma1", gamma1)?;
    crate::error::positive("gamma2", gamma2)?;
    crate::error::positive("eps1", eps1)?;
    crate::error::positive("eps2", eps2)?;
    for (name, eta) in [("eta1", eta1), ("eta2", eta2)] {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("must be finite and >= 0, got {eta}"),
            });
        }
    }
    let a = 2f64.min(gamma1).min(gamma2);
    let b = 0.5 * gamma1 * eta1 * eta1 + 0.5 * gamma2 * eta2 * eta2 + LEMMA_DELTA * (eta1 * eps1 + eta2 * eps2);
    Ok(UubBounds { a, b, ball: b / a })
}

/// Outcome of [`check_decrease`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecreaseReport {
    pub intervals: usize,
    pub violations: usize,
    pub violation_fraction: f64,
    /// Largest `dV/dt - (-a V + b)` over all intervals; positive means the
    /// bound was exceeded somewhere (before tolerance).
    pub worst_margin: f64,
}

/// Checks `(V[k+1] - V[k])/dt <= -a V[k] + b + tol` on consecutive samples.
pub fn check_decrease(samples: &[LyapunovSample], bounds: &UubBounds, dt: f64, tol: f64) -> Result<DecreaseReport> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    crate::error::positive("dt", dt)?;
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for pair in samples.windows(2) {
        let rate = (pair[1].v_total - pair[0].v_total) / dt;
        let margin = rate - (-bounds.a * pair[0].v_total + bounds.b);
        worst = worst.max(margin);
        if margin > tol || !margin.is_finite() {
            violations += 1;
        }
    }
    let intervals = samples.len() - 1;
    Ok(DecreaseReport {
        intervals,
        violations,
        violation_fraction: violations as f64 / intervals as f64,
        worst_margin: worst,
    })
}

/// Slack in `eta_tilde eta_hat <= eta^2/2 - eta_tilde^2/2`; equals `eta_hat^2 / 2`.
pub fn young_slack(eta: f64, eta_hat: f64) -> f64 {
    let tilde = eta - eta_hat;
    0.5 * eta * eta - 0.5 * tilde * tilde - tilde * eta_hat
}

/// `sigma^T d <= |sigma| eta_ref`.
pub fn cauchy_schwarz_holds(sigma: &DVector<f64>, d: &DVector<f64>, eta_ref: f64) -> bool {
    sigma.dot(d) <= sigma.norm() * eta_ref * (1.0 + 1e-12) + f64::MIN_POSITIVE
}
