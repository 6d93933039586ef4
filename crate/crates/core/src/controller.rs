//! Integral sliding surface and the saturated sliding-mode velocity law.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::estimator::damped_pinv;
use crate::plant::{DeformationJacobian, ShapeFeature};
use crate::saturation::JointVector;

/// `sigma = e - e(0) + integral_0^t e`, with the integral accumulated by the
/// trapezoidal rule. Zero at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSurface {
    e0: DVector<f64>,
    integral: DVector<f64>,
    last: DVector<f64>,
    sigma: DVector<f64>,
}

impl IntegralSurface {
    pub fn new(e0: DVector<f64>) -> Self {
        let zeros = DVector::zeros(e0.len());
        Self {
            last: e0.clone(),
            e0,
            integral: zeros.clone(),
            sigma: zeros,
        }
    }

    pub fn update(&mut self, e: &DVector<f64>, dt: f64) -> Result<()> {
        crate::error::positive("dt", dt)?;
        if e.len() != self.e0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.e0.len(),
                actual: e.len(),
            });
        }
        self.integral += (e + &self.last) * (0.5 * dt);
        self.sigma = e - &self.e0 + &self.integral;
        self.last = e.clone();
        Ok(())
    }

    pub fn sigma(&self) -> &DVector<f64> {
        &self.sigma
    }

    pub fn initial_error(&self) -> &DVector<f64> {
        &self.e0
    }

    pub fn integral(&self) -> &DVector<f64> {
        &self.integral
    }
}

/// `sigma/|sigma| * tanh(|sigma|/eps)`, continued by `sigma/eps` below `guard`.
pub(crate) fn smooth_direction(sigma: &DVector<f64>, eps: f64, guard: f64) -> DVector<f64> {
    let norm = sigma.norm();
    if norm < guard {
        sigma / eps
    } else {
        sigma * ((norm / eps).tanh() / norm)
    }
}

/// Positive-part leaky adaptive law shared by both bound estimates:
/// `eta <- max(0, eta + dt (tanh(|sigma|/eps) |sigma| - gamma eta))`.
pub(crate) fn leaky_adapt(eta: f64, sigma: &DVector<f64>, eps: f64, gamma: f64, dt: f64) -> f64 {
    let norm = sigma.norm();
    (eta + dt * ((norm / eps).tanh() * norm - gamma * eta)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    /// tanh sharpness.
    pub eps1: f64,
    /// Leak rate of the disturbance-bound estimate.
    pub gamma1: f64,
    /// Below this `|sigma1|` the robust term uses its small-norm limit.
    pub sigma_guard: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self {
            eps1: 0.1,
            gamma1: 1.0,
            sigma_guard: 1e-9,
        }
    }
}

impl ControllerGains {
    pub fn validate(&self) -> Result<()> {
        crate::error::positive("gains.eps1", self.eps1)?;
        crate::error::positive("gains.gamma1", self.gamma1)?;
        crate::error::positive("gains.sigma_guard", self.sigma_guard)
    }
}

/// Sliding surface and adaptive gain of the shape controller.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub surface: IntegralSurface,
    pub eta1_hat: f64,
}

impl ControllerState {
    /// Starts at `t = 0` with `sigma1 = 0` and `eta1_hat = 0`.
    pub fn new(e1_0: DVector<f64>) -> Self {
        Self {
            surface: IntegralSurface::new(e1_0),
            eta1_hat: 0.0,
        }
    }

    pub fn sigma1(&self) -> &DVector<f64> {
        self.surface.sigma()
    }
}

/// `e1 = s - s_d`.
pub fn deformation_error(s: &ShapeFeature, s_d: &ShapeFeature) -> Result<DVector<f64>> {
    if s.len() != s_d.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            actual: s_d.len(),
        });
    }
    Ok(s.as_vector() - s_d.as_vector())
}

pub fn update_surface1(state: &ControllerState, e1: &DVector<f64>, dt: f64) -> Result<ControllerState> {
    let mut next = state.clone();
    next.surface.update(e1, dt)?;
    Ok(next)
}

/// Robust term `Theta1 = -eta1_hat tanh(|sigma1|/eps1) sigma1/|sigma1|`.
pub fn theta1(sigma1: &DVector<f64>, eta1_hat: f64, gains: &ControllerGains) -> DVector<f64> {
    smooth_direction(sigma1, gains.eps1, gains.sigma_guard) * -eta1_hat
}

/// Velocity command `v = J_hat^+ (-sigma1 + s_d_dot - e1 + Theta1)`.
///
/// `damping` is the Tikhonov factor of the pseudo-inverse.
pub fn control_law(
    sigma1: &DVector<f64>,
    s_d_dot: &DVector<f64>,
    e1: &DVector<f64>,
    j_hat: &DeformationJacobian,
    eta1_hat: f64,
    gains: &ControllerGains,
    damping: f64,
) -> Result<JointVector> {
    let p = j_hat.dim();
    for v in [sigma1, s_d_dot, e1] {
        if v.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("controller input"));
        }
    }
    if !eta1_hat.is_finite() {
        return Err(Error::NonFinite("eta1_hat"));
    }
    let drive = -sigma1 + s_d_dot - e1 + theta1(sigma1, eta1_hat, gains);
    let v = damped_pinv(j_hat.matrix(), damping)? * drive;
    Ok(JointVector::from_iterator(v.iter().copied()))
}

/// One explicit step of the eta1 adaptive law, clamped at zero.
pub fn adapt_eta1(eta1_hat: f64, sigma1: &DVector<f64>, gains: &ControllerGains, dt: f64) -> f64 {
    leaky_adapt(eta1_hat, sigma1, gains.eps1, gains.gamma1, dt)
}
