//! Online adaptive estimation of the deformation Jacobian.
//!
//! The estimate is driven by the second sliding surface built on
//! `e2 = s_dot - J_hat u`:
//!
//! ```text
//! J_hat_dot = (s_ddot - J_hat v_dot + sigma2 + e2 + sigma2 tanh(|sigma2|/eps2) eta2_hat / |sigma2|) v^T / |v|^2
//! eta2_hat_dot = tanh(|sigma2|/eps2) |sigma2| - gamma2 eta2_hat
//! ```
//!
//! The update is frozen while `|v|` is below the excitation guard, since a
//! vanishing command carries no information about the Jacobian. `s_ddot`
//! and `v_dot` both come from filtered differences with the same delay
//! (see [`CommandRate`]); mixing a delayed `s_ddot` with a raw `v_dot` makes
//! the update unstable at the default filter cutoff.

mod pinv;
mod rates;

use nalgebra::{DMatrix, DVector};

pub use pinv::damped_pinv;
pub use rates::{CommandRate, RateEstimator, Rates};

use crate::controller::{leaky_adapt, smooth_direction, IntegralSurface};
use crate::error::{Error, Result};
use crate::plant::DeformationJacobian;
use crate::saturation::JointVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorGains {
    pub eps2: f64,
    pub gamma2: f64,
    /// Tikhonov factor of the pseudo-inverse.
    pub pinv_damping: f64,
    /// Minimum `|v|` (rad/s) for the Jacobian to be updated.
    pub v_guard: f64,
    /// Cutoff (Hz) of the rate filters.
    pub filter_cutoff: f64,
}

impl Default for EstimatorGains {
    fn default() -> Self {
        Self {
            eps2: 0.1,
            gamma2: 1.0,
            pinv_damping: 1e-6,
            v_guard: 1e-6,
            filter_cutoff: 20.0,
        }
    }
}

impl EstimatorGains {
    pub fn validate(&self) -> Result<()> {
        crate::error::positive("gains.eps2", self.eps2)?;
        crate::error::positive("gains.gamma2", self.gamma2)?;
        crate::error::positive("gains.pinv_damping", self.pinv_damping)?;
        crate::error::positive("gains.v_guard", self.v_guard)?;
        crate::error::positive("gains.filter_cutoff", self.filter_cutoff)
    }

    /// Small-norm guard of the sigma2 direction term.
    fn sigma_guard(&self) -> f64 {
        1e-8 * self.eps2
    }
}

/// Jacobian estimate, second surface and rate filters.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    pub j_hat: DeformationJacobian,
    pub eta2_hat: f64,
    surface: Option<IntegralSurface>,
    e2: DVector<f64>,
    pub rates: RateEstimator,
}

impl EstimatorState {
    pub fn new(j_hat: DeformationJacobian, gains: &EstimatorGains) -> Result<Self> {
        gains.validate()?;
        let p = j_hat.dim();
        Ok(Self {
            j_hat,
            eta2_hat: 0.0,
            surface: None,
            e2: DVector::zeros(p),
            rates: RateEstimator::new(gains.filter_cutoff)?,
        })
    }

    /// `sigma2`; zero until the surface has been started.
    pub fn sigma2(&self) -> DVector<f64> {
        self.surface
            .as_ref()
            .map_or_else(|| DVector::zeros(self.j_hat.dim()), |s| s.sigma().clone())
    }

    /// Most recent `e2`.
    pub fn e2(&self) -> &DVector<f64> {
        &self.e2
    }

    pub fn surface_started(&self) -> bool {
        self.surface.is_some()
    }
}

/// `e2 = s_dot - J_hat u`.
pub fn measurement_error(s_dot: &DVector<f64>, j_hat: &DeformationJacobian, u: &JointVector) -> Result<DVector<f64>> {
    if s_dot.len() != j_hat.dim() {
        return Err(Error::DimensionMismatch {
            expected: j_hat.dim(),
            actual: s_dot.len(),
        });
    }
    Ok(s_dot - j_hat.apply(u))
}

/// Advances `sigma2` with a new `e2`. The first call fixes `e2(0)` and
/// leaves `sigma2 = 0`.
pub fn update_surface2(state: &EstimatorState, e2: &DVector<f64>, dt: f64) -> Result<EstimatorState> {
    let mut next = state.clone();
    match next.surface.as_mut() {
        None => {
            crate::error::positive("dt", dt)?;
            if e2.len() != state.j_hat.dim() {
                return Err(Error::DimensionMismatch {
                    expected: state.j_hat.dim(),
                    actual: e2.len(),
                });
            }
            next.surface = Some(IntegralSurface::new(e2.clone()));
        }
        Some(surface) => surface.update(e2, dt)?,
    }
    next.e2 = e2.clone();
    Ok(next)
}

/// Rate of change of the Jacobian estimate, or `None` when the command is
/// below the excitation guard.
#[allow(clippy::too_many_arguments)]
pub fn djm_rate(
    j_hat: &DeformationJacobian,
    s_ddot: &DVector<f64>,
    v: &JointVector,
    v_dot: &JointVector,
    sigma2: &DVector<f64>,
    e2: &DVector<f64>,
    eta2_hat: f64,
    gains: &EstimatorGains,
) -> Result<Option<DMatrix<f64>>> {
    let p = j_hat.dim();
    for x in [s_ddot, sigma2, e2] {
        if x.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: x.len(),
            });
        }
        if x.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("estimator input"));
        }
    }
    if v.iter().chain(v_dot.iter()).any(|a| !a.is_finite()) || !eta2_hat.is_finite() {
        return Err(Error::NonFinite("estimator input"));
    }
    let v_norm2 = v.norm_squared();
    if v.norm() < gains.v_guard {
        return Ok(None);
    }
    let compensation = smooth_direction(sigma2, gains.eps2, gains.sigma_guard()) * eta2_hat;
    let residual = s_ddot - j_hat.apply(v_dot) + sigma2 + e2 + compensation;
    let outer = residual * (v.transpose() / v_norm2);
    Ok(Some(DMatrix::from_column_slice(p, 6, outer.as_slice())))
}

/// Explicit Euler step of the Jacobian estimate using the stored `sigma2`,
/// `e2` and `eta2_hat`.
pub fn djm_update(
    state: &EstimatorState,
    s_ddot: &DVector<f64>,
    v: &JointVector,
    v_dot: &JointVector,
    gains: &EstimatorGains,
    dt: f64,
) -> Result<EstimatorState> {
    crate::error::positive("dt", dt)?;
    let rate = djm_rate(
        &state.j_hat,
        s_ddot,
        v,
        v_dot,
        &state.sigma2(),
        &state.e2,
        state.eta2_hat,
        gains,
    )?;
    let mut next = state.clone();
    if let Some(rate) = rate {
        next.j_hat = DeformationJacobian::new(state.j_hat.matrix() + rate * dt)?;
    }
    Ok(next)
}

/// One explicit step of the eta2 adaptive law, clamped at zero.
pub fn adapt_eta2(eta2_hat: f64, sigma2: &DVector<f64>, gains: &EstimatorGains, dt: f64) -> f64 {
    leaky_adapt(eta2_hat, sigma2, gains.eps2, gains.gamma2, dt)
}
