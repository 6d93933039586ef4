use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::saturation::JointVector;

/// Feature rates produced by [`RateEstimator::push`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub s_dot: DVector<f64>,
    pub s_ddot: DVector<f64>,
    /// False during the two-sample warm-up, when both rates are reported as zero.
    pub valid: bool,
}

/// Filtered numerical differentiation of a uniformly sampled feature signal.
///
/// `s_dot` is the backward difference of `s` passed through a one-pole
/// low-pass; `s_ddot` is the backward difference of the filtered `s_dot`,
/// filtered the same way. The velocity filter is seeded with the first
/// difference so a ramp is tracked without transient.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimator {
    cutoff: f64,
    dt: Option<f64>,
    prev_s: Option<DVector<f64>>,
    s_dot: Option<DVector<f64>>,
    s_ddot: Option<DVector<f64>>,
}

impl RateEstimator {
    /// `cutoff` in Hz.
    pub fn new(cutoff: f64) -> Result<Self> {
        crate::error::positive("filter_cutoff", cutoff)?;
        Ok(Self {
            cutoff,
            dt: None,
            prev_s: None,
            s_dot: None,
            s_ddot: None,
        })
    }

    /// Smoothing factor of the discrete one-pole filter for step `dt`.
    pub fn alpha(&self, dt: f64) -> f64 {
        let tau = 1.0 / (2.0 * PI * self.cutoff);
        dt / (dt + tau)
    }

    pub fn push(&mut self, s: &DVector<f64>, dt: f64) -> Result<Rates> {
        crate::error::positive("dt", dt)?;
        match self.dt {
            Some(prev) if (prev - dt).abs() > 1e-12 * prev => {
                return Err(Error::TimeStepChanged { previous: prev, current: dt });
            }
            _ => self.dt = Some(dt),
        }
        let zeros = || Rates {
            s_dot: DVector::zeros(s.len()),
            s_ddot: DVector::zeros(s.len()),
            valid: false,
        };
        let Some(prev_s) = self.prev_s.replace(s.clone()) else {
            return Ok(zeros());
        };
        if prev_s.len() != s.len() {
            return Err(Error::DimensionMismatch {
                expected: prev_s.len(),
                actual: s.len(),
            });
        }
        let raw = (s - prev_s) / dt;
        let Some(old_dot) = self.s_dot.take() else {
            self.s_dot = Some(raw);
            self.s_ddot = Some(DVector::zeros(s.len()));
            return Ok(zeros());
        };
        let alpha = self.alpha(dt);
        let s_dot = &old_dot + (raw - &old_dot) * alpha;
        let raw_acc = (&s_dot - &old_dot) / dt;
        let old_acc = self.s_ddot.take().unwrap_or_else(|| DVector::zeros(s.len()));
        let s_ddot = &old_acc + (raw_acc - &old_acc) * alpha;
        self.s_dot = Some(s_dot.clone());
        self.s_ddot = Some(s_ddot.clone());
        Ok(Rates {
            s_dot,
            s_ddot,
            valid: true,
        })
    }
}

/// Command acceleration with the same delay as [`RateEstimator`]'s `s_ddot`.
///
/// The integral of past commands is fed through a [`RateEstimator`], so the
/// returned `v_dot` is the filtered backward difference of the commanded
/// velocity, aligned with the feature samples: a command issued at step `k`
/// first shows in the features at step `k + 1`, and first shows here then.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandRate {
    integral: DVector<f64>,
    inner: RateEstimator,
}

impl CommandRate {
    pub fn new(cutoff: f64) -> Result<Self> {
        Ok(Self {
            integral: DVector::zeros(6),
            inner: RateEstimator::new(cutoff)?,
        })
    }

    /// Registers the command of this step; returns the rate of the commands
    /// issued before it, or `None` during warm-up.
    pub fn push(&mut self, v: &JointVector, dt: f64) -> Result<Option<JointVector>> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("command"));
        }
        let rates = self.inner.push(&self.integral, dt)?;
        self.integral += DVector::from_column_slice(v.as_slice()) * dt;
        Ok(rates
            .valid
            .then(|| JointVector::from_column_slice(rates.s_ddot.as_slice())))
    }
}
