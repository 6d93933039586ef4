//! Input saturation models and the scalar special functions they rely on.
//!
//! Two saturation models are provided for the six joint-velocity channels:
//! the hard three-branch clamp, and a smooth asymmetric model built on the
//! Gauss error function,
//!
//! ```text
//! u_i = u_mi * erf( sqrt(pi) / (2 u_mi) * v_i )
//! u_mi = (u_max + u_min)/2 + (u_max - u_min)/2 * sgn(v_i)
//! ```
//!
//! so that `u_mi = u_max` for `v_i >= 0` and `u_mi = u_min` for `v_i < 0`.
//! The slope at the origin is one on either side and the output approaches
//! each limit asymptotically without reaching it.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use nalgebra::Vector6;

use crate::error::{Error, Result};

/// Constant of the tanh-gap bound: `0 <= |x| - x tanh(x/eps) <= LEMMA_DELTA * eps`.
/// It is the fixed point of `delta = exp(-(delta + 1))`, rounded up.
pub const LEMMA_DELTA: f64 = 0.2785;

/// Joint-space vector (one entry per axis).
pub type JointVector = Vector6<f64>;

/// Per-axis joint velocity limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationLimits {
    u_min: JointVector,
    u_max: JointVector,
}

impl SaturationLimits {
    /// Builds limits, rejecting any axis without `u_min < 0 < u_max`.
    pub fn new(u_min: JointVector, u_max: JointVector) -> Result<Self> {
        for axis in 0..6 {
            let (lo, hi) = (u_min[axis], u_max[axis]);
            if !(lo.is_finite() && hi.is_finite() && lo < 0.0 && hi > 0.0) {
                return Err(Error::InvalidLimits {
                    axis,
                    u_min: lo,
                    u_max: hi,
                });
            }
        }
        Ok(Self { u_min, u_max })
    }

    /// Same limits on every axis.
    pub fn uniform(u_min: f64, u_max: f64) -> Result<Self> {
        Self::new(JointVector::repeat(u_min), JointVector::repeat(u_max))
    }

    pub fn u_min(&self) -> &JointVector {
        &self.u_min
    }

    pub fn u_max(&self) -> &JointVector {
        &self.u_max
    }

    /// True when `u` lies inside `[u_min, u_max]` on every axis (no tolerance).
    pub fn contains(&self, u: &JointVector) -> bool {
        (0..6).all(|i| self.u_min[i] <= u[i] && u[i] <= self.u_max[i])
    }

    fn amplitude(&self, axis: usize, v: f64) -> f64 {
        amplitude(v, self.u_min[axis], self.u_max[axis])
    }
}

/// `(u_max + u_min)/2 + (u_max - u_min)/2 * sgn(v)` with `sgn(0) = +1`,
/// evaluated by selecting the limit so the result is exact.
fn amplitude(v: f64, u_min: f64, u_max: f64) -> f64 {
    if v >= 0.0 {
        u_max
    } else {
        u_min
    }
}

/// Output of the smooth saturation: the applied command and the saturation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatOutput {
    pub u: JointVector,
    /// `u - v`.
    pub u_tilde: JointVector,
}

/// Gauss error function, accurate to about 1e-15 absolute over the real line.
///
/// Uses the everywhere-convergent series
/// `erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n 2^n x^(2n+1) / (1*3*...*(2n+1))`
/// for `|x| < 3` (all terms positive, so no cancellation), and a Lentz
/// continued fraction for `erfc` beyond that.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 3.0 {
        erf_series(ax)
    } else if ax < 6.5 {
        1.0 - erfc_continued_fraction(ax)
    } else {
        1.0
    };
    value.copysign(x)
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// erfc(x) for x >= 3 via
/// `erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// Hard three-branch clamp of each axis into `[u_min, u_max]`.
pub fn hard_sat(v: &JointVector, limits: &SaturationLimits) -> JointVector {
    JointVector::from_fn(|i, _| {
        let (lo, hi) = (limits.u_min[i], limits.u_max[i]);
        if v[i] >= hi {
            hi
        } else if v[i] <= lo {
            lo
        } else {
            v[i]
        }
    })
}

/// Scalar smooth saturation for one axis.
pub fn gauss_sat_axis(v: f64, u_min: f64, u_max: f64) -> f64 {
    let um = amplitude(v, u_min, u_max);
    um * erf(PI.sqrt() / (2.0 * um) * v)
}

/// Smooth asymmetric saturation of every axis, with the saturation error.
pub fn gauss_sat(v: &JointVector, limits: &SaturationLimits) -> SatOutput {
    let u = JointVector::from_fn(|i, _| {
        let um = limits.amplitude(i, v[i]);
        um * erf(PI.sqrt() / (2.0 * um) * v[i])
    });
    SatOutput {
        u,
        u_tilde: u - v,
    }
}

/// `|x| - x tanh(x/eps)`, which lies in `[0, LEMMA_DELTA * eps]`.
pub fn tanh_gap(x: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("must be > 0, got {eps}"),
        });
    }
    Ok(x.abs() - x * (x / eps).tanh())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson quadrature of the defining integral; independent of
    /// the series/continued-fraction route above.
    fn erf_quadrature(x: f64) -> f64 {
        fn f(t: f64) -> f64 {
            (-t * t).exp()
        }
        fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
            (b - a) / 6.0 * (fa + 4.0 * fm + fb)
        }
        fn recurse(a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = simpson(a, m, fa, flm, fm);
            let right = simpson(m, b, fm, frm, fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                let half = (tol / 2.0).max(1e-17);
                recurse(a, m, fa, flm, fm, left, half, depth - 1)
                    + recurse(m, b, fm, frm, fb, right, half, depth - 1)
            }
        }
        let (a, b) = (0.0, x);
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = simpson(a, b, fa, fm, fb);
        FRAC_2_SQRT_PI * recurse(a, b, fa, fm, fb, whole, 1e-14, 40)
    }

    fn limits_5_6() -> SaturationLimits {
        SaturationLimits::uniform(-6.0, 5.0).unwrap()
    }

    #[test]
    fn erf_examples() {
        assert_eq!(erf(0.0), 0.0);
        let oracle = erf_quadrature(1.0);
        assert!((oracle - 0.842_700_792_9).abs() < 1e-10);
        assert!((erf(1.0) - oracle).abs() < 1e-12);
        assert_eq!(erf(-1.0), -erf(1.0));
    }

    #[test]
    fn erf_matches_quadrature_on_grid() {
        let mut x = -7.0;
        while x <= 7.0 {
            let diff = (erf(x) - erf_quadrature(x)).abs();
            assert!(diff < 1e-12, "x={x} diff={diff:e}");
            x += 0.0137;
        }
    }

    #[test]
    fn erf_branch_switch_is_seamless() {
        for &x in &[3.0, 6.5] {
            let below = erf(x - 1e-12);
            let above = erf(x);
            assert!((above - below).abs() < 1e-13, "jump at {x}");
        }
    }

    #[test]
    fn erf_odd_monotone_bounded() {
        let mut prev = erf(-10.0);
        for i in 1..=20_000 {
            let x = -10.0 + i as f64 * 1e-3;
            let y = erf(x);
            assert!(y >= prev, "not monotone at {x}");
            assert!(y.abs() <= 1.0);
            assert_eq!(erf(-x), -y);
            prev = y;
        }
        assert!(erf(2.0).abs() < 1.0);
    }

    #[test]
    fn hard_sat_branches() {
        let lim = limits_5_6();
        let out = hard_sat(&JointVector::new(7.0, 0.0, -8.0, 5.0, -6.0, 1.5), &lim);
        assert_eq!(out, JointVector::new(5.0, 0.0, -6.0, 5.0, -6.0, 1.5));
    }

    #[test]
    fn gauss_sat_examples() {
        let lim = limits_5_6();
        let out = gauss_sat(&JointVector::new(0.0, 10.0, -10.0, 0.0, 0.0, 0.0), &lim);
        assert_eq!(out.u[0], 0.0);
        let plus = 5.0 * erf_quadrature(PI.sqrt());
        let minus = -6.0 * erf_quadrature(10.0 * PI.sqrt() / 12.0);
        assert!((out.u[1] - plus).abs() < 1e-12);
        assert!((out.u[2] - minus).abs() < 1e-12);
        assert!((out.u[1] - 4.9390).abs() < 1e-3);
        assert!((out.u[2] + 5.7797).abs() < 1e-3);
        assert_eq!(out.u_tilde, out.u - JointVector::new(0.0, 10.0, -10.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn gauss_sat_continuity_and_unit_slope_at_zero() {
        let h = 1e-7;
        for (lo, hi) in [(-6.0, 5.0), (-0.25, 0.2), (-1.0, 30.0)] {
            let f = |v: f64| gauss_sat_axis(v, lo, hi);
            assert!(f(1e-14).abs() < 1e-13 && f(-1e-14).abs() < 1e-13);
            let central = (f(h) - f(-h)) / (2.0 * h);
            assert!((central - 1.0).abs() < 1e-6, "slope {central}");
            assert!((f(h) / h - 1.0).abs() < 1e-6);
            assert!((f(-h) / -h - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn gauss_sat_asymptotics() {
        let lim = limits_5_6();
        let up = gauss_sat(&JointVector::repeat(1e3), &lim).u;
        let down = gauss_sat(&JointVector::repeat(-1e3), &lim).u;
        for i in 0..6 {
            assert!((up[i] - 5.0).abs() < 1e-8);
            assert!((down[i] + 6.0).abs() < 1e-8);
        }
    }

    #[test]
    fn limits_validation() {
        assert!(SaturationLimits::uniform(-1.0, 1.0).is_ok());
        assert!(matches!(
            SaturationLimits::uniform(0.0, 1.0),
            Err(Error::InvalidLimits { axis: 0, .. })
        ));
        assert!(SaturationLimits::uniform(-1.0, 0.0).is_err());
        let mut hi = JointVector::repeat(1.0);
        hi[4] = f64::INFINITY;
        assert!(matches!(
            SaturationLimits::new(JointVector::repeat(-1.0), hi),
            Err(Error::InvalidLimits { axis: 4, .. })
        ));
    }

    #[test]
    fn tanh_gap_examples() {
        assert_eq!(tanh_gap(0.0, 1.0).unwrap(), 0.0);
        assert!(tanh_gap(1e6, 1.0).unwrap().abs() < 1e-9);
        let g = tanh_gap(1.2, 1.0).unwrap();
        assert!((0.0..=LEMMA_DELTA).contains(&g));
        assert!(tanh_gap(1.0, 0.0).is_err());
        assert!(tanh_gap(1.0, -1.0).is_err());
    }

    #[test]
    fn delta_is_near_fixed_point() {
        assert!((LEMMA_DELTA - (-(LEMMA_DELTA + 1.0)).exp()).abs() < 5e-4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn limits() -> impl Strategy<Value = SaturationLimits> {
            (
                proptest::array::uniform6(-20.0..-0.01f64),
                proptest::array::uniform6(0.01..20.0f64),
            )
                .prop_map(|(lo, hi)| {
                    SaturationLimits::new(JointVector::from(lo), JointVector::from(hi)).unwrap()
                })
        }

        proptest! {
            #[test]
            fn outputs_within_limits(v in proptest::array::uniform6(-1e4..1e4f64), lim in limits()) {
                let v = JointVector::from(v);
                let smooth = gauss_sat(&v, &lim);
                prop_assert!(lim.contains(&smooth.u));
                prop_assert!(lim.contains(&hard_sat(&v, &lim)));
                prop_assert_eq!(smooth.u_tilde, smooth.u - v);
            }

            #[test]
            fn strictly_inside_for_moderate_commands(v in proptest::array::uniform6(-3.0..3.0f64), lim in limits()) {
                // erf rounds to exactly 1 only for arguments beyond ~5.9
                let v = JointVector::from_fn(|i, _| {
                    if v[i] >= 0.0 { v[i] * lim.u_max()[i] } else { -v[i] * lim.u_min()[i] }
                });
                let u = gauss_sat(&v, &lim).u;
                for i in 0..6 {
                    prop_assert!(lim.u_min()[i] < u[i] && u[i] < lim.u_max()[i]);
                }
            }

            #[test]
            fn monotone_in_each_axis(a in -50.0..50.0f64, b in -50.0..50.0f64, lo in -20.0..-0.01f64, hi in 0.01..20.0f64) {
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(gauss_sat_axis(x, lo, hi) <= gauss_sat_axis(y, lo, hi));
            }
        }
    }

    #[test]
    fn gauss_sat_monotone_on_dense_grid() {
        let mut prev = gauss_sat_axis(-40.0, -6.0, 5.0);
        for i in 1..=80_000 {
            let v = -40.0 + i as f64 * 1e-3;
            let u = gauss_sat_axis(v, -6.0, 5.0);
            assert!(u >= prev, "not monotone at {v}");
            prev = u;
        }
    }

    #[test]
    fn lemma_grid() {
        for &eps in &[0.01, 0.1, 1.0, 10.0] {
            for i in 0..=10_000 {
                let x = -100.0 + i as f64 * 0.02;
                let g = tanh_gap(x, eps).unwrap();
                assert!(g >= 0.0 && g <= LEMMA_DELTA * eps, "x={x} eps={eps} gap={g}");
            }
        }
    }
}
