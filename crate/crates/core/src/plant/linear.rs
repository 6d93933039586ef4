use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{Centerline, DeformationJacobian, FeatureMap};
use crate::error::{Error, Result};
use crate::saturation::JointVector;

/// Sinusoidal drift of the Jacobian entries:
/// `J_ij(t) = J0_ij * (1 + amplitude * sin(rate * t) * cos(phase_ij))`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JacobianVariation {
    /// Relative amplitude (0 disables the drift).
    pub amplitude: f64,
    /// Angular rate in rad/s.
    pub rate: f64,
}

/// Plant whose features move exactly as `s_dot = J(t) q_dot`.
///
/// The centerline is lifted from feature space through the minimum-norm
/// right inverse of the feature map, so `F c(t)` reproduces the feature
/// trajectory while the centerline itself stays a valid point sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPlant {
    q: JointVector,
    t: f64,
    j0: DMatrix<f64>,
    variation: JacobianVariation,
    lift: DMatrix<f64>,
    centerline: DVector<f64>,
}

impl LinearPlant {
    pub fn new(
        map: &FeatureMap,
        j0: DeformationJacobian,
        base: Centerline,
        variation: JacobianVariation,
    ) -> Result<Self> {
        if j0.dim() != map.dim() {
            return Err(Error::DimensionMismatch {
                expected: map.dim(),
                actual: j0.dim(),
            });
        }
        if base.len() != map.points() {
            return Err(Error::DimensionMismatch {
                expected: map.points(),
                actual: base.len(),
            });
        }
        if !(variation.amplitude.is_finite() && variation.rate.is_finite()) {
            return Err(Error::NonFinite("Jacobian variation"));
        }
        let f = map.matrix();
        let gram = (f * f.transpose())
            .cholesky()
            .ok_or(Error::InvalidParameter {
                name: "feature map",
                reason: "map is rank deficient".into(),
            })?;
        let lift = f.transpose() * gram.inverse();
        Ok(Self {
            q: JointVector::zeros(),
            t: 0.0,
            j0: j0.into_inner(),
            variation,
            lift,
            centerline: base.stacked(),
        })
    }

    pub fn q(&self) -> &JointVector {
        &self.q
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn centerline(&self) -> Centerline {
        Centerline::from_stacked(&self.centerline).expect("finite centerline")
    }

    pub fn jacobian_at(&self, t: f64) -> DeformationJacobian {
        let JacobianVariation { amplitude, rate } = self.variation;
        if amplitude == 0.0 {
            return DeformationJacobian(self.j0.clone());
        }
        let drive = amplitude * (rate * t).sin();
        let cols = self.j0.ncols();
        DeformationJacobian(DMatrix::from_fn(self.j0.nrows(), cols, |i, j| {
            let phase = 2.0 * PI * (((i * cols + j) as f64) * 0.618_033_988_749_895).fract();
            self.j0[(i, j)] * (1.0 + drive * phase.cos())
        }))
    }

    pub fn jacobian(&self) -> DeformationJacobian {
        self.jacobian_at(self.t)
    }

    pub(super) fn step(&self, u: &JointVector, dt: f64) -> Self {
        let j = self.jacobian();
        let mut next = self.clone();
        next.centerline += &self.lift * (j.matrix() * u) * dt;
        next.q += u * dt;
        next.t += dt;
        next
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::{FeatureKind, PlantState};
    use nalgebra::Point2;

    fn base(n: usize) -> Centerline {
        Centerline::new(
            (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    Point2::new(200.0 + 300.0 * t, 240.0 + 40.0 * (PI * t).sin())
                })
                .collect(),
        )
        .unwrap()
    }

    fn j0() -> DeformationJacobian {
        DeformationJacobian::new(DMatrix::from_fn(6, 6, |i, j| {
            if i == j { 5.0 } else { 0.3 * ((i + 2 * j) as f64).sin() }
        }))
        .unwrap()
    }

    fn plant(kind: FeatureKind, variation: JacobianVariation) -> (FeatureMap, PlantState) {
        let map = FeatureMap::new(kind, 6, 20).unwrap();
        let p = LinearPlant::new(&map, j0(), base(20), variation).unwrap();
        (map, p.into())
    }

    #[test]
    fn returns_stored_jacobian() {
        let (map, p) = plant(FeatureKind::Fourier, JacobianVariation::default());
        assert_eq!(p.true_jacobian(&map).unwrap(), j0());
    }

    #[test]
    fn zero_velocity_leaves_state() {
        let (_, p) = plant(FeatureKind::Subsample, JacobianVariation::default());
        let next = p.step(&JointVector::zeros(), 1e-3).unwrap();
        assert_eq!(next.centerline(), p.centerline());
        assert_eq!(next.q(), p.q());
    }

    #[test]
    fn feature_increment_is_linear() {
        for kind in [FeatureKind::Subsample, FeatureKind::Fourier] {
            let (map, p) = plant(kind, JacobianVariation::default());
            let u = JointVector::new(0.5, -1.0, 0.25, 2.0, -0.75, 1.0);
            let dt = 1e-3;
            let next = p.step(&u, dt).unwrap();
            let ds = next.features(&map).unwrap().into_inner() - p.features(&map).unwrap().into_inner();
            let expected = j0().apply(&u) * dt;
            assert!((ds - &expected).norm() < 1e-10, "{kind}");
        }
    }

    #[test]
    fn drifting_jacobian_starts_at_nominal() {
        let var = JacobianVariation { amplitude: 0.3, rate: 2.0 };
        let (map, p) = plant(FeatureKind::Fourier, var);
        assert_eq!(p.true_jacobian(&map).unwrap(), j0());
        let later = p.step(&JointVector::zeros(), 0.5).unwrap();
        let diff = later.true_jacobian(&map).unwrap().matrix() - j0().matrix();
        assert!(diff.norm() > 0.1);
        assert!(diff.norm() <= 0.3 * j0().frobenius() + 1e-12);
    }

    #[test]
    fn dimension_checks() {
        let map = FeatureMap::new(FeatureKind::Fourier, 8, 20).unwrap();
        assert!(LinearPlant::new(&map, j0(), base(20), JacobianVariation::default()).is_err());
        let map = FeatureMap::new(FeatureKind::Fourier, 6, 20).unwrap();
        assert!(LinearPlant::new(&map, j0(), base(19), JacobianVariation::default()).is_err());
    }
}
