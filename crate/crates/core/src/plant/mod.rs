//! Ground-truth deformable-object plants.
//!
//! A plant owns the joint configuration `q` of a kinematic, velocity-driven
//! robot and the resulting object centerline. Features are obtained with a
//! [`FeatureMap`]; the true deformation Jacobian is the sensitivity of those
//! features to `q`. Plant states are values: [`PlantState::step`] returns a
//! new state.

mod chain;
mod features;
mod linear;

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Point2};

pub use chain::{ChainParams, ChainPlant};
pub use features::{FeatureKind, FeatureMap};
pub use linear::{JacobianVariation, LinearPlant};

use crate::error::{Error, Result};
use crate::saturation::JointVector;

/// Ordered 2-D pixel coordinates of the observed centerline.
#[derive(Debug, Clone, PartialEq)]
pub struct Centerline {
    points: Vec<Point2<f64>>,
}

impl Centerline {
    pub fn new(points: Vec<Point2<f64>>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: format!("a centerline needs at least 3 points, got {}", points.len()),
            });
        }
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::NonFinite("centerline"));
        }
        Ok(Self { points })
    }

    /// Builds from `[x1, y1, x2, y2, ...]`.
    pub fn from_stacked(stacked: &DVector<f64>) -> Result<Self> {
        if stacked.len() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: stacked.len() + 1,
                actual: stacked.len(),
            });
        }
        Self::new(
            stacked
                .as_slice()
                .chunks_exact(2)
                .map(|xy| Point2::new(xy[0], xy[1]))
                .collect(),
        )
    }

    pub fn points(&self) -> &[Point2<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The stacked vector `[x1, y1, ..., xN, yN]`.
    pub fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.points.len(), self.points.iter().flat_map(|p| [p.x, p.y]))
    }
}

/// Shape feature vector `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFeature(DVector<f64>);

impl ShapeFeature {
    pub fn new(values: DVector<f64>) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("shape feature"));
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }
}

impl From<DVector<f64>> for ShapeFeature {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

impl Index<usize> for ShapeFeature {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `p x 6` deformation Jacobian mapping joint velocity to feature velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationJacobian(DMatrix<f64>);

impl DeformationJacobian {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.ncols() != 6 {
            return Err(Error::DimensionMismatch {
                expected: 6,
                actual: matrix.ncols(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("deformation Jacobian"));
        }
        Ok(Self(matrix))
    }

    pub fn zeros(p: usize) -> Self {
        Self(DMatrix::zeros(p, 6))
    }

    /// Feature dimension `p`.
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn apply(&self, q_dot: &JointVector) -> DVector<f64> {
        &self.0 * q_dot
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }
}

/// Plant variant tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantKind {
    Linear,
    Chain,
}

impl FromStr for PlantKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "linear" => Ok(Self::Linear),
            "chain" => Ok(Self::Chain),
            other => Err(format!("unknown plant kind `{other}` (expected linear|chain)")),
        }
    }
}

impl fmt::Display for PlantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Chain => "chain",
        })
    }
}

/// Simulated object plus robot configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantState {
    Linear(LinearPlant),
    Chain(ChainPlant),
}

impl PlantState {
    pub fn kind(&self) -> PlantKind {
        match self {
            Self::Linear(_) => PlantKind::Linear,
            Self::Chain(_) => PlantKind::Chain,
        }
    }

    /// Joint angles.
    pub fn q(&self) -> &JointVector {
        match self {
            Self::Linear(p) => p.q(),
            Self::Chain(p) => p.q(),
        }
    }

    /// Elapsed simulated time.
    pub fn time(&self) -> f64 {
        match self {
            Self::Linear(p) => p.time(),
            Self::Chain(p) => p.time(),
        }
    }

    pub fn centerline(&self) -> Centerline {
        match self {
            Self::Linear(p) => p.centerline(),
            Self::Chain(p) => p.centerline(),
        }
    }

    pub fn features(&self, map: &FeatureMap) -> Result<ShapeFeature> {
        map.extract(&self.centerline())
    }

    pub fn true_jacobian(&self, map: &FeatureMap) -> Result<DeformationJacobian> {
        match self {
            Self::Linear(p) => {
                let j = p.jacobian();
                if j.dim() != map.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: j.dim(),
                        actual: map.dim(),
                    });
                }
                Ok(j)
            }
            Self::Chain(p) => p.jacobian(map, chain::FD_STEP),
        }
    }

    /// Advances by `dt` under joint velocity `u` (`q <- q + dt u`).
    pub fn step(&self, u: &JointVector, dt: f64) -> Result<Self> {
        crate::error::positive("dt", dt)?;
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("joint velocity"));
        }
        Ok(match self {
            Self::Linear(p) => Self::Linear(p.step(u, dt)),
            Self::Chain(p) => Self::Chain(p.step(u, dt)?),
        })
    }
}

impl From<LinearPlant> for PlantState {
    fn from(p: LinearPlant) -> Self {
        Self::Linear(p)
    }
}

impl From<ChainPlant> for PlantState {
    fn from(p: ChainPlant) -> Self {
        Self::Chain(p)
    }
}
