//! Linear feature maps from a centerline to a low-dimensional shape vector.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use super::{Centerline, ShapeFeature};
use crate::error::{Error, Result};

/// Kind of linear feature map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// Coordinates of `p/2` evenly spaced points (first and last included).
    Subsample,
    /// Open-curve Fourier descriptors, `p/2` complex coefficients with
    /// real and imaginary parts stacked:
    ///
    /// * order 0: centroid of the points,
    /// * order 1: end-to-end chord `z[N-1] - z[0]`,
    /// * order k >= 2: half-range sine coefficient of mode `k - 1` of the
    ///   residual after removing the chord line,
    ///   `2/(N-1) * sum_n r_n sin(pi (k-1) n / (N-1))`.
    ///
    /// A straight, uniformly spaced centerline has zero residual, so every
    /// coefficient from order 2 upward vanishes.
    Fourier,
}

impl FromStr for FeatureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "subsample" => Ok(Self::Subsample),
            "fourier" => Ok(Self::Fourier),
            other => Err(format!("unknown feature map `{other}` (expected subsample|fourier)")),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Subsample => "subsample",
            Self::Fourier => "fourier",
        })
    }
}

/// A concrete feature map `s = F c` for centerlines of `points` points.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    kind: FeatureKind,
    points: usize,
    matrix: DMatrix<f64>,
}

impl FeatureMap {
    pub fn new(kind: FeatureKind, dim: usize, points: usize) -> Result<Self> {
        if points < 3 {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: format!("a centerline needs at least 3 points, got {points}"),
            });
        }
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: format!("feature dimension must be even and positive, got {dim}"),
            });
        }
        if dim > 2 * points {
            return Err(Error::DimensionMismatch {
                expected: 2 * points,
                actual: dim,
            });
        }
        let matrix = match kind {
            FeatureKind::Subsample => subsample_matrix(dim / 2, points),
            FeatureKind::Fourier => fourier_matrix(dim / 2, points),
        };
        Ok(Self {
            kind,
            points,
            matrix,
        })
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// The `p x 2N` matrix of the map.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn extract(&self, c: &Centerline) -> Result<ShapeFeature> {
        if c.len() != self.points {
            return Err(Error::DimensionMismatch {
                expected: self.points,
                actual: c.len(),
            });
        }
        Ok(ShapeFeature::from(&self.matrix * c.stacked()))
    }
}

fn subsample_matrix(count: usize, points: usize) -> DMatrix<f64> {
    let mut f = DMatrix::zeros(2 * count, 2 * points);
    for j in 0..count {
        let idx = if count == 1 {
            0
        } else {
            (j * (points - 1) + (count - 1) / 2) / (count - 1)
        };
        f[(2 * j, 2 * idx)] = 1.0;
        f[(2 * j + 1, 2 * idx + 1)] = 1.0;
    }
    f
}

fn fourier_matrix(orders: usize, points: usize) -> DMatrix<f64> {
    let n = points;
    let last = (n - 1) as f64;
    let mut f = DMatrix::zeros(2 * orders, 2 * n);
    // weights w[k][i] acting identically on x and y (all coefficients are real
    // combinations of the complex points)
    let mut put = |row: usize, weights: &DVector<f64>| {
        for i in 0..n {
            f[(2 * row, 2 * i)] = weights[i];
            f[(2 * row + 1, 2 * i + 1)] = weights[i];
        }
    };
    for k in 0..orders {
        let w = match k {
            0 => DVector::from_element(n, 1.0 / n as f64),
            1 => {
                let mut w = DVector::zeros(n);
                w[0] = -1.0;
                w[n - 1] = 1.0;
                w
            }
            _ => {
                // r_m = z_m - z_0 - (m/last)(z_last - z_0)
                let mode = (k - 1) as f64;
                let mut w = DVector::zeros(n);
                for m in 0..n {
                    let basis = 2.0 / last * (PI * mode * m as f64 / last).sin();
                    let t = m as f64 / last;
                    w[m] += basis;
                    w[0] -= basis * (1.0 - t);
                    w[n - 1] -= basis * t;
                }
                w
            }
        };
        put(k, &w);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Point2;

    fn wavy(n: usize) -> Centerline {
        Centerline::new(
            (0..n)
                .map(|i| {
                    let t = i as f64;
                    Point2::new(3.0 * t + 0.5 * (0.7 * t).sin(), 1.0 - 0.2 * t + (0.3 * t).cos())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn full_subsample_is_identity() {
        let c = wavy(7);
        let map = FeatureMap::new(FeatureKind::Subsample, 14, 7).unwrap();
        assert_eq!(map.extract(&c).unwrap().as_vector(), &c.stacked());
    }

    #[test]
    fn subsample_picks_ends() {
        let c = wavy(20);
        let s = FeatureMap::new(FeatureKind::Subsample, 6, 20).unwrap().extract(&c).unwrap();
        assert_eq!(s[0], c.points()[0].x);
        assert_eq!(s[3], c.points()[10].y);
        assert_eq!(s[4], c.points()[19].x);
    }

    #[test]
    fn fourier_order_zero_is_centroid() {
        let c = wavy(11);
        let s = FeatureMap::new(FeatureKind::Fourier, 6, 11).unwrap().extract(&c).unwrap();
        let n = c.len() as f64;
        let cx: f64 = c.points().iter().map(|p| p.x).sum::<f64>() / n;
        let cy: f64 = c.points().iter().map(|p| p.y).sum::<f64>() / n;
        assert!((s[0] - cx).abs() < 1e-12 && (s[1] - cy).abs() < 1e-12);
    }

    #[test]
    fn straight_uniform_line_has_no_higher_orders() {
        // direct summation oracle over the detrended residual
        let n = 20;
        let c = Centerline::new(
            (0..n).map(|i| Point2::new(100.0 + 12.5 * i as f64, 240.0 - 3.0 * i as f64)).collect(),
        )
        .unwrap();
        let s = FeatureMap::new(FeatureKind::Fourier, 12, n).unwrap().extract(&c).unwrap();
        for k in 2..6 {
            assert!(s[2 * k].abs() < 1e-10 && s[2 * k + 1].abs() < 1e-10, "order {k}: {s:?}");
        }
        assert!((s[2] - 12.5 * 19.0).abs() < 1e-10);
        assert!((s[3] + 3.0 * 19.0).abs() < 1e-10);
    }

    #[test]
    fn sine_mode_is_recovered() {
        // residual = 2 sin(pi * 2 m / (N-1)) in y  -> order 3 coefficient = 2
        let n = 21;
        let last = (n - 1) as f64;
        let c = Centerline::new(
            (0..n)
                .map(|m| {
                    let m = m as f64;
                    Point2::new(m, 2.0 * (PI * 2.0 * m / last).sin())
                })
                .collect(),
        )
        .unwrap();
        let s = FeatureMap::new(FeatureKind::Fourier, 8, n).unwrap().extract(&c).unwrap();
        assert!((s[7] - 2.0).abs() < 1e-12, "{s:?}");
        assert!(s[5].abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(FeatureMap::new(FeatureKind::Subsample, 7, 10).is_err());
        assert!(matches!(
            FeatureMap::new(FeatureKind::Fourier, 22, 10),
            Err(Error::DimensionMismatch { expected: 20, actual: 22 })
        ));
        let map = FeatureMap::new(FeatureKind::Fourier, 6, 10).unwrap();
        assert!(map.extract(&wavy(9)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn maps_are_linear(
                a in proptest::collection::vec(-500.0..500.0f64, 24),
                b in proptest::collection::vec(-500.0..500.0f64, 24),
                alpha in -3.0..3.0f64,
                beta in -3.0..3.0f64,
                fourier in any::<bool>(),
            ) {
                let kind = if fourier { FeatureKind::Fourier } else { FeatureKind::Subsample };
                let map = FeatureMap::new(kind, 8, 12).unwrap();
                let ca = Centerline::from_stacked(&DVector::from_vec(a)).unwrap();
                let cb = Centerline::from_stacked(&DVector::from_vec(b)).unwrap();
                let mix = Centerline::from_stacked(&(ca.stacked() * alpha + cb.stacked() * beta)).unwrap();
                let lhs = map.extract(&mix).unwrap();
                let rhs = map.extract(&ca).unwrap().as_vector() * alpha + map.extract(&cb).unwrap().as_vector() * beta;
                let scale = 1.0 + rhs.norm();
                prop_assert!((lhs.as_vector() - rhs).norm() <= 1e-12 * scale);
            }
        }
    }
}
