//! Planar mass-spring chain held between the gripper and a fixed anchor.
//!
//! Node 0 is clamped to the gripper (position and tangent direction), node
//! `N-1` to a fixed anchor. Interior nodes settle at the minimum of
//!
//! ```text
//! E = sum_seg k_s/2 (|x_{i+1} - x_i| - L)^2 + sum_i k_b/2 |x_{i-1} - 2 x_i + x_{i+1}|^2
//! ```
//!
//! where the bending sum runs over every node and uses ghost nodes one
//! spacing outside each clamped end. At `q = 0` the anchor sits so that the
//! chain is straight, uniformly spaced and slightly pre-tensioned, which keeps
//! the equilibrium unique for moderate gripper motion. The gripper pose comes
//! from a planar three-link arm driven by joints 0..2; joints 3..5 act out of
//! the image plane and do not move the grasped end.

use nalgebra::{DMatrix, DVector, Point2, Vector2};

use super::{Centerline, DeformationJacobian, FeatureMap};
use crate::error::{Error, Result};
use crate::saturation::JointVector;

/// Central-difference step for the true Jacobian (rad).
pub(super) const FD_STEP: f64 = 1e-5;

/// Physical and numerical parameters of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    pub nodes: usize,
    /// Rest length of each segment (m).
    pub segment_length: f64,
    /// Axial spring stiffness (N/m).
    pub stretch_stiffness: f64,
    /// Second-difference bending stiffness (N/m).
    pub bend_stiffness: f64,
    /// Relative pre-stretch of the chain at `q = 0`.
    pub pretension: f64,
    /// Planar arm link lengths (m).
    pub links: [f64; 3],
    /// Arm joint angles at `q = 0` (rad). The default bends the elbow away
    /// from the stretched-out singularity while keeping the gripper level.
    pub home: [f64; 3],
    /// Camera scale (px/m).
    pub pixels_per_meter: f64,
    /// Pixel offset added after scaling; the image y axis points down.
    pub pixel_offset: [f64; 2],
    /// Equilibrium force tolerance (N).
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self {
            nodes: 20,
            segment_length: 0.025,
            stretch_stiffness: 50.0,
            bend_stiffness: 0.5,
            pretension: 0.05,
            links: [0.3, 0.25, 0.1],
            home: [0.6, -1.2, 0.6],
            pixels_per_meter: 500.0,
            pixel_offset: [0.0, 240.0],
            tolerance: 1e-9,
            max_iterations: 200,
        }
    }
}

impl ChainParams {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 3 {
            return Err(Error::InvalidParameter {
                name: "plant.nodes",
                reason: format!("need at least 3 nodes, got {}", self.nodes),
            });
        }
        crate::error::positive("plant.segment_length", self.segment_length)?;
        crate::error::positive("plant.stretch_stiffness", self.stretch_stiffness)?;
        crate::error::positive("plant.bend_stiffness", self.bend_stiffness)?;
        crate::error::positive("plant.pixels_per_meter", self.pixels_per_meter)?;
        crate::error::positive("plant.tolerance", self.tolerance)?;
        if !(self.pretension.is_finite() && self.pretension >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "plant.pretension",
                reason: format!("must be >= 0, got {}", self.pretension),
            });
        }
        for &l in &self.links {
            crate::error::positive("plant.links", l)?;
        }
        if self.home.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("plant.home"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "plant.max_iterations",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }

    /// Spacing of the straight rest configuration.
    fn spacing(&self) -> f64 {
        self.segment_length * (1.0 + self.pretension)
    }

    /// Gripper position and tangent angle for joint angles `q`.
    pub fn gripper_pose(&self, q: &JointVector) -> (Vector2<f64>, f64) {
        let mut angle = 0.0;
        let mut tip = Vector2::zeros();
        for ((link, home), dq) in self.links.iter().zip(&self.home).zip(q.iter()) {
            angle += home + dq;
            tip += Vector2::new(angle.cos(), angle.sin()) * *link;
        }
        (tip, angle)
    }

    fn anchor(&self) -> (Vector2<f64>, Vector2<f64>) {
        let (tip, angle) = self.gripper_pose(&JointVector::zeros());
        let dir = Vector2::new(angle.cos(), angle.sin());
        (tip + dir * (self.spacing() * (self.nodes - 1) as f64), dir)
    }
}

/// Chain plant state: joint angles and the equilibrium node positions (m).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPlant {
    params: ChainParams,
    q: JointVector,
    t: f64,
    nodes: Vec<Vector2<f64>>,
}

impl ChainPlant {
    /// Solves the equilibrium at `q`, continuing from the straight rest shape.
    pub fn new(params: ChainParams, q: JointVector) -> Result<Self> {
        params.validate()?;
        if q.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("joint angles"));
        }
        let (tip, angle) = params.gripper_pose(&JointVector::zeros());
        let dir = Vector2::new(angle.cos(), angle.sin());
        let h = params.spacing();
        let nodes = (0..params.nodes).map(|i| tip + dir * (h * i as f64)).collect();
        let mut plant = Self {
            params,
            q: JointVector::zeros(),
            t: 0.0,
            nodes,
        };
        let substeps = (q.amax() / 0.05).ceil().max(1.0) as usize;
        for k in 1..=substeps {
            let target = q * (k as f64 / substeps as f64);
            plant.nodes = solve(&plant.params, &target, plant.nodes.clone())?;
            plant.q = target;
        }
        Ok(plant)
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn q(&self) -> &JointVector {
        &self.q
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Node positions in meters.
    pub fn nodes(&self) -> &[Vector2<f64>] {
        &self.nodes
    }

    /// Force residual norm of the stored equilibrium (N).
    pub fn residual(&self) -> f64 {
        let system = System::new(&self.params, &self.q);
        system.gradient(&self.nodes).norm()
    }

    pub fn centerline(&self) -> Centerline {
        project(&self.params, &self.nodes)
    }

    pub(super) fn step(&self, u: &JointVector, dt: f64) -> Result<Self> {
        let q = self.q + u * dt;
        let nodes = solve(&self.params, &q, self.nodes.clone())?;
        Ok(Self {
            params: self.params.clone(),
            q,
            t: self.t + dt,
            nodes,
        })
    }

    /// Features at a perturbed configuration, warm-started from this state.
    pub fn features_at(&self, map: &FeatureMap, q: &JointVector) -> Result<DVector<f64>> {
        let nodes = if self.params.gripper_pose(q) == self.params.gripper_pose(&self.q) {
            self.nodes.clone()
        } else {
            solve(&self.params, q, self.nodes.clone())?
        };
        Ok(map.extract(&project(&self.params, &nodes))?.into_inner())
    }

    /// Central finite-difference Jacobian of the features with step `h`.
    pub fn jacobian(&self, map: &FeatureMap, h: f64) -> Result<DeformationJacobian> {
        self.finite_difference(map, h, true)
    }

    /// One-sided (forward) finite-difference Jacobian; cruder but cheaper.
    pub fn forward_jacobian(&self, map: &FeatureMap, h: f64) -> Result<DeformationJacobian> {
        self.finite_difference(map, h, false)
    }

    fn finite_difference(&self, map: &FeatureMap, h: f64, central: bool) -> Result<DeformationJacobian> {
        crate::error::positive("finite-difference step", h)?;
        let mut j = DMatrix::zeros(map.dim(), 6);
        let here = if central {
            None
        } else {
            Some(map.extract(&self.centerline())?.into_inner())
        };
        for axis in 0..6 {
            let mut plus = self.q;
            plus[axis] += h;
            if self.params.gripper_pose(&plus) == self.params.gripper_pose(&self.q) {
                continue;
            }
            let column = match &here {
                None => {
                    let mut minus = self.q;
                    minus[axis] -= h;
                    (self.features_at(map, &plus)? - self.features_at(map, &minus)?) / (2.0 * h)
                }
                Some(s0) => (self.features_at(map, &plus)? - s0) / h,
            };
            j.set_column(axis, &column);
        }
        DeformationJacobian::new(j)
    }
}

fn project(params: &ChainParams, nodes: &[Vector2<f64>]) -> Centerline {
    let [ox, oy] = params.pixel_offset;
    let s = params.pixels_per_meter;
    Centerline::new(nodes.iter().map(|x| Point2::new(ox + s * x.x, oy - s * x.y)).collect())
        .expect("finite projected nodes")
}

/// Energy model with both ends fixed for one gripper configuration.
struct System<'a> {
    params: &'a ChainParams,
    grip: Vector2<f64>,
    grip_ghost: Vector2<f64>,
    anchor: Vector2<f64>,
    anchor_ghost: Vector2<f64>,
}

impl<'a> System<'a> {
    fn new(params: &'a ChainParams, q: &JointVector) -> Self {
        let (grip, angle) = params.gripper_pose(q);
        let h = params.spacing();
        let (anchor, anchor_dir) = params.anchor();
        Self {
            params,
            grip,
            grip_ghost: grip - Vector2::new(angle.cos(), angle.sin()) * h,
            anchor,
            anchor_ghost: anchor + anchor_dir * h,
        }
    }

    fn free(&self) -> usize {
        self.params.nodes - 2
    }

    /// Node position with ghosts at -1 and N.
    fn node(&self, x: &[Vector2<f64>], i: isize) -> Vector2<f64> {
        let n = self.params.nodes as isize;
        if i == -1 {
            self.grip_ghost
        } else if i == n {
            self.anchor_ghost
        } else {
            x[i as usize]
        }
    }

    /// Unknown slot of node `i`, if it is free.
    fn slot(&self, i: isize) -> Option<usize> {
        (i >= 1 && i <= self.params.nodes as isize - 2).then(|| 2 * (i as usize - 1))
    }

    fn with_ends(&self, x: &mut [Vector2<f64>]) {
        let n = x.len();
        x[0] = self.grip;
        x[n - 1] = self.anchor;
    }

    fn energy(&self, x: &[Vector2<f64>]) -> f64 {
        let p = self.params;
        let n = p.nodes as isize;
        let mut e = 0.0;
        for i in 0..p.nodes - 1 {
            let l = (x[i + 1] - x[i]).norm();
            e += 0.5 * p.stretch_stiffness * (l - p.segment_length).powi(2);
        }
        for i in 0..n {
            let b = self.node(x, i - 1) - 2.0 * self.node(x, i) + self.node(x, i + 1);
            e += 0.5 * p.bend_stiffness * b.norm_squared();
        }
        e
    }

    fn gradient(&self, x: &[Vector2<f64>]) -> DVector<f64> {
        let p = self.params;
        let n = p.nodes as isize;
        let mut g = DVector::zeros(2 * self.free());
        let mut add = |i: isize, v: Vector2<f64>| {
            if let Some(k) = self.slot(i) {
                g[k] += v.x;
                g[k + 1] += v.y;
            }
        };
        for i in 0..n - 1 {
            let d = x[(i + 1) as usize] - x[i as usize];
            let l = d.norm();
            let f = d * (p.stretch_stiffness * (l - p.segment_length) / l);
            add(i + 1, f);
            add(i, -f);
        }
        for i in 0..n {
            let b = (self.node(x, i - 1) - 2.0 * self.node(x, i) + self.node(x, i + 1)) * p.bend_stiffness;
            add(i - 1, b);
            add(i, -2.0 * b);
            add(i + 1, b);
        }
        g
    }

    /// Hessian with the compressive part of the spring geometric stiffness
    /// dropped, which keeps it positive definite.
    fn hessian(&self, x: &[Vector2<f64>]) -> DMatrix<f64> {
        let p = self.params;
        let n = p.nodes as isize;
        let dim = 2 * self.free();
        let mut h = DMatrix::zeros(dim, dim);
        let mut add = |a: isize, b: isize, m: &nalgebra::Matrix2<f64>| {
            if let (Some(ka), Some(kb)) = (self.slot(a), self.slot(b)) {
                let mut block = h.fixed_view_mut::<2, 2>(ka, kb);
                block += m;
            }
        };
        for i in 0..n - 1 {
            let d = x[(i + 1) as usize] - x[i as usize];
            let l = d.norm();
            let e = d / l;
            let eet = e * e.transpose();
            let geometric = (1.0 - p.segment_length / l).max(0.0);
            let k = (eet + (nalgebra::Matrix2::identity() - eet) * geometric) * p.stretch_stiffness;
            add(i, i, &k);
            add(i + 1, i + 1, &k);
            add(i, i + 1, &-k);
            add(i + 1, i, &-k);
        }
        let stencil = [(-1isize, 1.0), (0, -2.0), (1, 1.0)];
        for i in 0..n {
            for &(da, ca) in &stencil {
                for &(db, cb) in &stencil {
                    let m = nalgebra::Matrix2::identity() * (p.bend_stiffness * ca * cb);
                    add(i + da, i + db, &m);
                }
            }
        }
        h
    }
}

/// Damped Newton iteration on the nodal force balance.
fn solve(params: &ChainParams, q: &JointVector, mut x: Vec<Vector2<f64>>) -> Result<Vec<Vector2<f64>>> {
    let system = System::new(params, q);
    system.with_ends(&mut x);
    let free = system.free();
    let mut residual = f64::INFINITY;
    for _ in 0..params.max_iterations {
        let g = system.gradient(&x);
        residual = g.norm();
        if !residual.is_finite() {
            break;
        }
        if residual < params.tolerance {
            return Ok(x);
        }
        let mut hess = system.hessian(&x);
        let mut shift = 0.0;
        let step = loop {
            if let Some(chol) = hess.clone().cholesky() {
                break chol.solve(&(-&g));
            }
            shift = if shift == 0.0 { 1e-8 * params.stretch_stiffness } else { shift * 10.0 };
            for k in 0..hess.nrows() {
                hess[(k, k)] += shift;
            }
        };
        let trial = |alpha: f64| {
            let mut y = x.clone();
            for i in 0..free {
                y[i + 1] += Vector2::new(step[2 * i], step[2 * i + 1]) * alpha;
            }
            y
        };
        // close to the solution the energy is flat to roundoff; take full steps
        if residual < 1e-6 * params.stretch_stiffness * params.segment_length {
            x = trial(1.0);
            continue;
        }
        let e0 = system.energy(&x);
        let slope = g.dot(&step);
        let mut alpha = 1.0;
        loop {
            let y = trial(alpha);
            if system.energy(&y) <= e0 + 1e-4 * alpha * slope || alpha < 1e-10 {
                x = y;
                break;
            }
            alpha *= 0.5;
        }
    }
    Err(Error::NoConvergence {
        iterations: params.max_iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::{FeatureKind, PlantState};

    fn rest() -> ChainPlant {
        ChainPlant::new(ChainParams::default(), JointVector::zeros()).unwrap()
    }

    fn fourier() -> FeatureMap {
        FeatureMap::new(FeatureKind::Fourier, 6, 20).unwrap()
    }

    #[test]
    fn rest_shape_is_straight_and_uniform() {
        let c = rest().centerline();
        let pts = c.points();
        let spacing = pts[1] - pts[0];
        for w in pts.windows(2) {
            assert!(((w[1] - w[0]) - spacing).norm() < 1e-9);
        }
        assert!(spacing.y.abs() < 1e-12);
        assert!(rest().residual() < 1e-9);
    }

    #[test]
    fn gradient_matches_energy_differences() {
        let params = ChainParams::default();
        let q = JointVector::new(0.1, -0.2, 0.15, 0.0, 0.0, 0.0);
        let system = System::new(&params, &q);
        let mut x = rest().nodes().to_vec();
        system.with_ends(&mut x);
        for (i, xi) in x.iter_mut().enumerate().skip(1).take(params.nodes - 2) {
            xi.y += 0.003 * (i as f64).sin();
        }
        let g = system.gradient(&x);
        let h = 1e-7;
        for k in [0usize, 1, 7, 20, 35] {
            let node = k / 2 + 1;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[node][k % 2] += h;
            xm[node][k % 2] -= h;
            let fd = (system.energy(&xp) - system.energy(&xm)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6 * (1.0 + g[k].abs()), "slot {k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn equilibrium_is_deterministic() {
        let q = JointVector::new(0.05, -0.1, 0.2, 0.3, 0.0, 0.0);
        let a = ChainPlant::new(ChainParams::default(), q).unwrap();
        let b = ChainPlant::new(ChainParams::default(), q).unwrap();
        assert_eq!(a.centerline(), b.centerline());
        assert_eq!(a.centerline(), a.centerline());
        assert!(a.residual() < 1e-9);
    }

    #[test]
    fn zero_velocity_keeps_equilibrium() {
        let p: PlantState = ChainPlant::new(ChainParams::default(), JointVector::new(0.1, 0.0, -0.1, 0.0, 0.0, 0.0))
            .unwrap()
            .into();
        let next = p.step(&JointVector::zeros(), 1e-3).unwrap();
        assert_eq!(next.centerline(), p.centerline());
    }

    #[test]
    fn out_of_plane_joints_give_zero_columns() {
        let j = rest().jacobian(&fourier(), FD_STEP).unwrap();
        for axis in 3..6 {
            assert!(j.matrix().column(axis).iter().all(|&x| x == 0.0));
        }
        for axis in 0..3 {
            assert!(j.matrix().column(axis).norm() > 1.0);
        }
    }

    #[test]
    fn centerline_is_lipschitz_in_end_displacement() {
        let plant = rest();
        let base = plant.centerline();
        let mut ratios = Vec::new();
        for &delta in &[1e-3, 1e-4] {
            let q = JointVector::new(0.0, 0.0, delta, 0.0, 0.0, 0.0);
            let moved = ChainPlant::new(ChainParams::default(), q).unwrap();
            let (g0, _) = plant.params().gripper_pose(plant.q());
            let (g1, _) = plant.params().gripper_pose(&q);
            let end_px = (g1 - g0).norm() * plant.params().pixels_per_meter;
            let max_disp = base
                .points()
                .iter()
                .zip(moved.centerline().points())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            ratios.push(max_disp / end_px);
        }
        // empirical constant is stable across scales, so the bound holds with it
        let k = ratios[0].max(ratios[1]);
        assert!(k.is_finite() && k < 50.0, "{ratios:?}");
        assert!((ratios[0] / ratios[1] - 1.0).abs() < 0.1, "{ratios:?}");
    }

    #[test]
    fn invalid_params_rejected() {
        let params = ChainParams {
            nodes: 2,
            ..ChainParams::default()
        };
        assert!(ChainPlant::new(params, JointVector::zeros()).is_err());
        let params = ChainParams {
            bend_stiffness: -1.0,
            ..ChainParams::default()
        };
        assert!(ChainPlant::new(params, JointVector::zeros()).is_err());
    }

    #[test]
    fn solver_failure_is_reported() {
        let params = ChainParams {
            max_iterations: 1,
            ..ChainParams::default()
        };
        let err = ChainPlant::new(params, JointVector::new(0.3, 0.0, 0.0, 0.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { residual, .. } if residual > 0.0));
    }
}
