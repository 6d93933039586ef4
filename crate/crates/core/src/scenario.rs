//! Fixed-step closed-loop simulation, presets and run summaries.
//!
//! One step reads the features, updates the rate filters, forms both errors
//! and surfaces, computes and saturates the command, then advances the plant,
//! the Jacobian estimate and both adaptive gains. Lyapunov values need the
//! disturbance suprema of the whole run, so they are filled in afterwards.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Point2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ScenarioConfig, TargetKind};
use crate::controller::{adapt_eta1, control_law, update_surface1, ControllerState};
use crate::error::{Error, Result};
use crate::estimator::{adapt_eta2, djm_update, measurement_error, update_surface2, CommandRate, EstimatorState};
use crate::monitor::{check_decrease, lyapunov, uub_bounds, DecreaseReport, LyapunovSample, UubBounds};
use crate::plant::{
    Centerline, ChainPlant, DeformationJacobian, FeatureMap, JacobianVariation, LinearPlant, PlantKind, PlantState,
};
use crate::saturation::{gauss_sat, JointVector};

/// Shipped scenario presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1Saturation,
    RegulationLinear,
    TrackingLinear,
    RegulationChain,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Fig1Saturation,
        Preset::RegulationLinear,
        Preset::TrackingLinear,
        Preset::RegulationChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig1Saturation => "fig1-saturation",
            Self::RegulationLinear => "regulation-linear",
            Self::TrackingLinear => "tracking-linear",
            Self::RegulationChain => "regulation-chain",
        }
    }

    pub fn config(self) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        match self {
            // Closed loop under the u_max = 5, u_min = -6 limits with a target
            // far enough away that the first second is spent saturated. The
            // open-loop curve itself comes from `output::saturation_demo`.
            Self::Fig1Saturation => {
                cfg.limits = crate::saturation::SaturationLimits::uniform(-6.0, 5.0).expect("preset limits");
                cfg.linear.jacobian_scale = 5.0;
                cfg.target.joints = JointVector::new(6.0, -6.5, 4.5, 5.0, -6.0, 3.5);
            }
            Self::RegulationLinear => {
                cfg.target.joints = JointVector::new(0.05, -0.04, 0.03, 0.04, -0.03, 0.02);
            }
            Self::TrackingLinear => {
                cfg.linear.variation_amplitude = 0.1;
                cfg.linear.variation_rate = 0.5;
                cfg.target.kind = TargetKind::Sinusoid;
                cfg.target.amplitude = 2.0;
                cfg.target.frequency = 0.2;
                // the command reverses twice per period; below this the
                // regressor division in the Jacobian update is ill-posed
                cfg.estimator.v_guard = 0.02;
            }
            Self::RegulationChain => {
                cfg.plant = PlantKind::Chain;
                cfg.feature_map = crate::plant::FeatureKind::Fourier;
                cfg.feature_dim = 6;
                cfg.limits = crate::saturation::SaturationLimits::uniform(-0.25, 0.2).expect("preset limits");
                cfg.target.joints = JointVector::new(0.1, -0.15, 0.1, 0.0, 0.0, 0.0);
                cfg.truth_interval = 100;
            }
        }
        cfg
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "preset",
                reason: format!(
                    "unknown preset `{s}` (expected one of {})",
                    Preset::ALL.map(Preset::name).join(", ")
                ),
            })
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One logged row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub s: DVector<f64>,
    pub s_d: DVector<f64>,
    pub e1: DVector<f64>,
    pub e1_norm: f64,
    pub sigma1: DVector<f64>,
    pub sigma2: DVector<f64>,
    pub v: JointVector,
    pub u: JointVector,
    pub u_tilde: JointVector,
    pub eta1_hat: f64,
    pub eta2_hat: f64,
    pub j_hat_norm: f64,
    /// `|J_hat - J|_F`, on rows where the true Jacobian was evaluated.
    pub j_tilde_norm: Option<f64>,
    pub v_total: f64,
    pub v1: f64,
    pub v2: f64,
}

/// Summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub rows: usize,
    pub final_time: f64,
    pub final_e1_norm: f64,
    /// First logged time with `|e1| < threshold`.
    pub convergence_time: Option<f64>,
    pub threshold: f64,
    pub sup_eta1_hat: f64,
    pub sup_eta2_hat: f64,
    pub sup_j_hat_norm: f64,
    pub sup_j_tilde_norm: Option<f64>,
    /// Measured supremum of `|d|`.
    pub eta1_ref: f64,
    /// Measured supremum of `|J_hat_dot u_tilde|`.
    pub eta2_ref: f64,
    pub bounds: UubBounds,
    pub decrease_tol: f64,
    /// `None` with fewer than two rows.
    pub decrease: Option<DecreaseReport>,
    /// Largest `|u_tilde[k+1] - u_tilde[k]| / dt`.
    pub max_u_tilde_rate: f64,
    /// Every row satisfies `u_min <= u <= u_max` exactly.
    pub saturation_compliant: bool,
    pub all_finite: bool,
    /// Failure that ended the run early.
    pub aborted: Option<String>,
}

/// Rows, monitor samples and summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TrajectoryRecord>,
    pub samples: Vec<LyapunovSample>,
    pub report: RunReport,
}

/// Desired trajectory with its analytic derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub base: DVector<f64>,
    pub kind: TargetKind,
    pub amplitude: f64,
    pub frequency: f64,
}

impl Target {
    /// `(s_d(t), s_d_dot(t))`.
    pub fn at(&self, t: f64) -> (DVector<f64>, DVector<f64>) {
        match self.kind {
            TargetKind::Constant => (self.base.clone(), DVector::zeros(self.base.len())),
            TargetKind::Sinusoid => {
                let w = 2.0 * PI * self.frequency;
                let ones = DVector::from_element(self.base.len(), 1.0);
                (
                    &self.base + &ones * (self.amplitude * (w * t).sin()),
                    ones * (self.amplitude * w * (w * t).cos()),
                )
            }
        }
    }
}

/// Gently curved reference centerline (px) used by the linear plant.
pub fn linear_base_centerline(nodes: usize) -> Centerline {
    let points = (0..nodes)
        .map(|i| {
            let t = i as f64 / (nodes - 1) as f64;
            Point2::new(100.0 + 300.0 * t, 240.0 + 30.0 * (PI * t).sin())
        })
        .collect();
    Centerline::new(points).expect("valid base centerline")
}

/// Nominal linear-plant Jacobian: `scale (I + 0.3 R)` on the leading square
/// block and `0.3 scale R` below it, with `R` uniform in `[-1, 1]`.
fn nominal_jacobian(p: usize, scale: f64, rng: &mut ChaCha8Rng) -> Result<DeformationJacobian> {
    DeformationJacobian::new(DMatrix::from_fn(p, 6, |i, j| {
        let identity = if i == j { 1.0 } else { 0.0 };
        scale * (identity + 0.3 * rng.gen_range(-1.0..=1.0))
    }))
}

/// Entrywise relative perturbation `J_ij (1 + level r_ij)`, `r` uniform in `[-1, 1]`.
fn perturb(j: &DeformationJacobian, level: f64, rng: &mut ChaCha8Rng) -> Result<DeformationJacobian> {
    DeformationJacobian::new(j.matrix().map(|x| x * (1.0 + level * rng.gen_range(-1.0..=1.0))))
}

/// Joint step (rad) of the one-sided differences that identify the chain
/// plant's initial Jacobian estimate; coarse on purpose.
pub const CHAIN_IDENTIFICATION_STEP: f64 = 1e-2;

/// Plant at `q = 0`, the desired-feature base and the initial estimate.
struct Setup {
    plant: PlantState,
    map: FeatureMap,
    target: Target,
    j_hat0: DeformationJacobian,
}

fn setup(cfg: &ScenarioConfig) -> Result<Setup> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let map = FeatureMap::new(cfg.feature_map, cfg.feature_dim, cfg.chain.nodes)?;
    let (plant, target_shape) = match cfg.plant {
        PlantKind::Linear => {
            let j0 = nominal_jacobian(cfg.feature_dim, cfg.linear.jacobian_scale, &mut rng)?;
            let variation = JacobianVariation {
                amplitude: cfg.linear.variation_amplitude,
                rate: cfg.linear.variation_rate,
            };
            let shift = j0.apply(&cfg.target.joints);
            let plant = LinearPlant::new(&map, j0, linear_base_centerline(cfg.chain.nodes), variation)?;
            let s0 = map.extract(&plant.centerline())?.into_inner();
            (PlantState::Linear(plant), s0 + shift)
        }
        PlantKind::Chain => {
            let plant = ChainPlant::new(cfg.chain.clone(), JointVector::zeros())?;
            let goal = ChainPlant::new(cfg.chain.clone(), cfg.target.joints)?;
            let shape = map.extract(&goal.centerline())?.into_inner();
            (PlantState::Chain(plant), shape)
        }
    };
    let j_hat0 = match &plant {
        PlantState::Linear(_) => perturb(&plant.true_jacobian(&map)?, cfg.perturbation, &mut rng)?,
        PlantState::Chain(chain) => chain.forward_jacobian(&map, CHAIN_IDENTIFICATION_STEP)?,
    };
    let base = target_shape.add_scalar(cfg.target.offset);
    Ok(Setup {
        plant,
        map,
        target: Target {
            base,
            kind: cfg.target.kind,
            amplitude: cfg.target.amplitude,
            frequency: cfg.target.frequency,
        },
        j_hat0,
    })
}

/// Number of plant steps, `floor(duration / dt)` with a guard against the
/// representation error of the quotient.
pub fn step_count(duration: f64, dt: f64) -> usize {
    (duration / dt + 1e-9).floor() as usize
}

/// Runs one scenario. Setup problems are errors; a failure inside the loop
/// (plant solver, non-finite estimate) ends the run early, keeps the rows
/// logged so far and is reported in [`RunReport::aborted`].
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let Setup {
        mut plant,
        map,
        target,
        j_hat0,
    } = setup(cfg)?;
    run_with(cfg, &mut plant, &map, &target, j_hat0)
}

/// Runs the loop from an explicit plant, target and initial estimate.
pub fn run_with(
    cfg: &ScenarioConfig,
    plant: &mut PlantState,
    map: &FeatureMap,
    target: &Target,
    j_hat0: DeformationJacobian,
) -> Result<RunOutput> {
    crate::error::positive("dt", cfg.dt)?;
    let steps = step_count(cfg.duration, cfg.dt);
    let mut state = LoopState::new(cfg, plant.features(map)?.into_inner(), j_hat0)?;
    let mut records = Vec::with_capacity(steps + 1);
    let mut samples = Vec::with_capacity(steps + 1);
    let mut aborted = None;

    for k in 0..=steps {
        let step = match state.observe(cfg, plant, map, target, k) {
            Ok(step) => step,
            Err(e) => {
                aborted = Some(e.to_string());
                break;
            }
        };
        records.push(step.record.clone());
        let mut sample = LyapunovSample {
            t: step.record.t,
            ..LyapunovSample::default()
        };
        if k < steps {
            if let Err(e) = state.advance(cfg, plant, map, step, &mut sample) {
                aborted = Some(e.to_string());
            }
        }
        samples.push(sample);
        if aborted.is_some() {
            break;
        }
    }
    if records.is_empty() {
        return Err(Error::InvalidParameter {
            name: "scenario",
            reason: aborted.unwrap_or_default(),
        });
    }

    let report = summarize(cfg, &mut records, &mut samples, aborted)?;
    Ok(RunOutput {
        records,
        samples,
        report,
    })
}

/// Controller, estimator and filter state carried between steps.
struct LoopState {
    s: DVector<f64>,
    estimator: EstimatorState,
    controller: Option<ControllerState>,
    command_rate: CommandRate,
    u_prev: JointVector,
}

/// Everything computed from the measurement at one step.
struct Observed {
    record: TrajectoryRecord,
    controller: ControllerState,
    rates: crate::estimator::Rates,
    v_dot: Option<JointVector>,
}

impl LoopState {
    fn new(cfg: &ScenarioConfig, s: DVector<f64>, j_hat0: DeformationJacobian) -> Result<Self> {
        let mut estimator = EstimatorState::new(j_hat0, &cfg.estimator)?;
        estimator.eta2_hat = cfg.eta2_hat0;
        Ok(Self {
            s,
            estimator,
            controller: None,
            command_rate: CommandRate::new(cfg.estimator.filter_cutoff)?,
            u_prev: JointVector::zeros(),
        })
    }

    /// Rates, errors, surfaces and the saturated command at step `k`.
    fn observe(
        &mut self,
        cfg: &ScenarioConfig,
        plant: &PlantState,
        map: &FeatureMap,
        target: &Target,
        k: usize,
    ) -> Result<Observed> {
        let dt = cfg.dt;
        let t = k as f64 * dt;
        let rates = self.estimator.rates.push(&self.s, dt)?;
        let (s_d, s_d_dot) = target.at(t);
        let e1 = &self.s - &s_d;
        let controller = match self.controller.take() {
            None => {
                let mut c = ControllerState::new(e1.clone());
                c.eta1_hat = cfg.eta1_hat0;
                c
            }
            Some(c) => update_surface1(&c, &e1, dt)?,
        };
        if rates.valid {
            let e2 = measurement_error(&rates.s_dot, &self.estimator.j_hat, &self.u_prev)?;
            self.estimator = update_surface2(&self.estimator, &e2, dt)?;
        }
        let v = control_law(
            controller.sigma1(),
            &s_d_dot,
            &e1,
            &self.estimator.j_hat,
            controller.eta1_hat,
            &cfg.controller,
            cfg.estimator.pinv_damping,
        )?;
        let sat = gauss_sat(&v, &cfg.limits);
        let v_dot = self.command_rate.push(&v, dt)?;
        let j_tilde_norm = if k % cfg.truth_interval == 0 {
            plant
                .true_jacobian(map)
                .ok()
                .map(|j| (self.estimator.j_hat.matrix() - j.matrix()).norm())
        } else {
            None
        };
        let record = TrajectoryRecord {
            t,
            s: self.s.clone(),
            s_d,
            e1_norm: e1.norm(),
            e1,
            sigma1: controller.sigma1().clone(),
            sigma2: self.estimator.sigma2(),
            v,
            u: sat.u,
            u_tilde: sat.u_tilde,
            eta1_hat: controller.eta1_hat,
            eta2_hat: self.estimator.eta2_hat,
            j_hat_norm: self.estimator.j_hat.frobenius(),
            j_tilde_norm,
            v_total: 0.0,
            v1: 0.0,
            v2: 0.0,
        };
        Ok(Observed {
            record,
            controller,
            rates,
            v_dot,
        })
    }

    /// Plant step, Jacobian update and both adaptive laws.
    fn advance(
        &mut self,
        cfg: &ScenarioConfig,
        plant: &mut PlantState,
        map: &FeatureMap,
        step: Observed,
        sample: &mut LyapunovSample,
    ) -> Result<()> {
        let dt = cfg.dt;
        let Observed {
            record,
            mut controller,
            rates,
            v_dot,
        } = step;
        let next = plant.step(&record.u, dt)?;
        let s_next = next.features(map)?.into_inner();
        let d = (&s_next - &self.s) / dt - self.estimator.j_hat.apply(&record.v);
        sample.d_norm = d.norm();

        if let (true, Some(v_dot)) = (rates.valid, v_dot) {
            let updated = djm_update(&self.estimator, &rates.s_ddot, &record.v, &v_dot, &cfg.estimator, dt)?;
            let j_dot = (updated.j_hat.matrix() - self.estimator.j_hat.matrix()) / dt;
            sample.jdot_u_norm = (j_dot * DVector::from_column_slice(record.u_tilde.as_slice())).norm();
            self.estimator = updated;
        }
        controller.eta1_hat = adapt_eta1(controller.eta1_hat, &record.sigma1, &cfg.controller, dt);
        self.estimator.eta2_hat = adapt_eta2(self.estimator.eta2_hat, &record.sigma2, &cfg.estimator, dt);
        self.controller = Some(controller);
        *plant = next;
        self.s = s_next;
        self.u_prev = record.u;
        Ok(())
    }
}

fn summarize(
    cfg: &ScenarioConfig,
    records: &mut [TrajectoryRecord],
    samples: &mut [LyapunovSample],
    aborted: Option<String>,
) -> Result<RunReport> {
    let sup = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, f64::max);
    let eta1_ref = sup(&mut samples.iter().map(|s| s.d_norm));
    let eta2_ref = sup(&mut samples.iter().map(|s| s.jdot_u_norm));
    for (record, sample) in records.iter_mut().zip(samples.iter_mut()) {
        let l = lyapunov(
            &record.sigma1,
            &record.sigma2,
            record.eta1_hat,
            record.eta2_hat,
            eta1_ref,
            eta2_ref,
        );
        record.v_total = l.v_total;
        record.v1 = l.v1;
        record.v2 = l.v2;
        sample.v_total = l.v_total;
        sample.v1 = l.v1;
        sample.v2 = l.v2;
    }
    let bounds = uub_bounds(
        cfg.controller.gamma1,
        cfg.estimator.gamma2,
        cfg.controller.eps1,
        cfg.estimator.eps2,
        eta1_ref,
        eta2_ref,
    )?;
    let decrease_tol = 10.0 * bounds.a * bounds.b * cfg.dt;
    let decrease = check_decrease(samples, &bounds, cfg.dt, decrease_tol).ok();
    let last = records.last().expect("at least one row");
    let max_u_tilde_rate = sup(&mut records
        .windows(2)
        .map(|w| (w[1].u_tilde - w[0].u_tilde).norm() / cfg.dt));
    let j_tilde: Vec<f64> = records.iter().filter_map(|r| r.j_tilde_norm).collect();
    let finite = |v: &DVector<f64>| v.iter().all(|x| x.is_finite());
    let all_finite = records.iter().all(|r| {
        finite(&r.s)
            && finite(&r.e1)
            && finite(&r.sigma1)
            && finite(&r.sigma2)
            && r.v.iter().chain(r.u.iter()).chain(r.u_tilde.iter()).all(|x| x.is_finite())
            && [r.eta1_hat, r.eta2_hat, r.j_hat_norm, r.v_total].iter().all(|x| x.is_finite())
    });
    Ok(RunReport {
        rows: records.len(),
        final_time: last.t,
        final_e1_norm: last.e1_norm,
        convergence_time: records.iter().find(|r| r.e1_norm < cfg.threshold).map(|r| r.t),
        threshold: cfg.threshold,
        sup_eta1_hat: sup(&mut records.iter().map(|r| r.eta1_hat)),
        sup_eta2_hat: sup(&mut records.iter().map(|r| r.eta2_hat)),
        sup_j_hat_norm: sup(&mut records.iter().map(|r| r.j_hat_norm)),
        sup_j_tilde_norm: (!j_tilde.is_empty()).then(|| sup(&mut j_tilde.iter().copied())),
        eta1_ref,
        eta2_ref,
        bounds,
        decrease_tol,
        decrease,
        max_u_tilde_rate,
        saturation_compliant: records.iter().all(|r| cfg.limits.contains(&r.u)),
        all_finite,
        aborted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(preset: Preset, duration: f64) -> ScenarioConfig {
        let mut cfg = preset.config();
        cfg.duration = duration;
        cfg
    }

    #[test]
    fn zero_duration_gives_one_row() {
        let out = run_scenario(&short(Preset::RegulationLinear, 0.0)).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].t, 0.0);
        assert!(out.report.decrease.is_none());
        assert!(out.records[0].sigma1.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn row_count_matches_step_count() {
        let cfg = short(Preset::RegulationLinear, 0.05);
        let out = run_scenario(&cfg).unwrap();
        assert_eq!(out.records.len(), step_count(0.05, 1e-3) + 1);
        assert_eq!(out.records.len(), 51);
        assert!(out.records.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn exact_estimate_at_target_stays_put() {
        let mut cfg = short(Preset::RegulationLinear, 0.5);
        cfg.perturbation = 0.0;
        cfg.target.joints = JointVector::zeros();
        let out = run_scenario(&cfg).unwrap();
        assert!(out.records.iter().all(|r| r.e1_norm == 0.0));
        assert!(out.records.iter().all(|r| r.u == JointVector::zeros()));
    }

    #[test]
    fn sinusoid_target_derivative_matches_difference() {
        let target = Target {
            base: DVector::from_element(2, 3.0),
            kind: TargetKind::Sinusoid,
            amplitude: 1.5,
            frequency: 0.7,
        };
        let h = 1e-6;
        let (a, _) = target.at(0.3 - h);
        let (b, _) = target.at(0.3 + h);
        let (_, rate) = target.at(0.3);
        assert!(((b - a) / (2.0 * h) - rate).amax() < 1e-6);
        assert_eq!(target.at(0.0).0, DVector::from_element(2, 3.0));
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("nope".parse::<Preset>().is_err());
    }

    #[test]
    fn same_seed_same_rows() {
        let cfg = short(Preset::TrackingLinear, 0.2);
        assert_eq!(run_scenario(&cfg).unwrap(), run_scenario(&cfg).unwrap());
    }

    #[test]
    fn chain_run_starts_and_stays_inside_limits() {
        let out = run_scenario(&short(Preset::RegulationChain, 0.05)).unwrap();
        assert!(out.report.aborted.is_none());
        assert!(out.report.saturation_compliant);
        assert!(out.records[0].j_tilde_norm.is_some());
    }
}
