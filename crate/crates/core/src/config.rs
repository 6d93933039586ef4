//! Scenario configuration and its `key = value` text format.
//!
//! ```text
//! # comment
//! plant.kind = chain
//! gains.eps1 = 0.1
//! limits.u_max = 5,5,5,5,5,5
//! ```
//!
//! Keys are dotted, values are scalars or comma-separated lists. Keys not
//! given keep their defaults. Unknown keys, unparsable values and violated
//! constraints are errors that carry the 1-based line number.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::controller::ControllerGains;
use crate::error::{Error, Result};
use crate::estimator::EstimatorGains;
use crate::plant::{ChainParams, FeatureKind, PlantKind};
use crate::saturation::{JointVector, SaturationLimits};

/// Desired-trajectory shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// `s_d` fixed.
    Constant,
    /// `s_d(t) = s_base + A sin(2 pi f t)` on every component.
    Sinusoid,
}

impl FromStr for TargetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "constant" => Ok(Self::Constant),
            "sinusoid" => Ok(Self::Sinusoid),
            other => Err(format!("unknown target kind `{other}` (expected constant|sinusoid)")),
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Constant => "constant",
            Self::Sinusoid => "sinusoid",
        })
    }
}

/// Desired features. The base shape is the one the plant shows at
/// `joints`, shifted by `offset` on every component.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub joints: JointVector,
    pub offset: f64,
    pub amplitude: f64,
    /// Hz.
    pub frequency: f64,
}

impl Default for TargetSpec {
    fn default() -> Self {
        Self {
            kind: TargetKind::Constant,
            joints: JointVector::zeros(),
            offset: 0.0,
            amplitude: 0.0,
            frequency: 0.1,
        }
    }
}

/// Parameters of the linear test plant.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    /// Typical magnitude of the nominal Jacobian entries (px/rad).
    pub jacobian_scale: f64,
    pub variation_amplitude: f64,
    /// rad/s.
    pub variation_rate: f64,
}

impl Default for LinearParams {
    fn default() -> Self {
        Self {
            jacobian_scale: 50.0,
            variation_amplitude: 0.0,
            variation_rate: 0.5,
        }
    }
}

/// Everything one closed-loop run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub plant: PlantKind,
    pub chain: ChainParams,
    pub linear: LinearParams,
    pub feature_map: FeatureKind,
    pub feature_dim: usize,
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
    /// Convergence threshold on `|e1|` for the report.
    pub threshold: f64,
    /// Ground-truth Jacobian is evaluated every this many rows.
    pub truth_interval: usize,
    pub limits: SaturationLimits,
    pub controller: ControllerGains,
    pub estimator: EstimatorGains,
    pub eta1_hat0: f64,
    pub eta2_hat0: f64,
    pub target: TargetSpec,
    /// Relative entrywise perturbation of the initial Jacobian estimate on
    /// the linear plant. The chain plant's estimate is identified by coarse
    /// finite differences instead.
    pub perturbation: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            plant: PlantKind::Linear,
            chain: ChainParams::default(),
            linear: LinearParams::default(),
            feature_map: FeatureKind::Subsample,
            feature_dim: 6,
            dt: 1e-3,
            duration: 10.0,
            seed: 1,
            threshold: 1e-2,
            truth_interval: 1,
            limits: SaturationLimits::new(JointVector::repeat(-0.6), JointVector::repeat(0.5))
                .expect("default limits"),
            controller: ControllerGains::default(),
            estimator: EstimatorGains::default(),
            eta1_hat0: 0.0,
            eta2_hat0: 0.0,
            target: TargetSpec::default(),
            perturbation: 0.2,
        }
    }
}

/// Every key accepted by [`parse_config`].
pub const KEYS: &[&str] = &[
    "plant.kind",
    "plant.nodes",
    "plant.segment_length",
    "plant.stretch_stiffness",
    "plant.bend_stiffness",
    "plant.pretension",
    "plant.links",
    "plant.home",
    "plant.pixels_per_meter",
    "plant.pixel_offset",
    "plant.tolerance",
    "plant.max_iterations",
    "plant.jacobian_scale",
    "plant.variation_amplitude",
    "plant.variation_rate",
    "features.map",
    "features.p",
    "sim.dt",
    "sim.duration",
    "sim.seed",
    "sim.threshold",
    "sim.truth_interval",
    "limits.u_min",
    "limits.u_max",
    "gains.eps1",
    "gains.eps2",
    "gains.gamma1",
    "gains.gamma2",
    "gains.pinv_damping",
    "gains.sigma_guard",
    "gains.v_guard",
    "gains.filter_cutoff",
    "gains.eta1_hat0",
    "gains.eta2_hat0",
    "target.kind",
    "target.joints",
    "target.offset",
    "target.amplitude",
    "target.frequency",
    "estimator.perturbation",
];

/// Parses a document on top of the defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_config_onto(ScenarioConfig::default(), text)
}

/// Parses a document on top of `base` (e.g. a preset).
pub fn parse_config_onto(base: ScenarioConfig, text: &str) -> Result<ScenarioConfig> {
    let mut cfg = base;
    let mut lines: HashMap<String, usize> = HashMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        if let Some(previous) = lines.insert(key.to_string(), line) {
            return Err(Error::Config {
                line,
                message: format!("duplicate key `{key}` (first set on line {previous})"),
            });
        }
        set_key(&mut cfg, key, value.trim(), line)?;
    }
    validate(&cfg, &|key| lines.get(key).copied().unwrap_or(0))?;
    Ok(cfg)
}

/// Sets one key, as if it appeared alone on `line`, and revalidates.
pub fn apply_override(cfg: &mut ScenarioConfig, key: &str, value: &str) -> Result<()> {
    let mut next = cfg.clone();
    set_key(&mut next, key, value.trim(), 0)?;
    validate(&next, &|_| 0)?;
    *cfg = next;
    Ok(())
}

fn scalar<T: FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        message: format!("`{key}` expects a {}, got `{value}`", type_label::<T>()),
    })
}

fn type_label<T>() -> &'static str {
    let name = std::any::type_name::<T>();
    if name.contains("f64") {
        "number"
    } else if name.contains("usize") || name.contains("u64") {
        "non-negative integer"
    } else {
        "recognised value"
    }
}

fn list(value: &str, line: usize, key: &str) -> Result<Vec<f64>> {
    value.split(',').map(|part| scalar::<f64>(part.trim(), line, key)).collect()
}

fn fixed<const N: usize>(value: &str, line: usize, key: &str) -> Result<[f64; N]> {
    let values = list(value, line, key)?;
    values.try_into().map_err(|v: Vec<f64>| Error::Config {
        line,
        message: format!("`{key}` expects {N} comma-separated numbers, got {}", v.len()),
    })
}

/// Six values, or one value repeated on every axis.
fn joints(value: &str, line: usize, key: &str) -> Result<JointVector> {
    let values = list(value, line, key)?;
    match values.len() {
        1 => Ok(JointVector::repeat(values[0])),
        6 => Ok(JointVector::from_column_slice(&values)),
        n => Err(Error::Config {
            line,
            message: format!("`{key}` expects 1 or 6 comma-separated numbers, got {n}"),
        }),
    }
}

fn set_key(cfg: &mut ScenarioConfig, key: &str, value: &str, line: usize) -> Result<()> {
    let enum_err = |message: String| Error::Config { line, message };
    let num = |v: &str| scalar::<f64>(v, line, key);
    let count = |v: &str| scalar::<usize>(v, line, key);
    match key {
        "plant.kind" => cfg.plant = value.parse().map_err(enum_err)?,
        "plant.nodes" => cfg.chain.nodes = count(value)?,
        "plant.segment_length" => cfg.chain.segment_length = num(value)?,
        "plant.stretch_stiffness" => cfg.chain.stretch_stiffness = num(value)?,
        "plant.bend_stiffness" => cfg.chain.bend_stiffness = num(value)?,
        "plant.pretension" => cfg.chain.pretension = num(value)?,
        "plant.links" => cfg.chain.links = fixed::<3>(value, line, key)?,
        "plant.home" => cfg.chain.home = fixed::<3>(value, line, key)?,
        "plant.pixels_per_meter" => cfg.chain.pixels_per_meter = num(value)?,
        "plant.pixel_offset" => cfg.chain.pixel_offset = fixed::<2>(value, line, key)?,
        "plant.tolerance" => cfg.chain.tolerance = num(value)?,
        "plant.max_iterations" => cfg.chain.max_iterations = count(value)?,
        "plant.jacobian_scale" => cfg.linear.jacobian_scale = num(value)?,
        "plant.variation_amplitude" => cfg.linear.variation_amplitude = num(value)?,
        "plant.variation_rate" => cfg.linear.variation_rate = num(value)?,
        "features.map" => cfg.feature_map = value.parse().map_err(enum_err)?,
        "features.p" => cfg.feature_dim = count(value)?,
        "sim.dt" => cfg.dt = num(value)?,
        "sim.duration" => cfg.duration = num(value)?,
        "sim.seed" => cfg.seed = scalar(value, line, key)?,
        "sim.threshold" => cfg.threshold = num(value)?,
        "sim.truth_interval" => cfg.truth_interval = count(value)?,
        "limits.u_min" | "limits.u_max" => {
            let v = joints(value, line, key)?;
            let (lo, hi) = if key == "limits.u_min" {
                (v, *cfg.limits.u_max())
            } else {
                (*cfg.limits.u_min(), v)
            };
            // Each side is checked on its own; the pair is checked again at the end.
            if key == "limits.u_min" && v.iter().any(|x| !(x.is_finite() && *x < 0.0)) {
                return Err(enum_err(format!("`{key}` entries must be finite and < 0")));
            }
            if key == "limits.u_max" && v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(enum_err(format!("`{key}` entries must be finite and > 0")));
            }
            cfg.limits = SaturationLimits::new(lo, hi).map_err(|e| enum_err(e.to_string()))?;
        }
        "gains.eps1" => cfg.controller.eps1 = num(value)?,
        "gains.eps2" => cfg.estimator.eps2 = num(value)?,
        "gains.gamma1" => cfg.controller.gamma1 = num(value)?,
        "gains.gamma2" => cfg.estimator.gamma2 = num(value)?,
        "gains.pinv_damping" => cfg.estimator.pinv_damping = num(value)?,
        "gains.sigma_guard" => cfg.controller.sigma_guard = num(value)?,
        "gains.v_guard" => cfg.estimator.v_guard = num(value)?,
        "gains.filter_cutoff" => cfg.estimator.filter_cutoff = num(value)?,
        "gains.eta1_hat0" => cfg.eta1_hat0 = num(value)?,
        "gains.eta2_hat0" => cfg.eta2_hat0 = num(value)?,
        "target.kind" => cfg.target.kind = value.parse().map_err(enum_err)?,
        "target.joints" => cfg.target.joints = joints(value, line, key)?,
        "target.offset" => cfg.target.offset = num(value)?,
        "target.amplitude" => cfg.target.amplitude = num(value)?,
        "target.frequency" => cfg.target.frequency = num(value)?,
        "estimator.perturbation" => cfg.perturbation = num(value)?,
        other => {
            return Err(Error::Config {
                line,
                message: format!("unknown key `{other}`"),
            })
        }
    }
    check_key(cfg, key).map_err(|message| Error::Config { line, message })
}

/// Per-key constraints, checked as soon as the key is set.
fn check_key(cfg: &ScenarioConfig, key: &str) -> std::result::Result<(), String> {
    let positive = |name: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(format!("`{name}` must be finite and > 0, got {v}"))
        }
    };
    let non_negative = |name: &str, v: f64| {
        if v.is_finite() && v >= 0.0 {
            Ok(())
        } else {
            Err(format!("`{name}` must be finite and >= 0, got {v}"))
        }
    };
    let finite = |name: &str, v: f64| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(format!("`{name}` must be finite, got {v}"))
        }
    };
    match key {
        "plant.nodes" if cfg.chain.nodes < 3 => Err(format!("`{key}` must be >= 3, got {}", cfg.chain.nodes)),
        "plant.segment_length" => positive(key, cfg.chain.segment_length),
        "plant.stretch_stiffness" => positive(key, cfg.chain.stretch_stiffness),
        "plant.bend_stiffness" => positive(key, cfg.chain.bend_stiffness),
        "plant.pretension" => non_negative(key, cfg.chain.pretension),
        "plant.links" => cfg.chain.links.iter().try_for_each(|l| positive(key, *l)),
        "plant.pixels_per_meter" => positive(key, cfg.chain.pixels_per_meter),
        "plant.pixel_offset" => cfg.chain.pixel_offset.iter().try_for_each(|l| finite(key, *l)),
        "plant.home" => cfg.chain.home.iter().try_for_each(|l| finite(key, *l)),
        "plant.tolerance" => positive(key, cfg.chain.tolerance),
        "plant.max_iterations" if cfg.chain.max_iterations == 0 => Err(format!("`{key}` must be >= 1")),
        "plant.jacobian_scale" => positive(key, cfg.linear.jacobian_scale),
        "plant.variation_amplitude" => non_negative(key, cfg.linear.variation_amplitude),
        "plant.variation_rate" => finite(key, cfg.linear.variation_rate),
        "features.p" if cfg.feature_dim == 0 || cfg.feature_dim % 2 != 0 => {
            Err(format!("`{key}` must be even and > 0, got {}", cfg.feature_dim))
        }
        "sim.dt" => positive(key, cfg.dt),
        "sim.duration" => non_negative(key, cfg.duration),
        "sim.threshold" => positive(key, cfg.threshold),
        "sim.truth_interval" if cfg.truth_interval == 0 => Err(format!("`{key}` must be >= 1")),
        "gains.eps1" => positive(key, cfg.controller.eps1),
        "gains.eps2" => positive(key, cfg.estimator.eps2),
        "gains.gamma1" => positive(key, cfg.controller.gamma1),
        "gains.gamma2" => positive(key, cfg.estimator.gamma2),
        "gains.pinv_damping" => positive(key, cfg.estimator.pinv_damping),
        "gains.sigma_guard" => positive(key, cfg.controller.sigma_guard),
        "gains.v_guard" => positive(key, cfg.estimator.v_guard),
        "gains.filter_cutoff" => positive(key, cfg.estimator.filter_cutoff),
        "gains.eta1_hat0" => non_negative(key, cfg.eta1_hat0),
        "gains.eta2_hat0" => non_negative(key, cfg.eta2_hat0),
        "target.joints" => cfg.target.joints.iter().try_for_each(|v| finite(key, *v)),
        "target.offset" => finite(key, cfg.target.offset),
        "target.amplitude" => non_negative(key, cfg.target.amplitude),
        "target.frequency" => non_negative(key, cfg.target.frequency),
        "estimator.perturbation" => non_negative(key, cfg.perturbation),
        _ => Ok(()),
    }
}

/// Whole-config checks: cross-field constraints and the owning modules' own
/// validation. `line_of` maps a key to the line that set it.
fn validate(cfg: &ScenarioConfig, line_of: &dyn Fn(&str) -> usize) -> Result<()> {
    let fail = |key: &str, message: String| Error::Config {
        line: line_of(key),
        message,
    };
    if cfg.duration < cfg.dt && cfg.duration != 0.0 {
        return Err(fail(
            "sim.duration",
            format!("`sim.duration` ({}) must be 0 or >= `sim.dt` ({})", cfg.duration, cfg.dt),
        ));
    }
    if cfg.feature_dim > 2 * cfg.chain.nodes {
        return Err(fail(
            "features.p",
            format!("`features.p` ({}) exceeds 2 x `plant.nodes` ({})", cfg.feature_dim, 2 * cfg.chain.nodes),
        ));
    }
    cfg.controller
        .validate()
        .map_err(|e| fail("gains.sigma_guard", e.to_string()))?;
    cfg.estimator.validate().map_err(|e| fail("gains.eps2", e.to_string()))?;
    if cfg.plant == PlantKind::Chain {
        cfg.chain.validate().map_err(|e| fail("plant.kind", e.to_string()))?;
    }
    Ok(())
}

/// Renders `cfg` in the same format [`parse_config`] reads.
pub fn render_config(cfg: &ScenarioConfig) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
    let c = &cfg.chain;
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    put("plant.kind", cfg.plant.to_string());
    put("plant.nodes", c.nodes.to_string());
    put("plant.segment_length", format!("{:?}", c.segment_length));
    put("plant.stretch_stiffness", format!("{:?}", c.stretch_stiffness));
    put("plant.bend_stiffness", format!("{:?}", c.bend_stiffness));
    put("plant.pretension", format!("{:?}", c.pretension));
    put("plant.links", join(&c.links));
    put("plant.home", join(&c.home));
    put("plant.pixels_per_meter", format!("{:?}", c.pixels_per_meter));
    put("plant.pixel_offset", join(&c.pixel_offset));
    put("plant.tolerance", format!("{:?}", c.tolerance));
    put("plant.max_iterations", c.max_iterations.to_string());
    put("plant.jacobian_scale", format!("{:?}", cfg.linear.jacobian_scale));
    put("plant.variation_amplitude", format!("{:?}", cfg.linear.variation_amplitude));
    put("plant.variation_rate", format!("{:?}", cfg.linear.variation_rate));
    put("features.map", cfg.feature_map.to_string());
    put("features.p", cfg.feature_dim.to_string());
    put("sim.dt", format!("{:?}", cfg.dt));
    put("sim.duration", format!("{:?}", cfg.duration));
    put("sim.seed", cfg.seed.to_string());
    put("sim.threshold", format!("{:?}", cfg.threshold));
    put("sim.truth_interval", cfg.truth_interval.to_string());
    put("limits.u_min", join(cfg.limits.u_min().as_slice()));
    put("limits.u_max", join(cfg.limits.u_max().as_slice()));
    put("gains.eps1", format!("{:?}", cfg.controller.eps1));
    put("gains.eps2", format!("{:?}", cfg.estimator.eps2));
    put("gains.gamma1", format!("{:?}", cfg.controller.gamma1));
    put("gains.gamma2", format!("{:?}", cfg.estimator.gamma2));
    put("gains.pinv_damping", format!("{:?}", cfg.estimator.pinv_damping));
    put("gains.sigma_guard", format!("{:?}", cfg.controller.sigma_guard));
    put("gains.v_guard", format!("{:?}", cfg.estimator.v_guard));
    put("gains.filter_cutoff", format!("{:?}", cfg.estimator.filter_cutoff));
    put("gains.eta1_hat0", format!("{:?}", cfg.eta1_hat0));
    put("gains.eta2_hat0", format!("{:?}", cfg.eta2_hat0));
    put("target.kind", cfg.target.kind.to_string());
    put("target.joints", join(cfg.target.joints.as_slice()));
    put("target.offset", format!("{:?}", cfg.target.offset));
    put("target.amplitude", format!("{:?}", cfg.target.amplitude));
    put("target.frequency", format!("{:?}", cfg.target.frequency));
    put("estimator.perturbation", format!("{:?}", cfg.perturbation));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: Error) -> usize {
        match err {
            Error::Config { line, .. } => line,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), ScenarioConfig::default());
        assert_eq!(parse_config("# only a comment\n\n   \n").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn negative_gain_rejected_with_line() {
        let err = parse_config("sim.dt = 0.001\ngains.gamma1 = -1\n").unwrap_err();
        assert!(err.to_string().contains("> 0"), "{err}");
        assert_eq!(line_of(err), 2);
    }

    #[test]
    fn asymmetric_limits_accepted() {
        let cfg = parse_config("limits.u_max = 5,5,5,5,5,5\nlimits.u_min = -6,-6,-6,-6,-6,-6\n").unwrap();
        assert_eq!(cfg.limits, SaturationLimits::uniform(-6.0, 5.0).unwrap());
        let single = parse_config("limits.u_max = 5\nlimits.u_min = -6 # broadcast\n").unwrap();
        assert_eq!(single.limits, cfg.limits);
    }

    #[test]
    fn unknown_key_and_type_mismatch() {
        assert_eq!(line_of(parse_config("\n\ngains.eps3 = 1").unwrap_err()), 3);
        let err = parse_config("sim.dt = fast").unwrap_err();
        assert!(err.to_string().contains("number"), "{err}");
        assert_eq!(line_of(err), 1);
        assert_eq!(line_of(parse_config("features.p = 2.5").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("plant.kind = rubber").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("limits.u_max = 1,2").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("no equals sign").unwrap_err()), 1);
    }

    #[test]
    fn limit_sign_violations() {
        assert_eq!(line_of(parse_config("a = 1").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("sim.seed = 3\nlimits.u_min = 0.5").unwrap_err()), 2);
        assert_eq!(line_of(parse_config("limits.u_max = -1").unwrap_err()), 1);
    }

    #[test]
    fn cross_field_constraints_cite_the_key() {
        let err = parse_config("sim.dt = 0.01\nsim.duration = 0.001\n").unwrap_err();
        assert_eq!(line_of(err), 2);
        let err = parse_config("plant.nodes = 4\nfeatures.p = 10\n").unwrap_err();
        assert_eq!(line_of(err), 2);
        assert!(parse_config("sim.duration = 0").is_ok());
    }

    #[test]
    fn duplicate_key_rejected() {
        assert_eq!(line_of(parse_config("sim.seed = 1\nsim.seed = 2").unwrap_err()), 2);
    }

    #[test]
    fn render_round_trips() {
        let mut cfg = ScenarioConfig::default();
        cfg.plant = PlantKind::Chain;
        cfg.feature_map = FeatureKind::Fourier;
        cfg.target.joints = JointVector::new(0.1, -0.2, 0.3, 0.0, 0.0, 0.0);
        cfg.limits = SaturationLimits::uniform(-0.25, 0.2).unwrap();
        cfg.seed = 99;
        assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn every_listed_key_is_settable() {
        let rendered = render_config(&ScenarioConfig::default());
        let keys: Vec<&str> = rendered.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        assert_eq!(keys, KEYS);
    }

    #[test]
    fn override_revalidates() {
        let mut cfg = ScenarioConfig::default();
        apply_override(&mut cfg, "gains.eps1", "0.5").unwrap();
        assert_eq!(cfg.controller.eps1, 0.5);
        assert!(apply_override(&mut cfg, "gains.eps1", "0").is_err());
        assert_eq!(cfg.controller.eps1, 0.5);
    }
}
