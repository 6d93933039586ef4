//! CSV and report serialization, and the open-loop saturation curve.

use std::io::Write;

use crate::error::Result;
use crate::saturation::{gauss_sat_axis, SaturationLimits};
use crate::scenario::{RunReport, TrajectoryRecord};

/// Column names for records with `p` features.
pub fn trajectory_header(p: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    let mut group = |name: &str, n: usize| cols.extend((0..n).map(|i| format!("{name}_{i}")));
    group("s", p);
    group("s_d", p);
    group("e1", p);
    cols.push("e1_norm".into());
    let mut group = |name: &str, n: usize| cols.extend((0..n).map(|i| format!("{name}_{i}")));
    group("sigma1", p);
    group("sigma2", p);
    group("v", 6);
    group("u", 6);
    group("u_tilde", 6);
    cols.extend(
        ["eta1_hat", "eta2_hat", "j_hat_norm", "j_tilde_norm", "V", "V1", "V2"]
            .iter()
            .map(|s| s.to_string()),
    );
    cols
}

/// Shortest round-trip representation, so equal values print identically.
fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Writes the header and one row per record. `j_tilde_norm` is left empty
/// on rows without a ground-truth Jacobian.
pub fn write_trajectory<W: Write>(records: &[TrajectoryRecord], out: W) -> Result<()> {
    let p = records.first().map_or(0, |r| r.s.len());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trajectory_header(p))?;
    for r in records {
        let mut row = vec![num(r.t)];
        for v in [&r.s, &r.s_d, &r.e1] {
            row.extend(v.iter().copied().map(num));
        }
        row.push(num(r.e1_norm));
        for v in [&r.sigma1, &r.sigma2] {
            row.extend(v.iter().copied().map(num));
        }
        for v in [&r.v, &r.u, &r.u_tilde] {
            row.extend(v.iter().copied().map(num));
        }
        row.push(num(r.eta1_hat));
        row.push(num(r.eta2_hat));
        row.push(num(r.j_hat_norm));
        row.push(r.j_tilde_norm.map(num).unwrap_or_default());
        row.push(num(r.v_total));
        row.push(num(r.v1));
        row.push(num(r.v2));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Flat `key = value` summary.
pub fn render_report(report: &RunReport) -> String {
    let opt = |x: Option<f64>| x.map_or_else(|| "none".to_string(), |v| format!("{v:?}"));
    let mut lines = vec![
        format!("rows = {}", report.rows),
        format!("final_time = {:?}", report.final_time),
        format!("final_e1_norm = {:?}", report.final_e1_norm),
        format!("threshold = {:?}", report.threshold),
        format!("convergence_time = {}", opt(report.convergence_time)),
        format!("sup_eta1_hat = {:?}", report.sup_eta1_hat),
        format!("sup_eta2_hat = {:?}", report.sup_eta2_hat),
        format!("sup_j_hat_norm = {:?}", report.sup_j_hat_norm),
        format!("sup_j_tilde_norm = {}", opt(report.sup_j_tilde_norm)),
        format!("eta1_ref = {:?}", report.eta1_ref),
        format!("eta2_ref = {:?}", report.eta2_ref),
        format!("uub_a = {:?}", report.bounds.a),
        format!("uub_b = {:?}", report.bounds.b),
        format!("uub_ball = {:?}", report.bounds.ball),
        format!("decrease_tol = {:?}", report.decrease_tol),
    ];
    match &report.decrease {
        Some(d) => {
            lines.push(format!("decrease_intervals = {}", d.intervals));
            lines.push(format!("decrease_violations = {}", d.violations));
            lines.push(format!("decrease_violation_fraction = {:?}", d.violation_fraction));
            lines.push(format!("decrease_worst_margin = {:?}", d.worst_margin));
        }
        None => lines.push("decrease_intervals = 0".into()),
    }
    lines.push(format!("max_u_tilde_rate = {:?}", report.max_u_tilde_rate));
    lines.push(format!("saturation_compliant = {}", report.saturation_compliant));
    lines.push(format!("all_finite = {}", report.all_finite));
    lines.push(format!(
        "aborted = {}",
        report.aborted.as_deref().map_or("none".to_string(), |m| m.replace('\n', " "))
    ));
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

/// One sample of the open-loop saturation curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationSample {
    pub t: f64,
    pub v: f64,
    pub hard: f64,
    pub gauss: f64,
}

/// `v(t) = amplitude sin(frequency t)` on `[0, duration]` through both
/// saturations of axis 0 of `limits`. `frequency` is in rad/s.
pub fn saturation_curve(
    limits: &SaturationLimits,
    amplitude: f64,
    frequency: f64,
    duration: f64,
    dt: f64,
) -> Result<Vec<SaturationSample>> {
    crate::error::positive("dt", dt)?;
    let (lo, hi) = (limits.u_min()[0], limits.u_max()[0]);
    let n = crate::scenario::step_count(duration, dt);
    Ok((0..=n)
        .map(|k| {
            let t = k as f64 * dt;
            let v = amplitude * (frequency * t).sin();
            SaturationSample {
                t,
                v,
                hard: v.clamp(lo, hi),
                gauss: gauss_sat_axis(v, lo, hi),
            }
        })
        .collect())
}

/// Writes the saturation curve as CSV with columns `t, v, hard_sat, gauss_sat`.
pub fn saturation_demo<W: Write>(
    limits: &SaturationLimits,
    amplitude: f64,
    frequency: f64,
    duration: f64,
    dt: f64,
    out: W,
) -> Result<Vec<SaturationSample>> {
    let curve = saturation_curve(limits, amplitude, frequency, duration, dt)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "v", "hard_sat", "gauss_sat"])?;
    for s in &curve {
        w.write_record([num(s.t), num(s.v), num(s.hard), num(s.gauss)])?;
    }
    w.flush()?;
    Ok(curve)
}
