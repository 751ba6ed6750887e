//! Result tables for each experiment and atomic bundle writing.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::config::{ExperimentId, Format, Params, RunConfig};
use super::svg;
use super::table::{fmt_f64, fmt_opt_f64, fmt_opt_usize, provenance, Table, SCHEMA_VERSION};
use crate::experiments::rotation::{AngleSummary, PairTrial, PointComparison};
use crate::experiments::{
    run_cloud_experiment, run_line_experiment, run_speed_experiment, CloudReport, ExperimentError,
    LineReport, MeanStd, SpeedReport, TrialResult,
};
use crate::quat::EulerAngles;

pub const SPEED_SUMMARY_HEADER: [&str; 4] = ["model", "mean_iters", "std_iters", "converged_frac"];
pub const SPEED_TRIALS_HEADER: [&str; 5] = ["model", "trial", "seed", "iterations", "final_loss"];
pub const CURVES_HEADER: [&str; 4] = ["model", "trial", "epoch", "loss"];
pub const ROTATION_SUMMARY_HEADER: [&str; 5] = ["quantity", "mean", "std", "count", "trials"];
pub const ROTATION_TRIALS_HEADER: [&str; 9] = [
    "trial",
    "seed",
    "qnn_iterations",
    "rqnn_iterations",
    "qnn_final_loss",
    "rqnn_final_loss",
    "angle_qnn_rqnn_deg",
    "angle_qnn_input_deg",
    "angle_rqnn_input_deg",
];
pub const ROTATIONS_HEADER: [&str; 6] = ["trial", "subject", "model", "roll_deg", "pitch_deg", "yaw_deg"];
pub const REPORT_HEADER: [&str; 23] = [
    "trial",
    "point",
    "label",
    "x",
    "y",
    "z",
    "qnn_a",
    "qnn_b",
    "qnn_c",
    "qnn_d",
    "rqnn_a",
    "rqnn_b",
    "rqnn_c",
    "rqnn_d",
    "angle_qnn_rqnn_deg",
    "angle_qnn_input_deg",
    "angle_rqnn_input_deg",
    "qnn_roll_deg",
    "qnn_pitch_deg",
    "qnn_yaw_deg",
    "rqnn_roll_deg",
    "rqnn_pitch_deg",
    "rqnn_yaw_deg",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Speed(SpeedReport),
    Lines(LineReport),
    Cloud(CloudReport),
}

impl Outcome {
    pub fn all_trials(&self) -> Vec<&TrialResult> {
        match self {
            Outcome::Speed(r) => r.trials.iter().collect(),
            Outcome::Lines(r) => r.trials.iter().flat_map(|t| [&t.pair.qnn, &t.pair.rqnn]).collect(),
            Outcome::Cloud(r) => r.trials.iter().flat_map(|t| [&t.pair.qnn, &t.pair.rqnn]).collect(),
        }
    }

    /// Trials that hit the iteration cap.
    pub fn capped(&self) -> usize {
        self.all_trials().iter().filter(|t| !t.converged()).count()
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, ExperimentError> {
    Ok(match &cfg.params {
        Params::Speed(c) => Outcome::Speed(run_speed_experiment(c)?),
        Params::Lines(c) => Outcome::Lines(run_line_experiment(c)?),
        Params::Cloud(c) => Outcome::Cloud(run_cloud_experiment(c)?),
    })
}

fn curves(trials: &[&TrialResult]) -> Table {
    let mut t = Table::new("curves.csv", &CURVES_HEADER);
    for r in trials {
        for (epoch, loss) in &r.history {
            t.push(vec![r.model.to_string(), r.trial.to_string(), epoch.to_string(), fmt_f64(*loss)]);
        }
    }
    t
}

fn speed_tables(r: &SpeedReport) -> Vec<Table> {
    let mut summary = Table::new("summary.csv", &SPEED_SUMMARY_HEADER);
    for (model, s) in &r.summaries {
        summary.push(vec![
            model.to_string(),
            fmt_f64(s.mean_iters),
            fmt_f64(s.std_iters),
            fmt_f64(s.converged_frac()),
        ]);
    }
    let mut trials = Table::new("trials.csv", &SPEED_TRIALS_HEADER);
    for t in &r.trials {
        trials.push(vec![
            t.model.to_string(),
            t.trial.to_string(),
            t.seed.to_string(),
            fmt_opt_usize(t.iterations),
            fmt_f64(t.final_loss),
        ]);
    }
    vec![summary, trials, curves(&r.trials.iter().collect::<Vec<_>>())]
}

fn deg(x: Option<f64>) -> String {
    fmt_opt_f64(x.filter(|v| v.is_finite()).map(f64::to_degrees))
}

fn euler_cells(e: Option<EulerAngles>) -> [String; 3] {
    match e {
        Some(e) => e.to_degrees().map(fmt_f64),
        None => Default::default(),
    }
}

struct RotationView<'a> {
    pairs: Vec<&'a PairTrial>,
    angles: &'a AngleSummary,
    /// `(trial, subject, qnn euler, rqnn euler)`.
    euler_rows: Vec<(usize, &'static str, Option<EulerAngles>, Option<EulerAngles>)>,
    /// Label for the first point rows (tracked vertices).
    labels: Vec<&'static str>,
}

fn rotation_tables(v: &RotationView) -> Vec<Table> {
    let n = v.pairs.len();
    let mut summary = Table::new("summary.csv", &ROTATION_SUMMARY_HEADER);
    let mut stat = |name: &str, s: Option<MeanStd>| {
        let (mean, std, count) = s.map_or((f64::NAN, f64::NAN, 0), |s| (s.mean, s.std, s.count));
        summary.push(vec![name.into(), fmt_f64(mean), fmt_f64(std), count.to_string(), n.to_string()]);
    };
    let iters = |f: fn(&PairTrial) -> &TrialResult| {
        let xs: Vec<f64> = v.pairs.iter().filter_map(|p| f(p).iterations).map(|i| i as f64).collect();
        MeanStd::of(&xs)
    };
    stat("iterations_qnn", iters(|p| &p.qnn));
    stat("iterations_rqnn", iters(|p| &p.rqnn));
    let to_deg = |s: Option<MeanStd>| {
        s.map(|s| MeanStd {
            mean: s.mean.to_degrees(),
            std: s.std.to_degrees(),
            count: s.count,
        })
    };
    stat("angle_qnn_rqnn_deg", to_deg(v.angles.qnn_rqnn));
    stat("angle_qnn_input_deg", to_deg(v.angles.qnn_input));
    stat("angle_rqnn_input_deg", to_deg(v.angles.rqnn_input));

    let mut trials = Table::new("trials.csv", &ROTATION_TRIALS_HEADER);
    let mut report = Table::new("report.csv", &REPORT_HEADER);
    for p in &v.pairs {
        trials.push(vec![
            p.trial.to_string(),
            p.seed.to_string(),
            fmt_opt_usize(p.qnn.iterations),
            fmt_opt_usize(p.rqnn.iterations),
            fmt_f64(p.qnn.final_loss),
            fmt_f64(p.rqnn.final_loss),
            deg(Some(p.angles.qnn_rqnn)),
            deg(Some(p.angles.qnn_input)),
            deg(Some(p.angles.rqnn_input)),
        ]);
        for (i, pt) in p.points.iter().enumerate() {
            report.push(point_row(p.trial, i, v.labels.get(i).copied().unwrap_or(""), pt));
        }
    }
    let mut rotations = Table::new("rotations.csv", &ROTATIONS_HEADER);
    for (trial, subject, q, r) in &v.euler_rows {
        for (model, e) in [("qnn", q), ("rqnn", r)] {
            let mut row = vec![trial.to_string(), subject.to_string(), model.to_string()];
            row.extend(euler_cells(*e));
            rotations.push(row);
        }
    }
    let results: Vec<&TrialResult> = v.pairs.iter().flat_map(|p| [&p.qnn, &p.rqnn]).collect();
    vec![summary, trials, rotations, report, curves(&results)]
}

fn point_row(trial: usize, i: usize, label: &str, pt: &PointComparison) -> Vec<String> {
    let mut row = vec![trial.to_string(), i.to_string(), label.to_string()];
    row.extend([pt.input.x, pt.input.y, pt.input.z].map(fmt_f64));
    row.extend(pt.qnn_out.to_array().map(fmt_f64));
    row.extend(pt.rqnn_out.to_array().map(fmt_f64));
    row.extend([pt.angle_qnn_rqnn, pt.angle_qnn_input, pt.angle_rqnn_input].map(deg));
    row.extend(euler_cells(pt.euler_qnn));
    row.extend(euler_cells(pt.euler_rqnn));
    row
}

pub fn tables(outcome: &Outcome) -> Vec<Table> {
    match outcome {
        Outcome::Speed(r) => speed_tables(r),
        Outcome::Lines(r) => rotation_tables(&RotationView {
            pairs: r.trials.iter().map(|t| &t.pair).collect(),
            angles: &r.angles,
            euler_rows: r
                .trials
                .iter()
                .map(|t| (t.pair.trial, "line", t.line_euler_qnn, t.line_euler_rqnn))
                .collect(),
            labels: Vec::new(),
        }),
        Outcome::Cloud(r) => rotation_tables(&RotationView {
            pairs: r.trials.iter().map(|t| &t.pair).collect(),
            angles: &r.angles,
            euler_rows: r
                .trials
                .iter()
                .flat_map(|t| {
                    t.vertices
                        .iter()
                        .map(|v| (t.pair.trial, v.name, v.point.euler_qnn, v.point.euler_rqnn))
                })
                .collect(),
            labels: crate::experiments::data::TRACKED_VERTICES.iter().map(|(n, _)| *n).collect(),
        }),
    }
}

/// Writes `contents` to `dir/name` via a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Renders SVG plots from whichever of `curves.csv` / `report.csv` are present.
pub fn plots(tables: &[Table], provenance: &[String], rotation: bool) -> svg::Plots {
    let mut out = svg::Plots::default();
    let find = |n: &str| tables.iter().find(|t| t.name == n);
    match find("curves.csv") {
        Some(c) => {
            let p = svg::learning_curves(c, provenance);
            out.files.extend(p.files);
            out.warnings.extend(p.warnings);
        }
        None => out.warnings.push("curves.csv not found; curve plots skipped".into()),
    }
    match find("report.csv") {
        Some(r) => {
            let p = svg::scene(r, provenance);
            out.files.extend(p.files);
            out.warnings.extend(p.warnings);
        }
        None if rotation => out.warnings.push("report.csv not found; scene skipped".into()),
        None => {}
    }
    out
}

/// Writes the bundle for `cfg`; returns written paths and plot warnings.
pub fn write_bundle(cfg: &RunConfig, outcome: &Outcome) -> io::Result<(Vec<PathBuf>, Vec<String>)> {
    fs::create_dir_all(&cfg.out)?;
    let echo = cfg.echo();
    let prov = provenance(&echo);
    let tables = tables(outcome);
    let mut written = vec![write_atomic(&cfg.out, "config.echo", &(echo.join("\n") + "\n"))?];
    let mut warnings = Vec::new();
    if cfg.wants(Format::Csv) {
        for t in &tables {
            written.push(write_atomic(&cfg.out, &t.name, &t.to_csv(&prov))?);
        }
    }
    if cfg.wants(Format::Json) {
        let mut files = serde_json::Map::new();
        for t in &tables {
            files.insert(t.name.clone(), t.to_json());
        }
        let bundle = serde_json::json!({
            "schema": SCHEMA_VERSION,
            "version": crate::VERSION,
            "experiment": cfg.experiment.name(),
            "config": echo,
            "tables": files,
        });
        let text = serde_json::to_string_pretty(&bundle).map_err(io::Error::other)? + "\n";
        written.push(write_atomic(&cfg.out, "bundle.json", &text)?);
    }
    if cfg.wants(Format::Svg) {
        let p = plots(&tables, &prov, cfg.experiment != ExperimentId::Speed);
        for (name, text) in &p.files {
            written.push(write_atomic(&cfg.out, name, text)?);
        }
        warnings = p.warnings;
    }
    Ok((written, warnings))
}
