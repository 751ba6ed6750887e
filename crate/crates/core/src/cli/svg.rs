//! Static SVG plots drawn from result tables: learning curves and an
//! orthographic view of rotation outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::table::Table;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;
const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Rendered files plus warnings about series that were skipped.
#[derive(Debug, Default)]
pub struct Plots {
    pub files: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn header(provenance: &[String]) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    for p in provenance {
        let _ = writeln!(s, "<!-- {} -->", p.replace("--", "- -"));
    }
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s
}

fn num(row: &[String], col: Option<usize>) -> Option<f64> {
    row.get(col?)?.parse().ok()
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Option<Frame> {
        let mut f = Frame {
            x: (f64::INFINITY, f64::NEG_INFINITY),
            y: (f64::INFINITY, f64::NEG_INFINITY),
        };
        for (x, y) in points {
            f.x = (f.x.0.min(x), f.x.1.max(x));
            f.y = (f.y.0.min(y), f.y.1.max(y));
        }
        if !f.x.0.is_finite() || !f.y.0.is_finite() {
            return None;
        }
        for r in [&mut f.x, &mut f.y] {
            if r.1 - r.0 < 1e-12 {
                r.0 -= 0.5;
                r.1 += 0.5;
            }
        }
        Some(f)
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let u = MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN);
        let v = HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN);
        (u, v)
    }
}

fn legend(s: &mut String, labels: &[&str]) {
    for (i, label) in labels.iter().enumerate() {
        let y = 20.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{}\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{label}</text>",
            WIDTH - 140.0,
            y - 9.0,
            COLOURS[i % COLOURS.len()],
            WIDTH - 125.0,
            y
        );
    }
}

fn curve_svg(series: &[&Series], provenance: &[String]) -> String {
    let frame = Frame::fit(series.iter().flat_map(|s| s.points.iter().copied())).expect("non-empty series");
    let mut s = header(provenance);
    let _ = writeln!(
        s,
        "<g stroke=\"black\" fill=\"none\"><line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\"/><line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{b}\"/></g>",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">epoch ({} to {})</text>",
        WIDTH / 2.0,
        HEIGHT - 15.0,
        frame.x.0,
        frame.x.1
    );
    let _ = writeln!(
        s,
        "<text x=\"15\" y=\"{:.2}\" font-size=\"12\" transform=\"rotate(-90 15 {:.2})\" text-anchor=\"middle\">log10 loss ({:.3} to {:.3})</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        frame.y.0,
        frame.y.1
    );
    for (i, series) in series.iter().enumerate() {
        let pts: Vec<String> = series
            .points
            .iter()
            .map(|p| {
                let (u, v) = frame.map(*p);
                format!("{u:.2},{v:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            "<polyline data-label=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
            series.label,
            COLOURS[i % COLOURS.len()],
            pts.join(" ")
        );
    }
    legend(&mut s, &series.iter().map(|s| s.label.as_str()).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

/// `curve_<model>.svg` for each model and `curve_all.svg` with every model,
/// from the lowest-numbered trial of each model in `curves.csv`.
pub fn learning_curves(curves: &Table, provenance: &[String]) -> Plots {
    let mut plots = Plots::default();
    let (m, t, e, l) = (
        curves.column("model"),
        curves.column("trial"),
        curves.column("epoch"),
        curves.column("loss"),
    );
    let Some(m) = m else {
        plots.warnings.push(format!("{}: no model column; curves skipped", curves.name));
        return plots;
    };
    // model -> (first trial seen, points); BTreeMap would reorder, so keep first-seen order
    let mut order: Vec<String> = Vec::new();
    let mut by_model: BTreeMap<String, (f64, Vec<(f64, f64)>)> = BTreeMap::new();
    for row in &curves.rows {
        let (Some(trial), Some(epoch), Some(loss)) = (num(row, t), num(row, e), num(row, l)) else {
            continue;
        };
        let model = row[m].clone();
        let entry = by_model.entry(model.clone()).or_insert_with(|| {
            order.push(model.clone());
            (trial, Vec::new())
        });
        if trial < entry.0 {
            *entry = (trial, Vec::new());
        }
        if trial == entry.0 && loss > 0.0 && loss.is_finite() {
            entry.1.push((epoch, loss.log10()));
        }
    }
    let mut series = Vec::new();
    for model in order {
        let (_, points) = by_model.remove(&model).expect("recorded");
        if points.is_empty() {
            plots.warnings.push(format!("no plottable loss values for {model}; curve skipped"));
        } else {
            series.push(Series { label: model, points });
        }
    }
    if series.is_empty() {
        plots.warnings.push(format!("{}: no learning-curve data; curve plots skipped", curves.name));
        return plots;
    }
    for s in &series {
        plots.files.push((format!("curve_{}.svg", s.label), curve_svg(&[s], provenance)));
    }
    let all: Vec<&Series> = series.iter().collect();
    plots.files.push(("curve_all.svg".into(), curve_svg(&all, provenance)));
    plots
}

/// Orthographic view from azimuth 35 degrees, elevation 25 degrees.
fn project(p: [f64; 3]) -> (f64, f64) {
    let (sa, ca) = 35f64.to_radians().sin_cos();
    let (se, ce) = 25f64.to_radians().sin_cos();
    let u = p[0] * ca - p[1] * sa;
    let v = p[2] * ce - (p[0] * sa + p[1] * ca) * se;
    (u, v)
}

/// `scene.svg`: test inputs and both models' outputs (imaginary parts) for
/// the lowest-numbered trial in `report.csv`.
pub fn scene(report: &Table, provenance: &[String]) -> Plots {
    let mut plots = Plots::default();
    let cols = |names: [&str; 3]| names.map(|n| report.column(n));
    let groups = [
        ("test input", cols(["x", "y", "z"])),
        ("qnn", cols(["qnn_b", "qnn_c", "qnn_d"])),
        ("rqnn", cols(["rqnn_b", "rqnn_c", "rqnn_d"])),
    ];
    let t = report.column("trial");
    let first = report.rows.iter().filter_map(|r| num(r, t)).fold(f64::INFINITY, f64::min);
    let rows: Vec<&Vec<String>> = report.rows.iter().filter(|r| num(r, t) == Some(first)).collect();

    let mut series = Vec::new();
    for (label, c) in groups {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| Some(project([num(r, c[0])?, num(r, c[1])?, num(r, c[2])?])))
            .filter(|(u, v)| u.is_finite() && v.is_finite())
            .collect();
        if points.is_empty() {
            plots.warnings.push(format!("no points for {label}; series skipped"));
        } else {
            series.push(Series {
                label: label.to_string(),
                points,
            });
        }
    }
    if series.is_empty() {
        plots.warnings.push(format!("{}: no point data; scene skipped", report.name));
        return plots;
    }
    // equal scale on both screen axes keeps the projection undistorted
    let mut frame = Frame::fit(series.iter().flat_map(|s| s.points.iter().copied())).expect("non-empty");
    let span = ((frame.x.1 - frame.x.0) / (WIDTH - 2.0 * MARGIN))
        .max((frame.y.1 - frame.y.0) / (HEIGHT - 2.0 * MARGIN));
    for (r, px) in [(&mut frame.x, WIDTH), (&mut frame.y, HEIGHT)] {
        let mid = 0.5 * (r.0 + r.1);
        let half = 0.5 * span * (px - 2.0 * MARGIN);
        *r = (mid - half, mid + half);
    }

    let mut s = header(provenance);
    let axes = [("i", [1.0, 0.0, 0.0]), ("j", [0.0, 1.0, 0.0]), ("k", [0.0, 0.0, 1.0])];
    let (ox, oy) = frame.map(project([0.0; 3]));
    for (name, a) in axes {
        let (x, y) = frame.map(project(a));
        let _ = writeln!(
            s,
            "<line x1=\"{ox:.2}\" y1=\"{oy:.2}\" x2=\"{x:.2}\" y2=\"{y:.2}\" stroke=\"grey\"/><text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"11\" fill=\"grey\">{name}</text>"
        );
    }
    for (i, series) in series.iter().enumerate() {
        let _ = writeln!(s, "<g data-label=\"{}\" fill=\"{}\">", series.label, COLOURS[i % COLOURS.len()]);
        for p in &series.points {
            let (u, v) = frame.map(*p);
            let _ = writeln!(s, "<circle cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"1.5\"/>");
        }
        s.push_str("</g>\n");
    }
    legend(&mut s, &series.iter().map(|s| s.label.as_str()).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    plots.files.push(("scene.svg".into(), s));
    plots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curves(rows: &[(&str, usize, usize, f64)]) -> Table {
        let mut t = Table::new("curves.csv", &["model", "trial", "epoch", "loss"]);
        for (m, tr, e, l) in rows {
            t.push(vec![m.to_string(), tr.to_string(), e.to_string(), l.to_string()]);
        }
        t
    }

    #[test]
    fn one_polyline_per_model() {
        let t = curves(&[("real", 0, 0, 1.0), ("real", 0, 10, 0.1), ("qnn", 1, 0, 1.0), ("qnn", 0, 0, 0.5), ("qnn", 0, 5, 0.05)]);
        let p = learning_curves(&t, &[]);
        let names: Vec<&str> = p.files.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["curve_real.svg", "curve_qnn.svg", "curve_all.svg"]);
        assert_eq!(p.files[2].1.matches("<polyline").count(), 2);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn empty_input_warns() {
        let p = learning_curves(&curves(&[]), &[]);
        assert!(p.files.is_empty());
        assert_eq!(p.warnings.len(), 1);
        let p = scene(&Table::new("report.csv", &["trial", "x", "y", "z"]), &[]);
        assert!(p.files.is_empty());
    }
}
