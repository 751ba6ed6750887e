//! Dataset generators for the three experiments.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::RngExt;

use crate::quat::{rotate_vector, Quaternion, Vec3};
use crate::rng::{stream_rng, CLOUD_TEST_STREAM, CLOUD_TRAIN_STREAM};

/// The four learning pairs of the speed benchmark, in order.
pub fn table1_dataset() -> Vec<(Quaternion, Quaternion)> {
    vec![
        (Quaternion::new(1.0, 1.0, 1.0, 1.0), Quaternion::ONE),
        (Quaternion::new(1.0, 2.0, 1.0, 2.0), Quaternion::I),
        (Quaternion::new(2.0, 1.0, 2.0, 1.0), Quaternion::J),
        (Quaternion::new(2.0, 2.0, 2.0, 2.0), Quaternion::K),
    ]
}

/// Points along the i, j and k axes.
#[derive(Debug, Clone, PartialEq)]
pub struct LineData {
    pub train_in: Vec<Quaternion>,
    pub train_target: Vec<Quaternion>,
    pub test_in: Vec<Quaternion>,
}

/// `n` equally spaced points `t_p = extent * p / n`, `p = 1..=n`, on each
/// axis: inputs on i, targets on j, test inputs on k.
pub fn line_datasets(n: usize, extent: f64) -> LineData {
    let ts = (1..=n).map(|p| extent * p as f64 / n as f64);
    let on = |axis: Vec3| ts.clone().map(move |t| Quaternion::pure(axis.scale(t))).collect();
    LineData {
        train_in: on(Vec3::X),
        train_target: on(Vec3::Y),
        test_in: on(Vec3::Z),
    }
}

/// Unit quaternion of a quarter turn about the j axis.
pub const Q_J90: Quaternion = Quaternion::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Random,
    Grid,
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampling::Random => "random",
            Sampling::Grid => "grid",
        })
    }
}

impl FromStr for Sampling {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Sampling::Random),
            "grid" => Ok(Sampling::Grid),
            other => Err(format!("unknown sampling '{other}' (expected random or grid)")),
        }
    }
}

/// Apex of the test pyramid; its base is the unit square on the ij-plane.
pub const PYRAMID_APEX: Vec3 = Vec3::new(0.5, 0.5, 1.0);

/// Colour names and positions of the tracked test vertices. The origin
/// corner is left out: it has no direction to measure a rotation from.
pub const TRACKED_VERTICES: [(&str, Vec3); 4] = [
    ("blue", Vec3::new(0.0, 1.0, 0.0)),
    ("red", Vec3::new(1.0, 0.0, 0.0)),
    ("green", Vec3::new(1.0, 1.0, 0.0)),
    ("yellow", PYRAMID_APEX),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CloudData {
    pub train_in: Vec<Quaternion>,
    pub train_target: Vec<Quaternion>,
    /// Starts with the [`TRACKED_VERTICES`] in order.
    pub test_in: Vec<Quaternion>,
}

/// Unit-square cloud on the ij-plane, its quarter turn about j, and a
/// pyramid surface test cloud.
pub fn cloud_datasets(train_points: usize, test_points: usize, sampling: Sampling, seed: u64) -> CloudData {
    let square: Vec<Vec3> = match sampling {
        Sampling::Random => {
            let mut rng = stream_rng(seed, CLOUD_TRAIN_STREAM);
            (0..train_points)
                .map(|_| Vec3::new(rng.random::<f64>(), rng.random::<f64>(), 0.0))
                .collect()
        }
        Sampling::Grid => grid(train_points),
    };
    let train_target = square
        .iter()
        .map(|v| Quaternion::pure(rotate_vector(Q_J90, *v).expect("unit rotation")))
        .collect();
    CloudData {
        train_in: square.into_iter().map(Quaternion::pure).collect(),
        train_target,
        test_in: pyramid_surface(test_points, seed)
            .into_iter()
            .map(Quaternion::pure)
            .collect(),
    }
}

/// Row-major grid over the unit square with twice as many columns as rows
/// (50 x 100 for 5000 points), truncated to `n` points.
fn grid(n: usize) -> Vec<Vec3> {
    if n == 0 {
        return Vec::new();
    }
    let rows = ((n as f64 / 2.0).sqrt().round() as usize).max(1);
    let cols = n.div_ceil(rows);
    let step = |i: usize, k: usize| if k > 1 { i as f64 / (k - 1) as f64 } else { 0.0 };
    (0..rows)
        .flat_map(|r| (0..cols).map(move |c| Vec3::new(step(c, cols), step(r, rows), 0.0)))
        .take(n)
        .collect()
}

/// `n` points on the pyramid surface (base plus four lateral faces), the
/// first of which are the tracked vertices; the rest are area-uniform.
pub fn pyramid_surface(n: usize, seed: u64) -> Vec<Vec3> {
    let corners = [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(1.0, 1.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
    ];
    let faces: Vec<[Vec3; 3]> = (0..4)
        .map(|f| [corners[f], corners[(f + 1) % 4], PYRAMID_APEX])
        .collect();
    let tri_area = |t: &[Vec3; 3]| 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm();
    let base_area = 1.0;
    let total = base_area + faces.iter().map(tri_area).sum::<f64>();

    let mut rng = stream_rng(seed, CLOUD_TEST_STREAM);
    let mut out: Vec<Vec3> = TRACKED_VERTICES.iter().map(|(_, v)| *v).take(n).collect();
    while out.len() < n {
        let pick = rng.random::<f64>() * total;
        let (u, v): (f64, f64) = (rng.random(), rng.random());
        if pick < base_area {
            out.push(Vec3::new(u, v, 0.0));
            continue;
        }
        let mut acc = base_area;
        let mut face = &faces[3];
        for f in &faces {
            acc += tri_area(f);
            if pick < acc {
                face = f;
                break;
            }
        }
        let r = u.sqrt();
        let [a, b, c] = *face;
        out.push(a.scale(1.0 - r) + b.scale(r * (1.0 - v)) + c.scale(r * v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_pairs() {
        let d = table1_dataset();
        assert_eq!(d.len(), 4);
        assert_eq!(d[0], (Quaternion::new(1.0, 1.0, 1.0, 1.0), Quaternion::new(1.0, 0.0, 0.0, 0.0)));
        assert_eq!(d[3], (Quaternion::new(2.0, 2.0, 2.0, 2.0), Quaternion::new(0.0, 0.0, 0.0, 1.0)));
    }

    #[test]
    fn lines() {
        let one = line_datasets(1, 1.0);
        assert_eq!(one.train_in, vec![Quaternion::I]);
        assert_eq!(one.train_target, vec![Quaternion::J]);
        assert_eq!(one.test_in, vec![Quaternion::K]);
        let d = line_datasets(200, 1.0);
        assert_eq!(d.train_in.len(), 200);
        assert_eq!(d.test_in.len(), 200);
        for (x, t) in d.train_in.iter().zip(&d.train_target) {
            let a = crate::quat::angle_between(x.vector(), t.vector()).unwrap();
            assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
            assert_eq!(x.a, 0.0);
        }
        assert_eq!(d.train_in[199], Quaternion::I);
    }

    #[test]
    fn quarter_turn_about_j() {
        let r = rotate_vector(Q_J90, Vec3::X).unwrap();
        assert!((r - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        assert_eq!(rotate_vector(Q_J90, Vec3::default()).unwrap(), Vec3::default());
    }

    #[test]
    fn cloud_geometry() {
        for sampling in [Sampling::Random, Sampling::Grid] {
            let d = cloud_datasets(500, 300, sampling, 3);
            assert_eq!(d.train_in.len(), 500);
            assert_eq!(d.test_in.len(), 300);
            for (x, t) in d.train_in.iter().zip(&d.train_target) {
                assert_eq!(x.a, 0.0);
                assert_eq!(t.a, 0.0);
                assert_eq!(x.d, 0.0);
                assert!((0.0..=1.0).contains(&x.b) && (0.0..=1.0).contains(&x.c));
                let want = rotate_vector(Q_J90, x.vector()).unwrap();
                assert!((t.vector() - want).norm() <= 1e-15);
            }
            for (q, (_, v)) in d.test_in.iter().zip(TRACKED_VERTICES) {
                assert_eq!(q.vector(), v);
            }
        }
    }

    #[test]
    fn grid_shape() {
        let g = grid(5000);
        assert_eq!(g.len(), 5000);
        assert_eq!(g[0], Vec3::default());
        assert_eq!(g[99], Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(g[4999], Vec3::new(1.0, 1.0, 0.0));
    }

    #[test]
    fn pyramid_points_lie_on_surface() {
        let pts = pyramid_surface(2000, 9);
        for p in &pts {
            assert!((0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y));
            // height under the lateral face through this point
            let h = 1.0 - 2.0 * (p.x - 0.5).abs().max((p.y - 0.5).abs());
            assert!(p.z.abs() < 1e-12 || (p.z - h).abs() < 1e-9, "{p:?}");
        }
        let on_base = pts.iter().filter(|p| p.z == 0.0).count() as f64 / pts.len() as f64;
        // base share of the area is 1 / (1 + 2 sqrt(1.25)) ~ 0.309
        assert!((on_base - 0.309).abs() < 0.04, "{on_base}");
    }
}
