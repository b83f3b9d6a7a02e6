//! Embedded surfaces described by overlapping analytic charts.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{Matrix3x2, Vector2, Vector3};
use num_traits::Float;

/// Axis-aligned rectangle of chart parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartDomain {
    pub lower: Vector2<f64>,
    pub upper: Vector2<f64>,
}

impl ChartDomain {
    pub fn contains(&self, u: &Vector2<f64>) -> bool {
        self.margin(u) >= 0.0
    }

    /// Distance to the nearest face relative to the side length; `0` on the
    /// boundary, `0.5` at the center, negative outside.
    pub fn margin(&self, u: &Vector2<f64>) -> f64 {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(x, (lo, hi))| (x - lo).min(hi - x) / (hi - lo))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn center(&self) -> Vector2<f64> {
        (self.lower + self.upper) / 2.0
    }
}

/// Embedding and its first and second partials at one chart point.
#[derive(Debug, Clone)]
pub struct ChartPoint {
    pub point: Vector3<f64>,
    /// Column `i` is `∂ξ/∂u_i`.
    pub jacobian: Matrix3x2<f64>,
    /// `second[i][j] = ∂²ξ/∂u_i∂u_j`.
    pub second: [[Vector3<f64>; 2]; 2],
}

/// A compact surface in `R^3` given by finitely many charts.
pub trait Surface {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize {
        2
    }

    fn ambient_dimension(&self) -> usize {
        3
    }

    fn charts(&self) -> &[ChartDomain];

    fn embed(&self, chart: usize, u: &Vector2<f64>) -> ChartPoint;

    /// Parameters of the ambient point `x` in `chart`, if it lies in the
    /// chart's image (not necessarily inside its domain rectangle).
    fn chart_coordinates(&self, chart: usize, x: &Vector3<f64>) -> Option<Vector2<f64>>;

    /// Euclidean distance from `x` to the surface.
    fn distance(&self, x: &Vector3<f64>) -> f64;

    /// Label for the `ordinal`-th of `count` critical points of a given index.
    fn label(&self, index: usize, ordinal: usize, count: usize) -> String {
        let _ = count;
        format!("x{index}_{}", ordinal + 1)
    }

    /// The chart whose domain holds `x` farthest from its boundary.
    fn locate(&self, x: &Vector3<f64>) -> Option<(usize, Vector2<f64>)> {
        let mut best: Option<(usize, Vector2<f64>, f64)> = None;
        for (c, dom) in self.charts().iter().enumerate() {
            let Some(u) = self.chart_coordinates(c, x) else {
                continue;
            };
            let m = dom.margin(&u);
            if m >= 0.0 && best.as_ref().is_none_or(|b| m > b.2) {
                best = Some((c, u, m));
            }
        }
        best.map(|(c, u, _)| (c, u))
    }
}

fn numbered(base: &str, ordinal: usize, count: usize) -> String {
    if count == 1 {
        String::from(base)
    } else {
        format!("{base}{}", ordinal + 1)
    }
}

/// Round sphere centered at the origin, covered by the two stereographic
/// charts (projection from the north pole and from the south pole).
#[derive(Debug, Clone)]
pub struct Sphere {
    radius: f64,
    charts: Vec<ChartDomain>,
}

impl Sphere {
    pub const CHART_HALF_WIDTH: f64 = 2.0;

    pub fn new(radius: f64) -> Self {
        let h = Self::CHART_HALF_WIDTH;
        let dom = ChartDomain {
            lower: Vector2::new(-h, -h),
            upper: Vector2::new(h, h),
        };
        Self {
            radius,
            charts: vec![dom.clone(), dom],
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Default for Sphere {
    fn default() -> Self {
        Self::new(1.0)
    }
}

impl Surface for Sphere {
    fn name(&self) -> &str {
        "sphere"
    }

    fn charts(&self) -> &[ChartDomain] {
        &self.charts
    }

    fn embed(&self, chart: usize, u: &Vector2<f64>) -> ChartPoint {
        // chart 0 sends 0 to the south pole, chart 1 to the north pole
        let sz = if chart == 0 { 1.0 } else { -1.0 };
        let (a, b) = (u[0], u[1]);
        let r = self.radius;
        let s = 1.0 + a * a + b * b;
        let (s2, s3) = (s * s, s * s * s);
        let point = Vector3::new(2.0 * a / s, 2.0 * b / s, sz * (1.0 - 2.0 / s)) * r;
        let jacobian = Matrix3x2::new(
            2.0 / s - 4.0 * a * a / s2,
            -4.0 * a * b / s2,
            -4.0 * a * b / s2,
            2.0 / s - 4.0 * b * b / s2,
            sz * 4.0 * a / s2,
            sz * 4.0 * b / s2,
        ) * r;
        let uu = Vector3::new(
            -12.0 * a / s2 + 16.0 * a * a * a / s3,
            -4.0 * b / s2 + 16.0 * a * a * b / s3,
            sz * (4.0 / s2 - 16.0 * a * a / s3),
        ) * r;
        let uv = Vector3::new(
            -4.0 * b / s2 + 16.0 * a * a * b / s3,
            -4.0 * a / s2 + 16.0 * a * b * b / s3,
            sz * (-16.0 * a * b / s3),
        ) * r;
        let vv = Vector3::new(
            -4.0 * a / s2 + 16.0 * a * b * b / s3,
            -12.0 * b / s2 + 16.0 * b * b * b / s3,
            sz * (4.0 / s2 - 16.0 * b * b / s3),
        ) * r;
        ChartPoint {
            point,
            jacobian,
            second: [[uu, uv], [uv, vv]],
        }
    }

    fn chart_coordinates(&self, chart: usize, x: &Vector3<f64>) -> Option<Vector2<f64>> {
        let n = x.norm();
        if n == 0.0 {
            return None;
        }
        let q = x / n;
        let denom = if chart == 0 { 1.0 - q.z } else { 1.0 + q.z };
        if denom <= 1e-12 {
            return None;
        }
        Some(Vector2::new(q.x / denom, q.y / denom))
    }

    fn distance(&self, x: &Vector3<f64>) -> f64 {
        (x.norm() - self.radius).abs()
    }

    fn label(&self, index: usize, ordinal: usize, count: usize) -> String {
        match index {
            0 => numbered("beta", ordinal, count),
            2 => numbered("alpha", ordinal, count),
            _ => format!("x{index}_{}", ordinal + 1),
        }
    }
}

/// Torus of revolution: the circle of radius `minor` centered at distance
/// `major` from the z-axis in the xz-plane, revolved about the z-axis.
///
/// Parameters are the angles `(theta, phi)`; each angle has two windows of
/// width `1.5 pi` centered at `0` and `pi`, giving four charts.
#[derive(Debug, Clone)]
pub struct Torus {
    major: f64,
    minor: f64,
    charts: Vec<ChartDomain>,
}

const WINDOW_HALF_WIDTH: f64 = 0.75 * PI;
const WINDOW_CENTERS: [f64; 2] = [0.0, PI];

impl Torus {
    pub fn new(major: f64, minor: f64) -> Self {
        let mut charts = Vec::with_capacity(4);
        for ct in WINDOW_CENTERS {
            for cp in WINDOW_CENTERS {
                charts.push(ChartDomain {
                    lower: Vector2::new(ct - WINDOW_HALF_WIDTH, cp - WINDOW_HALF_WIDTH),
                    upper: Vector2::new(ct + WINDOW_HALF_WIDTH, cp + WINDOW_HALF_WIDTH),
                });
            }
        }
        Self { major, minor, charts }
    }

    pub fn major_radius(&self) -> f64 {
        self.major
    }

    pub fn minor_radius(&self) -> f64 {
        self.minor
    }
}

impl Default for Torus {
    fn default() -> Self {
        Self::new(2.0, 1.0)
    }
}

/// Shift `angle` by a multiple of `2 pi` into `[center - pi, center + pi)`.
fn wrap_near(angle: f64, center: f64) -> f64 {
    let mut a = angle;
    while a < center - PI {
        a += 2.0 * PI;
    }
    while a >= center + PI {
        a -= 2.0 * PI;
    }
    a
}

impl Surface for Torus {
    fn name(&self) -> &str {
        "torus"
    }

    fn charts(&self) -> &[ChartDomain] {
        &self.charts
    }

    fn embed(&self, _chart: usize, u: &Vector2<f64>) -> ChartPoint {
        let (st, ct) = Float::sin_cos(u[0]);
        let (sp, cp) = Float::sin_cos(u[1]);
        let (big, r) = (self.major, self.minor);
        let w = big + r * cp;
        let point = Vector3::new(w * ct, w * st, r * sp);
        let jacobian = Matrix3x2::new(-w * st, -r * sp * ct, w * ct, -r * sp * st, 0.0, r * cp);
        let tt = Vector3::new(-w * ct, -w * st, 0.0);
        let tp = Vector3::new(r * sp * st, -r * sp * ct, 0.0);
        let pp = Vector3::new(-r * cp * ct, -r * cp * st, -r * sp);
        ChartPoint {
            point,
            jacobian,
            second: [[tt, tp], [tp, pp]],
        }
    }

    fn chart_coordinates(&self, chart: usize, x: &Vector3<f64>) -> Option<Vector2<f64>> {
        let rho = Float::hypot(x.x, x.y);
        if rho == 0.0 {
            return None;
        }
        let theta = Float::atan2(x.y, x.x);
        let phi = Float::atan2(x.z, rho - self.major);
        let c = self.charts[chart].center();
        Some(Vector2::new(wrap_near(theta, c[0]), wrap_near(phi, c[1])))
    }

    fn distance(&self, x: &Vector3<f64>) -> f64 {
        let rho = Float::hypot(x.x, x.y);
        (Float::hypot(rho - self.major, x.z) - self.minor).abs()
    }

    fn label(&self, index: usize, ordinal: usize, count: usize) -> String {
        match index {
            0 => numbered("b", ordinal, count),
            1 => format!("c{}", ordinal + 1),
            2 => numbered("a", ordinal, count),
            _ => format!("x{index}_{}", ordinal + 1),
        }
    }
}
