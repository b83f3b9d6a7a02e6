//! Numerical Morse theory for `f(ξ) = |ξ - p|²` on embedded surfaces.
//!
//! Critical points are found by Newton iteration from a seed grid in every
//! chart, flow lines by integrating the metric gradient flow from small
//! spheres in the unstable manifolds, and each isolated flow line between
//! consecutive indices gets a sign from the orientation of unstable frames.

mod flow;
pub mod surface;

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{Matrix2, Vector2, Vector3};
use thiserror::Error;

use crate::chain_complex::{ComplexError, CriticalPointId};
use crate::orientation::OrientationError;

pub use flow::{assemble_morse_complex, trace_flow_lines, trace_from, FlowLine, FlowSearch, SurfaceRun};
pub use surface::{ChartDomain, ChartPoint, Sphere, Surface, Torus};

/// How flow lines are signed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignRule {
    /// Compare transported unstable frames.
    #[default]
    Oriented,
    /// Count every flow line as `+1`.
    ForcedPositive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    /// Newton stops once `|df|` falls below this.
    pub grad_tol: f64,
    /// Critical points closer than this (ambient distance) are merged.
    pub dedup_radius: f64,
    /// Smallest accepted `|eigenvalue|` of the Hessian.
    pub degeneracy_tol: f64,
    /// Radius of the seed sphere in the unstable manifold.
    pub epsilon: f64,
    /// RK4 time step.
    pub step: f64,
    /// A trajectory arrives at a critical point once this close to it.
    pub arrival_tol: f64,
    /// Newton seeds per chart axis.
    pub seeds_per_chart: usize,
    /// Seeds on the unstable circle of an index-2 point, used to find the
    /// points it reaches across a larger index gap.
    pub circle_seeds: usize,
    pub max_steps: usize,
    pub newton_max_iter: usize,
    /// Base points this close to the surface are rejected.
    pub on_surface_tol: f64,
    pub sign_rule: SignRule,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-12,
            dedup_radius: 1e-6,
            degeneracy_tol: 1e-8,
            epsilon: 1e-3,
            step: 1e-3,
            arrival_tol: 1e-4,
            seeds_per_chart: 32,
            circle_seeds: 64,
            max_steps: 2_000_000,
            newton_max_iter: 100,
            on_surface_tol: 1e-9,
            sign_rule: SignRule::Oriented,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("base point lies on the surface (distance {distance:e})")]
    PointOnSurface { distance: f64 },
    #[error(
        "degenerate critical point at ({:.6}, {:.6}, {:.6}): Hessian eigenvalue {eigenvalue:e}; perturb the base point",
        location[0], location[1], location[2]
    )]
    DegenerateCriticalPoint { location: [f64; 3], eigenvalue: f64 },
    #[error("no critical point found")]
    NoCriticalPoints,
    #[error("trajectory from {source_label} left every chart near ({:.6}, {:.6}, {:.6})", location[0], location[1], location[2])]
    IntegrationEscaped { source_label: String, location: [f64; 3] },
    #[error("trajectory from {source_label} ends within tolerance of both {first} and {second}; refine the step")]
    AmbiguousArrival {
        source_label: String,
        first: String,
        second: String,
    },
    #[error("flow line from {from} to {to} joins points of equal index; the flow is not Morse-Smale; perturb the base point")]
    MorseSmaleViolation { from: String, to: String },
    #[error("f failed to decrease at step {step} of a trajectory from {source_label}")]
    FlowNotDescending { source_label: String, step: usize },
    #[error("trajectory from {source_label} did not arrive within {steps} steps")]
    TraceStalled { source_label: String, steps: usize },
    #[error("critical point {0} has index above 2")]
    UnsupportedIndex(String),
    #[error(transparent)]
    Orientation(#[from] OrientationError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A surface together with the base point of the distance-squared function.
#[derive(Clone, Copy)]
pub struct MorseData<'a> {
    surface: &'a dyn Surface,
    base_point: Vector3<f64>,
}

/// `f`, its chart derivatives and the induced metric at one chart point.
#[derive(Debug, Clone)]
pub struct LocalJet {
    pub chart: ChartPoint,
    pub value: f64,
    pub differential: Vector2<f64>,
    pub metric: Matrix2<f64>,
    pub hessian: Matrix2<f64>,
}

impl LocalJet {
    /// `g⁻¹ df`, the metric gradient in chart coordinates.
    pub fn gradient(&self) -> Vector2<f64> {
        self.metric
            .cholesky()
            .map(|c| c.solve(&self.differential))
            .unwrap_or_else(Vector2::zeros)
    }

    pub fn ambient_gradient(&self) -> Vector3<f64> {
        self.chart.jacobian * self.gradient()
    }

    /// Orthogonal projection onto the tangent plane.
    pub fn project_tangent(&self, w: &Vector3<f64>) -> Vector3<f64> {
        let j = &self.chart.jacobian;
        let coeffs = self
            .metric
            .cholesky()
            .map(|c| c.solve(&(j.transpose() * w)))
            .unwrap_or_else(Vector2::zeros);
        j * coeffs
    }
}

impl<'a> MorseData<'a> {
    pub fn new(surface: &'a dyn Surface, base_point: [f64; 3], config: &GeometryConfig) -> Result<Self, GeometryError> {
        let p = Vector3::from(base_point);
        let distance = surface.distance(&p);
        if distance <= config.on_surface_tol {
            return Err(GeometryError::PointOnSurface { distance });
        }
        Ok(Self { surface, base_point: p })
    }

    pub fn surface(&self) -> &'a dyn Surface {
        self.surface
    }

    pub fn base_point(&self) -> [f64; 3] {
        self.base_point.into()
    }

    pub fn value_at(&self, x: &Vector3<f64>) -> f64 {
        (x - self.base_point).norm_squared()
    }

    /// `df = 2 Jᵀ(ξ - p)`, `H_ij = 2 (∂_iξ · ∂_jξ + (ξ - p) · ∂_i∂_jξ)`.
    pub fn jet(&self, chart: usize, u: &Vector2<f64>) -> LocalJet {
        let cp = self.surface.embed(chart, u);
        let d = cp.point - self.base_point;
        let j = &cp.jacobian;
        let metric = j.transpose() * j;
        let differential = 2.0 * j.transpose() * d;
        let hessian = 2.0 * (metric + Matrix2::from_fn(|a, b| d.dot(&cp.second[a][b])));
        LocalJet {
            value: d.norm_squared(),
            differential,
            metric,
            hessian,
            chart: cp,
        }
    }

    /// Negative metric gradient in chart coordinates.
    pub fn flow_field(&self, chart: usize, u: &Vector2<f64>) -> Vector2<f64> {
        -self.jet(chart, u).gradient()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPointGeom {
    pub id: CriticalPointId,
    pub chart: usize,
    pub coords: Vector2<f64>,
    pub location: Vector3<f64>,
    pub value: f64,
    pub hessian: Matrix2<f64>,
    /// Eigenvalues of the Hessian, ascending.
    pub eigenvalues: Vector2<f64>,
    pub index: usize,
    /// Chart vectors, orthonormal in the induced metric.
    pub unstable_frame: Vec<Vector2<f64>>,
    pub stable_frame: Vec<Vector2<f64>>,
    /// Eigenvalues of `g⁻¹H` paired with the unstable then stable vectors.
    pub rates: Vec<f64>,
}

impl CriticalPointGeom {
    pub fn label(&self) -> &str {
        &self.id.label
    }

    pub fn ambient_unstable(&self, m: &MorseData) -> Vec<Vector3<f64>> {
        let j = m.surface.embed(self.chart, &self.coords).jacobian;
        self.unstable_frame.iter().map(|v| j * v).collect()
    }

    pub fn ambient_stable(&self, m: &MorseData) -> Vec<Vector3<f64>> {
        let j = m.surface.embed(self.chart, &self.coords).jacobian;
        self.stable_frame.iter().map(|v| j * v).collect()
    }
}

fn sign_normalize(v: Vector2<f64>) -> Vector2<f64> {
    match v.iter().find(|c| c.abs() > 1e-10) {
        Some(c) if *c < 0.0 => -v,
        _ => v,
    }
}

/// Eigenpairs of `g⁻¹H` with metric-orthonormal vectors, ascending.
fn generalized_eigen(h: &Matrix2<f64>, g: &Matrix2<f64>) -> Option<[(f64, Vector2<f64>); 2]> {
    let l = g.cholesky()?.l();
    let linv = l.try_inverse()?;
    let m = linv * h * linv.transpose();
    let eig = m.symmetric_eigen();
    let mut pairs = [0, 1].map(|i| (eig.eigenvalues[i], linv.transpose() * eig.eigenvectors.column(i)));
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Some(pairs)
}

fn newton(m: &MorseData, chart: usize, start: Vector2<f64>, cfg: &GeometryConfig) -> Option<Vector2<f64>> {
    let dom = &m.surface.charts()[chart];
    let cap = 0.1 * dom.width(0).min(dom.width(1));
    let mut u = start;
    for _ in 0..cfg.newton_max_iter {
        let jet = m.jet(chart, &u);
        if jet.differential.norm() < cfg.grad_tol {
            return Some(u);
        }
        let eig = jet.hessian.symmetric_eigen();
        let scale = eig.eigenvalues.amax();
        let mut delta = Vector2::zeros();
        for i in 0..2 {
            let lambda = eig.eigenvalues[i];
            if lambda.abs() > 1e-14 * scale {
                let v = eig.eigenvectors.column(i);
                delta -= v * (v.dot(&jet.differential) / lambda);
            }
        }
        let n = delta.norm();
        if n > cap {
            delta *= cap / n;
        }
        u += delta;
        if dom.margin(&u) < -0.05 {
            return None;
        }
    }
    None
}

/// Converged Newton limits from a seed grid in every chart, merged,
/// classified and labeled.
///
/// Points are ordered by decreasing index, then by increasing value of `f`.
pub fn find_critical_points(m: &MorseData, cfg: &GeometryConfig) -> Result<Vec<CriticalPointGeom>, GeometryError> {
    let n = cfg.seeds_per_chart.max(1);
    // (chart, coords, location, margin)
    let mut found: Vec<(usize, Vector2<f64>, Vector3<f64>, f64)> = Vec::new();
    for (chart, dom) in m.surface.charts().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let s = Vector2::new((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                let seed = dom.lower + (dom.upper - dom.lower).component_mul(&s);
                let Some(u) = newton(m, chart, seed, cfg) else { continue };
                let margin = dom.margin(&u);
                if margin < 0.0 {
                    continue;
                }
                let x = m.surface.embed(chart, &u).point;
                match found.iter_mut().find(|f| (f.2 - x).norm() < cfg.dedup_radius) {
                    Some(f) if f.3 < margin => *f = (chart, u, x, margin),
                    Some(_) => {}
                    None => found.push((chart, u, x, margin)),
                }
            }
        }
    }
    if found.is_empty() {
        return Err(GeometryError::NoCriticalPoints);
    }

    let mut points = Vec::with_capacity(found.len());
    for (chart, coords, location, _) in found {
        let jet = m.jet(chart, &coords);
        let eig = jet.hessian.symmetric_eigen();
        let mut eigenvalues = eig.eigenvalues;
        if eigenvalues[0] > eigenvalues[1] {
            eigenvalues.swap_rows(0, 1);
        }
        let smallest = eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if smallest.abs() < cfg.degeneracy_tol {
            return Err(GeometryError::DegenerateCriticalPoint {
                location: location.into(),
                eigenvalue: smallest,
            });
        }
        let index = eigenvalues.iter().filter(|l| **l < 0.0).count();
        let pairs = generalized_eigen(&jet.hessian, &jet.metric).ok_or(GeometryError::NoCriticalPoints)?;
        let mut unstable = Vec::new();
        let mut stable = Vec::new();
        let mut rates = Vec::new();
        for (lambda, v) in pairs {
            rates.push(lambda);
            if lambda < 0.0 {
                unstable.push(sign_normalize(v));
            } else {
                stable.push(sign_normalize(v));
            }
        }
        if !stable.is_empty() {
            let all: Vec<_> = unstable.iter().chain(stable.iter()).copied().collect();
            if Matrix2::from_columns(&[all[0], all[1]]).determinant() < 0.0 {
                let last = stable.len() - 1;
                stable[last] = -stable[last];
            }
        }
        points.push(CriticalPointGeom {
            id: CriticalPointId::new(String::new(), index),
            chart,
            coords,
            location,
            value: jet.value,
            hessian: jet.hessian,
            eigenvalues,
            index,
            unstable_frame: unstable,
            stable_frame: stable,
            rates,
        });
    }

    points.sort_by(|a, b| {
        b.index.cmp(&a.index).then(a.value.total_cmp(&b.value)).then_with(|| {
            a.location
                .iter()
                .zip(b.location.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });
    let mut counts = [0usize; 3];
    for p in &points {
        if p.index < counts.len() {
            counts[p.index] += 1;
        }
    }
    let mut seen = [0usize; 3];
    for p in &mut points {
        if p.index < counts.len() {
            p.id.label = m.surface.label(p.index, seen[p.index], counts[p.index]);
            seen[p.index] += 1;
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_data(s: &Sphere) -> MorseData<'_> {
        MorseData::new(s, [0.0, 0.0, 2.0], &GeometryConfig::default()).unwrap()
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let s = Sphere::default();
        let t = Torus::default();
        let cfg = GeometryConfig::default();
        let ms = [
            MorseData::new(&s, [0.3, -0.2, 2.0], &cfg).unwrap(),
            MorseData::new(&t, [6.0, 0.4, 0.3], &cfg).unwrap(),
        ];
        let h = 1e-4;
        for m in ms {
            for chart in 0..m.surface().charts().len() {
                for u in [Vector2::new(0.3, -0.4), Vector2::new(1.2, 0.9)] {
                    let jet = m.jet(chart, &u);
                    for i in 0..2 {
                        let mut e = Vector2::zeros();
                        e[i] = h;
                        let fd =
                            (m.jet(chart, &(u + e)).differential - m.jet(chart, &(u - e)).differential) / (2.0 * h);
                        assert!((fd - jet.hessian.column(i)).norm() < 1e-5);
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_has_two_points() {
        let s = Sphere::default();
        let pts = find_critical_points(&sphere_data(&s), &GeometryConfig::default()).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!((pts[0].label(), pts[0].index), ("alpha", 2));
        assert_eq!((pts[1].label(), pts[1].index), ("beta", 0));
        assert!((pts[0].location - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-9);
        assert!((pts[1].location - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn point_on_surface_is_rejected() {
        let s = Sphere::default();
        let err = MorseData::new(&s, [0.0, 1.0, 0.0], &GeometryConfig::default())
            .err()
            .unwrap();
        assert!(matches!(err, GeometryError::PointOnSurface { .. }));
    }

    #[test]
    fn frames_are_metric_orthonormal_and_positive() {
        let t = Torus::default();
        let cfg = GeometryConfig::default();
        let m = MorseData::new(&t, [6.0, 0.4, 0.3], &cfg).unwrap();
        for p in find_critical_points(&m, &cfg).unwrap() {
            let g = m.jet(p.chart, &p.coords).metric;
            let all: Vec<_> = p.unstable_frame.iter().chain(&p.stable_frame).copied().collect();
            assert_eq!(all.len(), 2);
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(((a.transpose() * g * b)[0] - expect).abs() < 1e-9);
                }
            }
            if !p.stable_frame.is_empty() {
                assert!(Matrix2::from_columns(&[all[0], all[1]]).determinant() > 0.0);
            }
            assert_eq!(p.unstable_frame.len(), p.index);
        }
    }

    #[test]
    fn torus_on_axis_is_degenerate() {
        let t = Torus::default();
        let cfg = GeometryConfig::default();
        let m = MorseData::new(&t, [0.0, 0.0, 3.0], &cfg).unwrap();
        assert!(matches!(
            find_critical_points(&m, &cfg),
            Err(GeometryError::DegenerateCriticalPoint { .. })
        ));
    }
}
