use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{Vector2, Vector3};
use num_bigint::BigInt;
use num_traits::Float;

use super::{find_critical_points, CriticalPointGeom, GeometryConfig, GeometryError, MorseData, SignRule};
use crate::blowup::FlowEdge;
use crate::chain_complex::{build_complex, CriticalPointId, MorseComplex, SignedCount};
use crate::orientation::{compare_sign, concat, OrientedFrame};

/// Charts are switched once a trajectory comes this close (relative) to the
/// edge of the current domain.
const SWITCH_MARGIN: f64 = 0.05;
/// Keep every `TRACE_STRIDE`-th sample in the stored polyline.
const TRACE_STRIDE: usize = 50;

/// An isolated flow line between points of consecutive index.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowLine {
    pub source: CriticalPointId,
    pub target: CriticalPointId,
    /// Unit vector (in the induced metric) of the seed offset, in the chart
    /// of the source.
    pub seed_direction: Vector2<f64>,
    pub trace: Vec<Vector3<f64>>,
    pub sign: i8,
    /// Transported unstable frame of the source at the comparison point.
    pub source_frame: OrientedFrame,
    /// `-∇f` followed by the transported unstable frame of the target.
    pub flow_frame: OrientedFrame,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSearch {
    pub lines: Vec<FlowLine>,
    /// Points of index at least two below the source reached by some seed.
    pub distant_targets: Vec<CriticalPointId>,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    chart: usize,
    u: Vector2<f64>,
    x: Vector3<f64>,
    f: f64,
}

struct Trajectory {
    samples: Vec<Sample>,
    /// Critical point the samples leave (first) and reach (last), in the
    /// direction of decreasing `f`.
    origin: usize,
    arrival: usize,
}

impl Trajectory {
    fn end(&self) -> &Sample {
        self.samples.last().expect("trajectory has samples")
    }
}

fn rk4(m: &MorseData, chart: usize, u: &Vector2<f64>, h: f64) -> Vector2<f64> {
    let k1 = m.flow_field(chart, u);
    let k2 = m.flow_field(chart, &(u + k1 * (h / 2.0)));
    let k3 = m.flow_field(chart, &(u + k2 * (h / 2.0)));
    let k4 = m.flow_field(chart, &(u + k3 * h));
    u + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Descend,
    Ascend,
}

/// Integrates the gradient flow from `start` (next to critical point `from`)
/// until it comes within the arrival tolerance of another critical point.
/// Ascending runs are returned reversed, so samples always go downhill.
fn trace(
    m: &MorseData,
    cfg: &GeometryConfig,
    crit: &[CriticalPointGeom],
    from: usize,
    start: (usize, Vector2<f64>),
    direction: Direction,
) -> Result<Trajectory, GeometryError> {
    let surface = m.surface();
    let label = || String::from(crit[from].label());
    let h = match direction {
        Direction::Descend => cfg.step,
        Direction::Ascend => -cfg.step,
    };
    let x0 = surface.embed(start.0, &start.1).point;
    let mut samples = vec![Sample {
        chart: start.0,
        u: start.1,
        x: x0,
        f: m.value_at(&x0),
    }];
    for step in 1..=cfg.max_steps {
        let last = samples[step - 1];
        let mut chart = last.chart;
        let mut u = rk4(m, chart, &last.u, h);
        let mut x = surface.embed(chart, &u).point;
        if surface.charts()[chart].margin(&u) < SWITCH_MARGIN {
            let (c, v) = surface.locate(&x).ok_or_else(|| GeometryError::IntegrationEscaped {
                source_label: label(),
                location: x.into(),
            })?;
            chart = c;
            u = v;
            x = surface.embed(chart, &u).point;
        }
        let f = m.value_at(&x);
        let monotone = match direction {
            Direction::Descend => f < last.f,
            Direction::Ascend => f > last.f,
        };
        if !monotone {
            return Err(GeometryError::FlowNotDescending {
                source_label: label(),
                step,
            });
        }
        samples.push(Sample { chart, u, x, f });
        let mut arrived: Option<usize> = None;
        for (i, c) in crit.iter().enumerate() {
            if i != from && (c.location - x).norm() < cfg.arrival_tol {
                if let Some(j) = arrived {
                    return Err(GeometryError::AmbiguousArrival {
                        source_label: label(),
                        first: String::from(crit[j].label()),
                        second: String::from(c.label()),
                    });
                }
                arrived = Some(i);
            }
        }
        if let Some(reached) = arrived {
            return Ok(match direction {
                Direction::Descend => Trajectory {
                    samples,
                    origin: from,
                    arrival: reached,
                },
                Direction::Ascend => {
                    samples.reverse();
                    Trajectory {
                        samples,
                        origin: reached,
                        arrival: from,
                    }
                }
            });
        }
    }
    Err(GeometryError::TraceStalled {
        source_label: label(),
        steps: cfg.max_steps,
    })
}

fn normalized(v: Vector3<f64>) -> Result<Vector3<f64>, GeometryError> {
    let n = v.norm();
    if n <= f64::EPSILON {
        return Err(crate::orientation::OrientationError::DependentFrames.into());
    }
    Ok(v / n)
}

fn gram_schmidt(vs: &mut [Vector3<f64>]) -> Result<(), GeometryError> {
    for i in 0..vs.len() {
        let mut v = vs[i];
        for u in &vs[..i] {
            v -= u * u.dot(&v);
        }
        vs[i] = normalized(v)?;
    }
    Ok(())
}

fn to_frame(vs: &[Vector3<f64>]) -> Result<OrientedFrame, GeometryError> {
    Ok(OrientedFrame::new(
        3,
        vs.iter().map(|v| v.iter().copied().collect()).collect(),
    )?)
}

/// Frames compared by the sign rule, at the sample whose value of `f` is
/// closest to the midpoint level between source and target.
///
/// The source's unstable frame is carried forward by projecting onto the
/// tangent plane (or onto the flow direction when the source has index one)
/// and reorthonormalizing; the target's is carried backward by projecting
/// onto the normal of the flow line inside the tangent plane.
fn sign_frames(
    m: &MorseData,
    traj: &Trajectory,
    src: &CriticalPointGeom,
    tgt: &CriticalPointGeom,
) -> Result<(OrientedFrame, OrientedFrame), GeometryError> {
    let level = (src.value + tgt.value) / 2.0;
    let mid = traj
        .samples
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.f - level).abs().total_cmp(&(b.1.f - level).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);

    let mut forward = src.ambient_unstable(m);
    for s in &traj.samples[..=mid] {
        let jet = m.jet(s.chart, &s.u);
        if forward.len() == 1 {
            let v = -jet.ambient_gradient();
            forward[0] = v * (v.dot(&forward[0]) / v.norm_squared());
        } else {
            for w in forward.iter_mut() {
                *w = jet.project_tangent(w);
            }
        }
        gram_schmidt(&mut forward)?;
    }

    let mut backward = tgt.ambient_unstable(m);
    for s in traj.samples[mid..].iter().rev() {
        let jet = m.jet(s.chart, &s.u);
        let v = normalized(jet.ambient_gradient())?;
        for w in backward.iter_mut() {
            let t = jet.project_tangent(w);
            *w = t - v * v.dot(&t);
        }
        gram_schmidt(&mut backward)?;
    }

    let s = traj.samples[mid];
    let down = -m.jet(s.chart, &s.u).ambient_gradient();
    let flow_frame = concat(&to_frame(&[down])?, &to_frame(&backward)?)?;
    Ok((to_frame(&forward)?, flow_frame))
}

fn make_line(
    m: &MorseData,
    cfg: &GeometryConfig,
    crit: &[CriticalPointGeom],
    traj: &Trajectory,
) -> Result<FlowLine, GeometryError> {
    let (src, tgt) = (&crit[traj.origin], &crit[traj.arrival]);
    // offset of the first sample from the source, as a unit chart vector
    let jet = m.jet(src.chart, &src.coords);
    let offset = jet
        .metric
        .cholesky()
        .map(|c| c.solve(&(jet.chart.jacobian.transpose() * (traj.samples[0].x - src.location))));
    let seed_direction = offset
        .map(|v| v / Float::sqrt((v.transpose() * jet.metric * v)[0]))
        .unwrap_or_else(Vector2::zeros);
    let (source_frame, flow_frame) = sign_frames(m, traj, src, tgt)?;
    let sign = match cfg.sign_rule {
        SignRule::Oriented => compare_sign(&source_frame, &flow_frame)?,
        SignRule::ForcedPositive => 1,
    };
    let mut trace: Vec<Vector3<f64>> = core::iter::once(src.location)
        .chain(traj.samples.iter().step_by(TRACE_STRIDE).map(|s| s.x))
        .collect();
    trace.push(traj.end().x);
    trace.push(tgt.location);
    Ok(FlowLine {
        source: src.id.clone(),
        target: tgt.id.clone(),
        seed_direction,
        trace,
        sign,
        source_frame,
        flow_frame,
    })
}

/// Flow lines leaving `source`, one per component of the zero-dimensional
/// moduli space, plus the lower points reached across an index gap of two
/// or more.
///
/// An index-one source is left along both rays of its unstable line. For an
/// index-two source the isolated flow lines are the branches of the stable
/// lines of saddles, so each saddle's two stable rays are followed uphill;
/// the branches that reach `source` are its flow lines. A circle of seeds in
/// the unstable plane then finds the lower points reached directly.
pub fn trace_from(
    m: &MorseData,
    crit: &[CriticalPointGeom],
    source: usize,
    cfg: &GeometryConfig,
) -> Result<FlowSearch, GeometryError> {
    let src = &crit[source];
    let violation = |to: usize| GeometryError::MorseSmaleViolation {
        from: String::from(crit[source].label()),
        to: String::from(crit[to].label()),
    };
    let seed = |p: &CriticalPointGeom, dir: Vector2<f64>| (p.chart, p.coords + dir * cfg.epsilon);
    let mut lines = Vec::new();
    let mut distant = Vec::new();
    match src.index {
        0 => {}
        1 => {
            let v = src.unstable_frame[0];
            for dir in [v, -v] {
                let traj = trace(m, cfg, crit, source, seed(src, dir), Direction::Descend)?;
                if crit[traj.arrival].index >= src.index {
                    return Err(violation(traj.arrival));
                }
                lines.push(make_line(m, cfg, crit, &traj)?);
            }
        }
        2 => {
            for (c, saddle) in crit.iter().enumerate().filter(|(_, p)| p.index == 1) {
                let s = saddle.stable_frame[0];
                for dir in [s, -s] {
                    let traj = trace(m, cfg, crit, c, seed(saddle, dir), Direction::Ascend)?;
                    if crit[traj.origin].index <= saddle.index {
                        return Err(GeometryError::MorseSmaleViolation {
                            from: String::from(crit[traj.origin].label()),
                            to: String::from(saddle.label()),
                        });
                    }
                    if traj.origin == source {
                        lines.push(make_line(m, cfg, crit, &traj)?);
                    }
                }
            }
            let n = cfg.circle_seeds.max(1);
            let (e1, e2) = (src.unstable_frame[0], src.unstable_frame[1]);
            for i in 0..n {
                let t = 2.0 * PI * i as f64 / n as f64;
                let dir = e1 * Float::cos(t) + e2 * Float::sin(t);
                let traj = trace(m, cfg, crit, source, seed(src, dir), Direction::Descend)?;
                let reached = &crit[traj.arrival];
                if reached.index >= src.index {
                    return Err(violation(traj.arrival));
                }
                if reached.index + 1 < src.index && !distant.contains(&traj.arrival) {
                    distant.push(traj.arrival);
                }
            }
        }
        _ => return Err(GeometryError::UnsupportedIndex(String::from(src.label()))),
    }
    let position = |l: &FlowLine| crit.iter().position(|c| c.id == l.target);
    lines.sort_by_key(|l| position(l));
    distant.sort_unstable();
    Ok(FlowSearch {
        lines,
        distant_targets: distant.into_iter().map(|i| crit[i].id.clone()).collect(),
    })
}

/// Flow lines from `source` to points of index one lower.
pub fn trace_flow_lines(
    m: &MorseData,
    crit: &[CriticalPointGeom],
    source: usize,
    cfg: &GeometryConfig,
) -> Result<Vec<FlowLine>, GeometryError> {
    Ok(trace_from(m, crit, source, cfg)?.lines)
}

/// Everything extracted from one surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceRun {
    pub critical_points: Vec<CriticalPointGeom>,
    pub flow_lines: Vec<FlowLine>,
    pub complex: MorseComplex,
    /// Consecutive pairs with their number of flow lines, and pairs with a
    /// larger index gap joined by some trajectory.
    pub graph_edges: Vec<FlowEdge>,
}

/// Critical points, flow lines, signed counts and the resulting complex.
pub fn assemble_morse_complex(m: &MorseData, cfg: &GeometryConfig) -> Result<SurfaceRun, GeometryError> {
    let crit = find_critical_points(m, cfg)?;
    if let Some(p) = crit.iter().find(|p| p.index > 2) {
        return Err(GeometryError::UnsupportedIndex(p.id.label.clone()));
    }
    let mut flow_lines = Vec::new();
    let mut counts: Vec<SignedCount> = Vec::new();
    let mut graph_edges = Vec::new();
    for source in 0..crit.len() {
        let search = trace_from(m, &crit, source, cfg)?;
        let mut targets: Vec<(CriticalPointId, BigInt, u64)> = Vec::new();
        for l in &search.lines {
            match targets.iter_mut().find(|t| t.0 == l.target) {
                Some(t) => {
                    t.1 += l.sign;
                    t.2 += 1;
                }
                None => targets.push((l.target.clone(), BigInt::from(l.sign), 1)),
            }
        }
        for (target, value, n) in targets {
            graph_edges.push(FlowEdge {
                source: crit[source].id.label.clone(),
                target: target.label.clone(),
                components: Some(n),
            });
            counts.push(SignedCount::new(crit[source].id.label.clone(), target.label, value));
        }
        for t in search.distant_targets {
            graph_edges.push(FlowEdge {
                source: crit[source].id.label.clone(),
                target: t.label,
                components: None,
            });
        }
        flow_lines.extend(search.lines);
    }
    let complex = build_complex(
        m.surface().dimension(),
        crit.iter().map(|p| p.id.clone()).collect(),
        counts,
    )?;
    Ok(SurfaceRun {
        critical_points: crit,
        flow_lines,
        complex,
        graph_edges,
    })
}
