use morse_core::geometry::{
    assemble_morse_complex, find_critical_points, trace_flow_lines, GeometryConfig, GeometryError, MorseData, SignRule,
    Sphere, Surface, Torus,
};
use morse_core::{compare_sign, homology, ComplexError, MorseComplex};
use nalgebra::Vector2;
use num_bigint::BigInt;

const TORUS_P: [f64; 3] = [6.0, 0.4, 0.3];
const SPHERE_P: [f64; 3] = [0.0, 0.0, 2.0];

fn ranks(c: &MorseComplex) -> Vec<usize> {
    homology(c).iter().map(|g| g.free_rank).collect()
}

fn counts(c: &MorseComplex) -> Vec<(String, String, BigInt)> {
    c.counts()
        .iter()
        .map(|s| (s.source.clone(), s.target.clone(), s.value.clone()))
        .collect()
}

#[test]
fn sphere_complex_and_homology() {
    let s = Sphere::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&s, SPHERE_P, &cfg).unwrap();
    let run = assemble_morse_complex(&m, &cfg).unwrap();
    assert_eq!(run.complex.ranks(), vec![1, 0, 1]);
    assert!(run.flow_lines.is_empty());
    assert_eq!(ranks(&run.complex), vec![1, 0, 1]);
    // the maximum reaches the minimum across a gap of two
    assert_eq!(run.graph_edges.len(), 1);
    assert_eq!(
        (run.graph_edges[0].source.as_str(), run.graph_edges[0].target.as_str()),
        ("alpha", "beta")
    );
    assert_eq!(run.graph_edges[0].components, None);
}

#[test]
fn sphere_maximum_has_no_consecutive_lines() {
    let s = Sphere::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&s, SPHERE_P, &cfg).unwrap();
    let crit = find_critical_points(&m, &cfg).unwrap();
    assert!(trace_flow_lines(&m, &crit, 0, &cfg).unwrap().is_empty());
}

#[test]
fn torus_complex_and_homology() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&t, TORUS_P, &cfg).unwrap();
    let run = assemble_morse_complex(&m, &cfg).unwrap();
    let idx: Vec<_> = run
        .critical_points
        .iter()
        .map(|p| (p.id.label.as_str(), p.index))
        .collect();
    assert_eq!(idx, vec![("a", 2), ("c1", 1), ("c2", 1), ("b", 0)]);
    assert_eq!(run.flow_lines.len(), 8);
    for (s, t) in [("a", "c1"), ("a", "c2"), ("c1", "b"), ("c2", "b")] {
        let signs: Vec<i8> = run
            .flow_lines
            .iter()
            .filter(|l| l.source.label == s && l.target.label == t)
            .map(|l| l.sign)
            .collect();
        assert_eq!(signs.len(), 2, "{s} -> {t}");
        assert_eq!(signs.iter().map(|&x| i32::from(x)).sum::<i32>(), 0, "{s} -> {t}");
        assert_eq!(run.complex.coefficient(s, t), BigInt::from(0));
    }
    assert_eq!(ranks(&run.complex), vec![1, 2, 1]);
}

#[test]
fn torus_saddle_reaches_minimum_twice_with_opposite_signs() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&t, TORUS_P, &cfg).unwrap();
    let crit = find_critical_points(&m, &cfg).unwrap();
    let lines = trace_flow_lines(&m, &crit, 1, &cfg).unwrap();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l.target.label == "b"));
    assert_eq!(lines[0].sign, -lines[1].sign);
}

#[test]
fn forced_positive_signs_break_the_square() {
    let t = Torus::default();
    let cfg = GeometryConfig {
        sign_rule: SignRule::ForcedPositive,
        ..GeometryConfig::default()
    };
    let m = MorseData::new(&t, TORUS_P, &cfg).unwrap();
    match assemble_morse_complex(&m, &cfg) {
        Err(GeometryError::Complex(ComplexError::BoundarySquareNonzero { from, to, coefficient })) => {
            assert_eq!((from.as_str(), to.as_str()), ("a", "b"));
            assert_eq!(coefficient, BigInt::from(8));
        }
        other => panic!("expected a nonzero square, got {other:?}"),
    }
}

#[test]
fn stored_frames_reproduce_signs() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&t, TORUS_P, &cfg).unwrap();
    let run = assemble_morse_complex(&m, &cfg).unwrap();
    for l in &run.flow_lines {
        assert_eq!(compare_sign(&l.source_frame, &l.flow_frame).unwrap(), l.sign);
        assert_eq!(compare_sign(&l.source_frame.negate(0), &l.flow_frame).unwrap(), -l.sign);
    }
}

#[test]
fn traces_descend_and_touch_their_endpoints() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&t, TORUS_P, &cfg).unwrap();
    let run = assemble_morse_complex(&m, &cfg).unwrap();
    let loc = |label: &str| {
        run.critical_points
            .iter()
            .find(|p| p.id.label == label)
            .unwrap()
            .location
    };
    for l in &run.flow_lines {
        assert_eq!(l.source.index, l.target.index + 1);
        let (first, last) = (l.trace[0], *l.trace.last().unwrap());
        assert!((first - loc(&l.source.label)).norm() < cfg.arrival_tol);
        assert!((last - loc(&l.target.label)).norm() < cfg.arrival_tol);
        // interior samples, excluding the appended endpoints
        let inner = &l.trace[1..l.trace.len() - 1];
        for w in inner.windows(2) {
            assert!(m.value_at(&w[1]) <= m.value_at(&w[0]));
        }
        assert!(l.seed_direction.norm() > 0.0);
    }
}

#[test]
fn critical_points_satisfy_orthogonality() {
    let s = Sphere::default();
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    for (surface, p, chi) in [(&s as &dyn Surface, SPHERE_P, 2i64), (&t as &dyn Surface, TORUS_P, 0)] {
        let m = MorseData::new(surface, p, &cfg).unwrap();
        let crit = find_critical_points(&m, &cfg).unwrap();
        let mut alt = 0i64;
        for c in &crit {
            let jet = m.jet(c.chart, &c.coords);
            assert!(jet.differential.norm() < cfg.grad_tol);
            let d = c.location - nalgebra::Vector3::from(p);
            for i in 0..2 {
                assert!(d.dot(&jet.chart.jacobian.column(i)).abs() < cfg.grad_tol);
            }
            assert!(c.eigenvalues.iter().all(|l| l.abs() > cfg.degeneracy_tol));
            alt += if c.index % 2 == 0 { 1 } else { -1 };
        }
        assert_eq!(alt, chi);
    }
}

#[test]
fn unstable_frame_spans_negative_directions() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&t, TORUS_P, &cfg).unwrap();
    for c in find_critical_points(&m, &cfg).unwrap() {
        for v in &c.unstable_frame {
            assert!((v.transpose() * c.hessian * v)[0] < 0.0);
        }
        for v in &c.stable_frame {
            assert!((v.transpose() * c.hessian * v)[0] > 0.0);
        }
    }
}

#[test]
fn counts_survive_refinement() {
    let t = Torus::default();
    let base = GeometryConfig::default();
    let fine = GeometryConfig {
        step: base.step / 2.0,
        epsilon: base.epsilon / 2.0,
        ..base.clone()
    };
    let m = MorseData::new(&t, TORUS_P, &base).unwrap();
    let a = assemble_morse_complex(&m, &base).unwrap();
    let b = assemble_morse_complex(&m, &fine).unwrap();
    assert_eq!(counts(&a.complex), counts(&b.complex));
    let signs = |r: &morse_core::SurfaceRun| r.flow_lines.iter().map(|l| l.sign).collect::<Vec<_>>();
    assert_eq!(signs(&a), signs(&b));
}

#[test]
fn other_generic_base_points_give_torus_homology() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    for p in [[5.0, 1.0, 2.0], [0.5, 0.2, 0.1], [-4.0, 3.0, -1.5]] {
        let m = MorseData::new(&t, p, &cfg).unwrap();
        let run = assemble_morse_complex(&m, &cfg).unwrap();
        assert_eq!(ranks(&run.complex), vec![1, 2, 1], "{p:?}");
    }
}

#[test]
fn symmetric_base_point_has_saddle_connection() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&t, [6.0, 0.0, 0.0], &cfg).unwrap();
    assert!(matches!(
        assemble_morse_complex(&m, &cfg),
        Err(GeometryError::MorseSmaleViolation { .. })
    ));
}

#[test]
fn axis_base_point_is_degenerate() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&t, [0.0, 0.0, 3.0], &cfg).unwrap();
    assert!(matches!(
        assemble_morse_complex(&m, &cfg),
        Err(GeometryError::DegenerateCriticalPoint { .. })
    ));
}

#[test]
fn base_point_on_torus_is_rejected() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    let on = t.embed(0, &Vector2::new(0.7, -1.1)).point;
    assert!(matches!(
        MorseData::new(&t, on.into(), &cfg),
        Err(GeometryError::PointOnSurface { .. })
    ));
}

#[test]
fn larger_sphere_keeps_poles() {
    let s = Sphere::new(2.5);
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&s, [0.3, -0.1, 4.0], &cfg).unwrap();
    let run = assemble_morse_complex(&m, &cfg).unwrap();
    assert_eq!(ranks(&run.complex), vec![1, 0, 1]);
    let top = &run.critical_points[0];
    assert!((top.location.norm() - 2.5).abs() < 1e-9);
}
