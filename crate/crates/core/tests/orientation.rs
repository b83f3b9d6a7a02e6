mod common;

use morse_core::geometry::{assemble_morse_complex, GeometryConfig, MorseData, Torus};
use morse_core::{
    broken_pair_cancellation, build_complex, compare_sign, concat, product_complex, CriticalPointId, OrientedFrame,
};
use proptest::prelude::*;

/// `n` vectors in `R^n` with a well-conditioned Gram matrix, as rows.
fn basis(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), n).prop_filter("independent", move |vs| {
        OrientedFrame::new(n, vs.clone()).is_ok()
            && nalgebra::DMatrix::from_fn(n, n, |r, c| vs[c][r]).determinant().abs() > 0.05
    })
}

fn frame(n: usize, vs: &[Vec<f64>]) -> OrientedFrame {
    OrientedFrame::new(n, vs.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sign_is_multiplicative(a in basis(3), b in basis(3), c in basis(3)) {
        let (fa, fb, fc) = (frame(3, &a), frame(3, &b), frame(3, &c));
        let ab = compare_sign(&fa, &fb).unwrap();
        let bc = compare_sign(&fb, &fc).unwrap();
        prop_assert_eq!(ab * bc, compare_sign(&fa, &fc).unwrap());
        prop_assert_eq!(compare_sign(&fa, &fa).unwrap(), 1);
        prop_assert_eq!(compare_sign(&fa, &fa.negate(2)).unwrap(), -1);
    }

    #[test]
    fn concat_is_associative_and_block_swaps_have_koszul_sign(v in basis(4), p in 0usize..=4, q_raw in 0usize..=4) {
        let q = q_raw.min(4 - p);
        let a = frame(4, &v[..p]);
        let b = frame(4, &v[p..p + q]);
        let c = frame(4, &v[p + q..]);
        let left = concat(&concat(&a, &b).unwrap(), &c).unwrap();
        let right = concat(&a, &concat(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(compare_sign(&left, &right).unwrap(), 1);
        let ab = concat(&concat(&a, &b).unwrap(), &c).unwrap();
        let ba = concat(&concat(&b, &a).unwrap(), &c).unwrap();
        let expected = if (p * q) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(compare_sign(&ab, &ba).unwrap(), expected);
    }

    #[test]
    fn subspace_frames_compare_inside_their_span(a in basis(2), b in basis(2)) {
        // embed two bases of R^2 as the plane z = 0 in R^3
        let lift = |vs: &[Vec<f64>]| vs.iter().map(|v| vec![v[0], v[1], 0.0]).collect::<Vec<_>>();
        let plane = compare_sign(&frame(3, &lift(&a)), &frame(3, &lift(&b))).unwrap();
        prop_assert_eq!(plane, compare_sign(&frame(2, &a), &frame(2, &b)).unwrap());
    }
}

fn ids(list: &[(&str, usize)]) -> Vec<CriticalPointId> {
    list.iter().map(|&(l, i)| CriticalPointId::new(l, i)).collect()
}

#[test]
fn cancellation_on_random_complexes() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let c = common::random_complex(&mut rng, 3, 4, 3);
        let r = broken_pair_cancellation(&c);
        assert!(r.passes());
        for k in 2..=c.dimension() {
            assert_eq!(
                c.boundary(k - 1).mul(&c.boundary(k)).unwrap().is_zero(),
                r.pairs
                    .iter()
                    .filter(|p| c.locate(&p.source).unwrap().0 == k)
                    .all(|p| p.total == 0.into())
            );
        }
    }
}

#[test]
fn cancellation_on_torus_run_and_product() {
    let t = Torus::default();
    let cfg = GeometryConfig::default();
    let m = MorseData::new(&t, [6.0, 0.4, 0.3], &cfg).unwrap();
    let torus = assemble_morse_complex(&m, &cfg).unwrap().complex;
    let r = broken_pair_cancellation(&torus);
    assert!(r.passes());
    let ab = r.pairs.iter().find(|p| p.source == "a" && p.target == "b").unwrap();
    assert!(ab.contributions.is_empty());

    let s2 = build_complex(2, ids(&[("alpha", 2), ("beta", 0)]), vec![]).unwrap();
    let p = product_complex(&s2, &torus).unwrap();
    let r = broken_pair_cancellation(&p);
    assert!(r.passes());
    assert!(!r.pairs.is_empty());
}
