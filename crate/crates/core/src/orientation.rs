//! Oriented frames and the sign algebra behind the boundary coefficients.
//!
//! An orientation of a vector space is an equivalence class of ordered
//! bases. [`compare_sign`] decides whether two bases of the same space
//! induce the same one; [`concat`] realizes the direct-sum orientation.
//! [`broken_pair_cancellation`] checks the combinatorial consequence of
//! coherent orientations: the broken trajectories bounding each
//! one-dimensional moduli space cancel in pairs.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::chain_complex::MorseComplex;

/// Gram determinant of the normalized vectors must exceed this.
pub const INDEPENDENCE_TOL: f64 = 1e-12;
/// Largest principal angle accepted between spans that should coincide.
pub const SPAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrientationError {
    #[error("frame vectors are linearly dependent")]
    DependentFrames,
    #[error("frame vector has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("frames do not span the same subspace")]
    SpanMismatch,
}

/// Ordered, linearly independent vectors in `R^space_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedFrame {
    vectors: Vec<Vec<f64>>,
    space_dim: usize,
}

impl OrientedFrame {
    pub fn new(space_dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self, OrientationError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != space_dim) {
            return Err(OrientationError::WrongLength {
                expected: space_dim,
                got: v.len(),
            });
        }
        let frame = Self { vectors, space_dim };
        if frame.len() > space_dim || normalized_gram_det(&frame) <= INDEPENDENCE_TOL {
            return Err(OrientationError::DependentFrames);
        }
        Ok(frame)
    }

    /// The empty frame, orienting the zero subspace positively.
    pub fn empty(space_dim: usize) -> Self {
        Self {
            vectors: Vec::new(),
            space_dim,
        }
    }

    /// The standard basis `e_1, ..., e_n`.
    pub fn standard(space_dim: usize) -> Self {
        let vectors = (0..space_dim)
            .map(|i| (0..space_dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { vectors, space_dim }
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// The same vectors with the `i`-th one negated.
    pub fn negate(&self, i: usize) -> Self {
        let mut out = self.clone();
        for x in &mut out.vectors[i] {
            *x = -*x;
        }
        out
    }

    fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.space_dim, self.len(), |r, c| self.vectors[c][r])
    }
}

fn normalized_gram_det(frame: &OrientedFrame) -> f64 {
    if frame.is_empty() {
        return 1.0;
    }
    let mut m = frame.matrix();
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        if n == 0.0 {
            return 0.0;
        }
        col /= n;
    }
    (m.transpose() * &m).determinant()
}

/// Direct-sum orientation: `a`'s vectors followed by `b`'s.
pub fn concat(a: &OrientedFrame, b: &OrientedFrame) -> Result<OrientedFrame, OrientationError> {
    if a.space_dim != b.space_dim {
        return Err(OrientationError::WrongLength {
            expected: a.space_dim,
            got: b.space_dim,
        });
    }
    let mut vectors = a.vectors.clone();
    vectors.extend(b.vectors.iter().cloned());
    OrientedFrame::new(a.space_dim, vectors)
}

/// `+1` when `a` and `b` orient their common span the same way, else `-1`.
///
/// The sign is that of the determinant of the change of basis expressing
/// `b` in terms of `a`.
pub fn compare_sign(a: &OrientedFrame, b: &OrientedFrame) -> Result<i8, OrientationError> {
    if a.space_dim != b.space_dim || a.len() != b.len() {
        return Err(OrientationError::SpanMismatch);
    }
    if a.is_empty() {
        return Ok(1);
    }
    let (ma, mb) = (a.matrix(), b.matrix());
    let gram = ma.transpose() * &ma;
    let chol = gram.cholesky().ok_or(OrientationError::DependentFrames)?;
    // coordinates of b's vectors in a's basis (least squares)
    let coords = chol.solve(&(ma.transpose() * &mb));
    let residual = &mb - &ma * &coords;
    for (j, col) in residual.column_iter().enumerate() {
        // sine of the angle between b_j and span(a)
        if col.norm() > SPAN_TOL * mb.column(j).norm() {
            return Err(OrientationError::SpanMismatch);
        }
    }
    let det = coords.determinant();
    if det.abs() <= f64::EPSILON {
        return Err(OrientationError::SpanMismatch);
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

/// One index-gap-2 pair and the broken trajectories through each middle point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrokenPair {
    pub source: String,
    pub target: String,
    /// `(middle, N(source, middle) * N(middle, target))`, nonzero terms only.
    pub contributions: Vec<(String, BigInt)>,
    pub total: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancellationReport {
    pub pairs: Vec<BrokenPair>,
}

impl CancellationReport {
    pub fn passes(&self) -> bool {
        self.pairs.iter().all(|p| p.total.is_zero())
    }

    pub fn violations(&self) -> impl Iterator<Item = &BrokenPair> {
        self.pairs.iter().filter(|p| !p.total.is_zero())
    }
}

/// Sums `N(ξ, γ) N(γ, ζ)` over middle points `γ` for every pair `(ξ, ζ)`
/// whose indices differ by two.
pub fn broken_pair_cancellation(c: &MorseComplex) -> CancellationReport {
    let mut pairs = Vec::new();
    for k in 2..=c.dimension() {
        for xi in c.generators(k) {
            for zeta in c.generators(k - 2) {
                let mut contributions = Vec::new();
                let mut total = BigInt::zero();
                for gamma in c.generators(k - 1) {
                    let term = c.coefficient(&xi.label, &gamma.label) * c.coefficient(&gamma.label, &zeta.label);
                    if !term.is_zero() {
                        total += &term;
                        contributions.push((gamma.label.clone(), term));
                    }
                }
                pairs.push(BrokenPair {
                    source: xi.label.clone(),
                    target: zeta.label.clone(),
                    contributions,
                    total,
                });
            }
        }
    }
    CancellationReport { pairs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn frame(vs: &[&[f64]]) -> OrientedFrame {
        OrientedFrame::new(vs[0].len(), vs.iter().map(|v| v.to_vec()).collect()).unwrap()
    }

    #[test]
    fn standard_basis_sum() {
        let e1 = frame(&[&[1.0, 0.0]]);
        let e2 = frame(&[&[0.0, 1.0]]);
        let s = concat(&e1, &e2).unwrap();
        assert_eq!(compare_sign(&s, &OrientedFrame::standard(2)).unwrap(), 1);
        let t = concat(&e2, &e1).unwrap();
        assert_eq!(compare_sign(&t, &OrientedFrame::standard(2)).unwrap(), -1);
    }

    #[test]
    fn dependent_concat_fails() {
        let a = frame(&[&[1.0, 1.0]]);
        let b = frame(&[&[2.0, 2.0]]);
        assert_eq!(concat(&a, &b).unwrap_err(), OrientationError::DependentFrames);
    }

    #[test]
    fn self_and_reflection() {
        let a = frame(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0]]);
        assert_eq!(compare_sign(&a, &a).unwrap(), 1);
        assert_eq!(compare_sign(&a, &a.negate(1)).unwrap(), -1);
    }

    #[test]
    fn span_mismatch_detected() {
        let a = frame(&[&[1.0, 0.0, 0.0]]);
        let b = frame(&[&[0.0, 1.0, 0.0]]);
        assert_eq!(compare_sign(&a, &b).unwrap_err(), OrientationError::SpanMismatch);
        let c = frame(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_eq!(compare_sign(&a, &c).unwrap_err(), OrientationError::SpanMismatch);
    }

    #[test]
    fn plane_in_space_orientation() {
        // two bases of the xy-plane inside R^3
        let a = frame(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let b = frame(&[&[1.0, 1.0, 0.0], &[-1.0, 1.0, 0.0]]);
        assert_eq!(compare_sign(&a, &b).unwrap(), 1);
        let c = frame(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]]);
        assert_eq!(compare_sign(&a, &c).unwrap(), -1);
    }

    #[test]
    fn empty_frames_agree() {
        assert_eq!(
            compare_sign(&OrientedFrame::empty(3), &OrientedFrame::empty(3)).unwrap(),
            1
        );
    }

    #[test]
    fn trivially_cancelling_complex() {
        use crate::chain_complex::{build_complex, CriticalPointId};
        let c = build_complex(
            2,
            vec![
                CriticalPointId::new("x", 2),
                CriticalPointId::new("y", 1),
                CriticalPointId::new("z", 0),
            ],
            vec![],
        )
        .unwrap();
        let r = broken_pair_cancellation(&c);
        assert_eq!(r.pairs.len(), 1);
        assert!(r.pairs[0].contributions.is_empty());
        assert!(r.passes());
    }
}
