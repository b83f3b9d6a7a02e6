//! Morse chain complexes over the integers.
//!
//! `CM_k` is free on the critical points of index `k`; the boundary
//! `d_k` sends a generator to the signed counts of flow lines to index
//! `k - 1` points. Matrices are indexed by generator position, never by
//! label: column `j` of `d_k` is the `j`-th index-`k` generator, row `i`
//! the `i`-th index-`(k - 1)` generator.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::int_linalg::{homology_at, HomologyGroup, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CriticalPointId {
    pub label: String,
    pub index: usize,
}

impl CriticalPointId {
    pub fn new(label: impl Into<String>, index: usize) -> Self {
        Self {
            label: label.into(),
            index,
        }
    }
}

/// `N(source, target)`, the signed number of flow lines between
/// consecutive-index critical points, keyed by label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedCount {
    pub source: String,
    pub target: String,
    pub value: BigInt,
}

impl SignedCount {
    pub fn new(source: impl Into<String>, target: impl Into<String>, value: impl Into<BigInt>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            value: value.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("duplicate generator label `{0}`")]
    DuplicateLabel(String),
    #[error("generator `{label}` has index {index} above the complex dimension {dimension}")]
    IndexAboveDimension {
        label: String,
        index: usize,
        dimension: usize,
    },
    #[error("count references unknown generator `{0}`")]
    UnknownLabel(String),
    #[error("count {from} -> {to} joins indices {source_index} and {target_index}, which are not consecutive")]
    NonConsecutiveIndices {
        from: String,
        to: String,
        source_index: usize,
        target_index: usize,
    },
    #[error("count {from} -> {to} is given more than once")]
    DuplicateCount { from: String, to: String },
    #[error("boundary squares to nonzero: coefficient of {to} in d(d({from})) is {coefficient}")]
    BoundarySquareNonzero {
        from: String,
        to: String,
        coefficient: BigInt,
    },
}

/// A validated Morse complex: `d_k d_{k+1} = 0` holds for every `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseComplex {
    dimension: usize,
    /// Generators in the order they were supplied.
    order: Vec<CriticalPointId>,
    counts: Vec<SignedCount>,
    generators: Vec<Vec<CriticalPointId>>,
    /// `boundaries[k]` is `d_k : CM_k -> CM_{k-1}`; `d_0` has zero rows.
    boundaries: Vec<IntMatrix>,
}

/// Assembles the boundary matrices from signed counts and checks `d^2 = 0`.
///
/// Pairs without a count contribute zero (an empty sum).
pub fn build_complex(
    dimension: usize,
    generators: Vec<CriticalPointId>,
    counts: Vec<SignedCount>,
) -> Result<MorseComplex, ComplexError> {
    let mut by_degree: Vec<Vec<CriticalPointId>> = vec![Vec::new(); dimension + 1];
    let mut position: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for g in &generators {
        if g.index > dimension {
            return Err(ComplexError::IndexAboveDimension {
                label: g.label.clone(),
                index: g.index,
                dimension,
            });
        }
        let pos = by_degree[g.index].len();
        if position.insert(g.label.as_str(), (g.index, pos)).is_some() {
            return Err(ComplexError::DuplicateLabel(g.label.clone()));
        }
        by_degree[g.index].push(g.clone());
    }

    let mut boundaries: Vec<IntMatrix> = (0..=dimension)
        .map(|k| {
            let rows = if k == 0 { 0 } else { by_degree[k - 1].len() };
            IntMatrix::zeros(rows, by_degree[k].len())
        })
        .collect();
    let mut seen = BTreeMap::new();
    for c in &counts {
        let &(si, sp) = position
            .get(c.source.as_str())
            .ok_or_else(|| ComplexError::UnknownLabel(c.source.clone()))?;
        let &(ti, tp) = position
            .get(c.target.as_str())
            .ok_or_else(|| ComplexError::UnknownLabel(c.target.clone()))?;
        if si != ti + 1 {
            return Err(ComplexError::NonConsecutiveIndices {
                from: c.source.clone(),
                to: c.target.clone(),
                source_index: si,
                target_index: ti,
            });
        }
        if seen.insert((c.source.as_str(), c.target.as_str()), ()).is_some() {
            return Err(ComplexError::DuplicateCount {
                from: c.source.clone(),
                to: c.target.clone(),
            });
        }
        boundaries[si].set(tp, sp, c.value.clone());
    }

    for k in 2..=dimension {
        let square = boundaries[k - 1]
            .mul(&boundaries[k])
            .expect("boundary shapes are consistent by construction");
        // report the first offending pair in (source, target) position order
        for col in 0..square.cols() {
            for row in 0..square.rows() {
                let coefficient = square.get(row, col);
                if !coefficient.is_zero() {
                    return Err(ComplexError::BoundarySquareNonzero {
                        from: by_degree[k][col].label.clone(),
                        to: by_degree[k - 2][row].label.clone(),
                        coefficient: coefficient.clone(),
                    });
                }
            }
        }
    }

    Ok(MorseComplex {
        dimension,
        order: generators,
        counts,
        generators: by_degree,
        boundaries,
    })
}

impl MorseComplex {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Generators of `CM_k` in position order; empty above the dimension.
    pub fn generators(&self, k: usize) -> &[CriticalPointId] {
        self.generators.get(k).map_or(&[], Vec::as_slice)
    }

    /// All generators in the order they were supplied.
    pub fn all_generators(&self) -> &[CriticalPointId] {
        &self.order
    }

    pub fn counts(&self) -> &[SignedCount] {
        &self.counts
    }

    /// `d_k`; for `k > dimension` this is the empty `|CM_dim| x 0` map when
    /// `k = dimension + 1` and `0 x 0` beyond.
    pub fn boundary(&self, k: usize) -> IntMatrix {
        match self.boundaries.get(k) {
            Some(m) => m.clone(),
            None if k == self.dimension + 1 => IntMatrix::zeros(self.generators[self.dimension].len(), 0),
            None => IntMatrix::zeros(0, 0),
        }
    }

    pub fn boundaries(&self) -> &[IntMatrix] {
        &self.boundaries
    }

    /// Number of generators per degree `0..=dimension`.
    pub fn ranks(&self) -> Vec<usize> {
        self.generators.iter().map(Vec::len).collect()
    }

    /// `(degree, position)` of a label.
    pub fn locate(&self, label: &str) -> Option<(usize, usize)> {
        self.generators
            .iter()
            .enumerate()
            .find_map(|(k, gens)| gens.iter().position(|g| g.label == label).map(|p| (k, p)))
    }

    /// `N(source, target)` read back from the boundary matrix.
    pub fn coefficient(&self, source: &str, target: &str) -> BigInt {
        match (self.locate(source), self.locate(target)) {
            (Some((si, sp)), Some((ti, tp))) if si == ti + 1 => self.boundaries[si].get(tp, sp).clone(),
            _ => BigInt::zero(),
        }
    }
}

/// `HM_k` for `k = 0..=dimension`.
pub fn homology(c: &MorseComplex) -> Vec<HomologyGroup> {
    (0..=c.dimension)
        .map(|k| homology_at(&c.boundary(k), &c.boundary(k + 1)).expect("validated complex composes to zero"))
        .collect()
}

/// Coefficient `k` is the free rank of `HM_k`; trailing zeros are trimmed,
/// so all-zero homology gives the zero polynomial (empty list).
pub fn poincare_polynomial(h: &[HomologyGroup]) -> Vec<u64> {
    let mut p: Vec<u64> = h.iter().map(|g| g.free_rank as u64).collect();
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// Evaluation at `t = -1`.
pub fn euler_characteristic(p: &[u64]) -> i64 {
    p.iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}
