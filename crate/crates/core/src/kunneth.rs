//! Products of Morse complexes and the Künneth cross-check.
//!
//! Critical points of `f1 + f2` on `M1 x M2` are pairs of critical points,
//! graded by index sum. The product boundary is
//! `d(x ⊗ y) = dx ⊗ y + (-1)^|x| x ⊗ dy`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::chain_complex::{build_complex, homology, ComplexError, CriticalPointId, MorseComplex, SignedCount};
use crate::int_linalg::HomologyGroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KunnethError {
    #[error(
        "homology in degree {degree} of factor {factor} has torsion; the tensor formula here covers free groups only"
    )]
    TorsionNotSupported { factor: usize, degree: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductGenerator {
    pub first: CriticalPointId,
    pub second: CriticalPointId,
    pub index: usize,
}

impl ProductGenerator {
    /// Label of the pair in the product complex.
    pub fn label(&self) -> String {
        product_label(&self.first.label, &self.second.label)
    }

    pub fn id(&self) -> CriticalPointId {
        CriticalPointId::new(self.label(), self.index)
    }
}

pub fn product_label(first: &str, second: &str) -> String {
    format!("({first},{second})")
}

/// Pairs of generators, grouped by total degree and ordered
/// lexicographically by the positions of their factors.
pub fn product_generators(c1: &MorseComplex, c2: &MorseComplex) -> Vec<ProductGenerator> {
    let mut out = Vec::new();
    for k in 0..=c1.dimension() + c2.dimension() {
        for i in 0..=k.min(c1.dimension()) {
            let j = k - i;
            if j > c2.dimension() {
                continue;
            }
            for x in c1.generators(i) {
                for y in c2.generators(j) {
                    out.push(ProductGenerator {
                        first: x.clone(),
                        second: y.clone(),
                        index: k,
                    });
                }
            }
        }
    }
    out
}

/// The tensor-product complex with the Koszul sign on the second factor.
///
/// A coefficient from `(x1, x2)` to `(y1, y2)` is `N(x1, y1)` when
/// `x2 = y2`, `(-1)^|x1| N(x2, y2)` when `x1 = y1`, and zero otherwise.
pub fn product_complex(c1: &MorseComplex, c2: &MorseComplex) -> Result<MorseComplex, ComplexError> {
    let generators = product_generators(c1, c2);
    let mut counts = Vec::new();
    for g in &generators {
        let (x, y) = (&g.first, &g.second);
        if x.index > 0 {
            for target in c1.generators(x.index - 1) {
                let n = c1.coefficient(&x.label, &target.label);
                if !n.is_zero() {
                    counts.push(SignedCount::new(g.label(), product_label(&target.label, &y.label), n));
                }
            }
        }
        if y.index > 0 {
            let sign = if x.index % 2 == 0 {
                BigInt::from(1)
            } else {
                BigInt::from(-1)
            };
            for target in c2.generators(y.index - 1) {
                let n = c2.coefficient(&y.label, &target.label);
                if !n.is_zero() {
                    counts.push(SignedCount::new(
                        g.label(),
                        product_label(&x.label, &target.label),
                        &sign * n,
                    ));
                }
            }
        }
    }
    build_complex(
        c1.dimension() + c2.dimension(),
        generators.iter().map(ProductGenerator::id).collect(),
        counts,
    )
}

/// One `HM_i ⊗ HM_j` term of the tensor formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSummand {
    pub degree_pair: (usize, usize),
    pub group: HomologyGroup,
}

/// `⊕_{i+j=k} HM_i(M1) ⊗ HM_j(M2)` for torsion-free factors.
///
/// Only nonzero summands are listed, ordered by `i`.
pub fn kunneth_groups(
    h1: &[HomologyGroup],
    h2: &[HomologyGroup],
    k: usize,
) -> Result<Vec<TensorSummand>, KunnethError> {
    let mut out = Vec::new();
    for (i, a) in h1.iter().enumerate().take(k + 1) {
        let Some(b) = h2.get(k - i) else { continue };
        if !a.is_torsion_free() {
            return Err(KunnethError::TorsionNotSupported { factor: 1, degree: i });
        }
        if !b.is_torsion_free() {
            return Err(KunnethError::TorsionNotSupported {
                factor: 2,
                degree: k - i,
            });
        }
        if a.free_rank > 0 && b.free_rank > 0 {
            out.push(TensorSummand {
                degree_pair: (i, k - i),
                group: HomologyGroup::free(a.free_rank * b.free_rank),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCheck {
    pub degree: usize,
    pub direct: HomologyGroup,
    /// `None` when the tensor formula does not apply (torsion).
    pub formula_rank: Option<usize>,
}

impl DegreeCheck {
    pub fn agrees(&self) -> Option<bool> {
        self.formula_rank
            .map(|r| r == self.direct.free_rank && self.direct.is_torsion_free())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KunnethReport {
    pub product: MorseComplex,
    pub degrees: Vec<DegreeCheck>,
}

impl KunnethReport {
    /// `true` when every degree the formula covers agrees with direct homology.
    pub fn consistent(&self) -> bool {
        self.degrees.iter().all(|d| d.agrees() != Some(false))
    }

    /// `true` when some degree was skipped because of torsion.
    pub fn partial(&self) -> bool {
        self.degrees.iter().any(|d| d.formula_rank.is_none())
    }

    pub fn direct_ranks(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.direct.free_rank).collect()
    }
}

/// Computes the product complex directly and compares its homology to the
/// tensor formula applied to the factors' homology, degree by degree.
pub fn verify_kunneth(c1: &MorseComplex, c2: &MorseComplex) -> Result<KunnethReport, ComplexError> {
    let product = product_complex(c1, c2)?;
    let (h1, h2) = (homology(c1), homology(c2));
    let degrees = homology(&product)
        .into_iter()
        .enumerate()
        .map(|(k, direct)| {
            let formula_rank = kunneth_groups(&h1, &h2, k)
                .ok()
                .map(|s| s.iter().map(|t| t.group.free_rank).sum());
            DegreeCheck {
                degree: k,
                direct,
                formula_rank,
            }
        })
        .collect();
    Ok(KunnethReport { product, degrees })
}
