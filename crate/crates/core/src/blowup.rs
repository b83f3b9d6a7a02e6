//! Broken-trajectory strata and the cell structure of blown-up unstable
//! manifolds.
//!
//! Everything here is combinatorial. A [`FlowGraph`] records which pairs of
//! critical points are joined by flow lines; the compactified moduli space
//! `closure(M(p, q))` is stratified by chains `p = p_0 > p_1 > ... > p_j = q`
//! of strictly decreasing index, a leg `p_i -> p_{i+1}` contributing a
//! factor of dimension `index gap - 1`.
//!
//! The blow-up of `p` is `closure(M(p, z)) x [0, f(p)]` with the top level
//! collapsed to one point, using the ordered Morse function `f(q) =
//! index(q)`. Its open cells are that cone point, one copy of every cell of
//! `closure(M(p, z))` at the bottom level, and every such cell lifted by
//! one dimension by the open level interval. The reported histogram is the
//! lifted part.
//!
//! Cells of `closure(M(p, z))` are counted as closed-cell families: one
//! cell per stratum in each positive dimension, while each one-dimensional
//! family carries its own pair of endpoint 0-cells (every end of an arc of
//! flow lines is a separate broken trajectory). Zero-dimensional strata that
//! bound no arc are counted once.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::chain_complex::CriticalPointId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("unknown critical point `{0}`")]
    UnknownLabel(String),
    #[error("duplicate critical point `{0}`")]
    DuplicateLabel(String),
    #[error("edge {from} -> {to} does not strictly decrease the index")]
    UnorderedIndices { from: String, to: String },
    #[error("edge {from} -> {to} between consecutive indices needs a positive component count")]
    MissingComponents { from: String, to: String },
    #[error("expected exactly one index-0 critical point, found {0}")]
    NoUniqueMinimum(usize),
    #[error("`{0}` has positive index but no flow lines down to the minimum")]
    DisconnectedFromMinimum(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEdge {
    pub source: String,
    pub target: String,
    /// Number of flow-line classes; required for consecutive indices,
    /// optional for larger gaps where the moduli space has positive dimension.
    pub components: Option<u64>,
}

/// Critical points and the pairs joined by flow lines.
///
/// Consecutive-index pairs are present exactly when listed. A pair with a
/// larger gap is present when listed or when some broken chain joins it,
/// since broken trajectories are limits of unbroken ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGraph {
    nodes: Vec<CriticalPointId>,
    edges: Vec<FlowEdge>,
    /// `legs[i]`: targets reachable from node `i`, with component counts for
    /// consecutive legs.
    legs: Vec<BTreeMap<usize, Option<u64>>>,
}

impl FlowGraph {
    pub fn new(nodes: Vec<CriticalPointId>, edges: Vec<FlowEdge>) -> Result<Self, BlowupError> {
        let mut index_of = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index_of.insert(n.label.clone(), i).is_some() {
                return Err(BlowupError::DuplicateLabel(n.label.clone()));
            }
        }
        let mut legs: Vec<BTreeMap<usize, Option<u64>>> = vec![BTreeMap::new(); nodes.len()];
        for e in &edges {
            let s = *index_of
                .get(&e.source)
                .ok_or_else(|| BlowupError::UnknownLabel(e.source.clone()))?;
            let t = *index_of
                .get(&e.target)
                .ok_or_else(|| BlowupError::UnknownLabel(e.target.clone()))?;
            if nodes[s].index <= nodes[t].index {
                return Err(BlowupError::UnorderedIndices {
                    from: e.source.clone(),
                    to: e.target.clone(),
                });
            }
            let consecutive = nodes[s].index == nodes[t].index + 1;
            let components = if consecutive {
                match e.components {
                    Some(c) if c > 0 => Some(c),
                    _ => {
                        return Err(BlowupError::MissingComponents {
                            from: e.source.clone(),
                            to: e.target.clone(),
                        })
                    }
                }
            } else {
                None
            };
            legs[s].insert(t, components);
        }

        // Close non-consecutive legs under concatenation, lowest index first
        // so every target's own legs are final when it is used.
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by_key(|&i| nodes[i].index);
        for &s in &order {
            let direct: Vec<usize> = legs[s].keys().copied().collect();
            for t in direct {
                let beyond: Vec<usize> = legs[t].keys().copied().collect();
                for u in beyond {
                    legs[s].entry(u).or_insert(None);
                }
            }
        }
        Ok(Self { nodes, edges, legs })
    }

    pub fn nodes(&self) -> &[CriticalPointId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[FlowEdge] {
        &self.edges
    }

    pub fn node(&self, label: &str) -> Result<&CriticalPointId, BlowupError> {
        self.position(label).map(|i| &self.nodes[i])
    }

    fn position(&self, label: &str) -> Result<usize, BlowupError> {
        self.nodes
            .iter()
            .position(|n| n.label == label)
            .ok_or_else(|| BlowupError::UnknownLabel(label.into()))
    }

    /// Whether `closure(M(from, to))` is nonempty.
    pub fn connects(&self, from: &str, to: &str) -> Result<bool, BlowupError> {
        let (s, t) = (self.position(from)?, self.position(to)?);
        Ok(self.legs[s].contains_key(&t))
    }

    fn minimum(&self) -> Result<usize, BlowupError> {
        let minima: Vec<usize> = (0..self.nodes.len()).filter(|&i| self.nodes[i].index == 0).collect();
        match minima.as_slice() {
            [z] => Ok(*z),
            other => Err(BlowupError::NoUniqueMinimum(other.len())),
        }
    }
}

/// A chain of critical points with strictly decreasing index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Stratum {
    pub chain: Vec<CriticalPointId>,
    /// Moduli dimension of each leg, `index gap - 1`.
    pub factor_dims: Vec<usize>,
    pub total_dim: usize,
    /// Product of component counts when every leg joins consecutive indices.
    pub multiplicity: Option<u64>,
}

impl Stratum {
    /// Number of intermediate critical points.
    pub fn breaks(&self) -> usize {
        self.chain.len().saturating_sub(2)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.chain.iter().map(|c| c.label.as_str()).collect()
    }
}

/// All strata of `closure(M(from, to))`, sorted by their label sequences.
pub fn enumerate_strata(g: &FlowGraph, from: &str, to: &str) -> Result<Vec<Stratum>, BlowupError> {
    let (s, t) = (g.position(from)?, g.position(to)?);
    let mut out = Vec::new();
    if g.nodes[s].index > g.nodes[t].index {
        let mut path = vec![s];
        extend_chains(g, t, &mut path, &mut out);
    }
    out.sort_by(|a, b| a.labels().cmp(&b.labels()));
    Ok(out)
}

fn extend_chains(g: &FlowGraph, target: usize, path: &mut Vec<usize>, out: &mut Vec<Stratum>) {
    let last = *path.last().expect("path starts with the source");
    for &next in g.legs[last].keys() {
        if next == target {
            path.push(next);
            out.push(stratum_of(g, path));
            path.pop();
        } else if g.nodes[next].index > g.nodes[target].index && g.legs[next].contains_key(&target) {
            path.push(next);
            extend_chains(g, target, path, out);
            path.pop();
        }
    }
}

fn stratum_of(g: &FlowGraph, path: &[usize]) -> Stratum {
    let mut factor_dims = Vec::with_capacity(path.len() - 1);
    let mut multiplicity = Some(1u64);
    for w in path.windows(2) {
        let gap = g.nodes[w[0]].index - g.nodes[w[1]].index;
        factor_dims.push(gap - 1);
        multiplicity = match (multiplicity, g.legs[w[0]][&w[1]]) {
            (Some(m), Some(c)) => Some(m * c),
            _ => None,
        };
    }
    Stratum {
        chain: path.iter().map(|&i| g.nodes[i].clone()).collect(),
        total_dim: factor_dims.iter().sum(),
        factor_dims,
        multiplicity,
    }
}

/// Closed-cell family counts of a stratified compactified moduli space,
/// indexed by dimension.
pub fn closure_cells(strata: &[Stratum]) -> Vec<u64> {
    let Some(top) = strata.iter().map(|s| s.total_dim).max() else {
        return Vec::new();
    };
    let mut cells = vec![0u64; top + 1];
    for s in strata.iter().filter(|s| s.total_dim > 0) {
        cells[s.total_dim] += 1;
    }
    let points: BTreeSet<Vec<&str>> = strata.iter().filter(|s| s.total_dim == 0).map(|s| s.labels()).collect();
    let mut bounding = BTreeSet::new();
    for arc in strata.iter().filter(|s| s.total_dim == 1) {
        for end in arc_endpoints(arc, &points) {
            cells[0] += 1;
            bounding.insert(end);
        }
    }
    cells[0] += points.iter().filter(|p| !bounding.contains(*p)).count() as u64;
    cells
}

/// Zero-dimensional strata obtained by breaking the one leg of positive
/// dimension of a one-dimensional stratum at an intermediate point.
fn arc_endpoints<'a>(arc: &'a Stratum, points: &BTreeSet<Vec<&'a str>>) -> Vec<Vec<&'a str>> {
    let leg = arc
        .factor_dims
        .iter()
        .position(|&d| d == 1)
        .expect("a one-dimensional stratum has exactly one leg of dimension one");
    let labels = arc.labels();
    points
        .iter()
        .filter(|p| p.len() == labels.len() + 1 && p[..=leg] == labels[..=leg] && p[leg + 2..] == labels[leg + 1..])
        .cloned()
        .collect()
}

/// One term `closure(M(p, q)) x E(q)` of the boundary of `E(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryEntry {
    pub point: CriticalPointId,
    pub strata: Vec<Stratum>,
    /// Dimension of `closure(M(p, q))`.
    pub moduli_dim: usize,
    /// Dimension of the blow-up `E(q)`.
    pub blowup_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupComplex {
    pub base_point: CriticalPointId,
    pub minimum: CriticalPointId,
    /// Top level `f(p)`, equal to the index under the ordered function.
    pub level: usize,
    /// Strata of `closure(M(p, z))`.
    pub strata: Vec<Stratum>,
    /// Closed-cell family counts of `closure(M(p, z))` by dimension.
    pub closure_cells: Vec<u64>,
    /// Cells of the blow-up by dimension: the closure cells lifted by one,
    /// or a single point when `p` is the minimum.
    pub cells: Vec<u64>,
    pub boundary_strata: Vec<BoundaryEntry>,
}

impl BlowupComplex {
    pub fn dimension(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    /// Per-dimension counts of the whole cone: apex, bottom copy of the
    /// closure, and the lifted cells.
    pub fn cone_cells(&self) -> Vec<u64> {
        let mut all = vec![0u64; self.cells.len().max(1)];
        if self.closure_cells.is_empty() {
            all[0] = 1;
            return all;
        }
        all[0] += 1;
        for (d, &n) in self.closure_cells.iter().enumerate() {
            all[d] += n;
            all[d + 1] += n;
        }
        all
    }

    /// Alternating cell count of the cone; a closed disk gives 1.
    pub fn euler_sum(&self) -> i64 {
        alternating_sum(&self.cone_cells())
    }
}

pub fn alternating_sum(cells: &[u64]) -> i64 {
    cells
        .iter()
        .enumerate()
        .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum()
}

/// The blow-up of the unstable manifold of `p` and its boundary pairings.
pub fn blowup_complex(g: &FlowGraph, p: &str) -> Result<BlowupComplex, BlowupError> {
    let z = g.minimum()?;
    let pi = g.position(p)?;
    let base = g.nodes[pi].clone();
    let minimum = g.nodes[z].clone();
    if pi == z {
        return Ok(BlowupComplex {
            base_point: base,
            minimum,
            level: 0,
            strata: Vec::new(),
            closure_cells: Vec::new(),
            cells: vec![1],
            boundary_strata: Vec::new(),
        });
    }
    if !g.legs[pi].contains_key(&z) {
        return Err(BlowupError::DisconnectedFromMinimum(base.label));
    }

    let strata = enumerate_strata(g, p, &minimum.label)?;
    let closure = closure_cells(&strata);
    let mut cells = vec![0u64; closure.len() + 1];
    for (d, &n) in closure.iter().enumerate() {
        cells[d + 1] = n;
    }

    let mut targets: Vec<usize> = g.legs[pi].keys().copied().collect();
    targets.sort_by(|&a, &b| {
        g.nodes[b]
            .index
            .cmp(&g.nodes[a].index)
            .then_with(|| g.nodes[a].label.cmp(&g.nodes[b].label))
    });
    let mut boundary_strata = Vec::with_capacity(targets.len());
    for q in targets {
        let q_label = &g.nodes[q].label;
        let strata = enumerate_strata(g, p, q_label)?;
        let moduli_dim = strata.iter().map(|s| s.total_dim).max().unwrap_or(0);
        let blowup_dim = blowup_complex(g, q_label)?.dimension();
        boundary_strata.push(BoundaryEntry {
            point: g.nodes[q].clone(),
            strata,
            moduli_dim,
            blowup_dim,
        });
    }

    Ok(BlowupComplex {
        level: base.index,
        base_point: base,
        minimum,
        strata,
        closure_cells: closure,
        cells,
        boundary_strata,
    })
}

/// The pairings `closure(M(p, q)) x E(q)` making up the boundary of `E(p)`.
pub fn boundary_of_blowup(b: &BlowupComplex) -> &[BoundaryEntry] {
    &b.boundary_strata
}
