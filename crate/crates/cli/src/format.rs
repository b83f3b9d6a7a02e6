//! JSON documents: complexes, flow graphs and geometry run configurations.

use std::str::FromStr;

use morse_core::{
    build_complex, BlowupError, ComplexError, CriticalPointId, FlowEdge, FlowGraph, GeometryConfig, MorseComplex,
    SignRule, SignedCount,
};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Number;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub label: String,
    pub index: usize,
}

/// Counts are arbitrary-precision integers kept in their textual form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountEntry {
    pub source: String,
    pub target: String,
    pub value: Number,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub dimension: usize,
    pub generators: Vec<GeneratorEntry>,
    pub counts: Vec<CountEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("count {from}->{to} has non-integer value {value}")]
    NotAnInteger { from: String, to: String, value: String },
}

fn entries(ids: &[CriticalPointId]) -> Vec<GeneratorEntry> {
    ids.iter()
        .map(|g| GeneratorEntry {
            label: g.label.clone(),
            index: g.index,
        })
        .collect()
}

fn ids(entries: &[GeneratorEntry]) -> Vec<CriticalPointId> {
    entries
        .iter()
        .map(|g| CriticalPointId::new(g.label.clone(), g.index))
        .collect()
}

impl ComplexFile {
    pub fn from_complex(c: &MorseComplex) -> Self {
        Self {
            dimension: c.dimension(),
            generators: entries(c.all_generators()),
            counts: c
                .counts()
                .iter()
                .map(|n| CountEntry {
                    source: n.source.clone(),
                    target: n.target.clone(),
                    value: Number::from_str(&n.value.to_string()).expect("integers are valid JSON numbers"),
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: Self = serde_json::from_str(text)?;
        file.signed_counts()?;
        Ok(file)
    }

    pub fn signed_counts(&self) -> Result<Vec<SignedCount>, FormatError> {
        self.counts
            .iter()
            .map(|c| {
                let text = c.value.to_string();
                BigInt::from_str(&text)
                    .map(|v| SignedCount::new(c.source.clone(), c.target.clone(), v))
                    .map_err(|_| FormatError::NotAnInteger {
                        from: c.source.clone(),
                        to: c.target.clone(),
                        value: text,
                    })
            })
            .collect()
    }

    pub fn to_complex(&self) -> Result<MorseComplex, ComplexError> {
        let counts = self.signed_counts().expect("validated by parse");
        build_complex(self.dimension, ids(&self.generators), counts)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        pretty(self)
    }
}

pub(crate) fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub source: String,
    pub target: String,
    /// Number of flow lines, or `null` when unknown.
    pub components: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub dimension: usize,
    #[serde(alias = "nodes")]
    pub generators: Vec<GeneratorEntry>,
    pub edges: Vec<EdgeEntry>,
}

impl GraphFile {
    pub fn new(dimension: usize, nodes: &[CriticalPointId], edges: &[FlowEdge]) -> Self {
        Self {
            dimension,
            generators: entries(nodes),
            edges: edges
                .iter()
                .map(|e| EdgeEntry {
                    source: e.source.clone(),
                    target: e.target.clone(),
                    components: e.components,
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_graph(&self) -> Result<FlowGraph, BlowupError> {
        let edges = self
            .edges
            .iter()
            .map(|e| FlowEdge {
                source: e.source.clone(),
                target: e.target.clone(),
                components: e.components,
            })
            .collect();
        FlowGraph::new(ids(&self.generators), edges)
    }

    pub fn to_json(&self) -> String {
        pretty(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SignRuleName {
    #[default]
    Oriented,
    ForcedPositive,
}

/// Run configuration for `morse surface`. Missing fields take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub base_point: Option<[f64; 3]>,
    pub radius: f64,
    pub major_radius: f64,
    pub minor_radius: f64,
    pub grad_tol: f64,
    pub dedup_radius: f64,
    pub degeneracy_tol: f64,
    pub epsilon: f64,
    pub step: f64,
    pub arrival_tol: f64,
    pub seeds_per_chart: usize,
    pub circle_seeds: usize,
    pub max_steps: usize,
    pub newton_max_iter: usize,
    pub on_surface_tol: f64,
    pub sign_rule: SignRuleName,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GeometryConfig::default();
        Self {
            base_point: None,
            radius: 1.0,
            major_radius: 2.0,
            minor_radius: 1.0,
            grad_tol: g.grad_tol,
            dedup_radius: g.dedup_radius,
            degeneracy_tol: g.degeneracy_tol,
            epsilon: g.epsilon,
            step: g.step,
            arrival_tol: g.arrival_tol,
            seeds_per_chart: g.seeds_per_chart,
            circle_seeds: g.circle_seeds,
            max_steps: g.max_steps,
            newton_max_iter: g.newton_max_iter,
            on_surface_tol: g.on_surface_tol,
            sign_rule: SignRuleName::Oriented,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn geometry(&self) -> GeometryConfig {
        GeometryConfig {
            grad_tol: self.grad_tol,
            dedup_radius: self.dedup_radius,
            degeneracy_tol: self.degeneracy_tol,
            epsilon: self.epsilon,
            step: self.step,
            arrival_tol: self.arrival_tol,
            seeds_per_chart: self.seeds_per_chart,
            circle_seeds: self.circle_seeds,
            max_steps: self.max_steps,
            newton_max_iter: self.newton_max_iter,
            on_surface_tol: self.on_surface_tol,
            sign_rule: match self.sign_rule {
                SignRuleName::Oriented => SignRule::Oriented,
                SignRuleName::ForcedPositive => SignRule::ForcedPositive,
            },
        }
    }
}
