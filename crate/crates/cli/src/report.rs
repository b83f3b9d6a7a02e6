//! Report data and its plain-text rendering.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use morse_core::{
    broken_pair_cancellation, euler_characteristic, homology, poincare_polynomial, BlowupComplex, HomologyGroup,
    KunnethReport, MorseComplex, SurfaceRun,
};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Number;

fn number(n: &BigInt) -> Number {
    Number::from_str(&n.to_string()).expect("integers are valid JSON numbers")
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixReport {
    pub degree: usize,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomologyRow {
    pub degree: usize,
    pub rank: usize,
    pub torsion: Vec<Number>,
    pub group: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalRow {
    pub label: String,
    pub index: usize,
    pub location: [f64; 3],
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountRow {
    pub source: String,
    pub target: String,
    pub value: Number,
    /// Signs of the individual flow lines, in discovery order.
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceSection {
    pub surface: String,
    pub base_point: [f64; 3],
    pub critical_points: Vec<CriticalRow>,
    pub signed_counts: Vec<CountRow>,
    pub broken_pairs_cancel: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KunnethRow {
    pub degree: usize,
    pub direct_rank: usize,
    pub formula_rank: Option<usize>,
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KunnethSection {
    /// `"agrees"`, `"disagrees"` or `"skipped (torsion)"`.
    pub status: String,
    pub degrees: Vec<KunnethRow>,
}

/// Summary of one complex: generators, matrices and homology.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub dimension: usize,
    pub generators: Vec<Vec<String>>,
    pub boundaries: Vec<MatrixReport>,
    pub homology: Vec<HomologyRow>,
    pub poincare: Vec<u64>,
    pub poincare_text: String,
    pub euler_characteristic: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kunneth: Option<KunnethSection>,
}

pub fn poincare_text(p: &[u64]) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| {
            let coeff = if c == 1 && k > 0 { String::new() } else { c.to_string() };
            match k {
                0 => coeff,
                1 => format!("{coeff}t"),
                _ => format!("{coeff}t^{k}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn homology_rows(h: &[HomologyGroup]) -> Vec<HomologyRow> {
    h.iter()
        .enumerate()
        .map(|(k, g)| HomologyRow {
            degree: k,
            rank: g.free_rank,
            torsion: g.torsion.iter().map(number).collect(),
            group: g.to_string(),
        })
        .collect()
}

impl RunReport {
    pub fn new(command: &str, c: &MorseComplex) -> Self {
        let h = homology(c);
        let poincare = poincare_polynomial(&h);
        let label_list = |k: usize| c.generators(k).iter().map(|g| g.label.clone()).collect::<Vec<_>>();
        let boundaries = (1..=c.dimension())
            .map(|k| {
                let d = c.boundary(k);
                MatrixReport {
                    degree: k,
                    rows: label_list(k - 1),
                    cols: label_list(k),
                    entries: (0..d.rows())
                        .map(|i| (0..d.cols()).map(|j| number(d.get(i, j))).collect())
                        .collect(),
                }
            })
            .collect();
        let chi = euler_characteristic(&poincare);
        Self {
            command: command.into(),
            dimension: c.dimension(),
            generators: (0..=c.dimension()).map(label_list).collect(),
            boundaries,
            homology: homology_rows(&h),
            poincare_text: poincare_text(&poincare),
            poincare,
            euler_characteristic: chi,
            genus: None,
            surface: None,
            kunneth: None,
        }
    }

    pub fn with_surface(mut self, surface: &str, base_point: [f64; 3], run: &SurfaceRun) -> Self {
        let critical_points = run
            .critical_points
            .iter()
            .map(|p| CriticalRow {
                label: p.id.label.clone(),
                index: p.index,
                location: [p.location[0], p.location[1], p.location[2]],
                value: p.value,
            })
            .collect();
        let signed_counts = run
            .complex
            .counts()
            .iter()
            .map(|n| CountRow {
                source: n.source.clone(),
                target: n.target.clone(),
                value: number(&n.value),
                signs: run
                    .flow_lines
                    .iter()
                    .filter(|l| l.source.label == n.source && l.target.label == n.target)
                    .map(|l| l.sign)
                    .collect(),
            })
            .collect();
        self.surface = Some(SurfaceSection {
            surface: surface.into(),
            base_point,
            critical_points,
            signed_counts,
            broken_pairs_cancel: broken_pair_cancellation(&run.complex).passes(),
        });
        self
    }

    pub fn with_kunneth(mut self, k: &KunnethReport) -> Self {
        let status = if k.partial() {
            "skipped (torsion)"
        } else if k.consistent() {
            "agrees"
        } else {
            "disagrees"
        };
        self.kunneth = Some(KunnethSection {
            status: status.into(),
            degrees: k
                .degrees
                .iter()
                .map(|d| KunnethRow {
                    degree: d.degree,
                    direct_rank: d.direct.free_rank,
                    formula_rank: d.formula_rank,
                    agrees: d.agrees(),
                })
                .collect(),
        });
        // formal reading of chi = 2 - 2g
        if self.euler_characteristic % 2 == 0 && self.euler_characteristic <= 2 {
            self.genus = Some((2 - self.euler_characteristic) / 2);
        }
        self
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.homology.iter().map(|h| h.rank).collect()
    }
}

fn write_matrix(f: &mut fmt::Formatter<'_>, m: &MatrixReport) -> fmt::Result {
    writeln!(f, "  d_{} ({} x {})", m.degree, m.rows.len(), m.cols.len())?;
    if m.rows.is_empty() || m.cols.is_empty() {
        return Ok(());
    }
    let cells: Vec<Vec<String>> = m
        .entries
        .iter()
        .map(|r| r.iter().map(|e| e.to_string()).collect())
        .collect();
    let label_w = m.rows.iter().map(String::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..m.cols.len())
        .map(|j| {
            cells
                .iter()
                .map(|r| r[j].len())
                .chain([m.cols[j].len()])
                .max()
                .unwrap_or(1)
        })
        .collect();
    let mut header = format!("    {:label_w$} ", "");
    for (j, c) in m.cols.iter().enumerate() {
        write!(header, " {:>w$}", c, w = widths[j])?;
    }
    writeln!(f, "{}", header.trim_end())?;
    for (i, r) in cells.iter().enumerate() {
        write!(f, "    {:label_w$} ", m.rows[i])?;
        for (j, e) in r.iter().enumerate() {
            write!(f, " {:>w$}", e, w = widths[j])?;
        }
        writeln!(f)?;
    }
    Ok(())
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: complex of dimension {}", self.command, self.dimension)?;
        if let Some(s) = &self.surface {
            writeln!(
                f,
                "\nsurface {} with base point ({}, {}, {})",
                s.surface, s.base_point[0], s.base_point[1], s.base_point[2]
            )?;
            writeln!(f, "critical points")?;
            writeln!(
                f,
                "  {:<8} {:>5} {:>12} {:>12} {:>12} {:>14}",
                "label", "index", "x", "y", "z", "f"
            )?;
            for p in &s.critical_points {
                writeln!(
                    f,
                    "  {:<8} {:>5} {:>12.6} {:>12.6} {:>12.6} {:>14.8}",
                    p.label, p.index, p.location[0], p.location[1], p.location[2], p.value
                )?;
            }
            writeln!(f, "signed counts")?;
            if s.signed_counts.is_empty() {
                writeln!(f, "  none")?;
            }
            for n in &s.signed_counts {
                let signs: Vec<&str> = n.signs.iter().map(|&s| if s > 0 { "+1" } else { "-1" }).collect();
                writeln!(
                    f,
                    "  N({}, {}) = {}  [{}]",
                    n.source,
                    n.target,
                    n.value,
                    signs.join(" ")
                )?;
            }
            writeln!(
                f,
                "broken pairs cancel: {}",
                if s.broken_pairs_cancel { "yes" } else { "no" }
            )?;
        }
        writeln!(f, "\ngenerators")?;
        for (k, g) in self.generators.iter().enumerate() {
            let list = if g.is_empty() { "-".to_string() } else { g.join(" ") };
            writeln!(f, "  degree {k}: {list}")?;
        }
        writeln!(f, "\nboundary matrices")?;
        if self.boundaries.is_empty() {
            writeln!(f, "  none")?;
        }
        for m in &self.boundaries {
            write_matrix(f, m)?;
        }
        writeln!(f, "\nhomology")?;
        writeln!(f, "  {:>6} {:>5}  {:<10} group", "degree", "rank", "torsion")?;
        for h in &self.homology {
            let torsion: Vec<String> = h.torsion.iter().map(|t| t.to_string()).collect();
            let torsion = if torsion.is_empty() {
                "-".into()
            } else {
                torsion.join(",")
            };
            writeln!(f, "  {:>6} {:>5}  {:<10} {}", h.degree, h.rank, torsion, h.group)?;
        }
        writeln!(f, "\npoincare polynomial: P(t) = {}", self.poincare_text)?;
        writeln!(f, "euler characteristic: {}", self.euler_characteristic)?;
        if let Some(k) = &self.kunneth {
            writeln!(f, "\nkunneth check: {}", k.status)?;
            writeln!(f, "  {:>6} {:>6} {:>8}", "degree", "direct", "formula")?;
            for d in &k.degrees {
                let formula = d.formula_rank.map_or("-".to_string(), |r| r.to_string());
                writeln!(f, "  {:>6} {:>6} {:>8}", d.degree, d.direct_rank, formula)?;
            }
        }
        if let Some(g) = self.genus {
            writeln!(f, "genus note: chi = 2 - 2g gives g = {g}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumRow {
    pub chain: Vec<String>,
    pub factor_dims: Vec<usize>,
    pub total_dim: usize,
    pub multiplicity: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairingRow {
    pub point: String,
    pub index: usize,
    pub moduli_dim: usize,
    pub blowup_dim: usize,
    pub strata: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupReport {
    pub point: String,
    pub index: usize,
    pub minimum: String,
    /// Cells of the blow-up by dimension.
    pub cells: Vec<u64>,
    pub closure_cells: Vec<u64>,
    pub euler_sum: i64,
    pub strata: Vec<StratumRow>,
    pub boundary: Vec<PairingRow>,
}

impl BlowupReport {
    pub fn new(b: &BlowupComplex) -> Self {
        Self {
            point: b.base_point.label.clone(),
            index: b.base_point.index,
            minimum: b.minimum.label.clone(),
            cells: b.cells.clone(),
            closure_cells: b.closure_cells.clone(),
            euler_sum: b.euler_sum(),
            strata: b
                .strata
                .iter()
                .map(|s| StratumRow {
                    chain: s.labels().iter().map(|l| l.to_string()).collect(),
                    factor_dims: s.factor_dims.clone(),
                    total_dim: s.total_dim,
                    multiplicity: s.multiplicity,
                })
                .collect(),
            boundary: b
                .boundary_strata
                .iter()
                .map(|e| PairingRow {
                    point: e.point.label.clone(),
                    index: e.point.index,
                    moduli_dim: e.moduli_dim,
                    blowup_dim: e.blowup_dim,
                    strata: e.strata.len(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for BlowupReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "blowup of {} (index {}) down to {}",
            self.point, self.index, self.minimum
        )?;
        writeln!(f, "\ncells by dimension")?;
        writeln!(f, "  {:>3} {:>6}", "dim", "cells")?;
        for (d, n) in self.cells.iter().enumerate() {
            writeln!(f, "  {d:>3} {n:>6}")?;
        }
        let histogram: Vec<String> = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(d, n)| format!("{d}:{n}"))
            .collect();
        writeln!(f, "  histogram {{{}}}", histogram.join(", "))?;
        writeln!(f, "euler sum of the disk: {}", self.euler_sum)?;
        writeln!(f, "\nstrata of the closed moduli space")?;
        if self.strata.is_empty() {
            writeln!(f, "  none")?;
        }
        for s in &self.strata {
            let mult = s.multiplicity.map_or("-".to_string(), |m| m.to_string());
            writeln!(
                f,
                "  {:<24} dim {}  multiplicity {}",
                s.chain.join(" > "),
                s.total_dim,
                mult
            )?;
        }
        writeln!(f, "\nboundary pairings")?;
        if self.boundary.is_empty() {
            writeln!(f, "  none")?;
        } else {
            writeln!(
                f,
                "  {:<10} {:>5} {:>10} {:>10} {:>6}",
                "point", "index", "dim M(p,q)", "dim E(q)", "sum"
            )?;
        }
        for e in &self.boundary {
            writeln!(
                f,
                "  {:<10} {:>5} {:>10} {:>10} {:>6}",
                e.point,
                e.index,
                e.moduli_dim,
                e.blowup_dim,
                e.moduli_dim + e.blowup_dim
            )?;
        }
        Ok(())
    }
}
