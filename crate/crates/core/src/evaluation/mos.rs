use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use super::{read_text, Dimension, EvalError, ListenerGroup, RatingRecord};
use crate::analysis::{cosine_similarity, read_embeddings, AnalysisError, EmbeddingVector};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.96;

/// Mean opinion score with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MosCell {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n: usize,
    /// Set when `n == 1` and the half-width is reported as zero.
    pub single_rating: bool,
}

impl MosCell {
    /// `"m.mm ± c.cc"`
    pub fn render(&self) -> String {
        format!("{:.2} ± {:.2}", self.mean, self.ci_halfwidth)
    }
}

/// Arithmetic mean and `1.96 * s / sqrt(n)` with the `n - 1` sample
/// standard deviation.
pub fn mos_with_ci(scores: &[u8]) -> Result<MosCell, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyScores);
    }
    if let Some(&bad) = scores.iter().find(|s| !(1..=5).contains(*s)) {
        return Err(EvalError::ScoreOutOfRange(bad));
    }
    let n = scores.len();
    let mean = scores.iter().map(|&s| s as f64).sum::<f64>() / n as f64;
    if n == 1 {
        return Ok(MosCell {
            mean,
            ci_halfwidth: 0.0,
            n,
            single_rating: true,
        });
    }
    let ss: f64 = scores.iter().map(|&s| (s as f64 - mean).powi(2)).sum();
    let sd = (ss / (n - 1) as f64).sqrt();
    Ok(MosCell {
        mean,
        ci_halfwidth: Z_95 * sd / (n as f64).sqrt(),
        n,
        single_rating: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPair {
    pub system: String,
    pub converted: EmbeddingVector,
    pub reference: EmbeddingVector,
}

/// Parses `system,converted_path,reference_path` lines. Relative paths are
/// resolved against `base_dir`. When an embedding file holds several
/// vectors, the two files are paired vector by vector.
pub fn parse_embedding_pairs(text: &str, base_dir: &Path) -> Result<Vec<EmbeddingPair>, EvalError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [system, converted, reference] = fields[..] else {
            return Err(EvalError::Malformed {
                line: (i + 1) as u64,
                reason: "expected system,converted_embedding_path,reference_embedding_path".into(),
            });
        };
        let load = |p: &str| {
            read_embeddings(base_dir.join(p)).map_err(|source| EvalError::Embedding {
                line: i + 1,
                source,
            })
        };
        let (conv, refs) = (load(converted)?, load(reference)?);
        if conv.len() != refs.len() || conv.is_empty() {
            return Err(EvalError::Embedding {
                line: i + 1,
                source: AnalysisError::LengthMismatch(conv.len(), refs.len()),
            });
        }
        for (c, r) in conv.into_iter().zip(refs) {
            out.push(EmbeddingPair {
                system: system.to_string(),
                converted: c.vector,
                reference: r.vector,
            });
        }
    }
    Ok(out)
}

pub fn load_embedding_pairs(path: impl AsRef<Path>) -> Result<Vec<EmbeddingPair>, EvalError> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_embedding_pairs(&read_text(path)?, base)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pooling {
    /// Ordinary and professional listeners weighted equally per rating.
    #[default]
    AllListeners,
    ByGroup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub system: String,
    pub group: Option<ListenerGroup>,
    pub cells: [MosCell; 4],
    pub cos_sim: Option<f64>,
    pub cos_sim_pairs: usize,
}

impl ReportRow {
    pub fn label(&self) -> String {
        match self.group {
            Some(g) => format!("{} [{g}]", self.system),
            None => self.system.clone(),
        }
    }

    pub fn cell(&self, dimension: Dimension) -> &MosCell {
        &self.cells[dimension.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MosReport {
    pub rows: Vec<ReportRow>,
}

/// One row per system (or per system and listener group), four MOS cells in
/// column order, plus the mean cosine similarity over the system's
/// embedding pairs. `systems_order` selects and orders systems; when empty,
/// systems appear in first-seen order.
pub fn aggregate_report(
    records: &[RatingRecord],
    systems_order: &[String],
    embedding_pairs: &[EmbeddingPair],
    pooling: Pooling,
) -> Result<MosReport, EvalError> {
    let systems: Vec<String> = if systems_order.is_empty() {
        let mut seen = Vec::new();
        for r in records {
            if !seen.contains(&r.system) {
                seen.push(r.system.clone());
            }
        }
        seen
    } else {
        systems_order.to_vec()
    };

    let groups: Vec<Option<ListenerGroup>> = match pooling {
        Pooling::AllListeners => vec![None],
        Pooling::ByGroup => ListenerGroup::ALL.into_iter().map(Some).collect(),
    };

    let mut buckets: BTreeMap<(&str, Option<ListenerGroup>, Dimension), Vec<u8>> = BTreeMap::new();
    for r in records {
        let group = match pooling {
            Pooling::AllListeners => None,
            Pooling::ByGroup => Some(r.listener_group),
        };
        buckets
            .entry((r.system.as_str(), group, r.dimension))
            .or_default()
            .push(r.score);
    }

    let mut sims: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (i, pair) in embedding_pairs.iter().enumerate() {
        let s = cosine_similarity(&pair.converted, &pair.reference).map_err(|source| {
            EvalError::Embedding {
                line: i + 1,
                source,
            }
        })?;
        sims.entry(pair.system.as_str()).or_default().push(s);
    }

    let mut gaps = Vec::new();
    let mut rows = Vec::new();
    for system in &systems {
        for &group in &groups {
            let mut cells = Vec::with_capacity(4);
            for dim in Dimension::ALL {
                match buckets.get(&(system.as_str(), group, dim)) {
                    Some(scores) => {
                        let cell = mos_with_ci(scores)?;
                        if cell.single_rating {
                            warn!(
                                "({system}, {dim}) has a single rating; half-width reported as 0"
                            );
                        }
                        cells.push(cell);
                    }
                    None => {
                        let label = match group {
                            Some(g) => format!("{system} [{g}]"),
                            None => system.clone(),
                        };
                        gaps.push((label, dim));
                    }
                }
            }
            if cells.len() == 4 {
                let s = sims.get(system.as_str());
                rows.push(ReportRow {
                    system: system.clone(),
                    group,
                    cells: cells.try_into().expect("four cells"),
                    cos_sim: s.map(|v| v.iter().sum::<f64>() / v.len() as f64),
                    cos_sim_pairs: s.map_or(0, Vec::len),
                });
            }
        }
    }
    if !gaps.is_empty() {
        return Err(EvalError::MissingCells(gaps));
    }
    Ok(MosReport { rows })
}

fn pad(s: &str, width: usize) -> String {
    let len = s.chars().count();
    format!("{s}{}", " ".repeat(width.saturating_sub(len)))
}

impl MosReport {
    pub fn header() -> Vec<&'static str> {
        let mut h = vec!["Approach"];
        h.extend(Dimension::ALL.map(Dimension::title));
        h.push("Cos.Sim");
        h
    }

    /// Rendered cells for one row, in column order.
    pub fn row_cells(row: &ReportRow) -> Vec<String> {
        let mut cells = vec![row.label()];
        cells.extend(row.cells.iter().map(MosCell::render));
        cells.push(
            row.cos_sim
                .map_or_else(|| "-".to_string(), |s| format!("{s:.4}")),
        );
        cells
    }

    /// Aligned plain-text table.
    pub fn render_text(&self) -> String {
        let header = Self::header();
        let body: Vec<Vec<String>> = self.rows.iter().map(Self::row_cells).collect();
        let widths: Vec<usize> = (0..header.len())
            .map(|c| {
                body.iter()
                    .map(|r| r[c].chars().count())
                    .chain([header[c].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();

        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| pad(c, w))
                .collect::<Vec<_>>()
                .join(" | ")
                .trim_end()
                .to_string()
        };
        let mut out = String::new();
        let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "{}", line(&header));
        let _ = writeln!(
            out,
            "{}",
            widths
                .iter()
                .map(|&w| "-".repeat(w))
                .collect::<Vec<_>>()
                .join("-+-")
        );
        for row in &body {
            let _ = writeln!(out, "{}", line(row));
        }
        out
    }

    /// Machine-readable CSV with unrounded statistics.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("system,group");
        for d in Dimension::ALL {
            let _ = write!(out, ",{d}_mean,{d}_ci,{d}_n");
        }
        out.push_str(",cos_sim,cos_sim_pairs\n");
        for row in &self.rows {
            let _ = write!(
                out,
                "{},{}",
                row.system,
                row.group.map_or("all", ListenerGroup::as_str)
            );
            for c in &row.cells {
                let _ = write!(out, ",{},{},{}", c.mean, c.ci_halfwidth, c.n);
            }
            match row.cos_sim {
                Some(s) => {
                    let _ = writeln!(out, ",{s},{}", row.cos_sim_pairs);
                }
                None => {
                    let _ = writeln!(out, ",,0");
                }
            }
        }
        out
    }
}
