use std::path::Path;

use super::{read_text, AnalysisError};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self, AnalysisError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(AnalysisError::Parse {
                line: 0,
                reason: format!("component {i} is not finite"),
            });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch(a.len(), b.len()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(AnalysisError::ZeroNorm);
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedEmbedding {
    pub name: Option<String>,
    pub vector: EmbeddingVector,
}

/// One vector per line as comma-separated decimals, with an optional
/// leading `name:` token. Blank lines and `#` comments are skipped.
pub fn parse_embeddings(text: &str) -> Result<Vec<NamedEmbedding>, AnalysisError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, body) = match line.split_once(':') {
            Some((n, rest)) => (Some(n.trim().to_string()), rest),
            None => (None, line),
        };
        let values = body
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| AnalysisError::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?;
        let vector = EmbeddingVector::new(values).map_err(|e| match e {
            AnalysisError::Parse { reason, .. } => AnalysisError::Parse {
                line: i + 1,
                reason,
            },
            other => other,
        })?;
        out.push(NamedEmbedding { name, vector });
    }
    Ok(out)
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<Vec<NamedEmbedding>, AnalysisError> {
    parse_embeddings(&read_text(path.as_ref())?)
}
