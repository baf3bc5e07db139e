use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{read_text, EvalError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ListenerGroup {
    Ordinary,
    Professional,
}

impl ListenerGroup {
    pub const ALL: [ListenerGroup; 2] = [ListenerGroup::Ordinary, ListenerGroup::Professional];

    pub fn as_str(self) -> &'static str {
        match self {
            ListenerGroup::Ordinary => "ordinary",
            ListenerGroup::Professional => "professional",
        }
    }
}

impl fmt::Display for ListenerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ListenerGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ListenerGroup::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| format!("unknown listener group '{s}' (expected ordinary|professional)"))
    }
}

/// The four subjective rating dimensions, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    VocalNaturalness,
    BiteReproduction,
    TechniqueReproduction,
    ToneSimilarity,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::VocalNaturalness,
        Dimension::BiteReproduction,
        Dimension::TechniqueReproduction,
        Dimension::ToneSimilarity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::VocalNaturalness => "vocal_naturalness",
            Dimension::BiteReproduction => "bite_reproduction",
            Dimension::TechniqueReproduction => "technique_reproduction",
            Dimension::ToneSimilarity => "tone_similarity",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Dimension::VocalNaturalness => "Vocal naturalness",
            Dimension::BiteReproduction => "Bite reproduction",
            Dimension::TechniqueReproduction => "Technique reproduction",
            Dimension::ToneSimilarity => "Tone similarity",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown dimension '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingRecord {
    pub listener_id: String,
    pub listener_group: ListenerGroup,
    pub system: String,
    pub clip_id: String,
    pub dimension: Dimension,
    pub score: u8,
}

const HEADER: [&str; 6] = [
    "listener_id",
    "listener_group",
    "system",
    "clip_id",
    "dimension",
    "score",
];

/// Parses a ratings CSV. Errors carry the 1-based line number in the file.
pub fn parse_ratings(text: &str) -> Result<Vec<RatingRecord>, EvalError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| EvalError::Malformed {
        line: 1,
        reason: e.to_string(),
    })?;
    if headers.iter().ne(HEADER) {
        return Err(EvalError::Header {
            expected: HEADER.join(","),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| EvalError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<&str, EvalError> {
            let v = &row[i];
            if v.is_empty() {
                Err(EvalError::Field {
                    line,
                    field: HEADER[i],
                    reason: "empty".into(),
                })
            } else {
                Ok(v)
            }
        };
        let invalid = |i: usize, reason: String| EvalError::Field {
            line,
            field: HEADER[i],
            reason,
        };

        let listener_group = field(1)?.parse().map_err(|r| invalid(1, r))?;
        let dimension = field(4)?.parse().map_err(|r| invalid(4, r))?;
        let raw_score = field(5)?;
        let score = raw_score
            .parse::<u8>()
            .ok()
            .filter(|s| (1..=5).contains(s))
            .ok_or_else(|| invalid(5, format!("'{raw_score}' is not an integer in 1..=5")))?;
        out.push(RatingRecord {
            listener_id: field(0)?.to_string(),
            listener_group,
            system: field(2)?.to_string(),
            clip_id: field(3)?.to_string(),
            dimension,
            score,
        });
    }
    Ok(out)
}

pub fn load_ratings(path: impl AsRef<Path>) -> Result<Vec<RatingRecord>, EvalError> {
    parse_ratings(&read_text(path.as_ref())?)
}
