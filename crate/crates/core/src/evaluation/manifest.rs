use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rust_decimal::Decimal;

use super::{read_text, EvalError};

/// Singer gender codes used by the test-set table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gender {
    F,
    M,
    /// Both female and male singers.
    FM,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::F => "F",
            Gender::M => "M",
            Gender::FM => "FM",
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" => Ok(Gender::F),
            "M" => Ok(Gender::M),
            "FM" => Ok(Gender::FM),
            _ => Err(format!("unknown gender code '{s}' (expected F, M or FM)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub technique: String,
    /// Minutes, kept as an exact decimal.
    pub duration_min: Decimal,
    pub gender: Gender,
    pub number: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ManifestTotals {
    pub techniques: usize,
    pub clips: u64,
    pub duration_min: Decimal,
}

impl fmt::Display for ManifestTotals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "techniques={} clips={} duration_min={}",
            self.techniques, self.clips, self.duration_min
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub totals: ManifestTotals,
}

impl Manifest {
    pub fn from_entries(entries: Vec<ManifestEntry>) -> Self {
        let totals = ManifestTotals {
            techniques: entries.len(),
            clips: entries.iter().map(|e| e.number as u64).sum(),
            duration_min: entries.iter().map(|e| e.duration_min).sum(),
        };
        Self { entries, totals }
    }

    /// Comma-separated with the canonical header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("technique,duration_min,gender,number\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.technique, e.duration_min, e.gender, e.number
            ));
        }
        out
    }
}

const HEADER: [&str; 4] = ["technique", "duration_min", "gender", "number"];

/// Parses a manifest table. The delimiter is a tab if the header line
/// contains one, otherwise a comma. Lines starting with `#` are comments.
pub fn parse_manifest(text: &str) -> Result<Manifest, EvalError> {
    let first = text
        .lines()
        .find(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .unwrap_or("");
    let delimiter = if first.contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .comment(Some(b'#'))
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

    let mut entries = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| EvalError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let invalid = |i: usize, reason: String| EvalError::Field {
            line,
            field: HEADER[i],
            reason,
        };

        let technique = row[0].to_string();
        if technique.is_empty() {
            return Err(invalid(0, "empty".into()));
        }
        let duration_min = Decimal::from_str(&row[1]).map_err(|_| {
            invalid(
                1,
                format!("'{}' is not a decimal number of minutes", &row[1]),
            )
        })?;
        if duration_min.is_sign_negative() {
            return Err(invalid(1, format!("{duration_min} is negative")));
        }
        let gender = row[2].parse().map_err(|r| invalid(2, r))?;
        let number = row[3]
            .parse::<u32>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| invalid(3, format!("'{}' is not a positive integer", &row[3])))?;
        entries.push(ManifestEntry {
            technique,
            duration_min,
            gender,
            number,
        });
    }
    Ok(Manifest::from_entries(entries))
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, EvalError> {
    parse_manifest(&read_text(path.as_ref())?)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ManifestFilter {
    /// Case-insensitive technique names; empty keeps all.
    pub techniques: Vec<String>,
    pub gender: Option<Gender>,
}

pub fn select_subset(entries: &[ManifestEntry], filter: &ManifestFilter) -> Manifest {
    let kept = entries
        .iter()
        .filter(|e| {
            filter.techniques.is_empty()
                || filter
                    .techniques
                    .iter()
                    .any(|t| t.trim().eq_ignore_ascii_case(&e.technique))
        })
        .filter(|e| filter.gender.is_none_or(|g| e.gender == g))
        .cloned()
        .collect();
    Manifest::from_entries(kept)
}
