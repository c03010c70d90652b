//! Readers for the three UCI datasets and a plain ±1 CSV format.
//!
//! The CSV format has the label first, then the features, all `1` or `-1`,
//! no header.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::types::{BinaryPoint, Provenance, SampleDataset};

pub const VOTE_FILE: &str = "house-votes-84.data";
pub const SPECT_TRAIN_FILE: &str = "SPECT.train";
pub const SPECT_TEST_FILE: &str = "SPECT.test";
pub const KRKP_FILE: &str = "kr-vs-kp.data";

const VOTE_ATTRS: usize = 16;
const SPECT_ATTRS: usize = 22;
const KRKP_ATTRS: usize = 36;
/// Zero-based index of the three-valued chess attribute that is discarded.
const KRKP_DROPPED: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatasetId {
    Vote,
    Spect,
    Krkp,
}

impl DatasetId {
    pub const ALL: [DatasetId; 3] = [DatasetId::Vote, DatasetId::Spect, DatasetId::Krkp];

    pub fn name(self) -> &'static str {
        match self {
            Self::Vote => "vote",
            Self::Spect => "spect",
            Self::Krkp => "krkp",
        }
    }

    /// Reads the dataset from its canonical file name(s) under `dir`.
    pub fn load(self, dir: &Path) -> Result<SampleDataset> {
        match self {
            Self::Vote => parse_vote(&dir.join(VOTE_FILE)),
            Self::Spect => parse_spect(&dir.join(SPECT_TRAIN_FILE), &dir.join(SPECT_TEST_FILE)),
            Self::Krkp => parse_krkp(&dir.join(KRKP_FILE)),
        }
    }
}

impl std::str::FromStr for DatasetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vote" => Ok(Self::Vote),
            "spect" => Ok(Self::Spect),
            "krkp" | "kr-vs-kp" => Ok(Self::Krkp),
            other => Err(Error::Config(format!("unknown dataset '{other}'"))),
        }
    }
}

impl std::fmt::Display for DatasetId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

/// Non-blank lines with their 1-based line numbers, fields trimmed.
fn records(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').map(|f| f.trim().to_string()).collect()))
        .collect())
}

fn expect_fields(path: &Path, line: usize, fields: &[String], want: usize) -> Result<()> {
    if fields.len() != want {
        return Err(parse_err(path, line, format!("expected {want} fields, found {}", fields.len())));
    }
    Ok(())
}

fn point(path: &Path, line: usize, features: Vec<i8>, label: i8) -> Result<BinaryPoint> {
    BinaryPoint::new(features, label).map_err(|e| parse_err(path, line, e.to_string()))
}

fn finish(points: Vec<BinaryPoint>, provenance: Provenance) -> Result<SampleDataset> {
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    SampleDataset::new(points, provenance)
}

/// Congressional voting records. Rows with any `?` are dropped; `y` is `+1`,
/// `n` is `-1`; democrats are the positive class.
pub fn parse_vote(path: &Path) -> Result<SampleDataset> {
    let mut points = Vec::new();
    for (line, fields) in records(path)? {
        expect_fields(path, line, &fields, VOTE_ATTRS + 1)?;
        let label = match fields[0].as_str() {
            "democrat" => 1,
            "republican" => -1,
            other => return Err(parse_err(path, line, format!("unknown class '{other}'"))),
        };
        if fields[1..].iter().any(|f| f == "?") {
            continue;
        }
        let features = fields[1..]
            .iter()
            .map(|f| match f.as_str() {
                "y" => Ok(1),
                "n" => Ok(-1),
                other => Err(parse_err(path, line, format!("unknown vote '{other}'"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        points.push(point(path, line, features, label)?);
    }
    finish(points, Provenance::new("vote", "rows with '?' dropped; y=+1 n=-1; democrat=+1"))
}

fn spect_rows(path: &Path, points: &mut Vec<BinaryPoint>) -> Result<()> {
    for (line, fields) in records(path)? {
        expect_fields(path, line, &fields, SPECT_ATTRS + 1)?;
        let values = fields
            .iter()
            .map(|f| match f.as_str() {
                "1" => Ok(1),
                "0" => Ok(-1),
                other => Err(parse_err(path, line, format!("non-binary value '{other}'"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        points.push(point(path, line, values[1..].to_vec(), values[0])?);
    }
    Ok(())
}

/// SPECT heart data: the train and test files concatenated, every `0`
/// (attributes and label) mapped to `-1`.
pub fn parse_spect(train: &Path, test: &Path) -> Result<SampleDataset> {
    let mut points = Vec::new();
    spect_rows(train, &mut points)?;
    spect_rows(test, &mut points)?;
    finish(points, Provenance::new("spect", "train+test concatenated; 0 -> -1"))
}

/// Chess endgame (king-rook vs king-pawn). Attribute 15 (`b`/`n`/`w`) is
/// dropped; `f`, `n`, `g` map to `+1` and `t`, `l` to `-1`; `won` is positive.
pub fn parse_krkp(path: &Path) -> Result<SampleDataset> {
    let mut points = Vec::new();
    for (line, fields) in records(path)? {
        expect_fields(path, line, &fields, KRKP_ATTRS + 1)?;
        if !matches!(fields[KRKP_DROPPED].as_str(), "b" | "n" | "w") {
            return Err(parse_err(
                path,
                line,
                format!("attribute 15 should be b/n/w, found '{}'", fields[KRKP_DROPPED]),
            ));
        }
        let features = fields[..KRKP_ATTRS]
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != KRKP_DROPPED)
            .map(|(_, f)| match f.as_str() {
                "f" | "n" | "g" => Ok(1),
                "t" | "l" => Ok(-1),
                other => Err(parse_err(path, line, format!("unmapped token '{other}'"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        let label = match fields[KRKP_ATTRS].as_str() {
            "won" => 1,
            "nowin" => -1,
            other => return Err(parse_err(path, line, format!("unknown class '{other}'"))),
        };
        points.push(point(path, line, features, label)?);
    }
    finish(points, Provenance::new("krkp", "attribute 15 dropped; f/n/g=+1 t/l=-1; won=+1"))
}

/// Reads a label-first ±1 CSV.
pub fn read_dataset_csv(path: &Path) -> Result<SampleDataset> {
    let mut points = Vec::new();
    for (line, fields) in records(path)? {
        if fields.len() < 2 {
            return Err(parse_err(path, line, "need a label and at least one feature"));
        }
        let values = fields
            .iter()
            .map(|f| match f.as_str() {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(parse_err(path, line, format!("expected 1 or -1, found '{other}'"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        points.push(point(path, line, values[1..].to_vec(), values[0])?);
    }
    if let Some(first) = points.first() {
        let n = first.dim();
        if let Some(bad) = points.iter().position(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: points[bad].dim() });
        }
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    finish(points, Provenance::new(name, "csv"))
}

pub fn write_dataset_csv<W: Write>(s: &SampleDataset, out: &mut W) -> Result<()> {
    for p in s.points() {
        write!(out, "{}", p.label())?;
        for x in p.features() {
            write!(out, ",{x}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn save_dataset_csv(s: &SampleDataset, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_dataset_csv(s, &mut out)?;
    out.flush()?;
    Ok(())
}

/// `data/uci` relative to the workspace root, for tests and examples.
pub fn default_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/uci")
}
