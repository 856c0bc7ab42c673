//! Interaction-log parsing, cleaning, and the canonical edge file format.
//!
//! Raw logs are delimiter-separated records of `actor, object, [value],
//! timestamp`. Cleaning drops low ratings, self-links, and actors with too
//! few surviving interactions, then converts timestamps to days measured
//! from the earliest kept record.
//!
//! The canonical edge file has one `source<TAB>target<TAB>day` line per
//! edge, with the day printed to six decimals.

mod synthetic;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::EdgeList;

pub use synthetic::{attachment_weight, generate_synthetic, SyntheticConfig};

const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeUnit {
    Days,
    #[default]
    EpochSeconds,
}

/// Zero-based column positions of the record fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnMap {
    pub source: usize,
    pub target: usize,
    pub value: Option<usize>,
    pub timestamp: usize,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            source: 0,
            target: 1,
            value: Some(2),
            timestamp: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestConfig {
    /// Records whose value is not strictly greater than this are dropped.
    /// Records without a value always pass.
    pub rating_threshold: f64,
    /// Minimum surviving records per actor, counted after the rating filter.
    pub min_actor_activity: usize,
    pub time_unit: TimeUnit,
    pub exclude_self_links: bool,
    pub delimiter: u8,
    pub has_header: bool,
    pub columns: ColumnMap,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            rating_threshold: 2.0,
            min_actor_activity: 20,
            time_unit: TimeUnit::EpochSeconds,
            exclude_self_links: true,
            delimiter: b',',
            has_header: false,
            columns: ColumnMap::default(),
        }
    }
}

/// One parsed log record before cleaning.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInteraction {
    pub actor: String,
    pub object: String,
    pub value: Option<f64>,
    pub timestamp: f64,
}

impl RawInteraction {
    pub fn new(actor: &str, object: &str, value: Option<f64>, timestamp: f64) -> Self {
        Self {
            actor: actor.to_owned(),
            object: object.to_owned(),
            value,
            timestamp,
        }
    }
}

/// Reads and cleans an interaction log into a time-sorted edge list.
pub fn parse_interactions(path: &Path, config: &IngestConfig) -> Result<EdgeList> {
    let records = read_interactions(path, config)?;
    clean_interactions(records, config)
}

/// Parses every record of a delimiter-separated log without filtering.
pub fn read_interactions(path: &Path, config: &IngestConfig) -> Result<Vec<RawInteraction>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(config.delimiter)
        .has_headers(config.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));

    let cols = config.columns;
    let mut records = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |idx: usize, name: &str| -> Result<&str> {
            record.get(idx).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing {name} column {idx}"),
            })
        };
        let actor = field(cols.source, "source")?;
        let object = field(cols.target, "target")?;
        if actor.is_empty() || object.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty actor or object id".into(),
            });
        }
        let value = match cols.value.and_then(|idx| record.get(idx)) {
            None | Some("") => None,
            Some(raw) => Some(parse_number(raw, "value", line)?),
        };
        let timestamp = parse_number(field(cols.timestamp, "timestamp")?, "timestamp", line)?;
        records.push(RawInteraction::new(actor, object, value, timestamp));
    }
    Ok(records)
}

fn parse_number(raw: &str, what: &str, line: u64) -> Result<f64> {
    match raw.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::Parse {
            line,
            message: format!("{what} {raw:?} is not a finite number"),
        }),
    }
}

/// Applies the rating, self-link and actor-activity filters, converts
/// timestamps to days from the earliest kept record, and sorts by time with
/// ties broken by `(source, target)` id order.
pub fn clean_interactions(records: Vec<RawInteraction>, config: &IngestConfig) -> Result<EdgeList> {
    if config.rating_threshold.is_nan() {
        return Err(Error::invalid("rating threshold is NaN"));
    }
    let mut kept: Vec<RawInteraction> = records
        .into_iter()
        .filter(|r| r.value.is_none_or(|v| v > config.rating_threshold))
        .filter(|r| !(config.exclude_self_links && r.actor == r.object))
        .collect();

    let mut activity: HashMap<&str, usize> = HashMap::new();
    for r in &kept {
        *activity.entry(r.actor.as_str()).or_default() += 1;
    }
    let active: std::collections::HashSet<String> = activity
        .into_iter()
        .filter(|&(_, n)| n >= config.min_actor_activity)
        .map(|(a, _)| a.to_owned())
        .collect();
    kept.retain(|r| active.contains(&r.actor));

    if kept.is_empty() {
        return Err(Error::EmptyDataset(
            "no interactions survive the rating, self-link and activity filters".into(),
        ));
    }

    let origin = kept
        .iter()
        .map(|r| r.timestamp)
        .fold(f64::INFINITY, f64::min);
    let scale = match config.time_unit {
        TimeUnit::Days => 1.0,
        TimeUnit::EpochSeconds => SECONDS_PER_DAY,
    };
    for r in &mut kept {
        r.timestamp = (r.timestamp - origin) / scale;
    }
    kept.sort_by(|a, b| {
        a.timestamp
            .total_cmp(&b.timestamp)
            .then_with(|| a.actor.cmp(&b.actor))
            .then_with(|| a.object.cmp(&b.object))
    });

    Ok(EdgeList::from_named(kept.iter().map(|r| {
        (r.actor.as_str(), r.object.as_str(), r.timestamp)
    })))
}

/// Writes the canonical `source<TAB>target<TAB>day` format.
pub fn write_edges<W: Write>(mut out: W, list: &EdgeList) -> std::io::Result<()> {
    for e in &list.edges {
        writeln!(
            out,
            "{}\t{}\t{:.6}",
            list.ids[e.source as usize], list.ids[e.target as usize], e.time
        )?;
    }
    out.flush()
}

/// Reads a canonical edge file. Blank lines are skipped.
pub fn read_edge_file(path: &Path) -> Result<EdgeList> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_edges(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_edges<R: BufRead>(reader: R) -> Result<EdgeList> {
    let mut triples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::io("<edge stream>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(s), Some(t), Some(day), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Parse {
                line: line_no,
                message: "expected source<TAB>target<TAB>day".into(),
            });
        };
        if s.is_empty() || t.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty node id".into(),
            });
        }
        let day = parse_number(day.trim(), "day", line_no)?;
        if day < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("negative day {day}"),
            });
        }
        triples.push((s.to_owned(), t.to_owned(), day));
    }
    if triples.is_empty() {
        return Err(Error::EmptyDataset("edge file has no edges".into()));
    }
    Ok(EdgeList::from_named(triples))
}

/// Synthetic node names `n0, n1, ...`.
pub(crate) fn numbered_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i}")).collect()
}
