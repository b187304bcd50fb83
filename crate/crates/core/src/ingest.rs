//! Readers and writers for the two corpus tables.
//!
//! `map.csv` has the header `index,text_entity,cluster` and lists the
//! cognitive-map entities; multi-cluster cells separate names with `&`.
//! `relations.csv` has the header `cause,effect,cluster` and lists the
//! entity-level assertions. Both are comma separated with standard quoting.
//! Labels are kept verbatim apart from trimming.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{EntityAssertion, EntitySource, TextEntity};

pub const MAP_HEADER: [&str; 3] = ["index", "text_entity", "cluster"];
pub const RELATIONS_HEADER: [&str; 3] = ["cause", "effect", "cluster"];

/// Cell value meaning "no cluster".
const NO_CLUSTER: &str = "NA";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: expected header `{expected}`, found `{found}`")]
    Header {
        line: u64,
        expected: String,
        found: String,
    },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: duplicate index {id}")]
    DuplicateIndex { line: u64, id: u32 },
    #[error("line {line}: {source}")]
    Csv { line: u64, source: csv::Error },
    #[error("missing header row")]
    Empty,
}

impl IngestError {
    pub fn line(&self) -> Option<u64> {
        match self {
            IngestError::Header { line, .. }
            | IngestError::Row { line, .. }
            | IngestError::DuplicateIndex { line, .. }
            | IngestError::Csv { line, .. } => Some(*line),
            IngestError::Empty => None,
        }
    }
}

/// Parsed corpus: entities and assertions in file order, plus the names of
/// the files they came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusBundle {
    pub entities: Vec<TextEntity>,
    pub assertions: Vec<EntityAssertion>,
    pub sources: Vec<String>,
}

impl CorpusBundle {
    /// Appends the entities of one map file. Ids must stay unique across
    /// every map added so far.
    pub fn add_map(&mut self, name: &str, text: &str) -> Result<(), IngestError> {
        let entities = parse_cognitive_map(text)?;
        let mut seen: BTreeSet<u32> = self.entities.iter().map(|e| e.id).collect();
        for (row, e) in entities.iter().enumerate() {
            if !seen.insert(e.id) {
                return Err(IngestError::DuplicateIndex {
                    line: row as u64 + 2,
                    id: e.id,
                });
            }
        }
        self.entities.extend(entities);
        self.sources.push(name.to_string());
        Ok(())
    }

    pub fn add_relations(&mut self, name: &str, text: &str) -> Result<(), IngestError> {
        self.assertions.extend(parse_assertions(text)?);
        self.sources.push(name.to_string());
        Ok(())
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

/// Iterates data records with their 1-based line numbers after checking
/// the header row.
fn records(text: &str, header: [&str; 3]) -> Result<Vec<(u64, csv::StringRecord)>, IngestError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    // the csv reader skips blank lines without counting them
    let line_at = |byte: u64| {
        let bytes = text.as_bytes();
        let mut start = byte as usize;
        while start < bytes.len() && matches!(bytes[start], b'\n' | b'\r') {
            start += 1;
        }
        bytes[..start].iter().filter(|b| **b == b'\n').count() as u64 + 1
    };
    let mut rdr = reader(text);
    let mut out = Vec::new();
    let mut header_seen = false;
    let mut record = csv::StringRecord::new();
    loop {
        let line = line_at(rdr.position().byte());
        let more = rdr
            .read_record(&mut record)
            .map_err(|source| IngestError::Csv { line, source })?;
        if !more {
            break;
        }
        let line = record.position().map_or(line, |p| line_at(p.byte()));
        if !header_seen {
            let found: Vec<&str> = record.iter().map(str::trim).collect();
            if found != header {
                return Err(IngestError::Header {
                    line,
                    expected: header.join(","),
                    found: found.join(","),
                });
            }
            header_seen = true;
            continue;
        }
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() != 3 {
            return Err(IngestError::Row {
                line,
                message: format!("expected 3 columns, found {}", record.len()),
            });
        }
        out.push((line, record.clone()));
    }
    if !header_seen {
        return Err(IngestError::Empty);
    }
    Ok(out)
}

pub fn split_clusters(cell: &str) -> BTreeSet<String> {
    let cell = cell.trim();
    if cell.is_empty() || cell == NO_CLUSTER {
        return BTreeSet::new();
    }
    cell.split('&')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn parse_cognitive_map(text: &str) -> Result<Vec<TextEntity>, IngestError> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for (line, rec) in records(text, MAP_HEADER)? {
        let raw_id = rec[0].trim();
        let id: u32 = raw_id
            .parse()
            .ok()
            .filter(|id| *id > 0)
            .ok_or_else(|| IngestError::Row {
                line,
                message: format!("index `{raw_id}` is not a positive integer"),
            })?;
        let label = rec[1].trim();
        if label.is_empty() {
            return Err(IngestError::Row {
                line,
                message: "empty text_entity".into(),
            });
        }
        if !ids.insert(id) {
            return Err(IngestError::DuplicateIndex { line, id });
        }
        out.push(TextEntity {
            id,
            label: label.to_string(),
            clusters: split_clusters(&rec[2]),
            source: EntitySource::CognitiveMap,
        });
    }
    Ok(out)
}

pub fn parse_assertions(text: &str) -> Result<Vec<EntityAssertion>, IngestError> {
    records(text, RELATIONS_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            EntityAssertion::new(rec[0].trim(), rec[1].trim(), rec[2].trim()).map_err(|_| {
                IngestError::Row {
                    line,
                    message: "cause and effect must not be empty".into(),
                }
            })
        })
        .collect()
}

fn write_rows<'a>(header: [&str; 3], rows: impl Iterator<Item = [String; 3]> + 'a) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

pub fn write_cognitive_map(entities: &[TextEntity]) -> String {
    write_rows(
        MAP_HEADER,
        entities.iter().map(|e| {
            let clusters = if e.clusters.is_empty() {
                NO_CLUSTER.to_string()
            } else {
                e.clusters.iter().cloned().collect::<Vec<_>>().join(" & ")
            };
            [e.id.to_string(), e.label.clone(), clusters]
        }),
    )
}

pub fn write_assertions(assertions: &[EntityAssertion]) -> String {
    write_rows(
        RELATIONS_HEADER,
        assertions
            .iter()
            .map(|a| [a.cause.clone(), a.effect.clone(), a.cluster.clone()]),
    )
}
