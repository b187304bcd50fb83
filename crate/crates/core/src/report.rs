//! Report rendering: compiler-style text, canonical JSON, Graphviz DOT, and
//! the process exit status.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{CausalDiagram, Code, Diagnostic, EdgeKind, NodeKind, Severity};

pub const TOOL_VERSION: &str = concat!("cogmaplint ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("report summary does not match its diagnostics")]
    SummaryMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    /// Lowercase hex SHA-256 of the file contents.
    pub digest: String,
}

impl InputDigest {
    pub fn of(path: impl Into<String>, contents: &[u8]) -> Self {
        InputDigest {
            path: path.into(),
            digest: hex::encode(Sha256::digest(contents)),
        }
    }
}

/// Diagnostic tallies. Every code and severity is present, zeros included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub by_code: BTreeMap<String, usize>,
    pub by_severity: BTreeMap<String, usize>,
}

impl Summary {
    pub fn tally(diagnostics: &[Diagnostic]) -> Self {
        let mut by_code: BTreeMap<String, usize> = Code::ALL
            .iter()
            .map(|c| (c.as_str().to_string(), 0))
            .collect();
        let mut by_severity: BTreeMap<String, usize> = Severity::ALL
            .iter()
            .map(|s| (s.as_str().to_string(), 0))
            .collect();
        for d in diagnostics {
            *by_code.entry(d.code.as_str().to_string()).or_default() += 1;
            *by_severity
                .entry(d.severity().as_str().to_string())
                .or_default() += 1;
        }
        Summary {
            by_code,
            by_severity,
        }
    }

    pub fn count(&self, severity: Severity) -> usize {
        self.by_severity
            .get(severity.as_str())
            .copied()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    pub diagnostics: Vec<Diagnostic>,
    pub summary: Summary,
    /// Messages about the run itself, such as bounded cycle enumeration.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notices: Vec<String>,
}

impl ReportDocument {
    pub fn new(
        inputs: Vec<InputDigest>,
        diagnostics: Vec<Diagnostic>,
        notices: Vec<String>,
    ) -> Self {
        ReportDocument {
            tool_version: TOOL_VERSION.to_string(),
            inputs,
            summary: Summary::tally(&diagnostics),
            diagnostics,
            notices,
        }
    }
}

/// Compact JSON with object keys sorted, followed by a newline.
pub fn render_json(doc: &ReportDocument) -> String {
    // serde_json::Value keeps object keys in a BTreeMap, which sorts them
    let value = serde_json::to_value(doc).expect("report is serializable");
    let mut out = value.to_string();
    out.push('\n');
    out
}

pub fn parse_json(text: &str) -> Result<ReportDocument, ReportError> {
    let doc: ReportDocument = serde_json::from_str(text)?;
    if doc.summary != Summary::tally(&doc.diagnostics) {
        return Err(ReportError::SummaryMismatch);
    }
    Ok(doc)
}

/// One line per diagnostic, `severity[CODE] message (subjects) — suggestion`,
/// then notices and a summary footer.
pub fn render_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    for d in &doc.diagnostics {
        let _ = write!(
            out,
            "{}[{}] {} ({})",
            d.severity(),
            d.code,
            d.message,
            d.subjects.join(", ")
        );
        if let Some(s) = &d.suggestion {
            let _ = write!(out, " — {s}");
        }
        out.push('\n');
    }
    for n in &doc.notices {
        let _ = writeln!(out, "notice: {n}");
    }
    let plural = |n: usize, word: &str| {
        if n == 1 {
            format!("{n} {word}")
        } else {
            format!("{n} {word}s")
        }
    };
    let _ = writeln!(
        out,
        "summary: {}, {}, {}",
        plural(doc.summary.count(Severity::Error), "error"),
        plural(doc.summary.count(Severity::Warning), "warning"),
        plural(doc.summary.count(Severity::Info), "info")
    );
    out
}

/// 0 when clean, 1 when any error (or, with `warnings_as_errors`, any
/// warning) is present.
pub fn exit_status(doc: &ReportDocument, warnings_as_errors: bool) -> i32 {
    let failing = doc.diagnostics.iter().any(|d| match d.severity() {
        Severity::Error => true,
        Severity::Warning => warnings_as_errors,
        Severity::Info => false,
    });
    i32::from(failing)
}

/// DOT double-quoted string.
fn dot_id(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 2);
    out.push('"');
    for c in name.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn edge_style(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::VariableCausal => "solid",
        EdgeKind::ArtificialCausal => "dashed",
        EdgeKind::Membership => "dotted",
    }
}

/// Graphviz export: one statement per node, edge and self-loop.
/// Self-loops are drawn in red.
pub fn render_dot(diagram: &CausalDiagram) -> String {
    let mut out = String::from("digraph causal_diagram {\n");
    for name in diagram.node_names() {
        let attrs = match diagram.node_kind(name) {
            Some(NodeKind::Artificial) => "shape=box, style=dashed",
            _ => "shape=ellipse",
        };
        let _ = writeln!(out, "    {} [{attrs}];", dot_id(name));
    }
    for edge in diagram.edges() {
        let _ = writeln!(
            out,
            "    {} -> {} [style={}];",
            dot_id(&edge.src),
            dot_id(&edge.dst),
            edge_style(edge.kind)
        );
    }
    for (node, _) in diagram.self_loops() {
        let kind = match diagram.node_kind(node) {
            Some(NodeKind::Artificial) => EdgeKind::ArtificialCausal,
            _ => EdgeKind::VariableCausal,
        };
        let _ = writeln!(
            out,
            "    {} -> {} [style={}, color=red];",
            dot_id(node),
            dot_id(node),
            edge_style(kind)
        );
    }
    out.push_str("}\n");
    out
}
