//! Lints brainstormed cognitive maps into well-formed causal diagrams.
//!
//! The pipeline runs [`ingest`] (CSV corpora), [`curation`] (the expert's
//! grouping decisions), [`resolve`] and [`diagram`] (lifting entity
//! assertions to variable-level edges), [`rules`] (the checkers) and
//! [`report`] (text, JSON and DOT output). [`synth`] generates corpora with
//! known planted violations.

pub mod curation;
pub mod diagram;
pub mod ingest;
pub mod model;
pub mod report;
pub mod resolve;
pub mod rules;
pub mod synth;

pub use rules::{lint, lint_diagram, LintRun, LintSettings};
