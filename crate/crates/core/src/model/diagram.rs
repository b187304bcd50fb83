use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ArtificialNode, CausalVariable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("unknown node `{0}`")]
    UnknownEndpoint(String),
    #[error("node name `{0}` is used more than once")]
    DuplicateNode(String),
    #[error("invalid diagram JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    VariableCausal,
    ArtificialCausal,
    Membership,
}

impl EdgeKind {
    pub fn is_causal(self) -> bool {
        !matches!(self, EdgeKind::Membership)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::VariableCausal => "variable-causal",
            EdgeKind::ArtificialCausal => "artificial-causal",
            EdgeKind::Membership => "membership",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Variable,
    Artificial,
}

/// One supporting entity-level assertion: its position in the corpus plus
/// the canonical labels its endpoints resolved to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AssertionRef {
    pub index: usize,
    pub cause: String,
    pub effect: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramEdge {
    pub src: String,
    pub dst: String,
    pub kind: EdgeKind,
    pub provenance: BTreeSet<AssertionRef>,
}

impl DiagramEdge {
    pub fn new(
        src: impl Into<String>,
        dst: impl Into<String>,
        kind: EdgeKind,
        provenance: impl IntoIterator<Item = AssertionRef>,
    ) -> Self {
        DiagramEdge {
            src: src.into(),
            dst: dst.into(),
            kind,
            provenance: provenance.into_iter().collect(),
        }
    }
}

impl fmt::Display for DiagramEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.src, self.dst)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct EdgeKey {
    src: String,
    dst: String,
    kind: EdgeKind,
}

/// Variable-level causal diagram: typed nodes and typed edges carrying the
/// assertions that justify them.
///
/// Edges are not validated on insertion beyond endpoint existence, so a
/// hand-edited diagram loaded from JSON may break the typing invariants;
/// the rule-3 checker reports those.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CausalDiagram {
    variables: BTreeMap<String, CausalVariable>,
    artificials: BTreeMap<String, ArtificialNode>,
    edges: BTreeMap<EdgeKey, BTreeSet<AssertionRef>>,
    self_loops: BTreeMap<String, BTreeSet<AssertionRef>>,
}

impl CausalDiagram {
    pub fn new(
        variables: impl IntoIterator<Item = CausalVariable>,
        artificials: impl IntoIterator<Item = ArtificialNode>,
    ) -> Result<Self, DiagramError> {
        let mut diagram = CausalDiagram::default();
        for var in variables {
            if diagram.variables.contains_key(&var.name) {
                return Err(DiagramError::DuplicateNode(var.name));
            }
            diagram.variables.insert(var.name.clone(), var);
        }
        for art in artificials {
            if diagram.variables.contains_key(&art.name)
                || diagram.artificials.contains_key(&art.name)
            {
                return Err(DiagramError::DuplicateNode(art.name));
            }
            diagram.artificials.insert(art.name.clone(), art);
        }
        Ok(diagram)
    }

    /// Inserts `edge`, or unions its provenance into an existing edge with
    /// the same `(src, dst, kind)`.
    pub fn add_edge(&mut self, edge: DiagramEdge) -> Result<(), DiagramError> {
        for end in [&edge.src, &edge.dst] {
            if self.node_kind(end).is_none() {
                return Err(DiagramError::UnknownEndpoint(end.clone()));
            }
        }
        let key = EdgeKey {
            src: edge.src,
            dst: edge.dst,
            kind: edge.kind,
        };
        self.edges.entry(key).or_default().extend(edge.provenance);
        Ok(())
    }

    pub fn remove_edge(&mut self, src: &str, dst: &str, kind: EdgeKind) -> Option<DiagramEdge> {
        let key = EdgeKey {
            src: src.to_string(),
            dst: dst.to_string(),
            kind,
        };
        self.edges.remove(&key).map(|provenance| DiagramEdge {
            src: key.src,
            dst: key.dst,
            kind,
            provenance,
        })
    }

    /// Records assertions whose cause and effect land in the same node.
    pub fn add_self_loop(
        &mut self,
        node: &str,
        provenance: impl IntoIterator<Item = AssertionRef>,
    ) -> Result<(), DiagramError> {
        if self.node_kind(node).is_none() {
            return Err(DiagramError::UnknownEndpoint(node.to_string()));
        }
        self.self_loops
            .entry(node.to_string())
            .or_default()
            .extend(provenance);
        Ok(())
    }

    pub fn node_kind(&self, name: &str) -> Option<NodeKind> {
        if self.variables.contains_key(name) {
            Some(NodeKind::Variable)
        } else if self.artificials.contains_key(name) {
            Some(NodeKind::Artificial)
        } else {
            None
        }
    }

    /// All node names in ascending order.
    pub fn node_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self
            .variables
            .keys()
            .chain(self.artificials.keys())
            .map(String::as_str)
            .collect();
        names.sort_unstable();
        names
    }

    pub fn node_count(&self) -> usize {
        self.variables.len() + self.artificials.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = &CausalVariable> {
        self.variables.values()
    }

    pub fn variable(&self, name: &str) -> Option<&CausalVariable> {
        self.variables.get(name)
    }

    pub fn artificials(&self) -> impl Iterator<Item = &ArtificialNode> {
        self.artificials.values()
    }

    pub fn artificial(&self, name: &str) -> Option<&ArtificialNode> {
        self.artificials.get(name)
    }

    /// Every edge in `(src, dst, kind)` order.
    pub fn edges(&self) -> impl Iterator<Item = DiagramEdge> + '_ {
        self.edges.iter().map(|(k, prov)| DiagramEdge {
            src: k.src.clone(),
            dst: k.dst.clone(),
            kind: k.kind,
            provenance: prov.clone(),
        })
    }

    pub fn causal_edges(&self) -> impl Iterator<Item = DiagramEdge> + '_ {
        self.edges().filter(|e| e.kind.is_causal())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn provenance(
        &self,
        src: &str,
        dst: &str,
        kind: EdgeKind,
    ) -> Option<&BTreeSet<AssertionRef>> {
        self.edges.get(&EdgeKey {
            src: src.to_string(),
            dst: dst.to_string(),
            kind,
        })
    }

    pub fn has_causal_edge(&self, src: &str, dst: &str) -> bool {
        [EdgeKind::VariableCausal, EdgeKind::ArtificialCausal]
            .into_iter()
            .any(|k| self.provenance(src, dst, k).is_some())
    }

    pub fn self_loops(&self) -> impl Iterator<Item = (&str, &BTreeSet<AssertionRef>)> {
        self.self_loops.iter().map(|(n, p)| (n.as_str(), p))
    }

    /// Sub-diagram induced by `keep`: only those nodes and the edges and
    /// self-loops between them.
    pub fn restricted_to(&self, keep: &BTreeSet<String>) -> CausalDiagram {
        CausalDiagram {
            variables: self
                .variables
                .iter()
                .filter(|(n, _)| keep.contains(*n))
                .map(|(n, v)| (n.clone(), v.clone()))
                .collect(),
            artificials: self
                .artificials
                .iter()
                .filter(|(n, _)| keep.contains(*n))
                .map(|(n, a)| (n.clone(), a.clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|(k, _)| keep.contains(&k.src) && keep.contains(&k.dst))
                .map(|(k, p)| (k.clone(), p.clone()))
                .collect(),
            self_loops: self
                .self_loops
                .iter()
                .filter(|(n, _)| keep.contains(*n))
                .map(|(n, p)| (n.clone(), p.clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = DiagramDocument {
            variables: self.variables.values().cloned().collect(),
            artificials: self.artificials.values().cloned().collect(),
            edges: self.edges().collect(),
            self_loops: self
                .self_loops
                .iter()
                .map(|(node, provenance)| SelfLoopRecord {
                    node: node.clone(),
                    provenance: provenance.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("diagram serializes")
    }

    /// Loads a diagram previously written by [`CausalDiagram::to_json`] or
    /// edited by hand. Endpoints must exist; edge typing is not checked.
    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        let doc: DiagramDocument =
            serde_json::from_str(text).map_err(|e| DiagramError::Json(e.to_string()))?;
        let mut diagram = CausalDiagram::new(doc.variables, doc.artificials)?;
        for edge in doc.edges {
            diagram.add_edge(edge)?;
        }
        for lp in doc.self_loops {
            diagram.add_self_loop(&lp.node, lp.provenance)?;
        }
        Ok(diagram)
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramDocument {
    variables: Vec<CausalVariable>,
    artificials: Vec<ArtificialNode>,
    edges: Vec<DiagramEdge>,
    #[serde(default)]
    self_loops: Vec<SelfLoopRecord>,
}

#[derive(Serialize, Deserialize)]
struct SelfLoopRecord {
    node: String,
    provenance: BTreeSet<AssertionRef>,
}

/// A simple directed path over causal edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CausalPath {
    pub nodes: Vec<String>,
    pub kinds: Vec<EdgeKind>,
}

impl fmt::Display for CausalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.nodes.join(" -> "))
    }
}

/// A simple directed cycle, rotated to start at its smallest node name.
/// A single node is a self-loop.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cycle {
    pub nodes: Vec<String>,
}

impl Cycle {
    /// Rotates `nodes` into canonical form. Panics on an empty sequence.
    pub fn canonical(mut nodes: Vec<String>) -> Self {
        let start = nodes
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i)
            .expect("cycle has at least one node");
        nodes.rotate_left(start);
        Cycle { nodes }
    }

    pub fn is_self_loop(&self) -> bool {
        self.nodes.len() == 1
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.nodes.join(" -> "), self.nodes[0])
    }
}
