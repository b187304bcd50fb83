//! Domain types shared by every stage of the linter.
//!
//! Text entities and entity-level assertions come from the corpus files; the
//! curation spec records how an expert groups entities into causal variables
//! and interaction (artificial) nodes. Everything here is plain data: the
//! only behaviour is local invariant checking via [`validate_spec`].

mod diagnostic;
mod diagram;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resolve::normalize;

pub use diagnostic::{Code, Diagnostic, Reclassification, Severity, SplitSuggestion, Suggestion};
pub use diagram::{
    AssertionRef, CausalDiagram, CausalPath, Cycle, DiagramEdge, DiagramError, EdgeKind, NodeKind,
};

pub const DEFAULT_NEAR_DUP_THRESHOLD: f64 = 0.5;
pub const DEFAULT_MAX_PATH_LEN: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("text entity label must not be empty")]
    EmptyLabel,
    #[error("text entity id must be positive")]
    ZeroId,
    #[error("a denied relation needs two distinct endpoints, got `{0}` twice")]
    ReflexiveDenial(String),
}

/// Where a text entity was digitized from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntitySource {
    CognitiveMap,
    CausalDiagram,
}

/// A raw brainstormed phrase with its cluster memberships.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextEntity {
    pub id: u32,
    pub label: String,
    pub clusters: BTreeSet<String>,
    pub source: EntitySource,
}

impl TextEntity {
    pub fn new(
        id: u32,
        label: impl Into<String>,
        clusters: impl IntoIterator<Item = String>,
    ) -> Result<Self, ModelError> {
        let label = label.into();
        if label.trim().is_empty() {
            return Err(ModelError::EmptyLabel);
        }
        if id == 0 {
            return Err(ModelError::ZeroId);
        }
        Ok(TextEntity {
            id,
            label,
            clusters: clusters.into_iter().collect(),
            source: EntitySource::CognitiveMap,
        })
    }
}

/// One digitized cause/effect row between two text entities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntityAssertion {
    pub cause: String,
    pub effect: String,
    pub cluster: String,
}

impl EntityAssertion {
    pub fn new(
        cause: impl Into<String>,
        effect: impl Into<String>,
        cluster: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let (cause, effect) = (cause.into(), effect.into());
        if cause.trim().is_empty() || effect.trim().is_empty() {
            return Err(ModelError::EmptyLabel);
        }
        Ok(EntityAssertion {
            cause,
            effect,
            cluster: cluster.into(),
        })
    }
}

/// A named value of a causal variable. Entities under one value are "the
/// same as" each other; entities under different values are mutually
/// exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableValue {
    pub name: String,
    pub entities: Vec<String>,
}

impl VariableValue {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        entities: impl IntoIterator<Item = S>,
    ) -> Self {
        VariableValue {
            name: name.into(),
            entities: entities.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalVariable {
    pub name: String,
    pub values: Vec<VariableValue>,
}

impl CausalVariable {
    pub fn new(name: impl Into<String>, values: impl IntoIterator<Item = VariableValue>) -> Self {
        CausalVariable {
            name: name.into(),
            values: values.into_iter().collect(),
        }
    }

    pub fn value(&self, name: &str) -> Option<&VariableValue> {
        self.values.iter().find(|v| v.name == name)
    }

    /// Name of the value owning `label`, compared after normalization.
    pub fn value_of(&self, label: &str) -> Option<&str> {
        let key = normalize(label);
        self.values
            .iter()
            .find(|v| v.entities.iter().any(|e| normalize(e) == key))
            .map(|v| v.name.as_str())
    }

    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.values
            .iter()
            .flat_map(|v| v.entities.iter().map(String::as_str))
    }
}

/// A `(variable, value)` pair an interaction entity is built from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Constituent {
    pub variable: String,
    pub value: String,
}

impl Constituent {
    pub fn new(variable: impl Into<String>, value: impl Into<String>) -> Self {
        Constituent {
            variable: variable.into(),
            value: value.into(),
        }
    }
}

impl fmt::Display for Constituent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.variable, self.value)
    }
}

/// An interaction entity modelled as its own node, defined by the values of
/// two or more causal variables it describes at once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtificialNode {
    pub name: String,
    pub constituents: Vec<Constituent>,
}

impl ArtificialNode {
    pub fn new(
        name: impl Into<String>,
        constituents: impl IntoIterator<Item = Constituent>,
    ) -> Self {
        ArtificialNode {
            name: name.into(),
            constituents: constituents.into_iter().collect(),
        }
    }

    pub fn distinct_variables(&self) -> BTreeSet<&str> {
        self.constituents
            .iter()
            .map(|c| c.variable.as_str())
            .collect()
    }
}

/// Expert statement that `cause` has no causal influence on `effect`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DeniedRelation {
    cause: String,
    effect: String,
}

impl DeniedRelation {
    pub fn new(cause: impl Into<String>, effect: impl Into<String>) -> Result<Self, ModelError> {
        let (cause, effect) = (cause.into(), effect.into());
        if cause == effect {
            return Err(ModelError::ReflexiveDenial(cause));
        }
        Ok(DeniedRelation { cause, effect })
    }

    pub fn cause(&self) -> &str {
        &self.cause
    }

    pub fn effect(&self) -> &str {
        &self.effect
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alias {
    pub from: String,
    pub to: String,
}

impl Alias {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Alias {
            from: from.into(),
            to: to.into(),
        }
    }
}

/// Tunables recorded in the spec with `set`. `None` means "use the default".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub near_dup_threshold: Option<f64>,
    pub max_path_len: Option<usize>,
}

impl Config {
    pub fn near_dup_threshold(&self) -> f64 {
        self.near_dup_threshold
            .unwrap_or(DEFAULT_NEAR_DUP_THRESHOLD)
    }

    pub fn max_path_len(&self) -> usize {
        self.max_path_len.unwrap_or(DEFAULT_MAX_PATH_LEN)
    }
}

/// Every modelling decision an expert has recorded about one corpus.
///
/// Statements are kept per kind in declaration order so that duplicates stay
/// representable; [`validate_spec`] reports them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurationSpec {
    pub aliases: Vec<Alias>,
    pub variables: Vec<CausalVariable>,
    pub interactions: Vec<ArtificialNode>,
    pub denials: Vec<DeniedRelation>,
    pub config: Config,
}

impl CurationSpec {
    pub fn variable(&self, name: &str) -> Option<&CausalVariable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn interaction(&self, name: &str) -> Option<&ArtificialNode> {
        self.interactions.iter().find(|i| i.name == name)
    }

    /// Alias table keyed by the normalized source label.
    pub fn alias_map(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        for alias in &self.aliases {
            map.entry(normalize(&alias.from))
                .or_insert_with(|| alias.to.clone());
        }
        map
    }

    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.variables
            .iter()
            .map(|v| v.name.as_str())
            .chain(self.interactions.iter().map(|i| i.name.as_str()))
    }
}

/// Reports every local invariant violation in `spec`. An empty result means
/// the spec is locally well formed; cross-variable problems are the rule
/// checkers' business.
pub fn validate_spec(spec: &CurationSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for name in spec.node_names() {
        *seen.entry(name).or_default() += 1;
    }
    for (name, count) in seen.iter().filter(|(_, c)| **c > 1) {
        out.push(Diagnostic::new(
            Code::R1Dup,
            format!("node name `{name}` is declared {count} times"),
            vec![name.to_string()],
        ));
    }

    for var in &spec.variables {
        let mut value_names = BTreeSet::new();
        for value in &var.values {
            if !value_names.insert(value.name.as_str()) {
                out.push(Diagnostic::new(
                    Code::R1Dup,
                    format!(
                        "variable `{}` declares value `{}` twice",
                        var.name, value.name
                    ),
                    vec![var.name.clone(), value.name.clone()],
                ));
            }
        }
        // label -> first value that claimed it
        let mut owner: BTreeMap<String, &str> = BTreeMap::new();
        for value in &var.values {
            for label in &value.entities {
                match owner.get(&normalize(label)) {
                    Some(first) if *first != value.name => out.push(Diagnostic::new(
                        Code::R1Dup,
                        format!(
                            "`{label}` is listed under both `{first}` and `{}` of variable `{}`; values must be mutually exclusive",
                            value.name, var.name
                        ),
                        vec![label.clone(), var.name.clone()],
                    )),
                    Some(_) => {}
                    None => {
                        owner.insert(normalize(label), value.name.as_str());
                    }
                }
            }
        }
    }

    for inter in &spec.interactions {
        for c in &inter.constituents {
            let known = spec
                .variable(&c.variable)
                .map(|v| v.value(&c.value).is_some());
            let problem = match known {
                None => format!("unknown variable `{}`", c.variable),
                Some(false) => format!("variable `{}` has no value `{}`", c.variable, c.value),
                Some(true) => continue,
            };
            out.push(Diagnostic::new(
                Code::NameUnresolved,
                format!("interaction `{}` references {problem}", inter.name),
                vec![inter.name.clone(), c.to_string()],
            ));
        }
    }

    let alias_keys = spec.alias_map();
    let mut chained = BTreeSet::new();
    for alias in &spec.aliases {
        let target = normalize(&alias.to);
        if alias_keys.contains_key(&target) && chained.insert(target) {
            out.push(Diagnostic::new(
                Code::AliasChain,
                format!(
                    "alias `{}` -> `{}` points at a label that is itself aliased",
                    alias.from, alias.to
                ),
                vec![alias.to.clone()],
            ));
        }
    }

    let nodes: BTreeSet<&str> = spec.node_names().collect();
    for denial in &spec.denials {
        for end in [denial.cause(), denial.effect()] {
            if !nodes.contains(end) {
                out.push(Diagnostic::new(
                    Code::NameUnresolved,
                    format!(
                        "denial `{}` -> `{}` references unknown node `{end}`",
                        denial.cause(),
                        denial.effect()
                    ),
                    vec![end.to_string()],
                ));
            }
        }
    }

    out
}
