use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub const ALL: [Severity; 3] = [Severity::Error, Severity::Warning, Severity::Info];

    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }

    /// Sort rank, most severe first.
    pub fn rank(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Diagnostic codes. The severity of each code is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    NameUnresolved,
    AliasChain,
    ClusterOverlap,
    R1Dup,
    R1Unassigned,
    R1NearDup,
    R2Misplaced,
    R3Unsupported,
    R3Mediated,
    R3UntypedArtificial,
    R4Transitivity,
    R4Cycle,
}

impl Code {
    pub const ALL: [Code; 12] = [
        Code::NameUnresolved,
        Code::AliasChain,
        Code::ClusterOverlap,
        Code::R1Dup,
        Code::R1Unassigned,
        Code::R1NearDup,
        Code::R2Misplaced,
        Code::R3Unsupported,
        Code::R3Mediated,
        Code::R3UntypedArtificial,
        Code::R4Transitivity,
        Code::R4Cycle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::NameUnresolved => "NAME-UNRESOLVED",
            Code::AliasChain => "ALIAS-CHAIN",
            Code::ClusterOverlap => "CLUSTER-OVERLAP",
            Code::R1Dup => "R1-DUP",
            Code::R1Unassigned => "R1-UNASSIGNED",
            Code::R1NearDup => "R1-NEARDUP",
            Code::R2Misplaced => "R2-MISPLACED",
            Code::R3Unsupported => "R3-UNSUPPORTED",
            Code::R3Mediated => "R3-MEDIATED",
            Code::R3UntypedArtificial => "R3-UNTYPED-ARTIFICIAL",
            Code::R4Transitivity => "R4-TRANSITIVITY",
            Code::R4Cycle => "R4-CYCLE",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::NameUnresolved
            | Code::AliasChain
            | Code::R1Dup
            | Code::R2Misplaced
            | Code::R3Unsupported
            | Code::R3UntypedArtificial
            | Code::R4Transitivity
            | Code::R4Cycle => Severity::Error,
            Code::R1NearDup | Code::R1Unassigned | Code::R3Mediated => Severity::Warning,
            Code::ClusterOverlap => Severity::Info,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown diagnostic code `{0}`")]
pub struct UnknownCode(pub String);

impl FromStr for Code {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Code::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCode(s.to_string()))
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Proposed surgery for an over-general mediator `F` on a denied path
/// `E -> F -> G`: `F_a` keeps the `E` side, `F_b` keeps the `G` side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplitSuggestion {
    pub mediator: String,
    pub part_a: String,
    pub part_b: String,
    /// Mediator entities that receive the incoming effects.
    pub incoming: Vec<String>,
    /// Mediator entities that carry the outgoing effects.
    pub outgoing: Vec<String>,
}

impl SplitSuggestion {
    pub fn new(mediator: impl Into<String>, incoming: Vec<String>, outgoing: Vec<String>) -> Self {
        let mediator = mediator.into();
        SplitSuggestion {
            part_a: format!("{mediator}_a"),
            part_b: format!("{mediator}_b"),
            mediator,
            incoming,
            outgoing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Reclassification {
    pub mediator: String,
    pub note: String,
}

/// Repair options attached to a diagnostic. Both lists may be populated when
/// the evidence does not single out one repair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub splits: Vec<SplitSuggestion>,
    pub reclassifications: Vec<Reclassification>,
}

impl Suggestion {
    pub fn is_empty(&self) -> bool {
        self.splits.is_empty() && self.reclassifications.is_empty()
    }
}

impl fmt::Display for Suggestion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for s in &self.splits {
            parts.push(format!(
                "split `{}` into `{}` (incoming side) and `{}` (outgoing side)",
                s.mediator, s.part_a, s.part_b
            ));
        }
        for r in &self.reclassifications {
            parts.push(format!("reclassify `{}`: {}", r.mediator, r.note));
        }
        f.write_str(&parts.join("; "))
    }
}

/// A coded rule violation. Severity is derived from the code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    pub subjects: Vec<String>,
    pub suggestion: Option<Suggestion>,
}

impl Diagnostic {
    /// Panics if `subjects` is empty.
    pub fn new(code: Code, message: impl Into<String>, subjects: Vec<String>) -> Self {
        assert!(
            !subjects.is_empty(),
            "diagnostic {code} needs at least one subject"
        );
        Diagnostic {
            code,
            message: message.into(),
            subjects,
            suggestion: None,
        }
    }

    pub fn with_suggestion(mut self, suggestion: Suggestion) -> Self {
        self.suggestion = (!suggestion.is_empty()).then_some(suggestion);
        self
    }

    pub fn severity(&self) -> Severity {
        self.code.severity()
    }
}

#[derive(Serialize, Deserialize)]
struct DiagnosticRecord {
    code: Code,
    severity: Severity,
    message: String,
    subjects: Vec<String>,
    suggestion: Option<Suggestion>,
}

impl Serialize for Diagnostic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DiagnosticRecord {
            code: self.code,
            severity: self.severity(),
            message: self.message.clone(),
            subjects: self.subjects.clone(),
            suggestion: self.suggestion.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Diagnostic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rec = DiagnosticRecord::deserialize(deserializer)?;
        if rec.severity != rec.code.severity() {
            return Err(D::Error::custom(format!(
                "{} must have severity {}, found {}",
                rec.code,
                rec.code.severity(),
                rec.severity
            )));
        }
        if rec.subjects.is_empty() {
            return Err(D::Error::custom("diagnostic subjects must not be empty"));
        }
        Ok(Diagnostic {
            code: rec.code,
            message: rec.message,
            subjects: rec.subjects,
            suggestion: rec.suggestion,
        })
    }
}
