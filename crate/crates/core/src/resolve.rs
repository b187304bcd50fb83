//! Label canonicalization and near-duplicate detection.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{CurationSpec, TextEntity};

/// Lowercases, turns punctuation into spaces, collapses whitespace runs and
/// trims.
pub fn normalize(label: &str) -> String {
    let mapped: String = label
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c.is_whitespace() {
                c
            } else {
                ' '
            }
        })
        .collect::<String>()
        .to_lowercase();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn tokens(label: &str) -> BTreeSet<String> {
    normalize(label)
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Token-set Jaccard similarity kept as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Similarity {
    pub shared: usize,
    pub union: usize,
}

impl Similarity {
    pub fn value(self) -> f64 {
        if self.union == 0 {
            0.0
        } else {
            self.shared as f64 / self.union as f64
        }
    }
}

pub fn jaccard(a: &str, b: &str) -> Similarity {
    let (ta, tb) = (tokens(a), tokens(b));
    Similarity {
        shared: ta.intersection(&tb).count(),
        union: ta.union(&tb).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Resolution {
    Canonical(String),
    Unresolved,
}

impl Resolution {
    pub fn canonical(&self) -> Option<&str> {
        match self {
            Resolution::Canonical(s) => Some(s),
            Resolution::Unresolved => None,
        }
    }
}

/// Resolves raw labels against a fixed set of canonical labels, applying the
/// spec's alias table exactly once.
#[derive(Debug, Clone)]
pub struct Resolver {
    aliases: BTreeMap<String, String>,
    known: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new<'a>(spec: &CurationSpec, known: impl IntoIterator<Item = &'a str>) -> Self {
        let mut map = BTreeMap::new();
        for label in known {
            map.entry(normalize(label))
                .or_insert_with(|| label.to_string());
        }
        Resolver {
            aliases: spec.alias_map(),
            known: map,
        }
    }

    /// Resolver whose canonical labels are every label a spec node owns:
    /// interaction names first, then variable entities in declaration order.
    pub fn for_spec(spec: &CurationSpec) -> Self {
        let owned = spec
            .interactions
            .iter()
            .map(|i| i.name.as_str())
            .chain(spec.variables.iter().flat_map(|v| v.entities()));
        Resolver::new(spec, owned)
    }

    pub fn resolve(&self, label: &str) -> Resolution {
        let mut key = normalize(label);
        if let Some(target) = self.aliases.get(&key) {
            key = normalize(target);
        }
        match self.known.get(&key) {
            Some(canonical) => Resolution::Canonical(canonical.clone()),
            None => Resolution::Unresolved,
        }
    }
}

/// Resolves a single label against `known`.
pub fn resolve(label: &str, spec: &CurationSpec, known: &BTreeSet<String>) -> Resolution {
    Resolver::new(spec, known.iter().map(String::as_str)).resolve(label)
}

/// Outcome of resolving a batch of raw labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResolutionTable {
    pub canonical: BTreeMap<String, String>,
    pub unresolved: BTreeSet<String>,
}

impl ResolutionTable {
    pub fn build<'a>(labels: impl IntoIterator<Item = &'a str>, resolver: &Resolver) -> Self {
        let mut table = ResolutionTable::default();
        for label in labels {
            match resolver.resolve(label) {
                Resolution::Canonical(c) => {
                    table.canonical.insert(normalize(label), c);
                }
                Resolution::Unresolved => {
                    table.unresolved.insert(label.to_string());
                }
            }
        }
        table
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.canonical.get(&normalize(label)).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearDuplicate {
    /// The pair in label order.
    pub a: String,
    pub b: String,
    pub score: Similarity,
}

/// Pairs of entities whose token Jaccard similarity reaches `threshold`.
/// Entities with identical normalized labels are never paired.
pub fn near_duplicates(entities: &[TextEntity], threshold: f64) -> Vec<NearDuplicate> {
    let labels: Vec<(&str, BTreeSet<String>)> = entities
        .iter()
        .map(|e| (e.label.as_str(), tokens(&e.label)))
        .collect();
    let mut out = Vec::new();
    for (i, (la, ta)) in labels.iter().enumerate() {
        for (lb, tb) in &labels[i + 1..] {
            if normalize(la) == normalize(lb) {
                continue;
            }
            let score = Similarity {
                shared: ta.intersection(tb).count(),
                union: ta.union(tb).count(),
            };
            if score.union > 0 && score.value() >= threshold {
                let (a, b) = if la <= lb { (la, lb) } else { (lb, la) };
                out.push(NearDuplicate {
                    a: a.to_string(),
                    b: b.to_string(),
                    score,
                });
            }
        }
    }
    out.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    out.dedup_by(|x, y| x.a == y.a && x.b == y.b);
    out
}
