//! Seeded synthetic corpora with a ledger of planted violations.
//!
//! Randomness comes from a ChaCha8 stream seeded with the caller's integer
//! (`ChaCha8Rng::seed_from_u64`), so output depends on the arguments only.
//!
//! The clean part of a corpus is a random DAG over variables and interaction
//! nodes with no edge that also runs through a mediator, and labels are
//! single tokens such as `Var3valAent2` so no two of them share a token.
//! Each plant is built from fresh nodes named `P{n}...` and triggers exactly
//! one diagnostic code.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::build_diagram;
use crate::ingest::CorpusBundle;
use crate::model::{
    Alias, ArtificialNode, CausalDiagram, CausalVariable, Code, Constituent, CurationSpec,
    DeniedRelation, Diagnostic, DiagramEdge, EdgeKind, EntityAssertion, EntitySource, TextEntity,
    VariableValue,
};
use crate::rules::{lint_diagram, LintRun, LintSettings};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("at least one variable is required")]
    NoVariables,
    #[error("{code} plants need at least {needed} variables, got {got}")]
    TooFewVariables {
        code: Code,
        needed: usize,
        got: usize,
    },
    #[error("invalid plant spec `{0}`; expected CODE=COUNT[,CODE=COUNT...]")]
    PlantSyntax(String),
}

/// One injected violation and the names a matching diagnostic must mention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plant {
    pub code: Code,
    pub subjects: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantLedger {
    pub seed: u64,
    pub n_vars: usize,
    pub plants: Vec<Plant>,
}

impl PlantLedger {
    /// Plants with no diagnostic of the same code sharing a subject.
    pub fn missed<'a>(&'a self, diagnostics: &[Diagnostic]) -> Vec<&'a Plant> {
        self.plants
            .iter()
            .filter(|p| {
                !diagnostics
                    .iter()
                    .any(|d| d.code == p.code && d.subjects.iter().any(|s| p.subjects.contains(s)))
            })
            .collect()
    }
}

/// A change applied to the built diagram, for violations that cannot arise
/// from the CSV and spec inputs alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "edit", rename_all = "kebab-case")]
pub enum DiagramEdit {
    /// A causal edge with no supporting assertion.
    AddUnsupported { src: String, dst: String },
    /// Changes the kind of an existing edge.
    Retype {
        src: String,
        dst: String,
        from: EdgeKind,
        to: EdgeKind,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub bundle: CorpusBundle,
    pub spec: CurationSpec,
    pub ledger: PlantLedger,
    pub diagram_edits: Vec<DiagramEdit>,
}

impl SynthCorpus {
    /// The lifted diagram with the edits applied, and the resolution
    /// diagnostics from building it.
    pub fn diagram(&self) -> (CausalDiagram, Vec<Diagnostic>) {
        let (mut diagram, diags) = build_diagram(&self.bundle, &self.spec);
        for edit in &self.diagram_edits {
            match edit {
                DiagramEdit::AddUnsupported { src, dst } => {
                    diagram
                        .add_edge(DiagramEdge::new(
                            src.clone(),
                            dst.clone(),
                            EdgeKind::VariableCausal,
                            [],
                        ))
                        .expect("planted endpoints exist");
                }
                DiagramEdit::Retype { src, dst, from, to } => {
                    let mut edge = diagram
                        .remove_edge(src, dst, *from)
                        .expect("planted edge exists");
                    edge.kind = *to;
                    diagram.add_edge(edge).expect("planted endpoints exist");
                }
            }
        }
        (diagram, diags)
    }

    pub fn needs_diagram_file(&self) -> bool {
        !self.diagram_edits.is_empty()
    }

    pub fn lint(&self) -> LintRun {
        let (diagram, resolution) = self.diagram();
        lint_diagram(
            &self.bundle,
            &self.spec,
            diagram,
            &resolution,
            LintSettings::from_spec(&self.spec),
        )
    }
}

/// Parses `CODE=COUNT[,CODE=COUNT...]`. Repeated codes add up.
pub fn parse_plants(text: &str) -> Result<BTreeMap<Code, usize>, SynthError> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let err = || SynthError::PlantSyntax(part.to_string());
        let (code, count) = part.split_once('=').ok_or_else(err)?;
        let code: Code = code.trim().parse().map_err(|_| err())?;
        let count: usize = count.trim().parse().map_err(|_| err())?;
        *out.entry(code).or_default() += count;
    }
    Ok(out)
}

struct Builder {
    rng: ChaCha8Rng,
    bundle: CorpusBundle,
    spec: CurationSpec,
    plants: Vec<Plant>,
    edits: Vec<DiagramEdit>,
    next_id: u32,
    next_plant: usize,
}

impl Builder {
    fn map_entity(&mut self, label: &str, clusters: &[&str]) {
        self.bundle.entities.push(TextEntity {
            id: self.next_id,
            label: label.to_string(),
            clusters: clusters.iter().map(|c| c.to_string()).collect(),
            source: EntitySource::CognitiveMap,
        });
        self.next_id += 1;
    }

    fn assert(&mut self, cause: &str, effect: &str, cluster: &str) {
        self.bundle.assertions.push(
            EntityAssertion::new(cause, effect, cluster).expect("generated labels are non-empty"),
        );
    }

    /// Fresh single-value variable `name` owning the entity `{name}ent`.
    fn plant_var(&mut self, name: &str) -> String {
        let label = format!("{name}ent");
        self.spec.variables.push(CausalVariable::new(
            name,
            [VariableValue::new("v", [label.as_str()])],
        ));
        self.map_entity(&label, &["Plants"]);
        label
    }

    fn prefix(&mut self) -> String {
        self.next_plant += 1;
        format!("P{}", self.next_plant)
    }

    fn record(&mut self, code: Code, subjects: Vec<String>) {
        self.plants.push(Plant { code, subjects });
    }

    fn base(&mut self, n_vars: usize) {
        let mut nodes: Vec<(String, Vec<String>)> = Vec::new();
        for i in 1..=n_vars {
            let name = format!("Var{i}");
            let n_values = self.rng.gen_range(1..=3);
            let values: Vec<VariableValue> = (0..n_values)
                .map(|v| {
                    let vname = format!("val{}", (b'A' + v as u8) as char);
                    let n_ents = self.rng.gen_range(1..=2);
                    VariableValue::new(
                        vname.clone(),
                        (1..=n_ents).map(|e| format!("{name}{vname}ent{e}")),
                    )
                })
                .collect();
            let var = CausalVariable::new(name.clone(), values);
            let labels: Vec<String> = var.entities().map(str::to_string).collect();
            let cluster = format!("Cluster{}", self.rng.gen_range(1..=3));
            for label in &labels {
                self.map_entity(label, &[cluster.as_str()]);
            }
            nodes.push((name, labels));
            self.spec.variables.push(var);
        }

        for k in 1..=n_vars / 3 {
            let mut picks: Vec<&CausalVariable> = self.spec.variables.iter().collect();
            picks.shuffle(&mut self.rng);
            let constituents: Vec<Constituent> = picks[..2]
                .iter()
                .map(|v| {
                    let value = v
                        .values
                        .choose(&mut self.rng)
                        .expect("variables have values");
                    Constituent::new(v.name.clone(), value.name.clone())
                })
                .collect();
            let name = format!("Inter{k}");
            self.map_entity(&name, &["Interactions"]);
            nodes.push((name.clone(), vec![name.clone()]));
            self.spec
                .interactions
                .push(ArtificialNode::new(name, constituents));
        }

        // random topological order; edges only run forward
        nodes.shuffle(&mut self.rng);
        let n = nodes.len();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if !self.rng.gen_bool(0.35) {
                    continue;
                }
                let triangle = (0..n).any(|k| {
                    (adj[i][k] && adj[k][j]) || (adj[i][k] && adj[j][k]) || (adj[k][i] && adj[k][j])
                });
                if triangle {
                    continue;
                }
                adj[i][j] = true;
                let cause = nodes[i].1.choose(&mut self.rng).expect("non-empty").clone();
                let effect = nodes[j].1.choose(&mut self.rng).expect("non-empty").clone();
                self.assert(&cause, &effect, "Synthetic");
            }
        }
        // denials against the topological order can never be realized
        for _ in 0..n_vars / 2 {
            let i = self.rng.gen_range(0..n);
            let j = self.rng.gen_range(0..n);
            if i < j && !nodes[i].0.starts_with("Inter") && !nodes[j].0.starts_with("Inter") {
                let denial =
                    DeniedRelation::new(nodes[j].0.clone(), nodes[i].0.clone()).expect("distinct");
                if !self.spec.denials.contains(&denial) {
                    self.spec.denials.push(denial);
                }
            }
        }
    }

    fn plant(&mut self, code: Code) {
        let p = self.prefix();
        match code {
            Code::NameUnresolved => {
                let src = self.plant_var(&format!("{p}Src"));
                let ghost = format!("{p}Ghost");
                self.assert(&src, &ghost, "Plants");
                self.record(code, vec![ghost]);
            }
            Code::AliasChain => {
                let (a, b) = (format!("{p}first"), format!("{p}middle"));
                let target = self.plant_var(&format!("{p}Target"));
                self.spec.aliases.push(Alias::new(a, b.clone()));
                self.spec.aliases.push(Alias::new(b.clone(), target));
                self.record(code, vec![b]);
            }
            Code::ClusterOverlap => {
                let name = format!("{p}Both");
                let label = format!("{name}ent");
                self.spec.variables.push(CausalVariable::new(
                    name,
                    [VariableValue::new("v", [label.as_str()])],
                ));
                self.map_entity(&label, &["PlantsA", "PlantsB"]);
                self.record(code, vec![label]);
            }
            Code::R1Dup => {
                let label = format!("{p}Shared");
                for side in ["DupA", "DupB"] {
                    self.spec.variables.push(CausalVariable::new(
                        format!("{p}{side}"),
                        [VariableValue::new("v", [label.as_str()])],
                    ));
                }
                self.map_entity(&label, &["Plants"]);
                self.record(code, vec![label]);
            }
            Code::R1Unassigned => {
                let label = format!("{p}Loose");
                self.map_entity(&label, &["Plants"]);
                self.record(code, vec![label]);
            }
            Code::R1NearDup => {
                let n = self.next_plant;
                let a = format!("{p}nd alpha{n} beta{n} gamma{n}");
                let b = format!("{p}nd alpha{n} beta{n} delta{n}");
                for (side, label) in [("NdA", &a), ("NdB", &b)] {
                    self.spec.variables.push(CausalVariable::new(
                        format!("{p}{side}"),
                        [VariableValue::new("v", [label.as_str()])],
                    ));
                    self.map_entity(label, &["Plants"]);
                }
                self.record(code, vec![a, b]);
            }
            Code::R2Misplaced => {
                let var = format!("{p}Twin");
                let labels = [format!("{var}one"), format!("{var}two")];
                self.spec.variables.push(CausalVariable::new(
                    var.clone(),
                    [
                        VariableValue::new("one", [labels[0].as_str()]),
                        VariableValue::new("two", [labels[1].as_str()]),
                    ],
                ));
                for label in &labels {
                    self.map_entity(label, &["Plants"]);
                }
                let name = format!("{p}SelfInteraction");
                self.spec.interactions.push(ArtificialNode::new(
                    name.clone(),
                    [
                        Constituent::new(var.clone(), "one"),
                        Constituent::new(var, "two"),
                    ],
                ));
                self.map_entity(&name, &["Plants"]);
                self.record(code, vec![name]);
            }
            Code::R3Unsupported => {
                let (src, dst) = (format!("{p}From"), format!("{p}To"));
                self.plant_var(&src);
                self.plant_var(&dst);
                self.edits.push(DiagramEdit::AddUnsupported {
                    src: src.clone(),
                    dst: dst.clone(),
                });
                self.record(code, vec![format!("{src} -> {dst}")]);
            }
            Code::R3Mediated => {
                let names = ["A", "B", "C"].map(|s| format!("{p}Med{s}"));
                let labels: Vec<String> = names.iter().map(|n| self.plant_var(n)).collect();
                for (i, j) in [(0, 1), (1, 2), (0, 2)] {
                    self.assert(&labels[i], &labels[j], "Plants");
                }
                self.record(code, vec![format!("{} -> {}", names[0], names[2])]);
            }
            Code::R3UntypedArtificial => {
                let (x, y, z) = (format!("{p}X"), format!("{p}Y"), format!("{p}Cause"));
                self.plant_var(&x);
                self.plant_var(&y);
                let cause = self.plant_var(&z);
                let name = format!("{p}Joint");
                self.spec.interactions.push(ArtificialNode::new(
                    name.clone(),
                    [Constituent::new(x, "v"), Constituent::new(y, "v")],
                ));
                self.map_entity(&name, &["Plants"]);
                self.assert(&cause, &name, "Plants");
                self.edits.push(DiagramEdit::Retype {
                    src: z.clone(),
                    dst: name.clone(),
                    from: EdgeKind::ArtificialCausal,
                    to: EdgeKind::VariableCausal,
                });
                self.record(code, vec![format!("{z} -> {name}")]);
            }
            Code::R4Transitivity => {
                let names = ["E", "F", "G"].map(|s| format!("{p}{s}"));
                let labels: Vec<String> = names.iter().map(|n| self.plant_var(n)).collect();
                self.assert(&labels[0], &labels[1], "Plants");
                self.assert(&labels[1], &labels[2], "Plants");
                self.spec.denials.push(
                    DeniedRelation::new(names[0].clone(), names[2].clone()).expect("distinct"),
                );
                self.record(code, vec![names.join(" -> ")]);
            }
            Code::R4Cycle => {
                let names = ["A", "B", "C"].map(|s| format!("{p}Loop{s}"));
                let labels: Vec<String> = names.iter().map(|n| self.plant_var(n)).collect();
                for (i, j) in [(0, 1), (1, 2), (2, 0)] {
                    self.assert(&labels[i], &labels[j], "Plants");
                }
                self.record(code, names.to_vec());
            }
        }
    }
}

/// Nodes a planted structure of `code` spans, used for feasibility checks.
fn plant_width(code: Code) -> usize {
    match code {
        Code::R4Cycle | Code::R4Transitivity => 3,
        _ => 0,
    }
}

/// Generates a corpus over `n_vars` clean variables plus the requested
/// plants. Without plants the corpus lints clean.
pub fn generate(
    seed: u64,
    n_vars: usize,
    plants: &BTreeMap<Code, usize>,
) -> Result<SynthCorpus, SynthError> {
    if n_vars == 0 {
        return Err(SynthError::NoVariables);
    }
    for (&code, &count) in plants {
        let needed = plant_width(code);
        if count > 0 && n_vars < needed {
            return Err(SynthError::TooFewVariables {
                code,
                needed,
                got: n_vars,
            });
        }
    }
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(seed),
        bundle: CorpusBundle::default(),
        spec: CurationSpec::default(),
        plants: Vec::new(),
        edits: Vec::new(),
        next_id: 1,
        next_plant: 0,
    };
    b.base(n_vars);
    for (&code, &count) in plants {
        for _ in 0..count {
            b.plant(code);
        }
    }
    Ok(SynthCorpus {
        bundle: b.bundle,
        spec: b.spec,
        ledger: PlantLedger {
            seed,
            n_vars,
            plants: b.plants,
        },
        diagram_edits: b.edits,
    })
}

/// A small unconstrained instance for checking graph code against reference
/// implementations: up to `max_vars` variables, a few interactions and
/// aliases, and random assertions that may form cycles, self-loops or
/// dangle on unknown labels.
pub fn random_instance(seed: u64, max_vars: usize) -> (CorpusBundle, CurationSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = CurationSpec::default();
    let mut bundle = CorpusBundle::default();
    let mut pool: Vec<String> = Vec::new();

    let n_vars = rng.gen_range(1..=max_vars.max(1));
    for i in 1..=n_vars {
        let n_values = rng.gen_range(1..=2);
        let values: Vec<VariableValue> = (0..n_values)
            .map(|v| {
                let n_ents = rng.gen_range(1..=2);
                VariableValue::new(
                    format!("v{v}"),
                    (0..n_ents).map(|e| format!("X{i} v{v} e{e}")),
                )
            })
            .collect();
        let var = CausalVariable::new(format!("X{i}"), values);
        pool.extend(var.entities().map(str::to_string));
        spec.variables.push(var);
    }
    if n_vars >= 2 {
        for k in 0..rng.gen_range(0..=2) {
            let a = rng.gen_range(0..n_vars);
            let b = (a + rng.gen_range(1..n_vars)) % n_vars;
            let constituents = [a, b].map(|i| {
                let var = &spec.variables[i];
                let value = var.values.choose(&mut rng).expect("variables have values");
                Constituent::new(var.name.clone(), value.name.clone())
            });
            let name = format!("Joint {k}");
            pool.push(name.clone());
            spec.interactions
                .push(ArtificialNode::new(name, constituents));
        }
    }
    let owned = pool.clone();
    for k in 0..rng.gen_range(0..=2) {
        let from = format!("nick {k}");
        spec.aliases.push(Alias::new(
            from.clone(),
            owned.choose(&mut rng).expect("non-empty").clone(),
        ));
        pool.push(from);
    }
    pool.push("stray label".into());
    for label in &owned {
        // case and punctuation variants resolve to the same entity
        if rng.gen_bool(0.2) {
            pool.push(format!("{}!", label.to_uppercase()));
        }
    }
    for (id, label) in owned.iter().enumerate() {
        bundle.entities.push(TextEntity {
            id: id as u32 + 1,
            label: label.clone(),
            clusters: BTreeSet::from([format!("c{}", rng.gen_range(0..2))]),
            source: EntitySource::CognitiveMap,
        });
    }
    for _ in 0..rng.gen_range(0..=3 * n_vars + 4) {
        let cause = pool.choose(&mut rng).expect("non-empty").clone();
        let effect = pool.choose(&mut rng).expect("non-empty").clone();
        bundle
            .assertions
            .push(EntityAssertion::new(cause, effect, "c").expect("non-empty labels"));
    }
    (bundle, spec)
}
