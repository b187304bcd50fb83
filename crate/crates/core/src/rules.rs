//! The four modelling-rule checkers plus corpus hygiene.
//!
//! * R1: one node per causal variable (duplicates, unassigned entities,
//!   lexical near-duplicates, cluster overlap).
//! * R2: interaction entities live in artificial nodes, never inside a
//!   variable.
//! * R3: edges need entity-level support, direct effects only, and typed
//!   artificial links.
//! * R4: no loops, and no causal path realizing a denied relation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::diagram::{
    self, find_cycles_bounded, find_mediated, paths_between, CausalGraph, CycleReport, Ownership,
};
use crate::ingest::CorpusBundle;
use crate::model::{
    validate_spec, CausalDiagram, Code, CurationSpec, Cycle, Diagnostic, EdgeKind, NodeKind,
    Reclassification, SplitSuggestion, Suggestion,
};
use crate::resolve::{near_duplicates, normalize, Resolution, Resolver};

/// Effective thresholds for one lint run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LintSettings {
    pub near_dup_threshold: f64,
    pub max_path_len: usize,
}

impl LintSettings {
    pub fn from_spec(spec: &CurationSpec) -> Self {
        LintSettings {
            near_dup_threshold: spec.config.near_dup_threshold(),
            max_path_len: spec.config.max_path_len(),
        }
    }
}

fn owner_of(label: &str, resolver: &Resolver, ownership: &Ownership) -> Option<(String, String)> {
    match resolver.resolve(label) {
        Resolution::Canonical(c) => ownership.owner(&c).map(|o| (c.clone(), o.to_string())),
        Resolution::Unresolved => None,
    }
}

pub fn check_r1(bundle: &CorpusBundle, spec: &CurationSpec, threshold: f64) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let resolver = Resolver::for_spec(spec);
    let ownership = Ownership::new(spec);

    // normalized label -> (first spelling, claiming variables, claimed by an interaction)
    let mut claims: BTreeMap<String, (String, BTreeSet<String>, bool)> = BTreeMap::new();
    for var in &spec.variables {
        for label in var.entities() {
            claims
                .entry(normalize(label))
                .or_insert_with(|| (label.to_string(), BTreeSet::new(), false))
                .1
                .insert(var.name.clone());
        }
    }
    for inter in &spec.interactions {
        if let Some(claim) = claims.get_mut(&normalize(&inter.name)) {
            claim.2 = true;
        }
    }
    for (label, vars, by_interaction) in claims.into_values() {
        if vars.len() >= 2 || (by_interaction && !vars.is_empty()) {
            let mut owners: Vec<String> = vars.into_iter().collect();
            if by_interaction {
                owners.push(format!("interaction `{label}`"));
            }
            let message = format!("`{label}` is claimed by {}", owners.join(", "));
            let mut subjects = vec![label];
            subjects.extend(
                owners
                    .into_iter()
                    .filter(|o| !o.starts_with("interaction ")),
            );
            out.push(Diagnostic::new(Code::R1Dup, message, subjects));
        }
    }

    for entity in &bundle.entities {
        if owner_of(&entity.label, &resolver, &ownership).is_none() {
            out.push(Diagnostic::new(
                Code::R1Unassigned,
                format!(
                    "entity #{} `{}` is not a value of any causal variable nor an interaction",
                    entity.id, entity.label
                ),
                vec![entity.label.clone()],
            ));
        }
    }

    for pair in near_duplicates(&bundle.entities, threshold) {
        let a = owner_of(&pair.a, &resolver, &ownership);
        let b = owner_of(&pair.b, &resolver, &ownership);
        let same_variable = matches!((&a, &b), (Some((_, x)), Some((_, y))) if x == y);
        let same_label =
            matches!((&a, &b), (Some((x, _)), Some((y, _))) if normalize(x) == normalize(y));
        if same_variable || same_label {
            continue;
        }
        out.push(Diagnostic::new(
            Code::R1NearDup,
            format!(
                "`{}` and `{}` look alike (token Jaccard {}/{} = {:.2}) but are not values of one variable",
                pair.a,
                pair.b,
                pair.score.shared,
                pair.score.union,
                pair.score.value()
            ),
            vec![pair.a, pair.b],
        ));
    }

    for entity in &bundle.entities {
        if entity.clusters.len() >= 2 {
            let clusters: Vec<&str> = entity.clusters.iter().map(String::as_str).collect();
            out.push(Diagnostic::new(
                Code::ClusterOverlap,
                format!(
                    "`{}` appears in clusters {}",
                    entity.label,
                    clusters.join(", ")
                ),
                vec![entity.label.clone()],
            ));
        }
    }
    out
}

pub fn check_r2(bundle: &CorpusBundle, spec: &CurationSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for inter in &spec.interactions {
        let key = normalize(&inter.name);
        let row = bundle
            .entities
            .iter()
            .find(|e| normalize(&e.label) == key)
            .map(|e| format!(" (map row {})", e.id))
            .unwrap_or_default();
        for var in &spec.variables {
            for value in &var.values {
                if value.entities.iter().any(|e| normalize(e) == key) {
                    out.push(Diagnostic::new(
                        Code::R2Misplaced,
                        format!(
                            "interaction `{}`{row} is also listed under `{}.{}`; keep interaction entities out of variables",
                            inter.name, var.name, value.name
                        ),
                        vec![inter.name.clone(), var.name.clone()],
                    ));
                }
            }
        }
        let distinct = inter.distinct_variables();
        if distinct.len() < 2 {
            out.push(Diagnostic::new(
                Code::R2Misplaced,
                format!(
                    "interaction `{}` combines {} distinct variable(s); an interaction needs at least two",
                    inter.name,
                    distinct.len()
                ),
                vec![inter.name.clone()],
            ));
        }
    }
    out
}

pub fn check_r3(diagram: &CausalDiagram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for edge in diagram.edges() {
        if edge.kind.is_causal() && edge.provenance.is_empty() {
            out.push(Diagnostic::new(
                Code::R3Unsupported,
                format!("causal edge {edge} has no supporting entity-level assertion"),
                vec![edge.to_string()],
            ));
        }
        let touches_artificial = [&edge.src, &edge.dst]
            .into_iter()
            .any(|n| diagram.node_kind(n) == Some(NodeKind::Artificial));
        if touches_artificial && edge.kind == EdgeKind::VariableCausal {
            out.push(Diagnostic::new(
                Code::R3UntypedArtificial,
                format!("edge {edge} touches an artificial node but is typed as an ordinary causal relation"),
                vec![edge.to_string()],
            ));
        }
    }
    for m in find_mediated(diagram) {
        out.push(Diagnostic::new(
            Code::R3Mediated,
            format!(
                "edge {} -> {} may be a distant effect: it is also carried by {} -> {} -> {}",
                m.src, m.dst, m.src, m.mediator, m.dst
            ),
            vec![format!("{} -> {}", m.src, m.dst), m.mediator],
        ));
    }
    out
}

fn cycle_diagnostic(diagram: &CausalDiagram, cycle: &Cycle) -> Diagnostic {
    let message = if cycle.is_self_loop() {
        let node = &cycle.nodes[0];
        let witness = diagram
            .self_loops()
            .find(|(n, _)| n == node)
            .and_then(|(_, prov)| prov.iter().next())
            .map(|a| format!(" (`{}` causes `{}`)", a.cause, a.effect))
            .unwrap_or_default();
        format!("self-loop on `{node}`{witness}")
    } else {
        format!("causal loop {cycle}")
    };
    Diagnostic::new(Code::R4Cycle, message, cycle.nodes.clone())
}

fn reachable(graph: &CausalGraph<'_>, from: usize, to: usize) -> bool {
    let mut seen = vec![false; graph.names.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &graph.succ[v] {
            if w == to {
                return true;
            }
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// Canonical entity labels on one side of the causal edges `src -> dst`.
fn supporting_labels(
    diagram: &CausalDiagram,
    src: &str,
    dst: &str,
    effect_side: bool,
) -> Vec<String> {
    let mut labels = BTreeSet::new();
    for kind in [EdgeKind::VariableCausal, EdgeKind::ArtificialCausal] {
        if let Some(prov) = diagram.provenance(src, dst, kind) {
            for a in prov {
                labels.insert(if effect_side {
                    a.effect.clone()
                } else {
                    a.cause.clone()
                });
            }
        }
    }
    labels.into_iter().collect()
}

fn mediator_suggestion(
    diagram: &CausalDiagram,
    spec: &CurationSpec,
    cause: &str,
    mediator: &str,
    effect: &str,
    into: &mut Suggestion,
) {
    if let Some(art) = diagram.artificial(mediator) {
        let parts: Vec<String> = art.constituents.iter().map(|c| c.to_string()).collect();
        into.reclassifications.push(Reclassification {
            mediator: mediator.to_string(),
            note: format!(
                "`{mediator}` is an interaction of {}; its links are not ordinary causal relations, so attribute the effect on `{effect}` to the constituent that actually carries it",
                parts.join(" & ")
            ),
        });
        return;
    }
    let incoming = supporting_labels(diagram, cause, mediator, true);
    let outgoing = supporting_labels(diagram, mediator, effect, false);
    let interactions: BTreeSet<String> = spec
        .interactions
        .iter()
        .map(|i| normalize(&i.name))
        .collect();
    let evidence: Vec<&str> = diagram
        .variable(mediator)
        .map(|v| {
            v.entities()
                .filter(|e| interactions.contains(&normalize(e)))
                .collect()
        })
        .unwrap_or_default();
    let clean_split = !incoming.is_empty()
        && !outgoing.is_empty()
        && incoming.iter().all(|l| !outgoing.contains(l));

    if !evidence.is_empty() {
        into.reclassifications.push(Reclassification {
            mediator: mediator.to_string(),
            note: format!(
                "`{}` inside `{mediator}` is an interaction entity; model it as an artificial node instead of a value",
                evidence.join("`, `")
            ),
        });
    }
    if evidence.is_empty() || clean_split {
        into.splits
            .push(SplitSuggestion::new(mediator, incoming, outgoing));
    }
}

pub fn check_r4(diagram: &CausalDiagram, spec: &CurationSpec, max_len: usize) -> Vec<Diagnostic> {
    check_r4_with(
        diagram,
        spec,
        max_len,
        &find_cycles_bounded(diagram, diagram::MAX_CYCLES),
    )
}

fn check_r4_with(
    diagram: &CausalDiagram,
    spec: &CurationSpec,
    max_len: usize,
    cycles: &CycleReport,
) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = cycles
        .cycles
        .iter()
        .map(|c| cycle_diagnostic(diagram, c))
        .collect();

    let graph = CausalGraph::new(diagram);
    for denial in &spec.denials {
        let (Ok(from), Ok(to)) = (
            graph.index_of(denial.cause()),
            graph.index_of(denial.effect()),
        ) else {
            continue;
        };
        if !reachable(&graph, from, to) {
            continue;
        }
        let paths = paths_between(
            diagram,
            2,
            max_len.max(2),
            Some(denial.cause()),
            Some(denial.effect()),
        )
        .expect("denial endpoints exist");
        let mut suggestion = Suggestion::default();
        for path in paths.iter().filter(|p| p.nodes.len() == 3) {
            mediator_suggestion(
                diagram,
                spec,
                &path.nodes[0],
                &path.nodes[1],
                &path.nodes[2],
                &mut suggestion,
            );
        }
        let subjects: Vec<String> = if paths.is_empty() {
            vec![format!("{} ~> {}", denial.cause(), denial.effect())]
        } else {
            paths.iter().map(|p| p.to_string()).collect()
        };
        let message = if paths.is_empty() {
            format!(
                "denied relation {} -> {} is implied by a causal path longer than {max_len} nodes",
                denial.cause(),
                denial.effect()
            )
        } else {
            format!(
                "denied relation {} -> {} is implied by {} causal path(s)",
                denial.cause(),
                denial.effect(),
                paths.len()
            )
        };
        out.push(
            Diagnostic::new(Code::R4Transitivity, message, subjects).with_suggestion(suggestion),
        );
    }
    out
}

/// Orders diagnostics by severity, then code, then first subject. Stable.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (a.severity().rank(), a.code.as_str(), &a.subjects[0]).cmp(&(
            b.severity().rank(),
            b.code.as_str(),
            &b.subjects[0],
        ))
    });
}

/// Runs every checker over prepared inputs. `resolution` carries the
/// diagnostics produced while building the diagram.
pub fn check_all(
    bundle: &CorpusBundle,
    spec: &CurationSpec,
    diagram: &CausalDiagram,
    resolution: &[Diagnostic],
    settings: LintSettings,
) -> Vec<Diagnostic> {
    let cycles = find_cycles_bounded(diagram, diagram::MAX_CYCLES);
    collect_all(bundle, spec, diagram, resolution, settings, &cycles)
}

fn collect_all(
    bundle: &CorpusBundle,
    spec: &CurationSpec,
    diagram: &CausalDiagram,
    resolution: &[Diagnostic],
    settings: LintSettings,
    cycles: &CycleReport,
) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = resolution.to_vec();
    out.extend(validate_spec(spec));
    out.extend(check_r1(bundle, spec, settings.near_dup_threshold));
    out.extend(check_r2(bundle, spec));
    out.extend(check_r3(diagram));
    out.extend(check_r4_with(diagram, spec, settings.max_path_len, cycles));
    sort_diagnostics(&mut out);
    out
}

/// Everything one lint run produces.
#[derive(Debug, Clone)]
pub struct LintRun {
    pub diagram: CausalDiagram,
    pub diagnostics: Vec<Diagnostic>,
    /// Tool notices, such as bounded cycle enumeration.
    pub notices: Vec<String>,
}

/// Builds the diagram from `bundle` and `spec` and runs every checker.
pub fn lint(bundle: &CorpusBundle, spec: &CurationSpec, settings: LintSettings) -> LintRun {
    let (diagram, resolution) = diagram::build_diagram(bundle, spec);
    lint_diagram(bundle, spec, diagram, &resolution, settings)
}

/// Runs every checker against an already built (or hand-edited) diagram.
pub fn lint_diagram(
    bundle: &CorpusBundle,
    spec: &CurationSpec,
    diagram: CausalDiagram,
    resolution: &[Diagnostic],
    settings: LintSettings,
) -> LintRun {
    let cycles = find_cycles_bounded(&diagram, diagram::MAX_CYCLES);
    let diagnostics = collect_all(bundle, spec, &diagram, resolution, settings, &cycles);
    LintRun {
        notices: cycles.notices(),
        diagram,
        diagnostics,
    }
}
