//! Building the variable-level diagram and the graph analytics the rules
//! run on: simple paths, simple cycles and mediated edges.
//!
//! All analytics see causal edges only (both causal kinds); membership edges
//! never take part. Nodes are handled in ascending name order so every
//! result comes out in a byte-stable order.

use std::collections::{BTreeMap, BTreeSet};

use crate::ingest::CorpusBundle;
use crate::model::{
    AssertionRef, CausalDiagram, CausalPath, Code, CurationSpec, Cycle, Diagnostic, DiagramEdge,
    DiagramError, EdgeKind, NodeKind,
};
use crate::resolve::{normalize, Resolution, Resolver};

/// Cycle enumeration gives up after this many cycles.
pub const MAX_CYCLES: usize = 100_000;
/// Above this many nodes in cyclic components a bounded-enumeration notice is
/// always reported.
pub const MAX_EXACT_NODES: usize = 64;

/// Maps canonical labels to the node that owns them: an interaction by its
/// name, otherwise the variable whose value lists the label. Interactions win
/// over variables, earlier declarations over later ones.
#[derive(Debug, Clone, Default)]
pub struct Ownership {
    owners: BTreeMap<String, String>,
}

impl Ownership {
    pub fn new(spec: &CurationSpec) -> Self {
        let mut owners = BTreeMap::new();
        for inter in &spec.interactions {
            owners
                .entry(normalize(&inter.name))
                .or_insert_with(|| inter.name.clone());
        }
        for var in &spec.variables {
            for label in var.entities() {
                owners
                    .entry(normalize(label))
                    .or_insert_with(|| var.name.clone());
            }
        }
        Ownership { owners }
    }

    pub fn owner(&self, canonical: &str) -> Option<&str> {
        self.owners.get(&normalize(canonical)).map(String::as_str)
    }
}

/// Builds the diagram: one node per variable and interaction, membership
/// edges from each interaction to its constituent variables, and causal
/// edges lifted from the assertions. Assertions whose endpoints fall into
/// one node become self-loops; unresolvable endpoints become
/// `NAME-UNRESOLVED` diagnostics.
pub fn build_diagram(
    bundle: &CorpusBundle,
    spec: &CurationSpec,
) -> (CausalDiagram, Vec<Diagnostic>) {
    let mut names = BTreeSet::new();
    let variables: Vec<_> = spec
        .variables
        .iter()
        .filter(|v| names.insert(v.name.clone()))
        .cloned()
        .collect();
    let artificials: Vec<_> = spec
        .interactions
        .iter()
        .filter(|i| names.insert(i.name.clone()))
        .cloned()
        .collect();
    let mut diagram =
        CausalDiagram::new(variables, artificials.clone()).expect("node names deduplicated above");

    for art in &artificials {
        for var in art.distinct_variables() {
            if diagram.node_kind(var) == Some(NodeKind::Variable) {
                diagram
                    .add_edge(DiagramEdge::new(
                        art.name.clone(),
                        var,
                        EdgeKind::Membership,
                        [],
                    ))
                    .expect("endpoints exist");
            }
        }
    }

    let resolver = Resolver::for_spec(spec);
    let ownership = Ownership::new(spec);
    let locate = |label: &str| -> Option<(String, String)> {
        match resolver.resolve(label) {
            Resolution::Canonical(c) => ownership.owner(&c).map(|o| (c.clone(), o.to_string())),
            Resolution::Unresolved => None,
        }
    };

    // raw label -> number of rows it could not be resolved in
    let mut unresolved: BTreeMap<String, usize> = BTreeMap::new();
    for (index, assertion) in bundle.assertions.iter().enumerate() {
        let cause = locate(&assertion.cause);
        let effect = locate(&assertion.effect);
        let (Some((cause_label, src)), Some((effect_label, dst))) = (cause.clone(), effect.clone())
        else {
            if cause.is_none() {
                *unresolved.entry(assertion.cause.clone()).or_default() += 1;
            }
            if effect.is_none() && (cause.is_some() || assertion.effect != assertion.cause) {
                *unresolved.entry(assertion.effect.clone()).or_default() += 1;
            }
            continue;
        };
        let support = AssertionRef {
            index,
            cause: cause_label,
            effect: effect_label,
        };
        if src == dst {
            diagram
                .add_self_loop(&src, [support])
                .expect("owner exists");
            continue;
        }
        let kind = if diagram.node_kind(&src) == Some(NodeKind::Variable)
            && diagram.node_kind(&dst) == Some(NodeKind::Variable)
        {
            EdgeKind::VariableCausal
        } else {
            EdgeKind::ArtificialCausal
        };
        diagram
            .add_edge(DiagramEdge::new(src, dst, kind, [support]))
            .expect("owners exist");
    }

    let diagnostics = unresolved
        .into_iter()
        .map(|(label, rows)| {
            let rows = if rows == 1 {
                "1 assertion".to_string()
            } else {
                format!("{rows} assertions")
            };
            Diagnostic::new(
                Code::NameUnresolved,
                format!("`{label}` does not resolve to any variable value or interaction; {rows} dropped"),
                vec![label],
            )
        })
        .collect();
    (diagram, diagnostics)
}

/// Dense adjacency over causal edges, nodes indexed in name order. Self
/// edges are kept apart from the adjacency lists.
pub(crate) struct CausalGraph<'a> {
    pub names: Vec<&'a str>,
    index: BTreeMap<&'a str, usize>,
    /// Sorted successor lists, each successor with the edge kind used.
    pub succ: Vec<Vec<(usize, EdgeKind)>>,
    pub self_loops: BTreeSet<usize>,
}

impl<'a> CausalGraph<'a> {
    pub fn new(diagram: &'a CausalDiagram) -> Self {
        let names = diagram.node_names();
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut succ: Vec<BTreeMap<usize, EdgeKind>> = vec![BTreeMap::new(); names.len()];
        let mut self_loops = BTreeSet::new();
        for edge in diagram.causal_edges() {
            let (s, d) = (index[edge.src.as_str()], index[edge.dst.as_str()]);
            if s == d {
                self_loops.insert(s);
            } else {
                let slot = succ[s].entry(d).or_insert(edge.kind);
                *slot = (*slot).min(edge.kind);
            }
        }
        for (node, _) in diagram.self_loops() {
            self_loops.insert(index[node]);
        }
        CausalGraph {
            names,
            index,
            succ: succ.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }

    pub fn index_of(&self, name: &str) -> Result<usize, DiagramError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| DiagramError::UnknownEndpoint(name.to_string()))
    }

    pub fn has_edge(&self, s: usize, d: usize) -> bool {
        self.succ[s].binary_search_by_key(&d, |(n, _)| *n).is_ok()
    }

    fn path(&self, nodes: &[usize]) -> CausalPath {
        CausalPath {
            nodes: nodes.iter().map(|&i| self.names[i].to_string()).collect(),
            kinds: nodes
                .windows(2)
                .map(|w| {
                    let pos = self.succ[w[0]]
                        .binary_search_by_key(&w[1], |(n, _)| *n)
                        .expect("consecutive path nodes are adjacent");
                    self.succ[w[0]][pos].1
                })
                .collect(),
        }
    }

    /// Simple paths from `start` with node counts in `[min_nodes, max_nodes]`,
    /// optionally ending at `end`, in lexicographic order.
    fn paths_from(
        &self,
        start: usize,
        end: Option<usize>,
        min_nodes: usize,
        max_nodes: usize,
        out: &mut Vec<CausalPath>,
    ) {
        let mut stack = vec![start];
        let mut on_path = vec![false; self.names.len()];
        on_path[start] = true;
        self.extend(&mut stack, &mut on_path, end, min_nodes, max_nodes, out);
    }

    fn extend(
        &self,
        stack: &mut Vec<usize>,
        on_path: &mut [bool],
        end: Option<usize>,
        min_nodes: usize,
        max_nodes: usize,
        out: &mut Vec<CausalPath>,
    ) {
        let last = *stack.last().expect("non-empty path");
        if stack.len() >= min_nodes && end.is_none_or(|e| e == last) {
            out.push(self.path(stack));
        }
        if stack.len() == max_nodes || (end == Some(last) && stack.len() > 1) {
            return;
        }
        for &(next, _) in &self.succ[last] {
            if on_path[next] {
                continue;
            }
            on_path[next] = true;
            stack.push(next);
            self.extend(stack, on_path, end, min_nodes, max_nodes, out);
            stack.pop();
            on_path[next] = false;
        }
    }
}

/// Every simple path over causal edges with between 3 and `max_len` nodes,
/// optionally restricted to a start and/or end node, sorted
/// lexicographically by node names.
pub fn enumerate_paths(
    diagram: &CausalDiagram,
    max_len: usize,
    from: Option<&str>,
    to: Option<&str>,
) -> Result<Vec<CausalPath>, DiagramError> {
    paths_between(diagram, 3, max_len, from, to)
}

/// Like [`enumerate_paths`] with an explicit minimum node count.
pub fn paths_between(
    diagram: &CausalDiagram,
    min_nodes: usize,
    max_nodes: usize,
    from: Option<&str>,
    to: Option<&str>,
) -> Result<Vec<CausalPath>, DiagramError> {
    let graph = CausalGraph::new(diagram);
    let start = from.map(|n| graph.index_of(n)).transpose()?;
    let end = to.map(|n| graph.index_of(n)).transpose()?;
    let mut out = Vec::new();
    let starts: Vec<usize> = match start {
        Some(s) => vec![s],
        None => (0..graph.names.len()).collect(),
    };
    for s in starts {
        graph.paths_from(s, end, min_nodes.max(1), max_nodes, &mut out);
    }
    out.sort();
    Ok(out)
}

/// Result of cycle enumeration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycleReport {
    pub cycles: Vec<Cycle>,
    pub truncated: bool,
    /// Nodes that sit in a strongly connected component with a cycle.
    pub cyclic_nodes: usize,
}

impl CycleReport {
    pub fn notices(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.truncated {
            out.push(format!(
                "cycle enumeration stopped after {MAX_CYCLES} cycles; the cycle list is incomplete"
            ));
        }
        if self.cyclic_nodes > MAX_EXACT_NODES {
            out.push(format!(
                "{} nodes lie on cycles (more than {MAX_EXACT_NODES}); cycle enumeration is bounded at {MAX_CYCLES}",
                self.cyclic_nodes
            ));
        }
        out
    }
}

/// Every simple directed cycle over causal edges, self-loops included, in
/// canonical rotation and sorted.
pub fn find_cycles(diagram: &CausalDiagram) -> Vec<Cycle> {
    find_cycles_bounded(diagram, MAX_CYCLES).cycles
}

/// Johnson's circuit enumeration, stopping after `limit` cycles.
pub fn find_cycles_bounded(diagram: &CausalDiagram, limit: usize) -> CycleReport {
    let graph = CausalGraph::new(diagram);
    let n = graph.names.len();
    let mut found: Vec<Vec<usize>> = graph.self_loops.iter().map(|&i| vec![i]).collect();
    let mut truncated = found.len() > limit;
    found.truncate(limit);

    let mut cyclic = vec![false; n];
    for &i in &graph.self_loops {
        cyclic[i] = true;
    }
    for comp in strongly_connected(&graph.succ, &vec![true; n]) {
        if comp.len() > 1 {
            for v in comp {
                cyclic[v] = true;
            }
        }
    }

    let mut active = vec![true; n];
    let mut search = Johnson {
        succ: &graph.succ,
        blocked: vec![false; n],
        blocked_by: vec![BTreeSet::new(); n],
        stack: Vec::new(),
        member: vec![false; n],
        found: &mut found,
        limit,
    };
    'outer: for start in 0..n {
        if truncated {
            break;
        }
        // smallest active node that sits in a non-trivial component
        let comps = strongly_connected(&graph.succ, &active);
        let Some(comp) = comps
            .into_iter()
            .find(|c| c.len() > 1 && c.contains(&start))
        else {
            active[start] = false;
            continue;
        };
        for v in 0..n {
            search.member[v] = false;
        }
        for &v in &comp {
            search.member[v] = true;
            search.blocked[v] = false;
            search.blocked_by[v].clear();
        }
        if search.circuit(start, start).is_err() {
            truncated = true;
            break 'outer;
        }
        active[start] = false;
    }

    let mut cycles: Vec<Cycle> = found
        .iter()
        .map(|c| Cycle::canonical(c.iter().map(|&i| graph.names[i].to_string()).collect()))
        .collect();
    cycles.sort();
    cycles.dedup();
    CycleReport {
        cycles,
        truncated,
        cyclic_nodes: cyclic.iter().filter(|c| **c).count(),
    }
}

struct Limit;

struct Johnson<'g, 'f> {
    succ: &'g [Vec<(usize, EdgeKind)>],
    blocked: Vec<bool>,
    blocked_by: Vec<BTreeSet<usize>>,
    stack: Vec<usize>,
    member: Vec<bool>,
    found: &'f mut Vec<Vec<usize>>,
    limit: usize,
}

impl Johnson<'_, '_> {
    fn unblock(&mut self, v: usize) {
        let mut work = vec![v];
        while let Some(u) = work.pop() {
            if self.blocked[u] {
                self.blocked[u] = false;
                work.extend(std::mem::take(&mut self.blocked_by[u]));
            }
        }
    }

    fn circuit(&mut self, v: usize, start: usize) -> Result<bool, Limit> {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v] = true;
        let succ = self.succ;
        for &(w, _) in &succ[v] {
            if !self.member[w] || w < start {
                continue;
            }
            if w == start {
                if self.found.len() >= self.limit {
                    return Err(Limit);
                }
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w] && self.circuit(w, start)? {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &(w, _) in &succ[v] {
                if self.member[w] && w >= start {
                    self.blocked_by[w].insert(v);
                }
            }
        }
        self.stack.pop();
        Ok(closed)
    }
}

/// Tarjan's strongly connected components over the nodes marked `active`.
fn strongly_connected(succ: &[Vec<(usize, EdgeKind)>], active: &[bool]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if !active[root] || index[root] != usize::MAX {
            continue;
        }
        // explicit DFS frames: (node, next successor position)
        let mut frames = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if let Some(&(w, _)) = succ[v].get(*pos) {
                *pos += 1;
                if !active[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// A causal edge `src -> dst` that also runs through `mediator`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mediation {
    pub src: String,
    pub dst: String,
    pub mediator: String,
}

/// One entry per (edge, mediator) for every causal edge `A -> C` with some
/// `B` such that `A -> B` and `B -> C` are causal edges.
pub fn find_mediated(diagram: &CausalDiagram) -> Vec<Mediation> {
    let graph = CausalGraph::new(diagram);
    let mut out = Vec::new();
    for a in 0..graph.names.len() {
        for &(c, _) in &graph.succ[a] {
            for &(b, _) in &graph.succ[a] {
                if b != c && graph.has_edge(b, c) {
                    out.push(Mediation {
                        src: graph.names[a].to_string(),
                        dst: graph.names[c].to_string(),
                        mediator: graph.names[b].to_string(),
                    });
                }
            }
        }
    }
    out.sort();
    out
}
