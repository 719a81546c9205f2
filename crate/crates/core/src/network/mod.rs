//! Single-source multicast networks.
//!
//! A [`Network`] is a finite acyclic multigraph with a distinguished source
//! and a non-empty set of terminals. Edges are first-class records with
//! string ids, so parallel edges stay distinguishable; vertex adjacency is
//! derived from the edge list and always listed in [`EdgeOrder`].
//!
//! Networks are only obtainable through [`validate_network`], which checks
//! the seven structural axioms and reports every violation it finds.

mod builtin;
mod flow;
mod order;
mod transform;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::{builtin_network, Builtin, BUTTERFLY_JSON, LATIN_JSON};
pub use flow::{min_cut, min_cut_at, mu, CutValue};
pub use order::{extend_edge_order, natural_cmp, EdgeOrder};
pub use transform::{add_supersource, routing_fixable_vertices};

/// Role of a vertex inside a validated network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Source,
    Intermediate,
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

/// Unvalidated network description, exactly as stored in network files:
/// `{"vertices": [...], "edges": [[id, tail, head], ...], "source": ..., "terminals": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNetwork {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, String)>,
    pub source: String,
    pub terminals: Vec<String>,
}

impl RawNetwork {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// A violated axiom or schema rule. Axioms are numbered 1-7 in the usual
/// order: acyclic multigraph, source is a vertex, terminals are vertices,
/// non-empty terminal set without the source, no edges into the source or
/// out of terminals, terminals reachable, intermediates on a source-terminal
/// path.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("terminal `{0}` listed more than once")]
    DuplicateTerminal(String),
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("axiom 1: the graph has a directed cycle through {0:?}")]
    Cycle(Vec<String>),
    #[error("axiom 2: source `{0}` is not a vertex")]
    SourceNotVertex(String),
    #[error("axiom 3: terminal `{0}` is not a vertex")]
    TerminalNotVertex(String),
    #[error("axiom 4: the terminal set is empty")]
    NoTerminals,
    #[error("axiom 4: source `{0}` is also listed as a terminal")]
    SourceIsTerminal(String),
    #[error("axiom 5: source has incoming edge `{0}`")]
    SourceHasIncoming(String),
    #[error("axiom 5: terminal `{terminal}` has outgoing edge `{edge}`")]
    TerminalHasOutgoing { terminal: String, edge: String },
    #[error("axiom 6: terminal `{0}` is not reachable from the source")]
    UnreachableTerminal(String),
    #[error("axiom 7: intermediate vertex `{0}` is not reachable from the source")]
    UnreachableVertex(String),
    #[error("axiom 7: intermediate vertex `{0}` reaches no terminal")]
    DeadEndVertex(String),
}

impl ValidationError {
    /// Number of the violated axiom, or `None` for schema errors.
    pub fn axiom(&self) -> Option<u8> {
        use ValidationError::*;
        match self {
            DuplicateVertex(_) | DuplicateEdge(_) | DuplicateTerminal(_) | UnknownVertex { .. } => {
                None
            }
            Cycle(_) => Some(1),
            SourceNotVertex(_) => Some(2),
            TerminalNotVertex(_) => Some(3),
            NoTerminals | SourceIsTerminal(_) => Some(4),
            SourceHasIncoming(_) | TerminalHasOutgoing { .. } => Some(5),
            UnreachableTerminal(_) => Some(6),
            UnreachableVertex(_) | DeadEndVertex(_) => Some(7),
        }
    }
}

/// Every problem found while validating a [`RawNetwork`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid network ({} problem(s))", self.0.len())?;
        for e in &self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("`{0}` is not a terminal")]
    NotATerminal(String),
    #[error("edge order is not a linear extension: `{earlier}` precedes `{later}` on a path")]
    BadOrder { earlier: String, later: String },
    #[error("edge order covers {got} edges, network has {expected}")]
    OrderSize { got: usize, expected: usize },
    #[error("unknown builtin network `{0}` (expected butterfly, latin or combination:n,k)")]
    UnknownBuiltin(String),
    #[error("combination network needs n >= k >= 1, got n={n}, k={k}")]
    BadCombination { n: usize, k: usize },
    #[error("builtin data file is malformed: {0}")]
    BuiltinData(String),
}

/// A validated single-source network. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Network {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    source: usize,
    terminals: Vec<usize>,
    kinds: Vec<VertexKind>,
    order: EdgeOrder,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    topo: Vec<usize>,
    index: HashMap<String, usize>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.edges == other.edges
            && self.source == other.source
            && self.terminals == other.terminals
            && self.order == other.order
    }
}

impl Eq for Network {}

/// Checks every axiom and returns the network, or the complete list of
/// violations.
pub fn validate_network(raw: &RawNetwork) -> Result<Network, ValidationErrors> {
    use ValidationError as E;
    let mut errors = Vec::new();

    let mut index = HashMap::new();
    for (i, v) in raw.vertices.iter().enumerate() {
        if index.insert(v.clone(), i).is_some() {
            errors.push(E::DuplicateVertex(v.clone()));
        }
    }
    let mut seen_edges = HashSet::new();
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (id, tail, head) in &raw.edges {
        if !seen_edges.insert(id.as_str()) {
            errors.push(E::DuplicateEdge(id.clone()));
        }
        let mut resolve = |name: &String| match index.get(name) {
            Some(&i) => Some(i),
            None => {
                errors.push(E::UnknownVertex { edge: id.clone(), vertex: name.clone() });
                None
            }
        };
        let (t, h) = (resolve(tail), resolve(head));
        if let (Some(tail), Some(head)) = (t, h) {
            edges.push(Edge { id: id.clone(), tail, head });
        }
    }
    let n = raw.vertices.len();

    let source = index.get(&raw.source).copied();
    if source.is_none() {
        errors.push(E::SourceNotVertex(raw.source.clone()));
    }
    let mut terminals = Vec::new();
    let mut seen_terminals = HashSet::new();
    for t in &raw.terminals {
        if !seen_terminals.insert(t.as_str()) {
            errors.push(E::DuplicateTerminal(t.clone()));
            continue;
        }
        match index.get(t) {
            Some(&i) => terminals.push(i),
            None => errors.push(E::TerminalNotVertex(t.clone())),
        }
    }
    if raw.terminals.is_empty() {
        errors.push(E::NoTerminals);
    }
    if raw.terminals.contains(&raw.source) {
        errors.push(E::SourceIsTerminal(raw.source.clone()));
    }

    let mut out_adj = vec![Vec::new(); n];
    let mut in_adj = vec![Vec::new(); n];
    for (e, edge) in edges.iter().enumerate() {
        out_adj[edge.tail].push(e);
        in_adj[edge.head].push(e);
    }

    let topo = topological_order(n, &edges, &in_adj, &out_adj);
    if topo.is_none() {
        let cycle = find_cycle(n, &edges, &out_adj);
        errors.push(E::Cycle(cycle.into_iter().map(|v| raw.vertices[v].clone()).collect()));
    }

    if let Some(s) = source {
        for &e in &in_adj[s] {
            errors.push(E::SourceHasIncoming(edges[e].id.clone()));
        }
    }
    for &t in &terminals {
        if Some(t) == source {
            continue;
        }
        for &e in &out_adj[t] {
            errors.push(E::TerminalHasOutgoing {
                terminal: raw.vertices[t].clone(),
                edge: edges[e].id.clone(),
            });
        }
    }

    if let Some(s) = source {
        let from_source = reach(n, &[s], |v| out_adj[v].iter().map(|&e| edges[e].head));
        for &t in &terminals {
            if t != s && !from_source[t] {
                errors.push(E::UnreachableTerminal(raw.vertices[t].clone()));
            }
        }
        let to_terminal = reach(n, &terminals, |v| in_adj[v].iter().map(|&e| edges[e].tail));
        let terminal_set: HashSet<usize> = terminals.iter().copied().collect();
        for v in 0..n {
            if v == s || terminal_set.contains(&v) {
                continue;
            }
            if !from_source[v] {
                errors.push(E::UnreachableVertex(raw.vertices[v].clone()));
            } else if !to_terminal[v] {
                errors.push(E::DeadEndVertex(raw.vertices[v].clone()));
            }
        }
    }

    if !errors.is_empty() {
        return Err(ValidationErrors(errors));
    }

    let source = source.expect("checked above");
    let terminal_set: HashSet<usize> = terminals.iter().copied().collect();
    let kinds = (0..n)
        .map(|v| {
            if v == source {
                VertexKind::Source
            } else if terminal_set.contains(&v) {
                VertexKind::Terminal
            } else {
                VertexKind::Intermediate
            }
        })
        .collect();
    let mut net = Network {
        vertices: raw.vertices.clone(),
        edges,
        source,
        terminals,
        kinds,
        order: EdgeOrder::identity(0),
        in_edges: in_adj,
        out_edges: out_adj,
        topo: topo.expect("acyclic"),
        index,
    };
    let order = extend_edge_order(&net);
    net.install_order(order);
    Ok(net)
}

fn topological_order(
    n: usize,
    edges: &[Edge],
    in_adj: &[Vec<usize>],
    out_adj: &[Vec<usize>],
) -> Option<Vec<usize>> {
    let mut indegree: Vec<usize> = in_adj.iter().map(Vec::len).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut topo = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        topo.push(v);
        for &e in &out_adj[v] {
            let h = edges[e].head;
            indegree[h] -= 1;
            if indegree[h] == 0 {
                queue.push_back(h);
            }
        }
    }
    (topo.len() == n).then_some(topo)
}

fn find_cycle(n: usize, edges: &[Edge], out_adj: &[Vec<usize>]) -> Vec<usize> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < out_adj[v].len() {
                let h = edges[out_adj[v][*next]].head;
                *next += 1;
                match state[h] {
                    0 => {
                        state[h] = 1;
                        parent[h] = v;
                        stack.push((h, 0));
                    }
                    1 => {
                        let mut cycle = vec![h];
                        let mut u = v;
                        while u != h {
                            cycle.push(u);
                            u = parent[u];
                        }
                        cycle.reverse();
                        return cycle;
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    Vec::new()
}

fn reach<I, F>(n: usize, roots: &[usize], next: F) -> Vec<bool>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = roots.to_vec();
    for &r in roots {
        seen[r] = true;
    }
    while let Some(v) = stack.pop() {
        for w in next(v) {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

impl Network {
    /// Parses and validates a network file.
    pub fn from_json(text: &str) -> Result<Network, NetworkFileError> {
        let raw = RawNetwork::from_json(text)?;
        Ok(validate_network(&raw)?)
    }

    pub fn to_raw(&self) -> RawNetwork {
        RawNetwork {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    (e.id.clone(), self.vertices[e.tail].clone(), self.vertices[e.head].clone())
                })
                .collect(),
            source: self.vertices[self.source].clone(),
            terminals: self.terminals.iter().map(|&t| self.vertices[t].clone()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("network serializes")
    }

    fn install_order(&mut self, order: EdgeOrder) {
        for list in self.in_edges.iter_mut().chain(self.out_edges.iter_mut()) {
            list.sort_by_key(|&e| order.rank(e));
        }
        self.order = order;
    }

    /// Same network with a different (caller-supplied) extension of the
    /// path order. Fails if `order` does not extend it.
    pub fn with_edge_order(&self, order: EdgeOrder) -> Result<Network, NetworkError> {
        if order.len() != self.edges.len() {
            return Err(NetworkError::OrderSize { got: order.len(), expected: self.edges.len() });
        }
        for (e, edge) in self.edges.iter().enumerate() {
            for &next in &self.out_edges[edge.head] {
                if order.rank(next) <= order.rank(e) {
                    return Err(NetworkError::BadOrder {
                        earlier: self.edges[e].id.clone(),
                        later: self.edges[next].id.clone(),
                    });
                }
            }
        }
        let mut net = self.clone();
        net.install_order(order);
        Ok(net)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.kinds[v]
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.kinds[v] == VertexKind::Terminal
    }

    pub fn is_intermediate(&self, v: usize) -> bool {
        self.kinds[v] == VertexKind::Intermediate
    }

    /// Intermediate vertices in topological order.
    pub fn intermediates(&self) -> impl Iterator<Item = usize> + '_ {
        self.topo.iter().copied().filter(move |&v| self.is_intermediate(v))
    }

    /// All vertices, topologically sorted (source first).
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Incoming edges of `v`, sorted by [`EdgeOrder`].
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Outgoing edges of `v`, sorted by [`EdgeOrder`].
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn edge_order(&self) -> &EdgeOrder {
        &self.order
    }

    pub fn terminal_index(&self, name: &str) -> Result<usize, NetworkError> {
        let v = self.vertex_index(name).ok_or_else(|| NetworkError::UnknownVertex(name.into()))?;
        if self.is_terminal(v) {
            Ok(v)
        } else {
            Err(NetworkError::NotATerminal(name.into()))
        }
    }
}

/// Failure to turn a network file into a [`Network`].
#[derive(Debug, Error)]
pub enum NetworkFileError {
    #[error("malformed network file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(#[from] ValidationErrors),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(edges: &[(&str, &str, &str)], vertices: &[&str], source: &str, terminals: &[&str]) -> RawNetwork {
        RawNetwork {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(i, t, h)| (i.to_string(), t.to_string(), h.to_string()))
                .collect(),
            source: source.into(),
            terminals: terminals.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn axioms(r: &RawNetwork) -> Vec<Option<u8>> {
        validate_network(r).unwrap_err().0.iter().map(ValidationError::axiom).collect()
    }

    #[test]
    fn single_edge_is_valid() {
        let n = validate_network(&raw(&[("e", "S", "T")], &["S", "T"], "S", &["T"])).unwrap();
        assert_eq!(n.edge_count(), 1);
        assert_eq!(n.kind(0), VertexKind::Source);
        assert_eq!(n.kind(1), VertexKind::Terminal);
    }

    #[test]
    fn butterfly_with_reversed_e9_violates_axiom_5() {
        let mut r = builtin_network(&Builtin::Butterfly).unwrap().to_raw();
        let e9 = r.edges.iter_mut().find(|e| e.0 == "e9").unwrap();
        *e9 = ("e9".into(), "T2".into(), "V4".into());
        let ax = axioms(&r);
        assert!(ax.contains(&Some(5)), "{ax:?}");
    }

    #[test]
    fn reports_every_violation() {
        // cycle A<->B, dangling D, terminal with out edge, source as terminal
        let r = raw(
            &[("a", "S", "A"), ("b", "A", "B"), ("c", "B", "A"), ("d", "A", "T"), ("x", "T", "A")],
            &["S", "A", "B", "T", "D"],
            "S",
            &["T", "S"],
        );
        let ax = axioms(&r);
        for want in [1, 4, 5, 7] {
            assert!(ax.contains(&Some(want)), "missing axiom {want} in {ax:?}");
        }
    }

    #[test]
    fn unreachable_terminal_and_dead_end() {
        let r = raw(
            &[("a", "S", "T"), ("b", "X", "U"), ("c", "S", "D")],
            &["S", "T", "U", "X", "D"],
            "S",
            &["T", "U"],
        );
        let errs = validate_network(&r).unwrap_err().0;
        assert!(errs.contains(&ValidationError::UnreachableTerminal("U".into())));
        assert!(errs.contains(&ValidationError::UnreachableVertex("X".into())));
        assert!(errs.contains(&ValidationError::DeadEndVertex("D".into())));
    }

    #[test]
    fn schema_errors_name_the_id() {
        let r = raw(&[("e", "S", "T"), ("e", "S", "T")], &["S", "T"], "S", &["T"]);
        let errs = validate_network(&r).unwrap_err().0;
        assert_eq!(errs, vec![ValidationError::DuplicateEdge("e".into())]);
        let r = raw(&[("e", "S", "Q")], &["S", "T"], "S", &["T"]);
        let errs = validate_network(&r).unwrap_err().0;
        assert!(errs.contains(&ValidationError::UnknownVertex { edge: "e".into(), vertex: "Q".into() }));
    }

    #[test]
    fn missing_source_and_empty_terminals() {
        let r = raw(&[], &["A"], "S", &[]);
        let ax = axioms(&r);
        assert!(ax.contains(&Some(2)) && ax.contains(&Some(4)));
        let r = raw(&[], &["S"], "S", &["Z"]);
        assert!(axioms(&r).contains(&Some(3)));
    }

    #[test]
    fn parallel_edges_are_kept_apart() {
        let n = validate_network(&raw(&[("b", "S", "T"), ("a", "S", "T")], &["S", "T"], "S", &["T"]))
            .unwrap();
        let ids: Vec<_> = n.in_edges(1).iter().map(|&e| n.edge(e).id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
    }

    #[test]
    fn json_round_trip_for_builtins() {
        for b in [Builtin::Butterfly, Builtin::Latin, Builtin::Combination { n: 5, k: 2 }] {
            let n = builtin_network(&b).unwrap();
            let back = Network::from_json(&n.to_json()).unwrap();
            assert_eq!(n, back);
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = Network::from_json("").unwrap_err();
        assert!(matches!(err, NetworkFileError::Syntax(_)));
        let err = Network::from_json("{\"vertices\": [}").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }
}
