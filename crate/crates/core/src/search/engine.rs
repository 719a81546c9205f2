//! Depth-first search over source emissions and function-table entries.
//!
//! Codewords are placed one at a time with strictly increasing emissions
//! and pushed through the network vertex by vertex. A table entry is
//! chosen the first time its input occurs; terminals record the inputs
//! they have seen and reject a repeat.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::coding::{
    index_tuple, index_tuple_into, tuple_count, Field, FunctionTable, NetworkCode, OuterCode, Symbol,
};
use crate::network::{routing_fixable_vertices, Network};

use super::{SearchError, SearchOptions};

const NONE: u32 = u32::MAX;
const MAX_TABLE_ROWS: usize = 1 << 24;
const STACK_BYTES: usize = 256 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Terminal(usize),
    Fixed,
    Free(usize),
}

#[derive(Debug, Clone)]
struct VertexInfo {
    ins: Vec<usize>,
    outs: Vec<usize>,
    in_count: usize,
    out_count: usize,
    role: Role,
}

/// Read-only description of one feasibility question.
pub(crate) struct Problem<'n> {
    n: &'n Network,
    q: usize,
    code_size: usize,
    field: Option<Field>,
    edges: usize,
    /// Edges carrying the (effective) codeword symbols.
    src_edges: Vec<usize>,
    src_count: usize,
    /// Single free vertex fed by the whole source; its outputs are branched
    /// on as the codewords.
    collapsed: Option<usize>,
    events: Vec<usize>,
    info: Vec<VertexInfo>,
    free: Vec<usize>,
    terminals: Vec<usize>,
    anchor: bool,
    precedence: bool,
}

/// Raw solution: emissions and table state at the moment of success.
#[derive(Debug, Clone)]
pub(crate) struct Solution {
    emissions: Vec<u32>,
    entries: Vec<Vec<u32>>,
    columns: Vec<Vec<u32>>,
}

pub(crate) enum RunResult {
    Found(Solution),
    Exhausted,
    Aborted,
}

impl<'n> Problem<'n> {
    pub(crate) fn new(
        n: &'n Network,
        q: usize,
        field: Option<Field>,
        code_size: usize,
        opts: &SearchOptions,
    ) -> Result<Self, SearchError> {
        let s = n.source();
        let fixed: Vec<usize> = if opts.routing_fix { routing_fixable_vertices(n) } else { Vec::new() };
        let linear = opts.linear_only;
        // the source may be folded into a lone successor
        let heads: Vec<usize> = n.out_edges(s).iter().map(|&e| n.edge(e).head).collect();
        let collapsed = match heads.first() {
            Some(&v)
                if !linear
                    && opts.symmetry_break
                    && heads.iter().all(|&h| h == v)
                    && n.is_intermediate(v)
                    && !fixed.contains(&v) =>
            {
                Some(v)
            }
            _ => None,
        };
        let too_large = |v: usize| SearchError::TooLarge(format!("vertex `{}`", n.vertex_name(v)));
        let mut info = Vec::with_capacity(n.vertex_count());
        let (mut free, mut terminals) = (Vec::new(), Vec::new());
        for v in 0..n.vertex_count() {
            let ins = n.in_edges(v).to_vec();
            let outs = n.out_edges(v).to_vec();
            let in_count = tuple_count(q, ins.len()).ok_or_else(|| too_large(v))?;
            let out_count = tuple_count(q, outs.len()).ok_or_else(|| too_large(v))?;
            let role = if n.is_terminal(v) {
                terminals.push(v);
                Role::Terminal(terminals.len() - 1)
            } else if v == s || Some(v) == collapsed || fixed.contains(&v) {
                Role::Fixed
            } else {
                free.push(v);
                Role::Free(free.len() - 1)
            };
            let needs_rows = matches!(role, Role::Terminal(_) | Role::Free(_));
            if needs_rows && in_count > MAX_TABLE_ROWS || out_count > NONE as usize {
                return Err(too_large(v));
            }
            info.push(VertexInfo { ins, outs, in_count, out_count, role });
        }
        let src_vertex = collapsed.unwrap_or(s);
        let src_edges = n.out_edges(src_vertex).to_vec();
        let src_count = tuple_count(q, src_edges.len()).ok_or_else(|| too_large(src_vertex))?;
        let events = event_order(n, src_vertex);
        Ok(Problem {
            n,
            q,
            code_size,
            field: if linear { field } else { None },
            edges: n.edge_count(),
            src_edges,
            src_count,
            collapsed,
            events,
            info,
            free,
            terminals,
            anchor: opts.symmetry_break,
            precedence: opts.symmetry_break && !linear,
        })
    }

    /// Whether `code_size` distinct effective codewords exist at all.
    pub(crate) fn fits(&self, code_size: usize) -> bool {
        code_size <= self.src_count
    }

    /// Builds the certificate pair from a raw solution, completing unused
    /// entries by replication (single input) or zeros.
    pub(crate) fn assemble(&self, sol: &Solution) -> (OuterCode, NetworkCode) {
        let n = self.n;
        let q = self.q;
        let s = n.source();
        let src_len = n.out_edges(s).len();
        let words: Vec<Vec<Symbol>> = match self.collapsed {
            Some(_) => (0..self.code_size).map(|i| index_tuple(i, src_len, q)).collect(),
            None => sol.emissions.iter().map(|&i| index_tuple(i as usize, src_len, q)).collect(),
        };
        let default = NetworkCode::replication_or_zero(n, q);
        let mut tables = Vec::new();
        for v in n.intermediates() {
            let vi = &self.info[v];
            let table = match vi.role {
                Role::Free(slot) => {
                    let (ki, ko) = (vi.ins.len(), vi.outs.len());
                    match &self.field {
                        None => {
                            let base = default.table(v).unwrap();
                            let entries = &sol.entries[slot];
                            let mut flat = Vec::with_capacity(vi.in_count * ko);
                            for m in 0..vi.in_count {
                                if entries[m] == NONE {
                                    flat.extend_from_slice(base.row(m));
                                } else {
                                    flat.extend(index_tuple(entries[m] as usize, ko, q));
                                }
                            }
                            FunctionTable::new(q, ki, ko, flat).expect("shape")
                        }
                        Some(field) => {
                            let cols: Vec<Vec<Symbol>> = sol.columns[slot]
                                .iter()
                                .map(|&c| index_tuple(if c == NONE { 0 } else { c as usize }, ko, q))
                                .collect();
                            FunctionTable::from_fn(q, ki, ko, |m| {
                                (0..ko)
                                    .map(|j| {
                                        m.iter()
                                            .zip(&cols)
                                            .fold(0, |acc, (&x, col)| field.add(acc, field.mul(x, col[j])))
                                    })
                                    .collect()
                            })
                        }
                    }
                }
                _ if Some(v) == self.collapsed => {
                    let base = default.table(v).unwrap();
                    let ko = vi.outs.len();
                    let mut flat = Vec::with_capacity(vi.in_count * ko);
                    for m in 0..vi.in_count {
                        if m < self.code_size {
                            flat.extend(index_tuple(sol.emissions[m] as usize, ko, q));
                        } else {
                            flat.extend_from_slice(base.row(m));
                        }
                    }
                    FunctionTable::new(q, vi.ins.len(), ko, flat).expect("shape")
                }
                _ => default.table(v).unwrap().clone(),
            };
            tables.push((v, table));
        }
        let code = OuterCode::new(src_len, q, words).expect("distinct emissions");
        let f = NetworkCode::from_tables(n, q, tables).expect("shapes match");
        (code, f)
    }
}

/// Topological order of the vertices after `start`. Terminals are taken
/// greedily, fewest unplaced ancestors first, each preceded by those
/// ancestors, so collisions surface as early as possible.
fn event_order(n: &Network, start: usize) -> Vec<usize> {
    let topo = n.topological_order();
    let mut placed = vec![false; n.vertex_count()];
    for &v in topo {
        placed[v] = true;
        if v == start {
            break;
        }
    }
    let ancestors: Vec<Vec<bool>> = (0..n.vertex_count())
        .map(|t| {
            let mut seen = vec![false; n.vertex_count()];
            let mut stack = vec![t];
            while let Some(v) = stack.pop() {
                for &e in n.in_edges(v) {
                    let u = n.edge(e).tail;
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            seen
        })
        .collect();
    let mut order = Vec::new();
    loop {
        let missing = |t: usize, placed: &[bool]| topo.iter().filter(|&&v| ancestors[t][v] && !placed[v]).count();
        let next = n
            .terminals()
            .iter()
            .copied()
            .filter(|&t| !placed[t])
            .min_by_key(|&t| missing(t, &placed));
        let Some(t) = next else { break };
        for &v in topo {
            if ancestors[t][v] && !placed[v] {
                placed[v] = true;
                order.push(v);
            }
        }
        placed[t] = true;
        order.push(t);
    }
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Fail,
    Found,
    Abort,
}

enum Undo {
    Seen(usize, usize),
    Entry(usize, usize),
    Column(usize, usize),
    Max(usize, i16),
}

enum Branch {
    Emission,
    Entry { v: usize, m: usize },
    Column { v: usize, j: usize },
}

pub(crate) struct Limits<'a> {
    pub deadline: Option<Instant>,
    pub node_limit: Option<u64>,
    pub stop: &'a AtomicBool,
}

struct Worker<'p, 'n> {
    p: &'p Problem<'n>,
    sym: Vec<Symbol>,
    emissions: Vec<u32>,
    entries: Vec<Vec<u32>>,
    columns: Vec<Vec<u32>>,
    seen: Vec<Vec<u32>>,
    max_sym: Vec<i16>,
    trail: Vec<Undo>,
    digits: Vec<Symbol>,
    prefix: Vec<u32>,
    path: Vec<u32>,
    collect_depth: Option<usize>,
    units: Vec<Vec<u32>>,
    nodes: u64,
    limits: Limits<'p>,
    timed_out: bool,
    solution: Option<Solution>,
}

impl<'p, 'n> Worker<'p, 'n> {
    fn new(p: &'p Problem<'n>, limits: Limits<'p>) -> Self {
        let linear = p.field.is_some();
        Worker {
            p,
            sym: vec![0; p.code_size * p.edges],
            emissions: vec![0; p.code_size],
            entries: p
                .free
                .iter()
                .map(|&v| if linear { Vec::new() } else { vec![NONE; p.info[v].in_count] })
                .collect(),
            columns: p
                .free
                .iter()
                .map(|&v| if linear { vec![NONE; p.info[v].ins.len()] } else { Vec::new() })
                .collect(),
            seen: p.terminals.iter().map(|&t| vec![0; p.info[t].in_count]).collect(),
            max_sym: vec![-1; p.edges],
            trail: Vec::new(),
            digits: Vec::new(),
            prefix: Vec::new(),
            path: Vec::new(),
            collect_depth: None,
            units: Vec::new(),
            nodes: 0,
            limits,
            timed_out: false,
            solution: None,
        }
    }

    fn start(&mut self) -> Flow {
        self.go(0, 0)
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes & 255 != 0 {
            return false;
        }
        if self.limits.stop.load(Ordering::Relaxed) {
            return true;
        }
        let over_nodes = self.limits.node_limit.is_some_and(|l| self.nodes >= l);
        let over_time = self.limits.deadline.is_some_and(|d| Instant::now() >= d);
        if over_nodes || over_time {
            self.timed_out = true;
            return true;
        }
        false
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Undo::Seen(t, m) => self.seen[t][m] = 0,
                Undo::Entry(slot, m) => self.entries[slot][m] = NONE,
                Undo::Column(slot, j) => self.columns[slot][j] = NONE,
                Undo::Max(e, old) => self.max_sym[e] = old,
            }
        }
    }

    fn input_index(&self, c: usize, v: usize) -> usize {
        let base = c * self.p.edges;
        self.p.info[v].ins.iter().fold(0, |acc, &e| acc * self.p.q + self.sym[base + e] as usize)
    }

    fn write_outputs(&mut self, c: usize, v: usize, out: usize) {
        let p = self.p;
        let base = c * p.edges;
        let mut rest = out;
        for &e in p.info[v].outs.iter().rev() {
            self.sym[base + e] = (rest % p.q) as Symbol;
            rest /= p.q;
        }
    }

    fn go(&mut self, mut c: usize, mut pos: usize) -> Flow {
        let p = self.p;
        let mark = self.trail.len();
        let result = loop {
            if pos > p.events.len() {
                c += 1;
                pos = 0;
            }
            if pos == 0 {
                if c == p.code_size {
                    self.solution = Some(Solution {
                        emissions: self.emissions.clone(),
                        entries: self.entries.clone(),
                        columns: self.columns.clone(),
                    });
                    break Flow::Found;
                }
                break self.branch(c, pos, Branch::Emission);
            }
            let v = p.events[pos - 1];
            let m = self.input_index(c, v);
            let base = c * p.edges;
            match p.info[v].role {
                Role::Terminal(t) => {
                    if self.seen[t][m] != 0 {
                        break Flow::Fail;
                    }
                    self.seen[t][m] = c as u32 + 1;
                    self.trail.push(Undo::Seen(t, m));
                }
                Role::Fixed => {
                    let x = self.sym[base + p.info[v].ins[0]];
                    for &e in &p.info[v].outs {
                        self.sym[base + e] = x;
                    }
                }
                Role::Free(slot) => match &p.field {
                    None => {
                        let out = self.entries[slot][m];
                        if out == NONE {
                            break self.branch(c, pos, Branch::Entry { v, m });
                        }
                        self.write_outputs(c, v, out as usize);
                    }
                    Some(field) => {
                        let ins = &p.info[v].ins;
                        let open = (0..ins.len()).find(|&j| {
                            self.sym[base + ins[j]] != 0 && self.columns[slot][j] == NONE
                        });
                        if let Some(j) = open {
                            break self.branch(c, pos, Branch::Column { v, j });
                        }
                        let ko = p.info[v].outs.len();
                        let mut out = 0usize;
                        for i in 0..ko {
                            let mut acc: Symbol = 0;
                            for (j, &e) in ins.iter().enumerate() {
                                let x = self.sym[base + e];
                                if x != 0 {
                                    let col = self.columns[slot][j] as usize;
                                    let digit = (col / p.q.pow((ko - 1 - i) as u32)) % p.q;
                                    acc = field.add(acc, field.mul(x, digit as Symbol));
                                }
                            }
                            out = out * p.q + acc as usize;
                        }
                        self.write_outputs(c, v, out);
                    }
                },
            }
            pos += 1;
        };
        self.undo_to(mark);
        result
    }

    fn options(&mut self, c: usize, kind: &Branch) -> Vec<u32> {
        let p = self.p;
        match *kind {
            Branch::Emission => {
                let remaining = p.code_size - c;
                let hi = p.src_count - remaining;
                if c == 0 {
                    if p.anchor {
                        vec![0]
                    } else {
                        (0..=hi as u32).collect()
                    }
                } else {
                    (self.emissions[c - 1] + 1..=hi as u32).collect()
                }
            }
            Branch::Entry { v, .. } => {
                let outs = &p.info[v].outs;
                let limits: Vec<usize> = outs
                    .iter()
                    .map(|&e| {
                        if p.precedence {
                            ((self.max_sym[e] + 1) as usize).min(p.q - 1)
                        } else {
                            p.q - 1
                        }
                    })
                    .collect();
                bounded_tuples(&limits, p.q)
            }
            Branch::Column { v, .. } => (0..p.info[v].out_count as u32).collect(),
        }
    }

    fn branch(&mut self, c: usize, pos: usize, kind: Branch) -> Flow {
        let depth = self.path.len();
        if self.collect_depth == Some(depth) {
            self.units.push(self.path.clone());
            return Flow::Fail;
        }
        let forced = self.prefix.get(depth).copied();
        let options = self.options(c, &kind);
        for (ord, &opt) in options.iter().enumerate() {
            if forced.is_some_and(|f| f as usize != ord) {
                continue;
            }
            if self.tick() {
                return Flow::Abort;
            }
            let mark = self.trail.len();
            let next = match kind {
                Branch::Emission => {
                    self.emissions[c] = opt;
                    let base = c * self.p.edges;
                    self.digits.resize(self.p.src_edges.len(), 0);
                    let mut digits = std::mem::take(&mut self.digits);
                    index_tuple_into(opt as usize, self.p.q, &mut digits);
                    for (&e, &x) in self.p.src_edges.iter().zip(&digits) {
                        self.sym[base + e] = x;
                    }
                    self.digits = digits;
                    (c, 1)
                }
                Branch::Entry { v, m } => {
                    let Role::Free(slot) = self.p.info[v].role else { unreachable!() };
                    self.entries[slot][m] = opt;
                    self.trail.push(Undo::Entry(slot, m));
                    if self.p.precedence {
                        let mut rest = opt as usize;
                        for &e in self.p.info[v].outs.iter().rev() {
                            let s = (rest % self.p.q) as i16;
                            rest /= self.p.q;
                            if s > self.max_sym[e] {
                                self.trail.push(Undo::Max(e, self.max_sym[e]));
                                self.max_sym[e] = s;
                            }
                        }
                    }
                    self.write_outputs(c, v, opt as usize);
                    (c, pos + 1)
                }
                Branch::Column { v, j } => {
                    let Role::Free(slot) = self.p.info[v].role else { unreachable!() };
                    self.columns[slot][j] = opt;
                    self.trail.push(Undo::Column(slot, j));
                    (c, pos)
                }
            };
            self.path.push(ord as u32);
            let r = self.go(next.0, next.1);
            self.path.pop();
            self.undo_to(mark);
            if r != Flow::Fail {
                return r;
            }
        }
        Flow::Fail
    }
}

/// Tuples with digit `i` in `0..=limits[i]`, as mixed-radix indices base
/// `q`, in lexicographic order.
fn bounded_tuples(limits: &[usize], q: usize) -> Vec<u32> {
    let mut out = vec![0u32];
    for &l in limits {
        let mut next = Vec::with_capacity(out.len() * (l + 1));
        for &prefix in &out {
            for d in 0..=l {
                next.push(prefix * q as u32 + d as u32);
            }
        }
        out = next;
    }
    out
}

/// Runs the search, optionally split over `workers` threads.
pub(crate) fn run(p: &Problem<'_>, opts: &SearchOptions, started: Instant) -> (RunResult, u64) {
    let deadline = opts.time_limit.map(|d| started + d);
    let stop = AtomicBool::new(false);
    let limits = |stop| Limits { deadline, node_limit: opts.node_limit, stop };
    if opts.workers <= 1 {
        return std::thread::scope(|s| {
            std::thread::Builder::new()
                .stack_size(STACK_BYTES)
                .spawn_scoped(s, || {
                    let mut w = Worker::new(p, limits(&stop));
                    let flow = w.start();
                    (finish(flow, &mut w), w.nodes)
                })
                .expect("spawn search thread")
                .join()
                .expect("search thread panicked")
        });
    }

    // split the tree into units at the first depth with enough subtrees
    let mut units: Vec<Vec<u32>> = Vec::new();
    let mut nodes = 0;
    for depth in 1..=64 {
        let (flow, mut w) = std::thread::scope(|s| {
            std::thread::Builder::new()
                .stack_size(STACK_BYTES)
                .spawn_scoped(s, || {
                    let mut w = Worker::new(p, limits(&stop));
                    w.collect_depth = Some(depth);
                    let flow = w.start();
                    (flow, w)
                })
                .expect("spawn search thread")
                .join()
                .expect("search thread panicked")
        });
        nodes += w.nodes;
        match flow {
            Flow::Found | Flow::Abort => return (finish(flow, &mut w), nodes),
            Flow::Fail => {}
        }
        units = w.units;
        if units.is_empty() {
            return (RunResult::Exhausted, nodes);
        }
        if units.len() >= 4 * opts.workers {
            break;
        }
    }

    let next = AtomicUsize::new(0);
    let found: Mutex<Option<Solution>> = Mutex::new(None);
    let aborted = AtomicBool::new(false);
    let total = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..opts.workers {
            std::thread::Builder::new()
                .stack_size(STACK_BYTES)
                .spawn_scoped(s, || {
                    let mut w = Worker::new(p, limits(&stop));
                    loop {
                        let i = next.fetch_add(1, Ordering::SeqCst);
                        if i >= units.len() || stop.load(Ordering::SeqCst) {
                            break;
                        }
                        w.prefix = units[i].clone();
                        match w.start() {
                            Flow::Found => {
                                *found.lock().unwrap() = w.solution.take();
                                stop.store(true, Ordering::SeqCst);
                                break;
                            }
                            Flow::Abort => {
                                if w.timed_out {
                                    aborted.store(true, Ordering::SeqCst);
                                    stop.store(true, Ordering::SeqCst);
                                }
                                break;
                            }
                            Flow::Fail => {}
                        }
                    }
                    total.fetch_add(w.nodes as usize, Ordering::SeqCst);
                })
                .expect("spawn search thread");
        }
    });
    nodes += total.load(Ordering::SeqCst) as u64;
    if let Some(sol) = found.into_inner().unwrap() {
        return (RunResult::Found(sol), nodes);
    }
    if aborted.load(Ordering::SeqCst) {
        return (RunResult::Aborted, nodes);
    }
    (RunResult::Exhausted, nodes)
}

fn finish(flow: Flow, w: &mut Worker<'_, '_>) -> RunResult {
    match flow {
        Flow::Found => RunResult::Found(w.solution.take().expect("solution recorded")),
        Flow::Abort => RunResult::Aborted,
        Flow::Fail => RunResult::Exhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{builtin_network, Builtin};

    #[test]
    fn bounded_tuple_order() {
        assert_eq!(bounded_tuples(&[1, 0], 3), vec![0, 3]);
        assert_eq!(bounded_tuples(&[1, 2], 3), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(bounded_tuples(&[], 3), vec![0]);
    }

    #[test]
    fn terminals_come_early() {
        let n = builtin_network(&Builtin::Butterfly).unwrap();
        let names: Vec<&str> =
            event_order(&n, n.source()).iter().map(|&v| n.vertex_name(v)).collect();
        assert_eq!(names, ["V1", "V2", "V3", "V4", "T1", "T2"]);
        let latin = builtin_network(&Builtin::Latin).unwrap();
        let names: Vec<&str> =
            event_order(&latin, latin.source()).iter().map(|&v| latin.vertex_name(v)).collect();
        assert_eq!(names, ["V1", "V2", "V3", "V5", "T1", "T2", "V4", "V6", "T3", "T4", "T5"]);
    }
}
