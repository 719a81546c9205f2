//! Binary feasibility model for the existence of an unambiguous pair.
//!
//! For codeword index `c`, vertex `V`, input tuple `m` and output tuple `m'`
//! the model has one-hot output indicators `x[c,V,m']` (all non-terminals),
//! input indicators `y[c,V,m]` (all non-sources), function indicators
//! `z[V,m,m']` and product variables `w[c,V,m,m'] = y[c,V,m] * z[V,m,m']`
//! (intermediate vertices). Rows are tagged by the family they belong to:
//!
//! | tag | rows |
//! |-----|------|
//! | C1  | `sum_m' x[c,V,m'] = 1` for `V` not a terminal |
//! | C2  | `sum_m y[c,V,m] = 1` for `V` not the source |
//! | C3  | `y[c,V,m] + sum_{m'_e != m_e} x[c,U,m'] <= 1` per edge `e = (U,V)` |
//! | C4  | `sum_m' z[V,m,m'] <= 1` |
//! | C5  | `sum_m' z[V,m,m'] >= y[c,V,m]` |
//! | C6  | `sum_m w[c,V,m,m'] = x[c,V,m']` |
//! | C7  | `sum_c y[c,T,m] <= 1` at terminals |
//! | MC  | McCormick envelope of each `w` |
//! | FIX | `z = 0` for non-replicating entries at single-input vertices |
//! | SYM | prefix-sum rows sorting the source emissions |
//!
//! The objective is identically zero.

mod enumerate;
mod export;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::coding::{
    index_tuple, transmit_unchecked, tuple_count, Alphabet, FunctionTable, NetworkCode, OuterCode,
    Symbol,
};
use crate::network::{routing_fixable_vertices, Network};

pub use enumerate::BinarySearch;
pub use export::{export_model, model_file_name, sidecar_json, Format, Names};

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    X,
    Y,
    Z,
    W,
}

/// A binary decision variable. `input`/`output` are mixed-radix indices of
/// the tuples over `in(V)` / `out(V)`; `codeword` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variable {
    pub kind: VarKind,
    pub codeword: Option<usize>,
    pub vertex: usize,
    pub input: Option<usize>,
    pub output: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Tag {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    MC,
    SYM,
    FIX,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `sum coef * var  (sense)  rhs`. Coefficients are integral and nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(i64, VarId)>,
    pub sense: Sense,
    pub rhs: i64,
    pub tag: Tag,
}

impl LinearConstraint {
    pub fn new(terms: Vec<(i64, VarId)>, sense: Sense, rhs: i64, tag: Tag) -> Self {
        LinearConstraint { terms, sense, rhs, tag }
    }

    pub fn activity(&self, assignment: &[bool]) -> i64 {
        self.terms.iter().map(|&(a, v)| if assignment[v] { a } else { 0 }).sum()
    }

    pub fn is_satisfied(&self, assignment: &[bool]) -> bool {
        let lhs = self.activity(assignment);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
            Sense::Ge => lhs >= self.rhs,
        }
    }
}

/// The four McCormick rows pinning `w = y * z` for binary `y, z`:
/// `w <= y`, `w <= z`, `w >= y + z - 1`, `w >= 0`.
pub fn mccormick_linearize(y: VarId, z: VarId, w: VarId) -> [LinearConstraint; 4] {
    [
        LinearConstraint::new(vec![(1, w), (-1, y)], Sense::Le, 0, Tag::MC),
        LinearConstraint::new(vec![(1, w), (-1, z)], Sense::Le, 0, Tag::MC),
        LinearConstraint::new(vec![(1, w), (-1, y), (-1, z)], Sense::Ge, -1, Tag::MC),
        LinearConstraint::new(vec![(1, w)], Sense::Ge, 0, Tag::MC),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelOptions {
    pub routing_fix: bool,
    pub symmetry_break: bool,
    /// Refuse vertices whose `z` block would exceed this many variables.
    pub max_table_size: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions { routing_fix: false, symmetry_break: false, max_table_size: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("code size {m} is outside 1..={max} (q^|out(S)|)")]
    CodeSizeOutOfRange { m: usize, max: usize },
    #[error("vertex `{vertex}` needs {size} function variables, above the limit of {limit}")]
    TableTooLarge { vertex: String, size: usize, limit: usize },
    #[error("assignment has {got} values, the model has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
    #[error("one-hot block for {0} is not one-hot")]
    NotOneHot(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelMeta {
    pub network: String,
    pub q: usize,
    pub code_size: usize,
    pub options: ModelOptions,
}

/// Variable and row counts, per kind and per tag.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ModelStats {
    pub variables: BTreeMap<VarKind, usize>,
    pub constraints: BTreeMap<Tag, usize>,
}

impl ModelStats {
    pub fn vars(&self, kind: VarKind) -> usize {
        self.variables.get(&kind).copied().unwrap_or(0)
    }

    pub fn rows(&self, tag: Tag) -> usize {
        self.constraints.get(&tag).copied().unwrap_or(0)
    }

    pub fn total_vars(&self) -> usize {
        self.variables.values().sum()
    }

    pub fn total_rows(&self) -> usize {
        self.constraints.values().sum()
    }
}

#[derive(Debug, Clone)]
struct Shape {
    in_count: usize,
    out_count: usize,
}

/// A built model: variables, rows and enough index structure to encode and
/// decode solutions.
#[derive(Debug, Clone)]
pub struct FeasibilityModel {
    meta: ModelMeta,
    vars: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
    vertex_names: Vec<String>,
    shapes: Vec<Shape>,
    source: usize,
    source_len: usize,
    x_base: Vec<Vec<Option<VarId>>>,
    y_base: Vec<Vec<Option<VarId>>>,
    z_base: Vec<Option<VarId>>,
    w_base: Vec<Vec<Option<VarId>>>,
}

impl FeasibilityModel {
    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.meta.network = name.into();
        self
    }

    pub fn x(&self, c: usize, v: usize, out: usize) -> Option<VarId> {
        self.x_base[c][v].map(|b| b + out)
    }

    pub fn y(&self, c: usize, v: usize, input: usize) -> Option<VarId> {
        self.y_base[c][v].map(|b| b + input)
    }

    pub fn z(&self, v: usize, input: usize, out: usize) -> Option<VarId> {
        self.z_base[v].map(|b| b + input * self.shapes[v].out_count + out)
    }

    pub fn w(&self, c: usize, v: usize, input: usize, out: usize) -> Option<VarId> {
        self.w_base[c][v].map(|b| b + input * self.shapes[v].out_count + out)
    }

    fn push_block(&mut self, kind: VarKind, c: Option<usize>, v: usize, ins: usize, outs: usize) -> VarId {
        let base = self.vars.len();
        match kind {
            VarKind::X => {
                self.vars.extend((0..outs).map(|o| Variable {
                    kind,
                    codeword: c,
                    vertex: v,
                    input: None,
                    output: Some(o),
                }));
            }
            VarKind::Y => {
                self.vars.extend((0..ins).map(|i| Variable {
                    kind,
                    codeword: c,
                    vertex: v,
                    input: Some(i),
                    output: None,
                }));
            }
            VarKind::Z | VarKind::W => {
                for i in 0..ins {
                    self.vars.extend((0..outs).map(|o| Variable {
                        kind,
                        codeword: c,
                        vertex: v,
                        input: Some(i),
                        output: Some(o),
                    }));
                }
            }
        }
        base
    }

    pub fn stats(&self) -> ModelStats {
        model_stats(self)
    }

    /// Whether `assignment` satisfies every row; returns the first violated
    /// row otherwise.
    pub fn check(&self, assignment: &[bool]) -> Result<(), usize> {
        match self.constraints.iter().position(|r| !r.is_satisfied(assignment)) {
            Some(i) => Err(i),
            None => Ok(()),
        }
    }

    /// 0/1 vector representing `(code, f)`; codewords keep their order.
    pub fn encode(&self, n: &Network, code: &OuterCode, f: &NetworkCode) -> Vec<bool> {
        let q = self.meta.q;
        let mut a = vec![false; self.vars.len()];
        for v in n.intermediates() {
            let table = f.table(v).expect("complete network code");
            for m in 0..self.shapes[v].in_count {
                let out = tuple_index_of(table.row(m), q);
                a[self.z(v, m, out).unwrap()] = true;
            }
        }
        for (c, word) in code.words().iter().enumerate() {
            let tr = transmit_unchecked(n, f, word);
            for v in 0..n.vertex_count() {
                let input = tuple_index_of(&tr.received(n, v), q);
                let output: Vec<Symbol> = n.out_edges(v).iter().map(|&e| tr.symbol(e)).collect();
                let output = tuple_index_of(&output, q);
                if let Some(id) = self.x(c, v, output) {
                    a[id] = true;
                }
                if let Some(id) = self.y(c, v, input) {
                    a[id] = true;
                }
                if let Some(id) = self.w(c, v, input, output) {
                    a[id] = true;
                }
            }
        }
        a
    }

    /// Reads the pair back from a 0/1 vector: codewords from the source's
    /// `x` blocks, tables from `z`. Inputs without a selected image are
    /// completed by replication (single input) or zeros.
    pub fn decode(&self, n: &Network, assignment: &[bool]) -> Result<(OuterCode, NetworkCode), ModelError> {
        if assignment.len() != self.vars.len() {
            return Err(ModelError::AssignmentLength { expected: self.vars.len(), got: assignment.len() });
        }
        let q = self.meta.q;
        let s = self.source;
        let mut words = Vec::with_capacity(self.meta.code_size);
        for c in 0..self.meta.code_size {
            let hot: Vec<usize> =
                (0..self.shapes[s].out_count).filter(|&o| assignment[self.x(c, s, o).unwrap()]).collect();
            if hot.len() != 1 {
                return Err(ModelError::NotOneHot(format!("x[{},{}]", c + 1, self.vertex_names[s])));
            }
            words.push(index_tuple(hot[0], self.source_len, q));
        }
        let code = OuterCode::new(self.source_len, q, words)
            .map_err(|_| ModelError::NotOneHot("distinct codewords".into()))?;
        let default = NetworkCode::replication_or_zero(n, q);
        let mut tables = Vec::new();
        for v in n.intermediates() {
            let shape = &self.shapes[v];
            let (ki, ko) = (n.in_edges(v).len(), n.out_edges(v).len());
            let mut entries = Vec::with_capacity(shape.in_count * ko);
            for m in 0..shape.in_count {
                let chosen: Vec<usize> =
                    (0..shape.out_count).filter(|&o| assignment[self.z(v, m, o).unwrap()]).collect();
                match chosen.as_slice() {
                    [o] => entries.extend(index_tuple(*o, ko, q)),
                    [] => entries.extend_from_slice(default.table(v).unwrap().row(m)),
                    _ => {
                        return Err(ModelError::NotOneHot(format!("z[{}]", self.vertex_names[v])))
                    }
                }
            }
            tables.push((v, FunctionTable::new(q, ki, ko, entries).expect("shape")));
        }
        let f = NetworkCode::from_tables(n, q, tables).expect("shape");
        Ok((code, f))
    }
}

fn tuple_index_of(t: &[Symbol], q: usize) -> usize {
    crate::coding::tuple_index(t, q)
}

/// Builds the model for codes of size `code_size` over `a`.
pub fn build_model(
    n: &Network,
    a: &Alphabet,
    code_size: usize,
    opts: &ModelOptions,
) -> Result<FeasibilityModel, ModelError> {
    let q = a.q();
    let s = n.source();
    let source_len = n.out_edges(s).len();
    let max = tuple_count(q, source_len).unwrap_or(usize::MAX);
    if code_size == 0 || code_size > max {
        return Err(ModelError::CodeSizeOutOfRange { m: code_size, max });
    }
    let big = |v: usize, size: usize| ModelError::TableTooLarge {
        vertex: n.vertex_name(v).into(),
        size,
        limit: opts.max_table_size,
    };
    let mut shapes = Vec::with_capacity(n.vertex_count());
    for v in 0..n.vertex_count() {
        let ic = tuple_count(q, n.in_edges(v).len()).ok_or_else(|| big(v, usize::MAX))?;
        let oc = tuple_count(q, n.out_edges(v).len()).ok_or_else(|| big(v, usize::MAX))?;
        let size = ic.checked_mul(oc).ok_or_else(|| big(v, usize::MAX))?;
        if size > opts.max_table_size && (n.is_intermediate(v) || ic.max(oc) > opts.max_table_size) {
            return Err(big(v, size));
        }
        shapes.push(Shape { in_count: ic, out_count: oc });
    }

    let nv = n.vertex_count();
    let mut model = FeasibilityModel {
        meta: ModelMeta { network: "network".into(), q, code_size, options: opts.clone() },
        vars: Vec::new(),
        constraints: Vec::new(),
        vertex_names: n.vertex_names().to_vec(),
        shapes,
        source: s,
        source_len,
        x_base: vec![vec![None; nv]; code_size],
        y_base: vec![vec![None; nv]; code_size],
        z_base: vec![None; nv],
        w_base: vec![vec![None; nv]; code_size],
    };

    // variables: per codeword x and y blocks in topological order, then z, then w
    for c in 0..code_size {
        for &v in n.topological_order() {
            let (ic, oc) = (model.shapes[v].in_count, model.shapes[v].out_count);
            if !n.is_terminal(v) {
                model.x_base[c][v] = Some(model.push_block(VarKind::X, Some(c), v, ic, oc));
            }
            if v != s {
                model.y_base[c][v] = Some(model.push_block(VarKind::Y, Some(c), v, ic, oc));
            }
        }
    }
    let intermediates: Vec<usize> = n.intermediates().collect();
    for &v in &intermediates {
        let (ic, oc) = (model.shapes[v].in_count, model.shapes[v].out_count);
        model.z_base[v] = Some(model.push_block(VarKind::Z, None, v, ic, oc));
    }
    for c in 0..code_size {
        for &v in &intermediates {
            let (ic, oc) = (model.shapes[v].in_count, model.shapes[v].out_count);
            model.w_base[c][v] = Some(model.push_block(VarKind::W, Some(c), v, ic, oc));
        }
    }

    let mut rows = Vec::new();
    // C1, C2
    for c in 0..code_size {
        for &v in n.topological_order() {
            let sh = &model.shapes[v];
            if let Some(b) = model.x_base[c][v] {
                let terms = (0..sh.out_count).map(|o| (1, b + o)).collect();
                rows.push(LinearConstraint::new(terms, Sense::Eq, 1, Tag::C1));
            }
            if let Some(b) = model.y_base[c][v] {
                let terms = (0..sh.in_count).map(|i| (1, b + i)).collect();
                rows.push(LinearConstraint::new(terms, Sense::Eq, 1, Tag::C2));
            }
        }
    }
    // C3: per codeword, edge and input tuple at the head
    let mut tail_tuple = Vec::new();
    let mut head_tuple = Vec::new();
    for c in 0..code_size {
        for e in n.edge_order().sequence() {
            let edge = n.edge(e);
            let (u, v) = (edge.tail, edge.head);
            let pos_out = n.out_edges(u).iter().position(|&x| x == e).unwrap();
            let pos_in = n.in_edges(v).iter().position(|&x| x == e).unwrap();
            let (ku, kv) = (n.out_edges(u).len(), n.in_edges(v).len());
            for m in 0..model.shapes[v].in_count {
                head_tuple.resize(kv, 0);
                crate::coding::index_tuple_into(m, q, &mut head_tuple);
                let mut terms = vec![(1, model.y(c, v, m).unwrap())];
                for o in 0..model.shapes[u].out_count {
                    tail_tuple.resize(ku, 0);
                    crate::coding::index_tuple_into(o, q, &mut tail_tuple);
                    if tail_tuple[pos_out] != head_tuple[pos_in] {
                        terms.push((1, model.x(c, u, o).unwrap()));
                    }
                }
                rows.push(LinearConstraint::new(terms, Sense::Le, 1, Tag::C3));
            }
        }
    }
    // C4
    for &v in &intermediates {
        let sh = &model.shapes[v];
        for m in 0..sh.in_count {
            let terms = (0..sh.out_count).map(|o| (1, model.z(v, m, o).unwrap())).collect();
            rows.push(LinearConstraint::new(terms, Sense::Le, 1, Tag::C4));
        }
    }
    // C5
    for c in 0..code_size {
        for &v in &intermediates {
            let sh = &model.shapes[v];
            for m in 0..sh.in_count {
                let mut terms: Vec<(i64, VarId)> =
                    (0..sh.out_count).map(|o| (1, model.z(v, m, o).unwrap())).collect();
                terms.push((-1, model.y(c, v, m).unwrap()));
                rows.push(LinearConstraint::new(terms, Sense::Ge, 0, Tag::C5));
            }
        }
    }
    // MC and C6
    for c in 0..code_size {
        for &v in &intermediates {
            let sh = &model.shapes[v];
            for m in 0..sh.in_count {
                for o in 0..sh.out_count {
                    let (y, z, w) = (
                        model.y(c, v, m).unwrap(),
                        model.z(v, m, o).unwrap(),
                        model.w(c, v, m, o).unwrap(),
                    );
                    rows.extend(mccormick_linearize(y, z, w));
                }
            }
            for o in 0..sh.out_count {
                let mut terms: Vec<(i64, VarId)> =
                    (0..sh.in_count).map(|m| (1, model.w(c, v, m, o).unwrap())).collect();
                terms.push((-1, model.x(c, v, o).unwrap()));
                rows.push(LinearConstraint::new(terms, Sense::Eq, 0, Tag::C6));
            }
        }
    }
    // C7
    for &t in n.terminals() {
        for m in 0..model.shapes[t].in_count {
            let terms = (0..code_size).map(|c| (1, model.y(c, t, m).unwrap())).collect();
            rows.push(LinearConstraint::new(terms, Sense::Le, 1, Tag::C7));
        }
    }
    model.constraints = rows;

    if opts.routing_fix {
        add_routing_fixings(&mut model, n, a);
    }
    if opts.symmetry_break {
        add_symmetry_breaking(&mut model, n, a, code_size);
    }
    debug_assert!(well_formed(&model));
    Ok(model)
}

/// Fixes `z[V,m,m'] = 0` whenever `m'` is not the replication of `m`, for
/// every intermediate vertex with exactly one incoming edge.
pub fn add_routing_fixings(model: &mut FeasibilityModel, n: &Network, a: &Alphabet) {
    let q = a.q();
    for v in routing_fixable_vertices(n) {
        let k = n.out_edges(v).len();
        for m in 0..q {
            let replicated = (0..k).fold(0, |acc, _| acc * q + m);
            for o in 0..model.shapes[v].out_count {
                if o != replicated {
                    let z = model.z(v, m, o).unwrap();
                    model.constraints.push(LinearConstraint::new(vec![(1, z)], Sense::Eq, 0, Tag::FIX));
                }
            }
        }
    }
    model.meta.options.routing_fix = true;
}

/// Forces the source emissions of codewords `1..M` into strictly
/// increasing lexicographic order. With one-hot blocks `x[c,S,.]`, emission
/// `c+1` exceeds emission `c` iff for every threshold `t`
/// `sum_{k<=t} x[c+1,S,k] <= sum_{k<t} x[c,S,k]`.
pub fn add_symmetry_breaking(model: &mut FeasibilityModel, n: &Network, _a: &Alphabet, code_size: usize) {
    let s = n.source();
    let count = model.shapes[s].out_count;
    for c in 0..code_size.saturating_sub(1) {
        for t in 0..count {
            let mut terms: Vec<(i64, VarId)> =
                (0..=t).map(|k| (1, model.x(c + 1, s, k).unwrap())).collect();
            terms.extend((0..t).map(|k| (-1, model.x(c, s, k).unwrap())));
            model.constraints.push(LinearConstraint::new(terms, Sense::Le, 0, Tag::SYM));
        }
    }
    model.meta.options.symmetry_break = true;
}

pub fn model_stats(model: &FeasibilityModel) -> ModelStats {
    let mut stats = ModelStats::default();
    for v in &model.vars {
        *stats.variables.entry(v.kind).or_default() += 1;
    }
    for r in &model.constraints {
        *stats.constraints.entry(r.tag).or_default() += 1;
    }
    stats
}

fn well_formed(model: &FeasibilityModel) -> bool {
    model.constraints.iter().all(|r| {
        let mut ids: Vec<VarId> = r.terms.iter().map(|&(_, v)| v).collect();
        ids.sort_unstable();
        let distinct = ids.windows(2).all(|w| w[0] != w[1]);
        distinct && r.terms.iter().all(|&(a, v)| a != 0 && v < model.vars.len())
    })
}
