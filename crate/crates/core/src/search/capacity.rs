use std::time::{Duration, Instant};

use serde::Serialize;

use crate::coding::{
    capacity_value, tuple_count, tuple_index, Alphabet, CapacityValue, Certificate, CodingError,
    FunctionTable, NetworkCode, OuterCode, Symbol,
};
use crate::network::{add_supersource, mu, Network};

use super::{decide_feasible, Outcome, SearchError, SearchOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum CapacityMode {
    /// Probe from `q^mu` downwards; binary search once a probe times out.
    Descending,
    /// Probe `start, start+1, ...` until a probe fails or times out.
    Ascending { start: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapacityOptions {
    pub search: SearchOptions,
    /// Prepend a supersource when `|out(S)| > mu`.
    pub supersource: bool,
    pub mode: CapacityMode,
    #[serde(serialize_with = "super::serialize_limit")]
    pub total_time: Option<Duration>,
    /// Never probe code sizes above this; the upper bound is then left as
    /// whatever the probes below it established.
    pub ceiling: Option<usize>,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions {
            search: SearchOptions::default(),
            supersource: true,
            mode: CapacityMode::Descending,
            total_time: None,
            ceiling: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityStatus {
    Proven,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeOutcome {
    Feasible,
    Infeasible,
    Timeout,
}

/// One call of the decision procedure made by a capacity loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Probe {
    pub code_size: usize,
    pub outcome: ProbeOutcome,
    pub nodes: u64,
    pub wall_ms: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub q: usize,
    pub mu: usize,
    /// Largest code size with a verified certificate.
    pub lower: usize,
    /// Every size above this was shown infeasible (or exceeds `q^mu`).
    pub upper: usize,
    pub status: CapacityStatus,
    /// Certificate of size `lower` for the original network.
    pub certificate: Certificate,
    pub supersource: bool,
    pub linear: bool,
    pub nodes: u64,
    pub elapsed: Duration,
    pub probes: Vec<Probe>,
}

impl CapacityResult {
    /// The proven maximum code size, if the bounds met.
    pub fn m_star(&self) -> Option<usize> {
        (self.status == CapacityStatus::Proven).then_some(self.lower)
    }

    /// `log_q` of the lower bound.
    pub fn capacity(&self) -> CapacityValue {
        capacity_value(self.lower, self.q)
    }

    pub fn report(&self, network: &str, opts: &CapacityOptions) -> Report {
        let cap = self.capacity();
        Report {
            network: network.to_string(),
            q: self.q,
            m_star: self.m_star(),
            capacity: self.m_star().map(|_| cap.value),
            capacity_text: cap.to_string(),
            status: self.status,
            lower: self.lower,
            upper: self.upper,
            mu: self.mu,
            nodes: self.nodes,
            wall_ms: self.elapsed.as_millis(),
            options: opts.clone(),
            supersource: self.supersource,
            linear: self.linear,
            probes: self.probes.clone(),
        }
    }
}

/// Machine-readable summary of a capacity run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub network: String,
    pub q: usize,
    #[serde(rename = "M_star")]
    pub m_star: Option<usize>,
    pub capacity: Option<f64>,
    pub capacity_text: String,
    pub status: CapacityStatus,
    pub lower: usize,
    pub upper: usize,
    pub mu: usize,
    pub nodes: u64,
    pub wall_ms: u128,
    pub options: CapacityOptions,
    pub supersource: bool,
    pub linear: bool,
    pub probes: Vec<Probe>,
}

/// Largest code size admitting an unambiguous pair, by repeated calls of
/// the decision procedure.
pub fn max_code_size(n: &Network, a: &Alphabet, opts: &CapacityOptions) -> Result<CapacityResult, SearchError> {
    capacity_loop(n, a, opts, opts.search.linear_only)
}

/// Same loop with intermediate functions restricted to linear maps; the
/// outer code stays unrestricted, so no supersource is added.
pub fn linear_max_code_size(
    n: &Network,
    a: &Alphabet,
    opts: &CapacityOptions,
) -> Result<CapacityResult, SearchError> {
    if !a.is_field() {
        return Err(SearchError::NotAField(a.q()));
    }
    capacity_loop(n, a, opts, true)
}

fn capacity_loop(
    n: &Network,
    a: &Alphabet,
    opts: &CapacityOptions,
    linear: bool,
) -> Result<CapacityResult, SearchError> {
    let started = Instant::now();
    let q = a.q();
    let width = mu(n).0;
    let bound = tuple_count(q, width).ok_or_else(|| SearchError::TooLarge("q^mu overflows".into()))?;
    let fire = opts.supersource && !linear && n.out_edges(n.source()).len() > width;
    let work = if fire { add_supersource(n) } else { n.clone() };
    let deadline = opts.total_time.map(|d| started + d);
    let mut search = opts.search.clone();
    search.linear_only = linear;

    let mut nodes = 0;
    let mut probes = Vec::new();
    let mut probe = |m: usize| -> Result<Outcome, SearchError> {
        let mut s = search.clone();
        if let Some(d) = deadline {
            let left = d.saturating_duration_since(Instant::now());
            s.time_limit = Some(s.time_limit.map_or(left, |t| t.min(left)));
        }
        let d = decide_feasible(&work, a, m, &s)?;
        nodes += d.nodes;
        probes.push(Probe {
            code_size: m,
            outcome: match d.outcome {
                Outcome::Feasible(_) => ProbeOutcome::Feasible,
                Outcome::Infeasible => ProbeOutcome::Infeasible,
                Outcome::Timeout => ProbeOutcome::Timeout,
            },
            nodes: d.nodes,
            wall_ms: d.elapsed.as_millis(),
        });
        Ok(d.outcome)
    };
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);

    let (mut lower, mut upper) = (1, bound);
    let cap = opts.ceiling.unwrap_or(bound).max(1);
    let mut cert = match probe(1)? {
        Outcome::Feasible(c) => c,
        _ => unreachable!("a single codeword is always decodable"),
    };
    match opts.mode {
        CapacityMode::Descending => {
            let mut top = upper.min(cap);
            while top > lower && !expired() {
                match probe(top)? {
                    Outcome::Feasible(c) => {
                        lower = top;
                        cert = c;
                    }
                    Outcome::Infeasible => {
                        upper = upper.min(top - 1);
                        top -= 1;
                        continue;
                    }
                    Outcome::Timeout => {}
                }
                break;
            }
            // the top probe timed out: bisect what is left below it
            let mut hi = top.saturating_sub(1).min(upper);
            while lower < hi && lower < upper && !expired() {
                let mid = (lower + hi + 1) / 2;
                match probe(mid)? {
                    Outcome::Feasible(c) => {
                        lower = mid;
                        cert = c;
                    }
                    Outcome::Infeasible => {
                        upper = mid - 1;
                        hi = upper;
                    }
                    Outcome::Timeout => hi = mid - 1,
                }
            }
        }
        CapacityMode::Ascending { start } => {
            let mut m = start.max(2);
            while m <= upper.min(cap) && !expired() {
                match probe(m)? {
                    Outcome::Feasible(c) => {
                        lower = m;
                        cert = c;
                        m += 1;
                    }
                    Outcome::Infeasible => upper = m - 1,
                    Outcome::Timeout => break,
                }
            }
        }
    }
    assert!(lower <= bound, "result exceeds the min-cut bound");
    let certificate = if fire { derive_from_supersource(n, &work, &cert)? } else { cert };
    Ok(CapacityResult {
        q,
        mu: width,
        lower,
        upper,
        status: if lower == upper { CapacityStatus::Proven } else { CapacityStatus::Bounds },
        certificate,
        supersource: fire,
        linear,
        nodes,
        elapsed: started.elapsed(),
        probes,
    })
}

/// Turns a certificate for `with_super = add_supersource(n)` into one for
/// `n`: the outer code is the image of the old source's function, every
/// other table is carried over (re-indexed by edge id).
pub fn derive_from_supersource(
    n: &Network,
    with_super: &Network,
    cert: &Certificate,
) -> Result<Certificate, CodingError> {
    let q = cert.alphabet.q();
    let s_old = with_super.vertex_index(n.vertex_name(n.source())).ok_or(CodingError::WrongNetwork)?;
    let f_sup = &cert.network_code;
    let table_s = f_sup.table(s_old).ok_or_else(|| CodingError::MissingTable(n.vertex_name(n.source()).into()))?;
    let out_old = with_super.out_edges(s_old);
    let out_new = n.out_edges(n.source());
    let words: Vec<Vec<Symbol>> = cert
        .outer_code
        .words()
        .iter()
        .map(|x| {
            let row = table_s.row(tuple_index(x, q));
            out_new
                .iter()
                .map(|&e| {
                    let id = &n.edge(e).id;
                    let pos = out_old.iter().position(|&o| with_super.edge(o).id == *id).expect("same edges");
                    row[pos]
                })
                .collect()
        })
        .collect();
    let outer_code = OuterCode::new(out_new.len(), q, words)?;
    let mut tables = Vec::new();
    for v in n.intermediates() {
        let w = with_super.vertex_index(n.vertex_name(v)).ok_or(CodingError::WrongNetwork)?;
        let t = f_sup.table(w).ok_or_else(|| CodingError::MissingTable(n.vertex_name(v).into()))?;
        tables.push((v, transport_table(n, v, with_super, w, t, q)));
    }
    Ok(Certificate {
        alphabet: cert.alphabet.clone(),
        outer_code,
        network_code: NetworkCode::from_tables(n, q, tables)?,
    })
}

/// Re-indexes a table of vertex `w` in `from` for vertex `v` in `to`,
/// matching edges by id.
fn transport_table(to: &Network, v: usize, from: &Network, w: usize, t: &FunctionTable, q: usize) -> FunctionTable {
    let perm = |mine: &[usize], theirs: &[usize]| -> Vec<usize> {
        mine.iter()
            .map(|&e| theirs.iter().position(|&o| from.edge(o).id == to.edge(e).id).expect("same edges"))
            .collect()
    };
    let in_perm = perm(to.in_edges(v), from.in_edges(w));
    let out_perm = perm(to.out_edges(v), from.out_edges(w));
    let (ki, ko) = (in_perm.len(), out_perm.len());
    FunctionTable::from_fn(q, ki, ko, |m| {
        let mut theirs = vec![0; ki];
        for (i, &p) in in_perm.iter().enumerate() {
            theirs[p] = m[i];
        }
        let row = t.row(tuple_index(&theirs, q));
        out_perm.iter().map(|&p| row[p]).collect()
    })
}
