//! Exact search for unambiguous pairs, capacity loops, certificate
//! verification and a brute-force reference oracle.

mod capacity;
mod engine;
mod oracle;

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::coding::{
    is_linear, is_unambiguous, tuple_count, Alphabet, Certificate, CertificateError, CodingError, NetworkCode,
    OuterCode, Unambiguity,
};
use crate::network::{mu, Network};

pub use capacity::{
    derive_from_supersource, linear_max_code_size, max_code_size, CapacityMode, CapacityOptions, CapacityResult,
    CapacityStatus, Report,
};
pub use oracle::{brute_force_oracle, oracle_size, DEFAULT_ORACLE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    /// Single-input vertices replicate their input.
    pub routing_fix: bool,
    /// Anchor the first codeword at zero and restrict symbol relabelings.
    pub symmetry_break: bool,
    /// Only matrix-induced maps at intermediate vertices.
    pub linear_only: bool,
    #[serde(serialize_with = "serialize_limit")]
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub workers: usize,
}

fn serialize_limit<S: serde::Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.serialize_some(&d.as_secs_f64()),
        None => s.serialize_none(),
    }
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            routing_fix: true,
            symmetry_break: true,
            linear_only: false,
            time_limit: None,
            node_limit: None,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("code size {m} is outside 1..={max} (q^|out(S)|)")]
    CodeSizeOutOfRange { m: usize, max: usize },
    #[error("linear search needs a field alphabet; q={0} has none selected")]
    NotAField(usize),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Coding(#[from] CodingError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Feasible(Certificate),
    Infeasible,
    Timeout,
}

impl Outcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Outcome::Feasible(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub outcome: Outcome,
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Decides whether an unambiguous pair with `code_size` codewords exists.
///
/// Every certificate is re-verified by simulation before it is returned.
pub fn decide_feasible(
    n: &Network,
    a: &Alphabet,
    code_size: usize,
    opts: &SearchOptions,
) -> Result<Decision, SearchError> {
    let started = Instant::now();
    let q = a.q();
    let max = tuple_count(q, n.out_edges(n.source()).len()).unwrap_or(usize::MAX);
    if code_size == 0 || code_size > max {
        return Err(SearchError::CodeSizeOutOfRange { m: code_size, max });
    }
    if opts.linear_only && !a.is_field() {
        return Err(SearchError::NotAField(q));
    }
    let done = |outcome, nodes| Ok(Decision { outcome, nodes, elapsed: started.elapsed() });
    if code_size > tuple_count(q, mu(n).0).unwrap_or(usize::MAX) {
        return done(Outcome::Infeasible, 0);
    }
    if code_size == 1 {
        let len = n.out_edges(n.source()).len();
        let code = OuterCode::new(len, q, vec![vec![0; len]])?;
        let cert = Certificate {
            alphabet: a.clone(),
            outer_code: code,
            network_code: NetworkCode::replication_or_zero(n, q),
        };
        return done(Outcome::Feasible(checked(n, cert, opts.linear_only)), 0);
    }
    let problem = engine::Problem::new(n, q, a.field().cloned(), code_size, opts)?;
    if !problem.fits(code_size) {
        return done(Outcome::Infeasible, 0);
    }
    let (result, nodes) = engine::run(&problem, opts, started);
    match result {
        engine::RunResult::Found(sol) => {
            let (outer_code, network_code) = problem.assemble(&sol);
            let cert = Certificate { alphabet: a.clone(), outer_code, network_code };
            done(Outcome::Feasible(checked(n, cert, opts.linear_only)), nodes)
        }
        engine::RunResult::Exhausted => done(Outcome::Infeasible, nodes),
        engine::RunResult::Aborted => done(Outcome::Timeout, nodes),
    }
}

fn checked(n: &Network, cert: Certificate, linear: bool) -> Certificate {
    let verdict = is_unambiguous(n, &cert.outer_code, &cert.network_code).expect("well-formed certificate");
    assert!(verdict.is_yes(), "search produced an ambiguous pair: {verdict:?}");
    if linear {
        assert!(
            is_linear(&cert.network_code, &cert.alphabet).expect("field alphabet"),
            "linear search produced a nonlinear code"
        );
    }
    cert
}

/// Result of re-checking a certificate by simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub unambiguous: bool,
    pub code_size: usize,
    pub q: usize,
    pub linear: Option<bool>,
    pub collision: Option<crate::coding::Collision>,
    pub capacity: crate::coding::CapacityValue,
}

/// Re-simulates `cert` on `n`; nothing from the search is trusted.
pub fn verify_certificate(n: &Network, cert: &Certificate) -> Result<Verification, CertificateError> {
    let verdict = is_unambiguous(n, &cert.outer_code, &cert.network_code)?;
    let linear = if cert.alphabet.is_field() {
        Some(is_linear(&cert.network_code, &cert.alphabet)?)
    } else {
        None
    };
    let (unambiguous, collision) = match verdict {
        Unambiguity::Yes => (true, None),
        Unambiguity::No(c) => (false, Some(c)),
    };
    Ok(Verification {
        unambiguous,
        code_size: cert.outer_code.len(),
        q: cert.alphabet.q(),
        linear,
        collision,
        capacity: crate::coding::capacity_value(cert.outer_code.len(), cert.alphabet.q()),
    })
}

/// Parses and verifies a certificate file's text.
pub fn verify_certificate_json(n: &Network, text: &str) -> Result<Verification, CertificateError> {
    verify_certificate(n, &Certificate::from_json(n, text)?)
}
