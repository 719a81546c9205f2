use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::network::{mu, Network};

use super::code::{index_tuple, tuple_count, tuple_index};
use super::{Alphabet, CodingError, NetworkCode, OuterCode, Symbol};

/// Symbol carried by every edge when one codeword is sent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    symbols: Vec<Symbol>,
}

impl Transcript {
    pub fn symbol(&self, edge: usize) -> Symbol {
        self.symbols[edge]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// The tuple received by vertex `v`, in edge order.
    pub fn received(&self, n: &Network, v: usize) -> Vec<Symbol> {
        n.in_edges(v).iter().map(|&e| self.symbols[e]).collect()
    }
}

/// Sends `codeword` through the network under `f`, vertex by vertex in
/// topological order.
pub fn transmit(n: &Network, f: &NetworkCode, codeword: &[Symbol]) -> Result<Transcript, CodingError> {
    f.check(n)?;
    let s = n.source();
    let out_s = n.out_edges(s);
    if codeword.len() != out_s.len() {
        return Err(CodingError::CodewordLength { expected: out_s.len(), got: codeword.len() });
    }
    if let Some(&bad) = codeword.iter().find(|&&x| x as usize >= f.q()) {
        return Err(CodingError::SymbolOutOfRange { symbol: bad as usize, q: f.q() });
    }
    Ok(transmit_unchecked(n, f, codeword))
}

pub(crate) fn transmit_unchecked(n: &Network, f: &NetworkCode, codeword: &[Symbol]) -> Transcript {
    let q = f.q();
    let mut symbols = vec![0; n.edge_count()];
    for (&e, &x) in n.out_edges(n.source()).iter().zip(codeword) {
        symbols[e] = x;
    }
    for v in n.intermediates() {
        let m = n.in_edges(v).iter().fold(0, |acc, &e| acc * q + symbols[e] as usize);
        let row = f.table(v).expect("checked").row(m);
        for (&e, &x) in n.out_edges(v).iter().zip(row) {
            symbols[e] = x;
        }
    }
    Transcript { symbols }
}

/// Two codewords a terminal cannot tell apart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub terminal: String,
    pub first: Vec<Symbol>,
    pub second: Vec<Symbol>,
    pub received: Vec<Symbol>,
}

impl fmt::Display for Collision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "terminal {} receives {:?} for both {:?} and {:?}",
            self.terminal, self.received, self.first, self.second
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unambiguity {
    Yes,
    No(Collision),
}

impl Unambiguity {
    pub fn is_yes(&self) -> bool {
        matches!(self, Unambiguity::Yes)
    }
}

/// Checks that every terminal's received tuple determines the codeword.
///
/// Every positive answer is cross-checked against the min-cut bound
/// `|code| <= q^mu`; a violation would mean the simulator itself is broken.
pub fn is_unambiguous(
    n: &Network,
    code: &OuterCode,
    f: &NetworkCode,
) -> Result<Unambiguity, CodingError> {
    f.check(n)?;
    let len = n.out_edges(n.source()).len();
    if code.length() != len {
        return Err(CodingError::CodewordLength { expected: len, got: code.length() });
    }
    let transcripts: Vec<Transcript> =
        code.words().iter().map(|w| transmit_unchecked(n, f, w)).collect();
    for &t in n.terminals() {
        let mut seen: HashMap<Vec<Symbol>, usize> = HashMap::with_capacity(code.len());
        for (i, tr) in transcripts.iter().enumerate() {
            let received = tr.received(n, t);
            if let Some(&j) = seen.get(&received) {
                return Ok(Unambiguity::No(Collision {
                    terminal: n.vertex_name(t).into(),
                    first: code.words()[j].clone(),
                    second: code.words()[i].clone(),
                    received,
                }));
            }
            seen.insert(received, i);
        }
    }
    let bound = tuple_count(f.q(), mu(n).0).unwrap_or(usize::MAX);
    assert!(
        code.len() <= bound,
        "unambiguous code of size {} exceeds the min-cut bound {}",
        code.len(),
        bound
    );
    Ok(Unambiguity::Yes)
}

/// Whether every table is `x -> Mx` for a matrix over the field.
pub fn is_linear(f: &NetworkCode, a: &Alphabet) -> Result<bool, CodingError> {
    let field = a.require_field()?;
    let q = a.q();
    if f.q() != q {
        return Err(CodingError::AlphabetMismatch { code: f.q(), alphabet: q });
    }
    for (_, table) in f.tables() {
        let (k, l) = (table.in_arity(), table.out_arity());
        // column i of the matrix is the image of the i-th unit vector
        let columns: Vec<Vec<Symbol>> = (0..k)
            .map(|i| {
                let mut unit = vec![0; k];
                unit[i] = 1;
                table.row(tuple_index(&unit, q)).to_vec()
            })
            .collect();
        for m in 0..tuple_count(q, k).ok_or(CodingError::TableTooLarge)? {
            let input = index_tuple(m, k, q);
            let row = table.row(m);
            for j in 0..l {
                let expect = input
                    .iter()
                    .zip(&columns)
                    .fold(0, |acc, (&x, col)| field.add(acc, field.mul(x, col[j])));
                if row[j] != expect {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// `log_q(code_size)`, together with the exact code size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityValue {
    pub code_size: usize,
    pub q: usize,
    pub value: f64,
}

impl fmt::Display for CapacityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.fract() == 0.0 {
            write!(f, "{}", self.value)
        } else {
            write!(f, "log_{} {} ~ {:.4}", self.q, self.code_size, self.value)
        }
    }
}

pub fn capacity_value(code_size: usize, q: usize) -> CapacityValue {
    assert!(code_size >= 1 && q >= 2, "capacity needs code_size >= 1 and q >= 2");
    // exact for powers of q
    let mut power = 1usize;
    let mut k = 0u32;
    while power < code_size {
        match power.checked_mul(q) {
            Some(p) => power = p,
            None => break,
        }
        k += 1;
    }
    let value = if power == code_size {
        k as f64
    } else {
        (code_size as f64).ln() / (q as f64).ln()
    };
    CapacityValue { code_size, q, value }
}
