use crate::coding::{
    index_tuple, is_unambiguous, tuple_count, Alphabet, Certificate, FunctionTable, NetworkCode, OuterCode,
    Symbol,
};
use crate::network::Network;

use super::SearchError;

/// Default cap on (network codes) x (outer codes) checked by the oracle.
pub const DEFAULT_ORACLE_LIMIT: u128 = 100_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of `(network code, outer code)` pairs the oracle would check, or
/// `None` if it does not fit in `u128`.
pub fn oracle_size(n: &Network, q: usize, code_size: usize, linear: bool) -> Option<u128> {
    let q128 = q as u128;
    let mut codes: u128 = 1;
    for v in n.intermediates() {
        let (ki, ko) = (n.in_edges(v).len() as u32, n.out_edges(v).len() as u32);
        let per_vertex = if linear {
            q128.checked_pow(ki.checked_mul(ko)?)?
        } else {
            let rows = q128.checked_pow(ki)?;
            q128.checked_pow(u32::try_from(rows.checked_mul(ko as u128)?).ok()?)?
        };
        codes = codes.checked_mul(per_vertex)?;
    }
    let words = q128.checked_pow(n.out_edges(n.source()).len() as u32)?;
    codes.checked_mul(binomial(words, code_size as u128))
}

/// Exhaustive reference: every network code (every linear one with
/// `linear`) against every `code_size`-subset of the emission space,
/// judged only by [`is_unambiguous`]. Returns a witness if one exists.
pub fn brute_force_oracle(
    n: &Network,
    a: &Alphabet,
    code_size: usize,
    linear: bool,
    limit: u128,
) -> Result<Option<Certificate>, SearchError> {
    let q = a.q();
    let len = n.out_edges(n.source()).len();
    let space = tuple_count(q, len).unwrap_or(usize::MAX);
    if code_size == 0 || code_size > space {
        return Err(SearchError::CodeSizeOutOfRange { m: code_size, max: space });
    }
    let field = if linear { Some(a.require_field()?.clone()) } else { None };
    match oracle_size(n, q, code_size, linear) {
        Some(size) if size <= limit => {}
        _ => return Err(SearchError::TooLarge(format!("oracle enumeration exceeds {limit} checks"))),
    }

    let vertices: Vec<usize> = n.intermediates().collect();
    // one odometer digit string per vertex: table entries, or matrix columns
    let digit_counts: Vec<usize> = vertices
        .iter()
        .map(|&v| {
            let (ki, ko) = (n.in_edges(v).len(), n.out_edges(v).len());
            if linear { ki * ko } else { tuple_count(q, ki).unwrap() * ko }
        })
        .collect();
    let mut digits: Vec<Vec<Symbol>> = digit_counts.iter().map(|&c| vec![0; c]).collect();
    let words: Vec<Vec<Symbol>> = (0..space).map(|i| index_tuple(i, len, q)).collect();

    loop {
        let tables: Vec<(usize, FunctionTable)> = vertices
            .iter()
            .zip(&digits)
            .map(|(&v, d)| {
                let (ki, ko) = (n.in_edges(v).len(), n.out_edges(v).len());
                let table = match &field {
                    None => FunctionTable::new(q, ki, ko, d.clone()).expect("shape"),
                    // d holds the matrix column by column
                    Some(f) => FunctionTable::from_fn(q, ki, ko, |m| {
                        (0..ko)
                            .map(|j| (0..ki).fold(0, |acc, i| f.add(acc, f.mul(m[i], d[i * ko + j]))))
                            .collect()
                    }),
                };
                (v, table)
            })
            .collect();
        let f = NetworkCode::from_tables(n, q, tables)?;

        let mut pick: Vec<usize> = (0..code_size).collect();
        loop {
            let code = OuterCode::new(len, q, pick.iter().map(|&i| words[i].clone()).collect())?;
            if is_unambiguous(n, &code, &f)?.is_yes() {
                return Ok(Some(Certificate { alphabet: a.clone(), outer_code: code, network_code: f }));
            }
            if !next_combination(&mut pick, space) {
                break;
            }
        }

        if !advance(&mut digits, q) {
            return Ok(None);
        }
    }
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn advance(digits: &mut [Vec<Symbol>], q: usize) -> bool {
    for d in digits.iter_mut().flat_map(|v| v.iter_mut()) {
        if (*d as usize) + 1 < q {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}
