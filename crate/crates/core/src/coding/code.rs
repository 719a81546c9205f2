use std::collections::HashSet;

use crate::network::Network;

use super::{Alphabet, CodingError, Symbol};

/// Mixed-radix index of a tuple: the first position is the most
/// significant digit, so index order equals lexicographic order.
pub fn tuple_index(tuple: &[Symbol], q: usize) -> usize {
    tuple.iter().fold(0, |acc, &s| acc * q + s as usize)
}

/// Inverse of [`tuple_index`], writing into `out`.
pub fn index_tuple_into(mut index: usize, q: usize, out: &mut [Symbol]) {
    for slot in out.iter_mut().rev() {
        *slot = (index % q) as Symbol;
        index /= q;
    }
}

pub fn index_tuple(index: usize, len: usize, q: usize) -> Vec<Symbol> {
    let mut out = vec![0; len];
    index_tuple_into(index, q, &mut out);
    out
}

/// `q^len`, or `None` on overflow.
pub fn tuple_count(q: usize, len: usize) -> Option<usize> {
    q.checked_pow(u32::try_from(len).ok()?)
}

/// Dense function table `A^in -> A^out`. Entry `m` (mixed-radix index of
/// the input tuple) occupies `entries[m*out .. (m+1)*out]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    in_arity: usize,
    out_arity: usize,
    entries: Vec<Symbol>,
}

impl FunctionTable {
    pub fn new(
        q: usize,
        in_arity: usize,
        out_arity: usize,
        entries: Vec<Symbol>,
    ) -> Result<Self, CodingError> {
        let rows = tuple_count(q, in_arity).ok_or(CodingError::TableTooLarge)?;
        if entries.len() != rows * out_arity {
            return Err(CodingError::TableLength { expected: rows * out_arity, got: entries.len() });
        }
        if let Some(&s) = entries.iter().find(|&&s| s as usize >= q) {
            return Err(CodingError::SymbolOutOfRange { symbol: s as usize, q });
        }
        Ok(FunctionTable { in_arity, out_arity, entries })
    }

    pub fn from_fn<F>(q: usize, in_arity: usize, out_arity: usize, mut f: F) -> Self
    where
        F: FnMut(&[Symbol]) -> Vec<Symbol>,
    {
        let rows = tuple_count(q, in_arity).expect("table size");
        let mut entries = Vec::with_capacity(rows * out_arity);
        let mut input = vec![0; in_arity];
        for m in 0..rows {
            index_tuple_into(m, q, &mut input);
            let out = f(&input);
            assert_eq!(out.len(), out_arity, "function returned wrong arity");
            entries.extend(out.into_iter().map(|s| {
                assert!((s as usize) < q, "symbol {s} out of range");
                s
            }));
        }
        FunctionTable { in_arity, out_arity, entries }
    }

    pub fn in_arity(&self) -> usize {
        self.in_arity
    }

    pub fn out_arity(&self) -> usize {
        self.out_arity
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.entries
    }

    /// Output tuple for the input with mixed-radix index `m`.
    #[inline]
    pub fn row(&self, m: usize) -> &[Symbol] {
        &self.entries[m * self.out_arity..(m + 1) * self.out_arity]
    }

    pub fn apply(&self, input: &[Symbol], q: usize) -> &[Symbol] {
        self.row(tuple_index(input, q))
    }

    pub fn rows(&self) -> usize {
        if self.out_arity == 0 {
            0
        } else {
            self.entries.len() / self.out_arity
        }
    }
}

/// One total function per intermediate vertex; tuple positions follow the
/// network's edge order on `in(V)` and `out(V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkCode {
    q: usize,
    tables: Vec<Option<FunctionTable>>,
}

impl NetworkCode {
    /// Assembles a code from per-vertex tables, checking arities.
    pub fn from_tables(
        n: &Network,
        q: usize,
        tables: Vec<(usize, FunctionTable)>,
    ) -> Result<Self, CodingError> {
        let mut slots: Vec<Option<FunctionTable>> = vec![None; n.vertex_count()];
        for (v, t) in tables {
            if !n.is_intermediate(v) {
                return Err(CodingError::NotIntermediate(n.vertex_name(v).into()));
            }
            slots[v] = Some(t);
        }
        let code = NetworkCode { q, tables: slots };
        code.check(n)?;
        Ok(code)
    }

    /// Code defined by `f(vertex, input tuple) -> output tuple`.
    pub fn from_fn<F>(n: &Network, q: usize, mut f: F) -> Self
    where
        F: FnMut(usize, &[Symbol]) -> Vec<Symbol>,
    {
        let mut tables = vec![None; n.vertex_count()];
        for v in n.intermediates() {
            let (i, o) = (n.in_edges(v).len(), n.out_edges(v).len());
            tables[v] = Some(FunctionTable::from_fn(q, i, o, |m| f(v, m)));
        }
        NetworkCode { q, tables }
    }

    /// Single-input vertices replicate their symbol, every other vertex
    /// sends zeros. This is also how unused table entries are completed.
    pub fn replication_or_zero(n: &Network, q: usize) -> Self {
        Self::from_fn(n, q, |v, m| {
            let out = n.out_edges(v).len();
            if m.len() == 1 {
                vec![m[0]; out]
            } else {
                vec![0; out]
            }
        })
    }

    pub fn constant(n: &Network, q: usize, symbol: Symbol) -> Self {
        Self::from_fn(n, q, |v, _| vec![symbol; n.out_edges(v).len()])
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn table(&self, v: usize) -> Option<&FunctionTable> {
        self.tables.get(v).and_then(Option::as_ref)
    }

    pub fn tables(&self) -> impl Iterator<Item = (usize, &FunctionTable)> {
        self.tables.iter().enumerate().filter_map(|(v, t)| t.as_ref().map(|t| (v, t)))
    }

    /// Checks that every intermediate vertex has a table of the right shape.
    pub fn check(&self, n: &Network) -> Result<(), CodingError> {
        if self.tables.len() != n.vertex_count() {
            return Err(CodingError::WrongNetwork);
        }
        for v in 0..n.vertex_count() {
            let table = self.tables[v].as_ref();
            if !n.is_intermediate(v) {
                if table.is_some() {
                    return Err(CodingError::NotIntermediate(n.vertex_name(v).into()));
                }
                continue;
            }
            let t = table.ok_or_else(|| CodingError::MissingTable(n.vertex_name(v).into()))?;
            let (i, o) = (n.in_edges(v).len(), n.out_edges(v).len());
            if t.in_arity != i || t.out_arity != o {
                return Err(CodingError::Arity {
                    vertex: n.vertex_name(v).into(),
                    expected: (i, o),
                    got: (t.in_arity, t.out_arity),
                });
            }
            if tuple_count(self.q, i).map(|r| r * o) != Some(t.entries.len()) {
                return Err(CodingError::TableLength {
                    expected: tuple_count(self.q, i).unwrap_or(usize::MAX).saturating_mul(o),
                    got: t.entries.len(),
                });
            }
        }
        Ok(())
    }

    /// Whether the tables were built for an alphabet of this size.
    pub fn matches(&self, a: &Alphabet) -> bool {
        self.q == a.q()
    }
}

/// Non-empty set of pairwise distinct source emissions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterCode {
    length: usize,
    words: Vec<Vec<Symbol>>,
}

impl OuterCode {
    pub fn new(length: usize, q: usize, words: Vec<Vec<Symbol>>) -> Result<Self, CodingError> {
        if words.is_empty() {
            return Err(CodingError::EmptyCode);
        }
        let mut seen = HashSet::new();
        for w in &words {
            if w.len() != length {
                return Err(CodingError::CodewordLength { expected: length, got: w.len() });
            }
            if let Some(&s) = w.iter().find(|&&s| s as usize >= q) {
                return Err(CodingError::SymbolOutOfRange { symbol: s as usize, q });
            }
            if !seen.insert(w.as_slice()) {
                return Err(CodingError::RepeatedCodeword(w.clone()));
            }
        }
        Ok(OuterCode { length, words })
    }

    /// The whole space `A^length` in lexicographic order.
    pub fn full_space(length: usize, q: usize) -> Self {
        let count = tuple_count(q, length).expect("space size");
        let words = (0..count).map(|i| index_tuple(i, length, q)).collect();
        OuterCode { length, words }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Vec<Symbol>] {
        &self.words
    }

    /// Same code without the word at `index`; `None` if that would empty it.
    pub fn without(&self, index: usize) -> Option<Self> {
        if self.words.len() <= 1 {
            return None;
        }
        let mut words = self.words.clone();
        words.remove(index);
        Some(OuterCode { length: self.length, words })
    }
}
