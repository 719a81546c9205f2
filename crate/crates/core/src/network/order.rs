use std::cmp::Ordering;

use super::Network;

/// A total order on the edges that extends the path order: whenever a
/// directed path starts with `e` and ends with `e'`, `rank(e) <= rank(e')`.
///
/// Ranks are 1-based, matching the usual `e1 < e2 < ...` indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOrder {
    rank: Vec<usize>,
}

impl EdgeOrder {
    pub(crate) fn identity(n: usize) -> Self {
        EdgeOrder { rank: (1..=n).collect() }
    }

    /// Builds an order from edge indices listed first to last.
    pub fn from_sequence(sequence: &[usize]) -> Self {
        let mut rank = vec![0; sequence.len()];
        for (i, &e) in sequence.iter().enumerate() {
            rank[e] = i + 1;
        }
        EdgeOrder { rank }
    }

    pub fn rank(&self, edge: usize) -> usize {
        self.rank[edge]
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    /// Edge indices sorted by rank.
    pub fn sequence(&self) -> Vec<usize> {
        let mut seq = vec![0; self.rank.len()];
        for (e, &r) in self.rank.iter().enumerate() {
            seq[r - 1] = e;
        }
        seq
    }
}

/// Deterministic extension of the path order: edges sorted by the
/// longest-path layer of their tail, ties broken by natural order of ids.
pub fn extend_edge_order(n: &Network) -> EdgeOrder {
    let mut layer = vec![0usize; n.vertex_count()];
    for &v in n.topological_order() {
        for &e in n.out_edges(v) {
            let h = n.edge(e).head;
            layer[h] = layer[h].max(layer[v] + 1);
        }
    }
    let mut seq: Vec<usize> = (0..n.edge_count()).collect();
    seq.sort_by(|&a, &b| {
        let (ea, eb) = (n.edge(a), n.edge(b));
        layer[ea.tail]
            .cmp(&layer[eb.tail])
            .then_with(|| natural_cmp(&ea.id, &eb.id))
    });
    EdgeOrder::from_sequence(&seq)
}

/// Compares ids so that embedded decimal numbers sort numerically
/// (`e2 < e10`). Falls back to plain byte order on exact numeric ties.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a.as_bytes(), b.as_bytes());
    loop {
        match (x.first(), y.first()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(cx), Some(cy)) if cx.is_ascii_digit() && cy.is_ascii_digit() => {
                let dx = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let dy = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let nx = trim_zeros(&x[..dx]);
                let ny = trim_zeros(&y[..dy]);
                let ord = nx.len().cmp(&ny.len()).then_with(|| nx.cmp(ny));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[dx..];
                y = &y[dy..];
            }
            (Some(cx), Some(cy)) => {
                if cx != cy {
                    return cx.cmp(cy);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let start = digits.iter().position(|&d| d != b'0').unwrap_or(digits.len());
    &digits[start..]
}
