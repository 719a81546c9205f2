use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use super::{Network, NetworkError};

/// Number of edges in a minimum source/terminal cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct CutValue(pub usize);

impl fmt::Display for CutValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Min-cut between the source and the terminal named `terminal`.
pub fn min_cut(n: &Network, terminal: &str) -> Result<CutValue, NetworkError> {
    let t = n.terminal_index(terminal)?;
    Ok(min_cut_at(n, t))
}

/// Min-cut between the source and terminal vertex `t`, computed as a
/// unit-capacity maximum flow with BFS augmenting paths.
pub fn min_cut_at(n: &Network, t: usize) -> CutValue {
    let s = n.source();
    let mut flow = vec![false; n.edge_count()];
    let mut value = 0;
    // predecessor: (edge, forward?) used to reach a vertex
    let mut pred: Vec<Option<(usize, bool)>> = vec![None; n.vertex_count()];
    loop {
        pred.iter_mut().for_each(|p| *p = None);
        let mut visited = vec![false; n.vertex_count()];
        visited[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for &e in n.out_edges(v) {
                let h = n.edge(e).head;
                if !flow[e] && !visited[h] {
                    visited[h] = true;
                    pred[h] = Some((e, true));
                    queue.push_back(h);
                }
            }
            for &e in n.in_edges(v) {
                let tail = n.edge(e).tail;
                if flow[e] && !visited[tail] {
                    visited[tail] = true;
                    pred[tail] = Some((e, false));
                    queue.push_back(tail);
                }
            }
        }
        if !visited[t] {
            return CutValue(value);
        }
        let mut v = t;
        while v != s {
            let (e, forward) = pred[v].expect("path");
            flow[e] = forward;
            v = if forward { n.edge(e).tail } else { n.edge(e).head };
        }
        value += 1;
    }
}

/// Minimum over all terminals of the source/terminal min-cut.
pub fn mu(n: &Network) -> CutValue {
    n.terminals()
        .iter()
        .map(|&t| min_cut_at(n, t))
        .min()
        .expect("networks have at least one terminal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{builtin_network, Builtin};

    #[test]
    fn butterfly_cuts() {
        let n = builtin_network(&Builtin::Butterfly).unwrap();
        assert_eq!(min_cut(&n, "T1").unwrap(), CutValue(2));
        assert_eq!(min_cut(&n, "T2").unwrap(), CutValue(2));
        assert_eq!(mu(&n), CutValue(2));
        assert!(matches!(min_cut(&n, "V3"), Err(NetworkError::NotATerminal(_))));
        assert!(matches!(min_cut(&n, "nope"), Err(NetworkError::UnknownVertex(_))));
    }

    #[test]
    fn path_and_combination() {
        let path = builtin_network(&Builtin::Combination { n: 1, k: 1 }).unwrap();
        assert_eq!(mu(&path), CutValue(1));
        let comb = builtin_network(&Builtin::Combination { n: 5, k: 2 }).unwrap();
        for &t in comb.terminals() {
            assert_eq!(min_cut_at(&comb, t), CutValue(2));
        }
        assert_eq!(mu(&builtin_network(&Builtin::Latin).unwrap()), CutValue(2));
    }
}
