use std::fmt;
use std::str::FromStr;

use super::{validate_network, Network, NetworkError, RawNetwork};

pub const BUTTERFLY_JSON: &str = include_str!("../../../../data/butterfly.json");
pub const LATIN_JSON: &str = include_str!("../../../../data/latin.json");

/// The shipped example networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Butterfly,
    /// Source, `n` middle vertices, one terminal per `k`-subset of them.
    Combination { n: usize, k: usize },
    /// Two-bottleneck network whose unambiguous pairs are orthogonal partial
    /// Latin squares.
    Latin,
}

impl Builtin {
    /// File stem used under the data directory and in export file names.
    pub fn file_stem(&self) -> String {
        match self {
            Builtin::Butterfly => "butterfly".into(),
            Builtin::Combination { n, k } => format!("combination_{n}_{k}"),
            Builtin::Latin => "latin".into(),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Butterfly => write!(f, "butterfly"),
            Builtin::Combination { n, k } => write!(f, "combination:{n},{k}"),
            Builtin::Latin => write!(f, "latin"),
        }
    }
}

impl FromStr for Builtin {
    type Err = NetworkError;

    /// Accepts `butterfly`, `latin`, `combination:n,k` and `combination(n,k)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || NetworkError::UnknownBuiltin(s.to_string());
        match s.trim() {
            "butterfly" => return Ok(Builtin::Butterfly),
            "latin" => return Ok(Builtin::Latin),
            _ => {}
        }
        let rest = s.trim().strip_prefix("combination").ok_or_else(unknown)?;
        let args = rest
            .strip_prefix(':')
            .or_else(|| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            .ok_or_else(unknown)?;
        let (a, b) = args.split_once(',').ok_or_else(unknown)?;
        let n = a.trim().parse().map_err(|_| unknown())?;
        let k = b.trim().parse().map_err(|_| unknown())?;
        if k == 0 || k > n {
            return Err(NetworkError::BadCombination { n, k });
        }
        Ok(Builtin::Combination { n, k })
    }
}

pub fn builtin_network(which: &Builtin) -> Result<Network, NetworkError> {
    let raw = match *which {
        Builtin::Butterfly => parse_embedded(BUTTERFLY_JSON)?,
        Builtin::Latin => parse_embedded(LATIN_JSON)?,
        Builtin::Combination { n, k } => combination(n, k)?,
    };
    validate_network(&raw).map_err(|e| NetworkError::BuiltinData(e.to_string()))
}

fn parse_embedded(text: &str) -> Result<RawNetwork, NetworkError> {
    RawNetwork::from_json(text).map_err(|e| NetworkError::BuiltinData(e.to_string()))
}

fn combination(n: usize, k: usize) -> Result<RawNetwork, NetworkError> {
    if k == 0 || k > n {
        return Err(NetworkError::BadCombination { n, k });
    }
    let mut vertices = vec!["S".to_string()];
    vertices.extend((1..=n).map(|i| format!("V{i}")));
    let mut edges: Vec<(String, String, String)> =
        (1..=n).map(|i| (format!("e{i}"), "S".into(), format!("V{i}"))).collect();
    let mut terminals = Vec::new();
    for subset in k_subsets(n, k) {
        let name = format!(
            "T{}",
            subset.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("_")
        );
        for &i in &subset {
            let id = format!("e{}", edges.len() + 1);
            edges.push((id, format!("V{i}"), name.clone()));
        }
        vertices.push(name.clone());
        terminals.push(name);
    }
    Ok(RawNetwork { vertices, edges, source: "S".into(), terminals })
}

/// k-subsets of {1..n} in lexicographic order.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - (k - 1 - i)) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("butterfly".parse::<Builtin>().unwrap(), Builtin::Butterfly);
        assert_eq!("combination:5,2".parse::<Builtin>().unwrap(), Builtin::Combination { n: 5, k: 2 });
        assert_eq!("combination(4, 3)".parse::<Builtin>().unwrap(), Builtin::Combination { n: 4, k: 3 });
        assert!(matches!("combination:2,3".parse::<Builtin>(), Err(NetworkError::BadCombination { .. })));
        assert!(matches!("combination:2,0".parse::<Builtin>(), Err(NetworkError::BadCombination { .. })));
        assert!(matches!("petersen".parse::<Builtin>(), Err(NetworkError::UnknownBuiltin(_))));
    }

    #[test]
    fn sizes() {
        let b = builtin_network(&Builtin::Butterfly).unwrap();
        assert_eq!((b.vertex_count(), b.edge_count()), (7, 9));
        let c = builtin_network(&Builtin::Combination { n: 5, k: 2 }).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (16, 25));
        assert_eq!(c.terminals().len(), 10);
        let p = builtin_network(&Builtin::Combination { n: 1, k: 1 }).unwrap();
        assert_eq!(p.to_raw().edges.len(), 2);
        assert_eq!(p.vertex_names(), ["S", "V1", "T1"]);
        let f = builtin_network(&Builtin::Latin).unwrap();
        assert_eq!(f.terminals().len(), 5);
    }

    #[test]
    fn combination_terminals_see_their_subset() {
        let c = builtin_network(&Builtin::Combination { n: 5, k: 2 }).unwrap();
        let t = c.vertex_index("T2_5").unwrap();
        let from: Vec<&str> =
            c.in_edges(t).iter().map(|&e| c.vertex_name(c.edge(e).tail)).collect();
        assert_eq!(from, ["V2", "V5"]);
    }

    #[test]
    fn shipped_combination_file_matches_generator() {
        let text = include_str!("../../../../data/combination_5_2.json");
        let shipped = validate_network(&RawNetwork::from_json(text).unwrap()).unwrap();
        assert_eq!(shipped, builtin_network(&Builtin::Combination { n: 5, k: 2 }).unwrap());
    }
}
