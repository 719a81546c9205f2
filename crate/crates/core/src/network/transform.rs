use super::{mu, validate_network, Network, RawNetwork};

/// Prepends a new source `S'` joined to the old source by `mu(n)` parallel
/// edges. The minimum cut is unchanged, and codes for the new network that
/// use the full space `A^mu` induce codes for the old one.
///
/// The new vertex is named `S'` (with extra primes on a name clash) and the
/// new edges `e'1 .. e'mu`.
pub fn add_supersource(n: &Network) -> Network {
    let width = mu(n).0;
    let mut raw: RawNetwork = n.to_raw();
    let mut name = format!("{}'", raw.source);
    while raw.vertices.contains(&name) {
        name.push('\'');
    }
    let mut prefix = "e'".to_string();
    while raw.edges.iter().any(|(id, _, _)| id.starts_with(&prefix)) {
        prefix.push('\'');
    }
    let old_source = raw.source.clone();
    raw.vertices.insert(0, name.clone());
    let mut edges: Vec<_> = (1..=width)
        .map(|i| (format!("{prefix}{i}"), name.clone(), old_source.clone()))
        .collect();
    edges.append(&mut raw.edges);
    raw.edges = edges;
    raw.source = name;
    validate_network(&raw).expect("adding a supersource keeps the axioms")
}

/// Intermediate vertices with exactly one incoming edge. Their function can
/// be fixed to plain replication without changing whether an unambiguous
/// pair exists.
pub fn routing_fixable_vertices(n: &Network) -> Vec<usize> {
    n.intermediates().filter(|&v| n.in_edges(v).len() == 1).collect()
}
