#![allow(dead_code)]

use netcap::network::{validate_network, Network, RawNetwork};
use rand::rngs::StdRng;
use rand::Rng;

/// Shape limits for random networks.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_intermediates: usize,
    pub max_terminals: usize,
    pub max_edges: usize,
    pub max_source_out: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_intermediates: 3, max_terminals: 2, max_edges: 9, max_source_out: 2 }
    }
}

/// Random network satisfying every axiom: vertices are created in a fixed
/// topological order and wired so that all of them lie on a source-terminal
/// path; parallel edges are allowed.
pub fn random_network(rng: &mut StdRng, shape: Shape) -> Network {
    loop {
        if let Some(n) = try_random(rng, shape) {
            return n;
        }
    }
}

fn try_random(rng: &mut StdRng, shape: Shape) -> Option<Network> {
    let k = rng.gen_range(0..=shape.max_intermediates);
    let t = rng.gen_range(1..=shape.max_terminals);
    let mut names = vec!["S".to_string()];
    names.extend((1..=k).map(|i| format!("V{i}")));
    names.extend((1..=t).map(|i| format!("T{i}")));
    let is_terminal = |v: usize| v > k;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // every intermediate and terminal gets an in-edge from an earlier non-terminal
    for v in 1..names.len() {
        let tail = rng.gen_range(0..v.min(k + 1));
        edges.push((tail, v));
    }
    // every non-terminal gets an out-edge
    for v in 0..=k {
        if !edges.iter().any(|&(u, _)| u == v) {
            let head = rng.gen_range(v + 1..names.len());
            edges.push((v, head));
        }
    }
    let budget = rng.gen_range(edges.len()..=shape.max_edges.max(edges.len()));
    while edges.len() < budget {
        let tail = rng.gen_range(0..=k);
        let head = rng.gen_range(tail + 1..names.len());
        edges.push((tail, head));
    }
    if edges.iter().filter(|&&(u, _)| u == 0).count() > shape.max_source_out {
        return None;
    }
    debug_assert!(edges.iter().all(|&(u, v)| !is_terminal(u) && v != 0));
    let raw = RawNetwork {
        vertices: names.clone(),
        edges: edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (format!("e{}", i + 1), names[u].clone(), names[v].clone()))
            .collect(),
        source: "S".into(),
        terminals: names[k + 1..].to_vec(),
    };
    validate_network(&raw).ok()
}

/// All simple source-to-`t` paths, as edge lists.
pub fn paths_to(n: &Network, t: usize) -> Vec<Vec<usize>> {
    fn walk(n: &Network, v: usize, t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for &e in n.out_edges(v) {
            path.push(e);
            walk(n, n.edge(e).head, t, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(n, n.source(), t, &mut Vec::new(), &mut out);
    out
}

/// Minimum number of edges whose removal disconnects `t` from the source,
/// by trying every edge subset in increasing size.
pub fn brute_min_cut(n: &Network, t: usize) -> usize {
    let m = n.edge_count();
    let paths = paths_to(n, t);
    let masks: Vec<u64> = paths.iter().map(|p| p.iter().fold(0u64, |acc, &e| acc | 1 << e)).collect();
    (0..=m)
        .find(|&size| {
            (0u64..1 << m)
                .filter(|s| s.count_ones() as usize == size)
                .any(|cut| masks.iter().all(|&p| p & cut != 0))
        })
        .unwrap()
}
