mod common;

use common::{random_network, Shape};
use netcap::coding::{is_linear, is_unambiguous, make_alphabet, tuple_count};
use netcap::network::mu;
use netcap::search::{brute_force_oracle, decide_feasible, oracle_size, Outcome, SearchOptions};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const ORACLE_BUDGET: u128 = 1_000_000;
const INSTANCES: usize = 240;

struct Instance {
    n: netcap::network::Network,
    q: usize,
    m: usize,
}

fn instances(seed: u64, linear: bool) -> Vec<Instance> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < INSTANCES {
        let n = random_network(&mut rng, Shape::default());
        let q = if linear { [2, 3][rng.gen_range(0..2)] } else { rng.gen_range(2..=3) };
        let space = tuple_count(q, n.out_edges(n.source()).len()).unwrap();
        let m = rng.gen_range(1..=space.min(4));
        // keep roughly half the sample on networks that actually mix symbols
        let coding = n.intermediates().any(|v| n.in_edges(v).len() >= 2);
        if !coding && out.len() % 2 == 0 {
            continue;
        }
        if oracle_size(&n, q, m, linear).is_some_and(|s| s <= ORACLE_BUDGET) {
            out.push(Instance { n, q, m });
        }
    }
    out
}

#[test]
fn engine_agrees_with_oracle() {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut yes, mut no) = (0, 0);
    for (i, inst) in instances(1, false).iter().enumerate() {
        let a = make_alphabet(inst.q, false).unwrap();
        let oracle = brute_force_oracle(&inst.n, &a, inst.m, false, ORACLE_BUDGET).unwrap();
        let opts = SearchOptions {
            routing_fix: rng.gen(),
            symmetry_break: rng.gen(),
            workers: rng.gen_range(1..=2),
            ..SearchOptions::default()
        };
        let d = decide_feasible(&inst.n, &a, inst.m, &opts).unwrap();
        assert_ne!(d.outcome, Outcome::Timeout);
        assert_eq!(
            d.outcome.is_feasible(),
            oracle.is_some(),
            "instance {i}: q={} M={} {opts:?}\n{}",
            inst.q,
            inst.m,
            inst.n.to_json()
        );
        if let Some(cert) = d.outcome.certificate() {
            yes += 1;
            assert_eq!(cert.size(), inst.m);
            assert!(cert.size() <= tuple_count(inst.q, mu(&inst.n).0).unwrap());
            // deleting any codeword keeps the pair unambiguous
            for k in 0..cert.size() {
                if let Some(smaller) = cert.outer_code.without(k) {
                    assert!(is_unambiguous(&inst.n, &smaller, &cert.network_code).unwrap().is_yes());
                }
            }
        } else {
            no += 1;
        }
    }
    assert!(yes >= 40 && no >= 20, "unbalanced sample: {yes} feasible, {no} infeasible");
}

#[test]
fn sample_contains_coding_vertices() {
    let all = instances(1, false);
    let coding = all
        .iter()
        .filter(|i| i.m > 1 && i.n.intermediates().any(|v| i.n.in_edges(v).len() >= 2))
        .count();
    let q3 = all.iter().filter(|i| i.q == 3 && i.m > 1).count();
    eprintln!("{coding} instances with a multi-input vertex, {q3} nontrivial over q = 3");
    assert!(coding >= 80 && q3 >= 20);
}

#[test]
fn routing_fix_does_not_change_answers() {
    for inst in instances(2, false) {
        let a = make_alphabet(inst.q, false).unwrap();
        let answers: Vec<bool> = [false, true]
            .into_iter()
            .map(|rf| {
                let opts = SearchOptions { routing_fix: rf, ..SearchOptions::default() };
                decide_feasible(&inst.n, &a, inst.m, &opts).unwrap().outcome.is_feasible()
            })
            .collect();
        assert_eq!(answers[0], answers[1], "q={} M={}\n{}", inst.q, inst.m, inst.n.to_json());
    }
}

#[test]
fn linear_engine_agrees_with_linear_oracle() {
    let (mut yes, mut no) = (0, 0);
    for inst in instances(3, true) {
        let a = make_alphabet(inst.q, true).unwrap();
        let oracle = brute_force_oracle(&inst.n, &a, inst.m, true, ORACLE_BUDGET).unwrap();
        let opts = SearchOptions { linear_only: true, ..SearchOptions::default() };
        let d = decide_feasible(&inst.n, &a, inst.m, &opts).unwrap();
        assert_eq!(d.outcome.is_feasible(), oracle.is_some(), "q={} M={}\n{}", inst.q, inst.m, inst.n.to_json());
        match d.outcome.certificate() {
            Some(cert) => {
                yes += 1;
                assert!(is_linear(&cert.network_code, &a).unwrap());
            }
            None => no += 1,
        }
    }
    assert!(yes >= 40 && no >= 10, "unbalanced sample: {yes} feasible, {no} infeasible");
}

#[test]
fn worker_count_does_not_change_answers() {
    for inst in instances(4, false).iter().take(80) {
        let a = make_alphabet(inst.q, false).unwrap();
        let answers: Vec<bool> = [1, 2, 4]
            .into_iter()
            .map(|workers| {
                let opts = SearchOptions { workers, ..SearchOptions::default() };
                decide_feasible(&inst.n, &a, inst.m, &opts).unwrap().outcome.is_feasible()
            })
            .collect();
        assert!(answers.windows(2).all(|w| w[0] == w[1]));
    }
}
