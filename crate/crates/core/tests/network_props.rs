mod common;

use common::{brute_min_cut, paths_to, random_network, Shape};
use netcap::network::{add_supersource, min_cut_at, mu, routing_fixable_vertices};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn small() -> Shape {
    Shape { max_intermediates: 4, max_terminals: 3, max_edges: 12, max_source_out: 4 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn min_cut_matches_edge_subset_search(seed in any::<u64>()) {
        let n = random_network(&mut StdRng::seed_from_u64(seed), small());
        for &t in n.terminals() {
            prop_assert_eq!(min_cut_at(&n, t).0, brute_min_cut(&n, t));
        }
    }

    #[test]
    fn supersource_keeps_mu(seed in any::<u64>()) {
        let n = random_network(&mut StdRng::seed_from_u64(seed), small());
        let sup = add_supersource(&n);
        prop_assert_eq!(mu(&sup), mu(&n));
        prop_assert_eq!(sup.out_edges(sup.source()).len(), mu(&n).0);
        prop_assert_eq!(sup.vertex_count(), n.vertex_count() + 1);
        // the old source becomes an intermediate vertex
        let old = sup.vertex_index("S").unwrap();
        prop_assert!(sup.is_intermediate(old));
    }

    #[test]
    fn edge_order_extends_every_path(seed in any::<u64>()) {
        let n = random_network(&mut StdRng::seed_from_u64(seed), small());
        let order = n.edge_order();
        for &t in n.terminals() {
            for path in paths_to(&n, t) {
                for pair in path.windows(2) {
                    prop_assert!(order.rank(pair[0]) < order.rank(pair[1]));
                }
            }
        }
        let mut ranks: Vec<usize> = (0..n.edge_count()).map(|e| order.rank(e)).collect();
        ranks.sort_unstable();
        prop_assert_eq!(ranks, (1..=n.edge_count()).collect::<Vec<_>>());
    }

    #[test]
    fn routing_fixable_are_single_input_intermediates(seed in any::<u64>()) {
        let n = random_network(&mut StdRng::seed_from_u64(seed), small());
        let fixable = routing_fixable_vertices(&n);
        for v in 0..n.vertex_count() {
            let expected = n.is_intermediate(v) && n.in_edges(v).len() == 1;
            prop_assert_eq!(fixable.contains(&v), expected);
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let n = random_network(&mut StdRng::seed_from_u64(seed), small());
        let back = netcap::network::Network::from_json(&n.to_json()).unwrap();
        prop_assert_eq!(back, n);
    }
}
