//! Structural invariants checked over generated inputs.

use proptest::prelude::*;

use momix::graph::{parse_edge_list, Graph};
use momix::motifs::{moment_vector, motif_family};

fn arbitrary_graph() -> impl Strategy<Value = Graph> {
    (4usize..14).prop_flat_map(|n| {
        let pairs = proptest::collection::vec((0..n as u32, 0..n as u32), 0..50);
        pairs.prop_map(move |raw| {
            let edges: Vec<(u32, u32)> = raw.into_iter().filter(|(a, b)| a != b).collect();
            Graph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn edge_list_round_trips(g in arbitrary_graph()) {
        let text = g.to_edge_list();
        let (parsed, diag) = parse_edge_list(&text, Some(g.node_count())).unwrap();
        prop_assert_eq!(parsed.edges(), g.edges());
        prop_assert_eq!(diag.self_loops_dropped, 0);
        prop_assert_eq!(diag.duplicate_edges_dropped, 0);
    }

    #[test]
    fn handshake_and_symmetry(g in arbitrary_graph()) {
        let degrees = g.degree_sequence();
        prop_assert_eq!(degrees.iter().sum::<usize>(), 2 * g.edge_count());
        for u in 0..g.node_count() as u32 {
            for v in 0..g.node_count() as u32 {
                prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
            }
        }
    }

    #[test]
    fn edge_density_closed_form(g in arbitrary_graph()) {
        let family = motif_family(4).unwrap();
        let n = g.node_count() as f64;
        let expected = 2.0 * g.edge_count() as f64 / (n * (n - 1.0));
        let mv = moment_vector::<f64>(&g, &family);
        prop_assert_eq!(mv.values()[0], expected);
    }

    #[test]
    fn moment_vector_is_permutation_invariant(g in arbitrary_graph(), seed in any::<u64>()) {
        let n = g.node_count();
        // derive a permutation from the seed
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            perm.swap(i, j);
        }
        let relabeled = Graph::new(
            n,
            g.edges().iter().map(|&(u, v)| (perm[u as usize], perm[v as usize])),
        )
        .unwrap();
        let family = motif_family(4).unwrap();
        let original = moment_vector::<f64>(&g, &family);
        let shuffled = moment_vector::<f64>(&relabeled, &family);
        // counts are exact integers, so the densities match bit for bit
        prop_assert_eq!(original.values(), shuffled.values());
    }

    #[test]
    fn adding_an_edge_never_decreases_density(g in arbitrary_graph()) {
        let n = g.node_count() as u32;
        let missing = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .find(|&(u, v)| !g.has_edge(u, v));
        prop_assume!(missing.is_some());
        let (u, v) = missing.unwrap();
        let mut edges: Vec<(u32, u32)> = g.edges().to_vec();
        edges.push((u, v));
        let denser = Graph::new(g.node_count(), edges).unwrap();
        let family = motif_family(4).unwrap();
        let before = moment_vector::<f64>(&g, &family);
        let after = moment_vector::<f64>(&denser, &family);
        for (b, a) in before.values().iter().zip(after.values()) {
            prop_assert!(a >= b, "density dropped from {b} to {a}");
        }
    }
}
