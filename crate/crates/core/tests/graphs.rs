//! Dual graphs and the admissibility machinery against brute-force oracles.

use std::collections::BTreeMap;

use proptest::prelude::*;

use shimura_aut::arith::Level;
use shimura_aut::autbound::{candidate_vertex_perms, is_admissible, minimal_extension, GraphAut};
use shimura_aut::cdgraph::{
    desingularize, minimal_model_graph, stable_model_graph, BadFiber, Edge, LengthGraph, Side,
    Vertex,
};
use shimura_aut::shimura::genus;

/// Bipartite multigraph without loops from an edge multiplicity table.
fn graph(left: usize, counts: &[Vec<usize>]) -> LengthGraph {
    let right = counts[0].len();
    let mut vertices = Vec::new();
    for i in 0..left + right {
        vertices.push(Vertex {
            id: i,
            side: if i < left { Side::V } else { Side::VPrime },
            length: 1,
            class: None,
        });
    }
    let mut edges = Vec::new();
    for (i, row) in counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            for _ in 0..c {
                edges.push(Edge {
                    id: edges.len(),
                    from: i,
                    to: left + j,
                    length: 1,
                });
            }
        }
    }
    LengthGraph {
        p: 3,
        vertices,
        edges,
    }
}

/// Admissibility straight from the definition.
fn admissible_oracle(g: &LengthGraph, vmap: &[usize], emap: &[usize]) -> bool {
    (0..g.vertices.len()).filter(|&v| vmap[v] == v).all(|v| {
        g.edges
            .iter()
            .filter(|e| (e.from == v || e.to == v) && emap[e.id] == e.id)
            .count()
            < 3
    })
}

fn shuffle_within_classes(g: &LengthGraph, keys: &[u64]) -> Vec<usize> {
    let mut classes: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for e in &g.edges {
        classes.entry((e.from, e.to)).or_default().push(e.id);
    }
    let mut emap: Vec<usize> = (0..g.edges.len()).collect();
    let mut k = 0;
    for ids in classes.values() {
        let mut target = ids.clone();
        for i in (1..target.len()).rev() {
            let r = keys[k % keys.len()] as usize % (i + 1);
            k += 1;
            target.swap(i, r);
        }
        for (a, b) in ids.iter().zip(target) {
            emap[*a] = b;
        }
    }
    emap
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn admissibility_matches_the_definition(
        left in 1usize..4,
        counts in prop::collection::vec(prop::collection::vec(0usize..4, 3), 3),
        keys in prop::collection::vec(any::<u64>(), 1..40),
    ) {
        let counts: Vec<Vec<usize>> = counts.into_iter().take(left).collect();
        let g = graph(left, &counts);
        prop_assume!(!g.edges.is_empty());
        let vmap: Vec<usize> = (0..g.vertices.len()).collect();
        let emap = shuffle_within_classes(&g, &keys);
        let aut = GraphAut {
            vertex_map: vmap.iter().enumerate().map(|(a, &b)| (a, b)).collect(),
            edge_map: emap.iter().enumerate().map(|(a, &b)| (a, b)).collect(),
        };
        prop_assert!(aut.is_valid(&g));
        prop_assert_eq!(is_admissible(&g, &aut), admissible_oracle(&g, &vmap, &emap));
    }

    #[test]
    fn minimal_extension_fixes_at_most_one_edge_per_class(
        left in 1usize..4,
        counts in prop::collection::vec(prop::collection::vec(0usize..5, 3), 3),
    ) {
        let counts: Vec<Vec<usize>> = counts.into_iter().take(left).collect();
        let g = graph(left, &counts);
        let id: BTreeMap<usize, usize> = g.vertices.iter().map(|v| (v.id, v.id)).collect();
        let ext = minimal_extension(&g, &id).expect("identity extends");
        prop_assert!(ext.is_valid(&g) && ext.is_involution());
        for (i, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                let fixed = g
                    .edges
                    .iter()
                    .filter(|e| e.from == i && e.to == left + j && ext.edge_map[&e.id] == e.id)
                    .count();
                prop_assert_eq!(fixed, c % 2);
            }
        }
    }
}

#[test]
fn candidates_contain_the_identity_and_are_closed_under_atkin_lehner() {
    for d in [85u64, 145, 161, 205, 493, 697, 1057] {
        let level = Level::new(d, 1).unwrap();
        for &p in level.d_primes() {
            let fiber = BadFiber::new(&level, p).unwrap();
            let perms = candidate_vertex_perms(&fiber.classes, &fiber.brandt, &fiber.atkin_lehner);
            let h = fiber.h();
            assert!(perms.contains(&(0..h).collect()), "D = {d}, p = {p}");
            for sigma in &perms {
                for w in &fiber.atkin_lehner {
                    let composed: Vec<usize> = (0..h).map(|i| w.perm[sigma[i]]).collect();
                    assert!(perms.contains(&composed), "D = {d}, p = {p}");
                }
            }
        }
    }
}

#[test]
fn models_shrink_and_keep_the_genus() {
    for d in [26u64, 35, 51, 85, 205, 314, 377] {
        let level = Level::new(d, 1).unwrap();
        let g = genus(&level).unwrap();
        for &p in level.d_primes() {
            let raw = BadFiber::new(&level, p).unwrap().graph;
            let des = desingularize(&raw).graph;
            let min = minimal_model_graph(&raw, g).unwrap().graph;
            let st = stable_model_graph(&raw, g).unwrap().graph;
            assert_eq!(des.betti_number(), g as i64);
            assert!(min.vertices.len() <= des.vertices.len());
            assert!(st.vertices.len() <= min.vertices.len());
            assert_eq!(st.connected_components(), 1);
            assert!(st.vertices.iter().all(|v| st.degree(v.id) >= 3));
        }
    }
}

#[test]
fn level_with_n_greater_than_one() {
    let level = Level::new(6, 5).unwrap();
    for &p in level.d_primes() {
        let fiber = BadFiber::new(&level, p).unwrap();
        fiber.check_invariants().unwrap();
        assert_eq!(
            desingularize(&fiber.graph).graph.betti_number(),
            genus(&level).unwrap() as i64
        );
    }
}
