use std::collections::{BTreeSet, HashMap};

use girthwright::generator::{all_connected_planar, random_planar};
use girthwright::plane_graph::{GraphError, PlaneGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(n: usize, drop: f64, seed: u64) -> PlaneGraph {
    random_planar(n, drop, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn vertex_set(g: &PlaneGraph) -> BTreeSet<usize> {
    (0..g.n()).map(|v| g.origin(v)).collect()
}

fn edge_set(g: &PlaneGraph) -> BTreeSet<(usize, usize)> {
    g.edges()
        .into_iter()
        .map(|(u, v)| {
            let (a, b) = (g.origin(u), g.origin(v));
            (a.min(b), a.max(b))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn faces_partition_darts(n in 2usize..14, drop in 0.0f64..0.7, seed in any::<u64>()) {
        let g = graph(n, drop, seed);
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for f in g.faces() {
            for &d in f {
                *seen.entry(d).or_default() += 1;
            }
        }
        prop_assert_eq!(seen.len(), 2 * g.edge_count());
        prop_assert!(seen.values().all(|&c| c == 1));
        for (u, v) in g.edges() {
            prop_assert!(seen.contains_key(&(u, v)) && seen.contains_key(&(v, u)));
        }
        let euler = g.n() as i64 - g.edge_count() as i64 + g.faces().len() as i64;
        prop_assert_eq!(euler, 2);
    }

    #[test]
    fn chord_splits_cover_the_graph(n in 4usize..13, seed in any::<u64>()) {
        let g = graph(n, 0.2, seed);
        prop_assume!(g.is_2_connected());
        let c = g.outer_boundary().vertices;
        for (u, w) in g.chords_of(&c).unwrap() {
            let (g1, g2) = g.split_along_path(&[u, w]).unwrap();
            prop_assert_eq!(g1.n() + g2.n(), g.n() + 2);
            prop_assert_eq!(g1.edge_count() + g2.edge_count(), g.edge_count() + 1);
            let common: BTreeSet<_> = vertex_set(&g1).intersection(&vertex_set(&g2)).copied().collect();
            prop_assert_eq!(common, BTreeSet::from([u, w]));
            let union: BTreeSet<_> = edge_set(&g1).union(&edge_set(&g2)).copied().collect();
            prop_assert_eq!(union, edge_set(&g));
        }
    }

    #[test]
    fn cut_vertex_splits(n in 3usize..13, drop in 0.4f64..0.9, seed in any::<u64>()) {
        let g = graph(n, drop, seed);
        for u in g.cut_vertices() {
            // a cut vertex off the outer face, or a block nested in an inner
            // face, does not give two parts with u on their outer faces
            let Ok((g1, g2)) = g.split_along_path(&[u]) else { continue };
            prop_assert!(g.is_boundary_vertex(u));
            prop_assert_eq!(g1.n() + g2.n(), g.n() + 1);
            prop_assert_eq!(g1.edge_count() + g2.edge_count(), g.edge_count());
        }
        prop_assert_eq!(g.cut_vertices().is_empty(), g.n() < 3 || g.is_2_connected());
    }

    #[test]
    fn interior_is_consistent(n in 4usize..12, seed in any::<u64>()) {
        let g = graph(n, 0.1, seed);
        for c in g.short_cycles(3, 5) {
            let (open, closed) = g.interior(&c).unwrap();
            let mut expect: BTreeSet<_> = open.clone();
            expect.extend(c.iter().copied());
            prop_assert_eq!(vertex_set(&closed), expect);
            prop_assert!(open.iter().all(|v| !c.contains(v)));
            for v in 0..closed.n() {
                let o = closed.origin(v);
                prop_assert_eq!(closed.is_boundary_vertex(v), c.contains(&o));
            }
        }
    }

    #[test]
    fn subgraphs_keep_origins(n in 2usize..12, seed in any::<u64>(), mask in any::<u16>()) {
        let g = graph(n, 0.3, seed);
        let keep: Vec<bool> = (0..g.n()).map(|v| mask >> (v % 16) & 1 == 1).collect();
        let h = g.induced(&keep);
        for (u, v) in h.edges() {
            prop_assert!(g.has_edge(h.origin(u), h.origin(v)));
        }
        for v in 0..h.n() {
            prop_assert_eq!(h.local_of(h.origin(v)), Some(v));
            prop_assert!(keep[h.origin(v)]);
        }
        let kept_edges = g.edges().iter().filter(|&&(u, v)| keep[u] && keep[v]).count();
        prop_assert_eq!(h.edge_count(), kept_edges);
    }
}

#[test]
fn bowtie_split_and_cut_vertex() {
    // two triangles sharing vertex 2
    let rot = vec![
        vec![1, 2],
        vec![2, 0],
        vec![0, 1, 3, 4],
        vec![4, 2],
        vec![2, 3],
    ];
    let g = PlaneGraph::new(rot, Some((0, 1))).unwrap();
    assert_eq!(g.cut_vertices(), BTreeSet::from([2]));
    let (g1, g2) = g.split_along_path(&[2]).unwrap();
    assert_eq!(
        (g1.n(), g1.edge_count(), g2.n(), g2.edge_count()),
        (3, 3, 3, 3)
    );
}

#[test]
fn c5_non_edge_is_not_a_path() {
    let rot = (0..5).map(|i| vec![(i + 1) % 5, (i + 4) % 5]).collect();
    let g = PlaneGraph::new(rot, Some((0, 1))).unwrap();
    assert!(g.cut_vertices().is_empty() && g.is_2_connected());
    assert_eq!(g.split_along_path(&[0, 2]), Err(GraphError::NotSeparating));
}

#[test]
fn every_small_graph_satisfies_euler() {
    for n in 1..=6 {
        for g in all_connected_planar(n) {
            let f = g.faces().len() as i64;
            let euler = g.n() as i64 - g.edge_count() as i64 + f;
            assert!(
                euler == 2 || (g.edge_count() == 0 && f == 0),
                "{:?}",
                g.rotations()
            );
        }
    }
}
