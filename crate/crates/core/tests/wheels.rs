use std::collections::BTreeSet;

use girthwright::canvas::{Canvas, ListAssignment, Precoloured};
use girthwright::generator::{make_broken_wheel, make_generalized, make_wheel, WheelPiece};
use girthwright::girth::girth_profile;
use girthwright::io::load_canvas;
use girthwright::oracle::blocked_colourings_of_s;
use girthwright::plane_graph::PlaneGraph;
use girthwright::wheels::{
    blocked_principal_colourings, certificate_holds, classify_exception,
    recognize_generalized_wheel, ExceptionKind, WheelCertificate, WheelKind,
};
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus(name: &str) -> Canvas {
    let path = format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"));
    load_canvas(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .0
}

fn hypothesis_lists(
    g: &PlaneGraph,
    w: &WheelCertificate,
    universe: usize,
    seed: u64,
) -> ListAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outer: BTreeSet<usize> = w.outer_cycle.iter().copied().collect();
    (0..g.n())
        .map(|v| {
            let size = if outer.contains(&v) { 3 } else { 5 };
            sample(&mut rng, universe, size)
                .into_iter()
                .map(|c| c as u32 + 1)
                .collect()
        })
        .collect()
}

fn pieces() -> impl Strategy<Value = Vec<WheelPiece>> {
    let piece = prop_oneof![
        (1usize..3).prop_map(WheelPiece::Fan),
        (1usize..4).prop_map(WheelPiece::Hub),
    ];
    prop::collection::vec(piece, 1..4).prop_filter("a hub and at most nine vertices", |ps| {
        let size: usize = ps
            .iter()
            .map(|p| match p {
                WheelPiece::Fan(k) => *k,
                WheelPiece::Hub(k) => k + 1,
            })
            .sum();
        ps.iter().any(|p| matches!(p, WheelPiece::Hub(_))) && size + 2 <= 9
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn at_most_one_blocked_colouring(ps in pieces(), universe in 5usize..8, seed in any::<u64>()) {
        // a wheel on a triangle rim glued to a triangle leaves a rim vertex
        // adjacent to the whole principal path (see the K4 test below)
        prop_assume!(ps.iter().all(|p| *p != WheelPiece::Hub(1)));
        let (g, w) = make_generalized(&ps);
        prop_assume!(!w.is_broken_wheel());
        let l = hypothesis_lists(&g, &w, universe, seed);
        let blocked = blocked_principal_colourings(&g, &w, &l).unwrap();
        prop_assert!(blocked.len() <= 1, "{:?} blocked {:?}", ps, blocked);
    }

    #[test]
    fn generated_wheels_are_recognized(ps in pieces()) {
        let (g, w) = make_generalized(&ps);
        let outer: BTreeSet<usize> = g.boundary_vertices().into_iter().collect();
        let found = recognize_generalized_wheel(&g, &w.principal_path, &outer).unwrap();
        let found = found.expect("generated generalized wheel recognized");
        prop_assert_eq!(found.vertices(), w.vertices());
        prop_assert_eq!(found.edges(), w.edges());
        let p = girth_profile(&g);
        prop_assert!(w.vertices().iter().all(|&v| p.of(v).is(3)));
    }
}

#[test]
fn exceptional_corpus_vectors() {
    for (name, kind) in [
        ("exceptional_type_i.json", ExceptionKind::TypeI),
        ("exceptional_type_ii.json", ExceptionKind::TypeII),
        ("exceptional_type_iii.json", ExceptionKind::TypeIII),
    ] {
        let k = corpus(name);
        let cert = classify_exception(&k, &girth_profile(&k.graph)).unwrap();
        assert_eq!(cert.kind, kind, "{name}");
        assert!(certificate_holds(&k, &cert), "{name}");
        assert!(!blocked_colourings_of_s(&k).is_empty(), "{name}");
    }
}

#[test]
fn broken_wheel_blocked_sets() {
    let (g, w) = make_broken_wheel(4);
    let one = |c: u32| BTreeSet::from([c]);
    let mut l: ListAssignment = vec![one(1), one(2), one(3), BTreeSet::from([1, 2, 3])];
    assert_eq!(w.kind, WheelKind::BrokenWheel);
    assert_eq!(
        blocked_principal_colourings(&g, &w, &l).unwrap(),
        BTreeSet::from([[1, 2, 3]])
    );
    l[3] = BTreeSet::from([1, 2, 4]);
    assert!(blocked_principal_colourings(&g, &w, &l).unwrap().is_empty());
}

#[test]
fn wheel_with_three_rim_vertices_in_s_is_type_three() {
    let (g, w) = make_wheel(5);
    let mut l = vec![BTreeSet::from([1, 2, 3]); 6];
    l[5] = (1..=5).collect();
    let k = Canvas::new(
        g,
        l,
        Precoloured::Path(w.principal_path.to_vec()),
        BTreeSet::new(),
    );
    let cert = classify_exception(&k, &girth_profile(&k.graph)).unwrap();
    assert_eq!(cert.kind, ExceptionKind::TypeIII);
    assert_eq!(cert.wheel.unwrap().kind, WheelKind::Wheel);
}

#[test]
fn short_lists_violate_hypotheses() {
    let (g, w) = make_wheel(4);
    let mut l = vec![BTreeSet::from([1, 2, 3]); 5];
    l[4] = BTreeSet::from([1, 2, 3, 4]);
    assert!(blocked_principal_colourings(&g, &w, &l).is_err());
}

#[test]
fn triangle_rim_wheel_admits_several_blocked_colourings() {
    let (g, w) = make_generalized(&[WheelPiece::Hub(1), WheelPiece::Fan(1)]);
    assert_eq!(w.kind, WheelKind::Composite);
    let [v1, v2, v3] = w.principal_path;
    let x = w
        .outer_cycle
        .iter()
        .copied()
        .find(|v| !w.principal_path.contains(v))
        .unwrap();
    assert!([v1, v2, v3].iter().all(|&p| g.has_edge(p, x)));
    let mut l: ListAssignment = (0..g.n()).map(|_| (1..=5).collect()).collect();
    for v in [v1, v2, v3, x] {
        l[v] = BTreeSet::from([1, 3, 4]);
    }
    // every bijection of the principal path onto L(x) blocks x
    assert_eq!(blocked_principal_colourings(&g, &w, &l).unwrap().len(), 6);
}
