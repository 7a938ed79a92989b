use std::collections::BTreeSet;

use girthwright::canvas::{Canvas, Colouring, ListAssignment, Precoloured};
use girthwright::engine::{admissible, colour, extend, Engine, EngineError, Extension, Tag};
use girthwright::generator::{make_broken_wheel, random_canvas, random_planar, ListTarget};
use girthwright::girth::girth_profile;
use girthwright::io::load_canvas;
use girthwright::oracle::{
    find_colouring, local_girth_sizes, precolourings_of_s, sample_assignment,
};
use girthwright::plane_graph::PlaneGraph;
use girthwright::wheels::{certificate_holds, classify_exception, ExceptionKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cycle(n: usize) -> PlaneGraph {
    let rot = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
    PlaneGraph::new(rot, Some((0, 1))).unwrap()
}

fn lists(n: usize, colours: &[u32]) -> ListAssignment {
    vec![colours.iter().copied().collect(); n]
}

fn phi_on(n: usize, pairs: &[(usize, u32)]) -> Colouring {
    let mut phi = Colouring::empty(n);
    for &(v, c) in pairs {
        phi.set(v, c);
    }
    phi
}

fn valid(k: &Canvas, phi: &Colouring) -> bool {
    phi.is_total() && phi.is_proper(&k.graph) && phi.respects(&k.lists)
}

/// Every precolouring of S of every unexceptional canvas extends, and the
/// extension agrees with the precolouring.
fn check_canvas(k: &Canvas) -> Result<usize, TestCaseError> {
    let p = girth_profile(&k.graph);
    let mut checked = 0;
    for tuple in precolourings_of_s(k) {
        let phi = phi_on(
            k.graph.n(),
            &k.s.vertices()
                .iter()
                .copied()
                .zip(tuple)
                .collect::<Vec<_>>(),
        );
        let pinned = k.pinned(&phi).unwrap();
        let mut e = Engine::strict(true);
        let out = e.extend(k, &phi);
        let oracle = find_colouring(&k.graph, &k.lists, &phi).colouring();
        match classify_exception(&pinned, &p) {
            None => {
                prop_assert!(
                    oracle.is_some(),
                    "oracle found no extension of an unexceptional canvas"
                );
                match out {
                    Ok(Extension::Coloured(c)) => {
                        prop_assert!(valid(k, &c));
                        prop_assert!(phi.coloured().all(|(v, x)| c.get(v) == Some(x)));
                    }
                    other => prop_assert!(false, "engine returned {:?}", other),
                }
                prop_assert_eq!(e.trace().fallbacks, 0);
                checked += 1;
            }
            Some(_) => match out {
                Ok(Extension::Coloured(c)) => prop_assert!(valid(k, &c)),
                Ok(Extension::Exception(cert)) => {
                    prop_assert!(oracle.is_none());
                    prop_assert!(certificate_holds(&pinned, &cert));
                }
                Err(err) => prop_assert!(false, "engine error {}", err),
            },
        }
    }
    Ok(checked)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn extend_matches_oracle(n in 2usize..8, seed in any::<u64>(), five in any::<bool>()) {
        let target = if five { ListTarget::GirthFive } else { ListTarget::LocalGirth };
        let k = random_canvas(n, seed, target, 6);
        prop_assume!(k.graph.n() <= 9);
        check_canvas(&k)?;
    }

    #[test]
    fn colour_is_sound(n in 1usize..16, drop in 0.0f64..0.6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_planar(n, drop, &mut rng);
        let l = sample_assignment(&local_girth_sizes(&g), 7, &mut rng);
        let mut e = Engine::strict(true);
        let phi = e.colour(&g, &l).unwrap();
        prop_assert!(phi.is_total() && phi.is_proper(&g) && phi.respects(&l));
        for step in &e.trace().steps {
            prop_assert!(step.n <= g.n());
        }
    }

    #[test]
    fn reductions_shrink(n in 3usize..9, seed in any::<u64>()) {
        let k = random_canvas(n, seed, ListTarget::LocalGirth, 6);
        let Some(tuple) = precolourings_of_s(&k).into_iter().next() else { return Ok(()) };
        let phi = phi_on(k.graph.n(), &k.s.vertices().iter().copied().zip(tuple).collect::<Vec<_>>());
        prop_assume!(classify_exception(&k.pinned(&phi).unwrap(), &girth_profile(&k.graph)).is_none());
        prop_assume!(k.s.len() < k.graph.n());
        let r = Engine::strict(true).reduce_once(&k, &phi).unwrap();
        prop_assert!(valid(&k, &r.colouring));
        let size = (k.graph.n(), k.total_list_size());
        for sub in &r.subcanvases {
            prop_assert!(admissible(sub));
            prop_assert!((sub.graph.n(), sub.total_list_size()) < size);
        }
    }
}

#[test]
fn k4_from_five_lists() {
    let rot = vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]];
    let g = PlaneGraph::new(rot, Some((1, 2))).unwrap();
    let l = lists(4, &[1, 2, 3, 4, 5]);
    let phi = colour(&g, &l).unwrap();
    assert!(phi.is_proper(&g));
    assert_eq!(phi.as_slice().iter().collect::<BTreeSet<_>>().len(), 4);
}

#[test]
fn c5_from_three_lists() {
    let g = cycle(5);
    for l in [
        lists(5, &[1, 2, 3]),
        vec![
            [1, 2, 3].into(),
            [2, 3, 4].into(),
            [3, 4, 5].into(),
            [1, 4, 5].into(),
            [1, 2, 5].into(),
        ],
    ] {
        let phi = colour(&g, &l).unwrap();
        assert!(phi.is_proper(&g) && phi.respects(&l));
    }
}

#[test]
fn lists_below_threshold_rejected() {
    let g = cycle(4);
    let err = colour(&g, &lists(4, &[1, 2, 3])).unwrap_err();
    assert_eq!(
        err,
        EngineError::AssignmentInvalid {
            vertex: 0,
            required: 4,
            size: 3
        }
    );
}

#[test]
fn type_one_corpus_is_certified() {
    let text = std::fs::read_to_string(format!(
        "{}/../../corpus/exceptional_type_i.json",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap();
    let (k, phi) = load_canvas(&text).unwrap();
    match extend(&k, &phi.unwrap()).unwrap() {
        Extension::Exception(cert) => assert_eq!(cert.kind, ExceptionKind::TypeI),
        other => panic!("expected a certificate, got {other:?}"),
    }
}

#[test]
fn broken_wheel_type_three() {
    let (g, _) = make_broken_wheel(4);
    let one = |c: u32| BTreeSet::from([c]);
    let k = Canvas::new(
        g.clone(),
        vec![one(1), one(2), one(3), [1, 2, 3].into()],
        Precoloured::Path(vec![0, 1, 2]),
        BTreeSet::new(),
    );
    let phi = phi_on(4, &[(0, 1), (1, 2), (2, 3)]);
    assert!(
        matches!(extend(&k, &phi).unwrap(), Extension::Exception(c) if c.kind == ExceptionKind::TypeIII)
    );

    let k = Canvas::new(
        g,
        lists(4, &[1, 2, 3]),
        Precoloured::Path(vec![0, 1, 2]),
        BTreeSet::new(),
    );
    let phi = phi_on(4, &[(0, 1), (1, 2), (2, 1)]);
    match extend(&k, &phi).unwrap() {
        Extension::Coloured(c) => assert_eq!(c.get(3), Some(3)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn improper_or_unacceptable_inputs() {
    let g = cycle(6);
    let k = Canvas::new(
        g.clone(),
        lists(6, &[1, 2, 3]),
        Precoloured::Path(vec![0, 1]),
        BTreeSet::new(),
    );
    let bad = phi_on(6, &[(0, 2), (1, 2)]);
    assert!(matches!(extend(&k, &bad), Err(EngineError::PhiImproper(_))));
    let outside = phi_on(6, &[(0, 7), (1, 2)]);
    assert!(matches!(
        extend(&k, &outside),
        Err(EngineError::PhiImproper(_))
    ));
    let long = Canvas::new(
        g,
        lists(6, &[1, 2, 3]),
        Precoloured::Path(vec![0, 1, 2, 3, 4]),
        BTreeSet::new(),
    );
    let phi = phi_on(6, &[(0, 1), (1, 2), (2, 1), (3, 2), (4, 1)]);
    assert_eq!(extend(&long, &phi), Err(EngineError::UnacceptableS));
}

#[test]
fn acceptable_cycle_is_opened() {
    let g = cycle(5);
    let k = Canvas::new(
        g,
        lists(5, &[1, 2, 3]),
        Precoloured::Cycle(vec![0, 1, 2]),
        BTreeSet::new(),
    );
    assert!(k.validate().is_err(), "a 3-subpath of C5 is not a cycle");
    // K4 with its outer triangle as S
    let rot = vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]];
    let g = PlaneGraph::new(rot, Some((1, 2))).unwrap();
    let c = g.outer_boundary().vertices;
    assert_eq!(c.len(), 3);
    let mut l = lists(4, &[1, 2, 3, 4, 5]);
    for (&v, x) in c.iter().zip(1..) {
        l[v] = BTreeSet::from([x]);
    }
    let phi = phi_on(4, &c.iter().copied().zip(1..).collect::<Vec<_>>());
    let k = Canvas::new(g, l, Precoloured::Cycle(c), BTreeSet::new());
    match extend(&k, &phi).unwrap() {
        Extension::Coloured(c) => assert!(valid(&k, &c)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bowtie_splits_at_cut_vertex() {
    let rot = vec![
        vec![1, 2],
        vec![2, 0],
        vec![0, 1, 3, 4],
        vec![4, 2],
        vec![2, 3],
    ];
    let g = PlaneGraph::new(rot, Some((0, 1))).unwrap();
    let k = Canvas::new(
        g,
        lists(5, &[1, 2, 3]),
        Precoloured::Path(vec![0, 1]),
        BTreeSet::new(),
    );
    let r = Engine::strict(true)
        .reduce_once(&k, &phi_on(5, &[(0, 1), (1, 2)]))
        .unwrap();
    assert_eq!(r.tag, Tag::CutVertex);
    assert_eq!(r.subcanvases.len(), 2);
    assert!(r.subcanvases.iter().all(|s| s.graph.n() == 3));
}

#[test]
fn c4_with_chord_splits_at_chord() {
    let rot = vec![vec![1, 2, 3], vec![2, 0], vec![3, 0, 1], vec![0, 2]];
    let g = PlaneGraph::new(rot, Some((0, 1))).unwrap();
    let k = Canvas::new(
        g,
        lists(4, &[1, 2, 3]),
        Precoloured::Path(vec![0, 1]),
        BTreeSet::new(),
    );
    let r = Engine::strict(true)
        .reduce_once(&k, &phi_on(4, &[(0, 1), (1, 2)]))
        .unwrap();
    assert_eq!(r.tag, Tag::Chord);
}

#[test]
fn long_chordless_boundary_uses_a_deletable_path() {
    let g = cycle(8);
    let mut l = lists(8, &[1, 2, 3]);
    for (v, c) in [(0, 1), (1, 2), (2, 1)] {
        l[v] = BTreeSet::from([c]);
    }
    let k = Canvas::new(g, l, Precoloured::Path(vec![0, 1, 2]), BTreeSet::new());
    let phi = phi_on(8, &[(0, 1), (1, 2), (2, 1)]);
    let r = Engine::strict(true).reduce_once(&k, &phi).unwrap();
    assert_eq!(r.tag, Tag::DeletablePath);
    assert!(valid(&k, &r.colouring));
}

#[test]
fn strict_mode_reports_incomplete_instead_of_searching() {
    let g = cycle(5);
    let k = Canvas::new(
        g,
        lists(5, &[1, 2, 3]),
        Precoloured::Path(vec![]),
        BTreeSet::new(),
    );
    let mut e = Engine::strict(true);
    assert_eq!(e.fallback_backtrack(&k), Err(EngineError::EngineIncomplete));
    let mut e = Engine::strict(false);
    assert!(e.fallback_backtrack(&k).unwrap().is_some());
    assert_eq!(e.trace().fallbacks, 1);
}
