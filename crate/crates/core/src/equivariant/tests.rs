use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::fixtures::*;
use crate::pathalg::{ArrowId, Letter, Potential, Quiver, VertexId, Word};
use crate::surfacemap::{dual_quiver, genus, is_dimer, meets_each_term_once, validate_tiling, BraneTiling};

fn example() -> (Quiver, Potential, QuiverAutomorphism) {
    let q = genus2_quiver();
    let w = genus2_potential(&q);
    let f: AutomorphismFile = serde_json::from_str(GENUS2_AUTOMORPHISM_JSON).unwrap();
    let phi = QuiverAutomorphism::from_file(&q, &f).unwrap();
    (q, w, phi)
}

fn example_ctx() -> SemidirectQuiver {
    let (q, _, phi) = example();
    let c: ChoiceFile = serde_json::from_str(GENUS2_CHOICE_JSON).unwrap();
    build_orbit_quiver(&q, &phi, &OrbitChoice::from_file(&q, &c).unwrap()).unwrap()
}

fn tiling_and_phi() -> (BraneTiling, TilingAutomorphism) {
    let t = BraneTiling::parse(GENUS2_TILING_JSON).unwrap();
    let f: AutomorphismFile = serde_json::from_str(GENUS2_AUTOMORPHISM_JSON).unwrap();
    let phi = TilingAutomorphism::from_file(&t, &f).unwrap();
    (t, phi)
}

fn square_torus() -> (BraneTiling, TilingAutomorphism) {
    let t = BraneTiling::parse(SQUARE_TORUS_TILING_JSON).unwrap();
    let f: AutomorphismFile = serde_json::from_str(SQUARE_TORUS_HALF_TURN_JSON).unwrap();
    let phi = TilingAutomorphism::from_file(&t, &f).unwrap();
    (t, phi)
}

fn edges_of(names: &str) -> BTreeSet<usize> {
    names.bytes().map(|b| (b - b'a') as usize).collect()
}

/// All paths of exactly `len` forward letters.
fn paths(q: &Quiver, len: usize) -> Vec<Word> {
    let mut out: Vec<Word> = q.vertices().map(|v| q.constant(v)).collect();
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &out {
            for a in q.arrow_ids() {
                if q.arrow(a).src == w.tgt() {
                    let mut ls = vec![Letter::fwd(a)];
                    ls.extend_from_slice(w.letters());
                    next.push(q.word_at(&ls, w.src()).unwrap());
                }
            }
        }
        out = next;
    }
    out
}

#[test]
fn orbit_sizes_of_example_are_two() {
    let (q, _, phi) = example();
    let r = orbit_sizes(&q, &phi);
    assert_eq!(r.sizes, BTreeMap::from([(1, 2), (2, 2)]));
    assert!(r.all_full);
    let id = QuiverAutomorphism::identity(&q);
    assert_eq!(orbit_sizes(&q, &id).sizes, BTreeMap::from([(1, 1), (2, 1)]));
}

#[test]
fn orbit_sizes_flag_fixed_vertex() {
    let mut q = Quiver::with_vertices([1, 2, 3]);
    q.add_arrow_between("x", 1, 2, false).unwrap();
    q.add_arrow_between("y", 1, 3, false).unwrap();
    let phi = QuiverAutomorphism::new(&q, vec![0, 2, 1], vec![1, 0]).unwrap();
    let r = orbit_sizes(&q, &phi);
    assert_eq!(r.sizes[&1], 1);
    assert!(!r.all_full);
}

#[test]
fn tiling_automorphism_induces_the_quiver_one() {
    let (t, phi) = tiling_and_phi();
    let (q, _) = dual_quiver(&t).unwrap();
    let induced = phi.on_dual(&t, &q).unwrap();
    let (q2, _, direct) = example();
    assert_eq!(induced.to_file(&q), direct.to_file(&q2));
}

#[test]
fn automorphism_rejects_incompatible_maps() {
    let q = genus2_quiver();
    // a ↔ c moves a loop to a non-loop
    let mut ap: Vec<usize> = (0..10).collect();
    ap.swap(0, 2);
    assert!(matches!(QuiverAutomorphism::new(&q, vec![0, 1], ap), Err(EquivError::InvalidAutomorphism(_))));
    let (t, _) = square_torus();
    // swapping the two vertices is a map symmetry but swaps colours
    let swap: Vec<usize> = (0..8).map(|h| (h + 4) % 8).collect();
    assert!(matches!(TilingAutomorphism::new(&t, swap), Err(EquivError::InvalidAutomorphism(_))));
}

#[test]
fn orbit_quiver_of_example() {
    let ctx = example_ctx();
    let qp = &ctx.quiver;
    let names: Vec<&str> = qp.arrows().iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["a", "b", "c", "d", "e", "r"]);
    let r = qp.arrow(qp.arrow_id("r").unwrap());
    assert!(r.localized);
    assert_eq!((qp.label(r.src), qp.label(r.tgt)), (2, 1));
    assert_eq!(ctx.iso_arrows().count(), 1);
}

#[test]
fn identity_gives_back_the_quiver() {
    let (q, w, _) = example();
    let id = QuiverAutomorphism::identity(&q);
    let ctx = build_orbit_quiver(&q, &id, &OrbitChoice::canonical(&q, &id)).unwrap();
    assert_eq!(ctx.quiver.arrow_count(), q.arrow_count());
    for p in paths(&q, 3) {
        assert_eq!(xi_embed(&ctx, &p).unwrap(), p);
    }
    let tr = transport_potential(&ctx, &w).unwrap();
    assert_eq!(tr.potential, w);
    assert_eq!(tr.homogeneous_degree, Some(0));
}

#[test]
fn bad_choices_are_rejected() {
    let (q, _, phi) = example();
    let two_in_orbit = OrbitChoice {
        generators: ["a", "j", "b", "c", "d", "e"].iter().map(|n| q.arrow_id(n).unwrap()).collect(),
        iso_bases: vec![VertexId(1)],
        iso_names: None,
    };
    assert!(matches!(build_orbit_quiver(&q, &phi, &two_in_orbit), Err(EquivError::BadChoice(_))));
    let mut q3 = Quiver::with_vertices([1, 2, 3]);
    q3.add_arrow_between("x", 1, 2, false).unwrap();
    q3.add_arrow_between("y", 1, 3, false).unwrap();
    let phi3 = QuiverAutomorphism::new(&q3, vec![0, 2, 1], vec![1, 0]).unwrap();
    let c = OrbitChoice::canonical(&q3, &phi3);
    assert!(matches!(build_orbit_quiver(&q3, &phi3, &c), Err(EquivError::OrbitSizeViolation(_))));
}

#[test]
fn xi_on_every_arrow() {
    let ctx = example_ctx();
    for (a, img) in GENUS2_XI {
        let p = ctx.original.parse_word(a).unwrap();
        assert_eq!(xi_embed(&ctx, &p).unwrap(), ctx.quiver.parse_word(img).unwrap(), "ξ({a})");
    }
}

#[test]
fn degrees_of_words() {
    let ctx = example_ctx();
    let deg = |s: &str| word_degree(&ctx, &ctx.quiver.parse_word(s).unwrap());
    assert_eq!(deg("rer"), 2);
    assert_eq!(deg("r^-1 ar"), 0);
    assert_eq!(word_degree(&ctx, &ctx.quiver.constant(VertexId(0))), 0);
}

#[test]
fn factoring_examples() {
    let ctx = example_ctx();
    let qp = &ctx.quiver;
    let (iso, p) = factor_word(&ctx, &qp.parse_word("rer").unwrap()).unwrap();
    assert!(iso.is_constant());
    assert_eq!(p, ctx.original.parse_word("f").unwrap());
    let (iso, p) = factor_word(&ctx, &qp.parse_word("r").unwrap()).unwrap();
    assert_eq!(iso, qp.parse_word("r").unwrap());
    assert!(p.is_constant());
    let (iso, p) = factor_word(&ctx, &qp.parse_word("rc").unwrap()).unwrap();
    assert_eq!(iso, qp.parse_word("r").unwrap());
    assert_eq!(p, ctx.original.parse_word("c").unwrap());
}

#[test]
fn transport_of_example() {
    let ctx = example_ctx();
    let (_, w, _) = example();
    let tr = transport_potential(&ctx, &w).unwrap();
    let qp = genus2_orbit_quiver(false);
    assert_eq!(tr.potential.fmt(&ctx.quiver), genus2_transported(&qp).fmt(&qp));
    assert_eq!(tr.potential, genus2_transported(&qp));
    assert!(tr.is_homogeneous_of_order(2));
}

#[test]
fn mixed_sources_trip_the_inverse_check() {
    let (q, w, phi) = example();
    let choice = OrbitChoice {
        generators: ["j", "b", "c", "d", "e"].iter().map(|n| q.arrow_id(n).unwrap()).collect(),
        iso_bases: vec![VertexId(0)],
        iso_names: None,
    };
    let ctx = build_orbit_quiver(&q, &phi, &choice).unwrap();
    assert_eq!(transport_potential(&ctx, &w).unwrap_err(), EquivError::MixedInverseViolation("r".into()));
}

#[test]
fn transport_identity_holds_for_each_generator() {
    let ctx = example_ctx();
    let (q, w, _) = example();
    let wp = transport_potential(&ctx, &w).unwrap().potential;
    for g in ["a", "b", "c", "d", "e"] {
        let chk = verify_transport_identity(&ctx, &w, &wp, q.arrow_id(g).unwrap()).unwrap();
        assert!(chk.pass, "{g}: {:?}", chk.witness);
    }
    let c = verify_transport_identity(&ctx, &w, &wp, q.arrow_id("c").unwrap()).unwrap();
    let expect = ctx.quiver.fmt_element(&{
        let mut e = crate::pathalg::Element::zero();
        e.add_term(ctx.quiver.parse_word("crdr").unwrap(), crate::pathalg::coeff(2));
        e.add_term(ctx.quiver.parse_word("cardbr").unwrap(), crate::pathalg::coeff(-2));
        e
    });
    assert_eq!(c.lhs, expect);
}

#[test]
fn transport_identity_fails_with_a_term_missing() {
    let ctx = example_ctx();
    let (q, w, _) = example();
    let wp = transport_potential(&ctx, &w).unwrap().potential;
    let (first, _) = wp.iter().next().unwrap();
    let broken = wp.without(&first.clone());
    let chk = verify_transport_identity(&ctx, &w, &broken, q.arrow_id("a").unwrap()).unwrap();
    assert!(!chk.pass);
    assert!(chk.witness.is_some());
}

#[test]
fn choice_search_finds_the_example_choice() {
    let (t, phi) = tiling_and_phi();
    let cert = choose_homogeneous_xi(&t, &phi, &edges_of("fgh")).unwrap();
    let file = cert.choice.to_file(&cert.quiver);
    assert_eq!(file.generators, ["a", "b", "c", "d", "e"]);
    assert_eq!(file.iso_bases, [2]);
    for (a, d) in [("f", 2), ("g", 2), ("h", 2), ("i", 0), ("j", 0), ("a", 0)] {
        assert_eq!(cert.degrees[a], d, "{a}");
    }
    assert!(cert.transported.is_homogeneous_of_order(2));
}

#[test]
fn choice_search_reports_failure() {
    let (t, phi) = tiling_and_phi();
    assert!(is_dimer(&t, &edges_of("fcd")));
    assert!(matches!(choose_homogeneous_xi(&t, &phi, &edges_of("fcd")), Err(EquivError::NoChoiceFound(_))));
    assert!(is_dimer(&t, &edges_of("ecd")));
    assert!(choose_homogeneous_xi(&t, &phi, &edges_of("ecd")).is_ok());
}

#[test]
fn choice_search_with_identity() {
    let t = BraneTiling::parse(TORUS3_TILING_JSON).unwrap();
    let id = TilingAutomorphism::identity(&t);
    let cert = choose_homogeneous_xi(&t, &id, &BTreeSet::from([0])).unwrap();
    assert_eq!(cert.context.iso_arrows().count(), 0);
    assert_eq!(cert.transported.homogeneous_degree, Some(0));
}

#[test]
fn refine_leaves_free_tilings_alone() {
    let (t, phi) = tiling_and_phi();
    let (t2, phi2) = refine_tiling(&t, &phi).unwrap();
    assert_eq!(t2, t);
    assert_eq!(phi2, phi);
}

#[test]
fn refine_square_torus() {
    let (t, phi) = square_torus();
    let (q, _) = dual_quiver(&t).unwrap();
    assert!(!orbit_sizes(&q, &phi.on_dual(&t, &q).unwrap()).all_full);
    let (t2, phi2) = refine_tiling(&t, &phi).unwrap();
    assert!(validate_tiling(&t2).valid, "{:?}", validate_tiling(&t2).violations);
    assert_eq!(genus(&t2.map).unwrap(), 1);
    assert!(t2.vertex_count() > t.vertex_count());
    let (q2, _) = dual_quiver(&t2).unwrap();
    let r = orbit_sizes(&q2, &phi2.on_dual(&t2, &q2).unwrap());
    assert!(r.all_full, "{:?}", r.sizes);
    assert_eq!(phi2.order(), 2);
    for h in 0..t.map.half_edge_count() {
        assert_eq!(phi2.apply(h), phi.apply(h));
    }
}

#[test]
fn dimer_needs_refinement_first() {
    let (t, phi) = square_torus();
    assert!(matches!(equivariant_dimer(&t, &phi), Err(EquivError::OrbitSizeViolation(_))));
}

#[test]
fn dimer_of_example() {
    let (t, phi) = tiling_and_phi();
    let out = equivariant_dimer(&t, &phi).unwrap();
    assert_eq!((out.added_vertices, out.added_edges), (0, 0));
    assert!(is_dimer(&out.tiling, &out.dimer));
    let (_, w) = dual_quiver(&out.tiling).unwrap();
    let arrows = out.dimer.iter().map(|&e| ArrowId(e as u32)).collect();
    assert!(meets_each_term_once(&w, &arrows));
    assert!(all_dimers(&t, 1000).contains(&edges_of("fgh")));
}

#[test]
fn dimer_of_three_edge_torus() {
    let t = BraneTiling::parse(TORUS3_TILING_JSON).unwrap();
    let out = equivariant_dimer(&t, &TilingAutomorphism::identity(&t)).unwrap();
    assert_eq!(out.dimer.len(), 1);
    assert_eq!(all_dimers(&t, 10).len(), 3);
}

#[test]
fn dimer_after_refinement_is_equivariantly_extended() {
    let (t, phi) = square_torus();
    let (t2, phi2) = refine_tiling(&t, &phi).unwrap();
    let out = equivariant_dimer(&t2, &phi2).unwrap();
    assert!(is_dimer(&out.tiling, &out.dimer));
    assert!(validate_tiling(&out.tiling).valid);
    assert_eq!(out.added_vertices % 2, 0);
    assert_eq!(out.added_edges % 2, 0);
    let (q, _) = dual_quiver(&out.tiling).unwrap();
    assert!(orbit_sizes(&q, &out.phi.on_dual(&out.tiling, &q).unwrap()).all_full);
}

#[test]
fn dimer_adds_edges_when_matching_dead_ends() {
    // star: w1 meets b1, b2, b3; w2 and w3 hang off b1
    let text = r#"{"half_edges":[0,1,2,3,4,5,6,7,8,9],
        "involution":[[0,1],[2,3],[4,5],[6,7],[8,9]],
        "rotation":[[0,6,8],[2],[4],[1,3,5],[7],[9]],
        "coloring":["b","b","b","w","w","w"]}"#;
    let t = BraneTiling::parse(text).unwrap();
    assert!(validate_tiling(&t).valid, "{:?}", validate_tiling(&t).violations);
    assert!(all_dimers(&t, 10).is_empty());
    let out = equivariant_dimer(&t, &TilingAutomorphism::identity(&t)).unwrap();
    assert!(out.added_edges >= 1);
    assert_eq!(out.added_vertices, 0);
    assert!(is_dimer(&out.tiling, &out.dimer));
    assert_eq!(genus(&out.tiling.map).unwrap(), 0);
}

#[test]
fn unbalanced_colours_need_a_multiple_of_the_order() {
    // path b1 – w – b2 on the sphere; the half-turn about w swaps b1 and b2
    let text = r#"{"half_edges":[0,1,2,3],"involution":[[0,1],[2,3]],
        "rotation":[[0],[1,3],[2]],"coloring":["b","w","b"]}"#;
    let t = BraneTiling::parse(text).unwrap();
    let phi = TilingAutomorphism::new(&t, vec![2, 3, 0, 1]).unwrap();
    assert_eq!(phi.order(), 2);
    assert_eq!(equivariant_dimer(&t, &phi).unwrap_err(), EquivError::Unbalanceable(1));
}

#[test]
fn iso_words_are_unique_and_closed_ones_trivial() {
    let mut q = Quiver::with_vertices([1, 2, 3]);
    for (n, s, t) in [("x", 1, 2), ("y", 2, 3), ("z", 3, 1)] {
        q.add_arrow_between(n, s, t, false).unwrap();
    }
    let phi = QuiverAutomorphism::new(&q, vec![1, 2, 0], vec![1, 2, 0]).unwrap();
    let ctx = build_orbit_quiver(&q, &phi, &OrbitChoice::canonical(&q, &phi)).unwrap();
    assert_eq!(ctx.iso_arrows().count(), 2);
    for x in q.vertices() {
        for y in q.vertices() {
            let there = ctx.iso_path(x, y).unwrap();
            let back = ctx.iso_path(y, x).unwrap();
            assert!(back.concat(&there).unwrap().is_constant());
            assert_eq!(there.inverse(), back);
        }
    }
}

#[test]
fn degrees_lie_in_the_trichotomy_for_every_choice() {
    let (q, _, phi) = example();
    let names = ["a", "b", "c", "d", "e"];
    for mask in 0..32u32 {
        let gens: Vec<ArrowId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let a = q.arrow_id(n).unwrap();
                if mask >> i & 1 == 1 {
                    phi.arrow(a)
                } else {
                    a
                }
            })
            .collect();
        for base in [0, 1] {
            let c = OrbitChoice { generators: gens.clone(), iso_bases: vec![VertexId(base)], iso_names: None };
            let ctx = build_orbit_quiver(&q, &phi, &c).unwrap();
            for a in q.arrow_ids() {
                let d = word_degree(&ctx, &xi_embed(&ctx, &q.word(&[Letter::fwd(a)]).unwrap()).unwrap());
                assert!([0, 2, -2].contains(&d), "deg ξ({}) = {d}", q.arrow(a).name);
            }
        }
    }
}

#[test]
fn xi_is_injective_on_short_paths() {
    let ctx = example_ctx();
    let mut seen = BTreeMap::new();
    for len in 0..=5 {
        for p in paths(&ctx.original, len) {
            let img = xi_embed(&ctx, &p).unwrap();
            if let Some(prev) = seen.insert(img, p.clone()) {
                panic!("{} and {} collide", ctx.original.fmt_word(&prev), ctx.original.fmt_word(&p));
            }
        }
    }
}

#[test]
fn factor_inverts_xi_on_short_paths() {
    let ctx = example_ctx();
    for len in 0..=4 {
        for p in paths(&ctx.original, len) {
            let (iso, back) = factor_word(&ctx, &xi_embed(&ctx, &p).unwrap()).unwrap();
            assert!(iso.is_constant());
            assert_eq!(back, p);
        }
    }
}

fn random_path(q: &Quiver, start: u32, choices: &[usize]) -> Word {
    let mut w = q.constant(VertexId(start));
    for &c in choices {
        let out: Vec<ArrowId> = q.arrow_ids().filter(|&a| q.arrow(a).src == w.tgt()).collect();
        let a = out[c % out.len()];
        w = q.word(&[Letter::fwd(a)]).unwrap().concat(&w).unwrap();
    }
    w
}

proptest! {
    #[test]
    fn xi_is_multiplicative(s in 0u32..2, xs in prop::collection::vec(0usize..5, 0..6), ys in prop::collection::vec(0usize..5, 0..6)) {
        let ctx = example_ctx();
        let q = &ctx.original;
        let p1 = random_path(q, s, &xs);
        let p2 = random_path(q, p1.tgt().0, &ys);
        let joint = p2.concat(&p1).unwrap();
        let lhs = xi_embed(&ctx, &joint).unwrap();
        let rhs = xi_embed(&ctx, &p2).unwrap().concat(&xi_embed(&ctx, &p1).unwrap()).unwrap().normalized();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn iso_prefix_factors_back(s in 0u32..2, xs in prop::collection::vec(0usize..5, 0..6), t in 0u32..2) {
        let ctx = example_ctx();
        let p = random_path(&ctx.original, s, &xs);
        let iso = ctx.iso_path(p.tgt(), VertexId(t)).unwrap();
        let w = iso.concat(&xi_embed(&ctx, &p).unwrap()).unwrap().normalized();
        let (q2, p2) = factor_word(&ctx, &w).unwrap();
        prop_assert_eq!(q2, iso);
        prop_assert_eq!(p2, p);
    }
}
