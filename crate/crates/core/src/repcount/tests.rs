use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;
use crate::equivariant::{build_orbit_quiver, transport_potential, ChoiceFile, OrbitChoice, QuiverAutomorphism};
use crate::fixtures::*;
use crate::pathalg::{coeff, CyclicWord};

/// Orbit quiver with `a..e` inverted and `r` free, with its transported potential.
fn b_algebra() -> (Quiver, Potential) {
    let q = genus2_quiver();
    let w = genus2_potential(&q);
    let phi = QuiverAutomorphism::from_file(&q, &serde_json::from_str(GENUS2_AUTOMORPHISM_JSON).unwrap()).unwrap();
    let cf: ChoiceFile = serde_json::from_str(GENUS2_CHOICE_JSON).unwrap();
    let ctx = build_orbit_quiver(&q, &phi, &OrbitChoice::from_file(&q, &cf).unwrap()).unwrap();
    let wp = transport_potential(&ctx, &w).unwrap().potential;
    (localized_generator_quiver(&ctx), wp)
}

fn omega(q: &Quiver) -> Element {
    let mut x = Element::zero();
    for (c, s) in GENUS2_OMEGA_TERMS {
        x.add_term(q.parse_word(s).unwrap(), coeff(c));
    }
    x
}

/// Values in arrow order a, b, c, d, e, r.
fn scalars(q: &Quiver, p: u64, v: [u64; 6]) -> MatrixRep {
    MatrixRep::scalars(q, p, &v).unwrap()
}

/// Scalar brute force written against the printed transported potential.
fn scalar_oracle(p: u64) -> BTreeMap<&'static str, u64> {
    let names = ['a', 'b', 'c', 'd', 'e', 'r'];
    let idx = |ch: char| names.iter().position(|&n| n == ch).unwrap();
    // commutative value of W′, or its partial in `x` (drop one occurrence, times multiplicity)
    let eval = |v: &[i64; 6], x: Option<char>| -> i64 {
        GENUS2_TRANSPORTED_TERMS
            .iter()
            .map(|(c, t)| match x {
                None => t.chars().fold(*c, |m, ch| m * v[idx(ch)]),
                Some(x) => {
                    let k = t.chars().filter(|&ch| ch == x).count() as i64;
                    let mut rest: Vec<char> = t.chars().collect();
                    match rest.iter().position(|&ch| ch == x) {
                        None => 0,
                        Some(pos) => {
                            rest.remove(pos);
                            rest.iter().fold(c * k, |m, &ch| m * v[idx(ch)])
                        }
                    }
                }
            })
            .sum::<i64>()
            .rem_euclid(p as i64)
    };
    let mut out = BTreeMap::new();
    let units: Vec<i64> = (1..p as i64).collect();
    for a in &units {
        for b in &units {
            for c in &units {
                for d in &units {
                    for e in &units {
                        for r in 0..p as i64 {
                            let v = [*a, *b, *c, *d, *e, r];
                            let f = eval(&v, None);
                            let crit = names.iter().all(|&x| eval(&v, Some(x)) == 0);
                            let om = (r * r * e * e).rem_euclid(p as i64);
                            *out.entry("total").or_insert(0) += 1;
                            *out.entry("zero").or_insert(0) += (f == 0) as u64;
                            *out.entry("one").or_insert(0) += (f == 1) as u64;
                            *out.entry("crit").or_insert(0) += crit as u64;
                            *out.entry("nilpotent").or_insert(0) += (om == 0) as u64;
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn field_helpers() {
    assert!(is_prime(2) && is_prime(5) && !is_prime(1) && !is_prime(9));
    assert_eq!(inv_mod(3, 7), Some(5));
    assert_eq!(coeff_mod(&crate::pathalg::parse_coeff("-1/2").unwrap(), 5).unwrap(), 2);
    assert!(matches!(coeff_mod(&crate::pathalg::parse_coeff("1/5").unwrap(), 5), Err(RepError::CoeffNotInvertible(_))));
}

#[test]
fn trace_examples() {
    let (q, wp) = b_algebra();
    assert_eq!(trace_potential(&scalars(&q, 2, [1; 6]), &wp).unwrap(), 0);
    assert_eq!(trace_potential(&scalars(&q, 3, [1; 6]), &wp).unwrap(), 0);
    assert_eq!(trace_potential(&scalars(&q, 3, [1; 6]), &Potential::zero()).unwrap(), 0);
    // 1·2²·... : a=2 gives 4 + 2 − 4 − 1 = 1 over F_5
    assert_eq!(trace_potential(&scalars(&q, 5, [2, 1, 1, 1, 1, 1]), &wp).unwrap(), 1);
}

#[test]
fn crit_examples() {
    let (q, wp) = b_algebra();
    assert!(crit_check(&scalars(&q, 3, [1, 2, 1, 2, 2, 0]), &q, &wp).unwrap());
    assert!(crit_check(&scalars(&q, 2, [1; 6]), &q, &wp).unwrap());
    // ∂W′/∂c = 2rdr − 2ardbr = 2 − 4 ≠ 0 over F_5
    let planted = scalars(&q, 5, [2, 1, 1, 1, 1, 1]);
    assert!(!crit_check(&planted, &q, &wp).unwrap());
    let (grad, matches) = gradient_check(&planted, &q, &wp).unwrap();
    assert!(!grad && matches);
}

#[test]
fn localized_arrows_need_invertible_matrices() {
    let (q, _) = b_algebra();
    assert_eq!(MatrixRep::scalars(&q, 3, &[0, 1, 1, 1, 1, 1]).unwrap_err(), RepError::NotInvertible("a".into()));
    assert!(MatrixRep::scalars(&q, 3, &[1, 1, 1, 1, 1, 0]).is_ok());
    assert_eq!(MatrixRep::scalars(&q, 4, &[1; 6]).unwrap_err(), RepError::NotPrime(4));
}

#[test]
fn counts_over_f2() {
    let (q, wp) = b_algebra();
    let r = enumerate_reps(&q, &wp, 1, 2, &CountOptions::default()).unwrap();
    assert_eq!((r.total, r.zero, r.one), (2, 2, 0));
}

#[test]
fn counts_over_f3_match_the_oracle() {
    let (q, wp) = b_algebra();
    let r = enumerate_reps(&q, &wp, 1, 3, &CountOptions { verify: true, ..Default::default() }).unwrap();
    let o = GENUS2_D1_Q3;
    assert_eq!(
        (r.total, r.zero, r.one, r.crit, r.crit_zero, r.crit_one),
        (o.total, o.zero, o.one, o.crit, o.crit_zero, o.crit_one)
    );
    assert_eq!(r.histogram.values().sum::<u64>(), r.total);
    let brute = scalar_oracle(3);
    assert_eq!((brute["total"], brute["zero"], brute["one"], brute["crit"]), (o.total, o.zero, o.one, o.crit));
    assert_eq!(brute["nilpotent"], o.nilpotent);
}

#[test]
fn three_checks_agree_in_dimension_one() {
    let (q, wp) = b_algebra();
    for p in [2, 3, 5] {
        let r = enumerate_reps(&q, &wp, 1, p, &CountOptions { verify: true, ..Default::default() }).unwrap();
        assert_eq!(r.disagreements, Some(0), "q = {p}");
        assert_eq!(r.gradient_mismatches, Some(0), "q = {p}");
        assert_eq!(r.crit, scalar_oracle(p)["crit"], "q = {p}");
    }
}

#[test]
fn one_loop_without_potential() {
    let mut q = Quiver::with_vertices([1]);
    q.add_arrow_between("a", 1, 1, false).unwrap();
    for p in [2, 3, 7] {
        let r = enumerate_reps(&q, &Potential::zero(), 1, p, &CountOptions::default()).unwrap();
        assert_eq!((r.total, r.zero, r.crit), (p, p, p));
    }
}

#[test]
fn exhaustive_guard() {
    let (q, wp) = b_algebra();
    let opts = CountOptions { limit: 10, ..Default::default() };
    assert!(matches!(enumerate_reps(&q, &wp, 1, 3, &opts), Err(RepError::StateSpaceTooLarge { points: 96, .. })));
}

#[test]
fn strata_examples() {
    let (q, wp) = b_algebra();
    let om = omega(&q);
    let s3 = stratify_by_omega(&q, &wp, &om, 1, 3, &CountOptions::default()).unwrap();
    assert_eq!((s3.nilpotent, s3.invertible, s3.mixed), (GENUS2_D1_Q3.nilpotent, GENUS2_D1_Q3.invertible, 0));
    // in dimension one the element acts by diag(r²e², e²r²), invertible exactly when r ≠ 0
    let s2 = stratify_by_omega(&q, &wp, &om, 1, 2, &CountOptions::default()).unwrap();
    assert_eq!((s2.nilpotent, s2.invertible), (1, 1));
    let mut unit = Element::zero();
    for v in q.vertices() {
        unit.add_term(q.constant(v), coeff(1));
    }
    let su = stratify_by_omega(&q, &wp, &unit, 1, 3, &CountOptions::default()).unwrap();
    assert_eq!(su.invertible, su.total);
}

#[test]
fn probe_values() {
    let (q, wp) = b_algebra();
    let om = omega(&q);
    assert!(matches!(conjecture_probe_d1(&q, &wp, &om, 2), Err(RepError::Refused(_))));
    let r = conjecture_probe_d1(&q, &wp, &om, 3).unwrap();
    assert_eq!(r.ambient.total_weight, 64 - 16);
    assert_eq!(r.ambient.nilpotent_weight, 32);
    assert_eq!(r.ambient.invertible_weight, 32 - 16);
    assert_eq!(r.ambient.scaled_nilpotent, 96);
    assert_eq!((r.critical.total_weight, r.critical.nilpotent_weight, r.critical.invertible_weight), (48, 32, 16));

    let mut q1 = Quiver::with_vertices([1]);
    let a = q1.add_arrow_between("a", 1, 1, false).unwrap();
    let loop_a = Element::from_word(q1.word(&[Letter::fwd(a)]).unwrap());
    let r = conjecture_probe_d1(&q1, &Potential::zero(), &loop_a, 5).unwrap();
    assert_eq!(r.ambient.total_weight, r.ambient.scaled_nilpotent);
}

#[test]
fn sampling_is_deterministic_and_close() {
    let (q, wp) = b_algebra();
    let exact = enumerate_reps(&q, &wp, 1, 5, &CountOptions::default()).unwrap();
    let opts = CountOptions { mode: Mode::Sample { samples: 20_000, seed: 11 }, ..Default::default() };
    let s1 = enumerate_reps(&q, &wp, 1, 5, &opts).unwrap();
    let s2 = enumerate_reps(&q, &wp, 1, 5, &opts).unwrap();
    assert_eq!(s1, s2);
    assert_eq!(s1.total, 20_000);
    for (hit, all) in [(s1.zero, exact.zero), (s1.crit, exact.crit), (s1.one, exact.one)] {
        let pr = all as f64 / exact.total as f64;
        let n = s1.total as f64;
        let sigma = (n * pr * (1.0 - pr)).sqrt();
        assert!((hit as f64 - n * pr).abs() <= 5.0 * sigma, "{hit} vs {}", n * pr);
    }
}

#[test]
fn counts_ignore_arrow_order() {
    let (q, wp) = b_algebra();
    let mut q2 = Quiver::with_vertices(q.vertices().map(|v| q.label(v)));
    let order: Vec<ArrowId> = {
        let mut v: Vec<ArrowId> = q.arrow_ids().collect();
        v.reverse();
        v
    };
    let mut new_id = BTreeMap::new();
    for &a in &order {
        let x = q.arrow(a);
        new_id.insert(a, q2.add_arrow(&x.name, x.src, x.tgt, x.localized).unwrap());
    }
    let mut w2 = Potential::zero();
    for (cw, c) in wp.iter() {
        let ls: Vec<Letter> =
            cw.letters().iter().map(|l| Letter { arrow: new_id[&l.arrow], inverse: l.inverse }).collect();
        w2.add_cyclic(CyclicWord::canonical(&ls), c.clone());
    }
    let r1 = enumerate_reps(&q, &wp, 1, 3, &CountOptions::default()).unwrap();
    let r2 = enumerate_reps(&q2, &w2, 1, 3, &CountOptions::default()).unwrap();
    assert_eq!(r1, r2);
}

#[test]
fn trace_polynomial_matches_direct_evaluation() {
    let (q, wp) = b_algebra();
    let poly = TracePolynomial::new(&q, &wp, 2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let mats = q.arrows().iter().map(|a| random_mat(&mut rng, 2, 3, a.localized)).collect();
        let rep = MatrixRep::new(&q, 2, 3, mats).unwrap();
        assert_eq!(poly.value(&rep), trace_potential(&rep, &wp).unwrap());
        let (grad, matches) = gradient_check(&rep, &q, &wp).unwrap();
        assert!(matches);
        assert_eq!(poly.is_critical(&rep), grad);
        assert_eq!(grad, crit_check(&rep, &q, &wp).unwrap());
    }
}

proptest! {
    #[test]
    fn inverse_is_two_sided(entries in prop::collection::vec(0u64..5, 9)) {
        let m = Mat { d: 3, a: entries };
        match m.inverse(5) {
            Some(inv) => {
                prop_assert_eq!(m.mul(&inv, 5), Mat::identity(3));
                prop_assert_eq!(inv.mul(&m, 5), Mat::identity(3));
                prop_assert!(m.det(5) != 0);
            }
            None => prop_assert_eq!(m.det(5), 0),
        }
    }

    #[test]
    fn det_is_multiplicative(x in prop::collection::vec(0u64..7, 4), y in prop::collection::vec(0u64..7, 4)) {
        let (a, b) = (Mat { d: 2, a: x }, Mat { d: 2, a: y });
        prop_assert_eq!(a.mul(&b, 7).det(7), a.det(7) * b.det(7) % 7);
    }
}
