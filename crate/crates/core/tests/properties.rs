//! Property tests for the structural invariants: lattice laws of the
//! evaluator, the relational axioms of index models, closure under the
//! constructors, and round trips of the text formats.

use proptest::prelude::*;

use treeba_core::algebra::{realize, CanonicalAlgebra};
use treeba_core::chains::indiscernible_check;
use treeba_core::index_model::{
    canonical_form, format_model, full_tree, parse_model, sum, ArityProfile, BranchPolicy,
    IndexModel, IndexNode, Level,
};
use treeba_core::suites::close_up;
use treeba_core::term::{parse_term, GeneratorId, Presentation, Term};

fn arb_term(n_gens: usize, depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Zero),
        Just(Term::One),
        (0..n_gens).prop_map(|i| Term::Gen(GeneratorId::Named(format!("f{}", i)))),
    ];
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::meet(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::join(a, b)),
            inner.prop_map(Term::not),
        ]
    })
}

fn shared_free_algebra() -> &'static CanonicalAlgebra {
    use std::sync::OnceLock;
    static ALG: OnceLock<CanonicalAlgebra> = OnceLock::new();
    ALG.get_or_init(|| realize(&Presentation::free(3)).expect("free algebra"))
}

proptest! {
    #[test]
    fn evaluator_satisfies_lattice_laws(s in arb_term(3, 3), t in arb_term(3, 3), u in arb_term(3, 3)) {
        let alg = shared_free_algebra();
        let ev = |t: &Term| alg.eval(t).expect("own generators");
        // De Morgan.
        prop_assert_eq!(
            ev(&Term::not(Term::meet(s.clone(), t.clone()))),
            ev(&Term::join(Term::not(s.clone()), Term::not(t.clone())))
        );
        prop_assert_eq!(
            ev(&Term::not(Term::join(s.clone(), t.clone()))),
            ev(&Term::meet(Term::not(s.clone()), Term::not(t.clone())))
        );
        // Distributivity and absorption.
        prop_assert_eq!(
            ev(&Term::meet(s.clone(), Term::join(t.clone(), u.clone()))),
            ev(&Term::join(Term::meet(s.clone(), t.clone()), Term::meet(s.clone(), u.clone())))
        );
        prop_assert_eq!(ev(&Term::join(s.clone(), Term::meet(s.clone(), t.clone()))), ev(&s));
        // Complement laws.
        prop_assert!(ev(&Term::meet(s.clone(), Term::not(s.clone()))).is_empty());
        prop_assert_eq!(ev(&Term::join(s.clone(), Term::not(s.clone()))), alg.one());
        // Double negation.
        prop_assert_eq!(ev(&Term::not(Term::not(s.clone()))), ev(&s));
    }

    #[test]
    fn term_text_roundtrip(t in arb_term(3, 4)) {
        let text = t.to_string();
        prop_assert_eq!(parse_term(&text).expect("own output parses"), t);
    }
}

/// A random small model: a profile, a universe bound, and a subset of
/// the full tree closed up under restriction.
fn arb_model() -> impl Strategy<Value = IndexModel> {
    (0usize..5, proptest::collection::vec(any::<bool>(), 32)).prop_map(|(which, keep)| {
        let (profile, j): (ArityProfile, u32) = match which {
            0 => (ArityProfile::tr(1), 2),
            1 => (ArityProfile::tr(2), 2),
            2 => (ArityProfile::ptr(1), 3),
            3 => (ArityProfile::ptr(2), 2),
            _ => (ArityProfile::new(vec![3]).unwrap(), 3),
        };
        let full = full_tree(&profile, j, BranchPolicy::All).expect("legal universe");
        let seeds: Vec<IndexNode> = full
            .nodes()
            .iter()
            .filter(|n| !n.is_root())
            .enumerate()
            .filter(|(i, _)| keep[i % keep.len()])
            .map(|(_, n)| n.clone())
            .collect();
        close_up(&profile, j, seeds).expect("closure of legal nodes")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restriction_images_stay_inside(model in arb_model()) {
        for node in model.nodes() {
            for img in model.res_images(node) {
                prop_assert!(model.contains(&img));
            }
            // Totality: far levels return the node itself.
            prop_assert_eq!(model.res(node, 9, 0), node.clone());
        }
    }

    #[test]
    fn prefix_equivalence_is_an_equivalence(model in arb_model()) {
        let nodes = model.nodes();
        for i in 0..=model.profile().depth() {
            let at_or_above: Vec<&IndexNode> =
                nodes.iter().filter(|n| n.entry_len() >= i).collect();
            for a in &at_or_above {
                prop_assert!(model.eq_level(i, a, a));
                for b in &at_or_above {
                    prop_assert_eq!(model.eq_level(i, a, b), model.eq_level(i, b, a));
                    for c in &at_or_above {
                        if model.eq_level(i, a, b) && model.eq_level(i, b, c) {
                            prop_assert!(model.eq_level(i, a, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sibling_order_is_strict_and_total(model in arb_model()) {
        for lvl in 1..=model.profile().depth() {
            let mut by_prefix: std::collections::BTreeMap<Vec<u8>, Vec<&IndexNode>> =
                Default::default();
            for n in model.nodes() {
                if n.level() == Level::Finite(lvl) {
                    let key = format!("{:?}", (0..lvl - 1).map(|k| n.entry(k)).collect::<Vec<_>>())
                        .into_bytes();
                    by_prefix.entry(key).or_default().push(n);
                }
            }
            for siblings in by_prefix.values() {
                for a in siblings {
                    prop_assert!(!model.lt1(a, a));
                    for b in siblings {
                        if a != b {
                            prop_assert!(model.lt1(a, b) ^ model.lt1(b, a));
                        }
                        for c in siblings {
                            if model.lt1(a, b) && model.lt1(b, c) {
                                prop_assert!(model.lt1(a, c));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn model_text_roundtrip(model in arb_model()) {
        let text = format_model(&model);
        prop_assert_eq!(parse_model(&text).expect("own output parses"), model);
    }

    #[test]
    fn sums_associate_up_to_relabelling(a in arb_model(), b in arb_model()) {
        // Only sum models over a common profile.
        prop_assume!(a.profile() == b.profile());
        let profile = a.profile().clone();
        let left = sum(&profile, &[(0, &sum(&profile, &[(0, &a), (1, &b)]).unwrap()), (1, &a)])
            .unwrap();
        let flat = sum(&profile, &[(0, &a), (1, &b), (2, &a)]).unwrap();
        prop_assert_eq!(canonical_form(&left), canonical_form(&flat));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn indiscernibility_is_permutation_invariant(
        masks in proptest::collection::vec(0u8..16, 2..5),
        rotate in 0usize..4,
    ) {
        let alg = shared_free_algebra();
        let family: Vec<Vec<treeba_core::algebra::Element>> = masks
            .iter()
            .map(|&m| {
                let idx: Vec<usize> = (0..4).filter(|i| m & (1 << i) != 0).collect();
                vec![alg.element_from_points(&idx)]
            })
            .collect();
        let mut permuted = family.clone();
        permuted.rotate_left(rotate % family.len());
        let a = indiscernible_check(&family, 2, 100_000).unwrap();
        let b = indiscernible_check(&permuted, 2, 100_000).unwrap();
        prop_assert_eq!(a, b);
    }
}
