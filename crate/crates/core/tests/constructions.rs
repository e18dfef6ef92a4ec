use std::collections::HashMap;

use special_monoids::constructions::{
    amalgam_presentation, bass_serre_ball_amalgam, bass_serre_ball_op, bass_serre_forest_bi,
    check_beta_section, check_derivation_wellformed, example_amalgam, example_otto_pride,
    otto_pride_presentation, AmalgamSpec, ForestKind, OpModel,
};
use special_monoids::{
    equal_words, knuth_bendix, CompletionResult, EqualityContext, Presentation, RewriteSystem,
    Word,
};

fn completed(p: &Presentation) -> RewriteSystem {
    match knuth_bendix(&RewriteSystem::from_presentation(p), 1_000_000).unwrap() {
        CompletionResult::Completed(s) => s,
        CompletionResult::TimedOut(_) => panic!("expected completion"),
    }
}

/// Normal forms in the extension agree with equality decided by a complete
/// rewriting system for the whole presentation.
#[test]
fn op_normal_forms_decide_equality() {
    let spec = example_otto_pride();
    let model = OpModel::new(&spec, 100_000).unwrap();
    let l = completed(&model.presentation);
    let words = model.presentation.alphabet.words_up_to(6);
    let mut classes: HashMap<Word, _> = HashMap::new();
    for w in &words {
        let nf = model.normal_form(w).unwrap();
        let key = l.normalize(w).unwrap();
        let prev = classes.entry(key).or_insert_with(|| nf.clone());
        assert_eq!(*prev, nf, "{}", model.presentation.alphabet.render(w));
        // the normal form names the same element
        let back = model.to_word(&nf);
        assert!(equal_words(&EqualityContext::System(&l), w, &back, 10_000).is_proven());
    }
    let mut seen = std::collections::HashSet::new();
    for nf in classes.values() {
        assert!(seen.insert(nf.clone()), "two elements share {}", model.render(nf));
    }
}

#[test]
fn op_multiplication_is_associative_and_compatible() {
    let model = OpModel::new(&example_otto_pride(), 100_000).unwrap();
    let mut elems = Vec::new();
    for w in model.presentation.alphabet.words_up_to(3) {
        let nf = model.normal_form(&w).unwrap();
        if !elems.contains(&nf) {
            elems.push(nf);
        }
    }
    for x in &elems {
        for y in &elems {
            let xy = model.multiply(x, y).unwrap();
            let direct = model.normal_form(&model.to_word(x).concat(&model.to_word(y))).unwrap();
            assert_eq!(xy, direct);
            for z in &elems {
                let left = model.multiply(&xy, z).unwrap();
                let right = model.multiply(x, &model.multiply(y, z).unwrap()).unwrap();
                assert_eq!(left, right);
            }
        }
    }
}

fn other_amalgam() -> AmalgamSpec {
    // ⟨x | ⟩ and ⟨y | ⟩ over ⟨w | ⟩ with w ↦ x x x, w ↦ y y
    let m1 = Presentation::from_strs(&["x"], &[]).unwrap();
    let m2 = Presentation::from_strs(&["y"], &[]).unwrap();
    let w = Presentation::from_strs(&["w"], &[]).unwrap();
    AmalgamSpec {
        f1: vec![m1.word("x x x").unwrap()],
        f2: vec![m2.word("y y").unwrap()],
        m1,
        m2,
        w,
    }
}

#[test]
fn amalgam_trees_at_several_radii() {
    for spec in [example_amalgam(), other_amalgam()] {
        for r in 0..=4 {
            let g = bass_serre_ball_amalgam(&spec, r, None, 1_000_000).unwrap();
            assert!(g.incidence_conflicts.is_empty());
            let cert = g.acyclicity();
            assert!(cert.agree());
            assert!(cert.is_tree(), "radius {r}: {}", cert.to_json());
        }
    }
}

#[test]
fn derivations_and_sections() {
    let am_spec = other_amalgam();
    let g = bass_serre_ball_amalgam(&am_spec, 4, None, 1_000_000).unwrap();
    let am = amalgam_presentation(&am_spec, 1_000_000).unwrap();
    let r = check_derivation_wellformed(&g, &am.presentation, &g.sample_pairs(300, 3)).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
    assert!(check_beta_section(&g).unwrap().passed());

    let op_spec = example_otto_pride();
    let op = otto_pride_presentation(&op_spec, 1_000_000).unwrap();
    let g = bass_serre_ball_op(&op_spec, 4, None, 1_000_000).unwrap();
    assert!(g.acyclicity().is_tree());
    let r = check_derivation_wellformed(&g, &op.presentation, &g.sample_pairs(300, 3)).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
    let b = check_beta_section(&g).unwrap();
    assert!(b.passed() && b.edges_checked > 0, "{:?}", b.failures);

    let g = bass_serre_forest_bi(&ForestKind::Amalgam(am_spec), 3, None, 10_000_000).unwrap();
    let cert = g.acyclicity();
    assert!(cert.is_forest() && cert.agree());
    assert!(g.product_check().unwrap().is_bijection());
    assert!(check_beta_section(&g).unwrap().passed());
}

/// A doubled edge closes a cycle; both certificates must see it.
#[test]
fn cycles_are_seen_by_both_certificates() {
    let mut g = bass_serre_ball_op(&example_otto_pride(), 3, None, 1_000_000).unwrap();
    assert!(g.acyclicity().is_tree());
    let dup = g.edges.iter().find(|e| e.interior).unwrap().clone();
    g.edges.push(dup);
    let cert = g.acyclicity();
    assert!(cert.agree());
    assert!(!cert.search_acyclic && !cert.rank_acyclic);
    assert!(cert.cycle_edge.is_some());
}
