use std::collections::BTreeSet;

use special_monoids::cayley::{condensation_matches_prefix_tree, default_margin};
use special_monoids::{
    analyze_special, cayley_ball, cayley_complex_chain, check_rooted_tree, check_unique_entrance,
    hasse_prefix_tree, knuth_bendix, scc_condense, validate_special, AnalysisOptions,
    Presentation, RewriteSystem, UnitsAnalysis, Word,
};

const CASES: &[(&[&str], &[&str])] = &[
    (&["a", "b"], &["ab"]),
    (&["a", "b"], &["abab"]),
    (&["a", "b"], &["aabb"]),
    (&["a", "b", "c"], &["abc"]),
    (&["a", "b", "c"], &["ab", "ac"]),
];

fn setup(letters: &[&str], relators: &[&str]) -> (Presentation, UnitsAnalysis) {
    let rels: Vec<(&str, &str)> = relators.iter().map(|r| (*r, "1")).collect();
    let p = Presentation::from_strs(letters, &rels).unwrap();
    let ua = analyze_special(&validate_special(&p).unwrap(), AnalysisOptions::default());
    (p, ua)
}

/// Ball vertices are exactly the distinct elements of words of length at
/// most the radius, counted with an independently completed system.
#[test]
fn ball_sizes_match_enumeration() {
    for (letters, rels) in CASES {
        let (p, ua) = setup(letters, rels);
        let kb = knuth_bendix(&RewriteSystem::from_presentation(&p), 100_000).unwrap().into_system();
        let g = cayley_ball(&ua, 5, default_margin(&p)).unwrap();
        let elements: BTreeSet<Word> =
            p.alphabet.words_up_to(5).iter().map(|w| kb.normalize(w).unwrap()).collect();
        assert_eq!(g.len(), elements.len(), "{rels:?}");
        for a in &g.arcs {
            let prod = g.vertices[a.src].label.concat(&Word::letter(a.letter));
            assert_eq!(kb.normalize(&prod).unwrap(), kb.normalize(&g.vertices[a.dst].label).unwrap());
        }
    }
}

#[test]
fn condensations_look_like_prefix_trees() {
    for (letters, rels) in CASES {
        let (p, ua) = setup(letters, rels);
        let g = cayley_ball(&ua, 6, default_margin(&p)).unwrap();
        let rep = scc_condense(&g);
        assert!(check_rooted_tree(&rep).is_proven(), "{rels:?}");
        assert!(check_unique_entrance(&g, &rep, Some(&ua)).is_empty(), "{rels:?}");
        let tree = hasse_prefix_tree(&ua, &g).unwrap();
        assert!(condensation_matches_prefix_tree(&rep, &tree).is_proven(), "{rels:?}");
    }
}

#[test]
fn cayley_complexes_are_exact_inside() {
    for (letters, rels) in CASES {
        let (p, ua) = setup(letters, rels);
        let g = cayley_ball(&ua, 6, default_margin(&p)).unwrap();
        let relators: Vec<Word> = ua.sp.relators.clone();
        let cx = cayley_complex_chain(&relators, &g).unwrap();
        assert!(cx.composite_is_zero());
        let inner = cx.interior(&g);
        assert!(inner.composite_is_zero());
        let report = inner.augmented_exactness().unwrap();
        assert!(report.is_exact(), "{rels:?}: {}", report.to_json());
    }
}
