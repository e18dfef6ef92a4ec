//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use special_monoids::cayley::{condensation_matches_prefix_tree, default_margin};
use special_monoids::constructions::{
    amalgam_presentation, bass_serre_ball_amalgam, bass_serre_ball_op, bass_serre_forest_bi,
    check_beta_section, check_derivation_wellformed, example_amalgam, example_otto_pride,
    otto_pride_presentation, BassSerreGraph, ForestKind, OpModel,
};
use special_monoids::{
    analyze_special, cayley_ball, cayley_complex_chain, check_rooted_tree, check_unique_entrance,
    congruence_ball, equal_words, hasse_prefix_tree, knuth_bendix, rank_exact, scc_condense,
    smith_normal_form, torsion_flag, validate_special, AnalysisOptions, BigInt,
    CompletionResult, EqualityContext, IntMatrix, Presentation, RewriteSystem, Word,
};

const BUDGET: u64 = 1_000_000;
const SEED: u64 = 0;

/// Named artifacts produced by a criterion, compared across runs.
type Artifacts = Vec<(String, String)>;
type Outcome = Result<Artifacts, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).unwrap()
}

fn special(letters: &[&str], relators: &[&str]) -> Presentation {
    let rels: Vec<(&str, &str)> = relators.iter().map(|r| (*r, "1")).collect();
    Presentation::from_strs(letters, &rels).unwrap()
}

fn completed(p: &Presentation) -> Result<RewriteSystem, String> {
    match knuth_bendix(&RewriteSystem::from_presentation(p), BUDGET).map_err(|e| e.to_string())? {
        CompletionResult::Completed(s) => Ok(s),
        CompletionResult::TimedOut(_) => Err("completion timed out".into()),
    }
}

fn bicyclic_pipeline() -> Outcome {
    let p = special(&["a", "b"], &["ab"]);
    let ua = analyze_special(&validate_special(&p).unwrap(), AnalysisOptions::default());
    let ab = p.word("ab").unwrap();
    ensure(ua.delta == vec![ab.clone()], || format!("delta = {:?}", ua.delta))?;
    ensure(ua.is_certified() && ua.units_complete(), || "analysis not certified".into())?;
    // trivial group: every unit letter reduces to 1
    for b in 0..ua.unit_letters.len() as u32 {
        let nf = ua.units_system.normalize(&Word::letter(b)).unwrap();
        ensure(nf.is_empty(), || format!("unit letter {b} survives as {nf:?}"))?;
    }
    let ru = ua.right_units_presentation();
    ensure(ua.free_generators == vec![p.word("a").unwrap()], || {
        format!("free generators {:?}", ua.free_generators)
    })?;
    ensure(ru.alphabet.names().iter().filter(|n| n.starts_with('z')).count() == 1, || {
        format!("right units letters {:?}", ru.alphabet.names())
    })?;
    // oracle: each class is one element, each decoded unit relator is 1
    for c in &ua.classes {
        for w in &c.words {
            let ball = congruence_ball(&p, w, w.len() + 4, BUDGET);
            ensure(ball.contains(&c.representative), || format!("{w:?} not equal to its representative"))?;
        }
    }
    for r in &ua.unit_relators {
        let w = ua.decode(r);
        let ball = congruence_ball(&p, &w, w.len() + 4, BUDGET);
        ensure(ball.contains(&Word::empty()), || format!("decoded relator {w:?} is not 1"))?;
    }
    Ok(vec![("bicyclic_analysis.json".into(), pretty(&ua.to_json()))])
}

fn torsion_criterion() -> Outcome {
    let mut rows = Vec::new();
    for (w, k) in [("ab", 1), ("abab", 2), ("aa", 2), ("aaa", 3)] {
        let t = torsion_flag(&validate_special(&special(&["a", "b"], &[w])).unwrap()).unwrap();
        ensure(t.exponent == k && t.torsion == (k > 1), || format!("{w}: {t:?}"))?;
        rows.push(json!({ "relator": w, "exponent": t.exponent, "torsion": t.torsion }));
    }
    Ok(vec![("torsion.json".into(), pretty(&json!(rows)))])
}

fn cayley_structure() -> Outcome {
    let p = special(&["a", "b"], &["ab"]);
    let ua = analyze_special(&validate_special(&p).unwrap(), AnalysisOptions::default());
    let g = cayley_ball(&ua, 8, default_margin(&p)).map_err(|e| e.to_string())?;
    // b^i a^j with i + j <= 8, counted directly
    let expected = (0..=8usize).map(|i| 9 - i).sum::<usize>();
    ensure(expected == 45 && g.len() == 45, || format!("{} vertices", g.len()))?;
    let labels: BTreeSet<String> = g.vertices.iter().map(|v| g.alphabet.compact(&v.label)).collect();
    for i in 0..=8 {
        for j in 0..=8 - i {
            let w = format!("{}{}", "b".repeat(i), "a".repeat(j));
            let w = if w.is_empty() { "1".to_string() } else { w };
            ensure(labels.contains(&w), || format!("missing {w}"))?;
        }
    }
    let rep = scc_condense(&g);
    ensure(check_rooted_tree(&rep).is_proven(), || "condensation is not a rooted tree".into())?;
    let violations = check_unique_entrance(&g, &rep, Some(&ua));
    ensure(violations.is_empty(), || format!("{} entrance violations", violations.len()))?;
    let tree = hasse_prefix_tree(&ua, &g).map_err(|e| e.to_string())?;
    ensure(condensation_matches_prefix_tree(&rep, &tree).is_proven(), || "prefix tree mismatch".into())?;
    Ok(vec![
        ("bicyclic_ball.dot".into(), g.to_dot()),
        ("bicyclic_condensation.json".into(), pretty(&rep.to_json(&g))),
        ("bicyclic_condensation.dot".into(), rep.to_dot(&g)),
    ])
}

fn cayley_complex(suite: &mut Vec<IntMatrix>) -> Outcome {
    let mut arts = Vec::new();
    for (name, p) in [("bicyclic", special(&["a", "b"], &["ab"])), ("z2", special(&["a"], &["aa"]))] {
        let sp = validate_special(&p).unwrap();
        let ua = analyze_special(&sp, AnalysisOptions::default());
        let g = cayley_ball(&ua, 6, default_margin(&p)).map_err(|e| e.to_string())?;
        let cx = cayley_complex_chain(&sp.relators, &g).map_err(|e| e.to_string())?;
        ensure(cx.composite_is_zero(), || format!("{name}: ∂₁∂₂ ≠ 0"))?;
        let inner = cx.interior(&g);
        ensure(inner.composite_is_zero(), || format!("{name}: interior ∂₁∂₂ ≠ 0"))?;
        let ex = inner.augmented_exactness().map_err(|e| e.to_string())?;
        ensure(ex.total_defect() == 0 && ex.is_exact(), || format!("{name}: {}", ex.to_json()))?;
        suite.extend([cx.boundary1.clone(), cx.boundary2.clone(), inner.boundary1.clone(), inner.boundary2.clone()]);
        let mut j = inner.to_json(&g);
        j["augmented_exactness"] = ex.to_json();
        arts.push((format!("{name}_complex.json"), pretty(&j)));
    }
    Ok(arts)
}

fn amalgam_tree(suite: &mut Vec<IntMatrix>) -> Outcome {
    let g = bass_serre_ball_amalgam(&example_amalgam(), 4, None, BUDGET).map_err(|e| e.to_string())?;
    let cert = g.acyclicity();
    ensure(g.incidence_conflicts.is_empty(), || format!("conflicts {:?}", g.incidence_conflicts))?;
    ensure(cert.components == 1, || format!("{} components", cert.components))?;
    ensure(cert.search_acyclic, || "search found a cycle".into())?;
    ensure(cert.rank_acyclic && cert.rank == cert.edges, || format!("rank {} for {} edges", cert.rank, cert.edges))?;
    suite.push(g.boundary_matrix());
    Ok(vec![
        ("amalgam_tree.json".into(), pretty(&json!({ "graph": g.to_json(), "acyclicity": cert.to_json() }))),
        ("amalgam_tree.dot".into(), g.to_dot()),
    ])
}

fn otto_pride_normal_forms() -> Outcome {
    let model = OpModel::new(&example_otto_pride(), BUDGET).map_err(|e| e.to_string())?;
    let l = completed(&model.presentation)?;
    let words = model.presentation.alphabet.words_up_to(8);
    let nfs: Vec<_> = words.iter().map(|w| model.normal_form(w)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let mut unknowns = 0usize;
    let mut mismatches = Vec::new();
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate().skip(i) {
            let verdict = equal_words(&EqualityContext::System(&l), u, v, BUDGET);
            if verdict.is_unknown() {
                unknowns += 1;
            } else if verdict.is_proven() != (nfs[i] == nfs[j]) && mismatches.len() < 5 {
                mismatches.push(format!("{} / {}", model.render(&nfs[i]), model.render(&nfs[j])));
            }
        }
    }
    ensure(unknowns == 0, || format!("{unknowns} unknown verdicts"))?;
    ensure(mismatches.is_empty(), || format!("mismatches: {mismatches:?}"))?;
    let mut elems = Vec::new();
    for w in model.presentation.alphabet.words_up_to(4) {
        let nf = model.normal_form(&w).unwrap();
        if !elems.contains(&nf) {
            elems.push(nf);
        }
    }
    let mut triples = 0usize;
    for x in &elems {
        for y in &elems {
            let xy = model.multiply(x, y).map_err(|e| e.to_string())?;
            for z in &elems {
                let left = model.multiply(&xy, z).map_err(|e| e.to_string())?;
                let yz = model.multiply(y, z).map_err(|e| e.to_string())?;
                let right = model.multiply(x, &yz).map_err(|e| e.to_string())?;
                ensure(left == right, || {
                    format!("({})({})({}) not associative", model.render(x), model.render(y), model.render(z))
                })?;
                triples += 1;
            }
        }
    }
    let table: BTreeMap<String, String> = words
        .iter()
        .zip(&nfs)
        .filter(|(w, _)| w.len() <= 4)
        .map(|(w, nf)| (model.presentation.alphabet.render(w), model.render(nf)))
        .collect();
    Ok(vec![(
        "otto_pride_normal_forms.json".into(),
        pretty(&json!({ "words": words.len(), "elements": elems.len(), "triples": triples, "table": table })),
    )])
}

fn derivation_family(name: &str, g: &BassSerreGraph, relations: &Presentation, seed: u64) -> Outcome {
    let pairs = g.sample_pairs(1000, seed);
    let d = check_derivation_wellformed(g, relations, &pairs).map_err(|e| e.to_string())?;
    let b = check_beta_section(g).map_err(|e| e.to_string())?;
    ensure(d.pairs_checked == 1000, || format!("{name}: {} pairs", d.pairs_checked))?;
    ensure(d.passed(), || format!("{name}: {:?}", &d.failures[..d.failures.len().min(3)]))?;
    ensure(d.unresolved == 0, || format!("{name}: {} comparisons left the ball", d.unresolved))?;
    ensure(b.passed(), || format!("{name}: section {:?}", &b.failures[..b.failures.len().min(3)]))?;
    ensure(b.skipped.is_empty() && b.edges_checked > 0, || format!("{name}: {} edges skipped", b.skipped.len()))?;
    Ok(vec![(format!("{name}_derivations.json"), pretty(&json!({ "derivation": d.to_json(), "section": b.to_json() })))])
}

fn derivations() -> Outcome {
    let mut arts = Vec::new();
    let am = amalgam_presentation(&example_amalgam(), BUDGET).map_err(|e| e.to_string())?;
    let g = bass_serre_ball_amalgam(&example_amalgam(), 4, None, BUDGET).map_err(|e| e.to_string())?;
    arts.extend(derivation_family("amalgam", &g, &am.presentation, SEED)?);
    let op = otto_pride_presentation(&example_otto_pride(), BUDGET).map_err(|e| e.to_string())?;
    let g = bass_serre_ball_op(&example_otto_pride(), 4, None, BUDGET).map_err(|e| e.to_string())?;
    arts.extend(derivation_family("otto_pride", &g, &op.presentation, SEED)?);
    let g = bass_serre_forest_bi(&ForestKind::OttoPride(example_otto_pride()), 3, None, BUDGET)
        .map_err(|e| e.to_string())?;
    ensure(g.acyclicity().is_forest(), || "two-sided graph is not a forest".into())?;
    arts.extend(derivation_family("otto_pride_forest", &g, &op.presentation, SEED)?);
    Ok(arts)
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn det(m: &[Vec<i128>]) -> i128 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .filter(|&c| m[0][c] != 0)
        .map(|c| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
                .collect();
            (if c % 2 == 0 { 1 } else { -1 }) * m[0][c] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    out.extend(subsets(n - 1, k - 1).into_iter().map(|mut s| {
        s.push(n - 1);
        s
    }));
    out
}

/// Invariant factors `d_k / d_{k-1}` from gcds of `k × k` minors.
fn determinantal_factors(m: &[Vec<i64>]) -> Vec<i128> {
    let n = m.len();
    let mut d = vec![1i128];
    for k in 1..=n {
        let mut g = 0;
        for rows in subsets(n, k) {
            for cols in subsets(n, k) {
                let sub: Vec<Vec<i128>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j] as i128).collect()).collect();
                g = gcd(g, det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        d.push(g);
    }
    d.windows(2).map(|w| w[1] / w[0]).collect()
}

fn linear_algebra(suite: &[IntMatrix]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut rows = Vec::new();
    let mut all = suite.to_vec();
    for i in 0..200 {
        let m: Vec<Vec<i64>> = (0..5).map(|_| (0..5).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let a = IntMatrix::from_dense(&m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect::<Vec<_>>());
        let snf = smith_normal_form(&a);
        let expected: Vec<BigInt> = determinantal_factors(&m).into_iter().map(BigInt::from).collect();
        ensure(snf.diag == expected, || format!("matrix {i}: {:?} vs {:?}", snf.diag, expected))?;
        rows.push(snf.to_json());
        all.push(a);
    }
    for (i, a) in all.iter().enumerate() {
        let (r, s) = (rank_exact(a), smith_normal_form(a).rank);
        ensure(r == s, || format!("suite matrix {i}: rank {r}, Smith rank {s}"))?;
    }
    Ok(vec![("smith.json".into(), pretty(&json!(rows)))])
}

fn completion_behavior() -> Outcome {
    let mut arts = Vec::new();
    for (name, letters, lhs) in [("ab", vec!["a", "b"], "ab"), ("aa", vec!["a"], "aa")] {
        let p = Presentation::from_strs(&letters, &[(lhs, "1")]).unwrap();
        let input = RewriteSystem::from_presentation(&p);
        match knuth_bendix(&input, BUDGET).map_err(|e| e.to_string())? {
            CompletionResult::Completed(s) => {
                ensure(s.rules == input.rules, || format!("{name}: rules changed to {:?}", s.render_rules()))?;
                arts.push((format!("kb_{name}.json"), pretty(&json!(s.render_rules()))));
            }
            CompletionResult::TimedOut(_) => return Err(format!("{name}: timed out")),
        }
    }
    let p = Presentation::from_strs(&["x", "y"], &[("yyy", "xx")]).unwrap();
    let res = knuth_bendix(&RewriteSystem::from_presentation(&p), BUDGET).map_err(|e| e.to_string())?;
    let outcome = if res.is_completed() { "completed" } else { "timed_out" };
    let s = res.system();
    for rule in &s.rules {
        let max_len = rule.lhs.len().max(rule.rhs.len()) + 2 * p.max_relation_len();
        let ball = congruence_ball(&p, &rule.lhs, max_len, BUDGET);
        ensure(ball.contains(&rule.rhs), || format!("rule {:?} not verified", rule))?;
    }
    arts.push(("kb_amalgam.json".into(), pretty(&json!({ "result": outcome, "rules": s.render_rules() }))));
    Ok(arts)
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
}

fn run_all(report: bool) -> (bool, HashMap<String, String>) {
    let mut suite: Vec<IntMatrix> = Vec::new();
    let mut artifacts = HashMap::new();
    let mut ok = true;
    let criteria = [
        Criterion { id: 1, name: "bicyclic pipeline", limit: Duration::from_secs(5) },
        Criterion { id: 2, name: "torsion criterion", limit: Duration::from_secs(1) },
        Criterion { id: 3, name: "Cayley structure", limit: Duration::from_secs(5) },
        Criterion { id: 4, name: "Cayley complex", limit: Duration::from_secs(10) },
        Criterion { id: 5, name: "amalgam Bass–Serre tree", limit: Duration::from_secs(30) },
        Criterion { id: 6, name: "Otto-Pride normal forms", limit: Duration::from_secs(60) },
        Criterion { id: 7, name: "derivations", limit: Duration::from_secs(60) },
        Criterion { id: 8, name: "linear algebra", limit: Duration::from_secs(30) },
        Criterion { id: 9, name: "completion behavior", limit: Duration::from_secs(60) },
    ];
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| match c.id {
            1 => bicyclic_pipeline(),
            2 => torsion_criterion(),
            3 => cayley_structure(),
            4 => cayley_complex(&mut suite),
            5 => amalgam_tree(&mut suite),
            6 => otto_pride_normal_forms(),
            7 => derivations(),
            8 => linear_algebra(&suite),
            _ => completion_behavior(),
        }))
        .unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let verdict = match result {
            Ok(arts) if elapsed <= c.limit => {
                artifacts.extend(arts);
                Ok(())
            }
            Ok(arts) => {
                artifacts.extend(arts);
                Err(format!("took {:.2}s, limit {}s", elapsed.as_secs_f64(), c.limit.as_secs()))
            }
            Err(e) => Err(e),
        };
        ok &= verdict.is_ok();
        if report {
            match verdict {
                Ok(()) => println!("PASS {:>2} {} ({:.2}s)", c.id, c.name, elapsed.as_secs_f64()),
                Err(e) => println!("FAIL {:>2} {} ({:.2}s): {e}", c.id, c.name, elapsed.as_secs_f64()),
            }
        }
    }
    (ok, artifacts)
}

fn cli_artifacts() -> Result<Vec<Vec<u8>>, String> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let p = |f: &str| data.join(f).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["analyze-special".into(), "--presentation".into(), p("bicyclic.txt")],
        vec!["condense".into(), "--presentation".into(), p("bicyclic.txt"), "--radius".into(), "8".into(), "--format".into(), "dot".into()],
        vec!["bass-serre".into(), "--kind".into(), "amalgam".into(), "--spec".into(), p("amalgam.json"), "--radius".into(), "4".into()],
        vec!["verify-derivations".into(), "--kind".into(), "otto-pride".into(), "--two-sided".into(), "--spec".into(), p("otto_pride.json"), "--radius".into(), "3".into()],
    ];
    runs.iter()
        .map(|args| {
            let out = Command::new(env!("CARGO_BIN_EXE_monoid")).args(args).output().map_err(|e| e.to_string())?;
            if out.status.code() != Some(0) {
                return Err(format!("{args:?} exited with {:?}", out.status.code()));
            }
            Ok(out.stdout)
        })
        .collect()
}

fn main() {
    let start = Instant::now();
    let (ok, first) = run_all(true);
    let out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let _ = std::fs::create_dir_all(&out_dir);
    for (name, body) in &first {
        let _ = std::fs::write(out_dir.join(name), body);
    }
    let (_, second) = run_all(false);
    let mut differing: Vec<&String> = first.keys().filter(|k| second.get(*k) != first.get(*k)).collect();
    differing.sort();
    let cli = cli_artifacts().and_then(|a| cli_artifacts().map(|b| (a, b)));
    let determinism = match (&cli, differing.is_empty()) {
        (Ok((a, b)), true) if a == b => Ok(()),
        (Ok(_), true) => Err("command-line artifacts differ between runs".to_string()),
        (Ok(_), false) => Err(format!("artifacts differ: {differing:?}")),
        (Err(e), _) => Err(e.clone()),
    };
    let elapsed = start.elapsed().as_secs_f64();
    match &determinism {
        Ok(()) => println!("PASS 10 determinism ({} artifacts, {elapsed:.2}s total)", first.len()),
        Err(e) => println!("FAIL 10 determinism: {e}"),
    }
    if !ok || determinism.is_err() {
        std::process::exit(1);
    }
}
