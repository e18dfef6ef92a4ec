use std::path::Path;

use serde_json::{json, Value};
use special_monoids::cayley::{condensation_matches_prefix_tree, default_margin, EntranceViolation};
use special_monoids::constructions::{
    amalgam_presentation, bass_serre_ball_amalgam, bass_serre_ball_op, bass_serre_forest_bi,
    check_beta_section, check_derivation_wellformed, free_product_from_json_str, hnn_presentation,
    otto_pride_presentation, AmalgamSpec, BassSerreGraph, ForestKind, HnnSpec, OpModel,
    OttoPrideSpec,
};
use special_monoids::homology::chain_homology;
use special_monoids::special::CandidateBound;
use special_monoids::{
    analyze_special, cayley_ball, cayley_complex_chain, check_rooted_tree, check_unique_entrance,
    equal_words, exactness_check, hasse_prefix_tree, knuth_bendix, parse_presentation,
    scc_condense, serialize_presentation, validate_special, AnalysisOptions, BigInt,
    CompletionResult, EqualityContext, IntChainComplex, IntMatrix, LabeledDigraph,
    NormalFormSolver, Presentation, RewriteSystem, UnitsAnalysis,
};

use crate::output::{pretty, read, Artifact, Failure, BUDGET_EXHAUSTED, OK, VERIFICATION_FAILED};
use crate::{BallArgs, Bound, Cli, Command, Emit, Format, Global, GraphArgs, Kind, SpecialEmit};

type Outcome = Result<Artifact, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Parse { presentation } => parse(g, presentation),
        Command::Complete { presentation } => complete(g, presentation),
        Command::Rewrite { system, word, complete } => rewrite(g, system, word, *complete),
        Command::Equal { presentation, u, v } => equal(g, presentation, u, v),
        Command::AnalyzeSpecial { presentation, emit, bound } => {
            analyze(g, presentation, *emit, *bound)
        }
        Command::Cayley(b) => cayley(g, b),
        Command::Condense(b) => condense(g, b),
        Command::CheckTree(b) => check_tree(g, b),
        Command::Construct { kind, spec } => construct(g, *kind, spec),
        Command::BassSerre(a) => bass_serre(g, a),
        Command::Chain { ball, interior } => chain(g, ball, *interior),
        Command::Homology { boundaries, augmented } => homology(boundaries, *augmented),
        Command::VerifyDerivations { graph, samples } => verify_derivations(g, graph, *samples),
    }
}

/// JSON when the first non-blank character is `{`, the line format otherwise.
fn load_presentation(g: &Global, path: &Path) -> Result<Presentation, Failure> {
    let text = read(path)?;
    let mut p = if text.trim_start().starts_with('{') {
        Presentation::from_json_str(&text)?
    } else {
        parse_presentation(&text)?
    };
    if let Some(order) = &g.order {
        let toks: Vec<&str> = order.split_whitespace().collect();
        p.alphabet = p.alphabet.clone().with_order(&toks)?;
    }
    Ok(p)
}

fn unknown_note(what: &str, budget: u64) -> Value {
    json!({ "code": "unknown", "subject": what, "budget": budget })
}

fn parse(g: &Global, path: &Path) -> Outcome {
    let p = load_presentation(g, path)?;
    Ok(match g.format {
        Format::Text => Artifact::new(serialize_presentation(&p), OK),
        _ => Artifact::json(&serde_json::to_value(p.to_json()).expect("serializable"), OK),
    })
}

fn completion_json(p: &Presentation, res: &CompletionResult) -> Value {
    let s = res.system();
    json!({
        "presentation": p.name,
        "result": if res.is_completed() { "completed" } else { "timed_out" },
        "status": s.status,
        "rules": s.render_rules(),
    })
}

fn complete(g: &Global, path: &Path) -> Outcome {
    let p = load_presentation(g, path)?;
    let res = knuth_bendix(&RewriteSystem::from_presentation(&p), g.budget)?;
    let status = if res.is_completed() { OK } else { BUDGET_EXHAUSTED };
    let art = match g.format {
        Format::Text => {
            let mut s = res.system().render_rules().join("\n");
            s.push('\n');
            Artifact::new(s, status)
        }
        _ => Artifact::json(&completion_json(&p, &res), status),
    };
    Ok(if res.is_completed() {
        art
    } else {
        art.with_notes(vec![unknown_note("completion", g.budget)])
    })
}

fn rewrite(g: &Global, path: &Path, word: &str, complete: bool) -> Outcome {
    let p = load_presentation(g, path)?;
    let mut sys = RewriteSystem::from_presentation(&p);
    let mut status = OK;
    if complete {
        let res = knuth_bendix(&sys, g.budget)?;
        if !res.is_completed() {
            status = BUDGET_EXHAUSTED;
        }
        sys = res.into_system();
    }
    let w = p.alphabet.parse_word(word)?;
    let trace = sys.normalize_trace(&w)?;
    let a = &p.alphabet;
    let nf = trace.last().cloned().unwrap_or_else(|| w.clone());
    Ok(match g.format {
        Format::Text => Artifact::new(format!("{}\n", a.render(&nf)), status),
        _ => Artifact::json(
            &json!({
                "word": a.render(&w),
                "normal_form": a.render(&nf),
                "trace": trace.iter().map(|x| a.render(x)).collect::<Vec<_>>(),
                "status": sys.status,
            }),
            status,
        ),
    })
}

fn equal(g: &Global, path: &Path, u: &str, v: &str) -> Outcome {
    let p = load_presentation(g, path)?;
    let (u, v) = (p.alphabet.parse_word(u)?, p.alphabet.parse_word(v)?);
    let res = knuth_bendix(&RewriteSystem::from_presentation(&p), g.budget)?;
    let (verdict, context) = match &res {
        CompletionResult::Completed(s) => (equal_words(&EqualityContext::System(s), &u, &v, g.budget), "system"),
        CompletionResult::TimedOut(_) => (
            equal_words(&EqualityContext::Oracle { presentation: &p, max_len: None }, &u, &v, g.budget),
            "oracle",
        ),
    };
    let mut out = verdict.to_json(&p.alphabet);
    out["context"] = json!(context);
    out["u"] = json!(p.alphabet.render(&u));
    out["v"] = json!(p.alphabet.render(&v));
    Ok(if verdict.is_unknown() {
        out["unknowns"] = json!([unknown_note("equality", g.budget)]);
        Artifact::json(&out, BUDGET_EXHAUSTED).with_notes(vec![unknown_note("equality", g.budget)])
    } else {
        Artifact::json(&out, OK)
    })
}

fn analysis(g: &Global, p: &Presentation, bound: Bound) -> Result<UnitsAnalysis, Failure> {
    let sp = validate_special(p)?;
    let opts = AnalysisOptions {
        budget: g.budget,
        bound: match bound {
            Bound::Shortest => CandidateBound::ShortestRelator,
            Bound::Longest => CandidateBound::LongestRelator,
        },
    };
    Ok(analyze_special(&sp, opts))
}

fn analyze(g: &Global, path: &Path, emit: SpecialEmit, bound: Bound) -> Outcome {
    let p = load_presentation(g, path)?;
    let ua = analysis(g, &p, bound)?;
    let full = ua.to_json();
    let keys: &[&str] = match emit {
        SpecialEmit::All => &[],
        SpecialEmit::Units => &["units", "units_system"],
        SpecialEmit::RightUnits => &["right_units", "Z", "I0"],
        SpecialEmit::Delta => &["delta", "partition", "representatives", "factors"],
    };
    let mut out = if keys.is_empty() {
        full.clone()
    } else {
        let mut m = serde_json::Map::new();
        for k in keys {
            m.insert((*k).to_string(), full[*k].clone());
        }
        m.insert("diagnostics".into(), full["diagnostics"].clone());
        m.insert("certified".into(), full["certified"].clone());
        Value::Object(m)
    };
    let certified = ua.is_certified() && ua.units_complete();
    let notes: Vec<Value> = ua
        .diagnostics
        .iter()
        .filter(|d| d.budget.is_some())
        .map(|d| serde_json::to_value(d).expect("serializable"))
        .collect();
    out["unknowns"] = json!(notes);
    Ok(Artifact::json(&out, if certified { OK } else { BUDGET_EXHAUSTED }).with_notes(notes))
}

/// Normal forms for the ball: the special analysis when it is certified,
/// otherwise a completed rewriting system.
enum Solver {
    Special(Box<UnitsAnalysis>),
    System(RewriteSystem),
}

impl Solver {
    fn new(g: &Global, p: &Presentation) -> Result<Self, Failure> {
        if p.is_special() && !p.relations.is_empty() {
            let ua = analysis(g, p, Bound::Shortest)?;
            if ua.is_certified() && ua.units_complete() {
                return Ok(Solver::Special(Box::new(ua)));
            }
        }
        match knuth_bendix(&RewriteSystem::from_presentation(p), g.budget)? {
            CompletionResult::Completed(s) => Ok(Solver::System(s)),
            CompletionResult::TimedOut(_) => Err(Failure {
                code: BUDGET_EXHAUSTED,
                kind: "budget",
                message: format!("no normal forms: completion did not finish within {} steps", g.budget),
            }),
        }
    }

    fn as_dyn(&self) -> &dyn NormalFormSolver {
        match self {
            Solver::Special(ua) => ua.as_ref(),
            Solver::System(s) => s,
        }
    }

    fn analysis(&self) -> Option<&UnitsAnalysis> {
        match self {
            Solver::Special(ua) => Some(ua),
            Solver::System(_) => None,
        }
    }
}

fn ball(g: &Global, b: &BallArgs) -> Result<(Presentation, Solver, LabeledDigraph), Failure> {
    let p = load_presentation(g, &b.presentation)?;
    let solver = Solver::new(g, &p)?;
    let radius = g.radius.unwrap_or(4);
    let margin = b.margin.unwrap_or_else(|| default_margin(&p));
    let graph = cayley_ball(solver.as_dyn(), radius, margin)?;
    Ok((p, solver, graph))
}

fn cayley(g: &Global, b: &BallArgs) -> Outcome {
    let (_, _, graph) = ball(g, b)?;
    Ok(match g.format {
        Format::Dot => Artifact::new(graph.to_dot(), OK),
        Format::Text => {
            let mut s = String::new();
            for v in &graph.vertices {
                s.push_str(&graph.alphabet.render(&v.label));
                s.push('\n');
            }
            Artifact::new(s, OK)
        }
        Format::Json => Artifact::json(&graph.to_json(), OK),
    })
}

fn condense(g: &Global, b: &BallArgs) -> Outcome {
    let (_, _, graph) = ball(g, b)?;
    let rep = scc_condense(&graph);
    Ok(match g.format {
        Format::Dot => Artifact::new(rep.to_dot(&graph), OK),
        _ => Artifact::json(&rep.to_json(&graph), OK),
    })
}

fn render_violation(g: &LabeledDigraph, v: &EntranceViolation) -> Value {
    let label = |i: usize| g.alphabet.render(&g.vertices[i].label);
    json!({
        "vertex": label(v.vertex),
        "entering": v.entering.iter()
            .map(|a| format!("{} -{}-> {}", label(a.src), g.alphabet.name(a.letter), label(a.dst)))
            .collect::<Vec<_>>(),
        "reason": v.reason,
    })
}

fn check_tree(g: &Global, b: &BallArgs) -> Outcome {
    let (_, solver, graph) = ball(g, b)?;
    let rep = scc_condense(&graph);
    let tree = check_rooted_tree(&rep);
    let violations = check_unique_entrance(&graph, &rep, solver.analysis());
    let hasse = match solver.analysis() {
        Some(ua) => Some(condensation_matches_prefix_tree(&rep, &hasse_prefix_tree(ua, &graph)?)),
        None => None,
    };
    let failed = tree.is_refuted()
        || !violations.is_empty()
        || hasse.as_ref().is_some_and(|h| h.is_refuted());
    let mut notes = Vec::new();
    if tree.is_unknown() {
        notes.push(json!({ "code": "unknown", "subject": "rooted_tree", "reason": "fewer than two interior components" }));
    }
    let out = json!({
        "radius": graph.radius,
        "margin": graph.margin,
        "vertices": graph.len(),
        "interior_components": rep.interior_sccs().len(),
        "rooted_tree": tree.value,
        "entrance_violations": violations.iter().map(|v| render_violation(&graph, v)).collect::<Vec<_>>(),
        "prefix_tree": hasse.map(|h| h.value),
        "unknowns": notes,
    });
    Ok(Artifact::json(&out, if failed { VERIFICATION_FAILED } else { OK }).with_notes(notes))
}

fn presentation_artifact(g: &Global, p: &Presentation, extra: Value, status: u8) -> Artifact {
    match g.format {
        Format::Text => Artifact::new(serialize_presentation(p), status),
        _ => {
            let mut out = json!({ "presentation": p.to_json() });
            if let Value::Object(m) = extra {
                for (k, v) in m {
                    out[k] = v;
                }
            }
            Artifact::json(&out, status)
        }
    }
}

fn construct(g: &Global, kind: Kind, spec: &Path) -> Outcome {
    let text = read(spec)?;
    match kind {
        Kind::FreeProduct => {
            let p = free_product_from_json_str(&text)?;
            Ok(presentation_artifact(g, &p, json!({}), OK))
        }
        Kind::Amalgam => {
            let am = amalgam_presentation(&AmalgamSpec::from_json_str(&text)?, g.budget)?;
            let ok = am.map_checks.iter().all(|m| m.is_ok());
            let extra = json!({ "map_checks": am.map_checks.iter().map(|m| m.to_json()).collect::<Vec<_>>() });
            Ok(presentation_artifact(g, &am.presentation, extra, if ok { OK } else { VERIFICATION_FAILED }))
        }
        Kind::OttoPride => {
            let spec = OttoPrideSpec::from_json_str(&text)?;
            let op = otto_pride_presentation(&spec, g.budget)?;
            let mut ok = op.map_check.is_ok();
            let mut extra = json!({ "map_check": op.map_check.to_json() });
            if spec.free_basis.is_some() {
                let model = OpModel::new(&spec, g.budget)?;
                let bad = model.check_free_basis(g.radius.unwrap_or(6))?;
                ok &= bad.is_empty();
                extra["free_basis_failures"] = json!(bad);
            }
            Ok(presentation_artifact(g, &op.presentation, extra, if ok { OK } else { VERIFICATION_FAILED }))
        }
        Kind::Hnn => {
            let (p, mc) = hnn_presentation(&HnnSpec::from_json_str(&text)?, g.budget)?;
            let status = if mc.is_ok() { OK } else { VERIFICATION_FAILED };
            Ok(presentation_artifact(g, &p, json!({ "map_check": mc.to_json() }), status))
        }
    }
}

fn graph(g: &Global, a: &GraphArgs) -> Result<(BassSerreGraph, Presentation), Failure> {
    let text = read(&a.spec)?;
    let radius = g.radius.unwrap_or(3);
    match a.kind {
        Kind::Amalgam => {
            let spec = AmalgamSpec::from_json_str(&text)?;
            let p = amalgam_presentation(&spec, g.budget)?.presentation;
            let gr = if a.two_sided {
                bass_serre_forest_bi(&ForestKind::Amalgam(spec), radius, a.slack, g.budget)?
            } else {
                bass_serre_ball_amalgam(&spec, radius, a.slack, g.budget)?
            };
            Ok((gr, p))
        }
        Kind::OttoPride => {
            let spec = OttoPrideSpec::from_json_str(&text)?;
            let p = otto_pride_presentation(&spec, g.budget)?.presentation;
            let gr = if a.two_sided {
                bass_serre_forest_bi(&ForestKind::OttoPride(spec), radius, a.slack, g.budget)?
            } else {
                bass_serre_ball_op(&spec, radius, a.slack, g.budget)?
            };
            Ok((gr, p))
        }
        Kind::FreeProduct | Kind::Hnn => Err(Failure::input(
            "Bass–Serre graphs are built for --kind amalgam and --kind otto-pride",
        )),
    }
}

fn tables_complete(gr: &BassSerreGraph) -> bool {
    gr.to_json()["tables_complete"].as_bool().unwrap_or(false)
}

fn bass_serre(g: &Global, a: &GraphArgs) -> Outcome {
    let (gr, _) = graph(g, a)?;
    let cert = gr.acyclicity();
    let product = if a.two_sided { Some(gr.product_check()?) } else { None };
    let shape_ok = if a.two_sided { cert.is_forest() } else { cert.is_tree() };
    let ok = shape_ok
        && cert.agree()
        && gr.incidence_conflicts.is_empty()
        && product.as_ref().is_none_or(|p| p.is_bijection());
    let status = if !tables_complete(&gr) {
        BUDGET_EXHAUSTED
    } else if ok {
        OK
    } else {
        VERIFICATION_FAILED
    };
    let emit = match g.format {
        Format::Dot => Emit::Dot,
        _ => a.emit,
    };
    Ok(match emit {
        Emit::Dot => Artifact::new(gr.to_dot(), status),
        Emit::Matrix => Artifact::new(gr.boundary_matrix().to_triplets(), status),
        Emit::Json => Artifact::json(
            &json!({
                "graph": gr.to_json(),
                "acyclicity": cert.to_json(),
                "product_check": product.map(|p| p.to_json()),
            }),
            status,
        ),
    })
}

fn chain(g: &Global, b: &BallArgs, interior: bool) -> Outcome {
    let (p, _, graph) = ball(g, b)?;
    let sp = validate_special(&p)?;
    let mut export = cayley_complex_chain(&sp.relators, &graph)?;
    if interior {
        export = export.interior(&graph);
    }
    let exact = export.augmented_exactness()?;
    let hom = chain_homology(&export.chain_complex()?);
    let mut out = export.to_json(&graph);
    out["augmented_exactness"] = exact.to_json();
    out["homology"] = hom.to_json();
    Ok(Artifact::json(&out, OK))
}

fn homology(paths: &[std::path::PathBuf], augmented: bool) -> Outcome {
    let mats: Vec<IntMatrix> = paths
        .iter()
        .map(|p| Ok(IntMatrix::from_triplets(&read(p)?)?))
        .collect::<Result<_, Failure>>()?;
    let mut dims = vec![mats[0].rows()];
    dims.extend(mats.iter().map(|m| m.cols()));
    let cx = IntChainComplex::new(dims, mats.clone())?;
    let mut out = json!({ "dims": cx.dims, "homology": chain_homology(&cx).to_json() });
    let mut status = OK;
    if augmented {
        let mut aug = IntMatrix::zeros(1, mats[0].rows());
        for v in 0..mats[0].rows() {
            aug.set(0, v, BigInt::from(1));
        }
        let mut maps: Vec<IntMatrix> = mats.into_iter().rev().collect();
        maps.push(aug);
        let rep = exactness_check(&maps, true)?;
        if !rep.is_exact() {
            status = VERIFICATION_FAILED;
        }
        out["augmented_exactness"] = rep.to_json();
    }
    Ok(Artifact::new(pretty(&out), status))
}

fn verify_derivations(g: &Global, a: &GraphArgs, samples: usize) -> Outcome {
    let (gr, p) = graph(g, a)?;
    let pairs = gr.sample_pairs(samples, g.seed);
    let d = check_derivation_wellformed(&gr, &p, &pairs)?;
    let beta = check_beta_section(&gr)?;
    let ok = d.passed() && beta.passed();
    let mut notes = Vec::new();
    if d.unresolved > 0 || !beta.skipped.is_empty() {
        notes.push(json!({
            "code": "unknown",
            "subject": "terms outside the ball",
            "derivation_comparisons": d.unresolved,
            "section_edges": beta.skipped.len(),
        }));
    }
    let out = json!({
        "radius": gr.ball.radius,
        "seed": g.seed,
        "derivation": d.to_json(),
        "section": beta.to_json(),
        "unknowns": notes,
    });
    // comparisons with terms outside the ball are reported, not failed
    let status = if ok { OK } else { VERIFICATION_FAILED };
    Ok(Artifact::json(&out, status).with_notes(notes))
}
