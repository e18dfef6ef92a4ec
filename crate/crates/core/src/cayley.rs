//! Bounded balls in the right Cayley digraph, their strong components and
//! the cellular chain complex obtained by filling relator loops.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::Zero;
use serde_json::json;

use crate::error::Result;
use crate::graph::{first_cycle_edge, rooted_tree_code, strongly_connected};
use crate::homology::{exactness_check, ExactnessReport};
use crate::presentation::{Alphabet, Letter, Presentation, Word};
use crate::rewriting::{NormalFormSolver, Verdict};
use crate::special::UnitsAnalysis;
use crate::{BigInt, IntChainComplex, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: usize,
    /// Normal form of the element.
    pub label: Word,
    pub distance: usize,
    pub interior: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub src: usize,
    pub dst: usize,
    pub letter: Letter,
}

/// Ball of radius `radius` around 1 in the right Cayley digraph. A vertex is
/// interior when its distance is at most `radius - margin`.
#[derive(Clone, Debug)]
pub struct LabeledDigraph {
    pub alphabet: Alphabet,
    pub vertices: Vec<Vertex>,
    pub arcs: Vec<Arc>,
    pub radius: usize,
    pub margin: usize,
}

/// Longest relation side, the default interior margin.
pub fn default_margin(p: &Presentation) -> usize {
    p.max_relation_len()
}

/// Breadth-first search from 1; letters are tried in alphabet order, so
/// ids follow the shortlex order of the first word reaching each vertex.
/// Every arc whose target lies in the ball is kept, including arcs leaving
/// the outermost layer.
pub fn cayley_ball(
    solver: &dyn NormalFormSolver,
    radius: usize,
    margin: usize,
) -> Result<LabeledDigraph> {
    let alphabet = solver.alphabet().clone();
    let letters = alphabet.ordered();
    let root = solver.normal_form(&Word::empty())?;
    let mut index: HashMap<Word, usize> = HashMap::new();
    let mut vertices = vec![Vertex { id: 0, label: root.clone(), distance: 0, interior: false }];
    index.insert(root, 0);
    let mut arcs = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let (label, dist) = (vertices[v].label.clone(), vertices[v].distance);
        for &a in &letters {
            let mut w = label.clone();
            w.push(a);
            let nf = solver.normal_form(&w)?;
            let dst = match index.get(&nf) {
                Some(&d) => d,
                None if dist < radius => {
                    let id = vertices.len();
                    index.insert(nf.clone(), id);
                    vertices.push(Vertex { id, label: nf, distance: dist + 1, interior: false });
                    queue.push_back(id);
                    id
                }
                None => continue,
            };
            arcs.push(Arc { src: v, dst, letter: a });
        }
    }
    for v in &mut vertices {
        v.interior = v.distance + margin <= radius;
    }
    Ok(LabeledDigraph { alphabet, vertices, arcs, radius, margin })
}

impl LabeledDigraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn find(&self, label: &Word) -> Option<usize> {
        self.vertices.iter().position(|v| &v.label == label)
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.vertices.len()];
        for a in &self.arcs {
            succ[a.src].push(a.dst);
        }
        succ
    }

    /// Target of the arc leaving `v` with `letter`, when it is in the ball.
    pub fn step(&self, v: usize, letter: Letter) -> Option<usize> {
        self.arcs.iter().find(|a| a.src == v && a.letter == letter).map(|a| a.dst)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "radius": self.radius,
            "margin": self.margin,
            "vertices": self.vertices.iter().map(|v| json!({
                "id": v.id,
                "label": self.alphabet.render(&v.label),
                "distance": v.distance,
                "interior": v.interior,
            })).collect::<Vec<_>>(),
            "arcs": self.arcs.iter().map(|a| json!({
                "src": a.src,
                "dst": a.dst,
                "letter": self.alphabet.name(a.letter),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph cayley {\n");
        for v in &self.vertices {
            let shape = if v.interior { "ellipse" } else { "box" };
            let _ = writeln!(s, "  {} [label=\"{}\", shape={shape}];", v.id, self.alphabet.render(&v.label));
        }
        for a in &self.arcs {
            let _ = writeln!(s, "  {} -> {} [label=\"{}\"];", a.src, a.dst, self.alphabet.name(a.letter));
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntranceViolation {
    pub scc: usize,
    /// Representative vertex of the component.
    pub vertex: usize,
    /// Arcs entering the component from elsewhere.
    pub entering: Vec<Arc>,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct CondensationReport {
    pub sccs: Vec<Vec<usize>>,
    pub scc_of: Vec<usize>,
    /// Arcs between distinct components as `(src scc, dst scc, letter)`.
    pub dag_arcs: Vec<(usize, usize, Letter)>,
    /// Components containing at least one interior vertex.
    pub interior: Vec<bool>,
    /// Components made only of boundary vertices; left out of the checks.
    pub partial_sccs: Vec<usize>,
    pub root: usize,
    pub is_tree: Verdict,
    pub entrance_violations: Vec<EntranceViolation>,
}

pub fn scc_condense(g: &LabeledDigraph) -> CondensationReport {
    let (scc_of, sccs) = strongly_connected(g.len(), &g.successors());
    let dag: BTreeSet<(usize, usize, Letter)> = g
        .arcs
        .iter()
        .filter(|a| scc_of[a.src] != scc_of[a.dst])
        .map(|a| (scc_of[a.src], scc_of[a.dst], a.letter))
        .collect();
    let interior: Vec<bool> =
        sccs.iter().map(|c| c.iter().any(|&v| g.vertices[v].interior)).collect();
    let partial_sccs = (0..sccs.len()).filter(|&c| !interior[c]).collect();
    let root = if g.is_empty() { 0 } else { scc_of[0] };
    let mut rep = CondensationReport {
        sccs,
        scc_of,
        dag_arcs: dag.into_iter().collect(),
        interior,
        partial_sccs,
        root,
        is_tree: Verdict::unknown(0),
        entrance_violations: Vec::new(),
    };
    rep.is_tree = check_rooted_tree(&rep);
    rep.entrance_violations = check_unique_entrance(g, &rep, None);
    rep
}

impl CondensationReport {
    pub fn interior_sccs(&self) -> Vec<usize> {
        (0..self.sccs.len()).filter(|&c| self.interior[c]).collect()
    }

    fn interior_dag_arcs(&self) -> Vec<(usize, usize, Letter)> {
        self.dag_arcs
            .iter()
            .copied()
            .filter(|&(s, d, _)| self.interior[s] && self.interior[d])
            .collect()
    }

    /// Parent of each interior component along its entering arc, indexed
    /// like `interior_sccs`; `None` unless the interior part is a tree.
    pub fn interior_tree(&self) -> Option<Vec<Option<usize>>> {
        if !self.is_tree.is_proven() {
            return None;
        }
        let ids = self.interior_sccs();
        let pos: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut parent = vec![None; ids.len()];
        for (s, d, _) in self.interior_dag_arcs() {
            parent[pos[&d]] = Some(pos[&s]);
        }
        Some(parent)
    }

    pub fn to_json(&self, g: &LabeledDigraph) -> serde_json::Value {
        json!({
            "sccs": self.sccs.iter().map(|c| json!({
                "vertices": c,
                "labels": c.iter().map(|&v| g.alphabet.render(&g.vertices[v].label)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "dag_arcs": self.dag_arcs.iter().map(|&(s, d, a)| json!({
                "src": s, "dst": d, "letter": g.alphabet.name(a),
            })).collect::<Vec<_>>(),
            "root": self.root,
            "interior_sccs": self.interior_sccs(),
            "partial_sccs": self.partial_sccs,
            "is_tree": self.is_tree.value,
            "entrance_violations": self.entrance_violations.iter().map(|v| json!({
                "scc": v.scc,
                "vertex": g.alphabet.render(&g.vertices[v.vertex].label),
                "entering": v.entering.iter().map(|a| format!(
                    "{} -{}-> {}",
                    g.alphabet.render(&g.vertices[a.src].label),
                    g.alphabet.name(a.letter),
                    g.alphabet.render(&g.vertices[a.dst].label),
                )).collect::<Vec<_>>(),
                "reason": v.reason,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_dot(&self, g: &LabeledDigraph) -> String {
        let mut s = String::from("digraph condensation {\n");
        for (c, members) in self.sccs.iter().enumerate() {
            let label = g.alphabet.render(&g.vertices[members[0]].label);
            let style = if self.interior[c] { "solid" } else { "dashed" };
            let _ = writeln!(s, "  {c} [label=\"[{label}] ({})\", style={style}];", members.len());
        }
        for &(a, b, l) in &self.dag_arcs {
            let _ = writeln!(s, "  {a} -> {b} [label=\"{}\"];", g.alphabet.name(l));
        }
        s.push_str("}\n");
        s
    }
}

/// Rooted tree test on the interior part of the condensation: connected,
/// no undirected cycle (parallel arcs count as one), the root has no
/// entering arc and every other component exactly one.
pub fn check_rooted_tree(rep: &CondensationReport) -> Verdict {
    let ids = rep.interior_sccs();
    if ids.len() < 2 {
        return Verdict::unknown(0);
    }
    let pos: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let arcs = rep.interior_dag_arcs();
    let mut indegree = vec![0usize; ids.len()];
    let mut edges = Vec::new();
    for &(s, d, _) in &arcs {
        indegree[pos[&d]] += 1;
        edges.push((pos[&s], pos[&d]));
    }
    let rooted = rep.interior[rep.root]
        && indegree[pos[&rep.root]] == 0
        && ids.iter().all(|&c| c == rep.root || indegree[pos[&c]] == 1);
    let tree = edges.len() + 1 == ids.len() && first_cycle_edge(ids.len(), &edges).is_none();
    if rooted && tree {
        Verdict::proven(None, arcs.len() as u64)
    } else {
        Verdict::refuted(arcs.len() as u64)
    }
}

/// Every interior component other than the root must be entered by exactly
/// one arc. With an analysis, that arc must also end at a vertex whose label
/// is its own transversal part.
pub fn check_unique_entrance(
    g: &LabeledDigraph,
    rep: &CondensationReport,
    ua: Option<&UnitsAnalysis>,
) -> Vec<EntranceViolation> {
    let mut entering: BTreeMap<usize, Vec<Arc>> = BTreeMap::new();
    for a in &g.arcs {
        let (s, d) = (rep.scc_of[a.src], rep.scc_of[a.dst]);
        if s != d {
            entering.entry(d).or_default().push(*a);
        }
    }
    let mut out = Vec::new();
    for c in rep.interior_sccs() {
        if c == rep.root {
            continue;
        }
        let arcs = entering.remove(&c).unwrap_or_default();
        let vertex = rep.sccs[c][0];
        if arcs.len() != 1 {
            out.push(EntranceViolation {
                scc: c,
                vertex,
                reason: format!("{} entering arcs", arcs.len()),
                entering: arcs,
            });
            continue;
        }
        if let Some(ua) = ua {
            let target = &g.vertices[arcs[0].dst].label;
            match ua.transversal_part(target) {
                Ok(w) if &w == target => {}
                Ok(w) => out.push(EntranceViolation {
                    scc: c,
                    vertex: arcs[0].dst,
                    reason: format!("entering arc ends outside the transversal (w-part {})", ua.render(&w)),
                    entering: arcs,
                }),
                Err(e) => out.push(EntranceViolation {
                    scc: c,
                    vertex: arcs[0].dst,
                    reason: e.to_string(),
                    entering: arcs,
                }),
            }
        }
    }
    out
}

/// Hasse diagram of the prefix order on a set of words: the parent of a
/// word is its longest proper prefix in the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixTree {
    pub nodes: Vec<Word>,
    pub parent: Vec<Option<usize>>,
}

impl PrefixTree {
    pub fn from_words(words: impl IntoIterator<Item = Word>, alphabet: &Alphabet) -> Self {
        let mut nodes: Vec<Word> = words.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        nodes.sort_by(|a, b| alphabet.shortlex(a, b));
        let parent = nodes
            .iter()
            .map(|w| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.len() < w.len() && p.is_prefix_of(w))
                    .max_by_key(|(_, p)| p.len())
                    .map(|(i, _)| i)
            })
            .collect();
        PrefixTree { nodes, parent }
    }

    pub fn code(&self) -> Option<String> {
        rooted_tree_code(&self.parent)
    }

    pub fn to_digraph(&self, alphabet: &Alphabet) -> LabeledDigraph {
        let vertices = self
            .nodes
            .iter()
            .enumerate()
            .map(|(id, w)| Vertex { id, label: w.clone(), distance: w.len(), interior: true })
            .collect();
        let arcs = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                p.map(|p| Arc { src: p, dst: i, letter: self.nodes[i].letters()[self.nodes[p].len()] })
            })
            .collect();
        LabeledDigraph { alphabet: alphabet.clone(), vertices, arcs, radius: 0, margin: 0 }
    }
}

/// Prefix tree on the transversal parts of the interior ball labels.
pub fn hasse_prefix_tree(ua: &UnitsAnalysis, g: &LabeledDigraph) -> Result<PrefixTree> {
    let mut parts = Vec::new();
    for v in g.vertices.iter().filter(|v| v.interior) {
        parts.push(ua.transversal_part(&v.label)?);
    }
    Ok(PrefixTree::from_words(parts, ua.alphabet()))
}

/// Whether the interior condensation and the prefix tree are isomorphic as
/// rooted trees. Unknown when the condensation is not a proven tree.
pub fn condensation_matches_prefix_tree(rep: &CondensationReport, tree: &PrefixTree) -> Verdict {
    match rep.interior_tree() {
        Some(parent) if rooted_tree_code(&parent) == tree.code() => Verdict::proven(None, 0),
        Some(_) => Verdict::refuted(0),
        None => Verdict::unknown(0),
    }
}

/// Cellular chains of the ball with one 2-cell for every vertex and
/// relator whose loop closes inside the ball. Matrices are codomain by
/// domain: `boundary1` is vertices × edges, `boundary2` edges × cells.
#[derive(Clone, Debug)]
pub struct ChainComplexExport {
    pub vertices: Vec<usize>,
    /// Ball arc indices.
    pub edges: Vec<usize>,
    /// `(base vertex, relator index)` per 2-cell.
    pub cells: Vec<(usize, usize)>,
    pub boundary1: IntMatrix,
    pub boundary2: IntMatrix,
    /// `1 × vertices` row of ones.
    pub augmentation: IntMatrix,
    /// Loops that left the ball, as `(base vertex, relator index)`.
    pub skipped: Vec<(usize, usize)>,
}

/// Arc indices along the path reading `w` from `start`, if it stays inside.
fn trace_path(g: &LabeledDigraph, lookup: &HashMap<(usize, Letter), usize>, start: usize, w: &Word) -> Option<(Vec<usize>, usize)> {
    let mut at = start;
    let mut path = Vec::with_capacity(w.len());
    for &a in w.letters() {
        let e = *lookup.get(&(at, a))?;
        path.push(e);
        at = g.arcs[e].dst;
    }
    Some((path, at))
}

pub fn cayley_complex_chain(relators: &[Word], g: &LabeledDigraph) -> Result<ChainComplexExport> {
    let lookup: HashMap<(usize, Letter), usize> =
        g.arcs.iter().enumerate().map(|(i, a)| ((a.src, a.letter), i)).collect();
    let mut cells = Vec::new();
    let mut paths = Vec::new();
    let mut skipped = Vec::new();
    for v in 0..g.len() {
        for (k, r) in relators.iter().enumerate() {
            match trace_path(g, &lookup, v, r) {
                Some((path, end)) if end == v => {
                    cells.push((v, k));
                    paths.push(path);
                }
                // a relator path that ends elsewhere cannot happen for a
                // correct solver; treat it like a loop we could not close
                _ => skipped.push((v, k)),
            }
        }
    }
    let (nv, ne, nf) = (g.len(), g.arcs.len(), cells.len());
    let mut boundary1 = IntMatrix::zeros(nv, ne);
    for (i, a) in g.arcs.iter().enumerate() {
        boundary1.add_to(a.dst, i, BigInt::from(1));
        boundary1.add_to(a.src, i, BigInt::from(-1));
    }
    let mut boundary2 = IntMatrix::zeros(ne, nf);
    for (j, path) in paths.iter().enumerate() {
        for &e in path {
            boundary2.add_to(e, j, BigInt::from(1));
        }
    }
    let mut augmentation = IntMatrix::zeros(1, nv);
    for v in 0..nv {
        augmentation.set(0, v, BigInt::from(1));
    }
    let export = ChainComplexExport {
        vertices: (0..nv).collect(),
        edges: (0..ne).collect(),
        cells,
        boundary1,
        boundary2,
        augmentation,
        skipped,
    };
    // validates the composite
    export.chain_complex()?;
    Ok(export)
}

impl ChainComplexExport {
    /// `C_2 → C_1 → C_0` with `dims = [vertices, edges, cells]`.
    pub fn chain_complex(&self) -> Result<IntChainComplex> {
        IntChainComplex::new(
            vec![self.vertices.len(), self.edges.len(), self.cells.len()],
            vec![self.boundary1.clone(), self.boundary2.clone()],
        )
    }

    pub fn composite_is_zero(&self) -> bool {
        self.boundary1.mul(&self.boundary2).map(|m| m.is_zero()).unwrap_or(false)
    }

    /// Keep the given vertices, the edges between them and the cells whose
    /// edges all survive.
    pub fn restrict(&self, g: &LabeledDigraph, keep: &[usize]) -> ChainComplexExport {
        let kept: BTreeSet<usize> = keep.iter().copied().collect();
        let vrows: Vec<usize> =
            self.vertices.iter().enumerate().filter(|(_, v)| kept.contains(v)).map(|(i, _)| i).collect();
        let ecols: Vec<usize> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, &e)| kept.contains(&g.arcs[e].src) && kept.contains(&g.arcs[e].dst))
            .map(|(i, _)| i)
            .collect();
        let ecol_set: BTreeSet<usize> = ecols.iter().copied().collect();
        let fcols: Vec<usize> = (0..self.cells.len())
            .filter(|&j| {
                (0..self.edges.len()).all(|i| self.boundary2.get(i, j).is_zero() || ecol_set.contains(&i))
                    && kept.contains(&self.cells[j].0)
            })
            .collect();
        ChainComplexExport {
            vertices: vrows.iter().map(|&i| self.vertices[i]).collect(),
            edges: ecols.iter().map(|&i| self.edges[i]).collect(),
            cells: fcols.iter().map(|&j| self.cells[j]).collect(),
            boundary1: self.boundary1.submatrix(&vrows, &ecols),
            boundary2: self.boundary2.submatrix(&ecols, &fcols),
            augmentation: self.augmentation.submatrix(&[0], &vrows),
            skipped: self.skipped.clone(),
        }
    }

    /// Subcomplex spanned by the interior vertices.
    pub fn interior(&self, g: &LabeledDigraph) -> ChainComplexExport {
        let keep: Vec<usize> = g.vertices.iter().filter(|v| v.interior).map(|v| v.id).collect();
        self.restrict(g, &keep)
    }

    /// Exactness of `C_2 → C_1 → C_0 → Z → 0` at `C_1`, `C_0` and `Z`.
    /// `C_2` itself is not examined: cells are not independent when the
    /// relator is a proper power.
    pub fn augmented_exactness(&self) -> Result<ExactnessReport<BigInt>> {
        exactness_check(
            &[self.boundary2.clone(), self.boundary1.clone(), self.augmentation.clone()],
            false,
        )
    }

    pub fn to_json(&self, g: &LabeledDigraph) -> serde_json::Value {
        json!({
            "vertices": self.vertices.len(),
            "edges": self.edges.len(),
            "cells": self.cells.iter().map(|&(v, k)| json!({
                "base": g.alphabet.render(&g.vertices[v].label), "relator": k,
            })).collect::<Vec<_>>(),
            "skipped": self.skipped.iter().map(|&(v, k)| json!({
                "base": g.alphabet.render(&g.vertices[v].label), "relator": k,
            })).collect::<Vec<_>>(),
            "boundary1": self.boundary1.to_triplets(),
            "boundary2": self.boundary2.to_triplets(),
            "augmentation": self.augmentation.to_triplets(),
            "composite_zero": self.composite_is_zero(),
        })
    }
}
