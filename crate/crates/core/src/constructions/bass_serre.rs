//! Finite pieces of Bass–Serre trees (one-sided, vertices and edges are
//! weak orbits) and forests (two-sided, tensor classes).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::One;
use serde_json::json;

use super::derivation::{amalgam_derivation, op_derivation, DerivationSide, DerivationSpec, Term};
use super::quotient::{ElementBall, QuotientSide, QuotientTable, TensorTable};
use super::{amalgam_presentation, complete_system, otto_pride_presentation, AmalgamSpec, OttoPrideSpec};
use crate::error::Result;
use crate::graph::{component_count, components, first_cycle_edge};
use crate::homology::check_boundary_injective;
use crate::presentation::{Letter, Word};
use crate::{BigInt, IntMatrix};

#[derive(Clone, Debug)]
pub enum ClassTable {
    One(QuotientTable),
    Two(TensorTable),
}

impl ClassTable {
    pub fn len(&self) -> usize {
        match self {
            ClassTable::One(t) => t.len(),
            ClassTable::Two(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_interior(&self, class: usize) -> bool {
        match self {
            ClassTable::One(t) => t.interior[class],
            ClassTable::Two(t) => t.interior[class],
        }
    }

    pub fn is_complete(&self) -> bool {
        match self {
            ClassTable::One(t) => t.complete,
            ClassTable::Two(t) => t.complete,
        }
    }

    /// Representative as a pair of ball ids; one-sided classes use `(x, 1)`.
    pub fn representative(&self, class: usize, one: usize) -> (usize, usize) {
        match self {
            ClassTable::One(t) => (t.representative(class), one),
            ClassTable::Two(t) => t.representative(class),
        }
    }

    /// Members as pairs of ball ids.
    pub fn members(&self, class: usize, one: usize) -> Vec<(usize, usize)> {
        match self {
            ClassTable::One(t) => t.members[class].iter().map(|&x| (x, one)).collect(),
            ClassTable::Two(t) => t.members[class].iter().map(|&p| t.pairs[p]).collect(),
        }
    }

    pub fn class_of_ids(&self, x: usize, y: usize) -> Option<usize> {
        match self {
            ClassTable::One(t) => Some(t.class_of[x]),
            ClassTable::Two(t) => t.class_of_pair(x, y),
        }
    }

    /// Class of a term, if both words lie in the ball.
    pub fn resolve(&self, ball: &ElementBall, term: &Term) -> Result<Option<usize>> {
        let Some(x) = ball.id(&term.left)? else { return Ok(None) };
        match self {
            ClassTable::One(t) => Ok(Some(t.class_of[x])),
            ClassTable::Two(t) => Ok(ball.id(&term.right)?.and_then(|y| t.class_of_pair(x, y))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsVertex {
    /// Index into `BassSerreGraph::vertex_tables`.
    pub side: usize,
    pub class: usize,
    pub rep: Term,
    pub interior: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsEdge {
    pub class: usize,
    pub src: usize,
    pub dst: usize,
    pub rep: Term,
    pub interior: bool,
}

/// Which two-sided forest to build.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum ForestKind {
    Amalgam(AmalgamSpec),
    OttoPride(OttoPrideSpec),
}

#[derive(Clone, Debug)]
pub struct BassSerreGraph {
    pub kind: String,
    pub side: DerivationSide,
    pub ball: ElementBall,
    pub vertex_names: Vec<String>,
    pub vertex_tables: Vec<ClassTable>,
    pub edge_name: String,
    pub edge_table: ClassTable,
    pub vertices: Vec<BsVertex>,
    pub edges: Vec<BsEdge>,
    /// Edge classes whose members disagree on an endpoint, which means the
    /// ball has not merged enough.
    pub incidence_conflicts: Vec<String>,
    /// Boundary edge classes whose members disagree on endpoints; the
    /// truncated ball can miss the path joining them.
    pub boundary_conflicts: usize,
    /// Edge classes whose endpoints could not be located in the ball.
    pub unresolved_edges: Vec<String>,
    /// The derivation used for the left inverse of the boundary map.
    pub derivation: DerivationSpec,
    /// Vertex table whose vertices get `+[rep]` in the left inverse.
    pub beta_plus_side: Option<usize>,
}

/// Endpoints of an edge as pairs `(x, y)` in a vertex table.
type Incidence<'a> = dyn Fn(usize, usize) -> Result<Option<((usize, usize), (usize, usize))>> + 'a;

fn default_slack(p: &crate::presentation::Presentation) -> usize {
    2 * p.max_relation_len().max(1)
}

impl BassSerreGraph {
    fn vertex_index(&self) -> BTreeMap<(usize, usize), usize> {
        self.vertices.iter().enumerate().map(|(i, v)| ((v.side, v.class), i)).collect()
    }

    /// Interior edges with every vertex that is interior or an endpoint.
    pub fn interior_part(&self) -> (Vec<usize>, Vec<usize>) {
        let edges: Vec<usize> = (0..self.edges.len()).filter(|&e| self.edges[e].interior).collect();
        let mut vs: BTreeSet<usize> =
            (0..self.vertices.len()).filter(|&v| self.vertices[v].interior).collect();
        for &e in &edges {
            vs.insert(self.edges[e].src);
            vs.insert(self.edges[e].dst);
        }
        (vs.into_iter().collect(), edges)
    }

    /// Boundary map `ZE → ZV` on the interior part, rows indexing vertices.
    pub fn boundary_matrix(&self) -> IntMatrix {
        let (vs, es) = self.interior_part();
        let pos: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut m = IntMatrix::zeros(vs.len(), es.len());
        for (j, &e) in es.iter().enumerate() {
            let edge = &self.edges[e];
            m.add_to(pos[&edge.dst], j, BigInt::one());
            m.add_to(pos[&edge.src], j, -BigInt::one());
        }
        m
    }

    /// Acyclicity of the interior part two ways: union-find cycle search and
    /// exact rank of the boundary map.
    pub fn acyclicity(&self) -> AcyclicityCertificate {
        let (vs, es) = self.interior_part();
        let pos: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let pairs: Vec<(usize, usize)> =
            es.iter().map(|&e| (pos[&self.edges[e].src], pos[&self.edges[e].dst])).collect();
        let cycle = first_cycle_edge(vs.len(), &pairs);
        let inj = check_boundary_injective(&self.boundary_matrix());
        AcyclicityCertificate {
            radius: self.ball.radius,
            vertices: vs.len(),
            edges: es.len(),
            components: component_count(vs.len(), &pairs),
            search_acyclic: cycle.is_none(),
            cycle_edge: cycle.map(|i| self.render_term(&self.edges[es[i]].rep)),
            rank: inj.rank,
            rank_acyclic: inj.rank == es.len(),
        }
    }

    /// For forests: interior components against interior elements under
    /// the multiplication map.
    pub fn product_check(&self) -> Result<ProductCheck> {
        let (vs, es) = self.interior_part();
        let pos: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let pairs: Vec<(usize, usize)> =
            es.iter().map(|&e| (pos[&self.edges[e].src], pos[&self.edges[e].dst])).collect();
        let comp = components(vs.len(), &pairs);
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let one = self.one();
        let mut products: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncomp];
        let mut out = ProductCheck::default();
        for (i, &v) in vs.iter().enumerate() {
            let vert = &self.vertices[v];
            for (x, y) in self.vertex_tables[vert.side].members(vert.class, one) {
                match self.ball.id(&self.ball.word(x).concat(self.ball.word(y)))? {
                    Some(z) => {
                        products[comp[i]].insert(z);
                    }
                    None => out.unresolved += 1,
                }
            }
        }
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (c, ps) in products.iter().enumerate() {
            if ps.len() > 1 {
                out.non_constant.push(
                    ps.iter().map(|&z| self.ball.render(self.ball.word(z))).collect::<Vec<_>>().join(" | "),
                );
            }
            for &z in ps {
                if let Some(prev) = owner.insert(z, c) {
                    if prev != c {
                        out.collisions.push(self.ball.render(self.ball.word(z)));
                    }
                }
            }
        }
        for z in 0..self.ball.len() {
            if self.ball.is_interior(z) && !owner.contains_key(&z) {
                out.missing.push(self.ball.render(self.ball.word(z)));
            }
        }
        out.components = ncomp;
        out.exterior_components =
            products.iter().filter(|ps| ps.iter().all(|&z| !self.ball.is_interior(z))).count();
        out.elements = (0..self.ball.len()).filter(|&z| self.ball.is_interior(z)).count();
        Ok(out)
    }

    pub(crate) fn one(&self) -> usize {
        // the ball is grown from 1, which gets id 0
        0
    }

    pub fn render_term(&self, t: &Term) -> String {
        match self.side {
            DerivationSide::OneSided => format!("[{}]", self.ball.render(&t.left)),
            DerivationSide::TwoSided => {
                format!("[{}, {}]", self.ball.render(&t.left), self.ball.render(&t.right))
            }
        }
    }

    fn vertex_label(&self, v: &BsVertex) -> String {
        format!("{}{}", self.render_term(&v.rep), self.vertex_names[v.side])
    }

    pub fn to_dot(&self) -> String {
        let mut s = format!("graph bass_serre_{} {{\n", self.kind.replace('-', "_"));
        for (i, v) in self.vertices.iter().enumerate() {
            let style = if v.interior { "solid" } else { "dashed" };
            let _ = writeln!(s, "  {i} [label=\"{}\", style={style}];", self.vertex_label(v));
        }
        for e in &self.edges {
            let style = if e.interior { "solid" } else { "dashed" };
            let _ = writeln!(
                s,
                "  {} -- {} [label=\"{}{}\", style={style}];",
                e.src,
                e.dst,
                self.render_term(&e.rep),
                self.edge_name
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind,
            "radius": self.ball.radius,
            "slack": self.ball.slack,
            "elements": self.ball.len(),
            "vertices": self.vertices.iter().map(|v| json!({
                "label": self.vertex_label(v),
                "interior": v.interior,
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| json!({
                "label": format!("{}{}", self.render_term(&e.rep), self.edge_name),
                "src": e.src,
                "dst": e.dst,
                "interior": e.interior,
            })).collect::<Vec<_>>(),
            "incidence_conflicts": self.incidence_conflicts,
            "boundary_conflicts": self.boundary_conflicts,
            "unresolved_edges": self.unresolved_edges,
            "tables_complete": self.vertex_tables.iter().all(ClassTable::is_complete)
                && self.edge_table.is_complete(),
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: &str,
        side: DerivationSide,
        ball: ElementBall,
        vertex_names: Vec<String>,
        vertex_tables: Vec<ClassTable>,
        edge_name: String,
        edge_table: ClassTable,
        incidence: &Incidence<'_>,
        derivation: DerivationSpec,
        beta_plus_side: Option<usize>,
    ) -> Result<Self> {
        let one = 0;
        let mut vertices = Vec::new();
        for (s, t) in vertex_tables.iter().enumerate() {
            for c in 0..t.len() {
                let (x, y) = t.representative(c, one);
                vertices.push(BsVertex {
                    side: s,
                    class: c,
                    rep: Term::new(ball.word(x).clone(), ball.word(y).clone()),
                    interior: t.is_interior(c),
                });
            }
        }
        let mut g = BassSerreGraph {
            kind: kind.to_string(),
            side,
            ball,
            vertex_names,
            vertex_tables,
            edge_name,
            edge_table,
            vertices,
            edges: Vec::new(),
            incidence_conflicts: Vec::new(),
            boundary_conflicts: 0,
            unresolved_edges: Vec::new(),
            derivation,
            beta_plus_side,
        };
        let index = g.vertex_index();
        for c in 0..g.edge_table.len() {
            let members = g.edge_table.members(c, one);
            let mut ends: Option<((usize, usize), (usize, usize))> = None;
            let mut conflict = false;
            for &(x, y) in &members {
                let Some((s, d)) = incidence(x, y)? else { continue };
                let found = (s, d);
                match ends {
                    None => ends = Some(found),
                    Some(e) if e != found => conflict = true,
                    _ => {}
                }
            }
            let (x, y) = members[0];
            let rep = Term::new(g.ball.word(x).clone(), g.ball.word(y).clone());
            if conflict && g.edge_table.is_interior(c) {
                g.incidence_conflicts.push(g.render_term(&rep));
            } else if conflict {
                g.boundary_conflicts += 1;
            }
            match ends {
                Some((s, d)) => g.edges.push(BsEdge {
                    class: c,
                    src: index[&s],
                    dst: index[&d],
                    rep,
                    interior: g.edge_table.is_interior(c),
                }),
                None => g.unresolved_edges.push(g.render_term(&rep)),
            }
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicityCertificate {
    pub radius: usize,
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub search_acyclic: bool,
    pub cycle_edge: Option<String>,
    pub rank: usize,
    pub rank_acyclic: bool,
}

impl AcyclicityCertificate {
    pub fn agree(&self) -> bool {
        self.search_acyclic == self.rank_acyclic
    }

    pub fn is_tree(&self) -> bool {
        self.search_acyclic && self.rank_acyclic && self.components == 1
    }

    pub fn is_forest(&self) -> bool {
        self.search_acyclic && self.rank_acyclic
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "radius": self.radius,
            "vertices": self.vertices,
            "edges": self.edges,
            "components": self.components,
            "search_acyclic": self.search_acyclic,
            "cycle_edge": self.cycle_edge,
            "rank": self.rank,
            "rank_acyclic": self.rank_acyclic,
            "agree": self.agree(),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProductCheck {
    pub components: usize,
    /// Components whose products all lie outside the interior.
    pub exterior_components: usize,
    pub elements: usize,
    /// Components whose vertices multiply to more than one element.
    pub non_constant: Vec<String>,
    /// Elements reached from more than one component.
    pub collisions: Vec<String>,
    /// Interior elements no component reaches.
    pub missing: Vec<String>,
    pub unresolved: usize,
}

impl ProductCheck {
    pub fn is_bijection(&self) -> bool {
        self.non_constant.is_empty() && self.collisions.is_empty() && self.missing.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "components": self.components,
            "exterior_components": self.exterior_components,
            "elements": self.elements,
            "non_constant": self.non_constant,
            "collisions": self.collisions,
            "missing": self.missing,
            "unresolved": self.unresolved,
            "bijection": self.is_bijection(),
        })
    }
}

fn letters_as_words(letters: &[Letter]) -> Vec<Word> {
    letters.iter().map(|&a| Word::letter(a)).collect()
}

/// Vertices `L/M₁ ⊔ L/M₂`, edges `L/W`; the edge `[x]` joins `[x]_{M₁}` to
/// `[x]_{M₂}`.
pub fn bass_serre_ball_amalgam(
    spec: &AmalgamSpec,
    radius: usize,
    slack: Option<usize>,
    budget: u64,
) -> Result<BassSerreGraph> {
    let am = amalgam_presentation(spec, budget)?;
    let sys = complete_system(&am.presentation, budget)?;
    let slack = slack.unwrap_or_else(|| default_slack(&am.presentation));
    let ball = ElementBall::new(sys, radius, slack)?;
    let q1 = QuotientTable::build(&ball, QuotientSide::new("M1", letters_as_words(&am.embed1)), budget)?;
    let q2 = QuotientTable::build(&ball, QuotientSide::new("M2", letters_as_words(&am.embed2)), budget)?;
    let qw = QuotientTable::build(&ball, QuotientSide::new("W", am.edge_generators.clone()), budget)?;
    let (c1, c2) = (q1.class_of.clone(), q2.class_of.clone());
    let incidence = move |x: usize, _y: usize| Ok(Some(((0, c1[x]), (1, c2[x]))));
    let derivation = amalgam_derivation(&am, DerivationSide::OneSided);
    BassSerreGraph::assemble(
        "amalgam",
        DerivationSide::OneSided,
        ball,
        vec!["_M1".into(), "_M2".into()],
        vec![ClassTable::One(q1), ClassTable::One(q2)],
        "_W".into(),
        ClassTable::One(qw),
        &incidence,
        derivation,
        Some(1),
    )
}

/// Vertices `L/M`, edges `L/A`; the edge `[x]` joins `[x]_M` to `[xt]_M`.
pub fn bass_serre_ball_op(
    spec: &OttoPrideSpec,
    radius: usize,
    slack: Option<usize>,
    budget: u64,
) -> Result<BassSerreGraph> {
    let op = otto_pride_presentation(spec, budget)?;
    let sys = complete_system(&op.presentation, budget)?;
    let slack = slack.unwrap_or_else(|| default_slack(&op.presentation));
    let ball = ElementBall::new(sys, radius, slack)?;
    let m_letters: Vec<Letter> = (0..spec.m.alphabet.len() as Letter).collect();
    let qm = QuotientTable::build(&ball, QuotientSide::new("M", letters_as_words(&m_letters)), budget)?;
    let qa = QuotientTable::build(&ball, QuotientSide::new("A", spec.a_gens.clone()), budget)?;
    let t = Word::letter(op.t);
    let mut xt = Vec::with_capacity(ball.len());
    for x in 0..ball.len() {
        xt.push(ball.mul(x, &t)?);
    }
    let cm = qm.class_of.clone();
    let incidence = move |x: usize, _y: usize| Ok(xt[x].map(|y| ((0, cm[x]), (0, cm[y]))));
    let derivation = op_derivation(op.t, op.presentation.alphabet.len(), DerivationSide::OneSided);
    BassSerreGraph::assemble(
        "otto-pride",
        DerivationSide::OneSided,
        ball,
        vec!["_M".into()],
        vec![ClassTable::One(qm)],
        "_A".into(),
        ClassTable::One(qa),
        &incidence,
        derivation,
        None,
    )
}

/// Two-sided forest on tensor classes of pairs from the ball.
pub fn bass_serre_forest_bi(
    kind: &ForestKind,
    radius: usize,
    slack: Option<usize>,
    budget: u64,
) -> Result<BassSerreGraph> {
    match kind {
        ForestKind::Amalgam(spec) => {
            let am = amalgam_presentation(spec, budget)?;
            let sys = complete_system(&am.presentation, budget)?;
            let slack = slack.unwrap_or_else(|| default_slack(&am.presentation));
            let ball = ElementBall::new(sys, radius, slack)?;
            let g1 = letters_as_words(&am.embed1);
            let g2 = letters_as_words(&am.embed2);
            let t1 = TensorTable::build(&ball, "M1", &g1, &g1, budget)?;
            let t2 = TensorTable::build(&ball, "M2", &g2, &g2, budget)?;
            let tw = TensorTable::build(&ball, "W", &am.edge_generators, &am.edge_generators, budget)?;
            let (a, b) = (t1.clone(), t2.clone());
            let incidence = move |x: usize, y: usize| {
                Ok(match (a.class_of_pair(x, y), b.class_of_pair(x, y)) {
                    (Some(c), Some(d)) => Some(((0, c), (1, d))),
                    _ => None,
                })
            };
            BassSerreGraph::assemble(
                "amalgam-forest",
                DerivationSide::TwoSided,
                ball,
                vec!["_M1".into(), "_M2".into()],
                vec![ClassTable::Two(t1), ClassTable::Two(t2)],
                "_W".into(),
                ClassTable::Two(tw),
                &incidence,
                amalgam_derivation(&am, DerivationSide::TwoSided),
                Some(1),
            )
        }
        ForestKind::OttoPride(spec) => {
            let op = otto_pride_presentation(spec, budget)?;
            let sys = complete_system(&op.presentation, budget)?;
            let slack = slack.unwrap_or_else(|| default_slack(&op.presentation));
            let ball = ElementBall::new(sys, radius, slack)?;
            let m_letters: Vec<Letter> = (0..spec.m.alphabet.len() as Letter).collect();
            let gm = letters_as_words(&m_letters);
            let tm = TensorTable::build(&ball, "M", &gm, &gm, budget)?;
            let ta = TensorTable::build(&ball, "A", &spec.a_gens, &spec.phi, budget)?;
            let t = Word::letter(op.t);
            let mut xt = Vec::with_capacity(ball.len());
            let mut ty = Vec::with_capacity(ball.len());
            for x in 0..ball.len() {
                xt.push(ball.mul(x, &t)?);
                ty.push(ball.lmul(&t, x)?);
            }
            let m = tm.clone();
            // [x, y]_A joins [x, ty]_M to [xt, y]_M
            let incidence = move |x: usize, y: usize| {
                let src = ty[y].and_then(|ty| m.class_of_pair(x, ty));
                let dst = xt[x].and_then(|xt| m.class_of_pair(xt, y));
                Ok(match (src, dst) {
                    (Some(s), Some(d)) => Some(((0, s), (0, d))),
                    _ => None,
                })
            };
            BassSerreGraph::assemble(
                "otto-pride-forest",
                DerivationSide::TwoSided,
                ball,
                vec!["_M".into()],
                vec![ClassTable::Two(tm)],
                "_A".into(),
                ClassTable::Two(ta),
                &incidence,
                op_derivation(op.t, op.presentation.alphabet.len(), DerivationSide::TwoSided),
                None,
            )
        }
    }
}
