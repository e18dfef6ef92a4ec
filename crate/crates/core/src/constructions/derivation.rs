//! Derivations into the edge module and the left inverse of the boundary
//! map built from them. Values are formal sums of explicit terms; they are
//! resolved into edge classes only when compared.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::bass_serre::BassSerreGraph;
use super::Amalgam;
use crate::error::Result;
use crate::presentation::{Letter, Presentation, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivationSide {
    /// `d(xy) = d(x) + x·d(y)` into a left module.
    OneSided,
    /// `d(xy) = x·d(y) + d(x)·y` into a bimodule.
    TwoSided,
}

/// `[left]` or `[left, right]`; one-sided terms keep `right` empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub left: Word,
    pub right: Word,
}

impl Term {
    pub fn new(left: Word, right: Word) -> Self {
        Term { left, right }
    }

    pub fn one() -> Self {
        Term::new(Word::empty(), Word::empty())
    }
}

/// Finite integer combination of terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSum {
    pub terms: BTreeMap<Term, i64>,
}

impl FormalSum {
    pub fn zero() -> Self {
        FormalSum::default()
    }

    pub fn term(t: Term, c: i64) -> Self {
        let mut s = FormalSum::zero();
        s.add_term(t, c);
        s
    }

    pub fn add_term(&mut self, t: Term, c: i64) {
        let e = self.terms.entry(t.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&t);
        }
    }

    pub fn add(&mut self, other: &FormalSum, sign: i64) {
        for (t, &c) in &other.terms {
            self.add_term(t.clone(), sign * c);
        }
    }

    /// `x·s`.
    pub fn left_mul(&self, x: &Word) -> FormalSum {
        let mut out = FormalSum::zero();
        for (t, &c) in &self.terms {
            out.add_term(Term::new(x.concat(&t.left), t.right.clone()), c);
        }
        out
    }

    /// `s·y`; only meaningful for two-sided terms.
    pub fn right_mul(&self, y: &Word) -> FormalSum {
        let mut out = FormalSum::zero();
        for (t, &c) in &self.terms {
            out.add_term(Term::new(t.left.clone(), t.right.concat(y)), c);
        }
        out
    }
}

/// Sparse integer combination of edge classes.
pub type Chain = BTreeMap<usize, i64>;

/// Images of the generators of `L`; extended to words by the derivation rule.
#[derive(Clone, Debug)]
pub struct DerivationSpec {
    pub side: DerivationSide,
    pub images: Vec<FormalSum>,
}

impl DerivationSpec {
    /// Fold the rule over the letters of `w`.
    pub fn eval(&self, w: &Word) -> FormalSum {
        let mut out = FormalSum::zero();
        for (i, &a) in w.letters().iter().enumerate() {
            let img = &self.images[a as usize];
            if img.terms.is_empty() {
                continue;
            }
            let mut piece = img.left_mul(&w.prefix(i));
            if self.side == DerivationSide::TwoSided {
                piece = piece.right_mul(&w.suffix_from(i + 1));
            }
            out.add(&piece, 1);
        }
        out
    }
}

/// `d` vanishes on `M₁`; on a generator `y` of `M₂` it is `[1] - [y]`
/// (one-sided) or `[1, y] - [y, 1]` (two-sided).
pub fn amalgam_derivation(am: &Amalgam, side: DerivationSide) -> DerivationSpec {
    let n = am.presentation.alphabet.len();
    let mut images = vec![FormalSum::zero(); n];
    for &y in &am.embed2 {
        let yw = Word::letter(y);
        let mut s = FormalSum::zero();
        match side {
            DerivationSide::OneSided => {
                s.add_term(Term::one(), 1);
                s.add_term(Term::new(yw, Word::empty()), -1);
            }
            DerivationSide::TwoSided => {
                s.add_term(Term::new(Word::empty(), yw.clone()), 1);
                s.add_term(Term::new(yw, Word::empty()), -1);
            }
        }
        images[y as usize] = s;
    }
    DerivationSpec { side, images }
}

/// `d` vanishes on `M` and sends `t` to `[1]` or `[1, 1]`.
pub fn op_derivation(t: Letter, letters: usize, side: DerivationSide) -> DerivationSpec {
    let mut images = vec![FormalSum::zero(); letters];
    images[t as usize] = FormalSum::term(Term::one(), 1);
    DerivationSpec { side, images }
}

impl BassSerreGraph {
    /// Resolve terms into edge classes; unresolved terms are returned apart.
    pub fn resolve(&self, s: &FormalSum) -> Result<(Chain, Vec<Term>)> {
        let mut chain = Chain::new();
        let mut unresolved = Vec::new();
        for (t, &c) in &s.terms {
            match self.edge_table.resolve(&self.ball, t)? {
                Some(e) => {
                    let v = chain.entry(e).or_insert(0);
                    *v += c;
                    if *v == 0 {
                        chain.remove(&e);
                    }
                }
                None => unresolved.push(t.clone()),
            }
        }
        Ok((chain, unresolved))
    }

    fn render_chain(&self, c: &Chain) -> String {
        if c.is_empty() {
            return "0".into();
        }
        c.iter()
            .map(|(&e, &k)| {
                let (x, y) = self.edge_table.representative(e, self.one());
                let t = Term::new(self.ball.word(x).clone(), self.ball.word(y).clone());
                format!("{k:+}{}", self.render_term(&t))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Pairs `(x, y)` of ball ids with `|x| + |y|` at most the radius,
    /// sampled with replacement from a seeded generator.
    pub fn sample_pairs(&self, n: usize, seed: u64) -> Vec<(usize, usize)> {
        let ball = &self.ball;
        let mut all = Vec::new();
        for x in 0..ball.len() {
            for y in 0..ball.len() {
                if ball.length(x) + ball.length(y) <= ball.radius {
                    all.push((x, y));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).filter_map(|_| all.choose(&mut rng).copied()).collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct DerivationReport {
    pub relations_checked: usize,
    pub pairs_checked: usize,
    pub failures: Vec<String>,
    /// Comparisons skipped because a term left the ball.
    pub unresolved: usize,
}

impl DerivationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "relations_checked": self.relations_checked,
            "pairs_checked": self.pairs_checked,
            "failures": self.failures,
            "unresolved": self.unresolved,
            "passed": self.passed(),
        })
    }
}

/// Compare the derivation on both sides of every defining relation (also
/// after left multiplication by interior contexts) and check the
/// derivation rule on the sampled pairs, using the normal form of `xy`.
pub fn check_derivation_wellformed(
    g: &BassSerreGraph,
    relations: &Presentation,
    samples: &[(usize, usize)],
) -> Result<DerivationReport> {
    let d = &g.derivation;
    let ball = &g.ball;
    let mut rep = DerivationReport::default();
    let compare = |rep: &mut DerivationReport, lhs: &FormalSum, rhs: &FormalSum, what: String| -> Result<()> {
        let (a, ua) = g.resolve(lhs)?;
        let (b, ub) = g.resolve(rhs)?;
        if !ua.is_empty() || !ub.is_empty() {
            rep.unresolved += 1;
        } else if a != b {
            rep.failures.push(format!("{what}: {} vs {}", g.render_chain(&a), g.render_chain(&b)));
        }
        Ok(())
    };
    for r in &relations.relations {
        let longest = r.lhs.len().max(r.rhs.len());
        for x in (0..ball.len()).filter(|&x| ball.length(x) + longest <= ball.radius) {
            let xw = ball.word(x);
            let lhs = d.eval(&xw.concat(&r.lhs));
            let rhs = d.eval(&xw.concat(&r.rhs));
            rep.relations_checked += 1;
            compare(
                &mut rep,
                &lhs,
                &rhs,
                format!(
                    "relation {} = {} after {}",
                    ball.render(&r.lhs),
                    ball.render(&r.rhs),
                    ball.render(xw)
                ),
            )?;
        }
    }
    for &(x, y) in samples {
        let (xw, yw) = (ball.word(x), ball.word(y));
        let xy = ball.normalize(&xw.concat(yw))?;
        let lhs = d.eval(&xy);
        let mut rhs = d.eval(yw).left_mul(xw);
        match d.side {
            DerivationSide::OneSided => rhs.add(&d.eval(xw), 1),
            DerivationSide::TwoSided => rhs.add(&d.eval(xw).right_mul(yw), 1),
        }
        rep.pairs_checked += 1;
        compare(&mut rep, &lhs, &rhs, format!("pair ({}, {})", ball.render(xw), ball.render(yw)))?;
    }
    Ok(rep)
}

#[derive(Clone, Debug, Default)]
pub struct BetaReport {
    pub edges_checked: usize,
    pub failures: Vec<String>,
    /// Interior edges skipped because a term left the ball.
    pub skipped: Vec<String>,
}

impl BetaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "edges_checked": self.edges_checked,
            "failures": self.failures,
            "skipped": self.skipped,
            "passed": self.passed(),
        })
    }
}

impl BassSerreGraph {
    /// `β(v) = d(x)·y`, plus `[x, y]` on the distinguished vertex side, for
    /// the representative `(x, y)` of `v`.
    pub fn beta(&self, v: usize) -> FormalSum {
        let vert = &self.vertices[v];
        let mut s = self.derivation.eval(&vert.rep.left);
        if self.side == DerivationSide::TwoSided {
            s = s.right_mul(&vert.rep.right);
        }
        if self.beta_plus_side == Some(vert.side) {
            s.add_term(vert.rep.clone(), 1);
        }
        s
    }
}

/// `β(∂e) = e` on every interior edge.
pub fn check_beta_section(g: &BassSerreGraph) -> Result<BetaReport> {
    let mut rep = BetaReport::default();
    for e in g.edges.iter().filter(|e| e.interior) {
        let mut s = g.beta(e.dst);
        s.add(&g.beta(e.src), -1);
        let (chain, unresolved) = g.resolve(&s)?;
        let label = g.render_term(&e.rep);
        if !unresolved.is_empty() {
            rep.skipped.push(label);
            continue;
        }
        rep.edges_checked += 1;
        let expected: Chain = [(e.class, 1)].into_iter().collect();
        if chain != expected {
            rep.failures.push(format!("{label}: got {}", g.render_chain(&chain)));
        }
    }
    Ok(rep)
}
