//! Weak orbits `L/K` and tensor classes `L ⊗_K L` computed inside a finite
//! ball of elements. Classes are only as merged as the ball allows, so every
//! table records the radius it was built with.

use std::collections::HashMap;

use serde_json::json;

use crate::cayley::{cayley_ball, LabeledDigraph};
use crate::error::Result;
use crate::graph::UnionFind;
use crate::presentation::Word;
use crate::rewriting::{NormalFormSolver, RewriteSystem};

/// Elements of length at most `radius + slack`, labeled by normal form.
/// Those of length at most `radius` are interior.
#[derive(Clone, Debug)]
pub struct ElementBall {
    pub system: RewriteSystem,
    pub graph: LabeledDigraph,
    pub radius: usize,
    pub slack: usize,
    index: HashMap<Word, usize>,
}

impl ElementBall {
    pub fn new(system: RewriteSystem, radius: usize, slack: usize) -> Result<Self> {
        let graph = cayley_ball(&system, radius + slack, slack)?;
        let index = graph.vertices.iter().map(|v| (v.label.clone(), v.id)).collect();
        Ok(ElementBall { system, graph, radius, slack, index })
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn outer_radius(&self) -> usize {
        self.radius + self.slack
    }

    pub fn word(&self, id: usize) -> &Word {
        &self.graph.vertices[id].label
    }

    pub fn length(&self, id: usize) -> usize {
        self.graph.vertices[id].distance
    }

    pub fn is_interior(&self, id: usize) -> bool {
        self.length(id) <= self.radius
    }

    pub fn normalize(&self, w: &Word) -> Result<Word> {
        self.system.normal_form(w)
    }

    /// Ball id of the element `w`, if it lies in the ball.
    pub fn id(&self, w: &Word) -> Result<Option<usize>> {
        Ok(self.index.get(&self.normalize(w)?).copied())
    }

    pub fn mul(&self, x: usize, w: &Word) -> Result<Option<usize>> {
        self.id(&self.word(x).concat(w))
    }

    pub fn lmul(&self, w: &Word, y: usize) -> Result<Option<usize>> {
        self.id(&w.concat(self.word(y)))
    }

    pub fn render(&self, w: &Word) -> String {
        self.graph.alphabet.render(w)
    }
}

/// Submonoid `K` acting by right multiplication, given by generating words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSide {
    pub name: String,
    pub generators: Vec<Word>,
}

impl QuotientSide {
    pub fn new(name: impl Into<String>, generators: Vec<Word>) -> Self {
        QuotientSide { name: name.into(), generators }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientClass {
    pub representative: Word,
    pub side: String,
    pub ball_id: usize,
}

fn number_classes(uf: &mut UnionFind) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = uf.len();
    let mut id = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let class_of = (0..n)
        .map(|v| {
            let r = uf.find(v);
            if id[r] == usize::MAX {
                id[r] = members.len();
                members.push(Vec::new());
            }
            members[id[r]].push(v);
            id[r]
        })
        .collect();
    (class_of, members)
}

/// Weak orbits of the right action of `K` on the ball: `x ~ x·g` for every
/// generator `g` with both ends in the ball. Class ids follow the smallest
/// member, whose word is the representative.
#[derive(Clone, Debug)]
pub struct QuotientTable {
    pub side: QuotientSide,
    pub class_of: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Class has a member of interior length.
    pub interior: Vec<bool>,
    /// False when the budget ran out before every merge was tried.
    pub complete: bool,
    pub steps: u64,
    pub radius: usize,
}

impl QuotientTable {
    pub fn build(ball: &ElementBall, side: QuotientSide, budget: u64) -> Result<Self> {
        let mut uf = UnionFind::new(ball.len());
        let mut steps = 0u64;
        let mut complete = true;
        'outer: for x in 0..ball.len() {
            for g in &side.generators {
                if steps >= budget {
                    complete = false;
                    break 'outer;
                }
                steps += 1;
                if let Some(y) = ball.mul(x, g)? {
                    uf.union(x, y);
                }
            }
        }
        let (class_of, members) = number_classes(&mut uf);
        let interior = members.iter().map(|m| m.iter().any(|&v| ball.is_interior(v))).collect();
        Ok(QuotientTable { side, class_of, members, interior, complete, steps, radius: ball.radius })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn class_of_word(&self, ball: &ElementBall, w: &Word) -> Result<Option<usize>> {
        Ok(ball.id(w)?.map(|id| self.class_of[id]))
    }

    pub fn representative(&self, class: usize) -> usize {
        self.members[class][0]
    }

    pub fn classes(&self, ball: &ElementBall) -> Vec<QuotientClass> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| QuotientClass {
                representative: ball.word(m[0]).clone(),
                side: self.side.name.clone(),
                ball_id: i,
            })
            .collect()
    }

    pub fn to_json(&self, ball: &ElementBall) -> serde_json::Value {
        json!({
            "side": self.side.name,
            "radius": self.radius,
            "complete": self.complete,
            "steps": self.steps,
            "classes": self.members.iter().enumerate().map(|(i, m)| json!({
                "id": i,
                "interior": self.interior[i],
                "members": m.iter().map(|&v| ball.render(ball.word(v))).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Classes of pairs `(x, y)` with `|x| + |y|` at most the outer radius under
/// `(x·g, y) ~ (x, h·y)` for each generator `g` of `K` and its image `h`
/// (the generator itself, or its image under a homomorphism).
#[derive(Clone, Debug)]
pub struct TensorTable {
    pub name: String,
    pub pairs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    pub class_of: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub interior: Vec<bool>,
    pub complete: bool,
    pub steps: u64,
    pub radius: usize,
}

impl TensorTable {
    pub fn build(
        ball: &ElementBall,
        name: impl Into<String>,
        generators: &[Word],
        images: &[Word],
        budget: u64,
    ) -> Result<Self> {
        let outer = ball.outer_radius();
        let mut by_len: Vec<Vec<usize>> = vec![Vec::new(); outer + 1];
        for v in 0..ball.len() {
            by_len[ball.length(v)].push(v);
        }
        let mut pairs = Vec::new();
        for x in 0..ball.len() {
            for ys in &by_len[..=outer - ball.length(x)] {
                pairs.extend(ys.iter().map(|&y| (x, y)));
            }
        }
        pairs.sort_by_key(|&(x, y)| (ball.length(x) + ball.length(y), x, y));
        let index: HashMap<(usize, usize), usize> =
            pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        // products computed once per element and generator
        let right: Vec<Vec<Option<usize>>> = (0..ball.len())
            .map(|x| generators.iter().map(|g| ball.mul(x, g)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let left: Vec<Vec<Option<usize>>> = (0..ball.len())
            .map(|y| images.iter().map(|h| ball.lmul(h, y)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut uf = UnionFind::new(pairs.len());
        let mut steps = 0u64;
        let mut complete = true;
        'outer: for &(x, y) in &pairs {
            for i in 0..generators.len() {
                if steps >= budget {
                    complete = false;
                    break 'outer;
                }
                steps += 1;
                let (Some(xg), Some(hy)) = (right[x][i], left[y][i]) else { continue };
                if let (Some(&p), Some(&q)) = (index.get(&(xg, y)), index.get(&(x, hy))) {
                    uf.union(p, q);
                }
            }
        }
        let (class_of, members) = number_classes(&mut uf);
        let interior = members
            .iter()
            .map(|m| m.iter().any(|&p| ball.length(pairs[p].0) + ball.length(pairs[p].1) <= ball.radius))
            .collect();
        Ok(TensorTable {
            name: name.into(),
            pairs,
            index,
            class_of,
            members,
            interior,
            complete,
            steps,
            radius: ball.radius,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn pair_index(&self, x: usize, y: usize) -> Option<usize> {
        self.index.get(&(x, y)).copied()
    }

    pub fn class_of_pair(&self, x: usize, y: usize) -> Option<usize> {
        self.pair_index(x, y).map(|p| self.class_of[p])
    }

    pub fn class_of_words(&self, ball: &ElementBall, x: &Word, y: &Word) -> Result<Option<usize>> {
        Ok(match (ball.id(x)?, ball.id(y)?) {
            (Some(a), Some(b)) => self.class_of_pair(a, b),
            _ => None,
        })
    }

    /// Smallest pair of the class.
    pub fn representative(&self, class: usize) -> (usize, usize) {
        self.pairs[self.members[class][0]]
    }

    pub fn render_pair(&self, ball: &ElementBall, p: (usize, usize)) -> String {
        format!("[{}, {}]", ball.render(ball.word(p.0)), ball.render(ball.word(p.1)))
    }
}
