use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use serde_json::json;

use super::{RewriteSystem, SystemStatus};
use crate::presentation::{Alphabet, Presentation, Relation, Word};

/// Every word reachable from `w` by a single relation application in
/// either direction, in a fixed order (relation, direction, position).
pub fn one_step_neighbors(relations: &[Relation], w: &Word, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for rel in relations {
        for (from, to) in [(&rel.lhs, &rel.rhs), (&rel.rhs, &rel.lhs)] {
            if w.len() + to.len() < from.len() || w.len() + to.len() - from.len() > max_len {
                continue;
            }
            if from.is_empty() {
                for p in 0..=w.len() {
                    out.push(w.splice(p, 0, to));
                }
            } else {
                let mut start = 0;
                while let Some(p) = w.find(from, start) {
                    out.push(w.splice(p, from.len(), to));
                    start = p + 1;
                }
            }
        }
    }
    out
}

/// Words reached by breadth-first search, with parent links for traces.
#[derive(Clone, Debug)]
pub struct CongruenceBall {
    pub words: Vec<Word>,
    parents: Vec<Option<usize>>,
    index: HashMap<Word, usize>,
    /// The search stopped on the budget; `words` is only a partial class.
    pub exhausted: bool,
    pub steps: u64,
}

impl CongruenceBall {
    fn rooted(w: &Word) -> Self {
        let mut index = HashMap::new();
        index.insert(w.clone(), 0);
        CongruenceBall {
            words: vec![w.clone()],
            parents: vec![None],
            index,
            exhausted: false,
            steps: 0,
        }
    }

    fn insert(&mut self, w: Word, parent: usize) -> Option<usize> {
        if self.index.contains_key(&w) {
            return None;
        }
        let id = self.words.len();
        self.index.insert(w.clone(), id);
        self.words.push(w);
        self.parents.push(Some(parent));
        Some(id)
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.index.contains_key(w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Derivation from the root to `w`, one relation application per step.
    pub fn trace_to(&self, w: &Word) -> Option<Vec<Word>> {
        let mut id = *self.index.get(w)?;
        let mut trace = vec![self.words[id].clone()];
        while let Some(p) = self.parents[id] {
            trace.push(self.words[p].clone());
            id = p;
        }
        trace.reverse();
        Some(trace)
    }
}

/// Breadth-first search of the congruence class of `w` among words of
/// length at most `max_len`. Each generated word costs one step; the search
/// is flagged exhausted if unexpanded words remain when the budget runs out.
pub fn congruence_ball(p: &Presentation, w: &Word, max_len: usize, budget: u64) -> CongruenceBall {
    let mut ball = CongruenceBall::rooted(w);
    let mut next = 0;
    while next < ball.words.len() {
        if ball.steps >= budget {
            ball.exhausted = true;
            break;
        }
        let cur = ball.words[next].clone();
        for nb in one_step_neighbors(&p.relations, &cur, max_len) {
            ball.steps += 1;
            ball.insert(nb, next);
        }
        next += 1;
    }
    ball
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictValue {
    Proven,
    Refuted,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub value: VerdictValue,
    /// A derivation, one relation application per consecutive pair.
    pub witness: Option<Vec<Word>>,
    pub budget_spent: u64,
}

impl Verdict {
    pub fn proven(witness: Option<Vec<Word>>, budget_spent: u64) -> Self {
        Verdict { value: VerdictValue::Proven, witness, budget_spent }
    }

    pub fn refuted(budget_spent: u64) -> Self {
        Verdict { value: VerdictValue::Refuted, witness: None, budget_spent }
    }

    pub fn unknown(budget_spent: u64) -> Self {
        Verdict { value: VerdictValue::Unknown, witness: None, budget_spent }
    }

    pub fn is_proven(&self) -> bool {
        self.value == VerdictValue::Proven
    }

    pub fn is_refuted(&self) -> bool {
        self.value == VerdictValue::Refuted
    }

    pub fn is_unknown(&self) -> bool {
        self.value == VerdictValue::Unknown
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        let mut v = json!({ "verdict": self.value, "steps": self.budget_spent });
        if let Some(w) = &self.witness {
            v["witness"] = json!(w.iter().map(|x| alphabet.render(x)).collect::<Vec<_>>());
        }
        v
    }
}

pub enum EqualityContext<'a> {
    /// Decide with a rewrite system; only a complete one can refute.
    System(&'a RewriteSystem),
    /// Brute-force search in the presentation. `max_len` defaults to
    /// `max(|u|, |v|) + 2 * (longest relation side)`.
    Oracle {
        presentation: &'a Presentation,
        max_len: Option<usize>,
    },
}

fn system_relations(s: &RewriteSystem) -> Vec<Relation> {
    s.rules
        .iter()
        .map(|r| Relation::new(r.lhs.clone(), r.rhs.clone()))
        .collect()
}

/// Decide `[u] = [v]`. Witness traces from the `System` context use the
/// system's rules as relations.
pub fn equal_words(ctx: &EqualityContext<'_>, u: &Word, v: &Word, budget: u64) -> Verdict {
    match ctx {
        EqualityContext::System(s) => {
            if s.status != SystemStatus::Raw {
                let mut steps = 0;
                let nu = s.normalize_counted(u, &mut steps);
                let nv = s.normalize_counted(v, &mut steps);
                if nu == nv {
                    let mut trace = s.normalize_trace(u).expect("oriented");
                    let mut back = s.normalize_trace(v).expect("oriented");
                    back.pop();
                    back.reverse();
                    trace.extend(back);
                    return Verdict::proven(Some(trace), steps);
                }
                if s.is_complete() {
                    return Verdict::refuted(steps);
                }
            }
            let rels = system_relations(s);
            let longest = rels.iter().map(|r| r.lhs.len().max(r.rhs.len())).max().unwrap_or(0);
            let cap = u.len().max(v.len()) + 2 * longest;
            bidirectional(&rels, u, v, cap, budget)
        }
        EqualityContext::Oracle { presentation, max_len } => {
            let cap = max_len.unwrap_or_else(|| {
                u.len().max(v.len()) + 2 * presentation.max_relation_len()
            });
            bidirectional(&presentation.relations, u, v, cap, budget)
        }
    }
}

fn bidirectional(rels: &[Relation], u: &Word, v: &Word, max_len: usize, budget: u64) -> Verdict {
    if u == v {
        return Verdict::proven(Some(vec![u.clone()]), 0);
    }
    let mut sides = [CongruenceBall::rooted(u), CongruenceBall::rooted(v)];
    let mut queues = [VecDeque::from([0usize]), VecDeque::from([0usize])];
    let mut steps = 0u64;
    loop {
        let side = match (queues[0].is_empty(), queues[1].is_empty()) {
            (true, true) => return Verdict::unknown(steps),
            (false, true) => 0,
            (true, false) => 1,
            (false, false) => usize::from(sides[1].len() < sides[0].len()),
        };
        if steps >= budget {
            return Verdict::unknown(steps);
        }
        let id = queues[side].pop_front().expect("non-empty");
        let cur = sides[side].words[id].clone();
        for nb in one_step_neighbors(rels, &cur, max_len) {
            steps += 1;
            if sides[1 - side].contains(&nb) {
                let mut here = sides[side].trace_to(&cur).expect("present");
                let mut there = sides[1 - side].trace_to(&nb).expect("present");
                there.reverse();
                here.extend(there);
                if side == 1 {
                    here.reverse();
                }
                return Verdict::proven(Some(here), steps);
            }
            if let Some(nid) = sides[side].insert(nb, id) {
                queues[side].push_back(nid);
            }
        }
    }
}

/// Check that consecutive words differ by exactly one application of a
/// relation (either direction) and that the trace runs from `u` to `v`.
pub fn replay_trace(relations: &[Relation], trace: &[Word], u: &Word, v: &Word) -> bool {
    if trace.first() != Some(u) || trace.last() != Some(v) {
        return false;
    }
    trace.windows(2).all(|pair| {
        one_step_neighbors(relations, &pair[0], usize::MAX / 2).contains(&pair[1])
    })
}
