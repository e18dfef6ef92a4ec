//! Normal forms `c₀ t c₁ ⋯ t c_k a` for Otto-Pride extensions whose base
//! monoid is a free right `A`-set on a basis `C`.

use std::collections::HashMap;
use std::sync::Mutex;

use serde_json::json;

use super::{complete_system, otto_pride_presentation, OttoPrideSpec};
use crate::error::{Error, Result};
use crate::presentation::{Letter, Presentation, Word};
use crate::rewriting::RewriteSystem;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpNormalForm {
    /// Basis words `c₀, …, c_k`, one more than the number of `t`s.
    pub blocks: Vec<Word>,
    /// Normal form in `M` of the trailing element of `A`.
    pub trail: Word,
}

impl OpNormalForm {
    pub fn rank(&self) -> usize {
        self.blocks.len() - 1
    }
}

/// Elements of `A` reachable as products of generators, with one generator
/// sequence for each.
type AElements = Vec<(Word, Vec<usize>)>;

#[derive(Debug)]
pub struct OpModel {
    pub spec: OttoPrideSpec,
    pub presentation: Presentation,
    pub t: Letter,
    m_system: RewriteSystem,
    basis: Vec<Word>,
    /// Extra length allowed for `c·a` beyond the element being factored.
    search_slack: usize,
    factors: Mutex<HashMap<Word, (usize, Vec<usize>)>>,
    a_elements: Mutex<HashMap<usize, std::sync::Arc<AElements>>>,
}

impl OpModel {
    pub fn new(spec: &OttoPrideSpec, budget: u64) -> Result<Self> {
        let basis = spec
            .free_basis
            .clone()
            .ok_or_else(|| Error::Construction("normal forms need a free basis".into()))?;
        let op = otto_pride_presentation(spec, budget)?;
        let m_system = complete_system(&spec.m, budget)?;
        let basis: Vec<Word> = basis.iter().map(|c| m_system.normalize(c)).collect::<Result<_>>()?;
        if !basis.contains(&Word::empty()) {
            return Err(Error::FactorizationFailure("the basis must contain 1".into()));
        }
        Ok(OpModel {
            spec: spec.clone(),
            presentation: op.presentation,
            t: op.t,
            m_system,
            basis,
            search_slack: 2 * spec.m.max_relation_len(),
            factors: Mutex::new(HashMap::new()),
            a_elements: Mutex::new(HashMap::new()),
        })
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    fn a_elements(&self, cap: usize) -> Result<std::sync::Arc<AElements>> {
        if let Some(v) = self.a_elements.lock().expect("lock").get(&cap) {
            return Ok(v.clone());
        }
        let gens = &self.spec.a_gens;
        let mut seen: HashMap<Word, usize> = HashMap::new();
        let mut out: AElements = Vec::new();
        let mut frontier: Vec<(Word, Vec<usize>)> = vec![(Word::empty(), Vec::new())];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (raw, seq) in frontier {
                let nf = self.m_system.normalize(&raw)?;
                if seen.contains_key(&nf) {
                    continue;
                }
                seen.insert(nf.clone(), out.len());
                out.push((nf, seq.clone()));
                for (i, g) in gens.iter().enumerate() {
                    if !g.is_empty() && raw.len() + g.len() <= cap {
                        let mut s = seq.clone();
                        s.push(i);
                        next.push((raw.concat(g), s));
                    }
                }
            }
            frontier = next;
        }
        let arc = std::sync::Arc::new(out);
        self.a_elements.lock().expect("lock").insert(cap, arc.clone());
        Ok(arc)
    }

    /// The unique `(c, a)` with `m = c·a`, `c` in the basis; `a` is returned
    /// as a generator sequence.
    pub fn factor(&self, m: &Word) -> Result<(usize, Vec<usize>)> {
        let m = self.m_system.normalize(m)?;
        if let Some(f) = self.factors.lock().expect("lock").get(&m) {
            return Ok(f.clone());
        }
        let cap = m.len() + self.search_slack;
        let elems = self.a_elements(cap)?;
        let mut found: Vec<(usize, &Word, &Vec<usize>)> = Vec::new();
        for (ci, c) in self.basis.iter().enumerate() {
            for (a, seq) in elems.iter() {
                if c.len() + a.len() > cap {
                    continue;
                }
                if self.m_system.normalize(&c.concat(a))? == m {
                    found.push((ci, a, seq));
                }
            }
        }
        let render = |w: &Word| self.spec.m.alphabet.render(w);
        match found.as_slice() {
            [] => Err(Error::FactorizationFailure(format!("{} has no factorization c·a", render(&m)))),
            [(ci, _, seq)] => {
                let f = (*ci, (*seq).clone());
                self.factors.lock().expect("lock").insert(m, f.clone());
                Ok(f)
            }
            [(c1, a1, _), (c2, a2, _), ..] => Err(Error::FactorizationFailure(format!(
                "{} = ({})·({}) = ({})·({}): the basis is not free",
                render(&m),
                render(&self.basis[*c1]),
                render(a1),
                render(&self.basis[*c2]),
                render(a2)
            ))),
        }
    }

    fn phi_of(&self, seq: &[usize]) -> Word {
        seq.iter().fold(Word::empty(), |acc, &i| acc.concat(&self.spec.phi[i]))
    }

    fn a_word(&self, seq: &[usize]) -> Word {
        seq.iter().fold(Word::empty(), |acc, &i| acc.concat(&self.spec.a_gens[i]))
    }

    /// Normalize `raw` blocks (words of `M` separated by `t`) after the
    /// already normal `fixed` blocks, pushing each `A`-factor through the
    /// following `t` with `a t = t φ(a)`.
    fn normalize_blocks(&self, mut fixed: Vec<Word>, raw: &[Word]) -> Result<OpNormalForm> {
        let mut carry = Word::empty();
        for (i, block) in raw.iter().enumerate() {
            let (ci, seq) = self.factor(&carry.concat(block))?;
            fixed.push(self.basis[ci].clone());
            if i + 1 == raw.len() {
                let trail = self.m_system.normalize(&self.a_word(&seq))?;
                return Ok(OpNormalForm { blocks: fixed, trail });
            }
            carry = self.phi_of(&seq);
        }
        Err(Error::Construction("no blocks to normalize".into()))
    }

    /// Normal form of a word over `M` and `t`.
    pub fn normal_form(&self, w: &Word) -> Result<OpNormalForm> {
        let mut blocks = vec![Word::empty()];
        for &a in w.letters() {
            if a == self.t {
                blocks.push(Word::empty());
            } else {
                blocks.last_mut().expect("non-empty").push(a);
            }
        }
        self.normalize_blocks(Vec::new(), &blocks)
    }

    /// Product in the tensor model: the last block of `x`, its trail and the
    /// first block of `y` merge, and normalization resumes from there.
    pub fn multiply(&self, x: &OpNormalForm, y: &OpNormalForm) -> Result<OpNormalForm> {
        let k = x.blocks.len() - 1;
        let fixed = x.blocks[..k].to_vec();
        let mut raw: Vec<Word> = Vec::with_capacity(y.blocks.len());
        raw.push(x.blocks[k].concat(&x.trail).concat(&y.blocks[0]));
        raw.extend(y.blocks[1..].iter().cloned());
        let last = raw.len() - 1;
        raw[last] = raw[last].concat(&y.trail);
        self.normalize_blocks(fixed, &raw)
    }

    pub fn to_word(&self, nf: &OpNormalForm) -> Word {
        let mut w = Word::empty();
        for (i, c) in nf.blocks.iter().enumerate() {
            if i > 0 {
                w.push(self.t);
            }
            w = w.concat(c);
        }
        w.concat(&nf.trail)
    }

    pub fn render(&self, nf: &OpNormalForm) -> String {
        self.presentation.alphabet.render(&self.to_word(nf))
    }

    pub fn to_json(&self, nf: &OpNormalForm) -> serde_json::Value {
        let m = &self.spec.m.alphabet;
        json!({
            "blocks": nf.blocks.iter().map(|c| m.render(c)).collect::<Vec<_>>(),
            "trail": m.render(&nf.trail),
            "word": self.render(nf),
        })
    }

    /// Every element of `M` up to `max_len` factors uniquely (within the
    /// search bound); returns the elements that failed.
    pub fn check_free_basis(&self, max_len: usize) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for w in self.spec.m.alphabet.words_up_to(max_len) {
            let nf = self.m_system.normalize(&w)?;
            if seen.insert(nf.clone()) {
                if let Err(e) = self.factor(&nf) {
                    bad.push(e.to_string());
                }
            }
        }
        Ok(bad)
    }
}
