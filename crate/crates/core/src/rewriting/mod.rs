//! String rewriting over a shortlex-ordered alphabet.
//!
//! Reduction is deterministic: the leftmost occurrence of any rule
//! left-hand side is rewritten, ties going to the lowest rule index.

mod completion;
mod congruence;

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presentation::{Alphabet, Presentation, Word};

pub use completion::{critical_pairs, knuth_bendix, CompletionResult, CriticalPair, PairKind};
pub use congruence::{
    congruence_ball, equal_words, one_step_neighbors, replay_trace, CongruenceBall,
    EqualityContext, Verdict, VerdictValue,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: Word,
}

impl RewriteRule {
    /// Orient `u = v` so that the left-hand side is the shortlex-larger word.
    pub fn oriented(alphabet: &Alphabet, u: Word, v: Word) -> Result<Self> {
        match alphabet.shortlex(&u, &v) {
            Ordering::Greater => Ok(RewriteRule { lhs: u, rhs: v }),
            Ordering::Less => Ok(RewriteRule { lhs: v, rhs: u }),
            Ordering::Equal => Err(Error::Unorientable(
                alphabet.render(&u),
                alphabet.render(&v),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemStatus {
    Raw,
    Oriented,
    Complete,
    PartialCompletion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteSystem {
    pub alphabet: Alphabet,
    pub rules: Vec<RewriteRule>,
    pub status: SystemStatus,
}

/// Anything that maps words to canonical representatives.
pub trait NormalFormSolver {
    fn alphabet(&self) -> &Alphabet;
    fn normal_form(&self, w: &Word) -> Result<Word>;
    /// True when distinct outputs are guaranteed to be distinct elements.
    fn is_canonical(&self) -> bool;
}

impl RewriteSystem {
    /// Relations kept verbatim, not yet usable for reduction.
    pub fn raw(p: &Presentation) -> Self {
        RewriteSystem {
            alphabet: p.alphabet.clone(),
            rules: p
                .relations
                .iter()
                .map(|r| RewriteRule {
                    lhs: r.lhs.clone(),
                    rhs: r.rhs.clone(),
                })
                .collect(),
            status: SystemStatus::Raw,
        }
    }

    /// Orient every relation by shortlex; trivial relations `w = w` are dropped.
    pub fn from_presentation(p: &Presentation) -> Self {
        let rules = p
            .relations
            .iter()
            .filter(|r| r.lhs != r.rhs)
            .map(|r| {
                RewriteRule::oriented(&p.alphabet, r.lhs.clone(), r.rhs.clone())
                    .expect("distinct words are shortlex-comparable")
            })
            .collect();
        RewriteSystem {
            alphabet: p.alphabet.clone(),
            rules,
            status: SystemStatus::Oriented,
        }
    }

    pub fn from_rules(alphabet: Alphabet, rules: Vec<RewriteRule>) -> Result<Self> {
        for r in &rules {
            if r.lhs.is_empty() || alphabet.shortlex(&r.lhs, &r.rhs) != Ordering::Greater {
                return Err(Error::Unorientable(
                    alphabet.render(&r.lhs),
                    alphabet.render(&r.rhs),
                ));
            }
        }
        Ok(RewriteSystem {
            alphabet,
            rules,
            status: SystemStatus::Oriented,
        })
    }

    pub fn is_oriented(&self) -> bool {
        self.status != SystemStatus::Raw
    }

    pub fn is_complete(&self) -> bool {
        self.status == SystemStatus::Complete
    }

    fn require_oriented(&self) -> Result<()> {
        if self.is_oriented() {
            Ok(())
        } else {
            Err(Error::UnorientedSystem)
        }
    }

    fn max_lhs(&self) -> usize {
        self.rules.iter().map(|r| r.lhs.len()).max().unwrap_or(0)
    }

    /// Leftmost match at or after `from`: (position, rule index).
    fn leftmost_match(&self, w: &[u32], from: usize) -> Option<(usize, usize)> {
        for i in from..w.len() {
            for (j, r) in self.rules.iter().enumerate() {
                let l = r.lhs.letters();
                if i + l.len() <= w.len() && &w[i..i + l.len()] == l {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn reduce_once(&self, w: &Word) -> Result<Option<Word>> {
        self.require_oriented()?;
        Ok(self.leftmost_match(w.letters(), 0).map(|(i, j)| {
            let r = &self.rules[j];
            w.splice(i, r.lhs.len(), &r.rhs)
        }))
    }

    pub fn is_irreducible(&self, w: &Word) -> bool {
        self.leftmost_match(w.letters(), 0).is_none()
    }

    pub fn normalize(&self, w: &Word) -> Result<Word> {
        self.require_oriented()?;
        let mut steps = 0;
        Ok(self.normalize_counted(w, &mut steps))
    }

    /// Same result as iterating [`RewriteSystem::reduce_once`]; rescanning
    /// resumes just before the last rewrite since earlier positions cannot
    /// have gained a match that ends before it.
    pub(crate) fn normalize_counted(&self, w: &Word, steps: &mut u64) -> Word {
        let back = self.max_lhs().saturating_sub(1);
        let mut cur = w.letters().to_vec();
        let mut from = 0;
        while let Some((i, j)) = self.leftmost_match(&cur, from) {
            let r = &self.rules[j];
            cur.splice(i..i + r.lhs.len(), r.rhs.letters().iter().copied());
            *steps += 1;
            from = i.saturating_sub(back);
        }
        Word::from_letters(cur)
    }

    /// Replay of [`RewriteSystem::normalize`] returning every intermediate word.
    pub fn normalize_trace(&self, w: &Word) -> Result<Vec<Word>> {
        let mut trace = vec![w.clone()];
        while let Some(next) = self.reduce_once(trace.last().expect("non-empty"))? {
            trace.push(next);
        }
        Ok(trace)
    }

    pub fn render_rules(&self) -> Vec<String> {
        self.rules
            .iter()
            .map(|r| {
                format!(
                    "{} -> {}",
                    self.alphabet.render(&r.lhs),
                    self.alphabet.render(&r.rhs)
                )
            })
            .collect()
    }

    /// Drop rules whose left side is reducible by another rule, normalize
    /// right sides, and sort by left side.
    pub(crate) fn interreduce(&mut self) {
        let rules = std::mem::take(&mut self.rules);
        let mut kept: Vec<RewriteRule> = Vec::new();
        for (i, r) in rules.iter().enumerate() {
            let redundant = rules.iter().enumerate().any(|(j, s)| {
                j != i
                    && s.lhs.len() <= r.lhs.len()
                    && (s.lhs != r.lhs || j < i)
                    && r.lhs.find(&s.lhs, 0).is_some()
            });
            if !redundant {
                kept.push(r.clone());
            }
        }
        self.rules = kept;
        let mut steps = 0;
        let normalized: Vec<Word> = self
            .rules
            .iter()
            .map(|r| self.normalize_counted(&r.rhs, &mut steps))
            .collect();
        for (r, rhs) in self.rules.iter_mut().zip(normalized) {
            r.rhs = rhs;
        }
        let alphabet = self.alphabet.clone();
        self.rules.sort_by(|a, b| alphabet.shortlex(&a.lhs, &b.lhs));
    }
}

impl NormalFormSolver for RewriteSystem {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn normal_form(&self, w: &Word) -> Result<Word> {
        self.normalize(w)
    }

    fn is_canonical(&self) -> bool {
        self.is_complete()
    }
}

impl fmt::Display for RewriteSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.render_rules() {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(letters: &[&str], rels: &[(&str, &str)]) -> RewriteSystem {
        RewriteSystem::from_presentation(&Presentation::from_strs(letters, rels).unwrap())
    }

    #[test]
    fn reduce_once_leftmost() {
        let s = system(&["a", "b"], &[("ab", "1")]);
        let w = |x: &str| s.alphabet.parse_word(x).unwrap();
        assert_eq!(s.reduce_once(&w("baab")).unwrap(), Some(w("ba")));
        assert_eq!(s.reduce_once(&w("ba")).unwrap(), None);

        let s = system(&["a"], &[("aa", "1")]);
        let w = |x: &str| s.alphabet.parse_word(x).unwrap();
        assert_eq!(s.reduce_once(&w("aaa")).unwrap(), Some(w("a")));
    }

    #[test]
    fn ties_go_to_lowest_rule_index() {
        let a = Alphabet::new(&["a", "b", "c"]).unwrap();
        let w = |x: &str| a.parse_word(x).unwrap();
        let s = RewriteSystem::from_rules(
            a.clone(),
            vec![
                RewriteRule { lhs: w("ab"), rhs: w("c") },
                RewriteRule { lhs: w("abc"), rhs: w("1") },
            ],
        )
        .unwrap();
        assert_eq!(s.reduce_once(&w("abc")).unwrap(), Some(w("cc")));
        let swapped = RewriteSystem::from_rules(
            a.clone(),
            vec![
                RewriteRule { lhs: w("abc"), rhs: w("1") },
                RewriteRule { lhs: w("ab"), rhs: w("c") },
            ],
        )
        .unwrap();
        assert_eq!(swapped.reduce_once(&w("abc")).unwrap(), Some(w("1")));
    }

    #[test]
    fn normalize_examples() {
        let s = system(&["a", "b"], &[("ab", "1")]);
        let w = |x: &str| s.alphabet.parse_word(x).unwrap();
        assert_eq!(s.normalize(&w("babab")).unwrap(), w("b"));
        assert_eq!(s.normalize(&w("1")).unwrap(), w("1"));
        let s = system(&["a"], &[("aa", "1")]);
        assert_eq!(s.normalize(&s.alphabet.parse_word("aaaa").unwrap()).unwrap(), Word::empty());
    }

    #[test]
    fn raw_system_refuses_reduction() {
        let p = Presentation::from_strs(&["a", "b"], &[("ab", "1")]).unwrap();
        let s = RewriteSystem::raw(&p);
        assert_eq!(s.reduce_once(&p.word("ab").unwrap()).unwrap_err(), Error::UnorientedSystem);
        assert_eq!(s.normalize(&p.word("ab").unwrap()).unwrap_err(), Error::UnorientedSystem);
    }

    #[test]
    fn fast_normalize_matches_iterated_reduce_once() {
        let s = system(&["x", "y"], &[("yyy", "xx"), ("yxx", "xxy")]);
        for w in s.alphabet.words_up_to(7) {
            let slow = s.normalize_trace(&w).unwrap().pop().unwrap();
            assert_eq!(s.normalize(&w).unwrap(), slow);
        }
    }

    #[test]
    fn orientation_uses_alphabet_order() {
        let p = Presentation::from_strs(&["a", "b"], &[("ab", "ba")]).unwrap();
        let s = RewriteSystem::from_presentation(&p);
        assert_eq!(s.render_rules(), vec!["b a -> a b"]);
        let mut q = p.clone();
        q.alphabet = q.alphabet.with_order(&["b", "a"]).unwrap();
        assert_eq!(RewriteSystem::from_presentation(&q).render_rules(), vec!["a b -> b a"]);
    }
}
