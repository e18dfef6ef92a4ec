use std::collections::VecDeque;

use serde::Serialize;

use super::{RewriteRule, RewriteSystem, SystemStatus};
use crate::error::Result;
use crate::presentation::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    /// A proper suffix of the first left side is a prefix of the second.
    Overlap,
    /// The second left side occurs inside the first.
    Containment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPair {
    /// Result of rewriting the ambiguous word with the first rule.
    pub left: Word,
    /// Result of rewriting it with the second rule.
    pub right: Word,
    pub overlap: Word,
    pub rules: (usize, usize),
    /// Start of the second left side inside `overlap`.
    pub position: usize,
    pub kind: PairKind,
}

fn pairs_between(s: &RewriteSystem, i: usize, j: usize, out: &mut Vec<CriticalPair>) {
    let li = &s.rules[i].lhs;
    let lj = &s.rules[j].lhs;
    let (ri, rj) = (&s.rules[i].rhs, &s.rules[j].rhs);
    let mut found: Vec<CriticalPair> = Vec::new();
    // containment: lj inside li (proper, or a distinct rule with equal lhs)
    if lj.len() <= li.len() && (i != j) {
        let mut from = 0;
        while let Some(p) = li.find(lj, from) {
            found.push(CriticalPair {
                left: ri.clone(),
                right: li.splice(p, lj.len(), rj),
                overlap: li.clone(),
                rules: (i, j),
                position: p,
                kind: PairKind::Containment,
            });
            from = p + 1;
        }
    }
    // overlaps: suffix of li of length k equals prefix of lj
    for k in (1..li.len().min(lj.len())).rev() {
        if li.letters()[li.len() - k..] == lj.letters()[..k] {
            let tail = lj.suffix_from(k);
            let overlap = li.concat(&tail);
            let head = li.prefix(li.len() - k);
            found.push(CriticalPair {
                left: ri.concat(&tail),
                right: head.concat(rj),
                overlap,
                rules: (i, j),
                position: li.len() - k,
                kind: PairKind::Overlap,
            });
        }
    }
    found.sort_by_key(|c| c.position);
    out.extend(found);
}

/// All overlap and containment pairs, ordered by rule indices then position.
pub fn critical_pairs(s: &RewriteSystem) -> Result<Vec<CriticalPair>> {
    s.require_oriented()?;
    let mut out = Vec::new();
    for i in 0..s.rules.len() {
        for j in 0..s.rules.len() {
            pairs_between(s, i, j, &mut out);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompletionResult {
    Completed(RewriteSystem),
    TimedOut(RewriteSystem),
}

impl CompletionResult {
    pub fn system(&self) -> &RewriteSystem {
        match self {
            CompletionResult::Completed(s) | CompletionResult::TimedOut(s) => s,
        }
    }

    pub fn into_system(self) -> RewriteSystem {
        match self {
            CompletionResult::Completed(s) | CompletionResult::TimedOut(s) => s,
        }
    }

    pub fn is_completed(&self) -> bool {
        matches!(self, CompletionResult::Completed(_))
    }
}

/// Budgeted Knuth–Bendix completion under shortlex.
///
/// One step is one rule application or one critical-pair join attempt.
/// Every added rule is a consequence of the input rules, so a timed-out
/// system still defines the same congruence. A rule whose left side
/// becomes reducible by a newer rule is retired and its equation
/// re-entered.
pub fn knuth_bendix(s: &RewriteSystem, budget: u64) -> Result<CompletionResult> {
    s.require_oriented()?;
    let mut sys = s.clone();
    sys.status = SystemStatus::Oriented;
    let mut steps: u64 = 0;
    let mut pending: VecDeque<(Word, Word)> = VecDeque::new();
    // rules[..n] have had their pairs with each other enqueued
    let mut n = 0;
    loop {
        while let Some((u, v)) = pending.pop_front() {
            if steps >= budget {
                pending.push_front((u, v));
                return Ok(timed_out(sys, pending));
            }
            steps += 1;
            let a = sys.normalize_counted(&u, &mut steps);
            let b = sys.normalize_counted(&v, &mut steps);
            if a == b {
                continue;
            }
            let rule = RewriteRule::oriented(&sys.alphabet, a, b)?;
            let mut k = 0;
            while k < sys.rules.len() {
                if sys.rules[k].lhs.find(&rule.lhs, 0).is_some() {
                    let old = sys.rules.remove(k);
                    pending.push_back((old.lhs, old.rhs));
                    if k < n {
                        n -= 1;
                    }
                } else {
                    k += 1;
                }
            }
            sys.rules.push(rule);
        }
        if n >= sys.rules.len() {
            break;
        }
        for m in 0..=n {
            let mut pairs = Vec::new();
            pairs_between(&sys, m, n, &mut pairs);
            if m != n {
                pairs_between(&sys, n, m, &mut pairs);
            }
            pending.extend(pairs.into_iter().map(|cp| (cp.left, cp.right)));
        }
        n += 1;
    }
    sys.interreduce();
    sys.status = SystemStatus::Complete;
    Ok(CompletionResult::Completed(sys))
}

/// Unprocessed equations are consequences too; keeping them as rules
/// preserves the congruence of the input.
fn timed_out(mut sys: RewriteSystem, pending: VecDeque<(Word, Word)>) -> CompletionResult {
    for (u, v) in pending {
        if u != v {
            if let Ok(rule) = RewriteRule::oriented(&sys.alphabet, u, v) {
                if !sys.rules.contains(&rule) {
                    sys.rules.push(rule);
                }
            }
        }
    }
    sys.status = SystemStatus::PartialCompletion;
    CompletionResult::TimedOut(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Presentation;

    fn system(letters: &[&str], rels: &[(&str, &str)]) -> RewriteSystem {
        RewriteSystem::from_presentation(&Presentation::from_strs(letters, rels).unwrap())
    }

    fn rendered(s: &RewriteSystem, cps: &[CriticalPair]) -> Vec<(String, String)> {
        cps.iter()
            .map(|c| (s.alphabet.compact(&c.left), s.alphabet.compact(&c.right)))
            .collect()
    }

    #[test]
    fn no_self_overlap_for_ab() {
        let s = system(&["a", "b"], &[("ab", "1")]);
        assert!(critical_pairs(&s).unwrap().is_empty());
    }

    #[test]
    fn aa_overlaps_itself_once() {
        let s = system(&["a"], &[("aa", "1")]);
        let cps = critical_pairs(&s).unwrap();
        assert_eq!(rendered(&s, &cps), vec![("a".into(), "a".into())]);
        assert_eq!(s.alphabet.compact(&cps[0].overlap), "aaa");
    }

    #[test]
    fn yyy_overlaps() {
        // overlap of length 2 ("yyyy") and of length 1 ("yyyyy")
        let s = system(&["x", "y"], &[("yyy", "xx")]);
        let cps = critical_pairs(&s).unwrap();
        assert_eq!(
            rendered(&s, &cps),
            vec![("xxy".into(), "yxx".into()), ("xxyy".into(), "yyxx".into())]
        );
        assert_eq!(s.alphabet.compact(&cps[0].overlap), "yyyy");
    }

    #[test]
    fn containment_pairs() {
        let a = crate::presentation::Alphabet::new(&["a", "b"]).unwrap();
        let w = |x: &str| a.parse_word(x).unwrap();
        let s = RewriteSystem::from_rules(
            a.clone(),
            vec![
                RewriteRule { lhs: w("aba"), rhs: w("b") },
                RewriteRule { lhs: w("b"), rhs: w("a") },
            ],
        )
        .unwrap();
        let cps = critical_pairs(&s).unwrap();
        let contain: Vec<_> = cps.iter().filter(|c| c.kind == PairKind::Containment).collect();
        assert_eq!(contain.len(), 1);
        assert_eq!(a.compact(&contain[0].right), "aaa");
    }

    #[test]
    fn completes_trivial_systems_unchanged() {
        let s = system(&["a", "b"], &[("ab", "1")]);
        let done = knuth_bendix(&s, 1000).unwrap();
        assert!(done.is_completed());
        assert_eq!(done.system().rules, s.rules);
        assert_eq!(done.system().status, SystemStatus::Complete);

        let s = system(&["a"], &[("aa", "1")]);
        let done = knuth_bendix(&s, 1000).unwrap();
        assert!(done.is_completed());
        assert_eq!(done.system().rules, s.rules);
    }

    #[test]
    fn completes_x2_y3() {
        let s = system(&["x", "y"], &[("xx", "yyy")]);
        let done = knuth_bendix(&s, 10_000).unwrap();
        assert!(done.is_completed());
        assert_eq!(done.system().render_rules(), vec!["y x x -> x x y", "y y y -> x x"]);
    }

    #[test]
    fn tiny_budget_times_out_with_sound_partial_system() {
        let s = system(&["x", "y"], &[("yyy", "xx")]);
        match knuth_bendix(&s, 0).unwrap() {
            CompletionResult::TimedOut(p) => {
                assert_eq!(p.status, SystemStatus::PartialCompletion);
                assert_eq!(p.rules[..s.rules.len()], s.rules[..]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn completed_systems_join_all_pairs() {
        let s = system(&["a", "b", "c"], &[("aba", "c"), ("bcb", "a")]);
        if let CompletionResult::Completed(c) = knuth_bendix(&s, 20_000).unwrap() {
            for cp in critical_pairs(&c).unwrap() {
                assert_eq!(c.normalize(&cp.left).unwrap(), c.normalize(&cp.right).unwrap());
            }
        }
    }
}
