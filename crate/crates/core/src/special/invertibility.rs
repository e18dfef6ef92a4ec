use crate::presentation::{SpecialPresentation, Word};
use crate::rewriting::{
    congruence_ball, knuth_bendix, CongruenceBall, RewriteSystem, Verdict, VerdictValue,
};

/// Two-sided inverses of a word together with derivations of
/// `word · right_inverse → 1` and `left_inverse · word → 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvertibilityCertificate {
    pub word: Word,
    pub right_inverse: Word,
    pub left_inverse: Word,
    pub right_trace: Vec<Word>,
    pub left_trace: Vec<Word>,
}

/// Invertibility queries answered from one search of the class of `1`.
///
/// A word is right invertible exactly when it is a prefix of some word in
/// that class, and left invertible when it is a suffix of one. A complete
/// system for the monoid, when available, is used to refute invertibility.
#[derive(Clone, Debug)]
pub struct InvertibilityOracle {
    identity_class: CongruenceBall,
    system: Option<RewriteSystem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Right,
    Left,
}

impl InvertibilityOracle {
    pub fn new(
        sp: &SpecialPresentation,
        system: Option<RewriteSystem>,
        max_len: usize,
        budget: u64,
    ) -> Self {
        let identity_class = congruence_ball(&sp.base, &Word::empty(), max_len, budget);
        InvertibilityOracle {
            identity_class,
            system: system.filter(RewriteSystem::is_complete),
        }
    }

    pub fn complete_system(&self) -> Option<&RewriteSystem> {
        self.system.as_ref()
    }

    pub fn steps(&self) -> u64 {
        self.identity_class.steps
    }

    fn inverse(&self, u: &Word, side: Side) -> Option<(Word, Vec<Word>)> {
        let mut best: Option<(Word, &Word)> = None;
        for w in &self.identity_class.words {
            let inv = match side {
                Side::Right if u.is_prefix_of(w) => w.suffix_from(u.len()),
                Side::Left if u.is_suffix_of(w) => w.prefix(w.len() - u.len()),
                _ => continue,
            };
            if best.as_ref().is_none_or(|(b, _)| inv.len() < b.len()) {
                best = Some((inv, w));
            }
        }
        best.map(|(inv, w)| {
            let mut trace = self.identity_class.trace_to(w).expect("member");
            trace.reverse();
            (inv, trace)
        })
    }

    pub fn right_inverse(&self, u: &Word) -> Option<(Word, Vec<Word>)> {
        self.inverse(u, Side::Right)
    }

    pub fn left_inverse(&self, u: &Word) -> Option<(Word, Vec<Word>)> {
        self.inverse(u, Side::Left)
    }

    /// Sound refutation from a complete system: if `u` has a right inverse
    /// then `nf(u)·v` rewrites to `1`, so the first letter of `nf(u)` must
    /// start some left-hand side (dually for left inverses).
    fn refutes(&self, u: &Word, side: Side) -> bool {
        let Some(s) = &self.system else { return false };
        let n = s.normalize(u).expect("complete systems are oriented");
        let Some(&edge) = (match side {
            Side::Right => n.letters().first(),
            Side::Left => n.letters().last(),
        }) else {
            return false;
        };
        !s.rules.iter().any(|r| match side {
            Side::Right => r.lhs.letters().first() == Some(&edge),
            Side::Left => r.lhs.letters().last() == Some(&edge),
        })
    }

    pub fn is_right_invertible(&self, u: &Word) -> VerdictValue {
        if self.right_inverse(u).is_some() {
            VerdictValue::Proven
        } else if self.refutes(u, Side::Right) {
            VerdictValue::Refuted
        } else {
            VerdictValue::Unknown
        }
    }

    pub fn certify(&self, u: &Word) -> (Verdict, Option<InvertibilityCertificate>) {
        let steps = self.steps();
        match (self.right_inverse(u), self.left_inverse(u)) {
            (Some((r, rt)), Some((l, lt))) => {
                let witness = Some(rt.clone());
                let cert = InvertibilityCertificate {
                    word: u.clone(),
                    right_inverse: r,
                    left_inverse: l,
                    right_trace: rt,
                    left_trace: lt,
                };
                (Verdict::proven(witness, steps), Some(cert))
            }
            (r, l) => {
                let refuted = (r.is_none() && self.refutes(u, Side::Right))
                    || (l.is_none() && self.refutes(u, Side::Left));
                if refuted {
                    (Verdict::refuted(steps), None)
                } else {
                    (Verdict::unknown(steps), None)
                }
            }
        }
    }
}

/// Search for two-sided inverses of `u` among words of length at most
/// `|u| + 2 · (longest relator)`; completion of the presentation, under the
/// same budget, is attempted so that non-invertibility can be refuted.
/// A search cut short by the budget yields Unknown rather than a refutation.
pub fn certify_invertible(
    sp: &SpecialPresentation,
    u: &Word,
    budget: u64,
) -> (Verdict, Option<InvertibilityCertificate>) {
    let system = knuth_bendix(&RewriteSystem::from_presentation(&sp.base), budget)
        .ok()
        .filter(|c| c.is_completed())
        .map(|c| c.into_system());
    let oracle = InvertibilityOracle::new(sp, system, u.len() + 2 * sp.max_relator_len(), budget);
    let (verdict, cert) = oracle.certify(u);
    if verdict.is_refuted() && oracle.identity_class.exhausted {
        return (Verdict::unknown(verdict.budget_spent), None);
    }
    (verdict, cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{validate_special, Presentation};
    use crate::rewriting::replay_trace;

    fn sp(letters: &[&str], rels: &[&str]) -> SpecialPresentation {
        let rels: Vec<(&str, &str)> = rels.iter().map(|r| (*r, "1")).collect();
        validate_special(&Presentation::from_strs(letters, &rels).unwrap()).unwrap()
    }

    #[test]
    fn order_two_generator() {
        let p = sp(&["a"], &["aa"]);
        let a = p.base.word("a").unwrap();
        let (v, cert) = certify_invertible(&p, &a, 10_000);
        assert!(v.is_proven());
        let cert = cert.unwrap();
        assert_eq!(cert.right_inverse, a);
        assert_eq!(cert.left_inverse, a);
        let aa = a.concat(&a);
        assert!(replay_trace(&p.base.relations, &cert.right_trace, &aa, &Word::empty()));
        assert!(replay_trace(&p.base.relations, &cert.left_trace, &aa, &Word::empty()));
    }

    #[test]
    fn bicyclic() {
        let p = sp(&["a", "b"], &["ab"]);
        let (v, cert) = certify_invertible(&p, &p.base.word("ab").unwrap(), 10_000);
        assert!(v.is_proven());
        let cert = cert.unwrap();
        assert!(cert.right_inverse.is_empty() && cert.left_inverse.is_empty());

        let (v, _) = certify_invertible(&p, &p.base.word("a").unwrap(), 0);
        assert!(v.is_unknown());
        let (v, _) = certify_invertible(&p, &p.base.word("a").unwrap(), 10_000);
        assert!(v.is_refuted());
    }
}
