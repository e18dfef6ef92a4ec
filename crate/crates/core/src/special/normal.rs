use std::cmp::Ordering;

use super::UnitsAnalysis;
use crate::error::{Error, Result};
use crate::presentation::{Alphabet, Letter, Word};
use crate::rewriting::{NormalFormSolver, Verdict};

/// `v = w_part · u_part` where `u_part` is the longest suffix of `v` that
/// is a product of prefixes of `delta` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalFactorization {
    pub w_part: Word,
    pub u_part: Word,
}

impl UnitsAnalysis {
    fn require_normal_forms(&self) -> Result<()> {
        if !self.units_complete() {
            return Err(Error::UnitsNotCompleted);
        }
        if !self.is_certified() {
            return Err(Error::NonCertifiedDelta(
                self.unresolved.iter().map(|w| self.render(w)).collect(),
            ));
        }
        Ok(())
    }

    /// Rewrite with the (infinite) system of all pairs `u > v` of `delta`
    /// products having the same unit value. At each position the maximal
    /// `delta` product starting there is replaced by the least product with
    /// its value; every shorter product at that position is a prefix of it,
    /// so no redex is missed. Repeats until nothing changes.
    pub fn normalize_special(&self, w: &Word) -> Result<Word> {
        self.require_normal_forms()?;
        Ok(self.normalize_unchecked(w))
    }

    pub(super) fn normalize_unchecked(&self, w: &Word) -> Word {
        let mut cur = w.clone();
        'scan: loop {
            for i in 0..cur.len() {
                let mut j = i;
                while let Some(d) = self.delta_at(cur.letters(), j) {
                    j += d.len();
                }
                if j == i {
                    continue;
                }
                let block = cur.slice(i, j);
                let least = self.least_delta_word(&block);
                if least != block {
                    cur = cur.splice(i, j - i, &least);
                    continue 'scan;
                }
            }
            return cur;
        }
    }

    /// Whether `v` is a product of words from `prefixes`; `ends[k]` is true
    /// when the suffix starting at `k` is.
    fn prefix_product_suffixes(&self, v: &Word) -> Vec<bool> {
        let n = v.len();
        let mut ok = vec![false; n + 1];
        ok[n] = true;
        for k in (0..n).rev() {
            ok[k] = self.prefixes.iter().any(|x| {
                k + x.len() <= n && &v.letters()[k..k + x.len()] == x.letters() && ok[k + x.len()]
            });
        }
        ok
    }

    fn split_transversal(&self, v: &Word) -> TransversalFactorization {
        let ok = self.prefix_product_suffixes(v);
        let k = (0..=v.len()).find(|&k| ok[k]).expect("the empty suffix qualifies");
        TransversalFactorization { w_part: v.prefix(k), u_part: v.suffix_from(k) }
    }

    pub fn transversal_factor(&self, v: &Word) -> Result<TransversalFactorization> {
        self.require_normal_forms()?;
        if self.normalize_unchecked(v) != *v {
            return Err(Error::NotIrreducible(self.render(v)));
        }
        Ok(self.split_transversal(v))
    }

    /// Transversal part of the element represented by `w`.
    pub fn transversal_part(&self, w: &Word) -> Result<Word> {
        Ok(self.split_transversal(&self.normalize_special(w)?).w_part)
    }

    /// `[m] ≤_R [n]`, decided by whether the transversal part of `n` is a
    /// prefix of that of `m`.
    pub fn r_order_leq(&self, m: &Word, n: &Word) -> Result<Verdict> {
        let wm = self.transversal_part(m)?;
        let wn = self.transversal_part(n)?;
        Ok(if wn.is_prefix_of(&wm) {
            Verdict::proven(None, 0)
        } else {
            Verdict::refuted(0)
        })
    }

    pub fn r_related(&self, m: &Word, n: &Word) -> Result<bool> {
        Ok(self.transversal_part(m)? == self.transversal_part(n)?)
    }

    /// Right invertible exactly when the normal form is a product of prefixes.
    pub fn is_right_invertible(&self, w: &Word) -> Result<bool> {
        let nf = self.normalize_special(w)?;
        Ok(self.prefix_product_suffixes(&nf)[0])
    }

    /// Words of `prefixes`, plus the empty word when `a` is right
    /// invertible, whose element `m` satisfies `m R m·a`. Words representing
    /// the same element are reported once (the first in that order).
    pub fn loop_generators(&self, a: Letter) -> Result<Vec<Word>> {
        let letter = Word::letter(a);
        let mut candidates = self.prefixes.clone();
        if self.is_right_invertible(&letter)? {
            candidates.push(Word::empty());
        }
        let mut seen: Vec<Word> = Vec::new();
        let mut out = Vec::new();
        for w in candidates {
            let nf = self.normalize_special(&w)?;
            if seen.contains(&nf) {
                continue;
            }
            let wa = w.concat(&letter);
            let up = self.r_order_leq(&w, &wa)?.is_proven();
            let down = self.r_order_leq(&wa, &w)?.is_proven();
            if up && down {
                seen.push(nf);
                out.push(w);
            }
        }
        Ok(out)
    }

    /// Shortlex comparison of S-normal forms.
    pub fn compare_elements(&self, u: &Word, v: &Word) -> Result<Ordering> {
        Ok(self
            .alphabet()
            .shortlex(&self.normalize_special(u)?, &self.normalize_special(v)?))
    }
}

impl NormalFormSolver for UnitsAnalysis {
    fn alphabet(&self) -> &Alphabet {
        self.sp.alphabet()
    }

    fn normal_form(&self, w: &Word) -> Result<Word> {
        self.normalize_special(w)
    }

    fn is_canonical(&self) -> bool {
        self.units_complete() && self.is_certified()
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::analysis;
    use super::*;

    #[test]
    fn normalize_examples() {
        let ua = analysis(&["a", "b"], &["ab"]);
        let w = |s: &str| ua.sp.base.word(s).unwrap();
        assert_eq!(ua.normalize_special(&w("aabb")).unwrap(), Word::empty());
        assert_eq!(ua.normalize_special(&w("ba")).unwrap(), w("ba"));
        let ua = analysis(&["a"], &["aa"]);
        assert_eq!(ua.normalize_special(&ua.sp.base.word("aaa").unwrap()).unwrap(), ua.sp.base.word("a").unwrap());
    }

    #[test]
    fn transversal_examples() {
        let ua = analysis(&["a", "b"], &["ab"]);
        let w = |s: &str| ua.sp.base.word(s).unwrap();
        let t = ua.transversal_factor(&w("baa")).unwrap();
        assert_eq!((t.w_part, t.u_part), (w("b"), w("aa")));
        let t = ua.transversal_factor(&w("bb")).unwrap();
        assert_eq!((t.w_part, t.u_part), (w("bb"), Word::empty()));
        let t = ua.transversal_factor(&Word::empty()).unwrap();
        assert!(t.w_part.is_empty() && t.u_part.is_empty());
        assert_eq!(ua.transversal_factor(&w("ab")).unwrap_err(), Error::NotIrreducible("ab".into()));
    }

    #[test]
    fn r_order_examples() {
        let ua = analysis(&["a", "b"], &["ab"]);
        let w = |s: &str| ua.sp.base.word(s).unwrap();
        assert!(ua.r_order_leq(&w("bb"), &w("b")).unwrap().is_proven());
        assert!(ua.r_order_leq(&w("b"), &w("bb")).unwrap().is_refuted());
        assert!(ua.r_order_leq(&w("ba"), &w("ba")).unwrap().is_proven());
    }

    #[test]
    fn loop_generator_examples() {
        let ua = analysis(&["a", "b"], &["ab"]);
        let a = ua.alphabet().lookup("a").unwrap();
        let b = ua.alphabet().lookup("b").unwrap();
        let render = |ws: Vec<Word>| ws.iter().map(|w| ua.render(w)).collect::<Vec<_>>();
        assert_eq!(render(ua.loop_generators(a).unwrap()), vec!["a", "ab"]);
        assert_eq!(render(ua.loop_generators(b).unwrap()), vec!["a"]);
        let free = analysis(&["a", "b"], &[]);
        assert!(free.loop_generators(a).unwrap().is_empty());
    }
}
