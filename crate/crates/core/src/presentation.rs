//! Monoid presentations, words over a named alphabet, and the
//! line-oriented / JSON surface formats.
//!
//! Text format:
//!
//! ```text
//! # the bicyclic monoid
//! letters: a b
//! rel: a b = 1
//! ```
//!
//! Optional `name:` and `order:` lines may precede the relations. The
//! empty word is written `1`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Letter = u32;

/// A finite word, stored as letter indices into an [`Alphabet`].
///
/// The derived `Ord` is only a storage order; shortlex comparisons go
/// through [`Alphabet::shortlex`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(a: Letter) -> Self {
        Word(vec![a])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word(self.0[n..].to_vec())
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_suffix_of(&self, other: &Word) -> bool {
        other.0.ends_with(&self.0)
    }

    /// Position of the leftmost occurrence of `pat` at or after `from`.
    pub fn find(&self, pat: &Word, from: usize) -> Option<usize> {
        if pat.is_empty() {
            return (from <= self.len()).then_some(from);
        }
        if pat.len() > self.len() {
            return None;
        }
        (from..=self.len() - pat.len()).find(|&i| self.0[i..i + pat.len()] == pat.0[..])
    }

    /// Replace `self[pos..pos+len]` by `with`.
    pub fn splice(&self, pos: usize, len: usize, with: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() - len + with.len());
        v.extend_from_slice(&self.0[..pos]);
        v.extend_from_slice(&with.0);
        v.extend_from_slice(&self.0[pos + len..]);
        Word(v)
    }

    pub fn pow(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    /// Cyclic rotation starting at position `i`.
    pub fn rotate(&self, i: usize) -> Word {
        let mut v = self.0[i..].to_vec();
        v.extend_from_slice(&self.0[..i]);
        Word(v)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Named generators with a total order used for shortlex comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
    /// `rank[i]` is the position of letter `i` in the order.
    rank: Vec<u32>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(letters: &[S]) -> Result<Self> {
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(letters.len());
        for (i, s) in letters.iter().enumerate() {
            let s = s.as_ref().to_string();
            if !valid_identifier(&s) {
                return Err(Error::Syntax {
                    line: 1,
                    column: 1,
                    message: format!("invalid letter `{s}`"),
                });
            }
            if index.insert(s.clone(), i as Letter).is_some() {
                return Err(Error::DuplicateLetter(s));
            }
            names.push(s);
        }
        let rank = (0..names.len() as u32).collect();
        Ok(Alphabet {
            letters: names,
            rank,
            index,
        })
    }

    /// Reorder for shortlex; `order` lists every letter exactly once.
    pub fn with_order<S: AsRef<str>>(mut self, order: &[S]) -> Result<Self> {
        if order.len() != self.letters.len() {
            return Err(Error::BadOrder);
        }
        let mut rank = vec![u32::MAX; self.letters.len()];
        for (r, s) in order.iter().enumerate() {
            let i = self.lookup(s.as_ref())? as usize;
            if rank[i] != u32::MAX {
                return Err(Error::BadOrder);
            }
            rank[i] = r as u32;
        }
        self.rank = rank;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.letters[a as usize]
    }

    pub fn lookup(&self, s: &str) -> Result<Letter> {
        self.index
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnknownLetter(s.to_string()))
    }

    pub fn contains(&self, s: &str) -> bool {
        self.index.contains_key(s)
    }

    /// Letters listed in shortlex order.
    pub fn ordered(&self) -> Vec<Letter> {
        let mut v: Vec<Letter> = (0..self.len() as Letter).collect();
        v.sort_by_key(|&a| self.rank[a as usize]);
        v
    }

    pub fn order_names(&self) -> Vec<String> {
        self.ordered()
            .into_iter()
            .map(|a| self.name(a).to_string())
            .collect()
    }

    pub fn is_declaration_order(&self) -> bool {
        self.rank.iter().enumerate().all(|(i, &r)| i as u32 == r)
    }

    pub fn rank(&self, a: Letter) -> u32 {
        self.rank[a as usize]
    }

    pub fn shortlex(&self, u: &Word, v: &Word) -> Ordering {
        u.len().cmp(&v.len()).then_with(|| {
            for (&x, &y) in u.letters().iter().zip(v.letters()) {
                match self.rank(x).cmp(&self.rank(y)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }

    /// Plain lexicographic comparison under the alphabet order.
    pub fn lex(&self, u: &Word, v: &Word) -> Ordering {
        for (&x, &y) in u.letters().iter().zip(v.letters()) {
            match self.rank(x).cmp(&self.rank(y)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        u.len().cmp(&v.len())
    }

    /// Parse a word: whitespace-separated letters, `1` for the empty word.
    /// A single token that is not a letter is split into characters when
    /// every character is itself a letter.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.is_empty() || toks == ["1"] {
            return Ok(Word::empty());
        }
        if toks.len() == 1 && !self.contains(toks[0]) {
            let chars: Vec<String> = toks[0].chars().map(|c| c.to_string()).collect();
            if chars.iter().all(|c| self.contains(c)) {
                return chars.iter().map(|c| self.lookup(c)).collect::<Result<Vec<_>>>().map(Word);
            }
        }
        toks.iter()
            .map(|t| self.lookup(t))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn word_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Word> {
        names
            .iter()
            .map(|s| self.lookup(s.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn names_of(&self, w: &Word) -> Vec<String> {
        w.letters().iter().map(|&a| self.name(a).to_string()).collect()
    }

    /// Space-separated rendering, `1` for the empty word.
    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            "1".to_string()
        } else {
            self.names_of(w).join(" ")
        }
    }

    /// Concatenated rendering (`ab` rather than `a b`) when every letter is
    /// a single character; falls back to [`Alphabet::render`].
    pub fn compact(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        if w.letters().iter().all(|&a| self.name(a).chars().count() == 1) {
            self.names_of(w).concat()
        } else {
            self.render(w)
        }
    }

    /// All words of length exactly `n`, in shortlex order.
    pub fn words_of_length(&self, n: usize) -> Vec<Word> {
        let ordered = self.ordered();
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * ordered.len());
            for w in &out {
                for &a in &ordered {
                    let mut x = w.clone();
                    x.push(a);
                    next.push(x);
                }
            }
            out = next;
        }
        out
    }

    /// All words of length at most `n`, in shortlex order.
    pub fn words_up_to(&self, n: usize) -> Vec<Word> {
        (0..=n).flat_map(|k| self.words_of_length(k)).collect()
    }

    /// A letter name not yet used, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|s| !self.contains(s))
            .expect("unbounded")
    }
}

fn valid_identifier(s: &str) -> bool {
    !s.is_empty()
        && s != "1"
        && s != "="
        && !s.contains('#')
        && !s.contains(':')
        && s.chars().all(|c| !c.is_whitespace() && !c.is_control())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

impl Relation {
    pub fn new(lhs: Word, rhs: Word) -> Self {
        Relation { lhs, rhs }
    }
}

/// `⟨A | lhs = rhs, ...⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relations: Vec<Relation>,
    pub name: Option<String>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relations: Vec<Relation>) -> Self {
        Presentation {
            alphabet,
            relations,
            name: None,
        }
    }

    pub fn free<S: AsRef<str>>(letters: &[S]) -> Result<Self> {
        Ok(Presentation::new(Alphabet::new(letters)?, Vec::new()))
    }

    /// Build from compact strings, e.g. `from_strs(&["a","b"], &[("ab","1")])`.
    pub fn from_strs<S: AsRef<str>>(letters: &[S], rels: &[(&str, &str)]) -> Result<Self> {
        let alphabet = Alphabet::new(letters)?;
        let relations = rels
            .iter()
            .map(|(l, r)| Ok(Relation::new(alphabet.parse_word(l)?, alphabet.parse_word(r)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation::new(alphabet, relations))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn is_special(&self) -> bool {
        self.relations
            .iter()
            .all(|r| r.rhs.is_empty() && !r.lhs.is_empty())
    }

    pub fn max_relation_len(&self) -> usize {
        self.relations
            .iter()
            .map(|r| r.lhs.len().max(r.rhs.len()))
            .max()
            .unwrap_or(0)
    }

    pub fn word(&self, s: &str) -> Result<Word> {
        self.alphabet.parse_word(s)
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            name: self.name.clone(),
            letters: self.alphabet.names().to_vec(),
            order: (!self.alphabet.is_declaration_order()).then(|| self.alphabet.order_names()),
            relations: self
                .relations
                .iter()
                .map(|r| RelationJson {
                    lhs: self.alphabet.names_of(&r.lhs),
                    rhs: self.alphabet.names_of(&r.rhs),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PresentationJson) -> Result<Self> {
        let mut alphabet = Alphabet::new(&j.letters)?;
        if let Some(order) = &j.order {
            alphabet = alphabet.with_order(order)?;
        }
        let relations = j
            .relations
            .iter()
            .map(|r| {
                Ok(Relation::new(
                    alphabet.word_from_names(&r.lhs)?,
                    alphabet.word_from_names(&r.rhs)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation {
            alphabet,
            relations,
            name: j.name.clone(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: PresentationJson = serde_json::from_str(s)?;
        Presentation::from_json(&j)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub letters: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<String>>,
    #[serde(default)]
    pub relations: Vec<RelationJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationJson {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_presentation(self))
    }
}

pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut alphabet: Option<Alphabet> = None;
    let mut name = None;
    let mut relations = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let syntax = |column: usize, message: String| Error::Syntax {
            line: line_no,
            column,
            message,
        };
        let (key, rest) = trimmed
            .split_once(':')
            .ok_or_else(|| syntax(indent + 1, "expected `key:`".into()))?;
        let rest_col = indent + key.len() + 2;
        match key.trim() {
            "letters" => {
                if alphabet.is_some() {
                    return Err(syntax(indent + 1, "duplicate `letters:` line".into()));
                }
                let toks: Vec<&str> = rest.split_whitespace().collect();
                for t in &toks {
                    if !valid_identifier(t) {
                        return Err(syntax(rest_col, format!("invalid letter `{t}`")));
                    }
                }
                alphabet = Some(Alphabet::new(&toks)?);
            }
            "name" => name = Some(rest.trim().to_string()),
            "order" => {
                let a = alphabet
                    .take()
                    .ok_or_else(|| syntax(indent + 1, "`order:` before `letters:`".into()))?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                alphabet = Some(a.with_order(&toks)?);
            }
            "rel" => {
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| syntax(indent + 1, "`rel:` before `letters:`".into()))?;
                let (l, r) = rest
                    .split_once('=')
                    .ok_or_else(|| syntax(rest_col, "expected `=` in relation".into()))?;
                if r.contains('=') {
                    return Err(syntax(rest_col + l.len() + 1, "more than one `=`".into()));
                }
                let lhs = parse_side(a, l, line_no, rest_col)?;
                let rhs = parse_side(a, r, line_no, rest_col + l.len() + 1)?;
                relations.push(Relation::new(lhs, rhs));
            }
            other => return Err(syntax(indent + 1, format!("unknown key `{other}`"))),
        }
    }
    let alphabet = alphabet.ok_or(Error::Syntax {
        line: 1,
        column: 1,
        message: "missing `letters:` line".into(),
    })?;
    Ok(Presentation {
        alphabet,
        relations,
        name,
    })
}

/// Relation sides are strictly whitespace-separated letters or `1`.
fn parse_side(a: &Alphabet, s: &str, line: usize, column: usize) -> Result<Word> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    if toks.is_empty() {
        return Err(Error::Syntax {
            line,
            column,
            message: "empty relation side (write 1 for the empty word)".into(),
        });
    }
    if toks == ["1"] {
        return Ok(Word::empty());
    }
    a.word_from_names(&toks)
}

pub fn serialize_presentation(p: &Presentation) -> String {
    let mut out = String::new();
    out.push_str("letters: ");
    out.push_str(&p.alphabet.names().join(" "));
    out.push('\n');
    if let Some(n) = &p.name {
        out.push_str(&format!("name: {n}\n"));
    }
    if !p.alphabet.is_declaration_order() {
        out.push_str(&format!("order: {}\n", p.alphabet.order_names().join(" ")));
    }
    for r in &p.relations {
        out.push_str(&format!(
            "rel: {} = {}\n",
            p.alphabet.render(&r.lhs),
            p.alphabet.render(&r.rhs)
        ));
    }
    out
}

/// A presentation all of whose relations read `w = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialPresentation {
    pub base: Presentation,
    pub relators: Vec<Word>,
}

impl SpecialPresentation {
    pub fn alphabet(&self) -> &Alphabet {
        &self.base.alphabet
    }

    pub fn min_relator_len(&self) -> usize {
        self.relators.iter().map(Word::len).min().unwrap_or(0)
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(Word::len).max().unwrap_or(0)
    }
}

pub fn validate_special(p: &Presentation) -> Result<SpecialPresentation> {
    for (i, r) in p.relations.iter().enumerate() {
        if !r.rhs.is_empty() {
            return Err(Error::NotSpecial(i));
        }
        if r.lhs.is_empty() {
            return Err(Error::EmptyRelator(i));
        }
    }
    Ok(SpecialPresentation {
        base: p.clone(),
        relators: p.relations.iter().map(|r| r.lhs.clone()).collect(),
    })
}

/// `w = p^k` with `p` primitive, found from the smallest period of `w`.
pub fn primitive_root(w: &Word) -> Result<(Word, usize)> {
    let n = w.len();
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let s = w.letters();
    // KMP failure function: fail[i] = longest proper border of s[..i].
    let mut fail = vec![0usize; n + 1];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    let period = n - fail[n];
    if n.is_multiple_of(period) {
        Ok((w.prefix(period), n / period))
    } else {
        Ok((w.clone(), 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bicyclic() {
        let p = parse_presentation("letters: a b\nrel: a b = 1").unwrap();
        assert_eq!(p.alphabet.names(), &["a", "b"]);
        assert_eq!(p.relations.len(), 1);
        assert_eq!(p.alphabet.render(&p.relations[0].lhs), "a b");
        assert!(p.relations[0].rhs.is_empty());
    }

    #[test]
    fn parses_power_relator() {
        let p = parse_presentation("letters: a\nrel: a a = 1").unwrap();
        assert_eq!(p.relations[0].lhs.len(), 2);
    }

    #[test]
    fn rejects_unknown_letter() {
        let e = parse_presentation("letters: a\nrel: a b = 1").unwrap_err();
        assert_eq!(e, Error::UnknownLetter("b".into()));
    }

    #[test]
    fn rejects_duplicate_letter() {
        let e = parse_presentation("letters: a a").unwrap_err();
        assert_eq!(e, Error::DuplicateLetter("a".into()));
    }

    #[test]
    fn syntax_error_reports_position() {
        let e = parse_presentation("letters: a\n  rel a = 1").unwrap_err();
        match e {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comments_and_multichar_letters() {
        let src = "# units\nletters: b1 b2 # two\nrel: b1 b2 b1 = 1\n";
        let p = parse_presentation(src).unwrap();
        assert_eq!(p.relations[0].lhs.len(), 3);
        assert_eq!(parse_presentation(&serialize_presentation(&p)).unwrap(), p);
    }

    #[test]
    fn order_line_round_trips() {
        let p = parse_presentation("letters: a b\norder: b a\nrel: a b = b a").unwrap();
        assert_eq!(p.alphabet.shortlex(&p.word("b").unwrap(), &p.word("a").unwrap()), Ordering::Less);
        let again = parse_presentation(&serialize_presentation(&p)).unwrap();
        assert_eq!(again, p);
        assert_eq!(Presentation::from_json_str(&p.to_json_string()).unwrap(), p);
    }

    #[test]
    fn json_shape() {
        let p = Presentation::from_strs(&["a", "b"], &[("ab", "1")]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&p.to_json_string()).unwrap();
        assert_eq!(v["letters"], serde_json::json!(["a", "b"]));
        assert_eq!(v["relations"][0]["lhs"], serde_json::json!(["a", "b"]));
        assert_eq!(v["relations"][0]["rhs"], serde_json::json!([]));
    }

    #[test]
    fn special_validation() {
        let bic = Presentation::from_strs(&["a", "b"], &[("ab", "1")]).unwrap();
        let sp = validate_special(&bic).unwrap();
        assert_eq!(sp.relators, vec![bic.word("ab").unwrap()]);

        let comm = Presentation::from_strs(&["a", "b"], &[("ab", "ba")]).unwrap();
        assert_eq!(validate_special(&comm).unwrap_err(), Error::NotSpecial(0));

        let empty = Presentation::from_strs(&["a"], &[("1", "1")]).unwrap();
        assert_eq!(validate_special(&empty).unwrap_err(), Error::EmptyRelator(0));
    }

    #[test]
    fn primitive_roots() {
        let a = Alphabet::new(&["a", "b"]).unwrap();
        let root = |s: &str| {
            let (p, k) = primitive_root(&a.parse_word(s).unwrap()).unwrap();
            (a.compact(&p), k)
        };
        assert_eq!(root("abab"), ("ab".into(), 2));
        assert_eq!(root("a"), ("a".into(), 1));
        assert_eq!(root("aabaab"), ("aab".into(), 2));
        assert_eq!(root("aba"), ("aba".into(), 1));
        assert_eq!(primitive_root(&Word::empty()).unwrap_err(), Error::EmptyWord);
    }

    #[test]
    fn shortlex_is_length_first() {
        let a = Alphabet::new(&["x", "y"]).unwrap();
        let w = |s: &str| a.parse_word(s).unwrap();
        assert_eq!(a.shortlex(&w("yy"), &w("xxx")), Ordering::Less);
        assert_eq!(a.shortlex(&w("xy"), &w("yx")), Ordering::Less);
        assert_eq!(a.words_up_to(2).len(), 7);
    }
}
