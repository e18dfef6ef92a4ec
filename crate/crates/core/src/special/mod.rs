//! Special presentations `⟨A | w_1 = 1, ..., w_k = 1⟩`: invertible pieces
//! of the relators, the group of units and the monoid of right units.
//!
//! The pipeline factors each relator into indecomposable invertible words,
//! collects every short word equal to one of those factors (the set
//! `delta`), groups it into equality classes and encodes the relators over
//! one fresh letter per class. That encoding presents the group of units.

mod invertibility;
mod normal;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use serde_json::json;

use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::presentation::{
    primitive_root, Alphabet, Presentation, Relation, SpecialPresentation, Word,
};
use crate::rewriting::{
    equal_words, knuth_bendix, EqualityContext, RewriteSystem, VerdictValue,
};

pub use invertibility::{certify_invertible, InvertibilityCertificate, InvertibilityOracle};
pub use normal::TransversalFactorization;

/// Upper bound on the length of candidate words for `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CandidateBound {
    /// At most the length of the shortest relator.
    #[default]
    ShortestRelator,
    /// At most the length of the longest relator.
    LongestRelator,
}

#[derive(Clone, Copy, Debug)]
pub struct AnalysisOptions {
    pub budget: u64,
    pub bound: CandidateBound,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            budget: 1_000_000,
            bound: CandidateBound::ShortestRelator,
        }
    }
}

/// One block of the partition of `delta`: words pairwise equal in the monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaClass {
    pub words: Vec<Word>,
    /// Shortlex-least member.
    pub representative: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionInfo {
    pub root: Word,
    pub exponent: usize,
    pub torsion: bool,
}

/// Cache of least `delta*` words keyed by normal forms over the unit letters.
#[derive(Default)]
struct LeastWords(Mutex<HashMap<Word, Word>>);

impl Clone for LeastWords {
    fn clone(&self) -> Self {
        LeastWords::default()
    }
}

impl std::fmt::Debug for LeastWords {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("LeastWords")
    }
}

#[derive(Clone, Debug)]
pub struct UnitsAnalysis {
    pub sp: SpecialPresentation,
    /// For each relator, its factorization into indecomposable invertible words.
    pub factors: Vec<Vec<Word>>,
    /// Shortlex-sorted.
    pub delta: Vec<Word>,
    /// Ordered by representative; class `j` corresponds to unit letter `j`.
    pub classes: Vec<DeltaClass>,
    /// Letters `b1, ..., bm`, one per class.
    pub unit_letters: Alphabet,
    /// Cyclic permutations of the encoded relators, each read `s = 1`.
    pub unit_relators: Vec<Word>,
    pub units_system: RewriteSystem,
    /// Non-empty prefixes of `delta` words, shortlex-sorted.
    pub prefixes: Vec<Word>,
    /// Irreducible prefixes that are not products of two prefixes.
    pub irreducible_prefixes: Vec<Word>,
    /// Members of `irreducible_prefixes` outside `delta`; letter `z{i+1}` ↔ entry `i`.
    pub free_generators: Vec<Word>,
    /// Complete system for the monoid itself, when completion succeeded.
    pub monoid_system: Option<RewriteSystem>,
    /// Candidates whose membership in `delta` could not be decided.
    pub unresolved: Vec<Word>,
    pub diagnostics: Vec<Diagnostic>,
    pub budget: u64,
    class_of: HashMap<Word, usize>,
    least: LeastWords,
}

fn render_all(a: &Alphabet, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| a.compact(w)).collect()
}

impl UnitsAnalysis {
    pub fn alphabet(&self) -> &Alphabet {
        self.sp.alphabet()
    }

    /// Every candidate was decided, so `delta` is exact.
    pub fn is_certified(&self) -> bool {
        self.unresolved.is_empty()
    }

    pub fn units_complete(&self) -> bool {
        self.units_system.is_complete()
    }

    pub fn render(&self, w: &Word) -> String {
        self.alphabet().compact(w)
    }

    /// The `delta` word starting at position `i` of `w`; unique because
    /// `delta` is a prefix code.
    fn delta_at(&self, w: &[u32], i: usize) -> Option<&Word> {
        self.delta
            .iter()
            .find(|d| i + d.len() <= w.len() && &w[i..i + d.len()] == d.letters())
    }

    /// Parse `u` as a product of `delta` words.
    pub fn parse_delta(&self, u: &Word) -> Option<Vec<Word>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < u.len() {
            let d = self.delta_at(u.letters(), i)?;
            i += d.len();
            out.push(d.clone());
        }
        Some(out)
    }

    /// The unit-letter word of a product of `delta` words.
    pub fn encode(&self, u: &Word) -> Option<Word> {
        let parts = self.parse_delta(u)?;
        Some(Word::from_letters(
            parts.iter().map(|d| self.class_of[d] as u32).collect(),
        ))
    }

    /// Replace each unit letter by its class representative.
    pub fn decode(&self, b: &Word) -> Word {
        let mut out = Word::empty();
        for &x in b.letters() {
            out = out.concat(&self.classes[x as usize].representative);
        }
        out
    }

    pub fn units_presentation(&self) -> Presentation {
        Presentation::new(
            self.unit_letters.clone(),
            self.unit_relators
                .iter()
                .map(|s| Relation::new(s.clone(), Word::empty()))
                .collect(),
        )
        .with_name("units")
    }

    /// Presentation over the unit letters followed by `z1, ..., zr`.
    pub fn right_units_presentation(&self) -> Presentation {
        let mut names: Vec<String> = self.unit_letters.names().to_vec();
        names.extend((1..=self.free_generators.len()).map(|i| format!("z{i}")));
        let alphabet = Alphabet::new(&names).expect("distinct generated names");
        Presentation::new(
            alphabet,
            self.unit_relators
                .iter()
                .map(|s| Relation::new(s.clone(), Word::empty()))
                .collect(),
        )
        .with_name("right units")
    }

    pub fn torsion(&self) -> Result<TorsionInfo> {
        torsion_flag(&self.sp)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let a = self.alphabet();
        let z: serde_json::Map<String, serde_json::Value> = self
            .free_generators
            .iter()
            .enumerate()
            .map(|(i, w)| (format!("z{}", i + 1), json!(a.compact(w))))
            .collect();
        json!({
            "factors": self.factors.iter().map(|f| render_all(a, f)).collect::<Vec<_>>(),
            "delta": render_all(a, &self.delta),
            "partition": self.classes.iter().map(|c| render_all(a, &c.words)).collect::<Vec<_>>(),
            "representatives": self.classes.iter().map(|c| a.compact(&c.representative)).collect::<Vec<_>>(),
            "units": self.units_presentation().to_json(),
            "units_system": {
                "status": self.units_system.status,
                "rules": self.units_system.render_rules(),
            },
            "right_units": self.right_units_presentation().to_json(),
            "I": render_all(a, &self.prefixes),
            "I0": render_all(a, &self.irreducible_prefixes),
            "Z": z,
            "certified": self.is_certified() && self.units_complete(),
            "diagnostics": self.diagnostics,
        })
    }
}

/// `w = root^k` for the single relator; torsion exactly when `k > 1`.
pub fn torsion_flag(sp: &SpecialPresentation) -> Result<TorsionInfo> {
    if sp.relators.len() != 1 {
        return Err(Error::NotOneRelator(sp.relators.len()));
    }
    let (root, exponent) = primitive_root(&sp.relators[0])?;
    Ok(TorsionInfo { root, exponent, torsion: exponent > 1 })
}

/// Split `v` by repeatedly cutting off its shortest certified-invertible
/// prefix. Returns the factors and whether some shorter prefix was left
/// undecided (so a finer factorization may exist).
fn factorize(oracle: &InvertibilityOracle, v: &Word) -> (Vec<Word>, bool) {
    let mut out = Vec::new();
    let mut rest = v.clone();
    let mut uncertain = false;
    while !rest.is_empty() {
        let mut cut = rest.len();
        for k in 1..rest.len() {
            match oracle.certify(&rest.prefix(k)).0.value {
                VerdictValue::Proven => {
                    cut = k;
                    break;
                }
                VerdictValue::Unknown => uncertain = true,
                VerdictValue::Refuted => {}
            }
        }
        out.push(rest.prefix(cut));
        rest = rest.suffix_from(cut);
    }
    (out, uncertain)
}

fn try_complete(p: &Presentation, budget: u64) -> Option<RewriteSystem> {
    knuth_bendix(&RewriteSystem::from_presentation(p), budget)
        .ok()
        .filter(|c| c.is_completed())
        .map(|c| c.into_system())
}

fn inverse_search_len(sp: &SpecialPresentation) -> usize {
    2 * sp.max_relator_len()
}

/// Factor a certified-invertible word into indecomposable invertible words.
pub fn indecomposable_factorization(
    sp: &SpecialPresentation,
    v: &Word,
    budget: u64,
) -> Result<Vec<Word>> {
    let system = try_complete(&sp.base, budget);
    let oracle = InvertibilityOracle::new(sp, system, v.len() + inverse_search_len(sp), budget);
    let (verdict, _) = oracle.certify(v);
    if !verdict.is_proven() {
        return Err(Error::BudgetExhausted { spent: verdict.budget_spent });
    }
    Ok(factorize(&oracle, v).0)
}

fn equal_in(
    sp: &SpecialPresentation,
    system: Option<&RewriteSystem>,
    u: &Word,
    v: &Word,
    budget: u64,
) -> VerdictValue {
    let ctx = match system {
        Some(s) => EqualityContext::System(s),
        None => EqualityContext::Oracle { presentation: &sp.base, max_len: None },
    };
    equal_words(&ctx, u, v, budget).value
}

/// Run the whole analysis. Undecided candidates and incomplete units
/// completion are reported in `diagnostics` rather than as errors.
pub fn analyze_special(sp: &SpecialPresentation, opts: AnalysisOptions) -> UnitsAnalysis {
    let a = sp.alphabet().clone();
    let budget = opts.budget;
    let mut diagnostics = Vec::new();
    let monoid_system = try_complete(&sp.base, budget);
    if monoid_system.is_none() && !sp.relators.is_empty() {
        diagnostics.push(
            Diagnostic::new(
                "monoid-completion",
                "completion of the presentation did not finish; invertibility can only be proven, not refuted",
            )
            .with_budget(budget),
        );
    }
    let oracle =
        InvertibilityOracle::new(sp, monoid_system.clone(), inverse_search_len(sp), budget);

    let mut factors = Vec::new();
    for w in &sp.relators {
        let (f, uncertain) = factorize(&oracle, w);
        if uncertain {
            diagnostics.push(
                Diagnostic::new(
                    "coarse-factorization",
                    "a prefix of this relator could not be classified; a finer factorization may exist",
                )
                .with_subjects(vec![a.compact(w)])
                .with_budget(budget),
            );
        }
        factors.push(f);
    }
    let mut minimal: Vec<Word> = factors.iter().flatten().cloned().collect();
    minimal.sort_by(|x, y| a.shortlex(x, y));
    minimal.dedup();

    let bound = match opts.bound {
        CandidateBound::ShortestRelator => sp.min_relator_len(),
        CandidateBound::LongestRelator => sp.max_relator_len(),
    };
    let mut delta: Vec<Word> = Vec::new();
    let mut owner: Vec<usize> = Vec::new();
    let mut unresolved = Vec::new();
    for c in a.words_up_to(bound).into_iter().filter(|w| !w.is_empty()) {
        if let Some(k) = minimal.iter().position(|f| *f == c) {
            delta.push(c);
            owner.push(k);
            continue;
        }
        let mut equal_to = None;
        let mut undecided = false;
        for (k, f) in minimal.iter().enumerate() {
            match equal_in(sp, monoid_system.as_ref(), &c, f, budget) {
                VerdictValue::Proven => {
                    equal_to = Some(k);
                    break;
                }
                VerdictValue::Unknown => undecided = true,
                VerdictValue::Refuted => {}
            }
        }
        let Some(k) = equal_to else {
            if undecided && monoid_system.is_none() {
                // words not provably equal to a factor are left out; only
                // a complete system could exclude them for certain
                unresolved.push(c);
            }
            continue;
        };
        let mut decomposable = false;
        for j in 1..c.len() {
            match oracle.certify(&c.prefix(j)).0.value {
                VerdictValue::Proven => decomposable = true,
                VerdictValue::Unknown => undecided = true,
                VerdictValue::Refuted => {}
            }
        }
        if decomposable {
            continue;
        }
        if undecided {
            unresolved.push(c);
            continue;
        }
        delta.push(c);
        owner.push(k);
    }
    if !unresolved.is_empty() {
        diagnostics.push(
            Diagnostic::new(
                "incomplete-delta",
                "candidates left undecided; the invertible pieces are not certified",
            )
            .with_subjects(render_all(&a, &unresolved))
            .with_budget(budget),
        );
    }

    // classes: factors that are equal in the monoid share a class
    let mut parent: Vec<usize> = (0..minimal.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..minimal.len() {
        for j in i + 1..minimal.len() {
            if equal_in(sp, monoid_system.as_ref(), &minimal[i], &minimal[j], budget)
                == VerdictValue::Proven
            {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut grouped: HashMap<usize, Vec<Word>> = HashMap::new();
    for (w, &k) in delta.iter().zip(&owner) {
        let r = find(&mut parent, k);
        grouped.entry(r).or_default().push(w.clone());
    }
    let mut classes: Vec<DeltaClass> = grouped
        .into_values()
        .map(|mut words| {
            words.sort_by(|x, y| a.shortlex(x, y));
            DeltaClass { representative: words[0].clone(), words }
        })
        .collect();
    classes.sort_by(|x, y| a.shortlex(&x.representative, &y.representative));
    delta.sort_by(|x, y| a.shortlex(x, y));

    for (i, x) in delta.iter().enumerate() {
        for (j, y) in delta.iter().enumerate() {
            if i != j && x.is_prefix_of(y) {
                diagnostics.push(
                    Diagnostic::new("prefix-code", "a member of delta is a proper prefix of another")
                        .with_subjects(vec![a.compact(x), a.compact(y)]),
                );
            }
        }
    }

    let class_of: HashMap<Word, usize> = classes
        .iter()
        .enumerate()
        .flat_map(|(j, c)| c.words.iter().map(move |w| (w.clone(), j)))
        .collect();
    let unit_names: Vec<String> = (1..=classes.len()).map(|j| format!("b{j}")).collect();
    let unit_letters = Alphabet::new(&unit_names).expect("distinct generated names");

    let mut analysis = UnitsAnalysis {
        sp: sp.clone(),
        factors,
        delta,
        classes,
        unit_letters,
        unit_relators: Vec::new(),
        units_system: RewriteSystem::from_rules(Alphabet::new::<&str>(&[]).expect("empty"), vec![])
            .expect("no rules"),
        prefixes: Vec::new(),
        irreducible_prefixes: Vec::new(),
        free_generators: Vec::new(),
        monoid_system,
        unresolved,
        diagnostics,
        budget,
        class_of,
        least: LeastWords::default(),
    };

    let mut relators: Vec<Word> = Vec::new();
    for f in &analysis.factors {
        let encoded =
            Word::from_letters(f.iter().map(|d| analysis.class_of[d] as u32).collect());
        for i in 0..encoded.len() {
            let s = encoded.rotate(i);
            if !relators.contains(&s) {
                relators.push(s);
            }
        }
    }
    analysis.unit_relators = relators;
    let units = analysis.units_presentation();
    let units_system = match knuth_bendix(&RewriteSystem::from_presentation(&units), budget) {
        Ok(c) => c.into_system(),
        Err(e) => {
            analysis.diagnostics.push(Diagnostic::new("units-completion", e.to_string()));
            RewriteSystem::from_presentation(&units)
        }
    };
    if !units_system.is_complete() {
        analysis.diagnostics.push(
            Diagnostic::new(
                "units-completion",
                "completion of the units presentation did not finish; normal forms are unavailable",
            )
            .with_budget(budget),
        );
    }
    analysis.units_system = units_system;

    let mut prefixes: BTreeSet<Vec<u32>> = BTreeSet::new();
    for d in &analysis.delta {
        for k in 1..=d.len() {
            prefixes.insert(d.prefix(k).into_letters());
        }
    }
    let mut prefixes: Vec<Word> = prefixes.into_iter().map(Word::from_letters).collect();
    prefixes.sort_by(|x, y| a.shortlex(x, y));
    analysis.prefixes = prefixes;

    if analysis.units_complete() {
        let mut generators = Vec::new();
        for x in &analysis.prefixes {
            let square = (1..x.len()).any(|k| {
                analysis.prefixes.contains(&x.prefix(k))
                    && analysis.prefixes.contains(&x.suffix_from(k))
            });
            if square {
                continue;
            }
            if analysis.normalize_unchecked(x) == *x {
                generators.push(x.clone());
            }
        }
        analysis.free_generators = generators
            .iter()
            .filter(|x| !analysis.class_of.contains_key(*x))
            .cloned()
            .collect();
        analysis.irreducible_prefixes = generators;
        for (j, c) in analysis.classes.iter().enumerate() {
            let hits = c
                .words
                .iter()
                .filter(|w| analysis.irreducible_prefixes.contains(w))
                .count();
            if hits != 1 {
                analysis.diagnostics.push(
                    Diagnostic::new(
                        "class-generator-count",
                        format!(
                            "class b{} has {hits} irreducible generators (expected 1); its words may represent the identity",
                            j + 1
                        ),
                    )
                    .with_subjects(render_all(&a, &c.words)),
                );
            }
            if analysis.normalize_unchecked(&c.representative) != c.representative {
                analysis.diagnostics.push(
                    Diagnostic::new(
                        "representative-reducible",
                        format!("representative of class b{} is reducible", j + 1),
                    )
                    .with_subjects(vec![a.compact(&c.representative)]),
                );
            }
        }
    } else {
        analysis.diagnostics.push(Diagnostic::new(
            "approximate-generators",
            "irreducible prefixes not computed: units system incomplete",
        ));
    }
    analysis
}

impl UnitsAnalysis {
    fn units_nf(&self, b: &Word) -> Word {
        self.units_system
            .normalize(b)
            .expect("units system is oriented")
    }

    /// The shortlex-least product of `delta` words with the same unit value
    /// as the product `u`.
    fn least_delta_word(&self, u: &Word) -> Word {
        let target = self.units_nf(&self.encode(u).expect("caller passes delta products"));
        if let Some(w) = self.least.0.lock().expect("cache lock").get(&target) {
            return w.clone();
        }
        let a = self.alphabet();
        let mut lex_sorted: Vec<(Word, u32)> = self
            .delta
            .iter()
            .map(|d| (d.clone(), self.class_of[d] as u32))
            .collect();
        lex_sorted.sort_by(|x, y| a.lex(&x.0, &y.0));
        let mut found = None;
        for len in 0..=u.len() {
            let mut word = Word::empty();
            let mut code = Word::empty();
            if self.search_least(&lex_sorted, len, &mut word, &mut code, &target, &mut found) {
                break;
            }
        }
        let least = found.unwrap_or_else(|| u.clone());
        debug_assert!(a.shortlex(&least, u) != Ordering::Greater);
        self.least
            .0
            .lock()
            .expect("cache lock")
            .insert(target, least.clone());
        least
    }

    fn search_least(
        &self,
        pieces: &[(Word, u32)],
        remaining: usize,
        word: &mut Word,
        code: &mut Word,
        target: &Word,
        found: &mut Option<Word>,
    ) -> bool {
        if remaining == 0 {
            if self.units_nf(code) == *target {
                *found = Some(word.clone());
                return true;
            }
            return false;
        }
        for (d, b) in pieces {
            if d.len() > remaining {
                continue;
            }
            let (wl, cl) = (word.len(), code.len());
            *word = word.concat(d);
            code.push(*b);
            if self.search_least(pieces, remaining - d.len(), word, code, target, found) {
                return true;
            }
            *word = word.prefix(wl);
            *code = code.prefix(cl);
        }
        false
    }
}
