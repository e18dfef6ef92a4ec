//! Presentations of free products, amalgams, Otto-Pride and HNN extensions,
//! tensor-model normal forms, bounded Bass–Serre graphs and derivations.

mod bass_serre;
mod derivation;
mod otto_pride;
mod quotient;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::{Alphabet, Letter, Presentation, PresentationJson, Relation, Word};
use crate::rewriting::{equal_words, knuth_bendix, CompletionResult, EqualityContext, RewriteSystem, Verdict};

pub use bass_serre::{
    bass_serre_ball_amalgam, bass_serre_ball_op, bass_serre_forest_bi, AcyclicityCertificate,
    BassSerreGraph, BsEdge, BsVertex, ForestKind, ProductCheck,
};
pub use derivation::{
    amalgam_derivation, check_beta_section, check_derivation_wellformed, op_derivation,
    BetaReport, Chain, DerivationReport, DerivationSide, DerivationSpec, FormalSum, Term,
};
pub use otto_pride::{OpNormalForm, OpModel};
pub use quotient::{ElementBall, QuotientClass, QuotientSide, QuotientTable, TensorTable};

/// Letters of two presentations side by side; colliding names in the second
/// get a numeric suffix.
fn union_alphabet(a: &Alphabet, b: &Alphabet) -> Result<(Alphabet, Vec<Letter>)> {
    let mut names: Vec<String> = a.names().to_vec();
    let mut order: Vec<String> = a.order_names();
    let mut tmp = a.clone();
    let mut map = Vec::with_capacity(b.len());
    let mut renamed: HashMap<String, String> = HashMap::new();
    for n in b.names() {
        let fresh = tmp.fresh_name(n);
        map.push(names.len() as Letter);
        names.push(fresh.clone());
        renamed.insert(n.clone(), fresh);
        tmp = Alphabet::new(&names)?;
    }
    order.extend(b.order_names().iter().map(|n| renamed[n].clone()));
    Ok((Alphabet::new(&names)?.with_order(&order)?, map))
}

fn map_word(w: &Word, map: &[Letter]) -> Word {
    Word::from_letters(w.letters().iter().map(|&a| map[a as usize]).collect())
}

fn map_relations(p: &Presentation, map: &[Letter]) -> Vec<Relation> {
    p.relations
        .iter()
        .map(|r| Relation::new(map_word(&r.lhs, map), map_word(&r.rhs, map)))
        .collect()
}

/// Union of alphabets and relations.
pub fn free_product(p1: &Presentation, p2: &Presentation) -> Result<Presentation> {
    let (alphabet, map) = union_alphabet(&p1.alphabet, &p2.alphabet)?;
    let mut relations = p1.relations.clone();
    relations.extend(map_relations(p2, &map));
    Ok(Presentation::new(alphabet, relations))
}

/// Complete rewriting system for `p` or a budget error.
pub fn complete_system(p: &Presentation, budget: u64) -> Result<RewriteSystem> {
    match knuth_bendix(&RewriteSystem::from_presentation(p), budget)? {
        CompletionResult::Completed(s) => Ok(s),
        CompletionResult::TimedOut(_) => Err(Error::BudgetExhausted { spent: budget }),
    }
}

/// Outcome of checking that a generator map respects relations.
#[derive(Clone, Debug)]
pub struct MapCheck {
    pub checked: usize,
    /// Relations whose images were refuted.
    pub violations: Vec<String>,
    /// Relations whose images could not be decided within budget.
    pub unknown: Vec<String>,
}

impl MapCheck {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "checked": self.checked,
            "violations": self.violations,
            "unknown": self.unknown,
        })
    }
}

fn equality_verdict(
    target: &Presentation,
    system: Option<&RewriteSystem>,
    u: &Word,
    v: &Word,
    budget: u64,
) -> Verdict {
    match system {
        Some(s) => equal_words(&EqualityContext::System(s), u, v, budget),
        None => equal_words(
            &EqualityContext::Oracle { presentation: target, max_len: None },
            u,
            v,
            budget,
        ),
    }
}

fn try_complete(p: &Presentation, budget: u64) -> Option<RewriteSystem> {
    complete_system(p, budget).ok()
}

/// Monoid map `src generators -> words of target`: each relation of `src`
/// must hold between the images.
pub fn check_map(src: &Presentation, target: &Presentation, images: &[Word], budget: u64) -> Result<MapCheck> {
    let system = try_complete(target, budget);
    let mut out = MapCheck { checked: 0, violations: Vec::new(), unknown: Vec::new() };
    for r in &src.relations {
        let u = image(&r.lhs, images);
        let v = image(&r.rhs, images);
        let verdict = equality_verdict(target, system.as_ref(), &u, &v, budget);
        let label = format!("{} = {}", src.alphabet.render(&r.lhs), src.alphabet.render(&r.rhs));
        out.checked += 1;
        if verdict.is_refuted() {
            out.violations.push(label);
        } else if verdict.is_unknown() {
            out.unknown.push(label);
        }
    }
    Ok(out)
}

/// Image of `w` under a letter-to-word map.
pub fn image(w: &Word, images: &[Word]) -> Word {
    let mut out = Word::empty();
    for &a in w.letters() {
        out = out.concat(&images[a as usize]);
    }
    out
}

/// A partial map on generating words of a submonoid respects every equality
/// among short products that the target system proves.
fn check_partial_map(
    m: &Presentation,
    gens: &[Word],
    images: &[Word],
    max_factors: usize,
    budget: u64,
) -> Result<MapCheck> {
    let mut out = MapCheck { checked: 0, violations: Vec::new(), unknown: Vec::new() };
    let Some(system) = try_complete(m, budget) else {
        out.unknown.push("no complete system for the base monoid".into());
        return Ok(out);
    };
    let mut seen: BTreeMap<Word, (Vec<usize>, Word)> = BTreeMap::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..=max_factors {
        let mut next = Vec::new();
        for seq in frontier {
            let src: Word = seq.iter().fold(Word::empty(), |acc, &i| acc.concat(&gens[i]));
            let img: Word = seq.iter().fold(Word::empty(), |acc, &i| acc.concat(&images[i]));
            let key = system.normalize(&src)?;
            let img_nf = system.normalize(&img)?;
            match seen.get(&key) {
                Some((other, other_img)) => {
                    out.checked += 1;
                    if *other_img != img_nf {
                        out.violations.push(format!("products {other:?} and {seq:?} agree but their images differ"));
                    }
                }
                None => {
                    seen.insert(key, (seq.clone(), img_nf));
                }
            }
            for i in 0..gens.len() {
                let mut s = seq.clone();
                s.push(i);
                next.push(s);
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// Two monoids glued along images of a third.
#[derive(Clone, Debug)]
pub struct AmalgamSpec {
    pub m1: Presentation,
    pub m2: Presentation,
    pub w: Presentation,
    /// Image in `m1` of each generator of `w`.
    pub f1: Vec<Word>,
    pub f2: Vec<Word>,
}

#[derive(Clone, Debug)]
pub struct Amalgam {
    pub presentation: Presentation,
    /// Letter of the result for each letter of `m1` / `m2`.
    pub embed1: Vec<Letter>,
    pub embed2: Vec<Letter>,
    /// Generators of the image of `w`, as words of the result (through `f1`).
    pub edge_generators: Vec<Word>,
    pub map_checks: [MapCheck; 2],
}

pub fn amalgam_presentation(spec: &AmalgamSpec, budget: u64) -> Result<Amalgam> {
    if spec.f1.len() != spec.w.alphabet.len() || spec.f2.len() != spec.w.alphabet.len() {
        return Err(Error::Construction("maps must give one image per generator of w".into()));
    }
    let p = free_product(&spec.m1, &spec.m2)?;
    let embed1: Vec<Letter> = (0..spec.m1.alphabet.len() as Letter).collect();
    let embed2: Vec<Letter> =
        (0..spec.m2.alphabet.len() as Letter).map(|i| i + spec.m1.alphabet.len() as Letter).collect();
    let mut relations = p.relations.clone();
    let mut edge_generators = Vec::new();
    for (x, y) in spec.f1.iter().zip(&spec.f2) {
        let lhs = map_word(x, &embed1);
        relations.push(Relation::new(lhs.clone(), map_word(y, &embed2)));
        edge_generators.push(lhs);
    }
    let map_checks = [
        check_map(&spec.w, &spec.m1, &spec.f1, budget)?,
        check_map(&spec.w, &spec.m2, &spec.f2, budget)?,
    ];
    Ok(Amalgam {
        presentation: Presentation::new(p.alphabet, relations),
        embed1,
        embed2,
        edge_generators,
        map_checks,
    })
}

/// `⟨M, t | g t = t φ(g)⟩` for generators `g` of a submonoid `A`.
#[derive(Clone, Debug)]
pub struct OttoPrideSpec {
    pub m: Presentation,
    pub a_gens: Vec<Word>,
    pub phi: Vec<Word>,
    /// Basis `C` of `M` as a free right `A`-set, containing the empty word.
    pub free_basis: Option<Vec<Word>>,
}

#[derive(Clone, Debug)]
pub struct OttoPride {
    pub presentation: Presentation,
    /// The adjoined letter; letters of `M` keep their numbers.
    pub t: Letter,
    pub map_check: MapCheck,
}

pub fn otto_pride_presentation(spec: &OttoPrideSpec, budget: u64) -> Result<OttoPride> {
    if spec.a_gens.len() != spec.phi.len() {
        return Err(Error::Construction("phi must give one image per generator of A".into()));
    }
    let tname = spec.m.alphabet.fresh_name("t");
    let mut names = spec.m.alphabet.names().to_vec();
    names.push(tname.clone());
    let mut order = spec.m.alphabet.order_names();
    order.push(tname);
    let alphabet = Alphabet::new(&names)?.with_order(&order)?;
    let t = spec.m.alphabet.len() as Letter;
    let mut relations = spec.m.relations.clone();
    for (g, img) in spec.a_gens.iter().zip(&spec.phi) {
        let mut lhs = g.clone();
        lhs.push(t);
        relations.push(Relation::new(lhs, Word::letter(t).concat(img)));
    }
    let map_check = check_partial_map(&spec.m, &spec.a_gens, &spec.phi, 3, budget)?;
    Ok(OttoPride { presentation: Presentation::new(alphabet, relations), t, map_check })
}

/// HNN extension with invertible `t`: `t t⁻ = 1 = t⁻ t` and `a_i t = t b_i`.
#[derive(Clone, Debug)]
pub struct HnnSpec {
    pub m: Presentation,
    pub a_gens: Vec<Word>,
    pub b_gens: Vec<Word>,
}

pub fn hnn_presentation(spec: &HnnSpec, budget: u64) -> Result<(Presentation, MapCheck)> {
    if spec.a_gens.len() != spec.b_gens.len() {
        return Err(Error::Construction("a_gens and b_gens must have equal length".into()));
    }
    let tname = spec.m.alphabet.fresh_name("t");
    let tinv = spec.m.alphabet.fresh_name(&format!("{tname}⁻"));
    let mut names = spec.m.alphabet.names().to_vec();
    names.push(tname.clone());
    names.push(tinv.clone());
    let mut order = spec.m.alphabet.order_names();
    order.extend([tname, tinv]);
    let alphabet = Alphabet::new(&names)?.with_order(&order)?;
    let t = spec.m.alphabet.len() as Letter;
    let ti = t + 1;
    let mut relations = spec.m.relations.clone();
    relations.push(Relation::new(Word::from_letters(vec![t, ti]), Word::empty()));
    relations.push(Relation::new(Word::from_letters(vec![ti, t]), Word::empty()));
    for (a, b) in spec.a_gens.iter().zip(&spec.b_gens) {
        let mut lhs = a.clone();
        lhs.push(t);
        relations.push(Relation::new(lhs, Word::letter(t).concat(b)));
    }
    // a bijection must respect relations in both directions
    let mut check = check_partial_map(&spec.m, &spec.a_gens, &spec.b_gens, 3, budget)?;
    let back = check_partial_map(&spec.m, &spec.b_gens, &spec.a_gens, 3, budget)?;
    check.checked += back.checked;
    check.violations.extend(back.violations);
    check.unknown.extend(back.unknown);
    Ok((Presentation::new(alphabet, relations), check))
}

// JSON spec files

fn parse_in(p: &Presentation, s: &str) -> Result<Word> {
    p.alphabet.parse_word(s)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeProductJson {
    pub p1: PresentationJson,
    pub p2: PresentationJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmalgamJson {
    pub m1: PresentationJson,
    pub m2: PresentationJson,
    pub w: PresentationJson,
    /// Generator of `w` to a word of `m1`, letters separated by spaces.
    pub f1: BTreeMap<String, String>,
    pub f2: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OttoPrideJson {
    pub m: PresentationJson,
    pub a_gens: Vec<String>,
    pub phi: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_basis: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HnnJson {
    pub m: PresentationJson,
    pub a_gens: Vec<String>,
    pub b_gens: Vec<String>,
}

fn map_from_json(w: &Presentation, target: &Presentation, m: &BTreeMap<String, String>) -> Result<Vec<Word>> {
    w.alphabet
        .names()
        .iter()
        .map(|n| {
            let s = m.get(n).ok_or_else(|| Error::Construction(format!("no image for generator `{n}`")))?;
            parse_in(target, s)
        })
        .collect()
}

impl AmalgamSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: AmalgamJson = serde_json::from_str(s)?;
        let m1 = Presentation::from_json(&j.m1)?;
        let m2 = Presentation::from_json(&j.m2)?;
        let w = Presentation::from_json(&j.w)?;
        let f1 = map_from_json(&w, &m1, &j.f1)?;
        let f2 = map_from_json(&w, &m2, &j.f2)?;
        Ok(AmalgamSpec { m1, m2, w, f1, f2 })
    }
}

impl OttoPrideSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: OttoPrideJson = serde_json::from_str(s)?;
        let m = Presentation::from_json(&j.m)?;
        let words = |v: &[String]| v.iter().map(|s| parse_in(&m, s)).collect::<Result<Vec<_>>>();
        Ok(OttoPrideSpec {
            a_gens: words(&j.a_gens)?,
            phi: words(&j.phi)?,
            free_basis: j.free_basis.as_deref().map(words).transpose()?,
            m,
        })
    }
}

impl HnnSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: HnnJson = serde_json::from_str(s)?;
        let m = Presentation::from_json(&j.m)?;
        let words = |v: &[String]| v.iter().map(|s| parse_in(&m, s)).collect::<Result<Vec<_>>>();
        Ok(HnnSpec { a_gens: words(&j.a_gens)?, b_gens: words(&j.b_gens)?, m })
    }
}

pub fn free_product_from_json_str(s: &str) -> Result<Presentation> {
    let j: FreeProductJson = serde_json::from_str(s)?;
    free_product(&Presentation::from_json(&j.p1)?, &Presentation::from_json(&j.p2)?)
}

/// `ℕ ∗ ℕ` glued along `x² = y³`.
pub fn example_amalgam() -> AmalgamSpec {
    let m1 = Presentation::free(&["x"]).expect("valid");
    let m2 = Presentation::free(&["y"]).expect("valid");
    let w = Presentation::free(&["z"]).expect("valid");
    let f1 = vec![m1.word("x x").expect("valid")];
    let f2 = vec![m2.word("y y y").expect("valid")];
    AmalgamSpec { m1, m2, w, f1, f2 }
}

/// `⟨a, t | a a t = t a⟩` with basis `{1, a}` of `{a}*` over `⟨a²⟩`.
pub fn example_otto_pride() -> OttoPrideSpec {
    let m = Presentation::free(&["a"]).expect("valid");
    let aa = m.word("a a").expect("valid");
    let a = m.word("a").expect("valid");
    OttoPrideSpec { a_gens: vec![aa], phi: vec![a.clone()], free_basis: Some(vec![Word::empty(), a]), m }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rels(p: &Presentation) -> Vec<String> {
        p.relations
            .iter()
            .map(|r| format!("{} = {}", p.alphabet.render(&r.lhs), p.alphabet.render(&r.rhs)))
            .collect()
    }

    #[test]
    fn free_products() {
        let a = Presentation::free(&["a"]).unwrap();
        let b = Presentation::free(&["b"]).unwrap();
        let p = free_product(&a, &b).unwrap();
        assert_eq!(p.alphabet.names(), ["a", "b"]);
        assert!(p.relations.is_empty());
        let bic = Presentation::from_strs(&["a", "b"], &[("ab", "")]).unwrap();
        let c = Presentation::from_strs(&["c"], &[("cc", "")]).unwrap();
        assert_eq!(rels(&free_product(&bic, &c).unwrap()), ["a b = 1", "c c = 1"]);
        // collisions are renamed
        let p = free_product(&a, &a).unwrap();
        assert_eq!(p.alphabet.names(), ["a", "a_1"]);
        let trivial = Presentation::free::<&str>(&[]).unwrap();
        assert_eq!(free_product(&bic, &trivial).unwrap(), bic);
    }

    #[test]
    fn amalgams() {
        let am = amalgam_presentation(&example_amalgam(), 1000).unwrap();
        assert_eq!(rels(&am.presentation), ["x x = y y y"]);
        assert!(am.map_checks.iter().all(MapCheck::is_ok));
        let a = Presentation::free(&["a"]).unwrap();
        let id = vec![a.word("a").unwrap()];
        let spec = AmalgamSpec { m1: a.clone(), m2: a.clone(), w: a.clone(), f1: id.clone(), f2: id };
        assert_eq!(rels(&amalgam_presentation(&spec, 1000).unwrap().presentation), ["a = a_1"]);
    }

    #[test]
    fn map_check_flags_bad_images() {
        let w = Presentation::from_strs(&["z"], &[("zz", "")]).unwrap();
        let m = Presentation::free(&["x"]).unwrap();
        let c = check_map(&w, &m, &[m.word("x").unwrap()], 1000).unwrap();
        assert_eq!(c.violations, ["z z = 1"]);
    }

    #[test]
    fn otto_pride_transcriptions() {
        let op = otto_pride_presentation(&example_otto_pride(), 1000).unwrap();
        assert_eq!(rels(&op.presentation), ["a a t = t a"]);
        assert!(op.map_check.is_ok());
        let bic = Presentation::from_strs(&["a", "b"], &[("ab", "")]).unwrap();
        let spec = OttoPrideSpec {
            a_gens: vec![bic.word("a").unwrap(), bic.word("b").unwrap()],
            phi: vec![Word::empty(), Word::empty()],
            free_basis: None,
            m: bic,
        };
        assert_eq!(rels(&otto_pride_presentation(&spec, 1000).unwrap().presentation), ["a b = 1", "a t = t", "b t = t"]);
    }

    #[test]
    fn hnn_transcription() {
        let m = Presentation::free(&["a"]).unwrap();
        let a = m.word("a").unwrap();
        let spec = HnnSpec { m, a_gens: vec![a.clone()], b_gens: vec![a] };
        let (p, check) = hnn_presentation(&spec, 1000).unwrap();
        assert_eq!(rels(&p), ["t t⁻ = 1", "t⁻ t = 1", "a t = t a"]);
        assert!(check.is_ok());
    }

    #[test]
    fn json_specs() {
        let s = r#"{"m":{"letters":["a"]},"a_gens":["a a"],"phi":["a"],"free_basis":["1","a"]}"#;
        let spec = OttoPrideSpec::from_json_str(s).unwrap();
        assert_eq!(spec.free_basis.unwrap().len(), 2);
        let s = r#"{"m1":{"letters":["x"]},"m2":{"letters":["y"]},"w":{"letters":["z"]},
                    "f1":{"z":"x x"},"f2":{"z":"y y y"}}"#;
        let spec = AmalgamSpec::from_json_str(s).unwrap();
        assert_eq!(spec.f2[0].len(), 3);
        assert!(AmalgamSpec::from_json_str(r#"{"m1":{"letters":["x"]}}"#).is_err());
    }
}
