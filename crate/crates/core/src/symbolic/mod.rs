//! The symbolic engine: a knowledge base holding categorical facts and Horn
//! rules, a credal overlay of `<formula, credence>` pairs, comparative
//! credence records, independence declarations and stored interrogatives.
//!
//! Probabilistic uncertainty shows up as nonextreme credal entries (or as a
//! formula sitting strictly between two comparative records); categorical
//! uncertainty shows up as a stored question that the rules cannot settle.
//!
//! ```
//! use uncertainty_lab::lang::parse_formula;
//! use uncertainty_lab::symbolic::{CredalEntry, KnowledgeBase};
//!
//! let p = parse_formula("p").unwrap();
//! let q = parse_formula("q").unwrap();
//! let mut kb = KnowledgeBase::new();
//! kb.integrate_credal(CredalEntry::new(p.clone(), 0.9).unwrap()).unwrap();
//! kb.integrate_credal(CredalEntry::new(q.clone(), 0.8).unwrap()).unwrap();
//! kb.declare_independent([p.clone(), q.clone()]).unwrap();
//!
//! let conj = parse_formula("p & q").unwrap();
//! let entry = kb.decide_compound(&conj).unwrap().unwrap();
//! assert!((entry.credence - 0.72).abs() < 1e-12);
//! ```

mod credal;
mod modes;
mod resolve;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lang::{Atom, Formula, Literal, Question};

pub use modes::{render_stance, ModeReport, QueryOutcome, SymbolicStance};
pub use resolve::Answer;
pub use resolve::Prover;

/// Largest number of distinct atoms `decide_compound` will enumerate.
pub const MAX_ENUMERATION_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymbolicError {
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("no credal entry for `{0}`")]
    NoCredalEntry(Formula),
    #[error("{n} atoms exceed the enumeration cap of {MAX_ENUMERATION_ATOMS}")]
    TooManyAtoms { n: usize },
    #[error("`{0}` is not ground")]
    NotGround(String),
    #[error("credence {0} is outside [0, 1]")]
    CredenceOutOfRange(f64),
    #[error("`{0}` is not a literal")]
    NotALiteral(Formula),
    #[error("rule `{0}`: head variable `{1}` does not occur in the body")]
    RangeRestriction(String, String),
    #[error("rule with an empty body")]
    EmptyRuleBody,
    #[error("comparative `{0}` relates a formula to itself")]
    ReflexiveComparative(String),
    #[error("assertion threshold {0} is outside (0, 1]")]
    InvalidThreshold(f64),
    #[error("resolution exceeded the depth limit of {0}")]
    DepthLimit(usize),
    #[error("unsupported question `{0}`")]
    UnsupportedQuestion(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Probabilistic,
    Categorical,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Explicit,
    Implicit,
    None,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Probabilistic => "prob",
            Kind::Categorical => "cat",
            Kind::None => "none",
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Explicit => "explicit",
            Mode::Implicit => "implicit",
            Mode::None => "none",
        })
    }
}

/// A `<formula, credence>` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CredalEntry {
    pub body: Formula,
    pub credence: f64,
}

impl CredalEntry {
    pub fn new(body: Formula, credence: f64) -> Result<Self, SymbolicError> {
        if !body.is_ground() {
            return Err(SymbolicError::NotGround(body.to_string()));
        }
        if !(0.0..=1.0).contains(&credence) {
            return Err(SymbolicError::CredenceOutOfRange(credence));
        }
        Ok(CredalEntry { body, credence })
    }
}

impl fmt::Display for CredalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.body, self.credence)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Greater,
    Equal,
}

/// `Pr(left) > Pr(right)` or `Pr(left) = Pr(right)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComparativeEntry {
    pub left: Formula,
    pub relation: Relation,
    pub right: Formula,
}

impl ComparativeEntry {
    pub fn new(left: Formula, relation: Relation, right: Formula) -> Result<Self, SymbolicError> {
        for f in [&left, &right] {
            if !f.is_ground() {
                return Err(SymbolicError::NotGround(f.to_string()));
            }
        }
        if relation == Relation::Greater && left == right {
            return Err(SymbolicError::ReflexiveComparative(left.to_string()));
        }
        Ok(ComparativeEntry {
            left,
            relation,
            right,
        })
    }
}

/// A range-restricted Horn rule over literals: `body -> head`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub body: Vec<Literal>,
    pub head: Literal,
}

impl Rule {
    pub fn new(body: Vec<Literal>, head: Literal) -> Result<Self, SymbolicError> {
        if body.is_empty() {
            return Err(SymbolicError::EmptyRuleBody);
        }
        let rule = Rule { body, head };
        let body_vars: BTreeSet<&str> = rule
            .body
            .iter()
            .flat_map(|l| l.atom.args.iter())
            .filter(|t| t.is_variable())
            .map(|t| t.name())
            .collect();
        for t in &rule.head.atom.args {
            if t.is_variable() && !body_vars.contains(t.name()) {
                return Err(SymbolicError::RangeRestriction(
                    rule.to_string(),
                    t.name().to_string(),
                ));
            }
        }
        Ok(rule)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, " -> {}", self.head)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssertionPolicy {
    assert_threshold: f64,
}

impl AssertionPolicy {
    pub const DEFAULT_THRESHOLD: f64 = 0.95;

    pub fn new(assert_threshold: f64) -> Result<Self, SymbolicError> {
        if assert_threshold > 0.0 && assert_threshold <= 1.0 {
            Ok(AssertionPolicy { assert_threshold })
        } else {
            Err(SymbolicError::InvalidThreshold(assert_threshold))
        }
    }

    pub fn threshold(&self) -> f64 {
        self.assert_threshold
    }

    /// Renders a credence for `f` as an utterance: flat above the threshold
    /// (strictly), flat on the complement below `1 - threshold`, hedged in
    /// between.
    pub fn render(&self, f: &Formula, r: f64) -> Utterance {
        let t = self.assert_threshold;
        if r > t || r >= 1.0 {
            Utterance::FlatAssert(f.clone())
        } else if 1.0 - r > t || r <= 0.0 {
            Utterance::FlatAssert(f.complement())
        } else {
            Utterance::HedgedAssert(f.clone(), r)
        }
    }
}

impl Default for AssertionPolicy {
    fn default() -> Self {
        AssertionPolicy {
            assert_threshold: Self::DEFAULT_THRESHOLD,
        }
    }
}

/// Behavioural output of a system.
#[derive(Debug, Clone, PartialEq)]
pub enum Utterance {
    FlatAssert(Formula),
    HedgedAssert(Formula, f64),
    Ask(Question),
    Abstain(Question),
}

impl Utterance {
    /// Formula or question body the utterance is about.
    pub fn subject(&self) -> &Formula {
        match self {
            Utterance::FlatAssert(f) | Utterance::HedgedAssert(f, _) => f,
            Utterance::Ask(q) | Utterance::Abstain(q) => q.body(),
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Utterance::FlatAssert(_))
    }
}

impl fmt::Display for Utterance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Utterance::FlatAssert(x) => write!(f, "ASSERT {x}"),
            Utterance::HedgedAssert(x, r) => write!(f, "ASSERT {x} @ {r:.4}"),
            Utterance::Ask(q) => write!(f, "ASK {q}"),
            Utterance::Abstain(q) => write!(f, "ABSTAIN {q}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub depth_limit: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { depth_limit: 64 }
    }
}

/// A symbolic knowledge base. Operations that change it take `&mut self`
/// and leave it untouched when they fail.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    facts: BTreeSet<Literal>,
    rules: Vec<Rule>,
    credals: BTreeMap<Formula, f64>,
    comparatives: Vec<ComparativeEntry>,
    independents: Vec<BTreeSet<Atom>>,
    open_questions: Vec<Question>,
    constants: BTreeSet<String>,
    config: EngineConfig,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_config(config: EngineConfig) -> Self {
        KnowledgeBase {
            config,
            ..Self::default()
        }
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn set_config(&mut self, config: EngineConfig) {
        self.config = config;
    }

    pub fn facts(&self) -> impl Iterator<Item = &Literal> {
        self.facts.iter()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn credals(&self) -> impl Iterator<Item = (&Formula, f64)> {
        self.credals.iter().map(|(f, r)| (f, *r))
    }

    pub fn credence(&self, f: &Formula) -> Option<f64> {
        self.credals.get(f).copied()
    }

    pub fn comparatives(&self) -> &[ComparativeEntry] {
        &self.comparatives
    }

    pub fn independence_sets(&self) -> &[BTreeSet<Atom>] {
        &self.independents
    }

    pub fn open_questions(&self) -> &[Question] {
        &self.open_questions
    }

    pub fn has_open_question(&self, q: &Question) -> bool {
        self.open_questions.contains(q)
    }

    /// Constants mentioned anywhere in the knowledge base.
    pub fn constants(&self) -> &BTreeSet<String> {
        &self.constants
    }

    fn note_constants(&mut self, f: &Formula) {
        self.constants.extend(f.constants());
    }

    /// Credence a stored fact forces on `body`, when `body` is a literal whose
    /// atom is categorically settled.
    fn forced_credence(&self, body: &Formula) -> Option<f64> {
        let lit = body.as_literal()?;
        if self.facts.contains(&lit) {
            Some(1.0)
        } else if self.facts.contains(&lit.complement()) {
            Some(0.0)
        } else {
            None
        }
    }

    pub fn add_fact(&mut self, lit: Literal) -> Result<(), SymbolicError> {
        if !lit.is_ground() {
            return Err(SymbolicError::NotGround(lit.to_string()));
        }
        if self.facts.contains(&lit.complement()) {
            return Err(SymbolicError::Inconsistency(format!(
                "fact `{lit}` contradicts stored fact `{}`",
                lit.complement()
            )));
        }
        let f = lit.to_formula();
        for (body, want) in [(f.clone(), 1.0), (f.complement(), 0.0)] {
            if let Some(r) = self.credals.get(&body) {
                if *r != want {
                    return Err(SymbolicError::Inconsistency(format!(
                        "fact `{lit}` contradicts credal entry <{body}, {r}>"
                    )));
                }
            }
        }
        self.note_constants(&f);
        self.facts.insert(lit);
        Ok(())
    }

    pub fn remove_fact(&mut self, lit: &Literal) -> bool {
        self.facts.remove(lit)
    }

    pub fn add_rule(&mut self, rule: Rule) {
        for l in rule.body.iter().chain(std::iter::once(&rule.head)) {
            self.constants.extend(l.to_formula().constants());
        }
        if !self.rules.contains(&rule) {
            self.rules.push(rule);
        }
    }

    pub fn add_comparative(&mut self, c: ComparativeEntry) {
        self.note_constants(&c.left.clone());
        self.note_constants(&c.right.clone());
        if !self.comparatives.contains(&c) {
            self.comparatives.push(c);
        }
    }

    /// Declares the atoms of `formulas` mutually independent. Each formula
    /// must be a ground atom.
    pub fn declare_independent(
        &mut self,
        formulas: impl IntoIterator<Item = Formula>,
    ) -> Result<(), SymbolicError> {
        let mut set = BTreeSet::new();
        for f in formulas {
            match f {
                Formula::Atom(a) if a.is_ground() => {
                    set.insert(a);
                }
                other => return Err(SymbolicError::NotGround(other.to_string())),
            }
        }
        for a in &set {
            self.constants
                .extend(a.args.iter().map(|t| t.name().to_string()));
        }
        self.independents.push(set);
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str) {
        self.constants.insert(name.to_string());
    }

    pub(crate) fn store_question(&mut self, q: Question) {
        self.note_constants(&q.body().clone());
        if !self.open_questions.contains(&q) {
            self.open_questions.push(q);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, parse_literal};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn credal_entry_bounds() {
        assert!(CredalEntry::new(f("p"), 1.5).is_err());
        assert!(CredalEntry::new(f("p"), -0.1).is_err());
        assert!(CredalEntry::new(f("p"), f64::NAN).is_err());
        assert!(CredalEntry::new(f("flu(x)"), 0.5).is_err());
        assert!(CredalEntry::new(f("flu(a)"), 0.0).is_ok());
    }

    #[test]
    fn comparative_irreflexive() {
        assert!(ComparativeEntry::new(f("p"), Relation::Greater, f("p")).is_err());
        assert!(ComparativeEntry::new(f("p"), Relation::Equal, f("p")).is_ok());
    }

    #[test]
    fn rules_are_range_restricted() {
        let body = vec![parse_literal("fever(x)").unwrap()];
        assert!(Rule::new(body.clone(), parse_literal("flu(x)").unwrap()).is_ok());
        assert!(matches!(
            Rule::new(body, parse_literal("flu(y)").unwrap()),
            Err(SymbolicError::RangeRestriction(..))
        ));
        assert!(matches!(
            Rule::new(vec![], parse_literal("flu(a)").unwrap()),
            Err(SymbolicError::EmptyRuleBody)
        ));
    }

    #[test]
    fn contradictory_facts_rejected() {
        let mut kb = KnowledgeBase::new();
        kb.add_fact(parse_literal("flu(b)").unwrap()).unwrap();
        let err = kb.add_fact(parse_literal("~flu(b)").unwrap());
        assert!(matches!(err, Err(SymbolicError::Inconsistency(_))));
        assert_eq!(kb.facts().count(), 1);
    }

    #[test]
    fn threshold_bounds() {
        assert!(AssertionPolicy::new(0.0).is_err());
        assert!(AssertionPolicy::new(1.0).is_ok());
        assert!(AssertionPolicy::new(1.01).is_err());
        assert_eq!(AssertionPolicy::default().threshold(), 0.95);
    }

    #[test]
    fn utterance_wire_text() {
        assert_eq!(
            Utterance::FlatAssert(f("quentin_movie")).to_string(),
            "ASSERT quentin_movie"
        );
        assert_eq!(
            Utterance::HedgedAssert(f("rain_tomorrow"), 0.7).to_string(),
            "ASSERT rain_tomorrow @ 0.7000"
        );
        let q = crate::lang::parse_question("? flu(c)").unwrap();
        assert_eq!(
            Utterance::Abstain(q.clone()).to_string(),
            "ABSTAIN ? flu(c)"
        );
        assert_eq!(Utterance::Ask(q).to_string(), "ASK ? flu(c)");
    }

    #[test]
    fn policy_render_boundaries() {
        let pol = AssertionPolicy::default();
        let p = f("p");
        assert_eq!(pol.render(&p, 0.96), Utterance::FlatAssert(p.clone()));
        assert_eq!(
            pol.render(&p, 0.95),
            Utterance::HedgedAssert(p.clone(), 0.95)
        );
        assert_eq!(pol.render(&p, 0.04), Utterance::FlatAssert(f("~p")));
        assert_eq!(
            pol.render(&p, 0.05),
            Utterance::HedgedAssert(p.clone(), 0.05)
        );
        let strict = AssertionPolicy::new(1.0).unwrap();
        assert_eq!(strict.render(&p, 1.0), Utterance::FlatAssert(p.clone()));
        assert_eq!(strict.render(&p, 0.0), Utterance::FlatAssert(f("~p")));
    }
}
