// Goal-directed resolution over function-free Horn literals.
//
// A goal is turned into a call pattern (predicate, sign, and which argument
// positions are bound). Rules whose heads unify with a pattern contribute
// call patterns for their body literals, bound by the head alone. Answer
// tables for every reachable pattern are then saturated to a fixpoint, so
// recursive rules terminate and a pattern's table equals the least model
// restricted to that pattern. Tables persist inside a `Prover`, so repeated
// queries against one knowledge base reuse earlier work.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use super::{KnowledgeBase, Rule, SymbolicError};
use crate::lang::{Literal, Question, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    Open,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Open => "open",
        })
    }
}

type Tuple = Vec<String>;
type Binding = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Pattern {
    negated: bool,
    predicate: String,
    bound: Vec<Option<String>>,
}

impl Pattern {
    fn of(lit: &Literal, binding: &Binding) -> Pattern {
        Pattern {
            negated: lit.negated,
            predicate: lit.atom.predicate.clone(),
            bound: lit
                .atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Constant(c) => Some(c.clone()),
                    Term::Variable(v) => binding.get(v).cloned(),
                })
                .collect(),
        }
    }

    fn same_relation(&self, lit: &Literal) -> bool {
        self.negated == lit.negated
            && self.predicate == lit.atom.predicate
            && self.bound.len() == lit.atom.args.len()
    }

    fn accepts(&self, tuple: &[String]) -> bool {
        self.bound
            .iter()
            .zip(tuple)
            .all(|(b, t)| b.as_ref().is_none_or(|b| b == t))
    }
}

/// Extends `binding` so that `args` matches `tuple`, or returns `None`.
fn unify(args: &[Term], tuple: &[String], binding: &Binding) -> Option<Binding> {
    let mut out = binding.clone();
    for (arg, value) in args.iter().zip(tuple) {
        match arg {
            Term::Constant(c) => {
                if c != value {
                    return None;
                }
            }
            Term::Variable(v) => match out.get(v) {
                Some(bound) if bound != value => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), value.clone());
                }
            },
        }
    }
    Some(out)
}

fn head_binding(rule: &Rule, pattern: &Pattern) -> Option<Binding> {
    if !pattern.same_relation(&rule.head) {
        return None;
    }
    let mut binding = Binding::new();
    for (arg, bound) in rule.head.atom.args.iter().zip(&pattern.bound) {
        match (arg, bound) {
            (Term::Constant(c), Some(b)) if c != b => return None,
            (Term::Variable(v), Some(b)) => match binding.get(v) {
                Some(prev) if prev != b => return None,
                _ => {
                    binding.insert(v.clone(), b.clone());
                }
            },
            _ => {}
        }
    }
    Some(binding)
}

fn ground_tuple(lit: &Literal) -> Tuple {
    lit.atom.args.iter().map(|t| t.name().to_string()).collect()
}

/// Memoized prover over one knowledge base.
pub struct Prover<'a> {
    kb: &'a KnowledgeBase,
    tables: BTreeMap<Pattern, BTreeSet<Tuple>>,
}

impl<'a> Prover<'a> {
    pub fn new(kb: &'a KnowledgeBase) -> Self {
        Prover {
            kb,
            tables: BTreeMap::new(),
        }
    }

    /// Whether the ground literal is in the least fixpoint of facts under
    /// rules.
    pub fn derives(&mut self, lit: &Literal) -> Result<bool, SymbolicError> {
        if !lit.is_ground() {
            return Err(SymbolicError::NotGround(lit.to_string()));
        }
        let goal = Pattern::of(lit, &Binding::new());
        self.table(goal.clone())?;
        Ok(self.tables[&goal].contains(&ground_tuple(lit)))
    }

    /// All derivable ground instances of a (possibly non-ground) literal.
    pub fn instances(&mut self, lit: &Literal) -> Result<Vec<Literal>, SymbolicError> {
        let goal = Pattern::of(lit, &Binding::new());
        self.table(goal.clone())?;
        let mut out = Vec::new();
        for tuple in &self.tables[&goal] {
            if let Some(b) = unify(&lit.atom.args, tuple, &Binding::new()) {
                let args = lit
                    .atom
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Variable(v) => Term::Constant(b[v].clone()),
                        c => c.clone(),
                    })
                    .collect();
                out.push(Literal {
                    negated: lit.negated,
                    atom: crate::lang::Atom::new(lit.atom.predicate.clone(), args),
                });
            }
        }
        Ok(out)
    }

    fn table(&mut self, goal: Pattern) -> Result<(), SymbolicError> {
        if self.tables.contains_key(&goal) {
            return Ok(());
        }
        let limit = self.kb.config.depth_limit;
        let mut fresh = Vec::new();
        let mut queue = VecDeque::from([(goal, 0usize)]);
        while let Some((pattern, depth)) = queue.pop_front() {
            if self.tables.contains_key(&pattern) {
                continue;
            }
            if depth > limit {
                for p in &fresh {
                    self.tables.remove(p);
                }
                return Err(SymbolicError::DepthLimit(limit));
            }
            let seed: BTreeSet<Tuple> = self
                .kb
                .facts
                .iter()
                .filter(|f| pattern.same_relation(f))
                .map(ground_tuple)
                .filter(|t| pattern.accepts(t))
                .collect();
            for rule in &self.kb.rules {
                if let Some(hb) = head_binding(rule, &pattern) {
                    for lit in &rule.body {
                        let call = Pattern::of(lit, &hb);
                        if !self.tables.contains_key(&call) {
                            queue.push_back((call, depth + 1));
                        }
                    }
                }
            }
            self.tables.insert(pattern.clone(), seed);
            fresh.push(pattern);
        }
        if !fresh.is_empty() {
            self.saturate();
        }
        Ok(())
    }

    // Naive iteration over every tabled pattern until no table grows. Old
    // tables stay sound when new patterns arrive, so re-saturating is enough.
    fn saturate(&mut self) {
        let patterns: Vec<Pattern> = self.tables.keys().cloned().collect();
        loop {
            let mut grew = false;
            for pattern in &patterns {
                for rule in &self.kb.rules {
                    let Some(hb) = head_binding(rule, pattern) else {
                        continue;
                    };
                    let mut frontier = vec![hb.clone()];
                    for lit in &rule.body {
                        let call = Pattern::of(lit, &hb);
                        let answers = &self.tables[&call];
                        let mut next = Vec::new();
                        for b in &frontier {
                            for t in answers {
                                if let Some(ext) = unify(&lit.atom.args, t, b) {
                                    next.push(ext);
                                }
                            }
                        }
                        frontier = next;
                        if frontier.is_empty() {
                            break;
                        }
                    }
                    for b in frontier {
                        let tuple: Tuple = rule
                            .head
                            .atom
                            .args
                            .iter()
                            .map(|t| match t {
                                Term::Constant(c) => c.clone(),
                                Term::Variable(v) => b[v].clone(),
                            })
                            .collect();
                        if pattern.accepts(&tuple) {
                            let table = self.tables.get_mut(pattern).expect("tabled");
                            grew |= table.insert(tuple);
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
    }
}

impl KnowledgeBase {
    pub fn prover(&self) -> Prover<'_> {
        Prover::new(self)
    }

    /// Whether a ground literal follows from the facts under the rules.
    pub fn derives(&self, lit: &Literal) -> Result<bool, SymbolicError> {
        self.prover().derives(lit)
    }

    /// Settles a polar question whose body is a ground literal: `Yes` when
    /// the literal derives, `No` when its complement does, `Open` otherwise.
    /// Failure to derive is not falsity.
    pub fn resolve_query(&self, q: &Question) -> Result<Answer, SymbolicError> {
        let Question::Polar(body) = q else {
            return Err(SymbolicError::UnsupportedQuestion(q.to_string()));
        };
        let lit = body
            .as_literal()
            .ok_or_else(|| SymbolicError::NotALiteral(body.clone()))?;
        self.resolve_literal(&lit)
    }

    pub(crate) fn resolve_literal(&self, lit: &Literal) -> Result<Answer, SymbolicError> {
        let mut prover = self.prover();
        let yes = prover.derives(lit)?;
        let no = prover.derives(&lit.complement())?;
        match (yes, no) {
            (true, true) => Err(SymbolicError::Inconsistency(format!(
                "both `{lit}` and `{}` derive",
                lit.complement()
            ))),
            (true, false) => Ok(Answer::Yes),
            (false, true) => Ok(Answer::No),
            (false, false) => Ok(Answer::Open),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_literal, parse_question};
    use crate::symbolic::{EngineConfig, Rule};

    fn lit(s: &str) -> Literal {
        parse_literal(s).unwrap()
    }

    fn rule(body: &[&str], head: &str) -> Rule {
        Rule::new(body.iter().map(|b| lit(b)).collect(), lit(head)).unwrap()
    }

    fn mycin() -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        kb.add_fact(lit("fever(a)")).unwrap();
        kb.add_fact(lit("coughs(a)")).unwrap();
        kb.add_rule(rule(&["fever(x)", "coughs(x)"], "flu(x)"));
        kb
    }

    fn ask(kb: &KnowledgeBase, q: &str) -> Answer {
        kb.resolve_query(&parse_question(q).unwrap()).unwrap()
    }

    #[test]
    fn flu_from_symptoms() {
        assert_eq!(ask(&mycin(), "? flu(a)"), Answer::Yes);
        assert_eq!(ask(&mycin(), "? ~flu(a)"), Answer::No);
    }

    #[test]
    fn missing_symptom_leaves_question_open() {
        let mut kb = mycin();
        kb.remove_fact(&lit("coughs(a)"));
        assert_eq!(ask(&kb, "? flu(a)"), Answer::Open);
    }

    #[test]
    fn stored_negative_fact() {
        let mut kb = KnowledgeBase::new();
        kb.add_fact(lit("~flu(b)")).unwrap();
        assert_eq!(ask(&kb, "? flu(b)"), Answer::No);
    }

    #[test]
    fn empty_kb_is_open() {
        assert_eq!(ask(&KnowledgeBase::new(), "? flu(c)"), Answer::Open);
    }

    #[test]
    fn negated_literals_in_rules() {
        let mut kb = KnowledgeBase::new();
        kb.add_fact(lit("~vaccinated(a)")).unwrap();
        kb.add_fact(lit("exposed(a)")).unwrap();
        kb.add_rule(rule(&["exposed(x)", "~vaccinated(x)"], "at_risk(x)"));
        kb.add_rule(rule(&["at_risk(x)"], "~cleared(x)"));
        assert_eq!(ask(&kb, "? cleared(a)"), Answer::No);
        assert_eq!(ask(&kb, "? at_risk(a)"), Answer::Yes);
        assert_eq!(ask(&kb, "? vaccinated(a)"), Answer::No);
    }

    #[test]
    fn recursive_rules_terminate() {
        let mut kb = KnowledgeBase::new();
        for (a, b) in [("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")] {
            kb.add_fact(lit(&format!("edge({a}, {b})"))).unwrap();
        }
        kb.add_rule(rule(&["edge(x, y)"], "reach(x, y)"));
        kb.add_rule(rule(&["reach(x, z)", "reach(z, y)"], "reach(x, y)"));
        assert_eq!(ask(&kb, "? reach(a, d)"), Answer::Yes);
        assert_eq!(ask(&kb, "? reach(a, a)"), Answer::Yes);
        assert_eq!(ask(&kb, "? reach(d, a)"), Answer::Open);
    }

    #[test]
    fn body_only_variables_and_repeated_variables() {
        let mut kb = KnowledgeBase::new();
        kb.add_fact(lit("likes(a, a)")).unwrap();
        kb.add_fact(lit("likes(b, c)")).unwrap();
        kb.add_rule(rule(&["likes(x, x)"], "narcissist(x)"));
        kb.add_rule(rule(&["likes(x, y)"], "social(x)"));
        assert_eq!(ask(&kb, "? narcissist(a)"), Answer::Yes);
        assert_eq!(ask(&kb, "? narcissist(b)"), Answer::Open);
        assert_eq!(ask(&kb, "? social(b)"), Answer::Yes);
    }

    #[test]
    fn both_polarities_is_an_inconsistency() {
        let mut kb = KnowledgeBase::new();
        kb.add_fact(lit("p")).unwrap();
        kb.add_rule(rule(&["p"], "~q"));
        kb.add_rule(rule(&["p"], "q"));
        assert!(matches!(
            kb.resolve_query(&parse_question("? q").unwrap()),
            Err(SymbolicError::Inconsistency(_))
        ));
    }

    #[test]
    fn compound_bodies_are_rejected() {
        let kb = KnowledgeBase::new();
        assert!(matches!(
            kb.resolve_query(&parse_question("? p & q").unwrap()),
            Err(SymbolicError::NotALiteral(_))
        ));
        assert!(matches!(
            kb.resolve_query(&parse_question("?x: p(x)").unwrap()),
            Err(SymbolicError::UnsupportedQuestion(_))
        ));
    }

    #[test]
    fn depth_limit_is_enforced() {
        let mut kb = KnowledgeBase::with_config(EngineConfig { depth_limit: 2 });
        kb.add_fact(lit("p0")).unwrap();
        for i in 0..5 {
            kb.add_rule(rule(&[&format!("p{i}")], &format!("p{}", i + 1)));
        }
        assert!(matches!(
            kb.resolve_query(&parse_question("? p5").unwrap()),
            Err(SymbolicError::DepthLimit(2))
        ));
        kb.set_config(EngineConfig::default());
        assert_eq!(ask(&kb, "? p5"), Answer::Yes);
    }

    #[test]
    fn instances_of_open_goal() {
        let mut kb = mycin();
        kb.add_fact(lit("fever(b)")).unwrap();
        kb.add_fact(lit("coughs(b)")).unwrap();
        kb.add_fact(lit("fever(c)")).unwrap();
        let got = kb.prover().instances(&lit("flu(x)")).unwrap();
        assert_eq!(got, vec![lit("flu(a)"), lit("flu(b)")]);
    }
}
