//! The formula and question language shared by every engine.
//!
//! The language is a function-free fragment: atoms over variables and
//! constants, closed under negation (`~`), conjunction (`&`) and disjunction
//! (`|`). Questions are either polar (`? flu(a)`) or wh-questions over a
//! single variable, with a closed or open answer domain
//! (`?x open: largest_planet(x)`).
//!
//! ```
//! use uncertainty_lab::lang::{parse_formula, parse_question, Question};
//!
//! let f = parse_formula("fever(x) & coughs(x)").unwrap();
//! assert_eq!(f.to_string(), "fever(x) & coughs(x)");
//!
//! let q = parse_question("?x open: largest_planet(x)").unwrap();
//! assert!(matches!(q, Question::Wh { .. }));
//! ```

mod display;
mod parser;

use std::collections::BTreeSet;

pub use parser::{parse_formula, parse_literal, parse_question};

/// Names reserved for variables. Everything else matching the identifier
/// pattern is a constant.
pub const VARIABLE_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LangError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("wh variable `{var}` does not occur in the question body")]
    VariableNotInBody { var: String },
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("`{0}` is not a literal")]
    NotALiteral(String),
}

impl LangError {
    pub(crate) fn syntax(offset: usize, message: impl Into<String>) -> Self {
        LangError::Syntax {
            offset,
            message: message.into(),
        }
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

pub fn is_variable_name(s: &str) -> bool {
    VARIABLE_NAMES.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Variable(String),
    Constant(String),
}

impl Term {
    /// Classifies an identifier: one of the six reserved names is a
    /// variable, anything else a constant.
    pub fn ident(name: &str) -> Result<Term, LangError> {
        if !is_identifier(name) {
            return Err(LangError::InvalidIdentifier(name.to_string()));
        }
        Ok(if is_variable_name(name) {
            Term::Variable(name.to_string())
        } else {
            Term::Constant(name.to_string())
        })
    }

    pub fn variable(name: &str) -> Result<Term, LangError> {
        match Term::ident(name)? {
            t @ Term::Variable(_) => Ok(t),
            Term::Constant(n) => Err(LangError::InvalidIdentifier(n)),
        }
    }

    pub fn constant(name: &str) -> Result<Term, LangError> {
        match Term::ident(name)? {
            t @ Term::Constant(_) => Ok(t),
            Term::Variable(n) => Err(LangError::InvalidIdentifier(n)),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Variable(n) | Term::Constant(n) => n,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_variable())
    }

    pub fn substitute(&self, var: &Term, c: &Term) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self
                .args
                .iter()
                .map(|t| if t == var { c.clone() } else { t.clone() })
                .collect(),
        }
    }
}

/// An atom or a negated atom. Facts, rule bodies and rule heads are made of
/// these.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub negated: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal {
            negated: false,
            atom,
        }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal {
            negated: true,
            atom,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            negated: !self.negated,
            atom: self.atom.clone(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }

    pub fn to_formula(&self) -> Formula {
        let a = Formula::Atom(self.atom.clone());
        if self.negated {
            Formula::not(a)
        } else {
            a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(Atom::new(predicate, args))
    }

    /// A zero-argument atom, `p`.
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::atom(name, Vec::new())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    /// Strips one outer negation, or adds one.
    pub fn complement(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Atom(a) => Some(Literal::positive(a.clone())),
            Formula::Not(inner) => match &**inner {
                Formula::Atom(a) => Some(Literal::negative(a.clone())),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        self.as_literal().is_some()
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Formula::Atom(a) => a.is_ground(),
            Formula::Not(f) => f.is_ground(),
            Formula::And(l, r) | Formula::Or(l, r) => l.is_ground() && r.is_ground(),
        }
    }

    /// Distinct atoms, in sorted order.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    fn terms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Atom(a) => out.extend(a.args.iter()),
                Formula::Not(g) => stack.push(g),
                Formula::And(l, r) | Formula::Or(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms()
            .into_iter()
            .filter(|t| t.is_variable())
            .map(|t| t.name().to_string())
            .collect()
    }

    pub fn constants(&self) -> BTreeSet<String> {
        self.terms()
            .into_iter()
            .filter(|t| !t.is_variable())
            .map(|t| t.name().to_string())
            .collect()
    }

    pub fn mentions(&self, t: &Term) -> bool {
        self.terms().into_iter().any(|u| u == t)
    }

    /// Replaces every occurrence of `var` with `c`.
    pub fn substitute(&self, var: &Term, c: &Term) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.substitute(var, c)),
            Formula::Not(f) => Formula::not(f.substitute(var, c)),
            Formula::And(l, r) => Formula::and(l.substitute(var, c), r.substitute(var, c)),
            Formula::Or(l, r) => Formula::or(l.substitute(var, c), r.substitute(var, c)),
        }
    }

    /// Classical truth value under an assignment to atoms.
    pub fn eval<F: Fn(&Atom) -> bool>(&self, value: &F) -> bool {
        match self {
            Formula::Atom(a) => value(a),
            Formula::Not(f) => !f.eval(value),
            Formula::And(l, r) => l.eval(value) && r.eval(value),
            Formula::Or(l, r) => l.eval(value) || r.eval(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    Closed,
    /// No candidate-answer set is available.
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Question {
    Polar(Formula),
    Wh {
        var: Term,
        body: Formula,
        domain: Domain,
    },
}

impl Question {
    pub fn polar(body: Formula) -> Self {
        Question::Polar(body)
    }

    pub fn wh(var: Term, body: Formula, domain: Domain) -> Result<Self, LangError> {
        if !var.is_variable() {
            return Err(LangError::InvalidIdentifier(var.name().to_string()));
        }
        if !body.mentions(&var) {
            return Err(LangError::VariableNotInBody {
                var: var.name().to_string(),
            });
        }
        Ok(Question::Wh { var, body, domain })
    }

    pub fn body(&self) -> &Formula {
        match self {
            Question::Polar(b) => b,
            Question::Wh { body, .. } => body,
        }
    }

    pub fn is_polar(&self) -> bool {
        matches!(self, Question::Polar(_))
    }

    pub fn is_open_wh(&self) -> bool {
        matches!(
            self,
            Question::Wh {
                domain: Domain::Open,
                ..
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> Term {
        Term::constant(n).unwrap()
    }

    fn v(n: &str) -> Term {
        Term::variable(n).unwrap()
    }

    #[test]
    fn term_classification() {
        assert!(Term::ident("x").unwrap().is_variable());
        assert!(!Term::ident("x1").unwrap().is_variable());
        assert!(!Term::ident("a").unwrap().is_variable());
        assert!(Term::ident("X").is_err());
        assert!(Term::ident("").is_err());
        assert!(Term::constant("w").is_err());
        assert!(Term::variable("b").is_err());
    }

    #[test]
    fn substitute_grounds_flu() {
        let f = parse_formula("flu(x)").unwrap();
        assert_eq!(
            f.substitute(&v("x"), &c("a")),
            parse_formula("flu(a)").unwrap()
        );
    }

    #[test]
    fn substitute_without_occurrence_is_identity() {
        let f = parse_formula("p").unwrap();
        assert_eq!(f.substitute(&v("x"), &c("a")), f);
    }

    #[test]
    fn substitute_conjunction() {
        let f = parse_formula("bear(x) & mammal(x)").unwrap();
        let g = f.substitute(&v("x"), &c("b7"));
        assert_eq!(g, parse_formula("bear(b7) & mammal(b7)").unwrap());
        assert!(g.is_ground());
    }

    #[test]
    fn complement_strips_or_adds() {
        let p = Formula::prop("p");
        assert_eq!(p.complement(), Formula::not(p.clone()));
        assert_eq!(p.complement().complement(), p);
    }

    #[test]
    fn literal_view() {
        let f = parse_formula("~flu(b)").unwrap();
        let l = f.as_literal().unwrap();
        assert!(l.negated);
        assert_eq!(l.to_formula(), f);
        assert!(parse_formula("p & q").unwrap().as_literal().is_none());
        assert!(parse_formula("~~p").unwrap().as_literal().is_none());
    }

    #[test]
    fn wh_requires_variable_in_body() {
        let err = Question::wh(v("y"), parse_formula("mammal(x)").unwrap(), Domain::Closed);
        assert_eq!(
            err,
            Err(LangError::VariableNotInBody {
                var: "y".to_string()
            })
        );
    }
}
