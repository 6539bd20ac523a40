//! Independent reference implementations used to cross-check the engines,
//! and random generators for the inputs they are checked on.
//!
//! The oracles share no code with the engines they check: probabilities
//! come from Shannon expansion instead of a world table, entailment from a
//! naive bottom-up fixpoint instead of tabled backward chaining, and network
//! outputs from a hand-rolled forward pass.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::connectionist::{Activation, Network};
use crate::lang::{Atom, Formula, Literal, Term};
use crate::symbolic::{CredalEntry, KnowledgeBase, Rule};

/// Probability of `f` when each atom is independently true with the given
/// marginal. Atoms missing from `marginals` count as false.
pub fn probability(f: &Formula, marginals: &BTreeMap<Atom, f64>) -> f64 {
    let atoms: Vec<Atom> = f.atoms().into_iter().collect();
    shannon(&Partial::Open(f.clone()), &atoms, marginals)
}

#[derive(Clone)]
enum Partial {
    Const(bool),
    Open(Formula),
}

fn restrict(f: &Formula, a: &Atom, v: bool) -> Partial {
    match f {
        Formula::Atom(b) if b == a => Partial::Const(v),
        Formula::Atom(_) => Partial::Open(f.clone()),
        Formula::Not(g) => match restrict(g, a, v) {
            Partial::Const(b) => Partial::Const(!b),
            Partial::Open(g) => Partial::Open(Formula::not(g)),
        },
        Formula::And(l, r) => match (restrict(l, a, v), restrict(r, a, v)) {
            (Partial::Const(false), _) | (_, Partial::Const(false)) => Partial::Const(false),
            (Partial::Const(true), x) | (x, Partial::Const(true)) => x,
            (Partial::Open(l), Partial::Open(r)) => Partial::Open(Formula::and(l, r)),
        },
        Formula::Or(l, r) => match (restrict(l, a, v), restrict(r, a, v)) {
            (Partial::Const(true), _) | (_, Partial::Const(true)) => Partial::Const(true),
            (Partial::Const(false), x) | (x, Partial::Const(false)) => x,
            (Partial::Open(l), Partial::Open(r)) => Partial::Open(Formula::or(l, r)),
        },
    }
}

fn shannon(p: &Partial, atoms: &[Atom], m: &BTreeMap<Atom, f64>) -> f64 {
    match p {
        Partial::Const(b) => f64::from(u8::from(*b)),
        Partial::Open(f) => {
            let (a, rest) = atoms.split_first().expect("every atom gets restricted");
            let pa = m.get(a).copied().unwrap_or(0.0);
            pa * shannon(&restrict(f, a, true), rest, m)
                + (1.0 - pa) * shannon(&restrict(f, a, false), rest, m)
        }
    }
}

/// Every ground literal that follows from `facts` under `rules`, computed by
/// instantiating each rule over `constants` until nothing new appears.
pub fn ground_closure(
    facts: &BTreeSet<Literal>,
    rules: &[Rule],
    constants: &BTreeSet<String>,
) -> BTreeSet<Literal> {
    let consts: Vec<Term> = constants
        .iter()
        .map(|c| Term::Constant(c.clone()))
        .collect();
    let mut known = facts.clone();
    loop {
        let mut new = Vec::new();
        for rule in rules {
            let vars: Vec<Term> = rule
                .body
                .iter()
                .flat_map(|l| l.atom.args.iter())
                .filter(|t| t.is_variable())
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let mut choice = vec![0usize; vars.len()];
            if !vars.is_empty() && consts.is_empty() {
                continue;
            }
            loop {
                let ground = |l: &Literal| {
                    let mut atom = l.atom.clone();
                    for (v, &i) in vars.iter().zip(&choice) {
                        atom = atom.substitute(v, &consts[i]);
                    }
                    Literal {
                        negated: l.negated,
                        atom,
                    }
                };
                if rule.body.iter().all(|l| known.contains(&ground(l))) {
                    let h = ground(&rule.head);
                    if !known.contains(&h) {
                        new.push(h);
                    }
                }
                // Odometer over assignments.
                let mut k = 0;
                while k < choice.len() {
                    choice[k] += 1;
                    if choice[k] < consts.len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
                if k == choice.len() {
                    break;
                }
            }
        }
        if new.is_empty() {
            return known;
        }
        known.extend(new);
    }
}

/// Forward pass written out longhand.
pub fn forward(net: &Network, input: &[f64]) -> Vec<f64> {
    let sizes = net.layer_sizes();
    let mut acts = input.to_vec();
    for (layer, &width) in sizes.iter().enumerate().skip(1) {
        let mut next = vec![0.0; width];
        for (u, out) in next.iter_mut().enumerate() {
            let mut total = 0.0;
            for (from, a) in acts.iter().enumerate() {
                total += net.weight(layer, u, from) * a;
            }
            let t = net.threshold(layer, u);
            *out = match net.activation() {
                Activation::Step => f64::from(u8::from(total >= t)),
                Activation::Logistic => 1.0 / (1.0 + (t - total).exp()),
            };
        }
        acts = next;
    }
    acts
}

/// A random formula over `atoms` with roughly `size` connectives.
pub fn random_formula(rng: &mut impl Rng, atoms: &[Atom], size: usize) -> Formula {
    if size == 0 {
        return Formula::Atom(atoms.choose(rng).expect("at least one atom").clone());
    }
    match rng.gen_range(0..3) {
        0 => Formula::not(random_formula(rng, atoms, size - 1)),
        op => {
            let left = rng.gen_range(0..size);
            let l = random_formula(rng, atoms, left);
            let r = random_formula(rng, atoms, size - 1 - left);
            if op == 1 {
                Formula::and(l, r)
            } else {
                Formula::or(l, r)
            }
        }
    }
}

/// A knowledge base with up to eight independent atoms under random
/// marginals, and a random formula over them.
pub fn random_credal_case(rng: &mut impl Rng) -> (KnowledgeBase, BTreeMap<Atom, f64>, Formula) {
    let n = rng.gen_range(1..=8);
    let atoms: Vec<Atom> = (0..n)
        .map(|i| Atom::new(format!("p{i}"), Vec::new()))
        .collect();
    let mut kb = KnowledgeBase::new();
    let mut marginals = BTreeMap::new();
    for a in &atoms {
        let r: f64 = rng.gen();
        kb.integrate_credal(CredalEntry::new(Formula::Atom(a.clone()), r).expect("r in [0, 1)"))
            .expect("fresh atoms");
        marginals.insert(a.clone(), r);
    }
    kb.declare_independent(atoms.iter().cloned().map(Formula::Atom))
        .expect("ground atoms");
    let size = rng.gen_range(0..12);
    let f = random_formula(rng, &atoms, size);
    (kb, marginals, f)
}

const UNARY: [&str; 5] = ["p", "q", "r", "s", "t"];
const BASE: [&str; 2] = ["p", "q"];

/// A function-free Horn knowledge base: up to ten constants, up to thirty
/// rules, unary predicates plus one binary `link`. Negative literals appear
/// only on base predicates, which no rule concludes, so the base stays
/// consistent.
pub fn random_horn_kb(
    rng: &mut impl Rng,
) -> (
    KnowledgeBase,
    BTreeSet<Literal>,
    Vec<Rule>,
    BTreeSet<String>,
) {
    let nc = rng.gen_range(1..=10);
    let consts: Vec<String> = (0..nc).map(|i| format!("c{i}")).collect();
    let c = |name: &String| Term::Constant(name.clone());
    let x = Term::Variable("x".into());
    let y = Term::Variable("y".into());
    let mut kb = KnowledgeBase::new();
    let mut facts = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=2 * nc) {
        let k = consts.choose(rng).expect("nonempty");
        let lit = if rng.gen_bool(0.2) {
            let a = consts.choose(rng).expect("nonempty");
            Literal::positive(Atom::new("link", vec![c(k), c(a)]))
        } else {
            let p = UNARY.choose(rng).expect("nonempty");
            let atom = Atom::new(*p, vec![c(k)]);
            if BASE.contains(p) && rng.gen_bool(0.3) {
                Literal::negative(atom)
            } else {
                Literal::positive(atom)
            }
        };
        if facts.contains(&lit.complement()) {
            continue;
        }
        facts.insert(lit.clone());
        kb.add_fact(lit).expect("consistent by construction");
    }
    let heads: Vec<&str> = UNARY
        .iter()
        .copied()
        .filter(|p| !BASE.contains(p))
        .collect();
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(0..=30) {
        let body_lit = |rng: &mut dyn rand::RngCore, v: &Term| {
            let p = *UNARY.choose(rng).expect("nonempty");
            let atom = Atom::new(p, vec![v.clone()]);
            if BASE.contains(&p) && rng.gen_bool(0.3) {
                Literal::negative(atom)
            } else {
                Literal::positive(atom)
            }
        };
        let head_pred = *heads.choose(rng).expect("nonempty");
        let rule = if rng.gen_bool(0.3) {
            // p(x) & link(x, y) -> h(y)
            Rule::new(
                vec![
                    body_lit(rng, &x),
                    Literal::positive(Atom::new("link", vec![x.clone(), y.clone()])),
                ],
                Literal::positive(Atom::new(head_pred, vec![y.clone()])),
            )
        } else {
            let n = rng.gen_range(1..=2);
            let body = (0..n).map(|_| body_lit(rng, &x)).collect();
            Rule::new(
                body,
                Literal::positive(Atom::new(head_pred, vec![x.clone()])),
            )
        }
        .expect("range restricted by construction");
        rules.push(rule.clone());
        kb.add_rule(rule);
    }
    for k in &consts {
        kb.add_constant(k);
    }
    (kb, facts, rules, consts.into_iter().collect())
}

/// All ground literals a random Horn base could mention.
pub fn candidate_literals(constants: &BTreeSet<String>) -> Vec<Literal> {
    let terms: Vec<Term> = constants
        .iter()
        .map(|c| Term::Constant(c.clone()))
        .collect();
    let mut out = Vec::new();
    for p in UNARY {
        for t in &terms {
            let a = Atom::new(p, vec![t.clone()]);
            out.push(Literal::positive(a.clone()));
            out.push(Literal::negative(a));
        }
    }
    for s in &terms {
        for t in &terms {
            out.push(Literal::positive(Atom::new(
                "link",
                vec![s.clone(), t.clone()],
            )));
        }
    }
    out
}

/// A random feedforward network with its layer sizes and an input vector.
pub fn random_network(rng: &mut impl Rng, activation: Activation) -> (Network, Vec<f64>) {
    let depth = rng.gen_range(2..=4);
    let sizes: Vec<usize> = (0..depth).map(|_| rng.gen_range(1..=5)).collect();
    let mut weights = Vec::new();
    let mut thresholds = Vec::new();
    for k in 1..depth {
        weights.push(
            (0..sizes[k] * sizes[k - 1])
                .map(|_| rng.gen_range(-4.0..4.0))
                .collect(),
        );
        thresholds.push((0..sizes[k]).map(|_| rng.gen_range(-2.0..2.0)).collect());
    }
    let input = (0..sizes[0]).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let net = Network::new(sizes, weights, thresholds, activation).expect("well formed");
    (net, input)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {} {}/{}",
            self.suite,
            self.cases - self.failures,
            self.cases
        )?;
        if let Some(d) = &self.first_failure {
            write!(f, ": {d}")?;
        }
        Ok(())
    }
}

struct Tally {
    suite: &'static str,
    cases: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new(suite: &'static str) -> Self {
        Tally {
            suite,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, outcome: Result<(), String>) {
        self.cases += 1;
        if let Err(e) = outcome {
            self.failures += 1;
            self.first_failure.get_or_insert(e);
        }
    }

    fn done(self) -> CheckResult {
        CheckResult {
            suite: self.suite,
            cases: self.cases,
            failures: self.failures,
            first_failure: self.first_failure,
        }
    }
}

/// `decide_compound` against Shannon expansion.
pub fn check_compound(cases: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("compound");
    for _ in 0..cases {
        let (mut kb, m, f) = random_credal_case(&mut rng);
        let want = probability(&f, &m);
        t.record(match kb.decide_compound(&f) {
            Ok(Some(e)) if (e.credence - want).abs() <= 1e-12 => Ok(()),
            Ok(Some(e)) => Err(format!("{f}: engine {} oracle {want}", e.credence)),
            Ok(None) => Err(format!("{f}: undetermined")),
            Err(e) => Err(format!("{f}: {e}")),
        });
    }
    t.done()
}

/// Deciding a negation leaves credences in a formula and its complement
/// summing to one.
pub fn check_negation(cases: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("negation");
    for _ in 0..cases {
        let (mut kb, m, f) = random_credal_case(&mut rng);
        let want = 1.0 - probability(&f, &m);
        t.record(match kb.decide_negation(&f) {
            Ok(e) => {
                let back = kb.stored_credence(&f).unwrap_or(f64::NAN);
                if (e.credence - want).abs() > 1e-12 {
                    Err(format!("~({f}): engine {} oracle {want}", e.credence))
                } else if (back + e.credence - 1.0).abs() > 1e-12 {
                    Err(format!("{f}: stored {back} + {} != 1", e.credence))
                } else {
                    Ok(())
                }
            }
            Err(e) => Err(format!("{f}: {e}")),
        });
    }
    t.done()
}

/// Backward chaining against the naive fixpoint, on every candidate
/// literal.
pub fn check_entailment(cases: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("entailment");
    for _ in 0..cases {
        let (kb, facts, rules, consts) = random_horn_kb(&mut rng);
        let closure = ground_closure(&facts, &rules, &consts);
        let mut outcome = Ok(());
        for lit in candidate_literals(&consts) {
            match kb.derives(&lit) {
                Ok(got) if got == closure.contains(&lit) => {}
                Ok(got) => {
                    outcome = Err(format!("{lit}: engine {got}, oracle {}", !got));
                    break;
                }
                Err(e) => {
                    outcome = Err(format!("{lit}: {e}"));
                    break;
                }
            }
        }
        t.record(outcome);
    }
    t.done()
}

/// `Network::forward` against the longhand pass, for both activations.
pub fn check_forward(cases: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new("forward");
    for i in 0..cases {
        let act = if i % 2 == 0 {
            Activation::Logistic
        } else {
            Activation::Step
        };
        let (net, input) = random_network(&mut rng, act);
        let want = forward(&net, &input);
        t.record(match net.forward(&input) {
            Ok(got) if got.iter().zip(&want).all(|(a, b)| (a - b).abs() <= 1e-12) => Ok(()),
            Ok(got) => Err(format!("{input:?}: engine {got:?} oracle {want:?}")),
            Err(e) => Err(e.to_string()),
        });
    }
    t.done()
}

/// Every oracle suite, each with `cases` random inputs.
pub fn run_checks(cases: usize, seed: u64) -> Vec<CheckResult> {
    vec![
        check_compound(cases, seed),
        check_negation(cases, seed.wrapping_add(1)),
        check_entailment(cases, seed.wrapping_add(2)),
        check_forward(cases, seed.wrapping_add(3)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, parse_literal};

    #[test]
    fn shannon_conjunction() {
        let m: BTreeMap<Atom, f64> = [("p", 0.9), ("q", 0.8)]
            .into_iter()
            .map(|(n, r)| (Atom::new(n, Vec::new()), r))
            .collect();
        let f = parse_formula("p & q").unwrap();
        assert!((probability(&f, &m) - 0.72).abs() < 1e-15);
        let f = parse_formula("p | ~p").unwrap();
        assert_eq!(probability(&f, &m), 1.0);
    }

    #[test]
    fn closure_chains_through_links() {
        let facts: BTreeSet<Literal> = ["r(a)", "link(a, b)"]
            .iter()
            .map(|s| parse_literal(s).unwrap())
            .collect();
        let rule = Rule::new(
            vec![
                parse_literal("r(x)").unwrap(),
                parse_literal("link(x, y)").unwrap(),
            ],
            parse_literal("r(y)").unwrap(),
        )
        .unwrap();
        let consts = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let c = ground_closure(&facts, &[rule], &consts);
        assert!(c.contains(&parse_literal("r(b)").unwrap()));
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn suites_pass() {
        for r in run_checks(50, 1) {
            assert!(r.passed(), "{r}");
        }
    }
}
