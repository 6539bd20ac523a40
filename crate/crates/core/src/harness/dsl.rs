//! The line-oriented scenario language.
//!
//! ```text
//! system mycin kind=symbolic
//!   fact fever(a)
//!   rule fever(x) & coughs(x) -> flu(x)
//! end
//! query mycin ? flu(a)
//! expect answer ? flu(a) = open
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::HarnessError;
use crate::ascription::{
    Member, NetworkMember, OverarchingPolicy, ProbeId, Stimulus, SymbolicMember, SystemComposition,
};
use crate::connectionist::{
    Activation, Generalization, LabeledDataset, LabeledItem, Network, NetworkSystem,
    OutputConvention, QuestionScope,
};
use crate::lang::{parse_formula, parse_literal, parse_question, Formula, Literal, Question};
use crate::symbolic::{
    AssertionPolicy, ComparativeEntry, CredalEntry, KnowledgeBase, Relation, Rule,
};

/// A system, or one subsystem of a composition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Target {
    pub system: String,
    pub member: Option<String>,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.member {
            Some(m) => write!(f, "{}.{m}", self.system),
            None => f.write_str(&self.system),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DirectiveKind {
    Query {
        target: Target,
        question: Question,
    },
    ObserveAssert {
        target: Target,
        formula: Formula,
    },
    ObserveInput {
        target: Target,
        input: Vec<f64>,
        evidence: Option<f64>,
        /// Constant the convention's topic variable stands for.
        instance: Option<String>,
    },
    Probe {
        target: Target,
        id: ProbeId,
        stimulus: Stimulus,
    },
    Ascribe {
        target: Target,
        question: Question,
    },
    Expect {
        line: String,
    },
    Train {
        target: Target,
        epochs: usize,
        rate: f64,
    },
    Retract {
        target: Target,
        literal: Literal,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Directive {
    /// 1-based line in the scenario file.
    pub line: usize,
    pub kind: DirectiveKind,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub systems: Vec<SystemComposition>,
    /// Symbolic members whose scenario sets its own assertion threshold,
    /// as (system, member) names.
    pub explicit_thresholds: BTreeSet<(String, String)>,
    pub directives: Vec<Directive>,
}

impl Scenario {
    pub fn system(&self, name: &str) -> Option<&SystemComposition> {
        self.systems.iter().find(|s| s.name == name)
    }
}

struct Lines<'a> {
    file: &'a str,
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(file: &'a str, text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Lines {
            file,
            items,
            pos: 0,
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let it = self.items.get(self.pos).copied();
        self.pos += 1;
        it
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> HarnessError {
        HarnessError::Syntax {
            file: self.file.to_string(),
            line,
            message: msg.into(),
        }
    }
}

fn split_word(s: &str) -> (&str, &str) {
    match s.split_once(char::is_whitespace) {
        Some((a, b)) => (a, b.trim()),
        None => (s, ""),
    }
}

/// Splits on whitespace outside parentheses, so `r(a, b) q` is two items.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a finite real number")),
    }
}

fn reals(s: &str) -> Result<Vec<f64>, String> {
    s.split_whitespace().map(real).collect()
}

fn formula(s: &str) -> Result<Formula, String> {
    parse_formula(s).map_err(|e| format!("in `{s}`: {e}"))
}

fn question(s: &str) -> Result<Question, String> {
    parse_question(s).map_err(|e| format!("in `{s}`: {e}"))
}

fn literal(s: &str) -> Result<Literal, String> {
    parse_literal(s).map_err(|e| format!("in `{s}`: {e}"))
}

/// `<lhs> = <r>`
fn assignment(s: &str) -> Result<(&str, f64), String> {
    let (lhs, rhs) = s
        .rsplit_once('=')
        .ok_or_else(|| format!("expected `<formula> = <number>`, got `{s}`"))?;
    Ok((lhs.trim(), real(rhs.trim())?))
}

fn kind_of(header: &str) -> Result<(&str, &str), String> {
    let (name, rest) = split_word(header);
    let kind = rest
        .strip_prefix("kind=")
        .ok_or_else(|| format!("expected `kind=<symbolic|network|composition>` after {name}"))?;
    if !crate::lang::is_identifier(name) {
        return Err(format!("`{name}` is not a valid system name"));
    }
    Ok((name, kind.trim()))
}

struct SymbolicBlock {
    kb: KnowledgeBase,
    policy: Option<AssertionPolicy>,
    evidence: BTreeMap<Formula, f64>,
}

impl SymbolicBlock {
    fn line(&mut self, keyword: &str, rest: &str) -> Result<(), String> {
        let sym = |e: crate::symbolic::SymbolicError| e.to_string();
        match keyword {
            "cred" => {
                let (f, r) = assignment(rest)?;
                let e = CredalEntry::new(formula(f)?, r).map_err(sym)?;
                self.kb.integrate_credal(e).map_err(sym)
            }
            "cmp" => {
                let (l, rel, r) = if let Some((l, r)) = rest.split_once('>') {
                    (l, Relation::Greater, r)
                } else if let Some((l, r)) = rest.split_once('=') {
                    (l, Relation::Equal, r)
                } else {
                    return Err(format!("expected `<formula> > <formula>`, got `{rest}`"));
                };
                let c = ComparativeEntry::new(formula(l.trim())?, rel, formula(r.trim())?)
                    .map_err(sym)?;
                self.kb.add_comparative(c);
                Ok(())
            }
            "fact" => self.kb.add_fact(literal(rest)?).map_err(sym),
            "rule" => {
                let (body, head) = rest
                    .split_once("->")
                    .ok_or_else(|| format!("expected `<lit> & ... -> <lit>`, got `{rest}`"))?;
                let body = body
                    .split('&')
                    .map(|l| literal(l.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                let rule = Rule::new(body, literal(head.trim())?).map_err(sym)?;
                self.kb.add_rule(rule);
                Ok(())
            }
            "indep" => {
                let fs = split_top_level(rest)
                    .iter()
                    .map(|s| formula(s))
                    .collect::<Result<Vec<_>, _>>()?;
                if fs.len() < 2 {
                    return Err("indep needs at least two atoms".into());
                }
                self.kb.declare_independent(fs).map_err(sym)
            }
            "policy" => {
                let (key, r) = assignment(rest)?;
                if key != "assert_threshold" {
                    return Err(format!("unknown policy `{key}`"));
                }
                self.policy = Some(AssertionPolicy::new(r).map_err(sym)?);
                Ok(())
            }
            "evidence" => evidence_line(&mut self.evidence, rest),
            "constant" => {
                for c in rest.split_whitespace() {
                    self.kb.add_constant(c);
                }
                Ok(())
            }
            other => Err(format!("unknown symbolic line `{other}`")),
        }
    }
}

fn evidence_line(map: &mut BTreeMap<Formula, f64>, rest: &str) -> Result<(), String> {
    let (f, r) = assignment(rest)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(format!("evidence probability {r} is not in [0, 1]"));
    }
    map.insert(formula(f)?, r);
    Ok(())
}

#[derive(Default)]
struct NetworkBlock {
    layers: Vec<usize>,
    activation: Option<Activation>,
    weights: BTreeMap<usize, Vec<f64>>,
    thresholds: BTreeMap<usize, Vec<f64>>,
    convention: Option<OutputConvention>,
    scope: QuestionScope,
    generalizations: Vec<Generalization>,
    items: Vec<LabeledItem>,
    evidence: BTreeMap<Formula, f64>,
}

fn parse_convention(rest: &str) -> Result<OutputConvention, String> {
    let (kind, spec) = split_word(rest);
    let entries = || spec.split(';').map(str::trim).filter(|s| !s.is_empty());
    let mapped = |e: &str| -> Result<(String, String), String> {
        e.split_once("=>")
            .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
            .ok_or_else(|| format!("expected `<code> => <content>`, got `{e}`"))
    };
    match kind {
        "pair" => Ok(OutputConvention::Pair {
            topic: formula(spec)?,
        }),
        "single" => {
            let (topic, third) = match spec.split_once(" third ") {
                Some((t, v)) => (t, Some(real(v.trim())?)),
                None => (spec, None),
            };
            Ok(OutputConvention::Single {
                topic: formula(topic.trim())?,
                third_value: third,
            })
        }
        "per_class" => Ok(OutputConvention::PerClass {
            labels: entries().map(formula).collect::<Result<_, _>>()?,
        }),
        "confidence_suffix" => {
            let mut coding = Vec::new();
            for e in entries() {
                let (code, f) = mapped(e)?;
                let bits = code
                    .split_whitespace()
                    .map(|b| match b {
                        "0" => Ok(0u8),
                        "1" => Ok(1u8),
                        other => Err(format!("`{other}` is not a binary code digit")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                coding.push((bits, formula(&f)?));
            }
            Ok(OutputConvention::ConfidenceSuffix { coding })
        }
        "question_code" => {
            let mut coding = Vec::new();
            for e in entries() {
                let (code, q) = mapped(e)?;
                coding.push((reals(&code)?, question(&q)?));
            }
            Ok(OutputConvention::QuestionCode { coding })
        }
        other => Err(format!("unknown convention `{other}`")),
    }
}

impl NetworkBlock {
    fn line(&mut self, keyword: &str, rest: &str) -> Result<(), String> {
        match keyword {
            "layers" => {
                self.layers = rest
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| format!("bad layer size `{t}`"))
                    })
                    .collect::<Result<_, _>>()?;
                Ok(())
            }
            "activation" => {
                self.activation = Some(match rest {
                    "step" => Activation::Step,
                    "logistic" => Activation::Logistic,
                    other => return Err(format!("unknown activation `{other}`")),
                });
                Ok(())
            }
            "weights" | "thresholds" => {
                let (layer, vals) = split_word(rest);
                let layer: usize = layer
                    .parse()
                    .map_err(|_| format!("expected a layer number, got `{layer}`"))?;
                let map = if keyword == "weights" {
                    &mut self.weights
                } else {
                    &mut self.thresholds
                };
                map.insert(layer, reals(vals)?);
                Ok(())
            }
            "convention" => {
                self.convention = Some(parse_convention(rest)?);
                Ok(())
            }
            "scope" => {
                self.scope.insert(question(rest)?);
                Ok(())
            }
            "generalization" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [f, g] = parts[..] else {
                    return Err("expected `generalization <F> <G>`".into());
                };
                self.generalizations.push(Generalization {
                    antecedent: f.into(),
                    consequent: g.into(),
                    instances: Vec::new(),
                });
                Ok(())
            }
            "instance" => {
                let (c, vals) = split_word(rest);
                let g = self
                    .generalizations
                    .last_mut()
                    .ok_or("instance before any generalization")?;
                g.instances.push((c.to_string(), reals(vals)?));
                Ok(())
            }
            "item" => {
                let (name, rest) = split_word(rest);
                let (vals, votes) = rest
                    .split_once("votes")
                    .ok_or("expected `item <name> <inputs> votes <labels>`")?;
                let item = LabeledItem::new(
                    name,
                    reals(vals)?,
                    votes.split_whitespace().map(String::from).collect(),
                )
                .map_err(|e| e.to_string())?;
                self.items.push(item);
                Ok(())
            }
            "evidence" => evidence_line(&mut self.evidence, rest),
            other => Err(format!("unknown network line `{other}`")),
        }
    }

    fn build(self) -> Result<NetworkMember, String> {
        let n = self.layers.len();
        if n < 2 {
            return Err("network needs `layers` with at least two sizes".into());
        }
        let mut weights = Vec::new();
        let mut thresholds = Vec::new();
        for k in 1..n {
            weights.push(
                self.weights
                    .get(&k)
                    .cloned()
                    .ok_or_else(|| format!("missing weights for layer {k}"))?,
            );
            thresholds.push(
                self.thresholds
                    .get(&k)
                    .cloned()
                    .unwrap_or_else(|| vec![0.0; self.layers[k]]),
            );
        }
        let activation = self.activation.ok_or("missing `activation`")?;
        let net = Network::new(self.layers.clone(), weights, thresholds, activation)
            .map_err(|e| e.to_string())?;
        let conv = self.convention.ok_or("missing `convention`")?;
        let input = net.input_size();
        let check = |what: &str, v: &[f64]| {
            if v.len() == input {
                Ok(())
            } else {
                Err(format!(
                    "dimension mismatch in {what}: expected {input}, got {}",
                    v.len()
                ))
            }
        };
        for g in &self.generalizations {
            for (c, v) in &g.instances {
                check(&format!("instance {c}"), v)?;
            }
        }
        for item in &self.items {
            check(&format!("item {}", item.name), &item.input)?;
        }
        let system = NetworkSystem::new(net, conv, self.scope).map_err(|e| e.to_string())?;
        let mut m = NetworkMember::new(system);
        m.generalizations = self.generalizations;
        m.dataset = LabeledDataset::new(self.items);
        m.evidence = self.evidence;
        Ok(m)
    }
}

fn parse_policy(rest: &str) -> Result<OverarchingPolicy, String> {
    let (kind, args) = split_word(rest);
    let one = || real(args.trim());
    match kind {
        "passthrough" => Ok(OverarchingPolicy::Passthrough),
        "threshold_consumer" => Ok(OverarchingPolicy::ThresholdConsumer { cut: one()? }),
        "learning_loop" => Ok(OverarchingPolicy::LearningLoop { rate: one()? }),
        "arbiter" => Ok(OverarchingPolicy::Arbiter {
            priority: args.split_whitespace().map(String::from).collect(),
        }),
        "symbolic_assertion" => Ok(OverarchingPolicy::SymbolicAssertion(
            AssertionPolicy::new(one()?).map_err(|e| e.to_string())?,
        )),
        other => Err(format!("unknown overarching policy `{other}`")),
    }
}

struct Parser<'a> {
    lines: Lines<'a>,
    explicit: BTreeSet<(String, String)>,
}

impl Parser<'_> {
    /// Parses the body of a symbolic or network block up to its `end`.
    fn leaf(
        &mut self,
        system: &str,
        name: &str,
        kind: &str,
        start: usize,
    ) -> Result<Member, HarnessError> {
        match kind {
            "symbolic" => {
                let mut b = SymbolicBlock {
                    kb: KnowledgeBase::new(),
                    policy: None,
                    evidence: BTreeMap::new(),
                };
                loop {
                    let (n, l) = self.lines.next().ok_or_else(|| {
                        self.lines.err(start, format!("block {name} has no `end`"))
                    })?;
                    if l == "end" {
                        break;
                    }
                    let (kw, rest) = split_word(l);
                    b.line(kw, rest).map_err(|m| self.lines.err(n, m))?;
                }
                if b.policy.is_some() {
                    self.explicit.insert((system.to_string(), name.to_string()));
                }
                let mut m = SymbolicMember::new(b.kb, b.policy.unwrap_or_default());
                m.evidence = b.evidence;
                Ok(Member::symbolic(name, m))
            }
            "network" => {
                let mut b = NetworkBlock::default();
                let end = loop {
                    let (n, l) = self.lines.next().ok_or_else(|| {
                        self.lines.err(start, format!("block {name} has no `end`"))
                    })?;
                    if l == "end" {
                        break n;
                    }
                    let (kw, rest) = split_word(l);
                    b.line(kw, rest).map_err(|m| self.lines.err(n, m))?;
                };
                let m = b.build().map_err(|m| HarnessError::Load {
                    file: self.lines.file.to_string(),
                    line: end,
                    message: format!("network {name}: {m}"),
                })?;
                Ok(Member::network(name, m))
            }
            other => Err(self
                .lines
                .err(start, format!("unknown system kind `{other}`"))),
        }
    }

    fn system(&mut self, header: &str, start: usize) -> Result<SystemComposition, HarnessError> {
        let (name, kind) = kind_of(header).map_err(|m| self.lines.err(start, m))?;
        if kind != "composition" {
            return Ok(SystemComposition::standalone(
                self.leaf(name, name, kind, start)?,
            ));
        }
        let mut members = Vec::new();
        let mut policy = OverarchingPolicy::Passthrough;
        loop {
            let (n, l) = self.lines.next().ok_or_else(|| {
                self.lines
                    .err(start, format!("composition {name} has no `end`"))
            })?;
            if l == "end" {
                break;
            }
            let (kw, rest) = split_word(l);
            match kw {
                "subsystem" => {
                    let (sub, kind) = kind_of(rest).map_err(|m| self.lines.err(n, m))?;
                    members.push(self.leaf(name, sub, kind, n)?);
                }
                "overarching" => policy = parse_policy(rest).map_err(|m| self.lines.err(n, m))?,
                other => {
                    return Err(self
                        .lines
                        .err(n, format!("unknown composition line `{other}`")))
                }
            }
        }
        SystemComposition::new(name, members, policy)
            .map_err(|e| self.lines.err(start, e.to_string()))
    }
}

fn target(s: &str) -> Target {
    match s.split_once('.') {
        Some((sys, m)) => Target {
            system: sys.to_string(),
            member: Some(m.to_string()),
        },
        None => Target {
            system: s.to_string(),
            member: None,
        },
    }
}

fn directive(keyword: &str, rest: &str) -> Result<DirectiveKind, String> {
    let (t, arg) = split_word(rest);
    let t = target(t);
    Ok(match keyword {
        "query" => DirectiveKind::Query {
            target: t,
            question: question(arg)?,
        },
        "ascribe" => DirectiveKind::Ascribe {
            target: t,
            question: question(arg)?,
        },
        "observe" => {
            let (mode, arg) = split_word(arg);
            match mode {
                "assert" => DirectiveKind::ObserveAssert {
                    target: t,
                    formula: formula(arg)?,
                },
                "input" => {
                    let (arg, instance) = match arg.split_once(" as ") {
                        Some((a, c)) => (a, Some(c.trim().to_string())),
                        None => (arg, None),
                    };
                    let (vals, evidence) = match arg.split_once("evidence") {
                        Some((v, e)) => (v, Some(real(e.trim())?)),
                        None => (arg, None),
                    };
                    DirectiveKind::ObserveInput {
                        target: t,
                        input: reals(vals)?,
                        evidence,
                        instance,
                    }
                }
                other => {
                    return Err(format!(
                        "expected `assert` or `input` after observe, got `{other}`"
                    ))
                }
            }
        }
        "probe" => {
            let (id, stim) = split_word(arg);
            let id: ProbeId = id.parse()?;
            let stimulus = match reals(stim) {
                Ok(v) if !v.is_empty() => Stimulus::Input(v),
                _ => Stimulus::Formula(formula(stim)?),
            };
            DirectiveKind::Probe {
                target: t,
                id,
                stimulus,
            }
        }
        "train" => {
            let parts: Vec<&str> = arg.split_whitespace().collect();
            let [epochs, rate] = parts[..] else {
                return Err("expected `train <system> <epochs> <rate>`".into());
            };
            DirectiveKind::Train {
                target: t,
                epochs: epochs
                    .parse()
                    .map_err(|_| format!("`{epochs}` is not an epoch count"))?,
                rate: real(rate)?,
            }
        }
        "retract" => DirectiveKind::Retract {
            target: t,
            literal: literal(arg)?,
        },
        other => return Err(format!("unknown directive `{other}`")),
    })
}

/// Parses scenario text. `file` is used in error messages only.
pub fn parse_scenario(name: &str, file: &str, text: &str) -> Result<Scenario, HarnessError> {
    let mut p = Parser {
        lines: Lines::new(file, text),
        explicit: BTreeSet::new(),
    };
    let mut systems: Vec<SystemComposition> = Vec::new();
    let mut directives = Vec::new();
    while let Some((n, l)) = p.lines.next() {
        let (kw, rest) = split_word(l);
        if kw == "system" {
            let sys = p.system(rest, n)?;
            if systems.iter().any(|s| s.name == sys.name) {
                return Err(p
                    .lines
                    .err(n, format!("system {} declared twice", sys.name)));
            }
            systems.push(sys);
            continue;
        }
        if kw == "expect" {
            directives.push(Directive {
                line: n,
                kind: DirectiveKind::Expect {
                    line: rest.to_string(),
                },
            });
            continue;
        }
        let kind = directive(kw, rest).map_err(|m| p.lines.err(n, m))?;
        let t = match &kind {
            DirectiveKind::Query { target, .. }
            | DirectiveKind::ObserveAssert { target, .. }
            | DirectiveKind::ObserveInput { target, .. }
            | DirectiveKind::Probe { target, .. }
            | DirectiveKind::Ascribe { target, .. }
            | DirectiveKind::Train { target, .. }
            | DirectiveKind::Retract { target, .. } => target,
            DirectiveKind::Expect { .. } => unreachable!(),
        };
        let known = systems
            .iter()
            .find(|s| s.name == t.system)
            .is_some_and(|s| {
                t.member
                    .as_ref()
                    .is_none_or(|m| s.member_index(m).is_some())
            });
        if !known {
            return Err(HarnessError::UnknownSystem {
                file: file.to_string(),
                line: n,
                name: t.to_string(),
            });
        }
        directives.push(Directive { line: n, kind });
    }
    if systems.is_empty() {
        return Err(p.lines.err(1, "no systems declared"));
    }
    Ok(Scenario {
        name: name.to_string(),
        systems,
        explicit_thresholds: p.explicit,
        directives,
    })
}
