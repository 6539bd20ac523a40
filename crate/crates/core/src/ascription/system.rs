use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{AscriptionError, EPSILON};
use crate::connectionist::{
    Content, Generalization, LabeledDataset, NetworkStance, NetworkSystem, TruthValue,
};
use crate::lang::{Formula, Question};
use crate::symbolic::{AssertionPolicy, KnowledgeBase, SymbolicStance, Utterance};

#[derive(Debug, Clone)]
pub struct SymbolicMember {
    pub kb: KnowledgeBase,
    pub policy: AssertionPolicy,
    /// Scenario-declared evidence probabilities.
    pub evidence: BTreeMap<Formula, f64>,
}

impl SymbolicMember {
    pub fn new(kb: KnowledgeBase, policy: AssertionPolicy) -> Self {
        SymbolicMember {
            kb,
            policy,
            evidence: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NetworkMember {
    pub system: NetworkSystem,
    pub dataset: LabeledDataset,
    pub generalizations: Vec<Generalization>,
    pub evidence: BTreeMap<Formula, f64>,
    /// Inputs presented so far; the last one is the current input.
    pub observed: Vec<Vec<f64>>,
}

impl NetworkMember {
    pub fn new(system: NetworkSystem) -> Self {
        NetworkMember {
            system,
            dataset: LabeledDataset::default(),
            generalizations: Vec::new(),
            evidence: BTreeMap::new(),
            observed: Vec::new(),
        }
    }

    pub fn current_input(&self) -> Option<&[f64]> {
        self.observed.last().map(Vec::as_slice)
    }

    pub fn generalization_for(&self, q: &Question) -> Option<&Generalization> {
        self.generalizations.iter().find(|g| &g.question() == q)
    }

    /// Decodes `input`, instantiating a topic variable with a constant of
    /// `target` when the plain reading says nothing about it.
    pub fn decode_about(
        &self,
        input: &[f64],
        target: &Formula,
    ) -> Result<Content, AscriptionError> {
        let out = self.system.net.forward(input)?;
        let plain = self.system.convention.decode(&out)?;
        if plain.stance_on(target).is_some() {
            return Ok(plain);
        }
        for c in target.constants() {
            let inst = self.system.convention.instantiate(&c).decode(&out)?;
            if inst.stance_on(target).is_some() {
                return Ok(inst);
            }
        }
        Ok(plain)
    }

    /// Whether the network was designed to decide `q`.
    pub fn covers(&self, q: &Question) -> bool {
        if self.system.scope.contains(q) {
            return true;
        }
        let Question::Polar(body) = q else {
            return false;
        };
        let consts: BTreeSet<String> = body.constants();
        self.system.scope.iter().any(|s| match s {
            Question::Polar(b) => {
                let matches = |g: &Formula| g == body || &g.complement() == body;
                matches(b)
                    || consts.iter().any(|c| {
                        let x = crate::lang::Term::Variable("x".into());
                        matches(&b.substitute(&x, &crate::lang::Term::Constant(c.clone())))
                    })
            }
            _ => false,
        })
    }
}

#[derive(Debug, Clone)]
pub enum MemberBody {
    Symbolic(SymbolicMember),
    Network(NetworkMember),
}

#[derive(Debug, Clone)]
pub struct Member {
    pub name: String,
    pub body: MemberBody,
}

/// A member's stance on a target formula (or on a wh-question).
#[derive(Debug, Clone, PartialEq)]
pub enum Stance {
    Credence(f64),
    Settled(bool),
    /// A closed wh-question answered with this instance.
    Answered(Formula),
    Open,
    /// The member's output is the question itself.
    Asks,
    /// The member says nothing about the target.
    Silent,
}

impl Stance {
    /// The same stance pushed to certainty in its own direction.
    pub fn extremized(&self) -> Stance {
        match self {
            Stance::Credence(r) => Stance::Credence(if *r >= 0.5 { 1.0 } else { 0.0 }),
            Stance::Open | Stance::Asks => Stance::Settled(true),
            other => other.clone(),
        }
    }
}

fn prompt(q: &Question, target: &Formula) -> Question {
    match q {
        Question::Polar(_) => Question::Polar(target.clone()),
        wh => wh.clone(),
    }
}

fn render_settled(q: &Question, target: &Formula, s: &Stance) -> Utterance {
    match s {
        Stance::Settled(true) => Utterance::FlatAssert(target.clone()),
        Stance::Settled(false) => Utterance::FlatAssert(target.complement()),
        Stance::Answered(f) => Utterance::FlatAssert(f.clone()),
        Stance::Asks => Utterance::Ask(q.clone()),
        Stance::Credence(_) | Stance::Open | Stance::Silent => {
            Utterance::Abstain(prompt(q, target))
        }
    }
}

impl Member {
    pub fn symbolic(name: impl Into<String>, m: SymbolicMember) -> Self {
        Member {
            name: name.into(),
            body: MemberBody::Symbolic(m),
        }
    }

    pub fn network(name: impl Into<String>, m: NetworkMember) -> Self {
        Member {
            name: name.into(),
            body: MemberBody::Network(m),
        }
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicMember> {
        match &self.body {
            MemberBody::Symbolic(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_network(&self) -> Option<&NetworkMember> {
        match &self.body {
            MemberBody::Network(n) => Some(n),
            _ => None,
        }
    }

    pub fn evidence(&self) -> &BTreeMap<Formula, f64> {
        match &self.body {
            MemberBody::Symbolic(s) => &s.evidence,
            MemberBody::Network(n) => &n.evidence,
        }
    }

    /// Stance on `target` for question `q`; networks read `input` when
    /// given, their current input otherwise.
    pub fn stance(
        &self,
        q: &Question,
        target: &Formula,
        input: Option<&[f64]>,
    ) -> Result<Stance, AscriptionError> {
        match &self.body {
            MemberBody::Symbolic(s) => match q {
                Question::Polar(_) => Ok(match s.kb.stance(target)? {
                    SymbolicStance::Credence(r) => Stance::Credence(r),
                    SymbolicStance::Settled(b) => Stance::Settled(b),
                    SymbolicStance::Open => Stance::Open,
                }),
                wh => Ok(match s.kb.respond(&s.policy, wh)? {
                    Utterance::FlatAssert(f) => Stance::Answered(f),
                    _ => Stance::Open,
                }),
            },
            MemberBody::Network(n) => {
                let Some(input) = input.or_else(|| n.current_input()) else {
                    return Ok(Stance::Silent);
                };
                let content = n.decode_about(input, target)?;
                Ok(match content.stance_on(target) {
                    Some(NetworkStance::Verdict(TruthValue::True)) => Stance::Settled(true),
                    Some(NetworkStance::Verdict(TruthValue::False)) => Stance::Settled(false),
                    Some(NetworkStance::Verdict(TruthValue::Neither)) => Stance::Open,
                    Some(NetworkStance::Credence(r)) => Stance::Credence(r),
                    None => match content {
                        Content::Question(c) if &c == q => Stance::Asks,
                        _ => Stance::Silent,
                    },
                })
            }
        }
    }

    /// What the member says on its own.
    pub fn render(&self, q: &Question, target: &Formula, s: &Stance) -> Utterance {
        match (s, &self.body) {
            (Stance::Credence(r), MemberBody::Symbolic(m)) => m.policy.render(target, *r),
            (Stance::Credence(r), MemberBody::Network(_)) => {
                if *r >= 1.0 - EPSILON {
                    Utterance::FlatAssert(target.clone())
                } else if *r <= EPSILON {
                    Utterance::FlatAssert(target.complement())
                } else {
                    Utterance::HedgedAssert(target.clone(), *r)
                }
            }
            _ => render_settled(q, target, s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OverarchingPolicy {
    /// The (first) member speaks for the whole system.
    Passthrough,
    /// Flat-asserts whatever clears the cut, abstains otherwise.
    ThresholdConsumer { cut: f64 },
    /// Feeds every output into a delta-rule update; says what the member says.
    LearningLoop { rate: f64 },
    /// The highest-priority member with a stance speaks.
    Arbiter { priority: Vec<String> },
    /// Renders the member's credence with an assertion threshold.
    SymbolicAssertion(AssertionPolicy),
}

impl fmt::Display for OverarchingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OverarchingPolicy::Passthrough => f.write_str("passthrough"),
            OverarchingPolicy::ThresholdConsumer { cut } => write!(f, "threshold_consumer {cut}"),
            OverarchingPolicy::LearningLoop { rate } => write!(f, "learning_loop {rate}"),
            OverarchingPolicy::Arbiter { priority } => write!(f, "arbiter {}", priority.join(" ")),
            OverarchingPolicy::SymbolicAssertion(p) => {
                write!(f, "symbolic_assertion {}", p.threshold())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SystemComposition {
    pub name: String,
    pub members: Vec<Member>,
    pub policy: OverarchingPolicy,
}

impl SystemComposition {
    pub fn new(
        name: impl Into<String>,
        members: Vec<Member>,
        policy: OverarchingPolicy,
    ) -> Result<Self, AscriptionError> {
        let name = name.into();
        let bad = |m: String| Err(AscriptionError::InvalidComposition(m));
        if members.is_empty() {
            return bad(format!("{name} has no subsystems"));
        }
        let names: BTreeSet<&str> = members.iter().map(|m| m.name.as_str()).collect();
        if names.len() != members.len() {
            return bad(format!("{name} has duplicate subsystem names"));
        }
        match &policy {
            OverarchingPolicy::Arbiter { priority } => {
                let listed: BTreeSet<&str> = priority.iter().map(String::as_str).collect();
                if listed != names || priority.len() != members.len() {
                    return bad("arbiter priority must list every subsystem exactly once".into());
                }
            }
            OverarchingPolicy::ThresholdConsumer { cut } if !(*cut > 0.0 && *cut < 1.0) => {
                return bad(format!("threshold_consumer cut {cut} is not in (0, 1)"));
            }
            OverarchingPolicy::LearningLoop { rate } if !(rate.is_finite() && *rate > 0.0) => {
                return bad(format!("learning_loop rate {rate} must be positive"));
            }
            _ => {}
        }
        Ok(SystemComposition {
            name,
            members,
            policy,
        })
    }

    /// A lone system, speaking for itself.
    pub fn standalone(member: Member) -> Self {
        SystemComposition {
            name: member.name.clone(),
            members: vec![member],
            policy: OverarchingPolicy::Passthrough,
        }
    }

    pub fn member_index(&self, name: &str) -> Option<usize> {
        self.members.iter().position(|m| m.name == name)
    }

    /// Member indices in the order the policy consults them.
    pub fn order(&self) -> Vec<usize> {
        match &self.policy {
            OverarchingPolicy::Arbiter { priority } => priority
                .iter()
                .filter_map(|n| self.member_index(n))
                .collect(),
            _ => (0..self.members.len()).collect(),
        }
    }

    /// Every member's stance on `target`. `inputs` overrides the current
    /// input of the listed network members.
    pub fn stances(
        &self,
        q: &Question,
        target: &Formula,
        inputs: &[(usize, &[f64])],
    ) -> Result<Vec<Stance>, AscriptionError> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let input = inputs.iter().find(|(j, _)| *j == i).map(|(_, v)| *v);
                m.stance(q, target, input)
            })
            .collect()
    }

    /// The member whose stance reaches the outside, if any.
    pub fn speaker(&self, stances: &[Stance]) -> Option<usize> {
        self.order()
            .into_iter()
            .find(|&i| stances[i] != Stance::Silent)
    }

    /// Whole-system utterance given every member's stance.
    pub fn respond(&self, q: &Question, target: &Formula, stances: &[Stance]) -> Utterance {
        let Some(i) = self.speaker(stances) else {
            return Utterance::Abstain(prompt(q, target));
        };
        let s = &stances[i];
        match (&self.policy, s) {
            (OverarchingPolicy::ThresholdConsumer { cut }, Stance::Credence(r)) => {
                if *r > *cut {
                    Utterance::FlatAssert(target.clone())
                } else if 1.0 - r > *cut {
                    Utterance::FlatAssert(target.complement())
                } else {
                    Utterance::Abstain(prompt(q, target))
                }
            }
            (OverarchingPolicy::ThresholdConsumer { .. }, _) => render_settled(q, target, s),
            (OverarchingPolicy::SymbolicAssertion(pol), Stance::Credence(r)) => {
                pol.render(target, *r)
            }
            _ => self.members[i].render(q, target, s),
        }
    }

    /// Observable handling of the stances: the utterance, except for a
    /// learning loop, which does the same thing with every output.
    pub fn behavior(&self, q: &Question, target: &Formula, stances: &[Stance]) -> String {
        match &self.policy {
            OverarchingPolicy::LearningLoop { rate } => format!("TRAIN rate={rate}"),
            _ => self.respond(q, target, stances).to_string(),
        }
    }

    /// Prompts the whole system to assert on `f`.
    pub fn assert_on(&self, f: &Formula) -> Result<Utterance, AscriptionError> {
        let q = Question::Polar(f.clone());
        let stances = self.stances(&q, f, &[])?;
        Ok(self.respond(&q, f, &stances))
    }

    /// Whole-system response to a question.
    pub fn answer(&self, q: &Question) -> Result<Utterance, AscriptionError> {
        let stances = self.stances(q, q.body(), &[])?;
        Ok(self.respond(q, q.body(), &stances))
    }
}
