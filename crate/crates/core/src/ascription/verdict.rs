use std::fmt;

use super::{
    nonextreme, AscriptionError, MemberBody, ProbeId, ProbeSet, Stance, SystemComposition, Trace,
};
use crate::connectionist::{
    data_uncertainty_measure, model_uncertainty_scan, pointwise_states, Content, NetworkStance,
    PointwiseCandidate, ScanReport, ScanVerdict, TruthValue,
};
use crate::lang::{Formula, Question};
use crate::symbolic::{Answer, Kind, KnowledgeBase, Mode, ModeReport, SymbolicError, Utterance};

/// Where a candidate state lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locus {
    /// A stored credal entry or interrogative.
    Stored,
    /// Derivable from stored contents without new information.
    Derived,
    /// Carried by the weights as a whole.
    Distributive,
    /// Carried by one output activation vector.
    Pointwise,
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Locus::Stored => "stored",
            Locus::Derived => "derived",
            Locus::Distributive => "distributive",
            Locus::Pointwise => "pointwise",
        })
    }
}

/// A state that might realize uncertainty about the question.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub member: usize,
    pub member_name: String,
    pub kind: Kind,
    pub mode: Mode,
    pub credence: Option<f64>,
    pub locus: Locus,
    /// Formula the system is prompted on when probing the candidate.
    pub target: Formula,
    /// Input that puts a network into the candidate state.
    pub stimulus: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberReport {
    pub member: String,
    pub covers: bool,
    pub mode: Option<ModeReport>,
    pub scan: Option<ScanReport>,
    pub candidate: Option<Candidate>,
    /// A network that could hold a point-wise candidate but was given no
    /// inputs to look at.
    pub needs_inputs: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateReport {
    pub members: Vec<MemberReport>,
    /// The candidate of the first member, in policy order, that has one.
    pub primary: Option<Candidate>,
}

impl CandidateReport {
    pub fn present(&self) -> bool {
        self.primary.is_some()
    }
}

fn credence_about(formula: &Formula, credence: f64, target: &Formula) -> Option<f64> {
    if formula == target {
        Some(credence)
    } else if &formula.complement() == target {
        Some(1.0 - credence)
    } else {
        None
    }
}

/// Per-member candidate states for `q`, read from internal structure only.
pub fn cognitive_ascribe(
    sys: &SystemComposition,
    q: &Question,
    probes: &ProbeSet,
) -> Result<CandidateReport, AscriptionError> {
    let mut members = Vec::with_capacity(sys.members.len());
    for (i, m) in sys.members.iter().enumerate() {
        let mut rep = MemberReport {
            member: m.name.clone(),
            covers: false,
            mode: None,
            scan: None,
            candidate: None,
            needs_inputs: false,
            notes: Vec::new(),
        };
        match &m.body {
            MemberBody::Symbolic(s) => {
                rep.covers = true;
                let mode = match s.kb.classify_mode(q) {
                    Ok(mode) => mode,
                    Err(SymbolicError::NotGround(_)) => {
                        rep.notes
                            .push(format!("{}: question is not ground", m.name));
                        members.push(rep);
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                };
                if mode.in_position_to_answer {
                    rep.notes.push(format!(
                        "{}: stored question is now answerable from its contents",
                        m.name
                    ));
                }
                if mode.kind != Kind::None {
                    let credence = match (mode.kind, q) {
                        (Kind::Probabilistic, Question::Polar(f)) => {
                            s.kb.stored_credence(f).or(s.kb.evaluate_compound(f)?)
                        }
                        _ => None,
                    };
                    rep.candidate = Some(Candidate {
                        member: i,
                        member_name: m.name.clone(),
                        kind: mode.kind,
                        mode: mode.mode,
                        credence,
                        locus: if mode.mode == Mode::Explicit {
                            Locus::Stored
                        } else {
                            Locus::Derived
                        },
                        target: q.body().clone(),
                        stimulus: None,
                    });
                }
                rep.mode = Some(mode);
            }
            MemberBody::Network(n) => {
                let net = &n.system.net;
                if let Some(g) = n.generalization_for(q) {
                    rep.covers = true;
                    let scan =
                        model_uncertainty_scan(net, &n.system.convention, g, &n.system.scope)?;
                    if scan.verdict == ScanVerdict::DistributivelyUncertain {
                        let w = scan
                            .witness
                            .clone()
                            .expect("uncertain scans name a witness");
                        let input = g
                            .instances
                            .iter()
                            .find(|(c, _)| *c == w)
                            .map(|(_, v)| v.clone());
                        let target = n
                            .system
                            .convention
                            .instantiate(&w)
                            .topic()
                            .cloned()
                            .expect("scans need a topic convention");
                        rep.candidate = Some(Candidate {
                            member: i,
                            member_name: m.name.clone(),
                            kind: Kind::Categorical,
                            mode: Mode::Implicit,
                            credence: None,
                            locus: Locus::Distributive,
                            target,
                            stimulus: input,
                        });
                    }
                    rep.notes.push(format!("{}: scan {}", m.name, scan.verdict));
                    rep.scan = Some(scan);
                } else if n.covers(q) {
                    rep.covers = true;
                    let inputs: Vec<&[f64]> = probes
                        .inputs(net.input_size())
                        .chain(n.observed.iter().map(Vec::as_slice))
                        .collect();
                    rep.needs_inputs = inputs.is_empty();
                    'inputs: for input in inputs {
                        for c in pointwise_states(net, &n.system.convention, input)? {
                            let found = match (&c, q) {
                                (
                                    PointwiseCandidate::Probabilistic { formula, credence },
                                    Question::Polar(body),
                                ) => credence_about(formula, *credence, body)
                                    .filter(|r| nonextreme(*r))
                                    .map(|r| (Kind::Probabilistic, Some(r))),
                                (PointwiseCandidate::Categorical { question }, _)
                                    if question == q =>
                                {
                                    Some((Kind::Categorical, None))
                                }
                                _ => None,
                            };
                            if let Some((kind, credence)) = found {
                                rep.candidate = Some(Candidate {
                                    member: i,
                                    member_name: m.name.clone(),
                                    kind,
                                    mode: Mode::Explicit,
                                    credence,
                                    locus: Locus::Pointwise,
                                    target: q.body().clone(),
                                    stimulus: Some(input.to_vec()),
                                });
                                break 'inputs;
                            }
                        }
                    }
                }
            }
        }
        members.push(rep);
    }
    if !members.iter().any(|r| r.covers) {
        return Err(AscriptionError::OutOfScope {
            system: sys.name.clone(),
            question: q.clone(),
        });
    }
    let primary = sys
        .order()
        .into_iter()
        .find_map(|i| members[i].candidate.clone());
    Ok(CandidateReport { members, primary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BehavioralReading {
    Uncertain,
    NotUncertain,
    Silent,
}

impl fmt::Display for BehavioralReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BehavioralReading::Uncertain => "uncertain",
            BehavioralReading::NotUncertain => "not_uncertain",
            BehavioralReading::Silent => "silent",
        })
    }
}

fn concerns(u: &Utterance, q: &Question) -> bool {
    let body = q.body();
    match u {
        Utterance::Ask(x) | Utterance::Abstain(x) if x == q => true,
        _ => {
            let s = u.subject();
            s == body || *s == body.complement()
        }
    }
}

/// Reads the latest utterance in `trace` that concerns `q`.
pub fn behavioral_ascribe(trace: &Trace, q: &Question) -> BehavioralReading {
    match trace.events().iter().rev().find(|(_, u)| concerns(u, q)) {
        Some((_, u)) if u.is_flat() => BehavioralReading::NotUncertain,
        Some(_) => BehavioralReading::Uncertain,
        None => BehavioralReading::Silent,
    }
}

pub fn detect_level_split(cog: &CandidateReport, beh: BehavioralReading) -> bool {
    cog.present() && beh == BehavioralReading::NotUncertain
}

/// True when the categorical base (facts and rules, credal entries ignored)
/// leaves `q` open.
fn categorical_open(kb: &KnowledgeBase, q: &Question) -> Result<bool, SymbolicError> {
    match q {
        Question::Polar(f) if f.is_ground() => match f.as_literal() {
            Some(lit) => Ok(kb.resolve_literal(&lit)? == Answer::Open),
            None => {
                for a in f.atoms() {
                    let lit = crate::lang::Literal::positive(a);
                    if kb.resolve_literal(&lit)? == Answer::Open {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        },
        Question::Polar(_) => Ok(true),
        wh => Ok(kb.clone().pose_query(wh)?.answer == Answer::Open),
    }
}

fn evidence_nonextreme(m: &super::Member, body: &Formula) -> bool {
    let comp = body.complement();
    m.evidence()
        .iter()
        .any(|(f, r)| (f == body || *f == comp) && nonextreme(*r))
}

/// Whether the information the system possesses leaves `q` unsettled.
/// Nothing about how the system renders or handles its states enters here.
pub fn epistemic_ascribe(sys: &SystemComposition, q: &Question) -> Result<bool, AscriptionError> {
    let body = q.body();
    let any_evidence = sys.members.iter().any(|m| evidence_nonextreme(m, body));
    let mut settled_somewhere = false;
    let mut uncertain = any_evidence;
    for m in &sys.members {
        match &m.body {
            MemberBody::Symbolic(s) => {
                if categorical_open(&s.kb, q)? {
                    uncertain = true;
                } else {
                    settled_somewhere = true;
                }
            }
            MemberBody::Network(n) => {
                let names = body.constants();
                let data = data_uncertainty_measure(&n.dataset);
                if data
                    .items
                    .iter()
                    .any(|i| i.flagged && names.contains(&i.name))
                {
                    uncertain = true;
                }
                if let Some(g) = n.generalization_for(q) {
                    let scan = model_uncertainty_scan(
                        &n.system.net,
                        &n.system.convention,
                        g,
                        &n.system.scope,
                    )?;
                    if scan.verdict == ScanVerdict::DistributivelyUncertain {
                        uncertain = true;
                    }
                }
            }
        }
    }
    if settled_somewhere && !any_evidence {
        return Ok(false);
    }
    Ok(uncertain)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeResult {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for ProbeResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeResult::Pass => "p",
            ProbeResult::Fail => "f",
            ProbeResult::NotApplicable => "na",
        })
    }
}

impl ProbeResult {
    fn from_bool(b: bool) -> Self {
        if b {
            ProbeResult::Pass
        } else {
            ProbeResult::Fail
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoleProbes {
    pub r1: ProbeResult,
    pub r2: ProbeResult,
    pub r3: ProbeResult,
}

impl RoleProbes {
    pub const NOT_APPLICABLE: RoleProbes = RoleProbes {
        r1: ProbeResult::NotApplicable,
        r2: ProbeResult::NotApplicable,
        r3: ProbeResult::NotApplicable,
    };

    pub fn get(&self, id: ProbeId) -> ProbeResult {
        match id {
            ProbeId::R1 => self.r1,
            ProbeId::R2 => self.r2,
            ProbeId::R3 => self.r3,
        }
    }

    pub fn all_applicable_pass(&self) -> bool {
        ProbeId::ALL
            .iter()
            .all(|id| self.get(*id) != ProbeResult::Fail)
    }
}

impl fmt::Display for RoleProbes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R1:{},R2:{},R3:{}", self.r1, self.r2, self.r3)
    }
}

struct ProbeContext<'a> {
    sys: &'a SystemComposition,
    q: &'a Question,
    cand: &'a Candidate,
    probes: &'a ProbeSet,
}

impl ProbeContext<'_> {
    fn target(&self, id: ProbeId) -> Formula {
        match &self.sys.members[self.cand.member].body {
            MemberBody::Symbolic(_) => self
                .probes
                .formula_for(id)
                .cloned()
                .unwrap_or_else(|| self.cand.target.clone()),
            MemberBody::Network(_) => self.cand.target.clone(),
        }
    }

    fn stimulus(&self, id: ProbeId) -> Result<Option<Vec<f64>>, AscriptionError> {
        match &self.sys.members[self.cand.member].body {
            MemberBody::Symbolic(_) => Ok(None),
            MemberBody::Network(n) => self
                .probes
                .input_for(id, n.system.net.input_size())
                .map(<[f64]>::to_vec)
                .or_else(|| self.cand.stimulus.clone())
                .map(Some)
                .ok_or_else(|| AscriptionError::MissingProbeInputs {
                    system: self.sys.name.clone(),
                    probe: id.to_string(),
                }),
        }
    }

    fn stances(&self, id: ProbeId, target: &Formula) -> Result<Vec<Stance>, AscriptionError> {
        let stim = self.stimulus(id)?;
        let inputs: Vec<(usize, &[f64])> = stim
            .as_deref()
            .map(|v| vec![(self.cand.member, v)])
            .unwrap_or_default();
        self.sys.stances(self.q, target, &inputs)
    }

    /// Hedging: prompted to assert, the system does not assert flatly.
    fn r1(&self) -> Result<ProbeResult, AscriptionError> {
        let target = self.target(ProbeId::R1);
        let stances = self.stances(ProbeId::R1, &target)?;
        let u = self.sys.respond(self.q, &target, &stances);
        Ok(ProbeResult::from_bool(!u.is_flat()))
    }

    /// Propagation: deciding the negation yields the coherent complement.
    fn r2(&self) -> Result<ProbeResult, AscriptionError> {
        if !self.q.is_polar() {
            return Ok(ProbeResult::NotApplicable);
        }
        let target = self.target(ProbeId::R2);
        match &self.sys.members[self.cand.member].body {
            MemberBody::Symbolic(s) => match self.cand.kind {
                Kind::Probabilistic => {
                    let Some(r) = s.kb.stance(&target).ok().and_then(|st| match st {
                        crate::symbolic::SymbolicStance::Credence(r) => Some(r),
                        _ => None,
                    }) else {
                        return Ok(ProbeResult::NotApplicable);
                    };
                    let mut kb = s.kb.clone();
                    match kb.decide_negation(&target) {
                        Ok(e) => Ok(ProbeResult::from_bool(
                            (e.credence - (1.0 - r)).abs() <= 1e-12,
                        )),
                        Err(SymbolicError::NoCredalEntry(_)) => Ok(ProbeResult::NotApplicable),
                        Err(SymbolicError::Inconsistency(_)) => Ok(ProbeResult::Fail),
                        Err(e) => Err(e.into()),
                    }
                }
                _ => match target.complement().as_literal() {
                    Some(lit) => Ok(ProbeResult::from_bool(
                        s.kb.resolve_literal(&lit)? == Answer::Open,
                    )),
                    None => Ok(ProbeResult::NotApplicable),
                },
            },
            MemberBody::Network(n) => {
                let stim = self.stimulus(ProbeId::R2)?.expect("networks take inputs");
                let content = n.decode_about(&stim, &target)?;
                let comp = target.complement();
                let coherent = match &content {
                    Content::Verdict { .. } => {
                        let t = Some(NetworkStance::Verdict(TruthValue::True));
                        !(content.stance_on(&target) == t && content.stance_on(&comp) == t)
                    }
                    Content::Credences(cs) => {
                        let pos = cs.iter().find(|(f, _)| *f == target).map(|(_, r)| *r);
                        let neg = cs.iter().find(|(f, _)| *f == comp).map(|(_, r)| *r);
                        match (pos, neg) {
                            (Some(a), Some(b)) => (a + b - 1.0).abs() <= super::EPSILON,
                            _ => true,
                        }
                    }
                    Content::Question(_) => true,
                };
                Ok(ProbeResult::from_bool(coherent))
            }
        }
    }

    /// Specificity: the system handles the candidate differently from the
    /// corresponding certainty.
    fn r3(&self) -> Result<ProbeResult, AscriptionError> {
        if !self.q.is_polar() {
            return Ok(ProbeResult::NotApplicable);
        }
        let target = self.target(ProbeId::R3);
        let stances = self.stances(ProbeId::R3, &target)?;
        let mut certain = stances.clone();
        certain[self.cand.member] = certain[self.cand.member].extremized();
        let a = self.sys.behavior(self.q, &target, &stances);
        let b = self.sys.behavior(self.q, &target, &certain);
        Ok(ProbeResult::from_bool(a != b))
    }
}

/// Runs the three functional-role probes on `cand`.
pub fn role_check(
    sys: &SystemComposition,
    q: &Question,
    cand: &Candidate,
    probes: &ProbeSet,
) -> Result<RoleProbes, AscriptionError> {
    let ctx = ProbeContext {
        sys,
        q,
        cand,
        probes,
    };
    Ok(RoleProbes {
        r1: ctx.r1()?,
        r2: ctx.r2()?,
        r3: ctx.r3()?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscriptionVerdict {
    pub question: Question,
    pub epistemic: bool,
    pub subjective: bool,
    pub kind: Kind,
    pub mode: Mode,
    pub cognitive_candidate: bool,
    pub behavioral_reading: BehavioralReading,
    pub level_split: bool,
    pub role_probes: RoleProbes,
    pub notes: Vec<String>,
    pub second_solution_note: String,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl AscriptionVerdict {
    /// The one-line machine-readable form.
    pub fn line(&self, system: &str) -> String {
        format!(
            "VERDICT {system} {} epistemic={} subjective={} kind={} mode={} split={} probes={}",
            self.question,
            yes_no(self.epistemic),
            yes_no(self.subjective),
            self.kind,
            self.mode,
            yes_no(self.level_split),
            self.role_probes
        )
    }
}

/// Assembles the full verdict: subjective uncertainty only where a
/// candidate state plays every applicable uncertainty role.
pub fn first_solution_verdict(
    sys: &SystemComposition,
    q: &Question,
    trace: &Trace,
    probes: &ProbeSet,
) -> Result<AscriptionVerdict, AscriptionError> {
    let cog = cognitive_ascribe(sys, q, probes)?;
    if !cog.present() {
        if let Some(r) = cog.members.iter().find(|r| r.needs_inputs) {
            return Err(AscriptionError::MissingProbeInputs {
                system: format!("{}/{}", sys.name, r.member),
                probe: "R1".into(),
            });
        }
    }
    let beh = behavioral_ascribe(trace, q);
    let split = detect_level_split(&cog, beh);
    let epistemic = epistemic_ascribe(sys, q)?;
    let mut notes: Vec<String> = cog.members.iter().flat_map(|r| r.notes.clone()).collect();
    notes.push(format!("behavior: {beh}"));
    let (probes_res, subjective) = match &cog.primary {
        Some(c) => {
            let res = role_check(sys, q, c, probes)?;
            let mut note = format!(
                "candidate in {}: {} {} ({})",
                c.member_name, c.kind, c.mode, c.locus
            );
            if let Some(r) = c.credence {
                note.push_str(&format!(" credence {r:.4}"));
            }
            notes.push(note);
            (res, res.all_applicable_pass() && !split)
        }
        None => {
            notes.push("no candidate state".into());
            (RoleProbes::NOT_APPLICABLE, false)
        }
    };
    if split {
        notes.push(
            "candidate state plays no uncertainty role; per First Solution, no realization at any level"
                .into(),
        );
    }
    let (kind, mode) = match (&cog.primary, subjective) {
        (Some(c), true) => (c.kind, c.mode),
        _ => (Kind::None, Mode::None),
    };
    let second_solution_note = match (&cog.primary, subjective) {
        (Some(c), false) => format!(
            "a Second Solution reading would grant uncertainty in {} that the larger system ignores",
            c.member_name
        ),
        (Some(_), true) => "a Second Solution reading agrees".into(),
        (None, _) => "no candidate state; a Second Solution reading has nothing to grant".into(),
    };
    Ok(AscriptionVerdict {
        question: q.clone(),
        epistemic,
        subjective,
        kind,
        mode,
        cognitive_candidate: cog.present(),
        behavioral_reading: beh,
        level_split: split,
        role_probes: probes_res,
        notes,
        second_solution_note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ascription::{Member, NetworkMember, OverarchingPolicy, Stimulus, SymbolicMember};
    use crate::connectionist::{
        Activation, Network, NetworkSystem, OutputConvention, QuestionScope,
    };
    use crate::lang::{parse_formula, parse_literal, parse_question};
    use crate::symbolic::{AssertionPolicy, CredalEntry, Rule};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn q(s: &str) -> Question {
        parse_question(s).unwrap()
    }

    fn symbolic(name: &str, entries: &[(&str, f64)], threshold: f64) -> Member {
        let mut kb = KnowledgeBase::new();
        for (b, r) in entries {
            kb.integrate_credal(CredalEntry::new(f(b), *r).unwrap())
                .unwrap();
        }
        Member::symbolic(
            name,
            SymbolicMember::new(kb, AssertionPolicy::new(threshold).unwrap()),
        )
    }

    fn verdict(sys: &SystemComposition, question: &str, trace: &Trace) -> AscriptionVerdict {
        first_solution_verdict(sys, &q(question), trace, &ProbeSet::new()).unwrap()
    }

    #[test]
    fn quentin_splits() {
        let sys =
            SystemComposition::standalone(symbolic("quentin", &[("quentin_movie", 0.96)], 0.95));
        let mut trace = Trace::new();
        trace.push("assert", sys.assert_on(&f("quentin_movie")).unwrap());
        assert_eq!(trace.events()[0].1.to_string(), "ASSERT quentin_movie");
        let v = verdict(&sys, "? quentin_movie", &trace);
        assert_eq!(
            v.line("quentin"),
            "VERDICT quentin ? quentin_movie epistemic=yes subjective=no kind=none mode=none split=yes probes=R1:f,R2:p,R3:f"
        );
    }

    #[test]
    fn hedging_kb_is_uncertain() {
        let sys = SystemComposition::standalone(symbolic("kb", &[("rain", 0.7)], 0.95));
        let v = verdict(&sys, "? rain", &Trace::new());
        assert!(v.epistemic && v.subjective);
        assert_eq!((v.kind, v.mode), (Kind::Probabilistic, Mode::Explicit));
        assert_eq!(v.role_probes.to_string(), "R1:p,R2:p,R3:p");
        assert_eq!(v.behavioral_reading, BehavioralReading::Silent);
    }

    #[test]
    fn settled_kb_has_no_candidate() {
        let mut kb = KnowledgeBase::new();
        kb.add_fact(parse_literal("flu(a)").unwrap()).unwrap();
        let sys = SystemComposition::standalone(Member::symbolic(
            "kb",
            SymbolicMember::new(kb, AssertionPolicy::default()),
        ));
        let v = verdict(&sys, "? flu(a)", &Trace::new());
        assert!(!v.cognitive_candidate && !v.epistemic && !v.subjective);
        assert_eq!(v.role_probes, RoleProbes::NOT_APPLICABLE);
    }

    #[test]
    fn stale_credal_dissociation() {
        let mut kb = KnowledgeBase::new();
        kb.add_fact(parse_literal("fever(a)").unwrap()).unwrap();
        kb.add_rule(
            Rule::new(
                vec![parse_literal("fever(a)").unwrap()],
                parse_literal("flu(a)").unwrap(),
            )
            .unwrap(),
        );
        kb.integrate_credal(CredalEntry::new(f("flu(a)"), 0.7).unwrap())
            .unwrap();
        let sys = SystemComposition::standalone(Member::symbolic(
            "kb",
            SymbolicMember::new(kb, AssertionPolicy::default()),
        ));
        let v = verdict(&sys, "? flu(a)", &Trace::new());
        assert!(!v.epistemic);
        assert!(v.subjective);
    }

    #[test]
    fn maria_open_question() {
        let mut kb = KnowledgeBase::new();
        kb.pose_query(&q("?x open: largest_planet(x)")).unwrap();
        let sys = SystemComposition::standalone(Member::symbolic(
            "maria",
            SymbolicMember::new(kb, AssertionPolicy::default()),
        ));
        let v = verdict(&sys, "?x open: largest_planet(x)", &Trace::new());
        assert_eq!(
            v.line("maria"),
            "VERDICT maria ?x open: largest_planet(x) epistemic=yes subjective=yes kind=cat mode=explicit split=no probes=R1:p,R2:na,R3:na"
        );
    }

    fn confidence_net() -> NetworkMember {
        let net = Network::new(
            vec![1, 2],
            vec![vec![5.0, (17.0f64 / 3.0).ln()]],
            vec![vec![0.0, 0.0]],
            Activation::Logistic,
        )
        .unwrap();
        let conv = OutputConvention::ConfidenceSuffix {
            coding: vec![(vec![1], f("p"))],
        };
        let sys = NetworkSystem::new(net, conv, QuestionScope::new([q("? p")])).unwrap();
        NetworkMember::new(sys)
    }

    fn probes() -> ProbeSet {
        let mut p = ProbeSet::new();
        p.add(super::ProbeId::R1, Stimulus::Input(vec![1.0]));
        p
    }

    #[test]
    fn threshold_consumer_fails_r1_r3() {
        let sys = SystemComposition::new(
            "consumer",
            vec![Member::network("net", confidence_net())],
            OverarchingPolicy::ThresholdConsumer { cut: 0.8 },
        )
        .unwrap();
        let v = first_solution_verdict(&sys, &q("? p"), &Trace::new(), &probes()).unwrap();
        assert!(v.cognitive_candidate);
        assert_eq!(v.role_probes.r1, ProbeResult::Fail);
        assert_eq!(v.role_probes.r3, ProbeResult::Fail);
        assert!(!v.subjective);
    }

    #[test]
    fn learning_loop_fails_r3() {
        let sys = SystemComposition::new(
            "loop",
            vec![Member::network("net", confidence_net())],
            OverarchingPolicy::LearningLoop { rate: 0.5 },
        )
        .unwrap();
        let v = first_solution_verdict(&sys, &q("? p"), &Trace::new(), &probes()).unwrap();
        assert_eq!(v.role_probes.r1, ProbeResult::Pass);
        assert_eq!(v.role_probes.r3, ProbeResult::Fail);
        assert!(!v.subjective);
    }

    #[test]
    fn network_without_inputs_needs_probes() {
        let sys = SystemComposition::standalone(Member::network("net", confidence_net()));
        let err = first_solution_verdict(&sys, &q("? p"), &Trace::new(), &ProbeSet::new());
        assert!(matches!(
            err,
            Err(AscriptionError::MissingProbeInputs { .. })
        ));
    }

    #[test]
    fn out_of_scope_network() {
        let sys = SystemComposition::standalone(Member::network("net", confidence_net()));
        assert!(matches!(
            cognitive_ascribe(&sys, &q("? r"), &ProbeSet::new()),
            Err(AscriptionError::OutOfScope { .. })
        ));
    }

    fn arbiter(prio: [&str; 2]) -> SystemComposition {
        SystemComposition::new(
            "comp",
            vec![
                symbolic("a", &[("p", 1.0)], 0.95),
                symbolic("b", &[("p", 0.6)], 0.95),
            ],
            OverarchingPolicy::Arbiter {
                priority: prio.iter().map(|s| s.to_string()).collect(),
            },
        )
        .unwrap()
    }

    #[test]
    fn arbiter_override_kills_candidate() {
        let v = verdict(&arbiter(["a", "b"]), "? p", &Trace::new());
        assert!(v.cognitive_candidate);
        assert!(!v.subjective);
        let v = verdict(&arbiter(["b", "a"]), "? p", &Trace::new());
        assert!(v.subjective);
    }

    #[test]
    fn behavioral_readings() {
        let mut t = Trace::new();
        assert_eq!(behavioral_ascribe(&t, &q("? p")), BehavioralReading::Silent);
        t.push("s", Utterance::HedgedAssert(f("p"), 0.7));
        assert_eq!(
            behavioral_ascribe(&t, &q("? p")),
            BehavioralReading::Uncertain
        );
        t.push("s", Utterance::FlatAssert(f("~p")));
        assert_eq!(
            behavioral_ascribe(&t, &q("? p")),
            BehavioralReading::NotUncertain
        );
        t.push("s", Utterance::FlatAssert(f("r")));
        assert_eq!(
            behavioral_ascribe(&t, &q("? p")),
            BehavioralReading::NotUncertain
        );
        assert_eq!(
            behavioral_ascribe(&t, &q("? r")),
            BehavioralReading::NotUncertain
        );
        assert_eq!(behavioral_ascribe(&t, &q("? s")), BehavioralReading::Silent);
    }
}
