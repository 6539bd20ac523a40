use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::dsl::{DirectiveKind, Scenario, Target};
use super::HarnessError;
use crate::ascription::{
    first_solution_verdict, MemberBody, NetworkMember, ProbeSet, SymbolicMember, SystemComposition,
    Trace,
};
use crate::connectionist::{
    data_uncertainty_measure, model_uncertainty_scan, overconfidence_audit, Content,
    OutputConvention, OverconfidenceWindow,
};
use crate::lang::{Formula, Question};
use crate::symbolic::{Answer, AssertionPolicy, EngineConfig};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    /// Threshold for symbolic systems that do not set their own.
    pub assert_threshold: Option<f64>,
    pub depth_limit: Option<usize>,
    pub window: OverconfidenceWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Utter,
    Verdict,
    Flag,
    Expect,
    Info,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportLine {
    pub kind: LineKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectFailure {
    pub line: usize,
    pub expected: String,
    pub actual: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Lines,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "lines" => Ok(Format::Lines),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub scenario: String,
    pub lines: Vec<ReportLine>,
    pub expectations_passed: usize,
    pub failures: Vec<ExpectFailure>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn lines_of(&self, kind: LineKind) -> impl Iterator<Item = &str> {
        self.lines
            .iter()
            .filter(move |l| l.kind == kind)
            .map(|l| l.text.as_str())
    }

    pub fn contains(&self, text: &str) -> bool {
        self.lines.iter().any(|l| l.text == text)
    }

    pub fn emit(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Lines => {
                for l in self.lines.iter().filter(|l| l.kind != LineKind::Info) {
                    out.push_str(&l.text);
                    out.push('\n');
                }
            }
            Format::Text => {
                let _ = writeln!(out, "scenario {}", self.scenario);
                let _ = writeln!(out, "\n== transcript ==");
                for l in &self.lines {
                    let _ = writeln!(out, "{}", l.text);
                }
                for (title, kind) in [("verdicts", LineKind::Verdict), ("flags", LineKind::Flag)] {
                    let ls: Vec<&str> = self.lines_of(kind).collect();
                    if !ls.is_empty() {
                        let _ = writeln!(out, "\n== {title} ==");
                        for l in ls {
                            let _ = writeln!(out, "{l}");
                        }
                    }
                }
                let _ = writeln!(out, "\n== expectations ==");
                for f in &self.failures {
                    let _ = writeln!(out, "line {}: expected `{}`; got:", f.line, f.expected);
                    for a in &f.actual {
                        let _ = writeln!(out, "    {a}");
                    }
                }
                let _ = writeln!(
                    out,
                    "{} passed, {} failed",
                    self.expectations_passed,
                    self.failures.len()
                );
            }
        }
        out
    }
}

fn show(f: &Formula) -> String {
    match f {
        Formula::And(..) | Formula::Or(..) => format!("({f})"),
        _ => f.to_string(),
    }
}

fn vector(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

struct Runner<'a> {
    scenario: &'a Scenario,
    opts: RunOptions,
    systems: BTreeMap<String, SystemComposition>,
    traces: BTreeMap<String, Trace>,
    probes: BTreeMap<String, ProbeSet>,
    lines: Vec<ReportLine>,
    last: Vec<String>,
    current: Vec<String>,
    line: usize,
}

impl Runner<'_> {
    fn err(&self, message: impl Into<String>) -> HarnessError {
        HarnessError::Runtime {
            scenario: self.scenario.name.clone(),
            line: self.line,
            message: message.into(),
        }
    }

    fn emit(&mut self, kind: LineKind, text: String) {
        if kind != LineKind::Expect {
            self.current.push(text.clone());
        }
        self.lines.push(ReportLine { kind, text });
    }

    fn system(&self, t: &Target) -> &SystemComposition {
        &self.systems[&t.system]
    }

    fn member_index(
        &self,
        t: &Target,
        want: impl Fn(&MemberBody) -> bool,
    ) -> Result<usize, HarnessError> {
        let sys = self.system(t);
        match &t.member {
            Some(m) => Ok(sys.member_index(m).expect("checked at load")),
            None => sys
                .members
                .iter()
                .position(|m| want(&m.body))
                .ok_or_else(|| self.err(format!("{t} has no suitable subsystem"))),
        }
    }

    fn symbolic_mut(&mut self, t: &Target) -> Result<&mut SymbolicMember, HarnessError> {
        let i = self.member_index(t, |b| matches!(b, MemberBody::Symbolic(_)))?;
        let err = self.err(format!("{t} is not symbolic"));
        match &mut self.systems.get_mut(&t.system).expect("known").members[i].body {
            MemberBody::Symbolic(s) => Ok(s),
            MemberBody::Network(_) => Err(err),
        }
    }

    fn network_mut(&mut self, t: &Target) -> Result<&mut NetworkMember, HarnessError> {
        let i = self.member_index(t, |b| matches!(b, MemberBody::Network(_)))?;
        let err = self.err(format!("{t} is not a network"));
        match &mut self.systems.get_mut(&t.system).expect("known").members[i].body {
            MemberBody::Network(n) => Ok(n),
            MemberBody::Symbolic(_) => Err(err),
        }
    }

    fn query(&mut self, t: &Target, q: &Question) -> Result<(), HarnessError> {
        let i = self.member_index(t, |_| true)?;
        let is_symbolic = matches!(self.system(t).members[i].body, MemberBody::Symbolic(_));
        let t = Target {
            system: t.system.clone(),
            member: Some(self.system(t).members[i].name.clone()),
        };
        if is_symbolic {
            self.symbolic_query(&t, q)
        } else {
            self.network_query(&t, q)
        }
    }

    fn symbolic_query(&mut self, t: &Target, q: &Question) -> Result<(), HarnessError> {
        let m = self.symbolic_mut(t)?;
        let mut out = Vec::new();
        let res: Result<(), crate::symbolic::SymbolicError> = (|| {
            match q {
                Question::Polar(body) if !body.is_literal() => {
                    match m.kb.decide_compound(body)? {
                        Some(e) => out.push(format!("cred {} = {:.4}", show(body), e.credence)),
                        None => out.push(format!("cred {} = undetermined", show(body))),
                    }
                    return Ok(());
                }
                Question::Polar(body) => {
                    if let Some(r) = m.kb.credence(body) {
                        out.push(format!("cred {body} = {r:.4}"));
                    } else if m.kb.credence(&body.complement()).is_some() {
                        let e = m.kb.decide_negation(&body.complement())?;
                        out.push(format!("cred {body} = {:.4}", e.credence));
                    }
                }
                _ => {}
            }
            let o = m.kb.pose_query(q)?;
            let answer = match o.answer {
                Answer::Yes => "yes",
                Answer::No => "no",
                Answer::Open => "open",
            };
            out.push(format!("answer {q} = {answer}"));
            if !o.witnesses.is_empty() {
                out.push(format!("witnesses {q} = {}", o.witnesses.join(", ")));
            }
            if o.stored {
                out.push(format!("stored {q}"));
            }
            Ok(())
        })();
        res.map_err(|e| self.err(e.to_string()))?;
        for l in out {
            self.emit(LineKind::Info, l);
        }
        Ok(())
    }

    fn network_query(&mut self, t: &Target, q: &Question) -> Result<(), HarnessError> {
        let n = self.network_mut(t)?.clone();
        let mut out = Vec::new();
        if let Some(g) = n.generalization_for(q) {
            let scan =
                model_uncertainty_scan(&n.system.net, &n.system.convention, g, &n.system.scope)
                    .map_err(|e| self.err(e.to_string()))?;
            let mut l = format!("scan {q} = {}", scan.verdict);
            if let Some(w) = &scan.witness {
                let _ = write!(l, " witness={w}");
            }
            out.push(l);
            for (c, v) in &scan.per_instance {
                out.push(format!("instance {c} = {v}"));
            }
        }
        let names = q.body().constants();
        let data = data_uncertainty_measure(&n.dataset);
        for item in data.items.iter().filter(|i| names.contains(&i.name)) {
            out.push(format!(
                "agreement {} = {:.4} modal={} {}",
                item.name,
                item.agreement,
                item.modal_label,
                if item.flagged { "flagged" } else { "unflagged" }
            ));
        }
        if out.is_empty() {
            return Err(self.err(format!("network {t} has nothing to report on `{q}`")));
        }
        for l in out {
            self.emit(LineKind::Info, l);
        }
        Ok(())
    }

    fn observe_input(
        &mut self,
        t: &Target,
        input: &[f64],
        evidence: Option<f64>,
        instance: Option<&str>,
    ) -> Result<(), HarnessError> {
        let window = self.opts.window;
        let n = self.network_mut(t)?;
        let net = n.system.net.clone();
        let conv = match instance {
            Some(c) => n.system.convention.instantiate(c),
            None => n.system.convention.clone(),
        };
        let out = net.forward(input).map_err(|e| self.err(e.to_string()))?;
        let content = conv.decode(&out).map_err(|e| self.err(e.to_string()))?;
        let topic = match &content {
            Content::Verdict { topic, .. } => Some(topic.clone()),
            Content::Credences(cs) => cs
                .iter()
                .fold(None::<&(Formula, f64)>, |best, c| match best {
                    Some(b) if b.1 >= c.1 => Some(b),
                    _ => Some(c),
                })
                .map(|(f, _)| f.clone()),
            Content::Question(_) => None,
        };
        let n = self.network_mut(t)?;
        n.observed.push(input.to_vec());
        if let (Some(r), Some(f)) = (evidence, &topic) {
            n.evidence.insert(f.clone(), r);
        }
        self.emit(LineKind::Info, format!("out {t} = {}", vector(&out)));
        self.emit(LineKind::Info, format!("decoded {t} = {content}"));
        if let Some(r) = evidence {
            let flags = overconfidence_audit(&net, &conv, &[(input.to_vec(), r)], window)
                .map_err(|e| self.err(e.to_string()))?;
            for f in flags {
                self.emit(LineKind::Flag, format!("FLAG {} {f}", t.system));
            }
        }
        let sys = self.system(t);
        let u = match (&content, &topic) {
            (Content::Question(q), _) => sys.answer(q),
            (_, Some(f)) => sys.assert_on(f),
            (_, None) => unreachable!("verdicts and credences name a formula"),
        }
        .map_err(|e| self.err(e.to_string()))?;
        self.emit(LineKind::Utter, format!("UTTER {} {u}", t.system));
        self.traces
            .entry(t.system.clone())
            .or_default()
            .push(format!("input {}", vector(input)), u);
        Ok(())
    }

    fn train(&mut self, t: &Target, epochs: usize, rate: f64) -> Result<(), HarnessError> {
        let n = self.network_mut(t)?;
        let desired = match &n.system.convention {
            OutputConvention::Pair { .. } => vec![1.0, 1.0],
            OutputConvention::Single { .. } => vec![1.0],
            _ => return Err(self.err("training needs a pair or single convention")),
        };
        let instances: Vec<Vec<f64>> = n
            .generalizations
            .iter()
            .flat_map(|g| g.instances.iter().map(|(_, v)| v.clone()))
            .collect();
        if instances.is_empty() {
            return Err(self.err(format!("{t} has no instances to train on")));
        }
        let mut net = n.system.net.clone();
        let mut fail = None;
        'outer: for _ in 0..epochs {
            for x in &instances {
                match net.delta_update(x, &desired, rate) {
                    Ok(next) => net = next,
                    Err(e) => {
                        fail = Some(e);
                        break 'outer;
                    }
                }
            }
        }
        if let Some(e) = fail {
            return Err(self.err(e.to_string()));
        }
        let error: f64 = instances
            .iter()
            .map(|x| net.squared_error(x, &desired).unwrap_or(f64::NAN))
            .sum();
        self.network_mut(t)?.system.net = net;
        self.emit(
            LineKind::Info,
            format!("trained {t} epochs={epochs} rate={rate} error={error:.4}"),
        );
        Ok(())
    }

    fn run(&mut self) -> Result<(usize, Vec<super::run::ExpectFailure>), HarnessError> {
        let mut passed = 0;
        let mut failures = Vec::new();
        for d in &self.scenario.directives {
            self.line = d.line;
            self.current.clear();
            match &d.kind {
                DirectiveKind::Query { target, question } => self.query(target, question)?,
                DirectiveKind::ObserveAssert { target, formula } => {
                    let u = self
                        .system(target)
                        .assert_on(formula)
                        .map_err(|e| self.err(e.to_string()))?;
                    self.emit(LineKind::Utter, format!("UTTER {} {u}", target.system));
                    self.traces
                        .entry(target.system.clone())
                        .or_default()
                        .push(format!("assert {formula}"), u);
                }
                DirectiveKind::ObserveInput {
                    target,
                    input,
                    evidence,
                    instance,
                } => self.observe_input(target, input, *evidence, instance.as_deref())?,
                DirectiveKind::Probe {
                    target,
                    id,
                    stimulus,
                } => {
                    self.probes
                        .entry(target.system.clone())
                        .or_default()
                        .add(*id, stimulus.clone());
                    continue;
                }
                DirectiveKind::Ascribe { target, question } => {
                    let trace = self.traces.get(&target.system).cloned().unwrap_or_default();
                    let probes = self.probes.get(&target.system).cloned().unwrap_or_default();
                    let v = first_solution_verdict(self.system(target), question, &trace, &probes)
                        .map_err(|e| self.err(e.to_string()))?;
                    self.emit(LineKind::Verdict, v.line(&target.system));
                    for n in &v.notes {
                        self.emit(LineKind::Info, format!("  note: {n}"));
                    }
                    self.emit(
                        LineKind::Info,
                        format!("  note: {}", v.second_solution_note),
                    );
                }
                DirectiveKind::Expect { line } => {
                    let ok = self.last.iter().any(|l| l == line);
                    if ok {
                        passed += 1;
                    } else {
                        failures.push(ExpectFailure {
                            line: d.line,
                            expected: line.clone(),
                            actual: self.last.clone(),
                        });
                    }
                    let status = if ok { "pass" } else { "fail" };
                    self.emit(LineKind::Expect, format!("EXPECT {status} {line}"));
                    continue;
                }
                DirectiveKind::Train {
                    target,
                    epochs,
                    rate,
                } => self.train(target, *epochs, *rate)?,
                DirectiveKind::Retract { target, literal } => {
                    let removed = self.symbolic_mut(target)?.kb.remove_fact(literal);
                    let what = if removed { "retracted" } else { "not a fact" };
                    self.emit(LineKind::Info, format!("{what} {target} {literal}"));
                }
            }
            self.last = std::mem::take(&mut self.current);
        }
        Ok((passed, failures))
    }
}

/// Executes the directives of `s` in order.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<Report, HarnessError> {
    let mut systems = BTreeMap::new();
    for sys in &s.systems {
        let mut sys = sys.clone();
        for m in &mut sys.members {
            if let MemberBody::Symbolic(sm) = &mut m.body {
                if let Some(d) = opts.depth_limit {
                    sm.kb.set_config(EngineConfig { depth_limit: d });
                }
                let explicit = s
                    .explicit_thresholds
                    .contains(&(sys.name.clone(), m.name.clone()));
                if let (false, Some(t)) = (explicit, opts.assert_threshold) {
                    sm.policy = AssertionPolicy::new(t).map_err(|e| HarnessError::Runtime {
                        scenario: s.name.clone(),
                        line: 0,
                        message: e.to_string(),
                    })?;
                }
            }
        }
        systems.insert(sys.name.clone(), sys);
    }
    let mut r = Runner {
        scenario: s,
        opts: *opts,
        systems,
        traces: BTreeMap::new(),
        probes: BTreeMap::new(),
        lines: Vec::new(),
        last: Vec::new(),
        current: Vec::new(),
        line: 0,
    };
    let (passed, failures) = r.run()?;
    Ok(Report {
        scenario: s.name.clone(),
        lines: r.lines,
        expectations_passed: passed,
        failures,
    })
}
