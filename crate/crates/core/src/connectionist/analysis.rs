use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{Content, Network, NetworkError, OutputConvention, QuestionScope, TruthValue};
use crate::lang::{Formula, Question, Term};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledItem {
    pub name: String,
    pub input: Vec<f64>,
    pub votes: Vec<String>,
}

impl LabeledItem {
    pub fn new(
        name: impl Into<String>,
        input: Vec<f64>,
        votes: Vec<String>,
    ) -> Result<Self, NetworkError> {
        let name = name.into();
        if votes.is_empty() {
            return Err(NetworkError::Invalid(format!("item {name} has no votes")));
        }
        Ok(LabeledItem { name, input, votes })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledDataset {
    pub items: Vec<LabeledItem>,
}

impl LabeledDataset {
    pub fn new(items: Vec<LabeledItem>) -> Self {
        LabeledDataset { items }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemAgreement {
    pub name: String,
    pub modal_label: String,
    /// Share of votes for the modal label.
    pub agreement: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataUncertaintyReport {
    pub items: Vec<ItemAgreement>,
    /// Fraction of items whose annotators disagree.
    pub aggregate: f64,
}

impl DataUncertaintyReport {
    pub fn item(&self, name: &str) -> Option<&ItemAgreement> {
        self.items.iter().find(|i| i.name == name)
    }
}

pub fn data_uncertainty_measure(ds: &LabeledDataset) -> DataUncertaintyReport {
    let items: Vec<ItemAgreement> = ds
        .items
        .iter()
        .map(|item| {
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for v in &item.votes {
                *counts.entry(v).or_default() += 1;
            }
            // ties go to the alphabetically first label
            let (label, n) = counts.iter().fold(
                ("", 0),
                |best, (l, n)| if *n > best.1 { (l, *n) } else { best },
            );
            let agreement = n as f64 / item.votes.len() as f64;
            ItemAgreement {
                name: item.name.clone(),
                modal_label: label.to_string(),
                agreement,
                flagged: agreement < 1.0,
            }
        })
        .collect();
    let aggregate = if items.is_empty() {
        0.0
    } else {
        items.iter().filter(|i| i.flagged).count() as f64 / items.len() as f64
    };
    DataUncertaintyReport { items, aggregate }
}

/// A generalization "all F are G" with the instances it ranges over, each
/// a constant paired with the input vector that presents it.
#[derive(Debug, Clone, PartialEq)]
pub struct Generalization {
    pub antecedent: String,
    pub consequent: String,
    pub instances: Vec<(String, Vec<f64>)>,
}

impl Generalization {
    /// The generalization posed as a question: `? ~F(x) | G(x)`.
    pub fn question(&self) -> Question {
        let x = || vec![Term::Variable("x".into())];
        Question::polar(Formula::or(
            Formula::not(Formula::atom(self.antecedent.clone(), x())),
            Formula::atom(self.consequent.clone(), x()),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanVerdict {
    EncodesAll,
    EncodesNotAll,
    DistributivelyUncertain,
}

impl fmt::Display for ScanVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanVerdict::EncodesAll => "encodes_all",
            ScanVerdict::EncodesNotAll => "encodes_not_all",
            ScanVerdict::DistributivelyUncertain => "distributively_uncertain",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub verdict: ScanVerdict,
    pub per_instance: Vec<(String, TruthValue)>,
    /// A false instance for encodes_not_all, an undecided one for
    /// distributively_uncertain.
    pub witness: Option<String>,
}

/// Decodes the network's verdict on every instance of `g` and sorts the
/// generalization into one of three outcomes.
pub fn model_uncertainty_scan(
    net: &Network,
    conv: &OutputConvention,
    g: &Generalization,
    scope: &QuestionScope,
) -> Result<ScanReport, NetworkError> {
    let q = g.question();
    if !scope.contains(&q) {
        return Err(NetworkError::OutOfScope(q));
    }
    match conv.topic() {
        Some(Formula::Atom(a)) if a.predicate == g.consequent => {}
        _ => {
            return Err(NetworkError::ConventionMismatch(format!(
                "its outputs do not decide {}",
                g.consequent
            )))
        }
    }
    if g.instances.is_empty() {
        return Err(NetworkError::Invalid(
            "generalization has no instances".into(),
        ));
    }
    let mut memo: HashMap<Vec<u64>, TruthValue> = HashMap::new();
    let mut per_instance = Vec::with_capacity(g.instances.len());
    for (c, input) in &g.instances {
        let key: Vec<u64> = input.iter().map(|v| v.to_bits()).collect();
        let value = match memo.get(&key) {
            Some(v) => *v,
            None => {
                let out = net.forward(input)?;
                let v = match conv.instantiate(c).decode(&out)? {
                    Content::Verdict { value, .. } => value,
                    _ => unreachable!("topic conventions decode to verdicts"),
                };
                memo.insert(key, v);
                v
            }
        };
        per_instance.push((c.clone(), value));
    }
    let first = |want: TruthValue| {
        per_instance
            .iter()
            .find(|(_, v)| *v == want)
            .map(|(c, _)| c.clone())
    };
    let (verdict, witness) = if let Some(c) = first(TruthValue::False) {
        (ScanVerdict::EncodesNotAll, Some(c))
    } else if let Some(c) = first(TruthValue::Neither) {
        (ScanVerdict::DistributivelyUncertain, Some(c))
    } else {
        (ScanVerdict::EncodesAll, None)
    };
    Ok(ScanReport {
        verdict,
        per_instance,
        witness,
    })
}

/// Evidence values strictly inside `(lo, hi)` are inconclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverconfidenceWindow {
    pub lo: f64,
    pub hi: f64,
}

impl Default for OverconfidenceWindow {
    fn default() -> Self {
        OverconfidenceWindow { lo: 0.05, hi: 0.95 }
    }
}

impl OverconfidenceWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self, NetworkError> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
            return Err(NetworkError::Invalid(format!(
                "overconfidence window ({lo}, {hi}) must satisfy 0 <= lo < hi <= 1"
            )));
        }
        Ok(OverconfidenceWindow { lo, hi })
    }

    pub fn contains(&self, evidence: f64) -> bool {
        self.lo < evidence && evidence < self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverconfidenceFlag {
    pub input: Vec<f64>,
    pub evidence: f64,
    pub topic: Formula,
    pub verdict: bool,
}

impl fmt::Display for OverconfidenceFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "overconfident evidence={:.4} verdict={}",
            self.evidence, self.verdict
        )
    }
}

/// Flags probes where the network settles true or false although the
/// evidence behind the input is inconclusive.
pub fn overconfidence_audit(
    net: &Network,
    conv: &OutputConvention,
    probes: &[(Vec<f64>, f64)],
    window: OverconfidenceWindow,
) -> Result<Vec<OverconfidenceFlag>, NetworkError> {
    let mut flags = Vec::new();
    for (input, evidence) in probes {
        let out = net.forward(input)?;
        if let Content::Verdict { topic, value } = conv.decode(&out)? {
            if value.is_settled() && window.contains(*evidence) {
                flags.push(OverconfidenceFlag {
                    input: input.clone(),
                    evidence: *evidence,
                    topic,
                    verdict: value == TruthValue::True,
                });
            }
        }
    }
    Ok(flags)
}
