use std::collections::BTreeSet;
use std::fmt;

use super::{mismatch, Network, NetworkError, NetworkStance};
use crate::lang::{Formula, Question, Term};

/// Binarizes one activation: at least 0.75 reads as 1, at most 0.25 as 0,
/// anything in between as neither.
pub fn binarize(v: f64) -> Option<u8> {
    if v >= 0.75 {
        Some(1)
    } else if v <= 0.25 {
        Some(0)
    } else {
        None
    }
}

fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TruthValue {
    True,
    False,
    Neither,
}

impl TruthValue {
    pub fn negate(self) -> TruthValue {
        match self {
            TruthValue::True => TruthValue::False,
            TruthValue::False => TruthValue::True,
            TruthValue::Neither => TruthValue::Neither,
        }
    }

    pub fn is_settled(self) -> bool {
        self != TruthValue::Neither
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue::True => "true",
            TruthValue::False => "false",
            TruthValue::Neither => "neither",
        })
    }
}

/// What a decoded output vector says.
#[derive(Debug, Clone, PartialEq)]
pub enum Content {
    Verdict { topic: Formula, value: TruthValue },
    Credences(Vec<(Formula, f64)>),
    Question(Question),
}

impl Content {
    pub fn stance_on(&self, f: &Formula) -> Option<NetworkStance> {
        match self {
            Content::Verdict { topic, value } => {
                if topic == f {
                    Some(NetworkStance::Verdict(*value))
                } else if &topic.complement() == f {
                    Some(NetworkStance::Verdict(value.negate()))
                } else {
                    None
                }
            }
            Content::Credences(cs) => cs.iter().find_map(|(g, r)| {
                if g == f {
                    Some(NetworkStance::Credence(*r))
                } else if &g.complement() == f {
                    Some(NetworkStance::Credence(1.0 - r))
                } else {
                    None
                }
            }),
            Content::Question(_) => None,
        }
    }
}

impl fmt::Display for Content {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Content::Verdict { topic, value } => write!(f, "{topic} is {value}"),
            Content::Credences(cs) => {
                for (i, (g, r)) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{g} @ {r:.4}")?;
                }
                Ok(())
            }
            Content::Question(q) => write!(f, "asks {q}"),
        }
    }
}

/// How the output units of a network are read.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputConvention {
    /// Two units: ⟨1,1⟩ true, ⟨1,0⟩ false, anything else neither.
    Pair { topic: Formula },
    /// One unit: 1 true, 0 false, the declared third value neither.
    Single {
        topic: Formula,
        third_value: Option<f64>,
    },
    /// One unit per label, each activation read as a credence.
    PerClass { labels: Vec<Formula> },
    /// A binarized prefix picks the formula; the last unit is its credence.
    ConfidenceSuffix { coding: Vec<(Vec<u8>, Formula)> },
    /// Each listed vector codes a question.
    QuestionCode { coding: Vec<(Vec<f64>, Question)> },
}

impl OutputConvention {
    /// Number of output units the convention reads.
    pub fn arity(&self) -> Option<usize> {
        match self {
            OutputConvention::Pair { .. } => Some(2),
            OutputConvention::Single { .. } => Some(1),
            OutputConvention::PerClass { labels } => Some(labels.len()),
            OutputConvention::ConfidenceSuffix { coding } => {
                coding.first().map(|(p, _)| p.len() + 1)
            }
            OutputConvention::QuestionCode { coding } => coding.first().map(|(v, _)| v.len()),
        }
    }

    pub fn check_arity(&self, outputs: usize) -> Result<(), NetworkError> {
        let n = self
            .arity()
            .ok_or_else(|| NetworkError::Invalid("convention declares no codes".into()))?;
        if n != outputs {
            return Err(mismatch("output convention", outputs, n));
        }
        let uniform = match self {
            OutputConvention::ConfidenceSuffix { coding } => coding
                .iter()
                .all(|(p, _)| p.len() + 1 == n && p.iter().all(|b| *b <= 1)),
            OutputConvention::QuestionCode { coding } => coding.iter().all(|(v, _)| v.len() == n),
            OutputConvention::PerClass { labels } => !labels.is_empty(),
            _ => true,
        };
        if !uniform {
            return Err(NetworkError::Invalid(
                "convention codes differ in length or are not binary".into(),
            ));
        }
        Ok(())
    }

    /// Replaces the variable `x` in topics and labels with `constant`.
    pub fn instantiate(&self, constant: &str) -> OutputConvention {
        let x = Term::Variable("x".into());
        let c = Term::Constant(constant.into());
        let sub = |f: &Formula| f.substitute(&x, &c);
        match self {
            OutputConvention::Pair { topic } => OutputConvention::Pair { topic: sub(topic) },
            OutputConvention::Single { topic, third_value } => OutputConvention::Single {
                topic: sub(topic),
                third_value: *third_value,
            },
            OutputConvention::PerClass { labels } => OutputConvention::PerClass {
                labels: labels.iter().map(sub).collect(),
            },
            OutputConvention::ConfidenceSuffix { coding } => OutputConvention::ConfidenceSuffix {
                coding: coding.iter().map(|(p, f)| (p.clone(), sub(f))).collect(),
            },
            OutputConvention::QuestionCode { .. } => self.clone(),
        }
    }

    /// The topic a verdict-yielding convention decides.
    pub fn topic(&self) -> Option<&Formula> {
        match self {
            OutputConvention::Pair { topic } | OutputConvention::Single { topic, .. } => {
                Some(topic)
            }
            _ => None,
        }
    }

    /// Every question some decodable output could bear on.
    pub fn decodable_questions(&self) -> Vec<Question> {
        match self {
            OutputConvention::Pair { topic } | OutputConvention::Single { topic, .. } => {
                vec![Question::polar(topic.clone())]
            }
            OutputConvention::PerClass { labels } => {
                labels.iter().cloned().map(Question::polar).collect()
            }
            OutputConvention::ConfidenceSuffix { coding } => coding
                .iter()
                .map(|(_, f)| Question::polar(f.clone()))
                .collect(),
            OutputConvention::QuestionCode { coding } => {
                coding.iter().map(|(_, q)| q.clone()).collect()
            }
        }
    }

    pub fn decode(&self, out: &[f64]) -> Result<Content, NetworkError> {
        let undecodable = || NetworkError::UndecodableVector(out.to_vec());
        if let Some(n) = self.arity() {
            if n != out.len() {
                return Err(mismatch("output vector", n, out.len()));
            }
        }
        match self {
            OutputConvention::Pair { topic } => {
                if !out.iter().all(|v| in_unit(*v)) {
                    return Err(undecodable());
                }
                let value = match (binarize(out[0]), binarize(out[1])) {
                    (Some(1), Some(1)) => TruthValue::True,
                    (Some(1), Some(0)) => TruthValue::False,
                    _ => TruthValue::Neither,
                };
                Ok(Content::Verdict {
                    topic: topic.clone(),
                    value,
                })
            }
            OutputConvention::Single { topic, third_value } => {
                let v = out[0];
                if !in_unit(v) {
                    return Err(undecodable());
                }
                let value = if Some(v) == *third_value {
                    TruthValue::Neither
                } else {
                    match binarize(v) {
                        Some(1) => TruthValue::True,
                        Some(_) => TruthValue::False,
                        None if third_value.is_some() => TruthValue::Neither,
                        None => return Err(undecodable()),
                    }
                };
                Ok(Content::Verdict {
                    topic: topic.clone(),
                    value,
                })
            }
            OutputConvention::PerClass { labels } => {
                if !out.iter().all(|v| in_unit(*v)) {
                    return Err(undecodable());
                }
                Ok(Content::Credences(
                    labels.iter().cloned().zip(out.iter().copied()).collect(),
                ))
            }
            OutputConvention::ConfidenceSuffix { coding } => {
                let (prefix, last) = out.split_at(out.len() - 1);
                let r = last[0];
                if !in_unit(r) {
                    return Err(undecodable());
                }
                let bits: Option<Vec<u8>> = prefix.iter().map(|v| binarize(*v)).collect();
                let bits = bits.ok_or_else(undecodable)?;
                coding
                    .iter()
                    .find(|(p, _)| *p == bits)
                    .map(|(_, f)| Content::Credences(vec![(f.clone(), r)]))
                    .ok_or_else(undecodable)
            }
            OutputConvention::QuestionCode { coding } => {
                if let Some((_, q)) = coding.iter().find(|(v, _)| v.as_slice() == out) {
                    return Ok(Content::Question(q.clone()));
                }
                let bits: Option<Vec<u8>> = out.iter().map(|v| binarize(*v)).collect();
                let bits = bits.ok_or_else(undecodable)?;
                coding
                    .iter()
                    .find(|(v, _)| {
                        v.iter()
                            .map(|c| binarize(*c))
                            .collect::<Option<Vec<u8>>>()
                            .as_ref()
                            == Some(&bits)
                    })
                    .map(|(_, q)| Content::Question(q.clone()))
                    .ok_or_else(undecodable)
            }
        }
    }
}

/// The questions a network was built to decide.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuestionScope {
    questions: BTreeSet<Question>,
}

impl QuestionScope {
    pub fn new(questions: impl IntoIterator<Item = Question>) -> Self {
        QuestionScope {
            questions: questions.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, q: Question) {
        self.questions.insert(q);
    }

    pub fn contains(&self, q: &Question) -> bool {
        self.questions.contains(q)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Question> {
        self.questions.iter()
    }
}

/// A state read off one forward pass that could be a point-wise
/// uncertainty: a credence strictly between 0 and 1, or a coded question.
#[derive(Debug, Clone, PartialEq)]
pub enum PointwiseCandidate {
    Probabilistic { formula: Formula, credence: f64 },
    Categorical { question: Question },
}

pub fn pointwise_states(
    net: &Network,
    conv: &OutputConvention,
    input: &[f64],
) -> Result<Vec<PointwiseCandidate>, NetworkError> {
    let out = net.forward(input)?;
    Ok(match conv.decode(&out)? {
        Content::Credences(cs) => cs
            .into_iter()
            .filter(|(_, r)| *r > 0.0 && *r < 1.0)
            .map(|(formula, credence)| PointwiseCandidate::Probabilistic { formula, credence })
            .collect(),
        Content::Question(question) => vec![PointwiseCandidate::Categorical { question }],
        Content::Verdict { .. } => Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectionist::Activation;
    use crate::lang::{parse_formula, parse_question};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn pair() -> OutputConvention {
        OutputConvention::Pair {
            topic: f("mammal(x)"),
        }
    }

    fn verdict(c: Content) -> TruthValue {
        match c {
            Content::Verdict { value, .. } => value,
            other => panic!("expected a verdict, got {other:?}"),
        }
    }

    #[test]
    fn binarize_bands() {
        assert_eq!(binarize(0.75), Some(1));
        assert_eq!(binarize(0.9), Some(1));
        assert_eq!(binarize(0.25), Some(0));
        assert_eq!(binarize(0.0), Some(0));
        assert_eq!(binarize(0.5), None);
        assert_eq!(binarize(0.7499), None);
    }

    #[test]
    fn pair_table() {
        let c = pair();
        assert_eq!(verdict(c.decode(&[1.0, 1.0]).unwrap()), TruthValue::True);
        assert_eq!(verdict(c.decode(&[1.0, 0.0]).unwrap()), TruthValue::False);
        assert_eq!(verdict(c.decode(&[0.0, 1.0]).unwrap()), TruthValue::Neither);
        assert_eq!(verdict(c.decode(&[0.0, 0.0]).unwrap()), TruthValue::Neither);
        assert_eq!(verdict(c.decode(&[0.9, 0.8]).unwrap()), TruthValue::True);
        assert_eq!(
            verdict(c.decode(&[0.5, 0.6225]).unwrap()),
            TruthValue::Neither
        );
        assert!(matches!(
            c.decode(&[1.2, 1.0]),
            Err(NetworkError::UndecodableVector(_))
        ));
    }

    #[test]
    fn single_with_and_without_third_value() {
        let with = OutputConvention::Single {
            topic: f("rain"),
            third_value: Some(0.5),
        };
        assert_eq!(verdict(with.decode(&[1.0]).unwrap()), TruthValue::True);
        assert_eq!(verdict(with.decode(&[0.0]).unwrap()), TruthValue::False);
        assert_eq!(verdict(with.decode(&[0.5]).unwrap()), TruthValue::Neither);
        let without = OutputConvention::Single {
            topic: f("rain"),
            third_value: None,
        };
        assert!(without.decode(&[0.5]).is_err());
        assert!(without.decode(&[-0.1]).is_err());
    }

    #[test]
    fn confidence_suffix() {
        let c = OutputConvention::ConfidenceSuffix {
            coding: vec![(vec![1, 0], f("cat")), (vec![0, 1], f("dog"))],
        };
        assert_eq!(
            c.decode(&[0.9, 0.1, 0.66]).unwrap(),
            Content::Credences(vec![(f("cat"), 0.66)])
        );
        assert!(c.decode(&[1.0, 1.0, 0.5]).is_err());
        assert!(c.decode(&[0.5, 0.0, 0.5]).is_err());
        assert!(c.check_arity(3).is_ok());
        assert!(c.check_arity(2).is_err());
    }

    #[test]
    fn question_code_exact_then_binarized() {
        let q1 = parse_question("? sarcastic(r1)").unwrap();
        let q2 = parse_question("?x: sarcastic(x)").unwrap();
        let c = OutputConvention::QuestionCode {
            coding: vec![(vec![1.0, 0.0], q1.clone()), (vec![0.0, 1.0], q2.clone())],
        };
        assert_eq!(c.decode(&[1.0, 0.0]).unwrap(), Content::Question(q1));
        assert_eq!(c.decode(&[0.1, 0.8]).unwrap(), Content::Question(q2));
        assert!(c.decode(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn instantiate_topic_variable() {
        let c = pair().instantiate("b3");
        assert_eq!(c.topic(), Some(&f("mammal(b3)")));
    }

    #[test]
    fn stance_through_complement() {
        let c = Content::Credences(vec![(f("p"), 0.7)]);
        assert_eq!(c.stance_on(&f("p")), Some(NetworkStance::Credence(0.7)));
        match c.stance_on(&f("~p")) {
            Some(NetworkStance::Credence(r)) => assert!((r - 0.3).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let v = Content::Verdict {
            topic: f("p"),
            value: TruthValue::True,
        };
        assert_eq!(
            v.stance_on(&f("~p")),
            Some(NetworkStance::Verdict(TruthValue::False))
        );
        assert_eq!(v.stance_on(&f("q")), None);
    }

    #[test]
    fn pointwise_candidates() {
        let net = Network::new(
            vec![1, 2],
            vec![vec![0.0, 0.0]],
            vec![vec![0.0, 0.0]],
            Activation::Logistic,
        )
        .unwrap();
        let conv = OutputConvention::PerClass {
            labels: vec![f("cat"), f("dog")],
        };
        let got = pointwise_states(&net, &conv, &[1.0]).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.iter().all(|c| matches!(
            c,
            PointwiseCandidate::Probabilistic { credence, .. } if *credence == 0.5
        )));
    }
}
