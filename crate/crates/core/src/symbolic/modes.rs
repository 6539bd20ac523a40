use super::{Answer, AssertionPolicy, Kind, KnowledgeBase, Mode, SymbolicError, Utterance};
use crate::lang::{Domain, Formula, Literal, Question, Term};

/// How a question stands in a knowledge base: which kind of uncertainty (if
/// any) it realizes, and whether that uncertainty is tokened or merely
/// available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeReport {
    pub mode: Mode,
    pub kind: Kind,
    /// A stored question that the current contents already settle.
    pub in_position_to_answer: bool,
}

impl ModeReport {
    const NONE: ModeReport = ModeReport {
        mode: Mode::None,
        kind: Kind::None,
        in_position_to_answer: false,
    };

    fn new(mode: Mode, kind: Kind) -> Self {
        ModeReport {
            mode,
            kind,
            in_position_to_answer: false,
        }
    }
}

/// What a knowledge base currently holds about a formula, in the order the
/// assertion machinery consults it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolicStance {
    Credence(f64),
    Settled(bool),
    Open,
}

/// Result of posing a question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryOutcome {
    pub answer: Answer,
    /// Constants that answer a closed wh-question.
    pub witnesses: Vec<String>,
    pub stored: bool,
}

fn nonextreme(r: f64) -> bool {
    r > 0.0 && r < 1.0
}

impl KnowledgeBase {
    /// Poses `q`. Polar questions go through [`resolve_query`]; closed
    /// wh-questions try every known constant. A question left open is
    /// stored; open-domain wh-questions are stored without search.
    ///
    /// [`resolve_query`]: KnowledgeBase::resolve_query
    pub fn pose_query(&mut self, q: &Question) -> Result<QueryOutcome, SymbolicError> {
        let (answer, witnesses) = match q {
            Question::Polar(body) => {
                if !body.is_ground() {
                    return Err(SymbolicError::NotGround(body.to_string()));
                }
                (self.resolve_query(q)?, Vec::new())
            }
            Question::Wh {
                domain: Domain::Open,
                ..
            } => (Answer::Open, Vec::new()),
            Question::Wh { var, body, .. } => {
                let w = self.witnesses(var, body)?;
                let a = if w.is_empty() {
                    Answer::Open
                } else {
                    Answer::Yes
                };
                (a, w)
            }
        };
        let stored = answer == Answer::Open;
        if stored {
            self.store_question(q.clone());
        }
        Ok(QueryOutcome {
            answer,
            witnesses,
            stored,
        })
    }

    fn witnesses(&self, var: &Term, body: &Formula) -> Result<Vec<String>, SymbolicError> {
        let mut prover = self.prover();
        let mut out = Vec::new();
        for c in &self.constants {
            let inst = body.substitute(var, &Term::Constant(c.clone()));
            let lit = inst
                .as_literal()
                .ok_or_else(|| SymbolicError::NotALiteral(inst.clone()))?;
            if !lit.is_ground() {
                return Err(SymbolicError::NotGround(inst.to_string()));
            }
            if prover.derives(&lit)? {
                out.push(c.clone());
            }
        }
        Ok(out)
    }

    /// Reports whether `q` is explicitly, implicitly or not at all a matter
    /// of uncertainty, using only the current contents.
    pub fn classify_mode(&self, q: &Question) -> Result<ModeReport, SymbolicError> {
        match q {
            Question::Polar(f) => self.classify_polar(q, f),
            Question::Wh { var, body, domain } => {
                if self.has_open_question(q) {
                    return Ok(ModeReport::new(Mode::Explicit, Kind::Categorical));
                }
                let settled = *domain == Domain::Closed && !self.witnesses(var, body)?.is_empty();
                Ok(if settled {
                    ModeReport::NONE
                } else {
                    ModeReport::new(Mode::Implicit, Kind::Categorical)
                })
            }
        }
    }

    fn classify_polar(&self, q: &Question, f: &Formula) -> Result<ModeReport, SymbolicError> {
        if !f.is_ground() {
            return Err(SymbolicError::NotGround(f.to_string()));
        }
        if let Some(r) = self.stored_credence(f) {
            return Ok(if nonextreme(r) {
                ModeReport::new(Mode::Explicit, Kind::Probabilistic)
            } else {
                ModeReport::NONE
            });
        }
        let lit = f.as_literal();
        let resolved = match &lit {
            Some(l) => Some(self.resolve_literal(l)?),
            None => None,
        };
        if self.has_open_question(q) {
            return Ok(match resolved {
                Some(Answer::Yes | Answer::No) => ModeReport {
                    in_position_to_answer: true,
                    ..ModeReport::NONE
                },
                _ => ModeReport::new(Mode::Explicit, Kind::Categorical),
            });
        }
        if self.comparative_uncertain(f) {
            return Ok(ModeReport::new(Mode::Explicit, Kind::Probabilistic));
        }
        match self.evaluate_compound(f)? {
            Some(r) if nonextreme(r) => {
                return Ok(ModeReport::new(Mode::Implicit, Kind::Probabilistic))
            }
            Some(_) => return Ok(ModeReport::NONE),
            None => {}
        }
        Ok(match resolved {
            Some(Answer::Open) => ModeReport::new(Mode::Implicit, Kind::Categorical),
            _ => ModeReport::NONE,
        })
    }

    /// The knowledge base's current stance on a ground formula. A stored
    /// credence wins over everything else, even when the rules could settle
    /// the formula categorically.
    pub fn stance(&self, f: &Formula) -> Result<SymbolicStance, SymbolicError> {
        if let Some(r) = self.stored_credence(f) {
            return Ok(SymbolicStance::Credence(r));
        }
        if let Some(r) = self.evaluate_compound(f)? {
            return Ok(SymbolicStance::Credence(r));
        }
        match f.as_literal() {
            Some(lit) => Ok(match self.resolve_literal(&lit)? {
                Answer::Yes => SymbolicStance::Settled(true),
                Answer::No => SymbolicStance::Settled(false),
                Answer::Open => SymbolicStance::Open,
            }),
            None => Ok(SymbolicStance::Open),
        }
    }

    /// What the system says when prompted to assert on `f`.
    pub fn assertion_policy(
        &self,
        pol: &AssertionPolicy,
        f: &Formula,
    ) -> Result<Utterance, SymbolicError> {
        Ok(render_stance(pol, f, self.stance(f)?))
    }

    /// Utterance for a question: polar questions go through the assertion
    /// policy on their body; an open wh-question is abstained on, a closed
    /// one is answered with its first witness.
    pub fn respond(&self, pol: &AssertionPolicy, q: &Question) -> Result<Utterance, SymbolicError> {
        match q {
            Question::Polar(f) => self.assertion_policy(pol, f),
            Question::Wh {
                domain: Domain::Open,
                ..
            } => Ok(Utterance::Abstain(q.clone())),
            Question::Wh { var, body, .. } => Ok(match self.witnesses(var, body)?.first() {
                Some(c) => Utterance::FlatAssert(body.substitute(var, &Term::Constant(c.clone()))),
                None => Utterance::Abstain(q.clone()),
            }),
        }
    }

    pub fn literal_stance(&self, lit: &Literal) -> Result<SymbolicStance, SymbolicError> {
        self.stance(&lit.to_formula())
    }
}

pub fn render_stance(pol: &AssertionPolicy, f: &Formula, stance: SymbolicStance) -> Utterance {
    match stance {
        SymbolicStance::Credence(r) => pol.render(f, r),
        SymbolicStance::Settled(true) => Utterance::FlatAssert(f.clone()),
        SymbolicStance::Settled(false) => Utterance::FlatAssert(f.complement()),
        SymbolicStance::Open => Utterance::Abstain(Question::Polar(f.clone())),
    }
}
