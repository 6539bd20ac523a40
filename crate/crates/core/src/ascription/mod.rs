//! Interpretation: whether a system (or a composition of systems) realizes
//! uncertainty about a question, read at the cognitive level (its internal
//! states) and at the behavioral level (what it says), and settled by
//! functional-role probes.
//!
//! A candidate state only counts as subjective uncertainty when it plays an
//! uncertainty role: the system hedges on it, its negation is coherent, and
//! the surrounding system treats it differently from certainty. A candidate
//! that fails those tests realizes no uncertainty at any level.

mod system;
mod verdict;

use std::fmt;

use crate::connectionist::NetworkError;
use crate::lang::{Formula, Question};
use crate::symbolic::{SymbolicError, Utterance};

pub use system::{
    Member, MemberBody, NetworkMember, OverarchingPolicy, Stance, SymbolicMember, SystemComposition,
};
pub use verdict::{
    behavioral_ascribe, cognitive_ascribe, detect_level_split, epistemic_ascribe,
    first_solution_verdict, role_check, AscriptionVerdict, BehavioralReading, Candidate,
    CandidateReport, Locus, ProbeResult, RoleProbes,
};

/// Credences within this distance of 0 or 1 count as extreme.
pub const EPSILON: f64 = 1e-9;

pub fn nonextreme(r: f64) -> bool {
    r > EPSILON && r < 1.0 - EPSILON
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AscriptionError {
    #[error("no subsystem of {system} covers `{question}`")]
    OutOfScope { system: String, question: Question },
    #[error("no probe inputs supplied for {probe} on {system}")]
    MissingProbeInputs { system: String, probe: String },
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProbeId {
    R1,
    R2,
    R3,
}

impl ProbeId {
    pub const ALL: [ProbeId; 3] = [ProbeId::R1, ProbeId::R2, ProbeId::R3];
}

impl fmt::Display for ProbeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeId::R1 => "R1",
            ProbeId::R2 => "R2",
            ProbeId::R3 => "R3",
        })
    }
}

impl std::str::FromStr for ProbeId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "R1" => Ok(ProbeId::R1),
            "R2" => Ok(ProbeId::R2),
            "R3" => Ok(ProbeId::R3),
            other => Err(format!("unknown probe `{other}`")),
        }
    }
}

/// A scenario-supplied stimulus for a role probe: an input vector for a
/// network, or a formula to prompt a symbolic system with.
#[derive(Debug, Clone, PartialEq)]
pub enum Stimulus {
    Input(Vec<f64>),
    Formula(Formula),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProbeSet {
    stimuli: Vec<(ProbeId, Stimulus)>,
}

impl ProbeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, id: ProbeId, s: Stimulus) {
        self.stimuli.push((id, s));
    }

    pub fn is_empty(&self) -> bool {
        self.stimuli.is_empty()
    }

    pub fn input_for(&self, id: ProbeId, len: usize) -> Option<&[f64]> {
        self.stimuli.iter().find_map(|(p, s)| match s {
            Stimulus::Input(v) if *p == id && v.len() == len => Some(v.as_slice()),
            _ => None,
        })
    }

    pub fn formula_for(&self, id: ProbeId) -> Option<&Formula> {
        self.stimuli.iter().find_map(|(p, s)| match s {
            Stimulus::Formula(f) if *p == id => Some(f),
            _ => None,
        })
    }

    /// Every input vector of the given length, in registration order.
    pub fn inputs(&self, len: usize) -> impl Iterator<Item = &[f64]> {
        self.stimuli.iter().filter_map(move |(_, s)| match s {
            Stimulus::Input(v) if v.len() == len => Some(v.as_slice()),
            _ => None,
        })
    }
}

/// Behavioral record of a run: what was put to the system and what it said.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    events: Vec<(String, Utterance)>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, stimulus: impl Into<String>, u: Utterance) {
        self.events.push((stimulus.into(), u));
    }

    pub fn events(&self) -> &[(String, Utterance)] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}
