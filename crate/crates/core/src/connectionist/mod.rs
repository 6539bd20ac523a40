//! The connectionist engine: a small layered network with explicit weights
//! and thresholds, the output conventions that give its activation vectors
//! content, and the analyses of data, model and point-wise uncertainty.
//!
//! ```
//! use uncertainty_lab::connectionist::{Activation, Network};
//!
//! // One step unit that fires when its input reaches 0.6.
//! let net = Network::new(vec![1, 1], vec![vec![1.0]], vec![vec![0.6]], Activation::Step).unwrap();
//! assert_eq!(net.forward(&[0.7]).unwrap(), vec![1.0]);
//! assert_eq!(net.forward(&[0.5]).unwrap(), vec![0.0]);
//! ```

mod analysis;
mod convention;

use std::fmt;

use crate::lang::{Formula, Question};

pub use analysis::{
    data_uncertainty_measure, model_uncertainty_scan, overconfidence_audit, DataUncertaintyReport,
    Generalization, ItemAgreement, LabeledDataset, LabeledItem, OverconfidenceFlag,
    OverconfidenceWindow, ScanReport, ScanVerdict,
};
pub use convention::{
    binarize, pointwise_states, Content, OutputConvention, PointwiseCandidate, QuestionScope,
    TruthValue,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetworkError {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),
    #[error("undecodable output vector {0:?}")]
    UndecodableVector(Vec<f64>),
    #[error("question `{0}` is outside the network's designed scope")]
    OutOfScope(Question),
    #[error("convention cannot answer `{0}`")]
    ConventionMismatch(String),
    #[error("{0}")]
    Invalid(String),
}

fn mismatch(what: impl Into<String>, expected: usize, got: usize) -> NetworkError {
    NetworkError::DimensionMismatch {
        what: what.into(),
        expected,
        got,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// Fires 1 iff the total input reaches the threshold.
    Step,
    /// `1 / (1 + exp(-(total - threshold)))`.
    Logistic,
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Step => "step",
            Activation::Logistic => "logistic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Layer {
    /// One row per unit, one column per unit of the previous layer.
    weights: Vec<Vec<f64>>,
    thresholds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layer_sizes: Vec<usize>,
    layers: Vec<Layer>,
    activation: Activation,
}

impl Network {
    /// `weights[k]` is the row-major weight matrix feeding layer `k + 1`;
    /// `thresholds[k]` holds one threshold per unit of that layer.
    pub fn new(
        layer_sizes: Vec<usize>,
        weights: Vec<Vec<f64>>,
        thresholds: Vec<Vec<f64>>,
        activation: Activation,
    ) -> Result<Self, NetworkError> {
        if layer_sizes.len() < 2 {
            return Err(NetworkError::UnsupportedTopology(
                "a network needs an input and an output layer".into(),
            ));
        }
        if let Some(i) = layer_sizes.iter().position(|&n| n == 0) {
            return Err(NetworkError::Invalid(format!("layer {i} has no units")));
        }
        let n = layer_sizes.len() - 1;
        if weights.len() != n {
            return Err(mismatch("weight matrices", n, weights.len()));
        }
        if thresholds.len() != n {
            return Err(mismatch("threshold vectors", n, thresholds.len()));
        }
        let mut layers = Vec::with_capacity(n);
        for (k, (w, t)) in weights.into_iter().zip(thresholds).enumerate() {
            let (rows, cols) = (layer_sizes[k + 1], layer_sizes[k]);
            if w.len() != rows * cols {
                return Err(mismatch(
                    format!("weights of layer {}", k + 1),
                    rows * cols,
                    w.len(),
                ));
            }
            if t.len() != rows {
                return Err(mismatch(
                    format!("thresholds of layer {}", k + 1),
                    rows,
                    t.len(),
                ));
            }
            if w.iter().chain(&t).any(|x| !x.is_finite()) {
                return Err(NetworkError::Invalid(format!(
                    "layer {} has a non-finite parameter",
                    k + 1
                )));
            }
            layers.push(Layer {
                weights: w.chunks(cols).map(<[f64]>::to_vec).collect(),
                thresholds: t,
            });
        }
        Ok(Network {
            layer_sizes,
            layers,
            activation,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().expect("at least two layers")
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Weight from unit `from` of layer `layer - 1` into unit `unit` of
    /// `layer` (layers counted from the input, which is layer 0).
    pub fn weight(&self, layer: usize, unit: usize, from: usize) -> f64 {
        self.layers[layer - 1].weights[unit][from]
    }

    pub fn threshold(&self, layer: usize, unit: usize) -> f64 {
        self.layers[layer - 1].thresholds[unit]
    }

    fn activate(&self, total: f64, threshold: f64) -> f64 {
        match self.activation {
            Activation::Step => {
                if total >= threshold {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Logistic => 1.0 / (1.0 + (-(total - threshold)).exp()),
        }
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, NetworkError> {
        if input.len() != self.input_size() {
            return Err(mismatch("input vector", self.input_size(), input.len()));
        }
        let mut acts = input.to_vec();
        for layer in &self.layers {
            acts = layer
                .weights
                .iter()
                .zip(&layer.thresholds)
                .map(|(row, &t)| {
                    let total: f64 = row.iter().zip(&acts).map(|(w, a)| w * a).sum();
                    self.activate(total, t)
                })
                .collect();
        }
        Ok(acts)
    }

    pub fn squared_error(&self, input: &[f64], desired: &[f64]) -> Result<f64, NetworkError> {
        let out = self.forward(input)?;
        if desired.len() != out.len() {
            return Err(mismatch("desired vector", out.len(), desired.len()));
        }
        Ok(out
            .iter()
            .zip(desired)
            .map(|(a, d)| (d - a) * (d - a))
            .sum())
    }

    /// One delta-rule step on a single-layer logistic network. The update
    /// depends only on the input, the actual output and the desired output;
    /// what the output means under any convention plays no part.
    pub fn delta_update(
        &self,
        input: &[f64],
        desired: &[f64],
        rate: f64,
    ) -> Result<Network, NetworkError> {
        if self.layers.len() != 1 {
            return Err(NetworkError::UnsupportedTopology(format!(
                "delta rule needs a single non-input layer, found {}",
                self.layers.len()
            )));
        }
        if self.activation != Activation::Logistic {
            return Err(NetworkError::UnsupportedTopology(
                "delta rule needs logistic units".into(),
            ));
        }
        let actual = self.forward(input)?;
        if desired.len() != actual.len() {
            return Err(mismatch("desired vector", actual.len(), desired.len()));
        }
        let mut next = self.clone();
        let layer = &mut next.layers[0];
        for (j, (&a, &d)) in actual.iter().zip(desired).enumerate() {
            let delta = (d - a) * a * (1.0 - a);
            for (w, &x) in layer.weights[j].iter_mut().zip(input) {
                *w += rate * delta * x;
            }
            layer.thresholds[j] -= rate * delta;
        }
        Ok(next)
    }
}

/// A network together with the convention that decodes its outputs and the
/// questions it is designed to decide.
#[derive(Debug, Clone)]
pub struct NetworkSystem {
    pub net: Network,
    pub convention: OutputConvention,
    pub scope: QuestionScope,
}

impl NetworkSystem {
    pub fn new(
        net: Network,
        convention: OutputConvention,
        scope: QuestionScope,
    ) -> Result<Self, NetworkError> {
        convention.check_arity(net.output_size())?;
        for q in convention.decodable_questions() {
            if !scope.contains(&q) {
                return Err(NetworkError::OutOfScope(q));
            }
        }
        Ok(NetworkSystem {
            net,
            convention,
            scope,
        })
    }

    pub fn decode(&self, input: &[f64]) -> Result<Content, NetworkError> {
        let out = self.net.forward(input)?;
        self.convention.decode(&out)
    }

    /// Credence or verdict the decoded output carries about `f`, if any.
    pub fn stance_on(&self, content: &Content, f: &Formula) -> Option<NetworkStance> {
        content.stance_on(f)
    }
}

/// What one decoded output says about a particular formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NetworkStance {
    Verdict(TruthValue),
    Credence(f64),
}
