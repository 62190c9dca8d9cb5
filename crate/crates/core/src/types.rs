//! Domain types shared across the pipeline.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// Absolute tolerance used when checking that distributions sum to one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A point of the instance space. Distances are Euclidean.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("point must have at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(invalid(format!("non-finite coordinate {c}")));
        }
        Ok(Self { coords })
    }

    /// One-dimensional point. Panics on a non-finite coordinate.
    pub fn scalar(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite coordinate {x}");
        Self { coords: vec![x] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// First coordinate; the 1-D learners only look at this.
    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn distance(&self, other: &Point) -> f64 {
        if self.coords.len() == 1 && other.coords.len() == 1 {
            return (self.coords[0] - other.coords[0]).abs();
        }
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Whether labels are real numbers in [0, 1] or binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Binary,
    Real,
}

impl TaskKind {
    pub fn code(self) -> u8 {
        match self {
            TaskKind::Binary => 0,
            TaskKind::Real => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(TaskKind::Binary),
            1 => Some(TaskKind::Real),
            _ => None,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskKind::Binary => f.write_str("binary"),
            TaskKind::Real => f.write_str("real"),
        }
    }
}

/// Ordered labeled sample. Positions are stable identifiers used by
/// compression sets, so the order must never change after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    items: Vec<(Point, f64)>,
    kind: TaskKind,
}

impl LabeledSample {
    pub fn new(items: Vec<(Point, f64)>, kind: TaskKind) -> Result<Self> {
        if items.is_empty() {
            return Err(invalid("sample must be nonempty"));
        }
        let dim = items[0].0.dim();
        for (i, (p, y)) in items.iter().enumerate() {
            if p.dim() != dim {
                return Err(invalid(format!(
                    "point {i} has dimension {} (expected {dim})",
                    p.dim()
                )));
            }
            let ok = match kind {
                TaskKind::Binary => *y == 0.0 || *y == 1.0,
                TaskKind::Real => y.is_finite() && (0.0..=1.0).contains(y),
            };
            if !ok {
                return Err(invalid(format!(
                    "label {y} at index {i} outside the {kind} label range"
                )));
            }
        }
        Ok(Self { items, kind })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn kind(&self) -> TaskKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.items[0].0.dim()
    }

    pub fn items(&self) -> &[(Point, f64)] {
        &self.items
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.items[i].0
    }

    pub fn label(&self, i: usize) -> f64 {
        self.items[i].1
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Point, f64)> {
        self.items.iter()
    }

    /// The examples at `indices`, in that order and with multiplicity.
    pub fn select(&self, indices: &[usize]) -> Vec<(Point, f64)> {
        indices.iter().map(|&i| self.items[i].clone()).collect()
    }
}

/// Anything that maps a point to a real prediction.
pub trait Predictor: Send + Sync + fmt::Debug {
    fn predict(&self, x: &Point) -> f64;
}

/// A trained hypothesis together with the sample indices it was fit on.
#[derive(Clone, Debug)]
pub struct Hypothesis {
    model: Arc<dyn Predictor>,
    provenance: Option<Vec<usize>>,
}

impl Hypothesis {
    pub fn new(model: Arc<dyn Predictor>) -> Self {
        Self {
            model,
            provenance: None,
        }
    }

    pub fn with_provenance(model: Arc<dyn Predictor>, indices: Vec<usize>) -> Self {
        Self {
            model,
            provenance: Some(indices),
        }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.model.predict(x)
    }

    pub fn provenance(&self) -> Option<&[usize]> {
        self.provenance.as_deref()
    }

    pub fn model(&self) -> &Arc<dyn Predictor> {
        &self.model
    }

    /// Predictions on every sample point, in sample order.
    pub fn eval_sample(&self, sample: &LabeledSample) -> Vec<f64> {
        sample.iter().map(|(x, _)| self.eval(x)).collect()
    }
}

/// Hypotheses h_1..h_T with nonnegative weights, aggregated by weighted median.
#[derive(Clone, Debug)]
pub struct WeightedEnsemble {
    hypotheses: Vec<Hypothesis>,
    weights: Vec<f64>,
}

impl WeightedEnsemble {
    pub fn new(hypotheses: Vec<Hypothesis>, weights: Vec<f64>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(invalid("ensemble must contain at least one hypothesis"));
        }
        if hypotheses.len() != weights.len() {
            return Err(invalid(format!(
                "{} hypotheses but {} weights",
                hypotheses.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(invalid("ensemble weights must be finite and nonnegative"));
        }
        if !weights.iter().any(|w| *w > 0.0) {
            return Err(invalid("at least one ensemble weight must be positive"));
        }
        Ok(Self {
            hypotheses,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Member predictions at `x`, in round order.
    pub fn member_values(&self, x: &Point) -> Vec<f64> {
        self.hypotheses.iter().map(|h| h.eval(x)).collect()
    }
}

/// Probability masses over sample indices.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    masses: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(invalid("distribution over an empty index set"));
        }
        Ok(Self {
            masses: vec![1.0 / m as f64; m],
        })
    }

    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(invalid("distribution over an empty index set"));
        }
        if masses.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(invalid("masses must be finite and nonnegative"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { masses })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(invalid("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("weights have zero total"));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.masses
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum()
    }
}
