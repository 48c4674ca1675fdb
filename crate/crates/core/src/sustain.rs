//! Long-term contextual memory: a supervised SUSTAIN network over context
//! observations.
//!
//! Each cluster carries a hard context label. A training example whose label
//! disagrees with the most activated cluster (or whose label has never been
//! seen) recruits a new cluster centred on the example; otherwise the winning
//! cluster moves toward the example and the shared receptive-field tunings
//! `lambda` adapt.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::LatentVariable;

/// Lower bound applied to every tuning after an update.
pub const LAMBDA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SustainParams {
    /// Attentional focus exponent.
    pub r: f64,
    /// Lateral inhibition exponent.
    pub beta: f64,
    /// Learning rate.
    pub eta: f64,
    pub lambda_init: f64,
}

impl Default for SustainParams {
    fn default() -> Self {
        Self {
            r: 2.0,
            beta: 1.0,
            eta: 0.1,
            lambda_init: 1.0,
        }
    }
}

impl SustainParams {
    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || self.r < 0.0 {
            return Err(Error::InvalidParameter(format!("r must be >= 0, got {}", self.r)));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::InvalidParameter(format!("beta must be >= 0, got {}", self.beta)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must lie in (0, 1], got {}",
                self.eta
            )));
        }
        if !self.lambda_init.is_finite() || self.lambda_init <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambdaInit must be > 0, got {}",
                self.lambda_init
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Cluster {
    pub centroid: Vec<f64>,
    pub label: String,
    #[serde(default)]
    pub is_storage: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SustainNetwork {
    lambda: Vec<f64>,
    params: SustainParams,
    clusters: Vec<Cluster>,
}

impl SustainNetwork {
    pub fn new(dim: usize, params: SustainParams) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("network dimension must be positive".into()));
        }
        params.validate()?;
        Ok(Self {
            lambda: vec![params.lambda_init; dim],
            params,
            clusters: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn params(&self) -> &SustainParams {
        &self.params
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Clusters that take part in missing-item comparison.
    pub fn context_clusters(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(|c| !c.is_storage)
    }

    /// Checks dimensions and value ranges after deserialization.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.lambda.is_empty() {
            return Err(Error::Inconsistent("network has zero dimensions".into()));
        }
        if let Some(l) = self.lambda.iter().find(|l| !l.is_finite() || **l <= 0.0) {
            return Err(Error::Inconsistent(format!("non-positive tuning {l}")));
        }
        for c in &self.clusters {
            if c.centroid.len() != self.dim() {
                return Err(Error::Inconsistent(format!(
                    "cluster `{}` has dimension {} but network has {}",
                    c.label,
                    c.centroid.len(),
                    self.dim()
                )));
            }
            if c.label.is_empty() {
                return Err(Error::Inconsistent("cluster with empty label".into()));
            }
        }
        Ok(())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Attention-weighted similarity of `x` to every cluster, in cluster order.
    pub fn activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let weights: Vec<f64> = self.lambda.iter().map(|l| l.powf(self.params.r)).collect();
        let norm: f64 = weights.iter().sum();
        Ok(self
            .clusters
            .iter()
            .map(|c| {
                let num: f64 = weights
                    .iter()
                    .zip(&self.lambda)
                    .zip(x.iter().zip(&c.centroid))
                    .map(|((w, l), (xj, cj))| w * (-l * (xj - cj).abs()).exp())
                    .sum();
                num / norm
            })
            .collect())
    }

    /// Activations after lateral inhibition among clusters.
    pub fn inhibited_activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        let h = self.activations(x)?;
        let beta = self.params.beta;
        let total: f64 = h.iter().map(|v| v.powf(beta)).sum();
        Ok(h.iter().map(|v| v.powf(beta) / total * v).collect())
    }

    fn winner(&self, x: &[f64]) -> Result<Option<usize>> {
        Ok(argmax(&self.activations(x)?))
    }

    /// Presents one supervised example. Returns `true` when a new cluster was recruited.
    pub fn learn_example(&mut self, x: &LatentVariable, label: &str, is_storage: bool) -> Result<bool> {
        self.learn(&x.values, label, is_storage)
    }

    pub fn learn(&mut self, x: &[f64], label: &str, is_storage: bool) -> Result<bool> {
        self.check(x)?;
        if label.is_empty() {
            return Err(Error::InvalidParameter("context label must be non-empty".into()));
        }
        let winner = match self.winner(x)? {
            Some(w) if self.clusters[w].label == label => w,
            _ => {
                self.clusters.push(Cluster {
                    centroid: x.to_vec(),
                    label: label.to_owned(),
                    is_storage,
                });
                return Ok(true);
            }
        };
        let eta = self.params.eta;
        let centroid = &mut self.clusters[winner].centroid;
        for ((c, xj), l) in centroid.iter_mut().zip(x).zip(self.lambda.iter_mut()) {
            let mu = (xj - *c).abs();
            *c += eta * (xj - *c);
            *l += eta * (-*l * mu).exp() * (1.0 - *l * mu);
            *l = l.max(LAMBDA_FLOOR);
        }
        Ok(false)
    }

    /// Context label of the most activated cluster.
    pub fn predict_category(&self, x: &[f64]) -> Result<&str> {
        if self.clusters.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        let inhibited = self.inhibited_activations(x)?;
        let best = argmax(&inhibited).expect("non-empty");
        debug_assert_eq!(Some(best), self.winner(x)?, "inhibition changed the winner");
        Ok(&self.clusters[best].label)
    }
}

/// Index of the largest value, lowest index on ties.
fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}
