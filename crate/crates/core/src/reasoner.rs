//! Missing-item reasoning over the short-term window.
//!
//! Each stored observation is compared against every learned (non-storage)
//! context cluster. Per dimension, the per-cluster score `exp(lambda * (x - c))`
//! is clamped to zero wherever the observation has the object, the scores are
//! averaged over clusters, and the resulting prediction vectors are multiplied
//! across the window. A dimension survives the product only if the object was
//! never seen during the window.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sustain::SustainNetwork;
use crate::vocab::{LatentVariable, Vocabulary};

/// Default centroid level above which a dimension counts as a known household item.
pub const DEFAULT_PRESENCE_THETA: f64 = 0.5;

/// Per-visit missingness scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PredictionLv {
    pub values: Vec<f64>,
    pub source_day: u32,
}

pub fn prediction_lv(x: &LatentVariable, net: &SustainNetwork) -> Result<PredictionLv> {
    x.check_dim(net.dim())?;
    let lambda = net.lambda();
    let mut sums = vec![0.0; net.dim()];
    let mut k = 0usize;
    for cluster in net.context_clusters() {
        k += 1;
        for (j, sum) in sums.iter_mut().enumerate() {
            if x.values[j] > 0.0 {
                continue;
            }
            *sum += (lambda[j] * (x.values[j] - cluster.centroid[j])).exp();
        }
    }
    if k == 0 {
        return Err(Error::NoContextClusters);
    }
    let values = sums.into_iter().map(|s| (s / k as f64).min(1.0)).collect();
    Ok(PredictionLv {
        values,
        source_day: x.day,
    })
}

/// Per-dimension product of a window's prediction vectors, held as logarithms so
/// long windows cannot underflow a positive product to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowProduct {
    log_values: Vec<f64>,
}

impl WindowProduct {
    pub fn from_values(values: &[f64]) -> Self {
        Self {
            log_values: values.iter().map(|v| v.ln()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.log_values.len()
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// The product itself; may round tiny positive values to zero.
    pub fn values(&self) -> Vec<f64> {
        self.log_values.iter().map(|l| l.exp()).collect()
    }

    pub fn is_positive(&self, j: usize) -> bool {
        self.log_values[j] > f64::NEG_INFINITY
    }
}

pub fn aggregate_window(predictions: &[PredictionLv]) -> Result<WindowProduct> {
    let Some(first) = predictions.first() else {
        return Err(Error::EmptyInput("prediction window"));
    };
    let dim = first.values.len();
    let mut log_values = vec![0.0; dim];
    for p in predictions {
        if p.values.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.values.len(),
            });
        }
        for (acc, v) in log_values.iter_mut().zip(&p.values) {
            *acc += v.ln();
        }
    }
    Ok(WindowProduct { log_values })
}

/// Household items whose window product is still positive.
///
/// A dimension is a household item when some context cluster has a centroid
/// component of at least `presence_theta` there.
pub fn decode_missing(
    product: &WindowProduct,
    net: &SustainNetwork,
    vocab: &Vocabulary,
    presence_theta: f64,
) -> Result<BTreeSet<String>> {
    if product.dim() != vocab.dim() {
        return Err(Error::DimensionMismatch {
            expected: vocab.dim(),
            actual: product.dim(),
        });
    }
    if net.dim() != vocab.dim() {
        return Err(Error::DimensionMismatch {
            expected: vocab.dim(),
            actual: net.dim(),
        });
    }
    let known = household_mask(net, presence_theta);
    Ok(vocab.labels_at((0..vocab.dim()).filter(|&j| known[j] && product.is_positive(j))))
}

fn household_mask(net: &SustainNetwork, presence_theta: f64) -> Vec<bool> {
    let mut mask = vec![false; net.dim()];
    for c in net.context_clusters() {
        for (m, v) in mask.iter_mut().zip(&c.centroid) {
            *m |= *v >= presence_theta;
        }
    }
    mask
}

/// Every label detected at least once across the window.
pub fn observed_set(window: &[LatentVariable], vocab: &Vocabulary) -> BTreeSet<String> {
    vocab.labels_at(window.iter().flat_map(LatentVariable::present))
}

/// Splits candidates into those still missing and those found in storage.
pub fn apply_storage(
    candidates: &BTreeSet<String>,
    storage_observed: &BTreeSet<String>,
) -> (BTreeSet<String>, BTreeSet<String>) {
    candidates
        .iter()
        .cloned()
        .partition(|item| !storage_observed.contains(item))
}

/// Persistent set of items believed missing across windows.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MissingList {
    items: BTreeSet<String>,
}

impl MissingList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn items(&self) -> &BTreeSet<String> {
        &self.items
    }

    pub fn contains(&self, item: &str) -> bool {
        self.items.contains(item)
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Drops everything re-observed in the window, then adds the window's predictions.
    pub fn update(&mut self, predicted: &BTreeSet<String>, observed: &BTreeSet<String>) {
        self.items.retain(|item| !observed.contains(item));
        self.items.extend(predicted.iter().cloned());
    }

    /// Missing items the user has not already put on their own list.
    pub fn diff_with_user_list(&self, user_list: &BTreeSet<String>) -> BTreeSet<String> {
        self.items.difference(user_list).cloned().collect()
    }

    pub fn reset(&mut self) {
        self.items.clear();
    }
}

impl FromIterator<String> for MissingList {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        Self {
            items: iter.into_iter().collect(),
        }
    }
}

/// Outcome of processing one short-term window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MissingReport {
    /// Number of days elapsed when the window closed.
    pub window_end_day: u32,
    /// Items predicted missing in this window, after storage exclusion.
    pub predicted: BTreeSet<String>,
    pub observed: BTreeSet<String>,
    /// Candidates found in storage instead of being flagged.
    pub storage_items: BTreeSet<String>,
    /// The persistent missing list after this window's update.
    pub missing_list: BTreeSet<String>,
}

/// Runs the full per-window pipeline and updates `missing`.
///
/// A window without any observation yields no predictions.
pub fn process_window(
    window: &[LatentVariable],
    storage_observed: &BTreeSet<String>,
    net: &SustainNetwork,
    vocab: &Vocabulary,
    presence_theta: f64,
    window_end_day: u32,
    missing: &mut MissingList,
) -> Result<MissingReport> {
    let observed = observed_set(window, vocab);
    let candidates = if window.is_empty() {
        BTreeSet::new()
    } else {
        let predictions = window
            .iter()
            .map(|x| prediction_lv(x, net))
            .collect::<Result<Vec<_>>>()?;
        decode_missing(&aggregate_window(&predictions)?, net, vocab, presence_theta)?
    };
    let (predicted, storage_items) = apply_storage(&candidates, storage_observed);
    missing.update(&predicted, &observed);
    Ok(MissingReport {
        window_end_day,
        predicted,
        observed,
        storage_items,
        missing_list: missing.items().clone(),
    })
}
