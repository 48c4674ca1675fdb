//! Object vocabulary and the conceptual-space encoding of context observations.
//!
//! Every observation of a context is a point in a space with one quality
//! dimension per object category. A component is `1.0` when the category was
//! detected at least once during the visit and `0.0` otherwise.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered, duplicate-free list of object category names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Vocabulary {
    labels: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidVocabulary("vocabulary is empty".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::InvalidVocabulary("empty label".into()));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::InvalidVocabulary(format!("duplicate label `{label}`")));
            }
        }
        Ok(Self { labels, index })
    }

    /// Dimension of the latent space.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    /// Labels at the given indices, as an ordered set.
    pub fn labels_at(&self, indices: impl IntoIterator<Item = usize>) -> BTreeSet<String> {
        indices
            .into_iter()
            .filter_map(|i| self.labels.get(i).cloned())
            .collect()
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(deserializer)?;
        Vocabulary::new(labels).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LvKind {
    Observation,
    Prediction,
}

/// A point in the conceptual space describing the objects of one context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentVariable {
    pub values: Vec<f64>,
    pub day: u32,
    #[serde(default)]
    pub context: Option<String>,
    pub kind: LvKind,
}

impl LatentVariable {
    pub fn observation(values: Vec<f64>, day: u32, context: Option<String>) -> Self {
        Self {
            values,
            day,
            context,
            kind: LvKind::Observation,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Indices of dimensions with a strictly positive component.
    pub fn present(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(j, _)| j)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.values.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Result of encoding a detection list.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub lv: LatentVariable,
    /// Number of detections whose label is not in the vocabulary.
    pub skipped: usize,
}

/// Encodes detected category labels as a binary presence observation.
///
/// Labels outside the vocabulary are dropped and counted in `skipped`.
pub fn encode<S: AsRef<str>>(detections: &[S], vocab: &Vocabulary, day: u32, context: Option<&str>) -> Encoded {
    let mut values = vec![0.0; vocab.dim()];
    let mut skipped = 0;
    for label in detections {
        match vocab.index_of(label.as_ref()) {
            Some(j) => values[j] = 1.0,
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("encode: skipped {skipped} out-of-vocabulary detection(s)");
    }
    Encoded {
        lv: LatentVariable::observation(values, day, context.map(str::to_owned)),
        skipped,
    }
}

/// Returns the labels whose mask component is strictly greater than `threshold`.
pub fn decode(mask: &[f64], threshold: f64, vocab: &Vocabulary) -> Result<BTreeSet<String>> {
    if mask.len() != vocab.dim() {
        return Err(Error::DimensionMismatch {
            expected: vocab.dim(),
            actual: mask.len(),
        });
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "decode threshold must be >= 0, got {threshold}"
        )));
    }
    Ok(vocab.labels_at(mask.iter().enumerate().filter(|(_, v)| **v > threshold).map(|(j, _)| j)))
}
