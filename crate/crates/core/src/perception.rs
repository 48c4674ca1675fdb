//! Synthetic perception: a Gaussian feature generator standing in for the
//! camera and feature extractor, a nearest-class-mean classifier, and a noisy
//! sensing channel with miss, misclassification and spurious-detection errors.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Environment;
use crate::vocab::Vocabulary;

pub const DEFAULT_FEATURE_DIM: usize = 32;
pub const DEFAULT_SIGMA: f64 = 0.1;

/// Class-conditional Gaussian feature generator, one mean per category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SyntheticFeatureModel {
    pub feature_dim: usize,
    /// Indexed by vocabulary position.
    pub class_means: Vec<Vec<f64>>,
    pub sigma: f64,
    pub rng_seed: u64,
}

/// Settings used to build a [`SyntheticFeatureModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct PerceptionConfig {
    pub feature_dim: usize,
    pub sigma: f64,
    /// Minimum distance between any two class means, in units of `sigma`.
    pub min_separation: f64,
    /// Samples per class used to fit the classifier.
    pub training_samples_per_class: usize,
    pub rng_seed: u64,
}

impl Default for PerceptionConfig {
    fn default() -> Self {
        Self {
            feature_dim: DEFAULT_FEATURE_DIM,
            sigma: DEFAULT_SIGMA,
            min_separation: 10.0,
            training_samples_per_class: 20,
            rng_seed: 7,
        }
    }
}

impl SyntheticFeatureModel {
    /// Draws one mean per category from `N(0, I)` and redraws until every pair is
    /// at least `min_separation * sigma` apart.
    pub fn generate(vocab: &Vocabulary, config: &PerceptionConfig) -> Result<Self> {
        if config.feature_dim == 0 {
            return Err(Error::InvalidParameter("featureDim must be positive".into()));
        }
        if config.sigma.is_nan() || config.sigma <= 0.0 {
            return Err(Error::InvalidParameter("sigma must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let min_dist = config.min_separation * config.sigma;
        for _ in 0..1000 {
            let means: Vec<Vec<f64>> = (0..vocab.dim())
                .map(|_| {
                    (0..config.feature_dim)
                        .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                        .collect()
                })
                .collect();
            let model = Self {
                feature_dim: config.feature_dim,
                class_means: means,
                sigma: config.sigma,
                rng_seed: config.rng_seed,
            };
            if model.min_mean_distance() >= min_dist {
                return Ok(model);
            }
        }
        Err(Error::InvalidParameter(format!(
            "could not place class means {} sigma apart in {} dimensions",
            config.min_separation, config.feature_dim
        )))
    }

    pub fn min_mean_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.class_means.iter().enumerate() {
            for b in &self.class_means[i + 1..] {
                best = best.min(euclidean(a, b));
            }
        }
        best
    }

    /// One feature vector drawn around the mean of class `class`.
    pub fn sample<R: Rng + ?Sized>(&self, class: usize, rng: &mut R) -> Vec<f64> {
        let noise = Normal::new(0.0, self.sigma).expect("sigma validated at construction");
        self.class_means[class].iter().map(|m| m + noise.sample(rng)).collect()
    }

    /// `per_class` labeled samples for every category, in vocabulary order.
    pub fn training_set(&self, vocab: &Vocabulary, per_class: usize) -> Vec<(Vec<f64>, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed.wrapping_add(1));
        let mut out = Vec::with_capacity(per_class * vocab.dim());
        for (c, label) in vocab.labels().iter().enumerate() {
            for _ in 0..per_class {
                out.push((self.sample(c, &mut rng), label.clone()));
            }
        }
        out
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NcmClass {
    pub label: String,
    pub mean: Vec<f64>,
    pub count: usize,
}

/// Nearest-class-mean classifier.
///
/// Classes are kept in vocabulary order, so equidistant features resolve to the
/// class with the lowest vocabulary index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NcmClassifier {
    classes: Vec<NcmClass>,
}

impl NcmClassifier {
    pub fn train(samples: &[(Vec<f64>, String)], vocab: &Vocabulary) -> Result<Self> {
        let Some((first, _)) = samples.first() else {
            return Err(Error::EmptyInput("training samples"));
        };
        let dim = first.len();
        let mut sums = vec![vec![0.0; dim]; vocab.dim()];
        let mut counts = vec![0usize; vocab.dim()];
        for (feature, label) in samples {
            if feature.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: feature.len(),
                });
            }
            let c = vocab
                .index_of(label)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown class label `{label}`")))?;
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(feature) {
                *s += x;
            }
        }
        let classes = sums
            .into_iter()
            .zip(counts)
            .enumerate()
            .filter(|(_, (_, n))| *n > 0)
            .map(|(c, (sum, n))| NcmClass {
                label: vocab.labels()[c].clone(),
                mean: sum.into_iter().map(|s| s / n as f64).collect(),
                count: n,
            })
            .collect();
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[NcmClass] {
        &self.classes
    }

    pub fn mean(&self, label: &str) -> Option<&[f64]> {
        self.classes
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.mean.as_slice())
    }

    /// Label of the class whose mean is closest in Euclidean distance.
    pub fn classify(&self, feature: &[f64]) -> &str {
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, class) in self.classes.iter().enumerate() {
            let d = squared_distance(feature, &class.mean);
            if d < best_dist {
                best = i;
                best_dist = d;
            }
        }
        &self.classes[best].label
    }
}

/// Error injection rates for the sensing channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct NoiseProfile {
    /// Probability that an object yields no detection at all.
    pub p_miss_detect: f64,
    /// Probability that a detected object's feature is drawn from a wrong class.
    pub p_misclassify: f64,
    /// Poisson mean of clutter detections per visit.
    pub spurious_rate: f64,
}

impl Default for NoiseProfile {
    /// Combined miss-or-misclassify rate 1 - 0.7 * 0.8 = 0.44 per object and
    /// 35 / 54 clutter detections per visit.
    fn default() -> Self {
        Self {
            p_miss_detect: 0.3,
            p_misclassify: 0.2,
            spurious_rate: 35.0 / 54.0,
        }
    }
}

impl NoiseProfile {
    pub fn noise_free() -> Self {
        Self {
            p_miss_detect: 0.0,
            p_misclassify: 0.0,
            spurious_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("pMissDetect", self.p_miss_detect),
            ("pMisclassify", self.p_misclassify),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if !self.spurious_rate.is_finite() || self.spurious_rate < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "spuriousRate must be >= 0, got {}",
                self.spurious_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Detection {
    pub feature: Vec<f64>,
    pub predicted_label: String,
    /// `None` for clutter detections that correspond to no placed object.
    pub ground_truth_label: Option<String>,
}

/// Everything needed to turn a context visit into labeled detections.
#[derive(Debug, Clone)]
pub struct Perception {
    pub vocab: Vocabulary,
    pub model: SyntheticFeatureModel,
    pub classifier: NcmClassifier,
}

impl Perception {
    /// Generates class means and fits the classifier on samples from them.
    pub fn build(vocab: Vocabulary, config: &PerceptionConfig) -> Result<Self> {
        let model = SyntheticFeatureModel::generate(&vocab, config)?;
        let samples = model.training_set(&vocab, config.training_samples_per_class.max(1));
        let classifier = NcmClassifier::train(&samples, &vocab)?;
        Ok(Self {
            vocab,
            model,
            classifier,
        })
    }

    pub fn sense_context<R: Rng + ?Sized>(
        &self,
        env: &Environment,
        context: &str,
        noise: &NoiseProfile,
        rng: &mut R,
    ) -> Result<Vec<Detection>> {
        sense_context(env, context, noise, &self.model, &self.classifier, &self.vocab, rng)
    }
}

/// Simulates one visit to `context` and classifies every resulting detection.
///
/// Consumes `rng` in a fixed order, so equal generator states give identical output.
pub fn sense_context<R: Rng + ?Sized>(
    env: &Environment,
    context: &str,
    noise: &NoiseProfile,
    model: &SyntheticFeatureModel,
    classifier: &NcmClassifier,
    vocab: &Vocabulary,
    rng: &mut R,
) -> Result<Vec<Detection>> {
    let items = env.items(context)?;
    let n_classes = model.class_means.len();
    let mut detections = Vec::new();
    for item in items {
        if rng.random::<f64>() < noise.p_miss_detect {
            continue;
        }
        let truth = vocab
            .index_of(&item.category)
            .ok_or_else(|| Error::InvalidScenario(format!("category `{}` not in vocabulary", item.category)))?;
        let mut drawn = truth;
        if n_classes > 1 && rng.random::<f64>() < noise.p_misclassify {
            // uniform over the other classes
            let k = rng.random_range(0..n_classes - 1);
            drawn = if k >= truth { k + 1 } else { k };
        }
        let feature = model.sample(drawn, rng);
        detections.push(Detection {
            predicted_label: classifier.classify(&feature).to_owned(),
            feature,
            ground_truth_label: Some(item.category.clone()),
        });
    }
    if noise.spurious_rate > 0.0 {
        let poisson = Poisson::new(noise.spurious_rate).expect("validated rate");
        let extra = poisson.sample(rng) as usize;
        for _ in 0..extra {
            let class = rng.random_range(0..n_classes);
            let feature = model.sample(class, rng);
            detections.push(Detection {
                predicted_label: classifier.classify(&feature).to_owned(),
                feature,
                ground_truth_label: None,
            });
        }
    }
    Ok(detections)
}
