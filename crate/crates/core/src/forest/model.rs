use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::DecisionTree;
use super::{LabeledFeatureMatrix, DEFAULT_TREES};
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainConfig {
    pub trees: usize,
    pub seed: u64,
    /// Candidate features per node; `None` means `⌈√F⌉`.
    pub max_features: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            trees: DEFAULT_TREES,
            seed: 42,
            max_features: None,
        }
    }
}

/// A trained forest. Class indices refer to `classes`, which is sorted, so
/// "smallest index" and "lexicographically smallest label" coincide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format_version: u32,
    pub seed: u64,
    pub classes: Vec<String>,
    pub feature_names: Vec<String>,
    /// FNV-1a digest of each tree's bootstrap index list.
    pub bootstrap_digests: Vec<u64>,
    pub importances: Vec<f64>,
    pub trees: Vec<DecisionTree>,
}

fn fnv1a(indices: &[usize]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &i in indices {
        for b in (i as u64).to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Per-tree RNG: one ChaCha stream per tree index, so the result does not
/// depend on scheduling.
fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

fn normalize(v: &mut [f64]) -> bool {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
        true
    } else {
        false
    }
}

pub fn train(data: &LabeledFeatureMatrix, cfg: &TrainConfig) -> Result<ForestModel> {
    let classes = data.classes();
    if classes.len() < 2 {
        return Err(Error::DegenerateTraining(format!(
            "need at least 2 classes, found {}",
            classes.len()
        )));
    }
    if data.n_rows() < 2 {
        return Err(Error::DegenerateTraining("need at least 2 rows".into()));
    }
    if cfg.trees == 0 {
        return Err(Error::InvalidConfig("tree count must be positive".into()));
    }
    let n_features = data.n_features();
    let mtry = cfg
        .max_features
        .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
        .clamp(1, n_features.max(1));
    let y: Vec<u32> = data
        .labels
        .iter()
        .map(|l| classes.binary_search(l).expect("label in class list") as u32)
        .collect();
    let n = data.n_rows();

    let grown: Vec<(DecisionTree, Vec<f64>, u64)> = (0..cfg.trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(cfg.seed, t);
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let digest = fnv1a(&bootstrap);
            let mut imp = vec![0.0; n_features];
            let tree = DecisionTree::fit(&data.rows, &y, classes.len(), bootstrap, mtry, &mut rng, &mut imp);
            (tree, imp, digest)
        })
        .collect();

    let mut importances = vec![0.0; n_features];
    let mut contributing = 0usize;
    let mut trees = Vec::with_capacity(grown.len());
    let mut bootstrap_digests = Vec::with_capacity(grown.len());
    for (tree, mut imp, digest) in grown {
        if normalize(&mut imp) {
            contributing += 1;
            for (acc, v) in importances.iter_mut().zip(&imp) {
                *acc += v;
            }
        }
        trees.push(tree);
        bootstrap_digests.push(digest);
    }
    if contributing == 0 || !normalize(&mut importances) {
        // no tree ever split
        importances = vec![1.0 / n_features as f64; n_features];
    }

    Ok(ForestModel {
        format_version: MODEL_FORMAT_VERSION,
        seed: cfg.seed,
        classes,
        feature_names: data.feature_names.clone(),
        bootstrap_digests,
        importances,
        trees,
    })
}

impl ForestModel {
    /// Assemble a model from explicit trees, e.g. for testing vote rules.
    pub fn from_trees(trees: Vec<DecisionTree>, classes: Vec<String>, feature_names: Vec<String>) -> Self {
        let n = feature_names.len();
        Self {
            format_version: MODEL_FORMAT_VERSION,
            seed: 0,
            bootstrap_digests: vec![0; trees.len()],
            importances: vec![1.0 / n.max(1) as f64; n],
            classes,
            feature_names,
            trees,
        }
    }

    /// Majority vote; ties go to the smallest class index.
    pub fn predict_index(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.feature_names.len() {
            return Err(Error::FeatureCount {
                expected: self.feature_names.len(),
                found: x.len(),
            });
        }
        let mut votes = vec![0u32; self.classes.len()];
        for t in &self.trees {
            votes[t.predict(x) as usize] += 1;
        }
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = c;
            }
        }
        Ok(best)
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>> {
        rows.par_iter().map(|r| self.predict_index(r)).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::to_writer(BufWriter::new(file), self).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let model: ForestModel =
            serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelVersion(model.format_version));
        }
        Ok(model)
    }
}

pub fn predict<'m>(model: &'m ForestModel, x: &[f64]) -> Result<&'m str> {
    model.predict_index(x).map(|i| model.classes[i].as_str())
}

/// Mean decrease in Gini impurity per feature, averaged over trees and
/// normalized to sum to one.
pub fn feature_importance(model: &ForestModel) -> Vec<f64> {
    model.importances.clone()
}
