use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{train, TrainConfig};
use super::{LabeledFeatureMatrix, DEFAULT_FOLDS, DEFAULT_TREES};
use crate::error::{Error, Result};
use crate::kalman::{smooth_dataset, KalmanConfig};

/// When Kalman smoothing runs relative to the fold split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingOrder {
    /// Smooth each device's full sequence, then split.
    #[default]
    PreSplit,
    /// Split first, then smooth train and test partitions separately.
    PostSplit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub trees: usize,
    pub seed: u64,
    pub smoothing: Option<KalmanConfig>,
    pub smoothing_order: SmoothingOrder,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: DEFAULT_FOLDS,
            trees: DEFAULT_TREES,
            seed: 42,
            smoothing: None,
            smoothing_order: SmoothingOrder::PreSplit,
        }
    }
}

/// Cross-validation outcome. `accuracy` is pooled over all test rows, i.e.
/// `trace(confusion) / sum(confusion)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub mean_fold_accuracy: f64,
    pub per_fold_accuracies: Vec<f64>,
    pub classes: Vec<String>,
    /// Rows are true classes, columns predicted classes.
    pub confusion_matrix: Vec<Vec<u64>>,
    pub feature_names: Vec<String>,
    pub feature_importances: Vec<f64>,
}

/// Stratified fold assignment: each class's rows are shuffled and dealt
/// round-robin, so per-class fold counts differ by at most one.
pub fn stratified_folds(labels: &[String], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 folds, got {folds}")));
    }
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(l.as_str()).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); folds];
    let mut offset = 0;
    for (class, mut members) in by_class {
        if members.len() < folds {
            return Err(Error::Stratification {
                class: class.to_string(),
                count: members.len(),
                folds,
            });
        }
        members.shuffle(&mut rng);
        for (k, idx) in members.into_iter().enumerate() {
            out[(k + offset) % folds].push(idx);
        }
        // rotate the starting fold so remainders spread across folds
        offset += 1;
    }
    for f in out.iter_mut() {
        f.sort_unstable();
    }
    Ok(out)
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn cross_validate(data: &LabeledFeatureMatrix, cfg: &CvConfig) -> Result<EvalReport> {
    let classes = data.classes();
    if classes.len() < 2 {
        return Err(Error::DegenerateTraining(format!(
            "need at least 2 classes, found {}",
            classes.len()
        )));
    }
    let folds = stratified_folds(&data.labels, cfg.folds, cfg.seed)?;

    let pre_smoothed;
    let data = match (&cfg.smoothing, cfg.smoothing_order) {
        (Some(k), SmoothingOrder::PreSplit) => {
            pre_smoothed = smooth_dataset(data, k)?;
            &pre_smoothed
        }
        _ => data,
    };

    let c = classes.len();
    let mut confusion = vec![vec![0u64; c]; c];
    let mut per_fold = Vec::with_capacity(folds.len());
    let mut importances = vec![0.0; data.n_features()];
    let mut in_test = vec![false; data.n_rows()];

    for (f, test_idx) in folds.iter().enumerate() {
        in_test.iter_mut().for_each(|t| *t = false);
        for &i in test_idx {
            in_test[i] = true;
        }
        let train_idx: Vec<usize> = (0..data.n_rows()).filter(|&i| !in_test[i]).collect();
        let mut train_set = data.subset(&train_idx);
        let mut test_set = data.subset(test_idx);
        if let (Some(k), SmoothingOrder::PostSplit) = (&cfg.smoothing, cfg.smoothing_order) {
            train_set = smooth_dataset(&train_set, k)?;
            test_set = smooth_dataset(&test_set, k)?;
        }

        let model = train(
            &train_set,
            &TrainConfig {
                trees: cfg.trees,
                seed: fold_seed(cfg.seed, f),
                max_features: None,
            },
        )?;
        let predicted = model.predict_batch(&test_set.rows)?;
        let mut correct = 0usize;
        for (label, p) in test_set.labels.iter().zip(predicted) {
            let truth = classes.binary_search(label).expect("label in class list");
            let pred_label = &model.classes[p];
            let pred = classes.binary_search(pred_label).expect("model class in class list");
            confusion[truth][pred] += 1;
            if truth == pred {
                correct += 1;
            }
        }
        per_fold.push(correct as f64 / test_set.n_rows() as f64);
        for (acc, v) in importances.iter_mut().zip(&model.importances) {
            *acc += v;
        }
    }

    let total: u64 = confusion.iter().flatten().sum();
    let trace: u64 = (0..c).map(|i| confusion[i][i]).sum();
    let imp_sum: f64 = importances.iter().sum();
    importances.iter_mut().for_each(|v| *v /= imp_sum);

    Ok(EvalReport {
        accuracy: trace as f64 / total as f64,
        mean_fold_accuracy: per_fold.iter().sum::<f64>() / per_fold.len() as f64,
        per_fold_accuracies: per_fold,
        classes,
        confusion_matrix: confusion,
        feature_names: data.feature_names.clone(),
        feature_importances: importances,
    })
}

impl EvalReport {
    /// `(name, importance)` sorted by decreasing importance, ties by name order.
    pub fn importance_ranking(&self) -> Vec<(&str, f64)> {
        let mut r: Vec<(usize, f64)> = self.feature_importances.iter().copied().enumerate().collect();
        r.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        r.into_iter()
            .map(|(i, v)| (self.feature_names[i].as_str(), v))
            .collect()
    }

    /// Accuracy and importance tables for terminal output.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<28} {:>10}", "Setting", "Accuracy");
        for (i, a) in self.per_fold_accuracies.iter().enumerate() {
            let _ = writeln!(s, "{:<28} {:>10.2}", format!("fold {}", i + 1), a * 100.0);
        }
        let _ = writeln!(
            s,
            "{:<28} {:>10.2}",
            format!("{}-fold average", self.per_fold_accuracies.len()),
            self.mean_fold_accuracy * 100.0
        );
        let _ = writeln!(s, "{:<28} {:>10.2}", "pooled", self.accuracy * 100.0);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<28} {:>10}", "Feature", "Importance");
        for (name, v) in self.importance_ranking() {
            let _ = writeln!(s, "{:<28} {:>10.4}", name, v);
        }
        s
    }

    /// Writes `accuracy.csv`, `importance.csv` and `confusion.csv` into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        let csv_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source: csv::Error| Error::Csv { path: path.clone(), source }
        };

        let p = dir.join("accuracy.csv");
        let mut w = csv::Writer::from_path(&p).map_err(csv_err(&p))?;
        w.write_record(["fold", "accuracy"]).map_err(csv_err(&p))?;
        for (i, a) in self.per_fold_accuracies.iter().enumerate() {
            w.write_record([(i + 1).to_string(), format!("{a:.16e}")]).map_err(csv_err(&p))?;
        }
        w.write_record(["mean".to_string(), format!("{:.16e}", self.mean_fold_accuracy)])
            .map_err(csv_err(&p))?;
        w.write_record(["pooled".to_string(), format!("{:.16e}", self.accuracy)])
            .map_err(csv_err(&p))?;
        w.flush().map_err(|source| Error::Io { path: p.clone(), source })?;

        let p = dir.join("importance.csv");
        let mut w = csv::Writer::from_path(&p).map_err(csv_err(&p))?;
        w.write_record(["feature", "importance"]).map_err(csv_err(&p))?;
        for (name, v) in self.importance_ranking() {
            w.write_record([name.to_string(), format!("{v:.16e}")]).map_err(csv_err(&p))?;
        }
        w.flush().map_err(|source| Error::Io { path: p.clone(), source })?;

        let p = dir.join("confusion.csv");
        let mut w = csv::Writer::from_path(&p).map_err(csv_err(&p))?;
        let mut header = vec!["true\\predicted".to_string()];
        header.extend(self.classes.iter().cloned());
        w.write_record(&header).map_err(csv_err(&p))?;
        for (label, row) in self.classes.iter().zip(&self.confusion_matrix) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(csv_err(&p))?;
        }
        w.flush().map_err(|source| Error::Io { path: p, source })?;
        Ok(())
    }
}
