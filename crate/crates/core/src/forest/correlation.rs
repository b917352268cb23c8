use std::fmt::Write as _;
use std::path::Path;

use super::LabeledFeatureMatrix;
use crate::error::{Error, Result};

/// Pearson correlation between every pair of feature columns.
///
/// Entries involving a constant column are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub feature_names: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.feature_names.iter().position(|n| n == a)?;
        let j = self.feature_names.iter().position(|n| n == b)?;
        self.values[i][j]
    }

    /// Names of columns that were constant.
    pub fn undefined(&self) -> Vec<&str> {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, row)| row[*i].is_none())
            .map(|(i, _)| self.feature_names[i].as_str())
            .collect()
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let width = self.feature_names.iter().map(|n| n.len()).max().unwrap_or(0);
        let _ = write!(s, "{:<width$}", "");
        for j in 0..self.feature_names.len() {
            let _ = write!(s, " {:>6}", format!("[{}]", j + 1));
        }
        let _ = writeln!(s);
        for (i, row) in self.values.iter().enumerate() {
            let _ = write!(s, "{:<width$}", format!("[{}] {}", i + 1, self.feature_names[i]), width = width + 5);
            for v in row {
                match v {
                    Some(r) => {
                        let _ = write!(s, " {:>6.2}", r);
                    }
                    None => {
                        let _ = write!(s, " {:>6}", "n/a");
                    }
                }
            }
            let _ = writeln!(s);
        }
        s
    }

    /// Square CSV with a header row of feature names; undefined entries are empty.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let wrap = |source: csv::Error| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(wrap)?;
        let mut header = vec![String::new()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header).map_err(wrap)?;
        for (name, row) in self.feature_names.iter().zip(&self.values) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|v| v.map(|r| format!("{r:.16e}")).unwrap_or_default()));
            w.write_record(&rec).map_err(wrap)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

pub fn pearson_correlation_matrix(data: &LabeledFeatureMatrix) -> Result<CorrelationMatrix> {
    let n = data.n_rows();
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "correlation needs at least 2 rows, got {n}"
        )));
    }
    let f = data.n_features();
    let centered: Vec<Vec<f64>> = (0..f)
        .map(|j| {
            let col = data.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            col.into_iter().map(|v| v - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    let mut values = vec![vec![None; f]; f];
    for i in 0..f {
        if norms[i] == 0.0 {
            continue;
        }
        values[i][i] = Some(1.0);
        for j in i + 1..f {
            if norms[j] == 0.0 {
                continue;
            }
            let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            let r = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            values[i][j] = Some(r);
            values[j][i] = Some(r);
        }
    }
    Ok(CorrelationMatrix {
        feature_names: data.feature_names.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_negation_and_constant() {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let x = (i as f64 * 1.7).sin();
                vec![x, -x, 3.0, x * x]
            })
            .collect();
        let data = LabeledFeatureMatrix::new(
            rows,
            vec!["d".to_string(); 10],
            ["a", "neg", "flat", "sq"].iter().map(|s| s.to_string()).collect(),
        )
        .unwrap();
        let m = pearson_correlation_matrix(&data).unwrap();
        assert_eq!(m.get("a", "a"), Some(1.0));
        assert!((m.get("a", "neg").unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(m.get("a", "flat"), None);
        assert_eq!(m.get("flat", "flat"), None);
        assert_eq!(m.undefined(), vec!["flat"]);
        assert_eq!(m.get("a", "sq"), m.get("sq", "a"));
        assert!(m.to_table().contains("n/a"));
    }

    #[test]
    fn needs_two_rows() {
        let data = LabeledFeatureMatrix::new(vec![vec![1.0]], vec!["d".into()], vec!["a".into()]).unwrap();
        assert!(pearson_correlation_matrix(&data).is_err());
    }
}
