//! Tabular datasets for the model-quality games.

use std::io::BufRead;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Regression,
    Classification,
}

/// A dense numeric dataset: row-major features plus a target column.
#[derive(Clone, Debug)]
pub struct Dataset {
    features: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    target: Vec<f64>,
    names: Vec<String>,
    task: Task,
}

impl Dataset {
    pub fn new(
        features: Vec<f64>,
        n_cols: usize,
        target: Vec<f64>,
        names: Vec<String>,
        task: Task,
    ) -> Self {
        assert!(n_cols >= 1);
        let n_rows = target.len();
        assert!(n_rows >= 2, "need at least two instances");
        assert_eq!(features.len(), n_rows * n_cols);
        assert_eq!(names.len(), n_cols);
        if task == Task::Classification {
            assert!(
                target.iter().all(|&y| y == 0.0 || y == 1.0),
                "classification targets must be 0/1"
            );
        }
        Dataset {
            features,
            n_rows,
            n_cols,
            target,
            names,
            task,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_cols
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// A new dataset keeping only the given rows (order preserved).
    pub fn subset_rows(&self, rows: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(rows.len() * self.n_cols);
        let mut target = Vec::with_capacity(rows.len());
        for &r in rows {
            features.extend_from_slice(self.row(r));
            target.push(self.target[r]);
        }
        Dataset {
            features,
            n_rows: rows.len(),
            n_cols: self.n_cols,
            target,
            names: self.names.clone(),
            task: self.task,
        }
    }

    /// Seeded shuffle followed by a fraction split. A test fraction of zero
    /// is allowed but logged, since scores on an empty test set are
    /// undefined downstream.
    pub fn split_train_test(&self, train_fraction: f64, seed: u64) -> (Dataset, Dataset) {
        assert!((0.0..=1.0).contains(&train_fraction));
        let mut order: Vec<usize> = (0..self.n_rows).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let cut = (train_fraction * self.n_rows as f64).round() as usize;
        let cut = cut.min(self.n_rows);
        if cut == self.n_rows {
            log::warn!("train fraction {train_fraction} leaves an empty test set");
        }
        (
            self.subset_rows(&order[..cut]),
            self.subset_rows(&order[cut..]),
        )
    }
}

impl Dataset {
    /// Lenient subset constructor used by games: zero rows allowed.
    pub(crate) fn subset_rows_lenient(&self, rows: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(rows.len() * self.n_cols);
        let mut target = Vec::with_capacity(rows.len());
        for &r in rows {
            features.extend_from_slice(self.row(r));
            target.push(self.target[r]);
        }
        Dataset {
            features,
            n_rows: rows.len(),
            n_cols: self.n_cols,
            target,
            names: self.names.clone(),
            task: self.task,
        }
    }
}

/// Loads a CSV (UTF-8, comma separated, header row, plain decimal reals,
/// no quoting) selecting the target by header name.
pub fn load_csv(path: impl AsRef<Path>, target_name: &str, task: Task) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    load_csv_reader(&mut std::io::BufReader::new(file), target_name, task)
}

pub fn load_csv_reader(
    reader: &mut impl BufRead,
    target_name: &str,
    task: Task,
) -> Result<Dataset> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty file".into(),
    })??;
    let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let target_idx = columns
        .iter()
        .position(|c| c == target_name)
        .ok_or_else(|| Error::MissingTargetColumn(target_name.to_string()))?;
    let names: Vec<String> = columns
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target_idx)
        .map(|(_, c)| c.clone())
        .collect();
    if names.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no feature columns".into(),
        });
    }

    let mut features = Vec::new();
    let mut target = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(Error::Parse {
                line: lineno + 2,
                message: format!("expected {} cells, got {}", columns.len(), cells.len()),
            });
        }
        for (col, cell) in cells.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::NonNumericCell {
                line: lineno + 2,
                column: col + 1,
            })?;
            if col == target_idx {
                target.push(value);
            } else {
                features.push(value);
            }
        }
    }
    if target.len() < 2 {
        return Err(Error::Parse {
            line: target.len() + 1,
            message: "need at least two data rows".into(),
        });
    }
    if task == Task::Classification && target.iter().any(|&y| y != 0.0 && y != 1.0) {
        return Err(Error::Parse {
            line: 0,
            message: "classification target must be 0/1".into(),
        });
    }
    Ok(Dataset::new(features, names.len(), target, names, task))
}
