//! Minimal in-repo models: ordinary least squares and logistic regression,
//! and the coalition-restricted fit/score primitive.

use crate::coalition::Coalition;
use crate::numeric::sigmoid;

use super::dataset::{Dataset, Task};

const RIDGE_JITTER: f64 = 1e-8;
const LOGISTIC_STEPS: usize = 1000;
const LOGISTIC_LR: f64 = 0.1;
const LOGISTIC_L2: f64 = 1e-4;

/// A fitted model over an explicit subset of feature columns.
///
/// Predictions are deterministic; logistic outputs are probabilities in
/// (0,1).
#[derive(Clone, Debug)]
pub enum Model {
    Constant(f64),
    Linear(LinearModel),
    Logistic(LogisticModel),
}

#[derive(Clone, Debug)]
pub struct LinearModel {
    /// Selected feature columns, parallel to `coefficients`.
    pub columns: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

#[derive(Clone, Debug)]
pub struct LogisticModel {
    pub columns: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Per-column standardization (mean, std) fitted on the training data.
    pub scaler: Vec<(f64, f64)>,
}

impl Model {
    /// Raw prediction: regression value, or P(y = 1) for logistic models.
    pub fn predict(&self, row: &[f64]) -> f64 {
        match self {
            Model::Constant(c) => *c,
            Model::Linear(m) => {
                let mut y = m.intercept;
                for (k, &col) in m.columns.iter().enumerate() {
                    y += m.coefficients[k] * row[col];
                }
                y
            }
            Model::Logistic(m) => {
                let mut z = m.intercept;
                for (k, &col) in m.columns.iter().enumerate() {
                    let (mean, std) = m.scaler[k];
                    z += m.coefficients[k] * (row[col] - mean) / std;
                }
                sigmoid(z)
            }
        }
    }
}

/// Solves the symmetric positive-definite system `A x = b` by Gaussian
/// elimination with partial pivoting (tiny systems only).
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("finite"))
            .expect("nonempty");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    x
}

/// Columns from `subset` that vary on the training data; constant columns
/// are dropped with a warning rather than failing the fit.
fn usable_columns(train: &Dataset, subset: &Coalition) -> Vec<usize> {
    let mut columns = Vec::new();
    for col in subset.members() {
        let first = train.row(0)[col];
        let varies = (1..train.n_rows()).any(|r| train.row(r)[col] != first);
        if varies {
            columns.push(col);
        } else {
            log::warn!("feature column {col} is constant on the training split; dropped");
        }
    }
    columns
}

/// Fits the task's model on the selected feature columns.
pub fn fit(train: &Dataset, subset: &Coalition) -> Model {
    let columns = usable_columns(train, subset);
    if columns.is_empty() || train.n_rows() == 0 {
        return match train.task() {
            Task::Regression => {
                let mean = if train.n_rows() == 0 {
                    0.0
                } else {
                    train.target().iter().sum::<f64>() / train.n_rows() as f64
                };
                Model::Constant(mean)
            }
            Task::Classification => {
                let ones = train.target().iter().filter(|&&y| y == 1.0).count();
                Model::Constant(if 2 * ones >= train.n_rows() { 1.0 } else { 0.0 })
            }
        };
    }
    match train.task() {
        Task::Regression => Model::Linear(fit_ols(train, &columns)),
        Task::Classification => Model::Logistic(fit_logistic(train, &columns)),
    }
}

/// OLS via normal equations with a ridge jitter on the diagonal.
fn fit_ols(train: &Dataset, columns: &[usize]) -> LinearModel {
    let k = columns.len();
    let rows = train.n_rows();
    // design: [x_cols, 1]
    let dim = k + 1;
    let mut ata = vec![vec![0.0; dim]; dim];
    let mut atb = vec![0.0; dim];
    for r in 0..rows {
        let row = train.row(r);
        let y = train.target()[r];
        for i in 0..dim {
            let xi = if i < k { row[columns[i]] } else { 1.0 };
            atb[i] += xi * y;
            for j in i..dim {
                let xj = if j < k { row[columns[j]] } else { 1.0 };
                ata[i][j] += xi * xj;
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            ata[i][j] = ata[j][i];
        }
        ata[i][i] += RIDGE_JITTER;
    }
    let beta = solve_dense(ata, atb);
    LinearModel {
        columns: columns.to_vec(),
        coefficients: beta[..k].to_vec(),
        intercept: beta[k],
    }
}

/// Logistic regression on standardized features by full-batch gradient
/// descent (fixed step, small L2 on the weights).
fn fit_logistic(train: &Dataset, columns: &[usize]) -> LogisticModel {
    let k = columns.len();
    let rows = train.n_rows();
    let mut scaler = Vec::with_capacity(k);
    for &col in columns {
        let mean = (0..rows).map(|r| train.row(r)[col]).sum::<f64>() / rows as f64;
        let var =
            (0..rows).map(|r| (train.row(r)[col] - mean).powi(2)).sum::<f64>() / rows as f64;
        scaler.push((mean, var.sqrt().max(1e-12)));
    }
    let standardized: Vec<Vec<f64>> = (0..rows)
        .map(|r| {
            columns
                .iter()
                .zip(&scaler)
                .map(|(&col, &(mean, std))| (train.row(r)[col] - mean) / std)
                .collect()
        })
        .collect();

    let mut w = vec![0.0; k];
    let mut b = 0.0;
    for _ in 0..LOGISTIC_STEPS {
        let mut grad_w = vec![0.0; k];
        let mut grad_b = 0.0;
        for (x, &y) in standardized.iter().zip(train.target()) {
            let z = b + w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>();
            let err = sigmoid(z) - y;
            for (g, xi) in grad_w.iter_mut().zip(x) {
                *g += err * xi;
            }
            grad_b += err;
        }
        let inv = 1.0 / rows as f64;
        for (wi, g) in w.iter_mut().zip(&grad_w) {
            *wi -= LOGISTIC_LR * (g * inv + LOGISTIC_L2 * *wi);
        }
        b -= LOGISTIC_LR * grad_b * inv;
    }
    LogisticModel {
        columns: columns.to_vec(),
        coefficients: w,
        intercept: b,
        scaler,
    }
}

/// Fits on `train` restricted to `subset` and scores on `test`:
/// R² for regression (relative to the training-mean predictor, so the
/// empty subset scores exactly 0), accuracy for classification.
pub fn fit_score(train: &Dataset, test: &Dataset, subset: &Coalition) -> f64 {
    let model = fit(train, subset);
    score(&model, train, test)
}

/// Scores a fitted model on the test split.
pub fn score(model: &Model, train: &Dataset, test: &Dataset) -> f64 {
    assert!(test.n_rows() > 0, "cannot score on an empty test set");
    match train.task() {
        Task::Regression => {
            let train_mean = train.target().iter().sum::<f64>() / train.n_rows().max(1) as f64;
            let mut ss_res = 0.0;
            let mut ss_ref = 0.0;
            for r in 0..test.n_rows() {
                let y = test.target()[r];
                let pred = model.predict(test.row(r));
                ss_res += (y - pred).powi(2);
                ss_ref += (y - train_mean).powi(2);
            }
            if ss_ref == 0.0 {
                if ss_res == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                1.0 - ss_res / ss_ref
            }
        }
        Task::Classification => {
            let correct = (0..test.n_rows())
                .filter(|&r| {
                    let p = model.predict(test.row(r));
                    let label = if p >= 0.5 { 1.0 } else { 0.0 };
                    label == test.target()[r]
                })
                .count();
            correct as f64 / test.n_rows() as f64
        }
    }
}
