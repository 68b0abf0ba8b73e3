//! Removal curves: retrain after deleting the most important data points
//! in cumulative blocks.

use crate::coalition::Coalition;

use super::dataset::Dataset;
use super::model::fit_score;

/// Sorts rows by importance (descending, ties by index), removes cumulative
/// fractions `0, step, 2·step, …, max_fraction`, refits on the remainder
/// and records the test score at each point.
pub fn removal_curve(
    train: &Dataset,
    test: &Dataset,
    importances: &[f64],
    step: f64,
    max_fraction: f64,
) -> Vec<(f64, f64)> {
    assert_eq!(importances.len(), train.n_rows());
    assert!(step > 0.0 && max_fraction >= 0.0 && max_fraction <= 1.0);

    let mut order: Vec<usize> = (0..train.n_rows()).collect();
    order.sort_by(|&a, &b| {
        importances[b]
            .partial_cmp(&importances[a])
            .expect("finite importances")
            .then(a.cmp(&b))
    });

    let n = train.n_rows();
    let mut curve = Vec::new();
    let blocks = (max_fraction / step).round() as usize;
    for block in 0..=blocks {
        let fraction = block as f64 * step;
        let removed = (fraction * n as f64).round() as usize;
        let keep: Vec<usize> = order[removed..].to_vec();
        let remaining = train.subset_rows_lenient(&keep);
        let score = if remaining.n_rows() == 0 {
            0.0
        } else {
            fit_score(&remaining, test, &Coalition::grand(train.n_features()))
        };
        curve.push((fraction, score));
    }
    curve
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xai::dataset::Task;
    use crate::xai::synthetic::planted_noise_regression;

    #[test]
    fn zero_fraction_matches_full_fit() {
        let (train, test, _) = planted_noise_regression(40, 3, 0.1, 5);
        let importances = vec![1.0; train.n_rows()];
        let curve = removal_curve(&train, &test, &importances, 0.05, 0.5);
        assert_eq!(curve.len(), 11);
        assert_eq!(curve[0].0, 0.0);
        let full = fit_score(&train, &test, &Coalition::grand(train.n_features()));
        assert_eq!(curve[0].1, full);
        assert!((curve[10].0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tie_break_is_by_index() {
        let features = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let target = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let ds = Dataset::new(features, 1, target, vec!["x".into()], Task::Regression);
        // all importances equal: removing 1/3 must drop rows 0 and 1
        let curve = removal_curve(&ds, &ds, &[0.5; 6], 1.0 / 3.0, 1.0 / 3.0);
        assert_eq!(curve.len(), 2);
        // remaining rows 2..6 still fit the line exactly
        assert!(curve[1].1 > 1.0 - 1e-9);
    }
}
