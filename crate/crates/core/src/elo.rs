//! Bradley-Terry/Elo rating via minorization-maximization, cross-entropy
//! evaluation, and the pairwise-preference data-valuation game.

use std::collections::HashMap;
use std::io::BufRead;
use std::sync::Arc;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{CharacteristicOracle, Game};
use crate::numeric::sigmoid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    A,
    B,
}

/// One pairwise comparison between two distinct models.
#[derive(Clone, Copy, Debug)]
pub struct MatchRecord {
    pub model_a: usize,
    pub model_b: usize,
    pub winner: Winner,
}

impl MatchRecord {
    pub fn winner_loser(&self) -> (usize, usize) {
        match self.winner {
            Winner::A => (self.model_a, self.model_b),
            Winner::B => (self.model_b, self.model_a),
        }
    }
}

/// Ratings `r` with strengths `π = exp(r/400)`; within each comparison
/// component the strengths are gauge-fixed to geometric mean one.
#[derive(Clone, Debug)]
pub struct RatingVector {
    pub ratings: Vec<f64>,
}

impl RatingVector {
    pub fn all_equal(n: usize) -> Self {
        RatingVector {
            ratings: vec![0.0; n],
        }
    }

    pub fn strengths(&self) -> Vec<f64> {
        self.ratings.iter().map(|r| (r / 400.0).exp()).collect()
    }
}

/// Win probability `P(i beats j) = σ((r_i − r_j)/400)`.
pub fn elo_prob(r_i: f64, r_j: f64) -> f64 {
    sigmoid((r_i - r_j) / 400.0)
}

/// Mean cross-entropy of the observed winners under the ratings:
/// `−log P(winner beats loser)` averaged over the matches.
pub fn cross_entropy(ratings: &RatingVector, test: &[MatchRecord]) -> f64 {
    assert!(!test.is_empty());
    let total: f64 = test
        .iter()
        .map(|m| {
            let (w, l) = m.winner_loser();
            -elo_prob(ratings.ratings[w], ratings.ratings[l]).ln()
        })
        .sum();
    total / test.len() as f64
}

fn components(n_models: usize, matches: &[MatchRecord]) -> Vec<usize> {
    // union-find over the comparison graph
    let mut parent: Vec<usize> = (0..n_models).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for m in matches {
        let ra = find(&mut parent, m.model_a);
        let rb = find(&mut parent, m.model_b);
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n_models).map(|i| find(&mut parent, i)).collect()
}

/// Fits Bradley-Terry strengths by MM iteration
/// `π_i ← W_i / Σ_{j≠i} n_ij/(π_i + π_j)`, renormalizing the gauge each
/// sweep, and converts to ratings via `r = 400·ln(π)`.
///
/// Models in different comparison components are unidentifiable relative to
/// each other; each component is fit on its own with gauge offset 0 (a
/// warning is logged). One-sided records (a model with no wins or no
/// losses inside its component) get 0.5 pseudo-wins split per observed
/// pair, keeping the MLE finite.
pub fn mm_fit(n_models: usize, matches: &[MatchRecord], iterations: usize) -> RatingVector {
    assert!(n_models >= 1);
    let comp = components(n_models, matches);
    let mut pair_counts: HashMap<(usize, usize), f64> = HashMap::new();
    let mut wins = vec![0.0f64; n_models];
    let mut seen = vec![false; n_models];
    for m in matches {
        let (w, l) = m.winner_loser();
        wins[w] += 1.0;
        seen[m.model_a] = true;
        seen[m.model_b] = true;
        let key = (m.model_a.min(m.model_b), m.model_a.max(m.model_b));
        *pair_counts.entry(key).or_insert(0.0) += 1.0;
    }

    let distinct_components = {
        let mut roots: Vec<usize> = (0..n_models).filter(|&i| seen[i]).map(|i| comp[i]).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    };
    if distinct_components > 1 {
        log::warn!(
            "comparison graph has {distinct_components} components; ratings are only \
             identified within each component (offset 0 across components)"
        );
    }

    // degenerate components: a seen model with zero wins or zero losses
    let mut losses = vec![0.0f64; n_models];
    for m in matches {
        let (_, l) = m.winner_loser();
        losses[l] += 1.0;
    }
    let mut degenerate_components: Vec<usize> = (0..n_models)
        .filter(|&i| seen[i] && (wins[i] == 0.0 || losses[i] == 0.0))
        .map(|i| comp[i])
        .collect();
    degenerate_components.sort_unstable();
    degenerate_components.dedup();
    if !degenerate_components.is_empty() {
        log::debug!(
            "one-sided records in {} component(s); applying 0.5 pseudo-win smoothing",
            degenerate_components.len()
        );
        for (&(a, b), count) in pair_counts.clone().iter() {
            if degenerate_components.binary_search(&comp[a]).is_ok() {
                // one extra match per pair, split evenly
                wins[a] += 0.5;
                wins[b] += 0.5;
                *pair_counts.get_mut(&(a, b)).expect("exists") = count + 1.0;
            }
        }
    }

    // MM sweeps on the strengths
    let mut pi = vec![1.0f64; n_models];
    let mut neighbour_counts: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_models];
    for (&(a, b), &count) in &pair_counts {
        neighbour_counts[a].push((b, count));
        neighbour_counts[b].push((a, count));
    }
    for _ in 0..iterations {
        let mut next = pi.clone();
        let mut max_change = 0.0f64;
        for i in 0..n_models {
            if !seen[i] || neighbour_counts[i].is_empty() {
                continue;
            }
            let denom: f64 = neighbour_counts[i]
                .iter()
                .map(|&(j, n_ij)| n_ij / (pi[i] + pi[j]))
                .sum();
            if denom > 0.0 && wins[i] > 0.0 {
                next[i] = wins[i] / denom;
            } else {
                next[i] = 1e-12; // zero wins even after smoothing
            }
        }
        // gauge: geometric mean one per component
        let mut log_sum: HashMap<usize, (f64, usize)> = HashMap::new();
        for i in 0..n_models {
            if seen[i] {
                let entry = log_sum.entry(comp[i]).or_insert((0.0, 0));
                entry.0 += next[i].ln();
                entry.1 += 1;
            }
        }
        for i in 0..n_models {
            if seen[i] {
                let (total, count) = log_sum[&comp[i]];
                next[i] = (next[i].ln() - total / count as f64).exp();
            }
        }
        for i in 0..n_models {
            max_change = max_change.max((next[i].ln() - pi[i].ln()).abs());
        }
        pi = next;
        if max_change < 1e-12 {
            break;
        }
    }

    RatingVector {
        ratings: pi
            .iter()
            .zip(&seen)
            .map(|(&p, &s)| if s { 400.0 * p.ln() } else { 0.0 })
            .collect(),
    }
}

/// The arena data-valuation game: players are training matches and
/// `v(c) = (2 − CE(mm_fit(c))) − (2 − CE(all-equal ratings))`, evaluated on
/// the fixed test matches, so `v(∅) = 0` exactly.
pub struct ArenaValuationGame {
    n_models: usize,
    train: Vec<MatchRecord>,
    test: Vec<MatchRecord>,
    mm_iterations: usize,
    baseline: f64,
}

impl ArenaValuationGame {
    pub fn new(
        n_models: usize,
        train: Vec<MatchRecord>,
        test: Vec<MatchRecord>,
        mm_iterations: usize,
    ) -> Self {
        assert!(!train.is_empty());
        assert!(!test.is_empty());
        let baseline = 2.0 - cross_entropy(&RatingVector::all_equal(n_models), &test);
        ArenaValuationGame {
            n_models,
            train,
            test,
            mm_iterations,
            baseline,
        }
    }
}

impl Game for ArenaValuationGame {
    fn player_count(&self) -> usize {
        self.train.len()
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        if coalition.is_empty() {
            return 0.0;
        }
        let subset: Vec<MatchRecord> = coalition.members().map(|i| self.train[i]).collect();
        let ratings = mm_fit(self.n_models, &subset, self.mm_iterations);
        (2.0 - cross_entropy(&ratings, &self.test)) - self.baseline
    }
}

/// Wraps the arena game in a counting oracle.
pub fn arena_valuation_game(
    n_models: usize,
    train: Vec<MatchRecord>,
    test: Vec<MatchRecord>,
    mm_iterations: usize,
) -> CharacteristicOracle {
    CharacteristicOracle::from_arc(Arc::new(ArenaValuationGame::new(
        n_models,
        train,
        test,
        mm_iterations,
    )))
}

/// Reads `model_a,model_b,winner` CSV with winner ∈ {a, b}; model names
/// are mapped to indices in first-appearance order.
pub fn read_matches_csv(reader: &mut impl BufRead) -> Result<(Vec<MatchRecord>, Vec<String>)> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty match file".into(),
        })??;
    if header.trim() != "model_a,model_b,winner" {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header model_a,model_b,winner, got {header:?}"),
        });
    }
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut matches = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: lineno + 2,
                message: "expected three comma-separated fields".into(),
            });
        }
        let mut id_of = |name: &str| -> usize {
            *index.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            })
        };
        let a = id_of(parts[0].trim());
        let b = id_of(parts[1].trim());
        if a == b {
            return Err(Error::Parse {
                line: lineno + 2,
                message: "a model cannot play itself".into(),
            });
        }
        let winner = match parts[2].trim() {
            "a" => Winner::A,
            "b" => Winner::B,
            other => {
                return Err(Error::Parse {
                    line: lineno + 2,
                    message: format!("winner must be a or b, got {other:?}"),
                })
            }
        };
        matches.push(MatchRecord {
            model_a: a,
            model_b: b,
            winner,
        });
    }
    Ok((matches, names))
}

/// Writes the match CSV format.
pub fn write_matches_csv(
    writer: &mut impl std::io::Write,
    matches: &[MatchRecord],
    names: &[String],
) -> std::io::Result<()> {
    writeln!(writer, "model_a,model_b,winner")?;
    for m in matches {
        writeln!(
            writer,
            "{},{},{}",
            names[m.model_a],
            names[m.model_b],
            match m.winner {
                Winner::A => "a",
                Winner::B => "b",
            }
        )?;
    }
    Ok(())
}

/// Draws matches between uniformly sampled model pairs with win
/// probabilities from the true ratings.
pub fn generate_synthetic_matches(
    true_ratings: &[f64],
    n_matches: usize,
    rng: &mut impl rand::Rng,
) -> Vec<MatchRecord> {
    let n = true_ratings.len();
    assert!(n >= 2);
    (0..n_matches)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let b = loop {
                let b = rng.gen_range(0..n);
                if b != a {
                    break b;
                }
            };
            let p_a = elo_prob(true_ratings[a], true_ratings[b]);
            MatchRecord {
                model_a: a,
                model_b: b,
                winner: if rng.gen::<f64>() < p_a {
                    Winner::A
                } else {
                    Winner::B
                },
            }
        })
        .collect()
}

/// Bradley-Terry log-likelihood of the matches under the ratings.
pub fn log_likelihood(ratings: &RatingVector, matches: &[MatchRecord]) -> f64 {
    matches
        .iter()
        .map(|m| {
            let (w, l) = m.winner_loser();
            elo_prob(ratings.ratings[w], ratings.ratings[l]).ln()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn elo_prob_basics() {
        assert_eq!(elo_prob(1200.0, 1200.0), 0.5);
        assert!((elo_prob(1600.0, 1200.0) - sigmoid(1.0)).abs() < 1e-15);
        for (a, b) in [(0.0, 100.0), (1500.0, 900.0), (-30.0, 12.0)] {
            assert!((elo_prob(a, b) + elo_prob(b, a) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn equal_record_gives_equal_ratings() {
        let matches = vec![
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::A },
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::B },
            MatchRecord { model_a: 1, model_b: 0, winner: Winner::A },
            MatchRecord { model_a: 1, model_b: 0, winner: Winner::B },
        ];
        let r = mm_fit(2, &matches, 1000);
        assert!((r.ratings[0] - r.ratings[1]).abs() < 1e-9);
    }

    #[test]
    fn two_model_closed_form_ratio() {
        // A beats B 3 of 4: the Bradley-Terry MLE has strength ratio 3
        let matches = vec![
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::A },
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::A },
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::A },
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::B },
        ];
        let r = mm_fit(2, &matches, 5000);
        let pi = r.strengths();
        assert!(((pi[0] / pi[1]) - 3.0).abs() < 1e-6, "ratio {}", pi[0] / pi[1]);
        let gap = r.ratings[0] - r.ratings[1];
        assert!((gap - 400.0 * 3.0f64.ln()).abs() < 1e-3, "gap {gap}");
        // the fitted gap reproduces the empirical win rate exactly
        assert!((elo_prob(r.ratings[0], r.ratings[1]) - 0.75).abs() < 1e-9);
    }

    #[test]
    fn mm_sweeps_never_decrease_likelihood() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let truth: Vec<f64> = (0..6).map(|i| i as f64 * 80.0).collect();
        let matches = generate_synthetic_matches(&truth, 600, &mut rng);
        let mut prev = f64::NEG_INFINITY;
        for sweeps in [1, 2, 4, 8, 16, 32, 64] {
            let r = mm_fit(6, &matches, sweeps);
            let ll = log_likelihood(&r, &matches);
            assert!(ll >= prev - 1e-9, "ll {ll} dropped below {prev}");
            prev = ll;
        }
    }

    #[test]
    fn gauge_shift_leaves_probabilities_unchanged() {
        let r = RatingVector { ratings: vec![100.0, -50.0, 20.0] };
        let shifted = RatingVector {
            ratings: r.ratings.iter().map(|x| x + 123.4).collect(),
        };
        let matches = vec![MatchRecord { model_a: 0, model_b: 2, winner: Winner::A }];
        assert!(
            (cross_entropy(&r, &matches) - cross_entropy(&shifted, &matches)).abs() < 1e-12
        );
        assert!(
            (elo_prob(r.ratings[0], r.ratings[1])
                - elo_prob(shifted.ratings[0], shifted.ratings[1]))
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn cross_entropy_reference_points() {
        let matches = vec![MatchRecord { model_a: 0, model_b: 1, winner: Winner::A }];
        let equal = RatingVector::all_equal(2);
        assert!((cross_entropy(&equal, &matches) - std::f64::consts::LN_2).abs() < 1e-12);
        let gap = RatingVector { ratings: vec![400.0, 0.0] };
        assert!((cross_entropy(&gap, &matches) + sigmoid(1.0).ln()).abs() < 1e-12);
        // loss decreases monotonically as the winner's gap grows
        let mut prev = f64::INFINITY;
        for g in [0.0, 100.0, 300.0, 900.0, 2000.0] {
            let r = RatingVector { ratings: vec![g, 0.0] };
            let ce = cross_entropy(&r, &matches);
            assert!(ce < prev + 1e-15);
            prev = ce;
        }
    }

    #[test]
    fn one_sided_records_stay_finite() {
        let matches = vec![
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::A },
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::A },
        ];
        let r = mm_fit(2, &matches, 500);
        assert!(r.ratings.iter().all(|x| x.is_finite()));
        assert!(r.ratings[0] > r.ratings[1]);
    }

    #[test]
    fn disconnected_components_fit_independently() {
        let matches = vec![
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::A },
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::B },
            MatchRecord { model_a: 2, model_b: 3, winner: Winner::A },
            MatchRecord { model_a: 2, model_b: 3, winner: Winner::B },
        ];
        let r = mm_fit(4, &matches, 200);
        for x in &r.ratings {
            assert!(x.is_finite());
        }
        assert!((r.ratings[0] - r.ratings[1]).abs() < 1e-9);
        assert!((r.ratings[2] - r.ratings[3]).abs() < 1e-9);
    }

    #[test]
    fn arena_game_empty_is_zero_and_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let truth = [0.0, 120.0, 240.0];
        let train = generate_synthetic_matches(&truth, 30, &mut rng);
        let test = generate_synthetic_matches(&truth, 100, &mut rng);
        let oracle = arena_valuation_game(3, train.clone(), test, 300);
        assert_eq!(oracle.player_count(), 30);
        assert_eq!(oracle.value(&Coalition::empty(30)), 0.0);
        // grand value should beat the all-equal baseline on average
        assert!(oracle.grand_value() > -0.5);
    }

    #[test]
    fn match_csv_round_trip() {
        let names = vec!["alpha".to_string(), "beta".to_string(), "gamma".to_string()];
        let matches = vec![
            MatchRecord { model_a: 0, model_b: 1, winner: Winner::A },
            MatchRecord { model_a: 2, model_b: 0, winner: Winner::B },
        ];
        let mut buf = Vec::new();
        write_matches_csv(&mut buf, &matches, &names).unwrap();
        let (back, back_names) = read_matches_csv(&mut buf.as_slice()).unwrap();
        assert_eq!(back_names, names);
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].winner_loser(), matches[1].winner_loser());
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let mut bad = "model_a,model_b,winner\nx,y,z\n".as_bytes();
        match read_matches_csv(&mut bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
