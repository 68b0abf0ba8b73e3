//! A self-contained dense two-phase simplex solver.
//!
//! The tableau is kept in compact (dictionary) form: slack variables are
//! implicit, so memory is `rows × (cols + 2)` rather than
//! `rows × (rows + cols)`. Infeasible starts are repaired with a single
//! auxiliary variable (maximize −x₀ subject to `Ax − x₀·1 ≤ b`), after
//! which the original objective is restored over the final dictionary.
//!
//! Pivoting uses Dantzig's rule with a switch to Bland's rule once the
//! degenerate-pivot counter trips.

use crate::error::{Error, Result};

/// Row sense of a constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Leq,
    Eq,
    Geq,
}

/// A dense linear program `min cᵀx` subject to `rows op rhs` with
/// per-variable lower bounds of 0 (default) or −∞ (`free`).
#[derive(Clone, Debug)]
pub struct DenseLP {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    /// `free[j]` lifts the lower bound of variable `j` to −∞.
    pub free: Vec<bool>,
}

impl DenseLP {
    /// A program with all variables bounded below by 0.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        DenseLP {
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            free: vec![false; n],
        }
    }

    pub fn push_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    fn validate(&self) -> Result<()> {
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.rhs.iter().all(|v| v.is_finite())
            && self.rows.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFiniteInput);
        }
        if self.rows.len() > 200_000 || self.objective.len() > 1000 {
            return Err(Error::NumericalBreakdown(format!(
                "LP too large for the dense solver: {} rows x {} cols",
                self.rows.len(),
                self.objective.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LPStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LPSolution {
    pub status: LPStatus,
    /// Objective value of the original (minimization) program.
    pub objective_value: f64,
    /// Primal assignment; empty unless `Optimal`.
    pub x: Vec<f64>,
}

const PIVOT_TOL: f64 = 1e-11;
const OBJ_TOL: f64 = 1e-9;
const DEGENERATE_RATIO: f64 = 1e-10;

struct Tableau {
    m: usize,
    n: usize,
    /// row-major `m x n` dictionary coefficients
    a: Vec<f64>,
    b: Vec<f64>,
    /// objective row: maximize `z0 + obj·x_N`
    obj: Vec<f64>,
    z0: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    degenerate_pivots: u64,
    total_pivots: u64,
    pivot_cap: u64,
    bland_threshold: u64,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.at(r, e);
        debug_assert!(piv.abs() > 0.0);
        let inv = 1.0 / piv;
        // scale pivot row
        for j in 0..self.n {
            self.a[r * self.n + j] *= inv;
        }
        self.a[r * self.n + e] = inv;
        self.b[r] *= inv;
        // eliminate from other rows
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let factor = self.at(i, e);
            if factor == 0.0 {
                continue;
            }
            let (row_r, row_i) = {
                // split borrows: rows r and i are disjoint
                let (lo, hi) = if r < i {
                    let (a, b) = self.a.split_at_mut(i * self.n);
                    (&a[r * self.n..r * self.n + self.n], &mut b[..self.n])
                } else {
                    let (a, b) = self.a.split_at_mut(r * self.n);
                    let row_i = &mut a[i * self.n..i * self.n + self.n];
                    (&b[..self.n], row_i)
                };
                (lo, hi)
            };
            for j in 0..self.n {
                if j != e {
                    row_i[j] -= factor * row_r[j];
                }
            }
            row_i[e] = -factor * inv;
            self.b[i] -= factor * self.b[r];
            // keep the feasibility invariant under roundoff
            if self.b[i] < 0.0 && self.b[i] > -1e-11 {
                self.b[i] = 0.0;
            }
        }
        // objective row
        let coeff = self.obj[e];
        if coeff != 0.0 {
            for j in 0..self.n {
                if j != e {
                    self.obj[j] -= coeff * self.at(r, j);
                }
            }
            self.obj[e] = -coeff * inv;
            self.z0 += coeff * self.b[r];
        }
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[e]);
        self.total_pivots += 1;
    }

    /// Entering column under the active rule; `None` at optimality.
    fn choose_entering(&self, bland: bool) -> Option<usize> {
        if bland {
            (0..self.n)
                .filter(|&j| self.obj[j] > OBJ_TOL)
                .min_by_key(|&j| self.nonbasic[j])
        } else {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n {
                let c = self.obj[j];
                if c > OBJ_TOL && best.map_or(true, |(_, bc)| c > bc) {
                    best = Some((j, c));
                }
            }
            best.map(|(j, _)| j)
        }
    }

    /// Ratio test; ties broken toward the smallest basic label (keeps
    /// Bland's rule sound).
    fn choose_leaving(&self, e: usize) -> RatioOutcome {
        let mut best: Option<(usize, f64)> = None;
        let mut saw_tiny = false;
        for i in 0..self.m {
            let coeff = self.at(i, e);
            if coeff > PIVOT_TOL {
                let ratio = self.b[i] / coeff;
                let better = match best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < br - 1e-12
                            || (ratio <= br + 1e-12 && self.basic[i] < self.basic[bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            } else if coeff > 0.0 {
                saw_tiny = true;
            }
        }
        match best {
            Some((i, _)) => RatioOutcome::Row(i),
            None if saw_tiny => RatioOutcome::TinyPivotsOnly,
            None => RatioOutcome::Unbounded,
        }
    }

    /// Runs the simplex loop on the current objective.
    /// Returns `Ok(true)` at optimality, `Ok(false)` when unbounded.
    fn optimize(&mut self) -> Result<bool> {
        loop {
            let bland = self.degenerate_pivots > self.bland_threshold;
            let Some(e) = self.choose_entering(bland) else {
                return Ok(true);
            };
            let r = match self.choose_leaving(e) {
                RatioOutcome::Row(r) => r,
                RatioOutcome::Unbounded => return Ok(false),
                RatioOutcome::TinyPivotsOnly => {
                    return Err(Error::NumericalBreakdown(format!(
                        "all pivot candidates in column {e} below {PIVOT_TOL:.0e}"
                    )))
                }
            };
            if self.b[r].abs() < DEGENERATE_RATIO {
                self.degenerate_pivots += 1;
            }
            self.pivot(r, e);
            if self.total_pivots > self.pivot_cap {
                return Err(Error::CycleLimitExceeded(self.total_pivots));
            }
        }
    }
}

enum RatioOutcome {
    Row(usize),
    Unbounded,
    TinyPivotsOnly,
}

/// Solves a dense LP with the two-phase compact-tableau simplex method.
pub fn simplex_solve(lp: &DenseLP) -> Result<LPSolution> {
    lp.validate()?;
    let n_orig = lp.objective.len();

    // conversion to `max -c'x, A'x <= b, x >= 0`:
    // free variables split, >= rows negated, = rows doubled
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n_orig);
    let mut n = 0usize;
    for j in 0..n_orig {
        if lp.free[j] {
            col_of.push((n, Some(n + 1)));
            n += 2;
        } else {
            col_of.push((n, None));
            n += 1;
        }
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut push = |coeffs: &[f64], flip: f64, b: f64, rows: &mut Vec<Vec<f64>>, rhs: &mut Vec<f64>| {
        let mut row = vec![0.0; n];
        for j in 0..n_orig {
            let (pos, neg) = col_of[j];
            row[pos] = flip * coeffs[j];
            if let Some(neg) = neg {
                row[neg] = -flip * coeffs[j];
            }
        }
        rows.push(row);
        rhs.push(flip * b);
    };
    for i in 0..lp.rows.len() {
        match lp.senses[i] {
            Sense::Leq => push(&lp.rows[i], 1.0, lp.rhs[i], &mut rows, &mut rhs),
            Sense::Geq => push(&lp.rows[i], -1.0, lp.rhs[i], &mut rows, &mut rhs),
            Sense::Eq => {
                push(&lp.rows[i], 1.0, lp.rhs[i], &mut rows, &mut rhs);
                push(&lp.rows[i], -1.0, lp.rhs[i], &mut rows, &mut rhs);
            }
        }
    }
    let m = rows.len();
    if m == 0 {
        return Err(Error::NumericalBreakdown("no constraints".into()));
    }

    // maximize -c'x
    let mut max_obj = vec![0.0; n];
    for j in 0..n_orig {
        let (pos, neg) = col_of[j];
        max_obj[pos] = -lp.objective[j];
        if let Some(neg) = neg {
            max_obj[neg] = lp.objective[j];
        }
    }

    let pivot_budget_base = 50_000 + 200 * (m as u64 + n as u64);
    let mut t = Tableau {
        m,
        n,
        a: rows.into_iter().flatten().collect(),
        b: rhs,
        obj: max_obj.clone(),
        z0: 0.0,
        basic: (n..n + m).collect(),
        nonbasic: (0..n).collect(),
        degenerate_pivots: 0,
        total_pivots: 0,
        pivot_cap: pivot_budget_base,
        bland_threshold: 10 * (m as u64 + n as u64),
    };

    // phase 1 with a single auxiliary column when the slack basis is infeasible
    let min_b = t.b.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_b < 0.0 {
        let aux_label = n + m;
        t.n += 1;
        let mut a2 = Vec::with_capacity(t.m * t.n);
        for i in 0..t.m {
            a2.extend_from_slice(&t.a[i * n..(i + 1) * n]);
            a2.push(-1.0);
        }
        t.a = a2;
        t.nonbasic.push(aux_label);
        t.obj = vec![0.0; t.n];
        t.obj[t.n - 1] = -1.0; // maximize -x0
        t.z0 = 0.0;

        // first pivot: aux enters, most-negative row leaves
        let r = (0..t.m)
            .min_by(|&i, &j| t.b[i].partial_cmp(&t.b[j]).expect("finite"))
            .expect("m > 0");
        let e = t.n - 1;
        t.pivot(r, e);
        if !t.optimize()? {
            return Err(Error::NumericalBreakdown(
                "auxiliary objective unbounded".into(),
            ));
        }
        if t.z0 < -1e-7 {
            return Ok(LPSolution {
                status: LPStatus::Infeasible,
                objective_value: f64::NAN,
                x: Vec::new(),
            });
        }
        // drive the auxiliary variable out of the basis if still there
        if let Some(r) = t.basic.iter().position(|&v| v == aux_label) {
            let e = (0..t.n)
                .filter(|&j| t.at(r, j).abs() > PIVOT_TOL)
                .max_by(|&a, &b| {
                    t.at(r, a)
                        .abs()
                        .partial_cmp(&t.at(r, b).abs())
                        .expect("finite")
                });
            match e {
                Some(e) => t.pivot(r, e),
                None => {
                    // redundant zero row; aux stays basic at value 0 and the
                    // row can never be selected by a ratio test with b = 0
                    t.b[r] = 0.0;
                }
            }
        }
        // delete the aux column if it is nonbasic
        if let Some(j_aux) = t.nonbasic.iter().position(|&v| v == aux_label) {
            let last = t.n - 1;
            if j_aux != last {
                for i in 0..t.m {
                    t.a[i * t.n + j_aux] = t.at(i, last);
                }
                t.nonbasic[j_aux] = t.nonbasic[last];
            }
            let n_new = t.n - 1;
            let mut a2 = Vec::with_capacity(t.m * n_new);
            for i in 0..t.m {
                a2.extend_from_slice(&t.a[i * t.n..i * t.n + n_new]);
            }
            t.a = a2;
            t.n = n_new;
            t.nonbasic.pop();
        }

        // restore the real objective over the current dictionary
        t.obj = vec![0.0; t.n];
        t.z0 = 0.0;
        for v in 0..n {
            let c = max_obj[v];
            if c == 0.0 {
                continue;
            }
            if let Some(j) = t.nonbasic.iter().position(|&w| w == v) {
                t.obj[j] += c;
            } else if let Some(i) = t.basic.iter().position(|&w| w == v) {
                t.z0 += c * t.b[i];
                for j in 0..t.n {
                    t.obj[j] -= c * t.at(i, j);
                }
            }
        }
        t.degenerate_pivots = 0;
        t.pivot_cap = t.total_pivots + pivot_budget_base;
    }

    // phase 2
    if !t.optimize()? {
        return Ok(LPSolution {
            status: LPStatus::Unbounded,
            objective_value: f64::NEG_INFINITY,
            x: Vec::new(),
        });
    }

    // extract the original variables
    let mut converted = vec![0.0; n];
    for (i, &v) in t.basic.iter().enumerate() {
        if v < n {
            converted[v] = t.b[i];
        }
    }
    let mut x = vec![0.0; n_orig];
    for j in 0..n_orig {
        let (pos, neg) = col_of[j];
        x[j] = converted[pos] - neg.map_or(0.0, |c| converted[c]);
    }
    let objective_value: f64 = lp
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum();

    verify_solution(lp, &x, &t, n)?;

    Ok(LPSolution {
        status: LPStatus::Optimal,
        objective_value,
        x,
    })
}

/// Residual checks on an optimal basis: primal feasibility within 1e-8 and
/// a complementary-slackness residual below 1e-6.
fn verify_solution(lp: &DenseLP, x: &[f64], t: &Tableau, n_converted: usize) -> Result<()> {
    let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for i in 0..lp.rows.len() {
        let lhs: f64 = lp.rows[i].iter().zip(x).map(|(a, v)| a * v).sum();
        let resid = match lp.senses[i] {
            Sense::Leq => lhs - lp.rhs[i],
            Sense::Geq => lp.rhs[i] - lhs,
            Sense::Eq => (lhs - lp.rhs[i]).abs(),
        };
        if resid > 1e-8 * scale {
            return Err(Error::NumericalBreakdown(format!(
                "row {i} violated by {resid:.3e} after optimality"
            )));
        }
    }
    for (j, &v) in x.iter().enumerate() {
        if !lp.free[j] && v < -1e-9 {
            return Err(Error::NumericalBreakdown(format!(
                "variable {j} negative: {v:.3e}"
            )));
        }
    }
    // complementary slackness over the converted dictionary: nonbasic
    // variables sit at 0 and basic variables have zero reduced cost, so the
    // residual is a pure consistency check on the final tableau
    let mut residual = 0.0f64;
    for (j, &label) in t.nonbasic.iter().enumerate() {
        if label < n_converted && t.obj[j] > OBJ_TOL {
            residual += t.obj[j].abs();
        }
    }
    if residual > 1e-6 {
        return Err(Error::NumericalBreakdown(format!(
            "complementary slackness residual {residual:.3e}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(lp: &DenseLP) -> LPSolution {
        simplex_solve(lp).unwrap()
    }

    #[test]
    fn maximize_bounded_scalar() {
        // max x s.t. x <= 3  ==  min -x
        let mut lp = DenseLP::new(vec![-1.0]);
        lp.push_row(vec![1.0], Sense::Leq, 3.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LPStatus::Optimal);
        assert!((sol.objective_value + 3.0).abs() < 1e-9);
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // min 0 s.t. x <= -1, x >= 0
        let mut lp = DenseLP::new(vec![0.0]);
        lp.push_row(vec![1.0], Sense::Leq, -1.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LPStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        // min -x, x >= 0, no upper bound
        let mut lp = DenseLP::new(vec![-1.0]);
        lp.push_row(vec![-1.0], Sense::Leq, 1.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LPStatus::Unbounded);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + y  s.t. x + y = 2, x - y >= 1, y free
        let mut lp = DenseLP::new(vec![1.0, 1.0]);
        lp.free[1] = true;
        lp.push_row(vec![1.0, 1.0], Sense::Eq, 2.0);
        lp.push_row(vec![1.0, -1.0], Sense::Geq, 1.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LPStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-8);
        assert!((sol.x[0] + sol.x[1] - 2.0).abs() < 1e-8);
        assert!(sol.x[0] - sol.x[1] >= 1.0 - 1e-8);
    }

    #[test]
    fn textbook_two_phase() {
        // min 2x + 3y s.t. x + y >= 4, x + 3y >= 6, x,y >= 0
        // optimum at (3, 1): value 9
        let mut lp = DenseLP::new(vec![2.0, 3.0]);
        lp.push_row(vec![1.0, 1.0], Sense::Geq, 4.0);
        lp.push_row(vec![1.0, 3.0], Sense::Geq, 6.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LPStatus::Optimal);
        assert!((sol.objective_value - 9.0).abs() < 1e-8, "{}", sol.objective_value);
        assert!((sol.x[0] - 3.0).abs() < 1e-7);
        assert!((sol.x[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn degenerate_program_terminates() {
        // classic Beale-style degeneracy
        let mut lp = DenseLP::new(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.push_row(vec![0.25, -60.0, -0.04, 9.0], Sense::Leq, 0.0);
        lp.push_row(vec![0.5, -90.0, -0.02, 3.0], Sense::Leq, 0.0);
        lp.push_row(vec![0.0, 0.0, 1.0, 0.0], Sense::Leq, 1.0);
        let sol = solve(&lp);
        assert_eq!(sol.status, LPStatus::Optimal);
        assert!((sol.objective_value + 0.05).abs() < 1e-8);
    }

    #[test]
    fn rejects_non_finite_input() {
        let mut lp = DenseLP::new(vec![f64::NAN]);
        lp.push_row(vec![1.0], Sense::Leq, 1.0);
        assert!(matches!(simplex_solve(&lp), Err(Error::NonFiniteInput)));
    }
}
