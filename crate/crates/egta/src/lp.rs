//! Dense tableau simplex solver for the minimax linear programs behind the
//! Nash meta-strategy solver.
//!
//! Solves `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`, so the all-slack
//! basis is feasible and no phase-1 is needed. Pivoting uses Bland's rule
//! throughout: entering variable is the lowest-index column with a negative
//! reduced cost, leaving variable breaks ratio ties toward the lowest basis
//! index. That makes the solve deterministic and cycle-free.

// Indexed loops are clearer for tableau operations.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;

/// Primal and dual solutions of a standard-form LP.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    /// Optimal x, one entry per structural variable.
    pub primal: Vec<f64>,
    /// Optimal dual multipliers, one entry per constraint.
    pub dual: Vec<f64>,
}

/// Maximizes `c.x` subject to `A x <= b`, `x >= 0`.
///
/// Requires `b >= 0`. Returns [`Error::LpFailure`] on an unbounded program
/// or if the pivot cap is hit.
pub fn solve_max(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m {
        return Err(Error::LpFailure(format!(
            "{} bounds for {} constraints",
            b.len(),
            m
        )));
    }
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::LpFailure("ragged constraint matrix".into()));
    }
    if b.iter().any(|&v| v < 0.0) {
        return Err(Error::LpFailure("negative right-hand side".into()));
    }

    // Tableau: m constraint rows of [A | I | b], then the objective row.
    let width = n + m + 1;
    let mut tab = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        tab[i][..n].copy_from_slice(&a[i]);
        tab[i][n + i] = 1.0;
        tab[i][width - 1] = b[i];
    }
    for j in 0..n {
        tab[m][j] = -c[j];
    }

    let mut basis: Vec<usize> = (n..n + m).collect();
    let max_pivots = 10_000 + 50 * (n + m);

    for _ in 0..max_pivots {
        // Bland: first column with a negative reduced cost.
        let Some(entering) = (0..n + m).find(|&j| tab[m][j] < -PIVOT_EPS) else {
            return Ok(extract(&tab, &basis, n, m));
        };

        // Ratio test; ties toward the lowest basis variable index.
        let mut leaving: Option<(usize, f64)> = None;
        for (i, row) in tab.iter().enumerate().take(m) {
            let coef = row[entering];
            if coef > PIVOT_EPS {
                let ratio = row[width - 1] / coef;
                let better = match leaving {
                    None => true,
                    Some((best_i, best_r)) => {
                        ratio < best_r - PIVOT_EPS
                            || (ratio < best_r + PIVOT_EPS && basis[i] < basis[best_i])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leaving else {
            return Err(Error::LpFailure("unbounded program".into()));
        };

        pivot(&mut tab, pivot_row, entering);
        basis[pivot_row] = entering;
    }
    Err(Error::LpFailure("pivot cap exceeded".into()))
}

fn pivot(tab: &mut [Vec<f64>], row: usize, col: usize) {
    let width = tab[0].len();
    let inv = 1.0 / tab[row][col];
    for j in 0..width {
        tab[row][j] *= inv;
    }
    tab[row][col] = 1.0;
    for i in 0..tab.len() {
        if i == row {
            continue;
        }
        let factor = tab[i][col];
        if factor == 0.0 {
            continue;
        }
        for j in 0..width {
            tab[i][j] -= factor * tab[row][j];
        }
        tab[i][col] = 0.0;
    }
}

fn extract(tab: &[Vec<f64>], basis: &[usize], n: usize, m: usize) -> LpSolution {
    let width = n + m + 1;
    let mut primal = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            primal[var] = tab[i][width - 1];
        }
    }
    // Dual values are the reduced costs of the slack columns.
    let dual: Vec<f64> = (0..m).map(|i| tab[m][n + i]).collect();
    LpSolution {
        objective: tab[m][width - 1],
        primal,
        dual,
    }
}

/// Solves a two-player zero-sum matrix game by the minimax LP.
///
/// `matrix[i][j]` is the row player's payoff. Returns the optimal mixed
/// strategies of both players and the game value to the row player. The
/// matrix is shifted positive, the column player's scaled program
/// `max sum(w) s.t. A'w <= 1` is solved directly, and the row player's
/// strategy is read off the dual.
pub fn solve_matrix_game(matrix: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let m = matrix.len();
    if m == 0 || matrix[0].is_empty() {
        return Err(Error::LpFailure("empty payoff matrix".into()));
    }
    let n = matrix[0].len();

    let lowest = matrix
        .iter()
        .flatten()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let shift = 1.0 - lowest;
    let shifted: Vec<Vec<f64>> = matrix
        .iter()
        .map(|row| row.iter().map(|v| v + shift).collect())
        .collect();

    let c = vec![1.0; n];
    let b = vec![1.0; m];
    let sol = solve_max(&c, &shifted, &b)?;
    if sol.objective <= 0.0 {
        return Err(Error::LpFailure("nonpositive scaled value".into()));
    }
    let total = sol.objective;
    let col_strategy: Vec<f64> = sol.primal.iter().map(|w| w / total).collect();
    let row_strategy: Vec<f64> = sol.dual.iter().map(|y| y / total).collect();
    let value = 1.0 / total - shift;
    Ok((row_strategy, col_strategy, value))
}
