//! Small dense linear-program solver.
//!
//! Standard form: minimize c^T x subject to A x = b, x >= 0. Two-phase
//! tableau simplex with Bland's rule, so it terminates and picks the same
//! vertex every run. Sized for the certificate searches in this crate
//! (tens of rows, a few hundred columns), not for general LP workloads.

use crate::error::{Result, VqfError};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
/// Phase-1 objective above this means the equalities are inconsistent.
const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpResult {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// Solves min c^T x, A x = b, x >= 0. `a` is row-major with `b.len()` rows
/// and `c.len()` columns. Errors only if the pivot cap is hit, which Bland's
/// rule should make unreachable.
pub(crate) fn solve_standard(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpResult> {
    let m = b.len();
    let n = c.len();
    assert_eq!(a.len(), m, "constraint row count");
    for row in a {
        assert_eq!(row.len(), n, "constraint column count");
    }

    // tableau rows 0..m are constraints [coeffs | artificials | rhs];
    // row m is the reduced-cost row with -objective in the rhs slot
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // phase 1: minimize the artificial sum
    for j in 0..width {
        let mut s = 0.0;
        for i in 0..m {
            s += t[i][j];
        }
        t[m][j] = if (n..n + m).contains(&j) { 1.0 - s } else { -s };
    }
    let cap = 50 * (m + n + 1);
    run_simplex(&mut t, &mut basis, n + m, cap)?;
    if -t[m][width - 1] > FEAS_TOL {
        return Ok(LpResult::Infeasible);
    }

    // drive basic artificials out; a row with no real pivot is redundant
    let mut live_rows: Vec<bool> = vec![true; m];
    for i in 0..m {
        if basis[i] < n {
            continue;
        }
        let pivot_col = (0..n).find(|&j| t[i][j].abs() > PIVOT_TOL);
        match pivot_col {
            Some(j) => pivot_rows(&mut t, &mut basis, i, j),
            None => live_rows[i] = false,
        }
    }

    // phase 2 on the surviving rows, artificial columns frozen
    let rows: Vec<usize> = (0..m).filter(|&i| live_rows[i]).collect();
    let mut t2: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| {
            let mut row: Vec<f64> = t[i][..n].to_vec();
            row.push(t[i][width - 1]);
            row
        })
        .collect();
    let mut basis2: Vec<usize> = rows.iter().map(|&i| basis[i]).collect();
    let m2 = basis2.len();
    let mut cost = vec![0.0; n + 1];
    for j in 0..n {
        cost[j] = c[j];
    }
    for (r, &bv) in basis2.iter().enumerate() {
        if c[bv] != 0.0 {
            let scale = c[bv];
            for j in 0..=n {
                cost[j] -= scale * t2[r][j];
            }
        }
    }
    t2.push(cost);
    if !run_simplex(&mut t2, &mut basis2, n, 50 * (m2 + n + 1))? {
        return Ok(LpResult::Unbounded);
    }

    let mut x = vec![0.0; n];
    for (r, &bv) in basis2.iter().enumerate() {
        x[bv] = t2[r][n].max(0.0);
    }
    let objective = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpResult::Optimal { x, objective })
}

/// Bland's rule iterations until optimal (true) or unbounded (false).
/// Columns at `limit` and beyond never enter.
fn run_simplex(t: &mut [Vec<f64>], basis: &mut [usize], limit: usize, cap: usize) -> Result<bool> {
    let m = basis.len();
    let cost_row = t.len() - 1;
    let rhs = t[0].len() - 1;
    for _ in 0..cap {
        let entering = (0..limit).find(|&j| t[cost_row][j] < -COST_TOL);
        let Some(j) = entering else {
            return Ok(true);
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][j] > PIVOT_TOL {
                let ratio = t[i][rhs] / t[i][j];
                let better = ratio < best - 1e-12
                    || (ratio < best + 1e-12 && leave.is_some_and(|l| basis[i] < basis[l]));
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(i) = leave else {
            return Ok(false);
        };
        pivot_rows(t, basis, i, j);
    }
    Err(VqfError::Numeric("simplex pivot cap exceeded".into()))
}

fn pivot_rows(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let width = t[row].len();
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    for r in 0..t.len() {
        if r != row && t[r][col].abs() > 0.0 {
            let f = t[r][col];
            for j in 0..width {
                t[r][j] -= f * t[row][j];
            }
            t[r][col] = 0.0;
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(r: LpResult) -> (Vec<f64>, f64) {
        match r {
            LpResult::Optimal { x, objective } => (x, objective),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn solves_a_one_constraint_problem() {
        // min -x1 with x1 + x2 = 1
        let r = solve_standard(&[vec![1.0, 1.0]], &[1.0], &[-1.0, 0.0]).unwrap();
        let (x, obj) = optimal(r);
        assert!((x[0] - 1.0).abs() < 1e-9);
        assert!(x[1].abs() < 1e-9);
        assert!((obj + 1.0).abs() < 1e-9);
    }

    #[test]
    fn detects_unbounded_direction() {
        // min -x1 with x1 - x2 = 1; x = (1 + t, t) drives the cost down forever
        let r = solve_standard(&[vec![1.0, -1.0]], &[1.0], &[-1.0, 0.0]).unwrap();
        assert_eq!(r, LpResult::Unbounded);
    }

    #[test]
    fn detects_inconsistent_equalities() {
        // x1 = 1 and x1 = 2
        let r =
            solve_standard(&[vec![1.0, 0.0], vec![1.0, 0.0]], &[1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(r, LpResult::Infeasible);
    }

    // The min-weight maximization used by the witness search: variables
    // (eps, s_1..s_N), weights w_j = eps + s_j, constraints
    // sum_j w_j q_j = 0 and sum_j w_j = 1, objective max eps.
    fn witness_lp(points: &[Vec<f64>]) -> LpResult {
        let m = points[0].len();
        let n_pts = points.len();
        let mut a = Vec::with_capacity(m + 1);
        for k in 0..m {
            let mut row = Vec::with_capacity(n_pts + 1);
            row.push(points.iter().map(|q| q[k]).sum::<f64>());
            row.extend(points.iter().map(|q| q[k]));
            a.push(row);
        }
        let mut last = vec![n_pts as f64];
        last.extend(std::iter::repeat(1.0).take(n_pts));
        a.push(last);
        let mut b = vec![0.0; m];
        b.push(1.0);
        let mut c = vec![-1.0];
        c.extend(std::iter::repeat(0.0).take(n_pts));
        solve_standard(&a, &b, &c).unwrap()
    }

    #[test]
    fn witness_weights_for_a_triangle_around_zero() {
        // hull of (1,0), (0,1), (-1,-1) has 0 strictly inside; the
        // symmetric optimum puts weight 1/3 on each vertex
        let r = witness_lp(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]);
        let (x, obj) = optimal(r);
        assert!((obj + 1.0 / 3.0).abs() < 1e-9);
        for j in 0..3 {
            let w = x[0] + x[1 + j];
            assert!((w - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn witness_weights_for_a_cross() {
        let r = witness_lp(&[
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ]);
        let (x, obj) = optimal(r);
        assert!((obj + 0.25).abs() < 1e-9);
        for j in 0..4 {
            assert!((x[0] + x[1 + j] - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn witness_search_fails_when_zero_is_outside_the_hull() {
        let r = witness_lp(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(r, LpResult::Infeasible);
    }

    #[test]
    fn witness_lp_ignores_rank_by_design() {
        // 0 sits inside the segment between (1,0) and (-1,0) but not in a
        // 2-d interior; the LP still reports weights. Rank is the caller's
        // responsibility.
        let r = witness_lp(&[vec![1.0, 0.0], vec![-1.0, 0.0]]);
        let (x, obj) = optimal(r);
        assert!((obj + 0.5).abs() < 1e-9);
        assert!((x[0] + x[1] - 0.5).abs() < 1e-9);
        assert!((x[0] + x[2] - 0.5).abs() < 1e-9);
    }
}
