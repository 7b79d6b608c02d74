//! Numerical preimages: find u with Q(u) = v.
//!
//! Multi-start damped Gauss-Newton on the normalized target. Quadratic
//! homogeneity reduces every target to the unit sphere of R^m: solve for
//! v/|v|, then scale the answer by |v|^(1/2). Failure to converge is a
//! normal outcome reported through `solution: None`, not an error; whether
//! that means "v is outside the image" is for the surjectivity module to
//! argue.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VqfError};
use crate::exec;
use crate::form::VQForm;
use crate::linalg::{self, cholesky_solve, Mat};
use crate::sphere::{random_unit, rng_for};

const START_STREAM: u64 = 0x7072_6569;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Success threshold, applied as residual_tol * (1 + |v|).
    pub residual_tol: f64,
    pub damping_init: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            restarts: 32,
            max_iters: 200,
            residual_tol: 1e-10,
            damping_init: 1e-3,
            seed: 0,
        }
    }
}

impl SolveOptions {
    pub(crate) fn validate(&self) {
        assert!(self.restarts >= 1, "restarts must be positive");
        assert!(self.max_iters >= 1, "iteration cap must be positive");
        assert!(
            self.residual_tol > 0.0 && self.residual_tol < 1e-4,
            "residual tolerance must lie in (0, 1e-4)"
        );
        assert!(self.damping_init > 0.0, "damping must be positive");
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageResult {
    pub solution: Option<Vec<f64>>,
    /// Distance |Q(u) - v| for the reported point (or the best start).
    pub residual_norm: f64,
    pub starts_used: usize,
    /// Final residual of every start, in input order.
    pub trace: Vec<f64>,
}

/// Residual r = Q(u) - v and the Jacobian J with rows 2 A_i u.
pub fn residual_jacobian(f: &VQForm, u: &[f64], v: &[f64]) -> Result<(Vec<f64>, Mat)> {
    if u.len() != f.domain_dim() {
        return Err(VqfError::DimensionMismatch {
            context: "preimage point dimension",
            expected: f.domain_dim(),
            got: u.len(),
        });
    }
    if v.len() != f.codomain_dim() {
        return Err(VqfError::DimensionMismatch {
            context: "preimage target dimension",
            expected: f.codomain_dim(),
            got: v.len(),
        });
    }
    let r = linalg::sub(&f.evaluate(u), v);
    Ok((r, f.jacobian(u)))
}

/// True iff |Q(u) - v| <= tol.
pub fn verify_preimage(f: &VQForm, u: &[f64], v: &[f64], tol: f64) -> bool {
    let q = f.evaluate(u);
    linalg::norm(&linalg::sub(&q, v)) <= tol
}

/// Attempts Q(u) = v by damped Gauss-Newton from many starts.
///
/// All starts run to completion and the winner is the lowest-index
/// success, so results do not depend on scheduling. Warm starts come from
/// the eigenvectors of the contraction along the normalized target; the
/// rest of the budget is seeded random directions.
pub fn solve_preimage(f: &VQForm, v: &[f64], opts: &SolveOptions) -> PreimageResult {
    opts.validate();
    assert_eq!(v.len(), f.codomain_dim(), "target dimension");
    assert!(v.iter().all(|x| x.is_finite()), "target must be finite");

    let n = f.domain_dim();
    let v_norm = linalg::norm(v);
    if v_norm == 0.0 {
        return PreimageResult {
            solution: Some(vec![0.0; n]),
            residual_norm: 0.0,
            starts_used: 0,
            trace: Vec::new(),
        };
    }
    let v_hat = linalg::scale(v, 1.0 / v_norm);
    // success measured in the original space: |Q(u) - v| <= tol*(1+|v|);
    // the normalized problem scales residuals by 1/|v|
    let tol_final = opts.residual_tol * (1.0 + v_norm);
    let tol_hat = tol_final / v_norm;

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(opts.restarts);
    if let Ok(eig) = f.contract(&v_hat).eigen() {
        // largest-magnitude eigendirections first, scaled so the target
        // component of the image starts near unit size
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.values[b]
                .abs()
                .partial_cmp(&eig.values[a].abs())
                .expect("finite eigenvalues")
        });
        for &k in order.iter().take(opts.restarts) {
            let mu = eig.values[k].abs().max(0.1);
            starts.push(linalg::scale(&eig.vectors[k], 1.0 / mu.sqrt()));
        }
    }
    let mut idx = 0u64;
    while starts.len() < opts.restarts {
        starts.push(random_unit(n, &mut rng_for(opts.seed, START_STREAM, idx)));
        idx += 1;
    }

    let runs = exec::map_items(&starts, |s| {
        gauss_newton(
            f,
            &v_hat,
            s.clone(),
            opts.max_iters,
            opts.damping_init,
            tol_hat,
        )
    });

    let trace: Vec<f64> = runs.iter().map(|(_, rn)| rn * v_norm).collect();
    let winner = runs
        .iter()
        .position(|(_, rn)| *rn <= tol_hat)
        .or_else(|| {
            let mut best = 0;
            for (i, (_, rn)) in runs.iter().enumerate() {
                if *rn < runs[best].1 {
                    best = i;
                }
            }
            Some(best)
        })
        .expect("at least one start");

    let scale = v_norm.sqrt();
    let candidate: Vec<f64> = runs[winner].0.iter().map(|x| x * scale).collect();
    let residual_norm = linalg::norm(&linalg::sub(&f.evaluate(&candidate), v));
    let success = residual_norm <= tol_final;
    PreimageResult {
        solution: success.then_some(candidate),
        residual_norm,
        starts_used: starts.len(),
        trace,
    }
}

// Levenberg-style iteration: (J^T J + mu I) s = -J^T r, mu halved on
// accepted steps and quadrupled on rejections.
fn gauss_newton(
    f: &VQForm,
    target: &[f64],
    start: Vec<f64>,
    max_iters: usize,
    damping_init: f64,
    tol: f64,
) -> (Vec<f64>, f64) {
    let n = f.domain_dim();
    let mut u = start;
    let mut r = linalg::sub(&f.evaluate(&u), target);
    let mut rn = linalg::norm(&r);
    let mut mu = damping_init;
    for _ in 0..max_iters {
        if rn <= tol || mu > 1e16 {
            break;
        }
        let j = f.jacobian(&u);
        let mut a = j.gram();
        for i in 0..n {
            let d = a.get(i, i);
            a.set(i, i, d + mu);
        }
        let mut rhs = j.matvec_t(&r);
        for x in &mut rhs {
            *x = -*x;
        }
        let Some(step) = cholesky_solve(&a, &rhs) else {
            mu *= 4.0;
            continue;
        };
        let cand: Vec<f64> = u.iter().zip(&step).map(|(ui, si)| ui + si).collect();
        let rc = linalg::sub(&f.evaluate(&cand), target);
        let rcn = linalg::norm(&rc);
        if rcn < rn {
            u = cand;
            r = rc;
            rn = rcn;
            mu = (mu * 0.5).max(1e-14);
        } else {
            mu *= 4.0;
        }
    }
    (u, rn)
}
