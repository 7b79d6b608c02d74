//! Definiteness classification with verifiable certificates.
//!
//! A form is definite when some weighting lambda of its components gives a
//! positive definite contraction; it is indefinite when every nonzero
//! weighting produces values of both signs, which is equivalent to the
//! origin lying in the interior of the convex hull of the image. The two
//! notions are not complementary: forms whose best contraction is merely
//! positive semidefinite sit between them ([`Verdict::SemidefiniteBoundary`]).
//!
//! Searches here are sound but deliberately incomplete. A returned
//! certificate always passes [`verify_certificate`]; when no certificate
//! is found the verdict degrades to [`Verdict::Indeterminate`] rather than
//! guessing. [`brute_force_classify`] is the slow oracle: a covered sphere
//! grid whose negative-definiteness margins are certified against the
//! Lipschitz constant of the min-eigenvalue map.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VqfError};
use crate::exec;
use crate::form::VQForm;
use crate::linalg::{self, normalize};
use crate::lp::{solve_standard, LpResult};
use crate::sphere::{low_discrepancy_directions, random_unit, rng_for};

/// Minimum LP weight floor for an interior witness to count.
pub const DEFAULT_WEIGHT_TOL: f64 = 1e-6;
/// Relative singular-value floor for "the image points span R^m".
const WITNESS_RANK_TOL: f64 = 1e-8;
/// Residual bound (scaled by 1 + form scale) for witness verification.
const WITNESS_RESIDUAL_TOL: f64 = 1e-8;

const ASCENT_STREAM: u64 = 0x6173_6365;
const SAMPLE_STREAM: u64 = 0x7361_6d70;
const ORACLE_STREAM: u64 = 0x6f72_6163;

/// Definiteness margin threshold, scaled to the form.
pub fn definite_tol_for(f: &VQForm) -> f64 {
    1e-7 * (1.0 + f.scale())
}

/// How `indefinite_certificate` picks its sample points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSampler {
    /// Low-discrepancy stream only; fully deterministic.
    SphereGrid,
    /// Low-discrepancy points first, then a seeded random top-up.
    Random,
}

/// Machine-checkable evidence for a classification verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// lambda with positive definite contraction; margin is its smallest
    /// eigenvalue.
    DefiniteDirection { lambda: Vec<f64>, margin: f64 },
    /// lambda whose contraction is positive semidefinite within tolerance;
    /// rules out indefiniteness (and hence surjectivity).
    PsdDirection { lambda: Vec<f64>, min_eig: f64 },
    /// Points whose images combine convexly to zero with full-rank span:
    /// the origin is interior to the hull of the image, so the form is
    /// indefinite.
    InteriorWitness {
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Definite,
    Indefinite,
    SemidefiniteBoundary,
    Indeterminate,
}

/// Work actually performed, for reproducibility reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    /// Eigen-evaluations spent in ascent and polish.
    pub ascent_iterations: usize,
    /// Sphere points mapped through the form for the witness search.
    pub witness_samples: usize,
    /// Grid nodes evaluated (brute-force oracle only).
    pub grid_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub budget: BudgetReport,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Supergradient iterations per restart.
    pub budget: usize,
    /// Ascent restarts; None means max(8, 2m).
    pub restarts: Option<usize>,
    /// Sphere samples for the witness LP.
    pub max_samples: usize,
    pub seed: u64,
    /// Definiteness margin; None means the scale-aware default.
    pub definite_tol: Option<f64>,
    pub weight_tol: f64,
    pub sampler: WitnessSampler,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            budget: 500,
            restarts: None,
            max_samples: 128,
            seed: 0,
            definite_tol: None,
            weight_tol: DEFAULT_WEIGHT_TOL,
            sampler: WitnessSampler::Random,
        }
    }
}

/// Best direction found for max over unit lambda of the smallest
/// eigenvalue of the contraction.
///
/// Multi-start projected supergradient ascent (supergradient at lambda:
/// the vector of Rayleigh quotients of the components at the minimal
/// eigenvector, projected tangent to the sphere), then a shrinking
/// pattern search around the winner. The value is attained, so it lower
/// bounds the global maximum; it is not guaranteed to reach it.
pub fn max_min_eigen_direction(
    f: &VQForm,
    budget: usize,
    restarts: usize,
    seed: u64,
) -> (Vec<f64>, f64) {
    let (lambda, value, _) = max_min_search(f, budget, restarts, seed);
    (lambda, value)
}

fn max_min_search(f: &VQForm, budget: usize, restarts: usize, seed: u64) -> (Vec<f64>, f64, usize) {
    assert!(budget >= 1 && restarts >= 1, "ascent budget");
    let m = f.codomain_dim();
    if m == 1 {
        // the unit sphere in R^1 is two points
        let vp = contracted_min_eig(f, &[1.0]);
        let vm = contracted_min_eig(f, &[-1.0]);
        return if vp >= vm {
            (vec![1.0], vp, 2)
        } else {
            (vec![-1.0], vm, 2)
        };
    }

    // deterministic coarse anchors so golden cases never depend on the seed
    let scan = low_discrepancy_directions(m, 64);
    let mut scored: Vec<(f64, usize)> = scan
        .iter()
        .enumerate()
        .map(|(i, l)| (contracted_min_eig(f, l), i))
        .collect();
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("finite eigenvalues")
            .then(a.1.cmp(&b.1))
    });
    let mut starts: Vec<Vec<f64>> = scored
        .iter()
        .take(3)
        .map(|&(_, i)| scan[i].clone())
        .collect();
    for i in 0..restarts {
        starts.push(random_unit(m, &mut rng_for(seed, ASCENT_STREAM, i as u64)));
    }

    let runs = exec::map_items(&starts, |s| ascent_run(f, s.clone(), budget));
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 > runs[best].0 {
            best = i;
        }
    }
    let evals: usize = scan.len() + runs.iter().map(|r| r.2).sum::<usize>();
    let (value, lambda, polish_evals) = polish_direction(f, runs[best].1.clone(), runs[best].0);
    (lambda, value, evals + polish_evals)
}

// One restart: two step schedules, coarse then fine, always keeping the
// best iterate seen.
fn ascent_run(f: &VQForm, start: Vec<f64>, budget: usize) -> (f64, Vec<f64>, usize) {
    let mut lambda = start;
    let mut best_val = f64::NEG_INFINITY;
    let mut best_lambda = lambda.clone();
    let mut evals = 0;
    let coarse = budget - budget / 3;
    for (phase, c0) in [(coarse, 0.3), (budget - coarse, 0.03)] {
        lambda = best_lambda.clone();
        for k in 1..=phase {
            let a = f.contract(&lambda);
            let Ok(eig) = a.eigen() else { break };
            evals += 1;
            let val = eig.values[0];
            if val > best_val {
                best_val = val;
                best_lambda = lambda.clone();
            }
            let v = &eig.vectors[0];
            let mut g: Vec<f64> = f.components().iter().map(|ai| ai.quad(v)).collect();
            let along = linalg::dot(&g, &lambda);
            for (gi, li) in g.iter_mut().zip(&lambda) {
                *gi -= along * li;
            }
            let gn = linalg::norm(&g);
            if gn < 1e-14 {
                break; // critical point of the smooth piece
            }
            let step = c0 / (k as f64).sqrt();
            for (li, gi) in lambda.iter_mut().zip(&g) {
                *li += step * gi / gn;
            }
            normalize(&mut lambda);
        }
    }
    if best_val == f64::NEG_INFINITY {
        best_val = contracted_min_eig(f, &best_lambda);
        evals += 1;
    }
    (best_val, best_lambda, evals)
}

// Shrinking pattern search on the sphere tangent around the ascent winner;
// sharpens kink maxima (where eigenvalue branches cross) from step-size
// accuracy down to machine precision.
fn polish_direction(f: &VQForm, mut lambda: Vec<f64>, mut best: f64) -> (f64, Vec<f64>, usize) {
    let mut rho = 0.05_f64;
    let mut evals = 0;
    for _ in 0..600 {
        if rho < 1e-13 {
            break;
        }
        let dirs = tangent_moves(&lambda);
        let mut improved = false;
        for d in &dirs {
            let mut cand: Vec<f64> = lambda.iter().zip(d).map(|(li, di)| li + rho * di).collect();
            normalize(&mut cand);
            let v = contracted_min_eig(f, &cand);
            evals += 1;
            if v > best {
                best = v;
                lambda = cand;
                improved = true;
            }
        }
        if !improved {
            rho *= 0.5;
        }
    }
    (best, lambda, evals)
}

// Plus/minus tangent basis directions and their pairwise diagonals.
fn tangent_moves(lambda: &[f64]) -> Vec<Vec<f64>> {
    let m = lambda.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
    for i in 0..m {
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        let along = linalg::dot(&v, lambda);
        for (vj, lj) in v.iter_mut().zip(lambda) {
            *vj -= along * lj;
        }
        for b in &basis {
            let c = linalg::dot(&v, b);
            for (vj, bj) in v.iter_mut().zip(b) {
                *vj -= c * bj;
            }
        }
        if linalg::norm(&v) > 1e-8 {
            normalize(&mut v);
            basis.push(v);
            if basis.len() == m - 1 {
                break;
            }
        }
    }
    let mut moves = Vec::new();
    for b in &basis {
        moves.push(b.clone());
        moves.push(b.iter().map(|x| -x).collect());
    }
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                moves.push(
                    basis[i]
                        .iter()
                        .zip(&basis[j])
                        .map(|(x, y)| inv * (si * x + sj * y))
                        .collect(),
                );
            }
        }
    }
    moves
}

fn contracted_min_eig(f: &VQForm, lambda: &[f64]) -> f64 {
    f.contract(lambda)
        .eigenvalues()
        .map(|v| v[0])
        .unwrap_or(f64::NEG_INFINITY)
}

/// A direction whose contraction clears the definiteness margin, if the
/// ascent finds one. Absence proves nothing.
pub fn definite_certificate(f: &VQForm, opts: &ClassifyOptions) -> Option<Certificate> {
    let restarts = opts
        .restarts
        .unwrap_or_else(|| (2 * f.codomain_dim()).max(8));
    let (lambda, value) = max_min_eigen_direction(f, opts.budget, restarts, opts.seed);
    let tol = opts.definite_tol.unwrap_or_else(|| definite_tol_for(f));
    (value > tol).then_some(Certificate::DefiniteDirection {
        lambda,
        margin: value,
    })
}

/// Searches for an interior witness: sphere samples whose images admit a
/// strictly positive convex combination equal to zero with full-rank span.
/// Finding one proves the form indefinite; absence proves nothing.
pub fn indefinite_certificate(
    f: &VQForm,
    sampler: WitnessSampler,
    max_samples: usize,
    seed: u64,
) -> Result<Option<Certificate>> {
    witness_search(f, sampler, max_samples, seed, DEFAULT_WEIGHT_TOL)
}

fn witness_search(
    f: &VQForm,
    sampler: WitnessSampler,
    max_samples: usize,
    seed: u64,
    weight_tol: f64,
) -> Result<Option<Certificate>> {
    let n = f.domain_dim();
    let m = f.codomain_dim();
    if max_samples < m + 1 {
        return Err(VqfError::InvalidArgument(format!(
            "witness search needs at least {} samples for m = {m}, got {max_samples}",
            m + 1
        )));
    }
    let mut points = match sampler {
        WitnessSampler::SphereGrid => low_discrepancy_directions(n, max_samples),
        WitnessSampler::Random => {
            let lead = max_samples.min(64);
            let mut pts = low_discrepancy_directions(n, lead);
            for i in lead..max_samples {
                pts.push(random_unit(n, &mut rng_for(seed, SAMPLE_STREAM, i as u64)));
            }
            pts
        }
    };
    let images = exec::map_items(&points, |u| f.evaluate(u));
    // drop points whose image is too small to weight reliably
    let floor = 1e-12 * (1.0 + f.scale());
    let mut unit_images = Vec::with_capacity(points.len());
    let mut norms = Vec::with_capacity(points.len());
    let mut kept = Vec::with_capacity(points.len());
    for (u, q) in points.drain(..).zip(images) {
        let qn = linalg::norm(&q);
        if qn > floor {
            unit_images.push(q.iter().map(|x| x / qn).collect::<Vec<f64>>());
            norms.push(qn);
            kept.push(u);
        }
    }
    let count = kept.len();
    if count < m + 1 {
        return Ok(None);
    }

    // maximize eps subject to sum_j w_j qhat_j = 0, sum_j w_j = 1,
    // w_j >= eps, via w_j = eps + s_j
    let mut a = Vec::with_capacity(m + 1);
    for k in 0..m {
        let mut row = Vec::with_capacity(count + 1);
        row.push(unit_images.iter().map(|q| q[k]).sum::<f64>());
        row.extend(unit_images.iter().map(|q| q[k]));
        a.push(row);
    }
    let mut last = vec![count as f64];
    last.extend(std::iter::repeat(1.0).take(count));
    a.push(last);
    let mut b = vec![0.0; m];
    b.push(1.0);
    let mut c = vec![-1.0];
    c.extend(std::iter::repeat(0.0).take(count));

    let x = match solve_standard(&a, &b, &c)? {
        LpResult::Infeasible => return Ok(None),
        LpResult::Unbounded => {
            return Err(VqfError::Numeric(
                "witness LP reported an unbounded objective despite the simplex constraint".into(),
            ))
        }
        LpResult::Optimal { x, .. } => x,
    };
    let eps = x[0];
    if eps <= weight_tol {
        return Ok(None);
    }
    if !images_span(&unit_images, m)? {
        return Ok(None);
    }
    // translate weights back to the raw (unnormalized) images
    let mut weights: Vec<f64> = (0..count).map(|j| (eps + x[1 + j]) / norms[j]).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(Some(Certificate::InteriorWitness {
        points: kept,
        weights,
    }))
}

// Rank-m check through the moment matrix of the (unit) image points.
fn images_span(unit_images: &[Vec<f64>], m: usize) -> Result<bool> {
    let mut moment = crate::sym::SymmetricMatrix::zeros(m);
    for q in unit_images {
        for i in 0..m {
            for j in i..m {
                let v = moment.get(i, j) + q[i] * q[j];
                moment.set_sym(i, j, v);
            }
        }
    }
    let vals = moment.eigenvalues()?;
    let sigma_min = vals[0].max(0.0).sqrt();
    let sigma_max = vals[m - 1].max(0.0).sqrt();
    Ok(sigma_min >= WITNESS_RANK_TOL * (1.0 + sigma_max))
}

/// Independent re-check of a certificate against the form. Dimension or
/// finiteness violations are input errors; a well-formed certificate that
/// fails its invariant returns false.
pub fn verify_certificate(f: &VQForm, cert: &Certificate) -> Result<bool> {
    match cert {
        Certificate::DefiniteDirection { lambda, margin } => {
            check_lambda(f, lambda)?;
            if !margin.is_finite() {
                return Err(VqfError::NonFinite {
                    context: "certificate margin",
                });
            }
            if *margin <= 0.0 || (linalg::norm(lambda) - 1.0).abs() > 1e-6 {
                return Ok(false);
            }
            let min_eig = f.contract(lambda).eigenvalues()?[0];
            Ok(min_eig > 0.0 && min_eig >= margin / 2.0)
        }
        Certificate::PsdDirection { lambda, min_eig } => {
            check_lambda(f, lambda)?;
            if !min_eig.is_finite() {
                return Err(VqfError::NonFinite {
                    context: "certificate eigenvalue",
                });
            }
            if linalg::norm(lambda) < 1e-8 {
                return Ok(false);
            }
            let recomputed = f.contract(lambda).eigenvalues()?[0];
            Ok(recomputed >= -definite_tol_for(f))
        }
        Certificate::InteriorWitness { points, weights } => {
            if points.is_empty() || points.len() != weights.len() {
                return Err(VqfError::DimensionMismatch {
                    context: "witness weight count",
                    expected: points.len(),
                    got: weights.len(),
                });
            }
            for p in points {
                if p.len() != f.domain_dim() {
                    return Err(VqfError::DimensionMismatch {
                        context: "witness point dimension",
                        expected: f.domain_dim(),
                        got: p.len(),
                    });
                }
                if p.iter().any(|x| !x.is_finite()) {
                    return Err(VqfError::NonFinite {
                        context: "witness point",
                    });
                }
            }
            if weights.iter().any(|w| !w.is_finite()) {
                return Err(VqfError::NonFinite {
                    context: "witness weight",
                });
            }
            if weights.iter().any(|&w| w <= 0.0) {
                return Ok(false);
            }
            let total: f64 = weights.iter().sum();
            if (total - 1.0).abs() > 1e-6 {
                return Ok(false);
            }
            let m = f.codomain_dim();
            let mut resid = vec![0.0; m];
            let mut unit_images = Vec::with_capacity(points.len());
            for (u, &w) in points.iter().zip(weights) {
                let q = f.evaluate(u);
                for (r, qi) in resid.iter_mut().zip(&q) {
                    *r += w * qi;
                }
                let qn = linalg::norm(&q);
                if qn > 0.0 {
                    unit_images.push(q.iter().map(|x| x / qn).collect::<Vec<f64>>());
                }
            }
            if linalg::norm(&resid) > WITNESS_RESIDUAL_TOL * (1.0 + f.scale()) {
                return Ok(false);
            }
            if unit_images.len() < m {
                return Ok(false);
            }
            images_span(&unit_images, m)
        }
    }
}

fn check_lambda(f: &VQForm, lambda: &[f64]) -> Result<()> {
    if lambda.len() != f.codomain_dim() {
        return Err(VqfError::DimensionMismatch {
            context: "certificate direction dimension",
            expected: f.codomain_dim(),
            got: lambda.len(),
        });
    }
    if lambda.iter().any(|x| !x.is_finite()) {
        return Err(VqfError::NonFinite {
            context: "certificate direction",
        });
    }
    Ok(())
}

/// Top-level decision procedure: definite search, then witness search,
/// then the semidefinite band, and otherwise honest indeterminacy.
pub fn classify(f: &VQForm, opts: &ClassifyOptions) -> Classification {
    let m = f.codomain_dim();
    let restarts = opts.restarts.unwrap_or_else(|| (2 * m).max(8));
    let tol = opts.definite_tol.unwrap_or_else(|| definite_tol_for(f));
    let mut budget = BudgetReport::default();
    let mut diagnostics = Vec::new();

    match f.gram().eigenvalues() {
        Ok(g) => {
            if g[0] <= 1e-12 * (1.0 + g[m - 1]) {
                diagnostics.push(
                    "component matrices are linearly dependent; the image lies in a proper subspace and indefiniteness is unreachable".to_string(),
                );
            }
        }
        Err(e) => diagnostics.push(format!("gram eigenvalue check failed: {e}")),
    }

    let (lambda, value, iters) = max_min_search(f, opts.budget, restarts, opts.seed);
    budget.ascent_iterations = iters;
    if value > tol {
        return Classification {
            verdict: Verdict::Definite,
            certificate: Some(Certificate::DefiniteDirection {
                lambda,
                margin: value,
            }),
            budget,
            diagnostics,
        };
    }

    match witness_search(
        f,
        opts.sampler,
        opts.max_samples,
        opts.seed,
        opts.weight_tol,
    ) {
        Ok(Some(cert)) => {
            budget.witness_samples = opts.max_samples;
            return Classification {
                verdict: Verdict::Indefinite,
                certificate: Some(cert),
                budget,
                diagnostics,
            };
        }
        Ok(None) => {
            budget.witness_samples = opts.max_samples;
        }
        Err(e) => {
            budget.witness_samples = opts.max_samples;
            diagnostics.push(format!("witness search failed: {e}"));
            return Classification {
                verdict: Verdict::Indeterminate,
                certificate: None,
                budget,
                diagnostics,
            };
        }
    }

    if value.abs() <= tol {
        return Classification {
            verdict: Verdict::SemidefiniteBoundary,
            certificate: Some(Certificate::PsdDirection {
                lambda,
                min_eig: value,
            }),
            budget,
            diagnostics,
        };
    }
    diagnostics.push(format!(
        "no definite direction above tolerance and no interior witness within {} samples; best minimum eigenvalue {value:.6e}",
        opts.max_samples
    ));
    Classification {
        verdict: Verdict::Indeterminate,
        certificate: None,
        budget,
        diagnostics,
    }
}

/// Exhaustive grid oracle over the weighting sphere, m <= 3 only.
///
/// Definite: some node clears the margin. Indefinite: every covering cell
/// is certified negative via the Lipschitz bound L = sqrt(sum of squared
/// spectral norms), refining undecided cells until they certify or the
/// depth cap hits. Angular resolution must be at most one degree.
pub fn brute_force_classify(f: &VQForm, resolution: f64) -> Result<Classification> {
    let m = f.codomain_dim();
    if m > 3 {
        return Err(VqfError::InvalidArgument(format!(
            "brute-force oracle supports m <= 3, got {m}"
        )));
    }
    let one_degree = std::f64::consts::PI / 180.0;
    if !(resolution > 0.0 && resolution <= one_degree * 1.0000001) {
        return Err(VqfError::InvalidArgument(format!(
            "angular resolution must be in (0, 1 degree], got {resolution}"
        )));
    }
    let tol = definite_tol_for(f);
    let mut lipschitz = 0.0;
    for ai in f.components() {
        let s = ai.spectral_norm()?;
        lipschitz += s * s;
    }
    let lipschitz = lipschitz.sqrt();

    let mut budget = BudgetReport::default();
    let mut diagnostics = Vec::new();

    // cells: (center lambda, covering radius); children shrink by half
    let mut cells: Vec<(Vec<f64>, f64)> = initial_cells(m, resolution);
    let mut best_val = f64::NEG_INFINITY;
    let mut best_lambda = vec![0.0; m];
    let mut unresolved = 0usize;
    let max_depth = 9;

    for depth in 0..=max_depth {
        if cells.is_empty() {
            break;
        }
        if budget.grid_nodes > 2_000_000 {
            unresolved += cells.len();
            diagnostics.push("refinement node budget exhausted".to_string());
            break;
        }
        budget.grid_nodes += cells.len();
        let values = exec::map_items(&cells, |(lambda, _)| contracted_min_eig(f, lambda));
        let mut next = Vec::new();
        for ((lambda, radius), val) in cells.into_iter().zip(values) {
            if val > best_val {
                best_val = val;
                best_lambda = lambda.clone();
            }
            if val > tol {
                return Ok(Classification {
                    verdict: Verdict::Definite,
                    certificate: Some(Certificate::DefiniteDirection {
                        lambda,
                        margin: val,
                    }),
                    budget,
                    diagnostics,
                });
            }
            if val + lipschitz * radius < 0.0 {
                continue; // entire cell certified negative
            }
            if depth == max_depth || radius == 0.0 {
                unresolved += 1;
            } else {
                next.extend(split_cell(&lambda, radius, m));
            }
        }
        cells = next;
    }

    if unresolved == 0 {
        // every direction certified: the minimum eigenvalue is negative on
        // the whole sphere, so values of both signs occur everywhere
        let cert = witness_search(
            f,
            WitnessSampler::Random,
            192.max(16 * m),
            ORACLE_STREAM,
            DEFAULT_WEIGHT_TOL,
        )
        .ok()
        .flatten();
        if cert.is_none() {
            diagnostics.push(
                "grid certified indefiniteness but the witness LP found no interior point at this budget".to_string(),
            );
        }
        return Ok(Classification {
            verdict: Verdict::Indefinite,
            certificate: cert,
            budget,
            diagnostics,
        });
    }
    if best_val >= -tol {
        return Ok(Classification {
            verdict: Verdict::SemidefiniteBoundary,
            certificate: Some(Certificate::PsdDirection {
                lambda: best_lambda,
                min_eig: best_val,
            }),
            budget,
            diagnostics,
        });
    }
    diagnostics.push(format!(
        "{unresolved} cells stayed unresolved at the depth cap; best minimum eigenvalue {best_val:.6e}"
    ));
    Ok(Classification {
        verdict: Verdict::Indeterminate,
        certificate: None,
        budget,
        diagnostics,
    })
}

fn initial_cells(m: usize, resolution: f64) -> Vec<(Vec<f64>, f64)> {
    use std::f64::consts::PI;
    match m {
        1 => vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)],
        2 => {
            let k = (2.0 * PI / resolution).ceil() as usize;
            let step = 2.0 * PI / k as f64;
            (0..k)
                .map(|i| {
                    let theta = (i as f64 + 0.5) * step;
                    (vec![theta.cos(), theta.sin()], step / 2.0)
                })
                .collect()
        }
        3 => {
            let rings = (PI / resolution).ceil() as usize;
            let slices = (2.0 * PI / resolution).ceil() as usize;
            let dt = PI / rings as f64;
            let dp = 2.0 * PI / slices as f64;
            let mut cells = Vec::with_capacity(rings * slices);
            for i in 0..rings {
                let theta = (i as f64 + 0.5) * dt;
                // widest sine across the band bounds the azimuthal arc
                let t_lo = i as f64 * dt;
                let t_hi = t_lo + dt;
                let sin_max = if (t_lo..=t_hi).contains(&(PI / 2.0)) {
                    1.0
                } else {
                    t_lo.sin().max(t_hi.sin())
                };
                let radius = 0.5 * (dt.powi(2) + (sin_max * dp).powi(2)).sqrt();
                for j in 0..slices {
                    let phi = (j as f64 + 0.5) * dp;
                    cells.push((
                        vec![
                            theta.sin() * phi.cos(),
                            theta.sin() * phi.sin(),
                            theta.cos(),
                        ],
                        radius,
                    ));
                }
            }
            cells
        }
        _ => unreachable!("validated above"),
    }
}

// Four (or two) children at half radius whose balls cover the parent ball.
fn split_cell(lambda: &[f64], radius: f64, m: usize) -> Vec<(Vec<f64>, f64)> {
    if radius == 0.0 {
        return Vec::new();
    }
    let moves = tangent_moves(lambda);
    let offset = radius * 0.6;
    let child_radius = radius * 0.6;
    let mut out = Vec::new();
    // center child plus one per tangent move at reduced radius
    out.push((lambda.to_vec(), radius * 0.55));
    for d in moves.iter().take(if m == 2 { 2 } else { 8 }) {
        let mut c: Vec<f64> = lambda
            .iter()
            .zip(d)
            .map(|(li, di)| li + offset * di)
            .collect();
        normalize(&mut c);
        out.push((c, child_radius));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::{coordinate_products, planar_squares};
    use crate::sym::SymmetricMatrix;

    fn diag_pair() -> VQForm {
        VQForm::new(vec![
            SymmetricMatrix::diagonal(&[1.0, 0.0]),
            SymmetricMatrix::diagonal(&[0.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn ascent_finds_the_diagonal_direction() {
        let f = diag_pair();
        let (lambda, value) = max_min_eigen_direction(&f, 500, 8, 7);
        // max over the circle of min(cos, sin) peaks at 45 degrees
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        assert!((value - inv).abs() < 1e-9, "value {value}");
        assert!((lambda[0] - inv).abs() < 1e-6);
        assert!((lambda[1] - inv).abs() < 1e-6);
    }

    #[test]
    fn ascent_on_a_single_identity_component() {
        let f = VQForm::new(vec![SymmetricMatrix::identity(3)]).unwrap();
        let (lambda, value) = max_min_eigen_direction(&f, 10, 1, 0);
        assert_eq!(lambda, vec![1.0]);
        assert!((value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ascent_stays_negative_for_traceless_components() {
        // all contractions of (xy, xz, yz) are traceless and nonzero
        let f = coordinate_products();
        let (_, value) = max_min_eigen_direction(&f, 300, 8, 3);
        assert!(value < 0.0);
    }

    #[test]
    fn definite_certificate_on_the_axis_pair() {
        let f = diag_pair();
        let cert = definite_certificate(&f, &ClassifyOptions::default()).expect("definite");
        assert!(verify_certificate(&f, &cert).unwrap());
        let Certificate::DefiniteDirection { lambda, margin } = &cert else {
            panic!("wrong certificate kind");
        };
        assert!(*margin > 0.5);
        assert!((lambda[0] - lambda[1]).abs() < 1e-5);
    }

    #[test]
    fn no_definite_direction_for_traceless_families() {
        assert!(definite_certificate(&planar_squares(), &ClassifyOptions::default()).is_none());
        let single = VQForm::new(vec![SymmetricMatrix::diagonal(&[1.0, -1.0])]).unwrap();
        assert!(definite_certificate(&single, &ClassifyOptions::default()).is_none());
    }

    #[test]
    fn handwritten_witness_for_coordinate_products() {
        // images of these four points are (1,1,1), (-1,-1,1), (-1,1,-1),
        // (1,-1,-1): they sum to zero and span R^3
        let f = coordinate_products();
        let pts = vec![
            vec![1.0, 1.0, 1.0],
            vec![-1.0, 1.0, 1.0],
            vec![1.0, -1.0, 1.0],
            vec![1.0, 1.0, -1.0],
        ];
        let mut sum = [0.0; 3];
        for p in &pts {
            let q = f.evaluate(p);
            for (s, qi) in sum.iter_mut().zip(&q) {
                *s += 0.25 * qi;
            }
        }
        assert!(sum.iter().all(|s| s.abs() < 1e-15));
        let cert = Certificate::InteriorWitness {
            points: pts,
            weights: vec![0.25; 4],
        };
        assert!(verify_certificate(&f, &cert).unwrap());
    }

    #[test]
    fn witness_search_finds_coordinate_products() {
        let f = coordinate_products();
        let cert = indefinite_certificate(&f, WitnessSampler::Random, 128, 1)
            .unwrap()
            .expect("witness");
        assert!(verify_certificate(&f, &cert).unwrap());
    }

    #[test]
    fn witness_search_respects_one_sided_images() {
        // image of (x^2, y^2) stays in the nonnegative quadrant
        let f = diag_pair();
        assert!(indefinite_certificate(&f, WitnessSampler::Random, 128, 1)
            .unwrap()
            .is_none());
        assert!(
            indefinite_certificate(&f, WitnessSampler::SphereGrid, 200, 0)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn witness_for_a_single_split_matrix() {
        let f = VQForm::new(vec![SymmetricMatrix::diagonal(&[1.0, -1.0])]).unwrap();
        let cert = indefinite_certificate(&f, WitnessSampler::Random, 64, 5)
            .unwrap()
            .expect("witness");
        assert!(verify_certificate(&f, &cert).unwrap());
    }

    #[test]
    fn verification_rejects_tampered_certificates() {
        let f = diag_pair();
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let flipped = Certificate::DefiniteDirection {
            lambda: vec![-inv, -inv],
            margin: inv,
        };
        assert!(!verify_certificate(&f, &flipped).unwrap());

        let g = coordinate_products();
        let cert = indefinite_certificate(&g, WitnessSampler::Random, 128, 1)
            .unwrap()
            .expect("witness");
        if let Certificate::InteriorWitness {
            points,
            mut weights,
        } = cert
        {
            weights[0] = 0.0;
            let broken = Certificate::InteriorWitness { points, weights };
            assert!(!verify_certificate(&g, &broken).unwrap());
        }
    }

    #[test]
    fn verification_rejects_wrong_dimensions() {
        let f = diag_pair();
        let cert = Certificate::DefiniteDirection {
            lambda: vec![1.0, 0.0, 0.0],
            margin: 1.0,
        };
        assert!(verify_certificate(&f, &cert).is_err());
    }

    #[test]
    fn classify_golden_trio() {
        let c = classify(&coordinate_products(), &ClassifyOptions::default());
        assert_eq!(c.verdict, Verdict::Indefinite);
        assert!(matches!(
            c.certificate,
            Some(Certificate::InteriorWitness { .. })
        ));

        let c = classify(&diag_pair(), &ClassifyOptions::default());
        assert_eq!(c.verdict, Verdict::Definite);

        let zero = VQForm::new(vec![SymmetricMatrix::zeros(2)]).unwrap();
        let c = classify(&zero, &ClassifyOptions::default());
        assert_eq!(c.verdict, Verdict::SemidefiniteBoundary);
        assert!(matches!(
            c.certificate,
            Some(Certificate::PsdDirection { .. })
        ));
    }

    #[test]
    fn oracle_matches_on_the_golden_examples() {
        let res = std::f64::consts::PI / 180.0;
        let c = brute_force_classify(&coordinate_products(), res).unwrap();
        assert_eq!(c.verdict, Verdict::Indefinite);

        let c = brute_force_classify(&diag_pair(), res).unwrap();
        assert_eq!(c.verdict, Verdict::Definite);

        let c = brute_force_classify(&planar_squares(), res).unwrap();
        assert_eq!(c.verdict, Verdict::Indefinite);

        let zero = VQForm::new(vec![SymmetricMatrix::zeros(2)]).unwrap();
        let c = brute_force_classify(&zero, res).unwrap();
        assert_eq!(c.verdict, Verdict::SemidefiniteBoundary);
    }

    #[test]
    fn oracle_rejects_large_codomain_or_coarse_grid() {
        let f = crate::ensemble::random_form(3, 4, crate::ensemble::Ensemble::Gaussian, 0).unwrap();
        assert!(brute_force_classify(&f, 0.01).is_err());
        assert!(brute_force_classify(&coordinate_products(), 0.1).is_err());
    }
}
