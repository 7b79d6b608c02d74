//! Is the quadratic map onto?
//!
//! Three routes, in decreasing strength. The index route certifies
//! surjectivity: if every unit weighting lambda gives a contraction with at
//! least m negative eigenvalues, the map is onto (the Agrachev-Sarychev
//! criterion); for m <= 2 the minimum index over the weighting sphere is
//! computed exactly by an arc sweep, for larger m it is sampled and only
//! counts as evidence. The semidefiniteness route certifies the negative:
//! a weighting with positive semidefinite contraction traps the image in a
//! halfspace. When neither certificate applies, probing solves the
//! preimage problem on a spread of unit targets; by homogeneity, covering
//! every unit direction covers every ray, so the outcome is graded
//! evidence either way. All routes are deterministic in their seeds.

use serde::{Deserialize, Serialize};

use crate::classify::{self, Certificate, ClassifyOptions, Verdict};
use crate::error::{Result, VqfError};
use crate::exec;
use crate::form::VQForm;
use crate::linalg::{self, Mat};
use crate::poly;
use crate::preimage::{solve_preimage, SolveOptions};
use crate::sphere::{low_discrepancy_direction, random_unit, rng_for, subseed};
use crate::sym::{Inertia, SymmetricMatrix};

const DIRECTION_STREAM: u64 = 0x696e_6478;
const TARGET_DIR_STREAM: u64 = 0x7464_6972;
const TARGET_SOLVE_STREAM: u64 = 0x7473_6c76;
const KERNEL_STREAM: u64 = 0x6b65_726e;
/// Seed for the sampled fallback inside the exact sweep (which takes none).
const FALLBACK_SEED: u64 = 0x6172_6373;
/// Entry count of the fallback profile.
const FALLBACK_DIRECTIONS: usize = 256;

/// One probed weighting direction and the signature of its contraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub lambda: Vec<f64>,
    pub inertia: Inertia,
}

/// The negative-eigenvalue count of the contraction as a function of the
/// weighting direction, summarized by its observed minimum.
///
/// `exact` means the entries provably realize the minimum over the whole
/// weighting sphere (up to eigensolver and root-isolation tolerances);
/// that holds for the m = 2 arc sweep and for m = 1, where the sphere is
/// the two points +1 and -1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexProfile {
    pub entries: Vec<IndexEntry>,
    pub min_index: usize,
    pub exact: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurjectivityStatus {
    SurjectiveCertified,
    SurjectiveEvidence,
    NotSurjectiveCertified,
    NotSurjectiveEvidence,
    Indeterminate,
}

/// Evidence backing a surjectivity verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SurjectivityCertificate {
    /// Every probed weighting has at least `min_index` negative
    /// eigenvalues; `min_index >= m` with `exact` certifies onto.
    IndexBound { min_index: usize, exact: bool },
    /// Weighting with positive semidefinite contraction: the image sits in
    /// the halfspace of that weighting, so the map misses points.
    PsdDirection { lambda: Vec<f64>, min_eig: f64 },
    /// Convex combination of images hitting zero with full-rank span;
    /// surjectivity follows in the planar n = m = 2 case.
    InteriorWitness {
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    /// A unit target every solver start failed to reach.
    FailedTarget {
        target: Vec<f64>,
        best_residual: f64,
        starts_used: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurjectivityVerdict {
    pub verdict: SurjectivityStatus,
    pub certificate: Option<SurjectivityCertificate>,
    pub profile: Option<IndexProfile>,
    pub diagnostics: Vec<String>,
}

fn inertia_or_degenerate(a: &SymmetricMatrix) -> (Inertia, bool) {
    let tol = a.default_inertia_tol();
    match a.inertia(tol) {
        Ok(i) => (i, true),
        // treat an eigensolver breakdown as an all-zero signature: it can
        // only lower min_index, which never certifies surjectivity
        Err(_) => (
            Inertia {
                n_plus: 0,
                n_minus: 0,
                n_zero: a.dim(),
                tol,
            },
            false,
        ),
    }
}

fn tolerance_band_note(entries: &[IndexEntry]) -> String {
    let band = entries
        .iter()
        .map(|e| e.inertia.tol)
        .fold(0.0_f64, f64::max);
    format!("eigenvalues within {band:.3e} of zero counted as zero, not negative")
}

/// Signature of the contraction on sampled weighting directions, each
/// paired with its antipode. The direction stream is prefix-stable in
/// `num_directions`, so enlarging the sample only refines the profile and
/// can never raise `min_index`. Entry count rounds up to even.
pub fn index_profile_sampled(f: &VQForm, num_directions: usize, seed: u64) -> IndexProfile {
    let m = f.codomain_dim();
    assert!(
        num_directions >= 2 * m,
        "need at least {} directions",
        2 * m
    );
    let base = num_directions.div_ceil(2);
    let computed = exec::map_indexed(base, |i| {
        let lambda = if i % 2 == 0 {
            low_discrepancy_direction(m, i / 2)
        } else {
            random_unit(m, &mut rng_for(seed, DIRECTION_STREAM, i as u64))
        };
        let opposite: Vec<f64> = lambda.iter().map(|x| -x).collect();
        let (fwd, ok_f) = inertia_or_degenerate(&f.contract(&lambda));
        let (bwd, ok_b) = inertia_or_degenerate(&f.contract(&opposite));
        (
            IndexEntry {
                lambda,
                inertia: fwd,
            },
            IndexEntry {
                lambda: opposite,
                inertia: bwd,
            },
            ok_f && ok_b,
        )
    });
    let mut entries = Vec::with_capacity(2 * base);
    let mut diagnostics = Vec::new();
    for (fwd, bwd, ok) in computed {
        if !ok {
            diagnostics.push(format!(
                "eigensolver failed near lambda = {:?}; entry counted as wholly zero",
                fwd.lambda
            ));
        }
        entries.push(fwd);
        entries.push(bwd);
    }
    diagnostics.push(tolerance_band_note(&entries));
    let min_index = entries.iter().map(|e| e.inertia.n_minus).min().unwrap();
    IndexProfile {
        min_index,
        // the two sampled points +1 and -1 are the entire sphere when m = 1
        exact: m == 1,
        entries,
        diagnostics,
    }
}

fn det(s: &SymmetricMatrix) -> f64 {
    let rows = (0..s.dim()).map(|i| s.row(i).to_vec()).collect();
    linalg::lu_det(&Mat::from_rows(rows))
}

/// Exact minimum index over the weighting circle for m = 2.
///
/// On lambda(theta) = (cos theta, sin theta) the signature changes only
/// where det of the contraction vanishes. With both components scaled to
/// unit norm, those angles come from the real roots of the pencil
/// determinant det(A1_hat + u A2_hat) (theta = atan of a rescaled u, plus
/// the antipode) together with theta = pi/2 when A2 is singular. One
/// signature per open arc plus the singular angles themselves realize the
/// minimum. Degenerate pencils (identically zero determinant, or a zero
/// second component) fall back to a sampled profile with a diagnostic.
pub fn index_profile_exact_m2(f: &VQForm) -> IndexProfile {
    let m = f.codomain_dim();
    assert!(m == 2, "arc sweep requires exactly two components");
    let n = f.domain_dim();
    let a1 = &f.components()[0];
    let a2 = &f.components()[1];
    let f1 = a1.frobenius_norm();
    let f2 = a2.frobenius_norm();
    assert!(f1 > 0.0 || f2 > 0.0, "form must have a nonzero component");

    let fallback = |note: String| {
        let mut p = index_profile_sampled(f, FALLBACK_DIRECTIONS, FALLBACK_SEED);
        p.diagnostics.insert(0, note);
        p
    };
    if f2 == 0.0 {
        return fallback(
            "second component is zero; pencil parametrization degenerate, profile sampled".into(),
        );
    }
    let a1n = a1.scaled(1.0 / f1.max(f64::MIN_POSITIVE));
    let a2n = a2.scaled(1.0 / f2);

    // pencil determinant q(u) = det(A1_hat + u A2_hat) by interpolation at
    // Chebyshev nodes; exact for a polynomial of degree <= n
    let nodes: Vec<f64> = (0..=n)
        .map(|k| 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos())
        .collect();
    let values: Vec<f64> = nodes
        .iter()
        .map(|&u| {
            det(&SymmetricMatrix::scaled_sum(&[a1n.clone(), a2n.clone()], &[1.0, u]).unwrap())
        })
        .collect();
    let degenerate_tol = 1e-10 * 3.0_f64.powi(n as i32);
    if values.iter().all(|v| v.abs() <= degenerate_tol) {
        return fallback("pencil determinant vanishes identically; profile sampled".into());
    }
    let coeffs = poly::interpolate(&nodes, &values);
    let max_coeff = coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    let coeffs = poly::trim(&coeffs, 1e-12 * max_coeff);

    let tau = std::f64::consts::TAU;
    let mut angles: Vec<f64> = Vec::new();
    if coeffs.len() > 1 {
        let bound = poly::cauchy_root_bound(&coeffs) + 1.0;
        for root in poly::real_roots(&coeffs, -bound, bound) {
            let theta = (root.value * f1 / f2).atan();
            angles.push(theta.rem_euclid(tau));
            angles.push((theta + std::f64::consts::PI).rem_euclid(tau));
        }
    }
    // theta = pi/2 is the root at infinity: singular exactly when A2 is
    let a2_eigs = a2n.eigenvalues();
    let a2_singular = match a2_eigs {
        Ok(ref v) => v.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min) <= 1e-9,
        Err(_) => true,
    };
    if a2_singular {
        angles.push(std::f64::consts::FRAC_PI_2);
        angles.push(1.5 * std::f64::consts::PI);
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<f64> = Vec::new();
    for a in angles {
        if merged.last().is_none_or(|&l| a - l > 1e-9) {
            merged.push(a);
        }
    }
    if merged.len() > 1 && merged[0] + tau - merged.last().unwrap() <= 1e-9 {
        merged.pop();
    }

    let mut thetas: Vec<f64> = Vec::new();
    if merged.is_empty() {
        // the signature is constant on the whole circle
        thetas.push(0.0);
        thetas.push(std::f64::consts::PI);
    } else {
        for (i, &start) in merged.iter().enumerate() {
            thetas.push(start);
            let end = if i + 1 < merged.len() {
                merged[i + 1]
            } else {
                merged[0] + tau
            };
            if end - start > 1e-9 {
                thetas.push(((start + end) / 2.0).rem_euclid(tau));
            }
        }
    }
    let mut entries = Vec::with_capacity(thetas.len());
    let mut failures = Vec::new();
    for theta in thetas {
        let lambda = vec![theta.cos(), theta.sin()];
        let (inertia, ok) = inertia_or_degenerate(&f.contract(&lambda));
        if !ok {
            failures.push(format!(
                "eigensolver failed at theta = {theta:.6}; entry counted as wholly zero"
            ));
        }
        entries.push(IndexEntry { lambda, inertia });
    }
    let mut diagnostics = failures;
    diagnostics.push(tolerance_band_note(&entries));
    let min_index = entries.iter().map(|e| e.inertia.n_minus).min().unwrap();
    IndexProfile {
        min_index,
        exact: true,
        entries,
        diagnostics,
    }
}

/// Index criterion: a minimum index of at least m over all weightings
/// forces the map to be onto. Exact profiles certify; sampled profiles
/// only give evidence. The criterion is sufficient, not necessary, so a
/// low minimum decides nothing.
pub fn agrachev_sarychev_test(f: &VQForm, profile: &IndexProfile) -> SurjectivityVerdict {
    let m = f.codomain_dim();
    if profile.min_index >= m {
        let verdict = if profile.exact {
            SurjectivityStatus::SurjectiveCertified
        } else {
            SurjectivityStatus::SurjectiveEvidence
        };
        return SurjectivityVerdict {
            verdict,
            certificate: Some(SurjectivityCertificate::IndexBound {
                min_index: profile.min_index,
                exact: profile.exact,
            }),
            profile: Some(profile.clone()),
            diagnostics: vec![format!(
                "every probed weighting has at least {} negative eigenvalues",
                profile.min_index
            )],
        };
    }
    SurjectivityVerdict {
        verdict: SurjectivityStatus::Indeterminate,
        certificate: None,
        profile: Some(profile.clone()),
        diagnostics: vec![format!(
            "minimum index {} is below the codomain dimension {m}; the criterion is sufficient only",
            profile.min_index
        )],
    }
}

/// A weighting with positive semidefinite contraction confines the image
/// to a halfspace, so the map cannot be onto. Strictly positive smallest
/// eigenvalue (beyond the scale tolerance) certifies; a value inside the
/// tolerance band is downgraded to evidence; none found returns nothing.
pub fn nonsurjectivity_from_semidefiniteness(f: &VQForm) -> Option<SurjectivityVerdict> {
    let opts = ClassifyOptions::default();
    let restarts = opts.restarts.unwrap_or_else(|| 8.max(2 * f.codomain_dim()));
    let (lambda, _) = classify::max_min_eigen_direction(f, opts.budget, restarts, opts.seed);
    let min_eig = f.contract(&lambda).min_eigenvalue().ok()?;
    let tol = classify::definite_tol_for(f);
    if min_eig < -tol {
        return None;
    }
    let certificate = Some(SurjectivityCertificate::PsdDirection {
        lambda: lambda.clone(),
        min_eig,
    });
    if min_eig >= tol {
        Some(SurjectivityVerdict {
            verdict: SurjectivityStatus::NotSurjectiveCertified,
            certificate,
            profile: None,
            diagnostics: vec![format!(
                "contraction at {lambda:?} is positive definite with margin {min_eig:.3e}"
            )],
        })
    } else {
        Some(SurjectivityVerdict {
            verdict: SurjectivityStatus::NotSurjectiveEvidence,
            certificate,
            profile: None,
            diagnostics: vec![format!(
                "smallest contraction eigenvalue {min_eig:.3e} sits inside the tolerance band {tol:.3e}; semidefiniteness is evidence only"
            )],
        })
    }
}

fn sign_pattern_targets(m: usize, limit: usize) -> Vec<Vec<f64>> {
    let count = (1usize << m.min(20)).min(limit);
    let scale = 1.0 / (m as f64).sqrt();
    // last coordinate flips fastest: all-positive first, then (1,..,1,-1)
    (0..count)
        .map(|k| {
            (0..m)
                .map(|i| {
                    if k >> (m - 1 - i) & 1 == 0 {
                        scale
                    } else {
                        -scale
                    }
                })
                .collect()
        })
        .collect()
}

/// Combined pipeline. Precedence: an exact index certificate (m <= 2)
/// decides onto; a strict psd weighting decides not onto; otherwise every
/// unit target is attacked with the preimage solver, and by homogeneity
/// solving all of them is evidence of onto while a target that defeats
/// every start is evidence (with the witness attached) of not onto.
/// Certified branches return before evidence branches, so the grades can
/// never conflict. Targets are the sign-pattern vectors first, then
/// alternating low-discrepancy and seeded random directions.
pub fn surjectivity_probe(
    f: &VQForm,
    num_targets: usize,
    solver_opts: &SolveOptions,
    seed: u64,
) -> SurjectivityVerdict {
    let m = f.codomain_dim();
    assert!(num_targets >= 2 * m, "need at least {} targets", 2 * m);

    let profile = match m {
        1 => index_profile_sampled(f, 2, seed),
        2 => index_profile_exact_m2(f),
        _ => index_profile_sampled(f, num_targets.max(4 * m), seed),
    };
    if profile.exact && profile.min_index >= m {
        return agrachev_sarychev_test(f, &profile);
    }

    let mut diagnostics = Vec::new();
    if let Some(mut verdict) = nonsurjectivity_from_semidefiniteness(f) {
        if verdict.verdict == SurjectivityStatus::NotSurjectiveCertified {
            verdict.profile = Some(profile);
            return verdict;
        }
        // a band-grade psd direction is weaker evidence than the probe
        // outcome below; keep its note and continue
        diagnostics.extend(verdict.diagnostics);
    }

    let mut targets = sign_pattern_targets(m, num_targets);
    let mut ld_index = 0;
    while targets.len() < num_targets {
        let slot = targets.len();
        let t = if slot % 2 == 0 {
            low_discrepancy_direction(m, ld_index)
        } else {
            random_unit(m, &mut rng_for(seed, TARGET_DIR_STREAM, slot as u64))
        };
        if slot % 2 == 0 {
            ld_index += 1;
        }
        targets.push(t);
    }

    let results = exec::map_indexed(targets.len(), |t| {
        let mut opts = solver_opts.clone();
        opts.seed = subseed(seed, TARGET_SOLVE_STREAM, t as u64);
        solve_preimage(f, &targets[t], &opts)
    });
    let solved = results.iter().filter(|r| r.solution.is_some()).count();
    diagnostics.push(format!(
        "{solved} of {} unit targets admit preimages",
        targets.len()
    ));
    if let Some(t) = results.iter().position(|r| r.solution.is_none()) {
        return SurjectivityVerdict {
            verdict: SurjectivityStatus::NotSurjectiveEvidence,
            certificate: Some(SurjectivityCertificate::FailedTarget {
                target: targets[t].clone(),
                best_residual: results[t].residual_norm,
                starts_used: results[t].starts_used,
            }),
            profile: Some(profile),
            diagnostics,
        };
    }
    let certificate = if profile.min_index >= m {
        Some(SurjectivityCertificate::IndexBound {
            min_index: profile.min_index,
            exact: profile.exact,
        })
    } else {
        None
    };
    SurjectivityVerdict {
        verdict: SurjectivityStatus::SurjectiveEvidence,
        certificate,
        profile: Some(profile),
        diagnostics,
    }
}

/// Planar decision: for n = m = 2 the map is onto exactly when zero is
/// interior to the convex hull of its image, so the classification
/// verdict transfers verbatim once its certificate re-verifies.
pub fn dim2_decide(f: &VQForm) -> Result<SurjectivityVerdict> {
    if f.domain_dim() != 2 || f.codomain_dim() != 2 {
        return Err(VqfError::InvalidArgument(format!(
            "planar equivalence needs n = m = 2, got n = {}, m = {}",
            f.domain_dim(),
            f.codomain_dim()
        )));
    }
    let c = classify::classify(f, &ClassifyOptions::default());
    let verified = match &c.certificate {
        Some(cert) => classify::verify_certificate(f, cert)?,
        None => false,
    };
    let mut diagnostics = c.diagnostics.clone();
    let indeterminate = |mut d: Vec<String>, note: &str| {
        d.push(note.into());
        Ok(SurjectivityVerdict {
            verdict: SurjectivityStatus::Indeterminate,
            certificate: None,
            profile: None,
            diagnostics: d,
        })
    };
    match (c.verdict, c.certificate) {
        (Verdict::Indefinite, Some(Certificate::InteriorWitness { points, weights }))
            if verified =>
        {
            diagnostics
                .push("zero interior to the image hull; onto by the planar equivalence".into());
            Ok(SurjectivityVerdict {
                verdict: SurjectivityStatus::SurjectiveCertified,
                certificate: Some(SurjectivityCertificate::InteriorWitness { points, weights }),
                profile: None,
                diagnostics,
            })
        }
        (Verdict::Definite, Some(Certificate::DefiniteDirection { lambda, margin }))
            if verified =>
        {
            diagnostics.push("definite weighting found; image confined to a halfspace".into());
            Ok(SurjectivityVerdict {
                verdict: SurjectivityStatus::NotSurjectiveCertified,
                certificate: Some(SurjectivityCertificate::PsdDirection {
                    lambda,
                    min_eig: margin,
                }),
                profile: None,
                diagnostics,
            })
        }
        (Verdict::SemidefiniteBoundary, Some(Certificate::PsdDirection { lambda, min_eig }))
            if verified =>
        {
            diagnostics.push("semidefinite weighting found; image confined to a halfspace".into());
            Ok(SurjectivityVerdict {
                verdict: SurjectivityStatus::NotSurjectiveCertified,
                certificate: Some(SurjectivityCertificate::PsdDirection { lambda, min_eig }),
                profile: None,
                diagnostics,
            })
        }
        _ => indeterminate(diagnostics, "classification inconclusive or unverifiable"),
    }
}

/// Searches for a nontrivial zero: a unit u with Q(u) = 0. Restriction to
/// the sphere excludes the trivial zero at the origin; homogeneity then
/// covers the whole ray. Returns a verified unit vector or nothing
/// (absence of a zero is not certified).
pub fn kernel_probe(f: &VQForm, solver_opts: &SolveOptions) -> Option<Vec<f64>> {
    solver_opts.validate();
    let n = f.domain_dim();
    let tol = solver_opts.residual_tol * (1.0 + f.scale());
    let runs = exec::map_indexed(solver_opts.restarts, |s| {
        let u0 = random_unit(n, &mut rng_for(solver_opts.seed, KERNEL_STREAM, s as u64));
        sphere_zero_run(f, u0, solver_opts, tol)
    });
    runs.into_iter()
        .find(|(_, residual)| *residual <= tol)
        .map(|(u, _)| u)
}

/// Damped Gauss-Newton for Q(u) = 0 with u retracted to the unit sphere
/// after every step; Jacobian rows are projected tangent so the step does
/// not fight the retraction.
fn sphere_zero_run(f: &VQForm, mut u: Vec<f64>, opts: &SolveOptions, tol: f64) -> (Vec<f64>, f64) {
    let n = f.domain_dim();
    let m = f.codomain_dim();
    let mut best = linalg::norm(&f.evaluate(&u));
    let mut mu = opts.damping_init;
    for _ in 0..opts.max_iters {
        if best <= tol {
            break;
        }
        let jac = f.jacobian(&u);
        let mut rows = Vec::with_capacity(m);
        for i in 0..m {
            let row = jac.row(i);
            let along = linalg::dot(row, &u);
            rows.push((0..n).map(|j| row[j] - along * u[j]).collect::<Vec<f64>>());
        }
        let jp = Mat::from_rows(rows);
        let r = f.evaluate(&u);
        let mut lhs = jp.gram();
        for i in 0..n {
            let d = lhs.get(i, i) + mu;
            lhs.set(i, i, d);
        }
        let rhs = linalg::scale(&jp.matvec_t(&r), -1.0);
        let Some(step) = linalg::cholesky_solve(&lhs, &rhs) else {
            mu *= 4.0;
            if mu > 1e16 {
                break;
            }
            continue;
        };
        let mut trial: Vec<f64> = u.iter().zip(&step).map(|(a, b)| a + b).collect();
        if linalg::normalize(&mut trial) == 0.0 {
            mu *= 4.0;
            continue;
        }
        let trial_norm = linalg::norm(&f.evaluate(&trial));
        if trial_norm < best {
            u = trial;
            best = trial_norm;
            mu = (mu * 0.5).max(1e-14);
        } else {
            mu *= 4.0;
            if mu > 1e16 {
                break;
            }
        }
    }
    (u, best)
}
