//! Analysis pipelines and the report document they produce.
//!
//! A report carries everything needed to re-check its own claims offline:
//! the input digest, every verdict with its full numeric certificate, the
//! tolerances and seeds in force, and the work budgets spent.
//! [`verify_report`] re-runs the independent checks.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use vqf_core::classify::{
    self, BudgetReport, Certificate, ClassifyOptions, Verdict, WitnessSampler,
};
use vqf_core::linalg;
use vqf_core::preimage::{solve_preimage, verify_preimage, SolveOptions};
use vqf_core::surjectivity::{self, IndexProfile, SurjectivityCertificate, SurjectivityStatus};
use vqf_core::veronese;
use vqf_core::{VQForm, VqfError};

use crate::doc::{digest, DocError, FormDocument, FormMetadata};

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub seed: u64,
    /// Ascent and solver restarts; None keeps each module's default.
    pub restarts: Option<usize>,
    /// Witness sample budget for the interior search.
    pub samples: usize,
    /// Override for the definiteness margin.
    pub definite_tol: Option<f64>,
    /// Demand the exact index sweep (m = 2 only) and fail if it degrades.
    pub exact: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            seed: 0,
            restarts: None,
            samples: 128,
            definite_tol: None,
            exact: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSection {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub definite_tol: f64,
    pub weight_tol: f64,
    pub seed: u64,
    pub budget: BudgetReport,
    pub diagnostics: Vec<String>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurjectivitySection {
    pub verdict: SurjectivityStatus,
    pub certificate: Option<SurjectivityCertificate>,
    pub profile: Option<IndexProfile>,
    /// Unit vector with Q(u) = 0 when the zero search succeeded.
    pub nontrivial_zero: Option<Vec<f64>>,
    pub num_targets: usize,
    pub residual_tol: f64,
    pub seed: u64,
    pub diagnostics: Vec<String>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageSection {
    pub target: Vec<f64>,
    pub solution: Option<Vec<f64>>,
    pub residual_norm: f64,
    pub residual_tol: f64,
    pub starts_used: usize,
    pub trace: Vec<f64>,
    pub seed: u64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VeroneseSection {
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub worst_x: Vec<f64>,
    pub seed: u64,
    /// Reason the check could not run (dependent components).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub input_digest: String,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<FormMetadata>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surjectivity: Option<SurjectivitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preimage: Option<PreimageSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub veronese: Option<VeroneseSection>,
    pub wall_time_ms: f64,
}

impl ReportDocument {
    fn shell(doc: &FormDocument) -> Self {
        ReportDocument {
            schema_version: crate::doc::SCHEMA_VERSION.to_string(),
            input_digest: digest(doc),
            n: doc.n,
            m: doc.m,
            metadata: doc.metadata.clone(),
            classification: None,
            surjectivity: None,
            preimage: None,
            veronese: None,
            wall_time_ms: 0.0,
        }
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn classify_options(opts: &AnalyzeOptions) -> ClassifyOptions {
    ClassifyOptions {
        restarts: opts.restarts,
        max_samples: opts.samples,
        seed: opts.seed,
        definite_tol: opts.definite_tol,
        sampler: WitnessSampler::Random,
        ..ClassifyOptions::default()
    }
}

fn solver_options(seed: u64, restarts: Option<usize>) -> SolveOptions {
    let mut s = SolveOptions {
        seed,
        ..SolveOptions::default()
    };
    if let Some(r) = restarts {
        s.restarts = r;
    }
    s
}

/// Full pipeline: classification, then surjectivity (the planar
/// equivalence decides n = m = 2 inputs, probing handles the rest), the
/// nontrivial-zero search, and the rank-one reduction identity check.
pub fn analyze(doc: &FormDocument, opts: &AnalyzeOptions) -> Result<ReportDocument, DocError> {
    let f = doc.to_form()?;
    let m = f.codomain_dim();
    if opts.exact && m != 2 {
        return Err(DocError::Schema(format!(
            "--exact demands the m = 2 index sweep, but this form has m = {m}"
        )));
    }
    let total = Instant::now();
    let mut report = ReportDocument::shell(doc);

    let t = Instant::now();
    let copts = classify_options(opts);
    let c = classify::classify(&f, &copts);
    report.classification = Some(ClassificationSection {
        verdict: c.verdict,
        certificate: c.certificate,
        definite_tol: copts
            .definite_tol
            .unwrap_or_else(|| classify::definite_tol_for(&f)),
        weight_tol: copts.weight_tol,
        seed: opts.seed,
        budget: c.budget,
        diagnostics: c.diagnostics,
        wall_time_ms: ms(t),
    });

    let t = Instant::now();
    let sopts = solver_options(opts.seed, opts.restarts);
    let num_targets = (2 * m).max(16);
    let mut diagnostics = Vec::new();
    let mut verdict = if f.domain_dim() == 2 && m == 2 {
        let d = surjectivity::dim2_decide(&f)?;
        if d.verdict == SurjectivityStatus::Indeterminate {
            diagnostics.push("planar equivalence inconclusive; falling back to probing".into());
            surjectivity::surjectivity_probe(&f, num_targets, &sopts, opts.seed)
        } else {
            diagnostics.push("verdict decided by the planar equivalence".into());
            d
        }
    } else {
        surjectivity::surjectivity_probe(&f, num_targets, &sopts, opts.seed)
    };
    if verdict.profile.is_none() && m == 2 {
        verdict.profile = Some(surjectivity::index_profile_exact_m2(&f));
    }
    if opts.exact && !verdict.profile.as_ref().is_some_and(|p| p.exact) {
        return Err(DocError::Schema(
            "--exact was given but the index sweep degraded to sampling".into(),
        ));
    }
    diagnostics.extend(verdict.diagnostics);
    let zero = surjectivity::kernel_probe(&f, &sopts);
    report.surjectivity = Some(SurjectivitySection {
        verdict: verdict.verdict,
        certificate: verdict.certificate,
        profile: verdict.profile,
        nontrivial_zero: zero,
        num_targets,
        residual_tol: sopts.residual_tol,
        seed: opts.seed,
        diagnostics,
        wall_time_ms: ms(t),
    });

    let t = Instant::now();
    report.veronese = Some(match veronese::reduction_check(&f, 400, opts.seed) {
        Ok(r) => VeroneseSection {
            passed: r.passed,
            max_deviation: r.max_deviation,
            tolerance: r.tolerance,
            samples: r.samples,
            worst_x: r.worst_x,
            seed: opts.seed,
            skipped: None,
            wall_time_ms: ms(t),
        },
        Err(VqfError::SingularGram { null_combination }) => VeroneseSection {
            passed: false,
            max_deviation: f64::NAN,
            tolerance: 1e-9,
            samples: 0,
            worst_x: Vec::new(),
            seed: opts.seed,
            skipped: Some(format!(
                "components linearly dependent (null combination {null_combination:?}); no embedding"
            )),
            wall_time_ms: ms(t),
        },
        Err(e) => return Err(e.into()),
    });

    report.wall_time_ms = ms(total);
    Ok(report)
}

/// Solve Q(u) = v for one explicit target.
pub fn preimage_report(
    doc: &FormDocument,
    target: &[f64],
    seed: u64,
    restarts: Option<usize>,
    residual_tol: Option<f64>,
) -> Result<ReportDocument, DocError> {
    let f = doc.to_form()?;
    if target.len() != f.codomain_dim() {
        return Err(DocError::Schema(format!(
            "target has {} components but m = {}",
            target.len(),
            f.codomain_dim()
        )));
    }
    let total = Instant::now();
    let mut opts = solver_options(seed, restarts);
    if let Some(tol) = residual_tol {
        opts.residual_tol = tol;
    }
    let result = solve_preimage(&f, target, &opts);
    let mut report = ReportDocument::shell(doc);
    report.preimage = Some(PreimageSection {
        target: target.to_vec(),
        solution: result.solution,
        residual_norm: result.residual_norm,
        residual_tol: opts.residual_tol * (1.0 + linalg::norm(target)),
        starts_used: result.starts_used,
        trace: result.trace,
        seed,
        wall_time_ms: ms(total),
    });
    report.wall_time_ms = ms(total);
    Ok(report)
}

/// Standalone rank-one reduction check; dependent components are an input
/// error here, unlike in `analyze` where the section is merely skipped.
pub fn veronese_report(
    doc: &FormDocument,
    samples: usize,
    seed: u64,
) -> Result<ReportDocument, DocError> {
    let f = doc.to_form()?;
    let total = Instant::now();
    let r = veronese::reduction_check(&f, samples, seed)?;
    let mut report = ReportDocument::shell(doc);
    report.veronese = Some(VeroneseSection {
        passed: r.passed,
        max_deviation: r.max_deviation,
        tolerance: r.tolerance,
        samples: r.samples,
        worst_x: r.worst_x,
        seed,
        skipped: None,
        wall_time_ms: ms(total),
    });
    report.wall_time_ms = ms(total);
    Ok(report)
}

/// Exit status encodes the verdict alone: 0 determinate, 2 indeterminate
/// (or a failed identity check), 3 when a requested preimage was not
/// found. Input and usage errors exit 1 before a report exists.
pub fn exit_code(report: &ReportDocument) -> i32 {
    if let Some(p) = &report.preimage {
        return if p.solution.is_some() { 0 } else { 3 };
    }
    if report.classification.is_none() && report.surjectivity.is_none() {
        if let Some(v) = &report.veronese {
            return if v.passed { 0 } else { 2 };
        }
    }
    let class_open = report
        .classification
        .as_ref()
        .is_some_and(|c| c.verdict == Verdict::Indeterminate);
    let surj_open = report
        .surjectivity
        .as_ref()
        .is_some_and(|s| s.verdict == SurjectivityStatus::Indeterminate);
    if class_open || surj_open {
        2
    } else {
        0
    }
}

/// Re-checks every certificate a report carries against the form itself.
pub fn verify_report(f: &VQForm, report: &ReportDocument) -> vqf_core::Result<bool> {
    if let Some(c) = &report.classification {
        if let Some(cert) = &c.certificate {
            if !classify::verify_certificate(f, cert)? {
                return Ok(false);
            }
        }
    }
    if let Some(s) = &report.surjectivity {
        match &s.certificate {
            Some(SurjectivityCertificate::PsdDirection { lambda, min_eig }) => {
                let cert = Certificate::PsdDirection {
                    lambda: lambda.clone(),
                    min_eig: *min_eig,
                };
                if !classify::verify_certificate(f, &cert)? {
                    return Ok(false);
                }
            }
            Some(SurjectivityCertificate::InteriorWitness { points, weights }) => {
                let cert = Certificate::InteriorWitness {
                    points: points.clone(),
                    weights: weights.clone(),
                };
                if !classify::verify_certificate(f, &cert)? {
                    return Ok(false);
                }
            }
            Some(SurjectivityCertificate::IndexBound { min_index, exact }) => {
                let m = f.codomain_dim();
                let recomputed = match (m, exact) {
                    (1, _) => Some(surjectivity::index_profile_sampled(f, 2, s.seed)),
                    (2, true) => Some(surjectivity::index_profile_exact_m2(f)),
                    _ => None,
                };
                if let Some(p) = recomputed {
                    if p.min_index != *min_index {
                        return Ok(false);
                    }
                }
            }
            Some(SurjectivityCertificate::FailedTarget { target, .. }) => {
                if target.len() != f.codomain_dim() || (linalg::norm(target) - 1.0).abs() > 1e-6 {
                    return Ok(false);
                }
            }
            None => {}
        }
        if let Some(zero) = &s.nontrivial_zero {
            let origin = vec![0.0; f.codomain_dim()];
            let tol = s.residual_tol * (1.0 + f.scale());
            if (linalg::norm(zero) - 1.0).abs() > 1e-6 || !verify_preimage(f, zero, &origin, tol) {
                return Ok(false);
            }
        }
    }
    if let Some(p) = &report.preimage {
        if let Some(sol) = &p.solution {
            if !verify_preimage(f, sol, &p.target, p.residual_tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Human-readable rendering of a report.
pub fn render_text(report: &ReportDocument) -> String {
    let mut out = String::new();
    let name = report
        .metadata
        .as_ref()
        .and_then(|m| m.name.as_deref())
        .unwrap_or("unnamed form");
    out.push_str(&format!(
        "{name}: n = {}, m = {}\n{}\n",
        report.n, report.m, report.input_digest
    ));
    if let Some(c) = &report.classification {
        out.push_str(&format!("classification: {:?}\n", c.verdict));
        match &c.certificate {
            Some(Certificate::DefiniteDirection { lambda, margin }) => out.push_str(&format!(
                "  definite along {} (margin {margin:.3e})\n",
                fmt_vec(lambda)
            )),
            Some(Certificate::PsdDirection { lambda, min_eig }) => out.push_str(&format!(
                "  semidefinite along {} (smallest eigenvalue {min_eig:.3e})\n",
                fmt_vec(lambda)
            )),
            Some(Certificate::InteriorWitness { points, weights }) => out.push_str(&format!(
                "  zero is a convex combination of {} image points (weights sum {:.6})\n",
                points.len(),
                weights.iter().sum::<f64>()
            )),
            None => {}
        }
        out.push_str(&format!(
            "  tolerance {:.3e}, seed {}, {} ascent steps, {} witness samples\n",
            c.definite_tol, c.seed, c.budget.ascent_iterations, c.budget.witness_samples
        ));
    }
    if let Some(s) = &report.surjectivity {
        out.push_str(&format!("surjectivity: {:?}\n", s.verdict));
        match &s.certificate {
            Some(SurjectivityCertificate::IndexBound { min_index, exact }) => {
                out.push_str(&format!(
                    "  minimum index {min_index} ({})\n",
                    if *exact { "exact sweep" } else { "sampled" }
                ));
            }
            Some(SurjectivityCertificate::PsdDirection { lambda, min_eig }) => {
                out.push_str(&format!(
                    "  image confined to the halfspace of {} (smallest eigenvalue {min_eig:.3e})\n",
                    fmt_vec(lambda)
                ));
            }
            Some(SurjectivityCertificate::InteriorWitness { points, .. }) => {
                out.push_str(&format!(
                    "  planar equivalence with a {}-point interior witness\n",
                    points.len()
                ));
            }
            Some(SurjectivityCertificate::FailedTarget {
                target,
                best_residual,
                starts_used,
            }) => {
                out.push_str(&format!(
                    "  failed target {} (best residual {best_residual:.3e} over {starts_used} starts)\n",
                    fmt_vec(target)
                ));
            }
            None => {}
        }
        if let Some(p) = &s.profile {
            out.push_str(&format!(
                "  index profile: minimum {} over {} weightings ({})\n",
                p.min_index,
                p.entries.len(),
                if p.exact { "exact" } else { "sampled" }
            ));
        }
        match &s.nontrivial_zero {
            Some(z) => out.push_str(&format!("  nontrivial zero at {}\n", fmt_vec(z))),
            None => out.push_str("  no nontrivial zero found\n"),
        }
    }
    if let Some(p) = &report.preimage {
        out.push_str(&format!("preimage of {}\n", fmt_vec(&p.target)));
        match &p.solution {
            Some(u) => out.push_str(&format!(
                "  solution {} with residual {:.3e} (tolerance {:.3e})\n",
                fmt_vec(u),
                p.residual_norm,
                p.residual_tol
            )),
            None => out.push_str(&format!(
                "  no solution found: best residual {:.3e} over {} starts\n",
                p.residual_norm, p.starts_used
            )),
        }
    }
    if let Some(v) = &report.veronese {
        match &v.skipped {
            Some(reason) => out.push_str(&format!("reduction check skipped: {reason}\n")),
            None => out.push_str(&format!(
                "reduction identity: max deviation {:.3e} over {} samples (tolerance {:.3e}) -> {}\n",
                v.max_deviation,
                v.samples,
                v.tolerance,
                if v.passed { "passed" } else { "FAILED" }
            )),
        }
    }
    out.push_str(&format!("total {:.1} ms\n", report.wall_time_ms));
    out
}
