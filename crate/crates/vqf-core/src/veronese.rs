//! The rank-one cone picture behind every quadratic map.
//!
//! Q factors through pi(x) = x x^T: the nonlinear part of Q is entirely
//! the map onto the cone K of rank-one positive semidefinite matrices,
//! followed by the linear functional tr(A_i . ). Whitening the Gram matrix
//! of the components turns that linear part into an orthogonal projection
//! onto an m-dimensional subspace of symmetric matrices, so the image of Q
//! is exactly the shadow of K on that subspace. [`reduction_check`] tests
//! this identity numerically; the rest of the module exposes the pieces.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VqfError};
use crate::form::VQForm;
use crate::linalg;
use crate::sphere::{random_unit, rng_for};
use crate::sym::{frobenius, SymmetricMatrix};

const SAMPLE_STREAM: u64 = 0x7665_726f;

/// The rank-one matrix x x^T.
pub fn pi(x: &[f64]) -> SymmetricMatrix {
    SymmetricMatrix::outer(x)
}

/// Membership in the rank-one psd cone: all but the top eigenvalue are
/// negligible and nothing is appreciably negative. An eigensolver failure
/// counts as non-membership.
pub fn in_cone(s: &SymmetricMatrix, tol: f64) -> bool {
    let Ok(vals) = s.eigenvalues() else {
        return false;
    };
    let n = vals.len();
    if vals[0] < -tol {
        return false;
    }
    if n == 1 {
        return true;
    }
    // eigenvalues are ascending; the runner-up magnitude is either the
    // second-largest positive one or the most negative one
    let second = vals[n - 2].abs().max(vals[0].abs());
    second <= tol * (1.0 + s.frobenius_norm())
}

/// The linear map on symmetric matrices that extends Q through pi:
/// component i is tr(A_i S), so applying it to pi(x) recovers Q(x).
pub fn induced_linear_map(f: &VQForm, s: &SymmetricMatrix) -> Result<Vec<f64>> {
    f.components().iter().map(|ai| frobenius(ai, s)).collect()
}

/// Adjoint of [`induced_linear_map`] under the trace inner product: the
/// weighting lambda goes to its contraction.
pub fn adjoint_embed(f: &VQForm, lambda: &[f64]) -> SymmetricMatrix {
    f.contract(lambda)
}

/// Whitened embedding of the component span into symmetric matrices.
#[derive(Debug, Clone)]
pub struct EmbeddingData {
    pub form: VQForm,
    /// Gram matrix G with G_ij = tr(A_i A_j).
    pub gram: SymmetricMatrix,
    /// W = G^(-1/2).
    pub whitener: SymmetricMatrix,
    /// Orthonormal basis E_k = sum_i W_ki A_i of the component span.
    pub basis: Vec<SymmetricMatrix>,
}

/// Builds the whitened embedding. Fails when the components are linearly
/// dependent; the error carries the offending combination.
pub fn build_embedding(f: &VQForm) -> Result<EmbeddingData> {
    let m = f.codomain_dim();
    let gram = f.gram();
    let eig = gram.eigen()?;
    let floor = 1e-12 * (1.0 + eig.values[m - 1].abs());
    if eig.values[0] <= floor {
        return Err(VqfError::SingularGram {
            null_combination: eig.vectors[0].clone(),
        });
    }
    // W = V D^(-1/2) V^T
    let mut whitener = SymmetricMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let mut acc = 0.0;
            for k in 0..m {
                acc += eig.vectors[k][i] * eig.vectors[k][j] / eig.values[k].sqrt();
            }
            whitener.set_sym(i, j, acc);
        }
    }
    let basis = (0..m).map(|k| f.contract(whitener.row(k))).collect();
    Ok(EmbeddingData {
        form: f.clone(),
        gram,
        whitener,
        basis,
    })
}

/// Orthogonal projection onto the whitened component span; returns the
/// projected matrix and its coordinates in the orthonormal basis.
pub fn project_onto_lb(
    e: &EmbeddingData,
    s: &SymmetricMatrix,
) -> Result<(SymmetricMatrix, Vec<f64>)> {
    let coords: Vec<f64> = e
        .basis
        .iter()
        .map(|ek| frobenius(ek, s))
        .collect::<Result<_>>()?;
    let projection = SymmetricMatrix::scaled_sum(&e.basis, &coords)?;
    Ok((projection, coords))
}

/// Splits S into its multiple of the identity and the traceless rest; the
/// parts are Frobenius-orthogonal and sum back to S exactly.
pub fn identity_traceless_split(s: &SymmetricMatrix) -> (SymmetricMatrix, SymmetricMatrix) {
    let n = s.dim();
    let trace_part = SymmetricMatrix::identity(n).scaled(s.trace() / n as f64);
    let traceless = SymmetricMatrix::scaled_sum(&[s.clone(), trace_part.clone()], &[1.0, -1.0])
        .expect("same dimension");
    (trace_part, traceless)
}

/// Angle between pi(x) and the identity matrix under the trace inner
/// product. Constant over nonzero x: every ray of the rank-one cone makes
/// the same angle arccos(1/sqrt(n)) with the identity.
pub fn cone_angle_with_identity(x: &[f64]) -> Result<f64> {
    if x.iter().all(|&v| v == 0.0) {
        return Err(VqfError::InvalidArgument(
            "the cone vertex has no angle with the identity".into(),
        ));
    }
    let p = pi(x);
    let n = x.len();
    let id = SymmetricMatrix::identity(n);
    let cos = frobenius(&p, &id)? / (p.frobenius_norm() * id.frobenius_norm());
    Ok(cos.clamp(-1.0, 1.0).acos())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub samples: usize,
    /// Sample with the largest deviation.
    pub worst_x: Vec<f64>,
}

/// Checks, on sphere samples, that projecting pi(x) onto the whitened span
/// has coordinates W * Q(x): the image of Q is the projection of the
/// rank-one cone. Deviations mean an implementation bug, not bad luck.
pub fn reduction_check(f: &VQForm, num_samples: usize, seed: u64) -> Result<ReductionReport> {
    let e = build_embedding(f)?;
    let n = f.domain_dim();
    let tolerance = 1e-9;
    let mut max_deviation = 0.0_f64;
    let mut worst_x = vec![0.0; n];
    for i in 0..num_samples {
        let x = random_unit(n, &mut rng_for(seed, SAMPLE_STREAM, i as u64));
        let (_, coords) = project_onto_lb(&e, &pi(&x))?;
        let expected = e.whitener.matvec(&f.evaluate(&x));
        let dev = linalg::norm(&linalg::sub(&coords, &expected));
        if dev > max_deviation {
            max_deviation = dev;
            worst_x = x;
        }
    }
    Ok(ReductionReport {
        passed: max_deviation <= tolerance,
        max_deviation,
        tolerance,
        samples: num_samples,
        worst_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::{coordinate_products, planar_squares};

    fn diag_pair() -> VQForm {
        VQForm::new(vec![
            SymmetricMatrix::diagonal(&[1.0, 0.0]),
            SymmetricMatrix::diagonal(&[0.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn rank_one_matrices_from_points() {
        let p = pi(&[1.0, 0.0, 0.0]);
        assert_eq!(p, SymmetricMatrix::diagonal(&[1.0, 0.0, 0.0]));
        let q = pi(&[1.0, 1.0]);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(q.get(i, j), 1.0);
            }
        }
    }

    #[test]
    fn cone_membership() {
        let x = [0.3, -1.2, 0.5, 2.0];
        assert!(in_cone(&pi(&x), 1e-10));
        assert!(!in_cone(&SymmetricMatrix::identity(2), 1e-10));
        assert!(!in_cone(&pi(&x).scaled(-1.0), 1e-10));
    }

    #[test]
    fn induced_map_extends_the_form() {
        let f = planar_squares();
        let out = induced_linear_map(&f, &pi(&[1.0, 1.0])).unwrap();
        assert!((out[0]).abs() < 1e-14);
        assert!((out[1] - 1.0).abs() < 1e-14);

        let g = coordinate_products();
        let traces = induced_linear_map(&g, &SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(traces, vec![0.0, 0.0, 0.0]);
        let zeros = induced_linear_map(&g, &SymmetricMatrix::zeros(3)).unwrap();
        assert_eq!(zeros, vec![0.0, 0.0, 0.0]);

        for i in 0..8u64 {
            let x = random_unit(3, &mut rng_for(3, 1, i));
            let through_cone = induced_linear_map(&g, &pi(&x)).unwrap();
            let direct = g.evaluate(&x);
            for k in 0..3 {
                assert!((through_cone[k] - direct[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_identity_holds() {
        let f = coordinate_products();
        assert_eq!(adjoint_embed(&f, &[1.0, 0.0, 0.0]), f.components()[0]);
        for i in 0..50u64 {
            let lambda = random_unit(3, &mut rng_for(5, 2, i));
            let x = random_unit(3, &mut rng_for(5, 3, i));
            let s = pi(&x);
            let lhs = frobenius(&adjoint_embed(&f, &lambda), &s).unwrap();
            let rhs = linalg::dot(&lambda, &induced_linear_map(&f, &s).unwrap());
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn embedding_of_the_axis_pair_is_trivial() {
        let e = build_embedding(&diag_pair()).unwrap();
        assert_eq!(e.gram, SymmetricMatrix::identity(2));
        assert_eq!(e.basis[0], diag_pair().components()[0]);
        assert_eq!(e.basis[1], diag_pair().components()[1]);
    }

    #[test]
    fn embedding_whitens_the_planar_pair() {
        // gram = diag(2, 1/2), so E_1 = A_1/sqrt(2) and E_2 = sqrt(2) A_2
        let f = planar_squares();
        let e = build_embedding(&f).unwrap();
        assert!((e.gram.get(0, 0) - 2.0).abs() < 1e-14);
        assert!((e.gram.get(1, 1) - 0.5).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.basis[0].get(0, 0) - s).abs() < 1e-12);
        assert!((e.basis[1].get(0, 1) - s).abs() < 1e-12);
        for k in 0..2 {
            for l in 0..2 {
                let want = if k == l { 1.0 } else { 0.0 };
                let got = frobenius(&e.basis[k], &e.basis[l]).unwrap();
                assert!((got - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dependent_components_yield_the_null_combination() {
        let a = SymmetricMatrix::diagonal(&[1.0, -1.0]);
        let f = VQForm::new(vec![a.clone(), a]).unwrap();
        let err = build_embedding(&f).unwrap_err();
        let VqfError::SingularGram { null_combination } = err else {
            panic!("expected singular gram");
        };
        // null vector proportional to (1, -1)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((null_combination[0].abs() - s).abs() < 1e-8);
        assert!((null_combination[0] + null_combination[1]).abs() < 1e-8);
    }

    #[test]
    fn projection_restricted_to_the_span_is_identity() {
        let e = build_embedding(&coordinate_products()).unwrap();
        let s = SymmetricMatrix::scaled_sum(&e.basis, &[0.3, -1.1, 0.7]).unwrap();
        let (p, coords) = project_onto_lb(&e, &s).unwrap();
        assert!((coords[0] - 0.3).abs() < 1e-10);
        assert!((coords[1] + 1.1).abs() < 1e-10);
        assert!((coords[2] - 0.7).abs() < 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                assert!((p.get(i, j) - s.get(i, j)).abs() < 1e-10);
            }
        }
        // the identity is trace-orthogonal to all three products
        let (z, zc) = project_onto_lb(&e, &SymmetricMatrix::identity(3)).unwrap();
        assert!(zc.iter().all(|c| c.abs() < 1e-12));
        assert!(z.frobenius_norm() < 1e-12);
    }

    #[test]
    fn projection_contracts_and_is_self_adjoint() {
        let e = build_embedding(&planar_squares()).unwrap();
        for i in 0..10u64 {
            let x = random_unit(2, &mut rng_for(8, 4, i));
            let y = random_unit(2, &mut rng_for(8, 5, i));
            let s = pi(&x);
            let t = pi(&y);
            let (ps, _) = project_onto_lb(&e, &s).unwrap();
            let (pt, _) = project_onto_lb(&e, &t).unwrap();
            assert!(ps.frobenius_norm() <= s.frobenius_norm() + 1e-12);
            let a = frobenius(&ps, &t).unwrap();
            let b = frobenius(&s, &pt).unwrap();
            assert!((a - b).abs() < 1e-10);
            // idempotence
            let (pps, _) = project_onto_lb(&e, &ps).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    assert!((pps.get(r, c) - ps.get(r, c)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn split_into_trace_and_traceless_parts() {
        let id = SymmetricMatrix::identity(3);
        let (tp, tl) = identity_traceless_split(&id);
        assert_eq!(tp, id);
        assert!(tl.frobenius_norm() == 0.0);

        let x = [1.0, -2.0, 0.5];
        let (tp, tl) = identity_traceless_split(&pi(&x));
        let norm_sq: f64 = x.iter().map(|v| v * v).sum();
        assert!((tp.get(0, 0) - norm_sq / 3.0).abs() < 1e-14);
        assert!(tl.trace().abs() < 1e-12);
        assert!(frobenius(&tp, &tl).unwrap().abs() < 1e-12);
        // parts sum back exactly
        let back = SymmetricMatrix::scaled_sum(&[tp, tl], &[1.0, 1.0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(back.get(i, j), pi(&x).get(i, j));
            }
        }
    }

    #[test]
    fn cone_angle_is_constant_and_matches_arccos_inv_sqrt_n() {
        assert!((cone_angle_with_identity(&[2.5]).unwrap()).abs() < 1e-12);
        let a2 = cone_angle_with_identity(&[1.0, 0.0]).unwrap();
        assert!((a2 - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        for n in 2..=8 {
            let expect = (1.0 / (n as f64).sqrt()).acos();
            for i in 0..100u64 {
                let x = random_unit(n, &mut rng_for(13, n as u64, i));
                let a = cone_angle_with_identity(&x).unwrap();
                assert!((a - expect).abs() < 1e-10, "n={n} angle {a}");
            }
        }
        // n = 4 has cosine exactly 1/2
        let a4 = cone_angle_with_identity(&[0.3, 1.0, -0.2, 0.7]).unwrap();
        assert!((a4.cos() - 0.5).abs() < 1e-12);
        assert!(cone_angle_with_identity(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn reduction_identity_on_the_named_forms() {
        for f in [planar_squares(), coordinate_products(), diag_pair()] {
            let report = reduction_check(&f, 200, 17).unwrap();
            assert!(report.passed, "max deviation {}", report.max_deviation);
            assert!(report.max_deviation <= 1e-10);
        }
    }
}
