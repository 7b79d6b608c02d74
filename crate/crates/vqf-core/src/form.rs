//! Vector-valued quadratic forms.
//!
//! A form is a list of m symmetric n x n coefficient matrices A_1..A_m;
//! it maps u in R^n to (u^T A_1 u, ..., u^T A_m u) in R^m. Cross terms
//! live in the off-diagonal entries: the component x*y corresponds to a
//! matrix with 1/2 at (0,1) and (1,0).

use crate::error::{Result, VqfError};
use crate::linalg::Mat;
use crate::sym::{frobenius, SymmetricMatrix};

/// Quadratic map R^n -> R^m given by coefficient matrices.
#[derive(Debug, Clone)]
pub struct VQForm {
    n: usize,
    mats: Vec<SymmetricMatrix>,
}

impl VQForm {
    /// Wraps coefficient matrices; all must share one dimension.
    pub fn new(mats: Vec<SymmetricMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(VqfError::InvalidArgument(
                "a form needs at least one component matrix".into(),
            ));
        }
        let n = mats[0].dim();
        for (i, mat) in mats.iter().enumerate() {
            if mat.dim() != n {
                return Err(VqfError::DimensionMismatch {
                    context: "component matrix dimension",
                    expected: n,
                    got: mat.dim(),
                });
            }
            let _ = i;
        }
        Ok(VQForm { n, mats })
    }

    /// Domain dimension n.
    #[inline]
    pub fn domain_dim(&self) -> usize {
        self.n
    }

    /// Codomain dimension m.
    #[inline]
    pub fn codomain_dim(&self) -> usize {
        self.mats.len()
    }

    #[inline]
    pub fn components(&self) -> &[SymmetricMatrix] {
        &self.mats
    }

    /// Q(u) = (u^T A_i u)_i. Panics if `u` has the wrong length.
    pub fn evaluate(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.n, "evaluate: argument dimension");
        self.mats.iter().map(|a| a.quad(u)).collect()
    }

    /// The symmetric bilinear map B(u, w) = (u^T A_i w)_i.
    pub fn bilinear(&self, u: &[f64], w: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.n, "bilinear: first argument dimension");
        assert_eq!(w.len(), self.n, "bilinear: second argument dimension");
        self.mats.iter().map(|a| a.bilinear(u, w)).collect()
    }

    /// The contraction sum_i lambda_i A_i, an n x n symmetric matrix.
    pub fn contract(&self, lambda: &[f64]) -> SymmetricMatrix {
        assert_eq!(lambda.len(), self.mats.len(), "contract: weight dimension");
        SymmetricMatrix::scaled_sum(&self.mats, lambda).expect("dimensions checked at construction")
    }

    /// Jacobian of Q at u: the m x n matrix with row i equal to 2 A_i u.
    pub fn jacobian(&self, u: &[f64]) -> Mat {
        assert_eq!(u.len(), self.n, "jacobian: argument dimension");
        let mut rows = Vec::with_capacity(self.mats.len());
        for a in &self.mats {
            let mut r = a.matvec(u);
            for v in &mut r {
                *v *= 2.0;
            }
            rows.push(r);
        }
        Mat::from_rows(rows)
    }

    /// Gram matrix of the components under tr(A_i A_j).
    pub fn gram(&self) -> SymmetricMatrix {
        let m = self.mats.len();
        let mut g = SymmetricMatrix::zeros(m);
        for i in 0..m {
            for j in i..m {
                let v = frobenius(&self.mats[i], &self.mats[j])
                    .expect("dimensions checked at construction");
                g.set_sym(i, j, v);
            }
        }
        g
    }

    /// Largest component Frobenius norm; the natural scale of the form.
    pub fn scale(&self) -> f64 {
        self.mats
            .iter()
            .map(|a| a.frobenius_norm())
            .fold(0.0, f64::max)
    }
}

/// (x*y, x*z, y*z) on R^3, the standard example with an indefinite span.
pub fn coordinate_products() -> VQForm {
    let mut a1 = SymmetricMatrix::zeros(3);
    a1.set_sym(0, 1, 0.5);
    let mut a2 = SymmetricMatrix::zeros(3);
    a2.set_sym(0, 2, 0.5);
    let mut a3 = SymmetricMatrix::zeros(3);
    a3.set_sym(1, 2, 0.5);
    VQForm::new(vec![a1, a2, a3]).expect("static dimensions")
}

/// (x^2 - y^2, x*y) on R^2, the standard surjective planar example.
pub fn planar_squares() -> VQForm {
    let a1 = SymmetricMatrix::diagonal(&[1.0, -1.0]);
    let mut a2 = SymmetricMatrix::zeros(2);
    a2.set_sym(0, 1, 0.5);
    VQForm::new(vec![a1, a2]).expect("static dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_matches_handwritten_polynomials() {
        let f = planar_squares();
        // (x^2 - y^2, x*y) at (1, 2)
        let q = f.evaluate(&[1.0, 2.0]);
        assert!((q[0] + 3.0).abs() < 1e-15);
        assert!((q[1] - 2.0).abs() < 1e-15);

        let g = coordinate_products();
        let q = g.evaluate(&[1.0, 2.0, 3.0]);
        assert!((q[0] - 2.0).abs() < 1e-15);
        assert!((q[1] - 3.0).abs() < 1e-15);
        assert!((q[2] - 6.0).abs() < 1e-15);
    }

    #[test]
    fn bilinear_on_basis_vectors() {
        let f = planar_squares();
        let b = f.bilinear(&[1.0, 0.0], &[0.0, 1.0]);
        assert_eq!(b[0], 0.0);
        assert!((b[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bilinear_polarization_identity() {
        let f = coordinate_products();
        let u = [0.3, -1.1, 0.7];
        let w = [2.0, 0.5, -0.4];
        let sum: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + b).collect();
        let diff: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - b).collect();
        let b = f.bilinear(&u, &w);
        let qs = f.evaluate(&sum);
        let qd = f.evaluate(&diff);
        for i in 0..3 {
            assert!((b[i] - 0.25 * (qs[i] - qd[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluate_is_quadratically_homogeneous() {
        let f = coordinate_products();
        let u = [1.5, -0.2, 0.9];
        let q = f.evaluate(&u);
        let scaled: Vec<f64> = u.iter().map(|x| 3.0 * x).collect();
        let qs = f.evaluate(&scaled);
        for i in 0..3 {
            assert!((qs[i] - 9.0 * q[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn contract_of_coordinate_products() {
        let f = coordinate_products();
        let c = f.contract(&[1.0, 1.0, 1.0]);
        for i in 0..3 {
            assert_eq!(c.get(i, i), 0.0);
            for j in 0..3 {
                if i != j {
                    assert!((c.get(i, j) - 0.5).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn gram_of_planar_squares() {
        let g = planar_squares().gram();
        assert!((g.get(0, 0) - 2.0).abs() < 1e-15);
        assert!((g.get(1, 1) - 0.5).abs() < 1e-15);
        assert_eq!(g.get(0, 1), 0.0);
    }

    #[test]
    fn jacobian_rows_are_doubled_matvecs() {
        let f = planar_squares();
        let j = f.jacobian(&[1.0, 1.0]);
        assert_eq!(j.rows, 2);
        assert_eq!(j.cols, 2);
        assert!((j.get(0, 0) - 2.0).abs() < 1e-15);
        assert!((j.get(0, 1) + 2.0).abs() < 1e-15);
        assert!((j.get(1, 0) - 1.0).abs() < 1e-15);
        assert!((j.get(1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobian_is_the_derivative() {
        // finite differences are exact for quadratics up to rounding
        let f = coordinate_products();
        let u = [0.8, -0.3, 1.2];
        let j = f.jacobian(&u);
        let h = 1e-4;
        for k in 0..3 {
            let mut up = u;
            let mut um = u;
            up[k] += h;
            um[k] -= h;
            let qp = f.evaluate(&up);
            let qm = f.evaluate(&um);
            for i in 0..3 {
                let fd = (qp[i] - qm[i]) / (2.0 * h);
                assert!((j.get(i, k) - fd).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mismatched_component_dimensions_rejected() {
        let mats = vec![SymmetricMatrix::identity(2), SymmetricMatrix::identity(3)];
        assert!(VQForm::new(mats).is_err());
    }
}
