//! Dense symmetric matrices: construction, Frobenius geometry,
//! eigendecomposition, and inertia.
//!
//! Matrices are stored as full row-major arrays; the constructors reject
//! (rather than repair) asymmetric or non-finite input, so every value of
//! [`SymmetricMatrix`] is exactly symmetric with finite entries.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VqfError};

/// Maximum number of cyclic Jacobi sweeps before giving up.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Dense n x n real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>, // row-major, full storage
}

impl SymmetricMatrix {
    /// Builds from a flat row-major array of length n*n.
    ///
    /// Input must be exactly symmetric and finite; violations are errors,
    /// not silently averaged away.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(VqfError::InvalidArgument(
                "dimension must be positive".into(),
            ));
        }
        if data.len() != n * n {
            return Err(VqfError::DimensionMismatch {
                context: "symmetric matrix storage",
                expected: n * n,
                got: data.len(),
            });
        }
        for (k, v) in data.iter().enumerate() {
            if !v.is_finite() {
                let _ = k;
                return Err(VqfError::NonFinite {
                    context: "symmetric matrix entry",
                });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let upper = data[i * n + j];
                let lower = data[j * n + i];
                if upper != lower {
                    return Err(VqfError::NotSymmetric {
                        row: i,
                        col: j,
                        upper,
                        lower,
                    });
                }
            }
        }
        Ok(SymmetricMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(VqfError::DimensionMismatch {
                    context: "matrix row",
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        SymmetricMatrix::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymmetricMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = SymmetricMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = diag[i];
        }
        m
    }

    /// Rank-one outer product x x^T.
    pub fn outer(x: &[f64]) -> Self {
        let n = x.len();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(x[i] * x[j]);
            }
        }
        SymmetricMatrix { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both (i,j) and (j,i), preserving symmetry.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymmetricMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Weighted sum of same-dimension symmetric matrices.
    pub fn scaled_sum(mats: &[SymmetricMatrix], coeffs: &[f64]) -> Result<Self> {
        if mats.is_empty() || mats.len() != coeffs.len() {
            return Err(VqfError::DimensionMismatch {
                context: "scaled sum",
                expected: mats.len(),
                got: coeffs.len(),
            });
        }
        let n = mats[0].n;
        let mut data = vec![0.0; n * n];
        for (mat, &c) in mats.iter().zip(coeffs) {
            if mat.n != n {
                return Err(VqfError::DimensionMismatch {
                    context: "scaled sum operand",
                    expected: n,
                    got: mat.n,
                });
            }
            for (acc, v) in data.iter_mut().zip(&mat.data) {
                *acc += c * v;
            }
        }
        Ok(SymmetricMatrix { n, data })
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "matvec dimension");
        (0..self.n)
            .map(|i| crate::linalg::dot(self.row(i), x))
            .collect()
    }

    /// x^T A x
    pub fn quad(&self, x: &[f64]) -> f64 {
        crate::linalg::dot(&self.matvec(x), x)
    }

    /// x^T A y
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        crate::linalg::dot(&self.matvec(y), x)
    }

    /// Scale-aware default threshold for eigenvalue sign counting.
    pub fn default_inertia_tol(&self) -> f64 {
        1e-8 * self.frobenius_norm().max(1.0)
    }

    /// Eigendecomposition by cyclic Jacobi sweeps.
    ///
    /// Eigenvalues are returned in ascending order with matching unit
    /// eigenvectors (`A v_k = values[k] v_k`).
    pub fn eigen(&self) -> Result<EigenDecomposition> {
        let (values, vectors) = self.jacobi(true)?;
        Ok(EigenDecomposition {
            values,
            vectors: vectors.expect("vectors requested"),
        })
    }

    /// Eigenvalues only (ascending); skips eigenvector accumulation.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.jacobi(false)?.0)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Largest |eigenvalue| (the spectral norm).
    pub fn spectral_norm(&self) -> Result<f64> {
        let vals = self.eigenvalues()?;
        Ok(vals[0].abs().max(vals[vals.len() - 1].abs()))
    }

    /// Counts eigenvalue signs against the threshold `tol`.
    pub fn inertia(&self, tol: f64) -> Result<Inertia> {
        if !(tol >= 0.0) {
            return Err(VqfError::InvalidArgument(format!(
                "inertia tolerance must be nonnegative, got {tol}"
            )));
        }
        let vals = self.eigenvalues()?;
        let mut inertia = Inertia {
            n_plus: 0,
            n_minus: 0,
            n_zero: 0,
            tol,
        };
        for v in vals {
            if v > tol {
                inertia.n_plus += 1;
            } else if v < -tol {
                inertia.n_minus += 1;
            } else {
                inertia.n_zero += 1;
            }
        }
        Ok(inertia)
    }

    // Cyclic Jacobi with the classical threshold schedule. `accumulate`
    // controls whether the rotation product (eigenvectors) is kept.
    fn jacobi(&self, accumulate: bool) -> Result<(Vec<f64>, Option<Vec<Vec<f64>>>)> {
        let n = self.n;
        if n == 1 {
            let vecs = accumulate.then(|| vec![vec![1.0]]);
            return Ok((vec![self.data[0]], vecs));
        }
        let mut a = self.data.clone();
        let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        let mut b = d.clone();
        let mut z = vec![0.0; n];
        // v holds the rotation product; column k is the eigenvector of d[k]
        let mut v = if accumulate {
            let mut id = vec![0.0; n * n];
            for i in 0..n {
                id[i * n + i] = 1.0;
            }
            Some(id)
        } else {
            None
        };
        let off_target = 1e-12 * (1.0 + self.frobenius_norm());

        let mut converged = false;
        for sweep in 1..=MAX_JACOBI_SWEEPS {
            let mut sm = 0.0;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    sm += a[p * n + q].abs();
                }
            }
            if sm <= off_target {
                converged = true;
                break;
            }
            let tresh = if sweep < 4 {
                0.2 * sm / (n * n) as f64
            } else {
                0.0
            };
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let g = 100.0 * a[p * n + q].abs();
                    if sweep > 4 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                        a[p * n + q] = 0.0;
                        continue;
                    }
                    if a[p * n + q].abs() <= tresh {
                        continue;
                    }
                    let mut h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        a[p * n + q] / h
                    } else {
                        let theta = 0.5 * h / a[p * n + q];
                        let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            t = -t;
                        }
                        t
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    h = t * a[p * n + q];
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[p * n + q] = 0.0;
                    let rotate = |a: &mut Vec<f64>, i: usize, j: usize, k: usize, l: usize| {
                        let g = a[i * n + j];
                        let h = a[k * n + l];
                        a[i * n + j] = g - s * (h + g * tau);
                        a[k * n + l] = h + s * (g - h * tau);
                    };
                    for j in 0..p {
                        rotate(&mut a, j, p, j, q);
                    }
                    for j in p + 1..q {
                        rotate(&mut a, p, j, j, q);
                    }
                    for j in q + 1..n {
                        rotate(&mut a, p, j, q, j);
                    }
                    if let Some(v) = v.as_mut() {
                        for j in 0..n {
                            let gj = v[j * n + p];
                            let hj = v[j * n + q];
                            v[j * n + p] = gj - s * (hj + gj * tau);
                            v[j * n + q] = hj + s * (gj - hj * tau);
                        }
                    }
                }
            }
            for p in 0..n {
                b[p] += z[p];
                d[p] = b[p];
                z[p] = 0.0;
            }
        }
        if !converged {
            return Err(VqfError::Numeric(format!(
                "Jacobi eigensolver failed to converge within {MAX_JACOBI_SWEEPS} sweeps (n = {n})"
            )));
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
        let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
        let vectors = v.map(|v| {
            order
                .iter()
                .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
                .collect()
        });
        Ok((values, vectors))
    }
}

/// Result of [`SymmetricMatrix::eigen`]: ascending eigenvalues and the
/// matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Eigenvalue sign counts of a symmetric matrix: the number of eigenvalues
/// above `tol`, below `-tol`, and inside the `[-tol, tol]` band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    /// Threshold used for the sign counts.
    pub tol: f64,
}

impl Inertia {
    pub fn total(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }
}

/// The trace inner product tr(AB) on symmetric matrices.
pub fn frobenius(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(VqfError::DimensionMismatch {
            context: "frobenius inner product",
            expected: a.dim(),
            got: b.dim(),
        });
    }
    // tr(AB) = sum_ij a_ij b_ij for symmetric A, B
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct_error(a: &SymmetricMatrix, eig: &EigenDecomposition) -> f64 {
        let n = a.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += eig.values[k] * eig.vectors[k][i] * eig.vectors[k][j];
                }
                worst = worst.max((s - a.get(i, j)).abs());
            }
        }
        worst
    }

    #[test]
    fn rejects_asymmetric_input() {
        let err = SymmetricMatrix::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap_err();
        assert!(matches!(err, VqfError::NotSymmetric { .. }));
    }

    #[test]
    fn rejects_non_finite_input() {
        let err = SymmetricMatrix::new(2, vec![1.0, f64::NAN, f64::NAN, 4.0]).unwrap_err();
        assert!(matches!(err, VqfError::NonFinite { .. }));
    }

    #[test]
    fn eigen_of_diagonal_sorts_ascending() {
        let a = SymmetricMatrix::diagonal(&[3.0, 1.0, 2.0]);
        let eig = a.eigen().unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 2.0).abs() < 1e-12);
        assert!((eig.values[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_of_exchange_matrix() {
        let a = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let eig = a.eigen().unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_of_identity() {
        let a = SymmetricMatrix::identity(4);
        let eig = a.eigen().unwrap();
        for v in &eig.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eigen_residual_and_orthogonality_on_random_matrices() {
        let mut state = 0x1234_5678_u64;
        let mut next = move || {
            // xorshift, plenty for test fixtures
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in [2usize, 3, 5, 8, 12] {
            let mut a = SymmetricMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    a.set_sym(i, j, 10.0 * next());
                }
            }
            let eig = a.eigen().unwrap();
            let scale = 1.0 + a.frobenius_norm();
            // residual A v = mu v
            for k in 0..n {
                let av = a.matvec(&eig.vectors[k]);
                for i in 0..n {
                    assert!(
                        (av[i] - eig.values[k] * eig.vectors[k][i]).abs() <= 1e-10 * scale,
                        "residual too large at n={n}"
                    );
                }
            }
            // orthogonality
            for k in 0..n {
                for l in 0..n {
                    let d = crate::linalg::dot(&eig.vectors[k], &eig.vectors[l]);
                    let target = if k == l { 1.0 } else { 0.0 };
                    assert!((d - target).abs() < 1e-10);
                }
            }
            assert!(reconstruct_error(&a, &eig) <= 1e-9 * scale);
        }
    }

    #[test]
    fn inertia_counts_signs() {
        let a = SymmetricMatrix::diagonal(&[1.0, -1.0]);
        let i = a.inertia(1e-10).unwrap();
        assert_eq!((i.n_plus, i.n_minus, i.n_zero), (1, 1, 0));

        let z = SymmetricMatrix::zeros(3);
        let i = z.inertia(1e-10).unwrap();
        assert_eq!((i.n_plus, i.n_minus, i.n_zero), (0, 0, 3));
    }

    #[test]
    fn inertia_of_coordinate_product_contraction() {
        // sum of the three coefficient matrices of (xy, xz, yz): zero
        // diagonal, all off-diagonal entries 1/2; eigenvalues (1, -1/2, -1/2)
        let mut a = SymmetricMatrix::zeros(3);
        a.set_sym(0, 1, 0.5);
        a.set_sym(0, 2, 0.5);
        a.set_sym(1, 2, 0.5);
        let vals = a.eigenvalues().unwrap();
        assert!((vals[0] + 0.5).abs() < 1e-12);
        assert!((vals[1] + 0.5).abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
        let i = a.inertia(1e-10).unwrap();
        assert_eq!((i.n_plus, i.n_minus, i.n_zero), (1, 2, 0));
    }

    #[test]
    fn inertia_negation_swaps_counts() {
        let a = SymmetricMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, -3.0, 0.5],
            vec![0.0, 0.5, 0.1],
        ])
        .unwrap();
        let i = a.inertia(1e-10).unwrap();
        let ineg = a.scaled(-1.0).inertia(1e-10).unwrap();
        assert_eq!(i.n_plus, ineg.n_minus);
        assert_eq!(i.n_minus, ineg.n_plus);
        assert_eq!(i.n_zero, ineg.n_zero);
        assert_eq!(i.total(), 3);
    }

    #[test]
    fn frobenius_examples() {
        let id = SymmetricMatrix::identity(4);
        assert!((frobenius(&id, &id).unwrap() - 4.0).abs() < 1e-14);

        let d = SymmetricMatrix::diagonal(&[1.0, -1.0]);
        let x = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(frobenius(&d, &x).unwrap(), 0.0);

        let v = [0.3, -1.2, 2.0];
        let outer = SymmetricMatrix::outer(&v);
        let norm_sq: f64 = v.iter().map(|x| x * x).sum();
        assert!(
            (frobenius(&outer, &SymmetricMatrix::identity(3)).unwrap() - norm_sq).abs() < 1e-12
        );
    }

    #[test]
    fn frobenius_dimension_mismatch() {
        let a = SymmetricMatrix::identity(2);
        let b = SymmetricMatrix::identity(3);
        assert!(frobenius(&a, &b).is_err());
    }
}
