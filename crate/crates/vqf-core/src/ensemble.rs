//! Seeded random form generation for testing and benchmarks.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VqfError};
use crate::form::VQForm;
use crate::sphere::rng_for;
use crate::sym::SymmetricMatrix;

/// Distribution families for [`random_form`]. The planted variants are
/// built so the advertised property holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    /// Symmetrized standard normal components.
    Gaussian,
    /// Gaussian components projected onto the traceless subspace.
    TracelessGaussian,
    /// Gaussian components with c*I added to the first one, c chosen so
    /// that the first matrix is positive definite with margin at least 1.
    DefinitePlanted,
    /// Traceless components: every nonzero contraction then has both
    /// eigenvalue signs, so the form takes both signs along any direction.
    IndefinitePlanted,
}

impl FromStr for Ensemble {
    type Err = VqfError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Ensemble::Gaussian),
            "traceless-gaussian" => Ok(Ensemble::TracelessGaussian),
            "definite-planted" => Ok(Ensemble::DefinitePlanted),
            "indefinite-planted" => Ok(Ensemble::IndefinitePlanted),
            other => Err(VqfError::InvalidArgument(format!(
                "unknown ensemble {other:?}; expected one of gaussian, traceless-gaussian, definite-planted, indefinite-planted"
            ))),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Ensemble::Gaussian => "gaussian",
            Ensemble::TracelessGaussian => "traceless-gaussian",
            Ensemble::DefinitePlanted => "definite-planted",
            Ensemble::IndefinitePlanted => "indefinite-planted",
        };
        f.write_str(name)
    }
}

/// Draws a form with m components on R^n, reproducibly from the seed.
pub fn random_form(n: usize, m: usize, ensemble: Ensemble, seed: u64) -> Result<VQForm> {
    if n == 0 || m == 0 {
        return Err(VqfError::InvalidArgument(
            "ensemble dimensions must be positive".into(),
        ));
    }
    let mut mats = Vec::with_capacity(m);
    for i in 0..m {
        // one RNG per component; independent of how many components follow
        let mut rng = rng_for(seed, 0x656e73, i as u64);
        let mut a = gaussian_symmetric(n, &mut rng);
        match ensemble {
            Ensemble::Gaussian => {}
            Ensemble::TracelessGaussian | Ensemble::IndefinitePlanted => {
                a = remove_trace(&a);
            }
            Ensemble::DefinitePlanted => {
                if i == 0 {
                    let shift = a.spectral_norm()? + 1.0;
                    a = SymmetricMatrix::scaled_sum(
                        &[a, SymmetricMatrix::identity(n)],
                        &[1.0, shift],
                    )?;
                }
            }
        }
        mats.push(a);
    }
    VQForm::new(mats)
}

fn gaussian_symmetric(n: usize, rng: &mut impl Rng) -> SymmetricMatrix {
    let mut a = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            a.set_sym(i, j, rng.sample::<f64, _>(StandardNormal));
        }
    }
    a
}

fn remove_trace(a: &SymmetricMatrix) -> SymmetricMatrix {
    let n = a.dim();
    let shift = -a.trace() / n as f64;
    SymmetricMatrix::scaled_sum(&[a.clone(), SymmetricMatrix::identity(n)], &[1.0, shift])
        .expect("same dimension")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trips_all_names() {
        for name in [
            "gaussian",
            "traceless-gaussian",
            "definite-planted",
            "indefinite-planted",
        ] {
            let e: Ensemble = name.parse().unwrap();
            assert_eq!(e.to_string(), name);
        }
        assert!("wishart".parse::<Ensemble>().is_err());
    }

    #[test]
    fn same_seed_gives_identical_forms() {
        let a = random_form(2, 2, Ensemble::Gaussian, 1).unwrap();
        let b = random_form(2, 2, Ensemble::Gaussian, 1).unwrap();
        for (x, y) in a.components().iter().zip(b.components()) {
            assert_eq!(x, y);
        }
        let c = random_form(2, 2, Ensemble::Gaussian, 2).unwrap();
        assert_ne!(a.components()[0], c.components()[0]);
    }

    #[test]
    fn traceless_ensembles_have_traceless_components() {
        for ens in [Ensemble::TracelessGaussian, Ensemble::IndefinitePlanted] {
            let f = random_form(5, 3, ens, 9).unwrap();
            for a in f.components() {
                assert!(a.trace().abs() < 1e-12 * (1.0 + a.frobenius_norm()));
            }
        }
    }

    #[test]
    fn definite_planted_first_component_is_positive_definite() {
        for seed in 0..20 {
            let f = random_form(4, 3, Ensemble::DefinitePlanted, seed).unwrap();
            let min = f.components()[0].min_eigenvalue().unwrap();
            assert!(min >= 0.999, "seed {seed}: min eigenvalue {min}");
        }
    }
}
