//! Deterministic direction sampling on unit spheres.
//!
//! Two kinds of sequences: a low-discrepancy stream (golden-angle on the
//! circle, Halton points pushed through the normal quantile elsewhere) and
//! seeded Gaussian directions. Both are pure functions of their arguments,
//! so repeated calls agree exactly, which keeps every downstream search
//! reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const FIRST_PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// SplitMix64 finalizer; mixes a word into a well-scrambled one.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from (seed, stream, index).
///
/// Used to give each unit of work its own RNG so that results do not depend
/// on scheduling order.
pub fn subseed(seed: u64, stream: u64, index: u64) -> u64 {
    mix64(mix64(mix64(seed) ^ stream) ^ index)
}

pub fn rng_for(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(subseed(seed, stream, index))
}

/// The `index`-th point of the deterministic low-discrepancy sequence on
/// the unit sphere in R^dim.
///
/// dim 1 alternates +1/-1; dim 2 walks the circle by the golden angle;
/// higher dimensions map Halton points through the normal quantile and
/// normalize.
pub fn low_discrepancy_direction(dim: usize, index: usize) -> Vec<f64> {
    assert!(dim >= 1, "direction dimension");
    match dim {
        1 => vec![if index % 2 == 0 { 1.0 } else { -1.0 }],
        2 => {
            // 2*pi*(2 - phi) is the golden angle
            let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
            let theta = golden * index as f64;
            vec![theta.cos(), theta.sin()]
        }
        _ => {
            assert!(
                dim <= FIRST_PRIMES.len(),
                "low-discrepancy stream supports dimension <= {}",
                FIRST_PRIMES.len()
            );
            // skip Halton index 0 (all-zero point maps to -infinity)
            let mut k = index as u64 + 1;
            loop {
                let mut v: Vec<f64> = (0..dim)
                    .map(|d| inverse_normal_cdf(radical_inverse(k, FIRST_PRIMES[d])))
                    .collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    for x in &mut v {
                        *x /= norm;
                    }
                    return v;
                }
                // essentially unreachable; step to the next Halton point
                k += 1;
            }
        }
    }
}

/// First `count` points of the low-discrepancy stream.
pub fn low_discrepancy_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| low_discrepancy_direction(dim, i))
        .collect()
}

/// A Gaussian direction on the unit sphere from the given RNG.
pub fn random_unit(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    assert!(dim >= 1, "direction dimension");
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 0.0;
    let mut denom = 1.0;
    let b = base as f64;
    while k > 0 {
        denom *= b;
        inv += (k % base) as f64 / denom;
        k /= base;
    }
    inv
}

/// Rational approximation to the standard normal quantile (Acklam's
/// coefficients; absolute error below 1.2e-9 on (0,1)).
fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn dimension_one_alternates() {
        assert_eq!(low_discrepancy_direction(1, 0), vec![1.0]);
        assert_eq!(low_discrepancy_direction(1, 1), vec![-1.0]);
        assert_eq!(low_discrepancy_direction(1, 6), vec![1.0]);
    }

    #[test]
    fn points_are_unit_and_deterministic() {
        for dim in 1..=6 {
            let a = low_discrepancy_directions(dim, 40);
            let b = low_discrepancy_directions(dim, 40);
            assert_eq!(a, b);
            for p in &a {
                assert_eq!(p.len(), dim);
                assert!((norm(p) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn circle_stream_starts_at_east_and_spreads() {
        let pts = low_discrepancy_directions(2, 200);
        assert!((pts[0][0] - 1.0).abs() < 1e-12);
        assert!(pts[0][1].abs() < 1e-12);
        // golden-angle points equidistribute; the mean shrinks like 1/count
        let mean_x: f64 = pts.iter().map(|p| p[0]).sum::<f64>() / 200.0;
        let mean_y: f64 = pts.iter().map(|p| p[1]).sum::<f64>() / 200.0;
        assert!(mean_x.abs() < 0.02 && mean_y.abs() < 0.02);
    }

    #[test]
    fn sphere_stream_covers_all_octant_signs() {
        let pts = low_discrepancy_directions(3, 256);
        let mut seen = [false; 8];
        for p in &pts {
            let idx =
                (p[0] > 0.0) as usize | ((p[1] > 0.0) as usize) << 1 | ((p[2] > 0.0) as usize) << 2;
            seen[idx] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn quantile_matches_known_values() {
        // Phi^-1(0.5) = 0, Phi^-1(0.975) = 1.959964, symmetric tails
        assert!(inverse_normal_cdf(0.5).abs() < 1e-9);
        assert!((inverse_normal_cdf(0.975) - 1.959964).abs() < 1e-5);
        assert!((inverse_normal_cdf(0.025) + 1.959964).abs() < 1e-5);
        assert!((inverse_normal_cdf(1e-6) + 4.753424).abs() < 1e-4);
    }

    #[test]
    fn seeded_directions_reproduce() {
        let mut r1 = rng_for(7, 3, 11);
        let mut r2 = rng_for(7, 3, 11);
        let a = random_unit(5, &mut r1);
        let b = random_unit(5, &mut r2);
        assert_eq!(a, b);
        assert!((norm(&a) - 1.0).abs() < 1e-12);

        let mut r3 = rng_for(7, 3, 12);
        assert_ne!(random_unit(5, &mut r3), a);
    }

    #[test]
    fn subseeds_differ_across_streams_and_indices() {
        let s = subseed(42, 0, 0);
        assert_ne!(s, subseed(42, 0, 1));
        assert_ne!(s, subseed(42, 1, 0));
        assert_ne!(s, subseed(43, 0, 0));
    }
}
