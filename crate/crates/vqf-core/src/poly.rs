//! Univariate polynomial utilities: Newton interpolation, and real-root
//! isolation through the Bernstein basis.
//!
//! Root isolation subdivides with de Casteljau splits and bounds the root
//! count on each piece by the sign variations of the Bernstein
//! coefficients. Each located root carries a `sign_change` flag: true when
//! the polynomial provably crosses zero there, false for touch roots and
//! clusters the subdivision could not resolve.

/// Evaluates sum coeffs[k] x^k by Horner's scheme.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Interpolating polynomial through (xs[i], ys[i]) in the monomial basis.
/// Nodes must be pairwise distinct.
pub fn interpolate(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len(), "interpolation node count");
    assert!(!xs.is_empty(), "interpolation needs nodes");
    let n = xs.len();
    // divided differences in place: coef[k] = f[x_0..x_k]
    let mut coef = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    // expand the Newton form to monomial coefficients
    let mut mono = vec![0.0; n];
    let mut basis = vec![0.0; n]; // product (x - x_0)..(x - x_{k-1})
    basis[0] = 1.0;
    let mut basis_deg = 0;
    for (k, &c) in coef.iter().enumerate() {
        for j in 0..=basis_deg {
            mono[j] += c * basis[j];
        }
        if k + 1 < n {
            // basis *= (x - xs[k])
            for j in (0..=basis_deg).rev() {
                basis[j + 1] += basis[j];
                basis[j] *= -xs[k];
            }
            basis_deg += 1;
        }
    }
    mono
}

/// Drops trailing coefficients with magnitude at most `tol`.
pub fn trim(coeffs: &[f64], tol: f64) -> Vec<f64> {
    let mut end = coeffs.len();
    while end > 1 && coeffs[end - 1].abs() <= tol {
        end -= 1;
    }
    coeffs[..end].to_vec()
}

/// All real roots lie inside [-bound, bound].
pub fn cauchy_root_bound(coeffs: &[f64]) -> f64 {
    let lead = coeffs[coeffs.len() - 1];
    assert!(
        lead != 0.0,
        "root bound needs a nonzero leading coefficient"
    );
    let max_ratio = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| (c / lead).abs())
        .fold(0.0, f64::max);
    1.0 + max_ratio
}

/// A located real root. `sign_change` is true when the polynomial provably
/// crosses zero at this root; touch roots and unresolved clusters carry
/// false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolatedRoot {
    pub value: f64,
    pub low: f64,
    pub high: f64,
    pub sign_change: bool,
}

/// Real roots of the polynomial inside (lo, hi), ascending. Roots closer
/// together than the width floor come back as one cluster entry.
pub fn real_roots(coeffs: &[f64], lo: f64, hi: f64) -> Vec<IsolatedRoot> {
    assert!(lo < hi, "root interval");
    let scale = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let coeffs = trim(coeffs, 1e-14 * scale);
    if coeffs.len() <= 1 {
        // constants have no isolated roots (the zero polynomial is the
        // caller's degenerate case to detect, not ours)
        return Vec::new();
    }
    let bernstein = to_bernstein(&coeffs, lo, hi);
    let width_floor = 1e-13 * (1.0 + lo.abs().max(hi.abs()));
    let mut out = Vec::new();
    isolate(&coeffs, &bernstein, lo, hi, width_floor, 0, &mut out);
    merge_clusters(&mut out, 10.0 * width_floor);
    out
}

// Bernstein coefficients of p restricted to [lo, hi].
fn to_bernstein(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let d = coeffs.len() - 1;
    // q(t) = p(lo + (hi - lo) t): Taylor shift by lo, then scale by the span
    let mut q = coeffs.to_vec();
    for i in 0..d {
        for j in (i..d).rev() {
            let carry = lo * q[j + 1];
            q[j] += carry;
        }
    }
    let span = hi - lo;
    let mut pw = 1.0;
    for c in q.iter_mut() {
        *c *= pw;
        pw *= span;
    }
    // monomial on [0,1] to Bernstein: b_i = sum_{j<=i} C(i,j)/C(d,j) q_j
    let mut b = vec![0.0; d + 1];
    for (i, bi) in b.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &qj) in q.iter().take(i + 1).enumerate() {
            acc += binom(i, j) / binom(d, j) * qj;
        }
        *bi = acc;
    }
    b
}

fn binom(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

fn sign_variations(b: &[f64]) -> usize {
    let scale = b.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut count = 0;
    let mut last = 0.0_f64;
    for &x in b {
        if x.abs() <= 1e-14 * scale {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            count += 1;
        }
        last = x;
    }
    count
}

// First point strictly between `from` and `toward` where the polynomial is
// nonzero, walking geometrically outward from `from`.
fn probe_inward(coeffs: &[f64], from: f64, toward: f64) -> Option<(f64, f64)> {
    let span = toward - from;
    for k in (1..=60).rev() {
        let x = from + span * (0.5_f64).powi(k);
        if x == from || (span > 0.0 && x >= toward) || (span < 0.0 && x <= toward) {
            continue;
        }
        let fx = eval(coeffs, x);
        if fx != 0.0 {
            return Some((x, fx));
        }
    }
    None
}

fn isolate(
    coeffs: &[f64],
    bernstein: &[f64],
    lo: f64,
    hi: f64,
    width_floor: f64,
    depth: usize,
    out: &mut Vec<IsolatedRoot>,
) {
    let v = sign_variations(bernstein);
    if v == 0 {
        return;
    }
    if v == 1 {
        out.push(polish_single(coeffs, lo, hi, width_floor));
        return;
    }
    if hi - lo <= width_floor || depth > 64 {
        out.push(IsolatedRoot {
            value: 0.5 * (lo + hi),
            low: lo,
            high: hi,
            sign_change: false,
        });
        return;
    }
    let (left, right) = de_casteljau_split(bernstein);
    let mid = 0.5 * (lo + hi);
    // the de Casteljau apex is the value at the split point; when the
    // split lands on a root, record it here, because each half only
    // counts roots strictly inside itself
    let scale = bernstein.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let apex = left[left.len() - 1];
    if apex.abs() <= 1e-14 * scale {
        let before = probe_inward(coeffs, mid, lo);
        let after = probe_inward(coeffs, mid, hi);
        let crossing = match (before, after) {
            (Some((_, fb)), Some((_, fa))) => fb.signum() != fa.signum(),
            _ => false,
        };
        out.push(IsolatedRoot {
            value: mid,
            low: mid,
            high: mid,
            sign_change: crossing,
        });
    }
    isolate(coeffs, &left, lo, mid, width_floor, depth + 1, out);
    isolate(coeffs, &right, mid, hi, width_floor, depth + 1, out);
}

// Split at t = 1/2: left gets the first column of the triangle, right the
// diagonal. Exact halving keeps the subdivision stable.
fn de_casteljau_split(b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = b.len();
    let mut work = b.to_vec();
    let mut left = Vec::with_capacity(n);
    let mut right = vec![0.0; n];
    left.push(work[0]);
    right[n - 1] = work[n - 1];
    for level in 1..n {
        for i in 0..n - level {
            work[i] = 0.5 * (work[i] + work[i + 1]);
        }
        left.push(work[0]);
        right[n - 1 - level] = work[n - 1 - level];
    }
    (left, right)
}

// Exactly one simple root lives in (lo, hi). Endpoints may themselves be
// roots claimed by neighboring intervals, so probe just inside before
// bracketing.
fn polish_single(coeffs: &[f64], lo: f64, hi: f64, width_floor: f64) -> IsolatedRoot {
    let start = match (nonzero_end(coeffs, lo, hi), nonzero_end(coeffs, hi, lo)) {
        (Some((a, fa)), Some((b, fb))) if fa.signum() != fb.signum() => Some((a, fa, b)),
        _ => None,
    };
    let bracket = start.or_else(|| {
        // both probed ends share a sign: scan for the interior dip
        const SCAN: usize = 128;
        let mut last: Option<(f64, f64)> = None;
        for j in 0..=SCAN {
            let x = lo + (hi - lo) * j as f64 / SCAN as f64;
            let fx = eval(coeffs, x);
            if fx == 0.0 {
                continue;
            }
            if let Some((px, pf)) = last {
                if pf.signum() != fx.signum() {
                    return Some((px, pf, x));
                }
            }
            last = Some((x, fx));
        }
        None
    });
    let Some((mut a, mut fa, mut b)) = bracket else {
        // the crossing hides below the sampling grain next to an endpoint
        let best = (0..=256)
            .map(|j| lo + (hi - lo) * j as f64 / 256.0)
            .min_by(|&x, &y| {
                eval(coeffs, x)
                    .abs()
                    .partial_cmp(&eval(coeffs, y).abs())
                    .expect("finite values")
            })
            .expect("nonempty scan");
        return IsolatedRoot {
            value: best,
            low: lo,
            high: hi,
            sign_change: true,
        };
    };
    for _ in 0..200 {
        if b - a <= width_floor {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = eval(coeffs, mid);
        if fm == 0.0 {
            return IsolatedRoot {
                value: mid,
                low: lo,
                high: hi,
                sign_change: true,
            };
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    IsolatedRoot {
        value: 0.5 * (a + b),
        low: lo,
        high: hi,
        sign_change: true,
    }
}

// The endpoint itself if the polynomial is nonzero there, else the nearest
// interior point where it is.
fn nonzero_end(coeffs: &[f64], end: f64, other: f64) -> Option<(f64, f64)> {
    let f = eval(coeffs, end);
    if f != 0.0 {
        return Some((end, f));
    }
    probe_inward(coeffs, end, other)
}

fn merge_clusters(roots: &mut Vec<IsolatedRoot>, gap: f64) {
    roots.sort_by(|a, b| a.value.partial_cmp(&b.value).expect("finite roots"));
    let mut merged: Vec<IsolatedRoot> = Vec::with_capacity(roots.len());
    for r in roots.drain(..) {
        match merged.last_mut() {
            Some(last) if r.value - last.value <= gap => {
                last.high = r.high.max(last.high);
                last.value = 0.5 * (last.low + last.high);
                last.sign_change = false;
            }
            _ => merged.push(r),
        }
    }
    *roots = merged;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_matches_direct_evaluation() {
        let p = [1.0, -3.0, 0.0, 2.0]; // 2x^3 - 3x + 1
        for x in [-2.0, -0.5, 0.0, 1.0, 3.7] {
            let direct = 2.0 * x * x * x - 3.0 * x + 1.0;
            assert!((eval(&p, x) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_recovers_a_cubic() {
        let truth = [1.0, -3.0, 0.0, 2.0];
        let xs = [-1.5, -0.2, 0.8, 2.0];
        let ys: Vec<f64> = xs.iter().map(|&x| eval(&truth, x)).collect();
        let fit = interpolate(&xs, &ys);
        for (a, b) in fit.iter().zip(&truth) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn cauchy_bound_contains_roots() {
        // (x-1)(x+2)(x-3) = x^3 - 2x^2 - 5x + 6
        let p = [6.0, -5.0, -2.0, 1.0];
        assert!(cauchy_root_bound(&p) >= 3.0);
    }

    #[test]
    fn finds_three_simple_roots() {
        // x(x-1)(x+2) = x^3 + x^2 - 2x
        let p = [0.0, -2.0, 1.0, 1.0];
        let roots = real_roots(&p, -5.0, 5.0);
        assert_eq!(roots.len(), 3);
        let expect = [-2.0, 0.0, 1.0];
        for (r, e) in roots.iter().zip(&expect) {
            assert!(r.sign_change, "root {e} should be a certified crossing");
            assert!((r.value - e).abs() < 1e-10);
        }
    }

    #[test]
    fn flags_a_double_root_as_a_touch() {
        // (x-1)^2
        let p = [1.0, -2.0, 1.0];
        let roots = real_roots(&p, 0.0, 2.0);
        assert_eq!(roots.len(), 1);
        assert!(!roots[0].sign_change);
        assert!((roots[0].value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn no_roots_for_positive_polynomials() {
        let p = [1.0, 0.0, 1.0]; // x^2 + 1
        assert!(real_roots(&p, -10.0, 10.0).is_empty());
    }

    #[test]
    fn separates_close_roots() {
        // (x - 0.5)(x - 0.5001): the first root sits exactly on a split point
        let r1 = 0.5;
        let r2 = 0.5001;
        let p = [r1 * r2, -(r1 + r2), 1.0];
        let roots = real_roots(&p, 0.0, 1.0);
        assert_eq!(roots.len(), 2);
        assert!((roots[0].value - r1).abs() < 1e-9);
        assert!((roots[1].value - r2).abs() < 1e-9);
    }

    #[test]
    fn trim_drops_numerical_dust() {
        let p = [1.0, 2.0, 1e-17];
        assert_eq!(trim(&p, 1e-14), vec![1.0, 2.0]);
        assert_eq!(trim(&[0.0], 1e-14), vec![0.0]);
    }

    #[test]
    fn degree_grows_do_not_break_isolation() {
        // product of (x - k/7) for k = 0..6, expanded by convolution
        let mut p = vec![1.0];
        for k in 0..7 {
            let r = k as f64 / 7.0;
            let mut q = vec![0.0; p.len() + 1];
            for (i, &c) in p.iter().enumerate() {
                q[i] -= r * c;
                q[i + 1] += c;
            }
            p = q;
        }
        let roots = real_roots(&p, -1.0, 2.0);
        assert_eq!(roots.len(), 7);
        for (k, r) in roots.iter().enumerate() {
            assert!((r.value - k as f64 / 7.0).abs() < 1e-7);
        }
    }
}
