//! Exact even-parity spectrum of the circular limit shape.
//!
//! At deformation zero the even eigenfunctions are `J_n(kr) cos(n φ)` and
//! the Dirichlet condition puts `k` at the zeros of `J_n`, one family per
//! angular order `n ≥ 0`. These are the reference values every solver
//! configuration is checked against.

use crate::special::bessel_jn;

/// One even-parity circle eigenvalue: the `m`-th positive zero of `J_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleLevel {
    /// Angular order of the mode.
    pub n: usize,
    /// Radial index (1-based zero count).
    pub m: usize,
    /// The eigen-wavenumber `j_{n,m}`.
    pub k: f64,
}

/// All even-parity circle eigenvalues with `k ≤ k_max`, sorted by `k`.
pub fn circle_levels(k_max: f64) -> Vec<CircleLevel> {
    assert!(k_max > 0.0 && k_max.is_finite());
    let mut out = Vec::new();
    let mut n = 0usize;
    loop {
        let zeros = bessel_zeros_up_to(n, k_max);
        if zeros.is_empty() {
            // First zeros increase with the order, so no later family can
            // reach the cutoff either.
            break;
        }
        for (idx, &k) in zeros.iter().enumerate() {
            out.push(CircleLevel { n, m: idx + 1, k });
        }
        n += 1;
    }
    out.sort_by(|a, b| a.k.total_cmp(&b.k));
    out
}

/// Positive zeros of `J_n` up to `x_max`, by scan and bisection.
///
/// Consecutive zeros of any `J_n` are more than 3.1 apart, so a scan step
/// of 0.45 cannot straddle two of them; `J_n` has no zeros at or below `n`.
fn bessel_zeros_up_to(n: usize, x_max: f64) -> Vec<f64> {
    const STEP: f64 = 0.45;
    let mut zeros = Vec::new();
    let mut x = if n == 0 { 0.5 } else { n as f64 };
    let mut fx = bessel_jn(n as i32, x);
    while x < x_max {
        let x_next = (x + STEP).min(x_max);
        let f_next = bessel_jn(n as i32, x_next);
        if fx == 0.0 {
            zeros.push(x);
        } else if fx.signum() != f_next.signum() && f_next != 0.0 {
            zeros.push(bisect_zero(n as i32, x, x_next, fx));
        }
        x = x_next;
        fx = f_next;
    }
    if fx == 0.0 {
        zeros.push(x);
    }
    zeros
}

fn bisect_zero(n: i32, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let mut sign_lo = f_lo.signum();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = bessel_jn(n, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == sign_lo {
            lo = mid;
            sign_lo = f_mid.signum();
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_zeros_match_reference_values() {
        // First zeros of J_0, J_1, J_2 and the second zero of J_0, to
        // standard tabulated precision.
        let refs = [
            (0usize, 1usize, 2.404825557695773),
            (1, 1, 3.831705970207512),
            (2, 1, 5.135622301840683),
            (0, 2, 5.520078110286311),
            (3, 2, 9.761023129981670),
        ];
        let levels = circle_levels(12.0);
        for (n, m, k) in refs {
            let found = levels
                .iter()
                .find(|l| l.n == n && l.m == m)
                .unwrap_or_else(|| panic!("missing zero ({n},{m})"));
            assert!(
                (found.k - k).abs() < 1e-12,
                "zero ({n},{m}): {} vs {k}",
                found.k
            );
        }
    }

    #[test]
    fn levels_are_sorted_and_bounded() {
        let levels = circle_levels(30.0);
        assert!(levels.windows(2).all(|w| w[0].k <= w[1].k));
        assert!(levels.iter().all(|l| l.k <= 30.0));
        // Interlacing: the first zero of J_{n+1} exceeds that of J_n.
        let first = |n: usize| levels.iter().find(|l| l.n == n && l.m == 1).unwrap().k;
        for n in 0..10 {
            assert!(first(n) < first(n + 1));
        }
    }

    #[test]
    fn count_matches_weyl_asymptotics() {
        // Even half-disc: area π/2, k²-term k²/(8π)·... checked loosely.
        let k = 50.0;
        let count = circle_levels(k).len() as f64;
        let weyl = 0.5 * std::f64::consts::PI * k * k / (4.0 * std::f64::consts::PI)
            - (0.5 * 2.0 * std::f64::consts::PI + 2.0 - 4.0) * k / (4.0 * std::f64::consts::PI);
        assert!(
            (count - weyl).abs() < 0.02 * count,
            "count {count} vs Weyl {weyl}"
        );
    }
}
