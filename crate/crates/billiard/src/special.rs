//! Bessel-function evaluation tailored to wave-basis assembly.
//!
//! The solver needs `J_0(x) .. J_n(x)` for orders up to a few hundred at
//! thousands of abscissae per wavenumber. Evaluating each order separately
//! (e.g. with `libm::jn`) costs `O(n)` per order; the downward (Miller)
//! recurrence produces the whole array in one `O(n)` sweep with uniform
//! absolute accuracy, which is what the basis assembly is bound by.
//!
//! Scalar Neumann functions `Y_0`, `Y_1` delegate to `libm` — they are only
//! needed pointwise in the interior Green-function evaluation.

/// First-kind Bessel values `J_0(x), J_1(x), ..., J_{n_max}(x)`.
///
/// Uses the Miller downward recurrence, started in the deep evanescent region
/// and normalised with `J_0 + 2 Σ_{m≥1} J_{2m} = 1`. Absolute accuracy is at
/// machine level for all orders; relative accuracy degrades only for orders
/// far beyond the turning point `n ≈ x`, where the values are themselves
/// negligibly small.
///
/// Requires `x > 0` (callers evaluate at strictly positive radii); `x = 0`
/// returns the exact limit `(1, 0, 0, ...)`.
pub fn bessel_j_array(n_max: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel_j_array: x must be finite and >= 0");
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < 1e-8 {
        // Tiny argument: the leading power-series term per order suffices.
        let mut term = 1.0;
        for (n, slot) in out.iter_mut().enumerate() {
            *slot = term;
            term *= 0.5 * x / (n as f64 + 1.0);
            if term == 0.0 {
                break;
            }
        }
        return out;
    }

    // Start the recurrence well above both the requested order and the
    // turning point so that the assumed tail (0, tiny) has decayed below
    // machine precision relative to the O(1) oscillatory region.
    let margin = 24 + (15.0 * x.cbrt()).ceil() as usize;
    let mut start = n_max.max(x.ceil() as usize) + margin;
    if start % 2 == 1 {
        start += 1;
    }

    let mut norm = 0.0; // accumulates J_0 + 2 J_2 + 2 J_4 + ...
    let mut upper = 0.0; // J_{n+1} in the current step
    let mut current = 1e-30; // J_n, arbitrary scale fixed by normalisation
    if start <= n_max {
        out[start] = current;
    }
    // `start` is even and nonzero, so it contributes 2·J_start.
    norm += 2.0 * current;

    let inv_x = 1.0 / x;
    for n in (1..=start).rev() {
        let lower = 2.0 * n as f64 * inv_x * current - upper;
        upper = current;
        current = lower;
        let idx = n - 1;
        if idx <= n_max {
            out[idx] = current;
        }
        if idx == 0 {
            norm += current;
        } else if idx % 2 == 0 {
            norm += 2.0 * current;
        }
        // The downward recurrence grows by many orders of magnitude when the
        // start order sits far above the turning point; rescale before any
        // overflow can occur.
        if current.abs() > 1e250 {
            const SCALE: f64 = 1e-250;
            current *= SCALE;
            upper *= SCALE;
            norm *= SCALE;
            for v in out.iter_mut().skip(idx) {
                *v *= SCALE;
            }
        }
    }

    let scale = 1.0 / norm;
    for v in &mut out {
        *v *= scale;
    }
    out
}

/// Derivative `J_n'(x)` from an order array produced by [`bessel_j_array`].
///
/// Uses `J_0' = -J_1` and `J_n' = (J_{n-1} - J_{n+1}) / 2`; the array must
/// extend at least one order beyond `n`.
pub fn bessel_j_deriv(j: &[f64], n: usize) -> f64 {
    assert!(n + 1 < j.len(), "bessel_j_deriv: array too short for order {n}");
    if n == 0 {
        -j[1]
    } else {
        0.5 * (j[n - 1] - j[n + 1])
    }
}

/// Second-kind Bessel function `Y_0(x)` for `x > 0`.
pub fn bessel_y0(x: f64) -> f64 {
    libm::y0(x)
}

/// Second-kind Bessel function `Y_1(x)` for `x > 0`.
pub fn bessel_y1(x: f64) -> f64 {
    libm::y1(x)
}

/// Scalar `J_n(x)` for occasional pointwise use.
pub fn bessel_jn(n: i32, x: f64) -> f64 {
    libm::jn(n, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent route: J_n(x) = (1/π) ∫_0^π cos(nτ - x sin τ) dτ,
    /// evaluated with the trapezoid rule, which is spectrally accurate for
    /// this periodic-extendable integrand.
    fn bessel_j_integral(n: usize, x: f64) -> f64 {
        let m = 4096;
        let h = std::f64::consts::PI / m as f64;
        let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
        let mut acc = 0.5 * (f(0.0) + f(std::f64::consts::PI));
        for i in 1..m {
            acc += f(i as f64 * h);
        }
        acc * h / std::f64::consts::PI
    }

    #[test]
    fn array_matches_integral_representation() {
        for &x in &[0.5, 3.0, 17.0, 80.5, 256.0] {
            let n_max = (x as usize) + 60;
            let arr = bessel_j_array(n_max, x);
            for n in [0usize, 1, 2, 5, (x as usize) / 2, x as usize, x as usize + 20] {
                let reference = bessel_j_integral(n, x);
                assert!(
                    (arr[n] - reference).abs() < 5e-13,
                    "J_{n}({x}): array {} vs integral {reference}",
                    arr[n]
                );
            }
        }
    }

    #[test]
    fn array_matches_libm_across_orders() {
        for &x in &[1.0, 12.3, 75.0, 300.0, 620.0] {
            let n_max = (1.3 * x) as usize + 40;
            let arr = bessel_j_array(n_max, x);
            for n in (0..=n_max).step_by(7) {
                let reference = libm::jn(n as i32, x);
                assert!(
                    (arr[n] - reference).abs() < 1e-11,
                    "J_{n}({x}): array {} vs libm {reference}",
                    arr[n]
                );
            }
        }
    }

    #[test]
    fn deep_evanescent_orders_do_not_overflow() {
        // Start order far above the turning point: exercises the rescaling.
        let arr = bessel_j_array(500, 20.0);
        assert!(arr.iter().all(|v| v.is_finite()));
        assert!((arr[0] - libm::jn(0, 20.0)).abs() < 1e-12);
        assert!(arr[400].abs() < 1e-200, "J_400(20) should be negligible");
    }

    #[test]
    fn zero_and_tiny_arguments() {
        let arr = bessel_j_array(5, 0.0);
        assert_eq!(arr, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let arr = bessel_j_array(3, 1e-10);
        assert!((arr[0] - 1.0).abs() < 1e-15);
        assert!((arr[1] - 5e-11).abs() < 1e-25);
    }

    #[test]
    fn derivative_identities() {
        let x = 37.25;
        let arr = bessel_j_array(80, x);
        // J_0' = -J_1 exactly by construction.
        assert_eq!(bessel_j_deriv(&arr, 0), -arr[1]);
        // Compare against central differences of libm::jn in x.
        let h = 1e-6;
        for n in [1usize, 4, 19, 36, 50] {
            let fd = (libm::jn(n as i32, x + h) - libm::jn(n as i32, x - h)) / (2.0 * h);
            let got = bessel_j_deriv(&arr, n);
            assert!((got - fd).abs() < 1e-8, "J_{n}'({x}): {got} vs {fd}");
        }
    }

    #[test]
    fn wronskian_of_j_and_y() {
        // J_1(x) Y_0(x) - J_0(x) Y_1(x) = 2 / (π x).
        for &x in &[0.7, 5.0, 42.0, 310.0] {
            let w = libm::j1(x) * bessel_y0(x) - libm::j0(x) * bessel_y1(x);
            let expect = 2.0 / (std::f64::consts::PI * x);
            assert!((w - expect).abs() < 1e-13 * (1.0 + expect.abs()), "x = {x}");
        }
    }
}
