//! Shared numerical utilities: deterministic reductions, quadrature,
//! one- and multi-dimensional minimisation, and simple statistics.
//!
//! Everything here is written so that results are reproducible bit for bit:
//! summations use a fixed pairwise reduction tree over the input order, and
//! the optimisers take explicit tolerances and iteration caps instead of
//! relying on wall-clock or thread-dependent stopping rules.

/// Pairwise (cascade) summation.
///
/// Deterministic for a fixed input order and far better conditioned than a
/// naive left fold: the error grows like `O(log n)` rather than `O(n)`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 64;
    if values.len() <= BASE {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean of a slice via pairwise summation. Returns 0 for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    pairwise_sum(values) / values.len() as f64
}

/// Population variance (divides by `n`). Returns 0 for slices shorter than 2.
pub fn variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let sq: Vec<f64> = values.iter().map(|&v| (v - m) * (v - m)).collect();
    pairwise_sum(&sq) / values.len() as f64
}

/// Pearson correlation coefficient of paired samples.
///
/// Returns 0 when either marginal variance vanishes.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "pearson: length mismatch");
    if x.len() < 2 {
        return 0.0;
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Ordinary least-squares line fit `y = slope * x + intercept`.
///
/// Returns `(slope, intercept)`. Panics on fewer than two points or zero
/// spread in `x`.
pub fn ols_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len(), "ols_line: length mismatch");
    assert!(x.len() >= 2, "ols_line: need at least two points");
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    assert!(sxx > 0.0, "ols_line: x values are all identical");
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
///
/// Classic recursive scheme with Richardson correction; the recursion depth is
/// capped so pathological integrands cannot overflow the stack.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Nodes and weights of the 16-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Exact for polynomials up to degree 31; used for composite quadrature of
/// smooth periodic integrands where a fixed, deterministic node set matters.
pub const GAUSS_LEGENDRE_16: [(f64, f64); 16] = [
    (-0.989_400_934_991_649_9, 0.027_152_459_411_754_1),
    (-0.944_575_023_073_232_6, 0.062_253_523_938_647_9),
    (-0.865_631_202_387_831_7, 0.095_158_511_682_492_8),
    (-0.755_404_408_355_003_0, 0.124_628_971_255_533_9),
    (-0.617_876_244_402_643_7, 0.149_595_988_816_576_7),
    (-0.458_016_777_657_227_4, 0.169_156_519_395_002_5),
    (-0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
    (-0.095_012_509_837_637_45, 0.189_450_610_455_068_5),
    (0.095_012_509_837_637_45, 0.189_450_610_455_068_5),
    (0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
    (0.458_016_777_657_227_4, 0.169_156_519_395_002_5),
    (0.617_876_244_402_643_7, 0.149_595_988_816_576_7),
    (0.755_404_408_355_003_0, 0.124_628_971_255_533_9),
    (0.865_631_202_387_831_7, 0.095_158_511_682_492_8),
    (0.944_575_023_073_232_6, 0.062_253_523_938_647_9),
    (0.989_400_934_991_649_9, 0.027_152_459_411_754_1),
];

/// 16-point Gauss-Legendre quadrature of `f` over `[a, b]`.
pub fn gauss16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in &GAUSS_LEGENDRE_16 {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Brent's method for one-dimensional minimisation on a bracket `[a, b]`.
///
/// Combines golden-section steps with parabolic interpolation. Returns the
/// abscissa and value of the minimum. `tol` is a relative x-tolerance.
pub fn brent_min<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_2; // 2 - golden ratio
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut x = a + GOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-15;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            // Try a parabolic step through (v, w, x).
            let r = (x - w) * (fx - fv);
            let q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            let mut q2 = 2.0 * (q - r);
            if q2 > 0.0 {
                p = -p;
            }
            q2 = q2.abs();
            let e_old = e;
            e = d;
            if p.abs() < (0.5 * q2 * e_old).abs() && p > q2 * (a - x) && p < q2 * (b - x) {
                d = p / q2;
                let u = x + d;
                if (u - a) < tol2 || (b - u) < tol2 {
                    d = if m > x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + if d > 0.0 { tol1 } else { -tol1 }
        };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Result of a Nelder-Mead minimisation.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    /// Best point found.
    pub point: Vec<f64>,
    /// Objective value at `point`.
    pub value: f64,
    /// Number of iterations used.
    pub iterations: usize,
    /// Whether the simplex diameter criterion was met before `max_iter`.
    pub converged: bool,
}

/// Nelder-Mead downhill simplex minimisation.
///
/// `start` is the initial point, `scale` the per-coordinate initial simplex
/// edge lengths. Deterministic: no randomised restarts.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    scale: &[f64],
    tol: f64,
    max_iter: usize,
) -> SimplexResult {
    assert_eq!(start.len(), scale.len(), "nelder_mead: scale length mismatch");
    let n = start.len();
    assert!(n >= 1, "nelder_mead: need at least one dimension");
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += scale[i];
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        // Order the simplex by objective value.
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let best = idx[0];
        let worst = idx[n];
        let second_worst = idx[n - 1];

        let spread = (values[worst] - values[best]).abs();
        let scale_ref = values[best].abs().max(values[worst].abs()).max(1e-12);
        if spread <= tol * scale_ref {
            converged = true;
            break;
        }

        // Centroid of all points except the worst.
        let mut centroid = vec![0.0; n];
        for (i, p) in simplex.iter().enumerate() {
            if i == worst {
                continue;
            }
            for (c, &pi) in centroid.iter_mut().zip(p) {
                *c += pi;
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }

        let lerp = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(&c, &w)| c + t * (c - w))
                .collect()
        };

        let reflected = lerp(1.0);
        let fr = f(&reflected);
        if fr < values[best] {
            let expanded = lerp(2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            let contracted = if fr < values[worst] {
                lerp(0.5)
            } else {
                lerp(-0.5)
            };
            let fc = f(&contracted);
            if fc < values[worst].min(fr) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // Shrink towards the best vertex.
                let best_point = simplex[best].clone();
                for (i, p) in simplex.iter_mut().enumerate() {
                    if i == best {
                        continue;
                    }
                    for (pi, &bi) in p.iter_mut().zip(&best_point) {
                        *pi = bi + 0.5 * (*pi - bi);
                    }
                    values[i] = f(p);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    SimplexResult {
        point: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against a model CDF.
///
/// `samples` need not be sorted; a sorted copy is made internally.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: &F) -> f64 {
    assert!(!samples.is_empty(), "ks_statistic: empty sample");
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let c = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((c - lo).abs()).max((hi - c).abs());
    }
    d
}

/// Asymptotic Kolmogorov p-value `P(D > d)` for sample size `n`.
///
/// Uses the Kolmogorov series `2 Σ (-1)^{j-1} exp(-2 j² x²)` evaluated at
/// `x = d (√n + 0.12 + 0.11/√n)`, accurate for `n ≳ 35` and still a usable
/// approximation well below that.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let x = d * (sqrt_n + 0.12 + 0.11 / sqrt_n);
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * x * x).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Histogram with `bins` equal-width cells over `[lo, hi)`, normalised as a
/// probability density. Returns `(centers, density)`.
///
/// Samples outside the range are discarded; the density integrates to the
/// retained fraction.
pub fn histogram_density(samples: &[f64], lo: f64, hi: f64, bins: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(bins > 0 && hi > lo, "histogram_density: bad layout");
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        if x >= lo && x < hi {
            let b = ((x - lo) / width) as usize;
            counts[b.min(bins - 1)] += 1;
        }
    }
    let norm = 1.0 / (samples.len() as f64 * width);
    let centers = (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect();
    let density = counts.iter().map(|&c| c as f64 * norm).collect();
    (centers, density)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_exact_series() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }

    #[test]
    fn pairwise_sum_is_well_conditioned() {
        // 1 + 1e-16 repeated: naive left fold loses the tiny terms entirely.
        let mut xs = vec![1.0f64];
        xs.extend(std::iter::repeat(1e-16).take(1 << 16));
        let got = pairwise_sum(&xs);
        let expect = 1.0 + 65536.0 * 1e-16;
        // The 64-wide base case still folds sequentially, so up to ~64 tiny
        // terms can be absorbed; a naive fold would lose all 6.5e-12.
        assert!((got - expect).abs() < 2e-14, "got {got}, want {expect}");
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let got = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((got - 2.0).abs() < 1e-10);
        let got = adaptive_simpson(&|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-12);
        assert!((got - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gauss16_is_spectrally_accurate_on_polynomials() {
        // Degree-31 exactness: x^30 over [0, 1].
        let got = gauss16(&|x: f64| x.powi(30), 0.0, 1.0);
        assert!((got - 1.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn brent_finds_quartic_minimum() {
        let f = |x: f64| (x - 1.25).powi(4) + 3.0;
        let (x, fx) = brent_min(&f, -4.0, 7.0, 1e-10, 200);
        assert!((x - 1.25).abs() < 1e-3, "x = {x}");
        assert!((fx - 3.0).abs() < 1e-10);
    }

    #[test]
    fn brent_handles_asymmetric_brackets() {
        let f = |x: f64| -(x * (4.0 - x));
        let (x, _) = brent_min(&f, 0.0, 3.1, 1e-12, 200);
        // x-accuracy at a parabolic minimum is limited to ~sqrt(eps).
        assert!((x - 2.0).abs() < 1e-7, "x = {x}");
    }

    #[test]
    fn nelder_mead_minimises_rosenbrock() {
        let rosen = |p: &[f64]| {
            let (x, y) = (p[0], p[1]);
            (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
        };
        let r = nelder_mead(&rosen, &[-1.2, 1.0], &[0.5, 0.5], 1e-14, 4000);
        assert!(r.converged);
        assert!((r.point[0] - 1.0).abs() < 1e-4 && (r.point[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn ks_statistic_detects_wrong_model() {
        // Uniform grid points against the uniform CDF: tiny statistic.
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&xs, &|x: f64| x.clamp(0.0, 1.0));
        assert!(d < 1.0e-3 + 1e-12);
        // Same points against a quadratic CDF: large statistic.
        let d = ks_statistic(&xs, &|x: f64| (x * x).clamp(0.0, 1.0));
        assert!(d > 0.2);
    }

    #[test]
    fn ks_pvalue_known_values() {
        // At x = d sqrt(n) around 1.36 the asymptotic p-value is ~5%.
        let n = 10_000;
        let d = 1.358 / (n as f64).sqrt();
        let p = ks_pvalue(d, n);
        assert!((p - 0.05).abs() < 0.005, "p = {p}");
        assert!(ks_pvalue(0.5, 10_000) < 1e-12);
        assert!(ks_pvalue(1e-4, 100) > 0.999);
    }

    #[test]
    fn histogram_density_integrates_to_one() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0).collect();
        let (_, dens) = histogram_density(&xs, 0.0, 1.0, 32);
        let total: f64 = dens.iter().sum::<f64>() / 32.0;
        assert!((total - 1.0).abs() < 1e-12);
    }
}
