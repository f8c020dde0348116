//! Spectral unfolding against a smooth counting function.
//!
//! Unfolding maps each level `k_m` to `x_m = N̄(k_m)`, where `N̄` is the
//! smooth (Weyl) part of the counting staircase; the transformed sequence
//! has unit mean density, which is the normalisation every spacing model
//! assumes. The smooth part of a two-dimensional billiard spectrum is a
//! quadratic polynomial in `k`, with the area in the leading term and the
//! boundary length in the subleading one.

use serde::{Deserialize, Serialize};

use super::SpectraError;

/// Smooth counting function `N̄(k) = a₂k² + a₁k + a₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothCount {
    /// Coefficient of `k²` (area term).
    pub a2: f64,
    /// Coefficient of `k` (boundary term).
    pub a1: f64,
    /// Constant term, usually fitted to the window at hand.
    pub a0: f64,
}

impl SmoothCount {
    /// A counting polynomial with explicit coefficients.
    pub fn new(a2: f64, a1: f64, a0: f64) -> Self {
        Self { a2, a1, a0 }
    }

    /// Weyl terms of the even-parity (half-domain) spectrum of a mirror
    /// symmetric billiard.
    ///
    /// The half domain has area `area/2` and a boundary made of half the
    /// original curve (length `perimeter/2`, Dirichlet) plus the symmetry
    /// chord (length `chord`, Neumann for the even class). Dirichlet
    /// boundary repels levels and Neumann attracts them, hence the sign
    /// split in the linear term. The constant collects corner and curvature
    /// corrections and is best fitted per window.
    pub fn even_half_domain(area: f64, perimeter: f64, chord: f64, constant: f64) -> Self {
        Self {
            a2: 0.5 * area / (4.0 * std::f64::consts::PI),
            a1: -(0.5 * perimeter - chord) / (4.0 * std::f64::consts::PI),
            a0: constant,
        }
    }

    /// Replaces the constant with the least-squares match of `N̄(k_m)` to
    /// the half-integer staircase `m + 1/2` over the given window.
    ///
    /// For a window that does not start at the ground state the constant
    /// also absorbs the (integer) number of levels below the window, so the
    /// fitted polynomial is window-specific.
    pub fn with_fitted_constant(mut self, levels: &[f64]) -> Self {
        assert!(!levels.is_empty(), "cannot fit a constant to an empty window");
        let mut sum = 0.0;
        for (m, &k) in levels.iter().enumerate() {
            sum += (m as f64 + 0.5) - (self.a2 * k * k + self.a1 * k);
        }
        self.a0 = sum / levels.len() as f64;
        self
    }

    /// The counting polynomial at `k`.
    pub fn eval(&self, k: f64) -> f64 {
        (self.a2 * k + self.a1) * k + self.a0
    }

    /// The smooth level density `dN̄/dk`.
    pub fn density(&self, k: f64) -> f64 {
        2.0 * self.a2 * k + self.a1
    }
}

/// An unfolded spectral window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldedSpectrum {
    /// Unfolded positions `x_m = N̄(k_m)`, strictly increasing.
    pub x: Vec<f64>,
    /// Nearest-neighbour spacings `x_{m+1} - x_m`.
    pub spacings: Vec<f64>,
    /// Mean spacing (NaN when the window holds fewer than two levels).
    pub mean_spacing: f64,
}

/// Unfolds a sorted window of levels with the given smooth counting
/// function.
///
/// Besides the transformation itself this verifies that the window is
/// consistent with the smooth density: the unfolded span `x_n - x_1` must
/// match the level count to within a few levels, otherwise levels are
/// missing or spurious (or the counting function belongs to a different
/// symmetry class) and every downstream statistic would be biased. Genuine
/// spectra fluctuate around the smooth staircase, so the tolerance grows
/// with the window (`max(3, 0.05 n)` levels).
pub fn unfold(levels: &[f64], count: &SmoothCount) -> Result<UnfoldedSpectrum, SpectraError> {
    if levels.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SpectraError::DegenerateFit(
            "levels must be strictly increasing".into(),
        ));
    }
    let x: Vec<f64> = levels.iter().map(|&k| count.eval(k)).collect();
    if let Some(w) = x.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(SpectraError::DegenerateFit(format!(
            "counting function is not increasing across the window (x = {} then {})",
            w[0], w[1]
        )));
    }
    if x.len() >= 2 {
        let span = x[x.len() - 1] - x[0];
        let residual = span - (x.len() - 1) as f64;
        let tolerance = (0.05 * x.len() as f64).max(3.0);
        if residual.abs() > tolerance {
            return Err(SpectraError::IncompleteWindow {
                near_k: levels[levels.len() - 1],
                residual,
            });
        }
    }
    let spacings: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mean_spacing = if spacings.is_empty() {
        f64::NAN
    } else {
        crate::numerics::mean(&spacings)
    };
    Ok(UnfoldedSpectrum {
        x,
        spacings,
        mean_spacing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Levels whose density is exactly the smooth polynomial: unfolded
    /// positions are a unit-density renewal sequence by construction.
    fn synthetic_levels(count: &SmoothCount, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = 10.0 + rng.gen_range(0.0..1.0);
        let mut levels = Vec::with_capacity(n);
        for _ in 0..n {
            x += rng.gen_range(0.5..1.5);
            // Invert a2 k^2 + a1 k + a0 = x for the positive root.
            let (a2, a1, a0) = (count.a2, count.a1, count.a0 - x);
            let k = (-a1 + (a1 * a1 - 4.0 * a2 * a0).sqrt()) / (2.0 * a2);
            levels.push(k);
        }
        levels
    }

    #[test]
    fn exact_density_unfolds_to_unit_mean_spacing() {
        let count = SmoothCount::new(0.09, 0.21, -0.4);
        let levels = synthetic_levels(&count, 4000, 7);
        let unfolded = unfold(&levels, &count).unwrap();
        assert!(
            (unfolded.mean_spacing - 1.0).abs() < 0.02,
            "mean spacing = {}",
            unfolded.mean_spacing
        );
        assert_eq!(unfolded.spacings.len(), 3999);
        assert!(unfolded.spacings.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn single_level_gives_empty_spacings() {
        let count = SmoothCount::new(0.1, 0.0, 0.0);
        let unfolded = unfold(&[5.0], &count).unwrap();
        assert_eq!(unfolded.x.len(), 1);
        assert!(unfolded.spacings.is_empty());
        assert!(unfolded.mean_spacing.is_nan());
    }

    #[test]
    fn gutted_window_is_flagged_as_incomplete() {
        let count = SmoothCount::new(0.09, 0.21, -0.4);
        let mut levels = synthetic_levels(&count, 200, 9);
        // Remove a block from the middle: the span stays, the count drops.
        levels.drain(80..95);
        match unfold(&levels, &count) {
            Err(SpectraError::IncompleteWindow { residual, .. }) => {
                assert!(
                    (residual - 15.0).abs() < 6.0,
                    "residual = {residual}, expected about +15"
                );
            }
            other => panic!("expected IncompleteWindow, got {other:?}"),
        }
    }

    #[test]
    fn unsorted_input_is_rejected() {
        let count = SmoothCount::new(0.1, 0.0, 0.0);
        match unfold(&[3.0, 2.0, 4.0], &count) {
            Err(SpectraError::DegenerateFit(_)) => {}
            other => panic!("expected DegenerateFit, got {other:?}"),
        }
    }

    #[test]
    fn fitted_constant_centres_the_staircase() {
        let count = SmoothCount::new(0.09, 0.21, 0.0);
        let levels = synthetic_levels(&count, 1000, 11);
        // Shift the truth by a known offset and recover it.
        let shifted = SmoothCount::new(0.09, 0.21, -25.0).with_fitted_constant(&levels);
        // x starts near 10 + 0..1; indices restart at 0, so the fitted
        // constant moves the staircase onto m + 1/2 (offset about -10).
        let x0 = shifted.eval(levels[0]);
        assert!((x0 - 0.5).abs() < 3.0, "x0 = {x0}");
        let unfolded = unfold(&levels, &shifted).unwrap();
        assert!((unfolded.mean_spacing - 1.0).abs() < 0.02);
    }

    #[test]
    fn even_half_domain_coefficients() {
        let count = SmoothCount::even_half_domain(4.0 * std::f64::consts::PI, 8.0, 2.0, 0.3);
        // a2 = (area/2)/(4pi) = 0.5; a1 = -(4 - 2)/(4pi).
        assert!((count.a2 - 0.5).abs() < 1e-15);
        assert!((count.a1 + 2.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert_eq!(count.a0, 0.3);
        assert!(count.density(10.0) > 0.0);
    }
}
