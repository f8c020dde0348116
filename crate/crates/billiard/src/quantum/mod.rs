//! Even-parity Dirichlet eigenstates of the billiard: eigen-wavenumbers,
//! boundary normal-derivative functions, the circle analytic oracle, and
//! Weyl-law completeness bookkeeping.
//!
//! The solver is the scaling method over circular waves `J_n(kr) cos(nφ)`
//! (regular interior Helmholtz solutions of the even symmetry class): one
//! generalized eigenproblem per small `k` tile yields every eigenvalue
//! within about a mean level spacing of the tile centre together with its
//! coefficient vector, from which the boundary function
//! `u(s) = n̂·∇ψ|_∂B` is evaluated directly. An independent boundary
//! integral discretization acts as a cross-check oracle in the test suite.

mod bim;
mod circle;
mod grid;
mod interior;
mod scaling;

pub use bim::bim_even_singular_value;
pub use circle::{circle_levels, CircleLevel};
pub use grid::BoundaryGrid;
pub use interior::{wavefunction_at, InteriorEvaluator};
pub use scaling::solve_window;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::BilliardShape;
use crate::spectra::SmoothCount;

/// Errors from the quantum layer.
#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    /// The requested window is outside what the solver supports.
    #[error("invalid window [{k_lo}, {k_hi}]: {reason}")]
    InvalidWindow {
        k_lo: f64,
        k_hi: f64,
        reason: &'static str,
    },
    /// The solved window disagrees with the smooth counting function.
    #[error(
        "staircase residual {residual:.2} levels near k = {near_k:.4}: \
         missing or spurious levels (basis or tiling too coarse)"
    )]
    MissingLevels { near_k: f64, residual: f64 },
    /// The whitened scaling matrix kept too few directions to be usable.
    #[error("scaling matrix ill conditioned: kept {kept} of {basis} basis directions")]
    IllConditioned { kept: usize, basis: usize },
    /// The basis needed for this window exceeds the configured cap.
    #[error("window needs a basis of {needed} functions, above the cap {cap}")]
    BasisTooLarge { needed: usize, cap: usize },
    /// Interior evaluation requested outside the domain.
    #[error("point ({x}, {y}) lies outside the billiard")]
    PointOutsideDomain { x: f64, y: f64 },
}

/// Symmetry class of a computed state (only the even class is built).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// Symmetric under reflection about the x axis.
    Even,
}

/// One eigenstate: wavenumber and boundary normal derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenstateRecord {
    /// Eigen-wavenumber (`E = k²`).
    pub k: f64,
    /// `u(s) = n̂·∇ψ` (outward normal) sampled at `s_j = j L / N_b` over the
    /// full boundary, normalized to `∮ (r·n̂) u² ds = 2k²`.
    pub u_samples: Vec<f64>,
    /// Symmetry class.
    pub parity: Parity,
    /// Number of boundary samples `N_b`.
    pub boundary_grid_size: usize,
}

/// A solved spectral window: consecutive even-parity levels plus the smooth
/// counting function fitted to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    /// Lower edge of the window.
    pub k_lo: f64,
    /// Upper edge of the window.
    pub k_hi: f64,
    /// Levels in strictly increasing `k` order.
    pub levels: Vec<EigenstateRecord>,
    /// Weyl polynomial with the constant fitted to this window's staircase.
    pub smooth: SmoothCount,
}

/// Tuning knobs of the window solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveOptions {
    /// Boundary samples per wavelength `2π/k` (also the `u` output grid).
    pub points_per_wavelength: f64,
    /// Floor on the boundary grid size.
    pub min_boundary_points: usize,
    /// Half-width of one solver tile in units of the local mean spacing.
    pub tile_spacings: f64,
    /// Relative eigenvalue cutoff of the tension-matrix truncation.
    pub truncation_eps: f64,
    /// Coefficient of the `(k r_max)^{1/3}` basis-size margin.
    pub basis_cube_margin: f64,
    /// Additive basis-size margin.
    pub basis_floor: usize,
    /// Hard cap on the basis size.
    pub max_basis: usize,
    /// Maximum staircase residual (in levels) before a window is rejected.
    ///
    /// The default suits mixed and chaotic shapes, whose staircases hug the
    /// Weyl curve to well under a level. Near-integrable spectra (the
    /// circle limit) fluctuate by ±2 levels or more at accessible `k`, so
    /// windows there need a larger tolerance and an external count check.
    pub completeness_tolerance: f64,
    /// Relative `k` distance below which two tile candidates are duplicates.
    pub dedup_relative: f64,
    /// Refinement passes per accepted level. The first sweep's estimates
    /// carry a bias quadratic in the distance from their tile centre and,
    /// rarely, a much larger shift when a noise eigenvalue crosses the
    /// state's; each pass re-solves near the previous estimate at two
    /// small offsets with a median tie-break. One pass is enough for
    /// `1e-6` relative accuracy; `0` keeps the raw sweep.
    pub refine_passes: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            points_per_wavelength: 9.5,
            min_boundary_points: 256,
            tile_spacings: 0.7,
            truncation_eps: 1e-13,
            basis_cube_margin: 8.0,
            basis_floor: 12,
            max_basis: 1400,
            completeness_tolerance: 1.5,
            dedup_relative: 1e-6,
            refine_passes: 1,
        }
    }
}

/// Length of the symmetry chord (the x-axis section of the domain).
///
/// The boundary crosses the axis at `θ = 0` (x = 1 + λ) and `θ = π`
/// (x = λ - 1), so the chord has length 2 for every member of the family.
pub fn symmetry_chord(_shape: &BilliardShape) -> f64 {
    2.0
}

/// Weyl terms of the even-parity counting function for `shape`, with the
/// constant left at zero (fit it per window with
/// [`SmoothCount::with_fitted_constant`]).
pub fn even_weyl(shape: &BilliardShape) -> SmoothCount {
    SmoothCount::even_half_domain(
        shape.area(),
        shape.perimeter(),
        symmetry_chord(shape),
        0.0,
    )
}

/// Smooth even-parity counting estimate at `k` (zero-constant convention).
pub fn weyl_count(shape: &BilliardShape, k: f64) -> f64 {
    even_weyl(shape).eval(k)
}
