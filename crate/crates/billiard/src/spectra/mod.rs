//! Level-spacing statistics: model distributions, maximum-likelihood fits,
//! spectral unfolding and goodness-of-fit measures.
//!
//! The models cover the standard phenomenology of mixed and localised
//! quantum chaos: Poisson (integrable), Wigner (GOE surmise), the Brody
//! interpolation for dynamically localised chaotic states, Berry-Robnik for
//! independent regular/chaotic superposition, and the Berry-Robnik-Brody
//! combination of both effects. Every model exposes the spacing density
//! `P(S)`, the gap probability `E(S)`, the cumulative distribution, and an
//! exact sampler, which makes the identities `P = E''` and `F = 1 + E'`
//! testable and gives the estimators synthetic ground truth to recover.

mod fit;
mod models;
mod unfold;

pub use fit::{
    fit_beta_dist, fit_brb, fit_brody, fit_rational, BetaDistFit, BrbFit, BrodyFit, RationalFit,
};
pub use models::{
    beta_dist_moments, poisson_gap, poisson_pdf, wigner_gap, wigner_pdf, BerryRobnikModel,
    BetaDistModel, BrbModel, BrodyModel,
};
pub use unfold::{unfold, SmoothCount, UnfoldedSpectrum};

use thiserror::Error;

/// Errors from the spectral-statistics layer.
#[derive(Debug, Error, PartialEq)]
pub enum SpectraError {
    /// A model parameter lies outside its admissible range.
    #[error("parameter {name} = {value} outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    /// Too few samples for a meaningful fit.
    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    /// A sample lies outside the model's support.
    #[error("sample {value} outside the model support (0, {limit})")]
    SampleOutOfRange { value: f64, limit: f64 },
    /// The optimizer stalled before reaching its tolerance.
    #[error("optimizer stalled at {best:?} with simplex spread {spread:.3e}")]
    OptimizerNotConverged { best: Vec<f64>, spread: f64 },
    /// Degenerate samples for a meaningful fit.
    #[error("{0}")]
    DegenerateFit(String),
    /// The level sequence is inconsistent with the smooth counting function:
    /// a level is likely missing or spurious near the reported wavenumber.
    #[error(
        "window inconsistent with the smooth counting function near k = {near_k}: \
         staircase residual {residual:.2} levels"
    )]
    IncompleteWindow { near_k: f64, residual: f64 },
}
