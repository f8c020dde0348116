//! Classical and quantum dynamics of a one-parameter billiard family.
//!
//! The billiard boundary is the image of the unit circle under the conformal
//! map `w(z) = z + λ z²`. As the deformation `λ` grows from 0 to 1/2 the
//! classical dynamics passes from integrable (circle) through a mixed phase
//! space to almost fully chaotic motion, which makes the family a clean
//! laboratory for quantum chaos. This crate provides the full pipeline:
//!
//! * [`geometry`] — boundary curve, arclength parametrisation, curvature;
//! * [`classical`] — the bounce map in Birkhoff coordinates, momentum
//!   transport times, and a phase-space portrait separating regular from
//!   chaotic motion;
//! * [`special`] / [`numerics`] — Bessel arrays, quadrature, optimisers and
//!   deterministic reductions used throughout;
//! * [`quantum`] — even-parity Helmholtz eigenstates via the boundary
//!   scaling method, represented by normal derivatives on the boundary,
//!   plus smooth counting functions and an independent boundary-integral
//!   cross-check;
//! * [`husimi`] — coherent-state projections of eigenstates onto the
//!   classical section, and localisation measures built from them;
//! * [`spectra`] — level-spacing models (Poisson, Wigner, Brody, mixed
//!   phase-space families), maximum-likelihood fits, spectral unfolding and
//!   goodness-of-fit statistics;
//! * [`cli`] — deterministic artifact formats, run configuration and the
//!   staged command-line pipeline behind the `billiard` binary.
//!
//! Floating point throughout is `f64`: the eigenvalue accuracy targets and
//! the special-function tails leave no headroom for single precision.

pub mod classical;
pub mod cli;
pub mod geometry;
pub mod husimi;
pub mod numerics;
pub mod quantum;
pub mod special;
pub mod spectra;
