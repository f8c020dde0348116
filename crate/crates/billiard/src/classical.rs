//! Classical bounce map, momentum transport, and the phase-space portrait.
//!
//! Phase space is the standard Birkhoff section of billiard dynamics: a
//! collision is `(s, p)` with `s` the arclength of the impact point and
//! `p ∈ (-1, 1)` the velocity component along the boundary tangent (the sine
//! of the reflection angle measured from the normal). The bounce map is
//! area-preserving in these coordinates, so uniform cell counting on an
//! `(s, p)` grid directly estimates invariant measure.
//!
//! The map itself is computed geometrically: launch a ray into the domain,
//! find its next boundary crossing by Newton iteration seeded with the exact
//! circle-billiard chord, and fall back to a dense angular scan with
//! bisection whenever Newton fails to produce a valid crossing or the shape
//! has concave arcs (where a chord may cross the boundary more than twice
//! and the *first* crossing must be selected).

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::BilliardShape;

const TAU: f64 = 2.0 * std::f64::consts::PI;
/// Launches closer to tangency than this are rejected outright.
const TANGENT_GUARD: f64 = 1.0 - 1e-12;
/// Minimum chord length accepted as a genuine crossing (filters the launch
/// point itself, which always lies on the ray).
const MIN_TRAVEL: f64 = 1e-9;

/// Errors from the classical dynamics layer.
#[derive(Debug, Error, PartialEq)]
pub enum ClassicalError {
    /// |p| is so close to 1 that the ray cannot leave the boundary.
    #[error("launch is tangential: |p| = {0} exceeds the supported range")]
    TangentialLaunch(f64),
    /// Root finding failed to locate the next boundary crossing.
    #[error("no boundary crossing found for launch at theta = {theta}, p = {p}")]
    NoIntersection { theta: f64, p: f64 },
    /// The transport series did not reach a plateau within the collision cap.
    #[error(
        "momentum spreading not saturated after {collisions} collisions \
         (tail drift {drift:.3e} of the plateau level)"
    )]
    NotConverged { collisions: usize, drift: f64 },
    /// Every candidate seed for the chaotic component turned out regular.
    #[error("no chaotic seed found: largest Lyapunov estimate was {best:.3e}")]
    SeedInRegularRegion { best: f64 },
}

/// A point of the Birkhoff collision section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    /// Arclength of the collision point, in `[0, L)`.
    pub s: f64,
    /// Tangential velocity component (sine of the reflection angle).
    pub p: f64,
}

/// One application of the bounce map in arclength coordinates.
pub fn bounce(shape: &BilliardShape, pt: &PhasePoint) -> Result<PhasePoint, ClassicalError> {
    if !(pt.p.abs() < TANGENT_GUARD) {
        return Err(ClassicalError::TangentialLaunch(pt.p));
    }
    let theta1 = shape.theta_of_arclength(pt.s);
    let (theta2, p2) = bounce_theta(shape, theta1, pt.p)?;
    Ok(PhasePoint {
        s: shape.arclength_of_theta(theta2),
        p: p2,
    })
}

/// One application of the bounce map in the boundary map parameter.
///
/// Faster than [`bounce`] (no arclength conversions); this is the form used
/// in all long iteration loops. Returns the wrapped arrival parameter and
/// the new tangential momentum.
pub fn bounce_theta(
    shape: &BilliardShape,
    theta1: f64,
    p: f64,
) -> Result<(f64, f64), ClassicalError> {
    if !(p.abs() < TANGENT_GUARD) {
        return Err(ClassicalError::TangentialLaunch(p));
    }
    let lambda = shape.lambda();
    let (pos1, vel1) = frame(lambda, theta1);
    let speed1 = vel1.norm();
    let tangent1 = vel1 / speed1;
    let normal1 = Vector2::new(-tangent1.y, tangent1.x);
    let q = (1.0 - p * p).sqrt();
    let dir = p * tangent1 + q * normal1;

    // Exact chord of the circle billiard as the Newton seed: a ray leaving
    // angle θ₁ in direction ψ meets the unit circle again at 2ψ - θ₁ + π.
    let psi = dir.y.atan2(dir.x);
    let seed = 2.0 * psi - theta1 + std::f64::consts::PI;

    let candidate = newton_crossing(lambda, &pos1, &dir, seed);
    let theta2 = match candidate {
        // On convex members a non-launch crossing is unique, so Newton's
        // answer is the answer. Concave members (λ > 1/4) can have several
        // crossings and need the scan to pick the first one along the ray.
        Some(t) if lambda <= 0.25 => t,
        _ if lambda <= 0.25 => bracket_crossing(lambda, &pos1, &dir, theta1)
            .ok_or(ClassicalError::NoIntersection { theta: theta1, p })?,
        _ => scan_crossing(lambda, &pos1, &dir, theta1)
            .ok_or(ClassicalError::NoIntersection { theta: theta1, p })?,
    };

    let (_, vel2) = frame(lambda, theta2);
    let p2 = dir.dot(&vel2) / vel2.norm();
    Ok((theta2.rem_euclid(TAU), p2.clamp(-1.0, 1.0)))
}

/// Position and θ-velocity of the boundary curve, with one `sin_cos` pair
/// per harmonic (hot path; avoids the bookkeeping of `BoundaryPoint`).
#[inline]
fn frame(lambda: f64, theta: f64) -> (Vector2<f64>, Vector2<f64>) {
    let (s1, c1) = theta.sin_cos();
    let (s2, c2) = (2.0 * theta).sin_cos();
    (
        Vector2::new(c1 + lambda * c2, s1 + lambda * s2),
        Vector2::new(-s1 - 2.0 * lambda * s2, c1 + 2.0 * lambda * c2),
    )
}

/// Signed distance of the boundary point from the launch ray (zero on the
/// ray line); its roots are the candidate crossings.
#[inline]
fn ray_miss(lambda: f64, pos1: &Vector2<f64>, dir: &Vector2<f64>, theta: f64) -> (f64, f64) {
    let (pos, vel) = frame(lambda, theta);
    let g = dir.x * (pos.y - pos1.y) - dir.y * (pos.x - pos1.x);
    let dg = dir.x * vel.y - dir.y * vel.x;
    (g, dg)
}

fn travel(lambda: f64, pos1: &Vector2<f64>, dir: &Vector2<f64>, theta: f64) -> f64 {
    let (pos, _) = frame(lambda, theta);
    (pos - pos1).dot(dir)
}

/// Newton iteration for a ray-boundary crossing. Returns a validated
/// crossing (forward travel above the chord floor) or `None`.
fn newton_crossing(
    lambda: f64,
    pos1: &Vector2<f64>,
    dir: &Vector2<f64>,
    seed: f64,
) -> Option<f64> {
    let mut theta = seed;
    for _ in 0..50 {
        let (g, dg) = ray_miss(lambda, pos1, dir, theta);
        if dg == 0.0 {
            return None;
        }
        let step = (g / dg).clamp(-0.5, 0.5);
        theta -= step;
        if step.abs() < 1e-13 {
            let (g, _) = ray_miss(lambda, pos1, dir, theta);
            if g.abs() < 1e-10 && travel(lambda, pos1, dir, theta) > MIN_TRAVEL {
                return Some(theta);
            }
            return None;
        }
    }
    None
}

/// Guaranteed crossing for convex members, used when the Newton fast path
/// slides into the launch-point root (glancing chords).
///
/// On a convex boundary the miss function has exactly two transversal roots
/// per period: the launch point `θ₁` (where `dg < 0`, so `g` passes + → -)
/// and the arrival `θ₂`. Hence `g(θ₁ + ε) < 0` and `g(θ₁ + 2π - ε) > 0`
/// always bracket `θ₂`; a short bisection plus Newton polish pins it down.
/// The tangency guard keeps the two roots at least ~3·10⁻⁶ apart, far wider
/// than the bracket inset.
fn bracket_crossing(
    lambda: f64,
    pos1: &Vector2<f64>,
    dir: &Vector2<f64>,
    theta1: f64,
) -> Option<f64> {
    const INSET: f64 = 1e-7;
    let mut lo = theta1 + INSET;
    let mut hi = theta1 + TAU - INSET;
    let (g_lo, _) = ray_miss(lambda, pos1, dir, lo);
    let (g_hi, _) = ray_miss(lambda, pos1, dir, hi);
    if g_lo == 0.0 {
        return Some(lo);
    }
    if g_lo.signum() == g_hi.signum() {
        return None; // numerically tangential beyond the guard's reach
    }
    let sign_lo = g_lo.signum();
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        let (g, _) = ray_miss(lambda, pos1, dir, mid);
        if g == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if g.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut theta = 0.5 * (lo + hi);
    for _ in 0..6 {
        let (g, dg) = ray_miss(lambda, pos1, dir, theta);
        if dg == 0.0 {
            break;
        }
        let step = g / dg;
        theta -= step;
        if step.abs() < 1e-13 {
            break;
        }
    }
    let (g, _) = ray_miss(lambda, pos1, dir, theta);
    if g.abs() < 1e-10 && travel(lambda, pos1, dir, theta) > MIN_TRAVEL {
        Some(theta)
    } else {
        None
    }
}

/// Dense scan over one full turn, bracketing every sign change of the ray
/// miss function and selecting the crossing with the smallest forward travel.
fn scan_crossing(
    lambda: f64,
    pos1: &Vector2<f64>,
    dir: &Vector2<f64>,
    theta1: f64,
) -> Option<f64> {
    const SAMPLES: usize = 1440;
    let h = TAU / SAMPLES as f64;
    // Sample strictly inside (θ₁, θ₁ + 2π) so that the trivial root at the
    // launch point sits in the unsampled end gaps.
    let mut best: Option<(f64, f64)> = None;
    let mut prev_t = theta1 + 0.5 * h;
    let (mut prev_g, _) = ray_miss(lambda, pos1, dir, prev_t);
    for i in 1..SAMPLES {
        let t = theta1 + (i as f64 + 0.5) * h;
        let (g, _) = ray_miss(lambda, pos1, dir, t);
        if prev_g == 0.0 || prev_g.signum() != g.signum() {
            let root = bisect_root(lambda, pos1, dir, prev_t, t, prev_g);
            let tr = travel(lambda, pos1, dir, root);
            if tr > MIN_TRAVEL && best.map_or(true, |(bt, _)| tr < bt) {
                best = Some((tr, root));
            }
        }
        prev_t = t;
        prev_g = g;
    }
    best.map(|(_, theta)| theta)
}

fn bisect_root(
    lambda: f64,
    pos1: &Vector2<f64>,
    dir: &Vector2<f64>,
    mut lo: f64,
    mut hi: f64,
    g_lo: f64,
) -> f64 {
    let mut sign_lo = g_lo.signum();
    if sign_lo == 0.0 {
        return lo;
    }
    for _ in 0..70 {
        let mid = 0.5 * (lo + hi);
        let (g, _) = ray_miss(lambda, pos1, dir, mid);
        if g == 0.0 {
            return mid;
        }
        if g.signum() == sign_lo {
            lo = mid;
            sign_lo = g.signum();
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Bounce with a deterministic retry ladder for near-tangential states.
///
/// Long ensembles occasionally diffuse numerically onto |p| ≈ 1; rather than
/// aborting a 10⁸-collision run, the momentum is nudged inward by a few
/// parts in 10⁹ (well below any statistical resolution) and the bounce
/// retried.
fn bounce_theta_robust(
    shape: &BilliardShape,
    theta: f64,
    p: f64,
) -> Result<(f64, f64), ClassicalError> {
    let mut p_try = p;
    for attempt in 0..4 {
        match bounce_theta(shape, theta, p_try) {
            Ok(out) => return Ok(out),
            Err(ClassicalError::TangentialLaunch(_)) | Err(ClassicalError::NoIntersection { .. }) => {
                let back_off = 3e-9 * 10f64.powi(attempt);
                p_try = p_try.signum() * (p_try.abs().min(1.0) - back_off);
            }
            Err(e) => return Err(e),
        }
    }
    bounce_theta(shape, theta, p_try)
}

/// Configuration of a momentum-transport measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransportConfig {
    /// Number of candidate trajectories, launched at `p = 0` with uniform `s`.
    pub ensemble: usize,
    /// Plateau fractions at which to report crossing times (each in (0,1)).
    pub fractions: Vec<f64>,
    /// Hard cap on collisions per trajectory.
    pub max_collisions: usize,
    /// RNG seed for the launch positions.
    pub seed: u64,
    /// Final fraction of the series used to estimate the plateau.
    pub tail_fraction: f64,
    /// Maximum allowed relative drift across the tail before the series is
    /// declared unsaturated.
    pub drift_tolerance: f64,
    /// Launches must leave the band `|p| < chaotic_filter_band` within this
    /// many collisions to count as part of the chaotic component; `0`
    /// disables the filter and keeps every launch.
    pub chaotic_filter_collisions: usize,
    /// Momentum band of the chaotic-component launch filter.
    pub chaotic_filter_band: f64,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self {
            ensemble: 100_000,
            fractions: vec![0.5, 0.7, 0.8, 0.9],
            max_collisions: 4000,
            seed: 1,
            tail_fraction: 0.1,
            drift_tolerance: 0.05,
            chaotic_filter_collisions: 8,
            chaotic_filter_band: 0.3,
        }
    }
}

/// Crossing time of one plateau fraction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransportTime {
    /// Plateau fraction `f`.
    pub fraction: f64,
    /// First collision count at which `⟨p²⟩` reaches `f` times the plateau.
    pub collisions: usize,
}

/// Result of a momentum-transport measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportResult {
    /// `⟨p²⟩` after `n` collisions; entry 0 is the launch value (zero).
    pub mean_p_squared: Vec<f64>,
    /// Plateau level (mean of the tail window).
    pub plateau: f64,
    /// Crossing times for the requested fractions, in input order.
    pub times: Vec<TransportTime>,
    /// Candidate launches drawn.
    pub launched: usize,
    /// Launches that passed the chaotic-component filter and entered the
    /// average.
    pub used: usize,
}

/// Measures how fast an ensemble launched transversally (`p = 0`) spreads in
/// momentum: the classical transport (ergodicity) time of the billiard.
///
/// Launch points are uniform in arclength on the `p = 0` line, restricted to
/// the chaotic component: a launch that fails to leave a small momentum band
/// within a few collisions sits on an island or in the marginal sticky layer
/// and never takes part in the transport, so it is dropped (the filter knobs
/// live in [`TransportConfig`]). The ensemble-averaged `⟨p²⟩(n)` of the
/// remaining trajectories rises from zero towards an equilibrium plateau
/// (1/3 for a fully chaotic boundary), and the crossing times of the
/// requested plateau fractions are read off the series. Deterministic for a
/// fixed seed, independent of thread count.
pub fn transport_time(
    shape: &BilliardShape,
    config: &TransportConfig,
) -> Result<TransportResult, ClassicalError> {
    assert!(config.ensemble > 0 && config.max_collisions > 8);
    assert!(
        config.fractions.iter().all(|f| (0.0..1.0).contains(f)),
        "plateau fractions must lie in (0, 1)"
    );
    assert!(config.chaotic_filter_collisions < config.max_collisions);
    let n_max = config.max_collisions;
    let n_filter = config.chaotic_filter_collisions;
    let band_sq = config.chaotic_filter_band * config.chaotic_filter_band;
    const CHUNK: usize = 2048;
    let chunk_series: Vec<(Vec<f64>, usize)> = (0..config.ensemble)
        .collect::<Vec<_>>()
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut local = vec![0.0f64; n_max + 1];
            let mut used = 0usize;
            let mut head = vec![0.0f64; n_filter];
            for &particle in chunk {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(particle as u64 + 1);
                // Launches are uniform in arclength (the boundary measure of
                // the invariant section density), not in the map parameter.
                let s0 = rng.gen_range(0.0..shape.perimeter());
                let mut theta = shape.theta_of_arclength(s0);
                let mut p = 0.0f64;
                // Head of the trajectory decides the chaotic filter; failing
                // launches are abandoned without paying for the full cap.
                for v in head.iter_mut() {
                    if let Ok((t2, p2)) = bounce_theta_robust(shape, theta, p) {
                        theta = t2;
                        p = p2;
                    }
                    *v = p * p;
                }
                if n_filter > 0 && head.iter().all(|&v| v < band_sq) {
                    continue;
                }
                used += 1;
                for (slot, v) in local.iter_mut().skip(1).zip(&head) {
                    *slot += v;
                }
                for slot in local.iter_mut().take(n_max + 1).skip(1 + n_filter) {
                    match bounce_theta_robust(shape, theta, p) {
                        Ok((t2, p2)) => {
                            theta = t2;
                            p = p2;
                        }
                        Err(_) => {}
                    }
                    *slot += p * p;
                }
            }
            (local, used)
        })
        .collect();

    // Fixed-order reduction over chunks keeps the sum bit-stable regardless
    // of how rayon scheduled them.
    let mut series = vec![0.0f64; n_max + 1];
    let mut used = 0usize;
    for (local, n) in &chunk_series {
        used += n;
        for (acc, v) in series.iter_mut().zip(local) {
            *acc += v;
        }
    }
    if used == 0 {
        return Err(ClassicalError::SeedInRegularRegion { best: 0.0 });
    }
    let inv = 1.0 / used as f64;
    for v in &mut series {
        *v *= inv;
    }

    let tail_len = ((n_max as f64 * config.tail_fraction) as usize).max(8);
    let tail = &series[n_max + 1 - tail_len..];
    let plateau = crate::numerics::mean(tail);
    let xs: Vec<f64> = (0..tail_len).map(|i| i as f64).collect();
    let (slope, _) = crate::numerics::ols_line(&xs, tail);
    let drift = (slope * tail_len as f64 / plateau.max(1e-12)).abs();
    if drift > config.drift_tolerance {
        return Err(ClassicalError::NotConverged {
            collisions: n_max,
            drift,
        });
    }

    let mut times = Vec::with_capacity(config.fractions.len());
    for &f in &config.fractions {
        let target = f * plateau;
        let n = series.iter().position(|&v| v >= target).ok_or(
            ClassicalError::NotConverged {
                collisions: n_max,
                drift,
            },
        )?;
        times.push(TransportTime {
            fraction: f,
            collisions: n,
        });
    }

    Ok(TransportResult {
        mean_p_squared: series,
        plateau,
        times,
        launched: config.ensemble,
        used,
    })
}

/// Semiclassical parameter comparing the Heisenberg time with a classical
/// transport time of `collisions` bounces: `α = 2k / collisions`.
///
/// Large `α` means the quantum evolution resolves the classical transport
/// long before dynamical localisation can set in.
pub fn alpha(k: f64, collisions: usize) -> f64 {
    2.0 * k / collisions as f64
}

/// Two-trajectory estimate of the largest Lyapunov exponent (per collision)
/// of the orbit through `start`.
///
/// A partner orbit displaced by 10⁻⁹ in the `(θ, p)` metric is renormalised
/// to that distance after every collision; the mean log stretching rate
/// converges to ~0 on invariant tori and to an O(1) positive value in the
/// chaotic sea, which makes the two cases easy to separate.
pub fn lyapunov_estimate(
    shape: &BilliardShape,
    start: &PhasePoint,
    steps: usize,
) -> Result<f64, ClassicalError> {
    const D0: f64 = 1e-9;
    let mut ta = shape.theta_of_arclength(start.s);
    let mut pa = start.p;
    let mut tb = ta + D0 * std::f64::consts::FRAC_1_SQRT_2;
    let mut pb = pa + D0 * std::f64::consts::FRAC_1_SQRT_2;
    let mut sum = 0.0;
    for _ in 0..steps {
        let (na, qa) = bounce_theta_robust(shape, ta, pa)?;
        let (nb, qb) = bounce_theta_robust(shape, tb, pb)?;
        ta = na;
        pa = qa;
        let mut dt = nb - na;
        if dt > std::f64::consts::PI {
            dt -= TAU;
        } else if dt < -std::f64::consts::PI {
            dt += TAU;
        }
        let dp = qb - qa;
        let dist = (dt * dt + dp * dp).sqrt().max(1e-300);
        sum += (dist / D0).ln();
        let shrink = D0 / dist;
        tb = ta + dt * shrink;
        pb = pa + dp * shrink;
    }
    Ok(sum / steps as f64)
}

/// Configuration for mapping out the chaotic component on the section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChaoticGridConfig {
    /// Grid cells along `s`.
    pub nq: usize,
    /// Grid cells along `p`.
    pub np: usize,
    /// Collisions of the filling orbit.
    pub orbit_steps: usize,
    /// Collisions of the Lyapunov pre-check per candidate seed.
    pub lyapunov_steps: usize,
    /// Pre-check acceptance threshold on the Lyapunov estimate.
    pub lyapunov_threshold: f64,
    /// Candidate seeds as `(s / L, p)` pairs, tried in order.
    pub seed_fractions: Vec<(f64, f64)>,
}

impl Default for ChaoticGridConfig {
    fn default() -> Self {
        Self {
            nq: 400,
            np: 400,
            orbit_steps: 20_000_000,
            lyapunov_steps: 20_000,
            lyapunov_threshold: 0.05,
            seed_fractions: vec![
                (0.17, 0.31),
                (0.05, 0.11),
                (0.35, 0.47),
                (0.29, 0.73),
                (0.01, 0.93),
            ],
        }
    }
}

/// Indicator grid of the dominant chaotic component on the collision section.
///
/// Cells are uniform in `(s, p)`, which is the invariant area element of the
/// bounce map, so the chaotic fraction of cells is the relative invariant
/// measure `χ_C` of the component.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChaoticGrid {
    /// Deformation parameter of the underlying shape.
    pub lambda: f64,
    /// Grid cells along `s`.
    pub nq: usize,
    /// Grid cells along `p`.
    pub np: usize,
    /// Row-major (`j * nq + i`) cell labels: +1 chaotic, -1 regular.
    pub cells: Vec<i8>,
    /// Fraction of cells visited by the chaotic orbit.
    pub chi_c: f64,
    /// Seed that passed the pre-check, as `(s, p)`.
    pub seed: (f64, f64),
    /// Lyapunov estimate of the accepted seed.
    pub lyapunov: f64,
    /// Collisions used by the filling orbit.
    pub orbit_steps: usize,
}

impl ChaoticGrid {
    /// Cell column of arclength `s` (clamped).
    pub fn col(&self, s: f64, perimeter: f64) -> usize {
        (((s / perimeter) * self.nq as f64) as usize).min(self.nq - 1)
    }

    /// Cell row of momentum `p` (clamped).
    pub fn row(&self, p: f64) -> usize {
        ((((p + 1.0) / 2.0) * self.np as f64) as usize).min(self.np - 1)
    }

    /// Chaotic indicator of cell `(i, j)`: +1 or -1.
    pub fn label(&self, i: usize, j: usize) -> f64 {
        self.cells[j * self.nq + i] as f64
    }
}

/// Maps the dominant chaotic component by iterating a single chaotic orbit
/// and recording every cell it visits.
///
/// Candidate seeds are screened with a Lyapunov pre-check so that an orbit
/// on an invariant torus (which would trace a thin curve and badly
/// underestimate the component) is never used for filling. Fails with
/// [`ClassicalError::SeedInRegularRegion`] when no candidate passes, as
/// happens for the circle and near-circle members.
pub fn chaotic_grid(
    shape: &BilliardShape,
    config: &ChaoticGridConfig,
) -> Result<ChaoticGrid, ClassicalError> {
    assert!(config.nq > 0 && config.np > 0);
    let perimeter = shape.perimeter();
    let mut best = f64::NEG_INFINITY;
    let mut accepted = None;
    for &(fs, p) in &config.seed_fractions {
        let start = PhasePoint {
            s: fs * perimeter,
            p,
        };
        let lyap = lyapunov_estimate(shape, &start, config.lyapunov_steps)?;
        if lyap > best {
            best = lyap;
        }
        if lyap >= config.lyapunov_threshold {
            accepted = Some((start, lyap));
            break;
        }
    }
    let (start, lyapunov) =
        accepted.ok_or(ClassicalError::SeedInRegularRegion { best })?;

    let mut cells = vec![-1i8; config.nq * config.np];
    let mut theta = shape.theta_of_arclength(start.s);
    let mut p = start.p;
    let mut visited = 0usize;
    for _ in 0..config.orbit_steps {
        let (t2, p2) = bounce_theta_robust(shape, theta, p)?;
        theta = t2;
        p = p2;
        let s = shape.arclength_of_theta(theta);
        let i = (((s / perimeter) * config.nq as f64) as usize).min(config.nq - 1);
        let j = ((((p + 1.0) / 2.0) * config.np as f64) as usize).min(config.np - 1);
        let cell = &mut cells[j * config.nq + i];
        if *cell < 0 {
            *cell = 1;
            visited += 1;
        }
    }

    Ok(ChaoticGrid {
        lambda: shape.lambda(),
        nq: config.nq,
        np: config.np,
        cells,
        chi_c: visited as f64 / (config.nq * config.np) as f64,
        seed: (start.s, start.p),
        lyapunov,
        orbit_steps: config.orbit_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_point(rng: &mut ChaCha8Rng, perimeter: f64) -> PhasePoint {
        PhasePoint {
            s: rng.gen_range(0.0..perimeter),
            p: rng.gen_range(-0.98..0.98),
        }
    }

    #[test]
    fn circle_bounce_matches_closed_form() {
        // On the circle the chord geometry is exact: p is conserved and the
        // parameter advances by π - 2 asin(p) every bounce.
        let shape = BilliardShape::new(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let start = random_point(&mut rng, shape.perimeter());
            let out = bounce(&shape, &start).unwrap();
            assert!((out.p - start.p).abs() < 1e-12, "p drifted: {} -> {}", start.p, out.p);
            let expect =
                (start.s + std::f64::consts::PI - 2.0 * start.p.asin()).rem_euclid(shape.perimeter());
            assert!(
                (out.s - expect).abs() < 1e-9,
                "s: got {} want {expect}",
                out.s
            );
        }
    }

    #[test]
    fn circle_momentum_survives_long_orbits() {
        let shape = BilliardShape::new(0.0).unwrap();
        let mut pt = PhasePoint { s: 1.234, p: 0.4321 };
        for _ in 0..200 {
            pt = bounce(&shape, &pt).unwrap();
        }
        assert!((pt.p - 0.4321).abs() < 1e-12);
    }

    #[test]
    fn bounce_is_time_reversible() {
        for &l in &[0.12, 0.25, 0.4] {
            let shape = BilliardShape::new(l).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..40 {
                let start = random_point(&mut rng, shape.perimeter());
                let fwd = bounce(&shape, &start).unwrap();
                let back = bounce(
                    &shape,
                    &PhasePoint {
                        s: fwd.s,
                        p: -fwd.p,
                    },
                )
                .unwrap();
                let mut ds = (back.s - start.s).abs();
                ds = ds.min(shape.perimeter() - ds);
                assert!(ds < 1e-9, "lambda = {l}: s mismatch {ds}");
                assert!((back.p + start.p).abs() < 1e-9, "lambda = {l}");
            }
        }
    }

    #[test]
    fn bounce_preserves_phase_space_area() {
        // det ∂(s', p')/∂(s, p) = 1 for billiard maps in Birkhoff
        // coordinates; verified with central differences.
        for &l in &[0.2, 0.25, 0.4] {
            let shape = BilliardShape::new(l).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            for _ in 0..15 {
                let start = random_point(&mut rng, shape.perimeter());
                let h = 1e-6;
                let f = |s: f64, p: f64| {
                    let out = bounce(&shape, &PhasePoint { s, p }).unwrap();
                    (out.s, out.p)
                };
                let base = f(start.s, start.p);
                // Guard against the s-wraparound corrupting differences.
                let unwrap_near = |x: f64| {
                    let mut d = x - base.0;
                    if d > 0.5 * shape.perimeter() {
                        d -= shape.perimeter();
                    } else if d < -0.5 * shape.perimeter() {
                        d += shape.perimeter();
                    }
                    base.0 + d
                };
                let (sp, pp) = f(start.s + h, start.p);
                let (sm, pm) = f(start.s - h, start.p);
                let dsds = (unwrap_near(sp) - unwrap_near(sm)) / (2.0 * h);
                let dpds = (pp - pm) / (2.0 * h);
                let (sp, pp) = f(start.s, start.p + h);
                let (sm, pm) = f(start.s, start.p - h);
                let dsdp = (unwrap_near(sp) - unwrap_near(sm)) / (2.0 * h);
                let dpdp = (pp - pm) / (2.0 * h);
                let det = dsds * dpdp - dsdp * dpds;
                assert!(
                    (det - 1.0).abs() < 1e-5,
                    "lambda = {l}, start = {start:?}: det = {det}"
                );
            }
        }
    }

    #[test]
    fn outputs_stay_in_the_section() {
        let shape = BilliardShape::new(0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut pt = random_point(&mut rng, shape.perimeter());
        for _ in 0..5000 {
            pt = bounce(&shape, &pt).unwrap();
            assert!(pt.s >= 0.0 && pt.s < shape.perimeter());
            assert!(pt.p > -1.0 && pt.p < 1.0);
        }
    }

    #[test]
    fn tangential_launches_are_rejected() {
        let shape = BilliardShape::new(0.2).unwrap();
        let err = bounce(
            &shape,
            &PhasePoint {
                s: 1.0,
                p: 1.0 - 1e-13,
            },
        )
        .unwrap_err();
        assert!(matches!(err, ClassicalError::TangentialLaunch(_)));
        assert!(matches!(
            bounce(&shape, &PhasePoint { s: 1.0, p: -1.0 }),
            Err(ClassicalError::TangentialLaunch(_))
        ));
    }

    #[test]
    fn lyapunov_separates_torus_from_sea() {
        let circle = BilliardShape::new(0.0).unwrap();
        let l_circle = lyapunov_estimate(
            &circle,
            &PhasePoint { s: 0.3, p: 0.25 },
            4000,
        )
        .unwrap();
        assert!(l_circle.abs() < 0.02, "circle Lyapunov = {l_circle}");

        let chaotic = BilliardShape::new(0.25).unwrap();
        let l_chaos = lyapunov_estimate(
            &chaotic,
            &PhasePoint {
                s: 0.17 * chaotic.perimeter(),
                p: 0.31,
            },
            4000,
        )
        .unwrap();
        assert!(l_chaos > 0.1, "chaotic Lyapunov = {l_chaos}");
    }

    #[test]
    fn transport_rises_to_equilibrium() {
        let shape = BilliardShape::new(0.25).unwrap();
        let config = TransportConfig {
            ensemble: 3000,
            max_collisions: 900,
            seed: 7,
            // Small test ensemble: the tail slope is noisier than with the
            // default-sized ensembles the production tolerance assumes.
            drift_tolerance: 0.1,
            ..TransportConfig::default()
        };
        let result = transport_time(&shape, &config).unwrap();
        // Equilibrium of p² under the uniform section measure is 1/3.
        assert!(
            (0.25..0.42).contains(&result.plateau),
            "plateau = {}",
            result.plateau
        );
        assert_eq!(result.mean_p_squared[0], 0.0);
        let t: Vec<usize> = result.times.iter().map(|t| t.collisions).collect();
        assert!(t[0] < t[1] && t[1] < t[2] && t[2] < t[3], "times = {t:?}");
        assert!(t[3] < 400, "90% crossing unexpectedly late: {t:?}");
    }

    #[test]
    fn transport_is_reproducible() {
        let shape = BilliardShape::new(0.22).unwrap();
        let config = TransportConfig {
            ensemble: 500,
            max_collisions: 600,
            seed: 11,
            ..TransportConfig::default()
        };
        let a = transport_time(&shape, &config).unwrap();
        let b = transport_time(&shape, &config).unwrap();
        assert_eq!(a.mean_p_squared, b.mean_p_squared);
        assert_eq!(a.plateau, b.plateau);
    }

    #[test]
    fn unsaturated_series_is_flagged() {
        let shape = BilliardShape::new(0.2).unwrap();
        let config = TransportConfig {
            ensemble: 2000,
            max_collisions: 40, // far below the spreading time at λ = 0.2
            seed: 3,
            ..TransportConfig::default()
        };
        match transport_time(&shape, &config) {
            Err(ClassicalError::NotConverged { .. }) => {}
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn alpha_scales_with_wavenumber() {
        assert_eq!(alpha(100.0, 50), 4.0);
        assert_eq!(alpha(2000.0, 77), 2.0 * 2000.0 / 77.0);
    }

    #[test]
    fn chaotic_grid_covers_most_of_the_section_at_strong_deformation() {
        let shape = BilliardShape::new(0.25).unwrap();
        let config = ChaoticGridConfig {
            nq: 80,
            np: 80,
            orbit_steps: 400_000,
            lyapunov_steps: 4000,
            ..ChaoticGridConfig::default()
        };
        let grid = chaotic_grid(&shape, &config).unwrap();
        assert!(grid.chi_c > 0.9, "chi_c = {}", grid.chi_c);
        assert!(grid.lyapunov > 0.1);
        let plus = grid.cells.iter().filter(|&&c| c > 0).count();
        assert_eq!(plus as f64 / grid.cells.len() as f64, grid.chi_c);
    }

    #[test]
    fn circle_has_no_chaotic_seed() {
        let shape = BilliardShape::new(0.0).unwrap();
        let config = ChaoticGridConfig {
            nq: 40,
            np: 40,
            orbit_steps: 10_000,
            lyapunov_steps: 4000,
            ..ChaoticGridConfig::default()
        };
        match chaotic_grid(&shape, &config) {
            Err(ClassicalError::SeedInRegularRegion { best }) => {
                assert!(best < 0.05, "best = {best}");
            }
            other => panic!("expected SeedInRegularRegion, got {other:?}"),
        }
    }

    #[test]
    fn mixed_shape_has_intermediate_chaotic_fraction() {
        let shape = BilliardShape::new(0.15).unwrap();
        let config = ChaoticGridConfig {
            nq: 60,
            np: 60,
            orbit_steps: 300_000,
            lyapunov_steps: 6000,
            ..ChaoticGridConfig::default()
        };
        let grid = chaotic_grid(&shape, &config).unwrap();
        assert!(
            grid.chi_c > 0.2 && grid.chi_c < 0.95,
            "chi_c = {}",
            grid.chi_c
        );
    }
}
