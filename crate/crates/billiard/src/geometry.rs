//! Boundary geometry of the quadratic conformal-map billiard family.
//!
//! The boundary is the image of the unit circle under `w(z) = z + λ z²`,
//! traced as `θ ↦ (cos θ + λ cos 2θ, sin θ + λ sin 2θ)` for `θ ∈ [0, 2π)`.
//! The deformation parameter `λ ∈ [0, 1/2]` interpolates from the circle
//! (`λ = 0`) through convex ovals to shapes with a concave arc (`λ > 1/4`);
//! at `λ = 1/4` the curvature vanishes at `θ = π`. The curve is symmetric
//! under reflection about the x-axis, which is what the even-parity quantum
//! solver exploits.
//!
//! All boundary quantities are available both in the map parameter `θ` and in
//! arclength `s ∈ [0, L)`; conversion uses a precomputed cumulative table
//! with Gauss-Legendre refinement, so round trips are accurate to machine
//! precision.

use nalgebra::Vector2;
use thiserror::Error;

use crate::numerics::{gauss16, GAUSS_LEGENDRE_16};

/// Number of equal-θ intervals in the cumulative arclength table.
const TABLE_INTERVALS: usize = 2048;

/// Errors from boundary construction.
#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    /// The deformation parameter is outside the supported family.
    #[error("deformation parameter lambda = {0} is outside [0, 0.5]")]
    LambdaOutOfRange(f64),
}

/// A point on the billiard boundary with its local differential data.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    /// Map parameter, wrapped to `[0, 2π)`.
    pub theta: f64,
    /// Cartesian position.
    pub position: Vector2<f64>,
    /// Arclength from `θ = 0`, in `[0, L)`.
    pub arclength: f64,
    /// Unit tangent in the direction of increasing `θ` (counterclockwise).
    pub tangent: Vector2<f64>,
    /// Unit normal pointing into the billiard domain.
    pub inward_normal: Vector2<f64>,
    /// Signed curvature (positive where the boundary is convex).
    pub curvature: f64,
    /// Parameter speed `|dw/dθ| = ds/dθ`.
    pub speed: f64,
}

/// The billiard boundary for one value of the deformation parameter.
///
/// Construction precomputes the perimeter and a cumulative arclength table;
/// the exact enclosed area `π (1 + 2λ²)` is available in closed form.
#[derive(Debug, Clone)]
pub struct BilliardShape {
    lambda: f64,
    perimeter: f64,
    area: f64,
    /// Cumulative arclength at `θ_i = i · 2π / TABLE_INTERVALS`, `i = 0..=N`.
    table: Vec<f64>,
}

impl BilliardShape {
    /// Builds the boundary for deformation `lambda ∈ [0, 0.5]`.
    pub fn new(lambda: f64) -> Result<Self, GeometryError> {
        if !(0.0..=0.5).contains(&lambda) || !lambda.is_finite() {
            return Err(GeometryError::LambdaOutOfRange(lambda));
        }
        let h = 2.0 * std::f64::consts::PI / TABLE_INTERVALS as f64;
        let speed = |t: f64| speed_of(lambda, t);
        let mut table = Vec::with_capacity(TABLE_INTERVALS + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for i in 0..TABLE_INTERVALS {
            acc += gauss16(&speed, i as f64 * h, (i + 1) as f64 * h);
            table.push(acc);
        }
        Ok(Self {
            lambda,
            perimeter: acc,
            area: std::f64::consts::PI * (1.0 + 2.0 * lambda * lambda),
            table,
        })
    }

    /// Deformation parameter `λ`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Boundary length `L`.
    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Enclosed area `π (1 + 2λ²)` (exact).
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Largest distance from the origin to the boundary, `1 + λ`.
    pub fn radius_max(&self) -> f64 {
        1.0 + self.lambda
    }

    /// Smallest distance from the origin to the boundary, `1 - λ`.
    pub fn radius_min(&self) -> f64 {
        1.0 - self.lambda
    }

    /// Cartesian boundary position at map parameter `theta`.
    pub fn position(&self, theta: f64) -> Vector2<f64> {
        let l = self.lambda;
        Vector2::new(
            theta.cos() + l * (2.0 * theta).cos(),
            theta.sin() + l * (2.0 * theta).sin(),
        )
    }

    /// Parameter speed `ds/dθ = √(1 + 4λ cos θ + 4λ²)`.
    pub fn speed(&self, theta: f64) -> f64 {
        speed_of(self.lambda, theta)
    }

    /// Signed curvature at map parameter `theta`.
    ///
    /// `κ(θ) = (1 + 6λ cos θ + 8λ²) / (1 + 4λ cos θ + 4λ²)^{3/2}`; positive on
    /// convex arcs, zero at `θ = π` when `λ = 1/4`, negative there for larger
    /// deformations.
    pub fn curvature(&self, theta: f64) -> f64 {
        let l = self.lambda;
        let c = theta.cos();
        let g = 1.0 + 4.0 * l * c + 4.0 * l * l;
        (1.0 + 6.0 * l * c + 8.0 * l * l) / (g * g.sqrt())
    }

    /// Full differential data of the boundary point at map parameter `theta`.
    pub fn boundary_point(&self, theta: f64) -> BoundaryPoint {
        let wrapped = theta.rem_euclid(2.0 * std::f64::consts::PI);
        let l = self.lambda;
        let (sin1, cos1) = wrapped.sin_cos();
        let (sin2, cos2) = (2.0 * wrapped).sin_cos();
        let position = Vector2::new(cos1 + l * cos2, sin1 + l * sin2);
        let velocity = Vector2::new(-sin1 - 2.0 * l * sin2, cos1 + 2.0 * l * cos2);
        let speed = velocity.norm();
        let tangent = velocity / speed;
        // The boundary runs counterclockwise, so the interior lies to the
        // left of the tangent.
        let inward_normal = Vector2::new(-tangent.y, tangent.x);
        BoundaryPoint {
            theta: wrapped,
            position,
            arclength: self.arclength_of_theta(wrapped),
            tangent,
            inward_normal,
            curvature: self.curvature(wrapped),
            speed,
        }
    }

    /// Cumulative arclength `s(θ)` with `s(0) = 0`.
    ///
    /// The map is the monotone lift: adding a full turn to `theta` adds one
    /// perimeter, so `s(2π) = L` rather than wrapping back to zero.
    pub fn arclength_of_theta(&self, theta: f64) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        let wrapped = theta.rem_euclid(two_pi);
        let turns = ((theta - wrapped) / two_pi).round();
        let h = two_pi / TABLE_INTERVALS as f64;
        let idx = ((wrapped / h) as usize).min(TABLE_INTERVALS - 1);
        let base = idx as f64 * h;
        let partial = gauss16(&|t: f64| speed_of(self.lambda, t), base, wrapped);
        turns * self.perimeter + self.table[idx] + partial
    }

    /// Inverse of [`arclength_of_theta`]: the map parameter at arclength `s`.
    ///
    /// Accepts any real `s` using the same monotone lift (`θ(s + L) =
    /// θ(s) + 2π`). Newton iteration on the table bracket, with bisection
    /// steps whenever Newton would leave it, converges to machine precision
    /// even near the slow point `θ = π` of strongly deformed shapes.
    pub fn theta_of_arclength(&self, s: f64) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        let wrapped = s.rem_euclid(self.perimeter);
        let turns = ((s - wrapped) / self.perimeter).round();
        // Bracket from the cumulative table.
        let idx = self.table.partition_point(|&v| v <= wrapped).saturating_sub(1);
        let idx = idx.min(TABLE_INTERVALS - 1);
        let h = two_pi / TABLE_INTERVALS as f64;
        let mut lo = idx as f64 * h;
        let mut hi = lo + h;
        let frac = (wrapped - self.table[idx]) / (self.table[idx + 1] - self.table[idx]);
        let mut theta = lo + frac.clamp(0.0, 1.0) * h;
        for _ in 0..60 {
            let err = self.arclength_of_theta(theta) - wrapped;
            if err > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            if err.abs() < 1e-14 * self.perimeter {
                break;
            }
            let deriv = speed_of(self.lambda, theta);
            let step = err / deriv.max(1e-12);
            let next = theta - step;
            theta = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
        }
        turns * two_pi + theta
    }

    /// Boundary point at arclength `s`.
    pub fn boundary_point_at_arclength(&self, s: f64) -> BoundaryPoint {
        self.boundary_point(self.theta_of_arclength(s))
    }

    /// Whether `point` lies strictly inside the billiard domain.
    ///
    /// The boundary is star-shaped about the origin for every `λ ≤ 1/2`, so
    /// the test reduces to comparing `|point|` with the boundary radius along
    /// the same polar ray.
    pub fn contains(&self, point: &Vector2<f64>) -> bool {
        let r = point.norm();
        if r == 0.0 {
            return true;
        }
        let psi = point.y.atan2(point.x);
        let theta = self.theta_at_polar_angle(psi);
        // |w(θ)|² = 1 + λ² + 2λ cos θ.
        let l = self.lambda;
        let boundary_r2 = 1.0 + l * l + 2.0 * l * theta.cos();
        r * r < boundary_r2
    }

    /// Map parameter whose boundary point has polar angle `psi`.
    ///
    /// Solves `ψ(θ) = θ + atan2(λ sin θ, 1 + λ cos θ) = psi`; the left side is
    /// monotone in `θ` for the whole family, and differs from `θ` by at most
    /// `asin λ`, which gives the bisection bracket.
    fn theta_at_polar_angle(&self, psi: f64) -> f64 {
        let l = self.lambda;
        if l == 0.0 {
            return psi;
        }
        let slack = l.asin() + 1e-9;
        let mut lo = psi - slack;
        let mut hi = psi + slack;
        let polar = |t: f64| t + (l * t.sin()).atan2(1.0 + l * t.cos());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if polar(mid) < psi {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

fn speed_of(lambda: f64, theta: f64) -> f64 {
    (1.0 + 4.0 * lambda * theta.cos() + 4.0 * lambda * lambda).sqrt()
}

/// Uniform-in-arclength sampling of the boundary.
///
/// Returns the `n` boundary points at `s_j = (j + offset) L / n`. With
/// `offset = 0.5` the nodes are cell midpoints, the natural layout for
/// trapezoid-exact periodic quadrature without endpoint duplication.
pub fn sample_boundary(shape: &BilliardShape, n: usize, offset: f64) -> Vec<BoundaryPoint> {
    let step = shape.perimeter() / n as f64;
    (0..n)
        .map(|j| shape.boundary_point_at_arclength((j as f64 + offset) * step))
        .collect()
}

/// Nodes for composite Gauss-Legendre quadrature in `θ` over the full
/// boundary: returns `(theta, weight)` pairs such that `Σ w f(θ) ≈ ∮ f dθ`.
pub fn gauss_theta_nodes(intervals: usize) -> Vec<(f64, f64)> {
    let h = 2.0 * std::f64::consts::PI / intervals as f64;
    let mut nodes = Vec::with_capacity(intervals * GAUSS_LEGENDRE_16.len());
    for i in 0..intervals {
        let c = (i as f64 + 0.5) * h;
        for &(x, w) in &GAUSS_LEGENDRE_16 {
            nodes.push((c + 0.5 * h * x, 0.5 * h * w));
        }
    }
    nodes
}
