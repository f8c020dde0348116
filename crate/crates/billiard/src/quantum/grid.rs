//! Shared boundary discretization used by the solver: per-node geometry in
//! the polar form the circular-wave basis needs.

use crate::geometry::{sample_boundary, BilliardShape};

/// Precomputed boundary nodes `s_j = j L / M` with everything the basis
/// evaluation needs: polar coordinates, outward normal components in the
/// polar frame, and the scaling weight.
pub struct BoundaryGrid {
    /// Number of nodes `M`.
    pub len: usize,
    /// Node spacing `Δs = L / M`.
    pub ds: f64,
    /// Radial distance of each node.
    pub r: Vec<f64>,
    /// Polar angle of each node.
    pub phi: Vec<f64>,
    /// Outward normal · radial unit vector.
    pub n_dot_rhat: Vec<f64>,
    /// Outward normal · tangential (polar) unit vector.
    pub n_dot_phihat: Vec<f64>,
    /// `r·n̂` (positive: the domain is star-shaped about the origin).
    pub r_dot_n: Vec<f64>,
    /// Node positions (x, y).
    pub pos: Vec<(f64, f64)>,
}

impl BoundaryGrid {
    /// Builds the grid with `m` uniformly spaced arclength nodes.
    pub fn new(shape: &BilliardShape, m: usize) -> Self {
        let pts = sample_boundary(shape, m, 0.0);
        let mut r = Vec::with_capacity(m);
        let mut phi = Vec::with_capacity(m);
        let mut n_dot_rhat = Vec::with_capacity(m);
        let mut n_dot_phihat = Vec::with_capacity(m);
        let mut r_dot_n = Vec::with_capacity(m);
        let mut pos = Vec::with_capacity(m);
        for p in &pts {
            let x = p.position.x;
            let y = p.position.y;
            let rad = (x * x + y * y).sqrt();
            let outward = -p.inward_normal;
            let rhat = (x / rad, y / rad);
            let phihat = (-rhat.1, rhat.0);
            r.push(rad);
            phi.push(y.atan2(x));
            n_dot_rhat.push(outward.x * rhat.0 + outward.y * rhat.1);
            n_dot_phihat.push(outward.x * phihat.0 + outward.y * phihat.1);
            r_dot_n.push(x * outward.x + y * outward.y);
            pos.push((x, y));
        }
        Self {
            len: m,
            ds: shape.perimeter() / m as f64,
            r,
            phi,
            n_dot_rhat,
            n_dot_phihat,
            r_dot_n,
            pos,
        }
    }
}
