//! Interior wavefunction reconstruction from the boundary function.
//!
//! With the normal derivative `u = n̂·∇ψ` known on the boundary, the field
//! inside a Dirichlet domain is the single-layer integral
//! `ψ(x) = -(1/4) ∮ u(s) Y₀(k |x - r(s)|) ds`, discretized on the same
//! uniform-arclength grid the solver produced `u` on.

use nalgebra::Vector2;

use super::grid::BoundaryGrid;
use super::{EigenstateRecord, QuantumError};
use crate::geometry::BilliardShape;
use crate::special::bessel_y0;

/// Evaluates one eigenstate anywhere inside the domain.
///
/// Building the evaluator samples the boundary once; evaluation is then
/// `O(grid)` per point.
pub struct InteriorEvaluator {
    k: f64,
    ds: f64,
    nodes: Vec<(f64, f64)>,
    u: Vec<f64>,
}

impl InteriorEvaluator {
    pub fn new(shape: &BilliardShape, record: &EigenstateRecord) -> Self {
        let grid = BoundaryGrid::new(shape, record.boundary_grid_size);
        assert_eq!(grid.len, record.u_samples.len());
        InteriorEvaluator {
            k: record.k,
            ds: grid.ds,
            nodes: grid.pos,
            u: record.u_samples.clone(),
        }
    }

    /// ψ at an interior point. The quadrature degrades within about a
    /// wavelength of the boundary; callers probing the Dirichlet limit
    /// should approach no closer than a few grid spacings.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for (node, &uj) in self.nodes.iter().zip(&self.u) {
            let d = ((x - node.0).powi(2) + (y - node.1).powi(2)).sqrt();
            acc += uj * bessel_y0(self.k * d);
        }
        -0.25 * acc * self.ds
    }
}

/// Convenience wrapper: one-shot evaluation with an interior check.
pub fn wavefunction_at(
    shape: &BilliardShape,
    record: &EigenstateRecord,
    x: f64,
    y: f64,
) -> Result<f64, QuantumError> {
    if !shape.contains(&Vector2::new(x, y)) {
        return Err(QuantumError::PointOutsideDomain { x, y });
    }
    Ok(InteriorEvaluator::new(shape, record).eval(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{solve_window, SolveOptions};
    use crate::special::bessel_j_array;

    #[test]
    fn circle_state_reproduces_its_bessel_mode() {
        let shape = BilliardShape::new(0.0).unwrap();
        let opts = SolveOptions {
            completeness_tolerance: 6.0,
            ..SolveOptions::default()
        };
        let window = solve_window(&shape, 40.0, 41.0, &opts).unwrap();
        assert!(!window.levels.is_empty());
        let record = &window.levels[0];
        let eval = InteriorEvaluator::new(&shape, record);
        // The reconstructed field must itself satisfy the mode shape: check
        // the ratio ψ(r1)/ψ(r2) along a ray against J_n(k r) cos(n φ) for
        // the best-matching order n.
        let k = record.k;
        let probe = |r: f64, phi: f64| eval.eval(r * phi.cos(), r * phi.sin());
        let v1 = probe(0.35, 0.4);
        let v2 = probe(0.62, 0.4);
        assert!(v1.abs() > 1e-12 || v2.abs() > 1e-12);
        let mut best = (f64::INFINITY, 0usize);
        for n in 0..80usize {
            let b1 = bessel_j_array(n, k * 0.35)[n] * (n as f64 * 0.4).cos();
            let b2 = bessel_j_array(n, k * 0.62)[n] * (n as f64 * 0.4).cos();
            let mismatch = (v1 * b2 - v2 * b1).abs();
            if mismatch < best.0 {
                best = (mismatch, n);
            }
        }
        let scale = v1.abs().max(v2.abs());
        assert!(
            best.0 < 1e-3 * scale,
            "no circular mode matches the ray ratio: mismatch {:.2e} at n={}",
            best.0,
            best.1
        );
    }

    #[test]
    fn points_outside_are_rejected() {
        let shape = BilliardShape::new(0.2).unwrap();
        let record = EigenstateRecord {
            k: 40.0,
            u_samples: vec![0.0; 64],
            parity: crate::quantum::Parity::Even,
            boundary_grid_size: 64,
        };
        match wavefunction_at(&shape, &record, 5.0, 5.0) {
            Err(QuantumError::PointOutsideDomain { .. }) => {}
            other => panic!("expected PointOutsideDomain, got {other:?}"),
        }
    }
}
