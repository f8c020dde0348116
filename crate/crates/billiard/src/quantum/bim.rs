//! Boundary-integral cross-check for even-parity eigenvalues.
//!
//! Independent of the scaling solver: a double-layer ansatz on the upper
//! half boundary, symmetrized with a mirror source so the Neumann condition
//! on the symmetry chord holds identically. The matrix `-I/2 + D(k)`
//! becomes singular exactly at the even Dirichlet eigenvalues, so its
//! smallest singular value dips toward zero there. Used only as a check;
//! the production spectrum comes from the scaling method.

use nalgebra::{Complex, DMatrix};

use crate::geometry::BilliardShape;
use crate::special::{bessel_jn, bessel_y1};

/// Smallest singular value of the even-parity boundary-integral operator
/// at trial wavenumber `k`, discretized on `m_half` midpoint nodes along
/// the upper half boundary.
pub fn bim_even_singular_value(shape: &BilliardShape, k: f64, m_half: usize) -> f64 {
    assert!(k > 0.0 && m_half >= 8);
    let full = crate::geometry::sample_boundary(shape, 2 * m_half, 0.5);
    let nodes = &full[..m_half];
    let ds = shape.perimeter() / (2.0 * m_half as f64);

    let mut mat = DMatrix::<Complex<f64>>::zeros(m_half, m_half);
    for s in 0..m_half {
        let xs = nodes[s].position;
        for t in 0..m_half {
            let yt = nodes[t].position;
            let outward = -nodes[t].inward_normal;

            // Direct term; on the diagonal the kernel limit is -kappa/(4pi).
            let direct = if s == t {
                Complex::new(-nodes[t].curvature / (4.0 * std::f64::consts::PI), 0.0)
            } else {
                kernel(k, xs.x - yt.x, xs.y - yt.y, outward.x, outward.y)
            };
            // Mirror term: the image node across the symmetry axis, with
            // the mirrored normal. Always regular for midpoint nodes.
            let mirror = kernel(k, xs.x - yt.x, xs.y + yt.y, outward.x, -outward.y);

            let mut entry = ds * (direct + mirror);
            if s == t {
                entry -= Complex::new(0.5, 0.0);
            }
            mat[(s, t)] = entry;
        }
    }

    let sv = mat.svd(false, false).singular_values;
    sv.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Double-layer kernel `dG/dn_t (x, y) = (ik/4) H1(kd) (n_t . (x-y))/d`
/// for the outgoing free-space Green function `G = (i/4) H0(kd)`.
fn kernel(k: f64, dx: f64, dy: f64, nx: f64, ny: f64) -> Complex<f64> {
    let d = (dx * dx + dy * dy).sqrt();
    let proj = (nx * dx + ny * dy) / d;
    let kd = k * d;
    let h1 = Complex::new(bessel_jn(1, kd), bessel_y1(kd));
    Complex::new(0.0, 0.25 * k * proj) * h1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_dip_sits_on_a_bessel_zero() {
        let shape = BilliardShape::new(0.0).unwrap();
        // j_{1,1} = 3.8317...: sigma_min should dip by orders of magnitude
        // relative to nearby non-eigenvalue k.
        let at_zero = bim_even_singular_value(&shape, 3.831705970207512, 96);
        let off = bim_even_singular_value(&shape, 3.5, 96);
        assert!(
            at_zero < 1e-3 * off,
            "no dip: sigma(eig) = {at_zero:.3e}, sigma(off) = {off:.3e}"
        );
    }

    #[test]
    fn dip_tracks_the_eigenvalue_not_the_neighborhood() {
        let shape = BilliardShape::new(0.0).unwrap();
        let k0 = 5.135622301840683; // j_{2,1}
        let dip = bim_even_singular_value(&shape, k0, 96);
        for dk in [-0.15, -0.05, 0.05, 0.15] {
            let nearby = bim_even_singular_value(&shape, k0 + dk, 96);
            assert!(dip < nearby, "sigma not minimal at the eigenvalue");
        }
    }
}
