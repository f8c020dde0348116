//! Poincaré–Husimi projection of eigenstates onto the collision section,
//! and the localization measures built on it.
//!
//! The boundary function `u(s)` of an eigenstate is projected onto
//! periodized coherent states centred at section points `(q, p)`:
//! Gaussians of width `1/√k` in arclength, carrying momentum `k p` along
//! the boundary, wrapped around the perimeter. The squared overlaps on a
//! uniform section grid, normalized to unit total mass, form the Husimi
//! distribution `H(q, p) ≥ 0` — the quantum analogue of the classical
//! invariant measure on the section. Localization of `H` is quantified by
//! the entropy measure `A`, the normalized inverse participation ratio,
//! and the overlap index `M` against the classical chaotic-component grid.

use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::ChaoticGrid;
use crate::geometry::BilliardShape;
use crate::quantum::EigenstateRecord;

/// Default section grid (cells along `q` and `p`).
pub const DEFAULT_HUSIMI_DIMS: (usize, usize) = (400, 400);

/// Default overlap-index threshold separating regular from chaotic states.
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.5;

/// Gaussian tail cutoff in units of the coherent-state width `1/√k`;
/// `exp(-8.5²/2) ≈ 2e-16` is below double-precision resolution.
const GAUSSIAN_CUTOFF_WIDTHS: f64 = 8.5;

/// Periodization images kept in the coherent-state sum.
const IMAGE_RANGE: i64 = 2;

/// Errors from the Husimi layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum HusimiError {
    /// Husimi and chaotic grids must share dimensions to be compared.
    #[error(
        "grid dimensions differ: Husimi {husimi_nq}x{husimi_np}, \
         chaotic {chaotic_nq}x{chaotic_np}"
    )]
    DimensionMismatch {
        husimi_nq: usize,
        husimi_np: usize,
        chaotic_nq: usize,
        chaotic_np: usize,
    },
}

/// Husimi distribution of one eigenstate on the collision section.
///
/// Cell centres are `q_i = (i + ½) L / nq` and `p_j = -1 + (j + ½) 2/np`;
/// values are row-major (`j * nq + i`) and sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HusimiGrid {
    /// Eigen-wavenumber of the projected state.
    pub k: f64,
    /// Deformation parameter of the underlying shape.
    pub lambda: f64,
    /// Cells along `q` (arclength).
    pub nq: usize,
    /// Cells along `p` (tangential momentum).
    pub np: usize,
    /// Row-major normalized cell masses.
    pub values: Vec<f64>,
}

impl HusimiGrid {
    /// Mass of cell `(i, j)`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nq + i]
    }

    /// Total number of cells.
    pub fn cell_count(&self) -> usize {
        self.nq * self.np
    }
}

/// Regular/chaotic label of one state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Regular,
    Chaotic,
}

/// Localization measures of one eigenstate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRecord {
    /// Eigen-wavenumber.
    pub k: f64,
    /// Entropy localization measure `A = e^I / N`.
    #[serde(rename = "A")]
    pub a: f64,
    /// `A` rescaled by the classical chaotic fraction, `A / χ_C`.
    #[serde(rename = "A_normalized")]
    pub a_normalized: f64,
    /// Normalized inverse participation ratio.
    #[serde(rename = "nIPR")]
    pub nipr: f64,
    /// Overlap index against the chaotic-component grid.
    #[serde(rename = "M")]
    pub m: f64,
    /// Label from thresholding `M`.
    pub classification: Classification,
}

/// The `(x, w)` pairs of one section column: Gaussian-weighted boundary
/// samples within the cutoff, `w = u_j e^{-k x²/2} ds`.
fn column_terms(
    u: &[f64],
    ds: f64,
    perimeter: f64,
    k: f64,
    q: f64,
    out: &mut Vec<(f64, f64)>,
) {
    out.clear();
    let cut = GAUSSIAN_CUTOFF_WIDTHS / k.sqrt();
    for (j, &uj) in u.iter().enumerate() {
        let s = j as f64 * ds;
        for m in -IMAGE_RANGE..=IMAGE_RANGE {
            let x = s - q + m as f64 * perimeter;
            if x.abs() <= cut {
                out.push((x, uj * (-0.5 * k * x * x).exp() * ds));
            }
        }
    }
}

/// Overlap of the boundary function with the periodized coherent state at
/// `(q, p)`: `∫ c*(s) u(s) ds` with
/// `c(s) = Σ_m exp(i k p (s - q + mL) - k (s - q + mL)²/2)`.
///
/// No normalization prefactor is applied; every consumer either normalizes
/// the resulting grid or takes ratios.
pub fn coherent_overlap(
    shape: &BilliardShape,
    record: &EigenstateRecord,
    q: f64,
    p: f64,
) -> Complex<f64> {
    let perimeter = shape.perimeter();
    let ds = perimeter / record.boundary_grid_size as f64;
    let k = record.k;
    let mut terms = Vec::new();
    column_terms(&record.u_samples, ds, perimeter, k, q, &mut terms);
    let mut acc = Complex::new(0.0, 0.0);
    for &(x, w) in &terms {
        let (sin, cos) = (-k * p * x).sin_cos();
        acc += Complex::new(w * cos, w * sin);
    }
    acc
}

/// Husimi distribution of `record` on an `nq × np` section grid,
/// normalized to unit total mass.
///
/// Columns are independent and computed in parallel; within a column the
/// momentum dependence `e^{-ikpx}` is advanced by a phase recurrence over
/// the uniform `p` grid, so the cost per state is `O(nq np √k)` rather
/// than `O(nq np N)`.
pub fn husimi_grid(
    shape: &BilliardShape,
    record: &EigenstateRecord,
    nq: usize,
    np: usize,
) -> HusimiGrid {
    assert!(nq > 0 && np > 0);
    assert_eq!(record.u_samples.len(), record.boundary_grid_size);
    let perimeter = shape.perimeter();
    let ds = perimeter / record.boundary_grid_size as f64;
    let k = record.k;
    let dp = 2.0 / np as f64;
    let p0 = -1.0 + 0.5 * dp;

    let columns: Vec<Vec<f64>> = (0..nq)
        .into_par_iter()
        .map(|i| {
            let q = (i as f64 + 0.5) * perimeter / nq as f64;
            let mut terms = Vec::new();
            column_terms(&record.u_samples, ds, perimeter, k, q, &mut terms);
            let mut acc = vec![Complex::new(0.0, 0.0); np];
            for &(x, w) in &terms {
                let (s0, c0) = (-k * p0 * x).sin_cos();
                let (sd, cd) = (-k * dp * x).sin_cos();
                let step = Complex::new(cd, sd);
                let mut cur = Complex::new(w * c0, w * s0);
                for slot in acc.iter_mut() {
                    *slot += cur;
                    cur *= step;
                }
            }
            acc.iter().map(|z| z.norm_sqr()).collect()
        })
        .collect();

    let mut values = vec![0.0; nq * np];
    for (i, col) in columns.iter().enumerate() {
        for (j, &v) in col.iter().enumerate() {
            values[j * nq + i] = v;
        }
    }
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        for v in &mut values {
            *v /= total;
        }
    }
    HusimiGrid {
        k,
        lambda: shape.lambda(),
        nq,
        np,
        values,
    }
}

/// Entropy localization measure `A = e^I / N` with the information entropy
/// `I = -Σ H ln H` (empty cells contribute zero).
pub fn entropy_localization(grid: &HusimiGrid) -> f64 {
    let mut entropy = 0.0;
    for &h in &grid.values {
        if h > 0.0 {
            entropy -= h * h.ln();
        }
    }
    entropy.exp() / grid.cell_count() as f64
}

/// Normalized inverse participation ratio `1 / (N Σ H²)`.
pub fn nipr(grid: &HusimiGrid) -> f64 {
    let sum_sq: f64 = grid.values.iter().map(|&h| h * h).sum();
    1.0 / (grid.cell_count() as f64 * sum_sq)
}

/// Overlap index `M = Σ H_ij K_ij ∈ [-1, 1]` against the classical
/// chaotic-component indicator grid (`K = +1` chaotic, `-1` regular).
pub fn overlap_index(grid: &HusimiGrid, chaotic: &ChaoticGrid) -> Result<f64, HusimiError> {
    if grid.nq != chaotic.nq || grid.np != chaotic.np {
        return Err(HusimiError::DimensionMismatch {
            husimi_nq: grid.nq,
            husimi_np: grid.np,
            chaotic_nq: chaotic.nq,
            chaotic_np: chaotic.np,
        });
    }
    let m = grid
        .values
        .iter()
        .zip(&chaotic.cells)
        .map(|(&h, &cell)| h * cell as f64)
        .sum();
    Ok(m)
}

/// Threshold rule: chaotic iff `M ≥ m_t`.
pub fn classify(m: f64, m_t: f64) -> Classification {
    if m >= m_t {
        Classification::Chaotic
    } else {
        Classification::Regular
    }
}

/// Threshold chosen so that the fraction of states classified regular
/// (`M` below the returned value) matches the classical regular fraction
/// `rho1` to within one count.
pub fn threshold_from_classical_fraction(ms: &[f64], rho1: f64) -> f64 {
    assert!(!ms.is_empty());
    assert!((0.0..=1.0).contains(&rho1));
    let mut sorted = ms.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let target = ((rho1 * n as f64).round() as usize).min(n);
    if target == 0 {
        sorted[0]
    } else if target == n {
        sorted[n - 1] + 1e-9
    } else {
        0.5 * (sorted[target - 1] + sorted[target])
    }
}

/// All localization measures of one state from its Husimi grid.
pub fn localization_record(
    grid: &HusimiGrid,
    chaotic: &ChaoticGrid,
    m_t: f64,
) -> Result<LocalizationRecord, HusimiError> {
    let a = entropy_localization(grid);
    let m = overlap_index(grid, chaotic)?;
    Ok(LocalizationRecord {
        k: grid.k,
        a,
        a_normalized: a / chaotic.chi_c,
        nipr: nipr(grid),
        m,
        classification: classify(m, m_t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::Parity;
    use crate::special::{bessel_j_array, bessel_j_deriv};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Synthetic record on the circle (`L = 2π`, `s = φ`).
    fn circle_record(k: f64, u: Vec<f64>) -> EigenstateRecord {
        let n = u.len();
        EigenstateRecord {
            k,
            u_samples: u,
            parity: Parity::Even,
            boundary_grid_size: n,
        }
    }

    fn uniform_grid(nq: usize, np: usize) -> HusimiGrid {
        let n = nq * np;
        HusimiGrid {
            k: 100.0,
            lambda: 0.0,
            nq,
            np,
            values: vec![1.0 / n as f64; n],
        }
    }

    #[test]
    fn entropy_measure_analytic_cases() {
        let nq = 40;
        let np = 50;
        let n = nq * np;
        let uniform = uniform_grid(nq, np);
        assert!((entropy_localization(&uniform) - 1.0).abs() < 1e-12);
        assert!((nipr(&uniform) - 1.0).abs() < 1e-12);

        let mut single = uniform_grid(nq, np);
        single.values = vec![0.0; n];
        single.values[137] = 1.0;
        assert!((entropy_localization(&single) - 1.0 / n as f64).abs() < 1e-15);
        assert!((nipr(&single) - 1.0 / n as f64).abs() < 1e-15);

        let mut half = uniform_grid(nq, np);
        half.values = vec![0.0; n];
        for v in half.values.iter_mut().take(n / 2) {
            *v = 2.0 / n as f64;
        }
        assert!((entropy_localization(&half) - 0.5).abs() < 1e-12);
        assert!((nipr(&half) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn entropy_is_permutation_invariant_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let nq = 30;
        let np = 20;
        let mut vals: Vec<f64> = (0..nq * np).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = vals.iter().sum();
        for v in &mut vals {
            *v /= total;
        }
        let grid = HusimiGrid {
            k: 50.0,
            lambda: 0.1,
            nq,
            np,
            values: vals.clone(),
        };
        let a = entropy_localization(&grid);
        let r = nipr(&grid);
        let n = (nq * np) as f64;
        assert!(a >= 1.0 / n && a <= 1.0 + 1e-12);
        assert!(r >= 1.0 / n && r <= 1.0 + 1e-12);
        // Jensen: participation never exceeds e times the entropy measure.
        assert!(r <= std::f64::consts::E * a + 1e-12);

        vals.reverse();
        vals.swap(3, 500);
        let shuffled = HusimiGrid {
            values: vals,
            ..grid
        };
        assert!((entropy_localization(&shuffled) - a).abs() < 1e-12);
        assert!((nipr(&shuffled) - r).abs() < 1e-12);
    }

    #[test]
    fn point_source_overlap_has_the_coherent_width() {
        let shape = BilliardShape::new(0.0).unwrap();
        let k = 100.0;
        let n = 1024;
        let mut u = vec![0.0; n];
        let j0 = 300;
        u[j0] = 1.0;
        let record = circle_record(k, u);
        let q0 = j0 as f64 * shape.perimeter() / n as f64;
        let peak = coherent_overlap(&shape, &record, q0, 0.3).norm_sqr();
        let off = coherent_overlap(&shape, &record, q0 + 1.0 / k.sqrt(), 0.3).norm_sqr();
        let ratio = off / peak;
        assert!(
            (ratio - (-1.0f64).exp()).abs() < 1e-9,
            "Gaussian width ratio {ratio} vs e^-1"
        );
        // Periodization: shifting q by a full perimeter changes nothing.
        let wrapped = coherent_overlap(&shape, &record, q0 + shape.perimeter(), 0.3);
        let direct = coherent_overlap(&shape, &record, q0, 0.3);
        assert!((wrapped - direct).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn self_overlap_peaks_at_the_packet_centre() {
        let shape = BilliardShape::new(0.0).unwrap();
        let k = 80.0;
        let n = 1024;
        let ds = shape.perimeter() / n as f64;
        let q0 = 2.0;
        let p0 = 0.4;
        // u = real part of the coherent state at (q0, p0).
        let u: Vec<f64> = (0..n)
            .map(|j| {
                let x = j as f64 * ds - q0;
                (-0.5 * k * x * x).exp() * (k * p0 * x).cos()
            })
            .collect();
        let record = circle_record(k, u);
        let grid = husimi_grid(&shape, &record, 160, 160);
        let (mut best, mut best_ij) = (0.0, (0, 0));
        for i in 0..grid.nq {
            for j in 0..grid.np {
                if grid.value(i, j) > best {
                    best = grid.value(i, j);
                    best_ij = (i, j);
                }
            }
        }
        let q_star = (best_ij.0 as f64 + 0.5) * shape.perimeter() / grid.nq as f64;
        let p_star = -1.0 + (best_ij.1 as f64 + 0.5) * 2.0 / grid.np as f64;
        assert!((q_star - q0).abs() < 0.1, "peak at q = {q_star}");
        assert!((p_star.abs() - p0).abs() < 0.05, "peak at |p| = {}", p_star.abs());
    }

    #[test]
    fn husimi_mass_is_normalized_and_momentum_symmetric() {
        let shape = BilliardShape::new(0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 700;
        let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mut record = circle_record(70.0, u);
        record.boundary_grid_size = n;
        let grid = husimi_grid(&shape, &record, 120, 80);
        let total: f64 = grid.values.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(grid.values.iter().all(|&v| v >= 0.0));
        // Real boundary functions give exactly momentum-symmetric Husimi.
        for i in 0..grid.nq {
            for j in 0..grid.np / 2 {
                let a = grid.value(i, j);
                let b = grid.value(i, grid.np - 1 - j);
                assert!(
                    (a - b).abs() <= 1e-12 * (a + b).max(1e-300),
                    "H not symmetric at ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn circle_mode_concentrates_at_its_momentum_lines() {
        let shape = BilliardShape::new(0.0).unwrap();
        // Even circle mode J_n(kr) cos(nφ) at k = j_{n,m}: boundary function
        // is proportional to cos(n s), so H must pile up along p = ±n/k.
        let n_ang = 25usize;
        let k = 52.0; // not an eigenvalue; only the u profile matters here
        let m_samples = 900;
        let ds = shape.perimeter() / m_samples as f64;
        let bes = bessel_j_array(n_ang + 1, k);
        let amp = k * bessel_j_deriv(&bes, n_ang);
        let u: Vec<f64> = (0..m_samples)
            .map(|j| amp * (n_ang as f64 * j as f64 * ds).cos())
            .collect();
        let record = circle_record(k, u);
        let grid = husimi_grid(&shape, &record, 100, 200);
        let p_line = n_ang as f64 / k;
        // Coherent-state momentum width is 1/√(2k); take a ±3σ band.
        let band = 3.0 / (2.0 * k).sqrt();
        let mut near = 0.0;
        for i in 0..grid.nq {
            for j in 0..grid.np {
                let p = -1.0 + (j as f64 + 0.5) * 2.0 / grid.np as f64;
                if (p.abs() - p_line).abs() < band {
                    near += grid.value(i, j);
                }
            }
        }
        assert!(near > 0.95, "mass near p = ±n/k is only {near}");
    }

    #[test]
    fn overlap_index_tracks_support_and_dimensions() {
        let nq = 20;
        let np = 10;
        let n = nq * np;
        // Chaotic grid: left half chaotic (+1), right half regular (-1).
        let mut cells = vec![-1i8; n];
        for j in 0..np {
            for i in 0..nq / 2 {
                cells[j * nq + i] = 1;
            }
        }
        let chaotic = ChaoticGrid {
            lambda: 0.25,
            nq,
            np,
            cells,
            chi_c: 0.5,
            seed: (0.0, 0.0),
            lyapunov: 1.0,
            orbit_steps: 0,
        };
        let mut grid = uniform_grid(nq, np);

        // All mass on +1 cells.
        grid.values = vec![0.0; n];
        for j in 0..np {
            grid.values[j * nq + 2] = 1.0 / np as f64;
        }
        assert!((overlap_index(&grid, &chaotic).unwrap() - 1.0).abs() < 1e-12);

        // All mass on -1 cells.
        grid.values = vec![0.0; n];
        for j in 0..np {
            grid.values[j * nq + nq - 3] = 1.0 / np as f64;
        }
        assert!((overlap_index(&grid, &chaotic).unwrap() + 1.0).abs() < 1e-12);

        // 75/25 split: M = 0.75 - 0.25 = 0.5.
        grid.values = vec![0.0; n];
        grid.values[5] = 0.75;
        grid.values[nq - 2] = 0.25;
        assert!((overlap_index(&grid, &chaotic).unwrap() - 0.5).abs() < 1e-12);

        let small = uniform_grid(nq / 2, np);
        match overlap_index(&small, &chaotic) {
            Err(HusimiError::DimensionMismatch { .. }) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }

        let rec = localization_record(&grid, &chaotic, 0.5).unwrap();
        assert_eq!(rec.classification, Classification::Chaotic);
        assert!((rec.a_normalized - rec.a / 0.5).abs() < 1e-15);
    }

    #[test]
    fn classification_threshold_matches_the_classical_fraction() {
        assert_eq!(classify(0.9, 0.5), Classification::Chaotic);
        assert_eq!(classify(-0.8, 0.5), Classification::Regular);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ms: Vec<f64> = (0..1000)
            .map(|_| {
                if rng.gen::<f64>() < 0.35 {
                    -0.9 + 0.4 * rng.gen::<f64>()
                } else {
                    0.3 + 0.6 * rng.gen::<f64>()
                }
            })
            .collect();
        let rho1 = 0.35;
        let m_t = threshold_from_classical_fraction(&ms, rho1);
        let regular = ms
            .iter()
            .filter(|&&m| classify(m, m_t) == Classification::Regular)
            .count();
        let want = (rho1 * ms.len() as f64).round() as usize;
        assert!(
            regular.abs_diff(want) <= 1,
            "{regular} regular vs target {want}"
        );
    }

    #[test]
    fn coarse_and_fine_grids_agree_for_extended_states() {
        let shape = BilliardShape::new(0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let n = 800;
        let u: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let record = circle_record(90.0, u);
        let fine = husimi_grid(&shape, &record, 400, 400);
        let coarse = husimi_grid(&shape, &record, 200, 200);
        let a_fine = entropy_localization(&fine);
        let a_coarse = entropy_localization(&coarse);
        let rel = (a_fine - a_coarse).abs() / a_fine;
        assert!(rel < 0.05, "A on 400² = {a_fine}, on 200² = {a_coarse}");
    }
}
