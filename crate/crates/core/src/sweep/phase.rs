//! Numeric phase diagram of the two-site extrema classification.
//!
//! Each cell of the (2Γ+Λ, δ) plane is labeled by counting the interior
//! extrema of the closed-form η(γ_h) on a dense logarithmic grid with
//! refinement, then mapped to the region alphabet. The analytic dividing
//! curves 𝒟_±(δ) are attached as an overlay; numeric and analytic labels may
//! disagree only within one grid cell of those curves, where the extrema are
//! arbitrarily shallow.

use rayon::prelude::*;

use crate::analytic::{classify_region, eta_two_site, Region, TwoSiteParams};
use crate::error::{Error, Result};
use crate::sweep::extrema::{find_extrema, ExtremumKind};

/// One point of the analytic boundary overlay.
#[derive(Debug, Clone, Copy)]
pub struct OverlayPoint {
    pub delta: f64,
    pub d_minus: f64,
    pub d_plus: f64,
}

/// Region labels over a rectangular (2Γ+Λ, δ) grid, with the analytic
/// boundary overlay.
#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    /// Total γ_h-free incoherent rate axis, 2Γ+Λ (+2γ), units of v.
    pub c_grid: Vec<f64>,
    /// Disorder axis δ/v.
    pub delta_grid: Vec<f64>,
    /// Numeric labels, indexed `[c index][delta index]`.
    pub labels: Vec<Vec<Region>>,
    /// 𝒟_±(δ) for the grid deltas inside |δ|/v < 1/2.
    pub overlay: Vec<OverlayPoint>,
}

impl PhaseDiagram {
    pub fn label(&self, c_index: usize, delta_index: usize) -> Region {
        self.labels[c_index][delta_index]
    }
}

/// Count the interior extrema of the closed-form η(γ_h) at the given cell
/// and map the count to a region label (ties between zero-count labels are
/// split by the |δ|/v = 1/2 line, which both labelings share exactly).
pub fn numeric_region(c: f64, delta: f64) -> Region {
    // any positive-Γ decomposition of c gives the same extrema structure;
    // keep the conventional Λ/Γ = 10 split
    let p = TwoSiteParams {
        v: 1.0,
        delta,
        gamma_diss: c / 12.0,
        gamma_deph: 0.0,
        gamma_hop: 0.0,
        lambda_sink: 10.0 * c / 12.0,
    };
    let n = 1200;
    let lo: f64 = 1e-3;
    let hi: f64 = 1e3;
    let grid: Vec<f64> = (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect();
    let values: Vec<Option<f64>> = grid
        .iter()
        .map(|&gh| eta_two_site(&p.with_gamma_hop(gh)).ok())
        .collect();
    let refine = |gh: f64| eta_two_site(&p.with_gamma_hop(gh)).ok();
    let extrema = find_extrema(&grid, &values, &refine);

    let minima = extrema.iter().filter(|e| e.kind == ExtremumKind::Minimum).count();
    let maxima = extrema.iter().filter(|e| e.kind == ExtremumKind::Maximum).count();
    match (maxima, minima) {
        (m, n) if m >= 1 && n >= 1 => Region::I,
        (0, n) if n >= 1 => Region::II,
        _ => {
            if delta.abs() >= 0.5 * p.v {
                Region::B
            } else {
                Region::III
            }
        }
    }
}

/// Analytic labels over the same grids, from [`classify_region`].
pub fn analytic_labels(c_grid: &[f64], delta_grid: &[f64]) -> Result<Vec<Vec<Region>>> {
    c_grid
        .iter()
        .map(|&c| {
            delta_grid
                .iter()
                .map(|&d| classify_region(d, c, 1.0).map(|cls| cls.region))
                .collect()
        })
        .collect()
}

/// Build the numeric phase diagram over strictly increasing grids; `c_grid`
/// must be positive. Cells evaluate in parallel with index-ordered assembly.
pub fn phase_diagram(c_grid: &[f64], delta_grid: &[f64]) -> Result<PhaseDiagram> {
    if c_grid.is_empty() || delta_grid.is_empty() {
        return Err(Error::Precondition("phase-diagram grids must be nonempty".into()));
    }
    if c_grid.windows(2).any(|w| w[1] <= w[0]) || delta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("phase-diagram grids must strictly increase".into()));
    }
    if c_grid[0] <= 0.0 {
        return Err(Error::Precondition("c grid values must be positive".into()));
    }

    let labels: Vec<Vec<Region>> = c_grid
        .par_iter()
        .map(|&c| delta_grid.iter().map(|&d| numeric_region(c, d)).collect())
        .collect();

    let overlay = delta_grid
        .iter()
        .filter_map(|&d| {
            let cls = classify_region(d, c_grid[0].max(1e-12), 1.0).ok()?;
            match (cls.d_minus, cls.d_plus) {
                (Some(dm), Some(dp)) => Some(OverlayPoint { delta: d, d_minus: dm, d_plus: dp }),
                _ => None,
            }
        })
        .collect();

    Ok(PhaseDiagram {
        c_grid: c_grid.to_vec(),
        delta_grid: delta_grid.to_vec(),
        labels,
        overlay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::linspace;

    #[test]
    fn reference_cells() {
        assert_eq!(numeric_region(0.24, 0.4), Region::I);
        assert_eq!(numeric_region(0.24, 0.0), Region::II);
        assert_eq!(numeric_region(3.0, 0.1), Region::III);
        assert_eq!(numeric_region(0.24, 0.75), Region::B);
    }

    #[test]
    fn degenerate_single_cell_diagram() {
        let pd = phase_diagram(&[0.24], &[0.4]).unwrap();
        assert_eq!(pd.label(0, 0), Region::I);
        assert_eq!(pd.labels.len(), 1);
        assert_eq!(pd.labels[0].len(), 1);
    }

    #[test]
    fn numeric_matches_analytic_away_from_boundaries() {
        let c_grid = linspace(0.2, 3.8, 19);
        let delta_grid = linspace(0.0, 0.9, 19);
        let pd = phase_diagram(&c_grid, &delta_grid).unwrap();
        let analytic = analytic_labels(&c_grid, &delta_grid).unwrap();

        let near_boundary = |ic: usize, id: usize| -> bool {
            let me = analytic[ic][id];
            for dc in -1i64..=1 {
                for dd in -1i64..=1 {
                    let (jc, jd) = (ic as i64 + dc, id as i64 + dd);
                    if jc < 0 || jd < 0 || jc >= c_grid.len() as i64 || jd >= delta_grid.len() as i64 {
                        continue;
                    }
                    if analytic[jc as usize][jd as usize] != me {
                        return true;
                    }
                }
            }
            false
        };

        for ic in 0..c_grid.len() {
            for id in 0..delta_grid.len() {
                if !near_boundary(ic, id) {
                    assert_eq!(
                        pd.label(ic, id),
                        analytic[ic][id],
                        "cell (c = {}, δ = {})",
                        c_grid[ic],
                        delta_grid[id]
                    );
                }
            }
        }
    }

    #[test]
    fn overlay_covers_small_disorder_only() {
        let pd = phase_diagram(&[0.24, 1.0], &linspace(0.0, 0.9, 10)).unwrap();
        assert!(pd.overlay.iter().all(|p| p.delta.abs() < 0.5));
        for p in &pd.overlay {
            assert!(p.d_minus <= p.d_plus);
        }
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(phase_diagram(&[], &[0.1]).is_err());
        assert!(phase_diagram(&[0.0, 1.0], &[0.1]).is_err());
        assert!(phase_diagram(&[1.0, 0.5], &[0.1]).is_err());
    }
}
