//! Parameter sweeps, extrema detection, and phase diagrams.
//!
//! A sweep evaluates the transfer efficiency over a grid of one chain
//! parameter (or a linked pair such as γ_h = ξ γ). Every point is an
//! independent deterministic linear solve, so grids evaluate in parallel and
//! the assembled table is bit-identical for any worker count. Failed points
//! are recorded and skipped rather than aborting the sweep.

mod extrema;
mod phase;

pub use extrema::{find_extrema, Extremum, ExtremumKind};
pub use phase::{analytic_labels, numeric_region, phase_diagram, OverlayPoint, PhaseDiagram};

use rayon::prelude::*;

use crate::dynamics::efficiency_linear_solve;
use crate::error::{Error, Result};
use crate::model::ChainSpec;

/// Grid spacing descriptor; recorded in sweep tables and used by grid
/// builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `n` logarithmically spaced points from `a` to `b` inclusive; both
/// positive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1 && a > 0.0 && b > 0.0);
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

/// The chain parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepParameter {
    GammaHop,
    GammaDeph,
    GammaDiss,
    LambdaSink,
    /// Site-1 energy offset; all other site energies reset to zero.
    Delta,
    /// Dephasing sweep with incoherent hopping tied to it, γ_h = ξ γ.
    GammaDephLinked { xi: f64 },
}

impl SweepParameter {
    /// Identifier used in tables and output files.
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::GammaHop => "gamma_hop",
            SweepParameter::GammaDeph => "gamma_deph",
            SweepParameter::GammaDiss => "gamma_diss",
            SweepParameter::LambdaSink => "lambda_sink",
            SweepParameter::Delta => "delta",
            SweepParameter::GammaDephLinked { .. } => "gamma_deph_linked",
        }
    }

    /// Whether grid values must be nonnegative.
    pub fn nonnegative(&self) -> bool {
        !matches!(self, SweepParameter::Delta)
    }

    /// The spec with this parameter set to `value`.
    pub fn apply(&self, spec: &ChainSpec, value: f64) -> ChainSpec {
        let mut out = spec.clone();
        match *self {
            SweepParameter::GammaHop => out.gamma_hop = value,
            SweepParameter::GammaDeph => out.gamma_deph = value,
            SweepParameter::GammaDiss => out.gamma_diss = value,
            SweepParameter::LambdaSink => out.lambda_sink = value,
            SweepParameter::Delta => {
                out.site_energies = vec![0.0; out.n_sites];
                out.site_energies[0] = value;
            }
            SweepParameter::GammaDephLinked { xi } => {
                out.gamma_deph = value;
                out.gamma_hop = xi * value;
            }
        }
        out
    }
}

/// Ordered sweep records with extrema annotations.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub param: SweepParameter,
    pub scale: Scale,
    /// Strictly increasing parameter values.
    pub grid: Vec<f64>,
    /// Efficiency per grid point; `None` marks a failed evaluation.
    pub eta: Vec<Option<f64>>,
    /// `(grid index, reason)` for each failed point.
    pub failures: Vec<(usize, String)>,
    /// Interior extrema, refined within their bracketing cells.
    pub extrema: Vec<Extremum>,
}

impl SweepTable {
    /// Efficiency values with failures dropped.
    pub fn present(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid
            .iter()
            .zip(&self.eta)
            .filter_map(|(&g, eta)| eta.map(|e| (g, e)))
    }
}

/// Sweep the efficiency over `grid` for one parameter.
///
/// Each point runs [`efficiency_linear_solve`] on the spec with the
/// parameter substituted; evaluation order never affects the result. Points
/// that fail (for example Γ = 0 in a `gamma_diss` sweep) are recorded in
/// `failures` and excluded from extrema detection.
pub fn sweep_1d(
    spec: &ChainSpec,
    param: SweepParameter,
    grid: &[f64],
    scale: Scale,
) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::Precondition("sweep grid must be nonempty".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("sweep grid must be strictly increasing".into()));
    }
    if param.nonnegative() && grid[0] < 0.0 {
        return Err(Error::Precondition(format!(
            "parameter {} requires nonnegative grid values",
            param.name()
        )));
    }
    spec.validate()?;

    let results: Vec<std::result::Result<f64, String>> = grid
        .par_iter()
        .map(|&value| {
            efficiency_linear_solve(&param.apply(spec, value)).map_err(|e| e.to_string())
        })
        .collect();

    let mut eta = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(e) => eta.push(Some(e)),
            Err(reason) => {
                eta.push(None);
                failures.push((i, reason));
            }
        }
    }

    let refine = |value: f64| efficiency_linear_solve(&param.apply(spec, value)).ok();
    let extrema = find_extrema(grid, &eta, &refine);

    Ok(SweepTable { param, scale, grid: grid.to_vec(), eta, failures, extrema })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_builders() {
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let lg = logspace(1e-2, 1e2, 5);
        assert_abs_diff_eq!(lg[0], 1e-2, epsilon = 1e-15);
        assert_abs_diff_eq!(lg[2], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lg[4], 1e2, epsilon = 1e-10);
    }

    #[test]
    fn default_two_site_sweep_has_single_minimum_near_dip() {
        let spec = ChainSpec::line(2);
        let grid = logspace(1e-2, 1e3, 200);
        let table = sweep_1d(&spec, SweepParameter::GammaHop, &grid, Scale::Log).unwrap();
        assert!(table.failures.is_empty());
        let mins: Vec<_> = table
            .extrema
            .iter()
            .filter(|e| e.kind == ExtremumKind::Minimum)
            .collect();
        assert_eq!(mins.len(), 1);
        assert_eq!(table.extrema.len(), 1);
        let expected = crate::analytic::dip_location_uniform(1.0, 0.02, 0.2, 0.0).unwrap();
        assert_abs_diff_eq!(mins[0].position, expected, epsilon = 1e-6);
    }

    #[test]
    fn detuned_sweep_shows_maximum_then_minimum() {
        let spec = ChainSpec::line(2).with_detuning(0.4);
        let grid = logspace(1e-2, 1e3, 300);
        let table = sweep_1d(&spec, SweepParameter::GammaHop, &grid, Scale::Log).unwrap();
        assert_eq!(table.extrema.len(), 2);
        assert_eq!(table.extrema[0].kind, ExtremumKind::Maximum);
        assert_eq!(table.extrema[1].kind, ExtremumKind::Minimum);
        assert!(table.extrema[0].position < table.extrema[1].position);
    }

    #[test]
    fn region_b_sweep_is_monotone() {
        let spec = ChainSpec::line(2).with_detuning(0.6);
        let grid = logspace(1e-2, 1e3, 200);
        let table = sweep_1d(&spec, SweepParameter::GammaHop, &grid, Scale::Log).unwrap();
        assert!(table.extrema.is_empty());
        let etas: Vec<f64> = table.present().map(|(_, e)| e).collect();
        assert!(etas.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn failed_points_are_recorded_and_skipped() {
        let spec = ChainSpec::line(2);
        // gamma_diss = 0 at the first grid point violates the Γ > 0
        // precondition; the rest of the sweep must survive
        let grid = [0.0, 0.01, 0.02, 0.04, 0.08, 0.16];
        let table = sweep_1d(&spec, SweepParameter::GammaDiss, &grid, Scale::Linear).unwrap();
        assert_eq!(table.failures.len(), 1);
        assert_eq!(table.failures[0].0, 0);
        assert!(table.eta[0].is_none());
        assert!(table.eta[1..].iter().all(|e| e.is_some()));
    }

    #[test]
    fn linked_sweep_ties_hopping_to_dephasing() {
        let spec = ChainSpec::line(2).with_detuning(5.0);
        let param = SweepParameter::GammaDephLinked { xi: 1e-3 };
        let applied = param.apply(&spec, 200.0);
        assert_abs_diff_eq!(applied.gamma_deph, 200.0, epsilon = 1e-15);
        assert_abs_diff_eq!(applied.gamma_hop, 0.2, epsilon = 1e-15);

        let grid = logspace(1e-2, 1e4, 150);
        let table = sweep_1d(&spec, param, &grid, Scale::Log).unwrap();
        let mins: Vec<_> = table
            .extrema
            .iter()
            .filter(|e| e.kind == ExtremumKind::Minimum)
            .collect();
        assert_eq!(mins.len(), 1, "one interior dip expected");
    }

    #[test]
    fn longer_chains_are_less_efficient() {
        let grid = logspace(1e-1, 1e2, 40);
        let t2 = sweep_1d(&ChainSpec::line(2), SweepParameter::GammaHop, &grid, Scale::Log).unwrap();
        let t5 = sweep_1d(&ChainSpec::line(5), SweepParameter::GammaHop, &grid, Scale::Log).unwrap();
        for ((_, e2), (_, e5)) in t2.present().zip(t5.present()) {
            assert!(e5 < e2);
        }
    }

    #[test]
    fn sweeps_are_deterministic_across_worker_counts() {
        let spec = ChainSpec::line(3);
        let grid = logspace(1e-2, 1e2, 60);
        let run = |threads: usize| -> Vec<u64> {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                sweep_1d(&spec, SweepParameter::GammaHop, &grid, Scale::Log)
                    .unwrap()
                    .eta
                    .iter()
                    .map(|e| e.unwrap().to_bits())
                    .collect()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn bad_grids_are_rejected() {
        let spec = ChainSpec::line(2);
        assert!(sweep_1d(&spec, SweepParameter::GammaHop, &[], Scale::Linear).is_err());
        assert!(sweep_1d(&spec, SweepParameter::GammaHop, &[1.0, 1.0], Scale::Linear).is_err());
        assert!(sweep_1d(&spec, SweepParameter::GammaHop, &[-1.0, 1.0], Scale::Linear).is_err());
        // delta may be negative
        assert!(sweep_1d(&spec, SweepParameter::Delta, &[-1.0, 1.0], Scale::Linear).is_ok());
    }
}
