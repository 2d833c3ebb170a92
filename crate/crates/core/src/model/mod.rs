//! Chain model: specification, Hamiltonian, states, and the Lindblad
//! generator on the single-excitation manifold.
//!
//! A chain of `N` two-level sites holds at most one excitation. The basis
//! state `|k⟩` puts the excitation on site `k`; the optional extra state
//! `|N+1⟩` is the absorbing sink. Because every incoherent channel either
//! conserves the excitation number (dephasing, incoherent hopping, sink
//! transfer) or strictly lowers it (dissipation), the single-excitation
//! restriction is exact: dissipation appears inside the manifold as pure
//! loss, with no recycling term.

mod liouvillian;

pub use liouvillian::{build_liouvillian, Liouvillian};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// Default dissipation rate Γ/v.
pub const DEFAULT_GAMMA_DISS: f64 = 0.02;
/// Default sink rate Λ/v, fixed by the conventional ratio Λ/Γ = 10.
pub const DEFAULT_LAMBDA_SINK: f64 = 0.2;

/// State space used by a generator or state.
///
/// `ChainOnly` (dimension `N`) drops the sink state and encodes the sink
/// channel as pure loss from site `N`; every eigenvalue of the generator then
/// has a strictly negative real part whenever Γ > 0, which makes the
/// resolvent linear solve for the efficiency well posed. `ChainWithSink`
/// (dimension `N+1`) keeps the sink state so its population accumulates
/// along trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    ChainOnly,
    ChainWithSink,
}

impl Representation {
    /// State-space dimension for a chain of `n_sites`.
    pub fn dim(self, n_sites: usize) -> usize {
        match self {
            Representation::ChainOnly => n_sites,
            Representation::ChainWithSink => n_sites + 1,
        }
    }
}

/// Full parameterization of a chain instance.
///
/// Sites are numbered from 1. All rates are in units of the coherent hopping
/// `v`, which is 1 by convention; only energy differences matter, so
/// `site_energies` are rotating-frame offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    /// Number of chain sites, excluding the sink.
    pub n_sites: usize,
    /// Unordered coupled pairs (1-based). A line chain uses `(k, k+1)`.
    pub edges: Vec<(usize, usize)>,
    /// On-site energies ω_k, length `n_sites`.
    pub site_energies: Vec<f64>,
    /// Coherent hopping rate; the reference unit.
    pub v: f64,
    /// Dissipation rate Γ of every chain site.
    pub gamma_diss: f64,
    /// Local dephasing rate γ of every chain site.
    pub gamma_deph: f64,
    /// Incoherent hopping rate γ_h on every edge.
    pub gamma_hop: f64,
    /// Transfer rate Λ from site `n_sites` into the sink.
    pub lambda_sink: f64,
    /// Site initially carrying the excitation (1-based).
    pub init_site: usize,
}

impl ChainSpec {
    /// Nearest-neighbor line of `n_sites` sites with the default rates
    /// (Γ = 0.02 v, Λ = 10 Γ, γ = γ_h = 0), uniform energies, excitation
    /// starting at site 1.
    pub fn line(n_sites: usize) -> Self {
        Self {
            n_sites,
            edges: (1..n_sites).map(|k| (k, k + 1)).collect(),
            site_energies: vec![0.0; n_sites],
            v: 1.0,
            gamma_diss: DEFAULT_GAMMA_DISS,
            gamma_deph: 0.0,
            gamma_hop: 0.0,
            lambda_sink: DEFAULT_LAMBDA_SINK,
            init_site: 1,
        }
    }

    /// Branched three-site preset: both outer sites couple to site 3, which
    /// feeds the sink. Default rates, excitation starting at site 1.
    pub fn lambda_three_site() -> Self {
        Self {
            n_sites: 3,
            edges: vec![(1, 3), (2, 3)],
            ..Self::line(3)
        }
    }

    /// Set the energy of site 1 to `delta`, all others to zero. This is the
    /// conventional single-parameter disorder entry: for two sites,
    /// δ = ω₁ − ω₂.
    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.site_energies = vec![0.0; self.n_sites];
        self.site_energies[0] = delta;
        self
    }

    pub fn with_gamma_diss(mut self, gamma_diss: f64) -> Self {
        self.gamma_diss = gamma_diss;
        self
    }

    pub fn with_gamma_deph(mut self, gamma_deph: f64) -> Self {
        self.gamma_deph = gamma_deph;
        self
    }

    pub fn with_gamma_hop(mut self, gamma_hop: f64) -> Self {
        self.gamma_hop = gamma_hop;
        self
    }

    pub fn with_lambda_sink(mut self, lambda_sink: f64) -> Self {
        self.lambda_sink = lambda_sink;
        self
    }

    /// Check every structural invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
            Error::InvalidSpec { field, reason: reason.into() }
        }
        if self.n_sites < 2 {
            return Err(invalid("n_sites", format!("need at least 2 sites, got {}", self.n_sites)));
        }
        if self.site_energies.len() != self.n_sites {
            return Err(invalid(
                "site_energies",
                format!("expected {} entries, got {}", self.n_sites, self.site_energies.len()),
            ));
        }
        if self.site_energies.iter().any(|w| !w.is_finite()) {
            return Err(invalid("site_energies", "entries must be finite"));
        }
        for (name, value) in [
            ("v", self.v),
            ("gamma_diss", self.gamma_diss),
            ("gamma_deph", self.gamma_deph),
            ("gamma_hop", self.gamma_hop),
            ("lambda_sink", self.lambda_sink),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidSpec {
                    field: match name {
                        "v" => "v",
                        "gamma_diss" => "gamma_diss",
                        "gamma_deph" => "gamma_deph",
                        "gamma_hop" => "gamma_hop",
                        _ => "lambda_sink",
                    },
                    reason: format!("must be finite and nonnegative, got {value}"),
                });
            }
        }
        if self.edges.is_empty() {
            return Err(invalid("edges", "at least one edge is required"));
        }
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &self.edges {
            if a == 0 || b == 0 || a > self.n_sites || b > self.n_sites {
                return Err(invalid(
                    "edges",
                    format!("edge ({a}, {b}) references a site outside 1..={}", self.n_sites),
                ));
            }
            if a == b {
                return Err(invalid("edges", format!("edge ({a}, {b}) is a self loop")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(invalid("edges", format!("edge ({a}, {b}) is duplicated")));
            }
        }
        if !self.is_connected() {
            return Err(invalid("edges", "the chain graph must be connected"));
        }
        if self.init_site == 0 || self.init_site > self.n_sites {
            return Err(invalid(
                "init_site",
                format!("must lie in 1..={}, got {}", self.n_sites, self.init_site),
            ));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let n = self.n_sites;
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a - 1].push(b - 1);
            adj[b - 1].push(a - 1);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(k) = stack.pop() {
            for &m in &adj[k] {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Energy difference ω₁ − ω₂; the disorder parameter of two-site chains.
    pub fn detuning(&self) -> f64 {
        self.site_energies[0] - self.site_energies[1]
    }
}

/// Single-excitation Hamiltonian of the chain (sink excluded): diagonal
/// entries ω_k, entries `v` on both orientations of every edge.
pub fn build_hamiltonian(spec: &ChainSpec) -> Result<DMatrix<C64>> {
    spec.validate()?;
    let n = spec.n_sites;
    let mut h = DMatrix::zeros(n, n);
    for (k, &w) in spec.site_energies.iter().enumerate() {
        h[(k, k)] = C64::new(w, 0.0);
    }
    for &(a, b) in &spec.edges {
        h[(a - 1, b - 1)] += C64::new(spec.v, 0.0);
        h[(b - 1, a - 1)] += C64::new(spec.v, 0.0);
    }
    Ok(h)
}

/// Pure state with the excitation on `spec.init_site`.
pub fn initial_state(spec: &ChainSpec, rep: Representation) -> Result<DensityMatrix> {
    spec.validate()?;
    let dim = rep.dim(spec.n_sites);
    Ok(DensityMatrix::basis_state(dim, spec.init_site - 1))
}

/// Hermiticity tolerance enforced on construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue on construction.
pub const PSD_TOL: f64 = 1e-9;
/// Trace upper slack on construction.
pub const TRACE_TOL: f64 = 1e-9;

/// Hermitian, positive-semidefinite matrix over the site basis with trace at
/// most one. Covers both the chain-only and chain + sink representations;
/// the dimension tells them apart.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validate and wrap a matrix. Hermiticity must hold to 1e-12, the
    /// smallest eigenvalue must exceed −1e-9, and the trace must lie in
    /// `[0, 1 + 1e-9]` (up to the same slack below zero).
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::Precondition("density matrix must be square".into()));
        }
        let dm = Self { mat };
        dm.check(PSD_TOL)?;
        Ok(dm)
    }

    /// Wrap without validation; for internal construction of states that are
    /// Hermitian and positive by build.
    pub(crate) fn unchecked(mat: DMatrix<C64>) -> Self {
        Self { mat }
    }

    /// `|k⟩⟨k|` (0-based `k`).
    pub fn basis_state(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut mat = DMatrix::zeros(dim, dim);
        mat[(k, k)] = C64::ONE;
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Diagonal entry `ρ_kk` (0-based).
    pub fn population(&self, k: usize) -> f64 {
        self.mat[(k, k)].re
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.mat[(k, k)].re).sum()
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            worst = worst.max(self.mat[(i, i)].im.abs());
            for j in i + 1..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_hermitian_eigenvalue(&self.mat)
    }

    /// Re-check the invariants with a caller-specified positivity tolerance
    /// (trajectory snapshots carry integration error and use 1e-8).
    pub fn check(&self, psd_tol: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::Precondition(format!(
                "density matrix not Hermitian: deviation {herm:.3e}"
            )));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -psd_tol {
            return Err(Error::Precondition(format!(
                "density matrix not positive semidefinite: min eigenvalue {min_eig:.3e}"
            )));
        }
        let tr = self.trace();
        if !(-PSD_TOL..=1.0 + TRACE_TOL).contains(&tr) {
            return Err(Error::Precondition(format!(
                "density matrix trace {tr} outside [0, 1]"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn line_spec_has_nearest_neighbor_edges() {
        let spec = ChainSpec::line(4);
        assert_eq!(spec.edges, vec![(1, 2), (2, 3), (3, 4)]);
        assert!(spec.validate().is_ok());
        assert_eq!(spec.gamma_diss, 0.02);
        assert_eq!(spec.lambda_sink, 0.2);
        assert_eq!(spec.init_site, 1);
    }

    #[test]
    fn uniform_two_site_hamiltonian() {
        let h = build_hamiltonian(&ChainSpec::line(2)).unwrap();
        assert_eq!(h[(0, 0)], C64::ZERO);
        assert_eq!(h[(1, 1)], C64::ZERO);
        assert_eq!(h[(0, 1)], C64::ONE);
        assert_eq!(h[(1, 0)], C64::ONE);
    }

    #[test]
    fn detuned_two_site_hamiltonian() {
        let h = build_hamiltonian(&ChainSpec::line(2).with_detuning(0.4)).unwrap();
        assert_abs_diff_eq!(h[(0, 0)].re, 0.4, epsilon = 1e-15);
        assert_eq!(h[(1, 1)], C64::ZERO);
        assert_eq!(h[(0, 1)], C64::ONE);
        assert_eq!(h[(1, 0)], C64::ONE);
    }

    #[test]
    fn three_site_line_is_tridiagonal() {
        let h = build_hamiltonian(&ChainSpec::line(3)).unwrap();
        for i in 0..3usize {
            for j in 0..3usize {
                let expected = if i.abs_diff(j) == 1 { C64::ONE } else { C64::ZERO };
                assert_eq!(h[(i, j)], expected, "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_for_arbitrary_edges() {
        let mut spec = ChainSpec::line(5).with_detuning(1.7);
        spec.edges.push((1, 4));
        spec.edges.push((2, 5));
        let h = build_hamiltonian(&spec).unwrap();
        assert_eq!(h.adjoint(), h);
    }

    #[test]
    fn initial_state_examples() {
        let rho = initial_state(&ChainSpec::line(2), Representation::ChainOnly).unwrap();
        assert_eq!(rho.dim(), 2);
        assert_eq!(rho.population(0), 1.0);
        assert_eq!(rho.population(1), 0.0);
        assert_abs_diff_eq!(rho.trace(), 1.0);

        let rho = initial_state(&ChainSpec::line(3), Representation::ChainWithSink).unwrap();
        assert_eq!(rho.dim(), 4);
        assert_eq!(rho.population(0), 1.0);
    }

    #[test]
    fn init_site_bounds_are_rejected() {
        let mut spec = ChainSpec::line(3);
        spec.init_site = 0;
        assert!(matches!(
            spec.validate(),
            Err(Error::InvalidSpec { field: "init_site", .. })
        ));
        spec.init_site = 4;
        assert!(matches!(
            spec.validate(),
            Err(Error::InvalidSpec { field: "init_site", .. })
        ));
    }

    #[test]
    fn invalid_specs_name_the_offending_field() {
        let mut spec = ChainSpec::line(3);
        spec.gamma_hop = -0.1;
        assert!(matches!(
            spec.validate(),
            Err(Error::InvalidSpec { field: "gamma_hop", .. })
        ));

        let mut spec = ChainSpec::line(3);
        spec.edges = vec![(1, 2)]; // site 3 disconnected
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec { field: "edges", .. })));

        let mut spec = ChainSpec::line(3);
        spec.edges.push((2, 2));
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec { field: "edges", .. })));

        let mut spec = ChainSpec::line(2);
        spec.site_energies = vec![0.0; 3];
        assert!(matches!(
            spec.validate(),
            Err(Error::InvalidSpec { field: "site_energies", .. })
        ));

        let spec = ChainSpec::line(1);
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec { field: "n_sites", .. })));
    }

    #[test]
    fn lambda_preset_shape() {
        let spec = ChainSpec::lambda_three_site();
        assert!(spec.validate().is_ok());
        assert_eq!(spec.edges, vec![(1, 3), (2, 3)]);
        let h = build_hamiltonian(&spec).unwrap();
        assert_eq!(h[(0, 1)], C64::ZERO); // sites 1 and 2 are not coupled
        assert_eq!(h[(0, 2)], C64::ONE);
        assert_eq!(h[(1, 2)], C64::ONE);
    }

    #[test]
    fn density_matrix_validation() {
        let good = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
        ]));
        assert!(DensityMatrix::new(good).is_ok());

        // non-Hermitian
        let mut bad = DMatrix::zeros(2, 2);
        bad[(0, 0)] = C64::ONE;
        bad[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(bad).is_err());

        // negative eigenvalue
        let mut neg = DMatrix::zeros(2, 2);
        neg[(0, 0)] = C64::new(1.2, 0.0);
        neg[(1, 1)] = C64::new(-0.2, 0.0);
        assert!(DensityMatrix::new(neg).is_err());

        // trace above one
        let over = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.8, 0.0),
            C64::new(0.8, 0.0),
        ]));
        assert!(DensityMatrix::new(over).is_err());
    }
}
