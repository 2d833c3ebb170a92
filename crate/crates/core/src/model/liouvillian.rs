//! Vectorized Lindblad generator for a chain instance.
//!
//! The master equation combines the commutator with four channel families:
//!
//! - dissipation: anticommutator decay `−(Γ/2){n_k, ρ}` on every chain site
//!   (the recycling term leaves the single-excitation manifold, so inside it
//!   dissipation is pure loss);
//! - local dephasing: full jump channel with operator `n_k = |k⟩⟨k|` at rate
//!   γ on every chain site;
//! - incoherent hopping: jump operators `|ℓ⟩⟨k|` and `|k⟩⟨ℓ|`, each at rate
//!   γ_h, on every edge;
//! - sink: jump operator `|N+1⟩⟨N|` at rate Λ (chain + sink representation),
//!   or anticommutator-only loss `−(Λ/2){n_N, ρ}` (chain-only).
//!
//! The sink site itself has no Γ decay and no dephasing. Generators are
//! stored dense up to 65 basis states and in compressed sparse rows above.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{vectorize, unvectorize, Csr, TripletSum};

use super::{build_hamiltonian, ChainSpec, DensityMatrix, Representation};

/// Largest state-space dimension kept dense.
const DENSE_LIMIT: usize = 65;

enum Storage {
    Dense(DMatrix<C64>),
    Sparse(Csr),
}

/// The vectorized generator `G` of the master equation,
/// `d vec(ρ)/dt = G vec(ρ)`, under column-stacking vectorization.
pub struct Liouvillian {
    rep: Representation,
    n_state: usize,
    storage: Storage,
}

impl Liouvillian {
    /// State-space dimension `n`; the generator acts on length-`n²` vectors.
    pub fn dim(&self) -> usize {
        self.n_state
    }

    pub fn rep(&self) -> Representation {
        self.rep
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    /// The dense generator matrix, if stored dense.
    pub fn generator_dense(&self) -> Option<&DMatrix<C64>> {
        match &self.storage {
            Storage::Dense(g) => Some(g),
            Storage::Sparse(_) => None,
        }
    }

    /// Wrap an explicit dense generator; for experiments with modified
    /// generators. `matrix` must be `n² × n²` for the given dimension.
    pub fn from_dense(rep: Representation, n_state: usize, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != n_state * n_state || matrix.ncols() != n_state * n_state {
            return Err(Error::Precondition(format!(
                "generator must be {0}×{0} for dimension {1}",
                n_state * n_state,
                n_state
            )));
        }
        Ok(Self { rep, n_state, storage: Storage::Dense(matrix) })
    }

    /// `y = G x` on vectorized states.
    pub fn apply_vec_into(&self, x: &DVector<C64>, y: &mut DVector<C64>) {
        match &self.storage {
            Storage::Dense(g) => y.gemv(C64::ONE, g, x, C64::ZERO),
            Storage::Sparse(g) => g.mul_into(x, y),
        }
    }

    /// Action of the generator on a density matrix: `dρ/dt`.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        assert_eq!(rho.nrows(), self.n_state, "state dimension mismatch");
        let x = vectorize(rho);
        let mut y = DVector::zeros(x.len());
        self.apply_vec_into(&x, &mut y);
        unvectorize(&y, self.n_state)
    }

    /// Convenience wrapper over [`Liouvillian::apply`].
    pub fn apply_state(&self, rho: &DensityMatrix) -> DMatrix<C64> {
        self.apply(rho.matrix())
    }
}

/// Assemble the generator for `spec` in the requested representation.
pub fn build_liouvillian(spec: &ChainSpec, rep: Representation) -> Result<Liouvillian> {
    spec.validate()?;
    let n_sites = spec.n_sites;
    let n = rep.dim(n_sites);
    let mut trips = TripletSum::new(n * n);

    let projector = |k: usize| -> DMatrix<C64> {
        let mut p = DMatrix::zeros(n, n);
        p[(k, k)] = C64::ONE;
        p
    };
    let transfer = |to: usize, from: usize| -> DMatrix<C64> {
        let mut a = DMatrix::zeros(n, n);
        a[(to, from)] = C64::ONE;
        a
    };

    // −i[H, ρ]; the chain Hamiltonian embeds in the upper-left block and the
    // sink state is coherently uncoupled.
    let h_chain = build_hamiltonian(spec)?;
    let mut h = DMatrix::zeros(n, n);
    h.view_mut((0, 0), (n_sites, n_sites)).copy_from(&h_chain);
    trips.add_left(-C64::I, &h);
    trips.add_right(C64::I, &h);

    // chain projector Σ_k n_k, used by the anticommutator parts below
    let mut p_chain = DMatrix::zeros(n, n);
    for k in 0..n_sites {
        p_chain[(k, k)] = C64::ONE;
    }

    // dissipation: −(Γ/2){n_k, ρ} for each chain site; summed into P_chain
    if spec.gamma_diss > 0.0 {
        let half = C64::new(-0.5 * spec.gamma_diss, 0.0);
        trips.add_left(half, &p_chain);
        trips.add_right(half, &p_chain);
    }

    // local dephasing: γ Σ_k (n_k ρ n_k − ½{n_k, ρ})
    if spec.gamma_deph > 0.0 {
        let rate = C64::new(spec.gamma_deph, 0.0);
        for k in 0..n_sites {
            let nk = projector(k);
            trips.add_sandwich(rate, &nk, &nk);
        }
        let half = C64::new(-0.5 * spec.gamma_deph, 0.0);
        trips.add_left(half, &p_chain);
        trips.add_right(half, &p_chain);
    }

    // incoherent hopping: both orientations of every edge at rate γ_h
    if spec.gamma_hop > 0.0 {
        let rate = C64::new(spec.gamma_hop, 0.0);
        let half = C64::new(-0.5 * spec.gamma_hop, 0.0);
        for &(a, b) in &spec.edges {
            for (from, to) in [(a - 1, b - 1), (b - 1, a - 1)] {
                let jump = transfer(to, from);
                trips.add_sandwich(rate, &jump, &jump.adjoint());
                let n_from = projector(from);
                trips.add_left(half, &n_from);
                trips.add_right(half, &n_from);
            }
        }
    }

    // sink transfer from site N at rate Λ
    if spec.lambda_sink > 0.0 {
        let n_last = projector(n_sites - 1);
        let half = C64::new(-0.5 * spec.lambda_sink, 0.0);
        trips.add_left(half, &n_last);
        trips.add_right(half, &n_last);
        if rep == Representation::ChainWithSink {
            let jump = transfer(n_sites, n_sites - 1);
            trips.add_sandwich(C64::new(spec.lambda_sink, 0.0), &jump, &jump.adjoint());
        }
    }

    let storage = if n <= DENSE_LIMIT {
        Storage::Dense(trips.to_dense())
    } else {
        Storage::Sparse(trips.to_csr())
    };
    Ok(Liouvillian { rep, n_state: n, storage })
}
