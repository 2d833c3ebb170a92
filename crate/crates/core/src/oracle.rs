//! Brute-force validation on the full many-body Hilbert space.
//!
//! The production solvers restrict the dynamics to the single-excitation
//! manifold, which is exact because every channel conserves the excitation
//! number or strictly lowers it. This module rebuilds the model on the full
//! `2^(N+1)`-dimensional space of the chain plus sink, including every
//! recycling term the restricted model drops (`σ⁻ρσ⁺` for dissipation, and
//! the sandwich terms of dephasing, hopping, and sink transfer), and
//! evolves it as an independent implementation path. Dense matrices
//! throughout; the N ≤ 4 cap keeps everything tiny.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::dynamics::evolve_on_grid;
use crate::error::{Error, Result};
use crate::linalg::{unvectorize, vectorize, TripletSum};
use crate::model::{build_liouvillian, initial_state, ChainSpec, Representation};
use crate::ode::Dopri5;

/// Largest chain length accepted by the full-space oracle.
pub const MAX_SITES: usize = 4;

/// Hamiltonian and jump operators on the full chain + sink qubit register.
pub struct FullSpaceModel {
    /// N + 1 qubits: chain sites then the sink.
    pub n_qubits: usize,
    pub hamiltonian: DMatrix<C64>,
    /// `(rate, jump operator)` pairs of the Lindblad dissipator.
    pub jump_ops: Vec<(f64, DMatrix<C64>)>,
}

// qubit j occupies bit j of the basis index
fn lowering_op(n_qubits: usize, j: usize) -> DMatrix<C64> {
    let dim = 1usize << n_qubits;
    let bit = 1usize << j;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        if x & bit != 0 {
            m[(x & !bit, x)] = C64::ONE;
        }
    }
    m
}

fn number_op(n_qubits: usize, j: usize) -> DMatrix<C64> {
    let dim = 1usize << n_qubits;
    let bit = 1usize << j;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        if x & bit != 0 {
            m[(x, x)] = C64::ONE;
        }
    }
    m
}

/// `σ_to⁺ σ_from⁻`: moves an excitation between qubits.
fn transfer_op(n_qubits: usize, to: usize, from: usize) -> DMatrix<C64> {
    let dim = 1usize << n_qubits;
    let (bt, bf) = (1usize << to, 1usize << from);
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        if x & bf != 0 && x & bt == 0 {
            m[((x & !bf) | bt, x)] = C64::ONE;
        }
    }
    m
}

impl FullSpaceModel {
    pub fn build(spec: &ChainSpec) -> Result<Self> {
        spec.validate()?;
        if spec.n_sites > MAX_SITES {
            return Err(Error::SizeLimit { n_sites: spec.n_sites, max: MAX_SITES });
        }
        let n_qubits = spec.n_sites + 1;
        let dim = 1usize << n_qubits;

        let mut h = DMatrix::zeros(dim, dim);
        for (k, &w) in spec.site_energies.iter().enumerate() {
            h += number_op(n_qubits, k).map(|z| z * C64::new(w, 0.0));
        }
        for &(a, b) in &spec.edges {
            let fwd = transfer_op(n_qubits, b - 1, a - 1);
            let bwd = transfer_op(n_qubits, a - 1, b - 1);
            h += (fwd + bwd).map(|z| z * C64::new(spec.v, 0.0));
        }

        let mut jump_ops = Vec::new();
        for k in 0..spec.n_sites {
            if spec.gamma_diss > 0.0 {
                jump_ops.push((spec.gamma_diss, lowering_op(n_qubits, k)));
            }
            if spec.gamma_deph > 0.0 {
                jump_ops.push((spec.gamma_deph, number_op(n_qubits, k)));
            }
        }
        if spec.gamma_hop > 0.0 {
            for &(a, b) in &spec.edges {
                jump_ops.push((spec.gamma_hop, transfer_op(n_qubits, b - 1, a - 1)));
                jump_ops.push((spec.gamma_hop, transfer_op(n_qubits, a - 1, b - 1)));
            }
        }
        if spec.lambda_sink > 0.0 {
            jump_ops.push((spec.lambda_sink, transfer_op(n_qubits, spec.n_sites, spec.n_sites - 1)));
        }

        Ok(Self { n_qubits, hamiltonian: h, jump_ops })
    }

    /// Dense vectorized generator with all recycling terms.
    pub fn generator(&self) -> DMatrix<C64> {
        let dim = 1usize << self.n_qubits;
        let mut trips = TripletSum::new(dim * dim);
        trips.add_left(-C64::I, &self.hamiltonian);
        trips.add_right(C64::I, &self.hamiltonian);
        for (rate, a) in &self.jump_ops {
            let a_dag = a.adjoint();
            let ada = &a_dag * a;
            trips.add_sandwich(C64::new(*rate, 0.0), a, &a_dag);
            let half = C64::new(-0.5 * rate, 0.0);
            trips.add_left(half, &ada);
            trips.add_right(half, &ada);
        }
        trips.to_dense()
    }
}

/// Populations from a full-space evolution.
#[derive(Debug, Clone)]
pub struct FullSpacePopulations {
    pub times: Vec<f64>,
    /// `⟨n_k⟩(t)` indexed `[qubit][time]`; the last qubit is the sink.
    pub site_populations: Vec<Vec<f64>>,
    /// Total population in basis states holding two or more excitations.
    pub multi_excitation: Vec<f64>,
    /// Full density-matrix snapshots, for invariant checks.
    pub states: Vec<DMatrix<C64>>,
}

/// Evolve the full master equation from one excitation on `spec.init_site`
/// and record populations at `t_grid` (strictly increasing, positive).
pub fn full_space_evolve(
    spec: &ChainSpec,
    t_grid: &[f64],
    tol: f64,
) -> Result<FullSpacePopulations> {
    let model = FullSpaceModel::build(spec)?;
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] <= 0.0 {
        return Err(Error::Precondition(
            "time grid must be nonempty, positive, and strictly increasing".into(),
        ));
    }
    let g = model.generator();
    let dim = 1usize << model.n_qubits;

    let mut rho0 = DMatrix::zeros(dim, dim);
    rho0[(1 << (spec.init_site - 1), 1 << (spec.init_site - 1))] = C64::ONE;
    let y0 = vectorize(&rho0);

    let rhs = |y: &DVector<C64>, dy: &mut DVector<C64>| dy.gemv(C64::ONE, &g, y, C64::ZERO);
    let mut stepper = Dopri5::new(rhs, 0.0, y0.clone(), tol);

    let mut out = FullSpacePopulations {
        times: Vec::with_capacity(t_grid.len() + 1),
        site_populations: vec![Vec::new(); model.n_qubits],
        multi_excitation: Vec::new(),
        states: Vec::new(),
    };
    let mut record = |t: f64, y: &DVector<C64>| {
        let rho = unvectorize(y, dim);
        for (q, series) in out.site_populations.iter_mut().enumerate() {
            let bit = 1usize << q;
            let p: f64 = (0..dim).filter(|x| x & bit != 0).map(|x| rho[(x, x)].re).sum();
            series.push(p);
        }
        let multi: f64 = (0..dim)
            .filter(|x: &usize| x.count_ones() >= 2)
            .map(|x| rho[(x, x)].re)
            .sum();
        out.multi_excitation.push(multi);
        out.times.push(t);
        out.states.push(rho);
    };

    record(0.0, &y0);
    let t_final = *t_grid.last().unwrap();
    let mut pending = t_grid.iter().copied().peekable();
    while stepper.t() < t_final {
        stepper.step(t_final)?;
        while let Some(&g_t) = pending.peek() {
            if g_t > stepper.t() {
                break;
            }
            let yg = stepper.dense(g_t);
            record(g_t, &yg);
            pending.next();
        }
    }
    Ok(out)
}

/// Maximum absolute deviation between full-space and restricted populations
/// over every site (including the sink) and every grid time.
pub fn compare_restriction(spec: &ChainSpec, t_grid: &[f64], tol: f64) -> Result<f64> {
    let full = full_space_evolve(spec, t_grid, tol)?;

    let l = build_liouvillian(spec, Representation::ChainWithSink)?;
    let rho0 = initial_state(spec, Representation::ChainWithSink)?;
    let sub = evolve_on_grid(&l, &rho0, t_grid, tol)?;

    assert_eq!(full.times.len(), sub.times.len());
    let mut worst = 0.0f64;
    for ti in 0..full.times.len() {
        for site in 0..spec.n_sites {
            let dev = (full.site_populations[site][ti] - sub.populations[site][ti]).abs();
            worst = worst.max(dev);
        }
        let dev = (full.site_populations[spec.n_sites][ti] - sub.sink_series[ti]).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}
