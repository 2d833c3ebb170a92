//! Dense and sparse linear-algebra support: column-stacking vectorization,
//! superoperator assembly from Kronecker factors, LU solves with a condition
//! estimate, and Hermitian eigenvalues.
//!
//! Vectorization convention is column stacking throughout: `vec(ρ)` is the
//! concatenation of the columns of ρ, so a sandwich product maps as
//! `A ρ B ↦ (Bᵀ ⊗ A) vec(ρ)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Column-stack a square matrix into a vector.
pub fn vectorize(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`] for an `n × n` matrix.
pub fn unvectorize(v: &DVector<C64>, n: usize) -> DMatrix<C64> {
    assert_eq!(v.len(), n * n, "vector length does not match matrix size");
    DMatrix::from_column_slice(n, n, v.as_slice())
}

/// `(row, col, value)` triplets accumulated while assembling a superoperator.
#[derive(Debug, Default, Clone)]
pub struct TripletSum {
    pub dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl TripletSum {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    /// Add `coeff · (Bᵀ ⊗ A)`, the vectorized form of `ρ ↦ A ρ B`.
    ///
    /// Both factors are `n × n` with `dim = n²`; only nonzero products are
    /// stored, so structurally sparse factors stay cheap.
    pub fn add_sandwich(&mut self, coeff: C64, a: &DMatrix<C64>, b: &DMatrix<C64>) {
        let n = a.nrows();
        assert_eq!(n * n, self.dim);
        assert_eq!(b.nrows(), n);
        for q in 0..n {
            for p in 0..n {
                let bqp = b[(q, p)];
                if bqp == C64::ZERO {
                    continue;
                }
                for s in 0..n {
                    for r in 0..n {
                        let ars = a[(r, s)];
                        if ars == C64::ZERO {
                            continue;
                        }
                        self.entries.push((p * n + r, q * n + s, coeff * bqp * ars));
                    }
                }
            }
        }
    }

    /// Add `coeff · (I ⊗ A)`, the vectorized form of `ρ ↦ A ρ`.
    pub fn add_left(&mut self, coeff: C64, a: &DMatrix<C64>) {
        let n = a.nrows();
        assert_eq!(n * n, self.dim);
        for p in 0..n {
            for s in 0..n {
                for r in 0..n {
                    let ars = a[(r, s)];
                    if ars == C64::ZERO {
                        continue;
                    }
                    self.entries.push((p * n + r, p * n + s, coeff * ars));
                }
            }
        }
    }

    /// Add `coeff · (Bᵀ ⊗ I)`, the vectorized form of `ρ ↦ ρ B`.
    pub fn add_right(&mut self, coeff: C64, b: &DMatrix<C64>) {
        let n = b.nrows();
        assert_eq!(n * n, self.dim);
        for q in 0..n {
            for p in 0..n {
                let bqp = b[(q, p)];
                if bqp == C64::ZERO {
                    continue;
                }
                for r in 0..n {
                    self.entries.push((p * n + r, q * n + r, coeff * bqp));
                }
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn to_csr(&self) -> Csr {
        Csr::from_triplets(self.dim, &self.entries)
    }
}

/// Compressed sparse row matrix over complex entries; square.
#[derive(Debug, Clone)]
pub struct Csr {
    pub dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<C64>,
}

impl Csr {
    pub fn from_triplets(dim: usize, entries: &[(usize, usize, C64)]) -> Self {
        let mut sorted: Vec<_> = entries.to_vec();
        sorted.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut col_idx: Vec<u32> = Vec::with_capacity(sorted.len());
        let mut vals: Vec<C64> = Vec::with_capacity(sorted.len());
        let mut rows: Vec<usize> = Vec::with_capacity(sorted.len());
        for (r, c, v) in sorted {
            if rows.last() == Some(&r) && col_idx.last() == Some(&(c as u32)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                col_idx.push(c as u32);
                vals.push(v);
            }
        }
        let mut row_ptr = vec![0usize; dim + 1];
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { dim, row_ptr, col_idx, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = M x`.
    pub fn mul_into(&self, x: &DVector<C64>, y: &mut DVector<C64>) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = C64::ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.col_idx[k] as usize];
            }
            y[r] = acc;
        }
    }
}

/// Condition-estimate threshold above which a solve is refused.
pub const CONDITION_LIMIT: f64 = 1e14;

/// Solve `A x = b` by LU with partial pivoting, returning the solution and a
/// cheap condition estimate (ratio of extreme pivot magnitudes).
///
/// The residual `‖A x − b‖∞` is verified against the problem scale; an
/// untrustworthy solve is reported as an error rather than returned.
pub fn solve_checked(a: &DMatrix<C64>, b: &DVector<C64>) -> Result<(DVector<C64>, f64)> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.len(), n);
    let lu = a.clone().lu();
    let u = lu.u();
    let mut max_piv = 0.0f64;
    let mut min_piv = f64::INFINITY;
    for i in 0..n {
        let p = u[(i, i)].norm();
        max_piv = max_piv.max(p);
        min_piv = min_piv.min(p);
    }
    let estimate = if min_piv == 0.0 { f64::INFINITY } else { max_piv / min_piv };
    if estimate > CONDITION_LIMIT {
        return Err(Error::IllConditioned { estimate, limit: CONDITION_LIMIT });
    }
    let x = lu
        .solve(b)
        .ok_or_else(|| Error::NumericalFailure("singular generator in linear solve".into()))?;

    let mut residual = a * &x;
    residual -= b;
    let res_norm = residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let a_norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let x_norm = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let b_norm = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = (n as f64) * a_norm * x_norm + b_norm;
    if res_norm > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NumericalFailure(format!(
            "linear solve residual {res_norm:.3e} too large for scale {scale:.3e}"
        )));
    }
    Ok((x, estimate))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_hermitian_eigenvalue(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m)[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vectorize_roundtrip_and_convention() {
        // column stacking: vec([[a,c],[b,d]]) = [a, b, c, d]
        let m = DMatrix::from_column_slice(2, 2, &[c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
        let v = vectorize(&m);
        assert_eq!(v[0], c(1., 0.));
        assert_eq!(v[1], c(2., 0.));
        assert_eq!(v[2], c(3., 0.));
        assert_eq!(v[3], c(4., 0.));
        assert_eq!(unvectorize(&v, 2), m);
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let a = DMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, (i * j) as f64 * 0.3));
        let b = DMatrix::from_fn(3, 3, |i, j| c((2 * i) as f64 - j as f64, 0.1 * i as f64));
        let rho = DMatrix::from_fn(3, 3, |i, j| c(0.5 * i as f64 + j as f64, 0.2 - i as f64));

        let mut t = TripletSum::new(9);
        t.add_sandwich(c(1., 0.), &a, &b);
        let g = t.to_dense();
        let direct = &a * &rho * &b;
        let via_vec = unvectorize(&(&g * vectorize(&rho)), 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(via_vec[(i, j)].re, direct[(i, j)].re, epsilon = 1e-12);
                assert_abs_diff_eq!(via_vec[(i, j)].im, direct[(i, j)].im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn left_right_match_sandwich_with_identity() {
        let a = DMatrix::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64));
        let id = DMatrix::identity(2, 2);

        let mut l1 = TripletSum::new(4);
        l1.add_left(c(2., 0.5), &a);
        let mut l2 = TripletSum::new(4);
        l2.add_sandwich(c(2., 0.5), &a, &id);
        assert_eq!(l1.to_dense(), l2.to_dense());

        let mut r1 = TripletSum::new(4);
        r1.add_right(c(-1., 0.25), &a);
        let mut r2 = TripletSum::new(4);
        r2.add_sandwich(c(-1., 0.25), &id, &a);
        assert_eq!(r1.to_dense(), r2.to_dense());
    }

    #[test]
    fn csr_matches_dense() {
        let mut t = TripletSum::new(4);
        let a = DMatrix::from_fn(2, 2, |i, j| c(i as f64 - j as f64, 1.0));
        let b = DMatrix::from_fn(2, 2, |i, j| c(0.5 * (i + j) as f64, -0.5));
        t.add_sandwich(c(1.5, -0.5), &a, &b);
        t.add_left(c(0., 1.), &b);
        let dense = t.to_dense();
        let csr = t.to_csr();
        let x = DVector::from_fn(4, |i, _| c(i as f64, 0.7 - i as f64));
        let mut y = DVector::zeros(4);
        csr.mul_into(&x, &mut y);
        let y_dense = &dense * &x;
        for i in 0..4 {
            assert_abs_diff_eq!(y[i].re, y_dense[i].re, epsilon = 1e-12);
            assert_abs_diff_eq!(y[i].im, y_dense[i].im, epsilon = 1e-12);
        }
    }

    #[test]
    fn solve_checked_recovers_known_solution() {
        let a = DMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                c(4.0 + i as f64, 0.0)
            } else {
                c(0.3, 0.1 * (i as f64 - j as f64))
            }
        });
        let x_true = DVector::from_fn(4, |i, _| c(1.0 + i as f64, -0.5));
        let b = &a * &x_true;
        let (x, cond) = solve_checked(&a, &b).unwrap();
        assert!(cond < 1e3);
        for i in 0..4 {
            assert_abs_diff_eq!(x[i].re, x_true[i].re, epsilon = 1e-12);
            assert_abs_diff_eq!(x[i].im, x_true[i].im, epsilon = 1e-12);
        }
    }

    #[test]
    fn solve_checked_rejects_singular() {
        let a = DMatrix::from_element(3, 3, c(1.0, 0.0));
        let b = DVector::from_element(3, c(1.0, 0.0));
        assert!(solve_checked(&a, &b).is_err());
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli_x() {
        let m = DMatrix::from_column_slice(
            2,
            2,
            &[C64::ZERO, c(1., 0.), c(1., 0.), C64::ZERO],
        );
        let vals = hermitian_eigenvalues(&m);
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-12);
    }
}
