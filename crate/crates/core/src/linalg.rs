//! Small dense and tridiagonal linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type Mat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

/// Largest absolute entry.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest complex modulus of any entry.
pub fn max_norm_c(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.norm()))
}

/// `max |a_ij - a_ji|`; returns infinity for non-square input.
pub fn asymmetry(m: &Mat) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// `max |a_ij - conj(a_ji)|`; returns infinity for non-square input.
pub fn non_hermiticity(m: &CMat) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Orthonormal basis for the column span of `cols`, built by modified
/// Gram-Schmidt with largest-residual pivoting. Columns whose residual norm
/// falls to `tol` or below are dropped. The result is deterministic.
pub fn pivoted_orthonormal_columns(cols: &Mat, tol: f64) -> Mat {
    let mut residual: Vec<DVector<f64>> = cols.column_iter().map(|c| c.into_owned()).collect();
    let mut active: Vec<bool> = vec![true; residual.len()];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (j, r) in residual.iter().enumerate() {
            if !active[j] {
                continue;
            }
            let n = r.norm();
            // Strict comparison keeps the lowest index on ties.
            if best.is_none_or(|(_, b)| n > b + 1e-14) {
                best = Some((j, n));
            }
        }
        let Some((pivot, norm)) = best else { break };
        if norm <= tol {
            break;
        }
        active[pivot] = false;
        let q = &residual[pivot] / norm;
        for (j, r) in residual.iter_mut().enumerate() {
            if active[j] {
                let proj = q.dot(r);
                r.axpy(-proj, &q, 1.0);
            }
        }
        basis.push(q);
    }
    if basis.is_empty() {
        return Mat::zeros(cols.nrows(), 0);
    }
    Mat::from_columns(&basis)
}

/// Real symmetric tridiagonal matrix with diagonal `diag` and
/// sub/super-diagonal `off` (`off.len() == diag.len() - 1`).
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length");
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let q_prev = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q_prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k` lowest eigenvalues in ascending order, by bisection.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let k = k.min(self.dim());
        let (lo, hi) = self.gershgorin();
        let span = (hi - lo).max(1.0);
        let mut out = Vec::with_capacity(k);
        let mut floor = lo - 1e-12 * span;
        for i in 0..k {
            let mut a = floor;
            let mut b = hi + 1e-12 * span;
            // Invariant: count_below(a) <= i < count_below(b).
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.count_below(mid) > i {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let lambda = 0.5 * (a + b);
            out.push(lambda);
            floor = a;
        }
        out
    }

    /// Eigenvector for an (accurate) eigenvalue by inverse iteration,
    /// orthogonalized against `previous`. Returned with unit Euclidean norm.
    pub fn eigenvector(&self, lambda: f64, previous: &[DVector<f64>]) -> DVector<f64> {
        let n = self.dim();
        let (lo, hi) = self.gershgorin();
        let shift = lambda + 1e-13 * (hi - lo).max(1.0);
        let lu = TridiagonalLu::factor(self, shift);
        // Deterministic, non-symmetric start vector.
        let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.37 * ((i % 7) as f64) / 7.0);
        for _ in 0..4 {
            let mut y = lu.solve(&v);
            for p in previous {
                let c = p.dot(&y);
                y.axpy(-c, p, 1.0);
            }
            let norm = y.norm();
            v = y / norm;
        }
        v
    }
}

/// LU factorization with partial pivoting of `T - shift I` for a symmetric
/// tridiagonal `T` (the layout of LAPACK `gttrf`).
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    ipiv: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.dim();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut ipiv = vec![false; n];
        let tiny = f64::EPSILON * t.diag.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                ipiv[i] = true;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            dl,
            d,
            du,
            du2,
            ipiv,
        }
    }

    fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.d.len();
        let mut x = b.clone();
        for i in 0..n.saturating_sub(1) {
            if self.ipiv[i] {
                x.swap_rows(i, i + 1);
            }
            x[i + 1] -= self.dl[i] * x[i];
        }
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
        x
    }
}
