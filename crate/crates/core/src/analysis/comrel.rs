use std::sync::Arc;

use nalgebra::{DVector, SymmetricEigen};

use super::state::{entanglement_entropy, Bipartition, StateVector};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::manybody::FockBasis;
use crate::single_particle::TrapKind;

/// Change of basis from the two-particle product basis `|n_1, n_2>` to the
/// centre-of-mass / relative labelling `|K> ⊗ |k>`, with
/// `A = (a_1 + a_2)/√2` and `B = (a_1 - a_2)/√2`.
#[derive(Debug, Clone)]
pub struct ComRelMap {
    fock: Arc<FockBasis>,
    omega: f64,
    /// Column `j` is the product-basis expansion of `|labels[j]>`.
    unitary: Mat,
    /// `(K, k)` per column, ascending.
    labels: Vec<(usize, usize)>,
    shell: Vec<usize>,
    max_shell: usize,
    h_com: Mat,
    h_rel: Mat,
    /// Smallest overlap between a computed eigenvector and its ladder
    /// reference.
    reference_overlap: f64,
}

/// Builds the CoM/relative map for a two-particle harmonic product basis.
/// The basis must contain every shell `n_1 + n_2 = Q` it touches in full.
pub fn com_rel_map(fock: &Arc<FockBasis>) -> Result<ComRelMap> {
    let omega = match fock.single_particle().trap().kind {
        TrapKind::Harmonic { omega } => omega,
        ref other => {
            return Err(Error::UnsupportedTrap(format!(
                "centre-of-mass separation needs a harmonic trap, got {}",
                other.name()
            )))
        }
    };
    if fock.n_particles() != 2 {
        return Err(Error::InvalidArgument(format!(
            "centre-of-mass map is defined for 2 particles, basis has {}",
            fock.n_particles()
        )));
    }
    let dim = fock.len();
    let shell: Vec<usize> = fock.states().iter().map(|s| s[0] + s[1]).collect();
    let max_shell = shell.iter().copied().max().unwrap_or(0);

    // Product-basis indices of each shell, ordered by n_1.
    let mut shells: Vec<Vec<usize>> = Vec::with_capacity(max_shell + 1);
    for q in 0..=max_shell {
        let members: Option<Vec<usize>> = (0..=q).map(|a| fock.index_of(&[a, q - a])).collect();
        match members {
            Some(m) => shells.push(m),
            None => {
                return Err(Error::InvalidArgument(format!(
                    "shell n1 + n2 = {q} is only partially contained in the basis"
                )))
            }
        }
    }

    // Symmetrized hopping a1†a2 + a2†a1; it preserves every shell.
    let mut hop = Mat::zeros(dim, dim);
    for (i, s) in fock.states().iter().enumerate() {
        let (n1, n2) = (s[0], s[1]);
        if n2 > 0 {
            let j = shells[n1 + n2][n1 + 1];
            let amp = (((n1 + 1) * n2) as f64).sqrt();
            hop[(j, i)] += amp;
            hop[(i, j)] += amp;
        }
    }
    let total = Mat::from_diagonal(&DVector::from_iterator(
        dim,
        shell.iter().map(|&q| 0.5 * omega * (q as f64 + 1.0)),
    ));
    let h_com = &total + &hop * (0.5 * omega);
    let h_rel = &total - &hop * (0.5 * omega);

    let mut columns: Vec<((usize, usize), DVector<f64>)> = Vec::with_capacity(dim);
    let mut reference_overlap: f64 = 1.0;
    for (q, members) in shells.iter().enumerate() {
        let block = Mat::from_fn(q + 1, q + 1, |r, c| hop[(members[r], members[c])]);
        let eig = SymmetricEigen::new(block);
        for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
            // hop = A†A - B†B has eigenvalue K - k = 2K - Q on the shell.
            let big_k = ((lambda + q as f64) / 2.0).round() as usize;
            let small_k = q - big_k;
            let mut local = eig.eigenvectors.column(idx).into_owned();
            let reference = ladder_reference(big_k, small_k);
            let overlap = local.dot(&reference);
            if overlap < 0.0 {
                local.neg_mut();
            }
            reference_overlap = reference_overlap.min(overlap.abs());
            let mut full = DVector::zeros(dim);
            for (a, &i) in members.iter().enumerate() {
                full[i] = local[a];
            }
            columns.push(((big_k, small_k), full));
        }
    }
    columns.sort_by_key(|(label, _)| *label);
    let labels: Vec<(usize, usize)> = columns.iter().map(|(l, _)| *l).collect();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Degenerate(
            "centre-of-mass labels are not unique within a shell".into(),
        ));
    }
    let mut unitary = Mat::zeros(dim, dim);
    for (j, (_, col)) in columns.iter().enumerate() {
        unitary.set_column(j, col);
    }
    Ok(ComRelMap {
        fock: fock.clone(),
        omega,
        unitary,
        labels,
        shell,
        max_shell,
        h_com,
        h_rel,
        reference_overlap,
    })
}

/// `(A†)^K (B†)^k |0,0>` on shell `Q = K + k`, in coordinates `|a, Q-a>`,
/// normalized.
fn ladder_reference(big_k: usize, small_k: usize) -> DVector<f64> {
    let q = big_k + small_k;
    // (x + y)^K (x - y)^k = Σ_a c_a x^a y^(Q-a)
    let plus: Vec<f64> = (0..=big_k).map(|i| binomial(big_k, i)).collect();
    let minus: Vec<f64> = (0..=small_k)
        .map(|i| {
            let sign = if (small_k - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(small_k, i)
        })
        .collect();
    let mut v: DVector<f64> = DVector::zeros(q + 1);
    for (i, p) in plus.iter().enumerate() {
        for (j, m) in minus.iter().enumerate() {
            v[i + j] += p * m;
        }
    }
    // x^a y^b |0> = √(a! b!) |a, b>
    for a in 0..=q {
        v[a] *= (0.5 * (ln_factorial(a) + ln_factorial(q - a))).exp();
    }
    let norm = v.norm();
    v / norm
}

fn binomial(n: usize, k: usize) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

impl ComRelMap {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.fock
    }

    /// Orthogonal matrix whose columns are the `|K> ⊗ |k>` states.
    pub fn unitary(&self) -> &Mat {
        &self.unitary
    }

    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    pub fn max_shell(&self) -> usize {
        self.max_shell
    }

    /// `ω (A†A + 1/2)` in the product basis.
    pub fn h_com(&self) -> &Mat {
        &self.h_com
    }

    /// `ω (B†B + 1/2)` in the product basis.
    pub fn h_rel(&self) -> &Mat {
        &self.h_rel
    }

    pub fn reference_overlap(&self) -> f64 {
        self.reference_overlap
    }

    /// Max-norm of `[H_com, h]` over the whole truncated basis.
    pub fn commutator(&self, h: &Mat) -> Result<f64> {
        self.commutator_on(h, |_| true)
    }

    /// Max-norm of `[H_com, h]` restricted to states below the outermost
    /// shell.
    pub fn interior_commutator(&self, h: &Mat) -> Result<f64> {
        let top = self.max_shell;
        self.commutator_on(h, |q| q < top)
    }

    fn commutator_on(&self, h: &Mat, keep: impl Fn(usize) -> bool) -> Result<f64> {
        if h.nrows() != self.unitary.nrows() || !h.is_square() {
            return Err(Error::InvalidArgument(format!(
                "operator is {}x{}, basis has {} states",
                h.nrows(),
                h.ncols(),
                self.unitary.nrows()
            )));
        }
        let c = &self.h_com * h - h * &self.h_com;
        let mut worst: f64 = 0.0;
        for i in (0..c.nrows()).filter(|&i| keep(self.shell[i])) {
            for j in (0..c.ncols()).filter(|&j| keep(self.shell[j])) {
                worst = worst.max(c[(i, j)].abs());
            }
        }
        Ok(worst)
    }

    /// Coordinates of a product-basis state in the `|K, k>` basis.
    pub fn to_com_rel(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.unitary.nrows() {
            return Err(Error::InvalidArgument(format!(
                "state of dimension {} on a basis of {} states",
                state.dim(),
                self.unitary.nrows()
            )));
        }
        let u = &self.unitary;
        let amps = state.amplitudes();
        let coords = DVector::from_iterator(
            u.ncols(),
            (0..u.ncols()).map(|j| u.column(j).iter().zip(amps.iter()).map(|(&a, &b)| b * a).sum()),
        );
        Ok(StateVector::from_normalized(coords))
    }

    /// CoM factor first, relative factor second, over `|K, k>` coordinates.
    pub fn bipartition(&self) -> Bipartition {
        let d = self.max_shell + 1;
        Bipartition::new((d, d), self.labels.clone())
            .expect("labels are unique and bounded by the top shell")
    }

    /// Entanglement between centre-of-mass and relative motion of a
    /// product-basis state.
    pub fn entanglement(&self, state: &StateVector) -> Result<f64> {
        entanglement_entropy(&self.to_com_rel(state)?, &self.bipartition())
    }
}
