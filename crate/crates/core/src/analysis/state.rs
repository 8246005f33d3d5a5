use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, Mat};
use crate::manybody::FockBasis;
use crate::spectrum::eigensolve_block;

/// Unit-norm complex state over some basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Normalizes `amplitudes`; fails on a zero vector.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument(format!("state has norm {norm}")));
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::new(norm, 0.0),
        })
    }

    pub fn from_real(amplitudes: &DVector<f64>) -> Result<Self> {
        Self::new(amplitudes.map(|x| Complex64::new(x, 0.0)))
    }

    /// Basis vector `|index>` in a space of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!("index {index} outside dimension {dim}")));
        }
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub(crate) fn from_normalized(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Declares a basis as (a subspace of) a product `A ⊗ B`: basis index `k`
/// corresponds to the product state `|coords[k].0> ⊗ |coords[k].1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bipartition {
    dims: (usize, usize),
    coords: Vec<(usize, usize)>,
}

impl Bipartition {
    /// Fails unless every coordinate is in range and no product state is
    /// claimed twice.
    pub fn new(dims: (usize, usize), coords: Vec<(usize, usize)>) -> Result<Self> {
        let (d1, d2) = dims;
        let mut seen = vec![false; d1 * d2];
        for (k, &(a, b)) in coords.iter().enumerate() {
            if a >= d1 || b >= d2 {
                return Err(Error::InvalidArgument(format!(
                    "basis state {k} maps to ({a}, {b}) outside {d1}x{d2}"
                )));
            }
            if std::mem::replace(&mut seen[a * d2 + b], true) {
                return Err(Error::InvalidArgument(format!(
                    "basis state {k} repeats product state ({a}, {b}); not a product basis"
                )));
            }
        }
        Ok(Self { dims, coords })
    }

    /// Row-major full product `d1 x d2`.
    pub fn product(d1: usize, d2: usize) -> Self {
        Self {
            dims: (d1, d2),
            coords: (0..d1).flat_map(|a| (0..d2).map(move |b| (a, b))).collect(),
        }
    }

    /// Particle 1 vs particle 2 of a two-particle product basis.
    pub fn particles(fock: &FockBasis) -> Result<Self> {
        if fock.n_particles() != 2 {
            return Err(Error::InvalidArgument(format!(
                "particle bipartition needs 2 particles, basis has {}",
                fock.n_particles()
            )));
        }
        let d = fock.max_mode() + 1;
        Self::new((d, d), fock.states().iter().map(|s| (s[0], s[1])).collect())
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Amplitudes arranged as a `d1 x d2` coefficient matrix.
    pub fn reshape(&self, state: &StateVector) -> Result<CMat> {
        if state.dim() != self.coords.len() {
            return Err(Error::InvalidArgument(format!(
                "state of dimension {} on a bipartition of {} states",
                state.dim(),
                self.coords.len()
            )));
        }
        let mut m = CMat::zeros(self.dims.0, self.dims.1);
        for (&(a, b), &amp) in self.coords.iter().zip(state.amplitudes.iter()) {
            m[(a, b)] = amp;
        }
        Ok(m)
    }

    /// The same declaration with the two factors exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            dims: (self.dims.1, self.dims.0),
            coords: self.coords.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }
}

/// Von Neumann entropy (natural log) of the reduced state on the first
/// factor, from the Schmidt coefficients of the coefficient matrix.
pub fn entanglement_entropy(state: &StateVector, split: &Bipartition) -> Result<f64> {
    let m = split.reshape(state)?;
    let singular = m.singular_values();
    let probs: Vec<f64> = singular.iter().map(|s| s * s).collect();
    let total: f64 = probs.iter().sum();
    Ok(probs
        .iter()
        .map(|p| p / total)
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        .max(0.0))
}

/// `exp(-i H t)` through the spectral decomposition of a real symmetric `H`.
#[derive(Debug, Clone)]
pub struct Propagator {
    values: Vec<f64>,
    vectors: Mat,
}

impl Propagator {
    pub fn new(h: &Mat) -> Result<Self> {
        let eig = eigensolve_block(h)?;
        Ok(Self {
            values: eig.values,
            vectors: eig.vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }

    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "state of dimension {} evolved by a {}-dimensional Hamiltonian",
                state.dim(),
                self.dim()
            )));
        }
        let v = &self.vectors;
        let mut coeffs: DVector<Complex64> = DVector::zeros(self.dim());
        for (k, c) in coeffs.iter_mut().enumerate() {
            let col = v.column(k);
            let proj: Complex64 = col
                .iter()
                .zip(state.amplitudes.iter())
                .map(|(&a, &b)| b * a)
                .sum();
            *c = proj * Complex64::from_polar(1.0, -self.values[k] * t);
        }
        let mut out: DVector<Complex64> = DVector::zeros(self.dim());
        for (k, c) in coeffs.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(v.column(k).iter()) {
                *o += *c * a;
            }
        }
        Ok(StateVector::from_normalized(out))
    }
}

/// One-shot `exp(-i H t) |state>`.
pub fn evolve_state(h: &Mat, state: &StateVector, t: f64) -> Result<StateVector> {
    if h.nrows() != state.dim() {
        return Err(Error::InvalidArgument(format!(
            "state of dimension {} evolved by a {}-dimensional Hamiltonian",
            state.dim(),
            h.nrows()
        )));
    }
    Propagator::new(h)?.evolve(state, t)
}
