use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::single_particle::SingleParticleBasis;
use crate::symmetry::{SectorBasis, SectorProjector};

use super::FockBasis;

/// `∫ φ_a φ_b φ_c φ_d dx` under the basis quadrature: the matrix element
/// `<a b| δ(x_1 - x_2) |c d>` of the contact interaction.
pub fn interaction_element(sp: &SingleParticleBasis, modes: [usize; 4]) -> Result<f64> {
    if let Some(&bad) = modes.iter().find(|&&m| m >= sp.cutoff()) {
        return Err(Error::InvalidArgument(format!(
            "mode index {bad} out of range (cutoff {})",
            sp.cutoff()
        )));
    }
    Ok(quartic(sp, modes))
}

fn quartic(sp: &SingleParticleBasis, [a, b, c, d]: [usize; 4]) -> f64 {
    let table = sp.amplitudes_at_nodes();
    sp.quadrature()
        .weights
        .iter()
        .enumerate()
        .map(|(k, w)| w * table[(a, k)] * table[(b, k)] * table[(c, k)] * table[(d, k)])
        .sum()
}

/// Two-body contact integrals cached by sorted index quadruple; the quartic
/// integral is symmetric under any reordering of its indices.
#[derive(Debug)]
pub struct ContactIntegrals<'a> {
    sp: &'a SingleParticleBasis,
    cache: HashMap<[usize; 4], f64>,
}

impl<'a> ContactIntegrals<'a> {
    pub fn new(sp: &'a SingleParticleBasis) -> Self {
        Self {
            sp,
            cache: HashMap::new(),
        }
    }

    pub fn get(&mut self, modes: [usize; 4]) -> f64 {
        let mut key = modes;
        key.sort_unstable();
        let sp = self.sp;
        *self.cache.entry(key).or_insert_with(|| quartic(sp, key))
    }

    pub fn cached(&self) -> usize {
        self.cache.len()
    }
}

/// The contact operator `δ(x_p - x_q)` for a single particle pair, acting as
/// identity on the spectators.
pub fn pair_term(fock: &FockBasis, p: usize, q: usize) -> Result<Mat> {
    let n = fock.n_particles();
    if p >= n || q >= n || p == q {
        return Err(Error::InvalidArgument(format!(
            "invalid pair ({p}, {q}) for {n} particles"
        )));
    }
    let mut integrals = ContactIntegrals::new(fock.single_particle());
    let d = fock.len();
    let mut m = Mat::zeros(d, d);
    let states = fock.states();
    for i in 0..d {
        for j in 0..=i {
            if let Some(v) = pair_element(&states[i], &states[j], p, q, &mut integrals) {
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
    }
    Ok(m)
}

fn pair_element(
    bra: &[usize],
    ket: &[usize],
    p: usize,
    q: usize,
    integrals: &mut ContactIntegrals<'_>,
) -> Option<f64> {
    let spectators_match = bra
        .iter()
        .zip(ket)
        .enumerate()
        .all(|(r, (a, b))| r == p || r == q || a == b);
    spectators_match.then(|| integrals.get([bra[p], bra[q], ket[p], ket[q]]))
}

/// Sum of the contact operator over all pairs, `Σ_{i<j} δ(x_i - x_j)`.
fn assemble_interaction(fock: &FockBasis) -> Mat {
    let n = fock.n_particles();
    let d = fock.len();
    let mut v = Mat::zeros(d, d);
    if n < 2 {
        return v;
    }
    let mut integrals = ContactIntegrals::new(fock.single_particle());
    let states = fock.states();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .collect();
    for i in 0..d {
        for j in 0..=i {
            let mut total = 0.0;
            let mut touched = false;
            for &(p, q) in &pairs {
                if let Some(x) = pair_element(&states[i], &states[j], p, q, &mut integrals) {
                    total += x;
                    touched = true;
                }
            }
            if touched {
                v[(i, j)] = total;
                v[(j, i)] = total;
            }
        }
    }
    v
}

/// `H(g) = H_0 + g V` on a product basis. `H_0` is the diagonal of
/// non-interacting energies; `V` is assembled once and shared between
/// couplings.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    g: f64,
    basis: Arc<FockBasis>,
    h0: Vec<f64>,
    vint: Arc<Mat>,
}

pub fn build_hamiltonian(fock: &Arc<FockBasis>, g: f64) -> Result<HamiltonianMatrix> {
    HamiltonianMatrix::new(fock.clone(), g)
}

impl HamiltonianMatrix {
    pub fn new(basis: Arc<FockBasis>, g: f64) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::EmptyBasis {
                e_max: basis.e_max(),
                min_energy: f64::NAN,
            });
        }
        if !g.is_finite() {
            return Err(Error::InvalidArgument(format!("coupling must be finite, got {g}")));
        }
        let vint = Arc::new(assemble_interaction(&basis));
        Ok(Self {
            g,
            h0: basis.energies().to_vec(),
            basis,
            vint,
        })
    }

    /// Same basis and interaction operator at another coupling.
    pub fn with_coupling(&self, g: f64) -> Self {
        Self {
            g,
            basis: self.basis.clone(),
            h0: self.h0.clone(),
            vint: self.vint.clone(),
        }
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.h0.len()
    }

    /// Diagonal of `H_0`.
    pub fn h0(&self) -> &[f64] {
        &self.h0
    }

    /// The coupling-independent interaction operator `V`.
    pub fn vint(&self) -> &Mat {
        &self.vint
    }

    /// Dense `H(g)`.
    pub fn matrix(&self) -> Mat {
        let mut h = self.vint.as_ref() * self.g;
        for (i, e) in self.h0.iter().enumerate() {
            h[(i, i)] += e;
        }
        h
    }
}

/// The pieces of `Bᵀ H(g) B` for one sector, so that blocks at many
/// couplings cost a single matrix addition each.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    h0: Mat,
    vint: Mat,
}

impl SectorHamiltonian {
    pub fn new(h: &HamiltonianMatrix, basis: &SectorBasis) -> Result<Self> {
        if basis.full_dim() != h.dim() {
            return Err(Error::Mismatch(format!(
                "sector basis lives in dimension {}, Hamiltonian in {}",
                basis.full_dim(),
                h.dim()
            )));
        }
        Ok(Self {
            h0: basis.project_diagonal(h.h0()),
            vint: basis.project(h.vint()),
        })
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn h0(&self) -> &Mat {
        &self.h0
    }

    pub fn vint(&self) -> &Mat {
        &self.vint
    }

    pub fn at(&self, g: f64) -> Mat {
        &self.h0 + &self.vint * g
    }
}

/// `Bᵀ H B` for the orthonormal sector basis `B` of `projector`.
pub fn sector_block(h: &HamiltonianMatrix, projector: &SectorProjector) -> Result<Mat> {
    let n = h.basis().n_particles();
    if projector.partition().degree() != n || projector.basis().full_dim() != h.dim() {
        return Err(Error::Mismatch(format!(
            "projector for {} on a {}-state basis does not match a {}-particle, {}-state Hamiltonian",
            projector.partition(),
            projector.basis().full_dim(),
            n,
            h.dim()
        )));
    }
    Ok(SectorHamiltonian::new(h, projector.basis())?.at(h.g()))
}
