//! Block diagonalization, level dynamics in `g`, degeneracy clustering and
//! the hard-core reference spectrum.

mod sweep;

use std::sync::Arc;

use nalgebra::SymmetricEigen;

pub use sweep::{sweep_levels, sweep_sector, AmbiguityFlag, SweepResult, Track, AMBIGUITY_TOL};

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, max_abs, Mat};
use crate::manybody::{FockBasis, HamiltonianMatrix, SectorHamiltonian};
use crate::single_particle::SingleParticleBasis;
use crate::symmetry::{sector_projector, Partition, SectorProjector};

/// Accepted asymmetry of an input block, relative to its largest entry.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order with eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl Eigensystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Full eigendecomposition of a real symmetric matrix. Each eigenvector's
/// first significant component is made positive.
pub fn eigensolve_block(block: &Mat) -> Result<Eigensystem> {
    if !block.is_square() {
        return Err(Error::InvalidArgument(format!(
            "block is {}x{}, not square",
            block.nrows(),
            block.ncols()
        )));
    }
    let scale = max_abs(block).max(1.0);
    let skew = asymmetry(block);
    if skew > SYMMETRY_TOL * scale {
        return Err(Error::InvalidArgument(format!(
            "block is not symmetric (max |A - Aᵀ| = {skew:.3e})"
        )));
    }
    let n = block.nrows();
    if n == 0 {
        return Ok(Eigensystem {
            values: Vec::new(),
            vectors: Mat::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(block.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        let peak = col.amax();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-8 * peak) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        vectors.set_column(dst, &col);
    }
    Ok(Eigensystem { values, vectors })
}

/// Spectrum of one symmetry block of `H(g)`. Eigenvectors are expressed in
/// the sector basis.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub partition: Partition,
    pub g: f64,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat,
}

pub fn sector_spectrum(h: &HamiltonianMatrix, projector: &SectorProjector) -> Result<SectorSpectrum> {
    let block = crate::manybody::sector_block(h, projector)?;
    let eig = eigensolve_block(&block)?;
    Ok(SectorSpectrum {
        partition: projector.partition().clone(),
        g: h.g(),
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    })
}

/// Convenience: projector, sector Hamiltonian and spectrum for one sector.
pub fn solve_sector(
    fock: &Arc<FockBasis>,
    partition: &Partition,
    g: f64,
) -> Result<SectorSpectrum> {
    let h = HamiltonianMatrix::new(fock.clone(), g)?;
    let projector = sector_projector(partition, fock)?;
    let block = SectorHamiltonian::new(&h, projector.basis())?.at(g);
    let eig = eigensolve_block(&block)?;
    Ok(SectorSpectrum {
        partition: partition.clone(),
        g,
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    })
}

/// Hard-core (`g -> ∞`) limit of the bosonic spectrum: energies of `n`
/// non-interacting spinless fermions, i.e. sums of `n` distinct
/// single-particle energies, ascending.
pub fn girardeau_reference(sp: &SingleParticleBasis, n: usize) -> Result<Vec<f64>> {
    let cutoff = sp.cutoff();
    if n == 0 {
        return Err(Error::InvalidArgument("particle number must be >= 1".into()));
    }
    if cutoff < n {
        return Err(Error::InsufficientBasis {
            available: cutoff,
            required: n,
        });
    }
    let eps = sp.energies();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = (0..n).collect();
    loop {
        out.push(chosen.iter().map(|&m| eps[m]).sum::<f64>());
        // next n-combination of 0..cutoff in lexicographic order
        let Some(i) = (0..n).rev().find(|&i| chosen[i] < cutoff - n + i) else {
            break;
        };
        chosen[i] += 1;
        for j in i + 1..n {
            chosen[j] = chosen[j - 1] + 1;
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// A run of nearly equal eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    /// Mean of the clustered eigenvalues.
    pub energy: f64,
    pub multiplicity: usize,
}

/// Default clustering tolerance: `1e-6` of the spectral span.
pub fn default_degeneracy_tol(eigenvalues: &[f64]) -> f64 {
    let span = match (eigenvalues.first(), eigenvalues.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    1e-6 * if span > 0.0 { span } else { 1.0 }
}

/// Greedy clustering of consecutive ascending eigenvalues whose gap is below
/// `tol`.
pub fn degeneracy_clusters(eigenvalues: &[f64], tol: f64) -> Result<Vec<Cluster>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    for &e in eigenvalues {
        match prev {
            Some(p) if e - p < tol => {
                let last = clusters.last_mut().unwrap();
                last.multiplicity += 1;
                sum += e;
                last.energy = sum / last.multiplicity as f64;
            }
            _ => {
                clusters.push(Cluster {
                    energy: e,
                    multiplicity: 1,
                });
                sum = e;
            }
        }
        prev = Some(e);
    }
    Ok(clusters)
}
