use nalgebra::DVector;

use super::{all_permutations, character_table, check_supported, factorial, Partition};
use crate::error::{Error, Result};
use crate::linalg::{pivoted_orthonormal_columns, Mat};
use crate::manybody::FockBasis;

/// Singular-value threshold below which projector columns are treated as
/// dependent when extracting a sector basis.
pub const PROJECTOR_RANK_TOL: f64 = 1e-8;

/// Orthonormal basis of a sector, stored column-sparse. Each column is
/// supported on a single permutation orbit of the product basis.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    full_dim: usize,
    columns: Vec<Vec<(usize, f64)>>,
    orbits: Vec<usize>,
}

impl SectorBasis {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Dimension of the ambient product basis.
    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// Non-zero entries `(basis index, coefficient)` of column `k`.
    pub fn column(&self, k: usize) -> &[(usize, f64)] {
        &self.columns[k]
    }

    /// Index of the orbit (in [`FockBasis::orbits`]) carrying column `k`.
    pub fn orbit_of_column(&self, k: usize) -> usize {
        self.orbits[k]
    }

    /// Dense `full_dim x len` isometry `B`.
    pub fn to_dense(&self) -> Mat {
        let mut b = Mat::zeros(self.full_dim, self.len());
        for (k, col) in self.columns.iter().enumerate() {
            for &(i, c) in col {
                b[(i, k)] = c;
            }
        }
        b
    }

    /// `Bᵀ M B` for a `full_dim`-square matrix `M`.
    pub fn project(&self, m: &Mat) -> Mat {
        assert_eq!(m.nrows(), self.full_dim);
        let r = self.len();
        // MB, column by column
        let mut mb = Mat::zeros(self.full_dim, r);
        for (k, col) in self.columns.iter().enumerate() {
            let mut dst = mb.column_mut(k);
            for &(i, c) in col {
                dst.axpy(c, &m.column(i), 1.0);
            }
        }
        let mut out = Mat::zeros(r, r);
        for (k, col) in self.columns.iter().enumerate() {
            for l in 0..r {
                out[(k, l)] = col.iter().map(|&(i, c)| c * mb[(i, l)]).sum();
            }
        }
        out
    }

    /// `Bᵀ diag(d) B`.
    pub fn project_diagonal(&self, d: &[f64]) -> Mat {
        let r = self.len();
        let mut out = Mat::zeros(r, r);
        for k in 0..r {
            for l in 0..r {
                // columns on different orbits have disjoint support
                if self.orbits[k] != self.orbits[l] {
                    continue;
                }
                let mut s = 0.0;
                for &(i, a) in &self.columns[k] {
                    if let Some(&(_, b)) = self.columns[l].iter().find(|(j, _)| *j == i) {
                        s += a * d[i] * b;
                    }
                }
                out[(k, l)] = s;
            }
        }
        out
    }

    /// Sector coordinates `Bᵀ v` of a full-space vector.
    pub fn restrict(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.columns
                .iter()
                .map(|col| col.iter().map(|&(i, c)| c * v[i]).sum::<f64>()),
        )
    }

    /// Full-space vector `B c` from sector coordinates.
    pub fn embed(&self, coords: &DVector<f64>) -> DVector<f64> {
        let mut v = DVector::zeros(self.full_dim);
        for (col, &a) in self.columns.iter().zip(coords.iter()) {
            for &(i, c) in col {
                v[i] += a * c;
            }
        }
        v
    }

    /// Embeds every column of `coords` (sector-basis coefficients).
    pub fn embed_columns(&self, coords: &Mat) -> Mat {
        let mut out = Mat::zeros(self.full_dim, coords.ncols());
        for j in 0..coords.ncols() {
            let v = self.embed(&coords.column(j).into_owned());
            out.set_column(j, &v);
        }
        out
    }

    fn filtered(&self, keep: impl Fn(usize) -> bool) -> SectorBasis {
        let mut columns = Vec::new();
        let mut orbits = Vec::new();
        for k in 0..self.len() {
            if keep(k) {
                columns.push(self.columns[k].clone());
                orbits.push(self.orbits[k]);
            }
        }
        SectorBasis {
            full_dim: self.full_dim,
            columns,
            orbits,
        }
    }
}

/// Central idempotent `P_λ = (d_λ / N!) Σ_g χ_λ(g) U(g)` on a product basis.
#[derive(Debug, Clone)]
pub struct SectorProjector {
    partition: Partition,
    matrix: Mat,
    basis: SectorBasis,
    orbit_ranks: Vec<usize>,
}

impl SectorProjector {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    /// Dimension of the isotypic component.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    /// Rank of `P_λ` restricted to each orbit, in [`FockBasis::orbits`] order.
    pub fn orbit_ranks(&self) -> &[usize] {
        &self.orbit_ranks
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

pub fn sector_projector(partition: &Partition, fock: &FockBasis) -> Result<SectorProjector> {
    let n = fock.n_particles();
    partition.check_degree(n)?;
    check_supported(n)?;
    let table = character_table(n)?;
    let d_lambda = partition.dimension() as f64;
    let group_order = factorial(n) as f64;
    let weighted: Vec<_> = all_permutations(n)
        .into_iter()
        .filter_map(|g| {
            let chi = table.value(partition, &g.cycle_type()).ok()?;
            (chi != 0).then(|| (g, d_lambda * chi as f64 / group_order))
        })
        .collect();

    let dim = fock.len();
    let mut matrix = Mat::zeros(dim, dim);
    let mut columns = Vec::new();
    let mut orbits = Vec::new();
    let mut orbit_ranks = Vec::with_capacity(fock.orbits().len());
    for (o, orbit) in fock.orbits().iter().enumerate() {
        let members = &orbit.members;
        let k = members.len();
        let mut local = Mat::zeros(k, k);
        for (col, &i) in members.iter().enumerate() {
            let state = &fock.states()[i];
            for (g, w) in &weighted {
                let j = fock
                    .index_of(&g.act(state))
                    .expect("basis is closed under permutations");
                let row = members.iter().position(|&m| m == j).expect("image stays in orbit");
                local[(row, col)] += w;
            }
        }
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                matrix[(i, j)] = local[(a, b)];
            }
        }
        let q = pivoted_orthonormal_columns(&local, PROJECTOR_RANK_TOL);
        orbit_ranks.push(q.ncols());
        for c in 0..q.ncols() {
            let entries: Vec<(usize, f64)> = members
                .iter()
                .enumerate()
                .filter_map(|(a, &i)| {
                    let v = q[(a, c)];
                    (v != 0.0).then_some((i, v))
                })
                .collect();
            columns.push(entries);
            orbits.push(o);
        }
    }
    Ok(SectorProjector {
        partition: partition.clone(),
        matrix,
        basis: SectorBasis {
            full_dim: dim,
            columns,
            orbits,
        },
        orbit_ranks,
    })
}

/// Reflection `x -> -x` (about the trap centre) applied to every particle:
/// diagonal in the product basis with entries `Π_i (-1)^{n_i}`.
pub fn reflection_operator(fock: &FockBasis) -> Result<Mat> {
    require_symmetric(fock)?;
    Ok(Mat::from_diagonal(&DVector::from_iterator(
        fock.len(),
        fock.states().iter().map(|s| state_parity(s) as f64),
    )))
}

fn state_parity(modes: &[usize]) -> i8 {
    if modes.iter().sum::<usize>() % 2 == 0 {
        1
    } else {
        -1
    }
}

fn require_symmetric(fock: &FockBasis) -> Result<()> {
    if !fock.single_particle().trap().is_reflection_symmetric() {
        return Err(Error::UnsupportedTrap(
            "parity refinement needs a reflection-symmetric trap".into(),
        ));
    }
    Ok(())
}

/// Sector basis split by total parity.
#[derive(Debug, Clone)]
pub struct ParitySectors {
    pub even: SectorBasis,
    pub odd: SectorBasis,
}

/// Refines an isotypic sector by reflection parity. Each orbit has a fixed
/// mode sum, so every sector basis column already has definite parity.
pub fn parity_split(projector: &SectorProjector, fock: &FockBasis) -> Result<ParitySectors> {
    require_symmetric(fock)?;
    if projector.basis.full_dim != fock.len() {
        return Err(Error::Mismatch("projector built on a different basis".into()));
    }
    let parity = |k: usize| {
        let orbit = &fock.orbits()[projector.basis.orbit_of_column(k)];
        state_parity(&orbit.key)
    };
    Ok(ParitySectors {
        even: projector.basis.filtered(|k| parity(k) == 1),
        odd: projector.basis.filtered(|k| parity(k) == -1),
    })
}
