use std::sync::Arc;

use serde::Serialize;

use super::eigensolve_block;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::manybody::{FockBasis, HamiltonianMatrix, SectorHamiltonian};
use crate::symmetry::{sector_projector, Partition};

/// Two overlaps closer than this make a tracking decision ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-6;

/// One level followed across the coupling grid.
#[derive(Debug, Clone, Serialize)]
pub struct Track {
    pub energies: Vec<f64>,
    /// Hellmann-Feynman slope `<v|V|v>` at each grid point.
    pub slopes: Vec<f64>,
}

/// A tracking step where the best and second-best eigenvector overlaps of a
/// track differed by less than [`AMBIGUITY_TOL`].
#[derive(Debug, Clone, Serialize)]
pub struct AmbiguityFlag {
    pub grid_index: usize,
    pub track: usize,
    pub best: f64,
    pub runner_up: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub sector: Partition,
    pub g_grid: Vec<f64>,
    pub tracks: Vec<Track>,
    pub flags: Vec<AmbiguityFlag>,
}

impl SweepResult {
    /// Sorted spectrum at grid point `k`.
    pub fn spectrum_at(&self, k: usize) -> Vec<f64> {
        let mut e: Vec<f64> = self.tracks.iter().map(|t| t.energies[k]).collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Levels of one sector across `g_grid`, linked between neighbouring grid
/// points by greedy maximal eigenvector overlap.
pub fn sweep_levels(
    fock: &Arc<FockBasis>,
    partition: &Partition,
    g_grid: &[f64],
) -> Result<SweepResult> {
    let h = HamiltonianMatrix::new(fock.clone(), 0.0)?;
    let projector = sector_projector(partition, fock)?;
    let sector = SectorHamiltonian::new(&h, projector.basis())?;
    sweep_sector(&sector, partition, g_grid)
}

pub fn sweep_sector(
    sector: &SectorHamiltonian,
    partition: &Partition,
    g_grid: &[f64],
) -> Result<SweepResult> {
    if g_grid.is_empty() {
        return Err(Error::InvalidArgument("empty coupling grid".into()));
    }
    if let Some(w) = g_grid.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "coupling grid must be strictly ascending ({} then {})",
            w[0], w[1]
        )));
    }
    let r = sector.dim();
    let mut tracks: Vec<Track> = (0..r)
        .map(|_| Track {
            energies: Vec::with_capacity(g_grid.len()),
            slopes: Vec::with_capacity(g_grid.len()),
        })
        .collect();
    let mut flags = Vec::new();
    // Eigenvector currently carried by each track.
    let mut previous: Option<Mat> = None;

    for (k, &g) in g_grid.iter().enumerate() {
        let eig = eigensolve_block(&sector.at(g))?;
        let slopes: Vec<f64> = (0..r)
            .map(|j| {
                let v = eig.vectors.column(j);
                v.dot(&(sector.vint() * v))
            })
            .collect();
        let assignment: Vec<usize> = match &previous {
            None => (0..r).collect(),
            Some(prev) => {
                let overlaps = (prev.transpose() * &eig.vectors).abs();
                match_tracks(&overlaps, k, &mut flags)
            }
        };
        let mut carried = Mat::zeros(r, r);
        for (t, &j) in assignment.iter().enumerate() {
            tracks[t].energies.push(eig.values[j]);
            tracks[t].slopes.push(slopes[j]);
            carried.set_column(t, &eig.vectors.column(j));
        }
        previous = Some(carried);
    }
    Ok(SweepResult {
        sector: partition.clone(),
        g_grid: g_grid.to_vec(),
        tracks,
        flags,
    })
}

/// Greedy assignment: repeatedly link the (track, eigenvector) pair with the
/// largest remaining overlap. Returns, per track, the new eigenvector index.
fn match_tracks(overlaps: &Mat, grid_index: usize, flags: &mut Vec<AmbiguityFlag>) -> Vec<usize> {
    let r = overlaps.nrows();
    for t in 0..r {
        let mut row: Vec<f64> = overlaps.row(t).iter().copied().collect();
        row.sort_by(|a, b| b.total_cmp(a));
        if r > 1 && row[0] - row[1] < AMBIGUITY_TOL {
            flags.push(AmbiguityFlag {
                grid_index,
                track: t,
                best: row[0],
                runner_up: row[1],
            });
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..r).flat_map(|t| (0..r).map(move |j| (t, j))).collect();
    pairs.sort_by(|&(t1, j1), &(t2, j2)| {
        overlaps[(t2, j2)]
            .total_cmp(&overlaps[(t1, j1)])
            .then((t1, j1).cmp(&(t2, j2)))
    });
    let mut assignment = vec![usize::MAX; r];
    let mut taken = vec![false; r];
    let mut left = r;
    for (t, j) in pairs {
        if left == 0 {
            break;
        }
        if assignment[t] == usize::MAX && !taken[j] {
            assignment[t] = j;
            taken[j] = true;
            left -= 1;
        }
    }
    assignment
}
