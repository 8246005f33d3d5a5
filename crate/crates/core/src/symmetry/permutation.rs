use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::manybody::FockBasis;

use super::Partition;

/// Permutation of particle labels `0..N`, stored as the image of each label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!(
                    "{images:?} is not a permutation"
                )));
            }
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// Cycle lengths sorted in non-increasing order.
    pub fn cycle_type(&self) -> Partition {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Partition(lengths)
    }

    /// Moves the mode of particle `i` to slot `self(i)`:
    /// `(g·n)_{g(i)} = n_i`. This is a left action, `g·(h·n) = (gh)·n`.
    pub fn act(&self, modes: &[usize]) -> Vec<usize> {
        let mut out = vec![0; modes.len()];
        for (i, &m) in modes.iter().enumerate() {
            out[self.0[i]] = m;
        }
        out
    }
}

/// All `n!` permutations in lexicographic order of their image vectors.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![Permutation(current.clone())];
    // next lexicographic permutation
    while let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) {
        let pivot = i - 1;
        let j = (i..n).rev().find(|&j| current[j] > current[pivot]).unwrap();
        current.swap(pivot, j);
        current[i..].reverse();
        out.push(Permutation(current.clone()));
    }
    out
}

/// Matrix of `U(g)` on the product basis: `U(g)|n> = |g·n>`.
pub fn permutation_matrix(perm: &Permutation, fock: &FockBasis) -> Result<Mat> {
    if perm.degree() != fock.n_particles() {
        return Err(Error::Mismatch(format!(
            "permutation of {} labels applied to a {}-particle basis",
            perm.degree(),
            fock.n_particles()
        )));
    }
    let d = fock.len();
    let mut u = Mat::zeros(d, d);
    for (i, state) in fock.states().iter().enumerate() {
        let j = fock
            .index_of(&perm.act(state))
            .expect("basis is closed under permutations");
        u[(j, i)] = 1.0;
    }
    Ok(u)
}
