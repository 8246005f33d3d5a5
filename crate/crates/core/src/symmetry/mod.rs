//! Symmetric group `S_N`: partitions, characters, coordinate permutations
//! and isotypic projectors onto irrep sectors of the product basis.

mod characters;
mod permutation;
mod projector;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use characters::{character_table, CharacterTable};
pub use permutation::{all_permutations, permutation_matrix, Permutation};
pub use projector::{
    parity_split, reflection_operator, sector_projector, ParitySectors, SectorBasis,
    SectorProjector, PROJECTOR_RANK_TOL,
};

use crate::error::{Error, Result};

/// Largest particle number for which group tables are built.
pub const MAX_DEGREE: usize = 8;

/// Integer partition `λ = (λ_1 >= λ_2 >= ... > 0)` of `N`, labelling an
/// irrep of `S_N`. `[N]` is the bosonic sector and `[1^N]` the fermionic one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("partition has no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "partition {parts:?} has a zero part"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "partition {parts:?} is not non-increasing"
            )));
        }
        Ok(Self(parts))
    }

    /// `[N]`
    pub fn symmetric(n: usize) -> Self {
        Self(vec![n])
    }

    /// `[1^N]`
    pub fn antisymmetric(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// The `N` this partitions.
    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.0.len() == 1
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.0.iter().all(|&p| p == 1)
    }

    /// Irrep dimension from the hook length formula.
    pub fn dimension(&self) -> u64 {
        let n = self.degree();
        let mut hooks: u64 = 1;
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row {
                let arm = row - j - 1;
                let leg = self.0[i + 1..].iter().filter(|&&r| r > j).count();
                hooks *= (arm + leg + 1) as u64;
            }
        }
        factorial(n) / hooks
    }

    /// Conjugate (transposed Young diagram).
    pub fn conjugate(&self) -> Self {
        let cols = self.0[0];
        Self((0..cols).map(|j| self.0.iter().filter(|&&r| r > j).count()).collect())
    }

    /// Validates that this partition labels an irrep of `S_n`.
    pub fn check_degree(&self, n: usize) -> Result<()> {
        let d = self.degree();
        if d != n {
            return Err(Error::Mismatch(format!(
                "partition sums to {d}, expected {n}: {self}"
            )));
        }
        Ok(())
    }

    /// Parses `"[2,1]"`, `"2,1"` or `"2 1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
        let parts = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("partition {text:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub(crate) fn check_supported(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::UnsupportedSize {
            what: "particle number",
            value: n,
            max: MAX_DEGREE,
        });
    }
    Ok(())
}

/// All partitions of `n` in reverse lexicographic order: `[n]` first,
/// `[1^n]` last.
pub fn partitions(n: usize) -> Result<Vec<Partition>> {
    check_supported(n)?;
    Ok(partitions_unchecked(n))
}

pub(crate) fn partitions_unchecked(n: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests;
