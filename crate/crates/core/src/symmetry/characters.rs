use std::io::Write;

use super::{check_supported, factorial, partitions_unchecked, Partition};
use crate::error::{Error, Result};

/// Irreducible characters of `S_N`, rows indexed by irrep partitions and
/// columns by conjugacy classes (cycle types). Both orderings follow
/// [`super::partitions`].
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    degree: usize,
    irreps: Vec<Partition>,
    classes: Vec<Partition>,
    class_sizes: Vec<u64>,
    values: Vec<Vec<i64>>,
}

/// Builds the character table with the Murnaghan-Nakayama rule.
pub fn character_table(n: usize) -> Result<CharacterTable> {
    check_supported(n)?;
    let parts = partitions_unchecked(n);
    let class_sizes = parts
        .iter()
        .map(|rho| factorial(n) / centralizer_order(rho))
        .collect();
    let values = parts
        .iter()
        .map(|lambda| {
            parts
                .iter()
                .map(|rho| murnaghan_nakayama(lambda.parts(), rho.parts()))
                .collect()
        })
        .collect();
    Ok(CharacterTable {
        degree: n,
        irreps: parts.clone(),
        classes: parts,
        class_sizes,
        values,
    })
}

/// `z_ρ = Π_i i^{m_i} m_i!`
fn centralizer_order(rho: &Partition) -> u64 {
    let mut z = 1u64;
    let mut i = 0;
    let p = rho.parts();
    while i < p.len() {
        let len = p[i];
        let mult = p[i..].iter().take_while(|&&q| q == len).count();
        z *= (len as u64).pow(mult as u32) * factorial(mult);
        i += mult;
    }
    z
}

/// `χ_λ(ρ)` by recursive removal of rim hooks, using beta-sets: removing a
/// hook of length `r` replaces a bead `β` by `β - r` (when free) with sign
/// `(-1)^{beads strictly between}`.
fn murnaghan_nakayama(lambda: &[usize], rho: &[usize]) -> i64 {
    let Some((&r, rest)) = rho.split_first() else {
        return if lambda.is_empty() { 1 } else { 0 };
    };
    let len = lambda.len();
    let beta: Vec<usize> = lambda
        .iter()
        .enumerate()
        .map(|(i, &part)| part + len - 1 - i)
        .collect();
    let mut total = 0;
    for (k, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let between = beta.iter().filter(|&&c| c > target && c < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut moved = beta.clone();
        moved[k] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let reduced: Vec<usize> = moved
            .iter()
            .enumerate()
            .map(|(i, &c)| c - (len - 1 - i))
            .filter(|&p| p > 0)
            .collect();
        total += sign * murnaghan_nakayama(&reduced, rest);
    }
    total
}

impl CharacterTable {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn irreps(&self) -> &[Partition] {
        &self.irreps
    }

    pub fn classes(&self) -> &[Partition] {
        &self.classes
    }

    pub fn class_sizes(&self) -> &[u64] {
        &self.class_sizes
    }

    fn irrep_index(&self, lambda: &Partition) -> Result<usize> {
        self.irreps
            .iter()
            .position(|p| p == lambda)
            .ok_or_else(|| Error::Mismatch(format!("{lambda} is not an irrep of S_{}", self.degree)))
    }

    fn class_index(&self, rho: &Partition) -> Result<usize> {
        self.classes
            .iter()
            .position(|p| p == rho)
            .ok_or_else(|| Error::Mismatch(format!("{rho} is not a cycle type of S_{}", self.degree)))
    }

    pub fn value(&self, lambda: &Partition, cycle_type: &Partition) -> Result<i64> {
        Ok(self.values[self.irrep_index(lambda)?][self.class_index(cycle_type)?])
    }

    pub fn row(&self, lambda: &Partition) -> Result<&[i64]> {
        Ok(&self.values[self.irrep_index(lambda)?])
    }

    /// `Σ_classes |C| χ_λ(C) χ_μ(C)`, which equals `N! δ_λμ`.
    pub fn inner_product(&self, a: usize, b: usize) -> i64 {
        self.class_sizes
            .iter()
            .zip(self.values[a].iter().zip(&self.values[b]))
            .map(|(&s, (&x, &y))| s as i64 * x * y)
            .sum()
    }

    /// CSV with one row per irrep and one column per cycle type.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        write!(out, "irrep")?;
        for c in &self.classes {
            write!(out, ",\"{c}\"")?;
        }
        writeln!(out)?;
        for (lambda, row) in self.irreps.iter().zip(&self.values) {
            write!(out, "\"{lambda}\"")?;
            for v in row {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
