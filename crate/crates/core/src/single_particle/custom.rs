//! Sampled potentials and the finite-difference grid solver.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SymTridiagonal;

/// Potential samples `(x_i, V(x_i))` with strictly increasing abscissae.
/// The first and last abscissae bound the domain; hard walls sit there.
/// Between samples `V` is interpolated linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomPotential {
    x: Vec<f64>,
    v: Vec<f64>,
}

impl CustomPotential {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() != v.len() {
            return Err(Error::InvalidArgument(format!(
                "{} abscissae but {} potential values",
                x.len(),
                v.len()
            )));
        }
        if x.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "custom potential needs at least 3 samples, got {}",
                x.len()
            )));
        }
        if let Some(i) = x.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(format!(
                "abscissae must be strictly increasing (x[{}] = {}, x[{}] = {})",
                i,
                x[i],
                i + 1,
                x[i + 1]
            )));
        }
        if let Some(i) = x.iter().chain(&v).position(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite sample at position {i}")));
        }
        Ok(Self { x, v })
    }

    /// Samples `f` on `points` uniformly spaced abscissae spanning `[lo, hi]`.
    pub fn from_fn(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Result<Self> {
        if points < 3 || !(hi > lo) {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 points on a non-empty interval, got {points} on [{lo}, {hi}]"
            )));
        }
        let h = (hi - lo) / (points - 1) as f64;
        let x: Vec<f64> = (0..points).map(|i| lo + h * i as f64).collect();
        let v = x.iter().map(|&x| f(x)).collect();
        Self::new(x, v)
    }

    /// Parses two whitespace-separated columns `x V(x)`. Text after `#` is a
    /// comment; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut x = Vec::new();
        let mut v = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected 2 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {s:?}: {e}", lineno + 1)))
            };
            x.push(parse(cols[0])?);
            v.push(parse(cols[1])?);
        }
        Self::new(x, v)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.iter().copied().zip(self.v.iter().copied())
    }

    /// Linear interpolation of the samples; clamps outside the domain.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.v[0];
        }
        if x >= self.x[n - 1] {
            return self.v[n - 1];
        }
        let i = self.x.partition_point(|&xi| xi <= x) - 1;
        let t = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        self.v[i] * (1.0 - t) + self.v[i + 1] * t
    }

    /// `V(lo + hi - x) == V(x)` at every sample, within `rel_tol` of the
    /// potential's range.
    pub fn is_reflection_symmetric(&self, rel_tol: f64) -> bool {
        let (lo, hi) = self.bounds();
        let vmax = self.v.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1.0);
        let width = hi - lo;
        self.samples().all(|(x, v)| {
            let mirrored = lo + hi - x;
            // Abscissae must mirror as well, otherwise the interpolant is not symmetric.
            let j = self.x.partition_point(|&xi| xi < mirrored - 1e-12 * width);
            j < self.x.len()
                && (self.x[j] - mirrored).abs() <= 1e-9 * width
                && (self.v[j] - v).abs() <= rel_tol * vmax
        })
    }
}

/// Lowest `cutoff` eigenpairs of `-1/(2m) d²/dx² + V` with second-order
/// central differences on `interior` uniformly spaced interior points and
/// Dirichlet walls at the domain bounds.
///
/// Returns energies and, per mode, amplitudes on the full grid (walls
/// included) normalized so that `h Σ φ² = 1`.
pub(super) fn solve_grid(
    pot: &CustomPotential,
    mass: f64,
    interior: usize,
    cutoff: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if interior < cutoff {
        return Err(Error::Resolution {
            mode: Some(interior),
            reason: format!("{interior} grid points cannot hold {cutoff} modes"),
        });
    }
    let (lo, hi) = pot.bounds();
    let h = (hi - lo) / (interior + 1) as f64;
    let kinetic = 1.0 / (2.0 * mass * h * h);
    let diag: Vec<f64> = (1..=interior)
        .map(|i| 2.0 * kinetic + pot.eval(lo + h * i as f64))
        .collect();
    let off = vec![-kinetic; interior - 1];
    let op = SymTridiagonal::new(diag, off);

    let energies = op.lowest_eigenvalues(cutoff);
    let mut vectors = Vec::with_capacity(cutoff);
    let mut values = Vec::with_capacity(cutoff);
    for &e in &energies {
        let mut v = op.eigenvector(e, &vectors);
        // Sign convention: first significant amplitude (from the left) positive.
        let peak = v.amax();
        if let Some(first) = v.iter().find(|a| a.abs() > 1e-8 * peak) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        let scale = 1.0 / h.sqrt();
        let mut full = Vec::with_capacity(interior + 2);
        full.push(0.0);
        full.extend(v.iter().map(|a| a * scale));
        full.push(0.0);
        values.push(full);
        vectors.push(v);
    }
    Ok((energies, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_skips_comments_and_blank_lines() {
        let text = "# header\n-1 1\n\n0 0 # centre\n1 1\n";
        let pot = CustomPotential::parse(text).unwrap();
        assert_eq!(pot.bounds(), (-1.0, 1.0));
        assert!((pot.eval(0.5) - 0.5).abs() < 1e-15);
        assert!(pot.is_reflection_symmetric(1e-12));
    }

    #[test]
    fn parse_rejects_ragged_rows() {
        let err = CustomPotential::parse("0 1\n1 2 3\n2 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("line 2")));
    }

    #[test]
    fn non_increasing_abscissae_are_rejected() {
        let err = CustomPotential::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        assert!(CustomPotential::new(vec![0.0, 1.0], vec![0.0; 2]).is_err());
    }

    #[test]
    fn asymmetric_potential_is_detected() {
        let pot = CustomPotential::from_fn(|x| x * x * x, -1.0, 1.0, 11).unwrap();
        assert!(!pot.is_reflection_symmetric(1e-9));
    }
}
