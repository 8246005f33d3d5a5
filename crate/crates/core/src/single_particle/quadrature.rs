//! Gauss-type quadrature rules matched to each trap domain.

use super::{TrapKind, TrapPotential};
use crate::error::{Error, Result};
use crate::linalg::SymTridiagonal;

/// Nodes and weights approximating `∫ f(x) dx ≈ Σ w_k f(x_k)` over the trap
/// domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Quadrature rule of the given order for a trap.
///
/// * harmonic: Gauss-Hermite, scaled so that products of four oscillator
///   modes are integrated exactly once `order >= 2 * cutoff - 1`;
/// * infinite well: Gauss-Legendre on `[0, L]`;
/// * custom: trapezoid rule on a uniform grid with `order` interior points
///   plus the two (Dirichlet) endpoints.
pub fn quadrature_rule(trap: &TrapPotential, order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be >= 1".into()));
    }
    trap.validate()?;
    Ok(match &trap.kind {
        TrapKind::Harmonic { omega } => {
            let (u, w) = gauss_hermite_scaled(order);
            let s = (2.0 * trap.mass * omega).sqrt();
            QuadratureRule {
                nodes: u.iter().map(|u| u / s).collect(),
                weights: w.iter().map(|w| w / s).collect(),
            }
        }
        TrapKind::InfiniteWell { length } => {
            let (x, w) = gauss_legendre(order);
            QuadratureRule {
                nodes: x.iter().map(|x| 0.5 * length * (x + 1.0)).collect(),
                weights: w.iter().map(|w| 0.5 * length * w).collect(),
            }
        }
        TrapKind::Custom(pot) => {
            let (lo, hi) = pot.bounds();
            let h = (hi - lo) / (order + 1) as f64;
            let nodes: Vec<f64> = (0..order + 2).map(|i| lo + h * i as f64).collect();
            let mut weights = vec![h; order + 2];
            weights[0] = 0.5 * h;
            weights[order + 1] = 0.5 * h;
            QuadratureRule { nodes, weights }
        }
    })
}

/// Smallest order for which the rule is exact (or, for custom traps,
/// resolved) for products of four modes below `cutoff`.
pub(crate) fn minimum_order(kind: &TrapKind, cutoff: usize) -> usize {
    match kind {
        TrapKind::Harmonic { .. } => 2 * cutoff - 1,
        TrapKind::InfiniteWell { .. } => 2 * cutoff + 1,
        TrapKind::Custom(_) => 4 * cutoff,
    }
}

/// Default order, with headroom for two-mode products (orthonormality) in the
/// scaled Hermite rule.
pub(crate) fn default_order(kind: &TrapKind, cutoff: usize) -> usize {
    match kind {
        TrapKind::Harmonic { .. } => 4 * cutoff + 20,
        TrapKind::InfiniteWell { .. } => 4 * cutoff + 40,
        TrapKind::Custom(_) => (400 * cutoff).max(4000),
    }
}

/// Normalized Hermite functions `ψ_0 .. ψ_{count-1}` at `u`.
pub(crate) fn hermite_functions(u: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(std::f64::consts::PI.powf(-0.25) * (-0.5 * u * u).exp());
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * u * out[0]);
    }
    for k in 2..count {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * u * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(next);
    }
    out
}

/// Gauss-Hermite nodes with weights already multiplied by `exp(u^2)`, so
/// that `∫ f(u) du ≈ Σ w_k f(u_k)` for Gaussian-decaying `f`.
///
/// Nodes come from bisection on the Jacobi matrix followed by Newton polish;
/// weights use `1 / (K ψ_{K-1}(u_k)^2)` which stays well scaled in the tails.
fn gauss_hermite_scaled(order: usize) -> (Vec<f64>, Vec<f64>) {
    let off: Vec<f64> = (1..order).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let jacobi = SymTridiagonal::new(vec![0.0; order], off);
    let mut nodes = jacobi.lowest_eigenvalues(order);
    let kf = order as f64;
    for u in nodes.iter_mut() {
        for _ in 0..3 {
            let psi = hermite_functions(*u, order + 1);
            // ψ_K' = sqrt(2K) ψ_{K-1} - u ψ_K
            let deriv = (2.0 * kf).sqrt() * psi[order - 1] - *u * psi[order];
            if deriv == 0.0 {
                break;
            }
            let step = psi[order] / deriv;
            *u -= step;
            if step.abs() < 1e-16 * (1.0 + u.abs()) {
                break;
            }
        }
    }
    // Symmetrize to remove roundoff asymmetry.
    for i in 0..order / 2 {
        let m = 0.5 * (nodes[order - 1 - i] - nodes[i]);
        nodes[i] = -m;
        nodes[order - 1 - i] = m;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&u| {
            let psi = hermite_functions(u, order);
            1.0 / (kf * psi[order - 1] * psi[order - 1])
        })
        .collect();
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        // exact for degree <= 13
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((approx - 2.0 / 13.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hermite_rule_integrates_gaussian_moments() {
        let (u, w) = gauss_hermite_scaled(30);
        // ∫ u^4 e^{-u^2} du = 3 sqrt(pi) / 4
        let approx: f64 = u.iter().zip(&w).map(|(u, w)| w * u.powi(4) * (-u * u).exp()).sum();
        assert!((approx - 0.75 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn high_order_hermite_weights_are_finite() {
        let (u, w) = gauss_hermite_scaled(240);
        assert!(w.iter().all(|w| w.is_finite() && *w > 0.0));
        assert!(u.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn zero_order_is_rejected() {
        let trap = TrapPotential::harmonic(1.0);
        assert!(matches!(quadrature_rule(&trap, 0), Err(Error::InvalidArgument(_))));
    }
}
