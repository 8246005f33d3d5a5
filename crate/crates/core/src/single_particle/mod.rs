//! One-body trap problem `h = p^2/2m + V(x)`.
//!
//! Harmonic and infinite-well traps use closed forms; arbitrary sampled
//! potentials are solved on a finite-difference grid with Dirichlet walls.
//! Every basis carries a quadrature rule under which its modes are
//! orthonormal, and which the many-body code reuses for contact integrals.

mod custom;
mod quadrature;

use std::f64::consts::PI;

use nalgebra::DVector;

pub use custom::CustomPotential;
pub use quadrature::{quadrature_rule, QuadratureRule};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Amplitudes below this fraction of the mode's largest sampled amplitude
/// are treated as zero when counting sign changes.
pub const NODE_ZERO_THRESHOLD: f64 = 1e-8;

/// Orthonormality tolerance enforced by [`solve_trap`].
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Minimum number of grid points required inside every lobe of a
/// grid-resolved mode.
const MIN_POINTS_PER_LOBE: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum TrapKind {
    Harmonic { omega: f64 },
    InfiniteWell { length: f64 },
    Custom(CustomPotential),
}

impl TrapKind {
    pub fn name(&self) -> &'static str {
        match self {
            TrapKind::Harmonic { .. } => "harmonic",
            TrapKind::InfiniteWell { .. } => "infinite_well",
            TrapKind::Custom(_) => "custom",
        }
    }
}

/// External potential `V(x)` together with the particle mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapPotential {
    pub kind: TrapKind,
    pub mass: f64,
}

impl TrapPotential {
    pub fn harmonic(omega: f64) -> Self {
        Self {
            kind: TrapKind::Harmonic { omega },
            mass: 1.0,
        }
    }

    pub fn infinite_well(length: f64) -> Self {
        Self {
            kind: TrapKind::InfiniteWell { length },
            mass: 1.0,
        }
    }

    pub fn custom(potential: CustomPotential) -> Self {
        Self {
            kind: TrapKind::Custom(potential),
            mass: 1.0,
        }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {}", self.mass)));
        }
        match &self.kind {
            TrapKind::Harmonic { omega } if !(*omega > 0.0 && omega.is_finite()) => {
                Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")))
            }
            TrapKind::InfiniteWell { length } if !(*length > 0.0 && length.is_finite()) => {
                Err(Error::InvalidArgument(format!("well length must be positive, got {length}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether `V` is symmetric under reflection about the domain centre.
    pub fn is_reflection_symmetric(&self) -> bool {
        match &self.kind {
            TrapKind::Harmonic { .. } | TrapKind::InfiniteWell { .. } => true,
            TrapKind::Custom(pot) => pot.is_reflection_symmetric(1e-9),
        }
    }

    /// Harmonic frequency, if this is a harmonic trap.
    pub fn omega(&self) -> Option<f64> {
        match self.kind {
            TrapKind::Harmonic { omega } => Some(omega),
            _ => None,
        }
    }
}

/// Knobs for [`solve_trap_with`]. `None` picks a default sized to the cutoff.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Quadrature order; for custom traps this is the number of interior
    /// grid points of the finite-difference discretization.
    pub order: Option<usize>,
}

#[derive(Debug, Clone)]
enum ModeRepr {
    Harmonic { scale: f64 },
    Well { length: f64 },
    /// Mode amplitudes on the uniform grid, endpoints included.
    Grid { lo: f64, h: f64, values: Vec<Vec<f64>> },
}

/// Truncated eigenbasis of a one-dimensional trap.
#[derive(Debug, Clone)]
pub struct SingleParticleBasis {
    trap: TrapPotential,
    energies: Vec<f64>,
    quadrature: QuadratureRule,
    /// `cutoff x nodes` table of mode amplitudes at the quadrature nodes.
    at_nodes: Mat,
    repr: ModeRepr,
}

/// Solve the trap with default numerical settings.
pub fn solve_trap(trap: &TrapPotential, cutoff: usize) -> Result<SingleParticleBasis> {
    solve_trap_with(trap, cutoff, &SolveOptions::default())
}

pub fn solve_trap_with(
    trap: &TrapPotential,
    cutoff: usize,
    options: &SolveOptions,
) -> Result<SingleParticleBasis> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be >= 1".into()));
    }
    trap.validate()?;
    let order = options
        .order
        .unwrap_or_else(|| quadrature::default_order(&trap.kind, cutoff));
    let min_order = quadrature::minimum_order(&trap.kind, cutoff);
    if order < min_order {
        return Err(Error::Resolution {
            mode: None,
            reason: format!(
                "quadrature order {order} is below the minimum {min_order} for cutoff {cutoff}"
            ),
        });
    }
    let quadrature = quadrature_rule(trap, order)?;
    let m = trap.mass;

    let (energies, repr) = match &trap.kind {
        TrapKind::Harmonic { omega } => {
            let energies = (0..cutoff).map(|n| omega * (n as f64 + 0.5)).collect();
            (energies, ModeRepr::Harmonic { scale: (m * omega).sqrt() })
        }
        TrapKind::InfiniteWell { length } => {
            let energies = (0..cutoff)
                .map(|n| {
                    let k = (n + 1) as f64 * PI / length;
                    k * k / (2.0 * m)
                })
                .collect();
            (energies, ModeRepr::Well { length: *length })
        }
        TrapKind::Custom(pot) => {
            let (energies, values) = custom::solve_grid(pot, m, order, cutoff)?;
            let (lo, hi) = pot.bounds();
            let h = (hi - lo) / (order + 1) as f64;
            (energies, ModeRepr::Grid { lo, h, values })
        }
    };

    let mut basis = SingleParticleBasis {
        trap: trap.clone(),
        energies,
        quadrature,
        at_nodes: Mat::zeros(0, 0),
        repr,
    };
    basis.at_nodes = basis.tabulate(&basis.quadrature.nodes);
    basis.check_nodes()?;
    basis.check_orthonormality()?;
    Ok(basis)
}

impl SingleParticleBasis {
    pub fn trap(&self) -> &TrapPotential {
        &self.trap
    }

    pub fn cutoff(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quadrature
    }

    /// Mode amplitudes at the quadrature nodes, one row per mode.
    pub fn amplitudes_at_nodes(&self) -> &Mat {
        &self.at_nodes
    }

    /// Amplitude of mode `n` at position `x` (zero outside the domain).
    pub fn evaluate(&self, n: usize, x: f64) -> f64 {
        assert!(n < self.cutoff(), "mode {n} beyond cutoff {}", self.cutoff());
        self.evaluate_all(x)[n]
    }

    /// Amplitudes of all retained modes at `x`.
    pub fn evaluate_all(&self, x: f64) -> Vec<f64> {
        let cutoff = self.cutoff();
        match &self.repr {
            ModeRepr::Harmonic { scale } => quadrature::hermite_functions(scale * x, cutoff)
                .into_iter()
                .map(|v| v * scale.sqrt())
                .collect(),
            ModeRepr::Well { length } => {
                if x <= 0.0 || x >= *length {
                    return vec![0.0; cutoff];
                }
                let norm = (2.0 / length).sqrt();
                (0..cutoff)
                    .map(|n| norm * ((n + 1) as f64 * PI * x / length).sin())
                    .collect()
            }
            ModeRepr::Grid { lo, h, values } => {
                let points = values[0].len();
                let t = (x - lo) / h;
                if t <= 0.0 || t >= (points - 1) as f64 {
                    return vec![0.0; cutoff];
                }
                let i = (t.floor() as usize).min(points - 2);
                let frac = t - i as f64;
                values
                    .iter()
                    .map(|v| v[i] * (1.0 - frac) + v[i + 1] * frac)
                    .collect()
            }
        }
    }

    fn tabulate(&self, xs: &[f64]) -> Mat {
        let mut table = Mat::zeros(self.cutoff(), xs.len());
        for (k, &x) in xs.iter().enumerate() {
            for (n, v) in self.evaluate_all(x).into_iter().enumerate() {
                table[(n, k)] = v;
            }
        }
        table
    }

    /// Gram matrix `<φ_a|φ_b>` under the basis quadrature.
    pub fn gram(&self) -> Mat {
        let w = DVector::from_column_slice(&self.quadrature.weights);
        let weighted = Mat::from_fn(self.at_nodes.nrows(), self.at_nodes.ncols(), |i, k| {
            self.at_nodes[(i, k)] * w[k]
        });
        &weighted * self.at_nodes.transpose()
    }

    /// Interior sign changes of each mode, sampled at the quadrature nodes.
    pub fn sign_changes(&self) -> Vec<usize> {
        self.at_nodes
            .row_iter()
            .map(|row| count_sign_changes(row.iter().copied()).0)
            .collect()
    }

    fn check_nodes(&self) -> Result<()> {
        let grid = matches!(self.repr, ModeRepr::Grid { .. });
        for (n, row) in self.at_nodes.row_iter().enumerate() {
            let (changes, shortest_lobe) = count_sign_changes(row.iter().copied());
            if changes != n {
                return Err(Error::Resolution {
                    mode: Some(n),
                    reason: format!("mode has {changes} sign changes, expected {n}"),
                });
            }
            if grid && shortest_lobe < MIN_POINTS_PER_LOBE {
                return Err(Error::Resolution {
                    mode: Some(n),
                    reason: format!(
                        "a lobe spans only {shortest_lobe} grid points (need {MIN_POINTS_PER_LOBE})"
                    ),
                });
            }
        }
        Ok(())
    }

    fn check_orthonormality(&self) -> Result<()> {
        let gram = self.gram();
        for a in 0..gram.nrows() {
            for b in 0..=a {
                let target = if a == b { 1.0 } else { 0.0 };
                let err = (gram[(a, b)] - target).abs();
                if err > ORTHONORMALITY_TOL {
                    return Err(Error::Resolution {
                        mode: Some(a),
                        reason: format!(
                            "overlap <{a}|{b}> deviates from orthonormality by {err:.3e}"
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Parity `(-1)^n` of mode `n` under reflection about the trap centre,
    /// for reflection-symmetric traps.
    pub fn mode_parity(&self, n: usize) -> Option<i8> {
        self.trap
            .is_reflection_symmetric()
            .then_some(if n.is_multiple_of(2) { 1 } else { -1 })
    }
}

/// Counts sign changes of a sampled function, ignoring samples below the
/// zero threshold. Also returns the smallest number of significant samples
/// found in any lobe.
fn count_sign_changes(samples: impl Iterator<Item = f64> + Clone) -> (usize, usize) {
    let peak = samples.clone().fold(0.0_f64, |a, v| a.max(v.abs()));
    let threshold = NODE_ZERO_THRESHOLD * peak;
    let mut changes = 0;
    let mut last_sign = 0.0_f64;
    let mut run = 0usize;
    let mut shortest = usize::MAX;
    for v in samples {
        if v.abs() <= threshold {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            changes += 1;
            shortest = shortest.min(run);
            run = 0;
        }
        run += 1;
        last_sign = s;
    }
    shortest = shortest.min(run);
    (changes, shortest)
}

/// Energies from the grid solver at `order` and at the doubled resolution
/// `2 * order + 1` (which halves the spacing). Fails when any retained energy
/// moves by more than `tol`.
pub fn check_grid_convergence(
    trap: &TrapPotential,
    cutoff: usize,
    order: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let TrapKind::Custom(_) = trap.kind else {
        return Err(Error::UnsupportedTrap(
            "grid convergence applies to custom traps only".into(),
        ));
    };
    let coarse = solve_trap_with(trap, cutoff, &SolveOptions { order: Some(order) })?;
    let fine = solve_trap_with(trap, cutoff, &SolveOptions { order: Some(2 * order + 1) })?;
    let shifts: Vec<f64> = coarse
        .energies()
        .iter()
        .zip(fine.energies())
        .map(|(a, b)| (a - b).abs())
        .collect();
    if let Some((n, s)) = shifts.iter().enumerate().find(|(_, s)| **s > tol) {
        return Err(Error::Resolution {
            mode: Some(n),
            reason: format!("energy changed by {s:.3e} on grid refinement (tolerance {tol:.1e})"),
        });
    }
    Ok(shifts)
}

#[cfg(test)]
mod tests;
