use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::single_particle::SingleParticleBasis;

/// A set of product states that are coordinate permutations of one another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Occupied modes in ascending order.
    pub key: Vec<usize>,
    /// Basis indices of the orbit's members, ascending.
    pub members: Vec<usize>,
}

/// Truncated `N`-particle product basis `|n_1, ..., n_N>` with
/// `E_n = Σ ε_{n_i} <= E_max` and every `n_i` below the single-particle
/// cutoff. Closed under coordinate permutations.
#[derive(Debug, Clone)]
pub struct FockBasis {
    n_particles: usize,
    sp: Arc<SingleParticleBasis>,
    e_max: f64,
    states: Vec<Vec<usize>>,
    energies: Vec<f64>,
    index: HashMap<Vec<usize>, usize>,
    orbits: Vec<Orbit>,
    orbit_of: Vec<usize>,
}

/// Relative slack on `E_max` so that shells sitting exactly on the cutoff are
/// kept despite roundoff in the energy sums.
const E_MAX_SLACK: f64 = 1e-12;

pub fn build_basis(
    sp: Arc<SingleParticleBasis>,
    n_particles: usize,
    e_max: f64,
) -> Result<FockBasis> {
    FockBasis::new(sp, n_particles, e_max)
}

impl FockBasis {
    /// `e_max` may be infinite, which keeps the full product of the
    /// single-particle cutoff.
    pub fn new(sp: Arc<SingleParticleBasis>, n_particles: usize, e_max: f64) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidArgument("particle number must be >= 1".into()));
        }
        if e_max.is_nan() {
            return Err(Error::InvalidArgument("E_max is NaN".into()));
        }
        let eps = sp.energies();
        let min_energy = n_particles as f64 * eps[0];
        let limit = e_max + E_MAX_SLACK * e_max.abs().max(1.0);
        if limit < min_energy {
            return Err(Error::EmptyBasis { e_max, min_energy });
        }

        let mut states = Vec::new();
        let mut current = Vec::with_capacity(n_particles);
        enumerate(eps, n_particles, limit, 0.0, &mut current, &mut states);

        // Canonical energy: sum over sorted modes, identical for all permutations.
        let energy_of = |s: &[usize]| {
            let mut sorted = s.to_vec();
            sorted.sort_unstable();
            sorted.iter().map(|&m| eps[m]).sum::<f64>()
        };
        let mut keyed: Vec<(f64, Vec<usize>)> =
            states.into_iter().map(|s| (energy_of(&s), s)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let (energies, states): (Vec<f64>, Vec<Vec<usize>>) = keyed.into_iter().unzip();

        let index: HashMap<Vec<usize>, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();

        let mut orbit_lookup: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut orbits: Vec<Orbit> = Vec::new();
        let mut orbit_of = Vec::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            let mut key = s.clone();
            key.sort_unstable();
            let o = *orbit_lookup.entry(key.clone()).or_insert_with(|| {
                orbits.push(Orbit {
                    key,
                    members: Vec::new(),
                });
                orbits.len() - 1
            });
            orbits[o].members.push(i);
            orbit_of.push(o);
        }

        Ok(Self {
            n_particles,
            sp,
            e_max,
            states,
            energies,
            index,
            orbits,
            orbit_of,
        })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn single_particle(&self) -> &Arc<SingleParticleBasis> {
        &self.sp
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn index_of(&self, modes: &[usize]) -> Option<usize> {
        self.index.get(modes).copied()
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    /// Orbit index of basis state `i`.
    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i]
    }

    /// Highest mode index occurring in the basis.
    pub fn max_mode(&self) -> usize {
        self.orbits
            .iter()
            .map(|o| *o.key.last().unwrap())
            .max()
            .unwrap_or(0)
    }

    /// Same basis (states and single-particle data) as `other`.
    pub fn same_as(&self, other: &FockBasis) -> bool {
        std::ptr::eq(self, other)
            || (self.n_particles == other.n_particles
                && self.states == other.states
                && Arc::ptr_eq(&self.sp, &other.sp))
    }
}

fn enumerate(
    eps: &[f64],
    remaining: usize,
    limit: f64,
    partial: f64,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    // The cheapest completion puts every remaining particle in mode 0.
    let rest = (remaining - 1) as f64 * eps[0];
    for (m, &e) in eps.iter().enumerate() {
        if partial + e + rest > limit {
            break;
        }
        current.push(m);
        enumerate(eps, remaining - 1, limit, partial + e, current, out);
        current.pop();
    }
}
