//! Truncated `N`-particle product basis and the contact Hamiltonian
//! `H(g) = Σ_i h(x_i) + g Σ_{i<j} δ(x_i - x_j)`.

mod basis;
mod hamiltonian;
pub mod io;

pub use basis::{build_basis, FockBasis, Orbit};
pub use hamiltonian::{
    build_hamiltonian, interaction_element, pair_term, sector_block, ContactIntegrals,
    HamiltonianMatrix, SectorHamiltonian,
};

#[cfg(test)]
mod tests;
