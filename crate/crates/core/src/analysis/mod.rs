//! Spectral statistics, entanglement and time evolution.

mod comrel;
mod goe;
mod spacing;
mod state;

pub use comrel::{com_rel_map, ComRelMap};
pub use goe::{goe_sample, poisson_levels};
pub use spacing::{
    brody_density, brody_fit, ks_distance, ks_two_sample, poisson_cdf, poisson_density,
    spacing_ecdf, spacing_histogram, spacing_statistics, spacing_statistics_with,
    unfold_spacings, wigner_cdf, wigner_density, write_rows_csv, HistogramRow,
    SpacingStatistics, UnfoldingOptions, BRODY_RANGE, MIN_LEVELS,
};
pub use state::{entanglement_entropy, evolve_state, Bipartition, Propagator, StateVector};
