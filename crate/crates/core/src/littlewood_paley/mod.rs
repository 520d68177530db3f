//! Dyadic frequency decomposition and Besov / Chemin-Lerner norms.
//!
//! Discrete `L^p` block norms use grid quadrature `(Σ |f|^p ΔV)^{1/p}`;
//! time integrals use the trapezoid rule on the recorded sample times.

mod besov;
mod checks;
mod partition;

pub(crate) use besov::block_table_spectral;
pub use besov::{
    besov_norm, besov_norm_components, besov_report, block_table, chemin_lerner_from_tables,
    chemin_lerner_norm, graded_times, lebesgue_besov_from_tables, lr_sum, time_lebesgue,
    BesovSpec, BlockRow, BlockTable, ChemLernerSpec, Exponent, NormReport,
};
pub use checks::{
    bernstein_ratios, gradient_equivalence_ratio, heat_semigroup_check, BernsteinRow, HeatReport,
};
pub use partition::{
    build_partition, chi, phi, DyadicPartition, PartitionDefect, ANNULUS_INNER, ANNULUS_OUTER,
    BALL_RADIUS, MIN_SHELLS,
};
