//! The ξ-Bergman machinery on polynomial sections of `A²(D)`.

mod basis;
mod ladder;
mod projection;
pub mod space;

pub use basis::{triangular_basis, TriangularBasis};
pub use ladder::{
    density_sequence, exhaustion_limit, is_nondecreasing, krull_ladder, stabilization_index, Density, DensityRow,
    Exhaustion, ExhaustionRow, Ladder, LadderRow, STABLE_TOL,
};
pub use projection::{
    b_circle, extremal_functional, kernel_at_origin, minimal_l2, riesz_representative, BCircle, Diagnostics,
    ProjectionJson, ProjectionResult, Representative,
};
pub use space::{working_degree, Metric, WorkingSpace};

#[cfg(test)]
mod tests;
