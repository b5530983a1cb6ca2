//! Bounded mild solutions through the Duhamel representation.

mod field;
pub mod kernel;
mod solve;
mod spec;

pub use field::{selfsim_field, FarField, GridSpec, SpaceTimeField};
pub use solve::{
    derivative_field, derivative_field_with, duhamel_residual, duhamel_value, heat_convolve, picard_solve,
    verification_half_width, DiagonalRefinement, PicardConfig, PicardResult, Seed, SeedKind,
};
pub use spec::{InitialDataSpec, NonlinearitySpec};
