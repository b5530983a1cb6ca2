//! Numerical verification of the L∞ derivative estimate for the semilinear
//! heat equation and its sharpness along self-similar solutions.

pub mod closed_forms;
pub mod error;
pub mod estimate;
pub mod interp;
pub mod mild;
pub mod ode;
pub mod profile;
pub mod sharpness;
pub mod specfun;

pub use closed_forms::SharpnessConstants;
pub use error::{Error, Result};
pub use estimate::{verify_estimate, EstimateReport};
pub use mild::{GridSpec, InitialDataSpec, NonlinearitySpec, SpaceTimeField};
pub use profile::{solve_profile, ProfileSolution, ShotOutcome};
pub use sharpness::{Construction, GapRow};
pub use specfun::QuadratureConfig;
