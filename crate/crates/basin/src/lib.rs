//! Gradual approximation of the domain of attraction (DA) of an
//! asymptotically stable steady state of a polynomial ODE system.
//!
//! The pipeline: parse a polynomial vector field with a Hurwitz,
//! diagonalizable linearization at the origin; move to eigencoordinates;
//! compute the truncated power series ("embryo") of the transformed optimal
//! Lyapunov function by a degree-by-degree recurrence; test membership in
//! the series' convergence domain with a truncated root criterion; and grow
//! the estimate by re-centering the embryo at points near the current
//! boundary. An independent fixed-step RK4 oracle classifies trajectories
//! for validation.

pub mod atlas;
pub mod cli;
pub mod config;
pub mod embryo;
pub mod field;
pub mod index;
pub mod json;
pub mod oracle;
pub mod series;
pub mod spectral;

pub use atlas::{grow_atlas, Atlas, Chart, GrowthParams, MembershipRule};
pub use embryo::{compute_coefficients, pde_residual, Embryo};
pub use field::{parse_system, PolyField};
pub use index::MultiIndex;
pub use oracle::{exact_da_member, simulate, SimOutcome, SimParams, Verdict};
pub use series::ComplexSeries;
pub use spectral::{diagonalize, rhs_quadratic, transform_field, Spectrum, TransformedField};
