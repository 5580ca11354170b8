//! Co-rotational reduction of the regularized energy
//! `E_α(u) = ½ ∫ (2 + |∇u|²)^α` for maps between round two-spheres.
//!
//! The crate evaluates the reduced energies of profiles `f: [0, π] → ℝ`,
//! minimizes them within a boundary class `f(0) = 0, f(π) = mπ`, samples the
//! closed-form comparison families and checks the associated bounds.

pub mod energy;
pub mod error;
pub mod families;
pub mod minimizer;
pub mod profile;
pub mod quadrature;
pub mod sweep;
pub mod verify;

pub use energy::{ChainReport, EnergyReport, Preconditioner};
pub use error::{Error, Result};
pub use families::{BoundIntegrals, FamilyParams, UpperBoundCertificate};
pub use minimizer::{Certificate, MinimizeConfig, MinimizeResult};
pub use profile::{BoundaryClass, Grid, Init, RadialProfile};
pub use quadrature::Quadrature;
pub use sweep::{SweepRow, SweepSpec};
