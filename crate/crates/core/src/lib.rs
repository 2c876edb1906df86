//! Delayed wild/sterile/non-sterile mosquito population model.
//!
//! - [`model`]: parameters, state and the delayed vector field
//! - [`equilibria`]: trivial, boundary and positive equilibria
//! - [`linearization`]: expansion coefficients, Jacobians and δ-coefficients
//! - [`spectral`]: Routh–Hurwitz, crossing frequencies, critical delays
//! - [`dde`]: fixed-step RK4 with Hermite dense output
//! - [`scan`]: one-parameter bifurcation scans

pub mod dde;
pub mod equilibria;
pub mod error;
pub mod linearization;
pub mod model;
pub mod scan;
pub mod spectral;

pub use dde::{integrate, DelaySystem, HistoryFunction, Integration, SolverOptions, Trajectory};
pub use equilibria::{find_equilibria, EquilibriumKind, EquilibriumReport, EquilibriumSummary};
pub use error::{Error, Result};
pub use linearization::{linearize, DeltaSet, Linearization};
pub use model::{omega_box, Component, ModelParams, OmegaBox, ParamId, State};
pub use scan::{scan, AttractorKind, Sampler, ScanConfig, ScanResult};
pub use spectral::{analyze, SpectralReport, StabilityVerdict};
