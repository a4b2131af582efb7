//! Local time of symmetric Lévy random walks generated by `H(p) = D |p|^λ`,
//! `1 ≤ λ ≤ 2`.
//!
//! * [`stable`]: transition densities `P_λ(x, t)`, their tails and CDF.
//! * [`resolvent`]: the kernel `R_λ(x, -E)` of `(Ĥ + E)^{-1}` and its
//!   δ-peak perturbations.
//! * [`localtime`]: E-domain correlation functions, one-point distributions
//!   with their `δ(L)` atoms, first and second moments.
//! * [`montecarlo`]: sampled paths, binned local times and ensemble estimates.
//! * [`verify`]: cross-checks of all of the above.
//!
//! [`special`] and [`quad`] hold the special functions and the adaptive
//! quadrature everything else is built on.
//!
//! ```
//! use levy_localtime::{stable_density, WalkModel};
//!
//! let gauss = WalkModel::gaussian(1.0).unwrap();
//! let p = stable_density(0.0, 1.0, &gauss).unwrap();
//! assert!((p - 0.282_094_791_773_878_1).abs() < 1e-15);
//! ```

pub mod error;
pub mod localtime;
pub mod montecarlo;
pub mod quad;
pub mod resolvent;
pub mod special;
pub mod stable;
pub mod verify;

pub use error::{Error, Result};
pub use localtime::{
    correlation_e, mean_fixed, mean_free, onepoint_density_e, second_moment_gauss, w_fixed, w_free,
    w_gauss_fixed, w_gauss_free, AtomicDensity, AtomicValue, EndpointSpec, LocalTimeValue,
};
pub use montecarlo::{MCEstimate, McConfig, PathSample};
pub use quad::Budget;
pub use resolvent::{perturbed_resolvent, resolvent, resolvent_diagonal, Energy, PeakPotential};
pub use stable::{stable_density, SpaceTimePoint, StableCdf, WalkModel};
