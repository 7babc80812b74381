//! Numerical kernels: quadrature, special functions, ODE and PDE solvers.

pub mod diff;
pub mod erf;
pub mod ode;
pub mod quadrature;
pub mod tdse;

pub use diff::{fd_derivative, Derivative, DerivativeOrder};
pub use erf::{erf_complex, erf_real, erfc_complex, erfc_real};
pub use ode::{ode_integrate, ode_integrate_dense, DenseSolution, OdeSpec, Trajectory};
pub use quadrature::{
    integrate_complex_line, integrate_interval, integrate_line_with_probe, integrate_panels,
    Integral, QuadratureSpec,
};
pub use tdse::{evolve_reference, l2_distance, Evolution, GridSpec};
