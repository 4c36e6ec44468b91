//! Exact and asymptotic computations for the Jacobi unitary ensemble and
//! the impenetrable Bose gas in a box: special functions, quadrature,
//! closed-form integrals, samplers, ensemble averages, natural orbitals and
//! Fisher–Hartwig type determinant asymptotics.

pub mod averages;
pub mod ensembles;
pub mod error;
pub mod exact;
pub mod fisherhartwig;
pub mod heine;
pub mod linalg;
pub mod orbitals;
pub mod quadrature;
pub mod specfun;
pub mod validation;

pub use averages::{ChargeConfig, DualityCase, MCEstimate, ProductMode};
pub use ensembles::{EigenvalueSample, RngStream, SampleProvenance};
pub use error::{Error, Result};
pub use exact::{Boundary, DensityMatrixQuery, EnsembleParams, MorrisParams};
pub use fisherhartwig::{DeterminantValue, DriftReport, SymbolSpec};
pub use orbitals::{KernelSpec, Orbital};
pub use specfun::LogMagnitude;
