//! Sparse signal recovery by constrained l1 minimization.
//!
//! The crate is organised around the observation model `y = F beta + z`:
//!
//! * [`model`] generates sensing matrices, sparse signals and noisy
//!   observations, and provides the best k-term split used by every bound.
//! * [`constants`] computes restricted isometry constants `delta_k`,
//!   restricted orthogonality constants `theta_{k,k'}` and the mutual
//!   coherence `M` exactly by support enumeration, and evaluates the
//!   recovery conditions built from them.
//! * [`chains`] evaluates the two descending-chain inequalities behind the
//!   sharpened recovery analysis.
//! * [`solvers`] implements basis pursuit, the Dantzig selector, the
//!   l2-constrained program and the Lasso over a dense simplex core.
//! * [`bounds`] evaluates the closed-form error-bound constants and issues
//!   certificates for recovered signals.
//! * [`harness`] runs seeded experiments and Monte Carlo tail checks.

pub mod bounds;
pub mod chains;
pub mod constants;
mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod seed;
pub mod solvers;

pub use error::{Error, Result};

pub use bounds::{BoundCertificate, ConstantSet, NoiseParams, Theorem};
pub use chains::{ChainBound, DescendingChain};
pub use constants::{ConditionReport, ConditionVariant, Exactness, RipReport};
pub use model::{
    best_k_term, Amplitude, Ensemble, NoiseSpec, Observation, SensingMatrix, SparseSignal,
};
pub use solvers::{Program, RecoveryResult, SolveStatus, SolverOptions};
