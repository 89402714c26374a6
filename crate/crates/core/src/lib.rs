//! Continuous greedy maximization of composite submodular objectives under partition
//! matroid constraints, with deterministic Taylor-polynomial gradient estimators.
//!
//! Numeric types are generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod analytic;
pub mod error;
pub mod harness;
pub mod matroid;
pub mod objective;
pub mod optimizer;
pub mod polynomial;
pub mod problems;
pub mod rounding;
pub mod scalar;

pub use analytic::{AnalyticKernel, KernelKind, KernelSpec, TaylorPolynomial};
pub use error::{Error, Result};
pub use matroid::{MatroidSpec, PartitionMatroid};
pub use objective::{
    CompositeObjective, CompositeTerm, EstimatorTag, GradientEstimate, ProblemKind, SampleConfig,
};
pub use optimizer::{continuous_greedy, GreedyConfig, GreedyResult, GreedyTrace, TraceRow};
pub use polynomial::{Basis, Monomial, MultilinearPoly};
pub use scalar::Scalar;

pub type Poly = MultilinearPoly<f64>;
pub type Kernel = AnalyticKernel<f64>;
pub type Objective = CompositeObjective<f64>;
pub type Term = CompositeTerm<f64>;
pub type Gradient = GradientEstimate<f64>;
