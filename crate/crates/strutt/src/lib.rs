//! Parametric-stability boundaries for the scalar second-order equation
//!
//! ```text
//! x''(t) + (a0 + a1 cos(theta t)) x(t) = integral_{-inf}^t K(t, s) x(s) ds
//! ```
//!
//! with a simultaneously periodic memory kernel `K(t+T, s+T) = K(t, s)`.
//!
//! The crate computes harmonic coefficient tables of the kernel, truncated
//! Hill matrices for periodic and antiperiodic solution families, the
//! determinantal boundary branches of the Strutt chart (quasi-static values,
//! tongue edges, sides and vertices of the stability triangle), and — for
//! exponential-sum kernels — an independent time-domain oracle built from an
//! exact ODE embedding, the monodromy matrix and its Floquet multipliers.
//!
//! All numerics are generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the `*64` aliases below pin the common double-precision
//! instantiations.

// Guards written as `!(x > 0)` must also reject NaN, which `x <= 0` does not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundaries;
pub mod error;
pub mod hill;
pub mod kernels;
pub mod linalg;
pub mod monodromy;
pub mod quadrature;
pub(crate) mod roots;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases for the main library types.
pub type MemoryKernel64 = kernels::MemoryKernel<f64>;
pub type ExpSumKernel64 = kernels::ExpSumKernel<f64>;
pub type QuadratureSpec64 = quadrature::QuadratureSpec<f64>;
pub type FourierBlock64 = quadrature::FourierBlock<f64>;
pub type HillMatrix64 = hill::HillMatrix<f64>;
pub type BoundaryBranch64 = boundaries::BoundaryBranch<f64>;
pub type MonodromyResult64 = monodromy::MonodromyResult<f64>;
pub type StabilityChart64 = monodromy::StabilityChart<f64>;
