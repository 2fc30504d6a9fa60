//! Scalar abstraction for the numerical core.
//!
//! Everything in this crate is generic over a floating-point scalar so the
//! same formulas run in `f32` or `f64`. Dense eigenvalue problems are the one
//! place where we lean on a backend (nalgebra); those entry points live on the
//! trait so generic code never needs nalgebra bounds.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating-point scalar usable by the numerical core: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    /// All eigenvalues of a dense square matrix given in row-major order.
    fn eigenvalues(n: usize, row_major: &[Self]) -> Vec<Complex<Self>>;

    /// Eigen-decomposition of a symmetric tridiagonal matrix.
    ///
    /// Returns `(values, firsts)` sorted by ascending eigenvalue, where
    /// `firsts[k]` is the first component of the k-th orthonormal eigenvector.
    fn symmetric_tridiagonal_eigen(diag: &[Self], offdiag: &[Self]) -> (Vec<Self>, Vec<Self>);
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn eigenvalues(n: usize, row_major: &[Self]) -> Vec<Complex<Self>> {
                assert_eq!(row_major.len(), n * n, "matrix data length");
                if n == 0 {
                    return Vec::new();
                }
                let m = nalgebra::DMatrix::<$t>::from_row_slice(n, n, row_major);
                m.complex_eigenvalues().iter().copied().collect()
            }

            fn symmetric_tridiagonal_eigen(
                diag: &[Self],
                offdiag: &[Self],
            ) -> (Vec<Self>, Vec<Self>) {
                let n = diag.len();
                assert_eq!(offdiag.len(), n.saturating_sub(1), "off-diagonal length");
                let mut m = nalgebra::DMatrix::<$t>::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = diag[i];
                    if i + 1 < n {
                        m[(i, i + 1)] = offdiag[i];
                        m[(i + 1, i)] = offdiag[i];
                    }
                }
                let eig = m.symmetric_eigen();
                let mut pairs: Vec<(Self, Self)> = (0..n)
                    .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)]))
                    .collect();
                pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
                pairs.into_iter().unzip()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
