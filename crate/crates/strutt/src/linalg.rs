//! Small dense square matrices with pivoted-LU determinants.
//!
//! Truncated Hill matrices and monodromy matrices here are tiny (a handful of
//! rows), so a simple row-major `Vec` container with partial pivoting is all
//! the linear algebra the crate carries itself; eigenvalue problems go through
//! [`crate::scalar::Real`].

use crate::scalar::Real;
use num_complex::Complex;
use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Matrix entry: a real or complex scalar with a magnitude usable for pivoting.
pub trait Entry:
    Copy
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type R: Real;
    fn magnitude(self) -> Self::R;
}

impl<T: Real> Entry for T {
    type R = T;
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> Entry for Complex<T> {
    type R = T;
    fn magnitude(self) -> T {
        self.norm()
    }
}

/// Dense square matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Square<S> {
    n: usize,
    data: Vec<S>,
}

pub type RealMatrix<T> = Square<T>;
pub type ComplexMatrix<T> = Square<Complex<T>>;

impl<S: Entry> Square<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must be square");
        Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest entry magnitude; zero for the empty matrix.
    pub fn max_abs(&self) -> S::R {
        self.data
            .iter()
            .map(|e| e.magnitude())
            .fold(S::R::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        Square::from_fn(n, |i, j| {
            let mut acc = S::zero();
            for k in 0..n {
                acc = acc + self[(i, k)] * other[(k, j)];
            }
            acc
        })
    }

    /// Determinant by LU factorization with partial pivoting.
    ///
    /// Singular matrices return zero (within roundoff); the routine is
    /// deterministic for a fixed input.
    pub fn det(&self) -> S {
        let n = self.n;
        if n == 0 {
            return S::one();
        }
        let mut a = self.data.clone();
        let mut sign_flip = false;
        let mut det = S::one();
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = a[col * n + col].magnitude();
            for r in col + 1..n {
                let mag = a[r * n + col].magnitude();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = r;
                }
            }
            if pivot_mag == S::R::zero() {
                return S::zero();
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot_row * n + j);
                }
                sign_flip = !sign_flip;
            }
            let pivot = a[col * n + col];
            det = det * pivot;
            for r in col + 1..n {
                let factor = a[r * n + col] / pivot;
                if factor != S::zero() {
                    for j in col + 1..n {
                        let sub = factor * a[col * n + j];
                        a[r * n + j] = a[r * n + j] - sub;
                    }
                }
            }
        }
        if sign_flip {
            -det
        } else {
            det
        }
    }
}

impl<S> std::ops::Index<(usize, usize)> for Square<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Square<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}
