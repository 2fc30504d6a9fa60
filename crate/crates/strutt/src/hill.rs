//! Truncated Hill matrices for the periodic and antiperiodic solution
//! families, their complex determinants, and the real multi-index expansion
//! of a truncated determinant.
//!
//! A periodic truncation of halfwidth N covers harmonics `{-N .. N}`; the
//! entry at row n, column m is
//!
//! ```text
//! D_nm = delta_nm - (K_nm - a0 delta_nm - a1/2 delta_{n-1,m} - a1/2 delta_{n+1,m})
//!                   / (i n theta + gamma)^2
//! ```
//!
//! except that at `gamma = 0` the singular `n = 0` row is replaced by the
//! harmonic-balance row `-K_0m + a0 delta_0m + a1/2 (delta_{-1,m} + delta_{1,m})`.
//! Antiperiodic truncations use half-odd harmonics `(2n+1) theta / 2` and
//! cover `{-N .. N-1}`.

use crate::error::{Error, Result};
use crate::kernels::Mode;
use crate::linalg::{ComplexMatrix, RealMatrix};
use crate::quadrature::{FourierBlock, HarmonicWindow};
use crate::scalar::Real;
use num_complex::Complex;

/// Relative threshold (times `theta`) below which a harmonic prefactor
/// counts as singular; separates the exceptional row from near-resonant
/// shifts.
const DEGENERATE_SHIFT_EPS: f64 = 1e-9;

/// Coefficients of the modulated stiffness `a(t) = a0 + a1 cos(theta t)` and
/// the Floquet shift.
#[derive(Clone, Copy, Debug)]
pub struct HillParams<T> {
    pub a0: T,
    pub a1: T,
    pub theta: T,
    pub gamma: Complex<T>,
}

/// One finite truncation with its window metadata.
#[derive(Clone, Debug)]
pub struct HillMatrix<T> {
    pub window: HarmonicWindow,
    pub params: HillParams<T>,
    pub entries: ComplexMatrix<T>,
    pub exceptional_row_applied: bool,
}

fn is_exact_zero<T: Real>(z: Complex<T>) -> bool {
    z.re == T::zero() && z.im == T::zero()
}

fn build<T: Real>(
    params: HillParams<T>,
    window: HarmonicWindow,
    coeffs: &FourierBlock<T>,
) -> Result<HillMatrix<T>> {
    if coeffs.window != window {
        return Err(Error::Invalid("coefficient block window mismatch".into()));
    }
    if coeffs.theta != params.theta || coeffs.gamma != params.gamma {
        return Err(Error::Invalid(
            "coefficient block evaluated at different (theta, gamma)".into(),
        ));
    }
    if !(params.theta > T::zero()) {
        return Err(Error::Invalid("theta must be positive".into()));
    }
    let eps = T::of(DEGENERATE_SHIFT_EPS) * params.theta;
    let idx: Vec<i64> = window.indices().collect();
    let size = window.size();
    let half = T::of(0.5);
    let mut entries = ComplexMatrix::<T>::zeros(size);
    let mut exceptional = false;

    for (r, &n) in idx.iter().enumerate() {
        let shift = Complex::new(params.gamma.re, params.gamma.im + window.mode.harmonic(n, params.theta));
        let exceptional_row =
            window.mode == Mode::Periodic && n == 0 && is_exact_zero(params.gamma);
        if !exceptional_row && shift.norm() < eps {
            return Err(Error::DegenerateShift(format!(
                "harmonic prefactor |i h_n + gamma| = {} below {} at n = {n}",
                shift.norm(),
                eps
            )));
        }
        for (c, &m) in idx.iter().enumerate() {
            let mut coupling = coeffs.get(n, m);
            if n == m {
                coupling = coupling - Complex::new(params.a0, T::zero());
            }
            if m == n - 1 || m == n + 1 {
                coupling = coupling - Complex::new(half * params.a1, T::zero());
            }
            entries[(r, c)] = if exceptional_row {
                -coupling
            } else {
                let delta = if n == m { T::one() } else { T::zero() };
                Complex::new(delta, T::zero()) - coupling / (shift * shift)
            };
        }
        exceptional |= exceptional_row;
    }
    Ok(HillMatrix {
        window,
        params,
        entries,
        exceptional_row_applied: exceptional,
    })
}

/// Truncation of the periodic-family Hill matrix.
pub fn build_periodic<T: Real>(
    params: HillParams<T>,
    window: HarmonicWindow,
    coeffs: &FourierBlock<T>,
) -> Result<HillMatrix<T>> {
    if window.mode != Mode::Periodic {
        return Err(Error::Invalid("window mode must be periodic".into()));
    }
    build(params, window, coeffs)
}

/// Truncation of the antiperiodic-family Hill matrix.
pub fn build_antiperiodic<T: Real>(
    params: HillParams<T>,
    window: HarmonicWindow,
    coeffs: &FourierBlock<T>,
) -> Result<HillMatrix<T>> {
    if window.mode != Mode::Antiperiodic {
        return Err(Error::Invalid("window mode must be antiperiodic".into()));
    }
    build(params, window, coeffs)
}

/// Determinant of the truncation by pivoted LU; raw (not normalized), so the
/// truncation order stays part of the result's meaning.
pub fn det_complex<T: Real>(m: &HillMatrix<T>) -> Complex<T> {
    m.entries.det()
}

/// Splits a truncation at purely imaginary shift into real and imaginary
/// parts, `D = D_C + i D_S` elementwise.
pub fn split_real_imag<T: Real>(m: &HillMatrix<T>) -> Result<(RealMatrix<T>, RealMatrix<T>)> {
    if m.params.gamma.re != T::zero() {
        return Err(Error::Invalid(
            "the real/imaginary split needs a purely imaginary shift".into(),
        ));
    }
    let n = m.entries.n();
    let dc = RealMatrix::from_fn(n, |i, j| m.entries[(i, j)].re);
    let ds = RealMatrix::from_fn(n, |i, j| m.entries[(i, j)].im);
    Ok((dc, ds))
}

/// Maximum dimension accepted by [`multiindex_expansion`] (2^dim terms).
pub const MAX_MULTIINDEX_DIM: usize = 12;

/// Determinant of `D_C + i D_S` evaluated as the signed sum of the `2^dim`
/// row-mixed real determinants, grouped by the number of imaginary rows
/// modulo 4. Equals the complex determinant up to roundoff, through real
/// arithmetic only.
pub fn multiindex_expansion<T: Real>(
    dc: &RealMatrix<T>,
    ds: &RealMatrix<T>,
) -> Result<Complex<T>> {
    let dim = dc.n();
    if ds.n() != dim {
        return Err(Error::Invalid("real and imaginary parts differ in size".into()));
    }
    if dim > MAX_MULTIINDEX_DIM {
        return Err(Error::TooLarge(format!(
            "multi-index expansion is 2^dim determinants; dim = {dim} exceeds {MAX_MULTIINDEX_DIM}"
        )));
    }
    let mut re = T::zero();
    let mut im = T::zero();
    for mask in 0u32..(1 << dim) {
        let mixed = RealMatrix::from_fn(dim, |i, j| {
            if mask & (1 << i) != 0 {
                ds[(i, j)]
            } else {
                dc[(i, j)]
            }
        });
        let d = mixed.det();
        match mask.count_ones() % 4 {
            0 => re = re + d,
            1 => im = im + d,
            2 => re = re - d,
            _ => im = im - d,
        }
    }
    Ok(Complex::new(re, im))
}

/// Row-sup summability proxy for the truncation: `sum_n max_m |entry - delta|`.
pub fn koch_row_norm<T: Real>(m: &HillMatrix<T>) -> T {
    let n = m.entries.n();
    let mut acc = T::zero();
    for i in 0..n {
        let mut row_max = T::zero();
        for j in 0..n {
            let delta = if i == j { T::one() } else { T::zero() };
            let dev = (m.entries[(i, j)] - Complex::new(delta, T::zero())).norm();
            row_max = row_max.max(dev);
        }
        acc = acc + row_max;
    }
    acc
}
