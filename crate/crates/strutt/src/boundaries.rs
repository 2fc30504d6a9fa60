//! Boundary branches of the stability chart from truncated determinantal
//! equations, plus closed forms for the single-exponential kernel model.
//!
//! The working object is the unnormalized truncation `U` with entries
//!
//! ```text
//! U_nm = K_nm + (-(gamma + i h_n)^2 - a0) delta_nm - a1/2 (delta_{n-1,m} + delta_{n+1,m})
//! ```
//!
//! whose vanishing determinant is the solvability condition for the harmonic
//! system; `h_n` is the mode harmonic. For the 3x3 periodic and 2x2
//! antiperiodic truncations the determinant is a quadratic in `a1`, expanded
//! here in closed form and cross-checked in tests against determinant
//! interpolation. At real shifts the index-reversal conjugation symmetry
//! makes these determinants real, which is what the side and vertex solvers
//! rely on.

use crate::error::{Error, Result};
use crate::kernels::{MemoryKernel, Mode};
use crate::linalg::{ComplexMatrix, RealMatrix};
use crate::quadrature::{fourier_block, Backend, FourierBlock, HarmonicWindow, QuadratureSpec};
use crate::roots::{bisect, golden_min, linspace, local_min_indices, sign_change_brackets};
use crate::scalar::Real;
use num_complex::Complex;

/// Default absolute tolerance for residuals and real-root admissibility,
/// applied to determinant values scaled by the matrix max-norm.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Quadratic `C0 + C1 a1 + C2 a1^2` with complex coefficients.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticComplex<T> {
    pub c0: Complex<T>,
    pub c1: Complex<T>,
    pub c2: Complex<T>,
}

impl<T: Real> QuadraticComplex<T> {
    pub fn eval(&self, a1: T) -> Complex<T> {
        self.c0 + (self.c1 + self.c2 * a1) * a1
    }

    pub fn coefficient_scale(&self) -> T {
        self.c0
            .norm()
            .max(self.c1.norm())
            .max(self.c2.norm())
            .max(T::of(1e-300))
    }

    /// Real-coefficient view; errors when any imaginary part exceeds
    /// `eps * scale` (used where determinant realness is guaranteed).
    pub fn realify(&self, eps: T) -> Result<[T; 3]> {
        let s = self.coefficient_scale();
        let worst = self.c0.im.abs().max(self.c1.im.abs()).max(self.c2.im.abs());
        if worst > eps * s {
            return Err(Error::Numerical(format!(
                "expected real quadratic, imaginary residue {worst} vs scale {s}"
            )));
        }
        Ok([self.c0.re, self.c1.re, self.c2.re])
    }
}

/// Outcome of the real-root criterion for a complex-coefficient quadratic.
#[derive(Clone, Debug)]
pub struct RealRootReport<T> {
    pub q1: T,
    pub q2: T,
    pub has_real_root: bool,
    pub roots: Vec<T>,
}

fn det2<T: Real>(a: T, b: T, c: T, d: T) -> T {
    a * d - b * c
}

/// Stable real roots of `c0 + c1 x + c2 x^2`; `eps` decides degeneracy of the
/// leading coefficient relative to the largest one.
pub(crate) fn real_quadratic_roots<T: Real>(c0: T, c1: T, c2: T, eps: T) -> Vec<T> {
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if scale == T::zero() {
        return Vec::new();
    }
    if c2.abs() <= eps * scale {
        if c1.abs() <= eps * scale {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - T::of(4.0) * c0 * c2;
    if disc < -eps * scale * scale {
        return Vec::new();
    }
    let sqrt_disc = disc.max(T::zero()).sqrt();
    if sqrt_disc == T::zero() {
        return vec![-c1 / (T::of(2.0) * c2)];
    }
    let sign = if c1 >= T::zero() { T::one() } else { -T::one() };
    let qq = -(c1 + sign * sqrt_disc) / T::of(2.0);
    let mut roots = if qq == T::zero() {
        vec![T::zero(), -c1 / c2]
    } else {
        vec![qq / c2, c0 / qq]
    };
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    roots
}

/// Real roots of a complex-coefficient quadratic.
///
/// When both `Re C2` and `Im C2` are nonzero, the elimination criterion
/// applies: a real root exists iff `Q2 >= 0` and `Q1 = 0` (within `tol`,
/// scaled). Otherwise the report falls back to direct extraction: real roots
/// of the real-part quadratic filtered by the full residual.
pub fn real_root_test<T: Real>(q: &QuadraticComplex<T>, tol: T) -> RealRootReport<T> {
    let s = q.coefficient_scale();
    let (r0, i0) = (q.c0.re, q.c0.im);
    let (r1, i1) = (q.c1.re, q.c1.im);
    let (r2, i2) = (q.c2.re, q.c2.im);
    let q1 = det2(r2, r0, i2, i0) * det2(r2, r0, i2, i0)
        - det2(r2, r1, i2, i1) * det2(r1, r0, i1, i0);
    let q2 = r1 * r1 - T::of(4.0) * r0 * r2;

    let eps = T::of(1e-12);
    let extraction = |relax: bool| -> Vec<T> {
        let cands = real_quadratic_roots(r0, r1, r2, eps);
        let mut best: Option<(T, T)> = None;
        let mut kept = Vec::new();
        for root in cands {
            let resid = q.eval(root).norm();
            let bound = tol * s * T::one().max(root * root);
            if resid <= bound {
                kept.push(root);
            }
            if best.is_none_or(|(_, b)| resid < b) {
                best = Some((root, resid));
            }
        }
        if kept.is_empty() && relax {
            if let Some((root, _)) = best {
                kept.push(root);
            }
        }
        kept
    };

    let side_conditions = r2.abs() > eps * s && i2.abs() > eps * s;
    if side_conditions {
        let has = q2 >= -tol * s * s && q1.abs() <= tol * s * s * s * s;
        let roots = if has { extraction(true) } else { extraction(false) };
        RealRootReport {
            q1,
            q2,
            has_real_root: has && !roots.is_empty(),
            roots,
        }
    } else {
        let roots = extraction(false);
        RealRootReport {
            q1,
            q2,
            has_real_root: !roots.is_empty(),
            roots,
        }
    }
}

/// `-(gamma + i h)^2`, the squared-frequency diagonal term at harmonic `h`.
fn freq_term<T: Real>(gamma: Complex<T>, h: T) -> Complex<T> {
    let z = Complex::new(gamma.re, gamma.im + h);
    -(z * z)
}

/// Unnormalized truncation matrix over the block's window at modulation
/// amplitude `a1` (entries as in the module docs).
pub fn truncation_matrix<T: Real>(block: &FourierBlock<T>, a0: T, a1: T) -> ComplexMatrix<T> {
    let idx: Vec<i64> = block.window.indices().collect();
    let half = T::of(0.5);
    ComplexMatrix::from_fn(idx.len(), |r, c| {
        let (n, m) = (idx[r], idx[c]);
        let mut e = block.get(n, m);
        if n == m {
            e = e + freq_term(block.gamma, block.window.mode.harmonic(n, block.theta))
                - Complex::new(a0, T::zero());
        }
        if m == n - 1 || m == n + 1 {
            e = e - Complex::new(half * a1, T::zero());
        }
        e
    })
}

/// Determinant magnitude scaled by the matrix max-norm to the matrix size.
pub fn scaled_det_residual<T: Real>(m: &ComplexMatrix<T>) -> T {
    let scale = m.max_abs().max(T::one());
    m.det().norm() / scale.powi(m.n() as i32)
}

/// Quadratic-in-`a1` expansion of minus the 3x3 periodic truncation
/// determinant (halfwidth-1 window) at the block's `(theta, gamma)`.
///
/// The sign convention makes the zero-kernel leading coefficient
/// `C2 = (omega'^2 + theta^2 - a0) / 2` at `gamma = i omega'`.
pub fn periodic_3x3_coeffs<T: Real>(block: &FourierBlock<T>, a0: T) -> Result<QuadraticComplex<T>> {
    if block.window != HarmonicWindow::periodic(1) {
        return Err(Error::Invalid(
            "periodic 3x3 coefficients need a halfwidth-1 periodic block".into(),
        ));
    }
    let a0c = Complex::new(a0, T::zero());
    let d_m1 = block.get(-1, -1) + freq_term(block.gamma, -block.theta) - a0c;
    let d_0 = block.get(0, 0) + freq_term(block.gamma, T::zero()) - a0c;
    let d_p1 = block.get(1, 1) + freq_term(block.gamma, block.theta) - a0c;
    let km10 = block.get(-1, 0);
    let k0m1 = block.get(0, -1);
    let k01 = block.get(0, 1);
    let k10 = block.get(1, 0);
    let km11 = block.get(-1, 1);
    let k1m1 = block.get(1, -1);

    let quarter = T::of(0.25);
    let half = T::of(0.5);
    let c2 = (d_m1 + d_p1 - k1m1 - km11) * quarter;
    let c1 = ((km10 + k01) * k1m1 + (k0m1 + k10) * km11
        - (k01 + k10) * d_m1
        - (km10 + k0m1) * d_p1)
        * half;
    let c0 = -(d_m1 * d_0 * d_p1) + d_m1 * k01 * k10 + km10 * k0m1 * d_p1
        - km10 * k01 * k1m1
        - km11 * k0m1 * k10
        + km11 * k1m1 * d_0;
    Ok(QuadraticComplex { c0, c1, c2 })
}

/// Quadratic-in-`a1` expansion of the 2x2 antiperiodic truncation determinant
/// (halfwidth-1 window, indices {-1, 0}).
pub fn antiperiodic_2x2_coeffs<T: Real>(
    block: &FourierBlock<T>,
    a0: T,
) -> Result<QuadraticComplex<T>> {
    if block.window != HarmonicWindow::antiperiodic(1) {
        return Err(Error::Invalid(
            "antiperiodic 2x2 coefficients need a halfwidth-1 antiperiodic block".into(),
        ));
    }
    let a0c = Complex::new(a0, T::zero());
    let half_theta = block.theta / T::of(2.0);
    let d_m1 = block.get(-1, -1) + freq_term(block.gamma, -half_theta) - a0c;
    let d_0 = block.get(0, 0) + freq_term(block.gamma, half_theta) - a0c;
    let km10 = block.get(-1, 0);
    let k0m1 = block.get(0, -1);
    Ok(QuadraticComplex {
        c0: d_m1 * d_0 - km10 * k0m1,
        c1: (km10 + k0m1) * T::of(0.5),
        c2: Complex::new(-T::of(0.25), T::zero()),
    })
}

/// Quasi-static resonance value `a0* = omega'^2 + K00(theta, i omega')` with
/// its admissibility flag (`|Im| <= tol`).
pub fn quasi_static_a0<T: Real>(block: &FourierBlock<T>, tol: T) -> Result<(Complex<T>, bool)> {
    if block.mode() != Mode::Periodic {
        return Err(Error::Invalid(
            "quasi-static values use the periodic family".into(),
        ));
    }
    if block.gamma.re != T::zero() {
        return Err(Error::Invalid(
            "quasi-static values need gamma = i omega'".into(),
        ));
    }
    let omega = block.gamma.im;
    let v = Complex::new(omega * omega, T::zero()) + block.get(0, 0);
    Ok((v, v.im.abs() <= tol))
}

/// How a quasi-static frequency estimate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrequencyMethod {
    /// Biquadratic truncation of the sine-transform series `A0 - A1 w^2 + A2 w^4`.
    SeriesBiquadratic,
    /// Sign-change scan of the sine transform of the lag average.
    SineTransformScan,
}

/// Quasi-static frequencies: `omega' > 0` at which the sine transform of the
/// lag average vanishes, so the quasi-static value is real.
///
/// Both the series (biquadratic) approximation and a direct scan over
/// `(0, omega_max]` are returned, labeled by method.
pub fn quasi_static_frequencies<T: Real>(
    kernel: &MemoryKernel<T>,
    omega_max: T,
    grid: usize,
) -> Result<Vec<(T, FrequencyMethod)>> {
    let mut out = Vec::new();
    let a = kernel.moments(2)?;
    let eps = T::of(1e-14);
    let scale = a[0].abs().max(a[1].abs()).max(a[2].abs());
    if scale > T::zero() {
        // A0 - A1 w^2 + A2 w^4 = 0 in w^2.
        let squares = real_quadratic_roots(a[0], -a[1], a[2], eps);
        for w2 in squares {
            if w2 > T::zero() {
                out.push((w2.sqrt(), FrequencyMethod::SeriesBiquadratic));
            }
        }
    }

    let sine_transform = |omega: T| -> T {
        match kernel.as_expsum() {
            Some(exp) => exp
                .terms
                .iter()
                .map(|t| kernel.period() * t.amplitude * omega / (t.rate * t.rate + omega * omega))
                .fold(T::zero(), |x, y| x + y),
            None => {
                let decay = kernel.envelope().decay;
                let cut = T::of(60.0) / decay;
                crate::kernels::simpson(T::zero(), cut, 4096, |xi| {
                    kernel.lag_average(xi).unwrap_or_else(|_| T::zero()) * (omega * xi).sin()
                })
            }
        }
    };
    if grid >= 2 && omega_max > T::zero() {
        let lo = omega_max / T::of(grid as f64) * T::of(0.5);
        let grid_pts = linspace(lo, omega_max, grid);
        let samples: Vec<T> = grid_pts.iter().map(|&w| sine_transform(w)).collect();
        let magnitude = samples.iter().fold(T::zero(), |m, s| m.max(s.abs()));
        // An identically vanishing transform (zero kernel) has no isolated roots.
        if magnitude > T::of(1e-14) {
            for (a, b) in sign_change_brackets(sine_transform, &grid_pts) {
                let root = if a == b {
                    a
                } else {
                    bisect(&sine_transform, a, b, 100)
                };
                if !out
                    .iter()
                    .any(|(w, m)| *m == FrequencyMethod::SineTransformScan
                        && (*w - root).abs() <= T::of(1e-9) * (T::one() + root.abs()))
                {
                    out.push((root, FrequencyMethod::SineTransformScan));
                }
            }
        }
    }
    Ok(out)
}

/// Antiperiodic halfwidth-1 tongue roots.
#[derive(Clone, Debug)]
pub struct AntiperiodicTongue<T> {
    pub roots: Vec<T>,
    /// Discriminant of the closed form at `gamma = 0`; `None` on the general
    /// (complex-shift) pathway. A negative value flags the empty root set.
    pub discriminant: Option<T>,
}

/// Real modulation amplitudes solving the 2x2 antiperiodic truncation.
///
/// At exactly `gamma = 0` the closed form
/// `a1/2 = Re z +- sqrt(|a0 - theta^2/4 - K~(-1,-1)|^2 - (Im z)^2)`,
/// `z = K~(0,-1)`, applies; a negative radicand yields an empty (flagged)
/// root set. Elsewhere the complex quadratic goes through the real-root
/// criterion.
pub fn antiperiodic_2x2_roots<T: Real>(
    block: &FourierBlock<T>,
    a0: T,
    tol: T,
) -> Result<AntiperiodicTongue<T>> {
    if block.window != HarmonicWindow::antiperiodic(1) {
        return Err(Error::Invalid(
            "antiperiodic tongue roots need a halfwidth-1 antiperiodic block".into(),
        ));
    }
    if block.gamma.re == T::zero() && block.gamma.im == T::zero() {
        let quarter = T::of(0.25);
        let z = block.get(0, -1);
        let center = a0 - quarter * block.theta * block.theta;
        let radius = (Complex::new(center, T::zero()) - block.get(-1, -1)).norm();
        let disc = radius * radius - z.im * z.im;
        if disc < T::zero() {
            return Ok(AntiperiodicTongue {
                roots: Vec::new(),
                discriminant: Some(disc),
            });
        }
        let s = disc.sqrt();
        let two = T::of(2.0);
        let mut roots = vec![two * (z.re - s), two * (z.re + s)];
        roots.dedup_by(|a, b| (*a - *b).abs() <= tol * (T::one() + a.abs()));
        return Ok(AntiperiodicTongue {
            roots,
            discriminant: Some(disc),
        });
    }
    let q = antiperiodic_2x2_coeffs(block, a0)?;
    let report = real_root_test(&q, tol);
    Ok(AntiperiodicTongue {
        roots: report.roots,
        discriminant: None,
    })
}

/// Resultant of two real polynomials (ascending coefficients), with the
/// convention `Res(p, q) = lc(q)^deg(p) * prod_j p(beta_j)` over the roots
/// `beta_j` of `q`; zero iff the polynomials share a root.
pub fn sylvester_resultant<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    let trim = |c: &[T]| -> Vec<T> {
        let mut v = c.to_vec();
        while v.len() > 1 && *v.last().unwrap() == T::zero() {
            v.pop();
        }
        v
    };
    let p = trim(p);
    let q = trim(q);
    if p.iter().all(|c| *c == T::zero()) || q.iter().all(|c| *c == T::zero()) {
        return Err(Error::Invalid("resultant of a zero polynomial".into()));
    }
    let m = p.len() - 1;
    let n = q.len() - 1;
    if m < 1 || n < 1 {
        return Err(Error::Invalid("resultant needs both degrees >= 1".into()));
    }
    // det of the Sylvester matrix with q's rows first equals the stated
    // convention (it absorbs the (-1)^(m n) of the usual Res(p, q)).
    let size = m + n;
    let mut s = RealMatrix::<T>::zeros(size);
    for r in 0..m {
        for (k, &c) in q.iter().enumerate() {
            s[(r, r + (n - k))] = c;
        }
    }
    for r in 0..n {
        for (k, &c) in p.iter().enumerate() {
            s[(m + r, r + (m - k))] = c;
        }
    }
    Ok(s.det())
}

/// Coefficient-table access for sweeps: a kernel plus quadrature policy that
/// produces blocks at requested `(mode, halfwidth, theta, gamma)`.
pub struct CoeffEngine<'a, T: Real> {
    pub kernel: &'a MemoryKernel<T>,
    pub spec: QuadratureSpec<T>,
    pub backend: Backend,
}

impl<'a, T: Real> CoeffEngine<'a, T> {
    /// Closed-form backend for exponential sums, quadrature otherwise.
    pub fn auto(kernel: &'a MemoryKernel<T>) -> Self {
        let backend = if kernel.as_expsum().is_some() {
            Backend::Closed
        } else {
            Backend::Quad
        };
        Self {
            kernel,
            spec: QuadratureSpec::default(),
            backend,
        }
    }

    pub fn block(
        &self,
        mode: Mode,
        halfwidth: usize,
        theta: T,
        gamma: Complex<T>,
    ) -> Result<FourierBlock<T>> {
        let window = match mode {
            Mode::Periodic => HarmonicWindow::periodic(halfwidth),
            Mode::Antiperiodic => HarmonicWindow::antiperiodic(halfwidth),
        };
        fourier_block(self.kernel, window, theta, gamma, &self.spec, self.backend)
    }

    pub fn k00(&self, theta: T, gamma: Complex<T>) -> Result<Complex<T>> {
        Ok(self.block(Mode::Periodic, 0, theta, gamma)?.get(0, 0))
    }
}

/// First-order (1x1) real-multiplier side system: frequencies where
/// `K00(theta, 0) = K00(theta, -lambda)`, with the quasi-static `a0*`.
#[derive(Clone, Debug)]
pub enum SideFirstOrder<T> {
    /// The defining equation is identically satisfied on the scanned grid
    /// (e.g. the zero kernel); `a0_star` is the common quasi-static value.
    Indeterminate { a0_star: T },
    /// `(theta, a0_star, residual)` triples.
    Roots(Vec<(T, T, T)>),
}

pub fn side_real_case_first_order<T: Real>(
    engine: &CoeffEngine<T>,
    lambda: T,
    theta_grid: &[T],
    tol: T,
) -> Result<SideFirstOrder<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::Invalid("lambda must be positive".into()));
    }
    if theta_grid.len() < 2 {
        return Err(Error::Invalid("theta grid needs at least two points".into()));
    }
    let gap = |theta: T| -> Result<T> {
        let k0 = engine.k00(theta, Complex::new(T::zero(), T::zero()))?;
        let kl = engine.k00(theta, Complex::new(-lambda, T::zero()))?;
        Ok((k0 - kl).re)
    };
    let mut samples = Vec::with_capacity(theta_grid.len());
    let mut scale = T::zero();
    for &theta in theta_grid {
        let g = gap(theta)?;
        let k0 = engine.k00(theta, Complex::new(T::zero(), T::zero()))?.norm();
        scale = scale.max(k0);
        samples.push(g);
    }
    let flat = samples
        .iter()
        .all(|g| g.abs() <= T::of(1e-12) * scale.max(T::one()));
    if flat {
        let a0 = engine
            .k00(theta_grid[0], Complex::new(T::zero(), T::zero()))?
            .re;
        return Ok(SideFirstOrder::Indeterminate { a0_star: a0 });
    }
    let f = |theta: T| gap(theta).unwrap_or_else(|_| T::nan());
    let mut out = Vec::new();
    for (a, b) in sign_change_brackets(f, theta_grid) {
        let root = if a == b { a } else { bisect(f, a, b, 100) };
        let resid = gap(root)?.abs();
        if resid <= tol * scale.max(T::one()) {
            let a0 = engine.k00(root, Complex::new(T::zero(), T::zero()))?.re;
            out.push((root, a0, resid));
        }
    }
    Ok(SideFirstOrder::Roots(out))
}

/// Locates zeros of a real function of theta from both sign changes and
/// near-zero local minima (even-multiplicity crossings).
fn resultant_zeros<T: Real>(
    f: &dyn Fn(T) -> T,
    theta_grid: &[T],
    accept: &dyn Fn(T, T) -> bool,
) -> Vec<T> {
    let samples: Vec<T> = theta_grid.iter().map(|&t| f(t)).collect();
    let mut roots = Vec::new();
    for (a, b) in sign_change_brackets(f, theta_grid) {
        let r = if a == b { a } else { bisect(f, a, b, 100) };
        roots.push(r);
    }
    for i in local_min_indices(&samples) {
        let (lo, hi) = (theta_grid[i - 1], theta_grid[i + 1]);
        let (t, v) = golden_min(|t| f(t).abs(), lo, hi, 120);
        if accept(t, v) && !roots.iter().any(|r| (*r - t).abs() <= (hi - lo)) {
            roots.push(t);
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    roots.dedup_by(|x, y| (*x - *y).abs() <= T::of(1e-9) * (T::one() + y.abs()));
    roots
}

/// Common real roots of two real quadratics, with degenerate (identically
/// vanishing) polynomials treated as "every root".
fn common_real_roots<T: Real>(pa: [T; 3], pb: [T; 3], match_tol: T) -> Vec<T> {
    let eps = T::of(1e-12);
    let scale_a = pa.iter().fold(T::zero(), |m, c| m.max(c.abs()));
    let scale_b = pb.iter().fold(T::zero(), |m, c| m.max(c.abs()));
    let degenerate_a = scale_a <= eps;
    let degenerate_b = scale_b <= eps;
    if degenerate_a && degenerate_b {
        return Vec::new();
    }
    if degenerate_a {
        return real_quadratic_roots(pb[0], pb[1], pb[2], eps);
    }
    if degenerate_b {
        return real_quadratic_roots(pa[0], pa[1], pa[2], eps);
    }
    let ra = real_quadratic_roots(pa[0], pa[1], pa[2], eps);
    let rb = real_quadratic_roots(pb[0], pb[1], pb[2], eps);
    let mut out = Vec::new();
    for &x in &ra {
        for &y in &rb {
            if (x - y).abs() <= match_tol * (T::one() + x.abs()) {
                out.push((x + y) / T::of(2.0));
            }
        }
    }
    out.dedup_by(|x, y| (*x - *y).abs() <= T::of(1e-9) * (T::one() + y.abs()));
    out
}

/// Third-order real-multiplier side system: for fixed `(a0, lambda)`, scans
/// the resultant in `a1` of the two 3x3 periodic quadratics at shifts `0` and
/// `-lambda` over the theta grid, refines the zero crossings, and returns the
/// common real `a1` roots that re-verify both determinants.
pub fn side_real_case_third_order<T: Real>(
    engine: &CoeffEngine<T>,
    a0: T,
    lambda: T,
    theta_grid: &[T],
    tol: T,
) -> Result<BoundaryBranch<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::Invalid("lambda must be positive".into()));
    }
    if theta_grid.len() < 2 {
        return Err(Error::Invalid("theta grid needs at least two points".into()));
    }
    let realify_eps = T::of(1e-7);
    let pair = |theta: T| -> Result<([T; 3], [T; 3])> {
        let b0 = engine.block(Mode::Periodic, 1, theta, Complex::new(T::zero(), T::zero()))?;
        let bl = engine.block(Mode::Periodic, 1, theta, Complex::new(-lambda, T::zero()))?;
        let p0 = periodic_3x3_coeffs(&b0, a0)?.realify(realify_eps)?;
        let pl = periodic_3x3_coeffs(&bl, a0)?.realify(realify_eps)?;
        Ok((p0, pl))
    };
    // Fail fast on divergence (lambda >= mu) before scanning.
    pair(theta_grid[0])?;

    let res_at = |theta: T| -> T {
        match pair(theta) {
            Ok((p0, pl)) => sylvester_resultant(&p0, &pl).unwrap_or_else(|_| T::nan()),
            Err(_) => T::nan(),
        }
    };
    let res_scale = |theta: T| -> T {
        match pair(theta) {
            Ok((p0, pl)) => {
                let s0 = p0.iter().fold(T::zero(), |m, c| m.max(c.abs()));
                let sl = pl.iter().fold(T::zero(), |m, c| m.max(c.abs()));
                (s0 * sl) * (s0 * sl)
            }
            Err(_) => T::one(),
        }
    };
    let accept = |t: T, v: T| v <= tol * res_scale(t).max(T::one());
    let thetas = resultant_zeros(&res_at, theta_grid, &accept);

    let mut points = Vec::new();
    for theta in thetas {
        let (p0, pl) = pair(theta)?;
        for a1 in common_real_roots(p0, pl, T::of(1e-6)) {
            let b0 = engine.block(Mode::Periodic, 1, theta, Complex::new(T::zero(), T::zero()))?;
            let bl = engine.block(Mode::Periodic, 1, theta, Complex::new(-lambda, T::zero()))?;
            let r0 = scaled_det_residual(&truncation_matrix(&b0, a0, a1));
            let rl = scaled_det_residual(&truncation_matrix(&bl, a0, a1));
            let resid = r0.max(rl);
            if resid <= tol {
                points.push(BoundaryPoint {
                    theta,
                    a0,
                    a1,
                    omega: T::zero(),
                    lambda,
                    residual: resid,
                });
            }
        }
    }
    Ok(BoundaryBranch {
        kind: BranchKind::SideAc,
        truncation_order: 3,
        kernel: engine.kernel.label(),
        points,
    })
}

/// Damping-rate mesh for real-multiplier side sweeps: `lambda = tan(phi)`
/// on a uniform `phi` mesh over the open interval `(0, pi/2)`, covering
/// `lambda in (0, inf)` with `count` points.
pub fn tan_lambda_mesh<T: Real>(count: usize) -> Vec<T> {
    let half_pi = T::FRAC_PI_2();
    (1..=count)
        .map(|k| (half_pi * T::of(k as f64) / T::of((count + 1) as f64)).tan())
        .collect()
}

/// Real-axis crossings of the circle `|a1/2 - z| = R`, as `a1` values.
fn circle_axis_crossings<T: Real>(z: Complex<T>, radius: T) -> Vec<T> {
    let disc = radius * radius - z.im * z.im;
    if disc < T::zero() {
        return Vec::new();
    }
    let s = disc.sqrt();
    let two = T::of(2.0);
    vec![two * (z.re - s), two * (z.re + s)]
}

/// Antiperiodic real-multiplier side condition at one theta: each shift
/// `gamma in {0, -lambda}` defines a circle with center `K~(0,-1)` and radius
/// `|a0 - theta^2/4 - K~(-1,-1)|`; returns the real `a1` values where both
/// circles cross the real axis at a common point.
pub fn antiperiodic_circles<T: Real>(
    engine: &CoeffEngine<T>,
    a0: T,
    lambda: T,
    theta: T,
    tol: T,
) -> Result<Vec<T>> {
    if lambda < T::zero() {
        return Err(Error::Invalid("lambda must be nonnegative".into()));
    }
    let quarter = T::of(0.25);
    let center_term = a0 - quarter * theta * theta;
    let mut crossing_sets = Vec::new();
    for gamma_re in [T::zero(), -lambda] {
        let block = engine.block(
            Mode::Antiperiodic,
            1,
            theta,
            Complex::new(gamma_re, T::zero()),
        )?;
        let z = block.get(0, -1);
        let radius = (Complex::new(center_term, T::zero()) - block.get(-1, -1)).norm();
        crossing_sets.push(circle_axis_crossings(z, radius));
        if lambda == T::zero() {
            // Both circles coincide; no second evaluation needed.
            crossing_sets.push(crossing_sets[0].clone());
            break;
        }
    }
    let mut out = Vec::new();
    for &x in &crossing_sets[0] {
        for &y in &crossing_sets[1] {
            if (x - y).abs() <= tol * (T::one() + x.abs()) {
                out.push((x + y) / T::of(2.0));
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out.dedup_by(|a, b| (*a - *b).abs() <= T::of(1e-9) * (T::one() + b.abs()));
    Ok(out)
}

/// Periodic vertex solutions from the 3x3 truncation at `gamma = 0`.
#[derive(Clone, Debug)]
pub struct VertexCRoots<T> {
    pub roots: Vec<T>,
    /// Leading coefficient `2 Re(K(-1,1) - (K(1,1) + theta^2 - a0))` of the
    /// quadratic in `a1/2`; the equation drops to first degree where it
    /// vanishes.
    pub leading_coefficient: T,
    pub degree_change: bool,
}

pub fn vertex_c_3x3<T: Real>(block: &FourierBlock<T>, a0: T, tol: T) -> Result<VertexCRoots<T>> {
    if block.gamma.re != T::zero() || block.gamma.im != T::zero() {
        return Err(Error::Invalid("periodic vertex roots need gamma = 0".into()));
    }
    let q = periodic_3x3_coeffs(block, a0)?;
    let [c0, c1, c2] = q.realify(T::of(1e-7))?;
    let leading = -T::of(4.0) * c2;
    let scale = q.coefficient_scale();
    let degree_change = leading.abs() <= tol * scale.max(T::one());
    let roots = real_quadratic_roots(c0, c1, c2, T::of(1e-12));
    Ok(VertexCRoots {
        roots,
        leading_coefficient: leading,
        degree_change,
    })
}

/// Vertex A: coexistence of a periodic solution (3x3 truncation) and an
/// antiperiodic one (2x2 truncation), both at `gamma = 0`. Scans the
/// resultant in `a1` over the theta grid and returns `(theta, a1, residual)`
/// points satisfying both determinantal equations.
pub fn vertex_a_solve<T: Real>(
    engine: &CoeffEngine<T>,
    a0: T,
    theta_grid: &[T],
    tol: T,
) -> Result<Vec<(T, T, T)>> {
    if theta_grid.len() < 2 {
        return Err(Error::Invalid("theta grid needs at least two points".into()));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let realify_eps = T::of(1e-7);
    let pair = |theta: T| -> Result<([T; 3], [T; 3])> {
        let bp = engine.block(Mode::Periodic, 1, theta, zero)?;
        let ba = engine.block(Mode::Antiperiodic, 1, theta, zero)?;
        let p = periodic_3x3_coeffs(&bp, a0)?.realify(realify_eps)?;
        let r = antiperiodic_2x2_coeffs(&ba, a0)?.realify(realify_eps)?;
        Ok((p, r))
    };
    pair(theta_grid[0])?;
    let res_at = |theta: T| -> T {
        match pair(theta) {
            Ok((p, r)) => sylvester_resultant(&p, &r).unwrap_or_else(|_| T::nan()),
            Err(_) => T::nan(),
        }
    };
    let res_scale = |theta: T| -> T {
        match pair(theta) {
            Ok((p, r)) => {
                let sp = p.iter().fold(T::zero(), |m, c| m.max(c.abs()));
                let sr = r.iter().fold(T::zero(), |m, c| m.max(c.abs()));
                (sp * sr) * (sp * sr)
            }
            Err(_) => T::one(),
        }
    };
    let accept = |t: T, v: T| v <= tol.sqrt() * res_scale(t).max(T::one());
    let thetas = resultant_zeros(&res_at, theta_grid, &accept);

    let mut out = Vec::new();
    for theta in thetas {
        let (p, r) = pair(theta)?;
        for a1 in common_real_roots(p, r, T::of(1e-5)) {
            let bp = engine.block(Mode::Periodic, 1, theta, zero)?;
            let ba = engine.block(Mode::Antiperiodic, 1, theta, zero)?;
            let rp = scaled_det_residual(&truncation_matrix(&bp, a0, a1));
            let ra = scaled_det_residual(&truncation_matrix(&ba, a0, a1));
            let resid = rp.max(ra);
            if resid <= tol {
                out.push((theta, a1, resid));
            }
        }
    }
    Ok(out)
}

/// Closed-form periodic-vertex curve for the single-exponential kernel
/// `c exp(-mu (t-s))`.
#[derive(Clone, Debug)]
pub struct ExpPeriodicClosed<T> {
    /// `a1^2 = 2 (c/mu - a0) [theta^2 - a0 + (c^2 + c mu (theta^2-a0)) / den]`.
    pub a1_squared: T,
    pub admissible: bool,
    /// Positive roots of the denominator in the variable `theta^2`
    /// (vertical asymptotes of the curve).
    pub asymptotes: Vec<T>,
}

/// Denominator `c mu + (u - a0)(mu^2 + u)` at `u = theta^2`.
pub fn exp_periodic_denominator<T: Real>(c: T, mu: T, a0: T, u: T) -> T {
    c * mu + (u - a0) * (mu * mu + u)
}

fn require_positive_model<T: Real>(c: T, mu: T) -> Result<()> {
    if !(c > T::zero()) || !(mu > T::zero()) {
        return Err(Error::Domain(
            "exponential-model closed forms require c > 0 and mu > 0".into(),
        ));
    }
    Ok(())
}

pub fn exp_periodic_closed<T: Real>(c: T, mu: T, a0: T, theta: T) -> Result<ExpPeriodicClosed<T>> {
    require_positive_model(c, mu)?;
    let u = theta * theta;
    let den = exp_periodic_denominator(c, mu, a0, u);
    let a1_squared = T::of(2.0) * (c / mu - a0) * ((u - a0) + (c * c + c * mu * (u - a0)) / den);

    // Asymptotes: u^2 + (mu^2 - a0) u + (c mu - a0 mu^2) = 0, refined by
    // Newton steps on the denominator itself.
    let mut asymptotes = Vec::new();
    for root in real_quadratic_roots(c * mu - a0 * mu * mu, mu * mu - a0, T::one(), T::of(1e-14)) {
        if root > T::zero() {
            let mut u_star = root;
            for _ in 0..3 {
                let f = exp_periodic_denominator(c, mu, a0, u_star);
                let df = (mu * mu + u_star) + (u_star - a0);
                if df != T::zero() {
                    u_star = u_star - f / df;
                }
            }
            asymptotes.push(u_star);
        }
    }
    Ok(ExpPeriodicClosed {
        a1_squared,
        admissible: a1_squared >= T::zero(),
        asymptotes,
    })
}

/// Truncation order of the antiperiodic closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AntiperiodicOrder {
    Two,
    Four,
}

/// Antiperiodic tongue `a1^2` values for the single-exponential model.
///
/// Order two returns one value; order four returns the (0 or 2) real roots of
/// the quadratic in `a1^2`, ascending. Whenever the order-four equation has
/// real roots they are both positive.
pub fn exp_antiperiodic_closed<T: Real>(
    c: T,
    mu: T,
    a0: T,
    theta: T,
    order: AntiperiodicOrder,
) -> Result<Vec<T>> {
    require_positive_model(c, mu)?;
    let quarter = T::of(0.25);
    let nu1 = mu * mu + quarter * theta * theta;
    let e1 = a0 - quarter * theta * theta - c * mu / nu1;
    let f1 = c * theta / (T::of(2.0) * nu1);
    match order {
        AntiperiodicOrder::Two => Ok(vec![T::of(4.0) * (e1 * e1 + f1 * f1)]),
        AntiperiodicOrder::Four => {
            let nine_quarters = T::of(2.25);
            let nu3 = mu * mu + nine_quarters * theta * theta;
            let e3 = a0 - nine_quarters * theta * theta - c * mu / nu3;
            let f3 = T::of(3.0) * c * theta / (T::of(2.0) * nu3);
            let p = e3 * e3 + f3 * f3 + T::of(2.0) * e1 * e3 - T::of(2.0) * f1 * f3;
            let q = (e1 * e1 + f1 * f1) * (e3 * e3 + f3 * f3);
            // In y = a1^2: y^2 - 4 P y + 16 Q = 0.
            let disc = T::of(4.0) * p * p - T::of(16.0) * q;
            if disc < T::zero() {
                return Ok(Vec::new());
            }
            let s = disc.sqrt();
            let two = T::of(2.0);
            Ok(vec![two * p - s, two * p + s])
        }
    }
}

/// Which family of the Strutt chart a branch belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    QuasiStatic,
    Periodic,
    Antiperiodic,
    SideAb,
    SideAc,
    VertexA,
    VertexB,
    VertexC,
}

impl std::fmt::Display for BranchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BranchKind::QuasiStatic => "quasistatic",
            BranchKind::Periodic => "periodic",
            BranchKind::Antiperiodic => "antiperiodic",
            BranchKind::SideAb => "sideAB",
            BranchKind::SideAc => "sideAC",
            BranchKind::VertexA => "vertexA",
            BranchKind::VertexB => "vertexB",
            BranchKind::VertexC => "vertexC",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for BranchKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "quasistatic" => BranchKind::QuasiStatic,
            "periodic" => BranchKind::Periodic,
            "antiperiodic" => BranchKind::Antiperiodic,
            "sideAB" | "sideab" => BranchKind::SideAb,
            "sideAC" | "sideac" => BranchKind::SideAc,
            "vertexA" | "vertexa" => BranchKind::VertexA,
            "vertexB" | "vertexb" => BranchKind::VertexB,
            "vertexC" | "vertexc" => BranchKind::VertexC,
            other => {
                return Err(Error::Invalid(format!("unknown branch kind '{other}'")));
            }
        })
    }
}

/// One point of a boundary branch; coordinates not used by the branch are zero.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryPoint<T> {
    pub theta: T,
    pub a0: T,
    pub a1: T,
    pub omega: T,
    pub lambda: T,
    /// Scaled defect of the point's defining equation.
    pub residual: T,
}

/// A swept boundary branch with its metadata.
#[derive(Clone, Debug)]
pub struct BoundaryBranch<T> {
    pub kind: BranchKind,
    pub truncation_order: usize,
    pub kernel: String,
    pub points: Vec<BoundaryPoint<T>>,
}

/// Quasi-static branch: admissible `a0*(theta, omega')` over an omega grid.
pub fn branch_quasistatic<T: Real>(
    engine: &CoeffEngine<T>,
    theta: T,
    omega_grid: &[T],
    tol: T,
) -> Result<BoundaryBranch<T>> {
    let mut points = Vec::new();
    for &omega in omega_grid {
        let block = engine.block(Mode::Periodic, 0, theta, Complex::new(T::zero(), omega))?;
        let (value, admissible) = quasi_static_a0(&block, tol)?;
        if admissible {
            points.push(BoundaryPoint {
                theta,
                a0: value.re,
                a1: T::zero(),
                omega,
                lambda: T::zero(),
                residual: value.im.abs(),
            });
        }
    }
    Ok(BoundaryBranch {
        kind: BranchKind::QuasiStatic,
        truncation_order: 1,
        kernel: engine.kernel.label(),
        points,
    })
}

/// Shifts `omega` at which a complex quadratic family admits a real root,
/// located from the normalized elimination quantity `Q1 / scale^4` over the
/// grid (sign changes plus even-order touch points), each candidate confirmed
/// by root extraction.
fn admissible_shifts<T: Real>(
    quad_at: &dyn Fn(T) -> Result<QuadraticComplex<T>>,
    omega_grid: &[T],
    tol: T,
) -> Result<Vec<(T, Vec<T>)>> {
    // Fail fast so kernel errors are not swallowed by the scan.
    quad_at(omega_grid[0])?;
    let q1_norm = |omega: T| -> T {
        match quad_at(omega) {
            Ok(q) => {
                let s = q.coefficient_scale();
                real_root_test(&q, tol).q1 / (s * s * s * s)
            }
            Err(_) => T::nan(),
        }
    };
    let accept = |_omega: T, v: T| v <= tol;
    let mut out = Vec::new();
    for omega in resultant_zeros(&q1_norm, omega_grid, &accept) {
        let q = quad_at(omega)?;
        let report = real_root_test(&q, tol);
        if !report.roots.is_empty() {
            out.push((omega, report.roots));
        }
    }
    Ok(out)
}

/// Periodic 3x3 branch. A single-element `omega_grid` pins the shift and
/// reports whatever real roots exist there; a longer grid is scanned per
/// theta for the admissible shifts where the complex quadratic acquires a
/// real root.
pub fn branch_periodic_3x3<T: Real>(
    engine: &CoeffEngine<T>,
    a0: T,
    omega_grid: &[T],
    theta_grid: &[T],
    tol: T,
) -> Result<BoundaryBranch<T>> {
    if omega_grid.is_empty() {
        return Err(Error::Invalid("omega grid must be nonempty".into()));
    }
    let mut points = Vec::new();
    for &theta in theta_grid {
        let quad_at = |omega: T| -> Result<QuadraticComplex<T>> {
            let block = engine.block(Mode::Periodic, 1, theta, Complex::new(T::zero(), omega))?;
            periodic_3x3_coeffs(&block, a0)
        };
        let found: Vec<(T, Vec<T>)> = if omega_grid.len() == 1 {
            let roots = real_root_test(&quad_at(omega_grid[0])?, tol).roots;
            vec![(omega_grid[0], roots)]
        } else {
            admissible_shifts(&quad_at, omega_grid, tol)?
        };
        for (omega, roots) in found {
            let block =
                engine.block(Mode::Periodic, 1, theta, Complex::new(T::zero(), omega))?;
            for a1 in roots {
                let resid = scaled_det_residual(&truncation_matrix(&block, a0, a1));
                if resid <= tol {
                    points.push(BoundaryPoint {
                        theta,
                        a0,
                        a1,
                        omega,
                        lambda: T::zero(),
                        residual: resid,
                    });
                }
            }
        }
    }
    Ok(BoundaryBranch {
        kind: BranchKind::Periodic,
        truncation_order: 3,
        kernel: engine.kernel.label(),
        points,
    })
}

/// Antiperiodic 2x2 branch, with the same shift semantics as the periodic
/// sweep; the single shift `omega = 0` is the vertex-B tongue (closed form).
pub fn branch_antiperiodic_2x2<T: Real>(
    engine: &CoeffEngine<T>,
    a0: T,
    omega_grid: &[T],
    theta_grid: &[T],
    tol: T,
) -> Result<BoundaryBranch<T>> {
    if omega_grid.is_empty() {
        return Err(Error::Invalid("omega grid must be nonempty".into()));
    }
    let pinned_zero = omega_grid.len() == 1 && omega_grid[0] == T::zero();
    let kind = if pinned_zero {
        BranchKind::VertexB
    } else {
        BranchKind::Antiperiodic
    };
    let mut points = Vec::new();
    for &theta in theta_grid {
        let found: Vec<(T, Vec<T>)> = if omega_grid.len() == 1 {
            let omega = omega_grid[0];
            let block =
                engine.block(Mode::Antiperiodic, 1, theta, Complex::new(T::zero(), omega))?;
            let tongue = antiperiodic_2x2_roots(&block, a0, tol)?;
            vec![(omega, tongue.roots)]
        } else {
            let quad_at = |omega: T| -> Result<QuadraticComplex<T>> {
                let block = engine.block(
                    Mode::Antiperiodic,
                    1,
                    theta,
                    Complex::new(T::zero(), omega),
                )?;
                antiperiodic_2x2_coeffs(&block, a0)
            };
            admissible_shifts(&quad_at, omega_grid, tol)?
        };
        for (omega, roots) in found {
            let block =
                engine.block(Mode::Antiperiodic, 1, theta, Complex::new(T::zero(), omega))?;
            for a1 in roots {
                let resid = scaled_det_residual(&truncation_matrix(&block, a0, a1));
                if resid <= tol {
                    points.push(BoundaryPoint {
                        theta,
                        a0,
                        a1,
                        omega,
                        lambda: T::zero(),
                        residual: resid,
                    });
                }
            }
        }
    }
    Ok(BoundaryBranch {
        kind,
        truncation_order: 2,
        kernel: engine.kernel.label(),
        points,
    })
}

/// Vertex-C branch: periodic 3x3 roots at `gamma = 0` over a theta grid.
pub fn branch_vertex_c<T: Real>(
    engine: &CoeffEngine<T>,
    a0: T,
    theta_grid: &[T],
    tol: T,
) -> Result<BoundaryBranch<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut points = Vec::new();
    for &theta in theta_grid {
        let block = engine.block(Mode::Periodic, 1, theta, zero)?;
        let v = vertex_c_3x3(&block, a0, tol)?;
        for a1 in v.roots {
            let resid = scaled_det_residual(&truncation_matrix(&block, a0, a1));
            points.push(BoundaryPoint {
                theta,
                a0,
                a1,
                omega: T::zero(),
                lambda: T::zero(),
                residual: resid,
            });
        }
    }
    Ok(BoundaryBranch {
        kind: BranchKind::VertexC,
        truncation_order: 3,
        kernel: engine.kernel.label(),
        points,
    })
}

/// Side-AB branch (antiperiodic pair). For `lambda > 0` a common real-axis
/// intersection of the two circles is a codimension-one condition, so the
/// sweep scans each pairing of axis crossings for sign changes in theta and
/// refines them by bisection; at `lambda = 0` the circles coincide and every
/// theta contributes its crossings directly.
pub fn branch_side_ab<T: Real>(
    engine: &CoeffEngine<T>,
    a0: T,
    lambda: T,
    theta_grid: &[T],
    tol: T,
) -> Result<BoundaryBranch<T>> {
    if lambda < T::zero() {
        return Err(Error::Invalid("lambda must be nonnegative".into()));
    }
    let circle = |theta: T, gamma_re: T| -> Result<(Complex<T>, T)> {
        let block = engine.block(
            Mode::Antiperiodic,
            1,
            theta,
            Complex::new(gamma_re, T::zero()),
        )?;
        let z = block.get(0, -1);
        let center = a0 - T::of(0.25) * theta * theta;
        let radius = (Complex::new(center, T::zero()) - block.get(-1, -1)).norm();
        Ok((z, radius))
    };
    let defect = |theta: T, a1: T| -> Result<T> {
        let mut worst = T::zero();
        for gamma_re in [T::zero(), -lambda] {
            let (z, radius) = circle(theta, gamma_re)?;
            let d = ((Complex::new(a1 / T::of(2.0), T::zero()) - z).norm() - radius).abs();
            worst = worst.max(d);
        }
        Ok(worst)
    };
    let mut points: Vec<BoundaryPoint<T>> = Vec::new();
    let mut push = |theta: T, a1: T, residual: T| {
        let dup = points.iter().any(|p| {
            (p.theta - theta).abs() <= T::of(1e-9) * (T::one() + theta.abs())
                && (p.a1 - a1).abs() <= T::of(1e-9) * (T::one() + a1.abs())
        });
        if !dup {
            points.push(BoundaryPoint {
                theta,
                a0,
                a1,
                omega: T::zero(),
                lambda,
                residual,
            });
        }
    };

    if lambda == T::zero() {
        for &theta in theta_grid {
            for a1 in antiperiodic_circles(engine, a0, lambda, theta, tol)? {
                push(theta, a1, defect(theta, a1)?);
            }
        }
    } else {
        // Fail fast on divergence (lambda >= mu) before scanning.
        circle(theta_grid[0], -lambda)?;
        let crossing = |theta: T, gamma_re: T, upper: bool| -> T {
            let Ok((z, radius)) = circle(theta, gamma_re) else {
                return T::nan();
            };
            let disc = radius * radius - z.im * z.im;
            if disc < T::zero() {
                return T::nan();
            }
            let s = disc.sqrt();
            T::of(2.0) * if upper { z.re + s } else { z.re - s }
        };
        for s0 in [false, true] {
            for s1 in [false, true] {
                let gap = |theta: T| crossing(theta, T::zero(), s0) - crossing(theta, -lambda, s1);
                for (a, b) in sign_change_brackets(gap, theta_grid) {
                    let theta = if a == b { a } else { bisect(gap, a, b, 100) };
                    let x0 = crossing(theta, T::zero(), s0);
                    let x1 = crossing(theta, -lambda, s1);
                    if !x0.is_finite() || !x1.is_finite() {
                        continue;
                    }
                    let a1 = (x0 + x1) / T::of(2.0);
                    let resid = defect(theta, a1)?;
                    if resid <= tol {
                        push(theta, a1, resid);
                    }
                }
            }
        }
        points.sort_by(|p, q| {
            p.theta
                .partial_cmp(&q.theta)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }
    Ok(BoundaryBranch {
        kind: BranchKind::SideAb,
        truncation_order: 2,
        kernel: engine.kernel.label(),
        points,
    })
}

/// Vertex-A branch over a theta grid.
pub fn branch_vertex_a<T: Real>(
    engine: &CoeffEngine<T>,
    a0: T,
    theta_grid: &[T],
    tol: T,
) -> Result<BoundaryBranch<T>> {
    let points = vertex_a_solve(engine, a0, theta_grid, tol)?
        .into_iter()
        .map(|(theta, a1, residual)| BoundaryPoint {
            theta,
            a0,
            a1,
            omega: T::zero(),
            lambda: T::zero(),
            residual,
        })
        .collect();
    Ok(BoundaryBranch {
        kind: BranchKind::VertexA,
        truncation_order: 3,
        kernel: engine.kernel.label(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{Envelope, TableKernel};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn czero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn engine(kernel: &MemoryKernel<f64>) -> CoeffEngine<'_, f64> {
        CoeffEngine::auto(kernel)
    }

    fn single(c: f64, mu: f64, theta: f64) -> MemoryKernel<f64> {
        MemoryKernel::expsum(2.0 * PI / theta, vec![(c, mu)]).unwrap()
    }

    /// Quadratic through f(0), f(1), f(2): an interpolation oracle kept
    /// independent of the closed-form coefficient path.
    fn fit_quadratic(f: impl Fn(f64) -> Complex64) -> QuadraticComplex<f64> {
        let f0 = f(0.0);
        let f1 = f(1.0);
        let f2 = f(2.0);
        let c2 = (f2 - 2.0 * f1 + f0) / 2.0;
        let c1 = f1 - f0 - c2;
        QuadraticComplex { c0: f0, c1, c2 }
    }

    #[test]
    fn periodic_coeffs_match_determinant_interpolation() {
        let theta = 1.1;
        let k = MemoryKernel::expsum(2.0 * PI / theta, vec![(0.8, 1.2), (-0.3, 2.4)]).unwrap();
        let eng = engine(&k);
        for gamma in [Complex64::new(0.0, 0.37), czero(), Complex64::new(-0.4, 0.0)] {
            let block = eng.block(Mode::Periodic, 1, theta, gamma).unwrap();
            let a0 = 0.6;
            let q = periodic_3x3_coeffs(&block, a0).unwrap();
            let fit = fit_quadratic(|a1| -truncation_matrix(&block, a0, a1).det());
            for (a, b) in [(q.c0, fit.c0), (q.c1, fit.c1), (q.c2, fit.c2)] {
                assert!(
                    (a - b).norm() <= 1e-10 * b.norm().max(1.0),
                    "gamma={gamma}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn periodic_coeffs_zero_kernel_leading_term() {
        let theta = 1.4;
        let omega = 0.21;
        let k = MemoryKernel::<f64>::zero(2.0 * PI / theta);
        let eng = engine(&k);
        let block = eng
            .block(Mode::Periodic, 1, theta, Complex64::new(0.0, omega))
            .unwrap();
        for a0 in [0.0, 0.5] {
            let q = periodic_3x3_coeffs(&block, a0).unwrap();
            let expect = 0.5 * (omega * omega + theta * theta - a0);
            assert!((q.c2 - Complex64::new(expect, 0.0)).norm() < 1e-13);
        }
        // Degree drop at a0 = omega^2 + theta^2.
        let q = periodic_3x3_coeffs(&block, omega * omega + theta * theta).unwrap();
        assert!(q.c2.norm() < 1e-13);
    }

    #[test]
    fn real_root_test_examples() {
        let tol = 1e-8;
        // a1^2 + 1 = 0: no real root, Q1 = 0, Q2 = -4.
        let q = QuadraticComplex {
            c0: Complex64::new(1.0, 0.0),
            c1: czero(),
            c2: Complex64::new(1.0, 0.0),
        };
        let r = real_root_test(&q, tol);
        assert!(!r.has_real_root && r.roots.is_empty());
        assert_eq!(r.q1, 0.0);
        assert_eq!(r.q2, -4.0);

        // a1^2 - 1 = 0: roots +-1, Q2 = 4.
        let q = QuadraticComplex {
            c0: Complex64::new(-1.0, 0.0),
            c1: czero(),
            c2: Complex64::new(1.0, 0.0),
        };
        let r = real_root_test(&q, tol);
        assert!(r.has_real_root);
        assert_eq!(r.roots, vec![-1.0, 1.0]);
        assert_eq!(r.q2, 4.0);

        // Planted common root at 1: C0 = -C1 - C2 with complex C1, C2.
        let c1 = Complex64::new(1.0, 1.0);
        let c2 = Complex64::new(2.0, 3.0);
        let q = QuadraticComplex { c0: -c1 - c2, c1, c2 };
        let r = real_root_test(&q, tol);
        assert!(r.q1.abs() < 1e-12);
        assert!(r.has_real_root);
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quasi_static_values() {
        let theta = 1.0;
        // Zero kernel at omega = 0: a0* = 0, admissible.
        let kz = MemoryKernel::<f64>::zero(2.0 * PI);
        let eng = engine(&kz);
        let block = eng.block(Mode::Periodic, 0, theta, czero()).unwrap();
        let (v, ok) = quasi_static_a0(&block, 1e-8).unwrap();
        assert!(ok && v.norm() < 1e-15);

        // Exponential kernel at omega = 0: a0* = c/mu, admissible.
        let k = single(0.8, 1.6, theta);
        let eng = engine(&k);
        let block = eng.block(Mode::Periodic, 0, theta, czero()).unwrap();
        let (v, ok) = quasi_static_a0(&block, 1e-8).unwrap();
        assert!(ok);
        assert!((v.re - 0.5).abs() < 1e-14);

        // omega' = 1 with (c, mu) = (1, 1): Im K00 = -1/2, inadmissible.
        let k = single(1.0, 1.0, theta);
        let eng = engine(&k);
        let block = eng
            .block(Mode::Periodic, 0, theta, Complex64::new(0.0, 1.0))
            .unwrap();
        let (v, ok) = quasi_static_a0(&block, 1e-8).unwrap();
        assert!(!ok);
        assert!((v.im + 0.5).abs() < 1e-14);
    }

    #[test]
    fn quasi_static_frequencies_examples() {
        // Single positive term: no real quasi-static frequency either way.
        let k = single(1.0, 1.0, 1.0);
        let res = quasi_static_frequencies(&k, PI, 400).unwrap();
        assert!(res.is_empty(), "{res:?}");

        // (2,2), (-1,1) with T = 1: sine transform vanishes at omega = sqrt(2).
        let k = MemoryKernel::expsum(1.0, vec![(2.0, 2.0), (-1.0, 1.0)]).unwrap();
        let res = quasi_static_frequencies(&k, PI, 400).unwrap();
        let scan: Vec<f64> = res
            .iter()
            .filter(|(_, m)| *m == FrequencyMethod::SineTransformScan)
            .map(|(w, _)| *w)
            .collect();
        assert_eq!(scan.len(), 1);
        assert!((scan[0] - 2.0f64.sqrt()).abs() < 1e-9, "{}", scan[0]);

        // Zero kernel: nothing.
        let kz = MemoryKernel::<f64>::zero(1.0);
        assert!(quasi_static_frequencies(&kz, PI, 200).unwrap().is_empty());
    }

    #[test]
    fn quasi_static_frequencies_series_labels_near_small_roots() {
        // Two signed terms place the sine-transform zero at
        // omega^2 = -(c1 mu2^2 + c2 mu1^2)/(c1 + c2) = 0.164, small enough
        // for the truncated series to produce (approximate) roots too.
        let k = MemoryKernel::expsum(1.0, vec![(1.0, 1.0), (-0.9, 0.94)]).unwrap();
        let res = quasi_static_frequencies(&k, PI, 800).unwrap();
        let scan: Vec<f64> = res
            .iter()
            .filter(|(_, m)| *m == FrequencyMethod::SineTransformScan)
            .map(|(w, _)| *w)
            .collect();
        let series: Vec<f64> = res
            .iter()
            .filter(|(_, m)| *m == FrequencyMethod::SeriesBiquadratic)
            .map(|(w, _)| *w)
            .collect();
        let exact = 0.164f64.sqrt();
        assert_eq!(scan.len(), 1);
        assert!((scan[0] - exact).abs() < 1e-9, "scan root {}", scan[0]);
        // The series is a truncation: roots exist and sit near the true zero,
        // but only to series accuracy.
        assert!(!series.is_empty());
        let best = series
            .iter()
            .map(|w| (w - exact).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 0.15, "series roots {series:?} vs {exact}");
    }

    #[test]
    fn antiperiodic_tongue_zero_kernel() {
        // a1 = +-2 (a0 - theta^2 / 4); tongue tip a1 = 0 at a0 = theta^2/4.
        let theta = 2.0;
        let k = MemoryKernel::<f64>::zero(2.0 * PI / theta);
        let eng = engine(&k);
        let block = eng.block(Mode::Antiperiodic, 1, theta, czero()).unwrap();
        let a0 = 1.7;
        let tongue = antiperiodic_2x2_roots(&block, a0, 1e-8).unwrap();
        let expect = 2.0 * (a0 - theta * theta / 4.0);
        assert_eq!(tongue.roots.len(), 2);
        assert!((tongue.roots[0] + expect).abs() < 1e-12);
        assert!((tongue.roots[1] - expect).abs() < 1e-12);

        let tip = antiperiodic_2x2_roots(&block, 1.0, 1e-8).unwrap();
        assert_eq!(tip.roots.len(), 1);
        assert!(tip.roots[0].abs() < 1e-12);
    }

    #[test]
    fn antiperiodic_tongue_exponential_value() {
        // (c, mu, a0, theta) = (1, 1, 1, 2): a1^2 = 2.
        let theta = 2.0;
        let k = single(1.0, 1.0, theta);
        let eng = engine(&k);
        let block = eng.block(Mode::Antiperiodic, 1, theta, czero()).unwrap();
        let tongue = antiperiodic_2x2_roots(&block, 1.0, 1e-8).unwrap();
        assert_eq!(tongue.roots.len(), 2);
        for r in &tongue.roots {
            assert!((r * r - 2.0).abs() < 1e-12, "root {r}");
        }
    }

    #[test]
    fn antiperiodic_tongue_negative_discriminant() {
        // A modulated table kernel with a large off-diagonal imaginary part:
        // K(t, s) = (1 + 0.9 sin(theta t)) exp(-(t-s)) makes Im K~(0,-1)
        // dominate |a0 - theta^2/4 - K~(-1,-1)| when a0 cancels the real part
        // (at small theta the modulated part wins: |Im z| ~ 0.45 vs 0.24).
        let theta = 0.5;
        let period = 2.0 * PI / theta;
        let env = Envelope {
            amplitude: 2.0,
            decay: 1.0,
            exponent: 1.0,
        };
        let table = TableKernel::from_fn(period, 64, 96, 20.0, env, |t, xi| {
            (1.0 + 0.9 * (theta * t).sin()) * (-xi).exp()
        })
        .unwrap();
        let k = MemoryKernel::Table(table);
        let eng = engine(&k);
        let block = eng.block(Mode::Antiperiodic, 1, theta, czero()).unwrap();
        let z = block.get(-1, -1);
        let a0 = theta * theta / 4.0 + z.re;
        let tongue = antiperiodic_2x2_roots(&block, a0, 1e-8).unwrap();
        assert!(tongue.roots.is_empty());
        assert!(tongue.discriminant.unwrap() < 0.0);
    }

    #[test]
    fn resultant_convention() {
        // Common root: zero.
        let r = sylvester_resultant::<f64>(&[-1.0, 0.0, 1.0], &[-1.0, 1.0]).unwrap();
        assert!(r.abs() < 1e-15);
        // p(2) = 3 with lc(q) = 1.
        let r = sylvester_resultant::<f64>(&[-1.0, 0.0, 1.0], &[-2.0, 1.0]).unwrap();
        assert!((r - 3.0).abs() < 1e-15);
        // Res(x - a, x - b) = b - a.
        let (a, b) = (1.7f64, -0.4f64);
        let r = sylvester_resultant::<f64>(&[-a, 1.0], &[-b, 1.0]).unwrap();
        assert!((r - (b - a)).abs() < 1e-15);
        // Zero polynomial rejected.
        assert!(sylvester_resultant::<f64>(&[0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn resultant_matches_root_product_on_random_quadratics() {
        let mut state = 777u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64) * 2.0 - 1.0
        };
        for _ in 0..50 {
            let p = [next(), next(), 1.0 + next().abs()];
            let q = [next(), next(), 1.0 + next().abs()];
            let res = sylvester_resultant(&p, &q).unwrap();
            let disc = q[1] * q[1] - 4.0 * q[0] * q[2];
            if disc < 0.0 {
                // Conjugate roots: lc^2 |p(beta)|^2.
                let re = -q[1] / (2.0 * q[2]);
                let im = (-disc).sqrt() / (2.0 * q[2]);
                let beta = Complex64::new(re, im);
                let pval = Complex64::new(p[0], 0.0)
                    + Complex64::new(p[1], 0.0) * beta
                    + Complex64::new(p[2], 0.0) * beta * beta;
                let expect = (pval * pval.conj()).re * q[2] * q[2];
                assert!(
                    (res - expect).abs() <= 1e-9 * expect.abs().max(1.0),
                    "{res} vs {expect}"
                );
            } else {
                let r1 = (-q[1] + disc.sqrt()) / (2.0 * q[2]);
                let r2 = (-q[1] - disc.sqrt()) / (2.0 * q[2]);
                let pv = |x: f64| p[0] + p[1] * x + p[2] * x * x;
                let expect = q[2] * q[2] * pv(r1) * pv(r2);
                assert!(
                    (res - expect).abs() <= 1e-9 * expect.abs().max(1.0),
                    "{res} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn side_first_order_exponential_has_no_roots() {
        // K00 is theta-independent for exponential sums, so the gap
        // c/mu - c/(mu - lambda) never vanishes for lambda > 0.
        let k = single(1.0, 1.0, 1.0);
        let eng = engine(&k);
        let grid = linspace(0.5, 3.0, 60);
        match side_real_case_first_order(&eng, 0.4, &grid, 1e-8).unwrap() {
            SideFirstOrder::Roots(r) => assert!(r.is_empty()),
            SideFirstOrder::Indeterminate { .. } => panic!("not indeterminate"),
        }
    }

    #[test]
    fn side_first_order_zero_kernel_indeterminate() {
        let k = MemoryKernel::<f64>::zero(2.0 * PI);
        let eng = engine(&k);
        let grid = linspace(0.5, 3.0, 40);
        match side_real_case_first_order(&eng, 0.4, &grid, 1e-8).unwrap() {
            SideFirstOrder::Indeterminate { a0_star } => assert_eq!(a0_star, 0.0),
            SideFirstOrder::Roots(_) => panic!("expected indeterminate marker"),
        }
    }

    #[test]
    fn side_first_order_divergence_guard() {
        let k = single(1.0, 1.0, 1.0);
        let eng = engine(&k);
        let grid = linspace(0.5, 3.0, 10);
        assert!(matches!(
            side_real_case_first_order(&eng, 1.5, &grid, 1e-8),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn tan_mesh_sweeps_side_arcs() {
        // lambda = tan(phi) on a uniform phi mesh; as the damping rate varies
        // the isolated circle-intersection points trace arcs.
        let mesh: Vec<f64> = tan_lambda_mesh(7);
        assert_eq!(mesh.len(), 7);
        assert!(mesh.windows(2).all(|w| w[1] > w[0] && w[0] > 0.0));

        let a0 = 1.0;
        let k = single(1.0, 2.5, 2.0);
        let eng = engine(&k);
        let grid = linspace(0.5, 3.8, 80);
        let mut arcs = Vec::new();
        for &lambda in mesh.iter().filter(|l| **l < 2.4) {
            let b = branch_side_ab(&eng, a0, lambda, &grid, 1e-8).unwrap();
            assert!(!b.points.is_empty(), "no intersection at lambda = {lambda}");
            for p in &b.points {
                assert_eq!(p.lambda, lambda);
                assert!(p.residual <= 1e-8);
            }
            arcs.push((lambda, b.points[0].theta));
        }
        // The isolated theta moves continuously along the arc as the damping
        // rate grows (no jumps between neighboring mesh points).
        for w in arcs.windows(2) {
            assert!((w[1].1 - w[0].1).abs() < 0.5, "{arcs:?}");
        }
    }

    #[test]
    fn circles_reduce_to_tongue_at_lambda_zero() {
        let theta = 2.0;
        let a0 = 1.0;
        let k = single(1.0, 1.0, theta);
        let eng = engine(&k);
        let circ = antiperiodic_circles(&eng, a0, 0.0, theta, 1e-8).unwrap();
        let block = eng.block(Mode::Antiperiodic, 1, theta, czero()).unwrap();
        let tongue = antiperiodic_2x2_roots(&block, a0, 1e-8).unwrap();
        assert_eq!(circ.len(), tongue.roots.len());
        for (a, b) in circ.iter().zip(&tongue.roots) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn circles_miss_axis_when_radius_too_small() {
        let theta = 0.5;
        let period = 2.0 * PI / theta;
        let env = Envelope {
            amplitude: 2.0,
            decay: 1.0,
            exponent: 1.0,
        };
        let table = TableKernel::from_fn(period, 64, 96, 20.0, env, |t, xi| {
            (1.0 + 0.9 * (theta * t).sin()) * (-xi).exp()
        })
        .unwrap();
        let k = MemoryKernel::Table(table);
        let eng = engine(&k);
        let block = eng.block(Mode::Antiperiodic, 1, theta, czero()).unwrap();
        let a0 = theta * theta / 4.0 + block.get(-1, -1).re;
        let circ = antiperiodic_circles(&eng, a0, 0.0, theta, 1e-8).unwrap();
        assert!(circ.is_empty());
    }

    #[test]
    fn vertex_c_zero_kernel_degree_change() {
        let theta = 1.2;
        let k = MemoryKernel::<f64>::zero(2.0 * PI / theta);
        let eng = engine(&k);
        let block = eng.block(Mode::Periodic, 1, theta, czero()).unwrap();
        // Leading coefficient -2 (theta^2 - a0) vanishes at a0 = theta^2.
        let v = vertex_c_3x3(&block, theta * theta, 1e-8).unwrap();
        assert!(v.degree_change);
        let v = vertex_c_3x3(&block, 0.5, 1e-8).unwrap();
        assert!(!v.degree_change);
        assert!((v.leading_coefficient + 2.0 * (theta * theta - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn vertex_c_degree_change_brackets_leading_zero() {
        let theta = 1.2;
        let k = single(0.5, 1.0, theta);
        let eng = engine(&k);
        let block = eng.block(Mode::Periodic, 1, theta, czero()).unwrap();
        // The leading coefficient is affine in a0: bracket its zero.
        let f = |a0: f64| vertex_c_3x3(&block, a0, 1e-12).unwrap().leading_coefficient;
        let root = bisect(f, -5.0, 5.0, 100);
        let v_left = vertex_c_3x3(&block, root - 1e-3, 1e-8).unwrap();
        let v_at = vertex_c_3x3(&block, root, 1e-8).unwrap();
        let v_right = vertex_c_3x3(&block, root + 1e-3, 1e-8).unwrap();
        assert!(v_at.degree_change);
        assert!(!v_left.degree_change && !v_right.degree_change);
        assert!(v_left.leading_coefficient * v_right.leading_coefficient < 0.0);
    }

    #[test]
    fn vertex_c_matches_closed_form_for_exponential_kernel() {
        let a0 = 1.0;
        let c = 0.5;
        let mu = 1.0;
        for theta in [0.55, 0.65, 0.75] {
            let k = single(c, mu, theta);
            let eng = engine(&k);
            let block = eng.block(Mode::Periodic, 1, theta, czero()).unwrap();
            let v = vertex_c_3x3(&block, a0, 1e-8).unwrap();
            let closed = exp_periodic_closed(c, mu, a0, theta).unwrap();
            assert!(closed.admissible);
            let best = v
                .roots
                .iter()
                .map(|r| (r * r - closed.a1_squared).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "theta={theta}: {best}");
        }
    }

    #[test]
    fn vertex_c_classical_matches_determinant_roots() {
        // Zero kernel away from the degree change: roots of the quadratic
        // lie on the zero set of the raw determinant. Real roots need
        // a0 (theta^2 - a0) < 0, so take a0 > theta^2.
        let theta = 1.3;
        let a0 = 2.0;
        let k = MemoryKernel::<f64>::zero(2.0 * PI / theta);
        let eng = engine(&k);
        let block = eng.block(Mode::Periodic, 1, theta, czero()).unwrap();
        let v = vertex_c_3x3(&block, a0, 1e-8).unwrap();
        assert!(!v.roots.is_empty());
        for root in &v.roots {
            let det = truncation_matrix(&block, a0, *root).det();
            assert!(det.norm() < 1e-10, "root {root}: |det| = {}", det.norm());
        }
    }

    #[test]
    fn exp_periodic_closed_values_and_asymptotes() {
        // Denominator roots for (c, mu, a0) = (1, 1, 3): theta^2 = 1 +- sqrt(3),
        // only the positive one survives.
        let r = exp_periodic_closed(1.0, 1.0, 3.0, 1.0).unwrap();
        assert_eq!(r.asymptotes.len(), 1);
        let expect = 1.0 + 3.0f64.sqrt();
        assert!((r.asymptotes[0] - expect).abs() < 1e-10);
        // The located root zeroes the denominator; theta^2 = 1 does not.
        assert!(exp_periodic_denominator(1.0f64, 1.0, 3.0, r.asymptotes[0]).abs() < 1e-10);
        assert!(exp_periodic_denominator(1.0f64, 1.0, 3.0, 1.0).abs() > 0.1);

        // c -> 0 with a0 = theta^2: tongue tip, a1^2 -> 0.
        let tiny = exp_periodic_closed(1e-12f64, 1.0, 1.44, 1.2).unwrap();
        assert!(tiny.a1_squared.abs() < 1e-11);

        // Signed amplitude rejected.
        assert!(matches!(
            exp_periodic_closed(-1.0, 1.0, 1.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exp_antiperiodic_closed_values() {
        // c -> 0: a1^2 = 4 (a0 - theta^2/4)^2.
        let v: Vec<f64> =
            exp_antiperiodic_closed(1e-14, 1.0, 1.3, 2.0, AntiperiodicOrder::Two).unwrap();
        assert!((v[0] - 4.0 * (1.3 - 1.0f64).powi(2)).abs() < 1e-10);

        // (1, 1, 1, 2) -> a1^2 = 2.
        let v: Vec<f64> =
            exp_antiperiodic_closed(1.0, 1.0, 1.0, 2.0, AntiperiodicOrder::Two).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-14);

        // Order four: when real, both roots positive (sampled).
        let mut state = 99u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (u32::MAX as f64)
        };
        let mut real_cases = 0;
        for _ in 0..1000 {
            let c = 0.05 + 2.0 * next();
            let mu = 0.2 + 2.0 * next();
            let a0 = -2.0 + 6.0 * next();
            let theta = 0.2 + 3.0 * next();
            let roots = exp_antiperiodic_closed(c, mu, a0, theta, AntiperiodicOrder::Four).unwrap();
            if !roots.is_empty() {
                real_cases += 1;
                assert!(roots.iter().all(|y| *y > 0.0), "roots {roots:?}");
            }
        }
        assert!(real_cases > 100, "sampling produced {real_cases} real cases");
    }

    #[test]
    fn exp_antiperiodic_order4_consistent_with_order2() {
        // The quartic root closer to the order-2 value refines it.
        let (c, mu, a0) = (0.5f64, 1.0f64, 1.0f64);
        for theta in [1.6, 1.8, 2.0] {
            let v2 = exp_antiperiodic_closed(c, mu, a0, theta, AntiperiodicOrder::Two).unwrap()[0];
            let v4: Vec<f64> =
                exp_antiperiodic_closed(c, mu, a0, theta, AntiperiodicOrder::Four).unwrap();
            let nearest = v4
                .iter()
                .copied()
                .min_by(|a, b| (a - v2).abs().partial_cmp(&(b - v2).abs()).unwrap())
                .unwrap();
            assert!((nearest - v2).abs() < 0.3 * v2.max(1.0), "theta {theta}");
        }
    }

    #[test]
    fn vertex_a_zero_kernel_against_grid_search() {
        // Classical case: the periodic 3x3 determinant carries a factor
        // (theta^2 - a0), so coexistence happens at theta = sqrt(a0) where
        // the antiperiodic tongue gives a1 = +-3 a0 / 2.
        let a0 = 0.49;
        let theta_expect = 0.7;
        let a1_expect = 1.5 * a0;

        // Brute-force 2-D minimization oracle over (theta, a1).
        let worst = |theta: f64, a1: f64| -> f64 {
            let k = MemoryKernel::<f64>::zero(2.0 * PI / theta);
            let eng = engine(&k);
            let bp = eng.block(Mode::Periodic, 1, theta, czero()).unwrap();
            let ba = eng.block(Mode::Antiperiodic, 1, theta, czero()).unwrap();
            let dp = truncation_matrix(&bp, a0, a1).det().norm();
            let da = truncation_matrix(&ba, a0, a1).det().norm();
            dp.max(da)
        };
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..60 {
            for j in 0..60 {
                let theta = 0.5 + 0.4 * (i as f64) / 59.0;
                let a1 = 0.3 + 0.9 * (j as f64) / 59.0;
                let w = worst(theta, a1);
                if w < best.0 {
                    best = (w, theta, a1);
                }
            }
        }
        assert!(
            (best.1 - theta_expect).abs() < 0.02,
            "grid oracle theta {}",
            best.1
        );
        assert!(
            (best.2 - a1_expect).abs() < 0.05,
            "grid oracle a1 {}",
            best.2
        );

        // The solver should find the same coexistence point.
        let k = MemoryKernel::<f64>::zero(2.0 * PI / theta_expect);
        let eng = engine(&k);
        let grid = linspace(0.5, 0.9, 81);
        let pts = vertex_a_solve(&eng, a0, &grid, 1e-8).unwrap();
        assert!(!pts.is_empty(), "no vertex-A points found");
        let hit = pts.iter().any(|(t, a1, _)| {
            (t - theta_expect).abs() < 5e-3 && (a1.abs() - a1_expect).abs() < 5e-3
        });
        assert!(hit, "points: {pts:?}");
    }

    #[test]
    fn vertex_a_empty_when_grid_does_not_bracket() {
        let k = MemoryKernel::<f64>::zero(2.0 * PI);
        let eng = engine(&k);
        let grid = linspace(5.0, 6.0, 11);
        let pts = vertex_a_solve(&eng, 0.49, &grid, 1e-8).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn side_third_order_residuals_verify() {
        // Memory kernel, fixed (a0, lambda): every returned point re-evaluates
        // both determinants below tolerance.
        let theta_grid = linspace(0.5, 1.5, 101);
        let k = MemoryKernel::expsum(1.0, vec![(0.6, 1.3)]).unwrap();
        let eng = engine(&k);
        let branch = side_real_case_third_order(&eng, 0.45, 0.3, &theta_grid, 1e-8).unwrap();
        for p in &branch.points {
            assert!(p.residual <= 1e-8);
        }
    }

    #[test]
    fn shift_scan_locates_admissible_periodic_points() {
        // Oracle (independent bisection on Im(C0/C2) for the diagonal
        // coefficient table): theta = 1.6, a0 = 1.8, (c, mu) = (1, 1) has an
        // admissible shift omega* = 0.854310 with a1^2 = 2.493124.
        let theta = 1.6;
        let k = single(1.0, 1.0, theta);
        let eng = engine(&k);
        let omega_grid = linspace(0.05, 1.5, 60);
        let b = branch_periodic_3x3(&eng, 1.8, &omega_grid, &[theta], 1e-8).unwrap();
        assert!(!b.points.is_empty());
        let hit = b
            .points
            .iter()
            .find(|p| (p.omega - 0.854310).abs() < 1e-4)
            .expect("admissible shift found");
        assert!((hit.a1 * hit.a1 - 2.493124).abs() < 1e-4, "a1 = {}", hit.a1);
        assert!(hit.residual <= 1e-8);
    }

    #[test]
    fn shift_scan_locates_admissible_antiperiodic_points() {
        // Oracle as above for the half-odd harmonics: theta = 1.2, a0 = 0.8
        // has omega* = 0.4768 with a1^2 = 0.9009.
        let theta = 1.2;
        let k = single(1.0, 1.0, theta);
        let eng = engine(&k);
        let omega_grid = linspace(0.05, 1.0, 50);
        let b = branch_antiperiodic_2x2(&eng, 0.8, &omega_grid, &[theta], 1e-8).unwrap();
        assert_eq!(b.kind, BranchKind::Antiperiodic);
        let hit = b
            .points
            .iter()
            .find(|p| (p.omega - 0.4768).abs() < 1e-3)
            .expect("admissible shift found");
        assert!((hit.a1 * hit.a1 - 0.9009).abs() < 1e-3, "a1 = {}", hit.a1);
        assert!(hit.residual <= 1e-8);
    }

    #[test]
    fn branch_sweeps_fill_metadata() {
        let theta = 2.0;
        let k = single(1.0, 1.0, theta);
        let eng = engine(&k);
        let grid = [1.9, 2.0, 2.1];
        let b = branch_antiperiodic_2x2(&eng, 1.0, &[0.0], &grid, 1e-8).unwrap();
        assert_eq!(b.kind, BranchKind::VertexB);
        assert_eq!(b.truncation_order, 2);
        assert!(!b.points.is_empty());
        for p in &b.points {
            assert!(p.residual <= 1e-8);
        }
        let spot = b
            .points
            .iter()
            .find(|p| (p.theta - 2.0).abs() < 1e-12)
            .unwrap();
        assert!((spot.a1 * spot.a1 - 2.0).abs() < 1e-10);

        let q = branch_quasistatic(&eng, theta, &[0.0], 1e-8).unwrap();
        assert_eq!(q.points.len(), 1);
        assert!((q.points[0].a0 - 1.0).abs() < 1e-12);
    }
}
