//! Numerical evaluation of the kernel harmonic coefficients
//!
//! ```text
//! K_nm(theta, gamma) = (1/T) int_0^T int_0^inf K(t, t - xi)
//!     exp(i theta (m - n) t - (i theta m_eff + gamma) xi) d xi dt
//! ```
//!
//! with `m_eff = m` for periodic solutions and `m + 1/2` for antiperiodic
//! ones. The lag integral uses an exponential-weight (Gauss-Laguerre) rule
//! scaled by a shift rate `v > 0`; the periodic integral uses composite
//! Simpson. Note the exponential-weight identity
//! `int_0^inf e^(-x) f(x) dx ~ sum w_i f(x_i)` defines the Laguerre rule even
//! where the surrounding literature calls the combination "Gauss-Legendre".

use crate::error::{Error, Result};
use crate::kernels::{MemoryKernel, Mode};
use crate::scalar::Real;
use num_complex::Complex;

pub const MAX_LAGUERRE_NODES: usize = 64;

/// Shift rate for the exponential-weight rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shift<T> {
    /// `v = mu + Re(gamma)` with `mu` from the kernel envelope.
    Auto,
    Fixed(T),
}

/// Parameters of the composed rule.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec<T> {
    /// Number of exponential-weight nodes (1..=64).
    pub nodes: usize,
    /// Number of Simpson panels on `[0, T]`; must be even and >= 2.
    pub panels: usize,
    pub shift: Shift<T>,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            nodes: 32,
            panels: 64,
            shift: Shift::Auto,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 1 || self.nodes > MAX_LAGUERRE_NODES {
            return Err(Error::Invalid(format!(
                "node count {} outside 1..={MAX_LAGUERRE_NODES}",
                self.nodes
            )));
        }
        if self.panels < 2 || !self.panels.is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "panel count {} must be even and >= 2",
                self.panels
            )));
        }
        if let Shift::Fixed(v) = self.shift {
            if !(v > T::zero()) {
                return Err(Error::Invalid("shift rate must be positive".into()));
            }
        }
        Ok(())
    }

    fn resolve_shift(&self, kernel_decay: T, gamma_re: T) -> Result<T> {
        let v = match self.shift {
            Shift::Auto => kernel_decay + gamma_re,
            Shift::Fixed(v) => v,
        };
        if !(v > T::zero()) {
            return Err(Error::Divergence(format!(
                "the approximation is valid for v > 0 only, got v = {v}"
            )));
        }
        Ok(v)
    }
}

/// Gauss-Laguerre nodes and weights for weight `e^(-x)` on `[0, inf)`.
///
/// Exact for polynomials of degree `2n - 1`; the weights sum to 1. Roots are
/// located by Newton iteration from standard initial guesses, with a
/// Golub-Welsch eigenvalue fallback for any root that fails to settle.
pub fn laguerre_rule<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if !(1..=MAX_LAGUERRE_NODES).contains(&n) {
        return Err(Error::Invalid(format!(
            "node count {n} outside 1..={MAX_LAGUERRE_NODES}"
        )));
    }
    let mut nodes = Vec::with_capacity(n);
    let tol = T::of(64.0) * T::epsilon();
    let mut newton_ok = true;
    'roots: for i in 0..n {
        let mut z: T = match i {
            0 => T::of(3.0) / (T::one() + T::of(2.4) * T::of(n as f64)),
            1 => nodes[0] + T::of(15.0) / (T::one() + T::of(2.5) * T::of(n as f64)),
            _ => {
                let ai = T::of((i - 1) as f64);
                let spread = (T::one() + T::of(2.55) * ai) / (T::of(1.9) * ai);
                nodes[i - 1] + spread * (nodes[i - 1] - nodes[i - 2])
            }
        };
        let mut settled = false;
        for _ in 0..120 {
            let (p, pm1) = laguerre_eval(n, z);
            let dp = T::of(n as f64) * (p - pm1) / z;
            let step = p / dp;
            z = z - step;
            if step.abs() <= tol * (T::one() + z.abs()) {
                settled = true;
                break;
            }
        }
        // Two polish steps push the root to the rounding floor, which the
        // weight formula amplifies by O(n).
        for _ in 0..2 {
            let (p, pm1) = laguerre_eval(n, z);
            let dp = T::of(n as f64) * (p - pm1) / z;
            z = z - p / dp;
        }
        if !settled || !z.is_finite() {
            newton_ok = false;
            break 'roots;
        }
        nodes.push(z);
    }
    if !newton_ok {
        return laguerre_rule_golub_welsch(n);
    }
    let weights = nodes.iter().map(|&x| laguerre_weight(n, x)).collect();
    Ok((nodes, weights))
}

/// `w_i = 1 / (x_i L'_n(x_i)^2)` at a root `x_i` of `L_n`. This form stays
/// well-conditioned at the clustered small roots, unlike the equivalent
/// `x / ((n+1)^2 L_{n+1}^2)`.
fn laguerre_weight<T: Real>(n: usize, x: T) -> T {
    let (p, pm1) = laguerre_eval(n, x);
    let dp = T::of(n as f64) * (p - pm1) / x;
    T::one() / (x * dp * dp)
}

/// `(L_n(x), L_{n-1}(x))` by the three-term recurrence.
fn laguerre_eval<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p = T::one();
    let mut pm1 = T::zero();
    for j in 1..=n {
        let jf = T::of(j as f64);
        let next = ((T::of(2.0) * jf - T::one() - x) * p - (jf - T::one()) * pm1) / jf;
        pm1 = p;
        p = next;
    }
    (p, pm1)
}

/// Golub-Welsch construction from the symmetric Jacobi matrix.
fn laguerre_rule_golub_welsch<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let diag: Vec<T> = (0..n).map(|i| T::of(2.0 * i as f64 + 1.0)).collect();
    let off: Vec<T> = (1..n).map(|i| T::of(i as f64)).collect();
    let (values, firsts) = T::symmetric_tridiagonal_eigen(&diag, &off);
    let weights = firsts.iter().map(|f| *f * *f).collect();
    Ok((values, weights))
}

/// Composite Simpson nodes and weights on `[0, period]` with `panels` panels
/// (two subintervals per panel, so `2 * panels + 1` nodes). The weights sum
/// to `period` and each panel integrates cubics exactly.
pub fn newton_cotes_rule<T: Real>(panels: usize, period: T) -> Result<(Vec<T>, Vec<T>)> {
    if panels < 2 || !panels.is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "panel count {panels} must be even and >= 2"
        )));
    }
    let steps = 2 * panels;
    let h = period / T::of(steps as f64);
    let third = h / T::of(3.0);
    let nodes = (0..=steps).map(|j| h * T::of(j as f64)).collect();
    let weights = (0..=steps)
        .map(|j| {
            if j == 0 || j == steps {
                third
            } else if j % 2 == 1 {
                T::of(4.0) * third
            } else {
                T::of(2.0) * third
            }
        })
        .collect();
    Ok((nodes, weights))
}

/// One harmonic coefficient by the composed rule.
pub fn knm_quad<T: Real>(
    kernel: &MemoryKernel<T>,
    n: i64,
    m: i64,
    theta: T,
    gamma: Complex<T>,
    spec: &QuadratureSpec<T>,
    mode: Mode,
) -> Result<Complex<T>> {
    spec.validate()?;
    if !(theta > T::zero()) {
        return Err(Error::Invalid("theta must be positive".into()));
    }
    // The projection integrates t over one modulation period 2 pi / theta.
    // Lag kernels (exponential sums) are simultaneously periodic for every
    // period; a tabulated kernel pins its own and must match.
    let period = T::of(2.0) * T::PI() / theta;
    if kernel.as_expsum().is_none()
        && (period - kernel.period()).abs() > T::of(1e-9) * kernel.period()
    {
        return Err(Error::Invalid(format!(
            "theta = {theta} implies period {period}, but the tabulated kernel declares {}",
            kernel.period()
        )));
    }
    let v = spec.resolve_shift(kernel.envelope().decay, gamma.re)?;
    let (lag_nodes, lag_weights) = laguerre_rule::<T>(spec.nodes)?;
    let (t_nodes, t_weights) = newton_cotes_rule::<T>(spec.panels, period)?;

    let m_eff = match mode {
        Mode::Periodic => T::of(m as f64),
        Mode::Antiperiodic => T::of(m as f64) + T::of(0.5),
    };
    let osc = (theta * m_eff + gamma.im) / v;

    // Stable per-node factor exp(ln w_i + x_i (1 - Re(gamma)/v)) / v.
    let lag_factors: Vec<(T, Complex<T>)> = lag_nodes
        .iter()
        .zip(&lag_weights)
        .map(|(&x, &w)| {
            let amp = (w.ln() + x * (T::one() - gamma.re / v)).exp() / v;
            let phase = Complex::from_polar(T::one(), -osc * x);
            (x / v, phase * amp)
        })
        .collect();

    let dk = T::of((m - n) as f64) * theta;
    let mut acc = Complex::new(T::zero(), T::zero());
    for (&y, &u) in t_nodes.iter().zip(&t_weights) {
        let mut inner = Complex::new(T::zero(), T::zero());
        for &(xi, coeff) in &lag_factors {
            let kv = kernel.eval(y, y - xi)?;
            inner = inner + coeff * kv;
        }
        acc = acc + Complex::from_polar(u, dk * y) * inner;
    }
    Ok(acc / period)
}

/// Harmonic index window of a truncation: `{-N .. N}` for periodic blocks
/// ("third order" is N = 1), `{-N .. N-1}` for antiperiodic ones
/// ("second order" is N = 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HarmonicWindow {
    pub mode: Mode,
    pub halfwidth: usize,
}

impl HarmonicWindow {
    pub fn periodic(halfwidth: usize) -> Self {
        Self {
            mode: Mode::Periodic,
            halfwidth,
        }
    }

    pub fn antiperiodic(halfwidth: usize) -> Self {
        Self {
            mode: Mode::Antiperiodic,
            halfwidth,
        }
    }

    pub fn lo(&self) -> i64 {
        -(self.halfwidth as i64)
    }

    pub fn size(&self) -> usize {
        match self.mode {
            Mode::Periodic => 2 * self.halfwidth + 1,
            Mode::Antiperiodic => 2 * self.halfwidth,
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let lo = self.lo();
        (0..self.size() as i64).map(move |k| lo + k)
    }

    pub fn offset(&self, idx: i64) -> usize {
        let off = idx - self.lo();
        debug_assert!(off >= 0 && (off as usize) < self.size(), "index in window");
        off as usize
    }
}

/// Coefficient backend: exact closed forms (exponential sums only) or the
/// composed quadrature rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Closed,
    Quad,
}

/// Dense table of harmonic coefficients over a window.
#[derive(Clone, Debug)]
pub struct FourierBlock<T> {
    pub window: HarmonicWindow,
    pub theta: T,
    pub gamma: Complex<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> FourierBlock<T> {
    pub fn get(&self, n: i64, m: i64) -> Complex<T> {
        let s = self.window.size();
        self.values[self.window.offset(n) * s + self.window.offset(m)]
    }

    pub fn mode(&self) -> Mode {
        self.window.mode
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, i64, Complex<T>)> + '_ {
        let s = self.window.size();
        let lo = self.window.lo();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (lo + (k / s) as i64, lo + (k % s) as i64, v))
    }
}

/// Tabulates the harmonic coefficients over `window` at `(theta, gamma)`.
pub fn fourier_block<T: Real>(
    kernel: &MemoryKernel<T>,
    window: HarmonicWindow,
    theta: T,
    gamma: Complex<T>,
    spec: &QuadratureSpec<T>,
    backend: Backend,
) -> Result<FourierBlock<T>> {
    let s = window.size();
    let mut values = Vec::with_capacity(s * s);
    match backend {
        Backend::Closed => {
            let exp = kernel.as_expsum().ok_or_else(|| {
                Error::UnsupportedKernel(
                    "the closed-form backend needs an exponential-sum kernel".into(),
                )
            })?;
            for n in window.indices() {
                for m in window.indices() {
                    values.push(exp.harmonic_coefficient(n, m, theta, gamma, window.mode)?);
                }
            }
        }
        Backend::Quad => {
            for n in window.indices() {
                for m in window.indices() {
                    values.push(knm_quad(kernel, n, m, theta, gamma, spec, window.mode)?);
                }
            }
        }
    }
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite coefficient in block".into()));
    }
    Ok(FourierBlock {
        window,
        theta,
        gamma,
        values,
    })
}
