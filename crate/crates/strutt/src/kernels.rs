//! Memory kernels with simultaneous periodicity `K(t+T, s+T) = K(t, s)`.
//!
//! Two concrete kernel classes are supported: finite sums of decaying
//! exponentials (which admit closed-form harmonic coefficients and an exact
//! ODE embedding) and tabulated kernels on a `(t mod T, xi)` grid with an
//! exponential tail beyond the last lag sample. Signed exponential amplitudes
//! are allowed here; operations that rely on positive amplitudes reject signed
//! input themselves.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Solution family selector: integer harmonics `m * theta` for periodic
/// solutions, half-odd harmonics `(2m+1) * theta / 2` for antiperiodic ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Periodic,
    Antiperiodic,
}

impl Mode {
    /// Harmonic frequency attached to index `m`.
    pub fn harmonic<T: Real>(self, m: i64, theta: T) -> T {
        let mf = T::of(m as f64);
        match self {
            Mode::Periodic => mf * theta,
            Mode::Antiperiodic => (T::of(2.0) * mf + T::one()) * theta / T::of(2.0),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Periodic => write!(f, "periodic"),
            Mode::Antiperiodic => write!(f, "antiperiodic"),
        }
    }
}

/// Decay envelope `|K(t, s)| <= amplitude * exp(-decay * (t-s)^exponent)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    #[serde(rename = "C")]
    pub amplitude: T,
    #[serde(rename = "mu")]
    pub decay: T,
    #[serde(rename = "beta")]
    pub exponent: T,
}

/// One exponential term `c * exp(-mu * (t-s))`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExpTerm<T> {
    #[serde(rename = "c")]
    pub amplitude: T,
    #[serde(rename = "mu")]
    pub rate: T,
}

/// Finite sum of decaying exponentials in the lag `t - s`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpSumKernel<T> {
    #[serde(rename = "T")]
    pub period: T,
    pub terms: Vec<ExpTerm<T>>,
}

impl<T: Real> ExpSumKernel<T> {
    pub fn new(period: T, terms: Vec<(T, T)>) -> Result<Self> {
        let k = Self {
            period,
            terms: terms
                .into_iter()
                .map(|(amplitude, rate)| ExpTerm { amplitude, rate })
                .collect(),
        };
        k.validate()?;
        Ok(k)
    }

    pub fn zero(period: T) -> Self {
        Self {
            period,
            terms: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.period > T::zero()) {
            return Err(Error::Invalid("kernel period must be positive".into()));
        }
        for t in &self.terms {
            if !(t.rate > T::zero()) || !t.rate.is_finite() || !t.amplitude.is_finite() {
                return Err(Error::Invalid(
                    "exponential terms need finite c and mu > 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// Smallest decay rate, or 1 for the empty (zero) kernel.
    pub fn min_rate(&self) -> T {
        let m = self.terms.iter().map(|t| t.rate).fold(T::infinity(), T::min);
        if m.is_finite() {
            m
        } else {
            T::one()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every amplitude is strictly positive (and there is at least one term).
    pub fn all_positive(&self) -> bool {
        !self.terms.is_empty() && self.terms.iter().all(|t| t.amplitude > T::zero())
    }

    pub fn envelope(&self) -> Envelope<T> {
        let amplitude = self
            .terms
            .iter()
            .map(|t| t.amplitude.abs())
            .fold(T::zero(), |a, b| a + b);
        Envelope {
            amplitude,
            decay: self.min_rate(),
            exponent: T::one(),
        }
    }

    pub fn eval(&self, lag: T) -> T {
        self.terms
            .iter()
            .map(|t| t.amplitude * (-t.rate * lag).exp())
            .fold(T::zero(), |a, b| a + b)
    }

    /// Harmonic coefficient of the memory term in closed form:
    /// `delta_nm * sum_a c_a / (mu_a + gamma + i h_m)` with `h_m` the mode
    /// harmonic. Requires `Re(gamma) + mu_a > 0` for every term.
    pub fn harmonic_coefficient(
        &self,
        n: i64,
        m: i64,
        theta: T,
        gamma: Complex<T>,
        mode: Mode,
    ) -> Result<Complex<T>> {
        for t in &self.terms {
            if !(gamma.re + t.rate > T::zero()) {
                return Err(Error::Divergence(format!(
                    "Re(gamma) = {} requires Re(gamma) + mu > 0 (mu = {})",
                    gamma.re, t.rate
                )));
            }
        }
        if n != m {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let h = mode.harmonic(m, theta);
        let mut acc = Complex::new(T::zero(), T::zero());
        for t in &self.terms {
            acc = acc + Complex::new(t.amplitude, T::zero())
                / Complex::new(t.rate + gamma.re, gamma.im + h);
        }
        Ok(acc)
    }

    /// `K^(xi) = integral over one period of K(eta, eta - xi)`, in closed form.
    pub fn lag_average(&self, xi: T) -> T {
        self.period * self.eval(xi)
    }

    /// Odd lag moments `A_k = T * sum_a c_a / mu_a^(2k+2)` of the lag average.
    pub fn moments(&self, k_max: usize) -> Vec<T> {
        (0..=k_max)
            .map(|k| {
                self.terms
                    .iter()
                    .map(|t| self.period * t.amplitude / t.rate.powi(2 * k as i32 + 2))
                    .fold(T::zero(), |a, b| a + b)
            })
            .collect()
    }
}

/// Kernel tabulated on a `(t mod T, xi)` grid, bilinearly interpolated, with
/// an exponential tail `value(t, xi_max) * exp(-decay * (xi - xi_max))` beyond
/// the last lag sample.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableKernel<T> {
    #[serde(rename = "T")]
    pub period: T,
    pub t_samples: Vec<T>,
    pub xi_samples: Vec<T>,
    /// `values[i][j] = K(t_i, t_i - xi_j)`.
    pub values: Vec<Vec<T>>,
    pub envelope: Envelope<T>,
}

impl<T: Real> TableKernel<T> {
    fn validate(&self) -> Result<()> {
        if !(self.period > T::zero()) {
            return Err(Error::Invalid("kernel period must be positive".into()));
        }
        if self.t_samples.len() < 2 || self.xi_samples.len() < 2 {
            return Err(Error::Invalid("table needs at least a 2x2 grid".into()));
        }
        let ascending = |v: &[T]| v.windows(2).all(|w| w[1] > w[0]);
        if !ascending(&self.t_samples) || !ascending(&self.xi_samples) {
            return Err(Error::Invalid("sample grids must be strictly ascending".into()));
        }
        if self.t_samples[0] != T::zero()
            || (self.t_samples[self.t_samples.len() - 1] - self.period).abs()
                > T::of(1e-12) * self.period
        {
            return Err(Error::Invalid("t samples must span [0, T]".into()));
        }
        if self.xi_samples[0] != T::zero() {
            return Err(Error::Invalid("xi samples must start at 0".into()));
        }
        if self.values.len() != self.t_samples.len()
            || self.values.iter().any(|r| r.len() != self.xi_samples.len())
        {
            return Err(Error::Invalid("value table shape must match grids".into()));
        }
        if !(self.envelope.decay > T::zero()) || !(self.envelope.exponent >= T::one()) {
            return Err(Error::Invalid("envelope needs mu > 0 and beta >= 1".into()));
        }
        Ok(())
    }

    /// Samples an analytic kernel `f(t, xi)` onto a fresh table.
    pub fn from_fn(
        period: T,
        nt: usize,
        nxi: usize,
        xi_max: T,
        envelope: Envelope<T>,
        mut f: impl FnMut(T, T) -> T,
    ) -> Result<Self> {
        let t_samples: Vec<T> = (0..=nt)
            .map(|i| period * T::of(i as f64) / T::of(nt as f64))
            .collect();
        let xi_samples: Vec<T> = (0..=nxi)
            .map(|j| xi_max * T::of(j as f64) / T::of(nxi as f64))
            .collect();
        let values = t_samples
            .iter()
            .map(|&t| xi_samples.iter().map(|&xi| f(t, xi)).collect())
            .collect();
        let k = Self {
            period,
            t_samples,
            xi_samples,
            values,
            envelope,
        };
        k.validate()?;
        Ok(k)
    }

    fn eval_lag(&self, t: T, xi: T) -> T {
        let tm = {
            let r = t % self.period;
            if r < T::zero() {
                r + self.period
            } else {
                r
            }
        };
        let xi_max = self.xi_samples[self.xi_samples.len() - 1];
        if xi > xi_max {
            let tail = (-self.envelope.decay * (xi - xi_max)).exp();
            return self.bilinear(tm, xi_max) * tail;
        }
        self.bilinear(tm, xi)
    }

    fn bilinear(&self, t: T, xi: T) -> T {
        let (i, ft) = locate(&self.t_samples, t);
        let (j, fx) = locate(&self.xi_samples, xi);
        let v00 = self.values[i][j];
        let v01 = self.values[i][j + 1];
        let v10 = self.values[i + 1][j];
        let v11 = self.values[i + 1][j + 1];
        let a = v00 + (v01 - v00) * fx;
        let b = v10 + (v11 - v10) * fx;
        a + (b - a) * ft
    }
}

/// Cell index and fractional coordinate of `x` in an ascending grid.
fn locate<T: Real>(grid: &[T], x: T) -> (usize, T) {
    let last = grid.len() - 1;
    if x <= grid[0] {
        return (0, T::zero());
    }
    if x >= grid[last] {
        return (last - 1, T::one());
    }
    let mut lo = 0;
    let mut hi = last;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if grid[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ((lo), (x - grid[lo]) / (grid[lo + 1] - grid[lo]))
}

/// A simultaneously periodic memory kernel.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MemoryKernel<T> {
    ExpSum(ExpSumKernel<T>),
    Table(TableKernel<T>),
}

impl<T: Real> MemoryKernel<T> {
    pub fn expsum(period: T, terms: Vec<(T, T)>) -> Result<Self> {
        Ok(Self::ExpSum(ExpSumKernel::new(period, terms)?))
    }

    pub fn zero(period: T) -> Self {
        Self::ExpSum(ExpSumKernel::zero(period))
    }

    /// Parses the kernel definition JSON (`{"type": "expsum", ...}` or
    /// `{"type": "table", ...}`) and validates it.
    pub fn from_json(text: &str) -> Result<Self>
    where
        T: serde::de::DeserializeOwned,
    {
        let k: Self = serde_json::from_str(text)
            .map_err(|e| Error::Invalid(format!("kernel file: {e}")))?;
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::ExpSum(k) => k.validate(),
            Self::Table(k) => k.validate(),
        }
    }

    pub fn period(&self) -> T {
        match self {
            Self::ExpSum(k) => k.period,
            Self::Table(k) => k.period,
        }
    }

    pub fn envelope(&self) -> Envelope<T> {
        match self {
            Self::ExpSum(k) => k.envelope(),
            Self::Table(k) => k.envelope,
        }
    }

    pub fn as_expsum(&self) -> Option<&ExpSumKernel<T>> {
        match self {
            Self::ExpSum(k) => Some(k),
            Self::Table(_) => None,
        }
    }

    /// Short label used in result metadata.
    pub fn label(&self) -> String {
        match self {
            Self::ExpSum(k) if k.terms.is_empty() => "expsum:0".into(),
            Self::ExpSum(k) => format!("expsum:{}", k.terms.len()),
            Self::Table(k) => format!(
                "table:{}x{}",
                k.t_samples.len(),
                k.xi_samples.len()
            ),
        }
    }

    /// Kernel value `K(t, s)`; errors when `s > t`.
    pub fn eval(&self, t: T, s: T) -> Result<T> {
        if s > t {
            return Err(Error::Domain(format!("K(t, s) requires s <= t, got s - t = {}", s - t)));
        }
        Ok(match self {
            Self::ExpSum(k) => k.eval(t - s),
            Self::Table(k) => k.eval_lag(t, t - s),
        })
    }

    /// Lag average `K^(xi) = integral_0^T K(eta, eta - xi) d eta`.
    ///
    /// Closed form for exponential sums; composite-Simpson panels in `eta`
    /// otherwise. Errors for `xi < 0`.
    pub fn lag_average(&self, xi: T) -> Result<T> {
        if xi < T::zero() {
            return Err(Error::Domain("lag average needs xi >= 0".into()));
        }
        match self {
            Self::ExpSum(k) => Ok(k.lag_average(xi)),
            Self::Table(k) => {
                let panels = 2 * k.t_samples.len().max(32);
                Ok(simpson(T::zero(), k.period, panels, |eta| {
                    k.eval_lag(eta, xi)
                }))
            }
        }
    }

    /// Odd lag moments `A_k` of the lag average for `k = 0..=k_max`.
    ///
    /// Closed form for exponential sums; for tabulated kernels the
    /// semi-infinite integral is evaluated by panel-doubling Simpson with the
    /// envelope bounding the tail. Errors when the envelope cannot guarantee
    /// integrability.
    pub fn moments(&self, k_max: usize) -> Result<Vec<T>> {
        match self {
            Self::ExpSum(k) => Ok(k.moments(k_max)),
            Self::Table(_) => {
                let env = self.envelope();
                if !(env.decay > T::zero()) {
                    return Err(Error::Divergence("moments need a decaying envelope".into()));
                }
                (0..=k_max)
                    .map(|k| self.moment_numeric(k))
                    .collect()
            }
        }
    }

    /// Samples the declared decay bound `|K(t, s)| <= C exp(-mu (t-s)^beta)`
    /// on an `nt x nxi` grid over one period and lags up to `xi_max`;
    /// returns the first violating `(t, xi)` pair, if any.
    pub fn envelope_violation(&self, nt: usize, nxi: usize, xi_max: T) -> Option<(T, T)> {
        let env = self.envelope();
        let slack = T::one() + T::of(1e-9);
        let period = self.period();
        for i in 0..nt.max(1) {
            let t = period * T::of(i as f64) / T::of(nt.max(1) as f64);
            for j in 0..=nxi.max(1) {
                let xi = xi_max * T::of(j as f64) / T::of(nxi.max(1) as f64);
                let value = match self.eval(t, t - xi) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let bound = env.amplitude * (-env.decay * xi.powf(env.exponent)).exp();
                if value.abs() > bound * slack + T::of(1e-300) {
                    return Some((t, xi));
                }
            }
        }
        None
    }

    fn moment_numeric(&self, k: usize) -> Result<T> {
        let env = self.envelope();
        // Cut the tail where the envelope bound drops below 1e-18 of scale.
        let power = T::of(2.0 * k as f64 + 1.0);
        let mut cut = T::of(40.0) / env.decay;
        loop {
            let bound = env.amplitude * cut.powf(power) * (-env.decay * cut.powf(env.exponent)).exp();
            if bound < T::of(1e-18) || !bound.is_finite() {
                break;
            }
            cut = cut * T::of(1.5);
        }
        let factorial = (1..=(2 * k + 1)).map(|i| T::of(i as f64)).fold(T::one(), |a, b| a * b);
        let f = |xi: T| self.lag_average(xi).unwrap_or_else(|_| T::zero()) * xi.powf(power);
        let value = adaptive_simpson(T::zero(), cut, f, T::of(1e-12))?;
        Ok(value / factorial)
    }
}

/// Composite Simpson with `panels` panels (2 subintervals each).
pub(crate) fn simpson<T: Real>(a: T, b: T, panels: usize, mut f: impl FnMut(T) -> T) -> T {
    let steps = 2 * panels;
    let h = (b - a) / T::of(steps as f64);
    let mut acc = f(a) + f(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { T::of(4.0) } else { T::of(2.0) };
        acc = acc + w * f(a + h * T::of(i as f64));
    }
    acc * h / T::of(3.0)
}

/// Panel-doubling Simpson until successive values agree to `tol` (relative).
pub(crate) fn adaptive_simpson<T: Real>(
    a: T,
    b: T,
    f: impl Fn(T) -> T,
    tol: T,
) -> Result<T> {
    let mut panels = 16;
    let mut prev = simpson(a, b, panels, &f);
    for _ in 0..14 {
        panels *= 2;
        let next = simpson(a, b, panels, &f);
        let scale = next.abs().max(T::one());
        if (next - prev).abs() <= tol * scale {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical(
        "panel-doubling Simpson did not converge".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn single(c: f64, mu: f64, period: f64) -> MemoryKernel<f64> {
        MemoryKernel::expsum(period, vec![(c, mu)]).unwrap()
    }

    #[test]
    fn eval_at_zero_lag() {
        let k = single(1.0, 1.0, 2.0 * std::f64::consts::PI);
        assert_eq!(k.eval(3.0, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn eval_at_log_two_lag() {
        let k = single(2.0, 1.0, 1.0);
        let v = k.eval(2.0f64.ln(), 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eval_simultaneous_periodicity() {
        let period = 1.7;
        let env = Envelope { amplitude: 2.0, decay: 1.0, exponent: 1.0 };
        let k = MemoryKernel::Table(
            TableKernel::from_fn(period, 48, 64, 12.0, env, |t, xi| {
                (1.0 + 0.5 * (2.0 * std::f64::consts::PI * t / period).sin()) * (-xi).exp()
            })
            .unwrap(),
        );
        let (t, s) = (0.9, 0.1);
        let a = k.eval(t, s).unwrap();
        let b = k.eval(t + period, s + period).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn eval_rejects_future_source_times() {
        let k = single(1.0, 1.0, 1.0);
        assert!(matches!(k.eval(0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_coefficient_examples() {
        let per = 2.0 * std::f64::consts::PI;
        let k = ExpSumKernel::new(per, vec![(1.0, 1.0)]).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let v = k.harmonic_coefficient(0, 0, 1.0, zero, Mode::Periodic).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let off = k.harmonic_coefficient(0, 1, 1.0, zero, Mode::Periodic).unwrap();
        assert_eq!(off, Complex64::new(0.0, 0.0));

        let k2 = ExpSumKernel::new(2.0 * std::f64::consts::PI, vec![(2.0, 1.0)]).unwrap();
        let v2 = k2.harmonic_coefficient(1, 1, 1.0, zero, Mode::Periodic).unwrap();
        assert!((v2 - Complex64::new(1.0, -1.0)).norm() < 1e-14);

        let k3 = ExpSumKernel::new(std::f64::consts::PI, vec![(1.0, 1.0)]).unwrap();
        let v3 = k3
            .harmonic_coefficient(0, 0, 2.0, zero, Mode::Antiperiodic)
            .unwrap();
        assert!((v3 - Complex64::new(0.5, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn closed_coefficient_divergence_guard() {
        let k = ExpSumKernel::new(1.0, vec![(1.0, 1.0)]).unwrap();
        let g = Complex64::new(-1.5, 0.0);
        assert!(matches!(
            k.harmonic_coefficient(0, 0, 1.0, g, Mode::Periodic),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn conjugation_symmetry_of_closed_coefficients() {
        let k = ExpSumKernel::new(1.3, vec![(0.7, 1.1), (-0.2, 2.3)]).unwrap();
        let theta = 2.0 * std::f64::consts::PI / 1.3;
        for m in -3i64..=3 {
            for &om in &[0.0, 0.4, 1.1] {
                let a = k
                    .harmonic_coefficient(m, m, theta, Complex64::new(0.0, om), Mode::Periodic)
                    .unwrap();
                let b = k
                    .harmonic_coefficient(-m, -m, theta, Complex64::new(0.0, -om), Mode::Periodic)
                    .unwrap();
                assert!((a.conj() - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn lag_average_examples() {
        let per = 2.0 * std::f64::consts::PI;
        let k = single(1.0, 1.0, per);
        assert!((k.lag_average(0.0).unwrap() - per).abs() < 1e-12);

        let k2 = MemoryKernel::expsum(1.0, vec![(2.0, 2.0), (-1.0, 1.0)]).unwrap();
        let expect = 2.0 * (-2.0f64).exp() - (-1.0f64).exp();
        assert!((k2.lag_average(1.0).unwrap() - expect).abs() < 1e-15);

        // Decay at large lag.
        assert!(k.lag_average(60.0).unwrap().abs() < 1e-20);
        assert!(matches!(k.lag_average(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn lag_average_closed_matches_panel_integration() {
        let k = MemoryKernel::expsum(1.9, vec![(0.8, 1.2), (-0.3, 2.0)]).unwrap();
        for &xi in &[0.0, 0.3, 1.7, 4.0] {
            let closed = k.lag_average(xi).unwrap();
            let numeric = simpson(0.0f64, 1.9, 256, |eta| k.eval(eta, eta - xi).unwrap());
            assert!(
                (closed - numeric).abs() <= 1e-10 * closed.abs().max(1.0),
                "xi={xi}: {closed} vs {numeric}"
            );
        }
    }

    #[test]
    fn moments_closed_forms() {
        let k = single(0.7, 1.3, 2.1);
        let a = k.moments(2).unwrap();
        for (i, got) in a.iter().enumerate() {
            let expect = 2.1 * 0.7 / 1.3f64.powi(2 * i as i32 + 2);
            assert!((got - expect).abs() < 1e-13);
        }

        let unit = single(1.0, 1.0, 1.0);
        let m = unit.moments(2).unwrap();
        assert!(m.iter().all(|v| (v - 1.0).abs() < 1e-14));

        let z = MemoryKernel::<f64>::zero(1.0);
        assert!(z.moments(2).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn moments_closed_matches_adaptive_quadrature() {
        let k = MemoryKernel::expsum(1.4, vec![(0.9, 1.1), (0.4, 2.7)]).unwrap();
        let closed = k.moments(2).unwrap();
        for (kk, &c) in closed.iter().enumerate() {
            let power = 2.0 * kk as f64 + 1.0;
            let factorial: f64 = (1..=(2 * kk + 1)).map(|i| i as f64).product();
            let numeric = adaptive_simpson(
                0.0,
                60.0,
                |xi: f64| k.lag_average(xi).unwrap() * xi.powf(power),
                1e-12,
            )
            .unwrap()
                / factorial;
            assert!(
                (c - numeric).abs() <= 1e-8 * c.abs().max(1.0),
                "k={kk}: {c} vs {numeric}"
            );
        }
    }

    #[test]
    fn envelope_bound_holds_for_expsum_and_flags_bad_declarations() {
        let k = MemoryKernel::expsum(1.0, vec![(0.7, 1.2), (-0.4, 2.0)]).unwrap();
        assert!(k.envelope_violation(16, 64, 12.0).is_none());

        // A table whose declared envelope decays faster than its data.
        let env = Envelope { amplitude: 1.0, decay: 3.0, exponent: 1.0 };
        let t = TableKernel::from_fn(1.0, 8, 32, 4.0, env, |_, xi: f64| (-xi).exp()).unwrap();
        let k = MemoryKernel::Table(t);
        assert!(k.envelope_violation(8, 64, 4.0).is_some());
    }

    #[test]
    fn table_kernel_tail_and_interiors() {
        let env = Envelope { amplitude: 1.0, decay: 2.0, exponent: 1.0 };
        let k = TableKernel::from_fn(1.0, 16, 40, 5.0, env, |_, xi: f64| (-2.0 * xi).exp()).unwrap();
        let interior = k.eval_lag(0.25, 1.0);
        assert!((interior - (-2.0f64).exp()).abs() < 1e-3);
        let tail = k.eval_lag(0.25, 7.0);
        assert!((tail - (-14.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn kernel_json_round_trip() {
        let text = r#"{"type":"expsum","T":6.283185307179586,"terms":[{"c":1.0,"mu":1.0}]}"#;
        let k: MemoryKernel<f64> = MemoryKernel::from_json(text).unwrap();
        assert!(matches!(&k, MemoryKernel::ExpSum(e) if e.terms.len() == 1));

        let bad = r#"{"type":"expsum","T":-1.0,"terms":[]}"#;
        assert!(MemoryKernel::<f64>::from_json(bad).is_err());

        let table = r#"{"type":"table","T":1.0,"t_samples":[0.0,0.5,1.0],
            "xi_samples":[0.0,1.0],"values":[[1.0,0.5],[1.0,0.5],[1.0,0.5]],
            "envelope":{"C":1.0,"mu":1.0,"beta":1.0}}"#;
        let k2: MemoryKernel<f64> = MemoryKernel::from_json(table).unwrap();
        assert!(matches!(k2, MemoryKernel::Table(_)));
    }
}
