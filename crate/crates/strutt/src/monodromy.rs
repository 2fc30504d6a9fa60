//! Time-domain oracle for exponential-sum kernels.
//!
//! A kernel `K(t, s) = sum_a c_a exp(-mu_a (t - s))` makes the memory integral
//! Markovian: with auxiliary states `z_a' = -mu_a z_a + c_a x`, the history
//! term equals `sum_a z_a` exactly on the memory manifold. The augmented
//! linear ODE has smooth periodic coefficients, so the fundamental matrix over
//! one period (the monodromy matrix) is computed by classical fourth-order
//! Runge-Kutta steps, and its eigenvalues are the Floquet multipliers.
//!
//! Stability bookkeeping follows the characteristic pair `(p, q)` of the two
//! dominant multipliers, `lambda^2 + p lambda + q = 0`, located against the
//! triangle `{|q| < 1, |p| < 1 + q}` with vertices A(0,-1), B(2,1), C(-2,1).

use crate::error::{Error, Result};
use crate::kernels::{ExpTerm, MemoryKernel};
use crate::linalg::RealMatrix;
use crate::roots::{golden_min, linspace};
use crate::scalar::Real;
use num_complex::Complex;
use rayon::prelude::*;

/// Markovian embedding of the scalar second-order equation with an
/// exponential-sum kernel: state `(x, x', z_1 .. z_A)`.
#[derive(Clone, Debug)]
pub struct AugmentedSystem<T> {
    pub a0: T,
    pub a1: T,
    pub theta: T,
    pub terms: Vec<ExpTerm<T>>,
}

impl<T: Real> AugmentedSystem<T> {
    pub fn dimension(&self) -> usize {
        2 + self.terms.len()
    }

    pub fn period(&self) -> T {
        T::of(2.0) * T::PI() / self.theta
    }

    /// Trace of the coefficient matrix, constant in time: `-sum_a mu_a`.
    pub fn trace(&self) -> T {
        -self.terms.iter().map(|t| t.rate).fold(T::zero(), |a, b| a + b)
    }

    /// `out = J(t) state` for the block-sparse coefficient matrix, where
    /// `state` holds `cols` stacked columns of length `dimension()`.
    fn apply(&self, t: T, state: &[T], out: &mut [T], cols: usize) {
        let d = self.dimension();
        let at = self.a0 + self.a1 * (self.theta * t).cos();
        for c in 0..cols {
            let col = &state[c * d..(c + 1) * d];
            let x = col[0];
            let mut mem = T::zero();
            for z in &col[2..] {
                mem = mem + *z;
            }
            let o = &mut out[c * d..(c + 1) * d];
            o[0] = col[1];
            o[1] = -at * x + mem;
            for (k, term) in self.terms.iter().enumerate() {
                o[2 + k] = term.amplitude * x - term.rate * col[2 + k];
            }
        }
    }
}

/// Builds the augmented system; only exponential-sum kernels embed exactly.
pub fn embed<T: Real>(
    kernel: &MemoryKernel<T>,
    a0: T,
    a1: T,
    theta: T,
) -> Result<AugmentedSystem<T>> {
    if !(theta > T::zero()) {
        return Err(Error::Invalid("theta must be positive".into()));
    }
    let exp = kernel.as_expsum().ok_or_else(|| {
        Error::UnsupportedKernel(
            "the monodromy oracle needs an exponential-sum kernel; \
             use the determinant pathway for tabulated kernels"
                .into(),
        )
    })?;
    Ok(AugmentedSystem {
        a0,
        a1,
        theta,
        terms: exp.terms.clone(),
    })
}

/// Fundamental matrix over one period from the identity, by `steps` classical
/// Runge-Kutta stages of order 4.
pub fn integrate_period<T: Real>(sys: &AugmentedSystem<T>, steps: usize) -> Result<RealMatrix<T>> {
    if steps == 0 {
        return Err(Error::Invalid("step count must be positive".into()));
    }
    let d = sys.dimension();
    let len = d * d;
    let h = sys.period() / T::of(steps as f64);
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::Numerical("step size underflow".into()));
    }
    // Column-major state: x[c * d + r] holds X_{r,c}.
    let mut x = vec![T::zero(); len];
    for c in 0..d {
        x[c * d + c] = T::one();
    }
    let mut k1 = vec![T::zero(); len];
    let mut k2 = vec![T::zero(); len];
    let mut k3 = vec![T::zero(); len];
    let mut k4 = vec![T::zero(); len];
    let mut stage = vec![T::zero(); len];
    let half = T::of(0.5);
    let sixth = T::of(1.0 / 6.0);
    for i in 0..steps {
        let t = h * T::of(i as f64);
        sys.apply(t, &x, &mut k1, d);
        for j in 0..len {
            stage[j] = x[j] + half * h * k1[j];
        }
        sys.apply(t + half * h, &stage, &mut k2, d);
        for j in 0..len {
            stage[j] = x[j] + half * h * k2[j];
        }
        sys.apply(t + half * h, &stage, &mut k3, d);
        for j in 0..len {
            stage[j] = x[j] + h * k3[j];
        }
        sys.apply(t + h, &stage, &mut k4, d);
        for j in 0..len {
            x[j] = x[j] + sixth * h * (k1[j] + T::of(2.0) * (k2[j] + k3[j]) + k4[j]);
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite fundamental matrix".into()));
    }
    Ok(RealMatrix::<T>::from_fn(d, |r, c| x[c * d + r]))
}

/// Integration controls: a fixed step count, optionally refined by doubling
/// until the monodromy entries settle below `refine_tol`.
#[derive(Clone, Copy, Debug)]
pub struct IntegrationOptions<T> {
    pub steps: usize,
    pub refine_tol: Option<T>,
}

impl<T: Real> Default for IntegrationOptions<T> {
    fn default() -> Self {
        Self {
            steps: 4096,
            refine_tol: Some(T::of(1e-10)),
        }
    }
}

/// Integrates with step doubling until entries change less than the tolerance.
pub fn integrate_period_refined<T: Real>(
    sys: &AugmentedSystem<T>,
    opts: &IntegrationOptions<T>,
) -> Result<RealMatrix<T>> {
    let mut steps = opts.steps.max(8);
    let mut m = integrate_period(sys, steps)?;
    let Some(tol) = opts.refine_tol else {
        return Ok(m);
    };
    for _ in 0..6 {
        steps *= 2;
        let refined = integrate_period(sys, steps)?;
        let diff = refined
            .data()
            .iter()
            .zip(m.data())
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max);
        m = refined;
        if diff < tol {
            break;
        }
    }
    Ok(m)
}

/// Region of the `(p, q)` plane relative to the stability triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PqRegion {
    Interior,
    Exterior,
    SideAb,
    SideAc,
    SideBc,
    VertexA,
    VertexB,
    VertexC,
}

impl std::fmt::Display for PqRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PqRegion::Interior => "interior",
            PqRegion::Exterior => "exterior",
            PqRegion::SideAb => "sideAB",
            PqRegion::SideAc => "sideAC",
            PqRegion::SideBc => "sideBC",
            PqRegion::VertexA => "vertexA",
            PqRegion::VertexB => "vertexB",
            PqRegion::VertexC => "vertexC",
        };
        write!(f, "{s}")
    }
}

/// Locates `(p, q)` against the stability triangle within `tol`.
pub fn classify_pq<T: Real>(p: T, q: T, tol: T) -> PqRegion {
    let one = T::one();
    let two = T::of(2.0);
    let vertices = [
        (T::zero(), -one, PqRegion::VertexA),
        (two, one, PqRegion::VertexB),
        (-two, one, PqRegion::VertexC),
    ];
    for (pv, qv, label) in vertices {
        if (p - pv).abs() <= tol && (q - qv).abs() <= tol {
            return label;
        }
    }
    let open_q = q.abs() < one;
    if (p - (one + q)).abs() <= tol && open_q {
        return PqRegion::SideAb;
    }
    if (p + (one + q)).abs() <= tol && open_q {
        return PqRegion::SideAc;
    }
    if (q - one).abs() <= tol && p.abs() < two {
        return PqRegion::SideBc;
    }
    if q.abs() < one && p.abs() < one + q {
        PqRegion::Interior
    } else {
        PqRegion::Exterior
    }
}

/// Multiplier-based stability of the solution family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    /// A repeated multiplier sits on the unit circle within tolerance; the
    /// attached label locates `(p, q)` on the stability triangle.
    Boundary(PqRegion),
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stability::Stable => write!(f, "stable"),
            Stability::Unstable => write!(f, "unstable"),
            Stability::Boundary(r) => write!(f, "boundary:{r}"),
        }
    }
}

/// Monodromy matrix, Floquet multipliers, and classifications.
#[derive(Clone, Debug)]
pub struct MonodromyResult<T> {
    pub matrix: RealMatrix<T>,
    pub multipliers: Vec<Complex<T>>,
    /// Characteristic pair of the two dominant multipliers.
    pub p: T,
    pub q: T,
    pub spectral_radius: T,
    pub stability: Stability,
    pub pq_region: PqRegion,
    /// False when some memory-mode multiplier exceeds `exp(-mu_min T / 2)`
    /// plus tolerance, i.e. the 2x2 reading of `(p, q)` is questionable.
    pub memory_modes_subdominant: bool,
}

/// Classification tolerance on `| |lambda| - 1 |` and on the triangle tests.
pub const CLASSIFY_TOL: f64 = 1e-6;

/// Computes the monodromy matrix, its multipliers, the characteristic pair of
/// the dominant 2x2 sector, and the stability classification.
pub fn monodromy<T: Real>(
    sys: &AugmentedSystem<T>,
    opts: &IntegrationOptions<T>,
) -> Result<MonodromyResult<T>> {
    let m = integrate_period_refined(sys, opts)?;
    monodromy_of_matrix(sys, m)
}

fn monodromy_of_matrix<T: Real>(
    sys: &AugmentedSystem<T>,
    m: RealMatrix<T>,
) -> Result<MonodromyResult<T>> {
    let d = sys.dimension();
    let mut multipliers = T::eigenvalues(d, m.data());
    multipliers.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    if multipliers
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::Numerical(
            "eigenvalue solver returned non-finite multipliers".into(),
        ));
    }

    let tol = T::of(CLASSIFY_TOL);
    let lead = multipliers[0];
    let partner_idx = if multipliers.len() < 2 {
        None
    } else if lead.im.abs() > T::of(1e-12) * lead.norm().max(T::one()) {
        // Real matrix: the complex leader pairs with (the numerical image of)
        // its conjugate.
        let target = lead.conj();
        (1..multipliers.len()).min_by(|&i, &j| {
            (multipliers[i] - target)
                .norm()
                .partial_cmp(&(multipliers[j] - target).norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    } else {
        Some(1)
    };
    let partner = partner_idx.map(|i| multipliers[i]).unwrap_or(lead);
    let p = -(lead + partner).re;
    let q = (lead * partner).re;
    let spectral_radius = lead.norm();

    let rest_bound = if sys.terms.is_empty() {
        T::infinity()
    } else {
        let mu_min = sys
            .terms
            .iter()
            .map(|t| t.rate)
            .fold(T::infinity(), T::min);
        (-mu_min * sys.period() / T::of(2.0)).exp() + tol
    };
    let mut memory_modes_subdominant = true;
    for (i, z) in multipliers.iter().enumerate() {
        if i == 0 || Some(i) == partner_idx {
            continue;
        }
        if z.norm() >= rest_bound {
            memory_modes_subdominant = false;
        }
    }

    let pq_region = classify_pq(p, q, tol);
    let on_unit = |z: &Complex<T>| (z.norm() - T::one()).abs() <= tol;
    let non_simple_unit = multipliers.iter().enumerate().any(|(i, zi)| {
        on_unit(zi)
            && multipliers
                .iter()
                .enumerate()
                .any(|(j, zj)| i != j && (*zi - *zj).norm() <= tol)
    });
    let stability = if spectral_radius > T::one() + tol {
        Stability::Unstable
    } else if non_simple_unit {
        Stability::Boundary(pq_region)
    } else {
        Stability::Stable
    };

    Ok(MonodromyResult {
        matrix: m,
        multipliers,
        p,
        q,
        spectral_radius,
        stability,
        pq_region,
        memory_modes_subdominant,
    })
}

/// Well-posedness gate for the memory Cauchy problem: minimizes
/// `g(gamma) = C_f/gamma + C_g/(gamma (mu - gamma))` over `(0, mu)` and
/// reports the contraction witness when `g < 1`, together with the literal
/// inequality `0 < mu - C_f < sqrt(2) C_g`.
#[derive(Clone, Copy, Debug)]
pub struct WellPosedness<T> {
    pub gamma_star: Option<T>,
    pub g_min: T,
    pub a4_holds: bool,
}

pub fn check_wellposedness<T: Real>(c_f: T, c_g: T, mu: T) -> Result<WellPosedness<T>> {
    if !(mu > T::zero()) || c_f < T::zero() || c_g < T::zero() {
        return Err(Error::Invalid("need mu > 0 and C_f, C_g >= 0".into()));
    }
    let a4_holds = T::zero() < mu - c_f && mu - c_f < T::of(2.0).sqrt() * c_g;
    if c_f == T::zero() && c_g == T::zero() {
        return Ok(WellPosedness {
            gamma_star: Some(mu / T::of(2.0)),
            g_min: T::zero(),
            a4_holds,
        });
    }
    if c_f >= mu {
        // C_f / gamma > 1 on all of (0, mu).
        return Ok(WellPosedness {
            gamma_star: None,
            g_min: c_f / mu,
            a4_holds,
        });
    }
    let g = |gamma: T| c_f / gamma + c_g / (gamma * (mu - gamma));
    let margin = mu * T::of(1e-9);
    let (gamma_star, g_min) = golden_min(g, margin, mu - margin, 200);
    Ok(WellPosedness {
        gamma_star: (g_min < T::one()).then_some(gamma_star),
        g_min,
        a4_holds,
    })
}

/// One classified grid point of a chart scan.
#[derive(Clone, Copy, Debug)]
pub struct ChartCell<T> {
    pub theta: T,
    pub a1: T,
    pub p: T,
    pub q: T,
    pub spectral_radius: T,
    pub stability: Stability,
}

/// Classification grid over `(theta, a1)` at fixed `a0`, with extracted
/// boundary polylines.
#[derive(Clone, Debug)]
pub struct StabilityChart<T> {
    pub a0: T,
    pub theta_axis: Vec<T>,
    pub a1_axis: Vec<T>,
    /// Row-major over `a1` rows: index `j * theta_axis.len() + i`.
    pub cells: Vec<ChartCell<T>>,
    pub boundaries: Vec<Vec<(T, T)>>,
}

impl<T: Real> StabilityChart<T> {
    pub fn cell(&self, i_theta: usize, j_a1: usize) -> &ChartCell<T> {
        &self.cells[j_a1 * self.theta_axis.len() + i_theta]
    }
}

/// Scans the `(theta, a1)` grid with the monodromy oracle and extracts
/// boundary polylines where the spectral radius crosses one (plus the
/// classification tolerance, so neutrally stable regions sit strictly below
/// the threshold). Cells are evaluated independently and assembled in
/// row-major order, so the output is deterministic.
pub fn scan_chart<T: Real>(
    kernel: &MemoryKernel<T>,
    a0: T,
    theta_range: (T, T),
    a1_range: (T, T),
    resolution: (usize, usize),
    opts: &IntegrationOptions<T>,
) -> Result<StabilityChart<T>> {
    let (n_theta, n_a1) = resolution;
    if n_theta == 0 || n_a1 == 0 {
        return Err(Error::Invalid("resolution must be positive".into()));
    }
    let axis = |range: (T, T), n: usize, name: &str| -> Result<Vec<T>> {
        if n == 1 {
            if range.0 != range.1 {
                return Err(Error::Invalid(format!(
                    "{name} range needs more than one sample"
                )));
            }
            Ok(vec![range.0])
        } else {
            if !(range.1 > range.0) {
                return Err(Error::Invalid(format!("{name} range must be increasing")));
            }
            Ok(linspace(range.0, range.1, n))
        }
    };
    let theta_axis = axis(theta_range, n_theta, "theta")?;
    let a1_axis = axis(a1_range, n_a1, "a1")?;

    // theta fixes the forcing period cell by cell; only the exponential terms
    // of the kernel are consulted.
    let exp = kernel.as_expsum().ok_or_else(|| {
        Error::UnsupportedKernel(
            "chart scans use the monodromy oracle, which needs an exponential-sum kernel; \
             tabulated kernels only support the determinant pathway"
                .into(),
        )
    })?;

    let cells: Result<Vec<ChartCell<T>>> = (0..n_theta * n_a1)
        .into_par_iter()
        .map(|idx| {
            let i = idx % n_theta;
            let j = idx / n_theta;
            let theta = theta_axis[i];
            let a1 = a1_axis[j];
            let sys = AugmentedSystem {
                a0,
                a1,
                theta,
                terms: exp.terms.clone(),
            };
            let r = monodromy(&sys, opts)?;
            Ok(ChartCell {
                theta,
                a1,
                p: r.p,
                q: r.q,
                spectral_radius: r.spectral_radius,
                stability: r.stability,
            })
        })
        .collect();
    let cells = cells?;

    let level = T::one() + T::of(CLASSIFY_TOL);
    let field = |i: usize, j: usize| cells[j * n_theta + i].spectral_radius - level;
    let boundaries = extract_level_curves(&theta_axis, &a1_axis, field);

    Ok(StabilityChart {
        a0,
        theta_axis,
        a1_axis,
        cells,
        boundaries,
    })
}

/// Marching-squares segments of the zero level of `f` on the tensor grid,
/// chained into polylines. Linear interpolation along grid edges.
fn extract_level_curves<T: Real>(
    xs: &[T],
    ys: &[T],
    f: impl Fn(usize, usize) -> T,
) -> Vec<Vec<(T, T)>> {
    let nx = xs.len();
    let ny = ys.len();
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let cross = |a: T, b: T, xa: T, xb: T| -> T {
        let denom = a - b;
        if denom == T::zero() {
            (xa + xb) / T::of(2.0)
        } else {
            xa + (xb - xa) * (a / denom)
        }
    };
    let mut segments: Vec<((T, T), (T, T))> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v = [f(i, j), f(i + 1, j), f(i + 1, j + 1), f(i, j + 1)];
            let inside = |x: T| x < T::zero();
            let case = (inside(v[0]) as u8)
                | ((inside(v[1]) as u8) << 1)
                | ((inside(v[2]) as u8) << 2)
                | ((inside(v[3]) as u8) << 3);
            if case == 0 || case == 15 {
                continue;
            }
            // Edge crossings: bottom (0-1), right (1-2), top (3-2), left (0-3).
            let bottom = || (cross(v[0], v[1], xs[i], xs[i + 1]), ys[j]);
            let right = || (xs[i + 1], cross(v[1], v[2], ys[j], ys[j + 1]));
            let top = || (cross(v[3], v[2], xs[i], xs[i + 1]), ys[j + 1]);
            let left = || (xs[i], cross(v[0], v[3], ys[j], ys[j + 1]));
            let mut push = |a: (T, T), b: (T, T)| segments.push((a, b));
            match case {
                1 | 14 => push(left(), bottom()),
                2 | 13 => push(bottom(), right()),
                3 | 12 => push(left(), right()),
                4 | 11 => push(right(), top()),
                6 | 9 => push(bottom(), top()),
                7 | 8 => push(left(), top()),
                5 => {
                    push(left(), bottom());
                    push(right(), top());
                }
                10 => {
                    push(bottom(), right());
                    push(left(), top());
                }
                _ => unreachable!(),
            }
        }
    }
    chain_segments(segments)
}

fn chain_segments<T: Real>(segments: Vec<((T, T), (T, T))>) -> Vec<Vec<(T, T)>> {
    let key = |p: (T, T)| -> (u64, u64) {
        (
            p.0.to_f64().unwrap_or(f64::NAN).to_bits(),
            p.1.to_f64().unwrap_or(f64::NAN).to_bits(),
        )
    };
    let mut used = vec![false; segments.len()];
    let mut by_endpoint: std::collections::HashMap<(u64, u64), Vec<usize>> =
        std::collections::HashMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        by_endpoint.entry(key(*a)).or_default().push(idx);
        by_endpoint.entry(key(*b)).or_default().push(idx);
    }
    let mut polylines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut line = vec![a, b];
        // Extend forward from the tail, then backward from the head.
        for end in [false, true] {
            loop {
                let tip = if end { line[0] } else { *line.last().unwrap() };
                let Some(cands) = by_endpoint.get(&key(tip)) else {
                    break;
                };
                let next = cands.iter().copied().find(|&i| !used[i]);
                let Some(i) = next else { break };
                used[i] = true;
                let (sa, sb) = segments[i];
                let far = if key(sa) == key(tip) { sb } else { sa };
                if end {
                    line.insert(0, far);
                } else {
                    line.push(far);
                }
            }
        }
        polylines.push(line);
    }
    polylines
}
