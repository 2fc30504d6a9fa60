//! Scalar root- and minimum-finding helpers shared by the boundary solvers.

use crate::scalar::Real;

/// Uniform grid of `count >= 2` points over `[start, stop]`.
pub fn linspace<T: Real>(start: T, stop: T, count: usize) -> Vec<T> {
    assert!(count >= 2, "linspace needs at least two points");
    let step = (stop - start) / T::of((count - 1) as f64);
    (0..count).map(|i| start + step * T::of(i as f64)).collect()
}

/// Bisection on a bracketing interval; `f(a)` and `f(b)` must differ in sign.
pub fn bisect<T: Real>(mut f: impl FnMut(T) -> T, mut a: T, mut b: T, iters: usize) -> T {
    let mut fa = f(a);
    for _ in 0..iters {
        let mid = (a + b) / T::of(2.0);
        let fm = f(mid);
        if fm == T::zero() {
            return mid;
        }
        if (fa < T::zero()) != (fm < T::zero()) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    (a + b) / T::of(2.0)
}

/// Brackets of sign changes of `f` sampled on `grid`.
///
/// Returns `(a, b)` pairs; exact zeros at grid nodes count as degenerate
/// brackets `(x, x)`. Non-finite samples are skipped.
pub fn sign_change_brackets<T: Real>(f: impl Fn(T) -> T, grid: &[T]) -> Vec<(T, T)> {
    let mut out = Vec::new();
    let mut prev: Option<(T, T)> = None;
    for &x in grid {
        let fx = f(x);
        if !fx.is_finite() {
            prev = None;
            continue;
        }
        if fx == T::zero() {
            out.push((x, x));
            prev = None;
            continue;
        }
        if let Some((px, pf)) = prev {
            if (pf < T::zero()) != (fx < T::zero()) {
                out.push((px, x));
            }
        }
        prev = Some((x, fx));
    }
    out
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_min<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T, iters: usize) -> (T, T) {
    let inv_phi = T::of(0.618_033_988_749_894_8);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / T::of(2.0);
    (x, f(x))
}

/// Indices `i` where `|values[i]|` is a strict-or-flat local minimum of the
/// sampled magnitude, excluding endpoints.
pub fn local_min_indices<T: Real>(values: &[T]) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (l, m, r) = (values[i - 1].abs(), values[i].abs(), values[i + 1].abs());
        if m <= l && m <= r && (m < l || m < r) {
            out.push(i);
        }
    }
    out
}
