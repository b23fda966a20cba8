//! One-dimensional minimization: grid scan followed by golden-section search.

use crate::scalar::Real;

/// Location and value of a minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub x: T,
    pub value: T,
}

/// Golden-section search on `[a, b]` until the bracket is narrower than `tol`.
///
/// The best point ever evaluated (including the end points) is returned, so
/// the result is never worse than `f(a)` or `f(b)`.
pub fn golden_section<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: T) -> Minimum<T> {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (a, b);
    let mut best = Minimum { x: a, value: f(a) };
    let fb = f(b);
    if fb < best.value {
        best = Minimum { x: b, value: fb };
    }
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a).abs() > tol && iterations < 200 {
        if fc <= fd || fd.is_nan() {
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
        iterations += 1;
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.value || best.value.is_nan() {
            best = Minimum { x, value: v };
        }
    }
    best
}

/// Scans `grid + 1` evenly spaced points of `[lo, hi]`, then refines around
/// the best grid point by golden-section search on its neighbouring cells.
pub fn grid_then_golden<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    lo: T,
    hi: T,
    grid: usize,
    tol: T,
) -> Minimum<T> {
    assert!(grid >= 2);
    let step = (hi - lo) / T::from_usize(grid).unwrap();
    let at = |i: usize| {
        if i == grid {
            hi
        } else {
            lo + step * T::from_usize(i).unwrap()
        }
    };
    let mut best_i = 0;
    let mut best_v = T::infinity();
    for i in 0..=grid {
        let v = f(at(i));
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    if !best_v.is_finite() {
        return Minimum {
            x: at(best_i),
            value: best_v,
        };
    }
    let a = at(best_i.saturating_sub(1));
    let b = at((best_i + 1).min(grid));
    let refined = golden_section(&mut f, a, b, tol);
    if refined.value <= best_v {
        refined
    } else {
        Minimum {
            x: at(best_i),
            value: best_v,
        }
    }
}
