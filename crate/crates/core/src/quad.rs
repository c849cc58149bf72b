//! Quadrature helpers: composite Simpson weights on uniform grids (with a
//! 3/8 tail when the interval count is odd) and Gauss-Legendre rules for
//! the scalar oracles.

use crate::scalar::{from_usize, Real};

/// Weights for nodes `0..=m` on a uniform grid of spacing `h = 1` (scale by
/// `h` at the call site). Composite Simpson when `m` is even; Simpson plus a
/// 3/8 tail when `m` is odd (>= 3); trapezoid when `m = 1`; empty when `m = 0`.
pub fn simpson_weights<T: Real>(m: usize) -> Vec<T> {
    let mut w = vec![T::zero(); m + 1];
    if m == 0 {
        return w;
    }
    if m == 1 {
        w[0] = T::lit(0.5);
        w[1] = T::lit(0.5);
        return w;
    }
    let simpson_end = if m % 2 == 0 { m } else { m - 3 };
    if simpson_end > 0 {
        let third = T::lit(1.0 / 3.0);
        w[0] += third;
        w[simpson_end] += third;
        for i in 1..simpson_end {
            w[i] += if i % 2 == 1 { T::lit(4.0 / 3.0) } else { T::lit(2.0 / 3.0) };
        }
    }
    if m % 2 == 1 {
        let c = T::lit(3.0 / 8.0);
        w[m - 3] += c;
        w[m - 2] += c * T::lit(3.0);
        w[m - 1] += c * T::lit(3.0);
        w[m] += c;
    }
    w
}

/// Integral of uniformly spaced samples with spacing `h`.
pub fn integrate_uniform<T: Real>(values: &[T], h: T) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let w = simpson_weights::<T>(values.len() - 1);
    let mut acc = T::zero();
    for (v, wi) in values.iter().zip(&w) {
        acc += *v * *wi;
    }
    acc * h
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 2);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = from_usize::<T>(n);
    for i in 0..(n + 1) / 2 {
        // Chebyshev-like initial guess.
        let guess = (T::PI() * (from_usize::<T>(i) + T::lit(0.75))
            / (nf + T::lit(0.5)))
        .cos();
        let mut x = guess;
        let mut dp = T::zero();
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_{n-1}(x).
            let mut p0 = T::one();
            let mut p1 = x;
            for k in 2..=n {
                let kf = from_usize::<T>(k);
                let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1
                    - (kf - T::one()) * p0)
                    / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - T::one());
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// n-point Gauss-Legendre integral of `f` over `[a, b]`.
pub fn gl_integrate<T: Real>(a: T, b: T, n: usize, f: impl Fn(T) -> T) -> T {
    let (nodes, weights) = gauss_legendre::<T>(n);
    let half = (b - a) * T::lit(0.5);
    let mid = (b + a) * T::lit(0.5);
    let mut acc = T::zero();
    for (x, w) in nodes.iter().zip(&weights) {
        acc += *w * f(mid + half * *x);
    }
    acc * half
}

/// Semi-infinite integral of a rapidly decaying integrand: mapped GL panels
/// of geometrically growing width until a panel contributes nothing.
pub fn gl_integrate_decaying<T: Real>(n: usize, f: impl Fn(T) -> T) -> T {
    let mut total = T::zero();
    let mut a = T::zero();
    let mut width = T::one();
    for _ in 0..200 {
        let piece = gl_integrate(a, a + width, n, &f);
        total += piece;
        if piece.abs() <= T::epsilon() * total.abs().max(T::one()) {
            break;
        }
        a += width;
        width *= T::lit(1.5);
    }
    total
}
