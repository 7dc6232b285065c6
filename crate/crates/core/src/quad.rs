//! Quadrature helpers.

use num_complex::Complex;
use num_traits::Zero;

use crate::real::Real;

/// Composite Simpson over uniformly spaced samples. An even number of
/// intervals uses Simpson throughout; otherwise the last three intervals
/// use the 3/8 rule.
pub fn simpson<T: Real>(values: &[Complex<T>], h: T) -> Complex<T> {
    let n = values.len();
    match n {
        0 | 1 => return Complex::zero(),
        2 => return (values[0] + values[1]) * (h / T::lit(2.0)),
        3 => return (values[0] + values[1] * T::lit(4.0) + values[2]) * (h / T::lit(3.0)),
        4 => {
            return (values[0] + (values[1] + values[2]) * T::lit(3.0) + values[3]) * (h * T::lit(0.375))
        }
        _ => {}
    }
    let intervals = n - 1;
    let simpson_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
    let mut acc = values[0] + values[simpson_end];
    for (k, v) in values.iter().enumerate().take(simpson_end).skip(1) {
        acc = acc + *v * if k % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
    }
    let mut total = acc * (h / T::lit(3.0));
    if simpson_end != n - 1 {
        let v = &values[simpson_end..];
        total = total + (v[0] + (v[1] + v[2]) * T::lit(3.0) + v[3]) * (h * T::lit(0.375));
    }
    total
}

/// Trapezoid sum of a periodic integrand over `[0, period)` with `n` points.
pub fn periodic_trapezoid<T: Real>(f: &impl Fn(T) -> Complex<T>, period: T, n: usize) -> Complex<T> {
    let h = period / T::from_usize(n).unwrap();
    let mut acc = Complex::zero();
    for k in 0..n {
        acc = acc + f(h * T::from_usize(k).unwrap());
    }
    acc * h
}

/// Periodic trapezoid with sample doubling until successive sums differ by
/// less than `tol` (relative above one). Returns the last sum and whether it
/// converged before `max_n` samples.
pub fn periodic_doubling<T: Real>(
    f: impl Fn(T) -> Complex<T>,
    period: T,
    start: usize,
    tol: T,
    max_n: usize,
) -> (Complex<T>, bool) {
    let mut n = start.max(4);
    let mut prev = periodic_trapezoid(&f, period, n);
    while n < max_n {
        n *= 2;
        let next = periodic_trapezoid(&f, period, n);
        let scale = next.norm().max(T::one());
        if (next - prev).norm() < tol * scale {
            return (next, true);
        }
        prev = next;
    }
    (prev, false)
}

/// Romberg integration of `f` over `[a, b]`.
pub fn romberg<T: Real>(f: impl Fn(T) -> Complex<T>, a: T, b: T, tol: T, max_level: usize) -> (Complex<T>, bool) {
    let mut rows: Vec<Vec<Complex<T>>> = Vec::new();
    let half = T::lit(0.5);
    let mut h = b - a;
    rows.push(vec![(f(a) + f(b)) * (h * half)]);
    for level in 1..=max_level {
        h = h * half;
        let count = 1usize << (level - 1);
        let mut mid = Complex::zero();
        for k in 0..count {
            mid = mid + f(a + h * T::from_usize(2 * k + 1).unwrap());
        }
        let mut row = vec![rows[level - 1][0] * half + mid * h];
        let mut factor = T::one();
        for j in 1..=level {
            factor = factor * T::lit(4.0);
            let v = row[j - 1] + (row[j - 1] - rows[level - 1][j - 1]) / (factor - T::one());
            row.push(v);
        }
        let best = row[level];
        let prev = rows[level - 1][level - 1];
        rows.push(row);
        if level >= 4 && (best - prev).norm() < tol * best.norm().max(T::one()) {
            return (best, true);
        }
    }
    (rows[max_level][max_level], false)
}

/// Legendre polynomials `P_0..=P_L` at `x` by the three-term recurrence.
pub fn legendre<T: Real>(x: T, l_max: usize) -> Vec<T> {
    let mut p = vec![T::one()];
    if l_max >= 1 {
        p.push(x);
    }
    for l in 1..l_max {
        let lf = T::from_usize(l).unwrap();
        let next = ((T::lit(2.0) * lf + T::one()) * x * p[l] - lf * p[l - 1]) / (lf + T::one());
        p.push(next);
    }
    p
}
