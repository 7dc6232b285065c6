//! Complex scalar, vector and 2x2 matrix kernel with branch-tracked
//! square roots and logarithms.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

/// Right state (column) or left state (row) of a two-level system.
pub type Spinor<T> = [Complex<T>; 2];

/// Shorthand for `Complex::new`.
#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Complex number from `f64` parts.
#[inline]
pub fn cl<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Bilinear pairing of a row with a column: `ã a + b̃ b`.
#[inline]
pub fn pair<T: Real>(bra: &Spinor<T>, ket: &Spinor<T>) -> Complex<T> {
    bra[0] * ket[0] + bra[1] * ket[1]
}

/// Absolute closeness for magnitudes up to one, relative beyond.
pub fn close<T: Real>(a: Complex<T>, b: Complex<T>, tol: T) -> bool {
    let scale = a.norm().max(b.norm()).max(T::one());
    (a - b).norm() <= tol * scale
}

/// Complex 3-vector with a bilinear (non-conjugating) dot product.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexTriple<T: Real> {
    pub x: Complex<T>,
    pub y: Complex<T>,
    pub z: Complex<T>,
}

impl<T: Real> ComplexTriple<T> {
    pub fn new(x: Complex<T>, y: Complex<T>, z: Complex<T>) -> Self {
        Self { x, y, z }
    }

    pub fn real(x: T, y: T, z: T) -> Self {
        Self::new(x.into(), y.into(), z.into())
    }

    pub fn zero() -> Self {
        Self::new(Complex::zero(), Complex::zero(), Complex::zero())
    }

    pub fn to_array(self) -> [Complex<T>; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [Complex<T>; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn dot(&self, b: &Self) -> Complex<T> {
        self.x * b.x + self.y * b.y + self.z * b.z
    }

    pub fn cross(&self, b: &Self) -> Self {
        Self::new(
            self.y * b.z - self.z * b.y,
            self.z * b.x - self.x * b.z,
            self.x * b.y - self.y * b.x,
        )
    }

    /// Euclidean (Hermitian) length, used only for scales and tolerances.
    pub fn norm(&self) -> T {
        (self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()).sqrt()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.x) && is_finite(self.y) && is_finite(self.z)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self::new(f(self.x), f(self.y), f(self.z))
    }
}

impl<T: Real> Add for ComplexTriple<T> {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self::new(self.x + b.x, self.y + b.y, self.z + b.z)
    }
}

impl<T: Real> Sub for ComplexTriple<T> {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Self::new(self.x - b.x, self.y - b.y, self.z - b.z)
    }
}

impl<T: Real> Neg for ComplexTriple<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<Complex<T>> for ComplexTriple<T> {
    type Output = Self;
    fn mul(self, s: Complex<T>) -> Self {
        self.scale(s)
    }
}

/// Free-function form of [`ComplexTriple::dot`].
pub fn cdot<T: Real>(a: &ComplexTriple<T>, b: &ComplexTriple<T>) -> Complex<T> {
    a.dot(b)
}

/// Free-function form of [`ComplexTriple::cross`].
pub fn ccross<T: Real>(a: &ComplexTriple<T>, b: &ComplexTriple<T>) -> ComplexTriple<T> {
    a.cross(b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMat2<T: Real> {
    pub a11: Complex<T>,
    pub a12: Complex<T>,
    pub a21: Complex<T>,
    pub a22: Complex<T>,
}

impl<T: Real> ComplexMat2<T> {
    pub fn new(a11: Complex<T>, a12: Complex<T>, a21: Complex<T>, a22: Complex<T>) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn zero() -> Self {
        let z = Complex::zero();
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex::one(), Complex::zero());
        Self::new(o, z, z, o)
    }

    pub fn sigma_x() -> Self {
        let (o, z) = (Complex::one(), Complex::zero());
        Self::new(z, o, o, z)
    }

    pub fn sigma_y() -> Self {
        let (i, z) = (Complex::<T>::i(), Complex::zero());
        Self::new(z, -i, i, z)
    }

    pub fn sigma_z() -> Self {
        let (o, z) = (Complex::<T>::one(), Complex::zero());
        Self::new(o, z, z, -o)
    }

    /// `c0·I + v·σ`.
    pub fn from_pauli(c0: Complex<T>, v: &ComplexTriple<T>) -> Self {
        let i = Complex::<T>::i();
        Self::new(c0 + v.z, v.x - i * v.y, v.x + i * v.y, c0 - v.z)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn trace(&self) -> Complex<T> {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex<T> {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        (self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr())
            .sqrt()
    }

    pub fn apply(&self, v: &Spinor<T>) -> Spinor<T> {
        [self.a11 * v[0] + self.a12 * v[1], self.a21 * v[0] + self.a22 * v[1]]
    }

    /// Row vector times matrix.
    pub fn apply_left(&self, w: &Spinor<T>) -> Spinor<T> {
        [w[0] * self.a11 + w[1] * self.a21, w[0] * self.a12 + w[1] * self.a22]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == T::zero() {
            return None;
        }
        Some(Self::new(self.a22, -self.a12, -self.a21, self.a11).scale(d.inv()))
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.a11) && is_finite(self.a12) && is_finite(self.a21) && is_finite(self.a22)
    }
}

impl<T: Real> Mul for ComplexMat2<T> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        Self::new(
            self.a11 * b.a11 + self.a12 * b.a21,
            self.a11 * b.a12 + self.a12 * b.a22,
            self.a21 * b.a11 + self.a22 * b.a21,
            self.a21 * b.a12 + self.a22 * b.a22,
        )
    }
}

impl<T: Real> Add for ComplexMat2<T> {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self::new(self.a11 + b.a11, self.a12 + b.a12, self.a21 + b.a21, self.a22 + b.a22)
    }
}

impl<T: Real> Sub for ComplexMat2<T> {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Self::new(self.a11 - b.a11, self.a12 - b.a12, self.a21 - b.a21, self.a22 - b.a22)
    }
}

/// Principal square root: `Re ≥ 0`, and `Im ≥ 0` when `Re = 0`.
pub fn csqrt_principal<T: Real>(z: Complex<T>) -> Complex<T> {
    let (x, y) = (z.re, z.im);
    if x == T::zero() && y == T::zero() {
        return Complex::zero();
    }
    let two = T::lit(2.0);
    let r = x.hypot(y);
    let a = ((r + x.abs()) / two).sqrt();
    if x >= T::zero() {
        // y == -0.0 folds onto +0.
        Complex::new(a, y / (two * a) + T::zero())
    } else {
        let im = if y < T::zero() { -a } else { a };
        Complex::new(y.abs() / (two * a), im)
    }
}

/// Square-root branch carried along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchState<T: Real> {
    /// Last accepted root; `None` starts on the principal branch.
    pub current_value: Option<Complex<T>>,
    /// Acceptance ratio: the nearer candidate must be closer than this
    /// fraction of the farther one.
    pub continuation_tolerance: T,
}

impl<T: Real> Default for BranchState<T> {
    fn default() -> Self {
        Self::principal()
    }
}

impl<T: Real> BranchState<T> {
    pub fn principal() -> Self {
        Self { current_value: None, continuation_tolerance: T::lit(0.5) }
    }

    pub fn at(value: Complex<T>) -> Self {
        Self { current_value: Some(value), ..Self::principal() }
    }
}

/// Square root continuously connected to `state.current_value`.
pub fn csqrt_continued<T: Real>(
    z: Complex<T>,
    state: BranchState<T>,
) -> Result<(Complex<T>, BranchState<T>)> {
    let s = csqrt_principal(z);
    let prev = match state.current_value {
        None => return Ok((s, BranchState { current_value: Some(s), ..state })),
        Some(p) => p,
    };
    let dp = (s - prev).norm();
    let dm = (-s - prev).norm();
    let (pick, near, far) = if dp <= dm { (s, dp, dm) } else { (-s, dm, dp) };
    if far == T::zero() {
        return Ok((pick, BranchState { current_value: Some(pick), ..state }));
    }
    if near < state.continuation_tolerance * far {
        Ok((pick, BranchState { current_value: Some(pick), ..state }))
    } else {
        Err(Error::StepTooLarge)
    }
}

/// Continued square roots at the points of `values`, in order.
pub fn csqrt_along<T: Real>(
    values: &[Complex<T>],
    mut state: BranchState<T>,
) -> Result<(Vec<Complex<T>>, BranchState<T>)> {
    let mut out = Vec::with_capacity(values.len());
    for &z in values {
        let (s, next) = csqrt_continued(z, state)?;
        out.push(s);
        state = next;
    }
    Ok((out, state))
}

/// Continued square roots of `f` on a uniform grid of `n` intervals over
/// `[s0, s1]`, bisecting intervals where a step is rejected.
pub fn csqrt_path<T: Real>(
    f: impl Fn(T) -> Complex<T>,
    s0: T,
    s1: T,
    n: usize,
    state: BranchState<T>,
) -> Result<(Vec<Complex<T>>, BranchState<T>)> {
    fn refine<T: Real>(
        f: &impl Fn(T) -> Complex<T>,
        a: T,
        b: T,
        state: BranchState<T>,
        depth: u32,
    ) -> Result<BranchState<T>> {
        match csqrt_continued(f(b), state) {
            Ok((_, next)) => Ok(next),
            Err(Error::StepTooLarge) if depth < 40 => {
                let m = (a + b) / T::lit(2.0);
                let mid = refine(f, a, m, state, depth + 1)?;
                refine(f, m, b, mid, depth + 1)
            }
            Err(e) => Err(e),
        }
    }
    let n = n.max(1);
    let h = (s1 - s0) / T::from_usize(n).unwrap();
    let (first, mut state) = csqrt_continued(f(s0), state)?;
    let mut out = vec![first];
    for k in 1..=n {
        let a = s0 + h * T::from_usize(k - 1).unwrap();
        let b = if k == n { s1 } else { s0 + h * T::from_usize(k).unwrap() };
        state = refine(&f, a, b, state, 0)?;
        out.push(state.current_value.expect("set by continuation"));
    }
    Ok((out, state))
}

fn log_step<T: Real>(prev: Complex<T>, next: Complex<T>) -> Result<T> {
    if prev.norm() == T::zero() || next.norm() == T::zero() {
        return Err(Error::NonFinite("logarithm of zero"));
    }
    Ok((next / prev).arg())
}

/// Logarithms of a series with continuous imaginary part.
pub fn clog_unwrapped<T: Real>(series: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    unwrap_impl(series, true)
}

/// As [`clog_unwrapped`], but a step of π or more takes the principal
/// increment instead of failing.
pub fn clog_unwrapped_lenient<T: Real>(series: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    unwrap_impl(series, false)
}

fn unwrap_impl<T: Real>(series: &[Complex<T>], strict: bool) -> Result<Vec<Complex<T>>> {
    let mut out: Vec<Complex<T>> = Vec::with_capacity(series.len());
    let limit = T::PI() * (T::one() - T::lit(1e-12));
    for (k, &z) in series.iter().enumerate() {
        if !is_finite(z) {
            return Err(Error::NonFinite("clog_unwrapped input"));
        }
        if k == 0 {
            if z.norm() == T::zero() {
                return Err(Error::NonFinite("logarithm of zero"));
            }
            out.push(z.ln());
            continue;
        }
        let d = log_step(series[k - 1], z)?;
        if strict && d.abs() >= limit {
            return Err(Error::PhaseStepTooLarge { index: k });
        }
        let im = out[k - 1].im + d;
        out.push(Complex::new(z.norm().ln(), im));
    }
    Ok(out)
}

/// Logarithm of `f` at each time in `times`, continuous in t, starting on
/// the principal branch at `times[0]`. The grid must resolve smooth
/// winding (aliased steps go unnoticed); intervals with a phase step above
/// π/4 are bisected; a step that stays unresolved (an exact zero crossing)
/// takes the principal increment.
pub fn log_continued<T: Real>(f: impl Fn(T) -> Complex<T>, times: &[T]) -> Result<Vec<Complex<T>>> {
    fn dphase<T: Real>(
        f: &impl Fn(T) -> Complex<T>,
        ta: T,
        fa: Complex<T>,
        tb: T,
        fb: Complex<T>,
        depth: u32,
    ) -> Result<T> {
        let d = log_step(fa, fb)?;
        if d.abs() <= T::FRAC_PI_4() || depth >= 60 {
            return Ok(d);
        }
        let tm = (ta + tb) / T::lit(2.0);
        let fm = f(tm);
        if !is_finite(fm) || fm.norm() == T::zero() {
            return Ok(d);
        }
        Ok(dphase(f, ta, fa, tm, fm, depth + 1)? + dphase(f, tm, fm, tb, fb, depth + 1)?)
    }
    let mut out = Vec::with_capacity(times.len());
    let mut prev: Option<(T, Complex<T>, T)> = None;
    for &t in times {
        let z = f(t);
        if !is_finite(z) || z.norm() == T::zero() {
            return Err(Error::NonFinite("logarithm of zero"));
        }
        let arg = match prev {
            None => z.arg(),
            Some((tp, zp, ap)) => ap + dphase(&f, tp, zp, t, z, 0)?,
        };
        out.push(Complex::new(z.norm().ln(), arg));
        prev = Some((t, z, arg));
    }
    Ok(out)
}

const SERIES_X: f64 = 1e-8;

/// `cos √x`, entire in x.
pub fn cos_sqrt<T: Real>(x: Complex<T>) -> Complex<T> {
    if x.norm() < T::lit(SERIES_X) {
        let x2 = x * x;
        return Complex::<T>::one() - x / T::lit(2.0) + x2 / T::lit(24.0) - x2 * x / T::lit(720.0);
    }
    csqrt_principal(x).cos()
}

/// `sin √x / √x`, entire in x.
pub fn sinc_sqrt<T: Real>(x: Complex<T>) -> Complex<T> {
    if x.norm() < T::lit(SERIES_X) {
        let x2 = x * x;
        return Complex::<T>::one() - x / T::lit(6.0) + x2 / T::lit(120.0) - x2 * x / T::lit(5040.0);
    }
    let s = csqrt_principal(x);
    s.sin() / s
}

/// `(1 − cos √x) / x`, entire in x.
pub fn versine_sqrt<T: Real>(x: Complex<T>) -> Complex<T> {
    if x.norm() < T::lit(SERIES_X) {
        let x2 = x * x;
        return Complex::from(T::lit(0.5)) - x / T::lit(24.0) + x2 / T::lit(720.0)
            - x2 * x / T::lit(40320.0);
    }
    let h = csqrt_principal(x) / T::lit(2.0);
    let sh = h.sin();
    sh * sh * T::lit(2.0) / x
}

/// `(√x − sin √x) / x^{3/2}`, entire in x.
pub fn sin_excess<T: Real>(x: Complex<T>) -> Complex<T> {
    if x.norm() < T::lit(1e-2) {
        let coeffs = [
            1.0 / 6.0,
            -1.0 / 120.0,
            1.0 / 5040.0,
            -1.0 / 362880.0,
            1.0 / 39916800.0,
            -1.0 / 6227020800.0,
        ];
        let mut acc = Complex::zero();
        for &k in coeffs.iter().rev() {
            acc = acc * x + Complex::from(T::lit(k));
        }
        return acc;
    }
    let s = csqrt_principal(x);
    (s - s.sin()) / (x * s)
}
