//! Time evolution under a constant or time-dependent `Hamiltonian2`:
//! closed-form propagator and Bloch vector, transition amplitudes, and a
//! fixed-step RK4 oracle for the Schrödinger/adjoint pair.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::calg::{cos_sqrt, csqrt_principal, pair, sinc_sqrt, versine_sqrt, ComplexMat2, ComplexTriple, Spinor};
use crate::error::{Error, Result};
use crate::ham2::Hamiltonian2;
use crate::real::Real;

/// Right state `|u⟩` and left state `⟨ũ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointPair<T: Real> {
    pub ket: Spinor<T>,
    pub bra: Spinor<T>,
}

impl<T: Real> AdjointPair<T> {
    pub fn new(ket: Spinor<T>, bra: Spinor<T>) -> Self {
        Self { ket, bra }
    }

    /// `|↑⟩` with its dual.
    pub fn up() -> Self {
        let (o, z) = (Complex::one(), Complex::zero());
        Self::new([o, z], [o, z])
    }

    /// Hermitian pair `⟨ũ| = |u⟩†`.
    pub fn hermitian(ket: Spinor<T>) -> Self {
        Self::new(ket, [ket[0].conj(), ket[1].conj()])
    }

    /// `⟨ũ|u⟩`.
    pub fn overlap(&self) -> Complex<T> {
        pair(&self.bra, &self.ket)
    }

    /// `𝐧 = ⟨ũ|σ|u⟩`.
    pub fn bloch(&self) -> ComplexTriple<T> {
        let [a, b] = self.ket;
        let [at, bt] = self.bra;
        let i = Complex::<T>::i();
        ComplexTriple::new(at * b + bt * a, i * (bt * a - at * b), at * a - bt * b)
    }

    /// A normalized pair whose Bloch vector is `n` (requires `n·n = 1`).
    pub fn from_bloch(n: &ComplexTriple<T>) -> Self {
        let i = Complex::<T>::i();
        let one = Complex::<T>::one();
        let two = T::lit(2.0);
        let (np, nm) = (n.x + i * n.y, n.x - i * n.y);
        if (one + n.z).norm() >= (one - n.z).norm() {
            let k = csqrt_principal((one + n.z) * two);
            Self::new([(one + n.z) / k, np / k], [(one + n.z) / k, nm / k])
        } else {
            let k = csqrt_principal((one - n.z) * two);
            Self::new([nm / k, (one - n.z) / k], [np / k, (one - n.z) / k])
        }
    }

    /// Multiplies the ket by `e^{iα}` and the bra by `e^{−iα}`.
    pub fn gauge(&self, alpha: Complex<T>) -> Self {
        let e = (Complex::<T>::i() * alpha).exp();
        let f = e.inv();
        Self::new([self.ket[0] * e, self.ket[1] * e], [self.bra[0] * f, self.bra[1] * f])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta<T: Real> {
    pub integrator: &'static str,
    pub step: T,
    pub params: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    /// Empty for Bloch-only trajectories.
    pub pairs: Vec<AdjointPair<T>>,
    pub bloch: Vec<ComplexTriple<T>>,
    pub meta: TrajectoryMeta<T>,
}

impl<T: Real> Trajectory<T> {
    /// Builds a trajectory from samples of a pair, recomputing the Bloch vectors.
    pub fn from_pairs(times: Vec<T>, pairs: Vec<AdjointPair<T>>, meta: TrajectoryMeta<T>) -> Self {
        let bloch = pairs.iter().map(|p| p.bloch()).collect();
        Self { times, pairs, bloch, meta }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|n·n − 1|` over the samples.
    pub fn max_unit_defect(&self) -> T {
        self.bloch.iter().map(|n| (n.dot(n) - Complex::one()).norm()).fold(T::zero(), T::max)
    }

    /// Applies a time-dependent gauge `α(t)` to every pair.
    pub fn gauge(&self, alpha: impl Fn(T) -> Complex<T>) -> Self {
        let pairs = self.times.iter().zip(&self.pairs).map(|(&t, p)| p.gauge(alpha(t))).collect();
        Self { pairs, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Coherent,
    Incoherent,
    ExceptionalPoint,
    /// `𝛀·𝛀` off the real axis.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeTag<T: Real> {
    pub regime: Regime,
    /// `|𝛀·𝛀|^{1/2}` (Rabi frequency when the regime is real).
    pub omega0: T,
}

const REGIME_TOL: f64 = 1e-12;

pub fn regime_of<T: Real>(omega: &ComplexTriple<T>) -> RegimeTag<T> {
    let w2 = omega.dot(omega);
    let scale = omega.norm() * omega.norm();
    let omega0 = w2.norm().sqrt();
    let tol = T::lit(REGIME_TOL);
    let regime = if w2.norm() <= tol * scale || scale == T::zero() {
        Regime::ExceptionalPoint
    } else if w2.im.abs() <= tol * w2.norm().max(scale) {
        if w2.re > T::zero() {
            Regime::Coherent
        } else {
            Regime::Incoherent
        }
    } else {
        Regime::General
    };
    RegimeTag { regime, omega0 }
}

/// `cos(Ωt/2)` and `sin(Ωt/2)/Ω`, branch free.
fn half_angle<T: Real>(h: &Hamiltonian2<T>, t: T) -> (Complex<T>, Complex<T>) {
    let x = h.omega_sq() * (t * t / T::lit(4.0));
    (cos_sqrt(x), sinc_sqrt(x) * (t / T::lit(2.0)))
}

/// `U(t) = (cos(Ωt/2)·I − i sin(Ωt/2) Ω̂·σ) e^{−iλ₀t/2}` for constant `h`.
pub fn propagator<T: Real>(h: &Hamiltonian2<T>, t: T) -> ComplexMat2<T> {
    let (cs, sn) = half_angle(h, t);
    let i = Complex::<T>::i();
    let phase = (-i * h.lambda0 * (t / T::lit(2.0))).exp();
    ComplexMat2::from_pauli(cs, &(h.omega * (-i * sn))).scale(phase)
}

/// `U⁻¹(t)`.
pub fn inverse_propagator<T: Real>(h: &Hamiltonian2<T>, t: T) -> ComplexMat2<T> {
    let (cs, sn) = half_angle(h, t);
    let i = Complex::<T>::i();
    let phase = (i * h.lambda0 * (t / T::lit(2.0))).exp();
    ComplexMat2::from_pauli(cs, &(h.omega * (i * sn))).scale(phase)
}

pub fn evolve_pair<T: Real>(h: &Hamiltonian2<T>, initial: &AdjointPair<T>, t: T) -> AdjointPair<T> {
    AdjointPair::new(
        propagator(h, t).apply(&initial.ket),
        inverse_propagator(h, t).apply_left(&initial.bra),
    )
}

fn check_unit<T: Real>(n: &ComplexTriple<T>) -> Result<()> {
    let d = (n.dot(n) - Complex::one()).norm();
    if d > T::lit(1e-8) {
        return Err(Error::NotUnit(d.as_f64()));
    }
    Ok(())
}

/// Bloch vector of the state evolved by constant `h` from `n_i`.
pub fn bloch_closed_form<T: Real>(
    h: &Hamiltonian2<T>,
    n_i: &ComplexTriple<T>,
    t: T,
) -> Result<ComplexTriple<T>> {
    check_unit(n_i)?;
    let tag = regime_of(&h.omega);
    let w = h.omega;
    let (cos_t, sin_t, vers_t) = match tag.regime {
        Regime::Coherent => {
            let (w0, a) = (tag.omega0, tag.omega0 * t);
            let s = (a / T::lit(2.0)).sin();
            (Complex::from(a.cos()), Complex::from(a.sin() / w0), Complex::from(T::lit(2.0) * s * s / (w0 * w0)))
        }
        Regime::Incoherent => {
            let (w0, a) = (tag.omega0, tag.omega0 * t);
            let s = (a / T::lit(2.0)).sinh();
            (Complex::from(a.cosh()), Complex::from(a.sinh() / w0), Complex::from(T::lit(2.0) * s * s / (w0 * w0)))
        }
        Regime::ExceptionalPoint => {
            (Complex::one(), Complex::from(t), Complex::from(t * t / T::lit(2.0)))
        }
        Regime::General => {
            let x = h.omega_sq() * (t * t);
            (cos_sqrt(x), sinc_sqrt(x) * t, versine_sqrt(x) * (t * t))
        }
    };
    let proj = n_i.dot(&w);
    Ok(*n_i * cos_t + w * (vers_t * proj) + w.cross(n_i) * sin_t)
}

/// `(T_ii, T_fi)` with `n_fi = ⟨ũ_f|σ|u_i⟩` and `cos θ_fi = ⟨ũ_f|u_i⟩`.
pub fn transition_amplitudes<T: Real>(
    h: &Hamiltonian2<T>,
    n_i: &ComplexTriple<T>,
    n_fi: &ComplexTriple<T>,
    cos_theta_fi: Complex<T>,
    t: T,
) -> (Complex<T>, Complex<T>) {
    let i = Complex::<T>::i();
    let tag = regime_of(&h.omega);
    let half = t / T::lit(2.0);
    let (cs, sn) = match tag.regime {
        Regime::Coherent => {
            let a = tag.omega0 * half;
            (Complex::from(a.cos()), Complex::from(a.sin() / tag.omega0))
        }
        Regime::Incoherent => {
            let a = tag.omega0 * half;
            (Complex::from(a.cosh()), Complex::from(a.sinh() / tag.omega0))
        }
        Regime::ExceptionalPoint => (Complex::one(), Complex::from(half)),
        Regime::General => half_angle(h, t),
    };
    let phase = (-i * h.lambda0 * half).exp();
    let t_ii = (cs - i * sn * n_i.dot(&h.omega)) * phase;
    let t_fi = (cos_theta_fi * cs - i * sn * n_fi.dot(&h.omega)) * phase;
    (t_ii, t_fi)
}

fn grid<T: Real>(t0: T, t1: T, step: T) -> Result<(usize, T)> {
    if !(step > T::zero()) || !(t1 >= t0) {
        return Err(Error::InvalidParameters("step must be positive and t1 >= t0".into()));
    }
    let n = ((t1 - t0) / step).round().to_usize().unwrap_or(0).max(1);
    Ok((n, (t1 - t0) / T::from_usize(n).unwrap()))
}

const DRIFT_LIMIT: f64 = 1e-6;

/// Classic RK4 on `i d|u⟩/dt = H|u⟩` and `−i d⟨ũ|/dt = ⟨ũ|H`.
pub fn integrate_schrodinger<T: Real>(
    h_fn: impl Fn(T) -> Hamiltonian2<T>,
    initial: &AdjointPair<T>,
    t_span: (T, T),
    step: T,
) -> Result<Trajectory<T>> {
    let (n, dt) = grid(t_span.0, t_span.1, step)?;
    let i = Complex::<T>::i();
    let ket_rate = |m: &ComplexMat2<T>, u: &Spinor<T>| {
        let v = m.apply(u);
        [-i * v[0], -i * v[1]]
    };
    let bra_rate = |m: &ComplexMat2<T>, w: &Spinor<T>| {
        let v = m.apply_left(w);
        [i * v[0], i * v[1]]
    };
    let axpy = |a: &Spinor<T>, k: &Spinor<T>, s: T| [a[0] + k[0] * s, a[1] + k[1] * s];
    let mut times = Vec::with_capacity(n + 1);
    let mut pairs = Vec::with_capacity(n + 1);
    let (mut u, mut w) = (initial.ket, initial.bra);
    let norm0 = pair(&w, &u);
    let half = dt / T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    times.push(t_span.0);
    pairs.push(*initial);
    for k in 0..n {
        let t = t_span.0 + dt * T::from_usize(k).unwrap();
        let h0 = h_fn(t).matrix;
        let hm = h_fn(t + half).matrix;
        let h1 = h_fn(t + dt).matrix;
        let k1 = ket_rate(&h0, &u);
        let l1 = bra_rate(&h0, &w);
        let k2 = ket_rate(&hm, &axpy(&u, &k1, half));
        let l2 = bra_rate(&hm, &axpy(&w, &l1, half));
        let k3 = ket_rate(&hm, &axpy(&u, &k2, half));
        let l3 = bra_rate(&hm, &axpy(&w, &l2, half));
        let k4 = ket_rate(&h1, &axpy(&u, &k3, dt));
        let l4 = bra_rate(&h1, &axpy(&w, &l3, dt));
        for j in 0..2 {
            u[j] = u[j] + (k1[j] + k2[j] * two + k3[j] * two + k4[j]) * sixth;
            w[j] = w[j] + (l1[j] + l2[j] * two + l3[j] * two + l4[j]) * sixth;
        }
        let t_next = if k + 1 == n { t_span.1 } else { t + dt };
        let drift = (pair(&w, &u) - norm0).norm();
        if !(drift <= T::lit(DRIFT_LIMIT)) {
            return Err(Error::StepRejected { t: t_next.as_f64(), drift: drift.as_f64() });
        }
        times.push(t_next);
        pairs.push(AdjointPair::new(u, w));
    }
    let meta = TrajectoryMeta { integrator: "rk4-pair", step: dt, params: String::new() };
    Ok(Trajectory::from_pairs(times, pairs, meta))
}

/// Classic RK4 on `d𝐧/dt = 𝛀(t)×𝐧`.
pub fn integrate_bloch<T: Real>(
    omega_fn: impl Fn(T) -> ComplexTriple<T>,
    n_i: &ComplexTriple<T>,
    t_span: (T, T),
    step: T,
) -> Result<Trajectory<T>> {
    check_unit(n_i)?;
    let (n, dt) = grid(t_span.0, t_span.1, step)?;
    let half = dt / T::lit(2.0);
    let sixth = Complex::from(dt / T::lit(6.0));
    let two = Complex::from(T::lit(2.0));
    let mut times = Vec::with_capacity(n + 1);
    let mut bloch = Vec::with_capacity(n + 1);
    let mut v = *n_i;
    times.push(t_span.0);
    bloch.push(v);
    for k in 0..n {
        let t = t_span.0 + dt * T::from_usize(k).unwrap();
        let wm = omega_fn(t + half);
        let k1 = omega_fn(t).cross(&v);
        let k2 = wm.cross(&(v + k1 * Complex::from(half)));
        let k3 = wm.cross(&(v + k2 * Complex::from(half)));
        let k4 = omega_fn(t + dt).cross(&(v + k3 * Complex::from(dt)));
        v = v + (k1 + k2 * two + k3 * two + k4) * sixth;
        let t_next = if k + 1 == n { t_span.1 } else { t + dt };
        let drift = (v.dot(&v) - Complex::one()).norm();
        if !(drift <= T::lit(DRIFT_LIMIT)) {
            return Err(Error::StepRejected { t: t_next.as_f64(), drift: drift.as_f64() });
        }
        times.push(t_next);
        bloch.push(v);
    }
    let meta = TrajectoryMeta { integrator: "rk4-bloch", step: dt, params: String::new() };
    Ok(Trajectory { times, pairs: Vec::new(), bloch, meta })
}
