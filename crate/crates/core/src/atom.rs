//! Driven dissipative two-level atom in the rotating wave approximation.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::calg::{
    cos_sqrt, csqrt_principal, log_continued, sin_excess, sinc_sqrt, versine_sqrt, ComplexTriple, Spinor,
};
use crate::error::{Error, Result};
use crate::evolve::{integrate_schrodinger, propagator, AdjointPair, Regime, Trajectory};
use crate::ham2::{Branch, Hamiltonian2, MonopoleKind};
use crate::real::Real;

/// Parameters of the driven atom. `rho = 2·v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams<T: Real> {
    /// Detuning Δ.
    pub detuning: T,
    /// Half difference of the decay rates.
    pub delta: T,
    /// Half sum of the decay rates.
    pub lambda: T,
    /// Drive sweep rate ω.
    pub omega: T,
    pub v0: T,
}

impl<T: Real> AtomParams<T> {
    pub fn new(detuning: T, delta: T, lambda: T, omega: T, v0: T) -> Result<Self> {
        let p = Self { detuning, delta, lambda, omega, v0 };
        p.validate()?;
        Ok(p)
    }

    /// Parameters at resonance (Δ = ω) from ρ.
    pub fn resonant(rho: T, delta: T, lambda: T, omega: T) -> Result<Self> {
        Self::new(omega, delta, lambda, omega, rho / T::lit(2.0))
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.detuning, self.delta, self.lambda, self.omega, self.v0];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameters("atom parameters must be finite".into()));
        }
        if self.delta < T::zero() {
            return Err(Error::InvalidParameters("delta must be >= 0".into()));
        }
        if self.lambda < self.delta {
            return Err(Error::InvalidParameters("lambda must be >= delta".into()));
        }
        if self.v0 < T::zero() {
            return Err(Error::InvalidParameters("v0 must be >= 0".into()));
        }
        Ok(())
    }

    pub fn rho(&self) -> T {
        self.v0 * T::lit(2.0)
    }

    /// `Δ − ω`.
    pub fn z(&self) -> T {
        self.detuning - self.omega
    }

    /// `Z = Δ − ω − iδ`.
    pub fn big_z(&self) -> Complex<T> {
        Complex::new(self.z(), -self.delta)
    }

    /// `Ω² = ρ² + Z²`. At `Δ = ω` the imaginary part is `+0`, so the
    /// principal root continues from `Δ − ω → +0`.
    pub fn omega_sq(&self) -> Complex<T> {
        let z = self.big_z();
        let w = z * z + self.rho() * self.rho();
        Complex::new(w.re, w.im + T::zero())
    }

    /// Principal `Ω`.
    pub fn big_omega(&self) -> Complex<T> {
        csqrt_principal(self.omega_sq())
    }

    pub fn is_resonant(&self) -> bool {
        let scale = self.detuning.abs().max(self.omega.abs()).max(T::one());
        self.z().abs() <= T::lit(1e-12) * scale
    }

    /// Rabi frequency `|ρ² − δ²|^{1/2}`.
    pub fn omega0(&self) -> T {
        (self.rho() * self.rho() - self.delta * self.delta).abs().sqrt()
    }

    pub fn with_rho(&self, rho: T) -> Self {
        Self { v0: rho / T::lit(2.0), ..*self }
    }

    pub fn with_z(&self, z: T) -> Self {
        Self { detuning: self.omega + z, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport<T: Real> {
    pub regime: Regime,
    pub omega0: T,
    pub monopole_kind: MonopoleKind,
}

const EP_TOL: f64 = 1e-9;

pub fn regime_report<T: Real>(p: &AtomParams<T>) -> RegimeReport<T> {
    let omega0 = p.omega0();
    if !p.is_resonant() {
        return RegimeReport { regime: Regime::General, omega0, monopole_kind: MonopoleKind::NotApplicable };
    }
    let (rho, delta) = (p.rho(), p.delta);
    let (regime, monopole_kind) = if (rho - delta).abs() <= T::lit(EP_TOL) * rho.max(delta) {
        (Regime::ExceptionalPoint, MonopoleKind::NotApplicable)
    } else if rho > delta {
        (Regime::Coherent, MonopoleKind::OneSheetedHyperbolic)
    } else {
        (Regime::Incoherent, MonopoleKind::TwoSheetedHyperbolic)
    };
    RegimeReport { regime, omega0, monopole_kind }
}

/// `H_r` in the co-rotating frame; the common decay λ is kept out.
pub fn rotating_hamiltonian<T: Real>(p: &AtomParams<T>) -> Hamiltonian2<T> {
    let omega = ComplexTriple::new(Complex::from(p.rho()), Complex::zero(), p.big_z());
    Hamiltonian2::from_omega(Complex::zero(), omega)
}

/// Lab-frame Hamiltonian with `V(t) = V₀e^{iωt}`, decay λ included.
pub fn lab_hamiltonian<T: Real>(p: &AtomParams<T>, t: T) -> Hamiltonian2<T> {
    let (s, c) = (p.omega * t).sin_cos();
    let omega = ComplexTriple::new(
        Complex::from(p.rho() * c),
        Complex::from(p.rho() * s),
        Complex::new(p.detuning, -p.delta),
    );
    Hamiltonian2::from_omega(Complex::new(T::zero(), -p.lambda), omega)
}

/// Rotating-frame amplitudes `C(t)` from `C(0)`.
pub fn evolve_driven<T: Real>(p: &AtomParams<T>, c0: &Spinor<T>, t: T) -> Spinor<T> {
    propagator(&rotating_hamiltonian(p), t).apply(c0)
}

/// Lab-frame ket from rotating-frame amplitudes.
pub fn lab_state<T: Real>(p: &AtomParams<T>, c: &Spinor<T>, t: T) -> Spinor<T> {
    let i = Complex::<T>::i();
    let half = t / T::lit(2.0);
    let up = (-i * Complex::new(p.omega, -p.lambda) * half).exp();
    let down = (i * Complex::new(p.omega, p.lambda) * half).exp();
    [c[0] * up, c[1] * down]
}

/// RK4 trajectory of the lab-frame pair starting in the up state.
pub fn driven_trajectory<T: Real>(p: &AtomParams<T>, t_end: T, step: T) -> Result<Trajectory<T>> {
    let p = *p;
    integrate_schrodinger(|t| lab_hamiltonian(&p, t), &AdjointPair::up(), (T::zero(), t_end), step)
}

/// `γ± = −π(1 ∓ Z/Ω)`.
pub fn cyclic_phase<T: Real>(p: &AtomParams<T>, branch: Branch) -> Result<Complex<T>> {
    let w = p.big_omega();
    if w.norm() <= T::epsilon() * (p.rho() + p.big_z().norm()) || w.norm() == T::zero() {
        return Err(Error::OnSingularSet);
    }
    let ratio = p.big_z() / w;
    let one = Complex::<T>::one();
    let pi = T::PI();
    Ok(match branch {
        Branch::Plus => -(one - ratio) * pi,
        Branch::Minus => -(one + ratio) * pi,
    })
}

/// `γ₋ + 2π`.
pub fn aharonov_anandan_phase<T: Real>(p: &AtomParams<T>) -> Result<Complex<T>> {
    Ok(cyclic_phase(p, Branch::Minus)? + T::PI() * T::lit(2.0))
}

/// `π(1 − (Δ − iδ)/√(ρ² + (Δ − iδ)²))`.
pub fn adiabatic_limit_phase<T: Real>(p: &AtomParams<T>) -> Result<Complex<T>> {
    let d = Complex::new(p.detuning, -p.delta);
    let w = csqrt_principal(d * d + p.rho() * p.rho());
    if w.norm() == T::zero() {
        return Err(Error::OnSingularSet);
    }
    Ok((Complex::<T>::one() - d / w) * T::PI())
}

/// Cyclic Bloch loop of the `branch` state over one drive period.
pub fn cyclic_bloch_loop<T: Real>(p: &AtomParams<T>, branch: Branch, samples: usize) -> Result<Vec<ComplexTriple<T>>> {
    let w = p.big_omega();
    if w.norm() == T::zero() || p.omega == T::zero() {
        return Err(Error::OnSingularSet);
    }
    let (sin_chi, cos_chi) = (Complex::from(p.rho()) / w, p.big_z() / w);
    let sign = Complex::from(branch.sign::<T>());
    let period = T::PI() * T::lit(2.0) / p.omega;
    Ok((0..=samples)
        .map(|k| {
            let t = if k == samples { period } else { period * T::from_usize(k).unwrap() / T::from_usize(samples).unwrap() };
            let (s, c) = (p.omega * t).sin_cos();
            let (s, c) = if k == samples { (T::zero(), T::one()) } else { (s, c) };
            ComplexTriple::new(sin_chi * c, sin_chi * s, cos_chi) * sign
        })
        .collect())
}

fn half_angles<T: Real>(p: &AtomParams<T>) -> (Complex<T>, Complex<T>) {
    let w = p.big_omega();
    let z = p.big_z();
    let two = T::lit(2.0);
    let plus = csqrt_principal((w + z) / (w * two));
    let minus = csqrt_principal((w - z) / (w * two));
    let cross = Complex::from(p.rho()) / (w * two);
    if plus.norm() >= minus.norm() {
        (plus, cross / plus)
    } else {
        (cross / minus, minus)
    }
}

/// Lab-frame cyclic solution and its adjoint for `branch`.
pub fn cyclic_state<T: Real>(p: &AtomParams<T>, branch: Branch, t: T) -> Result<AdjointPair<T>> {
    let w = p.big_omega();
    if w.norm() == T::zero() {
        return Err(Error::OnSingularSet);
    }
    let (c, s) = half_angles(p);
    let i = Complex::<T>::i();
    let half = t / T::lit(2.0);
    let lam = Complex::new(p.omega, -p.lambda);
    let lam_dn = Complex::new(p.omega, p.lambda);
    let (a, b, w_sign) = match branch {
        Branch::Plus => (c, s, w),
        Branch::Minus => (-s, c, -w),
    };
    let e_up = (-i * (lam + w_sign) * half).exp();
    let e_dn = (i * (lam_dn - w_sign) * half).exp();
    let ket = [a * e_up, b * e_dn];
    let bra = [a / e_up, b / e_dn];
    Ok(AdjointPair::new(ket, bra))
}

/// `C(Ωt/2)` and `(t/2)·sin(Ωt/2)/(Ωt/2)`.
fn half_cs<T: Real>(p: &AtomParams<T>, t: T) -> (Complex<T>, Complex<T>) {
    let half = t / T::lit(2.0);
    let x = p.omega_sq() * (half * half);
    (cos_sqrt(x), sinc_sqrt(x) * half)
}

fn noncyclic_ratio<T: Real>(p: &AtomParams<T>, t: T) -> (Complex<T>, Complex<T>) {
    let (c, s) = half_cs(p, t);
    let iz = Complex::<T>::i() * p.big_z() * s;
    (c + iz, c - iz)
}

fn noncyclic_smooth<T: Real>(p: &AtomParams<T>, t: T) -> Complex<T> {
    let rho2 = p.rho() * p.rho();
    let x = p.omega_sq() * (t * t);
    p.big_z() * (t / T::lit(2.0)) - sin_excess(x) * (p.omega * rho2 * t * t * t / T::lit(2.0))
}

fn ratio_degenerate<T: Real>(num: Complex<T>, den: Complex<T>) -> bool {
    let scale = num.norm().max(den.norm()).max(T::min_positive_value());
    den.norm() <= T::lit(1e-13) * scale || num.norm() <= T::lit(1e-13) * scale
}

/// Non-cyclic geometric phase from the up state, with the logarithm
/// continued in t from `t = 0`.
pub fn noncyclic_phase<T: Real>(p: &AtomParams<T>, t: T) -> Result<Complex<T>> {
    let (num, den) = noncyclic_ratio(p, t);
    if ratio_degenerate(num, den) {
        return Err(Error::UndefinedAtPulse);
    }
    if t == T::zero() {
        return Ok(Complex::zero());
    }
    let w = p.omega_sq().norm().sqrt();
    let scale = (w + p.big_z().norm() + T::one()) * t.abs();
    let n = (scale * T::lit(8.0)).ceil().to_usize().unwrap_or(1).clamp(16, 1 << 20);
    let h = t / T::from_usize(n).unwrap();
    let times: Vec<T> = (0..=n)
        .map(|k| {
            let s = h * T::from_usize(k).unwrap();
            let (a, b) = noncyclic_ratio(p, s);
            if k < n && ratio_degenerate(a, b) {
                s + h * T::lit(1e-6)
            } else {
                s
            }
        })
        .collect();
    let logs = log_continued(
        |s| {
            let (a, b) = noncyclic_ratio(p, s);
            a / b
        },
        &times,
    )?;
    Ok(noncyclic_smooth(p, t) + logs[n] * Complex::new(T::zero(), T::lit(0.5)))
}

/// Small-Ω expansion about the degeneracy, third order in t in the
/// dynamical-like term.
pub fn degeneracy_expansion<T: Real>(p: &AtomParams<T>, t: T) -> Complex<T> {
    let i = Complex::<T>::i();
    let z = p.big_z();
    let half = t / T::lit(2.0);
    let q = p.omega_sq() * (half * half);
    let arg = i * z * half * (Complex::<T>::one() + q / T::lit(3.0));
    let rho2 = p.rho() * p.rho();
    z * half - Complex::from(p.omega * rho2 * t * t * t / T::lit(12.0))
        + ((Complex::<T>::one() + arg) / (Complex::<T>::one() - arg)).ln() * (i * T::lit(0.5))
}

/// Phase exactly at the exceptional point (ρ = δ, Δ = ω), principal log.
pub fn exceptional_point_phase<T: Real>(p: &AtomParams<T>, t: T) -> Result<Complex<T>> {
    let d = p.delta;
    let h = d * t / T::lit(2.0);
    if (T::one() - h).abs() <= T::lit(1e-13) {
        return Err(Error::UndefinedAtPulse);
    }
    let i = Complex::<T>::i();
    let re = -p.omega * d * d * t * t * t / T::lit(12.0);
    let log = Complex::from((T::one() + h) / (T::one() - h)).ln();
    Ok(Complex::new(re, -h) + log * (i * T::lit(0.5)))
}

/// Axis along which a side limit is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// ρ → ρ₀ ± 0 at fixed Δ − ω.
    Rho,
    /// Δ − ω → z₀ ± 0 at fixed ρ.
    Detuning,
}

pub const SIDE_OFFSETS: (f64, f64) = (1e-6, 1e-7);

/// One-sided limit of [`noncyclic_phase`] along `approach`, from above if
/// `side > 0`. Linear Richardson on the two offsets; only the real part
/// converges near the exceptional point.
pub fn noncyclic_side_limit<T: Real>(p: &AtomParams<T>, t: T, approach: Approach, side: T) -> Result<Complex<T>> {
    let (h1, h2) = (T::lit(SIDE_OFFSETS.0), T::lit(SIDE_OFFSETS.1));
    let shifted = |h: T| match approach {
        Approach::Rho => p.with_rho(p.rho() + side.signum() * h),
        Approach::Detuning => p.with_z(p.z() + side.signum() * h),
    };
    let g1 = noncyclic_phase(&shifted(h1), t)?;
    let g2 = noncyclic_phase(&shifted(h2), t)?;
    Ok((g2 * h1 - g1 * h2) / (h1 - h2))
}

/// `(P↑↑, P↓↑)` from the up state.
pub fn tunneling_probabilities<T: Real>(p: &AtomParams<T>, t: T) -> (T, T) {
    let decay = (-p.lambda * t).exp();
    if p.is_resonant() {
        let rep = regime_report(p);
        let (w0, d, rho) = (rep.omega0, p.delta, p.rho());
        let half = t / T::lit(2.0);
        match rep.regime {
            Regime::Coherent => {
                let (s, c) = (w0 * half).sin_cos();
                let a = c - d / w0 * s;
                let b = rho / w0 * s;
                return (a * a * decay, b * b * decay);
            }
            Regime::Incoherent if w0 > T::zero() => {
                let (s, c) = ((w0 * half).sinh(), (w0 * half).cosh());
                let a = c - d / w0 * s;
                let b = rho / w0 * s;
                return (a * a * decay, b * b * decay);
            }
            Regime::ExceptionalPoint => {
                let a = T::one() - d * half;
                let b = d * half;
                return (a * a * decay, b * b * decay);
            }
            _ => {}
        }
    }
    let (c, s) = half_cs(p, t);
    let i = Complex::<T>::i();
    let upup = c - i * p.big_z() * s;
    let downup = s * p.rho();
    (upup.norm_sqr() * decay, downup.norm_sqr() * decay)
}

/// `P↑↑ − P↓↑`.
pub fn rabi_function<T: Real>(p: &AtomParams<T>, t: T) -> T {
    if p.is_resonant() {
        let rep = regime_report(p);
        let decay = (-p.lambda * t).exp();
        let (w0, d) = (rep.omega0, p.delta);
        match rep.regime {
            Regime::Coherent => {
                let (s, c) = (w0 * t).sin_cos();
                return decay * (c - d / w0 * s);
            }
            Regime::Incoherent if w0 > T::zero() => {
                return decay * ((w0 * t).cosh() - d / w0 * (w0 * t).sinh());
            }
            Regime::ExceptionalPoint => return decay * (T::one() - d * t),
            _ => {}
        }
    }
    let (a, b) = tunneling_probabilities(p, t);
    a - b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseJump<T: Real> {
    pub t: T,
    /// Jump of Re γ across `t`.
    pub delta_re: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule<T: Real> {
    pub regime: Regime,
    pub jumps: Vec<PulseJump<T>>,
    /// Pulse duration; infinite when the phase never jumps back.
    pub duration: T,
}

/// Jump times of Re γ on `[0, t_max]` at resonance.
pub fn phase_pulse_times<T: Real>(p: &AtomParams<T>, t_max: T) -> Result<PulseSchedule<T>> {
    if !p.is_resonant() {
        return Err(Error::InvalidParameters("pulse times need detuning equal to omega".into()));
    }
    let d = p.delta;
    if d == T::zero() {
        return Err(Error::NoPulse);
    }
    let rep = regime_report(p);
    let w0 = rep.omega0;
    let half_pi = T::FRAC_PI_2();
    match rep.regime {
        Regime::Coherent => {
            let a = (w0 / d).atan();
            let scale = T::lit(2.0) / w0;
            let mut jumps = Vec::new();
            let mut n = 0usize;
            loop {
                let nf = T::from_usize(n).unwrap() * T::PI();
                let up = scale * (nf + a);
                if n >= 1 {
                    let dn = scale * (nf - a);
                    if dn <= t_max {
                        jumps.push(PulseJump { t: dn, delta_re: half_pi });
                    }
                }
                if up > t_max {
                    break;
                }
                jumps.push(PulseJump { t: up, delta_re: -half_pi });
                n += 1;
            }
            let duration = T::PI() * scale * (T::one() - a / half_pi);
            Ok(PulseSchedule { regime: rep.regime, jumps, duration })
        }
        Regime::Incoherent => {
            if w0 >= d {
                return Err(Error::NoPulse);
            }
            let t0 = T::lit(2.0) / w0 * (w0 / d).atanh();
            let jumps = if t0 <= t_max { vec![PulseJump { t: t0, delta_re: -half_pi }] } else { vec![] };
            Ok(PulseSchedule { regime: rep.regime, jumps, duration: T::infinity() })
        }
        _ => {
            let t0 = T::lit(2.0) / d;
            let jumps = if t0 <= t_max { vec![PulseJump { t: t0, delta_re: -half_pi }] } else { vec![] };
            Ok(PulseSchedule { regime: Regime::ExceptionalPoint, jumps, duration: T::infinity() })
        }
    }
}

/// Closed-form phase at resonance in real arithmetic: trigonometric for
/// ρ > δ, hyperbolic for ρ < δ, polynomial at the exceptional point.
pub fn coherent_incoherent_phase<T: Real>(p: &AtomParams<T>, t: T) -> Result<Complex<T>> {
    if !p.is_resonant() {
        return Err(Error::InvalidParameters("closed form needs detuning equal to omega".into()));
    }
    let rep = regime_report(p);
    let (w0, d, w) = (rep.omega0, p.delta, p.omega);
    let y = w0 * t / T::lit(2.0);
    let (smooth, num, den) = match rep.regime {
        Regime::Coherent => {
            let (s, c) = y.sin_cos();
            let x = w0 * t;
            let coef = w * (d * d + w0 * w0) / (T::lit(2.0) * w0 * w0 * w0);
            (coef * (x.sin() - x), w0 * c + d * s, w0 * c - d * s)
        }
        Regime::Incoherent => {
            let (s, c) = (y.sinh(), y.cosh());
            let rho2 = p.rho() * p.rho();
            let smooth = -w * rho2 * t * t * t / T::lit(2.0) * sin_excess(Complex::from(-w0 * w0 * t * t)).re;
            (smooth, w0 * c + d * s, w0 * c - d * s)
        }
        _ => {
            let h = d * t / T::lit(2.0);
            (-w * d * d * t * t * t / T::lit(12.0), T::one() + h, T::one() - h)
        }
    };
    let scale = num.abs().max(den.abs()).max(T::min_positive_value());
    if den.abs() <= T::lit(1e-13) * scale || num.abs() <= T::lit(1e-13) * scale {
        return Err(Error::UndefinedAtPulse);
    }
    let r = num / den;
    let re = if r < T::zero() { smooth - T::FRAC_PI_2() } else { smooth };
    let im = -d * t / T::lit(2.0) + r.abs().ln() / T::lit(2.0);
    Ok(Complex::new(re, im))
}

/// Bloch vector from `n0` under the drive, as rotation about z by ωt of
/// the rotating-frame solution.
pub fn bloch_driven<T: Real>(p: &AtomParams<T>, n0: &ComplexTriple<T>, t: T) -> ComplexTriple<T> {
    let x = p.omega_sq() * (t * t);
    let k = versine_sqrt(x) * (t * t);
    let s1 = sinc_sqrt(x) * t;
    let cw = cos_sqrt(x);
    let (rho, z) = (Complex::from(p.rho()), p.big_z());
    let one = Complex::<T>::one();
    let m = [
        [one - z * z * k, -z * s1, rho * z * k],
        [z * s1, cw, -rho * s1],
        [rho * z * k, rho * s1, one - rho * rho * k],
    ];
    let v = n0.to_array();
    let r: Vec<Complex<T>> = m.iter().map(|row| row[0] * v[0] + row[1] * v[1] + row[2] * v[2]).collect();
    let (s, c) = (p.omega * t).sin_cos();
    ComplexTriple::new(r[0] * c - r[1] * s, r[0] * s + r[1] * c, r[2])
}

/// Bloch vector from the north pole, written out componentwise.
pub fn bloch_from_north<T: Real>(p: &AtomParams<T>, t: T) -> ComplexTriple<T> {
    let x = p.omega_sq() * (t * t);
    let k = versine_sqrt(x) * (t * t);
    let s1 = sinc_sqrt(x) * t;
    let (rho, z) = (Complex::from(p.rho()), p.big_z());
    let (s, c) = (p.omega * t).sin_cos();
    let a = rho * z * k;
    let b = rho * s1;
    ComplexTriple::new(a * c + b * s, a * s - b * c, Complex::<T>::one() - rho * rho * k)
}
