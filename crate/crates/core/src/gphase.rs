//! Complex phases: dynamical, total and geometric for arbitrary evolutions,
//! the cyclic Aharonov-Anandan phase, the adiabatic Berry phase and the
//! adiabaticity diagnostic.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::calg::{
    clog_unwrapped_lenient, cos_sqrt, csqrt_path, log_continued, pair, sinc_sqrt, BranchState, ComplexTriple, Spinor,
};
use crate::error::{Error, Result};
use crate::evolve::Trajectory;
use crate::ham2::{eigensystem, eigensystem_in_gauge, Branch, Gauge, Hamiltonian2};
use crate::quad::simpson;
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDecomposition<T: Real> {
    pub total: Complex<T>,
    pub dynamical: Complex<T>,
    pub geometric: Complex<T>,
}

/// `x` reduced to `(−π/2, π/2]` in its real part.
pub fn mod_pi<T: Real>(x: Complex<T>) -> Complex<T> {
    let pi = T::PI();
    let mut r = x.re - (x.re / pi).round() * pi;
    if r <= -pi / T::lit(2.0) {
        r = r + pi;
    }
    Complex::new(r, x.im)
}

/// Distance between two phases with real parts compared mod π.
pub fn phase_distance<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    let d = mod_pi(a - b);
    let pi = T::PI();
    let re = d.re.abs().min(pi - d.re.abs());
    (re * re + d.im * d.im).sqrt()
}

/// Distance with real parts compared mod 2π.
pub fn phase_distance_2pi<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    let two_pi = T::PI() * T::lit(2.0);
    let d = a - b;
    let r = d.re - (d.re / two_pi).round() * two_pi;
    (r * r + d.im * d.im).sqrt()
}

fn uniform_step<T: Real>(times: &[T]) -> T {
    if times.len() < 2 {
        return T::zero();
    }
    (times[times.len() - 1] - times[0]) / T::from_usize(times.len() - 1).unwrap()
}

/// `−∫⟨ũ|H|u⟩dt` by composite Simpson on the trajectory grid.
pub fn dynamical_phase<T: Real>(traj: &Trajectory<T>, h_fn: impl Fn(T) -> Hamiltonian2<T>) -> Complex<T> {
    let vals: Vec<Complex<T>> = traj
        .times
        .iter()
        .zip(&traj.pairs)
        .map(|(&t, p)| pair(&p.bra, &h_fn(t).matrix.apply(&p.ket)))
        .collect();
    -simpson(&vals, uniform_step(&traj.times))
}

/// `(i/2) ln(⟨ũ_a|u_b⟩ / ⟨ũ_b|u_a⟩)`, principal branch.
fn link<T: Real>(bra_a: &Spinor<T>, ket_a: &Spinor<T>, bra_b: &Spinor<T>, ket_b: &Spinor<T>) -> Complex<T> {
    let num = pair(bra_a, ket_b);
    let den = pair(bra_b, ket_a);
    (num / den).ln() * Complex::new(T::zero(), T::lit(0.5))
}

/// Total, dynamical and geometric phase from the gauge-invariant
/// definition. The `i∫⟨ũ|u̇⟩dt` term is summed as antisymmetric links,
/// which is gauge invariant sample by sample.
pub fn geometric_phase_from_definition<T: Real>(traj: &Trajectory<T>) -> Result<PhaseDecomposition<T>> {
    let n = traj.pairs.len();
    if n == 0 {
        return Ok(PhaseDecomposition { total: Complex::zero(), dynamical: Complex::zero(), geometric: Complex::zero() });
    }
    let (p0, pn) = (&traj.pairs[0], &traj.pairs[n - 1]);
    let fwd = pair(&pn.bra, &p0.ket);
    let back = pair(&p0.bra, &pn.ket);
    let tiny = T::lit(1e-12);
    if fwd.norm() < tiny || back.norm() < tiny {
        return Err(Error::OverlapVanishes);
    }
    let total = (fwd / back).ln() * Complex::new(T::zero(), T::lit(0.5));
    let mut links = Complex::zero();
    for w in traj.pairs.windows(2) {
        links = links + link(&w[0].bra, &w[0].ket, &w[1].bra, &w[1].ket);
    }
    let geometric = total + links;
    Ok(PhaseDecomposition { total, dynamical: total - geometric, geometric })
}

fn rotate_xz<T: Real>(n: &ComplexTriple<T>) -> ComplexTriple<T> {
    ComplexTriple::new(n.z, -n.y, n.x)
}

fn min_pole_distance<T: Real>(bloch: &[ComplexTriple<T>]) -> T {
    bloch.iter().map(|n| (Complex::<T>::one() + n.z).norm()).fold(T::infinity(), T::min)
}

fn derivative<T: Real>(bloch: &[ComplexTriple<T>], h: T) -> Vec<ComplexTriple<T>> {
    let n = bloch.len();
    let w = |c: f64| Complex::from(T::lit(c));
    let lin = |terms: &[(usize, f64)], denom: f64| {
        let mut acc = ComplexTriple::zero();
        for &(k, c) in terms {
            acc = acc + bloch[k] * w(c);
        }
        acc * Complex::from(T::one() / (T::lit(denom) * h))
    };
    if n < 5 {
        return (0..n)
            .map(|k| {
                let (a, b) = if k == 0 { (0, 1) } else if k == n - 1 { (n - 2, n - 1) } else { (k - 1, k + 1) };
                lin(&[(b, 1.0), (a, -1.0)], (b - a) as f64)
            })
            .collect();
    }
    (0..n)
        .map(|k| match k {
            0 => lin(&[(0, -25.0), (1, 48.0), (2, -36.0), (3, 16.0), (4, -3.0)], 12.0),
            1 => lin(&[(0, -3.0), (1, -10.0), (2, 18.0), (3, -6.0), (4, 1.0)], 12.0),
            _ if k == n - 2 => lin(&[(n - 1, 3.0), (n - 2, 10.0), (n - 3, -18.0), (n - 4, 6.0), (n - 5, -1.0)], 12.0),
            _ if k == n - 1 => {
                lin(&[(n - 1, 25.0), (n - 2, -48.0), (n - 3, 36.0), (n - 4, -16.0), (n - 5, 3.0)], 12.0)
            }
            _ => lin(&[(k + 2, -1.0), (k + 1, 8.0), (k - 1, -8.0), (k - 2, 1.0)], 12.0),
        })
        .collect()
}

fn noncyclic_in_frame<T: Real>(bloch: &[ComplexTriple<T>], h: T) -> Result<Complex<T>> {
    let one = Complex::<T>::one();
    let i = Complex::<T>::i();
    let nd = derivative(bloch, h);
    let integrand: Vec<Complex<T>> =
        bloch.iter().zip(&nd).map(|(n, d)| (n.x * d.y - n.y * d.x) / (one + n.z)).collect();
    let integral = simpson(&integrand, h) * T::lit(-0.5);
    let ni = bloch[0];
    let ratio = |nf: &ComplexTriple<T>| {
        let a = (one + nf.z) * (one + ni.z);
        let p = a + (nf.x - i * nf.y) * (ni.x + i * ni.y);
        let q = a + (nf.x + i * nf.y) * (ni.x - i * ni.y);
        p / q
    };
    let ratios: Vec<Complex<T>> = bloch.iter().map(ratio).collect();
    let logs = clog_unwrapped_lenient(&ratios)?;
    let end = logs[logs.len() - 1] * Complex::new(T::zero(), T::lit(0.5));
    Ok(integral + end)
}

/// Non-cyclic geometric phase from the Bloch trajectory alone.
pub fn geometric_phase_noncyclic<T: Real>(traj: &Trajectory<T>) -> Result<Complex<T>> {
    let b = &traj.bloch;
    if b.len() < 3 {
        return Ok(Complex::zero());
    }
    for n in b {
        let d = (n.dot(n) - Complex::one()).norm();
        if d > T::lit(1e-6) {
            return Err(Error::NotUnit(d.as_f64()));
        }
    }
    let h = uniform_step(&traj.times);
    let direct = min_pole_distance(b);
    if direct >= T::lit(0.1) {
        return noncyclic_in_frame(b, h);
    }
    let rotated: Vec<ComplexTriple<T>> = b.iter().map(rotate_xz).collect();
    let other = min_pole_distance(&rotated);
    if direct.max(other) < T::lit(1e-3) {
        return Err(Error::PoleUnavoidable);
    }
    if other > direct {
        noncyclic_in_frame(&rotated, h)
    } else {
        noncyclic_in_frame(b, h)
    }
}

fn cyclic_in_frame<T: Real>(bloch: &[ComplexTriple<T>]) -> Complex<T> {
    let one = Complex::<T>::one();
    let i = Complex::<T>::i();
    let tiny = T::lit(1e-14);
    let mut acc = Complex::zero();
    for w in bloch.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (pa, pb) = (a.x + i * a.y, b.x + i * b.y);
        let (ma, mb) = (a.x - i * a.y, b.x - i * b.y);
        if pa.norm() < tiny || pb.norm() < tiny || ma.norm() < tiny || mb.norm() < tiny {
            continue;
        }
        let dbeta = ((pb / pa).ln() - (mb / ma).ln()) * Complex::new(T::zero(), -T::lit(0.5));
        let weight = ((one - a.z) + (one - b.z)) * T::lit(0.5);
        acc = acc + weight * dbeta;
    }
    acc * T::lit(-0.5)
}

/// `−½∮(1 − cos α)dβ` over a closed Bloch loop.
pub fn geometric_phase_cyclic<T: Real>(bloch: &[ComplexTriple<T>]) -> Result<Complex<T>> {
    if bloch.len() < 2 {
        return Ok(Complex::zero());
    }
    let gap = (bloch[0] - bloch[bloch.len() - 1]).norm();
    if gap > T::lit(1e-10) {
        return Err(Error::NotClosed(gap.as_f64()));
    }
    if min_pole_distance(bloch) >= T::lit(0.1) {
        return Ok(cyclic_in_frame(bloch));
    }
    let rotated: Vec<ComplexTriple<T>> = bloch.iter().map(rotate_xz).collect();
    if min_pole_distance(&rotated) > min_pole_distance(bloch) {
        Ok(cyclic_in_frame(&rotated))
    } else {
        Ok(cyclic_in_frame(bloch))
    }
}

/// Geometric phase for constant `h` starting from `n_i`, continuous in t:
/// `(t/2)(n_i·𝛀) + (i/2) ln[(cos(Ωt/2) + i(n_i·Ω̂) sin(Ωt/2)) / (… − …)]`.
pub fn constant_hamiltonian_phase<T: Real>(h: &Hamiltonian2<T>, n_i: &ComplexTriple<T>, t: T) -> Result<Complex<T>> {
    let proj = n_i.dot(&h.omega);
    let w2 = h.omega_sq();
    let i = Complex::<T>::i();
    let half = T::lit(0.5);
    let parts = |s: T| {
        let x = w2 * (s * s * T::lit(0.25));
        let c = cos_sqrt(x);
        let sn = sinc_sqrt(x) * (s * half) * proj * i;
        (c + sn, c - sn)
    };
    let degenerate = |(a, b): (Complex<T>, Complex<T>)| {
        let scale = a.norm().max(b.norm()).max(T::min_positive_value());
        a.norm() <= T::lit(1e-13) * scale || b.norm() <= T::lit(1e-13) * scale
    };
    if degenerate(parts(t)) {
        return Err(Error::UndefinedAtPulse);
    }
    let scale = (w2.norm().sqrt() + proj.norm() + T::one()) * t.abs();
    let n = (scale * T::lit(8.0)).ceil().to_usize().unwrap_or(1).clamp(1, 1 << 20);
    let h = t / T::from_usize(n).unwrap();
    let times: Vec<T> = (0..=n)
        .map(|k| {
            let s = h * T::from_usize(k).unwrap();
            if k < n && degenerate(parts(s)) {
                s + h * T::lit(1e-6)
            } else {
                s
            }
        })
        .collect();
    let logs = log_continued(
        |s| {
            let (a, b) = parts(s);
            a / b
        },
        &times,
    )?;
    Ok(proj * (t * half) + logs[n] * Complex::new(T::zero(), half))
}

/// A closed loop `s ∈ [0, 1] ↦ H(s)` sampled at `samples` intervals.
pub struct ParameterLoop<T: Real, F: Fn(T) -> Hamiltonian2<T>> {
    pub sampler: F,
    pub samples: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Real, F: Fn(T) -> Hamiltonian2<T>> ParameterLoop<T, F> {
    pub fn new(sampler: F, samples: usize) -> Self {
        Self { sampler, samples, _marker: std::marker::PhantomData }
    }
}

const LOOP_MARGIN: f64 = 1e-3;

fn berry_sum<T: Real, F: Fn(T) -> Hamiltonian2<T>>(lp: &ParameterLoop<T, F>, n: usize, branch: Branch) -> Result<Complex<T>> {
    let nf = T::from_usize(n).unwrap();
    let s_at = |k: usize| if k == n { T::one() } else { T::from_usize(k).unwrap() / nf };
    let rr = |s: T| {
        let r = (lp.sampler)(s).r();
        r.dot(&r)
    };
    let margin = T::lit(LOOP_MARGIN);
    let nearest = (0..=n)
        .map(|k| (k, rr(s_at(k)).norm().sqrt()))
        .fold((0, T::infinity()), |a, b| if b.1 < a.1 { b } else { a });
    if nearest.1 <= margin {
        return Err(Error::DegeneracyOnLoop { s: s_at(nearest.0).as_f64() });
    }
    let (roots, _) = csqrt_path(rr, T::zero(), T::one(), n, BranchState::principal())
        .map_err(|_| Error::DegeneracyOnLoop { s: s_at(nearest.0).as_f64() })?;
    if (roots[n] + roots[0]).norm() < (roots[n] - roots[0]).norm() {
        return Err(Error::LoopEncirclesExceptionalPoint);
    }
    let hs: Vec<Hamiltonian2<T>> = (0..=n).map(|k| (lp.sampler)(s_at(k))).collect();
    let half_angle = |k: usize| {
        let r = hs[k].r();
        let two_r = roots[k] * T::lit(2.0);
        (((roots[k] + r.z) / two_r).norm(), ((roots[k] - r.z) / two_r).norm())
    };
    let (mut min_c, mut min_s) = (T::infinity(), T::infinity());
    for k in 0..=n {
        let (c2, s2) = half_angle(k);
        min_c = min_c.min(c2);
        min_s = min_s.min(s2);
    }
    let gauge = if min_c >= min_s { Gauge::North } else { Gauge::South };
    let mut kets = Vec::with_capacity(n + 1);
    let mut bras = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let es = eigensystem_in_gauge(&hs[k], BranchState::at(roots[k]), gauge)?;
        kets.push(es.ket(branch));
        bras.push(es.bra(branch));
    }
    let mut acc = Complex::zero();
    for k in 0..n {
        acc = acc + link(&bras[k], &kets[k], &bras[k + 1], &kets[k + 1]);
    }
    Ok(acc)
}

/// `i∮⟨ũ_n|du_n⟩` around the loop, with sample doubling and Richardson
/// extrapolation.
pub fn adiabatic_berry_phase<T: Real, F: Fn(T) -> Hamiltonian2<T>>(
    lp: &ParameterLoop<T, F>,
    branch: Branch,
) -> Result<Complex<T>> {
    let (h0, h1) = ((lp.sampler)(T::zero()), (lp.sampler)(T::one()));
    let gap = (h0.matrix - h1.matrix).norm();
    if gap > T::lit(1e-12) * h0.matrix.norm().max(T::one()) {
        return Err(Error::NotClosed(gap.as_f64()));
    }
    let mut n = lp.samples.max(8);
    let mut coarse = berry_sum(lp, n, branch)?;
    let mut prev: Option<Complex<T>> = None;
    while n < (1 << 18) {
        n *= 2;
        let fine = berry_sum(lp, n, branch)?;
        let extrap = (fine * T::lit(4.0) - coarse) / T::lit(3.0);
        if let Some(p) = prev {
            if (extrap - p).norm() < T::lit(1e-10) * extrap.norm().max(T::one()) {
                return Ok(extrap);
            }
        }
        prev = Some(extrap);
        coarse = fine;
    }
    Ok(prev.unwrap_or(coarse))
}

/// `Σ_{m≠n} |⟨ũ_m|∂H/∂t|u_n⟩ / (E_m − E_n)²|` for the state on `branch`.
pub fn adiabaticity_criterion<T: Real>(
    h_fn: impl Fn(T) -> Hamiltonian2<T>,
    t: T,
    branch: Branch,
) -> Result<T> {
    let es = eigensystem(&h_fn(t), BranchState::principal())?;
    let d = T::lit(1e-5) * t.abs().max(T::one());
    let dh = (h_fn(t + d).matrix - h_fn(t - d).matrix).scale(Complex::from(T::one() / (T::lit(2.0) * d)));
    let other = match branch {
        Branch::Plus => Branch::Minus,
        Branch::Minus => Branch::Plus,
    };
    let num = pair(&es.bra(other), &dh.apply(&es.ket(branch)));
    let gap = es.eigenvalue(other) - es.eigenvalue(branch);
    Ok((num / (gap * gap)).norm())
}
