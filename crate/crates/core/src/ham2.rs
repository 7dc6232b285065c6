//! Generic non-Hermitian 2x2 Hamiltonian, its bi-orthogonal eigensystem,
//! complex spherical coordinates and degeneracy classification.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::calg::{csqrt_continued, csqrt_principal, BranchState, ComplexMat2, ComplexTriple, Spinor};
use crate::error::{Error, Result};
use crate::real::Real;

/// Relative size `|R²| / ‖(X,Y,Z)‖²` below which a point counts as degenerate.
pub const DEGENERACY_RADIUS: f64 = 1e-9;
/// Absolute `‖(X,Y,Z)‖` below which a point counts as diabolic.
pub const DIABOLIC_RADIUS: f64 = 1e-12;

/// `H = (λ₀/2)·I + (1/2)·𝛀·σ`, equivalently `H = c·I + 𝐑·σ` with
/// `c = λ₀/2` and `𝐑 = 𝛀/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian2<T: Real> {
    pub lambda0: Complex<T>,
    pub omega: ComplexTriple<T>,
    pub matrix: ComplexMat2<T>,
}

impl<T: Real> Hamiltonian2<T> {
    /// From the `(λ₀, 𝛀)` form.
    pub fn from_omega(lambda0: Complex<T>, omega: ComplexTriple<T>) -> Self {
        let half = Complex::from(T::lit(0.5));
        let matrix = ComplexMat2::from_pauli(lambda0 * half, &(omega * half));
        Self { lambda0, omega, matrix }
    }

    /// From the `H = λ₀·I + 𝐑·σ` form.
    pub fn from_xyz(lambda0: Complex<T>, r: ComplexTriple<T>) -> Self {
        let two = Complex::from(T::lit(2.0));
        Self { lambda0: lambda0 * two, omega: r * two, matrix: ComplexMat2::from_pauli(lambda0, &r) }
    }

    pub fn from_matrix(m: ComplexMat2<T>) -> Self {
        let (l0, x, y, z) = project_block(m.a11, m.a12, m.a21, m.a22);
        let mut h = Self::from_xyz(l0, ComplexTriple::new(x, y, z));
        h.matrix = m;
        h
    }

    /// Diagonal offset `c` of `H = c·I + 𝐑·σ`.
    pub fn center(&self) -> Complex<T> {
        self.lambda0 * T::lit(0.5)
    }

    /// `𝐑 = 𝛀/2`.
    pub fn r(&self) -> ComplexTriple<T> {
        self.omega * Complex::from(T::lit(0.5))
    }

    /// `𝛀·𝛀` (bilinear).
    pub fn omega_sq(&self) -> Complex<T> {
        self.omega.dot(&self.omega)
    }
}

/// `(λ₀, X, Y, Z)` of a 2x2 block in the `λ₀·I + 𝐑·σ` form.
pub fn project_block<T: Real>(
    a11: Complex<T>,
    a12: Complex<T>,
    a21: Complex<T>,
    a22: Complex<T>,
) -> (Complex<T>, Complex<T>, Complex<T>, Complex<T>) {
    let half = T::lit(0.5);
    let two_i = Complex::new(T::zero(), T::lit(2.0));
    ((a11 + a22) * half, (a12 + a21) * half, (a21 - a12) / two_i, (a11 - a22) * half)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegeneracyLabel {
    NonDegenerate,
    DiabolicPoint,
    ExceptionalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonopoleKind {
    Dirac,
    Complex,
    ComplexDirac,
    OneSheetedHyperbolic,
    TwoSheetedHyperbolic,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegeneracyClass {
    pub label: DegeneracyLabel,
    pub monopole_kind: MonopoleKind,
}

/// Real parametrization `𝐑 = (x, y, z − iε)` used by Table-1 models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelTag<T: Real> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub epsilon: T,
    /// `ε` is a fixed model constant rather than a coordinate.
    pub epsilon_fixed: bool,
}

impl<T: Real> ModelTag<T> {
    pub fn r_vec(&self) -> ComplexTriple<T> {
        ComplexTriple::new(self.x.into(), self.y.into(), Complex::new(self.z, -self.epsilon))
    }

    pub fn kind(&self) -> MonopoleKind {
        let tiny = T::lit(1e-12);
        if self.epsilon.abs() <= tiny {
            return MonopoleKind::Dirac;
        }
        if self.epsilon_fixed {
            return MonopoleKind::ComplexDirac;
        }
        if self.z.abs() <= tiny {
            let s = self.x * self.x + self.y * self.y - self.epsilon * self.epsilon;
            let scale = tiny * (self.epsilon * self.epsilon).max(T::one());
            if s > scale {
                return MonopoleKind::OneSheetedHyperbolic;
            }
            if s < -scale {
                return MonopoleKind::TwoSheetedHyperbolic;
            }
            return MonopoleKind::NotApplicable;
        }
        MonopoleKind::Complex
    }
}

pub fn classify<T: Real>(r: &ComplexTriple<T>, model: Option<&ModelTag<T>>) -> DegeneracyClass {
    let norm = r.norm();
    let label = if norm <= T::lit(DIABOLIC_RADIUS) {
        DegeneracyLabel::DiabolicPoint
    } else if r.dot(r).norm() <= T::lit(DEGENERACY_RADIUS) * norm * norm {
        DegeneracyLabel::ExceptionalPoint
    } else {
        DegeneracyLabel::NonDegenerate
    };
    let monopole_kind = model.map_or(MonopoleKind::NotApplicable, |m| m.kind());
    DegeneracyClass { label, monopole_kind }
}

/// Which half-angle the eigenvectors are normalized through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    /// Built on `cos(θ/2)`; singular at the south pole.
    North,
    /// Built on `sin(θ/2)`; singular at the north pole.
    South,
    /// Whichever of the two has the larger half-angle factor.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem2<T: Real> {
    pub lambda_plus: Complex<T>,
    pub lambda_minus: Complex<T>,
    pub u_plus: Spinor<T>,
    pub u_minus: Spinor<T>,
    pub ut_plus: Spinor<T>,
    pub ut_minus: Spinor<T>,
    pub r: Complex<T>,
    pub theta: Complex<T>,
    /// `None` when exactly one of `X ± iY` vanishes (Im φ infinite).
    pub phi: Option<Complex<T>>,
    pub gauge: Gauge,
}

impl<T: Real> EigenSystem2<T> {
    pub fn ket(&self, b: Branch) -> Spinor<T> {
        match b {
            Branch::Plus => self.u_plus,
            Branch::Minus => self.u_minus,
        }
    }

    pub fn bra(&self, b: Branch) -> Spinor<T> {
        match b {
            Branch::Plus => self.ut_plus,
            Branch::Minus => self.ut_minus,
        }
    }

    pub fn eigenvalue(&self, b: Branch) -> Complex<T> {
        match b {
            Branch::Plus => self.lambda_plus,
            Branch::Minus => self.lambda_minus,
        }
    }
}

fn continued_r<T: Real>(r: &ComplexTriple<T>, branch: BranchState<T>) -> Result<Complex<T>> {
    let norm = r.norm();
    let (big_r, _) = csqrt_continued(r.dot(r), branch)?;
    if norm <= T::lit(DIABOLIC_RADIUS) || big_r.norm_sqr() <= T::lit(DEGENERACY_RADIUS) * norm * norm {
        return Err(Error::DegeneratePoint(classify(r, None)));
    }
    Ok(big_r)
}

/// `cosθ`, `sinθ` and `θ` with `cos(θ/2)`, `sin(θ/2)` on principal roots.
fn polar<T: Real>(z: Complex<T>, big_r: Complex<T>) -> (Complex<T>, Complex<T>, Complex<T>) {
    let two_r = big_r * T::lit(2.0);
    let ch = csqrt_principal((big_r + z) / two_r);
    let sh = csqrt_principal((big_r - z) / two_r);
    let cos_t = z / big_r;
    let sin_t = ch * sh * T::lit(2.0);
    let theta = -Complex::<T>::i() * (cos_t + Complex::<T>::i() * sin_t).ln();
    (cos_t, sin_t, theta)
}

fn azimuth<T: Real>(r: &ComplexTriple<T>, big_r: Complex<T>, sin_t: Complex<T>) -> Option<Complex<T>> {
    let i = Complex::<T>::i();
    let wp = r.x + i * r.y;
    let wm = r.x - i * r.y;
    let tiny = T::lit(1e-12) * r.norm();
    let (zp, zm) = (wp.norm() <= tiny, wm.norm() <= tiny);
    if zp && zm {
        return Some(Complex::zero());
    }
    if zp || zm {
        return None;
    }
    let e = wp / (big_r * sin_t);
    Some(-i * e.ln())
}

pub fn eigensystem<T: Real>(h: &Hamiltonian2<T>, branch: BranchState<T>) -> Result<EigenSystem2<T>> {
    eigensystem_in_gauge(h, branch, Gauge::Auto)
}

pub fn eigensystem_in_gauge<T: Real>(
    h: &Hamiltonian2<T>,
    branch: BranchState<T>,
    gauge: Gauge,
) -> Result<EigenSystem2<T>> {
    let r = h.r();
    let big_r = continued_r(&r, branch)?;
    let i = Complex::<T>::i();
    let wp = r.x + i * r.y;
    let wm = r.x - i * r.y;
    let two_r = big_r * T::lit(2.0);
    let c2 = (big_r + r.z) / two_r;
    let s2 = (big_r - r.z) / two_r;
    let gauge = match gauge {
        Gauge::Auto if c2.norm() >= s2.norm() => Gauge::North,
        Gauge::Auto => Gauge::South,
        g => g,
    };
    let (u_plus, ut_plus, u_minus, ut_minus) = match gauge {
        Gauge::North => {
            let c = csqrt_principal(c2);
            let d = two_r * c;
            if d.norm() == T::zero() {
                return Err(Error::IndeterminatePhase);
            }
            ([c, wp / d], [c, wm / d], [-wm / d, c], [-wp / d, c])
        }
        _ => {
            let s = csqrt_principal(s2);
            let d = two_r * s;
            if d.norm() == T::zero() {
                return Err(Error::IndeterminatePhase);
            }
            ([wm / d, s], [wp / d, s], [s, -wp / d], [s, -wm / d])
        }
    };
    let (_, sin_t, theta) = polar(r.z, big_r);
    let phi = azimuth(&r, big_r, sin_t);
    let center = h.center();
    let es = EigenSystem2 {
        lambda_plus: center + big_r,
        lambda_minus: center - big_r,
        u_plus,
        u_minus,
        ut_plus,
        ut_minus,
        r: big_r,
        theta,
        phi,
        gauge,
    };
    let finite = [u_plus, u_minus, ut_plus, ut_minus]
        .iter()
        .all(|v| crate::calg::is_finite(v[0]) && crate::calg::is_finite(v[1]));
    if !finite {
        return Err(Error::NonFinite("eigenvectors"));
    }
    Ok(es)
}

/// `(R, θ, φ)` with `X = R sinθ cosφ`, `Y = R sinθ sinφ`, `Z = R cosθ`.
pub fn spherical_angles<T: Real>(
    r: &ComplexTriple<T>,
    branch: BranchState<T>,
) -> Result<(Complex<T>, Complex<T>, Complex<T>)> {
    let big_r = continued_r(r, branch)?;
    let (_, sin_t, theta) = polar(r.z, big_r);
    let phi = azimuth(r, big_r, sin_t).ok_or(Error::IndeterminatePhase)?;
    Ok((big_r, theta, phi))
}

/// Cartesian point from complex spherical coordinates.
pub fn from_spherical<T: Real>(big_r: Complex<T>, theta: Complex<T>, phi: Complex<T>) -> ComplexTriple<T> {
    let st = theta.sin();
    ComplexTriple::new(big_r * st * phi.cos(), big_r * st * phi.sin(), big_r * theta.cos())
}

/// `⟨ũ₊|u₊⟩` of the unnormalized eigenvectors `(R+Z, X+iY)`, `(R+Z, X−iY)`
/// divided by their Euclidean lengths. Vanishes at the exceptional point.
pub fn raw_overlap<T: Real>(r: &ComplexTriple<T>) -> Complex<T> {
    let i = Complex::<T>::i();
    let big_r = csqrt_principal(r.dot(r));
    let (wp, wm) = (r.x + i * r.y, r.x - i * r.y);
    let a = big_r + r.z;
    let b = big_r - r.z;
    let (ket, bra): (Spinor<T>, Spinor<T>) =
        if a.norm() >= b.norm() { ([a, wp], [a, wm]) } else { ([wm, b], [wp, b]) };
    let n = |v: &Spinor<T>| (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    (bra[0] * ket[0] + bra[1] * ket[1]) / (n(&ket) * n(&bra))
}

/// Residual `‖H u − λ u‖` of a right eigenvector.
pub fn residual<T: Real>(h: &Hamiltonian2<T>, u: &Spinor<T>, lambda: Complex<T>) -> T {
    let hu = h.matrix.apply(u);
    ((hu[0] - lambda * u[0]).norm_sqr() + (hu[1] - lambda * u[1]).norm_sqr()).sqrt()
}

/// Residual `‖ũ H − λ ũ‖` of a left eigenvector.
pub fn left_residual<T: Real>(h: &Hamiltonian2<T>, ut: &Spinor<T>, lambda: Complex<T>) -> T {
    let uh = h.matrix.apply_left(ut);
    ((uh[0] - lambda * ut[0]).norm_sqr() + (uh[1] - lambda * ut[1]).norm_sqr()).sqrt()
}

/// Identity pairing used to check the bi-orthonormality of `es`.
pub fn biorthonormality_error<T: Real>(es: &EigenSystem2<T>) -> T {
    let p = crate::calg::pair;
    let one = Complex::<T>::one();
    [
        (p(&es.ut_plus, &es.u_plus) - one).norm(),
        (p(&es.ut_minus, &es.u_minus) - one).norm(),
        p(&es.ut_plus, &es.u_minus).norm(),
        p(&es.ut_minus, &es.u_plus).norm(),
    ]
    .into_iter()
    .fold(T::zero(), T::max)
}
