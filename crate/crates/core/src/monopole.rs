//! Fictitious monopoles of the eigenstate connection: Dirac, complex Dirac
//! and hyperbolic models on real parameter points.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::calg::{csqrt_principal, BranchState, ComplexTriple};
use crate::error::{Error, Result};
use crate::ham2::MonopoleKind;
use crate::quad::{legendre, periodic_doubling, romberg};
use crate::real::Real;

/// How real coordinates `(x, y, z)` enter `𝐑`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry<T: Real> {
    /// `𝐑 = (x, y, z)`.
    Dirac,
    /// `𝐑 = (x, y, z − iε)`.
    ComplexDirac { epsilon: T },
    /// `𝐑 = (x, y, iz)`.
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonopoleModel<T: Real> {
    pub geometry: Geometry<T>,
    pub q: Complex<T>,
}

impl<T: Real> MonopoleModel<T> {
    pub fn dirac() -> Self {
        Self { geometry: Geometry::Dirac, q: Complex::from(T::lit(0.5)) }
    }

    pub fn complex_dirac(epsilon: T) -> Result<Self> {
        if !(epsilon >= T::zero()) {
            return Err(Error::InvalidParameters("epsilon must be >= 0".into()));
        }
        if epsilon == T::zero() {
            return Ok(Self::dirac());
        }
        Ok(Self { geometry: Geometry::ComplexDirac { epsilon }, q: Complex::from(T::lit(0.5)) })
    }

    pub fn hyperbolic() -> Self {
        Self { geometry: Geometry::Hyperbolic, q: Complex::from(T::lit(0.5)) }
    }

    pub fn with_charge(self, q: Complex<T>) -> Self {
        Self { q, ..self }
    }

    pub fn epsilon(&self) -> T {
        match self.geometry {
            Geometry::ComplexDirac { epsilon } => epsilon,
            _ => T::zero(),
        }
    }

    /// Model vector `𝐑` at a (possibly complex) point.
    pub fn r_vec(&self, p: &ComplexTriple<T>) -> ComplexTriple<T> {
        match self.geometry {
            Geometry::Dirac => *p,
            Geometry::ComplexDirac { epsilon } => ComplexTriple::new(p.x, p.y, p.z - Complex::new(T::zero(), epsilon)),
            Geometry::Hyperbolic => ComplexTriple::new(p.x, p.y, p.z * Complex::<T>::i()),
        }
    }

    /// Classification of a real point.
    pub fn kind_at(&self, p: [T; 3]) -> MonopoleKind {
        match self.geometry {
            Geometry::Dirac => MonopoleKind::Dirac,
            Geometry::ComplexDirac { .. } => MonopoleKind::ComplexDirac,
            Geometry::Hyperbolic => {
                let r2 = p[0] * p[0] + p[1] * p[1] - p[2] * p[2];
                if r2 > T::zero() {
                    MonopoleKind::OneSheetedHyperbolic
                } else if r2 < T::zero() {
                    MonopoleKind::TwoSheetedHyperbolic
                } else {
                    MonopoleKind::NotApplicable
                }
            }
        }
    }
}

fn real_point<T: Real>(p: [T; 3]) -> ComplexTriple<T> {
    ComplexTriple::real(p[0], p[1], p[2])
}

const SINGULAR_MARGIN: f64 = 1e-6;

fn big_r<T: Real>(model: &MonopoleModel<T>, p: &ComplexTriple<T>, branch: BranchState<T>) -> Result<Complex<T>> {
    let rv = model.r_vec(p);
    let r2 = rv.dot(&rv);
    let scale = rv.norm().max(T::min_positive_value());
    if !(r2.norm().sqrt() > T::lit(SINGULAR_MARGIN) * scale) {
        return Err(Error::OnSingularSet);
    }
    let r = csqrt_principal(r2);
    Ok(match branch.current_value {
        Some(v) if (r + v).norm() < (r - v).norm() => -r,
        _ => r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Regular on the `R + Z ≠ 0` side.
    North,
    /// North minus `2q dφ`.
    South,
    /// The better conditioned of the two at the point.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionSample<T: Real> {
    pub chart: Chart,
    /// Coefficient of `dφ`.
    pub a_phi: Complex<T>,
    /// Components along `dx, dy, dz`.
    pub components: ComplexTriple<T>,
}

fn a_phi_north<T: Real>(q: Complex<T>, rho2: Complex<T>, r: Complex<T>, z: Complex<T>) -> Complex<T> {
    if (r + z).norm() >= (r - z).norm() {
        q * rho2 / (r * (r + z))
    } else {
        q * (Complex::<T>::one() - z / r)
    }
}

fn connection_with<T: Real>(p: &ComplexTriple<T>, model: &MonopoleModel<T>, chart: Chart, r: Complex<T>) -> Result<ConnectionSample<T>> {
    let rv = model.r_vec(p);
    let rho2 = p.x * p.x + p.y * p.y;
    let chart = match chart {
        Chart::Auto => {
            if (r + rv.z).norm() >= (r - rv.z).norm() {
                Chart::North
            } else {
                Chart::South
            }
        }
        c => c,
    };
    let north = a_phi_north(model.q, rho2, r, rv.z);
    let a_phi = match chart {
        Chart::South => north - model.q * T::lit(2.0),
        _ => north,
    };
    if !(a_phi.re.is_finite() && a_phi.im.is_finite()) {
        return Err(Error::OnSingularSet);
    }
    let components = if rho2.norm() == T::zero() {
        if a_phi.norm() <= T::epsilon() {
            ComplexTriple::zero()
        } else {
            return Err(Error::OnSingularSet);
        }
    } else {
        ComplexTriple::new(-a_phi * p.y / rho2, a_phi * p.x / rho2, Complex::zero())
    };
    Ok(ConnectionSample { chart, a_phi, components })
}

/// `A = q(x dy − y dx)/(R(R + Z))` or the south chart.
pub fn connection<T: Real>(p: &ComplexTriple<T>, model: &MonopoleModel<T>, chart: Chart) -> Result<ConnectionSample<T>> {
    let r = big_r(model, p, BranchState::principal())?;
    connection_with(p, model, chart, r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample<T: Real> {
    pub point: ComplexTriple<T>,
    pub big_r: Complex<T>,
    /// `None` on the string of both charts.
    pub a: Option<ConnectionSample<T>>,
    pub b: ComplexTriple<T>,
    pub phi: Complex<T>,
}

/// Field `B = ⋆F` and scalar potential at `p`.
pub fn field_and_potential<T: Real>(
    p: &ComplexTriple<T>,
    model: &MonopoleModel<T>,
    branch: BranchState<T>,
) -> Result<FieldSample<T>> {
    let r = big_r(model, p, branch)?;
    let r3 = r * r * r;
    let q = model.q;
    let (b, phi) = match model.geometry {
        Geometry::Hyperbolic => {
            let i = Complex::<T>::i();
            (*p * (i * q / r3), -i * q / r)
        }
        _ => (model.r_vec(p) * (q / r3), q / r),
    };
    let a = connection_with(p, model, Chart::Auto, r).ok();
    Ok(FieldSample { point: *p, big_r: r, a, b, phi })
}

/// `q Σ_{l≤L} (iε)^l P_l(cos α) / r^{l+1}`.
pub fn multipole_potential<T: Real>(r: T, alpha: T, model: &MonopoleModel<T>, order: usize) -> Result<Complex<T>> {
    if let Geometry::Hyperbolic = model.geometry {
        return Err(Error::InvalidParameters("multipole expansion applies to the Dirac models".into()));
    }
    let eps = model.epsilon();
    if !(r > eps) {
        return Err(Error::OutsideConvergence);
    }
    let p = legendre(alpha.cos(), order);
    let ie = Complex::new(T::zero(), eps);
    let mut pow = Complex::<T>::one();
    let mut rp = r;
    let mut acc = Complex::<T>::zero();
    for pl in p {
        acc = acc + pow * (pl / rp);
        pow = pow * ie;
        rp = rp * r;
    }
    Ok(acc * model.q)
}

/// Closed real loop `s ∈ [0, 2π) ↦ point`.
pub trait Loop<T: Real> {
    fn point(&self, s: T) -> [T; 3];
    fn tangent(&self, s: T) -> [T; 3];
}

/// Circle `x² + y² = ρ²` at height `z`, counterclockwise about +z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalCircle<T: Real> {
    pub rho: T,
    pub z: T,
}

impl<T: Real> Loop<T> for HorizontalCircle<T> {
    fn point(&self, s: T) -> [T; 3] {
        [self.rho * s.cos(), self.rho * s.sin(), self.z]
    }

    fn tangent(&self, s: T) -> [T; 3] {
        [-self.rho * s.sin(), self.rho * s.cos(), T::zero()]
    }
}

/// Two-dimensional surface patch `(u, v) ↦ point` with `v` periodic.
pub trait Surface<T: Real> {
    fn u_range(&self) -> (T, T);
    fn point(&self, u: T, v: T) -> [T; 3];
    fn du(&self, u: T, v: T) -> [T; 3];
    fn dv(&self, u: T, v: T) -> [T; 3];
    /// Whether `u = u_min` is a boundary loop rather than a pole.
    fn inner_boundary(&self) -> bool;
}

fn axis_frame<T: Real>(axis: [T; 3]) -> ([T; 3], [T; 3], [T; 3]) {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let w = [axis[0] / n, axis[1] / n, axis[2] / n];
    let helper = if w[2].abs() < T::lit(0.9) { [T::zero(), T::zero(), T::one()] } else { [T::one(), T::zero(), T::zero()] };
    let mut e1 = cross_r(helper, w);
    let m = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1 = [e1[0] / m, e1[1] / m, e1[2] / m];
    let e2 = cross_r(w, e1);
    (e1, e2, w)
}

fn cross_r<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn comb<T: Real>(a: T, x: [T; 3], b: T, y: [T; 3], c: T, z: [T; 3]) -> [T; 3] {
    [a * x[0] + b * y[0] + c * z[0], a * x[1] + b * y[1] + c * z[1], a * x[2] + b * y[2] + c * z[2]]
}

/// Cap of the origin-centred sphere of radius `radius` around `axis` with
/// angular radius `half_angle`; `u` is the polar angle from the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereCap<T: Real> {
    pub radius: T,
    pub axis: [T; 3],
    pub half_angle: T,
}

impl<T: Real> SphereCap<T> {
    pub fn full(radius: T) -> Self {
        Self { radius, axis: [T::zero(), T::zero(), T::one()], half_angle: T::PI() }
    }

    /// Solid angle of the cap.
    pub fn solid_angle(&self) -> T {
        T::PI() * T::lit(2.0) * (T::one() - self.half_angle.cos())
    }

    /// Boundary circle.
    pub fn boundary(&self) -> CapBoundary<T> {
        CapBoundary { cap: *self }
    }
}

impl<T: Real> Surface<T> for SphereCap<T> {
    fn u_range(&self) -> (T, T) {
        (T::zero(), self.half_angle)
    }

    fn point(&self, u: T, v: T) -> [T; 3] {
        let (e1, e2, w) = axis_frame(self.axis);
        let r = self.radius;
        comb(r * u.sin() * v.cos(), e1, r * u.sin() * v.sin(), e2, r * u.cos(), w)
    }

    fn du(&self, u: T, v: T) -> [T; 3] {
        let (e1, e2, w) = axis_frame(self.axis);
        let r = self.radius;
        comb(r * u.cos() * v.cos(), e1, r * u.cos() * v.sin(), e2, -r * u.sin(), w)
    }

    fn dv(&self, u: T, v: T) -> [T; 3] {
        let (e1, e2, _) = axis_frame(self.axis);
        let r = self.radius;
        comb(-r * u.sin() * v.sin(), e1, r * u.sin() * v.cos(), e2, T::zero(), e2)
    }

    fn inner_boundary(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapBoundary<T: Real> {
    pub cap: SphereCap<T>,
}

impl<T: Real> Loop<T> for CapBoundary<T> {
    fn point(&self, s: T) -> [T; 3] {
        self.cap.point(self.cap.half_angle, s)
    }

    fn tangent(&self, s: T) -> [T; 3] {
        self.cap.dv(self.cap.half_angle, s)
    }
}

/// Band `θ ∈ [θ₁, θ₂]` of the one-sheeted hyperboloid
/// `(R cosh θ cos φ, R cosh θ sin φ, R sinh θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperboloidBand<T: Real> {
    pub radius: T,
    pub theta1: T,
    pub theta2: T,
}

impl<T: Real> Surface<T> for HyperboloidBand<T> {
    fn u_range(&self) -> (T, T) {
        (self.theta1, self.theta2)
    }

    fn point(&self, u: T, v: T) -> [T; 3] {
        let r = self.radius;
        [r * u.cosh() * v.cos(), r * u.cosh() * v.sin(), r * u.sinh()]
    }

    fn du(&self, u: T, v: T) -> [T; 3] {
        let r = self.radius;
        [r * u.sinh() * v.cos(), r * u.sinh() * v.sin(), r * u.cosh()]
    }

    fn dv(&self, u: T, v: T) -> [T; 3] {
        let r = self.radius;
        [-r * u.cosh() * v.sin(), r * u.cosh() * v.cos(), T::zero()]
    }

    fn inner_boundary(&self) -> bool {
        true
    }
}

/// Cap `θ ∈ [0, θ_max]` of one sheet of the two-sheeted hyperboloid
/// `(R̃ sinh θ cos φ, R̃ sinh θ sin φ, ±R̃ cosh θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperboloidCap<T: Real> {
    pub radius: T,
    pub theta_max: T,
    pub upper: bool,
}

impl<T: Real> HyperboloidCap<T> {
    fn sheet(&self) -> T {
        if self.upper {
            T::one()
        } else {
            -T::one()
        }
    }
}

impl<T: Real> Surface<T> for HyperboloidCap<T> {
    fn u_range(&self) -> (T, T) {
        (T::zero(), self.theta_max)
    }

    fn point(&self, u: T, v: T) -> [T; 3] {
        let r = self.radius;
        [r * u.sinh() * v.cos(), r * u.sinh() * v.sin(), self.sheet() * r * u.cosh()]
    }

    fn du(&self, u: T, v: T) -> [T; 3] {
        let r = self.radius;
        [r * u.cosh() * v.cos(), r * u.cosh() * v.sin(), self.sheet() * r * u.sinh()]
    }

    fn dv(&self, u: T, v: T) -> [T; 3] {
        let r = self.radius;
        [-r * u.sinh() * v.sin(), r * u.sinh() * v.cos(), T::zero()]
    }

    fn inner_boundary(&self) -> bool {
        false
    }
}

/// Loop `v ↦ surface(u, v)` at fixed `u`.
pub struct SurfaceLoop<'a, T: Real, S: Surface<T>> {
    pub surface: &'a S,
    pub u: T,
}

impl<T: Real, S: Surface<T>> Loop<T> for SurfaceLoop<'_, T, S> {
    fn point(&self, s: T) -> [T; 3] {
        self.surface.point(self.u, s)
    }

    fn tangent(&self, s: T) -> [T; 3] {
        self.surface.dv(self.u, s)
    }
}

const CONTOUR_TOL: f64 = 1e-8;
const MAX_SAMPLES: usize = 1 << 20;

fn dot_rc<T: Real>(a: &ComplexTriple<T>, v: [T; 3]) -> Complex<T> {
    a.x * v[0] + a.y * v[1] + a.z * v[2]
}

fn resolve_chart<T: Real>(lp: &impl Loop<T>, model: &MonopoleModel<T>, chart: Chart) -> Result<Chart> {
    if chart != Chart::Auto {
        return Ok(chart);
    }
    let (mut north, mut south) = (T::infinity(), T::infinity());
    for k in 0..64 {
        let s = T::PI() * T::lit(2.0) * T::from_usize(k).unwrap() / T::lit(64.0);
        let p = real_point(lp.point(s));
        let r = big_r(model, &p, BranchState::principal()).map_err(|_| Error::SingularContour)?;
        let z = model.r_vec(&p).z;
        north = north.min((r + z).norm());
        south = south.min((r - z).norm());
    }
    Ok(if north >= south { Chart::North } else { Chart::South })
}

/// `∮A` along `lp` by periodic trapezoid with sample doubling.
pub fn contour_phase<T: Real>(lp: &impl Loop<T>, model: &MonopoleModel<T>, chart: Chart) -> Result<Complex<T>> {
    let chart = resolve_chart(lp, model, chart)?;
    let failed = std::cell::Cell::new(false);
    let integrand = |s: T| {
        let p = real_point(lp.point(s));
        match connection(&p, model, chart) {
            Ok(a) => dot_rc(&a.components, lp.tangent(s)),
            Err(_) => {
                failed.set(true);
                Complex::zero()
            }
        }
    };
    let (v, _) = periodic_doubling(integrand, T::PI() * T::lit(2.0), 64, T::lit(CONTOUR_TOL), MAX_SAMPLES);
    if failed.get() {
        return Err(Error::SingularContour);
    }
    Ok(v)
}

/// `2πq(1 − (z − iε)/√(ρ² + (z − iε)²))` for a horizontal circle, north chart.
pub fn circle_phase_closed_form<T: Real>(circle: &HorizontalCircle<T>, model: &MonopoleModel<T>) -> Result<Complex<T>> {
    let p = real_point([circle.rho, T::zero(), circle.z]);
    let r = big_r(model, &p, BranchState::principal()).map_err(|_| Error::SingularContour)?;
    let z = model.r_vec(&p).z;
    Ok(model.q * (Complex::<T>::one() - z / r) * (T::PI() * T::lit(2.0)))
}

/// Coordinates `(x, y, z, ε)` of the driven atom in the complex Dirac
/// picture: `x = Re V`, `y = Im V`, `z = Δ/2`, `ε = δ/2`.
pub fn garrison_wright_mapping<T: Real>(detuning: T, delta: T, v: Complex<T>) -> ([T; 3], T) {
    let half = T::lit(0.5);
    ([v.re, v.im, detuning * half], delta * half)
}

/// `π(1 − (Δ − iδ)/√(|2V₀|² + (Δ − iδ)²))`.
pub fn garrison_wright_phase<T: Real>(detuning: T, delta: T, v: Complex<T>) -> Complex<T> {
    let d = Complex::new(detuning, -delta);
    let rho2 = v.norm_sqr() * T::lit(4.0);
    (Complex::<T>::one() - d / csqrt_principal(d * d + rho2)) * T::PI()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxResult<T: Real> {
    /// `∬F` over the surface.
    pub surface: Complex<T>,
    /// `∮A` over the oriented boundary.
    pub boundary: Complex<T>,
}

/// Chart whose string does not cross the surface. Crossings are located by
/// the winding of `x + iy` around each grid cell; with no crossing (or two)
/// the chart whose string stays farthest from the samples is used.
fn resolve_surface_chart<T: Real, S: Surface<T>>(surface: &S, model: &MonopoleModel<T>) -> Chart {
    const NU: usize = 64;
    const NV: usize = 128;
    let (u0, u1) = surface.u_range();
    let at = |i: usize, k: usize| {
        let u = u0 + (u1 - u0) * T::from_usize(i).unwrap() / T::from_usize(NU).unwrap();
        let v = T::PI() * T::lit(2.0) * T::from_usize(k % NV).unwrap() / T::from_usize(NV).unwrap();
        surface.point(u, v)
    };
    let grid: Vec<Vec<[T; 3]>> = (0..=NU).map(|i| (0..=NV).map(|k| at(i, k)).collect()).collect();
    let scale = grid.iter().flatten().fold(T::zero(), |m, p| m.max(p[0].abs()).max(p[1].abs()).max(p[2].abs()));
    let tiny = scale * T::lit(1e-12);
    // strings of the north (south) chart sit where R + Z (R − Z) vanishes on the axis
    let pierced = |z: T| -> Option<Chart> {
        let p = real_point([T::zero(), T::zero(), z]);
        let r = big_r(model, &p, BranchState::principal()).ok()?;
        let zz = model.r_vec(&p).z;
        Some(if (r + zz).norm() <= (r - zz).norm() { Chart::North } else { Chart::South })
    };
    let (mut hit_north, mut hit_south) = (false, false);
    let (mut north, mut south) = (T::infinity(), T::infinity());
    for i in 0..NU {
        for k in 0..NV {
            let corners = [grid[i][k], grid[i + 1][k], grid[i + 1][k + 1], grid[i][k + 1]];
            let w: Vec<Complex<T>> = corners.iter().map(|p| Complex::new(p[0], p[1])).collect();
            let zc = corners.iter().fold(T::zero(), |acc, p| acc + p[2]) / T::lit(4.0);
            let touches = w.iter().any(|c| c.norm() <= tiny);
            let winding = if touches {
                T::zero()
            } else {
                (0..4).fold(T::zero(), |acc, j| acc + (w[(j + 1) % 4] / w[j]).arg()) / (T::PI() * T::lit(2.0))
            };
            if touches || winding.abs() > T::lit(0.5) {
                match pierced(zc) {
                    Some(Chart::North) => hit_north = true,
                    Some(_) => hit_south = true,
                    None => {}
                }
            }
            let p = real_point(corners[0]);
            if let Ok(r) = big_r(model, &p, BranchState::principal()) {
                let z = model.r_vec(&p).z;
                north = north.min((r + z).norm() / r.norm());
                south = south.min((r - z).norm() / r.norm());
            }
        }
    }
    match (hit_north, hit_south) {
        (true, false) => Chart::South,
        (false, true) => Chart::North,
        _ if north >= south => Chart::North,
        _ => Chart::South,
    }
}

/// Flux of `B` through `surface` (Romberg in `u`, trapezoid in `v`) and the
/// boundary integral of `A` in `chart`.
pub fn flux_solid_angle<T: Real, S: Surface<T>>(surface: &S, model: &MonopoleModel<T>, chart: Chart) -> Result<FluxResult<T>> {
    let chart = if chart == Chart::Auto { resolve_surface_chart(surface, model) } else { chart };
    let failed = std::cell::Cell::new(false);
    let two_pi = T::PI() * T::lit(2.0);
    let inner = |u: T| {
        let f = |v: T| {
            let p = surface.point(u, v);
            let n = cross_r(surface.du(u, v), surface.dv(u, v));
            match field_and_potential(&real_point(p), model, BranchState::principal()) {
                Ok(s) => dot_rc(&s.b, n),
                Err(_) => {
                    failed.set(true);
                    Complex::zero()
                }
            }
        };
        periodic_doubling(f, two_pi, 32, T::lit(1e-12), 1 << 14).0
    };
    let (u0, u1) = surface.u_range();
    let (flux, _) = romberg(inner, u0, u1, T::lit(1e-11), 18);
    if failed.get() {
        return Err(Error::SingularSurface);
    }
    let outer = contour_phase(&SurfaceLoop { surface, u: u1 }, model, chart).map_err(|_| Error::SingularSurface)?;
    let boundary = if surface.inner_boundary() {
        outer - contour_phase(&SurfaceLoop { surface, u: u0 }, model, chart).map_err(|_| Error::SingularSurface)?
    } else {
        outer
    };
    Ok(FluxResult { surface: flux, boundary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelCell<T: Real> {
    pub point: [T; 3],
    pub value: T,
    pub singular: bool,
}

/// Axis specification `(min, max, count)`.
pub type Axis<T> = (T, T, usize);

fn axis_values<T: Real>(a: Axis<T>) -> Vec<T> {
    if a.2 <= 1 {
        return vec![a.0];
    }
    let step = (a.1 - a.0) / T::from_usize(a.2 - 1).unwrap();
    (0..a.2).map(|k| a.0 + step * T::from_usize(k).unwrap()).collect()
}

/// `Re Φ` or `Im Φ` on a rectangular grid, x fastest; singular cells are
/// flagged with value 0.
pub fn level_surface_grid<T: Real>(model: &MonopoleModel<T>, which: Part, axes: [Axis<T>; 3]) -> Vec<LevelCell<T>> {
    let (xs, ys, zs) = (axis_values(axes[0]), axis_values(axes[1]), axis_values(axes[2]));
    let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
    for &z in &zs {
        for &y in &ys {
            for &x in &xs {
                let point = [x, y, z];
                let cell = match field_and_potential(&real_point(point), model, BranchState::principal()) {
                    Ok(s) => {
                        let value = match which {
                            Part::Re => s.phi.re,
                            Part::Im => s.phi.im,
                        };
                        LevelCell { point, value, singular: false }
                    }
                    Err(_) => LevelCell { point, value: T::zero(), singular: true },
                };
                out.push(cell);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;
    const PI: f64 = std::f64::consts::PI;

    fn pt(x: f64, y: f64, z: f64) -> ComplexTriple<f64> {
        ComplexTriple::real(x, y, z)
    }

    #[test]
    fn connection_examples() {
        let d = MonopoleModel::<f64>::dirac();
        assert!((connection(&pt(1.0, 0.0, 0.0), &d, Chart::North).unwrap().a_phi - C::new(0.5, 0.0)).norm() < 1e-15);
        let h = MonopoleModel::<f64>::hyperbolic();
        assert!((connection(&pt(0.0, 2.0, 0.0), &h, Chart::North).unwrap().a_phi - C::new(0.5, 0.0)).norm() < 1e-15);
        let a = connection(&pt(1e-4, 0.0, 1.0), &h, Chart::North).unwrap().a_phi;
        assert!(a.norm() < 1e-8);
        // one-sheeted angular form q(1 − i sinh θ)
        let th = 0.7f64;
        let a = connection(&pt(th.cosh(), 0.0, th.sinh()), &h, Chart::North).unwrap().a_phi;
        assert!((a - C::new(0.5, -0.5 * th.sinh())).norm() < 1e-14);
        // two-sheeted charts q(1 ∓ cosh θ)
        let up = connection(&pt(th.sinh(), 0.0, th.cosh()), &h, Chart::North).unwrap().a_phi;
        let dn = connection(&pt(th.sinh(), 0.0, -th.cosh()), &h, Chart::North).unwrap().a_phi;
        assert!((up - C::new(0.5 * (1.0 - th.cosh()), 0.0)).norm() < 1e-14);
        assert!((dn - C::new(0.5 * (1.0 + th.cosh()), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn field_examples() {
        let d = MonopoleModel::<f64>::dirac();
        let s = field_and_potential(&pt(0.0, 0.0, 2.0), &d, BranchState::principal()).unwrap();
        assert!((s.b - pt(0.0, 0.0, 0.125)).norm() < 1e-15);
        let cd = MonopoleModel::complex_dirac(1.0).unwrap();
        assert_eq!(field_and_potential(&pt(1.0, 0.0, 0.0), &cd, BranchState::principal()), Err(Error::OnSingularSet));
        for &r in &[2.0, 5.0, 30.0] {
            let s = field_and_potential(&pt(0.0, 0.0, r), &cd, BranchState::principal()).unwrap();
            assert!((s.phi - C::new(0.5, 0.0) / C::new(r, -1.0)).norm() < 1e-15);
        }
    }

    fn central_grad(f: impl Fn([f64; 3]) -> C, p: [f64; 3], h: f64) -> [C; 3] {
        let mut g = [C::zero(); 3];
        for k in 0..3 {
            let (mut a, mut b) = (p, p);
            a[k] += h;
            b[k] -= h;
            g[k] = (f(a) - f(b)) / (2.0 * h);
        }
        g
    }

    #[test]
    fn field_is_gradient_and_curl() {
        let models = [MonopoleModel::dirac(), MonopoleModel::complex_dirac(0.7).unwrap(), MonopoleModel::hyperbolic()];
        let pts = [[0.3, -0.8, 1.1], [1.4, 0.2, -0.5], [-0.6, 0.9, 0.35]];
        for m in &models {
            for &p in &pts {
                let s = field_and_potential(&pt(p[0], p[1], p[2]), m, BranchState::principal()).unwrap();
                let phi = |x: [f64; 3]| field_and_potential(&pt(x[0], x[1], x[2]), m, BranchState::principal()).unwrap().phi;
                let g = central_grad(phi, p, 1e-5);
                let eta = if let Geometry::Hyperbolic = m.geometry { [-1.0, -1.0, 1.0] } else { [1.0, 1.0, 1.0] };
                let b = s.b.to_array();
                for k in 0..3 {
                    assert!((b[k] + g[k] * eta[k]).norm() < 1e-6, "{m:?} grad {k}");
                }
                let a = |x: [f64; 3], k: usize| connection(&pt(x[0], x[1], x[2]), m, Chart::North).unwrap().components.to_array()[k];
                let d = |j: usize, k: usize| central_grad(|x| a(x, k), p, 1e-5)[j];
                let curl = [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)];
                for k in 0..3 {
                    assert!((curl[k] - b[k]).norm() < 1e-6, "{m:?} curl {k}: {} vs {}", curl[k], b[k]);
                }
            }
        }
    }

    #[test]
    fn multipole_examples() {
        let d = MonopoleModel::<f64>::dirac();
        for l in 0..4 {
            assert!((multipole_potential(3.0, 0.4, &d, l).unwrap() - C::new(0.5 / 3.0, 0.0)).norm() < 1e-16);
        }
        let cd = MonopoleModel::complex_dirac(1.0).unwrap();
        let m = multipole_potential(10.0, 0.0, &cd, 2).unwrap();
        let expect = C::new(0.5, 0.0) * (C::new(0.1, 0.0) + C::new(0.0, 0.01) - C::new(0.001, 0.0));
        assert!((m - expect).norm() < 1e-15);
        assert_eq!(multipole_potential(1.0, 0.0, &cd, 2), Err(Error::OutsideConvergence));
        for k in 0..12 {
            let a = k as f64 * PI / 11.0;
            let exact = field_and_potential(&pt(10.0 * a.sin(), 0.0, 10.0 * a.cos()), &cd, BranchState::principal()).unwrap().phi;
            let m = multipole_potential(10.0, a, &cd, 2).unwrap();
            assert!((m - exact).norm() / exact.norm() <= 2e-3);
        }
    }

    #[test]
    fn contour_examples() {
        let d = MonopoleModel::<f64>::dirac();
        let c = HorizontalCircle { rho: 1.0, z: 0.4 };
        let g = contour_phase(&c, &d, Chart::North).unwrap();
        assert!((g - C::new(PI * (1.0 - 0.4 / 1.16f64.sqrt()), 0.0)).norm() < 1e-8);
        let cd = MonopoleModel::complex_dirac(0.5).unwrap();
        let c = HorizontalCircle { rho: 1.2, z: 0.0 };
        let g = contour_phase(&c, &cd, Chart::North).unwrap();
        assert!((g - C::new(PI, PI * 0.5 / (1.44f64 - 0.25).sqrt())).norm() < 1e-8);
        assert!((g - circle_phase_closed_form(&c, &cd).unwrap()).norm() < 1e-8);
        let on = HorizontalCircle { rho: 0.5, z: 0.0 };
        assert_eq!(contour_phase(&on, &cd, Chart::North), Err(Error::SingularContour));
    }

    #[test]
    fn garrison_wright() {
        let (detuning, delta, v) = (0.7, 0.3, C::new(0.4, -0.2));
        let (p, eps) = garrison_wright_mapping(detuning, delta, v);
        let m = MonopoleModel::complex_dirac(eps).unwrap();
        let c = HorizontalCircle { rho: (p[0] * p[0] + p[1] * p[1]).sqrt(), z: p[2] };
        let a = circle_phase_closed_form(&c, &m).unwrap();
        assert!((a - garrison_wright_phase(detuning, delta, v)).norm() < 1e-14);
    }

    #[test]
    fn fluxes() {
        let d = MonopoleModel::<f64>::dirac();
        let f = flux_solid_angle(&SphereCap::full(1.3), &d, Chart::North).unwrap();
        assert!((f.surface - C::new(2.0 * PI, 0.0)).norm() < 1e-8);
        let cap = SphereCap { radius: 1.0, axis: [0.3, -0.2, 1.0], half_angle: 0.8 };
        let f = flux_solid_angle(&cap, &d, Chart::Auto).unwrap();
        let want = C::new(0.5 * cap.solid_angle(), 0.0);
        assert!((f.surface - want).norm() < 1e-8 && (f.boundary - want).norm() < 1e-8, "{f:?}");
        let eq = SphereCap { radius: 1.0, axis: [0.0, 0.0, 1.0], half_angle: PI / 2.0 };
        let f = flux_solid_angle(&eq, &d, Chart::North).unwrap();
        assert!((f.boundary - C::new(PI, 0.0)).norm() < 1e-8);
        let cd = MonopoleModel::complex_dirac(0.4).unwrap();
        let cap = SphereCap { radius: 1.5, axis: [0.5, 0.1, 1.0], half_angle: 0.6 };
        let f = flux_solid_angle(&cap, &cd, Chart::Auto).unwrap();
        assert!((f.surface - f.boundary).norm() < 1e-6);
    }

    #[test]
    fn hyperbolic_charges() {
        let h = MonopoleModel::<f64>::hyperbolic();
        let band = HyperboloidBand { radius: 1.0, theta1: -0.5, theta2: 0.8 };
        let f = flux_solid_angle(&band, &h, Chart::North).unwrap();
        let want = C::new(0.0, -PI * (0.8f64.sinh() - (-0.5f64).sinh()));
        assert!((f.surface - want).norm() < 1e-8 && (f.boundary - want).norm() < 1e-8, "{f:?}");
        for upper in [true, false] {
            let cap = HyperboloidCap { radius: 1.0, theta_max: 0.9, upper };
            let f = flux_solid_angle(&cap, &h, Chart::Auto).unwrap();
            assert!((f.surface - f.boundary).norm() < 1e-8, "{upper} {f:?}");
            assert!(f.surface.im.abs() < 1e-12);
        }
    }

    #[test]
    fn level_grids() {
        let axes: [Axis<f64>; 3] = [(-2.0, 2.0, 9), (0.5, 0.5, 1), (-2.0, 2.0, 9)];
        let one = level_surface_grid(&MonopoleModel::hyperbolic(), Part::Re, axes);
        let two = level_surface_grid(&MonopoleModel::hyperbolic(), Part::Im, axes);
        for (a, b) in one.iter().zip(&two) {
            let r2 = a.point[0] * a.point[0] + a.point[1] * a.point[1] - a.point[2] * a.point[2];
            if a.singular {
                continue;
            }
            if r2 > 0.0 {
                assert!(a.value.abs() < 1e-15);
            } else {
                assert!(b.value.abs() < 1e-15);
            }
        }
        assert!(one.iter().any(|c| c.singular));
    }
}
