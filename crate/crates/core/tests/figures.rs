//! Every recipe under docs/figures regenerates a table whose sampled rows
//! match independent closed forms.

use std::f64::consts::PI;
use std::path::PathBuf;

use epmono::cli::{self, RunConfig, ResultTable, Scenario};
use epmono::gphase::phase_distance;
use num_complex::Complex;

type C = Complex<f64>;

const TOL: f64 = 1e-8;

fn recipes() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/figures");
    let mut v: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "conf"))
        .collect();
    v.sort();
    v
}

/// Value of parameter `name` for row `k`: grid column, else config value.
fn param(cfg: &RunConfig, t: &ResultTable, k: usize, name: &str) -> Option<f64> {
    if let Some(c) = t.column(name) {
        if cfg.grid.iter().any(|a| a.name == name) {
            return Some(t.numeric_row(k)[c]);
        }
    }
    cfg.params.get(name).map(|z| z.re)
}

fn cplx(t: &ResultTable, row: &[f64], name: &str) -> C {
    C::new(row[t.column(&format!("{name}.re")).unwrap()], row[t.column(&format!("{name}.im")).unwrap()])
}

fn close(a: C, b: C) -> bool {
    (a - b).norm() <= TOL * b.norm().max(1.0)
}

struct Atom {
    rho: f64,
    z: f64,
    delta: f64,
    lambda: f64,
    omega: f64,
}

fn atom(cfg: &RunConfig, t: &ResultTable, k: usize) -> Atom {
    let delta = param(cfg, t, k, "delta").unwrap();
    let rho = param(cfg, t, k, "rho").unwrap_or_else(|| {
        let w0 = param(cfg, t, k, "omega0").unwrap();
        if param(cfg, t, k, "coherent").unwrap_or(1.0) != 0.0 {
            (delta * delta + w0 * w0).sqrt()
        } else {
            (delta * delta - w0 * w0).sqrt()
        }
    });
    Atom {
        rho,
        z: param(cfg, t, k, "z").unwrap_or(0.0),
        delta,
        lambda: param(cfg, t, k, "lambda").unwrap_or(delta),
        omega: param(cfg, t, k, "omega").unwrap_or(1.0),
    }
}

/// `√(ρ² + Z²)` with the branch cut approached from `Δ − ω > 0`.
fn principal_omega(big_z: C, rho: f64) -> C {
    let w2 = big_z * big_z + rho * rho;
    C::new(w2.re, w2.im + 0.0).sqrt()
}

/// Non-cyclic phase with principal logarithm (compared mod π).
fn noncyclic_oracle(a: &Atom, t: f64) -> Option<C> {
    let i = C::i();
    let big_z = C::new(a.z, -a.delta);
    let w = principal_omega(big_z, a.rho);
    if w.norm() < 1e-3 {
        return None;
    }
    let (c, s) = ((w * t / 2.0).cos(), (w * t / 2.0).sin());
    let (num, den) = (c + i * big_z / w * s, c - i * big_z / w * s);
    if num.norm() < 1e-6 || den.norm() < 1e-6 {
        return None;
    }
    let smooth = big_z * t / 2.0 - a.omega * a.rho * a.rho * (w * t - (w * t).sin()) / (2.0 * w * w * w);
    Some(smooth + i * 0.5 * (num / den).ln())
}

fn check_row(cfg: &RunConfig, t: &ResultTable, k: usize) -> bool {
    let row = t.numeric_row(k);
    if row[t.column("singular").unwrap()] == 1.0 {
        return true;
    }
    let i = C::i();
    match cfg.scenario {
        Scenario::MonopoleField => {
            let (x, y, z) = (param(cfg, t, k, "x").unwrap(), param(cfg, t, k, "y").unwrap(), param(cfg, t, k, "z").unwrap());
            let q = cfg.params.get("q").copied().unwrap_or(C::new(0.5, 0.0));
            let (phi, b) = if param(cfg, t, k, "hyperbolic").unwrap_or(0.0) != 0.0 {
                let r = C::from(x * x + y * y - z * z).sqrt();
                (-i * q / r, [x, y, z].map(|c| i * q * c / (r * r * r)))
            } else {
                let eps = param(cfg, t, k, "epsilon").unwrap_or(0.0);
                let zc = C::new(z, -eps);
                let r2 = zc * zc + x * x + y * y;
                let r = C::new(r2.re, r2.im + 0.0).sqrt();
                let v = [C::from(x), C::from(y), zc];
                (q / r, v.map(|c| q * c / (r * r * r)))
            };
            close(cplx(t, &row, "phi"), phi)
                && close(cplx(t, &row, "b.x"), b[0])
                && close(cplx(t, &row, "b.y"), b[1])
                && close(cplx(t, &row, "b.z"), b[2])
        }
        Scenario::Phase => {
            let w = C::new(param(cfg, t, k, "a").unwrap_or(0.0), param(cfg, t, k, "b").unwrap_or(0.0));
            let tt = param(cfg, t, k, "t").unwrap();
            let h = w * tt / 2.0;
            let (num, den) = (1.0 + i * h, 1.0 - i * h);
            if num.norm() < 1e-6 || den.norm() < 1e-6 {
                return true;
            }
            let expect = h + i * 0.5 * (num / den).ln();
            phase_distance(cplx(t, &row, "gamma"), expect) <= TOL * expect.norm().max(1.0)
        }
        Scenario::AtomCyclic => {
            let a = atom(cfg, t, k);
            let big_z = C::new(a.z, -a.delta);
            let w = principal_omega(big_z, a.rho);
            let plus = -PI * (1.0 - big_z / w);
            let minus = -PI * (1.0 + big_z / w);
            close(cplx(t, &row, "gamma_plus"), plus)
                && close(cplx(t, &row, "gamma_minus"), minus)
                && close(cplx(t, &row, "gamma_aa"), minus + 2.0 * PI)
        }
        Scenario::AtomNoncyclic => {
            let a = atom(cfg, t, k);
            let tt = param(cfg, t, k, "t").unwrap();
            let got = cplx(t, &row, "gamma");
            let Some(expect) = noncyclic_oracle(&a, tt) else { return true };
            phase_distance(got, expect) <= TOL * expect.norm().max(1.0)
        }
        Scenario::Tunneling => {
            let a = atom(cfg, t, k);
            let tt = param(cfg, t, k, "t").unwrap();
            let w0 = (a.rho * a.rho - a.delta * a.delta).abs().sqrt();
            let decay = (-a.lambda * tt).exp();
            let expect = if a.rho > a.delta {
                decay * ((w0 * tt).cos() - a.delta / w0 * (w0 * tt).sin())
            } else {
                decay * ((w0 * tt).cosh() - a.delta / w0 * (w0 * tt).sinh())
            };
            let rabi = row[t.column("rabi").unwrap()];
            let diff = row[t.column("p_upup").unwrap()] - row[t.column("p_downup").unwrap()];
            (rabi - expect).abs() <= TOL && (diff - expect).abs() <= TOL
        }
        Scenario::Pulses => {
            let a = atom(cfg, t, k);
            let w0 = (a.rho * a.rho - a.delta * a.delta).sqrt();
            let tj = row[t.column("t").unwrap()];
            let phi = (w0 / a.delta).atan();
            let n = (tj * w0 / (2.0 * PI)).round();
            let candidates = [n - 1.0, n, n + 1.0]
                .into_iter()
                .flat_map(|m| [2.0 / w0 * (PI * m + phi), 2.0 / w0 * (PI * m - phi)]);
            candidates.into_iter().any(|c| (c - tj).abs() <= TOL)
        }
        _ => unreachable!("no recipe for {}", cfg.scenario.name()),
    }
}

#[test]
fn every_recipe_matches_closed_forms() {
    let list = recipes();
    assert!(list.len() >= 12, "found {} recipes", list.len());
    for path in list {
        let cfg = RunConfig::load(&path, None).unwrap();
        let t = cli::run(&cfg).unwrap();
        assert!(!t.rows.is_empty(), "{}", path.display());
        let stride = (t.rows.len() / 97).max(1);
        let mut checked = 0;
        for k in (0..t.rows.len()).step_by(stride) {
            assert!(check_row(&cfg, &t, k), "{} row {k}: {:?}", path.display(), t.numeric_row(k));
            checked += 1;
        }
        assert!(checked >= 1);
        let singular = t.column("singular").unwrap();
        let flagged = (0..t.rows.len()).filter(|&k| t.numeric_row(k)[singular] == 1.0).count();
        assert!(flagged * 10 < t.rows.len().max(10), "{}: {flagged} singular rows", path.display());
    }
}

#[test]
fn noncyclic_resonant_rows_match_real_closed_form() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/figures/pulses-coherent.conf");
    let cfg = RunConfig::load(&path, None).unwrap();
    let t = cli::run(&cfg).unwrap();
    let p = epmono::atom::AtomParams::resonant((0.25f64 + 4.0).sqrt(), 0.5, 0.5, 1.0).unwrap();
    for k in (0..t.rows.len()).step_by(13) {
        let row = t.numeric_row(k);
        let Ok(expect) = epmono::atom::coherent_incoherent_phase(&p, row[0]) else { continue };
        assert!(phase_distance(cplx(&t, &row, "gamma"), expect) < TOL, "t = {}", row[0]);
    }
}
