//! Scenario runner: flat config files in, deterministic CSV/JSON tables out.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex;

use crate::atom::{self, AtomParams};
use crate::calg::{BranchState, ComplexTriple};
use crate::error::Error;
use crate::evolve::Regime;
use crate::gphase::constant_hamiltonian_phase;
use crate::ham2::{classify, eigensystem, Branch, DegeneracyLabel, Hamiltonian2};
use crate::monopole::{self, Chart, HorizontalCircle, MonopoleModel};

type C = Complex<f64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: {msg}")]
    BadValue { key: String, msg: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("grid cell {index}: {source}")]
    Scenario { index: usize, source: Error },
    #[error("cannot write {path}: {msg}")]
    Io { path: String, msg: String },
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Eig,
    Evolve,
    Phase,
    MonopoleField,
    Contour,
    AtomCyclic,
    AtomNoncyclic,
    Tunneling,
    Pulses,
    Sweep,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::Eig,
        Scenario::Evolve,
        Scenario::Phase,
        Scenario::MonopoleField,
        Scenario::Contour,
        Scenario::AtomCyclic,
        Scenario::AtomNoncyclic,
        Scenario::Tunneling,
        Scenario::Pulses,
        Scenario::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Eig => "eig",
            Scenario::Evolve => "evolve",
            Scenario::Phase => "phase",
            Scenario::MonopoleField => "monopole-field",
            Scenario::Contour => "contour",
            Scenario::AtomCyclic => "atom-cyclic",
            Scenario::AtomNoncyclic => "atom-noncyclic",
            Scenario::Tunneling => "tunneling",
            Scenario::Pulses => "pulses",
            Scenario::Sweep => "sweep",
        }
    }

    fn params(self) -> &'static [Param] {
        use Fallback::*;
        const TWO_LEVEL: &[Param] = &[
            Param::complex("lambda0", Num(0.0)),
            Param::complex("x", Num(0.0)),
            Param::complex("y", Num(0.0)),
            Param::complex("z", Num(0.0)),
        ];
        const EVOLVE: &[Param] = &[
            Param::complex("lambda0", Num(0.0)),
            Param::complex("x", Num(0.0)),
            Param::complex("y", Num(0.0)),
            Param::complex("z", Num(0.0)),
            Param::complex("n1", Num(0.0)),
            Param::complex("n2", Num(0.0)),
            Param::complex("n3", Num(1.0)),
            Param::real("a", Optional),
            Param::real("b", Optional),
            Param::real("t", Required),
        ];
        const FIELD: &[Param] = &[
            Param::real("hyperbolic", Num(0.0)),
            Param::real("epsilon", Num(0.0)),
            Param::complex("q", Num(0.5)),
            Param::real("x", Num(0.0)),
            Param::real("y", Num(0.0)),
            Param::real("z", Num(0.0)),
        ];
        const CONTOUR: &[Param] = &[
            Param::real("hyperbolic", Num(0.0)),
            Param::real("epsilon", Num(0.0)),
            Param::complex("q", Num(0.5)),
            Param::real("rho", Num(1.0)),
            Param::real("z", Num(0.0)),
        ];
        const CYCLIC: &[Param] = &[
            Param::real("rho", Required),
            Param::real("z", Num(0.0)),
            Param::real("delta", Required),
            Param::real("lambda", SameAs("delta")),
            Param::real("omega", Num(1.0)),
        ];
        const TIMED: &[Param] = &[
            Param::real("rho", Optional),
            Param::real("omega0", Optional),
            Param::real("coherent", Num(1.0)),
            Param::real("z", Num(0.0)),
            Param::real("delta", Required),
            Param::real("lambda", SameAs("delta")),
            Param::real("omega", Num(1.0)),
            Param::real("t", Required),
        ];
        const TUNNELING: &[Param] = &[
            Param::real("rho", Optional),
            Param::real("omega0", Optional),
            Param::real("coherent", Num(1.0)),
            Param::real("z", Num(0.0)),
            Param::real("delta", Required),
            Param::real("lambda", SameAs("delta")),
            Param::real("omega", Num(1.0)),
            Param::real("t", Required),
        ];
        const PULSES: &[Param] = &[
            Param::real("rho", Optional),
            Param::real("omega0", Optional),
            Param::real("coherent", Num(1.0)),
            Param::real("delta", Required),
            Param::real("lambda", SameAs("delta")),
            Param::real("omega", Num(1.0)),
            Param::real("t_max", Required),
        ];
        match self {
            Scenario::Eig => TWO_LEVEL,
            Scenario::Evolve | Scenario::Phase => EVOLVE,
            Scenario::MonopoleField => FIELD,
            Scenario::Contour => CONTOUR,
            Scenario::AtomCyclic => CYCLIC,
            Scenario::AtomNoncyclic | Scenario::Sweep => TIMED,
            Scenario::Tunneling => TUNNELING,
            Scenario::Pulses => PULSES,
        }
    }

    fn outputs(self) -> &'static [(&'static str, Kind)] {
        use Kind::*;
        match self {
            Scenario::Eig => &[
                ("lambda_plus", Cplx),
                ("lambda_minus", Cplx),
                ("big_r", Cplx),
                ("diabolic", Flag),
                ("exceptional", Flag),
            ],
            Scenario::Evolve => &[("n.x", Cplx), ("n.y", Cplx), ("n.z", Cplx)],
            Scenario::Phase => &[("gamma", Cplx)],
            Scenario::MonopoleField => &[("phi", Cplx), ("b.x", Cplx), ("b.y", Cplx), ("b.z", Cplx)],
            Scenario::Contour => &[("gamma", Cplx), ("gamma_closed", Cplx)],
            Scenario::AtomCyclic => &[
                ("gamma_plus", Cplx),
                ("gamma_minus", Cplx),
                ("gamma_aa", Cplx),
                ("coherent", Flag),
                ("exceptional", Flag),
                ("near_ep", Flag),
            ],
            Scenario::AtomNoncyclic => &[("gamma", Cplx)],
            Scenario::Tunneling => &[("p_upup", Real), ("p_downup", Real), ("rabi", Real)],
            Scenario::Pulses => &[
                ("index", Int),
                ("t", Real),
                ("delta_re", Real),
                ("duration", Real),
                ("bounded", Flag),
                ("no_pulse", Flag),
            ],
            Scenario::Sweep => &[
                ("gamma_aa", Cplx),
                ("gamma_noncyclic", Cplx),
                ("p_upup", Real),
                ("p_downup", Real),
                ("rabi", Real),
            ],
        }
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| ConfigError::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Fallback {
    Num(f64),
    Required,
    Optional,
    SameAs(&'static str),
}

#[derive(Debug, Clone, Copy)]
struct Param {
    name: &'static str,
    default: Fallback,
    complex: bool,
}

impl Param {
    const fn real(name: &'static str, default: Fallback) -> Self {
        Self { name, default, complex: false }
    }

    const fn complex(name: &'static str, default: Fallback) -> Self {
        Self { name, default, complex: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Real,
    Cplx,
    Flag,
    Int,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(ConfigError::BadValue { key: "format".into(), msg: format!("expected csv or json, got `{s}`") }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.max } else { self.min + step * k as f64 })
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub params: BTreeMap<String, C>,
    pub grid: Vec<GridAxis>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (exponents allowed).
pub fn parse_complex(s: &str) -> Option<C> {
    let s = s.trim();
    let finite = |v: f64| v.is_finite().then_some(v);
    let num = |t: &str| -> Option<f64> {
        if t.is_empty() || t.contains(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
            return None;
        }
        t.parse::<f64>().ok().and_then(finite)
    };
    let Some(body) = s.strip_suffix('i') else {
        return num(s).map(|re| C::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => num(t),
    };
    match split {
        Some(k) => Some(C::new(num(&body[..k])?, imag(&body[k..])?)),
        None => Some(C::new(0.0, imag(body)?)),
    }
}

fn format_complex(z: C) -> String {
    if z.im == 0.0 {
        num(z.re)
    } else {
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{}{}i", num(z.re), sign, num(z.im.abs()))
    }
}

fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn bad(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.to_string(), msg: msg.into() }
}

fn parse_axis(key: &str, value: &str) -> Result<GridAxis, ConfigError> {
    let name = &key["grid.".len()..];
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad(key, "expected min:max:count"));
    }
    let real = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(key, format!("`{t}` is not a finite number")));
    let (min, max) = (real(parts[0])?, real(parts[1])?);
    let count: usize = parts[2].parse().map_err(|_| bad(key, format!("count `{}` is not an integer", parts[2])))?;
    if count < 2 {
        return Err(bad(key, "grid count must be at least 2"));
    }
    if !(max > min) {
        return Err(bad(key, "grid max must exceed min"));
    }
    Ok(GridAxis { name: name.to_string(), min, max, count })
}

impl RunConfig {
    pub fn load(path: &Path, scenario: Option<Scenario>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), msg: e.to_string() })?;
        Self::parse(&text, scenario)
    }

    /// Parses config text. A scenario given here must agree with any
    /// `scenario` key in the text.
    pub fn parse(text: &str, scenario: Option<Scenario>) -> Result<Self, ConfigError> {
        let mut raw: Vec<(String, String)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: n + 1, msg: "expected `key = value`".into() });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ConfigError::Syntax { line: n + 1, msg: "empty key".into() });
            }
            if raw.iter().any(|(seen, _)| seen == k) {
                return Err(ConfigError::Duplicate(k.to_string()));
            }
            raw.push((k.to_string(), v.to_string()));
        }

        let lookup = |key: &str| raw.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let scenario = match (scenario, lookup("scenario")) {
            (Some(s), Some(v)) if v != s.name() => {
                return Err(bad("scenario", format!("config names `{v}` but `{}` was requested", s.name())));
            }
            (Some(s), _) => s,
            (None, Some(v)) => v.parse()?,
            (None, None) => return Err(ConfigError::Missing("scenario".into())),
        };
        let specs = scenario.params();

        let mut cfg = RunConfig {
            scenario,
            params: BTreeMap::new(),
            grid: Vec::new(),
            output: None,
            format: Format::Csv,
            workers: 1,
        };
        for (k, v) in &raw {
            match k.as_str() {
                "scenario" => {}
                "output" => cfg.output = Some(PathBuf::from(v)),
                "format" => cfg.format = v.parse()?,
                "workers" => {
                    cfg.workers = v.parse().ok().filter(|&w: &usize| w >= 1).ok_or_else(|| bad(k, "expected a positive integer"))?
                }
                _ if k.starts_with("grid.") => {
                    let axis = parse_axis(k, v)?;
                    if !specs.iter().any(|p| p.name == axis.name) {
                        return Err(ConfigError::UnknownKey(k.clone()));
                    }
                    cfg.grid.push(axis);
                }
                _ => {
                    let spec = specs.iter().find(|p| p.name == k).ok_or_else(|| ConfigError::UnknownKey(k.clone()))?;
                    let z = parse_complex(v).ok_or_else(|| bad(k, format!("malformed number `{v}` (complex form is a+bi)")))?;
                    if !spec.complex && z.im != 0.0 {
                        return Err(bad(k, "must be real"));
                    }
                    cfg.params.insert(k.clone(), z);
                }
            }
        }
        for axis in &cfg.grid {
            if cfg.params.contains_key(&axis.name) {
                return Err(bad(&axis.name, "set both as a value and as a grid axis"));
            }
        }
        for p in specs {
            if p.default == Fallback::Required && !cfg.params.contains_key(p.name) && !cfg.grid.iter().any(|a| a.name == p.name) {
                return Err(ConfigError::Missing(p.name.to_string()));
            }
        }
        let has = |n: &str| cfg.params.contains_key(n) || cfg.grid.iter().any(|a| a.name == n);
        if matches!(scenario, Scenario::Evolve | Scenario::Phase) && (has("a") || has("b")) {
            if let Some(k) = ["x", "y", "z"].into_iter().find(|k| has(k)) {
                return Err(bad(k, "cannot be combined with the exceptional-point form a, b"));
            }
        }
        if matches!(scenario, Scenario::Tunneling | Scenario::Pulses | Scenario::AtomNoncyclic | Scenario::Sweep) {
            match (has("rho"), has("omega0")) {
                (true, true) => return Err(bad("omega0", "give either rho or omega0, not both")),
                (false, false) => return Err(ConfigError::Missing("rho".into())),
                _ => {}
            }
        }
        Ok(cfg)
    }

    pub fn cell_count(&self) -> usize {
        self.grid.iter().map(|a| a.count).product()
    }

    /// Parameter values of grid cell `index`; the first axis varies slowest.
    fn cell(&self, index: usize) -> (Vec<f64>, Cell) {
        let mut coords = vec![0.0; self.grid.len()];
        let mut rest = index;
        for (k, axis) in self.grid.iter().enumerate().rev() {
            let j = rest % axis.count;
            rest /= axis.count;
            coords[k] = if j + 1 == axis.count { axis.max } else { axis.min + axis.step() * j as f64 };
        }
        let mut values = self.params.clone();
        for (axis, &v) in self.grid.iter().zip(&coords) {
            values.insert(axis.name.clone(), C::new(v, 0.0));
        }
        for p in self.scenario.params() {
            if values.contains_key(p.name) {
                continue;
            }
            match p.default {
                Fallback::Num(v) => {
                    values.insert(p.name.to_string(), C::new(v, 0.0));
                }
                Fallback::SameAs(other) => {
                    if let Some(&v) = values.get(other) {
                        values.insert(p.name.to_string(), v);
                    }
                }
                _ => {}
            }
        }
        let steps = self.grid.iter().map(|a| (a.name.clone(), a.step())).collect();
        (coords, Cell { values, steps })
    }

    fn provenance(&self) -> Vec<String> {
        let mut lines = vec![
            format!("epmono {}", env!("CARGO_PKG_VERSION")),
            format!("scenario = {}", self.scenario.name()),
        ];
        for (k, v) in &self.params {
            lines.push(format!("{k} = {}", format_complex(*v)));
        }
        for a in &self.grid {
            lines.push(format!("grid.{} = {}:{}:{}", a.name, num(a.min), num(a.max), a.count));
        }
        lines.push(format!(
            "tolerances: degeneracy = {:e}, diabolic = {:e}, pulse = 1e-13, contour = 1e-8",
            crate::ham2::DEGENERACY_RADIUS,
            crate::ham2::DIABOLIC_RADIUS
        ));
        lines
    }
}

struct Cell {
    values: BTreeMap<String, C>,
    steps: BTreeMap<String, f64>,
}

impl Cell {
    fn c(&self, key: &str) -> C {
        self.values[key]
    }

    fn r(&self, key: &str) -> f64 {
        self.values[key].re
    }

    fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).map(|z| z.re)
    }

    fn step(&self, key: &str) -> f64 {
        self.steps.get(key).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Real(f64),
    Complex(C),
    Flag(bool),
    Int(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub provenance: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

fn render(v: &Value, out: &mut Vec<String>) {
    match *v {
        Value::Real(x) => out.push(num(x)),
        Value::Complex(z) => {
            out.push(num(z.re));
            out.push(num(z.im));
        }
        Value::Flag(b) => out.push(if b { "1" } else { "0" }.into()),
        Value::Int(n) => out.push(n.to_string()),
    }
}

impl ResultTable {
    fn cells(row: &[Value]) -> Vec<String> {
        let mut out = Vec::new();
        row.iter().for_each(|v| render(v, &mut out));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for line in &self.provenance {
            let _ = writeln!(s, "# {line}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(s, "{}", Self::cells(row).join(","));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let quote = |t: &str| format!("\"{}\"", t.replace('\\', "\\\\").replace('"', "\\\""));
        let list = |items: Vec<String>| items.join(", ");
        let mut s = String::from("{\n");
        let _ = writeln!(s, "  \"provenance\": [{}],", list(self.provenance.iter().map(|l| quote(l)).collect()));
        let _ = writeln!(s, "  \"columns\": [{}],", list(self.columns.iter().map(|c| quote(c)).collect()));
        s.push_str("  \"rows\": [");
        for (k, row) in self.rows.iter().enumerate() {
            s.push_str(if k == 0 { "\n" } else { ",\n" });
            let _ = write!(s, "    [{}]", list(Self::cells(row)));
        }
        s.push_str(if self.rows.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Column index of `name` after complex splitting.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Row `k` flattened to numbers in column order.
    pub fn numeric_row(&self, k: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for v in &self.rows[k] {
            match *v {
                Value::Real(x) => out.push(x),
                Value::Complex(z) => {
                    out.push(z.re);
                    out.push(z.im);
                }
                Value::Flag(b) => out.push(if b { 1.0 } else { 0.0 }),
                Value::Int(n) => out.push(n as f64),
            }
        }
        out
    }
}

fn header(cfg: &RunConfig) -> Vec<String> {
    let mut cols: Vec<String> = cfg.grid.iter().map(|a| a.name.clone()).collect();
    for (name, kind) in cfg.scenario.outputs() {
        match kind {
            Kind::Cplx => {
                cols.push(format!("{name}.re"));
                cols.push(format!("{name}.im"));
            }
            _ => cols.push(name.to_string()),
        }
    }
    cols.push("singular".into());
    cols
}

/// Errors that mark a cell as singular instead of aborting the run.
fn is_singular(e: &Error) -> bool {
    matches!(
        e,
        Error::OnSingularSet
            | Error::DegeneratePoint(_)
            | Error::UndefinedAtPulse
            | Error::SingularContour
            | Error::SingularSurface
            | Error::OverlapVanishes
            | Error::DegeneracyOnLoop { .. }
            | Error::NoPulse
    )
}

struct Outputs {
    values: Vec<Value>,
    singular: bool,
}

impl Outputs {
    fn new() -> Self {
        Self { values: Vec::new(), singular: false }
    }

    fn complex(&mut self, r: crate::Result<C>) -> crate::Result<()> {
        let v = self.soft(r, C::new(0.0, 0.0))?;
        self.values.push(Value::Complex(v));
        Ok(())
    }

    fn real(&mut self, x: f64) {
        self.values.push(Value::Real(x));
    }

    fn flag(&mut self, b: bool) {
        self.values.push(Value::Flag(b));
    }

    fn soft<V>(&mut self, r: crate::Result<V>, fallback: V) -> crate::Result<V> {
        match r {
            Ok(v) => Ok(v),
            Err(e) if is_singular(&e) => {
                self.singular = true;
                Ok(fallback)
            }
            Err(e) => Err(e),
        }
    }

    /// Non-finite numbers become zero and flag the row.
    fn finish(mut self) -> (Vec<Value>, bool) {
        for v in &mut self.values {
            match v {
                Value::Real(x) if !x.is_finite() => {
                    *x = 0.0;
                    self.singular = true;
                }
                Value::Complex(z) if !(z.re.is_finite() && z.im.is_finite()) => {
                    *z = C::new(0.0, 0.0);
                    self.singular = true;
                }
                _ => {}
            }
        }
        (self.values, self.singular)
    }
}

/// `H = λ₀ + 𝐑·σ`, or with `a`/`b` the exceptional point
/// `𝛀 = (0, iw, w)` with `w = a + ib`.
fn hamiltonian(c: &Cell) -> Hamiltonian2<f64> {
    if c.get("a").is_some() || c.get("b").is_some() {
        let w = C::new(c.get("a").unwrap_or(0.0), c.get("b").unwrap_or(0.0)) * 0.5;
        let r = ComplexTriple::new(C::new(0.0, 0.0), C::i() * w, w);
        return Hamiltonian2::from_xyz(c.c("lambda0"), r);
    }
    Hamiltonian2::from_xyz(c.c("lambda0"), ComplexTriple::new(c.c("x"), c.c("y"), c.c("z")))
}

fn model(c: &Cell) -> crate::Result<MonopoleModel<f64>> {
    let m = if c.r("hyperbolic") != 0.0 {
        MonopoleModel::hyperbolic()
    } else if c.r("epsilon") != 0.0 {
        MonopoleModel::complex_dirac(c.r("epsilon"))?
    } else {
        MonopoleModel::dirac()
    };
    Ok(m.with_charge(c.c("q")))
}

/// Atom parameters with ρ taken from `rho`, or from `omega0` and the
/// `coherent` flag at resonance.
fn atom_params(c: &Cell) -> crate::Result<AtomParams<f64>> {
    let delta = c.r("delta");
    let rho = match (c.get("rho"), c.get("omega0")) {
        (Some(rho), _) => rho,
        (None, Some(w0)) => {
            let rho2 = if c.r("coherent") != 0.0 { delta * delta + w0 * w0 } else { delta * delta - w0 * w0 };
            if rho2 < 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "no incoherent point with omega0 = {w0} above delta = {delta}"
                )));
            }
            rho2.sqrt()
        }
        (None, None) => return Err(Error::InvalidParameters("rho or omega0 required".into())),
    };
    let omega = c.r("omega");
    let z = c.get("z").unwrap_or(0.0);
    AtomParams::new(omega + z, delta, c.r("lambda"), omega, rho / 2.0)
}

fn evaluate(s: Scenario, c: &Cell) -> crate::Result<Vec<(Vec<Value>, bool)>> {
    let mut o = Outputs::new();
    match s {
        Scenario::Eig => {
            let h = hamiltonian(c);
            let class = classify(&h.r(), None);
            let es = o.soft(eigensystem(&h, BranchState::principal()).map(Some), None)?;
            let (lp, lm, big_r) = match es {
                Some(es) => (es.lambda_plus, es.lambda_minus, es.r),
                None => (h.lambda0, h.lambda0, crate::calg::csqrt_principal(h.r().dot(&h.r()))),
            };
            o.values.extend([Value::Complex(lp), Value::Complex(lm), Value::Complex(big_r)]);
            o.flag(class.label == DegeneracyLabel::DiabolicPoint);
            o.flag(class.label == DegeneracyLabel::ExceptionalPoint);
        }
        Scenario::Evolve => {
            let n = ComplexTriple::new(c.c("n1"), c.c("n2"), c.c("n3"));
            let b = crate::evolve::bloch_closed_form(&hamiltonian(c), &n, c.r("t"))?;
            o.values.extend([Value::Complex(b.x), Value::Complex(b.y), Value::Complex(b.z)]);
        }
        Scenario::Phase => {
            let n = ComplexTriple::new(c.c("n1"), c.c("n2"), c.c("n3"));
            o.complex(constant_hamiltonian_phase(&hamiltonian(c), &n, c.r("t")))?;
        }
        Scenario::MonopoleField => {
            let m = model(c)?;
            let p = ComplexTriple::real(c.r("x"), c.r("y"), c.r("z"));
            let f = o.soft(monopole::field_and_potential(&p, &m, BranchState::principal()).map(Some), None)?;
            let zero = C::new(0.0, 0.0);
            let (phi, b) = f.map_or((zero, ComplexTriple::new(zero, zero, zero)), |f| (f.phi, f.b));
            o.values.extend([Value::Complex(phi), Value::Complex(b.x), Value::Complex(b.y), Value::Complex(b.z)]);
        }
        Scenario::Contour => {
            let m = model(c)?;
            let circle = HorizontalCircle { rho: c.r("rho"), z: c.r("z") };
            o.complex(monopole::contour_phase(&circle, &m, Chart::Auto))?;
            o.complex(monopole::circle_phase_closed_form(&circle, &m))?;
        }
        Scenario::AtomCyclic => {
            let p = atom_params(c)?;
            o.complex(atom::cyclic_phase(&p, Branch::Plus))?;
            o.complex(atom::cyclic_phase(&p, Branch::Minus))?;
            o.complex(atom::aharonov_anandan_phase(&p))?;
            let rep = atom::regime_report(&p);
            o.flag(rep.regime == Regime::Coherent);
            o.flag(rep.regime == Regime::ExceptionalPoint);
            let near = |x: f64, step: f64| x.abs() <= step.max(1e-9);
            o.flag(near(p.rho() - p.delta, c.step("rho")) && near(p.z(), c.step("z")));
        }
        Scenario::AtomNoncyclic => {
            let p = atom_params(c)?;
            o.complex(atom::noncyclic_phase(&p, c.r("t")))?;
        }
        Scenario::Tunneling => {
            let p = atom_params(c)?;
            let (a, b) = atom::tunneling_probabilities(&p, c.r("t"));
            o.real(a);
            o.real(b);
            o.real(atom::rabi_function(&p, c.r("t")));
        }
        Scenario::Pulses => {
            let p = atom_params(c)?;
            let sched = match atom::phase_pulse_times(&p, c.r("t_max")) {
                Ok(s) => s,
                Err(Error::NoPulse) => {
                    let row = vec![
                        Value::Int(0),
                        Value::Real(0.0),
                        Value::Real(0.0),
                        Value::Real(0.0),
                        Value::Flag(false),
                        Value::Flag(true),
                    ];
                    return Ok(vec![(row, false)]);
                }
                Err(e) => return Err(e),
            };
            let bounded = sched.duration.is_finite();
            let duration = if bounded { sched.duration } else { 0.0 };
            return Ok(sched
                .jumps
                .iter()
                .enumerate()
                .map(|(k, j)| {
                    let row = vec![
                        Value::Int(k),
                        Value::Real(j.t),
                        Value::Real(j.delta_re),
                        Value::Real(duration),
                        Value::Flag(bounded),
                        Value::Flag(false),
                    ];
                    (row, false)
                })
                .collect());
        }
        Scenario::Sweep => {
            let p = atom_params(c)?;
            let t = c.r("t");
            o.complex(atom::aharonov_anandan_phase(&p))?;
            o.complex(atom::noncyclic_phase(&p, t))?;
            let (a, b) = atom::tunneling_probabilities(&p, t);
            o.real(a);
            o.real(b);
            o.real(atom::rabi_function(&p, t));
        }
    }
    Ok(vec![o.finish()])
}

type CellRows = Vec<(Vec<f64>, Vec<(Vec<Value>, bool)>)>;

fn run_range(cfg: &RunConfig, range: std::ops::Range<usize>) -> Result<CellRows, RunError> {
    range
        .map(|index| {
            let (coords, cell) = cfg.cell(index);
            evaluate(cfg.scenario, &cell)
                .map(|rows| (coords, rows))
                .map_err(|source| RunError::Scenario { index, source })
        })
        .collect()
}

/// Evaluates every grid cell; rows come out in cell order whatever the
/// worker count.
pub fn run(cfg: &RunConfig) -> Result<ResultTable, RunError> {
    let n = cfg.cell_count();
    let workers = cfg.workers.clamp(1, n.max(1));
    let chunk = n.div_ceil(workers);
    let parts: Vec<Result<CellRows, RunError>> = if workers == 1 {
        vec![run_range(cfg, 0..n)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let range = (w * chunk).min(n)..((w + 1) * chunk).min(n);
                    scope.spawn(move || run_range(cfg, range))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut rows = Vec::new();
    for part in parts {
        for (coords, cell_rows) in part? {
            for (values, singular) in cell_rows {
                let mut row: Vec<Value> = coords.iter().map(|&x| Value::Real(x)).collect();
                row.extend(values);
                row.push(Value::Flag(singular));
                rows.push(row);
            }
        }
    }
    Ok(ResultTable { provenance: cfg.provenance(), columns: header(cfg), rows })
}

/// Runs `cfg` and writes the table to its output path, or returns the text
/// when no path is set.
pub fn execute(cfg: &RunConfig) -> Result<Option<String>, RunError> {
    let text = run(cfg)?.render(cfg.format);
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| RunError::Io { path: path.display().to_string(), msg: e.to_string() })?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

/// Checks a config without running it and lists derived quantities at the
/// first grid cell.
pub fn validate(path: &Path) -> Result<Vec<String>, ConfigError> {
    let cfg = RunConfig::load(path, None)?;
    validate_config(&cfg)
}

pub fn validate_config(cfg: &RunConfig) -> Result<Vec<String>, ConfigError> {
    let mut out = vec![format!("scenario = {}", cfg.scenario.name()), format!("cells = {}", cfg.cell_count())];
    let (_, cell) = cfg.cell(0);
    match cfg.scenario {
        Scenario::Eig | Scenario::Evolve | Scenario::Phase => {
            let class = classify(&hamiltonian(&cell).r(), None);
            out.push(format!("degeneracy = {:?}", class.label));
        }
        Scenario::MonopoleField | Scenario::Contour => {
            let m = model(&cell).map_err(|e| bad("epsilon", e.to_string()))?;
            out.push(format!("geometry = {:?}", m.geometry));
        }
        _ => {
            let p = atom_params(&cell).map_err(|e| {
                let key = if cell.get("omega0").is_some() { "omega0" } else { "lambda" };
                bad(key, e.to_string())
            })?;
            let rep = atom::regime_report(&p);
            out.push(format!("omega0 = {}", num(rep.omega0)));
            out.push(format!("regime = {:?}", rep.regime));
            out.push(format!("ep_distance = {}", num((p.rho() - p.delta).hypot(p.z()))));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+2i"), Some(C::new(1.0, 2.0)));
        assert_eq!(parse_complex("1.5e-3-2E2i"), Some(C::new(1.5e-3, -200.0)));
        assert_eq!(parse_complex("-i"), Some(C::new(0.0, -1.0)));
        assert_eq!(parse_complex("3.25"), Some(C::new(3.25, 0.0)));
        assert_eq!(parse_complex("-1e+2+1e-2i"), Some(C::new(-100.0, 0.01)));
        for bad in ["1+2j", "", "nan", "inf", "1+", "i2", "1e"] {
            assert_eq!(parse_complex(bad), None, "{bad}");
        }
    }

    #[test]
    fn grid_order_first_axis_slowest() {
        let cfg = RunConfig::parse("delta = 0.5\ngrid.rho = 0:1:2\ngrid.z = 0:2:3\n", Some(Scenario::AtomCyclic)).unwrap();
        let coords: Vec<Vec<f64>> = (0..6).map(|k| cfg.cell(k).0).collect();
        assert_eq!(coords[1], vec![0.0, 1.0]);
        assert_eq!(coords[3], vec![1.0, 0.0]);
    }

    #[test]
    fn config_errors_name_the_key() {
        let e = RunConfig::parse("x = 1+2j", Some(Scenario::Eig)).unwrap_err();
        assert!(e.to_string().contains("`x`"));
        let e = RunConfig::parse("grid.x = 0:1:1", Some(Scenario::Eig)).unwrap_err();
        assert!(e.to_string().contains("grid.x"));
        let e = RunConfig::parse("w = 1", Some(Scenario::Eig)).unwrap_err();
        assert_eq!(e, ConfigError::UnknownKey("w".into()));
        let e = RunConfig::parse("delta = 0.1", Some(Scenario::AtomCyclic)).unwrap_err();
        assert_eq!(e, ConfigError::Missing("rho".into()));
    }
}
