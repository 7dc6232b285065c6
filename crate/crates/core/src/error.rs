use thiserror::Error;

use crate::ham2::DegeneracyClass;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("continuation step too large: both square-root branches are nearly equidistant")]
    StepTooLarge,
    #[error("phase step at index {index} exceeds pi")]
    PhaseStepTooLarge { index: usize },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("degenerate point: {0:?}")]
    DegeneratePoint(DegeneracyClass),
    #[error("azimuth is indeterminate: exactly one of X+iY, X-iY vanishes")]
    IndeterminatePhase,
    #[error("Bloch vector is not unit: n.n - 1 = {0:e}")]
    NotUnit(f64),
    #[error("integration step rejected at t = {t}: <u~|u> drifted by {drift:e}")]
    StepRejected { t: f64, drift: f64 },
    #[error("Bloch trajectory approaches both poles: frame rotation cannot avoid 1+n3 = 0")]
    PoleUnavoidable,
    #[error("loop is not closed: endpoint mismatch {0:e}")]
    NotClosed(f64),
    #[error("overlap <u~(t)|u(0)> vanishes; phase undefined")]
    OverlapVanishes,
    #[error("loop passes within the degeneracy margin at s = {s}")]
    DegeneracyOnLoop { s: f64 },
    #[error("loop encircles the exceptional set; eigenbranches are exchanged")]
    LoopEncirclesExceptionalPoint,
    #[error("point lies on the singular set of the monopole")]
    OnSingularSet,
    #[error("multipole series diverges for r <= epsilon")]
    OutsideConvergence,
    #[error("contour touches the singular set")]
    SingularContour,
    #[error("surface touches the singular set")]
    SingularSurface,
    #[error("phase undefined at the exceptional-point pulse time without a side limit")]
    UndefinedAtPulse,
    #[error("no phase pulses without dissipation (delta = 0)")]
    NoPulse,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
