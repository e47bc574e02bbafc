use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Initial conditions whose Wronskian with their conjugate is not −2i.
    #[error("initial conditions are not canonical: wronskian = {wronskian} (expected -2i)")]
    NonCanonicalInitialConditions { wronskian: Complex64 },

    #[error("mode function nearly vanishes at t = {t}: |eps| = {modulus:e}")]
    ZeroCrossing { t: f64, modulus: f64 },

    #[error("adaptive integrator failed at t = {t} (step {step:e})")]
    StepFailure { t: f64, step: f64 },

    #[error("t = {t} lies outside the stored interval [{start}, {end}]")]
    OutOfInterval { t: f64, start: f64, end: f64 },

    /// A quantity that must be real picked up an imaginary part.
    #[error("imaginary residue {imag:e} exceeds the reality tolerance")]
    ComplexLeak { imag: f64 },

    /// |mu|^2 - |nu|^2 (or |v|^2 - |u|^2) differs from one.
    #[error("bogoliubov pair is not canonical: |mu|^2 - |nu|^2 - 1 = {defect:e}")]
    NonCanonical { defect: f64 },

    #[error("degenerate moments: |<zp>| = {magnitude:e}")]
    DegenerateMoments { magnitude: f64 },

    #[error("grid too coarse: {reason}")]
    GridTooCoarse { reason: String },

    #[error("Fock truncation N = {n} too small: {reason}")]
    TruncationTooSmall { n: usize, reason: String },

    #[error("matrix exponential cannot meet tolerance: {reason}")]
    Overflow { reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
