//! The complex mode function ε(t) solving `ε̈ + Ω(t)ε = 0`.
//!
//! A [`ModeSolution`] stores every accepted step of the adaptive integrator
//! on the real system `(Re ε, Im ε, Re ε̇, Im ε̇)`. Evaluation between samples
//! takes one fifth-order step from the nearest sample on the left, so the
//! interpolation error never exceeds the local tolerance of the run.
//!
//! The Wronskian `W = ε ε̇* − ε̇ ε*` of a canonical solution is −2i and is
//! conserved by the exact flow; its drift is the accuracy certificate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::{self, Tolerance};
use crate::trap::Drive;

/// Wronskian value of a canonically normalized mode function.
pub const CANONICAL_WRONSKIAN: Complex64 = Complex64::new(0.0, -2.0);

/// Below this modulus the Gaussian width −iε̇/ε is unusable.
pub const ZERO_CROSSING_GUARD: f64 = 1e-8;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const INITIAL_WRONSKIAN_TOL: f64 = 1e-12;

/// ε(t₀) = 1, ε̇(t₀) = i: Wronskian exactly −2i, and ε = e^{i(t−t₀)} for Ω ≡ 1.
pub fn canonical_initial_conditions() -> (Complex64, Complex64) {
    (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0))
}

#[inline]
pub fn wronskian_of(eps: Complex64, deps: Complex64) -> Complex64 {
    eps * deps.conj() - deps * eps.conj()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSample {
    pub t: f64,
    pub eps: Complex64,
    pub deps: Complex64,
}

impl ModeSample {
    pub fn wronskian(&self) -> Complex64 {
        wronskian_of(self.eps, self.deps)
    }

    /// |W + 2i|.
    pub fn wronskian_error(&self) -> f64 {
        (self.wronskian() - CANONICAL_WRONSKIAN).norm()
    }
}

/// Immutable record of an integrated mode function.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    drive: Drive,
    tol: f64,
    samples: Vec<ModeSample>,
}

fn pack(eps: Complex64, deps: Complex64) -> [f64; 4] {
    [eps.re, eps.im, deps.re, deps.im]
}

fn unpack(t: f64, y: &[f64; 4]) -> ModeSample {
    ModeSample {
        t,
        eps: Complex64::new(y[0], y[1]),
        deps: Complex64::new(y[2], y[3]),
    }
}

fn rhs(drive: &Drive) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] + '_ {
    move |t, y| {
        let w = drive.eval(t);
        [y[2], y[3], -w * y[0], -w * y[1]]
    }
}

/// Integrates the mode equation on `[t0, t1]` from canonical initial data.
///
/// Rejects initial data whose Wronskian differs from −2i by more than 1e−12,
/// and aborts with [`Error::ZeroCrossing`] if |ε| drops below
/// [`ZERO_CROSSING_GUARD`] at an accepted step.
pub fn integrate_epsilon(
    drive: &Drive,
    t0: f64,
    t1: f64,
    eps0: Complex64,
    deps0: Complex64,
    tol: f64,
) -> Result<ModeSolution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let w0 = wronskian_of(eps0, deps0);
    if (w0 - CANONICAL_WRONSKIAN).norm() > INITIAL_WRONSKIAN_TOL || !w0.is_finite() {
        return Err(Error::NonCanonicalInitialConditions { wronskian: w0 });
    }
    integrate_unchecked(drive, t0, t1, eps0, deps0, tol)
}

fn integrate_unchecked(
    drive: &Drive,
    t0: f64,
    t1: f64,
    eps0: Complex64,
    deps0: Complex64,
    tol: f64,
) -> Result<ModeSolution> {
    let mut samples = Vec::new();
    let f = rhs(drive);
    integrator::integrate(
        &f,
        t0,
        t1,
        pack(eps0, deps0),
        Tolerance::uniform(tol),
        |t, y| {
            let s = unpack(t, y);
            let modulus = s.eps.norm();
            if modulus < ZERO_CROSSING_GUARD {
                return Err(Error::ZeroCrossing { t, modulus });
            }
            samples.push(s);
            Ok(())
        },
    )?;
    Ok(ModeSolution {
        drive: drive.clone(),
        tol,
        samples,
    })
}

impl ModeSolution {
    pub fn drive(&self) -> &Drive {
        &self.drive
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn t0(&self) -> f64 {
        self.samples[0].t
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn initial(&self) -> &ModeSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &ModeSample {
        &self.samples[self.samples.len() - 1]
    }

    /// Accepted integrator steps, in increasing time.
    pub fn samples(&self) -> &[ModeSample] {
        &self.samples
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0() && t <= self.t_end()
    }

    /// (ε, ε̇) at any `t` inside the stored interval.
    pub fn at(&self, t: f64) -> Result<ModeSample> {
        if !self.contains(t) {
            return Err(Error::OutOfInterval {
                t,
                start: self.t0(),
                end: self.t_end(),
            });
        }
        let idx = self.samples.partition_point(|s| s.t <= t) - 1;
        let left = self.samples[idx];
        if left.t == t {
            return Ok(left);
        }
        let f = rhs(&self.drive);
        let y = integrator::single_step(&f, left.t, &pack(left.eps, left.deps), t - left.t);
        Ok(unpack(t, &y))
    }

    /// Evaluates at each requested time.
    pub fn sample_at(&self, times: &[f64]) -> Result<Vec<ModeSample>> {
        times.iter().map(|&t| self.at(t)).collect()
    }

    /// Largest |W + 2i| over the stored samples.
    pub fn max_wronskian_error(&self) -> f64 {
        self.samples
            .iter()
            .map(ModeSample::wronskian_error)
            .fold(0.0, f64::max)
    }

    /// Continues the solution from its last sample up to `t2`. The end state
    /// carries the run's own Wronskian drift, so the 1e−12 check on fresh
    /// initial data is not applied.
    pub fn restart(&self, t2: f64) -> Result<ModeSolution> {
        let s = self.last();
        integrate_unchecked(&self.drive, s.t, t2, s.eps, s.deps, self.tol)
    }
}

/// ε ε̇* − ε̇ ε* at time `t`.
pub fn wronskian(sol: &ModeSolution, t: f64) -> Result<Complex64> {
    Ok(sol.at(t)?.wronskian())
}

/// Classical position and momentum at `t` for initial data (z₀, p₀) at the
/// solution's start time, written as the real combinations
///
/// ```text
/// z_cl = (i/2){[ε*ε₀ − ε ε₀*]p₀ + [ε ε̇₀* − ε* ε̇₀]z₀}
/// p_cl = (i/2){[ε̇*ε₀ − ε̇ ε₀*]p₀ + [ε̇ ε̇₀* − ε̇* ε̇₀]z₀}
/// ```
///
/// Each bracket is purely imaginary; an imaginary residue above
/// 1e−9·(1 + |value|) means the solution is corrupted.
pub fn classical_trajectory(sol: &ModeSolution, z0: f64, p0: f64, t: f64) -> Result<(f64, f64)> {
    let s = sol.at(t)?;
    let o = sol.initial();
    classical_from_samples(o, &s, z0, p0)
}

pub(crate) fn classical_from_samples(
    o: &ModeSample,
    s: &ModeSample,
    z0: f64,
    p0: f64,
) -> Result<(f64, f64)> {
    let half_i = Complex64::new(0.0, 0.5);
    let z = half_i
        * ((s.eps.conj() * o.eps - s.eps * o.eps.conj()) * p0
            + (s.eps * o.deps.conj() - s.eps.conj() * o.deps) * z0);
    let p = half_i
        * ((s.deps.conj() * o.eps - s.deps * o.eps.conj()) * p0
            + (s.deps * o.deps.conj() - s.deps.conj() * o.deps) * z0);
    Ok((real_part(z)?, real_part(p)?))
}

fn real_part(c: Complex64) -> Result<f64> {
    if !c.is_finite() || c.im.abs() > 1e-9 * (1.0 + c.norm()) {
        return Err(Error::ComplexLeak { imag: c.im });
    }
    Ok(c.re)
}
