//! Mathieu stability from the one-period monodromy matrix.
//!
//! The two real fundamental solutions of
//! `ÿ + (ω²/4)(a − 2q·cos ω(t − t₀))y = 0` with initial data (1, 0) and
//! (0, 1) are carried over one drive period `T = 2π/ω`; the columns of the
//! monodromy matrix are their end states. The equation is undamped so
//! `det M = 1` and the Floquet multipliers are the roots of
//! `λ² − tr(M)·λ + 1 = 0`.
//!
//! Classification:
//! - `|tr M| < 2`: bounded (stable);
//! - `|tr M| > 2`: one multiplier outside the unit circle (unstable), with
//!   `growth_exponent = ln |λ_max|` per period;
//! - `|tr M| = 2` (within [`MARGINAL_BAND`]): marginal. Motion stays bounded
//!   only in the coexistence case `M = ±I`; a non-trivial Jordan block grows
//!   linearly, which is reported as unstable with zero exponent.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{self, Tolerance};

/// Integration tolerance for the monodromy matrix.
pub const FLOQUET_TOLERANCE: f64 = 1e-12;

/// Width of the band around |tr| = 2 treated as marginal.
pub const MARGINAL_BAND: f64 = 1e-8;

/// Maximum entrywise distance from ±I for a marginal matrix to count as
/// the bounded coexistence case.
const COEXISTENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    /// |tr| = 2 with a Jordan block: linear growth.
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub a_param: f64,
    pub q_param: f64,
    pub monodromy: [[f64; 2]; 2],
    pub monodromy_trace: f64,
    pub stable: bool,
    pub class: Stability,
    /// ln of the larger Floquet multiplier modulus per period; 0 unless unstable.
    pub growth_exponent: f64,
}

impl StabilityVerdict {
    pub fn determinant(&self) -> f64 {
        let m = &self.monodromy;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// Monodromy matrix over one drive period starting at the phase reference.
pub fn monodromy(a: f64, q: f64, omega: f64, tol: f64) -> Result<[[f64; 2]; 2]> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "drive frequency must be positive, got {omega}"
        )));
    }
    let w2 = omega * omega / 4.0;
    let f = move |t: f64, y: &[f64; 4]| {
        let k = w2 * (a - 2.0 * q * (omega * t).cos());
        [y[1], -k * y[0], y[3], -k * y[2]]
    };
    let period = 2.0 * PI / omega;
    let y = integrator::integrate(
        &f,
        0.0,
        period,
        [1.0, 0.0, 0.0, 1.0],
        Tolerance::uniform(tol),
        |_, _| Ok(()),
    )?;
    Ok([[y[0], y[2]], [y[1], y[3]]])
}

pub fn classify(a: f64, q: f64, m: [[f64; 2]; 2]) -> StabilityVerdict {
    let trace = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let half = trace.abs() / 2.0;
    let (class, growth) = if (trace.abs() - 2.0).abs() <= MARGINAL_BAND {
        let s = trace.signum();
        let off_identity = [m[0][0] - s, m[0][1], m[1][0], m[1][1] - s]
            .iter()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if off_identity <= COEXISTENCE_TOL {
            (Stability::Stable, 0.0)
        } else {
            (Stability::Marginal, 0.0)
        }
    } else if trace.abs() < 2.0 {
        (Stability::Stable, 0.0)
    } else {
        // larger root of λ² − |tr|λ + det
        let disc = (half * half - det).max(0.0).sqrt();
        (Stability::Unstable, (half + disc).ln())
    };
    StabilityVerdict {
        a_param: a,
        q_param: q,
        monodromy: m,
        monodromy_trace: trace,
        stable: class == Stability::Stable,
        class,
        growth_exponent: growth,
    }
}

pub fn floquet_stability(a: f64, q: f64, omega: f64) -> Result<StabilityVerdict> {
    floquet_stability_with_tol(a, q, omega, FLOQUET_TOLERANCE)
}

pub fn floquet_stability_with_tol(
    a: f64,
    q: f64,
    omega: f64,
    tol: f64,
) -> Result<StabilityVerdict> {
    Ok(classify(a, q, monodromy(a, q, omega, tol)?))
}

/// Locates the stability boundary between `q_stable` and `q_unstable` at
/// fixed `a` by bisection, to within `q_tol`.
pub fn bisect_boundary(
    a: f64,
    mut q_stable: f64,
    mut q_unstable: f64,
    omega: f64,
    tol: f64,
    q_tol: f64,
) -> Result<f64> {
    let s0 = floquet_stability_with_tol(a, q_stable, omega, tol)?.stable;
    let s1 = floquet_stability_with_tol(a, q_unstable, omega, tol)?.stable;
    if !s0 || s1 {
        return Err(Error::InvalidArgument(format!(
            "bracket [{q_stable}, {q_unstable}] at a = {a} does not straddle a stability boundary"
        )));
    }
    while (q_unstable - q_stable).abs() > q_tol {
        let mid = 0.5 * (q_stable + q_unstable);
        if floquet_stability_with_tol(a, mid, omega, tol)?.stable {
            q_stable = mid;
        } else {
            q_unstable = mid;
        }
    }
    Ok(0.5 * (q_stable + q_unstable))
}
