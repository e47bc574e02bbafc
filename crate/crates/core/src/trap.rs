//! Paul-trap drive: per-axis spring coefficient Ω(t) and its canonical
//! Mathieu parameters.
//!
//! Units are dimensionless (ħ = m = 1) with e/r₀² absorbed into the dc and ac
//! amplitudes. The applied potential is `V(t) = v_dc − v_ac·cos ω(t − t₀)` and
//!
//! ```text
//! Ω_z(t) = −2·V(t),    Ω_x(t) = Ω_y(t) = V(t)
//! ```
//!
//! so `Ω_x + Ω_y + Ω_z = 0` at every instant. Mathieu parameters follow
//! `Ω(t) = (ω²/4)·(a − 2q·cos ω(t − t₀))`; along z this gives
//! `a = −8·v_dc/ω²`, `q = −4·v_ac/ω²`, and the transverse axes get −½ of each.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(alias = "x")]
    X,
    #[serde(alias = "y")]
    Y,
    #[serde(alias = "z")]
    Z,
}

impl Axis {
    /// Ratio Ω_axis / V(t).
    fn coupling(self) -> f64 {
        match self {
            Axis::X | Axis::Y => 1.0,
            Axis::Z => -2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    pub v_dc: f64,
    pub v_ac: f64,
    pub omega: f64,
    #[serde(default)]
    pub t0: f64,
    pub axis: Axis,
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "drive frequency must be positive and finite, got {}",
                self.omega
            )));
        }
        for (name, v) in [("v_dc", self.v_dc), ("v_ac", self.v_ac), ("t0", self.t0)] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} is not finite")));
            }
        }
        Ok(())
    }

    /// The trap configuration whose `axis` motion has Mathieu parameters (a, q).
    pub fn from_mathieu(a: f64, q: f64, omega: f64, t0: f64, axis: Axis) -> Self {
        let scale = omega * omega / 4.0 / axis.coupling();
        Self {
            v_dc: a * scale,
            v_ac: 2.0 * q * scale,
            omega,
            t0,
            axis,
        }
    }

    pub fn applied_potential(&self, t: f64) -> f64 {
        self.v_dc - self.v_ac * (self.omega * (t - self.t0)).cos()
    }
}

/// Ω_axis(t) for the trap. `2f(t) = Ω(t)` in the notation of the quadratic
/// Schrödinger equation `H = −½∂² + f(t)q²`.
pub fn omega_profile(cfg: &TrapConfig, t: f64) -> f64 {
    cfg.axis.coupling() * cfg.applied_potential(t)
}

/// Mathieu (a, q) such that `Ω(t) = (ω²/4)(a − 2q·cos ω(t − t₀))`.
pub fn mathieu_params(cfg: &TrapConfig) -> (f64, f64) {
    let w2 = cfg.omega * cfg.omega;
    let c = cfg.axis.coupling();
    (4.0 * c * cfg.v_dc / w2, 2.0 * c * cfg.v_ac / w2)
}

/// A time-dependent spring coefficient Ω(t), shareable across threads.
#[derive(Clone)]
pub struct Drive {
    omega: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl Drive {
    pub fn new(
        label: impl Into<String>,
        omega: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            omega: Arc::new(omega),
            label: label.into(),
        }
    }

    /// Static oscillator; `Drive::constant(0.0)` is the free particle.
    pub fn constant(value: f64) -> Self {
        Self::new(format!("constant({value})"), move |_| value)
    }

    pub fn mathieu(a: f64, q: f64, omega: f64, t0: f64) -> Self {
        let w2 = omega * omega / 4.0;
        Self::new(format!("mathieu(a={a}, q={q}, omega={omega})"), move |t| {
            w2 * (a - 2.0 * q * (omega * (t - t0)).cos())
        })
    }

    pub fn trap(cfg: TrapConfig) -> Self {
        Self::new(format!("trap({:?})", cfg.axis), move |t| {
            omega_profile(&cfg, t)
        })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.omega)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for Drive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Drive").field("label", &self.label).finish()
    }
}

impl From<TrapConfig> for Drive {
    fn from(cfg: TrapConfig) -> Self {
        Drive::trap(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v_dc: f64, v_ac: f64, omega: f64, axis: Axis) -> TrapConfig {
        TrapConfig {
            v_dc,
            v_ac,
            omega,
            t0: 0.3,
            axis,
        }
    }

    #[test]
    fn free_particle_profile_vanishes() {
        for t in [0.0, 1.0, 7.5] {
            assert_eq!(omega_profile(&cfg(0.0, 0.0, 1.0, Axis::Z), t), 0.0);
        }
    }

    #[test]
    fn static_well_along_z_needs_negative_dc() {
        let c = cfg(-0.5, 0.0, 3.0, Axis::Z);
        for t in [0.0, 0.4, 11.0] {
            assert_eq!(omega_profile(&c, t), 1.0);
        }
    }

    #[test]
    fn drive_at_phase_reference() {
        let c = cfg(1.0, 2.0, 2.0, Axis::Z);
        // -2 * (1 - 2 cos 0)
        assert_eq!(omega_profile(&c, c.t0), 2.0);
    }

    #[test]
    fn quadrupole_condition() {
        for t in [0.0, 0.9, 2.3, 10.0] {
            let sum: f64 = [Axis::X, Axis::Y, Axis::Z]
                .iter()
                .map(|&ax| omega_profile(&cfg(0.37, -1.2, 1.7, ax), t))
                .sum();
            assert!(sum.abs() < 1e-14);
        }
    }

    #[test]
    fn mathieu_reduction_examples() {
        assert_eq!(mathieu_params(&cfg(0.0, 0.0, 2.0, Axis::Z)), (0.0, 0.0));
        let w = 1.7;
        let (a, q) = mathieu_params(&cfg(-w * w / 8.0, 0.0, w, Axis::Z));
        assert!((a - 1.0).abs() < 1e-15 && q == 0.0);
        // transverse axes: sign flipped and halved
        let (az, qz) = mathieu_params(&cfg(0.2, 0.3, w, Axis::Z));
        let (ax, qx) = mathieu_params(&cfg(0.2, 0.3, w, Axis::X));
        assert!((ax + az / 2.0).abs() < 1e-15 && (qx + qz / 2.0).abs() < 1e-15);
    }

    #[test]
    fn from_mathieu_inverts_reduction() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let c = TrapConfig::from_mathieu(0.3, -0.7, 2.5, 0.1, axis);
            let (a, q) = mathieu_params(&c);
            assert!((a - 0.3).abs() < 1e-14 && (q + 0.7).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_frequency_rejected() {
        assert!(cfg(0.0, 0.0, 0.0, Axis::Z).validate().is_err());
        assert!(cfg(0.0, 0.0, -1.0, Axis::Z).validate().is_err());
        assert!(cfg(f64::NAN, 0.0, 1.0, Axis::Z).validate().is_err());
        assert!(cfg(0.0, 0.0, 1.0, Axis::Z).validate().is_ok());
    }
}
