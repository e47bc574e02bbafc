//! Time-dependent ladder operators as coefficient pairs.
//!
//! With `A(t) = (i/√2)[ε p − ε̇ z]` and `z = (a + a†)/√2`, `p = (a − a†)/(i√2)`,
//!
//! ```text
//! A(t) = μ a + ν a†,   μ = (ε − iε̇)/2,   ν = (−ε − iε̇)/2,   |μ|² − |ν|² = 1
//! a    = ρ A + σ A†,   ρ = μ*,           σ = −ν
//! ```
//!
//! The squeeze decomposition writes `A = e^{iφ}(cosh r · a + e^{iθ} sinh r · a†)`,
//! i.e. `μ = e^{iφ} cosh r`, `ν = e^{i(θ+φ)} sinh r`, which is
//! `A = e^{iφ} S⁻¹(λ) a S(λ)` for `S(λ) = exp[½λ a†² − ½λ* a²]`, `λ = r e^{iθ}`.
//! Conjugating with that same S sends A to `v a + u a†` with `u = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode::{ModeSample, ModeSolution};

/// Largest |‖μ‖² − ‖ν‖² − 1| accepted as canonical. Integrated mode functions
/// carry a Wronskian drift well below this; anything larger is bad input.
pub const CANONICAL_TOL: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderCoeffs {
    pub t: f64,
    pub mu: Complex64,
    pub nu: Complex64,
    pub rho: Complex64,
    pub sigma: Complex64,
}

impl LadderCoeffs {
    /// Builds the pair and its algebraic inverse from (μ, ν).
    pub fn from_pair(t: f64, mu: Complex64, nu: Complex64) -> Self {
        Self {
            t,
            mu,
            nu,
            rho: mu.conj(),
            sigma: -nu,
        }
    }

    pub fn from_mode(s: &ModeSample) -> Self {
        let mu = 0.5 * (s.eps - I * s.deps);
        let nu = 0.5 * (-s.eps - I * s.deps);
        Self::from_pair(s.t, mu, nu)
    }

    /// |μ|² − |ν|², which is 1 for a canonical pair.
    pub fn norm_defect(&self) -> f64 {
        self.mu.norm_sqr() - self.nu.norm_sqr() - 1.0
    }

    pub fn check_canonical(&self) -> Result<()> {
        let defect = self.norm_defect();
        if !(defect.abs() <= CANONICAL_TOL) {
            return Err(Error::NonCanonical { defect });
        }
        Ok(())
    }

    /// Composition of `a ↦ (ρ, σ)` with `A ↦ (μ, ν)`, as the 2×2 matrix acting
    /// on the column (a, a†). Identity for a consistent pair.
    pub fn round_trip(&self) -> [[Complex64; 2]; 2] {
        // A = μ a + ν a†, A† = ν* a + μ* a†
        let m = [[self.mu, self.nu], [self.nu.conj(), self.mu.conj()]];
        // a = ρ A + σ A†, a† = σ* A + ρ* A†
        let r = [[self.rho, self.sigma], [self.sigma.conj(), self.rho.conj()]];
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = r[i][0] * m[0][j] + r[i][1] * m[1][j];
            }
        }
        out
    }
}

/// μ, ν (and ρ, σ) of A(t) at time `t`.
pub fn ladder_coeffs(sol: &ModeSolution, t: f64) -> Result<LadderCoeffs> {
    Ok(LadderCoeffs::from_mode(&sol.at(t)?))
}

/// Z(t) and P(t) as real-coefficient forms over (z, p) and as
/// Hermitian forms over (a, a†):
///
/// ```text
/// Z = Im ε̇ · z − Im ε · p,    P = Re ε · p − Re ε̇ · z
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCoeffs {
    pub t: f64,
    /// Z = z_zp[0]·z + z_zp[1]·p
    pub z_zp: [Complex64; 2],
    /// P = p_zp[0]·z + p_zp[1]·p
    pub p_zp: [Complex64; 2],
    /// Z = z_aa[0]·a + z_aa[1]·a†
    pub z_aa: [Complex64; 2],
    /// P = p_aa[0]·a + p_aa[1]·a†
    pub p_aa: [Complex64; 2],
}

fn zp_to_aa(c: [Complex64; 2]) -> [Complex64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // z = (a + a†)/√2, p = −i(a − a†)/√2
    [s * (c[0] - I * c[1]), s * (c[0] + I * c[1])]
}

impl QuadratureCoeffs {
    pub fn from_mode(s: &ModeSample) -> Self {
        let half_i = 0.5 * I;
        let z_zp = [
            -half_i * (s.deps - s.deps.conj()),
            half_i * (s.eps - s.eps.conj()),
        ];
        let p_zp = [
            -0.5 * (s.deps + s.deps.conj()),
            0.5 * (s.eps + s.eps.conj()),
        ];
        Self {
            t: s.t,
            z_zp,
            p_zp,
            z_aa: zp_to_aa(z_zp),
            p_aa: zp_to_aa(p_zp),
        }
    }

    /// [Z, P] from the (z, p) forms, using [z, p] = i.
    pub fn commutator_zp(&self) -> Complex64 {
        I * (self.z_zp[0] * self.p_zp[1] - self.z_zp[1] * self.p_zp[0])
    }

    /// [Z, P] from the (a, a†) forms, using [a, a†] = 1.
    pub fn commutator_aa(&self) -> Complex64 {
        self.z_aa[0] * self.p_aa[1] - self.z_aa[1] * self.p_aa[0]
    }

    /// Largest deviation from Hermiticity of the (a, a†) forms.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.z_aa[1] - self.z_aa[0].conj())
            .norm()
            .max((self.p_aa[1] - self.p_aa[0].conj()).norm())
    }

    /// Variances of Z and P for a state with the given (z, p) second moments.
    pub fn variances(&self, var_z: f64, var_p: f64, cov_zp: f64) -> (f64, f64) {
        let var = |c: [Complex64; 2]| {
            let (x, y) = (c[0].re, c[1].re);
            x * x * var_z + 2.0 * x * y * cov_zp + y * y * var_p
        };
        (var(self.z_zp), var(self.p_zp))
    }
}

pub fn quadrature_coeffs(sol: &ModeSolution, t: f64) -> Result<QuadratureCoeffs> {
    Ok(QuadratureCoeffs::from_mode(&sol.at(t)?))
}

/// Squeeze magnitude `r`, squeeze phase `θ` and residual phase `φ` with
/// `μ = e^{iφ} cosh r`, `ν = e^{i(θ+φ)} sinh r`. θ is 0 when r = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub r: f64,
    pub theta: f64,
    pub phase_offset: f64,
}

impl SqueezeParams {
    pub fn reconstruct(&self) -> (Complex64, Complex64) {
        let mu = Complex64::from_polar(self.r.cosh(), self.phase_offset);
        let nu = Complex64::from_polar(self.r.sinh(), self.theta + self.phase_offset);
        (mu, nu)
    }

    /// λ = r e^{iθ}.
    pub fn lambda(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// Maps an angle into (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

pub fn bogoliubov_decompose(lc: &LadderCoeffs) -> Result<SqueezeParams> {
    lc.check_canonical()?;
    let r = lc.nu.norm().asinh();
    let phase_offset = wrap_angle(lc.mu.arg());
    let theta = if lc.nu.norm() == 0.0 {
        0.0
    } else {
        wrap_angle(lc.nu.arg() - lc.mu.arg())
    };
    Ok(SqueezeParams {
        r,
        theta,
        phase_offset,
    })
}

/// Disentangling coefficients for
/// `exp[½λa†² − ½λ*a²] = exp[½γ₊a†²] · exp[γ₃(a†a + ½)] · exp[½γ₋a²]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BchGamma {
    pub gamma_plus: Complex64,
    pub gamma_3: f64,
    pub gamma_minus: Complex64,
}

pub fn bch_gamma(r: f64, theta: f64) -> Result<BchGamma> {
    if !(r >= 0.0) || !r.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "squeeze magnitude must be finite and ≥ 0, got {r}"
        )));
    }
    let t = r.tanh();
    Ok(BchGamma {
        gamma_plus: Complex64::from_polar(t, theta),
        // the middle factor contracts: exp[−ln cosh r · (a†a + ½)]
        gamma_3: -r.cosh().ln(),
        gamma_minus: -Complex64::from_polar(t, -theta),
    })
}

/// Coefficients of `S(λ) A S⁻¹(λ) = v a + u a†`.
pub fn transform_uv(sp: &SqueezeParams, lc: &LadderCoeffs) -> Result<(Complex64, Complex64)> {
    lc.check_canonical()?;
    let (c, s) = (sp.r.cosh(), sp.r.sinh());
    let e = Complex64::from_polar(1.0, sp.theta);
    let u = lc.nu * c - lc.mu * e * s;
    let v = lc.mu * c - lc.nu * e.conj() * s;
    Ok((u, v))
}

/// β = α v* − α* u, the displacement of `S D_A(α) S⁻¹ = D_a(β)`.
pub fn displacement_map(alpha: Complex64, u: Complex64, v: Complex64) -> Result<Complex64> {
    let defect = v.norm_sqr() - u.norm_sqr() - 1.0;
    if !(defect.abs() <= CANONICAL_TOL) {
        return Err(Error::NonCanonical { defect });
    }
    Ok(alpha * v.conj() - alpha.conj() * u)
}
