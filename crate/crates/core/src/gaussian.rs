//! Gaussian wave packets generated by the time-dependent ladder operators.
//!
//! ```text
//! Ψ(z, t) = (πφ)^{-1/4} exp[−½ w (z − z_cl)² + i z p_cl],   w = −iε̇/ε = (1 − iφ̇/2)/φ
//! ```
//!
//! with `φ = |ε|²`. Closed-form moments:
//!
//! ```text
//! var_z = φ/2,   var_p = (1 + φ̇²/4)/(2φ),   cov_zp = φ̇/4,   ⟨ẑp̂⟩ = cov_zp + i/2
//! ```
//!
//! The packet solves `(ẑ + iB p̂)Ψ = CΨ` for `B = 1/w`, which is also
//! `i·var_z/⟨ẑp̂⟩`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::QuadratureCoeffs;
use crate::mode::{classical_from_samples, ModeSample, ModeSolution, ZERO_CROSSING_GUARD};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub t: f64,
    pub z_cl: f64,
    pub p_cl: f64,
    /// −iε̇/ε; the real part is 1/φ.
    pub width: Complex64,
    pub phi: f64,
    pub phi_dot: f64,
    pub eps: Complex64,
    pub deps: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean_z: f64,
    pub mean_p: f64,
    pub var_z: f64,
    pub var_p: f64,
    /// ½⟨{ẑ − ⟨ẑ⟩, p̂ − ⟨p̂⟩}⟩
    pub cov_zp: f64,
}

impl MomentSet {
    /// var_z·var_p − cov_zp², bounded below by ¼.
    pub fn schrodinger_determinant(&self) -> f64 {
        self.var_z * self.var_p - self.cov_zp * self.cov_zp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyProducts {
    /// var_z·var_p
    pub heisenberg_zp: f64,
    /// var_z·var_p − cov_zp²
    pub schrodinger_lhs: f64,
    /// ¼(1 + ¼φ̇²), the value var_z·var_p takes for these packets
    pub schrodinger_rhs: f64,
    /// ΔZ²·ΔP² in the time-dependent quadratures
    #[serde(rename = "heisenberg_ZP")]
    pub heisenberg_zp_quadrature: f64,
}

impl GaussianState {
    /// Builds the packet from (ε, ε̇) and the classical centre.
    pub fn from_mode(s: &ModeSample, z_cl: f64, p_cl: f64) -> Result<Self> {
        let modulus = s.eps.norm();
        if !(modulus >= ZERO_CROSSING_GUARD) {
            return Err(Error::ZeroCrossing { t: s.t, modulus });
        }
        let phi = s.eps.norm_sqr();
        let phi_dot = 2.0 * (s.eps.conj() * s.deps).re;
        Ok(Self {
            t: s.t,
            z_cl,
            p_cl,
            width: -I * s.deps / s.eps,
            phi,
            phi_dot,
            eps: s.eps,
            deps: s.deps,
        })
    }

    /// (1 − iφ̇/2)/φ from the stored φ and φ̇.
    pub fn width_from_phi(&self) -> Complex64 {
        Complex64::new(1.0, -0.5 * self.phi_dot) / self.phi
    }

    pub fn sigma_z(&self) -> f64 {
        (0.5 * self.phi).sqrt()
    }

    pub fn sigma_p(&self) -> f64 {
        ((1.0 + 0.25 * self.phi_dot * self.phi_dot) / (2.0 * self.phi)).sqrt()
    }

    fn amplitude(&self, z: f64) -> Complex64 {
        let d = z - self.z_cl;
        let norm = (std::f64::consts::PI * self.phi).powf(-0.25);
        norm * (-0.5 * self.width * d * d + I * z * self.p_cl).exp()
    }

    /// Analytic −i∂_zΨ.
    fn momentum_amplitude(&self, z: f64) -> Complex64 {
        (I * self.width * (z - self.z_cl) + self.p_cl) * self.amplitude(z)
    }
}

/// The packet at time `t` whose centre follows the classical orbit from
/// (z₀, p₀) at the solution's start.
pub fn coherent_state(sol: &ModeSolution, t: f64, z0: f64, p0: f64) -> Result<GaussianState> {
    let s = sol.at(t)?;
    let (z_cl, p_cl) = classical_from_samples(sol.initial(), &s, z0, p0)?;
    GaussianState::from_mode(&s, z_cl, p_cl)
}

pub fn moments(state: &GaussianState) -> MomentSet {
    let (phi, pd) = (state.phi, state.phi_dot);
    MomentSet {
        mean_z: state.z_cl,
        mean_p: state.p_cl,
        var_z: 0.5 * phi,
        var_p: (1.0 + 0.25 * pd * pd) / (2.0 * phi),
        cov_zp: 0.25 * pd,
    }
}

pub fn uncertainty_products(state: &GaussianState) -> UncertaintyProducts {
    let m = moments(state);
    let q = QuadratureCoeffs::from_mode(&ModeSample {
        t: state.t,
        eps: state.eps,
        deps: state.deps,
    });
    let (vz, vp) = q.variances(m.var_z, m.var_p, m.cov_zp);
    UncertaintyProducts {
        heisenberg_zp: m.var_z * m.var_p,
        schrodinger_lhs: m.schrodinger_determinant(),
        schrodinger_rhs: 0.25 * (1.0 + 0.25 * state.phi_dot * state.phi_dot),
        heisenberg_zp_quadrature: vz * vp,
    }
}

/// B = i·var_z/⟨ẑp̂⟩ with ⟨ẑp̂⟩ = cov_zp + i/2 (centred).
pub fn squeeze_factor(_state: &GaussianState, m: &MomentSet) -> Result<Complex64> {
    let zp = Complex64::new(m.cov_zp, 0.5);
    let magnitude = zp.norm();
    if !(magnitude >= 1e-14) {
        return Err(Error::DegenerateMoments { magnitude });
    }
    Ok(I * m.var_z / zp)
}

/// Sampling rule for grids built around a packet: half-width `span_sigmas`
/// position deviations, at least `points_per_sigma` points per deviation.
/// The default span of 12 puts the grid ends below 1e−15 of the peak
/// amplitude, which the spectral derivative needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPolicy {
    pub span_sigmas: f64,
    pub points_per_sigma: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            span_sigmas: 12.0,
            points_per_sigma: MIN_POINTS_PER_SIGMA,
        }
    }
}

impl GridPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.span_sigmas > 0.0 && self.points_per_sigma > 0.0)
            || !self.span_sigmas.is_finite()
            || !self.points_per_sigma.is_finite()
        {
            return Err(Error::InvalidArgument(format!(
                "grid policy must be positive: {self:?}"
            )));
        }
        Ok(())
    }

    /// Grid centred on the packet. The step also resolves the momentum
    /// content up to `span_sigmas` momentum deviations, so that spectral
    /// derivatives do not alias.
    pub fn grid_for(&self, state: &GaussianState) -> Result<UniformGrid> {
        self.validate()?;
        let sz = state.sigma_z();
        let kmax = state.p_cl.abs() + self.span_sigmas * state.sigma_p();
        let h = (sz / self.points_per_sigma).min(std::f64::consts::PI / kmax);
        let half = self.span_sigmas * sz;
        let n = (2.0 * half / h).ceil() as usize + 1;
        if n > 1 << 24 {
            return Err(Error::GridTooCoarse {
                reason: format!("packet needs {n} grid points"),
            });
        }
        Ok(UniformGrid::new(state.z_cl - half, h, n))
    }
}

/// Equally spaced samples `start + k·step`, `k < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Self {
        Self { start, step, len }
    }

    pub fn spanning(lo: f64, hi: f64, len: usize) -> Self {
        Self::new(lo, (hi - lo) / (len - 1) as f64, len)
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.len - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|k| self.point(k))
    }

    /// The same interval with the step halved.
    pub fn refined(&self) -> Self {
        Self::new(self.start, 0.5 * self.step, 2 * self.len - 1)
    }
}

const NORMALIZATION_TOL: f64 = 1e-8;
const MIN_SPAN_SIGMAS: f64 = 8.0;
const MIN_POINTS_PER_SIGMA: f64 = 16.0;

/// Normalized samples of the packet on `grid`. The grid must cover
/// z_cl ± 8σ_z with at least 16 points per σ_z, and the trapezoid norm of
/// the result must be one within 1e−8.
pub fn evaluate_wavefunction(state: &GaussianState, grid: &UniformGrid) -> Result<Vec<Complex64>> {
    let sz = state.sigma_z();
    if grid.len < 2 || !(grid.step > 0.0) {
        return Err(Error::GridTooCoarse {
            reason: "grid needs at least two increasing points".into(),
        });
    }
    let lo = state.z_cl - MIN_SPAN_SIGMAS * sz;
    let hi = state.z_cl + MIN_SPAN_SIGMAS * sz;
    let slack = 1e-9 * sz;
    if grid.start > lo + slack || grid.end() < hi - slack {
        return Err(Error::GridTooCoarse {
            reason: format!(
                "grid [{}, {}] does not cover [{lo}, {hi}] (±{} deviations)",
                grid.start,
                grid.end(),
                MIN_SPAN_SIGMAS
            ),
        });
    }
    if grid.step > sz / MIN_POINTS_PER_SIGMA * (1.0 + 1e-12) {
        return Err(Error::GridTooCoarse {
            reason: format!("step {} exceeds σ_z/{}", grid.step, MIN_POINTS_PER_SIGMA),
        });
    }
    let psi: Vec<Complex64> = grid.points().map(|z| state.amplitude(z)).collect();
    let norm = trapezoid(grid.step, psi.iter().map(|c| c.norm_sqr()));
    if !((norm - 1.0).abs() <= NORMALIZATION_TOL) {
        return Err(Error::GridTooCoarse {
            reason: format!("trapezoid norm {norm} misses one by more than {NORMALIZATION_TOL:e}"),
        });
    }
    Ok(psi)
}

fn trapezoid(h: f64, values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    if v.len() < 2 {
        return 0.0;
    }
    h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
}

/// −i dψ/dz by FFT. ψ must vanish at both ends of the grid.
fn spectral_momentum(psi: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = psi.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = psi.to_vec();
    fwd.process(&mut buf);
    let dk = 2.0 * std::f64::consts::PI / (n as f64 * h);
    for (j, c) in buf.iter_mut().enumerate() {
        let k = if 2 * j < n {
            j as f64
        } else if 2 * j == n {
            0.0
        } else {
            j as f64 - n as f64
        };
        // −i·(ik) = k
        *c *= k * dk / n as f64;
    }
    inv.process(&mut buf);
    buf
}

/// Moments of the sampled packet, with momentum from a spectral derivative.
/// Independent of the closed forms in [`moments`].
pub fn quadrature_moments(state: &GaussianState, policy: &GridPolicy) -> Result<MomentSet> {
    let grid = policy.grid_for(state)?;
    let zs: Vec<f64> = grid.points().collect();
    let psi: Vec<Complex64> = zs.iter().map(|&z| state.amplitude(z)).collect();
    let ppsi = spectral_momentum(&psi, grid.step);
    let h = grid.step;

    let norm = trapezoid(h, psi.iter().map(|c| c.norm_sqr()));
    let mean_z = trapezoid(h, zs.iter().zip(&psi).map(|(z, c)| z * c.norm_sqr())) / norm;
    let var_z = trapezoid(
        h,
        zs.iter()
            .zip(&psi)
            .map(|(z, c)| (z - mean_z).powi(2) * c.norm_sqr()),
    ) / norm;
    let mean_p = trapezoid(h, psi.iter().zip(&ppsi).map(|(a, b)| (a.conj() * b).re)) / norm;
    let p2 = trapezoid(h, ppsi.iter().map(|c| c.norm_sqr())) / norm;
    let zp = trapezoid(
        h,
        zs.iter()
            .zip(psi.iter().zip(&ppsi))
            .map(|(z, (a, b))| ((z - mean_z) * a.conj() * b).re),
    ) / norm;
    Ok(MomentSet {
        mean_z,
        mean_p,
        var_z,
        var_p: p2 - mean_p * mean_p,
        cov_zp: zp,
    })
}

/// ‖(ẑ + iBp̂ − C)Ψ‖/‖Ψ‖ with `C = ⟨ẑ⟩ + iB⟨p̂⟩`, `p̂` applied spectrally.
/// Zero iff Ψ is a B-squeezed state of (z, p).
pub fn muss_residual(state: &GaussianState, b: Complex64) -> Result<f64> {
    muss_residual_with(state, b, &GridPolicy::default())
}

/// As [`muss_residual`] on the grid chosen by `policy`. The residual is
/// recomputed with the step halved; disagreement beyond
/// `1e−9 + 1e−6·residual` means the grid does not resolve Ψ.
pub fn muss_residual_with(state: &GaussianState, b: Complex64, policy: &GridPolicy) -> Result<f64> {
    let grid = policy.grid_for(state)?;
    let coarse = muss_on_grid(state, b, &grid);
    let fine = muss_on_grid(state, b, &grid.refined());
    if !((coarse - fine).abs() <= 1e-9 + 1e-6 * fine) {
        return Err(Error::GridTooCoarse {
            reason: format!("residual moved from {coarse:e} to {fine:e} when the step was halved"),
        });
    }
    Ok(fine)
}

fn muss_on_grid(state: &GaussianState, b: Complex64, grid: &UniformGrid) -> f64 {
    let zs: Vec<f64> = grid.points().collect();
    let psi: Vec<Complex64> = zs.iter().map(|&z| state.amplitude(z)).collect();
    let ppsi = spectral_momentum(&psi, grid.step);
    let c = state.z_cl + I * b * state.p_cl;
    let num = trapezoid(
        grid.step,
        zs.iter()
            .zip(psi.iter().zip(&ppsi))
            .map(|(&z, (a, p))| (z * a + I * b * p - c * a).norm_sqr()),
    );
    let den = trapezoid(grid.step, psi.iter().map(|a| a.norm_sqr()));
    (num / den).sqrt()
}

/// Exact −i∂_zΨ samples, used to check the spectral derivative.
pub fn momentum_samples(state: &GaussianState, grid: &UniformGrid) -> Vec<Complex64> {
    grid.points().map(|z| state.momentum_amplitude(z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::{canonical_initial_conditions, integrate_epsilon};
    use crate::trap::Drive;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn free_at(t: f64, z: f64, p: f64) -> GaussianState {
        GaussianState::from_mode(
            &ModeSample {
                t,
                eps: c(1.0, t),
                deps: I,
            },
            z,
            p,
        )
        .unwrap()
    }

    fn harmonic_at(t: f64) -> GaussianState {
        let e = Complex64::from_polar(1.0, t);
        GaussianState::from_mode(
            &ModeSample {
                t,
                eps: e,
                deps: I * e,
            },
            0.0,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn harmonic_packet() {
        let s = harmonic_at(1.9);
        assert!((s.width - 1.0).norm() < 1e-15);
        assert!((s.phi - 1.0).abs() < 1e-15 && s.phi_dot.abs() < 1e-15);
        let m = moments(&s);
        assert!(
            (m.var_z - 0.5).abs() < 1e-15
                && (m.var_p - 0.5).abs() < 1e-15
                && m.cov_zp.abs() < 1e-15
        );
        let u = uncertainty_products(&s);
        assert!((u.heisenberg_zp - 0.25).abs() < 1e-15 && (u.schrodinger_rhs - 0.25).abs() < 1e-15);
        assert!((u.heisenberg_zp_quadrature - 0.25).abs() < 1e-15);
        let b = squeeze_factor(&s, &m).unwrap();
        assert!((b - 1.0).norm() < 1e-15);
        assert!(muss_residual(&s, b).unwrap() < 1e-8);
    }

    #[test]
    fn free_particle_packet() {
        let s = free_at(1.0, 0.0, 0.0);
        assert_eq!(s.phi, 2.0);
        assert_eq!(s.phi_dot, 2.0);
        assert!((s.width - c(0.5, -0.5)).norm() < 1e-15);
        assert!((s.width - s.width_from_phi()).norm() < 1e-15);
        let m = moments(&s);
        assert_eq!((m.var_z, m.var_p, m.cov_zp), (1.0, 0.5, 0.5));
        assert!((m.schrodinger_determinant() - 0.25).abs() < 1e-15);
        let u = uncertainty_products(&s);
        assert!((u.heisenberg_zp - 0.5).abs() < 1e-15);
        assert!((u.schrodinger_rhs - 0.5).abs() < 1e-15);
        assert!((u.heisenberg_zp_quadrature - 0.25).abs() < 1e-14);
    }

    #[test]
    fn free_particle_squeeze_factor() {
        let s = free_at(1.0, 0.0, 0.0);
        let m = moments(&s);
        let b = squeeze_factor(&s, &m).unwrap();
        assert!((b - c(1.0, 1.0)).norm() < 1e-15);
        assert!((b.norm_sqr() - m.var_z / m.var_p).abs() < 1e-12);
        assert!(muss_residual(&s, b).unwrap() < 1e-7);
        assert!(muss_residual(&s, c(1.0, 0.0)).unwrap() > 0.1);
    }

    #[test]
    fn degenerate_moments_rejected() {
        let s = harmonic_at(0.0);
        let m = MomentSet {
            mean_z: 0.0,
            mean_p: 0.0,
            var_z: 1.0,
            var_p: 1.0,
            cov_zp: f64::NAN,
        };
        assert!(matches!(
            squeeze_factor(&s, &m),
            Err(Error::DegenerateMoments { .. })
        ));
    }

    #[test]
    fn wavefunction_harmonic_ground_shape() {
        let s = harmonic_at(0.0);
        let grid = GridPolicy::default().grid_for(&s).unwrap();
        let psi = evaluate_wavefunction(&s, &grid).unwrap();
        assert!(psi.iter().all(|c| c.im.abs() < 1e-15 && c.re > 0.0));
        let peak = psi
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.re.total_cmp(&b.1.re))
            .unwrap()
            .0;
        assert!(grid.point(peak).abs() < grid.step);
        let norm = trapezoid(grid.step, psi.iter().map(|c| c.norm_sqr()));
        assert!((norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn wavefunction_phase_convention() {
        let s = free_at(0.7, 1.3, -0.4);
        let grid = UniformGrid::new(s.z_cl - 10.0, 0.01, 2001);
        let psi = evaluate_wavefunction(&s, &grid).unwrap();
        let centre = psi[1000];
        assert!((centre.arg() - 1.3 * -0.4).abs() < 1e-12);
    }

    #[test]
    fn coarse_or_short_grid_rejected() {
        let s = free_at(1.0, 0.0, 0.0);
        assert!(matches!(
            evaluate_wavefunction(&s, &UniformGrid::spanning(-3.0, 3.0, 2000)),
            Err(Error::GridTooCoarse { .. })
        ));
        assert!(matches!(
            evaluate_wavefunction(&s, &UniformGrid::spanning(-10.0, 10.0, 50)),
            Err(Error::GridTooCoarse { .. })
        ));
        let crude = GridPolicy {
            span_sigmas: 2.0,
            points_per_sigma: 0.3,
        };
        assert!(matches!(
            muss_residual_with(&s, c(1.0, 0.0), &crude),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn free_particle_density_variance() {
        let s = free_at(1.0, 0.0, 0.0);
        let q = quadrature_moments(&s, &GridPolicy::default()).unwrap();
        assert!((q.var_z - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_derivative_matches_analytic() {
        let s = free_at(1.5, 0.4, 2.5);
        let grid = GridPolicy::default().grid_for(&s).unwrap();
        let psi: Vec<Complex64> = grid.points().map(|z| s.amplitude(z)).collect();
        let num = spectral_momentum(&psi, grid.step);
        let exact = momentum_samples(&s, &grid);
        let err = num
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn zero_crossing_guard() {
        let r = GaussianState::from_mode(
            &ModeSample {
                t: 0.0,
                eps: c(1e-10, 0.0),
                deps: c(0.0, 1e10),
            },
            0.0,
            0.0,
        );
        assert!(matches!(r, Err(Error::ZeroCrossing { .. })));
    }

    #[test]
    fn mathieu_state_after_one_period() {
        let (e, d) = canonical_initial_conditions();
        let drive = Drive::mathieu(0.0, 0.4, 2.0, 0.0);
        let sol = integrate_epsilon(&drive, 0.0, std::f64::consts::PI, e, d, 1e-10).unwrap();
        let s = coherent_state(&sol, std::f64::consts::PI, 1.0, 0.0).unwrap();
        assert!((s.width.re - 1.0 / s.phi).abs() < 1e-9);
        assert!((s.width - s.width_from_phi()).norm() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closed_forms_match_quadrature(
            re in 0.3..3.0f64, im in -3.0..3.0f64, x in -3.0..3.0f64,
            z in -2.0..2.0f64, p in -2.0..2.0f64,
        ) {
            let eps = c(re, im);
            let deps = (c(x, 0.0) + I) / eps.conj();
            let s = GaussianState::from_mode(&ModeSample { t: 0.0, eps, deps }, z, p).unwrap();
            let m = moments(&s);
            let q = quadrature_moments(&s, &GridPolicy::default()).unwrap();
            prop_assert!((m.mean_z - q.mean_z).abs() < 1e-7);
            prop_assert!((m.mean_p - q.mean_p).abs() < 1e-7);
            prop_assert!((m.var_z - q.var_z).abs() < 1e-7);
            prop_assert!((m.var_p - q.var_p).abs() < 1e-7);
            prop_assert!((m.cov_zp - q.cov_zp).abs() < 1e-7);
            prop_assert!((m.schrodinger_determinant() - 0.25).abs() < 1e-8);
            let u = uncertainty_products(&s);
            prop_assert!((u.heisenberg_zp - u.schrodinger_rhs).abs() < 1e-8);
            prop_assert!((u.heisenberg_zp_quadrature - 0.25).abs() < 1e-8);
            let b = squeeze_factor(&s, &m).unwrap();
            prop_assert!((b.norm_sqr() - m.var_z / m.var_p).abs() < 1e-10 * (1.0 + b.norm_sqr()));
            prop_assert!((b * s.width - 1.0).norm() < 1e-12);
            // |w|² = var_p/var_z, so |w| = 1 exactly when the variances agree
            prop_assert!((s.width.norm_sqr() * m.var_z / m.var_p - 1.0).abs() < 1e-12);
        }

        #[test]
        fn duality_residuals(re in 0.3..3.0f64, im in -3.0..3.0f64, x in -3.0..3.0f64) {
            let eps = c(re, im);
            let deps = (c(x, 0.0) + I) / eps.conj();
            let s = GaussianState::from_mode(&ModeSample { t: 0.0, eps, deps }, 0.3, -0.2).unwrap();
            let b = squeeze_factor(&s, &moments(&s)).unwrap();
            prop_assert!(muss_residual(&s, b).unwrap() < 1e-7);
            if s.phi_dot.abs() > 0.5 {
                prop_assert!(muss_residual(&s, c(1.0, 0.0)).unwrap() > 0.05);
            }
        }
    }
}
