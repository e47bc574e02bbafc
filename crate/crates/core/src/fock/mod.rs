//! Truncated Fock-space matrices for the boson operators, and brute-force
//! checks of the operator identities used by the ladder algebra.
//!
//! Truncating to N levels corrupts matrix elements near the top of the
//! space. A squeeze of magnitude r stretches phase space by up to e^r and a
//! displacement shifts it by √2·|β|, so a Fock state |k⟩ (classical radius
//! √(2k+1)) stays clear of the cut at radius √(2N+1) only while
//! `e^r·√(2k+1) + √2·|β| ≤ √(2N+1) − 2`. Residuals are measured on the block
//! of such k; see [`trusted_block`].

mod verify;

pub use verify::{
    annihilated_state, reordered_displacement, verify_bch, verify_bch_perturbed, verify_chain,
    verify_coherent_to_squeezed, verify_ordering, verify_reverse, verify_sas, verify_similarity,
    verify_similarity_case, ChainReport, SimilarityCase, VerificationReport, CONVERGENCE_FLOOR,
    CONVERGENCE_STEP,
};

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance handed to [`matrix_exp`] by the operator builders.
pub const EXP_TOLERANCE: f64 = 1e-10;

/// Smallest trusted block the verifiers accept.
pub const MIN_TRUSTED_BLOCK: usize = 3;

#[derive(Clone, PartialEq)]
pub struct FockMatrix {
    pub label: String,
    pub entries: DMatrix<Complex64>,
}

impl fmt::Debug for FockMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockMatrix")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .finish()
    }
}

impl FockMatrix {
    pub fn new(label: impl Into<String>, entries: DMatrix<Complex64>) -> Self {
        assert!(entries.is_square(), "Fock matrices are square");
        Self {
            label: label.into(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn identity(n: usize) -> Self {
        Self::new("I", DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self::new("0", DMatrix::zeros(n, n))
    }

    /// Number operator a†a.
    pub fn number(n: usize) -> Self {
        Self::new(
            "n",
            DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(i as f64, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::new(format!("({})†", self.label), self.entries.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(
            format!("{}·{}", self.label, other.label),
            &self.entries * &other.entries,
        )
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(format!("({c})·{}", self.label), &self.entries * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            format!("{} + {}", self.label, other.label),
            &self.entries + &other.entries,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            format!("{} − {}", self.label, other.label),
            &self.entries - &other.entries,
        )
    }

    /// Largest |entry| of the leading `k`×`k` block.
    pub fn block_max(&self, k: usize) -> f64 {
        let k = k.min(self.dim());
        let mut m = 0.0_f64;
        for j in 0..k {
            for i in 0..k {
                m = m.max(self.entries[(i, j)].norm());
            }
        }
        m
    }

    /// Largest |entry| of `self − other` on the leading `k`×`k` block.
    pub fn block_distance(&self, other: &Self, k: usize) -> f64 {
        let k = k.min(self.dim()).min(other.dim());
        let mut m = 0.0_f64;
        for j in 0..k {
            for i in 0..k {
                m = m.max((self.entries[(i, j)] - other.entries[(i, j)]).norm());
            }
        }
        m
    }

    /// Largest |(U†U − I)| entry on the leading `k`×`k` block.
    pub fn unitarity_defect(&self, k: usize) -> f64 {
        let p = self.adjoint().mul(self);
        p.block_distance(&Self::identity(self.dim()), k)
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.entries.column(j).iter().copied().collect()
    }
}

/// Annihilation and creation matrices on N levels.
pub fn build_ladder(n: usize) -> Result<(FockMatrix, FockMatrix)> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "truncation must be at least 2, got {n}"
        )));
    }
    let a = DMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let a = FockMatrix::new("a", a);
    let adag = FockMatrix::new("a†", a.entries.adjoint());
    Ok((a, adag))
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// exp(M) by Padé scaling and squaring. Rounding in the squaring phase
/// grows like ‖M‖₁·ε_mach; larger than `tol` is refused.
pub fn matrix_exp(m: &FockMatrix, tol: f64) -> Result<FockMatrix> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if m.entries.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow {
            reason: format!("{} has non-finite entries", m.label),
        });
    }
    let norm = one_norm(&m.entries);
    if norm * f64::EPSILON > tol {
        return Err(Error::Overflow {
            reason: format!(
                "‖{}‖₁ = {norm:e} is too large for tolerance {tol:e}",
                m.label
            ),
        });
    }
    let e = m.entries.exp();
    if e.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow {
            reason: format!("exp({}) overflowed", m.label),
        });
    }
    Ok(FockMatrix::new(format!("exp({})", m.label), e))
}

/// Number of leading Fock levels that stay clear of the truncation edge
/// under a squeeze of magnitude `r` combined with a phase-space shift of
/// magnitude `shift` (in units of the coherent amplitude).
pub fn trusted_block(n: usize, r: f64, shift: f64) -> usize {
    let edge = (2.0 * n as f64 + 1.0).sqrt() - 2.0;
    let room = edge - std::f64::consts::SQRT_2 * shift;
    if !(room > 0.0) {
        return 0;
    }
    let radius = room * (-r).exp();
    // √(2k+1) ≤ radius
    let kmax = (radius * radius - 1.0) / 2.0;
    if kmax < 0.0 {
        0
    } else {
        (kmax.floor() as usize + 1).min(n)
    }
}

fn require_block(n: usize, k: usize, what: &str) -> Result<()> {
    if k < MIN_TRUSTED_BLOCK {
        return Err(Error::TruncationTooSmall {
            n,
            reason: format!("{what} leaves {k} trusted levels (need {MIN_TRUSTED_BLOCK})"),
        });
    }
    Ok(())
}

/// D(β) = exp(βa† − β*a). Requires |β|² ≤ N/9.
pub fn displacement(beta: Complex64, n: usize) -> Result<FockMatrix> {
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "displacement {beta} is not finite"
        )));
    }
    if beta.norm_sqr() > n as f64 / 9.0 {
        return Err(Error::TruncationTooSmall {
            n,
            reason: format!("|β|² = {} exceeds N/9", beta.norm_sqr()),
        });
    }
    let (a, ad) = build_ladder(n)?;
    displacement_from(&a, &ad, beta)
}

pub(crate) fn displacement_from(
    a: &FockMatrix,
    ad: &FockMatrix,
    beta: Complex64,
) -> Result<FockMatrix> {
    let g = ad.scale(beta).sub(&a.scale(beta.conj()));
    let mut d = matrix_exp(&g, EXP_TOLERANCE)?;
    d.label = format!("D({beta})");
    Ok(d)
}

/// Generator ½λa†² − ½λ*a² with λ = r e^{iθ}.
pub fn squeeze_generator(r: f64, theta: f64, n: usize) -> Result<FockMatrix> {
    let (a, ad) = build_ladder(n)?;
    Ok(squeeze_generator_from(
        &a,
        &ad,
        Complex64::from_polar(r, theta),
    ))
}

pub(crate) fn squeeze_generator_from(
    a: &FockMatrix,
    ad: &FockMatrix,
    lambda: Complex64,
) -> FockMatrix {
    let a2 = a.mul(a);
    let ad2 = ad.mul(ad);
    let mut g = ad2.scale(0.5 * lambda).sub(&a2.scale(0.5 * lambda.conj()));
    g.label = format!("G({lambda})");
    g
}

/// S(λ) = exp(½λa†² − ½λ*a²), λ = r e^{iθ}. Refused when the trusted block
/// for magnitude r is smaller than [`MIN_TRUSTED_BLOCK`].
pub fn squeeze(r: f64, theta: f64, n: usize) -> Result<FockMatrix> {
    if !(r >= 0.0) || !r.is_finite() || !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "squeeze parameters must be finite with r ≥ 0, got ({r}, {theta})"
        )));
    }
    require_block(n, trusted_block(n, r, 0.0), &format!("squeeze r = {r}"))?;
    let g = squeeze_generator(r, theta, n)?;
    let mut s = matrix_exp(&g, EXP_TOLERANCE)?;
    s.label = format!("S({r}, {theta})");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ladder_two_levels() {
        let (a, ad) = build_ladder(2).unwrap();
        assert_eq!(a.entries[(0, 1)], c(1.0, 0.0));
        assert_eq!(a.entries[(0, 0)], c(0.0, 0.0));
        assert_eq!(a.entries[(1, 0)], c(0.0, 0.0));
        assert_eq!(ad.entries[(1, 0)], c(1.0, 0.0));
        assert!(build_ladder(1).is_err());
    }

    #[test]
    fn ladder_sqrt_rule() {
        let (a, _) = build_ladder(4).unwrap();
        assert_eq!(a.entries[(0, 1)].re, 1.0);
        assert_eq!(a.entries[(1, 2)].re, 2f64.sqrt());
        assert_eq!(a.entries[(2, 3)].re, 3f64.sqrt());
        let nonzero = a.entries.iter().filter(|x| x.norm() != 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn commutator_truncation_corner() {
        let n = 40;
        let (a, ad) = build_ladder(n).unwrap();
        let comm = a.mul(&ad).sub(&ad.mul(&a));
        // √k·√k is not exact in floating point
        assert!(comm.block_distance(&FockMatrix::identity(n), n - 1) < 1e-13);
        assert!((comm.entries[(n - 1, n - 1)] + (n - 1) as f64).norm() < 1e-12);
    }

    #[test]
    fn exp_of_zero_and_diagonal() {
        let z = matrix_exp(&FockMatrix::zeros(5), 1e-12).unwrap();
        assert_eq!(z.block_distance(&FockMatrix::identity(5), 5), 0.0);
        let phases = [0.3, -1.2, 2.0, 0.0];
        let d = DMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                c(0.0, phases[i])
            } else {
                c(0.0, 0.0)
            }
        });
        let e = matrix_exp(&FockMatrix::new("D", d), 1e-12).unwrap();
        for (i, p) in phases.iter().enumerate() {
            assert!((e.entries[(i, i)] - Complex64::from_polar(1.0, *p)).norm() < 1e-14);
        }
    }

    #[test]
    fn exp_derivative_spot_check() {
        let (a, ad) = build_ladder(12).unwrap();
        let m = a.scale(c(0.3, 0.1)).add(&ad.mul(&ad).scale(c(-0.2, 0.05)));
        let s = 0.7;
        let h = 1e-5;
        let plus = matrix_exp(&m.scale(c(s + h, 0.0)), 1e-12).unwrap();
        let minus = matrix_exp(&m.scale(c(s - h, 0.0)), 1e-12).unwrap();
        let mid = matrix_exp(&m.scale(c(s, 0.0)), 1e-12).unwrap();
        let fd = plus.sub(&minus).scale(c(0.5 / h, 0.0));
        let exact = m.mul(&mid);
        assert!(fd.block_distance(&exact, 12) < 1e-8);
    }

    #[test]
    fn exp_matches_taylor_series() {
        let (a, ad) = build_ladder(10).unwrap();
        let m = ad
            .scale(c(0.4, -0.3))
            .sub(&a.scale(c(0.4, 0.3)))
            .add(&FockMatrix::number(10).scale(c(0.0, 0.2)));
        let mut term = FockMatrix::identity(10);
        let mut sum = FockMatrix::identity(10);
        for k in 1..60 {
            term = term.mul(&m).scale(c(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        let e = matrix_exp(&m, 1e-12).unwrap();
        assert!(e.block_distance(&sum, 10) < 1e-12);
    }

    #[test]
    fn exp_truncation_convergence() {
        let gen = |n| {
            let (a, ad) = build_ladder(n).unwrap();
            matrix_exp(&a.sub(&ad), 1e-12).unwrap()
        };
        assert!(gen(60).block_distance(&gen(70), 40) < 1e-10);
    }

    #[test]
    fn exp_refuses_huge_or_nan() {
        let big = FockMatrix::identity(3).scale(c(1e9, 0.0));
        assert!(matches!(
            matrix_exp(&big, 1e-10),
            Err(Error::Overflow { .. })
        ));
        let nan = FockMatrix::identity(3).scale(c(f64::NAN, 0.0));
        assert!(matches!(
            matrix_exp(&nan, 1e-10),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn displacement_basics() {
        let id = displacement(c(0.0, 0.0), 10).unwrap();
        assert!(id.block_distance(&FockMatrix::identity(10), 10) < 1e-15);
        let d = displacement(c(1.0, 0.0), 40).unwrap();
        assert!((d.entries[(0, 0)].re - (-0.5f64).exp()).abs() < 1e-12);
        let beta = c(0.6, -0.8);
        let d = displacement(beta, 40).unwrap();
        let mut fact = 1.0;
        for k in 0..15 {
            if k > 0 {
                fact *= k as f64;
            }
            let expected = (-0.5 * beta.norm_sqr()).exp() * beta.powu(k as u32) / fact.sqrt();
            assert!((d.entries[(k, 0)] - expected).norm() < 1e-12, "{k}");
        }
        let back = displacement(-beta, 40).unwrap();
        assert!(d.mul(&back).block_distance(&FockMatrix::identity(40), 20) < 1e-9);
        assert!(d.unitarity_defect(20) < 1e-9);
        assert!(matches!(
            displacement(c(3.0, 0.0), 40),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn squeeze_basics() {
        let s = squeeze(0.0, 1.0, 10).unwrap();
        assert!(s.block_distance(&FockMatrix::identity(10), 10) < 1e-15);
        let s = squeeze(1.0, 0.4, 60).unwrap();
        let inv = squeeze(1.0, 0.4 + std::f64::consts::PI, 60).unwrap();
        assert!(s.mul(&inv).block_distance(&FockMatrix::identity(60), 30) < 1e-8);
        assert!(s.unitarity_defect(30) < 1e-9);
        for k in (1..60).step_by(2) {
            assert_eq!(s.entries[(k, 0)].norm(), 0.0);
        }
        // squeezed vacuum: ⟨2|S|0⟩ = e^{iθ} tanh r / √(2 cosh r)
        let expected = Complex64::from_polar(1.0f64.tanh() / (2.0 * 1.0f64.cosh()).sqrt(), 0.4);
        assert!((s.entries[(2, 0)] - expected).norm() < 1e-9);
        assert!(matches!(
            squeeze(3.0, 0.0, 40),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn trusted_block_values() {
        assert_eq!(trusted_block(60, 1.0, 0.0), 5);
        assert_eq!(trusted_block(40, 3.0, 0.0), 0);
        assert_eq!(trusted_block(60, 0.0, 0.0), 41);
        assert!(trusted_block(60, 0.5, 1.0) < trusted_block(60, 0.5, 0.0));
    }
}
