use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qtrap_core::fock::{verify_chain, verify_coherent_to_squeezed};
use qtrap_core::gaussian::quadrature_moments;
use qtrap_core::mode::canonical_initial_conditions;
use qtrap_core::*;

fn mathieu(a: f64, q: f64, periods: f64, tol: f64) -> ModeSolution {
    let (e, d) = canonical_initial_conditions();
    integrate_epsilon(
        &Drive::mathieu(a, q, 2.0, 0.0),
        0.0,
        periods * PI,
        e,
        d,
        tol,
    )
    .unwrap()
}

#[test]
fn mathieu_pair_after_three_periods() {
    let sol = mathieu(0.0, 0.4, 3.0, 1e-10);
    let lc = ladder_coeffs(&sol, 3.0 * PI).unwrap();
    assert!(lc.norm_defect().abs() < 1e-9, "{}", lc.norm_defect());
}

#[test]
fn trap_config_and_mathieu_drive_agree() {
    let cfg = TrapConfig::from_mathieu(0.1, 0.4, 2.0, 0.0, Axis::Z);
    let (e, d) = canonical_initial_conditions();
    let a = integrate_epsilon(&Drive::trap(cfg), 0.0, 5.0, e, d, 1e-10).unwrap();
    let b = integrate_epsilon(&Drive::mathieu(0.1, 0.4, 2.0, 0.0), 0.0, 5.0, e, d, 1e-10).unwrap();
    assert!((a.last().eps - b.last().eps).norm() < 1e-12);
}

#[test]
fn mathieu_uncertainty_trace() {
    let sol = mathieu(0.0, 0.4, 1.0, 1e-10);
    for k in 0..50 {
        let t = PI * k as f64 / 49.0;
        let s = coherent_state(&sol, t, 1.0, 0.0).unwrap();
        let u = uncertainty_products(&s);
        assert!((u.heisenberg_zp - u.schrodinger_rhs).abs() < 1e-8);
        assert!((u.schrodinger_lhs - 0.25).abs() < 1e-8);
        assert!(
            (u.heisenberg_zp_quadrature - 0.25).abs() < 1e-8,
            "{t}: {}",
            u.heisenberg_zp_quadrature
        );
    }
}

#[test]
fn coherent_state_centre_is_classical() {
    let sol = mathieu(0.0, 0.4, 2.0, 1e-10);
    let s = coherent_state(&sol, 2.0 * PI, 0.7, -0.3).unwrap();
    let (z, p) = classical_trajectory(&sol, 0.7, -0.3, 2.0 * PI).unwrap();
    let m = moments(&s);
    assert_eq!((m.mean_z, m.mean_p), (z, p));
    let q = quadrature_moments(&s, &GridPolicy::default()).unwrap();
    assert!((q.mean_z - z).abs() < 1e-7 && (q.mean_p - p).abs() < 1e-7);
}

#[test]
fn mathieu_duality_chain() {
    let sol = mathieu(0.0, 0.4, 1.0, 1e-10);
    let lc = ladder_coeffs(&sol, PI).unwrap();
    let rep = verify_coherent_to_squeezed(Complex64::new(0.5, 0.5), &lc, 60).unwrap();
    assert!(rep.pass(1e-7), "{rep:#?}");
    assert!(rep.vacuum_residual < 1e-7);

    let state = coherent_state(&sol, PI, 1.0, 0.0).unwrap();
    let m = moments(&state);
    let b = squeeze_factor(&state, &m).unwrap();
    assert!(muss_residual(&state, b).unwrap() < 1e-7);
}

fn stable_point() -> impl Strategy<Value = (f64, f64)> {
    (-0.5..2.0f64, 0.0..1.0f64).prop_filter("stable", |&(a, q)| {
        floquet_stability(a, q, 2.0).unwrap().stable
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pairs_from_integrated_modes_are_canonical((a, q) in stable_point(), frac in 0.0..1.0f64) {
        let sol = mathieu(a, q, 4.0, 1e-12);
        let t = frac * sol.t_end();
        let lc = ladder_coeffs(&sol, t).unwrap();
        prop_assert!(lc.norm_defect().abs() < 1e-10, "{}", lc.norm_defect());
        let qc = quadrature_coeffs(&sol, t).unwrap();
        prop_assert!((qc.commutator_zp() - Complex64::new(0.0, 1.0)).norm() < 1e-10);
        prop_assert!((qc.commutator_aa() - Complex64::new(0.0, 1.0)).norm() < 1e-10);
        prop_assert!(qc.hermiticity_defect() < 1e-14);
        let sp = bogoliubov_decompose(&lc).unwrap();
        let (u, v) = transform_uv(&sp, &lc).unwrap();
        prop_assert!(u.norm() < 1e-10 * lc.mu.norm_sqr());
        prop_assert!((v.norm_sqr() - u.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn width_invariants_on_integrated_states((a, q) in stable_point(), frac in 0.0..1.0f64) {
        let sol = mathieu(a, q, 2.0, 1e-10);
        let s = coherent_state(&sol, frac * sol.t_end(), 0.4, 0.2).unwrap();
        prop_assert!(s.width.re > 0.0);
        prop_assert!((s.width.re - 1.0 / s.phi).abs() < 1e-8 * (1.0 + 1.0 / s.phi));
        prop_assert!((s.width - s.width_from_phi()).norm() < 1e-8 * (1.0 + s.width.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// For any (α, λ, μ, ν) with r ≤ 1, |α| ≤ 2 the matrix conjugations hold
    /// at N = 60 whenever the guards admit the case. The eigenvector check is
    /// truncation-limited in the far corner; there the N+10 rerun must
    /// refuse to certify it, and a larger space must.
    #[test]
    fn conjugations_match_ladder_algebra(
        r0 in 0.0..1.0f64, th0 in -PI..PI, ph0 in -PI..PI,
        r in 0.0..1.0f64, th in -PI..PI,
        amp in 0.0..2.0f64, arg in -PI..PI,
    ) {
        let (mu, nu) = SqueezeParams { r: r0, theta: th0, phase_offset: ph0 }.reconstruct();
        let lc = LadderCoeffs::from_pair(0.0, mu, nu);
        let sp = SqueezeParams { r, theta: th, phase_offset: 0.0 };
        let alpha = Complex64::from_polar(amp, arg);
        match verify_chain(alpha, &lc, &sp, 60) {
            Err(Error::TruncationTooSmall { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
            Ok(rep) => {
                prop_assert!(rep.conjugation.pass(1e-7), "{:?}", rep.conjugation);
                prop_assert!(rep.displacement.pass(1e-7), "{:?}", rep.displacement);
                if !rep.eigenvector.pass(1e-7) {
                    prop_assert!(!rep.eigenvector.converged);
                    let big = verify_chain(alpha, &lc, &sp, 140).unwrap();
                    prop_assert!(big.eigenvector.pass(1e-7), "{:?}", big.eigenvector);
                }
            }
        }
    }
}
