//! Dormand–Prince 5(4) embedded Runge–Kutta integrator on fixed-size real
//! states, with FSAL stage reuse and a standard proportional step controller.
//!
//! Only what the mode and Floquet solvers need: accepted-step output and a
//! single uncontrolled step used to evaluate between stored samples.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 5_000_000;

/// Tolerances for the adaptive driver. The error of each component is
/// measured against `atol + rtol * max(|y_old|, |y_new|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
        }
    }
}

#[inline]
fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (w, k) in terms {
            acc += w * k[i];
        }
        *o += h * acc;
    }
    out
}

struct StepResult<const D: usize> {
    y: [f64; D],
    dy: [f64; D],
    err: [f64; D],
}

fn dopri_step<F, const D: usize>(
    f: &F,
    t: f64,
    y: &[f64; D],
    k1: &[f64; D],
    h: f64,
) -> StepResult<D>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(
        t + C4 * h,
        &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
    );
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &axpy(
            y,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    let k7 = f(t + h, &y_new);
    let mut err = [0.0; D];
    for (i, e) in err.iter_mut().enumerate() {
        *e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    StepResult {
        y: y_new,
        dy: k7,
        err,
    }
}

/// One fifth-order step of length `h` without error control.
pub fn single_step<F, const D: usize>(f: &F, t: f64, y: &[f64; D], h: f64) -> [f64; D]
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let k1 = f(t, y);
    dopri_step(f, t, y, &k1, h).y
}

fn error_norm<const D: usize>(err: &[f64; D], y0: &[f64; D], y1: &[f64; D], tol: Tolerance) -> f64 {
    let mut sum = 0.0;
    for i in 0..D {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        sum += (err[i] / sc).powi(2);
    }
    (sum / D as f64).sqrt()
}

fn initial_step<F, const D: usize>(
    f: &F,
    t0: f64,
    y0: &[f64; D],
    f0: &[f64; D],
    tol: Tolerance,
) -> f64
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let scale = |y: &[f64; D], i: usize| tol.atol + tol.rtol * y[i].abs();
    let rms = |v: &[f64; D], y: &[f64; D]| {
        (v.iter()
            .enumerate()
            .map(|(i, x)| (x / scale(y, i)).powi(2))
            .sum::<f64>()
            / D as f64)
            .sqrt()
    };
    let d0 = rms(y0, y0);
    let d1 = rms(f0, y0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = f(t0 + h0, &y1);
    let mut diff = [0.0; D];
    for i in 0..D {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = rms(&diff, y0) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1)
}

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`, calling `observe` on
/// every accepted point (including the initial one). `observe` may abort the
/// run by returning an error.
pub fn integrate<F, O, const D: usize>(
    f: &F,
    t0: f64,
    t1: f64,
    y0: [f64; D],
    tol: Tolerance,
    mut observe: O,
) -> Result<[f64; D]>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    O: FnMut(f64, &[f64; D]) -> Result<()>,
{
    if !(t1 >= t0) {
        return Err(Error::InvalidArgument(format!(
            "integration interval [{t0}, {t1}] is reversed or not finite"
        )));
    }
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    observe(t0, &y0)?;
    if t1 == t0 {
        return Ok(y0);
    }

    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(f, t0, &y0, &k1, tol).min(span);
    let min_step = 1e-14 * t0.abs().max(t1.abs()).max(1.0);
    let mut steps = 0usize;

    while t < t1 {
        steps += 1;
        if steps > MAX_STEPS || h < min_step || !h.is_finite() {
            return Err(Error::StepFailure { t, step: h });
        }
        let last = t + h >= t1 || (t1 - (t + h)) < min_step;
        let h_try = if last { t1 - t } else { h };
        let step = dopri_step(f, t, &y, &k1, h_try);
        let err = error_norm(&step.err, &y, &step.y, tol);
        if !err.is_finite() {
            h = 0.5 * h_try;
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h_try };
            y = step.y;
            k1 = step.dy;
            observe(t, &y)?;
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h = h_try * factor;
        } else {
            h = h_try * (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_t: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_period_returns_to_start() {
        let mut count = 0;
        let y = integrate(
            &oscillator,
            0.0,
            2.0 * std::f64::consts::PI,
            [1.0, 0.0],
            Tolerance::uniform(1e-11),
            |_, _| {
                count += 1;
                Ok(())
            },
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9, "{y:?}");
        assert!(count > 10);
    }

    #[test]
    fn single_step_is_fifth_order() {
        // halving h should shrink the local error by ~2^6
        let exact = |h: f64| [h.cos(), -h.sin()];
        let e = |h: f64| {
            let y = single_step(&oscillator, 0.0, &[1.0, 0.0], h);
            let ex = exact(h);
            ((y[0] - ex[0]).powi(2) + (y[1] - ex[1]).powi(2)).sqrt()
        };
        let ratio = e(0.2) / e(0.1);
        assert!(ratio > 40.0 && ratio < 90.0, "ratio {ratio}");
    }

    #[test]
    fn reversed_interval_rejected() {
        let r = integrate(
            &oscillator,
            1.0,
            0.0,
            [1.0, 0.0],
            Tolerance::uniform(1e-8),
            |_, _| Ok(()),
        );
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn observer_can_abort() {
        let r = integrate(
            &oscillator,
            0.0,
            10.0,
            [1.0, 0.0],
            Tolerance::uniform(1e-8),
            |t, _| {
                if t > 1.0 {
                    Err(Error::ZeroCrossing { t, modulus: 0.0 })
                } else {
                    Ok(())
                }
            },
        );
        assert!(matches!(r, Err(Error::ZeroCrossing { .. })));
    }
}
