//! Dormand–Prince 5(4) integration of small complex ODE systems.

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step size; `None` leaves it to the controller.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: None,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine<const N: usize>(y: &[Complex64; N], h: f64, terms: &[(f64, &[Complex64; N])]) -> [Complex64; N] {
    let mut out = *y;
    for (w, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += ki * (h * w);
        }
    }
    out
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t_end`, calling `observer` on
/// the initial point and after every accepted step.
pub fn dopri5<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [Complex64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut observer: O,
) -> Result<OdeStats>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
    O: FnMut(f64, &[Complex64; N]),
{
    if !(t_end > t0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("need t_end > t0 (got {t0}, {t_end})")));
    }
    if opts.rel_tol <= 0.0 || opts.abs_tol < 0.0 {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    let span = t_end - t0;
    let max_step = opts.max_step.unwrap_or(span).min(span);
    let mut stats = OdeStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    observer(t, &y);

    let scale0 = y.iter().map(|v| v.norm()).fold(0.0, f64::max).max(opts.abs_tol);
    let rate0 = k1.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut h = if rate0 > 0.0 {
        (0.01 * scale0 / rate0).min(max_step)
    } else {
        max_step
    };

    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::TooManySteps { steps: opts.max_steps });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = f(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = combine(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &y_new);

        let mut err = 0.0f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.abs_tol + opts.rel_tol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / sc);
        }
        if !err.is_finite() {
            return Err(Error::NonFinite("ODE state"));
        }

        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            observer(t, &y);
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * factor).min(max_step);
        if h <= f64::EPSILON * t.abs().max(span) {
            return Err(Error::StepSizeUnderflow { tau: t });
        }
    }
    Ok(stats)
}
