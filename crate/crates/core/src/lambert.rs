//! Principal branch `W0` of the Lambert W function on the nonnegative reals.

use crate::error::{QfcError, Result};

const MAX_ITER: usize = 64;
const TOL: f64 = 4.0 * f64::EPSILON;

/// `W0(x)` for `x ≥ 0`, by Halley iteration.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(QfcError::Domain(format!("lambert_w0 needs finite x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x > 3.0 {
        return lambert_w0_exp(x.ln());
    }
    // log1p start is within a few percent on [0, 3]
    let mut w = x.ln_1p() * (1.0 - x.ln_1p().ln_1p() / (2.0 + x.ln_1p()));
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= TOL * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    Err(QfcError::Convergence {
        what: format!("lambert_w0({x})"),
        achieved: f64::NAN,
        requested: TOL,
    })
}

/// `W0(e^l)`, the solution of `w + ln w = l`, valid for any real `l` and
/// safe when `e^l` overflows.
pub fn lambert_w0_exp(l: f64) -> Result<f64> {
    if !l.is_finite() {
        return Err(QfcError::Domain(format!("lambert_w0_exp needs finite l, got {l}")));
    }
    if l < 1.0 {
        return lambert_w0(l.exp());
    }
    // Newton on g(w) = w + ln w − l, convex and monotone for w > 0
    let mut w = if l < 3.0 { 0.5 * (l + 1.0) } else { l - l.ln() };
    for _ in 0..MAX_ITER {
        let g = w + w.ln() - l;
        let step = g * w / (w + 1.0);
        w -= step;
        if step.abs() <= TOL * w {
            return Ok(w);
        }
    }
    Err(QfcError::Convergence {
        what: format!("lambert_w0_exp({l})"),
        achieved: f64::NAN,
        requested: TOL,
    })
}
