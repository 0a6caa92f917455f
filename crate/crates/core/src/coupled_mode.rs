//! Self- and cross-coupling coefficients of the probe/signal mode equations.
//!
//! `d/dζ (a_p, a_s)ᵀ = M (a_p, a_s)ᵀ` with `M = [[Λp, κp], [κs, Λs]]`.
//! Two independent routes are provided: an explicit closed form and a direct
//! solve of the 4×4 steady-state system for `{σ12, σ14, σ32, σ34}`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C64;

use crate::error::{QfcError, Result};
use crate::mat2::Mat2;
use crate::point::OperatingPoint;
use crate::scheme::{zeroth_order_steady_state, GroundManifoldState};

/// Complex detuned decoherence rates `γ' = γ − 2i(detuning)` at ω = 0.
#[derive(Debug, Clone, Copy)]
pub struct PrimedRates {
    pub g21: C64,
    pub g32: C64,
    pub g41: C64,
    pub g43: C64,
}

impl PrimedRates {
    pub fn new(point: &OperatingPoint) -> Self {
        let g = &point.gammas;
        let c = &point.controls;
        Self {
            g21: C64::new(g.g21(), -2.0 * c.delta_p),
            g32: C64::new(g.g32(), -2.0 * (c.delta_p - c.delta_c)),
            g41: C64::new(g.g41(), -2.0 * c.delta),
            g43: C64::new(g.g43(), -2.0 * (c.delta - c.delta_c)),
        }
    }
}

fn ground_state(point: &OperatingPoint, omega_c: C64) -> GroundManifoldState {
    zeroth_order_steady_state(&point.scheme, &point.gammas, point.controls.delta_c, omega_c)
}

fn singular(point: &OperatingPoint, omega_c: C64, what: &str) -> QfcError {
    QfcError::Singular(format!(
        "{what} vanishes at controls {:?}, α={}, Ωc(ζ)={omega_c}",
        point.controls,
        point.alpha()
    ))
}

/// `M` at a given local coupling field, closed form.
pub fn coupled_mode_matrix(point: &OperatingPoint, omega_c: C64) -> Result<Mat2> {
    let r = PrimedRates::new(point);
    let gs = ground_state(point, omega_c);
    let od = omega_c;
    let wd = C64::new(point.controls.omega_d, 0.0);
    let uc = omega_c.norm_sqr();
    let ud = wd.norm_sqr();
    let duv = uc - ud;
    let i = C64::i();

    let t0 = r.g21 * r.g32 * r.g41 * r.g43
        + uc * (r.g21 * r.g32 + r.g41 * r.g43)
        + ud * (r.g21 * r.g41 + r.g32 * r.g43)
        + duv * duv;
    if !(t0.norm() > 0.0) || !t0.is_finite() {
        return Err(singular(point, omega_c, "T0"));
    }

    let s = &point.scales;
    let cross = i * (s.alpha * s.alpha_s).sqrt() / (2.0 * t0);
    let lp = i * s.alpha / (2.0 * t0)
        * (gs.c31() * od * (r.g41 * r.g43 + duv)
            + i * gs.p11 * (r.g32 * r.g41 * r.g43 + uc * r.g32 + ud * r.g41));
    let kp = cross
        * (gs.c13 * wd.conj() * (duv - r.g32 * r.g43)
            + i * gs.p33 * (r.g32 + r.g41) * od * wd.conj());
    let ls = i * s.alpha_s / (2.0 * t0)
        * (gs.c13 * od.conj() * (r.g21 * r.g32 + duv)
            + i * gs.p33 * (r.g21 * r.g32 * r.g41 + uc * r.g41 + ud * r.g32));
    let ks = cross
        * (gs.c31() * wd * (duv - r.g21 * r.g41)
            + i * gs.p11 * (r.g32 + r.g41) * od.conj() * wd);
    Ok(Mat2::new(lp, kp, ks, ls))
}

/// `M` from a dense solve of the first-order coherence equations.
pub fn coupled_mode_matrix_oracle(point: &OperatingPoint, omega_c: C64) -> Result<Mat2> {
    let r = PrimedRates::new(point);
    let gs = ground_state(point, omega_c);
    let i = C64::i();
    let z = C64::new(0.0, 0.0);
    let wc = omega_c;
    let wd = C64::new(point.controls.omega_d, 0.0);
    // unknowns (σ12, σ14, σ32, σ34) per unit probe or signal amplitude
    #[rustfmt::skip]
    let k = Matrix4::new(
        -r.g21,          i * wd.conj(), -i * wc,        z,
        i * wd,          -r.g41,        z,              -i * wc,
        -i * wc.conj(),  z,             -r.g32,         i * wd.conj(),
        z,               -i * wc.conj(), i * wd,        -r.g43,
    );
    let lu = k.lu();
    let two_i = 2.0 * i;
    let bp = Vector4::new(-two_i * gs.p11, z, -two_i * gs.c31(), z);
    let bs = Vector4::new(z, -two_i * gs.c13, z, -two_i * gs.p33);
    let xp = lu.solve(&bp).ok_or_else(|| singular(point, omega_c, "4×4 determinant"))?;
    let xs = lu.solve(&bs).ok_or_else(|| singular(point, omega_c, "4×4 determinant"))?;
    if !(xp.iter().chain(xs.iter()).all(|v| v.is_finite())) {
        return Err(singular(point, omega_c, "4×4 determinant"));
    }
    let s = &point.scales;
    let cross = i * (s.alpha * s.alpha_s).sqrt() / 4.0;
    Ok(Mat2::new(
        i * (s.alpha / 4.0) * xp[0],
        cross * xs[0],
        cross * xp[3],
        i * (s.alpha_s / 4.0) * xs[3],
    ))
}
