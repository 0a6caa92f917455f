//! Attenuation of the coupling field along the medium.
//!
//! With `u = |Ωc|²` the steady-state field equation is
//! `dΩc/dζ = C0 Ωc / (A0 + B0 u)`, whose intensity solves in closed form
//! through `W0`, and whose phase follows from `d ln Ωc = (C0/D0) d ln u`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QfcError, Result};
use crate::lambert::lambert_w0_exp;
use crate::point::OperatingPoint;

/// Closed-form coupling field for one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingField {
    pub a0: f64,
    pub b0: f64,
    pub c0: C64,
    pub d0: f64,
    pub omega_c0: f64,
    /// `(B0/A0) u(0)`.
    y0: f64,
    /// `C0 / D0`, the phase exponent.
    phase_exponent: C64,
}

impl CouplingField {
    pub fn new(point: &OperatingPoint) -> Self {
        let gamma31 = point.scheme.g31;
        let g31 = point.gammas.g31();
        let dc = point.controls.delta_c;
        let a0 = 2.0 * gamma31 * (g31 * g31 + 4.0 * dc * dc);
        let b0 = 4.0 * g31;
        let c0 = -point.scales.alpha_c * gamma31 * gamma31 * C64::new(g31, 2.0 * dc);
        let d0 = 2.0 * c0.re;
        let omega_c0 = point.controls.omega_c;
        Self {
            a0,
            b0,
            c0,
            d0,
            omega_c0,
            y0: b0 / a0 * omega_c0 * omega_c0,
            phase_exponent: C64::new(g31, 2.0 * dc) / (2.0 * g31),
        }
    }

    /// A field that does not attenuate.
    pub fn constant(point: &OperatingPoint) -> Self {
        let mut f = Self::new(point);
        f.c0 = C64::new(0.0, 0.0);
        f.d0 = 0.0;
        f
    }

    fn is_trivial(&self) -> bool {
        self.d0 == 0.0 || self.omega_c0 == 0.0
    }

    /// `ln(u(ζ)/u(0))`, or `None` when the field is identically zero.
    fn log_ratio(&self, zeta: f64) -> Result<Option<f64>> {
        if self.omega_c0 == 0.0 {
            return Ok(None);
        }
        if self.d0 == 0.0 {
            return Ok(Some(0.0));
        }
        let shift = self.d0 / self.a0 * zeta;
        let l = self.y0.ln() + self.y0 + shift;
        let w = lambert_w0_exp(l)?;
        // ln w = l − w, so ln(w / y0) = y0 − w + shift
        Ok(Some(self.y0 - w + shift))
    }

    /// `u(ζ) = |Ωc(ζ)|²`.
    pub fn intensity(&self, zeta: f64) -> Result<f64> {
        if self.is_trivial() {
            return Ok(self.omega_c0 * self.omega_c0);
        }
        let u0 = self.omega_c0 * self.omega_c0;
        Ok(match self.log_ratio(zeta)? {
            Some(lr) => u0 * lr.exp(),
            None => 0.0,
        })
    }

    /// Complex `Ωc(ζ)`; `Ωc(0)` is real and nonnegative.
    pub fn omega(&self, zeta: f64) -> Result<C64> {
        if self.is_trivial() {
            return Ok(C64::new(self.omega_c0, 0.0));
        }
        match self.log_ratio(zeta)? {
            Some(lr) => Ok(self.omega_c0 * (self.phase_exponent * lr).exp()),
            None => Ok(C64::new(0.0, 0.0)),
        }
    }

    /// `ln(βu) + βu − D0 ζ / A0` with `β = B0/A0`; constant along the medium.
    pub fn invariant(&self, zeta: f64, u: f64) -> f64 {
        let bu = self.b0 / self.a0 * u;
        bu.ln() + bu - self.d0 / self.a0 * zeta
    }

    /// Right-hand side of the field equation, for independent integrators.
    pub fn rhs(&self, omega: C64) -> C64 {
        self.c0 * omega / (self.a0 + self.b0 * omega.norm_sqr())
    }
}

/// Coupling field sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfile {
    pub zeta: Vec<f64>,
    pub omega: Vec<C64>,
    pub intensity: Vec<f64>,
    pub field: CouplingField,
}

/// Samples the coupling field at `grid_size` uniformly spaced points on [0, 1].
pub fn coupling_profile(point: &OperatingPoint, grid_size: usize) -> Result<CouplingProfile> {
    if grid_size < 2 {
        return Err(QfcError::Domain(format!("grid_size must be ≥ 2, got {grid_size}")));
    }
    let field = CouplingField::new(point);
    let step = 1.0 / (grid_size - 1) as f64;
    let zeta: Vec<f64> = (0..grid_size).map(|k| k as f64 * step).collect();
    let mut omega = Vec::with_capacity(grid_size);
    let mut intensity = Vec::with_capacity(grid_size);
    for &z in &zeta {
        omega.push(field.omega(z)?);
        intensity.push(field.intensity(z)?);
    }
    Ok(CouplingProfile {
        zeta,
        omega,
        intensity,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Controls;
    use crate::scheme::{build_scheme, Band};
    use proptest::prelude::*;

    fn point(band: Band, alpha: f64, c: [f64; 5]) -> OperatingPoint {
        OperatingPoint::new(&build_scheme(band), alpha, Controls::from_array(c)).unwrap()
    }

    /// Classic RK4 on the complex field equation.
    fn rk4(field: &CouplingField, steps: usize, grid: &[f64]) -> Vec<C64> {
        let h = 1.0 / steps as f64;
        let mut y = C64::new(field.omega_c0, 0.0);
        let mut out = Vec::new();
        let mut gi = 0;
        for k in 0..=steps {
            let z = k as f64 * h;
            while gi < grid.len() && (grid[gi] - z).abs() < 1e-12 {
                out.push(y);
                gi += 1;
            }
            if k == steps {
                break;
            }
            let k1 = field.rhs(y);
            let k2 = field.rhs(y + k1 * (h / 2.0));
            let k3 = field.rhs(y + k2 * (h / 2.0));
            let k4 = field.rhs(y + k3 * h);
            y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        out
    }

    #[test]
    fn no_absorption_keeps_field() {
        let p = point(Band::E1367, 0.0, [13.0, -31.0, 14.0, 50.0, 7.0]);
        let prof = coupling_profile(&p, 16).unwrap();
        assert!(prof.omega.iter().all(|w| *w == C64::new(50.0, 0.0)));
    }

    #[test]
    fn boundary_value_exact() {
        let p = point(Band::C1529, 700.0, [83.0, -105.0, 84.0, 249.5, 25.5]);
        let prof = coupling_profile(&p, 8).unwrap();
        assert_eq!(prof.intensity[0], 249.5 * 249.5);
        assert!(coupling_profile(&p, 1).is_err());
    }

    #[test]
    fn matches_rk4_on_64_points() {
        let cases = [
            (Band::E1367, 50.0, [13.0, -31.0, 14.0, 50.0, 7.0]),
            (Band::E1367, 250.0, [7.0, -24.0, 20.0, 50.0, 26.0]),
            (Band::C1529, 1000.0, [44.0, -2.0, 31.0, 50.0, 47.0]),
            (Band::C1529, 400.0, [1.0, 0.5, 1.0, 3.0, 1.0]),
        ];
        let grid: Vec<f64> = (0..64).map(|k| k as f64 / 63.0).collect();
        for (band, alpha, c) in cases {
            let p = point(band, alpha, c);
            let prof = coupling_profile(&p, 64).unwrap();
            let reference = rk4(&prof.field, 63 * 4000, &grid);
            assert_eq!(reference.len(), 64);
            for (w, r) in prof.omega.iter().zip(&reference) {
                let rel = (w - r).norm() / r.norm().max(1e-300);
                assert!(rel <= 1e-8, "{band} α={alpha}: rel err {rel:e}");
            }
        }
    }

    proptest! {
        #[test]
        fn profile_invariants(
            alpha in 0.0f64..1200.0,
            dc in -150.0f64..150.0,
            oc in 0.01f64..400.0,
        ) {
            let p = point(Band::E1367, alpha, [0.0, dc, 0.0, oc, 1.0]);
            let prof = coupling_profile(&p, 32).unwrap();
            let inv0 = prof.field.invariant(0.0, prof.intensity[0]);
            for k in 0..32 {
                let u = prof.intensity[k];
                prop_assert!((prof.omega[k].norm_sqr() - u).abs() <= 1e-10 * u.max(1e-300));
                if k > 0 {
                    prop_assert!(u <= prof.intensity[k - 1]);
                }
                if u > 1e-250 {
                    let inv = prof.field.invariant(prof.zeta[k], u);
                    prop_assert!((inv - inv0).abs() <= 1e-10 * (1.0 + inv0.abs()));
                }
            }
        }
    }
}
