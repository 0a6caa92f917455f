//! Operating points: the five control parameters plus the optical depth.

use serde::{Deserialize, Serialize};

use crate::error::{QfcError, Result};
use crate::scheme::{od_scalings, AtomicScheme, CouplingScales, GammaMatrix};

/// The five laser parameters, in units of Γ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Controls {
    pub delta_p: f64,
    pub delta_c: f64,
    pub delta: f64,
    pub omega_c: f64,
    pub omega_d: f64,
}

impl Controls {
    pub const fn new(delta_p: f64, delta_c: f64, delta: f64, omega_c: f64, omega_d: f64) -> Self {
        Self {
            delta_p,
            delta_c,
            delta,
            omega_c,
            omega_d,
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.delta_p, self.delta_c, self.delta, self.omega_c, self.omega_d]
    }

    pub fn from_array(v: [f64; 5]) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4])
    }

    /// Detunings negated, Rabi frequencies kept.
    pub fn mirrored(self) -> Self {
        Self::new(-self.delta_p, -self.delta_c, -self.delta, self.omega_c, self.omega_d)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.to_array().iter().all(|v| v.is_finite()) {
            return Err(QfcError::Domain(format!("non-finite control parameter in {self:?}")));
        }
        if self.omega_c < 0.0 || self.omega_d < 0.0 {
            return Err(QfcError::Domain(format!(
                "Rabi frequencies must be ≥ 0, got Ωc={} Ωd={}",
                self.omega_c, self.omega_d
            )));
        }
        Ok(())
    }
}

/// A complete steady-state configuration of the converter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub scheme: AtomicScheme,
    pub gammas: GammaMatrix,
    pub scales: CouplingScales,
    pub controls: Controls,
}

impl OperatingPoint {
    pub fn new(scheme: &AtomicScheme, alpha: f64, controls: Controls) -> Result<Self> {
        controls.validate()?;
        Ok(Self {
            scheme: scheme.clone(),
            gammas: scheme.gammas(),
            scales: od_scalings(scheme, alpha)?,
            controls,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.scales.alpha
    }

    /// Same medium, different controls.
    pub fn with_controls(&self, controls: Controls) -> Result<Self> {
        controls.validate()?;
        Ok(Self {
            controls,
            ..self.clone()
        })
    }

    /// Same controls with an explicit `α_c`.
    pub fn with_alpha_c(mut self, alpha_c: f64) -> Result<Self> {
        if !(alpha_c.is_finite() && alpha_c >= 0.0) {
            return Err(QfcError::Domain(format!("α_c must be ≥ 0, got {alpha_c}")));
        }
        self.scales.alpha_c = alpha_c;
        Ok(self)
    }
}
