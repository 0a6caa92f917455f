//! Atomic level schemes, decoherence rates, optical-depth scalings and the
//! zeroth-order ground-manifold steady state.
//!
//! Every rate, detuning and Rabi frequency in this crate is expressed in units
//! of `Γ = 2π × 6.063 MHz` (the Rb-87 D2 line width), so `Γ_780 = 1` exactly.
//! The propagation coordinate is `ζ = z / L ∈ [0, 1]`, and all microscopic
//! constants (atom number, length, dipole moments, mode volume) are folded
//! into the three optical depths of [`CouplingScales`].

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QfcError, Result};

/// Version tag of the embedded constant table.
pub const SCHEME_TABLE_VERSION: &str = "rb87-v1";

/// D2 natural line width in MHz (`Γ / 2π`), the unit of every rate.
pub const GAMMA_UNIT_MHZ: f64 = 6.063;

/// Telecom band selected by the upper level `|4⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    /// `|4⟩ = 6S_{1/2}`: 795 nm ↔ 1367 nm.
    #[serde(rename = "E1367", alias = "e", alias = "E")]
    E1367,
    /// `|4⟩ = 4D_{3/2}`: 795 nm ↔ 1529 nm.
    #[serde(rename = "C1529", alias = "c", alias = "C")]
    C1529,
}

impl std::str::FromStr for Band {
    type Err = QfcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e" | "e1367" | "e-band" => Ok(Band::E1367),
            "c" | "c1529" | "c-band" => Ok(Band::C1529),
            other => Err(QfcError::Config(format!("unknown band tag `{other}`"))),
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Band::E1367 => f.write_str("E1367"),
            Band::C1529 => f.write_str("C1529"),
        }
    }
}

/// Fine-structure line rates, in units of Γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FineStructureRates {
    /// D2 line `5P_{3/2} → 5S_{1/2}` (780 nm); equals 1 by the unit choice.
    pub g780: f64,
    /// D1 line `5P_{1/2} → 5S_{1/2}` (795 nm).
    pub g795: f64,
    /// Driving line `|4⟩ → 5P_{1/2}` (1324 nm or 1476 nm).
    pub drive_line: f64,
    /// Signal line `|4⟩ → 5P_{3/2}` (1367 nm or 1529 nm).
    pub signal_line: f64,
}

/// Squared transition coefficients of the selected sub-Zeeman chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionCoefficients {
    /// `|a_31|²` on the D2 cycling transition.
    pub a31: f64,
    /// `|a_21|²` on the probe transition.
    pub a21: f64,
    /// `|a_42|²` on the driving transition.
    pub a42: f64,
    /// `|a_43|²` on the signal transition.
    pub a43: f64,
}

/// Vacuum wavelengths in nm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavelengths {
    pub probe: f64,
    pub coupling: f64,
    pub drive: f64,
    pub signal: f64,
}

/// How the coherence decay rates `γ_ij` are built from the decay rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoherenceConvention {
    /// Each excited level decays at its full fine-structure rate (decay into
    /// Zeeman levels outside the chain included). Calibrated default.
    #[default]
    FineStructure,
    /// Each excited level decays only through the partial rates of the closed
    /// four-level chain (`Γ_21`, `Γ_31`, `Γ_42 + Γ_43`).
    PartialRates,
}

/// How the coupling-field optical depth `α_c` follows from the probe OD `α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingRule {
    /// `α_c / α = Γ_31 λ_c² / (Γ_21 λ_p²)`, from `|g|² ∝ Γ_partial λ²`.
    #[default]
    DipoleScaling,
    /// `α_c / α = (|a_31|² / |a_21|²) (λ_c / λ_p)²`, resonant cross sections.
    CrossSection,
}

/// Level structure and rate constants of one conversion scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicScheme {
    pub band: Band,
    pub fine_structure: FineStructureRates,
    pub coefficients: TransitionCoefficients,
    pub wavelengths: Wavelengths,
    /// `Γ_21 = |a_21|² Γ_795`.
    pub g21: f64,
    /// `Γ_31 = |a_31|² Γ_780`.
    pub g31: f64,
    /// `Γ_42 = |a_42|² Γ_drive`.
    pub g42: f64,
    /// `Γ_43 = |a_43|² Γ_signal`.
    pub g43: f64,
    pub convention: DecoherenceConvention,
    pub coupling_rule: CouplingRule,
    /// Optional fixed `α_c / α`, bypassing [`CouplingRule`].
    pub alpha_c_ratio: Option<f64>,
    /// Optional fixed `α_s / α`.
    pub alpha_s_ratio: Option<f64>,
    /// Uniform extra dephasing added to every coherence, units of Γ.
    pub gamma_deph: f64,
}

fn mhz(rate: f64) -> f64 {
    rate / GAMMA_UNIT_MHZ
}

impl AtomicScheme {
    fn assemble(
        band: Band,
        fine_structure: FineStructureRates,
        coefficients: TransitionCoefficients,
        wavelengths: Wavelengths,
    ) -> Self {
        Self {
            band,
            fine_structure,
            coefficients,
            wavelengths,
            g21: coefficients.a21 * fine_structure.g795,
            g31: coefficients.a31 * fine_structure.g780,
            g42: coefficients.a42 * fine_structure.drive_line,
            g43: coefficients.a43 * fine_structure.signal_line,
            convention: DecoherenceConvention::default(),
            coupling_rule: CouplingRule::default(),
            alpha_c_ratio: None,
            alpha_s_ratio: None,
            gamma_deph: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let rates = [self.g21, self.g31, self.g42, self.g43];
        if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(QfcError::Config(format!(
                "decay rates must be positive, got Γ21={} Γ31={} Γ42={} Γ43={}",
                self.g21, self.g31, self.g42, self.g43
            )));
        }
        let w = &self.wavelengths;
        if [w.probe, w.coupling, w.drive, w.signal]
            .iter()
            .any(|l| !(l.is_finite() && *l > 0.0))
        {
            return Err(QfcError::Config("wavelengths must be positive".into()));
        }
        if !(self.gamma_deph.is_finite() && self.gamma_deph >= 0.0) {
            return Err(QfcError::Domain(format!(
                "dephasing must be nonnegative, got {}",
                self.gamma_deph
            )));
        }
        for (name, r) in [
            ("alpha_c_override", self.alpha_c_ratio),
            ("alpha_s_override", self.alpha_s_ratio),
        ] {
            if let Some(r) = r {
                if !(r.is_finite() && r >= 0.0) {
                    return Err(QfcError::Config(format!("{name} must be ≥ 0, got {r}")));
                }
            }
        }
        Ok(())
    }

    /// Total decay rate out of level `i` (1-based) under the scheme's convention.
    pub fn total_decay(&self, level: usize) -> f64 {
        let fs = &self.fine_structure;
        match (self.convention, level) {
            (_, 1) => 0.0,
            (DecoherenceConvention::PartialRates, 2) => self.g21,
            (DecoherenceConvention::PartialRates, 3) => self.g31,
            (DecoherenceConvention::PartialRates, 4) => self.g42 + self.g43,
            (DecoherenceConvention::FineStructure, 2) => fs.g795,
            (DecoherenceConvention::FineStructure, 3) => fs.g780,
            (DecoherenceConvention::FineStructure, 4) => fs.drive_line + fs.signal_line,
            _ => panic!("level index {level} out of range 1..=4"),
        }
    }

    pub fn with_convention(mut self, convention: DecoherenceConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_coupling_rule(mut self, rule: CouplingRule) -> Self {
        self.coupling_rule = rule;
        self
    }

    pub fn with_dephasing(mut self, gamma_deph: f64) -> Result<Self> {
        self.gamma_deph = gamma_deph;
        self.validate()?;
        Ok(self)
    }

    /// Decoherence matrix for this scheme and its configured dephasing.
    pub fn gammas(&self) -> GammaMatrix {
        decoherence_rates(self, self.gamma_deph).expect("dephasing validated at construction")
    }

    /// Ratio `α_c / α`.
    pub fn coupling_od_ratio(&self) -> f64 {
        if let Some(r) = self.alpha_c_ratio {
            return r;
        }
        let w = &self.wavelengths;
        let lambda2 = (w.coupling / w.probe).powi(2);
        match self.coupling_rule {
            CouplingRule::DipoleScaling => self.g31 / self.g21 * lambda2,
            CouplingRule::CrossSection => self.coefficients.a31 / self.coefficients.a21 * lambda2,
        }
    }

    /// Ratio `α_s / α = Γ_43 λ_s² / (Γ_21 λ_p²)`.
    pub fn signal_od_ratio(&self) -> f64 {
        if let Some(r) = self.alpha_s_ratio {
            return r;
        }
        let w = &self.wavelengths;
        self.g43 / self.g21 * (w.signal / w.probe).powi(2)
    }

    /// Loads a scheme override file (see [`SchemeOverrides`]).
    pub fn from_override_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let overrides: SchemeOverrides = serde_json::from_str(&text)?;
        overrides.apply()
    }
}

/// Returns the embedded Rb-87 scheme for `band`.
pub fn build_scheme(band: Band) -> AtomicScheme {
    let (drive, signal, a43, drive_nm, signal_nm) = match band {
        Band::E1367 => (1.008, 2.087, 0.5, 1323.88, 1366.87),
        Band::C1529 => (1.703, 0.315, 0.2, 1475.86, 1529.26),
    };
    AtomicScheme::assemble(
        band,
        FineStructureRates {
            g780: 1.0,
            g795: mhz(5.745),
            drive_line: mhz(drive),
            signal_line: mhz(signal),
        },
        TransitionCoefficients {
            a31: 1.0,
            a21: 0.5,
            a42: 0.5,
            a43,
        },
        Wavelengths {
            probe: 794.979,
            coupling: 780.241,
            drive: drive_nm,
            signal: signal_nm,
        },
    )
}

/// Parses a band tag and returns its scheme.
pub fn build_scheme_from_tag(tag: &str) -> Result<AtomicScheme> {
    Ok(build_scheme(tag.parse()?))
}

/// JSON override file. Rates are in MHz (`Γ/2π`), wavelengths in nm; any
/// omitted key keeps the embedded value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeOverrides {
    pub band: Option<Band>,
    /// `[Γ_780, Γ_795, Γ_drive, Γ_signal]` in MHz.
    pub gamma_fs: Option<[f64; 4]>,
    /// `[|a_31|², |a_21|², |a_42|², |a_43|²]`.
    pub coeff_sq: Option<[f64; 4]>,
    /// `[λ_p, λ_c, λ_d, λ_s]` in nm.
    pub lambdas: Option<[f64; 4]>,
    /// Fixed `α_c / α`.
    pub alpha_c_override: Option<f64>,
    /// Fixed `α_s / α`.
    pub alpha_s_override: Option<f64>,
    pub gamma_deph: Option<f64>,
    pub convention: Option<DecoherenceConvention>,
    pub coupling_rule: Option<CouplingRule>,
}

impl SchemeOverrides {
    pub fn apply(&self) -> Result<AtomicScheme> {
        let band = self
            .band
            .ok_or_else(|| QfcError::Config("override file: missing `band`".into()))?;
        let base = build_scheme(band);
        let fs = match self.gamma_fs {
            Some([g780, g795, d, s]) => FineStructureRates {
                g780: mhz(g780),
                g795: mhz(g795),
                drive_line: mhz(d),
                signal_line: mhz(s),
            },
            None => base.fine_structure,
        };
        let coeffs = match self.coeff_sq {
            Some([a31, a21, a42, a43]) => TransitionCoefficients { a31, a21, a42, a43 },
            None => base.coefficients,
        };
        let lambdas = match self.lambdas {
            Some([probe, coupling, drive, signal]) => Wavelengths {
                probe,
                coupling,
                drive,
                signal,
            },
            None => base.wavelengths,
        };
        let mut scheme = AtomicScheme::assemble(band, fs, coeffs, lambdas);
        scheme.alpha_c_ratio = self.alpha_c_override;
        scheme.alpha_s_ratio = self.alpha_s_override;
        scheme.gamma_deph = self.gamma_deph.unwrap_or(0.0);
        scheme.convention = self.convention.unwrap_or_default();
        scheme.coupling_rule = self.coupling_rule.unwrap_or_default();
        scheme.validate()?;
        Ok(scheme)
    }
}

/// Symmetric matrix of coherence decay rates `γ_ij`, levels 1..=4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaMatrix {
    rates: [[f64; 4]; 4],
    pub gamma_deph: f64,
}

impl GammaMatrix {
    /// `γ_ij` with 1-based level indices.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rates[i - 1][j - 1]
    }

    pub fn g21(&self) -> f64 {
        self.get(2, 1)
    }
    pub fn g31(&self) -> f64 {
        self.get(3, 1)
    }
    pub fn g41(&self) -> f64 {
        self.get(4, 1)
    }
    pub fn g32(&self) -> f64 {
        self.get(3, 2)
    }
    pub fn g43(&self) -> f64 {
        self.get(4, 3)
    }
}

/// Builds `γ_ij = Γ_out(i) + Γ_out(j) + γ_deph` for `i ≠ j`.
pub fn decoherence_rates(scheme: &AtomicScheme, gamma_deph: f64) -> Result<GammaMatrix> {
    if !(gamma_deph.is_finite() && gamma_deph >= 0.0) {
        return Err(QfcError::Domain(format!(
            "dephasing must be nonnegative, got {gamma_deph}"
        )));
    }
    let mut rates = [[0.0; 4]; 4];
    for i in 1..=4 {
        for j in 1..=4 {
            if i != j {
                rates[i - 1][j - 1] = scheme.total_decay(i) + scheme.total_decay(j) + gamma_deph;
            }
        }
    }
    Ok(GammaMatrix { rates, gamma_deph })
}

/// Probe, coupling and signal optical depths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingScales {
    pub alpha: f64,
    pub alpha_c: f64,
    pub alpha_s: f64,
}

pub fn od_scalings(scheme: &AtomicScheme, alpha: f64) -> Result<CouplingScales> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(QfcError::Domain(format!("optical depth must be ≥ 0, got {alpha}")));
    }
    Ok(CouplingScales {
        alpha,
        alpha_c: alpha * scheme.coupling_od_ratio(),
        alpha_s: alpha * scheme.signal_od_ratio(),
    })
}

/// Zeroth-order expectation values of the `{|1⟩, |3⟩}` manifold dressed by
/// the coupling field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundManifoldState {
    pub p11: f64,
    pub p33: f64,
    pub c13: C64,
}

impl GroundManifoldState {
    pub fn c31(&self) -> C64 {
        self.c13.conj()
    }
}

pub fn zeroth_order_steady_state(
    scheme: &AtomicScheme,
    gammas: &GammaMatrix,
    delta_c: f64,
    omega_c: C64,
) -> GroundManifoldState {
    let gamma31 = scheme.g31;
    let g31 = gammas.g31();
    assert!(
        gamma31 > 0.0 && g31 > 0.0,
        "Γ31 and γ31 must be positive (got {gamma31}, {g31})"
    );
    let u = omega_c.norm_sqr();
    let base = gamma31 * (g31 * g31 + 4.0 * delta_c * delta_c);
    let den = base + 2.0 * g31 * u;
    let p11 = (base + g31 * u) / den;
    let c13 = C64::i() * gamma31 * C64::new(g31, 2.0 * delta_c) * omega_c / den;
    GroundManifoldState {
        p11,
        p33: 1.0 - p11,
        c13,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn embedded_rates() {
        let e = build_scheme(Band::E1367);
        assert_relative_eq!(e.g31, 1.0);
        assert_relative_eq!(e.g43, 0.5 * 2.087 / 6.063, epsilon = 1e-15);
        assert_relative_eq!(e.g43, 0.17212, epsilon = 2e-5);
        assert_relative_eq!(e.fine_structure.g795, 5.745 / 6.063);
        let c = build_scheme(Band::C1529);
        assert_relative_eq!(c.g43, 0.010391, epsilon = 1e-6);
        assert_relative_eq!(c.g42, 0.5 * 1.703 / 6.063);
    }

    #[test]
    fn unknown_band_is_config_error() {
        assert!(matches!(build_scheme_from_tag("x"), Err(QfcError::Config(_))));
        assert_eq!(build_scheme_from_tag("E").unwrap().band, Band::E1367);
    }

    #[test]
    fn partial_rate_convention() {
        let s = build_scheme(Band::E1367).with_convention(DecoherenceConvention::PartialRates);
        let g = decoherence_rates(&s, 0.0).unwrap();
        assert_relative_eq!(g.g21(), s.g21);
        assert_relative_eq!(g.g21(), 0.47378, epsilon = 1e-5);
        assert_relative_eq!(g.g41(), s.g42 + s.g43);
        assert_relative_eq!(g.g31(), 1.0);
    }

    #[test]
    fn fine_structure_convention() {
        let s = build_scheme(Band::C1529);
        let g = s.gammas();
        assert_relative_eq!(g.g21(), 5.745 / 6.063);
        assert_relative_eq!(g.g41(), (1.703 + 0.315) / 6.063);
        assert_relative_eq!(g.g43(), 1.0 + (1.703 + 0.315) / 6.063);
    }

    #[test]
    fn dephasing_is_additive() {
        for s in [build_scheme(Band::E1367), build_scheme(Band::C1529)] {
            let g0 = decoherence_rates(&s, 0.0).unwrap();
            let g1 = decoherence_rates(&s, 0.1).unwrap();
            for i in 1..=4 {
                for j in 1..=4 {
                    if i != j {
                        assert_relative_eq!(g1.get(i, j) - g0.get(i, j), 0.1, epsilon = 1e-14);
                    }
                    assert_eq!(g1.get(i, j), g1.get(j, i));
                }
            }
        }
        assert!(matches!(
            decoherence_rates(&build_scheme(Band::E1367), -0.1),
            Err(QfcError::Domain(_))
        ));
    }

    #[test]
    fn od_scaling_rules() {
        let s = build_scheme(Band::E1367);
        let zero = od_scalings(&s, 0.0).unwrap();
        assert_eq!((zero.alpha_c, zero.alpha_s), (0.0, 0.0));
        let cs = od_scalings(&s.clone().with_coupling_rule(CouplingRule::CrossSection), 100.0)
            .unwrap();
        assert_relative_eq!(cs.alpha_c, 192.6, epsilon = 0.1);
        let ds = od_scalings(&s, 100.0).unwrap();
        assert_relative_eq!(ds.alpha_c, 203.3, epsilon = 0.1);
        let ds2 = od_scalings(&s, 200.0).unwrap();
        assert_eq!(ds2.alpha_c, 2.0 * ds.alpha_c);
        assert_eq!(ds2.alpha_s, 2.0 * ds.alpha_s);
    }

    #[test]
    fn zeroth_order_examples() {
        let s = build_scheme(Band::E1367);
        let g = s.gammas();
        let off = zeroth_order_steady_state(&s, &g, 3.0, C64::new(0.0, 0.0));
        assert_eq!(off.p11, 1.0);
        assert_eq!(off.c13, C64::new(0.0, 0.0));
        // Γ31 = γ31 = 1, Δc = 2, Ωc = 3
        let st = zeroth_order_steady_state(&s, &g, 2.0, C64::new(3.0, 0.0));
        assert_relative_eq!(st.p11, 26.0 / 35.0, epsilon = 1e-15);
        let sat = zeroth_order_steady_state(&s, &g, 2.0, C64::new(1e8, 0.0));
        assert_relative_eq!(sat.p11, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn override_file_roundtrip() {
        let json = r#"{"band": "C1529", "alpha_c_override": 1.5, "gamma_deph": 0.2}"#;
        let o: SchemeOverrides = serde_json::from_str(json).unwrap();
        let s = o.apply().unwrap();
        assert_eq!(s.band, Band::C1529);
        assert_eq!(s.coupling_od_ratio(), 1.5);
        assert_eq!(s.gamma_deph, 0.2);
        let bad = r#"{"band": "C1529", "nope": 1}"#;
        assert!(serde_json::from_str::<SchemeOverrides>(bad).is_err());
        let neg = r#"{"band": "E1367", "gamma_deph": -1}"#;
        let o: SchemeOverrides = serde_json::from_str(neg).unwrap();
        assert!(o.apply().is_err());
    }
}
