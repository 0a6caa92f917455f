//! Single-mode quantum channel induced by one transfer-matrix coefficient.
//!
//! The converted field is `a_out = c · a_in + (vacuum noise)`, with `c = C(0)`
//! for down-conversion and `c = B(0)` for up-conversion. States live in a
//! truncated Fock basis `{|0⟩ … |N⟩}`.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QfcError, Result};

/// Default truncation `N_max`.
pub const DEFAULT_NMAX: usize = 16;
/// Largest tolerated probability outside the truncated basis.
pub const LEAKAGE_LIMIT: f64 = 1e-8;
/// Largest `N_max` for the two-mode beam-splitter oracle.
pub const ORACLE_NMAX: usize = 64;

/// Complex Hermitian matrix in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub DMatrix<C64>);

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.0[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.0[(k, k)].re).collect()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &[C64]) -> Self {
        let n = psi.len();
        Self(DMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(QfcError::Truncation {
                leakage: 1.0,
                limit: LEAKAGE_LIMIT,
                dim,
            });
        }
        let mut psi = vec![C64::new(0.0, 0.0); dim];
        psi[n] = C64::new(1.0, 0.0);
        Ok(Self::pure(&psi))
    }

    /// Coherent state `|β⟩` truncated at `dim`; errors when the omitted
    /// probability reaches [`LEAKAGE_LIMIT`].
    pub fn coherent(beta: C64, dim: usize) -> Result<Self> {
        let (psi, leak) = coherent_amplitudes(beta, dim);
        if leak >= LEAKAGE_LIMIT {
            return Err(QfcError::Truncation {
                leakage: leak,
                limit: LEAKAGE_LIMIT,
                dim,
            });
        }
        Ok(Self::pure(&psi))
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(*v))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.0 - &other.0).iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Same state in a larger (or equal) basis.
    pub fn padded(&self, dim: usize) -> Self {
        let d = self.dim().min(dim);
        let mut out = DMatrix::zeros(dim, dim);
        out.view_mut((0, 0), (d, d)).copy_from(&self.0.view((0, 0), (d, d)));
        Self(out)
    }

    pub fn to_json(&self) -> DensityMatrixJson {
        let d = self.dim();
        DensityMatrixJson {
            dim: d,
            entries: (0..d * d)
                .map(|k| {
                    let v = self.0[(k / d, k % d)];
                    [v.re, v.im]
                })
                .collect(),
        }
    }

    pub fn from_json(j: &DensityMatrixJson) -> Result<Self> {
        if j.dim == 0 || j.entries.len() != j.dim * j.dim {
            return Err(QfcError::Config(format!(
                "state: expected {} entries for dim {}, got {}",
                j.dim * j.dim,
                j.dim,
                j.entries.len()
            )));
        }
        let d = j.dim;
        Ok(Self(DMatrix::from_fn(d, d, |r, c| {
            let [re, im] = j.entries[r * d + c];
            C64::new(re, im)
        })))
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let j: DensityMatrixJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::from_json(&j)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_json())?)?;
        Ok(())
    }
}

/// On-disk state layout: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityMatrixJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

/// Fock amplitudes of `|β⟩` up to `dim − 1` and the omitted probability.
pub fn coherent_amplitudes(beta: C64, dim: usize) -> (Vec<C64>, f64) {
    let mut psi = Vec::with_capacity(dim);
    let mut amp = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        psi.push(amp);
        amp = amp * beta / ((n + 1) as f64).sqrt();
    }
    // tail from the next term on, summed until negligible
    let mut tail = 0.0;
    let mut p = amp.norm_sqr();
    let mut n = dim;
    let mean = beta.norm_sqr();
    loop {
        tail += p;
        n += 1;
        p *= mean / n as f64;
        if p < 1e-18 * tail.max(1e-300) && (n as f64) > mean || p == 0.0 {
            break;
        }
    }
    (psi, tail)
}

/// Smallest dimension (at least `DEFAULT_NMAX + 1`) holding `|β⟩` to
/// within [`LEAKAGE_LIMIT`].
pub fn coherent_dim(beta: C64) -> usize {
    let mut dim = DEFAULT_NMAX + 1;
    while coherent_amplitudes(beta, dim).1 >= LEAKAGE_LIMIT {
        dim += 1;
    }
    dim
}

/// A mode-conversion coefficient (`C(0)` or `B(0)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelCoeff {
    pub value: C64,
}

impl ChannelCoeff {
    pub fn new(value: C64) -> Result<Self> {
        if !(value.is_finite() && value.norm_sqr() <= 1.0 + 1e-12) {
            return Err(QfcError::Domain(format!("|coeff|² must be ≤ 1, got {value}")));
        }
        Ok(Self { value })
    }

    /// Real coefficient `√η`.
    pub fn from_eta(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(QfcError::Domain(format!("η must lie in [0, 1], got {eta}")));
        }
        Ok(Self {
            value: C64::new(eta.sqrt(), 0.0),
        })
    }

    pub fn eta(&self) -> f64 {
        self.value.norm_sqr()
    }

    pub fn phase(&self) -> f64 {
        self.value.arg()
    }

    /// Coefficient after a phase shifter removing its phase.
    pub fn corrected(&self) -> Self {
        Self {
            value: C64::new(self.value.norm(), 0.0),
        }
    }

    pub fn effective(&self, corrected: bool) -> C64 {
        if corrected {
            self.corrected().value
        } else {
            self.value
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    Fock(usize),
    Coherent(C64),
    /// Displacement `α` and squeezing `ξ = r e^{iφ}`.
    SqueezedCoherent { alpha: C64, r: f64, phi: f64 },
    Generic(DensityMatrix),
}

/// Quadrature variances with vacuum value ¼.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub var_x: f64,
    pub var_y: f64,
}

impl QuadratureResult {
    pub fn product(&self) -> f64 {
        self.var_x * self.var_y
    }
}

/// Squeezing parameter `r` giving `db` decibels below vacuum in `X`.
pub fn squeezing_r_from_db(db: f64) -> f64 {
    db * std::f64::consts::LN_10 / 10.0
}

/// `(⟨a⟩, ⟨a²⟩, ⟨a†a⟩)` of a truncated state.
fn moments(rho: &DensityMatrix) -> (C64, C64, f64) {
    let d = rho.dim();
    let mut a1 = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    let mut n = 0.0;
    for k in 0..d {
        // tr(a ρ) = Σ √(k+1) ρ_{k+1,k}
        if k + 1 < d {
            a1 += ((k + 1) as f64).sqrt() * rho.get(k + 1, k);
        }
        if k + 2 < d {
            a2 += (((k + 1) * (k + 2)) as f64).sqrt() * rho.get(k + 2, k);
        }
        n += k as f64 * rho.get(k, k).re;
    }
    (a1, a2, n)
}

/// Quadrature variances of the converted mode.
pub fn output_variances(
    input: &InputSpec,
    coeff: ChannelCoeff,
    corrected: bool,
) -> Result<QuadratureResult> {
    let c = coeff.effective(corrected);
    let eta = c.norm_sqr();
    let vac = 0.25 * (1.0 - eta);
    Ok(match input {
        InputSpec::Fock(n) => {
            let v = 0.25 * (1.0 - eta + (1.0 + 2.0 * *n as f64) * eta);
            QuadratureResult { var_x: v, var_y: v }
        }
        InputSpec::Coherent(_) => QuadratureResult {
            var_x: 0.25,
            var_y: 0.25,
        },
        InputSpec::SqueezedCoherent { r, phi, .. } => {
            let cross = 0.5 * (c * c * C64::from_polar(1.0, *phi)).re * 2.0 * (2.0 * r).sinh();
            let base = 1.0 + eta * ((2.0 * r).cosh() - 1.0);
            QuadratureResult {
                var_x: 0.25 * (base - cross),
                var_y: 0.25 * (base + cross),
            }
        }
        InputSpec::Generic(rho) => {
            let leak = (1.0 - rho.trace()).abs();
            if leak >= LEAKAGE_LIMIT {
                return Err(QfcError::Truncation {
                    leakage: leak,
                    limit: LEAKAGE_LIMIT,
                    dim: rho.dim(),
                });
            }
            let (a1, a2, n) = moments(rho);
            let sym = 2.0 * (c * c * a2).re;
            let mean = c * a1;
            QuadratureResult {
                var_x: 0.25 * (sym + eta * (2.0 * n + 1.0) - 4.0 * mean.re * mean.re) + vac,
                var_y: -0.25 * (sym - eta * (2.0 * n + 1.0) + 4.0 * mean.im * mean.im) + vac,
            }
        }
    })
}

fn factorial_sqrt_ratio(top: usize, bottom: usize) -> f64 {
    // √(top! / bottom!) for top ≥ bottom
    ((bottom + 1)..=top).map(|k| (k as f64).sqrt()).product()
}

/// `tr{(c* a†)^p (c a)^q ρ}`.
fn normal_moment(rho: &DensityMatrix, c: C64, p: usize, q: usize) -> C64 {
    let d = rho.dim();
    let mut acc = C64::new(0.0, 0.0);
    let mut k = 0;
    while k + p.max(q) < d {
        let w = factorial_sqrt_ratio(k + q, k) * factorial_sqrt_ratio(k + p, k);
        acc += w * rho.get(k + q, k + p);
        k += 1;
    }
    acc * c.powu(q as u32) * c.conj().powu(p as u32)
}

/// Converted state. The normally ordered vacuum-projector series is summed
/// over the total photon loss `j = k + l`, where its alternating inner sum
/// collapses to `(1 − |c|²)^j / j!`:
/// `ρ'_{mn} = c^m c*^n Σ_j √(C(m+j, j) C(n+j, j)) (1 − |c|²)^j ρ_{m+j, n+j}`.
/// Every term is non-negative in weight, so this stays accurate at any
/// truncation.
pub fn convert_state(rho: &DensityMatrix, coeff: ChannelCoeff, corrected: bool) -> DensityMatrix {
    let c = coeff.effective(corrected);
    let loss = (1.0 - c.norm_sqr()).max(0.0);
    let d = rho.dim();
    let mut out = DMatrix::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            // √C(m+j, j) √C(n+j, j) (1−|c|²)^j built up term by term
            let mut w = 1.0;
            for j in 0..d - m.max(n) {
                if j > 0 {
                    w *= loss * (((m + j) * (n + j)) as f64).sqrt() / j as f64;
                }
                if w == 0.0 {
                    break;
                }
                acc += w * rho.get(m + j, n + j);
            }
            out[(m, n)] = acc * c.powu(m as u32) * c.conj().powu(n as u32);
        }
    }
    DensityMatrix(out)
}

/// The normally ordered expansion evaluated term by term,
/// `ρ'_{mn} = Σ_l (−1)^l / (l! √(m! n!)) tr{(c* a†)^{l+n} (c a)^{l+m} ρ}`.
/// Exact in exact arithmetic; the alternating sum loses precision once the
/// truncation exceeds a few tens of photons. [`convert_state`] is the
/// regrouped, stable form.
pub fn convert_state_series(rho: &DensityMatrix, coeff: ChannelCoeff, corrected: bool) -> DensityMatrix {
    let c = coeff.effective(corrected);
    let d = rho.dim();
    let mut out = DMatrix::zeros(d, d);
    let inv_fact: Vec<f64> = (0..d)
        .scan(1.0, |f, k| {
            if k > 0 {
                *f /= k as f64;
            }
            Some(*f)
        })
        .collect();
    for m in 0..d {
        for n in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..d - m.max(n) {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * inv_fact[l] * normal_moment(rho, c, l + n, l + m);
            }
            out[(m, n)] = acc * (inv_fact[m] * inv_fact[n]).sqrt();
        }
    }
    DensityMatrix(out)
}

/// Converted Fock state `|q⟩`: binomial photon-number distribution.
pub fn convert_fock(q: usize, eta: f64, dim: usize) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(QfcError::Domain(format!("η must lie in [0, 1], got {eta}")));
    }
    if q >= dim {
        return Err(QfcError::Truncation {
            leakage: 1.0,
            limit: LEAKAGE_LIMIT,
            dim,
        });
    }
    let mut out = DensityMatrix::zeros(dim);
    let mut binom = 1.0;
    for n in 0..=q {
        if n > 0 {
            binom *= (q - n + 1) as f64 / n as f64;
        }
        // 0^0 = 1 covers the η = 1 and η = 0 edges
        out.0[(n, n)] = C64::new(binom * eta.powi(n as i32) * (1.0 - eta).powi((q - n) as i32), 0.0);
    }
    Ok(out)
}

/// Converted coherent state `|c β⟩`.
pub fn convert_coherent(
    beta: C64,
    coeff: ChannelCoeff,
    corrected: bool,
    dim: usize,
) -> Result<DensityMatrix> {
    DensityMatrix::coherent(coeff.effective(corrected) * beta, dim)
}

/// `√⟨ψ|ρ|ψ⟩`.
pub fn fidelity(rho: &DensityMatrix, psi: &[C64]) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(QfcError::Domain(format!(
            "reference has {} amplitudes, state has dimension {}",
            psi.len(),
            rho.dim()
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * rho.get(i, j) * psi[j];
        }
    }
    Ok(acc.re.max(0.0).sqrt())
}

/// `√η^q`.
pub fn fock_fidelity(q: usize, eta: f64) -> f64 {
    eta.sqrt().powi(q as i32)
}

/// `exp(−½|β|²(1 − √η)²)` for a phase-corrected channel.
pub fn coherent_fidelity(beta: C64, eta: f64) -> f64 {
    (-0.5 * beta.norm_sqr() * (1.0 - eta.sqrt()).powi(2)).exp()
}

/// `e^{iθ a†a} ρ e^{−iθ a†a}`.
pub fn phase_rotation(rho: &DensityMatrix, theta: f64) -> DensityMatrix {
    let d = rho.dim();
    DensityMatrix(DMatrix::from_fn(d, d, |m, n| {
        rho.get(m, n) * C64::from_polar(1.0, theta * (m as f64 - n as f64))
    }))
}

/// `Σ_l (−1)^l / l! a†^l a^l` in the truncated basis.
pub fn vacuum_projector_series(dim: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        // ⟨i| a†^l a^l |i⟩ = i! / (i − l)!
        let mut term = 1.0;
        let mut sum = 1.0;
        for l in 1..=i {
            term *= -((i - l + 1) as f64) / l as f64;
            sum += term;
        }
        out[(i, i)] = sum;
    }
    out
}

/// Converted state through an explicit beam splitter of transmissivity
/// `η` with a vacuum ancilla, followed by a partial trace over the ancilla.
pub fn loss_channel_oracle(rho: &DensityMatrix, eta: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(QfcError::Domain(format!("η must lie in [0, 1], got {eta}")));
    }
    let d = rho.dim();
    if d - 1 > ORACLE_NMAX {
        return Err(QfcError::Resource(format!(
            "two-mode oracle limited to N_max ≤ {ORACLE_NMAX}, got {}",
            d - 1
        )));
    }
    // θ (a† b − a b†) with cos θ = √η conserves a†a + b†b, so each total
    // photon number N is exponentiated on its own basis |k, N−k⟩
    let theta = eta.sqrt().acos();
    let blocks: Vec<DMatrix<f64>> = (0..d)
        .map(|n| {
            let mut gen = DMatrix::<f64>::zeros(n + 1, n + 1);
            for a in 0..n {
                let b = n - a;
                let v = theta * ((a + 1) as f64 * b as f64).sqrt();
                gen[(a + 1, a)] += v;
                gen[(a, a + 1)] -= v;
            }
            gen.exp()
        })
        .collect();
    // ⟨m, k| U |m+k, 0⟩ from block m+k
    let amp = |m: usize, k: usize| blocks[m + k][(m, m + k)];
    let mut out = DMatrix::<C64>::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            // trace over k photons in the loss port
            for k in 0..d - m.max(n) {
                acc += amp(m, k) * rho.get(m + k, n + k) * amp(n, k);
            }
            out[(m, n)] = acc;
        }
    }
    Ok(DensityMatrix(out))
}

/// One row of the fidelity-versus-efficiency curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityCurvePoint {
    pub eta: f64,
    #[serde(rename = "F_fock1")]
    pub fock1: f64,
    #[serde(rename = "F_coh1")]
    pub coh1: f64,
    /// Coherent input with a mean photon number of 10.
    #[serde(rename = "F_coh10")]
    pub coh10: f64,
}

/// Fidelities of converted `|1⟩`, `|β=1⟩` and `|β=√10⟩` inputs, computed
/// from the converted states (phase-corrected coherent channels).
pub fn fidelity_curves(etas: &[f64]) -> Result<Vec<FidelityCurvePoint>> {
    let coherent_fid = |beta: C64, coeff: ChannelCoeff| -> Result<f64> {
        // well past the leakage limit so truncation stays below 1e-15
        let dim = coherent_dim(beta) + 24;
        let out = convert_coherent(beta, coeff, true, dim)?;
        fidelity(&out, &coherent_amplitudes(beta, dim).0)
    };
    etas.iter()
        .map(|&eta| {
            let coeff = ChannelCoeff::from_eta(eta)?;
            let one = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
            Ok(FidelityCurvePoint {
                eta,
                fock1: fidelity(&convert_fock(1, eta, 2)?, &one)?,
                coh1: coherent_fid(C64::new(1.0, 0.0), coeff)?,
                coh10: coherent_fid(C64::new(10f64.sqrt(), 0.0), coeff)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn re(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn fock_variances() {
        let c = ChannelCoeff::from_eta(0.5).unwrap();
        let v = output_variances(&InputSpec::Fock(1), c, true).unwrap();
        assert_relative_eq!(v.var_x, 0.5, epsilon = 1e-15);
        let generic = InputSpec::Generic(DensityMatrix::fock(1, 5).unwrap());
        let g = output_variances(&generic, c, true).unwrap();
        assert_relative_eq!(g.var_x, 0.5, epsilon = 1e-14);
        assert_relative_eq!(g.var_y, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn coherent_variances_are_vacuum() {
        let c = ChannelCoeff::new(C64::from_polar(0.7, 1.1)).unwrap();
        let v = output_variances(&InputSpec::Coherent(C64::new(1.5, -0.5)), c, false).unwrap();
        assert_eq!((v.var_x, v.var_y), (0.25, 0.25));
        let rho = DensityMatrix::coherent(C64::new(1.5, -0.5), 40).unwrap();
        let g = output_variances(&InputSpec::Generic(rho), c, false).unwrap();
        assert_relative_eq!(g.var_x, 0.25, epsilon = 1e-10);
        assert_relative_eq!(g.var_y, 0.25, epsilon = 1e-10);
    }

    #[test]
    fn six_db_squeezing() {
        let r = squeezing_r_from_db(6.0);
        let c = ChannelCoeff::from_eta(1.0).unwrap();
        let spec = InputSpec::SqueezedCoherent {
            alpha: re(0.0),
            r,
            phi: 0.0,
        };
        let v = output_variances(&spec, c, true).unwrap();
        assert_relative_eq!(v.var_x, 0.25 * 10f64.powf(-1.2), epsilon = 1e-15);
        assert_relative_eq!(v.var_x, 0.015774, epsilon = 1e-6);
        let half = output_variances(&spec, ChannelCoeff::from_eta(0.4).unwrap(), true).unwrap();
        assert_relative_eq!(half.var_x, 0.25 * (0.6 + 0.4 * (-2.0 * r).exp()), epsilon = 1e-15);
        assert_relative_eq!(half.var_y, 0.25 * (0.6 + 0.4 * (2.0 * r).exp()), epsilon = 1e-14);
    }

    #[test]
    fn identity_channel() {
        let psi: Vec<C64> = (0..6).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let norm = psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let rho = DensityMatrix::pure(&psi.iter().map(|v| v / norm).collect::<Vec<_>>());
        let out = convert_state(&rho, ChannelCoeff::from_eta(1.0).unwrap(), true);
        assert!(out.max_abs_diff(&rho) < 1e-13);
    }

    #[test]
    fn single_photon_and_three_photons() {
        let eta = 0.3;
        let one = convert_state(&DensityMatrix::fock(1, 4).unwrap(), ChannelCoeff::from_eta(eta).unwrap(), true);
        assert_relative_eq!(one.get(0, 0).re, 0.7, epsilon = 1e-15);
        assert_relative_eq!(one.get(1, 1).re, 0.3, epsilon = 1e-15);
        let three = convert_fock(3, 0.5, 4).unwrap();
        assert_eq!(three.diagonal(), vec![0.125, 0.375, 0.375, 0.125]);
        let kron = convert_fock(4, 1.0, 6).unwrap();
        assert_eq!(kron.diagonal(), vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let oracle = loss_channel_oracle(&DensityMatrix::fock(3, 4).unwrap(), 0.5).unwrap();
        assert!(oracle.max_abs_diff(&three) < 1e-13);
    }

    #[test]
    fn coherent_conversion_and_fidelity() {
        let c = ChannelCoeff::from_eta(0.81).unwrap();
        let out = convert_coherent(re(1.0), c, true, 20).unwrap();
        let (target, _) = coherent_amplitudes(re(0.9), 20);
        assert_relative_eq!(fidelity(&out, &target).unwrap(), 1.0, epsilon = 1e-12);
        let (input, _) = coherent_amplitudes(re(1.0), 20);
        let f = fidelity(&out, &input).unwrap();
        assert_relative_eq!(f, (-0.005f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(f, 0.995012, epsilon = 1e-6);
        assert_relative_eq!(coherent_fidelity(re(1.0), 0.81), f, epsilon = 1e-12);
        let vac = convert_coherent(re(1.3), ChannelCoeff::from_eta(0.0).unwrap(), true, 5).unwrap();
        assert_eq!(vac.get(0, 0), re(1.0));
        assert!(matches!(
            DensityMatrix::coherent(re(4.0), 10),
            Err(QfcError::Truncation { .. })
        ));
    }

    #[test]
    fn fock_fidelity_values() {
        assert_relative_eq!(fock_fidelity(1, 0.81), 0.9, epsilon = 1e-15);
        let out = convert_fock(2, 0.6, 3).unwrap();
        let psi = [re(0.0), re(0.0), re(1.0)];
        assert_relative_eq!(fidelity(&out, &psi).unwrap(), fock_fidelity(2, 0.6), epsilon = 1e-15);
        assert!(coherent_fidelity(re(10.0), 0.7) < coherent_fidelity(re(1.0), 0.7));
    }

    #[test]
    fn vacuum_series_is_projector() {
        let p = vacuum_projector_series(17);
        for i in 0..17 {
            let expected = if i == 0 { 1.0 } else { 0.0 };
            assert!((p[(i, i)] - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn oracle_zero_transmission_is_vacuum() {
        let rho = DensityMatrix::coherent(C64::new(0.5, 0.5), 12).unwrap();
        let out = loss_channel_oracle(&rho, 0.0).unwrap();
        assert!((out.get(0, 0).re - rho.trace()).abs() < 1e-12);
        assert!(out.diagonal()[1..].iter().all(|p| p.abs() < 1e-14));
        assert!(matches!(
            loss_channel_oracle(&DensityMatrix::zeros(ORACLE_NMAX + 2), 0.5),
            Err(QfcError::Resource(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let rho = DensityMatrix::coherent(C64::new(0.3, -0.2), 6).unwrap();
        let back = DensityMatrix::from_json(&rho.to_json()).unwrap();
        assert_eq!(back, rho);
        let bad = DensityMatrixJson {
            dim: 2,
            entries: vec![[1.0, 0.0]],
        };
        assert!(DensityMatrix::from_json(&bad).is_err());
    }
    #[test]
    fn series_and_regrouped_forms_agree() {
        let beta = C64::new(0.9, -0.6);
        let mut rho = DensityMatrix::coherent(beta, 12).unwrap();
        rho.0[(1, 4)] += C64::new(0.01, 0.02);
        rho.0[(4, 1)] += C64::new(0.01, -0.02);
        for eta in [0.0, 0.3, 0.77, 1.0] {
            let coeff = ChannelCoeff::new(C64::from_polar(f64::sqrt(eta), 0.8)).unwrap();
            for corrected in [true, false] {
                let a = convert_state(&rho, coeff, corrected);
                let b = convert_state_series(&rho, coeff, corrected);
                assert!(a.max_abs_diff(&b) < 1e-12, "eta={eta}");
            }
        }
    }
}
