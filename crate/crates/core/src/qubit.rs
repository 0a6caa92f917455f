//! Qubit-level conversion maps: single-rail, path and polarization encodings,
//! the N-mode single-rail channel, EPR post-selection and the CHSH value.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QfcError, Result};
use crate::state::ChannelCoeff;

/// Largest number of single-rail modes handled densely.
pub const MAX_MODES: usize = 12;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    SingleRail,
    Path,
    Polarization,
}

/// Single-rail output and the probability that left the logical subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOutput {
    pub rho: Matrix2<C64>,
    pub leakage: f64,
}

/// Dual-rail output: the full two-mode state over `|m_D m_U⟩`
/// (index `2 m_D + m_U`), its logical block over `{|1_D 0_U⟩, |0_D 1_U⟩}`
/// and the vacuum population.
#[derive(Debug, Clone, PartialEq)]
pub struct DualRailOutput {
    pub two_mode: Matrix4<C64>,
    pub logical: Matrix2<C64>,
    pub vacuum: f64,
}

/// `|0⟩⟨0| ↦ …` map of one single-rail qubit through a loss channel.
pub fn single_rail_channel(rho: &Matrix2<C64>, coeff: ChannelCoeff, corrected: bool) -> QubitOutput {
    let k = coeff.effective(corrected);
    let eta = k.norm_sqr();
    let out = Matrix2::new(
        rho[(0, 0)] + (1.0 - eta) * rho[(1, 1)],
        k.conj() * rho[(0, 1)],
        k * rho[(1, 0)],
        eta * rho[(1, 1)],
    );
    let leakage = 1.0 - out.trace().re - (1.0 - rho.trace().re);
    QubitOutput {
        rho: out,
        leakage: leakage.max(0.0),
    }
}

/// Two spatially separated conversions acting on a path qubit with
/// `|0⟩ = |1_D 0_U⟩`, `|1⟩ = |0_D 1_U⟩`.
pub fn path_channel(
    rho: &Matrix2<C64>,
    coeff_d: ChannelCoeff,
    coeff_u: ChannelCoeff,
    corrected: bool,
) -> DualRailOutput {
    let kd = coeff_d.effective(corrected);
    let ku = coeff_u.effective(corrected);
    let logical = Matrix2::new(
        kd.norm_sqr() * rho[(0, 0)],
        kd * ku.conj() * rho[(0, 1)],
        kd.conj() * ku * rho[(1, 0)],
        ku.norm_sqr() * rho[(1, 1)],
    );
    let vacuum = (rho[(0, 0)] * (1.0 - kd.norm_sqr()) + rho[(1, 1)] * (1.0 - ku.norm_sqr())).re;
    // |1_D 0_U⟩ is index 2, |0_D 1_U⟩ is index 1
    let mut two_mode = Matrix4::zeros();
    two_mode[(0, 0)] = c(vacuum);
    two_mode[(2, 2)] = logical[(0, 0)];
    two_mode[(2, 1)] = logical[(0, 1)];
    two_mode[(1, 2)] = logical[(1, 0)];
    two_mode[(1, 1)] = logical[(1, 1)];
    DualRailOutput {
        two_mode,
        logical,
        vacuum,
    }
}

/// Polarization qubit `|0⟩ = |H⟩`, `|1⟩ = |V⟩`, split by a polarizing beam
/// splitter onto two conversion paths and recombined. The beam splitter
/// adds `±i` to the coherences; with `corrected` the output phase shifters
/// remove both those factors and the coefficient phases.
pub fn polarization_channel(
    rho: &Matrix2<C64>,
    coeff_d: ChannelCoeff,
    coeff_u: ChannelCoeff,
    corrected: bool,
) -> DualRailOutput {
    let i = C64::i();
    let split = if corrected {
        *rho
    } else {
        Matrix2::new(rho[(0, 0)], i * rho[(0, 1)], -i * rho[(1, 0)], rho[(1, 1)])
    };
    path_channel(&split, coeff_d, coeff_u, corrected)
}

/// Dense `2^N × 2^N` single-rail state; mode 1 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct NQubitState {
    pub rho: DMatrix<C64>,
    pub modes: usize,
    pub encoding: Encoding,
}

impl NQubitState {
    pub fn new(rho: DMatrix<C64>, encoding: Encoding) -> Result<Self> {
        let d = rho.nrows();
        if d != rho.ncols() || !d.is_power_of_two() || d < 2 {
            return Err(QfcError::Domain(format!("state dimension {d} is not 2^N")));
        }
        let modes = d.trailing_zeros() as usize;
        if modes > MAX_MODES {
            return Err(QfcError::Resource(format!(
                "{modes} modes exceed the dense limit of {MAX_MODES}"
            )));
        }
        Ok(Self {
            rho,
            modes,
            encoding,
        })
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }
}

/// Per-mode loss applied through the product form: each output element
/// `(m, n)` collects input elements `(q, r)` whose modes either match or
/// both hold a photon that was lost.
pub fn n_qubit_channel(state: &NQubitState, coeffs: &[ChannelCoeff], corrected: bool) -> Result<NQubitState> {
    let n = state.modes;
    if coeffs.len() != n {
        return Err(QfcError::Domain(format!(
            "{} coefficients for {n} modes",
            coeffs.len()
        )));
    }
    let ks: Vec<C64> = coeffs.iter().map(|k| k.effective(corrected)).collect();
    let etas: Vec<f64> = ks.iter().map(|k| k.norm_sqr()).collect();
    let bit = |j: usize| 1usize << (n - 1 - j);
    let dim = 1usize << n;
    let full = dim - 1;
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for m in 0..dim {
        for nn in 0..dim {
            // factor from modes where (m_j, n_j) ≠ (0, 0)
            let mut fixed = c(1.0);
            for j in 0..n {
                let b = bit(j);
                fixed *= match (m & b != 0, nn & b != 0) {
                    (false, false) => c(1.0),
                    (false, true) => ks[j].conj(),
                    (true, false) => ks[j],
                    (true, true) => c(etas[j]),
                };
            }
            let zeros = full & !m & !nn;
            let mut acc = C64::new(0.0, 0.0);
            // enumerate submasks s of the (0,0) modes: those photons were lost
            let mut s = zeros;
            loop {
                let mut lost = 1.0;
                for j in 0..n {
                    if s & bit(j) != 0 {
                        lost *= 1.0 - etas[j];
                    }
                }
                acc += lost * state.rho[(m | s, nn | s)];
                if s == 0 {
                    break;
                }
                s = (s - 1) & zeros;
            }
            out[(m, nn)] = fixed * acc;
        }
    }
    NQubitState::new(out, state.encoding)
}

/// Embeds an N-qubit dual-rail state (`|s⟩ ↦ |s_A (1−s)_B⟩` per qubit) into
/// the `2N`-mode single-rail space, mode order `A1 B1 A2 B2 …`.
pub fn embed_dual_rail(rho: &DMatrix<C64>, encoding: Encoding) -> Result<NQubitState> {
    let d = rho.nrows();
    if !d.is_power_of_two() || d < 2 {
        return Err(QfcError::Domain(format!("state dimension {d} is not 2^N")));
    }
    let n = d.trailing_zeros() as usize;
    if 2 * n > MAX_MODES {
        return Err(QfcError::Resource(format!(
            "{n} dual-rail qubits need {} modes, limit {MAX_MODES}",
            2 * n
        )));
    }
    let index = |s: usize| dual_rail_index(s, n);
    let big = 1usize << (2 * n);
    let mut out = DMatrix::<C64>::zeros(big, big);
    for a in 0..d {
        for b in 0..d {
            out[(index(a), index(b))] = rho[(a, b)];
        }
    }
    NQubitState::new(out, encoding)
}

/// Single-rail index of the dual-rail logical basis state `s` of `n` qubits.
pub fn dual_rail_index(s: usize, n: usize) -> usize {
    let mut idx = 0;
    for q in 0..n {
        let bit = (s >> (n - 1 - q)) & 1;
        idx = (idx << 2) | if bit == 1 { 0b10 } else { 0b01 };
    }
    idx
}

/// Post-selected two-qubit result for a converted `|Φ⁺⟩` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EprResult {
    /// Logical-basis state `{|00⟩, |01⟩, |10⟩, |11⟩}` after post-selection.
    pub rho_post: Matrix4<C64>,
    pub p_c: f64,
    pub fidelity: f64,
    pub s: f64,
    pub eta_bar_a: f64,
    pub eta_bar_b: f64,
    /// Sign of the `|Φ⁺⟩⟨Φ⁻|` coherence: +1, −1 or 0.
    pub branch: f64,
}

pub fn phi_plus() -> Matrix4<C64> {
    bell_projector(0)
}

/// Bell states in the order Φ⁺, Φ⁻, Ψ⁺, Ψ⁻ over `{|00⟩, |01⟩, |10⟩, |11⟩}`.
pub fn bell_basis() -> Matrix4<C64> {
    let h = c(1.0 / SQRT_2);
    let z = c(0.0);
    // columns are the Bell vectors
    Matrix4::new(
        h, h, z, z, //
        z, z, h, h, //
        z, z, h, -h, //
        h, -h, z, z,
    )
}

fn bell_projector(k: usize) -> Matrix4<C64> {
    let b = bell_basis();
    let v = b.column(k);
    v * v.adjoint()
}

/// `ρ` expressed in the Bell basis.
pub fn to_bell_basis(rho: &Matrix4<C64>) -> Matrix4<C64> {
    let b = bell_basis();
    b.adjoint() * rho * b
}

/// Converts `|Φ⁺⟩` through four conversions (`A_i` carries `|1⟩`, `B_i`
/// carries `|0⟩` of qubit `i`) and post-selects one photon per side.
pub fn epr_postselect(eta_a1: f64, eta_a2: f64, eta_b1: f64, eta_b2: f64) -> Result<EprResult> {
    let etas = [eta_a1, eta_a2, eta_b1, eta_b2];
    if etas.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(QfcError::Domain(format!("efficiencies must lie in [0, 1], got {etas:?}")));
    }
    let phi = phi_plus();
    let input = DMatrix::from_fn(4, 4, |i, j| phi[(i, j)]);
    let state = embed_dual_rail(&input, Encoding::Polarization)?;
    // mode order A1 B1 A2 B2
    let coeffs = [eta_a1, eta_b1, eta_a2, eta_b2]
        .map(|e| ChannelCoeff::from_eta(e).expect("range checked"));
    let out = n_qubit_channel(&state, &coeffs, true)?;
    let mut post = Matrix4::<C64>::zeros();
    for a in 0..4 {
        for b in 0..4 {
            post[(a, b)] = out.rho[(dual_rail_index(a, 2), dual_rail_index(b, 2))];
        }
    }
    let p_c = post.trace().re;
    if !(p_c > 0.0) {
        return Err(QfcError::Domain(
            "post-selection undefined: coincidence probability is zero".into(),
        ));
    }
    post /= c(p_c);
    let fidelity = (phi_plus() * post).trace().re.max(0.0).sqrt();
    let coherence = to_bell_basis(&post)[(0, 1)].re;
    let branch = if coherence.abs() < 1e-15 { 0.0 } else { coherence.signum() };
    Ok(EprResult {
        s: chsh_value(&post),
        rho_post: post,
        p_c,
        fidelity,
        eta_bar_a: (eta_a1 * eta_a2).sqrt(),
        eta_bar_b: (eta_b1 * eta_b2).sqrt(),
        branch,
    })
}

/// `F = (η̄_A + η̄_B) / √(2(η̄_A² + η̄_B²))`.
pub fn postselected_fidelity(eta_bar_a: f64, eta_bar_b: f64) -> f64 {
    (eta_bar_a + eta_bar_b) / (2.0 * (eta_bar_a.powi(2) + eta_bar_b.powi(2))).sqrt()
}

/// `S = 2√2 F²`.
pub fn bell_value_from_fidelity(f: f64) -> f64 {
    2.0 * SQRT_2 * f * f
}

fn pauli() -> (Matrix2<C64>, Matrix2<C64>) {
    let sz = Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0));
    let sx = Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0));
    (sz, sx)
}

fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// CHSH operator for `A0 = σz`, `A1 = σx`, `B0,1 = (σz ± σx)/√2`.
pub fn chsh_operator() -> Matrix4<C64> {
    let (sz, sx) = pauli();
    let b0 = (sz + sx) / c(SQRT_2);
    let b1 = (sz - sx) / c(SQRT_2);
    kron2(&sz, &b0) + kron2(&sz, &b1) + kron2(&sx, &b0) - kron2(&sx, &b1)
}

pub fn chsh_value(rho: &Matrix4<C64>) -> f64 {
    (chsh_operator() * rho).trace().re
}

/// `F² |Φ⁺⟩⟨Φ⁺| + (1 − F²) |Φ⁻⟩⟨Φ⁻| + sign F√(1 − F²) (|Φ⁺⟩⟨Φ⁻| + h.c.)`
/// in the computational basis.
pub fn fidelity_family_state(f: f64, sign: f64) -> Matrix4<C64> {
    let b = bell_basis();
    let mut bell = Matrix4::<C64>::zeros();
    bell[(0, 0)] = c(f * f);
    bell[(1, 1)] = c(1.0 - f * f);
    let off = sign.signum() * f * (1.0 - f * f).max(0.0).sqrt();
    bell[(0, 1)] = c(off);
    bell[(1, 0)] = c(off);
    b * bell * b.adjoint()
}

/// One point of the post-selected fidelity surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub eta_bar_a: f64,
    pub eta_bar_b: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

/// `F` and `S` on the grid `axis × axis`, skipping the origin.
pub fn epr_surface(axis: &[f64]) -> Vec<SurfacePoint> {
    let pairs: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&a| axis.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| a > 0.0 || b > 0.0)
        .collect();
    pairs
        .par_iter()
        .map(|&(a, b)| {
            let f = postselected_fidelity(a, b);
            SurfacePoint {
                eta_bar_a: a,
                eta_bar_b: b,
                f,
                s: bell_value_from_fidelity(f),
            }
        })
        .collect()
}
