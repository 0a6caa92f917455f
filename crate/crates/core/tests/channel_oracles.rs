//! Channel maps against independent beam-splitter and Kraus constructions.

mod common;

use common::{kraus_product, max_diff, random_density, random_state, rng};
use diamond_qfc::qubit::{
    dual_rail_index, embed_dual_rail, epr_postselect, n_qubit_channel, path_channel, polarization_channel,
    postselected_fidelity, single_rail_channel, Encoding, NQubitState,
};
use diamond_qfc::state::{
    convert_coherent, convert_fock, convert_state, loss_channel_oracle, output_variances,
    squeezing_r_from_db, ChannelCoeff, DensityMatrix, InputSpec,
};
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use rand::Rng;

fn etas() -> impl Iterator<Item = f64> {
    (1..=10).map(|k| k as f64 / 10.0)
}

fn to_dmatrix(m: &Matrix2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

#[test]
fn fock_conversion_matches_beam_splitter() {
    for q in 0..=10 {
        for eta in etas() {
            let a = convert_fock(q, eta, q + 1).unwrap();
            let b = loss_channel_oracle(&DensityMatrix::fock(q, q + 1).unwrap(), eta).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-10, "q={q} eta={eta}");
        }
    }
}

#[test]
fn coherent_conversion_matches_beam_splitter() {
    let dim = 40;
    for &(re, im) in &[(0.3, 0.0), (1.0, 0.5), (-1.2, 1.4), (0.0, -2.0), (2.0, 0.0)] {
        let beta = C64::new(re, im);
        for eta in etas() {
            let coeff = ChannelCoeff::from_eta(eta).unwrap();
            let a = convert_coherent(beta, coeff, true, dim).unwrap();
            let b = loss_channel_oracle(&DensityMatrix::coherent(beta, dim).unwrap(), eta).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-10, "beta={beta} eta={eta}");
        }
    }
}

#[test]
fn state_conversion_matches_beam_splitter() {
    let mut r = rng(1);
    for dim in [2, 4, 7, 11] {
        for eta in etas() {
            let rho = random_state(dim, &mut r);
            let a = convert_state(&rho, ChannelCoeff::from_eta(eta).unwrap(), true);
            let b = loss_channel_oracle(&rho, eta).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-10, "dim={dim} eta={eta}");
        }
    }
}

#[test]
fn single_rail_matches_two_level_truncation() {
    let mut r = rng(2);
    for eta in etas() {
        let rho = random_density(2, &mut r);
        let coeff = ChannelCoeff::new(C64::from_polar(eta.sqrt(), r.random_range(-3.0..3.0))).unwrap();
        for corrected in [true, false] {
            let m = Matrix2::from_fn(|i, j| rho[(i, j)]);
            let a = single_rail_channel(&m, coeff, corrected).rho;
            let b = convert_state(&DensityMatrix(rho.clone()), coeff, corrected);
            assert!(max_diff(&to_dmatrix(&a), &b.0) < 1e-12);
            let k = kraus_product(&rho, &[coeff.effective(corrected)]);
            assert!(max_diff(&to_dmatrix(&a), &k) < 1e-12);
        }
    }
}

#[test]
fn path_matches_two_independent_modes() {
    let mut r = rng(3);
    for ed in etas() {
        for eu in etas() {
            let rho = random_density(2, &mut r);
            let cd = ChannelCoeff::new(C64::from_polar(ed.sqrt(), 0.4)).unwrap();
            let cu = ChannelCoeff::new(C64::from_polar(eu.sqrt(), -1.3)).unwrap();
            for corrected in [true, false] {
                let out = path_channel(&Matrix2::from_fn(|i, j| rho[(i, j)]), cd, cu, corrected);
                // |0⟩ = |1_D 0_U⟩ (index 2), |1⟩ = |0_D 1_U⟩ (index 1)
                let mut two = DMatrix::<C64>::zeros(4, 4);
                let at = [2, 1];
                for i in 0..2 {
                    for j in 0..2 {
                        two[(at[i], at[j])] = rho[(i, j)];
                    }
                }
                let k = kraus_product(&two, &[cd.effective(corrected), cu.effective(corrected)]);
                let got = DMatrix::from_fn(4, 4, |i, j| out.two_mode[(i, j)]);
                assert!(max_diff(&got, &k) < 1e-12, "ed={ed} eu={eu}");
            }
        }
    }
}

#[test]
fn polarization_reduces_to_path() {
    let mut r = rng(4);
    for ed in etas() {
        let eu = 1.1 - ed;
        let rho = Matrix2::from_fn({
            let m = random_density(2, &mut r);
            move |i, j| m[(i, j)]
        });
        let cd = ChannelCoeff::new(C64::from_polar(ed.sqrt(), 0.9)).unwrap();
        let cu = ChannelCoeff::new(C64::from_polar(eu.sqrt(), 2.0)).unwrap();
        let pol = polarization_channel(&rho, cd, cu, true);
        let path = path_channel(&rho, cd, cu, true);
        assert!((pol.logical - path.logical).norm() < 1e-14);
        // equal efficiencies: the renormalized logical state is the input
        let k = ChannelCoeff::from_eta(ed).unwrap();
        let same = polarization_channel(&rho, k, k, true).logical;
        assert!((same / C64::new(ed, 0.0) - rho).norm() < 1e-12);
        // without correction the beam splitter phase i stays on ρ01
        let raw = polarization_channel(&rho, ChannelCoeff::from_eta(ed).unwrap(), ChannelCoeff::from_eta(eu).unwrap(), false);
        let expect = C64::i() * (ed * eu).sqrt() * rho[(0, 1)];
        assert!((raw.logical[(0, 1)] - expect).norm() < 1e-14);
    }
}

#[test]
fn n_mode_product_form_matches_kraus() {
    let mut r = rng(5);
    for n in 1..=3 {
        for _ in 0..20 {
            let dim = 1 << n;
            let rho = random_density(dim, &mut r);
            let coeffs: Vec<ChannelCoeff> = (0..n)
                .map(|_| {
                    let eta = r.random_range(0.1..=1.0);
                    ChannelCoeff::new(C64::from_polar(f64::sqrt(eta), r.random_range(-3.0..3.0))).unwrap()
                })
                .collect();
            for corrected in [true, false] {
                let st = NQubitState::new(rho.clone(), Encoding::SingleRail).unwrap();
                let a = n_qubit_channel(&st, &coeffs, corrected).unwrap();
                let ks: Vec<C64> = coeffs.iter().map(|c| c.effective(corrected)).collect();
                assert!(max_diff(&a.rho, &kraus_product(&rho, &ks)) < 1e-12, "n={n}");
            }
        }
    }
}

#[test]
fn dual_rail_embedding_matches_path_channel() {
    let mut r = rng(6);
    let rho = random_density(2, &mut r);
    let cd = ChannelCoeff::from_eta(0.7).unwrap();
    let cu = ChannelCoeff::from_eta(0.3).unwrap();
    // the embedding puts logical |0⟩ on its second mode, as the path map puts it on D
    let st = embed_dual_rail(&rho, Encoding::Path).unwrap();
    let out = n_qubit_channel(&st, &[cu, cd], true).unwrap();
    let path = path_channel(&Matrix2::from_fn(|i, j| rho[(i, j)]), cd, cu, true);
    let at = [dual_rail_index(0, 1), dual_rail_index(1, 1)];
    for i in 0..2 {
        for j in 0..2 {
            assert!((out.rho[(at[i], at[j])] - path.logical[(i, j)]).norm() < 1e-14);
        }
    }
    assert!((out.rho[(0, 0)].re - path.vacuum).abs() < 1e-14);
}

#[test]
fn epr_matches_closed_forms() {
    let mut r = rng(7);
    for _ in 0..200 {
        let e: [f64; 4] = std::array::from_fn(|_| r.random_range(0.05..=1.0));
        let res = epr_postselect(e[0], e[1], e[2], e[3]).unwrap();
        let (a, b) = ((e[0] * e[1]).sqrt(), (e[2] * e[3]).sqrt());
        let norm = a * a + b * b;
        assert!((res.p_c - 0.5 * norm).abs() < 1e-12);
        assert!((res.fidelity - postselected_fidelity(a, b)).abs() < 1e-12);
        // logical |00⟩ = both photons on the B paths
        let expect = [(0, 0, b * b), (0, 3, a * b), (3, 0, a * b), (3, 3, a * a)];
        for (i, j, v) in expect {
            assert!((res.rho_post[(i, j)].re - v / norm).abs() < 1e-12);
        }
    }
}

/// `D(α) S(ξ) |0⟩` from truncated operator exponentials in a large space.
fn squeezed_coherent(alpha: C64, r: f64, phi: f64, dim: usize) -> DensityMatrix {
    let big = dim + 120;
    let mut a = DMatrix::<C64>::zeros(big, big);
    for n in 1..big {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let xi = C64::from_polar(r, phi);
    let half = C64::new(0.5, 0.0);
    let s = ((&a * &a * xi.conj() - &ad * &ad * xi) * half).exp();
    let d = (&ad * alpha - &a * alpha.conj()).exp();
    let psi = d * s.column(0);
    let v: Vec<C64> = psi.iter().take(dim).copied().collect();
    DensityMatrix::pure(&v)
}

fn numeric_variances(rho: &DensityMatrix) -> (f64, f64) {
    let d = rho.dim();
    let (mut a1, mut a2, mut n) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.0);
    for k in 0..d {
        if k + 1 < d {
            a1 += ((k + 1) as f64).sqrt() * rho.get(k + 1, k);
        }
        if k + 2 < d {
            a2 += (((k + 1) * (k + 2)) as f64).sqrt() * rho.get(k + 2, k);
        }
        n += k as f64 * rho.get(k, k).re;
    }
    let vx = 0.25 * (1.0 + 2.0 * n + 2.0 * a2.re) - a1.re * a1.re;
    let vy = 0.25 * (1.0 + 2.0 * n - 2.0 * a2.re) - a1.im * a1.im;
    (vx, vy)
}

#[test]
fn squeezed_variances_match_truncated_operators() {
    // 6 dB needs ~250 photons before the squeezed tail drops below 1e-14
    let dim = 260;
    for (db, phi) in [(3.0, 0.0), (6.0, 0.0), (6.0, 0.7), (4.0, -2.1)] {
        let r = squeezing_r_from_db(db);
        let alpha = C64::new(0.8, -0.3);
        let input = squeezed_coherent(alpha, r, phi, dim);
        assert!((input.trace() - 1.0).abs() < 1e-10);
        for eta in [0.2, 0.55, 0.9, 1.0] {
            for corrected in [true, false] {
                let coeff = ChannelCoeff::new(C64::from_polar(f64::sqrt(eta), 0.6)).unwrap();
                let out = convert_state(&input, coeff, corrected);
                let (vx, vy) = numeric_variances(&out);
                let q = output_variances(&InputSpec::SqueezedCoherent { alpha, r, phi }, coeff, corrected).unwrap();
                assert!((q.var_x - vx).abs() < 1e-8, "db={db} phi={phi} eta={eta}: {} vs {vx}", q.var_x);
                assert!((q.var_y - vy).abs() < 1e-8, "db={db} phi={phi} eta={eta}: {} vs {vy}", q.var_y);
            }
        }
    }
}

