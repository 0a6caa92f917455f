//! Randomized invariants: passivity, complete positivity, uncertainty,
//! phase covariance and tensor multiplicativity.

mod common;

use common::{kron, max_diff};
use diamond_qfc::qubit::{n_qubit_channel, single_rail_channel, Encoding, NQubitState};
use diamond_qfc::state::{
    convert_state, output_variances, phase_rotation, ChannelCoeff, DensityMatrix, InputSpec,
};
use diamond_qfc::{build_scheme, conversion_metrics, transfer_matrix, Band, Controls, Method};
use diamond_qfc::{OperatingPoint, PropagationControls};
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

const CASES: u32 = 1000;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// `G G† / tr G G†` from a random complex matrix.
fn density(max_dim: usize) -> impl Strategy<Value = DensityMatrix> {
    (2..=max_dim)
        .prop_flat_map(|d| proptest::collection::vec(complex(), d * d).prop_map(move |v| (d, v)))
        .prop_map(|(d, v)| {
            let g = DMatrix::from_vec(d, d, v);
            let rho = &g * g.adjoint();
            let t = rho.trace();
            DensityMatrix(rho / t)
        })
        .prop_filter("non-degenerate", |r| r.trace().is_finite())
}

fn coeff() -> impl Strategy<Value = ChannelCoeff> {
    (0.0..=1.0f64, -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(eta, th)| ChannelCoeff::new(C64::from_polar(eta.sqrt(), th)).unwrap())
}

fn controls() -> impl Strategy<Value = Controls> {
    (-150.0..150.0f64, -150.0..150.0f64, -150.0..150.0f64, 0.0..300.0f64, 0.0..80.0f64)
        .prop_map(|(a, b, c, d, e)| Controls::new(a, b, c, d, e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn transfer_matrix_is_passive(c in controls(), od in 0.0..400.0f64, e_band in any::<bool>()) {
        let band = if e_band { Band::E1367 } else { Band::C1529 };
        let point = OperatingPoint::new(&build_scheme(band), od, c).unwrap();
        let t = transfer_matrix(&point, Method::ExactSliced, &PropagationControls::default()).unwrap();
        let m = conversion_metrics(&t);
        prop_assert!(m.t_d + m.eta_d <= 1.0 + 1e-9, "down {} + {}", m.t_d, m.eta_d);
        prop_assert!(m.t_u + m.eta_u <= 1.0 + 1e-9, "up {} + {}", m.t_u, m.eta_u);
    }

    #[test]
    fn conversion_is_completely_positive(rho in density(8), k in coeff(), corrected in any::<bool>()) {
        let out = convert_state(&rho, k, corrected);
        prop_assert!(out.max_hermiticity_error() < 1e-12);
        prop_assert!((out.trace() - rho.trace()).abs() < 1e-12);
        prop_assert!(out.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn uncertainty_products_hold(
        rho in density(8),
        k in coeff(),
        n in 0usize..12,
        beta in complex(),
        r in 0.0..2.0f64,
        phi in -3.0..3.0f64,
    ) {
        let inputs = [
            InputSpec::Fock(n),
            InputSpec::Coherent(beta * 3.0),
            InputSpec::SqueezedCoherent { alpha: beta, r, phi },
            InputSpec::Generic(rho),
        ];
        for input in &inputs {
            for corrected in [true, false] {
                let q = output_variances(input, k, corrected).unwrap();
                prop_assert!(q.product() >= 1.0 / 16.0 - 1e-12, "{input:?}: {q:?}");
            }
        }
    }

    #[test]
    fn conversion_is_phase_covariant(rho in density(8), eta in 0.0..=1.0f64, theta in -3.0..3.0f64) {
        let phased = ChannelCoeff::new(C64::from_polar(eta.sqrt(), theta)).unwrap();
        let plain = ChannelCoeff::from_eta(eta).unwrap();
        let a = convert_state(&rho, phased, false);
        let b = phase_rotation(&convert_state(&rho, plain, false), theta);
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn product_channel_is_multiplicative(
        r1 in density(2),
        r2 in density(2),
        k1 in coeff(),
        k2 in coeff(),
        corrected in any::<bool>(),
    ) {
        let joint = NQubitState::new(kron(&r1.0, &r2.0), Encoding::SingleRail).unwrap();
        let out = n_qubit_channel(&joint, &[k1, k2], corrected).unwrap();
        let m = |r: &DensityMatrix| Matrix2::from_fn(|i, j| r.get(i, j));
        let o1 = single_rail_channel(&m(&r1), k1, corrected).rho;
        let o2 = single_rail_channel(&m(&r2), k2, corrected).rho;
        let d = |x: &Matrix2<C64>| DMatrix::from_fn(2, 2, |i, j| x[(i, j)]);
        prop_assert!(max_diff(&out.rho, &kron(&d(&o1), &d(&o2))) < 1e-12);
    }
}
