#![allow(dead_code)]

use diamond_qfc::state::DensityMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `G G† / tr` for a complex Gaussian-ish `G`.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let g = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}

pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    DensityMatrix(random_density(dim, rng))
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Amplitude-damping Kraus pair of one single-rail mode with coefficient `c`.
pub fn kraus(c: C64) -> [DMatrix<C64>; 2] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let loss = C64::new((1.0 - c.norm_sqr()).max(0.0).sqrt(), 0.0);
    [
        DMatrix::from_row_slice(2, 2, &[one, z, z, c]),
        DMatrix::from_row_slice(2, 2, &[z, loss, z, z]),
    ]
}

/// Applies one Kraus channel per mode, mode 0 being the most significant.
pub fn kraus_product(rho: &DMatrix<C64>, coeffs: &[C64]) -> DMatrix<C64> {
    let n = coeffs.len();
    let mut out = rho.clone();
    for (j, &c) in coeffs.iter().enumerate() {
        let left = DMatrix::<C64>::identity(1 << j, 1 << j);
        let right = DMatrix::<C64>::identity(1 << (n - 1 - j), 1 << (n - 1 - j));
        let mut next = DMatrix::<C64>::zeros(out.nrows(), out.ncols());
        for k in kraus(c) {
            let full = kron(&kron(&left, &k), &right);
            next += &full * &out * full.adjoint();
        }
        out = next;
    }
    out
}
