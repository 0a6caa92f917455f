//! First and second Magnus terms of `X' = M(ζ) X` on `ζ ∈ [0, 1]`.
//!
//! `M` is sampled on Chebyshev–Lobatto nodes; indefinite integrals are taken
//! spectrally on the interpolant, so both terms converge geometrically for
//! smooth generators.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::mat2::Mat2;

/// Chebyshev–Lobatto nodes mapped to `[0, 1]`, from `ζ = 1` down to `ζ = 0`.
pub fn lobatto_nodes(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| 0.5 * (1.0 + (PI * j as f64 / n as f64).cos()))
        .collect()
}

/// Interpolant coefficients of values sampled at `lobatto_nodes(n)`.
fn cheb_coeffs(values: &[C64], cos_table: &[f64]) -> Vec<C64> {
    let n = values.len() - 1;
    let two_n = 2 * n;
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    for (k, ck) in c.iter_mut().enumerate() {
        let mut acc = 0.5 * (values[0] + values[n] * if k % 2 == 0 { 1.0 } else { -1.0 });
        for (j, v) in values.iter().enumerate().take(n).skip(1) {
            acc += v * cos_table[(j * k) % two_n];
        }
        *ck = acc * (2.0 / n as f64);
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    c
}

/// Values at the nodes of `∫_{-1}^{x} p(t) dt` for the interpolant `p`.
fn cumulative(values: &[C64], cos_table: &[f64]) -> Vec<C64> {
    let n = values.len() - 1;
    let c = cheb_coeffs(values, cos_table);
    let at = |k: usize| if k <= n { c[k] } else { C64::new(0.0, 0.0) };
    let mut b = vec![C64::new(0.0, 0.0); n + 2];
    b[1] = at(0) - 0.5 * at(2);
    for (k, bk) in b.iter_mut().enumerate().skip(2) {
        *bk = (at(k - 1) - at(k + 1)) / (2.0 * k as f64);
    }
    let mut b0 = C64::new(0.0, 0.0);
    for (k, bk) in b.iter().enumerate().skip(1) {
        b0 -= if k % 2 == 0 { *bk } else { -*bk };
    }
    b[0] = b0;
    let two_n = 2 * n;
    (0..=n)
        .map(|j| {
            b.iter()
                .enumerate()
                .map(|(k, bk)| bk * cos_table[(j * k) % two_n])
                .sum()
        })
        .collect()
}

fn cumulative_mat(samples: &[Mat2], cos_table: &[f64]) -> Vec<Mat2> {
    let entry = |f: fn(&Mat2) -> C64| -> Vec<C64> {
        cumulative(&samples.iter().map(f).collect::<Vec<_>>(), cos_table)
    };
    let a = entry(|m| m.a);
    let b = entry(|m| m.b);
    let c = entry(|m| m.c);
    let d = entry(|m| m.d);
    (0..samples.len())
        .map(|j| Mat2::new(a[j], b[j], c[j], d[j]))
        .collect()
}

/// `(Ω1, Ω2)` from samples of `M` at `lobatto_nodes(n)`.
pub fn magnus_terms_from_samples(samples: &[Mat2]) -> (Mat2, Mat2) {
    let n = samples.len() - 1;
    let cos_table: Vec<f64> = (0..2 * n).map(|m| (PI * m as f64 / n as f64).cos()).collect();
    // ∫_0^ζ M = ½ ∫_{-1}^{x} M
    let omega1: Vec<Mat2> = cumulative_mat(samples, &cos_table)
        .into_iter()
        .map(|m| m.scale_re(0.5))
        .collect();
    let comm: Vec<Mat2> = samples
        .iter()
        .zip(&omega1)
        .map(|(m, o)| m.commutator(o))
        .collect();
    let g = cumulative_mat(&comm, &cos_table);
    // Ω2 = ½ ∫_0^1 [M(s), Ω1(s)] ds, node 0 is ζ = 1
    (omega1[0], g[0].scale_re(0.25))
}

/// Result of an adaptive Magnus evaluation.
#[derive(Debug, Clone, Copy)]
pub struct MagnusTerms {
    pub omega1: Mat2,
    pub omega2: Mat2,
    pub nodes: usize,
    pub achieved: f64,
}

/// Doubles the node count from `start` until `(Ω1, Ω2)` changes by at most
/// `tol` (entrywise, relative to `1 + |Ω|`) or `max_nodes` is reached.
pub fn magnus_terms<F>(generator: F, start: usize, max_nodes: usize, tol: f64) -> Result<MagnusTerms>
where
    F: Fn(f64) -> Result<Mat2>,
{
    let sample = |n: usize| -> Result<(Mat2, Mat2)> {
        let samples = lobatto_nodes(n)
            .into_iter()
            .map(&generator)
            .collect::<Result<Vec<_>>>()?;
        Ok(magnus_terms_from_samples(&samples))
    };
    let mut n = start.max(2);
    let mut prev = sample(n)?;
    let mut achieved = f64::INFINITY;
    while n < max_nodes {
        n *= 2;
        let next = sample(n)?;
        let scale = 1.0 + next.0.norm() + next.1.norm();
        achieved = next.0.max_abs_diff(&prev.0).max(next.1.max_abs_diff(&prev.1)) / scale;
        prev = next;
        if achieved <= tol {
            break;
        }
    }
    Ok(MagnusTerms {
        omega1: prev.0,
        omega2: prev.1,
        nodes: n,
        achieved,
    })
}
