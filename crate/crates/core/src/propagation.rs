//! Probe/signal transfer matrices and conversion metrics.

use serde::{Deserialize, Serialize};

use crate::coupled_mode::coupled_mode_matrix;
use crate::coupling::CouplingField;
use crate::error::{QfcError, Result};
use crate::magnus::magnus_terms;
use crate::mat2::Mat2;
use crate::point::OperatingPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Ordered product of slice exponentials with Richardson refinement.
    #[serde(rename = "exact-sliced")]
    ExactSliced,
    #[serde(rename = "magnus1")]
    Magnus1,
    #[serde(rename = "magnus2")]
    Magnus2,
}

impl std::str::FromStr for Method {
    type Err = QfcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-sliced" | "exact" => Ok(Method::ExactSliced),
            "magnus1" => Ok(Method::Magnus1),
            "magnus2" => Ok(Method::Magnus2),
            other => Err(QfcError::Config(format!("unknown propagation method `{other}`"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ExactSliced => "exact-sliced",
            Method::Magnus1 => "magnus1",
            Method::Magnus2 => "magnus2",
        })
    }
}

/// Discretization knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationControls {
    /// Initial slice count for the sliced product.
    pub slices: usize,
    /// Target change between successive Richardson estimates.
    pub tolerance: f64,
    /// Maximum number of slice doublings.
    pub max_doublings: u32,
    /// Initial Chebyshev node count for the Magnus integrals.
    pub magnus_nodes: usize,
    pub magnus_max_nodes: usize,
    pub magnus_tolerance: f64,
}

impl Default for PropagationControls {
    fn default() -> Self {
        Self {
            slices: 4096,
            tolerance: 1e-8,
            max_doublings: 6,
            magnus_nodes: 32,
            magnus_max_nodes: 2048,
            magnus_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Finest slice count used (sliced method).
    pub slices: Option<usize>,
    /// Chebyshev nodes used (Magnus methods).
    pub nodes: Option<usize>,
    /// Achieved refinement change.
    pub achieved: f64,
    /// Frobenius norm of the second Magnus term (Magnus methods).
    pub omega2_norm: Option<f64>,
}

/// `[[A, B], [C, D]]` mapping `(a_p, a_s)` at the entrance to the exit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub matrix: Mat2,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl TransferMatrix {
    pub fn a(&self) -> num_complex::Complex64 {
        self.matrix.a
    }
    pub fn b(&self) -> num_complex::Complex64 {
        self.matrix.b
    }
    pub fn c(&self) -> num_complex::Complex64 {
        self.matrix.c
    }
    pub fn d(&self) -> num_complex::Complex64 {
        self.matrix.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionMetrics {
    pub t_d: f64,
    pub eta_d: f64,
    pub t_u: f64,
    pub eta_u: f64,
}

pub fn conversion_metrics(t: &TransferMatrix) -> ConversionMetrics {
    let m = &t.matrix;
    ConversionMetrics {
        t_d: m.a.norm_sqr(),
        eta_d: m.c.norm_sqr(),
        t_u: m.d.norm_sqr(),
        eta_u: m.b.norm_sqr(),
    }
}

fn generator<'a>(
    point: &'a OperatingPoint,
    field: &'a CouplingField,
) -> impl Fn(f64) -> Result<Mat2> + 'a {
    move |zeta| coupled_mode_matrix(point, field.omega(zeta)?)
}

fn sliced_product<F: Fn(f64) -> Result<Mat2>>(gen: &F, n: usize) -> Result<Mat2> {
    let h = 1.0 / n as f64;
    let mut t = Mat2::identity();
    for k in 0..n {
        let m = gen((k as f64 + 0.5) * h)?;
        t = m.scale_re(h).exp() * t;
    }
    Ok(t)
}

fn exact_sliced<F: Fn(f64) -> Result<Mat2>>(
    gen: &F,
    controls: &PropagationControls,
) -> Result<TransferMatrix> {
    let mut n = controls.slices.max(1);
    let mut coarse = sliced_product(gen, n)?;
    let mut previous: Option<Mat2> = None;
    let mut achieved = f64::INFINITY;
    for _ in 0..=controls.max_doublings {
        let fine = sliced_product(gen, 2 * n)?;
        // midpoint slicing is symmetric, so its error expands in even powers of h
        let estimate = (fine.scale_re(4.0) - coarse).scale_re(1.0 / 3.0);
        n *= 2;
        coarse = fine;
        if let Some(prev) = previous {
            achieved = estimate.max_abs_diff(&prev);
            if achieved <= controls.tolerance {
                return Ok(TransferMatrix {
                    matrix: estimate,
                    method: Method::ExactSliced,
                    diagnostics: Diagnostics {
                        slices: Some(n),
                        achieved,
                        ..Default::default()
                    },
                });
            }
        }
        previous = Some(estimate);
    }
    Err(QfcError::Convergence {
        what: format!("sliced propagation with {n} slices"),
        achieved,
        requested: controls.tolerance,
    })
}

fn magnus<F: Fn(f64) -> Result<Mat2>>(
    gen: F,
    method: Method,
    controls: &PropagationControls,
) -> Result<TransferMatrix> {
    let terms = magnus_terms(
        gen,
        controls.magnus_nodes,
        controls.magnus_max_nodes,
        controls.magnus_tolerance,
    )?;
    let omega = match method {
        Method::Magnus1 => terms.omega1,
        _ => terms.omega1 + terms.omega2,
    };
    Ok(TransferMatrix {
        matrix: omega.exp(),
        method,
        diagnostics: Diagnostics {
            nodes: Some(terms.nodes),
            achieved: terms.achieved,
            omega2_norm: Some(terms.omega2.norm()),
            ..Default::default()
        },
    })
}

fn propagate(
    point: &OperatingPoint,
    field: &CouplingField,
    method: Method,
    controls: &PropagationControls,
) -> Result<TransferMatrix> {
    let gen = generator(point, field);
    if field.d0 == 0.0 || field.omega_c0 == 0.0 {
        // constant generator: every method reduces to one exponential
        let m = gen(0.0)?;
        return Ok(TransferMatrix {
            matrix: m.exp(),
            method,
            diagnostics: Diagnostics::default(),
        });
    }
    match method {
        Method::ExactSliced => exact_sliced(&gen, controls),
        Method::Magnus1 | Method::Magnus2 => magnus(gen, method, controls),
    }
}

/// Transfer matrix including coupling-field attenuation.
pub fn transfer_matrix(
    point: &OperatingPoint,
    method: Method,
    controls: &PropagationControls,
) -> Result<TransferMatrix> {
    propagate(point, &CouplingField::new(point), method, controls)
}

/// Transfer matrix with the coupling field held at its entrance value.
pub fn nonabsorbing_transfer(
    point: &OperatingPoint,
    method: Method,
    controls: &PropagationControls,
) -> Result<TransferMatrix> {
    propagate(point, &CouplingField::constant(point), method, controls)
}

/// Convenience: down-conversion efficiency with default controls.
pub fn eta_d(point: &OperatingPoint, method: Method) -> Result<f64> {
    Ok(conversion_metrics(&transfer_matrix(point, method, &PropagationControls::default())?).eta_d)
}
