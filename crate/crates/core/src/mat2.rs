//! Fixed-size 2×2 complex matrices with a closed-form exponential.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Below this `|tr² − 4 det|` the exponential switches to a series form.
pub const DISCRIMINANT_FLOOR: f64 = 1e-8;

/// Row-major `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        Self::new(one, C64::default(), C64::default(), one)
    }

    pub fn scalar(s: C64) -> Self {
        Self::new(s, C64::default(), C64::default(), s)
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.conj(), self.b.conj(), self.c.conj(), self.d.conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        [
            (self.a - other.a).norm(),
            (self.b - other.b).norm(),
            (self.c - other.c).norm(),
            (self.d - other.d).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Eigenvalues, from the characteristic polynomial.
    pub fn eigenvalues(&self) -> [C64; 2] {
        let half_tr = self.trace() * 0.5;
        let root = (half_tr * half_tr - self.det()).sqrt();
        [half_tr + root, half_tr - root]
    }

    /// Largest singular value squared.
    pub fn spectral_norm_sqr(&self) -> f64 {
        let g = self.adjoint() * *self;
        let tr = g.trace().re;
        let det = g.det().re;
        0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt())
    }

    /// `exp(self)`.
    ///
    /// With `μ = tr/2` and `N = self − μ I`, `N² = q I` where `q = μ² − det`,
    /// so `exp = e^μ (cosh√q I + sinh√q/√q N)`. Near `q = 0` both functions
    /// are summed as Taylor series in `q`.
    pub fn exp(&self) -> Mat2 {
        let mu = self.trace() * 0.5;
        let n = *self - Mat2::scalar(mu);
        let q = mu * mu - self.det();
        let (ch, sh_over) = if (4.0 * q).norm() < DISCRIMINANT_FLOOR {
            cosh_sinhc_series(q)
        } else {
            let s = q.sqrt();
            (s.cosh(), s.sinh() / s)
        };
        (Mat2::scalar(ch) + n.scale(sh_over)).scale(mu.exp())
    }
}

/// `(cosh√q, sinh√q/√q)` as power series in `q`.
fn cosh_sinhc_series(q: C64) -> (C64, C64) {
    let mut ch = C64::new(1.0, 0.0);
    let mut sh = C64::new(1.0, 0.0);
    let mut term_c = C64::new(1.0, 0.0);
    let mut term_s = C64::new(1.0, 0.0);
    for k in 1..8 {
        let k = k as f64;
        term_c = term_c * q / ((2.0 * k - 1.0) * (2.0 * k));
        term_s = term_s * q / ((2.0 * k) * (2.0 * k + 1.0));
        ch += term_c;
        sh += term_s;
    }
    (ch, sh)
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale_re(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}
