//! Complex linear-algebra aliases and small helpers shared by all modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

/// Draws one circularly-symmetric complex Gaussian sample with unit variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `n` i.i.d. CN(0, variance) samples.
pub fn complex_normal_vector<R: Rng + ?Sized>(n: usize, variance: f64, rng: &mut R) -> CVector {
    let scale = variance.sqrt();
    CVector::from_fn(n, |_, _| complex_normal(rng) * scale)
}

/// `rows × cols` i.i.d. CN(0, variance) samples, drawn in column-major order.
pub fn complex_normal_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    variance: f64,
    rng: &mut R,
) -> CMatrix {
    let scale = variance.sqrt();
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng) * scale)
}

pub fn ones(n: usize) -> CVector {
    CVector::from_element(n, C64::new(1.0, 0.0))
}

/// `v ⊗ 1_{n0}`: every entry of `v` repeated `n0` times.
pub fn kron_ones(v: &CVector, n0: usize) -> CVector {
    CVector::from_fn(v.len() * n0, |k, _| v[k / n0])
}

/// Outer product `a bᵀ` (no conjugation).
pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |r, c| a[r] * b[c])
}

/// Squared Frobenius norm.
pub fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm_sq(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `aᴴ M b` for vectors `a`, `b`.
pub fn bilinear(a: &CVector, m: &CMatrix, b: &CVector) -> C64 {
    a.dotc(&(m * b))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}
