//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// One circularly-symmetric complex Gaussian draw with the given variance
/// (real and imaginary parts each `variance / 2`).
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// i.i.d. `CN(0, variance)` matrix, filled column-major.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, variance: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng, variance))
}

/// Squared Frobenius norm.
pub fn frob2(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// `Re tr(A B^H)` without forming the product.
pub fn re_trace_abh(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

/// Natural log-determinant of a Hermitian positive-definite matrix via an
/// in-place Cholesky factorisation. Only the lower triangle is read.
pub fn log_det_hpd(mut m: CMatrix) -> Result<f64> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension(format!("log-det of a {}x{} matrix", n, m.ncols())));
    }
    let mut acc = 0.0;
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= m[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let d = d.sqrt();
        m[(j, j)] = Complex64::new(d, 0.0);
        acc += d.ln();
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= m[(i, k)] * m[(j, k)].conj();
            }
            m[(i, j)] = v / d;
        }
    }
    Ok(2.0 * acc)
}

/// `ln det(I + scale * A A^H)`, evaluated on whichever Gram side is smaller
/// (`det(I + s A A^H) = det(I + s A^H A)`).
pub fn log_det_identity_plus_gram(a: &CMatrix, scale: f64) -> Result<f64> {
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut gram = if a.nrows() <= a.ncols() {
        a * a.adjoint()
    } else {
        a.adjoint() * a
    };
    gram *= Complex64::new(scale, 0.0);
    for i in 0..gram.nrows() {
        gram[(i, i)] += Complex64::new(1.0, 0.0);
    }
    log_det_hpd(gram)
}
