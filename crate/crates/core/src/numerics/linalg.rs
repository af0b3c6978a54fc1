use rug::{Assign, Complex, Float};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::Dimension(format!("determinant of a {}x{} matrix", n, m.cols())));
    }
    let prec = m.prec();
    let mut a: Vec<Vec<Complex>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    let mut det = Complex::with_val(prec, 1);
    let mut t = Complex::new(prec);
    for k in 0..n {
        let mut piv = k;
        let mut best = Float::new(prec);
        for (i, row) in a.iter().enumerate().skip(k) {
            let mag = Float::with_val(prec, row[k].abs_ref());
            if mag > best {
                best = mag;
                piv = i;
            }
        }
        if best.is_zero() {
            return Ok(Complex::new(prec));
        }
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= &a[k][k];
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].real().is_zero() && a[i][k].imag().is_zero() {
                continue;
            }
            let f = Complex::with_val(prec, &a[i][k] / &pivot);
            let (upper, lower) = a.split_at_mut(i);
            let rk = &upper[k];
            for (x, y) in lower[0].iter_mut().zip(rk.iter()).skip(k + 1) {
                t.assign(&f * y);
                *x -= &t;
            }
        }
    }
    Ok(det)
}

/// `<x, y> = sum x_k conj(y_k)`, linear in the first argument.
pub fn inner(x: &[Complex], y: &[Complex]) -> Complex {
    let prec = x.first().map(|z| z.prec().0).unwrap_or(64);
    let mut acc = Complex::new(prec);
    let mut t = Complex::new(prec);
    for (a, b) in x.iter().zip(y) {
        t.assign(a * Complex::with_val(prec, b.conj_ref()));
        acc += &t;
    }
    acc
}

/// Determinant of the `n x n` matrix with entry `(i, j) = <M f_j, g_i>`.
pub fn det_gram(m: &ComplexMatrix, f: &[Vec<Complex>], g: &[Vec<Complex>], ctx: &PrecisionContext) -> Result<Complex> {
    let n = f.len();
    if n == 0 || g.len() != n {
        return Err(Error::Dimension(format!("systems of sizes {} and {}", f.len(), g.len())));
    }
    if f.iter().any(|v| v.len() != m.cols()) || g.iter().any(|v| v.len() != m.rows()) {
        return Err(Error::Dimension("system vectors do not match the matrix shape".into()));
    }
    let images: Vec<Vec<Complex>> = f.iter().map(|v| m.apply(v)).collect::<Result<_>>()?;
    let mut gram = ComplexMatrix::zeros(n, n, ctx.bits());
    for (i, gi) in g.iter().enumerate() {
        for (j, tf) in images.iter().enumerate() {
            gram.set(i, j, &inner(tf, gi));
        }
    }
    determinant(&gram)
}

/// `max |G - I|` for the Gram matrix of a system of vectors.
pub fn gram_defect(system: &[Vec<Complex>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, x) in system.iter().enumerate() {
        for (j, y) in system.iter().enumerate() {
            let mut g = inner(x, y);
            if i == j {
                g -= 1;
            }
            worst = worst.max(Float::with_val(64, g.abs_ref()).to_f64());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_small_cases() {
        let m = ComplexMatrix::from_rows(&[vec![(1.0, 0.0), (2.0, 0.0)], vec![(3.0, 0.0), (4.0, 0.0)]], 128).unwrap();
        assert_eq!(determinant(&m).unwrap().real().to_f64(), -2.0);
        let z = ComplexMatrix::from_rows(&[vec![(1.0, 0.0), (2.0, 0.0)], vec![(2.0, 0.0), (4.0, 0.0)]], 128).unwrap();
        assert!(determinant(&z).unwrap().real().is_zero());
        let c = ComplexMatrix::from_rows(&[vec![(0.0, 1.0), (0.0, 0.0)], vec![(5.0, 0.0), (0.0, 1.0)]], 128).unwrap();
        assert_eq!(determinant(&c).unwrap().real().to_f64(), -1.0);
    }

    #[test]
    fn det_gram_identity_and_diagonal() {
        let ctx = PrecisionContext::new(128, 0).unwrap();
        let basis = |k: usize, n: usize| -> Vec<Complex> {
            (0..n).map(|i| Complex::with_val(128, ((i == k) as u32, 0))).collect()
        };
        let id = ComplexMatrix::identity(3, 128);
        let e: Vec<_> = (0..3).map(|k| basis(k, 3)).collect();
        assert_eq!(det_gram(&id, &e, &e, &ctx).unwrap().real().to_f64(), 1.0);
        let d = ComplexMatrix::diagonal(&[3.0, 2.0, 1.0], 128);
        let e2: Vec<_> = (0..2).map(|k| basis(k, 3)).collect();
        assert_eq!(det_gram(&d, &e2, &e2, &ctx).unwrap().real().to_f64(), 6.0);
        assert!(det_gram(&d, &e2, &e[..1], &ctx).is_err());
    }
}
