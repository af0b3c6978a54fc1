//! Seeded sampling. Uniforms come from ChaCha8 (a counter-based stream);
//! normals use the Box-Muller transform evaluated with correctly rounded
//! MPFR elementary functions, so a given seed yields the same doubles on
//! every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Assign, Complex, Float};

use super::linalg::inner;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let radius = Float::with_val(53, Float::with_val(53, u1).ln() * -2i32).sqrt();
        let angle = Float::with_val(53, rug::float::Constant::Pi) * 2u32 * u2;
        let (s, c) = Float::with_val(53, &angle).sin_cos(Float::new(53));
        let z0 = Float::with_val(53, &radius * &c).to_f64();
        let z1 = Float::with_val(53, &radius * &s).to_f64();
        self.spare = Some(z1);
        z0
    }

    pub fn complex_gaussian(&mut self) -> (f64, f64) {
        (self.next_gaussian(), self.next_gaussian())
    }
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_matrix(rows: usize, cols: usize, ctx: &PrecisionContext) -> ComplexMatrix {
    let mut g = GaussianStream::new(ctx.seed());
    let vals: Vec<(f64, f64)> = (0..rows * cols).map(|_| g.complex_gaussian()).collect();
    ComplexMatrix::from_fn(rows, cols, ctx.bits(), |i, j| vals[i * cols + j])
}

/// Lower-triangular matrix with Gaussian entries on and below the diagonal.
pub fn random_lower_triangular(n: usize, ctx: &PrecisionContext) -> ComplexMatrix {
    let mut g = GaussianStream::new(ctx.seed());
    let mut vals = vec![(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..=i {
            vals[i * n + j] = g.complex_gaussian();
        }
    }
    ComplexMatrix::from_fn(n, n, ctx.bits(), |i, j| vals[i * n + j])
}

/// `n` orthonormal vectors in dimension `dim`: Gaussian vectors passed twice
/// through modified Gram-Schmidt.
pub fn random_orthonormal_system(dim: usize, n: usize, ctx: &PrecisionContext) -> Result<Vec<Vec<Complex>>> {
    if n == 0 || n > dim {
        return Err(Error::Dimension(format!("cannot draw {n} orthonormal vectors in dimension {dim}")));
    }
    let bits = ctx.bits() + 16;
    let mut g = GaussianStream::new(ctx.seed());
    let mut out: Vec<Vec<Complex>> = Vec::with_capacity(n);
    let mut t = Complex::new(bits);
    while out.len() < n {
        let mut v: Vec<Complex> = (0..dim)
            .map(|_| Complex::with_val(bits, g.complex_gaussian()))
            .collect();
        for _ in 0..2 {
            for u in &out {
                let c = inner(&v, u);
                for (vi, ui) in v.iter_mut().zip(u) {
                    t.assign(&c * ui);
                    *vi -= &t;
                }
            }
        }
        let norm = Float::with_val(bits, inner(&v, &v).real()).sqrt();
        // A draw inside the span of the previous vectors has measure zero;
        // resample rather than divide by a vanishing norm.
        if norm < 1e-8 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= &norm;
        }
        out.push(v.into_iter().map(|z| Complex::with_val(ctx.bits(), z)).collect());
    }
    Ok(out)
}

/// A random unitary matrix whose columns are an orthonormal system.
pub fn random_unitary(n: usize, ctx: &PrecisionContext) -> Result<ComplexMatrix> {
    let sys = random_orthonormal_system(n, n, ctx)?;
    let mut u = ComplexMatrix::zeros(n, n, ctx.bits());
    for (j, col) in sys.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u.set(i, j, z);
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::super::linalg::gram_defect;
    use super::*;

    #[test]
    fn unit_scalar_in_dimension_one() {
        let ctx = PrecisionContext::new(128, 7).unwrap();
        let s = random_orthonormal_system(1, 1, &ctx).unwrap();
        let m = Float::with_val(128, s[0][0].abs_ref());
        assert!(Float::with_val(128, m - 1u32).abs() < 1e-35);
    }

    #[test]
    fn orthonormal_to_half_precision() {
        let ctx = PrecisionContext::new(128, 3).unwrap();
        let s = random_orthonormal_system(5, 3, &ctx).unwrap();
        assert!(gram_defect(&s) < ctx.eps_frac(1, 2));
    }

    #[test]
    fn same_seed_same_output() {
        let ctx = PrecisionContext::new(96, 11).unwrap();
        let a = random_orthonormal_system(4, 2, &ctx).unwrap();
        let b = random_orthonormal_system(4, 2, &ctx).unwrap();
        assert_eq!(a, b);
        let c = random_orthonormal_system(4, 2, &ctx.with_seed(12)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn too_many_vectors() {
        let ctx = PrecisionContext::default();
        assert!(random_orthonormal_system(2, 3, &ctx).is_err());
    }

    #[test]
    fn gaussian_moments() {
        let mut g = GaussianStream::new(5);
        let xs: Vec<f64> = (0..20000).map(|_| g.next_gaussian()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03 && (var - 1.0).abs() < 0.05);
    }
}
