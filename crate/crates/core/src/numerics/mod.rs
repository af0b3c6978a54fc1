//! Extended-precision linear algebra: Jacobi SVD, determinants, compound
//! matrices and seeded orthonormal sampling.

mod compound;
mod linalg;
mod matrix;
mod random;
mod svd;

pub use compound::{combinations, compound_matrix, MAX_DIM as MAX_COMPOUND_DIM, MAX_ORDER as MAX_COMPOUND_ORDER};
pub use linalg::{det_gram, determinant, gram_defect, inner};
pub use matrix::{fmt_float, ComplexMatrix};
pub use random::{random_lower_triangular, random_matrix, random_orthonormal_system, random_unitary, GaussianStream};
pub use svd::{svd, svd_singular_values, SingularSpectrum, SpectrumSource, Svd, MAX_SWEEPS};

use rug::Float;

/// `prod_{j < n} values[j]` at the precision of the first value.
pub fn top_product(values: &[Float], n: usize) -> Float {
    let prec = values.first().map(|v| v.prec()).unwrap_or(64);
    let mut p = Float::with_val(prec, 1);
    for v in values.iter().take(n) {
        p *= v;
    }
    p
}
