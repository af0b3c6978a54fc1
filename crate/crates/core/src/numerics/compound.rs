use super::linalg::determinant;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest exterior power computed by explicit minor expansion.
pub const MAX_ORDER: usize = 4;
/// Largest base dimension accepted.
pub const MAX_DIM: usize = 24;

/// Increasing `n`-tuples from `0..d` in lexicographic order.
pub fn combinations(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 || n > d {
        return out;
    }
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let mut i = n;
        while i > 0 && cur[i - 1] == d - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for k in i..n {
            cur[k] = cur[k - 1] + 1;
        }
    }
}

/// The `n`-th compound (exterior power) matrix: entry `(alpha, beta)` is the
/// minor on rows `alpha` and columns `beta`, tuples in lexicographic order.
pub fn compound_matrix(m: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let d = m.rows();
    if d != m.cols() {
        return Err(Error::Dimension("compound matrix needs a square input".into()));
    }
    if n == 0 || n > d {
        return Err(Error::Dimension(format!("order {n} is out of range for dimension {d}")));
    }
    if n > MAX_ORDER || d > MAX_DIM {
        return Err(Error::Parameter(format!(
            "compound of order {n} on dimension {d} exceeds the limits (order <= {MAX_ORDER}, dim <= {MAX_DIM})"
        )));
    }
    let tuples = combinations(d, n);
    let size = tuples.len();
    let mut out = ComplexMatrix::zeros(size, size, m.prec());
    for (a, rows) in tuples.iter().enumerate() {
        for (b, cols) in tuples.iter().enumerate() {
            let minor = determinant(&m.submatrix(rows, cols)?)?;
            out.set(a, b, &minor);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_tuples() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn diagonal_second_compound() {
        let m = ComplexMatrix::diagonal(&[2.0, 3.0], 128);
        let c = compound_matrix(&m, 2).unwrap();
        assert_eq!((c.rows(), c.cols()), (1, 1));
        assert_eq!(c.re(0, 0).to_f64(), 6.0);
    }

    #[test]
    fn identity_compound_is_identity() {
        for n in 1..=3 {
            let c = compound_matrix(&ComplexMatrix::identity(5, 64), n).unwrap();
            let k = c.rows();
            for i in 0..k {
                for j in 0..k {
                    assert_eq!(c.re(i, j).to_f64(), (i == j) as u8 as f64);
                }
            }
        }
    }

    #[test]
    fn limits() {
        let m = ComplexMatrix::identity(3, 64);
        assert!(matches!(compound_matrix(&m, 4), Err(Error::Dimension(_))));
        assert!(matches!(compound_matrix(&ComplexMatrix::identity(6, 64), 5), Err(Error::Parameter(_))));
        assert!(matches!(compound_matrix(&ComplexMatrix::identity(25, 64), 2), Err(Error::Parameter(_))));
    }
}
