use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};

/// Dense complex matrix at a fixed binary precision, stored column-major as
/// separate real and imaginary planes.
#[derive(Clone, Debug)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    prec: u32,
    re: Vec<Float>,
    im: Vec<Float>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let n = rows * cols;
        Self {
            rows,
            cols,
            prec,
            re: vec![Float::new(prec); n],
            im: vec![Float::new(prec); n],
        }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for k in 0..n {
            m.re[k * n + k].assign(1);
        }
        m
    }

    /// Builds a matrix from `f(i, j) = (re, im)`; `f64` inputs are exact.
    pub fn from_fn(rows: usize, cols: usize, prec: u32, f: impl Fn(usize, usize) -> (f64, f64)) -> Self {
        let mut m = Self::zeros(rows, cols, prec);
        for j in 0..cols {
            for i in 0..rows {
                let (a, b) = f(i, j);
                let k = j * rows + i;
                m.re[k].assign(a);
                m.im[k].assign(b);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<(f64, f64)>], prec: u32) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if r == 0 || c == 0 || rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged or empty row data".into()));
        }
        Ok(Self::from_fn(r, c, prec, |i, j| rows[i][j]))
    }

    pub fn diagonal(values: &[f64], prec: u32) -> Self {
        let n = values.len();
        Self::from_fn(n, n, prec, |i, j| if i == j { (values[i], 0.0) } else { (0.0, 0.0) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols);
        j * self.rows + i
    }

    pub fn re(&self, i: usize, j: usize) -> &Float {
        &self.re[self.idx(i, j)]
    }

    pub fn im(&self, i: usize, j: usize) -> &Float {
        &self.im[self.idx(i, j)]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        let k = self.idx(i, j);
        Complex::with_val(self.prec, (&self.re[k], &self.im[k]))
    }

    pub fn set(&mut self, i: usize, j: usize, z: &Complex) {
        let k = self.idx(i, j);
        self.re[k].assign(z.real());
        self.im[k].assign(z.imag());
    }

    pub fn set_parts(&mut self, i: usize, j: usize, re: &Float, im: &Float) {
        let k = self.idx(i, j);
        self.re[k].assign(re);
        self.im[k].assign(im);
    }

    /// Real and imaginary planes of column `j`.
    pub fn column_parts(&self, j: usize) -> (&[Float], &[Float]) {
        let s = j * self.rows;
        (&self.re[s..s + self.rows], &self.im[s..s + self.rows])
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.im.iter().all(|x| x.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(self.im.iter()).all(|x| x.is_finite())
    }

    /// Largest modulus among strictly upper entries.
    pub fn max_upper_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.cols {
            for i in 0..j.min(self.rows) {
                m = m.max(self.abs_f64(i, j));
            }
        }
        m
    }

    pub fn is_lower_triangular(&self, tol: f64) -> bool {
        self.max_upper_abs() <= tol
    }

    pub fn abs_f64(&self, i: usize, j: usize) -> f64 {
        let k = self.idx(i, j);
        self.re[k].to_f64().hypot(self.im[k].to_f64())
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.cols {
            for i in 0..self.rows {
                m = m.max(self.abs_f64(i, j));
            }
        }
        m
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.prec);
        for j in 0..self.cols {
            for i in 0..self.rows {
                let k = self.idx(i, j);
                let kt = t.idx(j, i);
                t.re[kt].assign(&self.re[k]);
                t.im[kt].assign(-&self.im[k]);
            }
        }
        t
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::Dimension("empty index set".into()));
        }
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::Dimension("submatrix index out of range".into()));
        }
        let mut s = Self::zeros(rows.len(), cols.len(), self.prec);
        for (jj, &j) in cols.iter().enumerate() {
            for (ii, &i) in rows.iter().enumerate() {
                let k = self.idx(i, j);
                let ks = s.idx(ii, jj);
                s.re[ks].assign(&self.re[k]);
                s.im[ks].assign(&self.im[k]);
            }
        }
        Ok(s)
    }

    /// Drops the first row and column.
    pub fn without_first(&self) -> Result<Self> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::Dimension("matrix too small to drop index 0".into()));
        }
        let r: Vec<usize> = (1..self.rows).collect();
        let c: Vec<usize> = (1..self.cols).collect();
        self.submatrix(&r, &c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let prec = self.prec.max(other.prec);
        let mut out = Self::zeros(self.rows, other.cols, prec);
        let mut t = Float::new(prec);
        for j in 0..other.cols {
            for k in 0..self.cols {
                let bk = other.idx(k, j);
                let (br, bi) = (&other.re[bk], &other.im[bk]);
                if br.is_zero() && bi.is_zero() {
                    continue;
                }
                for i in 0..self.rows {
                    let a = self.idx(i, k);
                    let o = out.idx(i, j);
                    t.assign(&self.re[a] * br);
                    out.re[o] += &t;
                    t.assign(&self.im[a] * bi);
                    out.re[o] -= &t;
                    t.assign(&self.re[a] * bi);
                    out.im[o] += &t;
                    t.assign(&self.im[a] * br);
                    out.im[o] += &t;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex]) -> Result<Vec<Complex>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for matrix with {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut y = vec![Complex::new(self.prec); self.rows];
        let mut t = Complex::new(self.prec);
        for (j, xj) in x.iter().enumerate() {
            for (i, yi) in y.iter_mut().enumerate() {
                t.assign(&self.get(i, j) * xj);
                *yi += &t;
            }
        }
        Ok(y)
    }

    /// `D^{-1} A D` for the diagonal `D = diag(d)`: entry `(i, j)` is scaled
    /// by `d_j / d_i`.
    pub fn diagonal_conjugate(&self, d: &[Float]) -> Result<Self> {
        if self.rows != self.cols || d.len() != self.rows {
            return Err(Error::Dimension("diagonal conjugation needs a square matrix and matching d".into()));
        }
        let mut out = self.clone();
        let mut f = Float::new(self.prec);
        for j in 0..self.cols {
            for i in 0..self.rows {
                f.assign(&d[j] / &d[i]);
                let k = self.idx(i, j);
                out.re[k] *= &f;
                out.im[k] *= &f;
            }
        }
        Ok(out)
    }

    /// Row-major text export: one `re,im` token per entry, rows on separate
    /// lines, `digits` significant decimal digits.
    pub fn to_text(&self, digits: usize) -> String {
        let mut s = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let k = self.idx(i, j);
                    format!(
                        "{},{}",
                        fmt_float(&self.re[k], digits),
                        fmt_float(&self.im[k], digits)
                    )
                })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Scientific notation with `digits` significant digits.
pub fn fmt_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_and_adjoint() {
        let a = ComplexMatrix::from_rows(&[vec![(1.0, 1.0), (2.0, 0.0)], vec![(0.0, -1.0), (3.0, 0.5)]], 128).unwrap();
        let b = a.conj_transpose();
        let c = a.mul(&b).unwrap();
        // A A^H is Hermitian with real diagonal.
        assert!(c.im(0, 0).is_zero() && c.im(1, 1).is_zero());
        assert_eq!(c.re(0, 0).to_f64(), 1.0 + 1.0 + 4.0);
        assert_eq!(c.get(0, 1), c.get(1, 0).conj());
    }

    #[test]
    fn diagonal_conjugation_scales_entries() {
        let a = ComplexMatrix::from_fn(3, 3, 64, |i, j| ((i * 3 + j) as f64, 0.0));
        let d: Vec<Float> = [1.0, 2.0, 4.0].iter().map(|&x| Float::with_val(64, x)).collect();
        let c = a.diagonal_conjugate(&d).unwrap();
        assert_eq!(c.re(2, 0).to_f64(), 6.0 / 4.0);
        assert_eq!(c.re(0, 2).to_f64(), 2.0 * 4.0);
    }

    #[test]
    fn dimension_errors() {
        let a = ComplexMatrix::zeros(2, 3, 64);
        assert!(a.mul(&a).is_err());
        assert!(a.diagonal_conjugate(&[]).is_err());
        assert!(ComplexMatrix::from_rows(&[vec![(1.0, 0.0)], vec![]], 64).is_err());
    }

    #[test]
    fn text_export_is_row_major() {
        let a = ComplexMatrix::from_fn(2, 2, 64, |i, j| (i as f64, j as f64));
        let t = a.to_text(5);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("1.0000"));
    }
}
