//! One-sided (Hestenes) Jacobi SVD at extended precision.
//!
//! Columns are rotated pairwise until every pair is orthogonal to within
//! `2^(8 - bits)`; the singular values are then the column norms. Working
//! precision carries 32 guard bits so the measured cosines are reliable at
//! the threshold. Pairs are visited in round-robin order, so each round is
//! a set of disjoint rotations that may run in parallel without changing
//! the result.

use rayon::prelude::*;
use rug::{Assign, Float};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

pub const MAX_SWEEPS: usize = 30;
const GUARD_BITS: u32 = 32;

/// Where a spectrum came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSource {
    pub rows: usize,
    pub cols: usize,
    pub bits: u32,
    pub sweeps: usize,
    /// Largest column-pair cosine at convergence.
    pub max_cosine: f64,
}

/// Non-increasing singular values with per-entry absolute error bounds.
#[derive(Clone, Debug)]
pub struct SingularSpectrum {
    pub values: Vec<Float>,
    pub error_bounds: Vec<f64>,
    pub source: SpectrumSource,
}

impl SingularSpectrum {
    pub fn new(values: Vec<Float>, error_bounds: Vec<f64>, source: SpectrumSource) -> Result<Self> {
        if values.len() != error_bounds.len() {
            return Err(Error::Dimension("values and error bounds differ in length".into()));
        }
        if values.iter().any(|v| v.is_sign_negative() && !v.is_zero()) {
            return Err(Error::Parameter("singular values must be non-negative".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parameter("singular values must be non-increasing".into()));
        }
        if error_bounds.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
            return Err(Error::Parameter("error bounds must be finite and non-negative".into()));
        }
        Ok(Self { values, error_bounds, source })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64()).collect()
    }

    /// Number of leading entries whose value exceeds `factor` times its bound.
    pub fn certified_len(&self, factor: f64) -> usize {
        self.values
            .iter()
            .zip(&self.error_bounds)
            .take_while(|(v, e)| **v > factor * **e && !v.is_zero())
            .count()
    }

    /// Adds `extra` to every error bound (e.g. an entrywise perturbation).
    pub fn widen(mut self, extra: f64) -> Self {
        for e in &mut self.error_bounds {
            *e += extra;
        }
        self
    }
}

/// Full decomposition `M = U diag(s) V^H` with thin `U`, `V`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub spectrum: SingularSpectrum,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
}

pub fn svd_singular_values(m: &ComplexMatrix, ctx: &PrecisionContext) -> Result<SingularSpectrum> {
    Ok(decompose(m, ctx, false)?.0)
}

pub fn svd(m: &ComplexMatrix, ctx: &PrecisionContext) -> Result<Svd> {
    let (spectrum, vecs) = decompose(m, ctx, true)?;
    let (u, v) = vecs.expect("vectors requested");
    Ok(Svd { spectrum, u, v })
}

struct Col {
    re: Vec<Float>,
    im: Option<Vec<Float>>,
    v_re: Vec<Float>,
    v_im: Option<Vec<Float>>,
    norm2: Float,
}

impl Default for Col {
    fn default() -> Self {
        Self { re: Vec::new(), im: None, v_re: Vec::new(), v_im: None, norm2: Float::new(64) }
    }
}

impl Col {
    fn recompute_norm(&mut self, t: &mut Float) {
        self.norm2.assign(0);
        for x in &self.re {
            t.assign(x.square_ref());
            self.norm2 += &*t;
        }
        if let Some(im) = &self.im {
            for x in im {
                t.assign(x.square_ref());
                self.norm2 += &*t;
            }
        }
    }
}

struct Outcome {
    rotated: bool,
    cosine: f64,
}

fn decompose(
    m: &ComplexMatrix,
    ctx: &PrecisionContext,
    want_vectors: bool,
) -> Result<(SingularSpectrum, Option<(ComplexMatrix, ComplexMatrix)>)> {
    if !m.is_finite() {
        return Err(Error::Parameter("matrix has non-finite entries".into()));
    }
    let transposed = m.rows() < m.cols();
    let work = if transposed { m.conj_transpose() } else { m.clone() };
    let rows = work.rows();
    let n = work.cols();
    let bits = ctx.bits();
    let wp = bits + GUARD_BITS;
    let real = work.is_real();

    let mut tmp = Float::new(wp);
    let mut cols: Vec<Col> = (0..n)
        .map(|j| {
            let (re, im) = work.column_parts(j);
            let mut c = Col {
                re: re.iter().map(|x| Float::with_val(wp, x)).collect(),
                im: (!real).then(|| im.iter().map(|x| Float::with_val(wp, x)).collect()),
                v_re: Vec::new(),
                v_im: None,
                norm2: Float::new(wp),
            };
            c.recompute_norm(&mut tmp);
            c
        })
        .collect();
    // Values only: run Jacobi on R^H from a pivoted QR of the input. The
    // singular values are unchanged and R^H is close to having orthogonal
    // columns, so far fewer sweeps are needed.
    if !want_vectors && n > 2 {
        cols = qr_precondition(cols, rows, wp);
        cols = qr_precondition(cols, n, wp);
        for c in cols.iter_mut() {
            c.recompute_norm(&mut tmp);
        }
    }
    let rows = cols.first().map(|c| c.re.len()).unwrap_or(rows);

    // Start from columns sorted by decreasing norm; this is the permutation
    // V starts from.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cols[b].norm2.partial_cmp(&cols[a].norm2).unwrap());
    let mut sorted: Vec<Col> = Vec::with_capacity(n);
    for (slot, &orig) in order.iter().enumerate() {
        let mut c = std::mem::take(&mut cols[orig]);
        if want_vectors {
            c.v_re = (0..n).map(|k| Float::with_val(wp, (k == orig) as u32)).collect();
            c.v_im = (!real).then(|| vec![Float::new(wp); n]);
        }
        let _ = slot;
        sorted.push(c);
    }
    let mut cols = sorted;

    let threshold = Float::with_val(64, Float::i_exp(1, 8 - bits as i32));
    let tau2 = Float::with_val(64, threshold.square_ref());
    let rounds = round_robin(n);

    let mut sweeps = 0;
    let mut max_cos;
    loop {
        if sweeps == MAX_SWEEPS {
            for c in cols.iter_mut() {
                c.recompute_norm(&mut tmp);
            }
            let residual = measure_max_cosine(&cols);
            return Err(Error::NonConvergence { sweeps, residual });
        }
        sweeps += 1;
        for c in cols.iter_mut() {
            c.recompute_norm(&mut tmp);
        }
        let mut rotated = false;
        let mut nrot = 0usize;
        max_cos = 0.0f64;
        for round in &rounds {
            let mut pairs: Vec<(Col, Col)> = round
                .iter()
                .map(|&(p, q)| (std::mem::take(&mut cols[p]), std::mem::take(&mut cols[q])))
                .collect();
            let outcomes: Vec<Outcome> = pairs
                .par_iter_mut()
                .map(|(a, b)| rotate_pair(a, b, &tau2, wp))
                .collect();
            for ((p, q), (a, b)) in round.iter().zip(pairs) {
                cols[*p] = a;
                cols[*q] = b;
            }
            for o in outcomes {
                rotated |= o.rotated;
                nrot += o.rotated as usize;
                max_cos = max_cos.max(o.cosine);
            }
        }
        log::debug!("sweep {sweeps}: {nrot} rotations, max cosine {max_cos:e}");
        if !rotated {
            break;
        }
    }

    for c in cols.iter_mut() {
        c.recompute_norm(&mut tmp);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| cols[b].norm2.partial_cmp(&cols[a].norm2).unwrap());
    let sigma_w: Vec<Float> = idx.iter().map(|&k| Float::with_val(wp, cols[k].norm2.sqrt_ref())).collect();

    let eps_w = (-(wp as f64)).exp2();
    let eps = ctx.eps();
    let frob = sigma_w
        .iter()
        .map(|s| {
            let f = s.to_f64();
            f * f
        })
        .sum::<f64>()
        .sqrt();
    let nf = n as f64;
    let abs_term = 4.0 * sweeps as f64 * nf * (rows as f64).sqrt() * eps_w * frob;
    let rel = (nf - 1.0).max(0.0) * max_cos + eps + 4.0 * nf * eps_w;
    let values: Vec<Float> = sigma_w.iter().map(|s| Float::with_val(bits, s)).collect();
    let bounds: Vec<f64> = values.iter().map(|s| s.to_f64() * rel + abs_term).collect();
    let source = SpectrumSource {
        rows: m.rows(),
        cols: m.cols(),
        bits,
        sweeps,
        max_cosine: max_cos,
    };
    let spectrum = SingularSpectrum::new(values, bounds, source)?;

    let vectors = if want_vectors {
        let mut u = ComplexMatrix::zeros(rows, n, bits);
        let mut v = ComplexMatrix::zeros(n, n, bits);
        let zero = Float::new(wp);
        for (slot, &k) in idx.iter().enumerate() {
            let c = &cols[k];
            let s = &sigma_w[slot];
            for i in 0..rows {
                let im = c.im.as_ref().map(|x| &x[i]).unwrap_or(&zero);
                if s.is_zero() {
                    // Null direction: any unit vector completes U; use e_slot.
                    let one = Float::with_val(wp, (i == slot % rows) as u32);
                    u.set_parts(i, slot, &one, &zero);
                } else {
                    let r = Float::with_val(wp, &c.re[i] / s);
                    let m = Float::with_val(wp, im / s);
                    u.set_parts(i, slot, &r, &m);
                }
            }
            for i in 0..n {
                let im = c.v_im.as_ref().map(|x| &x[i]).unwrap_or(&zero);
                v.set_parts(i, slot, &c.v_re[i], im);
            }
        }
        Some(if transposed { (v, u) } else { (u, v) })
    } else {
        None
    };
    Ok((spectrum, vectors))
}

/// Householder QR with column pivoting, `A P = Q R`; returns the columns
/// of `R^H` (`n x n`, lower triangular).
fn qr_precondition(mut cols: Vec<Col>, rows: usize, wp: u32) -> Vec<Col> {
    let n = cols.len();
    let complex = cols[0].im.is_some();
    let mut t = Float::new(wp);
    let mut r_re = vec![vec![Float::new(wp); n]; n];
    let mut r_im = vec![vec![Float::new(wp); n]; n];
    let steps = n.min(rows);
    for k in 0..steps {
        // Pivot on the largest trailing column norm.
        let mut best = k;
        let mut best_norm = Float::new(wp);
        for (j, c) in cols.iter().enumerate().skip(k) {
            let mut s = Float::new(wp);
            for i in k..rows {
                t.assign(c.re[i].square_ref());
                s += &t;
                if let Some(im) = &c.im {
                    t.assign(im[i].square_ref());
                    s += &t;
                }
            }
            if j == k || s > best_norm {
                best_norm = s;
                best = j;
            }
        }
        cols.swap(k, best);
        for row in r_re.iter_mut().take(k) {
            row.swap(k, best);
        }
        for row in r_im.iter_mut().take(k) {
            row.swap(k, best);
        }
        let norm = Float::with_val(wp, best_norm.sqrt_ref());
        if norm.is_zero() {
            continue;
        }
        // alpha = -e^{i arg x0} |x|; v = x - alpha e_1
        let (x0r, x0i) = (cols[k].re[k].clone(), cols[k].im.as_ref().map(|v| v[k].clone()).unwrap_or_else(|| Float::new(wp)));
        let x0abs = Float::with_val(wp, Float::with_val(wp, x0r.square_ref()) + Float::with_val(wp, x0i.square_ref())).sqrt();
        let (ph_r, ph_i) = if x0abs.is_zero() {
            (Float::with_val(wp, 1), Float::new(wp))
        } else {
            (Float::with_val(wp, &x0r / &x0abs), Float::with_val(wp, &x0i / &x0abs))
        };
        let alpha_r = -Float::with_val(wp, &ph_r * &norm);
        let alpha_i = -Float::with_val(wp, &ph_i * &norm);
        let mut v_re: Vec<Float> = cols[k].re[k..].to_vec();
        let mut v_im: Vec<Float> = match &cols[k].im {
            Some(im) => im[k..].to_vec(),
            None => vec![Float::new(wp); rows - k],
        };
        v_re[0] -= &alpha_r;
        v_im[0] -= &alpha_i;
        // |v|^2 = 2 |x| (|x| + |x0|)
        let vnorm2 = Float::with_val(wp, &norm + &x0abs) * &norm * 2u32;
        r_re[k][k].assign(&alpha_r);
        r_im[k][k].assign(&alpha_i);
        for j in k + 1..n {
            let c = &mut cols[j];
            // w = v^H a_j
            let mut w_re = Float::new(wp);
            let mut w_im = Float::new(wp);
            for (ii, i) in (k..rows).enumerate() {
                t.assign(&v_re[ii] * &c.re[i]);
                w_re += &t;
                if complex {
                    let ai = &c.im.as_ref().unwrap()[i];
                    t.assign(&v_im[ii] * ai);
                    w_re += &t;
                    t.assign(&v_re[ii] * ai);
                    w_im += &t;
                    t.assign(&v_im[ii] * &c.re[i]);
                    w_im -= &t;
                }
            }
            w_re *= 2u32;
            w_re /= &vnorm2;
            w_im *= 2u32;
            w_im /= &vnorm2;
            // a_j -= v w
            for (ii, i) in (k..rows).enumerate() {
                t.assign(&v_re[ii] * &w_re);
                c.re[i] -= &t;
                if complex {
                    t.assign(&v_im[ii] * &w_im);
                    c.re[i] += &t;
                    let ai = &mut c.im.as_mut().unwrap()[i];
                    t.assign(&v_re[ii] * &w_im);
                    *ai -= &t;
                    t.assign(&v_im[ii] * &w_re);
                    *ai -= &t;
                }
            }
            r_re[k][j].assign(&c.re[k]);
            if let Some(im) = &c.im {
                r_im[k][j].assign(&im[k]);
            }
        }
    }
    // Column i of R^H is the conjugated row i of R.
    (0..n)
        .map(|i| Col {
            re: (0..n).map(|j| r_re[i][j].clone()).collect(),
            im: complex.then(|| (0..n).map(|j| Float::with_val(wp, -&r_im[i][j])).collect()),
            v_re: Vec::new(),
            v_im: None,
            norm2: Float::new(wp),
        })
        .collect()
}

/// Circle-method schedule: every round is a set of disjoint pairs and the
/// rounds together cover each pair exactly once.
fn round_robin(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n < 2 {
        return Vec::new();
    }
    let m = if n % 2 == 0 { n } else { n + 1 };
    let mut slots: Vec<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(m - 1);
    for _ in 0..m - 1 {
        let mut round = Vec::with_capacity(m / 2);
        for k in 0..m / 2 {
            let (a, b) = (slots[k], slots[m - 1 - k]);
            if a < n && b < n {
                round.push((a.min(b), a.max(b)));
            }
        }
        rounds.push(round);
        let last = slots.pop().unwrap();
        slots.insert(1, last);
    }
    rounds
}

fn dot_real(x: &[Float], y: &[Float], acc: &mut Float, t: &mut Float) {
    for (a, b) in x.iter().zip(y) {
        t.assign(a * b);
        *acc += &*t;
    }
}

fn dot_real_sub(x: &[Float], y: &[Float], acc: &mut Float, t: &mut Float) {
    for (a, b) in x.iter().zip(y) {
        t.assign(a * b);
        *acc -= &*t;
    }
}

fn rotate_pair(a: &mut Col, b: &mut Col, tau2: &Float, wp: u32) -> Outcome {
    let none = Outcome { rotated: false, cosine: 0.0 };
    if a.norm2.is_zero() || b.norm2.is_zero() {
        return none;
    }
    let mut t = Float::new(wp);
    // gamma = a^H b
    let mut g_re = Float::new(wp);
    dot_real(&a.re, &b.re, &mut g_re, &mut t);
    let mut g_im = Float::new(wp);
    if let (Some(ai), Some(bi)) = (&a.im, &b.im) {
        dot_real(ai, bi, &mut g_re, &mut t);
        dot_real(&a.re, bi, &mut g_im, &mut t);
        dot_real_sub(ai, &b.re, &mut g_im, &mut t);
    }
    let g2 = Float::with_val(wp, g_re.square_ref()) + Float::with_val(wp, g_im.square_ref());
    let ab = Float::with_val(wp, &a.norm2 * &b.norm2);
    let cos2 = Float::with_val(64, &g2 / &ab);
    let cosine = cos2.to_f64().sqrt();
    if cos2 <= *tau2 {
        return Outcome { rotated: false, cosine };
    }
    let g_abs = Float::with_val(wp, g2.sqrt_ref());
    // zeta = (beta - alpha) / (2 |gamma|), t = sign(zeta) / (|zeta| + sqrt(1 + zeta^2))
    let mut zeta = Float::with_val(wp, &b.norm2 - &a.norm2);
    zeta /= &g_abs;
    zeta /= 2;
    let root = (Float::with_val(wp, zeta.square_ref()) + 1u32).sqrt();
    let mut tan = Float::with_val(wp, zeta.abs_ref()) + root;
    tan.recip_mut();
    if zeta.is_sign_negative() {
        tan = -tan;
    }
    let mut c = (Float::with_val(wp, tan.square_ref()) + 1u32).sqrt();
    c.recip_mut();
    let s = Float::with_val(wp, &c * &tan);
    // sigma = s * gamma / |gamma|; for real columns this is s * sign(gamma)
    let sr = Float::with_val(wp, &s * &g_re) / &g_abs;
    let si = Float::with_val(wp, &s * &g_im) / &g_abs;

    let shift = Float::with_val(wp, &tan * &g_abs);
    let old_a = a.norm2.clone();
    let old_b = b.norm2.clone();
    a.norm2 -= &shift;
    b.norm2 += &shift;

    match (&mut a.im, &mut b.im) {
        (None, None) => rotate_real(&mut a.re, &mut b.re, &c, &sr, &mut t),
        (Some(ai), Some(bi)) => rotate_complex(&mut a.re, ai, &mut b.re, bi, &c, &sr, &si, wp),
        _ => unreachable!("mixed real/complex columns"),
    }
    if !a.v_re.is_empty() {
        match (&mut a.v_im, &mut b.v_im) {
            (None, None) => rotate_real(&mut a.v_re, &mut b.v_re, &c, &sr, &mut t),
            (Some(ai), Some(bi)) => rotate_complex(&mut a.v_re, ai, &mut b.v_re, bi, &c, &sr, &si, wp),
            _ => unreachable!("mixed real/complex vectors"),
        }
    }
    // Updated norms lose relative accuracy under heavy cancellation.
    let mut fresh = Float::new(wp);
    if a.norm2 < Float::with_val(wp, &old_a / 16u32) {
        a.recompute_norm(&mut fresh);
    }
    if b.norm2 < Float::with_val(wp, &old_b / 16u32) {
        b.recompute_norm(&mut fresh);
    }
    Outcome { rotated: true, cosine }
}

/// `x' = c x - s y`, `y' = s x + c y`.
fn rotate_real(x: &mut [Float], y: &mut [Float], c: &Float, s: &Float, t: &mut Float) {
    let mut u = Float::new(t.prec());
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        t.assign(s * &*yi);
        u.assign(s * &*xi);
        xi.mul_sub_mut(c, t);
        yi.mul_add_mut(c, &u);
    }
}

/// `x' = c x - conj(sigma) y`, `y' = sigma x + c y` on split planes.
#[allow(clippy::too_many_arguments)]
fn rotate_complex(
    xr: &mut [Float],
    xi: &mut [Float],
    yr: &mut [Float],
    yi: &mut [Float],
    c: &Float,
    sr: &Float,
    si: &Float,
    wp: u32,
) {
    let mut t = Float::new(wp);
    let mut nxr = Float::new(wp);
    let mut nxi = Float::new(wp);
    let mut nyr = Float::new(wp);
    let mut nyi = Float::new(wp);
    for k in 0..xr.len() {
        // conj(sigma) y = (sr yr + si yi) + i (sr yi - si yr)
        nxr.assign(c * &xr[k]);
        t.assign(sr * &yr[k]);
        nxr -= &t;
        t.assign(si * &yi[k]);
        nxr -= &t;
        nxi.assign(c * &xi[k]);
        t.assign(sr * &yi[k]);
        nxi -= &t;
        t.assign(si * &yr[k]);
        nxi += &t;
        // sigma x = (sr xr - si xi) + i (sr xi + si xr)
        nyr.assign(c * &yr[k]);
        t.assign(sr * &xr[k]);
        nyr += &t;
        t.assign(si * &xi[k]);
        nyr -= &t;
        nyi.assign(c * &yi[k]);
        t.assign(sr * &xi[k]);
        nyi += &t;
        t.assign(si * &xr[k]);
        nyi += &t;
        std::mem::swap(&mut xr[k], &mut nxr);
        std::mem::swap(&mut xi[k], &mut nxi);
        std::mem::swap(&mut yr[k], &mut nyr);
        std::mem::swap(&mut yi[k], &mut nyi);
    }
}

fn measure_max_cosine(cols: &[Col]) -> f64 {
    let mut worst = 0.0f64;
    for p in 0..cols.len() {
        for q in p + 1..cols.len() {
            let (a, b) = (&cols[p], &cols[q]);
            if a.norm2.is_zero() || b.norm2.is_zero() {
                continue;
            }
            let wp = a.norm2.prec();
            let mut t = Float::new(wp);
            let mut g_re = Float::new(wp);
            let mut g_im = Float::new(wp);
            dot_real(&a.re, &b.re, &mut g_re, &mut t);
            if let (Some(ai), Some(bi)) = (&a.im, &b.im) {
                dot_real(ai, bi, &mut g_re, &mut t);
                dot_real(&a.re, bi, &mut g_im, &mut t);
                dot_real_sub(ai, &b.re, &mut g_im, &mut t);
            }
            let g2 = Float::with_val(64, g_re.square_ref()) + Float::with_val(64, g_im.square_ref());
            let ab = Float::with_val(64, &a.norm2 * &b.norm2);
            worst = worst.max(Float::with_val(64, g2 / ab).to_f64().sqrt());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128, 1).unwrap()
    }

    fn vals(m: &ComplexMatrix) -> Vec<f64> {
        svd_singular_values(m, &ctx()).unwrap().values_f64()
    }

    #[test]
    fn identity_three() {
        assert_eq!(vals(&ComplexMatrix::identity(3, 128)), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_sorted_by_modulus() {
        assert_eq!(vals(&ComplexMatrix::diagonal(&[3.0, 1.0, 2.0], 128)), vec![3.0, 2.0, 1.0]);
        let m = ComplexMatrix::from_fn(2, 2, 128, |i, j| if i == j { (0.0, [-5.0, 0.5][i]) } else { (0.0, 0.0) });
        assert_eq!(vals(&m), vec![5.0, 0.5]);
    }

    #[test]
    fn nilpotent_rank_one() {
        let m = ComplexMatrix::from_rows(&[vec![(0.0, 0.0), (1.0, 0.0)], vec![(0.0, 0.0), (0.0, 0.0)]], 128).unwrap();
        assert_eq!(vals(&m), vec![1.0, 0.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[1,2],[3,4]]: singular values sqrt(15 +- sqrt(221)).
        let m = ComplexMatrix::from_rows(&[vec![(1.0, 0.0), (2.0, 0.0)], vec![(3.0, 0.0), (4.0, 0.0)]], 128).unwrap();
        let s = svd_singular_values(&m, &ctx()).unwrap();
        let root = Float::with_val(128, 221).sqrt();
        let s1 = Float::with_val(128, 15 + &root).sqrt();
        let s2 = Float::with_val(128, 15 - &root).sqrt();
        assert!(Float::with_val(128, &s.values[0] - &s1).abs() < 1e-36);
        assert!(Float::with_val(128, &s.values[1] - &s2).abs() < 1e-36);
        assert!(s.error_bounds.iter().all(|&e| e < 1e-30));
    }

    #[test]
    fn wide_matrix_uses_adjoint() {
        let m = ComplexMatrix::from_rows(&[vec![(3.0, 0.0), (0.0, 0.0), (4.0, 0.0)]], 128).unwrap();
        let d = svd(&m, &ctx()).unwrap();
        assert_eq!(d.spectrum.values_f64(), vec![5.0]);
        assert_eq!((d.u.rows(), d.v.rows()), (1, 3));
    }

    #[test]
    fn vectors_reconstruct_complex_matrix() {
        let m = ComplexMatrix::from_rows(
            &[
                vec![(1.0, 0.5), (0.0, 2.0), (-1.0, 0.0)],
                vec![(0.25, -1.0), (3.0, 0.0), (0.0, 1.0)],
                vec![(2.0, 0.0), (1.0, 1.0), (0.5, -0.5)],
            ],
            128,
        )
        .unwrap();
        let d = svd(&m, &ctx()).unwrap();
        let n = 3;
        let mut sigma = ComplexMatrix::zeros(n, n, 128);
        for k in 0..n {
            sigma.set_parts(k, k, &d.spectrum.values[k], &Float::new(128));
        }
        let rec = d.u.mul(&sigma).unwrap().mul(&d.v.conj_transpose()).unwrap();
        for i in 0..n {
            for j in 0..n {
                let diff = rec.get(i, j) - m.get(i, j);
                assert!(Float::with_val(64, diff.abs_ref()).to_f64() < 1e-30);
            }
        }
    }

    #[test]
    fn schedule_covers_every_pair_once() {
        for n in [2usize, 5, 8] {
            let mut seen = std::collections::HashSet::new();
            for round in round_robin(n) {
                let mut used = std::collections::HashSet::new();
                for (p, q) in round {
                    assert!(used.insert(p) && used.insert(q));
                    assert!(seen.insert((p, q)));
                }
            }
            assert_eq!(seen.len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn rejects_unsorted_spectrum() {
        let src = SpectrumSource { rows: 2, cols: 2, bits: 64, sweeps: 0, max_cosine: 0.0 };
        let v = vec![Float::with_val(64, 1), Float::with_val(64, 2)];
        assert!(SingularSpectrum::new(v, vec![0.0, 0.0], src).is_err());
    }
}
