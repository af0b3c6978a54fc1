//! Truncated power series with certified coefficient errors.
//!
//! A [`PowerSeries`] stores `c_0..c_N` of an analytic function on the unit
//! disk together with a uniform per-coefficient error bound. Coefficients
//! below the valuation are exact zeros and carry no error. Two optional
//! facts about the underlying function sharpen error propagation: a bound
//! on `sup |f|` over the disk (multiplication by such an `f` is contractive
//! on truncated coefficient vectors up to that bound), and a coefficient
//! majorant `|c_m| <= B rho^-m` used to bound tails when recentring.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Guard bits carried by series on top of the context precision.
pub const GUARD_BITS: u32 = 32;

/// Default quadrature radius; the symbols of interest have boundary
/// singularities, so the contour stays well inside the disk.
pub const DEFAULT_RADIUS: f64 = 0.875;

/// Accuracy assumed of a single evaluator call, in units of the working
/// precision: `|computed - exact| <= B * 2^(EVAL_SLACK_BITS - wp)`.
const EVAL_SLACK_BITS: i32 = 24;

/// Coefficient majorant `|c_m| <= bound * radius^-m`, valid for every `m`
/// including indices past the stored truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Majorant {
    pub bound: f64,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct PowerSeries {
    re: Vec<Float>,
    im: Option<Vec<Float>>,
    valuation: usize,
    error: f64,
    l2_error: f64,
    sup: Option<f64>,
    majorant: Option<Majorant>,
    prec: u32,
}

impl PowerSeries {
    /// The zero series of order `n`.
    pub fn zero(n: usize, prec: u32) -> Self {
        Self {
            re: vec![Float::new(prec); n + 1],
            im: None,
            valuation: n + 1,
            error: 0.0,
            l2_error: 0.0,
            sup: Some(0.0),
            majorant: None,
            prec,
        }
    }

    /// `z^k` truncated at order `n` (the zero series when `k > n`).
    pub fn monomial(k: usize, n: usize, prec: u32) -> Self {
        let mut s = Self::zero(n, prec);
        if k <= n {
            s.re[k].assign(1);
            s.valuation = k;
        }
        s.sup = Some(1.0);
        s
    }

    pub fn one(n: usize, prec: u32) -> Self {
        Self::monomial(0, n, prec)
    }

    /// Exact polynomial with real coefficients.
    pub fn from_real(coeffs: Vec<Float>, prec: u32) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        let re = coeffs.into_iter().map(|c| Float::with_val(prec, c)).collect();
        Self::assemble(re, None, prec)
    }

    /// Exact polynomial with complex coefficients.
    pub fn from_complex(coeffs: &[Complex], prec: u32) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        let re = coeffs.iter().map(|c| Float::with_val(prec, c.real())).collect();
        let im = coeffs.iter().map(|c| Float::with_val(prec, c.imag())).collect();
        Self::assemble(re, Some(im), prec)
    }

    pub fn from_f64(coeffs: &[f64], prec: u32) -> Self {
        Self::from_real(coeffs.iter().map(|&c| Float::with_val(prec, c)).collect(), prec)
    }

    fn assemble(re: Vec<Float>, im: Option<Vec<Float>>, prec: u32) -> Self {
        let mut s = Self {
            re,
            im,
            valuation: 0,
            error: 0.0,
            l2_error: 0.0,
            sup: None,
            majorant: None,
            prec,
        };
        if s.im.as_ref().is_some_and(|im| im.iter().all(|x| x.is_zero())) {
            s.im = None;
        }
        s.valuation = (0..s.re.len()).find(|&k| !s.is_zero_at(k)).unwrap_or(s.re.len());
        s
    }

    /// Sets the uniform coefficient error (and the matching l2 bound).
    pub fn with_error(mut self, error: f64) -> Self {
        self.error = error;
        self.l2_error = error * ((self.len() - self.valuation.min(self.len())) as f64).sqrt();
        self
    }

    /// Records `sup |f| <= bound` on the unit disk. This also gives the
    /// Cauchy majorant `|c_m| <= bound`.
    pub fn with_sup(mut self, bound: f64) -> Self {
        self.sup = Some(bound);
        if self.majorant.is_none() {
            self.majorant = Some(Majorant { bound, radius: 1.0 });
        }
        self
    }

    /// Replaces the l2 error bound (e.g. with a sharper one known to the
    /// caller). Must be called after [`with_error`](Self::with_error).
    pub fn with_l2_error(mut self, l2: f64) -> Self {
        self.l2_error = l2;
        self
    }

    pub fn with_majorant(mut self, majorant: Majorant) -> Self {
        self.majorant = Some(majorant);
        self
    }

    /// Declares the coefficients below `v` to be exactly zero.
    pub fn with_valuation(mut self, v: usize) -> Self {
        let v = v.min(self.len());
        for k in 0..v {
            self.re[k].assign(0);
            if let Some(im) = &mut self.im {
                im[k].assign(0);
            }
        }
        self.valuation = self.valuation.max(v);
        self
    }

    /// Declares every coefficient real and drops the imaginary parts.
    pub fn into_real(mut self) -> Self {
        self.im = None;
        self
    }

    pub fn trunc_order(&self) -> usize {
        self.re.len() - 1
    }

    fn len(&self) -> usize {
        self.re.len()
    }

    /// Uniform bound on `|computed c_k - c_k|` for `k >= valuation`.
    pub fn coeff_error(&self) -> f64 {
        self.error
    }

    /// Bound on the Euclidean norm of the coefficient error vector.
    pub fn l2_error(&self) -> f64 {
        self.l2_error
    }

    /// Coefficients below this index are exact zeros.
    pub fn valuation(&self) -> usize {
        self.valuation
    }

    pub fn is_real(&self) -> bool {
        self.im.is_none()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup
    }

    pub fn majorant(&self) -> Option<Majorant> {
        self.majorant
    }

    pub fn re(&self, k: usize) -> &Float {
        &self.re[k]
    }

    pub fn im(&self, k: usize) -> Option<&Float> {
        self.im.as_ref().map(|im| &im[k])
    }

    pub fn coeff(&self, k: usize) -> Complex {
        match &self.im {
            Some(im) => Complex::with_val(self.prec, (&self.re[k], &im[k])),
            None => Complex::with_val(self.prec, (&self.re[k], 0)),
        }
    }

    pub fn coeffs(&self) -> Vec<Complex> {
        (0..self.len()).map(|k| self.coeff(k)).collect()
    }

    fn is_zero_at(&self, k: usize) -> bool {
        self.re[k].is_zero() && self.im.as_ref().is_none_or(|im| im[k].is_zero())
    }

    fn abs_f64_at(&self, k: usize) -> f64 {
        let r = self.re[k].to_f64();
        match &self.im {
            Some(im) => r.hypot(im[k].to_f64()),
            None => r.abs(),
        }
    }

    pub fn l1_norm(&self) -> f64 {
        (0..self.len()).map(|k| self.abs_f64_at(k)).sum::<f64>() * (1.0 + 1e-12)
    }

    pub fn l2_norm(&self) -> f64 {
        (0..self.len())
            .map(|k| self.abs_f64_at(k).powi(2))
            .sum::<f64>()
            .sqrt()
            * (1.0 + 1e-12)
    }

    /// `max_k |c_k|`.
    pub fn max_abs(&self) -> f64 {
        (0..self.len()).map(|k| self.abs_f64_at(k)).fold(0.0, f64::max)
    }

    /// Bound on the l1 norm of the error vector.
    fn l1_error(&self) -> f64 {
        let active = (self.len() - self.valuation.min(self.len())) as f64;
        (active * self.error).min(active.sqrt() * self.l2_error)
    }

    /// Bound on the spectral norm of the lower-triangular Toeplitz section
    /// built from these coefficients, valid for both the computed and the
    /// exact coefficients.
    fn toeplitz_norm(&self) -> f64 {
        let d = self.l1_error();
        let by_l1 = self.l1_norm() + d;
        match self.sup {
            Some(s) => by_l1.min(s + d),
            None => by_l1,
        }
    }

    /// Value of the stored polynomial at `z`.
    pub fn evaluate(&self, z: &Complex) -> Complex {
        let mut acc = Complex::new(self.prec);
        for k in (0..self.len()).rev() {
            acc *= z;
            acc += self.coeff(k);
        }
        acc
    }

    /// Coefficientwise sum, truncated to the shorter order.
    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let n = self.len().min(other.len());
        let prec = self.prec.max(other.prec);
        let op = |a: &Float, b: &Float| {
            if negate {
                Float::with_val(prec, a - b)
            } else {
                Float::with_val(prec, a + b)
            }
        };
        let re: Vec<Float> = (0..n).map(|k| op(&self.re[k], &other.re[k])).collect();
        let im = if self.im.is_none() && other.im.is_none() {
            None
        } else {
            let zero = Float::new(prec);
            let get = |s: &Self, k: usize| s.im.as_ref().map(|v| v[k].clone()).unwrap_or_else(|| zero.clone());
            Some((0..n).map(|k| op(&get(self, k), &get(other, k))).collect())
        };
        let round = self.max_abs().max(other.max_abs()) * 2.0 * ulp(prec);
        let mut out = Self::assemble(re, im, prec);
        out.valuation = out.valuation.max(self.valuation.min(other.valuation));
        out.error = self.error + other.error + round;
        out.l2_error = self.l2_error + other.l2_error + round * (n as f64).sqrt();
        out.sup = self.sup.zip(other.sup).map(|(a, b)| a + b);
        out.majorant = match (self.majorant, other.majorant) {
            (Some(a), Some(b)) => Some(Majorant {
                bound: a.bound + b.bound,
                radius: a.radius.min(b.radius),
            }),
            _ => None,
        };
        out
    }

    /// Multiplies every coefficient by the complex scalar `c` (exact input).
    pub fn scale(&self, c: &Complex) -> Self {
        let prec = self.prec;
        let real = self.im.is_none() && c.imag().is_zero();
        let coeffs: Vec<Complex> = (0..self.len())
            .map(|k| Complex::with_val(prec, &self.coeff(k) * c))
            .collect();
        let abs_c = Float::with_val(64, c.abs_ref()).to_f64();
        let mut out = if real {
            Self::from_real(coeffs.iter().map(|x| x.real().clone()).collect(), prec)
        } else {
            Self::from_complex(&coeffs, prec)
        };
        let round = self.max_abs() * abs_c * 4.0 * ulp(prec);
        out.valuation = out.valuation.max(self.valuation);
        out.error = self.error * abs_c + round;
        out.l2_error = self.l2_error * abs_c + round * (self.len() as f64).sqrt();
        out.sup = self.sup.map(|s| s * abs_c);
        out.majorant = self.majorant.map(|m| Majorant {
            bound: m.bound * abs_c,
            radius: m.radius,
        });
        out
    }

    /// Adds the exact constant `c` to the constant coefficient.
    pub fn add_constant(&self, c: &Complex) -> Self {
        let mut coeffs = self.coeffs();
        coeffs[0] += c;
        let real = self.im.is_none() && c.imag().is_zero();
        let mut out = if real {
            Self::from_real(coeffs.iter().map(|x| x.real().clone()).collect(), self.prec)
        } else {
            Self::from_complex(&coeffs, self.prec)
        };
        let abs_c = Float::with_val(64, c.abs_ref()).to_f64();
        let round = (self.abs_f64_at(0) + abs_c) * 2.0 * ulp(self.prec);
        out.error = self.error + round;
        out.l2_error = self.l2_error + round;
        out.sup = self.sup.map(|s| s + abs_c);
        out.majorant = self.majorant.map(|m| Majorant {
            bound: m.bound + abs_c,
            radius: m.radius,
        });
        out
    }
}

fn ulp(prec: u32) -> f64 {
    (1.0 - prec as f64).exp2()
}

/// Contour and sampling parameters for [`coeffs_via_cauchy`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    /// Contour radius, in (0, 1).
    pub radius: f64,
    /// Number of equispaced nodes M.
    pub points: usize,
    /// Bound on `|f|` over the unit disk.
    pub bound: f64,
    /// The function satisfies `f(conj z) = conj f(z)`: only half the nodes
    /// are evaluated and the result is real.
    pub real: bool,
}

impl Quadrature {
    /// Radius 0.875 and `M = max(4N, ceil((N ln(1/r) + ln(1/eps)) / ln(1/r)))`
    /// with `eps = 2^-bits`.
    pub fn for_order(n: usize, bits: u32) -> Self {
        Self {
            radius: DEFAULT_RADIUS,
            points: default_points(n, DEFAULT_RADIUS, bits),
            bound: 1.0,
            real: false,
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_real(mut self, real: bool) -> Self {
        self.real = real;
        self
    }

    pub fn with_radius(mut self, radius: f64, bits: u32, n: usize) -> Self {
        self.radius = radius;
        self.points = default_points(n, radius, bits);
        self
    }

    /// The aliasing part of the certificate, `B r^(M-N) / (1 - r^M)`.
    pub fn aliasing_bound(&self, n: usize) -> f64 {
        let r = self.radius;
        self.bound * r.powi((self.points - n) as i32) / (1.0 - r.powi(self.points as i32))
    }
}

fn default_points(n: usize, r: f64, bits: u32) -> usize {
    let l = (1.0 / r).ln();
    let by_eps = ((n as f64 * l + bits as f64 * std::f64::consts::LN_2) / l).ceil() as usize;
    (4 * n).max(by_eps).max(n + 1)
}

/// Taylor coefficients `c_0..c_N` of `f` by the trapezoidal rule on the
/// circle `|z| = r`:
/// `c_k = r^-k (1/M) sum_j f(r w^j) w^-jk`, `w = e^(2 pi i / M)`.
///
/// The computed value equals `c_k + sum_{m>=1} c_{k+mM} r^{mM}`, so with
/// `|f| <= B` on the disk the aliasing error is below `B r^(M-N)/(1-r^M)`.
/// `f` receives nodes at the working precision and must return values
/// accurate to a few ulps relative to `B`.
pub fn coeffs_via_cauchy<F>(f: F, n: usize, quad: &Quadrature, ctx: &PrecisionContext) -> Result<PowerSeries>
where
    F: Fn(&Complex) -> Result<Complex> + Sync,
{
    let r = quad.radius;
    let m = quad.points;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Parameter(format!("quadrature radius must lie in (0, 1), got {r}")));
    }
    if m <= n {
        return Err(Error::Parameter(format!(
            "quadrature needs more nodes than coefficients: M = {m}, N = {n}"
        )));
    }
    if !(quad.bound.is_finite() && quad.bound > 0.0) {
        return Err(Error::Parameter(format!("sup bound must be positive, got {}", quad.bound)));
    }
    let prec = ctx.bits() + GUARD_BITS;
    // r^-k amplifies evaluation errors by up to r^-N; absorb it in guard bits.
    let amplification = (n as f64 * (1.0 / r).log2()).ceil() as u32;
    let wp = prec + amplification + 8;

    let two_pi = Float::with_val(wp, rug::float::Constant::Pi) * 2u32;
    let (cos, sin): (Vec<Float>, Vec<Float>) = (0..m)
        .into_par_iter()
        .map(|t| {
            let theta = Float::with_val(wp, &two_pi * t as u32) / m as u32;
            let (s, c) = theta.sin_cos(Float::new(wp));
            (c, s)
        })
        .unzip();
    let radius = Float::with_val(wp, r);
    let nodes = if quad.real { m / 2 + 1 } else { m };
    let values: Vec<Complex> = (0..nodes)
        .into_par_iter()
        .map(|j| {
            let z = Complex::with_val(wp, (Float::with_val(wp, &radius * &cos[j]), Float::with_val(wp, &radius * &sin[j])));
            f(&z).map(|w| Complex::with_val(wp, w))
        })
        .collect::<Result<_>>()?;
    for (j, v) in values.iter().enumerate() {
        if !(v.real().is_finite() && v.imag().is_finite()) {
            return Err(Error::Domain(format!("non-finite value at quadrature node {j}")));
        }
    }

    let inv_r = Float::with_val(wp, 1u32) / &radius;
    let coeffs: Vec<(Float, Float)> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let mut s_re = Float::new(wp);
            let mut s_im = Float::new(wp);
            let mut t = Float::new(wp);
            for (j, v) in values.iter().enumerate() {
                let idx = (j * k) % m;
                let (c, s) = (&cos[idx], &sin[idx]);
                // v * (c - i s)
                let weight = if quad.real && j != 0 && 2 * j != m { 2u32 } else { 1u32 };
                let mut term = Float::with_val(wp, v.real() * c);
                t.assign(v.imag() * s);
                term += &t;
                if weight == 2 {
                    term *= 2u32;
                }
                s_re += &term;
                if !quad.real {
                    term.assign(v.imag() * c);
                    t.assign(v.real() * s);
                    term -= &t;
                    s_im += &term;
                }
            }
            let scale = Float::with_val(wp, (&inv_r).pow(k as u32)) / m as u32;
            s_re *= &scale;
            s_im *= &scale;
            (Float::with_val(prec, &s_re), Float::with_val(prec, &s_im))
        })
        .collect();

    let (re, im): (Vec<Float>, Vec<Float>) = coeffs.into_iter().unzip();
    let im = (!quad.real).then_some(im);
    let aliasing = quad.aliasing_bound(n);
    let rounding = quad.bound
        * (r.powi(-(n as i32)) * ((EVAL_SLACK_BITS as f64).exp2() + 4.0 * m as f64) * (-(wp as f64)).exp2()
            + ulp(prec));
    let series = PowerSeries::assemble(re, im, prec);
    Ok(series.with_error(aliasing + rounding).with_sup(quad.bound))
}

/// Cauchy product truncated at order `n`. Both factors are multiplied as
/// the polynomials they store.
pub fn series_multiply(a: &PowerSeries, b: &PowerSeries, n: usize) -> PowerSeries {
    let prec = a.prec.max(b.prec);
    let (ha, hb) = (a.trunc_order(), b.trunc_order());
    let valuation = a.valuation + b.valuation;
    let complex = a.im.is_some() || b.im.is_some();
    let coeffs: Vec<(Float, Option<Float>)> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let mut re = Float::new(prec);
            let mut im = complex.then(|| Float::new(prec));
            if k < valuation {
                return (re, im);
            }
            let lo = a.valuation.max(k.saturating_sub(hb));
            let hi = ha.min(k - b.valuation);
            let mut t = Float::new(prec);
            for i in lo..=hi {
                let j = k - i;
                t.assign(&a.re[i] * &b.re[j]);
                re += &t;
                if let Some(im) = im.as_mut() {
                    if let (Some(ai), Some(bi)) = (&a.im, &b.im) {
                        t.assign(&ai[i] * &bi[j]);
                        re -= &t;
                    }
                    if let Some(bi) = &b.im {
                        t.assign(&a.re[i] * &bi[j]);
                        *im += &t;
                    }
                    if let Some(ai) = &a.im {
                        t.assign(&ai[i] * &b.re[j]);
                        *im += &t;
                    }
                }
            }
            (re, im)
        })
        .collect();
    let (re, im): (Vec<Float>, Vec<Option<Float>>) = coeffs.into_iter().unzip();
    let im = complex.then(|| im.into_iter().map(Option::unwrap).collect());

    let len = (n + 1) as f64;
    let (ea, eb) = (a.error, b.error);
    let classic = a.l1_norm() * eb + b.l1_norm() * ea + len * ea * eb;
    let (ta, tb) = (a.toeplitz_norm(), b.toeplitz_norm());
    let l2 = ta * b.l2_error + tb * a.l2_error;
    let rounding = 4.0 * len * ulp(prec) * a.l2_norm() * b.l2_norm();

    let mut out = PowerSeries::assemble(re, im, prec);
    out.valuation = out.valuation.max(valuation.min(n + 1));
    out.error = classic.min(l2) + rounding;
    out.l2_error = l2.min(len.sqrt() * classic) + len.sqrt() * rounding;
    out.sup = a.sup.zip(b.sup).map(|(x, y)| x * y);
    out.majorant = out.sup.map(|bound| Majorant { bound, radius: 1.0 });
    out
}

/// `a^j` truncated at `n`, by `j` successive [`series_multiply`] calls.
pub fn series_power(a: &PowerSeries, j: usize, n: usize) -> PowerSeries {
    let mut acc = PowerSeries::one(n, a.prec);
    for _ in 0..j {
        acc = series_multiply(&acc, a, n);
    }
    acc
}

/// The powers `a^0, a^1, ...` truncated at `n`, each obtained from its
/// predecessor by one multiplication.
pub struct Powers<'a> {
    base: &'a PowerSeries,
    next: PowerSeries,
    n: usize,
}

impl<'a> Powers<'a> {
    pub fn new(base: &'a PowerSeries, n: usize) -> Self {
        Self {
            base,
            next: PowerSeries::one(n, base.prec),
            n,
        }
    }
}

impl Iterator for Powers<'_> {
    type Item = PowerSeries;

    fn next(&mut self) -> Option<PowerSeries> {
        let following = series_multiply(&self.next, self.base, self.n);
        Some(std::mem::replace(&mut self.next, following))
    }
}

/// `outer(inner(z))` truncated at `n`, by Horner's rule. A nonzero constant
/// term of `inner` is first absorbed into `outer` by a Taylor shift; that
/// needs `|inner(0)|` inside the radius of `outer`'s majorant (or `outer`
/// to be an exact polynomial).
pub fn series_compose(outer: &PowerSeries, inner: &PowerSeries, n: usize) -> Result<PowerSeries> {
    let prec = outer.prec.max(inner.prec);
    let (outer, inner) = if inner.valuation == 0 && !inner.is_zero_at(0) {
        let c = inner.coeff(0);
        (recentre(outer, &c, n)?, inner.sub_constant_zero())
    } else {
        (outer.clone(), inner.clone())
    };
    let top = outer.trunc_order().min(n);
    let mut acc = PowerSeries::zero(n, prec);
    acc.re[0].assign(&outer.re[top]);
    if let Some(im) = &outer.im {
        acc.im = Some(vec![Float::new(prec); n + 1]);
        acc.im.as_mut().unwrap()[0].assign(&im[top]);
    }
    acc = PowerSeries::assemble(acc.re, acc.im, prec);
    acc.error = outer.error;
    acc.l2_error = outer.error;
    for k in (0..top).rev() {
        acc = series_multiply(&acc, &inner, n).add_constant(&outer.coeff(k));
        acc.error += outer.error;
        acc.l2_error += outer.error;
    }
    // Only c_0..c_n of outer enter c_0..c_n of the composition.
    acc.sup = match (outer.sup, inner.sup) {
        (Some(s), Some(t)) if t <= 1.0 => Some(s),
        _ => None,
    };
    acc.majorant = acc.sup.map(|bound| Majorant { bound, radius: 1.0 });
    Ok(acc)
}

impl PowerSeries {
    /// Copy with the constant coefficient set to an exact zero.
    fn sub_constant_zero(&self) -> Self {
        let mut s = self.clone();
        s.re[0].assign(0);
        if let Some(im) = &mut s.im {
            im[0].assign(0);
        }
        s.valuation = (1..s.len()).find(|&k| !s.is_zero_at(k)).unwrap_or(s.len());
        s.sup = self.sup.map(|b| b + self.abs_f64_at(0));
        s
    }
}

/// Taylor shift: coefficients `0..=min(n, N)` of `w -> f(c + w)`.
fn recentre(f: &PowerSeries, c: &Complex, n: usize) -> Result<PowerSeries> {
    let abs_c = Float::with_val(64, c.abs_ref()).to_f64();
    let big_n = f.trunc_order();
    let exact = f.majorant.is_none() && f.error == 0.0;
    if !exact {
        let Some(maj) = f.majorant else {
            return Err(Error::Domain(
                "cannot recentre a truncated series without a coefficient majorant".into(),
            ));
        };
        if abs_c >= maj.radius {
            return Err(Error::Domain(format!(
                "inner constant term |{abs_c}| lies outside the outer series' disk of radius {}",
                maj.radius
            )));
        }
    }
    let prec = f.prec;
    let mut p = f.coeffs();
    for k in 0..big_n {
        for j in (k..big_n).rev() {
            let t = Complex::with_val(prec, c * &p[j + 1]);
            p[j] += t;
        }
    }
    // Error amplification sum_{m=k..N} C(m,k)|c|^(m-k) and the truncated tail
    // sum_{m>N} C(m,k)|c|^(m-k) B rho^-m, evaluated in log space.
    let mut worst_gain = 0.0f64;
    let mut worst_tail = 0.0f64;
    let coeff_max = f.max_abs();
    let ln_c = abs_c.ln();
    let keep = n.min(big_n);
    for k in 0..=keep {
        let mut gain = 0.0;
        for m in k..=big_n {
            gain += (ln_binom(m, k) + (m - k) as f64 * ln_c).exp();
        }
        worst_gain = worst_gain.max(gain);
        if let (false, Some(maj)) = (exact, f.majorant) {
            let mut tail = 0.0;
            let mut m = big_n + 1;
            loop {
                let term = maj.bound * (ln_binom(m, k) + (m - k) as f64 * ln_c - m as f64 * maj.radius.ln()).exp();
                tail += term;
                let ratio = (m + 1) as f64 / (m + 1 - k) as f64 * abs_c / maj.radius;
                if ratio < 1.0 && term * ratio / (1.0 - ratio) < tail * 1e-3 {
                    tail += term * ratio / (1.0 - ratio);
                    break;
                }
                m += 1;
                if m > big_n + 1_000_000 {
                    return Err(Error::Domain("recentring tail does not converge".into()));
                }
            }
            worst_tail = worst_tail.max(tail);
        }
    }
    let rounding = 4.0 * (big_n + 1) as f64 * ulp(prec) * coeff_max * worst_gain;
    p.truncate(keep + 1);
    let mut out = PowerSeries::from_complex(&p, prec);
    if f.im.is_none() && c.imag().is_zero() {
        out = out.into_real();
    }
    let error = f.error * worst_gain + worst_tail + rounding;
    Ok(out.with_error(error))
}

fn ln_binom(m: usize, k: usize) -> f64 {
    ln_factorial(m) - ln_factorial(k) - ln_factorial(m - k)
}

fn ln_factorial(n: usize) -> f64 {
    let x = n as f64 + 1.0;
    if n < 20 {
        (1..=n).map(|i| (i as f64).ln()).sum()
    } else {
        // Stirling with two correction terms; accurate to ~1e-10 here.
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
    }
}
