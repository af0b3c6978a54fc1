//! Analytic self-maps of the unit disk: evaluation, derivatives, Taylor
//! coefficients and metadata.
//!
//! Every formula is generic over [`ComplexScalar`], so the same code runs in
//! `f64` for sampling and at full precision for coefficients and inversion.
//! Square roots and logarithms are principal branches throughout.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::scalar::ComplexScalar;
use crate::series::{coeffs_via_cauchy, PowerSeries, Quadrature};

/// Precision of stored constants such as the centre of a normalisation.
const CONSTANT_BITS: u32 = 1024;

/// Shapiro–Taylor outer function `f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StVariant {
    /// `f(w) = w log(-log w)`.
    LogLog,
    /// `f(w) = w (-log w)^(2/p) (log(-log w))^s`, `s > 1/p`.
    Power { p: f64, s: f64 },
}

/// The elementary maps used as oracles.
#[derive(Clone, Debug, PartialEq)]
pub enum Elementary {
    /// `z -> r z`, `0 < r <= 1`.
    Scale(f64),
    /// `z -> z^m`, `m >= 1`.
    Monomial(u32),
    /// Finite Blaschke product with the given zeros.
    Blaschke(Vec<Complex64>),
    /// `z -> scale z + shift` with `|scale| + |shift| <= 1`.
    Affine { scale: f64, shift: f64 },
}

#[derive(Clone, Debug)]
enum Kind {
    Cusp,
    Lens(f64),
    Automorphism(Complex64),
    HalfPlaneAuto,
    ShapiroTaylor { variant: StVariant, eps: f64 },
    Elementary(Elementary),
    Normalized { inner: Box<Symbol>, centre: Complex },
}

/// An analytic self-map of the disk with its metadata.
#[derive(Clone, Debug)]
pub struct Symbol {
    kind: Kind,
    fixes_origin: bool,
    univalent: bool,
    sup_norm_lt_one: bool,
    real_coefficients: bool,
    /// For normalised symbols, the factor `||C_{phi_a}||` on H^2 by which
    /// singular numbers of the original and normalised operators may differ.
    distortion: Option<f64>,
}

impl Symbol {
    /// The cusp map `chi`: `chi_0 = (S - i)/(-iS + 1)` with
    /// `S = ((z - i)/(iz - 1))^(1/2)`, then `chi = 1 - a/(1 - (2/pi) log chi_0)`
    /// with `a = 1 - (2/pi) log(sqrt 2 - 1)`, so that `chi(0) = 0`.
    pub fn cusp() -> Result<Self> {
        let s = Self {
            kind: Kind::Cusp,
            fixes_origin: true,
            univalent: true,
            sup_norm_lt_one: false,
            real_coefficients: true,
            distortion: None,
        };
        // Branch validation: chi(0) = 0 and chi((1+i)/2) in D(1 - a/2, a/2).
        let z0 = Complex::with_val(256, 0);
        let v0 = s.eval(&z0)?;
        if v0.abs_f64() >= 1e-30 {
            return Err(Error::Domain(format!("cusp chain misses the origin: chi(0) = {v0}")));
        }
        let a = cusp_constant(&Complex64::new(0.0, 0.0)).re;
        let w = s.eval(&Complex64::new(0.5, 0.5))?;
        if (w - Complex64::new(1.0 - a / 2.0, 0.0)).norm() >= a / 2.0 {
            return Err(Error::Domain(format!("cusp chain left the cusp region: chi((1+i)/2) = {w}")));
        }
        s.check_self_map()?;
        Ok(s)
    }

    /// The lens map `((1+z)^t - (1-z)^t) / ((1+z)^t + (1-z)^t)`, `0 < t < 1`.
    pub fn lens(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Parameter(format!("lens parameter must lie in (0, 1), got {theta}")));
        }
        let s = Self {
            kind: Kind::Lens(theta),
            fixes_origin: true,
            univalent: true,
            sup_norm_lt_one: false,
            real_coefficients: true,
            distortion: None,
        };
        s.check_self_map()?;
        Ok(s)
    }

    /// The involutive disk automorphism `(a - z)/(1 - conj(a) z)`.
    pub fn automorphism(a: Complex64) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(Error::Parameter(format!("automorphism centre must lie in the disk, got {a}")));
        }
        Ok(Self {
            kind: Kind::Automorphism(a),
            fixes_origin: a == Complex64::new(0.0, 0.0),
            univalent: true,
            sup_norm_lt_one: false,
            real_coefficients: a.im == 0.0,
            distortion: None,
        })
    }

    /// `T(z) = (2z + 1)/(z + 2)`, fixing 1 and -1.
    pub fn half_plane_auto() -> Self {
        Self {
            kind: Kind::HalfPlaneAuto,
            fixes_origin: false,
            univalent: true,
            sup_norm_lt_one: false,
            real_coefficients: true,
            distortion: None,
        }
    }

    /// `exp(-f(g(z)))`, where `g` maps the disk onto
    /// `V_eps = {Re w > 0, |w| < eps}` with `g(1) = 0`. Construction checks
    /// `Re f > 0` on a 100 x 100 polar grid of `V_eps`.
    pub fn shapiro_taylor(variant: StVariant, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < (-1.0f64).exp()) {
            return Err(Error::Parameter(format!("eps must lie in (0, 1/e), got {eps}")));
        }
        if let StVariant::Power { p, s } = variant {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::Parameter(format!("power variant needs p > 0, got {p}")));
            }
            if !(s > 1.0 / p && s.is_finite()) {
                return Err(Error::Parameter(format!("power variant needs s > 1/p, got s = {s}, p = {p}")));
            }
        }
        for j in 0..100 {
            // Log-spaced radii reach deep into the corner at 0.
            let t = j as f64 / 99.0;
            let rho = eps * (1e-8f64).powf(1.0 - t) * (1.0 - 1e-3 * t);
            for k in 0..100 {
                let alpha = -FRAC_PI_2 + PI * (k as f64 + 0.5) / 100.0;
                let w = Complex64::from_polar(rho, alpha);
                let fw = st_outer(&w, variant);
                if !(fw.re > 0.0) {
                    return Err(Error::Domain(format!(
                        "Re f(w) = {} <= 0 at w = {w} (|w| = {rho:e}, arg = {alpha}); eps = {eps} is too large",
                        fw.re
                    )));
                }
            }
        }
        let s = Self {
            kind: Kind::ShapiroTaylor { variant, eps },
            fixes_origin: false,
            univalent: true,
            sup_norm_lt_one: false,
            real_coefficients: true,
            distortion: None,
        };
        s.check_self_map()?;
        Ok(s)
    }

    pub fn elementary(kind: Elementary) -> Result<Self> {
        let (fixes_origin, univalent, sup_lt_one, real) = match &kind {
            Elementary::Scale(r) => {
                if !(*r > 0.0 && *r <= 1.0) {
                    return Err(Error::Parameter(format!("scale factor must lie in (0, 1], got {r}")));
                }
                (true, true, *r < 1.0, true)
            }
            Elementary::Monomial(m) => {
                if *m == 0 {
                    return Err(Error::Parameter("monomial degree must be at least 1".into()));
                }
                (true, *m == 1, false, true)
            }
            Elementary::Blaschke(zeros) => {
                if zeros.is_empty() {
                    return Err(Error::Parameter("Blaschke product needs at least one zero".into()));
                }
                if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
                    return Err(Error::Parameter(format!("Blaschke zero {z} is not in the disk")));
                }
                let origin = zeros.iter().any(|z| z.norm() == 0.0);
                (origin, zeros.len() == 1, false, zeros.iter().all(|z| z.im == 0.0))
            }
            Elementary::Affine { scale, shift } => {
                if !(scale.abs() + shift.abs() <= 1.0 && *scale != 0.0) {
                    return Err(Error::Parameter(format!(
                        "affine map needs 0 < |scale| and |scale| + |shift| <= 1, got {scale}, {shift}"
                    )));
                }
                (*shift == 0.0, true, scale.abs() + shift.abs() < 1.0, true)
            }
        };
        Ok(Self {
            kind: Kind::Elementary(kind),
            fixes_origin,
            univalent,
            sup_norm_lt_one: sup_lt_one,
            real_coefficients: real,
            distortion: None,
        })
    }

    /// `phi_{s(0)} o s`, which fixes the origin. Symbols that already fix
    /// the origin are returned unchanged.
    pub fn normalize(s: &Symbol) -> Result<Self> {
        if s.fixes_origin {
            return Ok(s.clone());
        }
        let centre = s.eval(&Complex::with_val(CONSTANT_BITS, 0))?;
        let r = centre.abs_f64();
        Ok(Self {
            real_coefficients: s.real_coefficients,
            univalent: s.univalent,
            sup_norm_lt_one: false,
            fixes_origin: true,
            distortion: Some(((1.0 + r) / (1.0 - r)).sqrt()),
            kind: Kind::Normalized {
                inner: Box::new(s.clone()),
                centre,
            },
        })
    }

    pub fn fixes_origin(&self) -> bool {
        self.fixes_origin
    }

    /// Recorded, not proven.
    pub fn univalent(&self) -> bool {
        self.univalent
    }

    pub fn sup_norm_lt_one(&self) -> bool {
        self.sup_norm_lt_one
    }

    /// `phi(conj z) = conj phi(z)`, so all Taylor coefficients are real.
    pub fn real_coefficients(&self) -> bool {
        self.real_coefficients
    }

    pub fn distortion(&self) -> Option<f64> {
        self.distortion
    }

    /// Indices below this are exact zeros of the Taylor series.
    pub fn valuation(&self) -> usize {
        match &self.kind {
            Kind::Elementary(Elementary::Monomial(m)) => *m as usize,
            Kind::Elementary(Elementary::Blaschke(zeros)) => zeros.iter().filter(|z| z.norm() == 0.0).count(),
            _ => self.fixes_origin as usize,
        }
    }

    /// Boundary points at which `|phi|` reaches 1 while `phi` is singular
    /// there (where pull-back mass concentrates). Empty for maps that are
    /// regular on the closed disk.
    pub fn contact_points(&self) -> Vec<Complex64> {
        match &self.kind {
            Kind::Cusp | Kind::ShapiroTaylor { .. } => vec![Complex64::new(1.0, 0.0)],
            Kind::Lens(_) => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            Kind::Normalized { inner, .. } => inner.contact_points(),
            _ => Vec::new(),
        }
    }

    /// The spec string, e.g. `lens:0.5`.
    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn eval<T: ComplexScalar>(&self, z: &T) -> Result<T> {
        let v = match &self.kind {
            Kind::Cusp => cusp(z)?.0,
            Kind::Lens(t) => lens(z, *t)?.0,
            Kind::Automorphism(a) => mobius(z, a)?.0,
            Kind::HalfPlaneAuto => half_plane(z)?.0,
            Kind::ShapiroTaylor { variant, eps } => shapiro_taylor(z, *variant, *eps)?.0,
            Kind::Elementary(e) => elementary(z, e)?.0,
            Kind::Normalized { inner, centre } => {
                let w = inner.eval(z)?;
                let a = T::from_mp(centre, z);
                mobius_mp(&w, &a)?.0
            }
        };
        finite(v, z)
    }

    pub fn derivative<T: ComplexScalar>(&self, z: &T) -> Result<T> {
        let d = match &self.kind {
            Kind::Cusp => cusp(z)?.1,
            Kind::Lens(t) => lens(z, *t)?.1,
            Kind::Automorphism(a) => mobius(z, a)?.1,
            Kind::HalfPlaneAuto => half_plane(z)?.1,
            Kind::ShapiroTaylor { variant, eps } => shapiro_taylor(z, *variant, *eps)?.1,
            Kind::Elementary(e) => elementary(z, e)?.1,
            Kind::Normalized { inner, centre } => {
                let w = inner.eval(z)?;
                let dw = inner.derivative(z)?;
                let a = T::from_mp(centre, z);
                mobius_mp(&w, &a)?.1 * dw
            }
        };
        finite(d, z)
    }

    /// Taylor coefficients `c_0..c_N` by Cauchy quadrature with `B = 1`.
    pub fn taylor(&self, n: usize, ctx: &PrecisionContext) -> Result<PowerSeries> {
        let quad = Quadrature::for_order(n, ctx.bits()).with_real(self.real_coefficients);
        let series = coeffs_via_cauchy(|z| self.eval(z), n, &quad, ctx)?;
        Ok(series.with_valuation(self.valuation()))
    }

    /// Max of `|phi|` over a 16 x 16 polar grid of radii up to 0.99.
    pub fn max_abs_on_grid(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..16 {
            let r = 0.99 * (i as f64 + 1.0) / 16.0;
            for k in 0..16 {
                let z = Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.25) / 16.0);
                worst = worst.max(self.eval(&z)?.norm());
            }
        }
        Ok(worst)
    }

    fn check_self_map(&self) -> Result<()> {
        let m = self.max_abs_on_grid()?;
        if m < 1.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("{self} is not a self-map of the disk: max |phi| = {m}")))
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Cusp => write!(f, "cusp"),
            Kind::Lens(t) => write!(f, "lens:{t}"),
            Kind::Automorphism(a) => write!(f, "auto:{}", fmt_complex(a)),
            Kind::HalfPlaneAuto => write!(f, "halfplane-auto"),
            Kind::ShapiroTaylor { variant: StVariant::LogLog, eps } => write!(f, "st-log:{eps}"),
            Kind::ShapiroTaylor {
                variant: StVariant::Power { p, s },
                eps,
            } => write!(f, "st-pow:{p},{s},{eps}"),
            Kind::Elementary(Elementary::Scale(r)) => write!(f, "scale:{r}"),
            Kind::Elementary(Elementary::Monomial(m)) => write!(f, "monomial:{m}"),
            Kind::Elementary(Elementary::Blaschke(zeros)) => {
                let parts: Vec<String> = zeros.iter().map(fmt_complex).collect();
                write!(f, "blaschke:{}", parts.join(","))
            }
            Kind::Elementary(Elementary::Affine { scale, shift }) => write!(f, "affine:{scale},{shift}"),
            Kind::Normalized { inner, .. } => write!(f, "normalize:{inner}"),
        }
    }
}

fn fmt_complex(z: &Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `0.3`, `0.3+0.1i`, `-0.2-1e-3i`, `0.5i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad complex number '{s}'"));
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not leading and not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), a.trim()),
            None => (s, ""),
        };
        let num = |a: &str| -> Result<f64> {
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{a}' in symbol '{s}'")))
        };
        let list = |a: &str| -> Result<Vec<f64>> { a.split(',').map(num).collect() };
        let need = |ok: bool| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Parse(format!("wrong number of parameters in symbol '{s}'")))
            }
        };
        match kind {
            "cusp" => {
                need(arg.is_empty())?;
                Self::cusp()
            }
            "lens" => Self::lens(if arg.is_empty() { 0.5 } else { num(arg)? }),
            "auto" => Self::automorphism(parse_complex(arg)?),
            "halfplane-auto" => {
                need(arg.is_empty())?;
                Ok(Self::half_plane_auto())
            }
            "scale" => Self::elementary(Elementary::Scale(num(arg)?)),
            "monomial" => {
                let m: u32 = arg
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad monomial degree '{arg}'")))?;
                Self::elementary(Elementary::Monomial(m))
            }
            "blaschke" => {
                let zeros = arg.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
                Self::elementary(Elementary::Blaschke(zeros))
            }
            "affine" => {
                let v = list(arg)?;
                need(v.len() == 2)?;
                Self::elementary(Elementary::Affine { scale: v[0], shift: v[1] })
            }
            "st-log" => Self::shapiro_taylor(StVariant::LogLog, if arg.is_empty() { 0.01 } else { num(arg)? }),
            "st-pow" => {
                let v = list(arg)?;
                need(v.len() == 2 || v.len() == 3)?;
                let eps = v.get(2).copied().unwrap_or(0.01);
                Self::shapiro_taylor(StVariant::Power { p: v[0], s: v[1] }, eps)
            }
            "normalize" => Self::normalize(&arg.parse()?),
            _ => Err(Error::Parse(format!("unknown symbol '{s}'"))),
        }
    }
}

fn finite<T: ComplexScalar>(v: T, z: &T) -> Result<T> {
    if v.re_f64().is_finite() && v.im_f64().is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!(
            "non-finite value at z = {}{:+}i",
            z.re_f64(),
            z.im_f64()
        )))
    }
}

fn reject_outside<T: ComplexScalar>(z: &T) -> Result<()> {
    if z.abs_f64() > 1.0 {
        Err(Error::Domain(format!(
            "z = {}{:+}i lies outside the closed disk",
            z.re_f64(),
            z.im_f64()
        )))
    } else {
        Ok(())
    }
}

fn reject_points<T: ComplexScalar>(z: &T, points: &[(f64, f64)]) -> Result<()> {
    let (x, y) = (z.re_f64(), z.im_f64());
    // Exact hits only; in multiprecision also reject points that round onto them.
    if points.iter().any(|&(a, b)| x == a && y == b) {
        return Err(Error::Domain(format!("boundary singularity at z = {x}{y:+}i")));
    }
    Ok(())
}

/// `a = 1 - (2/pi) log(sqrt 2 - 1)`.
fn cusp_constant<T: ComplexScalar>(like: &T) -> T {
    let root2 = T::real(2.0, like).csqrt();
    let two_over_pi = T::real(2.0, like) / T::pi(like);
    -(two_over_pi * (root2 - 1.0).cln()) + 1.0
}

/// `(chi(z), chi'(z))`.
fn cusp<T: ComplexScalar>(z: &T) -> Result<(T, T)> {
    reject_outside(z)?;
    reject_points(z, &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)])?;
    let i = T::i(z);
    let ratio = (z.clone() - i.clone()) / (i.clone() * z.clone() - 1.0);
    let s = ratio.csqrt();
    let chi0 = (s.clone() - i.clone()) / (-(i * s) + 1.0);
    if chi0.is_exact_zero() {
        return Err(Error::Domain("cusp evaluated at its boundary point".into()));
    }
    let two_over_pi = T::real(2.0, z) / T::pi(z);
    let chi2 = -(two_over_pi.clone() * chi0.cln()) + 1.0;
    let a = cusp_constant(z);
    let chi = -(a.clone() / chi2.clone()) + 1.0;
    // chi_0' = -(1 + chi_0^2) / (2 (1 + z^2)); chi_2' = -(2/pi) chi_0'/chi_0
    let d0 = -(chi0.clone() * chi0.clone() + 1.0) / ((z.clone() * z.clone() + 1.0) * 2.0);
    let d2 = -(two_over_pi * d0 / chi0);
    let d = a * d2 / (chi2.clone() * chi2);
    Ok((chi, d))
}

/// `chi_0(z) = tan(pi/8 - arctan(z)/2)`, exposed for tests of the chain.
pub fn cusp_inner<T: ComplexScalar>(z: &T) -> T {
    let i = T::i(z);
    let s = ((z.clone() - i.clone()) / (i.clone() * z.clone() - 1.0)).csqrt();
    (s.clone() - i.clone()) / (-(i * s) + 1.0)
}

/// The constant `a` of the cusp map.
pub fn cusp_a() -> f64 {
    cusp_constant(&Complex64::new(0.0, 0.0)).re
}

fn lens<T: ComplexScalar>(z: &T, theta: f64) -> Result<(T, T)> {
    reject_outside(z)?;
    reject_points(z, &[(1.0, 0.0), (-1.0, 0.0)])?;
    let p = (z.clone() + 1.0).cpow(theta);
    let q = (-z.clone() + 1.0).cpow(theta);
    let sum = p.clone() + q.clone();
    let v = (p.clone() - q.clone()) / sum.clone();
    let one_minus_z2 = -(z.clone() * z.clone()) + 1.0;
    let d = p * q * (4.0 * theta) / (one_minus_z2 * sum.clone() * sum);
    Ok((v, d))
}

fn mobius<T: ComplexScalar>(z: &T, a: &Complex64) -> Result<(T, T)> {
    let a = T::from_parts(a.re, a.im, z);
    mobius_mp(z, &a)
}

/// `((a - z)/(1 - conj(a) z), (|a|^2 - 1)/(1 - conj(a) z)^2)`.
fn mobius_mp<T: ComplexScalar>(z: &T, a: &T) -> Result<(T, T)> {
    let den = -(a.conj() * z.clone()) + 1.0;
    if den.is_exact_zero() {
        return Err(Error::Domain("pole of the automorphism".into()));
    }
    let v = (a.clone() - z.clone()) / den.clone();
    let d = (a.clone() * a.conj() - 1.0) / (den.clone() * den);
    Ok((v, d))
}

fn half_plane<T: ComplexScalar>(z: &T) -> Result<(T, T)> {
    let den = z.clone() + 2.0;
    if den.is_exact_zero() {
        return Err(Error::Domain("pole of T at z = -2".into()));
    }
    let v = (z.clone() * 2.0 + 1.0) / den.clone();
    let d = T::real(3.0, z) / (den.clone() * den);
    Ok((v, d))
}

/// `(g(z), g'(z))` for the map of the disk onto `V_eps` with `g(1) = 0`:
/// `g = eps * gamma^-1 o sqrt o gamma o (-z)`, `gamma(z) = (z + i)/(1 + iz)`.
fn st_inner<T: ComplexScalar>(z: &T, eps: f64) -> (T, T) {
    let i = T::i(z);
    let z1 = -z.clone();
    let den2 = i.clone() * z1.clone() + 1.0;
    let z2 = (z1 + i.clone()) / den2.clone();
    let d2 = T::real(2.0, z) / (den2.clone() * den2);
    let z3 = z2.csqrt();
    let d3 = T::real(0.5, z) / z3.clone();
    let den4 = -(i.clone() * z3.clone()) + 1.0;
    let z4 = (z3 - i) / den4.clone();
    let d4 = T::real(2.0, z) / (den4.clone() * den4);
    (z4 * eps, -(d2 * d3 * d4) * eps)
}

/// `(f(w), f'(w))` for the Shapiro–Taylor outer function.
fn st_outer_with_derivative<T: ComplexScalar>(w: &T, variant: StVariant) -> (T, T) {
    let lg = w.cln();
    let big_l = -lg.clone();
    let ll = big_l.cln();
    match variant {
        StVariant::LogLog => {
            let f = w.clone() * ll.clone();
            // f' = log(-log w) + 1/log w
            let d = ll + T::real(1.0, w) / lg;
            (f, d)
        }
        StVariant::Power { p, s } => {
            let q = 2.0 / p;
            let lq = big_l.cpow(q);
            let lq1 = big_l.cpow(q - 1.0);
            let lls = ll.cpow(s);
            let lls1 = ll.cpow(s - 1.0);
            let f = w.clone() * lq.clone() * lls.clone();
            // f' = L^q LL^s - q L^(q-1) LL^s - s L^(q-1) LL^(s-1)
            let d = lq * lls.clone() - lq1.clone() * lls * q - lq1 * lls1 * s;
            (f, d)
        }
    }
}

fn st_outer(w: &Complex64, variant: StVariant) -> Complex64 {
    st_outer_with_derivative(w, variant).0
}

fn shapiro_taylor<T: ComplexScalar>(z: &T, variant: StVariant, eps: f64) -> Result<(T, T)> {
    reject_outside(z)?;
    reject_points(z, &[(1.0, 0.0)])?;
    let (g, dg) = st_inner(z, eps);
    if g.is_exact_zero() {
        return Err(Error::Domain("Shapiro–Taylor map evaluated at g = 0".into()));
    }
    let (f, df) = st_outer_with_derivative(&g, variant);
    let v = (-f).cexp();
    let d = -(v.clone() * df * dg);
    Ok((v, d))
}

/// The inner map `g` of the Shapiro–Taylor construction with its derivative.
pub fn shapiro_taylor_inner<T: ComplexScalar>(z: &T, eps: f64) -> (T, T) {
    st_inner(z, eps)
}

fn elementary<T: ComplexScalar>(z: &T, e: &Elementary) -> Result<(T, T)> {
    match e {
        Elementary::Scale(r) => Ok((z.clone() * T::param(*r, z), T::param(*r, z))),
        Elementary::Monomial(m) => {
            let mut pm1 = T::real(1.0, z);
            for _ in 1..*m {
                pm1 = pm1 * z.clone();
            }
            Ok((pm1.clone() * z.clone(), pm1 * *m as f64))
        }
        Elementary::Affine { scale, shift } => Ok((z.clone() * T::param(*scale, z) + T::param(*shift, z), T::param(*scale, z))),
        Elementary::Blaschke(zeros) => {
            // b_j = (|z_j|/z_j) (z_j - z)/(1 - conj(z_j) z), or z for z_j = 0.
            let factors: Vec<(T, T)> = zeros
                .iter()
                .map(|zj| {
                    if zj.norm() == 0.0 {
                        return Ok((z.clone(), T::real(1.0, z)));
                    }
                    let unit = zj.conj() / zj.norm();
                    let (v, d) = mobius(z, zj)?;
                    let u = T::from_parts(unit.re, unit.im, z);
                    Ok((-(v * u.clone()), -(d * u)))
                })
                .collect::<Result<_>>()?;
            let mut value = T::real(1.0, z);
            for (v, _) in &factors {
                value = value * v.clone();
            }
            let mut deriv = T::real(0.0, z);
            for (j, (_, d)) in factors.iter().enumerate() {
                let mut term = d.clone();
                for (k, (v, _)) in factors.iter().enumerate() {
                    if k != j {
                        term = term * v.clone();
                    }
                }
                deriv = deriv + term;
            }
            Ok((value, deriv))
        }
    }
}

/// `phi(0)` at the given precision.
pub fn value_at_origin(s: &Symbol, bits: u32) -> Result<Complex> {
    s.eval(&Complex::with_val(bits, 0))
}

/// The multiprecision modulus `|phi(z)|`.
pub fn abs_at(s: &Symbol, z: &Complex) -> Result<Float> {
    let v = s.eval(z)?;
    Ok(Float::with_val(z.prec().0, v.abs_ref()))
}
