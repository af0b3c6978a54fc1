//! Weighted Hilbert spaces `H^2(beta)` of analytic functions on the disk:
//! `||f||^2 = sum beta_k |c_k|^2`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

const GUARD_BITS: u32 = 32;
/// Hard cap on the number of kernel series terms.
const MAX_TERMS: usize = 20_000_000;

type WeightFn = Arc<dyn Fn(usize, u32) -> Float + Send + Sync>;

/// A weight sequence `beta_k > 0`.
#[derive(Clone)]
pub enum WeightFamily {
    /// `beta_k = 1`.
    Hardy,
    /// `beta_k = k! Gamma(g+2) / Gamma(k+g+2)`, `g > -1`.
    Bergman(f64),
    /// `beta_0 = 1`, `beta_k = k k! Gamma(a+2) / Gamma(k+a+1)`, `a > -1`.
    Dirichlet(f64),
    /// The equivalent Dirichlet normalisation
    /// `beta_k = (k+1)! Gamma(a+2) / Gamma(k+a+1)`, whose reproducing
    /// kernels have closed forms (see [`kernel_closed_form`]).
    DirichletTilde(f64),
    /// User weights; the closure receives `(k, precision)`.
    Custom { name: String, weight: WeightFn },
}

impl fmt::Debug for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Hardy => write!(f, "hardy"),
            Self::Bergman(g) => write!(f, "bergman:{g}"),
            Self::Dirichlet(a) => write!(f, "dirichlet:{a}"),
            Self::DirichletTilde(a) => write!(f, "dirichlet-tilde:{a}"),
            Self::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

impl PartialEq for WeightFamily {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Custom { name: a, weight: fa }, Self::Custom { name: b, weight: fb }) => {
                a == b && Arc::ptr_eq(fa, fb)
            }
            _ => self.to_string() == other.to_string(),
        }
    }
}

impl FromStr for WeightFamily {
    type Err = Error;

    /// `hardy`, `bergman[:g]`, `dirichlet[:a]`, `dirichlet-tilde[:a]`, or
    /// `expsqrt` for `beta_k = e^(-sqrt k)`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let param = |default: f64| -> Result<f64> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad weight parameter '{a}' in '{s}'"))),
            }
        };
        let family = match kind.to_ascii_lowercase().as_str() {
            "hardy" | "h2" => Self::Hardy,
            "bergman" => Self::Bergman(param(0.0)?),
            "dirichlet" => Self::Dirichlet(param(0.0)?),
            "dirichlet-tilde" => Self::DirichletTilde(param(0.0)?),
            "expsqrt" => Self::exp_sqrt(),
            _ => return Err(Error::Parse(format!("unknown space '{s}'"))),
        };
        family.validate()?;
        Ok(family)
    }
}

impl WeightFamily {
    pub fn bergman(gamma: f64) -> Result<Self> {
        let f = Self::Bergman(gamma);
        f.validate()?;
        Ok(f)
    }

    pub fn dirichlet(alpha: f64) -> Result<Self> {
        let f = Self::Dirichlet(alpha);
        f.validate()?;
        Ok(f)
    }

    pub fn custom(name: impl Into<String>, weight: impl Fn(usize, u32) -> Float + Send + Sync + 'static) -> Self {
        let family = Self::Custom {
            name: name.into(),
            weight: Arc::new(weight),
        };
        let samples = family.growth_samples();
        if samples.iter().any(|&(_, root)| root < 0.99) {
            log::warn!("weights '{family}' may violate liminf beta_k^(1/k) >= 1: {samples:?}");
        }
        family
    }

    /// `beta_k = e^(-sqrt k)`, a weight whose kernels grow faster than any
    /// power of `1/(1-|a|)`.
    pub fn exp_sqrt() -> Self {
        Self::custom("expsqrt", |k, prec| {
            let mut x = Float::with_val(prec, k);
            x.sqrt_mut();
            x = -x;
            x.exp_mut();
            x
        })
    }

    /// The family parameter (`g` or `a`), zero for Hardy and custom weights.
    pub fn parameter(&self) -> f64 {
        match self {
            Self::Bergman(p) | Self::Dirichlet(p) | Self::DirichletTilde(p) => *p,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bergman(g) if !(g.is_finite() && *g > -1.0) => {
                Err(Error::Parameter(format!("Bergman parameter must exceed -1, got {g}")))
            }
            Self::Dirichlet(a) | Self::DirichletTilde(a) if !(a.is_finite() && *a > -1.0) => {
                Err(Error::Parameter(format!("Dirichlet parameter must exceed -1, got {a}")))
            }
            _ => Ok(()),
        }
    }

    /// `(k, beta_k^(1/k))` at `k` in {64, 256, 1024}.
    pub fn growth_samples(&self) -> Vec<(usize, f64)> {
        [64usize, 256, 1024]
            .iter()
            .map(|&k| {
                let b = match self {
                    Self::Custom { weight, .. } => weight(k, 64),
                    _ => weight_lgamma(self, k, 64),
                };
                let root = if b > 0 {
                    (Float::with_val(64, b.ln_ref()) / k as u32).exp().to_f64()
                } else {
                    0.0
                };
                (k, root)
            })
            .collect()
    }
}

/// `beta_k` by the closed family formula, with Gamma ratios through
/// log-Gamma at the context precision.
pub fn weight(family: &WeightFamily, k: usize, ctx: &PrecisionContext) -> Result<Float> {
    family.validate()?;
    let b = match family {
        WeightFamily::Custom { weight, .. } => weight(k, ctx.bits()),
        _ => weight_lgamma(family, k, ctx.bits()),
    };
    check_positive(family, k, b)
}

fn check_positive(family: &WeightFamily, k: usize, b: Float) -> Result<Float> {
    if b.is_finite() && b > 0 {
        Ok(b)
    } else {
        Err(Error::Parameter(format!("weight {family} is not positive at k = {k}: {b}")))
    }
}

fn weight_lgamma(family: &WeightFamily, k: usize, bits: u32) -> Float {
    let wp = bits + GUARD_BITS;
    // Arguments k + p + c are formed exactly at working precision.
    let lg = |k: usize, p: f64, c: u32| -> Float {
        let v = Float::with_val(wp, p) + k as u32 + c;
        Float::with_val(wp, v.ln_gamma_ref())
    };
    let out = match family {
        WeightFamily::Hardy => Float::with_val(wp, 1),
        WeightFamily::Bergman(g) => (lg(k, 0.0, 1) + lg(0, *g, 2) - lg(k, *g, 2)).exp(),
        WeightFamily::Dirichlet(_) if k == 0 => Float::with_val(wp, 1),
        WeightFamily::Dirichlet(a) => (lg(k, 0.0, 1) + lg(0, *a, 2) - lg(k, *a, 1)).exp() * k as u32,
        WeightFamily::DirichletTilde(a) => (lg(k, 0.0, 2) + lg(0, *a, 2) - lg(k, *a, 1)).exp(),
        WeightFamily::Custom { weight, .. } => weight(k, wp),
    };
    Float::with_val(bits, out)
}

/// `beta_0..beta_n` by the exact ratio recurrences (relative error below
/// `3 n 2^-(bits+32)`).
pub fn weights(family: &WeightFamily, n: usize, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    weights_at(family, n, ctx.bits())
}

/// [`weights`] rounded to `bits` (which may exceed the context limits).
pub fn weights_at(family: &WeightFamily, n: usize, bits: u32) -> Result<Vec<Float>> {
    family.validate()?;
    let wp = bits + GUARD_BITS;
    let mut out = Vec::with_capacity(n + 1);
    let mut b = Float::with_val(wp, 1);
    let mut t = Float::new(wp);
    for k in 0..=n {
        let kk = k as u32;
        match family {
            WeightFamily::Hardy => {}
            WeightFamily::Bergman(g) => {
                if k > 0 {
                    // beta_k / beta_{k-1} = k / (k + g + 1)
                    b *= kk;
                    t.assign(*g);
                    t += kk + 1;
                    b /= &t;
                }
            }
            WeightFamily::Dirichlet(a) => {
                if k > 1 {
                    // beta_k / beta_{k-1} = k^2 / ((k-1)(k + a))
                    b *= kk as u64 * kk as u64;
                    t.assign(*a);
                    t += kk;
                    t *= kk - 1;
                    b /= &t;
                }
            }
            WeightFamily::DirichletTilde(a) => {
                if k == 0 {
                    b.assign(*a);
                    b += 1u32;
                } else {
                    // beta_k / beta_{k-1} = (k + 1) / (k + a)
                    b *= kk + 1;
                    t.assign(*a);
                    t += kk;
                    b /= &t;
                }
            }
            WeightFamily::Custom { weight, .. } => b = weight(k, wp),
        }
        out.push(check_positive(family, k, Float::with_val(bits, &b))?);
    }
    Ok(out)
}

/// `beta~_k / beta_k` for the two Dirichlet normalisations: `a + 1` at
/// `k = 0`, `(k+1)/k` otherwise.
pub fn dirichlet_conversion(alpha: f64, k: usize) -> f64 {
    if k == 0 {
        alpha + 1.0
    } else {
        (k as f64 + 1.0) / k as f64
    }
}

/// A kernel value or norm with the bound on the neglected series tail.
#[derive(Clone, Debug)]
pub struct KernelValue {
    pub value: Complex,
    pub tail_bound: f64,
    pub terms: usize,
}

/// `||K_a||^2 = sum |a|^(2n) / beta_n`, summed until a geometric majorant
/// of the tail drops below `tol` times the partial sum.
pub fn kernel_norm_sq(a: &Complex, family: &WeightFamily, tol: f64, ctx: &PrecisionContext) -> Result<KernelValue> {
    let wp = ctx.bits() + GUARD_BITS;
    let x = Float::with_val(wp, a.norm_ref());
    if x >= 1 {
        return Err(Error::Domain(format!("kernel point must lie in the open disk, |a|^2 = {x}")));
    }
    let x = Complex::with_val(wp, (x, 0));
    let v = kernel_series_sum(&x, family, tol, ctx)?;
    Ok(KernelValue {
        value: Complex::with_val(ctx.bits(), (v.value.real(), 0)),
        ..v
    })
}

/// `K_a(z) = sum (conj(a) z)^n / beta_n` by direct summation.
pub fn kernel_series(a: &Complex, z: &Complex, family: &WeightFamily, tol: f64, ctx: &PrecisionContext) -> Result<KernelValue> {
    let wp = ctx.bits() + GUARD_BITS;
    let x = Complex::with_val(wp, a.conj_ref()) * z;
    if Float::with_val(64, x.abs_ref()) >= 1 {
        return Err(Error::Domain("kernel series needs |a z| < 1".into()));
    }
    let v = kernel_series_sum(&x, family, tol, ctx)?;
    Ok(KernelValue {
        value: Complex::with_val(ctx.bits(), &v.value),
        ..v
    })
}

fn kernel_series_sum(x: &Complex, family: &WeightFamily, tol: f64, ctx: &PrecisionContext) -> Result<KernelValue> {
    family.validate()?;
    let wp = ctx.bits() + GUARD_BITS;
    let ax = Float::with_val(64, x.abs_ref()).to_f64();
    let wctx = PrecisionContext::new(ctx.bits(), ctx.seed())?;
    let mut sum = Complex::new(wp);
    let mut power = Complex::with_val(wp, 1);
    let mut chunk = 1024usize;
    let mut cache = weights(family, chunk, &wctx)?;
    let mut worst_after = suffix_ratio_max(&cache);
    let mut n = 0usize;
    loop {
        if n + 1 >= cache.len() {
            chunk *= 2;
            if chunk > MAX_TERMS {
                return Err(Error::NonConvergence {
                    sweeps: n,
                    residual: f64::NAN,
                });
            }
            cache = weights(family, chunk, &wctx)?;
            worst_after = suffix_ratio_max(&cache);
        }
        let term = Complex::with_val(wp, &power / &cache[n]);
        sum += &term;
        power *= x;
        n += 1;
        // Tail from index n: next term t_n times 1/(1-q), where q bounds the
        // later ratios x beta_m / beta_{m+1}.
        let ratio = |m: usize| -> f64 { Float::with_val(64, &cache[m] / &cache[m + 1]).to_f64() };
        if n + 1 >= cache.len() {
            continue;
        }
        let mut worst = ratio(n).max(1.0);
        if let WeightFamily::Custom { .. } = family {
            worst = worst.max(worst_after[n]);
        } else if let WeightFamily::Dirichlet(a) = family {
            // n(n+a+1)/(n+1)^2 is decreasing past (a+1)/(a-1).
            if *a > 1.0 && (n as f64) < (a + 1.0) / (a - 1.0) {
                continue;
            }
        }
        let q = ax * worst;
        if q >= 1.0 {
            continue;
        }
        // Compared in Float: weights and terms can leave the f64 range.
        let next = Float::with_val(64, power.abs_ref()) / &cache[n];
        let size = Float::with_val(64, sum.abs_ref());
        let rel = Float::with_val(64, &next / &size).to_f64() / (1.0 - q);
        let tail = Float::with_val(64, &next / (1.0 - q)).to_f64();
        if rel <= tol || (next.is_zero() && !size.is_zero()) {
            return Ok(KernelValue {
                value: sum,
                tail_bound: tail,
                terms: n,
            });
        }
    }
}

/// `out[m] = max_{k >= m} beta_k / beta_{k+1}` over the cached weights.
fn suffix_ratio_max(cache: &[Float]) -> Vec<f64> {
    let mut out = vec![0.0f64; cache.len()];
    let mut run = 0.0f64;
    for m in (0..cache.len().saturating_sub(1)).rev() {
        run = run.max(Float::with_val(64, &cache[m] / &cache[m + 1]).to_f64());
        out[m] = run;
    }
    out
}

/// Reproducing kernel of the `beta~` Dirichlet normalisation with parameter
/// `alpha >= 0`, with `x = conj(a) z`:
/// `((1-x)^-alpha - 1) / (alpha (alpha+1) x)` for `alpha > 0`,
/// `-log(1-x)/x` for `alpha = 0`, and `1/(alpha+1)` at `x = 0`.
pub fn kernel_closed_form(a: &Complex, z: &Complex, alpha: f64, ctx: &PrecisionContext) -> Result<Complex> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("kernel closed form needs alpha >= 0, got {alpha}")));
    }
    let abs = |w: &Complex| Float::with_val(64, w.abs_ref()).to_f64();
    if abs(a) >= 1.0 || abs(z) >= 1.0 {
        return Err(Error::Domain("kernel closed form needs |a|, |z| < 1".into()));
    }
    let bits = ctx.bits();
    let probe = Complex::with_val(64, a.conj_ref()) * z;
    if probe.real().is_zero() && probe.imag().is_zero() {
        return Ok(Complex::with_val(bits, Float::with_val(bits, Float::with_val(bits, alpha) + 1u32).recip()));
    }
    // Small |x| cancels in the numerator; pay for it in precision.
    let lost = (-abs(&probe).log2()).max(0.0).ceil() as u32;
    let wp = bits + 64 + lost;
    let x = Complex::with_val(wp, a.conj_ref()) * z;
    let one_minus = Complex::with_val(wp, 1) - &x;
    let v = if alpha == 0.0 {
        -Complex::with_val(wp, one_minus.ln_ref()) / &x
    } else {
        let p = Complex::with_val(wp, one_minus.ln_ref()) * -alpha;
        let num = p.exp() - 1u32;
        let scale = Float::with_val(wp, Float::with_val(wp, alpha) + 1u32) * alpha;
        num / x / scale
    };
    Ok(Complex::with_val(bits, v))
}

/// Closed-form kernel of the families that have one: `1/(1-x)` on Hardy,
/// `(1-x)^-(g+2)` on `Bergman(g)` and [`kernel_closed_form`] on the
/// `beta~` Dirichlet normalisation.
pub fn family_kernel_closed_form(a: &Complex, z: &Complex, family: &WeightFamily, ctx: &PrecisionContext) -> Result<Complex> {
    let power = match family {
        WeightFamily::DirichletTilde(alpha) => return kernel_closed_form(a, z, *alpha, ctx),
        WeightFamily::Hardy => 1.0,
        WeightFamily::Bergman(g) => g + 2.0,
        other => return Err(Error::Parameter(format!("no closed-form kernel for {other}"))),
    };
    let abs = |w: &Complex| Float::with_val(64, w.abs_ref()).to_f64();
    if abs(a) >= 1.0 || abs(z) >= 1.0 {
        return Err(Error::Domain("kernel closed form needs |a|, |z| < 1".into()));
    }
    let wp = ctx.bits() + 64;
    let one_minus = Complex::with_val(wp, 1) - Complex::with_val(wp, a.conj_ref()) * z;
    let v = (Complex::with_val(wp, one_minus.ln_ref()) * -power).exp();
    Ok(Complex::with_val(ctx.bits(), v))
}

/// Outcome of [`check_weight_domination`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domination {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Whether `beta_k / gamma_k` is non-decreasing for `k <= n`, up to the
/// relative rounding of the weight recurrences.
pub fn check_weight_domination(
    beta: &WeightFamily,
    gamma: &WeightFamily,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<Domination> {
    let b = weights(beta, n, ctx)?;
    let g = weights(gamma, n, ctx)?;
    let wp = ctx.bits() + GUARD_BITS;
    let mut prev: Option<Float> = None;
    for k in 0..=n {
        let r = Float::with_val(wp, &b[k] / &g[k]);
        if let Some(p) = &prev {
            let slack = 8.0 * (k as f64 + 1.0) * ctx.eps();
            let floor = Float::with_val(wp, p * (1.0 - slack));
            if r < floor {
                return Ok(Domination {
                    holds: false,
                    first_violation: Some(k),
                });
            }
        }
        prev = Some(r);
    }
    Ok(Domination {
        holds: true,
        first_violation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128, 0).unwrap()
    }

    fn f(x: &Float) -> f64 {
        x.to_f64()
    }

    #[test]
    fn builtin_weights() {
        let ctx = ctx();
        for k in [0, 1, 7, 100] {
            assert_eq!(f(&weight(&WeightFamily::Hardy, k, &ctx).unwrap()), 1.0);
            let b = f(&weight(&WeightFamily::Bergman(0.0), k, &ctx).unwrap());
            assert!((b - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
        // Dirichlet(1): 2k/(k+1), so 5/3 at k = 5.
        let d = weight(&WeightFamily::Dirichlet(1.0), 5, &ctx).unwrap();
        let diff = Float::with_val(128, &d - Float::with_val(128, 5) / 3u32);
        assert!(diff.abs() < 1e-35);
        assert_eq!(f(&weight(&WeightFamily::Dirichlet(0.3), 0, &ctx).unwrap()), 1.0);
    }

    #[test]
    fn recurrence_matches_log_gamma() {
        let ctx = ctx();
        for fam in [
            WeightFamily::Bergman(0.7),
            WeightFamily::Bergman(-0.5),
            WeightFamily::Dirichlet(0.5),
            WeightFamily::Dirichlet(2.5),
            WeightFamily::DirichletTilde(0.25),
        ] {
            let seq = weights(&fam, 300, &ctx).unwrap();
            for k in [0, 1, 2, 17, 300] {
                let direct = weight(&fam, k, &ctx).unwrap();
                let rel = Float::with_val(128, &seq[k] / &direct) - 1u32;
                assert!(rel.clone().abs() < 1e-30, "{fam} at k={k}: {rel}");
            }
        }
    }

    #[test]
    fn conversion_between_dirichlet_normalisations() {
        let ctx = ctx();
        let a = 0.75;
        let b = weights(&WeightFamily::Dirichlet(a), 20, &ctx).unwrap();
        let t = weights(&WeightFamily::DirichletTilde(a), 20, &ctx).unwrap();
        for k in 0..=20 {
            let r = Float::with_val(128, &t[k] / &b[k]).to_f64();
            assert!((r - dirichlet_conversion(a, k)).abs() < 1e-14);
            if k > 0 {
                assert!((1.0..=2.0).contains(&r));
            }
        }
    }

    #[test]
    fn parameter_range() {
        assert!(WeightFamily::bergman(-1.0).is_err());
        assert!(WeightFamily::dirichlet(-1.5).is_err());
        assert!(weight(&WeightFamily::Dirichlet(-2.0), 3, &ctx()).is_err());
    }

    #[test]
    fn parse_spaces() {
        assert_eq!("hardy".parse::<WeightFamily>().unwrap(), WeightFamily::Hardy);
        assert_eq!("bergman:1.5".parse::<WeightFamily>().unwrap(), WeightFamily::Bergman(1.5));
        assert_eq!("dirichlet".parse::<WeightFamily>().unwrap(), WeightFamily::Dirichlet(0.0));
        assert!("bergman:x".parse::<WeightFamily>().is_err());
        assert!("sobolev".parse::<WeightFamily>().is_err());
        assert!("bergman:-3".parse::<WeightFamily>().is_err());
    }

    #[test]
    fn kernel_norms_closed_forms() {
        let ctx = ctx();
        let a = Complex::with_val(128, (0.3, 0.4));
        let x = 0.25f64;
        let h = kernel_norm_sq(&a, &WeightFamily::Hardy, 1e-30, &ctx).unwrap();
        assert!((h.value.real().to_f64() - 1.0 / (1.0 - x)).abs() < 1e-25);
        for g in [0.0, 1.5] {
            let b = kernel_norm_sq(&a, &WeightFamily::Bergman(g), 1e-30, &ctx).unwrap();
            let expect = (1.0 - x).powf(-(g + 2.0));
            assert!((b.value.real().to_f64() / expect - 1.0).abs() < 1e-14, "g={g}");
        }
        assert!(kernel_norm_sq(&Complex::with_val(64, 1), &WeightFamily::Hardy, 1e-10, &ctx).is_err());
    }

    #[test]
    fn kernel_norm_grows_toward_boundary() {
        let ctx = ctx();
        for fam in [
            WeightFamily::Hardy,
            WeightFamily::Bergman(0.0),
            WeightFamily::Dirichlet(0.5),
            WeightFamily::Dirichlet(0.0),
        ] {
            let mut prev = 0.0;
            for r in [0.9, 0.99, 0.999] {
                let v = kernel_norm_sq(&Complex::with_val(64, r), &fam, 1e-12, &ctx).unwrap();
                let v = v.value.real().to_f64();
                assert!(v > prev, "{fam}");
                prev = v;
            }
        }
    }

    #[test]
    fn exp_sqrt_kernel_growth() {
        let ctx = PrecisionContext::new(64, 0).unwrap();
        let fam = WeightFamily::exp_sqrt();
        let norm = |r: f64| {
            let v = kernel_norm_sq(&Complex::with_val(64, r), &fam, 1e-10, &ctx).unwrap();
            v.value.real().to_f64()
        };
        let (n9, n99) = (norm(0.9), norm(0.99));
        let model = |r: f64| (1.0 - r).powf(-1.5) * (1.0 / (8.0 * (1.0 - r))).exp();
        let (got, want) = ((n99 / n9).ln(), (model(0.99) / model(0.9)).ln());
        assert!(got > 0.0 && (got / want - 1.0).abs() < 0.5, "{got} vs {want}");
    }

    #[test]
    fn closed_form_constants_and_series() {
        let ctx = ctx();
        let zero = Complex::with_val(128, 0);
        let z = Complex::with_val(128, (0.2, -0.5));
        assert_eq!(kernel_closed_form(&zero, &z, 0.0, &ctx).unwrap(), Complex::with_val(128, 1));
        let k = kernel_closed_form(&zero, &z, 0.5, &ctx).unwrap();
        assert!((k.real().to_f64() - 1.0 / 1.5).abs() < 1e-16);

        let a = Complex::with_val(128, (0.6, 0.3));
        for alpha in [0.0, 0.5, 1.0, 2.25] {
            let closed = kernel_closed_form(&a, &z, alpha, &ctx).unwrap();
            let series = kernel_series(&a, &z, &WeightFamily::DirichletTilde(alpha), 1e-30, &ctx).unwrap();
            let d = Complex::with_val(128, &closed - &series.value);
            let rel = Float::with_val(64, d.abs_ref()).to_f64() / Float::with_val(64, closed.abs_ref()).to_f64();
            assert!(rel < 1e-29, "alpha={alpha}: {rel:e}");
        }
        assert!(kernel_closed_form(&a, &z, -0.1, &ctx).is_err());
    }

    #[test]
    fn hardy_and_bergman_closed_forms() {
        let ctx = ctx();
        let a = Complex::with_val(128, (0.5, -0.4));
        let z = Complex::with_val(128, (-0.3, 0.7));
        for fam in [WeightFamily::Hardy, WeightFamily::Bergman(0.0), WeightFamily::Bergman(1.5)] {
            let closed = family_kernel_closed_form(&a, &z, &fam, &ctx).unwrap();
            let series = kernel_series(&a, &z, &fam, 1e-32, &ctx).unwrap();
            let d = Float::with_val(64, Complex::with_val(128, &closed - &series.value).abs_ref()).to_f64();
            assert!(d < 1e-30, "{fam}: {d:e}");
        }
        assert!(family_kernel_closed_form(&a, &z, &WeightFamily::Dirichlet(1.0), &ctx).is_err());
    }

    #[test]
    fn closed_form_tends_to_log_kernel() {
        let ctx = ctx();
        let h = Complex::with_val(128, 0.5);
        let k0 = kernel_closed_form(&h, &h, 0.0, &ctx).unwrap();
        let mut prev = f64::INFINITY;
        for alpha in [0.1, 0.01, 0.001] {
            let k = kernel_closed_form(&h, &h, alpha, &ctx).unwrap();
            let d = Float::with_val(64, Complex::with_val(128, &k - &k0).abs_ref()).to_f64();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn domination() {
        let ctx = ctx();
        let d = check_weight_domination(&WeightFamily::Dirichlet(0.5), &WeightFamily::Dirichlet(1.5), 2000, &ctx).unwrap();
        assert!(d.holds);
        let d = check_weight_domination(&WeightFamily::Hardy, &WeightFamily::Bergman(0.0), 2000, &ctx).unwrap();
        assert!(d.holds);
        let d = check_weight_domination(&WeightFamily::Bergman(0.0), &WeightFamily::Hardy, 10, &ctx).unwrap();
        assert_eq!(d.first_violation, Some(1));
    }
}
