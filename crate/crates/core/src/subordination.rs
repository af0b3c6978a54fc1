//! Weak majorization of decreasing sequences and the operator-level
//! comparisons built on it: diagonal conjugation of triangular matrices,
//! the determinant characterization of `s_1 ... s_n`, and the comparison of
//! composition-operator spectra across nested weighted spaces.
//!
//! Partial sums and partial log-sums are accumulated in multiprecision, so
//! the only slack in a comparison is the declared error of the inputs plus
//! the rounding of that accumulation.

use rayon::prelude::*;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::numerics::{det_gram, random_orthonormal_system, svd, svd_singular_values, ComplexMatrix, SingularSpectrum};
use crate::operators::{approx_numbers, PowerTable};
use crate::precision::PrecisionContext;
use crate::spaces::{check_weight_domination, WeightFamily};
use crate::symbols::Symbol;

/// Indices whose values exceed this multiple of the combined error bounds
/// are compared; the rest carry no information.
pub const CERTIFIED_FACTOR: f64 = 10.0;

/// A finite non-increasing sequence of positive numbers with optional
/// absolute error bounds.
#[derive(Clone, Debug)]
pub struct DecaySequence {
    values: Vec<Float>,
    error_bounds: Vec<f64>,
}

impl DecaySequence {
    /// Exact values.
    pub fn new(values: &[f64]) -> Result<Self> {
        let v = values.iter().map(|&x| Float::with_val(64, x)).collect();
        Self::from_floats(v, vec![0.0; values.len()])
    }

    /// Zeros (and anything below the floor) are lifted to
    /// `10^(-40 bits / 256)`.
    pub fn with_floor(values: &[f64], bits: u32) -> Result<Self> {
        let floor = positivity_floor(bits);
        let v: Vec<f64> = values.iter().map(|&x| x.max(floor)).collect();
        Self::new(&v)
    }

    pub fn from_floats(values: Vec<Float>, error_bounds: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("empty sequence".into()));
        }
        if values.len() != error_bounds.len() {
            return Err(Error::Dimension("values and error bounds differ in length".into()));
        }
        if let Some(k) = values.iter().position(|x| !(x.is_finite() && *x > 0)) {
            return Err(Error::Parameter(format!("entry {} is not positive: {}", k + 1, values[k])));
        }
        for k in 1..values.len() {
            let slack = error_bounds[k] + error_bounds[k - 1];
            if Float::with_val(values[k].prec(), &values[k] - &values[k - 1]).to_f64() > slack {
                return Err(Error::Parameter(format!("sequence increases at index {}", k + 1)));
            }
        }
        Ok(Self { values, error_bounds })
    }

    /// The first `len` values of a spectrum (zeros lifted to the floor).
    pub fn from_spectrum(s: &SingularSpectrum, len: usize) -> Result<Self> {
        let len = len.min(s.len());
        let floor = positivity_floor(s.source.bits);
        let values = s.values[..len]
            .iter()
            .map(|v| if *v > floor { v.clone() } else { Float::with_val(v.prec(), floor) })
            .collect();
        Self::from_floats(values, s.error_bounds[..len].to_vec())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    pub fn error_bounds(&self) -> &[f64] {
        &self.error_bounds
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64()).collect()
    }

    fn prec(&self) -> u32 {
        self.values.iter().map(|v| v.prec()).max().unwrap_or(64)
    }

    /// Natural logarithms at the sequence precision.
    pub fn logs(&self) -> Vec<Float> {
        self.values.iter().map(|v| Float::with_val(v.prec(), v.ln_ref())).collect()
    }

    pub fn truncate(&self, len: usize) -> Self {
        let len = len.min(self.len()).max(1);
        Self {
            values: self.values[..len].to_vec(),
            error_bounds: self.error_bounds[..len].to_vec(),
        }
    }

    /// Bound on `ln(value + err) - ln(value)` and on `ln(value) - ln(value - err)`.
    fn log_errors(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.error_bounds)
            .map(|(v, e)| {
                if *e == 0.0 {
                    return 0.0;
                }
                let x = (Float::with_val(64, *e) / v).to_f64();
                if x >= 1.0 {
                    f64::INFINITY
                } else {
                    -(-x).ln_1p()
                }
            })
            .collect()
    }
}

/// `10^(-40 bits / 256)`, the stand-in for zero entries.
pub fn positivity_floor(bits: u32) -> f64 {
    10f64.powf(-40.0 * bits as f64 / 256.0)
}

/// Outcome of a partial-sum comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct SubordinationReport {
    pub holds: bool,
    /// 1-based index of the first failing partial sum.
    pub first_violation: Option<usize>,
    /// `sum_{j<=n} v_j - sum_{j<=n} u_j` (or the log-sum difference) per `n`.
    pub margins: Vec<f64>,
    /// Slack allowed at each `n` (input errors and accumulation rounding).
    pub slack: Vec<f64>,
}

impl SubordinationReport {
    /// Number of compared indices.
    pub fn checked(&self) -> usize {
        self.margins.len()
    }

    /// `min_n margin_n`.
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Compares partial sums of two equally long non-increasing sequences
/// with per-index slack contributions.
fn compare_partial_sums(u: &[Float], v: &[Float], slack_terms: &[f64]) -> Result<SubordinationReport> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!("sequences of lengths {} and {}", u.len(), v.len())));
    }
    let prec = u.iter().chain(v).map(|x| x.prec()).max().unwrap_or(64) + 64;
    let rounding = (8.0 - prec as f64).exp2();
    let mut su = Float::new(prec);
    let mut sv = Float::new(prec);
    let mut mag = 0.0f64;
    let mut slack_acc = 0.0f64;
    let mut margins = Vec::with_capacity(u.len());
    let mut slack = Vec::with_capacity(u.len());
    let mut first = None;
    let mut d = Float::new(prec);
    for k in 0..u.len() {
        su += &u[k];
        sv += &v[k];
        mag += u[k].to_f64().abs() + v[k].to_f64().abs();
        slack_acc += slack_terms[k];
        d.assign(&sv - &su);
        let m = d.to_f64();
        let s = slack_acc + rounding * mag * (k + 1) as f64;
        if first.is_none() && m < -s {
            first = Some(k + 1);
        }
        margins.push(m);
        slack.push(s);
    }
    Ok(SubordinationReport {
        holds: first.is_none(),
        first_violation: first,
        margins,
        slack,
    })
}

fn check_non_increasing(x: &[Float], what: &str) -> Result<()> {
    if let Some(k) = x.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::Parameter(format!("{what} increases at index {}", k + 2)));
    }
    Ok(())
}

/// `u ≺ v`: `sum_{j<=n} u_j <= sum_{j<=n} v_j` for every `n`, allowing the
/// combined error bounds.
pub fn is_subordinate(u: &DecaySequence, v: &DecaySequence) -> Result<SubordinationReport> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!("sequences of lengths {} and {}", u.len(), v.len())));
    }
    let slack: Vec<f64> = u.error_bounds.iter().zip(&v.error_bounds).map(|(a, b)| a + b).collect();
    compare_partial_sums(&u.values, &v.values, &slack)
}

/// [`is_subordinate`] for arbitrary real non-increasing sequences, exact.
pub fn is_subordinate_values(u: &[Float], v: &[Float]) -> Result<SubordinationReport> {
    check_non_increasing(u, "u")?;
    check_non_increasing(v, "v")?;
    compare_partial_sums(u, v, &vec![0.0; u.len()])
}

/// `log u ≺ log v`: partial products compared through log-sums.
pub fn is_log_subordinate(u: &DecaySequence, v: &DecaySequence) -> Result<SubordinationReport> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!("sequences of lengths {} and {}", u.len(), v.len())));
    }
    let slack: Vec<f64> = u.log_errors().iter().zip(v.log_errors()).map(|(a, b)| a + b).collect();
    let (lu, lv) = (u.logs(), v.logs());
    // ln is correctly rounded; one ulp of each log per term.
    let ulp: Vec<f64> = lu
        .iter()
        .zip(&lv)
        .zip(&slack)
        .map(|((a, b), s)| s + (a.to_f64().abs() + b.to_f64().abs()) * (2.0 - u.prec().min(v.prec()) as f64).exp2())
        .collect();
    compare_partial_sums(&lu, &lv, &ulp)
}

/// An increasing convex function on the real line.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexMap {
    Identity,
    /// `x -> e^(p x)`, `p > 0`.
    Exp(f64),
    /// `x -> max(x - t, 0) + t`.
    Hinge(f64),
    /// Piecewise-linear interpolation of increasing convex samples
    /// `(x, h(x))`, extended linearly past both ends.
    Table(Vec<(f64, f64)>),
}

impl ConvexMap {
    fn validate(&self) -> Result<()> {
        match self {
            ConvexMap::Exp(p) if !(*p > 0.0) => Err(Error::Parameter(format!("exponent must be positive, got {p}"))),
            ConvexMap::Table(t) => {
                if t.len() < 2 || t.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::Parameter("table abscissae must be strictly increasing".into()));
                }
                let slopes: Vec<f64> = t.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
                if slopes[0] < 0.0 || slopes.windows(2).any(|s| s[1] < s[0]) {
                    return Err(Error::Parameter("table is not increasing and convex".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, x: &Float) -> Float {
        let prec = x.prec();
        match self {
            ConvexMap::Identity => x.clone(),
            ConvexMap::Exp(p) => Float::with_val(prec, x * Float::with_val(prec, *p)).exp(),
            ConvexMap::Hinge(t) => {
                let t = Float::with_val(prec, *t);
                if *x > t {
                    x.clone()
                } else {
                    t
                }
            }
            ConvexMap::Table(tab) => {
                let xf = x.to_f64();
                let k = tab.partition_point(|(a, _)| *a <= xf).clamp(1, tab.len() - 1);
                let ((x0, y0), (x1, y1)) = (tab[k - 1], tab[k]);
                let slope = (y1 - y0) / (x1 - x0);
                Float::with_val(prec, y0 + slope * (xf - x0))
            }
        }
    }
}

/// The default test functions: `e^(p x)` for `p` in {0.25, 0.5, 1, 2, 4}
/// and hinges at the quartiles of the merged values.
pub fn default_convex_maps(u: &[Float], v: &[Float]) -> Vec<ConvexMap> {
    let mut maps: Vec<ConvexMap> = [0.25, 0.5, 1.0, 2.0, 4.0].into_iter().map(ConvexMap::Exp).collect();
    let mut all: Vec<f64> = u.iter().chain(v).map(|x| x.to_f64()).collect();
    all.sort_by(|a, b| a.total_cmp(b));
    if !all.is_empty() {
        for q in [0.25, 0.5, 0.75] {
            maps.push(ConvexMap::Hinge(all[((all.len() - 1) as f64 * q) as usize]));
        }
    }
    maps
}

/// Checks `h(u) ≺ h(v)` for every map; requires `u ≺ v`.
pub fn convex_image_check(u: &[Float], v: &[Float], maps: &[ConvexMap]) -> Result<bool> {
    let base = is_subordinate_values(u, v)?;
    if !base.holds {
        return Err(Error::Parameter(format!(
            "u is not subordinate to v (first violation at {})",
            base.first_violation.unwrap_or(0)
        )));
    }
    for h in maps {
        h.validate()?;
        let hu: Vec<Float> = u.iter().map(|x| h.apply(x)).collect();
        let hv: Vec<Float> = v.iter().map(|x| h.apply(x)).collect();
        // Each image is correctly rounded, so allow one ulp per term.
        let prec = u.iter().chain(v).map(|x| x.prec()).min().unwrap_or(64);
        let ulp: Vec<f64> = hu
            .iter()
            .zip(&hv)
            .map(|(a, b)| (a.to_f64().abs() + b.to_f64().abs()) * (2.0 - prec as f64).exp2())
            .collect();
        if !compare_partial_sums(&hu, &hv, &ulp)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For log-subordinate `u` and `v`: `u_N <= v_1^(n/N) v_n^(1 - n/N)` for
/// all `n <= N`, which includes `u_2n <= sqrt(v_1 v_n)`.
pub fn corollary_bounds_check(u: &DecaySequence, v: &DecaySequence) -> Result<bool> {
    let base = is_log_subordinate(u, v)?;
    if !base.holds {
        return Err(Error::Parameter("u is not log-subordinate to v".into()));
    }
    let lu: Vec<f64> = u.logs().iter().map(|x| x.to_f64()).collect();
    let lv: Vec<f64> = v.logs().iter().map(|x| x.to_f64()).collect();
    let (eu, ev) = (u.log_errors(), v.log_errors());
    let len = u.len();
    for big in 1..=len {
        for n in 1..=big {
            let t = n as f64 / big as f64;
            let rhs = t * lv[0] + (1.0 - t) * lv[n - 1];
            let slack = eu[big - 1] + t * ev[0] + (1.0 - t) * ev[n - 1] + 1e-13 * (lu[big - 1].abs() + rhs.abs() + 1.0);
            if lu[big - 1] > rhs + slack {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of [`kacnelson_check`].
#[derive(Clone, Debug)]
pub struct KacnelsonReport {
    pub subordination: SubordinationReport,
    pub original: SingularSpectrum,
    pub conjugated: SingularSpectrum,
    pub conjugate: ComplexMatrix,
}

/// For lower-triangular `A` and increasing positive `d`, checks that the
/// singular values of `D^-1 A D` are log-subordinate to those of `A` up to
/// `n_max`.
pub fn kacnelson_check(a: &ComplexMatrix, d: &[Float], n_max: usize, ctx: &PrecisionContext) -> Result<KacnelsonReport> {
    if a.rows() != a.cols() || d.len() != a.rows() {
        return Err(Error::Dimension("need a square matrix and a matching diagonal".into()));
    }
    if d.iter().any(|x| !(*x > 0)) || d.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("diagonal must be positive and non-decreasing".into()));
    }
    let tol = ctx.eps_frac(1, 2) * a.max_abs().max(1.0);
    if !a.is_lower_triangular(tol) {
        return Err(Error::Parameter(format!(
            "matrix is not lower triangular (upper entry {:e})",
            a.max_upper_abs()
        )));
    }
    let b = a.diagonal_conjugate(d)?;
    let original = svd_singular_values(a, ctx)?;
    let conjugated = svd_singular_values(&b, ctx)?;
    let n = n_max.min(a.rows());
    let u = DecaySequence::from_spectrum(&conjugated, n)?;
    let v = DecaySequence::from_spectrum(&original, n)?;
    Ok(KacnelsonReport {
        subordination: is_log_subordinate(&u, &v)?,
        original,
        conjugated,
        conjugate: b,
    })
}

/// Outcome of [`detmax_identity_check`].
#[derive(Clone, Debug)]
pub struct DetmaxReport {
    pub order: usize,
    /// `s_1 ... s_n`.
    pub product: Float,
    /// `|det| / product - 1` for every random trial.
    pub excess: Vec<f64>,
    /// `| |det| / product - 1 |` at the singular-vector systems.
    pub attained_error: f64,
}

impl DetmaxReport {
    pub fn exceedances(&self, tol: f64) -> usize {
        self.excess.iter().filter(|&&e| e > tol).count()
    }

    pub fn max_excess(&self) -> f64 {
        self.excess.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `|det(<M f_j, g_i>)| <= s_1 ... s_n` over random orthonormal pairs,
/// with equality at the singular vectors.
pub fn detmax_identity_check(m: &ComplexMatrix, n: usize, trials: usize, ctx: &PrecisionContext) -> Result<DetmaxReport> {
    if n == 0 || n > m.rows().min(m.cols()) {
        return Err(Error::Dimension(format!("order {n} out of range for a {}x{} matrix", m.rows(), m.cols())));
    }
    let dec = svd(m, ctx)?;
    let wp = ctx.bits() + 32;
    let mut product = Float::with_val(wp, 1);
    for s in &dec.spectrum.values[..n] {
        product *= s;
    }
    let ratio_excess = |det: rug::Complex| -> f64 {
        let a = Float::with_val(wp, det.norm_ref()).sqrt();
        if product.is_zero() {
            return if a.is_zero() { 0.0 } else { f64::INFINITY };
        }
        Float::with_val(wp, a / &product - 1u32).to_f64()
    };
    let f: Vec<_> = (0..n).map(|j| dec.v.column(j)).collect();
    let g: Vec<_> = (0..n).map(|i| dec.u.column(i)).collect();
    let attained_error = ratio_excess(det_gram(m, &f, &g, ctx)?).abs();

    let excess: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = ctx.seed().wrapping_mul(1_000_003).wrapping_add(2 * t as u64);
            let f = random_orthonormal_system(m.cols(), n, &ctx.with_seed(seed))?;
            let g = random_orthonormal_system(m.rows(), n, &ctx.with_seed(seed + 1))?;
            Ok(ratio_excess(det_gram(m, &f, &g, ctx)?))
        })
        .collect::<Result<_>>()?;
    Ok(DetmaxReport {
        order: n,
        product: Float::with_val(ctx.bits(), &product),
        excess,
        attained_error,
    })
}

/// Number of leading indices at which both spectra exceed `factor` times
/// their combined error bound.
pub fn certified_prefix(u: &SingularSpectrum, v: &SingularSpectrum, factor: f64) -> usize {
    let len = u.len().min(v.len());
    (0..len)
        .take_while(|&k| {
            let e = u.error_bounds[k] + v.error_bounds[k];
            let bound = Float::with_val(64, factor * e);
            u.values[k] > bound && v.values[k] > bound && e.is_finite()
        })
        .count()
}

/// The spectrum of the section on the `f(0) = 0` hyperplane, read off the
/// full section of an origin-fixing symbol: the full matrix is `1 ⊕ T`,
/// so one singular value equal to 1 is removed.
pub fn hyperplane_spectrum(full: &SingularSpectrum) -> Result<SingularSpectrum> {
    let k = full
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| (k, Float::with_val(64, v - 1u32).abs().to_f64()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
        .ok_or_else(|| Error::Dimension("empty spectrum".into()))?;
    let dev = Float::with_val(64, &full.values[k] - 1u32).abs().to_f64();
    if dev > full.error_bounds[k].max(1e-300) {
        return Err(Error::Certificate(format!("no singular value equal to 1 (closest deviates by {dev:e})")));
    }
    let mut values = full.values.clone();
    let mut bounds = full.error_bounds.clone();
    values.remove(k);
    bounds.remove(k);
    let mut source = full.source.clone();
    source.rows -= 1;
    source.cols -= 1;
    SingularSpectrum::new(values, bounds, source)
}

/// One adjacent pair of a product chain.
#[derive(Clone, Debug)]
pub struct ChainLink {
    /// The larger space's weight (`H^2(beta)` inside `H^2(gamma)`).
    pub dominating: WeightFamily,
    pub dominated: WeightFamily,
    /// Log-subordination of the dominated spectrum to the dominating one,
    /// full sections (index 0 included), over the certified prefix.
    pub full: SubordinationReport,
    /// The same on the `f(0) = 0` hyperplane.
    pub hyperplane: SubordinationReport,
    /// `s_2n(gamma) <= sqrt(s_1(beta) s_n(beta))` on the certified prefix.
    pub half_index_bound: bool,
    pub certified: usize,
}

impl ChainLink {
    pub fn holds(&self) -> bool {
        self.full.holds && self.hyperplane.holds && self.half_index_bound
    }
}

/// Log-subordination between the spectra of `C_phi` on consecutive spaces
/// of `families` (ordered from the largest weight down), each adjacent
/// pair first checked for weight domination.
pub fn product_chain_check(symbol: &Symbol, families: &[WeightFamily], n: usize, ctx: &PrecisionContext) -> Result<Vec<ChainLink>> {
    if !symbol.fixes_origin() {
        return Err(Error::Parameter(format!("{symbol} does not fix the origin; sections are not triangular")));
    }
    check_chain_domination(families, n, ctx)?;
    let table = PowerTable::new(symbol, n, ctx)?;
    let spectra: Vec<(WeightFamily, SingularSpectrum)> = families
        .iter()
        .map(|f| Ok((f.clone(), approx_numbers(&table.operator(f, n, ctx)?, ctx)?)))
        .collect::<Result<_>>()?;
    chain_from_spectra(&spectra, ctx)
}

fn check_chain_domination(families: &[WeightFamily], n: usize, ctx: &PrecisionContext) -> Result<()> {
    if families.len() < 2 {
        return Err(Error::Parameter("a chain needs at least two spaces".into()));
    }
    for w in families.windows(2) {
        let d = check_weight_domination(&w[0], &w[1], n, ctx)?;
        if !d.holds {
            return Err(Error::Parameter(format!(
                "{} does not dominate {} (ratio decreases at k = {})",
                w[0],
                w[1],
                d.first_violation.unwrap_or(0)
            )));
        }
    }
    Ok(())
}

/// [`product_chain_check`] on precomputed full-section spectra of an
/// origin-fixing symbol.
pub fn chain_from_spectra(spectra: &[(WeightFamily, SingularSpectrum)], ctx: &PrecisionContext) -> Result<Vec<ChainLink>> {
    let families: Vec<WeightFamily> = spectra.iter().map(|(f, _)| f.clone()).collect();
    let n = spectra.iter().map(|(_, s)| s.len()).min().unwrap_or(1).saturating_sub(1);
    check_chain_domination(&families, n, ctx)?;
    let mut links = Vec::new();
    for w in spectra.windows(2) {
        let (beta_fam, beta) = &w[0];
        let (gamma_fam, gamma) = &w[1];
        let certified = certified_prefix(gamma, beta, CERTIFIED_FACTOR);
        let full = compare_spectra(gamma, beta, certified)?;
        let (hg, hb) = (hyperplane_spectrum(gamma)?, hyperplane_spectrum(beta)?);
        let hyper_len = certified_prefix(&hg, &hb, CERTIFIED_FACTOR);
        let hyperplane = compare_spectra(&hg, &hb, hyper_len)?;
        let half_index_bound = half_index_bound_holds(gamma, beta, certified);
        links.push(ChainLink {
            dominating: beta_fam.clone(),
            dominated: gamma_fam.clone(),
            full,
            hyperplane,
            half_index_bound,
            certified,
        });
    }
    Ok(links)
}

fn compare_spectra(u: &SingularSpectrum, v: &SingularSpectrum, len: usize) -> Result<SubordinationReport> {
    if len == 0 {
        return Ok(SubordinationReport {
            holds: true,
            first_violation: None,
            margins: Vec::new(),
            slack: Vec::new(),
        });
    }
    is_log_subordinate(&DecaySequence::from_spectrum(u, len)?, &DecaySequence::from_spectrum(v, len)?)
}

/// `s_2n(u) <= sqrt(s_1(v) s_n(v)) + errors` for `2n <= len`.
pub fn half_index_bound_holds(u: &SingularSpectrum, v: &SingularSpectrum, len: usize) -> bool {
    let prec = v.values.first().map(|x| x.prec()).unwrap_or(64);
    (1..=len / 2).all(|n| {
        let rhs = Float::with_val(prec, &v.values[0] * &v.values[n - 1]).sqrt();
        // d sqrt(xy) <= (e_x sqrt(y/x) + e_y sqrt(x/y)) / 2, bounded crudely
        // through the relative errors.
        let rel = v.error_bounds[0] / v.values[0].to_f64().max(1e-300)
            + v.error_bounds[n - 1] / v.values[n - 1].to_f64().max(1e-300);
        let slack = u.error_bounds[2 * n - 1] + rhs.to_f64() * rel;
        Float::with_val(prec, &u.values[2 * n - 1] - &rhs).to_f64() <= slack
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{compound_matrix, random_lower_triangular, random_matrix};
    use crate::symbols::Elementary;

    fn seq(v: &[f64]) -> DecaySequence {
        DecaySequence::new(v).unwrap()
    }

    fn floats(v: &[f64]) -> Vec<Float> {
        v.iter().map(|&x| Float::with_val(128, x)).collect()
    }

    #[test]
    fn textbook_majorization_example() {
        let u = DecaySequence::with_floor(&[1.0, 1.0, 0.0, 0.0], 256).unwrap();
        let v = DecaySequence::with_floor(&[2.0, 0.0, 0.0, 0.0], 256).unwrap();
        assert!(is_subordinate(&u, &v).unwrap().holds);
        assert!(!is_subordinate(&v, &u).unwrap().holds);
    }

    #[test]
    fn equal_sequences_have_zero_margins() {
        let u = seq(&[3.0, 2.0, 0.5]);
        let r = is_subordinate(&u, &u).unwrap();
        assert!(r.holds);
        assert!(r.margins.iter().all(|&m| m == 0.0));
        assert!(is_log_subordinate(&u, &u).unwrap().holds);
    }

    #[test]
    fn violation_at_first_index() {
        let r = is_subordinate(&seq(&[2.0, 1.0]), &seq(&[1.0, 1.0])).unwrap();
        assert_eq!(r.first_violation, Some(1));
        assert!(is_subordinate(&seq(&[1.0]), &seq(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn geometric_sequences_are_log_subordinate() {
        let u: Vec<f64> = (1..=40).map(|j| 0.9f64.powi(j)).collect();
        let v: Vec<f64> = (1..=40).map(|j| 0.95f64.powi(j)).collect();
        assert!(is_log_subordinate(&seq(&u), &seq(&v)).unwrap().holds);
        let w: Vec<f64> = v.iter().map(|x| 0.5 * x).collect();
        assert!(is_log_subordinate(&seq(&w), &seq(&v)).unwrap().holds);
        assert!(!is_log_subordinate(&seq(&v), &seq(&u)).unwrap().holds);
    }

    #[test]
    fn exponential_of_log_majorization() {
        // log u ≺ log v with h = exp gives u ≺ v.
        let u = seq(&[1.0, 0.5, 0.25, 0.125]);
        let v = seq(&[2.0, 0.5, 0.2, 0.125]);
        assert!(is_log_subordinate(&u, &v).unwrap().holds);
        assert!(convex_image_check(&u.logs(), &v.logs(), &[ConvexMap::Exp(1.0)]).unwrap());
        assert!(is_subordinate(&u, &v).unwrap().holds);
    }

    #[test]
    fn default_maps_preserve_majorization() {
        let u = floats(&[1.0, 1.0, 0.5]);
        let v = floats(&[2.0, 0.5, 0.5]);
        let maps = default_convex_maps(&u, &v);
        assert!(convex_image_check(&u, &v, &maps).unwrap());
        assert!(convex_image_check(&u, &v, &[ConvexMap::Identity]).unwrap());
        let bad = ConvexMap::Table(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 4.0)]);
        assert!(convex_image_check(&u, &v, &[bad]).is_err());
        assert!(convex_image_check(&v, &u, &maps).is_err());
    }

    #[test]
    fn corollary_bounds_for_constant_and_geometric() {
        let c = seq(&[0.7; 12]);
        assert!(corollary_bounds_check(&c, &c).unwrap());
        let u: Vec<f64> = (0..20).map(|j| 0.6f64.powi(j)).collect();
        let v: Vec<f64> = (0..20).map(|j| 0.8f64.powi(j)).collect();
        assert!(corollary_bounds_check(&seq(&u), &seq(&v)).unwrap());
    }

    #[test]
    fn kacnelson_constant_and_diagonal() {
        let ctx = PrecisionContext::new(128, 3).unwrap();
        let a = random_lower_triangular(6, &ctx);
        let d: Vec<Float> = vec![Float::with_val(128, 2); 6];
        let r = kacnelson_check(&a, &d, 6, &ctx).unwrap();
        assert!(r.subordination.holds);
        for (x, y) in r.original.values.iter().zip(&r.conjugated.values) {
            assert!(Float::with_val(128, x - y).abs().to_f64() < 1e-30);
        }
        let diag = ComplexMatrix::diagonal(&[3.0, -1.0, 2.0], 128);
        let d: Vec<Float> = (1..=3).map(|k| Float::with_val(128, k)).collect();
        let r = kacnelson_check(&diag, &d, 3, &ctx).unwrap();
        assert!(r.subordination.holds);
        assert!(r.subordination.margins[2].abs() < 1e-30);
    }

    #[test]
    fn kacnelson_rejects_bad_inputs() {
        let ctx = PrecisionContext::new(128, 0).unwrap();
        let a = random_lower_triangular(3, &ctx);
        let dec: Vec<Float> = [3.0, 2.0, 1.0].iter().map(|&x| Float::with_val(128, x)).collect();
        assert!(kacnelson_check(&a, &dec, 3, &ctx).is_err());
        let full = random_matrix(3, 3, &ctx);
        let inc: Vec<Float> = (1..=3).map(|k| Float::with_val(128, k)).collect();
        assert!(kacnelson_check(&full, &inc, 3, &ctx).is_err());
    }

    #[test]
    fn detmax_identity_and_diagonal() {
        let ctx = PrecisionContext::new(128, 0).unwrap();
        let id = ComplexMatrix::identity(3, 128);
        let r = detmax_identity_check(&id, 3, 20, &ctx).unwrap();
        assert!(r.attained_error < 1e-30);
        assert!(r.exceedances(1e-30) == 0);
        let d = ComplexMatrix::diagonal(&[3.0, 2.0, 1.0], 128);
        let r = detmax_identity_check(&d, 2, 50, &ctx).unwrap();
        assert_eq!(r.product.to_f64(), 6.0);
        assert!(r.attained_error < 1e-30);
        assert!(r.max_excess() <= 1e-30);
    }

    #[test]
    fn compound_route_matches_products() {
        let ctx = PrecisionContext::new(128, 11).unwrap();
        let m = random_matrix(5, 5, &ctx);
        let s = svd_singular_values(&m, &ctx).unwrap();
        let c = svd_singular_values(&compound_matrix(&m, 2).unwrap(), &ctx).unwrap();
        let p = Float::with_val(128, &s.values[0] * &s.values[1]);
        let rel = (Float::with_val(128, &c.values[0] - &p) / &p).abs().to_f64();
        assert!(rel < 1e-30);
    }

    #[test]
    fn scale_chain_has_identical_spectra() {
        let ctx = PrecisionContext::new(128, 0).unwrap();
        let s = Symbol::elementary(Elementary::Scale(0.5)).unwrap();
        let fams = [WeightFamily::Dirichlet(0.0), WeightFamily::Hardy, WeightFamily::Bergman(0.0)];
        let links = product_chain_check(&s, &fams, 12, &ctx).unwrap();
        for l in &links {
            assert!(l.holds(), "{} / {}", l.dominating, l.dominated);
            assert!(l.full.margins.iter().all(|m| m.abs() < 1e-25));
        }
        // Wrong order: Bergman does not dominate Hardy.
        let rev = [WeightFamily::Bergman(0.0), WeightFamily::Hardy];
        assert!(product_chain_check(&s, &rev, 8, &ctx).is_err());
    }

    #[test]
    fn lens_chain_at_small_order() {
        let ctx = PrecisionContext::new(128, 0).unwrap();
        let s = Symbol::lens(0.5).unwrap();
        let fams = [WeightFamily::Dirichlet(0.5), WeightFamily::Hardy, WeightFamily::Bergman(0.0)];
        let links = product_chain_check(&s, &fams, 32, &ctx).unwrap();
        for l in &links {
            assert!(l.holds());
            assert!(l.certified > 10);
        }
    }
}
