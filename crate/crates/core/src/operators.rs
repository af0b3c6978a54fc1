//! Finite sections of composition operators `C_phi` and weighted
//! composition operators `M_w C_phi` on `H^2(beta)`.
//!
//! In the orthonormal basis `e_k = z^k / sqrt(beta_k)` the operator has
//! entries `<C e_j, e_i> = sqrt(beta_i / beta_j) c_i(w phi^j)`. The
//! `(N+1) x (N+1)` section is built from the powers of one Taylor expansion
//! of `phi`; every coefficient carries a certified error, which becomes a
//! Weyl perturbation bound on the singular values.

use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::numerics::{svd_singular_values, ComplexMatrix, SingularSpectrum};
use crate::precision::PrecisionContext;
use crate::series::{series_multiply, PowerSeries, Powers, GUARD_BITS};
use crate::spaces::{weights_at, WeightFamily};
use crate::symbols::Symbol;

/// The factor `w` in `M_w C_phi`.
#[derive(Clone, Debug)]
pub enum Multiplier {
    One,
    /// `w = phi'`.
    Derivative,
    /// An explicit analytic function, given by its Taylor coefficients.
    Series(PowerSeries),
}

/// Matrix section of `M_w C_phi` on one weighted space.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub family: WeightFamily,
    pub symbol: Symbol,
    pub multiplier: Multiplier,
    /// Truncation order `N`; the matrix is `(N+1) x (N+1)` unless the
    /// constants were dropped.
    pub order: usize,
    pub matrix: ComplexMatrix,
    /// Largest error bound over individual entries.
    pub entry_error: f64,
    /// Spectral-norm bound on the whole entrywise error matrix.
    pub perturbation: f64,
    pub triangular: bool,
    /// Row and column 0 were removed (the `f(0) = 0` hyperplane).
    pub drops_constants: bool,
}

/// Tolerance on entry errors: half the working digits.
fn entry_tolerance(ctx: &PrecisionContext) -> f64 {
    ctx.eps_frac(1, 2)
}

/// The powers `phi^0 .. phi^K`, each truncated at `K`, from a single
/// Taylor expansion. Sections of any order `N <= K` and any weight family
/// are read off the same table.
#[derive(Clone, Debug)]
pub struct PowerTable {
    symbol: Symbol,
    base: PowerSeries,
    powers: Vec<PowerSeries>,
}

impl PowerTable {
    pub fn new(symbol: &Symbol, order: usize, ctx: &PrecisionContext) -> Result<Self> {
        let base = symbol.taylor(order, ctx)?;
        let powers: Vec<PowerSeries> = Powers::new(&base, order).take(order + 1).collect();
        Ok(Self {
            symbol: symbol.clone(),
            base,
            powers,
        })
    }

    pub fn order(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    /// The Taylor series of the symbol itself.
    pub fn base(&self) -> &PowerSeries {
        &self.base
    }

    pub fn power(&self, j: usize) -> &PowerSeries {
        &self.powers[j]
    }

    /// Section of `C_phi` of order `n`.
    pub fn operator(&self, family: &WeightFamily, n: usize, ctx: &PrecisionContext) -> Result<TruncatedOperator> {
        self.check_order(n)?;
        let columns: Vec<&PowerSeries> = self.powers[..=n].iter().collect();
        assemble(self, family, Multiplier::One, &columns, n, ctx)
    }

    /// Section of `M_w C_phi` of order `n`.
    pub fn weighted_operator(
        &self,
        multiplier: &Multiplier,
        family: &WeightFamily,
        n: usize,
        ctx: &PrecisionContext,
    ) -> Result<TruncatedOperator> {
        self.check_order(n)?;
        let w = match multiplier {
            Multiplier::One => return self.operator(family, n, ctx),
            Multiplier::Derivative => derivative_series(&self.base, n)?,
            Multiplier::Series(s) => {
                if s.trunc_order() < n {
                    return Err(Error::Dimension(format!(
                        "multiplier known to order {}, section needs {n}",
                        s.trunc_order()
                    )));
                }
                s.clone()
            }
        };
        let products: Vec<PowerSeries> = self.powers[..=n].iter().map(|p| series_multiply(&w, p, n)).collect();
        let columns: Vec<&PowerSeries> = products.iter().collect();
        assemble(self, family, multiplier.clone(), &columns, n, ctx)
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n > self.order() {
            return Err(Error::Dimension(format!(
                "table holds powers to order {}, section of order {n} requested",
                self.order()
            )));
        }
        Ok(())
    }
}

/// `w = phi'` to order `n` from the coefficients of `phi` (which must be
/// known to order `n + 1`): `c_k(w) = (k+1) c_{k+1}(phi)`.
fn derivative_series(phi: &PowerSeries, n: usize) -> Result<PowerSeries> {
    if phi.trunc_order() < n + 1 {
        return Err(Error::Dimension(format!(
            "derivative to order {n} needs the symbol to order {}",
            n + 1
        )));
    }
    let prec = phi.prec();
    let coeffs: Vec<rug::Complex> = (0..=n)
        .map(|k| rug::Complex::with_val(prec, &phi.coeff(k + 1) * (k as u32 + 1)))
        .collect();
    let s = if phi.is_real() {
        PowerSeries::from_real(coeffs.iter().map(|c| c.real().clone()).collect(), prec)
    } else {
        PowerSeries::from_complex(&coeffs, prec)
    };
    // Multiplying by k + 1 <= n + 1 scales the uniform error; the l2 error
    // picks up sqrt(sum (k+1)^2).
    let e = phi.coeff_error();
    let l2 = e * ((n + 1) as f64 * (n + 2) as f64 * (2 * n + 3) as f64 / 6.0).sqrt();
    let rounding = s.max_abs() * (-(prec as f64)).exp2();
    Ok(with_errors(s, (n + 1) as f64 * e + rounding, l2 + rounding * ((n + 1) as f64).sqrt()))
}

fn with_errors(s: PowerSeries, uniform: f64, l2: f64) -> PowerSeries {
    let s = s.with_error(uniform);
    // `with_error` derives l2 from the uniform bound; keep the sharper one.
    if l2 < s.l2_error() {
        s.with_l2_error(l2)
    } else {
        s
    }
}

fn assemble(
    table: &PowerTable,
    family: &WeightFamily,
    multiplier: Multiplier,
    columns: &[&PowerSeries],
    n: usize,
    ctx: &PrecisionContext,
) -> Result<TruncatedOperator> {
    let prec = ctx.bits() + GUARD_BITS;
    let beta = weights_at(family, n, prec)?;
    let sqrt_beta: Vec<Float> = beta.iter().map(|b| Float::with_val(prec, b.sqrt_ref())).collect();
    let max_sqrt = sqrt_beta.iter().map(|s| s.to_f64()).fold(0.0, f64::max);

    let mut m = ComplexMatrix::zeros(n + 1, n + 1, prec);
    let mut entry_error = 0.0f64;
    let mut frob2 = 0.0f64;
    let mut re = Float::new(prec);
    let mut im = Float::new(prec);
    for (j, col) in columns.iter().enumerate() {
        let inv = Float::with_val(prec, 1u32) / &sqrt_beta[j];
        let inv_f = inv.to_f64();
        for i in col.valuation()..=n {
            re.assign(col.re(i) * &sqrt_beta[i]);
            re *= &inv;
            match col.im(i) {
                Some(x) => {
                    im.assign(x * &sqrt_beta[i]);
                    im *= &inv;
                }
                None => im.assign(0),
            }
            m.set_parts(i, j, &re, &im);
        }
        // Largest scale factor over the rows this column can occupy.
        let scale = (col.valuation()..=n)
            .map(|i| sqrt_beta[i].to_f64())
            .fold(0.0, f64::max)
            .min(max_sqrt)
            * inv_f;
        if col.valuation() <= n {
            entry_error = entry_error.max(scale * col.coeff_error());
            let l2 = scale * col.l2_error();
            frob2 += l2 * l2;
        }
    }
    // Weights carry relative error below 3 n 2^-prec, entries one more
    // rounding; both are relative to the entry size.
    let rounding = m.max_abs() * (4.0 + 3.0 * n as f64) * (-(prec as f64)).exp2();
    let frob_m = frobenius(&m);
    let entry_error = entry_error * (1.0 + 1e-9) + rounding;
    let perturbation = (frob2.sqrt() + frob_m * (4.0 + 3.0 * n as f64) * (-(prec as f64)).exp2()) * (1.0 + 1e-9);
    let perturbation = perturbation.min((n + 1) as f64 * entry_error);

    if entry_error > entry_tolerance(ctx) {
        return Err(Error::Certificate(format!(
            "matrix entries certified only to {entry_error:e} (tolerance {:e}); \
             increase the precision or the quadrature node count",
            entry_tolerance(ctx)
        )));
    }
    Ok(TruncatedOperator {
        family: family.clone(),
        symbol: table.symbol.clone(),
        multiplier,
        order: n,
        matrix: m,
        entry_error,
        perturbation,
        triangular: table.symbol.fixes_origin(),
        drops_constants: false,
    })
}

fn frobenius(m: &ComplexMatrix) -> f64 {
    let mut s = 0.0f64;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            s += m.abs_f64(i, j).powi(2);
        }
    }
    s.sqrt()
}

impl TruncatedOperator {
    /// The section restricted to the `f(0) = 0` hyperplane.
    pub fn without_constants(&self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.without_first()?,
            drops_constants: true,
            ..self.clone()
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }
}

/// Section of `C_phi` on `family` of order `n`.
pub fn build_matrix(symbol: &Symbol, family: &WeightFamily, n: usize, ctx: &PrecisionContext) -> Result<TruncatedOperator> {
    PowerTable::new(symbol, n, ctx)?.operator(family, n, ctx)
}

/// Section of `M_w C_phi` of order `n`. For `w = phi'` the symbol is
/// expanded to order `n + 1`.
pub fn build_weighted_matrix(
    multiplier: &Multiplier,
    symbol: &Symbol,
    family: &WeightFamily,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<TruncatedOperator> {
    let order = match multiplier {
        Multiplier::Derivative => n + 1,
        _ => n,
    };
    PowerTable::new(symbol, order, ctx)?.weighted_operator(multiplier, family, n, ctx)
}

/// Singular values of the section, widened by the entrywise perturbation.
pub fn approx_numbers(op: &TruncatedOperator, ctx: &PrecisionContext) -> Result<SingularSpectrum> {
    Ok(svd_singular_values(&op.matrix, ctx)?.widen(op.perturbation))
}

/// How the part of the truncation tail beyond the computed range was
/// estimated.
#[derive(Clone, Debug, PartialEq)]
pub struct TailMethod {
    /// Order to which the exact sum was taken.
    pub extended_order: usize,
    /// Exact part of the squared tail (up to coefficient error).
    pub computed_sq: f64,
    /// Geometric extrapolation of the squared tail beyond the computed
    /// range; heuristic.
    pub extrapolated_sq: f64,
    /// Per-index ratio used for the extrapolation.
    pub ratio: f64,
}

/// Bound on `||C_phi - P_N C_phi P_N||_HS`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCertificate {
    pub order: usize,
    pub hs_tail: f64,
    pub method: TailMethod,
}

/// Hilbert–Schmidt norm of everything outside the leading `(N+1)`-block:
/// the columns `j > N` and the rows `k > N` of the first `N+1` columns.
///
/// Entries with `N < max(j, k) <= N_ext` are summed exactly, shell by
/// shell. The shells beyond `N_ext` are extrapolated geometrically from the
/// last eighth of the computed range; the certificate is refused when the
/// shell sums are not decreasing there.
pub fn hs_tail(
    symbol: &Symbol,
    family: &WeightFamily,
    n: usize,
    n_ext: usize,
    ctx: &PrecisionContext,
) -> Result<TailCertificate> {
    if n_ext < 2 * n {
        return Err(Error::Parameter(format!("extended order {n_ext} must be at least 2N = {}", 2 * n)));
    }
    let table = PowerTable::new(symbol, n_ext, ctx)?;
    hs_tail_from_table(&table, family, n, ctx)
}

/// [`hs_tail`] with `N_ext` the order of an existing table.
pub fn hs_tail_from_table(table: &PowerTable, family: &WeightFamily, n: usize, ctx: &PrecisionContext) -> Result<TailCertificate> {
    let n_ext = table.order();
    if n_ext < 2 * n || n_ext < 8 {
        return Err(Error::Parameter(format!("extended order {n_ext} must be at least max(2N, 8) = {}", (2 * n).max(8))));
    }
    let shells = shell_sums(table, family, ctx)?;
    let computed: f64 = shells[n + 1..].iter().sum();
    let l = (n_ext / 8).max(1);
    let last = shells[n_ext];
    let earlier = shells[n_ext - l];
    let (ratio, extrapolated) = if last == 0.0 && earlier == 0.0 {
        (0.0, 0.0)
    } else if !(last < earlier) {
        return Err(Error::Certificate(format!(
            "tail summand not decreasing at N_ext = {n_ext} ({earlier:e} -> {last:e}); \
             the operator may not be compact"
        )));
    } else {
        let q = (last / earlier).powf(1.0 / l as f64);
        (q, last * q / (1.0 - q))
    };
    Ok(TailCertificate {
        order: n,
        hs_tail: (computed + extrapolated).sqrt(),
        method: TailMethod {
            extended_order: n_ext,
            computed_sq: computed,
            extrapolated_sq: extrapolated,
            ratio,
        },
    })
}

/// `S_m = sum over entries (k, j) with max(j, k) = m` of `|entry|^2`.
fn shell_sums(table: &PowerTable, family: &WeightFamily, ctx: &PrecisionContext) -> Result<Vec<f64>> {
    let k_max = table.order();
    let prec = ctx.bits() + GUARD_BITS;
    let beta = weights_at(family, k_max, prec)?;
    let mut shells = vec![0.0f64; k_max + 1];
    let mut t = Float::new(prec);
    let mut u = Float::new(prec);
    for j in 0..=k_max {
        let p = table.power(j);
        for k in p.valuation()..=k_max {
            t.assign(p.re(k).square_ref());
            if let Some(x) = p.im(k) {
                u.assign(x.square_ref());
                t += &u;
            }
            t *= &beta[k];
            t /= &beta[j];
            shells[j.max(k)] += t.to_f64();
        }
    }
    Ok(shells)
}

/// `||phi^n||_beta` computed from coefficients up to `4n + 32`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerNorm {
    pub value: f64,
    /// Coefficient-error contribution (rigorous).
    pub error: f64,
    /// Geometric estimate of the neglected coefficients (heuristic).
    pub tail_estimate: f64,
    pub terms: usize,
}

pub fn power_norm(symbol: &Symbol, family: &WeightFamily, n: usize, ctx: &PrecisionContext) -> Result<PowerNorm> {
    if n == 0 {
        return Err(Error::Parameter("power must be at least 1".into()));
    }
    let k = 4 * n + 32;
    let base = symbol.taylor(k, ctx)?;
    let p = binary_power(&base, n, k);
    let prec = ctx.bits() + GUARD_BITS;
    let beta = weights_at(family, k, prec)?;
    let mut terms = vec![0.0f64; k + 1];
    let mut t = Float::new(prec);
    let mut u = Float::new(prec);
    let mut total = Float::new(prec);
    let mut max_sqrt_beta = 0.0f64;
    for i in p.valuation()..=k {
        t.assign(p.re(i).square_ref());
        if let Some(x) = p.im(i) {
            u.assign(x.square_ref());
            t += &u;
        }
        t *= &beta[i];
        terms[i] = t.to_f64();
        total += &t;
        max_sqrt_beta = max_sqrt_beta.max(beta[i].to_f64().sqrt());
    }
    let l = (k / 8).max(1);
    let (last, earlier) = (terms[k], terms[k - l]);
    let tail_estimate = if last == 0.0 || last >= earlier {
        // No decay visible: report the last block as the tail scale.
        terms[k + 1 - l..].iter().sum::<f64>()
    } else {
        let q = (last / earlier).powf(1.0 / l as f64);
        last * q / (1.0 - q)
    };
    Ok(PowerNorm {
        value: Float::with_val(prec, total.sqrt_ref()).to_f64(),
        error: max_sqrt_beta * p.l2_error(),
        tail_estimate: tail_estimate.sqrt(),
        terms: k + 1,
    })
}

fn binary_power(base: &PowerSeries, mut e: usize, n: usize) -> PowerSeries {
    let mut acc = PowerSeries::one(n, base.prec());
    let mut sq = base.clone();
    loop {
        if e & 1 == 1 {
            acc = series_multiply(&acc, &sq, n);
        }
        e >>= 1;
        if e == 0 {
            return acc;
        }
        sq = series_multiply(&sq, &sq, n);
    }
}

/// Spectra of the adjoint-free Dirichlet section by two routes:
/// `C_phi` on `Dirichlet(alpha)` restricted to `f(0) = 0`, and
/// `M_{phi'} C_phi` on `Bergman(alpha)` of order `N - 1`. The derivative map
/// makes these the same `N x N` matrix in exact arithmetic.
#[derive(Clone, Debug)]
pub struct TwoRoutes {
    pub dirichlet: SingularSpectrum,
    pub bergman: SingularSpectrum,
}

pub fn dirichlet_spectrum_two_routes(symbol: &Symbol, alpha: f64, n: usize, ctx: &PrecisionContext) -> Result<TwoRoutes> {
    let (d, b) = two_route_operators(symbol, alpha, n, ctx)?;
    Ok(TwoRoutes {
        dirichlet: approx_numbers(&d, ctx)?,
        bergman: approx_numbers(&b, ctx)?,
    })
}

/// The two `N x N` sections compared by [`dirichlet_spectrum_two_routes`].
pub fn two_route_operators(
    symbol: &Symbol,
    alpha: f64,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<(TruncatedOperator, TruncatedOperator)> {
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    if !symbol.fixes_origin() {
        return Err(Error::Parameter(format!("{symbol} does not fix the origin")));
    }
    if n < 2 {
        return Err(Error::Parameter("two-route comparison needs N >= 2".into()));
    }
    let table = PowerTable::new(symbol, n, ctx)?;
    let dirichlet = table.operator(&WeightFamily::dirichlet(alpha)?, n, ctx)?.without_constants()?;
    let bergman = table.weighted_operator(&Multiplier::Derivative, &WeightFamily::bergman(alpha)?, n - 1, ctx)?;
    Ok((dirichlet, bergman))
}

/// Largest deviation `|a - b|` over the first `count` values, and the
/// corresponding combined error bound, as `(deviation, bound)` per index.
pub fn route_deviation(a: &SingularSpectrum, b: &SingularSpectrum, count: usize) -> Vec<(f64, f64)> {
    (0..count.min(a.len()).min(b.len()))
        .map(|k| {
            let prec = a.values[k].prec().max(b.values[k].prec());
            let d = Float::with_val(prec, &a.values[k] - &b.values[k]).abs().to_f64();
            (d, a.error_bounds[k] + b.error_bounds[k])
        })
        .collect()
}

/// `sum_{n < len} a_n^p` over the leading values that exceed `factor`
/// times their error bound.
pub fn schatten_partial_sum(spectrum: &SingularSpectrum, p: f64, factor: f64) -> f64 {
    let len = spectrum.certified_len(factor);
    spectrum.values[..len].iter().map(|v| v.to_f64().powf(p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::Elementary;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128, 0).unwrap()
    }

    fn scale(r: f64) -> Symbol {
        Symbol::elementary(Elementary::Scale(r)).unwrap()
    }

    fn monomial(m: u32) -> Symbol {
        Symbol::elementary(Elementary::Monomial(m)).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn scale_is_diagonal_in_every_family() {
        let ctx = ctx();
        for fam in [WeightFamily::Hardy, WeightFamily::Bergman(0.0), WeightFamily::Dirichlet(0.5)] {
            let op = build_matrix(&scale(0.5), &fam, 4, &ctx).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    let want = if i == j { 0.5f64.powi(i as i32) } else { 0.0 };
                    assert!((op.matrix.abs_f64(i, j) - want).abs() <= op.entry_error + 1e-30, "{fam} ({i},{j})");
                }
            }
            assert!(op.triangular);
        }
    }

    #[test]
    fn identity_map_gives_identity() {
        let op = build_matrix(&monomial(1), &WeightFamily::Hardy, 6, &ctx()).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((op.matrix.abs_f64(i, j) - want).abs() <= op.entry_error);
            }
        }
    }

    #[test]
    fn squaring_map_entries() {
        let op = build_matrix(&monomial(2), &WeightFamily::Hardy, 8, &ctx()).unwrap();
        for j in 0..9 {
            for i in 0..9 {
                let want = if i == 2 * j { 1.0 } else { 0.0 };
                assert!((op.matrix.abs_f64(i, j) - want).abs() <= op.entry_error + 1e-30);
            }
        }
        // Columns 0..=4 are orthonormal; columns 5..=8 leave the section.
        let s = approx_numbers(&op, &ctx()).unwrap().values_f64();
        for (k, v) in s.iter().enumerate() {
            let want = if k < 5 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-30, "s_{k} = {v}");
        }
    }

    #[test]
    fn scale_spectrum_is_geometric() {
        let ctx = ctx();
        let op = build_matrix(&scale(0.9), &WeightFamily::Hardy, 12, &ctx).unwrap();
        let s = approx_numbers(&op, &ctx).unwrap();
        for (k, v) in s.values_f64().iter().enumerate() {
            assert!(close(*v, 0.9f64.powi(k as i32), 1e-14));
            assert!(s.error_bounds[k] < 1e-30);
        }
    }

    #[test]
    fn scale_tail_matches_geometric_sum() {
        let ctx = ctx();
        let r: f64 = 0.7;
        let n = 10;
        let t = hs_tail(&scale(r), &WeightFamily::Hardy, n, 2 * n, &ctx).unwrap();
        let exact = r.powi(2 * n as i32 + 2) / (1.0 - r * r);
        assert!(close(t.hs_tail * t.hs_tail, exact, 1e-12), "{} vs {exact}", t.hs_tail.powi(2));
        assert!(t.method.computed_sq <= exact);
    }

    #[test]
    fn identity_tail_is_refused() {
        let err = hs_tail(&monomial(1), &WeightFamily::Hardy, 8, 16, &ctx()).unwrap_err();
        assert!(matches!(err, Error::Certificate(_)));
        assert!(hs_tail(&scale(0.5), &WeightFamily::Hardy, 8, 12, &ctx()).is_err());
    }

    #[test]
    fn power_norms_of_simple_maps() {
        let ctx = ctx();
        let p = power_norm(&scale(0.8), &WeightFamily::Hardy, 5, &ctx).unwrap();
        assert!(close(p.value, 0.8f64.powi(5), 1e-14));
        let q = power_norm(&monomial(2), &WeightFamily::Hardy, 7, &ctx).unwrap();
        assert!(close(q.value, 1.0, 1e-14));
    }

    #[test]
    fn two_routes_agree_for_scale() {
        let ctx = ctx();
        let r = dirichlet_spectrum_two_routes(&scale(0.6), 1.0, 10, &ctx).unwrap();
        for (d, b) in route_deviation(&r.dirichlet, &r.bergman, 10) {
            assert!(d <= b, "{d} > {b}");
        }
        // s_k = 0.6^(k+1) on the hyperplane.
        assert!(close(r.bergman.values[0].to_f64(), 0.6, 1e-14));
    }

    #[test]
    fn two_route_matrices_coincide_for_lens() {
        let ctx = ctx();
        let (d, b) = two_route_operators(&Symbol::lens(0.5).unwrap(), 1.0, 12, &ctx).unwrap();
        let tol = d.entry_error + b.entry_error;
        for j in 0..12 {
            for i in 0..12 {
                let diff = (d.matrix.get(i, j) - b.matrix.get(i, j)).abs().real().to_f64();
                assert!(diff <= tol, "({i},{j}): {diff} > {tol}");
            }
        }
    }

    #[test]
    fn origin_fixing_sections_are_lower_triangular() {
        let ctx = ctx();
        for s in [Symbol::lens(0.5).unwrap(), Symbol::cusp().unwrap()] {
            let op = build_matrix(&s, &WeightFamily::Dirichlet(1.0), 16, &ctx).unwrap();
            assert!(op.triangular);
            assert!(op.matrix.max_upper_abs() <= op.entry_error);
        }
        let auto = Symbol::automorphism(num_complex::Complex64::new(0.3, 0.0)).unwrap();
        let op = build_matrix(&auto, &WeightFamily::Hardy, 8, &ctx).unwrap();
        assert!(!op.triangular);
    }

    #[test]
    fn schatten_partial_sums_grow_with_order() {
        let ctx = ctx();
        let lens = Symbol::lens(0.5).unwrap();
        let table = PowerTable::new(&lens, 24, &ctx).unwrap();
        let mut prev = 0.0;
        for n in [8, 16, 24] {
            let s = approx_numbers(&table.operator(&WeightFamily::Hardy, n, &ctx).unwrap(), &ctx).unwrap();
            let sum = schatten_partial_sum(&s, 1.0, 10.0);
            assert!(sum >= prev * (1.0 - 1e-12));
            prev = sum;
        }
    }
}
