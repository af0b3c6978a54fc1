//! Invariant suites run by `specdecay verify`. Sizes are chosen so that
//! `--suite all` finishes in minutes; the full-size experiments live in
//! the acceptance test target.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde_json::json;

use specdecay::geometry::{self, CarlesonWindow, DecayModel, PullbackSample, Sampler};
use specdecay::numerics::{
    compound_matrix, random_lower_triangular, random_matrix, random_unitary, svd_singular_values, top_product,
    ComplexMatrix,
};
use specdecay::operators::{self, PowerTable};
use specdecay::series::{coeffs_via_cauchy, series_multiply, series_power, Quadrature};
use specdecay::spaces::{self, WeightFamily};
use specdecay::subordination::{self, ConvexMap, DecaySequence};
use specdecay::symbols::{Elementary, Symbol};
use specdecay::PrecisionContext;

use crate::commands::{random_pairs, relative_gap};
use crate::output::{Format, Table};
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Numerics,
    Series,
    Spaces,
    Symbols,
    Operators,
    Subordination,
    Geometry,
}

impl Suite {
    pub const MODULES: [Suite; 7] = [
        Suite::Numerics,
        Suite::Series,
        Suite::Spaces,
        Suite::Symbols,
        Suite::Operators,
        Suite::Subordination,
        Suite::Geometry,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Numerics => "numerics",
            Suite::Series => "series",
            Suite::Spaces => "spaces",
            Suite::Symbols => "symbols",
            Suite::Operators => "operators",
            Suite::Subordination => "subordination",
            Suite::Geometry => "geometry",
        }
    }

    fn checks(&self) -> Vec<(&'static str, CheckFn)> {
        match self {
            Suite::All => Suite::MODULES.iter().flat_map(|s| s.checks()).collect(),
            Suite::Numerics => vec![
                ("svd_unitary_invariance", svd_unitary_invariance as CheckFn),
                ("compound_matrix_products", compound_matrix_products),
                ("det_gram_bound", det_gram_bound),
            ],
            Suite::Series => vec![
                ("aliasing_certificate", aliasing_certificate as CheckFn),
                ("power_consistency", power_consistency),
                ("parseval_bound", parseval_bound),
            ],
            Suite::Spaces => vec![
                ("kernel_closed_forms", kernel_closed_forms as CheckFn),
                ("kernel_symmetry", kernel_symmetry),
                ("kernel_norm_growth", kernel_norm_growth),
                ("automorphism_kernel_ratio", automorphism_kernel_ratio),
                ("weight_domination", weight_domination),
            ],
            Suite::Symbols => vec![
                ("derivative_consistency", derivative_consistency as CheckFn),
                ("self_map_grid", self_map_grid),
                ("cusp_asymptotics", cusp_asymptotics),
                ("lens_inverse_asymptotics", lens_inverse_asymptotics),
            ],
            Suite::Operators => vec![
                ("diagonal_oracle", diagonal_oracle as CheckFn),
                ("triangularity", triangularity),
                ("truncation_monotonicity", truncation_monotonicity),
                ("two_route_agreement", two_route_agreement),
            ],
            Suite::Subordination => vec![
                ("kacnelson", kacnelson as CheckFn),
                ("log_implies_power_subordination", log_implies_power),
                ("convex_images", convex_images),
                ("product_chain", product_chain),
            ],
            Suite::Geometry => vec![
                ("window_sandwich", window_sandwich as CheckFn),
                ("pullback_trivial_cases", pullback_trivial_cases),
                ("rho2_quadratic_bound", rho2_quadratic_bound),
                ("luecking_levels", luecking_levels),
                ("nevanlinna_schwarz_bound", nevanlinna_schwarz),
                ("synthetic_fit_recovery", synthetic_fits),
            ],
        }
    }
}

/// Outcome of one check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type CheckFn = fn() -> specdecay::Result<(bool, String)>;

/// Runs every check of `suite`, reporting each to stderr as it finishes.
pub fn run_checks(suite: Suite) -> Vec<CheckOutcome> {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::MODULES.to_vec() } else { vec![suite] };
    let mut out = Vec::new();
    for s in suites {
        for (name, f) in s.checks() {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            let seconds = start.elapsed().as_secs_f64();
            eprintln!("{} {}::{name} ({seconds:.1}s) {detail}", if passed { "PASS" } else { "FAIL" }, s.name());
            out.push(CheckOutcome {
                suite: s.name(),
                name,
                passed,
                detail,
                seconds,
            });
        }
    }
    out
}

pub(crate) fn run_suite(suite: Suite, format: Format, out: Option<&Path>) -> CliResult<()> {
    let outcomes = run_checks(suite);
    let mut t = Table::new(&["suite", "check", "status", "detail"]);
    t.meta("command", "verify")
        .meta("suite", suite.name())
        .meta("version", env!("CARGO_PKG_VERSION"));
    for o in &outcomes {
        t.push(vec![
            json!(o.suite),
            json!(o.name),
            json!(if o.passed { "pass" } else { "fail" }),
            json!(o.detail),
        ]);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    t.meta("failed", failed);
    t.emit(format, out)?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{failed} of {} checks failed", outcomes.len())))
    }
}

fn ctx(bits: u32, seed: u64) -> specdecay::Result<PrecisionContext> {
    PrecisionContext::new(bits, seed)
}

fn abs(z: &Complex) -> f64 {
    Float::with_val(64, z.abs_ref()).to_f64()
}

fn scale(r: f64) -> specdecay::Result<Symbol> {
    Symbol::elementary(Elementary::Scale(r))
}

fn builtins() -> specdecay::Result<Vec<Symbol>> {
    ["cusp", "lens:0.5", "lens:0.25", "auto:0.3+0.1i", "halfplane-auto", "scale:0.9", "monomial:2", "blaschke:0.5,0.75", "st-log:0.01"]
        .iter()
        .map(|s| s.parse())
        .collect()
}

// numerics

fn svd_unitary_invariance() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 11)?;
    let diag = [1.0, 0.5, 0.25, 1e-10, 1e-20, 1e-40];
    let d = ComplexMatrix::diagonal(&diag, 256);
    let u = random_unitary(6, &ctx.with_seed(12))?;
    let v = random_unitary(6, &ctx.with_seed(13))?;
    let m = u.mul(&d)?.mul(&v.conj_transpose())?;
    let s = svd_singular_values(&m, &ctx)?;
    let mut worst = 0.0f64;
    let mut ok = true;
    for (k, want) in diag.iter().enumerate() {
        let err = Float::with_val(256, &s.values[k] - *want).abs().to_f64();
        worst = worst.max(err);
        ok &= err <= s.error_bounds[k] + 1e-60;
    }
    Ok((ok, format!("max deviation {worst:e}")))
}

fn compound_matrix_products() -> specdecay::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for t in 0..20 {
        let ctx = ctx(256, 100 + t)?;
        let m = random_matrix(8, 8, &ctx);
        let s = svd_singular_values(&m, &ctx)?;
        for n in 1..=3 {
            let c = svd_singular_values(&compound_matrix(&m, n)?, &ctx)?;
            let p = top_product(&s.values, n);
            let rel = Float::with_val(256, &c.values[0] - &p).abs() / &p;
            worst = worst.max(rel.to_f64());
        }
    }
    let tol = ctx(256, 0)?.eps_frac(1, 4);
    Ok((worst < tol, format!("max relative gap {worst:e} (tol {tol:e})")))
}

fn det_gram_bound() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 21)?;
    let m = random_matrix(6, 6, &ctx);
    let tol = ctx.eps_frac(1, 4);
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 1..=3 {
        let r = subordination::detmax_identity_check(&m, n, 200, &ctx)?;
        ok &= r.exceedances(tol) == 0 && r.attained_error < tol;
        detail.push(format!("n={n}: max excess {:.3e}, attained {:.1e}", r.max_excess(), r.attained_error));
    }
    Ok((ok, detail.join("; ")))
}

// series

fn aliasing_certificate() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let n = 32;
    let mut worst = 0.0f64;
    let mut ok = true;
    for s in ["cusp", "lens:0.5", "auto:0.3+0.1i"] {
        let sym: Symbol = s.parse()?;
        let quad = Quadrature::for_order(n, ctx.bits());
        let a = coeffs_via_cauchy(|z| sym.eval(z), n, &quad, &ctx)?;
        let doubled = Quadrature { points: 2 * quad.points, ..quad };
        let b = coeffs_via_cauchy(|z| sym.eval(z), n, &doubled, &ctx)?;
        for k in 0..=n {
            let d = abs(&Complex::with_val(256, &a.coeff(k) - &b.coeff(k)));
            worst = worst.max(d);
            ok &= d < a.coeff_error();
        }
    }
    Ok((ok, format!("max change under doubled nodes {worst:e}")))
}

fn power_consistency() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let n = 24;
    let sym: Symbol = "lens:0.5".parse()?;
    let base = sym.taylor(n, &ctx)?;
    let mut ok = true;
    let mut worst = 0.0f64;
    for j in 1..5 {
        let next = series_power(&base, j + 1, n);
        let stepped = series_multiply(&series_power(&base, j, n), &base, n);
        ok &= (0..=n).all(|k| next.coeff(k) == stepped.coeff(k));
        let direct = coeffs_via_cauchy(
            |z| {
                let w = sym.eval(z)?;
                Ok(w.pow((j + 1) as u32))
            },
            n,
            &Quadrature::for_order(n, ctx.bits()).with_real(true),
            &ctx,
        )?;
        for k in 0..=n {
            let d = abs(&Complex::with_val(256, &next.coeff(k) - &direct.coeff(k)));
            worst = worst.max(d);
            ok &= d <= next.coeff_error() + direct.coeff_error();
        }
    }
    Ok((ok, format!("power vs direct expansion {worst:e}")))
}

fn parseval_bound() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let mut worst = 0.0f64;
    for sym in builtins()? {
        let s = sym.taylor(64, &ctx)?;
        worst = worst.max(s.l2_norm() - s.l2_error());
    }
    // l2_norm is an f64 upper estimate padded by 1e-12.
    Ok((worst <= 1.0 + 1e-11, format!("max coefficient l2 norm {worst}")))
}

// spaces

fn kernel_closed_forms() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let mut worst = 0.0f64;
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        let fam = WeightFamily::DirichletTilde(alpha);
        for (a, z) in random_pairs(20, 31) {
            let (a, z) = (ctx.complex(a.re, a.im), ctx.complex(z.re, z.im));
            let closed = spaces::kernel_closed_form(&a, &z, alpha, &ctx)?;
            let series = spaces::kernel_series(&a, &z, &fam, 1e-40, &ctx)?;
            worst = worst.max(relative_gap(&closed, &series.value));
        }
    }
    Ok((worst < 1e-30, format!("max relative gap {worst:e}")))
}

fn kernel_symmetry() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let mut worst = 0.0f64;
    for alpha in [0.0, 0.5, 2.0] {
        for (a, z) in random_pairs(20, 32) {
            let (a, z) = (ctx.complex(a.re, a.im), ctx.complex(z.re, z.im));
            let k1 = spaces::kernel_closed_form(&a, &z, alpha, &ctx)?;
            let k2 = spaces::kernel_closed_form(&z, &a, alpha, &ctx)?;
            worst = worst.max(relative_gap(&k1, &Complex::with_val(256, k2.conj_ref())));
        }
    }
    Ok((worst < 1e-60, format!("max asymmetry {worst:e}")))
}

fn kernel_norm_growth() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(128, 0)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for spec in ["hardy", "bergman:0", "dirichlet:0.5", "dirichlet:0", "expsqrt"] {
        let fam: WeightFamily = spec.parse()?;
        let norms = [0.9, 0.99, 0.999]
            .iter()
            .map(|&r| Ok(spaces::kernel_norm_sq(&ctx.complex(r, 0.0), &fam, 1e-12, &ctx)?.value.real().to_f64()))
            .collect::<specdecay::Result<Vec<f64>>>()?;
        ok &= norms.windows(2).all(|w| w[1] > w[0]);
        detail.push(format!("{spec}: {:.3e}", norms[2]));
    }
    Ok((ok, detail.join(", ")))
}

/// `||K_T(r)|| / ||K_r||` for `beta_n = e^-sqrt(n)` and `T(z) = (2z+1)/(z+2)`.
pub fn automorphism_ratios(radii: &[f64]) -> specdecay::Result<Vec<f64>> {
    let ctx = ctx(128, 0)?;
    let fam = WeightFamily::exp_sqrt();
    let t = Symbol::half_plane_auto();
    radii
        .iter()
        .map(|&r| {
            let a = ctx.complex(r, 0.0);
            let ta = t.eval(&a)?;
            let num = spaces::kernel_norm_sq(&ta, &fam, 1e-12, &ctx)?.value;
            let den = spaces::kernel_norm_sq(&a, &fam, 1e-12, &ctx)?.value;
            Ok(Float::with_val(128, num.real() / den.real()).sqrt().to_f64())
        })
        .collect()
}

fn automorphism_kernel_ratio() -> specdecay::Result<(bool, String)> {
    let r = automorphism_ratios(&[0.9, 0.99, 0.999])?;
    let ok = r.windows(2).all(|w| w[1] > w[0]) && r[2] / r[0] > 1e2;
    Ok((ok, format!("ratios {:.3e}, {:.3e}, {:.3e}", r[0], r[1], r[2])))
}

fn weight_domination() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(128, 0)?;
    let chain: Vec<WeightFamily> = ["dirichlet:0", "dirichlet:0.5", "dirichlet:1", "hardy", "bergman:0", "bergman:1"]
        .iter()
        .map(|s| s.parse())
        .collect::<specdecay::Result<_>>()?;
    let mut ok = true;
    for w in chain.windows(2) {
        ok &= spaces::check_weight_domination(&w[0], &w[1], 2000, &ctx)?.holds;
    }
    let reversed = spaces::check_weight_domination(&chain[4], &chain[3], 2000, &ctx)?;
    ok &= !reversed.holds;
    Ok((ok, "dirichlet:0 > dirichlet:0.5 > dirichlet:1 > hardy > bergman:0 > bergman:1; reverse rejected".into()))
}

// symbols

fn derivative_consistency() -> specdecay::Result<(bool, String)> {
    let bits = 192u32;
    let h = Float::with_val(bits, Float::i_exp(1, -(bits as i32) / 3));
    let tol = (-(bits as f64) / 3.0).exp2();
    let mut worst = 0.0f64;
    for (i, s) in builtins()?.iter().enumerate() {
        for (z, _) in random_pairs(64, 40 + i as u64) {
            let z = Complex::with_val(bits, (z.re, z.im));
            let zp = Complex::with_val(bits, &z + &h);
            let zm = Complex::with_val(bits, &z - &h);
            let fd = (s.eval(&zp)? - s.eval(&zm)?) / Complex::with_val(bits, &h * 2u32);
            worst = worst.max(abs(&Complex::with_val(bits, &fd - &s.derivative(&z)?)));
        }
    }
    Ok((worst < tol, format!("max gap {worst:e} (tol {tol:e})")))
}

fn self_map_grid() -> specdecay::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for s in builtins()? {
        worst = worst.max(s.max_abs_on_grid()?);
    }
    Ok((worst < 1.0, format!("max |phi| on grid {worst}")))
}

fn cusp_asymptotics() -> specdecay::Result<(bool, String)> {
    let chi = Symbol::cusp()?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 2..=8 {
        let r = 1.0 - 10f64.powi(-k);
        let z = Complex::with_val(256, r);
        let l = (1.0 / (1.0 - r)).ln();
        let v = chi.eval(&z)?;
        let ratio = (1.0 - v.real().to_f64()) * l;
        let d = chi.derivative(&z)?.real().to_f64() * (1.0 - r) * l * l;
        for x in [ratio, d] {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    Ok((lo >= 0.1 && hi <= 10.0, format!("ratios in [{lo:.3}, {hi:.3}]")))
}

fn lens_inverse_asymptotics() -> specdecay::Result<(bool, String)> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for theta in [0.25, 0.5, 0.75] {
        let lam = Symbol::lens(theta)?;
        for k in 1..=6 {
            let u = 1.0 - 10f64.powi(-k);
            let w = lam.eval(&Complex::with_val(256, u))?.real().to_f64();
            let ratio = (1.0 - u) / (1.0 - w).powf(1.0 / theta);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    Ok((lo >= 0.1 && hi <= 10.0, format!("ratios in [{lo:.3}, {hi:.3}]")))
}

// operators

fn diagonal_oracle() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let op = operators::build_matrix(&scale(0.9)?, &WeightFamily::Hardy, 31, &ctx)?;
    let s = operators::approx_numbers(&op, &ctx)?;
    let mut worst = 0.0f64;
    for (k, v) in s.values.iter().enumerate() {
        let want = Float::with_val(256, Float::parse("0.9").unwrap()).pow(k as u32);
        worst = worst.max(Float::with_val(256, v - &want).abs().to_f64() / want.to_f64());
    }
    Ok((worst < 1e-30, format!("max relative error {worst:e}")))
}

fn triangularity() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for s in ["cusp", "lens:0.5"] {
        let op = operators::build_matrix(&s.parse()?, &WeightFamily::Hardy, 48, &ctx)?;
        let upper = op.matrix.max_upper_abs();
        ok &= op.triangular && upper <= op.entry_error;
        detail.push(format!("{s}: upper {upper:.1e} <= {:.1e}", op.entry_error));
    }
    Ok((ok, detail.join(", ")))
}

fn truncation_monotonicity() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let sym: Symbol = "lens:0.5".parse()?;
    let fam = WeightFamily::Hardy;
    let (n, big) = (24, 48);
    let table = PowerTable::new(&sym, 2 * big, &ctx)?;
    let small = operators::approx_numbers(&table.operator(&fam, n, &ctx)?, &ctx)?;
    let large = operators::approx_numbers(&table.operator(&fam, big, &ctx)?, &ctx)?;
    let tail = operators::hs_tail_from_table(&table, &fam, n, &ctx)?;
    let mut ok = true;
    let mut soft = 0;
    for k in 0..small.len() {
        let d = Float::with_val(256, &large.values[k] - &small.values[k]).to_f64();
        let slack = small.error_bounds[k] + large.error_bounds[k];
        ok &= d.abs() <= tail.hs_tail + slack;
        if d < -slack {
            soft += 1;
        }
    }
    let p_small = operators::schatten_partial_sum(&small, 1.0, 10.0);
    let p_large = operators::schatten_partial_sum(&large, 1.0, 10.0);
    ok &= p_large >= p_small;
    Ok((
        ok,
        format!("tail {:.2e}; lower monotonicity misses {soft}; S_1 partial sums {p_small:.6} <= {p_large:.6}", tail.hs_tail),
    ))
}

fn two_route_agreement() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let mut ok = true;
    let mut worst = 0.0f64;
    for s in ["cusp", "lens:0.5"] {
        let r = operators::dirichlet_spectrum_two_routes(&s.parse()?, 1.0, 48, &ctx)?;
        for (d, b) in operators::route_deviation(&r.dirichlet, &r.bergman, 20) {
            ok &= d <= b;
            worst = worst.max(d);
        }
    }
    Ok((ok, format!("max deviation {worst:e}")))
}

// subordination

fn kacnelson() -> specdecay::Result<(bool, String)> {
    let d: Vec<Float> = (0..12).map(|j| Float::with_val(256, j + 1)).collect();
    // 1 + 2^-64 is not representable in f64.
    let slack = Float::with_val(256, Float::i_exp(1, -64)) + 1u32;
    let mut violations = 0;
    for t in 0..200u64 {
        let ctx = ctx(256, 5000 + t)?;
        let a = random_lower_triangular(12, &ctx);
        let r = subordination::kacnelson_check(&a, &d, 12, &ctx)?;
        let (u, v) = (&r.conjugated.values, &r.original.values);
        for n in 1..=12 {
            if top_product(u, n) > top_product(v, n) * &slack {
                violations += 1;
            }
        }
    }
    Ok((violations == 0, format!("{violations} violations in 200 trials")))
}

fn log_subordinate_pair(seed: u64) -> specdecay::Result<(DecaySequence, DecaySequence)> {
    let mut g = specdecay::numerics::GaussianStream::new(seed);
    let mut v: Vec<f64> = (0..24).map(|_| (-4.0 * g.uniform()).exp()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let shrink = 0.5 + 0.5 * g.uniform();
    let u: Vec<f64> = v.iter().enumerate().map(|(j, x)| x * shrink.powi(j as i32 + 1)).collect();
    Ok((DecaySequence::new(&u)?, DecaySequence::new(&v)?))
}

fn powered(s: &DecaySequence, p: f64) -> specdecay::Result<DecaySequence> {
    DecaySequence::new(&s.values_f64().iter().map(|x| x.powf(p)).collect::<Vec<_>>())
}

fn log_implies_power() -> specdecay::Result<(bool, String)> {
    let mut ok = true;
    for seed in 0..20 {
        let (u, v) = log_subordinate_pair(seed)?;
        ok &= subordination::is_log_subordinate(&u, &v)?.holds;
        for p in [0.1, 0.5, 1.0, 2.0, 8.0] {
            ok &= subordination::is_subordinate(&powered(&u, p)?, &powered(&v, p)?)?.holds;
        }
    }
    // A pair that is not log-subordinate fails for some power.
    let u = DecaySequence::new(&[1.0, 1.0])?;
    let v = DecaySequence::new(&[2.0, 0.1])?;
    let log_fails = !subordination::is_log_subordinate(&u, &v)?.holds;
    let mut some_power_fails = false;
    for p in [0.1, 0.5, 1.0, 2.0, 8.0] {
        some_power_fails |= !subordination::is_subordinate(&powered(&u, p)?, &powered(&v, p)?)?.holds;
    }
    ok &= log_fails && some_power_fails;
    Ok((ok, "20 random pairs, p in {0.1, 0.5, 1, 2, 8}; counterexample detected".into()))
}

fn convex_images() -> specdecay::Result<(bool, String)> {
    let mut ok = true;
    for seed in 0..10 {
        let (u, v) = log_subordinate_pair(100 + seed)?;
        let (u, v) = (u.values().to_vec(), v.values().to_vec());
        if !subordination::is_subordinate_values(&u, &v)?.holds {
            return Ok((false, format!("seed {seed}: pair not subordinate")));
        }
        let maps = subordination::default_convex_maps(&u, &v);
        ok &= subordination::convex_image_check(&u, &v, &maps)?;
        ok &= subordination::convex_image_check(&u, &v, &[ConvexMap::Identity, ConvexMap::Exp(3.0)])?;
    }
    Ok((ok, "10 random subordinate pairs".into()))
}

fn product_chain() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let families: Vec<WeightFamily> = ["dirichlet:0.5", "hardy", "bergman:0"]
        .iter()
        .map(|s| s.parse())
        .collect::<specdecay::Result<_>>()?;
    let links = subordination::product_chain_check(&"lens:0.5".parse()?, &families, 48, &ctx)?;
    let ok = links.iter().all(|l| l.holds());
    let detail: Vec<String> = links
        .iter()
        .map(|l| format!("{} > {}: {} certified", l.dominating, l.dominated, l.certified))
        .collect();
    Ok((ok, detail.join("; ")))
}

// geometry

fn window_sandwich() -> specdecay::Result<(bool, String)> {
    let mut ok = true;
    let mut checked = 0;
    for (theta, h) in [(0.0, 0.1), (0.7, 0.05), (-2.0, 0.02)] {
        let xi = Complex64::from_polar(1.0, theta);
        let w = CarlesonWindow::new(xi, h)?;
        for i in 0..100 {
            for j in 0..100 {
                let r = 1.0 - 8.0 * h * i as f64 / 100.0;
                let z = Complex64::from_polar(r, theta + (j as f64 / 50.0 - 1.0) * 8.0 * h);
                if geometry::in_carleson_box(xi, h, z) {
                    ok &= w.contains(z);
                    checked += 1;
                }
                if w.contains(z) {
                    ok &= geometry::in_carleson_box(xi, 2.0 * PI * h, z);
                    checked += 1;
                }
            }
        }
    }
    Ok((ok, format!("{checked} inclusions checked")))
}

fn pullback_trivial_cases() -> specdecay::Result<(bool, String)> {
    let sampler = Sampler::uniform(8);
    let id = Symbol::elementary(Elementary::Monomial(1))?;
    let zero = geometry::rho2(&scale(0.5)?, 0.1, 16, &sampler)?.value;
    let sample = PullbackSample::new(&id, &sampler)?;
    let masses: Vec<f64> = (0..8)
        .map(|m| Ok(sample.window_mass(&CarlesonWindow::at_angle(m as f64 * PI / 4.0, 0.125)?)))
        .collect::<specdecay::Result<_>>()?;
    let area = CarlesonWindow::at_angle(0.0, 0.125)?.area();
    let spread = masses.iter().map(|m| (m - area).abs()).fold(0.0, f64::max);
    Ok((zero == 0.0 && spread < 2e-3, format!("scale(0.5): {zero}; identity window error {spread:.1e}")))
}

fn rho2_quadratic_bound() -> specdecay::Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for s in ["lens:0.5", "cusp", "auto:0.3+0.1i"] {
        let sym: Symbol = s.parse()?;
        let sampler = Sampler::for_symbol(&sym).with_k(8);
        let coarse = PullbackSample::new(&sym, &sampler)?;
        let fine = PullbackSample::new(&sym, &sampler.refined())?;
        let ratios = [0.25, 0.125, 0.0625, 0.03125]
            .iter()
            .map(|&h| {
                let r = geometry::rho2_from_samples(&coarse, &fine, h, 64)?;
                Ok((r.value + r.refinement_delta) / (h * h))
            })
            .collect::<specdecay::Result<Vec<f64>>>()?;
        let bound = 2.0 * ratios[0].max(1.0);
        ok &= ratios.iter().all(|r| *r <= bound);
        detail.push(format!("{s}: max rho/h^2 {:.3}", ratios.iter().copied().fold(0.0, f64::max)));
    }
    Ok((ok, detail.join(", ")))
}

fn luecking_levels() -> specdecay::Result<(bool, String)> {
    let contracted = geometry::luecking_sum(&scale(0.5)?, 0.0, 2.0, 8, &Sampler::uniform(8))?;
    let id = Symbol::elementary(Elementary::Monomial(1))?;
    let identity = geometry::luecking_sum(&id, 0.0, 2.0, 6, &Sampler::uniform(9))?;
    let lens: Symbol = "lens:0.5".parse()?;
    let lens_levels = geometry::luecking_sum(&lens, 0.0, 1.0, 10, &Sampler::for_symbol(&lens).with_k(9))?;
    let ok = contracted[1..].iter().all(|&l| l == 0.0)
        && identity[5] > 0.5 * identity[0]
        && lens_levels[2..].windows(2).all(|w| w[1] < w[0]);
    Ok((
        ok,
        format!(
            "identity level 6 {:.3}; lens level 3 {:.2e} -> level 10 {:.2e}",
            identity[5], lens_levels[2], lens_levels[9]
        ),
    ))
}

fn nevanlinna_schwarz() -> specdecay::Result<(bool, String)> {
    let ctx = ctx(256, 0)?;
    let mut ok = true;
    let mut found = 0;
    for (i, s) in ["cusp", "lens:0.5"].iter().enumerate() {
        let sym: Symbol = s.parse()?;
        for (z, _) in random_pairs(20, 60 + i as u64) {
            let w = sym.eval(&ctx.complex(z.re, z.im))?;
            let r = geometry::nevanlinna_univalent(&sym, &w, 1.0, &ctx)?;
            let w2 = Float::with_val(256, w.norm_ref()).to_f64();
            ok &= r.value <= (1.0 - w2) + 1e-20;
            found += usize::from(r.preimage.is_some());
        }
    }
    Ok((ok && found == 40, format!("{found} of 40 preimages found")))
}

fn synthetic_fits() -> specdecay::Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (model, b) in [(DecayModel::SqrtN, 2.0), (DecayModel::Geometric, 0.1), (DecayModel::NOverLogN, 0.7)] {
        let vals: Vec<f64> = (1..=96).map(|n| (-b * model.regressor(n.max(3))).exp()).collect();
        let fit = geometry::fit_decay(&DecaySequence::new(&vals)?, model, (8, 96))?;
        worst = worst.max((fit.rate / b - 1.0).abs());
    }
    Ok((worst < 0.01, format!("max relative rate error {worst:e}")))
}
