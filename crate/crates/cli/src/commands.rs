use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rug::{Complex, Float};
use serde_json::{json, Value};

use specdecay::geometry::{self, DecayModel, PullbackSample, Sampler};
use specdecay::numerics::{fmt_float, GaussianStream};
use specdecay::operators::{self, PowerTable, TailCertificate};
use specdecay::precision::decimal_digits;
use specdecay::spaces;
use specdecay::subordination::{self, CERTIFIED_FACTOR};
use specdecay::symbols::parse_complex;
use specdecay::{DecaySequence, PrecisionContext, SingularSpectrum, Symbol, WeightFamily};

use crate::output::Table;
use crate::{verify, CliError, CliResult, Command, Common};

const CERTIFIED: &str = "certified";
const HEURISTIC: &str = "heuristic";

pub(crate) fn execute(cmd: Command) -> CliResult<()> {
    let start = Instant::now();
    let name = command_name(&cmd);
    let result = match cmd {
        Command::Spectrum {
            symbol,
            space,
            n,
            hyperplane,
            tail_order,
            matrix_out,
            common,
        } => spectrum(&symbol, &space, n, hyperplane, tail_order, matrix_out.as_deref(), &common),
        Command::Compare { symbol, spaces, n, common } => compare(&symbol, &spaces, n, &common),
        Command::Decay {
            symbol,
            space,
            n,
            models,
            fit_range,
            common,
        } => decay(&symbol, &space, n, &models, fit_range.as_deref(), &common),
        Command::Carleson {
            symbol,
            h_grid,
            xi_count,
            k,
            common,
        } => carleson(&symbol, &h_grid, xi_count, k, &common),
        Command::Schatten {
            symbol,
            gamma,
            p,
            depth,
            k,
            common,
        } => schatten(&symbol, gamma, p, depth, k, &common),
        Command::Kernels {
            space,
            alpha,
            points,
            count,
            common,
        } => kernels(&space, alpha, points.as_deref(), count, &common),
        Command::Taylor { symbol, n, common } => taylor(&symbol, n, &common),
        Command::Verify { suite, format, out } => verify::run_suite(suite, format, out.as_deref()),
        Command::TwoRoutes {
            symbol,
            alpha,
            n,
            count,
            common,
        } => two_routes(&symbol, alpha, n, count, &common),
    };
    // Wall-clock goes to stderr only so that output files stay reproducible.
    eprintln!("# {name}: {:.2}s", start.elapsed().as_secs_f64());
    result
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Spectrum { .. } => "spectrum",
        Command::Compare { .. } => "compare",
        Command::Decay { .. } => "decay",
        Command::Carleson { .. } => "carleson",
        Command::Schatten { .. } => "schatten",
        Command::Kernels { .. } => "kernels",
        Command::Taylor { .. } => "taylor",
        Command::Verify { .. } => "verify",
        Command::TwoRoutes { .. } => "two-routes",
    }
}

fn context(common: &Common) -> CliResult<PrecisionContext> {
    Ok(PrecisionContext::new(common.bits, common.seed)?)
}

fn check_order(n: usize) -> CliResult<()> {
    if n < 8 {
        return Err(CliError::Usage(format!("--n must be at least 8, got {n}")));
    }
    Ok(())
}

fn header(t: &mut Table, command: &str, common: &Common) {
    t.meta("command", command)
        .meta("bits", common.bits)
        .meta("seed", common.seed)
        .meta("version", env!("CARGO_PKG_VERSION"));
}

fn tag(certified: bool) -> &'static str {
    if certified {
        CERTIFIED
    } else {
        HEURISTIC
    }
}

fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn tail_json(tail: &TailCertificate) -> Value {
    json!({
        "value": sci(tail.hs_tail),
        "extended_order": tail.method.extended_order,
        "extrapolated_sq": sci(tail.method.extrapolated_sq),
        "tag": tag(tail.method.extrapolated_sq == 0.0),
    })
}

/// Rows `n, a_n, err_bound, certified` for a spectrum.
pub(crate) fn spectrum_table(s: &SingularSpectrum, bits: u32) -> Table {
    let digits = decimal_digits(bits);
    let mut t = Table::new(&["n", "a_n", "err_bound", "certified"]);
    for (k, (v, e)) in s.values.iter().zip(&s.error_bounds).enumerate() {
        let certified = *v > CERTIFIED_FACTOR * e && !v.is_zero();
        t.push(vec![json!(k + 1), json!(fmt_float(v, digits)), json!(sci(*e)), json!(tag(certified))]);
    }
    t
}

fn spectrum(
    symbol: &str,
    space: &str,
    n: usize,
    hyperplane: bool,
    tail_order: Option<usize>,
    matrix_out: Option<&Path>,
    common: &Common,
) -> CliResult<()> {
    check_order(n)?;
    let ctx = context(common)?;
    let sym: Symbol = symbol.parse()?;
    let family: WeightFamily = space.parse()?;
    let tail_order = tail_order.unwrap_or(2 * n);
    if tail_order != 0 && tail_order < 2 * n {
        return Err(CliError::Usage(format!("--tail-order must be 0 or at least 2N = {}", 2 * n)));
    }
    let table = PowerTable::new(&sym, n.max(tail_order), &ctx)?;
    let mut op = table.operator(&family, n, &ctx)?;
    if hyperplane {
        op = op.without_constants()?;
    }
    if let Some(p) = matrix_out {
        std::fs::write(p, op.matrix.to_text(decimal_digits(common.bits)))?;
    }
    let s = operators::approx_numbers(&op, &ctx)?;
    let mut t = spectrum_table(&s, common.bits);
    header(&mut t, "spectrum", common);
    t.meta("symbol", symbol)
        .meta("space", space)
        .meta("n", n)
        .meta("hyperplane", hyperplane)
        .meta("triangular", op.triangular)
        .meta("entry_error", sci(op.entry_error))
        .meta("perturbation", sci(op.perturbation))
        .meta("sweeps", s.source.sweeps)
        .meta("certified_len", s.certified_len(CERTIFIED_FACTOR));
    if tail_order != 0 {
        let tail = operators::hs_tail_from_table(&table, &family, n, &ctx)?;
        t.meta("truncation_tail", tail_json(&tail));
        eprintln!("# truncation tail {:e} ({})", tail.hs_tail, tag(tail.method.extrapolated_sq == 0.0));
    }
    eprintln!("# certified prefix {} of {}", s.certified_len(CERTIFIED_FACTOR), s.len());
    t.emit(common.format, common.out.as_deref())
}

fn parse_list<T, E: std::fmt::Display>(s: &str, what: &str, f: impl Fn(&str) -> Result<T, E>) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|x| f(x.trim()).map_err(|e| CliError::Usage(format!("bad {what} {x:?}: {e}"))))
        .collect()
}

fn compare(symbol: &str, spaces: &str, n: usize, common: &Common) -> CliResult<()> {
    check_order(n)?;
    let ctx = context(common)?;
    let sym: Symbol = symbol.parse()?;
    let families = parse_list(spaces, "space", |s| s.parse::<WeightFamily>())?;
    let links = subordination::product_chain_check(&sym, &families, n, &ctx)?;
    let mut t = Table::new(&[
        "dominating",
        "dominated",
        "certified_len",
        "full_holds",
        "hyperplane_holds",
        "half_index_bound",
        "min_margin",
    ]);
    header(&mut t, "compare", common);
    t.meta("symbol", symbol).meta("spaces", spaces).meta("n", n);
    for l in &links {
        t.push(vec![
            json!(l.dominating.to_string()),
            json!(l.dominated.to_string()),
            json!(l.certified),
            json!(l.full.holds),
            json!(l.hyperplane.holds),
            json!(l.half_index_bound),
            json!(sci(l.full.min_margin().min(l.hyperplane.min_margin()))),
        ]);
    }
    let holds = links.iter().all(|l| l.holds());
    t.meta("chain_holds", holds);
    t.emit(common.format, common.out.as_deref())?;
    if holds {
        eprintln!("chain holds on certified prefix");
        Ok(())
    } else {
        Err(CliError::Verification("chain fails on certified prefix".into()))
    }
}

fn parse_models(models: &str) -> CliResult<Vec<DecayModel>> {
    if models.trim() == "all" {
        return Ok(DecayModel::ALL.to_vec());
    }
    parse_list(models, "model", |s| s.parse::<DecayModel>())
}

fn parse_range(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("fit range must be lo:hi, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn decay(symbol: &str, space: &str, n: usize, models: &str, fit_range: Option<&str>, common: &Common) -> CliResult<()> {
    check_order(n)?;
    let ctx = context(common)?;
    let sym: Symbol = symbol.parse()?;
    let family: WeightFamily = space.parse()?;
    let models = parse_models(models)?;
    let s = operators::approx_numbers(&operators::build_matrix(&sym, &family, n, &ctx)?, &ctx)?;
    let certified = s.certified_len(CERTIFIED_FACTOR);
    let range = match fit_range {
        Some(r) => parse_range(r)?,
        None => (8, certified),
    };
    if range.1 > certified {
        return Err(CliError::Verification(format!(
            "fit range ends at {} but only {certified} values are certified",
            range.1
        )));
    }
    let seq = DecaySequence::from_spectrum(&s, range.1)?;
    let mut fits = models
        .iter()
        .map(|m| geometry::fit_decay(&seq, *m, range))
        .collect::<specdecay::Result<Vec<_>>>()?;
    fits.sort_by(|a, b| a.rms_residual.total_cmp(&b.rms_residual));
    let mut t = Table::new(&["rank", "model", "rate", "offset", "rms_residual", "n_min", "n_max", "certified"]);
    header(&mut t, "decay", common);
    t.meta("symbol", symbol).meta("space", space).meta("n", n).meta("certified_len", certified);
    for (i, f) in fits.iter().enumerate() {
        t.push(vec![
            json!(i + 1),
            json!(f.model.name()),
            json!(sci(f.rate)),
            json!(sci(f.offset)),
            json!(sci(f.rms_residual)),
            json!(f.range.0),
            json!(f.range.1),
            json!(HEURISTIC),
        ]);
    }
    t.emit(common.format, common.out.as_deref())
}

fn carleson(symbol: &str, h_grid: &str, xi_count: usize, k: u32, common: &Common) -> CliResult<()> {
    let sym: Symbol = symbol.parse()?;
    let hs = parse_list(h_grid, "window size", |s| s.parse::<f64>())?;
    let sampler = Sampler::for_symbol(&sym).with_k(k);
    let coarse = PullbackSample::new(&sym, &sampler)?;
    let fine = PullbackSample::new(&sym, &sampler.refined())?;
    let mut t = Table::new(&["h", "rho2", "refinement_delta", "rho2_over_h2", "certified"]);
    header(&mut t, "carleson", common);
    t.meta("symbol", symbol).meta("xi_count", xi_count).meta("k", k);
    for h in hs {
        let r = geometry::rho2_from_samples(&coarse, &fine, h, xi_count)?;
        t.push(vec![
            json!(h),
            json!(sci(r.value)),
            json!(sci(r.refinement_delta)),
            json!(sci(r.value / (h * h))),
            json!(HEURISTIC),
        ]);
    }
    t.emit(common.format, common.out.as_deref())
}

fn schatten(symbol: &str, gamma: f64, p: f64, depth: u32, k: u32, common: &Common) -> CliResult<()> {
    let sym: Symbol = symbol.parse()?;
    let sampler = Sampler::for_symbol(&sym).with_k(k);
    let levels = geometry::luecking_sum(&sym, gamma, p, depth, &sampler)?;
    let mut t = Table::new(&["level", "level_sum", "cumulative", "certified"]);
    header(&mut t, "schatten", common);
    t.meta("symbol", symbol).meta("gamma", gamma).meta("p", p).meta("depth", depth).meta("k", k);
    let mut acc = 0.0;
    for (i, l) in levels.iter().enumerate() {
        acc += l;
        t.push(vec![json!(i + 1), json!(sci(*l)), json!(sci(acc)), json!(HEURISTIC)]);
    }
    t.emit(common.format, common.out.as_deref())
}

/// `hardy`, `bergman` (parameter `alpha`) or `dirichlet` (the normalisation
/// with closed-form kernels).
fn kernel_family(space: &str, alpha: f64) -> CliResult<WeightFamily> {
    let base = space.split(':').next().unwrap_or(space).trim();
    Ok(match base {
        "hardy" => WeightFamily::Hardy,
        "bergman" => WeightFamily::bergman(alpha)?,
        "dirichlet" | "dirichlet-tilde" => {
            let f = WeightFamily::DirichletTilde(alpha);
            f.validate()?;
            f
        }
        other => return Err(CliError::Usage(format!("no closed-form kernel for space {other:?}"))),
    })
}

/// Seeded points with `|a|, |z| <= 0.9`.
pub(crate) fn random_pairs(count: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
    let mut g = GaussianStream::new(seed);
    let mut point = || Complex64::from_polar(0.9 * g.uniform().sqrt(), 2.0 * std::f64::consts::PI * g.uniform());
    (0..count).map(|_| (point(), point())).collect()
}

fn kernels(space: &str, alpha: f64, points: Option<&str>, count: usize, common: &Common) -> CliResult<()> {
    let ctx = context(common)?;
    let family = kernel_family(space, alpha)?;
    let pairs = match points {
        Some(p) => parse_list(p, "point pair", |s| {
            let (a, z) = s.split_once(':').ok_or_else(|| "expected a:z".to_string())?;
            Ok::<_, String>((parse_complex(a).map_err(|e| e.to_string())?, parse_complex(z).map_err(|e| e.to_string())?))
        })?,
        None => random_pairs(count, common.seed),
    };
    let tol = ctx.eps_frac(1, 1) * 1e3;
    let digits = decimal_digits(common.bits);
    let mut t = Table::new(&["a", "z", "closed_re", "closed_im", "rel_err", "certified"]);
    header(&mut t, "kernels", common);
    t.meta("space", family.to_string()).meta("alpha", alpha);
    for (a, z) in pairs {
        let (am, zm) = (ctx.complex(a.re, a.im), ctx.complex(z.re, z.im));
        let closed = spaces::family_kernel_closed_form(&am, &zm, &family, &ctx)?;
        let series = spaces::kernel_series(&am, &zm, &family, tol, &ctx)?;
        let rel = relative_gap(&closed, &series.value);
        t.push(vec![
            json!(format!("{a}")),
            json!(format!("{z}")),
            json!(fmt_float(closed.real(), digits)),
            json!(fmt_float(closed.imag(), digits)),
            json!(sci(rel)),
            json!(tag(rel < 10.0 * tol.max(series.tail_bound))),
        ]);
    }
    t.emit(common.format, common.out.as_deref())
}

pub(crate) fn relative_gap(a: &Complex, b: &Complex) -> f64 {
    let prec = a.prec().0.max(b.prec().0);
    let d = Complex::with_val(prec, a - b);
    let num = Float::with_val(prec, d.abs_ref());
    let den = Float::with_val(prec, a.abs_ref());
    if den.is_zero() {
        return num.to_f64();
    }
    (num / den).to_f64()
}

fn taylor(symbol: &str, n: usize, common: &Common) -> CliResult<()> {
    let ctx = context(common)?;
    let sym: Symbol = symbol.parse()?;
    let series = sym.taylor(n, &ctx)?;
    let digits = decimal_digits(common.bits);
    let mut t = Table::new(&["k", "re", "im", "err_bound", "certified"]);
    header(&mut t, "taylor", common);
    t.meta("symbol", symbol).meta("n", n);
    let err = series.coeff_error();
    for k in 0..=n {
        let im = series.im(k).map(|x| fmt_float(x, digits)).unwrap_or_else(|| "0".into());
        t.push(vec![
            json!(k),
            json!(fmt_float(series.re(k), digits)),
            json!(im),
            json!(sci(err)),
            json!(CERTIFIED),
        ]);
    }
    t.emit(common.format, common.out.as_deref())
}

fn two_routes(symbol: &str, alpha: f64, n: usize, count: usize, common: &Common) -> CliResult<()> {
    check_order(n)?;
    let ctx = context(common)?;
    let sym: Symbol = symbol.parse()?;
    let r = operators::dirichlet_spectrum_two_routes(&sym, alpha, n, &ctx)?;
    let dev = operators::route_deviation(&r.dirichlet, &r.bergman, count);
    let digits = decimal_digits(common.bits);
    let mut t = Table::new(&["n", "direct", "weighted", "deviation", "bound", "agree"]);
    header(&mut t, "two-routes", common);
    t.meta("symbol", symbol).meta("alpha", alpha).meta("n", n);
    let mut all = true;
    for (k, (d, b)) in dev.iter().enumerate() {
        let ok = d <= b;
        all &= ok;
        t.push(vec![
            json!(k + 1),
            json!(fmt_float(&r.dirichlet.values[k], digits)),
            json!(fmt_float(&r.bergman.values[k], digits)),
            json!(sci(*d)),
            json!(sci(*b)),
            json!(ok),
        ]);
    }
    t.meta("agree", all);
    t.emit(common.format, common.out.as_deref())?;
    if all {
        Ok(())
    } else {
        Err(CliError::Verification("routes disagree beyond their certificates".into()))
    }
}
