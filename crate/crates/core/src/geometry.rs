//! Pull-back measures and the related diagnostics: Carleson windows,
//! Hastings–Luecking boxes, Nevanlinna counting for univalent maps,
//! separation of point sequences, the interpolation lower bound, and
//! least-squares decay models for spectra.
//!
//! Measures are estimated on deterministic grids. Area is normalised so
//! that the disk has measure 1. Near the boundary points where a symbol
//! touches the circle, the uniform polar grid is replaced by a log-polar
//! grid around the point, evaluated at extended precision, so that
//! exponentially small preimages are resolved.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::subordination::DecaySequence;
use crate::symbols::Symbol;

/// `W(xi, h) = { |z| >= 1 - h, -pi h <= arg(conj(xi) z) < pi h }`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarlesonWindow {
    pub xi: Complex64,
    pub h: f64,
}

impl CarlesonWindow {
    pub fn new(xi: Complex64, h: f64) -> Result<Self> {
        if ((xi.norm() - 1.0).abs()) > 1e-12 {
            return Err(Error::Parameter(format!("window centre must be unimodular, |xi| = {}", xi.norm())));
        }
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::Parameter(format!("window size must lie in (0, 1), got {h}")));
        }
        Ok(Self { xi, h })
    }

    pub fn at_angle(theta: f64, h: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(1.0, theta), h)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        if z.norm() >= 1.0 || z.norm() < 1.0 - self.h {
            return false;
        }
        let arg = (self.xi.conj() * z).arg();
        -PI * self.h <= arg && arg < PI * self.h
    }

    /// Normalised area `h (1 - (1 - h)^2)`.
    pub fn area(&self) -> f64 {
        self.h * (1.0 - (1.0 - self.h).powi(2))
    }
}

/// `S(xi, h) = { z in D : |xi - z| < h }`.
pub fn in_carleson_box(xi: Complex64, h: f64, z: Complex64) -> bool {
    z.norm() < 1.0 && (xi - z).norm() < h
}

/// Grid specification for pull-back sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampler {
    /// Uniform polar grid of `2^k` radii by `2^k` angles.
    pub k: u32,
    /// Boundary points with a log-polar grid around them.
    pub focus: Vec<Complex64>,
    /// Radius of the focused neighbourhoods.
    pub focus_radius: f64,
    /// The focused grid reaches down to `focus_radius * e^-depth`.
    pub focus_depth: f64,
    /// Focused grid of `2^(focus_k + 2)` radii by `2^focus_k` angles.
    pub focus_k: u32,
    /// Precision for evaluation on the focused grid.
    pub bits: u32,
}

impl Sampler {
    pub fn uniform(k: u32) -> Self {
        Self {
            k,
            focus: Vec::new(),
            focus_radius: 0.25,
            focus_depth: 160.0,
            focus_k: 7,
            bits: 320,
        }
    }

    /// Default grid (`k = 10`) focused at the symbol's contact points.
    pub fn for_symbol(symbol: &Symbol) -> Self {
        Self::uniform(10).focused(symbol.contact_points())
    }

    pub fn focused(mut self, points: Vec<Complex64>) -> Self {
        self.focus = points;
        self
    }

    pub fn with_k(mut self, k: u32) -> Self {
        self.k = k;
        self
    }

    /// The next finer grid (one more level in every direction).
    pub fn refined(&self) -> Self {
        Self {
            k: self.k + 1,
            focus_k: self.focus_k + 1,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(2..=14).contains(&self.k) || !(2..=12).contains(&self.focus_k) {
            return Err(Error::Parameter(format!(
                "degenerate sampler: k = {}, focus_k = {}",
                self.k, self.focus_k
            )));
        }
        if !(self.focus_radius > 0.0 && self.focus_radius < 1.0 && self.focus_depth > 0.0) {
            return Err(Error::Parameter("focus radius must lie in (0, 1) and depth be positive".into()));
        }
        Ok(())
    }
}

/// One grid cell: the image of its centre, its normalised area and
/// `1 - |z|^2` at the centre.
#[derive(Clone, Copy, Debug)]
struct Cell {
    image: Complex64,
    area: f64,
    depth: f64,
}

/// Images of all grid cells of one sampler.
#[derive(Clone, Debug)]
pub struct PullbackSample {
    cells: Vec<Cell>,
    /// Area of cells whose image could not be evaluated.
    pub lost_area: f64,
}

impl PullbackSample {
    pub fn new(symbol: &Symbol, sampler: &Sampler) -> Result<Self> {
        sampler.validate()?;
        let n = 1usize << sampler.k;
        let rho = sampler.focus_radius;
        let rows: Vec<(Vec<Cell>, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (r0, r1) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
                let r = 0.5 * (r0 + r1);
                let area = (r1 * r1 - r0 * r0) / n as f64;
                let mut cells = Vec::with_capacity(n);
                let mut lost = 0.0;
                for j in 0..n {
                    let z = Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / n as f64);
                    if sampler.focus.iter().any(|f| (z - f).norm() < rho) {
                        continue;
                    }
                    match symbol.eval(&z) {
                        Ok(w) => cells.push(Cell { image: w, area, depth: 1.0 - r * r }),
                        Err(_) => lost += area,
                    }
                }
                (cells, lost)
            })
            .collect();
        let mut cells = Vec::new();
        let mut lost_area = 0.0;
        for (c, l) in rows {
            cells.extend(c);
            lost_area += l;
        }
        for f in &sampler.focus {
            let (c, l) = focused_cells(symbol, *f, sampler);
            cells.extend(c);
            lost_area += l;
        }
        Ok(Self { cells, lost_area })
    }

    /// `A_phi(W)`.
    pub fn window_mass(&self, w: &CarlesonWindow) -> f64 {
        self.cells.iter().filter(|c| w.contains(c.image)).map(|c| c.area).sum()
    }

    /// `A_{gamma, phi}` of every Hastings–Luecking box up to `levels`,
    /// indexed `[n - 1][j]`; `gamma > -1`.
    pub fn box_masses(&self, gamma: f64, levels: u32) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = (1..=levels).map(|n| vec![0.0; 1 << n]).collect();
        for c in &self.cells {
            if let Some((n, j)) = hastings_luecking_index(c.image, levels) {
                out[n as usize - 1][j] += c.area * (gamma + 1.0) * c.depth.powf(gamma);
            }
        }
        out
    }
}

/// The box `R_{n,j}` containing `w`, if `n <= levels`.
pub fn hastings_luecking_index(w: Complex64, levels: u32) -> Option<(u32, usize)> {
    let d = 1.0 - w.norm();
    if !(d > 0.0) || d > 1.0 {
        return None;
    }
    // 2^-n < d <= 2^-(n-1)
    let n = (-d.log2()).floor() as i64 + 1;
    if n < 1 || n > levels as i64 {
        return None;
    }
    let n = n as u32;
    let theta = w.arg().rem_euclid(2.0 * PI);
    let j = ((theta / (2.0 * PI)) * (1u64 << n) as f64).floor() as usize;
    Some((n, j.min((1usize << n) - 1)))
}

/// Log-polar cells around the boundary point `zeta`:
/// `z = zeta (1 - t e^(i psi))`, `|psi| < pi/2`, area `t dt dpsi / pi`.
fn focused_cells(symbol: &Symbol, zeta: Complex64, s: &Sampler) -> (Vec<Cell>, f64) {
    let n_psi = 1usize << s.focus_k;
    let n_t = 4 * n_psi;
    let rho = s.focus_radius;
    let t_at = |i: usize| rho * (-s.focus_depth * (1.0 - i as f64 / n_t as f64)).exp();
    let bits = s.bits;
    let rows: Vec<(Vec<Cell>, f64)> = (0..n_t)
        .into_par_iter()
        .map(|i| {
            let (t0, t1) = (t_at(i), t_at(i + 1));
            let t = (t0 * t1).sqrt();
            let area = (t1 * t1 - t0 * t0) / (2.0 * n_psi as f64);
            let mut cells = Vec::new();
            let mut lost = 0.0;
            for j in 0..n_psi {
                let psi = -PI / 2.0 + PI * (j as f64 + 0.5) / n_psi as f64;
                if t >= 2.0 * psi.cos() {
                    continue;
                }
                let step = Complex::with_val(bits, (t * psi.cos(), t * psi.sin()));
                let z = (Complex::with_val(bits, 1) - step) * Complex::with_val(bits, (zeta.re, zeta.im));
                // 1 - |z|^2 = 2 t cos(psi) - t^2, exactly in terms of the cell.
                let depth = 2.0 * t * psi.cos() - t * t;
                match symbol.eval(&z) {
                    Ok(w) => cells.push(Cell {
                        image: Complex64::new(w.real().to_f64(), w.imag().to_f64()),
                        area,
                        depth,
                    }),
                    Err(_) => lost += area,
                }
            }
            (cells, lost)
        })
        .collect();
    let mut cells = Vec::new();
    let mut lost = 0.0;
    for (c, l) in rows {
        cells.extend(c);
        lost += l;
    }
    (cells, lost)
}

/// A grid estimate with the change under one refinement of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridEstimate {
    /// Value on the refined grid.
    pub value: f64,
    /// `|value(k+1) - value(k)|`.
    pub refinement_delta: f64,
}

/// `A_phi(W) = A(phi^-1(W))`.
pub fn pullback_area(symbol: &Symbol, window: &CarlesonWindow, sampler: &Sampler) -> Result<GridEstimate> {
    let coarse = PullbackSample::new(symbol, sampler)?.window_mass(window);
    let fine = PullbackSample::new(symbol, &sampler.refined())?.window_mass(window);
    Ok(GridEstimate {
        value: fine,
        refinement_delta: (fine - coarse).abs(),
    })
}

/// `rho_{phi,2}(h) = sup_xi A_phi(W(xi, h))` over `xi_count` equally spaced
/// centres (starting at 1).
pub fn rho2(symbol: &Symbol, h: f64, xi_count: usize, sampler: &Sampler) -> Result<GridEstimate> {
    let coarse = PullbackSample::new(symbol, sampler)?;
    let fine = PullbackSample::new(symbol, &sampler.refined())?;
    rho2_from_samples(&coarse, &fine, h, xi_count)
}

/// [`rho2`] from precomputed samples at two grid levels.
pub fn rho2_from_samples(coarse: &PullbackSample, fine: &PullbackSample, h: f64, xi_count: usize) -> Result<GridEstimate> {
    if xi_count == 0 {
        return Err(Error::Parameter("need at least one window centre".into()));
    }
    let mut best = (0.0f64, 0.0f64);
    for m in 0..xi_count {
        let w = CarlesonWindow::at_angle(2.0 * PI * m as f64 / xi_count as f64, h)?;
        let (c, f) = (coarse.window_mass(&w), fine.window_mass(&w));
        if f > best.1 {
            best = (c, f);
        }
    }
    Ok(GridEstimate {
        value: best.1,
        refinement_delta: (best.1 - best.0).abs(),
    })
}

/// Per-level Luecking sums `sum_j (2^(n(gamma+2)) A_{gamma,phi}(R_{n,j}))^(p/2)`
/// for `n = 1..=depth`. For `gamma = -1` the boundary measure is replaced by
/// the push-forward of arc length on the circle `|z| = 1 - 2^-(depth+2)`.
pub fn luecking_sum(symbol: &Symbol, gamma: f64, p: f64, depth: u32, sampler: &Sampler) -> Result<Vec<f64>> {
    if !(gamma >= -1.0) || !(p > 0.0) || depth == 0 || depth > 24 {
        return Err(Error::Parameter(format!("need gamma >= -1, p > 0, 1 <= depth <= 24 (got {gamma}, {p}, {depth})")));
    }
    let masses = if gamma == -1.0 {
        boundary_box_masses(symbol, depth, sampler)?
    } else {
        PullbackSample::new(symbol, sampler)?.box_masses(gamma, depth)
    };
    Ok(masses
        .iter()
        .enumerate()
        .map(|(i, level)| {
            let n = (i + 1) as f64;
            let scale = (n * (gamma + 2.0)).exp2();
            level.iter().map(|m| (scale * m).powf(p / 2.0)).sum()
        })
        .collect())
}

fn boundary_box_masses(symbol: &Symbol, depth: u32, sampler: &Sampler) -> Result<Vec<Vec<f64>>> {
    sampler.validate()?;
    let r = 1.0 - (-(depth as f64) - 2.0).exp2();
    let count = 1usize << (2 * sampler.k).min(22);
    let images: Vec<Option<Complex64>> = (0..count)
        .into_par_iter()
        .map(|j| symbol.eval(&Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / count as f64)).ok())
        .collect();
    let mut out: Vec<Vec<f64>> = (1..=depth).map(|n| vec![0.0; 1 << n]).collect();
    for w in images.into_iter().flatten() {
        if let Some((n, j)) = hastings_luecking_index(w, depth) {
            out[n as usize - 1][j] += 1.0 / count as f64;
        }
    }
    Ok(out)
}

/// Outcome of [`nevanlinna_univalent`].
#[derive(Clone, Debug)]
pub struct NevanlinnaValue {
    /// `(1 - |z*|^2)^alpha`, or 0 when no preimage was found.
    pub value: f64,
    pub preimage: Option<Complex>,
    pub residual: f64,
    pub iterations: usize,
}

const NEWTON_STARTS: usize = 32;
const NEWTON_MAX_ITER: usize = 200;

/// `N_{phi,alpha}(w) = (1 - |phi^-1(w)|^2)^alpha` for a univalent symbol,
/// the preimage found by damped Newton iteration from the 32 grid points
/// whose images lie closest to `w`.
pub fn nevanlinna_univalent(symbol: &Symbol, w: &Complex, alpha: f64, ctx: &PrecisionContext) -> Result<NevanlinnaValue> {
    if !symbol.univalent() {
        return Err(Error::Parameter(format!("{symbol} is not marked univalent")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let bits = ctx.bits();
    let target = Complex::with_val(bits, w);
    let tol = ctx.eps_frac(1, 2);
    let starts = newton_starts(symbol, &Complex64::new(target.real().to_f64(), target.imag().to_f64()), bits);
    let mut best: Option<(Complex, f64, usize)> = None;
    for z0 in starts {
        if let Some((z, res, it)) = damped_newton(symbol, &target, z0, tol, bits) {
            let better = best.as_ref().is_none_or(|b| res < b.1);
            if better {
                best = Some((z, res, it));
            }
            if res < tol {
                break;
            }
        }
    }
    match best {
        Some((z, res, it)) if res < tol => {
            let one_minus = Float::with_val(bits, 1) - Float::with_val(bits, z.norm_ref());
            let value = (Float::with_val(bits, one_minus.ln_ref()) * alpha).exp().to_f64();
            Ok(NevanlinnaValue {
                value,
                preimage: Some(z),
                residual: res,
                iterations: it,
            })
        }
        other => Ok(NevanlinnaValue {
            value: 0.0,
            preimage: None,
            residual: other.map(|b| b.1).unwrap_or(f64::INFINITY),
            iterations: 0,
        }),
    }
}

/// Coarse grid points (uniform plus focused) ranked by `|phi(z) - w|`.
fn newton_starts(symbol: &Symbol, w: &Complex64, bits: u32) -> Vec<Complex> {
    let mut cand: Vec<(f64, Complex)> = Vec::new();
    for i in 0..24 {
        let r = (i as f64 + 0.5) / 24.0;
        for j in 0..48 {
            let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / 48.0);
            if let Ok(v) = symbol.eval(&z) {
                cand.push(((v - w).norm(), Complex::with_val(bits, (z.re, z.im))));
            }
        }
    }
    let sampler = Sampler::uniform(4);
    for f in symbol.contact_points() {
        for i in 0..96 {
            let t = sampler.focus_radius * (-sampler.focus_depth * (1.0 - i as f64 / 96.0)).exp();
            for j in 0..9 {
                let psi = -PI / 2.0 + PI * (j as f64 + 0.5) / 9.0;
                let step = Complex::with_val(bits, (t * psi.cos(), t * psi.sin()));
                let z = (Complex::with_val(bits, 1) - step) * Complex::with_val(bits, (f.re, f.im));
                if let Ok(v) = symbol.eval(&z) {
                    let d = Complex64::new(v.real().to_f64(), v.imag().to_f64()) - w;
                    cand.push((d.norm(), z));
                }
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0));
    cand.into_iter().take(NEWTON_STARTS).map(|c| c.1).collect()
}

fn damped_newton(symbol: &Symbol, w: &Complex, mut z: Complex, tol: f64, bits: u32) -> Option<(Complex, f64, usize)> {
    let residual = |z: &Complex| -> Option<(Complex, f64)> {
        let f = Complex::with_val(bits, symbol.eval(z).ok()? - w);
        let r = Float::with_val(64, f.abs_ref()).to_f64();
        Some((f, r))
    };
    let (mut f, mut res) = residual(&z)?;
    for it in 0..NEWTON_MAX_ITER {
        if res < tol {
            return Some((z, res, it));
        }
        let d = symbol.derivative(&z).ok()?;
        let step = Complex::with_val(bits, &f / &d);
        let mut lambda = Float::with_val(bits, 1);
        let mut accepted = false;
        for _ in 0..60 {
            let trial = Complex::with_val(bits, &z - Complex::with_val(bits, &step * &lambda));
            let inside = Float::with_val(bits, trial.norm_ref()) < 1;
            if inside {
                if let Some((ft, rt)) = residual(&trial) {
                    if rt < res {
                        z = trial;
                        f = ft;
                        res = rt;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda /= 2u32;
        }
        if !accepted {
            return Some((z, res, it));
        }
    }
    Some((z, res, NEWTON_MAX_ITER))
}

/// `delta_v = inf_j prod_{k != j} |(v_j - v_k) / (1 - conj(v_k) v_j)|`.
pub fn carleson_separation(points: &[Complex]) -> Result<f64> {
    Ok(ln_separation(points)?.exp())
}

/// `ln delta_v`, usable far below the double range.
pub fn ln_separation(points: &[Complex]) -> Result<f64> {
    let prec = points.iter().map(|p| p.prec().0).max().unwrap_or(64).max(128);
    let mut worst = 0.0f64;
    for (j, vj) in points.iter().enumerate() {
        let mut acc = 0.0f64;
        for (k, vk) in points.iter().enumerate() {
            if j == k {
                continue;
            }
            let num = Complex::with_val(prec, vj - vk);
            let den = Complex::with_val(prec, 1) - Complex::with_val(prec, vk.conj_ref()) * vj;
            let ratio = Float::with_val(prec, num.abs_ref()) / Float::with_val(prec, den.abs_ref());
            if ratio.is_zero() {
                return Err(Error::Parameter(format!("points {j} and {k} coincide")));
            }
            acc += Float::with_val(prec, ratio.ln_ref()).to_f64();
        }
        worst = worst.min(acc);
    }
    Ok(worst)
}

/// Factor `w` in the lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowerBoundWeight {
    One,
    Derivative,
}

/// Outcome of [`lower_bound_estimate`]; logarithms throughout.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerBoundEstimate {
    /// `ln inf_j |w(u_j)| ||K_{v_j}|| / ||K_{u_j}||`.
    pub ln_infimum: f64,
    pub ln_separation: f64,
    /// `ln_infimum + 4 ln_separation`: a trend proxy, not a certified bound.
    pub ln_value: f64,
}

/// `ln ||K_a||` on `Bergman(alpha)`: `||K_a||^2 = (1 - |a|^2)^-(alpha+2)`.
pub fn ln_bergman_kernel_norm(a: &Complex, alpha: f64) -> f64 {
    let prec = a.prec().0.max(128);
    let one_minus = Float::with_val(prec, 1) - Float::with_val(prec, a.norm_ref());
    -(alpha + 2.0) / 2.0 * Float::with_val(prec, one_minus.ln_ref()).to_f64()
}

/// The interpolation lower bound for `a_n(M_w C_phi)` on `Bergman(alpha)`
/// with the interpolation constant replaced by `delta_v^-2`.
pub fn lower_bound_estimate(
    symbol: &Symbol,
    weight: LowerBoundWeight,
    u_points: &[Complex],
    alpha: f64,
    ctx: &PrecisionContext,
) -> Result<LowerBoundEstimate> {
    if u_points.is_empty() {
        return Err(Error::Parameter("need at least one point".into()));
    }
    let v: Vec<Complex> = u_points.iter().map(|u| symbol.eval(&Complex::with_val(ctx.bits(), u))).collect::<Result<_>>()?;
    let ln_sep = ln_separation(&v)?;
    let mut inf = f64::INFINITY;
    for (u, vj) in u_points.iter().zip(&v) {
        let ln_w = match weight {
            LowerBoundWeight::One => 0.0,
            LowerBoundWeight::Derivative => {
                let d = symbol.derivative(&Complex::with_val(ctx.bits(), u))?;
                Float::with_val(64, Float::with_val(ctx.bits(), d.abs_ref()).ln_ref()).to_f64()
            }
        };
        inf = inf.min(ln_w + ln_bergman_kernel_norm(vj, alpha) - ln_bergman_kernel_norm(u, alpha));
    }
    Ok(LowerBoundEstimate {
        ln_infimum: inf,
        ln_separation: ln_sep,
        ln_value: inf + 4.0 * ln_sep,
    })
}

/// Preimages `u_j = phi^-1(1 - e^(-j eps))`, `j = 1..=n`, of the radial
/// schedule used by the lower bound.
pub fn radial_schedule(symbol: &Symbol, n: usize, eps: f64, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    (1..=n)
        .map(|j| {
            let w = Complex::with_val(ctx.bits(), (1.0 - (-(j as f64) * eps).exp(), 0.0));
            let r = nevanlinna_univalent(symbol, &w, 1.0, ctx)?;
            r.preimage
                .ok_or_else(|| Error::Domain(format!("no preimage of 1 - e^-{} found", j as f64 * eps)))
        })
        .collect()
}

/// Regressor of a decay model: `ln a_n = c - b x(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecayModel {
    NOverLogN,
    SqrtN,
    Geometric,
}

impl DecayModel {
    pub const ALL: [DecayModel; 3] = [DecayModel::NOverLogN, DecayModel::SqrtN, DecayModel::Geometric];

    pub fn regressor(&self, n: usize) -> f64 {
        let x = n as f64;
        match self {
            DecayModel::NOverLogN => x / x.ln(),
            DecayModel::SqrtN => x.sqrt(),
            DecayModel::Geometric => x,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecayModel::NOverLogN => "n_over_log_n",
            DecayModel::SqrtN => "sqrt_n",
            DecayModel::Geometric => "geometric",
        }
    }
}

impl std::fmt::Display for DecayModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DecayModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_over_log_n" | "nlogn" => Ok(DecayModel::NOverLogN),
            "sqrt_n" | "sqrt" => Ok(DecayModel::SqrtN),
            "geometric" | "geom" => Ok(DecayModel::Geometric),
            _ => Err(Error::Parse(format!("unknown decay model {s:?}"))),
        }
    }
}

/// Least-squares fit `ln a_n ≈ offset - rate x(n)` over `n_min..=n_max`
/// (1-based indices).
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub model: DecayModel,
    pub rate: f64,
    pub offset: f64,
    /// RMS residual of `ln a_n`.
    pub rms_residual: f64,
    pub range: (usize, usize),
}

pub fn fit_decay(spectrum: &DecaySequence, model: DecayModel, range: (usize, usize)) -> Result<DecayFit> {
    let (lo, hi) = range;
    if lo < 2 || hi > spectrum.len() || hi < lo {
        return Err(Error::Parameter(format!(
            "fit range [{lo}, {hi}] must satisfy 2 <= n_min <= n_max <= {}",
            spectrum.len()
        )));
    }
    if hi - lo + 1 < 8 {
        return Err(Error::Parameter(format!("fit range [{lo}, {hi}] has fewer than 8 points")));
    }
    let logs = spectrum.logs();
    let pts: Vec<(f64, f64)> = (lo..=hi).map(|n| (model.regressor(n), logs[n - 1].to_f64())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let offset = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - offset - slope * p.0).powi(2)).sum();
    Ok(DecayFit {
        model,
        rate: -slope,
        offset,
        rms_residual: (rss / m).sqrt(),
        range,
    })
}

/// All models fitted on the same range, best (smallest residual) first.
pub fn model_compare(spectrum: &DecaySequence, range: (usize, usize)) -> Result<Vec<DecayFit>> {
    let mut fits: Vec<DecayFit> = DecayModel::ALL
        .iter()
        .map(|m| fit_decay(spectrum, *m, range))
        .collect::<Result<_>>()?;
    fits.sort_by(|a, b| a.rms_residual.total_cmp(&b.rms_residual));
    Ok(fits)
}
