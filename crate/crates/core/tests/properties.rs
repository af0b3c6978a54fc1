use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rug::{Complex, Float};
use specdecay::geometry::{self, CarlesonWindow, DecayModel};
use specdecay::numerics::{
    compound_matrix, det_gram, random_lower_triangular, random_matrix, random_orthonormal_system, random_unitary, svd,
    svd_singular_values, top_product, ComplexMatrix,
};
use specdecay::spaces::{self, WeightFamily};
use specdecay::subordination::{self, DecaySequence};
use specdecay::{PrecisionContext, Symbol};

const BITS: u32 = 128;

fn ctx(seed: u64) -> PrecisionContext {
    PrecisionContext::new(BITS, seed).unwrap()
}

fn rel(a: &Float, b: &Float) -> f64 {
    (Float::with_val(BITS + 32, a - b) / b).abs().to_f64()
}

fn point(r: f64, t: f64) -> Complex64 {
    Complex64::from_polar(r, t)
}

fn mp(z: Complex64) -> Complex {
    Complex::with_val(BITS, (z.re, z.im))
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn compound_top_value_is_product_of_singular_values(seed in 0u64..10_000, d in 2usize..=6, n in 1usize..=3) {
        prop_assume!(n <= d);
        let c = ctx(seed);
        let m = random_matrix(d, d, &c);
        let s = svd_singular_values(&m, &c).unwrap();
        let top = svd_singular_values(&compound_matrix(&m, n).unwrap(), &c).unwrap();
        let p = top_product(&s.values, n);
        prop_assert!(rel(&top.values[0], &p) < c.eps_frac(1, 4));
    }

    #[test]
    fn det_gram_never_exceeds_product(seed in 0u64..10_000, n in 1usize..=3) {
        let c = ctx(seed);
        let m = random_matrix(5, 5, &c);
        let s = svd_singular_values(&m, &c).unwrap();
        let bound = top_product(&s.values, n) * (1.0 + c.eps_frac(1, 4));
        let f = random_orthonormal_system(5, n, &c.with_seed(seed + 1)).unwrap();
        let g = random_orthonormal_system(5, n, &c.with_seed(seed + 2)).unwrap();
        let det = det_gram(&m, &f, &g, &c).unwrap();
        prop_assert!(Float::with_val(BITS, det.abs_ref()) <= bound);
    }

    #[test]
    fn singular_vectors_attain_the_product(seed in 0u64..10_000, n in 1usize..=3) {
        let c = ctx(seed);
        let m = random_matrix(5, 4, &c);
        let dec = svd(&m, &c).unwrap();
        let f: Vec<_> = (0..n).map(|j| dec.v.column(j)).collect();
        let g: Vec<_> = (0..n).map(|j| dec.u.column(j)).collect();
        let det = Float::with_val(BITS, det_gram(&m, &f, &g, &c).unwrap().abs_ref());
        prop_assert!(rel(&det, &top_product(&dec.spectrum.values, n)) < c.eps_frac(1, 4));
    }

    #[test]
    fn svd_is_unitarily_invariant(seed in 0u64..10_000) {
        let c = ctx(seed);
        let m = random_matrix(5, 5, &c);
        let u = random_unitary(5, &c.with_seed(seed + 1)).unwrap();
        let v = random_unitary(5, &c.with_seed(seed + 2)).unwrap();
        let a = svd_singular_values(&m, &c).unwrap();
        let b = svd_singular_values(&u.mul(&m).unwrap().mul(&v).unwrap(), &c).unwrap();
        // Forming U M V rounds each entry: allow that perturbation on top.
        let formed = 16.0 * c.eps() * a.values[0].to_f64();
        for k in 0..5 {
            let gap = Float::with_val(BITS, &a.values[k] - &b.values[k]).abs().to_f64();
            prop_assert!(gap <= a.error_bounds[k] + b.error_bounds[k] + formed);
        }
    }

    #[test]
    fn kacnelson_conjugation_is_log_subordinate(seed in 0u64..10_000, growth in 0.0f64..3.0) {
        let c = ctx(seed);
        let d: Vec<Float> = (0..6).map(|j| Float::with_val(BITS, 1.0 + growth * j as f64)).collect();
        let a = random_lower_triangular(6, &c);
        let r = subordination::kacnelson_check(&a, &d, 6, &c).unwrap();
        let slack = Float::with_val(BITS, Float::i_exp(1, -64)) + 1u32;
        for n in 1..=6 {
            prop_assert!(top_product(&r.conjugated.values, n) <= top_product(&r.original.values, n) * &slack);
        }
        for n in 1..=3 {
            let top = svd_singular_values(&compound_matrix(&r.conjugate, n).unwrap(), &c).unwrap();
            prop_assert!(rel(&top.values[0], &top_product(&r.conjugated.values, n)) < c.eps_frac(1, 4));
        }
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn kernel_closed_form_matches_series(
        ra in 0.0f64..0.9, ta in 0.0f64..6.3, rz in 0.0f64..0.9, tz in 0.0f64..6.3, alpha in 0.0f64..3.0,
    ) {
        let c = ctx(0);
        let (a, z) = (mp(point(ra, ta)), mp(point(rz, tz)));
        let closed = spaces::kernel_closed_form(&a, &z, alpha, &c).unwrap();
        let series = spaces::kernel_series(&a, &z, &WeightFamily::DirichletTilde(alpha), 1e-30, &c).unwrap().value;
        let gap = Float::with_val(BITS, Complex::with_val(BITS, &closed - &series).abs_ref()).to_f64();
        let size = Float::with_val(BITS, closed.abs_ref()).to_f64();
        prop_assert!(gap <= 10.0 * 1e-30 * size);
    }

    #[test]
    fn kernel_is_hermitian(
        ra in 0.0f64..0.95, ta in 0.0f64..6.3, rz in 0.0f64..0.95, tz in 0.0f64..6.3, alpha in 0.0f64..3.0,
    ) {
        let c = ctx(0);
        let (a, z) = (mp(point(ra, ta)), mp(point(rz, tz)));
        let k1 = spaces::kernel_closed_form(&a, &z, alpha, &c).unwrap();
        let k2 = spaces::kernel_closed_form(&z, &a, alpha, &c).unwrap();
        let gap = Float::with_val(BITS, Complex::with_val(BITS, &k1 - Complex::with_val(BITS, k2.conj_ref())).abs_ref()).to_f64();
        prop_assert!(gap <= 1e-30 * Float::with_val(BITS, k1.abs_ref()).to_f64());
    }

    #[test]
    fn log_subordination_implies_power_subordination(seed in 0u64..10_000, shrink in 0.3f64..1.0) {
        let mut g = specdecay::numerics::GaussianStream::new(seed);
        let mut v: Vec<f64> = (0..16).map(|_| (-5.0 * g.uniform()).exp()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        let mut u: Vec<f64> = v.iter().map(|x| x * (shrink + (1.0 - shrink) * g.uniform())).collect();
        u.sort_by(|a, b| b.total_cmp(a));
        let (u, v) = (DecaySequence::new(&u).unwrap(), DecaySequence::new(&v).unwrap());
        prop_assert!(subordination::is_log_subordinate(&u, &v).unwrap().holds);
        for p in [0.1, 0.5, 1.0, 2.0, 8.0] {
            let up: Vec<f64> = u.values_f64().iter().map(|x| x.powf(p)).collect();
            let vp: Vec<f64> = v.values_f64().iter().map(|x| x.powf(p)).collect();
            let r = subordination::is_subordinate(&DecaySequence::new(&up).unwrap(), &DecaySequence::new(&vp).unwrap()).unwrap();
            prop_assert!(r.holds, "p = {}", p);
        }
    }

    #[test]
    fn carleson_window_sits_between_boxes(theta in -PI..PI, h in 0.005f64..0.15, s in 0.0f64..1.0, t in -1.0f64..1.0) {
        let xi = point(1.0, theta);
        let w = CarlesonWindow::new(xi, h).unwrap();
        let z = point(1.0 - 8.0 * h * s, theta + 8.0 * h * t);
        if geometry::in_carleson_box(xi, h, z) {
            prop_assert!(w.contains(z));
        }
        if w.contains(z) {
            prop_assert!(geometry::in_carleson_box(xi, 2.0 * PI * h, z));
        }
    }

    #[test]
    fn decay_fit_recovers_synthetic_rates(rate in 0.05f64..3.0, offset in -2.0f64..2.0, model in 0usize..3, lo in 2usize..20) {
        let model = DecayModel::ALL[model];
        let vals: Vec<f64> = (1..=lo + 40).map(|n| (offset - rate * model.regressor(n.max(3))).exp()).collect();
        prop_assume!(vals.iter().all(|v| *v > 1e-300));
        let fit = geometry::fit_decay(&DecaySequence::new(&vals).unwrap(), model, (lo.max(3), lo + 40)).unwrap();
        prop_assert!((fit.rate / rate - 1.0).abs() < 0.01);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn automorphism_derivative_matches_finite_difference(re in -0.6f64..0.6, im in -0.6f64..0.6, r in 0.0f64..0.9, t in 0.0f64..6.3) {
        let sym: Symbol = format!("auto:{re}{im:+}i").parse().unwrap();
        let bits = 192u32;
        let h = Float::with_val(bits, Float::i_exp(1, -(bits as i32) / 3));
        let z = Complex::with_val(bits, (r * t.cos(), r * t.sin()));
        let fd = (sym.eval(&Complex::with_val(bits, &z + &h)).unwrap() - sym.eval(&Complex::with_val(bits, &z - &h)).unwrap())
            / Complex::with_val(bits, &h * 2u32);
        let gap = Float::with_val(bits, Complex::with_val(bits, &fd - &sym.derivative(&z).unwrap()).abs_ref()).to_f64();
        prop_assert!(gap < (-(bits as f64) / 3.0).exp2());
    }

    #[test]
    fn kernel_norms_blow_up_at_the_boundary(t in 0.0f64..6.3, family in 0usize..4) {
        let c = PrecisionContext::new(96, 0).unwrap();
        let fam: WeightFamily = ["hardy", "bergman:0", "dirichlet:0.5", "bergman:2"][family].parse().unwrap();
        let norms: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&r| spaces::kernel_norm_sq(&c.complex(r * t.cos(), r * t.sin()), &fam, 1e-10, &c).unwrap().value.real().to_f64())
            .collect();
        prop_assert!(norms[0] < norms[1] && norms[1] < norms[2]);
    }
}

#[test]
fn diagonal_matrices_keep_their_entries() {
    let c = ctx(0);
    let m = ComplexMatrix::diagonal(&[0.25, 1.0, 1e-30, 0.5], BITS);
    let s = svd_singular_values(&m, &c).unwrap();
    let want = [1.0, 0.5, 0.25, 1e-30];
    for (v, w) in s.values.iter().zip(want) {
        assert!(rel(v, &Float::with_val(BITS, w)) < 1e-35);
    }
}
