//! Exact identities the numerical pipeline must reproduce.

use rug::ops::Pow;
use rug::{Complex, Float};
use specdecay::operators::{self, build_matrix, PowerTable};
use specdecay::series::series_compose;
use specdecay::spaces::WeightFamily;
use specdecay::subordination;
use specdecay::{PrecisionContext, Symbol};

fn ctx() -> PrecisionContext {
    PrecisionContext::new(256, 0).unwrap()
}

fn gap(a: &Complex, b: &Complex) -> f64 {
    Float::with_val(256, Complex::with_val(256, a - b).abs_ref()).to_f64()
}

#[test]
fn lens_maps_form_a_semigroup_in_coefficients() {
    // lambda_a o lambda_b = lambda_ab.
    let ctx = ctx();
    let n = 64;
    let half = "lens:0.5".parse::<Symbol>().unwrap().taylor(n, &ctx).unwrap();
    let quarter = "lens:0.25".parse::<Symbol>().unwrap().taylor(n, &ctx).unwrap();
    let composed = series_compose(&half, &half, n).unwrap();
    for k in 0..=n {
        assert!(gap(&composed.coeff(k), &quarter.coeff(k)) < 1e-60, "k = {k}");
    }
}

#[test]
fn sections_of_composed_symbols_multiply() {
    // C_{phi o psi} = C_psi C_phi, and lower-triangular sections multiply exactly.
    let ctx = ctx();
    for space in ["hardy", "bergman:1", "dirichlet:0.5"] {
        let fam: WeightFamily = space.parse().unwrap();
        let half = build_matrix(&"lens:0.5".parse().unwrap(), &fam, 32, &ctx).unwrap();
        let quarter = build_matrix(&"lens:0.25".parse().unwrap(), &fam, 32, &ctx).unwrap();
        let product = half.matrix.mul(&half.matrix).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=32 {
            for j in 0..=32 {
                worst = worst.max(gap(&product.get(i, j), &quarter.matrix.get(i, j)));
            }
        }
        assert!(worst < 1e-50, "{space}: {worst:e}");
    }
}

#[test]
fn scale_spectrum_is_exact_in_every_family() {
    let ctx = ctx();
    let r = Float::with_val(256, Float::parse("0.75").unwrap());
    for space in ["hardy", "bergman:0", "dirichlet:0", "dirichlet:2"] {
        let op = build_matrix(&"scale:0.75".parse().unwrap(), &space.parse().unwrap(), 24, &ctx).unwrap();
        let s = operators::approx_numbers(&op, &ctx).unwrap();
        for (k, v) in s.values.iter().enumerate() {
            let want = Float::with_val(256, r.clone().pow(k as u32));
            let rel = (Float::with_val(256, v - &want) / &want).abs().to_f64();
            assert!(rel < 1e-60, "{space} k = {k}: {rel:e}");
        }
    }
}

#[test]
fn hardy_spectrum_of_the_identity_is_flat() {
    let ctx = ctx();
    let op = build_matrix(&"monomial:1".parse().unwrap(), &WeightFamily::Hardy, 16, &ctx).unwrap();
    let s = operators::approx_numbers(&op, &ctx).unwrap();
    for v in &s.values {
        assert!((v.to_f64() - 1.0).abs() < 1e-60);
    }
}

#[test]
fn dirichlet_routes_agree_for_the_cusp() {
    let ctx = PrecisionContext::new(192, 0).unwrap();
    let r = operators::dirichlet_spectrum_two_routes(&"cusp".parse().unwrap(), 1.0, 40, &ctx).unwrap();
    for (d, bound) in operators::route_deviation(&r.dirichlet, &r.bergman, 20) {
        assert!(d <= bound, "{d:e} > {bound:e}");
    }
}

#[test]
fn hyperplane_spectrum_drops_the_constant() {
    let ctx = PrecisionContext::new(192, 0).unwrap();
    let table = PowerTable::new(&"lens:0.5".parse().unwrap(), 32, &ctx).unwrap();
    let fam = WeightFamily::Hardy;
    let full = operators::approx_numbers(&table.operator(&fam, 32, &ctx).unwrap(), &ctx).unwrap();
    let direct = operators::approx_numbers(&table.operator(&fam, 32, &ctx).unwrap().without_constants().unwrap(), &ctx).unwrap();
    let derived = subordination::hyperplane_spectrum(&full).unwrap();
    assert_eq!(derived.len(), direct.len());
    for k in 0..direct.len() {
        let d = Float::with_val(192, &derived.values[k] - &direct.values[k]).abs().to_f64();
        assert!(d <= derived.error_bounds[k] + direct.error_bounds[k] + 1e-40, "k = {k}");
    }
}

#[test]
fn hardy_and_bergman_chain_holds_for_the_lens() {
    let ctx = PrecisionContext::new(192, 0).unwrap();
    let fams: Vec<WeightFamily> = ["dirichlet:0", "hardy", "bergman:0"].iter().map(|s| s.parse().unwrap()).collect();
    let links = subordination::product_chain_check(&"lens:0.5".parse().unwrap(), &fams, 40, &ctx).unwrap();
    assert_eq!(links.len(), 2);
    for l in &links {
        assert!(l.holds(), "{} > {}", l.dominating, l.dominated);
        assert!(l.certified >= 20);
    }
}
