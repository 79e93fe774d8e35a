use std::f64::consts::PI;

use cornermhd::data::random_smooth_scalar;
use cornermhd::discrete_calc::{aniso_norm, sobolev_norm};
use cornermhd::geometry::tangential_frame;
use cornermhd::{make_grid, DomainSpec, Grid, ScalarField};
use proptest::prelude::*;

fn unit(n: usize) -> Grid {
    make_grid(DomainSpec::unit_square(), n, n).unwrap()
}

/// Composite Simpson rule on [0, 1].
fn simpson(f: impl Fn(f64) -> f64) -> f64 {
    let n = 4000;
    let h = 1.0 / n as f64;
    let mut s = f(0.0) + f(1.0);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    s * h / 3.0
}

fn sq(f: impl Fn(f64) -> f64) -> f64 {
    simpson(|x| f(x).powi(2))
}

fn orders(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn product(g: &Grid) -> ScalarField {
    ScalarField::from_fn(g, |x| (PI * x[0]).sin() * (PI * x[1]).sin())
}

#[test]
fn sobolev_norm_of_a_product_mode() {
    let exact = (0.25 + 0.5 * PI * PI).sqrt();
    let e: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| (sobolev_norm(&product(&unit(n)), 1).unwrap() - exact).abs())
        .collect();
    assert!(orders(&e).iter().all(|o| *o >= 1.8), "errors {e:?}");
}

#[test]
fn anisotropic_norm_of_a_product_mode() {
    // separable terms: ||A X||^2 ||B Y||^2 with X = Y = sin(pi x), w = x(1 - x)
    let w = |x: f64| x * (1.0 - x);
    let dw = |x: f64| 1.0 - 2.0 * x;
    let i0 = sq(|x| (PI * x).sin());
    let d1 = sq(|x| PI * (PI * x).cos());
    let t1 = sq(|x| w(x) * PI * (PI * x).cos());
    let t2 = sq(|x| w(x) * (dw(x) * PI * (PI * x).cos() - w(x) * PI * PI * (PI * x).sin()));
    let t = [i0, t1, t2];
    let mut exact = 2.0 * d1 * i0;
    for a3 in 0..=2 {
        for a4 in 0..=(2 - a3) {
            exact += t[a3] * t[a4];
        }
    }
    let exact = exact.sqrt();
    let mut e = Vec::new();
    for n in [64, 128, 256] {
        let g = unit(n);
        let v = aniso_norm(&product(&g), 2, &tangential_frame(&g).unwrap()).unwrap();
        e.push((v - exact).abs());
    }
    assert!(orders(&e).iter().all(|o| *o >= 1.8), "errors {e:?}");
}

#[test]
fn anisotropic_norm_needs_the_square() {
    let g = make_grid(DomainSpec::sector(PI / 3.0, 1.0).unwrap(), 8, 8).unwrap();
    assert!(tangential_frame(&g).is_err());
    let sqg = unit(8);
    assert!(aniso_norm(&product(&sqg), 99, &tangential_frame(&sqg).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norms_are_homogeneous_and_subadditive(seed in 0u64..1000, c in -5.0f64..5.0, m in 0usize..4) {
        let g = unit(16);
        let frame = tangential_frame(&g).unwrap();
        let f = random_smooth_scalar(&g, seed, 3);
        let h = random_smooth_scalar(&g, seed + 1, 3);
        let scaled = ScalarField::from_fn(&g, |_| 0.0).sub(&f);
        let nf = aniso_norm(&f, m, &frame).unwrap();
        prop_assert!((aniso_norm(&scaled, m, &frame).unwrap() - nf).abs() <= 1e-12 * nf);
        let cf = ScalarField { grid: g.clone(), values: f.values.iter().map(|v| c * v).collect() };
        prop_assert!((aniso_norm(&cf, m, &frame).unwrap() - c.abs() * nf).abs() <= 1e-12 * nf.max(1.0));
        let sum = ScalarField { grid: g.clone(), values: f.values.iter().zip(&h.values).map(|(a, b)| a + b).collect() };
        let nh = aniso_norm(&h, m, &frame).unwrap();
        prop_assert!(aniso_norm(&sum, m, &frame).unwrap() <= (nf + nh) * (1.0 + 1e-12));
        let s = m.min(2);
        prop_assert!(sobolev_norm(&cf, s).unwrap() <= c.abs() * sobolev_norm(&f, s).unwrap() * (1.0 + 1e-12) + 1e-300);
    }
}
