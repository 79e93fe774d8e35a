use std::f64::consts::PI;

use cornermhd::singularity_lab::{
    counterexample_field, fit_singular_exponent, norm_divergence_scan, norm_growth_scan, CaseKind,
    CounterexampleSpec, Verdict, FIT_WINDOW,
};
use cornermhd::{make_grid, DomainSpec, ScalarField};
use proptest::prelude::*;

#[test]
fn opening_angles_classify_into_cases() {
    let a = CounterexampleSpec::new(PI / 3.0, 1.0).unwrap();
    assert_eq!(a.case, CaseKind::A);
    assert_eq!(a.n, Some(3));
    assert!(a.lambda.unwrap() > 0.0);
    let b = CounterexampleSpec::new(PI / 2.0, 1.0).unwrap();
    assert_eq!((b.case, b.n), (CaseKind::B, Some(2)));
    for w in [2.0 * PI / 5.0, 2.0 * PI / 7.0, 0.9] {
        let c = CounterexampleSpec::new(w, 1.0).unwrap();
        assert_eq!(c.case, CaseKind::C);
        assert!((c.predicted_exponent() - (PI / w - 1.0)).abs() < 1e-15);
    }
    assert!(CounterexampleSpec::new(3.5, 1.0).is_err());
}

proptest! {
    #[test]
    fn closed_form_derivatives_match_differences(r in 0.1f64..0.95, frac in 0.0f64..1.0, which in 0usize..4) {
        let w = [PI / 3.0, PI / 4.0, PI / 2.0, 2.0 * PI / 5.0][which];
        let spec = CounterexampleSpec::new(w, 1.0).unwrap();
        let th = frac * w;
        let x = [r * th.cos(), r * th.sin()];
        let (_, d, hs) = spec.eval(x);
        let e = 1e-5;
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += e;
            xm[k] -= e;
            let (fp, dp, _) = spec.eval(xp);
            let (fm, dm, _) = spec.eval(xm);
            let scale = 1.0 + d[k].abs();
            prop_assert!(((fp - fm) / (2.0 * e) - d[k]).abs() <= 1e-7 * scale);
            for l in 0..2 {
                let fd = (dp[l] - dm[l]) / (2.0 * e);
                prop_assert!((fd - hs[l][k]).abs() <= 1e-6 * (1.0 + hs[l][k].abs()));
            }
        }
        prop_assert!((hs[0][0] + hs[1][1] - spec.laplacian(x)).abs() <= 1e-9 * (1.0 + spec.laplacian(x).abs()));
        // u.nu = 0 on both legs
        for t in [0.0, w] {
            let (_, dl, _) = spec.eval([r * t.cos(), r * t.sin()]);
            prop_assert!((-t.sin() * dl[0] + t.cos() * dl[1]).abs() <= 1e-12);
        }
    }
}

#[test]
fn sampled_counterexample_matches_exact_solution() {
    let spec = CounterexampleSpec::new(2.0 * PI / 5.0, 1.0).unwrap();
    let g = make_grid(spec.domain(), 16, 16).unwrap();
    let f = counterexample_field(&spec, 0.7, &g).unwrap();
    for k in 0..g.len() {
        let (u, p) = spec.exact(0.7, g.cartesian(k / 16, k % 16));
        assert_eq!(f.p_exact.values[k], p);
        assert_eq!(f.u_exact.c[0].values[k], u[0]);
    }
    let wrong = make_grid(DomainSpec::sector(PI / 3.0, 1.0).unwrap(), 16, 16).unwrap();
    assert!(counterexample_field(&spec, 0.7, &wrong).is_err());
}

#[test]
fn exponent_fit_recovers_a_power_law() {
    let w = 2.0 * PI / 5.0;
    let g = make_grid(DomainSpec::sector(w, 1.0).unwrap(), 256, 16).unwrap();
    for a in [0.25, 0.5, 1.5] {
        let f = ScalarField::from_fn(&g, |x| 3.0 * x[0].hypot(x[1]).powf(a));
        let fit = fit_singular_exponent(&f, w / 2.0, FIT_WINDOW).unwrap();
        assert!((fit.exponent - a).abs() < 1e-10, "{fit:?}");
        assert!(fit.samples >= 8 && fit.stderr < 1e-8);
    }
    let sq = make_grid(DomainSpec::unit_square(), 16, 16).unwrap();
    assert!(fit_singular_exponent(&ScalarField::zeros(&sq), 0.5, FIT_WINDOW).is_err());
}

#[test]
fn norm_scans_separate_smooth_from_singular() {
    let w = 2.0 * PI / 5.0;
    let dom = DomainSpec::sector(w, 1.0).unwrap();
    let smooth = |x: [f64; 2]| [x[0] * x[1], x[0] - x[1] * x[1]];
    let fin = norm_growth_scan("smooth", dom, &smooth, 3, &[16, 32, 64]).unwrap();
    assert_eq!(fin.verdict, Verdict::Finite, "{}", fin.to_csv());
    let spec = CounterexampleSpec::new(w, 1.0).unwrap();
    // |grad u| ~ r^{pi/w - 2}: H^2 is finite, H^3 is not
    let h3 = norm_divergence_scan(&spec, 3, &[16, 32, 64]).unwrap();
    assert_eq!(h3.verdict, Verdict::Divergent, "{}", h3.to_csv());
    assert!(h3.last_factor() > 1.0);
    assert!(norm_growth_scan("x", dom, &smooth, 3, &[16, 32]).is_err());
    assert!(norm_growth_scan("x", dom, &smooth, 3, &[32, 16, 64]).is_err());
}
