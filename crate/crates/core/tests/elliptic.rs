use std::f64::consts::PI;

use cornermhd::elliptic::{div_curl_solve, helmholtz_decompose, hodge_ratio, poisson_dirichlet, poisson_neumann};
use cornermhd::{make_grid, DomainSpec, Grid, Jet, ScalarField, VectorField};

const OMEGA: f64 = 2.0 * PI / 5.0;

fn sector(n: usize) -> Grid {
    make_grid(DomainSpec::sector(OMEGA, 1.0).unwrap(), n, n).unwrap()
}

fn jet(x: [f64; 2], f: fn(Jet, Jet) -> Jet) -> Jet {
    let (_, x1, x2) = Jet::vars(0.0, x[0], x[1]);
    f(x1, x2)
}

/// Vanishes on both legs and the arc.
fn dirichlet_fn(x1: Jet, x2: Jet) -> Jet {
    let (s, c) = OMEGA.sin_cos();
    let r2 = x1 * x1 + x2 * x2;
    x2 * (x1 * s - x2 * c) * (Jet::constant(1.0) - r2) * (x1 + 1.0)
}

/// Radial with zero slope at the arc.
fn neumann_fn(x1: Jet, x2: Jet) -> Jet {
    ((x1 * x1 + x2 * x2) * PI).cos()
}

fn orders(e: &[f64]) -> Vec<f64> {
    e.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn assert_second_order(label: &str, e: &[f64]) {
    let o = orders(e);
    assert!(o.iter().all(|x| *x >= 1.8), "{label}: errors {e:?} orders {o:?}");
}

#[test]
fn sector_poisson_problems_converge_at_second_order() {
    let (mut ed, mut en) = (Vec::new(), Vec::new());
    for n in [16, 32, 64] {
        let g = sector(n);
        let kd = ScalarField::from_fn(&g, |x| jet(x, dirichlet_fn).v);
        let fd = ScalarField::from_fn(&g, |x| jet(x, dirichlet_fn).laplacian());
        let sd = poisson_dirichlet(&fd).unwrap();
        assert!(sd.residual_norm < 1e-9);
        ed.push(sd.potential.sub(&kd).l2_norm());

        let kn = ScalarField::from_fn(&g, |x| jet(x, neumann_fn).v);
        let fnn = ScalarField::from_fn(&g, |x| jet(x, neumann_fn).laplacian());
        let sn = poisson_neumann(&fnn).unwrap();
        let diff = sn.potential.sub(&kn);
        let m = diff.mean();
        en.push(ScalarField::from_fn(&g, |_| m).sub(&diff).l2_norm());
    }
    assert_second_order("dirichlet", &ed);
    assert_second_order("neumann", &en);
}

#[test]
fn helmholtz_parts_sum_to_the_input() {
    let mut err = Vec::new();
    for n in [16, 32, 64] {
        let g = sector(n);
        // tangential solenoidal part from a stream function vanishing on the boundary
        let sol = VectorField::from_fn(&g, |x| {
            let d = jet(x, dirichlet_fn).grad();
            [-d[1], d[0]]
        });
        let grad = VectorField::from_fn(&g, |x| [2.0 * x[0] * x[1], x[0] * x[0]]);
        let v = grad.add(&sol);
        let hp = helmholtz_decompose(&v).unwrap();
        assert!(hp.div_g <= 1e-8, "div g = {:e}", hp.div_g);
        assert!(hp.grad_f.add(&hp.g).sub(&v).l2_norm() <= 1e-12);
        err.push(hp.g.sub(&sol).l2_norm());
    }
    assert_second_order("solenoidal part", &err);
}

#[test]
fn div_curl_recovers_a_tangential_field() {
    let mut err = Vec::new();
    for n in [16, 32, 64] {
        let g = make_grid(DomainSpec::unit_square(), n, n).unwrap();
        // u = grad^perp(sin sin) + grad(cos cos): div u = -2 pi^2 cos cos, curl u = -2 pi^2 sin sin
        let (s, c) = (|t: f64| (PI * t).sin(), |t: f64| (PI * t).cos());
        let u = VectorField::from_fn(&g, |x| {
            [
                -PI * s(x[0]) * c(x[1]) - PI * s(x[0]) * c(x[1]),
                PI * c(x[0]) * s(x[1]) - PI * c(x[0]) * s(x[1]),
            ]
        });
        let v1 = ScalarField::from_fn(&g, |x| -2.0 * PI * PI * c(x[0]) * c(x[1]));
        let v2 = ScalarField::from_fn(&g, |x| -2.0 * PI * PI * s(x[0]) * s(x[1]));
        err.push(div_curl_solve(&v1, &v2).unwrap().sub(&u).l2_norm());
    }
    assert_second_order("div-curl", &err);
}

#[test]
fn hodge_ratio_rejects_fields_crossing_the_wall() {
    let g = make_grid(DomainSpec::unit_square(), 32, 32).unwrap();
    let through = VectorField::from_fn(&g, |_| [1.0, 0.0]);
    assert!(hodge_ratio(&through, 1).is_err());
    let tangential = VectorField::from_fn(&g, |x| [(PI * x[0]).sin(), 0.0]);
    let r = hodge_ratio(&tangential, 1).unwrap();
    assert!(r.is_finite() && r > 0.0);
    assert!(hodge_ratio(&tangential, 0).is_err());
}
