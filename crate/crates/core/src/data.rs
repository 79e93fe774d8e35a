//! Built-in analytic data: manufactured solutions, eigenmodes, seeded random
//! smooth fields and Picard initial data.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eos::EosModel;
use crate::error::Result;
use crate::field::{ScalarField, VectorField};
use crate::geometry::{DomainKind, Grid};
use crate::jet::Jet;
use crate::mhd_linear::{linear_operator, wall_perp_gradient, Background, PointFn, PressureKind, SourceTerm, State};

/// Scalar type closed-form data are written over: plain values or jets.
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn value(self) -> f64;
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn value(self) -> f64 {
        self
    }
}

impl Real for Jet {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }
    fn sin(self) -> Self {
        Jet::sin(self)
    }
    fn cos(self) -> Self {
        Jet::cos(self)
    }
    fn exp(self) -> Self {
        Jet::exp(self)
    }
    fn sqrt(self) -> Self {
        Jet::sqrt(self)
    }
    fn value(self) -> f64 {
        self.v
    }
}

/// Smooth manufactured `z* = (u, b, pvar, s)` on the unit square.
///
/// Normal components of `u` and `b` are odd about every edge, the other
/// components even, matching the reflection ghosts.
pub fn mms_solution<T: Real>(t: T, x1: T, x2: T) -> [T; 6] {
    let (s1, c1) = ((x1 * PI).sin(), (x1 * PI).cos());
    let (s2, c2) = ((x2 * PI).sin(), (x2 * PI).cos());
    let (s21, c21) = ((x1 * (2.0 * PI)).sin(), (x1 * (2.0 * PI)).cos());
    let c22 = (x2 * (2.0 * PI)).cos();
    let a = (t * 1.3).cos();
    let c = (t + 0.4).sin();
    [
        a * s1 * c2 + c * s21 * c2 * 0.3,
        c * c1 * s2 * 0.7 + a * c21 * s2 * 0.2,
        (t + 1.0) * s1 * c22 * 0.5,
        t.cos() * c1 * s2 * 0.4,
        a * c1 * c2 * 0.6 + t * c22 * 0.2,
        t.cos() * c1 * c22 * 0.3,
    ]
}

/// Smooth time-dependent background `Z = (U, B, P, S)` on the unit square
/// with `U.nu = B.nu = 0`.
pub fn mms_background(t: f64, x: [f64; 2]) -> [f64; 6] {
    let (s1, c1) = (PI * x[0]).sin_cos();
    let (s2, c2) = (PI * x[1]).sin_cos();
    [
        0.3 * s1 * c2 * (1.0 + 0.2 * t.sin()),
        -0.2 * c1 * s2,
        0.4 * s1 * c2,
        0.25 * c1 * s2 * (1.0 + 0.1 * t),
        1.0 + 0.2 * c1 * c2,
        0.1 * (x[0] + 2.0 * x[1]).sin(),
    ]
}

/// A manufactured linear problem: `F = L(Z) z*`.
#[derive(Clone)]
pub struct Manufactured {
    pub bg: Background,
    pub src: SourceTerm,
    pub exact: PointFn,
    pub eos: EosModel,
}

impl Manufactured {
    pub fn exact_state(&self, grid: &Grid, t: f64) -> State {
        State::from_fn(grid, PressureKind::Total, |x| (self.exact)(t, x))
    }
}

/// Manufactured problem around [`mms_solution`], with the variable
/// background [`mms_background`] or the constant `U = B = 0, P = 1, S = 0`.
pub fn manufactured_linear(variable_z: bool) -> Manufactured {
    let eos = EosModel::ideal_gas(5.0 / 3.0).expect("valid gamma");
    let bgf: PointFn = if variable_z {
        Arc::new(mms_background)
    } else {
        Arc::new(|_, _| [0.0, 0.0, 0.0, 0.0, 1.0, 0.0])
    };
    let bgs = bgf.clone();
    let src = SourceTerm::analytic(move |t, x| {
        let (jt, j1, j2) = Jet::vars(t, x[0], x[1]);
        let z = mms_solution(jt, j1, j2);
        linear_operator(&z, bgs(t, x), &eos).unwrap_or([f64::NAN; 6])
    });
    Manufactured {
        bg: Background::Analytic(bgf),
        src,
        exact: Arc::new(|t, x| mms_solution(t, x[0], x[1])),
        eos,
    }
}

/// Acoustic standing wave for `U = B = 0`, `R = Q = 1`:
/// `pvar = cos(sqrt2 pi t) cos(pi x1) cos(pi x2)`,
/// `u = -sin(sqrt2 pi t) / (sqrt2 pi) grad(cos(pi x1) cos(pi x2))`.
pub fn standing_wave(t: f64, x: [f64; 2]) -> [f64; 6] {
    let w = 2f64.sqrt() * PI;
    let (s1, c1) = (PI * x[0]).sin_cos();
    let (s2, c2) = (PI * x[1]).sin_cos();
    let a = -(w * t).sin() / w;
    [
        -a * PI * s1 * c2,
        -a * PI * c1 * s2,
        0.0,
        0.0,
        (w * t).cos() * c1 * c2,
        0.0,
    ]
}

/// Background and equation of state under which [`standing_wave`] is exact.
pub fn standing_wave_setup() -> (Background, EosModel) {
    (
        Background::constant([0.0; 6]),
        EosModel::affine(1.0).expect("positive epsilon"),
    )
}

/// Seeded random smooth data compatible with the wall conditions on the
/// square: `u` and `pvar`, `s` from parity modes, `b` as the discrete
/// `grad^perp psi` of a stream function vanishing on the boundary, so
/// that its discrete divergence is zero to round-off.
pub fn random_parity_state(grid: &Grid, seed: u64, modes: usize, amp: f64) -> Result<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.domain.delta;
    let mut coef = Vec::new();
    for k in 0..=modes {
        for l in 0..=modes {
            let decay = amp / (1.0 + (k * k + l * l) as f64);
            let c: [f64; 5] = std::array::from_fn(|_| decay * rng.gen_range(-1.0..1.0));
            coef.push((k as f64, l as f64, c));
        }
    }
    let eval = |x: [f64; 2]| {
        let mut v = [0.0; 5];
        for &(k, l, c) in &coef {
            let (sk, ck) = (k * PI * x[0] / d).sin_cos();
            let (sl, cl) = (l * PI * x[1] / d).sin_cos();
            v[0] += c[0] * sk * cl;
            v[1] += c[1] * ck * sl;
            v[2] += c[2] * ck * cl;
            v[3] += c[3] * ck * cl;
            v[4] += c[4] * sk * sl;
        }
        v
    };
    let vals: Vec<[f64; 5]> = (0..grid.len())
        .map(|k| eval(grid.cartesian(k / grid.n2, k % grid.n2)))
        .collect();
    let col = |c: usize| ScalarField::new(grid, vals.iter().map(|v| v[c]).collect());
    let b = wall_perp_gradient(&col(4)?)?;
    let mut z = State::zeros(grid, PressureKind::Total);
    z.u.c[0] = col(0)?;
    z.u.c[1] = col(1)?;
    z.b = b;
    z.pvar = col(2)?;
    z.s = col(3)?;
    Ok(z)
}

/// Seeded smooth scalar field `sum a_kl cos(k x1 + l x2 + phase)` on any
/// domain (Cartesian coordinates).
pub fn random_smooth_scalar(grid: &Grid, seed: u64, modes: usize) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for k in 0..=modes {
        for l in 0..=modes {
            let a = rng.gen_range(-1.0..1.0) / (1.0 + (k * k + l * l) as f64);
            let ph = rng.gen_range(0.0..2.0 * PI);
            terms.push((k as f64, l as f64, a, ph));
        }
    }
    ScalarField::from_fn(grid, |x| {
        terms
            .iter()
            .map(|&(k, l, a, ph)| a * (k * x[0] + l * x[1] + ph).cos())
            .sum()
    })
}

/// Seeded smooth tangential field `X = grad^perp psi + grad phi` with
/// `X.nu = 0` on the boundary, evaluated exactly.
///
/// On the square `psi` is a sum of `sin sin` modes and `phi` of `cos cos`
/// modes. On sectors `psi = Phi g1` and `phi = Phi^2 g2` with
/// `Phi = x2 (x1 sin w - x2 cos w)(r0^2 - r^2)` vanishing on every edge.
pub fn random_tangential_field(grid: &Grid, seed: u64, modes: usize) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for k in 0..=modes {
        for l in 0..=modes {
            let d = 1.0 + (k * k + l * l) as f64;
            let a = rng.gen_range(-1.0..1.0) / d;
            let b = rng.gen_range(-1.0..1.0) / d;
            let ph = rng.gen_range(0.0..2.0 * PI);
            terms.push((k as f64, l as f64, a, b, ph));
        }
    }
    let dom = grid.domain;
    let kind = grid.kind();
    let pot = move |x1: Jet, x2: Jet| -> (Jet, Jet) {
        let mut psi = Jet::constant(0.0);
        let mut phi = Jet::constant(0.0);
        match kind {
            DomainKind::Square => {
                let w = PI / dom.delta;
                for &(k, l, a, b, _) in &terms {
                    let (k, l) = (k + 1.0, l + 1.0);
                    psi = psi + (x1 * (k * w)).sin() * (x2 * (l * w)).sin() * a;
                    phi = phi + (x1 * ((k - 1.0) * w)).cos() * (x2 * ((l - 1.0) * w)).cos() * b;
                }
            }
            DomainKind::Sector => {
                let (s, c) = dom.omega.sin_cos();
                let big = x2 * (x1 * s - x2 * c) * (dom.r0 * dom.r0 - x1 * x1 - x2 * x2);
                let (mut g1, mut g2) = (Jet::constant(0.0), Jet::constant(0.0));
                for &(k, l, a, b, ph) in &terms {
                    let arg = (x1 * k + x2 * l) / dom.r0 + ph;
                    g1 = g1 + arg.cos() * a;
                    g2 = g2 + arg.sin() * b;
                }
                psi = big * g1;
                phi = big * big * g2;
            }
        }
        (psi, phi)
    };
    VectorField::from_fn(grid, |x| {
        let (_, j1, j2) = Jet::vars(0.0, x[0], x[1]);
        let (psi, phi) = pot(j1, j2);
        [-psi.dx(1) + phi.dx(0), psi.dx(0) + phi.dx(1)]
    })
}

/// Small smooth compatible nonlinear data around `p = 1`, physical
/// pressure: `u = amp (s1 c2, -c1 s2)`, `b = amp grad^perp(s1 s2)`,
/// `p = 1 + amp c1 c2`, `s = amp c1 c2 / 2` with `s_i = sin(pi x_i)`,
/// `c_i = cos(pi x_i)`.
pub fn picard_data(t: f64, x: [f64; 2], amp: f64) -> [f64; 6] {
    let _ = t;
    let (s1, c1) = (PI * x[0]).sin_cos();
    let (s2, c2) = (PI * x[1]).sin_cos();
    [
        amp * s1 * c2,
        -amp * c1 * s2,
        -amp * PI * s1 * c2,
        amp * PI * c1 * s2,
        1.0 + amp * c1 * c2,
        0.5 * amp * c1 * c2,
    ]
}

pub fn picard_initial(grid: &Grid, amp: f64) -> State {
    State::from_fn(grid, PressureKind::Physical, |x| picard_data(0.0, x, amp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete_calc::max_normal_trace;
    use crate::mhd_linear::wall_divergence;
    use crate::geometry::{make_grid, DomainSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn real_impls_agree() {
        let (t, a, b) = Jet::vars(0.3, 0.2, 0.7);
        let j = mms_solution(t, a, b);
        let v = mms_solution(0.3, 0.2, 0.7);
        for k in 0..6 {
            assert_abs_diff_eq!(j[k].v, v[k], epsilon = 1e-15);
        }
    }

    #[test]
    fn standing_wave_solves_acoustics() {
        let (t, x) = (0.37, [0.21, 0.64]);
        let e = 1e-5;
        let at = |t: f64, x: [f64; 2]| standing_wave(t, x);
        let dt = |c: usize| (at(t + e, x)[c] - at(t - e, x)[c]) / (2.0 * e);
        let dx = |c: usize, i: usize| {
            let (mut xp, mut xm) = (x, x);
            xp[i] += e;
            xm[i] -= e;
            (at(t, xp)[c] - at(t, xm)[c]) / (2.0 * e)
        };
        assert_abs_diff_eq!(dt(0), -dx(4, 0), epsilon = 1e-8);
        assert_abs_diff_eq!(dt(1), -dx(4, 1), epsilon = 1e-8);
        assert_abs_diff_eq!(dt(4), -(dx(0, 0) + dx(1, 1)), epsilon = 1e-8);
    }

    #[test]
    fn random_state_is_compatible_and_divergence_free() {
        let g = make_grid(DomainSpec::unit_square(), 32, 32).unwrap();
        let z = random_parity_state(&g, 7, 3, 1.0).unwrap();
        assert!(wall_divergence(&z.b).unwrap().max_abs() < 1e-11);
        let h = g.h1;
        assert!(max_normal_trace(&z.u).unwrap() < 10.0 * h * h);
        assert!(max_normal_trace(&z.b).unwrap() < 10.0 * h * h);
        let z2 = random_parity_state(&g, 7, 3, 1.0).unwrap();
        assert_eq!(z, z2);
    }
}
