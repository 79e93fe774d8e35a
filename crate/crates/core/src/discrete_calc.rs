//! Finite-difference operators, norms and the MHD energy functional.
//!
//! All derivatives are second order: centered in the interior, one-sided
//! (shifted) near the boundary. Higher derivatives use dedicated stencils
//! rather than repeated first differences. On sectors, native derivatives
//! are taken in `(r, theta)` and Cartesian derivatives are recovered from
//! the chain rule.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::field::{pairwise_sum, Basis, ScalarField, VectorField};
use crate::geometry::{DomainKind, Grid, Poly, TangentialFrame};
use crate::mhd_linear::{BackgroundFields, PressureKind, State};
use crate::stencil::{extrapolate_edge, Stencil1d};

pub const ANISO_MAX_ORDER: usize = 6;
pub const SOBOLEV_MAX_ORDER: usize = 4;

/// Native partial derivative `d_1^{k1} d_2^{k2} f` (`d_r`, `d_theta` on sectors).
pub fn partial(f: &ScalarField, k1: usize, k2: usize) -> Result<ScalarField> {
    let g = &f.grid;
    let (n1, n2) = (g.n1, g.n2);
    let mut cur = f.values.clone();
    if k1 > 0 {
        let st = Stencil1d::new(n1, g.h1, k1)?;
        let mut out = vec![0.0; cur.len()];
        for i in 0..n1 {
            let (start, w) = st.row(i);
            for (m, c) in w.iter().enumerate() {
                let src = &cur[(start + m) * n2..(start + m + 1) * n2];
                let dst = &mut out[i * n2..(i + 1) * n2];
                for j in 0..n2 {
                    dst[j] += c * src[j];
                }
            }
        }
        cur = out;
    }
    if k2 > 0 {
        let st = Stencil1d::new(n2, g.h2, k2)?;
        let mut out = vec![0.0; cur.len()];
        for i in 0..n1 {
            let row = &cur[i * n2..(i + 1) * n2];
            for j in 0..n2 {
                out[i * n2 + j] = st.apply_at(j, |q| row[q]);
            }
        }
        cur = out;
    }
    Ok(ScalarField {
        grid: g.clone(),
        values: cur,
    })
}

/// Cache of native partials of one field.
struct Partials<'a> {
    f: &'a ScalarField,
    cache: HashMap<(usize, usize), ScalarField>,
}

impl<'a> Partials<'a> {
    fn new(f: &'a ScalarField) -> Self {
        Partials {
            f,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, k1: usize, k2: usize) -> Result<&ScalarField> {
        if !self.cache.contains_key(&(k1, k2)) {
            let p = partial(self.f, k1, k2)?;
            self.cache.insert((k1, k2), p);
        }
        Ok(&self.cache[&(k1, k2)])
    }
}

// Polar expansion of Cartesian derivatives: a term is
// coef * cos^i sin^j r^{-p} * d_r^k d_theta^l.
type PolarKey = (u32, u32, u32, usize, usize);

fn polar_apply(terms: &BTreeMap<PolarKey, f64>, dir: usize) -> BTreeMap<PolarKey, f64> {
    let mut out: BTreeMap<PolarKey, f64> = BTreeMap::new();
    let mut add = |k: PolarKey, c: f64| {
        if c != 0.0 {
            *out.entry(k).or_insert(0.0) += c;
        }
    };
    // d_x = cos d_r - (sin/r) d_theta ; d_y = sin d_r + (cos/r) d_theta
    for (&(i, j, p, k, l), &c) in terms {
        // radial factor alpha in {cos, sin}, angular factor beta/r with beta in {-sin, cos}
        let (ai, aj) = if dir == 0 { (1, 0) } else { (0, 1) };
        let (bi, bj, bs) = if dir == 0 { (0, 1, -1.0) } else { (1, 0, 1.0) };
        // alpha * d_r(coef) * D
        if p > 0 {
            add((i + ai, j + aj, p + 1, k, l), -(p as f64) * c);
        }
        // alpha * coef * d_r D
        add((i + ai, j + aj, p, k + 1, l), c);
        // beta/r * d_theta(coef) * D
        if i > 0 {
            add((i - 1 + bi, j + 1 + bj, p + 1, k, l), -(i as f64) * c * bs);
        }
        if j > 0 {
            add((i + 1 + bi, j - 1 + bj, p + 1, k, l), (j as f64) * c * bs);
        }
        // beta/r * coef * d_theta D
        add((i + bi, j + bj, p + 1, k, l + 1), c * bs);
    }
    out
}

/// Cartesian partial `d_x^a d_y^b f`. Identical to [`partial`] on squares.
pub fn cartesian_partial(f: &ScalarField, a: usize, b: usize) -> Result<ScalarField> {
    match f.grid.kind() {
        DomainKind::Square => partial(f, a, b),
        DomainKind::Sector => {
            let mut cache = Partials::new(f);
            cartesian_partial_cached(&mut cache, a, b)
        }
    }
}

fn cartesian_partial_cached(cache: &mut Partials<'_>, a: usize, b: usize) -> Result<ScalarField> {
    let g = cache.f.grid.clone();
    if g.kind() == DomainKind::Square {
        return cache.get(a, b).cloned();
    }
    let mut terms = BTreeMap::new();
    terms.insert((0, 0, 0, 0, 0), 1.0);
    for _ in 0..a {
        terms = polar_apply(&terms, 0);
    }
    for _ in 0..b {
        terms = polar_apply(&terms, 1);
    }
    let mut out = vec![0.0; g.len()];
    for (&(i, j, p, k, l), &c) in &terms {
        if c.abs() < 1e-300 {
            continue;
        }
        let d = cache.get(k, l)?;
        for ii in 0..g.n1 {
            let rp = g.coord1(ii).powi(-(p as i32));
            for jj in 0..g.n2 {
                let (s, co) = g.coord2(jj).sin_cos();
                let idx = ii * g.n2 + jj;
                out[idx] += c * co.powi(i as i32) * s.powi(j as i32) * rp * d.values[idx];
            }
        }
    }
    Ok(ScalarField { grid: g, values: out })
}

pub fn gradient(f: &ScalarField) -> Result<VectorField> {
    let g = &f.grid;
    let d1 = partial(f, 1, 0)?;
    let d2 = partial(f, 0, 1)?;
    match g.kind() {
        DomainKind::Square => VectorField::new(d1, d2, Basis::Cartesian),
        DomainKind::Sector => {
            let dt = ScalarField::from_index_fn(g, |i, j| d2.at(i, j) / g.coord1(i));
            VectorField::new(d1, dt, Basis::Polar)
        }
    }
}

fn require_cartesian_on_square(v: &VectorField) -> Result<()> {
    if v.grid().kind() == DomainKind::Square && v.basis != Basis::Cartesian {
        return Err(Error::ShapeMismatch("square fields must use the Cartesian basis".into()));
    }
    Ok(())
}

pub fn divergence(v: &VectorField) -> Result<ScalarField> {
    require_cartesian_on_square(v)?;
    let g = v.grid().clone();
    match g.kind() {
        DomainKind::Square => Ok(partial(&v.c[0], 1, 0)?.add(&partial(&v.c[1], 0, 1)?)),
        DomainKind::Sector => {
            let p = v.to_polar()?;
            let dr = partial(&p.c[0], 1, 0)?;
            let dt = partial(&p.c[1], 0, 1)?;
            Ok(ScalarField::from_index_fn(&g, |i, j| {
                let r = g.coord1(i);
                dr.at(i, j) + (p.c[0].at(i, j) + dt.at(i, j)) / r
            }))
        }
    }
}

/// Scalar curl `d_1 v_2 - d_2 v_1`.
pub fn curl2d(v: &VectorField) -> Result<ScalarField> {
    require_cartesian_on_square(v)?;
    let g = v.grid().clone();
    match g.kind() {
        DomainKind::Square => Ok(partial(&v.c[1], 1, 0)?.sub(&partial(&v.c[0], 0, 1)?)),
        DomainKind::Sector => {
            let p = v.to_polar()?;
            let dr = partial(&p.c[1], 1, 0)?;
            let dt = partial(&p.c[0], 0, 1)?;
            Ok(ScalarField::from_index_fn(&g, |i, j| {
                let r = g.coord1(i);
                dr.at(i, j) + (p.c[1].at(i, j) - dt.at(i, j)) / r
            }))
        }
    }
}

pub fn laplacian(f: &ScalarField) -> Result<ScalarField> {
    let g = f.grid.clone();
    match g.kind() {
        DomainKind::Square => Ok(partial(f, 2, 0)?.add(&partial(f, 0, 2)?)),
        DomainKind::Sector => {
            let frr = partial(f, 2, 0)?;
            let fr = partial(f, 1, 0)?;
            let ftt = partial(f, 0, 2)?;
            Ok(ScalarField::from_index_fn(&g, |i, j| {
                let r = g.coord1(i);
                frr.at(i, j) + fr.at(i, j) / r + ftt.at(i, j) / (r * r)
            }))
        }
    }
}

/// `grad^perp f = (-d_2 f, d_1 f)` in Cartesian components.
pub fn perp_gradient(f: &ScalarField) -> Result<VectorField> {
    let gr = gradient(f)?.to_cartesian_any()?;
    VectorField::cartesian(gr.c[1].scale(-1.0), gr.c[0].clone())
}

impl VectorField {
    /// Cartesian components on any domain.
    pub fn to_cartesian_any(&self) -> Result<VectorField> {
        if self.basis == Basis::Cartesian {
            Ok(self.clone())
        } else {
            self.to_cartesian()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffKind {
    Gradient,
    Divergence,
    Curl2d,
    Laplacian,
}

#[derive(Debug, Clone, Copy)]
pub enum FieldRef<'a> {
    Scalar(&'a ScalarField),
    Vector(&'a VectorField),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldOut {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl FieldOut {
    pub fn scalar(self) -> Option<ScalarField> {
        match self {
            FieldOut::Scalar(s) => Some(s),
            FieldOut::Vector(_) => None,
        }
    }

    pub fn vector(self) -> Option<VectorField> {
        match self {
            FieldOut::Vector(v) => Some(v),
            FieldOut::Scalar(_) => None,
        }
    }
}

pub fn diff_op(kind: DiffKind, field: FieldRef<'_>) -> Result<FieldOut> {
    let g = match field {
        FieldRef::Scalar(s) => &s.grid,
        FieldRef::Vector(v) => v.grid(),
    };
    if g.n1 < 4 || g.n2 < 4 {
        return Err(Error::StencilTooWide {
            needed: 4,
            have: g.n1.min(g.n2),
        });
    }
    match (kind, field) {
        (DiffKind::Gradient, FieldRef::Scalar(s)) => gradient(s).map(FieldOut::Vector),
        (DiffKind::Laplacian, FieldRef::Scalar(s)) => laplacian(s).map(FieldOut::Scalar),
        (DiffKind::Divergence, FieldRef::Vector(v)) => divergence(v).map(FieldOut::Scalar),
        (DiffKind::Curl2d, FieldRef::Vector(v)) => curl2d(v).map(FieldOut::Scalar),
        (k, _) => Err(Error::InvalidArgument(format!(
            "{k:?} is not defined for this field type"
        ))),
    }
}

/// Order in which the factors of an anisotropic norm term are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnisoOrdering {
    /// `d^a (w d)^c f`: tangential derivatives first.
    #[default]
    TangentialFirst,
    /// `(w d)^c d^a f`.
    TangentialLast,
}

// A 1D operator sum_k p_k(x) d^k stored as coefficient polynomials.
fn op_compose_d(op: &[Poly]) -> Vec<Poly> {
    let mut out = vec![Poly::default(); op.len() + 1];
    for (k, p) in op.iter().enumerate() {
        out[k] = out[k].add(&p.derivative());
        out[k + 1] = out[k + 1].add(p);
    }
    out
}

fn op_compose_t(op: &[Poly], w: &Poly) -> Vec<Poly> {
    let mut out = vec![Poly::default(); op.len() + 1];
    for (k, p) in op.iter().enumerate() {
        out[k] = out[k].add(&w.mul(&p.derivative()));
        out[k + 1] = out[k + 1].add(&w.mul(p));
    }
    out
}

fn op_1d(a: usize, c: usize, w: &Poly, ordering: AnisoOrdering) -> Vec<Poly> {
    let mut op = vec![Poly(vec![1.0])];
    let (first, second) = match ordering {
        AnisoOrdering::TangentialFirst => ((c, true), (a, false)),
        AnisoOrdering::TangentialLast => ((a, false), (c, true)),
    };
    for (count, is_t) in [first, second] {
        for _ in 0..count {
            op = if is_t {
                op_compose_t(&op, w)
            } else {
                op_compose_d(&op)
            };
        }
    }
    op
}

/// `H^m_*` norm on the square:
/// `sum_{2(a1+a2)+a3+a4 <= m} || d1^a1 d2^a2 (d_w1)^a3 (d_w2)^a4 f ||^2`.
pub fn aniso_norm(f: &ScalarField, m: usize, frame: &TangentialFrame) -> Result<f64> {
    aniso_norm_ordered(f, m, frame, AnisoOrdering::TangentialFirst)
}

pub fn aniso_norm_ordered(
    f: &ScalarField,
    m: usize,
    frame: &TangentialFrame,
    ordering: AnisoOrdering,
) -> Result<f64> {
    let g = f.grid.clone();
    if g.kind() != DomainKind::Square {
        return Err(Error::UnsupportedDomain(
            "anisotropic norms are computed on the square only".into(),
        ));
    }
    if m > ANISO_MAX_ORDER {
        return Err(Error::OrderTooHigh {
            order: m,
            cap: ANISO_MAX_ORDER,
        });
    }
    let mut cache = Partials::new(f);
    let mut total = Vec::new();
    for a1 in 0..=m / 2 {
        for a2 in 0..=(m / 2 - a1) {
            let rest = m - 2 * (a1 + a2);
            for a3 in 0..=rest {
                for a4 in 0..=(rest - a3) {
                    let o1 = op_1d(a1, a3, &frame.weight, ordering);
                    let o2 = op_1d(a2, a4, &frame.weight, ordering);
                    let mut term = vec![0.0; g.len()];
                    for (k, p) in o1.iter().enumerate() {
                        if p.is_zero() {
                            continue;
                        }
                        for (l, q) in o2.iter().enumerate() {
                            if q.is_zero() {
                                continue;
                            }
                            let d = cache.get(k, l)?;
                            for i in 0..g.n1 {
                                let pv = p.eval(g.coord1(i));
                                for j in 0..g.n2 {
                                    let idx = i * g.n2 + j;
                                    term[idx] += pv * q.eval(g.coord2(j)) * d.values[idx];
                                }
                            }
                        }
                    }
                    let t = ScalarField {
                        grid: g.clone(),
                        values: term,
                    };
                    total.push(t.inner(&t));
                }
            }
        }
    }
    Ok(pairwise_sum(&total).sqrt())
}

/// Plain `H^s` norm with Cartesian derivatives.
pub fn sobolev_norm(f: &ScalarField, s: usize) -> Result<f64> {
    Ok(sobolev_norm_sq(f, s)?.sqrt())
}

fn sobolev_norm_sq(f: &ScalarField, s: usize) -> Result<f64> {
    if s > SOBOLEV_MAX_ORDER {
        return Err(Error::OrderTooHigh {
            order: s,
            cap: SOBOLEV_MAX_ORDER,
        });
    }
    let mut cache = Partials::new(f);
    let mut terms = Vec::new();
    for order in 0..=s {
        for a in 0..=order {
            let d = cartesian_partial_cached(&mut cache, a, order - a)?;
            terms.push(d.inner(&d));
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `H^s` norm of a vector field (Cartesian components).
pub fn sobolev_norm_vec(v: &VectorField, s: usize) -> Result<f64> {
    let c = v.to_cartesian_any()?;
    Ok((sobolev_norm_sq(&c.c[0], s)? + sobolev_norm_sq(&c.c[1], s)?).sqrt())
}

/// `int R|u|^2 + |b|^2 + |pvar - b.B|^2 / Q + s^2`, with `R`, `Q`
/// evaluated on the background.
pub fn energy_functional(z: &State, bg: &BackgroundFields, eos: &EosModel) -> Result<f64> {
    if z.pvar_kind != PressureKind::Total {
        return Err(Error::KindMismatch {
            expected: PressureKind::Total.name(),
            found: z.pvar_kind.name(),
        });
    }
    let g = z.grid().clone();
    let mut terms = Vec::with_capacity(g.len());
    for k in 0..g.len() {
        let (r, _, q) = eos.eval_point(bg.p.values[k], bg.s.values[k], k)?;
        let u = z.u.at(k);
        let b = z.b.at(k);
        let bb = bg.b.at(k);
        let d = z.pvar.values[k] - (b[0] * bb[0] + b[1] * bb[1]);
        let e = r * (u[0] * u[0] + u[1] * u[1])
            + b[0] * b[0]
            + b[1] * b[1]
            + d * d / q
            + z.s.values[k] * z.s.values[k];
        terms.push(e * g.cell_area(k / g.n2));
    }
    Ok(pairwise_sum(&terms))
}

/// Normal traces of a vector field on every boundary face, obtained by
/// quadratic extrapolation from the three nearest cells.
///
/// Returns `(face, point index, v.nu)` triples.
pub fn normal_traces(v: &VectorField) -> Result<Vec<(crate::geometry::Face, usize, f64)>> {
    use crate::geometry::Face;
    let g = v.grid().clone();
    if g.n1 < 3 || g.n2 < 3 {
        return Err(Error::StencilTooWide {
            needed: 3,
            have: g.n1.min(g.n2),
        });
    }
    let mut out = Vec::new();
    match g.kind() {
        DomainKind::Square => {
            require_cartesian_on_square(v)?;
            let (a, b) = (&v.c[0], &v.c[1]);
            let n1 = g.n1;
            let n2 = g.n2;
            for j in 0..n2 {
                out.push((Face::X1Lo, j, -extrapolate_edge(a.at(0, j), a.at(1, j), a.at(2, j))));
                out.push((
                    Face::X1Hi,
                    j,
                    extrapolate_edge(a.at(n1 - 1, j), a.at(n1 - 2, j), a.at(n1 - 3, j)),
                ));
            }
            for i in 0..n1 {
                out.push((Face::X2Lo, i, -extrapolate_edge(b.at(i, 0), b.at(i, 1), b.at(i, 2))));
                out.push((
                    Face::X2Hi,
                    i,
                    extrapolate_edge(b.at(i, n2 - 1), b.at(i, n2 - 2), b.at(i, n2 - 3)),
                ));
            }
        }
        DomainKind::Sector => {
            let p = v.to_polar()?;
            let (vr, vt) = (&p.c[0], &p.c[1]);
            let (n1, n2) = (g.n1, g.n2);
            for i in 0..n1 {
                out.push((Face::LegLo, i, -extrapolate_edge(vt.at(i, 0), vt.at(i, 1), vt.at(i, 2))));
                out.push((
                    Face::LegHi,
                    i,
                    extrapolate_edge(vt.at(i, n2 - 1), vt.at(i, n2 - 2), vt.at(i, n2 - 3)),
                ));
            }
            for j in 0..n2 {
                out.push((
                    Face::Arc,
                    j,
                    extrapolate_edge(vr.at(n1 - 1, j), vr.at(n1 - 2, j), vr.at(n1 - 3, j)),
                ));
            }
        }
    }
    Ok(out)
}

/// `max |v.nu|` over all boundary face points.
pub fn max_normal_trace(v: &VectorField) -> Result<f64> {
    Ok(normal_traces(v)?
        .iter()
        .fold(0.0, |m, (_, _, x)| m.max(x.abs())))
}

/// Tolerance for boundary-trace preconditions: `10 h^2 max(1, |v|_inf)`.
pub fn trace_tolerance(g: &Grid, scale: f64) -> f64 {
    let h = g.h1.max(g.h2);
    10.0 * h * h * scale.max(1.0)
}

/// Splits `U . grad = V1 d_{w1} + V2 d_{w2}` on the square.
pub fn tangential_decompose(
    big_u: &VectorField,
    frame: &TangentialFrame,
) -> Result<(ScalarField, ScalarField)> {
    let g = big_u.grid().clone();
    if g.kind() != DomainKind::Square {
        return Err(Error::UnsupportedDomain(
            "tangential decomposition is defined on the square".into(),
        ));
    }
    let trace = max_normal_trace(big_u)?;
    let tol = trace_tolerance(&g, big_u.c[0].max_abs().max(big_u.c[1].max_abs()));
    if trace > tol {
        return Err(Error::Precondition {
            detail: "U.nu does not vanish on the boundary".into(),
            value: trace,
            tol,
        });
    }
    let v1 = ScalarField::from_index_fn(&g, |i, j| big_u.c[0].at(i, j) / frame.weight.eval(g.coord1(i)));
    let v2 = ScalarField::from_index_fn(&g, |i, j| big_u.c[1].at(i, j) / frame.weight.eval(g.coord2(j)));
    Ok((v1, v2))
}

/// `d_{w^k} f = w^k . grad f` on the square.
pub fn tangential_derivative(f: &ScalarField, frame: &TangentialFrame, k: usize) -> Result<ScalarField> {
    let g = f.grid.clone();
    let d = if k == 0 { partial(f, 1, 0)? } else { partial(f, 0, 1)? };
    Ok(ScalarField::from_index_fn(&g, |i, j| {
        let x = if k == 0 { g.coord1(i) } else { g.coord2(j) };
        frame.weight.eval(x) * d.at(i, j)
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSample {
    pub label: String,
    pub grid_n: usize,
    pub value: f64,
}

/// Norm values, optional refinement series and fitted growth exponent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormReport {
    pub values: BTreeMap<String, f64>,
    pub series: Vec<NormSample>,
    /// Least-squares slope of `log2(value)` against `log2(grid_n)`.
    pub growth: Option<f64>,
}

impl NormReport {
    pub fn insert(&mut self, label: &str, value: f64) {
        self.values.insert(label.to_string(), value);
    }

    pub fn push(&mut self, label: &str, grid_n: usize, value: f64) {
        self.series.push(NormSample {
            label: label.to_string(),
            grid_n,
            value,
        });
    }

    fn samples(&self, label: &str) -> Vec<&NormSample> {
        self.series.iter().filter(|s| s.label == label).collect()
    }

    /// Per-refinement growth rates `log2(v_k / v_{k-1}) / log2(n_k / n_{k-1})`.
    pub fn rates(&self, label: &str) -> Vec<(usize, f64)> {
        let s = self.samples(label);
        s.windows(2)
            .map(|w| {
                let r = (w[1].value / w[0].value).log2()
                    / (w[1].grid_n as f64 / w[0].grid_n as f64).log2();
                (w[1].grid_n, r)
            })
            .collect()
    }

    /// Fits the growth exponent of `label`; needs three or more refinements.
    pub fn fit_growth(&mut self, label: &str) -> Result<f64> {
        let s = self.samples(label);
        if s.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "growth fit needs at least 3 refinements, have {}",
                s.len()
            )));
        }
        let xs: Vec<f64> = s.iter().map(|p| (p.grid_n as f64).log2()).collect();
        let ys: Vec<f64> = s.iter().map(|p| p.value.log2()).collect();
        let (slope, _, _) = least_squares(&xs, &ys);
        self.growth = Some(slope);
        Ok(slope)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,grid_n,value\n");
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k},,{v:.12e}");
        }
        let mut labels: Vec<&str> = Vec::new();
        for s in &self.series {
            let _ = writeln!(out, "{},{},{:.12e}", s.label, s.grid_n, s.value);
            if !labels.contains(&s.label.as_str()) {
                labels.push(&s.label);
            }
        }
        for l in labels {
            for (n, r) in self.rates(l) {
                let _ = writeln!(out, "{l}.rate,{n},{r:.6}");
            }
        }
        out
    }
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, stderr(a))`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a * x - b).powi(2)).sum();
    let stderr = if xs.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (a, b, stderr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_grid, tangential_frame, DomainSpec};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn square(n: usize) -> Grid {
        make_grid(DomainSpec::unit_square(), n, n).unwrap()
    }

    #[test]
    fn divergence_of_constant_is_zero() {
        let g = square(8);
        let v = VectorField::from_fn(&g, |_| [2.0, -1.0]);
        assert!(divergence(&v).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn curl_of_rotational_field() {
        let errs: Vec<f64> = [32, 64]
            .iter()
            .map(|&n| {
                let g = square(n);
                let v = VectorField::from_fn(&g, |x| {
                    [
                        PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
                        -PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
                    ]
                });
                let c = curl2d(&v).unwrap();
                let exact = ScalarField::from_fn(&g, |x| 2.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin());
                c.sub(&exact).max_abs()
            })
            .collect();
        assert!((errs[0] / errs[1]).log2() > 1.8, "{errs:?}");
    }

    #[test]
    fn sector_laplacian_of_harmonic() {
        let omega = 2.0 * PI / 5.0;
        let a = PI / omega;
        let errs: Vec<f64> = [32, 64]
            .iter()
            .map(|&n| {
                let g = make_grid(DomainSpec::sector(omega, 1.0).unwrap(), n, n).unwrap();
                let f = ScalarField::from_native_fn(&g, |r, t| r.powf(a) * (a * t).cos());
                let l = laplacian(&f).unwrap();
                // interior cells away from the corner
                let mut m: f64 = 0.0;
                for i in 0..n {
                    let r = g.coord1(i);
                    if !(0.25..=0.75).contains(&r) {
                        continue;
                    }
                    for j in 0..n {
                        m = m.max(l.at(i, j).abs());
                    }
                }
                m
            })
            .collect();
        assert!(errs[1] < 2e-2, "{errs:?}");
        assert!((errs[0] / errs[1]).log2() > 1.8, "{errs:?}");
    }

    #[test]
    fn cartesian_partials_on_sector() {
        let g = make_grid(DomainSpec::sector(1.2, 1.0).unwrap(), 64, 64).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[0] * x[0] * x[1] + (x[1]).sin());
        let fxy = cartesian_partial(&f, 1, 1).unwrap();
        let fyy = cartesian_partial(&f, 0, 2).unwrap();
        for i in (10..60).step_by(7) {
            for j in (3..60).step_by(9) {
                let x = g.cartesian(i, j);
                assert_abs_diff_eq!(fxy.at(i, j), 2.0 * x[0], epsilon = 2e-3);
                assert_abs_diff_eq!(fyy.at(i, j), -(x[1]).sin(), epsilon = 2e-3);
            }
        }
    }

    #[test]
    fn div_of_perp_grad_and_curl_of_grad_vanish() {
        let errs: Vec<(f64, f64)> = [32, 64]
            .iter()
            .map(|&n| {
                let g = square(n);
                let psi = ScalarField::from_fn(&g, |x| (2.0 * x[0]).sin() * (x[1] * x[0]).exp());
                let d = divergence(&perp_gradient(&psi).unwrap()).unwrap().l2_norm();
                let c = curl2d(&gradient(&psi).unwrap()).unwrap().l2_norm();
                (d, c)
            })
            .collect();
        assert!(errs[1].0 < errs[0].0 / 3.0 || errs[1].0 < 1e-12);
        assert!(errs[1].1 < errs[0].1 / 3.0 || errs[1].1 < 1e-12);
    }

    #[test]
    fn aniso_norm_of_constant_and_linear() {
        let g = square(64);
        let fr = tangential_frame(&g).unwrap();
        let one = ScalarField::constant(&g, 1.0);
        assert_abs_diff_eq!(aniso_norm(&one, 2, &fr).unwrap(), 1.0, epsilon = 1e-12);
        let x1 = ScalarField::from_fn(&g, |x| x[0]);
        let exact = (48.0f64 / 35.0).sqrt();
        assert_abs_diff_eq!(aniso_norm(&x1, 2, &fr).unwrap(), exact, epsilon = 1e-3);
        assert!(matches!(
            aniso_norm(&x1, 7, &fr),
            Err(Error::OrderTooHigh { order: 7, cap: 6 })
        ));
    }

    #[test]
    fn sobolev_norm_examples() {
        let g = square(64);
        let c = ScalarField::constant(&g, -2.0);
        assert_abs_diff_eq!(sobolev_norm(&c, 3).unwrap(), 2.0, epsilon = 1e-9);
        let f = ScalarField::from_fn(&g, |x| (PI * x[0]).sin() * (PI * x[1]).sin());
        let exact = (0.25 + PI * PI / 2.0).sqrt();
        assert_abs_diff_eq!(sobolev_norm(&f, 1).unwrap(), exact, epsilon = 2e-3);
    }

    #[test]
    fn tangential_decomposition() {
        let g = square(32);
        let fr = tangential_frame(&g).unwrap();
        let u = VectorField::from_fn(&g, |x| [x[0] * (1.0 - x[0]), 0.0]);
        let (v1, v2) = tangential_decompose(&u, &fr).unwrap();
        assert!(v1.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(v2.max_abs() == 0.0);
        let bad = VectorField::from_fn(&g, |x| [x[1], 0.0]);
        assert!(matches!(
            tangential_decompose(&bad, &fr),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn growth_fit_needs_three_points() {
        let mut r = NormReport::default();
        r.push("H3", 16, 1.0);
        r.push("H3", 32, 2f64.sqrt());
        assert!(r.fit_growth("H3").is_err());
        r.push("H3", 64, 2.0);
        assert_abs_diff_eq!(r.fit_growth("H3").unwrap(), 0.5, epsilon = 1e-12);
        assert!(r.to_csv().contains("H3.rate,64,0.500000"));
    }
}
