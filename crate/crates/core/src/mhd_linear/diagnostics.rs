use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::scheme::{wall_divergence, RunConfig, Trajectory};
use super::state::{Background, Comps, SourceTerm};
use crate::discrete_calc::{aniso_norm, energy_functional, max_normal_trace, partial};
use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{tangential_frame, DomainKind, Grid};
use crate::stencil::{fornberg, min_cells, Stencil1d};

/// Per-snapshot diagnostics of a linear run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticsReport {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub max_bnu: Vec<f64>,
    pub max_unu: Vec<f64>,
    pub l2_divb: Vec<f64>,
    /// Residual of the div-b transport equation; `None` when not computed.
    pub res_divb: Option<Vec<f64>>,
    pub res_curl1: Option<Vec<f64>>,
    pub res_curl2: Option<Vec<f64>>,
    /// `m -> |||z(t)|||_{m,*}` per snapshot.
    pub star: BTreeMap<usize, Vec<f64>>,
    pub dissipation: f64,
}

impl DiagnosticsReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# dissipation={}", self.dissipation);
        out.push_str("t,energy,max_bnu,max_unu,l2_divb,res_divb,res_curl1,res_curl2");
        for m in self.star.keys() {
            let _ = write!(out, ",star_m{m}");
        }
        out.push('\n');
        let opt = |v: &Option<Vec<f64>>, k: usize| match v {
            Some(v) => format!("{:.10e}", v[k]),
            None => String::new(),
        };
        for k in 0..self.times.len() {
            let _ = write!(
                out,
                "{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{},{},{}",
                self.times[k],
                self.energy[k],
                self.max_bnu[k],
                self.max_unu[k],
                self.l2_divb[k],
                opt(&self.res_divb, k),
                opt(&self.res_curl1, k),
                opt(&self.res_curl2, k)
            );
            for v in self.star.values() {
                let _ = write!(out, ",{:.10e}", v[k]);
            }
            out.push('\n');
        }
        out
    }

    /// `max_t` of a series.
    pub fn max_of(series: &[f64]) -> f64 {
        series.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Energy, traces, divergence and (optionally) residuals and slice norms at
/// every snapshot.
pub fn compute_diagnostics(
    traj: &Trajectory,
    bg: &Background,
    src: &SourceTerm,
    eos: &EosModel,
    cfg: &RunConfig,
) -> Result<DiagnosticsReport> {
    let g = &traj.grid;
    let mut rep = DiagnosticsReport {
        dissipation: cfg.scheme.dissipation,
        ..Default::default()
    };
    for (t, z) in traj.times.iter().zip(&traj.states) {
        rep.times.push(*t);
        rep.energy.push(energy_functional(z, &bg.sample(g, *t)?, eos)?);
        rep.max_bnu.push(max_normal_trace(&z.b)?);
        rep.max_unu.push(max_normal_trace(&z.u)?);
        rep.l2_divb.push(wall_divergence(&z.b)?.l2_norm());
    }
    if cfg.residuals && traj.len() >= 3 {
        let r = residual_series(traj, bg, src, eos, true)?;
        rep.res_divb = Some(r.divb);
        rep.res_curl1 = r.curl1;
        rep.res_curl2 = r.curl2;
    }
    for &m in &cfg.star_orders {
        rep.star.insert(m, star_norm_series(traj, m)?);
    }
    Ok(rep)
}

/// Weights of the `k`-th time derivative at snapshot `n` of `len`.
fn time_row(len: usize, dt: f64, k: usize, n: usize) -> Result<(usize, Vec<f64>)> {
    if k == 0 {
        return Ok((n, vec![1.0]));
    }
    if len >= min_cells(k) {
        let st = Stencil1d::new(len, dt, k)?;
        let (s, w) = st.row(n);
        return Ok((s, w.to_vec()));
    }
    if len > k {
        let xs: Vec<f64> = (0..len).map(|j| j as f64 - n as f64).collect();
        let scale = dt.powi(-(k as i32));
        return Ok((0, fornberg(0.0, &xs, k)[k].iter().map(|w| w * scale).collect()));
    }
    Err(Error::InsufficientData(format!(
        "time derivative of order {k} needs more than {len} snapshots"
    )))
}

fn combine(row: &(usize, Vec<f64>), get: impl Fn(usize) -> Vec<f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for (m, w) in row.1.iter().enumerate() {
        let v = get(row.0 + m);
        if out.is_empty() {
            out = vec![0.0; v.len()];
        }
        for (o, x) in out.iter_mut().zip(&v) {
            *o += w * x;
        }
    }
    out
}

/// Value and derivatives of one scalar quantity at a snapshot.
struct Fj {
    v: Vec<f64>,
    t: Vec<f64>,
    tt: Vec<f64>,
    d: [Vec<f64>; 2],
    dd: [[Vec<f64>; 2]; 2],
    td: [Vec<f64>; 2],
}

fn spatial(g: &Grid, v: &[f64], k1: usize, k2: usize) -> Result<Vec<f64>> {
    Ok(partial(&ScalarField::new(g, v.to_vec())?, k1, k2)?.values)
}

impl Fj {
    fn new(g: &Grid, v: Vec<f64>, t: Vec<f64>, tt: Vec<f64>) -> Result<Self> {
        let d = [spatial(g, &v, 1, 0)?, spatial(g, &v, 0, 1)?];
        let d12 = spatial(g, &v, 1, 1)?;
        let dd = [
            [spatial(g, &v, 2, 0)?, d12.clone()],
            [d12, spatial(g, &v, 0, 2)?],
        ];
        let td = [spatial(g, &t, 1, 0)?, spatial(g, &t, 0, 1)?];
        Ok(Fj { v, t, tt, d, dd, td })
    }
}

/// Everything sampled at one snapshot time.
struct Frame {
    z: Comps,
    zb: Comps,
    f: Comps,
    r: Vec<f64>,
    iq: Vec<f64>,
}

fn frame(traj: &Trajectory, bg: &Background, src: &SourceTerm, eos: &EosModel, n: usize) -> Result<Frame> {
    let g = &traj.grid;
    let t = traj.times[n];
    let zb = bg.sample_comps(g, t)?;
    let mut r = vec![0.0; g.len()];
    let mut iq = vec![0.0; g.len()];
    for k in 0..g.len() {
        let (a, _, q) = eos.eval_point(zb[4][k], zb[5][k], k)?;
        r[k] = a;
        iq[k] = 1.0 / q;
    }
    Ok(Frame {
        z: traj.states[n].comps(),
        zb,
        f: src.sample_or_zero(g, t),
        r,
        iq,
    })
}

struct Residuals {
    divb: Vec<f64>,
    curl1: Option<Vec<f64>>,
    curl2: Option<Vec<f64>>,
}

fn require_uniform(traj: &Trajectory) -> Result<()> {
    if traj.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "residuals need at least 3 snapshots, have {}",
            traj.len()
        )));
    }
    let tol = 1e-9 * traj.dt_snap.max(1e-300);
    for w in traj.times.windows(2) {
        if ((w[1] - w[0]) - traj.dt_snap).abs() > tol {
            return Err(Error::InvalidArgument("snapshots are not uniformly spaced".into()));
        }
    }
    Ok(())
}

fn residual_series(
    traj: &Trajectory,
    bg: &Background,
    src: &SourceTerm,
    eos: &EosModel,
    curl: bool,
) -> Result<Residuals> {
    require_uniform(traj)?;
    let g = traj.grid.clone();
    if g.kind() != DomainKind::Square {
        return Err(Error::UnsupportedDomain("residuals are evaluated on the square".into()));
    }
    let len = traj.len();
    let dt = traj.dt_snap;
    let mut cache: BTreeMap<usize, Frame> = BTreeMap::new();
    let mut out = Residuals {
        divb: Vec::with_capacity(len),
        curl1: curl.then(Vec::new),
        curl2: curl.then(Vec::new),
    };
    for n in 0..len {
        let r1 = time_row(len, dt, 1, n)?;
        let r2 = if curl { Some(time_row(len, dt, 2, n)?) } else { None };
        let lo = r1.0.min(r2.as_ref().map_or(r1.0, |r| r.0));
        let hi = (r1.0 + r1.1.len()).max(r2.as_ref().map_or(0, |r| r.0 + r.1.len()));
        cache.retain(|&k, _| k >= lo);
        for k in lo..hi {
            if !cache.contains_key(&k) {
                cache.insert(k, frame(traj, bg, src, eos, k)?);
            }
        }
        let jet = |get: &dyn Fn(&Frame) -> &Vec<f64>, second: bool| -> Result<Fj> {
            let v = get(&cache[&n]).clone();
            let t = combine(&r1, |m| get(&cache[&m]).clone());
            let tt = match (&r2, second) {
                (Some(r2), true) => combine(r2, |m| get(&cache[&m]).clone()),
                _ => Vec::new(),
            };
            Fj::new(&g, v, t, tt)
        };
        let u = [jet(&|f| &f.z[0], true)?, jet(&|f| &f.z[1], true)?];
        let b = [jet(&|f| &f.z[2], false)?, jet(&|f| &f.z[3], false)?];
        let p = jet(&|f| &f.z[4], false)?;
        let uu = [jet(&|f| &f.zb[0], false)?, jet(&|f| &f.zb[1], false)?];
        let bb = [jet(&|f| &f.zb[2], false)?, jet(&|f| &f.zb[3], false)?];
        let f1 = [jet(&|f| &f.f[0], false)?, jet(&|f| &f.f[1], false)?];
        let f2 = [jet(&|f| &f.f[2], false)?, jet(&|f| &f.f[3], false)?];
        let f3 = jet(&|f| &f.f[4], false)?;
        let rr = jet(&|f| &f.r, false)?;
        let iq = jet(&|f| &f.iq, false)?;

        let mut rd = vec![0.0; g.len()];
        let mut rc1 = vec![0.0; g.len()];
        let mut rc2 = vec![0.0; g.len()];
        for k in 0..g.len() {
            let uv = [uu[0].v[k], uu[1].v[k]];
            let bv = [bb[0].v[k], bb[1].v[k]];
            // d_i U_j and d_i B_j
            let gu = |i: usize, j: usize| uu[j].d[i][k];
            let gb = |i: usize, j: usize| bb[j].d[i][k];
            let adv = |q: &Fj| uv[0] * q.d[0][k] + uv[1] * q.d[1][k];
            let dtq = |q: &Fj| q.t[k] + adv(q);
            let cross = |a: [f64; 2], v: [f64; 2]| a[0] * v[1] - a[1] * v[0];
            let divu = u[0].d[0][k] + u[1].d[1][k];
            let div_big_b = gb(0, 0) + gb(1, 1);

            // div-b transport
            let divb_t = b[0].td[0][k] + b[1].td[1][k];
            let divb_grad = |j: usize| b[0].dd[0][j][k] + b[1].dd[1][j][k];
            let dt_divb = divb_t + uv[0] * divb_grad(0) + uv[1] * divb_grad(1);
            let mut src_terms = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    src_terms += gb(i, j) * u[i].d[j][k] - gu(i, j) * b[i].d[j][k];
                }
            }
            let div_f2 = f2[0].d[0][k] + f2[1].d[1][k];
            rd[k] = dt_divb - src_terms + div_big_b * divu - div_f2;
            if !curl {
                continue;
            }

            // vorticities and their transport derivatives
            let om = |v: &[Fj; 2]| v[1].d[0][k] - v[0].d[1][k];
            let om_t = |v: &[Fj; 2]| v[1].td[0][k] - v[0].td[1][k];
            let om_d = |v: &[Fj; 2], j: usize| v[1].dd[0][j][k] - v[0].dd[1][j][k];
            let dt_om = |v: &[Fj; 2]| om_t(v) + uv[0] * om_d(v, 0) + uv[1] * om_d(v, 1);
            let bg_om = |v: &[Fj; 2]| bv[0] * om_d(v, 0) + bv[1] * om_d(v, 1);
            let c_dt = |v: &[Fj; 2]| {
                -((gu(0, 0) * v[1].d[0][k] + gu(0, 1) * v[1].d[1][k])
                    - (gu(1, 0) * v[0].d[0][k] + gu(1, 1) * v[0].d[1][k]))
            };
            let c_bg = |v: &[Fj; 2]| {
                -((gb(0, 0) * v[1].d[0][k] + gb(0, 1) * v[1].d[1][k])
                    - (gb(1, 0) * v[0].d[0][k] + gb(1, 1) * v[0].d[1][k]))
            };
            let dtu = [dtq(&u[0]), dtq(&u[1])];
            let dtb = [dtq(&b[0]), dtq(&b[1])];
            let r = rr.v[k];
            let grad_r = [rr.d[0][k], rr.d[1][k]];
            let curl_f1 = f1[1].d[0][k] - f1[0].d[1][k];
            let ft1 = curl_f1 + r * c_dt(&u) - c_bg(&b) - cross(grad_r, dtu);
            rc1[k] = r * dt_om(&u) - bg_om(&b) - ft1;

            let q_inv = iq.v[k];
            let curl_big_b = gb(0, 1) - gb(1, 0);
            let b2 = bv[0] * bv[0] + bv[1] * bv[1];
            let dtp = dtq(&p);
            let bdtb = bv[0] * dtb[0] + bv[1] * dtb[1];
            let dtf1 = [dtq(&f1[0]), dtq(&f1[1])];
            let grad_f3 = [f3.d[0][k], f3.d[1][k]];
            let e1 = (f2[1].d[0][k] - f2[0].d[1][k])
                - (f3.v[k] * curl_big_b + cross(grad_f3, bv))
                - cross(bv, dtf1) * q_inv;
            let e2 = c_dt(&b);
            let e3 = -c_bg(&u);
            let e4 = curl_big_b * (dtp - bdtb) * q_inv;
            let e5 = -cross(
                bv,
                std::array::from_fn(|i| {
                    iq.d[i][k] * dtp + q_inv * (gu(i, 0) * p.d[0][k] + gu(i, 1) * p.d[1][k])
                }),
            );
            let e6 = cross(
                bv,
                std::array::from_fn(|i| {
                    (0..2)
                        .map(|j| (gb(i, j) * q_inv + bv[j] * iq.d[i][k]) * dtb[j])
                        .sum()
                }),
            );
            let dt_big_b = [dtq(&bb[0]), dtq(&bb[1])];
            let mut e7 = 0.0;
            for j in 0..2 {
                let v: [f64; 2] = std::array::from_fn(|i| {
                    bv[j] * (gu(i, 0) * b[j].d[0][k] + gu(i, 1) * b[j].d[1][k])
                        - dt_big_b[j] * b[j].d[i][k]
                });
                e7 += cross(bv, v) * q_inv;
            }
            let curl_b = om(&b);
            let e8 = -(bv[0] * dt_big_b[0] + bv[1] * dt_big_b[1]) * curl_b * q_inv;
            let dt_r = dtq(&rr);
            let e9 = cross(bv, [dt_r * dtu[0], dt_r * dtu[1]]) * q_inv;
            let ut = [uu[0].t[k], uu[1].t[k]];
            let dt2 = |f: &Fj| {
                let mut s = f.tt[k] + ut[0] * f.d[0][k] + ut[1] * f.d[1][k];
                for i in 0..2 {
                    s += 2.0 * uv[i] * f.td[i][k];
                    for j in 0..2 {
                        s += uv[i] * gu(i, j) * f.d[j][k] + uv[i] * uv[j] * f.dd[i][j][k];
                    }
                }
                s
            };
            let e10 = cross(bv, [r * dt2(&u[0]), r * dt2(&u[1])]) * q_inv;
            let ft2 = e1 + e2 + e3 + e4 + e5 + e6 + e7 + e8 + e9 + e10;
            rc2[k] = (1.0 + b2 * q_inv) * dt_om(&b) - bg_om(&u) - ft2;
        }
        out.divb.push(ScalarField::new(&g, rd)?.l2_norm());
        if let (Some(c1), Some(c2)) = (out.curl1.as_mut(), out.curl2.as_mut()) {
            c1.push(ScalarField::new(&g, rc1)?.l2_norm());
            c2.push(ScalarField::new(&g, rc2)?.l2_norm());
        }
    }
    Ok(out)
}

/// `L^2` residual per snapshot of
/// `D_t(div b) = sum_ij (d_i B_j d_j u_i - d_i U_j d_j b_i) - div B div u + div F2`.
pub fn divb_transport_residual(
    traj: &Trajectory,
    bg: &Background,
    src: &SourceTerm,
    eos: &EosModel,
) -> Result<Vec<f64>> {
    Ok(residual_series(traj, bg, src, eos, false)?.divb)
}

/// `L^2` residuals per snapshot of both rows of the symmetric hyperbolic
/// system satisfied by `(curl u, curl b)`.
pub fn curl_system_residual(
    traj: &Trajectory,
    bg: &Background,
    src: &SourceTerm,
    eos: &EosModel,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let r = residual_series(traj, bg, src, eos, true)?;
    Ok((r.curl1.unwrap_or_default(), r.curl2.unwrap_or_default()))
}

/// `|||z(t)|||_{m,*}^2 = sum_{k <= m} || d_t^k z ||^2_{H^{m-k}_*}` per
/// snapshot, with time derivatives from snapshot differences.
pub fn star_norm_series(traj: &Trajectory, m: usize) -> Result<Vec<f64>> {
    let g = traj.grid.clone();
    let frame = tangential_frame(&g)?;
    let len = traj.len();
    if m > 0 && len < min_cells(m) {
        return Err(Error::InsufficientData(format!(
            "slice norm of order {m} needs {} snapshots, have {len}",
            min_cells(m)
        )));
    }
    let comps: Vec<Comps> = traj.states.iter().map(|s| s.comps()).collect();
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        let mut total = 0.0;
        for k in 0..=m {
            let row = time_row(len, traj.dt_snap, k, n)?;
            for c in 0..6 {
                let v = combine(&row, |q| comps[q][c].clone());
                let nrm = aniso_norm(&ScalarField::new(&g, v)?, m - k, &frame)?;
                total += nrm * nrm;
            }
        }
        out.push(total.sqrt());
    }
    Ok(out)
}
