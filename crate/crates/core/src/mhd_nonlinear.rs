//! The nonlinear system and its Picard iteration through the linear solver.
//!
//! Each sweep freezes the previous iterate as the background `Z = z^k`,
//! solves the linearized problem for `y = (u, b, p + |b|^2/2, s)` from the
//! same initial data and maps back to physical pressure.

use std::fmt::Write as _;

use log::info;

use crate::discrete_calc::{max_normal_trace, sobolev_norm};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mhd_linear::{
    enforce_bc, integrate, plan_steps, Background, BackgroundFields, Comps, KBox, PressureKind, RunConfig,
    wall_divergence, SourceTerm, State, Trajectory, COMPONENTS,
};
use crate::stencil::{min_cells, Stencil1d};

pub use crate::eos::{eos_eval, EosKind, EosModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PDirection {
    ToTotal,
    ToPhysical,
}

/// Shifts the pressure by `+-|b|^2 / 2` and flips the kind flag.
pub fn p_map(z: &State, dir: PDirection) -> Result<State> {
    let (from, to, sign) = match dir {
        PDirection::ToTotal => (PressureKind::Physical, PressureKind::Total, 1.0),
        PDirection::ToPhysical => (PressureKind::Total, PressureKind::Physical, -1.0),
    };
    if z.pvar_kind != from {
        return Err(Error::KindMismatch {
            expected: from.name(),
            found: z.pvar_kind.name(),
        });
    }
    let mut out = z.clone();
    for k in 0..out.pvar.values.len() {
        let b = z.b.at(k);
        let half = 0.5 * (b[0] * b[0] + b[1] * b[1]);
        out.pvar.values[k] += sign * half;
    }
    out.pvar_kind = to;
    Ok(out)
}

fn require_physical(z: &State) -> Result<()> {
    if z.pvar_kind != PressureKind::Physical {
        return Err(Error::KindMismatch {
            expected: PressureKind::Physical.name(),
            found: z.pvar_kind.name(),
        });
    }
    Ok(())
}

/// Tendency of the nonlinear system with physical pressure:
///
/// * `u_t = -u.grad u - (grad p + b x curl b) / R`
/// * `b_t = -u.grad b + b.grad u - b div u`
/// * `p_t = -u.grad p - Q div u`
/// * `s_t = -u.grad s`
///
/// Centered differences on reflection ghosts, no dissipation.
pub fn nonlinear_rhs(z: &State, eos: &EosModel) -> Result<State> {
    require_physical(z)?;
    let g = z.grid().clone();
    let zp = enforce_bc(z)?;
    let (n1, n2) = (g.n1, g.n2);
    let s = zp.stride();
    let ng = crate::mhd_linear::NG;
    let mut out: Comps = std::array::from_fn(|_| vec![0.0; g.len()]);
    let (i2h1, i2h2) = (0.5 / g.h1, 0.5 / g.h2);
    for i in 0..n1 {
        for j in 0..n2 {
            let k = i * n2 + j;
            let p = (i + ng) * s + j + ng;
            let mut d1 = [0.0; 6];
            let mut d2 = [0.0; 6];
            let mut v = [0.0; 6];
            for c in 0..6 {
                let a = &zp.c[c];
                v[c] = a[p];
                d1[c] = (a[p + s] - a[p - s]) * i2h1;
                d2[c] = (a[p + 1] - a[p - 1]) * i2h2;
            }
            let (r, _, q) = eos.eval_point(v[4], v[5], k)?;
            let adv = |c: usize| v[0] * d1[c] + v[1] * d2[c];
            let bgr = |c: usize| v[2] * d1[c] + v[3] * d2[c];
            let divu = d1[0] + d2[1];
            let curlb = d1[3] - d2[2];
            out[0][k] = -adv(0) - (d1[4] + curlb * v[3]) / r;
            out[1][k] = -adv(1) - (d2[4] - curlb * v[2]) / r;
            out[2][k] = -adv(2) + bgr(0) - v[2] * divu;
            out[3][k] = -adv(3) + bgr(1) - v[3] * divu;
            out[4][k] = -adv(4) - q * divu;
            out[5][k] = -adv(5);
        }
    }
    for (c, v) in out.iter().enumerate() {
        if let Some(cell) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                component: COMPONENTS[c],
                cell,
                t: f64::NAN,
            });
        }
    }
    Ok(State::from_comps(&g, out, PressureKind::Physical))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    /// Linear solver settings for every sweep.
    pub run: RunConfig,
    /// Stop when `d_k <= tol`.
    pub tol: f64,
    pub kmax: usize,
    /// Margin `delta` of the admissible box around the data range.
    pub delta_margin: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            run: RunConfig {
                residuals: false,
                ..Default::default()
            },
            tol: 1e-12,
            kmax: 12,
            delta_margin: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardRow {
    pub k: usize,
    /// `sup_t ||z^k - z^{k-1}||_{L^2}`.
    pub d_l2: f64,
    /// `sup_t ||z^k - z^{k-1}||_{H^1}`.
    pub d_h1: f64,
    /// `d_k / d_{k-1}` for `k >= 2`.
    pub ratio: Option<f64>,
    /// `sup_t ||z^k||_{L^2}`.
    pub m_flat: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PicardReport {
    pub rows: Vec<PicardRow>,
    pub converged: bool,
    /// `sup_t` of the nonlinear residual of the final iterate.
    pub res_final: Option<f64>,
}

impl PicardReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,d_L2,d_H1,ratio,res_final\n");
        let last = self.rows.len().saturating_sub(1);
        for (n, r) in self.rows.iter().enumerate() {
            let ratio = r.ratio.map(|x| format!("{x:.6e}")).unwrap_or_default();
            let res = match (n == last, self.res_final) {
                (true, Some(v)) => format!("{v:.6e}"),
                _ => String::new(),
            };
            let _ = writeln!(out, "{},{:.6e},{:.6e},{ratio},{res}", r.k, r.d_l2, r.d_h1);
        }
        out
    }

    /// Ratios `d_{k+1} / d_k` with `k >= from`.
    pub fn ratios_from(&self, from: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.k > from)
            .filter_map(|r| r.ratio)
            .collect()
    }
}

/// Range box of the data expanded by `delta` in every component.
pub fn admissible_box(z0: &State, delta: f64) -> KBox {
    let c = z0.comps();
    let mut lo = [0.0; 6];
    let mut hi = [0.0; 6];
    for k in 0..6 {
        let (a, b) = c[k]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        lo[k] = a - delta;
        hi[k] = b + delta;
    }
    KBox { lo, hi }
}

fn diff_h1(a: &State, b: &State) -> Result<f64> {
    let (ca, cb) = (a.comps(), b.comps());
    let mut s = 0.0;
    for c in 0..6 {
        let d: Vec<f64> = ca[c].iter().zip(&cb[c]).map(|(x, y)| x - y).collect();
        let n = sobolev_norm(&ScalarField::new(a.grid(), d)?, 1)?;
        s += n * n;
    }
    Ok(s.sqrt())
}

/// Solves the nonlinear problem from physical data `z0` by Picard
/// iteration, starting from the constant-in-time extension of `z0`.
pub fn picard_solve(z0: &State, eos: &EosModel, t_end: f64, cfg: &PicardConfig) -> Result<(Trajectory, PicardReport)> {
    require_physical(z0)?;
    z0.check_finite(0.0)?;
    let g = z0.grid().clone();
    let kbox = admissible_box(z0, cfg.delta_margin);
    let y0 = p_map(z0, PDirection::ToTotal)?;

    // one time grid for all sweeps
    let static_bg = Background::Static(BackgroundFields::from_comps(&g, z0.comps()));
    let (nsteps, dt) = plan_steps(&g, &static_bg, eos, t_end, &cfg.run)?;
    let mut run = cfg.run.clone();
    run.dt = Some(dt);
    run.residuals = false;
    info!("picard: {nsteps} steps of {dt:.3e} per sweep");

    let mut bg = static_bg;
    let mut prev: Option<Trajectory> = None;
    let mut report = PicardReport::default();
    let mut growth = 0;
    for k in 1..=cfg.kmax {
        run.check_compat = k == 1 && cfg.run.check_compat;
        let ytraj = integrate(&y0, &bg, &SourceTerm::Zero, eos, t_end, &run)?;
        let mut states = Vec::with_capacity(ytraj.len());
        for (t, y) in ytraj.times.iter().zip(&ytraj.states) {
            let z = p_map(y, PDirection::ToPhysical)?;
            kbox.check(&z.comps(), *t)?;
            states.push(z);
        }
        let traj = Trajectory {
            states,
            ..ytraj
        };
        let (mut d_l2, mut d_h1, mut m_flat) = (0.0f64, 0.0f64, 0.0f64);
        for (n, z) in traj.states.iter().enumerate() {
            let zp = match &prev {
                Some(p) => &p.states[n],
                None => z0,
            };
            d_l2 = d_l2.max(z.diff_l2(zp));
            d_h1 = d_h1.max(diff_h1(z, zp)?);
            m_flat = m_flat.max(z.l2_norm());
        }
        let ratio = report.rows.last().map(|r: &PicardRow| d_l2 / r.d_l2);
        if let Some(last) = report.rows.last() {
            if d_l2 > last.d_l2 {
                growth += 1;
            } else {
                growth = 0;
            }
        }
        info!("picard k={k}: d_L2 = {d_l2:.3e}");
        report.rows.push(PicardRow {
            k,
            d_l2,
            d_h1,
            ratio,
            m_flat,
        });
        if growth >= 2 {
            return Err(Error::PicardDivergence { k, d: d_l2 });
        }
        bg = Background::table(traj.times.clone(), traj.states.iter().map(|s| s.comps()).collect())?;
        prev = Some(traj);
        if d_l2 <= cfg.tol {
            report.converged = true;
            break;
        }
    }
    let traj = prev.expect("kmax >= 1");
    if traj.len() >= 3 {
        let res = nonlinear_residual(&traj, eos)?;
        report.res_final = Some(res.iter().fold(0.0, |m, x| m.max(*x)));
    }
    Ok((traj, report))
}

/// `||nonlinear_rhs(z(t_n)) - d_t z(t_n)||_{L^2}` per snapshot, with `d_t`
/// from second-order snapshot differences.
pub fn nonlinear_residual(traj: &Trajectory, eos: &EosModel) -> Result<Vec<f64>> {
    let len = traj.len();
    if len < min_cells(1) {
        return Err(Error::InsufficientData(format!(
            "nonlinear residual needs {} snapshots, have {len}",
            min_cells(1)
        )));
    }
    let st = Stencil1d::new(len, traj.dt_snap, 1)?;
    let comps: Vec<Comps> = traj.states.iter().map(|s| s.comps()).collect();
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        let rhs = nonlinear_rhs(&traj.states[n], eos)?.comps();
        let mut sq = 0.0;
        for c in 0..6 {
            let dt: Vec<f64> = (0..rhs[c].len())
                .map(|k| st.apply_at(n, |m| comps[m][c][k]))
                .collect();
            let d: Vec<f64> = dt.iter().zip(&rhs[c]).map(|(a, b)| a - b).collect();
            let f = ScalarField::new(&traj.grid, d)?;
            sq += f.inner(&f);
        }
        out.push(sq.sqrt());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSample {
    pub t: f64,
    pub l2_divb: f64,
    pub max_bnu: f64,
}

/// `||div b||_{L^2}` and `max |b.nu|` per snapshot.
pub fn constraint_monitor(traj: &Trajectory) -> Result<Vec<ConstraintSample>> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(t, z)| {
            Ok(ConstraintSample {
                t: *t,
                l2_divb: wall_divergence(&z.b)?.l2_norm(),
                max_bnu: max_normal_trace(&z.b)?,
            })
        })
        .collect()
}
