use log::warn;

use super::diagnostics::{compute_diagnostics, DiagnosticsReport};
use super::state::{Background, Comps, PressureKind, SourceTerm, State, COMPONENTS};
use crate::discrete_calc::max_normal_trace;
use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::geometry::{DomainKind, Grid};
use crate::jet::Jet;
use crate::stencil::fornberg;

/// Ghost layer width.
pub const NG: usize = 2;

/// Reflection parity per component and axis (`-1` odd, `+1` even).
pub const PARITY: [[f64; 2]; 6] = [
    [-1.0, 1.0],
    [1.0, -1.0],
    [-1.0, 1.0],
    [1.0, -1.0],
    [1.0, 1.0],
    [1.0, 1.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CflPolicy {
    Abort,
    Warn,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub cfl: f64,
    /// Coefficient of the fourth-difference dissipation; 0 disables it.
    pub dissipation: f64,
    pub cfl_policy: CflPolicy,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            cfl: 0.45,
            dissipation: 0.02,
            cfl_policy: CflPolicy::Abort,
        }
    }
}

/// State components padded with [`NG`] ghost layers on every side.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedState {
    pub n1: usize,
    pub n2: usize,
    pub c: Comps,
    pub kind: PressureKind,
}

impl PaddedState {
    #[inline]
    pub fn stride(&self) -> usize {
        self.n2 + 2 * NG
    }

    /// Value at (possibly ghost) cell `(i, j)`, `-NG <= i < n1 + NG`.
    pub fn get(&self, comp: usize, i: isize, j: isize) -> f64 {
        let s = self.stride() as isize;
        self.c[comp][((i + NG as isize) * s + j + NG as isize) as usize]
    }

    /// Edge-midpoint trace of a component: mean of the boundary cell and
    /// its ghost.
    pub fn midpoint_trace(&self, comp: usize, axis: usize, high: bool, along: usize) -> f64 {
        let a = along as isize;
        match (axis, high) {
            (0, false) => 0.5 * (self.get(comp, -1, a) + self.get(comp, 0, a)),
            (0, true) => {
                let n = self.n1 as isize;
                0.5 * (self.get(comp, n - 1, a) + self.get(comp, n, a))
            }
            (_, false) => 0.5 * (self.get(comp, a, -1) + self.get(comp, a, 0)),
            (_, true) => {
                let n = self.n2 as isize;
                0.5 * (self.get(comp, a, n - 1) + self.get(comp, a, n))
            }
        }
    }
}

fn pad(n1: usize, n2: usize, src: &[f64], parity: [f64; 2]) -> Vec<f64> {
    let s = n2 + 2 * NG;
    let mut p = vec![0.0; (n1 + 2 * NG) * s];
    for i in 0..n1 {
        p[(i + NG) * s + NG..(i + NG) * s + NG + n2].copy_from_slice(&src[i * n2..(i + 1) * n2]);
    }
    for m in 0..NG {
        for j in NG..NG + n2 {
            p[(NG - 1 - m) * s + j] = parity[0] * p[(NG + m) * s + j];
            p[(NG + n1 + m) * s + j] = parity[0] * p[(NG + n1 - 1 - m) * s + j];
        }
    }
    for i in 0..n1 + 2 * NG {
        for m in 0..NG {
            p[i * s + NG - 1 - m] = parity[1] * p[i * s + NG + m];
            p[i * s + NG + n2 + m] = parity[1] * p[i * s + NG + n2 - 1 - m];
        }
    }
    p
}

fn require_square(g: &Grid) -> Result<()> {
    if g.kind() != DomainKind::Square {
        return Err(Error::UnsupportedDomain(
            "the linearized MHD solver runs on the square".into(),
        ));
    }
    Ok(())
}

/// Fills the ghost layers by reflection: normal components of `u` and `b`
/// odd, tangential components, `pvar` and `s` even. The interior is copied
/// unchanged.
pub fn enforce_bc(z: &State) -> Result<PaddedState> {
    let g = z.grid();
    require_square(g)?;
    let comps = z.comps();
    Ok(PaddedState {
        n1: g.n1,
        n2: g.n2,
        c: std::array::from_fn(|c| pad(g.n1, g.n2, &comps[c], PARITY[c])),
        kind: z.pvar_kind,
    })
}

/// Divergence of `b` with the scheme's own operator: centered differences
/// over the reflected ghost layers. The linearized scheme (dissipation
/// included) commutes with it, so it is the discrete constraint the solver
/// transports; one-sided stencils would not be.
pub fn wall_divergence(b: &VectorField) -> Result<ScalarField> {
    let g = b.grid().clone();
    require_square(&g)?;
    let (n1, n2) = (g.n1, g.n2);
    let s = n2 + 2 * NG;
    let p1 = pad(n1, n2, &b.c[0].values, PARITY[2]);
    let p2 = pad(n1, n2, &b.c[1].values, PARITY[3]);
    let mut out = vec![0.0; g.len()];
    for i in 0..n1 {
        for j in 0..n2 {
            let p = (i + NG) * s + j + NG;
            out[i * n2 + j] = (p1[p + s] - p1[p - s]) * 0.5 / g.h1 + (p2[p + 1] - p2[p - 1]) * 0.5 / g.h2;
        }
    }
    ScalarField::new(&g, out)
}

/// `grad^perp psi = (-d_2 psi, d_1 psi)` for a stream function vanishing on
/// the walls, with the same centered operator and odd reflection of `psi`.
/// The result has zero [`wall_divergence`] up to round-off.
pub fn wall_perp_gradient(psi: &ScalarField) -> Result<VectorField> {
    let g = psi.grid.clone();
    require_square(&g)?;
    let (n1, n2) = (g.n1, g.n2);
    let s = n2 + 2 * NG;
    let pp = pad(n1, n2, &psi.values, [-1.0, -1.0]);
    let mut a = vec![0.0; g.len()];
    let mut b = vec![0.0; g.len()];
    for i in 0..n1 {
        for j in 0..n2 {
            let p = (i + NG) * s + j + NG;
            a[i * n2 + j] = -(pp[p + 1] - pp[p - 1]) * 0.5 / g.h2;
            b[i * n2 + j] = (pp[p + s] - pp[p - s]) * 0.5 / g.h1;
        }
    }
    VectorField::cartesian(ScalarField::new(&g, a)?, ScalarField::new(&g, b)?)
}

fn pad_comps(g: &Grid, c: &Comps) -> Comps {
    std::array::from_fn(|k| pad(g.n1, g.n2, &c[k], PARITY[k]))
}

/// `R` and `Q` at every cell of a background sample.
pub fn eos_arrays(zb: &Comps, eos: &EosModel) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = zb[4].len();
    let mut r = vec![0.0; n];
    let mut q = vec![0.0; n];
    for k in 0..n {
        let (a, _, c) = eos.eval_point(zb[4][k], zb[5][k], k)?;
        r[k] = a;
        q[k] = c;
    }
    Ok((r, q))
}

/// Characteristic speed bound `max |U| + sqrt((Q + |B|^2) / R)`.
pub fn max_speed(zb: &Comps, eos: &EosModel) -> Result<f64> {
    let (r, q) = eos_arrays(zb, eos)?;
    let mut s: f64 = 0.0;
    for k in 0..r.len() {
        let uu = zb[0][k].hypot(zb[1][k]);
        let b2 = zb[2][k] * zb[2][k] + zb[3][k] * zb[3][k];
        s = s.max(uu + ((q[k] + b2) / r[k]).sqrt());
    }
    Ok(s)
}

fn check_finite(c: &Comps, t: f64) -> Result<()> {
    for (ci, v) in c.iter().enumerate() {
        if let Some(cell) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                component: COMPONENTS[ci],
                cell,
                t,
            });
        }
    }
    Ok(())
}

/// Tendency on raw arrays; `zp` is padded, `zb`, `f` are cell arrays.
fn rhs_core(
    g: &Grid,
    zp: &Comps,
    zb: &Comps,
    rq: &(Vec<f64>, Vec<f64>),
    f: Option<&Comps>,
    eps: f64,
) -> Comps {
    let (n1, n2) = (g.n1, g.n2);
    let s = n2 + 2 * NG;
    let (i2h1, i2h2) = (0.5 / g.h1, 0.5 / g.h2);
    let (e1, e2) = (eps / g.h1, eps / g.h2);
    let mut out: Comps = std::array::from_fn(|_| vec![0.0; n1 * n2]);
    let mut d1 = [0.0; 6];
    let mut d2 = [0.0; 6];
    for i in 0..n1 {
        for j in 0..n2 {
            let k = i * n2 + j;
            let p = (i + NG) * s + j + NG;
            for c in 0..6 {
                let a = &zp[c];
                d1[c] = (a[p + s] - a[p - s]) * i2h1;
                d2[c] = (a[p + 1] - a[p - 1]) * i2h2;
            }
            let (uu1, uu2, bb1, bb2) = (zb[0][k], zb[1][k], zb[2][k], zb[3][k]);
            let (r, q) = (rq.0[k], rq.1[k]);
            let fk = |c: usize| f.map_or(0.0, |f| f[c][k]);
            let adv = |c: usize| uu1 * d1[c] + uu2 * d2[c];
            let bgr = |c: usize| bb1 * d1[c] + bb2 * d2[c];
            let divu = d1[0] + d2[1];
            let ut0 = (fk(0) - d1[4] + bgr(2)) / r - adv(0);
            let ut1 = (fk(1) - d2[4] + bgr(3)) / r - adv(1);
            // h(x, .) vanishes on the square: no zero-order induction term
            let bt0 = fk(2) - adv(2) + bgr(0) - bb1 * divu;
            let bt1 = fk(3) - adv(3) + bgr(1) - bb2 * divu;
            let pt = q * (fk(4) - divu) - adv(4) + bb1 * (bt0 + adv(2)) + bb2 * (bt1 + adv(3));
            let st = fk(5) - adv(5);
            let t = [ut0, ut1, bt0, bt1, pt, st];
            for c in 0..6 {
                let mut v = t[c];
                if eps > 0.0 {
                    let a = &zp[c];
                    let x4 = a[p - 2 * s] - 4.0 * a[p - s] + 6.0 * a[p] - 4.0 * a[p + s] + a[p + 2 * s];
                    let y4 = a[p - 2] - 4.0 * a[p - 1] + 6.0 * a[p] - 4.0 * a[p + 1] + a[p + 2];
                    v -= e1 * x4 + e2 * y4;
                }
                out[c][k] = v;
            }
        }
    }
    out
}

fn require_total(z: &State) -> Result<()> {
    if z.pvar_kind != PressureKind::Total {
        return Err(Error::KindMismatch {
            expected: PressureKind::Total.name(),
            found: z.pvar_kind.name(),
        });
    }
    Ok(())
}

/// Time derivative of `z` under the linearized system with source `src`.
pub fn rhs_linear(
    z: &State,
    bg: &Background,
    src: &SourceTerm,
    eos: &EosModel,
    t: f64,
    cfg: &SchemeConfig,
) -> Result<State> {
    require_total(z)?;
    let g = z.grid().clone();
    let zp = enforce_bc(z)?;
    let zb = bg.sample_comps(&g, t)?;
    let rq = eos_arrays(&zb, eos)?;
    let f = src.sample_comps(&g, t);
    let out = rhs_core(&g, &zp.c, &zb, &rq, f.as_ref(), cfg.dissipation);
    check_finite(&out, t)?;
    Ok(State::from_comps(&g, out, PressureKind::Total))
}

/// Evaluator of the linearized right-hand side on raw arrays, caching
/// nothing between calls.
struct Stepper<'a> {
    g: &'a Grid,
    bg: &'a Background,
    src: &'a SourceTerm,
    eos: &'a EosModel,
    eps: f64,
}

impl Stepper<'_> {
    fn rhs(&self, z: &Comps, t: f64) -> Result<Comps> {
        let zp = pad_comps(self.g, z);
        let zb = self.bg.sample_comps(self.g, t)?;
        let rq = eos_arrays(&zb, self.eos)?;
        let f = self.src.sample_comps(self.g, t);
        let out = rhs_core(self.g, &zp, &zb, &rq, f.as_ref(), self.eps);
        check_finite(&out, t)?;
        Ok(out)
    }

    /// Shu-Osher SSP-RK3.
    fn step(&self, z: &Comps, t: f64, dt: f64) -> Result<Comps> {
        let l0 = self.rhs(z, t)?;
        let z1: Comps = std::array::from_fn(|c| {
            z[c].iter().zip(&l0[c]).map(|(a, l)| a + dt * l).collect()
        });
        let l1 = self.rhs(&z1, t + dt)?;
        let z2: Comps = std::array::from_fn(|c| {
            (0..z[c].len())
                .map(|k| 0.75 * z[c][k] + 0.25 * (z1[c][k] + dt * l1[c][k]))
                .collect()
        });
        let l2 = self.rhs(&z2, t + 0.5 * dt)?;
        let out: Comps = std::array::from_fn(|c| {
            (0..z[c].len())
                .map(|k| z[c][k] / 3.0 + 2.0 / 3.0 * (z2[c][k] + dt * l2[c][k]))
                .collect()
        });
        check_finite(&out, t + dt)?;
        Ok(out)
    }
}

/// Largest stable step `cfl * h / S_p` for the background at time `t`.
pub fn dt_limit(g: &Grid, bg: &Background, eos: &EosModel, t: f64, cfl: f64) -> Result<f64> {
    let sp = max_speed(&bg.sample_comps(g, t)?, eos)?;
    Ok(cfl * g.h1.min(g.h2) / sp.max(f64::MIN_POSITIVE))
}

/// One SSP-RK3 step with reflection ghosts refreshed at every stage.
pub fn step(
    z: &State,
    dt: f64,
    bg: &Background,
    src: &SourceTerm,
    eos: &EosModel,
    t: f64,
    cfg: &SchemeConfig,
) -> Result<State> {
    require_total(z)?;
    let g = z.grid().clone();
    require_square(&g)?;
    let limit = dt_limit(&g, bg, eos, t, cfg.cfl)?;
    if dt > limit * (1.0 + 1e-12) {
        match cfg.cfl_policy {
            CflPolicy::Abort => return Err(Error::Cfl { dt, limit }),
            CflPolicy::Warn => warn!("dt = {dt:.3e} exceeds the CFL limit {limit:.3e}"),
        }
    }
    let st = Stepper {
        g: &g,
        bg,
        src,
        eos,
        eps: cfg.dissipation,
    };
    let out = st.step(&z.comps(), t, dt)?;
    Ok(State::from_comps(&g, out, PressureKind::Total))
}

/// Stored snapshots of a run at uniform spacing `dt_snap`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// Time step of the integrator.
    pub dt: f64,
    pub dt_snap: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory is never empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: SchemeConfig,
    /// Snapshot every this many steps.
    pub output_every: usize,
    /// Run the order 0-1 compatibility check before stepping.
    pub check_compat: bool,
    /// Compatibility tolerance; `10 h^2` when `None`.
    pub compat_tol: Option<f64>,
    /// Compute the transport and curl-system residuals.
    pub residuals: bool,
    /// Orders `m` of the monitored time-slice norms (square only).
    pub star_orders: Vec<usize>,
    /// Time step override; must satisfy the CFL limit.
    pub dt: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheme: SchemeConfig::default(),
            output_every: 1,
            check_compat: true,
            compat_tol: None,
            residuals: true,
            star_orders: Vec::new(),
            dt: None,
        }
    }
}

/// Step count and step size landing exactly on `t_end`.
pub fn plan_steps(g: &Grid, bg: &Background, eos: &EosModel, t_end: f64, cfg: &RunConfig) -> Result<(usize, f64)> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad final time {t_end}")));
    }
    let mut limit = f64::INFINITY;
    for t in [0.0, 0.5 * t_end, t_end] {
        limit = limit.min(dt_limit(g, bg, eos, t, cfg.scheme.cfl)?);
    }
    let target = match cfg.dt {
        Some(dt) => {
            if dt > limit * (1.0 + 1e-12) && cfg.scheme.cfl_policy == CflPolicy::Abort {
                return Err(Error::Cfl { dt, limit });
            }
            dt
        }
        None => limit,
    };
    if t_end == 0.0 {
        return Ok((0, target));
    }
    let n = (t_end / target).ceil() as usize;
    let every = snapshot_every(cfg, n);
    let n = n.div_ceil(every) * every;
    Ok((n, t_end / n as f64))
}

/// Snapshot interval in steps; an interval longer than the run keeps only
/// the end points.
fn snapshot_every(cfg: &RunConfig, nsteps: usize) -> usize {
    cfg.output_every.clamp(1, nsteps.max(1))
}

/// Integrates from `z0` to `t_end` and evaluates the diagnostics at every
/// snapshot.
pub fn run_linear(
    z0: &State,
    bg: &Background,
    src: &SourceTerm,
    eos: &EosModel,
    t_end: f64,
    cfg: &RunConfig,
) -> Result<(Trajectory, DiagnosticsReport)> {
    let traj = integrate(z0, bg, src, eos, t_end, cfg)?;
    let report = compute_diagnostics(&traj, bg, src, eos, cfg)?;
    Ok((traj, report))
}

/// The time loop of [`run_linear`] without diagnostics.
pub fn integrate(
    z0: &State,
    bg: &Background,
    src: &SourceTerm,
    eos: &EosModel,
    t_end: f64,
    cfg: &RunConfig,
) -> Result<Trajectory> {
    require_total(z0)?;
    let g = z0.grid().clone();
    require_square(&g)?;
    z0.check_finite(0.0)?;
    if cfg.check_compat {
        let rep = compatibility_check(z0, src, bg, eos, cfg.compat_tol)?;
        rep.require()?;
    }
    let (nsteps, dt) = plan_steps(&g, bg, eos, t_end, cfg)?;
    let every = snapshot_every(cfg, nsteps);
    let st = Stepper {
        g: &g,
        bg,
        src,
        eos,
        eps: cfg.scheme.dissipation,
    };
    let mut z = z0.comps();
    let mut times = vec![0.0];
    let mut states = vec![z0.clone()];
    for n in 0..nsteps {
        let t = n as f64 * dt;
        z = st.step(&z, t, dt)?;
        if (n + 1) % every == 0 {
            times.push((n + 1) as f64 * dt);
            states.push(State::from_comps(&g, z.clone(), PressureKind::Total));
        }
    }
    Ok(Trajectory {
        grid: g,
        times,
        states,
        dt,
        dt_snap: dt * every as f64,
    })
}

/// Result of the order 0 and order 1 compatibility checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatReport {
    /// `max |u0.nu|` on the boundary.
    pub order0_u: f64,
    /// `max |b0.nu|` on the boundary.
    pub order0_b: f64,
    /// `max |d_t u(0).nu|` from the momentum row.
    pub order1: f64,
    pub tol: f64,
}

impl CompatReport {
    pub fn pass0(&self) -> bool {
        self.order0_u <= self.tol && self.order0_b <= self.tol
    }

    pub fn pass1(&self) -> bool {
        self.order1 <= self.tol
    }

    /// Converts a failure into a precondition error naming order and size.
    pub fn require(&self) -> Result<()> {
        if !self.pass0() {
            return Err(Error::Precondition {
                detail: "compatibility order 0 (u0.nu, b0.nu)".into(),
                value: self.order0_u.max(self.order0_b),
                tol: self.tol,
            });
        }
        if !self.pass1() {
            return Err(Error::Precondition {
                detail: "compatibility order 1 (d_t u(0).nu)".into(),
                value: self.order1,
                tol: self.tol,
            });
        }
        Ok(())
    }
}

/// Boundary traces of the data and of the initial momentum tendency.
pub fn compatibility_check(
    z0: &State,
    src: &SourceTerm,
    bg: &Background,
    eos: &EosModel,
    tol: Option<f64>,
) -> Result<CompatReport> {
    require_total(z0)?;
    let g = z0.grid().clone();
    require_square(&g)?;
    let h = g.h1.max(g.h2);
    let tol = tol.unwrap_or(10.0 * h * h);
    let order0_u = max_normal_trace(&z0.u)?;
    let order0_b = max_normal_trace(&z0.b)?;
    let zb = bg.sample_comps(&g, 0.0)?;
    let (r, _) = eos_arrays(&zb, eos)?;
    let f = src.sample_or_zero(&g, 0.0);
    let mut dd = Vec::new();
    for c in [0, 1, 2, 3, 4] {
        dd.push([diff4(z0.comp(c), 0)?, diff4(z0.comp(c), 1)?]);
    }
    let mut ut = [vec![0.0; g.len()], vec![0.0; g.len()]];
    for k in 0..g.len() {
        let (uu, bb) = ([zb[0][k], zb[1][k]], [zb[2][k], zb[3][k]]);
        for i in 0..2 {
            let grad = |c: usize, v: [f64; 2]| v[0] * dd[c][0][k] + v[1] * dd[c][1][k];
            ut[i][k] = (f[i][k] - dd[4][i][k] + grad(2 + i, bb)) / r[k] - grad(i, uu);
        }
    }
    Ok(CompatReport {
        order0_u,
        order0_b,
        order1: max_wall_trace4(&g, &ut),
        tol,
    })
}

/// Fourth-order first derivative along `axis` (5-point, shifted near walls).
/// The order-1 check measures a quantity that vanishes for compatible data,
/// so its truncation error must sit well below the `O(h^2)` tolerance.
fn diff4(f: &ScalarField, axis: usize) -> Result<Vec<f64>> {
    let g = &f.grid;
    let (n, h) = if axis == 0 { (g.n1, g.h1) } else { (g.n2, g.h2) };
    if n < 5 {
        return Err(Error::StencilTooWide { needed: 5, have: n });
    }
    let rows: Vec<(usize, Vec<f64>)> = (0..n)
        .map(|i| {
            let start = i.saturating_sub(2).min(n - 5);
            let xs: Vec<f64> = (0..5).map(|m| (start + m) as f64 - i as f64).collect();
            (start, fornberg(0.0, &xs, 1)[1].iter().map(|w| w / h).collect())
        })
        .collect();
    let mut out = vec![0.0; g.len()];
    for i in 0..g.n1 {
        for j in 0..g.n2 {
            let (pos, other) = if axis == 0 { (i, j) } else { (j, i) };
            let (start, w) = &rows[pos];
            out[i * g.n2 + j] = w
                .iter()
                .enumerate()
                .map(|(m, c)| {
                    let q = start + m;
                    let k = if axis == 0 { q * g.n2 + other } else { other * g.n2 + q };
                    c * f.values[k]
                })
                .sum::<f64>();
        }
    }
    Ok(out)
}

/// `max |v.nu|` over the square's walls by quartic extrapolation from the
/// five nearest cells.
fn max_wall_trace4(g: &Grid, v: &[Vec<f64>; 2]) -> f64 {
    let xs = [0.5, 1.5, 2.5, 3.5, 4.5];
    let w = fornberg(0.0, &xs, 0).swap_remove(0);
    let ext = |get: &dyn Fn(usize) -> f64| w.iter().enumerate().map(|(m, c)| c * get(m)).sum::<f64>();
    let (n1, n2) = (g.n1, g.n2);
    let mut worst = 0.0f64;
    for j in 0..n2 {
        worst = worst.max(ext(&|m| v[0][m * n2 + j]).abs());
        worst = worst.max(ext(&|m| v[0][(n1 - 1 - m) * n2 + j]).abs());
    }
    for i in 0..n1 {
        worst = worst.max(ext(&|m| v[1][i * n2 + m]).abs());
        worst = worst.max(ext(&|m| v[1][i * n2 + n2 - 1 - m]).abs());
    }
    worst
}

/// `L(Z) z` at a point from exact derivatives of `z` (jets of
/// `u1, u2, b1, b2, pvar, s`) and the background value `zb`.
///
/// Used to build manufactured sources: `F = L(Z) z*`.
pub fn linear_operator(z: &[Jet; 6], zb: [f64; 6], eos: &EosModel) -> Result<[f64; 6]> {
    let (r, _, q) = eos.eval_point(zb[4], zb[5], 0)?;
    let (uu, bb) = ([zb[0], zb[1]], [zb[2], zb[3]]);
    let adv = |c: usize| uu[0] * z[c].dx(0) + uu[1] * z[c].dx(1);
    let bgr = |c: usize| bb[0] * z[c].dx(0) + bb[1] * z[c].dx(1);
    let divu = z[0].dx(0) + z[1].dx(1);
    let dtb = [z[2].dt() + adv(2), z[3].dt() + adv(3)];
    Ok([
        r * (z[0].dt() + adv(0)) + z[4].dx(0) - bgr(2),
        r * (z[1].dt() + adv(1)) + z[4].dx(1) - bgr(3),
        dtb[0] - bgr(0) + bb[0] * divu,
        dtb[1] - bgr(1) + bb[1] * divu,
        (z[4].dt() + adv(4) - bb[0] * dtb[0] - bb[1] * dtb[1]) / q + divu,
        z[5].dt() + adv(5),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_grid, DomainSpec};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        make_grid(DomainSpec::unit_square(), n, n).unwrap()
    }

    fn acoustic() -> (Background, EosModel) {
        // affine with epsilon = 1, p = 0: R = Q = 1
        (Background::constant([0.0; 6]), EosModel::affine(1.0).unwrap())
    }

    #[test]
    fn ghosts_reflect_with_parity() {
        let g = grid(6);
        let z = State::from_fn(&g, PressureKind::Total, |x| [x[0], x[1], 1.0, 2.0, 3.0 + x[0], 4.0]);
        let p = enforce_bc(&z).unwrap();
        for j in 0..6 {
            // odd normal component: midpoint trace vanishes exactly
            assert_eq!(p.midpoint_trace(0, 0, false, j), 0.0);
            assert_eq!(p.midpoint_trace(0, 0, true, j) + p.get(0, 5, j as isize), p.get(0, 5, j as isize));
            assert_eq!(p.get(4, -1, j as isize), p.get(4, 0, j as isize));
            assert_eq!(p.get(4, -2, j as isize), p.get(4, 1, j as isize));
        }
        for i in 0..6 {
            assert_eq!(p.midpoint_trace(1, 1, true, i), 0.0);
        }
    }

    #[test]
    fn zero_state_has_zero_tendency() {
        let g = grid(8);
        let (bg, eos) = acoustic();
        let z = State::zeros(&g, PressureKind::Total);
        let r = rhs_linear(&z, &bg, &SourceTerm::Zero, &eos, 0.0, &SchemeConfig::default()).unwrap();
        assert_eq!(r.l2_norm(), 0.0);
    }

    #[test]
    fn acoustic_reduction() {
        let g = grid(32);
        let (bg, eos) = acoustic();
        let z = State::from_fn(&g, PressureKind::Total, |x| {
            let (s1, c1) = (PI * x[0]).sin_cos();
            let (s2, c2) = (PI * x[1]).sin_cos();
            [s1 * c2, c1 * s2, 0.3 * s1 * c2, 0.0, c1 * c2, 0.0]
        });
        let cfg = SchemeConfig {
            dissipation: 0.0,
            ..Default::default()
        };
        let r = rhs_linear(&z, &bg, &SourceTerm::Zero, &eos, 0.0, &cfg).unwrap();
        // u_t = -grad p, p_t = -div u, b_t = 0
        let k = g.idx(10, 20);
        let x = g.cartesian(10, 20);
        let (s1, c1) = (PI * x[0]).sin_cos();
        let c2 = (PI * x[1]).cos();
        assert_abs_diff_eq!(r.u.c[0].values[k], PI * s1 * c2, epsilon = 1e-2);
        assert_abs_diff_eq!(r.pvar.values[k], -2.0 * PI * c1 * c2, epsilon = 2e-2);
        assert_eq!(r.b.c[0].values[k], 0.0);
    }

    #[test]
    fn cfl_violation_aborts() {
        let g = grid(16);
        let (bg, eos) = acoustic();
        let z = State::zeros(&g, PressureKind::Total);
        let err = step(&z, 1.0, &bg, &SourceTerm::Zero, &eos, 0.0, &SchemeConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Cfl { .. }));
    }

    #[test]
    fn nan_is_reported_with_cell() {
        let g = grid(8);
        let (bg, eos) = acoustic();
        let mut z = State::zeros(&g, PressureKind::Total);
        z.pvar.values[17] = f64::NAN;
        let err = rhs_linear(&z, &bg, &SourceTerm::Zero, &eos, 0.0, &SchemeConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn physical_pressure_is_rejected() {
        let g = grid(8);
        let (bg, eos) = acoustic();
        let z = State::zeros(&g, PressureKind::Physical);
        assert!(matches!(
            rhs_linear(&z, &bg, &SourceTerm::Zero, &eos, 0.0, &SchemeConfig::default()),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn compatibility_examples() {
        let g = grid(32);
        let (bg, eos) = acoustic();
        let ok = State::from_fn(&g, PressureKind::Total, |x| {
            let (s1, c1) = (PI * x[0]).sin_cos();
            let (s2, c2) = (PI * x[1]).sin_cos();
            [PI * s1 * c2, -PI * c1 * s2, 0.0, 0.0, 0.0, 0.0]
        });
        let rep = compatibility_check(&ok, &SourceTerm::Zero, &bg, &eos, None).unwrap();
        assert!(rep.pass0() && rep.pass1());
        let bad = State::from_fn(&g, PressureKind::Total, |x| [x[1], 0.0, 0.0, 0.0, 0.0, 0.0]);
        let rep = compatibility_check(&bad, &SourceTerm::Zero, &bg, &eos, None).unwrap();
        assert!(!rep.pass0());
        // grad p with a normal trace: order 1 fails with |d_nu p| / R = 1
        let p1 = State::from_fn(&g, PressureKind::Total, |x| [0.0, 0.0, 0.0, 0.0, x[0], 0.0]);
        let rep = compatibility_check(&p1, &SourceTerm::Zero, &bg, &eos, None).unwrap();
        assert!(rep.pass0() && !rep.pass1());
        assert_abs_diff_eq!(rep.order1, 1.0, epsilon = 1e-10);
    }
}
