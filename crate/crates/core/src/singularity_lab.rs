//! Corner-singularity counterexamples on sectors.
//!
//! With `f` harmonic up to a smooth remainder and `d_theta f = 0` on both
//! legs, `pvar = t f`, `u = -t^2 grad f / 2` solve the acoustic problem
//!
//! `u_t + grad pvar = 0`, `pvar_t + div u = f - t^2 lap f / 2`, `u.nu = 0`
//!
//! from zero data. Three families:
//!
//! * A: `pi / omega = n >= 3`,
//!   `f = r^n (ln r cos n theta - theta sin n theta) - lambda x2^n`
//! * B: `omega = pi / 2`,
//!   `f = r^4 (ln r cos 4 theta - theta sin 4 theta) - 2 pi x1 x2^3`
//! * C: `pi / omega` not an integer, `f = r^(pi/omega) cos(pi theta / omega)`

use std::f64::consts::PI;
use std::fmt::Write as _;

use log::{debug, info};
use num_complex::Complex64;

use crate::discrete_calc::{least_squares, sobolev_norm_vec};
use crate::error::{Error, Result};
use crate::field::{Basis, ScalarField, VectorField};
use crate::geometry::{make_grid, DomainKind, DomainSpec, Grid};

/// Default log-fit window, as fractions of `r0`.
pub const FIT_WINDOW: (f64, f64) = (0.05, 0.4);
/// Minimum samples for an exponent fit.
pub const FIT_MIN_SAMPLES: usize = 8;
/// Growth rate per refinement above which a norm scan is divergent.
pub const DIVERGENCE_RATE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// `pi / omega = n >= 3`.
    A,
    /// `omega = pi / 2`.
    B,
    /// `pi / omega` not an integer.
    C,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::A => "A",
            CaseKind::B => "B",
            CaseKind::C => "C",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleSpec {
    pub case: CaseKind,
    pub omega: f64,
    pub r0: f64,
    /// `pi / omega` for cases A and B.
    pub n: Option<u32>,
    /// Case A only.
    pub lambda: Option<f64>,
}

impl CounterexampleSpec {
    /// Classifies `omega` into its case.
    pub fn new(omega: f64, r0: f64) -> Result<Self> {
        DomainSpec::sector(omega, r0)?;
        let q = PI / omega;
        let n = q.round();
        if (q - n).abs() > 1e-9 {
            return Ok(CounterexampleSpec {
                case: CaseKind::C,
                omega,
                r0,
                n: None,
                lambda: None,
            });
        }
        let n = n as u32;
        match n {
            2 => Ok(CounterexampleSpec {
                case: CaseKind::B,
                omega: PI / 2.0,
                r0,
                n: Some(2),
                lambda: None,
            }),
            n if n >= 3 => {
                let w = PI / n as f64;
                let lambda = PI / (n as f64 * w.sin().powi(n as i32 - 1) * w.cos());
                Ok(CounterexampleSpec {
                    case: CaseKind::A,
                    omega: w,
                    r0,
                    n: Some(n),
                    lambda: Some(lambda),
                })
            }
            _ => Err(Error::InvalidDomain(format!("omega = {omega} is not convex"))),
        }
    }

    pub fn domain(&self) -> DomainSpec {
        DomainSpec {
            kind: DomainKind::Sector,
            delta: 1.0,
            omega: self.omega,
            r0: self.r0,
        }
    }

    /// Predicted exponent of `|grad f|` at the corner (case C).
    pub fn predicted_exponent(&self) -> f64 {
        PI / self.omega - 1.0
    }

    /// `(f, grad f, hess f)` at a Cartesian point.
    pub fn eval(&self, x: [f64; 2]) -> (f64, [f64; 2], [[f64; 2]; 2]) {
        let z = Complex64::new(x[0], x[1]);
        // f = Re g + poly with g analytic: grad Re g = (Re g', -Im g')
        let (g, g1, g2) = match self.case {
            CaseKind::A | CaseKind::B => {
                let n = if self.case == CaseKind::A { self.n.unwrap_or(3) as i32 } else { 4 };
                let nf = n as f64;
                let lz = z.ln();
                let zn2 = z.powi(n - 2);
                let g = zn2 * z * z * lz;
                let g1 = zn2 * z * (nf * lz + 1.0);
                let g2 = zn2 * (nf * (nf - 1.0) * lz + (2.0 * nf - 1.0));
                (g, g1, g2)
            }
            CaseKind::C => {
                let a = PI / self.omega;
                let g = z.powf(a);
                let g1 = a * z.powf(a - 1.0);
                let g2 = a * (a - 1.0) * z.powf(a - 2.0);
                (g, g1, g2)
            }
        };
        let mut f = g.re;
        let mut d = [g1.re, -g1.im];
        let mut h = [[g2.re, -g2.im], [-g2.im, -g2.re]];
        let (x1, x2) = (x[0], x[1]);
        match self.case {
            CaseKind::A => {
                let n = self.n.unwrap_or(3) as i32;
                let nf = n as f64;
                let l = self.lambda.unwrap_or(0.0);
                f -= l * x2.powi(n);
                d[1] -= l * nf * x2.powi(n - 1);
                h[1][1] -= l * nf * (nf - 1.0) * x2.powi(n - 2);
            }
            CaseKind::B => {
                f -= 2.0 * PI * x1 * x2.powi(3);
                d[0] -= 2.0 * PI * x2.powi(3);
                d[1] -= 6.0 * PI * x1 * x2 * x2;
                h[0][1] -= 6.0 * PI * x2 * x2;
                h[1][0] -= 6.0 * PI * x2 * x2;
                h[1][1] -= 12.0 * PI * x1 * x2;
            }
            CaseKind::C => {}
        }
        (f, d, h)
    }

    /// Closed-form `lap f`.
    pub fn laplacian(&self, x: [f64; 2]) -> f64 {
        match self.case {
            CaseKind::A => {
                let n = self.n.unwrap_or(3) as i32;
                -(n * (n - 1)) as f64 * self.lambda.unwrap_or(0.0) * x[1].powi(n - 2)
            }
            CaseKind::B => -12.0 * PI * x[0] * x[1],
            CaseKind::C => 0.0,
        }
    }

    /// Right-hand side of the pressure equation.
    pub fn source(&self, t: f64, x: [f64; 2]) -> f64 {
        let f = self.eval(x).0;
        match self.case {
            CaseKind::C => f,
            _ => f - 0.5 * t * t * self.laplacian(x),
        }
    }

    /// Exact `(u, pvar)`, `u` Cartesian.
    pub fn exact(&self, t: f64, x: [f64; 2]) -> ([f64; 2], f64) {
        let (f, d, _) = self.eval(x);
        let c = -0.5 * t * t;
        ([c * d[0], c * d[1]], t * f)
    }

    /// Pointwise residual of both equations, computed from the Hessian
    /// rather than the closed-form Laplacian.
    pub fn residual(&self, t: f64, x: [f64; 2]) -> [f64; 3] {
        let (f, d, h) = self.eval(x);
        // u_t = -t grad f, grad pvar = t grad f
        let r1 = -t * d[0] + t * d[0];
        let r2 = -t * d[1] + t * d[1];
        let divu = -0.5 * t * t * (h[0][0] + h[1][1]);
        let r3 = f + divu - self.source(t, x);
        [r1, r2, r3]
    }

    fn check_grid(&self, g: &Grid) -> Result<()> {
        let s = g.domain;
        if s.kind != DomainKind::Sector || (s.omega - self.omega).abs() > 1e-12 || (s.r0 - self.r0).abs() > 1e-12 {
            return Err(Error::UnsupportedDomain(format!(
                "grid {} omega={} r0={} does not match case {} omega={} r0={}",
                s.kind,
                s.omega,
                s.r0,
                self.case.name(),
                self.omega,
                self.r0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleField {
    pub f: ScalarField,
    pub source: ScalarField,
    pub u_exact: VectorField,
    pub p_exact: ScalarField,
    pub laplacian: ScalarField,
}

/// Samples the case fields at time `t` on cell centers.
pub fn counterexample_field(spec: &CounterexampleSpec, t: f64, grid: &Grid) -> Result<CounterexampleField> {
    spec.check_grid(grid)?;
    let f = ScalarField::from_fn(grid, |x| spec.eval(x).0);
    let source = ScalarField::from_fn(grid, |x| spec.source(t, x));
    let u_exact = VectorField::from_fn(grid, |x| spec.exact(t, x).0);
    let p_exact = ScalarField::from_fn(grid, |x| spec.exact(t, x).1);
    let laplacian = ScalarField::from_fn(grid, |x| spec.laplacian(x));
    Ok(CounterexampleField {
        f,
        source,
        u_exact,
        p_exact,
        laplacian,
    })
}

/// Outer-arc treatment of the acoustic solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcCondition {
    /// `u_r = 0`.
    Wall,
    /// `u_r` from the exact solution of the case.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticConfig {
    pub cfl: f64,
    /// Fixed step; checked against the CFL limit.
    pub dt: Option<f64>,
    pub output_every: usize,
    pub arc: ArcCondition,
    pub initial_p: Option<ScalarField>,
}

impl Default for AcousticConfig {
    fn default() -> Self {
        AcousticConfig {
            cfl: 0.45,
            dt: None,
            output_every: 1,
            arc: ArcCondition::Exact,
            initial_p: None,
        }
    }
}

/// Snapshots of the acoustic run; `u` is averaged to cells, polar basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticTrajectory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub u: Vec<VectorField>,
    pub p: Vec<ScalarField>,
    /// Discrete energy `sum |u|^2 + pvar^2` on the staggered unknowns.
    pub energy: Vec<f64>,
    pub dt: f64,
}

/// Staggered polar unknowns: `pvar` at cells, `u_r` on radial faces
/// `r = i h_r`, `u_theta` on angular faces `theta = j h_theta`.
#[derive(Clone)]
struct Stag {
    p: Vec<f64>,
    ur: Vec<f64>,
    ut: Vec<f64>,
}

impl Stag {
    fn zeros(n1: usize, n2: usize) -> Self {
        Stag {
            p: vec![0.0; n1 * n2],
            ur: vec![0.0; (n1 + 1) * n2],
            ut: vec![0.0; n1 * (n2 + 1)],
        }
    }

    fn axpy(&self, a: f64, o: &Stag, b: f64) -> Stag {
        let f = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(x, y)| a * x + b * y).collect();
        Stag {
            p: f(&self.p, &o.p),
            ur: f(&self.ur, &o.ur),
            ut: f(&self.ut, &o.ut),
        }
    }
}

enum Forcing<'a> {
    /// Case source `f - t^2 lap f / 2` from cached `f` and `lap f`.
    Case { f: Vec<f64>, lap: Vec<f64>, harmonic: bool },
    Custom(&'a dyn Fn(f64, [f64; 2]) -> f64),
}

struct Acoustic<'a> {
    g: &'a Grid,
    spec: &'a CounterexampleSpec,
    forcing: Forcing<'a>,
    arc: ArcCondition,
}

impl Acoustic<'_> {
    fn arc_values(&self, t: f64, ur: &mut [f64]) {
        let g = self.g;
        let (n1, n2) = (g.n1, g.n2);
        for j in 0..n2 {
            ur[n1 * n2 + j] = match self.arc {
                ArcCondition::Wall => 0.0,
                ArcCondition::Exact => {
                    let th = g.coord2(j);
                    let (s, c) = th.sin_cos();
                    let (u, _) = self.spec.exact(t, [g.domain.r0 * c, g.domain.r0 * s]);
                    c * u[0] + s * u[1]
                }
            };
        }
    }

    fn rhs(&self, t: f64, z: &mut Stag) -> Stag {
        let g = self.g;
        let (n1, n2, h, ht) = (g.n1, g.n2, g.h1, g.h2);
        self.arc_values(t, &mut z.ur);
        let mut out = Stag::zeros(n1, n2);
        for i in 1..n1 {
            for j in 0..n2 {
                out.ur[i * n2 + j] = -(z.p[i * n2 + j] - z.p[(i - 1) * n2 + j]) / h;
            }
        }
        for i in 0..n1 {
            let r = g.coord1(i);
            for j in 1..n2 {
                out.ut[i * (n2 + 1) + j] = -(z.p[i * n2 + j] - z.p[i * n2 + j - 1]) / (r * ht);
            }
        }
        for i in 0..n1 {
            let r = g.coord1(i);
            let (rm, rp) = (i as f64 * h, (i + 1) as f64 * h);
            for j in 0..n2 {
                let k = i * n2 + j;
                let div = (rp * z.ur[(i + 1) * n2 + j] - rm * z.ur[k]) / (r * h)
                    + (z.ut[i * (n2 + 1) + j + 1] - z.ut[i * (n2 + 1) + j]) / (r * ht);
                let src = match &self.forcing {
                    Forcing::Case { f, harmonic: true, .. } => f[k],
                    Forcing::Case { f, lap, .. } => f[k] - 0.5 * t * t * lap[k],
                    Forcing::Custom(s) => s(t, g.cartesian(i, j)),
                };
                out.p[k] = src - div;
            }
        }
        out
    }

    fn energy(&self, z: &Stag) -> f64 {
        let g = self.g;
        let (n1, n2, h, ht) = (g.n1, g.n2, g.h1, g.h2);
        let mut e = 0.0;
        for i in 0..n1 {
            let a = g.cell_area(i);
            for j in 0..n2 {
                e += a * z.p[i * n2 + j].powi(2);
            }
            for j in 0..=n2 {
                e += a * z.ut[i * (n2 + 1) + j].powi(2);
            }
        }
        for i in 1..=n1 {
            let w = if i == n1 { 0.5 } else { 1.0 };
            for j in 0..n2 {
                e += w * i as f64 * h * h * ht * z.ur[i * n2 + j].powi(2);
            }
        }
        e
    }

    fn cells(&self, z: &Stag) -> Result<(VectorField, ScalarField)> {
        let g = self.g;
        let (n1, n2) = (g.n1, g.n2);
        let ur = ScalarField::from_index_fn(g, |i, j| 0.5 * (z.ur[i * n2 + j] + z.ur[(i + 1) * n2 + j]));
        let ut = ScalarField::from_index_fn(g, |i, j| 0.5 * (z.ut[i * (n2 + 1) + j] + z.ut[i * (n2 + 1) + j + 1]));
        let p = ScalarField::new(g, z.p.clone())?;
        debug_assert_eq!(p.values.len(), n1 * n2);
        Ok((VectorField::new(ur, ut, Basis::Polar)?, p))
    }
}

/// Wave-speed-one CFL limit on a polar grid.
pub fn acoustic_dt_limit(g: &Grid, cfl: f64) -> f64 {
    cfl * g.min_spacing()
}

/// Evolves `(u, pvar)` from zero data (or `cfg.initial_p`) with SSP-RK3 on
/// a staggered polar grid. Without `source` the case's own source is used;
/// an override forces a wall arc.
pub fn acoustic_sector_run(
    spec: &CounterexampleSpec,
    source: Option<&dyn Fn(f64, [f64; 2]) -> f64>,
    t_end: f64,
    grid: &Grid,
    cfg: &AcousticConfig,
) -> Result<AcousticTrajectory> {
    spec.check_grid(grid)?;
    if !(t_end > 0.0) || cfg.output_every == 0 {
        return Err(Error::InvalidArgument(format!(
            "need t_end > 0 and output_every >= 1, got {t_end} and {}",
            cfg.output_every
        )));
    }
    let (forcing, arc) = match source {
        Some(s) => (Forcing::Custom(s), ArcCondition::Wall),
        None => {
            let f = ScalarField::from_fn(grid, |x| spec.eval(x).0).values;
            let lap = ScalarField::from_fn(grid, |x| spec.laplacian(x)).values;
            let harmonic = spec.case == CaseKind::C;
            (Forcing::Case { f, lap, harmonic }, cfg.arc)
        }
    };
    let op = Acoustic {
        g: grid,
        spec,
        forcing,
        arc,
    };
    let limit = acoustic_dt_limit(grid, cfg.cfl);
    let (nsteps, dt) = match cfg.dt {
        Some(dt) if dt > limit => return Err(Error::Cfl { dt, limit }),
        Some(dt) => ((t_end / dt).round().max(1.0) as usize, dt),
        None => {
            let n = (t_end / limit).ceil() as usize;
            (n, t_end / n as f64)
        }
    };
    info!("acoustic run: {} x {} cells, {nsteps} steps of {dt:.3e}", grid.n1, grid.n2);
    let mut z = Stag::zeros(grid.n1, grid.n2);
    if let Some(p0) = &cfg.initial_p {
        p0.same_grid(&ScalarField::zeros(grid))?;
        z.p = p0.values.clone();
    }
    op.arc_values(0.0, &mut z.ur);
    let mut traj = AcousticTrajectory {
        grid: grid.clone(),
        times: Vec::new(),
        u: Vec::new(),
        p: Vec::new(),
        energy: Vec::new(),
        dt,
    };
    let record = |t: f64, z: &Stag, traj: &mut AcousticTrajectory| -> Result<()> {
        let (u, p) = op.cells(z)?;
        if let Some(cell) = p.first_nonfinite() {
            return Err(Error::NonFinite {
                component: "p",
                cell,
                t,
            });
        }
        traj.times.push(t);
        traj.u.push(u);
        traj.p.push(p);
        traj.energy.push(op.energy(z));
        Ok(())
    };
    record(0.0, &z, &mut traj)?;
    for n in 0..nsteps {
        let t = n as f64 * dt;
        let k1 = op.rhs(t, &mut z);
        let mut y1 = z.axpy(1.0, &k1, dt);
        let k2 = op.rhs(t + dt, &mut y1);
        let mut y2 = z.axpy(0.75, &y1.axpy(1.0, &k2, dt), 0.25);
        let k3 = op.rhs(t + 0.5 * dt, &mut y2);
        z = z.axpy(1.0 / 3.0, &y2.axpy(1.0, &k3, dt), 2.0 / 3.0);
        let tn = (n + 1) as f64 * dt;
        op.arc_values(tn, &mut z.ur);
        if (n + 1) % cfg.output_every == 0 || n + 1 == nsteps {
            record(tn, &z, &mut traj)?;
        }
    }
    Ok(traj)
}

/// Relative `L^2` error of `(u, pvar)` against the exact solution over the
/// annulus `window.0 r0 <= r <= window.1 r0`.
pub fn annulus_error(
    spec: &CounterexampleSpec,
    traj: &AcousticTrajectory,
    snapshot: usize,
    window: (f64, f64),
) -> Result<f64> {
    let g = &traj.grid;
    let t = traj.times[snapshot];
    let u = traj.u[snapshot].to_cartesian()?;
    let p = &traj.p[snapshot];
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..g.n1 {
        let r = g.coord1(i) / g.domain.r0;
        if r < window.0 || r > window.1 {
            continue;
        }
        let a = g.cell_area(i);
        for j in 0..g.n2 {
            let k = g.idx(i, j);
            let (ue, pe) = spec.exact(t, g.cartesian(i, j));
            let uv = u.at(k);
            num += a * ((uv[0] - ue[0]).powi(2) + (uv[1] - ue[1]).powi(2) + (p.values[k] - pe).powi(2));
            den += a * (ue[0] * ue[0] + ue[1] * ue[1] + pe * pe);
        }
    }
    if den == 0.0 {
        return Err(Error::InsufficientData("annulus holds no cells or the exact solution vanishes".into()));
    }
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    pub stderr: f64,
    pub theta: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub samples: usize,
}

/// Log-log slope of `field` along the grid ray nearest `theta0`, for
/// `r_lo <= r <= r_hi`.
pub fn fit_singular_exponent(field: &ScalarField, theta0: f64, window: (f64, f64)) -> Result<ExponentFit> {
    let g = &field.grid;
    if g.kind() != DomainKind::Sector {
        return Err(Error::UnsupportedDomain("exponent fits need a sector grid".into()));
    }
    let j = ((theta0 / g.h2 - 0.5).round().max(0.0) as usize).min(g.n2 - 1);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..g.n1 {
        let r = g.coord1(i);
        if r < window.0 || r > window.1 {
            continue;
        }
        let v = field.at(i, j);
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!("nonpositive sample {v:e} at r = {r}")));
        }
        xs.push(r.ln());
        ys.push(v.ln());
    }
    if xs.len() < FIT_MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "exponent fit needs {FIT_MIN_SAMPLES} samples in [{}, {}], have {}",
            window.0,
            window.1,
            xs.len()
        )));
    }
    let (a, _, se) = least_squares(&xs, &ys);
    Ok(ExponentFit {
        exponent: a,
        stderr: se,
        theta: g.coord2(j),
        r_lo: window.0,
        r_hi: window.1,
        samples: xs.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub grid_n: usize,
    pub norm: f64,
    /// `log2(norm_k / norm_{k-1}) / log2(n_k / n_{k-1})`.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Finite,
    Divergent,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Finite => "finite",
            Verdict::Divergent => "divergent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub label: String,
    pub omega: f64,
    pub s: usize,
    pub rows: Vec<ScanRow>,
    pub verdict: Verdict,
}

impl ScanReport {
    /// Norm ratio over the last refinement.
    pub fn last_factor(&self) -> f64 {
        let n = self.rows.len();
        self.rows[n - 1].norm / self.rows[n - 2].norm
    }

    pub fn csv_header() -> &'static str {
        "omega,case,s,grid_n,norm,rate,verdict\n"
    }

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let rate = r.rate.map(|x| format!("{x:.6}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{:.12},{},{},{},{:.12e},{rate},{}",
                self.omega,
                self.label,
                self.s,
                r.grid_n,
                r.norm,
                self.verdict.name()
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{}{}", Self::csv_header(), self.csv_rows())
    }
}

/// `H^s` norms of a Cartesian vector field over refinements `n x n` of
/// `domain`, with a growth verdict from the last rate.
pub fn norm_growth_scan(
    label: &str,
    domain: DomainSpec,
    field: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    s: usize,
    refinements: &[usize],
) -> Result<ScanReport> {
    if refinements.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "norm scan needs at least 3 refinements, have {}",
            refinements.len()
        )));
    }
    if refinements.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("refinements must be strictly increasing".into()));
    }
    let mut rows: Vec<ScanRow> = Vec::new();
    for &n in refinements {
        let g = make_grid(domain, n, n)?;
        let v = VectorField::from_fn(&g, field);
        let norm = sobolev_norm_vec(&v, s)?;
        let rate = rows
            .last()
            .map(|p| (norm / p.norm).log2() / (n as f64 / p.grid_n as f64).log2());
        debug!("scan {label} s={s} n={n}: {norm:.6e}");
        rows.push(ScanRow { grid_n: n, norm, rate });
    }
    let last = rows.last().and_then(|r| r.rate).unwrap_or(0.0);
    let verdict = if last > DIVERGENCE_RATE {
        Verdict::Divergent
    } else {
        Verdict::Finite
    };
    Ok(ScanReport {
        label: label.to_string(),
        omega: domain.omega,
        s,
        rows,
        verdict,
    })
}

/// Scans `||u||_{H^s}` for `u = -grad f / 2` of the case.
pub fn norm_divergence_scan(spec: &CounterexampleSpec, s: usize, refinements: &[usize]) -> Result<ScanReport> {
    let u = |x: [f64; 2]| spec.exact(1.0, x).0;
    norm_growth_scan(spec.case.name(), spec.domain(), &u, s, refinements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn classification() {
        assert_eq!(CounterexampleSpec::new(PI / 3.0, 1.0).unwrap().case, CaseKind::A);
        assert_eq!(CounterexampleSpec::new(PI / 2.0, 1.0).unwrap().case, CaseKind::B);
        assert_eq!(CounterexampleSpec::new(2.0 * PI / 5.0, 1.0).unwrap().case, CaseKind::C);
        assert!(CounterexampleSpec::new(3.5, 1.0).is_err());
        let a = CounterexampleSpec::new(PI / 3.0, 1.0).unwrap();
        assert_relative_eq!(a.lambda.unwrap(), 8.0 * PI / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn grid_mismatch() {
        let s = CounterexampleSpec::new(PI / 3.0, 1.0).unwrap();
        let g = make_grid(DomainSpec::sector(PI / 4.0, 1.0).unwrap(), 8, 8).unwrap();
        assert!(counterexample_field(&s, 0.0, &g).is_err());
    }

    #[test]
    fn fit_of_power_law() {
        let g = make_grid(DomainSpec::sector(1.0, 1.0).unwrap(), 128, 8).unwrap();
        let f = ScalarField::from_native_fn(&g, |r, _| r * r);
        let fit = fit_singular_exponent(&f, 0.5, FIT_WINDOW).unwrap();
        assert_relative_eq!(fit.exponent, 2.0, epsilon = 1e-12);
        let z = ScalarField::zeros(&g);
        assert!(fit_singular_exponent(&z, 0.5, FIT_WINDOW).is_err());
        assert!(fit_singular_exponent(&f, 0.5, (0.1, 0.12)).is_err());
    }

    #[test]
    fn zero_source_gives_zero_run() {
        let s = CounterexampleSpec::new(2.0 * PI / 5.0, 1.0).unwrap();
        let g = make_grid(s.domain(), 16, 8).unwrap();
        let zero = |_: f64, _: [f64; 2]| 0.0;
        let tr = acoustic_sector_run(&s, Some(&zero), 0.1, &g, &AcousticConfig::default()).unwrap();
        assert!(tr.energy.iter().all(|e| *e == 0.0));
        let cfg = AcousticConfig {
            dt: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            acoustic_sector_run(&s, None, 0.1, &g, &cfg),
            Err(Error::Cfl { .. })
        ));
    }

    #[test]
    fn scan_needs_three_refinements() {
        let s = CounterexampleSpec::new(2.0 * PI / 5.0, 1.0).unwrap();
        assert!(norm_divergence_scan(&s, 2, &[8, 16]).is_err());
        assert!(norm_divergence_scan(&s, 2, &[8, 16, 16]).is_err());
    }
}
