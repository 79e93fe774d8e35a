//! Command implementations. Every command writes its CSV tables under the
//! output directory and returns the list of failed checks.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use cornermhd::data::{
    manufactured_linear, picard_initial, random_parity_state, random_smooth_scalar, standing_wave, standing_wave_setup,
};
use cornermhd::discrete_calc::{aniso_norm, aniso_norm_ordered, sobolev_norm, AnisoOrdering};
use cornermhd::elliptic::{div_curl_solve, field_dump, helmholtz_decompose, poisson_dirichlet, poisson_neumann};
use cornermhd::geometry::tangential_frame;
use cornermhd::mhd_linear::{
    coeffs_point, min_eigenvalue, run_linear, symmetry_defect, Background, PressureKind, RunConfig as LinearRun,
    SchemeConfig, SourceTerm, State,
};
use cornermhd::mhd_nonlinear::{constraint_monitor, picard_solve, PicardConfig};
use cornermhd::singularity_lab::{
    acoustic_sector_run, fit_singular_exponent, norm_divergence_scan, AcousticConfig, CaseKind, CounterexampleSpec,
    ScanReport,
};
use cornermhd::{make_grid, DomainKind, DomainSpec, Error, Grid, Jet, ScalarField, VectorField};

use crate::config::{Command, DataGen, RunConfig};

/// Why a command did not succeed; maps onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// A check failed or a precondition on the data was violated.
    Check(String),
    /// The configuration cannot be run.
    Config(String),
    /// The numerics broke down.
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Check(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) | Failure::Io(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Config(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Precondition { .. } | Error::KindMismatch { .. } => Failure::Check(m),
            Error::InvalidDomain(_)
            | Error::InvalidGrid(_)
            | Error::InvalidFace { .. }
            | Error::UnsupportedDomain(_)
            | Error::InvalidEos(_)
            | Error::OrderTooHigh { .. }
            | Error::InvalidArgument(_) => Failure::Config(m),
            _ => Failure::Numerical(m),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// Output directory plus the provenance line heading every table.
pub struct Output {
    dir: PathBuf,
    header: String,
    pub written: Vec<PathBuf>,
}

impl Output {
    pub fn new(cfg: &RunConfig) -> Res<Output> {
        fs::create_dir_all(&cfg.out_dir)?;
        let grid = if cfg.refinements.is_empty() || cfg.command == Command::RunLinear {
            format!("{}x{}", cfg.n1, cfg.n2)
        } else {
            let r: Vec<String> = cfg.refinements.iter().map(|n| n.to_string()).collect();
            r.join(",")
        };
        let header = format!(
            "# cornermhd {} config={} grid={grid} domain={}\n",
            cfg.command.name(),
            cfg.hash(),
            cfg.domain.kind
        );
        Ok(Output {
            dir: cfg.out_dir.clone(),
            header,
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, body: &str) -> Res<()> {
        let path = self.dir.join(name);
        fs::write(&path, format!("{}{body}", self.header))?;
        info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }
}

/// Runs the configured command; `Ok` carries the failed checks.
pub fn execute(cfg: &RunConfig, out: &mut Output) -> Res<Vec<String>> {
    out.write("run.echo.cfg", &cfg.echo())?;
    match cfg.command {
        Command::RunLinear => run_linear_cmd(cfg, out),
        Command::RunPicard => run_picard_cmd(cfg, out),
        Command::EllipticSuite => elliptic_suite(cfg, out),
        Command::SingularityScan => singularity_scan(cfg, out),
        Command::NormStudy => norm_study(cfg, out),
        Command::CheckSymmetrizer => check_symmetrizer(cfg, out),
    }
}

/// Observed orders between consecutive refinements (factor-2 or not).
fn orders(ns: &[usize], e: &[f64]) -> Vec<f64> {
    (1..e.len())
        .map(|k| (e[k - 1] / e[k]).ln() / (ns[k] as f64 / ns[k - 1] as f64).ln())
        .collect()
}

fn order_rows(ns: &[usize], e: &[f64]) -> Vec<Option<f64>> {
    std::iter::once(None).chain(orders(ns, e).into_iter().map(Some)).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

fn linear_run(cfg: &RunConfig) -> LinearRun {
    LinearRun {
        scheme: SchemeConfig {
            cfl: cfg.cfl,
            dissipation: cfg.dissipation,
            cfl_policy: cfg.cfl_policy,
        },
        output_every: cfg.output_every,
        check_compat: true,
        compat_tol: cfg.tol.compat,
        residuals: true,
        star_orders: Vec::new(),
        dt: None,
    }
}

type Exact = Box<dyn Fn(f64, [f64; 2]) -> [f64; 6] + Sync>;

struct LinearProblem {
    bg: Background,
    src: SourceTerm,
    eos: cornermhd::mhd_nonlinear::EosModel,
    exact: Option<Exact>,
}

fn linear_problem(cfg: &RunConfig) -> LinearProblem {
    match cfg.data {
        DataGen::Manufactured => {
            let m = manufactured_linear(true);
            let exact = m.exact.clone();
            LinearProblem {
                bg: m.bg,
                src: m.src,
                eos: m.eos,
                exact: Some(Box::new(move |t, x| exact(t, x))),
            }
        }
        DataGen::StandingWave => {
            let (bg, eos) = standing_wave_setup();
            LinearProblem {
                bg,
                src: SourceTerm::Zero,
                eos,
                exact: Some(Box::new(standing_wave)),
            }
        }
        _ => LinearProblem {
            bg: Background::constant([0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
            src: SourceTerm::Zero,
            eos: cfg.eos,
            exact: None,
        },
    }
}

fn initial_linear(cfg: &RunConfig, p: &LinearProblem, g: &Grid) -> Res<State> {
    Ok(match &p.exact {
        Some(f) => State::from_fn(g, PressureKind::Total, |x| f(0.0, x)),
        None => random_parity_state(g, cfg.seed.unwrap_or_default(), cfg.modes, cfg.amplitude)?,
    })
}

const COMP_NAMES: [&str; 6] = ["u1", "u2", "b1", "b2", "pvar", "s"];

fn dump_state(out: &mut Output, z: &State, t: f64) -> Res<()> {
    let comps = [&z.u.c[0], &z.u.c[1], &z.b.c[0], &z.b.c[1], &z.pvar, &z.s];
    for (name, f) in COMP_NAMES.iter().zip(comps) {
        out.write(&format!("field_{name}.txt"), &field_dump(f, Some(&format!("{name} t={t}"))))?;
    }
    Ok(())
}

fn run_linear_cmd(cfg: &RunConfig, out: &mut Output) -> Res<Vec<String>> {
    let mut failures = Vec::new();
    let p = linear_problem(cfg);
    let g = make_grid(cfg.domain, cfg.n1, cfg.n2)?;
    let z0 = initial_linear(cfg, &p, &g)?;
    let (traj, rep) = run_linear(&z0, &p.bg, &p.src, &p.eos, cfg.t_end, &linear_run(cfg))?;
    out.write("diagnostics.csv", &rep.to_csv())?;
    let t_end = *traj.times.last().unwrap_or(&0.0);
    dump_state(out, traj.last(), t_end)?;
    if let Some(exact) = &p.exact {
        let err = traj.last().diff_l2(&State::from_fn(&g, PressureKind::Total, |x| exact(t_end, x)));
        let mut s = String::from("t,l2_error\n");
        let _ = writeln!(s, "{t_end},{err:.6e}");
        out.write("error.csv", &s)?;
        if let Some(max) = cfg.tol.max_error {
            if !(err <= max) {
                failures.push(format!("final L2 error {err:.3e} exceeds max_error {max:.3e}"));
            }
        }
    }
    if cfg.refinements.len() >= 2 {
        let Some(exact) = &p.exact else {
            return Err(Failure::Config("refinement study needs a generator with an exact solution".into()));
        };
        let run = LinearRun {
            residuals: false,
            output_every: usize::MAX,
            ..linear_run(cfg)
        };
        let errs: Vec<f64> = cfg
            .refinements
            .par_iter()
            .map(|&n| -> Res<f64> {
                let g = make_grid(cfg.domain, n, n)?;
                let z0 = initial_linear(cfg, &p, &g)?;
                let (traj, _) = run_linear(&z0, &p.bg, &p.src, &p.eos, cfg.t_end, &run)?;
                let t = *traj.times.last().unwrap_or(&0.0);
                Ok(traj.last().diff_l2(&State::from_fn(&g, PressureKind::Total, |x| exact(t, x))))
            })
            .collect::<Res<_>>()?;
        let ords = order_rows(&cfg.refinements, &errs);
        let mut s = String::from("grid_n,l2_error,order\n");
        for ((n, e), o) in cfg.refinements.iter().zip(&errs).zip(&ords) {
            let _ = writeln!(s, "{n},{e:.6e},{}", opt(*o));
        }
        out.write("convergence.csv", &s)?;
        for o in ords.iter().flatten() {
            if !(*o >= cfg.tol.order_min) {
                failures.push(format!("convergence order {o:.3} below {}", cfg.tol.order_min));
            }
        }
    }
    Ok(failures)
}

fn picard_start(cfg: &RunConfig, g: &Grid) -> Res<State> {
    let a = cfg.amplitude;
    Ok(match cfg.data {
        DataGen::Picard => picard_initial(g, a),
        DataGen::ConstantFlow => State::from_fn(g, PressureKind::Physical, |_| [a, 0.0, 0.0, 0.0, 1.0, 0.0]),
        _ => {
            let z = random_parity_state(g, cfg.seed.unwrap_or_default(), cfg.modes, a)?;
            let mut c = z.comps();
            c[4].iter_mut().for_each(|p| *p += 1.0);
            State::from_comps(g, c, PressureKind::Physical)
        }
    })
}

fn run_picard_cmd(cfg: &RunConfig, out: &mut Output) -> Res<Vec<String>> {
    let g = make_grid(cfg.domain, cfg.n1, cfg.n2)?;
    let z0 = picard_start(cfg, &g)?;
    let pc = PicardConfig {
        run: LinearRun {
            residuals: false,
            ..linear_run(cfg)
        },
        tol: cfg.tol.picard_tol,
        kmax: cfg.tol.picard_kmax,
        delta_margin: 0.5,
    };
    let (traj, rep) = picard_solve(&z0, &cfg.eos, cfg.t_end, &pc)?;
    out.write("picard.csv", &rep.to_csv())?;
    let mut s = String::from("t,l2_divb,max_bnu\n");
    for c in constraint_monitor(&traj)? {
        let _ = writeln!(s, "{},{:.6e},{:.6e}", c.t, c.l2_divb, c.max_bnu);
    }
    out.write("constraints.csv", &s)?;
    dump_state(out, traj.last(), *traj.times.last().unwrap_or(&0.0))?;
    let mut failures = Vec::new();
    if !rep.converged {
        let d = rep.rows.last().map(|r| r.d_l2).unwrap_or(f64::NAN);
        failures.push(format!(
            "Picard iteration not converged after {} sweeps (d = {d:.3e} > {:.1e})",
            rep.rows.len(),
            cfg.tol.picard_tol
        ));
    }
    Ok(failures)
}

type JetFn = Box<dyn Fn(Jet, Jet) -> Jet + Sync>;

/// Closed-form potentials for the elliptic suite on one domain.
struct EllipticCase {
    /// Vanishes on the boundary.
    dirichlet: JetFn,
    /// Zero normal derivative on the boundary.
    neumann: JetFn,
    /// Arbitrary smooth potential for the gradient part.
    gradient: JetFn,
}

fn elliptic_case(d: DomainSpec) -> EllipticCase {
    match d.kind {
        DomainKind::Square => {
            let k = PI / d.delta;
            EllipticCase {
                dirichlet: Box::new(move |x1, x2| (x1 * k).sin() * (x2 * k).sin()),
                neumann: Box::new(move |x1, x2| (x1 * k).cos() * (x2 * k).cos()),
                gradient: Box::new(|x1, x2| x1 * x2),
            }
        }
        DomainKind::Sector => {
            let (sw, cw, r0) = (d.omega.sin(), d.omega.cos(), d.r0);
            EllipticCase {
                dirichlet: Box::new(move |x1, x2| {
                    let r2 = x1 * x1 + x2 * x2;
                    x2 * (x1 * sw - x2 * cw) * (Jet::constant(r0 * r0) - r2)
                }),
                neumann: Box::new(move |x1, x2| {
                    let w = Jet::constant(r0 * r0) - (x1 * x1 + x2 * x2);
                    w * w
                }),
                gradient: Box::new(|x1, x2| x1 * x1 * x2),
            }
        }
    }
}

fn jet_at(f: &JetFn, x: [f64; 2]) -> Jet {
    let (_, x1, x2) = Jet::vars(0.0, x[0], x[1]);
    f(x1, x2)
}

/// Errors of one grid: Dirichlet, Neumann, Helmholtz `g`, div-curl, and
/// the discrete divergence of `g`.
fn elliptic_errors(case: &EllipticCase, g: &Grid) -> Res<[f64; 5]> {
    let sf = |f: &dyn Fn([f64; 2]) -> f64| ScalarField::from_fn(g, f);
    let kd = poisson_dirichlet(&sf(&|x| jet_at(&case.dirichlet, x).laplacian()))?;
    let ed = kd.potential.sub(&sf(&|x| jet_at(&case.dirichlet, x).v)).l2_norm();
    let kn = poisson_neumann(&sf(&|x| jet_at(&case.neumann, x).laplacian()))?;
    let exact_n = sf(&|x| jet_at(&case.neumann, x).v);
    let exact_n = exact_n.map(|v| v - exact_n.mean());
    let en = kn.potential.sub(&exact_n).l2_norm();
    // v = grad phi + grad^perp psi with psi from the Dirichlet potential
    let perp = |x| {
        let d = jet_at(&case.dirichlet, x).grad();
        [-d[1], d[0]]
    };
    let v = VectorField::from_fn(g, |x| {
        let a = jet_at(&case.gradient, x).grad();
        let b = perp(x);
        [a[0] + b[0], a[1] + b[1]]
    });
    let hp = helmholtz_decompose(&v)?;
    let eg = hp.g.sub(&VectorField::from_fn(g, perp)).l2_norm();
    // u = grad^perp psi + grad phi_N is tangential
    let u = VectorField::from_fn(g, |x| {
        let a = jet_at(&case.neumann, x).grad();
        let b = perp(x);
        [a[0] + b[0], a[1] + b[1]]
    });
    let v1 = sf(&|x| jet_at(&case.neumann, x).laplacian());
    let v2 = sf(&|x| jet_at(&case.dirichlet, x).laplacian());
    let edc = div_curl_solve(&v1, &v2)?.sub(&u).l2_norm();
    Ok([ed, en, eg, edc, hp.div_g])
}

fn elliptic_suite(cfg: &RunConfig, out: &mut Output) -> Res<Vec<String>> {
    let case = elliptic_case(cfg.domain);
    let rows: Vec<[f64; 5]> = cfg
        .refinements
        .par_iter()
        .map(|&n| {
            let g = make_grid(cfg.domain, n, n)?;
            elliptic_errors(&case, &g)
        })
        .collect::<Res<_>>()?;
    let names = ["poisson_dirichlet", "poisson_neumann", "helmholtz_g", "div_curl"];
    let mut s = String::from("test,grid_n,error,order\n");
    let mut failures = Vec::new();
    for (t, name) in names.iter().enumerate() {
        let e: Vec<f64> = rows.iter().map(|r| r[t]).collect();
        let ords = order_rows(&cfg.refinements, &e);
        for ((n, e), o) in cfg.refinements.iter().zip(&e).zip(&ords) {
            let _ = writeln!(s, "{name},{n},{e:.6e},{}", opt(*o));
        }
        for o in ords.iter().flatten() {
            if !(*o >= cfg.tol.order_min) {
                failures.push(format!("{name}: order {o:.3} below {}", cfg.tol.order_min));
            }
        }
    }
    for (n, r) in cfg.refinements.iter().zip(&rows) {
        let _ = writeln!(s, "helmholtz_div_g,{n},{:.6e},", r[4]);
        if !(r[4] <= 1e-8) {
            failures.push(format!("helmholtz: ||div g|| = {:.3e} > 1e-8 at n = {n}", r[4]));
        }
    }
    out.write("elliptic.csv", &s)?;
    Ok(failures)
}

fn singularity_scan(cfg: &RunConfig, out: &mut Output) -> Res<Vec<String>> {
    let sc = &cfg.singularity;
    let spec = CounterexampleSpec::new(cfg.domain.omega, cfg.domain.r0)?;
    let fit_job = || -> Res<String> {
        let mut s = String::from("omega,case,t,r_lo,r_hi,samples,exponent,stderr,predicted\n");
        if !sc.fit {
            return Ok(s);
        }
        if spec.case != CaseKind::C {
            s.push_str("# fit skipped: logarithmic cases have no pure power law\n");
            return Ok(s);
        }
        let g = make_grid(spec.domain(), sc.fit_nr, sc.fit_ntheta)?;
        let acfg = AcousticConfig {
            cfl: cfg.cfl,
            output_every: usize::MAX,
            ..Default::default()
        };
        let tr = acoustic_sector_run(&spec, None, sc.t_end, &g, &acfg)?;
        let u = tr.u.last().expect("non-empty trajectory").magnitude();
        let fit = fit_singular_exponent(&u, spec.omega / 2.0, sc.window)?;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:.6},{:.3e},{:.6}",
            spec.omega,
            spec.case.name(),
            tr.times.last().unwrap_or(&0.0),
            fit.r_lo,
            fit.r_hi,
            fit.samples,
            fit.exponent,
            fit.stderr,
            spec.predicted_exponent()
        );
        Ok(s)
    };
    let scan_job = || norm_divergence_scan(&spec, sc.s, &cfg.refinements).map_err(Failure::from);
    let (fits, scan): (Res<String>, Res<ScanReport>) = rayon::join(fit_job, scan_job);
    let (fits, scan) = (fits?, scan?);
    out.write("scan.csv", &scan.to_csv())?;
    out.write("fits.csv", &fits)?;
    let mut failures = Vec::new();
    if let Some(want) = &sc.expect {
        if scan.verdict.name() != want {
            failures.push(format!("verdict {} but {want} was expected", scan.verdict.name()));
        }
    }
    Ok(failures)
}

struct NormRow {
    n: usize,
    field: usize,
    aniso: f64,
    aniso_last: f64,
    hm: f64,
    hhalf: f64,
}

fn norm_study(cfg: &RunConfig, out: &mut Output) -> Res<Vec<String>> {
    let m = cfg.norm_m;
    let seed = cfg.seed.unwrap_or_default();
    let per_grid: Vec<(Option<f64>, Vec<NormRow>)> = cfg
        .refinements
        .par_iter()
        .map(|&n| -> Res<(Option<f64>, Vec<NormRow>)> {
            let g = make_grid(cfg.domain, n, n)?;
            let fr = tangential_frame(&g)?;
            // ||x1|| at m = 2 on the unit square is sqrt(48/35)
            let x1_err = if cfg.domain.delta == 1.0 {
                let x1 = ScalarField::from_fn(&g, |x| x[0]);
                Some((aniso_norm(&x1, 2, &fr)? - (48.0f64 / 35.0).sqrt()).abs())
            } else {
                None
            };
            let mut rows = Vec::new();
            for k in 0..cfg.norm_fields {
                let f = random_smooth_scalar(&g, seed.wrapping_add(k as u64), cfg.modes);
                rows.push(NormRow {
                    n,
                    field: k,
                    aniso: aniso_norm(&f, m, &fr)?,
                    aniso_last: aniso_norm_ordered(&f, m, &fr, AnisoOrdering::TangentialLast)?,
                    hm: sobolev_norm(&f, m)?,
                    hhalf: sobolev_norm(&f, m / 2)?,
                });
            }
            Ok((x1_err, rows))
        })
        .collect::<Res<_>>()?;
    let mut s = String::from("grid_n,field,aniso,aniso_tangential_last,sobolev_m,sobolev_half\n");
    let mut summary = String::from("grid_n,x1_error,max_aniso_over_hm,max_hhalf_over_aniso,max_ordering_ratio\n");
    let mut maxima = Vec::new();
    for (x1_err, rows) in &per_grid {
        let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
        for r in rows {
            let _ = writeln!(
                s,
                "{},{},{:.9e},{:.9e},{:.9e},{:.9e}",
                r.n, r.field, r.aniso, r.aniso_last, r.hm, r.hhalf
            );
            a = a.max(r.aniso / r.hm);
            b = b.max(r.hhalf / r.aniso);
            c = c.max((r.aniso / r.aniso_last).max(r.aniso_last / r.aniso));
        }
        let n = rows.first().map(|r| r.n).unwrap_or_default();
        let _ = writeln!(summary, "{n},{},{a:.6e},{b:.6e},{c:.6e}", opt(*x1_err));
        maxima.push([a, b, c]);
    }
    out.write("norms.csv", &s)?;
    out.write("norm_summary.csv", &summary)?;
    let mut failures = Vec::new();
    let names = ["aniso/H^m", "H^(m/2)/aniso", "ordering"];
    for (k, name) in names.iter().enumerate() {
        let c = 1.25 * maxima[0][k];
        for (n, mx) in cfg.refinements.iter().zip(&maxima) {
            if !(mx[k].is_finite() && mx[k] <= c) {
                failures.push(format!("{name}: ratio {:.4} at n = {n} exceeds {c:.4}", mx[k]));
            }
        }
    }
    let errs: Vec<f64> = per_grid.iter().filter_map(|p| p.0).collect();
    for o in orders(&cfg.refinements, &errs) {
        if !(o >= cfg.tol.order_min) {
            failures.push(format!("x1 norm error order {o:.3} below {}", cfg.tol.order_min));
        }
    }
    Ok(failures)
}

fn check_symmetrizer(cfg: &RunConfig, out: &mut Output) -> Res<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or_default());
    let zero = Default::default();
    let mut s = String::from("sample,u1,u2,b1,b2,p,s,defect_a1,defect_a2,min_eig_s0a0\n");
    let mut failures = Vec::new();
    let mut worst = (0.0f64, f64::INFINITY);
    for k in 0..cfg.samples {
        let zb = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(-1.0..1.0),
        ];
        let c = coeffs_point(zb, &cfg.eos, zero, 0)?;
        let (d1, d2) = (symmetry_defect(&c.s0a1), symmetry_defect(&c.s0a2));
        let lmin = min_eigenvalue(&c.s0a0);
        let _ = writeln!(
            s,
            "{k},{},{},{},{},{},{},{d1:.3e},{d2:.3e},{lmin:.9e}",
            zb[0], zb[1], zb[2], zb[3], zb[4], zb[5]
        );
        worst = (worst.0.max(d1).max(d2), worst.1.min(lmin));
    }
    out.write("symmetrizer.csv", &s)?;
    if !(worst.0 <= cfg.tol.defect) {
        failures.push(format!("symmetry defect {:.3e} exceeds {:.1e}", worst.0, cfg.tol.defect));
    }
    if !(worst.1 > 0.0) {
        failures.push(format!("S0 A0 not positive definite: min eigenvalue {:.3e}", worst.1));
    }
    Ok(failures)
}
