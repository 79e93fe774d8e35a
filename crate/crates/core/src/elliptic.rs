//! Poisson solvers with Dirichlet and Neumann walls, the Helmholtz
//! decomposition, div-curl reconstruction and the Hodge-ratio probe.
//!
//! All solves use one finite-volume discretization on a staggered layout:
//! unknowns at cell centres, gradients on cell faces. On the square this is
//! the 5-point Laplacian; on sectors it is the polar 5-point operator
//! `(1/r) d_r(r d_r) + (1/r^2) d_theta^2`. Walls enter through ghost
//! reflection (`K_ghost = -K` for Dirichlet, `K_ghost = K` for Neumann).
//! Multiplied by the cell areas the operator is symmetric, and it is
//! solved with Jacobi-preconditioned conjugate gradients.

use std::fmt::Write as _;

use log::warn;

use crate::discrete_calc::{curl2d, divergence, gradient, max_normal_trace, perp_gradient, sobolev_norm, sobolev_norm_vec, trace_tolerance, SOBOLEV_MAX_ORDER};
use crate::error::{Error, Result};
use crate::field::{pairwise_sum, Basis, ScalarField, VectorField};
use crate::geometry::{DomainKind, Grid};
use crate::stencil::extrapolate_edge;

/// Relative residual at which CG stops.
pub const CG_TOL: f64 = 1e-10;
/// Iteration cap per unit of `max(n1, n2)`.
pub const CG_CAP_PER_CELL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    pub potential: ScalarField,
    /// Final relative residual.
    pub residual_norm: f64,
    pub iterations: usize,
    /// Mean subtracted from the right-hand side (Neumann only).
    pub mean_removed: f64,
}

/// Radius factor of cell row `i` (1 on the square).
fn rho(g: &Grid, i: usize) -> f64 {
    match g.kind() {
        DomainKind::Square => 1.0,
        DomainKind::Sector => g.coord1(i),
    }
}

/// Radius factor of the axis-0 face `i` (between cells `i-1` and `i`).
fn alpha(g: &Grid, i: usize) -> f64 {
    match g.kind() {
        DomainKind::Square => 1.0,
        DomainKind::Sector => i as f64 * g.h1,
    }
}

/// 5-point operator `L = D G` with wall treatment; stored as stencil
/// coefficients per cell.
struct Laplace5 {
    g: Grid,
    cc: Vec<f64>,
    // west, east, south, north
    nb: Vec<[f64; 4]>,
    area: Vec<f64>,
}

impl Laplace5 {
    fn new(g: &Grid, wall: Wall) -> Self {
        let (n1, n2) = (g.n1, g.n2);
        let mut cc = vec![0.0; g.len()];
        let mut nb = vec![[0.0; 4]; g.len()];
        let mut area = vec![0.0; g.len()];
        let ghost = match wall {
            Wall::Dirichlet => 2.0,
            Wall::Neumann => 0.0,
        };
        for i in 0..n1 {
            let r = rho(g, i);
            let (aw, ae) = (alpha(g, i), alpha(g, i + 1));
            let c1 = 1.0 / (g.h1 * g.h1 * r);
            let c2 = 1.0 / (g.h2 * g.h2 * r * r);
            for j in 0..n2 {
                let k = i * n2 + j;
                area[k] = g.cell_area(i);
                let mut d = 0.0;
                let mut w = [0.0; 4];
                // axis 0
                if i > 0 {
                    w[0] = aw * c1;
                    d -= aw * c1;
                } else {
                    d -= ghost * aw * c1;
                }
                if i + 1 < n1 {
                    w[1] = ae * c1;
                    d -= ae * c1;
                } else {
                    d -= ghost * ae * c1;
                }
                // axis 1
                if j > 0 {
                    w[2] = c2;
                    d -= c2;
                } else {
                    d -= ghost * c2;
                }
                if j + 1 < n2 {
                    w[3] = c2;
                    d -= c2;
                } else {
                    d -= ghost * c2;
                }
                cc[k] = d;
                nb[k] = w;
            }
        }
        Laplace5 {
            g: g.clone(),
            cc,
            nb,
            area,
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let (n1, n2) = (self.g.n1, self.g.n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let k = i * n2 + j;
                let w = &self.nb[k];
                let mut v = self.cc[k] * x[k];
                if i > 0 {
                    v += w[0] * x[k - n2];
                }
                if i + 1 < n1 {
                    v += w[1] * x[k + n2];
                }
                if j > 0 {
                    v += w[2] * x[k - 1];
                }
                if j + 1 < n2 {
                    v += w[3] * x[k + 1];
                }
                out[k] = v;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let t: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise_sum(&t)
}

fn weighted_mean(v: &[f64], area: &[f64]) -> f64 {
    dot(v, area) / pairwise_sum(area)
}

fn project_mean(v: &mut [f64], area: &[f64]) {
    let m = weighted_mean(v, area);
    v.iter_mut().for_each(|x| *x -= m);
}

/// Solves `L x = f` by Jacobi-preconditioned CG on `-A L x = -A f` with
/// `A` the cell areas. For Neumann walls iterates are kept mean free.
fn solve(op: &Laplace5, f: &[f64], wall: Wall) -> Result<(Vec<f64>, f64, usize)> {
    let n = f.len();
    let cap = CG_CAP_PER_CELL * op.g.n1.max(op.g.n2);
    let b: Vec<f64> = f.iter().zip(&op.area).map(|(v, a)| -v * a).collect();
    let bnorm = dot(&b, &b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, 0.0, 0));
    }
    let minv: Vec<f64> = op.cc.iter().zip(&op.area).map(|(c, a)| 1.0 / (-c * a)).collect();
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&minv).map(|(a, m)| a * m).collect();
    let ones_proj = |v: &mut Vec<f64>| {
        if wall == Wall::Neumann {
            // remove the component along the null vector (constants)
            let m = pairwise_sum(v) / n as f64;
            v.iter_mut().for_each(|x| *x -= m);
        }
    };
    ones_proj(&mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut lp = vec![0.0; n];
    let mut history = Vec::new();
    for it in 1..=cap {
        op.apply(&p, &mut lp);
        let ap: Vec<f64> = lp.iter().zip(&op.area).map(|(v, a)| -v * a).collect();
        let alpha = rz / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rel = dot(&r, &r).sqrt() / bnorm;
        history.push(rel);
        if !rel.is_finite() {
            break;
        }
        if rel <= CG_TOL {
            if wall == Wall::Neumann {
                project_mean(&mut x, &op.area);
            }
            return Ok((x, rel, it));
        }
        z = r.iter().zip(&minv).map(|(a, m)| a * m).collect();
        ones_proj(&mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    let residual = history.last().copied().unwrap_or(f64::NAN);
    Err(Error::SolverFailure {
        iterations: history.len(),
        residual,
        history,
    })
}

/// The discrete Laplacian used by the solvers, applied to `k`.
pub fn discrete_laplacian(k: &ScalarField, wall: Wall) -> ScalarField {
    let op = Laplace5::new(&k.grid, wall);
    let mut out = vec![0.0; k.values.len()];
    op.apply(&k.values, &mut out);
    ScalarField {
        grid: k.grid.clone(),
        values: out,
    }
}

/// `Delta K = f` in the domain, `K = 0` on the boundary.
pub fn poisson_dirichlet(f: &ScalarField) -> Result<PoissonSolution> {
    let op = Laplace5::new(&f.grid, Wall::Dirichlet);
    let (x, res, it) = solve(&op, &f.values, Wall::Dirichlet)?;
    Ok(PoissonSolution {
        potential: ScalarField::new(&f.grid, x)?,
        residual_norm: res,
        iterations: it,
        mean_removed: 0.0,
    })
}

/// `Delta K = f - mean(f)`, `d_nu K = 0`, `mean(K) = 0`.
pub fn poisson_neumann(f: &ScalarField) -> Result<PoissonSolution> {
    let op = Laplace5::new(&f.grid, Wall::Neumann);
    let mut rhs = f.values.clone();
    let m = weighted_mean(&rhs, &op.area);
    let scale = f.l2_norm() / f.grid.domain.area().sqrt();
    if m.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        warn!("Neumann data has mean {m:.3e}; solving with the mean removed");
    }
    rhs.iter_mut().for_each(|v| *v -= m);
    let (x, res, it) = solve(&op, &rhs, Wall::Neumann)?;
    Ok(PoissonSolution {
        potential: ScalarField::new(&f.grid, x)?,
        residual_norm: res,
        iterations: it,
        mean_removed: m,
    })
}

/// Face-centred vector field in native components (`x1, x2` or `r, theta`).
struct FaceField {
    /// `(n1 + 1) x n2` faces normal to axis 0.
    f1: Vec<f64>,
    /// `n1 x (n2 + 1)` faces normal to axis 1.
    f2: Vec<f64>,
}

fn native(v: &VectorField) -> Result<VectorField> {
    match v.grid().kind() {
        DomainKind::Square => v.to_cartesian_any(),
        DomainKind::Sector => v.to_polar(),
    }
}

/// Interior faces average the adjacent cells; wall faces are zero.
fn faces_from_cells(v: &VectorField) -> Result<FaceField> {
    let g = v.grid().clone();
    let nv = native(v)?;
    let (n1, n2) = (g.n1, g.n2);
    let (a, b) = (&nv.c[0].values, &nv.c[1].values);
    let mut f1 = vec![0.0; (n1 + 1) * n2];
    for i in 1..n1 {
        for j in 0..n2 {
            f1[i * n2 + j] = 0.5 * (a[(i - 1) * n2 + j] + a[i * n2 + j]);
        }
    }
    let mut f2 = vec![0.0; n1 * (n2 + 1)];
    for i in 0..n1 {
        for j in 1..n2 {
            f2[i * (n2 + 1) + j] = 0.5 * (b[i * n2 + j - 1] + b[i * n2 + j]);
        }
    }
    Ok(FaceField { f1, f2 })
}

fn face_divergence(g: &Grid, f: &FaceField) -> Vec<f64> {
    let (n1, n2) = (g.n1, g.n2);
    let mut out = vec![0.0; g.len()];
    for i in 0..n1 {
        let r = rho(g, i);
        let (aw, ae) = (alpha(g, i), alpha(g, i + 1));
        for j in 0..n2 {
            let d1 = (ae * f.f1[(i + 1) * n2 + j] - aw * f.f1[i * n2 + j]) / g.h1;
            let d2 = (f.f2[i * (n2 + 1) + j + 1] - f.f2[i * (n2 + 1) + j]) / g.h2;
            out[i * n2 + j] = (d1 + d2) / r;
        }
    }
    out
}

/// Face gradient on interior faces; wall faces are left zero.
fn face_gradient(g: &Grid, k: &[f64]) -> FaceField {
    let (n1, n2) = (g.n1, g.n2);
    let mut f1 = vec![0.0; (n1 + 1) * n2];
    for i in 1..n1 {
        for j in 0..n2 {
            f1[i * n2 + j] = (k[i * n2 + j] - k[(i - 1) * n2 + j]) / g.h1;
        }
    }
    let mut f2 = vec![0.0; n1 * (n2 + 1)];
    for i in 0..n1 {
        let r = rho(g, i);
        for j in 1..n2 {
            f2[i * (n2 + 1) + j] = (k[i * n2 + j] - k[i * n2 + j - 1]) / (g.h2 * r);
        }
    }
    FaceField { f1, f2 }
}

/// Cell average of face values; `wall1`/`wall2` supply the wall faces.
fn cells_from_faces(g: &Grid, f: &FaceField) -> (Vec<f64>, Vec<f64>) {
    let (n1, n2) = (g.n1, g.n2);
    let mut a = vec![0.0; g.len()];
    let mut b = vec![0.0; g.len()];
    for i in 0..n1 {
        for j in 0..n2 {
            let k = i * n2 + j;
            a[k] = if i == 0 && g.kind() == DomainKind::Sector {
                // the face at r = 0 is degenerate: extrapolate from outside
                1.5 * f.f1[n2 + j] - 0.5 * f.f1[2 * n2 + j]
            } else {
                0.5 * (f.f1[i * n2 + j] + f.f1[(i + 1) * n2 + j])
            };
            b[k] = 0.5 * (f.f2[i * (n2 + 1) + j] + f.f2[i * (n2 + 1) + j + 1]);
        }
    }
    (a, b)
}

/// `v = grad f + g` with `div g = 0`, `g.nu = 0`, `mean(f) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HelmholtzParts {
    pub f: ScalarField,
    /// `grad f` at the cells (Cartesian components).
    pub grad_f: VectorField,
    /// Solenoidal part at the cells (Cartesian components).
    pub g: VectorField,
    /// `L^2` norm of the discrete (face) divergence of `g`.
    pub div_g: f64,
    pub solve: PoissonSolution,
}

/// Helmholtz decomposition through the Neumann problem
/// `Delta f = div v`, `d_nu f = v.nu`.
///
/// The wall flux `v.nu` enters as the boundary-face gradient of `f`, so
/// it cancels from the discrete equation; `g` lives on faces with zero
/// wall flux and has zero discrete divergence up to the solver tolerance.
pub fn helmholtz_decompose(v: &VectorField) -> Result<HelmholtzParts> {
    let g = v.grid().clone();
    for c in &v.c {
        if let Some(k) = c.first_nonfinite() {
            return Err(Error::NonFinite {
                component: "v",
                cell: k,
                t: 0.0,
            });
        }
    }
    let vf = faces_from_cells(v)?;
    let rhs = ScalarField::new(&g, face_divergence(&g, &vf))?;
    let sol = poisson_neumann(&rhs)?;
    let gf = face_gradient(&g, &sol.potential.values);
    let gface = FaceField {
        f1: vf.f1.iter().zip(&gf.f1).map(|(a, b)| a - b).collect(),
        f2: vf.f2.iter().zip(&gf.f2).map(|(a, b)| a - b).collect(),
    };
    let div_g = ScalarField::new(&g, face_divergence(&g, &gface))?.l2_norm();

    // wall faces of grad f carry the Neumann data v.nu
    let nv = native(v)?;
    let mut full = gf;
    let (n1, n2) = (g.n1, g.n2);
    let a = &nv.c[0];
    let b = &nv.c[1];
    for j in 0..n2 {
        if g.kind() == DomainKind::Square {
            full.f1[j] = extrapolate_edge(a.at(0, j), a.at(1, j), a.at(2, j));
        }
        full.f1[n1 * n2 + j] = extrapolate_edge(a.at(n1 - 1, j), a.at(n1 - 2, j), a.at(n1 - 3, j));
    }
    for i in 0..n1 {
        full.f2[i * (n2 + 1)] = extrapolate_edge(b.at(i, 0), b.at(i, 1), b.at(i, 2));
        full.f2[i * (n2 + 1) + n2] = extrapolate_edge(b.at(i, n2 - 1), b.at(i, n2 - 2), b.at(i, n2 - 3));
    }
    let (ga, gb) = cells_from_faces(&g, &full);
    let basis = match g.kind() {
        DomainKind::Square => Basis::Cartesian,
        DomainKind::Sector => Basis::Polar,
    };
    let grad_f = VectorField::new(ScalarField::new(&g, ga)?, ScalarField::new(&g, gb)?, basis)?.to_cartesian_any()?;
    let vc = v.to_cartesian_any()?;
    let gpart = vc.sub(&grad_f);
    Ok(HelmholtzParts {
        f: sol.potential.clone(),
        grad_f,
        g: gpart,
        div_g,
        solve: sol,
    })
}

/// `u` with `div u = v1 - mean(v1)`, `curl u = v2`, `u.nu = 0`, as
/// `u = grad^perp K1 + grad K2` with `K1 = Delta_D^{-1} v2` and
/// `K2 = Delta_N^{-1} (v1 - mean(v1))`.
pub fn div_curl_solve(v1: &ScalarField, v2: &ScalarField) -> Result<VectorField> {
    v1.same_grid(v2)?;
    let k1 = poisson_dirichlet(v2)?.potential;
    let k2 = poisson_neumann(v1)?.potential;
    let a = perp_gradient(&k1)?;
    let b = gradient(&k2)?.to_cartesian_any()?;
    Ok(a.add(&b))
}

/// Denominator floor of [`hodge_ratio`].
pub const HODGE_FLOOR: f64 = 1e-14;

/// `||X||_s / (||div X||_{s-1} + ||curl X||_{s-1})` for a tangential field.
pub fn hodge_ratio(x: &VectorField, s: usize) -> Result<f64> {
    if s == 0 || s > SOBOLEV_MAX_ORDER {
        return Err(Error::OrderTooHigh {
            order: s,
            cap: SOBOLEV_MAX_ORDER,
        });
    }
    let xc = x.to_cartesian_any()?;
    let trace = max_normal_trace(&xc)?;
    let scale = xc.c[0].max_abs().max(xc.c[1].max_abs());
    let tol = trace_tolerance(xc.grid(), scale);
    if trace > tol {
        return Err(Error::Precondition {
            detail: "X.nu does not vanish on the boundary".into(),
            value: trace,
            tol,
        });
    }
    let num = sobolev_norm_vec(&xc, s)?;
    let den = sobolev_norm(&divergence(&xc)?, s - 1)? + sobolev_norm(&curl2d(&xc)?, s - 1)?;
    Ok(num / den.max(HODGE_FLOOR))
}

/// Column-text dump: header `# grid n1 n2 domain=<kind>` then one
/// `x1 x2 value` (or `r theta value`) row per cell.
pub fn field_dump(f: &ScalarField, extra_header: Option<&str>) -> String {
    let g = &f.grid;
    let kind = match g.kind() {
        DomainKind::Square => "square",
        DomainKind::Sector => "sector",
    };
    let mut out = String::new();
    if let Some(h) = extra_header {
        let _ = writeln!(out, "# {h}");
    }
    let _ = writeln!(out, "# grid {} {} domain={kind}", g.n1, g.n2);
    for i in 0..g.n1 {
        for j in 0..g.n2 {
            let _ = writeln!(out, "{:.10e} {:.10e} {:.12e}", g.coord1(i), g.coord2(j), f.at(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_grid, DomainSpec};
    use std::f64::consts::PI;

    fn square(n: usize) -> Grid {
        make_grid(DomainSpec::unit_square(), n, n).unwrap()
    }

    #[test]
    fn dirichlet_eigenfunction() {
        let mut errs = Vec::new();
        for n in [16, 32] {
            let g = square(n);
            let f = ScalarField::from_fn(&g, |x| -2.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin());
            let k = poisson_dirichlet(&f).unwrap();
            assert!(k.residual_norm <= CG_TOL);
            let exact = ScalarField::from_fn(&g, |x| (PI * x[0]).sin() * (PI * x[1]).sin());
            errs.push(k.potential.sub(&exact).max_abs());
        }
        assert!((errs[0] / errs[1]).log2() > 1.9, "{errs:?}");
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let g = square(8);
        let z = ScalarField::zeros(&g);
        assert_eq!(poisson_dirichlet(&z).unwrap().potential.max_abs(), 0.0);
        assert_eq!(poisson_neumann(&z).unwrap().potential.max_abs(), 0.0);
    }

    #[test]
    fn neumann_removes_mean() {
        let g = square(16);
        let f = ScalarField::from_fn(&g, |x| -PI * PI * (PI * x[0]).cos() + 0.3);
        let k = poisson_neumann(&f).unwrap();
        assert!((k.mean_removed - 0.3).abs() < 1e-12);
        assert!(k.potential.mean().abs() < 1e-12);
    }

    #[test]
    fn sector_operator_round_trip() {
        let g = make_grid(DomainSpec::sector(1.0, 1.0).unwrap(), 24, 20).unwrap();
        let f = ScalarField::from_fn(&g, |x| (3.0 * x[0]).sin() + x[1] * x[1]);
        for wall in [Wall::Dirichlet, Wall::Neumann] {
            let k = match wall {
                Wall::Dirichlet => poisson_dirichlet(&f).unwrap(),
                Wall::Neumann => poisson_neumann(&f).unwrap(),
            };
            let back = discrete_laplacian(&k.potential, wall);
            let target = f.map(|v| v - k.mean_removed);
            assert!(back.sub(&target).l2_norm() <= 1e-8 * target.l2_norm());
        }
    }

    #[test]
    fn dump_format() {
        let g = square(4);
        let s = field_dump(&ScalarField::constant(&g, 1.0), Some("t=0"));
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# t=0");
        assert_eq!(lines[1], "# grid 4 4 domain=square");
        assert_eq!(lines.len(), 18);
    }
}
