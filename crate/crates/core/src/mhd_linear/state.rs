use std::fmt;
use std::sync::Arc;

use crate::discrete_calc::{max_normal_trace, trace_tolerance};
use crate::error::{Error, Result};
use crate::field::{pairwise_sum, Basis, ScalarField, VectorField};
use crate::geometry::Grid;

/// Component names in storage order.
pub const COMPONENTS: [&str; 6] = ["u1", "u2", "b1", "b2", "p", "s"];

/// Six raw component arrays `(u1, u2, b1, b2, p, s)` over the cells.
pub type Comps = [Vec<f64>; 6];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureKind {
    /// Physical pressure `p`.
    Physical,
    /// Total pressure `p + |b|^2 / 2`.
    Total,
}

impl PressureKind {
    pub fn name(self) -> &'static str {
        match self {
            PressureKind::Physical => "physical_p",
            PressureKind::Total => "total_pressure",
        }
    }
}

/// Unknowns `z = (u, b, pvar, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: VectorField,
    pub b: VectorField,
    pub pvar: ScalarField,
    pub pvar_kind: PressureKind,
    pub s: ScalarField,
}

fn sf(grid: &Grid, v: Vec<f64>) -> ScalarField {
    ScalarField {
        grid: grid.clone(),
        values: v,
    }
}

fn vf(grid: &Grid, a: Vec<f64>, b: Vec<f64>) -> VectorField {
    VectorField {
        c: [sf(grid, a), sf(grid, b)],
        basis: Basis::Cartesian,
    }
}

impl State {
    pub fn new(
        u: VectorField,
        b: VectorField,
        pvar: ScalarField,
        pvar_kind: PressureKind,
        s: ScalarField,
    ) -> Result<Self> {
        let g = u.grid().clone();
        for f in [&b.c[0], &b.c[1], &pvar, &s] {
            if f.grid != g {
                return Err(Error::ShapeMismatch("state fields live on different grids".into()));
            }
        }
        if u.basis != Basis::Cartesian || b.basis != Basis::Cartesian {
            return Err(Error::ShapeMismatch("state vectors use Cartesian components".into()));
        }
        Ok(State {
            u,
            b,
            pvar,
            pvar_kind,
            s,
        })
    }

    pub fn zeros(grid: &Grid, kind: PressureKind) -> Self {
        Self::from_comps(grid, std::array::from_fn(|_| vec![0.0; grid.len()]), kind)
    }

    /// Samples `f(x) -> (u1, u2, b1, b2, pvar, s)` at Cartesian cell positions.
    pub fn from_fn(grid: &Grid, kind: PressureKind, f: impl Fn([f64; 2]) -> [f64; 6]) -> Self {
        let mut c: Comps = std::array::from_fn(|_| Vec::with_capacity(grid.len()));
        for k in 0..grid.len() {
            let v = f(grid.cartesian(k / grid.n2, k % grid.n2));
            for (a, x) in c.iter_mut().zip(v) {
                a.push(x);
            }
        }
        Self::from_comps(grid, c, kind)
    }

    pub fn from_comps(grid: &Grid, c: Comps, kind: PressureKind) -> Self {
        let [u1, u2, b1, b2, p, s] = c;
        State {
            u: vf(grid, u1, u2),
            b: vf(grid, b1, b2),
            pvar: sf(grid, p),
            pvar_kind: kind,
            s: sf(grid, s),
        }
    }

    pub fn comps(&self) -> Comps {
        [
            self.u.c[0].values.clone(),
            self.u.c[1].values.clone(),
            self.b.c[0].values.clone(),
            self.b.c[1].values.clone(),
            self.pvar.values.clone(),
            self.s.values.clone(),
        ]
    }

    pub fn comp(&self, c: usize) -> &ScalarField {
        match c {
            0 => &self.u.c[0],
            1 => &self.u.c[1],
            2 => &self.b.c[0],
            3 => &self.b.c[1],
            4 => &self.pvar,
            _ => &self.s,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// Fails with the first non-finite component and cell.
    pub fn check_finite(&self, t: f64) -> Result<()> {
        for c in 0..6 {
            if let Some(cell) = self.comp(c).first_nonfinite() {
                return Err(Error::NonFinite {
                    component: COMPONENTS[c],
                    cell,
                    t,
                });
            }
        }
        Ok(())
    }

    /// `L^2` norm over all six components.
    pub fn l2_norm(&self) -> f64 {
        let t: Vec<f64> = (0..6).map(|c| self.comp(c).inner(self.comp(c))).collect();
        pairwise_sum(&t).sqrt()
    }

    pub fn diff_l2(&self, other: &State) -> f64 {
        let t: Vec<f64> = (0..6)
            .map(|c| {
                let d = self.comp(c).sub(other.comp(c));
                d.inner(&d)
            })
            .collect();
        pairwise_sum(&t).sqrt()
    }
}

/// Background coefficients `Z = (U, B, P, S)` sampled at one time; `P` is
/// the physical pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundFields {
    pub u: VectorField,
    pub b: VectorField,
    pub p: ScalarField,
    pub s: ScalarField,
}

impl BackgroundFields {
    pub fn from_comps(grid: &Grid, c: Comps) -> Self {
        let [u1, u2, b1, b2, p, s] = c;
        BackgroundFields {
            u: vf(grid, u1, u2),
            b: vf(grid, b1, b2),
            p: sf(grid, p),
            s: sf(grid, s),
        }
    }

    pub fn comps(&self) -> Comps {
        [
            self.u.c[0].values.clone(),
            self.u.c[1].values.clone(),
            self.b.c[0].values.clone(),
            self.b.c[1].values.clone(),
            self.p.values.clone(),
            self.s.values.clone(),
        ]
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }
}

/// Closed-form evaluator `(t, x) -> six components`.
pub type PointFn = Arc<dyn Fn(f64, [f64; 2]) -> [f64; 6] + Send + Sync>;

fn sample_point_fn(f: &PointFn, grid: &Grid, t: f64) -> Comps {
    let mut c: Comps = std::array::from_fn(|_| Vec::with_capacity(grid.len()));
    for k in 0..grid.len() {
        let v = f(t, grid.cartesian(k / grid.n2, k % grid.n2));
        for (a, x) in c.iter_mut().zip(v) {
            a.push(x);
        }
    }
    c
}

/// Background state, static or time dependent.
#[derive(Clone)]
pub enum Background {
    Static(BackgroundFields),
    Analytic(PointFn),
    /// Snapshots at increasing times, linearly interpolated in `t`.
    Table { times: Vec<f64>, frames: Vec<Comps> },
}

impl fmt::Debug for Background {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Background::Static(_) => f.write_str("Background::Static"),
            Background::Analytic(_) => f.write_str("Background::Analytic"),
            Background::Table { times, .. } => write!(f, "Background::Table({} frames)", times.len()),
        }
    }
}

impl Background {
    pub fn constant(v: [f64; 6]) -> Self {
        Background::Analytic(Arc::new(move |_, _| v))
    }

    pub fn analytic(f: impl Fn(f64, [f64; 2]) -> [f64; 6] + Send + Sync + 'static) -> Self {
        Background::Analytic(Arc::new(f))
    }

    pub fn table(times: Vec<f64>, frames: Vec<Comps>) -> Result<Self> {
        if times.is_empty() || times.len() != frames.len() {
            return Err(Error::InsufficientData(
                "background table needs one frame per time".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "background table times must increase".into(),
            ));
        }
        Ok(Background::Table { times, frames })
    }

    pub fn sample_comps(&self, grid: &Grid, t: f64) -> Result<Comps> {
        match self {
            Background::Static(f) => {
                if f.grid() != grid {
                    return Err(Error::ShapeMismatch("background on a different grid".into()));
                }
                Ok(f.comps())
            }
            Background::Analytic(f) => Ok(sample_point_fn(f, grid, t)),
            Background::Table { times, frames } => {
                if frames[0][0].len() != grid.len() {
                    return Err(Error::ShapeMismatch("background table on a different grid".into()));
                }
                let n = times.len();
                if n == 1 || t <= times[0] {
                    return Ok(frames[0].clone());
                }
                if t >= times[n - 1] {
                    return Ok(frames[n - 1].clone());
                }
                let hi = times.partition_point(|&x| x <= t).min(n - 1);
                let lo = hi - 1;
                let w = (t - times[lo]) / (times[hi] - times[lo]);
                Ok(std::array::from_fn(|c| {
                    frames[lo][c]
                        .iter()
                        .zip(&frames[hi][c])
                        .map(|(a, b)| (1.0 - w) * a + w * b)
                        .collect()
                }))
            }
        }
    }

    pub fn sample(&self, grid: &Grid, t: f64) -> Result<BackgroundFields> {
        Ok(BackgroundFields::from_comps(grid, self.sample_comps(grid, t)?))
    }

    /// Checks `U.nu = B.nu = 0` (to `10 h^2`) and that values lie in `kbox`.
    pub fn validate(&self, grid: &Grid, t: f64, kbox: &KBox) -> Result<()> {
        let z = self.sample(grid, t)?;
        for (name, v) in [("U", &z.u), ("B", &z.b)] {
            let tr = max_normal_trace(v)?;
            let tol = trace_tolerance(grid, v.c[0].max_abs().max(v.c[1].max_abs()));
            if tr > tol {
                return Err(Error::Precondition {
                    detail: format!("{name}.nu does not vanish on the boundary"),
                    value: tr,
                    tol,
                });
            }
        }
        kbox.check(&z.comps(), t)
    }
}

/// Box `prod [lo_c, hi_c]` of admissible background values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KBox {
    pub lo: [f64; 6],
    pub hi: [f64; 6],
}

impl Default for KBox {
    /// `[-1, 1]^4 x [0.5, 2] x [-1, 1]`.
    fn default() -> Self {
        KBox {
            lo: [-1.0, -1.0, -1.0, -1.0, 0.5, -1.0],
            hi: [1.0, 1.0, 1.0, 1.0, 2.0, 1.0],
        }
    }
}

impl KBox {
    pub fn contains(&self, v: &[f64; 6]) -> bool {
        (0..6).all(|c| v[c] >= self.lo[c] && v[c] <= self.hi[c])
    }

    pub fn check(&self, c: &Comps, t: f64) -> Result<()> {
        for (ci, vals) in c.iter().enumerate() {
            if let Some((cell, v)) = vals
                .iter()
                .enumerate()
                .find(|(_, v)| **v < self.lo[ci] || **v > self.hi[ci])
            {
                return Err(Error::AdmissibleSetExcursion {
                    t,
                    detail: format!(
                        "component {} = {v} at cell {cell} outside [{}, {}]",
                        COMPONENTS[ci], self.lo[ci], self.hi[ci]
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Source `F = (F1, F2, F3, F4)` laid out like the state components.
#[derive(Clone, Default)]
pub enum SourceTerm {
    #[default]
    Zero,
    Analytic(PointFn),
}

impl fmt::Debug for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceTerm::Zero => f.write_str("SourceTerm::Zero"),
            SourceTerm::Analytic(_) => f.write_str("SourceTerm::Analytic"),
        }
    }
}

impl SourceTerm {
    pub fn analytic(f: impl Fn(f64, [f64; 2]) -> [f64; 6] + Send + Sync + 'static) -> Self {
        SourceTerm::Analytic(Arc::new(f))
    }

    pub fn sample_comps(&self, grid: &Grid, t: f64) -> Option<Comps> {
        match self {
            SourceTerm::Zero => None,
            SourceTerm::Analytic(f) => Some(sample_point_fn(f, grid, t)),
        }
    }

    /// Sampled components, zeros for [`SourceTerm::Zero`].
    pub fn sample_or_zero(&self, grid: &Grid, t: f64) -> Comps {
        self.sample_comps(grid, t)
            .unwrap_or_else(|| std::array::from_fn(|_| vec![0.0; grid.len()]))
    }

    /// Checks `F2.nu = 0` on the boundary to `10 h^2`.
    pub fn validate(&self, grid: &Grid, t: f64) -> Result<()> {
        if let Some(c) = self.sample_comps(grid, t) {
            let f2 = vf(grid, c[2].clone(), c[3].clone());
            let tr = max_normal_trace(&f2)?;
            let tol = trace_tolerance(grid, f2.c[0].max_abs().max(f2.c[1].max_abs()));
            if tr > tol {
                return Err(Error::Precondition {
                    detail: "F2.nu does not vanish on the boundary".into(),
                    value: tr,
                    tol,
                });
            }
        }
        Ok(())
    }
}
