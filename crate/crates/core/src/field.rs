//! Sampled scalar and vector fields on a [`Grid`].

use crate::error::{Error, Result};
use crate::geometry::{DomainKind, Grid};

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(ScalarField {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f` at Cartesian cell positions.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        Self::from_index_fn(grid, |i, j| f(grid.cartesian(i, j)))
    }

    /// Samples `f` at native node coordinates (`(x1, x2)` or `(r, theta)`).
    pub fn from_native_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_index_fn(grid, |i, j| f(grid.coord1(i), grid.coord2(j)))
    }

    pub fn from_index_fn(grid: &Grid, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n1 {
            for j in 0..grid.n2 {
                values.push(f(i, j));
            }
        }
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n2 + j]
    }

    pub fn same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Index of the first non-finite value, if any.
    pub fn first_nonfinite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Midpoint-rule integral.
    pub fn integral(&self) -> f64 {
        let g = &self.grid;
        let terms: Vec<f64> = (0..g.len())
            .map(|k| self.values[k] * g.cell_area(k / g.n2))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.grid.domain.area()
    }

    /// Midpoint-rule `L^2` inner product.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        let g = &self.grid;
        let terms: Vec<f64> = (0..g.len())
            .map(|k| self.values[k] * other.values[k] * g.cell_area(k / g.n2))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        self.map(|v| c * v)
    }
}

/// Basis of the components of a [`VectorField`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Cartesian,
    /// `(e_r, e_theta)`; sectors only.
    Polar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub c: [ScalarField; 2],
    pub basis: Basis,
}

impl VectorField {
    pub fn new(c1: ScalarField, c2: ScalarField, basis: Basis) -> Result<Self> {
        c1.same_grid(&c2)?;
        if basis == Basis::Polar && c1.grid.kind() != DomainKind::Sector {
            return Err(Error::UnsupportedDomain(
                "polar components are only defined on sectors".into(),
            ));
        }
        Ok(VectorField { c: [c1, c2], basis })
    }

    pub fn cartesian(c1: ScalarField, c2: ScalarField) -> Result<Self> {
        Self::new(c1, c2, Basis::Cartesian)
    }

    pub fn zeros(grid: &Grid) -> Self {
        VectorField {
            c: [ScalarField::zeros(grid), ScalarField::zeros(grid)],
            basis: Basis::Cartesian,
        }
    }

    /// Samples a Cartesian vector function at Cartesian cell positions.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let vals: Vec<[f64; 2]> = (0..grid.len())
            .map(|k| f(grid.cartesian(k / grid.n2, k % grid.n2)))
            .collect();
        VectorField {
            c: [
                ScalarField::new(grid, vals.iter().map(|v| v[0]).collect()).unwrap(),
                ScalarField::new(grid, vals.iter().map(|v| v[1]).collect()).unwrap(),
            ],
            basis: Basis::Cartesian,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.c[0].grid
    }

    #[inline]
    pub fn at(&self, k: usize) -> [f64; 2] {
        [self.c[0].values[k], self.c[1].values[k]]
    }

    fn rotated(&self, sign: f64, basis: Basis) -> Result<VectorField> {
        let g = self.grid();
        if g.kind() != DomainKind::Sector {
            return Err(Error::UnsupportedDomain(
                "basis change requires a sector grid".into(),
            ));
        }
        let mut a = self.c[0].clone();
        let mut b = self.c[1].clone();
        for k in 0..g.len() {
            let (s, c) = g.coord2(k % g.n2).sin_cos();
            let (x, y) = (self.c[0].values[k], self.c[1].values[k]);
            // Cartesian -> polar uses the rotation by -theta.
            a.values[k] = c * x + sign * s * y;
            b.values[k] = -sign * s * x + c * y;
        }
        Ok(VectorField { c: [a, b], basis })
    }

    pub fn to_polar(&self) -> Result<VectorField> {
        match self.basis {
            Basis::Polar => Ok(self.clone()),
            Basis::Cartesian => self.rotated(1.0, Basis::Polar),
        }
    }

    pub fn to_cartesian(&self) -> Result<VectorField> {
        match self.basis {
            Basis::Cartesian => Ok(self.clone()),
            Basis::Polar => self.rotated(-1.0, Basis::Cartesian),
        }
    }

    pub fn magnitude(&self) -> ScalarField {
        self.c[0].zip(&self.c[1], |a, b| a.hypot(b))
    }

    pub fn l2_norm(&self) -> f64 {
        (self.c[0].inner(&self.c[0]) + self.c[1].inner(&self.c[1])).sqrt()
    }

    pub fn inner(&self, other: &VectorField) -> f64 {
        self.c[0].inner(&other.c[0]) + self.c[1].inner(&other.c[1])
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField {
            c: [self.c[0].sub(&other.c[0]), self.c[1].sub(&other.c[1])],
            basis: self.basis,
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            c: [self.c[0].add(&other.c[0]), self.c[1].add(&other.c[1])],
            basis: self.basis,
        }
    }

    pub fn scale(&self, s: f64) -> VectorField {
        VectorField {
            c: [self.c[0].scale(s), self.c[1].scale(s)],
            basis: self.basis,
        }
    }
}
