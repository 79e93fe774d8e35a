//! Model corner domains, their cell-centered grids, outward normals, the
//! tangential frame used by the anisotropic norms, and the corner matrices
//! `h^1`, `h^2` that correct the linearized induction equation.
//!
//! Two domain families are supported: the square `(0, delta)^2`, whose four
//! corners have flat legs, and the circular sector
//! `{0 < r < r0, 0 < theta < omega}` with its corner at the origin.
//! Grids are cell-centered, so no sample ever sits on the boundary or at a
//! corner point.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    Square,
    Sector,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainKind::Square => f.write_str("square"),
            DomainKind::Sector => f.write_str("sector"),
        }
    }
}

/// A model corner domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// Side length of the square.
    pub delta: f64,
    /// Opening angle of the sector, radians.
    pub omega: f64,
    /// Sector radius.
    pub r0: f64,
}

impl DomainSpec {
    pub fn unit_square() -> Self {
        DomainSpec {
            kind: DomainKind::Square,
            delta: 1.0,
            omega: PI / 2.0,
            r0: 1.0,
        }
    }

    pub fn square(delta: f64) -> Result<Self> {
        let spec = DomainSpec {
            delta,
            ..DomainSpec::unit_square()
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sector(omega: f64, r0: f64) -> Result<Self> {
        let spec = DomainSpec {
            kind: DomainKind::Sector,
            delta: 1.0,
            omega,
            r0,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the convex-angle and positivity invariants.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DomainKind::Square => {
                if !(self.delta > 0.0 && self.delta.is_finite()) {
                    return Err(Error::InvalidDomain(format!(
                        "square side must be positive, got {}",
                        self.delta
                    )));
                }
            }
            DomainKind::Sector => {
                if !(self.omega > 0.0 && self.omega < PI) {
                    return Err(Error::InvalidDomain(format!(
                        "sector angle must lie in (0, pi) (convex corner), got {}",
                        self.omega
                    )));
                }
                if !(self.r0 > 0.0 && self.r0.is_finite()) {
                    return Err(Error::InvalidDomain(format!(
                        "sector radius must be positive, got {}",
                        self.r0
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        match self.kind {
            DomainKind::Square => self.delta * self.delta,
            DomainKind::Sector => 0.5 * self.omega * self.r0 * self.r0,
        }
    }
}

/// Boundary faces. Squares use the four `X*` faces; sectors use the two
/// legs and the arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    /// `x1 = 0`
    X1Lo,
    /// `x1 = delta`
    X1Hi,
    /// `x2 = 0`
    X2Lo,
    /// `x2 = delta`
    X2Hi,
    /// `theta = 0`
    LegLo,
    /// `theta = omega`
    LegHi,
    /// `r = r0`
    Arc,
}

impl Face {
    pub const SQUARE: [Face; 4] = [Face::X1Lo, Face::X1Hi, Face::X2Lo, Face::X2Hi];
    pub const SECTOR: [Face; 3] = [Face::LegLo, Face::LegHi, Face::Arc];

    pub fn faces_of(kind: DomainKind) -> &'static [Face] {
        match kind {
            DomainKind::Square => &Face::SQUARE,
            DomainKind::Sector => &Face::SECTOR,
        }
    }

    fn belongs_to(self, kind: DomainKind) -> bool {
        Face::faces_of(kind).contains(&self)
    }

    /// Grid axis normal to the face (0 for `x1`/`r`, 1 for `x2`/`theta`).
    pub fn axis(self) -> usize {
        match self {
            Face::X1Lo | Face::X1Hi | Face::Arc => 0,
            Face::X2Lo | Face::X2Hi | Face::LegLo | Face::LegHi => 1,
        }
    }

    /// Whether the face sits at the high end of its axis.
    pub fn is_high(self) -> bool {
        matches!(self, Face::X1Hi | Face::X2Hi | Face::LegHi | Face::Arc)
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Face::X1Lo => "x1lo",
            Face::X1Hi => "x1hi",
            Face::X2Lo => "x2lo",
            Face::X2Hi => "x2hi",
            Face::LegLo => "leglo",
            Face::LegHi => "leghi",
            Face::Arc => "arc",
        };
        f.write_str(s)
    }
}

/// Cell-centered structured grid on a model domain.
///
/// Axis 0 is `x1` (square) or `r` (sector); axis 1 is `x2` or `theta`.
/// Cell `(i, j)` is stored at flat index `i * n2 + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub domain: DomainSpec,
    pub n1: usize,
    pub n2: usize,
    pub h1: f64,
    pub h2: f64,
}

pub fn make_grid(spec: DomainSpec, n1: usize, n2: usize) -> Result<Grid> {
    spec.validate()?;
    if n1 < 4 || n2 < 4 {
        return Err(Error::InvalidGrid(format!(
            "need at least 4 cells per direction, got {n1} x {n2}"
        )));
    }
    let (h1, h2) = match spec.kind {
        DomainKind::Square => (spec.delta / n1 as f64, spec.delta / n2 as f64),
        DomainKind::Sector => (spec.r0 / n1 as f64, spec.omega / n2 as f64),
    };
    Ok(Grid {
        domain: spec,
        n1,
        n2,
        h1,
        h2,
    })
}

impl Grid {
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> DomainKind {
        self.domain.kind
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }

    #[inline]
    pub fn coord1(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h1
    }

    #[inline]
    pub fn coord2(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.h2
    }

    /// Native node coordinates: `(x1, x2)` on squares, `(r, theta)` on sectors.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.coord1(i), self.coord2(j))
    }

    /// Cartesian position of cell `(i, j)`.
    pub fn cartesian(&self, i: usize, j: usize) -> [f64; 2] {
        let (a, b) = self.node(i, j);
        match self.kind() {
            DomainKind::Square => [a, b],
            DomainKind::Sector => [a * b.cos(), a * b.sin()],
        }
    }

    /// Quadrature weight (cell area) of cell `(i, _)`.
    #[inline]
    pub fn cell_area(&self, i: usize) -> f64 {
        match self.kind() {
            DomainKind::Square => self.h1 * self.h2,
            DomainKind::Sector => self.coord1(i) * self.h1 * self.h2,
        }
    }

    /// The smallest physical cell width, used in CFL bounds.
    pub fn min_spacing(&self) -> f64 {
        match self.kind() {
            DomainKind::Square => self.h1.min(self.h2),
            DomainKind::Sector => self.h1.min(0.5 * self.h1 * self.h2),
        }
    }

    /// Number of cells along a face.
    pub fn face_len(&self, face: Face) -> usize {
        if face.axis() == 0 {
            self.n2
        } else {
            self.n1
        }
    }

    /// Cell adjacent to the `index`-th point of a face.
    pub fn face_cell(&self, face: Face, index: usize) -> (usize, usize) {
        match face.axis() {
            0 => (if face.is_high() { self.n1 - 1 } else { 0 }, index),
            _ => (index, if face.is_high() { self.n2 - 1 } else { 0 }),
        }
    }

    fn check_face(&self, face: Face, index: usize) -> Result<()> {
        if !face.belongs_to(self.kind()) {
            return Err(Error::InvalidFace {
                face: face.to_string(),
                domain: match self.kind() {
                    DomainKind::Square => "square",
                    DomainKind::Sector => "sector",
                },
            });
        }
        if index >= self.face_len(face) {
            return Err(Error::InvalidArgument(format!(
                "face index {index} out of range for face {face}"
            )));
        }
        Ok(())
    }

    /// Cartesian position of the boundary point facing cell `index`.
    pub fn face_point(&self, face: Face, index: usize) -> Result<[f64; 2]> {
        self.check_face(face, index)?;
        let d = self.domain;
        Ok(match face {
            Face::X1Lo => [0.0, self.coord2(index)],
            Face::X1Hi => [d.delta, self.coord2(index)],
            Face::X2Lo => [self.coord1(index), 0.0],
            Face::X2Hi => [self.coord1(index), d.delta],
            Face::LegLo => [self.coord1(index), 0.0],
            Face::LegHi => {
                let r = self.coord1(index);
                [r * d.omega.cos(), r * d.omega.sin()]
            }
            Face::Arc => {
                let th = self.coord2(index);
                [d.r0 * th.cos(), d.r0 * th.sin()]
            }
        })
    }
}

/// Outward unit normal (Cartesian components) at the face point adjacent to
/// the indexed cell.
pub fn boundary_normal(grid: &Grid, face: Face, index: usize) -> Result<[f64; 2]> {
    grid.check_face(face, index)?;
    let omega = grid.domain.omega;
    Ok(match face {
        Face::X1Lo => [-1.0, 0.0],
        Face::X1Hi => [1.0, 0.0],
        Face::X2Lo => [0.0, -1.0],
        Face::X2Hi => [0.0, 1.0],
        Face::LegLo => [0.0, -1.0],
        // -e_theta at theta = omega is +(sin, -cos); outward is +e_theta.
        Face::LegHi => [-omega.sin(), omega.cos()],
        Face::Arc => {
            let th = grid.coord2(index);
            [th.cos(), th.sin()]
        }
    })
}

/// A polynomial in one variable, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::default();
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (a, ca) in self.0.iter().enumerate() {
            for (b, cb) in other.0.iter().enumerate() {
                out[a + b] += ca * cb;
            }
        }
        Poly(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|k| self.0.get(k).unwrap_or(&0.0) + other.0.get(k).unwrap_or(&0.0))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == 0.0)
    }
}

/// The global tangential frame on the square:
/// `w1 = (x1 (delta - x1), 0)`, `w2 = (0, x2 (delta - x2))`.
///
/// Each field only has one nonzero component, which depends on one
/// coordinate; `weight` is that component as a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentialFrame {
    pub delta: f64,
    pub weight: Poly,
}

pub fn tangential_frame(grid: &Grid) -> Result<TangentialFrame> {
    if grid.kind() != DomainKind::Square {
        return Err(Error::UnsupportedDomain(
            "tangential frame is provided on the square only".into(),
        ));
    }
    let delta = grid.domain.delta;
    Ok(TangentialFrame {
        delta,
        weight: Poly(vec![0.0, delta, -1.0]),
    })
}

impl TangentialFrame {
    pub fn w1(&self, x: [f64; 2]) -> [f64; 2] {
        [self.weight.eval(x[0]), 0.0]
    }

    pub fn w2(&self, x: [f64; 2]) -> [f64; 2] {
        [0.0, self.weight.eval(x[1])]
    }
}

type PhiFn = dyn Fn(Jet, Jet) -> [Jet; 2] + Send + Sync;

/// A pair of smooth functions whose zero sets are the two legs of a corner,
/// positive inside the domain. Evaluated with exact first and second
/// derivatives through [`Jet`].
#[derive(Clone)]
pub struct PhiPair {
    f: Arc<PhiFn>,
}

impl fmt::Debug for PhiPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PhiPair")
    }
}

impl PhiPair {
    pub fn new(f: impl Fn(Jet, Jet) -> [Jet; 2] + Send + Sync + 'static) -> Self {
        PhiPair { f: Arc::new(f) }
    }

    /// `Phi1 = x1`, `Phi2 = x2`: the flat legs at the origin corner of the square.
    pub fn flat() -> Self {
        PhiPair::new(|x1, x2| [x1, x2])
    }

    /// Flat legs of the square corner nearest to `x`. Every corner of the
    /// square has straight legs, so all second derivatives vanish.
    pub fn square_corner(delta: f64, x: [f64; 2]) -> Self {
        let lo1 = x[0] <= 0.5 * delta;
        let lo2 = x[1] <= 0.5 * delta;
        PhiPair::new(move |x1, x2| {
            let p1 = if lo1 { x1 } else { delta - x1 };
            let p2 = if lo2 { x2 } else { delta - x2 };
            [p1, p2]
        })
    }

    /// Leg distance functions of the sector corner at the origin:
    /// `Phi1 = x2`, `Phi2 = x1 sin(omega) - x2 cos(omega)`.
    pub fn sector_corner(omega: f64) -> Self {
        let (s, c) = omega.sin_cos();
        PhiPair::new(move |x1, x2| [x2, x1 * s - x2 * c])
    }

    pub fn eval(&self, x: [f64; 2]) -> [Jet; 2] {
        let (_, x1, x2) = Jet::vars(0.0, x[0], x[1]);
        (self.f)(x1, x2)
    }

    /// Extended normals `nu_l = -grad Phi_l`.
    pub fn normals(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let [p1, p2] = self.eval(x);
        let g1 = p1.grad();
        let g2 = p2.grad();
        [[-g1[0], -g1[1]], [-g2[0], -g2[1]]]
    }
}

pub type Mat2 = [[f64; 2]; 2];

/// The corner matrices `h^1`, `h^2` in closed form.
///
/// They satisfy `(h^i)^T nu_l = d_i nu_l` for both extended normals
/// `nu_l = -grad Phi_l`.
pub fn h_matrices(phi: &PhiPair, x: [f64; 2]) -> Result<(Mat2, Mat2)> {
    let [p1, p2] = phi.eval(x);
    let (d1p1, d2p1) = (p1.dx(0), p1.dx(1));
    let (d1p2, d2p2) = (p2.dx(0), p2.dx(1));
    let det = d1p1 * d2p2 - d1p2 * d2p1;
    let scale = (d1p1.hypot(d2p1) * d1p2.hypot(d2p2)).max(f64::MIN_POSITIVE);
    let threshold = 1e-12 * scale;
    if det.abs() < threshold {
        return Err(Error::SingularGeometry { det, threshold });
    }
    let build = |i: usize| -> Mat2 {
        let mut m = [[0.0; 2]; 2];
        for (j, col) in [0usize, 1].iter().enumerate() {
            let a = p1.dxx(i, *col);
            let b = p2.dxx(i, *col);
            m[0][j] = (d2p2 * a - d2p1 * b) / det;
            m[1][j] = (-d1p2 * a + d1p1 * b) / det;
        }
        m
    };
    Ok((build(0), build(1)))
}

/// `h(x, v) = v1 h^1 + v2 h^2`.
pub fn h_of(h: &(Mat2, Mat2), v: [f64; 2]) -> Mat2 {
    let mut m = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            m[a][b] = v[0] * h.0[a][b] + v[1] * h.1[a][b];
        }
    }
    m
}

pub fn mat2_vec(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// The zero-order induction correction `h(x,U) b - h(x,B) u`.
pub fn h_correction(h: &(Mat2, Mat2), big_u: [f64; 2], big_b: [f64; 2], u: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let hu = mat2_vec(&h_of(h, big_u), b);
    let hb = mat2_vec(&h_of(h, big_b), u);
    [hu[0] - hb[0], hu[1] - hb[1]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_nodes_are_cell_centers() {
        let g = make_grid(DomainSpec::unit_square(), 4, 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let x = g.cartesian(i, j);
                assert_abs_diff_eq!(x[0], 0.125 + 0.25 * i as f64, epsilon = 1e-15);
                assert_abs_diff_eq!(x[1], 0.125 + 0.25 * j as f64, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn sector_theta_nodes() {
        let g = make_grid(DomainSpec::sector(PI / 2.0, 1.0).unwrap(), 4, 4).unwrap();
        for j in 0..4 {
            assert_abs_diff_eq!(g.coord2(j), PI / 16.0 * (1.0 + 2.0 * j as f64), epsilon = 1e-15);
        }
        assert!(g.coord1(0) > 0.0);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(DomainSpec::sector(3.5, 1.0).is_err());
        assert!(DomainSpec::sector(PI, 1.0).is_err());
        assert!(DomainSpec::sector(1.0, -1.0).is_err());
        assert!(DomainSpec::square(0.0).is_err());
        assert!(make_grid(DomainSpec::unit_square(), 3, 8).is_err());
        let bad = DomainSpec {
            omega: 3.5,
            ..DomainSpec::sector(1.0, 1.0).unwrap()
        };
        assert!(make_grid(bad, 8, 8).is_err());
    }

    #[test]
    fn normals() {
        let sq = make_grid(DomainSpec::unit_square(), 8, 8).unwrap();
        assert_eq!(boundary_normal(&sq, Face::X1Lo, 3).unwrap(), [-1.0, 0.0]);
        assert!(boundary_normal(&sq, Face::Arc, 0).is_err());
        let omega = 1.1;
        let sec = make_grid(DomainSpec::sector(omega, 1.0).unwrap(), 8, 8).unwrap();
        assert_eq!(boundary_normal(&sec, Face::LegLo, 2).unwrap(), [0.0, -1.0]);
        let th = sec.coord2(5);
        let n = boundary_normal(&sec, Face::Arc, 5).unwrap();
        assert_abs_diff_eq!(n[0], th.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(n[1], th.sin(), epsilon = 1e-15);
        // outward at theta = omega: pointing toward larger theta
        let n = boundary_normal(&sec, Face::LegHi, 0).unwrap();
        let e_theta = [-omega.sin(), omega.cos()];
        assert_abs_diff_eq!(n[0] * e_theta[0] + n[1] * e_theta[1], 1.0, epsilon = 1e-15);
        for face in Face::SECTOR {
            for k in 0..8 {
                let n = boundary_normal(&sec, face, k).unwrap();
                assert_abs_diff_eq!(n[0].hypot(n[1]), 1.0, epsilon = 1e-15);
            }
        }
        assert!(sec.face_point(Face::X2Hi, 0).is_err());
    }

    #[test]
    fn frame_values() {
        let g = make_grid(DomainSpec::unit_square(), 8, 8).unwrap();
        let fr = tangential_frame(&g).unwrap();
        assert_eq!(fr.w1([0.5, 0.5]), [0.25, 0.0]);
        assert_eq!(fr.w2([0.5, 0.5]), [0.0, 0.25]);
        // tangency on the edges
        for face in Face::SQUARE {
            for k in 0..8 {
                let p = g.face_point(face, k).unwrap();
                let n = boundary_normal(&g, face, k).unwrap();
                let w1 = fr.w1(p);
                let w2 = fr.w2(p);
                assert_eq!(w1[0] * n[0] + w1[1] * n[1], 0.0);
                assert_eq!(w2[0] * n[0] + w2[1] * n[1], 0.0);
            }
        }
        let sec = make_grid(DomainSpec::sector(1.0, 1.0).unwrap(), 8, 8).unwrap();
        assert!(tangential_frame(&sec).is_err());
    }

    #[test]
    fn frame_agrees_with_corner_construction() {
        // Near the corner with Phi = (x1, x2) the corner form is
        // w^1 = -Phi_1 (d2 Phi_2, -d1 Phi_2) = (-x1, 0); the global frame
        // differs by the smooth nonvanishing factor -(1 - x1).
        let fr = TangentialFrame {
            delta: 1.0,
            weight: Poly(vec![0.0, 1.0, -1.0]),
        };
        for &x1 in &[1e-3, 1e-2, 5e-2] {
            let w = fr.w1([x1, 0.3]);
            let corner = [-x1, 0.0];
            assert_abs_diff_eq!(w[0] / corner[0], -(1.0 - x1), epsilon = 1e-14);
            assert_eq!(w[1], corner[1]);
        }
    }

    #[test]
    fn flat_legs_give_zero_h() {
        let (h1, h2) = h_matrices(&PhiPair::flat(), [0.2, 0.3]).unwrap();
        assert_eq!(h1, [[0.0; 2]; 2]);
        assert_eq!(h2, [[0.0; 2]; 2]);
        for corner in [[0.1, 0.1], [0.9, 0.1], [0.1, 0.9], [0.9, 0.9]] {
            let (h1, h2) = h_matrices(&PhiPair::square_corner(1.0, corner), corner).unwrap();
            assert_eq!(h1, [[0.0; 2]; 2]);
            assert_eq!(h2, [[0.0; 2]; 2]);
        }
    }

    #[test]
    fn curved_leg_example() {
        // Phi1 = x1 + x2^2, Phi2 = x2 at the origin.
        let phi = PhiPair::new(|x1, x2| [x1 + x2 * x2, x2]);
        let (_, h2) = h_matrices(&phi, [0.0, 0.0]).unwrap();
        let g = [1.0, 0.0]; // grad Phi1 at the origin
        let lhs = [h2[0][0] * g[0] + h2[1][0] * g[1], h2[0][1] * g[0] + h2[1][1] * g[1]];
        assert_abs_diff_eq!(lhs[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lhs[1], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_pair_rejected() {
        let phi = PhiPair::new(|x1, x2| [x1 + x2, (x1 + x2) * 2.0]);
        assert!(matches!(
            h_matrices(&phi, [0.1, 0.2]),
            Err(Error::SingularGeometry { .. })
        ));
    }

    #[test]
    fn poly_algebra() {
        let p = Poly(vec![0.0, 1.0, -1.0]);
        assert_eq!(p.eval(0.5), 0.25);
        assert_eq!(p.derivative(), Poly(vec![1.0, -2.0]));
        assert_eq!(p.mul(&Poly(vec![1.0, 1.0])).eval(2.0), -2.0 * 3.0);
        assert_eq!(p.add(&Poly(vec![1.0])).eval(0.0), 1.0);
    }
}
