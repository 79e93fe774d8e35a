use nalgebra::{Matrix6, SymmetricEigen};

use super::state::{Background, State};
use crate::eos::EosModel;
use crate::error::{Error, Result};
use crate::geometry::{h_correction, h_matrices, DomainKind, Face, Grid, Mat2, PhiPair};

/// Coefficient matrices of `L(Z) = A0 d_t + A1 d_1 + A2 d_2` at one point,
/// the symmetrizer `S0` and the corner matrices entering the zero-order term.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffBundle {
    pub s0: Matrix6<f64>,
    pub s0a0: Matrix6<f64>,
    pub s0a1: Matrix6<f64>,
    pub s0a2: Matrix6<f64>,
    pub a0: Matrix6<f64>,
    pub a1: Matrix6<f64>,
    pub a2: Matrix6<f64>,
    pub h: (Mat2, Mat2),
    zb: [f64; 6],
}

impl CoeffBundle {
    /// The zero-order map `z -> (0, 0, h(x,U) b - h(x,B) u, 0, 0)`.
    pub fn bterm(&self, z: &[f64; 6]) -> [f64; 6] {
        let c = h_correction(
            &self.h,
            [self.zb[0], self.zb[1]],
            [self.zb[2], self.zb[3]],
            [z[0], z[1]],
            [z[2], z[3]],
        );
        [0.0, 0.0, c[0], c[1], 0.0, 0.0]
    }

    /// `nu1 S0 A1 + nu2 S0 A2`.
    pub fn boundary_matrix(&self, nu: [f64; 2]) -> Matrix6<f64> {
        self.s0a1 * nu[0] + self.s0a2 * nu[1]
    }
}

/// `max |M - M^T|`.
pub fn symmetry_defect(m: &Matrix6<f64>) -> f64 {
    (m - m.transpose()).abs().max()
}

pub fn min_eigenvalue(m: &Matrix6<f64>) -> f64 {
    SymmetricEigen::new(*m).eigenvalues.min()
}

/// Assembles the matrices at a background value `zb = (U1, U2, B1, B2, P, S)`.
pub fn coeffs_point(zb: [f64; 6], eos: &EosModel, h: (Mat2, Mat2), cell: usize) -> Result<CoeffBundle> {
    let (r, _, q) = eos.eval_point(zb[4], zb[5], cell)?;
    if !(q > 0.0 && r > 0.0) {
        return Err(Error::EosDomain {
            cell,
            detail: format!("need R > 0 and Q > 0, got R = {r}, Q = {q}"),
        });
    }
    let (u1, u2, b1, b2) = (zb[0], zb[1], zb[2], zb[3]);
    let bv = [b1, b2];

    let mut s0 = Matrix6::identity();
    s0[(2, 4)] = -b1;
    s0[(3, 4)] = -b2;

    // b/pvar block of S0 A0
    let mut blk = [[0.0; 3]; 3];
    for i in 0..2 {
        for j in 0..2 {
            blk[i][j] = if i == j { 1.0 } else { 0.0 } + bv[i] * bv[j] / q;
        }
        blk[i][2] = -bv[i] / q;
        blk[2][i] = -bv[i] / q;
    }
    blk[2][2] = 1.0 / q;

    let mut s0a0 = Matrix6::zeros();
    s0a0[(0, 0)] = r;
    s0a0[(1, 1)] = r;
    s0a0[(5, 5)] = 1.0;
    for i in 0..3 {
        for j in 0..3 {
            s0a0[(2 + i, 2 + j)] = blk[i][j];
        }
    }

    let directional = |uk: f64, bk: f64, k: usize| {
        let mut m = Matrix6::zeros();
        m[(0, 0)] = r * uk;
        m[(1, 1)] = r * uk;
        m[(0, 2)] = -bk;
        m[(2, 0)] = -bk;
        m[(1, 3)] = -bk;
        m[(3, 1)] = -bk;
        m[(k, 4)] = 1.0;
        m[(4, k)] = 1.0;
        for i in 0..3 {
            for j in 0..3 {
                m[(2 + i, 2 + j)] = uk * blk[i][j];
            }
        }
        m[(5, 5)] = uk;
        m
    };
    let s0a1 = directional(u1, b1, 0);
    let s0a2 = directional(u2, b2, 1);

    let s0inv = s0.try_inverse().ok_or_else(|| {
        Error::InvalidArgument("symmetrizer is not invertible".into())
    })?;
    Ok(CoeffBundle {
        a0: s0inv * s0a0,
        a1: s0inv * s0a1,
        a2: s0inv * s0a2,
        s0,
        s0a0,
        s0a1,
        s0a2,
        h,
        zb,
    })
}

/// Corner matrices at a cell: zero on the square (flat legs), from the
/// sector leg functions otherwise.
pub fn h_at(grid: &Grid, cell: usize) -> Result<(Mat2, Mat2)> {
    let x = grid.cartesian(cell / grid.n2, cell % grid.n2);
    let phi = match grid.kind() {
        DomainKind::Square => PhiPair::square_corner(grid.domain.delta, x),
        DomainKind::Sector => PhiPair::sector_corner(grid.domain.omega),
    };
    h_matrices(&phi, x)
}

pub fn assemble_coeffs(
    bg: &Background,
    grid: &Grid,
    eos: &EosModel,
    cell: usize,
    t: f64,
) -> Result<CoeffBundle> {
    if cell >= grid.len() {
        return Err(Error::InvalidArgument(format!("cell {cell} out of range")));
    }
    let c = bg.sample_comps(grid, t)?;
    let zb = std::array::from_fn(|k| c[k][cell]);
    coeffs_point(zb, eos, h_at(grid, cell)?, cell)
}

/// `<z, A_nu z>` with `A_nu = nu1 S0 A1 + nu2 S0 A2` at a boundary point.
/// When `U.nu = B.nu = 0` this equals `2 pvar (u.nu)`.
pub fn boundary_quadratic(z: &[f64; 6], zb: [f64; 6], eos: &EosModel, nu: [f64; 2]) -> Result<f64> {
    let c = coeffs_point(zb, eos, ([[0.0; 2]; 2], [[0.0; 2]; 2]), 0)?;
    let m = c.boundary_matrix(nu);
    let v = nalgebra::Vector6::from_column_slice(z);
    Ok(v.dot(&(m * v)))
}

/// [`boundary_quadratic`] at the `index`-th point of `face`, using the
/// adjacent cell values of `z` and the background at time `t`.
pub fn boundary_quadratic_at(
    z: &State,
    bg: &Background,
    eos: &EosModel,
    face: Face,
    index: usize,
    t: f64,
) -> Result<f64> {
    let g = z.grid();
    let nu = crate::geometry::boundary_normal(g, face, index)?;
    let (i, j) = g.face_cell(face, index);
    let k = g.idx(i, j);
    let zc = z.comps();
    let bc = bg.sample_comps(g, t)?;
    let zv = std::array::from_fn(|c| zc[c][k]);
    let zb = std::array::from_fn(|c| bc[c][k]);
    boundary_quadratic(&zv, zb, eos, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::EosModel;
    use approx::assert_abs_diff_eq;

    const ZERO_H: (Mat2, Mat2) = ([[0.0; 2]; 2], [[0.0; 2]; 2]);

    #[test]
    fn trivial_background() {
        let eos = EosModel::affine(1.0).unwrap();
        // p = 0 gives R = 1, Q = 1
        let c = coeffs_point([0.0; 6], &eos, ZERO_H, 0).unwrap();
        assert_eq!(c.s0a0, Matrix6::identity());
        let mut e1 = Matrix6::zeros();
        e1[(0, 4)] = 1.0;
        e1[(4, 0)] = 1.0;
        assert_eq!(c.s0a1, e1);
        let mut e2 = Matrix6::zeros();
        e2[(1, 4)] = 1.0;
        e2[(4, 1)] = 1.0;
        assert_eq!(c.s0a2, e2);
    }

    #[test]
    fn magnetic_block() {
        // affine with epsilon = 1 and p = 1: R = 2, Q = 2
        let eos = EosModel::affine(1.0).unwrap();
        let c = coeffs_point([0.0, 0.0, 1.0, 0.0, 1.0, 0.0], &eos, ZERO_H, 0).unwrap();
        let want = [[1.5, 0.0, -0.5], [0.0, 1.0, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(c.s0a0[(2 + i, 2 + j)], want[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn a_matrices_reproduce_the_rows() {
        // A0 z_t + A1 z_1 + A2 z_2 written out row by row
        let eos = EosModel::ideal_gas(1.4).unwrap();
        let zb = [0.3, -0.2, 0.7, 0.4, 1.3, 0.1];
        let c = coeffs_point(zb, &eos, ZERO_H, 0).unwrap();
        let (r, _, q) = eos.eval_point(zb[4], zb[5], 0).unwrap();
        let zt = nalgebra::Vector6::new(0.1, 0.5, -0.3, 0.2, 0.9, -0.4);
        let z1 = nalgebra::Vector6::new(-0.6, 0.2, 0.8, 0.1, 0.3, 0.5);
        let z2 = nalgebra::Vector6::new(0.4, -0.7, 0.2, -0.5, 0.6, 0.2);
        let got = c.a0 * zt + c.a1 * z1 + c.a2 * z2;
        let (uu, bb) = ([zb[0], zb[1]], [zb[2], zb[3]]);
        let adv = |k: usize, v: [f64; 2]| v[0] * z1[k] + v[1] * z2[k];
        let divu = z1[0] + z2[1];
        let dt_b = [zt[2] + adv(2, uu), zt[3] + adv(3, uu)];
        let want = [
            r * (zt[0] + adv(0, uu)) + z1[4] - adv(2, bb),
            r * (zt[1] + adv(1, uu)) + z2[4] - adv(3, bb),
            dt_b[0] - adv(0, bb) + bb[0] * divu,
            dt_b[1] - adv(1, bb) + bb[1] * divu,
            (zt[4] + adv(4, uu) - bb[0] * dt_b[0] - bb[1] * dt_b[1]) / q + divu,
            zt[5] + adv(5, uu),
        ];
        for k in 0..6 {
            assert_abs_diff_eq!(got[k], want[k], epsilon = 1e-13);
        }
    }

    #[test]
    fn boundary_identity() {
        let eos = EosModel::ideal_gas(5.0 / 3.0).unwrap();
        let nu = [0.6, 0.8];
        let tang = [-0.8, 0.6];
        let zb = [0.4 * tang[0], 0.4 * tang[1], -0.3 * tang[0], -0.3 * tang[1], 1.1, 0.2];
        let z = [0.3, -0.1, 0.5, 0.7, 3.0, -0.4];
        let q = boundary_quadratic(&z, zb, &eos, nu).unwrap();
        assert_abs_diff_eq!(q, 2.0 * 3.0 * (0.3 * 0.6 - 0.1 * 0.8), epsilon = 1e-13);
        let u_nu = [nu[0], nu[1], 0.0, 0.0, 3.0, 0.0];
        assert_abs_diff_eq!(boundary_quadratic(&u_nu, zb, &eos, nu).unwrap(), 6.0, epsilon = 1e-13);
    }

    #[test]
    fn square_has_no_corner_term() {
        let g = crate::geometry::make_grid(crate::geometry::DomainSpec::unit_square(), 8, 8).unwrap();
        let eos = EosModel::ideal_gas(1.4).unwrap();
        let bg = Background::constant([0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        for cell in [0, 9, 63] {
            let c = assemble_coeffs(&bg, &g, &eos, cell, 0.0).unwrap();
            assert_eq!(c.bterm(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), [0.0; 6]);
        }
    }
}
