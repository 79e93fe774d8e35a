//! One-dimensional finite-difference stencils of second order.
//!
//! Derivatives of order `k` use a centered stencil in the interior and a
//! shifted one-sided stencil with `k + 2` points near the ends of the axis,
//! so every row is second order accurate. Weights come from Fornberg's
//! recursion.

use crate::error::{Error, Result};

/// Fornberg weights for derivatives `0..=m` at `x0` on nodes `xs`.
///
/// Returns `w[k][j]`, the weight of node `j` in the `k`-th derivative.
pub fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Number of cells an order-`k` derivative needs along an axis.
pub fn min_cells(k: usize) -> usize {
    if k == 0 {
        1
    } else {
        k + 2
    }
}

/// Per-node stencils for the `k`-th derivative on a uniform cell-centered
/// axis with `n` cells of width `h`.
#[derive(Debug, Clone)]
pub struct Stencil1d {
    pub order: usize,
    pub n: usize,
    rows: Vec<(usize, Vec<f64>)>,
}

impl Stencil1d {
    pub fn new(n: usize, h: f64, k: usize) -> Result<Self> {
        if n < min_cells(k) {
            return Err(Error::StencilTooWide {
                needed: min_cells(k),
                have: n,
            });
        }
        if k == 0 {
            return Ok(Stencil1d {
                order: 0,
                n,
                rows: (0..n).map(|i| (i, vec![1.0])).collect(),
            });
        }
        let centered = if k % 2 == 0 { k + 1 } else { k + 2 };
        let half = centered / 2;
        let scale = h.powi(-(k as i32));
        let mut rows = Vec::with_capacity(n);
        // Interior rows share weights; cache the centered row.
        let xs: Vec<f64> = (0..centered).map(|j| j as f64 - half as f64).collect();
        let cw: Vec<f64> = fornberg(0.0, &xs, k)[k].iter().map(|w| w * scale).collect();
        for i in 0..n {
            if i >= half && i + half < n {
                rows.push((i - half, cw.clone()));
                continue;
            }
            let width = k + 2;
            let start = if i < half { 0 } else { n - width };
            let xs: Vec<f64> = (0..width).map(|j| (start + j) as f64 - i as f64).collect();
            let w = fornberg(0.0, &xs, k)[k].iter().map(|w| w * scale).collect();
            rows.push((start, w));
        }
        Ok(Stencil1d { order: k, n, rows })
    }

    /// Applies the stencil at node `i`, reading samples through `get`.
    #[inline]
    pub fn apply_at(&self, i: usize, get: impl Fn(usize) -> f64) -> f64 {
        let (start, w) = &self.rows[i];
        w.iter().enumerate().map(|(j, c)| c * get(start + j)).sum()
    }

    pub fn row(&self, i: usize) -> (usize, &[f64]) {
        let (s, w) = &self.rows[i];
        (*s, w)
    }
}

/// Quadratic extrapolation of samples at `x = h/2, 3h/2, 5h/2` to `x = 0`.
#[inline]
pub fn extrapolate_edge(v0: f64, v1: f64, v2: f64) -> f64 {
    (15.0 * v0 - 10.0 * v1 + 3.0 * v2) / 8.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fornberg(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_abs_diff_eq!(w[1][0], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1][2], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w[2][1], -2.0, epsilon = 1e-15);
    }

    #[test]
    fn stencils_are_second_order() {
        for k in 0..=6 {
            let errs: Vec<f64> = [32usize, 64]
                .iter()
                .map(|&n| {
                    let h = 1.0 / n as f64;
                    let st = Stencil1d::new(n, h, k).unwrap();
                    let x = |i: usize| (i as f64 + 0.5) * h;
                    let f = |x: f64| (1.3 * x).sin();
                    let exact = |x: f64| {
                        let ph = k as f64 * std::f64::consts::FRAC_PI_2;
                        1.3f64.powi(k as i32) * (1.3 * x + ph).sin()
                    };
                    (0..n)
                        .map(|i| (st.apply_at(i, |j| f(x(j))) - exact(x(i))).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            if k == 0 {
                assert!(errs[1] < 1e-14);
                continue;
            }
            let rate = (errs[0] / errs[1]).log2();
            assert!(rate > 1.8, "k = {k}: rate {rate}, errors {errs:?}");
        }
    }

    #[test]
    fn too_few_cells() {
        assert_eq!(
            Stencil1d::new(5, 0.1, 4).unwrap_err(),
            Error::StencilTooWide { needed: 6, have: 5 }
        );
    }

    #[test]
    fn edge_extrapolation_exact_for_quadratics() {
        let f = |x: f64| 2.0 - x + 3.0 * x * x;
        let h = 0.1;
        let v = extrapolate_edge(f(0.5 * h), f(1.5 * h), f(2.5 * h));
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-13);
    }
}
