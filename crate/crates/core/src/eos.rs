//! Equations of state `R(p, s)` with `d_p R` and `Q = R / d_p R`.

use crate::error::{Error, Result};
use crate::field::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EosKind {
    /// `R = p^{1/gamma} exp(-s/gamma)`.
    IdealGas { gamma: f64 },
    /// `R = 1 + epsilon p`.
    Affine { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosModel {
    pub kind: EosKind,
}

impl EosModel {
    pub fn ideal_gas(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidEos(format!("gamma must be positive, got {gamma}")));
        }
        Ok(EosModel {
            kind: EosKind::IdealGas { gamma },
        })
    }

    pub fn affine(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidEos(format!(
                "affine law needs epsilon > 0 so that d_p R > 0, got {epsilon}"
            )));
        }
        Ok(EosModel {
            kind: EosKind::Affine { epsilon },
        })
    }

    pub fn name(&self) -> String {
        match self.kind {
            EosKind::IdealGas { gamma } => format!("ideal_gas(gamma={gamma})"),
            EosKind::Affine { epsilon } => format!("affine(epsilon={epsilon})"),
        }
    }

    /// `(R, d_p R, Q)` at one point; `cell` is reported on failure.
    #[inline]
    pub fn eval_point(&self, p: f64, s: f64, cell: usize) -> Result<(f64, f64, f64)> {
        let out = match self.kind {
            EosKind::IdealGas { gamma } => {
                if !(p > 0.0) {
                    return Err(Error::EosDomain {
                        cell,
                        detail: format!("ideal gas needs p > 0, got p = {p}"),
                    });
                }
                let r = p.powf(1.0 / gamma) * (-s / gamma).exp();
                (r, r / (gamma * p), gamma * p)
            }
            EosKind::Affine { epsilon } => {
                let r = 1.0 + epsilon * p;
                if !(r > 0.0) {
                    return Err(Error::EosDomain {
                        cell,
                        detail: format!("affine law gives R = {r} <= 0 at p = {p}"),
                    });
                }
                (r, epsilon, r / epsilon)
            }
        };
        if !(out.0.is_finite() && out.2.is_finite()) {
            return Err(Error::EosDomain {
                cell,
                detail: format!("non-finite density at p = {p}, s = {s}"),
            });
        }
        Ok(out)
    }
}

/// Pointwise `(R, d_p R, Q)` fields.
pub fn eos_eval(
    eos: &EosModel,
    p: &ScalarField,
    s: &ScalarField,
) -> Result<(ScalarField, ScalarField, ScalarField)> {
    p.same_grid(s)?;
    let n = p.values.len();
    let (mut r, mut rp, mut q) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for k in 0..n {
        let (a, b, c) = eos.eval_point(p.values[k], s.values[k], k)?;
        r[k] = a;
        rp[k] = b;
        q[k] = c;
    }
    let g = &p.grid;
    Ok((
        ScalarField::new(g, r)?,
        ScalarField::new(g, rp)?,
        ScalarField::new(g, q)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ideal_gas_normalization() {
        let e = EosModel::ideal_gas(5.0 / 3.0).unwrap();
        let (r, rp, q) = e.eval_point(1.0, 0.0, 0).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rp, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(q, 5.0 / 3.0, epsilon = 1e-15);
        assert!(matches!(e.eval_point(-1.0, 0.0, 4), Err(Error::EosDomain { cell: 4, .. })));
    }

    #[test]
    fn affine_law() {
        assert!(EosModel::affine(0.0).is_err());
        let e = EosModel::affine(0.1).unwrap();
        let (r, _, q) = e.eval_point(2.0, 0.3, 0).unwrap();
        assert_abs_diff_eq!(r, 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(q, 12.0, epsilon = 1e-12);
    }

    #[test]
    fn ideal_gas_derivative_matches_difference_quotient() {
        let e = EosModel::ideal_gas(1.4).unwrap();
        let (p, s, h) = (1.7, 0.3, 1e-6);
        let (_, rp, _) = e.eval_point(p, s, 0).unwrap();
        let fd = (e.eval_point(p + h, s, 0).unwrap().0 - e.eval_point(p - h, s, 0).unwrap().0) / (2.0 * h);
        assert_abs_diff_eq!(rp, fd, epsilon = 1e-9);
    }
}
