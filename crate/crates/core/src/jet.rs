//! Second-order forward-mode automatic differentiation in `(t, x1, x2)`.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to the three independent variables. Closed-form data
//! generators (manufactured solutions, counterexample fields, corner
//! distance functions) are written once over `Jet` and yield exact first
//! and second derivatives, which the tests and source-term assembly use
//! as oracles.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Index of the time variable inside a jet.
pub const T: usize = 0;
/// Index of `x1`.
pub const X1: usize = 1;
/// Index of `x2`.
pub const X2: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; 3],
    pub dd: [[f64; 3]; 3],
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet {
            v,
            d: [0.0; 3],
            dd: [[0.0; 3]; 3],
        }
    }

    /// The independent variable with index `k`, evaluated at `v`.
    pub fn var(k: usize, v: f64) -> Self {
        let mut j = Jet::constant(v);
        j.d[k] = 1.0;
        j
    }

    /// Seeds `(t, x1, x2)` at a point.
    pub fn vars(t: f64, x1: f64, x2: f64) -> (Jet, Jet, Jet) {
        (Jet::var(T, t), Jet::var(X1, x1), Jet::var(X2, x2))
    }

    pub fn dt(&self) -> f64 {
        self.d[T]
    }

    pub fn dx(&self, i: usize) -> f64 {
        self.d[1 + i]
    }

    /// Spatial gradient.
    pub fn grad(&self) -> [f64; 2] {
        [self.d[X1], self.d[X2]]
    }

    pub fn dtt(&self) -> f64 {
        self.dd[T][T]
    }

    /// Mixed time-space derivative `d_t d_{x_i}`.
    pub fn dtx(&self, i: usize) -> f64 {
        self.dd[T][1 + i]
    }

    /// Spatial second derivative `d_{x_i} d_{x_j}`.
    pub fn dxx(&self, i: usize, j: usize) -> f64 {
        self.dd[1 + i][1 + j]
    }

    pub fn laplacian(&self) -> f64 {
        self.dd[X1][X1] + self.dd[X2][X2]
    }

    /// Applies a scalar function given its value and first two derivatives.
    fn chain(&self, f: f64, f1: f64, f2: f64) -> Jet {
        let mut out = Jet::constant(f);
        for a in 0..3 {
            out.d[a] = f1 * self.d[a];
            for b in 0..3 {
                out.dd[a][b] = f1 * self.dd[a][b] + f2 * self.d[a] * self.d[b];
            }
        }
        out
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Jet {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sqrt(self) -> Jet {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn powf(self, p: f64) -> Jet {
        let x = self.v;
        self.chain(
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
        )
    }

    pub fn powi(self, p: i32) -> Jet {
        let x = self.v;
        let pf = p as f64;
        let f1 = if p == 0 { 0.0 } else { pf * x.powi(p - 1) };
        let f2 = if p == 0 || p == 1 {
            0.0
        } else {
            pf * (pf - 1.0) * x.powi(p - 2)
        };
        self.chain(x.powi(p), f1, f2)
    }

    pub fn recip(self) -> Jet {
        let x = self.v;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    /// Two-argument arctangent `atan2(self, x)`.
    pub fn atan2(self, x: Jet) -> Jet {
        // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
        let y = self;
        let r2 = x * x + y * y;
        let mut out = Jet::constant(y.v.atan2(x.v));
        let r2v = r2.v;
        for a in 0..3 {
            out.d[a] = (x.v * y.d[a] - y.v * x.d[a]) / r2v;
        }
        for a in 0..3 {
            for b in 0..3 {
                let n_ab = x.d[b] * y.d[a] + x.v * y.dd[a][b] - y.d[b] * x.d[a] - y.v * x.dd[a][b];
                let n_a = x.v * y.d[a] - y.v * x.d[a];
                out.dd[a][b] = n_ab / r2v - n_a * r2.d[b] / (r2v * r2v);
            }
        }
        out
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut r = self;
        r.v += o.v;
        for a in 0..3 {
            r.d[a] += o.d[a];
            for b in 0..3 {
                r.dd[a][b] += o.dd[a][b];
            }
        }
        r
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut r = Jet::constant(self.v * o.v);
        for a in 0..3 {
            r.d[a] = self.d[a] * o.v + self.v * o.d[a];
            for b in 0..3 {
                r.dd[a][b] = self.dd[a][b] * o.v
                    + self.d[a] * o.d[b]
                    + self.d[b] * o.d[a]
                    + self.v * o.dd[a][b];
            }
        }
        r
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        let mut r = self;
        r.v += c;
        r
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, c: f64) -> Jet {
        self + (-c)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        let mut r = self;
        r.v *= c;
        for a in 0..3 {
            r.d[a] *= c;
            for b in 0..3 {
                r.dd[a][b] *= c;
            }
        }
        r
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, c: f64) -> Jet {
        self * (1.0 / c)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        -j + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j * self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, j: Jet) -> Jet {
        j.recip() * self
    }
}
