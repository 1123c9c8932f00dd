//! Truncated multivariate Taylor arithmetic (forward-mode differentiation up to
//! third order).
//!
//! A [`Jet`] carries the value of a function together with all of its partial
//! derivatives up to a fixed order `0..=3` with respect to `nvars` variables.
//! Derivative arrays are stored densely and fully (not just the upper
//! triangle), so `d2[i * n + j] == d2[j * n + i]` and `d3` is totally
//! symmetric. Binary operations truncate to the smaller order of the two
//! operands.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Highest derivative order a jet can carry.
pub const MAX_ORDER: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    nvars: usize,
    order: usize,
    value: f64,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

impl Jet {
    /// A constant: all derivatives zero.
    pub fn constant(nvars: usize, order: usize, value: f64) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let n = nvars;
        Jet {
            nvars,
            order,
            value,
            d1: if order >= 1 { vec![0.0; n] } else { Vec::new() },
            d2: if order >= 2 { vec![0.0; n * n] } else { Vec::new() },
            d3: if order >= 3 { vec![0.0; n * n * n] } else { Vec::new() },
        }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(nvars: usize, order: usize, index: usize, value: f64) -> Self {
        assert!(index < nvars, "variable index {index} out of range for {nvars} vars");
        let mut jet = Jet::constant(nvars, order, value);
        if order >= 1 {
            jet.d1[index] = 1.0;
        }
        jet
    }

    /// Seeds one variable per coordinate of `point`.
    pub fn seed(point: &[f64], order: usize) -> Vec<Jet> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(n, order, i, x))
            .collect()
    }

    /// Builds a jet from explicit derivative arrays. `d2`/`d3` may be omitted,
    /// which fixes the order.
    pub fn from_parts(value: f64, d1: Vec<f64>, d2: Option<Vec<f64>>, d3: Option<Vec<f64>>) -> Self {
        let n = d1.len();
        let order = match (&d2, &d3) {
            (Some(_), Some(_)) => 3,
            (Some(_), None) => 2,
            (None, None) => 1,
            (None, Some(_)) => panic!("third derivatives supplied without second derivatives"),
        };
        let d2 = d2.unwrap_or_default();
        let d3 = d3.unwrap_or_default();
        if order >= 2 {
            assert_eq!(d2.len(), n * n, "second-derivative array has wrong length");
        }
        if order >= 3 {
            assert_eq!(d3.len(), n * n * n, "third-derivative array has wrong length");
        }
        Jet { nvars: n, order, value, d1, d2, d3 }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Gradient; empty for order-0 jets.
    pub fn gradient(&self) -> &[f64] {
        &self.d1
    }

    pub fn d1(&self, i: usize) -> f64 {
        self.d1[i]
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        self.d2[i * self.nvars + j]
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.nvars;
        self.d3[(i * n + j) * n + k]
    }

    /// Drops derivative information above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        let mut out = self.clone();
        out.order = order;
        if order < 3 {
            out.d3 = Vec::new();
        }
        if order < 2 {
            out.d2 = Vec::new();
        }
        if order < 1 {
            out.d1 = Vec::new();
        }
        out
    }

    /// The jet of `∂f/∂x_k`, one order lower.
    pub fn partial(&self, k: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.nvars;
        let order = self.order - 1;
        let d1 = if order >= 1 { self.d2[k * n..(k + 1) * n].to_vec() } else { Vec::new() };
        let d2 = if order >= 2 { self.d3[k * n * n..(k + 1) * n * n].to_vec() } else { Vec::new() };
        Jet { nvars: n, order, value: self.d1[k], d1, d2, d3: Vec::new() }
    }

    fn zip_linear(&self, other: &Jet, a: f64, b: f64) -> Jet {
        assert_eq!(self.nvars, other.nvars, "jets over different variable counts");
        let order = self.order.min(other.order);
        let comb = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        Jet {
            nvars: self.nvars,
            order,
            value: a * self.value + b * other.value,
            d1: if order >= 1 { comb(&self.d1, &other.d1) } else { Vec::new() },
            d2: if order >= 2 { comb(&self.d2, &other.d2) } else { Vec::new() },
            d3: if order >= 3 { comb(&self.d3, &other.d3) } else { Vec::new() },
        }
    }

    fn scaled(&self, s: f64) -> Jet {
        Jet {
            nvars: self.nvars,
            order: self.order,
            value: s * self.value,
            d1: self.d1.iter().map(|v| s * v).collect(),
            d2: self.d2.iter().map(|v| s * v).collect(),
            d3: self.d3.iter().map(|v| s * v).collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        assert_eq!(self.nvars, other.nvars, "jets over different variable counts");
        let n = self.nvars;
        let order = self.order.min(other.order);
        let (a, b) = (self, other);
        let mut out = Jet::constant(n, order, a.value * b.value);
        if order >= 1 {
            for i in 0..n {
                out.d1[i] = a.d1[i] * b.value + a.value * b.d1[i];
            }
        }
        if order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    let ij = i * n + j;
                    out.d2[ij] = a.d2[ij] * b.value
                        + a.d1[i] * b.d1[j]
                        + a.d1[j] * b.d1[i]
                        + a.value * b.d2[ij];
                }
            }
        }
        if order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let ijk = (i * n + j) * n + k;
                        let (ij, ik, jk) = (i * n + j, i * n + k, j * n + k);
                        out.d3[ijk] = a.d3[ijk] * b.value
                            + a.d2[ij] * b.d1[k]
                            + a.d2[ik] * b.d1[j]
                            + a.d2[jk] * b.d1[i]
                            + a.d1[i] * b.d2[jk]
                            + a.d1[j] * b.d2[ik]
                            + a.d1[k] * b.d2[ij]
                            + a.value * b.d3[ijk];
                    }
                }
            }
        }
        out
    }

    /// Applies a univariate function given its value and first three
    /// derivatives at `self.value()` (Faà di Bruno to third order).
    pub fn compose(&self, f: [f64; 4]) -> Jet {
        let n = self.nvars;
        let a = self;
        let mut out = Jet::constant(n, self.order, f[0]);
        if self.order >= 1 {
            for i in 0..n {
                out.d1[i] = f[1] * a.d1[i];
            }
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    let ij = i * n + j;
                    out.d2[ij] = f[2] * a.d1[i] * a.d1[j] + f[1] * a.d2[ij];
                }
            }
        }
        if self.order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let ijk = (i * n + j) * n + k;
                        let (ij, ik, jk) = (i * n + j, i * n + k, j * n + k);
                        out.d3[ijk] = f[3] * a.d1[i] * a.d1[j] * a.d1[k]
                            + f[2] * (a.d2[ij] * a.d1[k] + a.d2[ik] * a.d1[j] + a.d2[jk] * a.d1[i])
                            + f[1] * a.d3[ijk];
                    }
                }
            }
        }
        out
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.compose([e, e, e, e])
    }

    pub fn ln(&self) -> Jet {
        let x = self.value;
        self.compose([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    pub fn recip(&self) -> Jet {
        let x = self.value;
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn powi(&self, k: i32) -> Jet {
        let x = self.value;
        let kf = f64::from(k);
        self.compose([
            x.powi(k),
            kf * x.powi(k - 1),
            kf * (kf - 1.0) * x.powi(k - 2),
            kf * (kf - 1.0) * (kf - 2.0) * x.powi(k - 3),
        ])
    }

    pub fn powf(&self, p: f64) -> Jet {
        let x = self.value;
        self.compose([
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0),
        ])
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    /// Constant with the same shape as `self`.
    pub fn lift(&self, value: f64) -> Jet {
        Jet::constant(self.nvars, self.order, value)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip_linear(rhs, 1.0, 1.0)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip_linear(rhs, 1.0, -1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.product(rhs)
    }
}

impl Div for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        self.product(&rhs.recip())
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scaled(-1.0)
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scaled(-1.0)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.value += rhs;
        out
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scaled(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scaled(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scaled(self)
    }
}

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs.scaled(self)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        *self = self.zip_linear(rhs, 1.0, 1.0);
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = self.zip_linear(&rhs, 1.0, 1.0);
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        *self = self.zip_linear(rhs, 1.0, -1.0);
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = self.zip_linear(&rhs, 1.0, -1.0);
    }
}
