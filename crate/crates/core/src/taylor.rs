//! Truncated bivariate Taylor arithmetic of order 3.
//!
//! A [`T3`] carries the value and all partial derivatives of a scalar
//! expression up to third order at a point, propagated exactly (to machine
//! precision) through arithmetic and elementary functions. Coefficients are
//! stored in Taylor form, i.e. divided by the factorials of the multi-index,
//! so that multiplication is plain polynomial convolution.

use std::ops::{Add, Div, Mul, Neg, Sub};

// coefficient layout: index of dx^i dy^j
const C: usize = 0;
const DX: usize = 1;
const DY: usize = 2;
const DXX: usize = 3;
const DXY: usize = 4;
const DYY: usize = 5;
const DXXX: usize = 6;
const DXXY: usize = 7;
const DXYY: usize = 8;
const DYYY: usize = 9;

/// (i, j) exponents for each slot.
const EXP: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

fn slot(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => C,
        (1, 0) => DX,
        (0, 1) => DY,
        (2, 0) => DXX,
        (1, 1) => DXY,
        (0, 2) => DYY,
        (3, 0) => DXXX,
        (2, 1) => DXXY,
        (1, 2) => DXYY,
        (0, 3) => DYYY,
        _ => unreachable!(),
    }
}

/// Order-3 truncated Taylor scalar in two seed variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct T3 {
    c: [f64; 10],
}

impl T3 {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; 10];
        c[C] = v;
        T3 { c }
    }

    /// Seed for the first independent variable.
    pub fn var_x(v: f64) -> Self {
        let mut t = T3::constant(v);
        t.c[DX] = 1.0;
        t
    }

    /// Seed for the second independent variable.
    pub fn var_y(v: f64) -> Self {
        let mut t = T3::constant(v);
        t.c[DY] = 1.0;
        t
    }

    pub fn value(&self) -> f64 {
        self.c[C]
    }

    /// Partial derivative ∂^{i+j} / ∂x^i ∂y^j (factorials restored).
    pub fn deriv(&self, i: usize, j: usize) -> f64 {
        const FACT: [f64; 4] = [1.0, 1.0, 2.0, 6.0];
        self.c[slot(i, j)] * FACT[i] * FACT[j]
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// Composition with a univariate function given by its value and first
    /// three derivatives at `self.value()`.
    pub fn compose(self, g: [f64; 4]) -> Self {
        let mut u = self;
        u.c[C] = 0.0; // nilpotent part
        let u2 = u * u;
        let u3 = u2 * u;
        let mut r = T3::constant(g[0]);
        for k in 0..10 {
            r.c[k] += g[1] * u.c[k] + g[2] / 2.0 * u2.c[k] + g[3] / 6.0 * u3.c[k];
        }
        r
    }

    pub fn exp(self) -> Self {
        let e = self.value().exp();
        self.compose([e, e, e, e])
    }

    pub fn ln(self) -> Self {
        let v = self.value();
        self.compose([v.ln(), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)])
    }

    pub fn sqrt(self) -> Self {
        let v = self.value();
        let s = v.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (v * s), 0.375 / (v * v * s)])
    }

    pub fn powf(self, p: f64) -> Self {
        let v = self.value();
        self.compose([
            v.powf(p),
            p * v.powf(p - 1.0),
            p * (p - 1.0) * v.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * v.powf(p - 3.0),
        ])
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => T3::constant(1.0),
            1 => self,
            2 => self * self,
            _ if n > 0 => {
                let h = self.powi(n / 2);
                if n % 2 == 0 {
                    h * h
                } else {
                    h * h * self
                }
            }
            _ => self.powi(-n).recip(),
        }
    }

    pub fn recip(self) -> Self {
        let v = self.value();
        self.compose([
            1.0 / v,
            -1.0 / (v * v),
            2.0 / (v * v * v),
            -6.0 / (v * v * v * v),
        ])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tanh(self) -> Self {
        let t = stable_tanh(self.value());
        let s = stable_sech2(self.value());
        // tanh' = sech², tanh'' = -2 sech² tanh, tanh''' = 4 sech² tanh² - 2 sech⁴
        self.compose([t, s, -2.0 * s * t, 4.0 * s * t * t - 2.0 * s * s])
    }

    pub fn atan(self) -> Self {
        let v = self.value();
        let d = 1.0 + v * v;
        self.compose([
            v.atan(),
            1.0 / d,
            -2.0 * v / (d * d),
            (6.0 * v * v - 2.0) / (d * d * d),
        ])
    }

    /// Two-argument arctangent; `self` is the ordinate. Valid away from the
    /// origin of the (x, y) arguments.
    pub fn atan2(self, x: Self) -> Self {
        let y = self;
        let v = y.value().atan2(x.value());
        let mut r = if x.value().abs() >= y.value().abs() {
            (y / x).atan()
        } else {
            -(x / y).atan()
        };
        // same derivatives on either branch; pin the value to atan2
        r.c[C] = v;
        r
    }
}

/// tanh computed via exp(-2|x|); no overflow for large |x|.
pub fn stable_tanh(x: f64) -> f64 {
    let t = (-2.0 * x.abs()).exp();
    let m = (1.0 - t) / (1.0 + t);
    if x < 0.0 {
        -m
    } else {
        m
    }
}

/// sech²x = 4t/(1+t)² with t = exp(-2|x|); underflows to 0 for |x| > ~354.
pub fn stable_sech2(x: f64) -> f64 {
    let t = (-2.0 * x.abs()).exp();
    4.0 * t / ((1.0 + t) * (1.0 + t))
}

impl Add for T3 {
    type Output = T3;
    fn add(self, rhs: T3) -> T3 {
        let mut c = self.c;
        for k in 0..10 {
            c[k] += rhs.c[k];
        }
        T3 { c }
    }
}

impl Sub for T3 {
    type Output = T3;
    fn sub(self, rhs: T3) -> T3 {
        let mut c = self.c;
        for k in 0..10 {
            c[k] -= rhs.c[k];
        }
        T3 { c }
    }
}

impl Neg for T3 {
    type Output = T3;
    fn neg(self) -> T3 {
        let mut c = self.c;
        for v in &mut c {
            *v = -*v;
        }
        T3 { c }
    }
}

impl Mul for T3 {
    type Output = T3;
    fn mul(self, rhs: T3) -> T3 {
        let mut c = [0.0; 10];
        for (ka, &(ia, ja)) in EXP.iter().enumerate() {
            if self.c[ka] == 0.0 {
                continue;
            }
            for (kb, &(ib, jb)) in EXP.iter().enumerate() {
                let (i, j) = (ia + ib, ja + jb);
                if i + j <= 3 {
                    c[slot(i, j)] += self.c[ka] * rhs.c[kb];
                }
            }
        }
        T3 { c }
    }
}

impl Div for T3 {
    type Output = T3;
    fn div(self, rhs: T3) -> T3 {
        self * rhs.recip()
    }
}

/// Scalar abstraction shared by plain `f64` evaluation and Taylor
/// propagation, so every surface formula is written once.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn lit(v: f64) -> Self;
    fn value(&self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tanh(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn powi(self, n: i32) -> Self;
    fn atan2(self, x: Self) -> Self;
    /// Apply a univariate C³ function given by `[g, g', g'', g''']` at the
    /// current value.
    fn apply_c3(self, g: [f64; 4]) -> Self;
}

impl Scalar for f64 {
    fn lit(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tanh(self) -> Self {
        stable_tanh(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn apply_c3(self, g: [f64; 4]) -> Self {
        let _ = self;
        g[0]
    }
}

impl Scalar for T3 {
    fn lit(v: f64) -> Self {
        T3::constant(v)
    }
    fn value(&self) -> f64 {
        T3::value(self)
    }
    fn exp(self) -> Self {
        T3::exp(self)
    }
    fn ln(self) -> Self {
        T3::ln(self)
    }
    fn sqrt(self) -> Self {
        T3::sqrt(self)
    }
    fn sin(self) -> Self {
        T3::sin(self)
    }
    fn cos(self) -> Self {
        T3::cos(self)
    }
    fn tanh(self) -> Self {
        T3::tanh(self)
    }
    fn powf(self, p: f64) -> Self {
        T3::powf(self, p)
    }
    fn powi(self, n: i32) -> Self {
        T3::powi(self, n)
    }
    fn atan2(self, x: Self) -> Self {
        T3::atan2(self, x)
    }
    fn apply_c3(self, g: [f64; 4]) -> Self {
        self.compose(g)
    }
}
