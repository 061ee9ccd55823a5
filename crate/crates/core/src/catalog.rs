//! Named surface families with parameters, plus the closed-form polar
//! derivative tables that double as oracles for the Taylor-arithmetic path.

use crate::expr::Expr;
use crate::jets::{Coords, Jet, Point2, PolarPoint};
use crate::taylor::{stable_sech2, stable_tanh, Scalar};
use crate::{Error, Result};

/// Bounded odd profile function with increasing F' and concave-on-the-right
/// graph; the shape that drives the rotational surface families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FSpec {
    Tanh,
    /// sign(x)·(1 − e^{−|x|}) outside [−M, M], glued to an odd quintic
    /// inside so that value, first and second derivative match at ±M.
    OneMinusExp { m: f64, c1: f64, c3: f64, c5: f64 },
}

impl FSpec {
    pub fn one_minus_exp(m: f64) -> Result<FSpec> {
        if !(m > 0.0) {
            return Err(Error::Domain("glue point must be positive".into()));
        }
        let e = (-m).exp();
        // [c1, c3, c5] matching value, F', F'' of 1 − e^{−x} at x = m
        let a = [
            [m, m.powi(3), m.powi(5)],
            [1.0, 3.0 * m * m, 5.0 * m.powi(4)],
            [0.0, 6.0 * m, 20.0 * m.powi(3)],
        ];
        let b = [1.0 - e, e, -e];
        let c = solve3(a, b)?;
        Ok(FSpec::OneMinusExp {
            m,
            c1: c[0],
            c3: c[1],
            c5: c[2],
        })
    }

    /// F applied through any scalar type; the branch is chosen by the value.
    pub fn apply<S: Scalar>(&self, x: S) -> S {
        match *self {
            FSpec::Tanh => x.tanh(),
            FSpec::OneMinusExp { m, c1, c3, c5 } => {
                let v = x.value();
                if v >= m {
                    S::lit(1.0) - (-x).exp()
                } else if v <= -m {
                    x.exp() - S::lit(1.0)
                } else {
                    let x2 = x * x;
                    x * (S::lit(c1) + x2 * (S::lit(c3) + x2 * S::lit(c5)))
                }
            }
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        self.apply(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        match *self {
            FSpec::Tanh => stable_sech2(x),
            FSpec::OneMinusExp { m, c1, c3, c5 } => {
                if x.abs() >= m {
                    (-x.abs()).exp()
                } else {
                    let x2 = x * x;
                    c1 + x2 * (3.0 * c3 + 5.0 * c5 * x2)
                }
            }
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match *self {
            FSpec::Tanh => -2.0 * stable_sech2(x) * stable_tanh(x),
            FSpec::OneMinusExp { m, c3, c5, .. } => {
                if x.abs() >= m {
                    -x.signum() * (-x.abs()).exp()
                } else {
                    6.0 * c3 * x + 20.0 * c5 * x * x * x
                }
            }
        }
    }

    /// F''(x)/F'(x), finite for all x even where both factors underflow.
    pub fn ratio21(&self, x: f64) -> f64 {
        match *self {
            FSpec::Tanh => -2.0 * stable_tanh(x),
            FSpec::OneMinusExp { m, .. } => {
                if x.abs() >= m {
                    -x.signum()
                } else {
                    self.d2(x) / self.d1(x)
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FSpec::Tanh => "tanh".into(),
            FSpec::OneMinusExp { m, .. } => format!("one-minus-exp:{m}"),
        }
    }
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Result<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::NonFinite("singular 3x3 system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

/// Where a surface's expression is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    AllPlane,
    /// Defined for r > r_min (exterior families).
    Exterior { r_min: f64 },
    /// Defined for 0 < r < r_max (inverted families).
    PuncturedDisk { r_max: f64 },
}

/// A named, parameterized scalar field, evaluable through any scalar type.
#[derive(Clone, Debug)]
pub enum SurfaceSpec {
    /// 2 + xy/(√(1+x²)√(1+y²)), umbilic-free.
    Bates,
    /// 1 + lam·(1+x+y²)/√(1+(x+y²)²), umbilic-free.
    GhomiHoward { lam: f64 },
    /// Re z³ = x³ − 3xy².
    ReZ3,
    /// Re(z²z̄) = x³ + xy² = r³ cos θ.
    ReZ2Zbar,
    /// (x² + y²)/2.
    Paraboloid,
    /// 1 + tanh(r^a cos mθ).
    Fm { m: u32, a: f64 },
    /// 1 + F(r^a cos mθ) for a general profile F.
    Gm { m: u32, a: f64, f: FSpec },
    /// r² tanh(r^{−a} cos mθ).
    LambdaM { m: u32, a: f64 },
    /// (u² + v²)·f(ι(u, v)) with ι(u, v) = (u, v)/(u² + v²).
    Dual(Box<SurfaceSpec>),
    Expression(Expr),
}

impl SurfaceSpec {
    pub fn fm(m: u32, a: f64) -> Result<Self> {
        check_ma(m, a)?;
        Ok(SurfaceSpec::Fm { m, a })
    }

    pub fn gm(m: u32, a: f64, f: FSpec) -> Result<Self> {
        check_ma(m, a)?;
        Ok(SurfaceSpec::Gm { m, a, f })
    }

    pub fn lambda_m(m: u32, a: f64) -> Result<Self> {
        check_ma(m, a)?;
        Ok(SurfaceSpec::LambdaM { m, a })
    }

    pub fn ghomi_howard(lam: f64) -> Result<Self> {
        if !(lam > 0.0) {
            return Err(Error::Domain("ghomi-howard parameter must be positive".into()));
        }
        Ok(SurfaceSpec::GhomiHoward { lam })
    }

    pub fn dual_of(f: SurfaceSpec) -> Self {
        SurfaceSpec::Dual(Box::new(f))
    }

    /// Profile parameters (m, a, F) of the rotational families.
    pub fn profile(&self) -> Option<(u32, f64, FSpec)> {
        match self {
            SurfaceSpec::Fm { m, a } => Some((*m, *a, FSpec::Tanh)),
            SurfaceSpec::Gm { m, a, f } => Some((*m, *a, *f)),
            SurfaceSpec::LambdaM { m, a } => Some((*m, *a, FSpec::Tanh)),
            _ => None,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            SurfaceSpec::Bates
            | SurfaceSpec::GhomiHoward { .. }
            | SurfaceSpec::ReZ3
            | SurfaceSpec::ReZ2Zbar
            | SurfaceSpec::Paraboloid => Domain::AllPlane,
            SurfaceSpec::Fm { .. } | SurfaceSpec::Gm { .. } => Domain::Exterior { r_min: 0.0 },
            SurfaceSpec::LambdaM { .. } => Domain::PuncturedDisk { r_max: f64::INFINITY },
            SurfaceSpec::Dual(f) => match f.domain() {
                Domain::Exterior { r_min } if r_min > 0.0 => {
                    Domain::PuncturedDisk { r_max: 1.0 / r_min }
                }
                Domain::Exterior { .. } => Domain::PuncturedDisk { r_max: f64::INFINITY },
                _ => Domain::PuncturedDisk { r_max: f64::INFINITY },
            },
            SurfaceSpec::Expression(e) => {
                if e.uses_polar() {
                    Domain::Exterior { r_min: 0.0 }
                } else {
                    Domain::AllPlane
                }
            }
        }
    }

    /// Smallest radius from which the large-radius checks start.
    pub fn base_radius(&self) -> f64 {
        match self.domain() {
            Domain::Exterior { r_min } => r_min.max(2.0),
            _ => 2.0,
        }
    }

    /// The strict parameter range of the exterior families is 0 < a < 1/4;
    /// larger a keeps every index computation valid but weakens the
    /// projected-map smoothness exponent.
    pub fn a_warning(&self) -> Option<String> {
        match self {
            SurfaceSpec::Fm { a, .. } | SurfaceSpec::Gm { a, .. } if *a >= 0.25 => Some(format!(
                "a = {a} is outside (0, 1/4); indices are unaffected but the \
                 projected inversion need not be C2"
            )),
            _ => None,
        }
    }

    /// Evaluate at a Cartesian point through any scalar type.
    pub fn eval<S: Scalar>(&self, x: S, y: S) -> Result<S> {
        match self {
            SurfaceSpec::Bates => {
                let one = S::lit(1.0);
                Ok(S::lit(2.0) + x * y / ((one + x * x).sqrt() * (one + y * y).sqrt()))
            }
            SurfaceSpec::GhomiHoward { lam } => {
                // with w = x + y^2 the identifier d1 = 2*lam*y*g''(w)
                // vanishes exactly on y = 0 and on w = 0, and d2 > 0 there,
                // so the graph is umbilic-free
                let one = S::lit(1.0);
                let w = x + y * y;
                Ok(one + S::lit(*lam) * w / (one + w * w).sqrt())
            }
            SurfaceSpec::ReZ3 => Ok(x * x * x - S::lit(3.0) * x * y * y),
            SurfaceSpec::ReZ2Zbar => Ok(x * x * x + x * y * y),
            SurfaceSpec::Paraboloid => Ok((x * x + y * y) * S::lit(0.5)),
            SurfaceSpec::Fm { .. }
            | SurfaceSpec::Gm { .. }
            | SurfaceSpec::LambdaM { .. } => {
                let (r, th) = polar_of(x, y)?;
                self.eval_polar(r, th)
            }
            SurfaceSpec::Dual(f) => {
                let rho2 = x * x + y * y;
                if rho2.value() <= 0.0 {
                    return Err(Error::Domain("dual surface undefined at the origin".into()));
                }
                let inner = f.eval(x / rho2, y / rho2)?;
                Ok(rho2 * inner)
            }
            SurfaceSpec::Expression(e) => {
                if e.uses_polar() {
                    let (r, th) = polar_of(x, y)?;
                    Ok(e.eval(x, y, r, th))
                } else {
                    let z = S::lit(0.0);
                    Ok(e.eval(x, y, z, z))
                }
            }
        }
    }

    /// Evaluate with (r, θ) as the independent variables, using the closed
    /// polar form where one exists and x = r cos θ, y = r sin θ otherwise.
    pub fn eval_polar<S: Scalar>(&self, r: S, th: S) -> Result<S> {
        match self {
            SurfaceSpec::ReZ3 => Ok(r.powi(3) * (S::lit(3.0) * th).cos()),
            SurfaceSpec::ReZ2Zbar => Ok(r.powi(3) * th.cos()),
            SurfaceSpec::Paraboloid => Ok(r * r * S::lit(0.5)),
            SurfaceSpec::Fm { m, a } => {
                check_r_positive(r.value())?;
                let x = r.powf(*a) * (S::lit(*m as f64) * th).cos();
                Ok(S::lit(1.0) + x.tanh())
            }
            SurfaceSpec::Gm { m, a, f } => {
                check_r_positive(r.value())?;
                let x = r.powf(*a) * (S::lit(*m as f64) * th).cos();
                Ok(S::lit(1.0) + f.apply(x))
            }
            SurfaceSpec::LambdaM { m, a } => {
                check_r_positive(r.value())?;
                let x = r.powf(-*a) * (S::lit(*m as f64) * th).cos();
                Ok(r * r * x.tanh())
            }
            SurfaceSpec::Expression(e) if !e.uses_cartesian() => {
                check_r_positive(r.value())?;
                let z = S::lit(0.0);
                Ok(e.eval(z, z, r, th))
            }
            _ => {
                let x = r * th.cos();
                let y = r * th.sin();
                self.eval(x, y)
            }
        }
    }

    /// Extra sample points for the large-radius regularity sweep, on the
    /// curves where the surface's normal is known to misbehave.
    pub fn regularity_probes(&self, r: f64) -> Vec<Point2> {
        match self {
            SurfaceSpec::GhomiHoward { .. } => {
                // points of the circle of radius r near the parabola
                // x + y² = w for a sweep of offsets w
                let mut out = Vec::new();
                let mut w = -4.0;
                while w <= 4.0 + 1e-9 {
                    if let Some(y) = circle_parabola_intersection(w, r) {
                        out.push(Point2::new(w - y * y, y));
                        out.push(Point2::new(w - y * y, -y));
                    }
                    w += 0.25;
                }
                out
            }
            _ => Vec::new(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            SurfaceSpec::Bates => "bates".into(),
            SurfaceSpec::GhomiHoward { lam } => format!("gh:lam={lam}"),
            SurfaceSpec::ReZ3 => "rez3".into(),
            SurfaceSpec::ReZ2Zbar => "rez2zbar".into(),
            SurfaceSpec::Paraboloid => "paraboloid".into(),
            SurfaceSpec::Fm { m, a } => format!("fm:m={m},a={a}"),
            SurfaceSpec::Gm { m, a, f } => format!("gm:m={m},a={a},f={}", f.name()),
            SurfaceSpec::LambdaM { m, a } => format!("lambda:m={m},a={a}"),
            SurfaceSpec::Dual(f) => format!("dual({})", f.name()),
            SurfaceSpec::Expression(_) => "expr".into(),
        }
    }
}

fn check_ma(m: u32, a: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("m must be a positive integer".into()));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("parameter a must lie in (0, 1), got {a}")));
    }
    Ok(())
}

fn check_r_positive(r: f64) -> Result<()> {
    if r > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("field undefined for r = {r}")))
    }
}

fn polar_of<S: Scalar>(x: S, y: S) -> Result<(S, S)> {
    let r2 = x * x + y * y;
    if r2.value() <= 0.0 {
        return Err(Error::Domain("polar coordinates undefined at the origin".into()));
    }
    Ok((r2.sqrt(), y.atan2(x)))
}

fn circle_parabola_intersection(w: f64, r: f64) -> Option<f64> {
    // smallest y ≥ 0 with (w − y²)² + y² = r²
    if r * r <= w * w {
        return None;
    }
    let g = |y: f64| {
        let x = w - y * y;
        x * x + y * y - r * r
    };
    let (mut lo, mut hi) = (0.0, r.sqrt().max(1.0) + w.abs().sqrt() + 1.0);
    if g(lo) >= 0.0 || g(hi) <= 0.0 {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn polar_jet_from_table(value: f64, d: [f64; 5]) -> Result<Jet> {
    let j = Jet {
        order: 2,
        coords: Coords::Polar,
        value,
        first: [d[0], d[1]],
        second: [d[2], d[3], d[4]],
        third: None,
    };
    if j.sup_norm().is_finite() {
        Ok(j)
    } else {
        Err(Error::NonFinite("closed-form polar jet".into()))
    }
}

/// Printed derivative table of g = 1 + F(r^a cos mθ).
pub fn closed_form_polar_jet_g(spec: &SurfaceSpec, p: PolarPoint) -> Result<Jet> {
    let (m, a, f) = match spec.profile() {
        Some(t) if !matches!(spec, SurfaceSpec::LambdaM { .. }) => t,
        _ => return Err(Error::Domain("closed form applies to the exterior families".into())),
    };
    let (r, th) = (p.r(), p.theta());
    let mf = m as f64;
    let (s, c) = (mf * th).sin_cos();
    let x = r.powf(a) * c;
    let (f1, f2) = (f.d1(x), f.d2(x));
    let ra = r.powf(a);
    polar_jet_from_table(
        1.0 + f.f(x),
        [
            a * r.powf(a - 1.0) * c * f1,
            -mf * ra * s * f1,
            a * r.powf(a - 2.0) * c * (a * ra * c * f2 + (a - 1.0) * f1),
            -a * mf * r.powf(a - 1.0) * s * (ra * c * f2 + f1),
            mf * mf * ra * (ra * s * s * f2 - c * f1),
        ],
    )
}

/// Printed derivative table of λ = r² F(r^{−a} cos mθ).
pub fn closed_form_polar_jet_lambda(spec: &SurfaceSpec, p: PolarPoint) -> Result<Jet> {
    let (m, a, f) = match spec {
        SurfaceSpec::LambdaM { .. } => spec.profile().unwrap(),
        _ => return Err(Error::Domain("closed form applies to the inverted family".into())),
    };
    let (r, th) = (p.r(), p.theta());
    let mf = m as f64;
    let (s, c) = (mf * th).sin_cos();
    let x = r.powf(-a) * c;
    let (f0, f1, f2) = (f.f(x), f.d1(x), f.d2(x));
    let ra = r.powf(a);
    polar_jet_from_table(
        r * r * f0,
        [
            r * (2.0 * f0 - a * c * r.powf(-a) * f1),
            -mf * r.powf(2.0 - a) * s * f1,
            2.0 * f0 + a * r.powf(-2.0 * a) * c * ((a - 3.0) * ra * f1 + a * c * f2),
            mf * s * r.powf(1.0 - 2.0 * a) * ((a - 2.0) * ra * f1 + a * c * f2),
            -mf * mf * r.powf(2.0 - 2.0 * a) * (ra * c * f1 - s * s * f2),
        ],
    )
}

/// (δ₁, δ₂) of g = 1 + F(r^a cos mθ), divided by F'(r^a cos mθ) > 0.
/// The rescaling keeps both components representable at radii where F'
/// itself underflows; it never changes a winding number or a sign.
pub fn scaled_polar_identifiers_g(m: u32, a: f64, f: FSpec, r: f64, theta: f64) -> (f64, f64) {
    let mf = m as f64;
    let (s, c) = (mf * theta).sin_cos();
    let ra = r.powf(a);
    let x = ra * c;
    let q = f.ratio21(x);
    let f1 = f.d1(x);
    let d1 = -mf * ra * s * (a * ra * c * q + (a - 1.0));
    let d2 = -r.powf(2.0 * a) * (a * a * c * c - mf * mf * s * s) * q
        + r.powf(3.0 * a - 2.0) * a * c * (a * a * c * c - a * mf * mf + mf * mf * s * s)
            * f1
            * f1
        - ra * c * (a * a - 2.0 * a + mf * mf);
    (d1, d2)
}

/// (ζ₁, ζ₂) of λ = r² F(r^{−a} cos mθ), divided by F'(r^{−a} cos mθ) > 0.
pub fn scaled_hessian_identifiers_lambda(
    m: u32,
    a: f64,
    f: FSpec,
    r: f64,
    theta: f64,
) -> (f64, f64) {
    let mf = m as f64;
    let (s, c) = (mf * theta).sin_cos();
    let x = r.powf(-a) * c;
    let q = f.ratio21(x);
    let z1 = 2.0 * mf * r.powf(2.0 - 2.0 * a) * s * (a * c * q + (a - 1.0) * r.powf(a));
    let z2 = -r.powf(2.0 - 2.0 * a) * (a * a * c * c - mf * mf * s * s) * q
        - (a * a - 2.0 * a + mf * mf) * r.powf(2.0 - a) * c;
    (z1, z2)
}

/// Equi-diagonal identifier δ of g = F(r^a cos mθ) (constant offsets drop
/// out of every second derivative), divided by F'(r^a cos mθ) > 0.
pub fn scaled_hessian_identifiers_g(m: u32, a: f64, f: FSpec, r: f64, theta: f64) -> (f64, f64) {
    let mf = m as f64;
    let (s, c) = (mf * theta).sin_cos();
    let ra = r.powf(a);
    let q = f.ratio21(ra * c);
    let d1 = 2.0 * mf * ra * s * (1.0 - a - a * ra * c * q);
    let d2 = ra * (ra * q * (mf * mf * s * s - a * a * c * c) - c * (mf * mf - 2.0 * a + a * a));
    (d1, d2)
}

/// Printed Cartesian gradient (Λ_ξ, Λ_η) of λ = r² F(r^{−a} cos mθ).
pub fn lambda_cartesian_gradient_closed(
    m: u32,
    a: f64,
    f: FSpec,
    r: f64,
    theta: f64,
) -> (f64, f64) {
    let mf = m as f64;
    let (s1, c1) = theta.sin_cos();
    let (s, c) = (mf * theta).sin_cos();
    let x = r.powf(-a) * c;
    let (f0, f1) = (f.f(x), f.d1(x));
    let ra = r.powf(a);
    let lx = r.powf(1.0 - a) * ((mf * s1 * s - a * c1 * c) * f1 + 2.0 * ra * c1 * f0);
    let ly = r.powf(1.0 - a) * (2.0 * ra * s1 * f0 - (a * s1 * c + mf * c1 * s) * f1);
    (lx, ly)
}

/// The plane-inversion dual (u² + v²)·f((u, v)/(u² + v²)).
pub fn make_dual(f: &SurfaceSpec) -> SurfaceSpec {
    SurfaceSpec::dual_of(f.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{eval_jet, jet_cartesian_to_polar, polar_jet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (scale + 1.0)
    }

    #[test]
    fn fspec_odd_increasing_concave() {
        let specs = [FSpec::Tanh, FSpec::one_minus_exp(3.0).unwrap()];
        for f in &specs {
            for k in 1..200 {
                let x = k as f64 * 0.05;
                assert!(close(f.f(-x), -f.f(x), 1.0, 1e-14), "{} odd at {x}", f.name());
                assert!(f.d1(x) > 0.0, "{} F' > 0 at {x}", f.name());
                assert!(f.d2(x) < 0.0, "{} F'' < 0 at {x}", f.name());
                assert!(close(f.d1(-x), f.d1(x), 1.0, 1e-14));
                assert!(close(f.d2(-x), -f.d2(x), 1.0, 1e-14));
            }
            assert_eq!(f.f(0.0), 0.0);
        }
    }

    #[test]
    fn one_minus_exp_glue_is_c2() {
        let f = FSpec::one_minus_exp(3.0).unwrap();
        let m = 3.0;
        for h in [1e-7, -1e-7] {
            assert!(close(f.f(m + h), f.f(m - h), 1.0, 1e-6));
            assert!(close(f.d1(m + h), f.d1(m - h), 1.0, 1e-6));
            assert!(close(f.d2(m + h), f.d2(m - h), 1.0, 1e-6));
        }
        // exact matching at the glue point itself
        let e = (-3.0f64).exp();
        assert!(close(f.f(3.0), 1.0 - e, 1.0, 1e-14));
        assert!(close(f.d1(3.0), e, 1.0, 1e-14));
        assert!(close(f.d2(3.0), -e, 1.0, 1e-14));
    }

    #[test]
    fn fspec_derivatives_match_finite_differences() {
        let specs = [FSpec::Tanh, FSpec::one_minus_exp(3.0).unwrap()];
        let h = 1e-5;
        for f in &specs {
            for k in 0..60 {
                let x = -4.0 + k as f64 * 0.137;
                if (x.abs() - 3.0).abs() < 2.0 * h {
                    continue; // glue point is only C²
                }
                let d1 = (f.f(x + h) - f.f(x - h)) / (2.0 * h);
                let d2 = (f.f(x + h) - 2.0 * f.f(x) + f.f(x - h)) / (h * h);
                assert!(close(f.d1(x), d1, 1.0, 1e-8));
                assert!(close(f.d2(x), d2, 1.0, 1e-4));
                assert!(close(f.ratio21(x), f.d2(x) / f.d1(x), 1.0, 1e-10));
            }
        }
    }

    #[test]
    fn g_table_axis_values() {
        // θ = π/2, m = 1: c_m = 0, so g_r = 0 and g_θ = −r^a F'(0) = −r^0.2
        let f = SurfaceSpec::fm(1, 0.2).unwrap();
        for &r in &[0.5, 2.0, 7.0] {
            let j = closed_form_polar_jet_g(&f, PolarPoint::new(r, PI / 2.0).unwrap()).unwrap();
            assert!(j.fr().abs() < 1e-15);
            assert!(close(j.ftheta(), -r.powf(0.2), r, 1e-13));
        }
        // θ = 0: s_m = 0 kills g_θ and g_rθ
        for m in [1u32, 3, 6] {
            let f = SurfaceSpec::fm(m, 0.2).unwrap();
            let j = closed_form_polar_jet_g(&f, PolarPoint::new(3.0, 0.0).unwrap()).unwrap();
            assert_eq!(j.ftheta(), 0.0);
            assert_eq!(j.frtheta(), 0.0);
        }
    }

    #[test]
    fn lambda_table_axis_values() {
        // θ = π/2, m = 1: c_m = 0, F(0) = 0, so λ_r = 0 and λ_rr = 0
        let f = SurfaceSpec::lambda_m(1, 0.5).unwrap();
        for &r in &[0.1, 0.3] {
            let j =
                closed_form_polar_jet_lambda(&f, PolarPoint::new(r, PI / 2.0).unwrap()).unwrap();
            assert!(j.fr().abs() < 1e-15);
            assert!(j.frr().abs() < 1e-15);
        }
        // θ = 0, r → 0: λ_θθ decays with F'(r^{−a})
        let f = SurfaceSpec::lambda_m(2, 0.5).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..6 {
            let r = 10f64.powi(-k);
            let j = closed_form_polar_jet_lambda(&f, PolarPoint::new(r, 0.0).unwrap()).unwrap();
            assert!(j.fthetatheta().abs() < prev.max(1e-300));
            prev = j.fthetatheta().abs();
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn closed_forms_match_taylor_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let families: Vec<SurfaceSpec> = vec![
            SurfaceSpec::fm(1, 0.2).unwrap(),
            SurfaceSpec::fm(5, 0.2).unwrap(),
            SurfaceSpec::gm(3, 0.15, FSpec::one_minus_exp(3.0).unwrap()).unwrap(),
            SurfaceSpec::lambda_m(2, 0.5).unwrap(),
            SurfaceSpec::lambda_m(4, 0.3).unwrap(),
        ];
        for spec in &families {
            let is_lambda = matches!(spec, SurfaceSpec::LambdaM { .. });
            for _ in 0..200 {
                let r = if is_lambda {
                    rng.gen_range(0.05..2.0)
                } else {
                    rng.gen_range(0.5..20.0)
                };
                let th = rng.gen_range(0.0..TAU);
                let p = PolarPoint::new(r, th).unwrap();
                let table = if is_lambda {
                    closed_form_polar_jet_lambda(spec, p).unwrap()
                } else {
                    closed_form_polar_jet_g(spec, p).unwrap()
                };
                let ad = polar_jet(spec, p, 2).unwrap();
                let scale = ad.sup_norm();
                assert!(close(table.value, ad.value, scale, 1e-9));
                for k in 0..2 {
                    assert!(close(table.first[k], ad.first[k], scale, 1e-9));
                }
                for k in 0..3 {
                    assert!(
                        close(table.second[k], ad.second[k], scale, 1e-9),
                        "{} second[{k}] at r={r} th={th}",
                        spec.name()
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_cartesian_route() {
        let spec = SurfaceSpec::fm(5, 0.2).unwrap();
        let p = PolarPoint::new(3.0, 0.7).unwrap();
        let table = closed_form_polar_jet_g(&spec, p).unwrap();
        let conv =
            jet_cartesian_to_polar(&eval_jet(&spec, p.to_cartesian(), 2).unwrap(), p).unwrap();
        let scale = conv.sup_norm();
        assert!(close(table.value, conv.value, scale, 1e-10));
        for k in 0..2 {
            assert!(close(table.first[k], conv.first[k], scale, 1e-10));
        }
        for k in 0..3 {
            assert!(close(table.second[k], conv.second[k], scale, 1e-10));
        }
    }

    #[test]
    fn rotational_symmetry_by_2pi_over_m() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let families = vec![
            SurfaceSpec::fm(3, 0.2).unwrap(),
            SurfaceSpec::gm(4, 0.1, FSpec::one_minus_exp(3.0).unwrap()).unwrap(),
            SurfaceSpec::lambda_m(3, 0.5).unwrap(),
        ];
        for spec in &families {
            let (m, _, _) = spec.profile().unwrap();
            for _ in 0..100 {
                let r = rng.gen_range(0.2..5.0);
                let th = rng.gen_range(0.0..TAU);
                let p = PolarPoint::new(r, th).unwrap();
                let q = PolarPoint::new(r, th + TAU / m as f64).unwrap();
                let a = polar_jet(spec, p, 2).unwrap();
                let b = polar_jet(spec, q, 2).unwrap();
                let scale = a.sup_norm();
                assert!(close(a.value, b.value, scale, 1e-12));
                for k in 0..2 {
                    assert!(close(a.first[k], b.first[k], scale, 1e-12));
                }
                for k in 0..3 {
                    assert!(close(a.second[k], b.second[k], scale, 1e-12));
                }
            }
        }
    }

    #[test]
    fn scaled_identifiers_match_unscaled_at_moderate_radius() {
        // where F' is far from underflow, scaled × F' must reproduce the
        // plain identifiers computed from jets
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for &(m, a) in &[(1u32, 0.2), (3, 0.2), (2, 0.1)] {
            let spec = SurfaceSpec::fm(m, a).unwrap();
            for _ in 0..100 {
                let r = rng.gen_range(1.0..30.0);
                let th = rng.gen_range(0.0..TAU);
                let p = PolarPoint::new(r, th).unwrap();
                let j = polar_jet(&spec, p, 2).unwrap();
                let v = crate::identifiers::polar_identifiers(&j, p);
                let (s1, s2) = scaled_polar_identifiers_g(m, a, FSpec::Tanh, r, th);
                let f1 = FSpec::Tanh.d1(r.powf(a) * (m as f64 * th).cos());
                let scale = v.vx.abs() + v.vy.abs();
                assert!(close(s1 * f1, v.vx, scale, 1e-9));
                assert!(close(s2 * f1, v.vy, scale, 1e-9));
            }
        }
    }

    #[test]
    fn scaled_hessian_identifiers_lambda_match_jets() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for &(m, a) in &[(1u32, 0.5), (3, 0.5), (2, 0.3)] {
            let spec = SurfaceSpec::lambda_m(m, a).unwrap();
            for _ in 0..100 {
                let r = rng.gen_range(0.05..1.5);
                let th = rng.gen_range(0.0..TAU);
                let p = PolarPoint::new(r, th).unwrap();
                let j = polar_jet(&spec, p, 2).unwrap();
                let v = crate::identifiers::hessian_identifier_polar(&j, p);
                let (z1, z2) = scaled_hessian_identifiers_lambda(m, a, FSpec::Tanh, r, th);
                let f1 = FSpec::Tanh.d1(r.powf(-a) * (m as f64 * th).cos());
                let scale = v.vx.abs() + v.vy.abs();
                assert!(close(z1 * f1, v.vx, scale, 1e-8));
                assert!(close(z2 * f1, v.vy, scale, 1e-8));
            }
        }
    }

    #[test]
    fn scaled_hessian_identifiers_g_match_jets() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for &(m, a) in &[(2u32, 0.5), (4, 0.2)] {
            let spec = SurfaceSpec::fm(m, a).unwrap();
            for _ in 0..100 {
                let r = rng.gen_range(1.0..20.0);
                let th = rng.gen_range(0.0..TAU);
                let p = PolarPoint::new(r, th).unwrap();
                let j = polar_jet(&spec, p, 2).unwrap();
                let v = crate::identifiers::hessian_identifier_polar(&j, p);
                let (d1, d2) = scaled_hessian_identifiers_g(m, a, FSpec::Tanh, r, th);
                let f1 = FSpec::Tanh.d1(r.powf(a) * (m as f64 * th).cos());
                let scale = v.vx.abs() + v.vy.abs();
                assert!(close(d1 * f1, v.vx, scale, 1e-9));
                assert!(close(d2 * f1, v.vy, scale, 1e-9));
            }
        }
    }

    #[test]
    fn lambda_gradient_closed_form_matches_ad() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for &(m, a) in &[(1u32, 0.5), (2, 0.5), (3, 0.3)] {
            let spec = SurfaceSpec::lambda_m(m, a).unwrap();
            for _ in 0..200 {
                let r = rng.gen_range(0.02..1.5);
                let th = rng.gen_range(0.0..TAU);
                let p = PolarPoint::new(r, th).unwrap();
                let j = eval_jet(&spec, p.to_cartesian(), 2).unwrap();
                let (lx, ly) = lambda_cartesian_gradient_closed(m, a, FSpec::Tanh, r, th);
                let scale = j.fx().abs() + j.fy().abs();
                assert!(close(lx, j.fx(), scale, 1e-9));
                assert!(close(ly, j.fy(), scale, 1e-9));
            }
        }
    }

    #[test]
    fn dual_of_exterior_family_is_inverted_family() {
        // (u² + v²)·(f_m − 1)(ι(u, v)) = Λ_m pointwise
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for &(m, a) in &[(1u32, 0.5), (3, 0.2), (5, 0.3)] {
            let fm_minus_1 = crate::expr::parse(&format!(
                "tanh(r^{a} * cos({m}*theta))"
            ))
            .map(SurfaceSpec::Expression)
            .unwrap();
            let dual = make_dual(&fm_minus_1);
            let lam = SurfaceSpec::lambda_m(m, a).unwrap();
            for _ in 0..200 {
                let u: f64 = rng.gen_range(-0.7..0.7);
                let v: f64 = rng.gen_range(-0.7..0.7);
                if u.hypot(v) < 1e-3 {
                    continue;
                }
                let d: f64 = dual.eval(u, v).unwrap();
                let l: f64 = lam.eval(u, v).unwrap();
                assert!(close(d, l, l.abs(), 1e-12));
            }
        }
    }

    #[test]
    fn dual_of_constant_is_squared_radius() {
        let one = crate::expr::parse("1").map(SurfaceSpec::Expression).unwrap();
        let dual = make_dual(&one);
        let v: f64 = dual.eval(0.3, -0.4).unwrap();
        assert!(close(v, 0.25, 1.0, 1e-15));
    }

    #[test]
    fn dual_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let f = SurfaceSpec::Bates;
        let dd = make_dual(&make_dual(&f));
        for _ in 0..200 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            let y: f64 = rng.gen_range(-3.0..3.0);
            if x.hypot(y) < 0.05 {
                continue;
            }
            let a: f64 = f.eval(x, y).unwrap();
            let b: f64 = dd.eval(x, y).unwrap();
            assert!(close(a, b, a.abs(), 1e-11));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(SurfaceSpec::fm(0, 0.2).is_err());
        assert!(SurfaceSpec::fm(1, 1.0).is_err());
        assert!(SurfaceSpec::fm(1, 0.0).is_err());
        assert!(SurfaceSpec::lambda_m(2, 1.5).is_err());
        assert!(SurfaceSpec::ghomi_howard(0.0).is_err());
        assert!(SurfaceSpec::fm(1, 0.3).unwrap().a_warning().is_some());
        assert!(SurfaceSpec::fm(1, 0.2).unwrap().a_warning().is_none());
    }

    #[test]
    fn gh_probes_lie_on_circle_and_parabola_band() {
        let gh = SurfaceSpec::ghomi_howard(1.0).unwrap();
        let r = 100.0;
        let probes = gh.regularity_probes(r);
        assert!(!probes.is_empty());
        for p in &probes {
            assert!((p.norm() - r).abs() < 1e-6 * r);
            let w = p.x + p.y * p.y;
            assert!(w.abs() <= 4.0 + 1e-6);
        }
    }
}
