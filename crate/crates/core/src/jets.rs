//! Jets: a scalar field's value and partial derivatives at a point, in
//! Cartesian or polar coordinates, produced by Taylor arithmetic.

use std::f64::consts::TAU;

use crate::catalog::SurfaceSpec;
use crate::taylor::T3;
use crate::{Error, Result};

/// A point of the plane in Cartesian coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar coordinates of the point; fails at the origin.
    pub fn to_polar(&self) -> Result<PolarPoint> {
        PolarPoint::new(self.norm(), self.y.atan2(self.x))
    }
}

/// A point in polar coordinates with r > 0 and theta normalized to [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarPoint {
    r: f64,
    theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() || !theta.is_finite() {
            return Err(Error::Domain(format!("polar point needs r > 0, got r = {r}")));
        }
        let mut t = theta.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0; // rem_euclid can round up to the modulus
        }
        Ok(PolarPoint { r, theta: t })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_cartesian(&self) -> Point2 {
        Point2::new(self.r * self.theta.cos(), self.r * self.theta.sin())
    }
}

/// Coordinate system a jet's derivatives refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coords {
    Cartesian,
    Polar,
}

/// Value and partial derivatives of a scalar field at a point, up to order
/// 2 or 3. Slot order: first = (f_x, f_y), second = (f_xx, f_xy, f_yy),
/// third = (f_xxx, f_xxy, f_xyy, f_yyy); for polar jets read (r, θ) for
/// (x, y). Mixed partials have a single slot, so symmetry is structural.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub order: u8,
    pub coords: Coords,
    pub value: f64,
    pub first: [f64; 2],
    pub second: [f64; 3],
    pub third: Option<[f64; 4]>,
}

impl Jet {
    pub fn from_t3(t: &T3, coords: Coords, order: u8) -> Result<Jet> {
        assert!(order == 2 || order == 3, "jet order must be 2 or 3");
        let j = Jet {
            order,
            coords,
            value: t.value(),
            first: [t.deriv(1, 0), t.deriv(0, 1)],
            second: [t.deriv(2, 0), t.deriv(1, 1), t.deriv(0, 2)],
            third: (order == 3)
                .then(|| [t.deriv(3, 0), t.deriv(2, 1), t.deriv(1, 2), t.deriv(0, 3)]),
        };
        j.check_finite()?;
        Ok(j)
    }

    fn check_finite(&self) -> Result<()> {
        let mut ok = self.value.is_finite()
            && self.first.iter().all(|v| v.is_finite())
            && self.second.iter().all(|v| v.is_finite());
        if let Some(t) = self.third {
            ok = ok && t.iter().all(|v| v.is_finite());
        }
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("jet entry".into()))
        }
    }

    /// Largest absolute entry; used to scale tolerances.
    pub fn sup_norm(&self) -> f64 {
        let mut m = self.value.abs();
        for v in self.first.iter().chain(self.second.iter()) {
            m = m.max(v.abs());
        }
        if let Some(t) = self.third {
            for v in &t {
                m = m.max(v.abs());
            }
        }
        m
    }

    pub fn fx(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Cartesian);
        self.first[0]
    }
    pub fn fy(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Cartesian);
        self.first[1]
    }
    pub fn fxx(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Cartesian);
        self.second[0]
    }
    pub fn fxy(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Cartesian);
        self.second[1]
    }
    pub fn fyy(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Cartesian);
        self.second[2]
    }

    pub fn fr(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Polar);
        self.first[0]
    }
    pub fn ftheta(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Polar);
        self.first[1]
    }
    pub fn frr(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Polar);
        self.second[0]
    }
    pub fn frtheta(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Polar);
        self.second[1]
    }
    pub fn fthetatheta(&self) -> f64 {
        debug_assert_eq!(self.coords, Coords::Polar);
        self.second[2]
    }
}

/// Cartesian jet of a field at a point.
pub fn eval_jet(field: &SurfaceSpec, p: Point2, order: u8) -> Result<Jet> {
    let x = T3::var_x(p.x);
    let y = T3::var_y(p.y);
    let f = field.eval(x, y)?;
    Jet::from_t3(&f, Coords::Cartesian, order)
}

/// Polar jet of a field, seeded directly in (r, θ).
pub fn polar_jet(field: &SurfaceSpec, p: PolarPoint, order: u8) -> Result<Jet> {
    let r = T3::var_x(p.r());
    let th = T3::var_y(p.theta());
    let f = field.eval_polar(r, th)?;
    Jet::from_t3(&f, Coords::Polar, order)
}

/// Convert a Cartesian jet at the image of `p` to a polar jet at `p` by
/// composing the jet's Taylor polynomial with x = r cos θ, y = r sin θ.
/// Polar derivatives of order k need Cartesian derivatives of order ≤ k
/// only, so the result is exact to the jet's own order.
pub fn jet_cartesian_to_polar(j: &Jet, p: PolarPoint) -> Result<Jet> {
    assert_eq!(j.coords, Coords::Cartesian);
    let r = T3::var_x(p.r());
    let th = T3::var_y(p.theta());
    let x = r * th.cos();
    let y = r * th.sin();
    let dx = x - T3::constant(x.value());
    let dy = y - T3::constant(y.value());

    let mut f = T3::constant(j.value);
    f = f + T3::constant(j.first[0]) * dx + T3::constant(j.first[1]) * dy;
    f = f
        + T3::constant(j.second[0] / 2.0) * dx * dx
        + T3::constant(j.second[1]) * dx * dy
        + T3::constant(j.second[2] / 2.0) * dy * dy;
    if let Some(t) = j.third {
        f = f
            + T3::constant(t[0] / 6.0) * dx * dx * dx
            + T3::constant(t[1] / 2.0) * dx * dx * dy
            + T3::constant(t[2] / 2.0) * dx * dy * dy
            + T3::constant(t[3] / 6.0) * dy * dy * dy;
    }
    Jet::from_t3(&f, Coords::Polar, j.order)
}

/// Order-2 polar jet of f̂(u, v) = f(u/ρ², v/ρ²) at (ρ, θ), from the jet of
/// f at (r, θ) with r = 1/ρ via the identities
/// ρ f̂_ρ = −r f_r,  ρ² f̂_ρρ = 2r f_r + r² f_rr,  f̂_θ = f_θ,
/// ρ f̂_ρθ = −r f_rθ,  f̂_θθ = f_θθ.
pub fn hat_jet(field: &SurfaceSpec, q: PolarPoint) -> Result<Jet> {
    let rho = q.r();
    let r = 1.0 / rho;
    let j = polar_jet(field, PolarPoint::new(r, q.theta())?, 2)?;
    let jh = Jet {
        order: 2,
        coords: Coords::Polar,
        value: j.value,
        first: [-r * j.fr() / rho, j.ftheta()],
        second: [
            (2.0 * r * j.fr() + r * r * j.frr()) / (rho * rho),
            -r * j.frtheta() / rho,
            j.fthetatheta(),
        ],
        third: None,
    };
    jh.check_finite()?;
    Ok(jh)
}
