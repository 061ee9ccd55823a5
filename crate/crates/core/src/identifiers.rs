//! Umbilic and equi-diagonal identifier fields and the associated
//! symmetric matrices of a graph surface.

use std::f64::consts::PI;

use crate::jets::{Coords, Jet, PolarPoint};
use crate::{Error, Result};

/// Relative tolerance below which a point counts as umbilic
/// (or equi-diagonal); scaled by 1 + the local jet magnitude.
pub const TOL_UMB: f64 = 1e-9;

/// Real symmetric 2×2 matrix; a single slot stores the off-diagonal entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Sym2 {
    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// Distance from the nearest multiple of the identity.
    pub fn equi_deviation(&self) -> f64 {
        (self.a11 - self.a22).hypot(2.0 * self.a12)
    }

    pub fn sup_norm(&self) -> f64 {
        self.a11.abs().max(self.a12.abs()).max(self.a22.abs())
    }

    /// Direction of the eigenvector with the larger eigenvalue; fails when
    /// the matrix is (numerically) a multiple of the identity.
    pub fn major_eigen_direction(&self) -> Result<LineDirection> {
        if self.equi_deviation() <= TOL_UMB * (1.0 + self.sup_norm()) {
            return Err(Error::Umbilic);
        }
        let half_gap = 0.5 * (self.a11 - self.a22);
        let s = half_gap.hypot(self.a12);
        // eigenvector for λ₊ = mean + s; pick the better-conditioned column
        let (vx, vy) = if half_gap >= 0.0 {
            (half_gap + s, self.a12)
        } else {
            (self.a12, s - half_gap)
        };
        Ok(LineDirection::from_vector(vx, vy))
    }
}

/// A tangent vector of the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneVector {
    pub vx: f64,
    pub vy: f64,
}

impl PlaneVector {
    pub fn new(vx: f64, vy: f64) -> Self {
        PlaneVector { vx, vy }
    }

    pub fn norm(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn angle(&self) -> f64 {
        self.vy.atan2(self.vx)
    }
}

/// An undirected line direction, canonicalized to [0, π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineDirection {
    angle: f64,
}

impl LineDirection {
    pub fn from_angle(angle: f64) -> Self {
        let mut a = angle.rem_euclid(PI);
        if a >= PI {
            a = 0.0;
        }
        LineDirection { angle: a }
    }

    pub fn from_vector(vx: f64, vy: f64) -> Self {
        LineDirection::from_angle(vy.atan2(vx))
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// Cartesian umbilic identifiers
/// d₁ = (1 + f_x²)f_xy − f_x f_y f_xx,
/// d₂ = (1 + f_x²)f_yy − f_xx(1 + f_y²).
pub fn cartesian_identifiers(j: &Jet) -> PlaneVector {
    debug_assert_eq!(j.coords, Coords::Cartesian);
    let (fx, fy) = (j.fx(), j.fy());
    let h = 1.0 + fx * fx;
    PlaneVector::new(
        h * j.fxy() - fx * fy * j.fxx(),
        h * j.fyy() - j.fxx() * (1.0 + fy * fy),
    )
}

/// Polar umbilic identifiers
/// δ₁ = −f_θ(1 + f_r² + r f_r f_rr) + r(1 + f_r²)f_rθ,
/// δ₂ = (1 + f_r²)(r f_r + f_θθ) − f_rr(r² + f_θ²).
pub fn polar_identifiers(j: &Jet, p: PolarPoint) -> PlaneVector {
    debug_assert_eq!(j.coords, Coords::Polar);
    let r = p.r();
    let (fr, ft) = (j.fr(), j.ftheta());
    let h = 1.0 + fr * fr;
    PlaneVector::new(
        -ft * (h + r * fr * j.frr()) + r * h * j.frtheta(),
        h * (r * fr + j.fthetatheta()) - j.frr() * (r * r + ft * ft),
    )
}

/// Equi-diagonal identifier d = (2f_xy, f_yy − f_xx) of a Hessian field.
pub fn hessian_identifier_cartesian(j: &Jet) -> PlaneVector {
    debug_assert_eq!(j.coords, Coords::Cartesian);
    PlaneVector::new(2.0 * j.fxy(), j.fyy() - j.fxx())
}

/// Polar equi-diagonal identifier
/// δ = (2(r f_rθ − f_θ), −r² f_rr + r f_r + f_θθ).
pub fn hessian_identifier_polar(j: &Jet, p: PolarPoint) -> PlaneVector {
    debug_assert_eq!(j.coords, Coords::Polar);
    let r = p.r();
    PlaneVector::new(
        2.0 * (r * j.frtheta() - j.ftheta()),
        -r * r * j.frr() + r * j.fr() + j.fthetatheta(),
    )
}

/// First and second fundamental forms of the graph of f.
pub fn fundamental_forms(j: &Jet) -> (Sym2, Sym2) {
    debug_assert_eq!(j.coords, Coords::Cartesian);
    let (fx, fy) = (j.fx(), j.fy());
    (
        Sym2 {
            a11: 1.0 + fx * fx,
            a12: fx * fy,
            a22: 1.0 + fy * fy,
        },
        Sym2 {
            a11: j.fxx(),
            a12: j.fxy(),
            a22: j.fyy(),
        },
    )
}

/// Rescaled Cartesian shape matrix with entries
/// ã₁₁ = f_x f_y(f_x f_y f_xx − 2h f_xy) + h² f_yy,  ã₁₂ = lk,
/// ã₂₂ = k² f_xx, where h = 1 + f_x², k = √(1 + f_x² + f_y²),
/// l = −h f_xy + f_x f_y f_xx.
pub fn shape_matrix_a(j: &Jet) -> Sym2 {
    debug_assert_eq!(j.coords, Coords::Cartesian);
    let (fx, fy) = (j.fx(), j.fy());
    let h = 1.0 + fx * fx;
    let k = (1.0 + fx * fx + fy * fy).sqrt();
    let l = -h * j.fxy() + fx * fy * j.fxx();
    Sym2 {
        a11: fx * fy * (fx * fy * j.fxx() - 2.0 * h * j.fxy()) + h * h * j.fyy(),
        a12: l * k,
        a22: k * k * j.fxx(),
    }
}

/// Rescaled polar shape matrix with entries
/// b̃₁₁ = r f_r² f_θ² f_rr + ĥ f_r(−2r f_θ f_rθ + 2f_θ² + r²ĥ) + r ĥ² f_θθ,
/// b̃₁₂ = l̂ k̂,  b̃₂₂ = r k̂² f_rr, where ĥ = 1 + f_r²,
/// k̂ = √(f_θ² + r²ĥ), l̂ = f_θ(ĥ + r f_r f_rr) − r ĥ f_rθ.
pub fn shape_matrix_b(j: &Jet, p: PolarPoint) -> Sym2 {
    debug_assert_eq!(j.coords, Coords::Polar);
    let r = p.r();
    let (fr, ft) = (j.fr(), j.ftheta());
    let h = 1.0 + fr * fr;
    let k = (ft * ft + r * r * h).sqrt();
    let l = ft * (h + r * fr * j.frr()) - r * h * j.frtheta();
    Sym2 {
        a11: r * fr * fr * ft * ft * j.frr()
            + h * fr * (-2.0 * r * ft * j.frtheta() + 2.0 * ft * ft + r * r * h)
            + r * h * h * j.fthetatheta(),
        a12: l * k,
        a22: r * k * k * j.frr(),
    }
}

/// The vector field (a₁₁ − a₂₂, a₁₂) attached to a symmetric matrix.
pub fn v_a(m: &Sym2) -> PlaneVector {
    PlaneVector::new(m.a11 - m.a22, m.a12)
}

/// True when the jet's point is an umbilic within tolerance.
pub fn is_umbilic(j: &Jet) -> bool {
    let d = cartesian_identifiers(j);
    d.vx.abs() + d.vy.abs() <= TOL_UMB * (1.0 + j.sup_norm())
}

/// Direction of the larger-principal-curvature eigenvector of I⁻¹II,
/// as an angle in [0, π).
pub fn principal_direction(j: &Jet) -> Result<LineDirection> {
    debug_assert_eq!(j.coords, Coords::Cartesian);
    if is_umbilic(j) {
        return Err(Error::Umbilic);
    }
    let (i1, ii) = fundamental_forms(j);
    // M = I⁻¹ II, generally non-symmetric but with real eigenvalues
    let det_i = i1.det();
    let m11 = (i1.a22 * ii.a11 - i1.a12 * ii.a12) / det_i;
    let m12 = (i1.a22 * ii.a12 - i1.a12 * ii.a22) / det_i;
    let m21 = (i1.a11 * ii.a12 - i1.a12 * ii.a11) / det_i;
    let m22 = (i1.a11 * ii.a22 - i1.a12 * ii.a12) / det_i;
    let half_gap = 0.5 * (m11 - m22);
    let disc = (half_gap * half_gap + m12 * m21).max(0.0).sqrt();
    // eigenvector of the larger eigenvalue λ₊ = mean + disc
    let v1 = (half_gap + disc, m21);
    let v2 = (m12, disc - half_gap);
    let (vx, vy) = if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) {
        v1
    } else {
        v2
    };
    Ok(LineDirection::from_vector(vx, vy))
}

/// Major eigen-direction of the Hessian of the field, as an angle in [0, π).
pub fn hessian_direction(j: &Jet) -> Result<LineDirection> {
    debug_assert_eq!(j.coords, Coords::Cartesian);
    let h = Sym2 {
        a11: j.fxx(),
        a12: j.fxy(),
        a22: j.fyy(),
    };
    h.major_eigen_direction()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::SurfaceSpec;
    use crate::jets::{eval_jet, jet_cartesian_to_polar, polar_jet, Point2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (scale + 1.0)
    }

    #[test]
    fn cubic_identifier_values() {
        // d₁ = −6yφ₁, d₂ = −6xφ₂ with φ₁ = −9x⁴ + 9y⁴ + 1,
        // φ₂ = 9x⁴ + 18x²y² + 9y⁴ + 2
        let f = SurfaceSpec::ReZ3;
        let d = cartesian_identifiers(&eval_jet(&f, Point2::new(0.0, 1.0), 2).unwrap());
        assert!(close(d.vx, -60.0, 60.0, 1e-13));
        assert!(close(d.vy, 0.0, 1.0, 1e-13));
        let d = cartesian_identifiers(&eval_jet(&f, Point2::new(1.0, 0.0), 2).unwrap());
        assert!(close(d.vx, 0.0, 1.0, 1e-13));
        assert!(close(d.vy, -66.0, 66.0, 1e-13));
    }

    #[test]
    fn paraboloid_identifier_closed_form() {
        let f = SurfaceSpec::Paraboloid;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let d = cartesian_identifiers(&eval_jet(&f, Point2::new(x, y), 2).unwrap());
            let scale = d.norm();
            assert!(close(d.vx, -x * y, scale, 1e-13));
            assert!(close(d.vy, x * x - y * y, scale, 1e-13));
        }
    }

    #[test]
    fn polar_identifier_example_values() {
        // f = r³cos θ: δ₁ = −2r³ sin θ, δ₂ = −2r³(2 − 3r⁴ − 6r⁴cos 2θ)cos θ
        let f = SurfaceSpec::ReZ2Zbar;
        let p = PolarPoint::new(0.1, std::f64::consts::FRAC_PI_2).unwrap();
        let d = polar_identifiers(&polar_jet(&f, p, 2).unwrap(), p);
        assert!(close(d.vx, -0.002, 0.002, 1e-12));
        assert!(close(d.vy, 0.0, 0.002, 1e-12));
        let p = PolarPoint::new(0.1, 0.0).unwrap();
        let d = polar_identifiers(&polar_jet(&f, p, 2).unwrap(), p);
        assert!(close(d.vx, 0.0, 0.002, 1e-12));
        assert!(close(d.vy, -2e-3 * (2.0 - 9e-4), 0.004, 1e-12));
    }

    #[test]
    fn radial_field_identifiers() {
        let f = SurfaceSpec::Paraboloid;
        for &(r, th) in &[(0.3, 0.4), (1.0, 2.2), (2.5, 5.0)] {
            let p = PolarPoint::new(r, th).unwrap();
            let d = polar_identifiers(&polar_jet(&f, p, 2).unwrap(), p);
            assert!(close(d.vx, 0.0, r.powi(4), 1e-12));
            assert!(close(d.vy, r.powi(4), r.powi(4), 1e-12));
        }
    }

    #[test]
    fn hessian_identifier_examples() {
        let sq = crate::expr::parse("x^2 - y^2").map(SurfaceSpec::Expression).unwrap();
        let d = hessian_identifier_cartesian(&eval_jet(&sq, Point2::new(0.7, -0.2), 2).unwrap());
        assert!(close(d.vx, 0.0, 4.0, 1e-13));
        assert!(close(d.vy, -4.0, 4.0, 1e-13));
        let d = hessian_identifier_cartesian(
            &eval_jet(&SurfaceSpec::ReZ3, Point2::new(0.4, 0.9), 2).unwrap(),
        );
        assert!(close(d.vx, -12.0 * 0.9, 12.0, 1e-13));
        assert!(close(d.vy, -12.0 * 0.4, 12.0, 1e-13));
    }

    #[test]
    fn hessian_polar_identifier_quadratics() {
        // g = r²cos 2θ = x² − y²: δ_g = (−4r² sin 2θ, −4r² cos 2θ)
        let sq = crate::expr::parse("r^2 * cos(2*theta)")
            .map(SurfaceSpec::Expression)
            .unwrap();
        for &(r, th) in &[(0.5, 0.3), (1.2, 4.0)] {
            let p = PolarPoint::new(r, th).unwrap();
            let d = hessian_identifier_polar(&polar_jet(&sq, p, 2).unwrap(), p);
            let scale = 4.0 * r * r;
            assert!(close(d.vx, -scale * (2.0 * th).sin(), scale, 1e-12));
            assert!(close(d.vy, -scale * (2.0 * th).cos(), scale, 1e-12));
        }
        // radial quadratic is equi-diagonal everywhere
        let p = PolarPoint::new(0.8, 1.1).unwrap();
        let d =
            hessian_identifier_polar(&polar_jet(&SurfaceSpec::Paraboloid, p, 2).unwrap(), p);
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn cartesian_and_polar_hessian_routes_are_rotations() {
        // d_g equals δ_g rotated by 2θ and divided by r²
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let surfaces = vec![
            SurfaceSpec::lambda_m(2, 0.5).unwrap(),
            SurfaceSpec::ReZ3,
            SurfaceSpec::Bates,
        ];
        for g in &surfaces {
            for _ in 0..100 {
                let r = rng.gen_range(0.1..1.5);
                let th = rng.gen_range(0.0..TAU);
                let p = PolarPoint::new(r, th).unwrap();
                let dc = hessian_identifier_cartesian(&eval_jet(g, p.to_cartesian(), 2).unwrap());
                let dp = hessian_identifier_polar(&polar_jet(g, p, 2).unwrap(), p);
                let (s2, c2) = (2.0 * th).sin_cos();
                let rx = (c2 * dp.vx - s2 * dp.vy) / (r * r);
                let ry = (s2 * dp.vx + c2 * dp.vy) / (r * r);
                let scale = dc.norm();
                assert!(close(dc.vx, rx, scale, 1e-9), "{} at r={r} th={th}", g.name());
                assert!(close(dc.vy, ry, scale, 1e-9));
            }
        }
    }

    #[test]
    fn hessian_polar_identifier_matches_printed_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for &(m, a) in &[(1u32, 0.5), (2, 0.5), (3, 0.3)] {
            let g = SurfaceSpec::lambda_m(m, a).unwrap();
            for _ in 0..200 {
                let r = rng.gen_range(0.05..1.2);
                let th = rng.gen_range(0.0..TAU);
                let p = PolarPoint::new(r, th).unwrap();
                let d = hessian_identifier_polar(&polar_jet(&g, p, 2).unwrap(), p);
                let (z1, z2) = crate::catalog::scaled_hessian_identifiers_lambda(
                    m,
                    a,
                    crate::catalog::FSpec::Tanh,
                    r,
                    th,
                );
                let f1 = crate::catalog::FSpec::Tanh
                    .d1(r.powf(-a) * (m as f64 * th).cos());
                let scale = d.norm();
                assert!(close(d.vx, z1 * f1, scale, 1e-9));
                assert!(close(d.vy, z2 * f1, scale, 1e-9));
            }
        }
    }

    #[test]
    fn shape_matrix_a_flat_gradient() {
        // ∇f = 0 → Ã = [[f_yy, −f_xy], [−f_xy, f_xx]]
        let f = crate::expr::parse("x^2 - 3*x*y + 2*y^2")
            .map(SurfaceSpec::Expression)
            .unwrap();
        let j = eval_jet(&f, Point2::new(0.0, 0.0), 2).unwrap();
        let a = shape_matrix_a(&j);
        assert!(close(a.a11, j.fyy(), 4.0, 1e-14));
        assert!(close(a.a12, -j.fxy(), 4.0, 1e-14));
        assert!(close(a.a22, j.fxx(), 4.0, 1e-14));
        // paraboloid at the origin: identity (umbilic)
        let j = eval_jet(&SurfaceSpec::Paraboloid, Point2::new(0.0, 0.0), 2).unwrap();
        let a = shape_matrix_a(&j);
        assert_eq!((a.a11, a.a12, a.a22), (1.0, 0.0, 1.0));
    }

    #[test]
    fn shape_matrix_a_diagonal_gap_identity() {
        // ã₁₁ − ã₂₂ = (2f_x f_y/k)ã₁₂ + h(−f_xx(1+f_y²) + (1+f_x²)f_yy)
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let surfaces = vec![SurfaceSpec::Bates, SurfaceSpec::ReZ3, SurfaceSpec::Paraboloid];
        for f in &surfaces {
            for _ in 0..100 {
                let p = Point2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let j = eval_jet(f, p, 2).unwrap();
                let a = shape_matrix_a(&j);
                let (fx, fy) = (j.fx(), j.fy());
                let h = 1.0 + fx * fx;
                let k = (1.0 + fx * fx + fy * fy).sqrt();
                let want = 2.0 * fx * fy / k * a.a12
                    + h * (-j.fxx() * (1.0 + fy * fy) + (1.0 + fx * fx) * j.fyy());
                assert!(close(a.a11 - a.a22, want, a.sup_norm(), 1e-12));
            }
        }
    }

    #[test]
    fn shape_matrix_b_identities() {
        // radial field: off-diagonal vanishes, gap is r⁵(1 + r²)
        let f = SurfaceSpec::Paraboloid;
        for &r in &[0.5, 1.0, 2.0] {
            let p = PolarPoint::new(r, 0.8).unwrap();
            let b = shape_matrix_b(&polar_jet(&f, p, 2).unwrap(), p);
            assert!(close(b.a12, 0.0, b.sup_norm(), 1e-13));
            assert!(close(b.a11 - b.a22, r.powi(5) * (1.0 + r * r), b.sup_norm(), 1e-12));
        }
        // −b̃₁₂/k̂ = δ₁
        let f = SurfaceSpec::ReZ2Zbar;
        let p = PolarPoint::new(0.1, std::f64::consts::FRAC_PI_4).unwrap();
        let j = polar_jet(&f, p, 2).unwrap();
        let b = shape_matrix_b(&j, p);
        let d = polar_identifiers(&j, p);
        let khat = (j.ftheta().powi(2) + p.r().powi(2) * (1.0 + j.fr().powi(2))).sqrt();
        assert!(close(-b.a12 / khat, d.vx, d.norm(), 1e-12));
        // b̃₁₁ − b̃₂₂ = −2f_r f_θ δ₁ + r(1 + f_r²)δ₂
        let f = SurfaceSpec::fm(3, 0.2).unwrap();
        let p = PolarPoint::new(5.0, 1.0).unwrap();
        let j = polar_jet(&f, p, 2).unwrap();
        let b = shape_matrix_b(&j, p);
        let d = polar_identifiers(&j, p);
        let want = -2.0 * j.fr() * j.ftheta() * d.vx + p.r() * (1.0 + j.fr().powi(2)) * d.vy;
        assert!(close(b.a11 - b.a22, want, b.sup_norm(), 1e-9));
    }

    #[test]
    fn fundamental_form_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let j = eval_jet(&SurfaceSpec::Paraboloid, Point2::new(1.0, 0.0), 2).unwrap();
        let (i1, ii) = fundamental_forms(&j);
        assert_eq!((i1.a11, i1.a12, i1.a22), (2.0, 0.0, 1.0));
        assert_eq!((ii.a11, ii.a12, ii.a22), (1.0, 0.0, 1.0));
        for _ in 0..100 {
            let p = Point2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let j = eval_jet(&SurfaceSpec::Bates, p, 2).unwrap();
            let (i1, _) = fundamental_forms(&j);
            let want = 1.0 + j.fx().powi(2) + j.fy().powi(2);
            assert!(close(i1.det(), want, want, 1e-12));
        }
    }

    #[test]
    fn v_a_values() {
        let id = Sym2 { a11: 1.0, a12: 0.0, a22: 1.0 };
        assert_eq!(v_a(&id), PlaneVector::new(0.0, 0.0));
        let m = Sym2 { a11: 3.0, a12: 1.0, a22: -1.0 };
        assert_eq!(v_a(&m), PlaneVector::new(4.0, 1.0));
        let sq = crate::expr::parse("x^2 - y^2").map(SurfaceSpec::Expression).unwrap();
        let j = eval_jet(&sq, Point2::new(0.4, -1.0), 2).unwrap();
        let (_, ii) = fundamental_forms(&j);
        assert_eq!(v_a(&ii), PlaneVector::new(4.0, 0.0));
    }

    #[test]
    fn principal_direction_examples() {
        // cylinder-like graph bends in x only: major direction is the x-axis
        let f = crate::expr::parse("x^2/2").map(SurfaceSpec::Expression).unwrap();
        let d = principal_direction(&eval_jet(&f, Point2::new(0.3, 1.0), 2).unwrap()).unwrap();
        assert!(d.angle() < 1e-12 || (d.angle() - PI).abs() < 1e-12);
        // saddle xy at the origin: major direction is the diagonal
        let f = crate::expr::parse("x*y").map(SurfaceSpec::Expression).unwrap();
        let d = principal_direction(&eval_jet(&f, Point2::new(0.0, 0.0), 2).unwrap()).unwrap();
        assert!(close(d.angle(), PI / 4.0, 1.0, 1e-13));
        // umbilic rejection
        let j = eval_jet(&SurfaceSpec::Paraboloid, Point2::new(0.0, 0.0), 2).unwrap();
        assert!(principal_direction(&j).is_err());
    }

    #[test]
    fn umbilic_tests_agree() {
        // identifier smallness ⇔ shape-matrix equi-diagonality
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let surfaces = vec![
            SurfaceSpec::Bates,
            SurfaceSpec::ReZ3,
            SurfaceSpec::Paraboloid,
            SurfaceSpec::fm(2, 0.2).unwrap(),
        ];
        for f in &surfaces {
            for _ in 0..250 {
                let p = Point2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                if p.norm() < 1e-2 {
                    continue;
                }
                let j = eval_jet(f, p, 2).unwrap();
                let d = cartesian_identifiers(&j);
                let a = shape_matrix_a(&j);
                let scale = 1.0 + j.sup_norm();
                let small_d = d.vx.abs() + d.vy.abs() < TOL_UMB * scale;
                let small_a = a.equi_deviation() < TOL_UMB * scale * (1.0 + a.sup_norm());
                assert_eq!(small_d, small_a);
            }
        }
    }

    #[test]
    fn principal_directions_rotate_with_the_field() {
        // g = f∘rot_α has principal direction dir_f(rot_α p) − α
        let alpha = PI / 6.0;
        let f = SurfaceSpec::ReZ3;
        // Re((e^{iα}z)³) with α = π/6 is −Im z³ = y³ − 3x²y
        let g = crate::expr::parse("y^3 - 3*x^2*y")
            .map(SurfaceSpec::Expression)
            .unwrap();
        for k in 0..24 {
            let t = k as f64 * TAU / 24.0;
            let p = Point2::new(0.2 * t.cos(), 0.2 * t.sin());
            let rp = Point2::new(
                alpha.cos() * p.x - alpha.sin() * p.y,
                alpha.sin() * p.x + alpha.cos() * p.y,
            );
            let dg = principal_direction(&eval_jet(&g, p, 2).unwrap()).unwrap();
            let df = principal_direction(&eval_jet(&f, rp, 2).unwrap()).unwrap();
            let diff = (dg.angle() - (df.angle() - alpha)).rem_euclid(PI);
            assert!(diff < 1e-9 || (PI - diff) < 1e-9, "t={t}: diff={diff}");
        }
    }

    #[test]
    fn polar_and_converted_identifiers_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let surfaces = vec![SurfaceSpec::Bates, SurfaceSpec::fm(3, 0.2).unwrap()];
        for f in &surfaces {
            for _ in 0..100 {
                let r = rng.gen_range(0.5..10.0);
                let th = rng.gen_range(0.0..TAU);
                let p = PolarPoint::new(r, th).unwrap();
                let direct = polar_identifiers(&polar_jet(f, p, 2).unwrap(), p);
                let conv = polar_identifiers(
                    &jet_cartesian_to_polar(&eval_jet(f, p.to_cartesian(), 2).unwrap(), p)
                        .unwrap(),
                    p,
                );
                let scale = direct.norm();
                assert!(close(direct.vx, conv.vx, scale, 1e-10));
                assert!(close(direct.vy, conv.vy, scale, 1e-10));
            }
        }
    }

    #[test]
    fn delta1_sign_follows_sin_m_theta_for_exterior_family() {
        // at a radius of the index computation, δ₁ carries the sign of
        // sin mθ
        for &(m, a) in &[(1u32, 0.2), (3, 0.2)] {
            let f = SurfaceSpec::fm(m, a).unwrap();
            for k in 0..720 {
                let th = (k as f64 + 0.5) * TAU / 720.0;
                let s = (m as f64 * th).sin();
                if s.abs() < 1e-3 {
                    continue;
                }
                let p = PolarPoint::new(16.0, th).unwrap();
                let d = polar_identifiers(&polar_jet(&f, p, 2).unwrap(), p);
                assert!(
                    d.vx * s > 0.0,
                    "m={m} θ={th}: δ₁={} vs sin mθ={s}",
                    d.vx
                );
            }
        }
    }
}
