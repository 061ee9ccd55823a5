//! Tangent-sphere congruence data of a graph surface: the sphere-radius
//! function, its chart, the stereographic normal, the numerical check that
//! curvature-line directions become Hessian eigen-directions in that chart,
//! and the congruence surface of the inverted family.

use crate::catalog::SurfaceSpec;
use crate::identifiers::{principal_direction, Sym2};
use crate::jets::{eval_jet, Point2};
use crate::{Error, Result};

/// Sphere congruence data at one surface point.
#[derive(Clone, Copy, Debug)]
pub struct RibaucourData {
    pub lambda: f64,
    /// (λ_ξ, λ_η), the gradient of the radius function in the chart.
    pub grad_lambda: (f64, f64),
    /// Chart image (ξ, η) of the point.
    pub phi_image: Point2,
    /// Downward unit normal of the graph.
    pub normal: [f64; 3],
    pub mu: f64,
}

/// Radius of the sphere tangent to the graph from below at a point with
/// height `value` and gradient (fx, fy).
pub fn lambda_of(value: f64, fx: f64, fy: f64) -> f64 {
    let w = (1.0 + fx * fx + fy * fy).sqrt();
    value * w / (1.0 + w)
}

/// Downward unit normal of the graph from the gradient.
pub fn normal_of(fx: f64, fy: f64) -> [f64; 3] {
    let w = (1.0 + fx * fx + fy * fy).sqrt();
    [fx / w, fy / w, -1.0 / w]
}

/// Chart gradient of λ from the normal (stereographic projection from the
/// north pole).
pub fn gradient_from_normal(n: [f64; 3]) -> (f64, f64) {
    (n[0] / (1.0 - n[2]), n[1] / (1.0 - n[2]))
}

/// The normal reconstructed from the chart gradient; inverse of
/// [`gradient_from_normal`] on the lower hemisphere.
pub fn normal_from_gradient(lx: f64, ly: f64) -> [f64; 3] {
    let d = 1.0 + lx * lx + ly * ly;
    [2.0 * lx / d, 2.0 * ly / d, (lx * lx + ly * ly - 1.0) / d]
}

pub fn ribaucour_data(f: &SurfaceSpec, p: Point2) -> Result<RibaucourData> {
    let j = eval_jet(f, p, 2)?;
    let lambda = lambda_of(j.value, j.fx(), j.fy());
    let normal = normal_of(j.fx(), j.fy());
    let grad_lambda = gradient_from_normal(normal);
    let phi_image = Point2::new(p.x + lambda * normal[0], p.y + lambda * normal[1]);
    let mu = 2.0 / (1.0 + grad_lambda.0 * grad_lambda.0 + grad_lambda.1 * grad_lambda.1);
    Ok(RibaucourData { lambda, grad_lambda, phi_image, normal, mu })
}

fn chart_map(f: &SurfaceSpec, p: Point2) -> Result<Point2> {
    Ok(ribaucour_data(f, p)?.phi_image)
}

/// Jacobian of the chart map by central differences.
fn chart_jacobian(f: &SurfaceSpec, p: Point2, h: f64) -> Result<[[f64; 2]; 2]> {
    let xp = chart_map(f, Point2::new(p.x + h, p.y))?;
    let xm = chart_map(f, Point2::new(p.x - h, p.y))?;
    let yp = chart_map(f, Point2::new(p.x, p.y + h))?;
    let ym = chart_map(f, Point2::new(p.x, p.y - h))?;
    Ok([
        [(xp.x - xm.x) / (2.0 * h), (yp.x - ym.x) / (2.0 * h)],
        [(xp.y - xm.y) / (2.0 * h), (yp.y - ym.y) / (2.0 * h)],
    ])
}

fn solve2(j: [[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det.abs() < 1e-300 {
        return None;
    }
    Some([
        (r[0] * j[1][1] - r[1] * j[0][1]) / det,
        (r[1] * j[0][0] - r[0] * j[1][0]) / det,
    ])
}

/// Invert the chart map near a seed by Newton iteration with a
/// finite-difference Jacobian.
fn invert_chart(f: &SurfaceSpec, target: Point2, seed: Point2, h: f64) -> Result<Point2> {
    let mut q = seed;
    let tol = 1e-13 * (1.0 + target.norm());
    for _ in 0..60 {
        let im = chart_map(f, q)?;
        let res = [target.x - im.x, target.y - im.y];
        if res[0].abs().max(res[1].abs()) < tol {
            return Ok(q);
        }
        let jac = chart_jacobian(f, q, h)?;
        let step = solve2(jac, res)
            .ok_or_else(|| Error::NoConvergence("chart Jacobian is singular".into()))?;
        q = Point2::new(q.x + step[0], q.y + step[1]);
    }
    Err(Error::NoConvergence("chart inversion did not reach tolerance".into()))
}

fn solve6(mut a: [[f64; 7]; 6]) -> Option<[f64; 6]> {
    for col in 0..6 {
        let piv = (col..6).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        a.swap(col, piv);
        if a[col][col].abs() < 1e-300 {
            return None;
        }
        for row in 0..6 {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            for k in col..7 {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    let mut out = [0.0; 6];
    for i in 0..6 {
        out[i] = a[i][6] / a[i][i];
    }
    Some(out)
}

fn fit_quadratic(f: &SurfaceSpec, center: Point2, seed0: Point2, h: f64) -> Result<Sym2> {
    let newton_h = 1e-6 * (1.0 + seed0.norm());
    let mut normal = [[0.0; 7]; 6];
    let mut seed = seed0;
    for i in -2i32..=2 {
        for jdx in -2i32..=2 {
            let target = Point2::new(center.x + i as f64 * h, center.y + jdx as f64 * h);
            let q = invert_chart(f, target, seed, newton_h)?;
            if jdx == -2 {
                seed = q;
            }
            let lam = ribaucour_data(f, q)?.lambda;
            let (dx, dy) = (i as f64 * h, jdx as f64 * h);
            let basis = [1.0, dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy];
            for r in 0..6 {
                for c in 0..6 {
                    normal[r][c] += basis[r] * basis[c];
                }
                normal[r][6] += basis[r] * lam;
            }
        }
    }
    let coeff =
        solve6(normal).ok_or_else(|| Error::NoConvergence("quadratic fit is degenerate".into()))?;
    Ok(Sym2 { a11: coeff[3], a12: coeff[4], a22: coeff[5] })
}

/// Hessian of λ as a function of the chart variables, by least-squares
/// quadratic fits over 5×5 stencils of chart points pulled back through
/// the chart map. Fits at two stencil widths are combined to cancel the
/// leading truncation bias of the narrower one.
fn chart_hessian_of_lambda(f: &SurfaceSpec, p: Point2) -> Result<Sym2> {
    let data = ribaucour_data(f, p)?;
    let center = data.phi_image;
    let h = 1e-4 * (1.0 + center.norm());
    let coarse = fit_quadratic(f, center, p, h)?;
    let fine = fit_quadratic(f, center, p, 0.5 * h)?;
    Ok(Sym2 {
        a11: (4.0 * fine.a11 - coarse.a11) / 3.0,
        a12: (4.0 * fine.a12 - coarse.a12) / 3.0,
        a22: (4.0 * fine.a22 - coarse.a22) / 3.0,
    })
}

/// Sine of the angle between the chart push-forward of the principal
/// direction at p and the nearest eigen-direction of the chart Hessian of
/// λ. Small residuals certify that curvature lines become Hessian
/// eigen-lines in the chart.
pub fn fact_a1_residual(f: &SurfaceSpec, p: Point2) -> Result<f64> {
    let j = eval_jet(f, p, 2)?;
    let dir = principal_direction(&j)?;
    let jac = chart_jacobian(f, p, 1e-6 * (1.0 + p.norm()))?;
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if det.abs() <= 0.1 {
        return Err(Error::NoConvergence(format!(
            "chart Jacobian determinant {det:.3e} too small for a trustworthy push-forward"
        )));
    }
    let (s, c) = dir.angle().sin_cos();
    let pushed = [jac[0][0] * c + jac[0][1] * s, jac[1][0] * c + jac[1][1] * s];
    let pushed_norm = pushed[0].hypot(pushed[1]);

    let hess = chart_hessian_of_lambda(f, p)?;
    let eig = hess.major_eigen_direction()?;
    let (es, ec) = eig.angle().sin_cos();
    // cross and dot against one eigen-direction; the other is orthogonal
    let cross = (pushed[0] * es - pushed[1] * ec) / pushed_norm;
    let dot = (pushed[0] * ec + pushed[1] * es) / pushed_norm;
    Ok(cross.abs().min(dot.abs()))
}

/// The congruence surface swept by the tangency points of the sphere
/// family of an inverted-family radius function.
pub fn sphere_congruence_surface(lam: &SurfaceSpec, p: Point2) -> Result<[f64; 3]> {
    if p.norm() == 0.0 {
        return Err(Error::Domain("congruence surface needs a punctured chart point".into()));
    }
    let j = eval_jet(lam, p, 2)?;
    let n = normal_from_gradient(j.fx(), j.fy());
    Ok([p.x - j.value * n[0], p.y - j.value * n[1], j.value - j.value * n[2]])
}

/// The product of the radius function with its stereographic normal,
/// whose chart derivatives vanish toward the puncture.
pub fn lambda_nu(lam: &SurfaceSpec, p: Point2) -> Result<[f64; 3]> {
    let j = eval_jet(lam, p, 2)?;
    let n = normal_from_gradient(j.fx(), j.fy());
    Ok([j.value * n[0], j.value * n[1], j.value * n[2]])
}
