//! File exports: identifier/direction fields as CSV, direction fields as
//! SVG quivers, and meshes of the inverted surfaces as OBJ.

use std::fmt::Write as _;

use crate::catalog::SurfaceSpec;
use crate::inversion::invert_graph;
use crate::jets::Point2;
use crate::ribaucour::sphere_congruence_surface;
use crate::winding::{d_vector, principal_direction_field};
use crate::Result;

/// Rectangular sample region with a row-major grid.
#[derive(Clone, Copy, Debug)]
pub struct GridRect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridRect {
    pub fn point(&self, i: usize, j: usize) -> Point2 {
        let fx = if self.nx > 1 { i as f64 / (self.nx - 1) as f64 } else { 0.5 };
        let fy = if self.ny > 1 { j as f64 / (self.ny - 1) as f64 } else { 0.5 };
        Point2::new(self.x0 + fx * (self.x1 - self.x0), self.y0 + fy * (self.y1 - self.y0))
    }
}

fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Principal direction angles and the identifier pair over a grid, one row
/// per point, row-major.
pub fn field_csv(f: &SurfaceSpec, rect: GridRect) -> Result<String> {
    let mut out = String::from("x,y,dir_angle,d1,d2\n");
    for j in 0..rect.ny {
        for i in 0..rect.nx {
            let p = rect.point(i, j);
            let d = d_vector(f, p);
            let (d1, d2) = d.map(|v| (v.vx, v.vy)).unwrap_or((f64::NAN, f64::NAN));
            let angle = principal_direction_field(f, p).map(|d| d.angle()).unwrap_or(f64::NAN);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                sig17(p.x),
                sig17(p.y),
                sig17(angle),
                sig17(d1),
                sig17(d2)
            );
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldStyle {
    /// Undirected segments for line fields.
    Lines,
    /// Arrows for vector fields.
    Arrows,
}

/// SVG 1.1 quiver of a sampled plane field, one polyline or arrow per
/// sample, with the view box matched to the region. Samples outside the
/// optional radial band are skipped.
pub fn field_svg<F>(
    field: F,
    rect: GridRect,
    style: FieldStyle,
    r_band: Option<(f64, f64)>,
) -> Result<String>
where
    F: Fn(Point2) -> Result<(f64, f64)>,
{
    let w = rect.x1 - rect.x0;
    let h = rect.y1 - rect.y0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         viewBox=\"{} {} {} {}\">",
        rect.x0, -rect.y1, w, h
    );
    let _ = writeln!(
        out,
        "<g stroke=\"black\" stroke-width=\"{}\" fill=\"none\">",
        0.002 * w.max(h)
    );
    let len = 0.35 * (w / rect.nx.max(2) as f64).min(h / rect.ny.max(2) as f64);
    for j in 0..rect.ny {
        for i in 0..rect.nx {
            let p = rect.point(i, j);
            if let Some((lo, hi)) = r_band {
                let r = p.norm();
                if r < lo || r > hi {
                    continue;
                }
            }
            let Ok((vx, vy)) = field(p) else { continue };
            let n = vx.hypot(vy);
            if !(n > 0.0) || !n.is_finite() {
                continue;
            }
            let (ux, uy) = (vx / n * len, vy / n * len);
            // the svg y axis points down
            match style {
                FieldStyle::Lines => {
                    let _ = writeln!(
                        out,
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                        p.x - ux,
                        -(p.y - uy),
                        p.x + ux,
                        -(p.y + uy)
                    );
                }
                FieldStyle::Arrows => {
                    let (hx, hy) = (0.3 * (-ux - uy * 0.6), 0.3 * (-uy + ux * 0.6));
                    let (gx, gy) = (0.3 * (-ux + uy * 0.6), 0.3 * (-uy - ux * 0.6));
                    let (tx, ty) = (p.x + ux, p.y + uy);
                    let _ = writeln!(
                        out,
                        "<polyline points=\"{},{} {},{} {},{} {},{} {},{}\"/>",
                        p.x,
                        -p.y,
                        tx,
                        -ty,
                        tx + hx,
                        -(ty + hy),
                        tx,
                        -ty,
                        tx + gx,
                        -(ty + gy)
                    );
                }
            }
        }
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn push_obj_grid(
    out: &mut String,
    rows: usize,
    cols: usize,
    mut vertex: impl FnMut(usize, usize) -> Result<[f64; 3]>,
) -> Result<()> {
    for i in 0..rows {
        for j in 0..cols {
            let v = vertex(i, j)?;
            let _ = writeln!(out, "v {} {} {}", sig17(v[0]), sig17(v[1]), sig17(v[2]));
        }
    }
    let idx = |i: usize, j: usize| i * cols + j + 1;
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            let (a, b, c, d) = (idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j));
            let _ = writeln!(out, "f {a} {b} {c}");
            let _ = writeln!(out, "f {a} {c} {d}");
        }
    }
    Ok(())
}

/// Triangulated mesh of the inverted graph over a polar chart grid; the
/// closing column duplicates the first so the seam is explicit.
pub fn inversion_obj(f: &SurfaceSpec, rho_max: f64, n_rho: usize, n_theta: usize) -> Result<String> {
    let mut out = String::new();
    push_obj_grid(&mut out, n_rho, n_theta + 1, |i, j| {
        let rho = rho_max * (i + 1) as f64 / n_rho as f64;
        let th = std::f64::consts::TAU * (j % n_theta) as f64 / n_theta as f64;
        let (s, c) = th.sin_cos();
        Ok(invert_graph(f, Point2::new(rho * c, rho * s))?.xyz)
    })?;
    Ok(out)
}

/// Triangulated mesh of the sphere-congruence surface of an inverted
/// family over a polar chart grid.
pub fn congruence_obj(
    lam: &SurfaceSpec,
    r_max: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<String> {
    let mut out = String::new();
    push_obj_grid(&mut out, n_r, n_theta + 1, |i, j| {
        let r = r_max * (i + 1) as f64 / n_r as f64;
        let th = std::f64::consts::TAU * (j % n_theta) as f64 / n_theta as f64;
        let (s, c) = th.sin_cos();
        sphere_congruence_surface(lam, Point2::new(r * c, r * s))
    })?;
    Ok(out)
}
