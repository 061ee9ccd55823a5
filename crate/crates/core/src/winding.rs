//! Rotation indices of plane vector fields and line fields along closed
//! curves, the sign-change counting shortcut for the polar identifier pair,
//! and the index-combination formulas built on top of them.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use crate::catalog::{
    scaled_hessian_identifiers_g, scaled_hessian_identifiers_lambda, scaled_polar_identifiers_g,
    FSpec, SurfaceSpec,
};
use crate::identifiers::{
    cartesian_identifiers, hessian_direction, hessian_identifier_cartesian,
    hessian_identifier_polar, polar_identifiers, principal_direction, LineDirection, PlaneVector,
};
use crate::jets::{eval_jet, polar_jet, Point2};
use crate::{Error, Result};

/// Closed curve traversed counterclockwise as the parameter runs over
/// [0, 2π].
#[derive(Clone)]
pub enum CurveSpec {
    Circle { center: Point2, radius: f64 },
    Parametric(Arc<dyn Fn(f64) -> Point2 + Send + Sync>),
}

impl CurveSpec {
    pub fn circle(center: Point2, radius: f64) -> Result<CurveSpec> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("circle radius must be positive, got {radius}")));
        }
        Ok(CurveSpec::Circle { center, radius })
    }

    pub fn origin_circle(radius: f64) -> Result<CurveSpec> {
        CurveSpec::circle(Point2::new(0.0, 0.0), radius)
    }

    pub fn point(&self, t: f64) -> Point2 {
        match self {
            CurveSpec::Circle { center, radius } => {
                let (s, c) = t.sin_cos();
                Point2::new(center.x + radius * c, center.y + radius * s)
            }
            CurveSpec::Parametric(f) => f(t),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            CurveSpec::Circle { center, radius } => {
                if center.x == 0.0 && center.y == 0.0 {
                    format!("circle:{radius}")
                } else {
                    format!("circle:{radius}@({},{})", center.x, center.y)
                }
            }
            CurveSpec::Parametric(_) => "parametric".into(),
        }
    }
}

impl fmt::Debug for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// An index value stored as twice its value, so half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfIndex {
    pub twice: i64,
}

impl HalfIndex {
    pub fn from_twice(twice: i64) -> Self {
        HalfIndex { twice }
    }

    pub fn from_integer(k: i64) -> Self {
        HalfIndex { twice: 2 * k }
    }

    /// The value as a float, for diagnostics only.
    pub fn value(&self) -> f64 {
        self.twice as f64 / 2.0
    }
}

impl fmt::Display for HalfIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Outcome of one winding-number evaluation.
#[derive(Clone, Debug)]
pub struct WindingReport {
    pub index: HalfIndex,
    pub samples: usize,
    pub min_magnitude: f64,
    pub max_step_angle: f64,
    /// Residual of the accumulated angle against the rounded index, in
    /// units of the twice-index.
    pub residual: f64,
    pub refined: bool,
}

impl WindingReport {
    /// The index as an integer; panics if it is a strict half-integer.
    pub fn integer_index(&self) -> i64 {
        assert!(self.index.twice % 2 == 0, "index is not an integer");
        self.index.twice / 2
    }
}

pub const DEFAULT_SAMPLES: usize = 256;
const MAX_DEPTH: u32 = 24;
const MIN_DEPTH: u32 = 3;
const VECTOR_RESIDUAL: f64 = 0.01;
const LINE_RESIDUAL: f64 = 0.02;

fn wrap_to_half_turn(d: f64) -> f64 {
    let mut d = d.rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    d
}

struct Accumulator<'a> {
    eval: &'a dyn Fn(f64) -> Result<(f64, f64)>,
    step_limit: f64,
    min_mag: f64,
    max_mag: f64,
    max_step: f64,
    samples: usize,
    refined: bool,
}

impl<'a> Accumulator<'a> {
    fn sample(&mut self, t: f64) -> Result<f64> {
        let (angle, mag) = (self.eval)(t)?;
        if !angle.is_finite() || !mag.is_finite() {
            return Err(Error::NonFinite(format!("field sample at t = {t}")));
        }
        self.min_mag = self.min_mag.min(mag);
        self.max_mag = self.max_mag.max(mag);
        self.samples += 1;
        Ok(angle)
    }

    fn zero_or_stuck(&self, t: f64) -> Error {
        if self.min_mag <= 1e-12 * self.max_mag.max(f64::MIN_POSITIVE) {
            Error::ZeroOnCurve { min_magnitude: self.min_mag }
        } else {
            Error::NoConvergence(format!(
                "angular step did not drop below {:.3} after depth {MAX_DEPTH} near t = {t}",
                self.step_limit
            ))
        }
    }

    fn span(&mut self, t0: f64, a0: f64, t1: f64, a1: f64, depth: u32) -> Result<f64> {
        let d = wrap_to_half_turn(a1 - a0);
        // a small wrapped step can hide a fast full turn between samples,
        // so the first few levels subdivide unconditionally
        if d.abs() < self.step_limit && depth >= MIN_DEPTH {
            self.max_step = self.max_step.max(d.abs());
            return Ok(d);
        }
        if depth >= MAX_DEPTH {
            return Err(self.zero_or_stuck(t0));
        }
        let tm = 0.5 * (t0 + t1);
        let am = self.sample(tm)?;
        if d.abs() >= self.step_limit {
            self.refined = true;
        }
        Ok(self.span(t0, a0, tm, am, depth + 1)? + self.span(tm, am, t1, a1, depth + 1)?)
    }

    fn run(&mut self, initial: usize) -> Result<f64> {
        let n = initial.max(4);
        let mut angles = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = TAU * i as f64 / n as f64;
            angles.push((t, self.sample(t)?));
        }
        if self.min_mag <= 1e-14 * self.max_mag.max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroOnCurve { min_magnitude: self.min_mag });
        }
        let mut total = 0.0;
        for w in angles.windows(2) {
            let (t0, a0) = w[0];
            let (t1, a1) = w[1];
            total += self.span(t0, a0, t1, a1, 0)?;
        }
        Ok(total)
    }
}

fn accumulate(
    eval: &dyn Fn(f64) -> Result<(f64, f64)>,
    step_limit: f64,
    initial: usize,
) -> Result<(f64, Accumulator<'_>)> {
    let mut acc = Accumulator {
        eval,
        step_limit,
        min_mag: f64::INFINITY,
        max_mag: 0.0,
        max_step: 0.0,
        samples: 0,
        refined: false,
    };
    let total = acc.run(initial)?;
    Ok((total, acc))
}

/// Rotation index of a vector field along a closed curve; the result is an
/// integer, stored as a [`HalfIndex`] with even numerator.
pub fn vector_field_index<F>(field: F, curve: &CurveSpec) -> Result<WindingReport>
where
    F: Fn(Point2) -> Result<PlaneVector>,
{
    vector_field_index_n(field, curve, DEFAULT_SAMPLES)
}

pub fn vector_field_index_n<F>(field: F, curve: &CurveSpec, initial: usize) -> Result<WindingReport>
where
    F: Fn(Point2) -> Result<PlaneVector>,
{
    let eval = |t: f64| -> Result<(f64, f64)> {
        let v = field(curve.point(t))?;
        Ok((v.angle(), v.norm()))
    };
    let (total, acc) = accumulate(&eval, PI / 2.0, initial)?;
    let turns = total / TAU;
    let k = turns.round();
    let residual = (turns - k).abs();
    if residual >= VECTOR_RESIDUAL {
        return Err(Error::NoConvergence(format!(
            "winding residual {residual:.4} exceeds {VECTOR_RESIDUAL}"
        )));
    }
    Ok(WindingReport {
        index: HalfIndex::from_integer(k as i64),
        samples: acc.samples,
        min_magnitude: acc.min_mag,
        max_step_angle: acc.max_step,
        residual: 2.0 * residual,
        refined: acc.refined,
    })
}

/// Rotation index of a line field (directions taken modulo a half turn);
/// half-integer in general.
pub fn line_field_index<F>(dirs: F, curve: &CurveSpec) -> Result<WindingReport>
where
    F: Fn(Point2) -> Result<LineDirection>,
{
    line_field_index_n(dirs, curve, DEFAULT_SAMPLES)
}

pub fn line_field_index_n<F>(dirs: F, curve: &CurveSpec, initial: usize) -> Result<WindingReport>
where
    F: Fn(Point2) -> Result<LineDirection>,
{
    // Doubling the direction angle turns the line field into a vector field
    // whose integer winding is exactly the twice-index.
    let eval = |t: f64| -> Result<(f64, f64)> {
        match dirs(curve.point(t)) {
            Ok(d) => Ok((2.0 * d.angle(), 1.0)),
            Err(Error::Umbilic) => Err(Error::UmbilicOnCurve { t }),
            Err(e) => Err(e),
        }
    };
    let (total, acc) = accumulate(&eval, PI / 2.0, initial)?;
    let twice = total / TAU;
    let k = twice.round();
    let residual = (twice - k).abs();
    if residual >= LINE_RESIDUAL {
        return Err(Error::NoConvergence(format!(
            "twice-index residual {residual:.4} exceeds {LINE_RESIDUAL}"
        )));
    }
    Ok(WindingReport {
        index: HalfIndex::from_twice(k as i64),
        samples: acc.samples,
        min_magnitude: acc.min_mag,
        max_step_angle: acc.max_step / 2.0,
        residual,
        refined: acc.refined,
    })
}

/// The polar identifier pair at a point. For the exterior families the
/// closed form rescaled by the (positive) profile derivative is used, which
/// keeps both components representable at radii where the raw pair
/// underflows; componentwise positive rescaling changes no winding number
/// and no sign.
pub fn delta_vector(f: &SurfaceSpec, p: Point2) -> Result<PlaneVector> {
    match f {
        SurfaceSpec::Fm { .. } | SurfaceSpec::Gm { .. } => {
            let (m, a, fs) = f.profile().expect("exterior family carries a profile");
            let q = p.to_polar()?;
            let (d1, d2) = scaled_polar_identifiers_g(m, a, fs, q.r(), q.theta());
            Ok(PlaneVector::new(d1, d2))
        }
        _ => {
            let q = p.to_polar()?;
            let j = polar_jet(f, q, 2)?;
            Ok(polar_identifiers(&j, q))
        }
    }
}

/// The Cartesian identifier pair at a point.
pub fn d_vector(f: &SurfaceSpec, p: Point2) -> Result<PlaneVector> {
    let j = eval_jet(f, p, 2)?;
    Ok(cartesian_identifiers(&j))
}

/// The scaled equi-diagonal identifier of the catalog families, where one
/// exists: polar pair, divided componentwise by positive factors.
fn scaled_hessian_delta(g: &SurfaceSpec, r: f64, theta: f64) -> Option<(f64, f64)> {
    match g {
        SurfaceSpec::Fm { .. } | SurfaceSpec::Gm { .. } => {
            let (m, a, fs) = g.profile().expect("exterior family carries a profile");
            Some(scaled_hessian_identifiers_g(m, a, fs, r, theta))
        }
        SurfaceSpec::LambdaM { .. } => {
            let (m, a, fs) = g.profile().expect("inverted family carries a profile");
            Some(scaled_hessian_identifiers_lambda(m, a, fs, r, theta))
        }
        // the dual of an exterior-family function differs from the inverted
        // family by ρ² times a constant, which leaves the equi-diagonal
        // identifier unchanged
        SurfaceSpec::Dual(inner) => match &**inner {
            SurfaceSpec::Fm { .. } | SurfaceSpec::Gm { .. } => {
                let (m, a, fs) = inner.profile().expect("exterior family carries a profile");
                Some(scaled_hessian_identifiers_lambda(m, a, fs, r, theta))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Polar equi-diagonal identifier pair of the Hessian of g.
pub fn hessian_delta_vector(g: &SurfaceSpec, p: Point2) -> Result<PlaneVector> {
    let q = p.to_polar()?;
    if let Some((d1, d2)) = scaled_hessian_delta(g, q.r(), q.theta()) {
        return Ok(PlaneVector::new(d1, d2));
    }
    let j = polar_jet(g, q, 2)?;
    Ok(hessian_identifier_polar(&j, q))
}

/// Cartesian equi-diagonal identifier pair of the Hessian of g. For the
/// catalog families it is the polar pair rotated by twice the polar angle
/// (positive radial factors dropped).
pub fn hessian_d_vector(g: &SurfaceSpec, p: Point2) -> Result<PlaneVector> {
    let q = p.to_polar()?;
    if let Some((d1, d2)) = scaled_hessian_delta(g, q.r(), q.theta()) {
        let (s2, c2) = (2.0 * q.theta()).sin_cos();
        return Ok(PlaneVector::new(c2 * d1 - s2 * d2, s2 * d1 + c2 * d2));
    }
    let j = eval_jet(g, p, 2)?;
    Ok(hessian_identifier_cartesian(&j))
}

/// Major eigen-direction of the Hessian of g at p.
pub fn hessian_eigen_direction(g: &SurfaceSpec, p: Point2) -> Result<LineDirection> {
    let q = p.to_polar()?;
    if scaled_hessian_delta(g, q.r(), q.theta()).is_some() {
        let d = hessian_d_vector(g, p)?;
        if d.norm() == 0.0 {
            return Err(Error::Umbilic);
        }
        // the identifier is (2 g_xy, g_yy − g_xx); the doubled angle of the
        // major eigen-direction is atan2(2 g_xy, g_xx − g_yy)
        return Ok(LineDirection::from_angle(0.5 * d.vx.atan2(-d.vy)));
    }
    let j = eval_jet(g, p, 2)?;
    hessian_direction(&j)
}

/// Principal direction field of the graph of f.
pub fn principal_direction_field(f: &SurfaceSpec, p: Point2) -> Result<LineDirection> {
    let j = eval_jet(f, p, 2)?;
    principal_direction(&j)
}

/// Umbilic index as half the winding of the Cartesian identifier pair.
pub fn umbilic_index_via_d(f: &SurfaceSpec, curve: &CurveSpec) -> Result<(HalfIndex, WindingReport)> {
    let report = vector_field_index(|p| d_vector(f, p), curve)?;
    Ok((HalfIndex::from_twice(report.integer_index()), report))
}

/// Umbilic index as 1 plus half the winding of the polar identifier pair.
pub fn umbilic_index_via_delta(
    f: &SurfaceSpec,
    curve: &CurveSpec,
) -> Result<(HalfIndex, WindingReport)> {
    let report = vector_field_index(|p| delta_vector(f, p), curve)?;
    Ok((HalfIndex::from_twice(2 + report.integer_index()), report))
}

/// Umbilic index as the winding of the principal direction line field.
pub fn umbilic_index_direct(
    f: &SurfaceSpec,
    curve: &CurveSpec,
) -> Result<(HalfIndex, WindingReport)> {
    let report = line_field_index(|p| principal_direction_field(f, p), curve)?;
    Ok((report.index, report))
}

/// Index of the surface obtained by inverting the end: 2 minus the index
/// along the enclosing curve.
pub fn inverted_index(i_gamma: HalfIndex) -> HalfIndex {
    HalfIndex::from_twice(4 - i_gamma.twice)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HessianRoute {
    Cartesian,
    Polar,
    Direct,
}

/// Index of the Hessian eigen-flow of g at the singular point enclosed by
/// the curve, by the requested route.
pub fn hessian_flow_index(
    g: &SurfaceSpec,
    curve: &CurveSpec,
    route: HessianRoute,
) -> Result<(HalfIndex, WindingReport)> {
    match route {
        HessianRoute::Cartesian => {
            let report = vector_field_index(|p| hessian_d_vector(g, p), curve)?;
            Ok((HalfIndex::from_twice(report.integer_index()), report))
        }
        HessianRoute::Polar => {
            let report = vector_field_index(|p| hessian_delta_vector(g, p), curve)?;
            Ok((HalfIndex::from_twice(2 + report.integer_index()), report))
        }
        HessianRoute::Direct => {
            let report = line_field_index(|p| hessian_eigen_direction(g, p), curve)
                .map_err(|e| match e {
                    Error::UmbilicOnCurve { t } => Error::EquiDiagonalOnCurve { t },
                    other => other,
                })?;
            Ok((report.index, report))
        }
    }
}

/// Index of the Hessian eigen-flow of f along a large circle, traversed
/// counterclockwise.
pub fn index_at_infinity(f: &SurfaceSpec, radius: f64) -> Result<(HalfIndex, WindingReport)> {
    let curve = CurveSpec::origin_circle(radius)?;
    hessian_flow_index(f, &curve, HessianRoute::Direct)
}

/// Winding of the polar identifier pair by counting classified sign
/// changes of the first component along the curve.
pub fn sign_change_index(f: &SurfaceSpec, curve: &CurveSpec) -> Result<i64> {
    sign_change_index_of(|p| delta_vector(f, p), curve)
}

/// The counting route for an arbitrary identifier-style pair: locates the
/// zeros of the first component, classifies each by the sign of the second
/// component and of the first component's derivative, and returns minus
/// the classification sum.
pub fn sign_change_index_of<F>(field: F, curve: &CurveSpec) -> Result<i64>
where
    F: Fn(Point2) -> Result<PlaneVector>,
{
    const GRID: usize = 4096;
    let d1 = |t: f64| -> Result<f64> { Ok(field(curve.point(t)).map(|v| v.vx)?) };
    let d2 = |t: f64| -> Result<f64> { Ok(field(curve.point(t)).map(|v| v.vy)?) };

    // half-step offset keeps symmetry axes off the grid
    let step = TAU / GRID as f64;
    let mut values = Vec::with_capacity(GRID + 1);
    let mut sup1: f64 = 0.0;
    let mut sup2: f64 = 0.0;
    for j in 0..=GRID {
        let t = (j as f64 + 0.5) * step;
        let v = field(curve.point(t % TAU))?;
        if !v.vx.is_finite() || !v.vy.is_finite() {
            return Err(Error::NonFinite(format!("identifier sample at t = {t}")));
        }
        sup1 = sup1.max(v.vx.abs());
        sup2 = sup2.max(v.vy.abs());
        values.push((t, v.vx));
    }
    if sup1 == 0.0 {
        return Err(Error::TangentZero(
            "first identifier component vanishes along the whole curve".into(),
        ));
    }
    let deriv_tol = 1e-8 * sup1;
    let zero_tol2 = 1e-12 * sup2.max(f64::MIN_POSITIVE);

    let mut sum: i64 = 0;
    for w in values.windows(2) {
        let (t0, v0) = w[0];
        let (t1, v1) = w[1];
        if !(v0 * v1 < 0.0) {
            continue;
        }
        // bisect to the zero of the first component
        let (mut lo, mut hi, mut vlo) = (t0, t1, v0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let vm = d1(mid)?;
            if vm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if vm * vlo < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                vlo = vm;
            }
        }
        let tz = 0.5 * (lo + hi);
        let h = step * 1e-3;
        let slope = (d1(tz + h)? - d1(tz - h)?) / (2.0 * h);
        if slope.abs() <= deriv_tol {
            return Err(Error::TangentZero(format!(
                "|d1'| = {:.3e} at t = {tz:.6} is below tolerance {deriv_tol:.3e}",
                slope.abs()
            )));
        }
        let second = d2(tz)?;
        if second.abs() <= zero_tol2 {
            return Err(Error::ZeroOnCurve { min_magnitude: second.abs() });
        }
        if second > 0.0 {
            sum += if slope > 0.0 { 1 } else { -1 };
        }
    }
    Ok(-sum)
}

fn count_sign_changes<F>(f: F, n: usize) -> Result<usize>
where
    F: Fn(f64) -> f64,
{
    let step = TAU / n as f64;
    let mut changes = 0;
    let mut prev = f(0.5 * step);
    for j in 1..=n {
        let v = f((j as f64 + 0.5) * step);
        if !v.is_finite() || !prev.is_finite() {
            return Err(Error::NonFinite("sign-change scan".into()));
        }
        if prev * v < 0.0 {
            changes += 1;
        }
        prev = v;
    }
    Ok(changes)
}

/// Smallest power-of-two radius from which the exterior family's polar
/// identifier pair shows the asymptotic sign pattern: second component
/// positive on the even symmetry axes and negative on the odd ones, first
/// component with exactly 2m sign changes and positive slope at θ = 0.
pub fn valid_radius_g(m: u32, a: f64, f: FSpec) -> Result<f64> {
    let mf = m as f64;
    let mut r: f64 = 2.0;
    for _ in 0..130 {
        let pair = |theta: f64| scaled_polar_identifiers_g(m, a, f, r, theta);
        let d2_even = pair(0.0).1;
        let d2_odd = pair(PI / mf).1;
        let h = 1e-6;
        let slope = (pair(h).0 - pair(-h).0) / (2.0 * h);
        // the signs must hold robustly against the pair's scale on the
        // circle: a doubling can land exactly where the even-axis value
        // changes sign, leaving only a rounding residue
        let sup = (0..256)
            .map(|k| pair(TAU * k as f64 / 256.0).1.abs())
            .fold(0.0, f64::max);
        let floor = 1e-9 * sup;
        if d2_even > floor && d2_odd < -floor && slope > 0.0 {
            let changes = count_sign_changes(|th| pair(th).0, 1024.max(256 * m as usize))?;
            if changes == 2 * m as usize {
                return Ok(r);
            }
        }
        r *= 2.0;
    }
    Err(Error::NoConvergence(format!(
        "no radius below 2^130 satisfies the sign conditions for m = {m}, a = {a}"
    )))
}

/// Largest halving of 0.3 at which the inverted family's equi-diagonal
/// identifier pair shows the asymptotic sign pattern near the origin.
pub fn valid_radius_lambda(m: u32, a: f64, f: FSpec) -> Result<f64> {
    let mf = m as f64;
    let mut r: f64 = 0.3;
    for _ in 0..80 {
        let pair = |theta: f64| scaled_hessian_identifiers_lambda(m, a, f, r, theta);
        let z2_even = pair(0.0).1;
        let z2_odd = pair(PI / mf).1;
        if z2_even > 0.0 && z2_odd < 0.0 {
            let changes = count_sign_changes(|th| pair(th).0, 1024.max(256 * m as usize))?;
            if changes == 2 * m as usize {
                return Ok(r);
            }
        }
        r *= 0.5;
    }
    Err(Error::NoConvergence(format!(
        "no radius above 0.3/2^80 satisfies the sign conditions for m = {m}, a = {a}"
    )))
}

/// Smallest power-of-two radius from which the exterior family's Hessian
/// identifier pair shows its asymptotic sign pattern, so that the index at
/// infinity is measured past the last equi-diagonal circle.
pub fn infinity_radius_g(m: u32, a: f64, f: FSpec) -> Result<f64> {
    let mf = m as f64;
    let mut r: f64 = 2.0;
    for _ in 0..130 {
        let pair = |theta: f64| scaled_hessian_identifiers_g(m, a, f, r, theta);
        let d2_even = pair(0.0).1;
        let d2_odd = pair(PI / mf).1;
        if d2_even > 0.0 && d2_odd < 0.0 {
            let changes = count_sign_changes(|th| pair(th).0, 1024.max(256 * m as usize))?;
            if changes == 2 * m as usize {
                return Ok(r);
            }
        }
        r *= 2.0;
    }
    Err(Error::NoConvergence(format!(
        "no radius below 2^130 satisfies the Hessian sign conditions for m = {m}, a = {a}"
    )))
}

/// Radius chosen by the automatic curve search for a surface: the family
/// searches above, a default small circle otherwise.
pub fn auto_radius(f: &SurfaceSpec) -> Result<f64> {
    match f {
        SurfaceSpec::Fm { .. } | SurfaceSpec::Gm { .. } => {
            let (m, a, fs) = f.profile().expect("exterior family carries a profile");
            valid_radius_g(m, a, fs)
        }
        SurfaceSpec::LambdaM { .. } => {
            let (m, a, fs) = f.profile().expect("inverted family carries a profile");
            valid_radius_lambda(m, a, fs)
        }
        SurfaceSpec::Dual(inner) => match &**inner {
            SurfaceSpec::Fm { .. } | SurfaceSpec::Gm { .. } => {
                let (m, a, fs) = inner.profile().expect("exterior family carries a profile");
                valid_radius_lambda(m, a, fs)
            }
            _ => Ok(0.1),
        },
        _ => Ok(0.1),
    }
}

/// Outcome of a grid scan for umbilic candidates.
#[derive(Clone, Debug)]
pub struct ScanReport {
    /// Centroids of connected clusters of flagged cells: cells where both
    /// identifier components change sign or the pair falls below
    /// tolerance. A zero lying on a grid line flags the touching cells
    /// too, so adjacent cells are merged into one candidate.
    pub candidates: Vec<Point2>,
    /// Number of flagged cells before merging.
    pub flagged_cells: usize,
    /// Smallest value of the first Cartesian identifier over the grid.
    pub min_d1: f64,
    /// Smallest magnitude of the identifier pair over the grid.
    pub min_norm: f64,
}

const REFINE_DEPTH: u32 = 6;

/// True if some subcell at the maximum refinement depth still shows a sign
/// change of both identifier components (or values below tolerance).
fn refine_cell(
    f: &SurfaceSpec,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    tol: f64,
    depth: u32,
) -> Result<bool> {
    if depth == 0 {
        return Ok(true);
    }
    let xs = [x0, 0.5 * (x0 + x1), x1];
    let ys = [y0, 0.5 * (y0 + y1), y1];
    let mut d1 = [[0.0; 3]; 3];
    let mut d2 = [[0.0; 3]; 3];
    for (jj, &y) in ys.iter().enumerate() {
        for (ii, &x) in xs.iter().enumerate() {
            let v = d_vector(f, Point2::new(x, y))?;
            d1[jj][ii] = v.vx;
            d2[jj][ii] = v.vy;
        }
    }
    for j in 0..2 {
        for i in 0..2 {
            let corners = [(j, i), (j, i + 1), (j + 1, i), (j + 1, i + 1)];
            let small = corners
                .iter()
                .all(|&(jj, ii)| d1[jj][ii].hypot(d2[jj][ii]) <= tol);
            let spans = |v: &[[f64; 3]; 3]| {
                let vals = corners.map(|(jj, ii)| v[jj][ii]);
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if (small || (spans(&d1) && spans(&d2)))
                && refine_cell(f, xs[i], xs[i + 1], ys[j], ys[j + 1], tol, depth - 1)?
            {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Scans a rectangle on an nx-by-ny grid of sample points for cells that
/// may contain an umbilic: both identifier components change sign across
/// the cell, or the pair's magnitude drops below a tolerance relative to
/// its sup over the grid.
pub fn scan_umbilics(
    f: &SurfaceSpec,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    ny: usize,
) -> Result<ScanReport> {
    if nx < 2 || ny < 2 {
        return Err(Error::Domain("scan grid must be at least 2x2".into()));
    }
    let px = |i: usize| x0 + (x1 - x0) * i as f64 / (nx - 1) as f64;
    let py = |j: usize| y0 + (y1 - y0) * j as f64 / (ny - 1) as f64;
    let mut d1 = vec![f64::NAN; nx * ny];
    let mut d2 = vec![f64::NAN; nx * ny];
    let mut min_d1 = f64::INFINITY;
    let mut min_norm = f64::INFINITY;
    let mut sup_norm = 0.0f64;
    for j in 0..ny {
        for i in 0..nx {
            let v = d_vector(f, Point2::new(px(i), py(j)))?;
            d1[j * nx + i] = v.vx;
            d2[j * nx + i] = v.vy;
            min_d1 = min_d1.min(v.vx);
            min_norm = min_norm.min(v.norm());
            sup_norm = sup_norm.max(v.norm());
        }
    }
    let tol = 1e-9 * sup_norm;
    let changes = |vals: &[f64], a: usize, b: usize, c: usize, d: usize| {
        let lo = vals[a].min(vals[b]).min(vals[c]).min(vals[d]);
        let hi = vals[a].max(vals[b]).max(vals[c]).max(vals[d]);
        lo <= 0.0 && hi >= 0.0
    };
    let mut flagged = vec![false; (nx - 1) * (ny - 1)];
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (a, b, c, d) = (j * nx + i, j * nx + i + 1, (j + 1) * nx + i, (j + 1) * nx + i + 1);
            let small = [a, b, c, d]
                .iter()
                .all(|&k| d1[k].hypot(d2[k]) <= tol);
            // both identifiers changing sign across the cell does not imply
            // a common zero; subdivision separates a pair of nearby zero
            // curves from a genuine crossing
            if (small || (changes(&d1, a, b, c, d) && changes(&d2, a, b, c, d)))
                && refine_cell(f, px(i), px(i + 1), py(j), py(j + 1), tol, REFINE_DEPTH)?
            {
                flagged[j * (nx - 1) + i] = true;
            }
        }
    }
    let flagged_cells = flagged.iter().filter(|&&f| f).count();
    // flood-fill 4-connected clusters of flagged cells; one candidate each
    let mut seen = vec![false; flagged.len()];
    let mut candidates = Vec::new();
    for start in 0..flagged.len() {
        if !flagged[start] || seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let (mut sx, mut sy, mut count) = (0.0, 0.0, 0usize);
        while let Some(k) = stack.pop() {
            let (i, j) = (k % (nx - 1), k / (nx - 1));
            sx += 0.5 * (px(i) + px(i + 1));
            sy += 0.5 * (py(j) + py(j + 1));
            count += 1;
            let mut push = |kk: usize| {
                if flagged[kk] && !seen[kk] {
                    seen[kk] = true;
                    stack.push(kk);
                }
            };
            if i > 0 {
                push(k - 1);
            }
            if i + 1 < nx - 1 {
                push(k + 1);
            }
            if j > 0 {
                push(k - (nx - 1));
            }
            if j + 1 < ny - 1 {
                push(k + nx - 1);
            }
        }
        candidates.push(Point2::new(sx / count as f64, sy / count as f64));
    }
    Ok(ScanReport { candidates, flagged_cells, min_d1, min_norm })
}
