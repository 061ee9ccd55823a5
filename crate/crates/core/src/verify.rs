//! Named self-check suites behind `verify --suite ...`. Each check states
//! what it established in its detail string; a suite passes iff every
//! check does.

use std::f64::consts::PI;

use crate::catalog::{FSpec, SurfaceSpec};
use crate::expr;
use crate::inversion::{
    check_hatted_limits, check_regularity, duality_check, RegularityLevel,
};
use crate::jets::Point2;
use crate::ribaucour::{fact_a1_residual, gradient_from_normal, normal_from_gradient};
use crate::winding::{
    auto_radius, hessian_flow_index, infinity_radius_g, sign_change_index, umbilic_index_direct,
    umbilic_index_via_d, umbilic_index_via_delta, valid_radius_lambda, CurveSpec, HessianRoute,
};
use crate::Error;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Indices,
    Regularity,
    Duality,
    Ribaucour,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "indices" => Some(Suite::Indices),
            "regularity" => Some(Suite::Regularity),
            "duality" => Some(Suite::Duality),
            "ribaucour" => Some(Suite::Ribaucour),
            "all" => Some(Suite::All),
            _ => None,
        }
    }
}

fn expr_surface(s: &str) -> SurfaceSpec {
    SurfaceSpec::Expression(expr::parse(s).expect("suite expression parses"))
}

fn require(cond: bool, detail: String) -> Result<String, String> {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_checks(
    tasks: Vec<(String, Box<dyn FnOnce() -> Result<String, String> + Send>)>,
) -> Vec<CheckResult> {
    // checks run concurrently; results are collected in declaration order
    std::thread::scope(|scope| {
        let handles: Vec<_> = tasks
            .into_iter()
            .map(|(name, body)| (name, scope.spawn(body)))
            .collect();
        handles
            .into_iter()
            .map(|(name, h)| match h.join() {
                Ok(Ok(detail)) => CheckResult { name, passed: true, detail },
                Ok(Err(detail)) => CheckResult { name, passed: false, detail },
                Err(_) => CheckResult { name, passed: false, detail: "check panicked".into() },
            })
            .collect()
    })
}

type Task = (String, Box<dyn FnOnce() -> Result<String, String> + Send>);

fn task(
    name: impl Into<String>,
    body: impl FnOnce() -> Result<String, String> + Send + 'static,
) -> Task {
    (name.into(), Box::new(body))
}

fn indices_tasks() -> Vec<Task> {
    let mut tasks = Vec::new();
    tasks.push(task("cubic saddle index -1/2, identifier route", || {
        let curve = CurveSpec::origin_circle(0.1).map_err(|e| e.to_string())?;
        let (idx, rep) = umbilic_index_via_d(&SurfaceSpec::ReZ3, &curve).map_err(|e| e.to_string())?;
        require(
            idx.twice == -1 && rep.residual < 0.01,
            format!("index {idx}, residual {:.2e}", rep.residual),
        )
    }));
    tasks.push(task("cubic saddle index -1/2, direct line field", || {
        let curve = CurveSpec::origin_circle(0.1).map_err(|e| e.to_string())?;
        let (idx, rep) = umbilic_index_direct(&SurfaceSpec::ReZ3, &curve).map_err(|e| e.to_string())?;
        require(
            idx.twice == -1 && rep.residual < 0.02,
            format!("index {idx}, residual {:.2e}", rep.residual),
        )
    }));
    tasks.push(task("radial cubic: polar pair winds -1", || {
        let f = expr_surface("r^3 * cos(theta)");
        let curve = CurveSpec::origin_circle(0.1).map_err(|e| e.to_string())?;
        let (_, rep) = umbilic_index_via_delta(&f, &curve).map_err(|e| e.to_string())?;
        let counted = sign_change_index(&f, &curve).map_err(|e| e.to_string())?;
        require(
            rep.integer_index() == -1 && counted == -1,
            format!("winding {}, sign-change count {counted}", rep.integer_index()),
        )
    }));
    tasks.push(task("radial cubic: umbilic index 1/2", || {
        let f = expr_surface("r^3 * cos(theta)");
        let curve = CurveSpec::origin_circle(0.1).map_err(|e| e.to_string())?;
        let (idx, _) = umbilic_index_via_delta(&f, &curve).map_err(|e| e.to_string())?;
        require(idx.twice == 1, format!("index {idx}"))
    }));
    for m in 1..=6u32 {
        tasks.push(task(format!("exterior family m={m}: index 1 - m/2 on a valid circle"), move || {
            let f = SurfaceSpec::fm(m, 0.2).map_err(|e| e.to_string())?;
            let r = auto_radius(&f).map_err(|e| e.to_string())?;
            let curve = CurveSpec::origin_circle(r).map_err(|e| e.to_string())?;
            let (idx, rep) = umbilic_index_via_delta(&f, &curve).map_err(|e| e.to_string())?;
            let counted = sign_change_index(&f, &curve).map_err(|e| e.to_string())?;
            require(
                idx.twice == 2 - m as i64 && counted == -(m as i64),
                format!(
                    "radius {r:.3e}, index {idx}, winding {}, sign-change count {counted}",
                    rep.integer_index()
                ),
            )
        }));
    }
    for m in 1..=4u32 {
        tasks.push(task(format!("inverted family m={m}: eigen-flow index 1 + m/2"), move || {
            let lam = SurfaceSpec::lambda_m(m, 0.5).map_err(|e| e.to_string())?;
            let r = auto_radius(&lam).map_err(|e| e.to_string())?;
            let curve = CurveSpec::origin_circle(r).map_err(|e| e.to_string())?;
            let (polar, prep) =
                hessian_flow_index(&lam, &curve, HessianRoute::Polar).map_err(|e| e.to_string())?;
            let (direct, _) =
                hessian_flow_index(&lam, &curve, HessianRoute::Direct).map_err(|e| e.to_string())?;
            require(
                polar.twice == 2 + m as i64
                    && direct.twice == 2 + m as i64
                    && prep.integer_index() == m as i64,
                format!(
                    "radius {r:.3e}, polar winding {}, index {polar} (direct {direct})",
                    prep.integer_index()
                ),
            )
        }));
    }
    tasks
}

fn regularity_tasks() -> Vec<Task> {
    vec![
        task("exterior family end is a projected C^2 graph", || {
            let f = SurfaceSpec::fm(3, 0.2).map_err(|e| e.to_string())?;
            let rep = check_regularity(&f, RegularityLevel::C2Projection);
            require(
                rep.level == RegularityLevel::C2Projection,
                format!("level {:?}, exponent c = {}", rep.level, rep.exponent_c),
            )
        }),
        task("umbilic-free plane: differentiable end, not C^1", || {
            let rep = check_regularity(&SurfaceSpec::Bates, RegularityLevel::C2Projection);
            require(rep.level == RegularityLevel::Differentiable, format!("level {:?}", rep.level))
        }),
        task("umbilic-free perturbed plane: differentiable end, not C^1", || {
            let gh = SurfaceSpec::ghomi_howard(1.0).map_err(|e| e.to_string())?;
            let rep = check_regularity(&gh, RegularityLevel::C2Projection);
            require(rep.level == RegularityLevel::Differentiable, format!("level {:?}", rep.level))
        }),
        task("inverted-chart series limits decay", || {
            let f = SurfaceSpec::fm(3, 0.2).map_err(|e| e.to_string())?;
            let rep = check_hatted_limits(&f).map_err(|e| e.to_string())?;
            let bad: Vec<&str> = rep
                .sequences
                .iter()
                .filter(|s| !s.passed)
                .map(|s| s.name.as_str())
                .collect();
            require(
                bad.is_empty(),
                if bad.is_empty() {
                    format!("{} sequences decay monotonically below 1e-3", rep.sequences.len())
                } else {
                    format!("non-decaying sequences: {}", bad.join(", "))
                },
            )
        }),
    ]
}

fn duality_tasks() -> Vec<Task> {
    let mut tasks = Vec::new();
    for m in 1..=6u32 {
        tasks.push(task(format!("index sum over both ends equals 2, m={m}"), move || {
            let f = SurfaceSpec::fm(m, 0.5).map_err(|e| e.to_string())?;
            let r_out = infinity_radius_g(m, 0.5, FSpec::Tanh).map_err(|e| e.to_string())?;
            let r_in = valid_radius_lambda(m, 0.5, FSpec::Tanh).map_err(|e| e.to_string())?;
            let rep = duality_check(&f, r_out, r_in).map_err(|e| e.to_string())?;
            require(
                rep.sum.twice == 4,
                format!(
                    "index at infinity {}, index of the dual at the origin {}, sum {}",
                    rep.ind_infinity, rep.ind_origin, rep.sum
                ),
            )
        }));
    }
    tasks.push(task("index sum over both ends equals 2 for the quadric saddle", || {
        let f = expr_surface("x^2 - y^2");
        let rep = duality_check(&f, 2.0, 0.5).map_err(|e| e.to_string())?;
        require(
            rep.sum.twice == 4 && rep.ind_infinity.twice == 0,
            format!(
                "index at infinity {}, index of the dual at the origin {}",
                rep.ind_infinity, rep.ind_origin
            ),
        )
    }));
    tasks.push(task("dual of the exterior family matches the inverted family", || {
        let m = 3u32;
        let a = 0.5;
        let g = expr_surface("tanh((x^2+y^2)^0.25 * cos(3*theta))");
        let dual = crate::catalog::make_dual(&g);
        let lam = SurfaceSpec::lambda_m(m, a).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for k in 0..500 {
            let r = 0.02 + 0.28 * (k % 25) as f64 / 24.0;
            let th = PI * 2.0 * (k as f64 + 0.5) / 500.0;
            let p = Point2::new(r * th.cos(), r * th.sin());
            let dv = dual.eval(p.x, p.y).map_err(|e| e.to_string())?;
            let lv = lam.eval(p.x, p.y).map_err(|e| e.to_string())?;
            worst = worst.max((dv - lv).abs());
        }
        require(worst < 1e-11, format!("max pointwise deviation {worst:.2e} over 500 points"))
    }));
    tasks
}

fn ribaucour_tasks() -> Vec<Task> {
    vec![
        task("factored first column aligns with the principal direction", || {
            let surfaces: Vec<(SurfaceSpec, Vec<f64>)> = vec![
                (SurfaceSpec::Bates, vec![0.4, 1.3]),
                (SurfaceSpec::ghomi_howard(1.0).map_err(|e| e.to_string())?, vec![0.4, 1.3]),
                (SurfaceSpec::ReZ3, vec![0.3, 0.8]),
                (SurfaceSpec::fm(2, 0.2).map_err(|e| e.to_string())?, vec![2.0, 5.0]),
                (expr_surface("x^2 + 2*y^2 + 0.3*x*y"), vec![0.3, 0.8]),
            ];
            let mut worst = 0.0f64;
            let mut tested = 0usize;
            for (f, radii) in &surfaces {
                for &r in radii {
                    for k in 0..5 {
                        let th = PI * 2.0 * (k as f64 + 0.37) / 5.0;
                        let p = Point2::new(r * th.cos(), r * th.sin());
                        match fact_a1_residual(f, p) {
                            Ok(res) => {
                                worst = worst.max(res);
                                tested += 1;
                            }
                            Err(Error::Umbilic) => continue,
                            Err(e) => return Err(format!("{} at ({}, {}): {e}", f.name(), p.x, p.y)),
                        }
                    }
                }
            }
            require(
                worst < 1e-4,
                format!("max residual {worst:.2e} over {tested} points on 5 surfaces"),
            )
        }),
        task("normal vector and chart gradient round trip", || {
            let mut worst = 0.0f64;
            for (lx, ly) in [(0.0, 0.0), (0.3, -0.7), (-1.2, 0.4), (2.0, 2.0)] {
                let n = normal_from_gradient(lx, ly);
                let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                let (bx, by) = gradient_from_normal(n);
                worst = worst.max((norm - 1.0).abs()).max((bx - lx).abs()).max((by - ly).abs());
            }
            require(worst < 1e-13, format!("max round-trip deviation {worst:.2e}"))
        }),
    ]
}

/// Runs the requested suite and returns one result per check.
pub fn run_suite(suite: Suite) -> Vec<CheckResult> {
    let tasks = match suite {
        Suite::Indices => indices_tasks(),
        Suite::Regularity => regularity_tasks(),
        Suite::Duality => duality_tasks(),
        Suite::Ribaucour => ribaucour_tasks(),
        Suite::All => {
            let mut t = indices_tasks();
            t.extend(regularity_tasks());
            t.extend(duality_tasks());
            t.extend(ribaucour_tasks());
            t
        }
    };
    run_checks(tasks)
}
