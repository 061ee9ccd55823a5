//! Command-line front end: index computations, umbilic scans, verification
//! suites, and field/mesh exports.
//!
//! Exit codes: 0 success, 1 failed verification, 2 winding/geometry errors,
//! 3 parse errors, 4 I/O errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use umbilic::catalog::{FSpec, SurfaceSpec};
use umbilic::export::{congruence_obj, field_csv, field_svg, inversion_obj, FieldStyle, GridRect};
use umbilic::expr;
use umbilic::jets::Point2;
use umbilic::report::{Diagnostic, IndexEntry, RunReport};
use umbilic::verify::{run_suite, Suite};
use umbilic::winding::{
    auto_radius, d_vector, delta_vector, hessian_flow_index, principal_direction_field,
    scan_umbilics, umbilic_index_direct, umbilic_index_via_d, umbilic_index_via_delta, CurveSpec,
    HessianRoute, WindingReport,
};
use umbilic::Error;

#[derive(Parser)]
#[command(name = "umbilic", version, about = "Umbilic points and indices of graph surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the index of a singular flow along a closed curve.
    Index(IndexArgs),
    /// Scan a rectangle for umbilic candidate cells.
    Scan(ScanArgs),
    /// Run a named self-check suite.
    Verify(VerifyArgs),
    /// Export a field as CSV/SVG or a mesh as OBJ.
    Export(ExportArgs),
}

#[derive(Args)]
struct IndexArgs {
    /// Surface spec, e.g. rez3, bates, gh:lam=1, fm:m=4,a=0.2, expr:...
    #[arg(long)]
    surface: String,
    /// circle:R, or auto for the valid-radius search
    #[arg(long, default_value = "auto")]
    curve: String,
    /// D, delta, direct, hessian-cartesian, hessian-polar, hessian-direct,
    /// or all (the three umbilic routes)
    #[arg(long, default_value = "all")]
    route: String,
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    surface: String,
    /// x0,x1,y0,y1
    #[arg(long, default_value = "-1,1,-1,1", allow_hyphen_values = true)]
    rect: String,
    /// NXxNY sample points
    #[arg(long, default_value = "400x400")]
    grid: String,
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// indices, regularity, duality, ribaucour, or all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    surface: String,
    /// field-csv, field-svg, or mesh-obj
    #[arg(long)]
    what: String,
    #[arg(long)]
    out: String,
    /// x0,x1,y0,y1 for field exports
    #[arg(long, default_value = "-0.5,0.5,-0.5,0.5", allow_hyphen_values = true)]
    rect: String,
    /// NXxNY for field exports, NRxNT for meshes
    #[arg(long, default_value = "50x50")]
    grid: String,
    /// principal (line segments) or delta (arrows), for field-svg
    #[arg(long, default_value = "principal")]
    field: String,
    /// keep only samples with lo <= r <= hi, for field-svg
    #[arg(long)]
    band: Option<String>,
    /// inversion or congruence, for mesh-obj
    #[arg(long, default_value = "inversion")]
    mesh: String,
    /// outer chart radius for meshes
    #[arg(long, default_value_t = 0.5)]
    rho_max: f64,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_kv(body: &str) -> Result<Vec<(String, String)>, Error> {
    body.split(',')
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got '{pair}'")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn kv_get<'a>(kv: &'a [(String, String)], key: &str, what: &str) -> Result<&'a str, Error> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| parse_err(format!("{what} requires {key}=...")))
}

fn parse_f64(s: &str, what: &str) -> Result<f64, Error> {
    s.parse().map_err(|_| parse_err(format!("{what}: not a number: '{s}'")))
}

fn parse_u32(s: &str, what: &str) -> Result<u32, Error> {
    s.parse().map_err(|_| parse_err(format!("{what}: not an integer: '{s}'")))
}

fn parse_fspec(s: &str) -> Result<FSpec, Error> {
    if s == "tanh" {
        return Ok(FSpec::Tanh);
    }
    if s == "exp" {
        return FSpec::one_minus_exp(1.0);
    }
    if let Some(glue) = s.strip_prefix("exp:") {
        return FSpec::one_minus_exp(parse_f64(glue, "profile glue point")?);
    }
    Err(parse_err(format!("unknown profile '{s}' (expected tanh, exp, or exp:M)")))
}

fn parse_surface(s: &str) -> Result<SurfaceSpec, Error> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("dual(").and_then(|t| t.strip_suffix(')')) {
        return Ok(SurfaceSpec::dual_of(parse_surface(inner)?));
    }
    match s {
        "rez3" => return Ok(SurfaceSpec::ReZ3),
        "rez2zbar" => return Ok(SurfaceSpec::ReZ2Zbar),
        "bates" => return Ok(SurfaceSpec::Bates),
        "paraboloid" => return Ok(SurfaceSpec::Paraboloid),
        _ => {}
    }
    if let Some(body) = s.strip_prefix("expr:") {
        return Ok(SurfaceSpec::Expression(expr::parse(body)?));
    }
    if let Some(body) = s.strip_prefix("gh:") {
        let kv = parse_kv(body)?;
        return SurfaceSpec::ghomi_howard(parse_f64(kv_get(&kv, "lam", "gh")?, "gh lam")?);
    }
    if let Some(body) = s.strip_prefix("fm:") {
        let kv = parse_kv(body)?;
        let m = parse_u32(kv_get(&kv, "m", "fm")?, "fm m")?;
        let a = parse_f64(kv_get(&kv, "a", "fm")?, "fm a")?;
        return SurfaceSpec::fm(m, a);
    }
    if let Some(body) = s.strip_prefix("gm:") {
        let kv = parse_kv(body)?;
        let m = parse_u32(kv_get(&kv, "m", "gm")?, "gm m")?;
        let a = parse_f64(kv_get(&kv, "a", "gm")?, "gm a")?;
        let f = parse_fspec(kv_get(&kv, "f", "gm")?)?;
        return SurfaceSpec::gm(m, a, f);
    }
    if let Some(body) = s.strip_prefix("lambda:") {
        let kv = parse_kv(body)?;
        let m = parse_u32(kv_get(&kv, "m", "lambda")?, "lambda m")?;
        let a = parse_f64(kv_get(&kv, "a", "lambda")?, "lambda a")?;
        return SurfaceSpec::lambda_m(m, a);
    }
    Err(parse_err(format!("unknown surface '{s}'")))
}

/// Returns the curve and a human-readable description; auto runs the
/// valid-radius search and records the chosen radius.
fn parse_curve(s: &str, surface: &SurfaceSpec) -> Result<(CurveSpec, String), Error> {
    if s == "auto" {
        let r = auto_radius(surface)?;
        let curve = CurveSpec::origin_circle(r)?;
        return Ok((curve, format!("circle:{r:e} (auto)")));
    }
    if let Some(body) = s.strip_prefix("circle:") {
        let r = parse_f64(body, "circle radius")?;
        let curve = CurveSpec::origin_circle(r)?;
        let desc = curve.describe();
        return Ok((curve, desc));
    }
    Err(parse_err(format!("unknown curve '{s}' (expected circle:R or auto)")))
}

fn parse_rect(s: &str) -> Result<(f64, f64, f64, f64), Error> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| parse_f64(t.trim(), "rect"))
        .collect::<Result<_, _>>()?;
    if parts.len() != 4 || parts[0] >= parts[1] || parts[2] >= parts[3] {
        return Err(parse_err(format!("rect must be x0,x1,y0,y1 with x0<x1, y0<y1: '{s}'")));
    }
    Ok((parts[0], parts[1], parts[2], parts[3]))
}

fn parse_grid(s: &str) -> Result<(usize, usize), Error> {
    let (a, b) = s.split_once('x').ok_or_else(|| parse_err(format!("grid must be NXxNY: '{s}'")))?;
    let nx = a.parse().map_err(|_| parse_err(format!("grid: not an integer: '{a}'")))?;
    let ny = b.parse().map_err(|_| parse_err(format!("grid: not an integer: '{b}'")))?;
    if nx < 2 || ny < 2 {
        return Err(parse_err("grid must be at least 2x2"));
    }
    Ok((nx, ny))
}

fn write_json(path: &Option<String>, report: &RunReport) -> Result<(), Error> {
    if let Some(path) = path {
        std::fs::write(path, report.to_json())?;
    }
    Ok(())
}

fn print_warning(surface: &SurfaceSpec) {
    if let Some(w) = surface.a_warning() {
        eprintln!("warning: {w}");
    }
}

fn run_route(
    surface: &SurfaceSpec,
    curve: &CurveSpec,
    route: &str,
) -> Result<(String, umbilic::winding::HalfIndex, WindingReport), Error> {
    let (idx, rep) = match route {
        "D" => umbilic_index_via_d(surface, curve)?,
        "delta" => umbilic_index_via_delta(surface, curve)?,
        "direct" => umbilic_index_direct(surface, curve)?,
        "hessian-cartesian" => hessian_flow_index(surface, curve, HessianRoute::Cartesian)?,
        "hessian-polar" => hessian_flow_index(surface, curve, HessianRoute::Polar)?,
        "hessian-direct" => hessian_flow_index(surface, curve, HessianRoute::Direct)?,
        other => return Err(parse_err(format!("unknown route '{other}'"))),
    };
    Ok((route.to_string(), idx, rep))
}

fn cmd_index(args: &IndexArgs) -> Result<(), Error> {
    let surface = parse_surface(&args.surface)?;
    print_warning(&surface);
    let (curve, curve_desc) = parse_curve(&args.curve, &surface)?;
    let routes: Vec<&str> = match args.route.as_str() {
        "all" => vec!["D", "delta", "direct"],
        single => vec![single],
    };
    let mut report = RunReport::new("index", &surface.name(), &curve_desc);
    println!("surface {}", surface.name());
    println!("curve {curve_desc}");
    for route in routes {
        let (name, idx, rep) = run_route(&surface, &curve, route)?;
        println!("route {name}: I = {idx}");
        report.indices.push(IndexEntry::new(&name, idx, rep.residual));
        report.diagnostics.push(Diagnostic::from_winding(&name, &rep));
    }
    write_json(&args.json, &report)?;
    Ok(())
}

fn cmd_scan(args: &ScanArgs) -> Result<(), Error> {
    let surface = parse_surface(&args.surface)?;
    print_warning(&surface);
    let (x0, x1, y0, y1) = parse_rect(&args.rect)?;
    let (nx, ny) = parse_grid(&args.grid)?;
    let scan = scan_umbilics(&surface, x0, x1, y0, y1, nx, ny)?;
    let mut report = RunReport::new(
        "scan",
        &surface.name(),
        &format!("rect:{x0},{x1},{y0},{y1} grid:{nx}x{ny}"),
    );
    println!("surface {}", surface.name());
    println!(
        "umbilic candidates: {} ({} flagged cells)",
        scan.candidates.len(),
        scan.flagged_cells
    );
    for c in &scan.candidates {
        println!("  candidate near ({:.6e}, {:.6e})", c.x, c.y);
        report
            .diagnostics
            .push(Diagnostic::note("candidate", format!("({:.17e}, {:.17e})", c.x, c.y)));
    }
    println!("min d1 over grid: {:.6e}", scan.min_d1);
    println!("min |(d1,d2)| over grid: {:.6e}", scan.min_norm);
    report.diagnostics.push(Diagnostic::note("min_d1", format!("{:.17e}", scan.min_d1)));
    report.diagnostics.push(Diagnostic::note("min_norm", format!("{:.17e}", scan.min_norm)));
    if let SurfaceSpec::GhomiHoward { .. } = surface {
        // the known umbilic-free certificate: d2 does not vanish on the
        // line y = 0 or on the parabola x = -y^2
        let mut min_line = f64::INFINITY;
        let mut min_parab = f64::INFINITY;
        let y_max = (-x0).max(0.0).sqrt().min((-y0).max(y1));
        for k in 0..=200 {
            let x = x0 + (x1 - x0) * k as f64 / 200.0;
            min_line = min_line.min(d_vector(&surface, Point2::new(x, 0.0))?.vy.abs());
            let y = -y_max + 2.0 * y_max * k as f64 / 200.0;
            min_parab = min_parab.min(d_vector(&surface, Point2::new(-y * y, y))?.vy.abs());
        }
        println!("min |d2| on y=0: {min_line:.6e}");
        println!("min |d2| on x=-y^2: {min_parab:.6e}");
        report.diagnostics.push(Diagnostic::note("min_abs_d2_line", format!("{min_line:.17e}")));
        report
            .diagnostics
            .push(Diagnostic::note("min_abs_d2_parabola", format!("{min_parab:.17e}")));
    }
    write_json(&args.json, &report)?;
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, Error> {
    let suite = Suite::parse(&args.suite)
        .ok_or_else(|| parse_err(format!("unknown suite '{}'", args.suite)))?;
    let results = run_suite(suite);
    let mut all_pass = true;
    let mut report = RunReport::new("verify", &args.suite, "-");
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} {} [{}]", r.name, r.detail);
        all_pass &= r.passed;
        report
            .diagnostics
            .push(Diagnostic::note(if r.passed { "pass" } else { "fail" }, format!("{}: {}", r.name, r.detail)));
    }
    println!("{} checks, {}", results.len(), if all_pass { "all passed" } else { "FAILURES" });
    write_json(&args.json, &report)?;
    Ok(all_pass)
}

fn cmd_export(args: &ExportArgs) -> Result<(), Error> {
    let surface = parse_surface(&args.surface)?;
    print_warning(&surface);
    let (nx, ny) = parse_grid(&args.grid)?;
    let content = match args.what.as_str() {
        "field-csv" => {
            let (x0, x1, y0, y1) = parse_rect(&args.rect)?;
            field_csv(&surface, GridRect { x0, x1, y0, y1, nx, ny })?
        }
        "field-svg" => {
            let (x0, x1, y0, y1) = parse_rect(&args.rect)?;
            let rect = GridRect { x0, x1, y0, y1, nx, ny };
            let band = match &args.band {
                Some(b) => {
                    let (lo, hi) = b
                        .split_once(',')
                        .ok_or_else(|| parse_err(format!("band must be lo,hi: '{b}'")))?;
                    Some((parse_f64(lo, "band")?, parse_f64(hi, "band")?))
                }
                None => None,
            };
            match args.field.as_str() {
                "principal" => field_svg(
                    |p| {
                        principal_direction_field(&surface, p).map(|d| {
                            let (s, c) = d.angle().sin_cos();
                            (c, s)
                        })
                    },
                    rect,
                    FieldStyle::Lines,
                    band,
                )?,
                "delta" => field_svg(
                    |p| delta_vector(&surface, p).map(|v| (v.vx, v.vy)),
                    rect,
                    FieldStyle::Arrows,
                    band,
                )?,
                other => return Err(parse_err(format!("unknown field '{other}'"))),
            }
        }
        "mesh-obj" => match args.mesh.as_str() {
            "inversion" => inversion_obj(&surface, args.rho_max, nx, ny)?,
            "congruence" => congruence_obj(&surface, args.rho_max, nx, ny)?,
            other => return Err(parse_err(format!("unknown mesh '{other}'"))),
        },
        other => return Err(parse_err(format!("unknown export '{other}'"))),
    };
    std::fs::write(&args.out, content)?;
    println!("wrote {}", args.out);
    Ok(())
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Domain(_) => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Index(args) => cmd_index(args).map(|_| true),
        Command::Scan(args) => cmd_scan(args).map(|_| true),
        Command::Verify(args) => cmd_verify(args),
        Command::Export(args) => cmd_export(args).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
