//! One function per subcommand. Each reads what it needs from the config,
//! writes its artifacts into the output directory and returns a JSON
//! summary that is also saved as `<command>.json`.

use crate::config::Config;
use crate::error::CliError;
use crate::svg;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use tfl::cones::{classify_cone, cone_energy, rectangle_volume_fix, scaled_energy_p, ConeConfig};
use tfl::fermat::{construct_good_triangle, fermat_solve, junction_angles, FermatWeights};
use tfl::geom::Vec2;
use tfl::gridmin::{
    blowup_rescale, detect_triple_points, elimination_scan, grid_energy, io,
    junction_angle_extract, minimize, psi_estimate_with, scenarios, LabelGrid, MinimizeOptions,
    Mode, Schedule,
};
use tfl::polyconfig::{PolyConfig, TestField};
use tfl::tensions::{alphas_from_sigmas, neumann_angles, EnergyParams, SurfaceTensions};

pub struct Context<'a> {
    pub config: &'a Config,
    pub out: PathBuf,
    pub seed: u64,
}

impl Context<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        std::fs::write(self.out.join(name), contents)?;
        Ok(())
    }
}

pub enum Geometry {
    Grid(LabelGrid),
    Poly(PolyConfig),
    Cone(ConeConfig),
}

fn sigmas(c: &Config) -> Result<SurfaceTensions, CliError> {
    match c.list_or("sigmas", &[1.0, 1.0, 1.0])?.as_slice() {
        &[a, b, d] => Ok(SurfaceTensions::new(a, b, d)?),
        v => Err(CliError::Config(format!(
            "`sigmas` needs 3 values, got {}",
            v.len()
        ))),
    }
}

fn energy_params(c: &Config) -> Result<EnergyParams, CliError> {
    let s = sigmas(c)?;
    let beta = c.triple_opt("beta")?.unwrap_or([0.0; 3]);
    let rho = c.triple_opt("rho")?.unwrap_or([0.0; 3]);
    let g = c.f64_or("g", 0.0)?;
    Ok(EnergyParams::new(s, beta, rho, g)?)
}

fn vec2(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

/// `label:opening_deg` pairs, counter-clockwise from angle 0.
pub fn parse_cone(text: &str) -> Result<ConeConfig, CliError> {
    let mut labels = Vec::new();
    let mut openings = Vec::new();
    for item in text.split(',') {
        let (l, o) = item.trim().split_once(':').ok_or_else(|| {
            CliError::Config(format!(
                "cone entry `{}` is not `label:degrees`",
                item.trim()
            ))
        })?;
        labels.push(
            l.trim()
                .parse::<u8>()
                .map_err(|e| CliError::Config(format!("cone label `{l}`: {e}")))?,
        );
        openings.push(
            o.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("cone opening `{o}`: {e}")))?,
        );
    }
    Ok(ConeConfig::from_openings_deg(&labels, &openings)?)
}

fn scenario(c: &Config, name: &str, seed: u64) -> Result<LabelGrid, CliError> {
    let n = c.usize_or("n", 128)?;
    if n < 8 {
        return Err(CliError::Config(format!("`n` = {n} is too small")));
    }
    let grid = match name {
        "three_arcs" => scenarios::three_arcs(n, &sigmas(c)?, c.usize_or("ring", 3)?, seed)?,
        "vertical_split" => scenarios::vertical_split(n)?,
        "disk" => scenarios::disk(n, c.f64_or("radius", 0.3)?)?,
        "horizontal_split" => scenarios::horizontal_split(n, c.usize_or("ring", 3)?)?,
        "double_junction" => scenarios::double_junction(n, c.f64_or("half_width", 0.5)?, c.usize_or("ring", 3)?)?,
        "square_blob" => scenarios::square_blob(n, c.usize_or("side", (n / 8).max(1))?, 2)?,
        "cone" => {
            let cone = parse_cone(&c.str_or("cone_sectors", "0:120, 1:120, 2:120"))?;
            scenarios::paint_cone(n, &cone, c.f64_or("rotation_deg", 0.0)?.to_radians(), c.usize_or("ring", 3)?)?
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown scenario `{other}` (three_arcs, vertical_split, disk, horizontal_split, double_junction, square_blob, cone)"
            )))
        }
    };
    Ok(grid)
}

/// Reads the single geometry source named in the config.
pub fn geometry(c: &Config, seed: u64) -> Result<Geometry, CliError> {
    let present: Vec<&str> = ["grid", "polyline", "cone", "scenario"]
        .into_iter()
        .filter(|k| c.has(k))
        .collect();
    if present.len() != 1 {
        return Err(CliError::Config(format!(
            "exactly one of grid, polyline, cone, scenario is required, found {}",
            if present.is_empty() {
                "none".to_string()
            } else {
                present.join(", ")
            }
        )));
    }
    Ok(match present[0] {
        "grid" => Geometry::Grid(io::load(&c.existing_path("grid")?.expect("key present"))?),
        "polyline" => {
            let path = c.existing_path("polyline")?.expect("key present");
            Geometry::Poly(PolyConfig::from_json(&std::fs::read_to_string(path)?)?)
        }
        "cone" => Geometry::Cone(parse_cone(&c.str_opt("cone").expect("key present"))?),
        _ => Geometry::Grid(scenario(
            c,
            &c.str_opt("scenario").expect("key present"),
            seed,
        )?),
    })
}

fn grid_geometry(c: &Config, seed: u64) -> Result<LabelGrid, CliError> {
    match geometry(c, seed)? {
        Geometry::Grid(g) => Ok(g),
        _ => Err(CliError::Config(
            "this command needs a grid or scenario".into(),
        )),
    }
}

fn poly_geometry(c: &Config, seed: u64) -> Result<PolyConfig, CliError> {
    match geometry(c, seed)? {
        Geometry::Poly(p) => Ok(p),
        Geometry::Cone(cone) => Ok(cone.to_polyconfig(c.f64_or("radius", 1.0)?)),
        Geometry::Grid(_) => Err(CliError::Config(
            "this command needs a polyline or cone".into(),
        )),
    }
}

fn cone_geometry(c: &Config, seed: u64) -> Result<ConeConfig, CliError> {
    match geometry(c, seed)? {
        Geometry::Cone(cone) => Ok(cone),
        _ => Err(CliError::Config("this command needs a cone".into())),
    }
}

pub fn tensions(ctx: &Context) -> Result<Value, CliError> {
    let s = sigmas(ctx.config)?;
    let a = alphas_from_sigmas(&s)?;
    let g = neumann_angles(&s)?;
    let by_fluid = [0u8, 1, 2].map(|k| g.for_fluid(k).to_degrees());
    Ok(json!({
        "sigmas": [s.sigma01(), s.sigma02(), s.sigma12()],
        "alphas": a.as_array(),
        "gammas_deg": g.degrees(),
        "openings_by_fluid_deg": by_fluid,
    }))
}

pub fn fermat(ctx: &Context) -> Result<Value, CliError> {
    let c = ctx.config;
    let s = sigmas(c)?;
    let g = neumann_angles(&s)?;
    let opening = c
        .f64_or("opening_deg", 0.5 * g.gamma12.to_degrees())?
        .to_radians();
    let orientation = c.f64_or("orientation_deg", 0.0)?.to_radians();
    let tol = c.f64_or("tol", 1e-12)?;
    let t = construct_good_triangle(&s, opening, orientation)?;
    let sol = fermat_solve(&t.vertices, &FermatWeights::from_tensions(&s), tol)?;
    let (a01, a12, a20) = junction_angles(sol.point, &t.vertices)?;
    Ok(json!({
        "vertices": t.vertices,
        "constructed_point": t.tilde_p,
        "solution": sol,
        "distance_to_constructed": sol.point.dist(t.tilde_p),
        "vertex_angles_deg": [a01.to_degrees(), a12.to_degrees(), a20.to_degrees()],
        "gammas_deg": g.degrees(),
    }))
}

pub fn cones(ctx: &Context) -> Result<Value, CliError> {
    let c = ctx.config;
    let s = sigmas(c)?;
    let cone = cone_geometry(c, ctx.seed)?;
    let radius = c.f64_or("radius", 1.0)?;
    let report = classify_cone(&cone, &s)?;
    ctx.write(
        "cone.svg",
        &svg::polyconfig_svg(&cone.to_polyconfig(radius), &[Vec2::ZERO]),
    )?;
    if let Some(comp) = &report.competitor {
        ctx.write("competitor.svg", &svg::polyconfig_svg(comp, &[]))?;
    }
    let mut out = json!({
        "sectors": cone.sectors(),
        "energy": cone_energy(&cone, &s, radius),
        "classification": report,
    });
    if let Some(dv) = c.triple_opt("volume_fix")? {
        let fix = rectangle_volume_fix(&cone, dv, radius, &s)?;
        out["volume_fix"] = json!({ "rectangles": fix.rectangles, "cost_bound": fix.cost_bound });
    }
    Ok(out)
}

fn minimize_options(c: &Config, seed: u64) -> Result<MinimizeOptions, CliError> {
    let mode = match c.str_or("mode", "D").as_str() {
        "D" => Mode::D,
        "V" => Mode::V,
        "DV" => Mode::DV,
        other => {
            return Err(CliError::Config(format!(
                "mode `{other}` is not D, V or DV"
            )))
        }
    };
    let d = Schedule::default();
    let initial_temperature = c.f64_opt("initial_temperature")?;
    let schedule = Schedule {
        initial_temperature,
        cooling: c.f64_or("cooling", d.cooling)?,
        sweeps: c.usize_or("sweeps", d.sweeps)?,
        quiet_sweeps: c.usize_or("quiet_sweeps", d.quiet_sweeps)?,
        max_greedy_sweeps: c.usize_or("max_greedy_sweeps", d.max_greedy_sweeps)?,
    };
    Ok(MinimizeOptions {
        mode,
        target_volumes: c.triple_opt("targets")?,
        volume_penalty_c: c.f64_opt("penalty_c")?,
        schedule,
        crofton_directions: c.usize_or("directions", 8)?,
        seed,
        random_init: c.bool_or("random_init", false)?,
        multilevel: c.bool_or("multilevel", false)?,
        log_moves: 0,
        replicas: c.usize_or("replicas", 1)?,
        resample_every: c.usize_or("resample_every", 0)?,
    })
}

fn junction_summary(g: &LabelGrid, s: &SurfaceTensions, window: f64) -> Value {
    let points = detect_triple_points(g);
    let report = match points.as_slice() {
        [p] => junction_angle_extract(g, s, *p, window).ok(),
        _ => None,
    };
    json!({ "triple_points": points, "junction": report })
}

pub fn energy(ctx: &Context) -> Result<Value, CliError> {
    let c = ctx.config;
    let p = energy_params(c)?;
    Ok(match geometry(c, ctx.seed)? {
        Geometry::Grid(g) => {
            let opts = minimize_options(c, ctx.seed)?;
            let perimeters = [(0u8, 1u8), (0, 2), (1, 2)]
                .map(|pair| tfl::gridmin::crofton_perimeter_with(&g, pair, opts.crofton_directions))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            json!({
                "kind": "grid",
                "energy": grid_energy(&g, &p, &opts)?,
                "volumes": g.volumes(),
                "perimeters": perimeters,
            })
        }
        Geometry::Poly(poly) => json!({
            "kind": "polyline",
            "energy": poly.energy_fswp(&p),
            "moments": poly.region_moments(),
        }),
        Geometry::Cone(cone) => {
            let radius = c.f64_or("radius", 1.0)?;
            json!({
                "kind": "cone",
                "energy": cone_energy(&cone, &p.sigmas, radius),
                "scaled_energy": scaled_energy_p(&cone, &p.sigmas, radius, c.f64_or("c", 0.0)?),
            })
        }
    })
}

pub fn minimize_cmd(ctx: &Context) -> Result<Value, CliError> {
    let c = ctx.config;
    let p = energy_params(c)?;
    let grid = grid_geometry(c, ctx.seed)?;
    let opts = minimize_options(c, ctx.seed)?;
    let window = c.f64_or("window", 0.5 * grid.extent())?;
    let result = minimize(&grid, &p, &opts)?;
    io::save(&result.grid, &ctx.out.join("minimized.tfl"))?;
    let mut csv = String::from("sweep,energy,phase\n");
    for (k, e) in result.trace.iter().enumerate() {
        let phase = if k < result.greedy_start {
            "anneal"
        } else {
            "greedy"
        };
        csv.push_str(&format!("{k},{e},{phase}\n"));
    }
    ctx.write("trace.csv", &csv)?;
    ctx.write("trace.svg", &svg::trace_svg(&result.trace))?;
    let j = junction_summary(&result.grid, &p.sigmas, window);
    let points: Vec<Vec2> = serde_json::from_value(j["triple_points"].clone())?;
    ctx.write("minimized.svg", &svg::grid_svg(&result.grid, &points))?;
    Ok(json!({
        "initial": result.initial,
        "final": result.energy,
        "kept_input": result.kept_input,
        "sweeps": result.trace.len(),
        "greedy_start": result.greedy_start,
        "volumes": result.grid.volumes(),
        "triple_points": j["triple_points"],
        "junction": j["junction"],
    }))
}

pub fn blowup(ctx: &Context) -> Result<Value, CliError> {
    let c = ctx.config;
    let p = energy_params(c)?;
    let grid = grid_geometry(c, ctx.seed)?;
    let center = match c.pair_opt("center")? {
        Some(q) => vec2(q),
        None => match detect_triple_points(&grid).as_slice() {
            [q] => *q,
            _ => Vec2::ZERO,
        },
    };
    let lambdas = c.list_or("lambdas", &[1.0, 0.5, 0.25])?;
    let window = c.f64_or("window", 0.5 * grid.extent())?;
    let opts = MinimizeOptions::default();
    let mut rows = Vec::new();
    for (k, &lambda) in lambdas.iter().enumerate() {
        let g = blowup_rescale(&grid, center, lambda)?;
        let scaled = p.blown_up(lambda);
        io::save(&g, &ctx.out.join(format!("blowup_{k}.tfl")))?;
        let j = junction_summary(&g, &p.sigmas, window);
        rows.push(json!({
            "lambda": lambda,
            "energy": grid_energy(&g, &scaled, &opts)?,
            "volumes": g.volumes(),
            "triple_points": j["triple_points"],
            "junction": j["junction"],
        }));
    }
    Ok(json!({ "center": center, "rescalings": rows }))
}

fn radii(c: &Config, big_r: f64) -> Result<Vec<f64>, CliError> {
    if let Some(r) = c.list_opt("radii")? {
        return Ok(r);
    }
    let lo = c.f64_or("r_min", 0.05 * big_r)?;
    let hi = c.f64_or("r_max", big_r)?;
    let n = c.usize_or("r_count", 20)?.max(2);
    Ok((0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect())
}

pub fn monotonicity(ctx: &Context) -> Result<Value, CliError> {
    let c = ctx.config;
    let s = sigmas(c)?;
    let poly = poly_geometry(c, ctx.seed)?;
    let rs = radii(c, poly.domain_radius)?;
    let constant = c.f64_or("c", 0.0)?;
    let trace = poly.monotonicity_trace(&s, &rs, constant)?;
    ctx.write("monotonicity.csv", &trace.to_csv())?;
    let stationary = poly.check_stationary(&s);
    let mut weak_failures = Vec::new();
    let mut pairs = 0;
    if stationary.is_ok() {
        for (i, &rho) in rs.iter().enumerate() {
            for &r in &rs[i + 1..] {
                pairs += 1;
                let w = poly.weak_monotonicity_terms(&s, rho, r, constant)?;
                if !w.holds(1e-12) {
                    weak_failures.push(json!({ "rho": rho, "r": r, "terms": w }));
                }
            }
        }
    }
    ctx.write("polyline.svg", &svg::polyconfig_svg(&poly, &[]))?;
    Ok(json!({
        "radii": rs.len(),
        "stationary": stationary.is_ok(),
        "stationarity": stationary.err().map(|e| e.to_string()),
        "weak_pairs_checked": pairs,
        "weak_failures": weak_failures,
    }))
}

pub fn variation(ctx: &Context) -> Result<Value, CliError> {
    let c = ctx.config;
    let s = sigmas(c)?;
    let poly = poly_geometry(c, ctx.seed)?;
    let center = vec2(c.pair_opt("field_center")?.unwrap_or([0.0, 0.0]));
    let radius = c.f64_or("field_radius", 0.5 * poly.domain_radius)?;
    let field = match c.str_or("field", "radial").as_str() {
        "radial" => TestField::radial(center, radius),
        "translation" => {
            let d = c.pair_opt("direction")?.unwrap_or([1.0, 0.0]);
            TestField::translation(center, radius, vec2(d))
        }
        other => {
            return Err(CliError::Config(format!(
                "field `{other}` is not radial or translation"
            )))
        }
    };
    let residual = poly.first_variation_residual(&s, &field)?;
    Ok(json!({
        "field": field,
        "residual": residual,
        "relative": residual / (s.max() * radius),
    }))
}

pub fn scan(ctx: &Context) -> Result<Value, CliError> {
    let c = ctx.config;
    let grid = grid_geometry(c, ctx.seed)?;
    let extent = grid.extent();
    let eta = c.f64_or("eta", 0.05)?;
    let rs = c.list_or("scan_radii", &[0.1 * extent, 0.2 * extent])?;
    let violations = elimination_scan(&grid, eta, &rs);
    let mut out = json!({ "eta": eta, "radii": rs, "violations": violations });
    if let Some(center) = c.pair_opt("psi_center")? {
        let p = energy_params(c)?;
        let radius = c.f64_or("psi_radius", 0.1 * extent)?;
        let opts = minimize_options(c, ctx.seed)?;
        let restarts = c.usize_or("psi_restarts", tfl::gridmin::PSI_RESTARTS)?;
        out["psi"] = serde_json::to_value(psi_estimate_with(
            &grid,
            &p,
            vec2(center),
            radius,
            &opts,
            restarts,
        )?)?;
    }
    Ok(out)
}

pub fn run(command: &str, ctx: &Context) -> Result<Value, CliError> {
    match command {
        "tensions" => tensions(ctx),
        "fermat" => fermat(ctx),
        "cones" => cones(ctx),
        "energy" => energy(ctx),
        "minimize" => minimize_cmd(ctx),
        "blowup" => blowup(ctx),
        "monotonicity" => monotonicity(ctx),
        "variation" => variation(ctx),
        "scan" => scan(ctx),
        other => Err(CliError::Config(format!("unknown command `{other}`"))),
    }
}

pub fn out_dir(base: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(base)?;
    Ok(base.to_path_buf())
}
