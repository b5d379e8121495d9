//! One function per CLI command. Each returns the process exit code; every
//! hard error (I/O, parsing, validation) maps to exit 1 in `main`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use reinhardt::flow::{self, Method};
use reinhardt::geometry;
use reinhardt::profile_ode::{self, StepControl};
use reinhardt::symmetry::{self, VerdictKind};
use reinhardt::{Error as CoreError, RadialProfile, SurfacePoint, Tolerances};

use crate::args::{parse_point, Args};
use crate::meta;
use crate::svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RESIDUAL: i32 = 2;
pub const EXIT_NOT_SPHERE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

pub struct Loaded {
    pub profile: RadialProfile,
    pub hash: String,
}

pub fn load_profile(args: &Args) -> Result<Loaded> {
    let path = args
        .profile
        .as_ref()
        .ok_or_else(|| anyhow!("--profile is required for `{}`", args.command))?;
    let bytes = fs::read(path).with_context(|| format!("reading profile `{path}`"))?;
    let text = String::from_utf8(bytes.clone()).context("profile file is not UTF-8")?;
    let profile = RadialProfile::from_json_str(&text).map_err(|e| anyhow!("{e}"))?;
    Ok(Loaded {
        profile,
        hash: meta::profile_hash(Some(&bytes)),
    })
}

fn out_path(args: &Args, default_ext: &str) -> PathBuf {
    match &args.out {
        Some(path) => PathBuf::from(path),
        None => PathBuf::from(format!("{}.{default_ext}", args.command)),
    }
}

fn format_or<'a>(args: &'a Args, default: &'a str, allowed: &[&str]) -> Result<&'a str> {
    let format = args.format.as_deref().unwrap_or(default);
    if !allowed.contains(&format) {
        bail!(
            "format `{format}` is not supported by `{}` (allowed: {})",
            args.command,
            allowed.join(", ")
        );
    }
    Ok(format)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn point_for(args: &Args, loaded: &Loaded, tols: &Tolerances) -> Result<SurfacePoint> {
    match &args.point {
        Some(spec) => {
            let guess = parse_point(spec, loaded.profile.dim())?;
            loaded
                .profile
                .project_to_surface(&guess, tols)
                .map_err(|e| anyhow!("{e}"))
        }
        None => {
            let samples = loaded
                .profile
                .sample_surface(1, args.seed, tols)
                .map_err(|e| anyhow!("{e}"))?;
            Ok(samples.into_iter().next().expect("one sample"))
        }
    }
}

pub fn cmd_curvature(args: &Args) -> Result<i32> {
    let loaded = load_profile(args)?;
    let tols = args.tolerances()?;
    format_or(args, "json", &["json"])?;
    if args.point.is_none() {
        bail!("`curvature` needs --point (radii+phases or z)");
    }
    let q = point_for(args, &loaded, &tols)?;
    let report = geometry::curvature_report(&loaded.profile, &q).map_err(|e| anyhow!("{e}"))?;
    let path = out_path(args, "json");
    let mut meta = meta::build(args, &tols, &loaded.hash);
    meta::resolve(
        &mut meta,
        &[
            ("format", json!("json")),
            ("out", json!(path.to_string_lossy())),
        ],
    );
    let breach = report.relation_residual > tols.report_tol
        || report.route_residuals.max() > tols.report_tol;
    let doc = json!({
        "meta": meta,
        "point": { "r": q.r, "norm": q.norm(), "residual": q.residual },
        "report": report,
        "residual_breach": breach,
    });
    write_file(&path, &serde_json::to_string_pretty(&doc)?)?;
    if breach {
        log::warn!(
            "cross-route residuals exceed report_tol = {:.3e}",
            tols.report_tol
        );
        return Ok(EXIT_RESIDUAL);
    }
    Ok(EXIT_OK)
}

pub fn cmd_scan(args: &Args) -> Result<i32> {
    let loaded = load_profile(args)?;
    let tols = args.tolerances()?;
    let format = format_or(args, "csv", &["csv", "svg"])?;
    let count = args.samples.unwrap_or(100);
    let samples = loaded
        .profile
        .sample_surface(count, args.seed, &tols)
        .map_err(|e| anyhow!("{e}"))?;
    let mut meta = meta::build(args, &tols, &loaded.hash);
    meta::resolve(
        &mut meta,
        &[
            ("samples", json!(count)),
            ("format", json!(format)),
            ("out", json!(out_path(args, "csv").to_string_lossy())),
        ],
    );
    let mut csv = meta::csv_comment_lines(&meta);
    csv.push_str(&geometry::scan_csv_header(loaded.profile.dim()));
    csv.push('\n');
    let mut h_values = Vec::with_capacity(count);
    let mut norms = Vec::with_capacity(count);
    for (index, q) in samples.iter().enumerate() {
        let report =
            geometry::curvature_report(&loaded.profile, q).map_err(|e| anyhow!("{e}"))?;
        csv.push_str(&geometry::scan_csv_row(index, q, &report));
        csv.push('\n');
        h_values.push(report.h_tt);
        norms.push(q.norm());
    }
    let path = out_path(args, "csv");
    let csv_path = if format == "svg" && path.extension().is_some_and(|e| e == "svg") {
        path.with_extension("csv")
    } else {
        path.clone()
    };
    write_file(&csv_path, &csv)?;
    if format == "svg" {
        let svg_path = path.with_extension("svg");
        let body = format!(
            "{}{}",
            meta::svg_comment(&meta),
            svg::scan_scatter(&h_values, &norms)
        );
        write_file(&svg_path, &body)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(args: &Args) -> Result<i32> {
    let loaded = load_profile(args)?;
    let tols = args.tolerances()?;
    format_or(args, "json", &["json"])?;
    let count = args.samples.unwrap_or(200);
    let verdict = symmetry::verify_symmetry(&loaded.profile, count, args.seed, &tols)
        .map_err(|e| anyhow!("{e}"))?;
    let path = out_path(args, "json");
    let mut meta = meta::build(args, &tols, &loaded.hash);
    meta::resolve(
        &mut meta,
        &[
            ("samples", json!(count)),
            ("format", json!("json")),
            ("out", json!(path.to_string_lossy())),
        ],
    );
    let doc = json!({
        "meta": meta,
        "verdict": verdict.to_json(),
    });
    write_file(&path, &serde_json::to_string_pretty(&doc)?)?;
    match &verdict.verdict {
        VerdictKind::Sphere { radius } => {
            log::info!("sphere of radius {radius}");
            Ok(EXIT_OK)
        }
        VerdictKind::NotSphere { witness } => {
            let (lo, hi) = witness.as_ref();
            eprintln!(
                "not a sphere: h_TT = {:.12} at r = {:?} vs h_TT = {:.12} at r = {:?}",
                lo.h_tt, lo.radii, hi.h_tt, hi.radii
            );
            Ok(EXIT_NOT_SPHERE)
        }
        VerdictKind::PreconditionFailed { reason } => {
            eprintln!("precondition failed: {reason}");
            Ok(EXIT_PRECONDITION)
        }
    }
}

pub fn cmd_flow(args: &Args) -> Result<i32> {
    let loaded = load_profile(args)?;
    let tols = args.tolerances()?;
    format_or(args, "csv", &["csv"])?;
    let q = point_for(args, &loaded, &tols)?;
    let trajectory = match args.method.as_str() {
        "rk4" => flow::flow_numeric(&loaded.profile, &q.z, args.t_end, args.dt, Method::Rk4),
        "implicit_midpoint" => flow::flow_numeric(
            &loaded.profile,
            &q.z,
            args.t_end,
            args.dt,
            Method::ImplicitMidpoint,
        ),
        "closed_form" => {
            flow::trajectory_closed_form(&loaded.profile, &q.z, args.t_end, args.dt)
        }
        other => bail!("unknown flow method `{other}`"),
    }
    .map_err(|e| anyhow!("{e}"))?;
    let mut meta = meta::build(args, &tols, &loaded.hash);
    meta::resolve(
        &mut meta,
        &[
            ("format", json!("csv")),
            ("out", json!(out_path(args, "csv").to_string_lossy())),
        ],
    );
    let mut csv = meta::csv_comment_lines(&meta);
    let mut body = Vec::new();
    flow::write_trajectory_csv(&loaded.profile, &trajectory, &mut body)?;
    csv.push_str(&String::from_utf8(body).expect("csv is utf-8"));
    write_file(&out_path(args, "csv"), &csv)?;
    // Conservation summary on stdout so pipelines can branch on drift.
    let summary = json!({
        "samples": trajectory.samples.len(),
        "drift": {
            "radii_max": trajectory.drift.max_radius_drift(),
            "f": trajectory.drift.energy,
            "h_TT": trajectory.drift.h_tt,
            "levi_max": trajectory.drift.max_levi_drift(),
        },
    });
    println!("{summary}");
    Ok(EXIT_OK)
}

pub fn cmd_critical(args: &Args) -> Result<i32> {
    let loaded = load_profile(args)?;
    let tols = args.tolerances()?;
    format_or(args, "json", &["json"])?;
    let starts = args.samples.unwrap_or(20);
    let path = out_path(args, "json");
    let mut meta = meta::build(args, &tols, &loaded.hash);
    meta::resolve(
        &mut meta,
        &[
            ("samples", json!(starts)),
            ("format", json!("json")),
            ("out", json!(path.to_string_lossy())),
        ],
    );
    match symmetry::find_critical_points(&loaded.profile, &tols, starts, args.seed) {
        Ok(results) => {
            let entries: Vec<serde_json::Value> = results
                .iter()
                .map(|cp| {
                    json!({
                        "radii": cp.p_hat.r,
                        "norm": cp.norm,
                        "h_TT_at": cp.h_tt_at,
                        "rigidity_residual": cp.rigidity_residual,
                        "parallelism_residual": cp.parallelism_residual,
                        "kind": cp.kind.as_str(),
                    })
                })
                .collect();
            let doc = json!({ "meta": meta, "critical_points": entries });
            write_file(&path, &serde_json::to_string_pretty(&doc)?)?;
            Ok(EXIT_OK)
        }
        Err(CoreError::Precondition(reason)) => {
            let doc = json!({ "meta": meta, "error": reason });
            write_file(&path, &serde_json::to_string_pretty(&doc)?)?;
            eprintln!("precondition failed: {reason}");
            Ok(EXIT_PRECONDITION)
        }
        Err(other) => Err(anyhow!("{other}")),
    }
}

pub fn cmd_ode(args: &Args) -> Result<i32> {
    let tols = args.tolerances()?;
    let k = args
        .k
        .ok_or_else(|| anyhow!("`ode` needs --k (the curvature constant)"))?;
    if k <= 0.0 {
        bail!("--k must be positive");
    }
    if let Some(radius) = args.sphere_residual {
        if radius <= 0.0 {
            bail!("--sphere-residual must be positive");
        }
        format_or(args, "json", &["json"])?;
        let path = out_path(args, "json");
        let mut meta = meta::build(args, &tols, &meta::profile_hash(None));
        meta::resolve(
            &mut meta,
            &[
                ("format", json!("json")),
                ("out", json!(path.to_string_lossy())),
            ],
        );
        let residual = profile_ode::sphere_residual(k, radius, 200);
        let doc = json!({
            "meta": meta,
            "sphere_residual": { "k": k, "radius": radius, "residual": residual },
        });
        write_file(&path, &serde_json::to_string_pretty(&doc)?)?;
        return Ok(EXIT_OK);
    }
    format_or(args, "csv", &["csv"])?;
    let sphere_r2 = 1.0 / (k * k);
    let f0 = args.f0.unwrap_or(sphere_r2 - args.s0);
    let s_max = args.s_max.unwrap_or(2.0 * sphere_r2);
    let run = profile_ode::integrate_profile(k, args.s0, f0, args.fp0, s_max, &StepControl::default())
        .map_err(|e| anyhow!("{e}"))?;
    let mut meta = meta::build(args, &tols, &meta::profile_hash(None));
    meta::resolve(
        &mut meta,
        &[
            ("f0", json!(f0)),
            ("s_max", json!(s_max)),
            ("format", json!("csv")),
            ("out", json!(out_path(args, "csv").to_string_lossy())),
        ],
    );
    let mut csv = meta::csv_comment_lines(&meta);
    let terminus_line = match &run.terminus {
        profile_ode::Terminus::ReachedSMax => "# terminus=reached_s_max".to_string(),
        profile_ode::Terminus::Crossed { s_star } => {
            format!("# terminus=crossed s_star={s_star:.16e}")
        }
        profile_ode::Terminus::DomainStop { reason } => {
            format!("# terminus=domain_stop reason={reason}")
        }
    };
    csv.push_str(&terminus_line);
    csv.push('\n');
    let mut body = Vec::new();
    profile_ode::write_ode_csv(&run, &mut body)?;
    csv.push_str(&String::from_utf8(body).expect("csv is utf-8"));
    write_file(&out_path(args, "csv"), &csv)?;
    Ok(EXIT_OK)
}

