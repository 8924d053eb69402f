use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use clap::Parser;
use serde::Serialize;
use serde_json::json;

use lafair::curvature::curvature_table;
use lafair::curve::lcg_slope;
use lafair::functionals::energy_report;
use lafair::mesh::{gen_mesh, load_mesh, save_mesh};
use lafair::{
    BoundaryPolicy, CurveError, EnergyReport, FilterConfig, LaCurveParams, MeshKind, QuadConfig,
    RunReport, TriangleMesh,
};

use crate::export::{write_colored_ply, write_curvature_csv};
use crate::manifest::{manifest_path, read_manifest, write_json, RunManifest, SCHEMA_VERSION};
use crate::{
    Boundary, Cli, Command, CurvatureArgs, CurveArgs, FilterArgs, GenArgs, Kind, MetricsArgs,
    NoiseArgs,
};

/// What a command produced, for its manifest.
struct Produced {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    config: serde_json::Value,
    seed: Option<u64>,
}

pub fn run(command: Command, args: &[String]) -> Result<()> {
    let start = Instant::now();
    let (name, produced) = match command {
        Command::Gen(a) => ("gen", gen(a)?),
        Command::Noise(a) => ("noise", noise(a)?),
        Command::Filter(a) => ("filter", filter(a)?),
        Command::Curvature(a) => ("curvature", curvature(a)?),
        Command::Metrics(a) => ("metrics", metrics(a)?),
        Command::Curve(a) => ("curve", curve(a)?),
        Command::Replay(a) => return replay(&a.manifest),
    };
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool: "lafair".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: name.into(),
        args: args.to_vec(),
        cwd: std::env::current_dir()?,
        inputs: produced.inputs,
        outputs: produced.outputs.clone(),
        config: produced.config,
        seed: produced.seed,
        threads: rayon::current_num_threads(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let primary = produced
        .outputs
        .first()
        .context("command produced no output")?;
    write_json(&manifest, &manifest_path(primary))
}

fn replay(path: &Path) -> Result<()> {
    let manifest = read_manifest(path)?;
    ensure!(manifest.command != "replay", "refusing to replay a replay");
    std::env::set_current_dir(&manifest.cwd)
        .with_context(|| format!("entering {}", manifest.cwd.display()))?;
    let argv = std::iter::once("lafair".to_string()).chain(manifest.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).context("manifest arguments no longer parse")?;
    run(cli.command, &manifest.args)
}

fn load(path: &Path) -> Result<TriangleMesh> {
    load_mesh(path).with_context(|| format!("loading {}", path.display()))
}

/// Writes `mesh` and reads it back to make sure the file is usable.
fn save_checked(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    save_mesh(mesh, path).with_context(|| format!("writing {}", path.display()))?;
    let back = load(path)?;
    ensure!(
        back.vertex_count() == mesh.vertex_count() && back.face_count() == mesh.face_count(),
        "{} did not round-trip",
        path.display()
    );
    Ok(())
}

fn gen(a: GenArgs) -> Result<Produced> {
    ensure!(a.size > 0.0 && a.size.is_finite(), "--size must be positive");
    ensure!(a.height > 0.0 && a.height.is_finite(), "--height must be positive");
    let (kind, resolution) = match a.kind {
        Kind::Sphere => (MeshKind::Sphere { radius: a.size }, a.subdiv),
        Kind::Plane => (MeshKind::Plane { size: a.size }, a.n),
        Kind::Saddle => (MeshKind::Saddle { extent: a.size }, a.n),
        Kind::Cylinder => (
            MeshKind::Cylinder {
                radius: a.size,
                height: a.height,
            },
            a.n,
        ),
    };
    ensure!(resolution >= 1 || a.kind == Kind::Sphere, "--n must be at least 1");
    ensure!(resolution <= 10 || a.kind != Kind::Sphere, "--subdiv above 10 is too large");
    let mesh = gen_mesh(kind, resolution);
    save_checked(&mesh, &a.output)?;
    println!(
        "wrote {} ({} vertices, {} faces)",
        a.output.display(),
        mesh.vertex_count(),
        mesh.face_count()
    );
    Ok(Produced {
        inputs: vec![],
        outputs: vec![a.output],
        config: json!({ "mesh": kind, "resolution": resolution }),
        seed: None,
    })
}

fn noise(a: NoiseArgs) -> Result<Produced> {
    ensure!(
        a.amplitude >= 0.0 && a.amplitude.is_finite(),
        "--amplitude must be a non-negative number"
    );
    let mesh = load(&a.input)?;
    let noisy = lafair::mesh::add_noise(&mesh, a.amplitude, a.seed);
    save_checked(&noisy, &a.output)?;
    println!(
        "wrote {} (RMS displacement {:e})",
        a.output.display(),
        noisy.rms_distance(&mesh)?
    );
    Ok(Produced {
        inputs: vec![a.input],
        outputs: vec![a.output],
        config: json!({ "amplitude": a.amplitude }),
        seed: Some(a.seed),
    })
}

#[derive(Serialize)]
struct FilterReportFile<'a> {
    schema_version: u32,
    input: &'a Path,
    output: &'a Path,
    config: &'a FilterConfig,
    #[serde(flatten)]
    report: &'a RunReport,
}

fn filter(a: FilterArgs) -> Result<Produced> {
    let cfg = FilterConfig {
        iterations: a.iters,
        ring_depth: a.ring_depth,
        bisect_tol: a.bisect_tol,
        phi_range_init: a.phi_range,
        range_expansions: a.range_expansions,
        boundary_policy: match a.boundary {
            Boundary::Freeze => BoundaryPolicy::Freeze,
            Boundary::Laplace => BoundaryPolicy::Laplace,
        },
    };
    cfg.validate()?;
    let mesh = load(&a.input)?;
    let (fair, report) = lafair::filter(&mesh, &cfg)?;
    save_checked(&fair, &a.output)?;
    let report_path = a
        .report
        .clone()
        .unwrap_or_else(|| a.output.with_extension("report.json"));
    write_json(
        &FilterReportFile {
            schema_version: SCHEMA_VERSION,
            input: &a.input,
            output: &a.output,
            config: &cfg,
            report: &report,
        },
        &report_path,
    )?;
    println!(
        "{} iterations in {:.1} ms; mean k-plane residual {:e} -> {:e}",
        report.iterations.len(),
        report.total_elapsed_ms,
        report.initial_mean_k_residual,
        report.final_mean_k_residual
    );
    Ok(Produced {
        inputs: vec![a.input],
        outputs: vec![a.output, report_path],
        config: serde_json::to_value(&cfg)?,
        seed: None,
    })
}

fn curvature(a: CurvatureArgs) -> Result<Produced> {
    let mesh = load(&a.input)?;
    let table = curvature_table(&mesh)?;
    write_curvature_csv(&mesh, &table, &a.output)?;
    let mut outputs = vec![a.output];
    if let Some(ply) = a.ply {
        let k: Vec<f64> = table.iter().map(|c| c.gaussian).collect();
        write_colored_ply(&mesh, &k, &ply)?;
        outputs.push(ply);
    }
    let interior: Vec<f64> = table
        .iter()
        .filter(|c| !c.is_boundary)
        .map(|c| c.gaussian)
        .collect();
    if !interior.is_empty() {
        println!(
            "{} vertices; mean interior K {:e}",
            table.len(),
            interior.iter().sum::<f64>() / interior.len() as f64
        );
    }
    Ok(Produced {
        inputs: vec![a.input],
        outputs,
        config: json!({}),
        seed: None,
    })
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    schema_version: u32,
    input: &'a Path,
    reference: Option<&'a Path>,
    vertex_count: usize,
    face_count: usize,
    area: f64,
    #[serde(flatten)]
    energy: EnergyReport,
    rms_to_reference: Option<f64>,
}

fn metrics(a: MetricsArgs) -> Result<Produced> {
    ensure!(a.ring_depth >= 1, "--ring-depth must be at least 1");
    let mesh = load(&a.input)?;
    let rms = match &a.reference {
        Some(r) => Some(
            mesh.rms_distance(&load(r)?)
                .with_context(|| format!("comparing with {}", r.display()))?,
        ),
        None => None,
    };
    let file = MetricsFile {
        schema_version: SCHEMA_VERSION,
        input: &a.input,
        reference: a.reference.as_deref(),
        vertex_count: mesh.vertex_count(),
        face_count: mesh.face_count(),
        area: mesh.total_area(),
        energy: energy_report(&mesh, a.ring_depth)?,
        rms_to_reference: rms,
    };
    write_json(&file, &a.output)?;
    println!("{}", serde_json::to_string_pretty(&file)?);
    let mut inputs = vec![a.input.clone()];
    inputs.extend(a.reference.clone());
    Ok(Produced {
        inputs,
        outputs: vec![a.output],
        config: json!({ "ring_depth": a.ring_depth }),
        seed: None,
    })
}

fn curve(a: CurveArgs) -> Result<Produced> {
    ensure!(a.s_max > 0.0 && a.s_max.is_finite(), "--s-max must be positive");
    ensure!(a.quad_tol > 0.0, "--quad-tol must be positive");
    let params = LaCurveParams::new(a.alpha, a.c0, a.c1, a.c2);
    let quad = QuadConfig {
        abs_tol: a.quad_tol,
        ..QuadConfig::default()
    };
    let n = usize::try_from(a.n)?;
    let line = params.sample(a.s_max, n, &quad)?;

    let file = std::fs::File::create(&a.output)
        .with_context(|| format!("creating {}", a.output.display()))?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "s,x,y,theta,kappa")?;
    for (i, p) in line.points().iter().enumerate() {
        let s = a.s_max * i as f64 / (n - 1) as f64;
        writeln!(
            out,
            "{s},{},{},{},{}",
            p.x,
            p.y,
            params.tangent_angle(s)?,
            params.curvature(s)?
        )?;
    }
    out.flush()?;

    match lcg_slope(&line) {
        Ok(slope) => println!("lcg_slope: {slope:.6}"),
        Err(CurveError::ConstantCurvature) => println!("lcg_slope: undefined (constant curvature)"),
        Err(e) => println!("lcg_slope: undefined ({e})"),
    }
    Ok(Produced {
        inputs: vec![],
        outputs: vec![a.output],
        config: json!({ "params": params, "s_max": a.s_max, "n": n, "quad": quad }),
        seed: None,
    })
}
