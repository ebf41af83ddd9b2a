//! Command-line front end for the grasp detection pipeline.
//!
//! Subcommands: `synth` (generate a scene), `detect` (cloud → grasp plan),
//! `eval` (75-trial benchmark), `compare` (Fisher tests between reports).
//!
//! Exit codes: 0 success, 1 usage error, 2 no object extracted,
//! 3 infeasible grasp, 4 I/O or parse error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use graspgeom::cloudio::{self, CloudFormat, Frame, Point3, PointCloud};
use graspgeom::eval::{run_benchmark, significance_test, EvalReport, Method, OutcomeKind};
use graspgeom::grasp_gen::GraspPlan;
use graspgeom::pipeline::{detect_grasp, detect_grasp_baseline, PipelineError};
use graspgeom::synthscene::{
    generate_scene, standard_suite, Placement, PrimitiveShape, ScenePose, SensorModel,
};
use graspgeom::{PipelineConfig, Vec3};

const EXIT_USAGE: u8 = 1;
const EXIT_NO_OBJECT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "graspgeom",
    about = "Geometry-based grasp pose detection for single-view tabletop scenes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic single-view scene (cloud + ground-truth JSON).
    Synth(SynthArgs),
    /// Detect a grasp in a point cloud and write the plan JSON.
    Detect(DetectArgs),
    /// Run the 75-trial benchmark for one method and write a report.
    Eval(EvalArgs),
    /// Compare two benchmark reports with Fisher exact tests.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeKind {
    Box,
    Cylinder,
    Sphere,
    Tube,
    BoxPair,
}

#[derive(Clone, Copy, ValueEnum)]
enum PoseKind {
    Standing,
    LyingX,
    LyingY,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodKind {
    Ours,
    Baseline,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatKind {
    Pcd,
    Ply,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    shape: ShapeKind,
    /// Cylinder/sphere/tube outer radius (m).
    #[arg(long)]
    radius: Option<f64>,
    /// Tube inner radius (m).
    #[arg(long)]
    inner_radius: Option<f64>,
    /// Cylinder/tube height (m).
    #[arg(long)]
    height: Option<f64>,
    /// Box extents (m).
    #[arg(long)]
    wx: Option<f64>,
    #[arg(long)]
    wy: Option<f64>,
    #[arg(long)]
    wz: Option<f64>,
    /// Box-pair top extents (m); the base uses --wx/--wy/--wz.
    #[arg(long)]
    wx2: Option<f64>,
    #[arg(long)]
    wy2: Option<f64>,
    #[arg(long)]
    wz2: Option<f64>,
    /// Box-pair top lateral offset (m).
    #[arg(long, default_value_t = 0.0)]
    off_x: f64,
    #[arg(long, default_value_t = 0.0)]
    off_y: f64,
    #[arg(long, value_enum, default_value = "standing")]
    pose: PoseKind,
    /// Yaw about world z (radians).
    #[arg(long, default_value_t = 0.0)]
    yaw: f64,
    /// Lateral placement offset (m).
    #[arg(long, default_value_t = 0.0)]
    offset_x: f64,
    #[arg(long, default_value_t = 0.0)]
    offset_y: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output cloud path.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth JSON path.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "pcd")]
    format: FormatKind,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    /// Input cloud (camera frame; PCD or PLY by extension).
    #[arg(long)]
    input: PathBuf,
    /// Output grasp-plan JSON.
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the raw-centroid top-only comparison method.
    #[arg(long)]
    baseline: bool,
    /// Write the scene plus gripper-frame marker points as an ASCII PLY.
    #[arg(long)]
    dump_debug_ply: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    method: MethodKind,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output report JSON.
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    report_a: PathBuf,
    report_b: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap defaults to exit 2 for usage; the contract here is 1.
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn load_config(path: &Option<PathBuf>) -> Result<PipelineConfig, ExitCode> {
    match path {
        None => Ok(PipelineConfig::default()),
        Some(p) => PipelineConfig::load(p).map_err(|e| match e {
            graspgeom::config::ConfigError::Io(_) => fail(EXIT_IO, e),
            _ => fail(EXIT_USAGE, e),
        }),
    }
}

/// Writes atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))?;
    std::io::Write::write_all(&mut tmp, contents.as_bytes())?;
    tmp.persist(path)?;
    Ok(())
}

fn build_shape(args: &SynthArgs) -> Result<PrimitiveShape, String> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| format!("--{name} is required"));
    let shape = match args.shape {
        ShapeKind::Box => PrimitiveShape::Box {
            wx: need(args.wx, "wx")?,
            wy: need(args.wy, "wy")?,
            wz: need(args.wz, "wz")?,
        },
        ShapeKind::Cylinder => PrimitiveShape::Cylinder {
            radius: need(args.radius, "radius")?,
            height: need(args.height, "height")?,
        },
        ShapeKind::Sphere => PrimitiveShape::Sphere {
            radius: need(args.radius, "radius")?,
        },
        ShapeKind::Tube => PrimitiveShape::Tube {
            outer_radius: need(args.radius, "radius")?,
            inner_radius: need(args.inner_radius, "inner-radius")?,
            height: need(args.height, "height")?,
        },
        ShapeKind::BoxPair => PrimitiveShape::BoxPair {
            base: [need(args.wx, "wx")?, need(args.wy, "wy")?, need(args.wz, "wz")?],
            top: [need(args.wx2, "wx2")?, need(args.wy2, "wy2")?, need(args.wz2, "wz2")?],
            top_offset: [args.off_x, args.off_y],
        },
    };
    shape.validate()?;
    Ok(shape)
}

fn cmd_synth(args: SynthArgs) -> Result<(), ExitCode> {
    let cfg = load_config(&args.config)?;
    let shape = build_shape(&args).map_err(|e| fail(EXIT_USAGE, e))?;
    let pose = ScenePose {
        placement: match args.pose {
            PoseKind::Standing => Placement::Standing,
            PoseKind::LyingX => Placement::LyingX,
            PoseKind::LyingY => Placement::LyingY,
        },
        yaw: args.yaw,
        xy_offset: [args.offset_x, args.offset_y],
    };
    let sensor = SensorModel {
        seed: args.seed,
        ..cfg.sensor
    };
    let (world_cloud, truth) =
        generate_scene(&shape, &pose, &sensor).map_err(|e| fail(EXIT_USAGE, e))?;

    // Files hold what the sensor would deliver: camera-frame coordinates.
    let world_to_camera = cfg.camera.inverse();
    let camera_cloud =
        cloudio::apply_rigid_transform(&world_cloud, &world_to_camera, Frame::Camera)
            .map_err(|e| fail(EXIT_IO, e))?;

    let format = match args.format {
        FormatKind::Pcd => CloudFormat::PcdAscii,
        FormatKind::Ply => CloudFormat::PlyAscii,
    };
    save_cloud_atomic(&camera_cloud, &args.out, format).map_err(|e| fail(EXIT_IO, e))?;
    if let Some(truth_path) = &args.truth {
        let json = serde_json::to_string_pretty(&truth).expect("truth serializes");
        write_atomic(truth_path, &json).map_err(|e| fail(EXIT_IO, e))?;
    }
    println!("{} points", camera_cloud.len());
    Ok(())
}

fn save_cloud_atomic(
    cloud: &PointCloud,
    path: &Path,
    format: CloudFormat,
) -> Result<(), graspgeom::cloudio::CloudError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(graspgeom::cloudio::CloudError::Io)?;
    cloudio::save_cloud(cloud, tmp.path(), format)?;
    tmp.persist(path)
        .map_err(|e| graspgeom::cloudio::CloudError::Io(e.error))?;
    Ok(())
}

fn pipeline_exit(err: &PipelineError) -> u8 {
    match err {
        PipelineError::Cloud(_) => EXIT_IO,
        // Every segmentation failure means no graspable object was
        // extracted from the scene.
        PipelineError::Segmentation(_) => EXIT_NO_OBJECT,
        PipelineError::Object(_) => EXIT_NO_OBJECT,
        PipelineError::Grasp(_) => EXIT_INFEASIBLE,
    }
}

fn cmd_detect(args: DetectArgs) -> Result<(), ExitCode> {
    let cfg = load_config(&args.config)?;
    let cloud = cloudio::load_cloud(&args.input, None).map_err(|e| fail(EXIT_IO, e))?;
    let result = if args.baseline {
        detect_grasp_baseline(&cloud, &cfg)
    } else {
        detect_grasp(&cloud, &cfg)
    };
    let plan = result.map_err(|e| fail(pipeline_exit(&e), &e))?;
    let json = serde_json::to_string_pretty(&plan).expect("plan serializes");
    write_atomic(&args.plan, &json).map_err(|e| fail(EXIT_IO, e))?;
    if let Some(debug_path) = &args.dump_debug_ply {
        let debug = debug_cloud(&cloud, &cfg, &plan).map_err(|e| fail(EXIT_IO, e))?;
        save_cloud_atomic(&debug, debug_path, CloudFormat::PlyAscii)
            .map_err(|e| fail(EXIT_IO, e))?;
    }
    println!(
        "{} grasp at ({:.4}, {:.4}, {:.4})",
        match plan.mode {
            graspgeom::grasp_gen::GraspMode::Top => "top",
            graspgeom::grasp_gen::GraspMode::Side => "side",
        },
        plan.grasp_position.x,
        plan.grasp_position.y,
        plan.grasp_position.z
    );
    Ok(())
}

/// World-frame scene plus marker points: 20 points along each tool axis
/// from the grasp position, and a pregrasp-to-grasp approach trail.
fn debug_cloud(
    camera_cloud: &PointCloud,
    cfg: &PipelineConfig,
    plan: &GraspPlan,
) -> Result<PointCloud, graspgeom::cloudio::CloudError> {
    let mut world = cloudio::apply_rigid_transform(camera_cloud, &cfg.camera, Frame::World)?;
    let rot = plan.rotation_matrix();
    let g = plan.grasp_position.to_vec();
    let p = plan.pregrasp_position.to_vec();
    for axis in 0..3 {
        let dir: Vec3 = rot.column(axis).into_owned();
        for k in 1..=20 {
            let q = g + dir * (0.002 * k as f64);
            world.points.push(Point3::from_vec(q));
        }
    }
    for k in 0..=20 {
        let q = p + (g - p) * (k as f64 / 20.0);
        world.points.push(Point3::from_vec(q));
    }
    Ok(world)
}

fn cmd_eval(args: EvalArgs) -> Result<(), ExitCode> {
    let cfg = load_config(&args.config)?;
    let method = match args.method {
        MethodKind::Ours => Method::Ours,
        MethodKind::Baseline => Method::Baseline,
    };
    let suite = standard_suite(args.seed);
    let report = run_benchmark(&suite, method, args.seed, &cfg)
        .map_err(|e| fail(EXIT_USAGE, e))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&args.report, &json).map_err(|e| fail(EXIT_IO, e))?;
    println!(
        "{}: {} trials, failed {}%, unstable {}%, dropped {}%",
        report.method,
        report.trial_count,
        report.rates.failed_pct,
        report.rates.unstable_pct,
        report.rates.dropped_pct
    );
    Ok(())
}

fn load_report(path: &Path) -> Result<EvalReport, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(EXIT_IO, e))?;
    serde_json::from_str(&text).map_err(|e| fail(EXIT_IO, e))
}

fn cmd_compare(args: CompareArgs) -> Result<(), ExitCode> {
    let a = load_report(&args.report_a)?;
    let b = load_report(&args.report_b)?;
    let n_a = a.trial_count as u64;
    let n_b = b.trial_count as u64;
    let columns = [
        ("failed_attempt", OutcomeKind::FailedAttempt),
        ("unstable", OutcomeKind::Unstable),
        ("dropped", OutcomeKind::Dropped),
    ];
    for (name, kind) in columns {
        let fa = a.count(kind) as u64;
        let fb = b.count(kind) as u64;
        let p = significance_test(fa, n_a, fb, n_b).map_err(|e| fail(EXIT_USAGE, e))?;
        println!("{name}: {fa}/{n_a} vs {fb}/{n_b}  p = {p}");
    }
    let fail_a = (a.trial_count - a.count(OutcomeKind::Success)) as u64;
    let fail_b = (b.trial_count - b.count(OutcomeKind::Success)) as u64;
    let p = significance_test(fail_a, n_a, fail_b, n_b).map_err(|e| fail(EXIT_USAGE, e))?;
    println!("overall_failed: {fail_a}/{n_a} vs {fail_b}/{n_b}  p = {p}");
    Ok(())
}
