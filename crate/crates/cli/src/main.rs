//! `monge-kit`: curve analysis, spine synthesis, surface construction and
//! mesh export for generalized Monge surfaces.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use monge_core::curve::binormal_trace_length;
use monge_core::frames::is_monge_cylinder_spine;
use monge_core::io::{to_json, BinormalSpec, CurveFile, FamilyFile, ProblemSpec, ProfileSpec, ResultFile};
use monge_core::monge::{
    check_pgf, classify_closure, fundamental_forms, make_mesh, mesh_check, read_obj, regularity_margin,
    singularity_type, ClosureReport, FormResiduals, MeshCheck, MeshHeader, MeshOptions, MongeSurface, PgfReport,
    SingularPointInfo,
};
use monge_core::numeric::wrap_angle;
use monge_core::spine_synth::synthesize;
use monge_core::Error;

#[derive(Parser)]
#[command(name = "monge-kit", version, about = "Generalized Monge surfaces from the command line")]
struct Cli {
    /// Seed for randomized curve generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Total torsion, holonomy and Monge-cylinder verdict of a closed curve.
    Analyze {
        curve: PathBuf,
        /// Angle tolerance for the cylinder verdict and the rational approximation.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Solves a spine synthesis problem.
    Synthesize {
        problem: PathBuf,
        /// Total torsion to realize; rescales the binormal trace length.
        #[arg(long)]
        torsion_target: Option<f64>,
        /// Result file; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweeps a profile along a spine or plane family.
    Surface {
        /// Spine curve, synthesis result or family file.
        family: PathBuf,
        profile: PathBuf,
        #[arg(long, default_value_t = 64)]
        nu: usize,
        #[arg(long, default_value_t = 256)]
        nv: usize,
        #[arg(long)]
        out_mesh: Option<PathBuf>,
        /// Report file; printed to stdout when absent.
        #[arg(long)]
        out_report: Option<PathBuf>,
        /// Emit the mesh with annotated singular vertices instead of failing.
        #[arg(long)]
        allow_singular: bool,
        /// Angle tolerance of the closure classification.
        #[arg(long, default_value_t = 1e-6)]
        closure_tol: f64,
        /// Seam mismatch tolerance, relative to the mesh size.
        #[arg(long, default_value_t = 1e-9)]
        seam_tol: f64,
        /// Margin below which a vertex counts as singular.
        #[arg(long, default_value_t = 1e-9)]
        singular_tol: f64,
        /// Tolerance of the planar-geodesic verdict.
        #[arg(long, default_value_t = 1e-5)]
        pgf_tol: f64,
    },
    /// Watertightness and orientability of an OBJ quad mesh.
    MeshCheck { mesh: PathBuf },
}

enum Failure {
    Parse(String),
    Geometry(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Geometry(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

fn parsed<T>(path: &Path, r: monge_core::Result<T>) -> Outcome<T> {
    r.map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome<()> {
    std::fs::write(path, text)
        .map_err(|e| Failure::Geometry(Error::InvalidInput(format!("cannot write {}: {e}", path.display()))))
}

#[derive(Serialize)]
struct Rational {
    k: i64,
    n: i64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    samples: usize,
    length: f64,
    total_torsion: f64,
    binormal_length: f64,
    holonomy: f64,
    /// `holonomy + total_torsion` wrapped to `(-pi, pi]`.
    identity_residual: f64,
    /// `T / 2pi ~ k / n`.
    rational: Option<Rational>,
    monge_cylinder: bool,
}

fn analyze(path: &Path, tol: f64, seed: u64) -> Outcome<String> {
    let file = parsed(path, CurveFile::read(&read(path)?))?;
    let curve = file.build(seed)?;
    let cyl = is_monge_cylinder_spine(&curve, tol)?;
    let report = AnalyzeReport {
        samples: curve.len(),
        length: curve.length(),
        total_torsion: cyl.total_torsion,
        binormal_length: binormal_trace_length(&curve)?,
        holonomy: cyl.holonomy,
        identity_residual: wrap_angle(cyl.holonomy + cyl.total_torsion),
        rational: cyl.rational.map(|(k, n)| Rational { k, n }),
        monge_cylinder: cyl.is_cylinder,
    };
    Ok(to_json(&report))
}

fn synthesize_cmd(path: &Path, target: Option<f64>, out: Option<&Path>, seed: u64) -> Outcome<String> {
    let spec: ProblemSpec = parsed(path, serde_json::from_str(&read(path)?).map_err(monge_core::io::parse_error))?;
    let base = path.parent().unwrap_or(Path::new("."));
    if let BinormalSpec::File { path: rel } = &spec.binormal {
        let p = base.join(rel);
        parsed(&p, CurveFile::read(&read(&p)?))?;
    }
    let problem = spec.build(base, seed)?;
    let result = synthesize(&problem, target.or(spec.torsion_target))?;
    let text = to_json(&ResultFile::from_result(&result));
    match out {
        Some(p) => {
            write(p, &text)?;
            Ok(format!(
                "wrote {}: total torsion {:.12}, closing residual {:.3e}, energy {:.12}\n",
                p.display(),
                result.achieved_total_torsion,
                result.closing_residual,
                result.energy
            ))
        }
        None => Ok(text),
    }
}

#[derive(Serialize)]
struct MarginSummary {
    min: f64,
    max: f64,
    regular: bool,
    zero_crossings: usize,
}

#[derive(Serialize)]
struct SurfaceReport {
    nu: usize,
    nv: usize,
    closure: ClosureReport,
    margin: MarginSummary,
    /// Absent when a grid vertex lies on the singular set.
    forms: Option<FormResiduals>,
    pgf: Option<PgfReport>,
    mesh: MeshCheck,
    header: Option<MeshHeader>,
    /// Singular set crossings on grid edges.
    singular_points: Vec<SingularPointInfo>,
}

struct SurfaceArgs<'a> {
    family: &'a Path,
    profile: &'a Path,
    nu: usize,
    nv: usize,
    out_mesh: Option<&'a Path>,
    out_report: Option<&'a Path>,
    allow_singular: bool,
    closure_tol: f64,
    seam_tol: f64,
    singular_tol: f64,
    pgf_tol: f64,
}

fn surface(a: SurfaceArgs, seed: u64) -> Outcome<String> {
    let family = parsed(a.family, FamilyFile::read(&read(a.family)?))?;
    let profile: ProfileSpec =
        parsed(a.profile, serde_json::from_str(&read(a.profile)?).map_err(monge_core::io::parse_error))?;
    let surface = MongeSurface::new(family.build(seed)?, profile.build()?)?;
    let closure = classify_closure(&surface, a.closure_tol);
    let margins = regularity_margin(&surface, a.nu, a.nv, a.singular_tol);
    if !margins.regular && !a.allow_singular {
        // the singular set may pass between vertices
        let [u, v] = margins.zero_set.first().copied().unwrap_or([f64::NAN, f64::NAN]);
        return Err(Error::SingularPoint { u, v }.into());
    }
    let opts = MeshOptions { allow_singular: a.allow_singular, seam_tol: a.seam_tol, singular_tol: a.singular_tol };
    let mesh = make_mesh(&surface, a.nu, a.nv, &closure, &opts)?;
    let header = mesh.header.clone();
    let regular = margins.regular && header.as_ref().is_none_or(|h| h.singular_vertices.is_empty());
    let forms = match fundamental_forms(&surface, a.nu, a.nv) {
        Ok(d) => Some(d.residuals()),
        Err(Error::SingularPoint { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let report = SurfaceReport {
        nu: a.nu,
        nv: a.nv,
        closure,
        margin: MarginSummary { min: margins.min, max: margins.max, regular, zero_crossings: margins.zero_set.len() },
        forms,
        pgf: regular.then(|| check_pgf(&surface, a.nu.min(64), a.nv.min(64), a.pgf_tol)),
        mesh: mesh_check(&mesh),
        singular_points: margins.zero_set.iter().map(|&[u, v]| singularity_type(&surface, u, v)).collect(),
        header,
    };
    if let Some(p) = a.out_mesh {
        write(p, &mesh.to_obj())?;
    }
    let text = to_json(&report);
    match a.out_report {
        Some(p) => {
            write(p, &text)?;
            Ok(format!(
                "{}: watertight {}, orientable {}\n",
                report.closure.kind.name(),
                report.mesh.watertight,
                report.mesh.orientable
            ))
        }
        None => Ok(text),
    }
}

#[derive(Serialize)]
struct MeshCheckReport {
    #[serde(flatten)]
    check: MeshCheck,
    header: Option<MeshHeader>,
}

fn mesh_check_cmd(path: &Path) -> Outcome<String> {
    let mesh = parsed(path, read_obj(&read(path)?))?;
    Ok(to_json(&MeshCheckReport { check: mesh_check(&mesh), header: mesh.header.clone() }))
}

fn configure_threads() {
    if let Some(n) = std::env::var("MONGE_KIT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let out = match &cli.command {
        Command::Analyze { curve, tol } => analyze(curve, *tol, cli.seed),
        Command::Synthesize { problem, torsion_target, out } => {
            synthesize_cmd(problem, *torsion_target, out.as_deref(), cli.seed)
        }
        Command::Surface {
            family,
            profile,
            nu,
            nv,
            out_mesh,
            out_report,
            allow_singular,
            closure_tol,
            seam_tol,
            singular_tol,
            pgf_tol,
        } => surface(
            SurfaceArgs {
                family,
                profile,
                nu: *nu,
                nv: *nv,
                out_mesh: out_mesh.as_deref(),
                out_report: out_report.as_deref(),
                allow_singular: *allow_singular,
                closure_tol: *closure_tol,
                seam_tol: *seam_tol,
                singular_tol: *singular_tol,
                pgf_tol: *pgf_tol,
            },
            cli.seed,
        ),
        Command::MeshCheck { mesh } => mesh_check_cmd(mesh),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: ParseError: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Geometry(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(match e {
                Error::Infeasible(_) => 4,
                Error::SingularPoint { .. } => 5,
                _ => 3,
            })
        }
    }
}
