//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use monge_core::curve::{frenet_data, total_torsion, PlaneCurve, SampledCurve3, Vec2};
use monge_core::frames::{any_normal, frame_holonomy, rotation_minimizing_frame, unit_tangents};
use monge_core::monge::{
    check_pgf, classify_closure, fundamental_forms, make_mesh, mesh_check, metric_error_on_grid, regularity_margin,
    singularity_type, ClosureKind, FrenetSweep, MeshOptions, MongeSurface, SeamMap,
};
use monge_core::numeric::wrap_angle;
use monge_core::plane_family::involute_family;
use monge_core::spine_synth::{
    closing_vectors, curvature_energy, elastic_energy, reconstruct_spine, synthesize, Basis, BinormalCurve,
    SpineSynthesisProblem, SynthesisResult,
};
use monge_core::Error;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn cap() -> BinormalCurve {
    BinormalCurve::trochoid(0.75, 2, 0.5).unwrap()
}

/// Closed spine of length `2 pi` with total torsion `target`.
fn spine(target: f64) -> SynthesisResult {
    let problem = SpineSynthesisProblem::new(cap(), Basis::default(), 2.0 * PI);
    synthesize(&problem, Some(target)).expect("synthesis")
}

fn max_curvature(c: &SampledCurve3) -> f64 {
    frenet_data(c).unwrap().curvature.iter().cloned().fold(0.0, f64::max)
}

fn torus(big_r: f64, r: f64) -> MongeSurface {
    let spine = SampledCurve3::circle(big_r, 512).unwrap();
    MongeSurface::from_spine(&spine, PlaneCurve::circle(Vec2::zeros(), r, 512).unwrap()).unwrap()
}

/// Regular surfaces used by criteria 3 and 4.
fn regular_surfaces() -> Vec<(&'static str, MongeSurface)> {
    let knot = SampledCurve3::torus_knot(2.0, 3.0, 2.0, 0.5, 1024).unwrap();
    let rosette = PlaneCurve::polar(|phi: f64| 0.1 * (1.0 + 0.2 * (2.0 * phi).cos()), 256).unwrap();
    // a wide cap keeps the spine gently curved so coarse grids resolve it
    let wide = BinormalCurve::trochoid(0.75, 2, 2.0).unwrap();
    let problem = SpineSynthesisProblem::new(wide, Basis::default(), 2.0 * PI);
    let synth = synthesize(&problem, None).expect("synthesis").spine;
    let r = 0.3 / max_curvature(&synth);
    let ellipse =
        PlaneCurve::polar(move |phi: f64| r / ((phi.cos()).powi(2) + (phi.sin() / 0.6).powi(2)).sqrt(), 256).unwrap();
    vec![
        ("torus R=2 r=0.5", torus(2.0, 0.5)),
        ("trefoil + rosette", MongeSurface::from_spine(&knot, rosette).unwrap()),
        ("synthesized spine + ellipse", MongeSurface::from_spine(&synth, ellipse).unwrap()),
    ]
}

fn holonomy_plus_torsion(c: &SampledCurve3) -> f64 {
    let t = unit_tangents(c).unwrap();
    let frame = rotation_minimizing_frame(c, &any_normal(&t[0])).unwrap();
    wrap_angle(frame_holonomy(&frame).unwrap() + total_torsion(c).unwrap())
}

fn criterion_1() -> Outcome {
    let mut curves: Vec<(String, SampledCurve3)> = vec![
        ("circle r=1".into(), SampledCurve3::circle(1.0, 256).unwrap()),
        ("circle r=3.5".into(), SampledCurve3::circle(3.5, 256).unwrap()),
        ("viviani".into(), SampledCurve3::viviani(1024).unwrap()),
        ("spherical seed 1".into(), SampledCurve3::random_spherical(1, 2048).unwrap()),
        ("spherical seed 2".into(), SampledCurve3::random_spherical(2, 2048).unwrap()),
        ("trefoil (2,3)".into(), SampledCurve3::torus_knot(2.0, 3.0, 2.0, 0.5, 2048).unwrap()),
        ("torus knot (3,2)".into(), SampledCurve3::torus_knot(3.0, 2.0, 2.0, 0.7, 2048).unwrap()),
        ("torus knot (2,5)".into(), SampledCurve3::torus_knot(2.0, 5.0, 3.0, 0.6, 2048).unwrap()),
    ];
    for target in [2.0 * PI / 4.0, 2.0, PI] {
        curves.push((format!("synthesized T={target:.4}"), spine(target).spine));
    }
    let mut worst = 0.0f64;
    for (_, c) in &curves {
        worst = worst.max(holonomy_plus_torsion(c).abs());
    }
    Outcome::new(
        worst < 1e-5,
        format!("{} closed curves, max |theta + T| mod 2pi = {worst:.2e} (tol 1e-5)", curves.len()),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 100..105 {
        let c = SampledCurve3::random_spherical(seed, 2048).unwrap();
        worst = worst.max(total_torsion(&c).unwrap().abs());
    }
    Outcome::new(worst < 1e-5, format!("5 random sphere curves, max |T| = {worst:.2e} (tol 1e-5)"))
}

fn criterion_3(surfaces: &[(&str, MongeSurface)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, s) in surfaces {
        let errs: Vec<f64> = [32, 64, 128, 256].iter().map(|&n| metric_error_on_grid(s, n)).collect();
        let order = errs.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
        let forms = fundamental_forms(s, 128, 128).unwrap().residuals();
        let fit = (errs[0] / errs[3]).log2() / 3.0;
        let ok = order >= 2.0 && forms.m < 1e-5;
        pass &= ok;
        parts.push(format!(
            "{name}: err32 {:.1e} err256 {:.1e} order min {order:.2} fit {fit:.2}, |M| {:.1e}",
            errs[0], errs[3], forms.m
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn criterion_4(surfaces: &[(&str, MongeSurface)]) -> Outcome {
    let mut worst_p = 0.0f64;
    let mut worst_g = 0.0f64;
    let mut parts = Vec::new();
    for (name, s) in surfaces {
        let r = check_pgf(s, 48, 48, 1e-5);
        worst_p = worst_p.max(r.planarity);
        worst_g = worst_g.max(r.geodesic);
        parts.push(format!("{name} {:.1e}", r.geodesic));
    }
    let helix = SampledCurve3::helix(1.0, 0.5, 2.0 * PI, 513).unwrap();
    let ellipse =
        PlaneCurve::polar(|phi: f64| 0.3 / (phi.cos().powi(2) + (phi.sin() / 0.5).powi(2)).sqrt(), 256).unwrap();
    let control = check_pgf(&FrenetSweep::new(helix, ellipse).unwrap(), 48, 48, 1e-5);
    let pass = worst_p < 1e-5 && worst_g < 1e-5 && control.geodesic > 1e-2;
    Outcome::new(
        pass,
        format!(
            "{} surfaces: planarity {worst_p:.1e}, geodesic {worst_g:.1e} ({}); Frenet sweep control geodesic {:.2e}",
            surfaces.len(),
            parts.join(", "),
            control.geodesic
        ),
    )
}

fn criterion_5() -> Outcome {
    let m = regularity_margin(&torus(2.0, 0.5), 256, 64, 1e-9);
    // the margin of a torus of revolution is 1 - (r/R) cos(phi)
    let closed_form = (m.min - 0.75).abs() < 1e-9 && (m.max - 1.25).abs() < 1e-9;
    let half = regularity_margin(&torus(2.0, 1.0), 256, 64, 1e-9);
    let half_ok = (half.min - 0.5).abs() < 1e-9 && (half.max - 1.5).abs() < 1e-9;

    let fam = involute_family(-1.0, 1.0, 201).unwrap();
    let profiles = [
        ("y=-x", Vec2::new(-1.0, 1.0), Vec2::new(1.0, -1.0)),
        ("x-axis", Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)),
        ("y-axis", Vec2::new(0.0, -1.0), Vec2::new(0.0, 1.0)),
    ];
    let mut locus_ok = true;
    let mut parts = Vec::new();
    for (name, a, b) in profiles {
        let nu = 81;
        let nv = 201;
        let seg = PlaneCurve::segment(a, b, nu).unwrap();
        let s = MongeSurface::new(fam.clone(), seg).unwrap();
        let rep = regularity_margin(&s, nu, nv, 1e-9);
        let (u0, u1) = s.u_domain();
        let du = (u1 - u0) / (nu - 1) as f64;
        let len = (b - a).norm();
        // the axis kappa1 x + kappa2 y = lambda is x = -v for this family
        let mut worst = 0.0f64;
        for [u, v] in &rep.zero_set {
            let x = a.x + (b.x - a.x) * (u - u0) / len;
            worst = worst.max((x + v).abs());
        }
        let expected = !rep.zero_set.is_empty() || (a.x == b.x && a.x != 0.0);
        locus_ok &= expected && worst <= du;
        // type at an interior point of the locus
        let kind = rep
            .zero_set
            .iter()
            .min_by(|p, q| (p[1] - 0.3).abs().total_cmp(&(q[1] - 0.3).abs()))
            .map(|[u, v]| format!("{:?}", singularity_type(&s, *u, *v).kind))
            .unwrap_or_default();
        parts.push(format!("{name}: {} grid zeros, max |x+v| {worst:.1e}, {kind}", rep.zero_set.len()));
    }
    Outcome::new(
        closed_form && half_ok && locus_ok,
        format!(
            "torus R=2 r=0.5 margin [{:.9}, {:.9}] = 1 -+ r/R ([0.5, 1.5] is the r/R = 1/2 case: R=2 r=1 gives [{:.9}, {:.9}]); singular locus x = -v: {}",
            m.min,
            m.max,
            half.min,
            half.max,
            parts.join(", ")
        ),
    )
}

fn criterion_6() -> Outcome {
    let length = 2.0 * PI;
    let mut worst_close = 0.0f64;
    let mut worst_t = 0.0f64;
    for target in [2.0 * PI / 4.0, 2.0, PI, 2.0 * PI] {
        let r = spine(target);
        worst_close = worst_close.max(r.closing_residual / length);
        worst_t = worst_t.max((r.achieved_total_torsion - target).abs());
    }
    let gc = SpineSynthesisProblem::new(BinormalCurve::great_circle(), Basis::default(), length);
    let infeasible = matches!(synthesize(&gc, None), Err(Error::Infeasible(_)));
    let a0 = closing_vectors(&gc)[0];
    Outcome::new(
        worst_close < 1e-6 && worst_t < 1e-4 && infeasible,
        format!(
            "4 targets: max closing residual / length {worst_close:.1e}, max |T - L_S| {worst_t:.1e}; great circle infeasible: {infeasible} (a_const = ({:.3}, {:.3}, {:.6}))",
            a0.x, a0.y, a0.z
        ),
    )
}

fn build(
    target: f64,
    profile: PlaneCurve,
    nu: usize,
    nv: usize,
) -> (ClosureKind, monge_core::monge::MeshCheck, f64, f64) {
    let r = spine(target);
    let s = MongeSurface::from_spine(&r.spine, profile).unwrap();
    let closure = classify_closure(&s, 1e-6);
    let mesh = make_mesh(&s, nu, nv, &closure, &MeshOptions::default()).unwrap();
    let header = mesh.header.clone().unwrap();
    let seam = match header.seam {
        SeamMap::None => f64::NAN,
        _ => header.seam_residual,
    };
    (closure.kind, mesh_check(&mesh), seam, r.achieved_total_torsion)
}

fn criterion_7() -> Outcome {
    let t0 = Instant::now();
    let k = max_curvature(&spine(2.0 * PI / 4.0).spine);
    let rosette = PlaneCurve::rosette(0.3 / k, 0.25, 4, 1024).unwrap();
    let (kind_a, chk_a, seam_a, t_a) = build(2.0 * PI / 4.0, rosette, 128, 256);
    let time_a = t0.elapsed().as_secs_f64();
    let t0 = Instant::now();
    let k = max_curvature(&spine(2.0).spine);
    let circle = PlaneCurve::circle(Vec2::zeros(), 0.3 / k, 128).unwrap();
    let (kind_b, chk_b, seam_b, t_b) = build(2.0, circle, 128, 256);
    let time_b = t0.elapsed().as_secs_f64();
    let pass = kind_a == ClosureKind::CoveredTorus { degree: 4 }
        && kind_b == ClosureKind::TubularTorus
        && chk_a.watertight
        && chk_b.watertight
        && time_a < 60.0
        && time_b < 60.0;
    Outcome::new(
        pass,
        format!(
            "T={t_a:.6}: {} watertight={} chi={} seam {seam_a:.1e} ({time_a:.1}s); T={t_b:.6}: {} watertight={} chi={} seam {seam_b:.1e} ({time_b:.1}s)",
            kind_label(kind_a),
            chk_a.watertight,
            chk_a.euler_characteristic,
            kind_label(kind_b),
            chk_b.watertight,
            chk_b.euler_characteristic
        ),
    )
}

fn kind_label(k: ClosureKind) -> String {
    match k {
        ClosureKind::CoveredTorus { degree } => format!("covered_torus({degree})"),
        other => other.name().to_string(),
    }
}

fn criterion_8() -> Outcome {
    let k = max_curvature(&spine(PI).spine);
    let a = 0.3 / k;
    let segment = PlaneCurve::segment(Vec2::new(-a, 0.0), Vec2::new(a, 0.0), 65).unwrap();
    let (kind_m, chk_m, seam_m, _) = build(PI, segment, 65, 256);
    let eight = PlaneCurve::figure_eight(a, 256).unwrap();
    let (kind_k, chk_k, seam_k, _) = build(PI, eight, 256, 256);
    let pass = kind_m == ClosureKind::MoebiusStrip
        && seam_m < 1e-8
        && !chk_m.orientable
        && kind_k == ClosureKind::KleinBottle
        && !chk_k.orientable
        && chk_k.watertight;
    Outcome::new(
        pass,
        format!(
            "{}: seam {seam_m:.1e} orientable={} boundary edges {}; {}: seam {seam_k:.1e} orientable={} watertight={} chi={}",
            kind_label(kind_m),
            chk_m.orientable,
            chk_m.boundary_edges,
            kind_label(kind_k),
            chk_k.orientable,
            chk_k.watertight,
            chk_k.euler_characteristic
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for target in [2.0 * PI / 4.0, 2.0, PI] {
        let r = spine(target);
        // points only, so curvature comes from difference stencils
        let bare = SampledCurve3::new(r.spine.samples().to_vec(), r.spine.params().to_vec(), r.spine.period()).unwrap();
        let direct = curvature_energy(&bare).unwrap();
        worst = worst.max((direct - r.energy).abs() / r.energy);
        cases += 1;
    }
    // two non-optimal positive sigma on a closed-up reconstruction
    let b = cap();
    for sigma in [(|t: f64| [1.0 + 0.3 * t.cos(), -0.3 * t.sin(), -0.3 * t.cos()]) as fn(f64) -> [f64; 3], |t: f64| {
        [2.0 + (3.0 * t).sin(), 3.0 * (3.0 * t).cos(), -9.0 * (3.0 * t).sin()]
    }] {
        let rec = reconstruct_spine(&b, &sigma, 2048).unwrap();
        let formula = elastic_energy(&b, &sigma, 1024).unwrap();
        let direct = curvature_energy(&rec.curve).unwrap();
        worst = worst.max((direct - formula).abs() / formula);
        cases += 1;
    }
    let sigma = |t: f64| [1.0 + 0.3 * t.cos(), -0.3 * t.sin(), -0.3 * t.cos()];
    let mut homog = 0.0f64;
    for s in [0.1, 2.0, 37.0] {
        let scaled = move |t: f64| sigma(t).map(|v| s * v);
        let e = elastic_energy(&b, &sigma, 512).unwrap();
        let es = elastic_energy(&b, &scaled, 512).unwrap();
        homog = homog.max((es * s / e - 1.0).abs());
    }
    Outcome::new(
        worst < 1e-3 && homog < 1e-9,
        format!("{cases} cases, max relative gap {worst:.1e} (tol 1e-3); homogeneity error {homog:.1e} (tol 1e-9)"),
    )
}

fn criterion_10() -> Outcome {
    let b = cap();
    let problem = SpineSynthesisProblem::new(b, Basis::Cos { frequencies: vec![0, 3, 6] }, 1.0);
    let r = synthesize(&problem, None).unwrap();
    // feasible set: a segment on the line orthogonal to the z closing row
    // and the length row (x and y rows vanish by symmetry)
    let a = closing_vectors(&problem);
    let az = nalgebra::Vector3::new(a[0].z, a[1].z, a[2].z);
    let nodes = 4096;
    let mut ell = nalgebra::Vector3::zeros();
    let mut table = Vec::with_capacity(nodes);
    let p = 2.0 * PI;
    for k in 0..nodes {
        // midpoint rule: spectrally accurate for periodic integrands
        let t = p * (k as f64 + 0.5) / nodes as f64;
        let [bb, d1, d2, _] = problem.binormal.eval(t);
        let det = bb.dot(&d1.cross(&d2));
        let basis = problem.basis.eval(t, p);
        let row = nalgebra::Vector3::new(basis[0][0], basis[1][0], basis[2][0]);
        ell += row * (d1.norm() * p / nodes as f64);
        table.push((row, det * det / d1.norm().powi(5) * p / nodes as f64));
    }
    let dir = az.cross(&ell).normalize();
    let c0 = nalgebra::Vector3::from_column_slice(r.coefficients());
    let smin = problem.sigma_min();
    let energy = |c: nalgebra::Vector3<f64>| -> Option<f64> {
        let mut e = 0.0;
        for (row, w) in &table {
            let s = row.dot(&c);
            if s < smin {
                return None;
            }
            e += w / s;
        }
        Some(e)
    };
    let span = 3.0 * c0.norm();
    let n = 200_001;
    let mut best = f64::INFINITY;
    let mut feasible = 0;
    for k in 0..n {
        // offset so the grid never lands on the optimizer's own point
        let s = -span + 2.0 * span * (k as f64 + 0.371) / n as f64;
        if let Some(e) = energy(c0 + dir * s) {
            feasible += 1;
            best = best.min(e);
        }
    }
    let gap = (r.energy - best).abs() / best;
    Outcome::new(
        gap < 1e-4 && feasible > 0 && r.diagnostics.free_dimension == 1,
        format!(
            "optimizer E = {:.10}, grid E = {best:.10} over {feasible} feasible points, relative gap {gap:.1e} (tol 1e-4), kkt {:.1e}",
            r.energy, r.diagnostics.kkt_residual
        ),
    )
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; a name filter
    // that matches nothing here skips the suite
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let start = Instant::now();
    let surfaces = regular_surfaces();
    type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("holonomy-torsion identity", Box::new(criterion_1)),
        ("sphere zero torsion", Box::new(criterion_2)),
        ("metric reproduction", Box::new(|| criterion_3(&surfaces))),
        ("PGF verdict", Box::new(|| criterion_4(&surfaces))),
        ("regularity condition", Box::new(criterion_5)),
        ("spine synthesis closure", Box::new(criterion_6)),
        ("covered and tubular tori", Box::new(criterion_7)),
        ("Moebius strip and Klein bottle", Box::new(criterion_8)),
        ("energy cross-validation", Box::new(criterion_9)),
        ("optimizer correctness", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = run();
        let status = if out.pass { "PASS" } else { "FAIL" };
        if !out.pass {
            failed += 1;
        }
        println!("criterion {:>2} {status} [{name}] ({:.2}s) {}", i + 1, t0.elapsed().as_secs_f64(), out.detail);
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
