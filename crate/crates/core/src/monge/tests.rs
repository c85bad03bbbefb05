use super::*;
use crate::curve::Vec2;
use crate::plane_family::{involute_family, involute_frame};
use std::f64::consts::PI;

fn torus(big_r: f64, r: f64, n: usize) -> MongeSurface {
    let spine = SampledCurve3::circle(big_r, n).unwrap();
    MongeSurface::from_spine(&spine, PlaneCurve::circle(Vec2::zeros(), r, n).unwrap()).unwrap()
}

#[test]
fn torus_points_lie_on_torus() {
    let s = torus(2.0, 0.5, 128);
    for &(u, v) in &[(0.0, 0.0), (0.7, 1.3), (2.9, 11.0), (1.0, -3.0)] {
        let x = s.evaluate(u, v).unwrap();
        let rho = x.x.hypot(x.y);
        assert!(((rho - 2.0).powi(2) + x.z * x.z - 0.25).abs() < 1e-9, "{x:?}");
    }
    let f = s.family().frames()[0];
    let at0 = s.evaluate(0.0, 0.0).unwrap();
    assert!((at0 - (f.p + f.q1 * 0.5)).norm() < 1e-12);
}

#[test]
fn origin_on_profile_traces_spine() {
    let spine = SampledCurve3::torus_knot(2.0, 3.0, 2.0, 0.5, 256).unwrap();
    let profile = PlaneCurve::segment(Vec2::new(-0.1, 0.05), Vec2::new(0.1, -0.05), 33).unwrap();
    let s = MongeSurface::from_spine(&spine, profile).unwrap();
    let mid = 0.5 * (s.u_domain().0 + s.u_domain().1);
    for j in 0..8 {
        let v = j as f64 * 0.3;
        let p = s.family().frame_at(v).p;
        assert!((s.evaluate(mid, v).unwrap() - p).norm() < 1e-12);
    }
}

#[test]
fn involute_surface_matches_direct_formula() {
    let fam = involute_family(-2.0, 2.0, 257).unwrap();
    let line = PlaneCurve::segment(Vec2::new(-1.0, 1.0), Vec2::new(1.0, -1.0), 65).unwrap();
    let s = MongeSurface::new(fam, line).unwrap();
    let (u0, u1) = s.u_domain();
    for &(a, v) in &[(0.1, -1.5), (0.5, 0.0), (0.9, 1.7)] {
        let u = u0 + a * (u1 - u0);
        let x = -1.0 + 2.0 * a;
        let direct = involute_frame(v).point(x, -x);
        assert!((s.evaluate(u, v).unwrap() - direct).norm() < 1e-9);
    }
    assert!(matches!(s.evaluate(u0 - 0.5, 0.0), Err(Error::OutOfDomain { .. })));
    assert!(matches!(s.evaluate(u0, 2.5), Err(Error::OutOfDomain { .. })));
}

#[test]
fn torus_margin_range() {
    let s = torus(2.0, 0.5, 128);
    let m = regularity_margin(&s, 64, 64, 1e-9);
    assert!(m.regular);
    assert!((m.min - 0.75).abs() < 1e-9 && (m.max - 1.25).abs() < 1e-9, "{} {}", m.min, m.max);
}

#[test]
fn involute_margin_vanishes_on_line() {
    let fam = involute_family(-1.5, 1.5, 121).unwrap();
    let seg = PlaneCurve::segment(Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0), 41).unwrap();
    let s = MongeSurface::new(fam, seg).unwrap();
    let m = regularity_margin(&s, 41, 121, 1e-12);
    assert!(!m.regular);
    let u0 = s.u_domain().0;
    for [u, v] in &m.zero_set {
        let x = -1.0 + (u - u0);
        assert!((x + v).abs() < 1e-9, "({x}, {v})");
    }
    assert!(matches!(fundamental_forms(&s, 41, 121), Err(Error::SingularPoint { .. })));
}

#[test]
fn unit_circle_spine_with_unit_profile_is_singular() {
    let s = torus(1.0, 1.0, 128);
    let m = regularity_margin(&s, 128, 16, 1e-9);
    assert!(!m.regular);
    assert!(m.min.abs() < 1e-9);
}

#[test]
fn torus_forms() {
    let s = torus(2.0, 0.5, 256);
    let d = fundamental_forms(&s, 32, 32).unwrap();
    let r = d.residuals();
    assert!(r.e < 1e-6 && r.f < 1e-6 && r.g < 1e-6, "{r:?}");
    assert!(r.m < 1e-6, "{r:?}");
    // classical torus: K = cos(phi) / (r (R + r cos(phi))) where the margin
    // equals (R + r cos phi) / R
    for k in 0..d.e.len() {
        let m = d.regularity_margin[k];
        let cos_phi = (2.0 * m - 2.0) / 0.5;
        let expect = cos_phi / (0.5 * 2.0 * m);
        assert!((d.gauss_curvature[k].abs() - expect.abs()).abs() < 1e-5);
    }
}

#[test]
fn torus_is_pgf_and_frenet_sweep_is_not() {
    let s = torus(2.0, 0.5, 256);
    let r = check_pgf(&s, 32, 16, 1e-5);
    assert!(r.pgf, "{r:?}");
    let helix = SampledCurve3::helix(1.0, 0.5, 2.0 * PI, 257).unwrap();
    let ellipse =
        PlaneCurve::polar(|phi: f64| 0.3 / ((phi.cos() / 1.0).powi(2) + (phi.sin() / 0.5).powi(2)).sqrt(), 256)
            .unwrap();
    let sweep = FrenetSweep::new(helix.clone(), ellipse.clone()).unwrap();
    let bad = check_pgf(&sweep, 32, 16, 1e-5);
    assert!(!bad.pgf && bad.geodesic > 1e-2, "{bad:?}");
    let good = MongeSurface::from_spine(&helix, ellipse).unwrap();
    assert!(check_pgf(&good, 32, 16, 1e-5).pgf);
}

#[test]
fn singular_types_on_involute_surfaces() {
    let fam = involute_family(-1.0, 1.0, 201).unwrap();
    let cases = [
        (Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0), SingularityKind::Fold),
        (Vec2::new(0.0, -1.0), Vec2::new(0.0, 1.0), SingularityKind::CuspidalEdge),
        (Vec2::new(-1.0, 1.0), Vec2::new(1.0, -1.0), SingularityKind::CuspidalEdge),
    ];
    for (a, b, kind) in cases {
        let s = MongeSurface::new(fam.clone(), PlaneCurve::segment(a, b, 41).unwrap()).unwrap();
        // singular where x = -v; take v = 0 at the profile point with x = 0
        let u = 0.5 * (s.u_domain().0 + s.u_domain().1);
        assert!(s.margin_at(u, 0.0).abs() < 1e-12);
        assert_eq!(singularity_type(&s, u, 0.0).kind, kind);
    }
}

#[test]
fn torus_closure_and_mesh() {
    let s = torus(2.0, 0.5, 256);
    let c = classify_closure(&s, 1e-6);
    assert_eq!(c.kind, ClosureKind::MongeTorus);
    let mesh = make_mesh(&s, 64, 64, &c, &MeshOptions::default()).unwrap();
    assert_eq!(mesh.vertices.len(), 4096);
    assert_eq!(mesh.quads.len(), 4096);
    let chk = mesh_check(&mesh);
    assert!(chk.watertight && chk.orientable, "{chk:?}");
    assert_eq!(chk.euler_characteristic, 0);
    let back = read_obj(&mesh.to_obj()).unwrap();
    assert_eq!(back, mesh);
}

#[test]
fn open_family_gives_open_mesh() {
    let fam = involute_family(0.5, 2.0, 65).unwrap();
    let seg = PlaneCurve::segment(Vec2::new(0.0, -0.2), Vec2::new(0.0, 0.2), 17).unwrap();
    let s = MongeSurface::new(fam, seg).unwrap();
    let c = classify_closure(&s, 1e-6);
    assert_eq!(c.kind, ClosureKind::Open);
    let mesh = make_mesh(&s, 9, 12, &c, &MeshOptions::default()).unwrap();
    let chk = mesh_check(&mesh);
    assert_eq!(chk.faces, 8 * 11);
    assert!(!chk.watertight && chk.orientable);
    assert_eq!(chk.euler_characteristic, 1);
}

#[test]
fn singular_mesh_needs_permission() {
    let fam = involute_family(-1.0, 1.0, 65).unwrap();
    let seg = PlaneCurve::segment(Vec2::new(0.0, -0.5), Vec2::new(0.0, 0.5), 17).unwrap();
    let s = MongeSurface::new(fam, seg).unwrap();
    let c = classify_closure(&s, 1e-6);
    assert!(matches!(make_mesh(&s, 17, 21, &c, &MeshOptions::default()), Err(Error::SingularPoint { .. })));
    let opts = MeshOptions { allow_singular: true, ..MeshOptions::default() };
    let mesh = make_mesh(&s, 17, 21, &c, &opts).unwrap();
    let sing = &mesh.header.unwrap().singular_vertices;
    assert_eq!(sing.len(), 17);
    assert!(sing.iter().all(|p| p.kind == SingularityKind::CuspidalEdge));
}

#[test]
fn metric_error_decays() {
    let s = torus(2.0, 0.5, 512);
    let errs: Vec<f64> = [16, 32, 64].iter().map(|&n| metric_error_on_grid(&s, n)).collect();
    assert!(errs[0] / errs[1] > 4.0 && errs[1] / errs[2] > 4.0, "{errs:?}");
}
