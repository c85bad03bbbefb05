use super::*;
use crate::curve::{frenet_data, total_torsion};

fn cap(eps: f64) -> BinormalCurve {
    BinormalCurve::trochoid(0.75, 2, eps).unwrap()
}

fn problem(b: BinormalCurve, length: f64) -> SpineSynthesisProblem {
    SpineSynthesisProblem::new(b, Basis::default(), length)
}

#[test]
fn fourier_interpolant_reproduces_smooth_curve() {
    let b = cap(0.4);
    let sampled = b.sampled(128).unwrap();
    let f = BinormalCurve::from_curve(&sampled).unwrap();
    assert!((f.length() - b.length()).abs() < 1e-10);
    for k in 0..37 {
        let t = 0.17 * k as f64;
        let (x, y) = (b.eval(t), f.eval(t));
        for m in 0..4 {
            assert!((x[m] - y[m]).norm() < 1e-8, "order {m} at {t}");
        }
    }
}

#[test]
fn from_curve_rejects_points_off_sphere() {
    let c = SampledCurve3::circle(1.1, 64).unwrap();
    assert!(BinormalCurve::from_curve(&c).is_err());
    let open = SampledCurve3::helix(1.0, 0.0, 1.0, 16).unwrap();
    assert_eq!(BinormalCurve::from_curve(&open).unwrap_err(), Error::OpenCurve);
}

#[test]
fn bspline_basis_is_partition_of_unity() {
    for degree in 1..=4 {
        let basis = Basis::Bspline { n: 9, degree };
        basis.validate().unwrap();
        for k in 0..50 {
            let t = 0.123 * k as f64;
            let v = basis.eval(t, 2.0 * PI);
            let sum: [f64; 3] = [0, 1, 2].map(|m| v.iter().map(|b| b[m]).sum());
            assert!((sum[0] - 1.0).abs() < 1e-12, "degree {degree}: {sum:?}");
            assert!(sum[1].abs() < 1e-9);
            if degree >= 3 {
                assert!(sum[2].abs() < 1e-8);
            }
        }
    }
    assert!(Basis::Trig { n: 4 }.validate().is_err());
    assert!(Basis::Bspline { n: 3, degree: 3 }.validate().is_err());
}

#[test]
fn great_circle_cannot_close() {
    let b = BinormalCurve::great_circle();
    let a = closing_vectors(&problem(b.clone(), 1.0));
    assert!((a[0] - Vec3::new(0.0, 0.0, 2.0 * PI)).norm() < 1e-12);
    for v in &a[1..] {
        assert!(v.norm() < 1e-12);
    }
    assert!(matches!(synthesize(&problem(b.clone(), 1.0), None), Err(Error::Infeasible(_))));
    assert!(fenchel_coverage(&b) < 0.05);
}

#[test]
fn closing_vectors_converge() {
    let mut p = problem(cap(0.5), 1.0);
    p.quad_intervals = 256;
    let coarse = closing_vectors(&p);
    p.quad_intervals = 512;
    let fine = closing_vectors(&p);
    for (x, y) in coarse.iter().zip(&fine) {
        assert!((x - y).norm() < 1e-8);
    }
    let mut p = SpineSynthesisProblem::new(cap(0.5), Basis::Bspline { n: 12, degree: 3 }, 1.0);
    p.quad_intervals = 240;
    let coarse = closing_vectors(&p);
    p.quad_intervals = 480;
    for (x, y) in coarse.iter().zip(&closing_vectors(&p)) {
        assert!((x - y).norm() < 1e-8);
    }
}

#[test]
fn reconstruction_realizes_binormal_and_torsion() {
    let b = cap(0.5);
    let sigma = |t: f64| [1.0 + 0.3 * t.cos(), -0.3 * t.sin(), -0.3 * t.cos()];
    let rec = reconstruct_spine(&b, &sigma, 512).unwrap();
    assert!(!rec.curve.is_closed());
    let fd = frenet_data(&rec.curve).unwrap();
    // r' x r'' is parallel to b det(b, b', b''), negative on this cap
    let sign = fd.binormal[0].dot(&b.eval(0.0)[0]).signum();
    assert_eq!(sign, -1.0);
    for (j, &t) in rec.curve.params().iter().enumerate() {
        assert!((fd.torsion[j] * sigma(t)[0] - 1.0).abs() < 1e-3);
        let bj = b.eval(t)[0];
        assert!((fd.binormal[j] * sign - bj).norm() < 1e-4);
        let [_, d1, ..] = b.eval(t);
        let t_expect = d1.normalize().cross(&bj);
        assert!((fd.tangent[j] - t_expect).norm() < 1e-4);
    }
}

#[test]
fn reconstruction_is_linear_in_sigma() {
    let b = cap(0.3);
    let s1 = |t: f64| [2.0 + (2.0 * t).sin(), 2.0 * (2.0 * t).cos(), -4.0 * (2.0 * t).sin()];
    let s3 = |t: f64| s1(t).map(|v| 3.0 * v);
    let r1 = reconstruct_spine(&b, &s1, 128).unwrap();
    let r3 = reconstruct_spine(&b, &s3, 128).unwrap();
    for (p, q) in r1.curve.samples().iter().zip(r3.curve.samples()) {
        assert!((p * 3.0 - q).norm() < 1e-12 * (1.0 + q.norm()));
    }
    let bad = |t: f64| [t.cos(), -t.sin(), -t.cos()];
    assert!(matches!(reconstruct_spine(&b, &bad, 128), Err(Error::NonPositiveSigma { .. })));
    assert!(matches!(elastic_energy(&b, &bad, 64), Err(Error::NonPositiveSigma { .. })));
}

#[test]
fn energy_homogeneity_and_flat_binormal() {
    let b = cap(0.6);
    let s = |t: f64| [1.5 + 0.5 * t.sin(), 0.5 * t.cos(), -0.5 * t.sin()];
    let s7 = |t: f64| s(t).map(|v| 7.0 * v);
    let e1 = elastic_energy(&b, &s, 256).unwrap();
    let e7 = elastic_energy(&b, &s7, 256).unwrap();
    assert!((e1 / e7 - 7.0).abs() < 1e-12);
    // a great circle has det(b, b', b'') = 0 everywhere
    let g = BinormalCurve::great_circle();
    assert!(elastic_energy(&g, &s, 256).unwrap().abs() < 1e-20);
}

#[test]
fn synthesized_spines_close_and_realize_torsion() {
    for target in [2.0 * PI / 4.0, 2.0, PI, 2.0 * PI] {
        let p = problem(cap(0.5), 10.0);
        let r = synthesize(&p, Some(target)).unwrap();
        assert!(r.spine.is_closed());
        assert!(r.closing_residual < 1e-6 * 10.0, "{target}: {}", r.closing_residual);
        assert!((r.length - 10.0).abs() < 1e-9);
        assert!((r.diagnostics.binormal_length - target).abs() < 1e-10);
        assert!((r.achieved_total_torsion - target).abs() < 1e-4);
        assert!((total_torsion(&r.spine).unwrap() - target).abs() < 1e-4);
        assert!(r.diagnostics.kkt_residual < 1e-6);
        let smin = r.diagnostics.sigma_min;
        assert!(r.sigma_samples.iter().all(|&s| s >= smin));
        let direct = curvature_energy(&r.spine).unwrap();
        assert!((direct - r.energy).abs() < 1e-3 * r.energy, "{direct} vs {}", r.energy);
        assert!(r.diagnostics.fenchel_coverage > 0.999);
    }
}

#[test]
fn synthesis_scales_with_length() {
    let b = cap(0.5);
    let r1 = synthesize(&problem(b.clone(), 1.0), None).unwrap();
    let r2 = synthesize(&problem(b, 2.0), None).unwrap();
    let cn = r1.coefficients().iter().map(|c| c.abs()).fold(0.0, f64::max);
    for (a, c) in r1.coefficients().iter().zip(r2.coefficients()) {
        assert!((2.0 * a - c).abs() < 1e-6 * cn);
    }
    assert!((r1.energy / r2.energy - 2.0).abs() < 1e-6 * 2.0);
    for (p, q) in r1.spine.samples().iter().zip(r2.spine.samples()) {
        assert!((p * 2.0 - q).norm() < 1e-6 * 2.0);
    }
}

#[test]
fn bspline_synthesis_closes() {
    let p = SpineSynthesisProblem::new(cap(0.5), Basis::Bspline { n: 12, degree: 3 }, 5.0);
    let r = synthesize(&p, Some(PI)).unwrap();
    assert!(r.closing_residual < 5e-6);
    assert!((r.achieved_total_torsion - PI).abs() < 1e-4);
}

#[test]
fn sampled_binormal_round_trip() {
    // binormal image of a synthesized spine, resampled, rebuilds the spine
    let r = synthesize(&problem(cap(0.5), 4.0), None).unwrap();
    let fd = frenet_data(&r.spine).unwrap();
    let trace = SampledCurve3::new(fd.binormal.clone(), r.spine.params().to_vec(), r.spine.period()).unwrap();
    let b = BinormalCurve::from_curve(&trace).unwrap();
    let rec = reconstruct_spine(&b, &r.sigma, r.spine.len()).unwrap();
    assert!(rec.curve.is_closed());
    for (p, q) in rec.curve.samples().iter().zip(r.spine.samples()) {
        assert!((p - q).norm() < 1e-4 * 4.0);
    }
}

#[test]
fn too_small_binormal_is_infeasible_with_huge_sigma_min() {
    let mut p = problem(cap(0.5), 1.0);
    p.sigma_min = Some(10.0);
    assert!(matches!(synthesize(&p, None), Err(Error::Infeasible(_))));
}

#[test]
fn toy_problem_matches_grid_search() {
    let b = cap(0.5);
    let basis = Basis::Cos { frequencies: vec![0, 3, 6] };
    let p = SpineSynthesisProblem::new(b.clone(), basis.clone(), 1.0);
    let r = synthesize(&p, None).unwrap();
    assert_eq!(r.diagnostics.free_dimension, 1);
    // feasible line: orthogonal to the z closing row and the length row
    let a = closing_vectors(&p);
    let az = Vec3::new(a[0].z, a[1].z, a[2].z);
    let disc = Discretization::new(&p);
    let l = disc.length_row(3);
    let ell = Vec3::new(l[0], l[1], l[2]);
    let dir = az.cross(&ell).normalize();
    let c0 = Vec3::from_column_slice(r.coefficients());
    let smin = p.sigma_min();
    let energy = |c: Vec3| -> Option<f64> {
        let mut e = 0.0;
        for (q, row) in disc.nodes.iter().zip(&disc.basis) {
            let s = c.x * row[0] + c.y * row[1] + c.z * row[2];
            if s < smin {
                return None;
            }
            e += q.w * q.weight() / s;
        }
        Some(e)
    };
    let mut best = f64::INFINITY;
    let span = 4.0 * c0.norm();
    let n = 20001;
    for k in 0..n {
        let s = -span + 2.0 * span * k as f64 / (n - 1) as f64;
        if let Some(e) = energy(c0 + dir * s) {
            best = best.min(e);
        }
    }
    assert!(best.is_finite());
    assert!(r.energy <= best + 1e-4 * best, "{} vs {best}", r.energy);
    assert!((r.energy - best).abs() < 1e-4 * best);
}
