use std::f64::consts::PI;

use approx::assert_relative_eq;
use monge_core::curve::{total_torsion, SampledCurve3, Vec3};
use monge_core::frames::{any_normal, frame_holonomy, rotation_minimizing_frame, unit_tangents};
use monge_core::numeric::wrap_angle;
use monge_core::plane_family::PlaneFamily;
use monge_core::spine_synth::{elastic_energy, reconstruct_spine, BinormalCurve};
use nalgebra::{Matrix3, Rotation3, Unit};
use proptest::prelude::*;

fn knot(p: f64, q: f64) -> SampledCurve3 {
    SampledCurve3::torus_knot(p, q, 2.0, 0.6, 384).unwrap()
}

fn rotation() -> impl Strategy<Value = Matrix3<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -PI..PI).prop_filter_map("axis", |(x, y, z, a)| {
        let v = Vec3::new(x, y, z);
        (v.norm() > 0.1).then(|| *Rotation3::from_axis_angle(&Unit::new_normalize(v), a).matrix())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_torsion_is_rigid_invariant(m in rotation(), dx in -5.0..5.0f64, q in 2u32..5) {
        let c = knot(1.0, q as f64);
        let moved = c.transformed(&m, &Vec3::new(dx, -dx, 0.5 * dx));
        assert_relative_eq!(total_torsion(&c).unwrap(), total_torsion(&moved).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn mirror_negates_total_torsion(q in 2u32..5) {
        let c = knot(1.0, q as f64);
        let mirror = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        let t = total_torsion(&c).unwrap();
        assert_relative_eq!(t, -total_torsion(&c.transformed(&mirror, &Vec3::zeros())).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn start_point_does_not_matter(k in 0usize..1024, seed in 0u64..1000) {
        let c = SampledCurve3::random_spherical(seed, 1024).unwrap();
        let shifted = c.with_start(k % 1024).unwrap();
        assert_relative_eq!(total_torsion(&c).unwrap(), total_torsion(&shifted).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn holonomy_cancels_total_torsion(seed in 0u64..10_000) {
        let c = SampledCurve3::random_spherical(seed, 1024).unwrap();
        let t = unit_tangents(&c).unwrap();
        let frame = rotation_minimizing_frame(&c, &any_normal(&t[0])).unwrap();
        let theta = frame_holonomy(&frame).unwrap();
        let tt = total_torsion(&c).unwrap();
        prop_assert!(wrap_angle(theta + tt).abs() < 1e-5);
        // spherical curves have zero total torsion
        prop_assert!(tt.abs() < 1e-5);
    }

    #[test]
    fn coefficients_rotate_with_the_basis(phi in -PI..PI) {
        let fam = PlaneFamily::from_spine(&knot(2.0, 3.0)).unwrap();
        let rot = fam.rotated(phi);
        let (s, c) = phi.sin_cos();
        for (a, b) in fam.coefficients().iter().zip(rot.coefficients()) {
            prop_assert!((b.x - (c * a.x + s * a.y)).abs() < 1e-12);
            prop_assert!((b.y - (c * a.y - s * a.x)).abs() < 1e-12);
            prop_assert!((b.z - a.z).abs() < 1e-12);
        }
        let (numeric, _) = rot.numerical_coefficients();
        for (a, b) in numeric.iter().zip(rot.coefficients()) {
            prop_assert!((a - b).norm() < 1e-4);
        }
    }

    #[test]
    fn energy_is_inverse_homogeneous(s in 0.01..100.0f64, eps in 0.1..1.0f64) {
        let b = BinormalCurve::trochoid(0.75, 2, eps).unwrap();
        let sigma = |t: f64| [1.2 + 0.4 * t.cos(), -0.4 * t.sin(), -0.4 * t.cos()];
        let scaled = |t: f64| sigma(t).map(|v| s * v);
        let e = elastic_energy(&b, &sigma, 128).unwrap();
        let es = elastic_energy(&b, &scaled, 128).unwrap();
        assert_relative_eq!(e, s * es, max_relative = 1e-9);
    }

    #[test]
    fn reconstruction_scales_linearly(s in 0.01..100.0f64) {
        let b = BinormalCurve::trochoid(0.75, 2, 0.4).unwrap();
        let sigma = |t: f64| [1.0 + 0.2 * (3.0 * t).sin(), 0.6 * (3.0 * t).cos(), -1.8 * (3.0 * t).sin()];
        let scaled = |t: f64| sigma(t).map(|v| s * v);
        let r = reconstruct_spine(&b, &sigma, 64).unwrap();
        let rs = reconstruct_spine(&b, &scaled, 64).unwrap();
        for (p, q) in r.curve.samples().iter().zip(rs.curve.samples()) {
            prop_assert!((p * s - q).norm() <= 1e-12 * s * (1.0 + p.norm()));
        }
    }
}
