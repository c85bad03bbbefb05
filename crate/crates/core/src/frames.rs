//! Rotation-minimizing frames and their holonomy around closed curves.

use serde::{Deserialize, Serialize};

use crate::curve::{binormal_trace_length, total_torsion, SampledCurve3, Vec3};
use crate::error::{Error, Result};
use crate::numeric::{fd_weights, rational_approx, wrap_angle, DERIV_WIDTH};

/// Largest denominator considered when recognising `T / 2pi` as rational.
pub const MAX_DENOMINATOR: i64 = 24;

/// An adapted orthonormal frame `(t, q1, q2)` along a curve, with `q2 = t x q1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingFrame {
    curve: SampledCurve3,
    pub t: Vec<Vec3>,
    pub q1: Vec<Vec3>,
    pub q2: Vec<Vec3>,
    /// Rotation carrying the once-transported `q1` back to the initial `q1`,
    /// measured in the `(q1, q2)` orientation. `None` for open curves.
    pub holonomy_angle: Option<f64>,
}

/// Unit tangents at every sample; fails on a vanishing derivative.
pub fn unit_tangents(curve: &SampledCurve3) -> Result<Vec<Vec3>> {
    let scale = curve.diameter().max(1e-300);
    curve
        .jets()
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let s = j.d1.norm();
            if s <= 1e-14 * scale || !s.is_finite() {
                Err(Error::DegenerateTangent { index: i })
            } else {
                Ok(j.d1 / s)
            }
        })
        .collect()
}

/// One double-reflection step transporting `r` from `(x0, t0)` to `(x1, t1)`.
fn double_reflection(x0: &Vec3, t0: &Vec3, r: &Vec3, x1: &Vec3, t1: &Vec3) -> Vec3 {
    let v1 = x1 - x0;
    let c1 = v1.dot(&v1);
    let (r_l, t_l) =
        if c1 > 0.0 { (r - v1 * (2.0 / c1 * v1.dot(r)), t0 - v1 * (2.0 / c1 * v1.dot(t0))) } else { (*r, *t0) };
    let v2 = t1 - t_l;
    let c2 = v2.dot(&v2);
    let out = if c2 > 1e-300 { r_l - v2 * (2.0 / c2 * v2.dot(&r_l)) } else { r_l };
    // remove round-off drift
    (out - t1 * t1.dot(&out)).normalize()
}

/// Rotation-minimizing frame with `q1(0)` given by the projection of
/// `q1_initial` onto the normal plane at the first sample.
pub fn rotation_minimizing_frame(curve: &SampledCurve3, q1_initial: &Vec3) -> Result<MovingFrame> {
    let t = unit_tangents(curve)?;
    let q0 = q1_initial - t[0] * t[0].dot(q1_initial);
    if q0.norm() < 1e-8 {
        return Err(Error::InvalidInput("initial q1 is parallel to the tangent".into()));
    }
    let x = curve.samples();
    let n = x.len();
    let mut q1 = Vec::with_capacity(n);
    q1.push(q0.normalize());
    for i in 0..n - 1 {
        let next = double_reflection(&x[i], &t[i], &q1[i], &x[i + 1], &t[i + 1]);
        q1.push(next);
    }
    let q2: Vec<Vec3> = t.iter().zip(&q1).map(|(t, q)| t.cross(q)).collect();
    let holonomy_angle = curve.is_closed().then(|| {
        let end = double_reflection(&x[n - 1], &t[n - 1], &q1[n - 1], &x[0], &t[0]);
        let end2 = t[0].cross(&end);
        wrap_angle(q1[0].dot(&end2).atan2(q1[0].dot(&end)))
    });
    Ok(MovingFrame { curve: curve.clone(), t, q1, q2, holonomy_angle })
}

impl MovingFrame {
    /// Assembles a frame from precomputed fields.
    pub fn from_parts(curve: SampledCurve3, t: Vec<Vec3>, q1: Vec<Vec3>, holonomy_angle: Option<f64>) -> Result<Self> {
        if t.len() != curve.len() || q1.len() != curve.len() {
            return Err(Error::InvalidInput("frame field length mismatch".into()));
        }
        let q2 = t.iter().zip(&q1).map(|(t, q)| t.cross(q)).collect();
        Ok(Self { curve, t, q1, q2, holonomy_angle })
    }

    pub fn curve(&self) -> &SampledCurve3 {
        &self.curve
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Largest deviation from an orthonormal right-handed frame.
    pub fn orthonormality_error(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let (t, a, b) = (&self.t[i], &self.q1[i], &self.q2[i]);
                [
                    (t.norm() - 1.0).abs(),
                    (a.norm() - 1.0).abs(),
                    (b.norm() - 1.0).abs(),
                    t.dot(a).abs(),
                    t.dot(b).abs(),
                    a.dot(b).abs(),
                    (t.cross(a) - b).norm(),
                ]
                .into_iter()
                .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `(q1, q2)` at an extended sample index; indices past the period are
    /// rotated by the accumulated transport `-holonomy` per loop.
    fn extended(&self, j: isize) -> (Vec3, Vec3) {
        let n = self.len() as isize;
        let k = j.div_euclid(n);
        let r = j.rem_euclid(n) as usize;
        let psi = -self.holonomy_angle.unwrap_or(0.0) * k as f64;
        let (s, c) = psi.sin_cos();
        (self.q1[r] * c + self.q2[r] * s, self.q2[r] * c - self.q1[r] * s)
    }

    /// `q1' . q2` per unit arc length at every sample, from degree-6 stencils.
    pub fn twist_rate(&self) -> Vec<f64> {
        let grid = self.curve.grid();
        let speeds: Vec<f64> = self.curve.jets().iter().map(|j| j.d1.norm()).collect();
        (0..self.len())
            .map(|i| {
                let window = grid.centered_window(i, DERIV_WIDTH);
                let xs: Vec<f64> = window.iter().map(|&j| grid.param_at(j)).collect();
                let w = fd_weights(self.curve.params()[i], &xs, 1);
                let mut d = Vec3::zeros();
                for (&j, wj) in window.iter().zip(&w) {
                    d += self.extended(j).0 * wj[1];
                }
                d.dot(&self.q2[i]) / speeds[i]
            })
            .collect()
    }

    /// Angle `phi` with `q1[j] = cos(phi) q1[i] + sin(phi) q2[i]`, valid when
    /// the tangents at `i` and `j` agree.
    pub fn relative_angle(&self, i: usize, j: usize) -> f64 {
        self.q2[i].dot(&self.q1[j]).atan2(self.q1[i].dot(&self.q1[j]))
    }

    /// Frame rotated by a constant angle in the normal planes.
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let q1: Vec<Vec3> = self.q1.iter().zip(&self.q2).map(|(a, b)| a * c + b * s).collect();
        let q2 = self.t.iter().zip(&q1).map(|(t, q)| t.cross(q)).collect();
        Self { curve: self.curve.clone(), t: self.t.clone(), q1, q2, holonomy_angle: self.holonomy_angle }
    }
}

/// Holonomy of the frame around its closed curve, in `(-pi, pi]`.
pub fn frame_holonomy(frame: &MovingFrame) -> Result<f64> {
    frame.holonomy_angle.ok_or(Error::OpenCurve)
}

/// Outcome of the Monge-cylinder spine test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderReport {
    pub is_cylinder: bool,
    pub total_torsion: f64,
    pub binormal_length: f64,
    pub holonomy: f64,
    /// `(k, n)` with `T / 2pi ~ k / n`, `n <= 24`.
    pub rational: Option<(i64, i64)>,
}

/// Tests whether a closed curve carries a closed rotation-minimizing frame.
pub fn is_monge_cylinder_spine(curve: &SampledCurve3, tol: f64) -> Result<CylinderReport> {
    if !curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    let total = total_torsion(curve)?;
    let length = binormal_trace_length(curve)?;
    let frame = rotation_minimizing_frame(curve, &any_normal(&unit_tangents(curve)?[0]))?;
    let holonomy = frame_holonomy(&frame)?;
    Ok(CylinderReport {
        is_cylinder: holonomy.abs() < tol,
        total_torsion: total,
        binormal_length: length,
        holonomy,
        rational: rational_approx(total / (2.0 * std::f64::consts::PI), MAX_DENOMINATOR, tol),
    })
}

/// Some unit vector orthogonal to `t`.
pub fn any_normal(t: &Vec3) -> Vec3 {
    let axis = if t.x.abs() < 0.6 {
        Vec3::x()
    } else if t.y.abs() < 0.6 {
        Vec3::y()
    } else {
        Vec3::z()
    };
    (axis - t * t.dot(&axis)).normalize()
}
