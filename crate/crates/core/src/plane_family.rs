//! Orthogonal families of planes `Pi(v) = p(v) + span(q1(v), q2(v))` with unit
//! normal `t(v)`, described by
//!
//! ```text
//! p' = lambda t,   t' = kappa1 q1 + kappa2 q2,   q_i' = -kappa_i t.
//! ```
//!
//! Frames may be right- or left-handed; the handedness is fixed along the
//! family. A closed family of period `P` returns after one period with its
//! in-plane basis turned by the angle `psi`:
//! `q1(v+P) = cos(psi) q1(v) + sin(psi) q2(v)`.

use nalgebra::{Matrix3, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::curve::{eval_interp, scale_of, total_torsion, SampledCurve3, Vec3};
use crate::error::{Error, Result};
use crate::frames::{any_normal, rotation_minimizing_frame, unit_tangents};
use crate::numeric::{fd_weights, wrap_angle, ParamGrid, DERIV_WIDTH, INTERP_WIDTH};

/// Frame of one plane of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSample {
    pub p: Vec3,
    pub t: Vec3,
    pub q1: Vec3,
    pub q2: Vec3,
}

impl FrameSample {
    /// `+1` when `q1 x q2 = t`, `-1` for a left-handed frame.
    pub fn handedness(&self) -> f64 {
        self.q1.cross(&self.q2).dot(&self.t).signum()
    }

    fn axes(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.t, self.q1, self.q2])
    }

    /// Basis rotated by `phi` in the plane.
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { p: self.p, t: self.t, q1: self.q1 * c + self.q2 * s, q2: self.q2 * c - self.q1 * s }
    }

    /// Point with plane coordinates `(x, y)`.
    pub fn point(&self, x: f64, y: f64) -> Vec3 {
        self.p + self.q1 * x + self.q2 * y
    }
}

/// Coefficients `(kappa1, kappa2, lambda)` at one parameter.
pub type Coefficients = Vector3<f64>;

/// The instantaneous axis `kappa1 x + kappa2 y = lambda` in plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Axis {
    /// Normalised so `kappa1^2 + kappa2^2 = 1` and `lambda >= 0`.
    Line { kappa1: f64, kappa2: f64, lambda: f64 },
    /// Pure translation: no axis.
    Empty,
    /// All coefficients vanish: every point is stationary.
    Everything,
}

impl Axis {
    /// Signed distance of `(x, y)` from the line (`None` without a line).
    pub fn signed_distance(&self, x: f64, y: f64) -> Option<f64> {
        match self {
            Axis::Line { kappa1, kappa2, lambda } => Some(kappa1 * x + kappa2 * y - lambda),
            _ => None,
        }
    }
}

/// Result of the regularity test on the coefficient samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub first_violation: Option<usize>,
}

/// Sampled orthogonal plane family.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneFamily {
    params: Vec<f64>,
    period: Option<f64>,
    frames: Vec<FrameSample>,
    coeffs: Vec<Coefficients>,
    /// Basis rotation after one period (closed families only).
    psi: f64,
    handedness: f64,
    total_torsion: Option<f64>,
}

impl PlaneFamily {
    /// Builds a family from sampled frames and coefficients. `psi` is the
    /// basis rotation after one period and is ignored for open families.
    pub fn from_samples(
        params: Vec<f64>,
        period: Option<f64>,
        frames: Vec<FrameSample>,
        coeffs: Vec<Coefficients>,
        psi: f64,
    ) -> Result<Self> {
        let n = params.len();
        if frames.len() != n || coeffs.len() != n {
            return Err(Error::InvalidInput("family field lengths differ".into()));
        }
        if n < 2 || params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("family params must be strictly increasing".into()));
        }
        if let Some(p) = period {
            if n < 8 || !(p > 0.0) || params[n - 1] >= params[0] + p {
                return Err(Error::InvalidInput("invalid family period".into()));
            }
        }
        let handedness = frames[0].handedness();
        for (i, f) in frames.iter().enumerate() {
            let g = f.axes();
            if (g.transpose() * g - Matrix3::identity()).abs().max() > 1e-8 || f.handedness() != handedness {
                return Err(Error::InvalidInput(format!("frame {i} is not orthonormal with fixed handedness")));
            }
        }
        if coeffs.iter().any(|c| c.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self {
            params,
            period,
            frames,
            coeffs,
            psi: if period.is_some() { wrap_angle(psi) } else { 0.0 },
            handedness,
            total_torsion: None,
        })
    }

    /// Family of normal planes of a spine with a rotation-minimizing basis.
    /// Constant-speed spines are rescaled to unit speed (`lambda = 1`);
    /// otherwise the spine parameter is kept and `lambda = |r'|`.
    pub fn from_spine(curve: &SampledCurve3) -> Result<Self> {
        let curve = constant_speed_to_unit(curve)?;
        let tangents = unit_tangents(&curve)?;
        let frame = rotation_minimizing_frame(&curve, &any_normal(&tangents[0]))?;
        let jets = curve.jets();
        let frames: Vec<FrameSample> = (0..curve.len())
            .map(|i| FrameSample { p: curve.samples()[i], t: frame.t[i], q1: frame.q1[i], q2: frame.q2[i] })
            .collect();
        let coeffs = jets
            .iter()
            .zip(&frames)
            .map(|(j, f)| {
                let speed = j.d1.norm();
                let dt = (j.d2 - f.t * f.t.dot(&j.d2)) / speed;
                Coefficients::new(dt.dot(&f.q1), dt.dot(&f.q2), speed)
            })
            .collect();
        let psi = frame.holonomy_angle.map_or(0.0, |h| -h);
        let mut family = Self::from_samples(curve.params().to_vec(), curve.period(), frames, coeffs, psi)?;
        if curve.is_closed() {
            family.total_torsion = total_torsion(&curve).ok();
        }
        Ok(family)
    }

    /// Integrates the frame equations for sampled coefficient fields.
    /// With `period = Some(P)` the coefficients are taken as `P`-periodic and
    /// the family is closed only if the frame returns to itself after one
    /// period; otherwise it is returned as an open family over `[v0, v0+P]`
    /// sampled at `params`.
    pub fn from_coefficients(
        params: &[f64],
        period: Option<f64>,
        kappa1: &[f64],
        kappa2: &[f64],
        lambda: &[f64],
        initial: FrameSample,
    ) -> Result<Self> {
        let n = params.len();
        if kappa1.len() != n || kappa2.len() != n || lambda.len() != n {
            return Err(Error::InvalidInput("coefficient field lengths differ".into()));
        }
        let data: Vec<SVector<f64, 3>> = (0..n).map(|i| Coefficients::new(kappa1[i], kappa2[i], lambda[i])).collect();
        let grid_params = params.to_vec();
        let f = move |v: f64| eval_interp(&data, &ParamGrid::new(&grid_params, period), v, 0)[0];
        Self::from_coefficient_fn(params, period, f, initial)
    }

    /// As [`PlaneFamily::from_coefficients`] with coefficients given as a function.
    pub fn from_coefficient_fn(
        params: &[f64],
        period: Option<f64>,
        coeff: impl Fn(f64) -> Coefficients,
        initial: FrameSample,
    ) -> Result<Self> {
        let n = params.len();
        if n < 2 {
            return Err(Error::InvalidInput("family needs at least two samples".into()));
        }
        let mut state = orthonormalize(initial);
        if (state.axes() - initial.axes()).abs().max() > 1e-6 {
            return Err(Error::InvalidInput("initial frame is not orthonormal".into()));
        }
        let mut frames = Vec::with_capacity(n);
        frames.push(state);
        let mut knots: Vec<f64> = params.to_vec();
        if let Some(p) = period {
            knots.push(params[0] + p);
        }
        for w in knots.windows(2) {
            state = integrate_interval(state, w[0], w[1], &coeff)?;
            frames.push(state);
        }
        let mut closed = false;
        if period.is_some() {
            let end = frames.pop().unwrap();
            let start = frames[0];
            let scale = scale_of(&frames.iter().map(|f| f.p).collect::<Vec<_>>()).max(1.0);
            closed = (end.p - start.p).norm() <= 1e-7 * scale && (end.axes() - start.axes()).abs().max() <= 1e-7;
            if !closed {
                frames.push(end);
            }
        }
        let (params_out, period_out) = if closed { (params.to_vec(), period) } else { (knots, None) };
        let coeffs = params_out.iter().map(|&v| coeff(v)).collect();
        Self::from_samples(params_out, period_out, frames, coeffs, 0.0)
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn is_closed(&self) -> bool {
        self.period.is_some()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn frames(&self) -> &[FrameSample] {
        &self.frames
    }

    pub fn coefficients(&self) -> &[Coefficients] {
        &self.coeffs
    }

    pub fn kappa1(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.x).collect()
    }

    pub fn kappa2(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.y).collect()
    }

    pub fn lambda(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.z).collect()
    }

    /// Rotation of the in-plane basis after one period.
    pub fn monodromy_angle(&self) -> f64 {
        self.psi
    }

    pub fn handedness(&self) -> f64 {
        self.handedness
    }

    /// Total torsion of the spine, when the family was built from one.
    pub fn total_torsion(&self) -> Option<f64> {
        self.total_torsion
    }

    pub fn with_total_torsion(mut self, total: Option<f64>) -> Self {
        self.total_torsion = total;
        self
    }

    /// Parameter interval covered by the samples (one period when closed).
    pub fn domain(&self) -> (f64, f64) {
        match self.period {
            Some(p) => (self.params[0], self.params[0] + p),
            None => (self.params[0], self.params[self.len() - 1]),
        }
    }

    /// Typical length scale: bounding-box diagonal of the base points.
    pub fn scale(&self) -> f64 {
        scale_of(&self.frames.iter().map(|f| f.p).collect::<Vec<_>>())
    }

    fn grid(&self) -> ParamGrid<'_> {
        ParamGrid::new(&self.params, self.period)
    }

    /// Frame at an extended sample index.
    fn frame_ext(&self, j: isize) -> FrameSample {
        let (k, r) = self.grid().split(j);
        if k == 0 {
            self.frames[r]
        } else {
            self.frames[r].rotated(self.psi * k as f64)
        }
    }

    fn coeff_ext(&self, j: isize) -> Coefficients {
        let (k, r) = self.grid().split(j);
        rotate_coefficients(&self.coeffs[r], self.psi * k as f64)
    }

    /// Interpolated frame at parameter `v`; beyond the period the basis
    /// continues with the monodromy rotation.
    pub fn frame_at(&self, v: f64) -> FrameSample {
        let grid = self.grid();
        let k = grid.locate(v);
        let window = grid.interp_window(k, INTERP_WIDTH);
        let xs: Vec<f64> = window.iter().map(|&j| grid.param_at(j)).collect();
        let w = fd_weights(v, &xs, 0);
        let mut acc = FrameSample { p: Vec3::zeros(), t: Vec3::zeros(), q1: Vec3::zeros(), q2: Vec3::zeros() };
        for (&j, wj) in window.iter().zip(&w) {
            let f = self.frame_ext(j);
            acc.p += f.p * wj[0];
            acc.t += f.t * wj[0];
            acc.q1 += f.q1 * wj[0];
            acc.q2 += f.q2 * wj[0];
        }
        let t = acc.t.normalize();
        let q1 = (acc.q1 - t * t.dot(&acc.q1)).normalize();
        FrameSample { p: acc.p, t, q1, q2: t.cross(&q1) * self.handedness }
    }

    /// Interpolated `(kappa1, kappa2, lambda)` at `v`.
    pub fn coefficients_at(&self, v: f64) -> Coefficients {
        let grid = self.grid();
        let k = grid.locate(v);
        let window = grid.interp_window(k, INTERP_WIDTH);
        let xs: Vec<f64> = window.iter().map(|&j| grid.param_at(j)).collect();
        let w = fd_weights(v, &xs, 0);
        window.iter().zip(&w).map(|(&j, wj)| self.coeff_ext(j) * wj[0]).sum()
    }

    /// Coefficients recovered from the sampled frames by degree-6 stencils,
    /// together with the largest off-normal derivative component of `p`,
    /// `q1`, `q2` (the orthogonality residual, relative to the family scale).
    pub fn numerical_coefficients(&self) -> (Vec<Coefficients>, f64) {
        let grid = self.grid();
        let scale = self.scale().max(1e-300);
        let mut worst: f64 = 0.0;
        let coeffs = (0..self.len())
            .map(|i| {
                let window = grid.centered_window(i, DERIV_WIDTH);
                let xs: Vec<f64> = window.iter().map(|&j| grid.param_at(j)).collect();
                let w = fd_weights(self.params[i], &xs, 1);
                let mut d = [Vec3::zeros(); 4];
                for (&j, wj) in window.iter().zip(&w) {
                    let f = self.frame_ext(j);
                    d[0] += f.p * wj[1];
                    d[1] += f.t * wj[1];
                    d[2] += f.q1 * wj[1];
                    d[3] += f.q2 * wj[1];
                }
                let f = &self.frames[i];
                let lambda = d[0].dot(&f.t);
                worst = worst.max((d[0] - f.t * lambda).norm() / scale.max(lambda.abs()));
                for dq in &d[2..] {
                    worst = worst.max((dq - f.t * dq.dot(&f.t)).norm());
                }
                Coefficients::new(d[1].dot(&f.q1), d[1].dot(&f.q2), lambda)
            })
            .collect();
        (coeffs, worst)
    }

    /// Same planes with the basis turned by `phi`.
    pub fn rotated(&self, phi: f64) -> Self {
        Self {
            frames: self.frames.iter().map(|f| f.rotated(phi)).collect(),
            coeffs: self.coeffs.iter().map(|c| rotate_coefficients(c, phi)).collect(),
            ..self.clone()
        }
    }

    /// Same planes with base point moved to `p + a q1 + b q2`.
    pub fn shifted(&self, a: f64, b: f64) -> Result<Self> {
        if self.is_closed() && self.psi.abs() > 1e-12 && (a != 0.0 || b != 0.0) {
            return Err(Error::InvalidInput("a constant base-point shift does not close over a rotating basis".into()));
        }
        Ok(Self {
            frames: self.frames.iter().map(|f| FrameSample { p: f.point(a, b), ..*f }).collect(),
            coeffs: self.coeffs.iter().map(|c| Coefficients::new(c.x, c.y, c.z - a * c.x - b * c.y)).collect(),
            ..self.clone()
        })
    }
}

/// Coefficients seen from a basis turned by `phi`.
fn rotate_coefficients(c: &Coefficients, phi: f64) -> Coefficients {
    if phi == 0.0 {
        return *c;
    }
    let (s, co) = phi.sin_cos();
    Coefficients::new(co * c.x + s * c.y, co * c.y - s * c.x, c.z)
}

fn constant_speed_to_unit(curve: &SampledCurve3) -> Result<SampledCurve3> {
    let speeds: Vec<f64> = curve.jets().iter().map(|j| j.d1.norm()).collect();
    let s0 = speeds[0];
    if speeds.iter().all(|s| (s - 1.0).abs() < 1e-12) {
        return Ok(curve.clone());
    }
    if s0 > 0.0 && speeds.iter().all(|s| (s / s0 - 1.0).abs() < 1e-12) {
        // constant speed: rescale the parameter
        let params = curve.params().iter().map(|t| t * s0).collect();
        let jets = curve
            .jets()
            .iter()
            .map(|j| crate::curve::Jet3 { d1: j.d1 / s0, d2: j.d2 / (s0 * s0), d3: j.d3 / (s0 * s0 * s0) })
            .collect();
        return SampledCurve3::new(curve.samples().to_vec(), params, curve.period().map(|p| p * s0))?.with_jets(jets);
    }
    Ok(curve.clone())
}

fn orthonormalize(f: FrameSample) -> FrameSample {
    let svd = f.axes().svd(true, true);
    let q = svd.u.unwrap() * svd.v_t.unwrap();
    FrameSample { p: f.p, t: q.column(0).into(), q1: q.column(1).into(), q2: q.column(2).into() }
}

fn derivative(f: &FrameSample, c: &Coefficients) -> FrameSample {
    FrameSample { p: f.t * c.z, t: f.q1 * c.x + f.q2 * c.y, q1: -f.t * c.x, q2: -f.t * c.y }
}

fn axpy(f: &FrameSample, h: f64, d: &FrameSample) -> FrameSample {
    FrameSample { p: f.p + d.p * h, t: f.t + d.t * h, q1: f.q1 + d.q1 * h, q2: f.q2 + d.q2 * h }
}

const SUBSTEPS: usize = 4;

fn integrate_interval(mut f: FrameSample, a: f64, b: f64, coeff: &impl Fn(f64) -> Coefficients) -> Result<FrameSample> {
    let h = (b - a) / SUBSTEPS as f64;
    for s in 0..SUBSTEPS {
        let v = a + s as f64 * h;
        let c0 = coeff(v);
        let cm = coeff(v + 0.5 * h);
        let c1 = coeff(v + h);
        let k1 = derivative(&f, &c0);
        let k2 = derivative(&axpy(&f, 0.5 * h, &k1), &cm);
        let k3 = derivative(&axpy(&f, 0.5 * h, &k2), &cm);
        let k4 = derivative(&axpy(&f, h, &k3), &c1);
        let next = FrameSample {
            p: f.p + (k1.p + k2.p * 2.0 + k3.p * 2.0 + k4.p) * (h / 6.0),
            t: f.t + (k1.t + k2.t * 2.0 + k3.t * 2.0 + k4.t) * (h / 6.0),
            q1: f.q1 + (k1.q1 + k2.q1 * 2.0 + k3.q1 * 2.0 + k4.q1) * (h / 6.0),
            q2: f.q2 + (k1.q2 + k2.q2 * 2.0 + k3.q2 * 2.0 + k4.q2) * (h / 6.0),
        };
        if next.axes().iter().chain(next.p.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Integration(format!("non-finite frame at v = {v}")));
        }
        f = orthonormalize(next);
    }
    Ok(f)
}

/// Regularity: some coefficient is nonzero at every sample.
pub fn is_regular_family(family: &PlaneFamily) -> RegularityReport {
    let size = |c: &Coefficients| c.x.abs().max(c.y.abs()).max(c.z.abs());
    let scale = family.coeffs.iter().map(size).fold(0.0, f64::max);
    let tol = 1e-9 * scale;
    let first_violation = family.coeffs.iter().position(|c| size(c) <= tol);
    RegularityReport { regular: first_violation.is_none(), first_violation }
}

/// Instantaneous axis of rotation of the plane at parameter `v`.
pub fn instantaneous_axis(family: &PlaneFamily, v: f64) -> Axis {
    axis_from(&family.coefficients_at(v), 1e-12 * (1.0 + family.scale()))
}

/// Axis for given coefficients, treating magnitudes below `tol` as zero.
pub fn axis_from(c: &Coefficients, tol: f64) -> Axis {
    let k = c.x.hypot(c.y);
    if k <= tol {
        return if c.z.abs() <= tol { Axis::Everything } else { Axis::Empty };
    }
    let sign = if c.z < 0.0 { -1.0 } else { 1.0 };
    Axis::Line { kappa1: sign * c.x / k, kappa2: sign * c.y / k, lambda: sign * c.z / k }
}

/// The family of normal planes to the unit circle in the xy-plane whose base
/// point runs along the involute `p(v) = t(v) + v q1(v)`, with
/// `q1 = (cos v, sin v, 0)`, `q2 = (0, 0, 1)`, `t = (-sin v, cos v, 0)`,
/// `kappa1 = -1`, `kappa2 = 0`, `lambda = v`. The frame is left-handed.
pub fn involute_family(v0: f64, v1: f64, n: usize) -> Result<PlaneFamily> {
    let params: Vec<f64> = (0..n).map(|i| v0 + (v1 - v0) * i as f64 / (n - 1) as f64).collect();
    let frames = params.iter().map(|&v| involute_frame(v)).collect();
    let coeffs = params.iter().map(|&v| Coefficients::new(-1.0, 0.0, v)).collect();
    PlaneFamily::from_samples(params, None, frames, coeffs, 0.0)
}

/// Closed-form frame of [`involute_family`].
pub fn involute_frame(v: f64) -> FrameSample {
    let (s, c) = v.sin_cos();
    let t = Vec3::new(-s, c, 0.0);
    let q1 = Vec3::new(c, s, 0.0);
    FrameSample { p: t + q1 * v, t, q1, q2: Vec3::z() }
}
