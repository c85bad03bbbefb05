//! Closed spine curves with prescribed binormal image.
//!
//! For a regular closed curve `b` on the unit sphere and a positive function
//! `sigma`, the curve `r = int sigma b' x b dt` has binormal `b` and torsion
//! `1 / sigma`. Closing `r` is a linear condition on `sigma`; among the
//! closing `sigma` we minimize the elastic energy.

mod optimize;

use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::curve::{normalize_jet, Jet3, SampledCurve3, Vec3};
use crate::numeric::gauss_legendre;
use crate::{Error, Result};

pub use optimize::{synthesize, synthesize_in, SynthesisDiagnostics, SynthesisResult};

/// Default number of quadrature intervals over one period.
pub const DEFAULT_QUAD_INTERVALS: usize = 512;
/// Default number of spine samples in a synthesis result.
pub const DEFAULT_SPINE_SAMPLES: usize = 1024;

const UNIT_TOL: f64 = 1e-9;
const RENORMALIZE_TOL: f64 = 1e-6;
const REGULAR_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Binormal curves

/// Trigonometric interpolant of uniformly sampled periodic data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCurve {
    t0: f64,
    omega: f64,
    mean: Vec3,
    cos: Vec<Vec3>,
    sin: Vec<Vec3>,
}

impl FourierCurve {
    /// Interpolant of `samples[j]` at `t0 + j period / N`.
    pub fn new(samples: &[Vec3], t0: f64, period: f64) -> Result<Self> {
        let n = samples.len();
        if n < 8 {
            return Err(Error::InvalidInput("need at least 8 samples for a Fourier interpolant".into()));
        }
        let fft = FftPlanner::new().plan_fft_forward(n);
        let mut spectra = Vec::with_capacity(3);
        for c in 0..3 {
            let mut buf: Vec<Complex<f64>> = samples.iter().map(|p| Complex::new(p[c], 0.0)).collect();
            fft.process(&mut buf);
            spectra.push(buf);
        }
        let coef = |k: usize| -> [Complex<f64>; 3] { [spectra[0][k], spectra[1][k], spectra[2][k]] };
        let inv_n = 1.0 / n as f64;
        let c0 = coef(0);
        let mean = Vec3::new(c0[0].re, c0[1].re, c0[2].re) * inv_n;
        let kmax = n / 2;
        let mut cos = Vec::with_capacity(kmax);
        let mut sin = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            let c = coef(k);
            // the Nyquist mode of an even-length signal is shared by +k and -k
            let f = if 2 * k == n { inv_n } else { 2.0 * inv_n };
            cos.push(Vec3::new(c[0].re, c[1].re, c[2].re) * f);
            sin.push(Vec3::new(-c[0].im, -c[1].im, -c[2].im) * f);
        }
        Ok(FourierCurve { t0, omega: 2.0 * PI / period, mean, cos, sin })
    }

    pub fn eval(&self, t: f64) -> [Vec3; 4] {
        let x = self.omega * (t - self.t0);
        let (s1, c1) = x.sin_cos();
        let (mut s, mut c) = (0.0f64, 1.0f64);
        let mut out = [self.mean, Vec3::zeros(), Vec3::zeros(), Vec3::zeros()];
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            // advance (c, s) = (cos kx, sin kx) by angle addition
            let cn = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = cn;
            let w = self.omega * (k + 1) as f64;
            let v = a * c + b * s;
            let d = (b * c - a * s) * w;
            out[0] += v;
            out[1] += d;
            out[2] -= v * (w * w);
            out[3] -= d * (w * w);
        }
        out
    }
}

/// Shape of a binormal curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BinormalShape {
    /// `normalize(eps (cos t + a cos mt), eps (sin t - a sin mt), 1)`, a cap
    /// about the north pole with `m + 1`-fold symmetry; `eps` scales its
    /// size and hence `L_S`.
    Trochoid { a: f64, m: u32, eps: f64 },
    /// `(cos t, sin t, 0)`.
    GreatCircle,
    /// Interpolated samples.
    Sampled(FourierCurve),
}

impl BinormalShape {
    fn eval(&self, t: f64) -> [Vec3; 4] {
        match self {
            BinormalShape::Trochoid { a, m, eps } => {
                let m = *m as f64;
                let (s1, c1) = t.sin_cos();
                let (sm, cm) = (m * t).sin_cos();
                let (a1, a2, a3) = (a * m, a * m * m, a * m * m * m);
                let w = [
                    Vec3::new(eps * (c1 + a * cm), eps * (s1 - a * sm), 1.0),
                    Vec3::new(eps * (-s1 - a1 * sm), eps * (c1 - a1 * cm), 0.0),
                    Vec3::new(eps * (-c1 - a2 * cm), eps * (-s1 + a2 * sm), 0.0),
                    Vec3::new(eps * (s1 + a3 * sm), eps * (-c1 + a3 * cm), 0.0),
                ];
                normalize_jet(w)
            }
            BinormalShape::GreatCircle => {
                let (s, c) = t.sin_cos();
                [Vec3::new(c, s, 0.0), Vec3::new(-s, c, 0.0), Vec3::new(-c, -s, 0.0), Vec3::new(s, -c, 0.0)]
            }
            BinormalShape::Sampled(f) => f.eval(t),
        }
    }
}

/// A regular closed curve on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct BinormalCurve {
    shape: BinormalShape,
    period: f64,
    length: f64,
}

impl BinormalCurve {
    pub fn new(shape: BinormalShape, period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
        }
        let mut b = BinormalCurve { shape, period, length: 0.0 };
        let n = 512;
        for j in 0..n {
            let t = period * j as f64 / n as f64;
            let [p, d, ..] = b.eval(t);
            if (p.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidInput(format!("binormal leaves the unit sphere at t = {t}")));
            }
            if d.norm() <= REGULAR_TOL {
                return Err(Error::DegenerateTangent { index: j });
            }
        }
        b.length = b.quadrature(DEFAULT_QUAD_INTERVALS).iter().map(|q| q.w * q.jet[1].norm()).sum();
        Ok(b)
    }

    pub fn trochoid(a: f64, m: u32, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || m == 0 {
            return Err(Error::InvalidInput("trochoid needs eps > 0 and m >= 1".into()));
        }
        Self::new(BinormalShape::Trochoid { a, m, eps }, 2.0 * PI)
    }

    pub fn great_circle() -> Self {
        Self::new(BinormalShape::GreatCircle, 2.0 * PI).expect("great circle is regular")
    }

    /// Interpolates a closed sampled curve. Samples within `1e-6` of the
    /// sphere are projected onto it; non-uniform samples are first
    /// resampled by arc length.
    pub fn from_curve(curve: &SampledCurve3) -> Result<Self> {
        let period = curve.period().ok_or(Error::OpenCurve)?;
        let params = curve.params();
        let n = params.len();
        let h = period / n as f64;
        let uniform = params.iter().enumerate().all(|(j, &t)| (t - params[0] - j as f64 * h).abs() <= 1e-9 * period);
        let resampled;
        let c = if uniform {
            curve
        } else {
            resampled = curve.reparameterize_arclength(n.max(64))?;
            &resampled
        };
        let mut samples = Vec::with_capacity(c.len());
        for p in c.samples() {
            let r = p.norm();
            if (r - 1.0).abs() > RENORMALIZE_TOL {
                return Err(Error::InvalidInput(format!("binormal sample off the unit sphere (|b| = {r})")));
            }
            samples.push(p / r);
        }
        let fourier = FourierCurve::new(&samples, c.params()[0], c.period().unwrap())?;
        Self::new(BinormalShape::Sampled(fourier), c.period().unwrap())
    }

    /// Same shape with another trochoid size.
    pub fn with_scale(&self, eps: f64) -> Result<Self> {
        match self.shape {
            BinormalShape::Trochoid { a, m, .. } => Self::trochoid(a, m, eps),
            _ => Err(Error::InvalidInput("binormal has no scale parameter".into())),
        }
    }

    /// Trochoid whose spherical length equals `target`, found by bisection
    /// on its size within `1e-12`.
    pub fn scaled_to_length(&self, target: f64) -> Result<Self> {
        let BinormalShape::Trochoid { a, m, eps } = self.shape else {
            return Err(Error::InvalidInput("binormal has no scale parameter".into()));
        };
        if !(target > 0.0) {
            return Err(Error::InvalidInput(format!("torsion target must be positive, got {target}")));
        }
        let len = |e: f64| Self::trochoid(a, m, e).map(|b| b.length);
        let (mut lo, mut hi) = (eps, eps);
        for _ in 0..200 {
            if len(lo)? <= target {
                break;
            }
            lo *= 0.5;
        }
        for _ in 0..200 {
            if len(hi)? >= target {
                break;
            }
            hi *= 2.0;
        }
        if len(lo)? > target || len(hi)? < target {
            return Err(Error::Infeasible(format!("no trochoid size reaches L_S = {target}")));
        }
        let mut best = Self::trochoid(a, m, hi)?;
        for _ in 0..200 {
            if (best.length - target).abs() < 1e-12 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            best = Self::trochoid(a, m, mid)?;
            if best.length < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(best)
    }

    pub fn shape(&self) -> &BinormalShape {
        &self.shape
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Spherical length `L_S`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// `b` and its first three derivatives.
    pub fn eval(&self, t: f64) -> [Vec3; 4] {
        self.shape.eval(t)
    }

    /// `n` uniform samples with exact jets.
    pub fn sampled(&self, n: usize) -> Result<SampledCurve3> {
        SampledCurve3::from_analytic(0.0, self.period, n, true, |t| self.eval(t))
    }

    fn quadrature(&self, intervals: usize) -> Vec<Node> {
        quadrature_nodes(self, intervals)
    }
}

/// Quadrature node with the binormal jet.
#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub t: f64,
    pub w: f64,
    pub jet: [Vec3; 4],
}

impl Node {
    /// `det(b, b', b'')^2 / |b'|^5`.
    pub fn weight(&self) -> f64 {
        let [b, d1, d2, _] = self.jet;
        let det = b.dot(&d1.cross(&d2));
        det * det / d1.norm().powi(5)
    }
}

/// Composite 4-point Gauss-Legendre nodes over `[0, P)`.
pub(crate) fn quadrature_nodes(b: &BinormalCurve, intervals: usize) -> Vec<Node> {
    let (xs, ws) = gauss_legendre(4);
    let h = b.period / intervals as f64;
    (0..intervals * 4)
        .into_par_iter()
        .map(|k| {
            let (i, g) = (k / 4, k % 4);
            let t = (i as f64 + 0.5 * (xs[g] + 1.0)) * h;
            Node { t, w: 0.5 * h * ws[g], jet: b.eval(t) }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Bases

/// A finite family of periodic scalar functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Basis {
    /// `1, cos(2 pi j t / P), sin(2 pi j t / P)` for `j = 1..=(n-1)/2`;
    /// `n` odd.
    Trig { n: usize },
    /// Periodic uniform B-splines of the given degree with `n` control
    /// points.
    Bspline { n: usize, degree: usize },
    /// `cos(2 pi f t / P)` for each listed frequency `f`.
    Cos { frequencies: Vec<u32> },
}

impl Default for Basis {
    fn default() -> Self {
        Basis::Trig { n: 11 }
    }
}

impl Basis {
    pub fn len(&self) -> usize {
        match self {
            Basis::Trig { n } | Basis::Bspline { n, .. } => *n,
            Basis::Cos { frequencies } => frequencies.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Basis::Trig { n } if *n == 0 || n % 2 == 0 => {
                Err(Error::InvalidInput(format!("trig basis needs an odd size, got {n}")))
            }
            Basis::Bspline { n, degree } if *degree == 0 || *degree > 5 || *n < degree + 1 => Err(Error::InvalidInput(
                format!("bspline basis needs 1 <= degree <= 5 and n > degree, got n = {n}, degree = {degree}"),
            )),
            Basis::Cos { frequencies } => {
                let mut f = frequencies.clone();
                f.sort_unstable();
                f.dedup();
                if f.is_empty() || f.len() != frequencies.len() {
                    return Err(Error::InvalidInput("cos basis needs distinct frequencies".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Intervals per period such that every quadrature interval lies within
    /// one polynomial piece.
    pub(crate) fn quad_intervals(&self, requested: usize) -> usize {
        match self {
            Basis::Bspline { n, .. } => n * requested.div_ceil(*n),
            _ => requested,
        }
    }

    /// Values and first two derivatives of every basis function at `t`.
    pub fn eval(&self, t: f64, period: f64) -> Vec<[f64; 3]> {
        let omega = 2.0 * PI / period;
        match self {
            Basis::Trig { n } => {
                let mut out = Vec::with_capacity(*n);
                out.push([1.0, 0.0, 0.0]);
                for j in 1..=(n - 1) / 2 {
                    let w = omega * j as f64;
                    let (s, c) = (w * t).sin_cos();
                    out.push([c, -w * s, -w * w * c]);
                    out.push([s, w * c, -w * w * s]);
                }
                out
            }
            Basis::Cos { frequencies } => frequencies
                .iter()
                .map(|&f| {
                    let w = omega * f as f64;
                    let (s, c) = (w * t).sin_cos();
                    [c, -w * s, -w * w * c]
                })
                .collect(),
            Basis::Bspline { n, degree } => {
                let h = period / *n as f64;
                let x = (t / h).rem_euclid(*n as f64);
                (0..*n)
                    .map(|k| {
                        let y = (x - k as f64).rem_euclid(*n as f64);
                        [
                            cardinal_bspline(*degree, y),
                            (cardinal_bspline(degree - 1, y) - cardinal_bspline(degree - 1, y - 1.0)) / h,
                            if *degree >= 2 {
                                (cardinal_bspline(degree - 2, y) - 2.0 * cardinal_bspline(degree - 2, y - 1.0)
                                    + cardinal_bspline(degree - 2, y - 2.0))
                                    / (h * h)
                            } else {
                                0.0
                            },
                        ]
                    })
                    .collect()
            }
        }
    }
}

/// Cardinal B-spline of degree `d` supported on `[0, d + 1]`.
fn cardinal_bspline(d: usize, x: f64) -> f64 {
    if x < 0.0 || x >= (d + 1) as f64 {
        return 0.0;
    }
    if d == 0 {
        return 1.0;
    }
    let df = d as f64;
    (x * cardinal_bspline(d - 1, x) + (df + 1.0 - x) * cardinal_bspline(d - 1, x - 1.0)) / df
}

/// Scalar field with two derivatives.
pub trait SigmaField: Sync {
    /// `sigma`, `sigma'`, `sigma''` at `t`.
    fn eval(&self, t: f64) -> [f64; 3];
}

impl<F: Fn(f64) -> [f64; 3] + Sync> SigmaField for F {
    fn eval(&self, t: f64) -> [f64; 3] {
        self(t)
    }
}

/// `sigma = sum c_i B_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisExpansion {
    pub basis: Basis,
    pub period: f64,
    pub coefficients: Vec<f64>,
}

impl SigmaField for BasisExpansion {
    fn eval(&self, t: f64) -> [f64; 3] {
        let mut s = [0.0; 3];
        for (c, b) in self.coefficients.iter().zip(self.basis.eval(t, self.period)) {
            for k in 0..3 {
                s[k] += c * b[k];
            }
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Problem

/// Data for [`synthesize`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpineSynthesisProblem {
    pub binormal: BinormalCurve,
    pub basis: Basis,
    /// Length of the synthesized spine.
    pub length_target: f64,
    /// Lower bound for `sigma`; defaults to `1e-3 length_target / L_S`.
    pub sigma_min: Option<f64>,
    pub quad_intervals: usize,
    pub spine_samples: usize,
}

impl SpineSynthesisProblem {
    pub fn new(binormal: BinormalCurve, basis: Basis, length_target: f64) -> Self {
        SpineSynthesisProblem {
            binormal,
            basis,
            length_target,
            sigma_min: None,
            quad_intervals: DEFAULT_QUAD_INTERVALS,
            spine_samples: DEFAULT_SPINE_SAMPLES,
        }
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min.unwrap_or(1e-3 * self.length_target / self.binormal.length())
    }

    pub fn validate(&self) -> Result<()> {
        self.basis.validate()?;
        if !(self.length_target > 0.0 && self.length_target.is_finite()) {
            return Err(Error::InvalidInput(format!("length target must be positive, got {}", self.length_target)));
        }
        if !(self.sigma_min() > 0.0) {
            return Err(Error::InvalidInput("sigma_min must be positive".into()));
        }
        if self.quad_intervals < 8 || self.spine_samples < 16 {
            return Err(Error::InvalidInput("too few quadrature intervals or spine samples".into()));
        }
        Ok(())
    }
}

/// Quadrature data shared by the closing vectors, the energy and the
/// optimizer.
pub(crate) struct Discretization {
    pub nodes: Vec<Node>,
    /// Basis values `B_i(t_q)`, one row per node.
    pub basis: Vec<Vec<f64>>,
}

impl Discretization {
    pub fn new(problem: &SpineSynthesisProblem) -> Self {
        let intervals = problem.basis.quad_intervals(problem.quad_intervals);
        let nodes = problem.binormal.quadrature(intervals);
        let period = problem.binormal.period();
        let basis = nodes.par_iter().map(|q| problem.basis.eval(q.t, period).iter().map(|v| v[0]).collect()).collect();
        Discretization { nodes, basis }
    }

    pub fn closing_vectors(&self, n: usize) -> Vec<Vec3> {
        (0..n)
            .into_par_iter()
            .map(|i| {
                self.nodes.iter().zip(&self.basis).map(|(q, row)| q.jet[0].cross(&q.jet[1]) * (q.w * row[i])).sum()
            })
            .collect()
    }

    /// `int B_i |b'| dt`.
    pub fn length_row(&self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |i, _| {
            self.nodes.iter().zip(&self.basis).map(|(q, row)| q.w * row[i] * q.jet[1].norm()).sum()
        })
    }
}

/// `a_i = int B_i b x b' dt`; closing reads `sum c_i a_i = 0`.
pub fn closing_vectors(problem: &SpineSynthesisProblem) -> Vec<Vec3> {
    Discretization::new(problem).closing_vectors(problem.basis.len())
}

// ---------------------------------------------------------------------------
// Reconstruction and energy

/// Spine rebuilt from a binormal and `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// Closed with the binormal's period when `|r(P) - r(0)|` is below
    /// `1e-6` times the length, open over `[0, P]` otherwise.
    pub curve: SampledCurve3,
    pub closing_residual: f64,
    pub length: f64,
}

/// Integrates `r' = sigma b' x b` from `r(0) = 0` at `n` uniform samples.
pub fn reconstruct_spine(binormal: &BinormalCurve, sigma: &impl SigmaField, n: usize) -> Result<Reconstruction> {
    if n < 4 {
        return Err(Error::InvalidInput("need at least 4 spine samples".into()));
    }
    let period = binormal.period();
    let h = period / n as f64;
    let (xs, ws) = gauss_legendre(8);
    let sub = 2;
    // increments of r and of arc length over each sample interval
    let steps: Vec<Result<(Vec3, f64)>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut dr = Vec3::zeros();
            let mut ds = 0.0;
            let hs = h / sub as f64;
            for k in 0..sub {
                let a = j as f64 * h + k as f64 * hs;
                for (x, w) in xs.iter().zip(ws) {
                    let t = a + 0.5 * (x + 1.0) * hs;
                    let s = sigma.eval(t)[0];
                    if !(s > 0.0) {
                        return Err(Error::NonPositiveSigma { index: j, value: s });
                    }
                    let [b, d1, ..] = binormal.eval(t);
                    dr += d1.cross(&b) * (s * 0.5 * hs * w);
                    ds += s * d1.norm() * 0.5 * hs * w;
                }
            }
            Ok((dr, ds))
        })
        .collect();
    let mut points = Vec::with_capacity(n + 1);
    let mut r = Vec3::zeros();
    let mut length = 0.0;
    points.push(r);
    for step in steps {
        let (dr, ds) = step?;
        r += dr;
        length += ds;
        points.push(r);
    }
    let residual = (points[n] - points[0]).norm();
    let mut jets = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let t = j as f64 * h;
        let [s, s1, s2] = sigma.eval(t);
        if !(s > 0.0) {
            return Err(Error::NonPositiveSigma { index: j, value: s });
        }
        let [b, d1, d2, d3] = binormal.eval(t);
        let c1 = d1.cross(&b);
        let c2 = d2.cross(&b);
        let c3 = d3.cross(&b) + d2.cross(&d1);
        jets.push(Jet3 { d1: c1 * s, d2: c1 * s1 + c2 * s, d3: c1 * s2 + c2 * (2.0 * s1) + c3 * s });
    }
    let closed = residual < 1e-6 * length;
    let curve = if closed {
        points.pop();
        jets.pop();
        let params = (0..n).map(|j| j as f64 * h).collect();
        SampledCurve3::new(points, params, Some(period))?.with_jets(jets)?
    } else {
        let params = (0..=n).map(|j| j as f64 * h).collect();
        SampledCurve3::new(points, params, None)?.with_jets(jets)?
    };
    Ok(Reconstruction { curve, closing_residual: residual, length })
}

/// `E = int det(b, b', b'')^2 / (sigma |b'|^5) dt`, the integral of squared
/// curvature over arc length of the reconstructed spine.
pub fn elastic_energy(binormal: &BinormalCurve, sigma: &impl SigmaField, intervals: usize) -> Result<f64> {
    let nodes = binormal.quadrature(intervals);
    let mut e = 0.0;
    for (index, q) in nodes.iter().enumerate() {
        let s = sigma.eval(q.t)[0];
        if !(s > 0.0) {
            return Err(Error::NonPositiveSigma { index, value: s });
        }
        e += q.w * q.weight() / s;
    }
    Ok(e)
}

/// `int kappa^2 ds` measured directly on a sampled curve.
pub fn curvature_energy(curve: &SampledCurve3) -> Result<f64> {
    let fd = crate::curve::frenet_data(curve)?;
    let w = crate::curve::quadrature_weights(curve.params(), curve.period());
    Ok(fd.curvature.iter().zip(&fd.speed).zip(&w).map(|((k, s), w)| k * k * s * w).sum())
}

/// Fraction of a 64 x 128 sphere grid covered by the tangent great circles
/// of `b`. Full coverage is necessary for `b` to be the binormal of a
/// closed curve.
pub fn fenchel_coverage(binormal: &BinormalCurve) -> f64 {
    let nt = 1024;
    let poles: Vec<Vec3> = (0..nt)
        .map(|j| {
            let [b, d1, ..] = binormal.eval(binormal.period() * j as f64 / nt as f64);
            b.cross(&d1).normalize()
        })
        .collect();
    let (nth, nph) = (64, 128);
    let covered: usize = (0..nth)
        .into_par_iter()
        .map(|i| {
            let th = PI * (i as f64 + 0.5) / nth as f64;
            (0..nph)
                .filter(|&k| {
                    let ph = 2.0 * PI * (k as f64 + 0.5) / nph as f64;
                    let x = Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for p in &poles {
                        let d = x.dot(p);
                        lo = lo.min(d);
                        hi = hi.max(d);
                    }
                    lo <= 0.0 && hi >= 0.0
                })
                .count()
        })
        .sum();
    covered as f64 / (nth * nph) as f64
}

#[cfg(test)]
mod tests;
