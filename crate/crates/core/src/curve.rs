//! Sampled space and plane curves.
//!
//! A curve is stored as an ordered list of samples with matching parameter
//! values. Closed curves store exactly one period (no duplicated endpoint)
//! and are evaluated periodically. Derivatives come either from an exact
//! jet table (analytic constructors, spine reconstruction) or from local
//! polynomial stencils of degree 6 on the parameter grid.
//!
//! Torsion follows the sign convention `b' = tau n` with `n = b x t`. With
//! this convention a right-handed circular helix has *negative* torsion, and
//! a curve rebuilt from its binormal by `r' = sigma b' x b` has torsion
//! `1 / sigma`.

use nalgebra::{Matrix3, SVector, Vector2, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{fd_weights, gauss_legendre, ParamGrid, DERIV_WIDTH, INTERP_WIDTH};

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;

/// First three parameter derivatives of a space curve at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
}

/// Relative tolerance below which curvature counts as vanishing.
pub const INFLECTION_TOL: f64 = 1e-7;

// ---------------------------------------------------------------------------
// generic sampled-curve kernels

/// Local interpolating polynomial through a window of samples.
struct LocalPoly<const D: usize> {
    xs: Vec<f64>,
    vals: Vec<SVector<f64, D>>,
}

impl<const D: usize> LocalPoly<D> {
    fn new(samples: &[SVector<f64, D>], grid: &ParamGrid, window: &[isize]) -> Self {
        let xs = window.iter().map(|&j| grid.param_at(j)).collect();
        let vals = window.iter().map(|&j| samples[grid.split(j).1]).collect();
        Self { xs, vals }
    }

    fn eval(&self, t: f64, m: usize) -> [SVector<f64, D>; 4] {
        let w = fd_weights(t, &self.xs, m);
        let mut out = [SVector::<f64, D>::zeros(); 4];
        for (v, wj) in self.vals.iter().zip(&w) {
            for (o, slot) in out.iter_mut().enumerate().take(m + 1) {
                *slot += v * wj[o];
            }
        }
        out
    }

    fn speed(&self, t: f64) -> f64 {
        self.eval(t, 1)[1].norm()
    }

    /// Arc length over `[a, b]` by 8-point Gauss-Legendre.
    fn length(&self, a: f64, b: f64) -> f64 {
        let (x, w) = gauss_legendre(8);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        x.iter().zip(w).map(|(xi, wi)| wi * self.speed(mid + half * xi)).sum::<f64>() * half
    }
}

fn interval_poly<const D: usize>(samples: &[SVector<f64, D>], grid: &ParamGrid, k: isize) -> LocalPoly<D> {
    let window = grid.interp_window(k, INTERP_WIDTH);
    LocalPoly::new(samples, grid, &window)
}

/// Value and derivatives up to `m` of the local interpolant at `t`.
pub(crate) fn eval_interp<const D: usize>(
    samples: &[SVector<f64, D>],
    grid: &ParamGrid,
    t: f64,
    m: usize,
) -> [SVector<f64, D>; 4] {
    let k = grid.locate(t);
    interval_poly(samples, grid, k).eval(t, m)
}

/// Derivatives up to `m` at sample `i` from a centred degree-6 stencil.
pub(crate) fn node_derivs<const D: usize>(
    samples: &[SVector<f64, D>],
    grid: &ParamGrid,
    i: usize,
    m: usize,
) -> [SVector<f64, D>; 4] {
    let window = grid.centered_window(i, DERIV_WIDTH);
    LocalPoly::new(samples, grid, &window).eval(grid.params[i], m)
}

fn segment_count(n: usize, closed: bool) -> usize {
    if closed {
        n
    } else {
        n - 1
    }
}

fn cumulative_length<const D: usize>(samples: &[SVector<f64, D>], grid: &ParamGrid) -> (Vec<LocalPoly<D>>, Vec<f64>) {
    let nseg = segment_count(samples.len(), grid.period.is_some());
    let mut polys = Vec::with_capacity(nseg);
    let mut cum = Vec::with_capacity(nseg + 1);
    cum.push(0.0);
    for k in 0..nseg as isize {
        let poly = interval_poly(samples, grid, k);
        let len = poly.length(grid.param_at(k), grid.param_at(k + 1));
        cum.push(cum.last().unwrap() + len);
        polys.push(poly);
    }
    (polys, cum)
}

pub(crate) fn scale_of<const D: usize>(samples: &[SVector<f64, D>]) -> f64 {
    let mut lo = samples[0];
    let mut hi = samples[0];
    for s in samples {
        lo = lo.inf(s);
        hi = hi.sup(s);
    }
    (hi - lo).norm()
}

/// Resamples uniformly in arc length. Returns samples, arc-length params and
/// total length.
fn resample_arclength<const D: usize>(
    samples: &[SVector<f64, D>],
    grid: &ParamGrid,
    n_out: usize,
) -> Result<(Vec<SVector<f64, D>>, Vec<f64>, f64)> {
    let closed = grid.period.is_some();
    let (polys, cum) = cumulative_length(samples, grid);
    let total = *cum.last().unwrap();
    let scale = scale_of(samples).max(f64::MIN_POSITIVE);
    if !(total > 1e-12 * scale.max(1e-300)) || total <= 1e-300 {
        return Err(Error::DegenerateCurve(format!("total length {total:e} below tolerance")));
    }
    let count = if closed { n_out } else { n_out.max(2) };
    let step = if closed { total / count as f64 } else { total / (count - 1) as f64 };
    let mut out = Vec::with_capacity(count);
    let mut params = Vec::with_capacity(count);
    for j in 0..count {
        let s = if !closed && j == count - 1 { total } else { j as f64 * step };
        let k = (cum.partition_point(|&c| c <= s).saturating_sub(1)).min(polys.len() - 1);
        let poly = &polys[k];
        let a = grid.param_at(k as isize);
        let b = grid.param_at(k as isize + 1);
        let seg = cum[k + 1] - cum[k];
        let target = s - cum[k];
        let mut t = if seg > 0.0 { a + (b - a) * (target / seg) } else { a };
        for _ in 0..40 {
            let f = poly.length(a, t) - target;
            if f.abs() <= 1e-15 * total {
                break;
            }
            let d = poly.speed(t).max(1e-300);
            t = (t - f / d).clamp(a, b);
        }
        out.push(poly.eval(t, 0)[0]);
        params.push(s);
    }
    Ok((out, params, total))
}

fn validate_grid<const D: usize>(samples: &[SVector<f64, D>], params: &[f64], period: Option<f64>) -> Result<()> {
    if samples.len() != params.len() {
        return Err(Error::InvalidInput(format!("{} samples but {} params", samples.len(), params.len())));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidInput("a curve needs at least two samples".into()));
    }
    if samples.iter().any(|s| s.iter().any(|c| !c.is_finite())) || params.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample or parameter".into()));
    }
    if params.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("params must be strictly increasing".into()));
    }
    if let Some(p) = period {
        if samples.len() < 8 {
            return Err(Error::InvalidInput("closed curves need at least 8 samples".into()));
        }
        if !(p > 0.0) || params[params.len() - 1] >= params[0] + p {
            return Err(Error::InvalidInput("period must exceed the sampled parameter span".into()));
        }
    }
    let scale = scale_of(samples);
    let tol = 1e-14 * scale.max(1e-300);
    let n = samples.len();
    for i in 0..n - 1 {
        if (samples[i + 1] - samples[i]).norm() <= tol {
            return Err(Error::DegenerateCurve(format!("repeated consecutive samples at index {i}")));
        }
    }
    if period.is_some() && (samples[0] - samples[n - 1]).norm() <= tol {
        return Err(Error::DegenerateCurve("closed curve stores a duplicated endpoint".into()));
    }
    Ok(())
}

/// Periodic trapezoid weights for closed grids; composite Simpson for
/// uniform open grids and trapezoid for non-uniform open grids.
pub fn quadrature_weights(params: &[f64], period: Option<f64>) -> Vec<f64> {
    let n = params.len();
    let grid = ParamGrid::new(params, period);
    match period {
        Some(_) => (0..n as isize).map(|i| 0.5 * (grid.param_at(i + 1) - grid.param_at(i - 1))).collect(),
        None => {
            let h = (params[n - 1] - params[0]) / (n - 1) as f64;
            let uniform = params.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
            if uniform && n >= 3 && n % 2 == 1 {
                (0..n)
                    .map(|i| {
                        let c = if i == 0 || i == n - 1 {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        c * h / 3.0
                    })
                    .collect()
            } else {
                (0..n)
                    .map(|i| {
                        let left = if i > 0 { params[i] - params[i - 1] } else { 0.0 };
                        let right = if i + 1 < n { params[i + 1] - params[i] } else { 0.0 };
                        0.5 * (left + right)
                    })
                    .collect()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// space curves

/// A space curve sampled at strictly increasing parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve3 {
    samples: Vec<Vec3>,
    params: Vec<f64>,
    period: Option<f64>,
    jets: Option<Vec<Jet3>>,
}

impl SampledCurve3 {
    /// Builds a curve from samples. `period` is `Some(P)` for closed curves.
    pub fn new(samples: Vec<Vec3>, params: Vec<f64>, period: Option<f64>) -> Result<Self> {
        validate_grid(&samples, &params, period)?;
        Ok(Self { samples, params, period, jets: None })
    }

    /// Closed curve sampled uniformly over one period starting at 0.
    pub fn closed_uniform(samples: Vec<Vec3>, period: f64) -> Result<Self> {
        let n = samples.len();
        let params = (0..n).map(|i| i as f64 * period / n as f64).collect();
        Self::new(samples, params, Some(period))
    }

    /// Attaches exact parameter derivatives.
    pub fn with_jets(mut self, jets: Vec<Jet3>) -> Result<Self> {
        if jets.len() != self.samples.len() {
            return Err(Error::InvalidInput("jet table length mismatch".into()));
        }
        self.jets = Some(jets);
        Ok(self)
    }

    /// Drops the exact derivative table so finite differences are used.
    pub fn without_jets(mut self) -> Self {
        self.jets = None;
        self
    }

    /// Samples an analytic curve. `f(t)` returns the point and its first
    /// three derivatives. Closed curves use `n` samples over `[t0, t0+span)`,
    /// open curves `n` samples over `[t0, t0+span]`.
    pub fn from_analytic(t0: f64, span: f64, n: usize, closed: bool, f: impl Fn(f64) -> [Vec3; 4]) -> Result<Self> {
        let denom = if closed { n } else { n - 1 } as f64;
        let params: Vec<f64> = (0..n).map(|i| t0 + span * i as f64 / denom).collect();
        let values: Vec<[Vec3; 4]> = params.iter().map(|&t| f(t)).collect();
        let samples = values.iter().map(|v| v[0]).collect();
        let jets = values.iter().map(|v| Jet3 { d1: v[1], d2: v[2], d3: v[3] }).collect();
        Self::new(samples, params, closed.then_some(span))?.with_jets(jets)
    }

    /// Circle of the given radius in the xy-plane, parameterized by angle.
    pub fn circle(radius: f64, n: usize) -> Result<Self> {
        Self::from_analytic(0.0, 2.0 * PI, n, true, |t| {
            let (s, c) = t.sin_cos();
            [
                Vec3::new(radius * c, radius * s, 0.0),
                Vec3::new(-radius * s, radius * c, 0.0),
                Vec3::new(-radius * c, -radius * s, 0.0),
                Vec3::new(radius * s, -radius * c, 0.0),
            ]
        })
    }

    /// Open circular helix `(a cos t, a sin t, c t)` for `t` in `[0, t_end]`.
    pub fn helix(a: f64, c: f64, t_end: f64, n: usize) -> Result<Self> {
        Self::from_analytic(0.0, t_end, n, false, |t| {
            let (s, co) = t.sin_cos();
            [
                Vec3::new(a * co, a * s, c * t),
                Vec3::new(-a * s, a * co, c),
                Vec3::new(-a * co, -a * s, 0.0),
                Vec3::new(a * s, -a * co, 0.0),
            ]
        })
    }

    /// `(p, q)` torus knot on the torus with radii `big_r`, `small_r`.
    pub fn torus_knot(p: f64, q: f64, big_r: f64, small_r: f64, n: usize) -> Result<Self> {
        Self::from_analytic(0.0, 2.0 * PI, n, true, move |t| torus_knot_jet(p, q, big_r, small_r, t))
    }

    /// Viviani's curve on the unit sphere: a spherical figure-8 with period 4 pi.
    pub fn viviani(n: usize) -> Result<Self> {
        Self::from_analytic(0.0, 4.0 * PI, n, true, |t| {
            let (s, c) = t.sin_cos();
            let (sh, ch) = (0.5 * t).sin_cos();
            [
                Vec3::new(0.5 * (1.0 + c), 0.5 * s, sh),
                Vec3::new(-0.5 * s, 0.5 * c, 0.5 * ch),
                Vec3::new(-0.5 * c, -0.5 * s, -0.25 * sh),
                Vec3::new(0.5 * s, -0.5 * c, -0.125 * ch),
            ]
        })
    }

    /// Closed curve on the unit sphere obtained by radially projecting a
    /// trigonometric polynomial `c0 + sum_k (a_k cos kt + b_k sin kt)`.
    pub fn spherical_fourier(c0: Vec3, cos_terms: &[Vec3], sin_terms: &[Vec3], n: usize) -> Result<Self> {
        let cos_terms = cos_terms.to_vec();
        let sin_terms = sin_terms.to_vec();
        Self::from_analytic(0.0, 2.0 * PI, n, true, move |t| {
            let mut w = [c0, Vec3::zeros(), Vec3::zeros(), Vec3::zeros()];
            for (k, (a, b)) in cos_terms.iter().zip(&sin_terms).enumerate() {
                let kf = (k + 1) as f64;
                let (s, c) = (kf * t).sin_cos();
                w[0] += a * c + b * s;
                w[1] += (-a * s + b * c) * kf;
                w[2] += (-a * c - b * s) * kf * kf;
                w[3] += (a * s - b * c) * kf * kf * kf;
            }
            normalize_jet(w)
        })
    }

    /// Random smooth closed curve on the unit sphere (degree-3 Fourier data).
    /// Draws whose projection nearly stalls (a near-cusp) are rejected.
    pub fn random_spherical(seed: u64, n: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut unit = |scale: f64| {
            Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
        };
        let (c0, cos_terms, sin_terms) = loop {
            let c0 = unit(0.3);
            let cos_terms: Vec<Vec3> = (1..=3).map(|k| unit(1.0 / k as f64)).collect();
            let sin_terms: Vec<Vec3> = (1..=3).map(|k| unit(1.0 / k as f64)).collect();
            let speeds: Vec<f64> = (0..512)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / 512.0;
                    let (mut w, mut d) = (c0, Vec3::zeros());
                    for (k, (a, b)) in cos_terms.iter().zip(&sin_terms).enumerate() {
                        let kf = (k + 1) as f64;
                        let (s, c) = (kf * t).sin_cos();
                        w += a * c + b * s;
                        d += (b * c - a * s) * kf;
                    }
                    normalize_jet([w, d, Vec3::zeros(), Vec3::zeros()])[1].norm()
                })
                .collect();
            let lo = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
            let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
            if lo > 0.4 * mean {
                break (c0, cos_terms, sin_terms);
            }
        };
        Self::spherical_fourier(c0, &cos_terms, &sin_terms, n)
    }

    pub fn samples(&self) -> &[Vec3] {
        &self.samples
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
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn has_exact_jets(&self) -> bool {
        self.jets.is_some()
    }

    pub(crate) fn grid(&self) -> ParamGrid<'_> {
        ParamGrid::new(&self.params, self.period)
    }

    /// Bounding-box diagonal.
    pub fn diameter(&self) -> f64 {
        scale_of(&self.samples)
    }

    /// Parameter derivatives at every sample (exact when available).
    pub fn jets(&self) -> Vec<Jet3> {
        if let Some(j) = &self.jets {
            return j.clone();
        }
        let grid = self.grid();
        (0..self.len())
            .map(|i| {
                let d = node_derivs(&self.samples, &grid, i, 3);
                Jet3 { d1: d[1], d2: d[2], d3: d[3] }
            })
            .collect()
    }

    /// Interpolated position and derivatives at an arbitrary parameter.
    pub fn eval(&self, t: f64) -> [Vec3; 4] {
        eval_interp(&self.samples, &self.grid(), t, 3)
    }

    /// Arc length of the (period of the) curve.
    pub fn length(&self) -> f64 {
        let (_, cum) = cumulative_length(&self.samples, &self.grid());
        *cum.last().unwrap()
    }

    /// Resamples to `n_out` points uniformly spaced in arc length; the new
    /// params are arc length.
    pub fn reparameterize_arclength(&self, n_out: usize) -> Result<Self> {
        if self.is_closed() && n_out < 8 {
            return Err(Error::InvalidInput("closed curves need at least 8 samples".into()));
        }
        let (samples, params, total) = resample_arclength(&self.samples, &self.grid(), n_out)?;
        Self::new(samples, params, self.period.map(|_| total))
    }

    /// Applies `x -> m x + shift` (rotations or reflections).
    pub fn transformed(&self, m: &Matrix3<f64>, shift: &Vec3) -> Self {
        Self {
            samples: self.samples.iter().map(|s| m * s + shift).collect(),
            params: self.params.clone(),
            period: self.period,
            jets: self
                .jets
                .as_ref()
                .map(|js| js.iter().map(|j| Jet3 { d1: m * j.d1, d2: m * j.d2, d3: m * j.d3 }).collect()),
        }
    }

    /// Same closed curve starting at sample `k`.
    pub fn with_start(&self, k: usize) -> Result<Self> {
        let p = self.period.ok_or(Error::OpenCurve)?;
        let n = self.len();
        let k = k % n;
        let samples = self.samples[k..].iter().chain(&self.samples[..k]).copied().collect();
        let params = self.params[k..].iter().copied().chain(self.params[..k].iter().map(|t| t + p)).collect();
        let jets = self.jets.as_ref().map(|js| js[k..].iter().chain(&js[..k]).copied().collect());
        Ok(Self { samples, params, period: self.period, jets })
    }
}

fn torus_knot_jet(p: f64, q: f64, big_r: f64, small_r: f64, t: f64) -> [Vec3; 4] {
    // rho = R + r cos(qt); derivatives of rho, cos(pt), sin(pt)
    let (sq, cq) = (q * t).sin_cos();
    let rho = [big_r + small_r * cq, -small_r * q * sq, -small_r * q * q * cq, small_r * q * q * q * sq];
    let (sp, cp) = (p * t).sin_cos();
    let cosd = [cp, -p * sp, -p * p * cp, p * p * p * sp];
    let sind = [sp, p * cp, -p * p * sp, -p * p * p * cp];
    let z = [small_r * sq, small_r * q * cq, -small_r * q * q * sq, -small_r * q * q * q * cq];
    let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    let mut out = [Vec3::zeros(); 4];
    for k in 0..4 {
        let mut x = 0.0;
        let mut y = 0.0;
        for j in 0..=k {
            x += binom[k][j] * rho[j] * cosd[k - j];
            y += binom[k][j] * rho[j] * sind[k - j];
        }
        out[k] = Vec3::new(x, y, z[k]);
    }
    out
}

/// Derivatives of `w / |w|` from derivatives of `w` (orders 0..=3).
pub fn normalize_jet(w: [Vec3; 4]) -> [Vec3; 4] {
    let rho = w[0].norm();
    let r1 = w[0].dot(&w[1]) / rho;
    let r2 = (w[1].dot(&w[1]) + w[0].dot(&w[2]) - r1 * r1) / rho;
    let r3 = (3.0 * w[1].dot(&w[2]) + w[0].dot(&w[3]) - 3.0 * r1 * r2) / rho;
    let u0 = w[0] / rho;
    let u1 = (w[1] - u0 * r1) / rho;
    let u2 = (w[2] - u0 * r2 - u1 * (2.0 * r1)) / rho;
    let u3 = (w[3] - u0 * r3 - u1 * (3.0 * r2) - u2 * (3.0 * r1)) / rho;
    [u0, u1, u2, u3]
}

// ---------------------------------------------------------------------------
// Frenet data and torsion integrals

/// Frenet apparatus sampled along a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetData {
    pub tangent: Vec<Vec3>,
    pub normal: Vec<Vec3>,
    pub binormal: Vec<Vec3>,
    pub curvature: Vec<f64>,
    pub torsion: Vec<f64>,
    /// `|r'|` with respect to the curve parameter.
    pub speed: Vec<f64>,
    /// Whether sign propagation left the binormal continuous across the
    /// closing seam (always true for open curves).
    pub binormal_closes: bool,
}

impl FrenetData {
    /// Largest deviation of the frame matrix from orthonormality.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.tangent.len() {
            let g = Matrix3::from_columns(&[self.tangent[i], self.normal[i], self.binormal[i]]);
            let e = (g.transpose() * g - Matrix3::identity()).abs().max();
            worst = worst.max(e);
            // right-handedness: t x n = b
            worst = worst.max((self.tangent[i].cross(&self.normal[i]) - self.binormal[i]).norm());
        }
        worst
    }
}

/// Frenet frame, curvature and torsion at every sample.
pub fn frenet_data(curve: &SampledCurve3) -> Result<FrenetData> {
    let jets = curve.jets();
    let n = curve.len();
    let scale = curve.diameter().max(1e-300);
    let mut fd = FrenetData {
        tangent: Vec::with_capacity(n),
        normal: Vec::with_capacity(n),
        binormal: Vec::with_capacity(n),
        curvature: Vec::with_capacity(n),
        torsion: Vec::with_capacity(n),
        speed: Vec::with_capacity(n),
        binormal_closes: true,
    };
    for (i, j) in jets.iter().enumerate() {
        let speed = j.d1.norm();
        if speed <= 1e-14 * scale {
            return Err(Error::DegenerateTangent { index: i });
        }
        let c = j.d1.cross(&j.d2);
        let cn = c.norm();
        let kappa = cn / speed.powi(3);
        if kappa * scale <= INFLECTION_TOL || !kappa.is_finite() {
            return Err(Error::InflectionPoint { index: i });
        }
        let t = j.d1 / speed;
        let mut b = c / cn;
        if let Some(prev) = fd.binormal.last() {
            if b.dot(prev) < 0.0 {
                b = -b;
            }
        }
        let n_vec = b.cross(&t);
        // b' = tau n with n = b x t; the sign of b does not affect tau.
        let tau = -j.d1.dot(&j.d2.cross(&j.d3)) / (cn * cn);
        fd.tangent.push(t);
        fd.normal.push(n_vec);
        fd.binormal.push(b);
        fd.curvature.push(kappa);
        fd.torsion.push(tau);
        fd.speed.push(speed);
    }
    if curve.is_closed() {
        fd.binormal_closes = fd.binormal[n - 1].dot(&fd.binormal[0]) > 0.0;
    }
    Ok(fd)
}

fn closed_frenet(curve: &SampledCurve3) -> Result<FrenetData> {
    if !curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    let fd = frenet_data(curve)?;
    if !fd.binormal_closes {
        return Err(Error::NonPeriodicBinormal);
    }
    Ok(fd)
}

/// Total torsion `T = int tau ds` over one period (periodic trapezoid).
pub fn total_torsion(curve: &SampledCurve3) -> Result<f64> {
    let fd = closed_frenet(curve)?;
    let w = quadrature_weights(curve.params(), curve.period());
    Ok((0..curve.len()).map(|i| fd.torsion[i] * fd.speed[i] * w[i]).sum())
}

/// Length `L_S = int |tau| ds` of the binormal image on the unit sphere.
pub fn binormal_trace_length(curve: &SampledCurve3) -> Result<f64> {
    let fd = closed_frenet(curve)?;
    let w = quadrature_weights(curve.params(), curve.period());
    Ok((0..curve.len()).map(|i| fd.torsion[i].abs() * fd.speed[i] * w[i]).sum())
}

/// `int tau ds` along an open curve (Simpson on uniform grids).
pub fn torsion_integral(curve: &SampledCurve3) -> Result<f64> {
    let fd = frenet_data(curve)?;
    let w = quadrature_weights(curve.params(), curve.period());
    Ok((0..curve.len()).map(|i| fd.torsion[i] * fd.speed[i] * w[i]).sum())
}

// ---------------------------------------------------------------------------
// plane curves

/// How a rotation of the plane acts on a profile curve's parameter:
/// `gamma(offset + orientation * u) = R gamma(u)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProfileMap {
    /// `+1` for a parameter shift, `-1` for a parameter reflection.
    pub orientation: i8,
    pub offset: f64,
    /// Largest mismatch over the samples.
    pub residual: f64,
}

impl ProfileMap {
    pub fn apply(&self, u: f64) -> f64 {
        self.offset + self.orientation as f64 * u
    }

    pub fn preserves_orientation(&self) -> bool {
        self.orientation > 0
    }
}

/// A plane curve `gamma(u) = (x(u), y(u))`, typically arc-length
/// parameterized, with an optional declared rotational symmetry order.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCurve {
    samples: Vec<Vec2>,
    params: Vec<f64>,
    period: Option<f64>,
    symmetry_order: Option<u32>,
}

impl PlaneCurve {
    pub fn new(samples: Vec<Vec2>, params: Vec<f64>, period: Option<f64>) -> Result<Self> {
        validate_grid(&samples, &params, period)?;
        Ok(Self { samples, params, period, symmetry_order: None })
    }

    /// Circle of radius `r` centred at `center`, arc-length parameterized and
    /// traversed counter-clockwise starting at angle 0.
    pub fn circle(center: Vec2, radius: f64, n: usize) -> Result<Self> {
        let period = 2.0 * PI * radius;
        let params: Vec<f64> = (0..n).map(|i| period * i as f64 / n as f64).collect();
        let samples = params
            .iter()
            .map(|u| {
                let (s, c) = (u / radius).sin_cos();
                center + Vec2::new(radius * c, radius * s)
            })
            .collect();
        Self::new(samples, params, Some(period))
    }

    /// Straight segment from `a` to `b` with `n` samples.
    pub fn segment(a: Vec2, b: Vec2, n: usize) -> Result<Self> {
        let len = (b - a).norm();
        let params: Vec<f64> = (0..n).map(|i| len * i as f64 / (n - 1) as f64).collect();
        let samples = (0..n).map(|i| a + (b - a) * (i as f64 / (n - 1) as f64)).collect();
        Self::new(samples, params, None)
    }

    /// Closed star-shaped curve `r(phi) (cos phi, sin phi)`, resampled in arc length.
    pub fn polar(radius: impl Fn(f64) -> f64, n: usize) -> Result<Self> {
        let dense = 4 * n;
        let params: Vec<f64> = (0..dense).map(|i| 2.0 * PI * i as f64 / dense as f64).collect();
        let samples = params
            .iter()
            .map(|&phi| {
                let (s, c) = phi.sin_cos();
                Vec2::new(c, s) * radius(phi)
            })
            .collect();
        Self::new(samples, params, Some(2.0 * PI))?.reparameterize_arclength(n)
    }

    /// Rounded curve with `order`-fold rotational symmetry about the origin:
    /// `r(phi) = radius (1 + bump cos(order phi))`.
    pub fn rosette(radius: f64, bump: f64, order: u32, n: usize) -> Result<Self> {
        let curve = Self::polar(|phi| radius * (1.0 + bump * (order as f64 * phi).cos()), n)?;
        curve.with_symmetry_order(order, 1e-9 * radius)
    }

    /// Figure-8 (lemniscate of Gerono) `(s cos t, s sin t cos t)`, symmetric
    /// about the origin and passing through it.
    pub fn figure_eight(size: f64, n: usize) -> Result<Self> {
        let dense = 4 * n;
        let params: Vec<f64> = (0..dense).map(|i| 2.0 * PI * i as f64 / dense as f64).collect();
        let samples = params.iter().map(|&t| Vec2::new(size * t.cos(), size * t.sin() * t.cos())).collect();
        let curve = Self::new(samples, params, Some(2.0 * PI))?.reparameterize_arclength(n)?;
        curve.with_symmetry_order(2, 1e-9 * size)
    }

    /// Declares an order-`n` rotational symmetry, verified within `tol`.
    pub fn with_symmetry_order(mut self, order: u32, tol: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("symmetry order must be positive".into()));
        }
        if order > 1 && self.rotation_map(2.0 * PI / order as f64, tol).is_none() {
            return Err(Error::InvalidInput(format!("profile is not invariant under rotation by 2pi/{order}")));
        }
        self.symmetry_order = Some(order);
        Ok(self)
    }

    pub fn samples(&self) -> &[Vec2] {
        &self.samples
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
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn symmetry_order(&self) -> Option<u32> {
        self.symmetry_order
    }

    pub fn diameter(&self) -> f64 {
        scale_of(&self.samples)
    }

    /// Parameter interval `[first, last]` (one period for closed curves).
    pub fn domain(&self) -> (f64, f64) {
        match self.period {
            Some(p) => (self.params[0], self.params[0] + p),
            None => (self.params[0], self.params[self.len() - 1]),
        }
    }

    /// Point, first and second derivative at `u` (periodic for closed curves).
    pub fn eval(&self, u: f64) -> [Vec2; 3] {
        let d = eval_interp(&self.samples, &ParamGrid::new(&self.params, self.period), u, 2);
        [d[0], d[1], d[2]]
    }

    pub fn length(&self) -> f64 {
        let (_, cum) = cumulative_length(&self.samples, &ParamGrid::new(&self.params, self.period));
        *cum.last().unwrap()
    }

    pub fn reparameterize_arclength(&self, n_out: usize) -> Result<Self> {
        if self.is_closed() && n_out < 8 {
            return Err(Error::InvalidInput("closed curves need at least 8 samples".into()));
        }
        let grid = ParamGrid::new(&self.params, self.period);
        let (samples, params, total) = resample_arclength(&self.samples, &grid, n_out)?;
        let mut out = Self::new(samples, params, self.period.map(|_| total))?;
        out.symmetry_order = self.symmetry_order;
        Ok(out)
    }

    /// Largest deviation of `|gamma'|` from 1 at the samples.
    pub fn unit_speed_error(&self) -> f64 {
        let grid = ParamGrid::new(&self.params, self.period);
        (0..self.len()).map(|i| (node_derivs(&self.samples, &grid, i, 1)[1].norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// True when every sample lies on one circle centred at the origin.
    pub fn is_circle_about_origin(&self, tol: f64) -> bool {
        if !self.is_closed() {
            return false;
        }
        let r0 = self.samples[0].norm();
        r0 > tol && self.samples.iter().all(|s| (s.norm() - r0).abs() <= tol)
    }

    /// Finds the parameter map induced by rotating the curve about the origin
    /// by `angle`, if the rotated curve coincides with the original within `tol`.
    pub fn rotation_map(&self, angle: f64, tol: f64) -> Option<ProfileMap> {
        let (s, c) = angle.sin_cos();
        let rot = |p: &Vec2| Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y);
        let n = self.len();
        let check = |map: &ProfileMap| -> Option<f64> {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let target = rot(&self.samples[i]);
                let u = map.apply(self.params[i]);
                if !self.is_closed() {
                    let (lo, hi) = self.domain();
                    let slack = 1e-9 * (hi - lo);
                    if u < lo - slack || u > hi + slack {
                        return None;
                    }
                }
                worst = worst.max((self.eval(u)[0] - target).norm());
                if worst > tol {
                    return None;
                }
            }
            Some(worst)
        };
        if !self.is_closed() {
            let (lo, hi) = self.domain();
            let mut candidates = vec![ProfileMap { orientation: -1, offset: lo + hi, residual: 0.0 }];
            if crate::numeric::wrap_angle(angle).abs() < 1e-12 {
                candidates.insert(0, ProfileMap { orientation: 1, offset: 0.0, residual: 0.0 });
            }
            return candidates.into_iter().find_map(|mut m| {
                check(&m).map(|r| {
                    m.residual = r;
                    m
                })
            });
        }
        // reference sample: farthest from the origin
        let i0 = (0..n).max_by(|&a, &b| self.samples[a].norm().total_cmp(&self.samples[b].norm())).unwrap();
        let q = rot(&self.samples[i0]);
        let spacing = (0..n).map(|i| (self.samples[(i + 1) % n] - self.samples[i]).norm()).fold(0.0, f64::max);
        let dist: Vec<f64> = self.samples.iter().map(|p| (p - q).norm()).collect();
        let mut candidates = Vec::new();
        for i in 0..n {
            let prev = dist[(i + n - 1) % n];
            let next = dist[(i + 1) % n];
            if dist[i] <= prev && dist[i] <= next && dist[i] <= 2.0 * spacing + tol {
                candidates.push(self.params[i]);
            }
        }
        for u_start in candidates {
            // Newton on (gamma(u) - q) . gamma'(u) = 0
            let mut u = u_start;
            for _ in 0..30 {
                let [g, g1, g2] = self.eval(u);
                let f = (g - q).dot(&g1);
                let df = g1.dot(&g1) + (g - q).dot(&g2);
                if df.abs() < 1e-300 {
                    break;
                }
                let step = f / df;
                u -= step;
                if step.abs() < 1e-15 * (1.0 + u.abs()) {
                    break;
                }
            }
            if (self.eval(u)[0] - q).norm() > tol {
                continue;
            }
            for orientation in [1i8, -1] {
                let period = self.period.unwrap();
                let mut map = ProfileMap {
                    orientation,
                    offset: (u - orientation as f64 * self.params[i0]).rem_euclid(period),
                    residual: 0.0,
                };
                if let Some(r) = check(&map) {
                    map.residual = r;
                    return Some(map);
                }
            }
        }
        None
    }
}
