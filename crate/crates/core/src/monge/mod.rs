//! Generalized Monge surfaces `x(u, v) = p(v) + x(u) q1(v) + y(u) q2(v)`.

mod closure;
mod mesh;

pub use closure::{classify_closure, ClosureKind, ClosureReport};
pub use mesh::{make_mesh, mesh_check, read_obj, MeshCheck, MeshHeader, MeshOptions, QuadMesh, SeamMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{frenet_data, PlaneCurve, SampledCurve3, Vec3};
use crate::error::{Error, Result};
use crate::plane_family::{Coefficients, FrameSample, PlaneFamily};

/// Largest tolerated deviation of the profile from unit speed.
pub const UNIT_SPEED_TOL: f64 = 1e-6;

/// Anything that can be evaluated on a rectangular parameter domain.
pub trait ParametricSurface: Sync {
    fn point(&self, u: f64, v: f64) -> Vec3;
    /// `(start, end)` of the u interval.
    fn u_range(&self) -> (f64, f64);
    fn v_range(&self) -> (f64, f64);
}

/// A plane family carrying a unit-speed profile curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MongeSurface {
    family: PlaneFamily,
    profile: PlaneCurve,
}

impl MongeSurface {
    /// Sweeps `profile` along `family`; a profile that is not unit-speed is
    /// reparameterized by arc length first.
    pub fn new(family: PlaneFamily, profile: PlaneCurve) -> Result<Self> {
        let profile = if profile.unit_speed_error() > UNIT_SPEED_TOL {
            profile.reparameterize_arclength(profile.len())?
        } else {
            profile
        };
        Ok(Self { family, profile })
    }

    /// Surface over the normal-plane family of a spine.
    pub fn from_spine(spine: &SampledCurve3, profile: PlaneCurve) -> Result<Self> {
        Self::new(PlaneFamily::from_spine(spine)?, profile)
    }

    pub fn family(&self) -> &PlaneFamily {
        &self.family
    }

    pub fn profile(&self) -> &PlaneCurve {
        &self.profile
    }

    pub fn u_domain(&self) -> (f64, f64) {
        self.profile.domain()
    }

    pub fn v_domain(&self) -> (f64, f64) {
        self.family.domain()
    }

    /// Surface point; closed axes accept any parameter value (a closed
    /// family continues with its monodromy).
    pub fn evaluate(&self, u: f64, v: f64) -> Result<Vec3> {
        let inside = |(a, b): (f64, f64), x: f64| {
            let slack = 1e-12 * (b - a).abs().max(1.0);
            x.is_finite() && x >= a - slack && x <= b + slack
        };
        if (!self.profile.is_closed() && !inside(self.u_domain(), u))
            || (!self.family.is_closed() && !inside(self.v_domain(), v))
            || !u.is_finite()
            || !v.is_finite()
        {
            return Err(Error::OutOfDomain { u, v });
        }
        Ok(self.point_unchecked(u, v))
    }

    pub(crate) fn point_unchecked(&self, u: f64, v: f64) -> Vec3 {
        let g = self.profile.eval(u)[0];
        self.family.frame_at(v).point(g.x, g.y)
    }

    /// `lambda - kappa1 x - kappa2 y` at `(u, v)`.
    pub fn margin_at(&self, u: f64, v: f64) -> f64 {
        let g = self.profile.eval(u)[0];
        margin(&self.family.coefficients_at(v), g.x, g.y)
    }

    /// Uniform grid over the domain: closed axes omit the end point.
    pub fn grid(&self, nu: usize, nv: usize) -> (Vec<f64>, Vec<f64>) {
        (
            axis_grid(self.u_domain(), nu, self.profile.is_closed()),
            axis_grid(self.v_domain(), nv, self.family.is_closed()),
        )
    }
}

impl ParametricSurface for MongeSurface {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        self.point_unchecked(u, v)
    }

    fn u_range(&self) -> (f64, f64) {
        self.u_domain()
    }

    fn v_range(&self) -> (f64, f64) {
        self.v_domain()
    }
}

fn margin(c: &Coefficients, x: f64, y: f64) -> f64 {
    c.z - c.x * x - c.y * y
}

pub(crate) fn axis_grid((a, b): (f64, f64), n: usize, closed: bool) -> Vec<f64> {
    let denom = if closed { n } else { n.max(2) - 1 } as f64;
    (0..n).map(|i| a + (b - a) * i as f64 / denom).collect()
}

/// Margin field on a grid and the regular/singular verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub nu: usize,
    pub nv: usize,
    pub min: f64,
    pub max: f64,
    pub regular: bool,
    /// Row-major values, index `j * nu + i` for `(u_i, v_j)`.
    pub values: Vec<f64>,
    /// Approximate zeros `(u, v)` located on grid edges by linear interpolation.
    pub zero_set: Vec<[f64; 2]>,
}

/// Regularity margin on an `nu x nv` grid. The surface is regular where the
/// margin is nonzero; `tol` is the threshold on `|margin|`.
pub fn regularity_margin(surface: &MongeSurface, nu: usize, nv: usize, tol: f64) -> MarginReport {
    let (us, vs) = surface.grid(nu, nv);
    let profile: Vec<_> = us.iter().map(|&u| surface.profile.eval(u)[0]).collect();
    let values: Vec<f64> = vs
        .par_iter()
        .flat_map_iter(|&v| {
            let c = surface.family.coefficients_at(v);
            profile.iter().map(move |g| margin(&c, g.x, g.y)).collect::<Vec<_>>()
        })
        .collect();
    let at = |i: usize, j: usize| values[j * nu + i];
    let mut zero_set = Vec::new();
    for j in 0..nv {
        for i in 0..nu {
            let m = at(i, j);
            if m.abs() <= tol {
                zero_set.push([us[i], vs[j]]);
                continue;
            }
            if i + 1 < nu {
                let m2 = at(i + 1, j);
                if m * m2 < 0.0 && m2.abs() > tol {
                    let s = m / (m - m2);
                    zero_set.push([us[i] + s * (us[i + 1] - us[i]), vs[j]]);
                }
            }
            if j + 1 < nv {
                let m2 = at(i, j + 1);
                if m * m2 < 0.0 && m2.abs() > tol {
                    let s = m / (m - m2);
                    zero_set.push([us[i], vs[j] + s * (vs[j + 1] - vs[j])]);
                }
            }
        }
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    MarginReport { nu, nv, min, max, regular: zero_set.is_empty() && (min > 0.0 || max < 0.0), values, zero_set }
}

/// Metric and second fundamental form sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDiagnostics {
    pub nu: usize,
    pub nv: usize,
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
    pub regularity_margin: Vec<f64>,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub l: Vec<f64>,
    pub m: Vec<f64>,
    pub n: Vec<f64>,
    /// `1 - margin`, which reduces to `kappa1 x + kappa2 y` for a unit-speed spine.
    pub alpha: Vec<f64>,
    /// `x kappa1 - y kappa2`, kept for comparison.
    pub alpha_printed: Vec<f64>,
    pub gauss_curvature: Vec<f64>,
}

/// Residuals of the metric identity `(E, F, G) = (1, 0, (1 - alpha)^2)` and
/// of the principal-coordinate property `M = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormResiduals {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// Same as `g` with `alpha_printed` in place of `alpha`.
    pub g_printed: f64,
    pub m: f64,
    /// `max |M| / (|L| + |N| + eps)`.
    pub m_relative: f64,
}

impl SurfaceDiagnostics {
    pub fn residuals(&self) -> FormResiduals {
        let sup = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, |a: f64, b: f64| a.max(b.abs()));
        let k = self.e.len();
        FormResiduals {
            e: sup(&mut self.e.iter().map(|e| e - 1.0)),
            f: sup(&mut self.f.iter().copied()),
            g: sup(&mut (0..k).map(|i| self.g[i] - (1.0 - self.alpha[i]).powi(2))),
            g_printed: sup(&mut (0..k).map(|i| self.g[i] - (1.0 - self.alpha_printed[i]).powi(2))),
            m: sup(&mut self.m.iter().copied()),
            m_relative: sup(&mut (0..k).map(|i| self.m[i] / (self.l[i].abs() + self.n[i].abs() + 1e-12))),
        }
    }
}

/// Fourth-order central first and second derivatives of `f` at 0 with step `h`.
fn central(f: impl Fn(f64) -> Vec3, h: f64) -> (Vec3, Vec3) {
    let (m2, m1, z, p1, p2) = (f(-2.0 * h), f(-h), f(0.0), f(h), f(2.0 * h));
    let d1 = (m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h);
    let d2 = ((p1 + m1) * 16.0 - (p2 + m2) - z * 30.0) / (12.0 * h * h);
    (d1, d2)
}

/// Partial derivatives `(x_u, x_v, x_uu, x_uv, x_vv)` by fourth-order differences.
fn partials<S: ParametricSurface + ?Sized>(s: &S, u: f64, v: f64, hu: f64, hv: f64) -> [Vec3; 5] {
    let (xu, xuu) = central(|d| s.point(u + d, v), hu);
    let (xv, xvv) = central(|d| s.point(u, v + d), hv);
    let du = |vv: f64| central(|d| s.point(u + d, vv), hu).0;
    let (xuv, _) = central(|d| du(v + d), hv);
    [xu, xv, xuu, xuv, xvv]
}

/// Default difference steps: a fixed fraction of each parameter range.
fn default_steps<S: ParametricSurface + ?Sized>(s: &S) -> (f64, f64) {
    let (a, b) = s.u_range();
    let (c, d) = s.v_range();
    (5e-4 * (b - a).abs(), 5e-4 * (d - c).abs())
}

/// Fundamental forms on an `nu x nv` grid, by finite differences of
/// [`MongeSurface::evaluate`].
pub fn fundamental_forms(surface: &MongeSurface, nu: usize, nv: usize) -> Result<SurfaceDiagnostics> {
    let (us, vs) = surface.grid(nu, nv);
    let margins = regularity_margin(surface, nu, nv, 0.0);
    let lam_scale = surface.family.lambda().iter().fold(0.0, |a: f64, b| a.max(b.abs())).max(1e-300);
    for j in 0..nv {
        for i in 0..nu {
            if margins.values[j * nu + i].abs() <= 1e-9 * lam_scale {
                return Err(Error::SingularPoint { u: us[i], v: vs[j] });
            }
        }
    }
    let (hu, hv) = default_steps(surface);
    type Row = Vec<[f64; 9]>;
    let rows: Vec<Row> = vs
        .par_iter()
        .map(|&v| {
            let c = surface.family.coefficients_at(v);
            us.iter()
                .map(|&u| {
                    let [xu, xv, xuu, xuv, xvv] = partials(surface, u, v, hu, hv);
                    let nrm = xu.cross(&xv).normalize();
                    let (e, f, g) = (xu.dot(&xu), xu.dot(&xv), xv.dot(&xv));
                    let (l, m, n) = (xuu.dot(&nrm), xuv.dot(&nrm), xvv.dot(&nrm));
                    let p = surface.profile.eval(u)[0];
                    let k = (l * n - m * m) / (e * g - f * f);
                    [e, f, g, l, m, n, 1.0 - margin(&c, p.x, p.y), p.x * c.x - p.y * c.y, k]
                })
                .collect()
        })
        .collect();
    let field = |k: usize| rows.iter().flat_map(|r| r.iter().map(move |x| x[k])).collect::<Vec<f64>>();
    Ok(SurfaceDiagnostics {
        nu,
        nv,
        us,
        vs,
        regularity_margin: margins.values,
        e: field(0),
        f: field(1),
        g: field(2),
        l: field(3),
        m: field(4),
        n: field(5),
        alpha: field(6),
        alpha_printed: field(7),
        gauss_curvature: field(8),
    })
}

/// Sup-norm error of `(E, F, G)` against `(1, 0, margin^2)` with difference
/// steps equal to the spacing of an `n x n` grid.
pub fn metric_error_on_grid(surface: &MongeSurface, n: usize) -> f64 {
    let (us, vs) = surface.grid(n, n);
    let hu = us[1] - us[0];
    let hv = vs[1] - vs[0];
    vs.par_iter()
        .map(|&v| {
            let c = surface.family.coefficients_at(v);
            us.iter()
                .map(|&u| {
                    let (xu, _) = central(|d| surface.point_unchecked(u + d, v), hu);
                    let (xv, _) = central(|d| surface.point_unchecked(u, v + d), hv);
                    let p = surface.profile.eval(u)[0];
                    let m = margin(&c, p.x, p.y);
                    (xu.dot(&xu) - 1.0).abs().max(xu.dot(&xv).abs()).max((xv.dot(&xv) - m * m).abs())
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Planar-geodesic-foliation diagnostics for the meridians `u -> x(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgfReport {
    /// Largest distance of a meridian sample from its best-fit plane.
    pub planarity: f64,
    /// Largest geodesic curvature of a meridian.
    pub geodesic: f64,
    /// Largest component of the surface normal across the meridian plane.
    pub normal: f64,
    pub pgf: bool,
}

/// Checks that every sampled meridian is a planar geodesic whose plane
/// contains the surface normal.
pub fn check_pgf<S: ParametricSurface + ?Sized>(surface: &S, nu: usize, nv: usize, tol: f64) -> PgfReport {
    let (u0, u1) = surface.u_range();
    let (v0, v1) = surface.v_range();
    // stay clear of the ends of open ranges so the difference stencils fit
    let us: Vec<f64> = (0..nu).map(|i| u0 + (u1 - u0) * (i as f64 + 0.5) / nu as f64).collect();
    let vs: Vec<f64> = (0..nv).map(|j| v0 + (v1 - v0) * (j as f64 + 0.5) / nv as f64).collect();
    let (hu, hv) = default_steps(surface);
    let rows: Vec<[f64; 3]> = vs
        .par_iter()
        .map(|&v| {
            let pts: Vec<Vec3> = us.iter().map(|&u| surface.point(u, v)).collect();
            let centroid = pts.iter().sum::<Vec3>() / pts.len() as f64;
            let mut cov = nalgebra::Matrix3::zeros();
            for p in &pts {
                let d = p - centroid;
                cov += d * d.transpose();
            }
            let eig = cov.symmetric_eigen();
            let k = eig.eigenvalues.imin();
            let plane: Vec3 = eig.eigenvectors.column(k).into();
            let planarity = pts.iter().map(|p| (p - centroid).dot(&plane).abs()).fold(0.0, f64::max);
            let mut geodesic: f64 = 0.0;
            let mut normal: f64 = 0.0;
            for &u in &us {
                let [xu, xv, xuu, _, _] = partials(surface, u, v, hu, hv);
                let nrm = xu.cross(&xv).normalize();
                let side = nrm.cross(&xu).normalize();
                geodesic = geodesic.max(xuu.dot(&side).abs() / xu.norm_squared());
                normal = normal.max(nrm.dot(&plane).abs());
            }
            [planarity, geodesic, normal]
        })
        .collect();
    let worst = |k: usize| rows.iter().map(|r| r[k]).fold(0.0, f64::max);
    let (planarity, geodesic, normal) = (worst(0), worst(1), worst(2));
    PgfReport { planarity, geodesic, normal, pgf: planarity < tol && geodesic < tol && normal < tol }
}

/// Profile swept along the Frenet frame of a curve, `r + x n + y b`. Not a
/// Monge surface unless the curve is planar; used as a negative control.
#[derive(Debug, Clone)]
pub struct FrenetSweep {
    spine: SampledCurve3,
    normal: Vec<Vec3>,
    binormal: Vec<Vec3>,
    profile: PlaneCurve,
}

impl FrenetSweep {
    pub fn new(spine: SampledCurve3, profile: PlaneCurve) -> Result<Self> {
        let fd = frenet_data(&spine)?;
        Ok(Self { spine, normal: fd.normal, binormal: fd.binormal, profile })
    }

    fn frame(&self, v: f64) -> FrameSample {
        let grid = crate::numeric::ParamGrid::new(self.spine.params(), self.spine.period());
        let n = crate::curve::eval_interp(&self.normal, &grid, v, 0)[0];
        let b = crate::curve::eval_interp(&self.binormal, &grid, v, 0)[0];
        let p = self.spine.eval(v);
        FrameSample { p: p[0], t: p[1].normalize(), q1: n, q2: b }
    }
}

impl ParametricSurface for FrenetSweep {
    fn point(&self, u: f64, v: f64) -> Vec3 {
        let g = self.profile.eval(u)[0];
        self.frame(v).point(g.x, g.y)
    }

    fn u_range(&self) -> (f64, f64) {
        self.profile.domain()
    }

    fn v_range(&self) -> (f64, f64) {
        let p = self.spine.params();
        match self.spine.period() {
            Some(per) => (p[0], p[0] + per),
            None => (p[0], p[p.len() - 1]),
        }
    }
}

/// Local type of a singular point of a Monge surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    /// The unit normal moves along the null direction: the map is a front
    /// and the singular point is a cuspidal edge.
    CuspidalEdge,
    /// The unit normal is stationary along the null direction.
    Fold,
}

/// A singular point with its type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPointInfo {
    pub u: f64,
    pub v: f64,
    pub kind: SingularityKind,
    /// `|d nu / dv|` of the unit normal `nu = x_u x t`.
    pub normal_rate: f64,
}

/// Classifies a singular point. The null direction is always `d/dv`; the
/// unit normal `x_u x t` is defined through the singular set.
pub fn singularity_type(surface: &MongeSurface, u: f64, v: f64) -> SingularPointInfo {
    let normal_at = |vv: f64| {
        let d = surface.profile.eval(u)[1];
        let f = surface.family.frame_at(vv);
        (f.q1 * d.x + f.q2 * d.y).cross(&f.t)
    };
    let h = 1e-4 * (surface.v_domain().1 - surface.v_domain().0).abs().max(1e-3);
    let (dn, _) = central(|d| normal_at(v + d), h);
    let rate = dn.norm();
    SingularPointInfo {
        u,
        v,
        kind: if rate > 1e-6 { SingularityKind::CuspidalEdge } else { SingularityKind::Fold },
        normal_rate: rate,
    }
}

#[cfg(test)]
mod tests;
