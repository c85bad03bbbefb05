//! JSON file formats.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curve::{PlaneCurve, SampledCurve3, Vec2, Vec3};
use crate::plane_family::{involute_family, FrameSample, PlaneFamily};
use crate::spine_synth::{
    Basis, BasisExpansion, BinormalCurve, BinormalShape, SpineSynthesisProblem, SynthesisDiagnostics, SynthesisResult,
    DEFAULT_QUAD_INTERVALS, DEFAULT_SPINE_SAMPLES,
};
use crate::{Error, Result};

/// Sampled or generated space curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurveSpec {
    /// Explicit samples. Missing `params` are uniform over the period (or
    /// `0, 1, ...` for open curves).
    Points {
        points: Vec<[f64; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<f64>,
    },
    Circle {
        radius: f64,
        n: usize,
    },
    Helix {
        a: f64,
        c: f64,
        t_end: f64,
        n: usize,
    },
    TorusKnot {
        p: f64,
        q: f64,
        big_r: f64,
        small_r: f64,
        n: usize,
    },
    Viviani {
        n: usize,
    },
    /// Random closed curve on the unit sphere.
    RandomSpherical {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        n: usize,
    },
}

impl CurveSpec {
    pub fn build(&self, seed: u64) -> Result<SampledCurve3> {
        match self {
            CurveSpec::Points { points, params, period } => {
                let samples: Vec<Vec3> = points.iter().map(|p| Vec3::from(*p)).collect();
                let params = params.clone().unwrap_or_else(|| uniform_params(samples.len(), *period));
                SampledCurve3::new(samples, params, *period)
            }
            CurveSpec::Circle { radius, n } => SampledCurve3::circle(*radius, *n),
            CurveSpec::Helix { a, c, t_end, n } => SampledCurve3::helix(*a, *c, *t_end, *n),
            CurveSpec::TorusKnot { p, q, big_r, small_r, n } => SampledCurve3::torus_knot(*p, *q, *big_r, *small_r, *n),
            CurveSpec::Viviani { n } => SampledCurve3::viviani(*n),
            CurveSpec::RandomSpherical { seed: s, n } => SampledCurve3::random_spherical(s.unwrap_or(seed), *n),
        }
    }

    pub fn from_curve(curve: &SampledCurve3) -> Self {
        CurveSpec::Points {
            points: curve.samples().iter().map(|p| [p.x, p.y, p.z]).collect(),
            params: Some(curve.params().to_vec()),
            period: curve.period(),
        }
    }
}

fn uniform_params(n: usize, period: Option<f64>) -> Vec<f64> {
    match period {
        Some(p) => (0..n).map(|j| p * j as f64 / n as f64).collect(),
        None => (0..n).map(|j| j as f64).collect(),
    }
}

/// Plane profile curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProfileSpec {
    Points {
        points: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        symmetry_order: Option<u32>,
    },
    Circle {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        n: usize,
    },
    Segment {
        a: [f64; 2],
        b: [f64; 2],
        n: usize,
    },
    /// `r(phi) = radius (1 + bump cos(order phi))`.
    Rosette {
        radius: f64,
        bump: f64,
        order: u32,
        n: usize,
    },
    FigureEight {
        size: f64,
        n: usize,
    },
}

impl ProfileSpec {
    pub fn build(&self) -> Result<PlaneCurve> {
        match self {
            ProfileSpec::Points { points, params, period, symmetry_order } => {
                let samples: Vec<Vec2> = points.iter().map(|p| Vec2::from(*p)).collect();
                let params = params.clone().unwrap_or_else(|| uniform_params(samples.len(), *period));
                let c = PlaneCurve::new(samples, params, *period)?;
                match symmetry_order {
                    Some(k) => {
                        let tol = 1e-6 * c.diameter().max(1e-3);
                        c.with_symmetry_order(*k, tol)
                    }
                    None => Ok(c),
                }
            }
            ProfileSpec::Circle { center, radius, n } => PlaneCurve::circle(Vec2::from(*center), *radius, *n),
            ProfileSpec::Segment { a, b, n } => PlaneCurve::segment(Vec2::from(*a), Vec2::from(*b), *n),
            ProfileSpec::Rosette { radius, bump, order, n } => PlaneCurve::rosette(*radius, *bump, *order, *n),
            ProfileSpec::FigureEight { size, n } => PlaneCurve::figure_eight(*size, *n),
        }
    }
}

/// Orthogonal plane family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Normal planes of a spine with a rotation-minimizing basis.
    Spine { curve: CurveSpec },
    /// Sampled frames with their coefficients `(kappa1, kappa2, lambda)`.
    Frames {
        params: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<f64>,
        frames: Vec<FrameSample>,
        coefficients: Vec<[f64; 3]>,
        #[serde(default)]
        psi: f64,
    },
    /// Frames integrated from coefficient samples.
    Coefficients {
        params: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<f64>,
        kappa1: Vec<f64>,
        kappa2: Vec<f64>,
        lambda: Vec<f64>,
        initial: FrameSample,
    },
    /// Involute family of the unit circle over `[v0, v1]`.
    Involute { v0: f64, v1: f64, n: usize },
}

impl FamilySpec {
    pub fn build(&self, seed: u64) -> Result<PlaneFamily> {
        match self {
            FamilySpec::Spine { curve } => PlaneFamily::from_spine(&curve.build(seed)?),
            FamilySpec::Frames { params, period, frames, coefficients, psi } => PlaneFamily::from_samples(
                params.clone(),
                *period,
                frames.clone(),
                coefficients.iter().map(|c| Vec3::from(*c)).collect(),
                *psi,
            ),
            FamilySpec::Coefficients { params, period, kappa1, kappa2, lambda, initial } => {
                PlaneFamily::from_coefficients(params, *period, kappa1, kappa2, lambda, *initial)
            }
            FamilySpec::Involute { v0, v1, n } => involute_family(*v0, *v1, *n),
        }
    }

    pub fn from_family(family: &PlaneFamily) -> Self {
        FamilySpec::Frames {
            params: family.params().to_vec(),
            period: family.period(),
            frames: family.frames().to_vec(),
            coefficients: family.coefficients().iter().map(|c| [c.x, c.y, c.z]).collect(),
            psi: family.monodromy_angle(),
        }
    }
}

/// Binormal curve of a synthesis problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BinormalSpec {
    Trochoid {
        #[serde(default = "default_trochoid_a")]
        a: f64,
        #[serde(default = "default_trochoid_m")]
        m: u32,
        #[serde(default = "default_trochoid_eps")]
        eps: f64,
    },
    GreatCircle,
    /// Samples on the unit sphere, inline.
    Curve {
        curve: CurveSpec,
    },
    /// Curve file, relative to the problem file.
    File {
        path: PathBuf,
    },
}

fn default_trochoid_a() -> f64 {
    0.75
}

fn default_trochoid_m() -> u32 {
    2
}

fn default_trochoid_eps() -> f64 {
    0.5
}

impl BinormalSpec {
    pub fn build(&self, base: &Path, seed: u64) -> Result<BinormalCurve> {
        match self {
            BinormalSpec::Trochoid { a, m, eps } => BinormalCurve::trochoid(*a, *m, *eps),
            BinormalSpec::GreatCircle => Ok(BinormalCurve::great_circle()),
            BinormalSpec::Curve { curve } => BinormalCurve::from_curve(&curve.build(seed)?),
            BinormalSpec::File { path } => {
                let text = std::fs::read_to_string(base.join(path))
                    .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
                BinormalCurve::from_curve(&parse_curve(&text, seed)?)
            }
        }
    }
}

/// Synthesis problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub binormal: BinormalSpec,
    #[serde(default)]
    pub basis: Basis,
    pub length_target: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_intervals: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spine_samples: Option<usize>,
}

impl ProblemSpec {
    pub fn build(&self, base: &Path, seed: u64) -> Result<SpineSynthesisProblem> {
        let mut p =
            SpineSynthesisProblem::new(self.binormal.build(base, seed)?, self.basis.clone(), self.length_target);
        p.sigma_min = self.sigma_min;
        p.quad_intervals = self.quad_intervals.unwrap_or(DEFAULT_QUAD_INTERVALS);
        p.spine_samples = self.spine_samples.unwrap_or(DEFAULT_SPINE_SAMPLES);
        p.validate()?;
        Ok(p)
    }
}

/// Serialized [`SynthesisResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub coefficients: Vec<f64>,
    pub basis: Basis,
    pub period: f64,
    pub sigma_samples: Vec<f64>,
    pub spine: CurveSpec,
    pub achieved_total_torsion: f64,
    pub energy: f64,
    pub closing_residual: f64,
    pub length: f64,
    pub length_target: f64,
    pub binormal: BinormalShape,
    pub diagnostics: SynthesisDiagnostics,
}

impl ResultFile {
    pub fn from_result(r: &SynthesisResult) -> Self {
        ResultFile {
            coefficients: r.sigma.coefficients.clone(),
            basis: r.sigma.basis.clone(),
            period: r.sigma.period,
            sigma_samples: r.sigma_samples.clone(),
            spine: CurveSpec::from_curve(&r.spine),
            achieved_total_torsion: r.achieved_total_torsion,
            energy: r.energy,
            closing_residual: r.closing_residual,
            length: r.length,
            length_target: r.length_target,
            binormal: r.binormal.shape().clone(),
            diagnostics: r.diagnostics.clone(),
        }
    }

    pub fn sigma(&self) -> BasisExpansion {
        BasisExpansion { basis: self.basis.clone(), period: self.period, coefficients: self.coefficients.clone() }
    }
}

/// Contents of a curve file: a [`CurveSpec`] or a synthesis result, whose
/// spine is used.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveFile {
    Spec(CurveSpec),
    Result(Box<ResultFile>),
}

impl CurveFile {
    pub fn read(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(parse_error)?;
        if value.get("spine").is_some() {
            return Ok(CurveFile::Result(Box::new(serde_json::from_value(value).map_err(parse_error)?)));
        }
        Ok(CurveFile::Spec(serde_json::from_value(value).map_err(parse_error)?))
    }

    pub fn build(&self, seed: u64) -> Result<SampledCurve3> {
        match self {
            CurveFile::Spec(spec) => spec.build(seed),
            CurveFile::Result(r) => r.spine.build(seed),
        }
    }
}

/// Contents of a family file: a [`FamilySpec`], or a curve file taken as a
/// spine.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyFile {
    Family(FamilySpec),
    Spine(CurveFile),
}

impl FamilyFile {
    pub fn read(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(parse_error)?;
        let kind = value.get("type").and_then(|t| t.as_str()).unwrap_or("");
        if matches!(kind, "spine" | "frames" | "coefficients" | "involute") {
            return Ok(FamilyFile::Family(serde_json::from_value(value).map_err(parse_error)?));
        }
        Ok(FamilyFile::Spine(CurveFile::read(text)?))
    }

    pub fn build(&self, seed: u64) -> Result<PlaneFamily> {
        match self {
            FamilyFile::Family(spec) => spec.build(seed),
            FamilyFile::Spine(c) => PlaneFamily::from_spine(&c.build(seed)?),
        }
    }
}

pub fn parse_curve(text: &str, seed: u64) -> Result<SampledCurve3> {
    CurveFile::read(text)?.build(seed)
}

pub fn parse_family(text: &str, seed: u64) -> Result<PlaneFamily> {
    FamilyFile::read(text)?.build(seed)
}

pub fn parse_profile(text: &str) -> Result<PlaneCurve> {
    serde_json::from_str::<ProfileSpec>(text).map_err(parse_error)?.build()
}

/// Wraps a serde failure; the CLI maps these to its parse exit code.
pub fn parse_error(e: serde_json::Error) -> Error {
    Error::InvalidInput(format!("parse error: {e}"))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
