use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::MongeSurface;
use crate::curve::ProfileMap;
use crate::frames::MAX_DENOMINATOR;
use crate::numeric::{rational_approx, wrap_angle};

/// Global topology of the swept image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureKind {
    /// The plane family is not closed.
    Open,
    /// Closed frame, open profile.
    Cylinder,
    /// Closed frame, closed profile.
    MongeTorus,
    /// The frame turns by `2 pi k / n` and the profile has that symmetry;
    /// the parallels close after `degree` turns.
    CoveredTorus {
        degree: u32,
    },
    /// Orientation-reversing identification of an open profile.
    MoebiusStrip,
    /// Orientation-reversing identification of a closed profile.
    KleinBottle,
    /// Irrational-like frame turn with a circle about the origin: the image
    /// closes although the parallels do not.
    TubularTorus,
    NonClosing,
}

impl ClosureKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClosureKind::Open => "open",
            ClosureKind::Cylinder => "cylinder",
            ClosureKind::MongeTorus => "monge_torus",
            ClosureKind::CoveredTorus { .. } => "covered_torus",
            ClosureKind::MoebiusStrip => "moebius_strip",
            ClosureKind::KleinBottle => "klein_bottle",
            ClosureKind::TubularTorus => "tubular_torus",
            ClosureKind::NonClosing => "non_closing",
        }
    }

    /// Whether the image is glued across the v-seam.
    pub fn glues_v_seam(&self) -> bool {
        !matches!(self, ClosureKind::Open | ClosureKind::NonClosing)
    }
}

/// Outcome of [`classify_closure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub kind: ClosureKind,
    /// Total torsion of the spine, when known.
    pub total_torsion: Option<f64>,
    /// Frame holonomy `theta` in `(-pi, pi]`; the basis turns by `-theta`
    /// per period.
    pub holonomy: Option<f64>,
    /// `(k, n)` with `theta / 2pi ~ k / n`.
    pub rational: Option<(i64, i64)>,
    pub profile_symmetry_order: Option<u32>,
    /// Number of periods after which every parallel closes.
    pub covering_degree: Option<u32>,
    /// Parameter map of the profile under the frame turn, if it exists.
    pub profile_map: Option<ProfileMap>,
    pub parallels_close: bool,
}

/// Classifies the global closure of a Monge surface. `tol` is the angle
/// tolerance (radians and `theta / 2pi` alike); profile maps are accepted
/// within `tol` times the profile size.
pub fn classify_closure(surface: &MongeSurface, tol: f64) -> ClosureReport {
    let family = surface.family();
    let profile = surface.profile();
    let mut report = ClosureReport {
        kind: ClosureKind::Open,
        total_torsion: family.total_torsion(),
        holonomy: None,
        rational: None,
        profile_symmetry_order: profile.symmetry_order(),
        covering_degree: None,
        profile_map: None,
        parallels_close: false,
    };
    if !family.is_closed() {
        return report;
    }
    let psi = family.monodromy_angle();
    let theta = wrap_angle(-psi);
    report.holonomy = Some(theta);
    report.rational = rational_approx(theta / (2.0 * PI), MAX_DENOMINATOR, tol);
    let map_tol = tol * profile.diameter().max(1e-3);
    let map = profile.rotation_map(psi, map_tol);
    report.profile_map = map;
    let closed = profile.is_closed();
    let (kind, degree) = if psi.abs() < tol {
        let kind = if closed { ClosureKind::MongeTorus } else { ClosureKind::Cylinder };
        (kind, Some(1))
    } else {
        match (report.rational, map) {
            (_, Some(m)) if !m.preserves_orientation() => {
                let kind = if closed { ClosureKind::KleinBottle } else { ClosureKind::MoebiusStrip };
                (kind, Some(2))
            }
            (Some((_, n)), Some(_)) if closed => {
                let n = n as u32;
                (ClosureKind::CoveredTorus { degree: n }, Some(n))
            }
            (None, Some(_)) if profile.is_circle_about_origin(map_tol) => (ClosureKind::TubularTorus, None),
            _ => (ClosureKind::NonClosing, None),
        }
    };
    report.kind = kind;
    report.covering_degree = degree;
    report.parallels_close = degree.is_some();
    report
}
