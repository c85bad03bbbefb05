use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{singularity_type, ClosureKind, ClosureReport, MongeSurface, SingularPointInfo};
use crate::curve::Vec3;
use crate::error::{Error, Result};

/// How the last row of vertices continues onto the first one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SeamMap {
    /// No identification: the v direction is open.
    None,
    /// Column `i` continues into column `i + shift`; row `j` is offset by
    /// `-shear * j / nv` grid steps in u.
    Shift { shift: i64, shear: f64 },
    /// Column `i` continues into column `pivot - i`; all rows are offset by
    /// `offset` in u.
    Reflection { pivot: i64, offset: f64 },
}

/// Layout and gluing information stored with a mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshHeader {
    pub nu: usize,
    pub nv: usize,
    pub u_closed: bool,
    pub seam: SeamMap,
    pub seam_residual: f64,
    pub kind: ClosureKind,
    pub singular_vertices: Vec<SingularPointInfo>,
}

/// Quad mesh on an `nu x nv` vertex grid, vertex `(i, j)` at index `j * nu + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadMesh {
    pub vertices: Vec<Vec3>,
    pub quads: Vec<[usize; 4]>,
    pub header: Option<MeshHeader>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Emit singular vertices (annotated) instead of failing.
    pub allow_singular: bool,
    /// Largest accepted seam mismatch, relative to the surface size.
    pub seam_tol: f64,
    /// Margin magnitude below which a vertex counts as singular.
    pub singular_tol: f64,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self { allow_singular: false, seam_tol: 1e-9, singular_tol: 1e-9 }
    }
}

/// Builds the quad mesh of `surface`, gluing the v-seam as `closure` prescribes.
pub fn make_mesh(
    surface: &MongeSurface,
    nu: usize,
    nv: usize,
    closure: &ClosureReport,
    opts: &MeshOptions,
) -> Result<QuadMesh> {
    let u_closed = surface.profile().is_closed();
    let glue = closure.kind.glues_v_seam() && surface.family().is_closed();
    if nu < if u_closed { 3 } else { 2 } || nv < if glue { 3 } else { 2 } {
        return Err(Error::InvalidInput("mesh grid too small".into()));
    }
    let (u0, u1) = surface.u_domain();
    let (v0, v1) = surface.v_domain();
    let lu = u1 - u0;
    let h = if u_closed { lu / nu as f64 } else { lu / (nu - 1) as f64 };
    let vs: Vec<f64> = if glue {
        (0..nv).map(|j| v0 + (v1 - v0) * j as f64 / nv as f64).collect()
    } else {
        (0..nv).map(|j| v0 + (v1 - v0) * j as f64 / (nv - 1) as f64).collect()
    };

    let map = closure
        .profile_map
        .filter(|_| glue && closure.kind != ClosureKind::MongeTorus && closure.kind != ClosureKind::Cylinder);
    let seam = if !glue {
        SeamMap::None
    } else {
        match map {
            None => SeamMap::Shift { shift: 0, shear: 0.0 },
            Some(m) if m.preserves_orientation() => {
                let c = if u_closed { m.offset.rem_euclid(lu) } else { m.offset };
                let steps = c / h;
                let shift = steps.floor();
                SeamMap::Shift { shift: shift as i64, shear: steps - shift }
            }
            Some(m) => {
                if u_closed {
                    let c = m.offset - 2.0 * u0;
                    let offset = c.rem_euclid(h) / 2.0;
                    SeamMap::Reflection { pivot: ((c - 2.0 * offset) / h).round() as i64, offset }
                } else {
                    SeamMap::Reflection { pivot: (nu - 1) as i64, offset: 0.0 }
                }
            }
        }
    };
    let u_at = |i: f64, j: usize| -> f64 {
        match seam {
            SeamMap::Shift { shear, .. } => u0 + (i - shear * j as f64 / nv as f64) * h,
            SeamMap::Reflection { offset, .. } => u0 + offset + i * h,
            SeamMap::None => u0 + i * h,
        }
    };
    let continuation = |i: usize| -> Option<usize> {
        let wrap = |k: i64| -> Option<usize> {
            if u_closed {
                Some(k.rem_euclid(nu as i64) as usize)
            } else {
                (0..nu as i64).contains(&k).then_some(k as usize)
            }
        };
        match seam {
            SeamMap::Shift { shift, .. } => wrap(i as i64 + shift),
            SeamMap::Reflection { pivot, .. } => wrap(pivot - i as i64),
            SeamMap::None => None,
        }
    };

    let mut vertices = Vec::with_capacity(nu * nv);
    let mut singular_vertices = Vec::new();
    for (j, &v) in vs.iter().enumerate() {
        for i in 0..nu {
            let u = u_at(i as f64, j);
            if surface.margin_at(u, v).abs() <= opts.singular_tol {
                if !opts.allow_singular {
                    return Err(Error::SingularPoint { u, v });
                }
                singular_vertices.push(singularity_type(surface, u, v));
            }
            vertices.push(surface.point_unchecked(u, v));
        }
    }

    let scale = bbox_diagonal(&vertices).max(1e-300);
    let mut seam_residual: f64 = 0.0;
    if glue {
        for i in 0..nu {
            let Some(k) = continuation(i) else {
                return Err(Error::SeamMismatch { residual: f64::INFINITY, tolerance: opts.seam_tol * scale });
            };
            let end = surface.point_unchecked(u_at(i as f64, nv), v0 + (v1 - v0));
            seam_residual = seam_residual.max((end - vertices[k]).norm());
        }
        if seam_residual > opts.seam_tol * scale {
            return Err(Error::SeamMismatch { residual: seam_residual, tolerance: opts.seam_tol * scale });
        }
    }

    let idx = |i: usize, j: usize| j * nu + i;
    let cols = if u_closed { nu } else { nu - 1 };
    let mut quads = Vec::new();
    for j in 0..nv - 1 {
        for i in 0..cols {
            let i1 = (i + 1) % nu;
            quads.push([idx(i, j), idx(i1, j), idx(i1, j + 1), idx(i, j + 1)]);
        }
    }
    if glue {
        let j = nv - 1;
        for i in 0..cols {
            let i1 = (i + 1) % nu;
            let (a, b) = (continuation(i).unwrap(), continuation(i1).unwrap());
            quads.push([idx(i, j), idx(i1, j), idx(b, 0), idx(a, 0)]);
        }
    }
    Ok(QuadMesh {
        vertices,
        quads,
        header: Some(MeshHeader { nu, nv, u_closed, seam, seam_residual, kind: closure.kind, singular_vertices }),
    })
}

fn bbox_diagonal(pts: &[Vec3]) -> f64 {
    let mut lo = pts[0];
    let mut hi = pts[0];
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

/// Combinatorial and topological summary of a quad mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshCheck {
    pub vertices: usize,
    pub faces: usize,
    pub edges: usize,
    pub boundary_edges: usize,
    pub nonmanifold_edges: usize,
    pub degenerate_faces: usize,
    /// Every edge is shared by exactly two faces.
    pub watertight: bool,
    /// A consistent face orientation exists (manifold meshes only).
    pub orientable: bool,
    pub euler_characteristic: i64,
}

/// Watertightness, orientability and Euler characteristic.
pub fn mesh_check(mesh: &QuadMesh) -> MeshCheck {
    // edge -> list of (face, +1 if traversed low->high)
    let mut edges: BTreeMap<(usize, usize), Vec<(usize, i8)>> = BTreeMap::new();
    let mut degenerate_faces = 0;
    for (f, q) in mesh.quads.iter().enumerate() {
        let mut distinct = q.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 4 {
            degenerate_faces += 1;
        }
        for k in 0..4 {
            let (a, b) = (q[k], q[(k + 1) % 4]);
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            edges.entry(key).or_default().push((f, if a < b { 1 } else { -1 }));
        }
    }
    let boundary_edges = edges.values().filter(|e| e.len() == 1).count();
    let nonmanifold_edges = edges.values().filter(|e| e.len() > 2).count();

    let mut neighbours: Vec<Vec<(usize, i8)>> = vec![Vec::new(); mesh.quads.len()];
    for list in edges.values() {
        if let [(f, df), (g, dg)] = list[..] {
            // consistent iff the shared edge is traversed in opposite directions
            let same = df == dg;
            neighbours[f].push((g, if same { -1 } else { 1 }));
            neighbours[g].push((f, if same { -1 } else { 1 }));
        }
    }
    let mut orientation = vec![0i8; mesh.quads.len()];
    let mut orientable = nonmanifold_edges == 0;
    for start in 0..mesh.quads.len() {
        if orientation[start] != 0 {
            continue;
        }
        orientation[start] = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            for &(g, rel) in &neighbours[f] {
                let want = orientation[f] * rel;
                if orientation[g] == 0 {
                    orientation[g] = want;
                    queue.push_back(g);
                } else if orientation[g] != want {
                    orientable = false;
                }
            }
        }
    }
    MeshCheck {
        vertices: mesh.vertices.len(),
        faces: mesh.quads.len(),
        edges: edges.len(),
        boundary_edges,
        nonmanifold_edges,
        degenerate_faces,
        watertight: boundary_edges == 0 && nonmanifold_edges == 0 && !mesh.quads.is_empty(),
        orientable,
        euler_characteristic: mesh.vertices.len() as i64 - edges.len() as i64 + mesh.quads.len() as i64,
    }
}

const HEADER_TAG: &str = "# monge-kit-header ";

impl QuadMesh {
    /// Wavefront OBJ text: `v` records, then 1-based quad `f` records. The
    /// header, if any, is carried in a comment line.
    pub fn to_obj(&self) -> String {
        let mut out = String::from("# monge-kit quad mesh\n");
        if let Some(h) = &self.header {
            let _ = writeln!(out, "{HEADER_TAG}{}", serde_json::to_string(h).expect("header serializes"));
        }
        for v in &self.vertices {
            let _ = writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z);
        }
        for q in &self.quads {
            let _ = writeln!(out, "f {} {} {} {}", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1);
        }
        out
    }
}

/// Parses OBJ text with `v` and quad `f` records (`f a/b/c` forms accepted).
pub fn read_obj(text: &str) -> Result<QuadMesh> {
    let mut vertices = Vec::new();
    let mut quads = Vec::new();
    let mut header = None;
    for (lineno, line) in text.lines().enumerate() {
        let bad = |what: &str| Error::InvalidInput(format!("line {}: {what}", lineno + 1));
        if let Some(json) = line.strip_prefix(HEADER_TAG) {
            header = Some(serde_json::from_str(json).map_err(|e| bad(&e.to_string()))?);
            continue;
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it
                    .take(3)
                    .map(|s| s.parse::<f64>().map_err(|_| bad("bad vertex coordinate")))
                    .collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let ids: Vec<usize> = it
                    .map(|s| {
                        s.split('/')
                            .next()
                            .and_then(|x| x.parse::<usize>().ok())
                            .filter(|&x| x >= 1)
                            .map(|x| x - 1)
                            .ok_or_else(|| bad("bad face index"))
                    })
                    .collect::<Result<_>>()?;
                let q: [usize; 4] = ids.try_into().map_err(|_| bad("only quad faces are supported"))?;
                quads.push(q);
            }
            None | Some("vn" | "vt" | "vp" | "o" | "g" | "s" | "l" | "mtllib" | "usemtl") => {}
            Some(t) if t.starts_with('#') => {}
            Some(t) => return Err(bad(&format!("unknown statement `{t}`"))),
        }
    }
    if vertices.is_empty() {
        return Err(Error::InvalidInput("mesh has no vertices".into()));
    }
    if let Some(&k) = quads.iter().flatten().find(|&&k| k >= vertices.len()) {
        return Err(Error::InvalidInput(format!("face index {} out of range", k + 1)));
    }
    Ok(QuadMesh { vertices, quads, header })
}
