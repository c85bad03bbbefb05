use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{
    elastic_energy, fenchel_coverage, reconstruct_spine, BasisExpansion, BinormalCurve, BinormalShape, Discretization,
    SpineSynthesisProblem,
};
use crate::curve::{torsion_integral, total_torsion, SampledCurve3};
use crate::{Error, Result};

const RANK_TOL: f64 = 1e-10;
const KKT_TOL: f64 = 1e-6;
const MAX_NEWTON: usize = 5000;

/// Solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisDiagnostics {
    pub binormal_length: f64,
    /// Trochoid size after scaling, if the binormal has one.
    pub binormal_scale: Option<f64>,
    pub sigma_min: f64,
    /// Largest achievable `min sigma` over the equality-feasible set.
    pub max_min_sigma: f64,
    pub min_sigma: f64,
    pub equality_rank: usize,
    pub free_dimension: usize,
    pub newton_iterations: usize,
    /// Norm of the Lagrangian gradient in the feasible subspace relative to
    /// the full energy gradient.
    pub kkt_residual: f64,
    pub active_constraints: usize,
    pub fenchel_coverage: f64,
}

/// Minimizer of the elastic energy over closing `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub binormal: BinormalCurve,
    pub sigma: BasisExpansion,
    /// `sigma` at the spine parameters.
    pub sigma_samples: Vec<f64>,
    pub spine: SampledCurve3,
    pub achieved_total_torsion: f64,
    pub energy: f64,
    pub closing_residual: f64,
    pub length: f64,
    pub length_target: f64,
    pub diagnostics: SynthesisDiagnostics,
}

impl SynthesisResult {
    pub fn coefficients(&self) -> &[f64] {
        &self.sigma.coefficients
    }
}

/// Solves `problem`, first rescaling the binormal to spherical length
/// `torsion_target` when given.
pub fn synthesize(problem: &SpineSynthesisProblem, torsion_target: Option<f64>) -> Result<SynthesisResult> {
    match torsion_target {
        Some(target) => {
            let mut p = problem.clone();
            p.binormal = problem.binormal.scaled_to_length(target)?;
            synthesize_in(&p)
        }
        None => synthesize_in(problem),
    }
}

/// Solves `problem` with its binormal as given.
pub fn synthesize_in(problem: &SpineSynthesisProblem) -> Result<SynthesisResult> {
    problem.validate()?;
    let n = problem.basis.len();
    let ls = problem.binormal.length();
    // work in units where sigma ~ 1
    let unit = problem.length_target / ls;
    let sigma_min = problem.sigma_min() / unit;
    let disc = Discretization::new(problem);
    let a = disc.closing_vectors(n);
    let ell = disc.length_row(n);

    let mut rows: Vec<(DVector<f64>, f64)> = (0..3).map(|k| (DVector::from_fn(n, |i, _| a[i][k]), 0.0)).collect();
    rows.push((ell, ls));
    // rows that vanish by symmetry carry no constraint
    let big = rows.iter().map(|(r, _)| r.norm()).fold(0.0, f64::max);
    let rows: Vec<_> = rows
        .into_iter()
        .filter_map(|(r, b)| {
            let nr = r.norm();
            (nr > 1e-12 * big).then(|| (r / nr, b / nr))
        })
        .collect();
    let m = rows.len().max(n);
    let mut aeq = DMatrix::zeros(m, n);
    let mut beq = DVector::zeros(m);
    for (k, (r, b)) in rows.iter().enumerate() {
        aeq.set_row(k, &r.transpose());
        beq[k] = *b;
    }
    let svd = aeq.clone().svd(true, true);
    let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    let smax = svd.singular_values.max();
    let mut c_p = DVector::zeros(n);
    let mut null = Vec::new();
    for k in 0..svd.singular_values.len() {
        let s = svd.singular_values[k];
        let v = vt.row(k).transpose();
        if s > RANK_TOL * smax {
            c_p += &v * (u.column(k).dot(&beq) / s);
        } else {
            null.push(v);
        }
    }
    let rank = n - null.len();
    let resid = (&aeq * &c_p - &beq).norm();
    if resid > 1e-8 * beq.norm().max(1.0) {
        return Err(Error::Infeasible(format!("closing and length constraints are inconsistent (residual {resid:e})")));
    }
    let d = null.len();
    let z = if d > 0 { DMatrix::from_columns(&null) } else { DMatrix::zeros(n, 0) };
    let q = disc.nodes.len();
    let bmat = DMatrix::from_fn(q, n, |i, j| disc.basis[i][j]);
    let sigma_p = &bmat * &c_p;
    let g = &bmat * &z;
    let wts = DVector::from_fn(q, |i, _| disc.nodes[i].w * disc.nodes[i].weight());

    let mut iterations = 0;
    let (y, max_min) =
        if d == 0 { (DVector::zeros(0), sigma_p.min()) } else { phase_one(&sigma_p, &g, &mut iterations)? };
    if !(max_min > sigma_min) {
        return Err(Error::Infeasible(format!(
            "no closing sigma stays above sigma_min = {:e}; best min sigma is {:e}",
            sigma_min * unit,
            max_min * unit
        )));
    }
    let (y, kkt, active) =
        if d == 0 { (y, 0.0, 0) } else { phase_two(&sigma_p, &g, &bmat, &wts, sigma_min, y, &mut iterations)? };
    let c = (&c_p + &z * &y) * unit;
    let expansion = BasisExpansion {
        basis: problem.basis.clone(),
        period: problem.binormal.period(),
        coefficients: c.iter().copied().collect(),
    };
    let sig_nodes = &bmat * &c;
    let min_sigma = sig_nodes.min();
    let recon = reconstruct_spine(&problem.binormal, &expansion, problem.spine_samples)?;
    let achieved = if recon.curve.is_closed() { total_torsion(&recon.curve)? } else { torsion_integral(&recon.curve)? };
    let energy = elastic_energy(&problem.binormal, &expansion, problem.basis.quad_intervals(problem.quad_intervals))?;
    let sigma_samples = recon.curve.params().iter().map(|&t| super::SigmaField::eval(&expansion, t)[0]).collect();
    let binormal_scale = match problem.binormal.shape() {
        BinormalShape::Trochoid { eps, .. } => Some(*eps),
        _ => None,
    };
    Ok(SynthesisResult {
        binormal: problem.binormal.clone(),
        sigma: expansion,
        sigma_samples,
        spine: recon.curve,
        achieved_total_torsion: achieved,
        energy,
        closing_residual: recon.closing_residual,
        length: recon.length,
        length_target: problem.length_target,
        diagnostics: SynthesisDiagnostics {
            binormal_length: ls,
            binormal_scale,
            sigma_min: sigma_min * unit,
            max_min_sigma: max_min * unit,
            min_sigma,
            equality_rank: rank,
            free_dimension: d,
            newton_iterations: iterations,
            kkt_residual: kkt,
            active_constraints: active,
            fenchel_coverage: fenchel_coverage(&problem.binormal),
        },
    })
}

/// Barrier objective `c . x + sum_q phi(q, (A x + o)_q)` with a separable
/// scalar term `phi` returning value, first and second derivative, or `None`
/// outside its domain.
struct Separable<'a, F> {
    a: &'a DMatrix<f64>,
    o: &'a DVector<f64>,
    c: &'a DVector<f64>,
    phi: F,
}

impl<F: Fn(usize, f64) -> Option<[f64; 3]>> Separable<'_, F> {
    fn value(&self, x: &DVector<f64>) -> Option<f64> {
        let z = self.a * x + self.o;
        let mut f = self.c.dot(x);
        for (q, zq) in z.iter().enumerate() {
            f += (self.phi)(q, *zq)?[0];
        }
        Some(f)
    }

    fn derivatives(&self, x: &DVector<f64>) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let z = self.a * x + self.o;
        let mut f = self.c.dot(x);
        let mut d1 = DVector::zeros(z.len());
        let mut d2 = DVector::zeros(z.len());
        for (q, zq) in z.iter().enumerate() {
            let [v, g, h] = (self.phi)(q, *zq)?;
            f += v;
            d1[q] = g;
            d2[q] = h.sqrt();
        }
        let grad = self.c + self.a.tr_mul(&d1);
        let scaled = DMatrix::from_fn(self.a.nrows(), self.a.ncols(), |i, j| self.a[(i, j)] * d2[i]);
        Some((f, grad, scaled.tr_mul(&scaled)))
    }
}

/// Damped Newton minimization of a barrier objective.
fn newton<F: Fn(usize, f64) -> Option<[f64; 3]>>(
    mut x: DVector<f64>,
    obj: &Separable<'_, F>,
    iterations: &mut usize,
) -> Result<DVector<f64>> {
    let mut last_step = f64::NAN;
    for _ in 0..200 {
        *iterations += 1;
        if *iterations > MAX_NEWTON {
            return Err(Error::NonConvergence { iterations: *iterations, last_step, kkt: f64::NAN });
        }
        let (f, grad, hess) =
            obj.derivatives(&x).ok_or_else(|| Error::Integration("iterate left the barrier domain".into()))?;
        let k = hess.nrows();
        let scale = hess.diagonal().amax().max(1e-300);
        let chol = (0..8)
            .find_map(|e| {
                let reg = if e == 0 { 0.0 } else { scale * 10f64.powi(e - 16) };
                (hess.clone() + DMatrix::identity(k, k) * reg).cholesky()
            })
            .ok_or_else(|| Error::Integration("barrier Hessian is not positive definite".into()))?;
        let dx = -chol.solve(&grad);
        let decrement = -grad.dot(&dx);
        // half the decrement estimates f - f*; below the resolution of f no step
        // can make progress
        if decrement < 1e-15 * (1.0 + f.abs()) {
            return Ok(x);
        }
        let mut step = 1.0;
        loop {
            let trial = &x + &dx * step;
            if let Some(ft) = obj.value(&trial) {
                if ft <= f - 0.25 * step * decrement {
                    x = trial;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-12 {
                // no further progress possible in floating point
                return Ok(x);
            }
        }
        last_step = step * dx.norm();
    }
    Ok(x)
}

/// Maximizes `min sigma` over the equality-feasible set by a log barrier on
/// `sigma_q - s`.
fn phase_one(sigma_p: &DVector<f64>, g: &DMatrix<f64>, iterations: &mut usize) -> Result<(DVector<f64>, f64)> {
    let (nq, d) = g.shape();
    let a = DMatrix::from_fn(nq, d + 1, |i, j| if j < d { g[(i, j)] } else { -1.0 });
    let mut c = DVector::zeros(d + 1);
    c[d] = -1.0;
    let mut x = DVector::zeros(d + 1);
    x[d] = sigma_p.min() - 1.0;
    let mut mu = 1.0;
    while mu * nq as f64 > 1e-10 {
        let obj = Separable {
            a: &a,
            o: sigma_p,
            c: &c,
            phi: |_, sl: f64| (sl > 0.0).then(|| [-mu * sl.ln(), -mu / sl, mu / (sl * sl)]),
        };
        x = newton(x, &obj, iterations)?;
        mu *= 0.1;
    }
    let y = x.rows(0, d).into_owned();
    let best = (sigma_p + g * &y).min();
    Ok((y, best))
}

/// Minimizes the energy subject to `sigma >= sigma_min` along a log barrier
/// path; returns the iterate, the KKT residual and the active set size.
fn phase_two(
    sigma_p: &DVector<f64>,
    g: &DMatrix<f64>,
    bmat: &DMatrix<f64>,
    wts: &DVector<f64>,
    sigma_min: f64,
    y0: DVector<f64>,
    iterations: &mut usize,
) -> Result<(DVector<f64>, f64, usize)> {
    let (nq, d) = g.shape();
    let e0 = (sigma_p + g * &y0).iter().zip(wts.iter()).map(|(s, w)| w / s).sum::<f64>().max(1e-300);
    let w: DVector<f64> = wts / e0;
    let c = DVector::zeros(d);
    let mut mu = 1e-3;
    let mut y = y0;
    loop {
        let obj = Separable {
            a: g,
            o: sigma_p,
            c: &c,
            phi: |q: usize, s: f64| {
                let sl = s - sigma_min;
                (sl > 0.0).then(|| {
                    let wq = w[q];
                    [wq / s - mu * sl.ln(), -wq / (s * s) - mu / sl, 2.0 * wq / (s * s * s) + mu / (sl * sl)]
                })
            },
        };
        y = newton(y, &obj, iterations)?;
        if mu * (nq as f64) < 1e-14 {
            break;
        }
        mu *= 0.1;
    }
    // KKT check with barrier multipliers mu / slack
    let sig = sigma_p + g * &y;
    let mut dz = DVector::zeros(nq);
    let mut de = DVector::zeros(nq);
    let mut active = 0;
    for q in 0..nq {
        let s = sig[q];
        let sl = s - sigma_min;
        de[q] = -w[q] / (s * s);
        dz[q] = de[q] - mu / sl;
        if sl < 1e-6 * sigma_min.max(1e-3) {
            active += 1;
        }
    }
    let grad_c = bmat.tr_mul(&de);
    let lagr = g.tr_mul(&dz);
    let kkt = if grad_c.norm() > 0.0 { lagr.norm() / grad_c.norm() } else { lagr.norm() };
    if kkt > KKT_TOL {
        return Err(Error::NonConvergence { iterations: *iterations, last_step: 0.0, kkt });
    }
    Ok((y, kkt, active))
}
