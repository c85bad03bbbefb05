//! Small numerical kernels shared by the geometry modules: finite-difference
//! weights on arbitrary nodes, local polynomial stencils on (periodic)
//! parameter grids, Gauss-Legendre rules and a few angle utilities.

use std::f64::consts::PI;

/// Maximum derivative order supported by the stencil helpers.
pub const MAX_ORDER: usize = 3;

/// Width of the node window used for derivatives at grid nodes.
pub const DERIV_WIDTH: usize = 7;

/// Width of the node window used for interpolation between nodes (degree 5).
pub const INTERP_WIDTH: usize = 6;

/// Finite-difference weights for derivatives `0..=m` at `z` from nodes `xs`
/// (Fornberg's recursion). `w[j][k]` is the weight of node `j` for the
/// `k`-th derivative.
pub fn fd_weights(z: f64, xs: &[f64], m: usize) -> Vec<[f64; MAX_ORDER + 1]> {
    assert!(m <= MAX_ORDER);
    let n = xs.len();
    let mut c = vec![[0.0; MAX_ORDER + 1]; n];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

/// A parameter grid, optionally periodic. Periodic grids store one period
/// without the duplicated endpoint; node `j` outside `0..n` refers to the
/// wrapped node shifted by whole periods.
#[derive(Debug, Clone, Copy)]
pub struct ParamGrid<'a> {
    pub params: &'a [f64],
    pub period: Option<f64>,
}

impl<'a> ParamGrid<'a> {
    pub fn new(params: &'a [f64], period: Option<f64>) -> Self {
        Self { params, period }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Number of whole periods and wrapped index for an extended node index.
    pub fn split(&self, j: isize) -> (isize, usize) {
        let n = self.params.len() as isize;
        match self.period {
            Some(_) => (j.div_euclid(n), j.rem_euclid(n) as usize),
            None => (0, j.clamp(0, n - 1) as usize),
        }
    }

    pub fn param_at(&self, j: isize) -> f64 {
        let (k, r) = self.split(j);
        self.params[r] + k as f64 * self.period.unwrap_or(0.0)
    }

    /// Node window of (at most) `width` nodes centred on node `i`.
    pub fn centered_window(&self, i: usize, width: usize) -> Vec<isize> {
        let n = self.params.len();
        match self.period {
            Some(_) => {
                let h = (width / 2) as isize;
                (-h..=h).map(|d| i as isize + d).collect()
            }
            None => {
                let w = width.min(n);
                let start = (i as isize - (w / 2) as isize).clamp(0, (n - w) as isize);
                (start..start + w as isize).collect()
            }
        }
    }

    /// Locate the interval containing `t`: returns `(k, t')` where node `k`
    /// (extended index) satisfies `param_at(k) <= t' < param_at(k+1)` and
    /// `t'` equals `t` (no reduction is applied; extended indices absorb the
    /// period count).
    pub fn locate(&self, t: f64) -> isize {
        let n = self.params.len();
        match self.period {
            Some(p) => {
                let t0 = self.params[0];
                let k = ((t - t0) / p).floor();
                let tr = t - k * p;
                let i = upper_interval(self.params, tr).min(n - 1);
                i as isize + k as isize * n as isize
            }
            None => upper_interval(self.params, t).min(n.saturating_sub(2)) as isize,
        }
    }

    /// Window of `width` nodes used for interpolation inside interval `k`.
    pub fn interp_window(&self, k: isize, width: usize) -> Vec<isize> {
        let n = self.params.len();
        match self.period {
            Some(_) => {
                let lo = k - (width as isize / 2 - 1);
                (lo..lo + width as isize).collect()
            }
            None => {
                let w = width.min(n);
                let start = (k - (w as isize / 2 - 1)).clamp(0, (n - w) as isize);
                (start..start + w as isize).collect()
            }
        }
    }
}

/// Index `i` with `params[i] <= t < params[i+1]`, clamped at 0.
fn upper_interval(params: &[f64], t: f64) -> usize {
    let idx = params.partition_point(|&p| p <= t);
    idx.saturating_sub(1)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(points: usize) -> (&'static [f64], &'static [f64]) {
    const X4: [f64; 4] =
        [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
    const W4: [f64; 4] =
        [0.347_854_845_137_453_8, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_8];
    const X8: [f64; 8] = [
        -0.960_289_856_497_536_3,
        -0.796_666_477_413_626_7,
        -0.525_532_409_916_329,
        -0.183_434_642_495_649_8,
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W8: [f64; 8] = [
        0.101_228_536_290_376_3,
        0.222_381_034_453_374_5,
        0.313_706_645_877_887_3,
        0.362_683_783_378_362,
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    match points {
        4 => (&X4, &W4),
        8 => (&X8, &W8),
        _ => panic!("unsupported Gauss-Legendre order {points}"),
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut a = theta.rem_euclid(two_pi);
    if a > PI {
        a -= two_pi;
    }
    a
}

/// Best rational approximation `k/n` of `x` with `n <= max_den`, found from
/// the continued-fraction convergents of `x`. Returns the first convergent
/// within `tol` of `x`, or `None` ("irrational-like").
pub fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    // convergents h_k / k_k
    let (mut h_prev, mut h) = (1i64, x.floor() as i64);
    let (mut k_prev, mut k) = (0i64, 1i64);
    let mut frac = x - x.floor();
    loop {
        if (x - h as f64 / k as f64).abs() < tol {
            return Some((h, k));
        }
        if frac.abs() < 1e-15 {
            return None;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as i64;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_den {
            return None;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}
