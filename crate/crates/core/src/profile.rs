//! Rotationally symmetric steady and expanding solitons as radial profiles.
//!
//! The metric `dr^2 + w(r)^2 g_{S^{n-1}}` with potential `f(r)` solves
//! `Ric + Hess f = rho g` exactly when
//!
//! ```text
//! w'' = [(n-2)(1 - w'^2) + w w' f' - rho w^2] / w
//! f'' = rho + (n-1) w'' / w
//! ```
//!
//! Integration starts at `r = eps` from the regular-center series and uses a
//! Dormand-Prince 5(4) pair. States between nodes come from quintic Hermite
//! segments built from the state and its first two derivatives. Higher
//! derivatives at any radius come from the Taylor expansion of the ODE
//! itself around the interpolated state.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chart::RadialFunction;
use crate::error::{Error, Result};
use crate::math;

pub const STEADY: f64 = 0.0;
pub const EXPANDING: f64 = -0.5;

/// Everything that determines a profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub n: usize,
    /// `f''(0)`.
    pub a: f64,
    pub rho: f64,
    pub eps: f64,
    pub rmax: f64,
    pub tol: f64,
}

impl ProfileParams {
    pub fn steady(n: usize, a: f64) -> Self {
        ProfileParams {
            n,
            a,
            rho: STEADY,
            eps: 1e-4,
            rmax: 100.0,
            tol: 1e-10,
        }
    }

    pub fn expanding(n: usize, a: f64) -> Self {
        ProfileParams {
            rho: EXPANDING,
            ..ProfileParams::steady(n, a)
        }
    }

    pub fn rmax(self, rmax: f64) -> Self {
        ProfileParams { rmax, ..self }
    }

    pub fn tol(self, tol: f64) -> Self {
        ProfileParams { tol, ..self }
    }

    pub fn eps(self, eps: f64) -> Self {
        ProfileParams { eps, ..self }
    }
}

/// Coefficients of `w = r + w3 r^3 + w5 r^5`, `f = f0 + a r^2/2 + f4 r^4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenterSeries {
    pub w3: f64,
    pub w5: f64,
    pub f0: f64,
    pub f4: f64,
}

fn validate(n: usize, a: f64, rho: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParams(alloc::format!(
            "profiles need dimension >= 3, got {n}"
        )));
    }
    if !a.is_finite() || a > 0.0 {
        return Err(Error::InvalidParams(alloc::format!(
            "center value a = f''(0) must be <= 0, got {a}"
        )));
    }
    if rho != STEADY && rho != EXPANDING {
        return Err(Error::RhoUnsupported(rho));
    }
    Ok(())
}

pub fn center_series(n: usize, a: f64, rho: f64) -> Result<CenterSeries> {
    validate(n, a, rho)?;
    let nf = n as f64;
    let w3 = (a - rho) / (6.0 * (nf - 1.0));
    let w5 = (-(33.0 * nf - 42.0) * w3 * w3 + (12.0 * a - 6.0 * rho) * w3) / (10.0 * (nf + 2.0));
    let f4 = (nf - 1.0) * (20.0 * w5 - 6.0 * w3 * w3) / 12.0;
    // expanders are normalized so that R + |grad f|^2 + f = 0, with R(0) = n (rho - a)
    let f0 = if rho == STEADY { 0.0 } else { -nf * (rho - a) };
    Ok(CenterSeries { w3, w5, f0, f4 })
}

/// State `(w, w', f, f')` of the regular solution at `r = eps`.
pub fn series_seed(n: usize, a: f64, rho: f64, eps: f64) -> Result<[f64; 4]> {
    if !(eps > 0.0 && eps <= 1e-2) {
        return Err(Error::InvalidParams(alloc::format!(
            "eps must lie in (0, 1e-2], got {eps}"
        )));
    }
    let s = center_series(n, a, rho)?;
    let e2 = eps * eps;
    Ok([
        eps * (1.0 + e2 * (s.w3 + s.w5 * e2)),
        1.0 + e2 * (3.0 * s.w3 + 5.0 * s.w5 * e2),
        s.f0 + e2 * (0.5 * a + s.f4 * e2),
        eps * (a + 4.0 * s.f4 * e2),
    ])
}

/// Right-hand side of the first-order system for `(w, v, f, p)`.
pub fn rhs(n: usize, rho: f64, y: &[f64; 4]) -> [f64; 4] {
    let [w, v, _, p] = *y;
    let nf = n as f64;
    let vp = ((nf - 2.0) * (1.0 - v * v) + w * v * p - rho * w * w) / w;
    [v, vp, p, rho + (nf - 1.0) * vp / w]
}

// Same system in `(w, 1 - v, f, p)`; avoids cancellation in `1 - v^2` near the center.
fn rhs_u(n: usize, rho: f64, z: &[f64; 4]) -> [f64; 4] {
    let [w, u, _, p] = *z;
    let nf = n as f64;
    let v = 1.0 - u;
    let vp = ((nf - 2.0) * u * (2.0 - u) + w * v * p - rho * w * w) / w;
    [v, -vp, p, rho + (nf - 1.0) * vp / w]
}

fn s_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len().min(b.len());
    (0..len)
        .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
        .collect()
}

fn s_div(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len().min(b.len());
    let mut q: Vec<f64> = Vec::with_capacity(len);
    for k in 0..len {
        let s: f64 = (1..=k).map(|j| b[j] * q[k - j]).sum();
        q.push((a[k] - s) / b[0]);
    }
    q
}

fn s_affine(a: &[f64], scale: f64, shift: f64) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().map(|x| x * scale).collect();
    out[0] += shift;
    out
}

fn s_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Taylor coefficients of `(w'', f'')` as series, given series for `(w, v, p)`.
fn second_derivatives(n: usize, rho: f64, w: &[f64], v: &[f64], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let num = s_add(
        &s_add(
            &s_affine(&s_mul(v, v), -(nf - 2.0), nf - 2.0),
            &s_mul(&s_mul(w, v), p),
        ),
        &s_affine(&s_mul(w, w), -rho, 0.0),
    );
    let vp = s_div(&num, w);
    let pp = s_affine(&s_div(&vp, w), nf - 1.0, rho);
    (vp, pp)
}

/// Taylor coefficients (in powers of `r - r0`) of the solution through `y0`
/// up to `order`, one vector per state component.
pub fn ode_taylor(n: usize, rho: f64, y0: &[f64; 4], order: usize) -> [Vec<f64>; 4] {
    let mut s: [Vec<f64>; 4] = [vec![y0[0]], vec![y0[1]], vec![y0[2]], vec![y0[3]]];
    for k in 0..order {
        let (vp, pp) = second_derivatives(n, rho, &s[0], &s[1], &s[3]);
        let kf = (k + 1) as f64;
        let next = [s[1][k] / kf, vp[k] / kf, s[3][k] / kf, pp[k] / kf];
        for (c, x) in s.iter_mut().zip(next) {
            c.push(x);
        }
    }
    s
}

// Dormand-Prince 5(4) tableau; the system is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 2_000_000;

/// A finished radial solution with dense output.
#[derive(Clone, Debug)]
pub struct SolitonProfile {
    pub params: ProfileParams,
    r: Vec<f64>,
    y: Vec<[f64; 4]>,
    dy: Vec<[f64; 4]>,
    d2y: Vec<[f64; 4]>,
}

pub fn integrate_profile(n: usize, a: f64, rho: f64, rmax: f64, tol: f64) -> Result<SolitonProfile> {
    let base = if rho == EXPANDING {
        ProfileParams::expanding(n, a)
    } else {
        ProfileParams { rho, ..ProfileParams::steady(n, a) }
    };
    integrate(base.rmax(rmax).tol(tol))
}

pub fn integrate(params: ProfileParams) -> Result<SolitonProfile> {
    let ProfileParams {
        n,
        a,
        rho,
        eps,
        rmax,
        tol,
    } = params;
    validate(n, a, rho)?;
    if !(rmax > 1.0) || !rmax.is_finite() {
        return Err(Error::InvalidParams(alloc::format!("rmax must exceed 1, got {rmax}")));
    }
    if !(1e-12..=1e-6).contains(&tol) {
        return Err(Error::InvalidParams(alloc::format!(
            "tol must lie in [1e-12, 1e-6], got {tol}"
        )));
    }
    let y0 = series_seed(n, a, rho, eps)?;
    let s = center_series(n, a, rho)?;
    let e2 = eps * eps;
    let u0 = -e2 * (3.0 * s.w3 + 5.0 * s.w5 * e2);

    let mut prof = SolitonProfile {
        params,
        r: Vec::new(),
        y: Vec::new(),
        dy: Vec::new(),
        d2y: Vec::new(),
    };
    prof.push_node(eps, y0);

    let mut r = eps;
    let mut y = [y0[0], u0, y0[2], y0[3]];
    let mut h = eps;
    let mut k = [[0.0f64; 4]; 7];
    k[0] = rhs_u(n, rho, &y);
    // error is measured relative to the largest magnitude seen per component
    let mut peak = y.map(math::abs);
    let mut steps = 0usize;
    while r < rmax {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::StepFailure {
                last_r: r,
                reason: "step budget exhausted",
            });
        }
        let last = r + h >= rmax;
        if last {
            h = rmax - r;
        }
        for s in 1..7 {
            let mut ys = y;
            for (c, yc) in ys.iter_mut().enumerate() {
                for (j, kj) in k.iter().enumerate().take(s) {
                    *yc += h * A[s][j] * kj[c];
                }
            }
            if ys[0] <= 0.0 {
                k[s] = [f64::NAN; 4];
            } else {
                k[s] = rhs_u(n, rho, &ys);
            }
        }
        let mut y5 = y;
        let mut err = 0.0;
        for c in 0..4 {
            for s in 0..6 {
                y5[c] += h * A[6][s] * k[s][c];
            }
            let e: f64 = (0..7).map(|s| h * E[s] * k[s][c]).sum();

            let scale = tol * math::abs(y5[c]).max(peak[c]).max(f64::MIN_POSITIVE);
            err += (e / scale) * (e / scale);
        }
        let err = math::sqrt(err / 4.0);
        if err.is_nan() {
            h *= 0.2;
        } else if err <= 1.0 {
            r = if last { rmax } else { r + h };
            y = y5;
            if !y.iter().all(|x| x.is_finite()) {
                return Err(Error::StepFailure {
                    last_r: prof.r[prof.r.len() - 1],
                    reason: "non-finite state",
                });
            }
            if y[0] <= 0.0 {
                return Err(Error::StepFailure {
                    last_r: prof.r[prof.r.len() - 1],
                    reason: "warping function reached zero",
                });
            }
            for c in 0..4 {
                peak[c] = peak[c].max(math::abs(y[c]));
            }
            prof.push_node(r, [y[0], 1.0 - y[1], y[2], y[3]]);
            k[0] = k[6];
            let fac = if err == 0.0 { 5.0 } else { 0.9 * math::pow(err, -0.2) };
            h *= fac.clamp(0.2, 5.0);
        } else {
            let fac = 0.9 * math::pow(err, -0.2);
            h *= fac.clamp(0.2, 1.0);
        }
        if h < 1e-14 * r.max(1.0) {
            return Err(Error::StepFailure {
                last_r: r,
                reason: "step size underflow",
            });
        }
    }
    Ok(prof)
}

/// Curvature of the warped metric from the closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpedCurvature {
    /// `Ric(d_r, d_r)`.
    pub ric_rr: f64,
    /// Ricci coefficient of the round metric on the fiber.
    pub ric_sph: f64,
    pub scalar: f64,
}

fn hermite(t: f64, h: f64, p0: f64, d0: f64, s0: f64, p1: f64, d1: f64, s1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    let h3 = 0.5 * t3 - t4 + 0.5 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    h0 * p0 + h1 * h * d0 + h2 * h * h * s0 + h3 * h * h * s1 + h4 * h * d1 + h5 * p1
}

impl SolitonProfile {
    fn push_node(&mut self, r: f64, y: [f64; 4]) {
        let t = ode_taylor(self.params.n, self.params.rho, &y, 2);
        self.r.push(r);
        self.y.push(y);
        self.dy.push([t[0][1], t[1][1], t[2][1], t[3][1]]);
        self.d2y.push([2.0 * t[0][2], 2.0 * t[1][2], 2.0 * t[2][2], 2.0 * t[3][2]]);
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn rho(&self) -> f64 {
        self.params.rho
    }

    pub fn a(&self) -> f64 {
        self.params.a
    }

    pub fn is_steady(&self) -> bool {
        self.params.rho == STEADY
    }

    pub fn nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn node_states(&self) -> &[[f64; 4]] {
        &self.y
    }

    pub fn rmin(&self) -> f64 {
        self.r[0]
    }

    pub fn rmax(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    /// Conservation constant `R + |grad f|^2` of a steady profile, `-n a`.
    pub fn c0(&self) -> f64 {
        -(self.params.n as f64) * self.params.a
    }

    fn segment(&self, r: f64) -> Result<usize> {
        if !(r >= self.rmin() && r <= self.rmax()) {
            return Err(Error::RadiusOutsideProfile {
                r,
                min: self.rmin(),
                max: self.rmax(),
            });
        }
        let k = self.r.partition_point(|&x| x <= r);
        Ok(k.saturating_sub(1).min(self.r.len() - 2))
    }

    /// Interpolated `(w, w', f, f')`.
    pub fn state(&self, r: f64) -> Result<[f64; 4]> {
        let k = self.segment(r)?;
        let (r0, r1) = (self.r[k], self.r[k + 1]);
        if r == r0 {
            return Ok(self.y[k]);
        }
        if r == r1 {
            return Ok(self.y[k + 1]);
        }
        let h = r1 - r0;
        let t = (r - r0) / h;
        let mut out = [0.0; 4];
        for (c, o) in out.iter_mut().enumerate() {
            *o = hermite(
                t,
                h,
                self.y[k][c],
                self.dy[k][c],
                self.d2y[k][c],
                self.y[k + 1][c],
                self.dy[k + 1][c],
                self.d2y[k + 1][c],
            );
        }
        Ok(out)
    }

    /// Taylor coefficients of `(w, w', f, f')` at `r` up to `order`.
    pub fn taylor(&self, r: f64, order: usize) -> Result<[Vec<f64>; 4]> {
        let y = self.state(r)?;
        Ok(ode_taylor(self.params.n, self.params.rho, &y, order))
    }

    /// Taylor coefficients of the scalar curvature, from the trace form
    /// `R = n rho - f'' - (n-1) w' f' / w`.
    pub fn scalar_series(&self, r: f64, order: usize) -> Result<Vec<f64>> {
        let [w, v, _, p] = self.taylor(r, order + 2)?;
        let nf = self.params.n as f64;
        let (_, pp) = second_derivatives(self.params.n, self.params.rho, &w, &v, &p);
        let lap = s_add(&pp, &s_affine(&s_div(&s_mul(&v, &p), &w), nf - 1.0, 0.0));
        let mut out = s_affine(&lap, -1.0, nf * self.params.rho);
        out.truncate(order + 1);
        Ok(out)
    }

    pub fn scalar(&self, r: f64) -> Result<f64> {
        Ok(self.scalar_series(r, 0)?[0])
    }

    pub fn scalar_derivative(&self, r: f64) -> Result<f64> {
        Ok(self.scalar_series(r, 1)?[1])
    }

    pub fn warped_curvature(&self, r: f64) -> Result<WarpedCurvature> {
        let [w, v, _, p] = self.state(r)?;
        let nf = self.params.n as f64;
        let wpp = rhs(self.params.n, self.params.rho, &[w, v, 0.0, p])[1];
        let q = 1.0 - v * v;
        Ok(WarpedCurvature {
            ric_rr: -(nf - 1.0) * wpp / w,
            ric_sph: (nf - 2.0) * q - w * wpp,
            scalar: -2.0 * (nf - 1.0) * wpp / w + (nf - 1.0) * (nf - 2.0) * q / (w * w),
        })
    }

    /// Area of the geodesic sphere of radius `r`.
    pub fn sphere_area(&self, r: f64) -> Result<f64> {
        let w = self.state(r)?[0];
        let n = self.params.n;
        Ok(math::sphere_area(n - 1) * math::powi(w, n as i32 - 1))
    }

    /// Volume of the geodesic ball of radius `r` about the center.
    pub fn volume(&self, r: f64) -> Result<f64> {
        let k = self.segment(r)?;
        let cum = self.cumulative_volume();
        Ok(cum[k] + self.area_integral(self.r[k], r)?)
    }

    fn area_integral(&self, lo: f64, hi: f64) -> Result<f64> {
        // 5-point Gauss-Legendre
        const X: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        if hi <= lo {
            return Ok(0.0);
        }
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut s = 0.0;
        for (x, w) in X.iter().zip(W) {
            s += w * self.sphere_area(mid + half * x)?;
        }
        Ok(s * half)
    }

    fn cumulative_volume(&self) -> Vec<f64> {
        let n = self.params.n;
        let eps = self.r[0];
        let mut out = Vec::with_capacity(self.r.len());
        let mut v = math::sphere_area(n - 1) * math::powi(eps, n as i32) / n as f64;
        out.push(v);
        for k in 0..self.r.len() - 1 {
            v += self.area_integral(self.r[k], self.r[k + 1]).unwrap_or(f64::NAN);
            out.push(v);
        }
        out
    }

    /// Profile invariants: `w > 0`, `f` strictly decreasing (or constant
    /// when `a = 0`), and `0 < w' <= 1` for steady profiles.
    pub fn invariants_hold(&self) -> bool {
        let flat = self.params.a == 0.0 && self.is_steady();
        self.y.iter().enumerate().all(|(i, y)| {
            let w_ok = y[0] > 0.0;
            let f_ok = if flat { y[3] == 0.0 } else { y[3] < 0.0 || i == 0 && y[3] <= 0.0 };
            let v_ok = !self.is_steady() || (y[1] > 0.0 && y[1] <= 1.0 + 1e-12);
            w_ok && f_ok && v_ok
        }) && self.r.windows(2).all(|p| p[1] > p[0])
    }
}

/// Warping function of a profile as a radial Taylor source.
#[derive(Clone, Debug)]
pub struct ProfileWarp(pub Arc<SolitonProfile>);

impl RadialFunction for ProfileWarp {
    fn taylor(&self, r: f64, order: usize) -> Vec<f64> {
        match self.0.taylor(r, order) {
            Ok([w, ..]) => w,
            Err(_) => vec![f64::NAN; order + 1],
        }
    }
    fn range(&self) -> (f64, f64) {
        (self.0.rmin(), self.0.rmax())
    }
}

/// Potential of a profile as a radial Taylor source.
#[derive(Clone, Debug)]
pub struct ProfilePotential(pub Arc<SolitonProfile>);

impl RadialFunction for ProfilePotential {
    fn taylor(&self, r: f64, order: usize) -> Vec<f64> {
        match self.0.taylor(r, order) {
            Ok([_, _, f, _]) => f,
            Err(_) => vec![f64::NAN; order + 1],
        }
    }
    fn range(&self) -> (f64, f64) {
        (self.0.rmin(), self.0.rmax())
    }
}

/// Bounds on the potential along the profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialFit {
    /// `true` for the quadratic (expanding) bounds.
    pub quadratic: bool,
    pub c1: f64,
    pub c2: f64,
    pub f_origin: f64,
    /// Constant subtracted from `f` before the upper bound (expanders whose
    /// scalar curvature goes negative).
    pub f_shift: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// Largest excess of the lower bound over `-f` at the grid nodes.
    pub lower_violation: f64,
    /// Largest excess of `-f` over the upper bound at the grid nodes.
    pub upper_violation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    /// Mean of `r R(r)` over the last decade of the profile.
    pub decay_const: f64,
    /// `(max - min) / mean` of `r R(r)` over the last decade.
    pub decay_spread: f64,
    /// `true` when `R` vanishes identically (flat profile).
    pub degenerate: bool,
    /// Log-log slope of the ball volume over the last decade.
    pub volume_exponent: f64,
    pub potential_fit: PotentialFit,
    /// `w(eps) / eps`.
    pub center_limit: f64,
}

/// Minimum `rmax` for the asymptotic fits of steady profiles.
pub const STEADY_RMAX_FOR_FITS: f64 = 500.0;

const DECADE_SAMPLES: usize = 256;

fn log_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let (a, b) = (math::ln(lo), math::ln(hi));
    (0..m)
        .map(|i| math::exp(a + (b - a) * i as f64 / (m - 1) as f64).clamp(lo, hi))
        .collect()
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn asymptotics(profile: &SolitonProfile) -> Result<Asymptotics> {
    let rmax = profile.rmax();
    if profile.is_steady() && rmax < STEADY_RMAX_FOR_FITS {
        return Err(Error::RmaxTooSmall {
            rmax,
            need: STEADY_RMAX_FOR_FITS,
        });
    }
    let grid = log_grid(rmax / 10.0, rmax, DECADE_SAMPLES);
    let mut rr = Vec::with_capacity(grid.len());
    for &r in &grid {
        rr.push(r * profile.scalar(r)?);
    }
    let degenerate = rr.iter().all(|&x| math::abs(x) < 1e-12);
    let mean = rr.iter().sum::<f64>() / rr.len() as f64;
    let (lo, hi) = rr
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    let (decay_const, decay_spread) = if degenerate { (0.0, 0.0) } else { (mean, (hi - lo) / mean) };

    let cum = profile.cumulative_volume();
    let mut lx = Vec::with_capacity(grid.len());
    let mut ly = Vec::with_capacity(grid.len());
    for &r in &grid {
        let k = profile.segment(r)?;
        let v = cum[k] + profile.area_integral(profile.r[k], r)?;
        lx.push(math::ln(r));
        ly.push(math::ln(v));
    }
    let volume_exponent = slope(&lx, &ly);

    let f_origin = center_series(profile.n(), profile.a(), profile.rho())?.f0;
    let potential_fit = if profile.is_steady() {
        // -f is convex, so its tangent line at the last node is a lower bound
        let last = profile.y[profile.y.len() - 1];
        let c1 = -last[3];
        let c2 = c1 * rmax + last[2];
        let slack = 1e-9 * (1.0 + math::abs(c2));
        let nodes = || profile.r.iter().zip(&profile.y);
        let lower_violation = nodes().map(|(&r, y)| (c1 * r - c2 + y[2]).max(0.0)).fold(0.0, f64::max);
        let upper_violation = nodes()
            .map(|(&r, y)| (-y[2] - r - math::abs(f_origin)).max(0.0))
            .fold(0.0, f64::max);
        PotentialFit {
            quadratic: false,
            c1,
            c2,
            f_origin,
            f_shift: 0.0,
            lower_holds: lower_violation <= slack,
            upper_holds: upper_violation <= slack,
            lower_violation,
            upper_violation,
        }
    } else {
        // with Ric >= -(1/2 - e) g the upper bound holds for f - max(0, -min R)
        let mut min_scalar = f64::INFINITY;
        for &r in &profile.r {
            min_scalar = min_scalar.min(profile.scalar(r)?);
        }
        let f_shift = (-min_scalar).max(0.0);
        let sq = math::sqrt((f_shift - f_origin).max(0.0));
        // smallest c1 >= 1 making the lower gap non-increasing on the last decade
        let tail_start = profile.r.partition_point(|&r| r < rmax / 10.0);
        let c1 = profile.r[tail_start..]
            .iter()
            .zip(&profile.y[tail_start..])
            .map(|(&r, y)| r + 2.0 * y[3])
            .fold(1.0, f64::max);
        let gap = |r: f64, f: f64| 0.25 * (r - c1) * (r - c1) + f;
        let nodes = || profile.r.iter().zip(&profile.y);
        let c2 = nodes().map(|(&r, y)| gap(r, y[2])).fold(0.0, f64::max);
        let lower_violation = nodes().map(|(&r, y)| (gap(r, y[2]) - c2).max(0.0)).fold(0.0, f64::max);
        let upper_violation = nodes()
            .map(|(&r, y)| {
                let b = 0.25 * (r + 2.0 * sq) * (r + 2.0 * sq);
                ((f_shift - y[2] - b) / (1.0 + b)).max(0.0)
            })
            .fold(0.0, f64::max);
        let lower_holds = c2.is_finite() && lower_violation == 0.0 && c1 < rmax / 10.0;
        let upper_holds = upper_violation <= 1e-12;
        PotentialFit {
            quadratic: true,
            c1,
            c2,
            f_origin,
            f_shift,
            lower_holds,
            upper_holds,
            lower_violation,
            upper_violation,
        }
    };

    Ok(Asymptotics {
        decay_const,
        decay_spread,
        degenerate,
        volume_exponent,
        potential_fit,
        center_limit: profile.y[0][0] / profile.r[0],
    })
}

/// Tables of the function `psi` and the weight `u` on a steady normalized
/// profile. With `Ric + Hess f = 0` both `R` and `f` decrease, so the positive
/// `psi` satisfies `grad R - psi(R) grad f = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrendleData {
    pub s: Vec<f64>,
    pub psi: Vec<f64>,
    pub u: Vec<f64>,
    /// `R` strictly decreasing over the grid nodes.
    pub monotone: bool,
    /// Largest `|R' - psi(R) f'|` over the profile nodes in the tabulated range.
    pub x_residual: f64,
}

/// Number of tabulated `s` values.
pub const BRENDLE_POINTS: usize = 64;
/// Radius below which the tables do not reach (the center is excluded).
const BRENDLE_RSTART: f64 = 0.05;
const QUAD_TOL: f64 = 1e-10;

/// Evaluates `psi` and `u` by inverting `R(r)` on a profile.
pub struct Brendle<'a> {
    profile: &'a SolitonProfile,
    node_r: Vec<f64>,
    node_scalar: Vec<f64>,
    psi_scale: f64,
}

impl<'a> Brendle<'a> {
    /// `psi_scale` multiplies `psi` (1 for the true function).
    pub fn new(profile: &'a SolitonProfile, psi_scale: f64) -> Result<Self> {
        if !profile.is_steady() {
            return Err(Error::SteadyOnly);
        }
        let mut node_r = Vec::new();
        let mut node_scalar = Vec::new();
        for &r in profile.nodes() {
            if r >= BRENDLE_RSTART.min(profile.rmax()) {
                node_r.push(r);
                node_scalar.push(profile.scalar(r)?);
            }
        }
        let monotone = node_scalar.windows(2).all(|p| p[1] < p[0]);
        if !monotone || node_scalar.len() < 2 {
            return Err(Error::NonMonotoneScalar);
        }
        let c0 = profile.c0();
        if math::abs(c0 - 1.0) > 1e-9 {
            return Err(Error::NotNormalized(c0));
        }
        Ok(Brendle {
            profile,
            node_r,
            node_scalar,
            psi_scale,
        })
    }

    /// Realized range of `R` covered by the tables.
    pub fn range(&self) -> (f64, f64) {
        (self.node_scalar[self.node_scalar.len() - 1], self.node_scalar[0])
    }

    /// The radius with `R(r) = s`, by bisection.
    pub fn radius_of(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(s >= lo && s <= hi) {
            return Err(Error::InvalidParams(alloc::format!(
                "scalar value {s} outside the realized range [{lo}, {hi}]"
            )));
        }
        // node_scalar is decreasing
        let k = self.node_scalar.partition_point(|&x| x > s);
        if k < self.node_scalar.len() && self.node_scalar[k] == s {
            return Ok(self.node_r[k]);
        }
        let (mut a, mut b) = (self.node_r[k.saturating_sub(1)], self.node_r[k.min(self.node_r.len() - 1)]);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.profile.scalar(m)? > s {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }

    pub fn psi(&self, s: f64) -> Result<f64> {
        let r = self.radius_of(s)?;
        let df = self.profile.state(r)?[3];
        Ok(self.psi_scale * self.profile.scalar_derivative(r)? / df)
    }

    fn integrand(&self, t: f64) -> Result<f64> {
        let nf = self.profile.n() as f64;
        let psi = self.psi(t)?;
        Ok(nf / (1.0 - t) - (nf - 1.0 - (nf - 3.0) * t) / ((1.0 - t) * psi))
    }

    fn simpson(&self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let flm = self.integrand(lm)?;
        let frm = self.integrand(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || math::abs(delta) <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(self.simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + self.simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }

    /// `int_a^b` of the weight integrand, adaptive Simpson.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let fa = self.integrand(lo)?;
        let fb = self.integrand(hi)?;
        let fm = self.integrand(0.5 * (lo + hi))?;
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        Ok(sign * self.simpson(lo, hi, fa, fm, fb, whole, QUAD_TOL, 40)?)
    }

    /// `u(s) = ln psi(s) + 1/(n-1) int_{1/2}^s (...) dt`.
    pub fn u(&self, s: f64) -> Result<f64> {
        let nf = self.profile.n() as f64;
        Ok(math::ln(self.psi(s)?) + self.integral(0.5, s)? / (nf - 1.0))
    }

    /// Boundary flux of `e^{u(R)} (grad R - psi(R) grad f)` through the
    /// geodesic sphere of radius `r`.
    pub fn flux(&self, r: f64) -> Result<f64> {
        let s = self.profile.scalar(r)?;
        let rs = self.radius_of(s)?;
        let df_s = self.profile.state(rs)?[3];
        let psi = self.psi_scale * self.profile.scalar_derivative(rs)? / df_s;
        let u = math::ln(psi) + self.integral(0.5, s)? / (self.profile.n() as f64 - 1.0);
        let x = self.profile.scalar_derivative(r)? - psi * self.profile.state(r)?[3];
        Ok(self.profile.sphere_area(r)? * math::exp(u) * x)
    }
}

pub fn brendle_tables(profile: &SolitonProfile) -> Result<BrendleData> {
    let b = Brendle::new(profile, 1.0)?;
    let (lo, hi) = b.range();
    let m = BRENDLE_POINTS;
    let s: Vec<f64> = (0..m)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / m as f64)
        .collect();
    let mut psi = Vec::with_capacity(m);
    for &x in &s {
        psi.push(b.psi(x)?);
    }
    // integrate outward from 1/2 between consecutive table points
    let nf = profile.n() as f64;
    let mut integral = vec![0.0; m];
    let start = s.partition_point(|&x| x < 0.5);
    let mut acc = 0.0;
    let mut prev = 0.5;
    for i in start..m {
        acc += b.integral(prev, s[i])?;
        integral[i] = acc;
        prev = s[i];
    }
    acc = 0.0;
    prev = 0.5;
    for i in (0..start).rev() {
        acc += b.integral(prev, s[i])?;
        integral[i] = acc;
        prev = s[i];
    }
    let u: Vec<f64> = psi
        .iter()
        .zip(&integral)
        .map(|(p, q)| math::ln(*p) + q / (nf - 1.0))
        .collect();

    let mut x_residual = 0.0f64;
    for (&r, &sv) in b.node_r.iter().zip(&b.node_scalar) {
        let x = profile.scalar_derivative(r)? - b.psi(sv)? * profile.state(r)?[3];
        x_residual = x_residual.max(math::abs(x));
    }
    Ok(BrendleData {
        s,
        psi,
        u,
        monotone: true,
        x_residual,
    })
}

/// Boundary flux values at the given radii; `psi_scale = 1` is the true `psi`.
pub fn flux_scan(profile: &SolitonProfile, radii: &[f64], psi_scale: f64) -> Result<Vec<f64>> {
    let b = Brendle::new(profile, psi_scale)?;
    radii.iter().map(|&r| b.flux(r)).collect()
}
