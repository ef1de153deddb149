//! Level sets of the potential: adapted frames, second fundamental forms and
//! the level-surface identities of steady solitons.
//!
//! Sign convention: `nu = grad f / |grad f|` and `h(X, Y) = Hess f(X, Y) / |grad f|`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chart::{ChartPoint, Layout, MetricChart};
use crate::curvature::Depth;
use crate::error::{Error, Result};
use crate::math;
use crate::soliton::{d_tensor_at, halton_points, PointData, SolitonStructure, SAMPLE_SEED};
use crate::tensor::{contract_full, Tensor};

/// `|grad f|` below this is treated as a critical point.
pub const CRITICAL_GRAD: f64 = 1e-8;
/// Root-finding tolerance in `f` when locating level points.
pub const LEVEL_TOL: f64 = 1e-12;
/// Default pass threshold of the level-set batteries.
pub const BATTERY_TOL: f64 = 1e-6;

/// Orthonormal frame with `e_1 = grad f / |grad f|`, as contravariant
/// coordinate components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptedFrame {
    pub n: usize,
    pub vectors: Vec<Vec<f64>>,
}

fn inner(g: &Tensor, u: &[f64], v: &[f64]) -> f64 {
    let n = g.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += g.at2(i, j) * u[i] * v[j];
        }
    }
    s
}

impl AdaptedFrame {
    /// Gram-Schmidt of `grad f, d_1, .., d_n` against `g`, skipping
    /// directions that are numerically dependent.
    pub fn build(g: &Tensor, grad_up: &[f64]) -> Result<Self> {
        let n = g.n;
        let norm = math::sqrt(inner(g, grad_up, grad_up));
        if !(norm > CRITICAL_GRAD) {
            return Err(Error::CriticalPoint(norm));
        }
        let mut vectors: Vec<Vec<f64>> = vec![grad_up.iter().map(|x| x / norm).collect()];
        for axis in 0..n {
            if vectors.len() == n {
                break;
            }
            let mut v = vec![0.0; n];
            v[axis] = 1.0;
            for _ in 0..2 {
                for e in &vectors {
                    let c = inner(g, &v, e);
                    for (vi, ei) in v.iter_mut().zip(e) {
                        *vi -= c * ei;
                    }
                }
            }
            let len = math::sqrt(inner(g, &v, &v));
            if len > 1e-6 {
                vectors.push(v.iter().map(|x| x / len).collect());
            }
        }
        Ok(AdaptedFrame { n, vectors })
    }

    /// `max |g(e_a, e_b) - delta_ab|`.
    pub fn orthonormality_residual(&self, g: &Tensor) -> f64 {
        let n = self.n;
        math::max_abs((0..n * n).map(|k| {
            let (a, b) = (k / n, k % n);
            inner(g, &self.vectors[a], &self.vectors[b]) - (a == b) as u8 as f64
        }))
    }

    /// Frame components of a covariant tensor of any rank.
    pub fn components(&self, t: &Tensor) -> Tensor {
        let n = self.n;
        let r = t.rank;
        Tensor::from_fn(n, r, |frame| {
            let mut s = 0.0;
            let mut idx = vec![0usize; r];
            for k in 0..t.data.len() {
                crate::tensor::unflat(n, k, &mut idx);
                let mut w = t.data[k];
                for (slot, &i) in idx.iter().enumerate() {
                    w *= self.vectors[frame[slot]][i];
                    if w == 0.0 {
                        break;
                    }
                }
                s += w;
            }
            s
        })
    }
}

pub fn adapted_frame(s: &SolitonStructure, p: &ChartPoint) -> Result<AdaptedFrame> {
    let d = PointData::new(s, p, Depth::Riemann)?;
    AdaptedFrame::build(&d.pack.g, &d.grad_up.data)
}

/// Second fundamental form and related data of the level set through a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSurfaceData {
    pub frame: AdaptedFrame,
    /// `h_ab`, `a, b = 2..n`, row-major `(n-1) x (n-1)`.
    pub h: Vec<f64>,
    pub mean_curvature: f64,
    /// `|h - H/(n-1) g|`.
    pub traceless_norm: f64,
    /// `grad R (e_a)`, `a = 2..n`.
    pub tangential_grad_r: Vec<f64>,
    pub grad_norm: f64,
    pub value: f64,
    pub scalar: f64,
    /// Ricci tensor in the frame, row-major `n x n`.
    pub ricci: Vec<f64>,
    /// `-Ric_ab / |grad f|`, equal to `h_ab` on steady solitons.
    pub h_from_ricci: Vec<f64>,
}

fn level_from(d: &PointData) -> Result<LevelSurfaceData> {
    let n = d.pack.n;
    let frame = AdaptedFrame::build(&d.pack.g, &d.grad_up.data)?;
    let grad_norm = math::sqrt(d.grad_norm2());
    let hess = frame.components(&d.hess);
    let ric = frame.components(&d.pack.ric);
    let m = n - 1;
    let mut h = Vec::with_capacity(m * m);
    let mut h_from_ricci = Vec::with_capacity(m * m);
    for a in 1..n {
        for b in 1..n {
            h.push(hess.at2(a, b) / grad_norm);
            h_from_ricci.push(-ric.at2(a, b) / grad_norm);
        }
    }
    let mean: f64 = (0..m).map(|a| h[a * m + a]).sum();
    let mut tl = 0.0;
    for a in 0..m {
        for b in 0..m {
            let v = h[a * m + b] - if a == b { mean / m as f64 } else { 0.0 };
            tl += v * v;
        }
    }
    let tangential_grad_r = match &d.pack.grad_scalar {
        Some(dr) => (1..n)
            .map(|a| (0..n).map(|i| dr.data[i] * frame.vectors[a][i]).sum())
            .collect(),
        None => vec![f64::NAN; m],
    };
    Ok(LevelSurfaceData {
        frame,
        h,
        mean_curvature: mean,
        traceless_norm: math::sqrt(tl),
        tangential_grad_r,
        grad_norm,
        value: d.f.value,
        scalar: d.pack.scalar,
        ricci: ric.data,
        h_from_ricci,
    })
}

pub fn level_data(s: &SolitonStructure, p: &ChartPoint) -> Result<LevelSurfaceData> {
    let d = PointData::new(s, p, Depth::Cotton)?;
    level_from(&d)
}

/// Both sides of the `|D|^2` level-surface identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct D2Check {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / max(lhs, 1e-14)`.
    pub residual: f64,
}

pub fn check_d2(s: &SolitonStructure, p: &ChartPoint) -> Result<D2Check> {
    let n = s.dim();
    if n < 3 {
        return Err(Error::DimensionTooLow {
            dim: n,
            what: "the D tensor",
        });
    }
    let d = PointData::new(s, p, Depth::Cotton)?;
    let lv = level_from(&d)?;
    let dt = d_tensor_at(&d);
    let lhs = contract_full(&dt, &dt, &d.pack.ginv);
    let nf = n as f64;
    let g4 = lv.grad_norm * lv.grad_norm * lv.grad_norm * lv.grad_norm;
    let dr2: f64 = lv.tangential_grad_r.iter().map(|x| x * x).sum();
    let rhs = 2.0 * g4 / ((nf - 2.0) * (nf - 2.0)) * lv.traceless_norm * lv.traceless_norm
        + dr2 / (2.0 * (nf - 1.0) * (nf - 2.0));
    Ok(D2Check {
        lhs,
        rhs,
        residual: math::abs(lhs - rhs) / lhs.max(1e-14),
    })
}

fn f_at(s: &SolitonStructure, c: &[f64]) -> Option<f64> {
    let p = ChartPoint::new(c.to_vec());
    s.potential_jet(&p, 0).ok().map(|j| j.value)
}

const RAY_CELLS: usize = 256;

/// Root of `f - c` on the segment `t -> at(t)`, `t in [0, 1]`, by scanning
/// for a sign change and refining with bisection.
fn ray_root(s: &SolitonStructure, c: f64, at: impl Fn(f64) -> Vec<f64>) -> Option<Vec<f64>> {
    let g = |t: f64| f_at(s, &at(t)).map(|v| v - c);
    let mut t0 = 0.0;
    let mut g0 = g(t0)?;
    for k in 1..=RAY_CELLS {
        let t1 = k as f64 / RAY_CELLS as f64;
        let g1 = g(t1)?;
        if g0 == 0.0 {
            return Some(at(t0));
        }
        if g0 * g1 < 0.0 {
            let (mut lo, mut hi, mut glo) = (t0, t1, g0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid)?;
                if math::abs(gm) <= LEVEL_TOL || mid <= lo || mid >= hi {
                    return Some(at(mid));
                }
                if gm * glo < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            return Some(at(0.5 * (lo + hi)));
        }
        t0 = t1;
        g0 = g1;
    }
    None
}

/// `m` points on `{f = c}` located along deterministic rays from the chart
/// center (Cartesian charts) or along radial lines (polar charts).
pub fn level_points(s: &SolitonStructure, c: f64, m: usize) -> Result<Vec<ChartPoint>> {
    let chart: &dyn MetricChart = s.chart.as_ref();
    let bounds = chart.sample_box();
    let candidates = halton_points(&bounds, SAMPLE_SEED, 64 * m.max(1));
    let mut out: Vec<ChartPoint> = Vec::with_capacity(m);
    for q in &candidates {
        if out.len() == m {
            break;
        }
        let found = match chart.layout() {
            Layout::Polar => {
                let (lo, hi) = bounds[0];
                ray_root(s, c, |t| {
                    let mut x = q.coords.clone();
                    x[0] = lo + (hi - lo) * t;
                    x
                })
            }
            Layout::Cartesian { center } => {
                let dir: Vec<f64> = q.coords.iter().zip(&center).map(|(x, c0)| x - c0).collect();
                // largest reach keeping the ray inside the sample box
                let mut reach = f64::INFINITY;
                for ((dv, (lo, hi)), c0) in dir.iter().zip(&bounds).zip(&center) {
                    if *dv > 0.0 {
                        reach = reach.min((hi - c0) / dv);
                    } else if *dv < 0.0 {
                        reach = reach.min((lo - c0) / dv);
                    }
                }
                if !reach.is_finite() || reach <= 0.0 {
                    None
                } else {
                    ray_root(s, c, |t| {
                        center
                            .iter()
                            .zip(&dir)
                            .map(|(c0, dv)| c0 + t * reach * dv)
                            .collect()
                    })
                }
            }
        };
        if let Some(x) = found {
            out.push(ChartPoint::new(x));
        }
    }
    if out.len() < m {
        return Err(Error::LevelNotFound(c));
    }
    Ok(out)
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    if v.iter().any(|x| x.is_nan()) {
        f64::NAN
    } else {
        hi - lo
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Constancy and eigenstructure of curvature along one level set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop32Report {
    pub level: f64,
    pub points: Vec<Vec<f64>>,
    pub grad_norm2_spread: f64,
    pub scalar_spread: f64,
    pub mean_curvature_spread: f64,
    /// `max |Ric(e_1, e_a)|`.
    pub max_ric_1a: f64,
    /// `max |h - H/(n-1) g|`.
    pub max_umbilicity: f64,
    /// `Ric(e_1, e_1)`, averaged over the samples.
    pub lambda: f64,
    pub lambda_spread: f64,
    /// Ricci eigenvalue on the level tangent space, averaged.
    pub mu: f64,
    pub mu_spread: f64,
    /// `max |Ric(e_a, e_b) - mu delta_ab|` at each sample.
    pub max_tangent_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Prop32Report {
    /// The largest quantity compared against the tolerance.
    pub fn max_residual(&self) -> f64 {
        math::max_abs([
            self.grad_norm2_spread,
            self.scalar_spread,
            self.mean_curvature_spread,
            self.max_ric_1a,
            self.max_umbilicity,
            self.lambda_spread,
            self.mu_spread,
            self.max_tangent_defect,
        ])
    }
}

pub fn prop32_battery(s: &SolitonStructure, c: f64, m: usize) -> Result<Prop32Report> {
    if m < 4 {
        return Err(Error::InvalidParams(alloc::format!("need at least 4 level points, got {m}")));
    }
    let n = s.dim();
    let pts = level_points(s, c, m)?;
    let mut g2 = Vec::new();
    let mut sc = Vec::new();
    let mut hh = Vec::new();
    let mut lam = Vec::new();
    let mut mu = Vec::new();
    let mut r1a = 0.0f64;
    let mut umb = 0.0f64;
    let mut tangent = 0.0f64;
    for p in &pts {
        let lv = level_data(s, p)?;
        g2.push(lv.grad_norm * lv.grad_norm);
        sc.push(lv.scalar);
        hh.push(lv.mean_curvature);
        let ric = |a: usize, b: usize| lv.ricci[a * n + b];
        lam.push(ric(0, 0));
        let m_here = (1..n).map(|a| ric(a, a)).sum::<f64>() / (n - 1) as f64;
        mu.push(m_here);
        for a in 1..n {
            r1a = r1a.max(math::abs(ric(0, a)));
            for b in 1..n {
                let want = if a == b { m_here } else { 0.0 };
                tangent = tangent.max(math::abs(ric(a, b) - want));
            }
        }
        umb = umb.max(lv.traceless_norm);
    }
    let mut rep = Prop32Report {
        level: c,
        points: pts.into_iter().map(|p| p.coords).collect(),
        grad_norm2_spread: spread(&g2),
        scalar_spread: spread(&sc),
        mean_curvature_spread: spread(&hh),
        max_ric_1a: r1a,
        max_umbilicity: umb,
        lambda: mean(&lam),
        lambda_spread: spread(&lam),
        mu: mean(&mu),
        mu_spread: spread(&mu),
        max_tangent_defect: tangent,
        tolerance: BATTERY_TOL,
        pass: false,
    };
    let worst = rep.max_residual();
    rep.pass = worst <= BATTERY_TOL;
    Ok(rep)
}

/// Intrinsic curvature of the level sets compared with the closed formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberReport {
    pub level: f64,
    /// `max |Ric^Sigma_aa(Gauss) - (2 R_aa - R/(n-1) + (n-2) H^2/(n-1)^2)|`.
    pub formula_residual: f64,
    /// `max |Ric^Sigma_aa(Gauss) - (2 R_aa + (H^2 - R)/(n-1))|`.
    pub uncorrected_gap: f64,
    /// `max |W(e_1, e_a, e_1, e_a)|`.
    pub w1a1a: f64,
    /// Mean of `Ric^Sigma_aa` over the samples.
    pub fiber_ricci: f64,
    /// `max |Ric^Sigma_ab - fiber_ricci delta_ab|`.
    pub einstein_defect: f64,
    /// `max |Ric^Sigma_aa - (n-2)/w(r)^2|` for profile-backed structures.
    pub round_fiber_defect: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn einstein_fiber_check(s: &SolitonStructure, c: f64, m: usize) -> Result<FiberReport> {
    let n = s.dim();
    if n < 4 {
        return Err(Error::DimensionTooLow {
            dim: n,
            what: "the Einstein fiber check",
        });
    }
    let nf = n as f64;
    let pts = level_points(s, c, m)?;
    let mut formula = 0.0f64;
    let mut gap = 0.0f64;
    let mut w1a1a = 0.0f64;
    let mut diag = Vec::new();
    let mut offdiag = 0.0f64;
    let mut round: Option<f64> = None;
    for p in &pts {
        let d = PointData::new(s, p, Depth::Riemann)?;
        let lv = level_from(&d)?;
        let rm = lv.frame.components(&d.pack.riem);
        let w = lv.frame.components(&d.pack.weyl);
        let k = n - 1;
        let h = |a: usize, b: usize| lv.h[(a - 1) * k + (b - 1)];
        // Gauss equation for the level set, then its Ricci tensor
        let fiber_riem = |a: usize, b: usize, cc: usize, dd: usize| {
            rm.at4(a, b, cc, dd) + h(a, cc) * h(b, dd) - h(a, dd) * h(b, cc)
        };
        let ric = |a: usize, b: usize| lv.ricci[a * n + b];
        let mut fib = vec![0.0; k * k];
        for b in 1..n {
            for dd in 1..n {
                fib[(b - 1) * k + (dd - 1)] = (1..n).map(|a| fiber_riem(a, b, a, dd)).sum();
            }
        }
        let hm = lv.mean_curvature;
        let r = lv.scalar;
        for a in 1..n {
            let fa = fib[(a - 1) * k + (a - 1)];
            let corrected = 2.0 * ric(a, a) - r / (nf - 1.0) + (nf - 2.0) * hm * hm / ((nf - 1.0) * (nf - 1.0));
            let uncorrected = 2.0 * ric(a, a) + (hm * hm - r) / (nf - 1.0);
            formula = formula.max(math::abs(fa - corrected));
            gap = gap.max(math::abs(fa - uncorrected));
            w1a1a = w1a1a.max(math::abs(w.at4(0, a, 0, a)));
            diag.push(fa);
            for b in 1..n {
                if a != b {
                    offdiag = offdiag.max(math::abs(fib[(a - 1) * k + (b - 1)]));
                }
            }
        }
        if let Some(prof) = &s.profile {
            let wr = prof.state(p.coords[0])?[0];
            let exact = (nf - 2.0) / (wr * wr);
            let dev = (1..n)
                .map(|a| math::abs(fib[(a - 1) * k + (a - 1)] - exact))
                .fold(0.0f64, f64::max);
            round = Some(round.unwrap_or(0.0).max(dev));
        }
    }
    let fiber_ricci = mean(&diag);
    let einstein_defect = diag
        .iter()
        .map(|x| math::abs(x - fiber_ricci))
        .fold(offdiag, f64::max);
    let pass = formula <= BATTERY_TOL && w1a1a <= BATTERY_TOL && einstein_defect <= BATTERY_TOL;
    Ok(FiberReport {
        level: c,
        formula_residual: formula,
        uncorrected_gap: gap,
        w1a1a,
        fiber_ricci,
        einstein_defect,
        round_fiber_defect: round,
        tolerance: BATTERY_TOL,
        pass,
    })
}

/// The boundary term `int D_ijk grad^i f grad^j f nu^k e^f` over the
/// geodesic sphere of radius `r`, and the majorant `2 e^{f(r)} |S_r|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedFlux {
    pub r: f64,
    pub flux: f64,
    pub majorant: f64,
}

pub fn weighted_flux(s: &SolitonStructure, r: f64) -> Result<WeightedFlux> {
    let prof = s.profile.as_ref().ok_or(Error::NotProfileBacked)?;
    let area = prof.sphere_area(r)?;
    let f = prof.state(r)?[2];
    let p = s.radial_point(r);
    let d = PointData::new(s, &p, Depth::Cotton)?;
    let n = d.pack.n;
    let dt = d_tensor_at(&d);
    // outward unit normal d_r (g_rr = 1)
    let mut dff = 0.0;
    for i in 0..n {
        for j in 0..n {
            dff += dt.at3(i, j, 0) * d.grad_up.data[i] * d.grad_up.data[j];
        }
    }
    let weight = math::exp(f);
    Ok(WeightedFlux {
        r,
        flux: area * weight * dff,
        majorant: 2.0 * weight * area,
    })
}

/// Weighted flux at each radius plus whether the majorant decreases strictly.
pub fn majorant_scan(s: &SolitonStructure, radii: &[f64]) -> Result<(Vec<WeightedFlux>, bool)> {
    let v: Vec<WeightedFlux> = radii.iter().map(|&r| weighted_flux(s, r)).collect::<Result<_>>()?;
    let monotone = v.windows(2).all(|w| w[1].majorant < w[0].majorant);
    Ok((v, monotone))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::FlatChart;
    use crate::soliton::{model, ModelParams, QuadraticPotential};
    use alloc::sync::Arc;

    fn bryant(n: usize) -> SolitonStructure {
        model("bryant", &ModelParams::dim(n).with_rmax(30.0)).unwrap()
    }

    #[test]
    fn bryant_levels_are_umbilic_with_inward_normal() {
        let s = bryant(3);
        let st = s.profile.as_ref().unwrap().state(1.0).unwrap();
        let lv = level_data(&s, &s.radial_point(1.0)).unwrap();
        let e1 = &lv.frame.vectors[0];
        assert!((e1[0] + 1.0).abs() < 1e-12 && e1[1].abs() < 1e-12 && e1[2].abs() < 1e-12);
        let k = -st[1] / st[0];
        assert!((lv.h[0] - k).abs() < 1e-9 && (lv.h[3] - k).abs() < 1e-9);
        assert!(lv.h[1].abs() < 1e-9);
        assert!((lv.mean_curvature - 2.0 * k).abs() < 1e-9);
        assert!(lv.traceless_norm < 1e-9);
        for (a, b) in lv.h.iter().zip(&lv.h_from_ricci) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn euclidean_sphere_mean_curvature() {
        let s = SolitonStructure {
            name: "flat-radial".into(),
            chart: Arc::new(FlatChart::new(4)),
            potential: Arc::new(QuadraticPotential { k: 0.5, from: 0 }),
            rho: 1.0,
            c0: None,
            profile: None,
        };
        let lv = level_data(&s, &ChartPoint::new([0.0, 1.2, 0.0, -1.6])).unwrap();
        assert!((lv.mean_curvature - 3.0 / 2.0).abs() < 1e-12);
        assert!(lv.frame.orthonormality_residual(&Tensor::from_fn(4, 2, |x| if x[0] == x[1] { 1.0 } else { 0.0 })) < 1e-12);
    }

    #[test]
    fn line_cigar_is_not_umbilic() {
        let s = model("line-cigar", &ModelParams::default()).unwrap();
        let lv = level_data(&s, &ChartPoint::new([0.3, 0.5, -0.4])).unwrap();
        assert!(lv.traceless_norm > 1e-3);
    }

    #[test]
    fn critical_points_are_rejected() {
        let g = model("gaussian-expander", &ModelParams::dim(3)).unwrap();
        let origin = ChartPoint::new([0.0, 0.0, 0.0]);
        assert!(matches!(adapted_frame(&g, &origin), Err(Error::CriticalPoint(_))));
        let flat = model("flat", &ModelParams::dim(3)).unwrap();
        let p = ChartPoint::new([0.1, 0.2, 0.3]);
        assert!(matches!(check_d2(&flat, &p), Err(Error::CriticalPoint(_))));
    }

    #[test]
    fn level_points_lie_on_the_level() {
        let s = bryant(3);
        let c = s.profile.as_ref().unwrap().state(2.0).unwrap()[2];
        let pts = level_points(&s, c, 6).unwrap();
        assert_eq!(pts.len(), 6);
        for p in &pts {
            let f = s.potential_jet(p, 0).unwrap().value;
            assert!((f - c).abs() <= LEVEL_TOL);
            assert!((p.coords[0] - 2.0).abs() < 1e-9);
        }
        assert!(matches!(level_points(&s, 1e3, 4), Err(Error::LevelNotFound(_))));
    }

    #[test]
    fn battery_preconditions() {
        let s = bryant(3);
        assert!(matches!(prop32_battery(&s, -1.0, 3), Err(Error::InvalidParams(_))));
        assert!(matches!(
            einstein_fiber_check(&s, -1.0, 8),
            Err(Error::DimensionTooLow { dim: 3, .. })
        ));
        let lc = model("line-cigar", &ModelParams::default()).unwrap();
        assert!(matches!(weighted_flux(&lc, 10.0), Err(Error::NotProfileBacked)));
    }
}
