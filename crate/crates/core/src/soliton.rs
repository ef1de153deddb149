//! Gradient Ricci soliton structures, the model registry and the pointwise
//! soliton identities.
//!
//! A structure is a chart together with a potential `f` evaluated on jet
//! coordinates and the soliton constant `rho` in `Ric + Hess f = rho g`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::chart::{
    cigar_factor, coordinate_jets, ChartPoint, CigarChart, FlatChart, Layout, LineCigarChart,
    MetricChart, RadialFunction, ScaledChart, SphereProductChart, WarpedChart,
};
use crate::curvature::{self, curvature_pack, CurvaturePack, Depth, DIFF_STEP};
use crate::diff;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::math;
use crate::profile::{self, ProfileParams, ProfilePotential, ProfileWarp, SolitonProfile};
use crate::tensor::{contract_full, covariant_from_partials, Tensor};

/// Seed of the default sample grids.
pub const SAMPLE_SEED: u64 = 0x5011;

/// The potential `f` evaluated on jet coordinates.
pub trait Potential: Send + Sync {
    fn eval(&self, x: &[Jet]) -> Jet;
}

/// `f = 0`.
#[derive(Clone, Copy, Debug)]
pub struct ZeroPotential;

impl Potential for ZeroPotential {
    fn eval(&self, x: &[Jet]) -> Jet {
        Jet::constant(x[0].space(), 0.0, x[0].order())
    }
}

/// `f = k |x_{from..}|^2` over the trailing coordinates starting at `from`.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticPotential {
    pub k: f64,
    pub from: usize,
}

impl Potential for QuadraticPotential {
    fn eval(&self, x: &[Jet]) -> Jet {
        let mut acc = Jet::constant(x[0].space(), 0.0, x[0].order());
        for xi in &x[self.from..] {
            acc = &acc + &xi.square();
        }
        acc.scale(self.k)
    }
}

/// `f = -ln(1 + x^2 + y^2) + slope t` on `(t, x, y)`, or without `t` on the
/// cigar itself.
#[derive(Clone, Copy, Debug)]
pub struct CigarPotential {
    /// Index of the `x` coordinate (0 on the cigar, 1 on the line-cigar).
    pub offset: usize,
    pub slope: f64,
}

impl Potential for CigarPotential {
    fn eval(&self, x: &[Jet]) -> Jet {
        let c = cigar_factor(&x[self.offset], &x[self.offset + 1]);
        let f = c.ln();
        if self.offset > 0 && self.slope != 0.0 {
            &f + &x[0].scale(self.slope)
        } else {
            f
        }
    }
}

/// A function of the first (radial) coordinate.
#[derive(Clone)]
pub struct RadialPotential(pub Arc<dyn RadialFunction>);

impl Potential for RadialPotential {
    fn eval(&self, x: &[Jet]) -> Jet {
        x[0].compose(&self.0.taylor(x[0].value(), x[0].order()))
    }
}

/// Value, coordinate gradient and coordinate second partials of `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialJet {
    pub value: f64,
    /// `d_i f`.
    pub grad: Tensor,
    /// `d_i d_j f`.
    pub hess: Tensor,
}

impl PotentialJet {
    /// `Hess f_ij = d_i d_j f - Gamma^k_ij d_k f`.
    pub fn covariant_hessian(&self, gamma: &Tensor) -> Tensor {
        let n = self.grad.n;
        Tensor::from_fn(n, 2, |x| {
            let mut s = self.hess.at2(x[0], x[1]);
            for k in 0..n {
                s -= gamma.at3(k, x[0], x[1]) * self.grad.data[k];
            }
            s
        })
    }
}

#[derive(Clone)]
pub struct SolitonStructure {
    pub name: String,
    pub chart: Arc<dyn MetricChart>,
    pub potential: Arc<dyn Potential>,
    pub rho: f64,
    /// `R + |grad f|^2` for steady structures.
    pub c0: Option<f64>,
    /// Radial profile behind warped models.
    pub profile: Option<Arc<SolitonProfile>>,
}

impl core::fmt::Debug for SolitonStructure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SolitonStructure")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("rho", &self.rho)
            .field("c0", &self.c0)
            .finish()
    }
}

impl SolitonStructure {
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn is_steady(&self) -> bool {
        self.rho == 0.0
    }

    pub fn potential_jet(&self, p: &ChartPoint, order: usize) -> Result<PotentialJet> {
        let order = order.min(2);
        let x = coordinate_jets(self.chart.as_ref(), p, order)?;
        let f = self.potential.eval(&x);
        let n = self.dim();
        let grad = Tensor::from_fn(n, 1, |i| if order >= 1 { f.partial(&[i[0]]) } else { f64::NAN });
        let hess = Tensor::from_fn(n, 2, |i| {
            if order >= 2 {
                f.partial(&[i[0], i[1]])
            } else {
                f64::NAN
            }
        });
        Ok(PotentialJet {
            value: f.value(),
            grad,
            hess,
        })
    }

    /// Default sample grid.
    pub fn sample_points(&self) -> Vec<ChartPoint> {
        sample_points(self.chart.as_ref(), SAMPLE_SEED)
    }

    /// A point at radius `r` for warped models, or `r e_last` for Cartesian ones.
    pub fn radial_point(&self, r: f64) -> ChartPoint {
        let n = self.dim();
        match self.chart.layout() {
            Layout::Polar => WarpedChart::equator(n, r),
            Layout::Cartesian { .. } => {
                let mut c = vec![0.0; n];
                c[n - 1] = r;
                ChartPoint::new(c)
            }
        }
    }
}

/// Registry parameters; unset fields take per-model defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub dim: Option<usize>,
    pub a: Option<f64>,
    /// Coefficient of the linear term along the line of the line-cigar.
    pub slope: Option<f64>,
    pub rmax: Option<f64>,
    pub tol: Option<f64>,
}

impl ModelParams {
    pub fn dim(n: usize) -> Self {
        ModelParams {
            dim: Some(n),
            ..Default::default()
        }
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = Some(a);
        self
    }

    pub fn with_rmax(mut self, rmax: f64) -> Self {
        self.rmax = Some(rmax);
        self
    }
}

/// Registered model names.
pub const MODEL_NAMES: [&str; 7] = [
    "flat",
    "gaussian-expander",
    "cigar",
    "line-cigar",
    "bryant",
    "expander",
    "sphere-factor",
];

/// Default `rmax` of profile-backed models.
pub const PROFILE_RMAX: f64 = 100.0;
/// Default integration tolerance of profile-backed models.
pub const PROFILE_TOL: f64 = 1e-10;

fn check_dim(name: &str, n: usize, min: usize) -> Result<usize> {
    if n < min {
        return Err(Error::InvalidParams(alloc::format!(
            "{name} needs dimension at least {min}, got {n}"
        )));
    }
    Ok(n)
}

fn fixed_dim(name: &str, params: &ModelParams, n: usize) -> Result<()> {
    match params.dim {
        Some(d) if d != n => Err(Error::InvalidParams(alloc::format!(
            "{name} has dimension {n}, got {d}"
        ))),
        _ => Ok(()),
    }
}

/// Builds a registered model.
pub fn model(name: &str, params: &ModelParams) -> Result<SolitonStructure> {
    let structure = |chart: Arc<dyn MetricChart>, potential: Arc<dyn Potential>, rho, c0| SolitonStructure {
        name: name.to_string(),
        chart,
        potential,
        rho,
        c0,
        profile: None,
    };
    match name {
        "flat" => {
            let n = check_dim(name, params.dim.unwrap_or(3), 1)?;
            Ok(structure(Arc::new(FlatChart::new(n)), Arc::new(ZeroPotential), 0.0, Some(0.0)))
        }
        "gaussian-expander" => {
            let n = check_dim(name, params.dim.unwrap_or(3), 1)?;
            let f = QuadraticPotential { k: -0.25, from: 0 };
            Ok(structure(Arc::new(FlatChart::new(n)), Arc::new(f), profile::EXPANDING, None))
        }
        "cigar" => {
            fixed_dim(name, params, 2)?;
            let f = CigarPotential { offset: 0, slope: 0.0 };
            Ok(structure(Arc::new(CigarChart::default()), Arc::new(f), 0.0, Some(4.0)))
        }
        "line-cigar" => {
            fixed_dim(name, params, 3)?;
            let slope = params.slope.unwrap_or(0.0);
            if !slope.is_finite() {
                return Err(Error::InvalidParams("line-cigar slope must be finite".into()));
            }
            let f = CigarPotential { offset: 1, slope };
            Ok(structure(
                Arc::new(LineCigarChart::default()),
                Arc::new(f),
                0.0,
                Some(4.0 + slope * slope),
            ))
        }
        "bryant" | "expander" => {
            let n = check_dim(name, params.dim.unwrap_or(3), 3)?;
            let steady = name == "bryant";
            let a = params.a.unwrap_or(if steady { -1.0 / n as f64 } else { -1.0 });
            if !(a < 0.0) || !a.is_finite() {
                return Err(Error::InvalidParams(alloc::format!("{name} needs a < 0, got {a}")));
            }
            let base = if steady {
                ProfileParams::steady(n, a)
            } else {
                ProfileParams::expanding(n, a)
            };
            let prof = profile::integrate(
                base.rmax(params.rmax.unwrap_or(PROFILE_RMAX))
                    .tol(params.tol.unwrap_or(PROFILE_TOL)),
            )?;
            let mut s = profile_chart(Arc::new(prof));
            s.name = name.to_string();
            Ok(s)
        }
        "sphere-factor" => {
            let n = check_dim(name, params.dim.unwrap_or(3), 2)?;
            let chart = SphereProductChart {
                n,
                radius: core::f64::consts::SQRT_2,
            };
            let f = QuadraticPotential { k: 0.25, from: 2 };
            Ok(structure(Arc::new(chart), Arc::new(f), 0.5, None))
        }
        _ => Err(Error::UnknownModel(name.to_string())),
    }
}

/// The warped chart of a profile paired with its potential.
pub fn profile_chart(prof: Arc<SolitonProfile>) -> SolitonStructure {
    let n = prof.n();
    let mut chart = WarpedChart::new(n, Arc::new(ProfileWarp(prof.clone())));
    let steady = prof.is_steady();
    chart.label = if steady { "bryant".into() } else { "expander".into() };
    SolitonStructure {
        name: chart.label.clone(),
        chart: Arc::new(chart),
        potential: Arc::new(RadialPotential(Arc::new(ProfilePotential(prof.clone())))),
        rho: prof.rho(),
        c0: if steady { Some(prof.c0()) } else { None },
        profile: Some(prof),
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// `2^(n+1)` Halton points in the chart's sample box with a seeded
/// Cranley-Patterson rotation.
pub fn sample_points(chart: &dyn MetricChart, seed: u64) -> Vec<ChartPoint> {
    let bounds = chart.sample_box();
    halton_points(&bounds, seed, 1 << (bounds.len() + 1))
}

/// `count` shifted Halton points in an axis-aligned box.
pub fn halton_points(bounds: &[(f64, f64)], seed: u64, count: usize) -> Vec<ChartPoint> {
    let n = bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..n)
        .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
        .collect();
    (1..=count as u64)
        .map(|i| {
            let c: Vec<f64> = bounds
                .iter()
                .enumerate()
                .map(|(d, &(lo, hi))| {
                    let u = radical_inverse(i, PRIMES[d % PRIMES.len()]) + shift[d];
                    lo + (hi - lo) * (u - libm::floor(u))
                })
                .collect();
            ChartPoint::new(c)
        })
        .collect()
}

/// Curvature and potential data at one point.
pub struct PointData {
    pub pack: CurvaturePack,
    pub f: PotentialJet,
    /// Covariant Hessian of `f`.
    pub hess: Tensor,
    /// `grad f` with the index raised.
    pub grad_up: Tensor,
}

impl PointData {
    pub fn new(s: &SolitonStructure, p: &ChartPoint, depth: Depth) -> Result<Self> {
        let pack = curvature_pack(s.chart.as_ref(), p, depth)?;
        let f = s.potential_jet(p, 2)?;
        let hess = f.covariant_hessian(&pack.gamma);
        let n = pack.n;
        let grad_up = Tensor::from_fn(n, 1, |x| {
            (0..n).map(|j| pack.ginv.at2(x[0], j) * f.grad.data[j]).sum()
        });
        Ok(PointData { pack, f, hess, grad_up })
    }

    pub fn grad_norm2(&self) -> f64 {
        self.f.grad.data.iter().zip(&self.grad_up.data).map(|(a, b)| a * b).sum()
    }
}

/// `max |R_ij + Hess f_ij - rho g_ij|`.
pub fn soliton_residual(s: &SolitonStructure, p: &ChartPoint) -> Result<f64> {
    let d = PointData::new(s, p, Depth::Riemann)?;
    Ok(soliton_residual_at(&d, s.rho))
}

pub fn soliton_residual_at(d: &PointData, rho: f64) -> f64 {
    let n = d.pack.n;
    math::max_abs((0..n * n).map(|k| d.pack.ric.data[k] + d.hess.data[k] - rho * d.pack.g.data[k]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonResiduals {
    /// `max |d_i R - 2 R_ij grad^j f|`.
    pub grad_r: f64,
    /// `|R + |grad f|^2 - C0|` (steady) or `|R + |grad f|^2 + f|` (expanding).
    pub conservation: f64,
}

pub fn hamilton_identities(s: &SolitonStructure, p: &ChartPoint) -> Result<HamiltonResiduals> {
    if s.rho > 0.0 {
        return Err(Error::RhoUnsupported(s.rho));
    }
    let d = PointData::new(s, p, Depth::Cotton)?;
    hamilton_identities_at(s, &d)
}

/// Hamilton identities from precomputed point data (Cotton depth).
pub fn hamilton_identities_at(s: &SolitonStructure, d: &PointData) -> Result<HamiltonResiduals> {
    if s.rho > 0.0 {
        return Err(Error::RhoUnsupported(s.rho));
    }
    let n = d.pack.n;
    let dr = d.pack.grad_scalar.as_ref().ok_or(Error::InsufficientJetOrder { have: 2, need: 3 })?;
    let grad_r = math::max_abs((0..n).map(|i| {
        let rf: f64 = (0..n).map(|j| d.pack.ric.at2(i, j) * d.grad_up.data[j]).sum();
        dr.data[i] - 2.0 * rf
    }));
    let sum = d.pack.scalar + d.grad_norm2();
    let conservation = if s.is_steady() {
        let c0 = s.c0.ok_or_else(|| Error::InvalidParams("steady structure without C0".into()))?;
        math::abs(sum - c0)
    } else if s.rho == profile::EXPANDING {
        math::abs(sum + d.f.value)
    } else {
        return Err(Error::RhoUnsupported(s.rho));
    };
    Ok(HamiltonResiduals { grad_r, conservation })
}

/// Smallest scalar curvature over the points.
pub fn scalar_nonneg_scan(s: &SolitonStructure, points: &[ChartPoint]) -> Result<f64> {
    let mut lo = f64::INFINITY;
    for p in points {
        let r = curvature_pack(s.chart.as_ref(), p, Depth::Riemann)?.scalar;
        if r.is_nan() {
            return Ok(f64::NAN);
        }
        lo = lo.min(r);
    }
    Ok(lo)
}

/// Rescales a steady structure so that `R + |grad f|^2 = 1`.
///
/// Profile-backed structures are re-integrated at `a = -1/n`, the scaled
/// profile in its own geodesic radius; closed forms get a scaled chart with
/// the same coordinates.
pub fn normalize_steady(s: &SolitonStructure) -> Result<SolitonStructure> {
    if !s.is_steady() {
        return Err(Error::RhoUnsupported(s.rho));
    }
    let c0 = s.c0.ok_or_else(|| Error::InvalidParams("steady structure without C0".into()))?;
    if c0 == 0.0 {
        return Err(Error::ZeroC0);
    }
    if !(c0 > 0.0) {
        return Err(Error::InvalidParams(alloc::format!("C0 = {c0} must be positive")));
    }
    if c0 == 1.0 {
        return Ok(s.clone());
    }
    if let Some(prof) = &s.profile {
        let n = prof.n();
        let params = prof.params;
        let scaled = profile::integrate(
            ProfileParams::steady(n, -1.0 / n as f64)
                .rmax(params.rmax * math::sqrt(c0))
                .tol(params.tol)
                .eps(params.eps),
        )?;
        let mut out = profile_chart(Arc::new(scaled));
        out.name = s.name.clone();
        return Ok(out);
    }
    Ok(SolitonStructure {
        name: s.name.clone(),
        chart: Arc::new(ScaledChart {
            inner: s.chart.clone(),
            lambda: c0,
        }),
        potential: s.potential.clone(),
        rho: 0.0,
        c0: Some(1.0),
        profile: None,
    })
}

/// The 3-tensor `D_ijk` of a gradient soliton.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DTensor {
    pub n: usize,
    pub values: Vec<f64>,
}

impl DTensor {
    pub fn tensor(&self) -> Tensor {
        Tensor {
            n: self.n,
            rank: 3,
            data: self.values.clone(),
        }
    }

    /// Largest violation of `D_ijk = -D_jik` and of the two traces.
    pub fn symmetry_residual(&self, ginv: &Tensor) -> f64 {
        let t = self.tensor();
        let n = self.n;
        let mut skew = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    skew = skew.max(math::abs(t.at3(i, j, k) + t.at3(j, i, k)));
                }
            }
        }
        skew.max(curvature::max_trace(&t, ginv))
    }
}

fn need_dim3(n: usize, what: &'static str) -> Result<()> {
    if n < 3 {
        return Err(Error::DimensionTooLow { dim: n, what });
    }
    Ok(())
}

/// `D_ijk` from Ricci, `grad R` and `grad f` at a point.
pub fn d_tensor_at(d: &PointData) -> Tensor {
    let pack = &d.pack;
    let n = pack.n;
    let nf = n as f64;
    let dr = pack.grad_scalar.as_ref().expect("Cotton depth");
    let df = &d.f.grad.data;
    let (ric, g, r) = (&pack.ric, &pack.g, pack.scalar);
    Tensor::from_fn(n, 3, |x| {
        let (i, j, k) = (x[0], x[1], x[2]);
        (ric.at2(j, k) * df[i] - ric.at2(i, k) * df[j]) / (nf - 2.0)
            + (g.at2(j, k) * dr.data[i] - g.at2(i, k) * dr.data[j]) / (2.0 * (nf - 1.0) * (nf - 2.0))
            + r * (g.at2(i, k) * df[j] - g.at2(j, k) * df[i]) / ((nf - 1.0) * (nf - 2.0))
    })
}

pub fn d_tensor(s: &SolitonStructure, p: &ChartPoint) -> Result<DTensor> {
    need_dim3(s.dim(), "the D tensor")?;
    let d = PointData::new(s, p, Depth::Cotton)?;
    let t = d_tensor_at(&d);
    Ok(DTensor { n: t.n, values: t.data })
}

/// `D_ijk - C_ijk - W_ijkl grad^l f` at a point.
pub fn dcw_defect(d: &PointData) -> Tensor {
    let n = d.pack.n;
    let dt = d_tensor_at(d);
    let c = d.pack.cotton();
    let w = &d.pack.weyl;
    Tensor::from_fn(n, 3, |x| {
        let wf: f64 = (0..n).map(|l| w.get(&[x[0], x[1], x[2], l]) * d.grad_up.data[l]).sum();
        dt.get(x) - c.get(x) - wf
    })
}

/// `max |D_ijk - C_ijk - W_ijkl grad^l f|`.
pub fn check_dcw(s: &SolitonStructure, p: &ChartPoint) -> Result<f64> {
    need_dim3(s.dim(), "the D = C + W(grad f) identity")?;
    let d = PointData::new(s, p, Depth::Cotton)?;
    Ok(dcw_defect(&d).max_abs())
}

/// Both sides of `(n-2) B_ij = -(nabla_k D_ikj + (n-3)/(n-2) C_jli grad^l f)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BdCheck {
    /// `max |(n-2) B + nabla_k D_ikj + (n-3)/(n-2) C_jli grad^l f|`.
    pub residual: f64,
    /// `max |(n-2) B_ij|`.
    pub bach_side: f64,
    /// `max |nabla_k D_ikj + (n-3)/(n-2) C_jli grad^l f|`.
    pub d_side: f64,
}

pub fn check_bd(s: &SolitonStructure, p: &ChartPoint) -> Result<BdCheck> {
    let n = s.dim();
    need_dim3(n, "the Bach-D identity")?;
    let nf = n as f64;
    let chart = s.chart.as_ref();
    let pack = curvature_pack(chart, p, Depth::Bach)?;
    let f = s.potential_jet(p, 2)?;
    let grad_up = Tensor::from_fn(n, 1, |x| {
        (0..n).map(|j| pack.ginv.at2(x[0], j) * f.grad.data[j]).sum()
    });
    let dt = d_tensor(s, p)?.tensor();
    let partials = diff::richardson_partials(chart, p, DIFF_STEP, |q| d_tensor(s, q).map(|d| d.tensor()))?;
    let nd = covariant_from_partials(&partials, &dt, &pack.gamma);
    let b = pack.bach.as_ref().expect("Bach depth");
    let c = pack.cotton();
    let mut residual = 0.0f64;
    let mut bach_side = 0.0f64;
    let mut d_side = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut div = 0.0;
            for k in 0..n {
                for a in 0..n {
                    div += pack.ginv.at2(k, a) * nd.get(&[a, i, k, j]);
                }
            }
            let cf: f64 = (0..n).map(|l| c.at3(j, l, i) * grad_up.data[l]).sum();
            let rhs = div + (nf - 3.0) / (nf - 2.0) * cf;
            let lhs = (nf - 2.0) * b.at2(i, j);
            for (acc, v) in [(&mut residual, lhs + rhs), (&mut bach_side, lhs), (&mut d_side, rhs)] {
                let a = math::abs(v);
                if a.is_nan() || a > *acc {
                    *acc = a;
                }
            }
        }
    }
    Ok(BdCheck {
        residual,
        bach_side,
        d_side,
    })
}

/// `div(B) . grad f + |C|^2 / 2` with `|C|^2`; valid in dimension 3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BachFluxCheck {
    pub residual: f64,
    pub cotton_norm2: f64,
}

pub fn bach_flux_identity(s: &SolitonStructure, p: &ChartPoint) -> Result<BachFluxCheck> {
    let n = s.dim();
    if n != 3 {
        return Err(Error::InvalidParams(alloc::format!(
            "div(B).grad f = -|C|^2/2 is a 3-dimensional identity, got n = {n}"
        )));
    }
    let bd = curvature::bach_divergence(s.chart.as_ref(), p)?;
    let f = s.potential_jet(p, 1)?;
    let ginv = &bd.pack.ginv;
    let mut dot = 0.0;
    for i in 0..n {
        for j in 0..n {
            dot += bd.div.data[i] * ginv.at2(i, j) * f.grad.data[j];
        }
    }
    let c = bd.pack.cotton();
    let c2 = contract_full(c, c, ginv);
    Ok(BachFluxCheck {
        residual: math::abs(dot + 0.5 * c2),
        cotton_norm2: c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_model_and_bad_params() {
        assert_eq!(
            model("torus", &ModelParams::default()).unwrap_err(),
            Error::UnknownModel("torus".into())
        );
        assert!(matches!(
            model("bryant", &ModelParams::dim(3).with_a(0.0)),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(model("cigar", &ModelParams::dim(3)), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn halton_grid_is_deterministic_and_inside_the_box() {
        let c = CigarChart::default();
        let a = sample_points(&c, SAMPLE_SEED);
        let b = sample_points(&c, SAMPLE_SEED);
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        assert!(a.iter().all(|p| p.coords.iter().all(|x| x.abs() <= 2.0)));
        assert_ne!(a, sample_points(&c, 1));
    }

    #[test]
    fn cigar_at_origin() {
        let s = model("cigar", &ModelParams::default()).unwrap();
        let d = PointData::new(&s, &ChartPoint::new([0.0, 0.0]), Depth::Riemann).unwrap();
        assert!((d.pack.scalar - 4.0).abs() < 1e-13);
        assert_eq!(d.grad_norm2(), 0.0);
    }

    #[test]
    fn flat_constant_potential_cannot_be_normalized() {
        let s = model("flat", &ModelParams::dim(3)).unwrap();
        assert_eq!(normalize_steady(&s).unwrap_err(), Error::ZeroC0);
    }

    #[test]
    fn shrinker_is_rejected_by_hamilton() {
        let s = model("sphere-factor", &ModelParams::dim(3)).unwrap();
        let p = s.sample_points()[0].clone();
        assert!(soliton_residual(&s, &p).unwrap() < 1e-12);
        assert_eq!(hamilton_identities(&s, &p).unwrap_err(), Error::RhoUnsupported(0.5));
    }
}
