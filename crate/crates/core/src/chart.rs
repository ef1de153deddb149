//! Coordinate charts carrying a Riemannian metric with exact partials.
//!
//! A chart evaluates its metric components on jet coordinates, so every
//! built-in chart delivers exact derivatives up to order 4: closed forms via
//! jet arithmetic, polynomials term by term, and warped products by
//! composing a radial Taylor expansion with the radius coordinate.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::tensor::Tensor;

/// Highest jet order every built-in chart supports.
pub const MAX_ORDER: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    pub coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        ChartPoint {
            coords: coords.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    ClosedForm,
    Polynomial,
    WarpedProfile,
}

/// How points of a chart are parametrised, used to shoot rays from the
/// chart center when locating level sets.
#[derive(Clone, Debug, PartialEq)]
pub enum Layout {
    /// Straight rays `center + s * dir` in the chart coordinates.
    Cartesian { center: Vec<f64> },
    /// `(r, angles..)`: rays keep the angles fixed and vary `r`.
    Polar,
}

pub trait MetricChart: Send + Sync {
    fn dim(&self) -> usize;
    fn kind(&self) -> ChartKind;
    fn contains(&self, coords: &[f64]) -> bool;
    /// Row-major `g_ij` evaluated on coordinate jets.
    fn components(&self, x: &[Jet]) -> Vec<Jet>;
    fn max_order(&self) -> usize {
        MAX_ORDER
    }
    fn layout(&self) -> Layout {
        Layout::Cartesian {
            center: vec![0.0; self.dim()],
        }
    }
    /// Axis-aligned box used for default sample grids, as `(lo, hi)` per coordinate.
    fn sample_box(&self) -> Vec<(f64, f64)>;
}

/// Metric components and their partials up to `order` at one point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub dim: usize,
    pub order: usize,
    pub point: ChartPoint,
    components: Vec<Jet>,
}

impl MetricJet {
    pub fn component(&self, i: usize, j: usize) -> &Jet {
        &self.components[i * self.dim + j]
    }

    pub fn components(&self) -> &[Jet] {
        &self.components
    }

    pub fn g(&self) -> Tensor {
        Tensor::from_fn(self.dim, 2, |i| self.component(i[0], i[1]).value())
    }

    /// `d_{vars} g_ij`; NaN when `vars.len()` exceeds the jet order.
    pub fn partial(&self, i: usize, j: usize, vars: &[usize]) -> f64 {
        self.component(i, j).partial(vars)
    }

    pub fn dg(&self) -> Tensor {
        Tensor::from_fn(self.dim, 3, |x| self.partial(x[0], x[1], &x[2..]))
    }

    pub fn d2g(&self) -> Tensor {
        Tensor::from_fn(self.dim, 4, |x| self.partial(x[0], x[1], &x[2..]))
    }

    pub fn d3g(&self) -> Tensor {
        Tensor::from_fn(self.dim, 5, |x| self.partial(x[0], x[1], &x[2..]))
    }

    pub fn d4g(&self) -> Tensor {
        Tensor::from_fn(self.dim, 6, |x| self.partial(x[0], x[1], &x[2..]))
    }
}

pub fn check_point(chart: &dyn MetricChart, p: &ChartPoint) -> Result<()> {
    if p.dim() != chart.dim() || !chart.contains(&p.coords) {
        return Err(Error::OutsideDomain {
            coords: p.coords.clone(),
        });
    }
    Ok(())
}

/// Coordinate jets of the requested order at `p`.
pub fn coordinate_jets(chart: &dyn MetricChart, p: &ChartPoint, order: usize) -> Result<Vec<Jet>> {
    check_point(chart, p)?;
    if order > chart.max_order() {
        return Err(Error::OrderUnsupported {
            requested: order,
            supported: chart.max_order(),
        });
    }
    let space = JetSpace::new(chart.dim(), order);
    Ok(Jet::coordinates(&space, &p.coords))
}

pub fn metric_jet(chart: &dyn MetricChart, p: &ChartPoint, order: usize) -> Result<MetricJet> {
    let x = coordinate_jets(chart, p, order)?;
    let components = chart.components(&x);
    Ok(MetricJet {
        dim: chart.dim(),
        order,
        point: p.clone(),
        components,
    })
}

fn in_box(coords: &[f64], half_width: f64) -> bool {
    coords.iter().all(|x| x.is_finite() && libm::fabs(*x) < half_width)
}

fn identity_jets(x: &[Jet]) -> Vec<Jet> {
    let n = x.len();
    let space = x[0].space();
    let order = x[0].order();
    (0..n * n)
        .map(|k| Jet::constant(space, if k / n == k % n { 1.0 } else { 0.0 }, order))
        .collect()
}

/// Euclidean space.
#[derive(Clone, Debug)]
pub struct FlatChart {
    pub n: usize,
    pub half_width: f64,
}

impl FlatChart {
    pub fn new(n: usize) -> Self {
        FlatChart { n, half_width: 1e6 }
    }
}

impl MetricChart for FlatChart {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind(&self) -> ChartKind {
        ChartKind::ClosedForm
    }
    fn contains(&self, coords: &[f64]) -> bool {
        in_box(coords, self.half_width)
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        identity_jets(x)
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        vec![(-1.0, 1.0); self.n]
    }
}

/// A monomial-sum scalar `sum_t c_t x^{e_t}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(f64, Vec<u8>)>,
}

impl Polynomial {
    pub fn eval(&self, x: &[Jet]) -> Jet {
        let mut acc = Jet::constant(x[0].space(), 0.0, x[0].order());
        for (c, e) in &self.terms {
            let mut m = Jet::constant(x[0].space(), *c, x[0].order());
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    m = &m * &x[v];
                }
            }
            acc = &acc + &m;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&k, &xv)| libm::pow(xv, k as f64))
                    .product::<f64>()
            })
            .sum()
    }

    /// Seeded random polynomial in `n` variables with every monomial of
    /// total degree `1..=max_degree` and coefficients uniform in `[-amp, amp]`.
    pub fn random(n: usize, max_degree: usize, amp: f64, rng: &mut ChaCha8Rng) -> Self {
        let space = JetSpace::new(n, max_degree);
        let mut terms = Vec::new();
        for d in 1..=max_degree {
            for idx in space.len(d - 1)..space.len(d) {
                let e = space.exponents(idx).to_vec();
                terms.push((amp * uniform_sym(rng), e));
            }
        }
        Polynomial { terms }
    }
}

fn uniform_sym(rng: &mut ChaCha8Rng) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    2.0 * u - 1.0
}

/// `g_ij = delta_ij + P_ij(x)` with symmetric polynomial perturbations.
#[derive(Clone, Debug)]
pub struct PolynomialChart {
    pub n: usize,
    /// Upper-triangular entries `(i, j, P_ij)` with `i <= j`.
    pub entries: Vec<(usize, usize, Polynomial)>,
    pub half_width: f64,
}

impl PolynomialChart {
    /// `g_ij = delta_ij + x^a x^b eps_ij` for a symmetric matrix `eps`.
    pub fn bilinear(n: usize, a: usize, b: usize, eps: &[f64]) -> Self {
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i..n {
                let mut e = vec![0u8; n];
                e[a] += 1;
                e[b] += 1;
                entries.push((
                    i,
                    j,
                    Polynomial {
                        terms: vec![(eps[i * n + j], e)],
                    },
                ));
            }
        }
        PolynomialChart {
            n,
            entries,
            half_width: 1.0,
        }
    }

    /// Seeded random quartic perturbation of the identity, positive definite
    /// on the box `|x_i| < 0.5`.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amp = 0.15 / n as f64;
        let entries = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, Polynomial::random(n, 4, amp, &mut rng)))
            .collect();
        PolynomialChart {
            n,
            entries,
            half_width: 0.5,
        }
    }
}

impl MetricChart for PolynomialChart {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind(&self) -> ChartKind {
        ChartKind::Polynomial
    }
    fn contains(&self, coords: &[f64]) -> bool {
        in_box(coords, self.half_width)
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let mut g = identity_jets(x);
        for (i, j, p) in &self.entries {
            let v = p.eval(x);
            g[i * n + j] = &g[i * n + j] + &v;
            if i != j {
                g[j * n + i] = &g[j * n + i] + &v;
            }
        }
        g
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        vec![(-0.8 * self.half_width, 0.8 * self.half_width); self.n]
    }
}

/// The cigar `(dx^2 + dy^2) / (1 + x^2 + y^2)`.
#[derive(Clone, Debug)]
pub struct CigarChart {
    pub half_width: f64,
}

impl Default for CigarChart {
    fn default() -> Self {
        CigarChart { half_width: 50.0 }
    }
}

pub(crate) fn cigar_factor(x: &Jet, y: &Jet) -> Jet {
    (1.0 + &(x * x) + &(y * y)).recip()
}

impl MetricChart for CigarChart {
    fn dim(&self) -> usize {
        2
    }
    fn kind(&self) -> ChartKind {
        ChartKind::ClosedForm
    }
    fn contains(&self, coords: &[f64]) -> bool {
        in_box(coords, self.half_width)
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let c = cigar_factor(&x[0], &x[1]);
        let zero = c.scale(0.0);
        vec![c.clone(), zero.clone(), zero, c]
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        vec![(-2.0, 2.0); 2]
    }
}

/// The Riemannian product `R x cigar` in coordinates `(t, x, y)`.
#[derive(Clone, Debug)]
pub struct LineCigarChart {
    pub half_width: f64,
}

impl Default for LineCigarChart {
    fn default() -> Self {
        LineCigarChart { half_width: 50.0 }
    }
}

impl MetricChart for LineCigarChart {
    fn dim(&self) -> usize {
        3
    }
    fn kind(&self) -> ChartKind {
        ChartKind::ClosedForm
    }
    fn contains(&self, coords: &[f64]) -> bool {
        in_box(coords, self.half_width)
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let c = cigar_factor(&x[1], &x[2]);
        let zero = c.scale(0.0);
        let one = &zero + 1.0;
        vec![
            one,
            zero.clone(),
            zero.clone(),
            zero.clone(),
            c.clone(),
            zero.clone(),
            zero.clone(),
            zero,
            c,
        ]
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        vec![(-1.0, 1.0), (-2.0, 2.0), (-2.0, 2.0)]
    }
}

/// Round `S^2` of the given radius times flat `R^(n-2)`, in coordinates
/// `(theta, phi, y_1, .., y_{n-2})`.
#[derive(Clone, Debug)]
pub struct SphereProductChart {
    pub n: usize,
    pub radius: f64,
}

impl MetricChart for SphereProductChart {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind(&self) -> ChartKind {
        ChartKind::ClosedForm
    }
    fn contains(&self, c: &[f64]) -> bool {
        c.len() == self.n
            && c[0] > 1e-3
            && c[0] < PI - 1e-3
            && libm::fabs(c[1]) < 4.0
            && in_box(&c[2..], 1e6)
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let mut g = identity_jets(x);
        let a2 = self.radius * self.radius;
        g[0] = g[0].scale(a2);
        g[n + 1] = x[0].sin().square().scale(a2);
        g
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        let mut b = vec![(0.5, PI - 0.5), (-PI, PI)];
        b.extend(core::iter::repeat_n((-1.0, 1.0), self.n - 2));
        b
    }
}

/// `e^{2 phi} g` for a polynomial `phi`.
#[derive(Clone)]
pub struct ConformalChart {
    pub base: Arc<dyn MetricChart>,
    pub phi: Polynomial,
}

impl MetricChart for ConformalChart {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn kind(&self) -> ChartKind {
        self.base.kind()
    }
    fn contains(&self, coords: &[f64]) -> bool {
        self.base.contains(coords)
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let factor = self.phi.eval(x).scale(2.0).exp();
        self.base
            .components(x)
            .iter()
            .map(|c| c * &factor)
            .collect()
    }
    fn layout(&self) -> Layout {
        self.base.layout()
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        self.base.sample_box()
    }
}

/// `lambda * g` for a constant `lambda > 0`.
#[derive(Clone)]
pub struct ScaledChart {
    pub inner: Arc<dyn MetricChart>,
    pub lambda: f64,
}

impl MetricChart for ScaledChart {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn kind(&self) -> ChartKind {
        self.inner.kind()
    }
    fn contains(&self, coords: &[f64]) -> bool {
        self.inner.contains(coords)
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        self.inner
            .components(x)
            .iter()
            .map(|c| c.scale(self.lambda))
            .collect()
    }
    fn max_order(&self) -> usize {
        self.inner.max_order()
    }
    fn layout(&self) -> Layout {
        self.inner.layout()
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        self.inner.sample_box()
    }
}

/// A radial function known through its local Taylor expansion.
pub trait RadialFunction: Send + Sync {
    /// `[w(r), w'(r), w''(r)/2, ..]` up to `order`.
    fn taylor(&self, r: f64, order: usize) -> Vec<f64>;
    /// Radii where the expansion is available.
    fn range(&self) -> (f64, f64);
}

/// Closed-form warping functions for engine validation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticWarp {
    /// `w = r` (flat space in polar coordinates).
    Linear,
    /// `w = sin r` (unit round sphere).
    Sine,
    /// `w = sinh r` (hyperbolic space).
    Sinh,
    /// `w = r + c r^3`.
    Cubic(f64),
}

impl RadialFunction for AnalyticWarp {
    fn taylor(&self, r: f64, order: usize) -> Vec<f64> {
        let space = JetSpace::new(1, order);
        let x = Jet::variable(&space, 0, r);
        let w = match self {
            AnalyticWarp::Linear => x,
            AnalyticWarp::Sine => x.sin(),
            AnalyticWarp::Sinh => (&x.exp() - &(-&x).exp()).scale(0.5),
            AnalyticWarp::Cubic(c) => &x + &(&(&x * &x) * &x).scale(*c),
        };
        w.coeffs().to_vec()
    }
    fn range(&self) -> (f64, f64) {
        match self {
            AnalyticWarp::Sine => (1e-3, PI - 1e-3),
            _ => (1e-3, 1e3),
        }
    }
}

/// `dr^2 + w(r)^2 g_{S^{n-1}}` in hyperspherical coordinates
/// `(r, theta_1, .., theta_{n-1})`.
#[derive(Clone)]
pub struct WarpedChart {
    pub n: usize,
    pub warp: Arc<dyn RadialFunction>,
    pub label: String,
}

impl WarpedChart {
    pub fn new(n: usize, warp: Arc<dyn RadialFunction>) -> Self {
        WarpedChart {
            n,
            warp,
            label: String::new(),
        }
    }

    /// Default angular position used for pointwise checks: every polar
    /// angle at `pi/2`, azimuth `0`.
    pub fn equator(n: usize, r: f64) -> ChartPoint {
        let mut c = vec![PI / 2.0; n];
        c[0] = r;
        c[n - 1] = 0.0;
        ChartPoint::new(c)
    }
}

impl MetricChart for WarpedChart {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind(&self) -> ChartKind {
        ChartKind::WarpedProfile
    }
    fn contains(&self, c: &[f64]) -> bool {
        let (lo, hi) = self.warp.range();
        if c.len() != self.n || !(c[0] >= lo && c[0] <= hi) {
            return false;
        }
        let polar_ok = c[1..self.n - 1].iter().all(|&t| t > 1e-3 && t < PI - 1e-3);
        polar_ok && libm::fabs(c[self.n - 1]) < 4.0
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let n = self.n;
        let order = x[0].order();
        let w = x[0].compose(&self.warp.taylor(x[0].value(), order));
        let mut g = identity_jets(x);
        let mut angular = w.square();
        for k in 1..n {
            g[k * n + k] = angular.clone();
            if k < n - 1 {
                angular = &angular * &x[k].sin().square();
            }
        }
        g
    }
    fn layout(&self) -> Layout {
        Layout::Polar
    }
    fn sample_box(&self) -> Vec<(f64, f64)> {
        let (lo, hi) = self.warp.range();
        let mut b = vec![(lo.max(0.2), hi.min(20.0))];
        b.extend(core::iter::repeat_n((0.3, PI - 0.3), self.n - 2));
        b.push((-PI, PI));
        b
    }
}
