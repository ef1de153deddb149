//! The curvature pipeline: Christoffel symbols through the Bach tensor.
//!
//! Every tensor is built as a jet tensor so that covariant derivatives of
//! curvature come from exact coordinate partials. A metric jet of order `K`
//! yields Riemann at order `K - 2`, the Cotton tensor at `K - 3` and the
//! second derivatives of Weyl at `K - 4`.
//!
//! Conventions: `Gamma^m_ij` is stored at `[m, i, j]`; covariant derivatives
//! put the derivative index first; `R_ijkl = g_km Rm^m_ijl` with
//! `Rm^m_ijk = d_i Gamma^m_jk - d_j Gamma^m_ik + Gamma^m_is Gamma^s_jk - Gamma^m_js Gamma^s_ik`,
//! so the unit round sphere has `R_1212 = g_11 g_22 > 0`, `Ric_jl = g^ik R_ijkl`
//! and the Weyl decomposition through the Schouten tensor holds identically.

use alloc::vec::Vec;

use crate::chart::{metric_jet, ChartPoint, MetricChart, MetricJet};
use crate::diff;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::spd_inverse;
use crate::math;
use crate::tensor::{contract_full, covariant_from_partials, JetTensor, Tensor};

/// How far down the pipeline to go.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Depth {
    /// Riemann, Ricci, scalar, Schouten and Weyl (order-2 metric data).
    Riemann,
    /// Adds the Cotton tensor, `grad R` and `nabla W` (order 3).
    Cotton,
    /// Adds the Bach tensor (order 4).
    Bach,
}

impl Depth {
    pub fn metric_order(self) -> usize {
        match self {
            Depth::Riemann => 2,
            Depth::Cotton => 3,
            Depth::Bach => 4,
        }
    }
}

/// Curvature tensors at one point, all indices lowered.
#[derive(Clone, Debug)]
pub struct CurvaturePack {
    pub n: usize,
    pub depth: Depth,
    pub g: Tensor,
    pub ginv: Tensor,
    pub gamma: Tensor,
    pub riem: Tensor,
    pub ric: Tensor,
    pub scalar: f64,
    pub schouten: Tensor,
    /// Direct definition from Riemann, Ricci and R; exactly zero for `n <= 3`.
    pub weyl: Tensor,
    /// Weyl through the Schouten tensor.
    pub weyl_schouten: Tensor,
    /// `d_i R` (depth >= Cotton).
    pub grad_scalar: Option<Tensor>,
    /// Cotton tensor from Ricci and `grad R` (depth >= Cotton).
    pub cotton: Option<Tensor>,
    /// Cotton tensor as `nabla_i A_jk - nabla_j A_ik`.
    pub cotton_schouten: Option<Tensor>,
    /// `nabla_m W_ijkl` stored at `[m, i, j, k, l]` (depth >= Cotton).
    pub nabla_weyl: Option<Tensor>,
    /// Bach tensor from second derivatives of Weyl (`n >= 4`), or
    /// `nabla^k C_kij` for `n = 3`.
    pub bach: Option<Tensor>,
    /// Bach tensor from the divergence of Cotton.
    pub bach_cotton: Option<Tensor>,
}

/// Jet-level intermediate results of the pipeline.
#[derive(Clone, Debug)]
pub struct CurvatureJets {
    pub n: usize,
    pub order: usize,
    pub g: JetTensor,
    pub ginv: JetTensor,
    pub gamma: JetTensor,
    pub riem: JetTensor,
    pub ric: JetTensor,
    pub scalar: Jet,
    pub schouten: JetTensor,
    pub weyl: JetTensor,
}

fn zero_like(j: &Jet, order: usize) -> Jet {
    Jet::constant(j.space(), 0.0, order.min(j.order()))
}

fn sum_jets(zero: Jet, terms: impl IntoIterator<Item = Jet>) -> Jet {
    terms.into_iter().fold(zero, |acc, t| &acc + &t)
}

/// `g^{-1}` as jets through the Neumann series around the base point.
fn inverse_metric(g: &JetTensor) -> Result<JetTensor> {
    let n = g.n;
    let order = g.order();
    let g0inv = spd_inverse(n, &g.values().data)?;
    let space = g.data[0].space().clone();
    let e: Vec<Jet> = g.data.iter().map(|x| x - x.value()).collect();
    // m = -g0inv * e has no constant term, so the series stops at `order`
    let m: Vec<Jet> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let zero = Jet::constant(&space, 0.0, order);
            sum_jets(zero, (0..n).map(|k| e[k * n + j].scale(-g0inv[i * n + k])))
        })
        .collect();
    let mut term: Vec<Jet> = g0inv
        .iter()
        .map(|&v| Jet::constant(&space, v, order))
        .collect();
    let mut acc = term.clone();
    for _ in 0..order {
        term = (0..n * n)
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                let zero = Jet::constant(&space, 0.0, order);
                sum_jets(zero, (0..n).map(|k| &m[i * n + k] * &term[k * n + j]))
            })
            .collect();
        for (a, t) in acc.iter_mut().zip(&term) {
            *a = &*a + t;
        }
    }
    Ok(JetTensor { n, rank: 2, data: acc })
}

/// Raise both indices of a symmetric 2-tensor given as values.
pub fn raise2(t: &Tensor, ginv: &Tensor) -> Tensor {
    let n = t.n;
    Tensor::from_fn(n, 2, |x| {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += ginv.at2(x[0], a) * t.at2(a, b) * ginv.at2(b, x[1]);
            }
        }
        s
    })
}

/// Covariant derivative evaluated at the base point from a jet tensor of order >= 1.
pub fn nabla_values(t: &JetTensor, gamma: &Tensor) -> Tensor {
    let n = t.n;
    let partials = Tensor::from_fn(n, t.rank + 1, |x| t.get(&x[1..]).partial(&[x[0]]));
    covariant_from_partials(&partials, &t.values(), gamma)
}

impl CurvatureJets {
    pub fn from_metric_jet(mj: &MetricJet) -> Result<Self> {
        if mj.order < 2 {
            return Err(Error::InsufficientJetOrder {
                have: mj.order,
                need: 2,
            });
        }
        let n = mj.dim;
        let order = mj.order;
        let g = JetTensor {
            n,
            rank: 2,
            data: mj.components().to_vec(),
        };
        let ginv = inverse_metric(&g)?;

        let dg: Vec<Vec<Jet>> = (0..n)
            .map(|a| g.data.iter().map(|c| c.derivative(a)).collect())
            .collect();
        let d = |a: usize, i: usize, j: usize| &dg[a][i * n + j];
        let gamma_low = JetTensor::from_fn(n, 3, |x| {
            let (k, i, j) = (x[0], x[1], x[2]);
            (&(d(i, j, k) + d(j, i, k)) - d(k, i, j)).scale(0.5)
        });
        let gamma = JetTensor::from_fn(n, 3, |x| {
            let (m, i, j) = (x[0], x[1], x[2]);
            let zero = zero_like(&gamma_low.data[0], order - 1);
            sum_jets(
                zero,
                (0..n).map(|k| ginv.get(&[m, k]) * gamma_low.get(&[k, i, j])),
            )
        });

        let dgamma: Vec<Vec<Jet>> = (0..n)
            .map(|a| gamma.data.iter().map(|c| c.derivative(a)).collect())
            .collect();
        let dgm = |a: usize, m: usize, i: usize, j: usize| &dgamma[a][(m * n + i) * n + j];
        let rm = JetTensor::from_fn(n, 4, |x| {
            let (m, i, j, k) = (x[0], x[1], x[2], x[3]);
            let base = dgm(i, m, j, k) - dgm(j, m, i, k);
            sum_jets(
                base,
                (0..n).map(|s| {
                    &(gamma.get(&[m, i, s]) * gamma.get(&[s, j, k]))
                        - &(gamma.get(&[m, j, s]) * gamma.get(&[s, i, k]))
                }),
            )
        });
        let k2 = order - 2;
        let riem = JetTensor::from_fn(n, 4, |x| {
            let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
            let zero = zero_like(&g.data[0], k2);
            sum_jets(zero, (0..n).map(|m| g.get(&[k, m]) * rm.get(&[m, i, j, l])))
        });
        let ric = JetTensor::from_fn(n, 2, |x| {
            let (j, l) = (x[0], x[1]);
            let zero = zero_like(&g.data[0], k2);
            sum_jets(
                zero,
                (0..n).flat_map(|i| {
                    let riem = &riem;
                    let ginv = &ginv;
                    (0..n).map(move |k| ginv.get(&[i, k]) * riem.get(&[i, j, k, l]))
                }),
            )
        });
        let scalar = sum_jets(
            zero_like(&g.data[0], k2),
            (0..n * n).map(|jl| &ginv.data[jl] * &ric.data[jl]),
        );
        let schouten = if n >= 2 {
            let c = 1.0 / (2.0 * (n as f64 - 1.0));
            JetTensor::from_fn(n, 2, |x| {
                ric.get(x) - &(&scalar * g.get(x)).scale(c)
            })
        } else {
            ric.clone()
        };
        let weyl = if n >= 4 {
            let c1 = 1.0 / (n as f64 - 2.0);
            let c2 = 1.0 / ((n as f64 - 1.0) * (n as f64 - 2.0));
            JetTensor::from_fn(n, 4, |x| {
                let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
                let gg = |a: usize, b: usize| g.get(&[a, b]);
                let rr = |a: usize, b: usize| ric.get(&[a, b]);
                let mixed = &(&(&(gg(i, k) * rr(j, l)) - &(gg(i, l) * rr(j, k)))
                    - &(gg(j, k) * rr(i, l)))
                    + &(gg(j, l) * rr(i, k));
                let metric = &(gg(i, k) * gg(j, l)) - &(gg(i, l) * gg(j, k));
                &(riem.get(x) - &mixed.scale(c1)) + &(&scalar * &metric).scale(c2)
            })
        } else {
            JetTensor::from_fn(n, 4, |_| zero_like(&g.data[0], k2))
        };

        Ok(CurvatureJets {
            n,
            order,
            g,
            ginv,
            gamma,
            riem,
            ric,
            scalar,
            schouten,
            weyl,
        })
    }

    /// Weyl through the Schouten tensor (values only).
    pub fn weyl_schouten_values(&self) -> Tensor {
        let n = self.n;
        if n < 3 {
            return Tensor::zeros(n, 4);
        }
        let g = self.g.values();
        let a = self.schouten.values();
        let r = self.riem.values();
        let c = 1.0 / (n as f64 - 2.0);
        Tensor::from_fn(n, 4, |x| {
            let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
            r.get(x)
                - c * (g.at2(i, k) * a.at2(j, l) - g.at2(i, l) * a.at2(j, k)
                    - g.at2(j, k) * a.at2(i, l)
                    + g.at2(j, l) * a.at2(i, k))
        })
    }

    /// Cotton tensor from `nabla Ric` and `d R` as jets of order `K - 3`.
    pub fn cotton_jets(&self) -> JetTensor {
        let n = self.n;
        let nric = self.ric.covariant_derivative(&self.gamma);
        let dr: Vec<Jet> = (0..n).map(|i| self.scalar.derivative(i)).collect();
        let c = 1.0 / (2.0 * (n as f64 - 1.0));
        JetTensor::from_fn(n, 3, |x| {
            let (i, j, k) = (x[0], x[1], x[2]);
            let grad = &(self.g.get(&[j, k]) * &dr[i]) - &(self.g.get(&[i, k]) * &dr[j]);
            &(nric.get(&[i, j, k]) - nric.get(&[j, i, k])) - &grad.scale(c)
        })
    }
}

/// Run the pipeline on an existing metric jet.
pub fn curvature_from_jet(mj: &MetricJet, depth: Depth) -> Result<CurvaturePack> {
    let need = depth.metric_order();
    if mj.order < need {
        return Err(Error::InsufficientJetOrder {
            have: mj.order,
            need,
        });
    }
    let cj = CurvatureJets::from_metric_jet(mj)?;
    let n = cj.n;
    let gamma = cj.gamma.values();
    let ginv = cj.ginv.values();
    let weyl = cj.weyl.values();
    let mut pack = CurvaturePack {
        n,
        depth,
        g: cj.g.values(),
        ginv: ginv.clone(),
        gamma: gamma.clone(),
        riem: cj.riem.values(),
        ric: cj.ric.values(),
        scalar: cj.scalar.value(),
        schouten: cj.schouten.values(),
        weyl_schouten: cj.weyl_schouten_values(),
        weyl,
        grad_scalar: None,
        cotton: None,
        cotton_schouten: None,
        nabla_weyl: None,
        bach: None,
        bach_cotton: None,
    };
    if depth == Depth::Riemann {
        return Ok(pack);
    }

    pack.grad_scalar = Some(Tensor::from_fn(n, 1, |x| cj.scalar.partial(&[x[0]])));
    let cotton = cj.cotton_jets();
    pack.cotton = Some(cotton.values());
    let na = nabla_values(&cj.schouten, &gamma);
    pack.cotton_schouten = Some(Tensor::from_fn(n, 3, |x| {
        na.at3(x[0], x[1], x[2]) - na.at3(x[1], x[0], x[2])
    }));
    pack.nabla_weyl = Some(nabla_values(&cj.weyl, &gamma));
    if depth == Depth::Cotton || n < 3 {
        return Ok(pack);
    }

    let nc = nabla_values(&cotton, &gamma);
    let div_c = Tensor::from_fn(n, 2, |x| {
        let mut s = 0.0;
        for k in 0..n {
            for a in 0..n {
                s += ginv.at2(k, a) * nc.get(&[a, k, x[0], x[1]]);
            }
        }
        s
    });
    if n == 3 {
        pack.bach = Some(div_c.clone());
        pack.bach_cotton = Some(div_c);
        return Ok(pack);
    }

    let ric_up = raise2(&pack.ric, &ginv);
    let rw = Tensor::from_fn(n, 2, |x| {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += ric_up.at2(a, b) * pack.weyl.at4(x[0], a, x[1], b);
            }
        }
        s
    });
    let nw = cj.weyl.covariant_derivative(&cj.gamma);
    let nnw = nabla_values(&nw, &gamma);
    let nf = n as f64;
    pack.bach = Some(Tensor::from_fn(n, 2, |x| {
        let (i, j) = (x[0], x[1]);
        let mut s = 0.0;
        for k in 0..n {
            for l in 0..n {
                for a in 0..n {
                    let gka = ginv.at2(k, a);
                    if gka == 0.0 {
                        continue;
                    }
                    for b in 0..n {
                        s += gka * ginv.at2(l, b) * nnw.get(&[a, b, i, k, j, l]);
                    }
                }
            }
        }
        s / (nf - 3.0) + rw.at2(i, j) / (nf - 2.0)
    }));
    pack.bach_cotton = Some(Tensor::from_fn(n, 2, |x| {
        (div_c.at2(x[0], x[1]) + rw.at2(x[0], x[1])) / (nf - 2.0)
    }));
    Ok(pack)
}

pub fn curvature_pack(chart: &dyn MetricChart, p: &ChartPoint, depth: Depth) -> Result<CurvaturePack> {
    let need = depth.metric_order();
    if chart.max_order() < need {
        return Err(Error::InsufficientJetOrder {
            have: chart.max_order(),
            need,
        });
    }
    let mj = metric_jet(chart, p, need)?;
    curvature_from_jet(&mj, depth)
}

impl CurvaturePack {
    pub fn cotton(&self) -> &Tensor {
        self.cotton
            .as_ref()
            .expect("Cotton tensor needs depth Cotton or deeper")
    }

    pub fn ric_up(&self) -> Tensor {
        raise2(&self.ric, &self.ginv)
    }

    /// Largest violation of the Riemann symmetries, including first Bianchi.
    pub fn riemann_symmetry_residual(&self) -> f64 {
        let n = self.n;
        let r = &self.riem;
        let mut worst = 0.0f64;
        let mut push = |v: f64| {
            let a = math::abs(v);
            if a.is_nan() || a > worst {
                worst = if a.is_nan() { f64::NAN } else { a };
            }
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = r.at4(i, j, k, l);
                        push(v + r.at4(j, i, k, l));
                        push(v + r.at4(i, j, l, k));
                        push(v - r.at4(k, l, i, j));
                        push(v + r.at4(j, k, i, l) + r.at4(k, i, j, l));
                    }
                }
            }
        }
        worst
    }

    pub fn ricci_asymmetry(&self) -> f64 {
        let n = self.n;
        math::max_abs((0..n * n).map(|ij| self.ric.at2(ij / n, ij % n) - self.ric.at2(ij % n, ij / n)))
    }

    /// Largest trace of the Weyl tensor over any pair of slots.
    pub fn weyl_trace_residual(&self) -> f64 {
        max_trace(&self.weyl, &self.ginv)
    }

    /// `|W - W_via_Schouten|`.
    pub fn weyl_decomposition_residual(&self) -> f64 {
        self.weyl.max_abs_diff(&self.weyl_schouten)
    }

    /// Skew-symmetry in the first two slots and every trace of the Cotton tensor.
    pub fn cotton_symmetry_residual(&self) -> Option<f64> {
        let c = self.cotton.as_ref()?;
        let n = self.n;
        let skew = math::max_abs(
            (0..n * n * n).map(|x| c.at3(x / (n * n), x / n % n, x % n) + c.at3(x / n % n, x / (n * n), x % n)),
        );
        Some(skew.max(max_trace(c, &self.ginv)))
    }

    pub fn cotton_forms_residual(&self) -> Option<f64> {
        Some(self.cotton.as_ref()?.max_abs_diff(self.cotton_schouten.as_ref()?))
    }

    /// `|B_weyl - B_cotton|` relative to `max(|B|, |Rm|^2)`, all norms taken
    /// with `g`.
    pub fn bach_forms_residual(&self) -> Option<f64> {
        let (a, b) = (self.bach.as_ref()?, self.bach_cotton.as_ref()?);
        let norm = |t: &Tensor| math::sqrt(contract_full(t, t, &self.ginv).max(0.0));
        let diff = Tensor {
            data: a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect(),
            ..a.clone()
        };
        let d = norm(&diff);
        let rm = norm(&self.riem);
        let scale = norm(a).max(norm(b)).max(rm * rm);
        Some(if d == 0.0 { 0.0 } else { d / scale })
    }

    pub fn bach_asymmetry(&self) -> Option<f64> {
        let b = self.bach.as_ref()?;
        let n = self.n;
        Some(math::max_abs((0..n * n).map(|ij| b.at2(ij / n, ij % n) - b.at2(ij % n, ij / n))))
    }

    pub fn bach_trace(&self) -> Option<f64> {
        let b = self.bach.as_ref()?;
        let n = self.n;
        Some((0..n * n).map(|ij| self.ginv.data[ij] * b.data[ij]).sum())
    }

    /// `C_ijk R^jk`.
    pub fn cotton_ricci(&self) -> Option<Tensor> {
        let c = self.cotton.as_ref()?;
        let up = self.ric_up();
        let n = self.n;
        Some(Tensor::from_fn(n, 1, |x| {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    s += c.at3(x[0], j, k) * up.at2(j, k);
                }
            }
            s
        }))
    }
}

/// Largest contraction of `t` over any pair of its slots.
pub fn max_trace(t: &Tensor, ginv: &Tensor) -> f64 {
    let n = t.n;
    let r = t.rank;
    let mut worst = 0.0f64;
    let mut idx = alloc::vec![0usize; r];
    for s1 in 0..r {
        for s2 in s1 + 1..r {
            let free = r - 2;
            let count = n.pow(free as u32);
            let mut rest = alloc::vec![0usize; free];
            for f in 0..count {
                crate::tensor::unflat(n, f, &mut rest);
                let mut s = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        let mut q = 0;
                        for (slot, v) in idx.iter_mut().enumerate() {
                            *v = if slot == s1 {
                                a
                            } else if slot == s2 {
                                b
                            } else {
                                q += 1;
                                rest[q - 1]
                            };
                        }
                        s += ginv.at2(a, b) * t.get(&idx);
                    }
                }
                let a = math::abs(s);
                if a.is_nan() {
                    return f64::NAN;
                }
                worst = worst.max(a);
            }
        }
    }
    worst
}

/// `max |C_ijk + ((n-2)/(n-3)) g^lm nabla_m W_ijkl|`.
pub fn weyl_divergence_check(chart: &dyn MetricChart, p: &ChartPoint) -> Result<f64> {
    let n = chart.dim();
    if n <= 3 {
        return Err(Error::DimensionTooLow {
            dim: n,
            what: "the Weyl divergence identity",
        });
    }
    let pack = curvature_pack(chart, p, Depth::Cotton)?;
    Ok(weyl_divergence_residual(&pack))
}

pub fn weyl_divergence_residual(pack: &CurvaturePack) -> f64 {
    let n = pack.n;
    let c = pack.cotton();
    let nw = pack.nabla_weyl.as_ref().expect("depth >= Cotton");
    let k = (n as f64 - 2.0) / (n as f64 - 3.0);
    let res = Tensor::from_fn(n, 3, |x| {
        let mut s = 0.0;
        for l in 0..n {
            for m in 0..n {
                s += pack.ginv.at2(l, m) * nw.get(&[m, x[0], x[1], x[2], l]);
            }
        }
        c.get(x) + k * s
    });
    res.max_abs()
}

pub fn bach_tensor(chart: &dyn MetricChart, p: &ChartPoint) -> Result<Tensor> {
    let n = chart.dim();
    if n <= 2 {
        return Err(Error::DimensionTooLow {
            dim: n,
            what: "the Bach tensor",
        });
    }
    Ok(curvature_pack(chart, p, Depth::Bach)?.bach.expect("n >= 3 at Bach depth"))
}

/// Divergence of the Bach tensor at a point together with the pack it was built from.
#[derive(Clone, Debug)]
pub struct BachDivergence {
    /// `nabla^j B_ij`.
    pub div: Tensor,
    pub pack: CurvaturePack,
}

impl BachDivergence {
    /// The identity residual: `div B + C.Ric` for `n = 3`,
    /// `div B - ((n-4)/(n-2)^2) C.Ric` for `n >= 4`.
    pub fn residual(&self) -> f64 {
        let n = self.pack.n;
        let cr = self.pack.cotton_ricci().expect("depth Bach");
        let k = if n == 3 {
            -1.0
        } else {
            let nf = n as f64;
            (nf - 4.0) / ((nf - 2.0) * (nf - 2.0))
        };
        math::max_abs((0..n).map(|i| self.div.data[i] - k * cr.data[i]))
    }
}

/// Step size for the Richardson-differenced fifth derivative level.
pub const DIFF_STEP: f64 = 1e-3;

pub fn bach_divergence(chart: &dyn MetricChart, p: &ChartPoint) -> Result<BachDivergence> {
    let n = chart.dim();
    if n <= 2 {
        return Err(Error::DimensionTooLow {
            dim: n,
            what: "the Bach divergence",
        });
    }
    let pack = curvature_pack(chart, p, Depth::Bach)?;
    let b = pack.bach.clone().expect("n >= 3");
    let db = diff::richardson_partials(chart, p, DIFF_STEP, |q| bach_tensor(chart, q))?;
    let nb = covariant_from_partials(&db, &b, &pack.gamma);
    let div = Tensor::from_fn(n, 1, |x| {
        let mut s = 0.0;
        for j in 0..n {
            for a in 0..n {
                s += pack.ginv.at2(j, a) * nb.at3(a, x[0], j);
            }
        }
        s
    });
    Ok(BachDivergence { div, pack })
}

pub fn bach_divergence_check(chart: &dyn MetricChart, p: &ChartPoint) -> Result<f64> {
    Ok(bach_divergence(chart, p)?.residual())
}
