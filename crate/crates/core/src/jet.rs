//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A [`Jet`] stores the Taylor coefficients of a smooth function of `nvars`
//! coordinate offsets up to a total degree `order`. Arithmetic on jets is
//! exact up to truncation, so evaluating a closed-form expression on jet
//! coordinates yields exact partial derivatives up to `order`; this is
//! forward-mode differentiation of arbitrary (bounded) order.
//!
//! Monomials are stored in graded order, so a jet of order `k` is a prefix of
//! the coefficient array of a jet of order `k + 1`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::math;

/// Monomial tables shared by all jets over the same variables.
pub struct JetSpace {
    nvars: usize,
    order: usize,
    exps: Vec<Vec<u8>>,
    len_upto: Vec<usize>,
    // (lhs, rhs, out) sorted by degree of `out`
    mul: Vec<(u32, u32, u32)>,
    mul_upto: Vec<usize>,
    // per variable: (src, dst, factor) with dst = src - e_var, sorted by degree of src
    deriv: Vec<Vec<(u32, u32, f64)>>,
    deriv_upto: Vec<Vec<usize>>,
    index: BTreeMap<Vec<u8>, usize>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("monomials", &self.exps.len())
            .finish()
    }
}

fn push_degree(nvars: usize, degree: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let var = prefix.len();
    if var + 1 == nvars {
        prefix.push(degree as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in (0..=degree).rev() {
        prefix.push(k as u8);
        push_degree(nvars, degree - k, prefix, out);
        prefix.pop();
    }
}

impl JetSpace {
    pub fn new(nvars: usize, order: usize) -> Arc<Self> {
        assert!(nvars >= 1, "jet space needs at least one variable");
        let mut exps = Vec::new();
        let mut len_upto = Vec::with_capacity(order + 1);
        for d in 0..=order {
            push_degree(nvars, d, &mut Vec::new(), &mut exps);
            len_upto.push(exps.len());
        }
        let degree: Vec<usize> = exps
            .iter()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .collect();
        let mut index = BTreeMap::new();
        for (i, e) in exps.iter().enumerate() {
            index.insert(e.clone(), i);
        }

        let mut mul = Vec::new();
        for i in 0..exps.len() {
            for j in 0..exps.len() {
                if degree[i] + degree[j] > order {
                    continue;
                }
                let sum: Vec<u8> = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                mul.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        mul.sort_by_key(|&(i, j, _)| (degree[i as usize] + degree[j as usize], i, j));
        let mul_upto = (0..=order)
            .map(|k| {
                mul.iter()
                    .take_while(|&&(i, j, _)| degree[i as usize] + degree[j as usize] <= k)
                    .count()
            })
            .collect();

        let mut deriv = Vec::with_capacity(nvars);
        let mut deriv_upto = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut table = Vec::new();
            for (src, e) in exps.iter().enumerate() {
                if e[v] == 0 {
                    continue;
                }
                let mut d = e.clone();
                d[v] -= 1;
                table.push((src as u32, index[&d] as u32, e[v] as f64));
            }
            let upto = (0..=order)
                .map(|k| table.iter().filter(|&&(s, _, _)| degree[s as usize] <= k).count())
                .collect();
            deriv.push(table);
            deriv_upto.push(upto);
        }

        Arc::new(JetSpace {
            nvars,
            order,
            exps,
            len_upto,
            mul,
            mul_upto,
            deriv,
            deriv_upto,
            index,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of monomials of total degree at most `order`.
    pub fn len(&self, order: usize) -> usize {
        self.len_upto[order]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn monomial_index(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    /// Exponent vector of the monomial at `idx`.
    pub fn exponents(&self, idx: usize) -> &[u8] {
        &self.exps[idx]
    }
}

/// Truncated Taylor polynomial in the offsets from a base point.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &self.c)
            .finish()
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, value: f64, order: usize) -> Self {
        assert!(order <= space.order);
        let mut c = vec![0.0; space.len(order)];
        c[0] = value;
        Jet {
            space: space.clone(),
            order,
            c,
        }
    }

    /// The coordinate `x_var = base + t_var` at full order.
    pub fn variable(space: &Arc<JetSpace>, var: usize, base: f64) -> Self {
        let mut j = Jet::constant(space, base, space.order);
        if space.order >= 1 {
            j.c[1 + var] = 1.0;
        }
        j
    }

    /// Coordinate jets for every variable at a base point.
    pub fn coordinates(space: &Arc<JetSpace>, base: &[f64]) -> Vec<Jet> {
        assert_eq!(base.len(), space.nvars);
        base.iter()
            .enumerate()
            .map(|(v, &b)| Jet::variable(space, v, b))
            .collect()
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Partial derivative with respect to the listed variables (repeats allowed).
    pub fn partial(&self, vars: &[usize]) -> f64 {
        if vars.len() > self.order {
            return f64::NAN;
        }
        let mut e = vec![0u8; self.space.nvars];
        for &v in vars {
            e[v] += 1;
        }
        let idx = self.space.index[&e];
        let weight: f64 = e
            .iter()
            .map(|&k| (1..=k as u32).map(|x| x as f64).product::<f64>())
            .product();
        self.c[idx] * weight
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            space: self.space.clone(),
            order,
            c: self.c[..self.space.len(order)].to_vec(),
        }
    }

    /// `d/dx_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut c = vec![0.0; self.space.len(order)];
        let table = &self.space.deriv[var];
        for &(src, dst, factor) in &table[..self.space.deriv_upto[var][self.order]] {
            c[dst as usize] += factor * self.c[src as usize];
        }
        Jet {
            space: self.space.clone(),
            order,
            c,
        }
    }

    /// Compose a univariate Taylor series `sum_k s_k (x - x0)^k` (with
    /// `x0 = self.value()`) with this jet.
    pub fn compose(&self, series: &[f64]) -> Jet {
        let mut delta = self.clone();
        delta.c[0] = 0.0;
        let top = self.order.min(series.len().saturating_sub(1));
        let mut acc = Jet::constant(&self.space, series[top], self.order);
        for k in (0..top).rev() {
            acc = &acc * &delta;
            acc.c[0] += series[k];
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let x0 = self.value();
        let mut s = Vec::with_capacity(self.order + 1);
        let mut t = 1.0 / x0;
        for _ in 0..=self.order {
            s.push(t);
            t *= -1.0 / x0;
        }
        self.compose(&s)
    }

    pub fn exp(&self) -> Jet {
        let e0 = math::exp(self.value());
        let mut s = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            s.push(e0 / fact);
        }
        self.compose(&s)
    }

    pub fn ln(&self) -> Jet {
        let x0 = self.value();
        let mut s = vec![math::ln(x0)];
        let mut p = 1.0;
        for k in 1..=self.order {
            p /= x0;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            s.push(sign * p / k as f64);
        }
        self.compose(&s)
    }

    pub fn powf(&self, alpha: f64) -> Jet {
        let x0 = self.value();
        let mut s = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                binom *= (alpha - (k as f64 - 1.0)) / k as f64;
            }
            s.push(binom * math::pow(x0, alpha - k as f64));
        }
        self.compose(&s)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn sin(&self) -> Jet {
        self.trig(false)
    }

    pub fn cos(&self) -> Jet {
        self.trig(true)
    }

    fn trig(&self, cosine: bool) -> Jet {
        let x0 = self.value();
        let (sv, cv) = (math::sin(x0), math::cos(x0));
        // derivatives cycle through sin, cos, -sin, -cos
        let cycle = if cosine {
            [cv, -sv, -cv, sv]
        } else {
            [sv, cv, -sv, -cv]
        };
        let mut s = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            s.push(cycle[k % 4] / fact);
        }
        self.compose(&s)
    }

    pub fn square(&self) -> Jet {
        self * self
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet {
            space: self.space.clone(),
            order: self.order,
            c: self.c.iter().map(|x| x * k).collect(),
        }
    }

    fn zip_with(&self, other: &Jet, op: impl Fn(f64, f64) -> f64) -> Jet {
        debug_assert!(Arc::ptr_eq(&self.space, &other.space));
        let order = self.order.min(other.order);
        let len = self.space.len(order);
        Jet {
            space: self.space.clone(),
            order,
            c: (0..len).map(|i| op(self.c[i], other.c[i])).collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        debug_assert!(Arc::ptr_eq(&self.space, &other.space));
        let order = self.order.min(other.order);
        let mut c = vec![0.0; self.space.len(order)];
        for &(i, j, k) in &self.space.mul[..self.space.mul_upto[order]] {
            c[k as usize] += self.c[i as usize] * other.c[j as usize];
        }
        Jet {
            space: self.space.clone(),
            order,
            c,
        }
    }

    /// `sum_i a_i * b_i` over paired jets; `None` for empty input.
    pub fn dot<'a>(pairs: impl IntoIterator<Item = (&'a Jet, &'a Jet)>) -> Option<Jet> {
        let mut acc: Option<Jet> = None;
        for (a, b) in pairs {
            let p = a * b;
            acc = Some(match acc {
                None => p,
                Some(s) => &s + &p,
            });
        }
        acc
    }
}

macro_rules! jet_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.zip_with(b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| a.zip_with(b, |x, y| x - y));
jet_binop!(Mul, mul, |a, b| a.product(b));
jet_binop!(Div, div, |a, b| a.product(&b.recip()));

macro_rules! jet_scalar_op {
    ($tr:ident, $method:ident, $jet_op_scalar:expr, $scalar_op_jet:expr) => {
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                let f: fn(&Jet, f64) -> Jet = $jet_op_scalar;
                f(self, rhs)
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(f64, &Jet) -> Jet = $scalar_op_jet;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_scalar_op!(
    Add,
    add,
    |a, k| {
        let mut r = a.clone();
        r.c[0] += k;
        r
    },
    |k, a| {
        let mut r = a.clone();
        r.c[0] += k;
        r
    }
);
jet_scalar_op!(
    Sub,
    sub,
    |a, k| {
        let mut r = a.clone();
        r.c[0] -= k;
        r
    },
    |k, a| {
        let mut r = a.scale(-1.0);
        r.c[0] += k;
        r
    }
);
jet_scalar_op!(Mul, mul, |a, k| a.scale(k), |k, a| a.scale(k));
jet_scalar_op!(Div, div, |a, k| a.scale(1.0 / k), |k, a| a.recip().scale(k));

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn monomial_counts_match_binomials() {
        let s = JetSpace::new(6, 4);
        // C(6 + k, k)
        assert_eq!(s.len(0), 1);
        assert_eq!(s.len(1), 7);
        assert_eq!(s.len(2), 28);
        assert_eq!(s.len(3), 84);
        assert_eq!(s.len(4), 210);
    }

    #[test]
    fn product_rule_for_polynomials() {
        let s = JetSpace::new(2, 4);
        let x = Jet::coordinates(&s, &[0.3, -0.7]);
        // p = x^2 y^2 + 3 x y
        let p = &(&x[0] * &x[0]) * &(&x[1] * &x[1]) + 3.0 * (&x[0] * &x[1]);
        let (a, b) = (0.3, -0.7);
        assert!(close(p.value(), a * a * b * b + 3.0 * a * b, 1e-15));
        assert!(close(p.partial(&[0]), 2.0 * a * b * b + 3.0 * b, 1e-15));
        assert!(close(p.partial(&[0, 1]), 4.0 * a * b + 3.0, 1e-15));
        assert!(close(p.partial(&[0, 0, 1, 1]), 4.0, 1e-15));
        assert!(close(p.partial(&[0, 0, 0]), 0.0, 1e-15));
    }

    #[test]
    fn elementary_functions_match_closed_form_derivatives() {
        let s = JetSpace::new(1, 4);
        let x = Jet::variable(&s, 0, 0.8);
        let e = x.exp();
        let l = x.ln();
        let sn = x.sin();
        let r = x.sqrt();
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        for k in 0..=4 {
            let c = |j: &Jet| j.coeffs()[k] * fact[k];
            assert!(close(c(&e), 0.8f64.exp(), 1e-14));
            let sin_d = [0.8f64.sin(), 0.8f64.cos(), -0.8f64.sin(), -0.8f64.cos(), 0.8f64.sin()];
            assert!(close(c(&sn), sin_d[k], 1e-14));
            let ln_d = [0.8f64.ln(), 1.0 / 0.8, -1.0 / 0.64, 2.0 / 0.512, -6.0 / 0.4096];
            assert!(close(c(&l), ln_d[k], 1e-13));
            let mut sq = 0.8f64.sqrt();
            let mut a = 0.5;
            for _ in 0..k {
                sq *= a / 0.8;
                a -= 1.0;
            }
            assert!(close(c(&r), sq, 1e-13));
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let s = JetSpace::new(3, 4);
        let x = Jet::coordinates(&s, &[0.1, 0.2, 0.3]);
        let num = &x[0] + &(&x[1] * &x[2]);
        let den = 1.0 + &(&x[0] * &x[0]) + &x[2];
        let q = &num / &den;
        let back = &q * &den;
        for (a, b) in back.coeffs().iter().zip(num.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_lowers_order() {
        let s = JetSpace::new(2, 3);
        let x = Jet::coordinates(&s, &[0.5, 1.5]);
        let p = &(&x[0] * &x[0]) * &x[1];
        let d = p.derivative(0);
        assert_eq!(d.order(), 2);
        assert!(close(d.value(), 2.0 * 0.5 * 1.5, 1e-15));
        assert!(close(d.partial(&[1]), 2.0 * 0.5, 1e-15));
        assert!(close(d.partial(&[0, 1]), 2.0, 1e-15));
    }
}
