//! Dense coordinate tensors with every index lowered.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::jet::Jet;
use crate::math;

/// Flat row-major offset of a multi-index in base `n`.
#[inline]
pub fn flat(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Inverse of [`flat`].
#[inline]
pub fn unflat(n: usize, mut k: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = k % n;
        k /= n;
    }
}

/// Values of a rank-`rank` tensor in dimension `n`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub n: usize,
    pub rank: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(n: usize, rank: usize) -> Self {
        Tensor {
            n,
            rank,
            data: vec![0.0; n.pow(rank as u32)],
        }
    }

    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let len = n.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let mut data = Vec::with_capacity(len);
        for k in 0..len {
            unflat(n, k, &mut idx);
            data.push(f(&idx));
        }
        Tensor { n, rank, data }
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.rank);
        self.data[flat(self.n, idx)]
    }

    #[inline]
    pub fn at2(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn at3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    #[inline]
    pub fn at4(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }

    pub fn max_abs(&self) -> f64 {
        math::max_abs(self.data.iter().copied())
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        math::max_abs(self.data.iter().zip(&other.data).map(|(a, b)| a - b))
    }

    pub fn scaled(&self, k: f64) -> Tensor {
        Tensor {
            n: self.n,
            rank: self.rank,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    /// Plain-text dump: one header line naming the index order, then one
    /// value per line in row-major order.
    pub fn dump(&self, name: &str, indices: &str) -> String {
        let mut s = format!("# {name}[{indices}] dim={} rank={}\n", self.n, self.rank);
        for v in &self.data {
            let _ = writeln!(s, "{v:.17e}");
        }
        s
    }
}

/// Full contraction `T_{i..} S_{j..} g^{ij} ...` of two tensors of the same
/// rank with the inverse metric on every slot.
pub fn contract_full(a: &Tensor, b: &Tensor, ginv: &Tensor) -> f64 {
    assert_eq!(a.rank, b.rank);
    let mut raised = b.clone();
    for slot in 0..b.rank {
        raised = raise_slot(&raised, slot, ginv);
    }
    a.data.iter().zip(&raised.data).map(|(x, y)| x * y).sum()
}

/// Raise one slot of a tensor with `g^{-1}`.
pub fn raise_slot(t: &Tensor, slot: usize, ginv: &Tensor) -> Tensor {
    let n = t.n;
    let mut idx = vec![0usize; t.rank];
    Tensor::from_fn(n, t.rank, |target| {
        idx.copy_from_slice(target);
        let mut s = 0.0;
        for m in 0..n {
            idx[slot] = m;
            s += ginv.at2(target[slot], m) * t.get(&idx);
        }
        s
    })
}

/// A tensor whose components are jets.
#[derive(Clone, Debug)]
pub struct JetTensor {
    pub n: usize,
    pub rank: usize,
    pub data: Vec<Jet>,
}

impl JetTensor {
    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Jet) -> Self {
        let len = n.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let mut data = Vec::with_capacity(len);
        for k in 0..len {
            unflat(n, k, &mut idx);
            data.push(f(&idx));
        }
        JetTensor { n, rank, data }
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.data[flat(self.n, idx)]
    }

    pub fn order(&self) -> usize {
        self.data.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn values(&self) -> Tensor {
        Tensor {
            n: self.n,
            rank: self.rank,
            data: self.data.iter().map(Jet::value).collect(),
        }
    }

    /// Covariant derivative with the derivative index placed first:
    /// `(nabla T)[a, i1..ir] = d_a T_{i1..ir} - sum_s Gamma^m_{a i_s} T_{..m..}`.
    /// `gamma` stores `Gamma^m_{ij}` at `[m, i, j]`.
    pub fn covariant_derivative(&self, gamma: &JetTensor) -> JetTensor {
        let n = self.n;
        let r = self.rank;
        let partials: Vec<Vec<Jet>> = (0..n)
            .map(|a| self.data.iter().map(|c| c.derivative(a)).collect())
            .collect();
        let mut inner = vec![0usize; r];
        JetTensor::from_fn(n, r + 1, |idx| {
            let a = idx[0];
            let rest = &idx[1..];
            let mut acc = partials[a][flat(n, rest)].clone();
            for s in 0..r {
                inner.copy_from_slice(rest);
                for m in 0..n {
                    inner[s] = m;
                    let term = gamma.get(&[m, a, rest[s]]) * self.get(&inner);
                    acc = &acc - &term;
                }
            }
            acc
        })
    }
}

/// Covariant derivative from coordinate partials already evaluated at a
/// point: `partials[a, i..]` holds `d_a T_{i..}`.
pub fn covariant_from_partials(partials: &Tensor, t: &Tensor, gamma: &Tensor) -> Tensor {
    let n = t.n;
    let r = t.rank;
    let mut inner = vec![0usize; r];
    Tensor::from_fn(n, r + 1, |idx| {
        let a = idx[0];
        let rest = &idx[1..];
        let mut acc = partials.get(idx);
        for s in 0..r {
            inner.copy_from_slice(rest);
            for m in 0..n {
                inner[s] = m;
                acc -= gamma.at3(m, a, rest[s]) * t.get(&inner);
            }
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_trip() {
        let mut idx = [0usize; 4];
        for k in 0..81 {
            unflat(3, k, &mut idx);
            assert_eq!(flat(3, &idx), k);
        }
    }

    #[test]
    fn dump_has_header_and_all_values() {
        let t = Tensor::from_fn(2, 2, |i| (i[0] * 2 + i[1]) as f64);
        let s = t.dump("g", "ij");
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# g[ij] dim=2 rank=2");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4].parse::<f64>().unwrap(), 3.0);
    }

    #[test]
    fn full_contraction_with_identity_is_euclidean() {
        let id = Tensor::from_fn(3, 2, |i| if i[0] == i[1] { 1.0 } else { 0.0 });
        let a = Tensor::from_fn(3, 3, |i| (i[0] + 2 * i[1] + 3 * i[2]) as f64);
        let sq: f64 = a.data.iter().map(|x| x * x).sum();
        assert!((contract_full(&a, &a, &id) - sq).abs() < 1e-12);
    }
}
