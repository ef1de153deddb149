//! Richardson-extrapolated central differences of tensor-valued functions.

use alloc::vec::Vec;

use crate::chart::{ChartPoint, MetricChart};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Smallest step tried before giving up near the domain boundary.
pub const MIN_STEP: f64 = 1e-5;

fn shifted(p: &ChartPoint, axis: usize, h: f64) -> ChartPoint {
    let mut c = p.coords.clone();
    c[axis] += h;
    ChartPoint::new(c)
}

/// Largest step `h <= h0` (halving) with `p +- h e_axis` inside the chart.
pub fn admissible_step(chart: &dyn MetricChart, p: &ChartPoint, axis: usize, h0: f64) -> Result<f64> {
    let mut h = h0;
    while h >= MIN_STEP {
        if chart.contains(&shifted(p, axis, h).coords) && chart.contains(&shifted(p, axis, -h).coords) {
            return Ok(h);
        }
        h *= 0.5;
    }
    Err(Error::StepUnderflow)
}

/// Coordinate partials `d_a T` of a tensor field, with the derivative index
/// first, from central differences at `h` and `h/2` combined as
/// `(4 D(h/2) - D(h)) / 3`.
pub fn richardson_partials(
    chart: &dyn MetricChart,
    p: &ChartPoint,
    h0: f64,
    f: impl Fn(&ChartPoint) -> Result<Tensor>,
) -> Result<Tensor> {
    let n = p.dim();
    let mut slices: Vec<Tensor> = Vec::with_capacity(n);
    for axis in 0..n {
        let h = admissible_step(chart, p, axis, h0)?;
        let central = |h: f64| -> Result<Tensor> {
            let plus = f(&shifted(p, axis, h))?;
            let minus = f(&shifted(p, axis, -h))?;
            Ok(Tensor {
                n: plus.n,
                rank: plus.rank,
                data: plus
                    .data
                    .iter()
                    .zip(&minus.data)
                    .map(|(a, b)| (a - b) / (2.0 * h))
                    .collect(),
            })
        };
        let coarse = central(h)?;
        let fine = central(0.5 * h)?;
        slices.push(Tensor {
            n: coarse.n,
            rank: coarse.rank,
            data: fine
                .data
                .iter()
                .zip(&coarse.data)
                .map(|(f, c)| (4.0 * f - c) / 3.0)
                .collect(),
        });
    }
    let rank = slices[0].rank;
    let mut data = Vec::with_capacity(n * slices[0].data.len());
    for s in &slices {
        data.extend_from_slice(&s.data);
    }
    Ok(Tensor { n, rank: rank + 1, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::FlatChart;

    #[test]
    fn recovers_polynomial_gradient() {
        let c = FlatChart::new(2);
        let p = ChartPoint::new([0.3, -0.4]);
        let d = richardson_partials(&c, &p, 1e-2, |q| {
            let (x, y) = (q.coords[0], q.coords[1]);
            Ok(Tensor {
                n: 2,
                rank: 1,
                data: alloc::vec![x * x * x * y, libm::sin(x) + y * y],
            })
        })
        .unwrap();
        // [a, i] = d_a T_i
        assert!((d.at2(0, 0) - 3.0 * 0.09 * -0.4).abs() < 1e-9);
        assert!((d.at2(1, 0) - 0.027).abs() < 1e-9);
        assert!((d.at2(0, 1) - libm::cos(0.3)).abs() < 1e-9);
        assert!((d.at2(1, 1) + 0.8).abs() < 1e-9);
    }

    #[test]
    fn boundary_underflow() {
        let c = FlatChart { n: 1, half_width: 1.0 };
        let p = ChartPoint::new([1.0 - 1e-7]);
        assert_eq!(admissible_step(&c, &p, 0, 1e-3), Err(Error::StepUnderflow));
        let q = ChartPoint::new([1.0 - 3e-4]);
        assert!((admissible_step(&c, &q, 0, 1e-3).unwrap() - 2.5e-4).abs() < 1e-18);
    }
}
