//! Thin wrappers over `libm` so the crate stays `no_std`.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, k: i32) -> f64 {
    libm::pow(x, k as f64)
}

/// Area of the unit sphere `S^k` embedded in `R^(k+1)`.
pub fn sphere_area(k: usize) -> f64 {
    let pi = core::f64::consts::PI;
    match k {
        0 => 2.0,
        1 => 2.0 * pi,
        _ => 2.0 * pi / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

/// Largest absolute value in a slice (0 for an empty slice, NaN propagates).
pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut m = 0.0f64;
    for v in values {
        let a = abs(v);
        if a.is_nan() {
            return f64::NAN;
        }
        if a > m {
            m = a;
        }
    }
    m
}
