//! Float helpers that are not available in `core`.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// `|x|^s`, exact for `s == 1` and `s == 2`.
#[inline]
pub(crate) fn abs_pow(x: f64, s: f64) -> f64 {
    let a = x.abs();
    if s == 1.0 {
        a
    } else if s == 2.0 {
        a * a
    } else {
        powf(a, s)
    }
}

/// Inverse of [`abs_pow`] on non-negative inputs.
#[inline]
pub(crate) fn root(x: f64, s: f64) -> f64 {
    if s == 1.0 {
        x
    } else if s == 2.0 {
        sqrt(x)
    } else {
        powf(x, 1.0 / s)
    }
}
