//! Float helpers that work without `std`.
//!
//! Everything goes through `libm` so results do not depend on whether the
//! `std` feature is enabled.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Maximum under the IEEE total order, so the result does not depend on the
/// order in which equal-valued (`-0.0` vs `0.0`) operands are visited.
#[inline]
pub(crate) fn max_total(a: f64, b: f64) -> f64 {
    if a.total_cmp(&b).is_lt() {
        b
    } else {
        a
    }
}
