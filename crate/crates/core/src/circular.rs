//! Small helpers for quantities that live on a circle.

use std::f64::consts::TAU;

/// Reduces `x` into `[0, period)`.
///
/// `rem_euclid` can round up to exactly `period` for tiny negative inputs;
/// that case folds back to zero.
#[inline]
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Reduces an angle into `[0, 2 pi)`.
#[inline]
pub fn wrap_angle(angle: f64) -> f64 {
    wrap(angle, TAU)
}

/// Signed offset `b - a` on a circle of circumference `period`, in
/// `[-period/2, period/2)`.
#[inline]
pub fn signed_offset(a: f64, b: f64, period: f64) -> f64 {
    let d = wrap(b - a, period);
    if d >= 0.5 * period {
        d - period
    } else {
        d
    }
}

/// Shortest distance between two points on a circle of circumference `period`.
#[inline]
pub fn distance(a: f64, b: f64, period: f64) -> f64 {
    let d = wrap(b - a, period);
    d.min(period - d)
}

/// Shortest angular distance, in `[0, pi]`.
#[inline]
pub fn angular_distance(a: f64, b: f64) -> f64 {
    distance(a, b, TAU)
}

/// Weighted circular mean direction and mean resultant length.
///
/// Returns `(direction, resultant)` with the direction in `[0, 2 pi)`.
/// Weights need not be normalized.
pub fn mean_direction(samples: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    let (mut s, mut c, mut w) = (0.0, 0.0, 0.0);
    for (angle, weight) in samples {
        let (sin, cos) = angle.sin_cos();
        s += weight * sin;
        c += weight * cos;
        w += weight;
    }
    if w <= 0.0 {
        return (0.0, 0.0);
    }
    (wrap_angle(s.atan2(c)), (s * s + c * c).sqrt() / w)
}
