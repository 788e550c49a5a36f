//! Floating-point comparison policy.
//!
//! Comparisons that follow arithmetic (sums along chains, ratios, square
//! roots) use a relative tolerance with an absolute floor. Ball membership
//! is the strict `d < r` with no tolerance at all.

/// Relative tolerance for accumulated arithmetic.
pub const REL_TOL: f64 = 1e-9;

/// Absolute floor under the relative tolerance.
pub const ABS_FLOOR: f64 = 1e-12;

/// Allowed slack when comparing `a` against `b`.
#[inline]
pub fn slack(a: f64, b: f64) -> f64 {
    (REL_TOL * a.abs().max(b.abs())).max(ABS_FLOOR)
}

/// `a <= b` up to [`slack`].
#[inline]
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + slack(a, b)
}

/// `a >= b` up to [`slack`].
#[inline]
pub fn approx_ge(a: f64, b: f64) -> bool {
    approx_le(b, a)
}

#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= slack(a, b)
}
