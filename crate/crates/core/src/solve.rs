//! Scalar bisection shared by the threshold searches and the direction-flow
//! crossing finder.

use crate::error::{Error, Result};

/// Bisect `f` over `[lo, hi]` until the bracket is narrower than `width`.
/// Requires opposite signs at the endpoints. Returns the bracket midpoint
/// together with the final bracket.
pub(crate) fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    width: f64,
) -> Result<(f64, (f64, f64))> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    let product = f_lo * f_hi;
    // NaN at either endpoint counts as a missing sign change.
    if product.is_nan() || product >= 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    while hi - lo > width {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break; // hit float resolution
        }
        let f_mid = f(mid);
        if (f_mid >= 0.0) == (f_lo >= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + (hi - lo) / 2.0, (lo, hi)))
}
