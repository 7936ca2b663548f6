//! Shared numeric helpers: order-independent summation and monotone root
//! bracketing.

use crate::scalar::Real;

/// Compensated sum over a canonical ordering of the summands.
///
/// The inputs are sorted before accumulation, so the result depends only on
/// the multiset of values, never on their order. This is what makes primal
/// and dual objectives reproducible under point relabeling and under
/// parallel evaluation.
pub fn stable_sum<R: Real>(xs: &[R]) -> R {
    let mut v: Vec<R> = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("sum over non-NaN values"));
    let mut s = R::zero();
    let mut c = R::zero();
    for &x in &v {
        let t = s + x;
        if s.abs() >= x.abs() {
            c = c + ((s - t) + x);
        } else {
            c = c + ((x - t) + s);
        }
        s = t;
    }
    s + c
}

/// Like [`stable_sum`] but over an iterator of lazily computed terms.
pub fn stable_sum_of<R: Real>(it: impl Iterator<Item = R>) -> R {
    let v: Vec<R> = it.collect();
    stable_sum(&v)
}

/// Finds `x` in `[lo, hi]` with `f(x) = 0` for non-decreasing `f`, by
/// bisection down to relative width `tol`. Requires `f(lo) <= 0 <= f(hi)`.
pub fn bisect_increasing<R: Real>(mut lo: R, mut hi: R, tol: R, f: impl Fn(R) -> R) -> R {
    debug_assert!(lo <= hi);
    let two = R::of(2.0);
    while hi - lo > tol * (R::one() + hi.abs()) {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= R::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}
