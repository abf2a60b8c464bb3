//! Safeguarded Newton iteration on a sign-changing bracket.

use crate::error::{Error, Result};
use crate::real::{lit, Real};

const MAX_ITER: usize = 200;

/// Finds a root of `f` in `[lo, hi]` given `f_df(x) = (f(x), f'(x))`.
///
/// Newton steps that leave the current bracket, or do not shrink the residual
/// fast enough, are replaced by bisection. Converges when the bracket width or
/// the Newton update drops below `rel_tol · |x|` (with `abs_tol` as a floor).
pub fn safeguarded_newton<T, F>(mut f_df: F, lo: T, hi: T, rel_tol: T, abs_tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> (T, T),
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (mut fa, _) = f_df(a);
    let (fb, _) = f_df(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NotBracketed { lo: a.as_f64(), hi: b.as_f64(), f_lo: fa.as_f64(), f_hi: fb.as_f64() });
    }

    let half = lit::<T>(0.5);
    let mut x = a + (b - a) * half;
    let mut prev_width = b - a;
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f_df(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let tol = abs_tol.max(rel_tol * x.abs());
        if b - a <= tol {
            return Ok(a + (b - a) * half);
        }

        let newton = x - fx / dfx;
        let width = b - a;
        let use_newton =
            dfx != T::zero() && newton.is_finite() && newton > a && newton < b && width <= prev_width * lit::<T>(0.75);
        prev_width = width;
        if use_newton {
            let step = (newton - x).abs();
            x = newton;
            if step <= tol {
                return Ok(x);
            }
        } else {
            x = a + width * half;
            prev_width = width * lit::<T>(2.0);
        }
    }
    Err(Error::RootNotConverged { lo: a.as_f64(), hi: b.as_f64(), iterations: MAX_ITER })
}
