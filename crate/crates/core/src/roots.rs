//! Root finding and monotone searches.

use crate::error::{QcError, Result};

/// Default absolute tolerance of [`brentq`].
pub const BRENT_XTOL: f64 = 2e-12;
/// Default relative tolerance of [`brentq`] (four machine epsilons).
pub const BRENT_RTOL: f64 = 4.0 * f64::EPSILON;
/// Default iteration cap of [`brentq`].
pub const BRENT_MAXITER: usize = 100;

/// Brent's method on a bracket `[xa, xb]` whose endpoints have function
/// values of opposite sign.
///
/// The iteration mirrors the classic inverse-quadratic/bisection hybrid step
/// for step, so piecewise-constant objectives land on the same abscissa as
/// other faithful implementations.
pub fn brentq<F>(mut f: F, xa: f64, xb: f64, xtol: f64, rtol: f64, maxiter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut xpre = xa;
    let mut xcur = xb;
    let (mut xblk, mut fblk) = (0.0, 0.0);
    let (mut spre, mut scur) = (0.0, 0.0);

    let mut fpre = f(xpre);
    let mut fcur = f(xcur);
    if fpre == 0.0 {
        return Ok(xpre);
    }
    if fcur == 0.0 {
        return Ok(xcur);
    }
    if fpre.is_sign_negative() == fcur.is_sign_negative() {
        return Err(QcError::domain(format!(
            "root not bracketed: f({xa}) = {fpre}, f({xb}) = {fcur}"
        )));
    }

    for _ in 0..maxiter {
        if fpre != 0.0 && fcur != 0.0 && fpre.is_sign_negative() != fcur.is_sign_negative() {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }

        let delta = (xtol + rtol * xcur.abs()) / 2.0;
        let sbis = (xblk - xcur) / 2.0;
        if fcur == 0.0 || sbis.abs() < delta {
            return Ok(xcur);
        }

        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        if scur.abs() > delta {
            xcur += scur;
        } else {
            xcur += if sbis > 0.0 { delta } else { -delta };
        }
        fcur = f(xcur);
    }
    Err(QcError::domain(format!(
        "Brent iteration did not converge in {maxiter} steps"
    )))
}

/// Smallest integer in `[lo, hi]` where a monotone predicate (false then
/// true) holds, or `None` if it fails at `hi`.
pub fn first_true<P>(lo: u64, hi: u64, mut pred: P) -> Option<u64>
where
    P: FnMut(u64) -> bool,
{
    if lo > hi || !pred(hi) {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Largest integer in `[lo, hi]` where a monotone predicate (true then
/// false) holds, or `None` if it fails at `lo`.
pub fn last_true<P>(lo: u64, hi: u64, mut pred: P) -> Option<u64>
where
    P: FnMut(u64) -> bool,
{
    if lo > hi || !pred(lo) {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Some(lo)
}

/// Bisection for the sign change of an increasing function on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn bisect_increasing<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
