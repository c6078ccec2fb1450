//! Independent reference implementations for the integration tests.
//!
//! Probabilities are computed with exact big-integer arithmetic and only
//! converted to `f64` for the final comparison. Nothing here calls into the
//! library's kernels.
#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn choose(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite ratio")
}

/// `P(X = k)`, X hypergeometric: `n` draws from `lot` items with `defects`.
pub fn hyper_pmf(lot: u64, defects: u64, n: u64, k: u64) -> BigRational {
    if k > n || k > defects || n - k > lot - defects {
        return BigRational::zero();
    }
    ratio(choose(defects, k) * choose(lot - defects, n - k), choose(lot, n))
}

/// Integer numerators of `P(X = k)` for `k = 0..=n` and their common
/// denominator `C(lot, n)`.
pub fn hyper_row(lot: u64, defects: u64, n: u64) -> (Vec<BigUint>, BigUint) {
    let nums = (0..=n)
        .map(|k| {
            if k > defects || n - k > lot - defects {
                BigUint::zero()
            } else {
                choose(defects, k) * choose(lot - defects, n - k)
            }
        })
        .collect();
    (nums, choose(lot, n))
}

/// `num / den` correctly rounded up to a couple of ulps.
pub fn quotient(num: &BigUint, den: &BigUint) -> f64 {
    num.to_f64().unwrap() / den.to_f64().unwrap()
}

pub fn hyper_cdf(lot: u64, defects: u64, n: u64, k: u64) -> BigRational {
    let num: BigUint = (0..=k.min(n))
        .map(|j| {
            if j > defects || n - j > lot - defects {
                BigUint::zero()
            } else {
                choose(defects, j) * choose(lot - defects, n - j)
            }
        })
        .sum();
    ratio(num, choose(lot, n))
}

/// `P(X = k)`, X binomial with rational rate `p`.
pub fn binom_pmf(n: u64, k: u64, p: &BigRational) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    let q = BigRational::one() - p;
    let c = BigRational::from_integer(BigInt::from(choose(n, k)));
    c * pow(p, k) * pow(&q, n - k)
}

pub fn binom_cdf(n: u64, k: u64, p: &BigRational) -> BigRational {
    (0..=k.min(n)).map(|j| binom_pmf(n, j, p)).fold(BigRational::zero(), |a, b| a + b)
}

fn pow(x: &BigRational, e: u64) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rounds like the library's rate-to-count rule, via exact decimal input.
pub fn count_of(rate_per_mille: u64, lot: u64) -> u64 {
    // rate = rate_per_mille / 1000; ties to even.
    let twice = 2 * rate_per_mille * lot;
    let (q, r) = (twice / 2000, twice % 2000);
    if r > 1000 || (r == 1000 && q % 2 == 1) {
        q + 1
    } else {
        q
    }
}

/// Exhaustive single-plan search with exact OC: the smallest `c` admitting
/// a plan, and the smallest `n` for it. Also returns the smallest `n` over
/// all feasible plans regardless of `c`.
pub fn brute_single(lot: u64, da: u64, dr: u64, alpha: &BigRational, beta_target: &BigRational) -> Option<((u64, u64), u64)> {
    let one = BigRational::one();
    let mut first: Option<(u64, u64)> = None;
    let mut min_n = u64::MAX;
    for c in 0..=lot {
        for n in c + 1..=lot {
            let pa = hyper_cdf(lot, da, n, c);
            let pr = hyper_cdf(lot, dr, n, c);
            if pa >= &one - alpha && &pr <= beta_target {
                if first.is_none() {
                    first = Some((n, c));
                }
                min_n = min_n.min(n);
                break;
            }
        }
    }
    first.map(|f| (f, min_n))
}

/// Exact acceptance probability of an equal-stage double plan with stage two
/// drawn independently from the full lot.
pub fn double_oc_independent(lot: u64, defects: u64, n1: u64, c1: u64, c2: u64) -> BigRational {
    let mut acc = hyper_cdf(lot, defects, n1, c1);
    for i in c1 + 1..=c2.min(n1) {
        acc += hyper_pmf(lot, defects, n1, i) * hyper_cdf(lot, defects, n1, c2 - i);
    }
    acc
}

/// Exact acceptance probability of a double plan by enumerating every
/// `(d1, d2)` outcome, stage two drawn from the remaining items.
pub fn double_oc_paths(lot: u64, defects: u64, n1: u64, n2: u64, c1: u64, c2: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for d1 in 0..=n1.min(defects) {
        let p1 = hyper_pmf(lot, defects, n1, d1);
        if p1.is_zero() {
            continue;
        }
        if d1 <= c1 {
            acc += p1;
            continue;
        }
        if d1 > c2 {
            continue;
        }
        for d2 in 0..=n2.min(defects - d1) {
            if d1 + d2 <= c2 {
                acc += &p1 * hyper_pmf(lot - n1, defects - d1, n2, d2);
            }
        }
    }
    acc
}

/// Exact expected sample number of a double plan. Stage two stops at the
/// first defect that pushes the total above `c2` when `curtailed`.
pub fn double_asn_paths(lot: u64, defects: u64, n1: u64, n2: u64, c1: u64, c2: u64, curtailed: bool) -> BigRational {
    let mut asn = BigRational::zero();
    for d1 in 0..=n1.min(defects) {
        let p1 = hyper_pmf(lot, defects, n1, d1);
        if p1.is_zero() {
            continue;
        }
        let base = BigRational::from_integer(BigInt::from(n1));
        if d1 <= c1 || d1 > c2 {
            asn += p1 * base;
            continue;
        }
        if !curtailed {
            asn += p1 * BigRational::from_integer(BigInt::from(n1 + n2));
            continue;
        }
        // Stage two: stop at the `need`-th defect among the remaining items.
        let (rest, bad) = (lot - n1, defects - d1);
        let need = c2 - d1 + 1;
        let mut stopped = BigRational::zero();
        let mut expected = BigRational::zero();
        for t in need..=n2 {
            // (need - 1) defects in the first t - 1 draws, then a defect.
            let before = hyper_pmf(rest, bad, t - 1, need - 1);
            if before.is_zero() || bad < need {
                continue;
            }
            let next = BigRational::new(BigInt::from(bad - (need - 1)), BigInt::from(rest - (t - 1)));
            let p = before * next;
            expected += &p * BigRational::from_integer(BigInt::from(t));
            stopped += p;
        }
        let full = (BigRational::one() - stopped) * BigRational::from_integer(BigInt::from(n2));
        asn += p1 * (base + expected + full);
    }
    asn
}

/// Log-likelihood ratio by direct summation of the per-item terms.
pub fn llr_direct(lot: u64, da: u64, dr: u64, m: u64, d: u64) -> f64 {
    if d > da {
        return f64::INFINITY;
    }
    if m - d > lot - dr {
        return f64::NEG_INFINITY;
    }
    let mut s = 0.0;
    for j in 0..d {
        s += ((dr - j) as f64 / (da - j) as f64).ln();
    }
    for j in 0..m - d {
        s += ((lot - dr - j) as f64 / (lot - da - j) as f64).ln();
    }
    s
}

/// Verdict of a truncated hypergeometric SPRT by direct evaluation:
/// `Some(true)` accept, `Some(false)` reject, `None` continue.
pub fn sprt_decision(
    lot: u64,
    da: u64,
    dr: u64,
    log_a: f64,
    log_b: f64,
    truncate_at: u64,
    c_t: u64,
    m: u64,
    d: u64,
) -> Option<bool> {
    if m == 0 {
        return None;
    }
    let l = llr_direct(lot, da, dr, m, d);
    if l >= log_a {
        return Some(false);
    }
    if l <= log_b {
        return Some(true);
    }
    if m == truncate_at {
        return Some(d <= c_t);
    }
    None
}
