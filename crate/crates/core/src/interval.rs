//! Exact intervals for a lot's defect rate and the inverse problem of
//! choosing a sample size for a target interval width.

use serde::{Deserialize, Serialize};

use crate::dist::{PopulationModel, SampleDist};
use crate::error::{QcError, Result};
use crate::roots;
use crate::util::round_half_even;

/// Two-sided exact interval with equal tail risks `alpha / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionInterval {
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
    pub point_estimate: f64,
    /// Integer defect-count bounds; only set for finite lots.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lower_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub upper_count: Option<u64>,
}

impl ProportionInterval {
    pub fn half_width(&self) -> f64 {
        (self.upper - self.lower) / 2.0
    }

    pub fn contains(&self, rate: f64) -> bool {
        self.lower <= rate && rate <= self.upper
    }
}

/// Sample-size search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSizeMethod {
    /// Brent's method on the width criterion, with the continuous argument
    /// rounded to the nearest sample size. The result is the adequate
    /// neighbour of the jump Brent converges to; it is not guaranteed to be
    /// the globally smallest adequate size.
    #[default]
    Brent,
    /// Smallest `n` such that the criterion holds at `n` and at the five
    /// sizes after it.
    Conservative,
}

/// Width of the jitter window checked by [`SampleSizeMethod::Conservative`].
pub const CONSERVATIVE_WINDOW: u64 = 5;

const BINOMIAL_SEARCH_CAP: u64 = 1 << 26;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(QcError::domain(format!("alpha = {alpha} is not in (0, 1)")))
    }
}

fn check_rate(rate: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&rate) {
        Ok(())
    } else {
        Err(QcError::domain(format!("{what} = {rate} is not in [0, 1]")))
    }
}

fn check_sample(model: &PopulationModel, n: u64) -> Result<()> {
    if n == 0 {
        return Err(QcError::domain("sample size must be at least 1"));
    }
    if let Some(lot) = model.lot_size() {
        if n > lot {
            return Err(QcError::domain(format!("sample size {n} exceeds lot size {lot}")));
        }
    }
    Ok(())
}

/// Exact interval for the defect rate after observing `k` defects in `n`
/// inspected items.
///
/// For a finite lot the bounds are the smallest count `D` with
/// `P(X >= k; D) > alpha/2` and the largest with `P(X <= k; D) > alpha/2`.
/// With replacement the bounds are the roots of the same tail equations in
/// the rate.
pub fn exact_interval(model: &PopulationModel, n: u64, k: u64, alpha: f64) -> Result<ProportionInterval> {
    check_alpha(alpha)?;
    check_sample(model, n)?;
    if k > n {
        return Err(QcError::domain(format!("observed count {k} exceeds sample size {n}")));
    }
    let half = alpha / 2.0;
    let point_estimate = k as f64 / n as f64;
    let confidence = 1.0 - alpha;

    match *model {
        PopulationModel::WithoutReplacement { lot_size } => {
            // Feasible counts are those that can produce k defects in n draws.
            let (lo, hi) = (k, lot_size - (n - k));
            let dist = |d: u64| SampleDist::Hypergeometric { lot: lot_size, defects: d, n };
            let lower_count = roots::first_true(lo, hi, |d| dist(d).sf(k as i64) > half)
                .expect("tail at the largest feasible count is one");
            let upper_count = roots::last_true(lo, hi, |d| dist(d).cdf(k as i64) > half)
                .expect("cdf at the smallest feasible count is one");
            let lot = lot_size as f64;
            Ok(ProportionInterval {
                lower: lower_count as f64 / lot,
                upper: upper_count as f64 / lot,
                confidence,
                point_estimate,
                lower_count: Some(lower_count),
                upper_count: Some(upper_count),
            })
        }
        PopulationModel::WithReplacement => {
            let dist = |p: f64| SampleDist::Binomial { n, p };
            let lower = if k == 0 {
                0.0
            } else {
                roots::bisect_increasing(|p| dist(p).sf(k as i64) - half, 0.0, 1.0, 1e-12)
            };
            let upper = if k == n {
                1.0
            } else {
                roots::bisect_increasing(|p| half - dist(p).cdf(k as i64), 0.0, 1.0, 1e-12)
            };
            Ok(ProportionInterval {
                lower: lower.min(point_estimate),
                upper: upper.max(point_estimate),
                confidence,
                point_estimate,
                lower_count: None,
                upper_count: None,
            })
        }
    }
}

/// Sampling error of the observed rate: half the width of the central
/// `1 - alpha` range of `X / n` when the true rate is `assumed_rate`.
///
/// This is the quantity plotted as "margin of error" against sample size;
/// it is zero once the whole lot is inspected.
pub fn margin_of_error(model: &PopulationModel, n: u64, assumed_rate: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_rate(assumed_rate, "assumed rate")?;
    check_sample(model, n)?;
    let hyp = model.hypothesis_from_rate(assumed_rate)?;
    let dist = model.sample(hyp, n)?;
    let lo = dist.quantile(alpha / 2.0);
    let hi = dist.quantile(1.0 - alpha / 2.0);
    Ok((hi - lo) as f64 / (2.0 * n as f64))
}

/// Half-width of [`exact_interval`] at the hypothetical observation
/// `k = round(assumed_rate * n)`.
pub fn interval_half_width(model: &PopulationModel, n: u64, assumed_rate: f64, alpha: f64) -> Result<f64> {
    check_rate(assumed_rate, "assumed rate")?;
    let k = round_half_even(assumed_rate * n as f64) as u64;
    Ok(exact_interval(model, n, k.min(n), alpha)?.half_width())
}

/// The planning criterion `P(X >= k; theta_l) + P(X <= k; theta_u)` at
/// sample size `n`, where `k = round(assumed_rate * n)` and the bounds sit
/// `half_width` either side of the assumed rate. A sample size is adequate
/// once this drops to `alpha`.
#[derive(Debug, Clone, Copy)]
pub struct WidthCriterion {
    model: PopulationModel,
    assumed_rate: f64,
    lower: f64,
    upper: f64,
}

impl WidthCriterion {
    pub fn new(model: &PopulationModel, assumed_rate: f64, half_width: f64) -> Result<Self> {
        check_rate(assumed_rate, "assumed rate")?;
        if !(half_width > 0.0 && half_width < 1.0) {
            return Err(QcError::domain(format!("half-width {half_width} is not in (0, 1)")));
        }
        if assumed_rate <= 0.0 || assumed_rate >= 1.0 {
            return Err(QcError::domain(format!(
                "assumed rate {assumed_rate} must lie strictly inside (0, 1)"
            )));
        }
        Ok(WidthCriterion {
            model: *model,
            assumed_rate,
            lower: (assumed_rate - half_width).max(0.0),
            upper: (assumed_rate + half_width).min(1.0),
        })
    }

    pub fn eval(&self, n: u64) -> f64 {
        let k = round_half_even(self.assumed_rate * n as f64) as i64;
        let (lo, hi) = match self.model {
            PopulationModel::WithoutReplacement { lot_size } => {
                let count = |r: f64| round_half_even(r * lot_size as f64) as u64;
                (
                    SampleDist::Hypergeometric { lot: lot_size, defects: count(self.lower), n },
                    SampleDist::Hypergeometric { lot: lot_size, defects: count(self.upper), n },
                )
            }
            PopulationModel::WithReplacement => (
                SampleDist::Binomial { n, p: self.lower },
                SampleDist::Binomial { n, p: self.upper },
            ),
        };
        lo.sf(k) + hi.cdf(k)
    }
}

/// Smallest adequate sample size using [`SampleSizeMethod::Brent`].
pub fn required_sample_size(model: &PopulationModel, assumed_rate: f64, half_width: f64, alpha: f64) -> Result<u64> {
    required_sample_size_with(model, assumed_rate, half_width, alpha, SampleSizeMethod::Brent)
}

/// Sample size for an exact interval of the given half-width. A finite lot
/// always admits full inspection, so the result never exceeds the lot size.
pub fn required_sample_size_with(
    model: &PopulationModel,
    assumed_rate: f64,
    half_width: f64,
    alpha: f64,
    method: SampleSizeMethod,
) -> Result<u64> {
    check_alpha(alpha)?;
    let crit = WidthCriterion::new(model, assumed_rate, half_width)?;
    let ok = |n: u64| crit.eval(n) <= alpha;

    let top = match model.lot_size() {
        // Rounding the bounds to counts can make the width unattainable;
        // the whole lot is then the answer.
        Some(lot) if !ok(lot) => return Ok(lot),
        Some(lot) => lot,
        None => {
            let mut hi = 2u64;
            while !ok(hi) {
                if hi >= BINOMIAL_SEARCH_CAP {
                    return Err(QcError::InfeasibleWidth { half_width, searched_up_to: hi });
                }
                hi *= 2;
            }
            hi
        }
    };
    if ok(1) {
        return Ok(1);
    }

    match method {
        SampleSizeMethod::Brent => {
            let g = |x: f64| {
                let n = (round_half_even(x) as u64).clamp(1, top);
                crit.eval(n) - alpha
            };
            let x = roots::brentq(g, 1.0, top as f64, roots::BRENT_XTOL, roots::BRENT_RTOL, roots::BRENT_MAXITER)?;
            // The root sits at a jump of the step function, midway between
            // two integers; take the one on the adequate side.
            let n = (round_half_even(x) as u64).clamp(1, top);
            Ok(if ok(n) { n } else { (n + 1).min(top) })
        }
        SampleSizeMethod::Conservative => {
            let stable = |n: u64| (n..=(n + CONSERVATIVE_WINDOW).min(top)).all(ok);
            // Bisection locates the trend crossing; a backward margin and a
            // forward scan absorb the jitter around it.
            let rough = roots::first_true(1, top, ok).unwrap_or(top);
            let mut n = rough.saturating_sub(8 * CONSERVATIVE_WINDOW).max(1);
            while n < top && !stable(n) {
                n += 1;
            }
            Ok(n)
        }
    }
}
