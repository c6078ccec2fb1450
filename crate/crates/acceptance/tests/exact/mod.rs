//! Independent evaluators in log-factorial floating point. They share only
//! the plan definitions with the library, never its kernels or DP.

use qcsample_core::plan::{DoublePlan, Verdict};
use qcsample_core::DecisionTable;

pub struct LnFact(Vec<f64>);

impl LnFact {
    pub fn new(max: u64) -> Self {
        let mut t = Vec::with_capacity(max as usize + 1);
        t.push(0.0);
        for i in 1..=max {
            t.push(t[i as usize - 1] + (i as f64).ln());
        }
        LnFact(t)
    }

    pub fn ln_choose(&self, n: u64, k: u64) -> f64 {
        self.0[n as usize] - self.0[k as usize] - self.0[(n - k) as usize]
    }
}

/// Law of the defect count in a sample.
#[derive(Debug, Clone, Copy)]
pub enum Law {
    Hyper { lot: u64, defects: u64 },
    Binom { p: f64 },
}

impl Law {
    pub fn pmf(&self, lf: &LnFact, n: u64, k: u64) -> f64 {
        if k > n {
            return 0.0;
        }
        match *self {
            Law::Hyper { lot, defects } => {
                if k > defects || n - k > lot - defects || n > lot {
                    return 0.0;
                }
                (lf.ln_choose(defects, k) + lf.ln_choose(lot - defects, n - k) - lf.ln_choose(lot, n)).exp()
            }
            Law::Binom { p } => {
                if p == 0.0 {
                    return f64::from(u8::from(k == 0));
                }
                if p == 1.0 {
                    return f64::from(u8::from(k == n));
                }
                (lf.ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
            }
        }
    }

    pub fn cdf(&self, lf: &LnFact, n: u64, k: u64) -> f64 {
        (0..=k.min(n)).map(|j| self.pmf(lf, n, j)).sum::<f64>().min(1.0)
    }

    /// Chance that item `m + 1` is defective after `d` defects in `m` items.
    fn next_defect(&self, m: u64, d: u64) -> f64 {
        match *self {
            Law::Hyper { lot, defects } => {
                if m >= lot || d > defects {
                    0.0
                } else {
                    (defects - d) as f64 / (lot - m) as f64
                }
            }
            Law::Binom { p } => p,
        }
    }

    /// Law of a second sample drawn after `n1` items with `d1` defects left
    /// the lot.
    fn after(&self, n1: u64, d1: u64) -> Law {
        match *self {
            Law::Hyper { lot, defects } => Law::Hyper { lot: lot - n1, defects: defects - d1 },
            law => law,
        }
    }
}

pub fn single_oc(lf: &LnFact, law: Law, n: u64, c: u64) -> f64 {
    law.cdf(lf, n, c)
}

/// Exact acceptance probability, stage two drawn from the remaining items.
pub fn double_oc(lf: &LnFact, law: Law, p: &DoublePlan) -> f64 {
    let mut oc = law.cdf(lf, p.n1, p.c1);
    for d1 in p.c1 + 1..=p.c2.min(p.n1) {
        let w = law.pmf(lf, p.n1, d1);
        if w > 0.0 {
            oc += w * law.after(p.n1, d1).cdf(lf, p.n2, p.c2 - d1);
        }
    }
    oc
}

/// Acceptance probability and average sample number of any decision table
/// by forward propagation of the `(m, d)` path distribution.
pub fn table_oc_asn(table: &DecisionTable, law: Law) -> (f64, f64) {
    let mut mass = vec![1.0f64];
    let (mut oc, mut asn) = (0.0, 0.0);
    for m in 1..=table.horizon() {
        let mut next = vec![0.0; mass.len() + 1];
        for (d, &w) in mass.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let q = law.next_defect(m - 1, d as u64);
            next[d + 1] += w * q;
            next[d] += w * (1.0 - q);
        }
        for (d, w) in next.iter_mut().enumerate() {
            match table.decide(m, d as u64) {
                Verdict::Accept => {
                    oc += *w;
                    asn += m as f64 * *w;
                    *w = 0.0;
                }
                Verdict::Reject => {
                    asn += m as f64 * *w;
                    *w = 0.0;
                }
                Verdict::Continue => {}
            }
        }
        while next.len() > 1 && *next.last().unwrap() == 0.0 {
            next.pop();
        }
        mass = next;
    }
    let open: f64 = mass.iter().sum();
    assert!(open < 1e-12, "table leaves {open} undecided at its horizon");
    (oc, asn)
}

/// Half the central `1 - alpha` range of `X / n`.
pub fn sampling_range(lf: &LnFact, law: Law, n: u64, alpha: f64) -> f64 {
    let quantile = |u: f64| {
        let mut acc = 0.0;
        for k in 0..=n {
            acc += law.pmf(lf, n, k);
            if acc >= u {
                return k;
            }
        }
        n
    };
    (quantile(1.0 - alpha / 2.0) - quantile(alpha / 2.0)) as f64 / (2.0 * n as f64)
}
