use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Significance level used for the `significant` flag.
pub const ALPHA: f64 = 0.05;

/// Relative slack when comparing table probabilities against the observed
/// one, so tables that tie in exact arithmetic are not lost to rounding.
const TIE_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProportionTest {
    pub x1: u64,
    pub n1: u64,
    pub x2: u64,
    pub n2: u64,
    pub p_value: f64,
    pub significant: bool,
}

/// Two-sided Fisher exact p-value for the 2x2 table `[[a, b], [c, d]]`.
///
/// Probabilities of all tables with the observed margins are built by the
/// hypergeometric ratio recurrence from the most likely table and normalized
/// by their sum; the p-value sums those no more likely than the observed one.
pub fn fisher_exact_two_sided(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let row1 = a + b;
    let row2 = c + d;
    let col1 = a + c;
    let lo = col1.saturating_sub(row2);
    let hi = col1.min(row1);
    if lo == hi {
        return 1.0;
    }
    // w(x+1) / w(x) for the top-left cell x
    let ratio = |x: u64| -> f64 {
        ((row1 - x) as f64 * (col1 - x) as f64) / ((x + 1) as f64 * (row2 + x + 1 - col1) as f64)
    };
    let mode = {
        let m = ((row1 + 1) as f64 * (col1 + 1) as f64 / (row1 + row2 + 2) as f64).floor() as u64;
        m.clamp(lo, hi)
    };
    let len = (hi - lo + 1) as usize;
    let mut weights = vec![0.0; len];
    weights[(mode - lo) as usize] = 1.0;
    for x in mode..hi {
        let i = (x - lo) as usize;
        weights[i + 1] = weights[i] * ratio(x);
    }
    for x in (lo..mode).rev() {
        let i = (x - lo) as usize;
        weights[i] = weights[i + 1] / ratio(x);
    }
    let total: f64 = weights.iter().sum();
    let observed = weights[(a - lo) as usize];
    let tail: f64 = weights
        .iter()
        .filter(|w| **w <= observed * (1.0 + TIE_SLACK))
        .sum();
    (tail / total).clamp(0.0, 1.0)
}

/// Compares the proportions `x1/n1` and `x2/n2` with Fisher's exact test.
pub fn two_proportion_test(x1: u64, n1: u64, x2: u64, n2: u64) -> Result<ProportionTest> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Parameter(
            "both groups need at least one trial".to_owned(),
        ));
    }
    if x1 > n1 || x2 > n2 {
        return Err(Error::Parameter(format!(
            "successes exceed trials in {x1}/{n1} or {x2}/{n2}"
        )));
    }
    let p_value = fisher_exact_two_sided(x1, n1 - x1, x2, n2 - x2);
    Ok(ProportionTest {
        x1,
        n1,
        x2,
        n2,
        p_value,
        significant: p_value < ALPHA,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_proportions() {
        let t = two_proportion_test(5, 100, 5, 100).unwrap();
        assert!((t.p_value - 1.0).abs() < 1e-12);
        assert!(!t.significant);
    }

    #[test]
    fn classic_tea_tasting() {
        // [[3, 1], [1, 3]]: two-sided p = 34/70
        let p = fisher_exact_two_sided(3, 1, 1, 3);
        assert!((p - 34.0 / 70.0).abs() < 1e-12);
    }

    #[test]
    fn strongly_different_proportions() {
        let t = two_proportion_test(18, 20, 2, 20).unwrap();
        assert!(t.significant);
        assert!(t.p_value < 1e-5);
    }

    #[test]
    fn degenerate_margins() {
        assert_eq!(fisher_exact_two_sided(0, 10, 0, 10), 1.0);
        assert_eq!(fisher_exact_two_sided(10, 0, 10, 0), 1.0);
    }

    #[test]
    fn invalid_input() {
        assert!(two_proportion_test(5, 4, 1, 3).is_err());
        assert!(two_proportion_test(0, 0, 1, 3).is_err());
    }
}
