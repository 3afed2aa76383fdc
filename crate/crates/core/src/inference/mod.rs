//! Estimators over observed decision counts: the competing false-positive
//! ratios, binomial confidence bounds, Beta-Binomial posteriors and the
//! two-proportion test.

mod fisher;
pub mod special;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

pub use fisher::{fisher_exact_two_sided, two_proportion_test, ProportionTest, ALPHA};

use crate::error::{Error, Result};
use crate::model::{DecisionCategory, ObservedCounts, SourceScenario};
use special::{inverse_reg_inc_beta, reg_inc_beta};

use DecisionCategory::*;
use SourceScenario::*;

/// Upper 95% bound attributed to PCAST for the MDPD estimate, as quoted.
/// Stored for reference only; its derivation is not reproduced.
pub const PCAST_QUOTED_UPPER: f64 = 0.054;
/// "1 in 18", the same PCAST figure expressed as odds.
pub const PCAST_QUOTED_ONE_IN: u32 = 18;
/// Wrong-finger MAP as printed in the published discussion (0.7%). The
/// counts give 35/4536, which rounds to 0.8%.
pub const PRINTED_WRONG_FINGER_MAP: f64 = 0.007;

/// Upper tail level for the 95% equal-tailed credible bound.
pub const UPPER_975: f64 = 0.975;

/// The four published recipes for a false-positive ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FprVariant {
    /// All erroneous IDs over source-absent decisions plus source-present
    /// erroneous IDs (42 / 1398).
    Mdpd,
    /// As `Mdpd` with source-absent inconclusives removed (42 / 995).
    MdpdExclInc,
    /// All erroneous IDs over all conclusive decisions (42 / 3687).
    Osac,
    /// All erroneous IDs over all decisions, inconclusives included (42 / 4536).
    Alternative,
}

impl FprVariant {
    pub const ALL: [FprVariant; 4] = [
        FprVariant::Mdpd,
        FprVariant::MdpdExclInc,
        FprVariant::Osac,
        FprVariant::Alternative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FprVariant::Mdpd => "mdpd",
            FprVariant::MdpdExclInc => "mdpdExclInc",
            FprVariant::Osac => "osac",
            FprVariant::Alternative => "alternative",
        }
    }
}

impl fmt::Display for FprVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FprVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FprVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Lookup(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CiMethod {
    Wald,
    ClopperPearson,
}

impl CiMethod {
    pub fn name(self) -> &'static str {
        match self {
            CiMethod::Wald => "wald",
            CiMethod::ClopperPearson => "clopperPearson",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RatioEstimate {
    pub variant: String,
    pub numerator: u64,
    pub denominator: u64,
    pub estimate: f64,
    pub ci_upper95: f64,
    pub method: String,
}

/// Numerator and denominator of a variant's ratio.
pub fn fpr_components(variant: FprVariant, counts: &ObservedCounts) -> (u64, u64) {
    let errors = counts.erroneous_ids();
    let mdpd_denominator =
        counts.decisions(SourceAbsent) + counts.scenario(SourcePresent).erroneous_ids();
    let denominator = match variant {
        FprVariant::Mdpd => mdpd_denominator,
        FprVariant::MdpdExclInc => mdpd_denominator - counts.get(SourceAbsent, Inconclusive),
        FprVariant::Osac => counts.total_decisions() - counts.category_total(Inconclusive),
        FprVariant::Alternative => counts.total_decisions(),
    };
    (errors, denominator)
}

/// Ratio estimate with a Wald 95% upper bound.
pub fn fpr_estimate(variant: FprVariant, counts: &ObservedCounts) -> Result<RatioEstimate> {
    fpr_estimate_with(variant, counts, CiMethod::Wald)
}

pub fn fpr_estimate_with(
    variant: FprVariant,
    counts: &ObservedCounts,
    method: CiMethod,
) -> Result<RatioEstimate> {
    let (numerator, denominator) = fpr_components(variant, counts);
    if denominator == 0 {
        return Err(Error::Arithmetic(format!("{variant} denominator is zero")));
    }
    Ok(RatioEstimate {
        variant: variant.name().to_owned(),
        numerator,
        denominator,
        estimate: numerator as f64 / denominator as f64,
        ci_upper95: binomial_ci_upper(numerator, denominator, method, 0.95)?,
        method: method.name().to_owned(),
    })
}

/// Two-sided standard normal quantile for a confidence level.
pub fn two_sided_z(confidence: f64) -> f64 {
    let standard = Normal::standard();
    standard.inverse_cdf(1.0 - (1.0 - confidence) / 2.0)
}

/// Upper end of a two-sided binomial confidence interval, clipped to [0, 1].
pub fn binomial_ci_upper(
    successes: u64,
    trials: u64,
    method: CiMethod,
    confidence: f64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Parameter(
            "confidence bound needs at least one trial".to_owned(),
        ));
    }
    if successes > trials {
        return Err(Error::Parameter(format!(
            "{successes} successes in {trials} trials"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Parameter(format!(
            "confidence {confidence} is not in (0, 1)"
        )));
    }
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let upper = match method {
        CiMethod::Wald => p_hat + two_sided_z(confidence) * (p_hat * (1.0 - p_hat) / n).sqrt(),
        CiMethod::ClopperPearson => {
            if successes == trials {
                1.0
            } else {
                let level = 1.0 - (1.0 - confidence) / 2.0;
                inverse_reg_inc_beta(successes as f64 + 1.0, (trials - successes) as f64, level)?
            }
        }
    };
    Ok(upper.clamp(0.0, 1.0))
}

/// Beta posterior of a binomial proportion under a flat Beta(1, 1) prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPosterior {
    pub alpha: f64,
    pub beta: f64,
    pub successes: u64,
    pub trials: u64,
}

pub fn beta_posterior(successes: u64, trials: u64) -> Result<BetaPosterior> {
    if successes > trials {
        return Err(Error::Parameter(format!(
            "{successes} successes in {trials} trials"
        )));
    }
    Ok(BetaPosterior {
        alpha: successes as f64 + 1.0,
        beta: (trials - successes) as f64 + 1.0,
        successes,
        trials,
    })
}

impl BetaPosterior {
    /// Posterior mode, `successes / trials`.
    pub fn map(&self) -> Result<f64> {
        if self.alpha + self.beta <= 2.0 {
            return Err(Error::Parameter(
                "flat posterior has no unique mode".to_owned(),
            ));
        }
        // same value as (alpha - 1) / (alpha + beta - 2), without rounding
        Ok(self.successes as f64 / self.trials as f64)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        reg_inc_beta(self.alpha, self.beta, x)
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Parameter(format!(
                "quantile level {q} is not in (0, 1)"
            )));
        }
        inverse_reg_inc_beta(self.alpha, self.beta, q)
    }
}

pub fn posterior_map(post: &BetaPosterior) -> Result<f64> {
    post.map()
}

pub fn posterior_quantile(post: &BetaPosterior, q: f64) -> Result<f64> {
    post.quantile(q)
}

/// MAP and upper 95% credible bound of one error rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BayesSummary {
    pub successes: u64,
    pub trials: u64,
    pub map: f64,
    pub upper975: f64,
}

impl BayesSummary {
    pub fn from_counts(successes: u64, trials: u64) -> Result<Self> {
        let post = beta_posterior(successes, trials)?;
        Ok(BayesSummary {
            successes,
            trials,
            map: post.map()?,
            upper975: post.quantile(UPPER_975)?,
        })
    }
}

/// Separate false-identification rates for source-present and source-absent
/// comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionOne {
    pub present: BayesSummary,
    pub absent: BayesSummary,
}

/// Separate rates for wrong-finger and wrong-person identifications, each
/// over all decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionTwo {
    pub wrong_finger: BayesSummary,
    pub wrong_person: BayesSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn solution_one_analysis(counts: &ObservedCounts) -> Result<SolutionOne> {
    let present = counts.scenario(SourcePresent);
    let absent = counts.scenario(SourceAbsent);
    Ok(SolutionOne {
        present: BayesSummary::from_counts(present.erroneous_ids(), present.total())?,
        absent: BayesSummary::from_counts(absent.erroneous_ids(), absent.total())?,
    })
}

pub fn solution_two_analysis(counts: &ObservedCounts) -> Result<SolutionTwo> {
    let trials = counts.total_decisions();
    let wrong_finger = BayesSummary::from_counts(counts.category_total(WrongFingerId), trials)?;
    let wrong_person = BayesSummary::from_counts(counts.category_total(WrongPersonId), trials)?;
    let note = (*counts == ObservedCounts::builtin()).then(|| {
        format!(
            "wrong-finger MAP {}/{} = {:.4} rounds to {:.1}%; the published figure is {:.1}%",
            wrong_finger.successes,
            wrong_finger.trials,
            wrong_finger.map,
            wrong_finger.map * 100.0,
            PRINTED_WRONG_FINGER_MAP * 100.0
        )
    });
    Ok(SolutionTwo {
        wrong_finger,
        wrong_person,
        note,
    })
}
