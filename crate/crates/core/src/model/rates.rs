//! Rate vectors over the six decision categories and their construction
//! from observed counts.
//!
//! Non-complement entries are held as exact ratios and rounded on a decimal
//! grid before the complement (correct identification or correct exclusion)
//! is taken, so the published rate rows come out bit-stable.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Index;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{DecisionCategory, ObservedCounts, SourceScenario};
use crate::error::{Error, Result};

use DecisionCategory::*;
use SourceScenario::*;

const SUM_TOLERANCE: f64 = 1e-9;

/// Names accepted by [`preset_rate_vectors`], in table order.
pub const PRESET_NAMES: [&str; 7] = [
    "observed",
    "mdpd",
    "mdpdCommon",
    "osac",
    "osacCommon",
    "alt",
    "altCommon",
];

/// True-negative rate printed for the MDPD row of the published rate table.
/// The complement rule gives 1 - (0.030 + 0.300) = 0.670; this constant is
/// kept only to document the discrepancy.
pub const PRINTED_MDPD_TNR: f64 = 0.667;

/// An exact probability held as a ratio of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate(Ratio<i128>);

impl Rate {
    pub fn new(numer: i128, denom: i128) -> Result<Rate> {
        if denom == 0 {
            return Err(Error::Arithmetic(format!("rate {numer}/0")));
        }
        let r = Ratio::new(numer, denom);
        if r.is_negative() || r > Ratio::one() {
            return Err(Error::Parameter(format!(
                "rate {numer}/{denom} is not in [0, 1]"
            )));
        }
        Ok(Rate(r))
    }

    pub fn from_counts(numer: u64, denom: u64) -> Result<Rate> {
        Rate::new(i128::from(numer), i128::from(denom))
    }

    /// Parses a plain decimal such as `0.030` exactly.
    pub fn from_decimal(text: &str) -> Result<Rate> {
        let bad = || Error::Parameter(format!("`{text}` is not a decimal probability"));
        let (int, frac) = text.trim().split_once('.').unwrap_or((text.trim(), ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let scale = 10i128.pow(frac.len() as u32);
        let int: i128 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_val: i128 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        Rate::new(int * scale + frac_val, scale)
    }

    pub fn zero() -> Rate {
        Rate(Ratio::zero())
    }

    pub fn one() -> Rate {
        Rate(Ratio::one())
    }

    /// Rounds half away from zero to `places` decimal places.
    pub fn round(self, places: u32) -> Rate {
        let scale = Ratio::from_integer(10i128.pow(places));
        Rate((self.0 * scale).round() / scale)
    }

    pub fn to_f64(self) -> f64 {
        // numerator and denominator stay far below 2^53 in practice
        let n = self.0.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.0.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    }

    pub fn ratio(self) -> Ratio<i128> {
        self.0
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Probability per decision category for one scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RateVector(pub [f64; DecisionCategory::COUNT]);

impl RateVector {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Checks bounds, unit sum and structural zeros. `key` names the vector
    /// in error messages.
    pub fn validate(&self, scenario: SourceScenario, key: &str) -> Result<()> {
        for c in DecisionCategory::ALL {
            let p = self[c];
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidRate(format!(
                    "{key}.{c} = {p} is not in [0, 1]"
                )));
            }
            if !scenario.allows(c) && p != 0.0 {
                return Err(Error::Structural(format!(
                    "{key}.{c} = {p}, must be 0 when the source is {scenario}"
                )));
            }
        }
        let sum = self.sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidRate(format!(
                "{key} sums to {sum}, expected 1"
            )));
        }
        Ok(())
    }
}

impl Index<DecisionCategory> for RateVector {
    type Output = f64;

    fn index(&self, c: DecisionCategory) -> &f64 {
        &self.0[c.index()]
    }
}

/// The pair of category distributions used by the simulator: one for
/// source-present comparisons and one for source-absent comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVectorPair {
    label: String,
    provenance: String,
    present: RateVector,
    absent: RateVector,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RateDocument {
    label: String,
    #[serde(rename = "rSP")]
    r_sp: BTreeMap<String, f64>,
    #[serde(rename = "rSA")]
    r_sa: BTreeMap<String, f64>,
    #[serde(default = "custom")]
    provenance: String,
}

fn custom() -> String {
    "custom".to_owned()
}

fn vector_from_map(map: &BTreeMap<String, f64>, key: &str) -> Result<RateVector> {
    let mut v = RateVector::default();
    for (name, p) in map {
        let c: DecisionCategory = name
            .parse()
            .map_err(|_| Error::Format(format!("{key}: unknown category `{name}`")))?;
        v.0[c.index()] = *p;
    }
    Ok(v)
}

impl RateVectorPair {
    pub fn new(
        label: impl Into<String>,
        provenance: impl Into<String>,
        present: RateVector,
        absent: RateVector,
    ) -> Result<Self> {
        present.validate(SourcePresent, "rSP")?;
        absent.validate(SourceAbsent, "rSA")?;
        Ok(RateVectorPair {
            label: label.into(),
            provenance: provenance.into(),
            present,
            absent,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn present(&self) -> &RateVector {
        &self.present
    }

    pub fn absent(&self) -> &RateVector {
        &self.absent
    }

    pub fn scenario(&self, s: SourceScenario) -> &RateVector {
        match s {
            SourcePresent => &self.present,
            SourceAbsent => &self.absent,
        }
    }

    /// Puts all mass of each scenario on one category.
    pub fn degenerate(present: DecisionCategory, absent: DecisionCategory) -> Result<Self> {
        let mut sp = RateVector::default();
        let mut sa = RateVector::default();
        sp.0[present.index()] = 1.0;
        sa.0[absent.index()] = 1.0;
        RateVectorPair::new(format!("all {present}/{absent}"), "custom", sp, sa)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: RateDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let present = vector_from_map(&doc.r_sp, "rSP")?;
        let absent = vector_from_map(&doc.r_sa, "rSA")?;
        RateVectorPair::new(doc.label, doc.provenance, present, absent)
    }

    pub fn to_json(&self) -> String {
        let map = |v: &RateVector| -> BTreeMap<String, f64> {
            DecisionCategory::ALL
                .into_iter()
                .map(|c| (c.name().to_owned(), v[c]))
                .collect()
        };
        let doc = RateDocument {
            label: self.label.clone(),
            r_sp: map(&self.present),
            r_sa: map(&self.absent),
            provenance: self.provenance.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("rates serialize")
    }
}

/// Where the inconclusive rates of a constructed pair come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InconclusiveSource {
    /// Each scenario's own frequency (446/3177 and 403/1359 for the
    /// published table).
    PerScenario,
    /// The pooled frequency (849/4536) in both scenarios.
    Common,
    /// Explicit values, e.g. the rounded figures printed in a rate table.
    Fixed { present: Rate, absent: Rate },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateBuildOptions {
    pub inconclusive: InconclusiveSource,
    /// A single false-positive rate. When set, all of it is assigned to
    /// wrong-person identifications in both scenarios and the wrong-finger
    /// category is left at 0.
    pub fpr_override: Option<Rate>,
    pub fnr: Rate,
    /// Decimal places for the non-complement entries; `None` keeps them
    /// exact.
    pub rounding: Option<u32>,
}

/// Builds a rate pair from observed counts.
///
/// The correct-identification and correct-exclusion rates are complements of
/// the other (rounded) entries in their scenario.
pub fn build_rate_vector_pair(
    counts: &ObservedCounts,
    options: &RateBuildOptions,
    label: impl Into<String>,
) -> Result<RateVectorPair> {
    let sp_total = counts.decisions(SourcePresent);
    let sa_total = counts.decisions(SourceAbsent);
    if sp_total == 0 || sa_total == 0 {
        return Err(Error::Arithmetic(
            "both scenarios need at least one decision".to_owned(),
        ));
    }
    let freq = |s: SourceScenario, c: DecisionCategory| {
        Rate::from_counts(counts.get(s, c), counts.decisions(s))
    };

    let (wrong_finger, wrong_person_sp, wrong_person_sa) = match options.fpr_override {
        Some(fpr) => (Rate::zero(), fpr, fpr),
        None => (
            freq(SourcePresent, WrongFingerId)?,
            freq(SourcePresent, WrongPersonId)?,
            freq(SourceAbsent, WrongPersonId)?,
        ),
    };
    let (inc_sp, inc_sa) = match options.inconclusive {
        InconclusiveSource::PerScenario => (
            freq(SourcePresent, Inconclusive)?,
            freq(SourceAbsent, Inconclusive)?,
        ),
        InconclusiveSource::Common => {
            let pooled = Rate::from_counts(
                counts.category_total(Inconclusive),
                counts.total_decisions(),
            )?;
            (pooled, pooled)
        }
        InconclusiveSource::Fixed { present, absent } => (present, absent),
    };

    let round = |r: Rate| match options.rounding {
        Some(places) => r.round(places),
        None => r,
    };

    let mut sp = [Rate::zero(); DecisionCategory::COUNT];
    sp[WrongFingerId.index()] = round(wrong_finger);
    sp[WrongPersonId.index()] = round(wrong_person_sp);
    sp[Inconclusive.index()] = round(inc_sp);
    sp[ErroneousExclusion.index()] = round(options.fnr);
    sp[CorrectId.index()] = complement(&sp, "rSP.correctId")?;

    let mut sa = [Rate::zero(); DecisionCategory::COUNT];
    sa[WrongPersonId.index()] = round(wrong_person_sa);
    sa[Inconclusive.index()] = round(inc_sa);
    sa[CorrectExclusion.index()] = complement(&sa, "rSA.correctExclusion")?;

    let to_vector = |v: [Rate; 6]| RateVector(v.map(Rate::to_f64));
    RateVectorPair::new(label, "custom", to_vector(sp), to_vector(sa))
}

fn complement(entries: &[Rate], key: &str) -> Result<Rate> {
    let rest: Ratio<i128> = entries.iter().map(|r| r.0).sum();
    let c = Ratio::one() - rest;
    if c.is_negative() {
        return Err(Error::InvalidRate(format!(
            "{key} would be {:.6}: the other rates sum past 1",
            c.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(Rate(c))
}

fn dec(text: &str) -> Rate {
    Rate::from_decimal(text).expect("literal rate")
}

/// Returns one of the seven published rate rows.
///
/// Per-scenario inconclusive rates are the printed 0.140 / 0.300; the pooled
/// rate is derived from the counts at three decimals (0.187). Complements are
/// recomputed so every vector sums to one.
pub fn preset_rate_vectors(name: &str) -> Result<RateVectorPair> {
    let table = ObservedCounts::builtin();
    let printed_inc = InconclusiveSource::Fixed {
        present: dec("0.140"),
        absent: dec("0.300"),
    };
    let (label, inconclusive, fpr, fnr) = match name {
        "observed" => ("Observed frequencies", printed_inc, None, dec("0.074")),
        "mdpd" => ("Miami-Dade", printed_inc, Some("0.030"), dec("0.075")),
        "mdpdCommon" => (
            "Miami-Dade (common inc.)",
            InconclusiveSource::Common,
            Some("0.030"),
            dec("0.075"),
        ),
        "osac" => ("OSAC FRS", printed_inc, Some("0.011"), dec("0.075")),
        "osacCommon" => (
            "OSAC FRS (common inc.)",
            InconclusiveSource::Common,
            Some("0.011"),
            dec("0.075"),
        ),
        "alt" => (
            "OSAC FRS alternative",
            printed_inc,
            Some("0.009"),
            dec("0.075"),
        ),
        "altCommon" => (
            "OSAC FRS alternative (common inc.)",
            InconclusiveSource::Common,
            Some("0.009"),
            dec("0.075"),
        ),
        other => return Err(Error::Lookup(other.to_owned())),
    };
    let options = RateBuildOptions {
        inconclusive,
        fpr_override: fpr.map(dec),
        fnr,
        rounding: Some(3),
    };
    let mut pair = build_rate_vector_pair(&table, &options, label)?;
    pair.provenance = name.to_owned();
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_vec(actual: &RateVector, expected: [f64; 6]) {
        for (a, e) in actual.0.iter().zip(expected) {
            assert!((a - e).abs() < 1e-12, "{:?} vs {:?}", actual.0, expected);
        }
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(dec("0.030"), Rate::new(3, 100).unwrap());
        assert_eq!(dec("1"), Rate::one());
        assert_eq!(dec(".5"), Rate::new(1, 2).unwrap());
        assert!(Rate::from_decimal("1.5").is_err());
        assert!(Rate::from_decimal("-0.1").is_err());
        assert!(Rate::from_decimal("abc").is_err());
        assert!(Rate::from_decimal(".").is_err());
    }

    #[test]
    fn rounding_half_away_from_zero() {
        assert_eq!(Rate::new(1405, 10000).unwrap().round(3), dec("0.141"));
        assert_eq!(Rate::from_counts(235, 3177).unwrap().round(3), dec("0.074"));
        assert_eq!(Rate::from_counts(849, 4536).unwrap().round(3), dec("0.187"));
        assert_eq!(Rate::from_counts(403, 1359).unwrap().round(3), dec("0.297"));
    }

    #[test]
    fn observed_counts_at_three_decimals() {
        // 403/1359 rounds to 0.297, so the source-absent row differs from the
        // printed 0.300 / 0.698.
        let opts = RateBuildOptions {
            inconclusive: InconclusiveSource::PerScenario,
            fpr_override: None,
            fnr: Rate::from_counts(235, 3177).unwrap(),
            rounding: Some(3),
        };
        let pair = build_rate_vector_pair(&ObservedCounts::builtin(), &opts, "obs").unwrap();
        assert_vec(pair.present(), [0.774, 0.011, 0.001, 0.140, 0.0, 0.074]);
        assert_vec(pair.absent(), [0.0, 0.0, 0.002, 0.297, 0.701, 0.0]);
    }

    #[test]
    fn observed_with_printed_inconclusives_matches_table_row() {
        let pair = preset_rate_vectors("observed").unwrap();
        assert_vec(pair.present(), [0.774, 0.011, 0.001, 0.140, 0.0, 0.074]);
        assert_vec(pair.absent(), [0.0, 0.0, 0.002, 0.300, 0.698, 0.0]);
    }

    #[test]
    fn unrounded_observed_reproduces_raw_frequencies() {
        let opts = RateBuildOptions {
            inconclusive: InconclusiveSource::PerScenario,
            fpr_override: None,
            fnr: Rate::from_counts(235, 3177).unwrap(),
            rounding: None,
        };
        let pair = build_rate_vector_pair(&ObservedCounts::builtin(), &opts, "raw").unwrap();
        assert!((pair.absent()[CorrectExclusion] - 953.0 / 1359.0).abs() < 1e-15);
        assert!((pair.present()[CorrectId] - 2457.0 / 3177.0).abs() < 1e-15);
    }

    #[test]
    fn mdpd_override_complements() {
        let opts = RateBuildOptions {
            inconclusive: InconclusiveSource::Fixed {
                present: dec("0.140"),
                absent: dec("0.300"),
            },
            fpr_override: Some(dec("0.030")),
            fnr: dec("0.075"),
            rounding: Some(3),
        };
        let pair = build_rate_vector_pair(&ObservedCounts::builtin(), &opts, "mdpd").unwrap();
        assert_eq!(pair.present()[CorrectId], 0.755);
        assert_eq!(pair.absent()[CorrectExclusion], 0.670);
        assert_ne!(pair.absent()[CorrectExclusion], PRINTED_MDPD_TNR);
        assert_eq!(pair.present()[WrongFingerId], 0.0);
    }

    #[test]
    fn osac_common_complements() {
        let opts = RateBuildOptions {
            inconclusive: InconclusiveSource::Common,
            fpr_override: Some(dec("0.011")),
            fnr: dec("0.075"),
            rounding: Some(3),
        };
        let pair = build_rate_vector_pair(&ObservedCounts::builtin(), &opts, "osac").unwrap();
        assert_eq!(pair.present()[CorrectId], 0.727);
        assert_eq!(pair.absent()[CorrectExclusion], 0.802);
    }

    #[test]
    fn all_mass_on_correct_outcomes() {
        let opts = RateBuildOptions {
            inconclusive: InconclusiveSource::Fixed {
                present: Rate::zero(),
                absent: Rate::zero(),
            },
            fpr_override: Some(Rate::zero()),
            fnr: Rate::zero(),
            rounding: Some(3),
        };
        let pair = build_rate_vector_pair(&ObservedCounts::builtin(), &opts, "ideal").unwrap();
        assert_eq!(pair.present()[CorrectId], 1.0);
        assert_eq!(pair.absent()[CorrectExclusion], 1.0);
    }

    #[test]
    fn negative_complement_rejected() {
        let opts = RateBuildOptions {
            inconclusive: InconclusiveSource::Fixed {
                present: dec("0.6"),
                absent: dec("0.3"),
            },
            fpr_override: Some(dec("0.2")),
            fnr: dec("0.3"),
            rounding: Some(3),
        };
        let err = build_rate_vector_pair(&ObservedCounts::builtin(), &opts, "bad").unwrap_err();
        assert!(matches!(err, Error::InvalidRate(_)));
        assert!(err.to_string().contains("rSP.correctId"));
    }

    #[test]
    fn preset_rows() {
        let alt = preset_rate_vectors("alt").unwrap();
        assert_eq!(alt.present()[WrongPersonId], 0.009);
        assert_eq!(alt.present()[ErroneousExclusion], 0.075);
        assert_eq!(alt.present()[Inconclusive], 0.140);
        assert_eq!(alt.absent()[Inconclusive], 0.300);
        assert_eq!(alt.present()[CorrectId], 0.776);
        assert_eq!(alt.absent()[CorrectExclusion], 0.691);

        let common = preset_rate_vectors("mdpdCommon").unwrap();
        assert_eq!(common.present()[Inconclusive], 0.187);
        assert_eq!(common.absent()[Inconclusive], 0.187);
        assert_eq!(common.present()[CorrectId], 0.708);
        assert_eq!(common.absent()[CorrectExclusion], 0.783);

        let expected_tnr = [
            ("osac", 0.689),
            ("osacCommon", 0.802),
            ("altCommon", 0.804),
            ("mdpd", 0.670),
        ];
        for (name, tnr) in expected_tnr {
            let p = preset_rate_vectors(name).unwrap();
            assert_eq!(p.absent()[CorrectExclusion], tnr, "{name}");
            assert_eq!(p.provenance(), name);
        }

        let obs = preset_rate_vectors("observed").unwrap();
        assert_eq!(obs.present()[WrongFingerId], 0.011);
        assert_eq!(obs.present()[WrongPersonId], 0.001);
        assert_eq!(obs.absent()[WrongPersonId], 0.002);
    }

    #[test]
    fn every_preset_sums_to_one_with_structural_zeros() {
        for name in PRESET_NAMES {
            let p = preset_rate_vectors(name).unwrap();
            assert!((p.present().sum() - 1.0).abs() < 1e-12, "{name}");
            assert!((p.absent().sum() - 1.0).abs() < 1e-12, "{name}");
            p.present().validate(SourcePresent, "rSP").unwrap();
            p.absent().validate(SourceAbsent, "rSA").unwrap();
        }
    }

    #[test]
    fn unknown_preset() {
        assert_eq!(
            preset_rate_vectors("pcast").unwrap_err(),
            Error::Lookup("pcast".into())
        );
    }

    #[test]
    fn json_round_trip_and_validation() {
        let p = preset_rate_vectors("osacCommon").unwrap();
        let back = RateVectorPair::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);

        let bad = r#"{"label": "x", "rSP": {"correctId": 0.8, "inconclusive": 0.25},
                      "rSA": {"correctExclusion": 1.0}}"#;
        let err = RateVectorPair::from_json(bad).unwrap_err();
        assert!(err.to_string().contains("rSP"), "{err}");

        let structural = r#"{"label": "x", "rSP": {"correctId": 1.0},
                             "rSA": {"correctId": 0.1, "correctExclusion": 0.9}}"#;
        let err = RateVectorPair::from_json(structural).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
        assert!(err.to_string().contains("rSA.correctId"));
    }
}
