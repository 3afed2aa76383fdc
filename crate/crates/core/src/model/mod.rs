//! Domain vocabulary for the latent-print study: decision categories, the
//! source-presence scenarios, rate vectors, study design and count tables.

mod counts;
mod design;
mod rates;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use counts::{CategoryCounts, DecisionCountTable, ObservedCounts, PhaseTotals};
pub use design::StudyDesign;
pub use rates::{
    build_rate_vector_pair, preset_rate_vectors, InconclusiveSource, Rate, RateBuildOptions,
    RateVector, RateVectorPair, PRESET_NAMES, PRINTED_MDPD_TNR,
};

/// Outcome of one comparison of a latent print that was deemed of value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DecisionCategory {
    /// (a) identification to the true donor and finger.
    CorrectId,
    /// (b) identification to the true donor, wrong finger.
    WrongFingerId,
    /// (c) identification to a person who is not the donor.
    WrongPersonId,
    /// (d) neither identification nor exclusion.
    Inconclusive,
    /// (e) all three candidate donors excluded, and none of them is the donor.
    CorrectExclusion,
    /// (f) the true donor was among the candidates but was excluded.
    ErroneousExclusion,
}

impl DecisionCategory {
    pub const COUNT: usize = 6;

    pub const ALL: [DecisionCategory; 6] = [
        DecisionCategory::CorrectId,
        DecisionCategory::WrongFingerId,
        DecisionCategory::WrongPersonId,
        DecisionCategory::Inconclusive,
        DecisionCategory::CorrectExclusion,
        DecisionCategory::ErroneousExclusion,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    /// Name used in JSON documents and on the command line.
    pub const fn name(self) -> &'static str {
        match self {
            DecisionCategory::CorrectId => "correctId",
            DecisionCategory::WrongFingerId => "wrongFingerId",
            DecisionCategory::WrongPersonId => "wrongPersonId",
            DecisionCategory::Inconclusive => "inconclusive",
            DecisionCategory::CorrectExclusion => "correctExclusion",
            DecisionCategory::ErroneousExclusion => "erroneousExclusion",
        }
    }

    /// Letter of the category in the six-way taxonomy, `a` through `f`.
    pub const fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    /// True for the two kinds of erroneous identification.
    pub const fn is_erroneous_id(self) -> bool {
        matches!(
            self,
            DecisionCategory::WrongFingerId | DecisionCategory::WrongPersonId
        )
    }
}

impl fmt::Display for DecisionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecisionCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DecisionCategory::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown decision category `{s}`")))
    }
}

/// Whether control prints of the latent's true donor were among the
/// candidate sets shown to the examiner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SourceScenario {
    #[serde(rename = "present")]
    SourcePresent,
    #[serde(rename = "absent")]
    SourceAbsent,
}

impl SourceScenario {
    pub const ALL: [SourceScenario; 2] =
        [SourceScenario::SourcePresent, SourceScenario::SourceAbsent];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            SourceScenario::SourcePresent => "present",
            SourceScenario::SourceAbsent => "absent",
        }
    }

    /// Whether `category` can occur at all under this scenario.
    ///
    /// With the donor present a correct exclusion is impossible; with the
    /// donor absent no identification to the donor and no erroneous
    /// exclusion of the donor can happen.
    pub const fn allows(self, category: DecisionCategory) -> bool {
        use DecisionCategory::*;
        match self {
            SourceScenario::SourcePresent => !matches!(category, CorrectExclusion),
            SourceScenario::SourceAbsent => {
                !matches!(category, CorrectId | WrongFingerId | ErroneousExclusion)
            }
        }
    }
}

impl fmt::Display for SourceScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
