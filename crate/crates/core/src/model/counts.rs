use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Index, IndexMut};

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{DecisionCategory, SourceScenario};
use crate::error::{Error, Result};

/// One count per decision category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CategoryCounts(pub [u64; DecisionCategory::COUNT]);

impl CategoryCounts {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Sum over the two erroneous-identification categories.
    pub fn erroneous_ids(&self) -> u64 {
        self[DecisionCategory::WrongFingerId] + self[DecisionCategory::WrongPersonId]
    }

    /// Fails if a category forbidden under `scenario` holds a nonzero count.
    pub fn check_structure(&self, scenario: SourceScenario) -> Result<()> {
        for c in DecisionCategory::ALL {
            if !scenario.allows(c) && self[c] != 0 {
                return Err(Error::Structural(format!(
                    "{} count for source-{} is {}, must be 0",
                    c, scenario, self[c]
                )));
            }
        }
        Ok(())
    }
}

impl Index<DecisionCategory> for CategoryCounts {
    type Output = u64;

    fn index(&self, c: DecisionCategory) -> &u64 {
        &self.0[c.index()]
    }
}

impl IndexMut<DecisionCategory> for CategoryCounts {
    fn index_mut(&mut self, c: DecisionCategory) -> &mut u64 {
        &mut self.0[c.index()]
    }
}

impl Add for CategoryCounts {
    type Output = CategoryCounts;

    fn add(mut self, rhs: CategoryCounts) -> CategoryCounts {
        self += rhs;
        self
    }
}

impl AddAssign for CategoryCounts {
    fn add_assign(&mut self, rhs: CategoryCounts) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Serialize for CategoryCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(DecisionCategory::COUNT))?;
        for c in DecisionCategory::ALL {
            map.serialize_entry(c.name(), &self[c])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for CategoryCounts {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, u64>::deserialize(deserializer)?;
        let mut counts = CategoryCounts::default();
        for (name, value) in raw {
            let c: DecisionCategory = name.parse().map_err(serde::de::Error::custom)?;
            counts[c] = value;
        }
        Ok(counts)
    }
}

/// Returned and valued decision totals for one phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTotals {
    /// Decisions returned by examiners (prints analysed).
    pub returned: u64,
    /// Returned decisions on prints deemed of value, i.e. compared.
    pub valued: u64,
}

impl AddAssign for PhaseTotals {
    fn add_assign(&mut self, rhs: PhaseTotals) {
        self.returned += rhs.returned;
        self.valued += rhs.valued;
    }
}

/// Decision counts per (scenario, category) plus per-phase attrition totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecisionCountTable {
    pub present: CategoryCounts,
    pub absent: CategoryCounts,
    pub phase1: PhaseTotals,
    pub phase2: PhaseTotals,
}

impl DecisionCountTable {
    pub fn scenario(&self, s: SourceScenario) -> &CategoryCounts {
        match s {
            SourceScenario::SourcePresent => &self.present,
            SourceScenario::SourceAbsent => &self.absent,
        }
    }

    pub fn scenario_mut(&mut self, s: SourceScenario) -> &mut CategoryCounts {
        match s {
            SourceScenario::SourcePresent => &mut self.present,
            SourceScenario::SourceAbsent => &mut self.absent,
        }
    }

    pub fn get(&self, s: SourceScenario, c: DecisionCategory) -> u64 {
        self.scenario(s)[c]
    }

    /// Count of `c` summed over both scenarios.
    pub fn category_total(&self, c: DecisionCategory) -> u64 {
        self.present[c] + self.absent[c]
    }

    pub fn decisions(&self) -> u64 {
        self.present.total() + self.absent.total()
    }

    pub fn valued_total(&self) -> u64 {
        self.phase1.valued + self.phase2.valued
    }

    /// Checks structural zeros, attrition ordering and that every valued
    /// decision landed in exactly one cell.
    pub fn validate(&self) -> Result<()> {
        self.present
            .check_structure(SourceScenario::SourcePresent)?;
        self.absent.check_structure(SourceScenario::SourceAbsent)?;
        for (name, p) in [("phase1", self.phase1), ("phase2", self.phase2)] {
            if p.valued > p.returned {
                return Err(Error::Parameter(format!(
                    "{name}: valued decisions {} exceed returned {}",
                    p.valued, p.returned
                )));
            }
        }
        if self.decisions() != self.valued_total() {
            return Err(Error::Parameter(format!(
                "cell sum {} differs from valued decisions {}",
                self.decisions(),
                self.valued_total()
            )));
        }
        Ok(())
    }
}

impl AddAssign<&DecisionCountTable> for DecisionCountTable {
    fn add_assign(&mut self, rhs: &DecisionCountTable) {
        self.present += rhs.present;
        self.absent += rhs.absent;
        self.phase1 += rhs.phase1;
        self.phase2 += rhs.phase2;
    }
}

/// Reported decision counts of a study.
///
/// Row sums are the per-scenario decision totals. Phase attrition totals are
/// optional and, when present, describe the study design rather than the
/// table: the published table covers fewer decisions than were recorded as
/// valued.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedCounts {
    present: CategoryCounts,
    absent: CategoryCounts,
    phase_totals: Option<[PhaseTotals; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CountsDocument {
    scenarios: ScenarioCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase_totals: Option<PhaseTotalsDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decision_totals: Option<DecisionTotalsDocument>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioCounts {
    present: CategoryCounts,
    absent: CategoryCounts,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhaseTotalsDocument {
    phase1: PhaseTotals,
    phase2: PhaseTotals,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecisionTotalsDocument {
    present: u64,
    absent: u64,
}

impl ObservedCounts {
    pub fn new(
        present: CategoryCounts,
        absent: CategoryCounts,
        phase_totals: Option<[PhaseTotals; 2]>,
    ) -> Result<Self> {
        present.check_structure(SourceScenario::SourcePresent)?;
        absent.check_structure(SourceScenario::SourceAbsent)?;
        Ok(ObservedCounts {
            present,
            absent,
            phase_totals,
        })
    }

    /// The published decision table with erroneous identifications split
    /// into wrong-finger and wrong-person cases.
    pub fn builtin() -> Self {
        ObservedCounts {
            present: CategoryCounts([2457, 35, 4, 446, 0, 235]),
            absent: CategoryCounts([0, 0, 3, 403, 953, 0]),
            phase_totals: Some([
                PhaseTotals {
                    returned: 4233,
                    valued: 3210,
                },
                PhaseTotals {
                    returned: 1730,
                    valued: 1342,
                },
            ]),
        }
    }

    pub fn scenario(&self, s: SourceScenario) -> &CategoryCounts {
        match s {
            SourceScenario::SourcePresent => &self.present,
            SourceScenario::SourceAbsent => &self.absent,
        }
    }

    pub fn get(&self, s: SourceScenario, c: DecisionCategory) -> u64 {
        self.scenario(s)[c]
    }

    pub fn category_total(&self, c: DecisionCategory) -> u64 {
        self.present[c] + self.absent[c]
    }

    /// Decisions reported for one scenario (the row sum).
    pub fn decisions(&self, s: SourceScenario) -> u64 {
        self.scenario(s).total()
    }

    pub fn total_decisions(&self) -> u64 {
        self.present.total() + self.absent.total()
    }

    pub fn erroneous_ids(&self) -> u64 {
        self.present.erroneous_ids() + self.absent.erroneous_ids()
    }

    pub fn phase_totals(&self) -> Option<[PhaseTotals; 2]> {
        self.phase_totals
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CountsDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let counts = ObservedCounts::new(
            doc.scenarios.present,
            doc.scenarios.absent,
            doc.phase_totals.map(|p| [p.phase1, p.phase2]),
        )?;
        if let Some(t) = doc.decision_totals {
            for (s, expected) in [
                (SourceScenario::SourcePresent, t.present),
                (SourceScenario::SourceAbsent, t.absent),
            ] {
                if counts.decisions(s) != expected {
                    return Err(Error::Format(format!(
                        "decisionTotals.{s} is {expected} but the row sums to {}",
                        counts.decisions(s)
                    )));
                }
            }
        }
        Ok(counts)
    }

    pub fn to_json(&self) -> String {
        let doc = CountsDocument {
            scenarios: ScenarioCounts {
                present: self.present,
                absent: self.absent,
            },
            phase_totals: self
                .phase_totals
                .map(|[phase1, phase2]| PhaseTotalsDocument { phase1, phase2 }),
            decision_totals: Some(DecisionTotalsDocument {
                present: self.present.total(),
                absent: self.absent.total(),
            }),
        };
        serde_json::to_string_pretty(&doc).expect("counts serialize")
    }
}
