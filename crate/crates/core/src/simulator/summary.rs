use serde::{Deserialize, Serialize};

use super::hdi::{hdi_from_samples, Interval};
use crate::error::{Error, Result};
use crate::model::{DecisionCategory, DecisionCountTable, SourceScenario, StudyDesign};

/// Mean and highest-density interval of one table cell over all iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub mean: f64,
    pub lower: u64,
    pub upper: u64,
}

impl CellSummary {
    pub fn interval(&self) -> Interval {
        Interval {
            lower: self.lower,
            upper: self.upper,
        }
    }

    fn from_series(series: &[u64], mass: f64) -> Result<Self> {
        let iv = hdi_from_samples(series, mass)?;
        let sum: u128 = series.iter().map(|&x| u128::from(x)).sum();
        Ok(CellSummary {
            mean: sum as f64 / series.len() as f64,
            lower: iv.lower,
            upper: iv.upper,
        })
    }
}

/// One table row; a scenario column is `None` where the category cannot
/// occur under that scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowSummary {
    pub present: Option<CellSummary>,
    pub absent: Option<CellSummary>,
    pub total: CellSummary,
}

impl RowSummary {
    pub fn scenario(&self, s: SourceScenario) -> Option<&CellSummary> {
        match s {
            SourceScenario::SourcePresent => self.present.as_ref(),
            SourceScenario::SourceAbsent => self.absent.as_ref(),
        }
    }
}

/// Rows in the order of the published result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SummaryRow {
    Decisions,
    Category(DecisionCategory),
}

impl SummaryRow {
    pub const ALL: [SummaryRow; 7] = [
        SummaryRow::Decisions,
        SummaryRow::Category(DecisionCategory::CorrectId),
        SummaryRow::Category(DecisionCategory::WrongFingerId),
        SummaryRow::Category(DecisionCategory::WrongPersonId),
        SummaryRow::Category(DecisionCategory::Inconclusive),
        SummaryRow::Category(DecisionCategory::CorrectExclusion),
        SummaryRow::Category(DecisionCategory::ErroneousExclusion),
    ];

    pub fn key(self) -> &'static str {
        match self {
            SummaryRow::Decisions => "decisions",
            SummaryRow::Category(c) => c.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SummaryRows {
    pub decisions: RowSummary,
    pub correct_id: RowSummary,
    pub wrong_finger_id: RowSummary,
    pub wrong_person_id: RowSummary,
    pub inconclusive: RowSummary,
    pub correct_exclusion: RowSummary,
    pub erroneous_exclusion: RowSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrintCounts {
    pub present: u32,
    pub absent: u32,
    pub total: u32,
}

/// Per-cell means and 95% highest-density intervals over replicated studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SimulationSummary {
    pub label: String,
    pub provenance: String,
    pub seed: u64,
    pub iterations: u64,
    pub mass: f64,
    pub latent_prints: PrintCounts,
    pub rows: SummaryRows,
    #[serde(skip)]
    pub per_iteration: Option<Vec<DecisionCountTable>>,
}

impl SimulationSummary {
    /// Aggregates per-iteration tables into means and intervals.
    pub fn from_tables(
        label: &str,
        provenance: &str,
        seed: u64,
        design: &StudyDesign,
        tables: &[DecisionCountTable],
        mass: f64,
        keep_per_iteration: bool,
    ) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::Parameter(
                "at least one iteration is required".to_owned(),
            ));
        }
        let series =
            |f: &dyn Fn(&DecisionCountTable) -> u64| -> Vec<u64> { tables.iter().map(f).collect() };
        let cell =
            |f: &dyn Fn(&DecisionCountTable) -> u64| CellSummary::from_series(&series(f), mass);

        let decisions = RowSummary {
            present: Some(cell(&|t| t.present.total())?),
            absent: Some(cell(&|t| t.absent.total())?),
            total: cell(&|t| t.decisions())?,
        };
        let category_row = |c: DecisionCategory| -> Result<RowSummary> {
            let scenario_cell = |s: SourceScenario| -> Result<Option<CellSummary>> {
                if s.allows(c) {
                    Ok(Some(cell(&|t| t.get(s, c))?))
                } else {
                    Ok(None)
                }
            };
            Ok(RowSummary {
                present: scenario_cell(SourceScenario::SourcePresent)?,
                absent: scenario_cell(SourceScenario::SourceAbsent)?,
                total: cell(&|t| t.category_total(c))?,
            })
        };
        use DecisionCategory::*;
        let rows = SummaryRows {
            decisions,
            correct_id: category_row(CorrectId)?,
            wrong_finger_id: category_row(WrongFingerId)?,
            wrong_person_id: category_row(WrongPersonId)?,
            inconclusive: category_row(Inconclusive)?,
            correct_exclusion: category_row(CorrectExclusion)?,
            erroneous_exclusion: category_row(ErroneousExclusion)?,
        };
        Ok(SimulationSummary {
            label: label.to_owned(),
            provenance: provenance.to_owned(),
            seed,
            iterations: tables.len() as u64,
            mass,
            latent_prints: PrintCounts {
                present: design.source_present_prints,
                absent: design.total_prints - design.source_present_prints,
                total: design.total_prints,
            },
            rows,
            per_iteration: keep_per_iteration.then(|| tables.to_vec()),
        })
    }

    pub fn row(&self, row: SummaryRow) -> &RowSummary {
        use DecisionCategory::*;
        match row {
            SummaryRow::Decisions => &self.rows.decisions,
            SummaryRow::Category(CorrectId) => &self.rows.correct_id,
            SummaryRow::Category(WrongFingerId) => &self.rows.wrong_finger_id,
            SummaryRow::Category(WrongPersonId) => &self.rows.wrong_person_id,
            SummaryRow::Category(Inconclusive) => &self.rows.inconclusive,
            SummaryRow::Category(CorrectExclusion) => &self.rows.correct_exclusion,
            SummaryRow::Category(ErroneousExclusion) => &self.rows.erroneous_exclusion,
        }
    }

    pub fn category(&self, c: DecisionCategory) -> &RowSummary {
        self.row(SummaryRow::Category(c))
    }

    /// Cell for `(scenario, category)`; `None` for structural zeros.
    pub fn cell(&self, s: SourceScenario, c: DecisionCategory) -> Option<&CellSummary> {
        self.category(c).scenario(s)
    }

    /// Summary over both kinds of erroneous identification, recomputed from
    /// the kept per-iteration tables.
    pub fn erroneous_ids(&self, s: Option<SourceScenario>) -> Option<CellSummary> {
        let tables = self.per_iteration.as_ref()?;
        let series: Vec<u64> = tables
            .iter()
            .map(|t| match s {
                Some(s) => t.scenario(s).erroneous_ids(),
                None => t.present.erroneous_ids() + t.absent.erroneous_ids(),
            })
            .collect();
        CellSummary::from_series(&series, self.mass).ok()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}
