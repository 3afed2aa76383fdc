//! Rendering of simulation summaries and the all-experiments report.
//!
//! Text tables are formatted from the same values that go into JSON and CSV;
//! nothing is recomputed for display.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{
    fpr_estimate, solution_one_analysis, solution_two_analysis, two_proportion_test, BayesSummary,
    FprVariant, ProportionTest, RatioEstimate, SolutionOne, SolutionTwo,
};
use crate::model::{
    preset_rate_vectors, DecisionCategory, ObservedCounts, SourceScenario, StudyDesign,
    PRESET_NAMES,
};
use crate::simulator::{
    run_study, CellSummary, PartitionMode, SimulationSummary, StudyOptions, SummaryRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Format(format!("unknown output format `{other}`"))),
        }
    }
}

const LABEL_WIDTH: usize = 46;
const CELL_WIDTH: usize = 24;

fn row_label(row: SummaryRow) -> &'static str {
    use DecisionCategory::*;
    match row {
        SummaryRow::Decisions => "# of Decisions",
        SummaryRow::Category(CorrectId) => "Correct IDs",
        SummaryRow::Category(WrongFingerId) => "Erroneous IDs: correct person, wrong finger",
        SummaryRow::Category(WrongPersonId) => "Erroneous IDs: incorrect person",
        SummaryRow::Category(Inconclusive) => "Inconclusive examinations",
        SummaryRow::Category(CorrectExclusion) => "Correct Exclusions",
        SummaryRow::Category(ErroneousExclusion) => "Erroneous Exclusions",
    }
}

/// `mean [lower, upper]` with the mean at two decimals, or `N/A`.
pub fn format_cell(cell: Option<&CellSummary>) -> String {
    match cell {
        Some(c) => format!("{:.2} [{}, {}]", c.mean, c.lower, c.upper),
        None => "N/A".to_owned(),
    }
}

/// Fixed-width table in the layout of the published result tables.
pub fn summary_table(summary: &SimulationSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}  ({} iterations, seed {}, {:.0}% highest-density intervals)",
        summary.label,
        summary.iterations,
        summary.seed,
        summary.mass * 100.0
    );
    let _ = writeln!(
        out,
        "{:<LABEL_WIDTH$}{:<CELL_WIDTH$}{:<CELL_WIDTH$}Totals",
        "", "Source present", "Source not present"
    );
    let p = summary.latent_prints;
    let _ = writeln!(
        out,
        "{:<LABEL_WIDTH$}{:<CELL_WIDTH$}{:<CELL_WIDTH$}{}",
        "# of Latent Prints", p.present, p.absent, p.total
    );
    for row in SummaryRow::ALL {
        let r = summary.row(row);
        let _ = writeln!(
            out,
            "{:<LABEL_WIDTH$}{:<CELL_WIDTH$}{:<CELL_WIDTH$}{}",
            row_label(row),
            format_cell(r.present.as_ref()),
            format_cell(r.absent.as_ref()),
            format_cell(Some(&r.total)),
        );
    }
    out
}

fn csv_cell(
    out: &mut String,
    prefix: &str,
    row: SummaryRow,
    column: &str,
    cell: Option<&CellSummary>,
) {
    match cell {
        Some(c) => {
            let _ = writeln!(
                out,
                "{prefix}{},{column},{},{},{}",
                row.key(),
                c.mean,
                c.lower,
                c.upper
            );
        }
        None => {
            let _ = writeln!(out, "{prefix}{},{column},,,", row.key());
        }
    }
}

fn summary_csv_rows(out: &mut String, prefix: &str, summary: &SimulationSummary) {
    for row in SummaryRow::ALL {
        let r = summary.row(row);
        csv_cell(out, prefix, row, "present", r.present.as_ref());
        csv_cell(out, prefix, row, "absent", r.absent.as_ref());
        csv_cell(out, prefix, row, "total", Some(&r.total));
    }
}

/// One line per (row, column); structural zeros have empty value fields.
pub fn summary_csv(summary: &SimulationSummary) -> String {
    let mut out = String::from("row,column,mean,lower,upper\n");
    summary_csv_rows(&mut out, "", summary);
    out
}

/// Per-iteration count tables, if they were kept.
pub fn per_iteration_csv(summary: &SimulationSummary) -> Option<String> {
    let tables = summary.per_iteration.as_ref()?;
    let mut out = String::from("iteration");
    for s in SourceScenario::ALL {
        for c in DecisionCategory::ALL {
            let _ = write!(out, ",{}_{}", s.name(), c.name());
        }
    }
    out.push_str(",phase1_returned,phase1_valued,phase2_returned,phase2_valued\n");
    for (i, t) in tables.iter().enumerate() {
        let _ = write!(out, "{i}");
        for s in SourceScenario::ALL {
            for c in DecisionCategory::ALL {
                let _ = write!(out, ",{}", t.get(s, c));
            }
        }
        let _ = writeln!(
            out,
            ",{},{},{},{}",
            t.phase1.returned, t.phase1.valued, t.phase2.returned, t.phase2.valued
        );
    }
    Some(out)
}

/// Renders a summary in the requested format.
pub fn emit_summary(summary: &SimulationSummary, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => summary_table(summary),
        OutputFormat::Json => summary.to_json(),
        OutputFormat::Csv => summary_csv(summary),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationSection {
    pub preset: String,
    pub summary: SimulationSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BayesSection {
    pub solution_one: SolutionOne,
    pub solution_two: SolutionTwo,
}

/// Every experiment and estimator in one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub seed: u64,
    pub iterations: u64,
    pub simulations: Vec<SimulationSection>,
    pub estimates: Vec<RatioEstimate>,
    pub bayes: BayesSection,
    pub proportion_test: ProportionTest,
}

/// Runs the seven preset experiments, the four ratio estimators, both
/// Bayesian analyses and the wrong-person proportion test.
pub fn report_all(counts: &ObservedCounts, seed: u64, iterations: u64) -> Result<Report> {
    report_all_with(
        counts,
        seed,
        iterations,
        &StudyDesign::default(),
        PartitionMode::Resample,
    )
}

pub fn report_all_with(
    counts: &ObservedCounts,
    seed: u64,
    iterations: u64,
    design: &StudyDesign,
    partition: PartitionMode,
) -> Result<Report> {
    let options = StudyOptions {
        keep_per_iteration: false,
        partition,
    };
    let simulations = PRESET_NAMES
        .iter()
        .map(|name| {
            let rates = preset_rate_vectors(name)?;
            Ok(SimulationSection {
                preset: (*name).to_owned(),
                summary: run_study(seed, design, &rates, iterations, options)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let estimates = FprVariant::ALL
        .into_iter()
        .map(|v| fpr_estimate(v, counts))
        .collect::<Result<Vec<_>>>()?;
    let present = counts.scenario(SourceScenario::SourcePresent);
    let absent = counts.scenario(SourceScenario::SourceAbsent);
    let proportion_test = two_proportion_test(
        present[DecisionCategory::WrongPersonId],
        present.total(),
        absent[DecisionCategory::WrongPersonId],
        absent.total(),
    )?;
    Ok(Report {
        seed,
        iterations,
        simulations,
        estimates,
        bayes: BayesSection {
            solution_one: solution_one_analysis(counts)?,
            solution_two: solution_two_analysis(counts)?,
        },
        proportion_test,
    })
}

pub fn estimates_table(estimates: &[RatioEstimate]) -> String {
    let mut out = format!(
        "{:<14}{:>10}{:>13}{:>11}{:>14}  {}\n",
        "variant", "numerator", "denominator", "estimate", "upper 95%", "method"
    );
    for e in estimates {
        let _ = writeln!(
            out,
            "{:<14}{:>10}{:>13}{:>10.2}%{:>13.2}%  {}",
            e.variant,
            e.numerator,
            e.denominator,
            e.estimate * 100.0,
            e.ci_upper95 * 100.0,
            e.method
        );
    }
    out
}

fn bayes_line(out: &mut String, name: &str, s: &BayesSummary) {
    let _ = writeln!(
        out,
        "{:<34}{:>6}/{:<6} MAP {:>6.2}%   upper 97.5% {:>6.2}%",
        name,
        s.successes,
        s.trials,
        s.map * 100.0,
        s.upper975 * 100.0
    );
}

pub fn bayes_table(section: &BayesSection) -> String {
    let mut out = String::from("Two rates by source presence (flat Beta prior)\n");
    bayes_line(&mut out, "  source present", &section.solution_one.present);
    bayes_line(&mut out, "  source absent", &section.solution_one.absent);
    out.push_str("Two kinds of false identification (flat Beta prior)\n");
    bayes_line(
        &mut out,
        "  wrong finger of correct person",
        &section.solution_two.wrong_finger,
    );
    bayes_line(
        &mut out,
        "  wrong person",
        &section.solution_two.wrong_person,
    );
    if let Some(note) = &section.solution_two.note {
        let _ = writeln!(out, "  note: {note}");
    }
    out
}

pub fn proportion_test_table(t: &ProportionTest) -> String {
    format!(
        "Fisher exact test {}/{} vs {}/{}: p = {:.4} ({})\n",
        t.x1,
        t.n1,
        t.x2,
        t.n2,
        t.p_value,
        if t.significant {
            "significant at 0.05"
        } else {
            "not significant at 0.05"
        }
    )
}

fn report_text(report: &Report) -> String {
    let mut out = String::new();
    for (i, s) in report.simulations.iter().enumerate() {
        let _ = writeln!(out, "== Experiment {}: preset `{}` ==", i + 1, s.preset);
        out.push_str(&summary_table(&s.summary));
        out.push('\n');
    }
    out.push_str("== False-positive ratio estimates ==\n");
    out.push_str(&estimates_table(&report.estimates));
    out.push_str("\n== Bayesian analyses ==\n");
    out.push_str(&bayes_table(&report.bayes));
    out.push_str("\n== Wrong-person identification rates by source presence ==\n");
    out.push_str(&proportion_test_table(&report.proportion_test));
    out
}

fn report_csv(report: &Report) -> String {
    let mut out = String::from("section,row,column,mean,lower,upper\n");
    for s in &report.simulations {
        summary_csv_rows(&mut out, &format!("{},", s.preset), &s.summary);
    }
    out.push_str("\nvariant,numerator,denominator,estimate,ciUpper95,method\n");
    for e in &report.estimates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.variant, e.numerator, e.denominator, e.estimate, e.ci_upper95, e.method
        );
    }
    out.push_str("\nanalysis,successes,trials,map,upper975\n");
    let b = &report.bayes;
    for (name, s) in [
        ("present", &b.solution_one.present),
        ("absent", &b.solution_one.absent),
        ("wrongFinger", &b.solution_two.wrong_finger),
        ("wrongPerson", &b.solution_two.wrong_person),
    ] {
        let _ = writeln!(
            out,
            "{name},{},{},{},{}",
            s.successes, s.trials, s.map, s.upper975
        );
    }
    let t = &report.proportion_test;
    out.push_str("\nx1,n1,x2,n2,pValue,significant\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        t.x1, t.n1, t.x2, t.n2, t.p_value, t.significant
    );
    out
}

pub fn emit_report(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => report_text(report),
        OutputFormat::Json => serde_json::to_string_pretty(report).expect("report serialize"),
        OutputFormat::Csv => report_csv(report),
    }
}
