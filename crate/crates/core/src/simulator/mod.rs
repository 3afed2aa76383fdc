//! Replication of the two-phase study.
//!
//! One iteration partitions the prints into the phase-1 set and the two
//! phase-2 group sets, then for every packet draws how many prints were
//! returned, how many of those were of value, which prints they were, and
//! the decision on each. [`run_study`] repeats this and summarizes every
//! table cell by its mean and a 95% highest-density interval.
//!
//! Randomness is addressed by position: iteration `j` owns a substream of the
//! master seed, and every phase, group and packet within it owns a further
//! substream. Results therefore do not depend on thread count or scheduling.

mod hdi;
mod summary;

use rayon::prelude::*;

pub use hdi::{hdi_from_samples, window_len, Interval};
pub use summary::{
    CellSummary, PrintCounts, RowSummary, SimulationSummary, SummaryRow, SummaryRows,
};

use crate::error::{Error, Result};
pub use crate::model::DecisionCountTable;
use crate::model::{CategoryCounts, PhaseTotals, RateVectorPair, SourceScenario, StudyDesign};
use crate::sampling::{draw_binomial, draw_multinomial, draw_subset, RngStream};

/// Interval mass used for the summary tables.
pub const HDI_MASS: f64 = 0.95;

const ITERATION_DOMAIN: u64 = 0x6974_6572; // "iter"
const FIXED_PARTITION_DOMAIN: u64 = 0x7061_7274; // "part"

/// Which prints go to phase 1 and to the two phase-2 groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrintPartition {
    pub phase1: Vec<u32>,
    pub group_a: Vec<u32>,
    pub group_b: Vec<u32>,
}

/// Whether each iteration draws its own partition or all iterations share
/// one drawn from the master seed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PartitionMode {
    #[default]
    Resample,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StudyOptions {
    pub keep_per_iteration: bool,
    pub partition: PartitionMode,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            keep_per_iteration: false,
            partition: PartitionMode::Resample,
        }
    }
}

/// Outcome of a single packet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketDraw {
    pub returned: u64,
    pub valued: u64,
    pub print_ids: Vec<u32>,
    /// Valued prints whose source is present / absent.
    pub present_valued: u64,
    pub absent_valued: u64,
    pub present: CategoryCounts,
    pub absent: CategoryCounts,
}

pub fn partition_prints(rng: &mut RngStream, design: &StudyDesign) -> Result<PrintPartition> {
    design.validate()?;
    let all = design.print_ids();
    let phase1 = draw_subset(rng, &all, design.phase1_prints_per_packet as usize)?;
    let rest: Vec<u32> = all
        .into_iter()
        .filter(|id| phase1.binary_search(id).is_err())
        .collect();
    let group_a = draw_subset(rng, &rest, design.phase2_prints_per_packet as usize)?;
    let group_b: Vec<u32> = rest
        .into_iter()
        .filter(|id| group_a.binary_search(id).is_err())
        .take(design.phase2_prints_per_packet as usize)
        .collect();
    Ok(PrintPartition {
        phase1,
        group_a,
        group_b,
    })
}

fn to_counts(v: Vec<u64>) -> CategoryCounts {
    let mut c = CategoryCounts::default();
    c.0.copy_from_slice(&v);
    c
}

/// Simulates one packet drawn from `pool`.
pub fn simulate_packet(
    rng: &mut RngStream,
    design: &StudyDesign,
    rates: &RateVectorPair,
    pool: &[u32],
    return_prob: f64,
    value_prob: f64,
) -> Result<PacketDraw> {
    let returned = draw_binomial(rng, pool.len() as u64, return_prob)?;
    let valued = draw_binomial(rng, returned, value_prob)?;
    let print_ids = draw_subset(rng, pool, valued as usize)?;
    let present_valued = print_ids
        .iter()
        .filter(|id| design.is_source_present(**id))
        .count() as u64;
    let absent_valued = valued - present_valued;
    let present = to_counts(draw_multinomial(
        rng,
        present_valued,
        rates.scenario(SourceScenario::SourcePresent).as_slice(),
    )?);
    let absent = to_counts(draw_multinomial(
        rng,
        absent_valued,
        rates.scenario(SourceScenario::SourceAbsent).as_slice(),
    )?);
    Ok(PacketDraw {
        returned,
        valued,
        print_ids,
        present_valued,
        absent_valued,
        present,
        absent,
    })
}

fn simulate_packets(
    rng: &RngStream,
    design: &StudyDesign,
    rates: &RateVectorPair,
    pool: &[u32],
    packets: u32,
    return_prob: f64,
    value_prob: f64,
) -> Result<(CategoryCounts, CategoryCounts, PhaseTotals)> {
    let mut present = CategoryCounts::default();
    let mut absent = CategoryCounts::default();
    let mut totals = PhaseTotals::default();
    for i in 0..packets {
        let mut packet_rng = rng.substream(u64::from(i));
        let draw = simulate_packet(
            &mut packet_rng,
            design,
            rates,
            pool,
            return_prob,
            value_prob,
        )?;
        present += draw.present;
        absent += draw.absent;
        totals += PhaseTotals {
            returned: draw.returned,
            valued: draw.valued,
        };
    }
    Ok((present, absent, totals))
}

fn check_pool(name: &str, pool: &[u32], expected: u32) -> Result<()> {
    if pool.len() != expected as usize {
        return Err(Error::Parameter(format!(
            "{name} holds {} prints, the design calls for {expected}",
            pool.len()
        )));
    }
    Ok(())
}

/// Phase 1: every packet holds the same `phase1` prints.
pub fn simulate_phase1(
    rng: &RngStream,
    design: &StudyDesign,
    rates: &RateVectorPair,
    phase1: &[u32],
) -> Result<DecisionCountTable> {
    design.validate()?;
    check_pool("phase-1 set", phase1, design.phase1_prints_per_packet)?;
    let (present, absent, phase1_totals) = simulate_packets(
        rng,
        design,
        rates,
        phase1,
        design.phase1_packets,
        design.phase1_return_prob,
        design.phase1_value_prob,
    )?;
    Ok(DecisionCountTable {
        present,
        absent,
        phase1: phase1_totals,
        phase2: PhaseTotals::default(),
    })
}

/// Phase 2: two groups of packets, group A on `group_a` prints and group B
/// on `group_b` prints.
pub fn simulate_phase2(
    rng: &RngStream,
    design: &StudyDesign,
    rates: &RateVectorPair,
    group_a: &[u32],
    group_b: &[u32],
) -> Result<DecisionCountTable> {
    design.validate()?;
    check_pool("group A set", group_a, design.phase2_prints_per_packet)?;
    check_pool("group B set", group_b, design.phase2_prints_per_packet)?;
    if group_a.iter().any(|id| group_b.contains(id)) {
        return Err(Error::Parameter("phase-2 groups overlap".to_owned()));
    }
    let mut table = DecisionCountTable::default();
    for (k, pool) in [group_a, group_b].into_iter().enumerate() {
        let (present, absent, totals) = simulate_packets(
            &rng.substream(k as u64),
            design,
            rates,
            pool,
            design.phase2_packets_per_group,
            design.phase2_return_prob,
            design.phase2_value_prob,
        )?;
        table.present += present;
        table.absent += absent;
        table.phase2 += totals;
    }
    Ok(table)
}

/// Stream owned by iteration `index` of a study seeded with `seed`.
pub fn iteration_stream(seed: u64, index: u64) -> RngStream {
    RngStream::new(seed, ITERATION_DOMAIN).substream(index)
}

/// Runs one full replication (both phases) on its own stream.
pub fn simulate_iteration(
    seed: u64,
    index: u64,
    design: &StudyDesign,
    rates: &RateVectorPair,
    fixed: Option<&PrintPartition>,
) -> Result<DecisionCountTable> {
    let stream = iteration_stream(seed, index);
    let drawn;
    let partition = match fixed {
        Some(p) => p,
        None => {
            drawn = partition_prints(&mut stream.substream(0), design)?;
            &drawn
        }
    };
    let mut table = simulate_phase1(&stream.substream(1), design, rates, &partition.phase1)?;
    let phase2 = simulate_phase2(
        &stream.substream(2),
        design,
        rates,
        &partition.group_a,
        &partition.group_b,
    )?;
    table += &phase2;
    Ok(table)
}

/// Replicates the study `iterations` times and summarizes each cell.
///
/// Iterations run in parallel; the summary is identical to a sequential run
/// with the same seed.
pub fn run_study(
    seed: u64,
    design: &StudyDesign,
    rates: &RateVectorPair,
    iterations: u64,
    options: StudyOptions,
) -> Result<SimulationSummary> {
    if iterations == 0 {
        return Err(Error::Parameter("iterations must be at least 1".to_owned()));
    }
    design.validate()?;
    let fixed = match options.partition {
        PartitionMode::Resample => None,
        PartitionMode::Fixed => Some(partition_prints(
            &mut RngStream::new(seed, FIXED_PARTITION_DOMAIN),
            design,
        )?),
    };
    let tables = (0..iterations)
        .into_par_iter()
        .map(|j| simulate_iteration(seed, j, design, rates, fixed.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    SimulationSummary::from_tables(
        rates.label(),
        rates.provenance(),
        seed,
        design,
        &tables,
        HDI_MASS,
        options.keep_per_iteration,
    )
}
