use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Layout of the two-phase study and its attrition probabilities.
///
/// Print ids run `1..=total_prints`; the first `source_present_prints` ids
/// are the prints whose true donor is among the candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct StudyDesign {
    pub total_prints: u32,
    pub source_present_prints: u32,
    pub phase1_packets: u32,
    pub phase1_prints_per_packet: u32,
    /// Phase 2 runs two groups (A and B), each with this many packets.
    pub phase2_packets_per_group: u32,
    pub phase2_prints_per_packet: u32,
    pub phase1_return_prob: f64,
    pub phase1_value_prob: f64,
    pub phase2_return_prob: f64,
    pub phase2_value_prob: f64,
}

impl Default for StudyDesign {
    fn default() -> Self {
        StudyDesign {
            total_prints: 80,
            source_present_prints: 56,
            phase1_packets: 109,
            phase1_prints_per_packet: 40,
            phase2_packets_per_group: 44,
            phase2_prints_per_packet: 20,
            phase1_return_prob: 4233.0 / 4360.0,
            phase1_value_prob: 3210.0 / 4233.0,
            phase2_return_prob: 1730.0 / 1760.0,
            phase2_value_prob: 1342.0 / 1730.0,
        }
    }
}

impl StudyDesign {
    pub fn validate(&self) -> Result<()> {
        if self.source_present_prints > self.total_prints {
            return Err(Error::Parameter(format!(
                "sourcePresentPrints {} exceeds totalPrints {}",
                self.source_present_prints, self.total_prints
            )));
        }
        if self.phase1_prints_per_packet > self.total_prints {
            return Err(Error::Parameter(format!(
                "phase1PrintsPerPacket {} exceeds totalPrints {}",
                self.phase1_prints_per_packet, self.total_prints
            )));
        }
        let remaining = self.total_prints - self.phase1_prints_per_packet;
        if 2 * u64::from(self.phase2_prints_per_packet) > u64::from(remaining) {
            return Err(Error::Parameter(format!(
                "two phase-2 groups of {} prints do not fit in the {} prints left after phase 1",
                self.phase2_prints_per_packet, remaining
            )));
        }
        for (name, p) in [
            ("phase1ReturnProb", self.phase1_return_prob),
            ("phase1ValueProb", self.phase1_value_prob),
            ("phase2ReturnProb", self.phase2_return_prob),
            ("phase2ValueProb", self.phase2_value_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn print_ids(&self) -> Vec<u32> {
        (1..=self.total_prints).collect()
    }

    pub fn is_source_present(&self, print_id: u32) -> bool {
        print_id >= 1 && print_id <= self.source_present_prints
    }

    /// Expected valued decisions in phase 1 (packets x prints x return x value).
    pub fn expected_phase1_valued(&self) -> f64 {
        f64::from(self.phase1_packets)
            * f64::from(self.phase1_prints_per_packet)
            * self.phase1_return_prob
            * self.phase1_value_prob
    }

    pub fn expected_phase2_valued(&self) -> f64 {
        2.0 * f64::from(self.phase2_packets_per_group)
            * f64::from(self.phase2_prints_per_packet)
            * self.phase2_return_prob
            * self.phase2_value_prob
    }
}
