//! Flatness analyses: structure extraction, candidate verification,
//! prolongation planning, partition tests and SFL certification.

mod identities;
mod partition;
mod plan;
mod sfl;
mod structure;
mod verify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::SamplePlan;
use crate::symbolic::Point;
use crate::system::default_cap;

pub use identities::{check_two_input_identities, three_input_checks, two_input_checks};
pub use partition::{check_partition, PartitionOutcome};
pub use plan::{plan_minimal_prolongations, PlanOptions, PlanSummary, ProlongationPlan};
pub use sfl::{check_sfl, SflCertificate};
pub use structure::{arrange_components, structure_analysis, Arrangement, StructureReport, StructureRow};
pub use verify::{verify_candidate, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalysisOptions {
    pub plan: SamplePlan,
    /// Highest derivative order computed; `None` means `2n + 4`.
    pub cap: Option<usize>,
}

impl AnalysisOptions {
    pub fn cap_for(&self, n: usize) -> usize {
        self.cap.unwrap_or_else(|| default_cap(n))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "c-i")]
    CaseI,
    #[serde(rename = "c-ii")]
    CaseII,
    #[serde(rename = "rank-two")]
    RankTwo,
    #[serde(rename = "two-input")]
    TwoInput,
    #[serde(rename = "general-m")]
    GeneralM,
    #[serde(rename = "single-input")]
    SingleInput,
    #[serde(rename = "full-rank")]
    FullRank,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::CaseI => "c-i",
            CaseTag::CaseII => "c-ii",
            CaseTag::RankTwo => "rank-two",
            CaseTag::TwoInput => "two-input",
            CaseTag::GeneralM => "general-m",
            CaseTag::SingleInput => "single-input",
            CaseTag::FullRank => "full-rank",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Inconclusive,
}

/// Sample point keyed by variable name, for reports.
pub fn named_point(p: &Point) -> BTreeMap<String, f64> {
    p.iter().map(|(k, v)| (k.name().to_string(), *v)).collect()
}

#[cfg(test)]
pub(crate) mod testing {
    use crate::format::{parse_system_file, SystemFile};

    pub fn fixture(name: &str) -> SystemFile {
        let text = match name {
            "academic" => include_str!("../../fixtures/academic.flat"),
            "example1" => include_str!("../../fixtures/example1.flat"),
            "example3_I" => include_str!("../../fixtures/example3_I.flat"),
            "example3_II" => include_str!("../../fixtures/example3_II.flat"),
            "two_input_chain" => include_str!("../../fixtures/two_input_chain.flat"),
            "rank2_synthetic" => include_str!("../../fixtures/rank2_synthetic.flat"),
            other => panic!("unknown fixture {other}"),
        };
        parse_system_file(text).unwrap()
    }
}
