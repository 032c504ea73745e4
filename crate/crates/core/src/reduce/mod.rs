//! Instance transformations between the problems, each paired with a map
//! that turns a policy for the target back into one for the source.

pub mod expand;
pub mod msscf_dt;
pub mod msscf_pb;
pub mod naive;
pub mod pbt_msscf;
pub mod phases;
pub mod udt_msscf;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use expand::{expand, Expansion};
pub use msscf_dt::{msscf_to_dt, MsscfToDt};
pub use msscf_pb::{msscf_to_pb, MsscfToPb};
pub use naive::{pb_to_pbt_naive, NaiveBox, NaiveReduction};
pub use pbt_msscf::{pbt_to_msscf, pbt_to_umsscf, PbtToMsscf};
pub use phases::{
    binary_search_threshold, pb_phases, pb_phases_uniform, search_threshold, threshold_grid, ExactThresholdSolver,
    PhaseRecord, PhasedPolicy, ThresholdSearch, ThresholdSolver, UniformPhaseParams,
};
pub use udt_msscf::{udt_to_msscf, udt_to_umsscf, UdtToMsscf};

use crate::error::{Error, Result};
use crate::format::Instance;
use crate::model::{Outcome, PolicyTree};

/// Builds the subtree after an observation: `(label, live scenarios, runs so far)`.
pub(crate) type Continue<'a> = dyn FnMut(&Outcome, &[usize], &std::collections::BTreeMap<usize, Outcome>) -> Result<PolicyTree> + 'a;

/// A forward instance map with its policy back-translation.
pub trait Reduction {
    type Target;
    fn forward(&self) -> &Self::Target;
    fn back_translate(&self, target_policy: &PolicyTree) -> Result<PolicyTree>;
    /// The inequality the pair is meant to satisfy, in words.
    fn claimed_bound(&self) -> &'static str;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    MsscfPb,
    MsscfDt,
    PbPbtNaive,
    PbtMsscf,
    PbtUmsscf,
    UdtUmsscf,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 6] = [
        ReductionKind::MsscfPb,
        ReductionKind::MsscfDt,
        ReductionKind::PbPbtNaive,
        ReductionKind::PbtMsscf,
        ReductionKind::PbtUmsscf,
        ReductionKind::UdtUmsscf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::MsscfPb => "msscf-pb",
            ReductionKind::MsscfDt => "msscf-dt",
            ReductionKind::PbPbtNaive => "pb-pbt-naive",
            ReductionKind::PbtMsscf => "pbt-msscf",
            ReductionKind::PbtUmsscf => "pbt-umsscf",
            ReductionKind::UdtUmsscf => "udt-umsscf",
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReductionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown reduction {s:?}")))
    }
}

/// Any of the instance reductions, built from a source instance.
pub enum AnyReduction {
    MsscfPb(MsscfToPb),
    MsscfDt(MsscfToDt),
    PbPbtNaive(NaiveReduction),
    PbtMsscf(PbtToMsscf),
    UdtMsscf(UdtToMsscf),
}

impl AnyReduction {
    pub fn build(kind: ReductionKind, source: &Instance) -> Result<AnyReduction> {
        let wrong = || Error::Unsupported(format!("reduction {kind} does not accept a {} instance", source.kind()));
        Ok(match (kind, source) {
            (ReductionKind::MsscfPb, Instance::Msscf(i)) => AnyReduction::MsscfPb(msscf_to_pb(i)),
            (ReductionKind::MsscfDt, Instance::Msscf(i)) => AnyReduction::MsscfDt(msscf_to_dt(i)),
            (ReductionKind::PbPbtNaive, Instance::Pb(i)) => AnyReduction::PbPbtNaive(pb_to_pbt_naive(i)),
            (ReductionKind::PbtMsscf, Instance::Pbt(i)) => AnyReduction::PbtMsscf(pbt_to_msscf(i)?),
            (ReductionKind::PbtUmsscf, Instance::Pbt(i)) => AnyReduction::PbtMsscf(pbt_to_umsscf(i)?),
            (ReductionKind::UdtUmsscf, Instance::Dt(i)) => AnyReduction::UdtMsscf(udt_to_umsscf(i)?),
            _ => return Err(wrong()),
        })
    }

    pub fn forward_instance(&self) -> Instance {
        match self {
            AnyReduction::MsscfPb(r) => r.forward().clone().into(),
            AnyReduction::MsscfDt(r) => r.forward().clone().into(),
            AnyReduction::PbPbtNaive(r) => r.forward().clone().into(),
            AnyReduction::PbtMsscf(r) => r.forward().clone().into(),
            AnyReduction::UdtMsscf(r) => r.forward().clone().into(),
        }
    }

    pub fn back_translate(&self, policy: &PolicyTree) -> Result<PolicyTree> {
        match self {
            AnyReduction::MsscfPb(r) => r.back_translate(policy),
            AnyReduction::MsscfDt(r) => r.back_translate(policy),
            AnyReduction::PbPbtNaive(r) => r.back_translate(policy),
            AnyReduction::PbtMsscf(r) => r.back_translate(policy),
            AnyReduction::UdtMsscf(r) => r.back_translate(policy),
        }
    }

    pub fn claimed_bound(&self) -> &'static str {
        match self {
            AnyReduction::MsscfPb(r) => r.claimed_bound(),
            AnyReduction::MsscfDt(r) => r.claimed_bound(),
            AnyReduction::PbPbtNaive(r) => r.claimed_bound(),
            AnyReduction::PbtMsscf(r) => r.claimed_bound(),
            AnyReduction::UdtMsscf(r) => r.claimed_bound(),
        }
    }

    /// What each target action stands for in the source.
    pub fn action_map(&self) -> Vec<String> {
        match self {
            AnyReduction::MsscfPb(r) => (0..r.forward().n()).map(|e| format!("element {e}")).collect(),
            AnyReduction::MsscfDt(r) => (0..r.forward().n()).map(|e| format!("element {e}")).collect(),
            AnyReduction::PbPbtNaive(r) => r.boxes().iter().map(ToString::to_string).collect(),
            AnyReduction::PbtMsscf(r) => (0..r.forward().n())
                .map(|e| if r.is_outside_element(e) { format!("outside {}", e - r.source().n()) } else { format!("box {e}") })
                .collect(),
            AnyReduction::UdtMsscf(r) => (0..r.forward().n())
                .map(|e| if e < r.source().n() { format!("test {e}") } else { format!("isolate {}", e - r.source().n()) })
                .collect(),
        }
    }
}

/// What `reduce` writes next to the forward instance so that
/// `backtranslate` can rebuild the reduction later.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub kind: ReductionKind,
    pub claimed_bound: String,
    pub actions: Vec<String>,
    pub source: serde_json::Value,
}

impl Sidecar {
    pub fn new(kind: ReductionKind, source: &Instance, reduction: &AnyReduction) -> Result<Sidecar> {
        Ok(Sidecar {
            kind,
            claimed_bound: reduction.claimed_bound().to_owned(),
            actions: reduction.action_map(),
            source: serde_json::from_str(&source.to_json())?,
        })
    }

    pub fn source_instance(&self) -> Result<Instance> {
        Instance::from_json(&self.source.to_string())
    }

    pub fn rebuild(&self) -> Result<AnyReduction> {
        AnyReduction::build(self.kind, &self.source_instance()?)
    }
}
