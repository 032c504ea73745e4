//! PB under a mixture: the threshold phases of the explicit case, with the
//! dynamic program as the PB<=T solver.

use log::warn;
use num::{One, Zero};

use super::dp::{dp_solve, DpConfig};
use super::enumerate::{opt_mixture_threshold, to_explicit};
use super::instance::MixtureInstance;
use crate::error::Result;
use crate::model::{eval_pb, ExplicitPbInstance, PolicyTree, ThresholdPbInstance};
use crate::rational::{q, Q};
use crate::reduce::{pb_phases, PhasedPolicy, ThresholdSolver};

pub const SCENARIO_CAP: usize = 50_000;

/// Runs [`dp_solve`] on the whole mixture at the requested threshold. The
/// distribution carried by the explicit instance is ignored: once covered
/// scenarios are removed the rest is no longer a mixture of products.
pub struct MixtureDpSolver<'a> {
    pub inst: &'a MixtureInstance,
    pub beta: Q,
    pub config: DpConfig,
}

impl ThresholdSolver for MixtureDpSolver<'_> {
    fn solve(&self, inst: &ThresholdPbInstance) -> Result<PolicyTree> {
        if inst.threshold.is_zero() {
            return Ok(PolicyTree::TakeOutside);
        }
        Ok(dp_solve(self.inst, &inst.threshold, &self.beta, &self.config)?.policy.tree().clone())
    }
}

#[derive(Clone, Debug)]
pub struct PhaseCheck {
    pub threshold: Q,
    /// Optimal PB<=T cost by enumeration, when small enough to compute.
    pub opt: Option<Q>,
    /// `T <= (1 + beta) opt / 0.2`.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct MixturePbSolution {
    /// Value vectors of the mixture as explicit scenarios.
    pub explicit: ExplicitPbInstance,
    pub phased: PhasedPolicy,
    pub cost: Q,
    pub checks: Vec<PhaseCheck>,
}

pub fn mixture_pb_solve(inst: &MixtureInstance, beta: &Q, config: &DpConfig) -> Result<MixturePbSolution> {
    let explicit = to_explicit(inst, SCENARIO_CAP)?;
    let solver = MixtureDpSolver { inst, beta: beta.clone(), config: *config };
    let phased = pb_phases(&explicit, &solver)?;
    let cost = eval_pb(&explicit, &phased.tree)?;
    let factor = (Q::one() + beta) / q(1, 5);
    let checks = phased
        .phases
        .iter()
        .map(|p| {
            let opt = (inst.n() <= 8).then(|| opt_mixture_threshold(inst, &p.threshold).ok()).flatten().map(|(c, _)| c);
            let holds = opt.as_ref().map(|o| p.threshold <= &factor * o);
            if holds == Some(false) {
                warn!("phase threshold {} exceeds (1 + beta) OPT_T / 0.2", p.threshold);
            }
            PhaseCheck { threshold: p.threshold.clone(), opt, holds }
        })
        .collect();
    Ok(MixturePbSolution { explicit, phased, cost, checks })
}
