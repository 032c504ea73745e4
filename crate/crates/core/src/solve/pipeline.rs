//! End-to-end approximate PB solvers built from greedy decision trees and
//! the reduction chain.

use log::debug;
use num::Zero;

use super::greedy::greedy_dt;
use crate::error::Result;
use crate::model::{ExplicitPbInstance, PolicyTree, ThresholdPbInstance};
use crate::reduce::{
    msscf_to_dt, pb_phases_uniform, pb_to_pbt_naive, pbt_to_msscf, PhasedPolicy, Reduction, ThresholdSolver,
    UniformPhaseParams,
};

/// PB<=T through set cover with feedback, then a decision tree built by
/// `greedy_dt`, translated back through both reductions.
#[derive(Clone, Copy, Debug, Default)]
pub struct DtChainSolver;

impl ThresholdSolver for DtChainSolver {
    fn solve(&self, inst: &ThresholdPbInstance) -> Result<PolicyTree> {
        if inst.threshold.is_zero() {
            return Ok(PolicyTree::TakeOutside);
        }
        let cover = pbt_to_msscf(inst)?;
        let dt = msscf_to_dt(cover.forward());
        let tree = greedy_dt(dt.forward())?;
        let set_policy = dt.back_translate(&tree)?;
        debug!(
            "dt chain at T = {}: {} sets, {} tests, tree depth {}",
            inst.threshold,
            cover.forward().m(),
            dt.forward().n(),
            tree.depth()
        );
        cover.back_translate(&set_policy)
    }
}

/// Phases over uniform copies, each phase solved by [`DtChainSolver`].
pub fn pipeline_pb_via_udt(src: &ExplicitPbInstance) -> Result<PhasedPolicy> {
    pipeline_pb_via_udt_with(src, &UniformPhaseParams::default())
}

pub fn pipeline_pb_via_udt_with(src: &ExplicitPbInstance, params: &UniformPhaseParams) -> Result<PhasedPolicy> {
    pb_phases_uniform(src, &DtChainSolver, params)
}

/// One PB<=T call on the naive threshold instance, solved by [`DtChainSolver`].
pub fn pipeline_pb_direct(src: &ExplicitPbInstance) -> Result<PolicyTree> {
    let naive = pb_to_pbt_naive(src);
    let policy = DtChainSolver.solve(naive.forward())?;
    naive.back_translate(&policy)
}
