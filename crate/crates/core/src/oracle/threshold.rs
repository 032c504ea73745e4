use super::{bits, Branch, Engine, OracleConfig, Optimum, Search, Table};
use crate::error::Result;
use crate::model::{Outcome, PolicyTree, ThresholdPbInstance};
use crate::rational::Q;

struct Threshold<'a> {
    inst: &'a ThresholdPbInstance,
    table: Table,
}

impl Search for Threshold<'_> {
    /// Uncovered consistent scenarios. Boxes already opened cannot split
    /// this set or cover any of it, so `expand` skips them on its own.
    type State = u64;

    fn num_actions(&self) -> usize {
        self.inst.n()
    }

    /// Covering at exactly the price of quitting is preferred, so that the
    /// outside option is taken only when strictly cheaper.
    fn favor_actions(&self) -> bool {
        true
    }

    fn terminal(&self, &live: &u64) -> Option<(Q, PolicyTree)> {
        Some((&self.inst.threshold * self.table.mass(live), PolicyTree::TakeOutside))
    }

    fn action_cost(&self, &live: &u64, a: usize) -> Q {
        &self.table.costs[a] * self.table.mass(live)
    }

    fn expand(&self, &live: &u64, a: usize) -> Option<Vec<(Outcome, Branch<u64>)>> {
        let t = &self.inst.threshold;
        let classes = self.table.classes(a, live);
        let covers = bits(live).any(|j| self.inst.base.values[a][j].at_most(t));
        if classes.len() < 2 && !covers {
            return None;
        }
        Some(
            classes
                .into_iter()
                .map(|(label, mask)| {
                    let j = mask.trailing_zeros() as usize;
                    let br = if self.inst.base.values[a][j].at_most(t) {
                        Branch::Done(PolicyTree::StopWithBest)
                    } else {
                        Branch::Continue(mask)
                    };
                    (label.clone(), br)
                })
                .collect(),
        )
    }
}

/// Optimal policy for PB<=T: stop at the first value `<= T`, or pay `T`.
pub fn opt_threshold(inst: &ThresholdPbInstance, config: &OracleConfig) -> Result<Optimum> {
    config.check(inst)?;
    let problem = Threshold { inst, table: Table::new(inst) };
    Engine::new(&problem, *config).run((1u64 << inst.m()) - 1)
}
