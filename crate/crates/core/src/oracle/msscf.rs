use super::{bits, Branch, Engine, OracleConfig, Optimum, Search, Table};
use crate::error::{Error, Result};
use crate::model::{MsscfInstance, Outcome, PolicyTree};
use crate::rational::Q;

struct Msscf<'a> {
    inst: &'a MsscfInstance,
    table: Table,
}

impl Search for Msscf<'_> {
    /// Uncovered consistent sets. Elements already selected neither split
    /// nor cover this set, so `expand` skips them.
    type State = u64;

    fn num_actions(&self) -> usize {
        self.inst.n()
    }

    fn terminal(&self, _: &u64) -> Option<(Q, PolicyTree)> {
        None
    }

    fn action_cost(&self, &live: &u64, a: usize) -> Q {
        &self.table.costs[a] * self.table.mass(live)
    }

    fn expand(&self, &live: &u64, a: usize) -> Option<Vec<(Outcome, Branch<u64>)>> {
        let classes = self.table.classes(a, live);
        let covers = bits(live).any(|s| self.inst.contains(a, s));
        if classes.len() < 2 && !covers {
            return None;
        }
        Some(
            classes
                .into_iter()
                .map(|(label, mask)| {
                    let s = mask.trailing_zeros() as usize;
                    let br = if self.inst.contains(a, s) {
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

/// Optimal adaptive policy for min-sum set cover with feedback.
pub fn opt_msscf(inst: &MsscfInstance, config: &OracleConfig) -> Result<Optimum> {
    config.check(inst)?;
    if let Some(s) = (0..inst.m()).find(|&s| inst.cheapest_member(s).is_none()) {
        return Err(Error::InvalidInstance(format!("set {s} has no element")));
    }
    let problem = Msscf { inst, table: Table::new(inst) };
    Engine::new(&problem, *config).run((1u64 << inst.m()) - 1)
}
