use num::Zero;

use super::{bits, Branch, Engine, OracleConfig, Optimum, Search, Table};
use crate::error::Result;
use crate::model::{ExplicitPbInstance, Outcome, PolicyTree};
use crate::rational::Q;

struct Pb<'a> {
    inst: &'a ExplicitPbInstance,
    table: Table,
}

impl Pb<'_> {
    fn current_min(&self, opened: u64, j: usize) -> Option<&Q> {
        bits(opened).filter_map(|b| self.inst.values[b][j].as_finite()).min()
    }
}

impl Search for Pb<'_> {
    /// (consistent scenarios, opened boxes)
    type State = (u64, u64);

    fn num_actions(&self) -> usize {
        self.inst.n()
    }

    fn terminal(&self, &(live, opened): &(u64, u64)) -> Option<(Q, PolicyTree)> {
        let mut total = Q::zero();
        for j in bits(live) {
            total += self.table.prob(j) * self.current_min(opened, j)?;
        }
        Some((total, PolicyTree::StopWithBest))
    }

    fn action_cost(&self, &(live, _): &(u64, u64), a: usize) -> Q {
        &self.table.costs[a] * self.table.mass(live)
    }

    fn expand(&self, &(live, opened): &(u64, u64), a: usize) -> Option<Vec<(Outcome, Branch<(u64, u64)>)>> {
        if opened & (1 << a) != 0 {
            return None;
        }
        let classes = self.table.classes(a, live);
        let improves = || {
            bits(live).any(|j| match (self.inst.values[a][j].as_finite(), self.current_min(opened, j)) {
                (Some(v), Some(cur)) => v < cur,
                (Some(_), None) => true,
                (None, _) => false,
            })
        };
        if classes.len() < 2 && !improves() {
            return None;
        }
        let next = opened | (1 << a);
        Some(classes.into_iter().map(|(label, mask)| (label.clone(), Branch::Continue((mask, next)))).collect())
    }
}

/// Optimal adaptive policy for the PB objective E[min value + opening cost].
pub fn opt_pb(inst: &ExplicitPbInstance, config: &OracleConfig) -> Result<Optimum> {
    config.check(inst)?;
    let problem = Pb { inst, table: Table::new(inst) };
    let root = ((1u64 << inst.m()) - 1, 0);
    Engine::new(&problem, *config).run(root)
}
