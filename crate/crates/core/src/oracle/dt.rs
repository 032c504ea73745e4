use num::Zero;

use super::{Branch, Engine, OracleConfig, Optimum, Search, Table};
use crate::error::{Error, Result};
use crate::model::{DtInstance, Outcome, PolicyTree};
use crate::rational::Q;

struct Dt {
    n: usize,
    table: Table,
}

impl Search for Dt {
    /// Consistent scenarios; a test that does not split them is skipped.
    type State = u64;

    fn num_actions(&self) -> usize {
        self.n
    }

    fn terminal(&self, &live: &u64) -> Option<(Q, PolicyTree)> {
        (live.count_ones() == 1).then(|| (Q::zero(), PolicyTree::Identified(live.trailing_zeros() as usize)))
    }

    fn action_cost(&self, &live: &u64, a: usize) -> Q {
        &self.table.costs[a] * self.table.mass(live)
    }

    fn expand(&self, &live: &u64, a: usize) -> Option<Vec<(Outcome, Branch<u64>)>> {
        if live.count_ones() < 2 {
            return None;
        }
        let classes = self.table.classes(a, live);
        if classes.len() < 2 {
            return None;
        }
        Some(
            classes
                .into_iter()
                .map(|(label, mask)| {
                    let br = if mask.count_ones() == 1 {
                        Branch::Done(PolicyTree::Identified(mask.trailing_zeros() as usize))
                    } else {
                        Branch::Continue(mask)
                    };
                    (label.clone(), br)
                })
                .collect(),
        )
    }
}

/// Optimal decision tree: identify the realized scenario at least expected
/// test cost.
pub fn opt_dt(inst: &DtInstance, config: &OracleConfig) -> Result<Optimum> {
    config.check(inst)?;
    if let Some((a, b)) = inst.unidentifiable_pair() {
        return Err(Error::InvalidInstance(format!("no test distinguishes scenarios {a} and {b}")));
    }
    let problem = Dt { n: inst.n(), table: Table::new(inst) };
    Engine::new(&problem, *config).run((1u64 << inst.m()) - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_dt;
    use crate::rational::{q, qi};

    fn o(s: &str) -> Outcome {
        Outcome::new(s)
    }

    #[test]
    fn single_scenario_costs_nothing() {
        let inst = DtInstance::new(vec![qi(1)], vec![qi(1)], vec![vec![o("a")]]);
        let opt = opt_dt(&inst, &OracleConfig::default()).unwrap();
        assert_eq!(opt.cost, qi(0));
        assert_eq!(opt.policy, PolicyTree::Identified(0));
    }

    #[test]
    fn one_test_pair() {
        let inst = DtInstance::new(vec![qi(1)], vec![q(1, 2), q(1, 2)], vec![vec![o("a"), o("b")]]);
        assert_eq!(opt_dt(&inst, &OracleConfig::default()).unwrap().cost, qi(1));
    }

    #[test]
    fn three_scenarios() {
        let inst = DtInstance::new(
            vec![qi(1), qi(1)],
            vec![q(1, 3), q(1, 3), q(1, 3)],
            vec![vec![o("a"), o("a"), o("b")], vec![o("a"), o("b"), o("b")]],
        );
        let opt = opt_dt(&inst, &OracleConfig::default()).unwrap();
        assert_eq!(opt.cost, q(5, 3));
        assert_eq!(eval_dt(&inst, &opt.policy).unwrap(), opt.cost);
    }

    #[test]
    fn unidentifiable_is_an_error() {
        let inst = DtInstance::new(vec![qi(1)], vec![q(1, 2), q(1, 2)], vec![vec![o("a"), o("a")]]);
        assert!(opt_dt(&inst, &OracleConfig::default()).is_err());
    }
}
