use std::collections::BTreeMap;

use num::Zero;

use super::greedy::best_ratio;
use crate::error::{Error, Result};
use crate::model::instance::MEMBER_LABEL;
use crate::model::{MsscfInstance, Outcome, PolicyTree};
use crate::rational::Q;

/// Feedback-blind greedy order: repeatedly take the element covering the
/// most uncovered mass per unit cost. Elements that cover nothing new are
/// appended at the end in id order.
pub fn nonadaptive_mssc_order(inst: &MsscfInstance) -> Result<Vec<usize>> {
    if let Some(s) = (0..inst.m()).find(|&s| inst.cheapest_member(s).is_none()) {
        return Err(Error::InvalidInstance(format!("set {s} has no element")));
    }
    let mut covered = vec![false; inst.m()];
    let mut used = vec![false; inst.n()];
    let mut order = Vec::with_capacity(inst.n());
    while covered.iter().any(|c| !c) {
        let gains = (0..inst.n()).filter(|&e| !used[e]).map(|e| {
            let g = (0..inst.m())
                .filter(|&s| !covered[s] && inst.contains(e, s))
                .fold(Q::zero(), |acc, s| acc + &inst.probs[s]);
            (e, g)
        });
        let e = best_ratio(&inst.costs, gains).expect("coverable instance");
        used[e] = true;
        order.push(e);
        for (s, c) in covered.iter_mut().enumerate() {
            *c |= inst.contains(e, s);
        }
    }
    order.extend((0..inst.n()).filter(|&e| !used[e]));
    Ok(order)
}

/// The adaptive-stopping policy of a fixed order: select in order, stop as
/// soon as the realized set is hit.
pub fn order_policy(inst: &MsscfInstance, order: &[usize]) -> Result<PolicyTree> {
    let all: Vec<usize> = (0..inst.m()).collect();
    order_from(inst, order, &all)
}

fn order_from(inst: &MsscfInstance, order: &[usize], live: &[usize]) -> Result<PolicyTree> {
    let Some((&e, rest)) = order.split_first() else {
        return Err(Error::Infeasible(format!("order leaves sets {live:?} uncovered")));
    };
    let mut groups: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
    let mut children = BTreeMap::new();
    for &s in live {
        if inst.contains(e, s) {
            children.insert(Outcome::new(MEMBER_LABEL), PolicyTree::StopWithBest);
        } else {
            groups.entry(inst.observe(e, s)).or_default().push(s);
        }
    }
    for (label, group) in groups {
        children.insert(label, order_from(inst, rest, &group)?);
    }
    Ok(PolicyTree::Act { action: e, children })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_msscf;
    use crate::oracle::order::order_cost;
    use crate::rational::{q, qi};

    fn o(s: &str) -> Outcome {
        Outcome::new(s)
    }

    #[test]
    fn universal_element_leads() {
        let inst = MsscfInstance::new(
            vec![qi(1), qi(1), qi(1)],
            vec![q(1, 2), q(1, 2)],
            vec![vec![true, false], vec![false, true], vec![true, true]],
            vec![vec![o("a"), o("a")]; 3],
        );
        assert_eq!(nonadaptive_mssc_order(&inst).unwrap()[0], 2);
    }

    #[test]
    fn heavier_set_first() {
        let inst = MsscfInstance::new(
            vec![qi(1), qi(1)],
            vec![q(1, 10), q(9, 10)],
            vec![vec![true, false], vec![false, true]],
            vec![vec![o("a"), o("b")], vec![o("c"), o("d")]],
        );
        let order = nonadaptive_mssc_order(&inst).unwrap();
        assert_eq!(order, vec![1, 0]);
        let p = order_policy(&inst, &order).unwrap();
        assert_eq!(eval_msscf(&inst, &p).unwrap(), order_cost(&inst, &order).unwrap());
    }
}
