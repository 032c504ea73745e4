use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::instance::MEMBER_LABEL;
use crate::model::{DtInstance, MsscfInstance, Outcome, PolicyTree};
use crate::rational::Q;

/// Compares `gain_a / cost_a` with `gain_b / cost_b` without dividing. A
/// free action with positive gain beats everything.
pub(crate) fn ratio_cmp(gain_a: &Q, cost_a: &Q, gain_b: &Q, cost_b: &Q) -> Ordering {
    match (cost_a.is_zero(), cost_b.is_zero()) {
        (true, true) => gain_a.cmp(gain_b),
        (true, false) => if gain_a.is_positive() { Ordering::Greater } else { Ordering::Less },
        (false, true) => if gain_b.is_positive() { Ordering::Less } else { Ordering::Greater },
        (false, false) => (gain_a * cost_b).cmp(&(gain_b * cost_a)),
    }
}

/// Index with the best positive gain per cost; lowest index on ties.
pub(crate) fn best_ratio(costs: &[Q], gains: impl IntoIterator<Item = (usize, Q)>) -> Option<usize> {
    let mut best: Option<(usize, Q)> = None;
    for (a, g) in gains {
        if !g.is_positive() {
            continue;
        }
        if best.as_ref().is_none_or(|(b, bg)| ratio_cmp(&g, &costs[a], bg, &costs[*b]) == Ordering::Greater) {
            best = Some((a, g));
        }
    }
    best.map(|(a, _)| a)
}

/// Adaptive greedy for set cover with feedback: select the element covering
/// the most uncovered probability mass per unit cost, branch on feedback.
pub fn greedy_msscf(inst: &MsscfInstance) -> Result<PolicyTree> {
    if let Some(s) = (0..inst.m()).find(|&s| inst.cheapest_member(s).is_none()) {
        return Err(Error::InvalidInstance(format!("set {s} has no element")));
    }
    let all: Vec<usize> = (0..inst.m()).collect();
    Ok(greedy_msscf_from(inst, &all))
}

fn greedy_msscf_from(inst: &MsscfInstance, live: &[usize]) -> PolicyTree {
    let gains = (0..inst.n()).map(|e| {
        let g = live.iter().filter(|&&s| inst.contains(e, s)).fold(Q::zero(), |acc, &s| acc + &inst.probs[s]);
        (e, g)
    });
    let e = best_ratio(&inst.costs, gains).expect("every uncovered set has a member");
    let mut rest: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
    let mut children = BTreeMap::new();
    for &s in live {
        if inst.contains(e, s) {
            children.insert(Outcome::new(MEMBER_LABEL), PolicyTree::StopWithBest);
        } else {
            rest.entry(inst.observe(e, s)).or_default().push(s);
        }
    }
    for (label, group) in rest {
        children.insert(label, greedy_msscf_from(inst, &group));
    }
    PolicyTree::Act { action: e, children }
}

/// Pairs of `live` that test `t` puts in different outcome classes.
fn separated_pairs(inst: &DtInstance, t: usize, live: &[usize]) -> usize {
    let mut sizes: BTreeMap<&Outcome, usize> = BTreeMap::new();
    for &s in live {
        *sizes.entry(&inst.outcomes[t][s]).or_default() += 1;
    }
    let pairs = |k: usize| k * k.saturating_sub(1) / 2;
    pairs(live.len()) - sizes.values().map(|&k| pairs(k)).sum::<usize>()
}

/// Greedy decision tree: run the test separating the most pairs of
/// consistent scenarios per unit cost.
pub fn greedy_dt(inst: &DtInstance) -> Result<PolicyTree> {
    if let Some((a, b)) = inst.unidentifiable_pair() {
        return Err(Error::InvalidInstance(format!("no test distinguishes scenarios {a} and {b}")));
    }
    let all: Vec<usize> = (0..inst.m()).collect();
    Ok(greedy_dt_from(inst, &all))
}

fn greedy_dt_from(inst: &DtInstance, live: &[usize]) -> PolicyTree {
    if live.len() == 1 {
        return PolicyTree::Identified(live[0]);
    }
    let gains = (0..inst.n()).map(|t| (t, Q::from_integer(separated_pairs(inst, t, live).into())));
    let t = best_ratio(&inst.costs, gains).expect("identifiable instance");
    let mut classes: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
    for &s in live {
        classes.entry(inst.outcomes[t][s].clone()).or_default().push(s);
    }
    PolicyTree::Act {
        action: t,
        children: classes.into_iter().map(|(label, group)| (label, greedy_dt_from(inst, &group))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_dt, eval_msscf};
    use crate::rational::{q, qi};

    fn o(s: &str) -> Outcome {
        Outcome::new(s)
    }

    #[test]
    fn universal_element_first() {
        let inst = MsscfInstance::new(
            vec![qi(1), qi(1)],
            vec![q(1, 2), q(1, 2)],
            vec![vec![false, true], vec![true, true]],
            vec![vec![o("a"), o("a")], vec![o("a"), o("a")]],
        );
        let p = greedy_msscf(&inst).unwrap();
        assert!(matches!(p, PolicyTree::Act { action: 1, .. }));
        assert_eq!(eval_msscf(&inst, &p).unwrap(), qi(1));
    }

    #[test]
    fn likely_set_first() {
        let inst = MsscfInstance::new(
            vec![qi(1), qi(1)],
            vec![q(1, 10), q(9, 10)],
            vec![vec![true, false], vec![false, true]],
            vec![vec![o("a"), o("b")], vec![o("a"), o("b")]],
        );
        assert!(matches!(greedy_msscf(&inst).unwrap(), PolicyTree::Act { action: 1, .. }));
    }

    #[test]
    fn dt_pair_uses_cheapest_test() {
        let inst = DtInstance::new(vec![qi(3), qi(1)], vec![q(1, 2), q(1, 2)], vec![vec![o("a"), o("b")], vec![o("x"), o("y")]]);
        let p = greedy_dt(&inst).unwrap();
        assert!(matches!(p, PolicyTree::Act { action: 1, .. }));
        assert_eq!(eval_dt(&inst, &p).unwrap(), qi(1));
    }

    #[test]
    fn dt_single_scenario_is_a_leaf() {
        let inst = DtInstance::new(vec![qi(1)], vec![qi(1)], vec![vec![o("a")]]);
        assert_eq!(greedy_dt(&inst).unwrap(), PolicyTree::Identified(0));
    }

    #[test]
    fn free_action_wins() {
        assert_eq!(ratio_cmp(&qi(1), &qi(0), &qi(100), &qi(1)), Ordering::Greater);
        assert_eq!(ratio_cmp(&qi(1), &qi(2), &qi(1), &qi(3)), Ordering::Greater);
    }
}
