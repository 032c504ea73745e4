use num::Zero;

use crate::error::{Error, Result};
use crate::model::MsscfInstance;
use crate::rational::Q;

/// Expected cover cost of selecting elements in the fixed `order`.
pub fn order_cost(inst: &MsscfInstance, order: &[usize]) -> Result<Q> {
    let mut total = Q::zero();
    for s in 0..inst.m() {
        let mut paid = Q::zero();
        let mut hit = false;
        for &e in order {
            paid += &inst.costs[e];
            if inst.contains(e, s) {
                hit = true;
                break;
            }
        }
        if !hit {
            return Err(Error::Infeasible(format!("order never covers set {s}")));
        }
        total += &inst.probs[s] * paid;
    }
    Ok(total)
}

/// Cheapest fixed selection order by exhaustive search over all `n!`
/// permutations. Ties keep the lexicographically first order.
pub fn best_fixed_order(inst: &MsscfInstance, max_n: usize) -> Result<(Vec<usize>, Q)> {
    if inst.n() > max_n {
        return Err(Error::CapExceeded { what: "elements", got: inst.n(), cap: max_n });
    }
    let mut best: Option<(Vec<usize>, Q)> = None;
    let mut perm = Vec::with_capacity(inst.n());
    let mut used = vec![false; inst.n()];
    search(inst, &mut perm, &mut used, &mut best);
    best.ok_or_else(|| Error::Infeasible("no order covers every set".into()))
}

fn search(inst: &MsscfInstance, perm: &mut Vec<usize>, used: &mut [bool], best: &mut Option<(Vec<usize>, Q)>) {
    if perm.len() == inst.n() {
        if let Ok(c) = order_cost(inst, perm) {
            if best.as_ref().is_none_or(|(_, b)| &c < b) {
                *best = Some((perm.clone(), c));
            }
        }
        return;
    }
    for e in 0..inst.n() {
        if !used[e] {
            used[e] = true;
            perm.push(e);
            search(inst, perm, used, best);
            perm.pop();
            used[e] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Outcome;
    use crate::rational::{q, qi};

    #[test]
    fn likely_set_first() {
        let o = Outcome::new("x");
        let inst = MsscfInstance::new(
            vec![qi(1), qi(1)],
            vec![q(1, 10), q(9, 10)],
            vec![vec![true, false], vec![false, true]],
            vec![vec![o.clone(), o.clone()], vec![o.clone(), o]],
        );
        let (order, cost) = best_fixed_order(&inst, 8).unwrap();
        assert_eq!(order, vec![1, 0]);
        assert_eq!(cost, q(11, 10));
    }
}
