//! Exact evaluation and brute-force optima for mixture instances, by
//! enumerating observation histories.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::{One, Zero};

use super::instance::MixtureInstance;
use crate::error::{Error, Result};
use crate::model::{ExplicitPbInstance, Outcome, PolicyTree, Value};
use crate::rational::Q;

pub const HISTORY_CAP: usize = 200_000;

pub(crate) fn label(v: &Q) -> Outcome {
    Value::Finite(v.clone()).label()
}

/// Every value box `b` can show under any component.
pub(crate) fn box_support(inst: &MixtureInstance, b: usize) -> BTreeSet<&Q> {
    inst.dists[b].iter().flat_map(|d| d.support()).collect()
}

/// Expected cost of a PB<=T policy when component `comp` is the truth.
pub fn component_threshold_cost(inst: &MixtureInstance, t: &Q, tree: &PolicyTree, comp: usize) -> Result<Q> {
    match tree {
        PolicyTree::TakeOutside => Ok(t.clone()),
        PolicyTree::StopWithBest => Err(Error::Infeasible("threshold policy stops without a value <= T".into())),
        PolicyTree::Identified(_) => Err(Error::MalformedPolicy("Identified leaf in a threshold policy".into())),
        PolicyTree::Act { action, children } => {
            let b = *action;
            if b >= inst.n() {
                return Err(Error::MalformedPolicy(format!("box {b} out of range")));
            }
            let mut total = inst.costs[b].clone();
            for (v, p) in inst.dist(b, comp).points() {
                if v <= t {
                    continue;
                }
                let child = children
                    .get(&label(v))
                    .ok_or_else(|| Error::MalformedPolicy(format!("no child {} at box {b}", label(v))))?;
                if matches!(child, PolicyTree::Act { action, .. } if *action == b) {
                    return Err(Error::MalformedPolicy(format!("box {b} opened twice")));
                }
                total += p * component_threshold_cost(inst, t, child, comp)?;
            }
            Ok(total)
        }
    }
}

/// Exact expected PB<=T cost under the mixture.
pub fn eval_mixture_threshold(inst: &MixtureInstance, t: &Q, tree: &PolicyTree) -> Result<Q> {
    let mut total = Q::zero();
    for (j, w) in inst.weights.iter().enumerate() {
        total += w * component_threshold_cost(inst, t, tree, j)?;
    }
    Ok(total)
}

/// Exact expected PB cost (openings plus smallest value seen) under the mixture.
pub fn eval_mixture_pb(inst: &MixtureInstance, tree: &PolicyTree) -> Result<Q> {
    fn go(inst: &MixtureInstance, tree: &PolicyTree, comp: usize, best: Option<&Q>, depth: usize) -> Result<Q> {
        match tree {
            PolicyTree::StopWithBest => {
                best.cloned().ok_or_else(|| Error::Infeasible("policy stops before opening a box".into()))
            }
            PolicyTree::Act { action, children } => {
                let b = *action;
                if b >= inst.n() || depth >= inst.n() {
                    return Err(Error::MalformedPolicy(format!("box {b} out of range or reopened")));
                }
                let mut total = inst.costs[b].clone();
                for (v, p) in inst.dist(b, comp).points() {
                    let child = children
                        .get(&label(v))
                        .ok_or_else(|| Error::MalformedPolicy(format!("no child {} at box {b}", label(v))))?;
                    let nb = match best {
                        Some(x) if x <= v => x,
                        _ => v,
                    };
                    total += p * go(inst, child, comp, Some(nb), depth + 1)?;
                }
                Ok(total)
            }
            other => Err(Error::MalformedPolicy(format!("unexpected leaf {other:?} in a PB policy"))),
        }
    }
    let mut total = Q::zero();
    for (j, w) in inst.weights.iter().enumerate() {
        total += w * go(inst, tree, j, None, 0)?;
    }
    Ok(total)
}

/// Value vectors with their mixture probabilities, identical vectors merged.
pub fn to_explicit(inst: &MixtureInstance, cap: usize) -> Result<ExplicitPbInstance> {
    let mut rows: BTreeMap<Vec<Q>, Q> = BTreeMap::new();
    for (j, w) in inst.weights.iter().enumerate() {
        let mut partial: Vec<(Vec<Q>, Q)> = vec![(Vec::new(), w.clone())];
        for b in 0..inst.n() {
            let mut next = Vec::new();
            for (vals, p) in &partial {
                for (v, pv) in inst.dist(b, j).points() {
                    let mut vs = vals.clone();
                    vs.push(v.clone());
                    next.push((vs, p * pv));
                }
            }
            if next.len() > cap {
                return Err(Error::CapExceeded { what: "mixture scenarios", got: next.len(), cap });
            }
            partial = next;
        }
        for (vals, p) in partial {
            *rows.entry(vals).or_insert_with(Q::zero) += p;
        }
    }
    if rows.len() > cap {
        return Err(Error::CapExceeded { what: "mixture scenarios", got: rows.len(), cap });
    }
    let probs: Vec<Q> = rows.values().cloned().collect();
    let values = (0..inst.n()).map(|b| rows.keys().map(|vs| Value::Finite(vs[b].clone())).collect()).collect();
    Ok(ExplicitPbInstance::new(inst.costs.clone(), probs, values))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Objective<'a> {
    Threshold(&'a Q),
    Pb,
}

/// Memoized search over histories. Costs are kept unnormalized, scaled by
/// the probability of the history, so no division is needed.
struct Brute<'a> {
    inst: &'a MixtureInstance,
    objective: Objective<'a>,
    memo: HashMap<Vec<Option<Q>>, (Q, Option<usize>)>,
}

impl Brute<'_> {
    fn weight(&self, hist: &[Option<Q>]) -> Q {
        let mut total = Q::zero();
        for (j, w) in self.inst.weights.iter().enumerate() {
            let mut p = w.clone();
            for (b, v) in hist.iter().enumerate() {
                if let Some(v) = v {
                    p *= self.inst.dist(b, j).prob(v);
                }
            }
            total += p;
        }
        total
    }

    fn stop_value(&self, hist: &[Option<Q>], w: &Q) -> Option<Q> {
        match self.objective {
            Objective::Threshold(t) => Some(t * w),
            Objective::Pb => hist.iter().flatten().min().map(|v| v * w),
        }
    }

    fn solve(&mut self, hist: &mut Vec<Option<Q>>) -> Result<Q> {
        if let Some((c, _)) = self.memo.get(hist) {
            return Ok(c.clone());
        }
        if self.memo.len() >= HISTORY_CAP {
            return Err(Error::StateBudget(HISTORY_CAP));
        }
        let w = self.weight(hist);
        let mut best = self.stop_value(hist, &w);
        let mut choice = None;
        for b in 0..self.inst.n() {
            if hist[b].is_some() {
                continue;
            }
            let mut cost = &self.inst.costs[b] * &w;
            if best.as_ref().is_some_and(|x| &cost >= x) {
                continue;
            }
            let support: Vec<Q> = box_support(self.inst, b).into_iter().cloned().collect();
            for v in support {
                if let Objective::Threshold(t) = self.objective {
                    if &v <= t {
                        continue;
                    }
                }
                hist[b] = Some(v);
                if !self.weight(hist).is_zero() {
                    cost += self.solve(hist)?;
                }
                hist[b] = None;
            }
            if best.as_ref().is_none_or(|x| &cost < x) {
                best = Some(cost);
                choice = Some(b);
            }
        }
        let best = best.ok_or_else(|| Error::Infeasible("no box to open".into()))?;
        self.memo.insert(hist.clone(), (best.clone(), choice));
        Ok(best)
    }

    fn tree(&self, hist: &mut Vec<Option<Q>>) -> PolicyTree {
        let Some(&(_, Some(b))) = self.memo.get(hist) else {
            return match self.objective {
                Objective::Threshold(_) => PolicyTree::TakeOutside,
                Objective::Pb => PolicyTree::StopWithBest,
            };
        };
        let support: Vec<Q> = box_support(self.inst, b).into_iter().cloned().collect();
        let mut children = BTreeMap::new();
        for v in support {
            let lab = label(&v);
            if let Objective::Threshold(t) = self.objective {
                if &v <= t {
                    children.insert(lab, PolicyTree::StopWithBest);
                    continue;
                }
            }
            hist[b] = Some(v);
            if !self.weight(hist).is_zero() {
                children.insert(lab, self.tree(hist));
            }
            hist[b] = None;
        }
        PolicyTree::Act { action: b, children }
    }
}

fn brute(inst: &MixtureInstance, objective: Objective) -> Result<(Q, PolicyTree)> {
    let bad = inst.violations();
    if let Some(v) = bad.first() {
        return Err(Error::InvalidInstance(v.to_string()));
    }
    let mut b = Brute { inst, objective, memo: HashMap::new() };
    let mut hist = vec![None; inst.n()];
    let cost = b.solve(&mut hist)?;
    let tree = b.tree(&mut hist);
    Ok((cost, tree))
}

/// Optimal adaptive PB<=T policy by exhaustive search over histories.
pub fn opt_mixture_threshold(inst: &MixtureInstance, t: &Q) -> Result<(Q, PolicyTree)> {
    brute(inst, Objective::Threshold(t))
}

/// Optimal adaptive PB policy by exhaustive search over histories.
pub fn opt_mixture_pb(inst: &MixtureInstance) -> Result<(Q, PolicyTree)> {
    brute(inst, Objective::Pb)
}

/// Component weights renormalized over `live`.
pub(crate) fn restricted_prior(inst: &MixtureInstance, live: &[usize]) -> Vec<Q> {
    let total: Q = live.iter().map(|&j| &inst.weights[j]).fold(Q::zero(), |a, w| a + w);
    let mut out = vec![Q::zero(); inst.m()];
    for &j in live {
        out[j] = if total.is_zero() { Q::one() / Q::from_integer(live.len().into()) } else { &inst.weights[j] / &total };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::Dist;
    use crate::model::{eval_pb, eval_threshold, ThresholdPbInstance};
    use crate::oracle::{opt_pb, opt_threshold, OracleConfig};
    use crate::rational::{q, qi};

    fn two_point(lo: i64, hi: i64, p: Q) -> Dist {
        Dist::new([(qi(lo), p.clone()), (qi(hi), Q::one() - p)])
    }

    fn sample() -> MixtureInstance {
        MixtureInstance::new(
            vec![qi(1), qi(2)],
            vec![q(1, 3), q(2, 3)],
            vec![
                vec![two_point(0, 5, q(3, 4)), two_point(0, 5, q(1, 4))],
                vec![two_point(1, 4, q(1, 2)), two_point(1, 4, q(1, 2))],
            ],
            q(1, 2),
        )
    }

    #[test]
    fn explicit_expansion_merges_vectors() {
        let ex = to_explicit(&sample(), 100).unwrap();
        assert_eq!(ex.m(), 4);
        assert!(ex.violations().is_empty());
    }

    #[test]
    fn brute_force_matches_explicit_oracle() {
        let inst = sample();
        let ex = to_explicit(&inst, 100).unwrap();
        let cfg = OracleConfig::default();
        for t in [qi(1), qi(2), qi(3), qi(6)] {
            let (c, tree) = opt_mixture_threshold(&inst, &t).unwrap();
            let tinst = ThresholdPbInstance::new(ex.clone(), t.clone());
            assert_eq!(c, opt_threshold(&tinst, &cfg).unwrap().cost);
            assert_eq!(eval_mixture_threshold(&inst, &t, &tree).unwrap(), c);
            assert_eq!(eval_threshold(&tinst, &tree).unwrap(), c);
        }
        let (c, tree) = opt_mixture_pb(&inst).unwrap();
        assert_eq!(c, opt_pb(&ex, &cfg).unwrap().cost);
        assert_eq!(eval_mixture_pb(&inst, &tree).unwrap(), c);
        assert_eq!(eval_pb(&ex, &tree).unwrap(), c);
    }

    #[test]
    fn outside_when_boxes_cost_more() {
        let (c, tree) = opt_mixture_threshold(&sample(), &q(1, 2)).unwrap();
        assert_eq!(c, q(1, 2));
        assert_eq!(tree, PolicyTree::TakeOutside);
    }
}
