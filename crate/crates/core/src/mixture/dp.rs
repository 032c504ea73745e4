//! Dynamic program for PB<=T under a mixture of product distributions:
//! informative boxes gather evidence that eliminates components, the rest
//! are opened in a fixed greedy order.

use std::collections::{BTreeMap, HashMap};

use log::debug;
use num::{Signed, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand_chacha::ChaCha8Rng;

use super::enumerate::{box_support, component_threshold_cost, eval_mixture_threshold, label, restricted_prior};
use super::evidence::{classify_boxes, eliminate, elimination_threshold, noninformative_order, update_evidence, Evidence};
use super::instance::MixtureInstance;
use crate::error::{Error, Result};
use crate::model::{CostSampler, PolicyTree};
use crate::rational::{to_f64, Q};

#[derive(Clone, Copy, Debug)]
pub struct DpConfig {
    /// Memo entries plus materialized policy nodes.
    pub max_states: usize,
    pub memo: bool,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig { max_states: 2_000_000, memo: true }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    opened: u64,
    informative: u32,
    evidence: Evidence,
    live: Vec<usize>,
    /// Indexed by component; zero outside `live`.
    posterior: Vec<Q>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Choice {
    Outside,
    Open(usize),
}

struct Classes {
    informative: Vec<bool>,
    order: Vec<usize>,
}

struct Dp<'a> {
    inst: &'a MixtureInstance,
    t: &'a Q,
    delta: Q,
    budget: f64,
    config: DpConfig,
    memo: HashMap<State, (Q, Choice)>,
    classes: HashMap<Vec<usize>, Classes>,
    evaluations: usize,
    nodes: usize,
}

impl Dp<'_> {
    fn classes(&mut self, live: &[usize]) -> Result<&Classes> {
        if !self.classes.contains_key(live) {
            let (ib, _) = classify_boxes(self.inst, live)?;
            let mut informative = vec![false; self.inst.n()];
            for b in ib {
                informative[b] = true;
            }
            let order = noninformative_order(self.inst, live, self.t)?;
            self.classes.insert(live.to_vec(), Classes { informative, order });
        }
        Ok(&self.classes[live])
    }

    fn tick(&mut self) -> Result<()> {
        self.evaluations += 1;
        if self.memo.len() + self.nodes > self.config.max_states {
            return Err(Error::StateBudget(self.config.max_states));
        }
        Ok(())
    }

    /// The state after value `v` turns up in box `b`.
    fn next(&mut self, st: &State, b: usize, v: &Q) -> Result<State> {
        let informative = self.classes(&st.live)?.informative[b];
        let mut evidence = st.evidence.clone();
        let mut live = st.live.clone();
        if informative {
            evidence = update_evidence(&st.evidence, b, v, self.inst, &st.live);
            live = eliminate(&evidence, &st.live, self.inst, &self.delta);
        }
        let mut posterior = vec![Q::zero(); self.inst.m()];
        for &j in &live {
            posterior[j] = &st.posterior[j] * self.inst.dist(b, j).prob(v);
        }
        let total: Q = posterior.iter().fold(Q::zero(), |a, p| a + p);
        if total.is_zero() {
            posterior = restricted_prior(self.inst, &live);
        } else {
            for p in &mut posterior {
                *p /= &total;
            }
        }
        Ok(State {
            opened: st.opened | (1 << b),
            informative: st.informative + u32::from(informative),
            evidence,
            live,
            posterior,
        })
    }

    fn candidates(&mut self, st: &State) -> Result<Vec<usize>> {
        let may_probe = f64::from(st.informative) < self.budget;
        let n = self.inst.n();
        let cls = self.classes(&st.live)?;
        let mut out: Vec<usize> = (0..n)
            .filter(|&b| cls.informative[b] && may_probe && st.opened & (1 << b) == 0)
            .collect();
        if let Some(&b) = cls.order.iter().find(|&&b| st.opened & (1 << b) == 0) {
            out.push(b);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Cost of opening `b` and then acting optimally, excluding `c_b`.
    fn nature(&mut self, st: &State, b: usize) -> Result<Q> {
        let support: Vec<Q> = box_support(self.inst, b).into_iter().cloned().collect();
        let mut total = Q::zero();
        for v in support {
            if &v <= self.t {
                continue;
            }
            let pv = st.live.iter().fold(Q::zero(), |a, &j| a + &st.posterior[j] * self.inst.dist(b, j).prob(&v));
            if pv.is_zero() {
                continue;
            }
            let nx = self.next(st, b, &v)?;
            total += pv * self.solve(&nx)?.0;
        }
        Ok(total)
    }

    fn solve(&mut self, st: &State) -> Result<(Q, Choice)> {
        if self.config.memo {
            if let Some(hit) = self.memo.get(st) {
                return Ok(hit.clone());
            }
        }
        self.tick()?;
        let mut best = (self.t.clone(), Choice::Outside);
        for b in self.candidates(st)? {
            let c = &self.inst.costs[b];
            if c >= &best.0 {
                continue;
            }
            let cost = c + self.nature(st, b)?;
            if cost < best.0 {
                best = (cost, Choice::Open(b));
            }
        }
        if self.config.memo {
            self.memo.insert(st.clone(), best.clone());
        }
        Ok(best)
    }

    /// Materializes the policy, with a branch for every value any
    /// component can produce (the true component may have been eliminated).
    fn build(&mut self, st: &State) -> Result<PolicyTree> {
        self.nodes += 1;
        self.tick()?;
        let Choice::Open(b) = self.solve(st)?.1 else {
            return Ok(PolicyTree::TakeOutside);
        };
        let support: Vec<Q> = box_support(self.inst, b).into_iter().cloned().collect();
        let mut children = BTreeMap::new();
        for v in support {
            let child = if &v <= self.t {
                PolicyTree::StopWithBest
            } else {
                let nx = self.next(st, b, &v)?;
                self.build(&nx)?
            };
            children.insert(label(&v), child);
        }
        Ok(PolicyTree::Act { action: b, children })
    }
}

/// A threshold policy for a mixture instance, with exact and sampled
/// evaluation under the true mixture.
#[derive(Clone, Debug)]
pub struct MixturePolicy {
    inst: MixtureInstance,
    threshold: Q,
    tree: PolicyTree,
}

impl MixturePolicy {
    pub fn new(inst: MixtureInstance, threshold: Q, tree: PolicyTree) -> Self {
        MixturePolicy { inst, threshold, tree }
    }

    pub fn tree(&self) -> &PolicyTree {
        &self.tree
    }

    pub fn threshold(&self) -> &Q {
        &self.threshold
    }

    pub fn expected_cost(&self) -> Result<Q> {
        eval_mixture_threshold(&self.inst, &self.threshold, &self.tree)
    }

    pub fn component_cost(&self, comp: usize) -> Result<Q> {
        component_threshold_cost(&self.inst, &self.threshold, &self.tree, comp)
    }
}

impl CostSampler for MixturePolicy {
    fn sample_cost(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let pick = |probs: Vec<f64>, rng: &mut ChaCha8Rng| -> Result<usize> {
            let w = WeightedIndex::new(probs).map_err(|e| Error::InvalidInstance(e.to_string()))?;
            Ok(w.sample(rng))
        };
        let comp = pick(self.inst.weights.iter().map(to_f64).collect(), rng)?;
        let mut cost = 0.0;
        let mut node = &self.tree;
        loop {
            match node {
                PolicyTree::TakeOutside => return Ok(cost + to_f64(&self.threshold)),
                PolicyTree::Act { action, children } => {
                    let d = self.inst.dist(*action, comp);
                    cost += to_f64(&self.inst.costs[*action]);
                    let (v, _) = &d.points()[pick(d.points().iter().map(|(_, p)| to_f64(p)).collect(), rng)?];
                    if v <= &self.threshold {
                        return Ok(cost);
                    }
                    node = children
                        .get(&label(v))
                        .ok_or_else(|| Error::MalformedPolicy(format!("no child {} at box {action}", label(v))))?;
                }
                other => return Err(Error::MalformedPolicy(format!("unexpected leaf {other:?}"))),
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct DpSolution {
    pub policy: MixturePolicy,
    /// The program's own value: expectations under the posterior restricted
    /// to the surviving components.
    pub dp_cost: Q,
    /// Exact expected cost of the policy under the true mixture.
    pub expected_cost: Q,
    pub states: usize,
    /// Informative openings allowed on any path.
    pub budget: f64,
    pub delta: Q,
}

/// `delta = beta * c_min / (m^2 T)`.
pub fn dp_delta(inst: &MixtureInstance, t: &Q, beta: &Q) -> Q {
    let m2 = Q::from_integer((inst.m() * inst.m()).into());
    beta * inst.min_cost() / (m2 * t)
}

/// `(m^2 / epsilon^2) ln(1/delta)`, never negative.
pub fn informative_budget(inst: &MixtureInstance, delta: &Q) -> f64 {
    let m2 = (inst.m() * inst.m()) as f64;
    (m2 * elimination_threshold(&inst.epsilon, delta)).max(0.0)
}

pub fn dp_solve(inst: &MixtureInstance, t: &Q, beta: &Q, config: &DpConfig) -> Result<DpSolution> {
    if let Some(v) = inst.violations().first() {
        return Err(Error::InvalidInstance(v.to_string()));
    }
    if !beta.is_positive() {
        return Err(Error::InvalidInstance("beta must be positive".into()));
    }
    if t.is_negative() {
        return Err(Error::InvalidInstance("negative threshold".into()));
    }
    if inst.n() > 63 {
        return Err(Error::CapExceeded { what: "boxes", got: inst.n(), cap: 63 });
    }
    if t.is_zero() {
        let policy = MixturePolicy::new(inst.clone(), t.clone(), PolicyTree::TakeOutside);
        return Ok(DpSolution { policy, dp_cost: Q::zero(), expected_cost: Q::zero(), states: 0, budget: 0.0, delta: Q::zero() });
    }
    let delta = dp_delta(inst, t, beta);
    let budget = informative_budget(inst, &delta);
    let live: Vec<usize> = (0..inst.m()).collect();
    let root = State {
        opened: 0,
        informative: 0,
        evidence: Evidence::new(inst.m()),
        posterior: restricted_prior(inst, &live),
        live,
    };
    let mut dp = Dp {
        inst,
        t,
        delta: delta.clone(),
        budget,
        config: *config,
        memo: HashMap::new(),
        classes: HashMap::new(),
        evaluations: 0,
        nodes: 0,
    };
    let (dp_cost, _) = dp.solve(&root)?;
    let tree = dp.build(&root)?;
    let policy = MixturePolicy::new(inst.clone(), t.clone(), tree);
    let expected_cost = policy.expected_cost()?;
    let states = if config.memo { dp.memo.len() } else { dp.evaluations };
    debug!("dp at T = {t}: value {dp_cost}, true cost {expected_cost}, {states} states, L = {budget:.1}");
    Ok(DpSolution { policy, dp_cost, expected_cost, states, budget, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::enumerate::opt_mixture_threshold;
    use crate::mixture::Dist;
    use crate::model::simulate;
    use crate::rational::{q, qi};

    fn two_point(lo: i64, hi: i64, p: Q) -> Dist {
        Dist::new([(qi(lo), p.clone()), (qi(hi), Q::from_integer(1.into()) - p)])
    }

    fn single_component() -> MixtureInstance {
        MixtureInstance::new(
            vec![qi(1), qi(2)],
            vec![qi(1)],
            vec![vec![two_point(0, 5, q(1, 2))], vec![two_point(1, 5, q(3, 4))]],
            qi(1),
        )
    }

    #[test]
    fn single_component_greedy_chain() {
        let inst = single_component();
        let sol = dp_solve(&inst, &qi(3), &q(1, 2), &DpConfig::default()).unwrap();
        // box 0 (ratio 1/2) then box 1 (ratio 3/8): 1 + 1/2 (2 + 1/4 * 3)
        let chain = qi(1) + q(1, 2) * (qi(2) + q(1, 4) * qi(3));
        assert_eq!(sol.dp_cost, chain.clone().min(qi(3)));
        assert_eq!(sol.expected_cost, sol.dp_cost);
    }

    #[test]
    fn cheap_threshold_takes_outside() {
        let inst = single_component();
        let sol = dp_solve(&inst, &qi(1), &q(1, 2), &DpConfig::default()).unwrap();
        assert_eq!(sol.dp_cost, qi(1));
        assert_eq!(*sol.policy.tree(), PolicyTree::TakeOutside);
    }

    fn disjoint_pair() -> MixtureInstance {
        // box 0 identifies the component; boxes 1, 2 each pay off under one
        let d = |lo: i64, hi: i64, p: Q| two_point(lo, hi, p);
        MixtureInstance::new(
            vec![qi(1), qi(1), qi(1)],
            vec![q(1, 2), q(1, 2)],
            vec![
                vec![Dist::point(qi(7)), Dist::point(qi(8))],
                vec![d(0, 9, q(9, 10)), d(0, 9, q(1, 10))],
                vec![d(0, 9, q(1, 10)), d(0, 9, q(9, 10))],
            ],
            q(4, 5),
        )
    }

    #[test]
    fn within_beta_of_enumeration() {
        let inst = disjoint_pair();
        let beta = q(1, 2);
        let t = qi(3);
        let sol = dp_solve(&inst, &t, &beta, &DpConfig::default()).unwrap();
        let (opt, _) = opt_mixture_threshold(&inst, &t).unwrap();
        assert!(sol.expected_cost >= opt);
        assert!(sol.expected_cost <= (qi(1) + beta) * opt);
    }

    #[test]
    fn memo_off_agrees() {
        let inst = disjoint_pair();
        let a = dp_solve(&inst, &qi(3), &q(1, 2), &DpConfig::default()).unwrap();
        let b = dp_solve(&inst, &qi(3), &q(1, 2), &DpConfig { memo: false, ..DpConfig::default() }).unwrap();
        assert_eq!(a.dp_cost, b.dp_cost);
        assert_eq!(a.policy.tree(), b.policy.tree());
    }

    #[test]
    fn sampling_agrees_with_exact() {
        let sol = dp_solve(&disjoint_pair(), &qi(3), &q(1, 2), &DpConfig::default()).unwrap();
        let stats = simulate(&sol.policy, 20_000, 7).unwrap();
        assert!(stats.agrees_with(to_f64(&sol.expected_cost), 4.0));
    }
}
