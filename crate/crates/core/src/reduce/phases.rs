//! PB through repeated PB<=T calls: each phase picks the smallest threshold
//! whose outside-option mass is small, removes the scenarios it covers
//! cheaply, and the phase policies are stitched into one PB policy.

use std::collections::{BTreeMap, BTreeSet};

use log::{debug, warn};
use num::{One, Zero};

use super::expand::{expand, DEFAULT_COPY_CAP};
use crate::error::{Error, Result};
use crate::model::{eval_pb_detail, eval_threshold_detail, ExplicitPbInstance, Outcome, PolicyTree, ThresholdPbInstance};
use crate::oracle::{opt_threshold, OracleConfig};
use crate::rational::{ceil_int, q, sum, Q};

/// Anything that produces a feasible PB<=T policy.
pub trait ThresholdSolver: Sync {
    fn solve(&self, inst: &ThresholdPbInstance) -> Result<PolicyTree>;
}

/// Exact solver backed by the memoized oracle.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactThresholdSolver {
    pub config: OracleConfig,
}

impl ThresholdSolver for ExactThresholdSolver {
    fn solve(&self, inst: &ThresholdPbInstance) -> Result<PolicyTree> {
        Ok(opt_threshold(inst, &self.config)?.policy)
    }
}

#[derive(Clone, Debug)]
pub struct ThresholdSearch {
    pub threshold: Q,
    pub policy: PolicyTree,
    /// Mass (renormalized) of scenarios the policy sends to the outside option.
    pub outside_mass: Q,
    /// False when no grid point met the acceptance fraction; the largest
    /// grid point is returned instead.
    pub satisfied: bool,
}

const SUBSET_SUM_LIMIT: usize = 4096;

/// Candidate thresholds: positive subset sums of the costs (every policy
/// path costs one of these) together with 1, 2, ... up to a value at which
/// covering everything is always cheaper than quitting.
pub fn threshold_grid(inst: &ExplicitPbInstance) -> Vec<Q> {
    let mut grid: BTreeSet<Q> = BTreeSet::new();
    let mut sums: BTreeSet<Q> = BTreeSet::from([Q::zero()]);
    for c in &inst.costs {
        let next: Vec<Q> = sums.iter().map(|s| s + c).collect();
        sums.extend(next);
        if sums.len() > SUBSET_SUM_LIMIT {
            break;
        }
    }
    grid.extend(sums.into_iter().filter(|s| s > &Q::zero()));
    let top = inst.total_cost() + inst.max_finite_value() + Q::one();
    let top = ceil_int(&top);
    let mut k = num::BigInt::one();
    while k <= top {
        grid.insert(Q::from_integer(k.clone()));
        k += 1;
    }
    grid.into_iter().collect()
}

fn outside_mass(inst: &ThresholdPbInstance, policy: &PolicyTree) -> Result<Q> {
    let ev = eval_threshold_detail(inst, policy)?;
    Ok(sum(ev.per_scenario.iter().enumerate().filter(|(_, s)| !s.covered).map(|(j, _)| &inst.base.probs[j])))
}

/// Smallest grid threshold at which the solver's outside-option mass is at
/// most `accept_frac`, by binary search over the grid.
pub fn search_threshold(inst: &ExplicitPbInstance, solver: &dyn ThresholdSolver, accept_frac: &Q) -> Result<ThresholdSearch> {
    let grid = threshold_grid(inst);
    let attempt = |t: &Q| -> Result<ThresholdSearch> {
        let ti = ThresholdPbInstance::new(inst.clone(), t.clone());
        let policy = solver.solve(&ti)?;
        let mass = outside_mass(&ti, &policy)?;
        Ok(ThresholdSearch { threshold: t.clone(), satisfied: &mass <= accept_frac, policy, outside_mass: mass })
    };
    let (mut lo, mut hi) = (0usize, grid.len());
    let mut found: Option<ThresholdSearch> = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let r = attempt(&grid[mid])?;
        if r.satisfied {
            hi = mid;
            found = Some(r);
        } else {
            lo = mid + 1;
        }
    }
    match found {
        Some(r) => Ok(r),
        None => {
            let r = attempt(grid.last().expect("grid is never empty"))?;
            warn!("no threshold reached outside mass <= {accept_frac}; using T = {}", r.threshold);
            Ok(r)
        }
    }
}

/// `search_threshold` on the scenarios in `remaining`, renormalized.
pub fn binary_search_threshold(
    src: &ExplicitPbInstance,
    remaining: &[usize],
    solver: &dyn ThresholdSolver,
    accept_frac: &Q,
) -> Result<ThresholdSearch> {
    if remaining.is_empty() {
        return Err(Error::InvalidInstance("no remaining scenarios".into()));
    }
    search_threshold(&src.restrict(remaining), solver, accept_frac)
}

#[derive(Clone, Debug)]
pub struct PhaseRecord {
    pub threshold: Q,
    /// Scenarios alive when the phase started.
    pub remaining: Vec<usize>,
    /// Scenarios covered at cost `<= threshold`; they leave for good.
    pub removed: Vec<usize>,
    /// Scenarios set aside as low-probability (uniform variant only).
    pub low_prob: Vec<usize>,
    /// Copies in the expanded instance (uniform variant only).
    pub copies: usize,
    /// Renormalized mass of the phase instance not sent outside.
    pub covered_mass: Q,
    pub satisfied: bool,
    pub policy: PolicyTree,
}

#[derive(Clone, Debug)]
pub struct PhasedPolicy {
    pub tree: PolicyTree,
    pub phases: Vec<PhaseRecord>,
    /// Phase in which each scenario stopped; `phases.len()` marks the
    /// open-everything fallback after the last phase.
    pub stop_phase: Vec<usize>,
}

impl PhasedPolicy {
    /// Scenarios whose PB cost exceeds twice the sum of the thresholds up to
    /// the phase in which they stopped: `(scenario, cost, bound)`.
    pub fn ski_rental_violations(&self, src: &ExplicitPbInstance) -> Result<Vec<(usize, Q, Q)>> {
        let ev = eval_pb_detail(src, &self.tree)?;
        let mut out = Vec::new();
        for (j, sc) in ev.per_scenario.iter().enumerate() {
            let upto = self.stop_phase[j].min(self.phases.len().saturating_sub(1));
            let bound = q(2, 1) * sum(self.phases[..=upto].iter().map(|p| &p.threshold));
            let cost = sc.total();
            if cost > bound || self.stop_phase[j] == self.phases.len() {
                out.push((j, cost, bound));
            }
        }
        Ok(out)
    }
}

/// Plain phases: exact renormalization over the remaining scenarios and
/// acceptance fraction 1/5.
pub fn pb_phases(src: &ExplicitPbInstance, solver: &dyn ThresholdSolver) -> Result<PhasedPolicy> {
    let accept = q(1, 5);
    run_phases(src, |phase, remaining| {
        let r = binary_search_threshold(src, remaining, solver, &accept)?;
        let inst = ThresholdPbInstance::new(src.restrict(remaining), r.threshold.clone());
        let ev = eval_threshold_detail(&inst, &r.policy)?;
        let removed = remaining
            .iter()
            .zip(&ev.per_scenario)
            .filter(|(_, s)| s.covered && s.opening <= r.threshold)
            .map(|(&j, _)| j)
            .collect();
        debug!("phase {phase}: T = {}, outside mass {}", r.threshold, r.outside_mass);
        Ok(PhaseRecord {
            covered_mass: Q::one() - &r.outside_mass,
            threshold: r.threshold,
            remaining: remaining.to_vec(),
            removed,
            low_prob: Vec::new(),
            copies: remaining.len(),
            satisfied: r.satisfied,
            policy: r.policy,
        })
    })
}

#[derive(Clone, Debug)]
pub struct UniformPhaseParams {
    /// Scenarios with renormalized probability `<= c/|S|` sit out a phase.
    pub c: Q,
    /// Acceptance fraction for the outside option.
    pub delta: Q,
    pub copy_cap: usize,
}

impl Default for UniformPhaseParams {
    fn default() -> Self {
        UniformPhaseParams { c: q(1, 10), delta: q(1, 10), copy_cap: DEFAULT_COPY_CAP }
    }
}

/// Phases where the solver only ever sees uniform instances: low-mass
/// scenarios are set aside, the rest replicated into equal-probability copies.
pub fn pb_phases_uniform(
    src: &ExplicitPbInstance,
    solver: &dyn ThresholdSolver,
    params: &UniformPhaseParams,
) -> Result<PhasedPolicy> {
    run_phases(src, |phase, remaining| {
        let total = sum(remaining.iter().map(|&j| &src.probs[j]));
        let cut = &params.c / Q::from_integer(remaining.len().into());
        let (low, high): (Vec<usize>, Vec<usize>) =
            remaining.iter().partition(|&&j| &src.probs[j] / &total <= cut);
        let high_probs: Vec<Q> = high.iter().map(|&j| src.probs[j].clone()).collect();
        let ex = expand(&high_probs, params.copy_cap)?;
        let sources: Vec<usize> = ex.copy_source.iter().map(|&k| high[k]).collect();
        let uniform = src.uniform_copies(&sources);
        let r = search_threshold(&uniform, solver, &params.delta)?;
        let inst = ThresholdPbInstance::new(uniform, r.threshold.clone());
        let ev = eval_threshold_detail(&inst, &r.policy)?;
        let removed: BTreeSet<usize> = sources
            .iter()
            .zip(&ev.per_scenario)
            .filter(|(_, s)| s.covered && s.opening <= r.threshold)
            .map(|(&j, _)| j)
            .collect();
        debug!("uniform phase {phase}: {} low, {} copies, T = {}", low.len(), ex.total(), r.threshold);
        Ok(PhaseRecord {
            covered_mass: Q::one() - &r.outside_mass,
            threshold: r.threshold,
            remaining: remaining.to_vec(),
            removed: removed.into_iter().collect(),
            low_prob: low,
            copies: ex.total(),
            satisfied: r.satisfied,
            policy: r.policy,
        })
    })
}

fn run_phases(
    src: &ExplicitPbInstance,
    mut plan: impl FnMut(usize, &[usize]) -> Result<PhaseRecord>,
) -> Result<PhasedPolicy> {
    if let Some(&j) = src.hopeless_scenarios().first() {
        return Err(Error::Infeasible(format!("scenario {j} has no finite value")));
    }
    let mut remaining: Vec<usize> = (0..src.m()).collect();
    let mut phases = Vec::new();
    while !remaining.is_empty() {
        if phases.len() >= src.m() {
            return Err(Error::Stalled { phase: phases.len() });
        }
        let rec = plan(phases.len(), &remaining)?;
        if rec.removed.is_empty() {
            return Err(Error::Stalled { phase: phases.len() });
        }
        remaining.retain(|j| !rec.removed.contains(j));
        phases.push(rec);
    }
    let mut st = Stitcher { src, phases: &phases, stop_phase: vec![usize::MAX; src.m()] };
    let all: Vec<usize> = (0..src.m()).collect();
    let tree = st.stitch(0, &phases[0].policy, &all, &BTreeMap::new(), Q::zero(), None)?;
    let stop_phase = st.stop_phase;
    Ok(PhasedPolicy { tree, phases, stop_phase })
}

struct Stitcher<'a> {
    src: &'a ExplicitPbInstance,
    phases: &'a [PhaseRecord],
    stop_phase: Vec<usize>,
}

impl Stitcher<'_> {
    /// Follows phase `i`'s policy from `node`. `spend` is what phase `i` has
    /// paid so far, `best` the smallest value revealed on the path.
    fn stitch(
        &mut self,
        i: usize,
        node: &PolicyTree,
        live: &[usize],
        opened: &BTreeMap<usize, Outcome>,
        spend: Q,
        best: Option<Q>,
    ) -> Result<PolicyTree> {
        let t = &self.phases[i].threshold;
        if best.as_ref().is_some_and(|b| b <= t) {
            for &j in live {
                self.stop_phase[j] = i;
            }
            return Ok(PolicyTree::StopWithBest);
        }
        let PolicyTree::Act { action, children } = node else {
            return self.next_phase(i, live, opened, best);
        };
        let b = *action;
        if b >= self.src.n() {
            return Err(Error::MalformedPolicy(format!("box {b} out of range")));
        }
        if let Some(label) = opened.get(&b) {
            return match children.get(label) {
                Some(child) => self.stitch(i, child, live, opened, spend, best),
                None => self.next_phase(i, live, opened, best),
            };
        }
        let paid = &spend + &self.src.costs[b];
        if &paid > t {
            return self.next_phase(i, live, opened, best);
        }
        let mut out = BTreeMap::new();
        for (label, group) in classes(self.src, b, live) {
            let mut seen = opened.clone();
            seen.insert(b, label.clone());
            let nb = min_opt(best.clone(), self.src.values[b][group[0]].as_finite());
            let sub = match children.get(&label) {
                Some(child) => self.stitch(i, child, &group, &seen, paid.clone(), nb)?,
                None => self.next_phase(i, &group, &seen, nb)?,
            };
            out.insert(label, sub);
        }
        Ok(PolicyTree::Act { action: b, children: out })
    }

    fn next_phase(
        &mut self,
        i: usize,
        live: &[usize],
        opened: &BTreeMap<usize, Outcome>,
        best: Option<Q>,
    ) -> Result<PolicyTree> {
        if i + 1 < self.phases.len() {
            let phases = self.phases;
            return self.stitch(i + 1, &phases[i + 1].policy, live, opened, Q::zero(), best);
        }
        self.open_rest(live, opened)
    }

    fn open_rest(&mut self, live: &[usize], opened: &BTreeMap<usize, Outcome>) -> Result<PolicyTree> {
        let Some(b) = (0..self.src.n()).find(|b| !opened.contains_key(b)) else {
            for &j in live {
                self.stop_phase[j] = self.phases.len();
            }
            return Ok(PolicyTree::StopWithBest);
        };
        let mut out = BTreeMap::new();
        for (label, group) in classes(self.src, b, live) {
            let mut seen = opened.clone();
            seen.insert(b, label.clone());
            out.insert(label, self.open_rest(&group, &seen)?);
        }
        Ok(PolicyTree::Act { action: b, children: out })
    }
}

fn classes(src: &ExplicitPbInstance, b: usize, live: &[usize]) -> BTreeMap<Outcome, Vec<usize>> {
    let mut out: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
    for &j in live {
        out.entry(src.values[b][j].label()).or_default().push(j);
    }
    out
}

fn min_opt(a: Option<Q>, b: Option<&Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if &x <= y { x } else { y.clone() }),
        (None, Some(y)) => Some(y.clone()),
        (x, None) => x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_pb, Value};
    use crate::oracle::opt_pb;
    use crate::rational::qi;

    fn f(n: i64) -> Value {
        Value::Finite(qi(n))
    }

    fn two_by_two() -> ExplicitPbInstance {
        ExplicitPbInstance::new(vec![qi(1), qi(1)], vec![q(1, 2), q(1, 2)], vec![vec![f(0), f(10)], vec![f(10), f(0)]])
    }

    #[test]
    fn single_box_threshold_is_one() {
        let src = ExplicitPbInstance::new(vec![qi(1)], vec![qi(1)], vec![vec![f(0)]]);
        let r = binary_search_threshold(&src, &[0], &ExactThresholdSolver::default(), &q(1, 5)).unwrap();
        assert_eq!(r.threshold, qi(1));
    }

    #[test]
    fn vacuous_acceptance_gives_smallest_candidate() {
        let src = two_by_two();
        let r = binary_search_threshold(&src, &[0, 1], &ExactThresholdSolver::default(), &qi(1)).unwrap();
        assert_eq!(r.threshold, threshold_grid(&src)[0]);
    }

    #[test]
    fn two_by_two_threshold_is_two() {
        let r = binary_search_threshold(&two_by_two(), &[0, 1], &ExactThresholdSolver::default(), &q(1, 5)).unwrap();
        assert_eq!(r.threshold, qi(2));
        assert!(r.satisfied);
    }

    #[test]
    fn single_scenario_is_one_phase() {
        let src = ExplicitPbInstance::new(vec![qi(2), qi(1)], vec![qi(1)], vec![vec![f(3)], vec![f(1)]]);
        let out = pb_phases(&src, &ExactThresholdSolver::default()).unwrap();
        assert_eq!(out.phases.len(), 1);
        let uni = pb_phases_uniform(&src, &ExactThresholdSolver::default(), &UniformPhaseParams::default()).unwrap();
        assert_eq!(uni.tree, out.tree);
    }

    #[test]
    fn two_by_two_within_ski_rental() {
        let src = two_by_two();
        let out = pb_phases(&src, &ExactThresholdSolver::default()).unwrap();
        let opt = opt_pb(&src, &OracleConfig::default()).unwrap().cost;
        assert!(eval_pb(&src, &out.tree).unwrap() <= qi(2) * opt);
        for p in &out.phases {
            assert!(p.covered_mass >= q(4, 5));
        }
        assert!(out.ski_rental_violations(&src).unwrap().is_empty());
    }

    #[test]
    fn low_probability_scenario_sits_out() {
        let src = ExplicitPbInstance::new(vec![qi(1), qi(1)], vec![q(99, 100), q(1, 100)], vec![vec![f(0), f(5)], vec![f(5), f(0)]]);
        let out = pb_phases_uniform(&src, &ExactThresholdSolver::default(), &UniformPhaseParams::default()).unwrap();
        assert_eq!(out.phases[0].low_prob, vec![1]);
        eval_pb(&src, &out.tree).unwrap();
    }
}
