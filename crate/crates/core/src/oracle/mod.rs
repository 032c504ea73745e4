//! Exact optimal policies by memoized search over information states.
//! Exponential in the instance size; meant as ground truth on small inputs.

mod dt;
mod msscf;
pub mod order;
mod pb;
mod threshold;

pub use dt::opt_dt;
pub use msscf::opt_msscf;
pub use order::{best_fixed_order, order_cost};
pub use pb::opt_pb;
pub use threshold::opt_threshold;

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use num::Zero;

use crate::error::{Error, Result};
use crate::model::{Host, Outcome, PolicyTree};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_actions: usize,
    pub max_scenarios: usize,
    /// Upper bound on distinct memoized states.
    pub max_states: usize,
    pub memo: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_actions: 12, max_scenarios: 12, max_states: 4_000_000, memo: true }
    }
}

impl OracleConfig {
    pub fn without_memo() -> Self {
        OracleConfig { memo: false, ..Self::default() }
    }

    pub fn check<H: Host + ?Sized>(&self, host: &H) -> Result<()> {
        if host.num_actions() > self.max_actions {
            return Err(Error::CapExceeded { what: "actions", got: host.num_actions(), cap: self.max_actions });
        }
        if host.num_scenarios() > self.max_scenarios {
            return Err(Error::CapExceeded { what: "scenarios", got: host.num_scenarios(), cap: self.max_scenarios });
        }
        if host.num_scenarios() > 63 || host.num_actions() > 63 {
            return Err(Error::CapExceeded { what: "bitmask width", got: host.num_scenarios().max(host.num_actions()), cap: 63 });
        }
        Ok(())
    }
}

/// An optimal policy and its exact expected cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub policy: PolicyTree,
    pub cost: Q,
    /// Memo entries created while solving.
    pub states: usize,
}

pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let k = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(k)
        }
    })
}

/// Labels and masses precomputed from a host so the search never allocates
/// label strings in its inner loop.
pub(crate) struct Table {
    pub labels: Vec<Vec<Outcome>>,
    pub costs: Vec<Q>,
    probs: Vec<Q>,
}

impl Table {
    pub fn new<H: Host + ?Sized>(host: &H) -> Self {
        Table {
            labels: (0..host.num_actions()).map(|a| (0..host.num_scenarios()).map(|j| host.label(a, j)).collect()).collect(),
            costs: (0..host.num_actions()).map(|a| host.cost(a).clone()).collect(),
            probs: (0..host.num_scenarios()).map(|j| host.prob(j).clone()).collect(),
        }
    }

    pub fn mass(&self, mask: u64) -> Q {
        bits(mask).fold(Q::zero(), |acc, j| acc + &self.probs[j])
    }

    pub fn prob(&self, j: usize) -> &Q {
        &self.probs[j]
    }

    pub fn classes(&self, a: usize, mask: u64) -> BTreeMap<&Outcome, u64> {
        let mut out: BTreeMap<&Outcome, u64> = BTreeMap::new();
        for j in bits(mask) {
            *out.entry(&self.labels[a][j]).or_insert(0) |= 1 << j;
        }
        out
    }
}

pub(crate) enum Branch<S> {
    Done(PolicyTree),
    Continue(S),
}

/// One problem's recursion: terminal options and the outcome split of
/// every action. Costs are unnormalized (weighted by state mass).
pub(crate) trait Search {
    type State: Clone + Eq + Hash;
    fn num_actions(&self) -> usize;
    /// The cheapest way to end here, if ending is allowed.
    fn terminal(&self, st: &Self::State) -> Option<(Q, PolicyTree)>;
    /// `c_a` times the state's mass.
    fn action_cost(&self, st: &Self::State, a: usize) -> Q;
    /// Outcome split of `a`, or `None` when `a` is unavailable or cannot
    /// change anything that matters from this state.
    fn expand(&self, st: &Self::State, a: usize) -> Option<Vec<(Outcome, Branch<Self::State>)>>;
    /// Break exact ties between ending and acting in favor of acting.
    fn favor_actions(&self) -> bool {
        false
    }
}

#[derive(Clone)]
enum Choice {
    End(PolicyTree),
    Act(usize),
    Stuck,
}

pub(crate) struct Engine<'a, P: Search> {
    problem: &'a P,
    config: OracleConfig,
    memo: HashMap<P::State, (Option<Q>, Choice)>,
}

impl<'a, P: Search> Engine<'a, P> {
    pub fn new(problem: &'a P, config: OracleConfig) -> Self {
        Engine { problem, config, memo: HashMap::new() }
    }

    pub fn run(mut self, root: P::State) -> Result<Optimum> {
        let (cost, _) = self.value(&root)?;
        let cost = cost.ok_or_else(|| Error::Infeasible("no feasible policy exists".into()))?;
        let policy = self.build(&root)?;
        Ok(Optimum { policy, cost, states: self.memo.len() })
    }

    /// `None` cost means no feasible continuation.
    fn value(&mut self, st: &P::State) -> Result<(Option<Q>, Choice)> {
        if self.config.memo {
            if let Some(hit) = self.memo.get(st) {
                return Ok(hit.clone());
            }
        }
        let term = self.problem.terminal(st);
        let favor = self.problem.favor_actions();
        let mut best_act: Option<(Q, usize)> = None;
        for a in 0..self.problem.num_actions() {
            let Some(split) = self.problem.expand(st, a) else { continue };
            let mut total = self.problem.action_cost(st, a);
            let beaten = |x: &Q, best_act: &Option<(Q, usize)>| {
                best_act.as_ref().is_some_and(|(b, _)| x >= b)
                    || term.as_ref().is_some_and(|(t, _)| if favor { x > t } else { x >= t })
            };
            if beaten(&total, &best_act) {
                continue;
            }
            let mut feasible = true;
            for (_, br) in &split {
                if let Branch::Continue(next) = br {
                    match self.value(next)?.0 {
                        Some(v) => total += v,
                        None => {
                            feasible = false;
                            break;
                        }
                    }
                    if beaten(&total, &best_act) {
                        feasible = false;
                        break;
                    }
                }
            }
            // Strict improvement keeps the lowest id on ties.
            if feasible {
                best_act = Some((total, a));
            }
        }
        let (best, choice) = match (term, best_act) {
            (None, None) => (None, Choice::Stuck),
            (Some((t, leaf)), None) => (Some(t), Choice::End(leaf)),
            (None, Some((c, a))) => (Some(c), Choice::Act(a)),
            (Some((t, leaf)), Some((c, a))) => {
                if c < t || (favor && c == t) {
                    (Some(c), Choice::Act(a))
                } else {
                    (Some(t), Choice::End(leaf))
                }
            }
        };
        if self.config.memo {
            if self.memo.len() >= self.config.max_states {
                return Err(Error::StateBudget(self.config.max_states));
            }
            self.memo.insert(st.clone(), (best.clone(), choice.clone()));
        }
        Ok((best, choice))
    }

    fn build(&mut self, st: &P::State) -> Result<PolicyTree> {
        match self.value(st)?.1 {
            Choice::End(leaf) => Ok(leaf),
            Choice::Stuck => Err(Error::Infeasible("no feasible continuation".into())),
            Choice::Act(a) => {
                let split = self.problem.expand(st, a).expect("chosen action expands");
                let mut children = BTreeMap::new();
                for (label, br) in split {
                    let child = match br {
                        Branch::Done(leaf) => leaf,
                        Branch::Continue(next) => self.build(&next)?,
                    };
                    children.insert(label, child);
                }
                Ok(PolicyTree::Act { action: a, children })
            }
        }
    }
}
