//! Exact expected-cost evaluators. Each walks every scenario through the
//! policy and reports the per-scenario breakdown alongside the expectation.

use num::Zero;

use super::instance::{DtInstance, ExplicitPbInstance, MsscfInstance, ThresholdPbInstance};
use super::policy::{walk, Host, PolicyTree};
use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioCost {
    /// Actions on the scenario's path, in order.
    pub actions: Vec<usize>,
    /// Action costs charged to the scenario.
    pub opening: Q,
    /// Value term: the min revealed value (PB), the threshold when the
    /// outside option was taken (PB<=T), otherwise zero.
    pub value: Q,
    /// PB<=T: the scenario found a value `<= T`. MSSC: the set was hit.
    /// Always true for PB and DT.
    pub covered: bool,
}

impl ScenarioCost {
    pub fn total(&self) -> Q {
        &self.opening + &self.value
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub per_scenario: Vec<ScenarioCost>,
    pub expected: Q,
}

impl Evaluation {
    fn from_parts<H: Host + ?Sized>(host: &H, per_scenario: Vec<ScenarioCost>) -> Self {
        let expected = per_scenario
            .iter()
            .enumerate()
            .fold(Q::zero(), |acc, (j, s)| acc + host.prob(j) * s.total());
        Evaluation { per_scenario, expected }
    }

    pub fn costs(&self) -> Vec<Q> {
        self.per_scenario.iter().map(ScenarioCost::total).collect()
    }
}

fn cost_of<H: Host + ?Sized>(host: &H, actions: &[usize]) -> Q {
    actions.iter().fold(Q::zero(), |acc, &a| acc + host.cost(a))
}

pub fn eval_pb_detail(inst: &ExplicitPbInstance, policy: &PolicyTree) -> Result<Evaluation> {
    let mut per = Vec::with_capacity(inst.m());
    for j in 0..inst.m() {
        let path = walk(inst, policy, j)?;
        match path.leaf {
            PolicyTree::StopWithBest => {}
            other => {
                return Err(Error::MalformedPolicy(format!(
                    "scenario {j} ends in {other:?}; PB policies end in StopWithBest"
                )))
            }
        }
        let best = path.actions.iter().filter_map(|&b| inst.values[b][j].as_finite()).min().cloned();
        let Some(best) = best else {
            return Err(Error::Infeasible(format!("scenario {j} stops with no finite value revealed")));
        };
        per.push(ScenarioCost { opening: cost_of(inst, &path.actions), actions: path.actions, value: best, covered: true });
    }
    Ok(Evaluation::from_parts(inst, per))
}

pub fn eval_pb(inst: &ExplicitPbInstance, policy: &PolicyTree) -> Result<Q> {
    eval_pb_detail(inst, policy).map(|e| e.expected)
}

/// Scenario `j` stops paying at the first box revealing a value `<= T`;
/// whatever the tree does afterwards is irrelevant to it.
pub fn eval_threshold_detail(inst: &ThresholdPbInstance, policy: &PolicyTree) -> Result<Evaluation> {
    let t = &inst.threshold;
    let mut per = Vec::with_capacity(inst.m());
    for j in 0..inst.m() {
        let path = walk(inst, policy, j)?;
        let hit = path.actions.iter().position(|&b| inst.base.values[b][j].at_most(t));
        let cost = match hit {
            Some(k) => ScenarioCost {
                opening: cost_of(inst, &path.actions[..=k]),
                actions: path.actions,
                value: Q::zero(),
                covered: true,
            },
            None => match path.leaf {
                PolicyTree::TakeOutside => ScenarioCost {
                    opening: cost_of(inst, &path.actions),
                    actions: path.actions,
                    value: t.clone(),
                    covered: false,
                },
                PolicyTree::StopWithBest => {
                    return Err(Error::Infeasible(format!("scenario {j} stops without a value <= T")));
                }
                other => {
                    return Err(Error::MalformedPolicy(format!("scenario {j} ends in {other:?}")));
                }
            },
        };
        per.push(cost);
    }
    Ok(Evaluation::from_parts(inst, per))
}

pub fn eval_threshold(inst: &ThresholdPbInstance, policy: &PolicyTree) -> Result<Q> {
    eval_threshold_detail(inst, policy).map(|e| e.expected)
}

pub fn eval_dt_detail(inst: &DtInstance, policy: &PolicyTree) -> Result<Evaluation> {
    let mut per = Vec::with_capacity(inst.m());
    for j in 0..inst.m() {
        let path = walk(inst, policy, j)?;
        match path.leaf {
            PolicyTree::Identified(k) if *k == j => {}
            PolicyTree::Identified(k) => {
                return Err(Error::Infeasible(format!("scenario {j} reaches the leaf identifying {k}")));
            }
            other => {
                return Err(Error::MalformedPolicy(format!("scenario {j} ends in {other:?}, not Identified")));
            }
        }
        per.push(ScenarioCost {
            opening: cost_of(inst, &path.actions),
            actions: path.actions,
            value: Q::zero(),
            covered: true,
        });
    }
    Ok(Evaluation::from_parts(inst, per))
}

pub fn eval_dt(inst: &DtInstance, policy: &PolicyTree) -> Result<Q> {
    eval_dt_detail(inst, policy).map(|e| e.expected)
}

pub fn eval_msscf_detail(inst: &MsscfInstance, policy: &PolicyTree) -> Result<Evaluation> {
    let mut per = Vec::with_capacity(inst.m());
    for s in 0..inst.m() {
        let path = walk(inst, policy, s)?;
        if matches!(path.leaf, PolicyTree::TakeOutside) {
            return Err(Error::MalformedPolicy(format!("set {s} ends in TakeOutside")));
        }
        let Some(k) = path.actions.iter().position(|&e| inst.contains(e, s)) else {
            return Err(Error::Infeasible(format!("set {s} is never covered")));
        };
        per.push(ScenarioCost {
            opening: cost_of(inst, &path.actions[..=k]),
            actions: path.actions,
            value: Q::zero(),
            covered: true,
        });
    }
    Ok(Evaluation::from_parts(inst, per))
}

pub fn eval_msscf(inst: &MsscfInstance, policy: &PolicyTree) -> Result<Q> {
    eval_msscf_detail(inst, policy).map(|e| e.expected)
}
