use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};

use super::{Continue, Reduction};
use crate::error::{Error, Result};
use crate::model::{ExplicitPbInstance, Outcome, PolicyTree, ThresholdPbInstance, Value};
use crate::rational::{fmt_q, Q};

/// A box of the threshold instance, in terms of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NaiveBox {
    /// Source box with every finite value shifted above the threshold.
    Original(usize),
    /// Opens source box `j` and pays `v` on top: worth 0 exactly where
    /// box `j` holds `v`.
    Final { source: usize, value: Q },
}

/// PB as PB<=T: a threshold above every achievable cost, and one "final"
/// box per (box, value) pair that pays the value as part of its cost.
pub struct NaiveReduction {
    source: ExplicitPbInstance,
    forward: ThresholdPbInstance,
    boxes: Vec<NaiveBox>,
}

pub fn pb_to_pbt_naive(src: &ExplicitPbInstance) -> NaiveReduction {
    let t = (src.total_cost() + src.max_finite_value()).floor() + Q::one();
    let shift = &t + Q::one();
    let mut costs = src.costs.clone();
    let mut values: Vec<Vec<Value>> = src
        .values
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    Value::Finite(x) => Value::Finite(x + &shift),
                    inf => inf.clone(),
                })
                .collect()
        })
        .collect();
    let mut boxes: Vec<NaiveBox> = (0..src.n()).map(NaiveBox::Original).collect();
    for j in 0..src.n() {
        let support: BTreeSet<&Q> = src.values[j].iter().filter_map(Value::as_finite).collect();
        for v in support {
            costs.push(&src.costs[j] + v);
            values.push(
                src.values[j]
                    .iter()
                    .map(|x| Value::Finite(if x.as_finite() == Some(v) { Q::zero() } else { shift.clone() }))
                    .collect(),
            );
            boxes.push(NaiveBox::Final { source: j, value: v.clone() });
        }
    }
    NaiveReduction {
        source: src.clone(),
        forward: ThresholdPbInstance::new(ExplicitPbInstance::new(costs, src.probs.clone(), values), t),
        boxes,
    }
}

impl NaiveReduction {
    pub fn source(&self) -> &ExplicitPbInstance {
        &self.source
    }

    pub fn boxes(&self) -> &[NaiveBox] {
        &self.boxes
    }

    pub fn threshold(&self) -> &Q {
        &self.forward.threshold
    }

    /// Opens source box `j` under `live`, then continues each outcome class
    /// through `next`.
    fn open(
        &self,
        j: usize,
        live: &[usize],
        opened: &BTreeMap<usize, Outcome>,
        next: &mut Continue<'_>,
    ) -> Result<PolicyTree> {
        let mut classes: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
        for &s in live {
            classes.entry(self.source.values[j][s].label()).or_default().push(s);
        }
        let mut children = BTreeMap::new();
        for (label, group) in classes {
            let mut seen = opened.clone();
            seen.insert(j, label.clone());
            children.insert(label.clone(), next(&label, &group, &seen)?);
        }
        Ok(PolicyTree::Act { action: j, children })
    }

    /// Opens every source box not yet opened, then stops.
    fn finish(&self, live: &[usize], opened: &BTreeMap<usize, Outcome>) -> Result<PolicyTree> {
        match (0..self.source.n()).find(|j| !opened.contains_key(j)) {
            None => {
                if let Some(&s) = live.iter().find(|&&s| !self.source.values.iter().any(|row| row[s].is_finite())) {
                    return Err(Error::Infeasible(format!("scenario {s} has no finite value")));
                }
                Ok(PolicyTree::StopWithBest)
            }
            Some(j) => self.open(j, live, opened, &mut |_, group, seen| self.finish(group, seen)),
        }
    }

    fn translate(&self, node: &PolicyTree, live: &[usize], opened: &BTreeMap<usize, Outcome>) -> Result<PolicyTree> {
        match node {
            PolicyTree::TakeOutside => self.finish(live, opened),
            PolicyTree::StopWithBest => {
                Err(Error::Infeasible(format!("threshold policy stops scenarios {live:?} without a value <= T")))
            }
            PolicyTree::Identified(_) => Err(Error::MalformedPolicy("Identified leaf in a threshold policy".into())),
            PolicyTree::Act { action, children } => {
                let fwd = &self.forward.base;
                let child_for = |s: usize| -> Result<&PolicyTree> {
                    let label = fwd.values[*action][s].label();
                    children
                        .get(&label)
                        .ok_or_else(|| Error::MalformedPolicy(format!("no child {label} at box {action}")))
                };
                match self.boxes.get(*action) {
                    None => Err(Error::MalformedPolicy(format!("box {action} out of range"))),
                    Some(NaiveBox::Original(j)) => {
                        let j = *j;
                        if opened.contains_key(&j) {
                            return self.translate(child_for(live[0])?, live, opened);
                        }
                        self.open(j, live, opened, &mut |_, group, seen| self.translate(child_for(group[0])?, group, seen))
                    }
                    Some(NaiveBox::Final { source, value }) => {
                        let j = *source;
                        let hit = Value::Finite(value.clone()).label();
                        let mut step = |label: &Outcome, group: &[usize], seen: &BTreeMap<usize, Outcome>| {
                            if *label == hit {
                                Ok(PolicyTree::StopWithBest)
                            } else {
                                self.translate(child_for(group[0])?, group, seen)
                            }
                        };
                        if let Some(label) = opened.get(&j) {
                            return step(label, live, opened);
                        }
                        self.open(j, live, opened, &mut step)
                    }
                }
            }
        }
    }
}

impl Reduction for NaiveReduction {
    type Target = ThresholdPbInstance;

    fn forward(&self) -> &ThresholdPbInstance {
        &self.forward
    }

    /// Final box `(j, v)` becomes "open `j`; stop on `v`, otherwise continue
    /// down the non-zero branch". The outside option opens everything left.
    fn back_translate(&self, policy: &PolicyTree) -> Result<PolicyTree> {
        let all: Vec<usize> = (0..self.source.m()).collect();
        self.translate(policy, &all, &BTreeMap::new())
    }

    fn claimed_bound(&self) -> &'static str {
        "c_pb(back(pi)) <= c_pbt(pi) and OPT_pbt <= 2 OPT_pb"
    }
}

impl std::fmt::Display for NaiveBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NaiveBox::Original(j) => write!(f, "box {j}"),
            NaiveBox::Final { source, value } => write!(f, "final({source}, {})", fmt_q(value)),
        }
    }
}
