use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::instance::{DtInstance, ExplicitPbInstance, MsscfInstance, ThresholdPbInstance};
use super::value::Outcome;
use crate::error::{Error, Result};
use crate::rational::Q;

/// An adaptive policy. `Act` runs an action (box, test or element, depending
/// on the host problem) and branches on the label it reveals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyTree {
    Act { action: usize, children: BTreeMap<Outcome, PolicyTree> },
    StopWithBest,
    TakeOutside,
    Identified(usize),
}

impl PolicyTree {
    pub fn act(action: usize, children: impl IntoIterator<Item = (Outcome, PolicyTree)>) -> Self {
        PolicyTree::Act { action, children: children.into_iter().collect() }
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, PolicyTree::Act { .. })
    }

    /// Longest root-to-leaf chain of `Act` nodes.
    pub fn depth(&self) -> usize {
        match self {
            PolicyTree::Act { children, .. } => 1 + children.values().map(PolicyTree::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            PolicyTree::Act { children, .. } => 1 + children.values().map(PolicyTree::node_count).sum::<usize>(),
            _ => 1,
        }
    }

    /// Replaces every leaf by `f(leaf)`.
    pub fn map_leaves(&self, f: &mut impl FnMut(&PolicyTree) -> PolicyTree) -> PolicyTree {
        match self {
            PolicyTree::Act { action, children } => PolicyTree::Act {
                action: *action,
                children: children.iter().map(|(k, c)| (k.clone(), c.map_leaves(f))).collect(),
            },
            leaf => f(leaf),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        match self {
            PolicyTree::Act { action, children } => {
                let _ = writeln!(out, "{pad}act {action}");
                for (label, child) in children {
                    if child.is_leaf() {
                        let _ = write!(out, "{pad}  [{label}] ");
                        child.render_into(out, 0);
                    } else {
                        let _ = writeln!(out, "{pad}  [{label}]");
                        child.render_into(out, indent + 2);
                    }
                }
            }
            PolicyTree::StopWithBest => {
                let _ = writeln!(out, "{pad}stop");
            }
            PolicyTree::TakeOutside => {
                let _ = writeln!(out, "{pad}outside");
            }
            PolicyTree::Identified(j) => {
                let _ = writeln!(out, "{pad}identified {j}");
            }
        }
    }
}

impl fmt::Display for PolicyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Anything a policy can be walked against: finitely many scenarios, each of
/// which answers every action with a deterministic label.
pub trait Host {
    fn num_actions(&self) -> usize;
    fn num_scenarios(&self) -> usize;
    fn label(&self, action: usize, scenario: usize) -> Outcome;
    fn cost(&self, action: usize) -> &Q;
    fn prob(&self, scenario: usize) -> &Q;
}

impl Host for ExplicitPbInstance {
    fn num_actions(&self) -> usize {
        self.n()
    }
    fn num_scenarios(&self) -> usize {
        self.m()
    }
    fn label(&self, action: usize, scenario: usize) -> Outcome {
        self.values[action][scenario].label()
    }
    fn cost(&self, action: usize) -> &Q {
        &self.costs[action]
    }
    fn prob(&self, scenario: usize) -> &Q {
        &self.probs[scenario]
    }
}

impl Host for ThresholdPbInstance {
    fn num_actions(&self) -> usize {
        self.base.num_actions()
    }
    fn num_scenarios(&self) -> usize {
        self.base.num_scenarios()
    }
    fn label(&self, action: usize, scenario: usize) -> Outcome {
        self.base.label(action, scenario)
    }
    fn cost(&self, action: usize) -> &Q {
        self.base.cost(action)
    }
    fn prob(&self, scenario: usize) -> &Q {
        self.base.prob(scenario)
    }
}

impl Host for DtInstance {
    fn num_actions(&self) -> usize {
        self.n()
    }
    fn num_scenarios(&self) -> usize {
        self.m()
    }
    fn label(&self, action: usize, scenario: usize) -> Outcome {
        self.outcomes[action][scenario].clone()
    }
    fn cost(&self, action: usize) -> &Q {
        &self.costs[action]
    }
    fn prob(&self, scenario: usize) -> &Q {
        &self.probs[scenario]
    }
}

impl Host for MsscfInstance {
    fn num_actions(&self) -> usize {
        self.n()
    }
    fn num_scenarios(&self) -> usize {
        self.m()
    }
    fn label(&self, action: usize, scenario: usize) -> Outcome {
        self.observe(action, scenario)
    }
    fn cost(&self, action: usize) -> &Q {
        &self.costs[action]
    }
    fn prob(&self, scenario: usize) -> &Q {
        &self.probs[scenario]
    }
}

/// The route one scenario takes through a policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path<'a> {
    pub actions: Vec<usize>,
    pub leaf: &'a PolicyTree,
}

/// Follows `tree` under `scenario`. Fails on an out-of-range or repeated
/// action, or on a label with no child.
pub fn walk<'a, H: Host + ?Sized>(host: &H, tree: &'a PolicyTree, scenario: usize) -> Result<Path<'a>> {
    let mut actions = Vec::new();
    let mut node = tree;
    while let PolicyTree::Act { action, children } = node {
        let a = *action;
        if a >= host.num_actions() {
            return Err(Error::MalformedPolicy(format!("action {a} out of range")));
        }
        if actions.contains(&a) {
            return Err(Error::MalformedPolicy(format!("action {a} repeats on the path of scenario {scenario}")));
        }
        actions.push(a);
        let label = host.label(a, scenario);
        node = children.get(&label).ok_or_else(|| {
            Error::MalformedPolicy(format!("no child for label {label} after action {a} (scenario {scenario})"))
        })?;
    }
    Ok(Path { actions, leaf: node })
}

/// Checks the structural invariants against `host`: no repeated action on a
/// path, and every `Act` node's keys are exactly the labels realizable by
/// the scenarios that reach it.
pub fn check_structure<H: Host + ?Sized>(host: &H, tree: &PolicyTree) -> Result<()> {
    let all: Vec<usize> = (0..host.num_scenarios()).collect();
    let mut used = Vec::new();
    check_node(host, tree, &all, &mut used)
}

fn check_node<H: Host + ?Sized>(host: &H, node: &PolicyTree, live: &[usize], used: &mut Vec<usize>) -> Result<()> {
    let PolicyTree::Act { action, children } = node else {
        return Ok(());
    };
    let a = *action;
    if a >= host.num_actions() {
        return Err(Error::MalformedPolicy(format!("action {a} out of range")));
    }
    if used.contains(&a) {
        return Err(Error::MalformedPolicy(format!("action {a} repeats on a path")));
    }
    let mut classes: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
    for &j in live {
        classes.entry(host.label(a, j)).or_default().push(j);
    }
    let realized: BTreeSet<&Outcome> = classes.keys().collect();
    let keys: BTreeSet<&Outcome> = children.keys().collect();
    if realized != keys {
        return Err(Error::MalformedPolicy(format!(
            "action {a}: child labels {:?} differ from realizable labels {:?}",
            keys.iter().map(|o| o.as_str()).collect::<Vec<_>>(),
            realized.iter().map(|o| o.as_str()).collect::<Vec<_>>()
        )));
    }
    used.push(a);
    for (label, members) in &classes {
        check_node(host, &children[label], members, used)?;
    }
    used.pop();
    Ok(())
}

/// Groups `live` by the label of `action`.
pub fn partition<H: Host + ?Sized>(host: &H, action: usize, live: &[usize]) -> BTreeMap<Outcome, Vec<usize>> {
    let mut classes: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
    for &j in live {
        classes.entry(host.label(action, j)).or_default().push(j);
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::value::Value;
    use crate::rational::{q, qi};

    fn inst() -> ExplicitPbInstance {
        ExplicitPbInstance::new(
            vec![qi(1), qi(1)],
            vec![q(1, 2), q(1, 2)],
            vec![vec![Value::Finite(qi(0)), Value::Finite(qi(10))], vec![Value::Finite(qi(10)), Value::Finite(qi(0))]],
        )
    }

    fn branchy() -> PolicyTree {
        PolicyTree::act(
            0,
            [
                (Outcome::new("0"), PolicyTree::StopWithBest),
                (Outcome::new("10"), PolicyTree::act(1, [(Outcome::new("0"), PolicyTree::StopWithBest)])),
            ],
        )
    }

    #[test]
    fn walking_is_deterministic() {
        let i = inst();
        let t = branchy();
        assert_eq!(walk(&i, &t, 0).unwrap().actions, vec![0]);
        assert_eq!(walk(&i, &t, 1).unwrap().actions, vec![0, 1]);
        check_structure(&i, &t).unwrap();
    }

    #[test]
    fn repeated_action_is_rejected() {
        let i = inst();
        let t = PolicyTree::act(
            0,
            [
                (Outcome::new("0"), PolicyTree::StopWithBest),
                (Outcome::new("10"), PolicyTree::act(0, [(Outcome::new("10"), PolicyTree::StopWithBest)])),
            ],
        );
        assert!(walk(&i, &t, 1).is_err());
        assert!(check_structure(&i, &t).is_err());
    }

    #[test]
    fn extra_child_fails_structure_check() {
        let i = inst();
        let t = PolicyTree::act(
            0,
            [
                (Outcome::new("0"), PolicyTree::StopWithBest),
                (Outcome::new("10"), PolicyTree::StopWithBest),
                (Outcome::new("7"), PolicyTree::StopWithBest),
            ],
        );
        assert!(check_structure(&i, &t).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = branchy();
        let s = serde_json::to_string(&t).unwrap();
        let back: PolicyTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.depth(), 2);
    }
}
