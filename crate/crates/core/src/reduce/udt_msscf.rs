use std::collections::BTreeMap;

use num::Zero;

use super::{Continue, Reduction};
use crate::error::{Error, Result};
use crate::model::instance::{feedback_label, MEMBER_LABEL};
use crate::model::{DtInstance, MsscfInstance, Outcome, PolicyTree};
use crate::rational::Q;

const ISOLATION_FEEDBACK: &str = "iso";

/// Identification as set cover: tests become elements that cover nothing
/// but report their outcome, and each scenario gets an isolating element
/// covering only its own set.
pub struct UdtToMsscf {
    source: DtInstance,
    forward: MsscfInstance,
}

/// Any-prior form; the isolating element of `i` costs the most expensive
/// "cheapest test separating `i` from some `k`".
pub fn udt_to_msscf(src: &DtInstance) -> Result<UdtToMsscf> {
    if let Some((a, b)) = src.unidentifiable_pair() {
        return Err(Error::InvalidInstance(format!("no test distinguishes scenarios {a} and {b}")));
    }
    let (n, m) = (src.n(), src.m());
    let mut costs = src.costs.clone();
    for i in 0..m {
        let c = (0..m)
            .filter(|&k| k != i)
            .map(|k| &src.costs[src.cheapest_distinguishing(i, k).expect("identifiable")])
            .max()
            .cloned()
            .unwrap_or_else(Q::zero);
        costs.push(c);
    }
    let mut membership = vec![vec![false; m]; n + m];
    let mut feedback = vec![vec![Outcome::new(ISOLATION_FEEDBACK); m]; n + m];
    for (row, outcomes) in feedback.iter_mut().zip(&src.outcomes) {
        row.clone_from(outcomes);
    }
    for i in 0..m {
        membership[n + i][i] = true;
    }
    Ok(UdtToMsscf { source: src.clone(), forward: MsscfInstance::new(costs, src.probs.clone(), membership, feedback) })
}

/// The uniform-prior reduction.
pub fn udt_to_umsscf(src: &DtInstance) -> Result<UdtToMsscf> {
    if !src.has_uniform_probs() {
        return Err(Error::InvalidInstance("scenario priors are not uniform".into()));
    }
    udt_to_msscf(src)
}

impl UdtToMsscf {
    pub fn source(&self) -> &DtInstance {
        &self.source
    }

    pub fn isolating_element(&self, scenario: usize) -> usize {
        self.source.n() + scenario
    }

    /// A set-cover policy built from a decision tree by selecting the
    /// identified scenario's isolating element at every leaf.
    pub fn leaf_isolating_policy(&self, dt: &PolicyTree) -> Result<PolicyTree> {
        match dt {
            PolicyTree::Act { action, children } => {
                let mut out = BTreeMap::new();
                for (label, child) in children {
                    out.insert(feedback_label(label), self.leaf_isolating_policy(child)?);
                }
                Ok(PolicyTree::Act { action: *action, children: out })
            }
            PolicyTree::Identified(j) => Ok(PolicyTree::act(
                self.isolating_element(*j),
                [(Outcome::new(MEMBER_LABEL), PolicyTree::StopWithBest)],
            )),
            other => Err(Error::MalformedPolicy(format!("decision tree leaf {other:?}"))),
        }
    }

    fn translate(
        &self,
        node: &PolicyTree,
        live: &[usize],
        run: &BTreeMap<usize, Outcome>,
        remembered: &[usize],
    ) -> Result<PolicyTree> {
        if live.len() == 1 {
            return Ok(PolicyTree::Identified(live[0]));
        }
        let n = self.source.n();
        let PolicyTree::Act { action, children } = node else {
            return self.separate(live, run);
        };
        let e = *action;
        let follow = |child: Option<&PolicyTree>, group: &[usize], run: &BTreeMap<usize, Outcome>, mem: &[usize]| match child {
            Some(c) => self.translate(c, group, run, mem),
            None => self.separate(group, run),
        };
        if e < n {
            if let Some(label) = run.get(&e) {
                return follow(children.get(&feedback_label(label)), live, run, remembered);
            }
            return self.test(e, live, run, &mut |label, group, seen| {
                follow(children.get(&feedback_label(label)), group, seen, remembered)
            });
        }
        let j = e - n;
        let next = children.get(&feedback_label(&Outcome::new(ISOLATION_FEEDBACK)));
        if !live.contains(&j) {
            return follow(next, live, run, remembered);
        }
        let mut mem = remembered.to_vec();
        mem.push(j);
        match remembered.iter().rev().find(|k| live.contains(k)) {
            // First isolating element still relevant here: just remember it.
            None => follow(next, live, run, &mem),
            // Separate `j` from the scenario remembered last.
            Some(&k) => {
                let t = self.source.cheapest_distinguishing(j, k).expect("identifiable");
                self.test(t, live, run, &mut |_, group, seen| follow(next, group, seen, &mem))
            }
        }
    }

    fn test(
        &self,
        t: usize,
        live: &[usize],
        run: &BTreeMap<usize, Outcome>,
        next: &mut Continue<'_>,
    ) -> Result<PolicyTree> {
        let mut classes: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
        for &s in live {
            classes.entry(self.source.outcomes[t][s].clone()).or_default().push(s);
        }
        let mut children = BTreeMap::new();
        for (label, group) in classes {
            let mut seen = run.clone();
            seen.insert(t, label.clone());
            let sub = if group.len() == 1 { PolicyTree::Identified(group[0]) } else { next(&label, &group, &seen)? };
            children.insert(label, sub);
        }
        Ok(PolicyTree::Act { action: t, children })
    }

    /// Fallback once the set-cover policy has nothing more to say: split the
    /// first two candidates with their cheapest separating test, repeatedly.
    fn separate(&self, live: &[usize], run: &BTreeMap<usize, Outcome>) -> Result<PolicyTree> {
        if live.len() == 1 {
            return Ok(PolicyTree::Identified(live[0]));
        }
        let t = self.source.cheapest_distinguishing(live[0], live[1]).expect("identifiable");
        self.test(t, live, run, &mut |_, group, seen| self.separate(group, seen))
    }
}

impl Reduction for UdtToMsscf {
    type Target = MsscfInstance;

    fn forward(&self) -> &MsscfInstance {
        &self.forward
    }

    /// Test elements replay as tests. The first isolating element on a
    /// branch is only remembered; a later one runs the cheapest test between
    /// its scenario and the one remembered last. Leftover candidates at the
    /// end are separated by cheapest tests.
    fn back_translate(&self, policy: &PolicyTree) -> Result<PolicyTree> {
        let all: Vec<usize> = (0..self.source.m()).collect();
        self.translate(policy, &all, &BTreeMap::new(), &[])
    }

    fn claimed_bound(&self) -> &'static str {
        "c_dt(back(pi)) <= 2 c_msscf(pi) and OPT_msscf <= 3 OPT_dt"
    }
}
