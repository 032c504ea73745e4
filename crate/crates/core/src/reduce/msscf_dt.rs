use std::collections::BTreeMap;

use num::Zero;

use super::Reduction;
use crate::error::{Error, Result};
use crate::model::instance::{feedback_label, MEMBER_LABEL};
use crate::model::{DtInstance, MsscfInstance, Outcome, PolicyTree};
use crate::rational::Q;

/// Set cover with feedback as identification: a member element names the
/// set outright, a non-member reports its feedback.
pub struct MsscfToDt {
    source: MsscfInstance,
    forward: DtInstance,
}

fn isolated(s: usize) -> Outcome {
    Outcome(format!("isolated:{s}"))
}

pub fn msscf_to_dt(src: &MsscfInstance) -> MsscfToDt {
    let outcomes = (0..src.n())
        .map(|e| {
            (0..src.m())
                .map(|s| if src.contains(e, s) { isolated(s) } else { feedback_label(&src.feedback[e][s]) })
                .collect()
        })
        .collect();
    MsscfToDt { source: src.clone(), forward: DtInstance::new(src.costs.clone(), src.probs.clone(), outcomes) }
}

impl MsscfToDt {
    pub fn source(&self) -> &MsscfInstance {
        &self.source
    }

    /// `E_s[min_{e in s} c_e]`, the additive loss of the back-translation.
    pub fn min_cover_term(&self) -> Q {
        (0..self.source.m()).fold(Q::zero(), |acc, s| {
            let e = self.source.cheapest_member(s).expect("coverable instance");
            acc + &self.source.probs[s] * &self.source.costs[e]
        })
    }

    fn translate(&self, node: &PolicyTree, live: &[usize]) -> Result<PolicyTree> {
        match node {
            PolicyTree::Act { action, children } => {
                let e = *action;
                let mut out = BTreeMap::new();
                let mut rest: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
                for &s in live {
                    if self.source.contains(e, s) {
                        out.insert(Outcome::new(MEMBER_LABEL), PolicyTree::StopWithBest);
                    } else {
                        rest.entry(feedback_label(&self.source.feedback[e][s])).or_default().push(s);
                    }
                }
                for (label, group) in rest {
                    let child = children
                        .get(&label)
                        .ok_or_else(|| Error::MalformedPolicy(format!("decision tree has no child {label} at test {e}")))?;
                    out.insert(label, self.translate(child, &group)?);
                }
                Ok(PolicyTree::Act { action: e, children: out })
            }
            PolicyTree::Identified(j) => {
                // Anything reaching a leaf is still uncovered: member hits were
                // cut above. A correct tree sends only `j` here.
                if live != [*j] {
                    return Err(Error::Infeasible(format!("leaf identifying {j} is reached by {live:?}")));
                }
                let e = self.source.cheapest_member(*j).expect("coverable instance");
                Ok(PolicyTree::act(e, [(Outcome::new(MEMBER_LABEL), PolicyTree::StopWithBest)]))
            }
            other => Err(Error::MalformedPolicy(format!("decision tree leaf {other:?}"))),
        }
    }
}

impl Reduction for MsscfToDt {
    type Target = DtInstance;

    fn forward(&self) -> &DtInstance {
        &self.forward
    }

    /// Replays the tree's selections; a set that reaches its leaf uncovered
    /// gets its cheapest member appended.
    fn back_translate(&self, policy: &PolicyTree) -> Result<PolicyTree> {
        let all: Vec<usize> = (0..self.source.m()).collect();
        self.translate(policy, &all)
    }

    fn claimed_bound(&self) -> &'static str {
        "c_msscf(back(pi)) <= c_dt(pi) + E_s[min_{e in s} c_e]"
    }
}
