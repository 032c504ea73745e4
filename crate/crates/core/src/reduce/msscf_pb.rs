use std::collections::BTreeMap;

use super::Reduction;
use crate::error::{Error, Result};
use crate::model::instance::{feedback_label, MEMBER_LABEL};
use crate::model::{ExplicitPbInstance, MsscfInstance, Outcome, PolicyTree, Value};
use crate::rational::qi;

/// Set cover with feedback as Pandora's Box: a member element is a box of
/// value 0, a non-member is an infinite value tagged with its feedback.
pub struct MsscfToPb {
    source: MsscfInstance,
    forward: ExplicitPbInstance,
}

pub fn msscf_to_pb(src: &MsscfInstance) -> MsscfToPb {
    let values = (0..src.n())
        .map(|e| {
            (0..src.m())
                .map(|s| if src.contains(e, s) { Value::Finite(qi(0)) } else { Value::inf(src.feedback[e][s].as_str()) })
                .collect()
        })
        .collect();
    MsscfToPb {
        source: src.clone(),
        forward: ExplicitPbInstance::new(src.costs.clone(), src.probs.clone(), values),
    }
}

impl MsscfToPb {
    pub fn source(&self) -> &MsscfInstance {
        &self.source
    }

    /// Carries a set-cover policy over to the box instance. Subtrees below a
    /// membership hit are cut to `StopWithBest`, since a PB policy keeps
    /// paying for boxes a covered set would not.
    pub fn forward_policy(&self, policy: &PolicyTree) -> Result<PolicyTree> {
        relabel(policy, &|label: &Outcome| {
            if label.as_str() == MEMBER_LABEL {
                Ok((Outcome::new("0"), true))
            } else if let Some(f) = label.as_str().strip_prefix("fb:") {
                Ok((Value::inf(f).label(), false))
            } else {
                Err(Error::MalformedPolicy(format!("unexpected set-cover label {label}")))
            }
        })
    }
}

impl Reduction for MsscfToPb {
    type Target = ExplicitPbInstance;

    fn forward(&self) -> &ExplicitPbInstance {
        &self.forward
    }

    fn back_translate(&self, policy: &PolicyTree) -> Result<PolicyTree> {
        relabel(policy, &|label: &Outcome| {
            match Value::parse(label.as_str())? {
                Value::Finite(_) => Ok((Outcome::new(MEMBER_LABEL), true)),
                Value::InfTagged(f) => Ok((feedback_label(&Outcome::new(f)), false)),
            }
        })
    }

    fn claimed_bound(&self) -> &'static str {
        "c_msscf(back(pi)) <= c_pb(pi), with equality for policies that stop at the first 0"
    }
}

/// Maps child labels; `true` in the mapped pair cuts the child to a stop.
fn relabel(policy: &PolicyTree, map: &dyn Fn(&Outcome) -> Result<(Outcome, bool)>) -> Result<PolicyTree> {
    match policy {
        PolicyTree::Act { action, children } => {
            let mut out = BTreeMap::new();
            for (label, child) in children {
                let (new_label, cut) = map(label)?;
                let sub = if cut { PolicyTree::StopWithBest } else { relabel(child, map)? };
                out.insert(new_label, sub);
            }
            Ok(PolicyTree::Act { action: *action, children: out })
        }
        leaf => Ok(leaf.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_msscf, eval_pb};
    use crate::oracle::{opt_msscf, opt_pb, OracleConfig};
    use crate::rational::q;

    fn o(s: &str) -> Outcome {
        Outcome::new(s)
    }

    fn sample() -> MsscfInstance {
        MsscfInstance::new(
            vec![qi(1), qi(2), qi(1)],
            vec![q(1, 2), q(1, 4), q(1, 4)],
            vec![vec![true, false, false], vec![false, true, true], vec![false, false, true]],
            vec![vec![o("a"), o("b"), o("c")], vec![o("x"), o("x"), o("x")], vec![o("p"), o("q"), o("q")]],
        )
    }

    #[test]
    fn single_member_cell_is_zero() {
        let src = MsscfInstance::new(vec![qi(1)], vec![qi(1)], vec![vec![true]], vec![vec![o("z")]]);
        assert_eq!(msscf_to_pb(&src).forward().values[0][0], Value::Finite(qi(0)));
    }

    #[test]
    fn non_member_cell_carries_feedback() {
        let r = msscf_to_pb(&sample());
        assert_eq!(r.forward().values[0][1], Value::inf("b"));
    }

    #[test]
    fn costs_agree_both_ways() {
        let src = sample();
        let r = msscf_to_pb(&src);
        let cfg = OracleConfig::default();
        let m = opt_msscf(&src, &cfg).unwrap();
        let fwd = r.forward_policy(&m.policy).unwrap();
        assert_eq!(eval_pb(r.forward(), &fwd).unwrap(), m.cost);
        let p = opt_pb(r.forward(), &cfg).unwrap();
        assert_eq!(eval_msscf(&src, &r.back_translate(&p.policy).unwrap()).unwrap(), p.cost);
        assert_eq!(m.cost, p.cost);
    }
}
