use std::collections::BTreeMap;

use num::{One, Signed, ToPrimitive, Zero};

use super::Reduction;
use crate::error::{Error, Result};
use crate::model::instance::feedback_label;
use crate::model::{eval_msscf_detail, eval_threshold_detail, MsscfInstance, Outcome, PolicyTree, ThresholdPbInstance};
use crate::rational::{ceil_int, fmt_q, Q};

const OUTSIDE_FEEDBACK: &str = "out";

/// PB<=T as set cover: scenario `i` becomes `K` equally likely copies, box
/// elements cover every copy of the scenarios they satisfy, and outside
/// element `k` covers copy `k` of every scenario at cost `T/K`.
pub struct PbtToMsscf {
    source: ThresholdPbInstance,
    forward: MsscfInstance,
    copies: usize,
}

/// Gadget for any nonnegative threshold with `K = max(1, ceil(T))` copies.
pub fn pbt_to_msscf(src: &ThresholdPbInstance) -> Result<PbtToMsscf> {
    let t = &src.threshold;
    if t.is_negative() {
        return Err(Error::InvalidInstance(format!("negative threshold {}", fmt_q(t))));
    }
    let k = ceil_int(t)
        .to_usize()
        .ok_or(Error::CapExceeded { what: "threshold copies", got: usize::MAX, cap: 4096 })?
        .max(1);
    if k * src.m() > 4096 {
        return Err(Error::CapExceeded { what: "threshold copies", got: k * src.m(), cap: 4096 });
    }
    Ok(build(src, k))
}

/// The uniform, integer-threshold form: requires equal scenario
/// probabilities and a positive integer `T`, and uses `K = T`.
pub fn pbt_to_umsscf(src: &ThresholdPbInstance) -> Result<PbtToMsscf> {
    if !src.base.has_uniform_probs() {
        return Err(Error::InvalidInstance("scenario probabilities are not uniform".into()));
    }
    if !src.threshold.is_integer() || !src.threshold.is_positive() {
        return Err(Error::InvalidInstance(format!("threshold {} is not a positive integer", fmt_q(&src.threshold))));
    }
    pbt_to_msscf(src)
}

fn build(src: &ThresholdPbInstance, k: usize) -> PbtToMsscf {
    let (n, m) = (src.n(), src.m());
    let t = &src.threshold;
    let kq = Q::from_integer(k.into());
    let set = |i: usize, c: usize| i * k + c;
    let probs: Vec<Q> = (0..m * k).map(|s| &src.base.probs[s / k] / &kq).collect();
    let mut costs = src.base.costs.clone();
    let mut membership = vec![vec![false; m * k]; n + k];
    let mut feedback = vec![vec![Outcome::new(""); m * k]; n + k];
    for b in 0..n {
        for i in 0..m {
            let v = &src.base.values[b][i];
            for c in 0..k {
                membership[b][set(i, c)] = v.at_most(t);
                feedback[b][set(i, c)] = v.label();
            }
        }
    }
    for c in 0..k {
        costs.push(t / &kq);
        for i in 0..m {
            membership[n + c][set(i, c)] = true;
            for d in 0..k {
                feedback[n + c][set(i, d)] = Outcome::new(OUTSIDE_FEEDBACK);
            }
        }
    }
    PbtToMsscf { source: src.clone(), forward: MsscfInstance::new(costs, probs, membership, feedback), copies: k }
}

impl PbtToMsscf {
    pub fn source(&self) -> &ThresholdPbInstance {
        &self.source
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Per source scenario: `(c_pbt(back(pi), i), 3 * mean_k c_msscf(pi, s_ik))`.
    pub fn per_scenario_bound(&self, policy: &PolicyTree) -> Result<Vec<(Q, Q)>> {
        let back = self.back_translate(policy)?;
        let src_ev = eval_threshold_detail(&self.source, &back)?;
        let tgt_ev = eval_msscf_detail(&self.forward, policy)?;
        let k = self.copies;
        let kq = Q::from_integer(k.into());
        Ok((0..self.source.m())
            .map(|i| {
                let mean = tgt_ev.per_scenario[i * k..(i + 1) * k].iter().fold(Q::zero(), |a, s| a + s.total()) / &kq;
                (src_ev.per_scenario[i].total(), Q::from_integer(3.into()) * mean)
            })
            .collect())
    }

    fn translate(&self, node: &PolicyTree, live: &[usize], outside_seen: usize) -> Result<PolicyTree> {
        let n = self.source.n();
        let PolicyTree::Act { action, children } = node else {
            // A feasible cover never leaves an uncovered copy here.
            return Ok(PolicyTree::TakeOutside);
        };
        let e = *action;
        if e >= n {
            let seen = outside_seen + 1;
            if 2 * seen >= self.copies {
                return Ok(PolicyTree::TakeOutside);
            }
            return match children.get(&feedback_label(&Outcome::new(OUTSIDE_FEEDBACK))) {
                Some(child) => self.translate(child, live, seen),
                None => Ok(PolicyTree::TakeOutside),
            };
        }
        let t = &self.source.threshold;
        let mut groups: BTreeMap<Outcome, Vec<usize>> = BTreeMap::new();
        for &i in live {
            groups.entry(self.source.base.values[e][i].label()).or_default().push(i);
        }
        let mut out = BTreeMap::new();
        for (label, group) in groups {
            let sub = if self.source.base.values[e][group[0]].at_most(t) {
                PolicyTree::StopWithBest
            } else {
                match children.get(&feedback_label(&label)) {
                    Some(child) => self.translate(child, &group, outside_seen)?,
                    None => PolicyTree::TakeOutside,
                }
            };
            out.insert(label, sub);
        }
        Ok(PolicyTree::Act { action: e, children: out })
    }
}

impl Reduction for PbtToMsscf {
    type Target = MsscfInstance;

    fn forward(&self) -> &MsscfInstance {
        &self.forward
    }

    /// Box elements open their box; outside elements are counted, and once
    /// half of the `K` have been chosen on the path the outside option is
    /// taken.
    fn back_translate(&self, policy: &PolicyTree) -> Result<PolicyTree> {
        if self.source.threshold.is_zero() {
            return Ok(PolicyTree::TakeOutside);
        }
        let all: Vec<usize> = (0..self.source.m()).collect();
        self.translate(policy, &all, 0)
    }

    fn claimed_bound(&self) -> &'static str {
        "c_pbt(back(pi), s_i) <= 3 * mean_k c_msscf(pi, s_ik) for every scenario i"
    }
}

impl PbtToMsscf {
    pub fn is_outside_element(&self, e: usize) -> bool {
        e >= self.source.n()
    }

    pub fn outside_cost(&self) -> Q {
        &self.source.threshold / Q::from_integer(self.copies.into())
    }

    pub fn unit_outside(&self) -> bool {
        self.outside_cost().is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_threshold, ExplicitPbInstance, Value};
    use crate::oracle::{opt_msscf, OracleConfig};
    use crate::rational::{q, qi};

    fn f(n: i64) -> Value {
        Value::Finite(qi(n))
    }

    #[test]
    fn single_scenario_gadget_shape() {
        let src = ThresholdPbInstance::new(ExplicitPbInstance::new(vec![qi(1)], vec![qi(1)], vec![vec![f(1)]]), qi(2));
        let r = pbt_to_umsscf(&src).unwrap();
        let fwd = r.forward();
        assert_eq!(fwd.m(), 2);
        assert_eq!(fwd.n(), 1 + 2);
        assert!(fwd.contains(0, 0) && fwd.contains(0, 1));
        assert!(fwd.contains(1, 0) && !fwd.contains(1, 1));
        assert!(fwd.contains(2, 1) && !fwd.contains(2, 0));
        assert!(r.unit_outside());
    }

    #[test]
    fn rejects_bad_inputs() {
        let base = ExplicitPbInstance::new(vec![qi(1)], vec![q(1, 3), q(2, 3)], vec![vec![f(0), f(1)]]);
        assert!(pbt_to_umsscf(&ThresholdPbInstance::new(base.clone(), qi(2))).is_err());
        let uni = ExplicitPbInstance::new(vec![qi(1)], vec![q(1, 2), q(1, 2)], vec![vec![f(0), f(1)]]);
        assert!(pbt_to_umsscf(&ThresholdPbInstance::new(uni, q(3, 2))).is_err());
    }

    #[test]
    fn three_times_bound_on_two_scenarios() {
        let base =
            ExplicitPbInstance::new(vec![qi(1), qi(1)], vec![q(1, 2), q(1, 2)], vec![vec![f(0), f(5)], vec![f(5), f(0)]]);
        let src = ThresholdPbInstance::new(base, qi(2));
        let r = pbt_to_umsscf(&src).unwrap();
        let opt = opt_msscf(r.forward(), &OracleConfig::default()).unwrap();
        for (lhs, rhs) in r.per_scenario_bound(&opt.policy).unwrap() {
            assert!(lhs <= rhs);
        }
        let back = r.back_translate(&opt.policy).unwrap();
        assert!(eval_threshold(&src, &back).unwrap() <= qi(3) * opt.cost);
    }
}
