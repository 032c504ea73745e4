use std::collections::HashMap;
use std::fmt;

use num::{One, Signed, Zero};

use super::value::{Outcome, Value};
use crate::rational::{fmt_q, sum, Q};

/// Prefix of the label an MSSC_f element reports when it belongs to the
/// realized set. Feedback labels of non-members are reported as `fb:<f>`.
pub const MEMBER_LABEL: &str = "in";

pub fn feedback_label(f: &Outcome) -> Outcome {
    Outcome(format!("fb:{f}"))
}

/// One broken invariant, as reported by `violations()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

fn violation(invariant: &'static str, detail: impl Into<String>) -> Violation {
    Violation { invariant, detail: detail.into() }
}

fn check_probs(probs: &[Q], out: &mut Vec<Violation>) {
    if probs.is_empty() {
        out.push(violation("nonempty", "no scenarios"));
        return;
    }
    for (j, p) in probs.iter().enumerate() {
        if !p.is_positive() {
            out.push(violation("positive-probability", format!("scenario {j} has p = {}", fmt_q(p))));
        }
    }
    let total = sum(probs);
    if !total.is_one() {
        out.push(violation("probability-sum", format!("probabilities sum to {}", fmt_q(&total))));
    }
}

fn check_costs(costs: &[Q], out: &mut Vec<Violation>) {
    if costs.is_empty() {
        out.push(violation("nonempty", "no actions"));
    }
    for (i, c) in costs.iter().enumerate() {
        if c.is_negative() {
            out.push(violation("nonnegative-cost", format!("action {i} has cost {}", fmt_q(c))));
        }
    }
}

fn check_shape<T>(rows: &[Vec<T>], n: usize, m: usize, name: &'static str, out: &mut Vec<Violation>) {
    if rows.len() != n {
        out.push(violation("dimensions", format!("{name} has {} rows, expected {n}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != m {
            out.push(violation("dimensions", format!("{name} row {i} has {} entries, expected {m}", row.len())));
        }
    }
}

fn renormalize(probs: &[Q], keep: &[usize]) -> Vec<Q> {
    let total = sum(keep.iter().map(|&j| &probs[j]));
    keep.iter().map(|&j| &probs[j] / &total).collect()
}

/// Pandora's Box with explicitly listed scenarios. `values[i][j]` is the
/// value of box `i` in scenario `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitPbInstance {
    pub costs: Vec<Q>,
    pub probs: Vec<Q>,
    pub values: Vec<Vec<Value>>,
}

impl ExplicitPbInstance {
    pub fn new(costs: Vec<Q>, probs: Vec<Q>, values: Vec<Vec<Value>>) -> Self {
        ExplicitPbInstance { costs, probs, values }
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn value(&self, b: usize, j: usize) -> &Value {
        &self.values[b][j]
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_costs(&self.costs, &mut out);
        check_probs(&self.probs, &mut out);
        check_shape(&self.values, self.n(), self.m(), "values", &mut out);
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Value::Finite(q) = v {
                    if q.is_negative() {
                        out.push(violation("nonnegative-value", format!("v[{i}][{j}] = {}", fmt_q(q))));
                    }
                }
            }
        }
        out
    }

    /// Scenarios with no finite value anywhere; no PB policy can stop on them.
    pub fn hopeless_scenarios(&self) -> Vec<usize> {
        (0..self.m())
            .filter(|&j| (0..self.n()).all(|b| !self.values[b][j].is_finite()))
            .collect()
    }

    /// Sub-instance on `keep` (original ids, in order) with probabilities
    /// renormalized to sum to one.
    pub fn restrict(&self, keep: &[usize]) -> ExplicitPbInstance {
        ExplicitPbInstance {
            costs: self.costs.clone(),
            probs: renormalize(&self.probs, keep),
            values: self.values.iter().map(|row| keep.iter().map(|&j| row[j].clone()).collect()).collect(),
        }
    }

    /// Sub-instance listing `sources[k]` as scenario `k`, each with
    /// probability `1 / sources.len()`.
    pub fn uniform_copies(&self, sources: &[usize]) -> ExplicitPbInstance {
        let p = Q::new(1.into(), sources.len().into());
        ExplicitPbInstance {
            costs: self.costs.clone(),
            probs: vec![p; sources.len()],
            values: self.values.iter().map(|row| sources.iter().map(|&j| row[j].clone()).collect()).collect(),
        }
    }

    pub fn max_finite_value(&self) -> Q {
        self.values
            .iter()
            .flatten()
            .filter_map(Value::as_finite)
            .max()
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn total_cost(&self) -> Q {
        sum(&self.costs)
    }

    pub fn has_uniform_probs(&self) -> bool {
        self.probs.windows(2).all(|w| w[0] == w[1])
    }
}

/// Pandora's Box with a threshold: stop on any value `<= threshold`, or pay
/// `threshold` to quit. The outside-option cost always equals the threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdPbInstance {
    pub base: ExplicitPbInstance,
    pub threshold: Q,
}

impl ThresholdPbInstance {
    pub fn new(base: ExplicitPbInstance, threshold: Q) -> Self {
        ThresholdPbInstance { base, threshold }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn m(&self) -> usize {
        self.base.m()
    }

    pub fn outside_cost(&self) -> &Q {
        &self.threshold
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.base.violations();
        if self.threshold.is_negative() {
            out.push(violation("nonnegative-threshold", format!("T = {}", fmt_q(&self.threshold))));
        }
        out
    }
}

/// Decision tree identification: `outcomes[i][j]` is the result of test `i`
/// under scenario `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DtInstance {
    pub costs: Vec<Q>,
    pub probs: Vec<Q>,
    pub outcomes: Vec<Vec<Outcome>>,
}

impl DtInstance {
    pub fn new(costs: Vec<Q>, probs: Vec<Q>, outcomes: Vec<Vec<Outcome>>) -> Self {
        DtInstance { costs, probs, outcomes }
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn outcome(&self, t: usize, j: usize) -> &Outcome {
        &self.outcomes[t][j]
    }

    pub fn distinguishes(&self, t: usize, a: usize, b: usize) -> bool {
        self.outcomes[t][a] != self.outcomes[t][b]
    }

    /// Cheapest test telling `a` from `b` (lowest id on ties).
    pub fn cheapest_distinguishing(&self, a: usize, b: usize) -> Option<usize> {
        (0..self.n())
            .filter(|&t| self.distinguishes(t, a, b))
            .min_by(|&x, &y| self.costs[x].cmp(&self.costs[y]).then(x.cmp(&y)))
    }

    /// First pair of scenarios no test separates.
    pub fn unidentifiable_pair(&self) -> Option<(usize, usize)> {
        let m = self.m();
        // Scenarios with identical outcome columns collide in this map.
        let mut seen: HashMap<Vec<&Outcome>, usize> = HashMap::new();
        for j in 0..m {
            let column: Vec<&Outcome> = self.outcomes.iter().map(|row| &row[j]).collect();
            if let Some(&k) = seen.get(&column) {
                return Some((k, j));
            }
            seen.insert(column, j);
        }
        None
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_costs(&self.costs, &mut out);
        check_probs(&self.probs, &mut out);
        check_shape(&self.outcomes, self.n(), self.m(), "outcomes", &mut out);
        if out.is_empty() {
            if let Some((a, b)) = self.unidentifiable_pair() {
                out.push(violation("identifiable", format!("no test distinguishes scenarios {a} and {b}")));
            }
        }
        out
    }

    pub fn has_uniform_probs(&self) -> bool {
        self.probs.windows(2).all(|w| w[0] == w[1])
    }
}

/// Min-sum set cover with feedback: `membership[i][j]` says whether element
/// `i` belongs to set `j`; `feedback[i][j]` is what selecting `i` reveals
/// under set `j` when it is not a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsscfInstance {
    pub costs: Vec<Q>,
    pub probs: Vec<Q>,
    pub membership: Vec<Vec<bool>>,
    pub feedback: Vec<Vec<Outcome>>,
}

impl MsscfInstance {
    pub fn new(costs: Vec<Q>, probs: Vec<Q>, membership: Vec<Vec<bool>>, feedback: Vec<Vec<Outcome>>) -> Self {
        MsscfInstance { costs, probs, membership, feedback }
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn contains(&self, e: usize, s: usize) -> bool {
        self.membership[e][s]
    }

    /// Label observed when element `e` is selected and set `s` is realized.
    pub fn observe(&self, e: usize, s: usize) -> Outcome {
        if self.membership[e][s] {
            Outcome::new(MEMBER_LABEL)
        } else {
            feedback_label(&self.feedback[e][s])
        }
    }

    /// Cheapest member of set `s`, lowest id on ties.
    pub fn cheapest_member(&self, s: usize) -> Option<usize> {
        (0..self.n())
            .filter(|&e| self.membership[e][s])
            .min_by(|&x, &y| self.costs[x].cmp(&self.costs[y]).then(x.cmp(&y)))
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_costs(&self.costs, &mut out);
        check_probs(&self.probs, &mut out);
        check_shape(&self.membership, self.n(), self.m(), "membership", &mut out);
        check_shape(&self.feedback, self.n(), self.m(), "feedback", &mut out);
        if out.is_empty() {
            for s in 0..self.m() {
                if !(0..self.n()).any(|e| self.membership[e][s]) {
                    out.push(violation("coverability", format!("set {s} has no element")));
                }
            }
        }
        out
    }

    pub fn has_uniform_probs(&self) -> bool {
        self.probs.windows(2).all(|w| w[0] == w[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn two_by_two() -> ExplicitPbInstance {
        ExplicitPbInstance::new(
            vec![qi(1), qi(1)],
            vec![q(1, 2), q(1, 2)],
            vec![vec![Value::Finite(qi(0)), Value::Finite(qi(10))], vec![Value::Finite(qi(10)), Value::Finite(qi(0))]],
        )
    }

    #[test]
    fn well_formed_pb_has_no_violations() {
        assert!(two_by_two().violations().is_empty());
    }

    #[test]
    fn probability_sum_is_reported() {
        let mut inst = two_by_two();
        inst.probs = vec![q(3, 5), q(3, 5)];
        let v = inst.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].invariant, "probability-sum");
    }

    #[test]
    fn empty_set_is_reported() {
        let inst = MsscfInstance::new(
            vec![qi(1), qi(1)],
            vec![q(1, 2), q(1, 2)],
            vec![vec![true, false], vec![true, false]],
            vec![vec!["a".into(), "a".into()], vec!["a".into(), "b".into()]],
        );
        let v = inst.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].invariant, "coverability");
        assert!(v[0].detail.contains("set 1"));
    }

    #[test]
    fn unidentifiable_dt_is_flagged() {
        let inst = DtInstance::new(
            vec![qi(1)],
            vec![q(1, 3), q(1, 3), q(1, 3)],
            vec![vec!["a".into(), "b".into(), "a".into()]],
        );
        assert_eq!(inst.unidentifiable_pair(), Some((0, 2)));
        assert_eq!(inst.violations()[0].invariant, "identifiable");
    }

    #[test]
    fn restriction_renormalizes() {
        let inst = ExplicitPbInstance::new(
            vec![qi(1)],
            vec![q(1, 2), q(1, 4), q(1, 4)],
            vec![vec![Value::Finite(qi(0)), Value::Finite(qi(1)), Value::Finite(qi(2))]],
        );
        let sub = inst.restrict(&[1, 2]);
        assert_eq!(sub.probs, vec![q(1, 2), q(1, 2)]);
        assert_eq!(sub.values[0][1], Value::Finite(qi(2)));
    }
}
