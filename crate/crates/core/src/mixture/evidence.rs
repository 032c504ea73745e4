use std::cmp::Ordering;
use std::collections::BTreeSet;

use num::{Signed, Zero};

use super::instance::MixtureInstance;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, to_f64, Q};
use crate::solve::greedy::ratio_cmp;

/// Splits the boxes into those separating some pair of `live` components
/// (informative) and those with identical marginals across `live`.
pub fn classify_boxes(inst: &MixtureInstance, live: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut informative = Vec::new();
    let mut plain = Vec::new();
    for b in 0..inst.n() {
        let mut hit = false;
        for (x, &i) in live.iter().enumerate() {
            for &j in &live[x + 1..] {
                let tv = inst.tv(b, i, j);
                if tv.is_positive() && tv < inst.epsilon {
                    return Err(Error::Separability { box_id: b, a: i, b: j, tv: fmt_q(&tv) });
                }
                hit |= tv.is_positive();
            }
        }
        if hit { informative.push(b) } else { plain.push(b) }
    }
    Ok((informative, plain))
}

/// Non-informative boxes by descending `Pr[v <= T] / c`, lowest id on ties.
/// The probability is read off the first live component; they all agree.
pub fn noninformative_order(inst: &MixtureInstance, live: &[usize], t: &Q) -> Result<Vec<usize>> {
    let (_, mut plain) = classify_boxes(inst, live)?;
    let Some(&c0) = live.first() else {
        return Err(Error::InvalidInstance("empty component set".into()));
    };
    let hit: Vec<Q> = (0..inst.n()).map(|b| inst.dist(b, c0).cdf(t)).collect();
    plain.sort_by(|&a, &b| ratio_cmp(&hit[b], &inst.costs[b], &hit[a], &inst.costs[a]).then(a.cmp(&b)));
    Ok(plain)
}

/// The `(opened + 1)`-th box of [`noninformative_order`].
pub fn best_noninformative(inst: &MixtureInstance, live: &[usize], t: &Q, opened: usize) -> Result<usize> {
    noninformative_order(inst, live, t)?
        .get(opened)
        .copied()
        .ok_or_else(|| Error::Infeasible(format!("only {opened} non-informative boxes for components {live:?}")))
}

/// Whether value `v` at box `b` counts for `i` against `j`: strictly likelier
/// under `i`, or equally likely and `i < j`.
pub fn favors(inst: &MixtureInstance, b: usize, v: &Q, i: usize, j: usize) -> bool {
    match inst.dist(b, i).prob(v).cmp(&inst.dist(b, j).prob(v)) {
        Ordering::Greater => true,
        Ordering::Equal => i < j,
        Ordering::Less => false,
    }
}

/// Pairwise evidence counters over ordered component pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Evidence {
    m: usize,
    z: Vec<u32>,
    t: Vec<u32>,
    /// Sum over the pair's informative openings of `Pr_i` of the values
    /// favoring `i` at that box: `t_ij` times the mean of `z_ij / t_ij`
    /// under `i`.
    favored: Vec<Q>,
}

impl Evidence {
    pub fn new(m: usize) -> Self {
        Evidence { m, z: vec![0; m * m], t: vec![0; m * m], favored: vec![Q::zero(); m * m] }
    }

    pub fn z(&self, i: usize, j: usize) -> u32 {
        self.z[i * self.m + j]
    }

    pub fn t(&self, i: usize, j: usize) -> u32 {
        self.t[i * self.m + j]
    }

    /// Expected `z_ij / t_ij` if `i` is the true component.
    pub fn expected_rate(&self, i: usize, j: usize) -> Q {
        let t = self.t(i, j);
        if t == 0 {
            return Q::zero();
        }
        &self.favored[i * self.m + j] / Q::from_integer(t.into())
    }
}

/// Records value `v` seen at box `b` for every live pair the box separates.
pub fn update_evidence(e: &Evidence, b: usize, v: &Q, inst: &MixtureInstance, live: &[usize]) -> Evidence {
    let mut out = e.clone();
    let support: BTreeSet<&Q> = live.iter().flat_map(|&i| inst.dist(b, i).support()).collect();
    for &i in live {
        for &j in live {
            if i == j || !inst.tv(b, i, j).is_positive() {
                continue;
            }
            let k = i * e.m + j;
            out.t[k] += 1;
            if favors(inst, b, v, i, j) {
                out.z[k] += 1;
            }
            for &u in &support {
                if favors(inst, b, u, i, j) {
                    out.favored[k] += inst.dist(b, i).prob(u);
                }
            }
        }
    }
    out
}

/// `ln(1/delta) / epsilon^2`: pairs with more openings than this get tested.
pub fn elimination_threshold(epsilon: &Q, delta: &Q) -> f64 {
    let d = to_f64(delta);
    if d <= 0.0 {
        return f64::INFINITY;
    }
    (1.0 / d).ln() / to_f64(epsilon).powi(2)
}

/// Drops components the evidence rules out. A tested pair `(i, j)` loses
/// `j` if `z_ij / t_ij` is within `epsilon / 2` of its mean under `i`, and
/// loses `i` otherwise. Never returns an empty set.
pub fn eliminate(e: &Evidence, live: &[usize], inst: &MixtureInstance, delta: &Q) -> Vec<usize> {
    let limit = elimination_threshold(&inst.epsilon, delta);
    let half = &inst.epsilon / Q::from_integer(2.into());
    let mut s = live.to_vec();
    'outer: loop {
        for x in 0..s.len() {
            for y in x + 1..s.len() {
                let (i, j) = (s[x], s[y]);
                let t = e.t(i, j);
                if f64::from(t) <= limit {
                    continue;
                }
                let rate = Q::new(e.z(i, j).into(), t.into());
                let gone = if (rate - e.expected_rate(i, j)).abs() <= half { j } else { i };
                s.retain(|&c| c != gone);
                continue 'outer;
            }
        }
        return s;
    }
}
