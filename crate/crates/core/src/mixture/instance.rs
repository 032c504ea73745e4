use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::instance::Violation;
use crate::rational::{fmt_q, sum, Q};

/// A finite-support distribution over nonnegative rationals, kept sorted by
/// value with zero-mass points dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dist {
    points: Vec<(Q, Q)>,
}

impl Dist {
    /// Merges repeated values and drops zero masses. Does not normalize.
    pub fn new(points: impl IntoIterator<Item = (Q, Q)>) -> Self {
        let mut merged: BTreeMap<Q, Q> = BTreeMap::new();
        for (v, p) in points {
            *merged.entry(v).or_insert_with(Q::zero) += p;
        }
        Dist { points: merged.into_iter().filter(|(_, p)| !p.is_zero()).collect() }
    }

    pub fn point(v: Q) -> Self {
        Dist { points: vec![(v, Q::one())] }
    }

    pub fn points(&self) -> &[(Q, Q)] {
        &self.points
    }

    pub fn support(&self) -> impl Iterator<Item = &Q> {
        self.points.iter().map(|(v, _)| v)
    }

    pub fn mass(&self) -> Q {
        sum(self.points.iter().map(|(_, p)| p))
    }

    pub fn prob(&self, v: &Q) -> Q {
        match self.points.binary_search_by(|(x, _)| x.cmp(v)) {
            Ok(k) => self.points[k].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    /// `Pr[v <= t]`.
    pub fn cdf(&self, t: &Q) -> Q {
        sum(self.points.iter().filter(|(v, _)| v <= t).map(|(_, p)| p))
    }
}

/// Half the L1 distance over the union of supports.
pub fn tv_distance(a: &Dist, b: &Dist) -> Result<Q> {
    for d in [a, b] {
        if !d.mass().is_one() {
            return Err(Error::InvalidInstance(format!("distribution has mass {}", fmt_q(&d.mass()))));
        }
    }
    Ok(tv_unchecked(a, b))
}

pub(crate) fn tv_unchecked(a: &Dist, b: &Dist) -> Q {
    let mut diff: BTreeMap<&Q, Q> = BTreeMap::new();
    for (v, p) in a.points() {
        *diff.entry(v).or_insert_with(Q::zero) += p;
    }
    for (v, p) in b.points() {
        *diff.entry(v).or_insert_with(Q::zero) -= p;
    }
    sum(diff.values().map(|d| d.abs()).collect::<Vec<_>>().iter()) / Q::from_integer(2.into())
}

/// Pandora's Box where scenarios are a weighted mixture of `m` product
/// distributions; `dists[box][component]` is the marginal of that box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixtureInstance {
    pub costs: Vec<Q>,
    pub weights: Vec<Q>,
    pub dists: Vec<Vec<Dist>>,
    pub epsilon: Q,
}

impl MixtureInstance {
    pub fn new(costs: Vec<Q>, weights: Vec<Q>, dists: Vec<Vec<Dist>>, epsilon: Q) -> Self {
        MixtureInstance { costs, weights, dists, epsilon }
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn dist(&self, b: usize, comp: usize) -> &Dist {
        &self.dists[b][comp]
    }

    pub fn tv(&self, b: usize, i: usize, j: usize) -> Q {
        tv_unchecked(&self.dists[b][i], &self.dists[b][j])
    }

    pub fn min_cost(&self) -> Q {
        self.costs.iter().min().cloned().unwrap_or_else(Q::zero)
    }

    /// First separability failure: some box whose pair TV lies strictly
    /// between 0 and epsilon.
    pub fn separability_error(&self) -> Option<Error> {
        for b in 0..self.n() {
            for i in 0..self.m() {
                for j in i + 1..self.m() {
                    let tv = self.tv(b, i, j);
                    if tv.is_positive() && tv < self.epsilon {
                        return Some(Error::Separability { box_id: b, a: i, b: j, tv: fmt_q(&tv) });
                    }
                }
            }
        }
        None
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let v = |invariant, detail: String| Violation { invariant, detail };
        if self.costs.is_empty() {
            out.push(v("nonempty", "no boxes".into()));
        }
        if self.weights.is_empty() {
            out.push(v("nonempty", "no components".into()));
        }
        for (i, c) in self.costs.iter().enumerate() {
            if c.is_negative() {
                out.push(v("nonnegative-cost", format!("box {i} has cost {}", fmt_q(c))));
            }
        }
        for (j, w) in self.weights.iter().enumerate() {
            if !w.is_positive() {
                out.push(v("positive-probability", format!("component {j} has weight {}", fmt_q(w))));
            }
        }
        let total = sum(&self.weights);
        if !self.weights.is_empty() && !total.is_one() {
            out.push(v("probability-sum", format!("component weights sum to {}", fmt_q(&total))));
        }
        if !self.epsilon.is_positive() || self.epsilon > Q::one() {
            out.push(v("epsilon-range", format!("epsilon = {} not in (0, 1]", fmt_q(&self.epsilon))));
        }
        if self.dists.len() != self.n() {
            out.push(v("dimensions", format!("{} distribution rows for {} boxes", self.dists.len(), self.n())));
            return out;
        }
        for (b, row) in self.dists.iter().enumerate() {
            if row.len() != self.m() {
                out.push(v("dimensions", format!("box {b} has {} components, expected {}", row.len(), self.m())));
                return out;
            }
            for (j, d) in row.iter().enumerate() {
                if !d.mass().is_one() {
                    out.push(v("distribution-sum", format!("D[{b}][{j}] has mass {}", fmt_q(&d.mass()))));
                }
                if d.support().any(Q::is_negative) {
                    out.push(v("nonnegative-value", format!("D[{b}][{j}] has a negative support point")));
                }
            }
        }
        if out.is_empty() {
            if let Some(Error::Separability { box_id, a, b, tv }) = self.separability_error() {
                out.push(v("separability", format!("box {box_id}, components ({a}, {b}): TV = {tv}")));
            }
        }
        out
    }
}
