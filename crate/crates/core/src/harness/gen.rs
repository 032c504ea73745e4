//! Seeded random instances. Every generator is a pure function of its
//! arguments.

use std::str::FromStr;

use num::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{Dist, MixtureInstance};
use crate::model::{DtInstance, ExplicitPbInstance, MsscfInstance, Outcome, ThresholdPbInstance, Value};
use crate::rational::{q, qi, Q};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    Unit,
    #[default]
    Random,
}

impl FromStr for CostMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(CostMode::Unit),
            "random" => Ok(CostMode::Random),
            _ => Err(Error::Parse(format!("cost mode {s:?}: expected unit or random"))),
        }
    }
}

pub const MAX_VALUE: i64 = 9;
const INF_TAGS: [&str; 2] = ["a", "b"];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn costs(r: &mut ChaCha8Rng, n: usize, mode: CostMode) -> Vec<Q> {
    (0..n)
        .map(|_| match mode {
            CostMode::Unit => Q::one(),
            CostMode::Random => qi(r.gen_range(1..=4)),
        })
        .collect()
}

/// Integer weights in 1..=4, normalized exactly.
fn probs(r: &mut ChaCha8Rng, m: usize) -> Vec<Q> {
    let w: Vec<i64> = (0..m).map(|_| r.gen_range(1..=4)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| q(x, total)).collect()
}

/// `k` distinct values from `0..=MAX_VALUE`, sorted.
fn value_support(r: &mut ChaCha8Rng, k: usize) -> Vec<i64> {
    let mut all: Vec<i64> = (0..=MAX_VALUE).collect();
    all.shuffle(r);
    let mut s = all[..k.clamp(1, all.len())].to_vec();
    s.sort_unstable();
    s
}

#[derive(Clone, Copy, Debug)]
pub struct ExplicitGen {
    pub n: usize,
    pub m: usize,
    pub support: usize,
    pub cost_mode: CostMode,
    /// Chance that a cell is infinite.
    pub inf_rate: f64,
}

impl ExplicitGen {
    pub fn new(n: usize, m: usize) -> Self {
        ExplicitGen { n, m, support: 4, cost_mode: CostMode::Random, inf_rate: 0.15 }
    }

    pub fn generate(&self, seed: u64) -> ExplicitPbInstance {
        let mut r = rng(seed);
        let costs = costs(&mut r, self.n, self.cost_mode);
        let probs = probs(&mut r, self.m);
        let support = value_support(&mut r, self.support);
        let mut values: Vec<Vec<Value>> = (0..self.n)
            .map(|_| {
                (0..self.m)
                    .map(|_| {
                        if r.gen_bool(self.inf_rate) {
                            Value::inf(*INF_TAGS.choose(&mut r).expect("nonempty"))
                        } else {
                            Value::Finite(qi(*support.choose(&mut r).expect("nonempty")))
                        }
                    })
                    .collect()
            })
            .collect();
        for j in 0..self.m {
            if values.iter().all(|row| !row[j].is_finite()) {
                let b = r.gen_range(0..self.n);
                values[b][j] = Value::Finite(qi(*support.choose(&mut r).expect("nonempty")));
            }
        }
        ExplicitPbInstance::new(costs, probs, values)
    }
}

pub fn gen_explicit(n: usize, m: usize, seed: u64, support: usize, cost_mode: CostMode) -> ExplicitPbInstance {
    ExplicitGen { support, cost_mode, ..ExplicitGen::new(n, m) }.generate(seed)
}

/// Uniform scenario probabilities and an integer threshold in `1..=m`.
pub fn gen_uniform_threshold(n: usize, m: usize, seed: u64, support: usize) -> ThresholdPbInstance {
    let mut base = ExplicitGen { support, inf_rate: 0.0, ..ExplicitGen::new(n, m) }.generate(seed);
    base.probs = vec![q(1, m as i64); m];
    let t = rng(seed ^ 0x5eed).gen_range(1..=m as i64);
    ThresholdPbInstance::new(base, qi(t))
}

/// Each element joins each set with chance 2/5; every set gets at least
/// one element. Feedback is drawn from a three-letter alphabet.
pub fn gen_msscf(n: usize, m: usize, seed: u64, cost_mode: CostMode) -> MsscfInstance {
    let mut r = rng(seed);
    let costs = costs(&mut r, n, cost_mode);
    let probs = probs(&mut r, m);
    let mut membership: Vec<Vec<bool>> = (0..n).map(|_| (0..m).map(|_| r.gen_bool(0.4)).collect()).collect();
    for s in 0..m {
        if !membership.iter().any(|row| row[s]) {
            membership[r.gen_range(0..n)][s] = true;
        }
    }
    let feedback = (0..n)
        .map(|_| (0..m).map(|_| Outcome::new(["x", "y", "z"][r.gen_range(0..3)])).collect())
        .collect();
    MsscfInstance::new(costs, probs, membership, feedback)
}

/// Random three-way tests. If the draw leaves two scenarios
/// indistinguishable, the last test is replaced by one naming the scenario.
pub fn gen_dt(n: usize, m: usize, seed: u64, cost_mode: CostMode, uniform: bool) -> DtInstance {
    let mut r = rng(seed);
    let costs = costs(&mut r, n, cost_mode);
    let probs = if uniform { vec![q(1, m as i64); m] } else { probs(&mut r, m) };
    let outcomes = (0..n)
        .map(|_| (0..m).map(|_| Outcome::new(["0", "1", "2"][r.gen_range(0..3)])).collect())
        .collect();
    let mut inst = DtInstance::new(costs, probs, outcomes);
    if inst.unidentifiable_pair().is_some() {
        inst.outcomes[n - 1] = (0..m).map(|j| Outcome::new(j.to_string())).collect();
    }
    inst
}

#[derive(Clone, Debug)]
pub struct MixtureGen {
    pub n: usize,
    pub m: usize,
    pub epsilon: Q,
    pub support: usize,
    /// Every box gets the same marginal under all components.
    pub all_identical: bool,
}

impl MixtureGen {
    /// Informative boxes mix a uniform base with a point mass at a mode
    /// private to each component: `D_j = (1 - eps) U + eps [a_j]`, so any
    /// two components differ by exactly `eps`. Other boxes share one
    /// random marginal.
    pub fn generate(&self, seed: u64) -> Result<MixtureInstance> {
        let eps = self.epsilon.clone();
        if eps <= qi(0) || eps > Q::one() {
            return Err(Error::InvalidInstance(format!("epsilon {eps} not in (0, 1]")));
        }
        if self.m > 1 && !self.all_identical && self.support < self.m {
            return Err(Error::InvalidInstance(format!(
                "{} components need {} support points for distinct modes, got {}",
                self.m, self.m, self.support
            )));
        }
        let mut r = rng(seed);
        let costs = costs(&mut r, self.n, CostMode::Random);
        let weights = probs(&mut r, self.m);
        let forced = r.gen_range(0..self.n);
        let mut dists = Vec::with_capacity(self.n);
        for b in 0..self.n {
            let support = value_support(&mut r, self.support);
            let informative = self.m > 1 && !self.all_identical && (b == forced || r.gen_bool(0.5));
            if informative {
                let k = support.len() as i64;
                let mut modes = support.clone();
                modes.shuffle(&mut r);
                let row = (0..self.m)
                    .map(|j| {
                        Dist::new(support.iter().map(|&v| {
                            let base = (Q::one() - &eps) / qi(k);
                            let p = if v == modes[j] { base + &eps } else { base };
                            (qi(v), p)
                        }))
                    })
                    .collect();
                dists.push(row);
            } else {
                let w: Vec<i64> = support.iter().map(|_| r.gen_range(1..=4)).collect();
                let total: i64 = w.iter().sum();
                let d = Dist::new(support.iter().zip(&w).map(|(&v, &x)| (qi(v), q(x, total))));
                dists.push(vec![d; self.m]);
            }
        }
        let inst = MixtureInstance::new(costs, weights, dists, eps);
        if let Some(v) = inst.violations().first() {
            return Err(Error::InvalidInstance(v.to_string()));
        }
        Ok(inst)
    }
}

pub fn gen_mixture(n: usize, m: usize, seed: u64, epsilon: &Q, support: usize) -> Result<MixtureInstance> {
    MixtureGen { n, m, epsilon: epsilon.clone(), support, all_identical: false }.generate(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::Instance;
    use crate::mixture::classify_boxes;

    #[test]
    fn deterministic_per_seed() {
        let a = Instance::Pb(gen_explicit(4, 5, 11, 4, CostMode::Random)).to_json();
        let b = Instance::Pb(gen_explicit(4, 5, 11, 4, CostMode::Random)).to_json();
        assert_eq!(a, b);
        let c = Instance::Pb(gen_explicit(4, 5, 12, 4, CostMode::Random)).to_json();
        assert_ne!(a, c);
    }

    #[test]
    fn unit_costs_and_single_scenario() {
        let inst = gen_explicit(3, 1, 5, 3, CostMode::Unit);
        assert!(inst.costs.iter().all(|c| c == &Q::one()));
        assert_eq!(inst.probs, vec![Q::one()]);
    }

    #[test]
    fn generated_instances_are_valid() {
        for seed in 0..50 {
            assert!(gen_explicit(1 + seed as usize % 6, 1 + seed as usize % 5, seed, 4, CostMode::Random).violations().is_empty());
            assert!(gen_msscf(4, 5, seed, CostMode::Random).violations().is_empty());
            assert!(gen_dt(4, 5, seed, CostMode::Random, false).violations().is_empty());
            let t = gen_uniform_threshold(3, 4, seed, 3);
            assert!(t.violations().is_empty());
            assert!(t.threshold >= qi(1) && t.threshold <= qi(4));
            let mix = gen_mixture(3, 2, seed, &q(1, 2), 2).unwrap();
            assert!(classify_boxes(&mix, &[0, 1]).is_ok());
        }
    }

    #[test]
    fn epsilon_one_gives_disjoint_supports() {
        let inst = gen_mixture(4, 2, 3, &Q::one(), 2).unwrap();
        let (ib, _) = classify_boxes(&inst, &[0, 1]).unwrap();
        assert!(!ib.is_empty());
        for b in ib {
            assert_eq!(inst.tv(b, 0, 1), Q::one());
        }
    }

    #[test]
    fn identical_flag_has_no_informative_box() {
        let g = MixtureGen { n: 3, m: 3, epsilon: q(1, 2), support: 2, all_identical: true };
        let inst = g.generate(1).unwrap();
        assert!(classify_boxes(&inst, &[0, 1, 2]).unwrap().0.is_empty());
    }

    #[test]
    fn too_few_support_points() {
        assert!(gen_mixture(2, 3, 0, &q(1, 2), 2).is_err());
    }
}
