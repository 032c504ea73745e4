//! Monte-Carlo policy evaluation, seeded and reproducible.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval::{eval_dt_detail, eval_msscf_detail, eval_pb_detail, eval_threshold_detail, Evaluation};
use super::instance::{DtInstance, ExplicitPbInstance, MsscfInstance, ThresholdPbInstance};
use super::policy::PolicyTree;
use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimStats {
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
}

impl SimStats {
    /// Whether `exact` is within `k` standard errors of the sample mean.
    pub fn agrees_with(&self, exact: f64, k: f64) -> bool {
        (self.mean - exact).abs() <= k * self.stderr + 1e-12
    }
}

/// Something that can draw the realized cost of one run of a fixed policy.
pub trait CostSampler {
    fn sample_cost(&self, rng: &mut ChaCha8Rng) -> Result<f64>;
}

pub fn simulate<S: CostSampler + ?Sized>(sampler: &S, trials: usize, seed: u64) -> Result<SimStats> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Welford's running mean and variance.
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for k in 1..=trials {
        let x = sample_checked(sampler, &mut rng)?;
        let d = x - mean;
        mean += d / k as f64;
        m2 += d * (x - mean);
    }
    let stderr = if trials > 1 { (m2 / (trials - 1) as f64 / trials as f64).sqrt() } else { 0.0 };
    Ok(SimStats { trials, mean, stderr })
}

fn sample_checked<S: CostSampler + ?Sized>(sampler: &S, rng: &mut ChaCha8Rng) -> Result<f64> {
    let x = sampler.sample_cost(rng)?;
    if !x.is_finite() {
        return Err(Error::Infeasible("sampled cost is not finite".into()));
    }
    Ok(x)
}

/// Sampler for explicit-scenario instances: each draw picks a scenario by
/// its probability and charges that scenario's path cost.
pub struct ScenarioSampler {
    costs: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl ScenarioSampler {
    pub fn new(probs: &[Q], evaluation: &Evaluation) -> Result<Self> {
        let weights: Vec<f64> = probs.iter().map(to_f64).collect();
        let index = WeightedIndex::new(&weights).map_err(|e| Error::InvalidInstance(e.to_string()))?;
        Ok(ScenarioSampler { costs: evaluation.costs().iter().map(to_f64).collect(), index })
    }
}

impl CostSampler for ScenarioSampler {
    fn sample_cost(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        Ok(self.costs[self.index.sample(rng)])
    }
}

pub fn simulate_pb(inst: &ExplicitPbInstance, policy: &PolicyTree, trials: usize, seed: u64) -> Result<SimStats> {
    let ev = eval_pb_detail(inst, policy)?;
    simulate(&ScenarioSampler::new(&inst.probs, &ev)?, trials, seed)
}

pub fn simulate_threshold(inst: &ThresholdPbInstance, policy: &PolicyTree, trials: usize, seed: u64) -> Result<SimStats> {
    let ev = eval_threshold_detail(inst, policy)?;
    simulate(&ScenarioSampler::new(&inst.base.probs, &ev)?, trials, seed)
}

pub fn simulate_dt(inst: &DtInstance, policy: &PolicyTree, trials: usize, seed: u64) -> Result<SimStats> {
    let ev = eval_dt_detail(inst, policy)?;
    simulate(&ScenarioSampler::new(&inst.probs, &ev)?, trials, seed)
}

pub fn simulate_msscf(inst: &MsscfInstance, policy: &PolicyTree, trials: usize, seed: u64) -> Result<SimStats> {
    let ev = eval_msscf_detail(inst, policy)?;
    simulate(&ScenarioSampler::new(&inst.probs, &ev)?, trials, seed)
}
