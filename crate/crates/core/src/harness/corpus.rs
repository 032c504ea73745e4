//! Random corpus runs: every algorithm against the exact oracle, plus the
//! exact reduction inequalities, reported as CSV rows.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::gen::{gen_dt, gen_explicit, gen_msscf, CostMode};
use crate::error::{Error, Result};
use crate::model::{eval_dt, eval_msscf, eval_pb, eval_threshold, ExplicitPbInstance, PolicyTree};
use crate::oracle::{opt_dt, opt_msscf, opt_pb, opt_threshold, OracleConfig};
use crate::rational::{fmt_q, to_f64, Q};
use crate::reduce::{msscf_to_pb, pb_phases, pb_to_pbt_naive, ExactThresholdSolver, Reduction, ThresholdSolver};
use crate::solve::{
    greedy_dt, greedy_msscf, nonadaptive_mssc_order, order_policy, pipeline_pb_direct, pipeline_pb_via_udt, DtChainSolver,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    GreedyMsscf,
    NonadaptiveMsscf,
    GreedyDt,
    PhasesExact,
    PipelineUdt,
    PipelineDirect,
}

impl Algo {
    pub const ALL: [Algo; 6] = [
        Algo::GreedyMsscf,
        Algo::NonadaptiveMsscf,
        Algo::GreedyDt,
        Algo::PhasesExact,
        Algo::PipelineUdt,
        Algo::PipelineDirect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algo::GreedyMsscf => "greedy-msscf",
            Algo::NonadaptiveMsscf => "nonadaptive-msscf",
            Algo::GreedyDt => "greedy-dt",
            Algo::PhasesExact => "phases-exact",
            Algo::PipelineUdt => "pipeline-udt",
            Algo::PipelineDirect => "pipeline-direct",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub count: usize,
    pub n_max: usize,
    pub m_max: usize,
    pub seed: u64,
    pub algos: Vec<Algo>,
    /// Also run the exact reduction checks on every instance.
    pub checks: bool,
    pub oracle: OracleConfig,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            count: 200,
            n_max: 6,
            m_max: 6,
            seed: 0,
            algos: Algo::ALL.to_vec(),
            checks: true,
            oracle: OracleConfig::default(),
        }
    }
}

/// One CSV line. Costs are exact rationals printed as `p/q`.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub instance_id: usize,
    pub algo: String,
    pub n: usize,
    pub m: usize,
    pub algo_cost: String,
    pub oracle_cost: String,
    pub ratio: f64,
    pub wall_time_ms: f64,
    /// Feasible and not cheaper than the oracle.
    pub exact_ok: bool,
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub instance_id: usize,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct CorpusReport {
    pub rows: Vec<Row>,
    pub failures: Vec<Failure>,
    pub checks_run: usize,
}

#[derive(Clone, Debug)]
pub struct AlgoSummary {
    pub algo: String,
    pub runs: usize,
    pub feasible: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> Vec<AlgoSummary> {
        let mut by: BTreeMap<&str, Vec<&Row>> = BTreeMap::new();
        for r in &self.rows {
            by.entry(&r.algo).or_default().push(r);
        }
        by.into_iter()
            .map(|(algo, rows)| {
                let ok: Vec<f64> = rows.iter().filter(|r| r.exact_ok).map(|r| r.ratio).collect();
                AlgoSummary {
                    algo: algo.to_owned(),
                    runs: rows.len(),
                    feasible: ok.len(),
                    max_ratio: ok.iter().copied().fold(f64::NAN, f64::max),
                    mean_ratio: ok.iter().sum::<f64>() / ok.len() as f64,
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(HEADER)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn render_summary(&self) -> String {
        let mut s = String::new();
        for a in self.summary() {
            s += &format!(
                "{:<18} runs {:>4}  feasible {:>4}  max ratio {:.4}  mean ratio {:.4}\n",
                a.algo, a.runs, a.feasible, a.max_ratio, a.mean_ratio
            );
        }
        s += &format!("exact checks: {} run, {} failed\n", self.checks_run, self.failures.len());
        for f in self.failures.iter().take(20) {
            s += &format!("  instance {} {}: {}\n", f.instance_id, f.check, f.detail);
        }
        s
    }
}

pub const HEADER: [&str; 9] =
    ["instance_id", "algo", "n", "m", "algo_cost", "oracle_cost", "ratio", "wall_time_ms", "exact_ok"];

pub fn ratio(algo: &Q, oracle: &Q) -> f64 {
    if oracle == &Q::from_integer(0.into()) {
        if algo == oracle { 1.0 } else { f64::INFINITY }
    } else {
        to_f64(&(algo / oracle))
    }
}

struct Job<'a> {
    id: usize,
    seed: u64,
    n: usize,
    m: usize,
    config: &'a CorpusConfig,
    rows: Vec<Row>,
    failures: Vec<Failure>,
    checks: usize,
}

impl Job<'_> {
    fn fail(&mut self, check: &str, detail: String) {
        self.failures.push(Failure { instance_id: self.id, check: check.to_owned(), detail });
    }

    fn check(&mut self, check: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(check, detail());
        }
    }

    fn record(&mut self, algo: Algo, oracle: &Q, run: impl FnOnce() -> Result<Q>) {
        let start = Instant::now();
        let got = run();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let (cost, ok) = match &got {
            Ok(c) => (fmt_q(c), c >= oracle),
            Err(e) => (format!("error: {e}"), false),
        };
        self.checks += 1;
        match &got {
            Ok(c) if c < oracle => {
                self.fail(&format!("{algo} floor"), format!("cost {} below oracle {}", fmt_q(c), fmt_q(oracle)))
            }
            Err(e) => self.fail(&format!("{algo} feasible"), e.to_string()),
            _ => {}
        }
        self.rows.push(Row {
            instance_id: self.id,
            algo: algo.name().to_owned(),
            n: self.n,
            m: self.m,
            algo_cost: cost,
            oracle_cost: fmt_q(oracle),
            ratio: got.as_ref().map(|c| ratio(c, oracle)).unwrap_or(f64::NAN),
            wall_time_ms: ms,
            exact_ok: ok,
        });
    }
}

fn run_one(config: &CorpusConfig, id: usize) -> (Vec<Row>, Vec<Failure>, usize) {
    let seed = config.seed.wrapping_mul(1_000_003).wrapping_add(id as u64);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = r.gen_range(1..=config.n_max);
    let m = r.gen_range(1..=config.m_max);
    let mut job = Job { id, seed, n, m, config, rows: Vec::new(), failures: Vec::new(), checks: 0 };
    if let Err(e) = run_job(&mut job) {
        job.fail("oracle", e.to_string());
    }
    (job.rows, job.failures, job.checks)
}

fn wants(job: &Job, algos: &[Algo]) -> bool {
    algos.iter().any(|a| job.config.algos.contains(a))
}

fn run_job(job: &mut Job) -> Result<()> {
    let cfg = job.config.oracle;
    let (n, m, seed) = (job.n, job.m, job.seed);
    if wants(job, &[Algo::GreedyMsscf, Algo::NonadaptiveMsscf]) || job.config.checks {
        let inst = gen_msscf(n, m, seed, CostMode::Random);
        let opt = opt_msscf(&inst, &cfg)?;
        if job.config.algos.contains(&Algo::GreedyMsscf) {
            job.record(Algo::GreedyMsscf, &opt.cost, || eval_msscf(&inst, &greedy_msscf(&inst)?));
        }
        if job.config.algos.contains(&Algo::NonadaptiveMsscf) {
            job.record(Algo::NonadaptiveMsscf, &opt.cost, || {
                eval_msscf(&inst, &order_policy(&inst, &nonadaptive_mssc_order(&inst)?)?)
            });
        }
        if job.config.checks {
            let red = msscf_to_pb(&inst);
            for (name, policy) in [("oracle", opt.policy.clone()), ("greedy", greedy_msscf(&inst)?)] {
                let a = eval_msscf(&inst, &policy)?;
                let b = eval_pb(red.forward(), &red.forward_policy(&policy)?)?;
                job.check("msscf-pb equality", a == b, || format!("{name}: {} vs {}", fmt_q(&a), fmt_q(&b)));
            }
        }
    }
    if job.config.algos.contains(&Algo::GreedyDt) {
        let inst = gen_dt(n, m, seed, CostMode::Random, false);
        let opt = opt_dt(&inst, &cfg)?;
        let tree = greedy_dt(&inst)?;
        job.check("greedy-dt depth", tree.depth() < m.max(1), || format!("depth {} with m = {m}", tree.depth()));
        job.record(Algo::GreedyDt, &opt.cost, || eval_dt(&inst, &tree));
    }
    let pb_algos = [Algo::PhasesExact, Algo::PipelineUdt, Algo::PipelineDirect];
    if wants(job, &pb_algos) || job.config.checks {
        let inst = gen_explicit(n, m, seed, 4, CostMode::Random);
        let opt = opt_pb(&inst, &cfg)?;
        if job.config.algos.contains(&Algo::PhasesExact) {
            let solver = ExactThresholdSolver { config: cfg };
            job.record(Algo::PhasesExact, &opt.cost, || eval_pb(&inst, &pb_phases(&inst, &solver)?.tree));
        }
        if job.config.algos.contains(&Algo::PipelineUdt) {
            job.record(Algo::PipelineUdt, &opt.cost, || eval_pb(&inst, &pipeline_pb_via_udt(&inst)?.tree));
        }
        if job.config.algos.contains(&Algo::PipelineDirect) {
            job.record(Algo::PipelineDirect, &opt.cost, || eval_pb(&inst, &pipeline_pb_direct(&inst)?));
        }
        if job.config.checks {
            naive_checks(job, &inst, &opt.cost)?;
        }
    }
    Ok(())
}

/// Doubling of the optimum (when the forward instance fits the oracle) and
/// pruning monotonicity for the oracle and greedy-chain policies.
fn naive_checks(job: &mut Job, inst: &ExplicitPbInstance, opt: &Q) -> Result<()> {
    let red = pb_to_pbt_naive(inst);
    let fwd = red.forward();
    let mut policies: Vec<(&str, PolicyTree)> = vec![("greedy", DtChainSolver.solve(fwd)?)];
    if job.config.oracle.check(fwd).is_ok() {
        let o = opt_threshold(fwd, &job.config.oracle)?;
        let bound = Q::from_integer(2.into()) * opt;
        job.check("naive doubling", o.cost <= bound, || format!("{} > 2 * {}", fmt_q(&o.cost), fmt_q(opt)));
        policies.push(("oracle", o.policy));
    }
    for (name, p) in policies {
        let after = eval_pb(inst, &red.back_translate(&p)?)?;
        let before = eval_threshold(fwd, &p)?;
        job.check("naive pruning", after <= before, || {
            format!("{name}: back {} > forward {}", fmt_q(&after), fmt_q(&before))
        });
    }
    Ok(())
}

pub fn run_corpus(config: &CorpusConfig) -> CorpusReport {
    let parts: Vec<_> = (0..config.count).into_par_iter().map(|id| run_one(config, id)).collect();
    let mut report = CorpusReport::default();
    for (rows, failures, checks) in parts {
        report.rows.extend(rows);
        report.failures.extend(failures);
        report.checks_run += checks;
    }
    report
}
