//! Both end-to-end PB pipelines, which never call an exact oracle.

use pandora::harness::{gen_explicit, CostMode};
use pandora::model::{eval_pb, eval_threshold, ThresholdPbInstance};
use pandora::oracle::{opt_pb, OracleConfig};
use pandora::rational::{fmt_q, qi};
use pandora::reduce::ThresholdSolver;
use pandora::solve::{pipeline_pb_direct, pipeline_pb_via_udt, DtChainSolver};

fn main() -> pandora::Result<()> {
    for seed in 0..6 {
        let inst = gen_explicit(4, 5, seed, 4, CostMode::Random);
        let direct = eval_pb(&inst, &pipeline_pb_direct(&inst)?)?;
        let phased = pipeline_pb_via_udt(&inst)?;
        let via = eval_pb(&inst, &phased.tree)?;
        let opt = opt_pb(&inst, &OracleConfig::default()).map(|o| fmt_q(&o.cost)).unwrap_or_else(|e| e.to_string());
        println!("seed {seed}: direct {:>6}  via-udt {:>6} ({} phases)  OPT {opt}", fmt_q(&direct), fmt_q(&via), phased.phases.len());
    }

    // the threshold solver on its own
    let inst = ThresholdPbInstance::new(gen_explicit(4, 5, 0, 4, CostMode::Random), qi(3));
    let policy = DtChainSolver.solve(&inst)?;
    println!("\nPB<=3 through the decision-tree chain: {}", fmt_q(&eval_threshold(&inst, &policy)?));
    Ok(())
}
