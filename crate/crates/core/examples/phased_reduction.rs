//! PB solved as a sequence of threshold phases with the exact solver.

use pandora::harness::{gen_explicit, CostMode};
use pandora::model::eval_pb;
use pandora::oracle::{opt_pb, OracleConfig};
use pandora::rational::fmt_q;
use pandora::reduce::{pb_phases, ExactThresholdSolver};

fn main() -> pandora::Result<()> {
    let inst = gen_explicit(5, 6, 11, 4, CostMode::Random);
    let phased = pb_phases(&inst, &ExactThresholdSolver::default())?;
    for (k, p) in phased.phases.iter().enumerate() {
        println!(
            "phase {k}: T = {:>3}, {} live, covered mass {}, removed {:?}",
            fmt_q(&p.threshold),
            p.remaining.len(),
            fmt_q(&p.covered_mass),
            p.removed
        );
    }
    println!("stop phase per scenario {:?}", phased.stop_phase);
    println!("ski-rental violations {:?}", phased.ski_rental_violations(&inst)?);
    let cost = eval_pb(&inst, &phased.tree)?;
    let opt = opt_pb(&inst, &OracleConfig::default())?.cost;
    println!("phased cost {} vs optimum {}", fmt_q(&cost), fmt_q(&opt));
    Ok(())
}
