//! Exact optima for each problem on seeded random instances.

use pandora::harness::{gen_dt, gen_explicit, gen_msscf, gen_uniform_threshold, CostMode};
use pandora::oracle::{best_fixed_order, opt_dt, opt_msscf, opt_pb, opt_threshold, OracleConfig};
use pandora::rational::fmt_q;

fn main() -> pandora::Result<()> {
    let cfg = OracleConfig::default();

    let pb = gen_explicit(4, 5, 1, 4, CostMode::Random);
    let o = opt_pb(&pb, &cfg)?;
    println!("PB      cost {:>8}  states {:>5}  depth {}", fmt_q(&o.cost), o.states, o.policy.depth());

    let pbt = gen_uniform_threshold(4, 5, 1, 4);
    let o = opt_threshold(&pbt, &cfg)?;
    println!("PB<=T   cost {:>8}  states {:>5}  T = {}", fmt_q(&o.cost), o.states, fmt_q(&pbt.threshold));

    let dt = gen_dt(4, 6, 1, CostMode::Random, false);
    let o = opt_dt(&dt, &cfg)?;
    println!("DT      cost {:>8}  states {:>5}  depth {}", fmt_q(&o.cost), o.states, o.policy.depth());

    let ms = gen_msscf(5, 5, 1, CostMode::Random);
    let o = opt_msscf(&ms, &cfg)?;
    let (order, fixed) = best_fixed_order(&ms, 8)?;
    println!("MSSC_f  cost {:>8}  states {:>5}  best fixed order {order:?} costs {}", fmt_q(&o.cost), o.states, fmt_q(&fixed));

    let off = opt_pb(&pb, &OracleConfig::without_memo())?;
    println!("PB without memo agrees: {}", off.cost == opt_pb(&pb, &cfg)?.cost);
    Ok(())
}
