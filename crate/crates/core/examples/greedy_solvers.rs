//! Greedy decision trees and covers against the exact optimum.

use pandora::harness::{gen_dt, gen_msscf, CostMode};
use pandora::model::{eval_dt, eval_msscf};
use pandora::oracle::{order_cost, opt_dt, opt_msscf, OracleConfig};
use pandora::rational::{fmt_q, to_f64};
use pandora::solve::{greedy_dt, greedy_msscf, nonadaptive_mssc_order};

fn main() -> pandora::Result<()> {
    let cfg = OracleConfig::default();
    println!("seed  greedy-dt/OPT  greedy-msscf/OPT  order/OPT");
    for seed in 0..8 {
        let dt = gen_dt(5, 6, seed, CostMode::Random, false);
        let tree = greedy_dt(&dt)?;
        let a = to_f64(&(eval_dt(&dt, &tree)? / opt_dt(&dt, &cfg)?.cost));

        let ms = gen_msscf(5, 6, seed, CostMode::Random);
        let opt = opt_msscf(&ms, &cfg)?.cost;
        let b = to_f64(&(eval_msscf(&ms, &greedy_msscf(&ms)?)? / &opt));
        let order = nonadaptive_mssc_order(&ms)?;
        let c = to_f64(&(order_cost(&ms, &order)? / &opt));
        println!("{seed:>4}  {a:>13.3}  {b:>16.3}  {c:>9.3}");
    }
    let dt = gen_dt(4, 4, 0, CostMode::Unit, true);
    println!("\ngreedy tree, cost {}:\n{}", fmt_q(&eval_dt(&dt, &greedy_dt(&dt)?)?), greedy_dt(&dt)?.render());
    Ok(())
}
