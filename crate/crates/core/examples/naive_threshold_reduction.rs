//! PB as a single threshold problem: the threshold optimum is within a
//! factor two, and back-translation never adds cost.

use pandora::harness::{gen_explicit, CostMode};
use pandora::model::{eval_pb, eval_threshold};
use pandora::oracle::{opt_pb, opt_threshold, OracleConfig};
use pandora::rational::{fmt_q, to_f64};
use pandora::reduce::{pb_to_pbt_naive, Reduction};

fn main() -> pandora::Result<()> {
    let cfg = OracleConfig::default();
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let inst = gen_explicit(3, 3, seed, 2, CostMode::Random);
        let red = pb_to_pbt_naive(&inst);
        let opt = opt_pb(&inst, &cfg)?;
        let t_opt = opt_threshold(red.forward(), &cfg)?;
        let back = eval_pb(&inst, &red.back_translate(&t_opt.policy)?)?;
        let r = to_f64(&(&t_opt.cost / &opt.cost));
        worst = worst.max(r);
        println!(
            "seed {seed}: {} boxes at T = {}, OPT {} OPT_T {} back {} ratio {r:.3}",
            red.forward().n(),
            fmt_q(red.threshold()),
            fmt_q(&opt.cost),
            fmt_q(&eval_threshold(red.forward(), &t_opt.policy)?),
            fmt_q(&back)
        );
    }
    println!("worst OPT_T / OPT {worst:.3}");
    Ok(())
}
