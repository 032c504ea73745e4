//! Set cover with feedback as PB and as a decision tree, with policies
//! carried across in both directions.

use pandora::harness::{gen_msscf, CostMode};
use pandora::model::{eval_dt, eval_msscf, eval_pb};
use pandora::oracle::{opt_dt, opt_msscf, opt_pb, OracleConfig};
use pandora::rational::fmt_q;
use pandora::reduce::{msscf_to_dt, msscf_to_pb, Reduction};
use pandora::solve::{greedy_dt, greedy_msscf};

fn main() -> pandora::Result<()> {
    let cfg = OracleConfig::default();
    let inst = gen_msscf(5, 5, 4, CostMode::Random);

    let to_pb = msscf_to_pb(&inst);
    let greedy = greedy_msscf(&inst)?;
    let as_pb = to_pb.forward_policy(&greedy)?;
    println!("greedy cover {} = as PB {}", fmt_q(&eval_msscf(&inst, &greedy)?), fmt_q(&eval_pb(to_pb.forward(), &as_pb)?));
    let pb_opt = opt_pb(to_pb.forward(), &cfg)?;
    let back = to_pb.back_translate(&pb_opt.policy)?;
    println!(
        "PB optimum {}, back-translated {}, cover optimum {}",
        fmt_q(&pb_opt.cost),
        fmt_q(&eval_msscf(&inst, &back)?),
        fmt_q(&opt_msscf(&inst, &cfg)?.cost)
    );

    let to_dt = msscf_to_dt(&inst);
    for (name, tree) in [("greedy", greedy_dt(to_dt.forward())?), ("optimal", opt_dt(to_dt.forward(), &cfg)?.policy)] {
        let dt_cost = eval_dt(to_dt.forward(), &tree)?;
        let cover = eval_msscf(&inst, &to_dt.back_translate(&tree)?)?;
        println!("{name} tree {} -> cover {} (additive slack {})", fmt_q(&dt_cost), fmt_q(&cover), fmt_q(&to_dt.min_cover_term()));
    }
    println!("bound: {}", to_dt.claimed_bound());
    Ok(())
}
