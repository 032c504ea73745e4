//! The mixture dynamic program: a threshold policy, its sampled cost, and
//! the PB phases built on top of it.

use pandora::harness::gen_mixture;
use pandora::mixture::{classify_boxes, dp_solve, mixture_pb_solve, opt_mixture_pb, opt_mixture_threshold, DpConfig};
use pandora::model::simulate;
use pandora::rational::{fmt_q, q, qi};

fn main() -> pandora::Result<()> {
    let inst = gen_mixture(4, 2, 5, &q(1, 2), 3)?;
    let (ib, nib) = classify_boxes(&inst, &[0, 1])?;
    println!("informative {ib:?}, plain {nib:?}");

    let beta = q(1, 2);
    for t in [2, 4, 6] {
        let t = qi(t);
        let sol = dp_solve(&inst, &t, &beta, &DpConfig::default())?;
        let (opt, _) = opt_mixture_threshold(&inst, &t)?;
        let sim = simulate(&sol.policy, 20_000, 3)?;
        println!(
            "T = {}: dp {} exact {} sampled {:.3}  OPT {}  L {:.1}  states {}",
            fmt_q(&t),
            fmt_q(&sol.dp_cost),
            fmt_q(&sol.expected_cost),
            sim.mean,
            fmt_q(&opt),
            sol.budget,
            sol.states
        );
    }

    let pb = mixture_pb_solve(&inst, &beta, &DpConfig::default())?;
    let (opt, _) = opt_mixture_pb(&inst)?;
    println!("PB via phases {} vs OPT {}", fmt_q(&pb.cost), fmt_q(&opt));
    for c in &pb.checks {
        println!("  T = {}: OPT_T {:?} holds {:?}", fmt_q(&c.threshold), c.opt.as_ref().map(fmt_q), c.holds);
    }
    Ok(())
}
