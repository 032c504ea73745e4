//! Uniform decision trees and the set-cover encoding, both directions.

use pandora::harness::{gen_dt, CostMode};
use pandora::model::{eval_dt, eval_msscf};
use pandora::oracle::{opt_dt, opt_msscf, OracleConfig};
use pandora::rational::fmt_q;
use pandora::reduce::{udt_to_umsscf, Reduction};
use pandora::solve::greedy_msscf;

fn main() -> pandora::Result<()> {
    let cfg = OracleConfig::default();
    let dt = gen_dt(4, 5, 2, CostMode::Random, true);
    let red = udt_to_umsscf(&dt)?;
    let cover = red.forward();
    println!("{} tests + {} isolating elements", dt.n(), cover.n() - dt.n());

    let tree_opt = opt_dt(&dt, &cfg)?;
    let cover_opt = opt_msscf(cover, &cfg)?;
    let leaf = red.leaf_isolating_policy(&tree_opt.policy)?;
    println!(
        "OPT_dt {}  OPT_msscf {}  tree + isolation {}",
        fmt_q(&tree_opt.cost),
        fmt_q(&cover_opt.cost),
        fmt_q(&eval_msscf(cover, &leaf)?)
    );
    let greedy = greedy_msscf(cover)?;
    let back = red.back_translate(&greedy)?;
    println!("greedy cover {} -> tree {}", fmt_q(&eval_msscf(cover, &greedy)?), fmt_q(&eval_dt(&dt, &back)?));
    println!("bound: {}", red.claimed_bound());
    Ok(())
}
