use std::collections::BTreeMap;

use num::Zero;
use pandora::harness::{gen_dt, gen_explicit, gen_msscf, gen_uniform_threshold, CostMode};
use pandora::model::{eval_dt, eval_msscf, eval_pb, eval_threshold, ExplicitPbInstance, ThresholdPbInstance, Value};
use pandora::oracle::{best_fixed_order, opt_dt, opt_msscf, opt_pb, opt_threshold, order_cost, OracleConfig};
use pandora::rational::{q, qi, Q};
use pandora::solve::{greedy_dt, greedy_msscf, nonadaptive_mssc_order};
use pandora::Error;
use proptest::prelude::*;

/// Plain exhaustive recursion over every adaptive policy, no memo, no pruning.
fn brute_pb(inst: &ExplicitPbInstance, live: &[usize], opened: &mut Vec<usize>) -> Option<Q> {
    let mut best: Option<Q> = None;
    let stop: Option<Q> = live
        .iter()
        .map(|&j| opened.iter().filter_map(|&b| inst.values[b][j].as_finite()).min().map(|v| &inst.probs[j] * v))
        .sum();
    if let Some(s) = stop {
        best = Some(s);
    }
    for a in 0..inst.n() {
        if opened.contains(&a) {
            continue;
        }
        let mass: Q = live.iter().map(|&j| inst.probs[j].clone()).sum();
        let mut total = &inst.costs[a] * mass;
        let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for &j in live {
            groups.entry(inst.values[a][j].to_string()).or_default().push(j);
        }
        opened.push(a);
        let mut ok = true;
        for g in groups.values() {
            match brute_pb(inst, g, opened) {
                Some(v) => total += v,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        opened.pop();
        if ok && best.as_ref().is_none_or(|b| &total < b) {
            best = Some(total);
        }
    }
    best
}

fn cfg() -> OracleConfig {
    OracleConfig::default()
}

#[test]
fn pb_matches_exhaustive_recursion() {
    for seed in 0..60 {
        let inst = gen_explicit(1 + seed as usize % 4, 1 + seed as usize % 4, seed, 3, CostMode::Random);
        let all: Vec<usize> = (0..inst.m()).collect();
        let brute = brute_pb(&inst, &all, &mut Vec::new());
        let opt = opt_pb(&inst, &cfg());
        match brute {
            Some(b) => assert_eq!(opt.unwrap().cost, b, "seed {seed}"),
            None => assert!(opt.is_err(), "seed {seed}"),
        }
    }
}

#[test]
fn single_box_costs_opening_plus_value() {
    let inst = ExplicitPbInstance::new(vec![qi(2)], vec![q(1, 3), q(2, 3)], vec![vec![Value::finite(qi(3)), Value::finite(qi(6))]]);
    assert_eq!(opt_pb(&inst, &cfg()).unwrap().cost, qi(2) + qi(1) + qi(4));
}

#[test]
fn all_infinite_scenario_is_infeasible() {
    let inst = ExplicitPbInstance::new(vec![qi(1)], vec![qi(1)], vec![vec![Value::inf("a")]]);
    assert!(matches!(opt_pb(&inst, &cfg()), Err(Error::Infeasible(_))));
}

#[test]
fn caps_and_state_budget() {
    let big = gen_explicit(3, 13, 0, 3, CostMode::Random);
    assert!(matches!(opt_pb(&big, &cfg()), Err(Error::CapExceeded { .. })));
    let inst = gen_explicit(5, 6, 4, 4, CostMode::Random);
    let tiny = OracleConfig { max_states: 2, ..cfg() };
    assert!(matches!(opt_pb(&inst, &tiny), Err(Error::StateBudget(2))));
}

#[test]
fn threshold_cost_is_not_monotone_in_t() {
    // one box, cost 2, value 0: below 2 the outside option wins
    let base = ExplicitPbInstance::new(vec![qi(2)], vec![qi(1)], vec![vec![Value::finite(qi(0))]]);
    let at = |t: i64| opt_threshold(&ThresholdPbInstance::new(base.clone(), qi(t)), &cfg()).unwrap().cost;
    assert_eq!(at(1), qi(1));
    assert_eq!(at(3), qi(2));
}

#[test]
fn threshold_monotone_between_support_points() {
    for seed in 0..40 {
        let base = gen_explicit(3, 3, seed, 3, CostMode::Random);
        // values are integers, so (k, k + 1/2] contains no support point
        for k in 0..9 {
            let lo = opt_threshold(&ThresholdPbInstance::new(base.clone(), qi(k)), &cfg()).unwrap().cost;
            let hi = opt_threshold(&ThresholdPbInstance::new(base.clone(), qi(k) + q(1, 2)), &cfg()).unwrap().cost;
            assert!(lo <= hi, "seed {seed} k {k}");
        }
    }
}

#[test]
fn cheaper_boxes_never_hurt() {
    for seed in 0..40 {
        let inst = gen_explicit(3, 3, seed, 3, CostMode::Random);
        let Ok(before) = opt_pb(&inst, &cfg()) else { continue };
        let mut cheaper = inst.clone();
        cheaper.costs[seed as usize % 3] = q(1, 2);
        assert!(opt_pb(&cheaper, &cfg()).unwrap().cost <= before.cost);
    }
}

#[test]
fn msscf_adaptive_beats_every_fixed_order() {
    for seed in 0..40 {
        let inst = gen_msscf(4, 4, seed, CostMode::Random);
        let opt = opt_msscf(&inst, &cfg()).unwrap().cost;
        let (order, best) = best_fixed_order(&inst, 8).unwrap();
        assert_eq!(order_cost(&inst, &order).unwrap(), best);
        assert!(opt <= best);
        let greedy_order = nonadaptive_mssc_order(&inst).unwrap();
        assert!(best <= order_cost(&inst, &greedy_order).unwrap());
    }
}

#[test]
fn dt_single_scenario_is_free() {
    let inst = gen_dt(3, 1, 0, CostMode::Random, false);
    assert!(opt_dt(&inst, &cfg()).unwrap().cost.is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_costs_match_evaluators(seed in any::<u64>(), n in 1usize..5, m in 1usize..6) {
        let pb = gen_explicit(n, m, seed, 4, CostMode::Random);
        if let Ok(o) = opt_pb(&pb, &cfg()) {
            prop_assert_eq!(eval_pb(&pb, &o.policy).unwrap(), o.cost);
        }
        let th = gen_uniform_threshold(n, m, seed, 4);
        let o = opt_threshold(&th, &cfg()).unwrap();
        prop_assert_eq!(eval_threshold(&th, &o.policy).unwrap(), o.cost.clone());
        prop_assert!(o.cost <= th.threshold);
        let dt = gen_dt(n.max(2), m, seed, CostMode::Random, false);
        let o = opt_dt(&dt, &cfg()).unwrap();
        prop_assert_eq!(eval_dt(&dt, &o.policy).unwrap(), o.cost);
        let ms = gen_msscf(n, m, seed, CostMode::Random);
        let o = opt_msscf(&ms, &cfg()).unwrap();
        prop_assert_eq!(eval_msscf(&ms, &o.policy).unwrap(), o.cost);
    }

    #[test]
    fn memo_does_not_change_the_answer(seed in any::<u64>(), n in 1usize..4, m in 1usize..5) {
        let off = OracleConfig::without_memo();
        let pb = gen_explicit(n, m, seed, 3, CostMode::Random);
        prop_assert_eq!(opt_pb(&pb, &cfg()).map(|o| o.cost).ok(), opt_pb(&pb, &off).map(|o| o.cost).ok());
        let ms = gen_msscf(n, m, seed, CostMode::Unit);
        prop_assert_eq!(opt_msscf(&ms, &cfg()).unwrap().cost, opt_msscf(&ms, &off).unwrap().cost);
        let dt = gen_dt(n.max(2), m, seed, CostMode::Random, true);
        prop_assert_eq!(opt_dt(&dt, &cfg()).unwrap().cost, opt_dt(&dt, &off).unwrap().cost);
    }

    #[test]
    fn oracles_lower_bound_greedy(seed in any::<u64>(), n in 2usize..6, m in 1usize..6) {
        let ms = gen_msscf(n, m, seed, CostMode::Random);
        let g = eval_msscf(&ms, &greedy_msscf(&ms).unwrap()).unwrap();
        prop_assert!(opt_msscf(&ms, &cfg()).unwrap().cost <= g);
        let dt = gen_dt(n, m, seed, CostMode::Random, false);
        let g = eval_dt(&dt, &greedy_dt(&dt).unwrap()).unwrap();
        prop_assert!(opt_dt(&dt, &cfg()).unwrap().cost <= g);
    }
}

#[test]
fn sampled_costs_agree_with_exact_costs() {
    use pandora::model::simulate::{simulate_msscf, simulate_pb};
    for seed in 0..100 {
        let pb = gen_explicit(3, 4, seed, 4, CostMode::Random);
        if let Ok(o) = opt_pb(&pb, &cfg()) {
            let s = simulate_pb(&pb, &o.policy, 2000, seed).unwrap();
            assert!(s.agrees_with(pandora::rational::to_f64(&o.cost), 5.0), "seed {seed}: {s:?}");
        }
        let ms = gen_msscf(4, 4, seed, CostMode::Random);
        let o = opt_msscf(&ms, &cfg()).unwrap();
        let s = simulate_msscf(&ms, &o.policy, 2000, seed).unwrap();
        assert!(s.agrees_with(pandora::rational::to_f64(&o.cost), 5.0), "seed {seed}: {s:?}");
    }
}
