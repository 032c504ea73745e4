use pandora::harness::{gen_dt, gen_explicit, gen_msscf, CostMode};
use pandora::model::{eval_dt, eval_msscf, eval_pb, DtInstance, MsscfInstance, Outcome, PolicyTree};
use pandora::oracle::{opt_pb, order_cost, OracleConfig};
use pandora::rational::{q, qi};
use pandora::solve::{greedy_dt, greedy_msscf, nonadaptive_mssc_order, order_policy, pipeline_pb_direct, pipeline_pb_via_udt};
use proptest::prelude::*;

fn leaves(tree: &PolicyTree, out: &mut Vec<usize>) {
    match tree {
        PolicyTree::Identified(s) => out.push(*s),
        PolicyTree::Act { children, .. } => children.values().for_each(|c| leaves(c, out)),
        _ => {}
    }
}

#[test]
fn greedy_dt_prefers_the_cheaper_equal_split() {
    // tests 0 and 1 split the same way; 1 is cheaper
    let o = |xs: &[&str]| xs.iter().map(|s| Outcome::new(*s)).collect::<Vec<_>>();
    let inst = DtInstance::new(vec![qi(3), qi(1)], vec![q(1, 2), q(1, 2)], vec![o(&["a", "b"]), o(&["a", "b"])]);
    let tree = greedy_dt(&inst).unwrap();
    assert!(matches!(tree, PolicyTree::Act { action: 1, .. }));
    assert_eq!(eval_dt(&inst, &tree).unwrap(), qi(1));
}

#[test]
fn greedy_msscf_tie_goes_to_lowest_id() {
    let f = vec![vec![Outcome::new("x")]; 2];
    let inst = MsscfInstance::new(vec![qi(1), qi(1)], vec![qi(1)], vec![vec![true], vec![true]], f);
    assert!(matches!(greedy_msscf(&inst).unwrap(), PolicyTree::Act { action: 0, .. }));
}

#[test]
fn order_policy_runs_out() {
    let f = vec![vec![Outcome::new("x"); 2]; 2];
    let inst = MsscfInstance::new(vec![qi(1), qi(2)], vec![q(1, 2), q(1, 2)], vec![vec![true, false], vec![false, true]], f);
    assert!(order_policy(&inst, &[0]).is_err());
    assert_eq!(order_cost(&inst, &[0, 1]).unwrap(), qi(2));
}

#[test]
fn pipelines_on_a_fixed_corpus() {
    for seed in 0..40 {
        let inst = gen_explicit(1 + seed as usize % 4, 1 + seed as usize % 5, seed, 3, CostMode::Random);
        let Ok(opt) = opt_pb(&inst, &OracleConfig::default()) else { continue };
        let direct = eval_pb(&inst, &pipeline_pb_direct(&inst).unwrap()).unwrap();
        let phased = pipeline_pb_via_udt(&inst).unwrap();
        let via = eval_pb(&inst, &phased.tree).unwrap();
        assert!(direct >= opt.cost && via >= opt.cost, "seed {seed}");
        assert_eq!(phased.stop_phase.len(), inst.m());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_dt_identifies_every_scenario_once(seed in any::<u64>(), n in 1usize..7, m in 1usize..8) {
        let inst = gen_dt(n, m, seed, CostMode::Random, false);
        let tree = greedy_dt(&inst).unwrap();
        prop_assert!(tree.depth() < m.max(2));
        let mut ids = Vec::new();
        leaves(&tree, &mut ids);
        ids.sort_unstable();
        prop_assert_eq!(ids, (0..m).collect::<Vec<_>>());
        prop_assert!(eval_dt(&inst, &tree).is_ok());
    }

    #[test]
    fn nonadaptive_order_ignores_feedback(seed in any::<u64>(), n in 1usize..7, m in 1usize..7) {
        let inst = gen_msscf(n, m, seed, CostMode::Random);
        let mut relabeled = inst.clone();
        for row in &mut relabeled.feedback {
            for f in row.iter_mut() {
                *f = Outcome::new(format!("{}'", f.as_str()));
            }
        }
        let order = nonadaptive_mssc_order(&inst).unwrap();
        prop_assert_eq!(&order, &nonadaptive_mssc_order(&relabeled).unwrap());
        let mut sorted = order.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        let policy = order_policy(&inst, &order).unwrap();
        prop_assert_eq!(eval_msscf(&inst, &policy).unwrap(), order_cost(&inst, &order).unwrap());
    }

    #[test]
    fn greedy_msscf_is_feasible(seed in any::<u64>(), n in 1usize..8, m in 1usize..8) {
        let inst = gen_msscf(n, m, seed, CostMode::Random);
        prop_assert!(eval_msscf(&inst, &greedy_msscf(&inst).unwrap()).is_ok());
    }
}
