use num::One;
use pandora::harness::{gen_mixture, MixtureGen};
use pandora::mixture::{
    classify_boxes, dp_solve, eliminate, eval_mixture_pb, eval_mixture_threshold, mixture_pb_solve, opt_mixture_pb,
    opt_mixture_threshold, to_explicit, tv_distance, update_evidence, Dist, DpConfig, Evidence, MixtureInstance,
};
use pandora::model::{eval_pb, simulate};
use pandora::oracle::{opt_pb, OracleConfig};
use pandora::rational::{q, qi, to_f64, Q};
use proptest::prelude::*;

fn dp(inst: &MixtureInstance, t: &Q) -> pandora::mixture::DpSolution {
    dp_solve(inst, t, &q(1, 2), &DpConfig::default()).unwrap()
}

#[test]
fn tv_distance_examples() {
    let a = Dist::new([(qi(0), q(1, 2)), (qi(1), q(1, 2))]);
    let b = Dist::new([(qi(1), q(1, 4)), (qi(2), q(3, 4))]);
    assert_eq!(tv_distance(&a, &b).unwrap(), q(3, 4));
    assert_eq!(tv_distance(&a, &a).unwrap(), qi(0));
}

#[test]
fn separability_violation_is_reported() {
    let a = Dist::new([(qi(0), q(1, 2)), (qi(1), q(1, 2))]);
    let b = Dist::new([(qi(0), q(3, 5)), (qi(1), q(2, 5))]);
    let inst = MixtureInstance::new(vec![qi(1)], vec![q(1, 2), q(1, 2)], vec![vec![a, b]], q(1, 2));
    assert!(classify_boxes(&inst, &[0, 1]).is_err());
    assert!(dp_solve(&inst, &qi(2), &q(1, 2), &DpConfig::default()).is_err());
}

#[test]
fn informative_set_shrinks_with_fewer_components() {
    for seed in 0..40 {
        let inst = gen_mixture(4, 3, seed, &q(1, 2), 3).unwrap();
        let (full, _) = classify_boxes(&inst, &[0, 1, 2]).unwrap();
        for pair in [[0, 1], [0, 2], [1, 2]] {
            let (sub, _) = classify_boxes(&inst, &pair).unwrap();
            assert!(sub.iter().all(|b| full.contains(b)));
        }
        assert!(classify_boxes(&inst, &[1]).unwrap().0.is_empty());
    }
}

#[test]
fn single_component_dp_is_optimal() {
    for seed in 0..30 {
        let inst = gen_mixture(2 + seed as usize % 3, 1, seed, &q(1, 2), 3).unwrap();
        for t in 1..6 {
            let t = qi(t);
            let (opt, _) = opt_mixture_threshold(&inst, &t).unwrap();
            assert_eq!(dp(&inst, &t).expected_cost, opt, "seed {seed} T {t}");
        }
    }
}

#[test]
fn dp_never_beats_the_optimum() {
    for seed in 0..20 {
        let inst = gen_mixture(3, 2, seed, &Q::one(), 2).unwrap();
        let t = qi(3);
        let sol = dp(&inst, &t);
        let (opt, _) = opt_mixture_threshold(&inst, &t).unwrap();
        assert!(sol.expected_cost >= opt);
        assert_eq!(eval_mixture_threshold(&inst, &t, sol.policy.tree()).unwrap(), sol.expected_cost);
        assert!(sol.expected_cost <= t);
    }
}

#[test]
fn dp_memo_off_agrees() {
    let off = DpConfig { memo: false, ..DpConfig::default() };
    for seed in 0..20 {
        let n = 2 + seed as usize % 3;
        let m = 1 + seed as usize % 2;
        let inst = gen_mixture(n, m, seed, &q(3, 4), 2).unwrap();
        let t = qi(2 + seed as i64 % 3);
        let a = dp(&inst, &t);
        let b = dp_solve(&inst, &t, &q(1, 2), &off).unwrap();
        assert_eq!(a.dp_cost, b.dp_cost);
        assert_eq!(a.expected_cost, b.expected_cost);
    }
}

#[test]
fn history_brute_force_matches_explicit_oracle() {
    for seed in 0..20 {
        let inst = gen_mixture(3, 2, seed, &q(1, 2), 2).unwrap();
        let ex = to_explicit(&inst, 12).unwrap();
        let (brute, tree) = opt_mixture_pb(&inst).unwrap();
        assert_eq!(opt_pb(&ex, &OracleConfig::default()).unwrap().cost, brute);
        assert_eq!(eval_pb(&ex, &tree).unwrap(), brute);
        assert_eq!(eval_mixture_pb(&inst, &tree).unwrap(), brute);
    }
}

#[test]
fn mixture_pb_phases_are_feasible() {
    for seed in 0..10 {
        let inst = gen_mixture(3, 2, seed, &q(1, 2), 2).unwrap();
        let sol = mixture_pb_solve(&inst, &q(1, 2), &DpConfig::default()).unwrap();
        let (opt, _) = opt_mixture_pb(&inst).unwrap();
        assert!(sol.cost >= opt);
        assert_eq!(eval_pb(&sol.explicit, &sol.phased.tree).unwrap(), sol.cost);
    }
}

#[test]
fn sampled_cost_agrees_with_exact() {
    for seed in 0..100u64 {
        let inst = gen_mixture(3, 2, seed, &q(1, 2), 2).unwrap();
        let sol = dp(&inst, &qi(3));
        let stats = simulate(&sol.policy, 2000, seed).unwrap();
        assert!(stats.agrees_with(to_f64(&sol.expected_cost), 5.0), "seed {seed}: {stats:?}");
    }
}

#[test]
fn identical_components_need_no_evidence() {
    let g = MixtureGen { n: 3, m: 2, epsilon: q(1, 2), support: 2, all_identical: true };
    let inst = g.generate(4).unwrap();
    let sol = dp(&inst, &qi(3));
    let (opt, _) = opt_mixture_threshold(&inst, &qi(3)).unwrap();
    assert_eq!(sol.expected_cost, opt);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eliminate_never_empties(seed in any::<u64>(), draws in proptest::collection::vec((0usize..4, 0usize..3), 0..60)) {
        let inst = gen_mixture(4, 3, seed, &q(1, 2), 3).unwrap();
        let live = [0, 1, 2];
        let mut e = Evidence::new(3);
        for (b, k) in draws {
            let pts = inst.dist(b, 0).points();
            let v = pts[k % pts.len()].0.clone();
            e = update_evidence(&e, b, &v, &inst, &live);
            for delta in [q(1, 2), q(1, 10)] {
                let kept = eliminate(&e, &live, &inst, &delta);
                prop_assert!(!kept.is_empty());
                prop_assert!(kept.iter().all(|c| live.contains(c)));
            }
        }
    }
}
