use num::{One, Zero};
use pandora::format::Instance;
use pandora::harness::{gen_dt, gen_explicit, gen_msscf, gen_uniform_threshold, CostMode};
use pandora::model::{eval_dt, eval_msscf, eval_pb, eval_threshold, ThresholdPbInstance};
use pandora::oracle::{opt_dt, opt_msscf, opt_pb, opt_threshold, OracleConfig};
use pandora::rational::{q, qi, Q};
use pandora::reduce::{
    expand, msscf_to_dt, msscf_to_pb, pb_phases, pb_phases_uniform, pb_to_pbt_naive, pbt_to_msscf, pbt_to_umsscf, threshold_grid,
    udt_to_msscf, udt_to_umsscf, AnyReduction, ExactThresholdSolver, Reduction, ReductionKind, Sidecar, UniformPhaseParams,
};
use pandora::solve::{greedy_dt, greedy_msscf, DtChainSolver};
use proptest::prelude::*;

fn cfg() -> OracleConfig {
    OracleConfig::default()
}

#[test]
fn expand_examples() {
    let ex = expand(&[q(1, 2), q(3, 10), q(1, 5)], 100).unwrap();
    assert_eq!(ex.counts, vec![5, 3, 2]);
    assert_eq!(ex.copy_source, vec![0, 0, 0, 0, 0, 1, 1, 1, 2, 2]);
    assert_eq!(ex.copy_prob(), q(1, 10));
    assert_eq!(expand(&vec![q(1, 3); 3], 100).unwrap().counts, vec![1, 1, 1]);
    assert!(expand(&[q(1, 1000), q(999, 1000)], 100).is_err());
    assert!(expand(&[], 100).is_err());
}

#[test]
fn uniform_forms_reject_nonuniform_sources() {
    let dt = gen_dt(3, 3, 1, CostMode::Random, false);
    if !dt.has_uniform_probs() {
        assert!(udt_to_umsscf(&dt).is_err());
        assert!(udt_to_msscf(&dt).is_ok());
    }
    let mut th = gen_uniform_threshold(3, 3, 1, 3);
    th.base.probs = vec![q(1, 2), q(1, 4), q(1, 4)];
    assert!(pbt_to_umsscf(&th).is_err());
    assert!(pbt_to_msscf(&th).is_ok());
}

#[test]
fn reduction_kind_mismatch_is_an_error() {
    let pb: Instance = gen_explicit(2, 2, 0, 2, CostMode::Unit).into();
    assert!(AnyReduction::build(ReductionKind::MsscfPb, &pb).is_err());
    assert!(AnyReduction::build(ReductionKind::PbPbtNaive, &pb).is_ok());
}

#[test]
fn sidecar_rebuilds_the_same_forward_instance() {
    let sources: Vec<(ReductionKind, Instance)> = vec![
        (ReductionKind::MsscfPb, gen_msscf(3, 3, 2, CostMode::Random).into()),
        (ReductionKind::MsscfDt, gen_msscf(3, 3, 2, CostMode::Random).into()),
        (ReductionKind::PbPbtNaive, gen_explicit(2, 3, 2, 3, CostMode::Random).into()),
        (ReductionKind::PbtMsscf, gen_uniform_threshold(2, 3, 2, 3).into()),
        (ReductionKind::PbtUmsscf, gen_uniform_threshold(2, 3, 2, 3).into()),
        (ReductionKind::UdtUmsscf, gen_dt(3, 3, 2, CostMode::Random, true).into()),
    ];
    for (kind, src) in sources {
        let red = AnyReduction::build(kind, &src).unwrap();
        let side = Sidecar::new(kind, &src, &red).unwrap();
        let text = serde_json::to_string(&side).unwrap();
        let back: Sidecar = serde_json::from_str(&text).unwrap();
        assert_eq!(back.rebuild().unwrap().forward_instance().to_json(), red.forward_instance().to_json(), "{kind}");
        assert_eq!(side.actions.len(), red.forward_instance().size().0);
    }
}

#[test]
fn threshold_grid_is_sorted_and_reaches_every_cost() {
    let inst = gen_explicit(3, 4, 7, 4, CostMode::Random);
    let grid = threshold_grid(&inst);
    assert!(grid.windows(2).all(|w| w[0] < w[1]));
    assert!(grid.last().unwrap() > &(inst.total_cost() + inst.max_finite_value()));
}

#[test]
fn both_phase_variants_are_feasible() {
    let solver = ExactThresholdSolver::default();
    for seed in 0..30 {
        let inst = gen_explicit(3, 4, seed, 3, CostMode::Random);
        let Ok(opt) = opt_pb(&inst, &cfg()) else { continue };
        let plain = pb_phases(&inst, &solver).unwrap();
        let uni = pb_phases_uniform(&inst, &DtChainSolver, &UniformPhaseParams::default()).unwrap();
        for p in [&plain.tree, &uni.tree] {
            assert!(eval_pb(&inst, p).unwrap() >= opt.cost);
        }
        assert!(plain.phases.iter().all(|r| r.covered_mass >= q(4, 5)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn msscf_pb_forward_and_back(seed in any::<u64>(), n in 1usize..6, m in 1usize..6) {
        let inst = gen_msscf(n, m, seed, CostMode::Random);
        let red = msscf_to_pb(&inst);
        let pb_opt = opt_pb(red.forward(), &cfg()).unwrap();
        let back = eval_msscf(&inst, &red.back_translate(&pb_opt.policy).unwrap()).unwrap();
        prop_assert!(back <= pb_opt.cost.clone());
        prop_assert_eq!(pb_opt.cost, opt_msscf(&inst, &cfg()).unwrap().cost);
    }

    #[test]
    fn msscf_dt_additive_loss(seed in any::<u64>(), n in 1usize..6, m in 1usize..6) {
        let inst = gen_msscf(n, m, seed, CostMode::Random);
        let red = msscf_to_dt(&inst);
        if red.forward().unidentifiable_pair().is_none() {
            for policy in [greedy_dt(red.forward()).unwrap(), opt_dt(red.forward(), &cfg()).unwrap().policy] {
                let dt_cost = eval_dt(red.forward(), &policy).unwrap();
                let back = eval_msscf(&inst, &red.back_translate(&policy).unwrap()).unwrap();
                prop_assert!(back <= dt_cost + red.min_cover_term());
            }
        }
    }

    #[test]
    fn naive_back_translation_prunes(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let inst = gen_explicit(n, m, seed, 2, CostMode::Random);
        let red = pb_to_pbt_naive(&inst);
        let f = opt_threshold(red.forward(), &cfg()).unwrap();
        let back = eval_pb(&inst, &red.back_translate(&f.policy).unwrap()).unwrap();
        prop_assert!(back <= f.cost.clone());
        let opt = opt_pb(&inst, &cfg()).unwrap().cost;
        prop_assert!(opt <= back);
        prop_assert!(f.cost <= qi(2) * opt);
    }

    #[test]
    fn pbt_gadget_per_scenario_bound(seed in any::<u64>(), n in 1usize..4, m in 1usize..4, half in any::<bool>()) {
        let mut inst = gen_uniform_threshold(n, m, seed, 3);
        if half {
            // non-integer threshold: exercises the general gadget
            inst = ThresholdPbInstance::new(inst.base.clone(), &inst.threshold - q(1, 2));
        }
        let red = pbt_to_msscf(&inst).unwrap();
        let policy = greedy_msscf(red.forward()).unwrap();
        for (lhs, rhs) in red.per_scenario_bound(&policy).unwrap() {
            prop_assert!(lhs <= rhs);
        }
        let back = red.back_translate(&policy).unwrap();
        prop_assert!(eval_threshold(&inst, &back).is_ok());
    }

    #[test]
    fn udt_back_translation_at_most_doubles(seed in any::<u64>(), n in 1usize..5, m in 1usize..6) {
        let dt = gen_dt(n, m, seed, CostMode::Random, true);
        let red = udt_to_umsscf(&dt).unwrap();
        let policy = greedy_msscf(red.forward()).unwrap();
        let c = eval_msscf(red.forward(), &policy).unwrap();
        let b = eval_dt(&dt, &red.back_translate(&policy).unwrap()).unwrap();
        prop_assert!(b <= qi(2) * c);
    }

    #[test]
    fn expansion_preserves_proportions(ws in proptest::collection::vec(1i64..20, 1..6)) {
        let total: i64 = ws.iter().sum();
        let probs: Vec<Q> = ws.iter().map(|&w| q(w, total)).collect();
        let ex = expand(&probs, 10_000).unwrap();
        let copies = Q::from_integer(ex.total().into());
        for (p, &c) in probs.iter().zip(&ex.counts) {
            prop_assert_eq!(Q::from_integer(c.into()) / &copies, p.clone());
        }
        prop_assert!(ex.counts.iter().all(|&c| c >= 1));
        prop_assert!(!ex.copy_prob().is_zero() && ex.copy_prob() <= Q::one());
    }
}
