//! Builds a small PB instance by hand, writes two policies as trees and
//! compares their exact and sampled costs.

use pandora::model::simulate::simulate_pb;
use pandora::model::{eval_pb_detail, ExplicitPbInstance, Outcome, PolicyTree, Value};
use pandora::rational::{fmt_q, q, qi, to_f64};

fn main() -> pandora::Result<()> {
    // two boxes, two equally likely scenarios
    let inst = ExplicitPbInstance::new(
        vec![qi(1), qi(2)],
        vec![q(1, 2), q(1, 2)],
        vec![
            vec![Value::finite(qi(0)), Value::finite(qi(8))],
            vec![Value::finite(qi(3)), Value::finite(qi(3))],
        ],
    );
    let open_b1 = PolicyTree::act(1, [(Outcome::new("3"), PolicyTree::StopWithBest)]);
    let adaptive = PolicyTree::act(0, [(Outcome::new("0"), PolicyTree::StopWithBest), (Outcome::new("8"), open_b1.clone())]);

    for (name, policy) in [("box 1 only", &open_b1), ("box 0 then 1 on 8", &adaptive)] {
        let ev = eval_pb_detail(&inst, policy)?;
        let sim = simulate_pb(&inst, policy, 10_000, 1)?;
        println!("{name}: exact {} sampled {:.3} +- {:.3}", fmt_q(&ev.expected), sim.mean, sim.stderr);
        for (j, sc) in ev.per_scenario.iter().enumerate() {
            println!("  scenario {j}: opened {:?}, pays {}", sc.actions, fmt_q(&sc.total()));
        }
        assert!(sim.agrees_with(to_f64(&ev.expected), 5.0));
    }
    println!("{}", adaptive.render());
    Ok(())
}
