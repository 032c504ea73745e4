pub mod dp;
pub mod enumerate;
pub mod evidence;
pub mod instance;
pub mod phases;

pub use dp::{dp_delta, dp_solve, informative_budget, DpConfig, DpSolution, MixturePolicy};
pub use enumerate::{eval_mixture_pb, eval_mixture_threshold, opt_mixture_pb, opt_mixture_threshold, to_explicit};
pub use evidence::{
    best_noninformative, classify_boxes, eliminate, elimination_threshold, favors, noninformative_order, update_evidence,
    Evidence,
};
pub use instance::{tv_distance, Dist, MixtureInstance};
pub use phases::{mixture_pb_solve, MixtureDpSolver, MixturePbSolution, PhaseCheck};
