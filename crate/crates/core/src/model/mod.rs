pub mod eval;
pub mod instance;
pub mod policy;
pub mod simulate;
pub mod validate;
pub mod value;

pub use eval::{
    eval_dt, eval_dt_detail, eval_msscf, eval_msscf_detail, eval_pb, eval_pb_detail, eval_threshold,
    eval_threshold_detail, Evaluation, ScenarioCost,
};
pub use instance::{DtInstance, ExplicitPbInstance, MsscfInstance, ThresholdPbInstance, Violation};
pub use policy::{check_structure, walk, Host, PolicyTree};
pub use simulate::{simulate, CostSampler, SimStats};
pub use validate::validate;
pub use value::{Outcome, Value};
