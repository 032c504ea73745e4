pub mod greedy;
pub mod nonadaptive;
pub mod pipeline;

pub use greedy::{greedy_dt, greedy_msscf};
pub use nonadaptive::{nonadaptive_mssc_order, order_policy};
pub use pipeline::{pipeline_pb_direct, pipeline_pb_via_udt, pipeline_pb_via_udt_with, DtChainSolver};
