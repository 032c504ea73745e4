pub mod corpus;
pub mod gen;

pub use corpus::{run_corpus, Algo, CorpusConfig, CorpusReport, Row};
pub use gen::{gen_dt, gen_explicit, gen_mixture, gen_msscf, gen_uniform_threshold, CostMode, ExplicitGen, MixtureGen};
