//! Point-membership evaluation, random sampling, and the agreement oracle.

pub mod eval;
pub mod oracle;
pub mod sample;
pub mod zariski;

pub use eval::{env_from, eval_formula, eval_term, eval_term_at, Env, EvalError, Verdict};
pub use oracle::{
    agreement_over, check_agreement, exists_check, sampled_points, Counterexample, ExistsOutcome,
    OracleConfig, Report, Status,
};
pub use sample::{sample_point, sample_scalar, SampleParams};
pub use zariski::{zariski_independence, ZariskiError};
