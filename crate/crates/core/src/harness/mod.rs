//! Seeded randomized verification suites and a sharpness search.
//!
//! Every trial draws from its own stream derived from `(seed, trial index)`,
//! so reports are identical whether trials run serially or in parallel.

mod config;
mod generate;
mod report;
mod rng;
mod sharpness;
mod suites;

pub use config::{FixedTrial, FuncFamily, ScaleFamily, TrialConfig};
pub use generate::{draw_trial, gen_random_func, gen_random_scale, gen_scale_of, gen_trial_on, Trial};
pub use report::{Aggregate, Outcome, Row, SuiteReport, Witness, CHAIN_CHECK, GRUSS_CHECK};
pub use rng::{mix64, trial_rng, TrialRng};
pub use sharpness::{sharpness_search, SharpnessConfig, SharpnessResult};
pub use suites::{run_bound_suite, run_crosscheck_suite, run_identity_suite, CROSSCHECK_RTOL};
