//! Closed-form laws, bound formulas, sup statistics and their verifiers.

pub mod bounds;
pub mod converge;
pub mod distance;
pub mod pmf;
pub mod rate;
pub mod stats;
pub mod verify;

pub use bounds::{
    hoeffding_threshold, ldi_bound, ldi_threshold, local_time_tail_bound, log_star, BoundParams,
    LemmaId,
};
pub use converge::{convergence_study, ConvergenceRow, ConvergenceStudy};
pub use distance::{
    sup_field_distance, sup_lattice_distance_consecutive, sup_lattice_path_distance,
    sup_path_distance, LatticeStatistic,
};
pub use pmf::exact_local_time_pmf;
pub use rate::{rate_fit, RateFit};
pub use verify::{verify_lemma, verify_lemmas, Status, VerificationReport, VerifyConfig};
