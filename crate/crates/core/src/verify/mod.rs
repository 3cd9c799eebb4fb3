//! Exact audits of linear LDCs: entropy oracle, decoding-set checks,
//! structural properties, N-ary trees, the converse chain, and erasure or
//! corruption tolerance.

pub mod checks;
pub mod converse;
pub mod distance;
pub mod entropy;
pub mod information;
pub mod report;
pub mod tree;

pub use checks::{check_correctness, check_smoothness, check_universality};
pub use converse::{audit_converse_chain, ConverseAudit};
pub use distance::{corruption_trial, min_distance, min_distance_sampled, SuccessProbability, TrialMode};
pub use entropy::{conditional_entropy, EntropyQuery};
pub use information::{
    check_capacity_properties, distinct_information, same_information, Property, PropertyReport,
};
pub use report::{run_checks, CheckKind, CheckOutcome, Status, VerifyOptions, VerifyReport};
pub use tree::{build_nary_tree, for_each_tree, leaf_distinctness, sample_trees, Chooser, NaryTree};
