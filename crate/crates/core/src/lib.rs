//! Sum-capacity bounds for discrete memoryless multiple-access channels
//! whose encoders cooperate through a rate-limited facilitator node.
//!
//! The crate computes, at desk scale on small channels:
//!
//! - exact finite-alphabet information primitives and block extensions
//!   ([`pmf`], [`channel`], [`joint`]);
//! - the dependence-constrained mutual-information maximization σ_n(δ) and
//!   its unconstrained relatives, with a brute-force grid oracle for tiny
//!   channels ([`opt`]);
//! - the constructive procedures behind the bounds: greedy coordinate
//!   decomposition, auxiliary-alphabet reduction to two points,
//!   concatenation, and time-sharing ([`structure`]);
//! - the closed-form bounds: the sum-capacity sandwich, the single-letter
//!   upper bound, the explicit continuity modulus, input-link continuity,
//!   and the strict-gain class test ([`bounds`]).
//!
//! All rates are in bits per channel use; all logarithms are base 2.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod joint;
pub mod opt;
pub mod pmf;
pub mod simplex;
pub mod structure;

pub use bounds::{
    cin_delta_bound, concave_diff_bound, csum_lower, csum_upper, cstar_test, forwarding_bounds,
    format_sig9, sigma1_modulus, BoundCurve, BoundSample, CstarVerdict, ForwardingBounds,
};
pub use channel::{binary_adder_mac, load_mac, mac_from_json, mac_to_json, CfConfig, DiscreteMac};
pub use error::{Error, Result};
pub use joint::{conditional_mutual_information, JointInputDist};
pub use opt::oracle::{brute_force_oracle, grid_error_bound};
pub use opt::{
    full_knowledge_cin, max_mi_independent, max_mi_joint, sigma1, sigma_n, OptimizerConfig,
    SigmaEvaluation,
};
pub use pmf::{entropy, kl_divergence, l1_distance, Pmf};
pub use structure::{
    concat_distributions, dueck_decompose, reduce_cardinality, time_share, CardinalityReduction,
    DueckResult,
};
