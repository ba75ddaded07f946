//! Deciding and certifying the fixed point property of finite posets.
//!
//! A poset has the fixed point property when every order-preserving
//! self-map has a fixed point. This crate decides it structurally through
//! the minmax-cover component graph and the extremal subposet `E(P)`,
//! produces checkable certificates (fixed-point-free maps, retractions,
//! dismantling sequences), and cross-checks everything against a
//! brute-force homomorphism search.
//!
//! ```
//! use posetfpp::{decide_fpp, fixtures, DecideOptions, Verdict};
//!
//! let report = decide_fpp(&fixtures::hourglass(), DecideOptions::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::True);
//! ```

pub mod decomposition;
pub mod dot;
pub mod error;
pub mod extremal;
pub mod fixtures;
pub mod format;
pub mod oracle;
pub mod par;
pub mod poset;
pub mod retract;
pub mod set;
pub mod zigzag;

pub use decomposition::{
    component_graph, decide_fpp, delete_edge, minmax_covers, p_cross, schroeder_split,
    AnalysisReport, Certificate, ComponentGraph, DecideOptions, Method, MinMaxCovers, Verdict,
};
pub use error::{Error, Result};
pub use extremal::{
    characterize_ep, check_necessary, classify_4crown, ep_sufficient, find_retract_crown_ep,
    lift_crown_retraction, project_endomorphism, splitting_antichain, CrownClass, CrownKind,
    SplittingAntichain,
};
pub use oracle::{
    enumerate_homomorphisms, fpp_bruteforce, generate, retract_bruteforce, Family, SearchBudget,
};
pub use poset::Poset;
pub use retract::{
    abian_brown, bundle_retract, crown_retraction_flat, i_dismantle, i_retract, irreducible_points,
    normalize_retract, PosetMap,
};
pub use set::ElemSet;
pub use zigzag::{
    classify_sequence, crown_caps, enumerate_crowns, fence_distance, find_crown, Crown,
    SequenceKind,
};
