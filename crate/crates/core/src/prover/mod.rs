//! Finite checks: exhaustive lower-bound searches, the factor-set facts
//! behind the ternary construction, and kernel-repetition analysis of the
//! encoded constructions.

mod backtrack;
mod kernel;
mod main_theorem;
mod urt3;

pub use backtrack::{backtrack_max_length, BacktrackOptions, Constraint, SearchOutcome};
pub use kernel::{
    cut_free_excesses, find_intertwiner, kernel_period_bound, kernel_report, kernel_search, refined_k4_filter,
    telescope, telescope_lengths, KernelPair, TelescopeTrace,
};
pub use main_theorem::{
    check_leaf_factors, construct_w, has_reversed_distinct_pair, leaf_factors, main_code_iter, main_word_iter,
    verify_main, LeafCheck, MainOptions,
};
pub use urt3::{verify_product, verify_urt3, URT3_SCAN_LENGTH};
