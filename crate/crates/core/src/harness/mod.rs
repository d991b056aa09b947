//! Scenario construction and verification.

mod corpus;
mod profile;
mod report;
mod rng;
mod verify;

pub use corpus::{
    corpus, corpus_range, heavy_pair, power_weight, spiked_pair, CorpusConfig, CorpusItem,
    CorpusKind, WEIGHT_FLOOR,
};
pub use profile::{example_profiles, make_profile, ExponentProfile, RawExponents, TheoremTag};
pub use report::{ratio_of, summarize, to_csv, Report, Summary, CSV_HEADER};
pub use rng::Stream;
pub use verify::{
    calibrated, dilation_config, dilation_ratios, dilation_reports, dilation_setup, drift,
    global_term_root, global_term_terms, inequality_terms, local_sparse_setup, local_sparse_terms,
    one_third_reports, pointwise_terms, power_scaling_reports, profile_check_name,
    reverse_holder_chain, scaling_discrepancy, sparse_reports, sparse_setup, stable_epsilon,
    verify_global_term, verify_inequality, verify_local_sparse, verify_pointwise_domination,
    verify_structural, ChainValues, Context, Domination, Scenario, SuiteResult, Terms, MARGIN,
};
