//! Threshold rounding of conditioned pseudo-distributions into partial
//! 3-colorings and independent sets, the lemmas behind it, and the
//! end-to-end pipelines.

mod lemmas;
mod pipeline;
mod report;
mod round;

pub use lemmas::{
    color_overlap, correlation_lower_bound, edge_local_correlation, four_color_counterexample,
    verify_local_correlation_lemma, CorrelationBound, EdgeCorrelation, FourColorReport,
    LocalCorrelation, LocalCorrelationCheck,
};
pub use pipeline::{
    default_rounds, solve_3coloring, solve_max_is, Mode, PipelineConfig, COLORING_DELTA_CONSTANT,
    EXACT_SAMPLES, MAX_DEFAULT_ROUNDS, SDP_SAMPLES,
};
pub use report::{
    ColoringSets, ConditioningSummary, Diagnostics, EdgeCountIdentity, EdgeStats, IndependentSets,
    Ledger, LocalCorrelationChain, MarkovBound, MassBound, RoundingReport, Sets,
};
pub use round::{round_3coloring, round_independent_set, COLORING_GAMMA, MEMBERSHIP_SLACK};
