// Index loops mirror the formulas; negated comparisons reject NaN on purpose.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod pseudo;
pub mod relaxation;
pub mod rng;
pub mod rounding;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
pub use graph::{Graph, PartialColoring};
pub use pseudo::{Alphabet, PseudoDistribution};
pub use relaxation::SolverConfig;
pub use rounding::{Mode, PipelineConfig, RoundingReport};
