//! Empirical and parametrized measures, the representation of the statistical limit.

mod empirical;
mod parametrized;
mod wasserstein;

pub use empirical::{moments, EmpiricalMeasure, MomentSummary, MERGE_TOLERANCE};
pub use parametrized::{empirical_measure, parametrized_distance, weighted_ergodic_mean, ParametrizedMeasure};
pub use wasserstein::{
    slice_directions, sliced_wasserstein, wasserstein, wasserstein_1d, weak_star_distance, DEFAULT_SLICES,
};
