//! Shared fixtures for the pipeline benchmarks.

use screening_core::model::{CostSpec, GradingPolicy, PopulationPrior, Scenario};

/// The canonical two-group scenario with an interval of hiring costs.
pub fn canonical_interval() -> Scenario {
    Scenario::new(
        PopulationPrior::new(0.0, 1.0).expect("valid prior"),
        PopulationPrior::new(-1.0, 1.0).expect("valid prior"),
        GradingPolicy::new(1.0, true).expect("valid grading"),
        CostSpec::new(0.3, 0.7).expect("valid cost interval"),
    )
}

/// A uniform threshold grid.
pub fn beta_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -3.0 + 6.0 * i as f64 / (n - 1) as f64)
        .collect()
}
