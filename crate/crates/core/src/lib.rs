//! Exact Bayesian posteriors, hiring thresholds, and fairness audits for a
//! two-stage Gaussian screening pipeline.
//!
//! The pipeline: a student's latent type is observed twice with independent
//! Gaussian noise — once by an entrance exam that drives a (possibly
//! randomized, monotone) college admission rule, once by a college grade the
//! employer sees. A rational employer forms the exact posterior on type
//! given admission, grade and group, and hires when the posterior mean
//! clears its cost.
//!
//! * [`gauss`] — stable scalar primitives (pdf/cdf, hazard rate, truncated
//!   means, density products, trivariate conditioning);
//! * [`model`] — domain types and the generative model;
//! * [`posterior`] — closed-form, quadrature and reduction routes to the
//!   employer's posterior, plus the hiring grade threshold g*(C);
//! * [`calibration`] — constructive solvers for the regimes where fairness
//!   goals are attainable, and the γ = 1 fixed-point probe;
//! * [`audit`] — fairness metrics over evaluation grids and threshold
//!   sweeps exhibiting the impossibility results;
//! * [`mc`] — rejection-sampling oracles validating every closed form;
//! * [`quad`], [`rng`] — shared numerical plumbing.

pub mod audit;
pub mod calibration;
pub mod error;
pub mod ext;
pub mod gauss;
pub mod mc;
pub mod model;
pub mod posterior;
pub mod quad;
pub mod rng;

pub use audit::{FairnessReport, GridSpec, SweepOutcome, SweepRecord, SweepTarget};
pub use calibration::CalibrationResult;
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use gauss::{GaussianParams, ProductResult};
pub use mc::McEstimate;
pub use model::{
    AdmissionRule, CostSpec, GradingPolicy, PopulationPrior, Scenario, StudentDraw,
};
pub use posterior::{PosteriorMethod, PosteriorSummary};
