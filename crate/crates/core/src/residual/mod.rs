//! Residuals of the stationary equations, dual norms and scaling studies.

pub mod delta;
pub mod divergence;
pub mod norms;
pub mod operator;
pub mod report;
pub mod study;

pub use delta::{check_delta_conditions, delta_report, DeltaCondition, DEFAULT_MARGIN};
pub use divergence::{divergence_check, DivergenceCheck, DIVERGENCE_MIN_LATITUDE};
pub use norms::{dual_norm, edge_ratio, l2_level};
pub use operator::{apply_stationary_operator, horizontal_step, PointResidual};
pub use report::{residual_report, NormKind, ResidualReport, TermNorm};
pub use study::{scaling_study, PowerRule, ScalingStudy, SlopeEntry, StudyTemplate, Verdict};
