use std::fmt;

use serde::Serialize;

/// Modelling hypotheses whose violation makes a computation meaningless.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// The zonal average of the zonal stress must vanish at every latitude.
    StressCompatibility,
    /// The stress must vanish quadratically at the equator.
    StressVanishingOrder,
    /// Nonvanishing, monotone Coriolis factor with linear behaviour at the equator.
    CoriolisProfile,
    /// Gradient bounds of the layer need a truncation exponent above 3/5.
    TruncationExponent,
    /// Ordering between the Rossby number, viscosity and truncation width.
    DeltaConditions,
    /// Rays on the zero level set never leave the equator.
    NondegenerateRay,
    /// The interior velocity gradient must be dominated by the heat diffusivity.
    AdvectionGradientBound,
    /// Polarization data must vanish near the equator.
    EquatorialSupport,
    /// Velocity data must be divergence free.
    DivergenceFree,
    /// The geostrophic pressure must exist.
    Integrability,
    /// The corrector source must have zero mean.
    ZeroMeanSource,
}

impl Hypothesis {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::StressCompatibility => "stress_compatibility",
            Self::StressVanishingOrder => "stress_vanishing_order",
            Self::CoriolisProfile => "coriolis_profile",
            Self::TruncationExponent => "truncation_exponent",
            Self::DeltaConditions => "delta_conditions",
            Self::NondegenerateRay => "nondegenerate_ray",
            Self::AdvectionGradientBound => "advection_gradient_bound",
            Self::EquatorialSupport => "equatorial_support",
            Self::DivergenceFree => "divergence_free",
            Self::Integrability => "integrability",
            Self::ZeroMeanSource => "zero_mean_source",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("hypothesis `{hypothesis}` violated: {detail}")]
    Hypothesis {
        hypothesis: Hypothesis,
        detail: String,
    },

    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("singular evaluation at the equator (y = {y})")]
    Singular { y: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn hypothesis(hypothesis: Hypothesis, detail: impl Into<String>) -> Self {
        Self::Hypothesis {
            hypothesis,
            detail: detail.into(),
        }
    }

    pub(crate) fn parameter(name: &'static str, detail: impl Into<String>) -> Self {
        Self::InvalidParameter {
            name,
            detail: detail.into(),
        }
    }

    /// True for failures caused by the inputs rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Self::Numerical(_))
    }

    pub fn violated_hypothesis(&self) -> Option<Hypothesis> {
        match self {
            Self::Hypothesis { hypothesis, .. } => Some(*hypothesis),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
