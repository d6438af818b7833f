//! Parameters, grids, Coriolis profiles and wind stresses shared by every
//! solver, together with the hypothesis checks on them.

pub mod coriolis;
pub mod grid;
pub mod params;
pub mod stress;
pub mod validation;

pub use coriolis::{
    cutoff, validate_coriolis, CoriolisProfile, CoriolisTolerances, DecayRates, TruncatedCoriolis,
    Truncation,
};
pub use grid::{Field, Grid, GridSpec};
pub use params::{nondimensionalize, Parameters, PhysicalScales};
pub use stress::{
    validate_windstress, Harmonic, LatitudeProfile, StressJet, StressTerm, StressTolerances,
    WindStress,
};
pub use validation::{Check, ValidationReport};
