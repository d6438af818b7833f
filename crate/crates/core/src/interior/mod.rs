//! Geostrophic interior driven by Ekman pumping, its pressure, the bottom
//! corrector and the assembled stationary solution.

pub mod corrector;
pub mod pressure;
pub mod stationary;
pub mod sverdrup;

pub use corrector::{bottom_trace, BottomCorrector, BottomTrace};
pub use pressure::interior_pressure;
pub use stationary::{
    assemble_stationary, assemble_untruncated, layer_aware_rule, AssemblyOptions, SizeNorms,
    StationaryParts, StationarySolution,
};
pub use sverdrup::{
    sverdrup_meridional, vertical_velocity, zonal_velocity, InteriorFlow, InteriorSample,
    PumpingField,
};
