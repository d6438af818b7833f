//! Wind-driven circulation in a thin equatorial ocean layer with a Coriolis
//! factor that vanishes at the equator.
//!
//! The crate builds the stationary response to a surface wind stress (an
//! Ekman surface layer, a geostrophic interior driven by Ekman pumping and an
//! exponentially small bottom corrector), measures how well it solves the
//! rescaled equations, propagates transient perturbations (Rossby waves
//! exactly in Fourier space, Poincaré waves along rays of their principal
//! symbol) and solves the temperature problem advected by the stationary flow.

pub mod ekman;
pub mod error;
pub mod interior;
pub mod model;
pub mod numerics;
pub mod poincare;
pub mod residual;
pub mod rossby;
pub mod thermocline;

pub use error::{Error, Hypothesis, Result};
