//! Polar transforms of 1/s-concave and log-concave functions, integrals of
//! their polars, Santaló points and Santaló regions.

pub mod error;
pub mod funcmodel;
pub mod lifting;
mod optim;
pub mod polar_integrals;
pub mod regions;
pub mod santalo;
pub mod transforms;
pub mod verify;
mod vecops;

pub use error::{Error, Result, Violation};
pub use funcmodel::{Bounds, Concavity, Family, FunctionSpec, SupportClassification};
