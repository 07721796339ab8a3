//! Capacity-achieving accumulate-repeat-accumulate (ARA) ensembles for the
//! binary erasure channel.
//!
//! The crate builds the explicit degree-distribution families, checks them by
//! density evolution and a Polya-type non-negativity test, and encodes and
//! decodes finite-length instances for Monte Carlo simulation.

pub mod cli;
pub mod closed_form;
pub mod codec;
pub mod constructions;
pub mod error;
pub mod gf2;
pub mod nonneg;
pub mod powerseries;
pub mod sim;
pub mod tilting;

pub use error::{Error, Result};
pub use powerseries::{Construction, DegreeDistribution, DegreePair, Family, PowerSeries, Side};
