//! Relief-family feature weighting.
//!
//! The crate provides the weighting algorithms (Relief, Relieved, ReliefF,
//! dReliefF, pdReliefF), the difference functions and distances they rely
//! on, the closed-form myopic ReliefF estimate, six seeded synthetic
//! problem generators, and an experiment harness that scores weightings by
//! their separability of relevant from irrelevant features.

pub mod data;
pub mod diff;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod io;
pub mod myopic;
pub mod neighbors;
pub mod plot;
pub mod relief;
pub mod rng;

pub use data::{Dataset, FeatureKind, FeatureMeta, Value};
pub use error::{Error, Result};
pub use generators::{generate, GeneratorSpec, ProblemKind};
pub use relief::{weigh, Progression, ReliefConfig, Variant, WeightVector};
