//! Partial group equivariant non-expansive operators (P-GENEOs) on finite
//! domains.
//!
//! Measurements are tabulated functions on a finite set `X`, domain
//! bijections act on them on the right, and every supremum in the theory is an
//! exact maximum. The crate computes the induced pseudo-metrics, decides which
//! bijections are admissible for a pair of measurement spaces, certifies
//! candidate operator triples `(F, F′, T)`, builds new ones by composition,
//! pointwise aggregation and convex combination, and produces ε-nets that
//! witness total boundedness.

pub mod builders;
pub mod covering;
pub mod domain;
pub mod error;
pub mod instance;
pub mod metrics;
pub mod operations;
pub mod pgeneo;

pub use domain::{
    right_action, space_membership, uniform_distance, uniform_norm, DomainMap, FiniteDomain, Measurement,
    MeasurementSpace, PerceptionTriple, Tolerances,
};
pub use error::{Error, Result};
pub use pgeneo::{certify, Certificate, OperatorPair, TabulatedMap, TransformationMap};
