//! Krasner's γ-hyperfields of a discretely valued field, the tower of
//! projections between them, and the completion rebuilt as its limit.
//!
//! Everything is generic over [`ValuedField`]; the aliases below fix the
//! common instances.

pub mod basefields;
pub mod error;
pub mod krasner;
pub mod limit;
pub mod oag;
pub mod sampling;
pub mod suites;
pub mod tower;

pub use basefields::{
    Approximation, FieldDescriptor, FunctionField, QuadraticField, RationalField, ValuedField,
};
pub use error::{Error, Result};
pub use krasner::{GammaCoset, HyperSum, Level};
pub use limit::{CoherentElement, LimitEq, PrecisionLedger};
pub use oag::{ExtendedValue, GroupElement, TropSet};
pub use tower::LawReport;

pub type RationalCoset = GammaCoset<RationalField>;
pub type FunctionCoset = GammaCoset<FunctionField>;
pub type QuadraticCoset = GammaCoset<QuadraticField>;
pub type RationalHyperSum = HyperSum<RationalField>;
pub type RationalCoherent = CoherentElement<RationalField>;
pub type FunctionCoherent = CoherentElement<FunctionField>;
