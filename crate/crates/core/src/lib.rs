//! Exact combinatorics of finite list concept classes.
//!
//! A concept maps points to lists of `k` labels, possibly undefined at some
//! points. The crate computes shattering dimensions of such classes, builds
//! and checks list covers, runs sample compression with boosting, estimates
//! learning curves, and re-verifies the counting inequalities connecting all
//! of these on concrete instances with exact integer arithmetic.

pub mod algebra;
pub mod compression;
pub mod covers;
pub mod dims;
pub mod error;
pub mod format;
pub mod game;
pub mod learning;
pub mod model;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
pub use learning::{CurvePoint, LearningRule};
pub use model::{
    Caps, ConceptClass, DiscreteDistribution, Domain, LabelSpace, ListConcept, ListHypothesis,
    Sample,
};
