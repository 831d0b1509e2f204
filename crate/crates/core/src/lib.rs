//! Loops as limits of Noetherian relations.
//!
//! A loop is described by a state space, a Noetherian order on it, an
//! initialization and a body that is a seed of the order. Its meaning is the
//! limit of the body: every state maps to the minima it can reach.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod examples;
pub mod loopkit;
pub mod noether;
pub mod relation;
pub mod space;
pub mod value;

pub use error::{Error, Result};
pub use relation::Relation;
pub use space::Space;
pub use value::{Interval, Value};
