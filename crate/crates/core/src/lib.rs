//! Analysis and simulation of triangular generalized Pólya urns.

pub mod corpus;
pub mod error;
pub mod limits;
pub mod model;
pub mod rational;
pub mod sim;
pub mod structure;
pub mod verify;

pub use rational::Rational;
