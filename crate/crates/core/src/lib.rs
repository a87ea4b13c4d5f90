//! Exact solver for the sequential competitive facility location problem
//! under the partially binary customer-choice rule.

pub mod bnc;
pub mod cuts;
pub mod instance;
pub mod lp;
pub mod market;
pub mod oracle;
pub mod rmedian;
pub mod separation;
pub mod verify;

pub use bnc::{solve, BncConfig, Formulation, SolveReport, SolveStatus};
pub use instance::{generate_instance, BinaryChoice, GeneratorParams, GeneratorStyle, Instance, InstanceError};
