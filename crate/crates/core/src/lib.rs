//! Counterfactual reasoning for acyclic ProbLog programs.

pub mod benchgen;
pub mod corpus;
pub mod error;
pub mod examples;
pub mod graph;
pub mod inference;
pub mod lpad;
pub mod names;
pub mod oracle;
pub mod parse;
pub mod prob;
pub mod program;
pub mod transform;

pub use error::{Error, Result};
pub use prob::{Prob, Weight};
pub use program::{Assignment, AtomId, Clause, Formula, Literal, ProbFact, Program, ProgramBuilder};
