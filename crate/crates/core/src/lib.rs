//! Structural operational semantics in the GSOS format: specifications, simulation,
//! bisimilarity, axiomatization to BCCSP normal forms and commutativity detection.

pub mod axioms;
pub mod bisim;
pub mod comm;
mod error;
pub mod parser;
pub mod simulate;
pub mod spec;
pub mod terms;
pub mod validate;

pub use error::Error;
