//! Exact search for square-constrained Egyptian fraction representations of 1
//! and the dimension data of integral and odd-dimensional modular categories.
//!
//! * [`numeric`]: exact integers, fractions, tuples and dimension profiles
//! * [`bounds`]: Sylvester-type sequences and per-position search bounds
//! * [`efsearch`]: integral search and the unconstrained Egyptian-fraction oracle
//! * [`mnsd`]: odd-dimensional search with paired dimensions
//! * [`filters`]: elimination arguments applied to dimension profiles
//! * [`snf`]: Smith normal form, bounded diophantine solving and the profile scan

pub mod bounds;
pub mod efsearch;
pub mod error;
pub mod filters;
pub mod mnsd;
pub mod numeric;
mod search;
pub mod snf;

pub use error::{Error, Result};
pub use search::{PruneReason, SearchReport};
