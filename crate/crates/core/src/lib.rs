//! Quantitative pointwise-convergence toolkit: oscillation, variation and
//! jump seminorms of finite parameterized families, polynomial ergodic
//! averages on discrete measure-preserving systems, projection families with
//! the lattice composition law, and multi-parameter families built from
//! commuting one-parameter factors.

pub mod compose;
pub mod dft;
pub mod error;
pub mod family;
pub mod io;
pub mod lattice;
pub mod projections;
pub mod rat;
pub mod seminorms;

pub use error::{Error, Result};
pub use family::{
    Bound, IncreasingSequence, ParamFamily, SeminormKind, SeminormValue, Witness,
};
pub use rat::{parse_rat, GridPoint, Rat};
