//! Scenario batteries. Each runs a seeded battery of assertions and returns
//! the accumulated [`crate::Battery`].

pub mod carleson;
pub mod composed;
pub mod dz;
pub mod long_short;
pub mod martingale;
pub mod projection;
pub mod seminorm_chain;
