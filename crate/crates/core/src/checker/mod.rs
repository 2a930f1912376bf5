//! Explicit-state exploration and property checking.

pub mod dot;
pub mod explore;
pub mod fixture;
pub mod props;
pub mod verdict;
pub mod verify;

pub use explore::{explore, EdgeLabel, ExploreError, ExtendedRelation, FreshRelation, TransitionRelation, TransitionSystem};
pub use verdict::{replay, Counterexample, Expectation, PropertyVerdict};
