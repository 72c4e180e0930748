//! Følner ladders, block hierarchies and invariant-measure limits for
//! monotileable amenable groups.

pub mod analysis;
pub mod blocks;
pub mod error;
pub mod folner;
pub mod group;
pub mod hull;
pub mod matrix;
pub mod measures;
pub mod rational;
pub mod subgroup;

pub use blocks::{Assignment, BlockHierarchy, Pattern};
pub use error::{Error, Result};
pub use folner::FolnerLadder;
pub use group::{Element, Embedding, FiniteSubset, GroupContext};
pub use matrix::{ManagedMatrix, ManagedSequence};
pub use measures::{SimplexApproximant, SimplexPoint};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
