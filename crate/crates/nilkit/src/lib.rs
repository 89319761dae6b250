//! Exact computation in finitely generated nilpotent groups.
//!
//! The crate provides the collecting process and its normal forms, a calculus
//! for decomposing commutators of products and powers, exact group backends
//! (unitriangular matrices, cyclic groups, multiplication tables and their
//! products), four progression constructions with containment checks,
//! approximate-group algorithms (doubling, witnesses, covering, splitting)
//! and structure tools for finite p-groups.

pub mod approx;
pub mod collect;
pub mod commutator;
pub mod decompose;
pub mod error;
pub mod group;
pub mod hom;
pub mod pgroup;
pub mod progression;
pub mod text;
pub mod word;

pub mod acceptance;

pub use error::{Error, Result};
