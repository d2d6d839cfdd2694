//! Copies, colorings and certified exhaustive search for Ramsey numbers of
//! Boolean lattices.

pub mod bitset;
pub mod blob;
pub mod bounds;
pub mod coloring;
pub mod copies;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod search;

pub use error::{Error, Result};

/// Every chapter of the book runs as a doctest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/lattice.md")]
    pub struct Lattice;
    #[doc = include_str!("../../../book/src/coloring.md")]
    pub struct Coloring;
    #[doc = include_str!("../../../book/src/copies.md")]
    pub struct Copies;
    #[doc = include_str!("../../../book/src/blob.md")]
    pub struct Blob;
    #[doc = include_str!("../../../book/src/search.md")]
    pub struct Search;
    #[doc = include_str!("../../../book/src/cnf.md")]
    pub struct Cnf;
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub struct Bounds;
    #[doc = include_str!("../../../book/src/harness.md")]
    pub struct Harness;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
