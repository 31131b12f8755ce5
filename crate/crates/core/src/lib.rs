//! Exact rational cohomology of cell complexes with group actions: invariant and
//! coinvariant subcomplexes, their Hodge-theoretic comparison, and the long exact
//! sequence of compactly supported coinvariants on periodic covers.

pub mod action;
pub mod builders;
pub mod catalog;
pub mod cohomology;
pub mod complex;
pub mod cover;
pub mod equivariant;
pub mod error;
pub mod hodge;
pub mod linalg;
pub mod report;

pub use error::{Error, Result};
