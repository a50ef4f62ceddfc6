//! Co-slicings, co-t-structures and co-stability conditions on bounded
//! homotopy categories of projectives over small quiver algebras.

pub mod engine;
pub mod coslice;
pub mod cli;
pub mod costab;
pub mod cotstruct;
pub mod error;
pub mod field;
pub mod linalg;

pub use error::{Error, Result};
pub mod phase;
pub mod realize;
pub mod report;
pub mod snapshot;
pub mod towers;
