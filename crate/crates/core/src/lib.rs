//! The 3D index of cusped 3-manifolds and of their Dehn fillings, and the
//! exceptional-slope prediction it supports.
//!
//! The pipeline runs from gluing data (or a direct lattice formula) through
//! [`index::CuspedIndexer`] to [`filling::filled_index`] and
//! [`classify::scan`]. Builtin manifolds live in [`catalog`].

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod error;
pub mod filling;
pub mod gluing;
pub mod index;
pub mod manifold;
pub mod selftest;
pub mod series;
pub mod symplectic;
pub mod tetindex;

pub use classify::{classify, scan, scan_slopes, ScanReport, SlopeClass, SlopeClassKind, SlopeReport};
pub use error::{Error, Result};
pub use filling::{filled_index, FillOptions, FillStatus, FilledIndexResult, Slope};
pub use index::{CuspedIndexer, IndexSource, IndexTable, LatticeSum, SumOptions};
pub use manifold::Manifold;
pub use series::{HalfExp, MinDegree, TruncatedSeries};
pub use tetindex::{tet_index, TetIndexCache, TetIndexKey};
