//! Exact combinatorics for right-angled Fuchsian Kac-Moody groups over `F_q`:
//! generalized Cartan matrices, Weyl groups and their growth, the graph-product
//! model of the building, tree-walls in horocyclic coordinates, and
//! ball-level Chabauty limits in `SL_2` over truncated Laurent series.

pub mod building;
pub mod chabauty;
pub mod error;
pub mod field;
pub mod matrix;
pub mod perm;
pub mod report;
pub mod rootdata;
pub mod series;
pub mod treewall;
pub mod weyl;

pub use error::{Error, Result};
pub use field::{Fe, Fq};
pub use matrix::LaurentMatrix;
pub use report::CheckReport;
pub use rootdata::{CoxeterEntry, Gcm};
pub use series::Series;
