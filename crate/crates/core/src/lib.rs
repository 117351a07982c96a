//! Entanglement measures for two-qubit states: concurrence, negativity,
//! Bell nonlocality and the relative entropy of entanglement, with the state
//! families, decay channel and Monte Carlo survey built on them.

#![allow(clippy::needless_range_loop)]

pub mod decay;
pub mod linalg;
pub mod measures;
pub mod ree;
pub mod scan;
pub mod simplex;
pub mod states;

pub use linalg::{ComplexMatrix4, NumericPolicy, C64};
pub use measures::{all_measures, MeasureRecord};
pub use ree::{ree_numeric, CssCandidate, ReeSolverConfig};
pub use states::{DensityMatrix, PureState};
