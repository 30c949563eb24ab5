//! Manufactured-solution studies for the isogeometric Nyström solver:
//! geometry and run files, test shapes, error measurement and rate fits.

// `!(x > 0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fit;
pub mod geofile;
pub mod manufactured;
pub mod shapes;
pub mod study;

pub use config::{Grading, KnotInsertion, Mode, PointSpec, RunConfig, ScriptedPoint};
pub use error::{HarnessError, Result};
pub use study::{run_convergence, ConvergenceRecord, Row, StepResult, Study};
