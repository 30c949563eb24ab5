//! Isogeometric Nyström boundary element method.
//!
//! Geometry is given by NURBS curves and surfaces, the boundary integral is
//! discretised with Gauss–Legendre quadrature on integration elements, and
//! kernel singularities are handled by a local correction of the weights
//! close to each collocation point.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*F64`
//! aliases below fix the scalar to `f64`.

// `!(x > 0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod bezier;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod partition;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod spline;

pub use assembly::{assemble, AssemblyConfig, Formulation, LocalCorrector, SystemMatrices, Zone};
pub use error::{Error, Result};
pub use geometry::{shapes, BoundaryCondition, ControlPointH, NurbsPatch, Orientation, SurfacePoint};
pub use kernels::{Fundamental, Kernel, Layer, Material, PlaneModel, Problem, Singularity};
pub use linalg::DenseMatrix;
pub use partition::{ElementPartition, GradeEnd, Leaf, LocalElementTree, ParamBox, RefinementPoint, Transform};
pub use quadrature::{distribute_points, gauss_legendre, QuadPoint, QuadratureRule, QuadraturePointSet};
pub use scalar::{Real, Vec3};
pub use solver::{interior_eval, interpolate_results, solve, solve_dense, BezierInterpolant, Solution};
pub use spline::{BasisSpan, KnotVector};

pub type KnotVectorF64 = KnotVector<f64>;
pub type NurbsPatchF64 = NurbsPatch<f64>;
pub type ElementPartitionF64 = ElementPartition<f64>;
pub type QuadraturePointSetF64 = QuadraturePointSet<f64>;
pub type MaterialF64 = Material<f64>;
pub type DenseMatrixF64 = DenseMatrix<f64>;
pub type KnotVectorF32 = KnotVector<f32>;
pub type NurbsPatchF32 = NurbsPatch<f32>;
