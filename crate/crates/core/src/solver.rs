//! Solving the assembled system, evaluating the representation formula at
//! interior points and Bézier interpolation of pointwise boundary data.

use crate::assembly::{AssemblyConfig, Formulation, LocalCorrector, SystemMatrices};
use crate::bezier::bernstein_tensor;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, NurbsPatch};
use crate::kernels::Kernel;
use crate::linalg::{self, DenseMatrix, Lu};
use crate::quadrature::QuadraturePointSet;
use crate::scalar::{Real, Vec3};

pub use crate::linalg::solve_dense;

/// Solution values at the quadrature points (one per dof).
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub values: Vec<T>,
    pub formulation: Formulation,
    pub components: usize,
}

pub fn solve<T: Real>(system: &SystemMatrices<T>) -> Result<Solution<T>> {
    Ok(Solution {
        values: solve_dense(&system.lhs, &system.rhs)?,
        formulation: system.formulation,
        components: system.components,
    })
}

/// Complete Cauchy data `(u, t)` of a direct solution: prescribed values
/// from `data`, unknown ones from the solution.
pub fn cauchy_data<T: Real>(system: &SystemMatrices<T>, solution: &Solution<T>, data: &[T]) -> (Vec<T>, Vec<T>) {
    let mut u = data.to_vec();
    let mut t = data.to_vec();
    for (j, bc) in system.dof_conditions.iter().enumerate() {
        match bc {
            BoundaryCondition::Dirichlet => t[j] = solution.values[j],
            BoundaryCondition::Neumann => u[j] = solution.values[j],
        }
    }
    (u, t)
}

/// Applies the (locally corrected) potential of `kernel` with `density` at
/// an interior point `x`.
pub fn interior_eval<T: Real>(
    patches: &[NurbsPatch<T>],
    points: &QuadraturePointSet<T>,
    kernel: &dyn Kernel<T>,
    cfg: AssemblyConfig<T>,
    density: &[T],
    x: &Vec3<T>,
) -> Result<Vec<T>> {
    let c = kernel.components();
    let ncols = points.len() * c;
    if density.len() != ncols {
        return Err(Error::Dimension(format!(
            "density of length {} for {ncols} dofs",
            density.len()
        )));
    }
    let corrector = LocalCorrector::new(patches, points, kernel, cfg)?;
    let mut rows = vec![T::zero(); c * ncols];
    corrector.operator_rows(x, None, &mut rows)?;
    Ok((0..c)
        .map(|a| {
            rows[a * ncols..(a + 1) * ncols]
                .iter()
                .zip(density)
                .map(|(k, d)| *k * *d)
                .sum()
        })
        .collect())
}

/// Field value at `x` for any formulation: `V φ`, `K ψ`, or `V t + K u`.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_field<T: Real>(
    patches: &[NurbsPatch<T>],
    points: &QuadraturePointSet<T>,
    single: &dyn Kernel<T>,
    double: &dyn Kernel<T>,
    cfg: AssemblyConfig<T>,
    system: &SystemMatrices<T>,
    solution: &Solution<T>,
    data: &[T],
    x: &Vec3<T>,
) -> Result<Vec<T>> {
    match solution.formulation {
        Formulation::FirstKind => interior_eval(patches, points, single, cfg, &solution.values, x),
        Formulation::SecondKind => interior_eval(patches, points, double, cfg, &solution.values, x),
        Formulation::Direct => {
            let (u, t) = cauchy_data(system, solution, data);
            let a = interior_eval(patches, points, single, cfg, &t, x)?;
            let b = interior_eval(patches, points, double, cfg, &u, x)?;
            Ok(a.into_iter().zip(b).map(|(p, q)| p + q).collect())
        }
    }
}

/// Per-leaf Bézier coefficients of pointwise data.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierInterpolant<T> {
    pub degree: usize,
    pub pdim: usize,
    /// Coefficients, one vector per leaf.
    pub coefficients: Vec<Vec<T>>,
    /// Largest collocation residual `‖C c − u‖∞` over all leaves.
    pub residual: T,
}

/// Interpolates scalar point data leaf by leaf in the Bernstein space of
/// degree `n − 1` (the space of the local correction), solving `C c = u`.
pub fn interpolate_results<T: Real>(points: &QuadraturePointSet<T>, values: &[T]) -> Result<BezierInterpolant<T>> {
    if values.len() != points.len() {
        return Err(Error::Dimension(format!(
            "{} values for {} points",
            values.len(),
            points.len()
        )));
    }
    let pdim = points.pdim;
    let degree = points.rule.len() - 1;
    let tensor = points.rule.tensor(pdim);
    let rows: Vec<Vec<T>> = tensor
        .iter()
        .map(|(xi, _)| bernstein_tensor(degree, *xi, pdim))
        .collect();
    let colloc = DenseMatrix::from_rows(&rows)?;
    let lu = Lu::factor(&colloc).ok();
    let mut coefficients = Vec::with_capacity(points.leaves.len());
    let mut residual = T::zero();
    for info in &points.leaves {
        let u = &values[info.points.clone()];
        let c = match &lu {
            Some(lu) => lu.solve(u)?,
            None => linalg::least_squares(&colloc, u)?,
        };
        let cu = colloc.mul_vec(&c)?;
        residual = residual.max(cu.iter().zip(u).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())));
        coefficients.push(c);
    }
    Ok(BezierInterpolant {
        degree,
        pdim,
        coefficients,
        residual,
    })
}

impl<T: Real> BezierInterpolant<T> {
    /// Value on `leaf` at reference coordinates `xi`.
    pub fn eval(&self, leaf: usize, xi: [T; 2]) -> Result<T> {
        let c = self
            .coefficients
            .get(leaf)
            .ok_or_else(|| Error::Dimension(format!("leaf {leaf} does not exist")))?;
        Ok(bernstein_tensor(self.degree, xi, self.pdim)
            .iter()
            .zip(c)
            .map(|(b, v)| *b * *v)
            .sum())
    }
}

/// Convenience wrapper around [`interpolate_results`] followed by
/// [`BezierInterpolant::eval`].
pub fn eval_interpolant<T: Real>(interp: &BezierInterpolant<T>, leaf: usize, xi: [T; 2]) -> Result<T> {
    interp.eval(leaf, xi)
}
