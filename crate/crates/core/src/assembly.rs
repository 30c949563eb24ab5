//! Dense Nyström matrices with local correction.
//!
//! Entries between a collocation point and a far leaf are plain point
//! evaluations `K(x_i, y_j) ω_j`. For near leaves the weights are replaced by
//! corrected weights `w̃` that integrate every Bernstein test function of the
//! leaf exactly against the true kernel.

use rayon::prelude::*;

use crate::bezier::{bernstein_fixed, bernstein_tensor};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, NurbsPatch};
use crate::kernels::{Kernel, Singularity};
use crate::linalg::{least_squares, DenseMatrix, Lu};
use crate::quadrature::{
    adaptive_integrate_1d, adaptive_integrate_2d, duffy_integrate, log_singular_integrate_1d, split_integrate_1d,
    gauss_legendre, AdaptiveOptions, LeafInfo, QuadPoint, QuadratureRule, QuadraturePointSet,
};
use crate::scalar::{Real, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Indirect single layer: `V φ = u`.
    FirstKind,
    /// Indirect double layer: `(½I + K) ψ = u`.
    SecondKind,
    /// Direct mixed formulation with per-patch Dirichlet/Neumann data.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyConfig<T> {
    /// Admissibility factor: a leaf is near when `dist < η · diam`.
    pub eta: T,
    /// Relative tolerance of the moment integrals.
    pub moment_tol: T,
    pub formulation: Formulation,
    /// Bernstein degree of the test space; `None` uses `n − 1` for an
    /// `n`-point rule, which makes the moment system square.
    pub test_degree: Option<usize>,
}

impl<T: Real> Default for AssemblyConfig<T> {
    fn default() -> Self {
        Self {
            eta: T::two(),
            moment_tol: T::of(1e-12),
            formulation: Formulation::SecondKind,
            test_degree: None,
        }
    }
}

impl<T: Real> AssemblyConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > T::zero()) || !(self.moment_tol > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "eta {} and moment tolerance {} must be positive",
                self.eta, self.moment_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Far,
    Near,
}

/// Admissibility: near iff `dist < η · diam`.
pub fn classify<T: Real>(diam: T, dist: T, eta: T) -> Zone {
    if dist < eta * diam {
        Zone::Near
    } else {
        Zone::Far
    }
}

/// Classification of a leaf relative to `x`; a leaf holding `x` is always near.
pub fn classify_leaf<T: Real>(x: &Vec3<T>, leaf: &LeafInfo<T>, eta: T, contains_x: bool) -> Zone {
    if contains_x {
        Zone::Near
    } else {
        classify(leaf.diam, leaf.dist(x), eta)
    }
}

/// Far-field block `K(x, y_j) ω_j` written into `out` (`c × c`).
pub fn far_entry<T: Real>(kernel: &dyn Kernel<T>, x: &Vec3<T>, point: &QuadPoint<T>, out: &mut [T]) -> Result<()> {
    kernel.eval(x, &point.position, &point.normal, out)?;
    out.iter_mut().for_each(|v| *v = *v * point.weight);
    Ok(())
}

/// Corrected weights of one leaf, `n_loc` blocks of `c × c` values.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction<T> {
    pub weights: Vec<T>,
    /// `‖N w̃ − g‖∞ / ‖g‖∞` of the moment system.
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrectionStats<T> {
    pub near_pairs: usize,
    pub max_residual: T,
}

impl<T: Real> CorrectionStats<T> {
    fn merge(self, other: Self) -> Self {
        Self {
            near_pairs: self.near_pairs + other.near_pairs,
            max_residual: self.max_residual.max(other.max_residual),
        }
    }
}

/// Relative distance below which `y − x` is integrated along the curve.
const CHORD_RANGE: f64 = 1e-2;

/// Point at which the operator is evaluated, with its curve parameter when
/// it lies on a curve of the boundary.
#[derive(Debug, Clone, Copy)]
struct Target<T> {
    x: Vec3<T>,
    origin: Option<(usize, T)>,
}

/// Computes moments and corrected weights for a fixed point set and kernel.
pub struct LocalCorrector<'a, T: Real> {
    patches: &'a [NurbsPatch<T>],
    points: &'a QuadraturePointSet<T>,
    kernel: &'a dyn Kernel<T>,
    cfg: AssemblyConfig<T>,
    degree: usize,
    ntest: usize,
    nloc: usize,
    n_matrix: DenseMatrix<T>,
    lu: Option<Lu<T>>,
    chord_rule: QuadratureRule<T>,
}

impl<'a, T: Real> LocalCorrector<'a, T> {
    pub fn new(
        patches: &'a [NurbsPatch<T>],
        points: &'a QuadraturePointSet<T>,
        kernel: &'a dyn Kernel<T>,
        cfg: AssemblyConfig<T>,
    ) -> Result<Self> {
        cfg.validate()?;
        let pdim = points.pdim;
        let n = points.rule.len();
        let degree = cfg.test_degree.unwrap_or(n - 1);
        if degree > crate::spline::MAX_DEGREE + 1 {
            return Err(Error::InvalidParameter(format!("test degree {degree} is too high")));
        }
        let ntest = (degree + 1).pow(pdim as u32);
        let tensor = points.rule.tensor(pdim);
        let nloc = tensor.len();
        let mut n_matrix = DenseMatrix::zeros(ntest, nloc);
        for (j, (xi, _)) in tensor.iter().enumerate() {
            for (k, b) in bernstein_tensor(degree, *xi, pdim).into_iter().enumerate() {
                n_matrix[(k, j)] = b;
            }
        }
        let lu = if ntest == nloc { Lu::factor(&n_matrix).ok() } else { None };
        Ok(Self {
            patches,
            points,
            kernel,
            cfg,
            degree,
            ntest,
            nloc,
            n_matrix,
            lu,
            chord_rule: gauss_legendre(8)?,
        })
    }

    pub fn test_count(&self) -> usize {
        self.ntest
    }

    /// Matrix `N[k, j] = B_k(ξ_j)` of the moment system.
    pub fn moment_matrix(&self) -> &DenseMatrix<T> {
        &self.n_matrix
    }

    fn opts(&self) -> AdaptiveOptions<T> {
        AdaptiveOptions::default().with_rel_tol(self.cfg.moment_tol)
    }

    fn target(&self, x: &Vec3<T>, own: Option<usize>) -> Target<T> {
        let origin = own.filter(|_| self.points.pdim == 1).map(|i| {
            let p = &self.points.points[i];
            (self.points.leaves[p.leaf].leaf.patch, p.param[0])
        });
        Target { x: *x, origin }
    }

    /// Writes `K(x, y(ξ)) B_k(ξ) J(ξ)` (or `K J` when `tests` is false) at a
    /// reference point of `leaf`. On the curve carrying `x` the difference
    /// `y − x` is taken from [`NurbsPatch::chord`], so kernels that cancel
    /// to leading order (the double layer) stay accurate as `y → x`.
    fn integrand(&self, target: &Target<T>, info: &LeafInfo<T>, xi: [T; 2], tests: bool, out: &mut [T]) -> Result<()> {
        let leaf = &info.leaf;
        let patch = &self.patches[leaf.patch];
        let (u, jx) = leaf.map_ref_to_param(xi);
        let sp = patch.evaluate(&u[..leaf.pdim])?;
        let g = patch.gram_of(&sp)?;
        let n = patch.normal_of(&sp)?;
        let c2 = self.kernel.components().pow(2);
        let mut kb = [T::zero(); 4];
        let x = &target.x;
        let y = &sp.position;
        let close = crate::scalar::distance(x, y) < T::of(CHORD_RANGE) * (T::one() + crate::scalar::norm(x));
        match target.origin {
            Some((p, u0)) if close && p == leaf.patch && leaf.pdim == 1 => {
                let d = patch.chord(u0, u[0], &self.chord_rule)?;
                self.kernel.eval(&[T::zero(); 3], &d, &n, &mut kb[..c2])?;
            }
            _ => self.kernel.eval(x, y, &n, &mut kb[..c2])?,
        }
        let jac = jx * g;
        if tests {
            let b = bernstein_fixed(self.degree, xi, leaf.pdim);
            for (k, bk) in b[..self.ntest].iter().enumerate() {
                for ab in 0..c2 {
                    out[k * c2 + ab] = kb[ab] * *bk * jac;
                }
            }
        } else {
            for ab in 0..c2 {
                out[ab] = kb[ab] * jac;
            }
        }
        Ok(())
    }

    /// Integral over `leaf` of kernel times test functions (`tests`) or the
    /// kernel alone, with `singular` the reference location of `x` when it
    /// lies on the leaf. Nodes that coincide with `x` to within roundoff
    /// carry negligible weight in the singular routes and are dropped.
    fn leaf_integral(&self, target: &Target<T>, leaf: usize, singular: Option<[T; 2]>, tests: bool) -> Result<Vec<T>> {
        let info = &self.points.leaves[leaf];
        let c2 = self.kernel.components().pow(2);
        let ncomp = if tests { self.ntest * c2 } else { c2 };
        let pdim = info.leaf.pdim;
        let opts = self.opts();
        let mut failure: Option<Error> = None;
        let mut f = |xi: [T; 2], out: &mut [T]| {
            if failure.is_some() {
                return;
            }
            match self.integrand(target, info, xi, tests, out) {
                Ok(()) => {}
                Err(Error::SingularEvaluation(_)) if singular.is_some() => {
                    out.iter_mut().for_each(|v| *v = T::zero());
                }
                Err(e) => {
                    out.iter_mut().for_each(|v| *v = T::zero());
                    failure = Some(e);
                }
            }
        };
        let (lo, hi) = (-T::one(), T::one());
        let log = self.kernel.singularity() == Singularity::Logarithmic;
        let value = match (singular, pdim) {
            (None, 1) => adaptive_integrate_1d(|t, out: &mut [T]| f([t, T::zero()], out), lo, hi, ncomp, &opts),
            (None, _) => adaptive_integrate_2d(&mut f, [lo, lo], [hi, hi], ncomp, &opts),
            (Some(p), 1) if log => {
                log_singular_integrate_1d(|t, out: &mut [T]| f([t, T::zero()], out), lo, hi, p[0], ncomp, &opts)
            }
            (Some(p), 1) => split_integrate_1d(|t, out: &mut [T]| f([t, T::zero()], out), lo, hi, p[0], ncomp, &opts),
            (Some(p), _) => duffy_integrate(&mut f, [lo, lo], [hi, hi], p, ncomp, &opts),
        };
        if let Some(e) = failure {
            return Err(e);
        }
        value
    }

    /// Moment vector `g[k·c² + ab] = ∫ K_ab B_k` over `leaf`.
    pub fn moments(&self, x: &Vec3<T>, leaf: usize, self_point: Option<usize>) -> Result<Vec<T>> {
        let start = self.points.leaves[leaf].points.start;
        let target = self.target(x, self_point.map(|l| start + l));
        self.target_moments(&target, leaf, self_point)
    }

    fn target_moments(&self, target: &Target<T>, leaf: usize, self_point: Option<usize>) -> Result<Vec<T>> {
        let Some(local) = self_point else {
            return self.leaf_integral(target, leaf, None, true);
        };
        let info = &self.points.leaves[leaf];
        let xi0 = self.points.points[info.points.start + local].xi;
        match self.kernel.singularity() {
            Singularity::Smooth => self.leaf_integral(target, leaf, None, true),
            Singularity::Logarithmic | Singularity::BoundedDirectional | Singularity::Weak => {
                self.leaf_integral(target, leaf, Some(xi0), true)
            }
            Singularity::Strong => self.cpv_moments(target, leaf, xi0),
        }
    }

    /// Strongly singular moments from the rigid body identity: the principal
    /// value over the own leaf is the jump `½I` minus the integrals over all
    /// other leaves, and `∫ K (B_k − B_k(ξ₀))` is regular.
    fn cpv_moments(&self, target: &Target<T>, leaf: usize, xi0: [T; 2]) -> Result<Vec<T>> {
        let c = self.kernel.components();
        let c2 = c * c;
        let mut own = vec![T::zero(); c2];
        for a in 0..c {
            own[a * c + a] = T::half();
        }
        for other in 0..self.points.leaves.len() {
            if other == leaf {
                continue;
            }
            let v = self.leaf_integral(target, other, None, false)?;
            for (o, w) in own.iter_mut().zip(v) {
                *o = *o - w;
            }
        }
        let info = &self.points.leaves[leaf];
        let pdim = info.leaf.pdim;
        let b0 = bernstein_tensor(self.degree, xi0, pdim);
        let ncomp = self.ntest * c2;
        let mut failure: Option<Error> = None;
        let mut kbuf = vec![T::zero(); c2];
        let f = |t: T, out: &mut [T]| {
            if failure.is_some() {
                return;
            }
            let xi = [t, T::zero()];
            match self.integrand(target, info, xi, false, &mut kbuf) {
                Ok(()) => {}
                Err(Error::SingularEvaluation(_)) => {
                    out.iter_mut().for_each(|v| *v = T::zero());
                    return;
                }
                Err(e) => {
                    failure = Some(e);
                    out.iter_mut().for_each(|v| *v = T::zero());
                    return;
                }
            }
            let b = bernstein_tensor(self.degree, xi, pdim);
            for k in 0..self.ntest {
                for ab in 0..c2 {
                    out[k * c2 + ab] = kbuf[ab] * (b[k] - b0[k]);
                }
            }
        };
        let mut g = split_integrate_1d(f, -T::one(), T::one(), xi0[0], ncomp, &self.opts())?;
        if let Some(e) = failure {
            return Err(e);
        }
        for k in 0..self.ntest {
            for ab in 0..c2 {
                g[k * c2 + ab] = g[k * c2 + ab] + b0[k] * own[ab];
            }
        }
        Ok(g)
    }

    /// Solves `N w̃ = g` column by column.
    pub fn solve_moments(&self, g: &[T]) -> Result<Correction<T>> {
        let c2 = self.kernel.components().pow(2);
        let mut weights = vec![T::zero(); self.nloc * c2];
        let mut residual = T::zero();
        let mut rhs = vec![T::zero(); self.ntest];
        for ab in 0..c2 {
            for k in 0..self.ntest {
                rhs[k] = g[k * c2 + ab];
            }
            let w = match &self.lu {
                Some(lu) => lu.solve(&rhs)?,
                None => least_squares(&self.n_matrix, &rhs)?,
            };
            let nw = self.n_matrix.mul_vec(&w)?;
            let scale = rhs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            let r = nw.iter().zip(&rhs).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
            if scale > T::zero() {
                residual = residual.max(r / scale);
            }
            for (j, wj) in w.into_iter().enumerate() {
                weights[j * c2 + ab] = wj;
            }
        }
        Ok(Correction { weights, residual })
    }

    /// Corrected weights of `leaf` for the collocation or evaluation point
    /// `x`; `self_point` is the local index of `x` when it is a point of the leaf.
    pub fn corrected_weights(&self, x: &Vec3<T>, leaf: usize, self_point: Option<usize>) -> Result<Correction<T>> {
        let g = self.moments(x, leaf, self_point)?;
        self.solve_moments(&g)
    }

    /// One block row (`c` matrix rows of length `ncols`) of the operator for
    /// target `x`; `own` is the global index of `x` when it is a collocation point.
    pub fn operator_rows(&self, x: &Vec3<T>, own: Option<usize>, rows: &mut [T]) -> Result<CorrectionStats<T>> {
        let c = self.kernel.components();
        let c2 = c * c;
        let ncols = self.points.len() * c;
        let mut stats = CorrectionStats::<T>::default();
        let mut buf = [T::zero(); 4];
        let target = self.target(x, own);
        for (l, info) in self.points.leaves.iter().enumerate() {
            let local = own.filter(|i| info.points.contains(i)).map(|i| i - info.points.start);
            match classify_leaf(x, info, self.cfg.eta, local.is_some()) {
                Zone::Near => {
                    let corr = self.solve_moments(&self.target_moments(&target, l, local)?)?;
                    stats.near_pairs += 1;
                    stats.max_residual = stats.max_residual.max(corr.residual);
                    for (jl, j) in info.points.clone().enumerate() {
                        for a in 0..c {
                            for b in 0..c {
                                rows[a * ncols + j * c + b] = corr.weights[jl * c2 + a * c + b];
                            }
                        }
                    }
                }
                Zone::Far => {
                    for j in info.points.clone() {
                        far_entry(self.kernel, x, &self.points.points[j], &mut buf[..c2])?;
                        for a in 0..c {
                            for b in 0..c {
                                rows[a * ncols + j * c + b] = buf[a * c + b];
                            }
                        }
                    }
                }
            }
        }
        Ok(stats)
    }

    /// Full operator matrix (without jump terms), assembled row-parallel.
    pub fn operator(&self) -> Result<(DenseMatrix<T>, CorrectionStats<T>)> {
        let c = self.kernel.components();
        let n = self.points.len() * c;
        let mut m = DenseMatrix::zeros(n, n);
        let stats = m
            .as_mut_slice()
            .par_chunks_mut(c * n)
            .enumerate()
            .map(|(i, rows)| self.operator_rows(&self.points.points[i].position, Some(i), rows))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(CorrectionStats::default(), CorrectionStats::merge);
        Ok((m, stats))
    }
}

/// Assembled system and the operators it was built from.
#[derive(Debug, Clone)]
pub struct SystemMatrices<T> {
    pub lhs: DenseMatrix<T>,
    pub rhs: Vec<T>,
    /// Single layer operator, when assembled.
    pub v: Option<DenseMatrix<T>>,
    /// Double layer operator without the jump term, when assembled.
    pub k: Option<DenseMatrix<T>>,
    pub components: usize,
    pub formulation: Formulation,
    /// Boundary condition of every dof (direct formulation).
    pub dof_conditions: Vec<BoundaryCondition>,
    pub stats: CorrectionStats<T>,
}

/// Boundary condition attached to every dof (`point · c + component`).
pub fn dof_conditions<T: Real>(
    patches: &[NurbsPatch<T>],
    points: &QuadraturePointSet<T>,
    components: usize,
) -> Vec<BoundaryCondition> {
    points
        .points
        .iter()
        .flat_map(|p| {
            let bc = patches[points.leaves[p.leaf].leaf.patch].boundary_condition();
            std::iter::repeat_n(bc, components)
        })
        .collect()
}

/// Builds the system for the configured formulation. `data` holds one value
/// per dof: Dirichlet values for the indirect formulations and the
/// prescribed Cauchy datum of each dof for the direct one.
pub fn assemble<T: Real>(
    patches: &[NurbsPatch<T>],
    points: &QuadraturePointSet<T>,
    single: &dyn Kernel<T>,
    double: &dyn Kernel<T>,
    cfg: AssemblyConfig<T>,
    data: &[T],
) -> Result<SystemMatrices<T>> {
    let c = single.components();
    if double.components() != c {
        return Err(Error::Dimension("kernels disagree on components".into()));
    }
    let n = points.len() * c;
    if data.len() != n {
        return Err(Error::Dimension(format!("{} data values for {n} dofs", data.len())));
    }
    let conditions = dof_conditions(patches, points, c);
    let (v, k, stats) = match cfg.formulation {
        Formulation::FirstKind => {
            let (v, s) = LocalCorrector::new(patches, points, single, cfg)?.operator()?;
            (Some(v), None, s)
        }
        Formulation::SecondKind => {
            let (k, s) = LocalCorrector::new(patches, points, double, cfg)?.operator()?;
            (None, Some(k), s)
        }
        Formulation::Direct => {
            let (v, s1) = LocalCorrector::new(patches, points, single, cfg)?.operator()?;
            let (k, s2) = LocalCorrector::new(patches, points, double, cfg)?.operator()?;
            (Some(v), Some(k), s1.merge(s2))
        }
    };
    let (lhs, rhs) = match cfg.formulation {
        Formulation::FirstKind => (v.clone().expect("assembled"), data.to_vec()),
        Formulation::SecondKind => {
            let mut m = k.clone().expect("assembled");
            for i in 0..n {
                m[(i, i)] = m[(i, i)] + T::half();
            }
            (m, data.to_vec())
        }
        Formulation::Direct => {
            let (v, k) = (v.as_ref().expect("assembled"), k.as_ref().expect("assembled"));
            // interior: V t − (½I − K) u = 0
            let mut lhs = DenseMatrix::zeros(n, n);
            let mut rhs = vec![T::zero(); n];
            for i in 0..n {
                for j in 0..n {
                    let jump = if i == j { T::half() } else { T::zero() };
                    let kc = jump - k[(i, j)];
                    match conditions[j] {
                        BoundaryCondition::Dirichlet => {
                            lhs[(i, j)] = v[(i, j)];
                            rhs[i] = rhs[i] + kc * data[j];
                        }
                        BoundaryCondition::Neumann => {
                            lhs[(i, j)] = -kc;
                            rhs[i] = rhs[i] - v[(i, j)] * data[j];
                        }
                    }
                }
            }
            (lhs, rhs)
        }
    };
    Ok(SystemMatrices {
        lhs,
        rhs,
        v,
        k,
        components: c,
        formulation: cfg.formulation,
        dof_conditions: conditions,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(1.0, 0.4, 2.0), Zone::Near);
        assert_eq!(classify(1.0, 0.0, 2.0), Zone::Near);
        assert_eq!(classify(1.0, 2.5, 2.0), Zone::Far);
        assert_eq!(classify(1.0, 1.0, 0.5), Zone::Far);
        // a larger factor never shrinks the near set
        for d in [0.1, 0.9, 1.9, 3.0] {
            if classify(1.0, d, 2.0) == Zone::Near {
                assert_eq!(classify(1.0, d, 4.0), Zone::Near);
            }
        }
    }
}
