//! NURBS curves and tensor-product surfaces.
//!
//! Control points are stored in homogeneous form `(w·P, w)` and projected on
//! evaluation. Physical points are always `Vec3`; planar geometry keeps the
//! third component at zero.

use crate::error::{Error, Result};
use crate::scalar::{cross, norm, Real, Vec3};
use crate::spline::KnotVector;

/// Homogeneous control point `P^h = (w·P, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPointH<T> {
    pub weighted: Vec3<T>,
    pub weight: T,
}

impl<T: Real> ControlPointH<T> {
    /// Builds the homogeneous point from Cartesian coordinates and a weight.
    pub fn from_cartesian(point: Vec3<T>, weight: T) -> Self {
        Self {
            weighted: [point[0] * weight, point[1] * weight, point[2] * weight],
            weight,
        }
    }

    pub fn cartesian(&self) -> Vec3<T> {
        let w = self.weight;
        [self.weighted[0] / w, self.weighted[1] / w, self.weighted[2] / w]
    }
}

/// Projects a homogeneous point `(x^w, w)` to `x^w / w`.
pub fn perspective_map<T: Real>(xh: &[T]) -> Result<Vec<T>> {
    let (w, xw) = xh
        .split_last()
        .ok_or_else(|| Error::Dimension("empty homogeneous point".into()))?;
    if *w == T::zero() {
        return Err(Error::SingularProjection);
    }
    Ok(xw.iter().map(|&c| c / *w).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryCondition {
    #[default]
    Dirichlet,
    Neumann,
}

/// Orientation of the unit normal relative to the parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Curves: tangent rotated by −90°. Surfaces: `∂χ/∂u₁ × ∂χ/∂u₂`.
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Orientation::Positive => T::one(),
            Orientation::Negative => -T::one(),
        }
    }
}

/// Point on a patch with its first derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint<T> {
    pub position: Vec3<T>,
    /// Columns `∂χ/∂u_k`; the second column is zero for curves.
    pub jacobian: [Vec3<T>; 2],
}

/// Single NURBS patch: a curve in the plane or a tensor-product surface in space.
#[derive(Debug, Clone, PartialEq)]
pub struct NurbsPatch<T> {
    dim: usize,
    knot_vectors: Vec<KnotVector<T>>,
    control: Vec<ControlPointH<T>>,
    boundary_condition: BoundaryCondition,
    orientation: Orientation,
    corners: Vec<T>,
}

impl<T: Real> NurbsPatch<T> {
    /// Creates a patch. `control` is ordered with the first parametric
    /// direction running fastest.
    pub fn new(
        dim: usize,
        knot_vectors: Vec<KnotVector<T>>,
        control: Vec<ControlPointH<T>>,
    ) -> Result<Self> {
        let pdim = knot_vectors.len();
        match (dim, pdim) {
            (2, 1) | (3, 2) => {}
            _ => {
                return Err(Error::InvalidGeometry(format!(
                    "unsupported combination dim={dim}, parametric dim={pdim}"
                )))
            }
        }
        let expected: usize = knot_vectors.iter().map(|k| k.num_basis()).product();
        if control.len() != expected {
            return Err(Error::InvalidGeometry(format!(
                "control net has {} points, knot vectors require {expected}",
                control.len()
            )));
        }
        for (i, cp) in control.iter().enumerate() {
            if !(cp.weight > T::zero()) {
                return Err(Error::InvalidGeometry(format!(
                    "control point {i} has non-positive weight {}",
                    cp.weight
                )));
            }
            if dim == 2 && cp.weighted[2] != T::zero() {
                return Err(Error::InvalidGeometry(format!(
                    "planar control point {i} has a third coordinate"
                )));
            }
        }
        for kv in &knot_vectors {
            let (lo, hi) = kv.domain();
            if !(lo < hi) {
                return Err(Error::InvalidGeometry(
                    "knot vector without valid domain".into(),
                ));
            }
        }
        Ok(Self {
            dim,
            knot_vectors,
            control,
            boundary_condition: BoundaryCondition::Dirichlet,
            orientation: Orientation::Positive,
            corners: Vec::new(),
        })
    }

    /// Curve from Cartesian control points and weights.
    pub fn curve(knots: KnotVector<T>, points: &[[T; 2]], weights: &[T]) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidGeometry("points/weights length mismatch".into()));
        }
        let control = points
            .iter()
            .zip(weights)
            .map(|(p, &w)| ControlPointH::from_cartesian([p[0], p[1], T::zero()], w))
            .collect();
        Self::new(2, vec![knots], control)
    }

    /// Surface from a Cartesian control net (first direction fastest).
    pub fn surface(
        knots: [KnotVector<T>; 2],
        points: &[Vec3<T>],
        weights: &[T],
    ) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidGeometry("points/weights length mismatch".into()));
        }
        let control = points
            .iter()
            .zip(weights)
            .map(|(p, &w)| ControlPointH::from_cartesian(*p, w))
            .collect();
        Self::new(3, knots.to_vec(), control)
    }

    pub fn with_boundary_condition(mut self, bc: BoundaryCondition) -> Self {
        self.boundary_condition = bc;
        self
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    /// Flags parameter values (first direction) as geometric corners,
    /// e.g. patch junctions.
    pub fn with_corners(mut self, corners: Vec<T>) -> Self {
        self.corners = corners;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param_dim(&self) -> usize {
        self.knot_vectors.len()
    }

    pub fn knot_vectors(&self) -> &[KnotVector<T>] {
        &self.knot_vectors
    }

    pub fn control_points(&self) -> &[ControlPointH<T>] {
        &self.control
    }

    pub fn boundary_condition(&self) -> BoundaryCondition {
        self.boundary_condition
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn flagged_corners(&self) -> &[T] {
        &self.corners
    }

    /// Parametric box `[lo, hi]` per direction; curves report `[0, 1]` in the
    /// unused second direction.
    pub fn param_domain(&self) -> [(T, T); 2] {
        let first = self.knot_vectors[0].domain();
        let second = self
            .knot_vectors
            .get(1)
            .map(|k| k.domain())
            .unwrap_or((T::zero(), T::one()));
        [first, second]
    }

    /// Whether a curve ends where it starts.
    pub fn is_closed_curve(&self) -> bool {
        if self.param_dim() != 1 {
            return false;
        }
        let (lo, hi) = self.knot_vectors[0].domain();
        match (self.eval_curve(lo), self.eval_curve(hi)) {
            (Ok(a), Ok(b)) => {
                let scale = T::one() + a[0].abs().max(a[1].abs());
                (a[0] - b[0]).abs().max((a[1] - b[1]).abs()) <= T::of(1e-10) * scale
            }
            _ => false,
        }
    }

    /// Chord `C(u) − C(u0)` of a curve as the integral of `C'` along the
    /// shorter way (closed curves may wrap around the seam), one Gauss rule
    /// per knot span. Unlike the difference of two evaluations this keeps
    /// full relative accuracy when `u` and `u0` are close.
    pub fn chord(&self, u0: T, u: T, rule: &crate::quadrature::QuadratureRule<T>) -> Result<Vec3<T>> {
        let kv = &self.knot_vectors[0];
        let (lo, hi) = kv.domain();
        let wrap = (u - u0).abs() > (hi - lo) * T::half() && self.is_closed_curve();
        let legs = match (wrap, u < u0) {
            (false, _) => [(u0, u), (u, u)],
            (true, true) => [(u0, hi), (lo, u)],
            (true, false) => [(u0, lo), (hi, u)],
        };
        let knots = kv.knots();
        let mut out = [T::zero(); 3];
        let mut segment = |p: T, q: T, sign: T| -> Result<()> {
            let half = (q - p) * T::half();
            let mid = (p + q) * T::half();
            for (xi, wt) in rule.nodes.iter().zip(&rule.weights) {
                let d = self.eval_curve_jacobian(mid + half * *xi)?;
                for i in 0..3 {
                    out[i] = out[i] + sign * half * *wt * d[i];
                }
            }
            Ok(())
        };
        for (a, b) in legs {
            if a == b {
                continue;
            }
            let (s, e) = if a <= b { (a, b) } else { (b, a) };
            let sign = if a <= b { T::one() } else { -T::one() };
            // knots are sorted, so interior breakpoints come in order
            let mut p = s;
            for &k in knots {
                if k > p && k < e {
                    segment(p, k, sign)?;
                    p = k;
                }
            }
            segment(p, e, sign)?;
        }
        Ok(out)
    }

    /// Candidate corners of a curve: interior knots of multiplicity `p`
    /// (C⁰ joints) plus explicitly flagged values.
    pub fn corner_candidates(&self) -> Vec<T> {
        let kv = &self.knot_vectors[0];
        let (lo, hi) = kv.domain();
        let mut out: Vec<T> = kv
            .multiplicities()
            .into_iter()
            .filter(|&(v, m)| v > lo && v < hi && m >= kv.degree() && kv.degree() > 0)
            .map(|(v, _)| v)
            .collect();
        out.extend(self.corners.iter().copied());
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// Angle between the one-sided tangents of a curve at `u` (0 for a smooth joint).
    pub fn tangent_kink(&self, u: T) -> Result<T> {
        let (lo, hi) = self.knot_vectors[0].domain();
        let eps = (hi - lo) * T::of(1e-9);
        let a = if u - eps < lo { hi - eps } else { u - eps };
        let b = if u + eps > hi { lo + eps } else { u + eps };
        let ta = self.eval_curve_jacobian(a)?;
        let tb = self.eval_curve_jacobian(b)?;
        let c = crate::scalar::dot(&ta, &tb) / (norm(&ta) * norm(&tb));
        Ok(c.max(-T::one()).min(T::one()).acos())
    }

    fn check_param(&self, u: &[T]) -> Result<()> {
        if u.len() < self.param_dim() {
            return Err(Error::Dimension(format!(
                "expected {} parameters, got {}",
                self.param_dim(),
                u.len()
            )));
        }
        Ok(())
    }

    /// Homogeneous point and its parametric derivatives.
    fn eval_homogeneous(&self, u: &[T]) -> Result<([T; 4], [[T; 4]; 2])> {
        self.check_param(u)?;
        let mut xh = [T::zero(); 4];
        let mut dxh = [[T::zero(); 4]; 2];
        let p0 = self.knot_vectors[0].degree();
        let (s0, v0, d0) = self.knot_vectors[0].basis_fixed(u[0])?;
        let f0 = s0 - p0;
        if self.param_dim() == 1 {
            for r in 0..=p0 {
                let (n, dn) = (v0[r], d0[r]);
                let cp = &self.control[f0 + r];
                for c in 0..3 {
                    xh[c] = xh[c] + n * cp.weighted[c];
                    dxh[0][c] = dxh[0][c] + dn * cp.weighted[c];
                }
                xh[3] = xh[3] + n * cp.weight;
                dxh[0][3] = dxh[0][3] + dn * cp.weight;
            }
        } else {
            let n0 = self.knot_vectors[0].num_basis();
            let p1 = self.knot_vectors[1].degree();
            let (s1, v1, d1) = self.knot_vectors[1].basis_fixed(u[1])?;
            let f1 = s1 - p1;
            for s in 0..=p1 {
                let (m, dm) = (v1[s], d1[s]);
                for r in 0..=p0 {
                    let (n, dn) = (v0[r], d0[r]);
                    let cp = &self.control[(f1 + s) * n0 + f0 + r];
                    let (v, du, dv) = (n * m, dn * m, n * dm);
                    for c in 0..3 {
                        xh[c] = xh[c] + v * cp.weighted[c];
                        dxh[0][c] = dxh[0][c] + du * cp.weighted[c];
                        dxh[1][c] = dxh[1][c] + dv * cp.weighted[c];
                    }
                    xh[3] = xh[3] + v * cp.weight;
                    dxh[0][3] = dxh[0][3] + du * cp.weight;
                    dxh[1][3] = dxh[1][3] + dv * cp.weight;
                }
            }
        }
        Ok((xh, dxh))
    }

    /// Point and Jacobian at parameter `u` (one or two coordinates).
    pub fn evaluate(&self, u: &[T]) -> Result<SurfacePoint<T>> {
        let (xh, dxh) = self.eval_homogeneous(u)?;
        let w = xh[3];
        if w == T::zero() {
            return Err(Error::SingularProjection);
        }
        let position = [xh[0] / w, xh[1] / w, xh[2] / w];
        let mut jacobian = [[T::zero(); 3]; 2];
        for k in 0..self.param_dim() {
            let dw = dxh[k][3];
            for c in 0..3 {
                // quotient rule: (w·dx^w − dw·x^w) / w²
                jacobian[k][c] = (w * dxh[k][c] - dw * xh[c]) / (w * w);
            }
        }
        Ok(SurfacePoint { position, jacobian })
    }

    pub fn eval_curve(&self, u: T) -> Result<Vec3<T>> {
        Ok(self.evaluate(&[u])?.position)
    }

    pub fn eval_curve_jacobian(&self, u: T) -> Result<Vec3<T>> {
        Ok(self.evaluate(&[u])?.jacobian[0])
    }

    pub fn eval_surface(&self, u: [T; 2]) -> Result<Vec3<T>> {
        Ok(self.evaluate(&u)?.position)
    }

    pub fn eval_surface_jacobian(&self, u: [T; 2]) -> Result<[Vec3<T>; 2]> {
        Ok(self.evaluate(&u)?.jacobian)
    }

    /// `√det(JᵀJ)`: arc-length or area element of the mapping.
    pub fn gram_det(&self, u: &[T]) -> Result<T> {
        let sp = self.evaluate(u)?;
        self.gram_of(&sp)
    }

    pub fn gram_of(&self, sp: &SurfacePoint<T>) -> Result<T> {
        let g = if self.param_dim() == 1 {
            norm(&sp.jacobian[0])
        } else {
            norm(&cross(&sp.jacobian[0], &sp.jacobian[1]))
        };
        if g > T::zero() && g.is_finite() {
            Ok(g)
        } else {
            Err(Error::InvalidGeometry(format!(
                "degenerate Gram determinant {g}"
            )))
        }
    }

    /// Unit normal, oriented by the patch flag.
    pub fn normal_of(&self, sp: &SurfacePoint<T>) -> Result<Vec3<T>> {
        let s: T = self.orientation.sign();
        let raw = if self.param_dim() == 1 {
            let t = sp.jacobian[0];
            [t[1], -t[0], T::zero()]
        } else {
            cross(&sp.jacobian[0], &sp.jacobian[1])
        };
        let len = norm(&raw);
        if !(len > T::zero()) {
            return Err(Error::InvalidGeometry("normal undefined".into()));
        }
        Ok([raw[0] * s / len, raw[1] * s / len, raw[2] * s / len])
    }

    pub fn normal(&self, u: &[T]) -> Result<Vec3<T>> {
        let sp = self.evaluate(u)?;
        self.normal_of(&sp)
    }

    /// Checks `gram_det > 0` on a `samples`-per-direction grid of interior
    /// points of every nonzero knot span.
    pub fn validate_mapping(&self, samples: usize) -> Result<()> {
        let spans: Vec<Vec<(T, T)>> = self
            .knot_vectors
            .iter()
            .map(|k| k.nonzero_spans())
            .collect();
        let frac = |i: usize| T::of_usize(i + 1) / T::of_usize(samples + 1);
        let probe = |u: &[T]| -> Result<()> {
            self.gram_det(u).map(|_| ()).map_err(|_| {
                Error::InvalidGeometry(format!(
                    "singular mapping at {:?}",
                    u.iter().map(|v| v.as_f64()).collect::<Vec<_>>()
                ))
            })
        };
        if self.param_dim() == 1 {
            for &(a, b) in &spans[0] {
                for i in 0..samples {
                    probe(&[a + (b - a) * frac(i)])?;
                }
            }
        } else {
            for &(a0, b0) in &spans[0] {
                for &(a1, b1) in &spans[1] {
                    for i in 0..samples {
                        for j in 0..samples {
                            probe(&[a0 + (b0 - a0) * frac(i), a1 + (b1 - a1) * frac(j)])?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Exact rational constructions used by tests, examples and shipped data.
pub mod shapes {
    use super::*;

    fn circle_net<T: Real>() -> (KnotVector<T>, Vec<[T; 2]>, Vec<T>) {
        let s = T::FRAC_1_SQRT_2();
        let o = T::one();
        let z = T::zero();
        let knots = [0., 0., 0., 1., 1., 2., 2., 3., 3., 4., 4., 4.]
            .iter()
            .map(|&v| T::of(v))
            .collect();
        let pts = vec![
            [o, z],
            [o, o],
            [z, o],
            [-o, o],
            [-o, z],
            [-o, -o],
            [z, -o],
            [o, -o],
            [o, z],
        ];
        let w = vec![o, s, o, s, o, s, o, s, o];
        (KnotVector::new(knots, 2).expect("valid circle knots"), pts, w)
    }

    /// Rational quadratic quarter of the unit circle, `u ∈ [0, 1]`.
    pub fn quarter_circle<T: Real>() -> NurbsPatch<T> {
        let o = T::one();
        let z = T::zero();
        NurbsPatch::curve(
            KnotVector::bezier(2, z, o).expect("bezier"),
            &[[o, z], [o, o], [z, o]],
            &[o, T::FRAC_1_SQRT_2(), o],
        )
        .expect("valid quarter circle")
    }

    /// Full circle of the given radius and center, counterclockwise,
    /// nine-point rational quadratic form over `u ∈ [0, 4]`.
    pub fn circle<T: Real>(center: [T; 2], radius: T) -> NurbsPatch<T> {
        let (kv, pts, w) = circle_net::<T>();
        let pts: Vec<[T; 2]> = pts
            .iter()
            .map(|p| [center[0] + radius * p[0], center[1] + radius * p[1]])
            .collect();
        NurbsPatch::curve(kv, &pts, &w).expect("valid circle")
    }

    /// Straight segment as a degree-1 curve on `[0, 1]`.
    pub fn segment<T: Real>(a: [T; 2], b: [T; 2]) -> NurbsPatch<T> {
        NurbsPatch::curve(
            KnotVector::bezier(1, T::zero(), T::one()).expect("bezier"),
            &[a, b],
            &[T::one(), T::one()],
        )
        .expect("valid segment")
    }

    /// Flat bilinear square `[0, side]² × {0}` on the parameter square `[0, 1]²`.
    pub fn flat_square<T: Real>(side: T) -> NurbsPatch<T> {
        let z = T::zero();
        let kv = KnotVector::bezier(1, z, T::one()).expect("bezier");
        NurbsPatch::surface(
            [kv.clone(), kv],
            &[[z, z, z], [side, z, z], [z, side, z], [side, side, z]],
            &[T::one(); 4],
        )
        .expect("valid square")
    }

    /// Exact biquadratic rational torus around the z axis. `major` is the
    /// distance from the center to the tube center, `minor` the tube radius.
    /// The first parameter runs around the z axis, the second around the
    /// tube; the normal points out of the solid torus.
    pub fn torus<T: Real>(major: T, minor: T) -> NurbsPatch<T> {
        let (kv, circ, w) = circle_net::<T>();
        let mut points = Vec::with_capacity(81);
        let mut weights = Vec::with_capacity(81);
        for (tube, &wt) in circ.iter().zip(&w) {
            // tube cross-section in the (rho, z) half plane
            let rho = major + minor * tube[0];
            let z = minor * tube[1];
            for (around, &wa) in circ.iter().zip(&w) {
                points.push([rho * around[0], rho * around[1], z]);
                weights.push(wt * wa);
            }
        }
        NurbsPatch::surface([kv.clone(), kv], &points, &weights).expect("valid torus")
    }
}

#[cfg(test)]
mod tests {
    use super::shapes::*;
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perspective_examples() {
        let x = perspective_map(&[1.5, 2.5, 2.5]).unwrap();
        assert_abs_diff_eq!(x[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-15);
        assert_eq!(perspective_map(&[3.0, -2.0, 1.0]).unwrap(), vec![3.0, -2.0]);
        assert_eq!(perspective_map(&[2.0, 4.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(perspective_map(&[1.0, 1.0, 0.0]), Err(Error::SingularProjection));
    }

    #[test]
    fn homogeneous_arc_projection() {
        // control points given directly in homogeneous form
        let kv = KnotVector::bezier(2, 0.0, 1.0).unwrap();
        let cps = vec![
            ControlPointH { weighted: [2.0, 0.0, 0.0], weight: 2.0 },
            ControlPointH { weighted: [2.0, 3.0, 0.0], weight: 2.0 },
            ControlPointH { weighted: [0.0, 4.0, 0.0], weight: 4.0 },
        ];
        let patch = NurbsPatch::new(2, vec![kv], cps).unwrap();
        let x = patch.eval_curve(0.5).unwrap();
        assert_abs_diff_eq!(x[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn quarter_circle_midpoint_and_tangent() {
        let q = quarter_circle::<f64>();
        let x = q.eval_curve(0.5).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(x[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], h, epsilon = 1e-15);
        let t = q.eval_curve_jacobian(0.3).unwrap();
        let p = q.eval_curve(0.3).unwrap();
        assert_abs_diff_eq!(crate::scalar::dot(&t, &p), 0.0, epsilon = 1e-12);
        assert_eq!(q.eval_curve(0.0).unwrap(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn segment_constant_tangent() {
        let s = segment([0.0, 0.0], [2.0, 0.0]);
        for u in [0.0, 0.3, 1.0] {
            assert_eq!(s.eval_curve_jacobian(u).unwrap(), [2.0, 0.0, 0.0]);
            assert_abs_diff_eq!(s.gram_det(&[u]).unwrap(), 2.0, epsilon = 1e-15);
        }
        let x = s.eval_curve(0.25).unwrap();
        assert_abs_diff_eq!(x[0], 0.5, epsilon = 1e-15);
        // tangent (2,0) rotated by -90 degrees
        assert_eq!(s.normal(&[0.5]).unwrap(), [0.0, -1.0, 0.0]);
    }

    #[test]
    fn flat_square_jacobian() {
        let sq = flat_square(1.0);
        let j = sq.eval_surface_jacobian([0.3, 0.7]).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(j[0][k], [1.0, 0.0, 0.0][k], epsilon = 1e-15);
            assert_abs_diff_eq!(j[1][k], [0.0, 1.0, 0.0][k], epsilon = 1e-15);
        }
        assert_abs_diff_eq!(sq.gram_det(&[0.2, 0.9]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sq.normal(&[0.5, 0.5]).unwrap()[2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn net_size_mismatch_rejected() {
        let kv = KnotVector::bezier(2, 0.0, 1.0).unwrap();
        let err = NurbsPatch::curve(kv, &[[0.0, 0.0], [1.0, 0.0]], &[1.0, 1.0]);
        assert!(matches!(err, Err(Error::InvalidGeometry(_))));
        let kv = KnotVector::bezier(1, 0.0, 1.0).unwrap();
        let err = NurbsPatch::curve(kv, &[[0.0, 0.0], [1.0, 0.0]], &[1.0, -1.0]);
        assert!(matches!(err, Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn degenerate_gram_reported() {
        let s = segment([1.0, 1.0], [1.0, 1.0]);
        assert!(matches!(s.gram_det(&[0.5]), Err(Error::InvalidGeometry(_))));
        assert!(s.validate_mapping(3).is_err());
    }

    #[test]
    fn circle_corner_candidates_are_smooth() {
        let c = circle([0.0, 0.0], 1.0);
        assert_eq!(c.corner_candidates(), vec![1.0, 2.0, 3.0]);
        for u in c.corner_candidates() {
            assert!(c.tangent_kink(u).unwrap() < 1e-6);
        }
    }
}
