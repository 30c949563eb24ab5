//! Integration elements in parameter space.
//!
//! A patch is split into global elements by an artificial knot vector that
//! contains the geometry knots. Global elements can be refined further by
//! refinement points, which produce a hierarchy of local elements described
//! by affine transformation matrices acting on homogeneous corner nodes.
//! Curves use the same machinery with a dummy second direction `[0, 1]`.

use crate::error::{Error, Result};
use crate::geometry::NurbsPatch;
use crate::scalar::Real;

/// Axis-aligned box in parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBox<T> {
    pub lo: [T; 2],
    pub hi: [T; 2],
}

impl<T: Real> ParamBox<T> {
    pub fn new(lo: [T; 2], hi: [T; 2]) -> Self {
        Self { lo, hi }
    }

    pub fn lengths(&self) -> [T; 2] {
        [self.hi[0] - self.lo[0], self.hi[1] - self.lo[1]]
    }

    /// Length (curves) or area (surfaces) of the box.
    pub fn measure(&self, pdim: usize) -> T {
        let l = self.lengths();
        if pdim == 1 {
            l[0]
        } else {
            l[0] * l[1]
        }
    }

    /// Half-open membership `lo <= p < hi`; directions flagged in `closed_hi`
    /// also accept `p == hi`.
    pub fn contains(&self, p: [T; 2], closed_hi: [bool; 2]) -> bool {
        (0..2).all(|k| {
            p[k] >= self.lo[k] && (p[k] < self.hi[k] || (closed_hi[k] && p[k] == self.hi[k]))
        })
    }

    pub fn contains_closed(&self, p: [T; 2]) -> bool {
        (0..2).all(|k| p[k] >= self.lo[k] && p[k] <= self.hi[k])
    }
}

/// 3×3 matrix acting on homogeneous parametric points `(u₁, u₂, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Transform<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    pub fn scale_translate(s: [T; 2], t: [T; 2]) -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[s[0], z, t[0]], [z, s[1], t[1]], [z, z, o]],
        }
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        Self { m }
    }

    pub fn apply(&self, p: [T; 2]) -> [T; 2] {
        [
            self.m[0][0] * p[0] + self.m[0][1] * p[1] + self.m[0][2],
            self.m[1][0] * p[0] + self.m[1][1] * p[1] + self.m[1][2],
        ]
    }

    pub fn apply_box(&self, b: &ParamBox<T>) -> ParamBox<T> {
        let a = self.apply(b.lo);
        let c = self.apply(b.hi);
        ParamBox::new([a[0].min(c[0]), a[1].min(c[1])], [a[0].max(c[0]), a[1].max(c[1])])
    }

    /// Product with a 3×4 node matrix.
    pub fn apply_nodes(&self, nodes: &[[T; 4]; 3]) -> [[T; 4]; 3] {
        let mut out = [[T::zero(); 4]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * nodes[k][j]).sum();
            }
        }
        out
    }
}

/// Homogeneous corner nodes of a box: lower-left, upper-right, upper-left,
/// lower-right.
pub fn node_matrix<T: Real>(b: &ParamBox<T>) -> [[T; 4]; 3] {
    let o = T::one();
    [
        [b.lo[0], b.hi[0], b.lo[0], b.hi[0]],
        [b.lo[1], b.hi[1], b.hi[1], b.lo[1]],
        [o, o, o, o],
    ]
}

/// Box spanned by a node matrix.
pub fn box_of_nodes<T: Real>(a: &[[T; 4]; 3]) -> ParamBox<T> {
    ParamBox::new([a[0][0], a[1][0]], [a[0][1], a[1][1]])
}

/// Transformation matrices mapping `parent` onto the children produced by a
/// set of refinement points of the next level. Children are ordered with the
/// first direction running fastest. No points yields the identity.
pub fn build_transformations<T: Real>(parent: &ParamBox<T>, points: &[[T; 2]]) -> Vec<Transform<T>> {
    let full = parent.lengths();
    let cuts = |k: usize| -> Vec<T> {
        let mut v = vec![parent.lo[k], parent.hi[k]];
        v.extend(points.iter().map(|p| p[k]));
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        // non-zero spans only
        v.windows(2).map(|w| w[1] - w[0]).filter(|&l| l > T::zero()).collect()
    };
    let (spans0, spans1) = (cuts(0), cuts(1));
    let mut out = Vec::with_capacity(spans0.len() * spans1.len());
    let mut t1 = T::zero();
    for &l1 in &spans1 {
        let mut t0 = T::zero();
        for &l0 in &spans0 {
            let s = [l0 / full[0], l1 / full[1]];
            let t = [
                parent.lo[0] * (T::one() - s[0]) + t0,
                parent.lo[1] * (T::one() - s[1]) + t1,
            ];
            out.push(Transform::scale_translate(s, t));
            t0 = t0 + l0;
        }
        t1 = t1 + l1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementPoint<T> {
    pub coords: [T; 2],
    /// Refinement level, starting at 1 for points that split global elements.
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalNode<T> {
    pub level: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Per-level transformation relative to the parent node.
    pub transform: Transform<T>,
    pub bbox: ParamBox<T>,
}

/// Hierarchy of local elements below one global element.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalElementTree<T> {
    nodes: Vec<LocalNode<T>>,
}

impl<T: Real> LocalElementTree<T> {
    /// Builds the tree level by level. Points of level `ℓ` split the current
    /// element (leaf after level `ℓ−1`) that contains them under half-open
    /// membership; `closed_hi` marks directions where the root's upper edge
    /// is the patch boundary.
    pub fn build(root: ParamBox<T>, points: &[RefinementPoint<T>], closed_hi: [bool; 2]) -> Self {
        let mut nodes = vec![LocalNode {
            level: 0,
            parent: None,
            children: Vec::new(),
            transform: Transform::identity(),
            bbox: root,
        }];
        let max_level = points.iter().map(|p| p.level).max().unwrap_or(0);
        let mut current = vec![0usize];
        for level in 1..=max_level {
            let mut next = Vec::new();
            for &c in &current {
                let bbox = nodes[c].bbox;
                let closed = [
                    closed_hi[0] && bbox.hi[0] == root.hi[0],
                    closed_hi[1] && bbox.hi[1] == root.hi[1],
                ];
                let pts: Vec<[T; 2]> = points
                    .iter()
                    .filter(|p| p.level == level && bbox.contains(p.coords, closed))
                    .map(|p| p.coords)
                    .collect();
                let transforms = if pts.is_empty() {
                    Vec::new()
                } else {
                    build_transformations(&bbox, &pts)
                };
                if transforms.len() <= 1 {
                    next.push(c);
                    continue;
                }
                for t in transforms {
                    let idx = nodes.len();
                    nodes.push(LocalNode {
                        level,
                        parent: Some(c),
                        children: Vec::new(),
                        transform: t,
                        bbox: t.apply_box(&bbox),
                    });
                    nodes[c].children.push(idx);
                    next.push(idx);
                }
            }
            current = next;
        }
        Self { nodes }
    }

    pub fn nodes(&self) -> &[LocalNode<T>] {
        &self.nodes
    }

    pub fn root(&self) -> &LocalNode<T> {
        &self.nodes[0]
    }

    /// Node indices without children, in construction order.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].children.is_empty())
            .collect()
    }

    /// Accumulated transformation `T̂ = T_ℓ ⋯ T_1` of a node and its node
    /// matrix `A_ℓ = T̂ A₀`.
    pub fn accumulate(&self, node: usize) -> (Transform<T>, [[T; 4]; 3]) {
        let mut acc = Transform::identity();
        let mut cur = node;
        while let Some(parent) = self.nodes[cur].parent {
            acc = acc.compose(&self.nodes[cur].transform);
            cur = parent;
        }
        // walking up multiplies on the right: T_ℓ · … · T_1
        let a0 = node_matrix(&self.nodes[0].bbox);
        (acc, acc.apply_nodes(&a0))
    }
}

/// End of a knot span towards which grading clusters the inserted knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradeEnd {
    Left,
    Right,
}

/// Grading exponent `q = (order + 1) / λ` for quadrature order `order` and
/// Hölder constant `0 < λ ≤ 1`.
pub fn grading_exponent<T: Real>(order: usize, holder: T) -> Result<T> {
    if !(holder > T::zero() && holder <= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "Hölder constant {holder} outside (0, 1]"
        )));
    }
    Ok(T::of_usize(order + 1) / holder)
}

/// Interior knots that split `[a, b]` into `m` elements graded towards one end.
pub fn graded_knots<T: Real>(a: T, b: T, m: usize, q: T, end: GradeEnd) -> Result<Vec<T>> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("grading needs m >= 2, got {m}")));
    }
    if !(q >= T::one()) {
        return Err(Error::InvalidParameter(format!("grading exponent {q} < 1")));
    }
    let mf = T::of_usize(m);
    let mut out: Vec<T> = (1..m)
        .map(|i| {
            let f = (T::of_usize(i) / mf).powf(q);
            match end {
                GradeEnd::Left => a + (b - a) * f,
                GradeEnd::Right => b - (b - a) * f,
            }
        })
        .collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(out)
}

/// Partition of one patch: artificial knot vectors plus refinement points.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementPartition<T> {
    pdim: usize,
    artificial: Vec<Vec<T>>,
    domain: [(T, T); 2],
    /// Whether each direction closes on itself (first and last span adjacent).
    closed: [bool; 2],
    refinement_points: Vec<RefinementPoint<T>>,
}


impl<T: Real> ElementPartition<T> {
    /// Initial partition with the artificial knot vectors equal to the
    /// geometry knot vectors.
    pub fn new(patch: &NurbsPatch<T>) -> Self {
        Self {
            pdim: patch.param_dim(),
            artificial: patch
                .knot_vectors()
                .iter()
                .map(|k| k.knots().to_vec())
                .collect(),
            domain: patch.param_domain(),
            closed: [patch.is_closed_curve(), false],
            refinement_points: Vec::new(),
        }
    }

    pub fn is_closed(&self, direction: usize) -> bool {
        self.closed[direction]
    }

    pub fn param_dim(&self) -> usize {
        self.pdim
    }

    pub fn artificial_knots(&self, direction: usize) -> &[T] {
        &self.artificial[direction]
    }

    pub fn refinement_points(&self) -> &[RefinementPoint<T>] {
        &self.refinement_points
    }

    /// Distinct breakpoints of the artificial knot vector inside the domain.
    pub fn breakpoints(&self, direction: usize) -> Vec<T> {
        if direction >= self.pdim {
            return vec![T::zero(), T::one()];
        }
        let (lo, hi) = self.domain[direction];
        let mut v: Vec<T> = self.artificial[direction]
            .iter()
            .copied()
            .filter(|&k| k >= lo && k <= hi)
            .collect();
        v.dedup();
        v
    }

    pub fn spans(&self, direction: usize) -> Vec<(T, T)> {
        self.breakpoints(direction)
            .windows(2)
            .map(|w| (w[0], w[1]))
            .collect()
    }

    /// Inserts unique knots; each value must lie strictly inside a nonzero span.
    pub fn insert_knots(&mut self, direction: usize, values: &[T]) -> Result<()> {
        if direction >= self.pdim {
            return Err(Error::InvalidRefinement(format!(
                "direction {direction} does not exist"
            )));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Less));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidRefinement("duplicate knot in insertion".into()));
        }
        let spans = self.spans(direction);
        for &v in &sorted {
            if !spans.iter().any(|&(a, b)| a < v && v < b) {
                return Err(Error::InvalidRefinement(format!(
                    "knot {v} is not strictly inside a nonzero span"
                )));
            }
        }
        let kv = &mut self.artificial[direction];
        for v in sorted {
            let pos = kv.partition_point(|&k| k <= v);
            kv.insert(pos, v);
        }
        Ok(())
    }

    /// Halves every nonzero span in every parametric direction.
    pub fn refine_uniform(&mut self) -> Result<()> {
        for d in 0..self.pdim {
            let mids: Vec<T> = self
                .spans(d)
                .iter()
                .map(|&(a, b)| (a + b) * T::half())
                .collect();
            self.insert_knots(d, &mids)?;
        }
        // refinement points are tied to the old element layout
        Ok(())
    }

    /// Subdivides nonzero span `span` of `direction` into `m` elements
    /// graded towards one of its ends with exponent `q`.
    pub fn grade_span(&mut self, direction: usize, span: usize, m: usize, q: T, end: GradeEnd) -> Result<()> {
        let spans = self.spans(direction);
        let &(a, b) = spans.get(span).ok_or_else(|| {
            Error::InvalidRefinement(format!("span {span} does not exist"))
        })?;
        let knots = graded_knots(a, b, m, q, end)?;
        self.insert_knots(direction, &knots)
    }

    /// Grades the spans adjacent to parameter `value` towards it. On closed
    /// curves a domain end grades both the first and the last span.
    pub fn grade_towards(&mut self, direction: usize, value: T, m: usize, q: T) -> Result<()> {
        let spans = self.spans(direction);
        let (lo, hi) = self.domain[direction];
        let wrap = self.closed[direction];
        let mut jobs = Vec::new();
        for (i, &(a, b)) in spans.iter().enumerate() {
            if b == value || (wrap && value == lo && i + 1 == spans.len()) {
                jobs.push((i, GradeEnd::Right));
            }
            if a == value || (wrap && value == hi && i == 0) {
                jobs.push((i, GradeEnd::Left));
            }
        }
        if jobs.is_empty() {
            return Err(Error::InvalidRefinement(format!(
                "{value} is not a breakpoint of direction {direction}"
            )));
        }
        // later spans first so earlier indices stay valid
        jobs.sort_by_key(|j| std::cmp::Reverse(j.0));
        for (i, end) in jobs {
            self.grade_span(direction, i, m, q, end)?;
        }
        Ok(())
    }

    /// Boxes of the global elements, first direction fastest.
    pub fn global_elements(&self) -> Vec<ParamBox<T>> {
        let s0 = self.spans(0);
        let s1 = self.spans(1);
        let mut out = Vec::with_capacity(s0.len() * s1.len());
        for &(c, d) in &s1 {
            for &(a, b) in &s0 {
                out.push(ParamBox::new([a, c], [b, d]));
            }
        }
        out
    }

    fn closed_flags(&self, b: &ParamBox<T>) -> [bool; 2] {
        [b.hi[0] == self.domain[0].1, self.pdim == 1 || b.hi[1] == self.domain[1].1]
    }

    /// Adds a refinement point after checking that it lies in exactly one
    /// current element of the previous level.
    pub fn add_refinement_point(&mut self, point: RefinementPoint<T>) -> Result<()> {
        let coords = if self.pdim == 1 {
            [point.coords[0], T::zero()]
        } else {
            point.coords
        };
        let point = RefinementPoint { coords, level: point.level };
        let max_level = self.refinement_points.iter().map(|p| p.level).max().unwrap_or(0);
        let placement = || Error::Placement(coords.iter().map(|c| c.as_f64()).collect());
        if point.level == 0 || point.level > max_level + 1 {
            return Err(placement());
        }
        let below: Vec<RefinementPoint<T>> = self
            .refinement_points
            .iter()
            .copied()
            .filter(|p| p.level < point.level)
            .collect();
        let mut hits = 0;
        for root in self.global_elements() {
            let closed = self.closed_flags(&root);
            if !root.contains(coords, closed) {
                continue;
            }
            let tree = LocalElementTree::build(root, &below, closed);
            for leaf in tree.leaves() {
                let b = tree.nodes()[leaf].bbox;
                let c = [closed[0] && b.hi[0] == root.hi[0], closed[1] && b.hi[1] == root.hi[1]];
                if b.contains(coords, c) {
                    hits += 1;
                }
            }
        }
        if hits != 1 {
            return Err(placement());
        }
        self.refinement_points.push(point);
        Ok(())
    }

    /// Local element trees, one per global element.
    pub fn trees(&self) -> Vec<LocalElementTree<T>> {
        self.global_elements()
            .into_iter()
            .map(|root| {
                let closed = self.closed_flags(&root);
                LocalElementTree::build(root, &self.refinement_points, closed)
            })
            .collect()
    }

    /// Final integration elements (tree leaves) of this patch.
    pub fn leaves(&self, patch: usize) -> Vec<Leaf<T>> {
        let mut out = Vec::new();
        for (element, tree) in self.trees().iter().enumerate() {
            for node in tree.leaves() {
                let (transform, _) = tree.accumulate(node);
                out.push(Leaf {
                    patch,
                    element,
                    level: tree.nodes()[node].level,
                    bbox: tree.nodes()[node].bbox,
                    transform,
                    pdim: self.pdim,
                });
            }
        }
        out
    }
}

/// Integration element: a leaf of a local element tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leaf<T> {
    pub patch: usize,
    /// Index of the global element within its patch.
    pub element: usize,
    pub level: usize,
    pub bbox: ParamBox<T>,
    /// Accumulated transformation from the global element.
    pub transform: Transform<T>,
    pub pdim: usize,
}

impl<T: Real> Leaf<T> {
    /// Affine map from reference coordinates `ξ ∈ [−1, 1]^k` to parameters,
    /// returning the parameter point and the Jacobian determinant.
    pub fn map_ref_to_param(&self, xi: [T; 2]) -> ([T; 2], T) {
        let l = self.bbox.lengths();
        let mut u = [T::zero(); 2];
        let mut jac = T::one();
        for k in 0..2 {
            if k < self.pdim {
                u[k] = self.bbox.lo[k] + (xi[k] + T::one()) * T::half() * l[k];
                jac = jac * l[k] * T::half();
            } else {
                u[k] = T::zero();
            }
        }
        (u, jac)
    }

    /// Inverse of [`Leaf::map_ref_to_param`].
    pub fn map_param_to_ref(&self, u: [T; 2]) -> [T; 2] {
        let l = self.bbox.lengths();
        let mut xi = [T::zero(); 2];
        for k in 0..self.pdim {
            xi[k] = (u[k] - self.bbox.lo[k]) / l[k] * T::two() - T::one();
        }
        xi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;
    use crate::geometry::NurbsPatch;
    use crate::spline::KnotVector;
    use approx::assert_abs_diff_eq;

    fn cubic_curve() -> NurbsPatch<f64> {
        let kv = KnotVector::new(vec![0., 0., 0., 0., 2., 4., 4., 4., 4.], 3).unwrap();
        let pts = [[0.0, 0.0], [1.0, 1.0], [2.0, 0.5], [3.0, 1.5], [4.0, 0.0]];
        NurbsPatch::curve(kv, &pts, &[1.0; 5]).unwrap()
    }

    fn bezier_surface() -> NurbsPatch<f64> {
        let kv = KnotVector::bezier(2, 0.0, 2.0).unwrap();
        let mut pts = Vec::new();
        for j in 0..3 {
            for i in 0..3 {
                pts.push([i as f64, j as f64, 0.1 * (i * j) as f64]);
            }
        }
        NurbsPatch::surface([kv.clone(), kv], &pts, &[1.0; 9]).unwrap()
    }

    #[test]
    fn init_partition_examples() {
        let p = ElementPartition::new(&cubic_curve());
        assert_eq!(p.spans(0), vec![(0.0, 2.0), (2.0, 4.0)]);
        assert_eq!(p.global_elements().len(), 2);
        let s = ElementPartition::new(&bezier_surface());
        let e = s.global_elements();
        assert_eq!(e, vec![ParamBox::new([0.0, 0.0], [2.0, 2.0])]);
        let seg = ElementPartition::new(&shapes::segment([0.0, 0.0], [1.0, 0.0]));
        assert_eq!(seg.global_elements().len(), 1);
    }

    #[test]
    fn knot_insertion() {
        let mut p = ElementPartition::new(&cubic_curve());
        p.insert_knots(0, &[1.0, 3.0]).unwrap();
        assert_eq!(
            p.artificial_knots(0),
            &[0., 0., 0., 0., 1., 2., 3., 4., 4., 4., 4.]
        );
        assert_eq!(p.global_elements().len(), 4);
        assert!(p.insert_knots(0, &[1.0]).is_err());
        assert!(p.insert_knots(0, &[5.0]).is_err());
        assert!(p.insert_knots(0, &[0.5, 0.5]).is_err());
        let mut q = ElementPartition::new(&cubic_curve());
        q.refine_uniform().unwrap();
        assert_eq!(q.breakpoints(0), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn global_refinement_of_surface() {
        let kv_a = KnotVector::new(vec![0., 0., 0., 1., 1., 2., 2., 2.], 2).unwrap();
        let kv_b = KnotVector::bezier(2, 0.0, 2.0).unwrap();
        let mut pts = Vec::new();
        for j in 0..3 {
            for i in 0..5 {
                pts.push([i as f64, j as f64, 0.0]);
            }
        }
        let patch = NurbsPatch::surface([kv_a, kv_b], &pts, &[1.0; 15]).unwrap();
        let mut p = ElementPartition::new(&patch);
        assert_eq!(p.global_elements().len(), 2);
        p.insert_knots(1, &[1.0]).unwrap();
        assert_eq!(p.global_elements().len(), 4);
    }

    #[test]
    fn grading_formula() {
        let k = graded_knots(0.0, 1.0, 4, 3.0, GradeEnd::Left).unwrap();
        for (a, b) in k.iter().zip([1.0 / 64.0, 1.0 / 8.0, 27.0 / 64.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let u = graded_knots(0.0, 1.0, 4, 1.0, GradeEnd::Left).unwrap();
        assert_eq!(u, vec![0.25, 0.5, 0.75]);
        let r = graded_knots(0.0, 1.0, 4, 3.0, GradeEnd::Right).unwrap();
        for (a, b) in r.iter().zip([1.0 - 27.0 / 64.0, 1.0 - 1.0 / 8.0, 1.0 - 1.0 / 64.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert!(graded_knots(0.0, 1.0, 4, 0.5, GradeEnd::Left).is_err());
        assert!(graded_knots(0.0, 1.0, 1, 2.0, GradeEnd::Left).is_err());
    }

    #[test]
    fn grade_towards_corner_gives_m_elements_per_span() {
        let mut p = ElementPartition::new(&cubic_curve());
        let q = grading_exponent(3, 1.0).unwrap();
        assert_eq!(q, 4.0);
        p.grade_towards(0, 2.0, 6, q).unwrap();
        let spans = p.spans(0);
        assert_eq!(spans.len(), 12);
        // smallest elements touch the corner
        let left: Vec<f64> = spans[..6].iter().map(|s| s.1 - s.0).collect();
        assert!(left.windows(2).all(|w| w[0] > w[1]));
        let right: Vec<f64> = spans[6..].iter().map(|s| s.1 - s.0).collect();
        assert!(right.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn alg1_transformations() {
        let parent = ParamBox::new([0.0, 0.0], [2.0, 2.0]);
        let t = build_transformations(&parent, &[[1.0, 1.0]]);
        assert_eq!(t.len(), 4);
        assert_eq!(t[0], Transform::scale_translate([0.5, 0.5], [0.0, 0.0]));
        assert_eq!(t[3], Transform::scale_translate([0.5, 0.5], [1.0, 1.0]));
        let none = build_transformations(&parent, &[]);
        assert_eq!(none, vec![Transform::identity()]);
        let edge = build_transformations(&parent, &[[1.0, 0.0]]);
        assert_eq!(edge.len(), 2);
        assert_eq!(edge[0].apply_box(&parent), ParamBox::new([0.0, 0.0], [1.0, 2.0]));
        let grid = build_transformations(&parent, &[[0.5, 0.5], [1.5, 1.0]]);
        assert_eq!(grid.len(), 9);
        // offset parent: children map onto the right sub-boxes
        let off = ParamBox::new([2.0, 1.0], [4.0, 3.0]);
        let t = build_transformations(&off, &[[3.0, 2.5]]);
        assert_eq!(t[3].apply_box(&off), ParamBox::new([3.0, 2.5], [4.0, 3.0]));
    }

    #[test]
    fn refinement_point_children() {
        let mut p = ElementPartition::new(&bezier_surface());
        p.add_refinement_point(RefinementPoint { coords: [0.5, 0.5], level: 1 }).unwrap();
        let boxes: Vec<ParamBox<f64>> = p.leaves(0).iter().map(|l| l.bbox).collect();
        assert_eq!(
            boxes,
            vec![
                ParamBox::new([0.0, 0.0], [0.5, 0.5]),
                ParamBox::new([0.5, 0.0], [2.0, 0.5]),
                ParamBox::new([0.0, 0.5], [0.5, 2.0]),
                ParamBox::new([0.5, 0.5], [2.0, 2.0]),
            ]
        );
        let mut e = ElementPartition::new(&bezier_surface());
        e.add_refinement_point(RefinementPoint { coords: [1.0, 0.0], level: 1 }).unwrap();
        assert_eq!(e.leaves(0).len(), 2);
        let mut g = ElementPartition::new(&bezier_surface());
        g.add_refinement_point(RefinementPoint { coords: [0.5, 0.5], level: 1 }).unwrap();
        g.add_refinement_point(RefinementPoint { coords: [1.5, 1.5], level: 1 }).unwrap();
        assert_eq!(g.leaves(0).len(), 9);
    }

    #[test]
    fn placement_errors() {
        let mut p = ElementPartition::new(&bezier_surface());
        assert!(matches!(
            p.add_refinement_point(RefinementPoint { coords: [3.0, 0.5], level: 1 }),
            Err(Error::Placement(_))
        ));
        assert!(p
            .add_refinement_point(RefinementPoint { coords: [0.5, 0.5], level: 3 })
            .is_err());
        assert!(p
            .add_refinement_point(RefinementPoint { coords: [0.5, 0.5], level: 0 })
            .is_err());
    }

    #[test]
    fn accumulated_transform_of_corner_halvings() {
        let mut p = ElementPartition::new(&bezier_surface());
        p.add_refinement_point(RefinementPoint { coords: [1.0, 1.0], level: 1 }).unwrap();
        p.add_refinement_point(RefinementPoint { coords: [0.5, 0.5], level: 2 }).unwrap();
        let trees = p.trees();
        let tree = &trees[0];
        let leaf = tree
            .leaves()
            .into_iter()
            .find(|&i| tree.nodes()[i].bbox == ParamBox::new([0.0, 0.0], [0.5, 0.5]))
            .unwrap();
        let (t, a) = tree.accumulate(leaf);
        assert_eq!(t, Transform::scale_translate([0.25, 0.25], [0.0, 0.0]));
        assert_eq!(box_of_nodes(&a), ParamBox::new([0.0, 0.0], [0.5, 0.5]));
        let (root_t, _) = tree.accumulate(0);
        assert_eq!(root_t, Transform::identity());
    }

    #[test]
    fn reference_map() {
        let leaf = Leaf {
            patch: 0,
            element: 0,
            level: 0,
            bbox: ParamBox::new([0.0, 0.0], [2.0, 1.0]),
            transform: Transform::identity(),
            pdim: 1,
        };
        let (u, j) = leaf.map_ref_to_param([0.0, 0.0]);
        assert_eq!((u[0], j), (1.0, 1.0));
        let sq = Leaf {
            pdim: 2,
            bbox: ParamBox::new([0.5, 0.5], [2.0, 2.0]),
            ..leaf
        };
        assert_eq!(sq.map_ref_to_param([-1.0, -1.0]).0, [0.5, 0.5]);
        let small = Leaf {
            pdim: 2,
            bbox: ParamBox::new([0.0, 0.0], [0.5, 0.5]),
            ..leaf
        };
        assert_abs_diff_eq!(small.map_ref_to_param([0.2, 0.1]).1, 0.0625, epsilon = 1e-16);
        let xi = [0.3, -0.7];
        let back = sq.map_param_to_ref(sq.map_ref_to_param(xi).0);
        assert_abs_diff_eq!(back[0], xi[0], epsilon = 1e-15);
        assert_abs_diff_eq!(back[1], xi[1], epsilon = 1e-15);
    }
}
