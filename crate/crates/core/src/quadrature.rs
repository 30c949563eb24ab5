//! Gauss–Legendre rules, quadrature point distribution over integration
//! elements and adaptive integrators for (nearly) singular integrands.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::geometry::NurbsPatch;
use crate::partition::{ElementPartition, Leaf};
use crate::scalar::{self, Real, Vec3};

pub const MAX_POINTS: usize = 64;

/// Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Order used by the convergence model: the number of points.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// Tensor-product nodes and weights in `k` parametric directions, first
    /// direction running fastest.
    pub fn tensor(&self, k: usize) -> Vec<([T; 2], T)> {
        let n = self.len();
        if k == 1 {
            return (0..n)
                .map(|i| ([self.nodes[i], T::zero()], self.weights[i]))
                .collect();
        }
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                out.push(([self.nodes[i], self.nodes[j]], self.weights[i] * self.weights[j]));
            }
        }
        out
    }
}

/// `n`-point Gauss–Legendre rule, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    if n == 0 || n > MAX_POINTS {
        return Err(Error::InvalidParameter(format!(
            "number of Gauss points {n} outside 1..={MAX_POINTS}"
        )));
    }
    // Newton on the Legendre recurrence in f64, then converted
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes: nodes.into_iter().map(T::of).collect(),
        weights: weights.into_iter().map(T::of).collect(),
    })
}

/// One quadrature point of the global point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint<T> {
    pub leaf: usize,
    pub xi: [T; 2],
    pub param: [T; 2],
    pub position: Vec3<T>,
    pub normal: Vec3<T>,
    /// Combined weight `w · J_ξ · G`.
    pub weight: T,
    /// Tensor Gauss weight `w`.
    pub ref_weight: T,
    /// `J_ξ · G`.
    pub jacobian: T,
}

/// A leaf together with its point range and geometric extent samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafInfo<T> {
    pub leaf: Leaf<T>,
    pub points: Range<usize>,
    /// Physical corner and edge-midpoint samples (3 for curves, 9 for surfaces).
    pub samples: Vec<Vec3<T>>,
    pub diam: T,
}

impl<T: Real> LeafInfo<T> {
    /// Minimum distance from `x` to the extent samples.
    pub fn dist(&self, x: &Vec3<T>) -> T {
        self.samples
            .iter()
            .map(|s| scalar::distance(s, x))
            .fold(T::infinity(), T::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePointSet<T> {
    pub points: Vec<QuadPoint<T>>,
    pub leaves: Vec<LeafInfo<T>>,
    pub rule: QuadratureRule<T>,
    pub pdim: usize,
    pub dim: usize,
}

impl<T: Real> QuadraturePointSet<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points per leaf: `n` for curves, `n²` for surfaces.
    pub fn points_per_leaf(&self) -> usize {
        self.rule.len().pow(self.pdim as u32)
    }

    pub fn total_weight(&self) -> T {
        self.points.iter().map(|p| p.weight).sum()
    }
}

fn leaf_samples<T: Real>(patch: &NurbsPatch<T>, leaf: &Leaf<T>) -> Result<Vec<Vec3<T>>> {
    let pts: Vec<[T; 2]> = if leaf.pdim == 1 {
        vec![[-T::one(), T::zero()], [T::zero(), T::zero()], [T::one(), T::zero()]]
    } else {
        let s = [-T::one(), T::zero(), T::one()];
        s.iter()
            .flat_map(|&b| s.iter().map(move |&a| [a, b]))
            .collect()
    };
    pts.into_iter()
        .map(|xi| {
            let (u, _) = leaf.map_ref_to_param(xi);
            patch.evaluate(&u[..leaf.pdim]).map(|sp| sp.position)
        })
        .collect()
}

/// Places the tensor Gauss rule on every leaf of every patch.
pub fn distribute_points<T: Real>(
    patches: &[NurbsPatch<T>],
    partitions: &[ElementPartition<T>],
    rule: &QuadratureRule<T>,
) -> Result<QuadraturePointSet<T>> {
    if patches.is_empty() || patches.len() != partitions.len() {
        return Err(Error::Dimension(format!(
            "{} patches but {} partitions",
            patches.len(),
            partitions.len()
        )));
    }
    let pdim = patches[0].param_dim();
    let dim = patches[0].dim();
    if patches.iter().any(|p| p.param_dim() != pdim) {
        return Err(Error::InvalidGeometry("mixed curve and surface patches".into()));
    }
    let tensor = rule.tensor(pdim);
    let mut points = Vec::new();
    let mut leaves = Vec::new();
    for (pi, (patch, part)) in patches.iter().zip(partitions).enumerate() {
        for leaf in part.leaves(pi) {
            let start = points.len();
            let li = leaves.len();
            for &(xi, w) in &tensor {
                let (u, jx) = leaf.map_ref_to_param(xi);
                let sp = patch.evaluate(&u[..pdim])?;
                let g = patch.gram_of(&sp)?;
                let normal = patch.normal_of(&sp)?;
                points.push(QuadPoint {
                    leaf: li,
                    xi,
                    param: u,
                    position: sp.position,
                    normal,
                    weight: w * jx * g,
                    ref_weight: w,
                    jacobian: jx * g,
                });
            }
            let samples = leaf_samples(patch, &leaf)?;
            let mut diam = T::zero();
            for a in &samples {
                for b in &samples {
                    diam = diam.max(scalar::distance(a, b));
                }
            }
            leaves.push(LeafInfo {
                leaf,
                points: start..points.len(),
                samples,
                diam,
            });
        }
    }
    Ok(QuadraturePointSet {
        points,
        leaves,
        rule: rule.clone(),
        pdim,
        dim,
    })
}

/// Settings of the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions<T> {
    pub rel_tol: T,
    /// Absolute floor added to the tolerance.
    pub abs_tol: T,
    pub max_depth: usize,
    /// Gauss points per direction on each panel.
    pub points: usize,
}

impl<T: Real> Default for AdaptiveOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::of(1e-12),
            abs_tol: T::zero(),
            max_depth: 30,
            points: 10,
        }
    }
}

impl<T: Real> AdaptiveOptions<T> {
    pub fn with_rel_tol(mut self, tol: T) -> Self {
        self.rel_tol = tol;
        self
    }
}

struct Panel<T> {
    lo: [T; 2],
    hi: [T; 2],
    depth: usize,
    value: Vec<T>,
    abs: T,
    err: T,
    /// Refining did not reduce the error: the panel is at roundoff level.
    frozen: bool,
}

fn max_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).abs())
        .fold(T::zero(), T::max)
}

/// Points of the embedded lower-order rule used for the error estimate.
fn estimate_points(points: usize) -> usize {
    points.saturating_sub(2).max(1)
}

/// Globally adaptive integration of a vector-valued integrand over a box
/// (`pdim` = 1 ignores the second coordinate). Each panel compares its
/// Gauss estimate with a lower-order one on the same panel; the panel with
/// the largest discrepancy is split until the total discrepancy meets the
/// tolerance.
fn adaptive_box<T: Real, F: FnMut([T; 2], &mut [T])>(
    f: &mut F,
    lo: [T; 2],
    hi: [T; 2],
    pdim: usize,
    ncomp: usize,
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<T>> {
    let rules = [
        gauss_legendre::<T>(opts.points)?.tensor(pdim),
        gauss_legendre::<T>(estimate_points(opts.points))?.tensor(pdim),
    ];
    let mut buf = vec![T::zero(); ncomp];
    let mut panels = vec![make_panel(f, &rules, &mut buf, lo, hi, pdim, 0)];
    let eps = T::epsilon() * T::of(50.0);
    loop {
        let mut total = vec![T::zero(); ncomp];
        let mut err = T::zero();
        let mut scale = T::zero();
        let mut noise = T::zero();
        let mut worst: Option<usize> = None;
        for (i, p) in panels.iter().enumerate() {
            for (t, x) in total.iter_mut().zip(&p.value) {
                *t = *t + *x;
            }
            scale = scale + p.abs;
            if p.frozen {
                noise = noise + p.err;
                continue;
            }
            err = err + p.err;
            if worst.is_none_or(|w| p.err > panels[w].err) {
                worst = Some(i);
            }
        }
        let size = total.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let tol = (opts.rel_tol * size).max(eps * scale).max(opts.abs_tol);
        let Some(worst) = worst.filter(|_| err > tol) else {
            if noise + err > tol {
                log::debug!(
                    "adaptive integration limited by roundoff: error {:.2e}, tolerance {:.2e}",
                    (noise + err).as_f64(),
                    tol.as_f64()
                );
            }
            return Ok(total);
        };
        if panels[worst].depth >= opts.max_depth {
            return Err(Error::AccuracyNotReached {
                estimate: size.as_f64(),
                error: err.as_f64(),
            });
        }
        let p = panels.swap_remove(worst);
        let start = panels.len();
        for (a, b) in children(p.lo, p.hi, pdim) {
            panels.push(make_panel(f, &rules, &mut buf, a, b, pdim, p.depth + 1));
        }
        let child_err = panels[start..].iter().fold(T::zero(), |m, c| m + c.err);
        if p.depth >= 3 && child_err >= p.err {
            panels[start..].iter_mut().for_each(|c| c.frozen = true);
        }
    }
}

fn panel_estimate<T: Real, F: FnMut([T; 2], &mut [T])>(
    f: &mut F,
    tensor: &[([T; 2], T)],
    buf: &mut [T],
    lo: [T; 2],
    hi: [T; 2],
    pdim: usize,
) -> (Vec<T>, T) {
    let mut acc = vec![T::zero(); buf.len()];
    let mut abs = T::zero();
    let mut jac = T::one();
    let mut mid = [T::zero(); 2];
    let mut half = [T::zero(); 2];
    for k in 0..pdim {
        half[k] = (hi[k] - lo[k]) * T::half();
        mid[k] = (hi[k] + lo[k]) * T::half();
        jac = jac * half[k];
    }
    for &(xi, w) in tensor {
        let mut u = [T::zero(); 2];
        for k in 0..pdim {
            u[k] = mid[k] + half[k] * xi[k];
        }
        buf.iter_mut().for_each(|b| *b = T::zero());
        f(u, buf);
        for (a, b) in acc.iter_mut().zip(buf.iter()) {
            let v = w * jac * *b;
            *a = *a + v;
            abs = abs + v.abs();
        }
    }
    (acc, abs)
}

fn children<T: Real>(lo: [T; 2], hi: [T; 2], pdim: usize) -> Vec<([T; 2], [T; 2])> {
    let m0 = (lo[0] + hi[0]) * T::half();
    if pdim == 1 {
        return vec![(lo, [m0, hi[1]]), ([m0, lo[1]], hi)];
    }
    let m1 = (lo[1] + hi[1]) * T::half();
    vec![
        (lo, [m0, m1]),
        ([m0, lo[1]], [hi[0], m1]),
        ([lo[0], m1], [m0, hi[1]]),
        ([m0, m1], hi),
    ]
}

fn make_panel<T: Real, F: FnMut([T; 2], &mut [T])>(
    f: &mut F,
    rules: &[Vec<([T; 2], T)>; 2],
    buf: &mut [T],
    lo: [T; 2],
    hi: [T; 2],
    pdim: usize,
    depth: usize,
) -> Panel<T> {
    let (value, abs) = panel_estimate(f, &rules[0], buf, lo, hi, pdim);
    let (low, _) = panel_estimate(f, &rules[1], buf, lo, hi, pdim);
    let err = max_diff(&value, &low);
    Panel {
        lo,
        hi,
        depth,
        value,
        abs,
        err,
        frozen: false,
    }
}

/// Adaptive integral of `f` over `[a, b]`; `f` writes `ncomp` values.
pub fn adaptive_integrate_1d<T: Real, F: FnMut(T, &mut [T])>(
    mut f: F,
    a: T,
    b: T,
    ncomp: usize,
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<T>> {
    let mut g = |u: [T; 2], out: &mut [T]| f(u[0], out);
    adaptive_box(&mut g, [a, T::zero()], [b, T::one()], 1, ncomp, opts)
}

/// Adaptive integral of `f` over the box `[lo, hi]`.
pub fn adaptive_integrate_2d<T: Real, F: FnMut([T; 2], &mut [T])>(
    mut f: F,
    lo: [T; 2],
    hi: [T; 2],
    ncomp: usize,
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<T>> {
    adaptive_box(&mut f, lo, hi, 2, ncomp, opts)
}

/// Scalar convenience wrapper around [`adaptive_integrate_1d`].
pub fn adaptive_scalar_1d<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, opts: &AdaptiveOptions<T>) -> Result<T> {
    adaptive_integrate_1d(|u, out: &mut [T]| out[0] = f(u), a, b, 1, opts).map(|v| v[0])
}

/// Integral over `[a, b]` of an integrand with a logarithmic singularity at
/// `u0 ∈ [a, b]`. Each side of `u0` is mapped by `u = u0 ± L t³`, which
/// clusters nodes at the singularity, and then integrated adaptively.
pub fn log_singular_integrate_1d<T: Real, F: FnMut(T, &mut [T])>(
    mut f: F,
    a: T,
    b: T,
    u0: T,
    ncomp: usize,
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<T>> {
    if !(u0 >= a && u0 <= b) {
        return Err(Error::Domain {
            value: u0.as_f64(),
            lo: a.as_f64(),
            hi: b.as_f64(),
        });
    }
    let mut total = vec![T::zero(); ncomp];
    let three = T::of(3.0);
    for (len, sign) in [(b - u0, T::one()), (u0 - a, -T::one())] {
        if len <= T::zero() {
            continue;
        }
        let part = adaptive_integrate_1d(
            |t, out: &mut [T]| {
                let u = u0 + sign * len * t * t * t;
                f(u, out);
                let jac = three * len * t * t;
                out.iter_mut().for_each(|v| *v = *v * jac);
            },
            T::zero(),
            T::one(),
            ncomp,
            opts,
        )?;
        for (s, v) in total.iter_mut().zip(part) {
            *s = *s + v;
        }
    }
    Ok(total)
}

/// Integral over `[a, b]` of an integrand that is smooth on either side of
/// `u0` but not across it (e.g. bounded direction dependent kernels).
pub fn split_integrate_1d<T: Real, F: FnMut(T, &mut [T])>(
    mut f: F,
    a: T,
    b: T,
    u0: T,
    ncomp: usize,
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<T>> {
    if !(u0 >= a && u0 <= b) {
        return Err(Error::Domain {
            value: u0.as_f64(),
            lo: a.as_f64(),
            hi: b.as_f64(),
        });
    }
    let mut total = vec![T::zero(); ncomp];
    for (lo, hi) in [(a, u0), (u0, b)] {
        if hi > lo {
            let part = adaptive_integrate_1d(&mut f, lo, hi, ncomp, opts)?;
            for (s, v) in total.iter_mut().zip(part) {
                *s = *s + v;
            }
        }
    }
    Ok(total)
}

/// Integral over the box `[lo, hi]` of an integrand with a `1/r`
/// singularity at `p` (inside or on the box). The box is fanned into
/// triangles with apex `p`; each triangle is pulled back to the unit square
/// by the Duffy map, whose Jacobian cancels the singularity.
pub fn duffy_integrate<T: Real, F: FnMut([T; 2], &mut [T])>(
    mut f: F,
    lo: [T; 2],
    hi: [T; 2],
    p: [T; 2],
    ncomp: usize,
    opts: &AdaptiveOptions<T>,
) -> Result<Vec<T>> {
    if !(0..2).all(|k| p[k] >= lo[k] && p[k] <= hi[k]) {
        return Err(Error::InvalidParameter("singular point outside the box".into()));
    }
    let corners = [lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
    let mut total = vec![T::zero(); ncomp];
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let pa = [a[0] - p[0], a[1] - p[1]];
        let ab = [b[0] - a[0], b[1] - a[1]];
        let det = (pa[0] * ab[1] - pa[1] * ab[0]).abs();
        if det <= T::zero() {
            continue;
        }
        let part = adaptive_integrate_2d(
            |st: [T; 2], out: &mut [T]| {
                let (s, t) = (st[0], st[1]);
                let u = [p[0] + s * (pa[0] + t * ab[0]), p[1] + s * (pa[1] + t * ab[1])];
                f(u, out);
                let jac = s * det;
                out.iter_mut().for_each(|v| *v = *v * jac);
            },
            [T::zero(), T::zero()],
            [T::one(), T::one()],
            ncomp,
            opts,
        )?;
        for (s, v) in total.iter_mut().zip(part) {
            *s = *s + v;
        }
    }
    Ok(total)
}
