//! Knot vectors and B-spline basis evaluation.
//!
//! Basis functions follow the Cox–de Boor recursion with half-open knot
//! spans and the `0/0 = 0` convention. A parameter equal to the upper end
//! of the valid domain is evaluated on the last nonzero span.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Highest polynomial degree accepted by [`KnotVector::new`].
pub const MAX_DEGREE: usize = 10;

/// Non-decreasing knot sequence together with the polynomial degree.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector<T> {
    knots: Vec<T>,
    degree: usize,
}

/// Nonzero basis functions `N_{span-p..=span}` at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpan<T> {
    pub span: usize,
    pub values: Vec<T>,
    pub derivatives: Option<Vec<T>>,
}

impl<T: Real> BasisSpan<T> {
    /// Global index of the first nonzero basis function.
    pub fn first_index(&self) -> usize {
        self.span + 1 - self.values.len()
    }
}

impl<T: Real> KnotVector<T> {
    pub fn new(knots: Vec<T>, degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::InvalidKnots(format!(
                "degree {degree} exceeds maximum {MAX_DEGREE}"
            )));
        }
        if knots.len() < degree + 2 {
            return Err(Error::InvalidKnots(format!(
                "{} knots cannot carry a degree-{degree} basis function",
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidKnots("non-finite knot".into()));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidKnots(format!(
                "knots decrease at index {}: {} > {}",
                i + 1,
                knots[i],
                knots[i + 1]
            )));
        }
        let kv = Self { knots, degree };
        if let Some((value, mult)) = kv.multiplicities().into_iter().find(|&(_, m)| m > degree + 1) {
            return Err(Error::InvalidKnots(format!(
                "knot {value} has multiplicity {mult} > degree + 1"
            )));
        }
        if kv.knots[0] == kv.knots[kv.knots.len() - 1] {
            return Err(Error::InvalidKnots("knot vector has zero length".into()));
        }
        Ok(kv)
    }

    /// Knot vector `{a,..,a, b,..,b}` with multiplicity `degree + 1`:
    /// its basis functions are the Bernstein polynomials on `[a, b]`.
    pub fn bezier(degree: usize, a: T, b: T) -> Result<Self> {
        let mut knots = vec![a; degree + 1];
        knots.extend(std::iter::repeat_n(b, degree + 1));
        Self::new(knots, degree)
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Number of basis functions (and control points) this knot vector defines.
    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// First and last knot each repeated `degree + 1` times.
    pub fn is_open(&self) -> bool {
        let p = self.degree;
        let n = self.knots.len();
        n >= 2 * (p + 1)
            && self.knots[..=p].iter().all(|&k| k == self.knots[0])
            && self.knots[n - p - 1..].iter().all(|&k| k == self.knots[n - 1])
    }

    /// Parameter interval on which the basis forms a partition of unity,
    /// `[u_p, u_{m-p-1}]`; for open knot vectors this is `[first, last]`.
    pub fn domain(&self) -> (T, T) {
        let p = self.degree;
        let n = self.knots.len();
        (self.knots[p], self.knots[n - p - 1])
    }

    /// Distinct knot values with their multiplicities.
    pub fn multiplicities(&self) -> Vec<(T, usize)> {
        let mut out: Vec<(T, usize)> = Vec::new();
        for &k in &self.knots {
            match out.last_mut() {
                Some((v, m)) if *v == k => *m += 1,
                _ => out.push((k, 1)),
            }
        }
        out
    }

    pub fn multiplicity(&self, u: T) -> usize {
        self.knots.iter().filter(|&&k| k == u).count()
    }

    /// Distinct knot values inside the valid domain (including its ends).
    pub fn breakpoints(&self) -> Vec<T> {
        let (lo, hi) = self.domain();
        self.multiplicities()
            .into_iter()
            .map(|(v, _)| v)
            .filter(|&v| v >= lo && v <= hi)
            .collect()
    }

    /// Nonzero knot spans `[u_j, u_{j+1}]` inside the valid domain.
    pub fn nonzero_spans(&self) -> Vec<(T, T)> {
        self.breakpoints().windows(2).map(|w| (w[0], w[1])).collect()
    }

    fn check_domain(&self, u: T) -> Result<()> {
        let (lo, hi) = self.domain();
        if !(lo < hi) {
            return Err(Error::InvalidKnots(
                "knot vector has no valid evaluation domain".into(),
            ));
        }
        if !(u >= lo && u <= hi) {
            return Err(Error::Domain {
                value: u.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(())
    }

    /// Index `i` with `u_i <= u < u_{i+1}`; the upper domain end maps to the
    /// last nonzero span.
    pub fn find_span(&self, u: T) -> Result<usize> {
        self.check_domain(u)?;
        let p = self.degree;
        let n = self.num_basis();
        if u >= self.knots[n] {
            // last nonzero span at or below u_n
            let mut i = n - 1;
            while i > p && self.knots[i] == self.knots[i + 1] {
                i -= 1;
            }
            return Ok(i);
        }
        // knots[p] <= u < knots[n]
        let (mut low, mut high) = (p, n);
        while high - low > 1 {
            let mid = (low + high) / 2;
            if u < self.knots[mid] {
                high = mid;
            } else {
                low = mid;
            }
        }
        Ok(low)
    }

    /// Triangular table of all nonzero basis values of degrees `0..=p` at `u`
    /// on `span`: `table[d][r]` is `N_{span-d+r, d}(u)`.
    fn basis_table(&self, span: usize, u: T) -> Vec<Vec<T>> {
        let p = self.degree;
        let k = &self.knots;
        let mut table = Vec::with_capacity(p + 1);
        table.push(vec![T::one()]);
        let mut left = vec![T::zero(); p + 1];
        let mut right = vec![T::zero(); p + 1];
        for d in 1..=p {
            left[d] = u - k[span + 1 - d];
            right[d] = k[span + d] - u;
            let prev = &table[d - 1];
            let mut next = vec![T::zero(); d + 1];
            let mut saved = T::zero();
            for r in 0..d {
                let denom = right[r + 1] + left[d - r];
                let temp = if denom == T::zero() {
                    T::zero()
                } else {
                    prev[r] / denom
                };
                next[r] = saved + right[r + 1] * temp;
                saved = left[d - r] * temp;
            }
            next[d] = saved;
            table.push(next);
        }
        table
    }

    /// Allocation-free values and first derivatives on the span of `u`,
    /// used by the hot evaluation paths. Entries past `p` are zero.
    pub(crate) fn basis_fixed(&self, u: T) -> Result<(usize, [T; MAX_DEGREE + 1], [T; MAX_DEGREE + 1])> {
        let span = self.find_span(u)?;
        let p = self.degree;
        let k = &self.knots;
        let mut n = [T::zero(); MAX_DEGREE + 1];
        let mut lower = [T::zero(); MAX_DEGREE + 1];
        let mut left = [T::zero(); MAX_DEGREE + 1];
        let mut right = [T::zero(); MAX_DEGREE + 1];
        n[0] = T::one();
        for d in 1..=p {
            if d == p {
                lower = n;
            }
            left[d] = u - k[span + 1 - d];
            right[d] = k[span + d] - u;
            let mut saved = T::zero();
            for r in 0..d {
                let denom = right[r + 1] + left[d - r];
                let temp = if denom == T::zero() { T::zero() } else { n[r] / denom };
                n[r] = saved + right[r + 1] * temp;
                saved = left[d - r] * temp;
            }
            n[d] = saved;
        }
        let mut dn = [T::zero(); MAX_DEGREE + 1];
        if p > 0 {
            let pf = T::of_usize(p);
            for (r, d) in dn.iter_mut().enumerate().take(p + 1) {
                let j = span - p + r;
                let mut acc = T::zero();
                if r >= 1 {
                    let denom = k[j + p] - k[j];
                    if denom != T::zero() {
                        acc = acc + pf * lower[r - 1] / denom;
                    }
                }
                if r < p {
                    let denom = k[j + p + 1] - k[j + 1];
                    if denom != T::zero() {
                        acc = acc - pf * lower[r] / denom;
                    }
                }
                *d = acc;
            }
        }
        Ok((span, n, dn))
    }

    /// Values of the `p + 1` nonzero basis functions at `u`.
    pub fn eval_basis(&self, u: T) -> Result<BasisSpan<T>> {
        let span = self.find_span(u)?;
        let mut table = self.basis_table(span, u);
        Ok(BasisSpan {
            span,
            values: table.pop().unwrap_or_default(),
            derivatives: None,
        })
    }

    /// Values and first derivatives of the `p + 1` nonzero basis functions.
    pub fn eval_basis_derivatives(&self, u: T) -> Result<BasisSpan<T>> {
        let span = self.find_span(u)?;
        let p = self.degree;
        let table = self.basis_table(span, u);
        let values = table[p].clone();
        let mut derivatives = vec![T::zero(); p + 1];
        if p > 0 {
            let lower = &table[p - 1];
            let pf = T::of_usize(p);
            let k = &self.knots;
            // N'_{j,p} = p/(u_{j+p}-u_j) N_{j,p-1} - p/(u_{j+p+1}-u_{j+1}) N_{j+1,p-1}
            for (r, d) in derivatives.iter_mut().enumerate() {
                let j = span - p + r;
                let mut acc = T::zero();
                if r >= 1 {
                    let denom = k[j + p] - k[j];
                    if denom != T::zero() {
                        acc = acc + pf * lower[r - 1] / denom;
                    }
                }
                if r < p {
                    let denom = k[j + p + 1] - k[j + 1];
                    if denom != T::zero() {
                        acc = acc - pf * lower[r] / denom;
                    }
                }
                *d = acc;
            }
        }
        Ok(BasisSpan {
            span,
            values,
            derivatives: Some(derivatives),
        })
    }

    /// Single basis function `N_{i,p}(u)` by direct recursion.
    ///
    /// Works for any knot vector, including ones without a partition-of-unity
    /// domain such as `{1,2,3,4}`. The right end of the support is included
    /// when it is the last knot.
    pub fn basis_function(&self, i: usize, u: T) -> T {
        self.recursive(i, self.degree, u)
    }

    /// First derivative of `N_{i,p}` at `u`.
    pub fn basis_function_derivative(&self, i: usize, u: T) -> T {
        let p = self.degree;
        if p == 0 {
            return T::zero();
        }
        let k = &self.knots;
        let pf = T::of_usize(p);
        let mut acc = T::zero();
        let d1 = k[i + p] - k[i];
        if d1 != T::zero() {
            acc = acc + pf / d1 * self.recursive(i, p - 1, u);
        }
        let d2 = k[i + p + 1] - k[i + 1];
        if d2 != T::zero() {
            acc = acc - pf / d2 * self.recursive(i + 1, p - 1, u);
        }
        acc
    }

    fn recursive(&self, i: usize, p: usize, u: T) -> T {
        let k = &self.knots;
        if p == 0 {
            let last = k[k.len() - 1];
            let inside = (k[i] <= u && u < k[i + 1])
                || (u == last && k[i + 1] == last && k[i] < k[i + 1]);
            return if inside { T::one() } else { T::zero() };
        }
        let mut acc = T::zero();
        let d1 = k[i + p] - k[i];
        if d1 != T::zero() {
            acc = acc + (u - k[i]) / d1 * self.recursive(i, p - 1, u);
        }
        let d2 = k[i + p + 1] - k[i + 1];
        if d2 != T::zero() {
            acc = acc + (k[i + p + 1] - u) / d2 * self.recursive(i + 1, p - 1, u);
        }
        acc
    }

    /// Values of all `num_basis()` functions at `u` (zeros outside the span).
    pub fn eval_all(&self, u: T) -> Result<Vec<T>> {
        let b = self.eval_basis(u)?;
        let mut out = vec![T::zero(); self.num_basis()];
        let first = b.first_index();
        out[first..first + b.values.len()].copy_from_slice(&b.values);
        Ok(out)
    }

    /// Values and derivatives of all basis functions at `u`.
    pub fn eval_all_derivatives(&self, u: T) -> Result<(Vec<T>, Vec<T>)> {
        let b = self.eval_basis_derivatives(u)?;
        let n = self.num_basis();
        let (mut v, mut d) = (vec![T::zero(); n], vec![T::zero(); n]);
        let first = b.first_index();
        let len = b.values.len();
        v[first..first + len].copy_from_slice(&b.values);
        if let Some(ders) = &b.derivatives {
            d[first..first + len].copy_from_slice(ders);
        }
        Ok((v, d))
    }
}
