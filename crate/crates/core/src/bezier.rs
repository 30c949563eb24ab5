//! Bernstein polynomials on the reference interval `[−1, 1]`, i.e. the
//! B-splines of the open knot vector `{−1,…,−1, 1,…,1}`.

use crate::scalar::Real;

/// All `degree + 1` Bernstein polynomials at `xi`.
pub fn bernstein_all<T: Real>(degree: usize, xi: T) -> Vec<T> {
    let s = (xi + T::one()) * T::half();
    let t = T::one() - s;
    // de Casteljau style triangle, stable for all degrees
    let mut b = vec![T::zero(); degree + 1];
    b[0] = T::one();
    for d in 1..=degree {
        let mut carry = T::zero();
        for bk in b.iter_mut().take(d) {
            let v = *bk;
            *bk = carry + t * v;
            carry = s * v;
        }
        b[d] = carry;
    }
    b
}

/// Tensor-product Bernstein values for `pdim` directions, first direction
/// running fastest.
pub fn bernstein_tensor<T: Real>(degree: usize, xi: [T; 2], pdim: usize) -> Vec<T> {
    let a = bernstein_all(degree, xi[0]);
    if pdim == 1 {
        return a;
    }
    let b = bernstein_all(degree, xi[1]);
    let mut out = Vec::with_capacity(a.len() * b.len());
    for bj in &b {
        for ai in &a {
            out.push(*ai * *bj);
        }
    }
    out
}

/// Allocation-free [`bernstein_tensor`] for degrees up to the spline limit.
pub(crate) fn bernstein_fixed<T: Real>(degree: usize, xi: [T; 2], pdim: usize) -> [T; FIXED * FIXED] {
    let one = |x: T| {
        let s = (x + T::one()) * T::half();
        let t = T::one() - s;
        let mut b = [T::zero(); FIXED];
        b[0] = T::one();
        for d in 1..=degree {
            let mut carry = T::zero();
            for bk in b.iter_mut().take(d) {
                let v = *bk;
                *bk = carry + t * v;
                carry = s * v;
            }
            b[d] = carry;
        }
        b
    };
    let a = one(xi[0]);
    let mut out = [T::zero(); FIXED * FIXED];
    if pdim == 1 {
        out[..FIXED].copy_from_slice(&a);
        return out;
    }
    let b = one(xi[1]);
    let m = degree + 1;
    for j in 0..m {
        for i in 0..m {
            out[j * m + i] = a[i] * b[j];
        }
    }
    out
}

const FIXED: usize = crate::spline::MAX_DEGREE + 2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::KnotVector;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matches_bezier_knot_vector() {
        for degree in 0..7 {
            let kv = KnotVector::<f64>::bezier(degree, -1.0, 1.0).unwrap();
            for &xi in &[-1.0, -0.73, 0.0, 0.41, 1.0] {
                let b = bernstein_all(degree, xi);
                let r = kv.eval_all(xi).unwrap();
                for (x, y) in b.iter().zip(&r) {
                    assert_abs_diff_eq!(*x, *y, epsilon = 1e-14);
                }
                assert_abs_diff_eq!(b.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn tensor_ordering() {
        let v = bernstein_tensor(1, [-1.0, 1.0], 2);
        assert_eq!(v, vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn fixed_matches_allocating() {
        for degree in 0..=crate::spline::MAX_DEGREE + 1 {
            for pdim in 1..=2 {
                let xi = [0.37, -0.52];
                let v = bernstein_tensor(degree, xi, pdim);
                let f = bernstein_fixed(degree, xi, pdim);
                assert_eq!(&f[..v.len()], &v[..]);
            }
        }
    }
}
