//! Small dense linear algebra: row-major matrices, LU with partial
//! pivoting, a 1-norm condition estimate and Householder least squares.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum())
            .collect())
    }

    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn norm_one(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factors `PA = LU` stored in place.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
    norm_one: T,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", a.rows, a.cols)));
        }
        let n = a.rows;
        let norm_one = a.norm_one();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tiny = T::epsilon() * norm_one.max(T::min_positive_value());
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |m, v| if v.1 > m.1 { v } else { m });
            if !(pmax > tiny) {
                return Err(Error::SingularMatrix(k));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    lu.data.swap(p * n + j, k * n + j);
                }
            }
            let pivot = lu[(k, k)];
            let (upper, lower) = lu.data.split_at_mut((k + 1) * n);
            let krow = &upper[k * n..(k + 1) * n];
            for row in lower.chunks_mut(n) {
                let f = row[k] / pivot;
                row[k] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        row[j] = row[j] - f * krow[j];
                    }
                }
            }
        }
        Ok(Self { lu, perm, norm_one })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension(format!("rhs of length {} for order {n}", b.len())));
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: T = (0..i).map(|j| row[j] * x[j]).sum();
            x[i] = x[i] - s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: T = (i + 1..n).map(|j| row[j] * x[j]).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension(format!("rhs of length {} for order {n}", b.len())));
        }
        // Uᵀ z = b, Lᵀ w = z, x = Pᵀ w
        let mut z = b.to_vec();
        for i in 0..n {
            let s: T = (0..i).map(|j| self.lu[(j, i)] * z[j]).sum();
            z[i] = (z[i] - s) / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let s: T = (i + 1..n).map(|j| self.lu[(j, i)] * z[j]).sum();
            z[i] = z[i] - s;
        }
        let mut x = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        Ok(x)
    }

    /// Hager–Higham estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> T {
        let n = self.dim();
        if n == 0 {
            return T::one();
        }
        let mut x = vec![T::one() / T::of_usize(n); n];
        let mut est = T::zero();
        for _ in 0..5 {
            let y = match self.solve(&x) {
                Ok(y) => y,
                Err(_) => return T::infinity(),
            };
            let ny: T = y.iter().map(|v| v.abs()).sum();
            let xi: Vec<T> = y
                .iter()
                .map(|v| if *v >= T::zero() { T::one() } else { -T::one() })
                .collect();
            let z = match self.solve_transpose(&xi) {
                Ok(z) => z,
                Err(_) => return T::infinity(),
            };
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.abs()))
                .fold((0, -T::one()), |m, v| if v.1 > m.1 { v } else { m });
            let zx: T = z.iter().zip(&x).map(|(a, b)| *a * *b).sum();
            if ny <= est || zmax <= zx {
                est = est.max(ny);
                break;
            }
            est = ny;
            x = vec![T::zero(); n];
            x[j] = T::one();
        }
        est * self.norm_one
    }
}

/// Solution of a square system by LU with partial pivoting. Systems whose
/// estimated condition exceeds `1e12` are solved but logged as a warning.
pub fn solve_dense<T: Real>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    if a.rows > a.cols {
        return least_squares(a, b);
    }
    let lu = Lu::factor(a)?;
    let cond = lu.condition_estimate();
    if cond > T::of(1e12) {
        log::warn!("ill-conditioned system: condition estimate {:.3e}", cond.as_f64());
    }
    lu.solve(b)
}

/// Householder QR of a tall matrix (`rows >= cols`).
struct Qr<T> {
    qr: DenseMatrix<T>,
    tau: Vec<T>,
    rdiag: Vec<T>,
}

impl<T: Real> Qr<T> {
    fn factor(a: &DenseMatrix<T>) -> Self {
        let (m, n) = (a.rows, a.cols);
        let mut qr = a.clone();
        let mut tau = vec![T::zero(); n];
        let mut rdiag = vec![T::zero(); n];
        for k in 0..n.min(m) {
            let norm = (k..m).map(|i| qr[(i, k)] * qr[(i, k)]).sum::<T>().sqrt();
            if norm == T::zero() {
                continue;
            }
            let alpha = if qr[(k, k)] > T::zero() { -norm } else { norm };
            // v = x - alpha e1, stored in column k
            qr[(k, k)] = qr[(k, k)] - alpha;
            let vnorm2: T = (k..m).map(|i| qr[(i, k)] * qr[(i, k)]).sum();
            tau[k] = T::two() / vnorm2;
            rdiag[k] = alpha;
            for j in k + 1..n {
                let s: T = (k..m).map(|i| qr[(i, k)] * qr[(i, j)]).sum();
                let f = tau[k] * s;
                for i in k..m {
                    let v = qr[(i, k)];
                    qr[(i, j)] = qr[(i, j)] - f * v;
                }
            }
        }
        Self { qr, tau, rdiag }
    }

    fn apply_qt(&self, b: &mut [T]) {
        let (m, n) = (self.qr.rows, self.qr.cols);
        for k in 0..n.min(m) {
            if self.tau[k] == T::zero() {
                continue;
            }
            let s: T = (k..m).map(|i| self.qr[(i, k)] * b[i]).sum();
            let f = self.tau[k] * s;
            for (i, bi) in b.iter_mut().enumerate().take(m).skip(k) {
                *bi = *bi - f * self.qr[(i, k)];
            }
        }
    }

    fn apply_q(&self, b: &mut [T]) {
        let (m, n) = (self.qr.rows, self.qr.cols);
        for k in (0..n.min(m)).rev() {
            if self.tau[k] == T::zero() {
                continue;
            }
            let s: T = (k..m).map(|i| self.qr[(i, k)] * b[i]).sum();
            let f = self.tau[k] * s;
            for (i, bi) in b.iter_mut().enumerate().take(m).skip(k) {
                *bi = *bi - f * self.qr[(i, k)];
            }
        }
    }

    fn rank_ok(&self) -> Result<()> {
        let big = self.rdiag.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tol = big * T::epsilon() * T::of_usize(self.qr.rows.max(1)) * T::of(10.0);
        if let Some(k) = self.rdiag.iter().position(|v| !(v.abs() > tol)) {
            return Err(Error::SingularMatrix(k));
        }
        Ok(())
    }

    fn upper(&self, i: usize, j: usize) -> T {
        if i == j {
            self.rdiag[i]
        } else {
            self.qr[(i, j)]
        }
    }
}

/// Least-squares solution of an overdetermined system, or the minimum norm
/// solution of an underdetermined one (via QR of the transpose).
pub fn least_squares<T: Real>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    if b.len() != a.rows {
        return Err(Error::Dimension(format!("rhs of length {} for {} rows", b.len(), a.rows)));
    }
    let n = a.cols;
    if a.rows >= a.cols {
        let qr = Qr::factor(a);
        qr.rank_ok()?;
        let mut y = b.to_vec();
        qr.apply_qt(&mut y);
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let s: T = (i + 1..n).map(|j| qr.upper(i, j) * x[j]).sum();
            x[i] = (y[i] - s) / qr.rdiag[i];
        }
        Ok(x)
    } else {
        // Aᵀ = Q R, A x = b with x = Q z, Rᵀ z = b
        let at = a.transpose();
        let qr = Qr::factor(&at);
        qr.rank_ok()?;
        let m = a.rows;
        let mut z = vec![T::zero(); n];
        for i in 0..m {
            let s: T = (0..i).map(|j| qr.upper(j, i) * z[j]).sum();
            z[i] = (b[i] - s) / qr.rdiag[i];
        }
        qr.apply_q(&mut z);
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual(a: &DenseMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
        let ax = a.mul_vec(x).unwrap();
        let r = ax.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        r / b.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn small_systems() {
        let i = DenseMatrix::<f64>::identity(3);
        assert_eq!(solve_dense(&i, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(solve_dense(&a, &[2.0, 8.0]).unwrap(), vec![1.0, 2.0]);
        let s = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(solve_dense(&s, &[1.0, 1.0]), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn random_system_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 50;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = rng.gen_range(-1.0..1.0);
            }
            a[(i, i)] += 10.0;
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_dense(&a, &b).unwrap();
        assert!(residual(&a, &x, &b) <= 1e-10);
        let lu = Lu::factor(&a).unwrap();
        let xt = lu.solve_transpose(&b).unwrap();
        assert!(residual(&a.transpose(), &xt, &b) <= 1e-10);
        let cond = lu.condition_estimate();
        assert!(cond > 1.0 && cond < 100.0);
    }

    #[test]
    fn condition_of_diagonal() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1e-6]]).unwrap();
        let c = Lu::factor(&a).unwrap().condition_estimate();
        assert_abs_diff_eq!(c, 1e6, epsilon = 1e-3);
    }

    #[test]
    fn least_squares_paths() {
        // line fit through exact data
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let x = least_squares(&a, &[1.0, 3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 2.0, epsilon = 1e-14);
        // minimum norm: x + y = 2 gives (1, 1)
        let u = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let m = least_squares(&u, &[2.0]).unwrap();
        assert_abs_diff_eq!(m[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[1], 1.0, epsilon = 1e-14);
        let d = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(least_squares(&d, &[1.0, 1.0, 0.0]).is_err());
    }
}
