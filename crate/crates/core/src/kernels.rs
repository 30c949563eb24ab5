//! Fundamental solutions of the Laplace and Lamé–Navier equations.
//!
//! Double layer kernels use the outward normal at the source point `y` and
//! the sign for which a constant density gives `∫ K = 1` (identity for
//! elasticity) at interior points.

use crate::error::{Error, Result};
use crate::scalar::{self, Real, Vec3};

/// Distances below this are treated as coincident points.
pub const R_MIN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlaneModel {
    #[default]
    Strain,
    Stress,
}

/// Material data; `conductivity` only enters Laplace problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material<T> {
    pub youngs: T,
    pub poisson: T,
    pub conductivity: T,
    pub plane: PlaneModel,
}

impl<T: Real> Material<T> {
    pub fn elastic(youngs: T, poisson: T, plane: PlaneModel) -> Result<Self> {
        material_constants(youngs, poisson)?;
        Ok(Self {
            youngs,
            poisson,
            conductivity: T::one(),
            plane,
        })
    }

    pub fn conductive(conductivity: T) -> Result<Self> {
        if !(conductivity > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "conductivity {conductivity} must be positive"
            )));
        }
        Ok(Self {
            youngs: T::one(),
            poisson: T::zero(),
            conductivity,
            plane: PlaneModel::Strain,
        })
    }

    /// `(λ, μ)` of the given constants.
    pub fn lame(&self) -> Result<(T, T)> {
        material_constants(self.youngs, self.poisson)
    }

    /// Poisson ratio entering the plane strain kernels; plane stress
    /// substitutes `ν / (1 + ν)`.
    pub fn kernel_poisson(&self) -> T {
        match self.plane {
            PlaneModel::Strain => self.poisson,
            PlaneModel::Stress => self.poisson / (T::one() + self.poisson),
        }
    }

    pub fn shear_modulus(&self) -> T {
        self.youngs / (T::two() * (T::one() + self.poisson))
    }
}

/// Lamé constants `λ = Eν/((1−2ν)(1+ν))`, `μ = E/(2(1+ν))`.
pub fn material_constants<T: Real>(youngs: T, poisson: T) -> Result<(T, T)> {
    if poisson == T::half() {
        return Err(Error::IncompressibleMaterial);
    }
    if !(youngs > T::zero()) || !(poisson > -T::one() && poisson < T::half()) {
        return Err(Error::InvalidParameter(format!(
            "invalid elastic constants E={youngs}, nu={poisson}"
        )));
    }
    let one = T::one();
    let lambda = youngs * poisson / ((one - T::two() * poisson) * (one + poisson));
    let mu = youngs / (T::two() * (one + poisson));
    Ok((lambda, mu))
}

fn separation<T: Real>(x: &Vec3<T>, y: &Vec3<T>) -> Result<(Vec3<T>, T)> {
    let d = scalar::sub(y, x);
    let r = scalar::norm(&d);
    if !(r > T::of(R_MIN)) {
        return Err(Error::SingularEvaluation(r.as_f64()));
    }
    Ok((d, r))
}

/// Laplace single layer kernel: `−ln r / (2πk)` in 2D, `1 / (4πkr)` in 3D.
pub fn laplace_slp<T: Real>(x: &Vec3<T>, y: &Vec3<T>, dim: usize, k: T) -> Result<T> {
    let (_, r) = separation(x, y)?;
    Ok(if dim == 2 {
        -r.ln() / (T::TAU() * k)
    } else {
        T::one() / (T::two() * T::TAU() * k * r)
    })
}

/// Laplace double layer kernel: `(y−x)·n / (2πr²)` in 2D,
/// `(y−x)·n / (4πr³)` in 3D.
pub fn laplace_dlp<T: Real>(x: &Vec3<T>, y: &Vec3<T>, n_y: &Vec3<T>, dim: usize) -> Result<T> {
    let (d, r) = separation(x, y)?;
    let dn = scalar::dot(&d, n_y);
    Ok(if dim == 2 {
        dn / (T::TAU() * r * r)
    } else {
        dn / (T::two() * T::TAU() * r * r * r)
    })
}

/// Kelvin displacement tensor in plane strain.
pub fn kelvin_slp_2d<T: Real>(x: &Vec3<T>, y: &Vec3<T>, material: &Material<T>) -> Result<[[T; 2]; 2]> {
    let (d, r) = separation(x, y)?;
    let nu = material.kernel_poisson();
    let mu = material.shear_modulus();
    let one = T::one();
    let c = one / (T::of(4.0) * T::TAU() * mu * (one - nu));
    let c1 = T::of(3.0) - T::of(4.0) * nu;
    let g = [d[0] / r, d[1] / r];
    let log = -r.ln();
    let mut u = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { c1 * log } else { T::zero() };
            u[i][j] = c * (delta + g[i] * g[j]);
        }
    }
    Ok(u)
}

/// Double layer kernel of plane elasticity: the negative traction tensor
/// `−T_ij` with `T` the traction at `y` (normal `n_y`) of the displacement
/// field caused by a unit load at `x` in direction `i`.
pub fn kelvin_dlp_2d<T: Real>(
    x: &Vec3<T>,
    y: &Vec3<T>,
    n_y: &Vec3<T>,
    material: &Material<T>,
) -> Result<[[T; 2]; 2]> {
    let (d, r) = separation(x, y)?;
    let nu = material.kernel_poisson();
    let one = T::one();
    let c = one / (T::TAU() * T::two() * (one - nu) * r);
    let a = one - T::two() * nu;
    let g = [d[0] / r, d[1] / r];
    let n = [n_y[0], n_y[1]];
    let drdn = g[0] * n[0] + g[1] * n[1];
    let mut k = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { a } else { T::zero() };
            k[i][j] = c * (drdn * (delta + T::two() * g[i] * g[j]) - a * (g[i] * n[j] - g[j] * n[i]));
        }
    }
    Ok(k)
}

/// Strength of the kernel singularity at `x = y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Singularity {
    /// Bounded and smooth (test surrogates).
    Smooth,
    /// `ln r`.
    Logarithmic,
    /// `1/r` on a surface.
    Weak,
    /// Bounded but direction dependent at `x = y` on smooth curves (2D
    /// Laplace double layer).
    BoundedDirectional,
    /// `1/r` on a curve; only a Cauchy principal value exists.
    Strong,
}

/// Kernel interface used by assembly and interior evaluation.
pub trait Kernel<T: Real>: Sync {
    /// Components per point: 1 (scalar) or 2 (plane elasticity).
    fn components(&self) -> usize;
    /// Writes the `c × c` kernel block (row = field component at `x`) into `out`.
    fn eval(&self, x: &Vec3<T>, y: &Vec3<T>, n_y: &Vec3<T>, out: &mut [T]) -> Result<()>;
    fn singularity(&self) -> Singularity;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Laplace2d,
    Laplace3d,
    Lame2d,
}

impl Problem {
    pub fn dim(self) -> usize {
        match self {
            Problem::Laplace3d => 3,
            _ => 2,
        }
    }

    pub fn components(self) -> usize {
        match self {
            Problem::Lame2d => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Single,
    Double,
}

/// One of the physical kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fundamental<T> {
    pub problem: Problem,
    pub layer: Layer,
    pub material: Material<T>,
}

impl<T: Real> Fundamental<T> {
    pub fn new(problem: Problem, layer: Layer, material: Material<T>) -> Self {
        Self {
            problem,
            layer,
            material,
        }
    }
}

impl<T: Real> Kernel<T> for Fundamental<T> {
    fn components(&self) -> usize {
        self.problem.components()
    }

    fn eval(&self, x: &Vec3<T>, y: &Vec3<T>, n_y: &Vec3<T>, out: &mut [T]) -> Result<()> {
        let dim = self.problem.dim();
        match (self.problem, self.layer) {
            (Problem::Lame2d, layer) => {
                let m = match layer {
                    Layer::Single => kelvin_slp_2d(x, y, &self.material)?,
                    Layer::Double => kelvin_dlp_2d(x, y, n_y, &self.material)?,
                };
                out[0] = m[0][0];
                out[1] = m[0][1];
                out[2] = m[1][0];
                out[3] = m[1][1];
            }
            (_, Layer::Single) => out[0] = laplace_slp(x, y, dim, self.material.conductivity)?,
            (_, Layer::Double) => out[0] = laplace_dlp(x, y, n_y, dim)?,
        }
        Ok(())
    }

    fn singularity(&self) -> Singularity {
        match (self.problem, self.layer) {
            (Problem::Laplace2d, Layer::Single) | (Problem::Lame2d, Layer::Single) => Singularity::Logarithmic,
            (Problem::Laplace2d, Layer::Double) => Singularity::BoundedDirectional,
            (Problem::Lame2d, Layer::Double) => Singularity::Strong,
            (Problem::Laplace3d, _) => Singularity::Weak,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn lame_constants() {
        let (l, m) = material_constants(1e9, 0.3).unwrap();
        assert_abs_diff_eq!(m / 1e9, 0.384615, epsilon = 1e-6);
        assert_abs_diff_eq!(l / 1e9, 0.576923, epsilon = 1e-6);
        let (l0, m0) = material_constants(2.0, 0.0).unwrap();
        assert_eq!((l0, m0), (0.0, 1.0));
        let (l2, m2) = material_constants(2e9, 0.3).unwrap();
        assert_abs_diff_eq!(l2, 2.0 * l, epsilon = 1e-3);
        assert_abs_diff_eq!(m2, 2.0 * m, epsilon = 1e-3);
        assert!(matches!(material_constants(1.0, 0.5), Err(Error::IncompressibleMaterial)));
        assert!(material_constants(-1.0, 0.2).is_err());
    }

    #[test]
    fn laplace_values() {
        let o = [0.0, 0.0, 0.0];
        let e = [1.0, 0.0, 0.0];
        assert_abs_diff_eq!(laplace_slp(&o, &e, 3, 1.0).unwrap(), 1.0 / (4.0 * PI), epsilon = 1e-16);
        assert_eq!(laplace_slp(&o, &e, 2, 1.0).unwrap(), 0.0);
        let y = [0.3, -1.2, 0.0];
        assert_eq!(
            laplace_slp(&o, &y, 2, 2.0).unwrap(),
            laplace_slp(&y, &o, 2, 2.0).unwrap()
        );
        assert_eq!(laplace_dlp(&o, &e, &[0.0, 1.0, 0.0], 2).unwrap(), 0.0);
        assert_abs_diff_eq!(laplace_dlp(&o, &e, &e, 2).unwrap(), 1.0 / (2.0 * PI), epsilon = 1e-16);
        assert!(matches!(laplace_slp(&o, &o, 2, 1.0), Err(Error::SingularEvaluation(_))));
    }

    #[test]
    fn slp_2d_is_harmonic() {
        let x = [0.1, 0.2, 0.0];
        let (h, y) = (1e-3, [0.9, -0.4]);
        let u = |a: f64, b: f64| laplace_slp(&x, &[a, b, 0.0], 2, 1.0).unwrap();
        let lap = (u(y[0] + h, y[1]) + u(y[0] - h, y[1]) + u(y[0], y[1] + h) + u(y[0], y[1] - h)
            - 4.0 * u(y[0], y[1]))
            / (h * h);
        assert!(lap.abs() <= 1e-4);
    }

    #[test]
    fn kelvin_symmetry() {
        let m = Material::elastic(1.0, 0.3, PlaneModel::Strain).unwrap();
        let u = kelvin_slp_2d(&[0.0; 3], &[0.4, 0.7, 0.0], &m).unwrap();
        assert_eq!(u[0][1], u[1][0]);
        let a = kelvin_slp_2d(&[0.0; 3], &[2.0, 0.0, 0.0], &m).unwrap();
        assert_eq!(a[0][1], 0.0);
        assert_eq!(a[1][0], 0.0);
    }

    #[test]
    fn kelvin_dlp_swap_structure() {
        let m = Material::elastic(1.0, 0.25, PlaneModel::Strain).unwrap();
        let x = [0.3, -0.2, 0.0];
        let y = [1.1, 0.6, 0.0];
        let n = [0.6, 0.8, 0.0];
        let neg = [-0.6, -0.8, 0.0];
        let k = kelvin_dlp_2d(&x, &y, &n, &m).unwrap();
        let s = kelvin_dlp_2d(&y, &x, &neg, &m).unwrap();
        // swapping the points and reversing the normal leaves the tensor unchanged
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(k[i][j], s[i][j], epsilon = 1e-12);
            }
        }
        // the skew part is the tangential term alone
        let d = [0.8, 0.8];
        let r: f64 = d[0] * d[0] + d[1] * d[1];
        let r = r.sqrt();
        let skew = -(1.0 - 2.0 * 0.25) / (4.0 * PI * 0.75 * r) * (d[0] / r * n[1] - d[1] / r * n[0]);
        assert_abs_diff_eq!(k[0][1] - k[1][0], 2.0 * skew, epsilon = 1e-12);
        // tangential normal: only the antisymmetric part remains
        let d = [1.0, 0.0, 0.0];
        let kt = kelvin_dlp_2d(&[0.0; 3], &d, &[0.0, 1.0, 0.0], &m).unwrap();
        assert_eq!(kt[0][0], 0.0);
        assert_eq!(kt[1][1], 0.0);
        assert_abs_diff_eq!(kt[0][1], -kt[1][0], epsilon = 1e-16);
    }

    #[test]
    fn dlp_is_negative_fd_traction_of_slp() {
        for plane in [PlaneModel::Strain, PlaneModel::Stress] {
            let m = Material::elastic(3.0, 0.3, plane).unwrap();
            let nu = m.kernel_poisson();
            let mu = m.shear_modulus();
            let lambda = 2.0 * mu * nu / (1.0 - 2.0 * nu);
            let x = [0.2, 0.1, 0.0];
            let y = [0.9, -0.5, 0.0];
            let n = [0.8, 0.6, 0.0];
            let h = 1e-5;
            let k = kelvin_dlp_2d(&x, &y, &n, &m).unwrap();
            for i in 0..2 {
                // displacement field of a unit load in direction i
                let disp = |p: [f64; 2]| {
                    let u = kelvin_slp_2d(&x, &[p[0], p[1], 0.0], &m).unwrap();
                    [u[i][0], u[i][1]]
                };
                let mut grad = [[0.0; 2]; 2];
                for b in 0..2 {
                    let mut pp = [y[0], y[1]];
                    let mut pm = pp;
                    pp[b] += h;
                    pm[b] -= h;
                    let (up, um) = (disp(pp), disp(pm));
                    for a in 0..2 {
                        grad[a][b] = (up[a] - um[a]) / (2.0 * h);
                    }
                }
                let div = grad[0][0] + grad[1][1];
                for j in 0..2 {
                    let t: f64 = (0..2)
                        .map(|b| {
                            let delta = if j == b { 1.0 } else { 0.0 };
                            (lambda * div * delta + mu * (grad[j][b] + grad[b][j])) * n[b]
                        })
                        .sum();
                    assert_abs_diff_eq!(k[i][j], -t, epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn kernel_trait_layout() {
        let m = Material::elastic(1.0, 0.3, PlaneModel::Strain).unwrap();
        let kern = Fundamental::new(Problem::Lame2d, Layer::Double, m);
        let mut out = [0.0; 4];
        let (x, y, n) = ([0.0; 3], [0.5, 0.3, 0.0], [0.0, 1.0, 0.0]);
        kern.eval(&x, &y, &n, &mut out).unwrap();
        let k = kelvin_dlp_2d(&x, &y, &n, &m).unwrap();
        assert_eq!(out, [k[0][0], k[0][1], k[1][0], k[1][1]]);
        assert_eq!(kern.singularity(), Singularity::Strong);
        assert_eq!(kern.components(), 2);
    }
}
