//! Manufactured solutions: superpositions of fundamental solutions placed
//! outside the domain give boundary data and an exact interior field.

use crate::config::{PointSpec, RunConfig};
use crate::error::{HarnessError, Result};
use isonystrom::kernels::{kelvin_dlp_2d, kelvin_slp_2d, laplace_dlp, laplace_slp};
use isonystrom::scalar::distance;
use isonystrom::{
    distribute_points, gauss_legendre, BoundaryCondition, ElementPartition, Material, NurbsPatch, Problem,
    QuadraturePointSet, Vec3,
};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct Manufactured {
    pub problem: Problem,
    pub material: Material<f64>,
    pub sources: Vec<Vec3<f64>>,
    /// `components` values per source.
    pub strengths: Vec<f64>,
}

impl Manufactured {
    pub fn new(problem: Problem, material: Material<f64>, sources: Vec<Vec3<f64>>, strengths: Vec<f64>) -> Result<Self> {
        let c = problem.components();
        if strengths.len() != sources.len() * c {
            return Err(HarnessError::Config(format!(
                "{} strengths for {} sources",
                strengths.len(),
                sources.len()
            )));
        }
        Ok(Self {
            problem,
            material,
            sources,
            strengths,
        })
    }

    fn components(&self) -> usize {
        self.problem.components()
    }

    /// Field value at `x`.
    pub fn value(&self, x: &Vec3<f64>) -> Result<Vec<f64>> {
        let c = self.components();
        let mut out = vec![0.0; c];
        for (k, s) in self.sources.iter().enumerate() {
            let f = &self.strengths[k * c..(k + 1) * c];
            match self.problem {
                Problem::Laplace2d | Problem::Laplace3d => {
                    out[0] += f[0] * laplace_slp(s, x, self.problem.dim(), self.material.conductivity)?;
                }
                Problem::Lame2d => {
                    let u = kelvin_slp_2d(s, x, &self.material)?;
                    for j in 0..2 {
                        out[j] += f[0] * u[0][j] + f[1] * u[1][j];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Flux (Laplace) or traction (Lamé) at boundary point `y` with outward normal `n`.
    pub fn flux(&self, y: &Vec3<f64>, n: &Vec3<f64>) -> Result<Vec<f64>> {
        let c = self.components();
        let mut out = vec![0.0; c];
        for (k, s) in self.sources.iter().enumerate() {
            let f = &self.strengths[k * c..(k + 1) * c];
            match self.problem {
                Problem::Laplace2d | Problem::Laplace3d => {
                    out[0] -= f[0] * laplace_dlp(s, y, n, self.problem.dim())?;
                }
                Problem::Lame2d => {
                    let t = kelvin_dlp_2d(s, y, n, &self.material)?;
                    for j in 0..2 {
                        out[j] -= f[0] * t[0][j] + f[1] * t[1][j];
                    }
                }
            }
        }
        Ok(out)
    }

    /// One datum per dof: the field for Dirichlet dofs and the flux for
    /// Neumann dofs (the latter only matter in the direct formulation).
    pub fn boundary_data(&self, patches: &[NurbsPatch<f64>], points: &QuadraturePointSet<f64>) -> Result<Vec<f64>> {
        let mut data = Vec::with_capacity(points.len() * self.components());
        for p in &points.points {
            let bc = patches[points.leaves[p.leaf].leaf.patch].boundary_condition();
            let v = match bc {
                BoundaryCondition::Dirichlet => self.value(&p.position)?,
                BoundaryCondition::Neumann => self.flux(&p.position, &p.normal)?,
            };
            data.extend(v);
        }
        Ok(data)
    }
}

/// Dense boundary sample used for geometric queries.
pub fn boundary_samples(patches: &[NurbsPatch<f64>]) -> Result<QuadraturePointSet<f64>> {
    let mut parts = Vec::with_capacity(patches.len());
    for p in patches {
        let mut part = ElementPartition::new(p);
        part.refine_uniform()?;
        part.refine_uniform()?;
        parts.push(part);
    }
    Ok(distribute_points(patches, &parts, &gauss_legendre(6)?)?)
}

/// Solid angle fraction `∫ ∂G/∂n`: 1 inside, 0 outside (outward normals).
pub fn winding(samples: &QuadraturePointSet<f64>, x: &Vec3<f64>) -> Result<f64> {
    let mut w = 0.0;
    for p in &samples.points {
        w += p.weight * laplace_dlp(x, &p.position, &p.normal, samples.dim)?;
    }
    Ok(w)
}

pub fn is_inside(samples: &QuadraturePointSet<f64>, x: &Vec3<f64>) -> Result<bool> {
    Ok(winding(samples, x)? > 0.5)
}

/// Centre of the bounding box, bounding radius about it and distance from
/// it to the boundary.
pub fn extent(samples: &QuadraturePointSet<f64>) -> (Vec3<f64>, f64, f64) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in &samples.points {
        for i in 0..3 {
            lo[i] = lo[i].min(p.position[i]);
            hi[i] = hi[i].max(p.position[i]);
        }
    }
    let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])];
    let (mut rmax, mut rmin) = (0.0f64, f64::INFINITY);
    for p in &samples.points {
        let d = distance(&c, &p.position);
        rmax = rmax.max(d);
        rmin = rmin.min(d);
    }
    (c, rmax, rmin)
}

pub fn auto_sources(samples: &QuadraturePointSet<f64>) -> Vec<Vec3<f64>> {
    let (c, r, _) = extent(samples);
    (0..3)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 3.0 + 0.3;
            let z = if samples.dim == 3 { 0.5 * r * (k as f64 - 1.0) } else { 0.0 };
            [c[0] + 3.0 * r * t.cos(), c[1] + 3.0 * r * t.sin(), c[2] + z]
        })
        .collect()
}

pub fn auto_eval_points(samples: &QuadraturePointSet<f64>) -> Vec<Vec3<f64>> {
    let (c, _, rin) = extent(samples);
    let rho = 0.5 * rin;
    if samples.dim == 2 {
        (0..8)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 8.0 + 0.1;
                [c[0] + rho * t.cos(), c[1] + rho * t.sin(), 0.0]
            })
            .collect()
    } else {
        let s = rho / 3f64.sqrt();
        (0..8)
            .map(|k| {
                let sign = |b: usize| if k >> b & 1 == 1 { s } else { -s };
                [c[0] + sign(0), c[1] + sign(1), c[2] + sign(2)]
            })
            .collect()
    }
}

pub fn default_strengths(problem: Problem, sources: usize) -> Vec<f64> {
    match problem {
        Problem::Lame2d => (0..sources)
            .flat_map(|k| {
                let a = 1.0 + k as f64;
                [a.cos(), a.sin()]
            })
            .collect(),
        _ => (0..sources).map(|k| 1.0 + 0.5 * k as f64).collect(),
    }
}

/// Sources, their strengths, and evaluation points.
pub type Placement = (Vec<Vec3<f64>>, Vec<f64>, Vec<Vec3<f64>>);

/// Sources and evaluation points of a run, checked against the geometry.
pub fn placement(cfg: &RunConfig, patches: &[NurbsPatch<f64>]) -> Result<Placement> {
    let samples = boundary_samples(patches)?;
    let sources = match &cfg.sources {
        PointSpec::Auto => auto_sources(&samples),
        PointSpec::List(l) => l.clone(),
    };
    let evals = match &cfg.eval_points {
        PointSpec::Auto => auto_eval_points(&samples),
        PointSpec::List(l) => l.clone(),
    };
    for s in &sources {
        if is_inside(&samples, s)? {
            return Err(HarnessError::Config(format!("source {s:?} lies inside the domain")));
        }
    }
    for x in &evals {
        if !is_inside(&samples, x)? {
            return Err(HarnessError::Config(format!(
                "evaluation point {x:?} lies outside the domain; give eval_points explicitly"
            )));
        }
    }
    let strengths = if cfg.source_strengths.is_empty() {
        default_strengths(cfg.problem, sources.len())
    } else {
        cfg.source_strengths.clone()
    };
    Ok((sources, strengths, evals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use isonystrom::{shapes, PlaneModel};

    #[test]
    fn laplace_superposition_and_unit_distance() {
        let mat = Material::conductive(1.0).unwrap();
        let a = Manufactured::new(Problem::Laplace2d, mat, vec![[1.0, 0.0, 0.0]], vec![1.0]).unwrap();
        assert_abs_diff_eq!(a.value(&[0.0, 0.0, 0.0]).unwrap()[0], 0.0, epsilon = 1e-16);
        let b = Manufactured::new(Problem::Laplace2d, mat, vec![[3.0, 1.0, 0.0]], vec![2.0]).unwrap();
        let both = Manufactured::new(
            Problem::Laplace2d,
            mat,
            vec![[1.0, 0.0, 0.0], [3.0, 1.0, 0.0]],
            vec![1.0, 2.0],
        )
        .unwrap();
        let x = [0.2, -0.4, 0.0];
        let sum = a.value(&x).unwrap()[0] + b.value(&x).unwrap()[0];
        assert_abs_diff_eq!(both.value(&x).unwrap()[0], sum, epsilon = 1e-15);
    }

    #[test]
    fn flux_is_normal_derivative() {
        let mat = Material::conductive(2.0).unwrap();
        for problem in [Problem::Laplace2d, Problem::Laplace3d] {
            let m = Manufactured::new(problem, mat, vec![[2.0, 1.0, 0.5]], vec![1.3]).unwrap();
            let y = [0.1, 0.2, if problem == Problem::Laplace3d { 0.3 } else { 0.0 }];
            let n = if problem == Problem::Laplace3d {
                [0.0, 0.6, 0.8]
            } else {
                [0.6, 0.8, 0.0]
            };
            let h = 1e-6;
            let plus = m.value(&[y[0] + h * n[0], y[1] + h * n[1], y[2] + h * n[2]]).unwrap()[0];
            let minus = m.value(&[y[0] - h * n[0], y[1] - h * n[1], y[2] - h * n[2]]).unwrap()[0];
            let fd = mat.conductivity * (plus - minus) / (2.0 * h);
            assert_abs_diff_eq!(m.flux(&y, &n).unwrap()[0], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn elastic_data_is_kelvin_column_combination() {
        let mat = Material::elastic(1e9, 0.3, PlaneModel::Strain).unwrap();
        let s = [[3.0, 0.5, 0.0], [-2.0, 2.0, 0.0]];
        let f = [0.4, -1.0, 2.0, 0.3];
        let m = Manufactured::new(Problem::Lame2d, mat, s.to_vec(), f.to_vec()).unwrap();
        let x = [0.1, 0.2, 0.0];
        let u = m.value(&x).unwrap();
        let mut expect = [0.0; 2];
        for k in 0..2 {
            let g = kelvin_slp_2d(&s[k], &x, &mat).unwrap();
            for j in 0..2 {
                expect[j] += g[j][0] * f[2 * k] + g[j][1] * f[2 * k + 1];
            }
        }
        assert_abs_diff_eq!(u[0], expect[0], epsilon = 1e-22);
        assert_abs_diff_eq!(u[1], expect[1], epsilon = 1e-22);
    }

    #[test]
    fn inside_outside_tests() {
        let samples = boundary_samples(&[shapes::circle([0.0, 0.0], 1.0)]).unwrap();
        assert_abs_diff_eq!(winding(&samples, &[0.3, 0.2, 0.0]).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(winding(&samples, &[3.0, 0.2, 0.0]).unwrap(), 0.0, epsilon = 1e-10);
        for x in auto_eval_points(&samples) {
            assert!(is_inside(&samples, &x).unwrap());
            assert_abs_diff_eq!(isonystrom::scalar::norm(&x), 0.5, epsilon = 1e-6);
        }
        for s in auto_sources(&samples) {
            assert!(!is_inside(&samples, &s).unwrap());
        }
        let torus = boundary_samples(&[shapes::torus(0.9, 0.2)]).unwrap();
        assert!(is_inside(&torus, &[0.0, 0.95, 0.05]).unwrap());
        assert!(!is_inside(&torus, &[0.0, 0.0, 0.0]).unwrap());
    }
}
