//! Manufactured-solution runs and convergence studies.

use crate::config::{Grading, Mode, RunConfig};
use crate::error::{HarnessError, Result};
use crate::fit::{exponential_fit, loglog_slope, ExpFit};
use crate::manufactured::{placement, Manufactured};
use crate::{geofile, shapes};
use isonystrom::partition::grading_exponent;
use isonystrom::scalar::{distance, dot, norm};
use isonystrom::solver::evaluate_field;
use isonystrom::{
    assemble, distribute_points, gauss_legendre, solve, AssemblyConfig, ElementPartition, Fundamental, Layer,
    Material, NurbsPatch, Problem, QuadraturePointSet, RefinementPoint, Vec3,
};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

/// Patches named by a config: a geometry file or `builtin:<name>`.
pub fn load_patches(cfg: &RunConfig) -> Result<Vec<NurbsPatch<f64>>> {
    if let Some(name) = cfg.geometry.strip_prefix("builtin:") {
        return Ok(vec![match name {
            "flower" => shapes::default_flower(),
            "teardrop" => shapes::default_teardrop(),
            "torus" => shapes::default_torus(),
            "circle" => isonystrom::shapes::circle([0.0, 0.0], 1.0),
            _ => return Err(HarnessError::Config(format!("unknown builtin geometry `{name}`"))),
        }]);
    }
    geofile::load_geometry(&cfg.resolve(Path::new(&cfg.geometry)))
}

pub fn material(cfg: &RunConfig) -> Result<Material<f64>> {
    Ok(match cfg.problem {
        Problem::Lame2d => Material::elastic(cfg.youngs, cfg.poisson, cfg.plane)?,
        _ => Material::conductive(cfg.conductivity)?,
    })
}

const KINK_TOL: f64 = 1e-4;

fn angle(a: &Vec3<f64>, b: &Vec3<f64>) -> f64 {
    (dot(a, b) / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
}

/// Parameter values (per patch) that grading should target: interior
/// corners, kinks at the seam of closed curves, and patch junctions that
/// form a corner or separate different boundary conditions.
pub fn grading_targets(patches: &[NurbsPatch<f64>]) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for (i, p) in patches.iter().enumerate() {
        if p.param_dim() != 1 {
            return Err(HarnessError::Config("grading is only available for curves".into()));
        }
        for u in p.corner_candidates() {
            if p.tangent_kink(u)? > KINK_TOL {
                out.push((i, u));
            }
        }
        let (lo, hi) = p.knot_vectors()[0].domain();
        let (a, b) = (p.eval_curve(lo)?, p.eval_curve(hi)?);
        let size = 1.0 + norm(&a);
        if distance(&a, &b) <= 1e-10 * size {
            if p.tangent_kink(lo)? > KINK_TOL {
                out.push((i, lo));
            }
            continue;
        }
        for (end, x) in [(lo, a), (hi, b)] {
            let t = p.eval_curve_jacobian(end)?;
            for (j, q) in patches.iter().enumerate() {
                if j == i {
                    continue;
                }
                let (qlo, qhi) = q.knot_vectors()[0].domain();
                for qend in [qlo, qhi] {
                    if distance(&q.eval_curve(qend)?, &x) <= 1e-10 * size {
                        let kink = angle(&t, &q.eval_curve_jacobian(qend)?);
                        let kink = kink.min(std::f64::consts::PI - kink);
                        if kink > KINK_TOL || q.boundary_condition() != p.boundary_condition() {
                            out.push((i, end));
                        }
                    }
                }
            }
        }
    }
    out.dedup();
    Ok(out)
}

/// Normalised element size `(A_max / A)^(1/(d−1))`, with element measures
/// from an 8-point rule.
pub fn meshwidth(patches: &[NurbsPatch<f64>], partitions: &[ElementPartition<f64>]) -> Result<f64> {
    let pts = distribute_points(patches, partitions, &gauss_legendre(8)?)?;
    let mut total = 0.0;
    let mut max = 0.0f64;
    for info in &pts.leaves {
        let a: f64 = pts.points[info.points.clone()].iter().map(|p| p.weight).sum();
        total += a;
        max = max.max(a);
    }
    Ok((max / total).powf(1.0 / (pts.dim as f64 - 1.0)))
}

/// Outcome of one discretisation.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub h: f64,
    pub dof: usize,
    pub max_rel_err: f64,
    /// Computed field at every evaluation point.
    pub values: Vec<Vec<f64>>,
    pub near_pairs: usize,
    pub max_moment_residual: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub step: usize,
    pub order: usize,
    pub h: f64,
    pub dof: usize,
    pub max_rel_err: f64,
    /// Failure of the step, if any.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub mode: Mode,
    pub dim: usize,
    pub rows: Vec<Row>,
    /// `d ln ε / d ln h` over all rows (h-mode).
    pub slope: Option<f64>,
    /// Exponential model fit against the dof count (p-mode).
    pub exp_fit: Option<ExpFit>,
}

impl ConvergenceRecord {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.max_rel_err).collect()
    }

    /// Log-log slope of rows `range` against `h`.
    pub fn slope_over(&self, range: std::ops::Range<usize>) -> Option<f64> {
        let rows = &self.rows[range];
        let h: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let e: Vec<f64> = rows.iter().map(|r| r.max_rel_err).collect();
        loglog_slope(&h, &e)
    }

    /// Rate against the dof count, expressed per unit of `h`
    /// (`dof ~ h^(1−d)`), which is how graded meshes are compared.
    pub fn dof_slope(&self) -> Option<f64> {
        let n: Vec<f64> = self.rows.iter().map(|r| r.dof as f64).collect();
        let e: Vec<f64> = self.rows.iter().map(|r| r.max_rel_err).collect();
        loglog_slope(&n, &e).map(|s| -s * (self.dim as f64 - 1.0))
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].max_rel_err < w[0].max_rel_err)
    }

    /// CSV with columns `step,h,dof,max_rel_err,fit_slope,fit_C,fit_s`; the
    /// fit columns are filled on the last row only.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "h", "dof", "max_rel_err", "fit_slope", "fit_C", "fit_s"])?;
        let f = |v: f64| format!("{v:.12e}");
        for (i, r) in self.rows.iter().enumerate() {
            let last = i + 1 == self.rows.len();
            let (slope, c, s) = match (last, self.mode) {
                (true, Mode::H) => (self.slope.map(f).unwrap_or_default(), String::new(), String::new()),
                (true, Mode::P) => match self.exp_fit {
                    Some(e) => (String::new(), f(e.c), f(e.s)),
                    None => Default::default(),
                },
                _ => Default::default(),
            };
            w.write_record([r.step.to_string(), f(r.h), r.dof.to_string(), f(r.max_rel_err), slope, c, s])?;
        }
        w.flush().map_err(|source| HarnessError::Io {
            path: "csv output".into(),
            source,
        })?;
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    }
}

/// Everything that stays fixed across the steps of a study.
pub struct Study {
    pub cfg: RunConfig,
    pub patches: Vec<NurbsPatch<f64>>,
    pub manufactured: Manufactured,
    pub eval_points: Vec<Vec3<f64>>,
    pub exact: Vec<Vec<f64>>,
    single: Fundamental<f64>,
    double: Fundamental<f64>,
    grading: Vec<(usize, f64)>,
}

impl Study {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let patches = load_patches(&cfg)?;
        let dim = cfg.problem.dim();
        if patches.iter().any(|p| p.dim() != dim) {
            return Err(HarnessError::Config(format!(
                "problem {:?} needs {dim}D geometry",
                cfg.problem
            )));
        }
        Self::with_patches(cfg, patches)
    }

    pub fn with_patches(cfg: RunConfig, patches: Vec<NurbsPatch<f64>>) -> Result<Self> {
        let mat = material(&cfg)?;
        let (sources, strengths, eval_points) = placement(&cfg, &patches)?;
        let manufactured = Manufactured::new(cfg.problem, mat, sources, strengths)?;
        let exact = eval_points
            .iter()
            .map(|x| manufactured.value(x))
            .collect::<Result<Vec<_>>>()?;
        let grading = match cfg.grading {
            Grading::None => Vec::new(),
            Grading::Corners => grading_targets(&patches)?,
        };
        Ok(Self {
            single: Fundamental::new(cfg.problem, Layer::Single, mat),
            double: Fundamental::new(cfg.problem, Layer::Double, mat),
            cfg,
            patches,
            manufactured,
            eval_points,
            exact,
            grading,
        })
    }

    pub fn grading_targets(&self) -> &[(usize, f64)] {
        &self.grading
    }

    /// Partition after `refinements` uniform refinements, followed by the
    /// configured grading (for quadrature order `order`) and refinement points.
    pub fn partitions(&self, refinements: usize, order: usize) -> Result<Vec<ElementPartition<f64>>> {
        let mut parts: Vec<ElementPartition<f64>> = self.patches.iter().map(ElementPartition::new).collect();
        for k in &self.cfg.insert_knots {
            let part = parts
                .get_mut(k.patch)
                .ok_or_else(|| HarnessError::Config(format!("knot insertion on missing patch {}", k.patch)))?;
            part.insert_knots(k.direction, &k.values)?;
        }
        for part in &mut parts {
            for _ in 0..refinements {
                part.refine_uniform()?;
            }
        }
        if !self.grading.is_empty() {
            let q = match self.cfg.grading_exponent {
                Some(q) => q,
                None => grading_exponent(order, self.cfg.holder)?,
            };
            for &(patch, u) in &self.grading {
                parts[patch].grade_towards(0, u, self.cfg.grading_elements, q)?;
            }
        }
        for sp in &self.cfg.refine_points {
            let part = parts.get_mut(sp.patch).ok_or_else(|| {
                HarnessError::Config(format!("refinement point on missing patch {}", sp.patch))
            })?;
            part.add_refinement_point(RefinementPoint {
                coords: sp.coords,
                level: sp.level,
            })?;
        }
        Ok(parts)
    }

    pub fn assembly_config(&self) -> AssemblyConfig<f64> {
        AssemblyConfig {
            eta: self.cfg.eta,
            moment_tol: self.cfg.moment_tol,
            formulation: self.cfg.formulation,
            ..Default::default()
        }
    }

    /// Largest relative error over the evaluation points (vector norm for
    /// multi-component fields).
    pub fn max_relative_error(&self, values: &[Vec<f64>]) -> f64 {
        values
            .iter()
            .zip(&self.exact)
            .map(|(v, e)| {
                let diff: f64 = v.iter().zip(e).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let size: f64 = e.iter().map(|b| b * b).sum::<f64>().sqrt();
                diff / size
            })
            .fold(0.0, f64::max)
    }

    /// Discretise, solve and evaluate on `partitions` with `order` points per direction.
    pub fn run(&self, partitions: &[ElementPartition<f64>], order: usize) -> Result<StepResult> {
        let start = Instant::now();
        let rule = gauss_legendre(order)?;
        let points: QuadraturePointSet<f64> = distribute_points(&self.patches, partitions, &rule)?;
        let data = self.manufactured.boundary_data(&self.patches, &points)?;
        let cfg = self.assembly_config();
        let system = assemble(&self.patches, &points, &self.single, &self.double, cfg, &data)?;
        let solution = solve(&system)?;
        let values = self
            .eval_points
            .iter()
            .map(|x| {
                evaluate_field(
                    &self.patches,
                    &points,
                    &self.single,
                    &self.double,
                    cfg,
                    &system,
                    &solution,
                    &data,
                    x,
                )
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let max_rel_err = self.max_relative_error(&values);
        Ok(StepResult {
            h: meshwidth(&self.patches, partitions)?,
            dof: system.rhs.len(),
            max_rel_err,
            values,
            near_pairs: system.stats.near_pairs,
            max_moment_residual: system.stats.max_residual,
            seconds: start.elapsed().as_secs_f64(),
        })
    }

    fn record_step(&self, step: usize, order: usize, refinements: usize) -> Row {
        let outcome = self.partitions(refinements, order).and_then(|p| self.run(&p, order));
        match outcome {
            Ok(r) => {
                log::info!(
                    "step {step}: n={order} dof={} h={:.4e} err={:.4e} near={} residual={:.1e} ({:.2}s)",
                    r.dof,
                    r.h,
                    r.max_rel_err,
                    r.near_pairs,
                    r.max_moment_residual,
                    r.seconds
                );
                Row {
                    step,
                    order,
                    h: r.h,
                    dof: r.dof,
                    max_rel_err: r.max_rel_err,
                    error: None,
                }
            }
            Err(e) => {
                log::error!("step {step} failed: {e}");
                Row {
                    step,
                    order,
                    h: f64::NAN,
                    dof: 0,
                    max_rel_err: f64::NAN,
                    error: Some(e.to_string()),
                }
            }
        }
    }

    /// h-mode: `steps + 1` rows from `base_refinements` up; p-mode: one row
    /// per entry of `orders` on the base partition.
    pub fn convergence(&self) -> ConvergenceRecord {
        let cfg = &self.cfg;
        let rows: Vec<Row> = match cfg.mode {
            Mode::H => (0..=cfg.steps)
                .map(|s| self.record_step(s, cfg.order, cfg.base_refinements + s))
                .collect(),
            Mode::P => cfg
                .orders
                .iter()
                .enumerate()
                .map(|(s, &n)| self.record_step(s, n, cfg.base_refinements))
                .collect(),
        };
        let ok: Vec<&Row> = rows.iter().filter(|r| r.error.is_none()).collect();
        let (slope, exp_fit) = match cfg.mode {
            Mode::H => {
                let h: Vec<f64> = ok.iter().map(|r| r.h).collect();
                let e: Vec<f64> = ok.iter().map(|r| r.max_rel_err).collect();
                (loglog_slope(&h, &e), None)
            }
            Mode::P => {
                let n: Vec<f64> = ok.iter().map(|r| r.dof as f64).collect();
                let e: Vec<f64> = ok.iter().map(|r| r.max_rel_err).collect();
                (None, exponential_fit(&n, &e))
            }
        };
        ConvergenceRecord {
            mode: cfg.mode,
            dim: cfg.problem.dim(),
            rows,
            slope,
            exp_fit,
        }
    }
}

/// Convenience wrapper: set up and run the study described by `cfg`.
pub fn run_convergence(cfg: &RunConfig) -> Result<ConvergenceRecord> {
    Ok(Study::new(cfg.clone())?.convergence())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use isonystrom::shapes as core_shapes;

    #[test]
    fn meshwidth_examples() {
        let circle = core_shapes::circle([0.0, 0.0], 1.0);
        let mut part = ElementPartition::new(&circle);
        let h = meshwidth(std::slice::from_ref(&circle), std::slice::from_ref(&part)).unwrap();
        // four equal quarter arcs
        assert_abs_diff_eq!(h, 0.25, epsilon = 1e-10);
        part.insert_knots(0, &[0.5]).unwrap();
        let h = meshwidth(std::slice::from_ref(&circle), std::slice::from_ref(&part)).unwrap();
        assert_abs_diff_eq!(h, 0.25, epsilon = 1e-10);
        let seg = core_shapes::segment([0.0, 0.0], [2.0, 0.0]);
        let part = ElementPartition::new(&seg);
        let h = meshwidth(std::slice::from_ref(&seg), std::slice::from_ref(&part)).unwrap();
        assert_abs_diff_eq!(h, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn teardrop_corner_is_graded() {
        let t = shapes::default_teardrop();
        let targets = grading_targets(std::slice::from_ref(&t)).unwrap();
        assert_eq!(targets, vec![(0, 1.0)]);
        let flower = shapes::default_flower();
        assert!(grading_targets(std::slice::from_ref(&flower)).unwrap().is_empty());
        let circle = core_shapes::circle([0.0, 0.0], 1.0);
        assert!(grading_targets(std::slice::from_ref(&circle)).unwrap().is_empty());
    }
}
