//! Run configuration: `key = value` lines, `#` comments, unknown keys rejected.

use crate::error::{parse_err, HarnessError, Result};
use isonystrom::{Formulation, PlaneModel, Problem, Vec3};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    H,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    None,
    /// Grade towards corners and boundary-condition interfaces of curves.
    Corners,
}

/// Points given explicitly or placed automatically from the geometry.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    Auto,
    List(Vec<Vec3<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedPoint {
    pub patch: usize,
    pub coords: [f64; 2],
    pub level: usize,
}

/// Knots inserted into one direction of a patch's element partition.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotInsertion {
    pub patch: usize,
    pub direction: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub formulation: Formulation,
    /// Geometry file, or `builtin:<name>`.
    pub geometry: String,
    /// Quadrature points per direction.
    pub order: usize,
    pub mode: Mode,
    pub steps: usize,
    /// Orders of a p-sweep.
    pub orders: Vec<usize>,
    /// Uniform refinements applied before the first step.
    pub base_refinements: usize,
    /// Applied to the initial partition, before any uniform refinement.
    pub insert_knots: Vec<KnotInsertion>,
    pub grading: Grading,
    pub grading_elements: usize,
    pub holder: f64,
    /// Grading exponent `q`; derived from the order and `holder` if unset.
    pub grading_exponent: Option<f64>,
    pub refine_points: Vec<ScriptedPoint>,
    pub eta: f64,
    pub youngs: f64,
    pub poisson: f64,
    pub plane: PlaneModel,
    pub conductivity: f64,
    pub sources: PointSpec,
    /// One value per source (Laplace) or one force vector per source (Lamé).
    pub source_strengths: Vec<f64>,
    pub eval_points: PointSpec,
    pub moment_tol: f64,
    pub output: Option<PathBuf>,
    /// Directory relative paths are resolved against.
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Laplace2d,
            formulation: Formulation::SecondKind,
            geometry: "builtin:flower".into(),
            order: 2,
            mode: Mode::H,
            steps: 4,
            orders: (2..=8).collect(),
            base_refinements: 0,
            insert_knots: Vec::new(),
            grading: Grading::None,
            grading_elements: 6,
            holder: 1.0,
            grading_exponent: None,
            refine_points: Vec::new(),
            eta: 2.0,
            youngs: 1e9,
            poisson: 0.3,
            plane: PlaneModel::Strain,
            conductivity: 1.0,
            sources: PointSpec::Auto,
            source_strengths: Vec::new(),
            eval_points: PointSpec::Auto,
            moment_tol: 1e-12,
            output: None,
            base_dir: PathBuf::from("."),
        }
    }
}

/// Shortest round-trip text, in exponent form for very small or large values.
fn num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn one<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| parse_err(line, format!("{key}: cannot parse `{v}`")))
}

fn real(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = one(line, key, v)?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("{key}: `{v}` is not finite")));
    }
    Ok(x)
}

fn reals(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| real(line, key, t))
        .collect()
}

fn points(line: usize, key: &str, v: &str, dim: usize) -> Result<PointSpec> {
    if v == "auto" {
        return Ok(PointSpec::Auto);
    }
    v.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let c = reals(line, key, p)?;
            if c.len() != dim {
                return Err(parse_err(line, format!("{key}: point `{}` needs {dim} coordinates", p.trim())));
            }
            Ok([c[0], c[1], if dim == 3 { c[2] } else { 0.0 }])
        })
        .collect::<Result<Vec<_>>>()
        .map(PointSpec::List)
}

fn problem_name(p: Problem) -> &'static str {
    match p {
        Problem::Laplace2d => "laplace2d",
        Problem::Laplace3d => "laplace3d",
        Problem::Lame2d => "lame2d",
    }
}

fn formulation_name(f: Formulation) -> &'static str {
    match f {
        Formulation::FirstKind => "slp",
        Formulation::SecondKind => "dlp",
        Formulation::Direct => "direct",
    }
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = RunConfig {
            base_dir: base_dir.to_path_buf(),
            ..Default::default()
        };
        // point lists depend on the problem dimension, so they are parsed last
        let mut deferred = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(no, format!("expected `key = value`, found `{line}`")))?;
            let (key, v) = (key.trim(), value.trim());
            match key {
                "problem" => {
                    cfg.problem = match v {
                        "laplace2d" => Problem::Laplace2d,
                        "laplace3d" => Problem::Laplace3d,
                        "lame2d" => Problem::Lame2d,
                        _ => return Err(parse_err(no, format!("unknown problem `{v}`"))),
                    }
                }
                "formulation" => {
                    cfg.formulation = match v {
                        "slp" => Formulation::FirstKind,
                        "dlp" => Formulation::SecondKind,
                        "direct" => Formulation::Direct,
                        _ => return Err(parse_err(no, format!("unknown formulation `{v}`"))),
                    }
                }
                "geometry" => cfg.geometry = v.to_string(),
                "order" => cfg.order = one(no, key, v)?,
                "mode" => {
                    cfg.mode = match v {
                        "h" => Mode::H,
                        "p" => Mode::P,
                        _ => return Err(parse_err(no, "mode must be `h` or `p`")),
                    }
                }
                "steps" => cfg.steps = one(no, key, v)?,
                "orders" => {
                    cfg.orders = v
                        .split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|t| !t.is_empty())
                        .map(|t| one(no, key, t))
                        .collect::<Result<_>>()?
                }
                "base_refinements" => cfg.base_refinements = one(no, key, v)?,
                "grading" => {
                    cfg.grading = match v {
                        "none" => Grading::None,
                        "corners" => Grading::Corners,
                        _ => return Err(parse_err(no, "grading must be `none` or `corners`")),
                    }
                }
                "grading_elements" => cfg.grading_elements = one(no, key, v)?,
                "holder" => cfg.holder = real(no, key, v)?,
                "grading_exponent" => cfg.grading_exponent = Some(real(no, key, v)?),
                "insert_knots" => {
                    cfg.insert_knots = v
                        .split(';')
                        .filter(|p| !p.trim().is_empty())
                        .map(|p| {
                            let t: Vec<&str> = p.split_whitespace().collect();
                            if t.len() < 3 {
                                return Err(parse_err(no, "insert_knots entries are `patch direction u...`"));
                            }
                            Ok(KnotInsertion {
                                patch: one(no, key, t[0])?,
                                direction: one(no, key, t[1])?,
                                values: t[2..].iter().map(|x| real(no, key, x)).collect::<Result<_>>()?,
                            })
                        })
                        .collect::<Result<_>>()?
                }
                "refine_points" => {
                    cfg.refine_points = v
                        .split(';')
                        .filter(|p| !p.trim().is_empty())
                        .map(|p| {
                            let t: Vec<&str> = p.split_whitespace().collect();
                            match t.as_slice() {
                                [patch, u, v, level] => Ok(ScriptedPoint {
                                    patch: one(no, key, patch)?,
                                    coords: [real(no, key, u)?, real(no, key, v)?],
                                    level: one(no, key, level)?,
                                }),
                                _ => Err(parse_err(no, "refine_points entries are `patch u v level`")),
                            }
                        })
                        .collect::<Result<_>>()?
                }
                "eta" => cfg.eta = real(no, key, v)?,
                "youngs" => cfg.youngs = real(no, key, v)?,
                "poisson" => cfg.poisson = real(no, key, v)?,
                "plane" => {
                    cfg.plane = match v {
                        "strain" => PlaneModel::Strain,
                        "stress" => PlaneModel::Stress,
                        _ => return Err(parse_err(no, "plane must be `strain` or `stress`")),
                    }
                }
                "conductivity" => cfg.conductivity = real(no, key, v)?,
                "source_strengths" => cfg.source_strengths = reals(no, key, v)?,
                "sources" | "eval_points" => deferred.push((no, key.to_string(), v.to_string())),
                "moment_tol" => cfg.moment_tol = real(no, key, v)?,
                "output" => cfg.output = Some(PathBuf::from(v)),
                other => return Err(parse_err(no, format!("unknown key `{other}`"))),
            }
        }
        let dim = cfg.problem.dim();
        for (no, key, v) in deferred {
            let spec = points(no, &key, &v, dim)?;
            if key == "sources" {
                cfg.sources = spec;
            } else {
                cfg.eval_points = spec;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, dir)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.order == 0 || self.order > 64 {
            return bad(format!("order {} outside 1..=64", self.order));
        }
        if self.orders.iter().any(|&n| n == 0 || n > 64) {
            return bad("orders must lie in 1..=64".into());
        }
        if self.mode == Mode::P && self.orders.is_empty() {
            return bad("p-mode needs `orders`".into());
        }
        if !(self.eta > 0.0) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if !(self.holder > 0.0 && self.holder <= 1.0) {
            return bad(format!("holder must lie in (0, 1], got {}", self.holder));
        }
        if self.grading_exponent.is_some_and(|q| !(q > 0.0)) {
            return bad("grading_exponent must be positive".into());
        }
        if self.insert_knots.iter().any(|k| k.direction > 1) {
            return bad("insert_knots direction must be 0 or 1".into());
        }
        if self.grading == Grading::Corners && self.grading_elements < 2 {
            return bad("grading_elements must be at least 2".into());
        }
        if !(self.moment_tol > 0.0) {
            return bad("moment_tol must be positive".into());
        }
        if self.problem == Problem::Lame2d && !(self.poisson > -1.0 && self.poisson < 0.5 && self.youngs > 0.0) {
            return bad("elastic constants need E > 0 and -1 < nu < 0.5".into());
        }
        if self.conductivity <= 0.0 {
            return bad("conductivity must be positive".into());
        }
        if let PointSpec::List(l) = &self.sources {
            let c = self.problem.components();
            if !self.source_strengths.is_empty() && self.source_strengths.len() != l.len() * c {
                return bad(format!(
                    "{} source strengths for {} sources with {c} components",
                    self.source_strengths.len(),
                    l.len()
                ));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Serialises every field; `parse` of the result gives back `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let pts = |p: &PointSpec, dim: usize| match p {
            PointSpec::Auto => "auto".to_string(),
            PointSpec::List(l) => l
                .iter()
                .map(|x| x[..dim].iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join("; "),
        };
        let dim = self.problem.dim();
        let _ = writeln!(s, "problem = {}", problem_name(self.problem));
        let _ = writeln!(s, "formulation = {}", formulation_name(self.formulation));
        let _ = writeln!(s, "geometry = {}", self.geometry);
        let _ = writeln!(s, "order = {}", self.order);
        let _ = writeln!(s, "mode = {}", if self.mode == Mode::H { "h" } else { "p" });
        let _ = writeln!(s, "steps = {}", self.steps);
        let orders: Vec<String> = self.orders.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "orders = {}", orders.join(" "));
        let _ = writeln!(s, "base_refinements = {}", self.base_refinements);
        if !self.insert_knots.is_empty() {
            let k: Vec<String> = self
                .insert_knots
                .iter()
                .map(|k| {
                    let v: Vec<String> = k.values.iter().map(|x| format!("{x}")).collect();
                    format!("{} {} {}", k.patch, k.direction, v.join(" "))
                })
                .collect();
            let _ = writeln!(s, "insert_knots = {}", k.join("; "));
        }
        let _ = writeln!(
            s,
            "grading = {}",
            if self.grading == Grading::None { "none" } else { "corners" }
        );
        let _ = writeln!(s, "grading_elements = {}", self.grading_elements);
        let _ = writeln!(s, "holder = {}", num(self.holder));
        if let Some(q) = self.grading_exponent {
            let _ = writeln!(s, "grading_exponent = {}", num(q));
        }
        if !self.refine_points.is_empty() {
            let rp: Vec<String> = self
                .refine_points
                .iter()
                .map(|p| format!("{} {} {} {}", p.patch, p.coords[0], p.coords[1], p.level))
                .collect();
            let _ = writeln!(s, "refine_points = {}", rp.join("; "));
        }
        let _ = writeln!(s, "eta = {}", num(self.eta));
        let _ = writeln!(s, "youngs = {}", num(self.youngs));
        let _ = writeln!(s, "poisson = {}", num(self.poisson));
        let _ = writeln!(
            s,
            "plane = {}",
            if self.plane == PlaneModel::Strain { "strain" } else { "stress" }
        );
        let _ = writeln!(s, "conductivity = {}", num(self.conductivity));
        let _ = writeln!(s, "sources = {}", pts(&self.sources, dim));
        if !self.source_strengths.is_empty() {
            let v: Vec<String> = self.source_strengths.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "source_strengths = {}", v.join(" "));
        }
        let _ = writeln!(s, "eval_points = {}", pts(&self.eval_points, dim));
        let _ = writeln!(s, "moment_tol = {}", num(self.moment_tol));
        if let Some(o) = &self.output {
            let _ = writeln!(s, "output = {}", o.display());
        }
        s
    }
}
