//! Plain-text geometry files.
//!
//! ```text
//! # comment
//! patch
//! dim 2
//! pdim 1
//! degree 2
//! knots 0 0 0 1 1 2 2 3 3 4 4 4
//! weights 1 0.7071 1 ...
//! control_points 9
//! 1 0
//! ...
//! bc dirichlet
//! orientation +1
//! corners 1.0
//! end
//! ```
//!
//! Surfaces use `degrees p q` and two `knots` lines (first direction, then
//! second). Control points are listed with the first direction running
//! fastest, `dim` reals each.

use crate::error::{parse_err, HarnessError, Result};
use isonystrom::{BoundaryCondition, KnotVector, NurbsPatch, Orientation};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Default)]
struct PatchDraft {
    start: usize,
    dim: Option<usize>,
    pdim: Option<usize>,
    degrees: Vec<usize>,
    knots: Vec<(usize, Vec<f64>)>,
    weights: Option<Vec<f64>>,
    points: Vec<[f64; 3]>,
    bc: BoundaryCondition,
    orientation: Option<Orientation>,
    corners: Vec<f64>,
}

fn reals(line: usize, tokens: &[&str]) -> Result<Vec<f64>> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("`{t}` is not a finite real")))
        })
        .collect()
}

fn integer(line: usize, key: &str, tokens: &[&str]) -> Result<usize> {
    match tokens {
        [t] => t
            .parse()
            .map_err(|_| parse_err(line, format!("{key}: `{t}` is not a non-negative integer"))),
        _ => Err(parse_err(line, format!("{key} takes exactly one integer"))),
    }
}

impl PatchDraft {
    fn finish(self, end_line: usize) -> Result<NurbsPatch<f64>> {
        let at = self.start;
        let dim = self.dim.ok_or_else(|| parse_err(at, "patch without `dim`"))?;
        let pdim = self.pdim.ok_or_else(|| parse_err(at, "patch without `pdim`"))?;
        if !(dim == 2 && pdim == 1 || dim == 3 && pdim == 2) {
            return Err(parse_err(at, format!("unsupported dim {dim} / pdim {pdim}")));
        }
        if self.degrees.len() != pdim {
            return Err(parse_err(at, format!("expected {pdim} degree(s), got {}", self.degrees.len())));
        }
        if self.knots.len() != pdim {
            return Err(parse_err(at, format!("expected {pdim} knot line(s), got {}", self.knots.len())));
        }
        let kvs = self
            .degrees
            .iter()
            .zip(self.knots)
            .map(|(&p, (line, k))| KnotVector::new(k, p).map_err(|e| parse_err(line, format!("knots: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let weights = self.weights.unwrap_or_else(|| vec![1.0; self.points.len()]);
        let patch = if pdim == 1 {
            let pts: Vec<[f64; 2]> = self.points.iter().map(|p| [p[0], p[1]]).collect();
            NurbsPatch::curve(kvs[0].clone(), &pts, &weights)
        } else {
            NurbsPatch::surface([kvs[0].clone(), kvs[1].clone()], &self.points, &weights)
        }
        .map_err(|e| parse_err(end_line, e.to_string()))?;
        patch
            .validate_mapping(3)
            .map_err(|e| parse_err(end_line, e.to_string()))?;
        Ok(patch
            .with_boundary_condition(self.bc)
            .with_orientation(self.orientation.unwrap_or(Orientation::Positive))
            .with_corners(self.corners))
    }
}

/// Parses geometry text into validated patches.
pub fn parse_geometry(text: &str) -> Result<Vec<NurbsPatch<f64>>> {
    let mut patches = Vec::new();
    let mut draft: Option<PatchDraft> = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    while let Some((no, raw)) = lines.next() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (key, rest) = (tokens[0], &tokens[1..]);
        let Some(d) = draft.as_mut() else {
            if key == "patch" && rest.is_empty() {
                draft = Some(PatchDraft {
                    start: no,
                    ..Default::default()
                });
                continue;
            }
            return Err(parse_err(no, format!("expected `patch`, found `{key}`")));
        };
        match key {
            "dim" => d.dim = Some(integer(no, key, rest)?),
            "pdim" => d.pdim = Some(integer(no, key, rest)?),
            "degree" | "degrees" => {
                d.degrees = rest
                    .iter()
                    .map(|t| integer(no, key, &[t]))
                    .collect::<Result<_>>()?;
            }
            "knots" => d.knots.push((no, reals(no, rest)?)),
            "weights" => d.weights = Some(reals(no, rest)?),
            "control_points" => {
                let count = integer(no, key, rest)?;
                let dim = d
                    .dim
                    .ok_or_else(|| parse_err(no, "`dim` must precede `control_points`"))?;
                for _ in 0..count {
                    let (pno, praw) = lines
                        .next()
                        .ok_or_else(|| parse_err(no, "file ends inside control point list"))?;
                    let toks: Vec<&str> = praw.split('#').next().unwrap_or("").split_whitespace().collect();
                    let v = reals(pno, &toks)?;
                    if v.len() != dim {
                        return Err(parse_err(pno, format!("control point needs {dim} reals, got {}", v.len())));
                    }
                    d.points.push([v[0], v[1], if dim == 3 { v[2] } else { 0.0 }]);
                }
            }
            "bc" => {
                d.bc = match rest {
                    ["dirichlet"] => BoundaryCondition::Dirichlet,
                    ["neumann"] => BoundaryCondition::Neumann,
                    _ => return Err(parse_err(no, "bc must be `dirichlet` or `neumann`")),
                }
            }
            "orientation" => {
                d.orientation = Some(match rest {
                    ["+1"] | ["1"] => Orientation::Positive,
                    ["-1"] => Orientation::Negative,
                    _ => return Err(parse_err(no, "orientation must be +1 or -1")),
                })
            }
            "corners" => d.corners = reals(no, rest)?,
            "end" => {
                let d = draft.take().expect("inside patch");
                patches.push(d.finish(no)?);
            }
            other => return Err(parse_err(no, format!("unknown key `{other}`"))),
        }
    }
    if let Some(d) = draft {
        return Err(parse_err(d.start, "patch is missing its `end`"));
    }
    if patches.is_empty() {
        return Err(parse_err(0, "no patches"));
    }
    Ok(patches)
}

pub fn load_geometry(path: &Path) -> Result<Vec<NurbsPatch<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_geometry(&text)
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Serialises patches; reals use the shortest round-trip representation.
pub fn write_geometry(patches: &[NurbsPatch<f64>]) -> String {
    let mut out = String::new();
    for p in patches {
        let pdim = p.param_dim();
        let dim = p.dim();
        out.push_str("patch\n");
        let _ = writeln!(out, "dim {dim}");
        let _ = writeln!(out, "pdim {pdim}");
        let degrees: Vec<String> = p.knot_vectors().iter().map(|k| k.degree().to_string()).collect();
        let _ = writeln!(
            out,
            "{} {}",
            if pdim == 1 { "degree" } else { "degrees" },
            degrees.join(" ")
        );
        for kv in p.knot_vectors() {
            let _ = writeln!(out, "knots {}", join(kv.knots().iter().copied()));
        }
        let cps = p.control_points();
        let _ = writeln!(out, "weights {}", join(cps.iter().map(|c| c.weight)));
        let _ = writeln!(out, "control_points {}", cps.len());
        for c in cps {
            let x: Vec<f64> = (0..dim).map(|i| c.weighted[i] / c.weight).collect();
            let _ = writeln!(out, "{}", join(x));
        }
        let bc = match p.boundary_condition() {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        };
        let _ = writeln!(out, "bc {bc}");
        let sign = match p.orientation() {
            Orientation::Positive => "+1",
            Orientation::Negative => "-1",
        };
        let _ = writeln!(out, "orientation {sign}");
        if !p.flagged_corners().is_empty() {
            let _ = writeln!(out, "corners {}", join(p.flagged_corners().iter().copied()));
        }
        out.push_str("end\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use isonystrom::shapes;

    #[test]
    fn round_trip_circle_and_torus() {
        let patches = vec![shapes::circle([0.0, 0.0], 1.0), shapes::torus(0.9, 0.2)];
        let text = write_geometry(&patches);
        let back = parse_geometry(&text).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in patches.iter().zip(&back) {
            assert_eq!(a.knot_vectors(), b.knot_vectors());
            for (p, q) in a.control_points().iter().zip(b.control_points()) {
                assert!((p.weight - q.weight).abs() < 1e-15);
                for i in 0..3 {
                    assert!((p.weighted[i] - q.weighted[i]).abs() < 1e-15);
                }
            }
        }
        assert_eq!(write_geometry(&back), text);
    }

    #[test]
    fn rejects_bad_input() {
        let good = write_geometry(&[shapes::circle([0.0, 0.0], 1.0)]);
        let bad_knots = good.replace("knots 0 0 0 1 1", "knots 0 0 0 1 0.5");
        let err = parse_geometry(&bad_knots).unwrap_err().to_string();
        assert!(err.contains("line 5"), "{err}");
        assert!(parse_geometry(&good.replace("bc dirichlet", "bc robin")).is_err());
        assert!(parse_geometry(&good.replace("end\n", "")).is_err());
        assert!(parse_geometry(&good.replace("dim 2", "dim 2\ncolour red")).is_err());
        assert!(parse_geometry("").is_err());
        let negative_weight = good.replacen("weights 1", "weights -1", 1);
        assert!(parse_geometry(&negative_weight).is_err());
    }
}
