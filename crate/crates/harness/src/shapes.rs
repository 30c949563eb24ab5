//! Test geometries for the convergence studies.

use isonystrom::{shapes, KnotVector, NurbsPatch, Result};
use std::f64::consts::PI;

/// Smooth closed "flower": uniform periodic quartic B-spline through a ring
/// of `count` control points at radius `scale · (1 + amplitude · cos(lobes θ))`.
/// The parameter domain is `[4, count + 4]`, one knot span per control point.
pub fn flower(scale: f64, amplitude: f64, lobes: usize, count: usize) -> Result<NurbsPatch<f64>> {
    const P: usize = 4;
    let mut pts: Vec<[f64; 2]> = (0..count)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / count as f64;
            let r = scale * (1.0 + amplitude * (lobes as f64 * t).cos());
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let wrap: Vec<[f64; 2]> = pts[..P].to_vec();
    pts.extend(wrap);
    let knots: Vec<f64> = (0..pts.len() + P + 1).map(|i| i as f64).collect();
    let weights = vec![1.0; pts.len()];
    NurbsPatch::curve(KnotVector::new(knots, P)?, &pts, &weights)
}

/// The flower used by the shipped 2D studies: 20 control points, five
/// lobes, mean radius one half.
pub fn default_flower() -> NurbsPatch<f64> {
    flower(0.5, 0.2, 5, 20).expect("valid flower")
}

fn teardrop_point(t: f64) -> [f64; 2] {
    [2.0 * (t / 2.0).sin(), -t.sin()]
}

fn teardrop_d1(t: f64) -> [f64; 2] {
    [(t / 2.0).cos(), -t.cos()]
}

fn teardrop_d2(t: f64) -> [f64; 2] {
    [-0.5 * (t / 2.0).sin(), t.sin()]
}

/// Quartic fit of one half of the teardrop `(2 sin(t/2), −sin t)` with `k`
/// uniform elements, `t` running linearly from `t0` to `t1` as `u` goes from
/// 0 to 1. The point and first two derivatives at `u = 0` (smooth joint)
/// and the point and tangent at `u = 1` (tip) are matched exactly.
fn teardrop_half(k: usize, t0: f64, t1: f64) -> Result<Vec<[f64; 2]>> {
    const P: usize = 4;
    let mut knots = vec![0.0; P + 1];
    knots.extend((1..k).map(|i| i as f64 / k as f64));
    knots.extend(vec![1.0; P + 1]);
    let kv = KnotVector::new(knots, P)?;
    let ncp = k + P;
    let speed = t1 - t0;
    let kf = k as f64;
    let pf = P as f64;
    let c = |u: f64| teardrop_point(t0 + speed * u);
    let d1 = |u: f64| {
        let d = teardrop_d1(t0 + speed * u);
        [d[0] * speed, d[1] * speed]
    };
    let d2 = teardrop_d2(t0);
    let d2 = [d2[0] * speed * speed, d2[1] * speed * speed];
    let mut cp = vec![[0.0; 2]; ncp];
    cp[0] = c(0.0);
    let a = d1(0.0);
    for j in 0..2 {
        cp[1][j] = cp[0][j] + a[j] / (pf * kf);
        cp[2][j] = cp[1][j] + 2.0 * (d2[j] / (pf * (pf - 1.0) * kf * kf) + (cp[1][j] - cp[0][j]));
    }
    cp[ncp - 1] = c(1.0);
    let b = d1(1.0);
    for j in 0..2 {
        cp[ncp - 2][j] = cp[ncp - 1][j] - b[j] / (pf * kf);
    }
    // least squares for the free control points 3..ncp-3
    let free: Vec<usize> = (3..ncp - 2).collect();
    if !free.is_empty() {
        let samples = 40 * k;
        let mut rows = Vec::with_capacity(samples);
        let mut rhs = [Vec::with_capacity(samples), Vec::with_capacity(samples)];
        for s in 1..samples {
            let u = s as f64 / samples as f64;
            let basis = kv.eval_all(u)?;
            let target = c(u);
            let mut fixed = [0.0; 2];
            for (i, bi) in basis.iter().enumerate() {
                if !free.contains(&i) {
                    fixed[0] += bi * cp[i][0];
                    fixed[1] += bi * cp[i][1];
                }
            }
            rows.push(free.iter().map(|&i| basis[i]).collect::<Vec<f64>>());
            rhs[0].push(target[0] - fixed[0]);
            rhs[1].push(target[1] - fixed[1]);
        }
        let a = isonystrom::DenseMatrix::from_rows(&rows)?;
        for (j, r) in rhs.iter().enumerate() {
            let x = isonystrom::linalg::least_squares(&a, r)?;
            for (&i, v) in free.iter().zip(x) {
                cp[i][j] = v;
            }
        }
    }
    Ok(cp)
}

/// Teardrop with a 90° corner at the origin as one quartic patch over
/// `[0, 2]`: the tip sits at `u = 1` (a knot of multiplicity 4), the smooth
/// joint at `u = 0 ≡ 2` is the point `(2, 0)`. Counterclockwise, `k`
/// elements per half.
pub fn teardrop(k: usize) -> Result<NurbsPatch<f64>> {
    const P: usize = 4;
    // first half: from (2,0) over the upper arc to the tip
    let upper = teardrop_half(k, PI, 2.0 * PI)?;
    // second half: from the tip along the lower arc back to (2,0), fitted
    // from the joint side and reversed
    let mut lower = teardrop_half(k, PI, 0.0)?;
    lower.reverse();
    let mut pts = upper;
    pts.extend_from_slice(&lower[1..]);
    let mut knots = vec![0.0; P + 1];
    knots.extend((1..k).map(|i| i as f64 / k as f64));
    knots.extend(vec![1.0; P]);
    knots.extend((1..k).map(|i| 1.0 + i as f64 / k as f64));
    knots.extend(vec![2.0; P + 1]);
    let weights = vec![1.0; pts.len()];
    NurbsPatch::curve(KnotVector::new(knots, P)?, &pts, &weights)
}

pub fn default_teardrop() -> NurbsPatch<f64> {
    teardrop(4).expect("valid teardrop")
}

/// Torus of the 3D study.
pub fn default_torus() -> NurbsPatch<f64> {
    shapes::torus(0.9, 0.2)
}
