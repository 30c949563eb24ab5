//! Regenerates the geometry files and run configurations in `data/`.
//!
//! Sources and evaluation points are placed automatically once and then
//! written out, so the shipped configs do not depend on the placement code.

use isonystrom_harness::geofile::write_geometry;
use isonystrom_harness::manufactured::placement;
use isonystrom_harness::{shapes, PointSpec, RunConfig};
use std::path::Path;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::create_dir_all(&dir)?;

    let geometries = [
        ("circle.geo", isonystrom::shapes::circle([0.0, 0.0], 1.0)),
        ("flower.geo", shapes::default_flower()),
        ("teardrop.geo", shapes::default_teardrop()),
        ("torus.geo", shapes::default_torus()),
    ];
    for (name, patch) in &geometries {
        std::fs::write(dir.join(name), write_geometry(std::slice::from_ref(patch)))?;
    }

    let flower = |extra: &str| format!("geometry = flower.geo\n{extra}");
    let teardrop = |extra: &str| format!("geometry = teardrop.geo\norder = 3\nsteps = 4\neta = 6\n{extra}");
    let torus_eval: Vec<String> = (0..4)
        .map(|k| {
            // close to the tube centre line, away from the surface
            let th = 0.3 + k as f64 * std::f64::consts::FRAC_PI_2;
            let a = 0.7 + 1.9 * k as f64;
            let r = 0.9 + 0.03 * a.cos();
            format!("{:.6} {:.6} {:.6}", r * th.cos(), r * th.sin(), 0.03 * a.sin())
        })
        .collect();
    let configs = [
        ("flower_dlp.cfg", flower("problem = laplace2d\nformulation = dlp\norder = 2\nsteps = 4\n")),
        (
            "flower_slp.cfg",
            flower("problem = laplace2d\nformulation = slp\norder = 2\nbase_refinements = 2\nsteps = 3\n"),
        ),
        (
            "flower_dlp_p.cfg",
            flower("problem = laplace2d\nformulation = dlp\nmode = p\norders = 2 3 4 5 6 7 8\n"),
        ),
        (
            "flower_direct.cfg",
            flower("problem = laplace2d\nformulation = direct\norder = 3\nsteps = 3\n"),
        ),
        (
            "flower_lame.cfg",
            flower("problem = lame2d\nformulation = dlp\norder = 3\nsteps = 3\nyoungs = 1e9\npoisson = 0.3\n"),
        ),
        (
            "flower_lame_full.cfg",
            flower("problem = lame2d\nformulation = dlp\norder = 3\nsteps = 4\nyoungs = 1e9\npoisson = 0.3\neta = 1e6\n"),
        ),
        ("teardrop_uniform.cfg", teardrop("problem = laplace2d\nformulation = dlp\n")),
        (
            "teardrop_graded.cfg",
            teardrop("problem = laplace2d\nformulation = dlp\ngrading = corners\ngrading_elements = 6\nholder = 1\n"),
        ),
        (
            "torus_dlp.cfg",
            format!(
                "problem = laplace3d\nformulation = dlp\ngeometry = torus.geo\norder = 2\nsteps = 2\neta = 3\n\
                 insert_knots = 0 0 0.5 1.5 2.5 3.5\neval_points = {}\n",
                torus_eval.join("; ")
            ),
        ),
    ];
    for (name, text) in &configs {
        let mut cfg = RunConfig::parse(text, &dir)?;
        let patches = isonystrom_harness::study::load_patches(&cfg)?;
        let (sources, strengths, evals) = placement(&cfg, &patches)?;
        cfg.sources = PointSpec::List(sources);
        cfg.source_strengths = strengths;
        cfg.eval_points = PointSpec::List(evals);
        std::fs::write(dir.join(name), cfg.to_text())?;
        println!("wrote {name}");
    }
    Ok(())
}
