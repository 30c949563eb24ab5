use isonystrom::{distribute_points, gauss_legendre, ElementPartition};
use isonystrom_harness::geofile::{load_geometry, parse_geometry, write_geometry};
use isonystrom_harness::study::{grading_targets, load_patches};
use isonystrom_harness::RunConfig;
use std::path::Path;

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn shipped_circle_has_unit_radius() {
    let patches = load_geometry(&data("circle.geo")).unwrap();
    let mut part = ElementPartition::new(&patches[0]);
    part.refine_uniform().unwrap();
    let pts = distribute_points(&patches, std::slice::from_ref(&part), &gauss_legendre(8).unwrap()).unwrap();
    approx::assert_abs_diff_eq!(pts.total_weight(), 2.0 * std::f64::consts::PI, epsilon = 1e-10);
}

#[test]
fn teardrop_corner_is_found_at_the_repeated_knot() {
    let patches = load_geometry(&data("teardrop.geo")).unwrap();
    let kv = &patches[0].knot_vectors()[0];
    let targets = grading_targets(&patches).unwrap();
    assert_eq!(targets.len(), 1);
    let (patch, u) = targets[0];
    assert_eq!(patch, 0);
    assert_eq!(kv.multiplicity(u), kv.degree());
}

#[test]
fn smooth_shapes_have_no_corners() {
    for name in ["circle.geo", "flower.geo"] {
        let patches = load_geometry(&data(name)).unwrap();
        assert!(grading_targets(&patches).unwrap().is_empty(), "{name}");
    }
}

#[test]
fn geometry_files_round_trip() {
    for name in ["circle.geo", "flower.geo", "teardrop.geo", "torus.geo"] {
        let text = std::fs::read_to_string(data(name)).unwrap();
        let patches = parse_geometry(&text).unwrap();
        assert_eq!(parse_geometry(&write_geometry(&patches)).unwrap(), patches, "{name}");
    }
}

#[test]
fn malformed_geometry_is_rejected() {
    let good = std::fs::read_to_string(data("circle.geo")).unwrap();
    let decreasing = good
        .lines()
        .map(|l| if l.starts_with("knots") { "knots 0 0 0 1 1 3 2 3 3 4 4 4" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    assert!(parse_geometry(&decreasing).is_err());
    let truncated: String = good.lines().filter(|l| *l != "end").collect::<Vec<_>>().join("\n");
    assert!(parse_geometry(&truncated).is_err());
    assert!(parse_geometry("").is_err());
}

#[test]
fn shipped_configs_load() {
    for entry in std::fs::read_dir(data("")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            let cfg = RunConfig::load(&path).unwrap();
            cfg.validate().unwrap();
            assert!(!load_patches(&cfg).unwrap().is_empty());
            let again = RunConfig::parse(&cfg.to_text(), path.parent().unwrap()).unwrap();
            assert_eq!(again, cfg, "{}", path.display());
        }
    }
}

#[test]
fn bad_config_values_are_rejected() {
    let dir = data("");
    assert!(RunConfig::parse("problem = helmholtz\n", &dir).is_err());
    assert!(RunConfig::parse("geometry = circle.geo\neta = -1\n", &dir)
        .and_then(|c| c.validate())
        .is_err());
    assert!(RunConfig::parse("geometry = circle.geo\nno_such_key = 1\n", &dir).is_err());
}
