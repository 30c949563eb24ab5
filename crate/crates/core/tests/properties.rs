use approx::assert_abs_diff_eq;
use isonystrom::bezier::bernstein_tensor;
use isonystrom::geometry::shapes;
use isonystrom::partition::{box_of_nodes, node_matrix};
use isonystrom::*;
use proptest::prelude::*;

/// Open knot vector with random interior knots (some repeated).
fn knot_vector() -> impl Strategy<Value = KnotVector<f64>> {
    (0usize..=6, prop::collection::vec(0.01f64..0.99, 0..7), any::<bool>()).prop_map(|(p, mut inner, dup)| {
        inner.sort_by(f64::total_cmp);
        if dup && !inner.is_empty() && p > 0 {
            let v = inner[0];
            inner.push(v);
            inner.sort_by(f64::total_cmp);
        }
        let mut k = vec![0.0; p + 1];
        k.extend(inner);
        k.extend(vec![1.0; p + 1]);
        KnotVector::new(k, p).unwrap()
    })
}

proptest! {
    #[test]
    fn basis_sums_to_one(kv in knot_vector(), u in 0.0f64..=1.0) {
        let all = kv.eval_all(u).unwrap();
        prop_assert!((all.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(all.iter().all(|&v| v >= -1e-15));
        let span = kv.eval_basis(u).unwrap();
        prop_assert!((span.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn basis_derivatives_match_differences(kv in knot_vector(), u in 0.05f64..0.95) {
        // stay away from knots so the central difference sees one polynomial piece
        let h = 1e-6;
        prop_assume!(kv.knots().iter().all(|k| (k - u).abs() > 2.0 * h));
        let (_, d) = kv.eval_all_derivatives(u).unwrap();
        let up = kv.eval_all(u + h).unwrap();
        let dn = kv.eval_all(u - h).unwrap();
        for i in 0..d.len() {
            let fd = (up[i] - dn[i]) / (2.0 * h);
            prop_assert!((fd - d[i]).abs() <= 1e-6 * (1.0 + d[i].abs()), "i={} fd={} d={}", i, fd, d[i]);
        }
    }

    #[test]
    fn derivatives_sum_to_zero(kv in knot_vector(), u in 0.0f64..=1.0) {
        let (_, d) = kv.eval_all_derivatives(u).unwrap();
        prop_assert!(d.iter().sum::<f64>().abs() <= 1e-9 * (1.0 + d.iter().map(|x| x.abs()).sum::<f64>()));
    }

    #[test]
    fn leaves_tile_the_domain(
        refinements in 0usize..3,
        points in prop::collection::vec((0.0f64..=4.0, 0.0f64..=4.0, 1usize..4), 0..4),
    ) {
        let patch = shapes::torus(0.9, 0.2);
        let mut part = ElementPartition::new(&patch);
        for _ in 0..refinements {
            part.refine_uniform().unwrap();
        }
        for (u, v, level) in points {
            // misplaced points are rejected and leave the partition unchanged
            let _ = part.add_refinement_point(RefinementPoint { coords: [u, v], level });
        }
        let leaves = part.leaves(0);
        let area: f64 = leaves.iter().map(|l| l.bbox.measure(2)).sum();
        prop_assert!((area - 16.0).abs() <= 1e-12);
        for l in &leaves {
            // the accumulated transform maps the element onto the leaf box
            let elements = part.global_elements();
            let e = &elements[l.element];
            let mapped = l.transform.apply_box(e);
            for k in 0..2 {
                prop_assert!((mapped.lo[k] - l.bbox.lo[k]).abs() <= 1e-12);
                prop_assert!((mapped.hi[k] - l.bbox.hi[k]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn transforms_compose(
        s1 in (0.1f64..2.0, 0.1f64..2.0), t1 in (-1.0f64..1.0, -1.0f64..1.0),
        s2 in (0.1f64..2.0, 0.1f64..2.0), t2 in (-1.0f64..1.0, -1.0f64..1.0),
        p in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        let a = Transform::scale_translate([s1.0, s1.1], [t1.0, t1.1]);
        let b = Transform::scale_translate([s2.0, s2.1], [t2.0, t2.1]);
        let p = [p.0, p.1];
        let both = a.compose(&b).apply(p);
        let seq = a.apply(b.apply(p));
        prop_assert!((both[0] - seq[0]).abs() <= 1e-12 && (both[1] - seq[1]).abs() <= 1e-12);
        let bx = ParamBox::new([p[0], p[1]], [p[0] + 1.0, p[1] + 0.5]);
        let via_nodes = box_of_nodes(&a.apply_nodes(&node_matrix(&bx)));
        let direct = a.apply_box(&bx);
        for k in 0..2 {
            prop_assert!((via_nodes.lo[k] - direct.lo[k]).abs() <= 1e-12);
            prop_assert!((via_nodes.hi[k] - direct.hi[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn bezier_reproduces_polynomials(n in 1usize..8, coeffs in prop::collection::vec(-2.0f64..2.0, 8)) {
        // polynomial of degree n-1 in the reference coordinate
        let poly = |x: f64| coeffs[..n].iter().rev().fold(0.0, |acc, c| acc * x + c);
        let patch = shapes::circle([0.0, 0.0], 1.0);
        let mut part = ElementPartition::new(&patch);
        part.refine_uniform().unwrap();
        let rule = gauss_legendre(n).unwrap();
        let pts = distribute_points(std::slice::from_ref(&patch), std::slice::from_ref(&part), &rule).unwrap();
        let data: Vec<f64> = pts.points.iter().map(|p| poly(p.xi[0])).collect();
        let interp = interpolate_results(&pts, &data).unwrap();
        for leaf in 0..pts.leaves.len() {
            for &x in &[-1.0, -0.6, 0.1, 0.77, 1.0] {
                let v = interp.eval(leaf, [x, 0.0]).unwrap();
                prop_assert!((v - poly(x)).abs() <= 1e-11, "leaf {} x {} got {} want {}", leaf, x, v, poly(x));
            }
        }
        prop_assert!(interp.residual <= 1e-11);
    }
}

#[test]
fn nurbs_derivatives_match_differences() {
    let h = 1e-6;
    let circle = shapes::circle([0.3, -0.2], 1.7);
    for &u in &[0.1, 0.5, 1.3, 2.7, 3.9] {
        let d = circle.eval_curve_jacobian(u).unwrap();
        let p = circle.eval_curve(u + h).unwrap();
        let m = circle.eval_curve(u - h).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(d[k], (p[k] - m[k]) / (2.0 * h), epsilon = 1e-6);
        }
    }
    let torus = shapes::torus(0.9, 0.2);
    for &u in &[[0.2, 0.7], [1.5, 3.3], [3.9, 2.1]] {
        let j = torus.eval_surface_jacobian(u).unwrap();
        for dir in 0..2 {
            let mut a = u;
            let mut b = u;
            a[dir] += h;
            b[dir] -= h;
            let pa = torus.eval_surface(a).unwrap();
            let pb = torus.eval_surface(b).unwrap();
            for k in 0..3 {
                assert_abs_diff_eq!(j[dir][k], (pa[k] - pb[k]) / (2.0 * h), epsilon = 1e-6);
            }
        }
    }
}

#[test]
fn torus_points_lie_on_the_surface() {
    let (r1, r2) = (0.9, 0.2);
    let torus = shapes::torus(r1, r2);
    for i in 0..=16 {
        for j in 0..=16 {
            let p = torus.eval_surface([i as f64 / 4.0, j as f64 / 4.0]).unwrap();
            let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let implicit = (rho - r1).powi(2) + p[2] * p[2] - r2 * r2;
            assert!(implicit.abs() <= 1e-10, "{implicit}");
        }
    }
}

#[test]
fn weights_measure_the_boundary() {
    let circle = shapes::circle([0.0, 0.0], 1.0);
    let mut part = ElementPartition::new(&circle);
    part.refine_uniform().unwrap();
    let rule = gauss_legendre(8).unwrap();
    let pts = distribute_points(std::slice::from_ref(&circle), std::slice::from_ref(&part), &rule).unwrap();
    assert_abs_diff_eq!(pts.total_weight(), 2.0 * std::f64::consts::PI, epsilon = 1e-10);
    assert!(pts.points.iter().all(|p| p.weight > 0.0));

    let (r1, r2) = (0.9, 0.2);
    let torus = shapes::torus(r1, r2);
    let mut part = ElementPartition::new(&torus);
    part.refine_uniform().unwrap();
    let rule = gauss_legendre(6).unwrap();
    let pts = distribute_points(std::slice::from_ref(&torus), std::slice::from_ref(&part), &rule).unwrap();
    let exact = 4.0 * std::f64::consts::PI.powi(2) * r1 * r2;
    assert_abs_diff_eq!(pts.total_weight(), exact, epsilon = 1e-6);
}

#[test]
fn bernstein_tensor_sums_to_one() {
    for degree in 0..8 {
        for &xi in &[[-1.0, -1.0], [0.3, -0.8], [1.0, 0.25]] {
            let s: f64 = bernstein_tensor(degree, xi, 2).iter().sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
        }
    }
}

#[test]
fn interpolant_hits_nodes_and_constants() {
    let patch = shapes::torus(0.9f64, 0.2);
    let part = ElementPartition::new(&patch);
    let rule = gauss_legendre(3).unwrap();
    let pts = distribute_points(std::slice::from_ref(&patch), std::slice::from_ref(&part), &rule).unwrap();
    let data: Vec<f64> = pts.points.iter().map(|p| p.position[0].sin() + p.position[2]).collect();
    let interp = interpolate_results(&pts, &data).unwrap();
    for (j, p) in pts.points.iter().enumerate() {
        assert_abs_diff_eq!(interp.eval(p.leaf, p.xi).unwrap(), data[j], epsilon = 1e-10);
    }
    let constant = interpolate_results(&pts, &vec![2.5; pts.len()]).unwrap();
    for c in constant.coefficients.iter().flatten() {
        assert_abs_diff_eq!(*c, 2.5, epsilon = 1e-12);
    }
}
