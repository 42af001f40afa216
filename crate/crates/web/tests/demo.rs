use qgraph_web::demo::{alpha_bounds, alpha_curve, loop_spectrum, reality_map};

#[test]
fn spectrum_is_flat_pairs_with_doublet() {
    let s = loop_spectrum(2, 1, 0.3, 0.1, 0.2).unwrap();
    assert_eq!(s.len(), 12);
    let twos = s.chunks(2).filter(|p| (p[0] - 2.0).abs() < 1e-9 && p[1].abs() < 1e-9).count();
    assert_eq!(twos, 2);
}

#[test]
fn spectrum_rejects_bad_size() {
    assert!(loop_spectrum(1, 1, 0.0, 0.0, 0.0).is_err());
}

#[test]
fn reality_map_orientation_and_boundary() {
    let steps = 41;
    let extent = 1.3;
    let map = reality_map(2, 1, 0.0, extent, steps).unwrap();
    assert_eq!(map.len(), steps * steps);
    let at = |row: usize, col: usize| map[row * steps + col];
    let centre = steps / 2;
    assert_eq!(at(centre, centre), 0.0);
    // Top row is delta = extent, outside |delta| < sqrt(5)/4.
    assert!(at(0, centre) > 0.0);
    // gamma = 1.105 is inside, gamma = 1.17 outside along delta = 0.
    let col = |gamma: f64| ((gamma + extent) / (2.0 * extent) * (steps - 1) as f64).round() as usize;
    assert_eq!(at(centre, col(1.105)), 0.0);
    assert!(at(centre, col(1.17)) > 0.0);
}

#[test]
fn alpha_curve_changes_sign_at_bounds() {
    let (g, z) = (0.4, -0.3);
    let bounds = alpha_bounds(g).unwrap();
    assert!((bounds[0] + 0.5).abs() < 1e-15);
    assert!((bounds[1] - 1.4 / 1.2).abs() < 1e-12);
    let curve = alpha_curve(g, z, -1.0, 2.0, 301).unwrap();
    for (i, m) in curve.iter().enumerate() {
        let alpha = -1.0 + 3.0 * i as f64 / 300.0;
        if alpha > bounds[0] + 1e-6 && alpha < bounds[1] - 1e-6 {
            assert!(*m > 0.0, "alpha {alpha}: {m}");
        } else if alpha < bounds[0] - 1e-6 || alpha > bounds[1] + 1e-6 {
            assert!(*m < 0.0, "alpha {alpha}: {m}");
        }
    }
}

#[test]
fn inputs_are_bounded() {
    assert!(reality_map(2, 1, 0.0, 1.0, 10_000).is_err());
    assert!(alpha_curve(0.0, 0.0, 1.0, 0.0, 10).is_err());
    assert!(alpha_bounds(1.0).is_err());
}
