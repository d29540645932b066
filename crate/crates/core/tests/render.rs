use num_complex::Complex64;

use netmap_core::network::{build_model, iterate_escape, ModelKind, Mode, NodeValues, StateVector, WeightMatrix};
use netmap_core::render::{
    extract_boundary, render_equi_m, render_multi_j_real, render_multi_m_real, render_uni_j, BinaryGrid, Box3D,
    Field2D, Window2D,
};

fn three(kind: ModelKind) -> WeightMatrix {
    build_model(&kind, 3).unwrap()
}

fn scenes() -> Vec<(&'static str, WeightMatrix)> {
    vec![
        ("simple-dual", three(ModelKind::SimpleDual { a: -2.0 / 3.0 })),
        ("self-drive", three(ModelKind::SelfDrive { a: -2.0 / 3.0, b: 1.0 / 3.0 })),
        ("feedback", three(ModelKind::Feedback { a: -2.0 / 3.0, b: 1.0 / 3.0, f: -1.0 })),
    ]
}

fn equi(n: usize, c: Complex64) -> NodeValues {
    NodeValues::Complex(vec![c; n])
}

fn check_pixels(field: &Field2D, w: &WeightMatrix, seed: impl Fn(Complex64) -> (NodeValues, StateVector)) {
    let win = &field.window;
    for j in (0..win.ny).step_by(7) {
        for i in (0..win.nx).step_by(5) {
            let (c, z0) = seed(win.point(i, j));
            let fresh = iterate_escape(w, &c, &z0, field.budget, field.radius).unwrap();
            assert_eq!(field.pixel_statuses(j * win.nx + i), &fresh.statuses[..], "pixel ({i}, {j})");
        }
    }
}

#[test]
fn stored_verdicts_match_fresh_iteration() {
    for (_, w) in scenes() {
        let field = render_equi_m(&w, &Window2D::equi_m_default(61, 53), 100, 10.0).unwrap();
        check_pixels(&field, &w, |p| (equi(3, p), StateVector::origin(Mode::Complex, 3)));

        let c = NodeValues::Complex(vec![Complex64::new(-0.75, 0.0), Complex64::new(-0.117, -0.76), Complex64::new(0.25, 0.0)]);
        let field = render_uni_j(&w, &c, &Window2D::uni_j_default(47, 59), 100, 10.0).unwrap();
        check_pixels(&field, &w, |p| (c.clone(), StateVector::new(equi(3, p))));
    }

    let w = three(ModelKind::SelfDrive { a: 0.5, b: 1.0 });
    let bbox = Box3D::default_real(12);
    let field = render_multi_m_real(&w, &bbox, 50, 10.0).unwrap();
    let times = field.escape_times();
    let [nx, ny, _] = bbox.counts;
    for (idx, time) in times.iter().enumerate() {
        let cell = [idx % nx, (idx / nx) % ny, idx / (nx * ny)];
        let [x, y, z] = bbox.point(cell);
        let fresh = iterate_escape(&w, &NodeValues::Real(vec![x, y, z]), &StateVector::origin(Mode::Real, 3), 50, 10.0)
            .unwrap();
        assert_eq!(field.is_occupied(cell), fresh.all_in_set());
        assert_eq!(*time, fresh.first_escape());
    }
}

#[test]
fn intersection_is_the_and_of_node_layers() {
    for (_, w) in scenes() {
        let field = render_equi_m(&w, &Window2D::equi_m_default(90, 90), 100, 10.0).unwrap();
        let layers: Vec<BinaryGrid> = (0..3).map(|k| field.node_layer(k)).collect();
        let meet = field.intersection();
        for idx in 0..meet.len() {
            assert_eq!(meet.cells()[idx], layers.iter().all(|l| l.cells()[idx]));
        }
    }
}

#[test]
fn fields_are_mirror_symmetric_about_the_real_axis() {
    for (_, w) in scenes() {
        let field = render_equi_m(&w, &Window2D::new(-2.0, 1.0, -1.3, 1.3, 80, 66).unwrap(), 100, 10.0).unwrap();
        let c = equi(3, Complex64::new(-0.63, 0.0));
        let julia = render_uni_j(&w, &c, &Window2D::uni_j_default(64, 64), 100, 10.0).unwrap();
        for f in [field, julia] {
            let (nx, ny) = (f.window.nx, f.window.ny);
            for k in 0..3 {
                let times = f.node_escape_times(k);
                for j in 0..ny {
                    for i in 0..nx {
                        assert_eq!(times[j * nx + i], times[(ny - 1 - j) * nx + i]);
                    }
                }
            }
        }
    }
}

#[test]
fn longer_budgets_only_remove_cells() {
    for (_, w) in scenes() {
        let window = Window2D::equi_m_default(100, 100);
        let short = render_equi_m(&w, &window, 50, 10.0).unwrap();
        let long = render_equi_m(&w, &window, 100, 10.0).unwrap();
        for k in 0..3 {
            let (s, l) = (short.node_escape_times(k), long.node_escape_times(k));
            for (a, b) in s.iter().zip(&l) {
                match a {
                    Some(t) => assert_eq!(b, &Some(*t)),
                    None => assert!(b.is_none_or(|t| t > 50)),
                }
            }
        }
    }
}

fn coarsen(fine: &BinaryGrid) -> BinaryGrid {
    let [nx, ny, _] = fine.dims();
    let mut out = BinaryGrid::empty_2d(nx / 2, ny / 2);
    for j in 0..ny / 2 {
        for i in 0..nx / 2 {
            let votes = [(0, 0), (1, 0), (0, 1), (1, 1)]
                .iter()
                .filter(|&&(di, dj)| fine.get(2 * i + di, 2 * j + dj, 0))
                .count();
            out.set(i, j, 0, votes >= 2);
        }
    }
    out
}

fn mismatch(a: &BinaryGrid, b: &BinaryGrid) -> f64 {
    let diff = a.cells().iter().zip(b.cells()).filter(|(x, y)| x != y).count();
    diff as f64 / a.len() as f64
}

#[test]
fn halving_the_resolution_changes_few_cells() {
    for (name, w) in scenes() {
        let fine = render_equi_m(&w, &Window2D::equi_m_default(300, 300), 100, 10.0).unwrap();
        let coarse = render_equi_m(&w, &Window2D::equi_m_default(150, 150), 100, 10.0).unwrap();
        let share = mismatch(&coarsen(&fine.intersection()), &coarse.intersection());
        assert!(share < 0.02, "{name}: {share}");
    }
    let w = three(ModelKind::SelfDrive { a: -2.0 / 3.0, b: -1.0 / 3.0 });
    let c = equi(3, Complex64::new(-0.11, 0.66));
    let fine = render_uni_j(&w, &c, &Window2D::uni_j_default(300, 300), 100, 10.0).unwrap();
    let coarse = render_uni_j(&w, &c, &Window2D::uni_j_default(150, 150), 100, 10.0).unwrap();
    let share = mismatch(&coarsen(&fine.intersection()), &coarse.intersection());
    assert!(share < 0.02, "uni-j: {share}");
}

/// Filled Julia set of `z^2 + c`, written without the network code.
fn classical_julia(window: &Window2D, c: Complex64, budget: u32, radius: f64) -> Vec<bool> {
    let mut out = Vec::with_capacity(window.pixel_count());
    for j in 0..window.ny {
        for i in 0..window.nx {
            let mut z = window.point(i, j);
            let mut bounded = z.norm() <= radius;
            for _ in 0..budget {
                if !bounded {
                    break;
                }
                z = z * z + c;
                bounded = z.norm() <= radius;
            }
            out.push(bounded);
        }
    }
    out
}

#[test]
fn decoupled_uni_j_matches_the_classical_julia_set() {
    let w = three(ModelKind::SelfDrive { a: 0.0, b: -1.0 });
    let window = Window2D::uni_j_default(160, 160);
    for c in [Complex64::new(-1.0, 0.0), Complex64::new(-0.15, 0.75), Complex64::new(0.25, 0.0)] {
        let field = render_uni_j(&w, &equi(3, c), &window, 100, 10.0).unwrap();
        let reference = classical_julia(&window, c, 100, 10.0);
        let diff = field.intersection().cells().iter().zip(&reference).filter(|(a, b)| a != b).count();
        assert!(diff as f64 <= 0.001 * reference.len() as f64, "c = {c}: {diff} cells differ");
    }
}

#[test]
fn mixed_parameter_julia_set_is_not_empty() {
    let c = NodeValues::Complex(vec![Complex64::new(-0.75, 0.0), Complex64::new(-0.117, -0.76), Complex64::new(-0.62, -0.432)]);
    for a in [0.0, 0.1, 0.15] {
        let w = three(ModelKind::SelfDrive { a, b: -1.0 });
        let field = render_uni_j(&w, &c, &Window2D::uni_j_default(200, 200), 100, 10.0).unwrap();
        assert!(field.intersection().count() > 0, "a = {a}");
    }
}

#[test]
fn seeds_beyond_the_radius_escape_immediately() {
    let w = three(ModelKind::Feedback { a: 0.3, b: -0.2, f: 0.5 });
    let window = Window2D::new(10.5, 12.0, -1.0, 1.0, 8, 8).unwrap();
    let field = render_uni_j(&w, &equi(3, Complex64::new(-1.0, 0.0)), &window, 100, 10.0).unwrap();
    for k in 0..3 {
        assert!(field.node_escape_times(k).iter().all(|t| *t == Some(0)));
    }
}

#[test]
fn decoupled_multi_m_is_a_product_of_intervals() {
    let w = WeightMatrix::identity(3).unwrap();
    let bbox = Box3D::default_real(20);
    let field = render_multi_m_real(&w, &bbox, 50, 10.0).unwrap();
    let escapes = |c: f64| {
        let mut x = 0.0f64;
        for _ in 0..50 {
            x = x * x + c;
            if x.abs() > 10.0 {
                return true;
            }
        }
        false
    };
    for k in 0..20 {
        for j in 0..20 {
            for i in 0..20 {
                let [x, y, z] = bbox.point([i, j, k]);
                let expected = !escapes(x) && !escapes(y) && !escapes(z);
                assert_eq!(field.is_occupied([i, j, k]), expected, "({x}, {y}, {z})");
            }
        }
    }
    let origin = Box3D::new([-0.3; 3], [0.3; 3], [3, 3, 3]).unwrap();
    assert_eq!(origin.point([1, 1, 1]), [0.0; 3]);
    for (_, w) in scenes() {
        assert!(render_multi_m_real(&w, &origin, 50, 10.0).unwrap().is_occupied([1, 1, 1]));
    }
    let half = Box3D::new([0.4; 3], [0.6; 3], [3, 3, 3]).unwrap();
    assert!((half.point([1, 1, 1])[0] - 0.5).abs() < 1e-12);
    assert!(!render_multi_m_real(&w, &half, 50, 10.0).unwrap().is_occupied([1, 1, 1]));
}

#[test]
fn real_sets_reject_other_node_counts() {
    let w = WeightMatrix::identity(4).unwrap();
    assert!(render_multi_m_real(&w, &Box3D::default_real(4), 50, 10.0).is_err());
    let c = NodeValues::Real(vec![0.0; 4]);
    assert!(render_multi_j_real(&w, &c, &Box3D::default_real(4), 50, 10.0).is_err());
}

#[test]
fn boundary_of_simple_grids() {
    let full = BinaryGrid::new_2d(5, 4, vec![true; 20]).unwrap();
    let frame = extract_boundary(&full);
    for j in 0..4 {
        for i in 0..5 {
            assert_eq!(frame.get(i, j, 0), i == 0 || j == 0 || i == 4 || j == 3);
        }
    }
    assert_eq!(extract_boundary(&BinaryGrid::empty_3d(3, 3, 3)).count(), 0);
    let mut dot = BinaryGrid::empty_3d(3, 3, 3);
    dot.set(1, 1, 1, true);
    assert_eq!(extract_boundary(&dot), dot);
}
