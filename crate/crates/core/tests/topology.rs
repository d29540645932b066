use num_complex::Complex64;

use netmap_core::network::{build_model, ModelKind, NodeValues, SplitMix64};
use netmap_core::render::{render_uni_j, BinaryGrid, Window2D};
use netmap_core::topology::{
    box_counting_dim, default_scales, equality_relation, label_components, subset_relation, Connectivity,
};

fn random_grid(rng: &mut SplitMix64, dims: [usize; 3], density: u64) -> BinaryGrid {
    let cells = (0..dims[0] * dims[1] * dims[2]).map(|_| rng.below(100) < density).collect();
    if dims[2] == 1 {
        BinaryGrid::new_2d(dims[0], dims[1], cells).unwrap()
    } else {
        BinaryGrid::new_3d(dims[0], dims[1], dims[2], cells).unwrap()
    }
}

fn neighbours(connectivity: Connectivity) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for dz in -1i64..=1 {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let steps = dx.abs() + dy.abs() + dz.abs();
                let keep = match connectivity {
                    Connectivity::Four => dz == 0 && steps == 1,
                    Connectivity::Eight => dz == 0 && steps >= 1,
                    Connectivity::Six => steps == 1,
                    Connectivity::TwentySix => steps >= 1,
                };
                if keep {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

fn fill(grid: &BinaryGrid, seen: &mut [bool], at: [usize; 3], offsets: &[[i64; 3]]) {
    let idx = grid.index(at[0], at[1], at[2]);
    if seen[idx] || !grid.cells()[idx] {
        return;
    }
    seen[idx] = true;
    let dims = grid.dims();
    for d in offsets {
        let next: Vec<i64> = (0..3).map(|a| at[a] as i64 + d[a]).collect();
        if (0..3).all(|a| next[a] >= 0 && (next[a] as usize) < dims[a]) {
            fill(grid, seen, [next[0] as usize, next[1] as usize, next[2] as usize], offsets);
        }
    }
}

/// Component count by recursive flood fill.
fn flood_count(grid: &BinaryGrid, connectivity: Connectivity) -> usize {
    let offsets = neighbours(connectivity);
    let mut seen = vec![false; grid.len()];
    let mut count = 0;
    for idx in 0..grid.len() {
        if grid.cells()[idx] && !seen[idx] {
            count += 1;
            fill(grid, &mut seen, grid.coords(idx), &offsets);
        }
    }
    count
}

#[test]
fn labeling_matches_flood_fill() {
    let mut rng = SplitMix64::new(99);
    for round in 0..1000 {
        let grid = random_grid(&mut rng, [16, 16, 1], 30 + (round % 40) as u64);
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let labels = label_components(&grid, conn).unwrap();
            assert_eq!(labels.component_count, flood_count(&grid, conn), "round {round}");
            assert_eq!(labels.sizes().iter().sum::<usize>(), grid.count());
        }
    }
    for round in 0..100 {
        let grid = random_grid(&mut rng, [8, 7, 6], 20 + (round % 30) as u64);
        for conn in [Connectivity::Six, Connectivity::TwentySix] {
            assert_eq!(label_components(&grid, conn).unwrap().component_count, flood_count(&grid, conn));
        }
    }
}

#[test]
fn labels_are_shared_by_neighbours() {
    let mut rng = SplitMix64::new(5);
    let grid = random_grid(&mut rng, [32, 32, 1], 45);
    let labels = label_components(&grid, Connectivity::Eight).unwrap();
    for j in 0..32 {
        for i in 0..32 {
            let here = labels.labels[grid.index(i, j, 0)];
            assert_eq!(here > 0, grid.get(i, j, 0));
            if here == 0 {
                continue;
            }
            for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
                if i + di < 32 && j + dj < 32 && grid.get(i + di, j + dj, 0) {
                    assert_eq!(labels.labels[grid.index(i + di, j + dj, 0)], here);
                }
            }
            if i > 0 && j + 1 < 32 && grid.get(i - 1, j + 1, 0) {
                assert_eq!(labels.labels[grid.index(i - 1, j + 1, 0)], here);
            }
        }
    }
}

fn transform(grid: &BinaryGrid, map: impl Fn(usize, usize) -> (usize, usize), nx: usize, ny: usize) -> BinaryGrid {
    let [sx, sy, _] = grid.dims();
    let mut out = BinaryGrid::empty_2d(nx, ny);
    for j in 0..sy {
        for i in 0..sx {
            let (x, y) = map(i, j);
            out.set(x, y, 0, grid.get(i, j, 0));
        }
    }
    out
}

#[test]
fn counts_survive_transposition_and_mirroring() {
    let mut rng = SplitMix64::new(11);
    for _ in 0..200 {
        let grid = random_grid(&mut rng, [20, 13, 1], 50);
        let variants = [
            transform(&grid, |i, j| (j, i), 13, 20),
            transform(&grid, |i, j| (19 - i, j), 20, 13),
            transform(&grid, |i, j| (i, 12 - j), 20, 13),
        ];
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let base = label_components(&grid, conn).unwrap().component_count;
            for v in &variants {
                assert_eq!(label_components(v, conn).unwrap().component_count, base);
            }
        }
    }
}

#[test]
fn equality_is_both_subsets() {
    let mut rng = SplitMix64::new(3);
    for round in 0..300 {
        let a = random_grid(&mut rng, [12, 12, 1], 60);
        let mut b = a.clone();
        for _ in 0..(round % 6) {
            let (i, j) = (rng.below(12) as usize, rng.below(12) as usize);
            b.set(i, j, 0, !b.get(i, j, 0));
        }
        let tolerance = [0.0, 0.001, 0.01, 0.05][round % 4];
        let eq = equality_relation(&a, &b, tolerance).unwrap();
        let ab = subset_relation(&a, &b, tolerance).unwrap();
        let ba = subset_relation(&b, &a, tolerance).unwrap();
        assert_eq!(eq.holds, ab.holds && ba.holds);
        assert_eq!(ab.holds, ab.violation_fraction <= tolerance);
    }
    let a = BinaryGrid::new_2d(2, 2, vec![true, false, false, false]).unwrap();
    assert!(subset_relation(&a, &BinaryGrid::empty_2d(3, 2), 0.0).is_err());
}

/// Pascal's triangle mod 2 on a 64 x 64 grid.
fn sierpinski() -> BinaryGrid {
    let mut grid = BinaryGrid::empty_2d(64, 64);
    for j in 0..64 {
        for i in 0..=j {
            if i & j == i {
                grid.set(i, j, 0, true);
            }
        }
    }
    grid
}

#[test]
fn two_disjoint_copies_keep_the_slope() {
    let one = sierpinski();
    let mut two = BinaryGrid::empty_2d(128, 64);
    for j in 0..64 {
        for i in 0..64 {
            if one.get(i, j, 0) {
                two.set(i, j, 0, true);
                two.set(i + 64, j, 0, true);
            }
        }
    }
    let single = box_counting_dim(&one, &default_scales(&one)).unwrap();
    let double = box_counting_dim(&two, &default_scales(&two)).unwrap();
    assert!((single.slope - double.slope).abs() < 0.05, "{} vs {}", single.slope, double.slope);
    assert!((single.slope - 3f64.log2()).abs() < 0.05, "{}", single.slope);
}

#[test]
fn labeling_does_not_depend_on_thread_count() {
    let w = build_model(&ModelKind::SelfDrive { a: -2.0 / 3.0, b: -1.0 / 3.0 }, 3).unwrap();
    let c = NodeValues::Complex(vec![Complex64::new(-0.63, 0.0); 3]);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let grid = render_uni_j(&w, &c, &Window2D::uni_j_default(160, 160), 100, 10.0)
                .unwrap()
                .intersection();
            label_components(&grid, Connectivity::Eight).unwrap()
        })
    };
    assert_eq!(run(1), run(4));
}
