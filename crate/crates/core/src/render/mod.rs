//! Escape-time sampling of the network sets over complex windows (equi-M and
//! uni-J slices) and real boxes (full multi-M and multi-J sets of 3-node
//! real networks).
//!
//! Every cell is sampled at its center and computed independently, so the
//! output does not depend on the number of worker threads.

mod grid;

pub use grid::BinaryGrid;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{
    check_budget, EscapeScanner, NodeStatus, NodeValues, WeightMatrix,
};

pub const DEFAULT_COMPLEX_BUDGET: u32 = 100;
pub const DEFAULT_REAL_BUDGET: u32 = 50;
pub const DEFAULT_RADIUS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window2D {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Window2D {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let w = Window2D {
            re_min,
            re_max,
            im_min,
            im_max,
            nx,
            ny,
        };
        w.validate()?;
        Ok(w)
    }

    /// `[-1.75, 1.25] x [-1.5, 1.5]`, the frame used for equi-M slices.
    pub fn equi_m_default(nx: usize, ny: usize) -> Self {
        Window2D {
            re_min: -1.75,
            re_max: 1.25,
            im_min: -1.5,
            im_max: 1.5,
            nx,
            ny,
        }
    }

    /// `[-1.6, 1.6]^2`.
    pub fn uni_j_default(nx: usize, ny: usize) -> Self {
        Window2D {
            re_min: -1.6,
            re_max: 1.6,
            im_min: -1.6,
            im_max: 1.6,
            nx,
            ny,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::domain(format!(
                "degenerate window [{}, {}] x [{}, {}]",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::domain(format!(
                "window resolution {}x{} is below 2x2",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    /// Center of pixel `(i, j)`; `j = 0` is the bottom row (`im_min`).
    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let dx = (self.re_max - self.re_min) / self.nx as f64;
        let dy = (self.im_max - self.im_min) / self.ny as f64;
        Complex64::new(
            self.re_min + (i as f64 + 0.5) * dx,
            self.im_min + (j as f64 + 0.5) * dy,
        )
    }

    pub fn pixel_count(&self) -> usize {
        self.nx * self.ny
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3D {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub counts: [usize; 3],
}

impl Box3D {
    pub fn new(min: [f64; 3], max: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        let b = Box3D { min, max, counts };
        b.validate()?;
        Ok(b)
    }

    /// `[-2, 2]^3` with `n` voxels per axis.
    pub fn default_real(n: usize) -> Self {
        Box3D {
            min: [-2.0; 3],
            max: [2.0; 3],
            counts: [n; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for axis in 0..3 {
            let (lo, hi) = (self.min[axis], self.max[axis]);
            if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
                return Err(Error::domain(format!(
                    "degenerate box axis {axis}: [{lo}, {hi}]"
                )));
            }
            if self.counts[axis] < 2 {
                return Err(Error::domain(format!(
                    "box axis {axis} has {} voxels, need at least 2",
                    self.counts[axis]
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn point(&self, idx: [usize; 3]) -> [f64; 3] {
        let mut p = [0.0; 3];
        for axis in 0..3 {
            let step = (self.max[axis] - self.min[axis]) / self.counts[axis] as f64;
            p[axis] = self.min[axis] + (idx[axis] as f64 + 0.5) * step;
        }
        p
    }

    pub fn voxel_count(&self) -> usize {
        self.counts.iter().product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    EquiM,
    UniJ,
    MultiMReal,
    MultiJReal,
}

impl SetKind {
    pub fn name(self) -> &'static str {
        match self {
            SetKind::EquiM => "equi-m",
            SetKind::UniJ => "uni-j",
            SetKind::MultiMReal => "multi-m-real",
            SetKind::MultiJReal => "multi-j-real",
        }
    }
}

/// Per-pixel, per-node escape statuses over a complex window.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub window: Window2D,
    pub kind: SetKind,
    pub budget: u32,
    pub radius: f64,
    nodes: usize,
    /// `statuses[pixel * nodes + k]`, pixels row-major with x fastest.
    statuses: Vec<NodeStatus>,
}

impl Field2D {
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn status(&self, i: usize, j: usize, node: usize) -> NodeStatus {
        self.statuses[(j * self.window.nx + i) * self.nodes + node]
    }

    pub fn pixel_statuses(&self, pixel: usize) -> &[NodeStatus] {
        &self.statuses[pixel * self.nodes..(pixel + 1) * self.nodes]
    }

    fn grid_from(&self, f: impl Fn(&[NodeStatus]) -> bool) -> BinaryGrid {
        let cells = self.statuses.chunks_exact(self.nodes).map(f).collect();
        BinaryGrid::new_2d(self.window.nx, self.window.ny, cells).expect("field shape")
    }

    /// Pixels where node `k` stays bounded.
    pub fn node_layer(&self, node: usize) -> BinaryGrid {
        assert!(node < self.nodes, "node {node} out of range");
        self.grid_from(|s| s[node].in_set())
    }

    /// Pixels where every node stays bounded.
    pub fn intersection(&self) -> BinaryGrid {
        self.grid_from(|s| s.iter().all(|st| st.in_set()))
    }

    pub fn node_escape_times(&self, node: usize) -> Vec<Option<u32>> {
        self.statuses
            .chunks_exact(self.nodes)
            .map(|s| s[node].escape_iteration())
            .collect()
    }

    /// Earliest escape over all nodes, `None` for pixels in the intersection.
    pub fn intersection_escape_times(&self) -> Vec<Option<u32>> {
        self.statuses
            .chunks_exact(self.nodes)
            .map(|s| s.iter().filter_map(|st| st.escape_iteration()).min())
            .collect()
    }
}

/// Voxel occupancy over a real box, with the first escape iteration of each
/// empty voxel.
#[derive(Debug, Clone, PartialEq)]
pub struct Field3D {
    pub bbox: Box3D,
    pub kind: SetKind,
    pub budget: u32,
    pub radius: f64,
    /// `IN_SET` for occupied voxels, otherwise the earliest escape iteration.
    cells: Vec<u32>,
}

impl Field3D {
    pub const IN_SET: u32 = u32::MAX;

    pub fn occupancy(&self) -> BinaryGrid {
        let [nx, ny, nz] = self.bbox.counts;
        BinaryGrid::new_3d(nx, ny, nz, self.cells.iter().map(|&c| c == Self::IN_SET).collect())
            .expect("field shape")
    }

    pub fn escape_times(&self) -> Vec<Option<u32>> {
        self.cells
            .iter()
            .map(|&c| (c != Self::IN_SET).then_some(c))
            .collect()
    }

    pub fn is_occupied(&self, idx: [usize; 3]) -> bool {
        let [nx, ny, _] = self.bbox.counts;
        self.cells[(idx[2] * ny + idx[1]) * nx + idx[0]] == Self::IN_SET
    }
}

fn complex_parameter(c: &NodeValues, n: usize) -> Result<Vec<Complex64>> {
    match c {
        NodeValues::Complex(v) if v.len() == n => Ok(v.clone()),
        NodeValues::Complex(v) => Err(Error::dimension(format!(
            "parameter has {} entries, network has {n} nodes",
            v.len()
        ))),
        NodeValues::Real(_) => Err(Error::dimension("complex slices need a complex parameter")),
    }
}

fn render_plane(
    w: &WeightMatrix,
    window: &Window2D,
    budget: u32,
    radius: f64,
    kind: SetKind,
    fixed_parameter: Option<&[Complex64]>,
) -> Result<Field2D> {
    window.validate()?;
    check_budget(budget, radius)?;
    let n = w.order();
    let nx = window.nx;
    let mut statuses = vec![NodeStatus::Undecided; window.pixel_count() * n];

    statuses.par_chunks_mut(nx * n).enumerate().for_each_init(
        || {
            let c = fixed_parameter.map_or_else(|| vec![Complex64::new(0.0, 0.0); n], <[_]>::to_vec);
            (EscapeScanner::<Complex64>::new(n), c, vec![Complex64::new(0.0, 0.0); n])
        },
        |(scanner, c, z0), (j, row)| {
            for i in 0..nx {
                let p = window.point(i, j);
                match kind {
                    SetKind::EquiM => c.fill(p),
                    _ => z0.fill(p),
                }
                scanner.scan(w, c, z0, budget, radius, &mut row[i * n..(i + 1) * n]);
            }
        },
    );

    Ok(Field2D {
        window: *window,
        kind,
        budget,
        radius,
        nodes: n,
        statuses,
    })
}

/// Equi-parameter slice of the Mandelbrot-type set: pixel `c` is sampled by
/// iterating the origin with parameter `(c, ..., c)`.
pub fn render_equi_m(w: &WeightMatrix, window: &Window2D, budget: u32, radius: f64) -> Result<Field2D> {
    render_plane(w, window, budget, radius, SetKind::EquiM, None)
}

/// Filled uni-Julia set: pixel `z` is sampled by iterating the diagonal seed
/// `(z, ..., z)` with a fixed, possibly non-equi, parameter.
pub fn render_uni_j(
    w: &WeightMatrix,
    c: &NodeValues,
    window: &Window2D,
    budget: u32,
    radius: f64,
) -> Result<Field2D> {
    let c = complex_parameter(c, w.order())?;
    render_plane(w, window, budget, radius, SetKind::UniJ, Some(&c))
}

fn render_volume(
    w: &WeightMatrix,
    bbox: &Box3D,
    budget: u32,
    radius: f64,
    kind: SetKind,
    fixed_parameter: Option<[f64; 3]>,
) -> Result<Field3D> {
    if w.order() != 3 {
        return Err(Error::UnsupportedDimension {
            operation: kind.name(),
            expected: 3,
            found: w.order(),
        });
    }
    bbox.validate()?;
    check_budget(budget, radius)?;
    let [nx, ny, _] = bbox.counts;
    let mut cells = vec![0u32; bbox.voxel_count()];

    cells.par_chunks_mut(nx).enumerate().for_each_init(
        || (EscapeScanner::<f64>::new(3), [NodeStatus::Undecided; 3]),
        |(scanner, statuses), (row_index, row)| {
            let (j, k) = (row_index % ny, row_index / ny);
            for (i, cell) in row.iter_mut().enumerate() {
                let p = bbox.point([i, j, k]);
                let (c, z0) = match fixed_parameter {
                    None => (p, [0.0; 3]),
                    Some(c) => (c, p),
                };
                scanner.scan(w, &c, &z0, budget, radius, statuses);
                *cell = statuses
                    .iter()
                    .filter_map(|s| s.escape_iteration())
                    .min()
                    .unwrap_or(Field3D::IN_SET);
            }
        },
    );

    Ok(Field3D {
        bbox: *bbox,
        kind,
        budget,
        radius,
        cells,
    })
}

/// Full multi-M set of a real 3-node network: voxel `(c1, c2, c3)` is
/// occupied when the critical multi-orbit stays bounded.
pub fn render_multi_m_real(w: &WeightMatrix, bbox: &Box3D, budget: u32, radius: f64) -> Result<Field3D> {
    render_volume(w, bbox, budget, radius, SetKind::MultiMReal, None)
}

/// Filled multi-J set of a real 3-node network at a fixed parameter.
pub fn render_multi_j_real(
    w: &WeightMatrix,
    c: &NodeValues,
    bbox: &Box3D,
    budget: u32,
    radius: f64,
) -> Result<Field3D> {
    let c = match c {
        NodeValues::Real(v) if v.len() == 3 => [v[0], v[1], v[2]],
        NodeValues::Real(v) => {
            return Err(Error::UnsupportedDimension {
                operation: SetKind::MultiJReal.name(),
                expected: 3,
                found: v.len(),
            })
        }
        NodeValues::Complex(_) => {
            return Err(Error::dimension("real multi-J sets need a real parameter"))
        }
    };
    render_volume(w, bbox, budget, radius, SetKind::MultiJReal, Some(c))
}

/// Occupied cells with at least one face neighbor that is empty or off-grid.
pub fn extract_boundary(grid: &BinaryGrid) -> BinaryGrid {
    let [nx, ny, nz] = grid.dims();
    let planar = grid.is_planar();
    let cells: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            if !grid.cells()[idx] {
                return false;
            }
            let [x, y, z] = grid.coords(idx);
            let on_frame = x == 0
                || y == 0
                || x + 1 == nx
                || y + 1 == ny
                || (!planar && (z == 0 || z + 1 == nz));
            if on_frame {
                return true;
            }
            let mut open = !grid.get(x - 1, y, z)
                || !grid.get(x + 1, y, z)
                || !grid.get(x, y - 1, z)
                || !grid.get(x, y + 1, z);
            if !planar {
                open = open || !grid.get(x, y, z - 1) || !grid.get(x, y, z + 1);
            }
            open
        })
        .collect();
    if planar {
        BinaryGrid::new_2d(nx, ny, cells).expect("same shape")
    } else {
        BinaryGrid::new_3d(nx, ny, nz, cells).expect("same shape")
    }
}
