use crate::error::{Error, Result};

/// Binary occupancy over a 2-D or 3-D lattice, x fastest, then y, then z.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGrid {
    dims: [usize; 3],
    planar: bool,
    cells: Vec<bool>,
}

impl BinaryGrid {
    pub fn new_2d(nx: usize, ny: usize, cells: Vec<bool>) -> Result<Self> {
        Self::build([nx, ny, 1], true, cells)
    }

    pub fn new_3d(nx: usize, ny: usize, nz: usize, cells: Vec<bool>) -> Result<Self> {
        Self::build([nx, ny, nz], false, cells)
    }

    fn build(dims: [usize; 3], planar: bool, cells: Vec<bool>) -> Result<Self> {
        let len = dims.iter().product::<usize>();
        if cells.len() != len {
            return Err(Error::dimension(format!(
                "grid {}x{}x{} needs {len} cells, got {}",
                dims[0],
                dims[1],
                dims[2],
                cells.len()
            )));
        }
        Ok(BinaryGrid {
            dims,
            planar,
            cells,
        })
    }

    pub fn empty_2d(nx: usize, ny: usize) -> Self {
        BinaryGrid {
            dims: [nx, ny, 1],
            planar: true,
            cells: vec![false; nx * ny],
        }
    }

    pub fn empty_3d(nx: usize, ny: usize, nz: usize) -> Self {
        BinaryGrid {
            dims: [nx, ny, nz],
            planar: false,
            cells: vec![false; nx * ny * nz],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn is_planar(&self) -> bool {
        self.planar
    }

    /// 2 for planar grids, 3 for volumes.
    pub fn rank(&self) -> usize {
        if self.planar {
            2
        } else {
            3
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (z * self.dims[1] + y) * self.dims[0] + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> bool {
        self.cells[self.index(x, y, z)]
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, value: bool) {
        let idx = self.index(x, y, z);
        self.cells[idx] = value;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn same_shape(&self, other: &BinaryGrid) -> bool {
        self.dims == other.dims && self.planar == other.planar
    }

    /// Cell coordinates of a flat index.
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        [idx % nx, (idx / nx) % ny, idx / (nx * ny)]
    }
}
