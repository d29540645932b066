use crate::error::{Error, Result};
use crate::render::BinaryGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    Eight,
    Six,
    TwentySix,
}

impl Connectivity {
    /// Parses a neighbor count (4, 8, 6 or 26) for a grid of the given rank.
    pub fn from_code(code: u32, rank: usize) -> Result<Self> {
        let conn = match code {
            4 => Connectivity::Four,
            8 => Connectivity::Eight,
            6 => Connectivity::Six,
            26 => Connectivity::TwentySix,
            _ => return Err(Error::domain(format!("unknown connectivity {code}"))),
        };
        conn.check_rank(rank)?;
        Ok(conn)
    }

    pub fn code(self) -> u32 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
            Connectivity::Six => 6,
            Connectivity::TwentySix => 26,
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Connectivity::Four | Connectivity::Eight => 2,
            Connectivity::Six | Connectivity::TwentySix => 3,
        }
    }

    /// 8 in 2-D, 26 in 3-D.
    pub fn default_for(rank: usize) -> Self {
        if rank == 2 {
            Connectivity::Eight
        } else {
            Connectivity::TwentySix
        }
    }

    fn check_rank(self, rank: usize) -> Result<()> {
        if self.rank() != rank {
            return Err(Error::domain(format!(
                "{}-connectivity is not defined on a {rank}-D grid",
                self.code()
            )));
        }
        Ok(())
    }

    /// Neighbor offsets that precede a cell in raster order.
    fn backward_offsets(self) -> Vec<[isize; 3]> {
        let full = matches!(self, Connectivity::Eight | Connectivity::TwentySix);
        let zs: &[isize] = if self.rank() == 2 { &[0] } else { &[-1, 0, 1] };
        let mut offsets = Vec::new();
        for &dz in zs {
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let order = (dz, dy, dx);
                    if order >= (0, 0, 0) {
                        continue;
                    }
                    let nonzero = [dx, dy, dz].iter().filter(|&&d| d != 0).count();
                    if full || nonzero == 1 {
                        offsets.push([dx, dy, dz]);
                    }
                }
            }
        }
        offsets
    }
}

/// Component labels for an occupancy grid. Label 0 is background; labels
/// `1..=component_count` are numbered in raster order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub labels: Vec<u32>,
    pub component_count: usize,
    pub connectivity: Connectivity,
    pub dims: [usize; 3],
}

impl ComponentLabeling {
    /// Cell count of each component, indexed by `label - 1`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.component_count];
        for &l in &self.labels {
            if l > 0 {
                sizes[l as usize - 1] += 1;
            }
        }
        sizes
    }
}

struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    fn new() -> Self {
        DisjointSets { parent: Vec::new() }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller provisional label as root.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass union-find labeling.
pub fn label_components(grid: &BinaryGrid, connectivity: Connectivity) -> Result<ComponentLabeling> {
    connectivity.check_rank(grid.rank())?;
    let dims = grid.dims();
    let [nx, ny, nz] = dims;
    let offsets = connectivity.backward_offsets();
    let mut provisional = vec![u32::MAX; grid.len()];
    let mut sets = DisjointSets::new();

    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let idx = grid.index(x, y, z);
                if !grid.cells()[idx] {
                    continue;
                }
                let mut label = u32::MAX;
                for off in &offsets {
                    let (qx, qy, qz) = (
                        x as isize + off[0],
                        y as isize + off[1],
                        z as isize + off[2],
                    );
                    if qx < 0 || qy < 0 || qz < 0 || qx >= nx as isize || qy >= ny as isize {
                        continue;
                    }
                    let neighbor = provisional[grid.index(qx as usize, qy as usize, qz as usize)];
                    if neighbor == u32::MAX {
                        continue;
                    }
                    if label == u32::MAX {
                        label = neighbor;
                    } else if label != neighbor {
                        sets.union(label, neighbor);
                    }
                }
                if label == u32::MAX {
                    label = sets.make();
                }
                provisional[idx] = label;
            }
        }
    }

    let mut final_label = vec![0u32; sets.parent.len()];
    let mut count = 0u32;
    let labels = provisional
        .iter()
        .map(|&p| {
            if p == u32::MAX {
                return 0;
            }
            let root = sets.find(p) as usize;
            if final_label[root] == 0 {
                count += 1;
                final_label[root] = count;
            }
            final_label[root]
        })
        .collect();

    Ok(ComponentLabeling {
        labels,
        component_count: count as usize,
        connectivity,
        dims,
    })
}
