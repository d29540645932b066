use crate::error::{Error, Result};

/// Row-major `n x n` coupling matrix. Row `k` holds the weights node `k`
/// reads from every node, so node `k` receives `sum_j W[k][j] * z_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::dimension("weight matrix needs at least one node"));
        }
        if entries.len() != n * n {
            return Err(Error::dimension(format!(
                "weight matrix of order {n} needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|w| !w.is_finite()) {
            return Err(Error::domain(format!(
                "weight ({}, {}) is not finite",
                pos / n,
                pos % n
            )));
        }
        Ok(WeightMatrix { n, entries })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (k, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::dimension(format!(
                    "row {k} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut entries = vec![0.0; n * n];
        for k in 0..n {
            entries[k * n + k] = 1.0;
        }
        Self::new(n, entries)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.entries[k * self.n..(k + 1) * self.n]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    /// Relabels nodes: node `k` of the result is node `perm[k]` of `self`,
    /// i.e. `P W P^-1` for the permutation matrix sending `e_perm[k]` to `e_k`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[r * n + c] = self.get(perm[r], perm[c]);
            }
        }
        Self::new(n, entries)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::dimension(format!(
            "permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::domain("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// The three 3-node couplings, plus an arbitrary matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// `z1 -> z1^2 + c1`, `z2 -> (a z1 + z2)^2 + c2`, `z3 -> (z1 + z2)^2 + c3`
    SimpleDual { a: f64 },
    /// Simple dual with a self-loop of weight `b` on the output node.
    SelfDrive { a: f64, b: f64 },
    /// Self-drive with feedback `f` from the output node into `z2`.
    Feedback { a: f64, b: f64, f: f64 },
    General(WeightMatrix),
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::SimpleDual { .. } => "simple-dual",
            ModelKind::SelfDrive { .. } => "self-drive",
            ModelKind::Feedback { .. } => "feedback",
            ModelKind::General(_) => "general",
        }
    }
}

pub fn build_model(kind: &ModelKind, n: usize) -> Result<WeightMatrix> {
    let (a, b, f) = match *kind {
        ModelKind::SimpleDual { a } => (a, 0.0, 0.0),
        ModelKind::SelfDrive { a, b } => (a, b, 0.0),
        ModelKind::Feedback { a, b, f } => (a, b, f),
        ModelKind::General(ref w) => {
            if w.order() != n {
                return Err(Error::dimension(format!(
                    "general model has {} nodes, requested {n}",
                    w.order()
                )));
            }
            return Ok(w.clone());
        }
    };
    if n != 3 {
        return Err(Error::dimension(format!(
            "{} model is defined on 3 nodes, requested {n}",
            kind.name()
        )));
    }
    WeightMatrix::from_rows(&[[1.0, 0.0, 0.0], [a, 1.0, f], [1.0, 1.0, b]])
}

/// Square 0/1 matrix used as a block of a bipartite adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyBlock {
    size: usize,
    cells: Vec<bool>,
}

impl AdjacencyBlock {
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let size = rows.len();
        let mut cells = Vec::with_capacity(size * size);
        for (k, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != size {
                return Err(Error::dimension(format!(
                    "block row {k} has {} entries, expected {size}",
                    row.len()
                )));
            }
            for &v in row {
                match v {
                    0 => cells.push(false),
                    1 => cells.push(true),
                    _ => return Err(Error::domain(format!("block entry {v} is not 0 or 1"))),
                }
            }
        }
        Ok(AdjacencyBlock { size, cells })
    }

    pub fn from_cells(size: usize, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != size * size {
            return Err(Error::dimension(format!(
                "block of size {size} needs {} cells, got {}",
                size * size,
                cells.len()
            )));
        }
        Ok(AdjacencyBlock { size, cells })
    }

    pub fn ones(size: usize) -> Self {
        AdjacencyBlock {
            size,
            cells: vec![true; size * size],
        }
    }

    pub fn zeros(size: usize) -> Self {
        AdjacencyBlock {
            size,
            cells: vec![false; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.size + col]
    }

    pub fn count_ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Edge weights inside (`xx`, `yy`) and across (`xy`, `yx`) the two cliques.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockWeights {
    pub xx: f64,
    pub xy: f64,
    pub yx: f64,
    pub yy: f64,
}

impl BlockWeights {
    /// `g_xx = g_yy = g`, `g_xy = g_yx = -g`.
    pub fn balanced(g: f64) -> Self {
        BlockWeights {
            xx: g,
            xy: -g,
            yx: -g,
            yy: g,
        }
    }
}

/// `W = [[g_xx M, g_xy A1], [g_yx A2, g_yy M]]`.
pub fn build_bipartite(
    clique: &AdjacencyBlock,
    x_to_y: &AdjacencyBlock,
    y_to_x: &AdjacencyBlock,
    g: BlockWeights,
) -> Result<WeightMatrix> {
    let half = clique.size();
    if half == 0 {
        return Err(Error::dimension("bipartite blocks must be non-empty"));
    }
    if x_to_y.size() != half || y_to_x.size() != half {
        return Err(Error::dimension(format!(
            "bipartite blocks disagree in size: M {half}, A1 {}, A2 {}",
            x_to_y.size(),
            y_to_x.size()
        )));
    }
    let n = 2 * half;
    let mut entries = vec![0.0; n * n];
    let quadrants = [
        (0, 0, clique, g.xx),
        (0, half, x_to_y, g.xy),
        (half, 0, y_to_x, g.yx),
        (half, half, clique, g.yy),
    ];
    for (r0, c0, block, weight) in quadrants {
        for r in 0..half {
            for c in 0..half {
                if block.get(r, c) {
                    entries[(r0 + r) * n + c0 + c] = weight;
                }
            }
        }
    }
    WeightMatrix::new(n, entries)
}

/// The splitmix64 generator: one 64-bit state word, full period.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` by rejection, `bound > 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }
}

/// Picks `count` distinct cells of a `size x size` block by a partial
/// Fisher-Yates shuffle over cell indices.
fn random_block(rng: &mut SplitMix64, size: usize, count: usize) -> AdjacencyBlock {
    let total = size * size;
    let mut order: Vec<usize> = (0..total).collect();
    for i in 0..count {
        let j = i + rng.below((total - i) as u64) as usize;
        order.swap(i, j);
    }
    let mut cells = vec![false; total];
    for &idx in &order[..count] {
        cells[idx] = true;
    }
    AdjacencyBlock { size, cells }
}

/// Two all-ones cliques joined by exactly `x_to_y` X-to-Y and `y_to_x`
/// Y-to-X edges at seeded random positions. `A1` is drawn first, then `A2`,
/// from one splitmix64 stream.
pub fn build_bipartite_random(
    half: usize,
    x_to_y: usize,
    y_to_x: usize,
    g: BlockWeights,
    seed: u64,
) -> Result<WeightMatrix> {
    let (a1, a2) = random_blocks(half, x_to_y, y_to_x, seed)?;
    build_bipartite(&AdjacencyBlock::ones(half), &a1, &a2, g)
}

pub fn random_blocks(
    half: usize,
    x_to_y: usize,
    y_to_x: usize,
    seed: u64,
) -> Result<(AdjacencyBlock, AdjacencyBlock)> {
    if half == 0 {
        return Err(Error::domain("clique size must be at least 1"));
    }
    let cap = half * half;
    for (name, count) in [("N_xy", x_to_y), ("N_yx", y_to_x)] {
        if count > cap {
            return Err(Error::domain(format!(
                "{name} = {count} exceeds the {cap} available edges"
            )));
        }
    }
    let mut rng = SplitMix64::new(seed);
    let a1 = random_block(&mut rng, half, x_to_y);
    let a2 = random_block(&mut rng, half, y_to_x);
    Ok((a1, a2))
}
