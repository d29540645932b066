use crate::error::{Error, Result};
use crate::render::BinaryGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub r_squared: f64,
    pub scales: Vec<usize>,
    /// Occupied boxes at each scale.
    pub counts: Vec<usize>,
}

/// Powers of two from 1 up to `min(extent) / 8` that divide every extent of
/// the grid.
pub fn default_scales(grid: &BinaryGrid) -> Vec<usize> {
    let [nx, ny, nz] = grid.dims();
    let extents: Vec<usize> = if grid.is_planar() {
        vec![nx, ny]
    } else {
        vec![nx, ny, nz]
    };
    let limit = extents.iter().copied().min().unwrap_or(0) / 8;
    let mut scales = Vec::new();
    let mut s = 1usize;
    while s <= limit.max(1) {
        if extents.iter().all(|e| e % s == 0) {
            scales.push(s);
        }
        s *= 2;
    }
    scales
}

fn count_boxes(grid: &BinaryGrid, scale: usize) -> usize {
    let [nx, ny, nz] = grid.dims();
    let z_scale = if grid.is_planar() { 1 } else { scale };
    let (bx, by) = (nx / scale, ny / scale);
    let bz = nz / z_scale;
    let mut hit = vec![false; bx * by * bz];
    for (idx, &cell) in grid.cells().iter().enumerate() {
        if cell {
            let [x, y, z] = grid.coords(idx);
            hit[((z / z_scale) * by + y / scale) * bx + x / scale] = true;
        }
    }
    hit.iter().filter(|&&h| h).count()
}

/// Box-counting dimension: least-squares slope of `log N(s)` against
/// `log(1/s)`, with `N(s)` the number of `s`-sided boxes holding an occupied
/// cell.
pub fn box_counting_dim(grid: &BinaryGrid, scales: &[usize]) -> Result<DimensionEstimate> {
    if scales.len() < 3 {
        return Err(Error::domain(format!(
            "box counting needs at least 3 scales, got {}",
            scales.len()
        )));
    }
    let [nx, ny, nz] = grid.dims();
    for &s in scales {
        let divides = s > 0 && nx % s == 0 && ny % s == 0 && (grid.is_planar() || nz % s == 0);
        if !divides {
            return Err(Error::domain(format!(
                "scale {s} does not divide the grid extent {nx}x{ny}x{nz}"
            )));
        }
    }
    let counts: Vec<usize> = scales.iter().map(|&s| count_boxes(grid, s)).collect();
    if counts.contains(&0) {
        return Err(Error::domain("box counting of an empty set"));
    }

    let xs: Vec<f64> = scales.iter().map(|&s| -(s as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let m = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let syy: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("box counting needs distinct scales"));
    }
    let slope = sxy / sxx;
    let residual: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - mean_y - slope * (x - mean_x)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - residual / syy).clamp(0.0, 1.0)
    };
    Ok(DimensionEstimate {
        slope,
        r_squared,
        scales: scales.to_vec(),
        counts,
    })
}
